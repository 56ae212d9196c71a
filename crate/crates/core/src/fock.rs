//! States of the rank-d bc-beta-gamma Fock module.
//!
//! A state is a finite linear combination of canonically ordered monomials in
//! creation modes applied to the vacuum, with exact rational coefficients.
//! Modes use the Borcherds convention `v(z) = sum_n v_(n) z^(-1-n)`, so the
//! generator state `v` is `v_(-1)|0>` and every `v_(n)` with `n >= 0` kills
//! the vacuum.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exact coefficient type.
pub type Coeff = BigRational;

/// Conformal weights and q-exponents: always small rationals with
/// denominators dividing 24, so a machine-sized ratio is exact.
pub type Weight = Rational64;

pub fn coeff(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn coeff_frac(n: i64, d: i64) -> Coeff {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The four free-field families. The declaration order is the canonical
/// ordering used for monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    B,
    C,
    Beta,
    Gamma,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::B, Family::C, Family::Beta, Family::Gamma];

    pub fn is_odd(self) -> bool {
        matches!(self, Family::B | Family::C)
    }

    /// Twice the superconformal weight of the generator: b, c have 1/2,
    /// beta has 1, gamma has 0.
    pub fn weight2(self) -> i64 {
        match self {
            Family::B | Family::C => 1,
            Family::Beta => 2,
            Family::Gamma => 0,
        }
    }

    pub fn weight(self) -> Weight {
        Weight::new(self.weight2(), 2)
    }

    /// J_0 charge of a single mode.
    pub fn charge(self) -> i64 {
        match self {
            Family::B => -1,
            Family::C => 1,
            Family::Beta | Family::Gamma => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::B => "b",
            Family::C => "c",
            Family::Beta => "beta",
            Family::Gamma => "gamma",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        match s {
            "b" => Some(Family::B),
            "c" => Some(Family::C),
            "beta" => Some(Family::Beta),
            "gamma" => Some(Family::Gamma),
            _ => None,
        }
    }
}

/// A single mode `family^index_(n)`.
///
/// Field order matters: the derived `Ord` is the canonical monomial order
/// (family, then index, then n ascending).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeRef {
    pub family: Family,
    pub index: u32,
    pub n: i64,
}

impl ModeRef {
    pub fn new(family: Family, index: u32, n: i64) -> Self {
        ModeRef { family, index, n }
    }

    pub fn b(index: u32, n: i64) -> Self {
        Self::new(Family::B, index, n)
    }
    pub fn c(index: u32, n: i64) -> Self {
        Self::new(Family::C, index, n)
    }
    pub fn beta(index: u32, n: i64) -> Self {
        Self::new(Family::Beta, index, n)
    }
    pub fn gamma(index: u32, n: i64) -> Self {
        Self::new(Family::Gamma, index, n)
    }

    pub fn is_odd(&self) -> bool {
        self.family.is_odd()
    }

    pub fn is_creation(&self) -> bool {
        self.n <= -1
    }

    /// Twice the weight shift `h_fam - 1 - n` produced by this mode.
    pub fn weight2(&self) -> i64 {
        self.family.weight2() - 2 - 2 * self.n
    }

    pub fn weight(&self) -> Weight {
        Weight::new(self.weight2(), 2)
    }

    pub fn charge(&self) -> i64 {
        self.family.charge()
    }

    /// The same mode with its mode number replaced.
    pub fn with_n(&self, n: i64) -> Self {
        ModeRef { n, ..*self }
    }

    pub fn check_rank(&self, rank: u32) -> Result<()> {
        if self.index == 0 || self.index > rank {
            return Err(Error::IndexOutOfRange {
                index: self.index,
                rank,
            });
        }
        Ok(())
    }
}

impl fmt::Display for ModeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.family.name(), self.index, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_odd(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn flip_if(self, odd: bool) -> Self {
        Parity::from_odd(self.is_odd() ^ odd)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// The (L_0, J_0, parity) grading triple of a homogeneous state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grading {
    pub weight: Weight,
    pub charge: i64,
    pub parity: Parity,
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.weight, self.charge, self.parity)
    }
}

/// Sorts `modes` into canonical order in place and returns the Koszul sign
/// of the permutation, or `None` when an odd mode repeats.
pub(crate) fn koszul_sort(modes: &mut [ModeRef]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..modes.len() {
        let mut j = i;
        while j > 0 && modes[j - 1] > modes[j] {
            if modes[j - 1].is_odd() && modes[j].is_odd() {
                sign = -sign;
            }
            modes.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in modes.windows(2) {
        if w[0] == w[1] && w[0].is_odd() {
            return None;
        }
    }
    Some(sign)
}

/// A canonically ordered product of creation modes applied to the vacuum.
/// The empty monomial is the vacuum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(SmallVec<[ModeRef; 8]>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(SmallVec::new())
    }

    /// Canonicalizes an arbitrary sequence of creation modes; returns the
    /// Koszul sign and the monomial, or `None` for a repeated fermion.
    pub fn from_modes(modes: &[ModeRef]) -> Option<(i32, Monomial)> {
        let mut v: SmallVec<[ModeRef; 8]> = modes.iter().copied().collect();
        let sign = koszul_sort(&mut v)?;
        Some((sign, Monomial(v)))
    }

    pub fn modes(&self) -> &[ModeRef] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight2(&self) -> i64 {
        self.0.iter().map(|m| m.weight2()).sum()
    }

    pub fn weight(&self) -> Weight {
        Weight::new(self.weight2(), 2)
    }

    pub fn charge(&self) -> i64 {
        self.0.iter().map(|m| m.charge()).sum()
    }

    pub fn fermion_count(&self) -> usize {
        self.0.iter().filter(|m| m.is_odd()).count()
    }

    pub fn parity(&self) -> Parity {
        Parity::from_odd(self.fermion_count() % 2 == 1)
    }

    pub fn is_odd(&self) -> bool {
        self.parity().is_odd()
    }

    /// Number of `gamma[i,-1]` factors (the weight-zero bosonic modes).
    pub fn gamma_zero_degree(&self) -> usize {
        self.0
            .iter()
            .filter(|m| m.family == Family::Gamma && m.n == -1)
            .count()
    }

    pub fn max_index(&self) -> u32 {
        self.0.iter().map(|m| m.index).max().unwrap_or(0)
    }

    pub fn grading(&self) -> Grading {
        Grading {
            weight: self.weight(),
            charge: self.charge(),
            parity: self.parity(),
        }
    }

    /// Splits off the leftmost mode: `m = head * rest`.
    pub(crate) fn split_first(&self) -> Option<(ModeRef, Monomial)> {
        let (&head, rest) = self.0.split_first()?;
        Some((head, Monomial(rest.iter().copied().collect())))
    }

    /// Removes the mode at position `i`; the result is still canonical.
    pub(crate) fn without(&self, i: usize) -> Monomial {
        let mut v = self.0.clone();
        v.remove(i);
        Monomial(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.0 {
            write!(f, "{} ", m)?;
        }
        f.write_str("|0>")
    }
}

/// A finite exact linear combination of monomials. Zero coefficients are
/// never stored, so structural equality is equality of vectors.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct State {
    terms: BTreeMap<Monomial, Coeff>,
}

impl State {
    pub fn zero() -> Self {
        State::default()
    }

    pub fn vacuum() -> Self {
        State::from_monomial(Monomial::vacuum())
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Coeff::one());
        State { terms }
    }

    pub fn from_term(m: Monomial, c: Coeff) -> Self {
        let mut s = State::zero();
        s.add_term(m, c);
        s
    }

    /// Generator state `v_(-1)|0>`.
    pub fn generator(family: Family, index: u32) -> Self {
        State::from_monomial(Monomial(SmallVec::from_slice(&[ModeRef::new(
            family, index, -1,
        )])))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Coeff)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &State, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Coeff) -> State {
        if c.is_zero() {
            return State::zero();
        }
        State {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x * c))
                .collect(),
        }
    }

    /// Largest twice-weight among the terms; `None` for the zero state.
    pub fn max_weight2(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.weight2()).max()
    }

    pub fn max_weight(&self) -> Option<Weight> {
        self.max_weight2().map(|w| Weight::new(w, 2))
    }

    /// The homogeneous components under the full grading.
    pub fn components(&self) -> BTreeMap<Grading, State> {
        let mut out: BTreeMap<Grading, State> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.grading())
                .or_default()
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Components of fixed J_0 charge.
    pub fn charge_components(&self) -> BTreeMap<i64, State> {
        let mut out: BTreeMap<i64, State> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.charge())
                .or_default()
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Even and odd parts.
    pub fn parity_components(&self) -> (State, State) {
        let mut even = State::zero();
        let mut odd = State::zero();
        for (m, c) in &self.terms {
            let target = if m.is_odd() { &mut odd } else { &mut even };
            target.terms.insert(m.clone(), c.clone());
        }
        (even, odd)
    }

    /// The parity of a parity-homogeneous nonzero state.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// Applies `(-1)^F` (fermion number parity).
    pub fn parity_twisted(&self) -> State {
        State {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), if m.is_odd() { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// Largest tensor index that appears; 0 for states built from the vacuum.
    pub fn max_index(&self) -> u32 {
        self.terms.keys().map(|m| m.max_index()).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: u32) -> Result<()> {
        for m in self.terms.keys() {
            for x in m.modes() {
                x.check_rank(rank)?;
            }
        }
        Ok(())
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn max_abs_coeff(&self) -> Coeff {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Coeff::zero)
    }
}

impl FromIterator<(Monomial, Coeff)> for State {
    fn from_iter<I: IntoIterator<Item = (Monomial, Coeff)>>(iter: I) -> Self {
        let mut s = State::zero();
        for (m, c) in iter {
            s.add_term(m, c);
        }
        s
    }
}

impl AddAssign<&State> for State {
    fn add_assign(&mut self, rhs: &State) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<State> for State {
    fn add_assign(&mut self, rhs: State) {
        if self.terms.is_empty() {
            *self = rhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&State> for State {
    fn sub_assign(&mut self, rhs: &State) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&State> for &State {
    type Output = State;
    fn add(self, rhs: &State) -> State {
        let mut s = self.clone();
        s += rhs;
        s
    }
}

impl Add for State {
    type Output = State;
    fn add(mut self, rhs: State) -> State {
        self += rhs;
        self
    }
}

impl Sub<&State> for &State {
    type Output = State;
    fn sub(self, rhs: &State) -> State {
        let mut s = self.clone();
        s -= rhs;
        s
    }
}

impl Sub for State {
    type Output = State;
    fn sub(mut self, rhs: State) -> State {
        self -= &rhs;
        self
    }
}

impl Neg for &State {
    type Output = State;
    fn neg(self) -> State {
        State {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        -&self
    }
}

impl Mul<&State> for &Coeff {
    type Output = State;
    fn mul(self, rhs: &State) -> State {
        rhs.scaled(self)
    }
}

/// Canonicalizes `coeff * x_1 x_2 ... x_k |0>` at the given rank.
///
/// Absorbs the Koszul sign of the reordering into the coefficient and
/// returns zero when a fermionic mode repeats.
pub fn canonicalize(seq: &[ModeRef], coeff: Coeff, rank: u32) -> Result<State> {
    for x in seq {
        x.check_rank(rank)?;
        if !x.is_creation() {
            return Err(Error::NotCreation(x.to_string()));
        }
    }
    Ok(match Monomial::from_modes(seq) {
        Some((sign, m)) => State::from_term(m, if sign < 0 { -coeff } else { coeff }),
        None => State::zero(),
    })
}

/// Partition of the terms of `s` by grading, with the number of distinct
/// monomials in each component.
pub fn grade(s: &State) -> BTreeMap<Grading, usize> {
    let mut out = BTreeMap::new();
    for m in s.terms.keys() {
        *out.entry(m.grading()).or_insert(0) += 1;
    }
    out
}
