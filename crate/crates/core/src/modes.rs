//! Mode action, composite fields and OPEs.
//!
//! Generators act by moving the mode rightwards through a monomial using
//! `[gamma^i_(m), beta_j,(n)] = delta_ij delta_{m+n+1,0}` and
//! `{b_i,(m), c^j_(n)} = delta_ij delta_{m+n+1,0}`. Modes of composite
//! states are built by structural recursion on the canonical monomial: a
//! monomial `v_(-k) a'` is the normally ordered product of `d^(k-1) v` with
//! `a'`, and
//!
//! ```text
//! (v_(-k) a')_(n) t = sum_j C(k-1+j, j) [ v_(-k-j) a'_(n+j) t
//!                                       - (-1)^k p(v,a') a'_(n-k-j) v_(j) t ]
//! ```
//!
//! Both sums are finite because every state has non-negative weight.

use std::collections::BTreeMap;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::check::{expect_eq, CheckOutcome};
use crate::fock::{Coeff, Family, ModeRef, Monomial, State};

/// The scalar (super)commutator `[x, y}` of two generator modes.
pub fn bracket(x: ModeRef, y: ModeRef) -> i64 {
    if x.index != y.index || x.n + y.n + 1 != 0 {
        return 0;
    }
    match (x.family, y.family) {
        (Family::Gamma, Family::Beta) => 1,
        (Family::Beta, Family::Gamma) => -1,
        (Family::B, Family::C) | (Family::C, Family::B) => 1,
        _ => 0,
    }
}

fn apply_mode_mono(x: ModeRef, m: &Monomial, c: &Coeff, out: &mut State) {
    if x.is_creation() {
        let mut seq: Vec<ModeRef> = Vec::with_capacity(m.len() + 1);
        seq.push(x);
        seq.extend_from_slice(m.modes());
        if let Some((sign, mono)) = Monomial::from_modes(&seq) {
            out.add_term(mono, if sign < 0 { -c.clone() } else { c.clone() });
        }
        return;
    }
    let mut sign = 1i64;
    for (i, &y) in m.modes().iter().enumerate() {
        let b = bracket(x, y);
        if b != 0 {
            out.add_term(m.without(i), c * BigInt::from(sign * b));
        }
        if x.is_odd() && y.is_odd() {
            sign = -sign;
        }
    }
}

/// Action of a single generator mode on a state.
pub fn apply_mode(x: ModeRef, s: &State) -> State {
    let mut out = State::zero();
    for (m, c) in s.terms() {
        apply_mode_mono(x, m, c, &mut out);
    }
    out
}

/// The translation operator, via `[d, v_(n)] = -n v_(n-1)` and `d|0> = 0`.
pub fn translate(s: &State) -> State {
    let mut out = State::zero();
    for (m, c) in s.terms() {
        for (i, y) in m.modes().iter().enumerate() {
            let mut seq: Vec<ModeRef> = m.modes().to_vec();
            seq[i] = y.with_n(y.n - 1);
            if let Some((sign, mono)) = Monomial::from_modes(&seq) {
                out.add_term(mono, c * BigInt::from(-y.n * sign as i64));
            }
        }
    }
    out
}

/// Divided power `d^j s / j!`.
pub fn translate_divided(s: &State, j: u32) -> State {
    let mut cur = s.clone();
    for i in 1..=j {
        cur = translate(&cur).scaled(&Coeff::new(BigInt::one(), BigInt::from(i)));
    }
    cur
}

/// Generalised binomial coefficient `C(m, j)` for any integer `m`.
pub fn binomial(m: i64, j: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(m - i);
        den *= BigInt::from(i + 1);
    }
    num.div_floor(&den)
}

fn floor_half(x: i64) -> i64 {
    x.div_euclid(2)
}

type CacheKey = (Monomial, i64, Monomial);

/// Memo table for `a_(n) t` on monomials. Entries are write-once values of a
/// pure function, so sharing the table never changes results.
#[derive(Default)]
pub struct OpeTable {
    map: DashMap<CacheKey, State>,
}

impl OpeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn clear(&self) {
        self.map.clear();
    }
}

/// Evaluates modes of composite fields, optionally through an [`OpeTable`].
pub struct ModeEngine {
    table: Option<OpeTable>,
}

static GLOBAL: Lazy<ModeEngine> = Lazy::new(ModeEngine::cached);

/// The process-wide cached engine used by the free functions.
pub fn engine() -> &'static ModeEngine {
    &GLOBAL
}

impl ModeEngine {
    pub fn cached() -> Self {
        ModeEngine {
            table: Some(OpeTable::new()),
        }
    }

    pub fn uncached() -> Self {
        ModeEngine { table: None }
    }

    pub fn table(&self) -> Option<&OpeTable> {
        self.table.as_ref()
    }

    /// `a_(n) t` for arbitrary states `a`, `t`.
    pub fn field_coeff(&self, a: &State, n: i64, t: &State) -> State {
        let mut out = State::zero();
        for (am, ac) in a.terms() {
            for (tm, tc) in t.terms() {
                let r = self.mono_field(am, n, tm);
                if !r.is_zero() {
                    out.add_scaled(&r, &(ac * tc));
                }
            }
        }
        out
    }

    fn mono_field_state(&self, a: &Monomial, n: i64, t: &State) -> State {
        let mut out = State::zero();
        for (tm, tc) in t.terms() {
            let r = self.mono_field(a, n, tm);
            if !r.is_zero() {
                out.add_scaled(&r, tc);
            }
        }
        out
    }

    fn mono_field(&self, a: &Monomial, n: i64, t: &Monomial) -> State {
        if a.is_vacuum() {
            return if n == -1 {
                State::from_monomial(t.clone())
            } else {
                State::zero()
            };
        }
        // a_(n) t has weight wt(a) + wt(t) - n - 1, which must be >= 0.
        if a.weight2() + t.weight2() - 2 * n - 2 < 0 {
            return State::zero();
        }
        if a.len() == 1 && a.modes()[0].n == -1 {
            return apply_mode(a.modes()[0].with_n(n), &State::from_monomial(t.clone()));
        }
        if let Some(table) = &self.table {
            let key = (a.clone(), n, t.clone());
            if let Some(hit) = table.map.get(&key) {
                return hit.clone();
            }
            let r = self.mono_field_uncached(a, n, t);
            table.map.insert(key, r.clone());
            r
        } else {
            self.mono_field_uncached(a, n, t)
        }
    }

    fn mono_field_uncached(&self, a: &Monomial, n: i64, t: &Monomial) -> State {
        let (v, rest) = a.split_first().expect("non-vacuum monomial");
        let k = -v.n;
        debug_assert!(k >= 1);
        let t_state = State::from_monomial(t.clone());
        let mut out = State::zero();

        // v_(-k-j) (rest_(n+j) t)
        let j1 = floor_half(rest.weight2() + t.weight2() - 2) - n;
        for j in 0..=j1.max(-1) {
            let inner = self.mono_field(&rest, n + j, t);
            if inner.is_zero() {
                continue;
            }
            let c = Coeff::from_integer(binomial(k - 1 + j, j as u64));
            out.add_scaled(&apply_mode(v.with_n(-k - j), &inner), &c);
        }

        // -(-1)^k p(v, rest) rest_(n-k-j) (v_(j) t)
        let koszul = if v.is_odd() && rest.is_odd() { -1 } else { 1 };
        let sign = -(if k % 2 == 0 { 1 } else { -1 }) * koszul;
        let j2 = floor_half(v.family.weight2() - 2 + t.weight2());
        for j in 0..=j2.max(-1) {
            let vt = apply_mode(v.with_n(j), &t_state);
            if vt.is_zero() {
                continue;
            }
            let inner = self.mono_field_state(&rest, n - k - j, &vt);
            if inner.is_zero() {
                continue;
            }
            let c = Coeff::from_integer(binomial(k - 1 + j, j as u64) * BigInt::from(sign));
            out.add_scaled(&inner, &c);
        }
        out
    }

    pub fn nop(&self, a: &State, b: &State) -> State {
        self.field_coeff(a, -1, b)
    }

    /// All nonzero `a_(n) b` with `n >= 0`.
    pub fn ope_singular(&self, a: &State, b: &State) -> BTreeMap<u32, State> {
        let mut out = BTreeMap::new();
        let (Some(wa), Some(wb)) = (a.max_weight2(), b.max_weight2()) else {
            return out;
        };
        let top = floor_half(wa + wb - 2);
        for n in 0..=top {
            let r = self.field_coeff(a, n, b);
            if !r.is_zero() {
                out.insert(n as u32, r);
            }
        }
        out
    }
}

pub fn field_coeff(a: &State, n: i64, t: &State) -> State {
    engine().field_coeff(a, n, t)
}

/// The normally ordered product `a_(-1) b`.
pub fn nop(a: &State, b: &State) -> State {
    engine().nop(a, b)
}

pub fn ope_singular(a: &State, b: &State) -> BTreeMap<u32, State> {
    engine().ope_singular(a, b)
}

/// Smallest `n` from which `field_coeff(a, n, t)` must vanish on weight
/// grounds.
pub fn annihilation_bound(a: &State, t: &State) -> i64 {
    match (a.max_weight2(), t.max_weight2()) {
        (Some(wa), Some(wt)) => floor_half(wa + wt - 2) + 1,
        _ => i64::MIN,
    }
}

/// Supercommutator `[a_(m), b_(n)} t`, computed by two-sided evaluation.
pub fn supercommutator(a: &State, m: i64, b: &State, n: i64, t: &State) -> State {
    let (ae, ao) = a.parity_components();
    let (be, bo) = b.parity_components();
    let mut out = State::zero();
    for (ap, a_odd) in [(&ae, false), (&ao, true)] {
        if ap.is_zero() {
            continue;
        }
        for (bp, b_odd) in [(&be, false), (&bo, true)] {
            if bp.is_zero() {
                continue;
            }
            let ab = field_coeff(ap, m, &field_coeff(bp, n, t));
            let ba = field_coeff(bp, n, &field_coeff(ap, m, t));
            out += ab;
            if a_odd && b_odd {
                out += ba;
            } else {
                out -= &ba;
            }
        }
    }
    out
}

/// Right-hand side of the commutator formula,
/// `sum_j C(m, j) (a_(j) b)_(m+n-j) t`.
pub fn commutator_formula(a: &State, m: i64, b: &State, n: i64, t: &State) -> State {
    let mut out = State::zero();
    for (j, ajb) in ope_singular(a, b) {
        let c = Coeff::from_integer(binomial(m, j as u64));
        if c.is_zero() {
            continue;
        }
        out.add_scaled(&field_coeff(&ajb, m + n - j as i64, t), &c);
    }
    out
}

/// Checks `[a_(m), b_(n)} = sum_j C(m,j) (a_(j) b)_(m+n-j)` on every basis
/// state.
pub fn borcherds_commutator_check(
    a: &State,
    m: i64,
    b: &State,
    n: i64,
    basis: &[State],
) -> CheckOutcome {
    let mut outcome = CheckOutcome::default();
    for t in basis {
        let lhs = supercommutator(a, m, b, n, t);
        let rhs = commutator_formula(a, m, b, n, t);
        expect_eq(
            &mut outcome,
            || format!("commutator modes ({}, {})", m, n),
            t,
            &rhs,
            &lhs,
        );
        if !outcome.passed() {
            break;
        }
    }
    outcome
}
