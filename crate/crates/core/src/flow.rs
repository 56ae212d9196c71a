//! The spectral-flow operators
//!
//! ```text
//! sigma(z) = (-1)^F0 E+_{-J}(z) Omega+(z) E-_{-J}(z) z^{-J0}
//! tau(w)   = (-1)^F0 E+_{J}(w)  Omega-(w) E-_{J}(w)  w^{J0}
//! ```
//!
//! with `E+_a(z) = exp(sum_n a_(-n) z^n / n)` and
//! `E-_a(z) = exp(sum_n a_(n) z^-n / -n)`, `n >= 1`. Every factor shifts the
//! z-power by its weight shift up to a fixed offset, so each z^k
//! coefficient is a finite sum.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::check::{expect_eq, CheckOutcome, Counterexample};
use crate::error::{Error, Result};
use crate::fock::{coeff, Coeff, Family, ModeRef, State, Weight};
use crate::modes::{annihilation_bound, apply_mode, field_coeff, ope_singular};
use crate::n2::CurrentSet;
use crate::window::Window;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `(-1)^F0`, the sign `(-1)^(#b + #c)`.
    Parity,
    /// `E+_{sign * alpha}(z)`.
    ExpPlus { alpha: State, sign: i8 },
    /// The field `Y(v, z)` of a weight-homogeneous state.
    StateField(State),
    /// `E-_{sign * alpha}(z)`.
    ExpMinus { alpha: State, sign: i8 },
    /// `z^{sign * J0}`.
    ChargePower { sign: i8 },
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |x: i8| if x > 0 { "+" } else { "-" };
        match self {
            Factor::Parity => write!(f, "(-1)^F0"),
            Factor::ExpPlus { sign, .. } => write!(f, "E+[{}a]", s(*sign)),
            Factor::StateField(_) => write!(f, "Y(v)"),
            Factor::ExpMinus { sign, .. } => write!(f, "E-[{}a]", s(*sign)),
            Factor::ChargePower { sign } => write!(f, "z^({}J0)", s(*sign)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Sigma,
    Tau,
}

/// An ordered product of factors, rightmost applied first.
///
/// Supported shapes: exactly one `StateField`; to its left only `Parity`
/// and at most one `ExpPlus`; to its right only `Parity`, `ExpMinus` and
/// `ChargePower`. The charge-power exponent reads `J0` of the state it
/// acts on, so the current `J` is carried along.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowKernel {
    factors: Vec<Factor>,
    direction: Direction,
    field_pos: usize,
}

impl FlowKernel {
    pub fn new(factors: Vec<Factor>, direction: Direction) -> Result<Self> {
        let fields: Vec<usize> = factors
            .iter()
            .enumerate()
            .filter(|(_, f)| matches!(f, Factor::StateField(_)))
            .map(|(i, _)| i)
            .collect();
        let &[field_pos] = fields.as_slice() else {
            return Err(Error::InvalidArgument(
                "a kernel needs exactly one state field".into(),
            ));
        };
        if let Factor::StateField(v) = &factors[field_pos] {
            if v.components().keys().map(|g| g.weight).collect::<std::collections::BTreeSet<_>>().len() > 1 {
                return Err(Error::InvalidArgument(
                    "the state field must be weight-homogeneous".into(),
                ));
            }
        }
        let left = &factors[..field_pos];
        if left
            .iter()
            .any(|f| !matches!(f, Factor::Parity | Factor::ExpPlus { .. }))
            || left.iter().filter(|f| matches!(f, Factor::ExpPlus { .. })).count() > 1
        {
            return Err(Error::InvalidArgument(
                "only parity and one E+ may follow the state field".into(),
            ));
        }
        if factors[field_pos + 1..].iter().any(|f| {
            matches!(f, Factor::ExpPlus { .. } | Factor::StateField(_))
        }) {
            return Err(Error::InvalidArgument(
                "only parity, E- and charge powers may precede the state field".into(),
            ));
        }
        Ok(FlowKernel {
            factors,
            direction,
            field_pos,
        })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn field(&self) -> &State {
        match &self.factors[self.field_pos] {
            Factor::StateField(v) => v,
            _ => unreachable!(),
        }
    }

    /// The same kernel with the state field replaced.
    pub fn with_field(&self, v: State) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors[self.field_pos] = Factor::StateField(v);
        FlowKernel::new(factors, self.direction)
    }

    /// The same kernel with one factor removed (for negative controls).
    pub fn without_factor(&self, i: usize) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.remove(i);
        FlowKernel::new(factors, self.direction)
    }

    /// The same kernel with one factor replaced.
    pub fn with_factor(&self, i: usize, f: Factor) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors[i] = f;
        FlowKernel::new(factors, self.direction)
    }
}

impl fmt::Display for FlowKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        write!(f, "{:?}: {}", self.direction, parts.join(" "))
    }
}

pub fn sigma_kernel(cs: &CurrentSet) -> FlowKernel {
    FlowKernel::new(
        vec![
            Factor::Parity,
            Factor::ExpPlus { alpha: cs.j.clone(), sign: -1 },
            Factor::StateField(cs.omega_plus.clone()),
            Factor::ExpMinus { alpha: cs.j.clone(), sign: -1 },
            Factor::ChargePower { sign: -1 },
        ],
        Direction::Sigma,
    )
    .expect("sigma kernel shape")
}

pub fn tau_kernel(cs: &CurrentSet) -> FlowKernel {
    FlowKernel::new(
        vec![
            Factor::Parity,
            Factor::ExpPlus { alpha: cs.j.clone(), sign: 1 },
            Factor::StateField(cs.omega_minus.clone()),
            Factor::ExpMinus { alpha: cs.j.clone(), sign: 1 },
            Factor::ChargePower { sign: 1 },
        ],
        Direction::Tau,
    )
    .expect("tau kernel shape")
}

fn signed(alpha: &State, sign: i8) -> State {
    if sign < 0 {
        -alpha
    } else {
        alpha.clone()
    }
}

/// The full expansion of `E-_{sign * alpha}(z) s` as `(z-power, state)`
/// pairs, powers `<= 0`. Finite because annihilation modes lower weight.
pub fn exp_minus_apply(alpha: &State, sign: i8, s: &State) -> Vec<(i64, State)> {
    let a = signed(alpha, sign);
    let mut terms: Vec<State> = vec![s.clone()];
    let mut out = Vec::new();
    if !s.is_zero() {
        out.push((0, s.clone()));
    }
    // p F_p = sum_{n=1}^p (-a_(n)) F_{p-n}; F_p has weight wt(s) - p
    let pmax = s.max_weight2().unwrap_or(0) / 2;
    for p in 1..=pmax {
        let mut next = State::zero();
        for n in 1..=p {
            let prev = &terms[(p - n) as usize];
            if !prev.is_zero() {
                next -= &field_coeff(&a, n, prev);
            }
        }
        let next = next.scaled(&Coeff::new(1.into(), p.into()));
        if !next.is_zero() {
            out.push((-p, next.clone()));
        }
        terms.push(next);
    }
    out
}

/// The `z^q` coefficient of `E+_{sign * alpha}(z) s` for `q = 0..=qmax`.
pub fn exp_plus(alpha: &State, sign: i8, s: &State, qmax: i64) -> Vec<State> {
    let a = signed(alpha, sign);
    let mut terms: Vec<State> = vec![s.clone()];
    // q E_q = sum_{n=1}^q a_(-n) E_{q-n}
    for q in 1..=qmax {
        let mut next = State::zero();
        for n in 1..=q {
            let prev = &terms[(q - n) as usize];
            if !prev.is_zero() {
                next += field_coeff(&a, -n, prev);
            }
        }
        terms.push(next.scaled(&Coeff::new(1.into(), q.into())));
    }
    terms
}

fn push(map: &mut BTreeMap<i64, State>, p: i64, s: State) {
    if s.is_zero() {
        return;
    }
    let e = map.entry(p).or_default();
    *e += s;
    if e.is_zero() {
        map.remove(&p);
    }
}

/// Applies the factors right of the state field, tracking z-powers.
fn apply_right(kernel: &FlowKernel, s: &State) -> BTreeMap<i64, State> {
    let mut cur: BTreeMap<i64, State> = BTreeMap::new();
    push(&mut cur, 0, s.clone());
    for f in kernel.factors[kernel.field_pos + 1..].iter().rev() {
        let mut next = BTreeMap::new();
        for (p, t) in cur {
            match f {
                Factor::Parity => push(&mut next, p, t.parity_twisted()),
                Factor::ChargePower { sign } => {
                    for (m, comp) in t.charge_components() {
                        push(&mut next, p + *sign as i64 * m, comp);
                    }
                }
                Factor::ExpMinus { alpha, sign } => {
                    for (dp, u) in exp_minus_apply(alpha, *sign, &t) {
                        push(&mut next, p + dp, u);
                    }
                }
                _ => unreachable!("validated shape"),
            }
        }
        cur = next;
    }
    cur
}

/// The exact `z^k` coefficient of the kernel's field applied to `s`.
pub fn flow_coeff(kernel: &FlowKernel, k: i64, s: &State) -> State {
    let right = apply_right(kernel, s);
    let v = kernel.field();
    let left = &kernel.factors[..kernel.field_pos];
    let exp_plus_factor = left.iter().find_map(|f| match f {
        Factor::ExpPlus { alpha, sign } => Some((alpha, *sign)),
        _ => None,
    });
    let mut out = State::zero();
    for (p, t) in &right {
        // field mode n contributes z^{-n-1}; E+ contributes z^q, q >= 0
        let nmax = annihilation_bound(v, t);
        let nmin = p - k - 1;
        let ns: Vec<i64> = if exp_plus_factor.is_some() {
            (nmin..nmax).collect()
        } else if nmin < nmax {
            vec![nmin]
        } else {
            vec![]
        };
        for n in ns {
            let mut u = field_coeff(v, n, t);
            if u.is_zero() {
                continue;
            }
            let q = k - p + n + 1;
            for f in left.iter().rev() {
                match f {
                    Factor::Parity => u = u.parity_twisted(),
                    Factor::ExpPlus { alpha, sign } => {
                        u = exp_plus(alpha, *sign, &u, q).pop().unwrap_or_default();
                    }
                    _ => unreachable!("validated shape"),
                }
            }
            out += u;
        }
    }
    out
}

/// All nonzero coefficients with `kmin <= k <= kmax`.
pub fn flow_series(kernel: &FlowKernel, s: &State, kmin: i64, kmax: i64) -> BTreeMap<i64, State> {
    (kmin..=kmax)
        .map(|k| (k, flow_coeff(kernel, k, s)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// The constant term, i.e. the endomorphism defined by the kernel.
pub fn flow_apply(kernel: &FlowKernel, s: &State) -> State {
    flow_coeff(kernel, 0, s)
}

pub fn sigma_apply(cs: &CurrentSet, s: &State) -> State {
    flow_apply(&sigma_kernel(cs), s)
}

pub fn tau_apply(cs: &CurrentSet, s: &State) -> State {
    flow_apply(&tau_kernel(cs), s)
}

/// Runs `f` on every basis state in parallel and folds the outcomes in
/// basis order, so the reported counterexample does not depend on
/// scheduling.
fn sweep<F>(basis: &[State], f: F) -> CheckOutcome
where
    F: Fn(&State) -> CheckOutcome + Sync + Send,
{
    basis
        .par_iter()
        .map(f)
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CheckOutcome::default(), CheckOutcome::and)
}

/// `flow_coeff(kernel, k, s) = 0` for `1 <= |k| <= kmax` on the window.
pub fn constancy_check(kernel: &FlowKernel, window: &Window, kmax: i64) -> CheckOutcome {
    let basis = window.basis_states();
    let zero = State::zero();
    sweep(&basis, |s| {
        let mut out = CheckOutcome::default();
        for k in (-kmax..=kmax).filter(|&k| k != 0) {
            expect_eq(
                &mut out,
                || format!("z^{} coefficient", k),
                s,
                &zero,
                &flow_coeff(kernel, k, s),
            );
        }
        out
    })
}

/// `a = lambda * b` for a scalar `lambda`; `None` when not proportional or
/// when `b = 0 != a`. `Some(None)` means both vanish.
fn ratio(a: &State, b: &State) -> Option<Option<Coeff>> {
    if b.is_zero() {
        return a.is_zero().then_some(None);
    }
    let (m, c) = b.terms().next().unwrap();
    let lambda = a.coefficient(m) / c;
    (a == &b.scaled(&lambda)).then_some(Some(lambda))
}

/// The scalar by which a composition acts, if it is a uniform multiple of
/// the identity on the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseReport {
    /// Literal check of `tau sigma = id` and `sigma tau = id`.
    pub identity: CheckOutcome,
    pub tau_sigma: Option<Coeff>,
    pub sigma_tau: Option<Coeff>,
}

impl InverseReport {
    pub fn passed(&self) -> bool {
        self.identity.passed()
    }
}

fn uniform_scalar(pairs: &[(State, State)]) -> Option<Coeff> {
    let mut found: Option<Coeff> = None;
    for (image, s) in pairs {
        match ratio(image, s)? {
            None => {}
            Some(l) => match &found {
                None => found = Some(l),
                Some(f) if *f == l => {}
                Some(_) => return None,
            },
        }
    }
    found
}

pub fn inverse_check(sigma: &FlowKernel, tau: &FlowKernel, window: &Window) -> InverseReport {
    let basis = window.basis_states();
    let images: Vec<(State, State, State)> = basis
        .par_iter()
        .map(|s| {
            let ts = flow_apply(tau, &flow_apply(sigma, s));
            let st = flow_apply(sigma, &flow_apply(tau, s));
            (s.clone(), ts, st)
        })
        .collect();
    let mut identity = CheckOutcome::default();
    for (s, ts, st) in &images {
        expect_eq(&mut identity, || "tau(sigma(s))".into(), s, s, ts);
        expect_eq(&mut identity, || "sigma(tau(s))".into(), s, s, st);
    }
    let ts: Vec<(State, State)> = images.iter().map(|(s, a, _)| (a.clone(), s.clone())).collect();
    let st: Vec<(State, State)> = images.iter().map(|(s, _, b)| (b.clone(), s.clone())).collect();
    InverseReport {
        identity,
        tau_sigma: uniform_scalar(&ts),
        sigma_tau: uniform_scalar(&st),
    }
}

/// The grading shift `(h, m) -> (h + b m + c, m + a)` of a flow operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingShift {
    pub a: i64,
    pub b: Weight,
    pub c: Weight,
}

/// Measures the grading shift on the window. Fails when some image is not
/// homogeneous, vanishes, or the shifts do not fit one affine law.
pub fn measure_shift(kernel: &FlowKernel, window: &Window) -> Result<GradingShift> {
    let basis = window.basis();
    let images: Vec<State> = basis
        .par_iter()
        .map(|m| flow_apply(kernel, &State::from_monomial(m.clone())))
        .collect();
    let mut points: Vec<(i64, i64, Weight)> = Vec::new();
    for (m, img) in basis.iter().zip(&images) {
        let comps = img.components();
        if comps.len() != 1 {
            return Err(Error::Precondition(format!(
                "image of {} is not homogeneous",
                m
            )));
        }
        let g = comps.keys().next().unwrap();
        points.push((m.charge(), g.charge - m.charge(), g.weight - m.weight()));
    }
    let a = points[0].1;
    if points.iter().any(|p| p.1 != a) {
        return Err(Error::Precondition("charge shift is not uniform".into()));
    }
    let (m0, _, dh0) = points[0];
    let b = points
        .iter()
        .find(|p| p.0 != m0)
        .map(|p| (p.2 - dh0) / Weight::from_integer(p.0 - m0))
        .unwrap_or_default();
    let c = dh0 - b * Weight::from_integer(m0);
    for &(m, _, dh) in &points {
        if dh != b * Weight::from_integer(m) + c {
            return Err(Error::Precondition("weight shift is not affine in the charge".into()));
        }
    }
    Ok(GradingShift { a, b, c })
}

/// `sigma x_(m) = lambda x_(m+e) sigma` with uniform `e` and `lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeShift {
    pub e: Option<i64>,
    pub lambda: Option<Coeff>,
    pub counterexample: Option<Counterexample>,
}

impl ModeShift {
    pub fn found(&self) -> bool {
        self.e.is_some() && self.lambda.is_some()
    }
}

/// Finds `e in {1, -1, 0}` and a scalar with
/// `K x_(m) s = lambda x_(m+e) K s` for all `|m| <= mode_range` and all
/// window states.
pub fn probe_mode_shift(kernel: &FlowKernel, x: &State, window: &Window, mode_range: i64) -> ModeShift {
    let basis = window.basis_states();
    let images: Vec<State> = basis.par_iter().map(|s| flow_apply(kernel, s)).collect();
    let ms: Vec<i64> = (-mode_range..=mode_range).collect();
    let lhs: Vec<Vec<State>> = ms
        .par_iter()
        .map(|&m| basis.iter().map(|s| flow_apply(kernel, &field_coeff(x, m, s))).collect())
        .collect();
    let mut first_residual = None;
    for e in [1i64, -1, 0] {
        let mut pairs = Vec::new();
        for (mi, &m) in ms.iter().enumerate() {
            for (si, img) in images.iter().enumerate() {
                pairs.push((lhs[mi][si].clone(), field_coeff(x, m + e, img), basis[si].clone(), m));
            }
        }
        let plain: Vec<(State, State)> = pairs.iter().map(|p| (p.0.clone(), p.1.clone())).collect();
        if let Some(l) = uniform_scalar(&plain) {
            return ModeShift {
                e: Some(e),
                lambda: Some(l),
                counterexample: None,
            };
        }
        if first_residual.is_none() {
            if let Some(p) = pairs.iter().find(|p| ratio(&p.0, &p.1).is_none()) {
                first_residual = Some(Counterexample::new(
                    format!("sigma x_({}) vs x_({}) sigma", p.3, p.3 + e),
                    &p.2,
                    &p.1,
                    &p.0,
                ));
            } else {
                first_residual = pairs.first().map(|p| {
                    Counterexample::new("non-uniform scalar", &p.2, &p.1, &p.0)
                });
            }
        }
    }
    ModeShift {
        e: None,
        lambda: None,
        counterexample: first_residual,
    }
}

/// `K J0 = (J0 + delta) K` and `K L0 = (L0 + eps J0 + c) K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroModeShift {
    pub delta: Option<Coeff>,
    pub eps: Option<Coeff>,
    pub c: Option<Coeff>,
    pub counterexample: Option<Counterexample>,
}

pub fn probe_zero_modes(cs: &CurrentSet, kernel: &FlowKernel, window: &Window) -> ZeroModeShift {
    let basis = window.basis_states();
    // residuals r_J = K J0 s - J0 K s and r_L = K L0 s - L0 K s
    let rows: Vec<(State, State, State, State)> = basis
        .par_iter()
        .map(|s| {
            let img = flow_apply(kernel, s);
            let rj = flow_apply(kernel, &field_coeff(&cs.j, 0, s)) - field_coeff(&cs.j, 0, &img);
            let rl = flow_apply(kernel, &field_coeff(&cs.l, 1, s)) - field_coeff(&cs.l, 1, &img);
            (s.clone(), img, rj, rl)
        })
        .collect();
    let mut out = ZeroModeShift {
        delta: None,
        eps: None,
        c: None,
        counterexample: None,
    };
    let jpairs: Vec<(State, State)> = rows.iter().map(|r| (r.2.clone(), r.1.clone())).collect();
    out.delta = uniform_scalar(&jpairs);
    if out.delta.is_none() {
        if let Some(r) = rows.iter().find(|r| ratio(&r.2, &r.1).is_none()) {
            out.counterexample = Some(Counterexample::new("J0 conjugation", &r.0, &r.1, &r.2));
        }
        return out;
    }
    // r_L = (eps m' + c) K s with m' the charge of K s
    let mut pts: Vec<(i64, Coeff, &State)> = Vec::new();
    for r in &rows {
        match (ratio(&r.3, &r.1), crate::n2::charge_of(&r.1)) {
            (Some(Some(l)), Some(m)) => pts.push((m, l, &r.0)),
            (Some(None), _) => {}
            _ => {
                out.counterexample = Some(Counterexample::new("L0 conjugation", &r.0, &r.1, &r.3));
                return out;
            }
        }
    }
    let Some((m0, l0, _)) = pts.first().cloned() else {
        return out;
    };
    let eps = pts
        .iter()
        .find(|p| p.0 != m0)
        .map(|p| (&p.1 - &l0) / coeff(p.0 - m0))
        .unwrap_or_else(Coeff::zero);
    let c = &l0 - &eps * coeff(m0);
    for (m, l, s) in &pts {
        if *l != &eps * coeff(*m) + &c {
            out.counterexample = Some(Counterexample::new(
                "L0 conjugation is not affine in J0",
                s,
                &State::zero(),
                &State::zero(),
            ));
            return out;
        }
    }
    out.eps = Some(eps);
    out.c = Some(c);
    out
}

/// The measured intertwining relations of a flow operator with the N=2
/// currents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntertwineReport {
    pub q: ModeShift,
    pub g: ModeShift,
    pub zero_modes: ZeroModeShift,
    pub rank: u32,
}

impl IntertwineReport {
    /// The uniform exponent `e` with `Q_(m) -> Q_(m+e)`, `G_(m) -> G_(m-e)`.
    pub fn e(&self) -> Option<i64> {
        match (self.q.e, self.g.e) {
            (Some(a), Some(b)) if a == -b && a != 0 => Some(a),
            _ => None,
        }
    }

    /// The uniform `eps` with `J0 -> J0 + eps d` and `L0 -> L0 + eps J0 + d/2`.
    pub fn epsilon(&self) -> Option<i64> {
        let z = &self.zero_modes;
        let d = coeff(self.rank as i64);
        let (delta, eps, c) = (z.delta.as_ref()?, z.eps.as_ref()?, z.c.as_ref()?);
        [1i64, -1].into_iter().find(|&e| *delta == coeff(e) * &d && *eps == coeff(e) && *c == &d / coeff(2))
    }

    /// The relations hold exactly, with unit coefficients.
    pub fn passed(&self) -> bool {
        self.e().is_some()
            && self.epsilon().is_some()
            && self.q.lambda.as_ref().is_some_and(|l| l.is_one())
            && self.g.lambda.as_ref().is_some_and(|l| l.is_one())
    }

    /// The stated direction: `sigma Q(w) = w Q(w) sigma`, i.e. `e = +1`.
    pub fn agrees_with_stated_direction(&self) -> bool {
        self.e() == Some(1)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        self.q
            .counterexample
            .as_ref()
            .or(self.g.counterexample.as_ref())
            .or(self.zero_modes.counterexample.as_ref())
    }
}

pub fn intertwine_probe(
    cs: &CurrentSet,
    kernel: &FlowKernel,
    window: &Window,
    mode_range: i64,
) -> IntertwineReport {
    IntertwineReport {
        q: probe_mode_shift(kernel, &cs.q, window, mode_range),
        g: probe_mode_shift(kernel, &cs.g, window, mode_range),
        zero_modes: probe_zero_modes(cs, kernel, window),
        rank: cs.rank,
    }
}

/// `K x = x K` for every beta/gamma mode with `|n| <= mode_range`.
pub fn bosonic_transparency(kernel: &FlowKernel, window: &Window, mode_range: i64) -> CheckOutcome {
    let basis = window.basis_states();
    let rank = window.rank;
    sweep(&basis, |s| {
        let img = flow_apply(kernel, s);
        let mut out = CheckOutcome::default();
        for i in 1..=rank {
            for fam in [Family::Beta, Family::Gamma] {
                for n in -mode_range..=mode_range {
                    let x = ModeRef::new(fam, i, n);
                    expect_eq(
                        &mut out,
                        || format!("commutation with {}", x),
                        s,
                        &apply_mode(x, &img),
                        &flow_apply(kernel, &apply_mode(x, s)),
                    );
                }
            }
        }
        out
    })
}

/// Checks the commutation law of exponentials,
///
/// ```text
/// E-_b(w) E+_a(z) = (1 - z/w)^N E+_a(z) E-_b(w)          (default)
/// E+_a(z) E-_b(w) = (1 - z/w)^N E-_b(w) E+_a(z)          (literal)
/// ```
///
/// as expansions in `|z| < |w|`, coefficient by coefficient, for every
/// `z^p w^-r` with `p <= pmax` on the window. Requires
/// `a(z) b(w) ~ N / (z-w)^2`.
pub fn exp_locality_check(
    alpha: &State,
    beta: &State,
    n: i64,
    window: &Window,
    pmax: i64,
    literal: bool,
) -> Result<CheckOutcome> {
    let ope = ope_singular(alpha, beta);
    let expected: BTreeMap<u32, State> = if n == 0 {
        BTreeMap::new()
    } else {
        [(1u32, State::vacuum().scaled(&coeff(n)))].into_iter().collect()
    };
    if ope != expected {
        return Err(Error::Precondition(format!(
            "the OPE of the two currents is not {}/(z-w)^2",
            n
        )));
    }
    let basis = window.basis_states();
    let minus = |s: &State| -> BTreeMap<i64, State> {
        exp_minus_apply(beta, 1, s).into_iter().map(|(p, t)| (-p, t)).collect()
    };
    Ok(sweep(&basis, |s| {
        let mut out = CheckOutcome::default();
        let wmax = s.max_weight2().unwrap_or(0) / 2 + pmax + 1;
        // a-side first, b-side first
        let (ab, ba): (Vec<BTreeMap<i64, State>>, BTreeMap<i64, Vec<State>>) = {
            let plus = exp_plus(alpha, 1, s, pmax);
            let ab: Vec<BTreeMap<i64, State>> = plus.iter().map(&minus).collect();
            let ba = minus(s)
                .into_iter()
                .map(|(r, t)| (r, exp_plus(alpha, 1, &t, pmax)))
                .collect();
            (ab, ba)
        };
        // coefficient of z^p w^-r in E-(w) E+(z) s is ab[p][r];
        // in E+(z) E-(w) s it is ba[r][p].
        let get_ab = |p: i64, r: i64| -> State {
            ab.get(p as usize).and_then(|m| m.get(&r)).cloned().unwrap_or_default()
        };
        let get_ba = |p: i64, r: i64| -> State {
            ba.get(&r).and_then(|v| v.get(p as usize)).cloned().unwrap_or_default()
        };
        for p in 0..=pmax {
            for r in 0..=wmax {
                let (lhs, rhs_at): (State, &dyn Fn(i64, i64) -> State) = if literal {
                    (get_ba(p, r), &get_ab)
                } else {
                    (get_ab(p, r), &get_ba)
                };
                let mut rhs = State::zero();
                for j in 0..=p.min(r) {
                    let c = Coeff::from_integer(crate::modes::binomial(n, j as u64))
                        * coeff(if j % 2 == 0 { 1 } else { -1 });
                    if !c.is_zero() {
                        rhs.add_scaled(&rhs_at(p - j, r - j), &c);
                    }
                }
                expect_eq(&mut out, || format!("z^{} w^-{} coefficient", p, r), s, &rhs, &lhs);
            }
        }
        out
    }))
}
