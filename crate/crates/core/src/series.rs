//! Truncated bivariate q, y series, graded traces over windows and the
//! spectral-flow substitution `f(q, y) -> q^{d n^2/2} y^{d n} f(q, q^n y)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::flow::{flow_apply, measure_shift, sigma_kernel, tau_kernel, GradingShift};
use crate::fock::{Coeff, Grading, Parity, State, Weight};
use crate::linalg;
use crate::n2::make_currents;
use crate::window::{Sector, Window};

/// A finite sum of `coeff * q^a y^b` with exact rational `a`, complete up to
/// `q^cap`: no stored term exceeds the cap and zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    terms: BTreeMap<(Weight, i64), Coeff>,
    cap: Weight,
}

impl BiSeries {
    pub fn zero(cap: Weight) -> Self {
        BiSeries {
            terms: BTreeMap::new(),
            cap,
        }
    }

    pub fn monomial(a: Weight, b: i64, c: Coeff, cap: Weight) -> Self {
        let mut s = Self::zero(cap);
        s.add_term(a, b, c);
        s
    }

    pub fn cap(&self) -> Weight {
        self.cap
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

    pub fn terms(&self) -> impl Iterator<Item = (&(Weight, i64), &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: Weight, b: i64) -> Coeff {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Adds a term; terms beyond the cap are dropped.
    pub fn add_term(&mut self, a: Weight, b: i64, c: Coeff) {
        if c.is_zero() || a > self.cap {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert_with(Coeff::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    fn min_order(&self) -> Option<Weight> {
        self.terms.keys().map(|k| k.0).min()
    }

    /// Restriction to exponents `<= cap`.
    pub fn truncated(&self, cap: Weight) -> BiSeries {
        let cap = cap.min(self.cap);
        BiSeries {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.0 <= cap)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            cap,
        }
    }

    pub fn add(&self, other: &BiSeries) -> BiSeries {
        let mut out = BiSeries::zero(self.cap.min(other.cap));
        for (k, v) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(k.0, k.1, v.clone());
        }
        out
    }

    /// Product, complete up to `min(cap_a + low_b, cap_b + low_a)`.
    pub fn mul(&self, other: &BiSeries) -> BiSeries {
        let cap = match (self.min_order(), other.min_order()) {
            (Some(la), Some(lb)) => (self.cap + lb).min(other.cap + la),
            _ => self.cap.min(other.cap),
        };
        let mut out = BiSeries::zero(cap);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                out.add_term(ka.0 + kb.0, ka.1 + kb.1, va * vb);
            }
        }
        out
    }

    /// Agreement of all terms up to the common cap. Returns the first
    /// differing exponent pair.
    pub fn first_difference(&self, other: &BiSeries) -> Option<(Weight, i64)> {
        let cap = self.cap.min(other.cap);
        let a = self.truncated(cap);
        let b = other.truncated(cap);
        a.terms
            .keys()
            .chain(b.terms.keys())
            .filter(|k| a.terms.get(k) != b.terms.get(k))
            .min()
            .copied()
    }

    pub fn agrees_with(&self, other: &BiSeries) -> bool {
        self.first_difference(other).is_none()
    }

    /// One `q^a y^b : coeff` line per term, sorted by exponents.
    pub fn printout(&self) -> String {
        let mut out = String::new();
        for ((a, b), c) in &self.terms {
            out.push_str(&format!("q^{} y^{} : {}\n", a, b, c));
        }
        out
    }
}

impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.printout())
    }
}

fn half_int(x: i64) -> Weight {
    Weight::new(x, 2)
}

/// `S_n(f)(q, y) = q^{d n^2/2} y^{d n} f(q, q^n y)`.
pub fn flow_substitute(f: &BiSeries, n: i64, d: i64) -> BiSeries {
    let shift = half_int(d * n * n);
    let ymax = f.terms.keys().map(|k| k.1.abs()).max().unwrap_or(0);
    let cap = f.cap + shift + Weight::from_integer(n.abs() * ymax);
    let mut out = BiSeries::zero(cap);
    for ((a, b), c) in &f.terms {
        out.add_term(a + Weight::from_integer(n * b) + shift, b + d * n, c.clone());
    }
    out
}

/// Dimensions of the graded pieces of a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDims {
    pub rank: u32,
    pub hmax: Weight,
    pub sector: Sector,
    pub dims: BTreeMap<Grading, u64>,
}

impl GradedDims {
    pub fn get(&self, weight: Weight, charge: i64, parity: Parity) -> u64 {
        self.dims
            .get(&Grading {
                weight,
                charge,
                parity,
            })
            .copied()
            .unwrap_or(0)
    }

    /// Total dimension at `(h, m)` over both parities.
    pub fn at(&self, weight: Weight, charge: i64) -> u64 {
        self.get(weight, charge, Parity::Even) + self.get(weight, charge, Parity::Odd)
    }
}

pub fn graded_dims(rank: u32, sector: Sector, hmax: Weight) -> GradedDims {
    let mut dims = BTreeMap::new();
    for m in Window::new(rank, hmax, sector).basis() {
        *dims.entry(m.grading()).or_insert(0) += 1;
    }
    GradedDims {
        rank,
        hmax,
        sector,
        dims,
    }
}

fn sign_of(p: Parity) -> Coeff {
    if p.is_odd() {
        -Coeff::one()
    } else {
        Coeff::one()
    }
}

/// `sum (-1)^p dim q^{h - c/24} y^m`, complete up to `q^{hmax - c/24}`.
pub fn trace_series(dims: &GradedDims, c: Weight) -> BiSeries {
    let shift = c / 24;
    let mut out = BiSeries::zero(dims.hmax - shift);
    for (g, &n) in &dims.dims {
        out.add_term(g.weight - shift, g.charge, sign_of(g.parity) * Coeff::from_integer(n.into()));
    }
    out
}

/// The trace with the flowed gradings `h + n m + d n^2/2` and `m + d n`,
/// computed directly from the window monomials.
pub fn twisted_trace(rank: u32, n: i64, sector: Sector, hmax: Weight, c: Weight) -> BiSeries {
    let d = rank as i64;
    let basis = Window::new(rank, hmax, sector).basis();
    let ymax = basis.iter().map(|m| m.charge().abs()).max().unwrap_or(0);
    let shift = half_int(d * n * n);
    let cap = hmax - c / 24 + shift + Weight::from_integer(n.abs() * ymax);
    let mut out = BiSeries::zero(cap);
    for m in &basis {
        let h = m.weight() + Weight::from_integer(n * m.charge()) + shift - c / 24;
        out.add_term(h, m.charge() + d * n, sign_of(m.parity()));
    }
    out
}

/// Outcome of the character identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticityReport {
    pub rank: u32,
    pub n: i64,
    pub terms_compared: usize,
    /// First exponent pair where the two sides differ.
    pub series_mismatch: Option<(Weight, i64)>,
    /// Measured grading shift of the flow operator used for the
    /// cross-check (`sigma` for `n > 0`, `tau` for `n < 0`).
    pub shift: Option<GradingShift>,
    pub graded_pieces_checked: usize,
    pub operator_mismatch: Option<String>,
}

impl EllipticityReport {
    pub fn passed(&self) -> bool {
        self.series_mismatch.is_none() && self.operator_mismatch.is_none()
    }

    pub fn counterexample(&self) -> Option<String> {
        if let Some((a, b)) = self.series_mismatch {
            return Some(format!("series differ at q^{} y^{}", a, b));
        }
        self.operator_mismatch.clone()
    }
}

/// `twisted_trace = S_n(trace_series)` up to the common cap, plus the
/// operator cross-check on the fermionic window.
pub fn ellipticity_check(rank: u32, n: i64, hmax: Weight, sector: Sector, c: Weight) -> Result<EllipticityReport> {
    let dims = graded_dims(rank, sector, hmax);
    ellipticity_check_dims(&dims, n, c)
}

/// As [`ellipticity_check`] with a supplied dimension table; the twisted
/// side is always enumerated afresh.
pub fn ellipticity_check_dims(dims: &GradedDims, n: i64, c: Weight) -> Result<EllipticityReport> {
    let rank = dims.rank;
    let d = rank as i64;
    let lhs = twisted_trace(rank, n, dims.sector, dims.hmax, c);
    let rhs = flow_substitute(&trace_series(dims, c), n, d);
    let cap = lhs.cap().min(rhs.cap());
    let mut report = EllipticityReport {
        rank,
        n,
        terms_compared: lhs.truncated(cap).len().max(rhs.truncated(cap).len()),
        series_mismatch: lhs.first_difference(&rhs),
        shift: None,
        graded_pieces_checked: 0,
        operator_mismatch: None,
    };
    if n != 0 {
        operator_cross_check(dims, n, &mut report)?;
    }
    Ok(report)
}

/// The flow operator in the direction of `n` must shift gradings exactly
/// as `S_{sign n}` shifts exponents, and map each graded piece of the
/// window injectively into a piece of equal dimension.
fn operator_cross_check(dims: &GradedDims, n: i64, report: &mut EllipticityReport) -> Result<()> {
    let rank = dims.rank;
    let d = rank as i64;
    let cs = make_currents(rank)?;
    let kernel = if n > 0 { sigma_kernel(&cs) } else { tau_kernel(&cs) };
    let step = n.signum();
    let window = Window::new(rank, dims.hmax, Sector::Fermionic);
    let shift = measure_shift(&kernel, &window)?;
    // S_step sends q^h y^m to q^{h + step m + d/2} y^{m + step d}
    let expected = GradingShift {
        a: step * d,
        b: Weight::from_integer(step),
        c: half_int(d),
    };
    if shift != expected {
        report.operator_mismatch = Some(format!(
            "flow operator shifts (h, m) by ({} m + {}, {}), substitution by ({} m + {}, {})",
            shift.b, shift.c, shift.a, expected.b, expected.c, expected.a
        ));
        report.shift = Some(shift);
        return Ok(());
    }
    let fermionic = if dims.sector == Sector::Fermionic {
        dims.clone()
    } else {
        graded_dims(rank, Sector::Fermionic, dims.hmax)
    };
    let basis = window.basis();
    for (g, &dim) in &fermionic.dims {
        let h2 = g.weight + shift.b * Weight::from_integer(g.charge) + shift.c;
        let m2 = g.charge + shift.a;
        if h2 > dims.hmax || h2 < Weight::zero() {
            continue;
        }
        report.graded_pieces_checked += 1;
        let target = fermionic.at(h2, m2);
        let images: Vec<State> = basis
            .iter()
            .filter(|m| m.grading() == *g)
            .map(|m| flow_apply(&kernel, &State::from_monomial(m.clone())))
            .collect();
        let r = linalg::rank(&images);
        if target != dim || r as u64 != dim {
            report.operator_mismatch = Some(format!(
                "piece {} of dimension {} maps with rank {} into ({}, {}) of dimension {}",
                g, dim, r, h2, m2, target
            ));
            break;
        }
    }
    report.shift = Some(shift);
    Ok(())
}

/// Adds one to a single dimension (negative controls).
pub fn corrupt_dims(dims: &GradedDims, at: Grading) -> GradedDims {
    let mut out = dims.clone();
    *out.dims.entry(at).or_insert(0) += 1;
    out
}

/// Parses `a/b` or `a` into an exact weight.
pub fn parse_weight(s: &str) -> Result<Weight> {
    let bad = || Error::InvalidArgument(format!("bad rational '{}'", s));
    let w = match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0 {
                return Err(bad());
            }
            Weight::new(a, b)
        }
        None => Weight::from_integer(s.trim().parse().map_err(|_| bad())?),
    };
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coeff;
    use proptest::prelude::*;

    fn w(a: i64, b: i64) -> Weight {
        Weight::new(a, b)
    }

    fn g(h: Weight, m: i64, odd: bool) -> Grading {
        Grading {
            weight: h,
            charge: m,
            parity: Parity::from_odd(odd),
        }
    }

    #[test]
    fn dims_examples() {
        let dims = graded_dims(1, Sector::Fermionic, w(1, 1));
        let want: BTreeMap<Grading, u64> = [
            (g(w(0, 1), 0, false), 1),
            (g(w(1, 2), -1, true), 1),
            (g(w(1, 2), 1, true), 1),
            (g(w(1, 1), 0, false), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(dims.dims, want);

        let dims = graded_dims(1, Sector::Fermionic, w(0, 1));
        assert_eq!(dims.dims.len(), 1);
        assert_eq!(dims.get(w(0, 1), 0, Parity::Even), 1);

        let dims = graded_dims(2, Sector::Fermionic, w(1, 2));
        assert_eq!(dims.dims.len(), 3);
        assert_eq!(dims.get(w(1, 2), 1, Parity::Odd), 2);
        assert_eq!(dims.get(w(1, 2), -1, Parity::Odd), 2);
    }

    #[test]
    fn trace_examples() {
        let t = trace_series(&graded_dims(1, Sector::Fermionic, w(1, 1)), w(3, 1));
        let mut want = BiSeries::zero(w(7, 8));
        want.add_term(w(-1, 8), 0, coeff(1));
        want.add_term(w(3, 8), 1, coeff(-1));
        want.add_term(w(3, 8), -1, coeff(-1));
        want.add_term(w(7, 8), 0, coeff(1));
        assert_eq!(t, want);

        let empty = GradedDims {
            rank: 1,
            hmax: w(1, 1),
            sector: Sector::Fermionic,
            dims: BTreeMap::new(),
        };
        assert!(trace_series(&empty, w(3, 1)).is_zero());

        let vac = graded_dims(1, Sector::Fermionic, w(0, 1));
        let t = trace_series(&vac, w(0, 1));
        assert_eq!(t.printout(), "q^0 y^0 : 1\n");
    }

    #[test]
    fn substitution_examples() {
        let one = BiSeries::monomial(w(0, 1), 0, coeff(1), w(5, 1));
        let s = flow_substitute(&one, 1, 2);
        assert_eq!(s.terms().collect::<Vec<_>>(), vec![(&(w(1, 1), 2), &coeff(1))]);

        let x = BiSeries::monomial(w(1, 2), -1, coeff(1), w(5, 1));
        let s = flow_substitute(&x, 1, 1);
        assert_eq!(s.coefficient(w(0, 1), 0), coeff(1));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn group_law_on_rank_one_trace() {
        let t = trace_series(&graded_dims(1, Sector::Fermionic, w(2, 1)), w(3, 1));
        let twice = flow_substitute(&flow_substitute(&t, 1, 1), 1, 1);
        assert!(twice.agrees_with(&flow_substitute(&t, 2, 1)));
        assert_eq!(twice.len(), t.len());
    }

    #[test]
    fn twisted_trace_examples() {
        let c = w(3, 1);
        let t = trace_series(&graded_dims(1, Sector::Fermionic, w(1, 1)), c);
        assert_eq!(twisted_trace(1, 0, Sector::Fermionic, w(1, 1), c), t);
        let tw = twisted_trace(1, 1, Sector::Fermionic, w(1, 1), c);
        assert!(tw.agrees_with(&flow_substitute(&t, 1, 1)));
        let c2 = w(6, 1);
        let t2 = trace_series(&graded_dims(2, Sector::Fermionic, w(3, 2)), c2);
        let tw2 = twisted_trace(2, -1, Sector::Fermionic, w(3, 2), c2);
        assert!(tw2.agrees_with(&flow_substitute(&t2, -1, 2)));
    }

    #[test]
    fn ellipticity_passes_and_catches_corruption() {
        let r = ellipticity_check(1, 1, w(2, 1), Sector::Fermionic, w(3, 1)).unwrap();
        assert!(r.passed(), "{:?}", r.counterexample());
        assert!(r.graded_pieces_checked > 0);
        let r = ellipticity_check(2, 2, w(3, 2), Sector::Fermionic, w(6, 1)).unwrap();
        assert!(r.passed(), "{:?}", r.counterexample());
        let r = ellipticity_check(1, -1, w(2, 1), Sector::Full { gamma_degree: 1 }, w(3, 1)).unwrap();
        assert!(r.passed(), "{:?}", r.counterexample());

        let dims = graded_dims(1, Sector::Fermionic, w(1, 1));
        let bad = corrupt_dims(&dims, g(w(1, 2), 1, true));
        let r = ellipticity_check_dims(&bad, 1, w(3, 1)).unwrap();
        assert!(!r.passed());
        assert!(r.counterexample().is_some());
    }

    /// Free-fermion product `prod_n (1 - y q^{n-1/2})^d (1 - y^-1 q^{n-1/2})^d`.
    fn fermion_product(d: u32, hmax: Weight) -> BiSeries {
        let mut out = BiSeries::monomial(w(0, 1), 0, coeff(1), hmax);
        let mut k = 1;
        while w(2 * k - 1, 2) <= hmax {
            for y in [1i64, -1] {
                let mut f = BiSeries::monomial(w(0, 1), 0, coeff(1), hmax);
                f.add_term(w(2 * k - 1, 2), y, coeff(-1));
                for _ in 0..d {
                    out = out.mul(&f);
                }
            }
            k += 1;
        }
        out
    }

    #[test]
    fn fermionic_dims_match_the_product_formula() {
        for d in 1..=2 {
            let h = w(3, 1);
            let t = trace_series(&graded_dims(d, Sector::Fermionic, h), w(0, 1));
            let p = fermion_product(d, h);
            assert!(t.agrees_with(&p), "{}\n{}", t, p);
            assert_eq!(t.cap(), p.cap());
        }
    }

    #[test]
    fn printout_is_sorted_and_stable() {
        let t = trace_series(&graded_dims(1, Sector::Fermionic, w(1, 1)), w(3, 1));
        assert_eq!(
            t.printout(),
            "q^-1/8 y^0 : 1\nq^3/8 y^-1 : -1\nq^3/8 y^1 : -1\nq^7/8 y^0 : 1\n"
        );
    }

    #[test]
    fn parse_weights() {
        assert_eq!(parse_weight("3/2").unwrap(), w(3, 2));
        assert_eq!(parse_weight("2").unwrap(), w(2, 1));
        assert!(parse_weight("1/0").is_err());
        assert!(parse_weight("x").is_err());
    }

    fn arb_series() -> impl Strategy<Value = BiSeries> {
        prop::collection::vec((-6i64..12, -3i64..4, -5i64..6), 0..8).prop_map(|ts| {
            let mut s = BiSeries::zero(w(6, 1));
            for (a, b, c) in ts {
                s.add_term(w(a, 2), b, coeff(c));
            }
            s
        })
    }

    proptest! {
        #[test]
        fn substitution_composes(f in arb_series(), m in -2i64..3, n in -2i64..3, d in 1i64..3) {
            let lhs = flow_substitute(&flow_substitute(&f, n, d), m, d);
            let rhs = flow_substitute(&f, m + n, d);
            prop_assert!(lhs.agrees_with(&rhs));
        }

        #[test]
        fn fermionic_dims_are_charge_symmetric(d in 1u32..3, h2 in 0i64..6) {
            let dims = graded_dims(d, Sector::Fermionic, w(h2, 2));
            for (gr, n) in &dims.dims {
                prop_assert_eq!(*n, dims.get(gr.weight, -gr.charge, gr.parity));
            }
        }

        #[test]
        fn no_term_beyond_cap(f in arb_series(), g2 in arb_series()) {
            let p = f.mul(&g2);
            prop_assert!(p.terms().all(|(k, _)| k.0 <= p.cap()));
            let s = f.add(&g2);
            prop_assert!(s.terms().all(|(k, v)| k.0 <= s.cap() && !v.is_zero()));
        }
    }
}
