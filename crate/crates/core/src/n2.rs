//! The N=2 currents of the bc-beta-gamma system at rank d, the volume states
//! and their duals, and the topological twist.
//!
//! Only `J = sum_i c^i b_i` is fixed a priori. `L`, `Q` and `G` are built
//! from the standard free-field shapes with undetermined signs; the signs
//! are resolved by requiring exact closure of the N=2 OPEs at `c = 3d`
//! (see [`search_conventions`]), and the resolved choice is frozen in
//! [`FROZEN_CONVENTION`] and in `constants/n2_conventions.txt`.

use std::collections::BTreeMap;
use std::fmt;

use crate::check::{expect_eq, CheckOutcome};
use crate::error::{Error, Result};
use crate::fock::{coeff, coeff_frac, Coeff, Family, State};
use crate::linalg::Span;
use crate::modes::{field_coeff, nop, ope_singular, translate};
use crate::text::format_state_inline;
use crate::window::Window;

/// Signs of the four free-field building blocks:
///
/// ```text
/// L = l_boson * sum_i beta_i dgamma^i
///   + l_fermion * 1/2 sum_i (dc^i b_i - c^i db_i)
/// Q = q * sum_i beta_i c^i
/// G = g * sum_i b_i dgamma^i
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Convention {
    pub l_boson: i8,
    pub l_fermion: i8,
    pub q: i8,
    pub g: i8,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |x: i8| if x > 0 { '+' } else { '-' };
        write!(
            f,
            "l_boson={} l_fermion={} q={} g={}",
            s(self.l_boson),
            s(self.l_fermion),
            s(self.q),
            s(self.g)
        )
    }
}

impl Convention {
    /// All sixteen sign choices, `+` before `-` in each slot.
    pub fn all() -> Vec<Convention> {
        let signs = [1i8, -1];
        let mut out = Vec::with_capacity(16);
        for l_boson in signs {
            for l_fermion in signs {
                for q in signs {
                    for g in signs {
                        out.push(Convention {
                            l_boson,
                            l_fermion,
                            q,
                            g,
                        });
                    }
                }
            }
        }
        out
    }
}

/// The convention adopted for all current sets, fixed by the closure
/// search.
///
/// Two conventions close, related by `(Q, G) -> (-Q, -G)`, which is an
/// automorphism of the N=2 relations; the one with `q = +` is taken.
pub const FROZEN_CONVENTION: Convention = Convention {
    l_boson: -1,
    l_fermion: 1,
    q: 1,
    g: -1,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Current {
    L,
    J,
    Q,
    G,
}

impl Current {
    pub const ALL: [Current; 4] = [Current::L, Current::J, Current::Q, Current::G];

    pub fn name(self) -> &'static str {
        match self {
            Current::L => "L",
            Current::J => "J",
            Current::Q => "Q",
            Current::G => "G",
        }
    }
}

impl fmt::Display for Current {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurrentSet {
    pub rank: u32,
    pub l: State,
    pub j: State,
    pub q: State,
    pub g: State,
    pub omega_plus: State,
    pub omega_minus: State,
    pub central_charge: Coeff,
    pub convention: Convention,
}

impl CurrentSet {
    pub fn get(&self, c: Current) -> &State {
        match c {
            Current::L => &self.l,
            Current::J => &self.j,
            Current::Q => &self.q,
            Current::G => &self.g,
        }
    }
}

fn gen(f: Family, i: u32) -> State {
    State::generator(f, i)
}

/// `J = sum_i c^i_(-1) b_i,(-1) |0>`.
pub fn current_j(rank: u32) -> State {
    let mut j = State::zero();
    for i in 1..=rank {
        j += nop(&gen(Family::C, i), &gen(Family::B, i));
    }
    j
}

/// `c^1_(-1) ... c^d_(-1) |0>`.
pub fn omega_plus(rank: u32) -> State {
    let mut s = State::vacuum();
    for i in (1..=rank).rev() {
        s = nop(&gen(Family::C, i), &s);
    }
    s
}

/// The dual volume state `b_d ... b_1`, normalized so that
/// `Omega+_(d-1) Omega- = |0>`. Equals `(-1)^{d(d-1)/2} b_1 ... b_d` in
/// canonical order.
pub fn omega_minus(rank: u32) -> State {
    let mut s = State::vacuum();
    for i in 1..=rank {
        s = nop(&gen(Family::B, i), &s);
    }
    s
}

/// `b_1,(-1) ... b_d,(-1) |0>` in canonical order, without the duality
/// normalization.
pub fn omega_minus_canonical(rank: u32) -> State {
    let mut s = State::vacuum();
    for i in (1..=rank).rev() {
        s = nop(&gen(Family::B, i), &s);
    }
    s
}

/// Builds the currents for a given sign convention without verifying them.
pub fn candidate_currents(rank: u32, conv: Convention) -> CurrentSet {
    let half = coeff_frac(1, 2);
    let mut l_boson = State::zero();
    let mut l_fermion = State::zero();
    let mut q = State::zero();
    let mut g = State::zero();
    for i in 1..=rank {
        let (b, c) = (gen(Family::B, i), gen(Family::C, i));
        let (beta, gamma) = (gen(Family::Beta, i), gen(Family::Gamma, i));
        l_boson += nop(&beta, &translate(&gamma));
        l_fermion += nop(&translate(&c), &b);
        l_fermion -= &nop(&c, &translate(&b));
        q += nop(&beta, &c);
        g += nop(&b, &translate(&gamma));
    }
    let l = l_boson.scaled(&coeff(conv.l_boson as i64))
        + l_fermion.scaled(&(half * coeff(conv.l_fermion as i64)));
    CurrentSet {
        rank,
        l,
        j: current_j(rank),
        q: q.scaled(&coeff(conv.q as i64)),
        g: g.scaled(&coeff(conv.g as i64)),
        omega_plus: omega_plus(rank),
        omega_minus: omega_minus(rank),
        central_charge: coeff(3 * rank as i64),
        convention: conv,
    }
}

/// The N=2 structure constants at `c = 3d`: the expected nonzero
/// `a_(n) b`, `n >= 0`, for every ordered pair of currents.
pub fn expected_ope(cs: &CurrentSet, a: Current, b: Current) -> BTreeMap<u32, State> {
    use Current::*;
    let d = cs.rank as i64;
    let vac = State::vacuum();
    let half = coeff_frac(1, 2);
    let three_halves = coeff_frac(3, 2);
    let (l, j, q, g) = (&cs.l, &cs.j, &cs.q, &cs.g);
    let dj = translate(j);
    let mut m = BTreeMap::new();
    match (a, b) {
        (L, L) => {
            m.insert(3, vac.scaled(&coeff_frac(3 * d, 2)));
            m.insert(1, l.scaled(&coeff(2)));
            m.insert(0, translate(l));
        }
        (L, J) => {
            m.insert(1, j.clone());
            m.insert(0, dj);
        }
        (J, L) => {
            m.insert(1, j.clone());
        }
        (L, Q) | (L, G) => {
            let x = if b == Q { q } else { g };
            m.insert(1, x.scaled(&three_halves));
            m.insert(0, translate(x));
        }
        (Q, L) | (G, L) => {
            let x = if a == Q { q } else { g };
            m.insert(1, x.scaled(&three_halves));
            m.insert(0, translate(x).scaled(&half));
        }
        (J, J) => {
            m.insert(1, vac.scaled(&coeff(d)));
        }
        (J, Q) => {
            m.insert(0, q.clone());
        }
        (Q, J) => {
            m.insert(0, -q);
        }
        (J, G) => {
            m.insert(0, -g);
        }
        (G, J) => {
            m.insert(0, g.clone());
        }
        (Q, Q) | (G, G) => {}
        (Q, G) => {
            m.insert(2, vac.scaled(&coeff(d)));
            m.insert(1, j.clone());
            m.insert(0, l + &dj.scaled(&half));
        }
        (G, Q) => {
            m.insert(2, vac.scaled(&coeff(d)));
            m.insert(1, -j);
            m.insert(0, l - &dj.scaled(&half));
        }
    }
    m
}

/// One disagreement between a computed and an expected OPE coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpeMismatch {
    pub a: Current,
    pub b: Current,
    pub n: u32,
    pub expected: State,
    pub actual: State,
}

impl fmt::Display for OpeMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}_({}) {}: expected {} ; got {}",
            self.a,
            self.n,
            self.b,
            format_state_inline(&self.expected),
            format_state_inline(&self.actual)
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureReport {
    pub pairs_checked: usize,
    pub mismatches: Vec<OpeMismatch>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares every `ope_singular(a, b)` among `{L, J, Q, G}` with the N=2
/// structure constants.
pub fn verify_n2_closure(cs: &CurrentSet) -> ClosureReport {
    let mut report = ClosureReport::default();
    for a in Current::ALL {
        for b in Current::ALL {
            report.pairs_checked += 1;
            let got = ope_singular(cs.get(a), cs.get(b));
            let want = expected_ope(cs, a, b);
            let keys: std::collections::BTreeSet<u32> =
                got.keys().chain(want.keys()).copied().collect();
            for n in keys {
                let g = got.get(&n).cloned().unwrap_or_default();
                let w = want.get(&n).cloned().unwrap_or_default();
                if g != w {
                    report.mismatches.push(OpeMismatch {
                        a,
                        b,
                        n,
                        expected: w,
                        actual: g,
                    });
                }
            }
        }
    }
    report
}

/// Every sign convention whose currents close exactly.
pub fn search_conventions(rank: u32) -> Vec<Convention> {
    Convention::all()
        .into_iter()
        .filter(|&c| verify_n2_closure(&candidate_currents(rank, c)).passed())
        .collect()
}

/// The currents at rank `d` under [`FROZEN_CONVENTION`], verified to close.
pub fn make_currents(rank: u32) -> Result<CurrentSet> {
    make_currents_with(rank, FROZEN_CONVENTION)
}

pub fn make_currents_with(rank: u32, conv: Convention) -> Result<CurrentSet> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let cs = candidate_currents(rank, conv);
    let report = verify_n2_closure(&cs);
    if let Some(m) = report.mismatches.first() {
        return Err(Error::Closure {
            pair: format!("({}, {})", m.a, m.b),
            detail: m.to_string(),
        });
    }
    Ok(cs)
}

/// Checks that `L_(1)` and `J_(0)` act on every window basis state by its
/// combinatorial weight and charge.
pub fn verify_grading(cs: &CurrentSet, window: &Window) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    for m in window.basis() {
        let x = State::from_monomial(m.clone());
        let h = m.weight();
        let h = Coeff::new((*h.numer()).into(), (*h.denom()).into());
        expect_eq(
            &mut out,
            || "L_(1) acts by the weight".into(),
            &x,
            &x.scaled(&h),
            &field_coeff(&cs.l, 1, &x),
        );
        expect_eq(
            &mut out,
            || "J_(0) acts by the charge".into(),
            &x,
            &x.scaled(&coeff(m.charge())),
            &field_coeff(&cs.j, 0, &x),
        );
        if !out.passed() {
            break;
        }
    }
    out
}

/// The four volume-state properties, checked independently.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OmegaReport {
    /// `J(z) Omega+-(w) ~ +-d Omega+-(w)/(z-w)`.
    pub charge: CheckOutcome,
    /// `Q(z) Omega+(w) ~ 0` and `G(z) Omega-(w) ~ 0`.
    pub regular: CheckOutcome,
    /// `Omega+(z) Omega-(w) ~ 1/(z-w)^d + less singular`.
    pub top_pole: CheckOutcome,
    /// `:J Omega+-: = +- d Omega+-`.
    pub normal_order: CheckOutcome,
}

impl OmegaReport {
    pub fn passed(&self) -> bool {
        self.charge.passed()
            && self.regular.passed()
            && self.top_pole.passed()
            && self.normal_order.passed()
    }

    pub fn parts(&self) -> [(&'static str, &CheckOutcome); 4] {
        [
            ("charge", &self.charge),
            ("regular", &self.regular),
            ("top_pole", &self.top_pole),
            ("normal_order", &self.normal_order),
        ]
    }
}

pub fn verify_omega_relations(cs: &CurrentSet) -> OmegaReport {
    verify_omega_relations_for(cs, &cs.omega_plus, &cs.omega_minus)
}

/// As [`verify_omega_relations`] with arbitrary candidates for the volume
/// states.
pub fn verify_omega_relations_for(
    cs: &CurrentSet,
    omega_plus: &State,
    omega_minus: &State,
) -> OmegaReport {
    let d = cs.rank as i64;
    let mut rep = OmegaReport::default();
    let zero = State::zero();

    for (omega, sign, label) in [(omega_plus, 1, "Omega+"), (omega_minus, -1, "Omega-")] {
        expect_eq(
            &mut rep.charge,
            || format!("J_(0) {}", label),
            omega,
            &omega.scaled(&coeff(sign * d)),
            &field_coeff(&cs.j, 0, omega),
        );
        let top = crate::modes::annihilation_bound(&cs.j, omega).max(1);
        for n in 1..top {
            expect_eq(
                &mut rep.charge,
                || format!("J_({}) {}", n, label),
                omega,
                &zero,
                &field_coeff(&cs.j, n, omega),
            );
        }
        expect_eq(
            &mut rep.normal_order,
            || format!(":J {}:", label),
            omega,
            &translate(omega).scaled(&coeff(sign)),
            &nop(&cs.j, omega),
        );
    }

    for (x, omega, label) in [(&cs.q, omega_plus, "Q Omega+"), (&cs.g, omega_minus, "G Omega-")] {
        for (n, v) in ope_singular(x, omega) {
            expect_eq(
                &mut rep.regular,
                || format!("{} pole order {}", label, n + 1),
                omega,
                &zero,
                &v,
            );
        }
        rep.regular.checked += 1;
    }

    let ope = ope_singular(omega_plus, omega_minus);
    expect_eq(
        &mut rep.top_pole,
        || format!("Omega+_({}) Omega-", d - 1),
        omega_minus,
        &State::vacuum(),
        &ope.get(&((d - 1) as u32)).cloned().unwrap_or_default(),
    );
    for (n, v) in ope.range(d as u32..) {
        expect_eq(
            &mut rep.top_pole,
            || format!("Omega+_({}) Omega-", n),
            omega_minus,
            &zero,
            v,
        );
    }
    rep
}

/// The twisted Virasoro vector `L + sign * 1/2 dJ`.
pub fn twist(cs: &CurrentSet, sign: i32) -> State {
    let half = coeff_frac(sign.signum() as i64, 2);
    &cs.l + &translate(&cs.j).scaled(&half)
}

/// Checks that a vector has a Virasoro OPE with vanishing central term:
/// `T(z)T(w) ~ 2T/(z-w)^2 + dT/(z-w)`.
pub fn verify_virasoro_c0(t: &State) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    let got = ope_singular(t, t);
    let mut want = BTreeMap::new();
    want.insert(1u32, t.scaled(&coeff(2)));
    want.insert(0u32, translate(t));
    for n in 0..=3u32 {
        let g = got.get(&n).cloned().unwrap_or_default();
        let w = want.get(&n).cloned().unwrap_or_default();
        expect_eq(&mut out, || format!("T_({}) T", n), t, &w, &g);
    }
    for (&n, v) in got.range(4..) {
        expect_eq(&mut out, || format!("T_({}) T", n), t, &State::zero(), v);
    }
    out
}

pub fn verify_twist(cs: &CurrentSet, sign: i32) -> CheckOutcome {
    verify_virasoro_c0(&twist(cs, sign))
}

/// Checks that the weight-capped closure of `{Q, G}` under all OPE
/// coefficients `a_(n) b`, `n >= 0`, contains `J` and `L`.
pub fn q_g_generate(cs: &CurrentSet, weight_cap2: i64) -> bool {
    let mut span = Span::new();
    let mut gens: Vec<State> = Vec::new();
    for s in [&cs.q, &cs.g] {
        if span.insert(s) {
            gens.push(s.clone());
        }
    }
    let mut done = 0;
    while done < gens.len() {
        let upto = gens.len();
        for i in 0..upto {
            for k in 0..upto {
                if i < done && k < done {
                    continue;
                }
                for (_, v) in ope_singular(&gens[i], &gens[k]) {
                    for (_, comp) in v.components() {
                        if comp.max_weight2().unwrap_or(0) <= weight_cap2 && span.insert(&comp) {
                            gens.push(comp);
                        }
                    }
                }
            }
        }
        done = upto;
    }
    span.contains(&cs.j) && span.contains(&cs.l)
}

/// Text record of the currents, one line per current.
pub fn constants_file(sets: &[CurrentSet]) -> String {
    let mut out = String::from("# N=2 currents of the rank-d bc-beta-gamma system (generated)\n");
    for cs in sets {
        out.push_str(&format!("# rank {} convention {}\n", cs.rank, cs.convention));
        for (name, s) in [
            ("L", &cs.l),
            ("J", &cs.j),
            ("Q", &cs.q),
            ("G", &cs.g),
            ("Omega+", &cs.omega_plus),
            ("Omega-", &cs.omega_minus),
        ] {
            out.push_str(&format!("d={} {} = {}\n", cs.rank, name, format_state_inline(s)));
        }
    }
    out
}

/// `J_(0)` eigenvalue of a charge-homogeneous state, read off the grading.
pub fn charge_of(s: &State) -> Option<i64> {
    let comps = s.charge_components();
    (comps.len() == 1).then(|| *comps.keys().next().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_state;

    #[test]
    fn j_at_rank_one() {
        let cs = make_currents(1).unwrap();
        // c_(-1) b_(-1)|0> = -b_(-1) c_(-1)|0> in canonical order.
        assert_eq!(cs.j, parse_state("-1 b[1,-1] c[1,-1] |0>").unwrap());
        assert_eq!(cs.central_charge, coeff(3));
    }

    #[test]
    fn omega_plus_rank_two() {
        let cs = make_currents(2).unwrap();
        assert_eq!(cs.omega_plus, parse_state("1 c[1,-1] c[2,-1] |0>").unwrap());
        assert_eq!(cs.omega_minus, parse_state("-1 b[1,-1] b[2,-1] |0>").unwrap());
    }

    #[test]
    fn gradings_of_volume_states() {
        for d in 1..=3u32 {
            let cs = make_currents(d).unwrap();
            let p = cs.omega_plus.components();
            let m = cs.omega_minus.components();
            assert_eq!(p.len(), 1);
            assert_eq!(m.len(), 1);
            let gp = p.keys().next().unwrap();
            let gm = m.keys().next().unwrap();
            assert_eq!(gp.weight, crate::fock::Weight::new(d as i64, 2));
            assert_eq!(gp.charge, d as i64);
            assert_eq!(gm.charge, -(d as i64));
            assert_eq!(gp.parity.is_odd(), d % 2 == 1);
        }
    }

    #[test]
    fn zero_rank_rejected() {
        assert!(make_currents(0).is_err());
    }

    #[test]
    fn twist_undo() {
        let cs = make_currents(1).unwrap();
        for sign in [1, -1] {
            let t = twist(&cs, sign);
            let back = &t - &translate(&cs.j).scaled(&coeff_frac(sign as i64, 2));
            assert_eq!(back, cs.l);
            let comps = t.components();
            assert_eq!(comps.len(), 1);
            let g = comps.keys().next().unwrap();
            assert_eq!(g.weight, crate::fock::Weight::from_integer(2));
            assert_eq!(g.charge, 0);
            assert!(!g.parity.is_odd());
        }
    }

    #[test]
    fn charge_of_reads_grading() {
        let cs = make_currents(2).unwrap();
        assert_eq!(charge_of(&cs.omega_plus), Some(2));
        assert_eq!(charge_of(&(&cs.omega_plus + &cs.omega_minus)), None);
    }

    #[test]
    fn closure_search_finds_the_frozen_pair() {
        for d in 1..=2 {
            let found = search_conventions(d);
            assert_eq!(found.len(), 2);
            assert!(found.contains(&FROZEN_CONVENTION));
            let flipped = Convention {
                q: -FROZEN_CONVENTION.q,
                g: -FROZEN_CONVENTION.g,
                ..FROZEN_CONVENTION
            };
            assert!(found.contains(&flipped));
        }
    }

    #[test]
    fn unfixed_signs_fail_closure() {
        let bad = Convention {
            l_boson: 1,
            ..FROZEN_CONVENTION
        };
        assert!(matches!(make_currents_with(1, bad), Err(Error::Closure { .. })));
    }

    #[test]
    fn closure_rank_one_and_two() {
        for d in 1..=2 {
            let cs = make_currents(d).unwrap();
            let r = verify_n2_closure(&cs);
            assert!(r.passed(), "{:?}", r.mismatches.first().map(|m| m.to_string()));
            assert_eq!(r.pairs_checked, 16);
            // The three OPEs displayed for the bc-beta-gamma system.
            let jj = ope_singular(&cs.j, &cs.j);
            assert_eq!(jj.len(), 1);
            assert_eq!(jj[&1], State::vacuum().scaled(&coeff(d as i64)));
            let qg = ope_singular(&cs.q, &cs.g);
            assert_eq!(qg[&2], State::vacuum().scaled(&coeff(d as i64)));
            let ll = ope_singular(&cs.l, &cs.l);
            assert_eq!(ll[&3], State::vacuum().scaled(&coeff_frac(3 * d as i64, 2)));
        }
    }

    #[test]
    fn omega_relations_hold_up_to_rank_three() {
        for d in 1..=3 {
            let cs = make_currents(d).unwrap();
            let r = verify_omega_relations(&cs);
            for (name, o) in r.parts() {
                assert!(o.passed(), "rank {} {}: {:?}", d, name, o.counterexample);
            }
        }
    }

    #[test]
    fn normal_ordered_j_omega_minus_rank_two() {
        let cs = make_currents(2).unwrap();
        let got = nop(&cs.j, &cs.omega_minus);
        assert_eq!(got, -translate(&cs.omega_minus));
        let expected = parse_state("1 b[1,-2] b[2,-1] |0> ; 1 b[1,-1] b[2,-2] |0>").unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn canonical_dual_fails_pairing_at_rank_two() {
        let cs = make_currents(2).unwrap();
        let r = verify_omega_relations_for(&cs, &cs.omega_plus, &omega_minus_canonical(2));
        assert!(!r.top_pole.passed());
        assert!(r.charge.passed() && r.regular.passed() && r.normal_order.passed());
    }

    #[test]
    fn wrong_omega_is_caught() {
        let cs = make_currents(2).unwrap();
        let c1 = State::generator(Family::C, 1);
        let r = verify_omega_relations_for(&cs, &c1, &cs.omega_minus);
        assert!(!r.passed());
        assert!(r.charge.counterexample.is_some());
    }

    #[test]
    fn twist_has_vanishing_central_term() {
        for d in 1..=2 {
            let cs = make_currents(d).unwrap();
            for sign in [1, -1] {
                let t = twist(&cs, sign);
                assert!(field_coeff(&t, 3, &t).is_zero());
                assert!(verify_twist(&cs, sign).passed());
            }
            assert!(!verify_virasoro_c0(&cs.l).passed());
        }
    }

    #[test]
    fn currents_act_by_grading() {
        for d in 1..=2 {
            let cs = make_currents(d).unwrap();
            let hmax = if d == 1 { 3 } else { 2 };
            let w = Window::new(
                d,
                crate::fock::Weight::from_integer(hmax),
                crate::window::Sector::Full { gamma_degree: 1 },
            );
            let out = verify_grading(&cs, &w);
            assert!(out.passed(), "{:?}", out.counterexample);
            assert!(out.checked > 10);
        }
    }

    #[test]
    fn volume_states_are_extremal() {
        let cs = make_currents(2).unwrap();
        for n in 1..4 {
            assert!(field_coeff(&cs.j, n, &cs.omega_plus).is_zero());
            assert!(field_coeff(&cs.j, n, &cs.omega_minus).is_zero());
        }
    }

    #[test]
    fn q_and_g_generate() {
        for d in 1..=2 {
            assert!(q_g_generate(&make_currents(d).unwrap(), 4));
        }
    }

    #[test]
    fn constants_file_is_current() {
        let sets: Vec<CurrentSet> = (1..=2).map(|d| make_currents(d).unwrap()).collect();
        let text = constants_file(&sets);
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/constants/n2_conventions.txt");
        if std::env::var_os("CHIRALFLOW_REGENERATE").is_some() {
            std::fs::write(path, &text).unwrap();
        }
        let on_disk = std::fs::read_to_string(path).expect("constants file present");
        assert_eq!(on_disk, text, "rerun with CHIRALFLOW_REGENERATE=1");
    }
}
