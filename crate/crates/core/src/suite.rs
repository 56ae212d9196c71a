//! The verification suites behind the command-line runner. Each returns
//! fully populated reports in a fixed order.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::check::CheckOutcome;
use crate::error::Result;
use crate::flow::{
    bosonic_transparency, constancy_check, exp_locality_check, flow_apply, flow_coeff,
    intertwine_probe, inverse_check, measure_shift, sigma_kernel, tau_kernel, FlowKernel,
};
use crate::fock::{Coeff, Family, State, Weight};
use crate::modes::{borcherds_commutator_check, ope_singular};
use crate::n2::{
    make_currents, make_currents_with, search_conventions, verify_grading, verify_n2_closure, verify_omega_relations,
    verify_twist, Convention, CurrentSet, FROZEN_CONVENTION,
};
use crate::report::{Report, Status, WindowInfo};
use crate::series::{ellipticity_check, graded_dims, trace_series};
use crate::text::format_state;
use crate::window::{Sector, Window};

/// Shared knobs of every suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub rank: u32,
    pub hmax: Weight,
    pub kmax: i64,
    pub mode_range: i64,
    pub sector: Sector,
    pub n: i64,
    /// Central-charge offset of traces; `None` means `3 d`.
    pub c: Option<Weight>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            rank: 1,
            hmax: Weight::from_integer(2),
            kmax: 3,
            mode_range: 2,
            sector: Sector::Fermionic,
            n: 1,
            c: None,
        }
    }
}

impl Params {
    pub fn window(&self) -> Window {
        Window::new(self.rank, self.hmax, self.sector)
    }

    fn info(&self) -> WindowInfo {
        WindowInfo::new(self.hmax, self.kmax, self.mode_range)
    }

    fn report(&self, check: &str) -> Report {
        Report::new(check, self.rank, self.info())
    }

    pub fn central_charge(&self) -> Weight {
        self.c.unwrap_or_else(|| Weight::from_integer(3 * self.rank as i64))
    }
}

fn timed(p: &Params, check: &str, f: impl FnOnce(&mut Report) -> Result<()>) -> Result<Report> {
    let start = Instant::now();
    let mut r = p.report(check);
    f(&mut r)?;
    r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(r)
}

fn q(c: &Coeff) -> Value {
    Value::String(c.to_string())
}

fn opt_q(c: &Option<Coeff>) -> Value {
    c.as_ref().map(q).unwrap_or(Value::Null)
}

/// N=2 closure, the convention search and the zero-mode grading check.
pub fn verify_n2(p: &Params) -> Result<Report> {
    timed(p, "verify.n2", |r| {
        let found = search_conventions(p.rank);
        r.measure(
            "conventions",
            Value::Array(found.iter().map(|c| Value::String(c.to_string())).collect()),
        );
        r.measure("frozen", FROZEN_CONVENTION.to_string());
        if found.len() > 1 {
            r.measure("tie_break", tie_break(p.rank, &found)?);
        }
        let cs = make_currents(p.rank)?;
        let closure = verify_n2_closure(&cs);
        r.measure("pairs_checked", closure.pairs_checked);
        if let Some(m) = closure.mismatches.first() {
            r.fail(m.to_string());
        }
        let grading = verify_grading(&cs, &p.window());
        r.absorb("zero-mode grading", &grading);
        Ok(())
    })
}

/// Breaks a convention tie by asking for intertwining with exponent `+1`;
/// when no candidate qualifies all of them stay listed.
fn tie_break(rank: u32, found: &[Convention]) -> Result<Value> {
    let window = Window::fermionic(rank, Weight::from_integer(1));
    let mut winners = Vec::new();
    for &conv in found {
        let cs = make_currents_with(rank, conv)?;
        let probe = intertwine_probe(&cs, &sigma_kernel(&cs), &window, 1);
        if probe.passed() && probe.agrees_with_stated_direction() {
            winners.push(Value::String(conv.to_string()));
        }
    }
    Ok(if winners.is_empty() {
        Value::String("unresolved: no convention intertwines with e=+1; all listed".into())
    } else {
        Value::Array(winners)
    })
}

pub fn verify_omega(p: &Params) -> Result<Report> {
    timed(p, "verify.omega", |r| {
        let cs = make_currents(p.rank)?;
        let rep = verify_omega_relations(&cs);
        for (name, o) in rep.parts() {
            r.measure(name, if o.passed() { "PASS" } else { "FAIL" });
            r.absorb(name, o);
        }
        Ok(())
    })
}

/// The generators `b_i, c^i, beta_i, gamma^i` and the four currents.
pub fn generator_and_current_states(cs: &CurrentSet) -> Vec<(String, State)> {
    let mut out = Vec::new();
    for i in 1..=cs.rank {
        for f in Family::ALL {
            out.push((format!("{}{}", f.name(), i), State::generator(f, i)));
        }
    }
    for (name, s) in [("L", &cs.l), ("J", &cs.j), ("Q", &cs.q), ("G", &cs.g)] {
        out.push((name.to_string(), s.clone()));
    }
    out
}

/// The commutator formula for all generator and current pairs and all
/// `|m|, |n| <= mode_range` on the window.
pub fn borcherds_suite(cs: &CurrentSet, window: &Window, mode_range: i64) -> CheckOutcome {
    let fields = generator_and_current_states(cs);
    let basis = window.basis_states();
    let mut jobs = Vec::new();
    for (ai, _) in fields.iter().enumerate() {
        for (bi, _) in fields.iter().enumerate() {
            for m in -mode_range..=mode_range {
                for n in -mode_range..=mode_range {
                    jobs.push((ai, bi, m, n));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(ai, bi, m, n)| {
            let mut out = borcherds_commutator_check(&fields[ai].1, m, &fields[bi].1, n, &basis);
            if let Some(cx) = &mut out.counterexample {
                cx.context = format!("{} x {}: {}", fields[ai].0, fields[bi].0, cx.context);
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CheckOutcome::default(), CheckOutcome::and)
}

pub fn verify_borcherds(p: &Params) -> Result<Report> {
    timed(p, "verify.borcherds", |r| {
        let cs = make_currents(p.rank)?;
        let out = borcherds_suite(&cs, &p.window(), p.mode_range);
        r.measure("identities_checked", out.checked);
        r.absorb("commutator formula", &out);
        Ok(())
    })
}

pub fn verify_twist_report(p: &Params) -> Result<Report> {
    timed(p, "verify.twist", |r| {
        let cs = make_currents(p.rank)?;
        for (sign, label) in [(1, "L + dJ/2"), (-1, "L - dJ/2")] {
            let out = verify_twist(&cs, sign);
            r.measure(label, if out.passed() { "PASS" } else { "FAIL" });
            r.absorb(label, &out);
        }
        Ok(())
    })
}

fn kernels(p: &Params) -> Result<(CurrentSet, FlowKernel, FlowKernel)> {
    let cs = make_currents(p.rank)?;
    let s = sigma_kernel(&cs);
    let t = tau_kernel(&cs);
    Ok((cs, s, t))
}

pub fn flow_constancy(p: &Params) -> Result<Report> {
    timed(p, "flow.constancy", |r| {
        let (_, s, t) = kernels(p)?;
        let w = p.window();
        let a = constancy_check(&s, &w, p.kmax);
        let b = constancy_check(&t, &w, p.kmax);
        r.measure("coefficients_checked", a.checked + b.checked);
        r.absorb("sigma", &a);
        r.absorb("tau", &b);
        Ok(())
    })
}

pub fn flow_inverse(p: &Params) -> Result<Report> {
    timed(p, "flow.inverse", |r| {
        let (_, s, t) = kernels(p)?;
        let rep = inverse_check(&s, &t, &p.window());
        r.measure("tau_sigma", opt_q(&rep.tau_sigma));
        r.measure("sigma_tau", opt_q(&rep.sigma_tau));
        r.absorb("composition", &rep.identity);
        Ok(())
    })
}

fn sign_of_sigma_vac(cs: &CurrentSet, sigma: &FlowKernel) -> Value {
    let img = flow_apply(sigma, &State::vacuum());
    if img == cs.omega_plus {
        json!(1)
    } else if img == -&cs.omega_plus {
        json!(-1)
    } else {
        Value::Null
    }
}

pub fn flow_intertwine(p: &Params) -> Result<Report> {
    timed(p, "flow.intertwine", |r| {
        let (cs, s, _) = kernels(p)?;
        let w = p.window();
        let rep = intertwine_probe(&cs, &s, &w, p.mode_range);
        r.measure("e", rep.e().map(Value::from).unwrap_or(Value::Null));
        r.measure("epsilon", rep.epsilon().map(Value::from).unwrap_or(Value::Null));
        r.measure("lambda_q", opt_q(&rep.q.lambda));
        r.measure("lambda_g", opt_q(&rep.g.lambda));
        r.measure("j0_shift", opt_q(&rep.zero_modes.delta));
        r.measure("l0_j0_coefficient", opt_q(&rep.zero_modes.eps));
        r.measure("l0_constant", opt_q(&rep.zero_modes.c));
        r.measure("sign_of_sigma_vac", sign_of_sigma_vac(&cs, &s));
        r.measure("agrees_with_stated_direction", rep.agrees_with_stated_direction());
        if let Ok(sh) = measure_shift(&s, &w) {
            r.measure("charge_shift", sh.a);
            r.measure("weight_shift", format!("{} m + {}", sh.b, sh.c));
        }
        if !rep.passed() {
            let why = match rep.counterexample() {
                Some(cx) => cx.describe(),
                None => format!(
                    "Q_(m) -> {} Q_(m{:+}), G_(m) -> {} G_(m{:+})",
                    opt_q(&rep.q.lambda),
                    rep.q.e.unwrap_or(0),
                    opt_q(&rep.g.lambda),
                    rep.g.e.unwrap_or(0)
                ),
            };
            r.fail(why);
        }
        Ok(())
    })
}

pub fn flow_transparency(p: &Params) -> Result<Report> {
    timed(p, "flow.transparency", |r| {
        let (_, s, _) = kernels(p)?;
        let out = bosonic_transparency(&s, &p.window(), p.mode_range);
        r.measure("commutators_checked", out.checked);
        r.absorb("beta/gamma commutation", &out);
        Ok(())
    })
}

pub fn flow_locality(p: &Params) -> Result<Report> {
    timed(p, "flow.locality", |r| {
        let cs = make_currents(p.rank)?;
        let d = p.rank as i64;
        let (j, mj) = (cs.j.clone(), -&cs.j);
        let w = p.window();
        for (label, a, b, n) in [("(-J,-J,d)", &mj, &mj, d), ("(J,J,d)", &j, &j, d), ("(-J,J,-d)", &mj, &j, -d)] {
            let out = exp_locality_check(a, b, n, &w, p.kmax, false)?;
            r.measure(label, if out.passed() { "PASS" } else { "FAIL" });
            r.absorb(label, &out);
            let literal = exp_locality_check(a, b, n, &w, p.kmax, true)?;
            r.measure(
                &format!("{} literal ordering", label),
                if literal.passed() { "PASS" } else { "FAIL" },
            );
        }
        Ok(())
    })
}

/// Applies `sigma` (or `tau`) and lists the requested z-power coefficient.
pub fn flow_apply_report(p: &Params, s: &State, tau: bool, k: i64) -> Result<Report> {
    timed(p, "flow.apply", |r| {
        let (_, sg, t) = kernels(p)?;
        let kernel = if tau { &t } else { &sg };
        r.status = Status::Measured;
        r.measure("operator", if tau { "tau" } else { "sigma" });
        r.measure("k", k);
        r.measure("input", format_state(s));
        r.measure("output", format_state(&flow_coeff(kernel, k, s)));
        Ok(())
    })
}

/// The singular OPE coefficients `a_(n) b`, `n >= 0`.
pub fn ope_report(p: &Params, a: &State, b: &State) -> Result<Report> {
    timed(p, "ope", |r| {
        a.check_rank(p.rank)?;
        b.check_rank(p.rank)?;
        r.status = Status::Measured;
        let ope = ope_singular(a, b);
        if ope.is_empty() {
            r.measure("regular", true);
        }
        for (n, v) in ope {
            r.measure(&format!("a_({}) b", n), format_state(&v));
        }
        Ok(())
    })
}

pub fn character_dims(p: &Params) -> Result<Report> {
    timed(p, "character.dims", |r| {
        r.status = Status::Measured;
        r.measure("sector", p.sector.to_string());
        let dims = graded_dims(p.rank, p.sector, p.hmax);
        let lines: Vec<String> = dims
            .dims
            .iter()
            .map(|(g, n)| format!("{} : {}", g, n))
            .collect();
        r.measure("dims", lines.join("\n"));
        Ok(())
    })
}

pub fn character_trace(p: &Params) -> Result<Report> {
    timed(p, "character.trace", |r| {
        r.status = Status::Measured;
        r.measure("sector", p.sector.to_string());
        r.measure("c", p.central_charge().to_string());
        let t = trace_series(&graded_dims(p.rank, p.sector, p.hmax), p.central_charge());
        r.measure("cap", t.cap().to_string());
        r.measure("series", t.printout().trim_end().to_string());
        Ok(())
    })
}

pub fn character_ellipticity(p: &Params) -> Result<Report> {
    timed(p, "character.ellipticity", |r| {
        let rep = ellipticity_check(p.rank, p.n, p.hmax, p.sector, p.central_charge())?;
        r.measure("n", p.n);
        // The unsubstituted product q^(dn^2/2) y^(dn) ch(q, y) is not what
        // the twisted trace equals; say which form was compared.
        r.measure("compared_against", "q^(d n^2/2) y^(d n) ch(q, q^n y)");
        r.measure("terms_compared", rep.terms_compared);
        r.measure("graded_pieces_checked", rep.graded_pieces_checked);
        if let Some(sh) = &rep.shift {
            r.measure("operator_shift", format!("(h + {} m + {}, m + {})", sh.b, sh.c, sh.a));
        }
        if let Some(cx) = rep.counterexample() {
            r.fail(cx);
        }
        Ok(())
    })
}
