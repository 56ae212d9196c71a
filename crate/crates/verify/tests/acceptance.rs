//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Runs without the libtest harness so every line is printed;
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use chiralflow::check::CheckOutcome;
use chiralflow::flow::{
    bosonic_transparency, constancy_check, exp_locality_check, flow_apply, intertwine_probe,
    inverse_check, sigma_kernel, tau_kernel, Factor,
};
use chiralflow::fock::{coeff, Family, Grading, Parity, State, Weight};
use chiralflow::modes::{commutator_formula, field_coeff, ope_singular, translate};
use chiralflow::n2::{
    make_currents, make_currents_with, verify_grading, verify_n2_closure,
    verify_omega_relations, verify_omega_relations_for, verify_twist, verify_virasoro_c0,
    Convention, FROZEN_CONVENTION,
};
use chiralflow::series::{corrupt_dims, ellipticity_check, ellipticity_check_dims, graded_dims};
use chiralflow::suite::borcherds_suite;
use chiralflow::window::{Sector, Window};
use chiralflow::Error;

struct Verdict {
    ok: bool,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(what.into());
        }
    }

    fn outcome(&mut self, what: &str, o: &CheckOutcome) {
        if let Some(cx) = &o.counterexample {
            self.ok = false;
            self.notes.push(format!("{}: {}", what, cx.describe()));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn w(a: i64, b: i64) -> Weight {
    Weight::new(a, b)
}

fn full(d: u32, h: Weight) -> Window {
    Window::new(d, h, Sector::Full { gamma_degree: 1 })
}

fn c1_closure() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=2u32 {
        let cs = make_currents(d).unwrap();
        let r = verify_n2_closure(&cs);
        v.require(
            r.passed(),
            format!("d={}: {}", d, r.mismatches.first().map(|m| m.to_string()).unwrap_or_default()),
        );
        let jj = ope_singular(&cs.j, &cs.j);
        v.require(
            jj.len() == 1 && jj.get(&1) == Some(&State::vacuum().scaled(&coeff(d as i64))),
            format!("d={}: J J is not d/(z-w)^2", d),
        );
        let jq = ope_singular(&cs.j, &cs.q);
        v.require(jq.len() == 1 && jq.get(&0) == Some(&cs.q), format!("d={}: J Q", d));
        let jg = ope_singular(&cs.j, &cs.g);
        v.require(jg.len() == 1 && jg.get(&0) == Some(&-&cs.g), format!("d={}: J G", d));
        v.outcome(&format!("d={} zero modes", d), &verify_grading(&cs, &full(d, w(3, 1))));
    }
    v
}

fn c2_omega() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=3u32 {
        let cs = make_currents(d).unwrap();
        let r = verify_omega_relations(&cs);
        for (name, o) in r.parts() {
            v.outcome(&format!("d={} {}", d, name), o);
        }
    }
    v
}

fn c3_constancy() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=2u32 {
        let cs = make_currents(d).unwrap();
        let win = full(d, w(3, 1));
        v.outcome(&format!("d={} sigma", d), &constancy_check(&sigma_kernel(&cs), &win, 4));
        v.outcome(&format!("d={} tau", d), &constancy_check(&tau_kernel(&cs), &win, 4));
    }
    v
}

fn c4_inverse() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=2u32 {
        let cs = make_currents(d).unwrap();
        let r = inverse_check(&sigma_kernel(&cs), &tau_kernel(&cs), &full(d, w(3, 1)));
        let show = |c: &Option<chiralflow::fock::Coeff>| {
            c.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "none".into())
        };
        v.note(format!(
            "d={}: tau sigma = {} id, sigma tau = {} id",
            d,
            show(&r.tau_sigma),
            show(&r.sigma_tau)
        ));
        v.outcome(&format!("d={}", d), &r.identity);
    }
    v
}

fn c5_intertwine() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=2u32 {
        let cs = make_currents(d).unwrap();
        let sig = sigma_kernel(&cs);
        let r = intertwine_probe(&cs, &sig, &full(d, w(2, 1)), 2);
        let vac = flow_apply(&sig, &State::vacuum());
        let vac_sign = if vac == cs.omega_plus { "+1" } else if vac == -&cs.omega_plus { "-1" } else { "?" };
        v.note(format!(
            "d={}: e={:?} epsilon={:?} lambda_Q={} lambda_G={} sigma|0>={} Omega+ ; stated direction e=+1 {}",
            d,
            r.e(),
            r.epsilon(),
            r.q.lambda.as_ref().map(|x| x.to_string()).unwrap_or_default(),
            r.g.lambda.as_ref().map(|x| x.to_string()).unwrap_or_default(),
            vac_sign,
            if r.agrees_with_stated_direction() { "agrees" } else { "disagrees" }
        ));
        v.require(r.e().is_some(), format!("d={}: no uniform e", d));
        v.require(r.epsilon().is_some(), format!("d={}: no uniform epsilon", d));
        v.require(
            r.passed(),
            format!("d={}: Q and G conjugate with a non-unit scalar", d),
        );
    }
    v
}

fn c6_transparency() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=2u32 {
        let cs = make_currents(d).unwrap();
        let sig = sigma_kernel(&cs);
        v.outcome(&format!("d={} full", d), &bosonic_transparency(&sig, &full(d, w(2, 1)), 2));
        v.outcome(
            &format!("d={} fermionic", d),
            &bosonic_transparency(&sig, &Window::fermionic(d, w(3, 1)), 2),
        );
    }
    v
}

fn c7_locality() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=2u32 {
        let cs = make_currents(d).unwrap();
        let (j, mj) = (cs.j.clone(), -&cs.j);
        let n = d as i64;
        for (label, a, b, nn) in [("(-J,-J,d)", &mj, &mj, n), ("(J,J,d)", &j, &j, n), ("(-J,J,-d)", &mj, &j, -n)] {
            match exp_locality_check(a, b, nn, &full(d, w(2, 1)), 2, false) {
                Ok(o) => v.outcome(&format!("d={} {}", d, label), &o),
                Err(e) => v.require(false, format!("d={} {}: {}", d, label, e)),
            }
        }
    }
    v
}

fn c8_borcherds() -> Verdict {
    let mut v = Verdict::new();
    let runs = [
        (1u32, full(1, w(3, 1))),
        (2, Window::fermionic(2, w(3, 1))),
        (2, full(2, w(2, 1))),
    ];
    for (d, win) in runs {
        let cs = make_currents(d).unwrap();
        let o = borcherds_suite(&cs, &win, 2);
        v.outcome(&format!("d={} {} h<={}", d, win.sector, win.hmax), &o);
        v.note(format!("d={} {} h<={}: {} identities", d, win.sector, win.hmax, o.checked));
    }
    v
}

fn c9_character() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=2u32 {
        let c = w(3 * d as i64, 1);
        for n in [-2i64, -1, 1, 2] {
            for (h, sector) in [
                (w(3, 1), Sector::Fermionic),
                (w(3, 2), Sector::Fermionic),
                (w(2, 1), Sector::Full { gamma_degree: 1 }),
            ] {
                let r = ellipticity_check(d, n, h, sector, c).unwrap();
                v.require(
                    r.passed(),
                    format!("d={} n={} h<={} {}: {}", d, n, h, sector, r.counterexample().unwrap_or_default()),
                );
                v.require(
                    r.graded_pieces_checked > 0,
                    format!("d={} n={}: no graded piece cross-checked", d, n),
                );
            }
        }
    }
    v
}

fn c10_twist() -> Verdict {
    let mut v = Verdict::new();
    for d in 1..=2u32 {
        let cs = make_currents(d).unwrap();
        for sign in [1, -1] {
            v.outcome(&format!("d={} sign={}", d, sign), &verify_twist(&cs, sign));
        }
    }
    v
}

fn c11_negative_controls() -> Verdict {
    let mut v = Verdict::new();
    let cs1 = make_currents(1).unwrap();
    let cs2 = make_currents(2).unwrap();

    // wrong sign in a current
    let bad = Convention {
        l_boson: -FROZEN_CONVENTION.l_boson,
        ..FROZEN_CONVENTION
    };
    v.require(
        matches!(make_currents_with(1, bad), Err(Error::Closure { .. })),
        "closure accepted a wrong sign",
    );

    // wrong Omega
    let c1 = State::generator(Family::C, 1);
    let r = verify_omega_relations_for(&cs2, &c1, &cs2.omega_minus);
    v.require(!r.passed() && r.charge.counterexample.is_some(), "omega relations accepted c^1");
    let r = verify_omega_relations_for(&cs2, &cs2.omega_plus, &-&cs2.omega_minus);
    v.require(r.top_pole.counterexample.is_some(), "omega relations accepted -Omega-");

    // corrupted kernels
    let bad_sigma = sigma_kernel(&cs2).with_field(c1.clone()).unwrap();
    let o = constancy_check(&bad_sigma, &Window::fermionic(2, w(2, 1)), 3);
    v.require(o.counterexample.is_some(), "constancy accepted Omega+ -> c^1");
    let flipped = sigma_kernel(&cs1)
        .with_factor(1, Factor::ExpPlus { alpha: cs1.j.clone(), sign: 1 })
        .unwrap();
    let o = constancy_check(&flipped, &Window::fermionic(1, w(2, 1)), 3);
    v.require(o.counterexample.is_some(), "constancy accepted a flipped exponential");
    let bad_tau = tau_kernel(&cs2).with_field(-&cs2.omega_minus).unwrap();
    let r = inverse_check(&sigma_kernel(&cs2), &bad_tau, &Window::fermionic(2, w(2, 1)));
    v.require(r.identity.counterexample.is_some(), "inverse accepted -Omega-");
    let no_parity = sigma_kernel(&cs2).without_factor(0).unwrap();
    let r = intertwine_probe(&cs2, &no_parity, &Window::fermionic(2, w(1, 1)), 2);
    v.require(!r.passed(), "intertwining accepted a kernel without parity");
    let gamma_field = sigma_kernel(&cs1)
        .with_field(field_coeff(&State::generator(Family::Gamma, 1), -1, &cs1.omega_plus))
        .unwrap();
    let o = bosonic_transparency(&gamma_field, &full(1, w(1, 1)), 1);
    v.require(o.counterexample.is_some(), "transparency accepted a bosonic field");

    // exponential ordering and hypothesis
    let win = Window::fermionic(1, w(2, 1));
    let lit = exp_locality_check(&cs1.j, &cs1.j, 1, &win, 2, true).unwrap();
    v.require(lit.counterexample.is_some(), "locality accepted the reversed ordering");
    v.require(
        matches!(exp_locality_check(&cs1.j, &cs1.j, 2, &win, 2, false), Err(Error::Precondition(_))),
        "locality accepted a wrong N",
    );

    // plain commutator of odd modes instead of the anticommutator
    let (b, c) = (State::generator(Family::B, 1), State::generator(Family::C, 1));
    let t = c.clone();
    let plain = field_coeff(&b, 0, &field_coeff(&c, -1, &t)) - field_coeff(&c, -1, &field_coeff(&b, 0, &t));
    v.require(plain != commutator_formula(&b, 0, &c, -1, &t), "commutator check blind to the sign");

    // untwisted L has a central term
    v.require(!verify_virasoro_c0(&cs1.l).passed(), "twist check accepted L itself");

    // corrupted dimensions
    let dims = graded_dims(1, Sector::Fermionic, w(2, 1));
    let bad = corrupt_dims(
        &dims,
        Grading {
            weight: w(1, 2),
            charge: 1,
            parity: Parity::Odd,
        },
    );
    let r = ellipticity_check_dims(&bad, 1, w(3, 1)).unwrap();
    v.require(r.counterexample().is_some(), "ellipticity accepted corrupted dims");

    // derivative identity used throughout the flow
    v.require(
        field_coeff(&cs1.j, -1, &cs1.omega_plus) == translate(&cs1.omega_plus),
        "sanity: :J Omega+: = d Omega+",
    );
    v
}

fn main() {
    let criteria: Vec<(u32, &str, Option<Duration>, fn() -> Verdict)> = vec![
        (1, "N=2 closure at c = 3d, d = 1, 2", Some(Duration::from_secs(60)), c1_closure),
        (2, "volume-state relations, d = 1, 2, 3", Some(Duration::from_secs(60)), c2_omega),
        (3, "constancy of sigma and tau, 1 <= |k| <= 4, h <= 3", Some(Duration::from_secs(300)), c3_constancy),
        (4, "tau sigma = sigma tau = id, h <= 3", Some(Duration::from_secs(300)), c4_inverse),
        (5, "intertwining of Q, G, J0, L0", None, c5_intertwine),
        (6, "beta/gamma modes commute with sigma", None, c6_transparency),
        (7, "exponential commutation law", None, c7_locality),
        (8, "commutator formula for generators and currents", None, c8_borcherds),
        (9, "character identity and operator cross-check", Some(Duration::from_secs(60)), c9_character),
        (10, "twisted Virasoro vectors have c = 0", Some(Duration::from_secs(60)), c10_twist),
        (11, "negative controls are caught", None, c11_negative_controls),
    ];
    let mut failures = 0;
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let mut v = run();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            v.require(elapsed <= b, format!("took {:?}, budget {:?}", elapsed, b));
        }
        let status = if v.ok { "PASS" } else { "FAIL" };
        println!("{} criterion {:>2}: {} ({:.1}s)", status, id, title, elapsed.as_secs_f64());
        for n in &v.notes {
            println!("      {}", n);
        }
        if !v.ok {
            failures += 1;
        }
    }
    println!("acceptance: {} of 11 criteria failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
