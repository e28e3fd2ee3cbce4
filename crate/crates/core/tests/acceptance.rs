//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use flamespeed_core::hj::{self, NonConvex, Quadratic};
use flamespeed_core::inequalities::{self, Direction, GSpec, SuiteConfig};
use flamespeed_core::inviscid::{self, Regime};
use flamespeed_core::perturbation::{self, Alpha2Form, VectorFieldFourier};
use flamespeed_core::selection;
use flamespeed_core::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn preset(name: &str) -> FlowProfile {
    build_flow(&FlowSpec::preset(name).unwrap()).unwrap()
}

fn problem(name: &str, gamma: f64, mu: f64) -> NormalizedProblem {
    normalize(&preset(name), Momentum::new(gamma, mu)).unwrap()
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn c1_degenerate_direction() -> Outcome {
    let flow = preset("single-well");
    let mut worst: f64 = 0.0;
    for mu in [1.0, -1.0, 0.3, -0.3] {
        let h = flame_speed(&flow, Momentum::new(0.0, mu), 1.0, &opts()).unwrap().h();
        worst = worst.max((h - mu.abs()).abs());
    }
    outcome(worst <= 1e-12, format!("max |H - |mu|| = {worst:e}"))
}

fn c2_slowdown() -> Outcome {
    let t = Instant::now();
    let ds = [4.0, 2.0, 1.0, 0.5, 0.25, 0.1];
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["single-well", "two-max-distinct"] {
        let sw = sweep_markstein(&problem(name, 1.0, 0.1), &ds, &opts()).unwrap();
        let fd_ok = sw.dh_dd_fd.iter().all(|x| *x < -1e-8);
        let alpha_ok = sw.de_dd_formula.iter().all(|x| *x < 0.0);
        let mism = sw.relative_mismatch().into_iter().fold(0.0, f64::max);
        pass &= sw.strictly_decreasing && fd_ok && alpha_ok && mism <= 1e-3;
        notes.push(format!(
            "{name}: decreasing={} fd<-1e-8={fd_ok} alpha<0={alpha_ok} mismatch={mism:.1e}",
            sw.strictly_decreasing
        ));
    }
    let secs = t.elapsed().as_secs_f64();
    pass &= secs < 30.0;
    outcome(pass, format!("{}; {secs:.1}s", notes.join("; ")))
}

fn random_flow(rng: &mut ChaCha8Rng) -> FlowSpec {
    let modes = rng.random_range(1..=3);
    let cos = (0..modes).map(|_| rng.random_range(-1.0..1.0)).collect();
    let sin = (0..modes).map(|_| rng.random_range(-1.0..1.0)).collect();
    FlowSpec::new(cos, sin, rng.random_range(-1.0..1.0))
}

fn c3_bounds_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_identity: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..20 {
        let spec = random_flow(&mut rng);
        let flow = build_flow(&spec).unwrap();
        let gamma = rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = Momentum::new(gamma, rng.random_range(-1.5..1.5));
        let d = rng.random_range(0.1..3.0);
        let np = normalize(&flow, p).unwrap();
        let sol = solve_cell(&np, d, &opts()).unwrap();
        let gv_max = (gamma * flow.max_value).max(gamma * flow.min_value);
        let gv_min = (gamma * flow.max_value).min(gamma * flow.min_value);
        let lower = p.norm() + gamma * flow.mean - 1e-8;
        let upper = p.norm() + gv_max + 1e-8;
        let grad = sol.phi_original.iter().fold(0.0, |m: f64, x| m.max((gamma * x).abs()));
        if !(lower <= sol.h && sol.h <= upper) || grad > sol.h - gv_min + 1e-6 {
            violations += 1;
        }
        worst_identity = worst_identity.max(mean_identity_check(&sol, &np));
    }
    outcome(
        violations == 0 && worst_identity <= 1e-8,
        format!("20 instances, bound violations = {violations}, max identity residual = {worst_identity:.1e}"),
    )
}

fn c4_large_d() -> Outcome {
    let flow = preset("single-well");
    let p = Momentum::new(1.0, 0.1);
    let np = normalize(&flow, p).unwrap();
    let mut devs = Vec::new();
    let mut w100 = 0.0;
    for d in [25.0, 50.0, 100.0] {
        let s = solve_cell(&np, d, &opts()).unwrap();
        devs.push((s.h - (p.norm() + flow.mean)).abs());
        w100 = s.max_abs_w();
    }
    let orders: Vec<f64> = devs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = orders.iter().all(|o| *o >= 1.0) && w100 <= 1e-3;
    outcome(pass, format!("orders in 1/d = {orders:.2?}, max|w|(d=100) = {w100:.2e}"))
}

fn c5_inviscid() -> Outcome {
    let base = problem("single-well", 1.0, 0.0);
    let mu_star = inviscid::inviscid_threshold(&base, 1e-14).unwrap();
    let uniq = problem("single-well", 1.0, 2.0 * mu_star);
    let inv_u = inviscid::solve_inviscid_h(&uniq, 1e-12).unwrap();
    let sol_u = solve_cell(&uniq, 1e-3, &opts()).unwrap();
    let dev_u = (sol_u.h - inv_u.h0).abs();
    let unique_ok = inv_u.regime == Regime::Unique && dev_u <= 5e-3 && inv_u.residual <= 1e-10;

    let trapped = problem("single-well", 1.0, 0.1);
    let inv_t = inviscid::solve_inviscid_h(&trapped, 1e-12).unwrap();
    let sol_t = solve_cell(&trapped, 1e-3, &opts()).unwrap();
    let dev_t = (sol_t.h - inv_t.h0).abs();
    let trapped_ok = inv_t.regime == Regime::Trapped && dev_t <= 5e-3;

    let gentle = problem("gentle-well", 1.0, 0.1);
    let inv_g = inviscid::solve_inviscid_h(&gentle, 1e-12).unwrap();
    let dev_g = (solve_cell(&gentle, 1e-3, &opts()).unwrap().h - inv_g.h0).abs();
    outcome(
        unique_ok && trapped_ok,
        format!(
            "unique (mu = 2 mu* = {:.4}): |H - H0| = {dev_u:.2e}, root residual = {:.1e} [{}]; \
             trapped single-well (mu = 0.1): |H - H0| = {dev_t:.2e} vs 5e-3 [{}]; \
             info: gentle-well trapped |H - H0| = {dev_g:.2e}",
            2.0 * mu_star,
            inv_u.residual,
            if unique_ok { "ok" } else { "fail" },
            if trapped_ok { "ok" } else { "fail" },
        ),
    )
}

fn c6_slope() -> Outcome {
    let ds = [1e-2, 5e-3, 2.5e-3];
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["single-well", "two-max-distinct"] {
        let sd = selection::slope_diagnostic(&problem(name, 1.0, 0.1), &ds, &opts(), 1e-12).unwrap();
        let target = -2.0 * PI;
        let rel = (sd.extrapolated / target - 1.0).abs();
        let matches_target = sd.slope_target.is_some_and(|t| (t - target).abs() < 1e-6);
        pass &= rel <= 0.1 && matches_target && sd.extrapolated < 0.0;
        notes.push(format!("{name}: extrapolated {:.4} vs -2pi (rel {rel:.1e})", sd.extrapolated));
    }
    outcome(pass, notes.join("; "))
}

fn c7_selection() -> Outcome {
    let np = problem("two-max-distinct", 1.0, 0.1);
    let st = selection::selection_study(&np, &[1e-1, 1e-2, 1e-3], &opts(), 1e-12).unwrap();
    let last = *st.distances.last().unwrap();
    let wrong = st.wrong_anchor_distances.last().unwrap().unwrap_or(0.0);
    let audit = inviscid::kink_audit(&np, &inviscid::branch_at(&np, 0.5, 1e-12).unwrap());
    let pass = last <= 0.05 && st.monotone && wrong >= 10.0 * last && audit.minima_at_anchor;
    outcome(
        pass,
        format!(
            "x_bar = {:?}, distances {:.3?}, wrong-anchor {:.3e}, kink audit ok = {}",
            st.selection.x_bar, st.distances, wrong, audit.minima_at_anchor
        ),
    )
}

fn c8_inequalities() -> Outcome {
    let t = Instant::now();
    let rep = inequalities::run_suite(&SuiteConfig::default());
    let secs = t.elapsed().as_secs_f64();
    // equality on constant inputs for the three statements
    let w = inequalities::canonical_weights(6, 1.3).unwrap();
    let disc = inequalities::discrete_inequality(&[0.4; 6], &w, &GSpec::InvSin, 0.5, 1.0, w.c).unwrap();
    let cont =
        inequalities::continuous_inequality(&vec![0.9; 2049], 1.7, &GSpec::Exp { k: 1.0 }, 0.3, Direction::Decreasing)
            .unwrap();
    let split = inequalities::split_inequality_check(&vec![0.6; 64]).unwrap();
    let eq_ok = disc.equality && cont.equality && split.equality;
    let pass = rep.pass && eq_ok && secs < 60.0;
    outcome(
        pass,
        format!(
            "{} discrete + {} continuous cases, failures = {}, min margin = {:.2e}, equality on constants = {eq_ok}; {secs:.1}s",
            rep.discrete_cases,
            rep.continuous_cases,
            rep.failures.len(),
            rep.min_margin
        ),
    )
}

fn random_field(rng: &mut ChaCha8Rng) -> VectorFieldFourier {
    let n = rng.random_range(2..=3);
    let mut modes = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..rng.random_range(1..=6) {
        let k: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
        let minus: Vec<i64> = k.iter().map(|x| -x).collect();
        if k.iter().all(|x| *x == 0) || seen.contains(&k) || seen.contains(&minus) {
            continue;
        }
        seen.insert(k.clone());
        // random complex vector projected orthogonally to k
        let raw: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let k2: f64 = k.iter().map(|x| (x * x) as f64).sum();
        let dot: Complex64 = raw.iter().zip(&k).map(|(l, x)| l * *x as f64).sum();
        let lam: Vec<Complex64> = raw.iter().zip(&k).map(|(l, x)| l - dot * (*x as f64 / k2)).collect();
        modes.push((k, lam));
    }
    if modes.is_empty() {
        let mut k = vec![0; n];
        k[0] = 1;
        let mut lam = vec![Complex64::new(0.0, 0.0); n];
        lam[1] = Complex64::new(0.5, 0.0);
        modes.push((k, lam));
    }
    VectorFieldFourier::new(n, modes).unwrap()
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

fn c9_perturbation() -> Outcome {
    let v = FlowSpec::preset("two-mode").unwrap();
    let n = 1.0f64.hypot(0.37);
    let p = Momentum::new(1.0 / n, 0.37 / n);
    let a = perturbation::cross_check_shear(&v, p, 1.0, 0.02, &opts(), Alpha2Form::Corrected).unwrap();
    let b = perturbation::cross_check_shear(&v, p, 1.0, 0.01, &opts(), Alpha2Form::Corrected).unwrap();
    let order = perturbation::remainder_order(&a, &b);
    let order_ok = (2.5..=3.5).contains(&order);

    let field = VectorFieldFourier::from_shear(&v).unwrap();
    let unit = [p.gamma / p.norm(), p.mu / p.norm()];
    let a2: Vec<f64> = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|d| {
            perturbation::effective_speed_expansion(&field, &unit, *d, 0.0, 32, Alpha2Form::Corrected)
                .unwrap()
                .alpha2
        })
        .collect();
    let monotone = a2.windows(2).all(|w| w[1] < w[0]);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut negative = 0;
    for _ in 0..100 {
        let f = random_field(&mut rng);
        let pu = random_unit(&mut rng, f.dimension);
        let d = rng.random_range(0.05..3.0);
        let r = perturbation::effective_speed_expansion(&f, &pu, d, 0.1, 32, Alpha2Form::Corrected).unwrap();
        if r.alpha2 < 0.0 {
            negative += 1;
        }
    }
    outcome(
        order_ok && monotone && negative == 0,
        format!(
            "remainder order {order:.2} (errors {:.2e}, {:.2e}), alpha2 decreasing in d = {monotone}, \
             negative alpha2 in 100 random fields = {negative}",
            a.error, b.error
        ),
    )
}

fn c10_viscous_hj() -> Outcome {
    let g = build_flow(&FlowSpec::new(vec![1.0], vec![], 0.0)).unwrap();
    let q = hj::hj_sweep(&g, &Quadratic, 0.3, &[2.0, 1.0, 0.5], &opts()).unwrap();
    let nc = hj::hj_sweep(&g, &NonConvex, 0.3, &[2.0, 1.0, 0.5], &opts()).unwrap();
    outcome(
        q.strictly_decreasing_in_d,
        format!(
            "quadratic Hbar(d = 2, 1, 0.5) = {:.6?}; info: non-convex Hbar = {:.6?}, signs = {:?}",
            q.h_values, nc.h_values, nc.slope_signs
        ),
    )
}

fn c11_determinism() -> Outcome {
    let cfg = SuiteConfig {
        discrete_cases: 200,
        continuous_cases: 20,
        seed: 2024,
    };
    let a = serde_json::to_string(&inequalities::run_suite(&cfg)).unwrap();
    let b = serde_json::to_string(&inequalities::run_suite(&cfg)).unwrap();
    let np = problem("two-max-distinct", 1.0, 0.1);
    let s1 = serde_json::to_string(&solve_cell(&np, 0.3, &opts()).unwrap()).unwrap();
    let s2 = serde_json::to_string(&solve_cell(&np, 0.3, &opts()).unwrap()).unwrap();
    outcome(a == b && s1 == s2, format!("suite JSON identical = {}, cell JSON identical = {}", a == b, s1 == s2))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("degenerate direction", c1_degenerate_direction),
        ("slowdown in d", c2_slowdown),
        ("bounds and identity", c3_bounds_identity),
        ("large-d limit", c4_large_d),
        ("inviscid agreement", c5_inviscid),
        ("slope limit", c6_slope),
        ("selection profile", c7_selection),
        ("inequality suite", c8_inequalities),
        ("perturbation", c9_perturbation),
        ("viscous HJ", c10_viscous_hj),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<22} {}  ({:.1}s) {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
