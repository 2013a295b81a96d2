//! The acceptance suite: twelve criteria, each with a measured value, a
//! target, a verdict and its runtime against the stated budget.

use std::fmt;
use std::time::Instant;

use flowlab::asymptotics::fit_bowl_expansion;
use flowlab::audit::{audit_geometry, audit_speed};
use flowlab::flow::{
    bowl_translation, cylinder_regression, heat_barrier_limit_probes, heat_barrier_psi,
    heat_barrier_quadrature, linearize_rescaled_at_cylinder,
};
use flowlab::soliton::{
    shrinker_lower_bound_check, shrinker_to_bowl_convergence, shrinker_w_diagnostic, solve_bowl, solve_shrinker_with,
    ShrinkerOptions, ShrinkerProfile,
};
use flowlab::spectral::{build_basis, classify_mode, eigenvalue, fd_operator, rescaled_mode_run, ModeClass, ModeRunOptions};
use flowlab::SpeedFunction;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub measured: String,
    pub target: String,
    pub passed: bool,
    pub runtime_s: f64,
    pub budget_s: f64,
}

impl CriterionResult {
    pub fn within_budget(&self) -> bool {
        self.runtime_s <= self.budget_s
    }

    /// Numbers and runtime both inside their limits.
    pub fn ok(&self) -> bool {
        self.passed && self.within_budget()
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {:<28} measured {} | target {} | {:.2}s of {}s",
            if self.ok() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.measured,
            self.target,
            self.runtime_s,
            self.budget_s
        )
    }
}

/// Outcome of a check body: pass flag, measured text, target text.
type Check = (bool, String, String);

fn run(id: usize, title: &str, budget_s: f64, body: impl FnOnce() -> flowlab::Result<Check>) -> CriterionResult {
    let t0 = Instant::now();
    let res = body();
    let runtime_s = t0.elapsed().as_secs_f64();
    let (passed, measured, target) = match res {
        Ok(c) => c,
        Err(e) => (false, format!("error: {e}"), String::from("-")),
    };
    CriterionResult {
        id,
        title: title.to_string(),
        measured,
        target,
        passed,
        runtime_s,
        budget_s,
    }
}

fn builtin(n: usize) -> flowlab::Result<Vec<SpeedFunction>> {
    Ok(vec![
        SpeedFunction::sum(n)?,
        SpeedFunction::brendle_huisken(n)?,
        SpeedFunction::sigma_ratio(n, 2)?,
    ])
}

fn sum3() -> SpeedFunction {
    SpeedFunction::sum(3).expect("n = 3 is valid")
}

fn bh3() -> SpeedFunction {
    SpeedFunction::brendle_huisken(3).expect("n = 3 is valid")
}

pub fn bowl_tip() -> CriterionResult {
    run(1, "bowl tip curvature", 1.0, || {
        let mut worst: f64 = 0.0;
        for n in [3, 4] {
            for sp in builtin(n)? {
                let b = solve_bowl(&sp, 10.0, 1e-10)?;
                worst = worst.max((b.tip_curvature * 2.0 * sp.f11() - 1.0).abs());
            }
        }
        Ok((worst <= 1e-6, format!("max rel err {worst:.2e}"), "1/(2F(1,1)) within 1e-6".into()))
    })
}

pub fn bowl_expansion() -> CriterionResult {
    run(2, "bowl expansion c2", 10.0, || {
        let fits = [(sum3(), -2.0), (bh3(), -0.64)]
            .par_iter()
            .map(|(sp, target)| {
                let b = solve_bowl(sp, 1000.0, 1e-10)?;
                let f = fit_bowl_expansion(&b, [100.0, 1000.0])?;
                Ok((f.coefficients[0], *target, f.residual_ok()))
            })
            .collect::<flowlab::Result<Vec<_>>>()?;
        let ok = fits.iter().all(|(c, t, r)| (c / t - 1.0).abs() <= 0.05 && *r);
        let measured = format!("sum {:.5}, bh {:.5}", fits[0].0, fits[1].0);
        Ok((ok, measured, "-2 and -0.64 within 5%".into()))
    })
}

/// Profiles shared by the lower-bound and neck criteria.
pub struct ShrinkerSet {
    pub profiles: Vec<ShrinkerProfile>,
    pub solve_s: f64,
}

pub fn solve_shrinker_set() -> flowlab::Result<ShrinkerSet> {
    let t0 = Instant::now();
    let opts = ShrinkerOptions::default();
    let jobs: Vec<(SpeedFunction, f64)> = [sum3(), bh3()]
        .into_iter()
        .flat_map(|sp| [25.0, 50.0, 100.0].map(|a| (sp, a)))
        .collect();
    let profiles = jobs
        .par_iter()
        .map(|(sp, a)| solve_shrinker_with(sp, *a, &opts))
        .collect::<flowlab::Result<Vec<_>>>()?;
    Ok(ShrinkerSet {
        profiles,
        solve_s: t0.elapsed().as_secs_f64(),
    })
}

pub fn shrinker_lower_bound(set: &flowlab::Result<ShrinkerSet>) -> CriterionResult {
    let mut r = run(3, "shrinker lower bound", 30.0, || {
        let set = set.as_ref().map_err(Clone::clone)?;
        let mut violations = 0;
        let mut nodes = 0;
        let mut margin = f64::INFINITY;
        for p in &set.profiles {
            let rep = shrinker_lower_bound_check(p);
            violations += rep.violations;
            nodes += rep.nodes;
            margin = margin.min(rep.min_margin);
        }
        Ok((
            violations == 0,
            format!("{violations} violations on {nodes} nodes, min margin {margin:.2e}"),
            "0 violations, a in {25,50,100}".into(),
        ))
    });
    // the solves run in parallel across a; report the worst case per a
    if let Ok(s) = set {
        r.runtime_s += s.solve_s;
    }
    r
}

pub fn neck_quantity(set: &flowlab::Result<ShrinkerSet>) -> CriterionResult {
    run(4, "neck quantity w", 5.0, || {
        let set = set.as_ref().map_err(Clone::clone)?;
        let mut min_w = f64::INFINITY;
        let mut all_above = true;
        let mut tip_err: f64 = 0.0;
        let mut tip_sum3 = f64::NAN;
        for p in &set.profiles {
            let w = shrinker_w_diagnostic(p, 50.0);
            min_w = min_w.min(w.min_w);
            all_above &= w.above_two;
            tip_err = tip_err.max(w.tip_rel_error);
            if p.speed().is_linear() && p.speed().n() == 3 && tip_sum3.is_nan() {
                tip_sum3 = w.tip_extrapolated;
            }
        }
        Ok((
            all_above && tip_err <= 0.02,
            format!("min w {min_w:.4}, tip (sum) {tip_sum3:.5}, max tip rel err {tip_err:.1e}"),
            "w > 2, tip 2F(1,1)/F(0,1) within 2%".into(),
        ))
    })
}

pub fn shrinker_to_bowl() -> CriterionResult {
    run(5, "shrinker to bowl", 60.0, || {
        let rows = shrinker_to_bowl_convergence(&sum3(), &[20.0, 40.0, 80.0], 10.0, &ShrinkerOptions::default())?;
        let g: Vec<f64> = rows.iter().map(|r| r.sup_gap).collect();
        let ok = g[0] > g[1] && g[1] > g[2] && g[2] < 0.25 * g[0];
        Ok((ok, format!("gaps {:.3e}, {:.3e}, {:.3e}", g[0], g[1], g[2]), "decreasing, last < 1/4 first".into()))
    })
}

pub fn cylinder_flow() -> CriterionResult {
    run(6, "cylinder regression", 30.0, || {
        let rep = cylinder_regression(&sum3(), 2.0, 5.0, 0.25, &[0.2, 0.1, 0.05])?;
        let fin = rep.rows.last().map_or(f64::INFINITY, |r| r.max_error);
        let min_ratio = rep.ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok((
            fin <= 1e-6 && min_ratio >= 3.5,
            format!("finest err {fin:.2e}, min ratio {min_ratio:.2}"),
            "err <= 1e-6, ratio >= 3.5".into(),
        ))
    })
}

pub fn bowl_translates() -> CriterionResult {
    run(7, "bowl translation", 60.0, || {
        let rep = bowl_translation(&sum3(), 2.0, 12.0, 0.05, 1.0, 7.0)?;
        Ok((
            (rep.measured_speed - 0.5).abs() <= 1e-3,
            format!("speed {:.6}", rep.measured_speed),
            "0.5 +- 1e-3".into(),
        ))
    })
}

pub fn spectral_identities() -> CriterionResult {
    run(8, "spectral identities", 5.0, || {
        let mut table_ok = true;
        for n in 2..=6 {
            for k in 0..=6 {
                for l in 0..=6 {
                    let want = match (k, l) {
                        (0, 0) | (1, 0) | (0, 1) => ModeClass::Positive,
                        (2, 0) | (1, 1) => ModeClass::Zero,
                        _ => ModeClass::Negative,
                    };
                    let mu = eigenvalue(k, l, n);
                    let sign_ok = match want {
                        ModeClass::Positive => mu > 0.0,
                        ModeClass::Zero => mu == 0.0,
                        ModeClass::Negative => mu < 0.0,
                    };
                    table_ok &= classify_mode(k, l, n) == want && sign_ok;
                }
            }
        }
        let a = bh3().a_lin();
        let dz = 0.05;
        let u: Vec<f64> = (0..=400).map(|i| -10.0 + dz * i as f64).map(|z| z * z / a - 2.0).collect();
        let zero = fd_operator(a, -10.0, dz, &u).iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        let orth = build_basis(a, 24, 120)?.orthogonality_error;
        Ok((
            table_ok && zero <= 1e-8 && orth <= 1e-10,
            format!("table {}, |L(z^2/a-2)| {zero:.1e}, orth {orth:.1e}", if table_ok { "exact" } else { "wrong" }),
            "exact, 1e-8, 1e-10".into(),
        ))
    })
}

pub fn linearization() -> CriterionResult {
    run(9, "linearization", 10.0, || {
        let reps = [sum3(), bh3()]
            .par_iter()
            .map(|sp| linearize_rescaled_at_cylinder(sp, 0.05, 8.0, 20, 7))
            .collect::<flowlab::Result<Vec<_>>>()?;
        let worst = reps.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
        let tol = reps[0].tolerance;
        Ok((reps.iter().all(|r| r.passed), format!("max dev {worst:.2e} in 20 directions"), format!("<= {tol:.1e}")))
    })
}

pub fn mode_rates() -> CriterionResult {
    run(10, "mode rates", 60.0, || {
        let jobs: Vec<(SpeedFunction, usize)> = [sum3(), bh3()].into_iter().flat_map(|s| (0..=3).map(move |k| (s, k))).collect();
        let reps = jobs
            .par_iter()
            .map(|(sp, k)| rescaled_mode_run(sp, 3, *k, &ModeRunOptions::default()).map(|r| r.report))
            .collect::<flowlab::Result<Vec<_>>>()?;
        let worst = reps.iter().map(|r| r.rel_error).fold(0.0, f64::max);
        let drift = reps.iter().filter(|r| r.k == 2).map(|r| r.drift.abs()).fold(0.0, f64::max);
        Ok((
            worst <= 0.05 && drift < 1e-5,
            format!("max rel err {worst:.1e}, k=2 drift {drift:.1e}"),
            "5%, drift < 1e-5".into(),
        ))
    })
}

pub fn heat_barrier() -> CriterionResult {
    run(11, "heat barrier", 1.0, || {
        let probes = heat_barrier_limit_probes()?;
        let worst = probes.iter().map(|p| p.error()).fold(0.0, f64::max);
        let q = (heat_barrier_psi(2.0, 1.0)? - heat_barrier_quadrature(2.0, 1.0)?).abs();
        Ok((worst <= 1e-6 && q <= 1e-8, format!("limits {worst:.1e}, quadrature {q:.1e}"), "1e-6, 1e-8".into()))
    })
}

pub fn property_suites() -> CriterionResult {
    run(12, "property suites", 30.0, || {
        let mut speeds = Vec::new();
        for n in [3, 4, 5] {
            speeds.extend(builtin(n)?);
        }
        speeds.push(SpeedFunction::sigma_ratio(5, 4)?);
        let audits = speeds
            .par_iter()
            .map(|sp| Ok((audit_speed(sp, 100, 12)?, audit_geometry(sp, sp.cylinder_radius(), 0.01, 5)?)))
            .collect::<flowlab::Result<Vec<_>>>()?;
        let failed: Vec<String> = audits
            .iter()
            .filter(|(s, g)| !s.passed() || !g.passed(0.2))
            .map(|(s, _)| s.label.clone())
            .collect();
        let worst_geo = audits
            .iter()
            .map(|(_, g)| g.a_change.max(g.g_change).max(g.trace_change.unwrap_or(0.0)))
            .fold(0.0, f64::max);
        Ok((
            failed.is_empty(),
            format!("{} speeds x 100 samples, geometry drift {worst_geo:.3}, failed [{}]", audits.len(), failed.join(", ")),
            "all properties, drift < 0.2".into(),
        ))
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    let mut out = vec![bowl_tip(), bowl_expansion()];
    let set = solve_shrinker_set();
    out.push(shrinker_lower_bound(&set));
    out.push(neck_quantity(&set));
    out.extend([
        shrinker_to_bowl(),
        cylinder_flow(),
        bowl_translates(),
        spectral_identities(),
        linearization(),
        mode_rates(),
        heat_barrier(),
        property_suites(),
    ]);
    out
}
