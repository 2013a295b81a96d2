//! The experiment subcommands. Each writes its CSV/JSON files under the
//! output directory and returns a summary with an overall pass flag.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use flowlab::asymptotics::{fit_bowl_expansion, fit_shrinker_neck, shrinker_rescaled_state, shrinker_stationarity};
use flowlab::flow::{
    bowl_for_heights, bowl_state, bowl_translation, cylinder_regression, linearize_rescaled_at_cylinder,
};
use flowlab::io::{write_csv, write_history, write_json, RunManifest};
use flowlab::soliton::{
    shrinker_upper_bound_check, shrinker_w_diagnostic, solve_bowl, solve_shrinker_with, ShrinkerOptions,
};
use flowlab::spectral::{
    bowl_rescaled_run, build_basis, eigen_table, gamma_trace_from_run, merle_zaag_classifier, rescaled_mode_run,
    seeded_trace, ModeRunOptions, TraceOptions,
};
use flowlab::SpeedFunction;
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentConfig, FlowPreset};
use crate::plot::{write_script, Curve};

/// Result of one subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub command: String,
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

struct Out {
    dir: PathBuf,
    files: Vec<PathBuf>,
    plots: bool,
}

impl Out {
    fn new(cfg: &ExperimentConfig, command: &str) -> Result<Self> {
        let dir = cfg.output.dir.join(command);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut out = Out {
            dir,
            files: Vec::new(),
            plots: cfg.output.plots,
        };
        let p = out.path("config.toml");
        std::fs::write(&p, cfg.to_toml()?)?;
        out.files.push(p);
        Ok(out)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn csv(&mut self, name: &str, schema: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let p = self.path(name);
        write_csv(&p, schema, header, rows)?;
        self.files.push(p);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name);
        write_json(&p, value)?;
        self.files.push(p);
        Ok(())
    }

    fn plot(&mut self, name: &str, title: &str, logscale: Option<&str>, curves: &[Curve]) -> Result<()> {
        if self.plots {
            let p = write_script(&self.dir, name, title, logscale, curves)?;
            self.files.push(p);
        }
        Ok(())
    }

    fn finish(self, command: &str, passed: bool, summary: serde_json::Value) -> Result<Outcome> {
        let mut files = self.files;
        let p = self.dir.join("summary.json");
        let outcome = Outcome {
            command: command.to_string(),
            passed,
            files: files.clone(),
            summary,
        };
        write_json(&p, &outcome)?;
        files.push(p);
        Ok(Outcome { files, ..outcome })
    }
}

fn speed(cfg: &ExperimentConfig) -> Result<SpeedFunction> {
    Ok(cfg.speed.build()?)
}

fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

fn shrinker_options(cfg: &ExperimentConfig) -> ShrinkerOptions {
    let s = &cfg.solver;
    let mut o = ShrinkerOptions {
        theta: s.theta,
        big_theta: s.big_theta,
        tol: s.tol,
        conv_tol: s.conv_tol,
        ..ShrinkerOptions::default()
    };
    if let Some(r) = &s.rho_k {
        o.rho_k = r.clone();
    }
    o
}

/// Bowl profile, tip data and the expansion fit.
pub fn cmd_bowl(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sp = speed(cfg)?;
    let mut out = Out::new(cfg, "bowl")?;
    let b = solve_bowl(&sp, cfg.solver.rho_max, cfg.solver.tol)?;
    let rows: Vec<Vec<f64>> = (0..b.len())
        .map(|i| vec![b.rho[i], b.zeta[i], b.zeta_rho[i], b.zeta_rhorho[i]])
        .collect();
    let schema = format!("bowl/1 speed={} tol={:e}", cfg.speed_label(), cfg.solver.tol);
    out.csv("bowl.csv", &schema, &["rho", "zeta", "zeta_rho", "zeta_rhorho"], &rows)?;
    out.plot("bowl", "bowl profile", None, &[Curve { csv: "bowl.csv", x: "rho", y: "zeta", title: "zeta" }])?;

    let tip_target = 1.0 / (2.0 * sp.f11());
    let tip_rel = (b.tip_curvature / tip_target - 1.0).abs();
    let mut passed = tip_rel <= 1e-6 && b.is_convex_increasing();
    let fit = if cfg.solver.rho_max >= cfg.solver.fit_window[1] {
        let f = fit_bowl_expansion(&b, cfg.solver.fit_window)?;
        passed &= f.residual_ok() && f.rel_error.is_none_or(|e| e <= 0.05);
        out.json("fit.json", &f)?;
        Some(f)
    } else {
        info!("rho_max {} below the fit window, expansion fit skipped", cfg.solver.rho_max);
        None
    };
    let summary = json!({
        "speed": cfg.speed_label(),
        "tip_curvature": b.tip_curvature,
        "tip_target": tip_target,
        "tip_rel_error": tip_rel,
        "zeta_at_10": b.zeta_at(10.0),
        "max_node_residual": b.max_node_residual,
        "max_midpoint_defect": b.max_midpoint_defect,
        "fit": fit,
    });
    out.finish("bowl", passed, summary)
}

/// Shrinker caps for every `a`, with the neck quantity and optional bound checks.
pub fn cmd_shrinker(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sp = speed(cfg)?;
    let mut out = Out::new(cfg, "shrinker")?;
    let opts = shrinker_options(cfg);
    let profiles = cfg
        .solver
        .a
        .par_iter()
        .map(|&a| solve_shrinker_with(&sp, a, &opts))
        .collect::<flowlab::Result<Vec<_>>>()?;
    let mut passed = true;
    let mut table = Vec::new();
    for p in &profiles {
        let tag = format!("a{}", p.a);
        let header = format!(
            "shrinker/1 speed={} a={} theta={} tol={:e}",
            cfg.speed_label(),
            p.a,
            p.theta,
            p.tol
        );
        let rows: Vec<Vec<f64>> = p.psi_rows.iter().map(|r| r.to_vec()).collect();
        out.csv(&format!("psi_{tag}.csv"), &header, &["rho", "psi", "psi_rho", "Lambda", "B"], &rows)?;
        let w = shrinker_w_diagnostic(p, cfg.solver.m);
        let rows: Vec<Vec<f64>> = p.z_nodes.iter().zip(&w.w).map(|(n, w)| vec![n.z, n.v, n.v_z, *w]).collect();
        out.csv(&format!("v_{tag}.csv"), &header, &["z", "v", "v_z", "w"], &rows)?;
        let mut row = json!({
            "a": p.a,
            "tip_curvature": p.tip_curvature,
            "limit_error_estimate": p.limit_error_estimate,
            "inversion_error": p.inversion_error,
            "monitor": p.monitor,
            "min_w": w.min_w,
            "w_above_two": w.above_two,
            "w_tip": w.tip_extrapolated,
            "w_tip_target": w.tip_target,
            "w_upper_held": w.upper_held,
            "w_boundary_held": w.boundary_held,
        });
        passed &= w.above_two && p.monitor.upper_bound_held && p.monitor.lower_bound_held;
        if cfg.solver.check_bounds {
            let l = cfg.solver.l.min(0.999 * p.a).max(p.l0);
            let ub = shrinker_upper_bound_check(p, l)?;
            passed &= ub.lower.violations == 0;
            row["lower_violations"] = json!(ub.lower.violations);
            row["lower_min_margin"] = json!(ub.lower.min_margin);
            row["c_fit"] = json!(ub.c_fit);
        }
        table.push(row);
    }
    if let Some(p) = profiles.first() {
        let tag = format!("a{}", p.a);
        out.plot(
            "shrinker",
            "shrinker profile",
            None,
            &[Curve { csv: &format!("v_{tag}.csv"), x: "z", y: "v", title: "v" }],
        )?;
    }
    let neck = if cfg.solver.check_bounds && profiles.len() >= 4 {
        Some(fit_shrinker_neck(&profiles, cfg.solver.l)?)
    } else {
        None
    };
    let summary = json!({ "speed": cfg.speed_label(), "profiles": table, "neck": neck });
    out.json("bounds.json", &summary)?;
    out.finish("shrinker", passed, summary)
}

/// Radial flow presets: cylinder regression, bowl translation, shrinker stationarity.
pub fn cmd_flow(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sp = speed(cfg)?;
    let mut out = Out::new(cfg, "flow")?;
    let f = &cfg.flow;
    let (passed, summary) = match f.preset {
        FlowPreset::Cylinder => {
            let dxs = [4.0 * f.dx, 2.0 * f.dx, f.dx];
            let rep = cylinder_regression(&sp, f.r0, f.half_length, f.t_end, &dxs)?;
            let rows: Vec<Vec<f64>> = rep.rows.iter().map(|r| vec![r.dx, r.dt, r.steps as f64, r.max_error]).collect();
            out.csv("cylinder.csv", "cylinder_regression/1", &["dx", "dt", "steps", "max_error"], &rows)?;
            out.plot(
                "cylinder",
                "cylinder regression",
                Some("xy"),
                &[Curve { csv: "cylinder.csv", x: "dx", y: "max_error", title: "error" }],
            )?;
            let ok = rep.rows.last().is_some_and(|r| r.max_error <= 1e-6) && rep.ratios.iter().all(|q| *q >= 3.5);
            (ok, serde_json::to_value(&rep)?)
        }
        FlowPreset::Bowl => {
            let [z_lo, z_hi] = f.z_window;
            let level = 0.5 * (z_lo + z_hi);
            let rep = bowl_translation(&sp, z_lo, z_hi, f.dx, f.t_end, level)?;
            let bowl = Arc::new(bowl_for_heights(&sp, z_hi)?);
            let st = bowl_state(&sp, bowl, z_lo, z_hi, f.dx)?;
            let grid = st.grid;
            let (_, hist) = st.run(f.t_end, f.scheme, f.dt, f.stride)?;
            let p = out.path("history.csv");
            write_history(&p, &hist)?;
            out.files.push(p);
            out.json(
                "manifest.json",
                &RunManifest {
                    command: "flow --preset bowl".into(),
                    speed: cfg.speed.clone(),
                    grid,
                    scheme: f.scheme,
                    tolerances: vec![("speed".into(), 1e-3)],
                    boundary: "dirichlet".into(),
                    seed: None,
                    snapshot_stride: f.stride,
                    version: version(),
                },
            )?;
            ((rep.measured_speed - 0.5).abs() <= 1e-3, serde_json::to_value(&rep)?)
        }
        FlowPreset::Shrinker => {
            let a = cfg.solver.a.first().copied().unwrap_or(25.0);
            let p = solve_shrinker_with(&sp, a, &shrinker_options(cfg))?;
            let z_lo = (p.z_min() + 0.5).ceil();
            let z_hi = (0.8 * a).floor();
            let coarse = shrinker_stationarity(&p, z_lo, z_hi, 2.0 * f.dx)?;
            let fine = shrinker_stationarity(&p, z_lo, z_hi, f.dx)?;
            let st = shrinker_rescaled_state(&p, z_lo, z_hi, f.dx)?;
            let grid = st.grid;
            let (_, hist) = st.run(f.t_end, f.scheme, f.dt, f.stride)?;
            let pth = out.path("history.csv");
            write_history(&pth, &hist)?;
            out.files.push(pth);
            out.json(
                "manifest.json",
                &RunManifest {
                    command: "flow --preset shrinker".into(),
                    speed: cfg.speed.clone(),
                    grid,
                    scheme: f.scheme,
                    tolerances: vec![("ode".into(), cfg.solver.tol)],
                    boundary: "dirichlet".into(),
                    seed: None,
                    snapshot_stride: f.stride,
                    version: version(),
                },
            )?;
            let ratio = coarse / fine;
            (ratio > 3.0, json!({ "a": a, "window": [z_lo, z_hi], "rate_coarse": coarse, "rate_fine": fine, "ratio": ratio }))
        }
    };
    out.finish("flow", passed, summary)
}

/// Seeded Hermite modes of the rescaled flow and the linearization check.
pub fn cmd_rescaled(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sp = speed(cfg)?;
    let n = cfg.speed.n;
    let mut out = Out::new(cfg, "rescaled")?;
    let opts = mode_options(cfg);
    let runs = (0..=3usize)
        .into_par_iter()
        .map(|k| rescaled_mode_run(&sp, n, k, &opts))
        .collect::<flowlab::Result<Vec<_>>>()?;
    let rows: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| {
            let m = &r.report;
            vec![m.k as f64, m.mu, m.measured_factor, m.expected_factor, m.rel_error, m.drift]
        })
        .collect();
    out.csv("modes.csv", "mode_rates/1", &["k", "mu", "measured", "expected", "rel_error", "drift"], &rows)?;
    let seed = &runs[cfg.spectral.seed_mode.min(3)];
    let p = out.path("history.csv");
    write_history(&p, &seed.history)?;
    out.files.push(p);
    let lin = linearize_rescaled_at_cylinder(&sp, opts.dx, 8.0, 20, cfg.seed)?;
    out.json("linearization.json", &lin)?;
    let passed = lin.passed
        && runs.iter().all(|r| r.report.rel_error <= 0.05)
        && runs[2].report.drift.abs() < 1e-5;
    let reports: Vec<_> = runs.iter().map(|r| r.report).collect();
    out.finish("rescaled", passed, json!({ "modes": reports, "linearization": lin }))
}

fn mode_options(cfg: &ExperimentConfig) -> ModeRunOptions {
    ModeRunOptions {
        epsilon: cfg.spectral.epsilon,
        k_max: cfg.spectral.k_max,
        quad_order: cfg.spectral.quad_order,
        ..ModeRunOptions::default()
    }
}

/// Eigen table, a seeded or bowl-side trace and its classification.
/// Bowl-side runs must end early enough that the grid stays above the tip,
/// and start late enough that the bowl can be solved up to `e^{-τ₀}`.
const BOWL_TAU_END: f64 = -7.0;
const BOWL_MAX_WINDOWS: usize = 8;

pub fn cmd_spectral(cfg: &ExperimentConfig, bowl_side: bool) -> Result<Outcome> {
    let sp = speed(cfg)?;
    let n = cfg.speed.n;
    let s = &cfg.spectral;
    let mut out = Out::new(cfg, "spectral")?;
    let rows: Vec<Vec<f64>> = eigen_table(6, 6, n)
        .iter()
        .map(|r| {
            let c = match r.class {
                flowlab::spectral::ModeClass::Positive => 1.0,
                flowlab::spectral::ModeClass::Zero => 0.0,
                flowlab::spectral::ModeClass::Negative => -1.0,
            };
            vec![r.k as f64, r.l as f64, r.mu, c]
        })
        .collect();
    out.csv("eigen.csv", "eigen_table/1", &["k", "l", "mu", "class"], &rows)?;
    let basis = build_basis(sp.a_lin(), s.k_max, s.quad_order)?;
    let topts = TraceOptions {
        r: s.r,
        l_cut: s.l_cut,
        delta_l: s.delta_l,
    };
    let opts = mode_options(cfg);
    let trace = if bowl_side {
        let w = s.windows.min(BOWL_MAX_WINDOWS);
        if w < s.windows {
            warn!("bowl-side run limited to {w} windows");
        }
        let (h, basis, sigma) = bowl_rescaled_run(&sp, BOWL_TAU_END, w, &opts)?;
        gamma_trace_from_run(&h, &basis, n, sigma, &topts)?
    } else {
        let (run, _) = seeded_trace(&sp, n, s.seed_mode, s.windows, &opts)?;
        gamma_trace_from_run(&run.history, &run.basis, n, run.sigma, &topts)?
    };
    let rows: Vec<Vec<f64>> = (0..trace.windows())
        .map(|j| {
            vec![
                j as f64,
                trace.gamma_plus[j],
                trace.gamma_zero[j],
                trace.gamma_minus[j],
                trace.big_plus[j],
                trace.big_zero[j],
                trace.big_minus[j],
                trace.epsilon[j],
            ]
        })
        .collect();
    out.csv(
        "trace.csv",
        "gamma_trace/1",
        &["window", "gamma_plus", "gamma_zero", "gamma_minus", "big_plus", "big_zero", "big_minus", "epsilon"],
        &rows,
    )?;
    out.plot(
        "trace",
        "mode traces",
        Some("y"),
        &[
            Curve { csv: "trace.csv", x: "window", y: "big_plus", title: "plus" },
            Curve { csv: "trace.csv", x: "window", y: "big_zero", title: "zero" },
            Curve { csv: "trace.csv", x: "window", y: "big_minus", title: "minus" },
        ],
    )?;
    let class = merle_zaag_classifier(&trace);
    out.json("classification.json", &class)?;
    let passed = basis.orthogonality_error <= 1e-10 && basis.operator_leakage() <= 1e-8;
    let summary = json!({
        "source": if bowl_side { "bowl".to_string() } else { format!("k={}", s.seed_mode) },
        "windows": trace.windows(),
        "verdict": class.verdict,
        "classification": class,
        "c_equiv": trace.c_equiv,
        "orthogonality_error": basis.orthogonality_error,
    });
    out.finish("spectral", passed, summary)
}
