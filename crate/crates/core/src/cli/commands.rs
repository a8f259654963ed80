//! One function per command. Each returns its tables, checks and report lines;
//! writing them out is left to the caller.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Command, ExperimentConfig};
use super::output::{Cell, Check, Table};
use crate::error::{Error, Result};
use crate::kernels::{fourier_chaos_kernel, physical_chain_kernel, OrderedTimes};
use crate::lab::{
    coupled_distance, holder_sweep, holder_targets, l2_continuity_curve, CoupledSpec, HolderFit,
    HolderSpec, McConfig, SimConfig,
};
use crate::measure::heat_evolve;
use crate::par::ExecMode;
use crate::params::{
    fractional_spectral_constant, riesz_constants, temporal_constants, validate_params, SpatialParam,
};
use crate::quad::GaussLegendre;
use crate::simplex::{mc_simplex_oracle, simplex_power_integral};
use crate::spectral::bounds::littlewood_hardy_constant;
use crate::spectral::noise::cached_noise;
use crate::spectral::{
    build_grid, chaos_tail_bound, chaos_variance, per_term_majorant, sample_noise, Simulator, TimeGrid,
    VarianceConfig,
};

#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub report: Vec<String>,
}

impl Outcome {
    fn line(&mut self, s: String) {
        self.report.push(s);
    }
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Constants => constants(cfg),
        Command::KernelCheck => kernel_check(cfg),
        Command::SimplexCheck => simplex_check(cfg),
        Command::Variance => variance(cfg),
        Command::Simulate => simulate(cfg),
        Command::Converge => converge(cfg),
        Command::Holder => holder(cfg),
        Command::Tail => tail(cfg),
    }
}

fn sim_config(cfg: &ExperimentConfig) -> SimConfig {
    SimConfig {
        grid: cfg.grid.grid_config(cfg.params.d),
        t_max: cfg.params.t,
        time_steps: cfg.grid.time_steps,
    }
}

fn mc_config(cfg: &ExperimentConfig) -> McConfig {
    McConfig { base_seed: cfg.mc.base_seed, seeds: cfg.mc.seeds, mode: ExecMode::Parallel }
}

fn constants(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sp = cfg.spatial()?;
    let tp = cfg.temporal()?;
    let t = cfg.params.t;
    let tc = temporal_constants(&tp, t)?;
    let report = validate_params(&sp, &tp);
    let mut out = Outcome::default();
    let mut tab = Table::new("constants", &["name", "value"]);
    let mut put = |out: &mut Outcome, name: &str, v: f64| {
        tab.push(vec![name.into(), v.into()]);
        out.line(format!("{name:<14} {v:.10e}"));
    };
    put(&mut out, "c_H0", tc.c_h0);
    put(&mut out, "alpha_H0", tc.alpha_h0);
    put(&mut out, "Gamma_0t", tc.gamma_0t);
    put(&mut out, "b_H0", littlewood_hardy_constant(&tp));
    match sp {
        SpatialParam::Regular { d, alpha } => {
            let rc = riesz_constants(d, alpha, t)?;
            put(&mut out, "K_bound", rc.k_bound);
            put(&mut out, "K_numeric", rc.k_numeric);
            put(&mut out, "C1", rc.c1);
            put(&mut out, "k_alpha_t", rc.k_alpha_t);
            out.line("ell            n/a".into());
        }
        SpatialParam::Rough { h } => {
            put(&mut out, "c_H", fractional_spectral_constant(h)?);
            put(&mut out, "ell", report.ell.unwrap_or(0.0));
        }
    }
    for m in &report.margins {
        put(&mut out, &format!("margin[{}]", m.condition), m.margin);
    }
    out.tables.push(tab);
    out.checks.push(Check::new("admissible", report.admissible, 1.0, 1.0));
    Ok(out)
}

/// Panels of width `PANEL` with `NODES` Gauss points each.
const PANEL: f64 = 0.25;
const NODES: usize = 12;
const REACH: f64 = 12.0;

fn kernel_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let u0 = cfg.initial_measure()?;
    if u0.dim() != 1 {
        return Err(Error::Usage("kernel-check runs in d = 1".into()));
    }
    if u0.lebesgue_weight().is_some() {
        return Err(Error::Usage(
            "kernel-check needs integrable initial data; the Lebesgue component has no spatial transform".into(),
        ));
    }
    let t = cfg.params.t;
    let x = cfg.params.x;
    let mut anchors = vec![x];
    anchors.extend(u0.atoms().iter().map(|a| a.loc[0]));
    anchors.extend(u0.gauss().iter().map(|g| g.mean[0]));
    let lo = anchors.iter().copied().fold(f64::INFINITY, f64::min) - REACH;
    let hi = anchors.iter().copied().fold(f64::NEG_INFINITY, f64::max) + REACH;
    let panels = ((hi - lo) / PANEL).ceil() as usize;
    let gl = GaussLegendre::new(NODES);
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|i| {
            let a = lo + i as f64 * (hi - lo) / panels as f64;
            let b = lo + (i + 1) as f64 * (hi - lo) / panels as f64;
            gl.on(a, b).collect::<Vec<_>>()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.mc.base_seed);
    let mut tab = Table::new(
        "kernel_check",
        &["draw", "n", "t1", "t2", "xi1", "xi2", "re_closed", "im_closed", "re_numeric", "im_numeric", "abs_err"],
    );
    let mut worst: f64 = 0.0;
    for draw in 0..cfg.experiment.draws {
        let n = 1 + draw % 2;
        let times = loop {
            let mut s: Vec<f64> = (0..n).map(|_| t * rng.random_range(0.1..0.9)).collect();
            s.sort_by(f64::total_cmp);
            if s.windows(2).all(|w| w[1] - w[0] > 0.1 * t) {
                break s;
            }
        };
        let xis: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let ord = OrderedTimes::new(t, times.clone())?;
        let xv: Vec<Vec<f64>> = xis.iter().map(|v| vec![*v]).collect();
        let closed = fourier_chaos_kernel(&[x], &ord, &xv, &u0)?.value;
        let mut re = 0.0;
        let mut im = 0.0;
        if n == 1 {
            for &(y, w) in &nodes {
                let f = physical_chain_kernel(&[x], &ord, &[vec![y]], &u0)?;
                re += w * f * (xis[0] * y).cos();
                im -= w * f * (xis[0] * y).sin();
            }
        } else {
            for &(y1, w1) in &nodes {
                for &(y2, w2) in &nodes {
                    let f = physical_chain_kernel(&[x], &ord, &[vec![y1], vec![y2]], &u0)?;
                    let ph = xis[0] * y1 + xis[1] * y2;
                    re += w1 * w2 * f * ph.cos();
                    im -= w1 * w2 * f * ph.sin();
                }
            }
        }
        let err = ((closed.re - re).powi(2) + (closed.im - im).powi(2)).sqrt();
        worst = worst.max(err);
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(f64::NAN);
        tab.push(vec![
            draw.into(),
            n.into(),
            at(&times, 0).into(),
            at(&times, 1).into(),
            at(&xis, 0).into(),
            at(&xis, 1).into(),
            closed.re.into(),
            closed.im.into(),
            re.into(),
            im.into(),
            err.into(),
        ]);
    }
    let mut out = Outcome::default();
    out.line(format!("{} draws, max |closed - numeric| = {worst:.3e}", cfg.experiment.draws));
    out.tables.push(tab);
    out.checks.push(Check::new("fourier_kernel_abs_err", worst <= 1e-6, worst, 1e-6));
    Ok(out)
}

fn simplex_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (n, h, t) = (cfg.experiment.n, cfg.experiment.exponent, cfg.params.t);
    let closed = simplex_power_integral(n, h, t)?;
    let mc = mc_simplex_oracle(
        n,
        |s| {
            let mut prev = 0.0;
            let mut v = (t - s[s.len() - 1]).powf(h);
            for &x in s {
                v *= (x - prev).powf(h);
                prev = x;
            }
            v
        },
        t,
        cfg.mc.samples,
        cfg.mc.base_seed,
        ExecMode::Parallel,
    )?;
    let z = (mc.estimate - closed).abs() / mc.stderr;
    let mut tab = Table::new("simplex_check", &["n", "h", "t", "closed_form", "mc_estimate", "mc_stderr", "z"]);
    tab.push(vec![n.into(), h.into(), t.into(), closed.into(), mc.estimate.into(), mc.stderr.into(), z.into()]);
    let mut out = Outcome::default();
    out.line(format!("closed form {closed:.10e}"));
    out.line(format!("monte carlo {:.10e} +- {:.3e} ({} samples)", mc.estimate, mc.stderr, mc.samples));
    if let Some(w) = &mc.warning {
        out.line(format!("warning: {w}"));
    }
    out.tables.push(tab);
    out.checks.push(Check::new("closed_vs_mc_within_3se", z <= 3.0, z, 3.0));
    Ok(out)
}

fn variance(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sp = cfg.spatial()?;
    let tp = cfg.temporal()?;
    let u0 = cfg.initial_measure()?;
    let (t, x) = (cfg.params.t, cfg.params.x);
    let xs = vec![x; u0.dim()];
    let wp = heat_evolve(&u0, t, &xs)?.w_plus;
    let vcfg = VarianceConfig::default();
    let mut tab = Table::new("variance", &["k", "variance", "majorant"]);
    let mut out = Outcome::default();
    for &k in &cfg.experiment.orders {
        let maj = per_term_majorant(k, &sp, &tp, t)? * wp * wp;
        let var = if (1..=2).contains(&k) && sp.dim() == 1 {
            Some(chaos_variance(k, &sp, &tp, t, x, &u0, &vcfg)?)
        } else {
            None
        };
        tab.push(vec![k.into(), var.unwrap_or(f64::NAN).into(), maj.into()]);
        match var {
            Some(v) => {
                out.line(format!("k = {k}: E|I_k|^2 = {v:.8e}, majorant {maj:.8e}"));
                out.checks.push(Check::new(&format!("variance_le_majorant_k{k}"), v <= maj, v, maj));
            }
            None => out.line(format!("k = {k}: majorant {maj:.8e} (variance not computed)")),
        }
    }
    out.tables.push(tab);
    Ok(out)
}

fn simulate(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sp = cfg.spatial()?;
    let tp = cfg.temporal()?;
    let u0 = cfg.initial_measure()?;
    let (t, x, m) = (cfg.params.t, cfg.params.x, cfg.experiment.m);
    if m == 0 {
        return Err(Error::Usage("experiment.m must be at least 1".into()));
    }
    let grid = build_grid(&cfg.grid.grid_config(sp.dim()))?;
    let sim = Simulator::new(&grid, &tp, TimeGrid::new(t, cfg.grid.time_steps)?, &u0, m as f64 * grid.xi.half_width)?;
    let w = heat_evolve(&u0, t, &[x])?.w;
    let mut header: Vec<String> = vec!["seed".into()];
    header.extend((1..=m).map(|k| format!("I_{k}")));
    header.push("u_m".into());
    let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut tab = Table::new("simulate", &hdr);
    let mut sums = vec![Vec::new(); m];
    for i in 0..cfg.mc.seeds {
        let seed = cfg.mc.base_seed + i as u64;
        let draw = match &cfg.io.cache {
            Some(dir) => cached_noise(Path::new(dir), &grid, seed)?,
            None => sample_noise(&grid, seed),
        };
        let state = sim.prepare(&draw)?;
        let f = sim.evaluate(&state, &sp, m, &[t], &[x])?;
        let mut row: Vec<Cell> = vec![seed.into()];
        for k in 1..=m {
            let v = f.term(k, 0, 0);
            sums[k - 1].push(v);
            row.push(v.into());
        }
        row.push((w + f.partial_sum(m, 0, 0)).into());
        tab.push(row);
    }
    let mut out = Outcome::default();
    out.line(format!("{} draws on grid {}", cfg.mc.seeds, grid.hash()));
    for (k, v) in sums.iter().enumerate() {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let z = if var > 0.0 { mean.abs() / (var / n).sqrt() } else { 0.0 };
        out.line(format!("I_{}: mean {mean:.5e}, variance {var:.5e}", k + 1));
        out.checks.push(Check::new(&format!("mean_zero_I{}", k + 1), z <= 4.0, z, 4.0));
    }
    out.tables.push(tab);
    Ok(out)
}

fn converge(cfg: &ExperimentConfig) -> Result<Outcome> {
    let target = cfg.spatial()?;
    let tp = cfg.temporal()?;
    let u0 = cfg.initial_measure()?;
    let e = &cfg.experiment;
    let (t, x) = (cfg.params.t, cfg.params.x);
    let seq: Vec<SpatialParam> = (0..=e.halvings)
        .map(|n| target.with_value(target.value() + e.gap * 0.5f64.powi(n as i32)))
        .collect();
    let mut out = Outcome::default();

    let curve = l2_continuity_curve(e.k, t, x, &u0, target, &seq, &tp, &VarianceConfig::default())?;
    let mut ct = Table::new("continuity", &["n", "param", "q"]);
    for (n, (p, q)) in curve.params.iter().zip(&curve.q).enumerate() {
        ct.push(vec![n.into(), p.value().into(), (*q).into()]);
        out.line(format!("n = {n}: param {:.6}, Q = {q:.6e}", p.value()));
    }
    let q_ratio = curve.q[curve.q.len() - 1] / curve.q[0];
    out.checks.push(Check::new("q_strictly_decreasing", curve.strictly_decreasing(), q_ratio, 1.0));
    out.checks.push(Check::new("q_last_over_first", q_ratio < 0.05, q_ratio, 0.05));
    out.tables.push(ct);

    let spec = CoupledSpec {
        m: e.m,
        sequence: seq,
        target,
        t,
        x,
        sim: sim_config(cfg),
        mc: mc_config(cfg),
    };
    let rows = coupled_distance(&spec, &tp, &u0)?;
    let mut dt = Table::new(
        "coupled",
        &["n", "param", "gap", "mean_square", "stderr", "ks_coupled", "ks_independent", "ks_critical"],
    );
    for r in &rows {
        dt.push(vec![
            r.n.into(),
            r.param.value().into(),
            r.gap.into(),
            r.mean_square.into(),
            r.stderr.into(),
            r.ks_coupled.into(),
            r.ks_independent.into(),
            r.ks_critical.into(),
        ]);
        out.line(format!(
            "n = {}: E|du|^2 = {:.4e} +- {:.1e}, KS coupled {:.4}, independent {:.4}",
            r.n, r.mean_square, r.stderr, r.ks_coupled, r.ks_independent
        ));
    }
    let min_factor = rows
        .windows(2)
        .map(|w| w[0].mean_square / w[1].mean_square)
        .fold(f64::INFINITY, f64::min);
    out.checks.push(Check::new("distance_factor_per_halving", min_factor >= 2.0, min_factor, 2.0));
    let last = rows.last().expect("non-empty sequence");
    out.checks.push(Check::new("ks_coupled_final", last.ks_coupled < last.ks_critical, last.ks_coupled, last.ks_critical));
    out.checks.push(Check::new(
        "ks_independent_final",
        last.ks_independent < last.ks_critical,
        last.ks_independent,
        last.ks_critical,
    ));
    out.tables.push(dt);
    Ok(out)
}

fn holder_table(fit: &HolderFit, name: &str) -> Table {
    let mut tab = Table::new(name, &["param", "h", "norm", "stderr", "exponent", "constant"]);
    for (i, p) in fit.params.iter().enumerate() {
        for m in &fit.moments[i] {
            tab.push(vec![
                (*p).into(),
                m.h.into(),
                m.norm.into(),
                m.stderr.into(),
                fit.exponents[i].into(),
                fit.constants[i].into(),
            ]);
        }
    }
    tab
}

fn holder(cfg: &ExperimentConfig) -> Result<Outcome> {
    let window = cfg.window()?;
    let tp = cfg.temporal()?;
    let u0 = cfg.initial_measure()?;
    let e = &cfg.experiment;
    let (t_target, x_target) = holder_targets(&window, &tp, e.beta, e.c0)?;
    let spec = HolderSpec {
        window,
        window_points: e.window_points,
        p: e.p,
        m: e.m,
        t0: e.t0,
        bases: e.bases.clone(),
        time_ladder: e.time_ladder.clone(),
        space_ladder: e.space_ladder.clone(),
        sim: sim_config(cfg),
        mc: mc_config(cfg),
    };
    let (tf, sf) = holder_sweep(&spec, &tp, &u0)?;
    let mut out = Outcome::default();
    for (fit, target, label) in [(&tf, t_target, "time"), (&sf, x_target, "space")] {
        let ex: Vec<String> = fit.exponents.iter().map(|v| format!("{v:.3}")).collect();
        out.line(format!(
            "{label}: exponents [{}] target {target:.4}, constant spread {:.3}{}",
            ex.join(", "),
            fit.constant_spread(),
            if fit.inconclusive { " (inconclusive)" } else { "" }
        ));
        let floor = 0.9 * target;
        out.checks.push(Check::new(&format!("{label}_exponent"), fit.min_exponent() >= floor, fit.min_exponent(), floor));
        out.checks.push(Check::new(
            &format!("{label}_constant_spread"),
            fit.constant_spread() < 10.0,
            fit.constant_spread(),
            10.0,
        ));
    }
    out.tables.push(holder_table(&tf, "holder_time"));
    out.tables.push(holder_table(&sf, "holder_space"));
    Ok(out)
}

fn tail(cfg: &ExperimentConfig) -> Result<Outcome> {
    let window = cfg.window()?;
    let tp = cfg.temporal()?;
    let e = &cfg.experiment;
    if e.m_to <= e.m_from + 1 {
        return Err(Error::Usage("need m_to > m_from + 1".into()));
    }
    let bounds = (e.m_from..=e.m_to)
        .map(|m| chaos_tail_bound(m, &window, &tp, cfg.params.t))
        .collect::<Result<Vec<_>>>()?;
    let mut tab = Table::new("tail", &["m", "m0", "bound", "ln_bound", "ratio_excess", "terms_used"]);
    let mut excess = Vec::new();
    let mut out = Outcome::default();
    for (i, b) in bounds.iter().enumerate() {
        let r = match bounds.get(i + 1) {
            Some(n) => b.ratio_excess(n)?,
            None => f64::NAN,
        };
        if r.is_finite() {
            excess.push(r);
        }
        tab.push(vec![b.m.into(), b.m0.into(), b.value.into(), b.ln_value.into(), r.into(), b.terms_used.into()]);
        out.line(format!("m = {:>2}: tail {:.6e}, ratio - 1 = {r:.4e}", b.m, b.value));
    }
    // tail(m) / tail(m + 1) = 1 + excess, so positive excess is a strict decrease
    let decreasing = excess.iter().all(|r| *r > 0.0);
    let increasing = excess.windows(2).all(|w| w[1] > w[0]);
    let growth = excess[excess.len() - 1] / excess[0];
    out.checks.push(Check::new("tail_decreasing", decreasing, bounds[bounds.len() - 1].value, bounds[0].value));
    out.checks.push(Check::new("ratios_increasing", increasing, growth, 1.0));
    out.tables.push(tab);
    Ok(out)
}
