//! Numerical experiments: parameter continuity of the chaos terms, uniform
//! Hölder moments, coupled convergence in law and the Littlewood-Hardy probe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{heat_evolve, InitialMeasure};
use crate::par::{map_indexed, ExecMode};
use crate::params::{ParamWindow, SpatialParam, TemporalParam, WindowKind};
use crate::quad::GaussLegendre;
use crate::spectral::bounds::littlewood_hardy_constant;
use crate::spectral::variance::{weighted_kernel_norm, SpectralWeight, VarianceConfig};
use crate::spectral::{build_grid, sample_noise, GridConfig, Simulator, TimeGrid};

/// Seeds and execution mode of a Monte Carlo run. Draw `i` uses seed
/// `base_seed + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub base_seed: u64,
    pub seeds: usize,
    #[serde(skip)]
    pub mode: ExecMode,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { base_seed: 0, seeds: 200, mode: ExecMode::Parallel }
    }
}

/// Grid and time discretization of the simulated field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: GridConfig,
    pub t_max: f64,
    pub time_steps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { grid: GridConfig::default(), t_max: 1.0, time_steps: 32 }
    }
}

fn same_family(a: &SpatialParam, b: &SpatialParam) -> bool {
    match (a, b) {
        (SpatialParam::Regular { d: d1, .. }, SpatialParam::Regular { d: d2, .. }) => d1 == d2,
        (SpatialParam::Rough { .. }, SpatialParam::Rough { .. }) => true,
        _ => false,
    }
}

fn check_sequence(target: &SpatialParam, seq: &[SpatialParam], temporal: &TemporalParam) -> Result<()> {
    target
        .ensure_admissible(temporal)
        .map_err(|e| Error::Domain(e.to_string()))?;
    for p in seq {
        if !same_family(p, target) {
            return Err(Error::Usage(format!("{p:?} is not in the family of {target:?}")));
        }
        p.ensure_admissible(temporal)
            .map_err(|e| Error::Domain(e.to_string()))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCurve {
    pub k: usize,
    pub target: SpatialParam,
    pub params: Vec<SpatialParam>,
    pub q: Vec<f64>,
}

impl ContinuityCurve {
    pub fn strictly_decreasing(&self) -> bool {
        self.q.windows(2).all(|w| w[1] < w[0])
    }

    /// Decreasing up to single steps whose relative rise is below `tol`.
    pub fn decreasing_within(&self, tol: f64) -> bool {
        self.q.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol))
    }
}

/// `Q_n = E|I_k^{p_n} - I_k^{p*}|^2` by deterministic quadrature of the
/// kernel against the squared weight difference.
pub fn l2_continuity_curve(
    k: usize,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    target: SpatialParam,
    seq: &[SpatialParam],
    temporal: &TemporalParam,
    cfg: &VarianceConfig,
) -> Result<ContinuityCurve> {
    check_sequence(&target, seq, temporal)?;
    let mut q = Vec::with_capacity(seq.len());
    for p in seq {
        let v = if *p == target {
            0.0
        } else {
            weighted_kernel_norm(k, &SpectralWeight::difference(*p, target), temporal, t, x, u0, cfg)?
        };
        q.push(v);
    }
    Ok(ContinuityCurve { k, target, params: seq.to_vec(), q })
}

/// `u_m = w + sum_{k <= m} I_k` for every parameter, indexed
/// `[param][time][point]`, on one draw.
fn solution_samples(
    sim: &Simulator,
    seed: u64,
    params: &[SpatialParam],
    m: usize,
    times: &[f64],
    xs: &[f64],
    w: &[Vec<f64>],
) -> Result<Vec<Vec<Vec<f64>>>> {
    let draw = sample_noise(sim.grid(), seed);
    let state = sim.prepare(&draw)?;
    let mut out = Vec::with_capacity(params.len());
    for p in params {
        let f = sim.evaluate(&state, p, m, times, xs)?;
        let vals = (0..times.len())
            .map(|ti| (0..xs.len()).map(|xi| w[ti][xi] + f.partial_sum(m, ti, xi)).collect())
            .collect();
        out.push(vals);
    }
    Ok(out)
}

fn heat_table(u0: &InitialMeasure, times: &[f64], xs: &[f64]) -> Result<Vec<Vec<f64>>> {
    times
        .iter()
        .map(|&t| xs.iter().map(|&x| Ok(heat_evolve(u0, t, &[x])?.w)).collect())
        .collect()
}

fn build_sim(sim: &SimConfig, temporal: &TemporalParam, u0: &InitialMeasure, m: usize) -> Result<Simulator> {
    let grid = build_grid(&sim.grid)?;
    let time = TimeGrid::new(sim.t_max, sim.time_steps)?;
    Simulator::new(&grid, temporal, time, u0, m as f64 * grid.xi.half_width)
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// 5% critical value of the two-sample statistic.
pub fn ks_critical_5pct(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    1.358 * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledSpec {
    pub m: usize,
    pub sequence: Vec<SpatialParam>,
    pub target: SpatialParam,
    pub t: f64,
    pub x: f64,
    pub sim: SimConfig,
    pub mc: McConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledRow {
    pub n: usize,
    pub param: SpatialParam,
    pub gap: f64,
    pub mean_square: f64,
    pub stderr: f64,
    /// Statistic between the coupled samples (same seeds).
    pub ks_coupled: f64,
    /// Statistic between disjoint seed blocks.
    pub ks_independent: f64,
    pub ks_critical: f64,
}

/// `E|u_m^{p_n} - u_m^{p*}|^2` on shared draws and the two-sample statistic
/// between the laws of `u_m^{p_n}(t, x)` and `u_m^{p*}(t, x)`.
pub fn coupled_distance(
    spec: &CoupledSpec,
    temporal: &TemporalParam,
    u0: &InitialMeasure,
) -> Result<Vec<CoupledRow>> {
    check_sequence(&spec.target, &spec.sequence, temporal)?;
    if spec.mc.seeds < 2 {
        return Err(Error::Usage("need at least two seeds".into()));
    }
    let sim = build_sim(&spec.sim, temporal, u0, spec.m)?;
    let w = heat_table(u0, &[spec.t], &[spec.x])?;
    let mut params = vec![spec.target];
    params.extend_from_slice(&spec.sequence);
    let n = spec.mc.seeds;
    // seeds 0..n are the coupled block, n..2n the independent block
    let samples: Vec<Result<Vec<f64>>> = map_indexed(spec.mc.mode, 2 * n, |i| {
        let s = solution_samples(&sim, spec.mc.base_seed + i as u64, &params, spec.m, &[spec.t], &[spec.x], &w)?;
        Ok(s.iter().map(|v| v[0][0]).collect())
    });
    let samples: Vec<Vec<f64>> = samples.into_iter().collect::<Result<_>>()?;
    let target_a: Vec<f64> = samples[..n].iter().map(|s| s[0]).collect();
    let rows = spec
        .sequence
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let a: Vec<f64> = samples[..n].iter().map(|s| s[j + 1]).collect();
            let b: Vec<f64> = samples[n..].iter().map(|s| s[j + 1]).collect();
            let sq: Vec<f64> = a.iter().zip(&target_a).map(|(x, y)| (x - y).powi(2)).collect();
            let (ms, se) = mean_se(&sq);
            CoupledRow {
                n: j,
                param: *p,
                gap: (p.value() - spec.target.value()).abs(),
                mean_square: ms,
                stderr: se,
                ks_coupled: ks_statistic(&a, &target_a),
                ks_independent: ks_statistic(&b, &target_a),
                ks_critical: ks_critical_5pct(n, n),
            }
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Time,
    Space,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderSpec {
    pub window: ParamWindow,
    /// Parameters sampled from the window.
    pub window_points: usize,
    pub p: f64,
    pub m: usize,
    /// Base time of the increments.
    pub t0: f64,
    /// Base points of the increments, all in the compact `K`.
    pub bases: Vec<f64>,
    /// Time increments in units of the time step.
    pub time_ladder: Vec<usize>,
    pub space_ladder: Vec<f64>,
    pub sim: SimConfig,
    pub mc: McConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementMoment {
    pub h: f64,
    /// `(E|u(h) - u(0)|^p)^{1/p}`
    pub norm: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub direction: Direction,
    pub p: f64,
    pub params: Vec<f64>,
    pub exponents: Vec<f64>,
    pub constants: Vec<f64>,
    pub moments: Vec<Vec<IncrementMoment>>,
    /// Some increment moment has stderr above 20% of its value.
    pub inconclusive: bool,
}

impl HolderFit {
    pub fn sup_constant(&self) -> f64 {
        self.constants.iter().copied().fold(0.0, f64::max)
    }

    /// `max / min` of the fitted constants over the window.
    pub fn constant_spread(&self) -> f64 {
        let min = self.constants.iter().copied().fold(f64::INFINITY, f64::min);
        self.sup_constant() / min
    }

    pub fn min_exponent(&self) -> f64 {
        self.exponents.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Theorem exponents `(time, space)` of the uniform increment bounds on a window:
/// `((1 - beta)/2, 1 - beta)` for regular noise, `(theta/2, theta)` for rough
/// noise with `theta` at the middle of `(0, 2 H0 (1 - c0) + a - 1)`.
pub fn holder_targets(window: &ParamWindow, temporal: &TemporalParam, beta: f64, c0: f64) -> Result<(f64, f64)> {
    match window.kind {
        WindowKind::Regular { d } => {
            let lo = (d as f64 - window.a) / 2.0;
            if !(beta > lo && beta < 1.0) {
                return Err(Error::Domain(format!("beta = {beta} must lie in ({lo}, 1)")));
            }
            Ok(((1.0 - beta) / 2.0, 1.0 - beta))
        }
        WindowKind::Rough => {
            let h0 = temporal.h0;
            let hi = (2.0 * h0 + window.a - 1.0) / (2.0 * h0);
            if !(c0 > 0.0 && c0 < hi) {
                return Err(Error::Domain(format!("c0 = {c0} must lie in (0, {hi})")));
            }
            let theta = 0.5 * (2.0 * h0 * (1.0 - c0) + window.a - 1.0);
            Ok((theta / 2.0, theta))
        }
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn moment_of(samples: &[f64], p: f64, h: f64) -> IncrementMoment {
    let (m, se) = mean_se(samples);
    if m == 0.0 {
        return IncrementMoment { h, norm: 0.0, stderr: 0.0 };
    }
    let norm = m.powf(1.0 / p);
    IncrementMoment { h, norm, stderr: norm / (p * m) * se }
}

/// Increment moments of `u_m` in time and space over the window, with
/// log-log fits of the exponent and constant per parameter.
pub fn holder_sweep(
    spec: &HolderSpec,
    temporal: &TemporalParam,
    u0: &InitialMeasure,
) -> Result<(HolderFit, HolderFit)> {
    if !(spec.p >= 2.0) {
        return Err(Error::Usage(format!("moment order p = {} must be at least 2", spec.p)));
    }
    if spec.time_ladder.len() < 2 || spec.space_ladder.len() < 2 || spec.bases.is_empty() {
        return Err(Error::Usage("need two increments per direction and a base point".into()));
    }
    let tg = TimeGrid::new(spec.sim.t_max, spec.sim.time_steps)?;
    let i0 = tg.index_of(spec.t0)?;
    if i0 == 0 {
        return Err(Error::Usage("t0 must be positive".into()));
    }
    let last = i0 + spec.time_ladder.iter().copied().max().unwrap_or(0);
    if last > tg.steps {
        return Err(Error::Usage(format!(
            "time increments reach beyond T = {}",
            spec.sim.t_max
        )));
    }
    let params: Vec<SpatialParam> = spec
        .window
        .grid(spec.window_points)
        .into_iter()
        .map(|v| spec.window.param(v))
        .collect();
    for p in &params {
        p.ensure_admissible(temporal)?;
    }
    let sim = build_sim(&spec.sim, temporal, u0, spec.m)?;
    let mut times = vec![spec.t0];
    times.extend(spec.time_ladder.iter().map(|&j| (i0 + j) as f64 * tg.step()));
    let mut xs = spec.bases.clone();
    for &b in &spec.bases {
        xs.extend(spec.space_ladder.iter().map(|&h| b + h));
    }
    let w = heat_table(u0, &times, &xs)?;
    let nb = spec.bases.len();
    let (nt, ns) = (spec.time_ladder.len(), spec.space_ladder.len());
    let p = spec.p;
    // per seed: [param][time rung or space rung] averaged over bases
    let per_seed: Vec<Result<Vec<Vec<f64>>>> = map_indexed(spec.mc.mode, spec.mc.seeds, |i| {
        let s = solution_samples(&sim, spec.mc.base_seed + i as u64, &params, spec.m, &times, &xs, &w)?;
        Ok(s.iter()
            .map(|u| {
                let mut row = Vec::with_capacity(nt + ns);
                for j in 0..nt {
                    let v: f64 = (0..nb).map(|b| (u[j + 1][b] - u[0][b]).abs().powf(p)).sum();
                    row.push(v / nb as f64);
                }
                for j in 0..ns {
                    let v: f64 = (0..nb)
                        .map(|b| (u[0][nb + b * ns + j] - u[0][b]).abs().powf(p))
                        .sum();
                    row.push(v / nb as f64);
                }
                row
            })
            .collect())
    });
    let per_seed: Vec<Vec<Vec<f64>>> = per_seed.into_iter().collect::<Result<_>>()?;
    let step = tg.step();
    let mut fits = Vec::new();
    for (dir, offset, hs) in [
        (Direction::Time, 0usize, spec.time_ladder.iter().map(|&j| j as f64 * step).collect::<Vec<_>>()),
        (Direction::Space, nt, spec.space_ladder.iter().map(|h| h.abs()).collect()),
    ] {
        let mut fit = HolderFit {
            direction: dir,
            p,
            params: params.iter().map(|q| q.value()).collect(),
            exponents: Vec::new(),
            constants: Vec::new(),
            moments: Vec::new(),
            inconclusive: false,
        };
        for pi in 0..params.len() {
            let mut moments = Vec::with_capacity(hs.len());
            for (j, &h) in hs.iter().enumerate() {
                let col: Vec<f64> = per_seed.iter().map(|s| s[pi][offset + j]).collect();
                let mo = moment_of(&col, p, h);
                if !(mo.stderr <= 0.2 * mo.norm) {
                    fit.inconclusive = true;
                }
                moments.push(mo);
            }
            let lx: Vec<f64> = moments.iter().map(|m| m.h.ln()).collect();
            let ly: Vec<f64> = moments.iter().map(|m| m.norm.ln()).collect();
            let (slope, icpt) = fit_line(&lx, &ly);
            if !slope.is_finite() {
                return Err(Error::numerical("holder_sweep", "non-finite fitted exponent"));
            }
            fit.exponents.push(slope);
            fit.constants.push(icpt.exp());
            fit.moments.push(moments);
        }
        fits.push(fit);
    }
    let space = fits.pop().expect("two fits");
    let time = fits.pop().expect("two fits");
    Ok((time, space))
}

/// Test function on the simplex `T_k(1)` (zero outside).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestFunction {
    /// Indicator of `[lo, hi]^k` intersected with the simplex.
    Indicator { lo: f64, hi: f64, scale: f64 },
    /// `scale * prod t_j^{powers_j}` on the simplex.
    Monomial { powers: Vec<f64>, scale: f64 },
}

impl TestFunction {
    fn eval(&self, ts: &[f64]) -> f64 {
        if ts.windows(2).any(|w| w[1] < w[0]) {
            return 0.0;
        }
        match self {
            TestFunction::Indicator { lo, hi, scale } => {
                if ts.iter().all(|t| lo <= t && t <= hi) {
                    *scale
                } else {
                    0.0
                }
            }
            TestFunction::Monomial { powers, scale } => {
                scale * ts.iter().zip(powers).map(|(t, p)| t.powf(*p)).product::<f64>()
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::Indicator { lo, hi, .. } => format!("indicator[{lo},{hi}]"),
            TestFunction::Monomial { powers, .. } => {
                let p: Vec<String> = powers.iter().map(|p| p.to_string()).collect();
                format!("monomial[{}]", p.join(","))
            }
        }
    }
}

/// Indicators on dyadic intervals and monomials up to `level`.
pub fn test_family(k: usize, level: usize) -> Vec<TestFunction> {
    let mut out = Vec::new();
    for l in 0..=level {
        let parts = 1usize << l;
        for i in 0..parts {
            out.push(TestFunction::Indicator {
                lo: i as f64 / parts as f64,
                hi: (i + 1) as f64 / parts as f64,
                scale: 1.0,
            });
        }
    }
    for deg in 0..=level {
        for j in 0..k {
            let mut powers = vec![0.0; k];
            powers[j] = deg as f64;
            out.push(TestFunction::Monomial { powers, scale: 1.0 });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhRatio {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhProbe {
    pub k: usize,
    pub ratios: Vec<LhRatio>,
    pub max_ratio: f64,
    /// `b^k` with the sharp Hardy-Littlewood-Sobolev value of `b`.
    pub envelope: f64,
}

/// Both sides of the fractional Littlewood-Hardy inequality for each test
/// function, on `cells` uniform cells per axis of `[0, 1]`.
pub fn lh_ratio_probe(
    k: usize,
    temporal: &TemporalParam,
    family: &[TestFunction],
    cells: usize,
) -> Result<LhProbe> {
    if !(1..=2).contains(&k) {
        return Err(Error::Capacity(format!("probe supports k <= 2, got {k}")));
    }
    TemporalParam::new(temporal.h0)?;
    if cells < 4 {
        return Err(Error::Usage("need at least 4 cells".into()));
    }
    let h0 = temporal.h0;
    let m = cells;
    let dx = 1.0 / m as f64;
    let edges: Vec<f64> = (0..=m).map(|i| i as f64 * dx).collect();
    let p2 = 2.0 * h0;
    let f = |u: f64, v: f64| (u - v).abs().powf(p2);
    let mut w = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            let (a0, a1, b0, b1) = (edges[a], edges[a + 1], edges[b], edges[b + 1]);
            w[a * m + b] = 0.5 * (f(a1, b0) + f(a0, b1) - f(a1, b1) - f(a0, b0));
        }
    }
    let gl = GaussLegendre::new(6);
    let q = 1.0 / h0;
    let mut ratios = Vec::with_capacity(family.len());
    for phi in family {
        if let TestFunction::Monomial { powers, .. } = phi {
            if powers.len() != k {
                return Err(Error::Usage("monomial powers must have length k".into()));
            }
        }
        // cell averages and the L^{1/H0} integral
        let (lhs, int_q) = if k == 1 {
            let mut avg = vec![0.0; m];
            let mut iq = 0.0;
            for a in 0..m {
                for (t, wt) in gl.on(edges[a], edges[a + 1]) {
                    let v = phi.eval(&[t]);
                    avg[a] += wt * v / dx;
                    iq += wt * v.abs().powf(q);
                }
            }
            let mut l = 0.0;
            for a in 0..m {
                for b in 0..m {
                    l += w[a * m + b] * avg[a] * avg[b];
                }
            }
            (l, iq)
        } else {
            let mut avg = vec![0.0; m * m];
            let mut iq = 0.0;
            for a in 0..m {
                for b in a..m {
                    for (t1, w1) in gl.on(edges[a], edges[a + 1]) {
                        for (t2, w2) in gl.on(edges[b], edges[b + 1]) {
                            let v = phi.eval(&[t1, t2]);
                            avg[a * m + b] += w1 * w2 * v / (dx * dx);
                            iq += w1 * w2 * v.abs().powf(q);
                        }
                    }
                }
            }
            // sum_{abcd} F_ab W_ac W_bd F_cd
            let mut g = vec![0.0; m * m];
            for a in 0..m {
                for d in 0..m {
                    let mut acc = 0.0;
                    for b in 0..m {
                        acc += avg[a * m + b] * w[b * m + d];
                    }
                    g[a * m + d] = acc;
                }
            }
            let mut l = 0.0;
            for c in 0..m {
                for d in 0..m {
                    let mut acc = 0.0;
                    for a in 0..m {
                        acc += w[a * m + c] * g[a * m + d];
                    }
                    l += acc * avg[c * m + d];
                }
            }
            (l, iq)
        };
        let rhs = int_q.powf(2.0 * h0);
        ratios.push(LhRatio {
            label: phi.label(),
            lhs,
            rhs,
            ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        });
    }
    let max_ratio = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(LhProbe {
        k,
        ratios,
        max_ratio,
        envelope: littlewood_hardy_constant(temporal).powi(k as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_identical_samples_is_zero() {
        let a = vec![0.3, 0.1, 0.2, 0.5];
        assert_eq!(ks_statistic(&a, &a), 0.0);
        let b = vec![10.0, 11.0, 12.0, 13.0];
        assert_eq!(ks_statistic(&a, &b), 1.0);
    }

    #[test]
    fn ks_critical_for_thousand() {
        let c = ks_critical_5pct(1000, 1000);
        assert!((c - 0.060_73).abs() < 1e-4);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 1.0).collect();
        let (s, i) = fit_line(&x, &y);
        assert!((s - 0.5).abs() < 1e-14 && (i + 1.0).abs() < 1e-14);
    }

    #[test]
    fn indicator_of_unit_interval() {
        let tp = TemporalParam { h0: 0.75 };
        let fam = [TestFunction::Indicator { lo: 0.0, hi: 1.0, scale: 1.0 }];
        let r = lh_ratio_probe(1, &tp, &fam, 32).unwrap();
        assert!((r.ratios[0].lhs - 1.0).abs() < 1e-12);
        assert!((r.ratios[0].rhs - 1.0).abs() < 1e-12);
    }
}
