//! Spectral weights and the temporal Fourier transform of the chaos kernel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{fourier_chaos_kernel, OrderedTimes};
use crate::measure::InitialMeasure;
use crate::params::{fractional_constant_unchecked, SpatialParam, TemporalParam};
use crate::quad::GaussLegendre;

/// Temporal factor `sqrt(c_{H0}) |tau|^{(1 - 2 H0)/2}`.
pub fn temporal_weight(temporal: &TemporalParam, tau: f64) -> f64 {
    let h0 = temporal.h0;
    fractional_constant_unchecked(h0).sqrt() * tau.abs().powf((1.0 - 2.0 * h0) / 2.0)
}

/// Spatial factor: `|xi|^{-alpha/2}` (regular) or `sqrt(c_H) |xi|^{(1 - 2H)/2}` (rough).
pub fn spatial_weight(param: &SpatialParam, r: f64) -> f64 {
    match *param {
        SpatialParam::Regular { alpha, .. } => r.powf(-alpha / 2.0),
        SpatialParam::Rough { h } => fractional_constant_unchecked(h).sqrt() * r.powf(0.5 - h),
    }
}

fn power_cell_average(p: f64, lo: f64, hi: f64) -> f64 {
    let (a, b) = if hi <= 0.0 { (-hi, -lo) } else { (lo.max(0.0), hi) };
    (b.powf(p + 1.0) - a.powf(p + 1.0)) / ((p + 1.0) * (b - a))
}

/// Square root of the average of `c_{H0} |tau|^{1 - 2 H0}` over `[lo, hi]`
/// (a cell not straddling 0).
pub fn cell_temporal_weight(temporal: &TemporalParam, lo: f64, hi: f64) -> f64 {
    let h0 = temporal.h0;
    (fractional_constant_unchecked(h0) * power_cell_average(1.0 - 2.0 * h0, lo, hi)).sqrt()
}

/// Square root of the average of the spatial spectral density over `[lo, hi]`.
pub fn cell_spatial_weight(param: &SpatialParam, lo: f64, hi: f64) -> f64 {
    match *param {
        SpatialParam::Regular { alpha, .. } => power_cell_average(-alpha, lo, hi).sqrt(),
        SpatialParam::Rough { h } => {
            (fractional_constant_unchecked(h) * power_cell_average(1.0 - 2.0 * h, lo, hi)).sqrt()
        }
    }
}

/// Product of the temporal and spatial weights of one noise factor.
pub fn spectral_weights(
    param: &SpatialParam,
    temporal: &TemporalParam,
    tau: f64,
    xi: &[f64],
) -> Result<f64> {
    let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    if tau == 0.0 || r == 0.0 {
        return Err(Error::Domain("spectral weights are singular at zero frequency".into()));
    }
    if xi.len() != param.dim() {
        return Err(Error::Usage(format!("xi must have dimension {}", param.dim())));
    }
    Ok(temporal_weight(temporal, tau) * spatial_weight(param, r))
}

/// Quadrature over the ordered simplex `T_k(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeRule {
    /// Ordered midpoint nodes `r_{n_1} < ... < r_{n_k}` of a uniform grid with
    /// `steps` cells, each tuple weighted `h^k`. This is the rule the
    /// simulation engine uses.
    Midpoint { steps: usize },
    /// Tensor Gauss-Legendre in collapsed coordinates
    /// `t_j = t u_j u_{j+1} ... u_k`, `nodes` points per axis.
    Gauss { nodes: usize },
}

/// Calls `f(times, weight)` for every node of the rule on `T_k(t)`.
pub fn for_each_simplex_node<F: FnMut(&[f64], f64)>(rule: TimeRule, k: usize, t: f64, mut f: F) {
    match rule {
        TimeRule::Midpoint { steps } => {
            let h = t / steps as f64;
            let w = h.powi(k as i32);
            let mut idx = vec![0usize; k];
            let mut times = vec![0.0; k];
            fn rec<F: FnMut(&[f64], f64)>(
                level: usize,
                start: usize,
                steps: usize,
                h: f64,
                w: f64,
                idx: &mut [usize],
                times: &mut [f64],
                f: &mut F,
            ) {
                let k = idx.len();
                if level == k {
                    f(times, w);
                    return;
                }
                // leave room for the remaining strictly larger indices
                for n in start..steps - (k - 1 - level) {
                    idx[level] = n;
                    times[level] = (n as f64 + 0.5) * h;
                    rec(level + 1, n + 1, steps, h, w, idx, times, f);
                }
            }
            if steps >= k {
                rec(0, 0, steps, h, w, &mut idx, &mut times, &mut f);
            }
        }
        TimeRule::Gauss { nodes } => {
            let gl = GaussLegendre::new(nodes);
            let pts: Vec<(f64, f64)> = gl.on(0.0, 1.0).collect();
            let mut counter = vec![0usize; k];
            let mut times = vec![0.0; k];
            loop {
                let mut prod = t;
                let mut jac = t.powi(k as i32);
                for j in (0..k).rev() {
                    let (u, wu) = pts[counter[j]];
                    prod *= u;
                    times[j] = prod;
                    jac *= wu * u.powi(j as i32);
                }
                f(&times, jac);
                let mut j = 0;
                loop {
                    if j == k {
                        return;
                    }
                    counter[j] += 1;
                    if counter[j] < nodes {
                        break;
                    }
                    counter[j] = 0;
                    j += 1;
                }
            }
        }
    }
}

/// `int_{T_k(t)} e^{-i sum_j tau_j t_j} F f_{t,x,k}(t_1..t_k; xi_1..xi_k) dt`
/// by the chosen simplex rule.
#[allow(clippy::too_many_arguments)]
pub fn time_fourier_of_kernel(
    t: f64,
    x: &[f64],
    xis: &[Vec<f64>],
    taus: &[f64],
    u0: &InitialMeasure,
    rule: TimeRule,
    k_max: usize,
) -> Result<Complex64> {
    let k = xis.len();
    if k == 0 {
        return Err(Error::Usage("order must be at least 1".into()));
    }
    if k > k_max {
        return Err(Error::Capacity(format!("order {k} exceeds K_max = {k_max}")));
    }
    if taus.len() != k {
        return Err(Error::Usage("taus and xis differ in length".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = None;
    for_each_simplex_node(rule, k, t, |times, w| {
        if err.is_some() {
            return;
        }
        let ord = match OrderedTimes::new(t, times.to_vec()) {
            Ok(o) => o,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        match fourier_chaos_kernel(x, &ord, xis, u0) {
            Ok(ev) => {
                let phase: f64 = -taus.iter().zip(times).map(|(a, b)| a * b).sum::<f64>();
                acc += w * Complex64::from_polar(1.0, phase) * ev.value;
            }
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}
