//! Deterministic second moments of the chaos terms, in the time-covariance form
//!
//! ```text
//! E|I_k|^2 = k! int m(xi) int_{[0,t]^{2k}} prod_j gamma0(t_j - s_j)
//!            F f~(t; xi) conj(F f~(s; xi)) dt ds dxi,
//! ```
//!
//! where `m` is the spectral density (or any other even weight, which is how
//! the parameter-difference norms are obtained).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{kernel_1d, kernel_1d_pair};
use crate::measure::InitialMeasure;
use crate::params::{fractional_constant_unchecked, SpatialParam, TemporalParam};
use crate::quad::{self, GaussLegendre};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceConfig {
    /// Relative tolerance of the nested adaptive rule used at k = 1.
    pub rel_tol: f64,
    /// Time cells per axis for k = 2.
    pub cells: usize,
    /// Grading exponent of the k = 2 time cells toward both ends of `[0, t]`.
    pub grading: f64,
    /// Gauss-Legendre nodes per frequency panel for k = 2.
    pub panel_nodes: usize,
    /// Combine `cells` and `2 cells` assuming a first-order cell error.
    pub extrapolate: bool,
}

impl Default for VarianceConfig {
    fn default() -> Self {
        VarianceConfig {
            rel_tol: 1e-6,
            cells: 24,
            grading: 2.0,
            panel_nodes: 12,
            extrapolate: true,
        }
    }
}

/// Even spectral weight on `(xi_1, .., xi_k)` together with the power
/// `p > -1` of its behaviour at `xi_j -> 0` in each coordinate.
pub struct SpectralWeight<'a> {
    pub density: Box<dyn Fn(&[f64]) -> f64 + Sync + 'a>,
    pub power: f64,
}

impl<'a> SpectralWeight<'a> {
    /// Product of the spectral densities of `param`.
    pub fn of_param(param: SpatialParam) -> Self {
        let (p, c) = match param {
            SpatialParam::Regular { alpha, .. } => (-alpha, 1.0),
            SpatialParam::Rough { h } => (1.0 - 2.0 * h, fractional_constant_unchecked(h)),
        };
        SpectralWeight {
            density: Box::new(move |xs: &[f64]| xs.iter().map(|x| c * x.abs().powf(p)).product()),
            power: p,
        }
    }

    /// `(prod sqrt(m_a) - prod sqrt(m_b))^2`, the weight of `I_k^a - I_k^b`
    /// on a shared noise.
    pub fn difference(a: SpatialParam, b: SpatialParam) -> Self {
        let wa = SpectralWeight::of_param(a);
        let wb = SpectralWeight::of_param(b);
        let power = wa.power.min(wb.power);
        SpectralWeight {
            density: Box::new(move |xs: &[f64]| {
                let d = (wa.density)(xs).sqrt() - (wb.density)(xs).sqrt();
                d * d
            }),
            power,
        }
    }
}

fn check(k: usize, temporal: &TemporalParam, t: f64, u0: &InitialMeasure) -> Result<()> {
    if !(1..=2).contains(&k) {
        return Err(Error::Capacity(format!("deterministic variance supports k <= 2, got {k}")));
    }
    if u0.dim() != 1 {
        return Err(Error::Usage("deterministic variance is implemented for d = 1".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    TemporalParam::new(temporal.h0)?;
    Ok(())
}

/// `E|I_k(t, x)|^2` for `k <= 2`.
pub fn chaos_variance(
    k: usize,
    param: &SpatialParam,
    temporal: &TemporalParam,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    cfg: &VarianceConfig,
) -> Result<f64> {
    param.ensure_admissible(temporal)?;
    if param.dim() != 1 {
        return Err(Error::Usage("deterministic variance is implemented for d = 1".into()));
    }
    weighted_kernel_norm(k, &SpectralWeight::of_param(*param), temporal, t, x, u0, cfg)
}

/// `k! int weight(xi) |F f~_{t,x,k}(., xi)|^2_{time} dxi` for `k <= 2`.
pub fn weighted_kernel_norm(
    k: usize,
    weight: &SpectralWeight<'_>,
    temporal: &TemporalParam,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    cfg: &VarianceConfig,
) -> Result<f64> {
    check(k, temporal, t, u0)?;
    let v = if k == 1 {
        first_order_adaptive(weight, temporal, t, x, u0, cfg.rel_tol)?
    } else if cfg.extrapolate {
        let coarse = cell_rule(2, weight, temporal, t, x, u0, cfg)?;
        let fine_cfg = VarianceConfig { cells: 2 * cfg.cells, ..cfg.clone() };
        let fine = cell_rule(2, weight, temporal, t, x, u0, &fine_cfg)?;
        2.0 * fine - coarse
    } else {
        cell_rule(2, weight, temporal, t, x, u0, cfg)?
    };
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::numerical("chaos_variance", format!("invalid second moment {v}")));
    }
    Ok(v)
}

/// k = 1 by nested adaptive quadrature. For each frequency the time double
/// integral is folded onto `b < a` and the singular factor `(a - b)^{2H0 - 2}`
/// is removed by the substitution `w = (a - b)^{2H0 - 1}`.
fn first_order_adaptive(
    weight: &SpectralWeight<'_>,
    temporal: &TemporalParam,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    tol: f64,
) -> Result<f64> {
    let h0 = temporal.h0;
    let alpha_h0 = h0 * (2.0 * h0 - 1.0);
    let e = 2.0 * h0 - 1.0;
    let inv = 1.0 / e;
    let floor = 1e-3 * tol * crate::measure::heat_evolve(u0, t, &[x])?.w_plus;
    let mut failure: Option<Error> = None;
    let time_form = |xi: f64, failure: &mut Option<Error>| -> f64 {
        let phi = |a: f64| kernel_1d(t, x, &[a], &[xi], u0);
        // the kernel concentrates within 1/xi^2 of the endpoints; |phi| <= w_plus
        // gives absolute floors for pieces far below the total
        let scale = 1.0 / (xi * xi).max(1e-300);
        let mut run = || -> Result<Complex64> {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a0, a1) in end_graded_pieces(t, scale) {
                acc += quad::adaptive(
                    |a: f64| {
                        // nodes rounded onto an endpoint carry no mass
                        if a <= 0.0 || a >= t {
                            return Complex64::new(0.0, 0.0);
                        }
                        let mut inner = Complex64::new(0.0, 0.0);
                        for (b0, b1) in end_graded_pieces(a, scale) {
                            let piece = quad::adaptive(
                                |w: f64| {
                                    let b = a - w.powf(inv);
                                    if b <= 0.0 || b >= a {
                                        return Complex64::new(0.0, 0.0);
                                    }
                                    phi(b).conj()
                                },
                                (a - b1).max(0.0).powf(e),
                                (a - b0).powf(e),
                                floor * a.powf(e),
                                tol * 0.1,
                            );
                            match piece {
                                Ok(v) => inner += v,
                                Err(err) => {
                                    *failure = Some(err);
                                    return Complex64::new(0.0, 0.0);
                                }
                            }
                        }
                        phi(a) * inner * inv
                    },
                    a0,
                    a1,
                    floor * floor * t.powf(e + 1.0) * inv,
                    tol * 0.3,
                )?;
            }
            Ok(acc)
        };
        match run() {
            Ok(v) => 2.0 * alpha_h0 * v.re,
            Err(err) => {
                *failure = Some(err);
                0.0
            }
        }
    };
    let p = weight.power;
    let total = quad::power_weighted_half_line(
        |xi: f64| {
            let m = (weight.density)(&[xi]) / xi.powf(p);
            if m == 0.0 {
                return 0.0;
            }
            m * time_form(xi, &mut failure)
        },
        p,
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(2.0 * total)
}

/// Pieces of `[0, t]` with lengths growing geometrically from `scale` away
/// from both endpoints.
fn end_graded_pieces(t: f64, scale: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * t;
    let mut left = vec![0.0];
    let mut h = scale;
    while h < half {
        left.push(h);
        h *= 4.0;
    }
    left.push(half);
    let mut pts = left.clone();
    pts.extend(left.iter().rev().skip(1).map(|p| t - p));
    pts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect()
}

/// Cells `[c_i, c_{i+1}]` of `[0, t]` graded toward both ends.
fn graded_cells(t: f64, m: usize, q: f64) -> Vec<f64> {
    (0..=m)
        .map(|i| {
            let s = i as f64 / m as f64;
            let a = s.powf(q);
            let b = (1.0 - s).powf(q);
            t * a / (a + b)
        })
        .collect()
}

/// `int_{cell a} int_{cell b} alpha_{H0} |u - v|^{2H0 - 2} du dv`.
fn cell_weights(edges: &[f64], h0: f64) -> Vec<f64> {
    let m = edges.len() - 1;
    let p = 2.0 * h0;
    let f = |u: f64, v: f64| (u - v).abs().powf(p);
    let mut w = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            let (a0, a1, b0, b1) = (edges[a], edges[a + 1], edges[b], edges[b + 1]);
            w[a * m + b] = 0.5 * (f(a1, b0) + f(a0, b1) - f(a1, b1) - f(a0, b0));
        }
    }
    w
}

/// Frequency nodes on `(0, inf)` for a weight behaving like `xi^p` at 0:
/// `[0, 1]` in the variable `u = xi^{p+1}`, then doubling panels to `xi_max`.
fn half_line_nodes(p: f64, xi_max: f64, per_panel: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(per_panel);
    let mut out = Vec::new();
    let q = p + 1.0;
    for (u, w) in gl.on(0.0, 1.0) {
        let xi = u.powf(1.0 / q);
        // d xi = xi^{-p} du / q, the xi^p factor is part of the density
        out.push((xi, w / q * xi.powf(-p)));
    }
    let mut lo = 1.0;
    while lo < xi_max {
        let hi = (2.0 * lo).min(xi_max);
        out.extend(gl.on(lo, hi));
        lo = hi;
    }
    out
}

/// `(1 - e^{-z}) / z`
fn phi1(z: f64) -> f64 {
    if z < 1e-4 {
        1.0 - z / 2.0 + z * z / 6.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// `(z - 1 + e^{-z}) / z^2`
fn phi2(z: f64) -> f64 {
    if z < 1e-3 {
        0.5 - z / 6.0 + z * z / 24.0
    } else {
        (z + (-z).exp_m1()) / (z * z)
    }
}

/// Cell averages of the symmetrized order-2 kernel. The fast factor
/// `exp(-rate (t2 - t1))` is averaged exactly; the rest is taken at the
/// cell midpoints.
#[allow(clippy::too_many_arguments)]
fn fill_pair_cells(
    fm: &mut [Complex64],
    mids: &[f64],
    edges: &[f64],
    widths: &[f64],
    t: f64,
    x: f64,
    (x1, x2): (f64, f64),
    u0: &InitialMeasure,
) {
    let m = mids.len();
    for a in 0..m {
        for b in 0..m {
            let v = if a == b {
                let ta = mids[a];
                let (s12, r12) = kernel_1d_pair(t, x, (ta, ta), (x1, x2), u0);
                let (s21, r21) = kernel_1d_pair(t, x, (ta, ta), (x2, x1), u0);
                0.5 * (s12 * phi2(r12 * widths[a]) + s21 * phi2(r21 * widths[a]))
            } else {
                let (lo, hi, f) = if a < b { (a, b, (x1, x2)) } else { (b, a, (x2, x1)) };
                let (slow, rate) = kernel_1d_pair(t, x, (mids[lo], mids[hi]), f, u0);
                let gap = edges[hi] - edges[lo + 1];
                let avg = (-rate * gap).exp() * phi1(rate * widths[lo]) * phi1(rate * widths[hi]);
                0.5 * slow * avg
            };
            fm[a * m + b] = v;
        }
    }
}

/// Nodes in `eta = xi_1 + xi_2` for fixed `xi_1`: panels doubling away from
/// `eta = 0`, with the panel holding `eta = xi_1` (where `xi_2 = 0`) split
/// there and mapped by `|eta - xi_1|^{p+1}`.
fn ridge_nodes(x1: f64, p: f64, eta_max: f64, per_panel: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(per_panel);
    let mut bounds = vec![0.0, 0.5];
    while *bounds.last().unwrap() < eta_max {
        let next = (2.0 * bounds.last().unwrap()).min(eta_max);
        bounds.push(next);
    }
    let mut panels: Vec<(f64, f64)> = Vec::new();
    for w in bounds.windows(2) {
        panels.push((w[0], w[1]));
        panels.push((-w[1], -w[0]));
    }
    let q = p + 1.0;
    let mut out = Vec::new();
    for (lo, hi) in panels {
        if lo < x1 && x1 < hi {
            for (end, len) in [(lo, x1 - lo), (hi, hi - x1)] {
                let sign = if end < x1 { -1.0 } else { 1.0 };
                let umax = len.powf(q);
                for (u, w) in gl.on(0.0, umax) {
                    let r = u.powf(1.0 / q);
                    // d eta = r^{-p} du / q; the |xi_2|^p factor sits in the density
                    out.push((x1 + sign * r, w / q * r.powf(-p)));
                }
            }
        } else {
            out.extend(gl.on(lo, hi));
        }
    }
    out
}

/// Cell rule: the symmetrized kernel is sampled at cell midpoints and paired
/// with exact cell integrals of the time covariance.
pub(crate) fn cell_rule(
    k: usize,
    weight: &SpectralWeight<'_>,
    temporal: &TemporalParam,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    cfg: &VarianceConfig,
) -> Result<f64> {
    let m = cfg.cells;
    if m < 4 {
        return Err(Error::Usage("need at least 4 time cells".into()));
    }
    let edges = graded_cells(t, m, cfg.grading);
    let mids: Vec<f64> = edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect();
    let w = cell_weights(&edges, temporal.h0);
    let min_cell = edges.windows(2).map(|e| e[1] - e[0]).fold(f64::INFINITY, f64::min);
    let xi_max = (8.0 / min_cell).sqrt();
    let half = half_line_nodes(weight.power, xi_max, cfg.panel_nodes);
    let total = match k {
        1 => {
            let mut s = 0.0;
            for &(xi, wx) in &half {
                let dens = (weight.density)(&[xi]);
                if dens == 0.0 {
                    continue;
                }
                let f: Vec<Complex64> = mids.iter().map(|&a| kernel_1d(t, x, &[a], &[xi], u0)).collect();
                let mut q = 0.0;
                for a in 0..m {
                    let mut row = Complex64::new(0.0, 0.0);
                    for b in 0..m {
                        row += w[a * m + b] * f[b].conj();
                    }
                    q += (f[a] * row).re;
                }
                s += 2.0 * wx * dens * q;
            }
            s
        }
        2 => {
            let widths: Vec<f64> = edges.windows(2).map(|e| e[1] - e[0]).collect();
            let xi1_nodes = half_line_nodes(weight.power, xi_max, cfg.panel_nodes);
            let mut s = 0.0;
            let mut fm = vec![Complex64::new(0.0, 0.0); m * m];
            let mut g = vec![Complex64::new(0.0, 0.0); m * m];
            for &(x1, w1) in &xi1_nodes {
                for (eta, w2) in ridge_nodes(x1, weight.power, xi_max, cfg.panel_nodes) {
                    let x2 = eta - x1;
                    let dens = (weight.density)(&[x1, x2]);
                    if dens == 0.0 {
                        continue;
                    }
                    fill_pair_cells(&mut fm, &mids, &edges, &widths, t, x, (x1, x2), u0);
                    // g = W F
                    for a in 0..m {
                        for b in 0..m {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for c in 0..m {
                                acc += w[a * m + c] * fm[c * m + b];
                            }
                            g[a * m + b] = acc;
                        }
                    }
                    // sum_ab F_ab conj((W F W)_ab)
                    let mut q = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for d in 0..m {
                                acc += g[a * m + d] * w[d * m + b];
                            }
                            q += (fm[a * m + b] * acc.conj()).re;
                        }
                    }
                    s += 2.0 * w1 * w2 * dens * q;
                }
            }
            2.0 * s
        }
        _ => unreachable!("checked by caller"),
    };
    Ok(total)
}

/// k = 1 second moment by the cell rule, for cross-checking the adaptive one.
pub fn first_order_cell_rule(
    param: &SpatialParam,
    temporal: &TemporalParam,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    cfg: &VarianceConfig,
) -> Result<f64> {
    check(1, temporal, t, u0)?;
    cell_rule(1, &SpectralWeight::of_param(*param), temporal, t, x, u0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_weights_sum_to_double_integral() {
        let edges = graded_cells(1.0, 16, 2.0);
        let w = cell_weights(&edges, 0.75);
        let s: f64 = w.iter().sum();
        // int_0^1 int_0^1 alpha |u - v|^{2H - 2} = 1
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_high_order() {
        let u = InitialMeasure::lebesgue(1, 1.0);
        let tp = TemporalParam { h0: 0.75 };
        let sp = SpatialParam::Regular { d: 1, alpha: 0.5 };
        let e = chaos_variance(3, &sp, &tp, 1.0, 0.0, &u, &VarianceConfig::default());
        assert!(matches!(e, Err(Error::Capacity(_))));
    }
}
