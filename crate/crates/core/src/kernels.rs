//! Heat kernel, chaos kernels and their spatial Fourier transforms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measure::{heat_evolve, oscillatory_heat_integral, InitialMeasure};
use crate::params::{riesz_constants, SpatialParam};
use crate::quad;
use crate::special::gamma;

/// `G_t(x) = (2 pi t)^{-d/2} exp(-|x|^2 / 2t)` for `t > 0`, zero otherwise.
pub fn heat_kernel(t: f64, x: &[f64]) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let d = x.len() as f64;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (2.0 * PI * t).powf(-d / 2.0) * (-r2 / (2.0 * t)).exp()
}

/// `e^{-t |xi|^2 / 2}` for `t >= 0`, zero for `t < 0`.
pub fn fourier_heat_kernel(t: f64, xi: &[f64]) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let r2: f64 = xi.iter().map(|v| v * v).sum();
    (-t * r2 / 2.0).exp()
}

/// Strictly increasing times `0 < t_1 < ... < t_n < t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedTimes {
    t: f64,
    times: Vec<f64>,
}

impl OrderedTimes {
    pub fn new(t: f64, times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Usage("order must be at least 1".into()));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("terminal time {t} must be positive")));
        }
        for &s in &times {
            if !(s > 0.0 && s < t) {
                return Err(Error::Domain(format!("time {s} outside (0, {t})")));
            }
        }
        for w in times.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Degenerate(format!(
                    "times not strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(OrderedTimes { t, times })
    }

    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn order(&self) -> usize {
        self.times.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub value: Complex64,
    pub order: usize,
    pub t: f64,
    pub x: Vec<f64>,
    pub xis: Vec<Vec<f64>>,
}

fn check_xis(n: usize, d: usize, xis: &[Vec<f64>]) -> Result<()> {
    if xis.len() != n {
        return Err(Error::Usage(format!("{} frequencies for order {n}", xis.len())));
    }
    if xis.iter().any(|v| v.len() != d) {
        return Err(Error::Usage(format!("frequencies must have dimension {d}")));
    }
    Ok(())
}

/// Spatial Fourier transform of the ordered chaos kernel `f_{t,x,n}` at `(xi_1, .., xi_n)`.
pub fn fourier_chaos_kernel(
    x: &[f64],
    ord: &OrderedTimes,
    xis: &[Vec<f64>],
    u0: &InitialMeasure,
) -> Result<KernelEval> {
    let d = u0.dim();
    let n = ord.order();
    check_xis(n, d, xis)?;
    if x.len() != d {
        return Err(Error::Usage(format!("point must have dimension {d}")));
    }
    let t = ord.t;
    let ts = &ord.times;
    let mut partial = vec![0.0; d];
    let mut log_mod = 0.0;
    for k in 0..n {
        for (p, v) in partial.iter_mut().zip(&xis[k]) {
            *p += ts[k] * v;
        }
        let next = if k + 1 < n { ts[k + 1] } else { t };
        let p2: f64 = partial.iter().map(|v| v * v).sum();
        log_mod -= 0.5 * (next - ts[k]) / (ts[k] * next) * p2;
    }
    let phase: f64 = -partial.iter().zip(x).map(|(p, xv)| p * xv).sum::<f64>() / t;
    let mut c = vec![0.0; d];
    for k in 0..n {
        for (cv, v) in c.iter_mut().zip(&xis[k]) {
            *cv += (1.0 - ts[k] / t) * v;
        }
    }
    let osc = oscillatory_heat_integral(u0, t, x, &c)?;
    Ok(KernelEval {
        value: Complex64::from_polar(log_mod.exp(), phase) * osc,
        order: n,
        t,
        x: x.to_vec(),
        xis: xis.to_vec(),
    })
}

/// Kernel transform for d = 1 without validation. Equal times are allowed;
/// the formula is continuous there.
pub(crate) fn kernel_1d(t: f64, x: f64, times: &[f64], xis: &[f64], u0: &InitialMeasure) -> Complex64 {
    let n = times.len();
    let mut partial = 0.0;
    let mut log_mod = 0.0;
    let mut c = 0.0;
    for k in 0..n {
        partial += times[k] * xis[k];
        let next = if k + 1 < n { times[k + 1] } else { t };
        log_mod -= 0.5 * (next - times[k]) / (times[k] * next) * partial * partial;
        c += (1.0 - times[k] / t) * xis[k];
    }
    Complex64::from_polar(log_mod.exp(), -partial * x / t) * u0.osc_1d(t, x, c)
}

/// Order-2 kernel for d = 1 at `t1 <= t2` with the first-gap factor
/// `exp(-rate (t2 - t1))` left out; returns the remaining factor and `rate`.
pub(crate) fn kernel_1d_pair(
    t: f64,
    x: f64,
    (t1, t2): (f64, f64),
    (xi1, xi2): (f64, f64),
    u0: &InitialMeasure,
) -> (Complex64, f64) {
    let partial = t1 * xi1 + t2 * xi2;
    let log_mod = -0.5 * (t - t2) / (t2 * t) * partial * partial;
    let c = (1.0 - t1 / t) * xi1 + (1.0 - t2 / t) * xi2;
    let slow = Complex64::from_polar(log_mod.exp(), -partial * x / t) * u0.osc_1d(t, x, c);
    (slow, 0.5 * t1 / t2 * xi1 * xi1)
}

/// Evaluates the kernel at arbitrary distinct times by sorting them and
/// permuting the frequencies along.
pub fn symmetrized_fourier_chaos_kernel(
    t: f64,
    x: &[f64],
    times: &[f64],
    xis: &[Vec<f64>],
    u0: &InitialMeasure,
) -> Result<KernelEval> {
    if times.len() != xis.len() {
        return Err(Error::Usage("times and frequencies differ in length".into()));
    }
    let mut idx: Vec<usize> = (0..times.len()).collect();
    idx.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let sorted: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
    let perm: Vec<Vec<f64>> = idx.iter().map(|&i| xis[i].clone()).collect();
    let ord = OrderedTimes::new(t, sorted)?;
    fourier_chaos_kernel(x, &ord, &perm, u0)
}

/// Physical-space kernel `G_{t-t_n}(x - x_n) ... G_{t_2-t_1}(x_2 - x_1) w(t_1, x_1)`.
pub fn physical_chain_kernel(
    x: &[f64],
    ord: &OrderedTimes,
    xs: &[Vec<f64>],
    u0: &InitialMeasure,
) -> Result<f64> {
    let n = ord.order();
    check_xis(n, u0.dim(), xs)?;
    let ts = &ord.times;
    let mut v = heat_evolve(u0, ts[0], &xs[0])?.w;
    for k in 0..n {
        let (next_t, next_x) = if k + 1 < n {
            (ts[k + 1], xs[k + 1].as_slice())
        } else {
            (ord.t, x)
        };
        let diff: Vec<f64> = next_x.iter().zip(&xs[k]).map(|(a, b)| a - b).collect();
        v *= heat_kernel(next_t - ts[k], &diff);
    }
    Ok(v)
}

const ANGULAR_NODES: usize = 512;

/// `int |F G_t(xi)|^2 mu(xi - eta) dxi` with the spectral density of `spatial`.
///
/// For regular noise the result is checked against `K_bound t^{-(d - alpha)/2}`.
pub fn weighted_kernel_energy(t: f64, eta: &[f64], spatial: &SpatialParam) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let d = spatial.dim();
    if eta.len() != d {
        return Err(Error::Usage(format!("eta must have dimension {d}")));
    }
    let (p, scale) = match *spatial {
        SpatialParam::Regular { d, alpha } => {
            riesz_constants(d, alpha, t)?;
            (d as f64 - 1.0 - alpha, 1.0)
        }
        SpatialParam::Rough { h } => (
            1.0 - 2.0 * h,
            crate::params::fractional_spectral_constant(h)?,
        ),
    };
    let e: f64 = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
    // radial integrand after substituting zeta = xi - eta, without r^p
    let radial = |r: f64| -> f64 {
        match d {
            1 => (-t * (r + e) * (r + e)).exp() + (-t * (r - e) * (r - e)).exp(),
            2 => {
                let base = (-t * (r - e) * (r - e)).exp();
                if base == 0.0 {
                    return 0.0;
                }
                let b = 2.0 * t * r * e;
                let mut s = 0.0;
                for j in 0..ANGULAR_NODES {
                    let th = 2.0 * PI * (j as f64 + 0.5) / ANGULAR_NODES as f64;
                    s += (-b * (1.0 + th.cos())).exp();
                }
                base * 2.0 * PI * s / ANGULAR_NODES as f64
            }
            _ => {
                let b = 2.0 * t * r * e;
                let base = (-t * (r - e) * (r - e)).exp();
                let sh = if b < 1e-8 { 1.0 } else { -(-2.0 * b).exp_m1() / (2.0 * b) };
                4.0 * PI * base * sh
            }
        }
    };
    let v = scale * quad::power_weighted_half_line(radial, p, 1e-11)?;
    if let SpatialParam::Regular { d, alpha } = *spatial {
        let rc = riesz_constants(d, alpha, t)?;
        let bound = rc.k_bound * t.powf(-(d as f64 - alpha) / 2.0);
        if v > bound * (1.0 + 1e-9) {
            return Err(Error::numerical(
                "weighted_kernel_energy",
                format!("energy {v} exceeds bound {bound} at t = {t}, eta = {eta:?}"),
            ));
        }
    }
    Ok(v)
}

/// Closed form of the energy at `eta = 0`:
/// `c_d Gamma((d - alpha)/2) t^{-(d - alpha)/2} / 2` (times `c_H` for rough noise).
pub fn kernel_energy_at_origin(t: f64, spatial: &SpatialParam) -> f64 {
    let (d, alpha, scale) = match *spatial {
        SpatialParam::Regular { d, alpha } => (d, alpha, 1.0),
        SpatialParam::Rough { h } => (1, 2.0 * h - 1.0, crate::params::fractional_constant_unchecked(h)),
    };
    let e = d as f64 - alpha;
    scale * crate::special::sphere_area(d) * 0.5 * gamma(e / 2.0) * t.powf(-e / 2.0)
}
