//! Per-term majorants of `E|I_k|^2` and the uniform tail series over a
//! parameter window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{
    fractional_constant_unchecked, riesz_c1, ParamWindow, SpatialParam, TemporalParam, WindowKind,
};
use crate::simplex::{ln_simplex_mixed_integral, ln_simplex_power_integral, MixedExponents};
use crate::special::{ln_gamma, GAMMA_ARGMIN};

/// Relative size below which tail series terms are dropped.
pub const SERIES_CUTOFF: f64 = 1e-18;

/// Constant of the fractional Littlewood-Hardy inequality:
/// `alpha_{H0}` times the sharp Hardy-Littlewood-Sobolev constant for the
/// kernel `|t - s|^{2H0 - 2}` on the line.
pub fn littlewood_hardy_constant(temporal: &TemporalParam) -> f64 {
    let h0 = temporal.h0;
    let pi = std::f64::consts::PI;
    let ln_hls = (1.0 - h0) * pi.ln() + ln_gamma(h0 - 0.5) - ln_gamma(h0) + (0.5 - h0) * pi.ln();
    h0 * (2.0 * h0 - 1.0) * ln_hls.exp()
}

fn gamma_0t(temporal: &TemporalParam, t: f64) -> f64 {
    2.0 * temporal.h0 * t.powf(2.0 * temporal.h0 - 1.0)
}

/// Majorant of `E|I_k(f_{t,x,k})|^2 / w_+(t, x)^2`.
pub fn per_term_majorant(
    k: usize,
    param: &SpatialParam,
    temporal: &TemporalParam,
    t: f64,
) -> Result<f64> {
    Ok(ln_per_term_majorant(k, param, temporal, t)?.exp())
}

pub fn ln_per_term_majorant(
    k: usize,
    param: &SpatialParam,
    temporal: &TemporalParam,
    t: f64,
) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    param.ensure_admissible(temporal)?;
    match *param {
        SpatialParam::Regular { d, alpha } => {
            let e = d as f64 - alpha;
            let kf = k as f64;
            Ok(kf * gamma_0t(temporal, t).ln() + kf * riesz_c1(d, alpha)?.ln()
                - 0.5 * e * kf * std::f64::consts::LN_2
                + 0.5 * e * t.ln()
                + ln_simplex_power_integral(k, -0.5 * e, t)?)
        }
        SpatialParam::Rough { h } => ln_rough_majorant(k, h, temporal, t),
    }
}

/// Rough family: Littlewood-Hardy in time, then Gaussian moments of the
/// expanded product `prod |eta_j - eta_{j-1}|^{1-2H}` on each ordered chain.
fn ln_rough_majorant(k: usize, h: f64, temporal: &TemporalParam, t: f64) -> Result<f64> {
    let q = 1.0 / (2.0 * temporal.h0);
    let p = 1.0 - 2.0 * h;
    let c_h = fractional_constant_unchecked(h);
    let ln_kfact = ln_gamma(k as f64 + 1.0);
    // sum over the 2^{k-1} choices of which endpoint carries each factor
    let mut terms = Vec::with_capacity(1 << (k - 1));
    for mask in 0u32..(1 << (k - 1)) {
        let mut a = vec![0usize; k];
        a[0] = 1;
        for j in 1..k {
            if mask >> (j - 1) & 1 == 1 {
                a[j] += 1;
            } else {
                a[j - 1] += 1;
            }
        }
        let ex: Vec<f64> = a.iter().map(|&n| p * n as f64).collect();
        let mut alphas = Vec::with_capacity(k);
        let mut betas = Vec::with_capacity(k);
        let mut ln_g = 0.0;
        for j in 0..k {
            let s = 0.5 * (1.0 + ex[j]);
            ln_g += q * ln_gamma(s);
            let prev = if j > 0 { 0.5 * (1.0 + ex[j - 1]) } else { 0.0 };
            alphas.push(q * (2.0 * h - 2.0 + s + prev));
            betas.push(-q * s);
        }
        // t_{k+1} = t enters through the last gap
        let ln_t_last = q * 0.5 * (1.0 + ex[k - 1]) * t.ln();
        let e = MixedExponents::new(alphas, betas, t)?;
        terms.push(ln_g + ln_t_last + ln_simplex_mixed_integral(&e));
    }
    let ln_sum = log_sum_exp(&terms);
    // int_{[0,t]^k} A^q <= k! (w_+^2 c_H^k / (k!)^2)^q sum
    let ln_int = ln_kfact + q * (k as f64 * c_h.ln() - 2.0 * ln_kfact) + ln_sum;
    Ok(ln_kfact
        + k as f64 * littlewood_hardy_constant(temporal).ln()
        + 2.0 * temporal.h0 * ln_int)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub m: usize,
    pub m0: usize,
    pub value: f64,
    pub ln_value: f64,
    /// Log of the first dropped term, `k = m + 1`.
    pub ln_lead: f64,
    pub terms_used: usize,
}

impl TailBound {
    /// `tail(m) / tail(m + 1) - 1`, the lead term over the next tail. Stays
    /// resolved when the two tails agree to rounding.
    pub fn ratio_excess(&self, next: &TailBound) -> Result<f64> {
        if next.m != self.m + 1 {
            return Err(Error::Usage(format!("tails at m = {} and {} are not consecutive", self.m, next.m)));
        }
        Ok((self.ln_lead - next.ln_value).exp())
    }
}

/// Smallest truncation level for which the uniform series applies.
pub fn tail_threshold(window: &ParamWindow) -> usize {
    match window.kind {
        WindowKind::Regular { d } => {
            let g = 1.0 - (d as f64 - window.a) / 2.0;
            (GAMMA_ARGMIN / g).floor() as usize + 1
        }
        WindowKind::Rough => 1,
    }
}

/// Geometric constant of the rough uniform series, calibrated from the
/// per-term majorants on the window at `t = 1`.
pub fn rough_series_constant(window: &ParamWindow, temporal: &TemporalParam) -> Result<f64> {
    let mut c: f64 = 0.0;
    for h in window.grid(5) {
        for k in 1..=6usize {
            let lm = ln_rough_majorant(k, h, temporal, 1.0)?;
            let v = (lm + window.a * ln_gamma(k as f64 + 1.0)) / k as f64;
            c = c.max(v.exp());
        }
    }
    Ok(c)
}

/// `sum_{k > m}` of the uniform majorant series on `window`.
pub fn chaos_tail_bound(
    m: usize,
    window: &ParamWindow,
    temporal: &TemporalParam,
    t: f64,
) -> Result<TailBound> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let m0 = tail_threshold(window);
    if m < m0 {
        return Err(Error::Domain(format!("truncation m = {m} is below the threshold m0 = {m0}")));
    }
    let tv = t.max(1.0);
    let term: Box<dyn Fn(usize) -> f64> = match window.kind {
        WindowKind::Regular { d } => {
            let (a, b) = (window.a, window.b);
            let df = d as f64;
            let g = 1.0 - (df - a) / 2.0;
            let c_dab = crate::special::sphere_area(d) * (1.0 / (df - b) + 2.0 / (2.0 - (df - a)));
            let lg = gamma_0t(temporal, t.max(1.0)).ln();
            let lgg = ln_gamma(g);
            let lt = (1.0 - (df - b) / 2.0) * tv.ln();
            Box::new(move |k| {
                let kf = k as f64;
                kf * (lg + c_dab.ln() + lt) + (kf + 1.0) * lgg - ln_gamma((kf + 1.0) * g)
            })
        }
        WindowKind::Rough => {
            let c = rough_series_constant(window, temporal)?;
            let (a, b) = (window.a, window.b);
            let lt = (2.0 * temporal.h0 + b - 1.0) * tv.ln();
            Box::new(move |k| {
                let kf = k as f64;
                kf * (c.ln() + lt) - a * ln_gamma(kf + 1.0)
            })
        }
    };
    let mut logs = Vec::new();
    let mut k = m + 1;
    loop {
        let l = term(k);
        logs.push(l);
        let total = log_sum_exp(&logs);
        // terms eventually decrease super-geometrically
        if k > m + 4 && l - total < SERIES_CUTOFF.ln() && term(k + 1) < l {
            break;
        }
        if logs.len() > 100_000 {
            return Err(Error::numerical("chaos_tail_bound", "series did not settle"));
        }
        k += 1;
    }
    let ln_value = log_sum_exp(&logs);
    Ok(TailBound { m, m0, value: ln_value.exp(), ln_value, ln_lead: logs[0], terms_used: logs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lh_constant_is_finite_and_positive() {
        let b = littlewood_hardy_constant(&TemporalParam { h0: 0.75 });
        assert!(b.is_finite() && b > 0.0);
    }

    #[test]
    fn regular_threshold() {
        let tp = TemporalParam { h0: 0.75 };
        let w = ParamWindow::new(0.3, 0.7, WindowKind::Regular { d: 1 }, &tp).unwrap();
        assert_eq!(tail_threshold(&w), 3);
        assert!(chaos_tail_bound(2, &w, &tp, 1.0).is_err());
    }

    #[test]
    fn tail_decreases() {
        let tp = TemporalParam { h0: 0.75 };
        let w = ParamWindow::new(0.3, 0.45, WindowKind::Rough, &tp).unwrap();
        let b5 = chaos_tail_bound(5, &w, &tp, 1.0).unwrap().value;
        let b6 = chaos_tail_bound(6, &w, &tp, 1.0).unwrap().value;
        assert!(b6 < b5 && b6 > 0.0);
    }
}
