//! Noise parameters, admissibility rules and scalar constants.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{gamma, sphere_area};

/// Largest spatial dimension handled by the constants and kernels.
pub const MAX_DIM: usize = 3;

/// Temporal Hurst index `H0` of the fractional time covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalParam {
    pub h0: f64,
}

impl TemporalParam {
    pub fn new(h0: f64) -> Result<Self> {
        if !(h0 > 0.5 && h0 < 1.0) {
            return Err(Error::Inadmissible(format!("H0 = {h0} must lie in (1/2, 1)")));
        }
        Ok(TemporalParam { h0 })
    }

    /// Lower admissibility bound `max(3/4 - H0, 0)` for the rough spatial index.
    pub fn ell(&self) -> f64 {
        (0.75 - self.h0).max(0.0)
    }
}

/// Spatial noise parameter: Riesz-type regular noise or fractional rough noise (d = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpatialParam {
    Regular { d: usize, alpha: f64 },
    Rough { h: f64 },
}

impl SpatialParam {
    pub fn dim(&self) -> usize {
        match *self {
            SpatialParam::Regular { d, .. } => d,
            SpatialParam::Rough { .. } => 1,
        }
    }

    /// The scalar parameter (`alpha` or `H`).
    pub fn value(&self) -> f64 {
        match *self {
            SpatialParam::Regular { alpha, .. } => alpha,
            SpatialParam::Rough { h } => h,
        }
    }

    /// Same family with a different scalar parameter.
    pub fn with_value(&self, v: f64) -> Self {
        match *self {
            SpatialParam::Regular { d, .. } => SpatialParam::Regular { d, alpha: v },
            SpatialParam::Rough { .. } => SpatialParam::Rough { h: v },
        }
    }

    /// Spectral density at `|xi| = r`: `r^{-alpha}` or `c_H r^{1-2H}`.
    pub fn spectral_density(&self, r: f64) -> f64 {
        match *self {
            SpatialParam::Regular { alpha, .. } => r.powf(-alpha),
            SpatialParam::Rough { h } => {
                fractional_constant_unchecked(h) * r.powf(1.0 - 2.0 * h)
            }
        }
    }

    /// Hard check used by constructors downstream of [`validate_params`].
    pub fn ensure_admissible(&self, temporal: &TemporalParam) -> Result<()> {
        let report = validate_params(self, temporal);
        if report.admissible {
            Ok(())
        } else {
            Err(Error::Inadmissible(report.failures.join("; ")))
        }
    }
}

/// One inequality of the admissibility rules with its signed slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub condition: String,
    /// Positive when the inequality holds.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Conditions that failed, in the order checked.
    pub failures: Vec<String>,
    /// `max(3/4 - H0, 0)`, reported for rough noise only.
    pub ell: Option<f64>,
    pub margins: Vec<Margin>,
}

/// Checks all admissibility inequalities. Never fails; the report says what broke.
pub fn validate_params(spatial: &SpatialParam, temporal: &TemporalParam) -> AdmissibilityReport {
    let mut margins = Vec::new();
    let mut push = |c: &str, m: f64| {
        margins.push(Margin {
            condition: c.to_string(),
            margin: m,
        })
    };
    let h0 = temporal.h0;
    push("H0 > 1/2", h0 - 0.5);
    push("H0 < 1", 1.0 - h0);
    let mut ell = None;
    match *spatial {
        SpatialParam::Regular { d, alpha } => {
            push("1 <= d <= 3", if (1..=MAX_DIM).contains(&d) { 1.0 } else { -1.0 });
            let d = d as f64;
            push("alpha >= 0", alpha);
            push("alpha < d", d - alpha);
            push("d - alpha < 2", 2.0 - (d - alpha));
        }
        SpatialParam::Rough { h } => {
            let l = temporal.ell();
            ell = Some(l);
            push("H > ell", h - l);
            push("H < 1/2", 0.5 - h);
            push("H > 0", h);
        }
    }
    let mut failures = Vec::new();
    for m in &margins {
        // alpha = 0 is only allowed when the Dalang margin is still positive
        let ok = if m.condition == "alpha >= 0" {
            m.margin >= 0.0 && m.margin.is_finite()
        } else {
            m.margin > 0.0
        };
        if !ok {
            failures.push(m.condition.clone());
        }
    }
    AdmissibilityReport {
        admissible: failures.is_empty(),
        failures,
        ell,
        margins,
    }
}

/// Interval `[a, b]` of spatial parameters swept by the uniform estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamWindow {
    pub a: f64,
    pub b: f64,
    pub kind: WindowKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowKind {
    Regular { d: usize },
    Rough,
}

impl ParamWindow {
    pub fn new(a: f64, b: f64, kind: WindowKind, temporal: &TemporalParam) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Inadmissible(format!("window [{a}, {b}] is empty")));
        }
        match kind {
            WindowKind::Regular { d } => {
                let lo = (d as f64 - 2.0).max(0.0);
                if !(lo < a && b < d as f64) {
                    return Err(Error::Inadmissible(format!(
                        "regular window needs {lo} < a < b < {d}, got [{a}, {b}]"
                    )));
                }
            }
            WindowKind::Rough => {
                let l = temporal.ell();
                if !(l < a && b < 0.5) {
                    return Err(Error::Inadmissible(format!(
                        "rough window needs {l} < a < b < 1/2, got [{a}, {b}]"
                    )));
                }
            }
        }
        Ok(ParamWindow { a, b, kind })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.a <= v && v <= self.b
    }

    pub fn param(&self, v: f64) -> SpatialParam {
        match self.kind {
            WindowKind::Regular { d } => SpatialParam::Regular { d, alpha: v },
            WindowKind::Rough => SpatialParam::Rough { h: v },
        }
    }

    /// `n` equally spaced parameters from `a` to `b` inclusive.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        if n <= 1 {
            return vec![self.a];
        }
        (0..n)
            .map(|i| self.a + (self.b - self.a) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// `c_H = Gamma(2H + 1) sin(pi H) / (2 pi)`.
pub fn fractional_spectral_constant(h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("H = {h} must lie in (0, 1)")));
    }
    Ok(fractional_constant_unchecked(h))
}

pub(crate) fn fractional_constant_unchecked(h: f64) -> f64 {
    gamma(2.0 * h + 1.0) * (PI * h).sin() / (2.0 * PI)
}

/// Constants attached to the fractional time covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalConstants {
    pub h0: f64,
    pub t: f64,
    /// `H0 (2 H0 - 1)`
    pub alpha_h0: f64,
    /// `c_{H0}`
    pub c_h0: f64,
    /// Integral of the time covariance over `[-t, t]`: `2 H0 t^{2 H0 - 1}`.
    pub gamma_0t: f64,
}

impl TemporalConstants {
    /// Temporal spectral density `c_{H0} |tau|^{1 - 2 H0}`; `+inf` at `tau = 0`.
    pub fn g0(&self, tau: f64) -> f64 {
        if tau == 0.0 {
            return f64::INFINITY;
        }
        self.c_h0 * tau.abs().powf(1.0 - 2.0 * self.h0)
    }

    /// Like [`g0`](Self::g0) but reports the singularity at the origin as an error.
    pub fn try_g0(&self, tau: f64) -> Result<f64> {
        if tau == 0.0 {
            return Err(Error::Domain("g0 is singular at tau = 0".into()));
        }
        Ok(self.g0(tau))
    }

    /// Time covariance `alpha_{H0} |s|^{2 H0 - 2}`.
    pub fn gamma0(&self, s: f64) -> f64 {
        if s == 0.0 {
            return f64::INFINITY;
        }
        self.alpha_h0 * s.abs().powf(2.0 * self.h0 - 2.0)
    }
}

pub fn temporal_constants(temporal: &TemporalParam, t: f64) -> Result<TemporalConstants> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let h0 = temporal.h0;
    if !(h0 > 0.5 && h0 < 1.0) {
        return Err(Error::Domain(format!("H0 = {h0} must lie in (1/2, 1)")));
    }
    Ok(TemporalConstants {
        h0,
        t,
        alpha_h0: h0 * (2.0 * h0 - 1.0),
        c_h0: fractional_constant_unchecked(h0),
        gamma_0t: 2.0 * h0 * t.powf(2.0 * h0 - 1.0),
    })
}

/// Constants attached to the Riesz kernel `|xi|^{-alpha}` on `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszConstants {
    pub d: usize,
    pub alpha: f64,
    pub t: f64,
    /// `c_d (1/(d - alpha) + 1/(2 - (d - alpha)))`
    pub k_bound: f64,
    /// Quadrature of `int (1 + |xi|^2)^{-1} |xi|^{-alpha} dxi`.
    pub k_numeric: f64,
    /// `int e^{-|xi|^2/2} |xi|^{-alpha} dxi`
    pub c1: f64,
    /// `c1 t^{-(d - alpha)/2}`
    pub k_alpha_t: f64,
}

fn check_riesz_domain(d: usize, alpha: f64) -> Result<()> {
    if !(1..=MAX_DIM).contains(&d) {
        return Err(Error::Domain(format!("dimension {d} outside 1..={MAX_DIM}")));
    }
    let df = d as f64;
    if !(alpha >= 0.0 && alpha < df && df - alpha < 2.0) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} outside the admissible range for d = {d}"
        )));
    }
    Ok(())
}

/// `int e^{-|xi|^2/2} |xi|^{-alpha} dxi = c_d 2^{(d-alpha)/2 - 1} Gamma((d - alpha)/2)`.
pub fn riesz_c1(d: usize, alpha: f64) -> Result<f64> {
    if !(1..=MAX_DIM).contains(&d) || !(alpha < d as f64) {
        return Err(Error::Domain(format!("need alpha < d, got alpha = {alpha}, d = {d}")));
    }
    let e = d as f64 - alpha;
    Ok(sphere_area(d) * 2f64.powf(e / 2.0 - 1.0) * gamma(e / 2.0))
}

pub fn riesz_constants(d: usize, alpha: f64, t: f64) -> Result<RieszConstants> {
    check_riesz_domain(d, alpha)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let cd = sphere_area(d);
    let e = d as f64 - alpha;
    let k_bound = cd * (1.0 / e + 1.0 / (2.0 - e));
    let radial = quad::power_weighted_half_line(|r| 1.0 / (1.0 + r * r), e - 1.0, 1e-12)?;
    let k_numeric = cd * radial;
    if k_numeric > k_bound * (1.0 + 1e-12) {
        return Err(Error::numerical(
            "riesz_constants",
            format!("K numeric {k_numeric} exceeds bound {k_bound}"),
        ));
    }
    let c1 = riesz_c1(d, alpha)?;
    Ok(RieszConstants {
        d,
        alpha,
        t,
        k_bound,
        k_numeric,
        c1,
        k_alpha_t: c1 * t.powf(-e / 2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn temporal_rejects_bad_time() {
        let tp = TemporalParam::new(0.75).unwrap();
        assert!(temporal_constants(&tp, 0.0).is_err());
        assert!(temporal_constants(&tp, -1.0).is_err());
        assert!(TemporalParam::new(0.5).is_err());
    }

    #[test]
    fn g0_signals_origin() {
        let tc = temporal_constants(&TemporalParam { h0: 0.7 }, 1.0).unwrap();
        assert!(tc.g0(0.0).is_infinite());
        assert!(tc.try_g0(0.0).is_err());
        assert!(tc.g0(2.0).is_finite());
    }

    #[test]
    fn spectral_constant_domain() {
        assert!(fractional_spectral_constant(0.0).is_err());
        assert!(fractional_spectral_constant(1.0).is_err());
        assert!(fractional_spectral_constant(f64::NAN).is_err());
    }

    #[test]
    fn report_lists_failures() {
        let tp = TemporalParam { h0: 0.55 };
        let r = validate_params(&SpatialParam::Rough { h: 0.1 }, &tp);
        assert!(!r.admissible);
        assert_eq!(r.failures, vec!["H > ell".to_string()]);
        assert!((r.ell.unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn window_bounds() {
        let tp = TemporalParam { h0: 0.75 };
        assert!(ParamWindow::new(0.3, 0.45, WindowKind::Rough, &tp).is_ok());
        assert!(ParamWindow::new(0.3, 0.5, WindowKind::Rough, &tp).is_err());
        assert!(ParamWindow::new(0.2, 0.9, WindowKind::Regular { d: 1 }, &tp).is_ok());
        assert!(ParamWindow::new(0.5, 1.5, WindowKind::Regular { d: 3 }, &tp).is_err());
        let w = ParamWindow::new(0.2, 0.8, WindowKind::Regular { d: 1 }, &tp).unwrap();
        assert_eq!(w.grid(4).len(), 4);
        assert_eq!(*w.grid(4).last().unwrap(), 0.8);
    }
}
