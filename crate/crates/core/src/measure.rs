//! Signed initial measures built from atoms, Gaussian densities and Lebesgue measure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::heat_kernel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub loc: Vec<f64>,
    pub weight: f64,
}

/// `weight * G_{sigma2}(x - mean)`, an isotropic Gaussian density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussComponent {
    pub mean: Vec<f64>,
    pub sigma2: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialMeasure {
    dim: usize,
    atoms: Vec<Atom>,
    gauss: Vec<GaussComponent>,
    lebesgue: Option<f64>,
}

/// Heat evolution `w(t, x)` together with the evolution `w_plus` of `|u0|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatEvolution {
    pub w: f64,
    pub w_plus: f64,
    pub t: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrabilityWitness {
    pub integrable: bool,
    /// `int e^{-|x|^2} |u0|(dx)`
    pub value: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time t = {t} must be positive")));
    }
    Ok(())
}

impl InitialMeasure {
    pub fn new(
        dim: usize,
        atoms: Vec<Atom>,
        gauss: Vec<GaussComponent>,
        lebesgue: Option<f64>,
    ) -> Result<Self> {
        if dim == 0 || dim > crate::params::MAX_DIM {
            return Err(Error::Domain(format!("dimension {dim} unsupported")));
        }
        if atoms.is_empty() && gauss.is_empty() && lebesgue.is_none() {
            return Err(Error::Usage("initial measure needs at least one component".into()));
        }
        for a in &atoms {
            if a.loc.len() != dim || !a.weight.is_finite() || a.loc.iter().any(|v| !v.is_finite()) {
                return Err(Error::Usage(format!("bad atom {a:?} for dimension {dim}")));
            }
        }
        for g in &gauss {
            if g.mean.len() != dim
                || !(g.sigma2 > 0.0)
                || !g.sigma2.is_finite()
                || !g.weight.is_finite()
            {
                return Err(Error::Usage(format!("bad gaussian component {g:?}")));
            }
        }
        if let Some(l) = lebesgue {
            if !l.is_finite() {
                return Err(Error::Usage("lebesgue weight must be finite".into()));
            }
        }
        Ok(InitialMeasure {
            dim,
            atoms,
            gauss,
            lebesgue,
        })
    }

    pub fn dirac(loc: &[f64]) -> Self {
        Self::new(
            loc.len(),
            vec![Atom {
                loc: loc.to_vec(),
                weight: 1.0,
            }],
            vec![],
            None,
        )
        .expect("valid dirac")
    }

    pub fn lebesgue(dim: usize, weight: f64) -> Self {
        Self::new(dim, vec![], vec![], Some(weight)).expect("valid lebesgue")
    }

    pub fn gaussian(mean: &[f64], sigma2: f64, weight: f64) -> Result<Self> {
        Self::new(
            mean.len(),
            vec![],
            vec![GaussComponent {
                mean: mean.to_vec(),
                sigma2,
                weight,
            }],
            None,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
    pub fn gauss(&self) -> &[GaussComponent] {
        &self.gauss
    }
    pub fn lebesgue_weight(&self) -> Option<f64> {
        self.lebesgue
    }

    /// Sum of two measures of the same dimension.
    pub fn add(&self, other: &InitialMeasure) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Usage("dimension mismatch".into()));
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut gauss = self.gauss.clone();
        gauss.extend(other.gauss.iter().cloned());
        let lebesgue = match (self.lebesgue, other.lebesgue) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0.0) + b.unwrap_or(0.0)),
        };
        Self::new(self.dim, atoms, gauss, lebesgue)
    }

    fn map_weights(&self, f: impl Fn(f64) -> f64) -> Self {
        InitialMeasure {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    loc: a.loc.clone(),
                    weight: f(a.weight),
                })
                .collect(),
            gauss: self
                .gauss
                .iter()
                .map(|g| GaussComponent {
                    weight: f(g.weight),
                    ..g.clone()
                })
                .collect(),
            lebesgue: self.lebesgue.map(&f),
        }
    }

    /// `|u0|`, taken componentwise.
    pub fn abs(&self) -> Self {
        self.map_weights(f64::abs)
    }

    /// Positive part of the componentwise Jordan decomposition.
    pub fn positive_part(&self) -> Self {
        self.map_weights(|w| w.max(0.0))
    }

    /// Negative part of the componentwise Jordan decomposition (nonnegative weights).
    pub fn negative_part(&self) -> Self {
        self.map_weights(|w| (-w).max(0.0))
    }

    /// The measure `w(t, x) dx`, again a member of the class.
    pub fn evolved(&self, t: f64) -> Result<Self> {
        check_time(t)?;
        let mut gauss: Vec<GaussComponent> = self
            .atoms
            .iter()
            .map(|a| GaussComponent {
                mean: a.loc.clone(),
                sigma2: t,
                weight: a.weight,
            })
            .collect();
        gauss.extend(self.gauss.iter().map(|g| GaussComponent {
            sigma2: g.sigma2 + t,
            ..g.clone()
        }));
        Self::new(self.dim, vec![], gauss, self.lebesgue)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Usage(format!(
                "point of dimension {} for a measure on R^{}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    fn evolve_value(&self, t: f64, x: &[f64], abs: bool) -> f64 {
        let wt = |w: f64| if abs { w.abs() } else { w };
        let mut v = 0.0;
        for a in &self.atoms {
            v += wt(a.weight) * heat_kernel(t, &sub(x, &a.loc));
        }
        for g in &self.gauss {
            v += wt(g.weight) * heat_kernel(t + g.sigma2, &sub(x, &g.mean));
        }
        if let Some(l) = self.lebesgue {
            v += wt(l);
        }
        v
    }

    /// Spatial Fourier transform of `x -> w(t, x)` at `zeta`, without the
    /// Lebesgue part (whose transform is a point mass at the origin).
    pub fn heat_fourier(&self, t: f64, zeta: &[f64]) -> Complex64 {
        let z2 = dot(zeta, zeta);
        let mut v = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            v += a.weight * Complex64::from_polar((-t * z2 / 2.0).exp(), -dot(zeta, &a.loc));
        }
        for g in &self.gauss {
            v += g.weight
                * Complex64::from_polar((-(t + g.sigma2) * z2 / 2.0).exp(), -dot(zeta, &g.mean));
        }
        v
    }

    /// One-dimensional, allocation-free form of [`oscillatory_heat_integral`].
    pub(crate) fn osc_1d(&self, t: f64, x: f64, c: f64) -> Complex64 {
        let g = |s: f64, y: f64| (-y * y / (2.0 * s)).exp() / (2.0 * PI * s).sqrt();
        let mut v = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let y = a.loc[0];
            v += a.weight * g(t, x - y) * Complex64::from_polar(1.0, -c * y);
        }
        for gc in &self.gauss {
            let (mu, s) = (gc.mean[0], gc.sigma2);
            let m = (s * x + t * mu) / (t + s);
            let var = t * s / (t + s);
            v += gc.weight * g(t + s, x - mu) * Complex64::from_polar((-var * c * c / 2.0).exp(), -c * m);
        }
        if let Some(l) = self.lebesgue {
            v += l * Complex64::from_polar((-t * c * c / 2.0).exp(), -c * x);
        }
        v
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Checks `int e^{-a|x|^2} |u0|(dx) < inf` at `a = 1`; always true for this class.
pub fn check_integrability(u0: &InitialMeasure) -> IntegrabilityWitness {
    let d = u0.dim as f64;
    let mut v = 0.0;
    for a in &u0.atoms {
        v += a.weight.abs() * (-dot(&a.loc, &a.loc)).exp();
    }
    for g in &u0.gauss {
        let s = 1.0 + 2.0 * g.sigma2;
        v += g.weight.abs() * s.powf(-d / 2.0) * (-dot(&g.mean, &g.mean) / s).exp();
    }
    if let Some(l) = u0.lebesgue {
        v += l.abs() * PI.powf(d / 2.0);
    }
    IntegrabilityWitness {
        integrable: v.is_finite(),
        value: v,
    }
}

pub fn heat_evolve(u0: &InitialMeasure, t: f64, x: &[f64]) -> Result<HeatEvolution> {
    check_time(t)?;
    u0.check_point(x)?;
    Ok(HeatEvolution {
        w: u0.evolve_value(t, x, false),
        w_plus: u0.evolve_value(t, x, true),
        t,
        x: x.to_vec(),
    })
}

/// `int e^{-i c . y} G_t(x - y) u0(dy)` in closed form.
pub fn oscillatory_heat_integral(
    u0: &InitialMeasure,
    t: f64,
    x: &[f64],
    c: &[f64],
) -> Result<Complex64> {
    check_time(t)?;
    u0.check_point(x)?;
    u0.check_point(c)?;
    let c2 = dot(c, c);
    let mut v = Complex64::new(0.0, 0.0);
    for a in &u0.atoms {
        v += a.weight * heat_kernel(t, &sub(x, &a.loc)) * Complex64::from_polar(1.0, -dot(c, &a.loc));
    }
    for g in &u0.gauss {
        // product of the two Gaussians in y is G_{t+s}(x - mu) G_v(y - m)
        let s = g.sigma2;
        let m: Vec<f64> = x
            .iter()
            .zip(&g.mean)
            .map(|(xi, mi)| (s * xi + t * mi) / (t + s))
            .collect();
        let var = t * s / (t + s);
        v += g.weight
            * heat_kernel(t + s, &sub(x, &g.mean))
            * Complex64::from_polar((-var * c2 / 2.0).exp(), -dot(c, &m));
    }
    if let Some(l) = u0.lebesgue {
        v += l * Complex64::from_polar((-t * c2 / 2.0).exp(), -dot(c, x));
    }
    Ok(v)
}

impl fmt::Display for InitialMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:e}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for a in &self.atoms {
            writeln!(f, "atom {} {:e}", join(&a.loc), a.weight)?;
        }
        for g in &self.gauss {
            writeln!(f, "gauss {} {:e} {:e}", join(&g.mean), g.sigma2, g.weight)?;
        }
        if let Some(l) = self.lebesgue {
            writeln!(f, "lebesgue {l:e}")?;
        }
        Ok(())
    }
}

impl FromStr for InitialMeasure {
    type Err = Error;

    /// One entry per line: `atom x.. w`, `gauss mean.. sigma2 w`, `lebesgue w`,
    /// optionally `dim d`. Blank lines and `#` comments are skipped. Entries
    /// may also be separated by `;`.
    fn from_str(s: &str) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut atoms = Vec::new();
        let mut gauss = Vec::new();
        let mut lebesgue: Option<f64> = None;
        let entries = s
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split(';').map(move |e| (i + 1, e)));
        for (line, raw) in entries {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let perr = |m: String| Error::Parse { line, message: m };
            let mut tok = body.split_whitespace();
            let head = tok.next().expect("non-empty");
            let rest: Vec<&str> = tok.collect();
            let nums = |r: &[&str]| -> Result<Vec<f64>> {
                r.iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|e| perr(format!("bad number '{t}': {e}")))
                    })
                    .collect()
            };
            let mut set_dim = |k: usize| -> Result<()> {
                match dim {
                    Some(d) if d != k => Err(perr(format!("dimension {k} conflicts with {d}"))),
                    _ => {
                        dim = Some(k);
                        Ok(())
                    }
                }
            };
            match head {
                "dim" => {
                    if rest.len() != 1 {
                        return Err(perr("dim takes one integer".into()));
                    }
                    let k = rest[0]
                        .parse::<usize>()
                        .map_err(|e| perr(format!("bad dimension: {e}")))?;
                    set_dim(k)?;
                }
                "atom" => {
                    let v = nums(&rest)?;
                    if v.len() < 2 {
                        return Err(perr("atom needs a location and a weight".into()));
                    }
                    set_dim(v.len() - 1)?;
                    let (loc, w) = v.split_at(v.len() - 1);
                    atoms.push(Atom {
                        loc: loc.to_vec(),
                        weight: w[0],
                    });
                }
                "gauss" => {
                    let v = nums(&rest)?;
                    if v.len() < 3 {
                        return Err(perr("gauss needs a mean, sigma2 and a weight".into()));
                    }
                    set_dim(v.len() - 2)?;
                    let n = v.len();
                    if !(v[n - 2] > 0.0) {
                        return Err(perr("sigma2 must be positive".into()));
                    }
                    gauss.push(GaussComponent {
                        mean: v[..n - 2].to_vec(),
                        sigma2: v[n - 2],
                        weight: v[n - 1],
                    });
                }
                "lebesgue" => {
                    let v = nums(&rest)?;
                    if v.len() != 1 {
                        return Err(perr("lebesgue takes one weight".into()));
                    }
                    lebesgue = Some(lebesgue.unwrap_or(0.0) + v[0]);
                }
                other => return Err(perr(format!("unknown entry '{other}'"))),
            }
        }
        InitialMeasure::new(dim.unwrap_or(1), atoms, gauss, lebesgue).map_err(|e| match e {
            Error::Usage(m) | Error::Domain(m) => Error::Parse { line: 0, message: m },
            e => e,
        })
    }
}
