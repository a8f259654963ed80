//! Closed-form integrals over the ordered simplex `0 < t_1 < ... < t_n < t`
//! and a Monte Carlo oracle for them.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_indexed, ExecMode};
use crate::special::ln_gamma;

/// `int_{T_n(t)} [t_1 (t_2 - t_1) ... (t - t_n)]^h dt
///  = Gamma(h+1)^{n+1} / Gamma((n+1)(h+1)) t^{n(h+1)+h}`.
pub fn simplex_power_integral(n: usize, h: f64, t: f64) -> Result<f64> {
    Ok(ln_simplex_power_integral(n, h, t)?.exp())
}

/// Natural log of [`simplex_power_integral`], usable far beyond `f64` range.
pub fn ln_simplex_power_integral(n: usize, h: f64, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("order n must be at least 1".into()));
    }
    if !(h > -1.0) {
        return Err(Error::Domain(format!("exponent h = {h} must exceed -1")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let nf = n as f64;
    Ok((nf + 1.0) * ln_gamma(h + 1.0) - ln_gamma((nf + 1.0) * (h + 1.0))
        + (nf * (h + 1.0) + h) * t.ln())
}

/// Exponents of `prod_i t_i^{alpha_i} (t_{i+1} - t_i)^{beta_i}` with `t_{n+1} = t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedExponents {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    t: f64,
}

impl MixedExponents {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, t: f64) -> Result<Self> {
        let n = alphas.len();
        if n == 0 || betas.len() != n {
            return Err(Error::Usage(format!(
                "need equal non-empty exponent lists, got {} and {}",
                n,
                betas.len()
            )));
        }
        if !(t > 0.0) {
            return Err(Error::Domain(format!("t = {t} must be positive")));
        }
        for (i, (&a, &b)) in alphas.iter().zip(&betas).enumerate() {
            if !(a > -1.0) {
                return Err(Error::Domain(format!("alpha_{} = {a} must exceed -1", i + 1)));
            }
            if !(b > -1.0) {
                return Err(Error::Domain(format!("beta_{} = {b} must exceed -1", i + 1)));
            }
        }
        let mut s = 0.0;
        for k in 1..n {
            s += alphas[k - 1] + betas[k - 1];
            let v = s + k as f64 + 1.0 + alphas[k];
            if !(v > 0.0) {
                return Err(Error::Domain(format!(
                    "partial-sum condition fails at k = {k}: value {v}"
                )));
            }
        }
        Ok(MixedExponents { alphas, betas, t })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn order(&self) -> usize {
        self.alphas.len()
    }

    /// Exponent of `t` in the closed form: `|alpha| + |beta| + n`.
    pub fn scaling_power(&self) -> f64 {
        self.alphas.iter().sum::<f64>() + self.betas.iter().sum::<f64>() + self.order() as f64
    }

    /// The integrand at ordered times.
    pub fn integrand(&self, times: &[f64]) -> f64 {
        let n = self.order();
        let mut v = 1.0;
        for i in 0..n {
            let next = if i + 1 < n { times[i + 1] } else { self.t };
            v *= times[i].powf(self.alphas[i]) * (next - times[i]).powf(self.betas[i]);
        }
        v
    }
}

/// Natural log of [`simplex_mixed_integral`].
pub fn ln_simplex_mixed_integral(e: &MixedExponents) -> f64 {
    let n = e.order();
    let (a, b) = (&e.alphas, &e.betas);
    let mut v = ln_gamma(a[0] + 1.0) + b.iter().map(|&x| ln_gamma(x + 1.0)).sum::<f64>()
        - ln_gamma(e.scaling_power() + 1.0);
    let mut s = 0.0;
    for k in 1..n {
        s += a[k - 1] + b[k - 1];
        let base = s + k as f64 + 1.0;
        v += ln_gamma(base + a[k]) - ln_gamma(base);
    }
    v + e.scaling_power() * e.t.ln()
}

pub fn simplex_mixed_integral(e: &MixedExponents) -> f64 {
    ln_simplex_mixed_integral(e).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    /// Set when the samples look heavy-tailed enough that the error bar is unreliable.
    pub warning: Option<String>,
}

const MC_BATCHES: usize = 64;

/// Monte Carlo integral of `f` over the ordered simplex in `[0, t]^n`.
///
/// Points are sorted i.i.d. uniforms; each batch has its own ChaCha stream
/// derived from `seed`, and batches are combined in index order, so the
/// result does not depend on scheduling.
pub fn mc_simplex_oracle<F>(
    n: usize,
    f: F,
    t: f64,
    samples: u64,
    seed: u64,
    mode: ExecMode,
) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    if samples < 1000 {
        return Err(Error::Usage(format!("need at least 1000 samples, got {samples}")));
    }
    if n == 0 || !(t > 0.0) {
        return Err(Error::Domain("need n >= 1 and t > 0".into()));
    }
    let per = samples / MC_BATCHES as u64;
    let extra = samples % MC_BATCHES as u64;
    let batches = map_indexed(mode, MC_BATCHES, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let m = per + u64::from((b as u64) < extra);
        let mut x = vec![0.0; n];
        let (mut s1, mut s2, mut mx) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..m {
            for v in x.iter_mut() {
                let u: f64 = rng.sample(Open01);
                *v = u * t;
            }
            x.sort_unstable_by(f64::total_cmp);
            let y = f(&x);
            s1 += y;
            s2 += y * y;
            mx = mx.max(y.abs());
        }
        (s1, s2, mx, m)
    });
    let (mut s1, mut s2, mut mx, mut abs_mass) = (0.0, 0.0, 0.0f64, 0.0);
    for &(a, b, c, _) in &batches {
        s1 += a;
        s2 += b;
        mx = mx.max(c);
        abs_mass += a.abs();
    }
    let nn = samples as f64;
    let mean = s1 / nn;
    let var = (s2 / nn - mean * mean).max(0.0) * nn / (nn - 1.0);
    let vol = (n as f64 * t.ln() - ln_gamma(n as f64 + 1.0)).exp();
    if !mean.is_finite() || !var.is_finite() {
        return Err(Error::numerical("mc_simplex_oracle", "non-finite sample moments"));
    }
    // batch means disagreeing far beyond their own spread, or one sample
    // carrying a visible share of the total, point to infinite variance
    let mut warning = None;
    if abs_mass > 0.0 && mx > 0.05 * abs_mass {
        warning = Some(format!(
            "single sample carries {:.1}% of the total; variance may be infinite",
            100.0 * mx / abs_mass
        ));
    } else {
        let means: Vec<f64> = batches.iter().map(|&(a, _, _, m)| a / m as f64).collect();
        let bm = means.iter().sum::<f64>() / means.len() as f64;
        let bvar = means.iter().map(|v| (v - bm).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        let expected = var / per.max(1) as f64;
        if expected > 0.0 && bvar > 4.0 * expected {
            warning = Some(format!(
                "batch spread {:.3e} exceeds the sample-variance prediction {:.3e}",
                bvar, expected
            ));
        }
    }
    Ok(McEstimate {
        estimate: vol * mean,
        stderr: vol * (var / nn).sqrt(),
        samples,
        warning,
    })
}
