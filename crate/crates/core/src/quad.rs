//! Deterministic one-dimensional quadrature: Gauss-Legendre rules, adaptive
//! Gauss-Kronrod (7/15), and power-weighted half-line integrals.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Values that the adaptive rule can integrate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk = rk + s * WGK[j];
        if j % 2 == 1 {
            rg = rg + s * WG[j / 2];
        }
    }
    (rk * h, ((rk - rg) * h).magnitude())
}

/// Adaptive Gauss-Kronrod on [a, b] to the given absolute/relative tolerance.
pub fn adaptive<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let first = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, first.0, first.1)];
    let mut total = first.0;
    let mut err = first.1;
    for _ in 0..4000 {
        if !total.magnitude().is_finite() {
            return Err(Error::numerical("adaptive quadrature", "non-finite integrand"));
        }
        if err <= abs_tol.max(rel_tol * total.magnitude()) {
            return Ok(total);
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, v, e) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
        total = total - v + v1 + v2;
        err = err - e + e1 + e2;
        if intervals.len() % 64 == 0 {
            // refresh sums to keep rounding drift out of the stopping test
            total = intervals.iter().fold(T::zero(), |acc, iv| acc + iv.2);
            err = intervals.iter().map(|iv| iv.3).sum();
        }
    }
    Err(Error::numerical(
        "adaptive quadrature",
        format!(
            "no convergence on [{a}, {b}]: estimate magnitude {:e}, error {err:e}",
            total.magnitude()
        ),
    ))
}

/// Integral over (0, inf) of r^p g(r) with p > -1, where g is smooth near 0
/// and decays fast enough at infinity.
///
/// Splits at r = 1. On (0, 1] the substitution u = r^{p+1} removes the
/// power singularity; on [1, inf) the map r = 1/s, s in (0, 1], is used.
pub fn power_weighted_half_line<T: QuadValue, F: FnMut(f64) -> T>(
    mut g: F,
    p: f64,
    rel_tol: f64,
) -> Result<T> {
    if p <= -1.0 {
        return Err(Error::Domain(format!("power {p} not integrable at 0")));
    }
    let q = p + 1.0;
    let inner = adaptive(
        |u: f64| {
            if u <= 0.0 {
                return T::zero();
            }
            g(u.powf(1.0 / q)) * (1.0 / q)
        },
        0.0,
        1.0,
        1e-300,
        rel_tol,
    )?;
    let outer = adaptive(
        |s: f64| {
            if s <= 0.0 {
                return T::zero();
            }
            let r = 1.0 / s;
            let v = g(r) * (r.powf(p) * r * r);
            if v.magnitude().is_finite() {
                v
            } else {
                T::zero()
            }
        },
        0.0,
        1.0,
        1e-300,
        rel_tol,
    )?;
    Ok(inner + outer)
}
