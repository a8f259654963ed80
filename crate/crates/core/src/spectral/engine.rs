//! Recursive evaluation of the chaos terms `I_1 .. I_k` on a noise draw (d = 1).
//!
//! Time is discretized by midpoint nodes `r_n`; the noise enters through
//!
//! ```text
//! B_n(xi) = sum_tau e^{-i tau r_n} sqrt(g0(tau)) W(tau, xi),
//! ```
//!
//! and the spatial Fourier transform of the k-th chaos field obeys
//!
//! ```text
//! Z_k(s, eta) = sum_{r_n < s} h e^{-(s - r_n) eta^2 / 2}
//!               [ sum_xi Z_{k-1}(r_n, eta + xi) s(xi) B_n(xi) - pairings ],
//! I_k(s, x)   = (dxi / 2 pi) sum_eta e^{i eta x} Z_k(s, eta),
//! ```
//!
//! with `Z_0 = F w`. The pairing terms remove, for the realized draw, every
//! product of a cell with its Hermitian mirror, so that the expansion is the
//! off-diagonal multiple sum. Frequencies `eta` of level `k` live on a
//! lattice of spacing `dxi` whose parity alternates with `k`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::grid::{FrequencyTimeGrid, TimeGrid, K_MAX_LIMIT};
use super::fourier_time::{cell_spatial_weight, cell_temporal_weight};
use super::noise::NoiseDraw;
use crate::error::{Error, Result};
use crate::measure::InitialMeasure;
use crate::params::{SpatialParam, TemporalParam};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Tolerance on `|Im| / sum |terms|` of an evaluated chaos term.
pub const IMAG_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
struct EtaLattice {
    /// Largest doubled coordinate `q` (same parity as the lattice).
    q_max: i64,
}

impl EtaLattice {
    fn len(&self) -> usize {
        (self.q_max + 1) as usize
    }
    fn q(&self, i: usize) -> i64 {
        -self.q_max + 2 * i as i64
    }
    fn index(&self, q: i64) -> Option<usize> {
        if q.abs() > self.q_max {
            None
        } else {
            Some(((q + self.q_max) / 2) as usize)
        }
    }
}

/// Draw-independent state: grid, time nodes, initial-data transform.
#[derive(Debug, Clone)]
pub struct Simulator {
    grid: FrequencyTimeGrid,
    time: TimeGrid,
    lattices: [EtaLattice; 2],
    /// `e^{-i tau_j r_n} sqrt(g0(tau_j))`, indexed `[n][j]`.
    phase: Vec<Complex64>,
    /// `Z_0(r_n, zeta)` on the even lattice, indexed `[n][i]`.
    z0: Vec<Complex64>,
    /// Even-lattice indices where `Z_0` is not identically zero.
    z0_support: Vec<usize>,
}

/// Per-draw quantities shared by every spatial parameter.
#[derive(Debug, Clone)]
pub struct DrawState {
    pub seed: u64,
    /// `B_n(xi_l)`, indexed `[n][l]`.
    b: Vec<Complex64>,
    /// Realized mirror pairing `sum_tau g0 |W(tau, xi_l)|^2 e^{-i tau lag h}`,
    /// indexed `[l][lag]`, `lag = 0..steps`.
    pairing: Vec<Complex64>,
}

/// Chaos terms on a set of evaluation times and points.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosField {
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
    /// `values[k - 1][time][x]` holds `I_k`.
    pub values: Vec<Vec<Vec<f64>>>,
    /// Largest `|Im| / sum |terms|` seen.
    pub imag_ratio: f64,
}

impl ChaosField {
    pub fn term(&self, k: usize, ti: usize, xi: usize) -> f64 {
        self.values[k - 1][ti][xi]
    }

    /// `sum_{j <= m} I_j` at one (time, point).
    pub fn partial_sum(&self, m: usize, ti: usize, xi: usize) -> f64 {
        (1..=m.min(self.values.len())).map(|k| self.term(k, ti, xi)).sum()
    }
}

impl Simulator {
    /// `eta_cutoff` bounds the field frequencies; `k_max * R` makes the
    /// Lebesgue case exact on the lattice.
    pub fn new(
        grid: &FrequencyTimeGrid,
        temporal: &TemporalParam,
        time: TimeGrid,
        u0: &InitialMeasure,
        eta_cutoff: f64,
    ) -> Result<Self> {
        if grid.d != 1 || u0.dim() != 1 {
            return Err(Error::Usage("simulation is implemented for d = 1".into()));
        }
        TemporalParam::new(temporal.h0)?;
        if !(eta_cutoff > 0.0) {
            return Err(Error::Usage("eta cutoff must be positive".into()));
        }
        let dxi = grid.xi.width();
        let qm = (2.0 * eta_cutoff / dxi + 1e-9).floor() as i64;
        let (q_even, q_odd) = if qm % 2 == 0 { (qm, qm - 1) } else { (qm - 1, qm) };
        if q_odd < 1 {
            return Err(Error::Usage("eta cutoff below one lattice step".into()));
        }
        let lattices = [EtaLattice { q_max: q_even }, EtaLattice { q_max: q_odd }];
        let steps = time.steps;
        let h = time.step();
        let mut phase = Vec::with_capacity(steps * grid.tau.n);
        for n in 0..steps {
            let r = (n as f64 + 0.5) * h;
            for j in 0..grid.tau.n {
                let tau = grid.tau.center(j);
                let (lo, hi) = grid.tau.edges(j);
                phase.push(Complex64::from_polar(cell_temporal_weight(temporal, lo, hi), -tau * r));
            }
        }
        let even = lattices[0];
        let mut z0 = vec![ZERO; steps * even.len()];
        let leb = u0.lebesgue_weight().unwrap_or(0.0);
        for n in 0..steps {
            let r = (n as f64 + 0.5) * h;
            for i in 0..even.len() {
                let zeta = even.q(i) as f64 * dxi / 2.0;
                let mut v = u0.heat_fourier(r, &[zeta]);
                if even.q(i) == 0 {
                    v += 2.0 * PI / dxi * leb;
                }
                z0[n * even.len() + i] = v;
            }
        }
        let z0_support = (0..even.len())
            .filter(|&i| (0..steps).any(|n| z0[n * even.len() + i] != ZERO))
            .collect();
        Ok(Simulator {
            grid: grid.clone(),
            time,
            lattices,
            phase,
            z0,
            z0_support,
        })
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time
    }

    pub fn grid(&self) -> &FrequencyTimeGrid {
        &self.grid
    }

    /// Complex numbers held during one evaluation up to order `k_max`.
    pub fn working_set(&self, k_max: usize) -> usize {
        let steps = self.time.steps;
        let n = self.grid.xi.n;
        let m = self.lattices[0].len().max(self.lattices[1].len());
        let mut total = 2 * steps * n + (k_max + 1) * steps * m + 2 * steps * m;
        if k_max >= 3 {
            total += self.z0_support.len() * n * steps * steps;
        }
        total
    }

    pub fn prepare(&self, draw: &NoiseDraw) -> Result<DrawState> {
        if draw.grid_hash != self.grid.hash() {
            return Err(Error::Usage("noise draw was sampled on another grid".into()));
        }
        let steps = self.time.steps;
        let nt = self.grid.tau.n;
        let nx = self.grid.xi.n;
        let mut b = vec![ZERO; steps * nx];
        for n in 0..steps {
            let ph = &self.phase[n * nt..(n + 1) * nt];
            for l in 0..nx {
                let mut acc = ZERO;
                for (j, p) in ph.iter().enumerate() {
                    acc += p * draw.value(j, l);
                }
                b[n * nx + l] = acc;
            }
        }
        let h = self.time.step();
        let mut pairing = vec![ZERO; nx * (steps + 1)];
        for l in 0..nx {
            for j in 0..nt {
                let tau = self.grid.tau.center(j);
                let w = self.phase[j].norm_sqr() * draw.value(j, l).norm_sqr();
                if w == 0.0 {
                    continue;
                }
                let rot = Complex64::from_polar(1.0, -tau * h);
                let mut z = Complex64::new(w, 0.0);
                for lag in 0..=steps {
                    pairing[l * (steps + 1) + lag] += z;
                    z *= rot;
                }
            }
        }
        Ok(DrawState {
            seed: draw.seed,
            b,
            pairing,
        })
    }

    /// Evaluates `I_1 .. I_{k_max}` for `param` at every (time, point) pair.
    pub fn evaluate(
        &self,
        state: &DrawState,
        param: &SpatialParam,
        k_max: usize,
        times: &[f64],
        xs: &[f64],
    ) -> Result<ChaosField> {
        if k_max == 0 || k_max > K_MAX_LIMIT || k_max > self.grid.k_max {
            return Err(Error::Capacity(format!(
                "order {k_max} exceeds K_max = {}",
                self.grid.k_max.min(K_MAX_LIMIT)
            )));
        }
        if param.dim() != 1 {
            return Err(Error::Usage("simulation is implemented for d = 1".into()));
        }
        let ws = self.working_set(k_max);
        if ws > self.grid.memory_budget {
            return Err(Error::Capacity(format!(
                "working set of {ws} complex values exceeds the budget of {}",
                self.grid.memory_budget
            )));
        }
        let eval_idx: Vec<usize> = times
            .iter()
            .map(|&t| self.time.index_of(t))
            .collect::<Result<_>>()?;
        let steps = self.time.steps;
        let h = self.time.step();
        let nx = self.grid.xi.n;
        let dxi = self.grid.xi.width();
        let weights: Vec<f64> = (0..nx)
            .map(|l| {
                let (lo, hi) = self.grid.xi.edges(l);
                cell_spatial_weight(param, lo, hi)
            })
            .collect();
        let qxi: Vec<i64> = (0..nx).map(|l| 2 * l as i64 + 1 - nx as i64).collect();

        // level 0 at midpoints is the initial-data transform
        let m0 = self.lattices[0].len();
        let mut mids: Vec<Vec<Complex64>> = vec![self.z0.clone()];
        let mut outs: Vec<Vec<Vec<Complex64>>> = Vec::new();
        let na = if k_max >= 3 {
            Some(self.non_adjacent(state, &weights, &qxi))
        } else {
            None
        };
        for j in 1..=k_max {
            let lat = self.lattices[j % 2];
            let prev = self.lattices[(j - 1) % 2];
            let mj = lat.len();
            let mp = prev.len();
            let c0 = (prev.q_max - lat.q_max + 1 - nx as i64) / 2;
            let decay: Vec<f64> = (0..mj)
                .map(|i| {
                    let eta = lat.q(i) as f64 * dxi / 2.0;
                    (-h * eta * eta / 2.0).exp()
                })
                .collect();
            let adj = if j >= 2 {
                Some(self.adjacent_kernel(state, &weights, &qxi, lat, prev))
            } else {
                None
            };
            let mut acc = vec![ZERO; mj];
            let mut mid = vec![ZERO; steps * mj];
            let mut out = vec![vec![ZERO; mj]; eval_idx.len()];
            let mut input = vec![ZERO; mj];
            let mut coef = vec![ZERO; nx];
            for n in 0..steps {
                let a_prev = &mids[j - 1][n * mp..(n + 1) * mp];
                for l in 0..nx {
                    coef[l] = weights[l] * state.b[n * nx + l];
                }
                for (i, slot) in input.iter_mut().enumerate() {
                    let mut s = ZERO;
                    let base = i as i64 + c0;
                    let lo = (-base).max(0) as usize;
                    let hi = ((mp as i64 - base).min(nx as i64)).max(0) as usize;
                    for l in lo..hi {
                        s += a_prev[(base + l as i64) as usize] * coef[l];
                    }
                    *slot = s;
                }
                if let Some(k) = &adj {
                    let below = &mids[j - 2];
                    for np in 0..n {
                        let kk = &k[(n - np) * mj..(n - np + 1) * mj];
                        let z = &below[np * mj..(np + 1) * mj];
                        for i in 0..mj {
                            input[i] -= kk[i] * z[i];
                        }
                    }
                }
                if j == 3 {
                    if let Some(na) = &na {
                        for (i, v) in na[n * mj..(n + 1) * mj].iter().enumerate() {
                            input[i] -= v;
                        }
                    }
                }
                for i in 0..mj {
                    acc[i] = acc[i] * decay[i] + h * input[i];
                }
                if n + 1 < steps {
                    for i in 0..mj {
                        mid[(n + 1) * mj + i] = acc[i] * decay[i];
                    }
                }
                for (e, &m) in eval_idx.iter().enumerate() {
                    if m == n + 1 {
                        for i in 0..mj {
                            out[e][i] = acc[i] * decay[i].sqrt();
                        }
                    }
                }
            }
            mids.push(mid);
            outs.push(out);
        }
        debug_assert_eq!(mids[0].len(), steps * m0);

        let mut values = vec![vec![vec![0.0; xs.len()]; times.len()]; k_max];
        let mut imag_ratio: f64 = 0.0;
        for j in 1..=k_max {
            let lat = self.lattices[j % 2];
            for (e, z) in outs[j - 1].iter().enumerate() {
                for (xk, &x) in xs.iter().enumerate() {
                    let mut s = ZERO;
                    let mut mag = 0.0;
                    for (i, v) in z.iter().enumerate() {
                        let eta = lat.q(i) as f64 * dxi / 2.0;
                        s += Complex64::from_polar(1.0, eta * x) * v;
                        mag += v.norm();
                    }
                    s *= dxi / (2.0 * PI);
                    mag *= dxi / (2.0 * PI);
                    if mag > 0.0 {
                        imag_ratio = imag_ratio.max(s.im.abs() / mag);
                    }
                    values[j - 1][e][xk] = s.re;
                }
            }
        }
        if imag_ratio > IMAG_TOLERANCE {
            return Err(Error::numerical(
                "chaos evaluation",
                format!("imaginary residue ratio {imag_ratio:e} exceeds {IMAG_TOLERANCE:e}"),
            ));
        }
        Ok(ChaosField {
            times: times.to_vec(),
            xs: xs.to_vec(),
            values,
            imag_ratio,
        })
    }

    /// `K(lag, eta) = h sum_xi s(xi)^2 P_xi(lag) e^{-lag h (eta + xi)^2 / 2}`,
    /// restricted to `eta + xi` inside the previous level's lattice.
    fn adjacent_kernel(
        &self,
        state: &DrawState,
        weights: &[f64],
        qxi: &[i64],
        lat: EtaLattice,
        prev: EtaLattice,
    ) -> Vec<Complex64> {
        let steps = self.time.steps;
        let h = self.time.step();
        let dxi = self.grid.xi.width();
        let mj = lat.len();
        let mut k = vec![ZERO; (steps + 1) * mj];
        for i in 0..mj {
            for (l, &ql) in qxi.iter().enumerate() {
                let q = lat.q(i) + ql;
                if prev.index(q).is_none() {
                    continue;
                }
                let z = q as f64 * dxi / 2.0;
                let e1 = (-h * z * z / 2.0).exp();
                let w = h * weights[l] * weights[l];
                let pr = &state.pairing[l * (steps + 1)..(l + 1) * (steps + 1)];
                let mut e = e1;
                for lag in 1..=steps {
                    k[lag * mj + i] += w * e * pr[lag];
                    e *= e1;
                }
            }
        }
        k
    }

    /// Pairing of the third factor with the first, the second factor kept:
    /// returns `NA[n3][eta]` on the odd lattice.
    fn non_adjacent(&self, state: &DrawState, weights: &[f64], qxi: &[i64]) -> Vec<Complex64> {
        let steps = self.time.steps;
        let h = self.time.step();
        let dxi = self.grid.xi.width();
        let nx = qxi.len();
        let even = self.lattices[0];
        let odd = self.lattices[1];
        let m_out = odd.len();
        let mut na = vec![ZERO; steps * m_out];
        let mut d = vec![ZERO; steps * steps];
        let mut pow2 = vec![0.0; steps + 1];
        for &i0 in &self.z0_support {
            let q0 = even.q(i0);
            for (l2, &q2) in qxi.iter().enumerate() {
                let Some(i_eta) = odd.index(q0 - q2) else { continue };
                let q_eta = q0 - q2;
                d.iter_mut().for_each(|v| *v = ZERO);
                for (l3, &q3) in qxi.iter().enumerate() {
                    if even.index(q_eta + q3).is_none() || odd.index(q0 + q3).is_none() {
                        continue;
                    }
                    let z2 = (q_eta + q3) as f64 * dxi / 2.0;
                    let z1 = (q0 + q3) as f64 * dxi / 2.0;
                    let e2 = (-h * z2 * z2 / 2.0).exp();
                    let e1 = (-h * z1 * z1 / 2.0).exp();
                    pow2[0] = 1.0;
                    for lag in 1..=steps {
                        pow2[lag] = pow2[lag - 1] * e2;
                    }
                    let c = weights[l3] * weights[l3] * h;
                    let pr = &state.pairing[l3 * (steps + 1)..(l3 + 1) * (steps + 1)];
                    for n3 in 0..steps {
                        let mut jv = ZERO;
                        let row = &mut d[n3 * steps..(n3 + 1) * steps];
                        for n2 in 0..n3 {
                            row[n2] += c * pow2[n3 - n2] * jv;
                            jv = e1 * (jv + h * pr[n3 - n2] * self.z0[n2 * even.len() + i0]);
                        }
                    }
                }
                let w2 = weights[l2];
                for n3 in 0..steps {
                    let mut s = ZERO;
                    for n2 in 0..n3 {
                        s += d[n3 * steps + n2] * state.b[n2 * nx + l2];
                    }
                    na[n3 * m_out + i_eta] += w2 * s;
                }
            }
        }
        na
    }
}
