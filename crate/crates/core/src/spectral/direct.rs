//! Literal cell-sum evaluation of the chaos terms, for small grids.
//!
//! `I_k = sum over cell tuples of F(tau, xi) prod_j weight(tau_j, xi_j) W(tau_j, xi_j)`,
//! where `F` is the temporal Fourier transform of the kernel and each weight
//! is the square root of the cell average of the spectral densities. Its cost is
//! `cells^k`, so it only serves as a cross-check of the recursive engine.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier_time::{cell_spatial_weight, cell_temporal_weight, for_each_simplex_node, TimeRule};
use super::grid::FrequencyTimeGrid;
use super::noise::NoiseDraw;
use crate::error::{Error, Result};
use crate::kernels::{fourier_chaos_kernel, OrderedTimes};
use crate::measure::InitialMeasure;
use crate::params::{SpatialParam, TemporalParam};

/// Which products of paired cells are removed from the tuple sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// Every tuple minus, for each index pair, the tuples in which the two
    /// cells are Hermitian mirrors. This is what the recursive engine computes.
    FirstOrder,
    /// Only tuples without any mirrored pair.
    ExcludeMirror,
    /// Only tuples without mirrored or repeated cells.
    ExcludeAll,
}

#[allow(clippy::too_many_arguments)]
pub fn direct_chaos(
    k: usize,
    param: &SpatialParam,
    temporal: &TemporalParam,
    grid: &FrequencyTimeGrid,
    draw: &NoiseDraw,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    rule: TimeRule,
    pairing: Pairing,
) -> Result<Complex64> {
    if grid.d != 1 {
        return Err(Error::Usage("direct evaluation is implemented for d = 1".into()));
    }
    if k == 0 || k > grid.k_max {
        return Err(Error::Capacity(format!("order {k} exceeds K_max = {}", grid.k_max)));
    }
    let cells = grid.cell_count();
    let tuples = (cells as f64).powi(k as i32);
    if tuples > grid.memory_budget as f64 {
        return Err(Error::Capacity(format!(
            "{tuples:e} cell tuples exceed the budget of {}",
            grid.memory_budget
        )));
    }
    let nx = grid.xi.n;
    // time nodes of the rule
    let mut nodes: Vec<(Vec<f64>, f64)> = Vec::new();
    for_each_simplex_node(rule, k, t, |ts, w| nodes.push((ts.to_vec(), w)));
    // kernel values for each xi tuple at every time node
    let xi_tuples = nx.pow(k as u32);
    let mut phi = vec![Complex64::new(0.0, 0.0); xi_tuples * nodes.len()];
    let mut idx = vec![0usize; k];
    for xt in 0..xi_tuples {
        decode(xt, nx, &mut idx);
        let xis: Vec<Vec<f64>> = idx.iter().map(|&l| vec![grid.xi.center(l)]).collect();
        for (ni, (ts, _)) in nodes.iter().enumerate() {
            let ord = OrderedTimes::new(t, ts.clone())?;
            phi[xt * nodes.len() + ni] = fourier_chaos_kernel(&[x], &ord, &xis, u0)?.value;
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut cidx = vec![0usize; k];
    let mut tidx = vec![0usize; k];
    for flat in 0..cells.pow(k as u32) {
        decode(flat, cells, &mut cidx);
        let mut mirrored = 0usize;
        let mut repeated = false;
        for a in 0..k {
            for b in a + 1..k {
                if cidx[b] == cells - 1 - cidx[a] {
                    mirrored += 1;
                }
                if cidx[b] == cidx[a] {
                    repeated = true;
                }
            }
        }
        let factor = match pairing {
            Pairing::FirstOrder => 1.0 - mirrored as f64,
            Pairing::ExcludeMirror => f64::from(u8::from(mirrored == 0)),
            Pairing::ExcludeAll => f64::from(u8::from(mirrored == 0 && !repeated)),
        };
        if factor == 0.0 {
            continue;
        }
        let mut prod = Complex64::new(factor, 0.0);
        let mut xt = 0;
        for (j, &c) in cidx.iter().enumerate() {
            let (ti, li) = (c / nx, c % nx);
            tidx[j] = ti;
            xt = xt * nx + li;
            let (a, b) = grid.tau.edges(ti);
            let (c, d) = grid.xi.edges(li);
            let w = cell_temporal_weight(temporal, a, b) * cell_spatial_weight(param, c, d);
            prod *= w * draw.value(ti, li);
        }
        if prod == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut f = Complex64::new(0.0, 0.0);
        for (ni, (ts, w)) in nodes.iter().enumerate() {
            let ph: f64 = -tidx
                .iter()
                .zip(ts)
                .map(|(&ti, &s)| grid.tau.center(ti) * s)
                .sum::<f64>();
            f += *w * Complex64::from_polar(1.0, ph) * phi[xt * nodes.len() + ni];
        }
        total += f * prod;
    }
    Ok(total)
}

fn decode(mut v: usize, base: usize, out: &mut [usize]) {
    for o in out.iter_mut().rev() {
        *o = v % base;
        v /= base;
    }
}
