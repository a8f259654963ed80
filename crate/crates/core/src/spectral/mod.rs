//! Discretized complex white noise shared by every spatial parameter, the
//! chaos terms it drives, their second moments and tail majorants.

pub mod bounds;
pub mod direct;
pub mod engine;
pub mod fourier_time;
pub mod grid;
pub mod noise;
pub mod variance;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{heat_evolve, InitialMeasure};
use crate::params::{SpatialParam, TemporalParam};

pub use bounds::{chaos_tail_bound, per_term_majorant, TailBound};
pub use direct::{direct_chaos, Pairing};
pub use engine::{ChaosField, DrawState, Simulator, IMAG_TOLERANCE};
pub use fourier_time::{spectral_weights, time_fourier_of_kernel, TimeRule};
pub use grid::{build_grid, FrequencyTimeGrid, GridConfig, Lattice, TimeGrid};
pub use noise::{sample_noise, NoiseDraw};
pub use variance::{chaos_variance, VarianceConfig};

/// Time discretization of single-point evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub time_steps: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { time_steps: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub hash: String,
    pub xi_cutoff: f64,
    pub xi_cells: usize,
    pub tau_cutoff: f64,
    pub tau_cells: usize,
    pub time_steps: usize,
}

impl GridMeta {
    fn new(grid: &FrequencyTimeGrid, steps: usize) -> Self {
        GridMeta {
            hash: grid.hash(),
            xi_cutoff: grid.xi.half_width,
            xi_cells: grid.xi.n,
            tau_cutoff: grid.tau.half_width,
            tau_cells: grid.tau.n,
            time_steps: steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosEvaluation {
    pub k: usize,
    pub t: f64,
    pub x: f64,
    pub value: f64,
    pub variance: Option<f64>,
    pub param: SpatialParam,
    pub grid: GridMeta,
}

fn simulate(
    k: usize,
    param: &SpatialParam,
    temporal: &TemporalParam,
    grid: &FrequencyTimeGrid,
    noise: &NoiseDraw,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    cfg: &EngineConfig,
) -> Result<ChaosField> {
    param.ensure_admissible(temporal)?;
    let time = TimeGrid::new(t, cfg.time_steps)?;
    let sim = Simulator::new(grid, temporal, time, u0, k.max(1) as f64 * grid.xi.half_width)?;
    let state = sim.prepare(noise)?;
    sim.evaluate(&state, param, k.max(1), &[t], &[x])
}

/// `I_k(f_{t,x,k})` on one noise draw.
#[allow(clippy::too_many_arguments)]
pub fn chaos_integral(
    k: usize,
    param: &SpatialParam,
    temporal: &TemporalParam,
    grid: &FrequencyTimeGrid,
    noise: &NoiseDraw,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    cfg: &EngineConfig,
) -> Result<ChaosEvaluation> {
    if k == 0 {
        return Err(Error::Usage("chaos order must be at least 1".into()));
    }
    let field = simulate(k, param, temporal, grid, noise, t, x, u0, cfg)?;
    Ok(ChaosEvaluation {
        k,
        t,
        x,
        value: field.term(k, 0, 0),
        variance: None,
        param: *param,
        grid: GridMeta::new(grid, cfg.time_steps),
    })
}

/// `w(t, x) + sum_{k <= m} I_k(f_{t,x,k})`.
#[allow(clippy::too_many_arguments)]
pub fn truncated_solution(
    m: usize,
    param: &SpatialParam,
    temporal: &TemporalParam,
    grid: &FrequencyTimeGrid,
    noise: &NoiseDraw,
    t: f64,
    x: f64,
    u0: &InitialMeasure,
    cfg: &EngineConfig,
) -> Result<f64> {
    let w = heat_evolve(u0, t, &[x])?.w;
    if m == 0 {
        param.ensure_admissible(temporal)?;
        return Ok(w);
    }
    let field = simulate(m, param, temporal, grid, noise, t, x, u0, cfg)?;
    Ok(w + field.partial_sum(m, 0, 0))
}
