//! Truncated frequency lattices and the time grid used for simulation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Symmetric lattice of `n` cells of equal width covering `[-half_width, half_width]`.
/// Centers sit at odd multiples of half a cell, so none is at the origin and
/// cell `i` pairs with cell `n - 1 - i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub half_width: f64,
    pub n: usize,
}

impl Lattice {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Usage(format!("cutoff {half_width} must be positive")));
        }
        if n < 8 {
            return Err(Error::Usage(format!("need at least 8 cells per axis, got {n}")));
        }
        if n % 2 != 0 {
            return Err(Error::Usage(format!(
                "cell count {n} is odd; the lattice would not be symmetric about 0 without a cell at 0"
            )));
        }
        Ok(Lattice { half_width, n })
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.width()
    }

    /// Edges `(lo, hi)` of cell `i`.
    pub fn edges(&self, i: usize) -> (f64, f64) {
        let lo = -self.half_width + i as f64 * self.width();
        (lo, lo + self.width())
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.center(i)).collect()
    }

    /// Index of the cell at `-center(i)`.
    pub fn mirror(&self, i: usize) -> usize {
        self.n - 1 - i
    }
}

/// Requested lattice sizes and resource limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Spatial frequency cutoff `R`.
    pub xi_cutoff: f64,
    pub xi_cells: usize,
    /// Temporal frequency cutoff `T_tau`.
    pub tau_cutoff: f64,
    pub tau_cells: usize,
    pub d: usize,
    /// Highest chaos order evaluated on this grid.
    pub k_max: usize,
    /// Budget for the working set of one evaluation, in complex numbers.
    pub memory_budget: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            xi_cutoff: 8.0,
            xi_cells: 64,
            tau_cutoff: 16.0,
            tau_cells: 128,
            d: 1,
            k_max: 3,
            memory_budget: 1 << 27,
        }
    }
}

/// Absolute cap on the chaos order.
pub const K_MAX_LIMIT: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTimeGrid {
    pub tau: Lattice,
    pub xi: Lattice,
    pub d: usize,
    pub k_max: usize,
    pub memory_budget: usize,
}

pub fn build_grid(config: &GridConfig) -> Result<FrequencyTimeGrid> {
    if config.d == 0 || config.d > crate::params::MAX_DIM {
        return Err(Error::Usage(format!("dimension {} unsupported", config.d)));
    }
    if config.k_max == 0 || config.k_max > K_MAX_LIMIT {
        return Err(Error::Capacity(format!(
            "chaos order {} outside 1..={K_MAX_LIMIT}",
            config.k_max
        )));
    }
    let grid = FrequencyTimeGrid {
        tau: Lattice::new(config.tau_cutoff, config.tau_cells)?,
        xi: Lattice::new(config.xi_cutoff, config.xi_cells)?,
        d: config.d,
        k_max: config.k_max,
        memory_budget: config.memory_budget,
    };
    let cells = grid.cell_count();
    if cells > config.memory_budget {
        return Err(Error::Capacity(format!(
            "{cells} noise cells exceed the budget of {}",
            config.memory_budget
        )));
    }
    Ok(grid)
}

impl FrequencyTimeGrid {
    pub fn xi_cells_total(&self) -> usize {
        self.xi.n.pow(self.d as u32)
    }

    /// Total number of (tau, xi) cells.
    pub fn cell_count(&self) -> usize {
        self.tau.n * self.xi_cells_total()
    }

    /// Number of Hermitian-independent cell pairs.
    pub fn independent_pairs(&self) -> usize {
        self.cell_count() / 2
    }

    /// Measure of one (tau, xi) cell.
    pub fn cell_measure(&self) -> f64 {
        self.tau.width() * self.xi.width().powi(self.d as i32)
    }

    /// Number of tau pairs `{tau, -tau}`.
    pub fn tau_pairs(&self) -> usize {
        self.tau.n / 2
    }

    /// Hex SHA-256 of the canonical lattice description.
    pub fn hash(&self) -> String {
        let text = format!(
            "tau {:e} {} xi {:e} {} d {}",
            self.tau.half_width, self.tau.n, self.xi.half_width, self.xi.n, self.d
        );
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Midpoint time nodes `r_n = (n - 1/2) h`, `n = 1..=steps`, on `[0, t_max]`.
/// Evaluation times are the grid points `s_m = m h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max > 0.0) || steps == 0 {
            return Err(Error::Usage("time grid needs t_max > 0 and at least one step".into()));
        }
        Ok(TimeGrid { t_max, steps })
    }

    pub fn step(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    pub fn node(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.step()
    }

    /// Index `m` with `m h = t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let m = (t / self.step()).round();
        if m < 1.0 || m > self.steps as f64 || (m * self.step() - t).abs() > 1e-9 * t.max(1.0) {
            return Err(Error::Usage(format!(
                "time {t} is not a positive multiple of the step {} up to {}",
                self.step(),
                self.t_max
            )));
        }
        Ok(m as usize)
    }
}
