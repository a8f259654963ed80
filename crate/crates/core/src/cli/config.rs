//! Experiment configuration: TOML with the sections `[params]`, `[grid]`,
//! `[mc]`, `[io]` and `[experiment]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::InitialMeasure;
use crate::params::{ParamWindow, SpatialParam, TemporalParam, WindowKind};
use crate::spectral::GridConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    KernelCheck,
    SimplexCheck,
    Variance,
    Simulate,
    Converge,
    Holder,
    Tail,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::KernelCheck => "kernel-check",
            Command::SimplexCheck => "simplex-check",
            Command::Variance => "variance",
            Command::Simulate => "simulate",
            Command::Converge => "converge",
            Command::Holder => "holder",
            Command::Tail => "tail",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Regular,
    Rough,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsBlock {
    pub family: Family,
    pub d: usize,
    pub alpha: Option<f64>,
    pub h: Option<f64>,
    pub h0: f64,
    pub window: Option<[f64; 2]>,
    pub t: f64,
    pub x: f64,
    /// Initial measure in the text format of [`InitialMeasure`].
    pub u0: String,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        ParamsBlock {
            family: Family::Regular,
            d: 1,
            alpha: None,
            h: None,
            h0: 0.75,
            window: None,
            t: 1.0,
            x: 0.0,
            u0: "lebesgue 1".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub xi_cutoff: f64,
    pub xi_cells: usize,
    pub tau_cutoff: f64,
    pub tau_cells: usize,
    pub k_max: usize,
    pub time_steps: usize,
    pub memory_budget: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        let g = GridConfig::default();
        GridBlock {
            xi_cutoff: g.xi_cutoff,
            xi_cells: g.xi_cells,
            tau_cutoff: g.tau_cutoff,
            tau_cells: g.tau_cells,
            k_max: g.k_max,
            time_steps: 32,
            memory_budget: g.memory_budget,
        }
    }
}

impl GridBlock {
    pub fn grid_config(&self, d: usize) -> GridConfig {
        GridConfig {
            xi_cutoff: self.xi_cutoff,
            xi_cells: self.xi_cells,
            tau_cutoff: self.tau_cutoff,
            tau_cells: self.tau_cells,
            d,
            k_max: self.k_max,
            memory_budget: self.memory_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McBlock {
    pub seeds: usize,
    pub samples: u64,
    pub base_seed: u64,
}

impl Default for McBlock {
    fn default() -> Self {
        McBlock { seeds: 200, samples: 1_000_000, base_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoBlock {
    pub out: String,
    pub cache: Option<String>,
}

impl Default for IoBlock {
    fn default() -> Self {
        IoBlock { out: "pamlab-out".into(), cache: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentBlock {
    /// Chaos orders for `variance`.
    pub orders: Vec<usize>,
    /// Truncation level of the simulated series.
    pub m: usize,
    /// The sequence is `p* + gap 2^{-n}` for `n = 0..=halvings`.
    pub halvings: usize,
    /// Initial gap `|p_0 - p*|`; halves at each step.
    pub gap: f64,
    /// Order of the continuity curve.
    pub k: usize,
    /// Simplex order and exponent of `simplex-check`.
    pub n: usize,
    pub exponent: f64,
    /// Random draws of `kernel-check`.
    pub draws: usize,
    pub p: f64,
    pub t0: f64,
    pub bases: Vec<f64>,
    pub time_ladder: Vec<usize>,
    pub space_ladder: Vec<f64>,
    pub window_points: usize,
    pub beta: f64,
    pub c0: f64,
    pub m_from: usize,
    pub m_to: usize,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        ExperimentBlock {
            orders: vec![1, 2],
            m: 3,
            halvings: 5,
            gap: 0.2,
            k: 1,
            n: 2,
            exponent: -0.5,
            draws: 20,
            p: 2.0,
            t0: 0.5,
            bases: vec![-0.5, 0.0, 0.5],
            time_ladder: vec![1, 2, 4, 8],
            space_ladder: vec![0.0625, 0.125, 0.25, 0.5, 1.0],
            window_points: 5,
            beta: 0.45,
            c0: 0.1,
            m_from: 5,
            m_to: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub params: ParamsBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub mc: McBlock,
    #[serde(default)]
    pub io: IoBlock,
    #[serde(default)]
    pub experiment: ExperimentBlock,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
            Error::Parse { line, message: e.message().to_string() }
        })
    }

    pub fn temporal(&self) -> Result<TemporalParam> {
        TemporalParam::new(self.params.h0)
    }

    /// The configured spatial parameter, checked for admissibility.
    pub fn spatial(&self) -> Result<SpatialParam> {
        let p = &self.params;
        let sp = match p.family {
            Family::Regular => SpatialParam::Regular {
                d: p.d,
                alpha: p.alpha.ok_or_else(|| Error::Usage("params.alpha is required for the regular family".into()))?,
            },
            Family::Rough => SpatialParam::Rough {
                h: p.h.ok_or_else(|| Error::Usage("params.h is required for the rough family".into()))?,
            },
        };
        sp.ensure_admissible(&self.temporal()?)?;
        Ok(sp)
    }

    pub fn window(&self) -> Result<ParamWindow> {
        let [a, b] = self
            .params
            .window
            .ok_or_else(|| Error::Usage("params.window is required for this command".into()))?;
        let kind = match self.params.family {
            Family::Regular => WindowKind::Regular { d: self.params.d },
            Family::Rough => WindowKind::Rough,
        };
        ParamWindow::new(a, b, kind, &self.temporal()?)
    }

    pub fn initial_measure(&self) -> Result<InitialMeasure> {
        self.params.u0.parse()
    }
}
