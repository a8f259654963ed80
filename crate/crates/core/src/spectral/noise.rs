//! Hermitian complex Gaussian white noise on a frequency grid, and its on-disk cache.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::grid::FrequencyTimeGrid;
use crate::error::{Error, Result};

/// One realization of the noise on every (tau, xi) cell.
///
/// Cells are stored tau-major; the flat index of the mirror cell `(-tau, -xi)`
/// of cell `c` is `len - 1 - c`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    pub seed: u64,
    pub grid_hash: String,
    tau_n: usize,
    xi_n: usize,
    values: Vec<Complex64>,
}

impl NoiseDraw {
    pub fn zeros(grid: &FrequencyTimeGrid) -> Self {
        NoiseDraw {
            seed: 0,
            grid_hash: grid.hash(),
            tau_n: grid.tau.n,
            xi_n: grid.xi_cells_total(),
            values: vec![Complex64::new(0.0, 0.0); grid.cell_count()],
        }
    }

    pub fn value(&self, tau_idx: usize, xi_idx: usize) -> Complex64 {
        self.values[tau_idx * self.xi_n + xi_idx]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn tau_len(&self) -> usize {
        self.tau_n
    }

    pub fn xi_len(&self) -> usize {
        self.xi_n
    }

    pub fn mirror(&self, flat: usize) -> usize {
        self.values.len() - 1 - flat
    }

    /// Cellwise sum of two draws on the same grid.
    pub fn add(&self, other: &NoiseDraw) -> Result<NoiseDraw> {
        if self.grid_hash != other.grid_hash {
            return Err(Error::Usage("noise draws live on different grids".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }

    /// Largest `|value(-c) - conj(value(c))|` over all cells.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.values.len())
            .map(|c| (self.values[self.mirror(c)] - self.values[c].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Draws the noise with a ChaCha8 stream seeded by `seed`.
///
/// The first half of the cells (in flat order) are independent complex
/// Gaussians whose real and imaginary parts each have variance half the
/// cell measure; the second half are their conjugate mirrors.
pub fn sample_noise(grid: &FrequencyTimeGrid, seed: u64) -> NoiseDraw {
    let mut draw = NoiseDraw::zeros(grid);
    draw.seed = seed;
    let sd = (grid.cell_measure() / 2.0).sqrt();
    let normal = Normal::new(0.0, sd).expect("finite sd");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = draw.values.len();
    for c in 0..len / 2 {
        let re = normal.sample(&mut rng);
        let im = normal.sample(&mut rng);
        let z = Complex64::new(re, im);
        draw.values[c] = z;
        draw.values[len - 1 - c] = z.conj();
    }
    draw
}

const MAGIC: &[u8; 8] = b"PAMNOIS1";

/// Cache file name for a (grid, seed) pair.
pub fn cache_path(dir: &Path, grid: &FrequencyTimeGrid, seed: u64) -> PathBuf {
    dir.join(format!("{}_{seed}.noise", &grid.hash()[..16]))
}

pub fn save_noise(draw: &NoiseDraw, path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(64 + 16 * draw.values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(draw.grid_hash.as_bytes());
    buf.extend_from_slice(&draw.seed.to_le_bytes());
    buf.extend_from_slice(&(draw.tau_n as u64).to_le_bytes());
    buf.extend_from_slice(&(draw.xi_n as u64).to_le_bytes());
    for v in &draw.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

/// Loads a cached draw, checking that it belongs to `grid` and `seed`.
pub fn load_noise(path: &Path, grid: &FrequencyTimeGrid, seed: u64) -> Result<NoiseDraw> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |m: &str| Error::Io(format!("{}: {m}", path.display()));
    let hash = grid.hash();
    let head = MAGIC.len() + hash.len() + 24;
    if bytes.len() < head || &bytes[..8] != MAGIC {
        return Err(bad("not a noise cache file"));
    }
    if &bytes[8..8 + hash.len()] != hash.as_bytes() {
        return Err(bad("grid hash mismatch"));
    }
    let word = |i: usize| {
        let o = 8 + hash.len() + 8 * i;
        u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"))
    };
    if word(0) != seed {
        return Err(bad("seed mismatch"));
    }
    let (tau_n, xi_n) = (word(1) as usize, word(2) as usize);
    if tau_n != grid.tau.n || xi_n != grid.xi_cells_total() {
        return Err(bad("lattice size mismatch"));
    }
    let n = tau_n * xi_n;
    if bytes.len() != head + 16 * n {
        return Err(bad("truncated payload"));
    }
    let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let values = (0..n)
        .map(|i| Complex64::new(f(head + 16 * i), f(head + 16 * i + 8)))
        .collect();
    Ok(NoiseDraw {
        seed,
        grid_hash: hash,
        tau_n,
        xi_n,
        values,
    })
}

/// Returns the cached draw for `(grid, seed)` under `dir`, sampling and
/// storing it on a miss.
pub fn cached_noise(dir: &Path, grid: &FrequencyTimeGrid, seed: u64) -> Result<NoiseDraw> {
    let path = cache_path(dir, grid, seed);
    if path.exists() {
        return load_noise(&path, grid, seed);
    }
    std::fs::create_dir_all(dir)?;
    let draw = sample_noise(grid, seed);
    save_noise(&draw, &path)?;
    Ok(draw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::{build_grid, GridConfig};

    fn small() -> FrequencyTimeGrid {
        build_grid(&GridConfig {
            xi_cells: 8,
            tau_cells: 8,
            ..GridConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn cache_round_trip() {
        let g = small();
        let dir = tempfile::tempdir().unwrap();
        let a = cached_noise(dir.path(), &g, 7).unwrap();
        let b = cached_noise(dir.path(), &g, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, sample_noise(&g, 7));
        assert!(load_noise(&cache_path(dir.path(), &g, 7), &g, 8).is_err());
    }

    #[test]
    fn add_requires_same_grid() {
        let g = small();
        let h = build_grid(&GridConfig {
            xi_cells: 10,
            tau_cells: 8,
            ..GridConfig::default()
        })
        .unwrap();
        assert!(sample_noise(&g, 1).add(&sample_noise(&h, 1)).is_err());
    }
}
