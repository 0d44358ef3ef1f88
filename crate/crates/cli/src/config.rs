use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use magtorus::io::LatticeSpec;
use magtorus::Lattice64;
use serde::{Deserialize, Serialize};

/// Experiment parameters, read from a TOML file and overridden by flags.
///
/// ```toml
/// seed = 42
/// bandwidth = 4          # max(|m|,|n|) of the random fields
/// target_margin = 0.2    # margin of B as a fraction of |b0|
/// k = 64                 # harmonics per direction
/// m = 512                # inversion samples per direction
/// # n = 1024             # forward quadrature nodes (default: automatic)
/// n2 = 128               # fundamental-domain grid for the reduction spot check
/// max_dir = 4            # largest primitive direction, sup norm
/// out = "out"
/// sweep = [8, 16, 24, 32, 48, 64]
/// radius = 5.0           # genericity check radius
/// plot_grid = 64
/// # b0 = 5.71            # check: mean field (default: one flux quantum)
///
/// [lattice]
/// e1 = [1.0, 0.0]
/// e2 = [0.3, 1.1]
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub bandwidth: i64,
    pub target_margin: f64,
    pub k: usize,
    pub m: usize,
    pub n: Option<usize>,
    pub n2: usize,
    pub max_dir: i64,
    pub out: PathBuf,
    pub sweep: Vec<usize>,
    pub radius: f64,
    pub plot_grid: usize,
    pub b0: Option<f64>,
    pub lattice: LatticeSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            bandwidth: 4,
            target_margin: 0.2,
            k: 64,
            m: 512,
            n: None,
            n2: 128,
            max_dir: 4,
            out: PathBuf::from("out"),
            sweep: vec![8, 16, 24, 32, 48, 64],
            radius: 5.0,
            plot_grid: 64,
            b0: None,
            lattice: LatticeSpec {
                e1: [1.0, 0.0],
                e2: [0.3, 1.1],
            },
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.m == 0 || self.n2 == 0 || self.plot_grid == 0 {
            bail!("resolutions k, m, n2 and plot_grid must be positive");
        }
        if self.n == Some(0) {
            bail!("n must be positive");
        }
        if self.m < 4 * self.k {
            bail!("m = {} must be at least 4k = {}", self.m, 4 * self.k);
        }
        if self.max_dir < 1 {
            bail!("max_dir must be at least 1");
        }
        if self.bandwidth < 0 {
            bail!("bandwidth must be non-negative");
        }
        if !(self.target_margin > 0.0 && self.target_margin < 1.0) {
            bail!("target_margin must lie in (0,1), got {}", self.target_margin);
        }
        if !(self.radius > 0.0) {
            bail!("radius must be positive");
        }
        self.lattice()?;
        Ok(())
    }

    pub fn lattice(&self) -> Result<Lattice64> {
        Ok(self.lattice.build()?)
    }

    /// Sweep values not exceeding `k`, with `k` itself appended.
    pub fn sweep_ks(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.sweep.iter().copied().filter(|&s| s >= 1 && s <= self.k).collect();
        ks.push(self.k);
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// Creates the output directory.
    pub fn prepare_out(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out)
            .with_context(|| format!("creating output directory {}", self.out.display()))?;
        Ok(&self.out)
    }
}
