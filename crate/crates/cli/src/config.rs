use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use flowerperc::{Color, ModelParams};
use serde::{Deserialize, Serialize};

/// Bad user input; the process exits with status 2.
#[derive(Debug)]
pub struct ValidationError(pub String);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ValidationError(msg.into()).into()
}

/// Every option of every command. Unset fields fall back to the JSON config
/// file, then to the command's defaults.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Written into manifests; ignored when a manifest is read back.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    /// Flower parameter s as a decimal or a ratio like 1/10.
    #[arg(long)]
    pub s: Option<String>,
    /// Mesh sizes N, comma separated (arms: outer radii).
    #[arg(long = "n-mesh", value_delimiter = ',')]
    pub n_mesh: Option<Vec<u32>>,
    /// Iris period (at least 3).
    #[arg(long)]
    pub period: Option<u32>,
    /// Monte Carlo samples per experiment.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Master seed (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Crossing colour (blue or yellow).
    #[arg(long)]
    pub color: Option<String>,
    /// Rectangle height over width for `crossing`.
    #[arg(long)]
    pub aspect: Option<f64>,
    /// Inner radius for `arms`.
    #[arg(long)]
    pub m: Option<u32>,
    /// Domain for `render`: triangle, hexagon, rhombus or flower.
    #[arg(long)]
    pub shape: Option<String>,
    /// Uniform fill for `render` instead of a sample: blue or yellow.
    #[arg(long)]
    pub fill: Option<String>,
    /// Force every iris into this state for `render`: alpha, beta, gamma, blue or yellow.
    #[arg(long)]
    pub iris: Option<String>,
    /// Highlight the cluster through a hexagon, as `q,r` or `q,r,colour`.
    #[arg(long)]
    pub highlight: Option<String>,
    /// `contour`: integrate a constant field exactly instead of sampling.
    #[arg(long = "self-test", num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_test: Option<bool>,
    /// Check the convergence properties and exit with status 3 if they fail.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<bool>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("bad config {}: {e}", path.display())))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlaid(mut self, flags: &ExperimentConfig) -> Self {
        overlay!(
            self, flags, s, n_mesh, period, samples, seed, workers, out, color, aspect, m, shape, fill, iris,
            highlight, self_test, check
        );
        self
    }
}

/// Defaults that differ between commands.
pub struct Defaults {
    pub n_mesh: &'static [u32],
    pub samples: u64,
}

/// A validated configuration with every field filled in.
pub struct Resolved {
    pub cfg: ExperimentConfig,
    pub params: ModelParams,
    pub ns: Vec<u32>,
    pub period: u32,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub color: Color,
}

pub fn resolve(command: &str, mut cfg: ExperimentConfig, d: Defaults) -> anyhow::Result<Resolved> {
    cfg.command = Some(command.to_string());
    let seed = cfg.seed.ok_or_else(|| invalid("--seed is required"))?;
    let s = cfg.s.get_or_insert_with(|| "1/10".into()).clone();
    let params = ModelParams::parse(&s).map_err(|e| invalid(e.to_string()))?;
    let ns = cfg.n_mesh.get_or_insert_with(|| d.n_mesh.to_vec()).clone();
    if ns.is_empty() {
        return Err(invalid("--n-mesh needs at least one value"));
    }
    let period = *cfg.period.get_or_insert(3);
    if period < 3 {
        return Err(invalid(format!("period {period} is below 3")));
    }
    let samples = *cfg.samples.get_or_insert(d.samples);
    if samples == 0 {
        return Err(invalid("--samples must be positive"));
    }
    let workers = *cfg.workers.get_or_insert(0);
    let out = cfg.out.get_or_insert_with(|| PathBuf::from(".")).clone();
    let color: Color = cfg.color.get_or_insert_with(|| "blue".into()).parse().map_err(|e: flowerperc::Error| invalid(e.to_string()))?;
    Ok(Resolved { cfg, params, ns, period, samples, seed, workers, out, color })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file_values() {
        let file = ExperimentConfig { s: Some("1/20".into()), seed: Some(1), samples: Some(5), ..Default::default() };
        let flags = ExperimentConfig { seed: Some(9), ..Default::default() };
        let c = file.overlaid(&flags);
        assert_eq!(c.seed, Some(9));
        assert_eq!(c.s.as_deref(), Some("1/20"));
        assert_eq!(c.samples, Some(5));
    }

    #[test]
    fn validation() {
        let d = || Defaults { n_mesh: &[10], samples: 100 };
        assert!(resolve("x", ExperimentConfig::default(), d()).is_err());
        let ok = ExperimentConfig { seed: Some(1), ..Default::default() };
        let r = resolve("x", ok.clone(), d()).unwrap();
        assert_eq!(r.ns, vec![10]);
        assert_eq!(r.cfg.s.as_deref(), Some("1/10"));
        for bad in [
            ExperimentConfig { s: Some("0.2".into()), ..ok.clone() },
            ExperimentConfig { period: Some(2), ..ok.clone() },
            ExperimentConfig { samples: Some(0), ..ok.clone() },
            ExperimentConfig { color: Some("green".into()), ..ok.clone() },
        ] {
            let e = resolve("x", bad, d()).err().unwrap();
            assert!(e.downcast_ref::<ValidationError>().is_some());
        }
    }
}
