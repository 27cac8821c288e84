//! Campaign configuration: TOML sections with per-key CLI overrides.

use std::path::{Path, PathBuf};

use qrr_core::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub campaign: CampaignSection,
    pub quantum: QuantumSection,
    pub classical: ClassicalSection,
    pub runtime: RuntimeSection,
    pub external: ExternalSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignSection {
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// "model": deterministic planning costs, byte-reproducible outputs.
    /// "wall": measured wall clock.
    pub timing: String,
    /// Heuristic oracle restarts per family for best-known cuts.
    pub oracle_restarts: usize,
    pub oracle_sa_sweeps: usize,
    pub oracle_bm_passes: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumSection {
    pub p: usize,
    /// exact | analytic | sampled
    pub backend: String,
    pub n_ex: usize,
    /// Greedy visit budget in units of n.
    pub f: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalSection {
    pub sa_sweeps_grid: Vec<usize>,
    pub bm_passes_grid: Vec<u32>,
    pub runs_per_point: usize,
    pub alpha_solvers: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuntimeSection {
    pub machine_qubits: usize,
    pub n_ex: u64,
    /// current | target
    pub gates: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExternalSection {
    /// CSV of externally produced results:
    /// instance_id,solver,control,cut,t_ms,capped
    pub results: Option<PathBuf>,
    /// Run-time cap marking lower-bound rows.
    pub cap_seconds: f64,
}

impl Default for CampaignSection {
    fn default() -> Self {
        CampaignSection {
            sizes: vec![32, 64, 128],
            instances_per_size: 20,
            seed: 0,
            out: PathBuf::from("campaign_out"),
            timing: "model".into(),
            oracle_restarts: 40,
            oracle_sa_sweeps: 1000,
            oracle_bm_passes: 6,
        }
    }
}

impl Default for QuantumSection {
    fn default() -> Self {
        QuantumSection {
            p: 1,
            backend: "analytic".into(),
            n_ex: 10_000,
            f: 10.0,
        }
    }
}

impl Default for ClassicalSection {
    fn default() -> Self {
        ClassicalSection {
            sa_sweeps_grid: vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512],
            bm_passes_grid: vec![1, 2, 4, 8],
            runs_per_point: 32,
            alpha_solvers: vec![
                "qaoa".into(),
                "qrr".into(),
                "qrr_star".into(),
                "rr".into(),
                "greedy".into(),
                "sa".into(),
                "bm".into(),
            ],
        }
    }
}

impl Default for RuntimeSection {
    fn default() -> Self {
        RuntimeSection {
            machine_qubits: 100,
            n_ex: 5000,
            gates: "current".into(),
        }
    }
}

impl Default for ExternalSection {
    fn default() -> Self {
        ExternalSection {
            results: None,
            cap_seconds: 600.0,
        }
    }
}

/// CLI flags mirroring the config keys; `Some` wins over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub sizes: Option<Vec<usize>>,
    pub instances_per_size: Option<usize>,
    pub out: Option<PathBuf>,
    pub timing: Option<String>,
    pub p: Option<usize>,
    pub backend: Option<String>,
    pub n_ex: Option<usize>,
    pub f: Option<f64>,
    pub oracle_restarts: Option<usize>,
    pub sa_sweeps_grid: Option<Vec<usize>>,
    pub bm_passes_grid: Option<Vec<u32>>,
    pub runs_per_point: Option<usize>,
    pub alpha_solvers: Option<Vec<String>>,
    pub machine_qubits: Option<usize>,
    pub runtime_n_ex: Option<u64>,
    pub gates: Option<String>,
    pub external_results: Option<PathBuf>,
    pub external_cap_seconds: Option<f64>,
    pub seed: Option<u64>,
}

pub fn load(path: Option<&Path>, ov: Overrides) -> Result<CampaignConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            if text.trim().is_empty() {
                return Err(Error::invalid(format!(
                    "config file {} is empty",
                    p.display()
                )));
            }
            toml::from_str(&text).map_err(|e| Error::format(format!("config: {e}")))?
        }
        None => CampaignConfig::default(),
    };
    macro_rules! apply {
        ($field:expr, $ov:expr) => {
            if let Some(v) = $ov {
                $field = v;
            }
        };
    }
    apply!(cfg.campaign.sizes, ov.sizes);
    apply!(cfg.campaign.instances_per_size, ov.instances_per_size);
    apply!(cfg.campaign.out, ov.out);
    apply!(cfg.campaign.timing, ov.timing);
    apply!(cfg.campaign.seed, ov.seed);
    apply!(cfg.campaign.oracle_restarts, ov.oracle_restarts);
    apply!(cfg.quantum.p, ov.p);
    apply!(cfg.quantum.backend, ov.backend);
    apply!(cfg.quantum.n_ex, ov.n_ex);
    apply!(cfg.quantum.f, ov.f);
    apply!(cfg.classical.sa_sweeps_grid, ov.sa_sweeps_grid);
    apply!(cfg.classical.bm_passes_grid, ov.bm_passes_grid);
    apply!(cfg.classical.runs_per_point, ov.runs_per_point);
    apply!(cfg.classical.alpha_solvers, ov.alpha_solvers);
    apply!(cfg.runtime.machine_qubits, ov.machine_qubits);
    apply!(cfg.runtime.n_ex, ov.runtime_n_ex);
    apply!(cfg.runtime.gates, ov.gates);
    if ov.external_results.is_some() {
        cfg.external.results = ov.external_results;
    }
    apply!(cfg.external.cap_seconds, ov.external_cap_seconds);
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &CampaignConfig) -> Result<()> {
    if cfg.campaign.sizes.is_empty() {
        return Err(Error::invalid("campaign.sizes must not be empty"));
    }
    for &n in &cfg.campaign.sizes {
        if n < 4 || n % 2 != 0 {
            return Err(Error::invalid(format!("size {n} must be even and >= 4")));
        }
    }
    if cfg.campaign.instances_per_size == 0 {
        return Err(Error::invalid("campaign.instances_per_size must be >= 1"));
    }
    match cfg.campaign.timing.as_str() {
        "model" | "wall" => {}
        other => {
            return Err(Error::invalid(format!(
                "timing must be model or wall, got '{other}'"
            )))
        }
    }
    match cfg.runtime.gates.as_str() {
        "current" | "target" => {}
        other => {
            return Err(Error::invalid(format!(
                "gates must be current or target, got '{other}'"
            )))
        }
    }
    let known = [
        "qaoa", "qrr", "qrr_star", "rr", "gw", "qgw", "sa", "pt", "greedy", "bm",
    ];
    for s in &cfg.classical.alpha_solvers {
        if !known.contains(&s.as_str()) {
            return Err(Error::invalid(format!(
                "unknown solver '{s}' in alpha_solvers"
            )));
        }
    }
    crate::registry::parse_backend(&cfg.quantum.backend, cfg.quantum.n_ex, 0)?;
    if cfg.classical.runs_per_point == 0 {
        return Err(Error::invalid("classical.runs_per_point must be >= 1"));
    }
    Ok(())
}
