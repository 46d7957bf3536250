//! Run manifests: everything needed to reproduce an output file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use netdefense::experiments::SweepConfig;
use netdefense::powergrid::GridParams;
use netdefense::scenario::Scenario;

use crate::{Failure, Mode, Study};

/// A command with every input resolved (graphs inlined, seeds and
/// precision fixed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Resolved {
    Gen {
        spec: String,
    },
    Analyze {
        scenario: Scenario,
    },
    Simulate {
        scenario: Scenario,
        dt: f64,
        mode: Mode,
    },
    Sweep {
        config: SweepConfig,
        study: Study,
        max_attackers: Option<usize>,
        defender_fraction: f64,
    },
    Grid {
        params: GridParams,
        loads: Vec<usize>,
        generators: Vec<usize>,
        s: f64,
        r: f64,
        w0: f64,
        t0: f64,
        t_f: f64,
        precision_bits: u32,
    },
}

impl Resolved {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Resolved::Analyze { scenario } | Resolved::Simulate { scenario, .. } => Some(scenario.seed),
            Resolved::Sweep { config, .. } => Some(config.seed),
            Resolved::Gen { .. } | Resolved::Grid { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
    pub run: Resolved,
}

/// `out.csv` → `out.csv.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

pub fn write(run: &Resolved, output: &Path) -> Result<(), Failure> {
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: run.seed(),
        outputs: vec![output.to_path_buf()],
        run: run.clone(),
    };
    let path = manifest_path(output);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::usage(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })
}

pub fn read(path: &Path) -> Result<RunManifest, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}
