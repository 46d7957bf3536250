//! Attacker-placement sweeps over noisy network realizations.
//!
//! Realizations are the outer loop: each one draws fresh diagonal noise,
//! factors the defender Gramian once and then evaluates every candidate
//! attacker against it. Undirected graphs go through [`SymmetricModes`];
//! directed graphs fall back to the general exponential-based path.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{
    augmented_gramian_in, check_controllable, maneuver_beta_in, output_gramian_in,
    report_from_parts, AttackerDrive, ControlProblem, EnergyReport, SymmetricModes,
};
use crate::error::{Error, Result};
use crate::netgen::{
    adjacency_realization, defender_distances, placement_matrix, AdjacencyConfig, Graph,
    GraphSource, Placement, SelfLoop,
};
use crate::numkernels::{cholesky, symmetric_eig, DenseMatrix, Real, SymmetricSpectrum};
use crate::precision::check_bits;
use crate::seeding::{self, Purpose};
use crate::sysmodel::{augment, AttackerModel, NetworkSystem};

fn default_realizations() -> u32 {
    100
}

fn default_bits() -> u32 {
    53
}

fn default_retries() -> u16 {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub graph: GraphSource,
    #[serde(default)]
    pub defenders: Vec<usize>,
    /// Every non-defender node when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<usize>>,
    pub attacker: AttackerDrive,
    #[serde(default)]
    pub t0: f64,
    pub t_f: f64,
    pub eps: f64,
    #[serde(default = "default_realizations")]
    pub realizations: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
    #[serde(default)]
    pub self_loop: SelfLoop,
    /// Noise redraws (or defender redraws in the scale-free study) before giving up.
    #[serde(default = "default_retries")]
    pub max_retries: u16,
}

impl SweepConfig {
    /// Loads a config; relative graph files are resolved against the config's directory.
    pub fn load(path: &Path) -> Result<(Self, Graph)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: SweepConfig = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        let graph = cfg.graph.resolve(path.parent())?;
        Ok((cfg, graph))
    }

    pub fn adjacency(&self) -> AdjacencyConfig {
        AdjacencyConfig {
            self_loop: self.self_loop,
            eps: self.eps,
            seed: self.seed,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.t_f - self.t0
    }

    fn validate(&self, g: &Graph) -> Result<()> {
        check_bits(self.precision_bits)?;
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be >= 1".into()));
        }
        if self.max_retries == 0 {
            return Err(Error::Config("max_retries must be >= 1".into()));
        }
        if !(self.horizon() > 0.0) || !self.t_f.is_finite() {
            return Err(Error::Config(format!(
                "need t_f > t0, got t0 = {}, t_f = {}",
                self.t0, self.t_f
            )));
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::Config(format!("eps = {} must be finite and >= 0", self.eps)));
        }
        if [self.attacker.s, self.attacker.r, self.attacker.w0].iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("attacker parameters must be finite".into()));
        }
        Placement::new(g.n, self.defenders.clone(), self.candidate_nodes(g))?;
        Ok(())
    }

    pub fn candidate_nodes(&self, g: &Graph) -> Vec<usize> {
        match &self.candidates {
            Some(c) => c.clone(),
            None => (1..=g.n).filter(|v| !self.defenders.contains(v)).collect(),
        }
    }
}

/// One attacker in one realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizationSample {
    pub realization: u32,
    /// Noise draw that produced a controllable pair.
    pub attempt: u16,
    pub node: usize,
    /// Signed `nᵀw₁` under the eigenvector sign convention.
    pub n_t_w1: f64,
    pub beta2: f64,
    pub e123: f64,
    pub e_exact: f64,
    pub mu1: f64,
    pub mu2: Option<f64>,
    pub log10_mu1: f64,
    pub log10_e_exact: f64,
    /// `Σᵢ (nᵀwᵢ)²`, one up to rounding.
    pub alignment_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub node: usize,
    pub degree: usize,
    /// Distance to the nearest defender; `None` if no defender reaches the node.
    pub delta: Option<usize>,
    /// Statistics of `|nᵀw₁|`.
    pub n_t_w1_mean: f64,
    pub n_t_w1_std: f64,
    pub beta2_mean: f64,
    pub beta2_std: f64,
    pub e123_mean: f64,
    pub e123_std: f64,
    pub e_exact_mean: f64,
    pub e_exact_std: f64,
    pub mu1: f64,
    pub mu2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub defenders: Vec<usize>,
    pub rows: Vec<SweepRow>,
    /// Ordered by realization, then by candidate.
    pub samples: Vec<RealizationSample>,
}

impl SweepOutcome {
    pub fn row(&self, node: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.node == node)
    }
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

struct Job<'a> {
    graph: &'a Graph,
    defenders: &'a [usize],
    candidates: &'a [usize],
    drive: AttackerDrive,
    adjacency: AdjacencyConfig,
    t0: f64,
    t_f: f64,
}

/// `sign` flips `nᵀw₁` when `w₁` was computed in a rotated basis.
fn sample_from<T: Real>(
    (realization, attempt, node): (u32, u16, usize),
    beta: &[T],
    factor: &DenseMatrix<T>,
    spectrum: &SymmetricSpectrum<T>,
    sign: f64,
) -> Result<RealizationSample> {
    let report: EnergyReport = report_from_parts(beta, factor, spectrum)?;
    Ok(RealizationSample {
        realization,
        attempt,
        node,
        n_t_w1: sign * report.n_t_w1,
        beta2: report.e1,
        e123: report.e_rank1,
        e_exact: report.e_exact,
        mu1: report.mu1,
        mu2: report.mu2,
        log10_mu1: report.log10_mu1,
        log10_e_exact: report.log10_e_exact,
        alignment_sum: report.alignment_sum,
    })
}

/// Sign that makes the largest-magnitude entry of `v` positive.
fn orientation<T: Real>(v: &[T]) -> f64 {
    v.iter()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .map(|x| if *x < T::zero() { -1.0 } else { 1.0 })
        .unwrap_or(1.0)
}

impl Job<'_> {
    /// Samples for one noise draw; `SingularGramian` if the draw is uncontrollable.
    fn evaluate<T: Real>(&self, realization: u32, attempt: u16) -> Result<Vec<RealizationSample>> {
        let a = adjacency_realization(self.graph, &self.adjacency, realization, attempt)?;
        let horizon = self.t_f - self.t0;
        if !self.graph.directed {
            // everything in the eigenbasis of A: W_p and β rotate by the same Q
            let modes = SymmetricModes::<T>::new(&a, horizon)?;
            let gramian = modes.modal_gramian(self.defenders);
            let spectrum = symmetric_eig(&gramian)?;
            check_controllable(&spectrum)?;
            let factor = cholesky(&gramian)?;
            let weights = modes.drive_weights(&self.drive)?;
            let sign = orientation(&modes.basis.mul_vec(&spectrum.vector(0)));
            return self
                .candidates
                .par_iter()
                .map(|&node| {
                    let beta = modes.modal_attack_beta(&weights, node);
                    sample_from((realization, attempt, node), &beta, &factor, &spectrum, sign)
                })
                .collect();
        }
        let n = self.graph.n;
        let defense = placement_matrix(n, self.defenders)?;
        let base = NetworkSystem::new(a.clone(), DenseMatrix::zeros(n, 0), defense.clone())?;
        let gramian = output_gramian_in::<T>(&base, horizon)?;
        let spectrum = symmetric_eig(&gramian)?;
        check_controllable(&spectrum)?;
        let factor = cholesky(&gramian)?;
        let atk = AttackerModel::uniform(1, self.drive.s, self.drive.r);
        self.candidates
            .par_iter()
            .map(|&node| {
                let sys = NetworkSystem::new(a.clone(), placement_matrix(n, &[node])?, defense.clone())?;
                let p = ControlProblem::new(
                    augment(&sys, &atk)?,
                    vec![0.0; n],
                    vec![self.drive.w0],
                    None,
                    self.t0,
                    self.t_f,
                )?;
                let beta = maneuver_beta_in::<T>(&p)?;
                sample_from((realization, attempt, node), &beta, &factor, &spectrum, 1.0)
            })
            .collect()
    }

    /// `Ok(None)` once `retries` noise draws in a row were uncontrollable.
    fn realization<T: Real>(&self, realization: u32, retries: u16) -> Result<Option<Vec<RealizationSample>>> {
        for attempt in 0..retries {
            match self.evaluate::<T>(realization, attempt) {
                Ok(s) => return Ok(Some(s)),
                Err(Error::SingularGramian { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    }

    fn run<T: Real>(&self, realizations: u32, retries: u16) -> Result<Option<SweepOutcome>> {
        let per: Vec<Option<Vec<RealizationSample>>> = (0..realizations)
            .into_par_iter()
            .map(|r| self.realization::<T>(r, retries))
            .collect::<Result<_>>()?;
        let Some(per) = per.into_iter().collect::<Option<Vec<_>>>() else {
            return Ok(None);
        };
        let degrees = self.graph.degrees();
        let dist = defender_distances(self.graph, self.defenders)?;
        let rows = self
            .candidates
            .iter()
            .enumerate()
            .map(|(k, &node)| {
                let col = |f: &dyn Fn(&RealizationSample) -> f64| -> Vec<f64> {
                    per.iter().map(|s| f(&s[k])).collect()
                };
                let (n_t_w1_mean, n_t_w1_std) = mean_std(&col(&|s| s.n_t_w1.abs()));
                let (beta2_mean, beta2_std) = mean_std(&col(&|s| s.beta2));
                let (e123_mean, e123_std) = mean_std(&col(&|s| s.e123));
                let (e_exact_mean, e_exact_std) = mean_std(&col(&|s| s.e_exact));
                let (mu1, _) = mean_std(&col(&|s| s.mu1));
                let mu2 = per[0][k].mu2.map(|_| mean_std(&col(&|s| s.mu2.unwrap_or(0.0))).0);
                SweepRow {
                    node,
                    degree: degrees[node - 1],
                    delta: dist[node - 1],
                    n_t_w1_mean,
                    n_t_w1_std,
                    beta2_mean,
                    beta2_std,
                    e123_mean,
                    e123_std,
                    e_exact_mean,
                    e_exact_std,
                    mu1,
                    mu2,
                }
            })
            .collect();
        Ok(Some(SweepOutcome {
            defenders: self.defenders.to_vec(),
            rows,
            samples: per.into_iter().flatten().collect(),
        }))
    }
}

fn job<'a>(cfg: &SweepConfig, g: &'a Graph, defenders: &'a [usize], candidates: &'a [usize]) -> Job<'a> {
    Job {
        graph: g,
        defenders,
        candidates,
        drive: cfg.attacker,
        adjacency: cfg.adjacency(),
        t0: cfg.t0,
        t_f: cfg.t_f,
    }
}

fn exhausted(defenders: &[usize], retries: u16) -> Error {
    Error::RetriesExhausted {
        defenders: defenders.to_vec(),
        attempts: retries,
    }
}

/// One row per candidate attacker, each a single-attacker problem with `x0 = 0`.
pub fn attacker_position_sweep(cfg: &SweepConfig, g: &Graph) -> Result<SweepOutcome> {
    cfg.validate(g)?;
    let candidates = cfg.candidate_nodes(g);
    let job = job(cfg, g, &cfg.defenders, &candidates);
    crate::with_precision!(cfg.precision_bits, T => job.run::<T>(cfg.realizations, cfg.max_retries))?
        .ok_or_else(|| exhausted(&cfg.defenders, cfg.max_retries))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRecord {
    pub count: usize,
    pub attackers: Vec<usize>,
    pub mu1: f64,
    pub log10_inv_mu1: f64,
    /// Frobenius norm of the augmented Gramian outside the network block,
    /// relative to the network block.
    pub off_block_ratio: f64,
}

/// `μ₁` of the network block of the augmented Gramian as attackers are
/// added one at a time in a seeded random order. Uses noise realization 0.
pub fn attacker_count_sweep(cfg: &SweepConfig, g: &Graph, max_attackers: usize) -> Result<Vec<CountRecord>> {
    cfg.validate(g)?;
    let mut order = cfg.candidate_nodes(g);
    if max_attackers == 0 || max_attackers > order.len() {
        return Err(Error::Config(format!(
            "max_attackers = {max_attackers} must lie in 1..={}",
            order.len()
        )));
    }
    order.shuffle(&mut seeding::stream(cfg.seed, Purpose::AttackerOrder, 0, 0));
    crate::with_precision!(cfg.precision_bits, T => count_sweep_in::<T>(cfg, g, &order[..max_attackers]))
}

fn count_sweep_in<T: Real>(cfg: &SweepConfig, g: &Graph, order: &[usize]) -> Result<Vec<CountRecord>> {
    let adj = cfg.adjacency();
    let n = g.n;
    for attempt in 0..cfg.max_retries {
        let a = adjacency_realization(g, &adj, 0, attempt)?;
        let records: Result<Vec<CountRecord>> = (1..=order.len())
            .into_par_iter()
            .map(|k| {
                let placement = Placement::new(n, cfg.defenders.clone(), order[..k].to_vec())?;
                let sys = NetworkSystem::from_placement(a.clone(), &placement)?;
                let atk = AttackerModel::uniform(k, cfg.attacker.s, cfg.attacker.r);
                let full = augmented_gramian_in::<T>(&augment(&sys, &atk)?, cfg.horizon())?;
                let block = full.block(0, 0, n, n);
                let total = full.frobenius_norm();
                let inner = block.frobenius_norm();
                let off = (total.square() - inner.square()).abs().sqrt() / &inner;
                let spectrum = symmetric_eig(&block.symmetrized())?;
                check_controllable(&spectrum)?;
                let mu1 = spectrum.values[0].clone();
                Ok(CountRecord {
                    count: k,
                    attackers: order[..k].to_vec(),
                    mu1: mu1.to_f64(),
                    log10_inv_mu1: -(mu1.ln().to_f64() / std::f64::consts::LN_10),
                    off_block_ratio: off.to_f64(),
                })
            })
            .collect();
        match records {
            Ok(r) => return Ok(r),
            Err(Error::SingularGramian { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(exhausted(&cfg.defenders, cfg.max_retries))
}

/// Draws `round(fraction · n)` defenders uniformly (redrawing until the pair
/// is controllable at the configured precision) and sweeps every other
/// node. `cfg.defenders` and `cfg.candidates` are ignored.
pub fn scalefree_study(cfg: &SweepConfig, g: &Graph, defender_fraction: f64) -> Result<SweepOutcome> {
    if !(defender_fraction > 0.0 && defender_fraction < 1.0) {
        return Err(Error::Config(format!(
            "defender fraction {defender_fraction} must lie in (0, 1)"
        )));
    }
    let k = ((defender_fraction * g.n as f64).round() as usize).clamp(1, g.n - 1);
    for attempt in 0..cfg.max_retries {
        let mut nodes: Vec<usize> = (1..=g.n).collect();
        nodes.shuffle(&mut seeding::stream(cfg.seed, Purpose::Defenders, 0, attempt));
        let mut defenders = nodes[..k].to_vec();
        defenders.sort_unstable();
        let trial = SweepConfig {
            defenders: defenders.clone(),
            candidates: None,
            ..cfg.clone()
        };
        trial.validate(g)?;
        let candidates = trial.candidate_nodes(g);
        let job = job(&trial, g, &defenders, &candidates);
        // a defender set is judged on the first noise draw only
        let out = crate::with_precision!(cfg.precision_bits, T => job.run::<T>(cfg.realizations, 1))?;
        if let Some(out) = out {
            return Ok(out);
        }
    }
    Err(Error::Placement(format!(
        "no controllable set of {k} defenders found in {} draws",
        cfg.max_retries
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl TableFormat {
    /// From a file extension; CSV unless the path ends in `.json`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => TableFormat::Json,
            _ => TableFormat::Csv,
        }
    }
}

pub const TABLE_COLUMNS: [&str; 11] = [
    "node",
    "degree",
    "delta",
    "nTw1_mean",
    "nTw1_std",
    "beta2_mean",
    "beta2_std",
    "E123_mean",
    "E_exact_mean",
    "mu1",
    "mu2",
];

#[derive(Serialize)]
struct TableRecord {
    node: usize,
    degree: usize,
    delta: Option<usize>,
    #[serde(rename = "nTw1_mean")]
    n_t_w1_mean: f64,
    #[serde(rename = "nTw1_std")]
    n_t_w1_std: f64,
    beta2_mean: f64,
    beta2_std: f64,
    #[serde(rename = "E123_mean")]
    e123_mean: f64,
    #[serde(rename = "E_exact_mean")]
    e_exact_mean: f64,
    mu1: f64,
    mu2: Option<f64>,
}

impl From<&SweepRow> for TableRecord {
    fn from(r: &SweepRow) -> Self {
        TableRecord {
            node: r.node,
            degree: r.degree,
            delta: r.delta,
            n_t_w1_mean: r.n_t_w1_mean,
            n_t_w1_std: r.n_t_w1_std,
            beta2_mean: r.beta2_mean,
            beta2_std: r.beta2_std,
            e123_mean: r.e123_mean,
            e_exact_mean: r.e_exact_mean,
            mu1: r.mu1,
            mu2: r.mu2,
        }
    }
}

/// Table text in the fixed column order.
pub fn render_table(rows: &[SweepRow], format: TableFormat) -> Result<String> {
    let records: Vec<TableRecord> = rows.iter().map(TableRecord::from).collect();
    let table = PathBuf::from("<table>");
    match format {
        TableFormat::Json => {
            let text = serde_json::to_string_pretty(&records).map_err(|e| Error::json(&table, e))?;
            Ok(text + "\n")
        }
        TableFormat::Csv => {
            let csv_err = |e: csv::Error| Error::Csv {
                path: table.clone(),
                source: e,
            };
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(TABLE_COLUMNS).map_err(csv_err)?;
            for r in &records {
                w.serialize(r).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
        }
    }
}

pub fn export_table(rows: &[SweepRow], format: TableFormat, path: &Path) -> Result<()> {
    let text = render_table(rows, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub const COUNT_COLUMNS: [&str; 5] = ["count", "attackers", "mu1", "log10_inv_mu1", "off_block_ratio"];

/// Count-sweep table; the attacker list is space separated.
pub fn render_count_table(records: &[CountRecord], format: TableFormat) -> Result<String> {
    let table = PathBuf::from("<table>");
    match format {
        TableFormat::Json => {
            let text = serde_json::to_string_pretty(records).map_err(|e| Error::json(&table, e))?;
            Ok(text + "\n")
        }
        TableFormat::Csv => {
            let csv_err = |e: csv::Error| Error::Csv {
                path: table.clone(),
                source: e,
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COUNT_COLUMNS).map_err(csv_err)?;
            for r in records {
                let attackers = r.attackers.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                w.write_record([
                    r.count.to_string(),
                    attackers,
                    format!("{:e}", r.mu1),
                    r.log10_inv_mu1.to_string(),
                    format!("{:e}", r.off_block_ratio),
                ])
                .map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
        }
    }
}
