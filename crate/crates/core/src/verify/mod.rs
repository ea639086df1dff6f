//! Inequality harness: named checks over structured and random ensembles,
//! the acceptance criteria, and a report runner.

mod checks;
mod criteria;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_commutator_transfer, check_functional_transfer, check_linqx, check_reparam, check_spectrum_inclusions,
    check_transform_lipschitz, distance_to_spectrum, hat, inclusion_gamma, inclusion_margins, inclusion_sigma, CheckResult,
    InclusionOutcome,
};
pub use criteria::{
    commuting_fixture, commuting_oracle, criterion_1, criterion_10, criterion_11, criterion_12, criterion_13, criterion_2,
    criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, inclusion_fixtures, Context,
    Criterion, CRITERIA,
};

use crate::numkernel::Tolerances;
use crate::tuples::OperatorTuple;
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 20_240_611;

/// Acceptance run settings, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceConfig {
    pub seed: u64,
    /// Criterion ids to run; empty runs all.
    pub only: Vec<u32>,
    /// Operator-tuple JSON files added to the criterion 1 and 2 ensembles.
    pub tuple_files: Vec<PathBuf>,
    /// Tolerance overrides; installing them is the caller's job.
    pub tolerances: Option<Tolerances>,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, only: Vec::new(), tuple_files: Vec::new(), tolerances: None }
    }
}

impl AcceptanceConfig {
    /// Parses a TOML config; relative tuple paths resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Load(format!("config {}: {e}", path.display())))?;
        let mut cfg: AcceptanceConfig =
            toml::from_str(&text).map_err(|e| Error::Load(format!("config {}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            for f in &mut cfg.tuple_files {
                if f.is_relative() {
                    *f = dir.join(&*f);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.only.iter().find(|id| !CRITERIA.iter().any(|c| c.id == **id)) {
            return Err(Error::invalid(format!("unknown criterion {bad}; valid ids are 1..={}", CRITERIA.len())));
        }
        if let Some(t) = &self.tolerances {
            t.validate()?;
        }
        Ok(())
    }

    fn selected(&self, id: u32) -> bool {
        self.only.is_empty() || self.only.contains(&id)
    }
}

/// Reads every tuple file; the first failure aborts with the file named.
pub fn load_tuples(files: &[PathBuf]) -> Result<Vec<OperatorTuple>> {
    files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f).map_err(|e| Error::Load(format!("tuple file {}: {e}", f.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Load(format!("tuple file {}: {e}", f.display())))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of the acceptance report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: u32,
    pub name: String,
    pub status: Status,
    pub margin: f64,
    pub seeds_failed: Vec<u64>,
    pub runtime_ms: u64,
    pub instances: usize,
    /// Error text when the criterion could not run.
    pub error: Option<String>,
    pub diagnostics: std::collections::BTreeMap<String, f64>,
}

impl CriterionReport {
    /// `[PASS|FAIL] criterion k name: margin ... (n instances, t ms)`.
    pub fn summary_line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        let mut line = format!(
            "[{tag}] criterion {:>2} {:<28} margin {:>12.4e}  instances {:>5}  {:>7} ms",
            self.criterion, self.name, self.margin, self.instances, self.runtime_ms
        );
        if !self.seeds_failed.is_empty() {
            line.push_str(&format!("  failed seeds {:?}", self.seeds_failed));
        }
        if let Some(e) = &self.error {
            line.push_str(&format!("  error: {e}"));
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

impl AcceptanceReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["criterion", "name", "status", "margin", "seeds_failed", "runtime_ms"])?;
        for c in &self.criteria {
            let seeds = c.seeds_failed.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            let status = if c.status == Status::Pass { "pass" } else { "fail" };
            w.write_record([c.criterion.to_string(), c.name.clone(), status.to_string(), format!("{:e}", c.margin), seeds, c.runtime_ms.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs one criterion; computation errors become a failing report line.
pub fn run_criterion(c: &Criterion, ctx: &Context) -> CriterionReport {
    let start = Instant::now();
    let outcome = (c.run)(ctx);
    let runtime_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(r) => CriterionReport {
            criterion: c.id,
            name: c.name.to_string(),
            status: if r.passed() { Status::Pass } else { Status::Fail },
            margin: r.worst_margin,
            seeds_failed: r.failures,
            runtime_ms,
            instances: r.instances,
            error: None,
            diagnostics: r.diagnostics,
        },
        Err(e) => CriterionReport {
            criterion: c.id,
            name: c.name.to_string(),
            status: Status::Fail,
            margin: f64::NEG_INFINITY,
            seeds_failed: Vec::new(),
            runtime_ms,
            instances: 0,
            error: Some(e.to_string()),
            diagnostics: Default::default(),
        },
    }
}

/// Loads the tuple files, then runs the selected criteria in order, calling
/// `on_line` after each. Nothing runs if any input fails to load.
pub fn run_acceptance_with(cfg: &AcceptanceConfig, mut on_line: impl FnMut(&CriterionReport)) -> Result<AcceptanceReport> {
    cfg.validate()?;
    let ctx = Context { seed: cfg.seed, extra_tuples: load_tuples(&cfg.tuple_files)? };
    let mut criteria = Vec::new();
    for c in CRITERIA.iter().filter(|c| cfg.selected(c.id)) {
        let line = run_criterion(c, &ctx);
        on_line(&line);
        criteria.push(line);
    }
    let passed = criteria.iter().all(|c| c.status == Status::Pass);
    Ok(AcceptanceReport { seed: cfg.seed, passed, criteria })
}

/// [`run_acceptance_with`] on the config at `path`.
pub fn run_acceptance(path: &Path) -> Result<AcceptanceReport> {
    run_acceptance_with(&AcceptanceConfig::load(path)?, |_| {})
}
