//! Experiment manifests: declarative scenario tables mapping cloud files
//! and degradation recipes to sweeps with expected-error assertions.
//!
//! A manifest is a TOML document. `[defaults]` sets the sweep geometry
//! once; each `[[scenario]]` names a pair of cloud sources, optional
//! degradation ops, optional overrides, and an `expect` table of checks
//! against the computed argmin errors and pair statistics. Scenarios that
//! need data not shipped with the repository carry
//! `external_data_required = true` and are reported as skipped.

use crate::cloud::PointCloud;
use crate::degrade::{self, DegradationSpec};
use crate::error::{Error, Result};
use crate::io::load_cloud;
use crate::sweep::{self, Axis, MetricKind, SweepGrid, SweepMode, SweepSpec};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

fn default_a() -> f64 {
    1.0
}
fn default_range() -> f64 {
    5.0
}
fn default_step() -> f64 {
    1.0
}
fn default_axes() -> String {
    "xy".to_string()
}
fn default_mode() -> SweepMode {
    SweepMode::TranslatePlane
}
fn default_metrics() -> Vec<MetricKind> {
    MetricKind::ALL.to_vec()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_range")]
    pub range: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_axes")]
    pub axes: String,
    #[serde(default = "default_mode")]
    pub mode: SweepMode,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<MetricKind>,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            a: default_a(),
            range: default_range(),
            step: default_step(),
            axes: default_axes(),
            mode: default_mode(),
            metrics: default_metrics(),
        }
    }
}

/// A cloud file plus the degradations to apply to it, in order.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudSource {
    pub file: String,
    #[serde(default)]
    pub ops: Vec<DegradationSpec<f64>>,
}

/// One check against a computed quantity. `equals` compares within `tol`
/// (exact when `tol` is omitted); `min`/`max` are inclusive bounds.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub equals: Option<f64>,
    pub tol: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl Expectation {
    fn validate(&self, quantity: &str) -> Result<()> {
        if self.equals.is_none() && self.min.is_none() && self.max.is_none() {
            return Err(Error::validation(format!(
                "expectation for {quantity} has no equals, min, or max"
            )));
        }
        if self.tol.is_some() && self.equals.is_none() {
            return Err(Error::validation(format!(
                "expectation for {quantity} has tol without equals"
            )));
        }
        Ok(())
    }

    fn check(&self, quantity: &str, actual: f64) -> Option<String> {
        if let Some(expected) = self.equals {
            let tol = self.tol.unwrap_or(0.0);
            if !((actual - expected).abs() <= tol) {
                return Some(format!(
                    "{quantity}: expected {expected} (tol {tol}), got {actual}"
                ));
            }
        }
        if let Some(min) = self.min {
            if !(actual >= min) {
                return Some(format!("{quantity}: expected at least {min}, got {actual}"));
            }
        }
        if let Some(max) = self.max {
            if !(actual <= max) {
                return Some(format!("{quantity}: expected at most {max}, got {actual}"));
            }
        }
        None
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub external_data_required: bool,
    pub fixed: Option<CloudSource>,
    pub moving: Option<CloudSource>,
    pub a: Option<f64>,
    pub range: Option<f64>,
    pub step: Option<f64>,
    pub axes: Option<String>,
    pub mode: Option<SweepMode>,
    pub metrics: Option<Vec<MetricKind>>,
    #[serde(default)]
    pub expect: BTreeMap<String, Expectation>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub out_dir: Option<String>,
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<Scenario>,
}

impl Manifest {
    pub fn parse(text: &str, origin: &Path) -> Result<Manifest> {
        let manifest: Manifest = toml::from_str(text)
            .map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        manifest.validate()?;
        Ok(manifest)
    }

    fn validate(&self) -> Result<()> {
        for (i, s) in self.scenarios.iter().enumerate() {
            if s.id.is_empty() {
                return Err(Error::validation(format!("scenario {i} has an empty id")));
            }
            if self.scenarios[..i].iter().any(|other| other.id == s.id) {
                return Err(Error::validation(format!(
                    "scenario id '{}' appears more than once",
                    s.id
                )));
            }
            if !s.external_data_required && (s.fixed.is_none() || s.moving.is_none()) {
                return Err(Error::validation(format!(
                    "scenario '{}' needs both fixed and moving cloud sources",
                    s.id
                )));
            }
            for (quantity, e) in &s.expect {
                e.validate(quantity)?;
            }
        }
        Ok(())
    }
}

/// Loads and validates a manifest file. The returned base directory is the
/// manifest's parent; cloud paths resolve against it.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<(Manifest, PathBuf)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest = Manifest::parse(&text, path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok((manifest, base))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioStatus {
    Pass,
    Fail,
    Skip,
}

impl ScenarioStatus {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioStatus::Pass => "PASS",
            ScenarioStatus::Fail => "FAIL",
            ScenarioStatus::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub id: String,
    pub description: String,
    pub status: ScenarioStatus,
    pub failures: Vec<String>,
    pub points_fixed: usize,
    pub points_moving: usize,
    pub weighted_r4th: f64,
    /// Quantity name to value, the same names `expect` blocks use.
    pub quantities: BTreeMap<String, f64>,
    /// Full grid, kept for downstream inspection and exports.
    pub grid: Option<SweepGrid<f64>>,
}

#[derive(Debug, Clone)]
pub struct ManifestRun {
    pub outcomes: Vec<ScenarioOutcome>,
}

impl ManifestRun {
    pub fn passed(&self) -> bool {
        self.outcomes
            .iter()
            .all(|o| o.status != ScenarioStatus::Fail)
    }

    pub fn outcome(&self, id: &str) -> Option<&ScenarioOutcome> {
        self.outcomes.iter().find(|o| o.id == id)
    }
}

/// Quantity key for a metric's argmin error, e.g. `qtot_error`.
pub fn error_key(metric: MetricKind) -> String {
    format!("{}_error", metric.name().replace('-', "_"))
}

fn resolve_source(
    source: &CloudSource,
    base: &Path,
    role: &str,
    id: &str,
) -> Result<PointCloud<f64>> {
    let path = base.join(&source.file);
    let mut cloud = load_cloud::<f64>(&path)?;
    cloud = cloud.with_label(format!("{id}:{role}"));
    for op in &source.ops {
        cloud = degrade::apply(&cloud, op)?;
    }
    Ok(cloud)
}

/// Runs every scenario: load, degrade, sweep, check expectations.
/// Failures are collected per scenario, never short-circuited, so the
/// table always covers the whole manifest.
pub fn run_manifest(manifest: &Manifest, base: &Path) -> Result<ManifestRun> {
    let mut outcomes = Vec::with_capacity(manifest.scenarios.len());
    for scenario in &manifest.scenarios {
        outcomes.push(run_scenario(scenario, &manifest.defaults, base)?);
    }
    Ok(ManifestRun { outcomes })
}

/// Like [`run_manifest`] but evaluates scenarios in parallel, keeping
/// manifest order in the outcomes.
pub fn run_manifest_par(manifest: &Manifest, base: &Path) -> Result<ManifestRun> {
    use rayon::prelude::*;
    let outcomes = manifest
        .scenarios
        .par_iter()
        .map(|scenario| run_scenario(scenario, &manifest.defaults, base))
        .collect::<Result<Vec<_>>>()?;
    Ok(ManifestRun { outcomes })
}

fn run_scenario(
    scenario: &Scenario,
    defaults: &Defaults,
    base: &Path,
) -> Result<ScenarioOutcome> {
    if scenario.external_data_required {
        return Ok(ScenarioOutcome {
            id: scenario.id.clone(),
            description: scenario.description.clone(),
            status: ScenarioStatus::Skip,
            failures: Vec::new(),
            points_fixed: 0,
            points_moving: 0,
            weighted_r4th: f64::NAN,
            quantities: BTreeMap::new(),
            grid: None,
        });
    }

    let fixed = resolve_source(
        scenario.fixed.as_ref().expect("validated"),
        base,
        "fixed",
        &scenario.id,
    )?;
    let moving = resolve_source(
        scenario.moving.as_ref().expect("validated"),
        base,
        "moving",
        &scenario.id,
    )?;

    let spec = SweepSpec {
        mode: scenario.mode.unwrap_or(defaults.mode),
        axes: Axis::parse_list(scenario.axes.as_ref().unwrap_or(&defaults.axes))?,
        range: scenario.range.unwrap_or(defaults.range),
        step: scenario.step.unwrap_or(defaults.step),
        metrics: scenario
            .metrics
            .clone()
            .unwrap_or_else(|| defaults.metrics.clone()),
        a: scenario.a.unwrap_or(defaults.a),
    };
    let grid = sweep::run_sweep(&fixed, &moving, &spec)?;

    let mut quantities = BTreeMap::new();
    for metric in &spec.metrics {
        quantities.insert(error_key(*metric), grid.argmin_error(*metric)?);
    }
    quantities.insert("points_fixed".to_string(), fixed.len() as f64);
    quantities.insert("points_moving".to_string(), moving.len() as f64);
    quantities.insert("weighted_r4th".to_string(), grid.weighted_r4th);

    let mut failures = Vec::new();
    for (quantity, expectation) in &scenario.expect {
        match quantities.get(quantity) {
            Some(&actual) => {
                if let Some(message) = expectation.check(quantity, actual) {
                    failures.push(message);
                }
            }
            None => {
                return Err(Error::validation(format!(
                    "scenario '{}' expects unknown quantity '{quantity}' \
                     (available: {})",
                    scenario.id,
                    quantities.keys().cloned().collect::<Vec<_>>().join(", ")
                )));
            }
        }
    }

    Ok(ScenarioOutcome {
        id: scenario.id.clone(),
        description: scenario.description.clone(),
        status: if failures.is_empty() {
            ScenarioStatus::Pass
        } else {
            ScenarioStatus::Fail
        },
        failures,
        points_fixed: fixed.len(),
        points_moving: moving.len(),
        weighted_r4th: grid.weighted_r4th,
        quantities,
        grid: Some(grid),
    })
}

const TABLE_COLUMNS: [&str; 5] = [
    "qtot_error",
    "rmse_12_error",
    "rmse_21_error",
    "chamfer_error",
    "hausdorff_error",
];

/// Writes `table.csv` and `table.md` mirroring the experiment summary
/// layout: one row per scenario with point counts, the weighted r4th, and
/// each metric's argmin error.
pub fn write_table(run: &ManifestRun, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut csv = String::from(
        "id,description,points_fixed,points_moving,weighted_r4th,\
         qtot_error,rmse_12_error,rmse_21_error,chamfer_error,hausdorff_error,status\n",
    );
    let mut md = String::from(
        "| Comparison | Description | Points | Weighted r4th | q_tot error | \
         RMSE error 1→2 | RMSE error 2→1 | Chamfer error | Hausdorff error | Status |\n\
         |---|---|---|---|---|---|---|---|---|---|\n",
    );

    for o in &run.outcomes {
        if o.status == ScenarioStatus::Skip {
            let _ = writeln!(csv, "{},{},,,,,,,,,SKIP", o.id, csv_field(&o.description));
            let _ = writeln!(
                md,
                "| {} | {} | | | | | | | | SKIP (external data required) |",
                o.id, o.description
            );
            continue;
        }
        let errors: Vec<String> = TABLE_COLUMNS
            .iter()
            .map(|key| {
                o.quantities
                    .get(*key)
                    .map(|v| format!("{v}"))
                    .unwrap_or_default()
            })
            .collect();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            o.id,
            csv_field(&o.description),
            o.points_fixed,
            o.points_moving,
            o.weighted_r4th,
            errors.join(","),
            o.status.name()
        );
        let pretty: Vec<String> = TABLE_COLUMNS
            .iter()
            .map(|key| {
                o.quantities
                    .get(*key)
                    .map(|v| format!("{v:.2}"))
                    .unwrap_or_default()
            })
            .collect();
        let _ = writeln!(
            md,
            "| {} | {} | {} – {} | {:.2} | {} | {} |",
            o.id,
            o.description,
            o.points_fixed,
            o.points_moving,
            o.weighted_r4th,
            pretty.join(" | "),
            o.status.name()
        );
    }

    let csv_path = dir.join("table.csv");
    std::fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;
    let md_path = dir.join("table.md");
    std::fs::write(&md_path, md).map_err(|e| Error::io(&md_path, e))
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Records what produced a run directory: package version, the seed, and
/// the manifest defaults. Deliberately free of timestamps so reruns are
/// byte-identical.
pub fn write_run_metadata(
    dir: impl AsRef<Path>,
    manifest: &Manifest,
    seed: u64,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let doc = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "scenarios": manifest.scenarios.len(),
        "defaults": {
            "a": manifest.defaults.a,
            "range": manifest.defaults.range,
            "step": manifest.defaults.step,
            "axes": manifest.defaults.axes,
            "mode": manifest.defaults.mode.name(),
            "metrics": manifest.defaults.metrics.iter().map(|m| m.name()).collect::<Vec<_>>(),
        },
    });
    let path = dir.join("run-metadata.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| Error::io(&path, e))
}
