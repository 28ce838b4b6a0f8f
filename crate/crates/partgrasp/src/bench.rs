//! Benchmark over generated objects and planning methods.
//!
//! Each `(object, method)` pair runs `trials` independent trials with seeds
//! `seed + trial` on one scene generated from `seed`. A trial that fails to
//! produce a grasp counts against every metric. Rows are followed by one
//! `aggregate` row per method holding the mean of that method's rows.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use partgrasp_core::metrics::{trial_flags, TrialFlags};
use partgrasp_core::{
    compute_metrics, determine_target_regions, gen_object, ground_target, DualConfig, GripperModel, MetricsConfig,
    ObjectKind, SamplerConfig, SceneDescription, SurrogateEnergy, TrialResult,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Config, DualSection, EnergySection, GripperSection, SamplerSection};
use crate::error::{Error, Result};
use crate::plan::{dual_trial, run_baseline_dual, run_single};

pub const AGGREGATE: &str = "aggregate";
pub const CSV_HEADER: [&str; 8] =
    ["object", "method", "trials", "cfr", "part_containment", "stability_proxy", "mean_D", "runtime_s"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    OursSingle,
    OursDual,
    BaselineDual,
    Unconstrained,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::OursSingle, Method::OursDual, Method::BaselineDual, Method::Unconstrained];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::OursSingle => "ours-single",
            Method::OursDual => "ours-dual",
            Method::BaselineDual => "baseline-dual",
            Method::Unconstrained => "unconstrained",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.as_str() == s)
    }

    pub fn is_dual(self) -> bool {
        matches!(self, Method::OursDual | Method::BaselineDual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub objects: Vec<String>,
    pub methods: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    /// Neighbours per region for the farthest-point baseline.
    pub knn: usize,
    pub scale: f64,
    /// Surface sampling density (points/m²); per-object default if absent.
    pub density: Option<f64>,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            objects: ["pot", "basin", "keyboard", "laptop"].map(String::from).to_vec(),
            methods: ["ours-dual", "baseline-dual"].map(String::from).to_vec(),
            trials: 30,
            seed: 0,
            knn: 100,
            scale: 1.0,
            density: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchFile {
    pub bench: BenchSection,
    pub energy: EnergySection,
    pub gripper: GripperSection,
    pub sampler: SamplerSection,
    pub dual: DualSection,
}

/// A validated benchmark setup.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub objects: Vec<ObjectKind>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    pub knn: usize,
    pub scale: f64,
    pub density: Option<f64>,
    pub field: SurrogateEnergy,
    pub gripper: GripperModel,
    pub sampler: SamplerConfig,
    pub dual: DualConfig,
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<BenchConfig> {
        let file: BenchFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        BenchConfig::from_file(file)
    }

    pub fn load(path: &Path) -> Result<BenchConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        BenchConfig::parse(&text)
    }

    pub fn from_file(file: BenchFile) -> Result<BenchConfig> {
        let b = file.bench;
        let objects = b
            .objects
            .iter()
            .map(|s| ObjectKind::parse(s).ok_or_else(|| Error::Config(format!("unknown object kind `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        let methods = b
            .methods
            .iter()
            .map(|s| Method::parse(s).ok_or_else(|| Error::Config(format!("unknown method `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        if objects.is_empty() || methods.is_empty() {
            return Err(Error::Config("bench needs at least one object and one method".into()));
        }
        if b.trials == 0 {
            return Err(Error::Config("bench needs at least one trial".into()));
        }
        if b.knn == 0 {
            return Err(Error::Config("knn must be positive".into()));
        }
        if !(b.scale > 0.0 && b.scale.is_finite()) {
            return Err(Error::Config("scale must be positive".into()));
        }
        if let Some(d) = b.density {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Config("density must be positive".into()));
            }
        }
        let cfg = Config { energy: file.energy, gripper: file.gripper, sampler: file.sampler, dual: file.dual };
        Ok(BenchConfig {
            objects,
            methods,
            trials: b.trials,
            seed: b.seed,
            knn: b.knn,
            scale: b.scale,
            density: b.density,
            field: cfg.energy()?,
            gripper: cfg.gripper()?,
            sampler: cfg.sampler()?,
            dual: cfg.dual()?,
        })
    }

    pub fn metrics_config(&self) -> MetricsConfig {
        MetricsConfig { fc_threshold: self.dual.fc_threshold, ..MetricsConfig::default() }
    }

    pub fn scene(&self, kind: ObjectKind) -> Result<SceneDescription> {
        let density = self.density.unwrap_or_else(|| kind.default_density());
        Ok(gen_object(kind, self.scale, density, self.seed)?)
    }
}

/// One planning trial of `method` on `scene` with sampler seed `seed`.
pub fn run_trial(
    cfg: &BenchConfig,
    kind: ObjectKind,
    scene: &SceneDescription,
    method: Method,
    seed: u64,
) -> Result<TrialResult> {
    let sampler = SamplerConfig { seed, ..cfg.sampler.clone() };
    let part = kind.default_part();
    match method {
        Method::OursSingle | Method::Unconstrained => {
            let out = run_single(scene, part, method == Method::OursSingle, &cfg.field, &sampler, &cfg.gripper)?;
            Ok(out.trial())
        }
        Method::OursDual => {
            let regions = determine_target_regions(scene, part)?;
            let plan = partgrasp_core::plan_dual_regions(
                &scene.cloud,
                regions,
                &cfg.field,
                &sampler,
                &cfg.dual,
                &cfg.gripper,
            )?;
            Ok(dual_trial(&plan))
        }
        Method::BaselineDual => {
            let plan = run_baseline_dual(scene, cfg.knn, &cfg.field, &sampler, &cfg.dual, &cfg.gripper)?;
            Ok(dual_trial(&plan))
        }
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub object: String,
    pub method: String,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub collision_free: bool,
    pub contained: bool,
    pub stable: bool,
    #[serde(rename = "D_ij", skip_serializing_if = "Option::is_none", default)]
    pub center_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub object: String,
    pub method: String,
    pub trials: usize,
    pub cfr: f64,
    pub part_containment: f64,
    pub stability_proxy: f64,
    pub mean_d: Option<f64>,
    pub runtime_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub aggregate: Vec<BenchRow>,
    pub trials: Vec<TrialRecord>,
}

struct Job {
    object: usize,
    method: Method,
    trial: usize,
}

/// Runs every trial of the benchmark. Trials run in parallel; the report is
/// ordered by object, then method, then trial, and does not depend on the
/// thread count. Runtimes are the summed wall time of each group's trials.
pub fn run_bench(cfg: &BenchConfig, timing: bool) -> Result<BenchReport> {
    let scenes = cfg.objects.iter().map(|&k| cfg.scene(k)).collect::<Result<Vec<_>>>()?;
    // Regions used to score containment for single-arm methods.
    let parts = cfg
        .objects
        .iter()
        .zip(&scenes)
        .map(|(k, s)| Ok(ground_target(s, k.default_part())?.target_indices))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for object in 0..cfg.objects.len() {
        for &method in &cfg.methods {
            for trial in 0..cfg.trials {
                jobs.push(Job { object, method, trial });
            }
        }
    }
    let outcomes: Vec<(Result<TrialResult>, f64)> = jobs
        .par_iter()
        .map(|j| {
            let start = Instant::now();
            let seed = cfg.seed.wrapping_add(j.trial as u64);
            let r = run_trial(cfg, cfg.objects[j.object], &scenes[j.object], j.method, seed);
            (r, start.elapsed().as_secs_f64())
        })
        .collect();

    let metrics = cfg.metrics_config();
    let mut report = BenchReport::default();
    for (group, chunk) in jobs.chunks(cfg.trials).zip(outcomes.chunks(cfg.trials)) {
        let (object, method) = (group[0].object, group[0].method);
        let kind = cfg.objects[object];
        let cloud = &scenes[object].cloud;
        let results: Vec<Option<TrialResult>> = chunk
            .iter()
            .map(|(r, _)| {
                r.as_ref().ok().map(|t| {
                    let mut t = t.clone();
                    if !method.is_dual() {
                        for g in &mut t.grasps {
                            g.region = parts[object].clone();
                        }
                    }
                    t
                })
            })
            .collect();
        for (trial, ((r, _), res)) in chunk.iter().zip(&results).enumerate() {
            let TrialFlags { collision_free, contained, stable } =
                trial_flags(res.as_ref(), cloud, &cfg.gripper, &metrics);
            report.trials.push(TrialRecord {
                object: kind.as_str().into(),
                method: method.as_str().into(),
                trial,
                seed: cfg.seed.wrapping_add(trial as u64),
                success: res.is_some(),
                collision_free,
                contained,
                stable,
                center_distance: res.as_ref().and_then(|t| t.center_distance),
                error: r.as_ref().err().map(|e| e.to_string()),
            });
        }
        let m = compute_metrics(&results, cloud, &cfg.gripper, &metrics);
        report.rows.push(BenchRow {
            object: kind.as_str().into(),
            method: method.as_str().into(),
            trials: m.trials,
            cfr: m.cfr,
            part_containment: m.part_containment,
            stability_proxy: m.stability_proxy,
            mean_d: if method.is_dual() { m.mean_d } else { None },
            runtime_s: timing.then(|| chunk.iter().map(|(_, t)| t).sum()),
        });
    }
    report.aggregate = aggregate_rows(&report.rows);
    Ok(report)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// One row per method, in first-appearance order: rates and `mean_D` are
/// averaged over that method's object rows, trials and runtimes are summed.
pub fn aggregate_rows(rows: &[BenchRow]) -> Vec<BenchRow> {
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    methods
        .into_iter()
        .map(|method| {
            let group: Vec<&BenchRow> = rows.iter().filter(|r| r.method == method).collect();
            BenchRow {
                object: AGGREGATE.into(),
                method: method.into(),
                trials: group.iter().map(|r| r.trials).sum(),
                cfr: mean(group.iter().map(|r| r.cfr)).unwrap_or(0.0),
                part_containment: mean(group.iter().map(|r| r.part_containment)).unwrap_or(0.0),
                stability_proxy: mean(group.iter().map(|r| r.stability_proxy)).unwrap_or(0.0),
                mean_d: mean(group.iter().filter_map(|r| r.mean_d)),
                runtime_s: if group.iter().all(|r| r.runtime_s.is_some()) {
                    Some(group.iter().filter_map(|r| r.runtime_s).sum())
                } else {
                    None
                },
            }
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl BenchReport {
    pub fn all_rows(&self) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().chain(&self.aggregate)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for r in self.all_rows() {
            w.write_record([
                r.object.clone(),
                r.method.clone(),
                r.trials.to_string(),
                r.cfr.to_string(),
                r.part_containment.to_string(),
                r.stability_proxy.to_string(),
                opt(r.mean_d),
                opt(r.runtime_s),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
    }

    /// Reads rows written by [`BenchReport::to_csv`]. Trial records are not
    /// part of the table and come back empty.
    pub fn from_csv(text: &str) -> Result<BenchReport> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
        if header != CSV_HEADER {
            return Err(Error::Report(format!("unexpected header {header:?}")));
        }
        let mut report = BenchReport::default();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let num = |j: usize| -> Result<f64> {
                rec[j].parse().map_err(|_| Error::Report(format!("line {line}: bad {} `{}`", CSV_HEADER[j], &rec[j])))
            };
            let opt_num = |j: usize| -> Result<Option<f64>> {
                if rec[j].is_empty() {
                    Ok(None)
                } else {
                    num(j).map(Some)
                }
            };
            let row = BenchRow {
                object: rec[0].into(),
                method: rec[1].into(),
                trials: rec[2].parse().map_err(|_| Error::Report(format!("line {line}: bad trials `{}`", &rec[2])))?,
                cfr: num(3)?,
                part_containment: num(4)?,
                stability_proxy: num(5)?,
                mean_d: opt_num(6)?,
                runtime_s: opt_num(7)?,
            };
            if row.object == AGGREGATE {
                report.aggregate.push(row);
            } else {
                report.rows.push(row);
            }
        }
        Ok(report)
    }

    /// Trial records as JSON lines.
    pub fn trials_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for t in &self.trials {
            out += &serde_json::to_string(t)?;
            out.push('\n');
        }
        Ok(out)
    }

    /// Fixed-width text table of all rows.
    pub fn to_table(&self) -> String {
        let cells: Vec<[String; 8]> = self
            .all_rows()
            .map(|r| {
                [
                    r.object.clone(),
                    r.method.clone(),
                    r.trials.to_string(),
                    format!("{:.3}", r.cfr),
                    format!("{:.3}", r.part_containment),
                    format!("{:.3}", r.stability_proxy),
                    r.mean_d.map(|d| format!("{d:.4}")).unwrap_or_else(|| "-".into()),
                    r.runtime_s.map(|t| format!("{t:.2}")).unwrap_or_else(|| "-".into()),
                ]
            })
            .collect();
        let mut width: [usize; 8] = CSV_HEADER.map(str::len);
        for row in &cells {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, row: &[&str]| {
            let parts: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(j, c)| if j < 2 { format!("{c:<w$}", w = width[j]) } else { format!("{c:>w$}", w = width[j]) })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &CSV_HEADER);
        for row in &cells {
            line(&mut out, &row.each_ref().map(String::as_str));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(object: &str, method: &str, cfr: f64, d: Option<f64>) -> BenchRow {
        BenchRow {
            object: object.into(),
            method: method.into(),
            trials: 3,
            cfr,
            part_containment: 1.0 / 3.0,
            stability_proxy: 0.0,
            mean_d: d,
            runtime_s: None,
        }
    }

    #[test]
    fn aggregate_is_mean_of_rows() {
        let rows = vec![
            row("pot", "ours-dual", 1.0, Some(0.2)),
            row("pot", "ours-single", 0.5, None),
            row("basin", "ours-dual", 0.5, Some(0.4)),
        ];
        let agg = aggregate_rows(&rows);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].method, "ours-dual");
        assert_eq!(agg[0].cfr, 0.75);
        assert!((agg[0].mean_d.unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(agg[0].trials, 6);
        assert_eq!(agg[1].mean_d, None);
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row("pot", "ours-dual", 0.1 + 0.2, Some(0.123456789)), row("pot", "unconstrained", 0.0, None)];
        let report = BenchReport { aggregate: aggregate_rows(&rows), rows, trials: vec![] };
        let text = report.to_csv().unwrap();
        assert!(text.starts_with("object,method,trials,cfr,part_containment,stability_proxy,mean_D,runtime_s\n"));
        assert!(text.contains("pot,unconstrained,3,0,0.3333333333333333,0,,\n"), "{text}");
        assert_eq!(BenchReport::from_csv(&text).unwrap(), report);
    }

    #[test]
    fn config_parsing() {
        let cfg = BenchConfig::parse(
            "[bench]\nobjects = [\"mug\"]\nmethods = [\"ours-single\"]\ntrials = 2\n[sampler]\nnum_candidates = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.objects, vec![ObjectKind::Mug]);
        assert_eq!(cfg.methods, vec![Method::OursSingle]);
        assert_eq!(cfg.sampler.num_candidates, 4);
        assert!(BenchConfig::parse("[bench]\nobjects = [\"spoon\"]\n").is_err());
        assert!(BenchConfig::parse("[bench]\nmethods = [\"ours\"]\n").is_err());
        assert!(BenchConfig::parse("[bench]\ntrials = 0\n").is_err());
        assert!(BenchConfig::parse("[bench]\nfoo = 1\n").is_err());
        assert_eq!(BenchConfig::parse("").unwrap().trials, 30);
    }

    #[test]
    fn table_has_all_rows() {
        let rows = vec![row("pot", "ours-dual", 1.0, Some(0.2))];
        let report = BenchReport { aggregate: aggregate_rows(&rows), rows, trials: vec![] };
        let t = report.to_table();
        assert_eq!(t.lines().count(), 3);
        assert!(t.lines().nth(2).unwrap().starts_with("aggregate"));
    }
}
