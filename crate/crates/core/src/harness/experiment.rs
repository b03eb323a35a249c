//! Batch runner: a TOML description of a pipeline, a model and optional
//! parameter grid, executed over consecutive seeds.
//!
//! ```toml
//! pipeline = "two-block"      # two-block | multi-block | censor | norm-verify
//! trials = 10
//! seed = 1
//! success_threshold = 0.15
//!
//! [model]
//! n = 2000
//! a = 10.0
//! b = 3.0
//!
//! [grid]
//! a = [10.0, 20.0, 40.0]
//!
//! [twoblock]
//! correction_rounds = 2
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gamma::gamma_correctness;
use super::heatmap::density_heatmap;
use super::norms::{expected_lambda_k, norm_trial, NormOptions, NormTrial};
use crate::censor::{partition_censor, CensorConfig, DegreeSource};
use crate::error::{Error, Result};
use crate::graph::{sample_censor, sample_sbm, Clustering, Graph, SbmParams};
use crate::multiblock::{partition_multi_with, MultiConfig};
use crate::rng::trial_seed;
use crate::spectral::EigenOptions;
use crate::twoblock::{partition_two_with, TwoBlockConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    TwoBlock,
    MultiBlock,
    Censor,
    NormVerify,
}

/// Model parameters. `n` is the block size for the two-block model, the
/// total vertex count for the `k`-block model and half the vertex count for
/// the censor model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub epsilon: f64,
}

fn default_k() -> usize {
    2
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(default)]
    pub k: Vec<usize>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBlockOverrides {
    pub d: Option<f64>,
    pub trim_factor: Option<f64>,
    pub correction_threshold: Option<f64>,
    pub correction_rounds: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiBlockOverrides {
    pub d: Option<f64>,
    pub trim_factor: Option<f64>,
    pub m: Option<usize>,
    pub set_size: Option<usize>,
    pub overlap_limit: Option<usize>,
    pub merge_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensorOverrides {
    pub trim_factor: Option<f64>,
    pub degree_source: Option<DegreeSource>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenOverrides {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub block_size: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormOverrides {
    pub trim_factor: Option<f64>,
    pub norm_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// A trial succeeds when its gamma is at most this.
    #[serde(default = "default_threshold")]
    pub success_threshold: f64,
    /// Write one heatmap per trial with this many bins (0: none).
    #[serde(default)]
    pub heatmap_bins: usize,
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub twoblock: TwoBlockOverrides,
    #[serde(default)]
    pub multiblock: MultiBlockOverrides,
    #[serde(default)]
    pub censor: CensorOverrides,
    #[serde(default)]
    pub eigen: EigenOverrides,
    #[serde(default)]
    pub norms: NormOverrides,
}

fn default_threshold() -> f64 {
    0.15
}

impl ExperimentConfig {
    /// Parses and validates; errors carry the offending line and field.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials: must be at least 1".into()));
        }
        if !(self.success_threshold >= 0.0 && self.success_threshold <= 1.0) {
            return Err(Error::Config("success_threshold: must lie in [0, 1]".into()));
        }
        for (index, point) in self.grid_points().iter().enumerate() {
            self.check_point(point)
                .map_err(|e| Error::Config(format!("model (grid point {index}): {e}")))?;
        }
        Ok(())
    }

    fn check_point(&self, m: &ModelConfig) -> Result<()> {
        match self.pipeline {
            Pipeline::TwoBlock => {
                SbmParams::two_block(m.n, m.a, m.b)?;
                self.two_block_config(m).map(|_| ())
            }
            Pipeline::NormVerify => SbmParams::two_block(m.n, m.a, m.b).map(|_| ()),
            Pipeline::MultiBlock => {
                SbmParams::k_block(m.n, m.k, m.a, m.b)?;
                self.multi_config(m).map(|_| ())
            }
            Pipeline::Censor => crate::graph::CensorParams::new(m.n, m.p, m.epsilon).map(|_| ()),
        }
    }

    /// Cartesian product of the grid axes (in the order n, a, b, k, p,
    /// epsilon), each point overriding the base model.
    pub fn grid_points(&self) -> Vec<ModelConfig> {
        let mut points = vec![self.model];
        fn expand<T: Copy>(points: Vec<ModelConfig>, axis: &[T], set: impl Fn(&mut ModelConfig, T)) -> Vec<ModelConfig> {
            if axis.is_empty() {
                return points;
            }
            let mut out = Vec::with_capacity(points.len() * axis.len());
            for p in points {
                for &v in axis {
                    let mut q = p;
                    set(&mut q, v);
                    out.push(q);
                }
            }
            out
        }
        points = expand(points, &self.grid.n, |m, v| m.n = v);
        points = expand(points, &self.grid.a, |m, v| m.a = v);
        points = expand(points, &self.grid.b, |m, v| m.b = v);
        points = expand(points, &self.grid.k, |m, v| m.k = v);
        points = expand(points, &self.grid.p, |m, v| m.p = v);
        points = expand(points, &self.grid.epsilon, |m, v| m.epsilon = v);
        points
    }

    fn eigen_options(&self, base: EigenOptions) -> EigenOptions {
        EigenOptions {
            tol: self.eigen.tol.unwrap_or(base.tol),
            max_iter: self.eigen.max_iter.unwrap_or(base.max_iter),
            block_size: self.eigen.block_size.or(base.block_size),
            ..base
        }
    }

    pub fn two_block_config(&self, m: &ModelConfig) -> Result<TwoBlockConfig> {
        let o = &self.twoblock;
        let mut cfg = TwoBlockConfig::for_partition(m.a, m.b)?;
        cfg.d = o.d.unwrap_or(cfg.d);
        cfg.trim_factor = o.trim_factor.unwrap_or(cfg.trim_factor);
        cfg.correction_threshold = o.correction_threshold.unwrap_or(cfg.correction_threshold);
        cfg.correction_rounds = o.correction_rounds.unwrap_or(cfg.correction_rounds);
        cfg.eigen = self.eigen_options(cfg.eigen);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn multi_config(&self, m: &ModelConfig) -> Result<MultiConfig> {
        let o = &self.multiblock;
        let mut cfg = MultiConfig::new(m.a, m.b, m.k, m.n)?;
        cfg.d = o.d.unwrap_or(cfg.d);
        cfg.trim_factor = o.trim_factor.unwrap_or(cfg.trim_factor);
        cfg.m = o.m.unwrap_or(cfg.m);
        cfg.set_size = o.set_size.unwrap_or(cfg.set_size);
        cfg.overlap_limit = o.overlap_limit.unwrap_or(cfg.overlap_limit);
        cfg.merge_threshold = o.merge_threshold.unwrap_or(cfg.merge_threshold);
        cfg.eigen = self.eigen_options(cfg.eigen);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn censor_config(&self) -> CensorConfig {
        let base = CensorConfig::default();
        CensorConfig {
            trim_factor: self.censor.trim_factor.unwrap_or(base.trim_factor),
            degree_source: self.censor.degree_source.unwrap_or(base.degree_source),
            eigen: self.eigen_options(base.eigen),
        }
    }

    pub fn norm_options(&self) -> NormOptions {
        let base = NormOptions::default();
        NormOptions {
            trim_factor: self.norms.trim_factor.unwrap_or(base.trim_factor),
            norm_tol: self.norms.norm_tol.unwrap_or(base.norm_tol),
            eigen: self.eigen_options(base.eigen),
        }
    }
}

/// One trial. For `norm-verify`, `gamma` is absent and success means
/// `||Delta|| <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub point: usize,
    pub trial: usize,
    pub seed: u64,
    pub gamma: Option<f64>,
    pub misclassified: Option<usize>,
    pub trimmed: Option<usize>,
    pub success: bool,
    pub norms: Option<NormTrial>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaQuantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Aggregates over the trials of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub point: usize,
    pub model: ModelConfig,
    pub trials: usize,
    pub errors: usize,
    pub mean_gamma: Option<f64>,
    pub gamma_quantiles: Option<GammaQuantiles>,
    pub success_threshold: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub pipeline: Pipeline,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<PointSummary>,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line<'a> {
    Trial(&'a TrialRecord),
    Summary(&'a PointSummary),
}

impl ExperimentReport {
    /// One JSON object per line: every trial, then every summary.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, &Line::Trial(r)).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        for s in &self.summaries {
            serde_json::to_writer(&mut out, &Line::Summary(s)).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }
}

/// Recomputes the summary of `records` (all from grid point `point`).
pub fn summarize_point(point: usize, model: ModelConfig, success_threshold: f64, records: &[&TrialRecord]) -> PointSummary {
    let mut gammas: Vec<f64> = records.iter().filter_map(|r| r.gamma).collect();
    gammas.sort_by(f64::total_cmp);
    let mean_gamma = (!gammas.is_empty()).then(|| gammas.iter().sum::<f64>() / gammas.len() as f64);
    let gamma_quantiles = (!gammas.is_empty()).then(|| GammaQuantiles {
        min: gammas[0],
        q25: quantile(&gammas, 0.25),
        median: quantile(&gammas, 0.5),
        q75: quantile(&gammas, 0.75),
        max: gammas[gammas.len() - 1],
    });
    let successes = records.iter().filter(|r| r.success).count();
    PointSummary {
        point,
        model,
        trials: records.len(),
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        mean_gamma,
        gamma_quantiles,
        success_threshold,
        success_rate: successes as f64 / records.len().max(1) as f64,
    }
}

/// Linear interpolation between order statistics of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

struct TrialOutcome {
    record: TrialRecord,
    seconds: f64,
    heatmap: Option<(Graph, Clustering)>,
}

/// Runs every trial of every grid point. With `out_dir`, writes
/// `report.jsonl`, `timings.jsonl` and any requested heatmaps there.
pub fn run_experiment(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentReport> {
    config.validate()?;
    let points = config.grid_points();
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..config.trials).map(move |t| (p, t)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(p, t)| run_trial(config, p, &points[p], t))
        .collect();

    let records: Vec<TrialRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
    let summaries = points
        .iter()
        .enumerate()
        .map(|(p, model)| {
            let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.point == p).collect();
            summarize_point(p, *model, config.success_threshold, &mine)
        })
        .collect();
    let report = ExperimentReport {
        pipeline: config.pipeline,
        records,
        summaries,
    };

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        report.write_jsonl(BufWriter::new(fs::File::create(dir.join("report.jsonl"))?))?;
        let mut timings = BufWriter::new(fs::File::create(dir.join("timings.jsonl"))?);
        for o in &outcomes {
            let line = serde_json::json!({
                "point": o.record.point,
                "trial": o.record.trial,
                "seed": o.record.seed,
                "seconds": o.seconds,
            });
            writeln!(timings, "{line}")?;
        }
        timings.flush()?;
        if config.heatmap_bins > 0 {
            for o in &outcomes {
                if let Some((g, c)) = &o.heatmap {
                    let h = density_heatmap(g, c, config.heatmap_bins)?;
                    let name = format!("heatmap_p{}_t{}.pgm", o.record.point, o.record.trial);
                    h.write_pgm(BufWriter::new(fs::File::create(dir.join(name))?))?;
                }
            }
        }
    }
    Ok(report)
}

fn run_trial(config: &ExperimentConfig, point: usize, model: &ModelConfig, trial: usize) -> TrialOutcome {
    let seed = trial_seed(config.seed, trial);
    let start = Instant::now();
    let mut record = TrialRecord {
        point,
        trial,
        seed,
        gamma: None,
        misclassified: None,
        trimmed: None,
        success: false,
        norms: None,
        error: None,
    };
    let mut heatmap = None;
    match execute(config, model, seed) {
        Ok(Executed::Partition { graph, pred, truth }) => match gamma_correctness(&pred, &truth) {
            Ok(r) => {
                record.success = r.gamma <= config.success_threshold;
                record.gamma = Some(r.gamma);
                record.misclassified = Some(r.misclassified);
                record.trimmed = Some(pred.trimmed().len());
                if config.heatmap_bins > 0 {
                    heatmap = Some((graph, pred));
                }
            }
            Err(e) => record.error = Some(e.to_string()),
        },
        Ok(Executed::Norms(n)) => {
            record.success = n.delta_norm <= 1.0;
            record.trimmed = Some(n.trimmed);
            record.norms = Some(n);
        }
        Err(e) => {
            log::warn!("point {point} trial {trial} (seed {seed}): {e}");
            record.error = Some(e.to_string());
        }
    }
    TrialOutcome {
        record,
        seconds: start.elapsed().as_secs_f64(),
        heatmap,
    }
}

enum Executed {
    Partition { graph: Graph, pred: Clustering, truth: Clustering },
    Norms(NormTrial),
}

fn execute(config: &ExperimentConfig, m: &ModelConfig, seed: u64) -> Result<Executed> {
    match config.pipeline {
        Pipeline::TwoBlock => {
            let params = SbmParams::two_block(m.n, m.a, m.b)?;
            let (graph, truth) = sample_sbm(&params, seed)?;
            let pred = partition_two_with(&graph, &config.two_block_config(m)?, seed)?;
            Ok(Executed::Partition { graph, pred, truth })
        }
        Pipeline::MultiBlock => {
            let params = SbmParams::k_block(m.n, m.k, m.a, m.b)?;
            let (graph, truth) = sample_sbm(&params, seed)?;
            let pred = partition_multi_with(&graph, &config.multi_config(m)?, seed)?;
            Ok(Executed::Partition { graph, pred, truth })
        }
        Pipeline::Censor => {
            let inst = sample_censor(m.n, m.p, m.epsilon, seed)?;
            let pred = partition_censor(&inst, &config.censor_config())?;
            let truth = inst.truth();
            Ok(Executed::Partition {
                graph: inst.graph,
                pred,
                truth,
            })
        }
        Pipeline::NormVerify => {
            let params = SbmParams::two_block(m.n, m.a, m.b)?;
            let d = params.a + params.b;
            let trial = norm_trial(&params, seed, d, expected_lambda_k(&params), &config.norm_options())?;
            Ok(Executed::Norms(trial))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"
pipeline = "two-block"
trials = 1
seed = 7

[model]
n = 10
a = 8.0
b = 1.0
"#;

    #[test]
    fn single_trial_summary_equals_record() {
        let cfg = ExperimentConfig::from_toml_str(TINY).unwrap();
        let report = run_experiment(&cfg, None).unwrap();
        assert_eq!(report.records.len(), 1);
        let s = &report.summaries[0];
        let g = report.records[0].gamma.unwrap();
        assert_eq!(s.mean_gamma, Some(g));
        let q = s.gamma_quantiles.as_ref().unwrap();
        assert_eq!((q.min, q.median, q.max), (g, g, g));
    }

    #[test]
    fn grid_is_cartesian() {
        let text = format!("{TINY}\n[grid]\na = [8.0, 9.0]\nb = [0.0, 1.0, 2.0]\n");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        let points = cfg.grid_points();
        assert_eq!(points.len(), 6);
        assert_eq!((points[0].a, points[0].b), (8.0, 0.0));
        assert_eq!((points[5].a, points[5].b), (9.0, 2.0));
    }

    #[test]
    fn config_errors_name_the_problem() {
        let bad_key = TINY.replace("seed = 7", "seed = 7\nsed = 3");
        let msg = ExperimentConfig::from_toml_str(&bad_key).unwrap_err().to_string();
        assert!(msg.contains("sed") && msg.contains("line"), "{msg}");
        let zero = TINY.replace("trials = 1", "trials = 0");
        let msg = ExperimentConfig::from_toml_str(&zero).unwrap_err().to_string();
        assert!(msg.contains("trials"), "{msg}");
        let bad_model = TINY.replace("b = 1.0", "b = 9.0");
        assert!(matches!(ExperimentConfig::from_toml_str(&bad_model), Err(Error::Config(_))));
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.25), 1.0);
        assert_eq!(quantile(&[0.0, 1.0], 0.5), 0.5);
    }
}
