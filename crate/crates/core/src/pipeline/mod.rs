//! End-to-end orchestration and artifact persistence.
//!
//! Artifacts in the output directory:
//! `config.json`, `instance.json`, `maxcut.json`, `separator.json`,
//! `shrink_stack.json`, `shrunk.json`, `training.json`, `cut_eval.json`,
//! `histogram.csv`, `samples.csv`, `report.json` and `timings.json`.

mod config;
mod report;
mod stages;
mod verify;

pub use config::{InstanceSource, PipelineConfig, SHIPPED_SEED};
pub use report::{
    build_report, decode_shrunk, entropy, histogram_csv, Candidate, CuttingSummary, DecodingSummary, ExactSummary, Lossless,
    MonteCarloSummary, PipelineReport, ReductionSummary, SeparatorSummary, ShrinkSummary, TrainingSummary,
};
pub use stages::{cut_from_artifacts, generate_stage, shrink_from_artifacts, train_from_artifacts, verify_from_artifacts};
pub use verify::{run_checks, Check, VerifyReport};

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsonfmt::{read_json, write_atomic, write_json};
use crate::maxcut::{balanced_vertex_separator_with, SeparatorOptions, SeparatorResult};
use crate::problem::{default_penalties, generate_euclidean_tsp, qubo_to_maxcut, tsp_to_qubo, MaxCutInstance, QuboProblem, TspInstance};
use crate::qsim::{qaoa_distribution, train_qaoa, Distribution, QaoaParams, TrainConfig, TrainResult};
use crate::rng::{derive_seed, Substream};
use crate::shrink::{shrink_separator_with, ShrinkStack};
use crate::wirecut::{build_fragments, evaluate_cut, sample_cut, total_variation, verify_qpd, CutEvaluation, CutSamples, QpdCheck};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Generate,
    Reduce,
    Separator,
    Shrink,
    Train,
    CutEval,
    Decode,
    Report,
    Verify,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Generate => "generate",
            Stage::Reduce => "reduce",
            Stage::Separator => "separator",
            Stage::Shrink => "shrink",
            Stage::Train => "train",
            Stage::CutEval => "cut-eval",
            Stage::Decode => "decode",
            Stage::Report => "report",
            Stage::Verify => "verify",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("stage {stage} failed: {message}")]
    Stage { stage: Stage, message: String },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl PipelineError {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Stage { stage, .. } => Some(*stage),
            PipelineError::Io { .. } => None,
        }
    }
}

pub(crate) trait StageContext<T> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: fmt::Display> StageContext<T> for Result<T, E> {
    fn stage(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::Stage {
            stage,
            message: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub tsp: TspInstance,
    pub qubo: QuboProblem,
    pub maxcut: MaxCutInstance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkOutcome {
    pub separator: SeparatorResult,
    pub stack: ShrinkStack,
    pub shrunk: MaxCutInstance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutOutcome {
    pub params: QaoaParams,
    pub uncut: Distribution,
    pub expectation_uncut: f64,
    pub eval: CutEvaluation,
    pub kappa_harada: f64,
    pub kappa_peng: f64,
    pub qpd_harada: QpdCheck,
    pub qpd_peng: QpdCheck,
    pub qubits_a: usize,
    pub qubits_b: usize,
    pub monte_carlo: Option<MonteCarloSummary>,
}

/// Wall-clock seconds per stage.
pub type Timings = BTreeMap<String, f64>;

pub fn load_instance(cfg: &PipelineConfig) -> Result<TspInstance, PipelineError> {
    match &cfg.instance {
        InstanceSource::Generate { n } => {
            generate_euclidean_tsp(*n, derive_seed(cfg.seed, Substream::Instance), 1.0).stage(Stage::Generate)
        }
        InstanceSource::File { path } => read_json(path).map_err(|e| PipelineError::Io {
            path: path.clone(),
            message: e.to_string(),
        }),
    }
}

pub fn reduce(cfg: &PipelineConfig, tsp: &TspInstance) -> Result<Reduction, PipelineError> {
    let (default_a, default_b) = default_penalties(tsp);
    let a = cfg.penalty_a.unwrap_or(default_a);
    let b = cfg.penalty_b.unwrap_or(default_b);
    let qubo = tsp_to_qubo(tsp, a, b).stage(Stage::Reduce)?;
    let maxcut = qubo_to_maxcut(&qubo);
    Ok(Reduction {
        tsp: tsp.clone(),
        qubo,
        maxcut,
    })
}

pub fn shrink_stage(cfg: &PipelineConfig, maxcut: &MaxCutInstance) -> Result<ShrinkOutcome, PipelineError> {
    let opts = SeparatorOptions {
        node_limit: cfg.separator_node_limit,
    };
    let separator = balanced_vertex_separator_with(maxcut, cfg.beta, &opts).stage(Stage::Separator)?;
    let (shrunk, stack) = shrink_separator_with(maxcut, &separator, cfg.shrink_target, cfg.tie_break).stage(Stage::Shrink)?;
    Ok(ShrinkOutcome {
        separator,
        stack,
        shrunk,
    })
}

pub fn train_stage(cfg: &PipelineConfig, shrunk: &MaxCutInstance) -> Result<TrainResult, PipelineError> {
    let tc = TrainConfig {
        layers: cfg.layers,
        restarts: cfg.restarts,
        max_evals: cfg.max_evals,
        seed: derive_seed(cfg.seed, Substream::Optimizer),
    };
    train_qaoa(shrunk, &tc).stage(Stage::Train)
}

pub fn cut_stage(
    cfg: &PipelineConfig,
    shrink: &ShrinkOutcome,
    params: &QaoaParams,
) -> Result<(CutOutcome, Option<CutSamples>), PipelineError> {
    let stack = &shrink.stack;
    if stack.separator.len() != 1 {
        return Err(PipelineError::Stage {
            stage: Stage::CutEval,
            message: format!("wire cutting needs a single separator vertex, got {}", stack.separator.len()),
        });
    }
    let fp = build_fragments(&shrink.shrunk, stack.separator[0], &stack.side_a, &stack.side_b, params).stage(Stage::CutEval)?;
    let tables = fp.tables().stage(Stage::CutEval)?;
    let eval = evaluate_cut(&fp, &tables).stage(Stage::CutEval)?;
    let uncut = qaoa_distribution(&shrink.shrunk, params).stage(Stage::CutEval)?;
    let expectation_uncut = crate::qsim::expectation_f(&shrink.shrunk, &uncut).stage(Stage::CutEval)?;
    let (samples, monte_carlo) = if cfg.shots > 0 {
        let samples = sample_cut(&fp, &tables, cfg.shots, derive_seed(cfg.seed, Substream::Sampler)).stage(Stage::CutEval)?;
        let mean = samples.mean_weight();
        let standard_error = samples.standard_error();
        let summary = MonteCarloSummary {
            shots: cfg.shots,
            mean,
            standard_error,
            z_score: (mean - eval.expectation) / standard_error,
            tv_distance: total_variation(&samples.frequencies(), &eval.sampling),
        };
        (Some(samples), Some(summary))
    } else {
        (None, None)
    };
    Ok((
        CutOutcome {
            params: params.clone(),
            uncut,
            expectation_uncut,
            kappa_harada: fp.harada.kappa(),
            kappa_peng: fp.peng.kappa(),
            qpd_harada: verify_qpd(&fp.harada),
            qpd_peng: verify_qpd(&fp.peng),
            qubits_a: fp.qubits_a(),
            qubits_b: fp.qubits_b(),
            eval,
            monte_carlo,
        },
        samples,
    ))
}

/// Everything produced by one pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub reduction: Reduction,
    pub shrink: ShrinkOutcome,
    pub training: TrainResult,
    pub cut: CutOutcome,
    pub samples: Option<CutSamples>,
    pub report: PipelineReport,
    pub timings: Timings,
}

/// Artifact file names inside an output directory.
pub mod files {
    pub const CONFIG: &str = "config.json";
    pub const INSTANCE: &str = "instance.json";
    pub const MAXCUT: &str = "maxcut.json";
    pub const SEPARATOR: &str = "separator.json";
    pub const SHRINK_STACK: &str = "shrink_stack.json";
    pub const SHRUNK: &str = "shrunk.json";
    pub const TRAINING: &str = "training.json";
    pub const CUT_EVAL: &str = "cut_eval.json";
    pub const HISTOGRAM: &str = "histogram.csv";
    pub const SAMPLES: &str = "samples.csv";
    pub const REPORT: &str = "report.json";
    pub const TIMINGS: &str = "timings.json";
    pub const VERIFY: &str = "verify.json";
}

/// An output directory holding pipeline artifacts.
#[derive(Clone, Debug)]
pub struct ArtifactDir {
    root: PathBuf,
}

impl ArtifactDir {
    pub fn create(root: &Path) -> Result<Self, PipelineError> {
        std::fs::create_dir_all(root).map_err(|e| PipelineError::Io {
            path: root.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(ArtifactDir { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn save<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), PipelineError> {
        let path = self.path(name);
        write_json(&path, value).map_err(|e| PipelineError::Io {
            path,
            message: e.to_string(),
        })
    }

    pub fn save_text(&self, name: &str, text: &[u8]) -> Result<(), PipelineError> {
        let path = self.path(name);
        write_atomic(&path, text).map_err(|e| PipelineError::Io {
            path,
            message: e.to_string(),
        })
    }

    pub fn load<T: serde::de::DeserializeOwned>(&self, name: &str) -> Result<T, PipelineError> {
        let path = self.path(name);
        read_json(&path).map_err(|e| PipelineError::Io {
            message: format!("missing or unreadable artifact ({e})"),
            path,
        })
    }

    pub fn save_samples(&self, samples: &CutSamples) -> Result<(), PipelineError> {
        let mut buf = Vec::new();
        samples.write_csv(&mut buf).map_err(|e| PipelineError::Io {
            path: self.path(files::SAMPLES),
            message: e.to_string(),
        })?;
        self.save_text(files::SAMPLES, &buf)
    }

    pub fn load_reduction(&self, cfg: &PipelineConfig) -> Result<Reduction, PipelineError> {
        let tsp: TspInstance = self.load(files::INSTANCE)?;
        let red = reduce(cfg, &tsp)?;
        let saved: MaxCutInstance = self.load(files::MAXCUT)?;
        if saved != red.maxcut {
            return Err(PipelineError::Stage {
                stage: Stage::Reduce,
                message: "maxcut.json does not match the instance and penalties".into(),
            });
        }
        Ok(red)
    }

    pub fn load_shrink(&self) -> Result<ShrinkOutcome, PipelineError> {
        Ok(ShrinkOutcome {
            separator: self.load(files::SEPARATOR)?,
            stack: self.load(files::SHRINK_STACK)?,
            shrunk: self.load(files::SHRUNK)?,
        })
    }

    pub fn save_shrink(&self, s: &ShrinkOutcome) -> Result<(), PipelineError> {
        self.save(files::SEPARATOR, &s.separator)?;
        self.save(files::SHRINK_STACK, &s.stack)?;
        self.save(files::SHRUNK, &s.shrunk)
    }
}

fn timed<T>(timings: &mut Timings, name: &str, f: impl FnOnce() -> Result<T, PipelineError>) -> Result<T, PipelineError> {
    let start = Instant::now();
    let out = f()?;
    timings.insert(name.to_string(), start.elapsed().as_secs_f64());
    Ok(out)
}

/// Runs every stage, persisting artifacts after each one when `out` is given.
pub fn run_pipeline(cfg: &PipelineConfig, out: Option<&Path>) -> Result<PipelineRun, PipelineError> {
    cfg.validate()?;
    let dir = out.map(ArtifactDir::create).transpose()?;
    let mut timings = Timings::new();
    if let Some(d) = &dir {
        d.save(files::CONFIG, cfg)?;
    }
    let tsp = timed(&mut timings, "generate", || load_instance(cfg))?;
    let reduction = timed(&mut timings, "reduce", || reduce(cfg, &tsp))?;
    if let Some(d) = &dir {
        d.save(files::INSTANCE, &tsp)?;
        d.save(files::MAXCUT, &reduction.maxcut)?;
    }
    let shrink = timed(&mut timings, "shrink", || shrink_stage(cfg, &reduction.maxcut))?;
    if let Some(d) = &dir {
        d.save_shrink(&shrink)?;
    }
    let training = timed(&mut timings, "train", || train_stage(cfg, &shrink.shrunk))?;
    if let Some(d) = &dir {
        d.save(files::TRAINING, &training)?;
    }
    let (cut, samples) = timed(&mut timings, "cut_eval", || cut_stage(cfg, &shrink, &training.params))?;
    if let Some(d) = &dir {
        d.save(files::CUT_EVAL, &cut)?;
        d.save_text(files::HISTOGRAM, histogram_csv(&shrink, &cut).as_bytes())?;
        if let Some(s) = &samples {
            d.save_samples(s)?;
        }
    }
    let report = timed(&mut timings, "report", || build_report(cfg, &reduction, &shrink, &training, &cut))?;
    if let Some(d) = &dir {
        d.save(files::REPORT, &report)?;
        d.save(files::TIMINGS, &timings)?;
    }
    Ok(PipelineRun {
        reduction,
        shrink,
        training,
        cut,
        samples,
        report,
        timings,
    })
}

/// Rebuilds `report.json` from the artifacts of a finished run.
pub fn regenerate_report(dir: &ArtifactDir) -> Result<PipelineReport, PipelineError> {
    let cfg: PipelineConfig = dir.load(files::CONFIG)?;
    let red = dir.load_reduction(&cfg)?;
    let shrink = dir.load_shrink()?;
    let training: TrainResult = dir.load(files::TRAINING)?;
    let cut: CutOutcome = dir.load(files::CUT_EVAL)?;
    let report = build_report(&cfg, &red, &shrink, &training, &cut)?;
    dir.save(files::REPORT, &report)?;
    Ok(report)
}
