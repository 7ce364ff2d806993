//! Single stages driven from an artifact directory.

use std::time::Instant;

use super::{
    build_report, cut_stage, files, histogram_csv, load_instance, reduce, run_checks, shrink_stage, train_stage, ArtifactDir,
    CutOutcome, PipelineConfig, PipelineError, PipelineReport, Reduction, ShrinkOutcome, Timings, VerifyReport,
};
use crate::qsim::TrainResult;

fn record(dir: &ArtifactDir, name: &str, start: Instant) -> Result<(), PipelineError> {
    let mut timings: Timings = dir.load(files::TIMINGS).unwrap_or_default();
    timings.insert(name.to_string(), start.elapsed().as_secs_f64());
    dir.save(files::TIMINGS, &timings)
}

/// Writes the config, the instance and the MaxCut graph.
pub fn generate_stage(cfg: &PipelineConfig, dir: &ArtifactDir) -> Result<Reduction, PipelineError> {
    cfg.validate()?;
    let start = Instant::now();
    let tsp = load_instance(cfg)?;
    let red = reduce(cfg, &tsp)?;
    dir.save(files::CONFIG, cfg)?;
    dir.save(files::INSTANCE, &red.tsp)?;
    dir.save(files::MAXCUT, &red.maxcut)?;
    record(dir, "generate", start)?;
    Ok(red)
}

pub fn shrink_from_artifacts(cfg: &PipelineConfig, dir: &ArtifactDir) -> Result<ShrinkOutcome, PipelineError> {
    cfg.validate()?;
    let red = dir.load_reduction(cfg)?;
    let start = Instant::now();
    let out = shrink_stage(cfg, &red.maxcut)?;
    dir.save(files::CONFIG, cfg)?;
    dir.save_shrink(&out)?;
    record(dir, "shrink", start)?;
    Ok(out)
}

pub fn train_from_artifacts(cfg: &PipelineConfig, dir: &ArtifactDir) -> Result<TrainResult, PipelineError> {
    cfg.validate()?;
    let shrink = dir.load_shrink()?;
    let start = Instant::now();
    let out = train_stage(cfg, &shrink.shrunk)?;
    dir.save(files::CONFIG, cfg)?;
    dir.save(files::TRAINING, &out)?;
    record(dir, "train", start)?;
    Ok(out)
}

/// Cut evaluation plus the report; `shots = 0` leaves out the Monte-Carlo part.
pub fn cut_from_artifacts(cfg: &PipelineConfig, dir: &ArtifactDir) -> Result<(CutOutcome, PipelineReport), PipelineError> {
    cfg.validate()?;
    let red = dir.load_reduction(cfg)?;
    let shrink = dir.load_shrink()?;
    let training: TrainResult = dir.load(files::TRAINING)?;
    let start = Instant::now();
    let (cut, samples) = cut_stage(cfg, &shrink, &training.params)?;
    dir.save(files::CONFIG, cfg)?;
    dir.save(files::CUT_EVAL, &cut)?;
    dir.save_text(files::HISTOGRAM, histogram_csv(&shrink, &cut).as_bytes())?;
    match &samples {
        Some(s) => dir.save_samples(s)?,
        None => {
            let stale = dir.path(files::SAMPLES);
            if stale.exists() {
                std::fs::remove_file(&stale).map_err(|e| PipelineError::Io {
                    path: stale,
                    message: e.to_string(),
                })?;
            }
        }
    }
    record(dir, "cut_eval", start)?;
    let report = build_report(cfg, &red, &shrink, &training, &cut)?;
    dir.save(files::REPORT, &report)?;
    Ok((cut, report))
}

/// Checks the artifacts in `dir`, computing missing ones in memory from `cfg`.
pub fn verify_from_artifacts(cfg: &PipelineConfig, dir: &ArtifactDir) -> Result<VerifyReport, PipelineError> {
    cfg.validate()?;
    let red = match dir.load_reduction(cfg) {
        Ok(r) => r,
        Err(PipelineError::Io { .. }) => reduce(cfg, &load_instance(cfg)?)?,
        Err(e) => return Err(e),
    };
    let shrink = match dir.load_shrink() {
        Ok(s) => s,
        Err(PipelineError::Io { .. }) => shrink_stage(cfg, &red.maxcut)?,
        Err(e) => return Err(e),
    };
    let cut: Option<CutOutcome> = dir.load(files::CUT_EVAL).ok();
    let report = run_checks(&red, &shrink, cut.as_ref(), cfg.seed)?;
    dir.save(files::VERIFY, &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{regenerate_report, SHIPPED_SEED};

    #[test]
    fn stages_chain_through_files() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = ArtifactDir::create(tmp.path()).unwrap();
        let cfg = PipelineConfig {
            restarts: 2,
            max_evals: 30,
            shots: 0,
            ..PipelineConfig::generate(4, SHIPPED_SEED)
        };
        assert!(matches!(shrink_from_artifacts(&cfg, &dir), Err(PipelineError::Io { .. })));
        generate_stage(&cfg, &dir).unwrap();
        shrink_from_artifacts(&cfg, &dir).unwrap();
        train_from_artifacts(&cfg, &dir).unwrap();
        let (cut, report) = cut_from_artifacts(&cfg, &dir).unwrap();
        assert!(cut.monte_carlo.is_none() && report.monte_carlo.is_none());
        assert!(!dir.path(files::SAMPLES).exists());
        assert_eq!(regenerate_report(&dir).unwrap(), report);
        assert!(verify_from_artifacts(&cfg, &dir).unwrap().passed());
    }
}
