use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use shrinkcut::jsonfmt::read_json;
use shrinkcut::shrink::TieBreak;
use shrinkcut::pipeline::{
    cut_from_artifacts, files, generate_stage, regenerate_report, run_pipeline, shrink_from_artifacts, train_from_artifacts,
    verify_from_artifacts, ArtifactDir, InstanceSource, PipelineConfig, PipelineError, PipelineReport,
};

#[derive(Parser)]
#[command(name = "shrinkcut", version, about = "TSP via graph shrinking and wire-cut QAOA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage and write all artifacts.
    Run(Opts),
    /// Generate or load the instance and write the MaxCut reduction.
    Generate(Opts),
    /// Find the separator and shrink it to one vertex.
    ShrinkOnly(Opts),
    /// Train the uncut QAOA on the shrunk graph.
    Train(Opts),
    /// Evaluate the cut circuits and write the report.
    CutEval(Opts),
    /// Run the consistency checks; exit code 2 when one fails.
    Verify(Opts),
    /// Rebuild the report from existing artifacts.
    Report(Opts),
}

#[derive(Args, Clone, Debug)]
struct Opts {
    /// Artifact directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Base configuration file; defaults to `<out>/config.json` for stage commands.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of cities of a generated instance.
    #[arg(long)]
    n: Option<usize>,
    /// TSP instance JSON to load instead of generating one.
    #[arg(long, conflicts_with = "n")]
    instance: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    penalty_a: Option<f64>,
    #[arg(long)]
    penalty_b: Option<f64>,
    /// Allowed imbalance between the separator sides.
    #[arg(long)]
    beta: Option<usize>,
    #[arg(long)]
    shrink_target: Option<usize>,
    #[arg(long)]
    node_limit: Option<usize>,
    /// Rule for separator edges equally close to integral.
    #[arg(long, value_enum)]
    tie_break: Option<TieArg>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
    /// Monte-Carlo shots; 0 keeps the exact evaluation only.
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TieArg {
    Lexicographic,
    Heaviest,
}

impl Opts {
    fn config(&self, from_dir: bool) -> Result<PipelineConfig, PipelineError> {
        let saved = self.out.join(files::CONFIG);
        let base = match &self.config {
            Some(p) => Some(p.clone()),
            None if from_dir && saved.exists() => Some(saved),
            None => None,
        };
        let mut cfg = match base {
            Some(p) => read_json(&p).map_err(|e| PipelineError::Io {
                path: p.clone(),
                message: e.to_string(),
            })?,
            None => PipelineConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.instance = InstanceSource::Generate { n };
        }
        if let Some(p) = &self.instance {
            cfg.instance = InstanceSource::File { path: p.clone() };
        }
        macro_rules! set {
            ($($field:ident <- $opt:ident),*) => {
                $(if let Some(v) = self.$opt { cfg.$field = v; })*
            };
        }
        set!(seed <- seed, beta <- beta, shrink_target <- shrink_target, separator_node_limit <- node_limit,
             layers <- layers, restarts <- restarts, max_evals <- max_evals, shots <- shots, top_k <- top_k);
        if let Some(t) = self.tie_break {
            cfg.tie_break = match t {
                TieArg::Lexicographic => TieBreak::Lexicographic,
                TieArg::Heaviest => TieBreak::Heaviest,
            };
        }
        if self.penalty_a.is_some() {
            cfg.penalty_a = self.penalty_a;
        }
        if self.penalty_b.is_some() {
            cfg.penalty_b = self.penalty_b;
        }
        Ok(cfg)
    }
}

fn print_report(r: &PipelineReport, out: &Path) {
    println!(
        "instance: {} cities, QUBO {} vars, MaxCut {} vertices / {} edges",
        r.reduction.cities, r.reduction.qubo_variables, r.reduction.maxcut_vertices, r.reduction.maxcut_edges
    );
    println!(
        "separator: |C|={} |A|={} |B|={} (proven optimal: {})",
        r.separator.size, r.separator.side_a, r.separator.side_b, r.separator.proven_optimal
    );
    println!(
        "shrunk: {} vertices, offset {:.6}, lossless: {:?}",
        r.shrink.shrunk_vertices, r.shrink.total_offset, r.exact.lossless
    );
    println!(
        "fragments: {}+{} qubits, kappa {} (harada {} x peng {})",
        r.cutting.qubits_a, r.cutting.qubits_b, r.cutting.kappa_joint, r.cutting.kappa_harada, r.cutting.kappa_peng
    );
    println!(
        "<O> uncut {:.6}, cut {:.6}, sampling {:.6}",
        r.cutting.expectation_uncut, r.cutting.expectation_cut, r.cutting.expectation_sampling
    );
    if let Some(mc) = &r.monte_carlo {
        println!(
            "monte-carlo: {} shots, mean {:.6} +- {:.6}, TV {:.4}",
            mc.shots, mc.mean, mc.standard_error, mc.tv_distance
        );
    }
    match &r.decoding.best_tour {
        Some(t) => println!(
            "best decoded tour {:?} length {:.6} (optimum {:.6}, found: {})",
            t.order, t.length, r.decoding.optimal_length, r.decoding.found_optimal
        ),
        None => println!("no feasible tour among the top {} strings", r.decoding.top_k),
    }
    println!("artifacts in {}", out.display());
}

fn execute(cmd: Command) -> Result<ExitCode, PipelineError> {
    match cmd {
        Command::Run(o) => {
            let run = run_pipeline(&o.config(false)?, Some(&o.out))?;
            print_report(&run.report, &o.out);
        }
        Command::Generate(o) => {
            let cfg = o.config(false)?;
            let red = generate_stage(&cfg, &ArtifactDir::create(&o.out)?)?;
            println!(
                "{} cities -> {} QUBO variables -> {} MaxCut vertices",
                red.tsp.n_cities(),
                red.qubo.n_vars(),
                red.maxcut.n_vertices()
            );
        }
        Command::ShrinkOnly(o) => {
            let s = shrink_from_artifacts(&o.config(true)?, &ArtifactDir::create(&o.out)?)?;
            println!(
                "separator |C|={} |A|={} |B|={}; shrunk graph has {} vertices",
                s.separator.c.len(),
                s.separator.a.len(),
                s.separator.b.len(),
                s.shrunk.n_vertices()
            );
        }
        Command::Train(o) => {
            let t = train_from_artifacts(&o.config(true)?, &ArtifactDir::create(&o.out)?)?;
            println!("params {:?}, <O> = {:.6} after {} evaluations", t.params.angles(), t.expectation, t.evaluations);
        }
        Command::CutEval(o) => {
            let (_, report) = cut_from_artifacts(&o.config(true)?, &ArtifactDir::create(&o.out)?)?;
            print_report(&report, &o.out);
        }
        Command::Verify(o) => {
            let rep = verify_from_artifacts(&o.config(true)?, &ArtifactDir::create(&o.out)?)?;
            for c in &rep.checks {
                println!(
                    "{} {} (max deviation {:e}, {} cases)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_deviation,
                    c.cases
                );
            }
            if !rep.passed() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Report(o) => {
            let report = regenerate_report(&ArtifactDir::create(&o.out)?)?;
            print_report(&report, &o.out);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
