use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sbm_spectral::censor::{spectral_partition_censor_with, observation_matrix, CensorConfig, DegreeSource};
use sbm_spectral::graph::{io as gio, sample_censor, sample_sbm, SbmParams};
use sbm_spectral::harness::{density_heatmap, gamma_correctness, run_experiment, ExperimentConfig};
use sbm_spectral::multiblock::{partition_multi_with, MultiConfig};
use sbm_spectral::twoblock::{partition_two_with, TwoBlockConfig};
use sbm_spectral::{Clustering, Error, Graph};

/// Community recovery in sparse stochastic block models.
#[derive(Parser)]
#[command(name = "sbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    /// Two blocks of n vertices, rates a/n and b/n.
    TwoBlock,
    /// k blocks partitioning n vertices, rates a/n and b/n.
    KBlock,
    /// Parities on the edges of G(2n, p) with noise epsilon.
    Censor,
}

#[derive(Clone, Copy, ValueEnum)]
enum Degree {
    Graph,
    Observed,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and its ground-truth clustering.
    Generate {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, default_value_t = 0.0)]
        b: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Graph (or censor instance) output file.
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth clustering output file.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Two-block partition (spectral step on red edges, correction on blue).
    Partition2 {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trim_factor: Option<f64>,
        #[arg(long)]
        correction_threshold: Option<f64>,
        #[arg(long)]
        correction_rounds: Option<usize>,
        /// Clustering output file (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// k-block partition.
    Partitionk {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trim_factor: Option<f64>,
        #[arg(long)]
        merge_threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition a censor instance.
    Censor {
        #[arg(long)]
        input: PathBuf,
        /// Edge probability of the observed graph.
        #[arg(long)]
        p: f64,
        #[arg(long)]
        trim_factor: Option<f64>,
        #[arg(long, value_enum, default_value_t = Degree::Graph)]
        degree: Degree,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two clusterings.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Density plot of a graph sorted by clustering, as ASCII PGM.
    Heatmap {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        clustering: PathBuf,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch described by a TOML file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Directory for report.jsonl, timings.jsonl and heatmaps.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for bad configuration or input, 1 for failures of the pipeline itself.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParams(_) | Error::Parse { .. } | Error::Io(_) => 2,
        _ => 1,
    }
}

fn run(command: Command) -> sbm_spectral::Result<()> {
    match command {
        Command::Generate {
            model,
            n,
            a,
            b,
            k,
            p,
            epsilon,
            seed,
            out,
            truth,
        } => {
            let truth_clustering = match model {
                Model::TwoBlock | Model::KBlock => {
                    let params = match model {
                        Model::TwoBlock => SbmParams::two_block(n, a, b)?,
                        _ => SbmParams::k_block(n, k, a, b)?,
                    };
                    let (g, t) = sample_sbm(&params, seed)?;
                    gio::write_graph(&g, create(&out)?)?;
                    t
                }
                Model::Censor => {
                    let inst = sample_censor(n, p, epsilon, seed)?;
                    gio::write_censor(&inst.graph, &inst.edge_labels, create(&out)?)?;
                    inst.truth()
                }
            };
            if let Some(path) = truth {
                gio::write_clustering(&truth_clustering, create(&path)?)?;
            }
            Ok(())
        }
        Command::Partition2 {
            graph,
            a,
            b,
            seed,
            trim_factor,
            correction_threshold,
            correction_rounds,
            out,
        } => {
            let g = load_graph(&graph)?;
            let mut cfg = TwoBlockConfig::for_partition(a, b)?;
            cfg.trim_factor = trim_factor.unwrap_or(cfg.trim_factor);
            cfg.correction_threshold = correction_threshold.unwrap_or(cfg.correction_threshold);
            cfg.correction_rounds = correction_rounds.unwrap_or(cfg.correction_rounds);
            emit(&partition_two_with(&g, &cfg, seed)?, out.as_deref())
        }
        Command::Partitionk {
            graph,
            a,
            b,
            k,
            seed,
            trim_factor,
            merge_threshold,
            out,
        } => {
            let g = load_graph(&graph)?;
            let mut cfg = MultiConfig::new(a, b, k, g.num_vertices())?;
            cfg.trim_factor = trim_factor.unwrap_or(cfg.trim_factor);
            cfg.merge_threshold = merge_threshold.unwrap_or(cfg.merge_threshold);
            emit(&partition_multi_with(&g, &cfg, seed)?, out.as_deref())
        }
        Command::Censor {
            input,
            p,
            trim_factor,
            degree,
            out,
        } => {
            let (g, labels) = gio::read_censor(open(&input)?)?;
            let mut cfg = CensorConfig::default();
            cfg.trim_factor = trim_factor.unwrap_or(cfg.trim_factor);
            cfg.degree_source = match degree {
                Degree::Graph => DegreeSource::Graph,
                Degree::Observed => DegreeSource::Observed,
            };
            let y = observation_matrix(&g, &labels)?;
            emit(&spectral_partition_censor_with(&y, p, &g, &cfg)?, out.as_deref())
        }
        Command::Eval { pred, truth } => {
            let truth = gio::read_clustering(open(&truth)?, None)?;
            let pred = gio::read_clustering(open(&pred)?, Some(truth.k()))?;
            let report = gamma_correctness(&pred, &truth)?;
            let text = serde_json::to_string(&report).map_err(io::Error::from)?;
            println!("{text}");
            Ok(())
        }
        Command::Heatmap {
            graph,
            clustering,
            bins,
            out,
        } => {
            let g = load_graph(&graph)?;
            let c = gio::read_clustering(open(&clustering)?, None)?;
            let h = density_heatmap(&g, &c, bins)?;
            match out {
                Some(path) => h.write_pgm(create(&path)?)?,
                None => h.write_pgm(io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Experiment { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let report = run_experiment(&cfg, Some(&out))?;
            for s in &report.summaries {
                println!(
                    "point {}: {} trials, {} errors, mean gamma {}, success rate {:.3}",
                    s.point,
                    s.trials,
                    s.errors,
                    s.mean_gamma.map_or("-".to_string(), |g| format!("{g:.4}")),
                    s.success_rate
                );
            }
            Ok(())
        }
    }
}

fn open(path: &Path) -> sbm_spectral::Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| {
        Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn create(path: &Path) -> sbm_spectral::Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| {
        Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn load_graph(path: &Path) -> sbm_spectral::Result<Graph> {
    gio::read_graph(open(path)?)
}

fn emit(c: &Clustering, out: Option<&Path>) -> sbm_spectral::Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            gio::write_clustering(c, &mut w)?;
            w.flush()?;
        }
        None => gio::write_clustering(c, io::stdout().lock())?,
    }
    Ok(())
}
