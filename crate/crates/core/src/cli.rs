//! Command-line front end.
//!
//! Every command writes `{"config": <resolved RunConfig>, "result": ...}` as
//! JSON, or a CSV table preceded by a `# config: ` comment line. Exit status
//! is 0 on success, 1 for invalid input or usage, 2 when the computation
//! itself fails. Errors are reported as one JSON object on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::classical_id::{
    corr_dim, mle_id, two_nn, IdEstimate, IdMethod, DEFAULT_DISCARD_FRACTION, DEFAULT_MLE_K,
    DEFAULT_N_RADII,
};
use crate::cloud::{load_point_cloud, pairwise_distances, CloudFormat, PointCloud};
use crate::descriptors::lifespan_sum;
use crate::error::{Error, ErrorClass, Result};
use crate::persistence::{mst_h0, vr_persistence, Threshold};
use crate::phdim::{estimate_phdim, PhDimConfig, DEFAULT_REPEATS};
use crate::trajectory::{
    gengap_correlate, layer_trajectory, EmbeddingManifest, Measure, ModelList, TrajectoryConfig,
    DEFAULT_BATCH_SIZE, DEFAULT_N_BATCHES,
};

pub const THREADS_ENV: &str = "TOPOPROBE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "topoprobe", version, about = "Persistent homology and fractal dimension of point clouds")]
struct Cli {
    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, env = THREADS_ENV, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Args)]
struct Common {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CloudInput {
    /// Point cloud, `.npy` or `.csv`.
    #[arg(long, short)]
    input: PathBuf,
    /// Defaults to the file extension.
    #[arg(long)]
    input_format: Option<CloudFormat>,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Vietoris–Rips barcode of a point cloud.
    Persist {
        #[command(flatten)]
        cloud: CloudInput,
        #[arg(long, default_value_t = 1)]
        max_degree: usize,
        /// Filtration cap, a positive number or `auto`.
        #[arg(long, default_value = "auto")]
        threshold: Threshold,
        #[command(flatten)]
        common: Common,
    },
    /// Power-weighted lifespan sum E_alpha^degree.
    Descriptor {
        #[command(flatten)]
        cloud: CloudInput,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Persistent-homological fractal dimension.
    Phdim {
        #[command(flatten)]
        cloud: CloudInput,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        /// Comma-separated sample sizes; a geometric grid when omitted.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_REPEATS)]
        repeats: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Classical intrinsic-dimension estimates.
    Id {
        #[command(flatten)]
        cloud: CloudInput,
        #[arg(long, value_enum, default_value_t = IdChoice::All)]
        method: IdChoice,
        /// Neighbours used by the MLE estimator.
        #[arg(long, default_value_t = DEFAULT_MLE_K)]
        k: usize,
        /// Share of the largest neighbour-distance ratios TwoNN ignores.
        #[arg(long, default_value_t = DEFAULT_DISCARD_FRACTION)]
        discard_fraction: f64,
        /// Size of the radius grid for the correlation dimension.
        #[arg(long, default_value_t = DEFAULT_N_RADII)]
        n_radii: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Per-layer, per-epoch measurements over an embedding manifest.
    Trajectory {
        /// Embedding manifest (JSON).
        #[arg(long, short, alias = "manifest")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
        batch_size: usize,
        #[arg(long, default_value_t = DEFAULT_N_BATCHES)]
        n_batches: usize,
        #[arg(long, value_delimiter = ',', default_value = "E_alpha_0")]
        measures: Vec<Measure>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_REPEATS)]
        phdim_repeats: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Correlation of last-layer measures with test accuracy across models.
    Correlate {
        /// JSON model list: {"models": [{"report": path, "test_accuracy": x}]}.
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value = "E_alpha_0")]
        measure: Measure,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum IdChoice {
    All,
    #[value(alias = "two-nn", alias = "twonn")]
    TwoNn,
    Mle,
    #[value(alias = "corr-dim", alias = "corrdim")]
    CorrDim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Persist,
    Descriptor,
    Phdim,
    Id,
    Trajectory,
    Correlate,
}

/// Fully resolved options of one invocation, echoed into its output.
///
/// The output path and thread count are not echoed; neither affects the
/// result.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_format: Option<CloudFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<IdChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discard_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_radii: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_batches: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measures: Option<Vec<Measure>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phdim_repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<Measure>,
    pub seed: u64,
    pub format: OutputFormat,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub threads: usize,
}

impl RunConfig {
    fn base(command: Command, input: PathBuf, common: Common, threads: usize) -> Self {
        Self {
            command,
            input,
            input_format: None,
            alpha: None,
            degree: None,
            max_degree: None,
            threshold: None,
            sizes: None,
            repeats: None,
            method: None,
            k: None,
            discard_fraction: None,
            n_radii: None,
            batch_size: None,
            n_batches: None,
            measures: None,
            phdim_repeats: None,
            measure: None,
            seed: common.seed,
            format: common.format,
            output: common.output,
            threads,
        }
    }

    /// Parses command-line arguments (including the program name).
    pub fn parse_from<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let threads = cli.threads;
        let cloud_base = |command, cloud: CloudInput, common| {
            let mut cfg = RunConfig::base(command, cloud.input.clone(), common, threads);
            cfg.input_format = Some(match cloud.input_format {
                Some(f) => f,
                None => CloudFormat::from_path(&cloud.input).unwrap_or(CloudFormat::Npy),
            });
            cfg
        };
        Ok(match cli.command {
            CommandArgs::Persist {
                cloud,
                max_degree,
                threshold,
                common,
            } => RunConfig {
                max_degree: Some(max_degree),
                threshold: Some(threshold.to_string()),
                ..cloud_base(Command::Persist, cloud, common)
            },
            CommandArgs::Descriptor {
                cloud,
                alpha,
                degree,
                common,
            } => RunConfig {
                alpha: Some(alpha),
                degree: Some(degree),
                threshold: (degree > 0).then(|| Threshold::Auto.to_string()),
                ..cloud_base(Command::Descriptor, cloud, common)
            },
            CommandArgs::Phdim {
                cloud,
                alpha,
                degree,
                sizes,
                repeats,
                common,
            } => RunConfig {
                alpha: Some(alpha),
                degree: Some(degree),
                sizes,
                repeats: Some(repeats),
                ..cloud_base(Command::Phdim, cloud, common)
            },
            CommandArgs::Id {
                cloud,
                method,
                k,
                discard_fraction,
                n_radii,
                common,
            } => {
                let uses = |m: IdChoice| method == IdChoice::All || method == m;
                RunConfig {
                    method: Some(method),
                    k: uses(IdChoice::Mle).then_some(k),
                    discard_fraction: uses(IdChoice::TwoNn).then_some(discard_fraction),
                    n_radii: uses(IdChoice::CorrDim).then_some(n_radii),
                    ..cloud_base(Command::Id, cloud, common)
                }
            }
            CommandArgs::Trajectory {
                input,
                batch_size,
                n_batches,
                measures,
                alpha,
                phdim_repeats,
                common,
            } => RunConfig {
                batch_size: Some(batch_size),
                n_batches: Some(n_batches),
                phdim_repeats: measures.contains(&Measure::PhDim).then_some(phdim_repeats),
                measures: Some(measures),
                alpha: Some(alpha),
                ..RunConfig::base(Command::Trajectory, input, common, threads)
            },
            CommandArgs::Correlate {
                input,
                measure,
                common,
            } => RunConfig {
                measure: Some(measure),
                ..RunConfig::base(Command::Correlate, input, common, threads)
            },
        })
    }

    fn load_cloud(&self) -> Result<PointCloud> {
        load_point_cloud(&self.input, self.input_format.unwrap_or(CloudFormat::Npy))
    }
}

/// Result of one command before serialization.
#[derive(Debug)]
pub enum Report {
    Barcode(crate::persistence::Barcode),
    Descriptor(crate::descriptors::DescriptorValue),
    PhDim(crate::phdim::PhDimEstimate),
    Id(Vec<IdEstimate>),
    Trajectory(crate::trajectory::TrajectoryReport),
    Correlation(crate::trajectory::CorrelationResult),
}

impl Report {
    fn result_json(&self) -> serde_json::Value {
        let v = match self {
            Report::Barcode(b) => serde_json::to_value(b),
            Report::Descriptor(d) => serde_json::to_value(d),
            Report::PhDim(p) => serde_json::to_value(p),
            Report::Id(ids) => serde_json::to_value(ids),
            Report::Trajectory(t) => serde_json::to_value(t),
            Report::Correlation(c) => serde_json::to_value(c),
        };
        v.expect("report serializes")
    }

    fn write_csv_table<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        match self {
            Report::Barcode(b) => b.write_csv(w),
            Report::Trajectory(t) => t.write_csv(w),
            Report::Descriptor(d) => {
                writeln!(w, "alpha,degree,value,n_intervals")?;
                writeln!(w, "{},{},{},{}", d.alpha, d.degree, d.value, d.n_intervals)
            }
            Report::PhDim(p) => {
                writeln!(w, "n,mean_e")?;
                for pt in &p.points {
                    writeln!(w, "{},{}", pt.n, pt.mean_e)?;
                }
                Ok(())
            }
            Report::Id(ids) => {
                writeln!(w, "method,value")?;
                for id in ids {
                    writeln!(w, "{},{}", id.method, id.value)?;
                }
                Ok(())
            }
            Report::Correlation(c) => {
                writeln!(w, "measure,target,r,n_pairs")?;
                writeln!(w, "{},{},{},{}", c.measure, c.target, c.r, c.n_pairs)
            }
        }
    }
}

/// Executes the command described by `config`.
pub fn execute(config: &RunConfig) -> Result<Report> {
    match config.command {
        Command::Persist => {
            let dist = pairwise_distances(&config.load_cloud()?);
            let max_degree = config.max_degree.unwrap_or(1);
            let threshold: Threshold = config
                .threshold
                .as_deref()
                .unwrap_or("auto")
                .parse()
                .map_err(Error::InvalidConfig)?;
            Ok(Report::Barcode(vr_persistence(&dist, max_degree, threshold)?))
        }
        Command::Descriptor => {
            let dist = pairwise_distances(&config.load_cloud()?);
            let degree = config.degree.unwrap_or(0);
            let barcode = if degree == 0 {
                mst_h0(&dist)
            } else {
                vr_persistence(&dist, degree, Threshold::Auto)?
            };
            Ok(Report::Descriptor(lifespan_sum(
                &barcode,
                degree,
                config.alpha.unwrap_or(1.0),
            )?))
        }
        Command::Phdim => {
            let cfg = PhDimConfig {
                alpha: config.alpha.unwrap_or(1.0),
                degree: config.degree.unwrap_or(0),
                sample_sizes: config.sizes.clone(),
                repeats: config.repeats.unwrap_or(DEFAULT_REPEATS),
                seed: config.seed,
            };
            Ok(Report::PhDim(estimate_phdim(&config.load_cloud()?, &cfg)?))
        }
        Command::Id => {
            let cloud = config.load_cloud()?;
            let methods: Vec<IdMethod> = match config.method.unwrap_or(IdChoice::All) {
                IdChoice::All => IdMethod::ALL.to_vec(),
                IdChoice::TwoNn => vec![IdMethod::TwoNn],
                IdChoice::Mle => vec![IdMethod::Mle],
                IdChoice::CorrDim => vec![IdMethod::CorrDim],
            };
            let estimates = methods
                .into_iter()
                .map(|m| match m {
                    IdMethod::TwoNn => two_nn(
                        &cloud,
                        config.discard_fraction.unwrap_or(DEFAULT_DISCARD_FRACTION),
                    ),
                    IdMethod::Mle => mle_id(&cloud, config.k.unwrap_or(DEFAULT_MLE_K)),
                    IdMethod::CorrDim => corr_dim(&cloud, config.n_radii.unwrap_or(DEFAULT_N_RADII)),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Report::Id(estimates))
        }
        Command::Trajectory => {
            let manifest = EmbeddingManifest::load(&config.input)?;
            let defaults = TrajectoryConfig::default();
            let cfg = TrajectoryConfig {
                batch_size: config.batch_size.unwrap_or(defaults.batch_size),
                n_batches: config.n_batches.unwrap_or(defaults.n_batches),
                measures: config.measures.clone().unwrap_or(defaults.measures),
                alpha: config.alpha.unwrap_or(defaults.alpha),
                phdim_repeats: config.phdim_repeats.unwrap_or(defaults.phdim_repeats),
                seed: config.seed,
            };
            Ok(Report::Trajectory(layer_trajectory(&manifest, &cfg)?))
        }
        Command::Correlate => {
            let measure = config.measure.unwrap_or(Measure::E_alpha_0);
            let models = ModelList::load_models(&config.input, measure)?;
            Ok(Report::Correlation(gengap_correlate(&models, measure)?))
        }
    }
}

/// Serializes a report together with its configuration echo.
pub fn render(config: &RunConfig, report: &Report) -> Vec<u8> {
    let echo = serde_json::to_value(config).expect("config serializes");
    match config.format {
        OutputFormat::Json => {
            let mut out = serde_json::to_vec_pretty(&json!({
                "config": echo,
                "result": report.result_json(),
            }))
            .expect("json");
            out.push(b'\n');
            out
        }
        OutputFormat::Csv => {
            let mut out = format!("# config: {echo}\n").into_bytes();
            report.write_csv_table(&mut out).expect("write to vec");
            out
        }
    }
}

fn error_line(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Error::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Runs a full invocation and returns the process exit status.
pub fn run(config: &RunConfig) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}", error_line("InvalidConfig", &e.to_string()));
            return 1;
        }
    };
    let outcome = pool
        .install(|| execute(config))
        .and_then(|report| write_output(config.output.as_deref(), &render(config, &report)));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            match e.class() {
                ErrorClass::Validation => 1,
                ErrorClass::Computation => 2,
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::parse_from(args) {
        Ok(config) => run(&config),
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("usage error");
            eprintln!("{}", error_line("UsageError", first));
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_persist_defaults() {
        let cfg = RunConfig::parse_from(["topoprobe", "persist", "--input", "sq.csv"]).unwrap();
        assert_eq!(cfg.command, Command::Persist);
        assert_eq!(cfg.max_degree, Some(1));
        assert_eq!(cfg.threshold.as_deref(), Some("auto"));
        assert_eq!(cfg.input_format, Some(CloudFormat::Csv));
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn parses_lists() {
        let cfg = RunConfig::parse_from([
            "topoprobe", "phdim", "-i", "x.npy", "--sizes", "10,20,40", "--seed", "3",
        ])
        .unwrap();
        assert_eq!(cfg.sizes, Some(vec![10, 20, 40]));
        let cfg = RunConfig::parse_from([
            "topoprobe", "trajectory", "--manifest", "m.json", "--measures", "E_alpha_0,phdim",
        ])
        .unwrap();
        assert_eq!(cfg.measures, Some(vec![Measure::E_alpha_0, Measure::PhDim]));
        assert_eq!(cfg.phdim_repeats, Some(DEFAULT_REPEATS));
    }

    #[test]
    fn unknown_flag_is_rejected() {
        assert!(RunConfig::parse_from(["topoprobe", "persist", "--input", "a.npy", "--bogus"]).is_err());
        assert_eq!(
            main_with_args(["topoprobe", "persist", "--input", "a.npy", "--bogus"]),
            1
        );
    }

    #[test]
    fn echo_omits_output_and_threads() {
        let cfg = RunConfig::parse_from([
            "topoprobe", "--threads", "3", "id", "-i", "a.csv", "--method", "mle", "-o", "out.json",
        ])
        .unwrap();
        let echo = serde_json::to_value(&cfg).unwrap();
        assert!(echo.get("output").is_none());
        assert!(echo.get("threads").is_none());
        assert_eq!(echo["method"], "mle");
        assert_eq!(echo["k"], 20);
        assert!(echo.get("n_radii").is_none());
    }
}
