//! `heatgraph` command-line front end.
//!
//! Exit codes: 0 on success, 2 on precondition or input errors, 3 on
//! internal numeric failure.

mod analyze;
mod generate;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "heatgraph", version, about = "Stochastic completeness and curvature of weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a model graph and/or radial profile.
    Generate(generate::GenerateArgs),
    /// Run the requested analyses on a graph or profile file.
    Analyze(AnalyzeArgs),
    /// Radial analyses (defaults to `--sc-series --lambda -1`).
    Radial(AnalyzeArgs),
    /// Curvature analyses (defaults to `--curvature all`).
    Curvature(AnalyzeArgs),
    /// Metric analyses (defaults to `--intrinsic --volume`).
    Metric(AnalyzeArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CurvatureScope {
    All,
    Edges,
    Vertices,
    Spheres,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    DualLp,
    Cyclefree,
    Birthdeath,
    Epsilon,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Combinatorial,
    Sigma,
    Sigma1,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyzeArgs {
    /// Graph file, or a radial profile when the name ends in `.profile`.
    pub input: PathBuf,
    /// Output directory for report.txt and CSV tables.
    #[arg(long, short, default_value = "heatgraph-out")]
    pub out: PathBuf,
    /// Root vertex (default: a `# root` comment in the file, else the first vertex).
    #[arg(long)]
    pub root: Option<String>,
    /// Radius of the truncation the graph came from; flags boundary effects.
    #[arg(long)]
    pub outer_radius: Option<usize>,
    #[arg(long, value_enum)]
    pub curvature: Option<CurvatureScope>,
    #[arg(long, value_enum, default_value = "dual-lp")]
    pub method: MethodArg,
    /// Idleness for `--method epsilon`.
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
    /// Check CD(K, ∞) at every vertex.
    #[arg(long, allow_negative_numbers = true)]
    pub cd: Option<f64>,
    /// Laplacian comparison around the root up to this radius.
    #[arg(long)]
    pub comparison: Option<usize>,
    /// Sphere curvature radius (default: eccentricity of the root).
    #[arg(long = "R")]
    pub radius: Option<usize>,
    /// SC series of a weakly spherically symmetric graph.
    #[arg(long)]
    pub sc_series: bool,
    /// Radial λ-harmonic recursion for this λ < 0.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Heat-loss profile, e.g. `t=1 R=10,20,50`.
    #[arg(long, num_args = 1..)]
    pub heatloss: Option<Vec<String>>,
    /// Metric for intrinsic/volume tests.
    #[arg(long, value_enum, default_value = "combinatorial")]
    pub metric: MetricArg,
    #[arg(long)]
    pub intrinsic: bool,
    #[arg(long)]
    pub volume: bool,
    #[arg(long)]
    pub grigoryan: bool,
    /// The cubic volume test (combinatorial metric only).
    #[arg(long)]
    pub cubic: bool,
    /// Volume radii, comma separated (default: a grid up to the largest distance).
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
}

impl AnalyzeArgs {
    fn has_operation(&self) -> bool {
        self.curvature.is_some()
            || self.cd.is_some()
            || self.comparison.is_some()
            || self.sc_series
            || self.lambda.is_some()
            || self.heatloss.is_some()
            || self.intrinsic
            || self.volume
            || self.grigoryan
            || self.cubic
    }
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var("HEATGRAPH_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| heatgraph::Error::Precondition(format!("HEATGRAPH_THREADS must be a positive integer, got `{raw}`")))?;
        if n == 0 {
            return Err(heatgraph::Error::Precondition("HEATGRAPH_THREADS must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    match cli.command {
        Command::Generate(args) => generate::run(&args),
        Command::Analyze(args) => analyze::run(&args),
        Command::Radial(mut args) => {
            if !args.has_operation() {
                args.sc_series = true;
                args.lambda = Some(-1.0);
            }
            analyze::run(&args)
        }
        Command::Curvature(mut args) => {
            if !args.has_operation() {
                args.curvature = Some(CurvatureScope::All);
            }
            analyze::run(&args)
        }
        Command::Metric(mut args) => {
            if !args.has_operation() {
                args.intrinsic = true;
                args.volume = true;
            }
            analyze::run(&args)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<heatgraph::Error>() {
        Some(e) if e.is_numeric() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("heatgraph: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::Context;

    #[test]
    fn numeric_failures_exit_with_3() {
        let lp: anyhow::Error = heatgraph::Error::LinearProgram("cycling".into()).into();
        assert_eq!(exit_code(&lp), 3);
        let eig = Err::<(), _>(heatgraph::Error::EigenFailure("no convergence".into()))
            .context("heat kernel")
            .unwrap_err();
        assert_eq!(exit_code(&eig), 3);
        let pre: anyhow::Error = heatgraph::Error::Precondition("bad".into()).into();
        assert_eq!(exit_code(&pre), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 2);
    }

    #[test]
    fn themed_defaults_fill_in_operations() {
        let cli = Cli::try_parse_from(["heatgraph", "radial", "g.profile"]).unwrap();
        let Command::Radial(args) = cli.command else { panic!("wrong subcommand") };
        assert!(!args.has_operation());
        let cli = Cli::try_parse_from(["heatgraph", "analyze", "g.graph", "--cd", "-0.5"]).unwrap();
        let Command::Analyze(args) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(args.cd, Some(-0.5));
        assert!(args.has_operation());
    }
}
