use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use zeta_mds_core::{Approach, Measure, Metric, Variant};

pub const DEFAULT_ZEROS: &str = "data/zeta_zeros_10000.txt";

#[derive(Debug, Parser)]
#[command(name = "zeta-mds", version, about = "Classical MDS of windowed zeta-zero ordinates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that the leading ordinates are zeros of zeta(1/2 + it).
    Validate(ValidateArgs),
    /// Window, measure and embed; writes coordinates, spectrum, stress and a locus plot.
    Embed(RunArgs),
    /// Fit a sinusoid to each embedding component and the laws across components.
    Analyze(AnalyzeArgs),
    /// Run `embed` once per metric and draw the loci side by side.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    Arccosine,
    Jaccard,
    Chebyshev,
    Euclidean,
    Canberra,
    Lorentzian,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Arccosine => Metric::Arccosine,
            MetricArg::Jaccard => Metric::Jaccard,
            MetricArg::Chebyshev => Metric::Chebyshev,
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Canberra => Metric::Canberra,
            MetricArg::Lorentzian => Metric::Lorentzian,
        }
    }
}

impl From<Metric> for MetricArg {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Arccosine => MetricArg::Arccosine,
            Metric::Jaccard => MetricArg::Jaccard,
            Metric::Chebyshev => MetricArg::Chebyshev,
            Metric::Euclidean => MetricArg::Euclidean,
            Metric::Canberra => MetricArg::Canberra,
            Metric::Lorentzian => MetricArg::Lorentzian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproachArg {
    A1,
    A2,
}

impl From<ApproachArg> for Approach {
    fn from(a: ApproachArg) -> Self {
        match a {
            ApproachArg::A1 => Approach::Disjoint,
            ApproachArg::A2 => Approach::Sliding,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Zero-ordinate file, one decimal per line.
    #[arg(long, default_value = DEFAULT_ZEROS)]
    pub zeros: PathBuf,
    /// Use only the first COUNT ordinates of the file.
    #[arg(long, value_name = "COUNT", default_value_t = 10_000)]
    pub num_zeros: usize,
    #[arg(long, value_enum, default_value_t = MetricArg::Lorentzian)]
    pub metric: MetricArg,
    /// Window length.
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    /// a1: disjoint windows; a2: sliding windows.
    #[arg(long, value_enum, default_value_t = ApproachArg::A1)]
    pub approach: ApproachArg,
    /// Embedding dimension.
    #[arg(long, default_value_t = 3)]
    pub dims: usize,
    /// Cap on the number of windows.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Components to fit in `analyze`.
    #[arg(long, default_value_t = 10)]
    pub components: usize,
    /// Output directory.
    #[arg(long, env = "ZETA_MDS_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Use the raw Tanimoto coefficient instead of 1 - T for jaccard.
    #[arg(long)]
    pub jaccard_literal: bool,
    /// Use max_k(|a_k| - b_k) instead of max_k |a_k - b_k| for chebyshev.
    #[arg(long)]
    pub chebyshev_literal: bool,
    /// Seed for the sampled metric-axiom report.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Locus view azimuth in degrees.
    #[arg(long, default_value_t = 45.0, allow_negative_numbers = true)]
    pub azimuth: f64,
    /// Locus view elevation in degrees.
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub elevation: f64,
    /// Also write the upper-triangle distance matrix (large).
    #[arg(long)]
    pub write_distances: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// How many leading ordinates to check.
    #[arg(long, default_value_t = 25)]
    pub count: usize,
    /// Largest |zeta(1/2 + it)| accepted as a zero.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Fit this embedding CSV (`i,c1,...,cn`) instead of embedding the zeros.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// r2 at or above which a component is annotated as periodic.
    #[arg(long, default_value_t = zeta_mds_core::pattern::PERIODIC_R2)]
    pub periodic_r2: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Metrics to sweep.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [
        MetricArg::Arccosine, MetricArg::Jaccard, MetricArg::Chebyshev,
        MetricArg::Euclidean, MetricArg::Canberra, MetricArg::Lorentzian,
    ])]
    pub metrics: Vec<MetricArg>,
}

/// Fully resolved run parameters, recorded verbatim in every manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub zeros_path: PathBuf,
    pub num_zeros: usize,
    pub metric: MetricArg,
    pub m: usize,
    pub approach: ApproachArg,
    pub dims: usize,
    pub limit: Option<usize>,
    pub components: usize,
    pub out_dir: PathBuf,
    pub jaccard_literal: bool,
    pub chebyshev_literal: bool,
    pub seed: u64,
    pub azimuth: f64,
    pub elevation: f64,
    pub write_distances: bool,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> anyhow::Result<Self> {
        let cfg = RunConfig {
            zeros_path: args.zeros.clone(),
            num_zeros: args.num_zeros,
            metric: args.metric,
            m: args.m,
            approach: args.approach,
            dims: args.dims,
            limit: args.limit,
            components: args.components,
            out_dir: args.out.clone(),
            jaccard_literal: args.jaccard_literal,
            chebyshev_literal: args.chebyshev_literal,
            seed: args.seed,
            azimuth: args.azimuth,
            elevation: args.elevation,
            write_distances: args.write_distances,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.m >= 1, "--m must be at least 1");
        anyhow::ensure!(self.dims >= 1, "--dims must be at least 1");
        anyhow::ensure!(self.num_zeros >= 1, "--num-zeros must be at least 1");
        Ok(())
    }

    /// `analyze` needs at least `components` dimensions; raise `dims` to match
    /// so that `components <= dims` holds for every analysis run.
    pub fn for_analysis(mut self) -> Self {
        self.dims = self.dims.max(self.components);
        self
    }

    pub fn measure(&self) -> Measure {
        let metric = Metric::from(self.metric);
        let printed = match metric {
            Metric::Jaccard => self.jaccard_literal,
            Metric::Chebyshev => self.chebyshev_literal,
            _ => false,
        };
        Measure {
            metric,
            variant: if printed {
                Variant::AsPrinted
            } else {
                Variant::Standard
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults_follow_reference_configuration() {
        let cli = Cli::try_parse_from(["zeta-mds", "embed"]).unwrap();
        let Command::Embed(args) = cli.command else {
            panic!("expected embed");
        };
        let cfg = RunConfig::from_args(&args).unwrap();
        assert_eq!(cfg.metric, MetricArg::Lorentzian);
        assert_eq!((cfg.m, cfg.dims, cfg.components), (10, 3, 10));
        assert_eq!(cfg.approach, ApproachArg::A1);
        assert_eq!(cfg.num_zeros, 10_000);
        assert_eq!(cfg.limit, None);
        assert_eq!(cfg.clone().for_analysis().dims, 10);
    }

    #[test]
    fn literal_flags_select_printed_variant() {
        let cli = Cli::try_parse_from([
            "zeta-mds",
            "embed",
            "--metric",
            "jaccard",
            "--jaccard-literal",
            "--dims",
            "2",
            "--components",
            "2",
        ])
        .unwrap();
        let Command::Embed(args) = cli.command else {
            panic!("expected embed");
        };
        let cfg = RunConfig::from_args(&args).unwrap();
        assert!(cfg.measure().is_printed_form());
    }

    #[test]
    fn sweep_metric_list() {
        let cli = Cli::try_parse_from(["zeta-mds", "sweep", "--metrics", "euclidean,lorentzian"]).unwrap();
        let Command::Sweep(args) = cli.command else {
            panic!("expected sweep");
        };
        assert_eq!(args.metrics, vec![MetricArg::Euclidean, MetricArg::Lorentzian]);
        let all = Cli::try_parse_from(["zeta-mds", "sweep"]).unwrap();
        let Command::Sweep(args) = all.command else {
            panic!("expected sweep");
        };
        assert_eq!(args.metrics.len(), 6);
    }

    #[test]
    fn analysis_raises_dims_to_components() {
        let cli = Cli::try_parse_from(["zeta-mds", "analyze", "--dims", "2", "--components", "3"]).unwrap();
        let Command::Analyze(args) = cli.command else {
            panic!("expected analyze");
        };
        let cfg = RunConfig::from_args(&args.run).unwrap().for_analysis();
        assert_eq!(cfg.dims, 3);
        let cli = Cli::try_parse_from(["zeta-mds", "embed", "--m", "0"]).unwrap();
        let Command::Embed(args) = cli.command else {
            panic!("expected embed");
        };
        assert!(RunConfig::from_args(&args).is_err());
    }
}
