use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "resil", version, about = "Graph resilience certificates and Markov-structured density estimation")]
pub struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Directory for artifacts and the run manifest.
    #[arg(long, global = true, default_value = "resil-out")]
    #[serde(skip)]
    pub out: PathBuf,

    /// Format of tabular artifacts.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Generate or describe graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Exact resilience, certified estimates and constructive bounds.
    #[command(subcommand)]
    Resilience(ResilienceCmd),
    /// Cover sizes and explicit covers of Markov tensor classes.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Estimate a histogram density from samples.
    Estimate(EstimateArgs),
    /// Simulation experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Randomized lemma checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Graph(GraphCmd::Gen(_)) => "graph gen",
            Command::Graph(GraphCmd::Info(_)) => "graph info",
            Command::Resilience(ResilienceCmd::Exact(_)) => "resilience exact",
            Command::Resilience(ResilienceCmd::Estimate(_)) => "resilience estimate",
            Command::Resilience(ResilienceCmd::Bound(_)) => "resilience bound",
            Command::Cover(CoverCmd::Size(_)) => "cover size",
            Command::Cover(CoverCmd::Build(_)) => "cover build",
            Command::Cover(CoverCmd::Union(_)) => "cover union",
            Command::Estimate(_) => "estimate",
            Command::Experiment(ExperimentCmd::Rate(_)) => "experiment rate",
            Command::Verify(VerifyCmd::Lemmas(_)) => "verify lemmas",
        }
    }
}

/// A graph from a JSON file or a named family.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphInput {
    /// Graph JSON: {"d": n, "edges": [[u, v], ...]} with 1-based labels.
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,

    /// Family: path, grid, kary_tree, star, complete, empty.
    #[arg(long)]
    pub family: Option<String>,

    /// Comma-separated family parameters, e.g. 3,4 for a 3 × 4 grid.
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<usize>,

    /// Replace the graph by its t-th power.
    #[arg(long)]
    pub power: Option<usize>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphCmd {
    /// Write a family graph as JSON.
    Gen(GraphInput),
    /// Structural summary, or the example-resilience table.
    Info(GraphInfoArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GraphInfoArgs {
    #[command(flatten)]
    pub input: GraphInput,

    /// Emit the example-resilience table (filtered by --family if given).
    #[arg(long)]
    pub table1: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResilienceCmd {
    Exact(ExactArgs),
    Estimate(EstimateResArgs),
    Bound(BoundArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ExactArgs {
    #[command(flatten)]
    pub input: GraphInput,

    /// Search-node budget before falling back to certified bounds.
    #[arg(long, default_value_t = resil_core::resilience::DEFAULT_EXACT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateResArgs {
    #[command(flatten)]
    pub input: GraphInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum StrategyName {
    Star,
    KaryTree,
    TreeCentroid,
    PathPower,
    GridPower,
    Meta,
    Union,
    Removal,
    Greedy,
    Separator,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    pub input: GraphInput,

    #[arg(long, value_enum)]
    pub strategy: StrategyName,

    /// Branching factor (kary_tree).
    #[arg(long)]
    pub k: Option<usize>,

    /// Root label (kary_tree).
    #[arg(long)]
    pub root: Option<usize>,

    /// Power (path_power, grid_power).
    #[arg(long)]
    pub t: Option<usize>,

    /// Recursion depth (path_power, grid_power); smallest feasible if unset.
    #[arg(long)]
    pub s: Option<u32>,

    #[arg(long)]
    pub rows: Option<usize>,

    #[arg(long)]
    pub cols: Option<usize>,

    /// Comma-separated labels removed first (removal).
    #[arg(long, value_delimiter = ',')]
    pub removed: Vec<usize>,

    /// Blocks as "1,2;3,4" (meta).
    #[arg(long)]
    pub blocks: Option<String>,

    /// Quotient graph JSON (meta).
    #[arg(long)]
    pub quotient: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverCmd {
    Size(CoverSizeArgs),
    Build(CoverBuildArgs),
    Union(CoverUnionArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CoverSizeArgs {
    #[command(flatten)]
    pub input: GraphInput,

    /// Dimension, when no graph is given.
    #[arg(long, requires = "r")]
    pub d: Option<usize>,

    /// Resilience (or disintegration length), when no graph is given.
    #[arg(long)]
    pub r: Option<usize>,

    #[arg(long)]
    pub b: usize,

    #[arg(long)]
    pub eps: f64,

    #[arg(long, default_value_t = resil_core::cover::DEFAULT_SIZE_LIMIT)]
    pub size_limit: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverBuildArgs {
    #[command(flatten)]
    pub input: GraphInput,

    #[arg(long, default_value_t = 2)]
    pub b: usize,

    #[arg(long)]
    pub eps: f64,

    #[arg(long, default_value_t = resil_core::cover::DEFAULT_SIZE_LIMIT)]
    pub size_limit: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverUnionArgs {
    #[arg(long)]
    pub d: usize,

    #[arg(long)]
    pub r: usize,

    #[arg(long, default_value_t = 2)]
    pub b: usize,

    #[arg(long)]
    pub eps: f64,

    #[arg(long, default_value_t = resil_core::cover::DEFAULT_SIZE_LIMIT)]
    pub size_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Structured,
    Factorized,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum RuleName {
    MostWins,
    Yatracos,
    BinUnions,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: GraphInput,

    /// Sample CSV, one row per point, d columns in [0, 1).
    #[arg(long)]
    pub samples: PathBuf,

    #[arg(long, value_enum, default_value_t = MethodName::Structured)]
    pub method: MethodName,

    /// Bins per axis (empirical, factorized). Structured uses the quoted b.
    #[arg(long)]
    pub b: Option<usize>,

    /// Target ℓ¹ accuracy (structured).
    #[arg(long)]
    pub eps: Option<f64>,

    /// Failure probability (structured).
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,

    /// Lipschitz constant of the density (structured).
    #[arg(long)]
    pub lipschitz: Option<f64>,

    /// Largest cover the structured method may build.
    #[arg(long, default_value_t = resil_core::cover::DEFAULT_SIZE_LIMIT)]
    pub cover_limit: usize,

    /// Selection rule (structured); chosen by cover size if unset.
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,

    /// Certificate JSON whose steps drive the factorized method.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentCmd {
    Rate(RateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    /// Experiment config, JSON or TOML (by extension).
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyCmd {
    Lemmas(LemmaArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 8)]
    pub max_d: usize,

    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}
