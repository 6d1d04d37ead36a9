use clap::{Args, Parser, Subcommand, ValueEnum};
use combx_core::{Family, Permutation};
use combx_sequences::{Format, MethodChoice, Span};

#[derive(Debug, Parser)]
#[command(
    name = "combx",
    version,
    about = "Exact counts of pattern-avoiding linear extensions of comb posets"
)]
pub struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count avoiding extensions of one comb.
    Count(CountArgs),
    /// List avoiding extensions of one comb, one per line.
    Enumerate(EnumerateArgs),
    /// Count along one parameter.
    Table(TableArgs),
    /// Compare every engine on every small point and every published cell.
    Verify(VerifyArgs),
    /// Level profiles of the 312 generating tree for beta combs.
    Gentree(GentreeArgs),
    /// Count lattice paths below the line y = x / t.
    Paths(PathsArgs),
    /// Coefficients of the generating function for 231 on alpha combs with t = 2.
    Gf231(Gf231Args),
    /// Look a computed sequence up in the OEIS.
    Oeis(OeisArgs),
    /// List the formula registry.
    Registry(RegistryArgs),
}

#[derive(Debug, Args)]
pub struct CombArgs {
    #[arg(long)]
    pub family: Family,
    /// Number of teeth.
    #[arg(long)]
    pub s: Option<u32>,
    /// Tooth length.
    #[arg(long)]
    pub t: Option<u32>,
    /// Total size for an uneven comb (alpha takes --s, beta takes --t).
    #[arg(long)]
    pub n: Option<u32>,
    /// Pattern to avoid, e.g. 312. Repeatable.
    #[arg(long = "avoid", value_name = "P")]
    pub avoid: Vec<Permutation>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub comb: CombArgs,
    #[arg(long, default_value = "auto")]
    pub method: MethodChoice,
    /// Largest comb brute force may enumerate.
    #[arg(long, default_value_t = combx_core::engine::DEFAULT_BRUTE_LIMIT)]
    pub brute_limit: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub comb: CombArgs,
    /// Stop after this many permutations.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    S,
    T,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[arg(long)]
    pub family: Family,
    #[arg(long = "avoid", value_name = "P")]
    pub avoid: Vec<Permutation>,
    #[arg(long, value_enum)]
    pub vary: Vary,
    /// Value of the parameter that does not vary.
    #[arg(long)]
    pub fixed: u32,
    /// Inclusive range A..B of the varying parameter.
    #[arg(long)]
    pub range: Span,
    #[arg(long, default_value = "auto")]
    pub method: MethodChoice,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub seq: SequenceArgs,
    #[arg(long, default_value = "text", value_parser = parse_format)]
    pub format: Format,
    /// Neither read nor write the result cache.
    #[arg(long)]
    pub no_cache: bool,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
        .map_err(|e| format!("{e}; expected text, csv or json"))
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(4..))]
    pub max_n: u32,
    /// Print every check, not only failures and findings.
    #[arg(long)]
    pub verbose: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GentreeArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: u32,
    #[arg(long)]
    pub levels: usize,
    /// Use the lattice-path tree instead of the succession rule.
    #[arg(long)]
    pub lattice: bool,
    /// Compare both trees level by level.
    #[arg(long)]
    pub compare: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PathsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: u32,
    #[arg(long)]
    pub s: u32,
}

#[derive(Debug, Args)]
pub struct Gf231Args {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub terms: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct OeisArgs {
    #[command(flatten)]
    pub seq: SequenceArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RegistryArgs {
    #[arg(long)]
    pub json: bool,
}
