use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args as ClapArgs, Parser, Subcommand, ValueEnum};

use wmaxsol::cli::{self, Command, GraphSpec, GroupSpec, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "wmaxsol", version, about = "Weighted maximum-solution toolkit")]
struct Args {
    #[command(subcommand)]
    command: TopCommand,

    /// Enumeration budget for exhaustive phases (assignments or witness rows).
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Largest admissible domain size.
    #[arg(long, global = true, default_value_t = cli::DEFAULT_DOMAIN_CAP)]
    domain_cap: usize,

    /// Accept Szczepara's conjecture where a classification depends on it.
    #[arg(long, global = true)]
    assume_szczepara: bool,

    /// Worker count for the exhaustive solver.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Summary lines for reading.
    Text,
    /// Flat key = value lines, byte-identical across runs.
    Structured,
}

#[derive(Subcommand)]
enum TopCommand {
    /// Approximability classification.
    #[command(subcommand)]
    Classify(ClassifyCommand),
    /// Solve an instance, dispatching to an exact solver when one applies.
    Solve {
        instance: PathBuf,
        /// Language file; defaults to the instance's `use` line.
        #[arg(long)]
        lang: Option<PathBuf>,
    },
    /// Exhaustive optimum, for checking other solvers.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        lang: Option<PathBuf>,
    },
    /// Performance ratio of a given assignment against the optimum.
    Ratio {
        instance: PathBuf,
        /// Assignment file: `<var> <value>` lines.
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        lang: Option<PathBuf>,
    },
    /// Reduction and gadget generators.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Operation-level reports.
    #[command(subcommand)]
    Algebra(AlgebraCommand),
}

#[derive(Subcommand)]
enum ClassifyCommand {
    /// Bucket of the language invariant under a maximal binary operation.
    Maximal {
        /// Operation file.
        #[arg(long)]
        op: PathBuf,
        /// Assert that the operation's clone really is maximal.
        #[arg(long)]
        assume_maximal: bool,
    },
    /// Bucket of a language containing all permutation relations.
    Homogeneous {
        #[arg(long)]
        lang: PathBuf,
    },
    /// Which exact solver, if any, covers the language.
    Tractable {
        #[arg(long)]
        lang: PathBuf,
    },
}

#[derive(ClapArgs)]
struct GraphArgs {
    #[arg(long)]
    vertices: usize,
    /// Explicit edge list, e.g. `0-1,1-2`.
    #[arg(long)]
    edges: Option<String>,
    /// Draw this many edges uniformly, deterministically in --seed.
    #[arg(long)]
    random_edges: Option<usize>,
}

impl GraphArgs {
    fn spec(&self) -> Result<GraphSpec, String> {
        match (&self.edges, self.random_edges) {
            (Some(_), Some(_)) => Err("give either --edges or --random-edges, not both".into()),
            (Some(text), None) => Ok(GraphSpec::Edges(parse_edges(text)?)),
            (None, Some(count)) => Ok(GraphSpec::Random { count }),
            (None, None) => Err("a graph needs --edges or --random-edges".into()),
        }
    }
}

#[derive(Subcommand)]
enum GenCommand {
    /// Independent-set gadget over a two-level domain.
    IndependentSet {
        #[command(flatten)]
        graph: GraphArgs,
        /// Value taken by vertices inside the independent set.
        #[arg(long)]
        low: u64,
        /// Value taken by the remaining vertices.
        #[arg(long)]
        high: u64,
        #[arg(long)]
        lang_out: Option<PathBuf>,
        #[arg(long)]
        inst_out: Option<PathBuf>,
    },
    /// Equation system whose optimum tracks the maximum p-cut of a graph.
    Maxpcut {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        prime: u64,
        /// Value map `g(0),g(1),...` over the field; identity when omitted.
        #[arg(long)]
        gmap: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constraint instance equivalent to an equation system.
    Eqn2maxsol {
        eqn: PathBuf,
        /// Target group: `cyclic:<n>` or `klein`; defaults to cyclic:p.
        #[arg(long)]
        group: Option<String>,
        /// Where each field element lands in the group, e.g. `0,2`.
        #[arg(long)]
        embedding: Option<String>,
        #[arg(long)]
        lang_out: Option<PathBuf>,
        #[arg(long)]
        inst_out: Option<PathBuf>,
    },
    /// Split a linear inequality into inequalities of at most three variables.
    SplitIneq {
        /// Coefficients, e.g. `2,-1,3`.
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        bound: i64,
        /// Size of each input variable's domain {0,...,d-1}.
        #[arg(long)]
        domain_size: u64,
    },
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Does the operation preserve every relation of the language?
    Polymorphism {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        lang: PathBuf,
    },
    /// Nest a binary operation into its n-th iterate.
    Iterate {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        times: u32,
    },
    /// Pairs (x, y) on which the operation acts as a projection.
    Fixity {
        #[arg(long)]
        op: PathBuf,
    },
    /// Functional digraph of the fixity pairs.
    GfReport {
        #[arg(long)]
        op: PathBuf,
    },
}

fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>, String> {
    text.split(',')
        .map(|part| {
            let (a, b) = part
                .split_once('-')
                .ok_or_else(|| format!("edge `{part}` is not of the form u-v"))?;
            let a = a.trim().parse().map_err(|_| format!("bad vertex `{a}`"))?;
            let b = b.trim().parse().map_err(|_| format!("bad vertex `{b}`"))?;
            Ok((a, b))
        })
        .collect()
}

fn parse_u64_list(text: &str) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad number `{t}`")))
        .collect()
}

fn parse_i64_list(text: &str) -> Result<Vec<i64>, String> {
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad number `{t}`")))
        .collect()
}

fn parse_group(text: &str) -> Result<GroupSpec, String> {
    if text == "klein" {
        return Ok(GroupSpec::Klein);
    }
    if let Some(n) = text.strip_prefix("cyclic:") {
        let n = n.parse().map_err(|_| format!("bad group order `{n}`"))?;
        return Ok(GroupSpec::Cyclic(n));
    }
    Err(format!("unknown group `{text}`; expected `cyclic:<n>` or `klein`"))
}

fn build_command(top: TopCommand) -> Result<Command, String> {
    Ok(match top {
        TopCommand::Classify(ClassifyCommand::Maximal { op, assume_maximal }) => {
            Command::ClassifyMaximal { op, assume_maximal }
        }
        TopCommand::Classify(ClassifyCommand::Homogeneous { lang }) => {
            Command::ClassifyHomogeneous { lang }
        }
        TopCommand::Classify(ClassifyCommand::Tractable { lang }) => {
            Command::ClassifyTractable { lang }
        }
        TopCommand::Solve { instance, lang } => Command::Solve { instance, lang },
        TopCommand::Oracle { instance, lang } => Command::Oracle { instance, lang },
        TopCommand::Ratio {
            instance,
            assignment,
            lang,
        } => Command::Ratio {
            instance,
            assignment,
            lang,
        },
        TopCommand::Gen(GenCommand::IndependentSet {
            graph,
            low,
            high,
            lang_out,
            inst_out,
        }) => Command::GenIndependentSet {
            vertices: graph.vertices,
            graph: graph.spec()?,
            low,
            high,
            lang_out,
            inst_out,
        },
        TopCommand::Gen(GenCommand::Maxpcut {
            graph,
            prime,
            gmap,
            out,
        }) => Command::GenMaxpcut {
            vertices: graph.vertices,
            graph: graph.spec()?,
            prime,
            gmap: gmap.as_deref().map(parse_u64_list).transpose()?,
            out,
        },
        TopCommand::Gen(GenCommand::Eqn2maxsol {
            eqn,
            group,
            embedding,
            lang_out,
            inst_out,
        }) => Command::GenEqnToMaxsol {
            eqn,
            group: group.as_deref().map(parse_group).transpose()?,
            embedding: embedding.as_deref().map(parse_u64_list).transpose()?,
            lang_out,
            inst_out,
        },
        TopCommand::Gen(GenCommand::SplitIneq {
            coeffs,
            bound,
            domain_size,
        }) => Command::GenSplitIneq {
            coeffs: parse_i64_list(&coeffs)?,
            bound,
            domain_size,
        },
        TopCommand::Algebra(AlgebraCommand::Polymorphism { op, lang }) => {
            Command::AlgebraPolymorphism { op, lang }
        }
        TopCommand::Algebra(AlgebraCommand::Iterate { op, times }) => {
            Command::AlgebraIterate { op, times }
        }
        TopCommand::Algebra(AlgebraCommand::Fixity { op }) => Command::AlgebraFixity { op },
        TopCommand::Algebra(AlgebraCommand::GfReport { op }) => Command::AlgebraGfReport { op },
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        budget: args.budget,
        domain_cap: args.domain_cap,
        assume_szczepara: args.assume_szczepara,
        jobs: args.jobs,
        format: match args.format {
            Format::Text => OutputFormat::Text,
            Format::Structured => OutputFormat::Structured,
        },
        seed: args.seed,
        command: match build_command(args.command) {
            Ok(c) => c,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        },
    };
    match cli::run(&config) {
        Ok(report) => {
            print!("{}", report.output);
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
