use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use ripr::cli::{parse_dense, report_diff, run, ExperimentSpec, MatrixSource, Report};
use ripr::colourings::Colouring;
use ripr::digits::GapDescriptor;
use ripr::ratcore::{FiniteMatrix, Rat};
use ripr::search::{SearchConfig, DEFAULT_BUDGET};
use ripr::seqs::CompressedSeq;
use ripr::{Error, Result};

#[derive(Parser)]
#[command(name = "ripr", version, about = "Image partition regularity workbench")]
struct Cli {
    /// Node budget for searches.
    #[arg(long, global = true, env = "RIPR_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads for searches (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write wall-clock timing to this sidecar file.
    #[arg(long, global = true)]
    timing: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Pretty,
    Csv,
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
}

#[derive(Args)]
struct Bounds {
    /// Largest value tried for each variable.
    #[arg(long)]
    bound: u64,
    #[arg(long, default_value_t = 1)]
    min_entry: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print a finite truncation of a matrix family as JSON.
    Gen {
        /// Family, e.g. `f`, `schur`, `mt:2,1`, `mpc:2,2,1`, `rowsum:1/2:3`.
        family: String,
        #[command(flatten)]
        shape: Shape,
        /// Emit a full report instead of the bare matrix.
        #[arg(long)]
        report: bool,
    },
    /// Compute the image A·x.
    Image {
        /// Family name, `dense:1,0;0,1` or a path to a matrix JSON file.
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Vec<Rat>,
    },
    /// Base p (or base −p) digits and the derived statistics.
    Digits {
        #[arg(long, allow_negative_numbers = true)]
        base: i64,
        /// Gap descriptor `v,u0,u1,u2,u3` for ψ.
        #[arg(long)]
        gap: Option<GapDescriptor>,
        #[arg(required = true, allow_negative_numbers = true)]
        numbers: Vec<BigInt>,
    },
    /// Colours of numbers under a named colouring.
    Colour {
        #[command(flatten)]
        colouring: ColouringArgs,
        #[arg(required = true)]
        numbers: Vec<BigInt>,
    },
    /// Least monochromatic image of a matrix under a colouring.
    Search {
        #[arg(long, alias = "family")]
        matrix: String,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        colouring: ColouringArgs,
        #[command(flatten)]
        bounds: Bounds,
        /// Require pairwise distinct variable values.
        #[arg(long)]
        distinct: bool,
        /// Require pairwise distinct image values.
        #[arg(long)]
        distinct_image: bool,
    },
    /// Least N forcing a monochromatic image for every colouring of [1, N].
    Force {
        #[arg(long, alias = "matrix")]
        family: String,
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        colours: u32,
        #[arg(long)]
        nmax: u64,
    },
    /// Look for x, y with FS-type image of a and MT image of b jointly monochromatic.
    Separate {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        b: Vec<i64>,
        #[command(flatten)]
        colouring: ColouringArgs,
        #[arg(long)]
        prefix: usize,
        #[command(flatten)]
        bounds: Bounds,
        /// Allow repeated entries inside x and inside y.
        #[arg(long)]
        allow_repeats: bool,
    },
    /// Look for y with B·y inside the image of A at x.
    Dominate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Vec<Rat>,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        distinct: bool,
    },
    /// Check a linear witness C with A·C = B and B first entries.
    Certify {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
    },
    /// Check (or build) a sequence with the rapid growth condition.
    Rapid {
        #[arg(long)]
        p: u32,
        /// Replace the terms by the least multiples that make the sequence rapid.
        #[arg(long)]
        make: bool,
        #[arg(required = true)]
        x: Vec<BigInt>,
    },
    /// Least b and x with FS(x) and b + MT(a, x) jointly monochromatic.
    TranslateSearch {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Vec<i64>,
        #[command(flatten)]
        colouring: ColouringArgs,
        #[arg(long)]
        prefix: usize,
        #[arg(long)]
        b_bound: u64,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long)]
        allow_repeats: bool,
    },
    /// Field-level differences between two reports.
    Diff { left: PathBuf, right: PathBuf },
    /// Re-run the experiment recorded in a report or experiment file.
    Replay { file: PathBuf },
}

#[derive(Args)]
struct ColouringArgs {
    /// Compact form such as `mod:2`, `prime-exp:2:3`, `alpha:3/2`,
    /// `extending-f:5`, `notrapid:7:1,2` or `table:0,1,1`.
    #[arg(long, conflicts_with = "kind")]
    colouring: Option<Colouring>,
    #[arg(long, value_parser = ["mod", "prime-exp", "alpha", "extending-f", "notrapid", "table"])]
    kind: Option<String>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    coeffs: Vec<i64>,
    #[arg(long = "b-exp")]
    b_exp: Option<u64>,
    #[arg(long = "c-exp")]
    c_exp: Option<u64>,
    #[arg(long)]
    alpha: Option<Rat>,
    #[arg(long, value_delimiter = ',')]
    table: Vec<u64>,
}

fn missing(what: &str) -> Error {
    Error::InvalidParameter(format!("missing --{what}"))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ColouringArgs {
    fn resolve(&self) -> Result<Colouring> {
        if let Some(c) = &self.colouring {
            return Ok(c.clone());
        }
        let kind = self.kind.as_deref().ok_or_else(|| missing("colouring or --kind"))?;
        let text = match kind {
            "mod" => format!("mod:{}", self.m.ok_or_else(|| missing("m"))?),
            "prime-exp" => format!(
                "prime-exp:{}:{}",
                self.b_exp.ok_or_else(|| missing("b-exp"))?,
                self.c_exp.ok_or_else(|| missing("c-exp"))?
            ),
            "alpha" => format!("alpha:{}", self.alpha.as_ref().ok_or_else(|| missing("alpha"))?),
            "extending-f" => format!("extending-f:{}", self.p.ok_or_else(|| missing("p"))?),
            "notrapid" => format!("notrapid:{}:{}", self.p.ok_or_else(|| missing("p"))?, join(&self.coeffs)),
            _ => format!("table:{}", join(&self.table)),
        };
        text.parse()
    }
}

fn matrix_source(arg: &str, shape: &Shape) -> Result<MatrixSource> {
    if let Some(rows) = arg.strip_prefix("dense:") {
        return Ok(MatrixSource::Explicit(parse_dense(rows)?));
    }
    let path = Path::new(arg);
    if arg.ends_with(".json") || path.is_file() {
        let m: FiniteMatrix = serde_json::from_str(&fs::read_to_string(path)?)?;
        return Ok(MatrixSource::Explicit(m));
    }
    Ok(MatrixSource::Family { family: arg.parse()?, width: shape.width, rows: shape.rows })
}

fn config(bounds: &Bounds, distinct: bool, budget: u64) -> SearchConfig {
    SearchConfig::new(bounds.bound).distinct(distinct).min_entry(bounds.min_entry).budget(budget)
}

fn spec_of(cmd: &Command, budget: u64) -> Result<ExperimentSpec> {
    let no_shape = Shape { width: None, rows: None };
    Ok(match cmd {
        Command::Gen { family, shape, .. } => ExperimentSpec::Gen { matrix: matrix_source(family, shape)? },
        Command::Image { matrix, shape, x } => {
            ExperimentSpec::Image { matrix: matrix_source(matrix, shape)?, x: x.clone() }
        }
        Command::Digits { base, gap, numbers } => {
            ExperimentSpec::Digits { base: *base, numbers: numbers.clone(), gap: *gap }
        }
        Command::Colour { colouring, numbers } => {
            ExperimentSpec::Colour { colouring: colouring.resolve()?, numbers: numbers.clone() }
        }
        Command::Search { matrix, shape, colouring, bounds, distinct, distinct_image } => {
            let mut config = config(bounds, *distinct, budget);
            config.distinct_image = *distinct_image;
            ExperimentSpec::Search { matrix: matrix_source(matrix, shape)?, colouring: colouring.resolve()?, config }
        }
        Command::Force { family, shape, colours, nmax } => ExperimentSpec::Force {
            matrix: matrix_source(family, shape)?,
            colours: *colours,
            n_max: *nmax,
            node_budget: budget,
        },
        Command::Separate { a, b, colouring, prefix, bounds, allow_repeats } => ExperimentSpec::Separate {
            colouring: colouring.resolve()?,
            a: CompressedSeq::new(a.clone())?,
            b: CompressedSeq::new(b.clone())?,
            prefix_len: *prefix,
            config: config(bounds, !allow_repeats, budget),
        },
        Command::Dominate { a, b, shape, x, bounds, distinct } => ExperimentSpec::Dominate {
            a: matrix_source(a, shape)?,
            b: matrix_source(b, &no_shape)?,
            x: x.clone(),
            config: config(bounds, *distinct, budget),
        },
        Command::Certify { a, b, c } => ExperimentSpec::Certify {
            a: matrix_source(a, &no_shape)?,
            b: matrix_source(b, &no_shape)?,
            c: matrix_source(c, &no_shape)?,
        },
        Command::Rapid { p, make, x } => ExperimentSpec::Rapid { p: *p, x: x.clone(), make: *make },
        Command::TranslateSearch { a, colouring, prefix, b_bound, bounds, allow_repeats } => {
            ExperimentSpec::TranslateSearch {
                colouring: colouring.resolve()?,
                a: CompressedSeq::new(a.clone())?,
                prefix_len: *prefix,
                b_bound: *b_bound,
                config: config(bounds, !allow_repeats, budget),
            }
        }
        Command::Diff { .. } | Command::Replay { .. } => unreachable!("handled separately"),
    })
}

fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(report.to_canonical_string()),
        Format::Pretty => Ok(report.to_pretty_string()),
        Format::Csv => report.to_csv(),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let started = Instant::now();
    let report = match &cli.command {
        Command::Diff { left, right } => {
            let l = Report::parse(&fs::read_to_string(left)?)?;
            let r = Report::parse(&fs::read_to_string(right)?)?;
            let entries = report_diff(&l, &r)?;
            let mut text = serde_json::to_string(&entries)?;
            text.push('\n');
            emit(&text, cli.out.as_deref())?;
            return Ok(entries.is_empty());
        }
        Command::Replay { file } => run(&ExperimentSpec::from_json(&fs::read_to_string(file)?)?, cli.threads)?,
        Command::Gen { report: false, .. } => {
            let spec = spec_of(&cli.command, cli.budget)?;
            let ExperimentSpec::Gen { matrix } = &spec else { unreachable!() };
            let mut text = serde_json::to_string(&matrix.resolve()?)?;
            text.push('\n');
            emit(&text, cli.out.as_deref())?;
            return Ok(true);
        }
        cmd => run(&spec_of(cmd, cli.budget)?, cli.threads)?,
    };
    emit(&render(&report, cli.format)?, cli.out.as_deref())?;
    if let Some(path) = &cli.timing {
        let sidecar = serde_json::json!({ "wallClockMs": started.elapsed().as_secs_f64() * 1000.0 });
        fs::write(path, format!("{sidecar}\n"))?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        // only `diff` returns false: the reports differ
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
