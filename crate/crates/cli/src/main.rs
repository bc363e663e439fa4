//! `unimod`: command-line front end for the `unimod` library.
//!
//! Exit status is 0 on success, 1 on domain errors and 2 on usage errors.
//! Errors are written to stderr as `{"error": {"kind", "message"}}`.

mod load;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use unimod::lattice::DEFAULT_RANK_CAP;
use unimod::neighbor;
use unimod::qseries::{self, QSeries};
use unimod::rational::{self, Q};
use unimod::thetafit::{self, LatticeConstraint, ShadowConstraint};
use unimod::z8code::{self, DEFAULT_SIZE_CAP};

#[derive(Debug)]
pub enum CliError {
    Usage { kind: &'static str, message: String },
    Domain(unimod::Error),
}

impl CliError {
    pub fn missing(message: String) -> Self {
        CliError::Usage {
            kind: "missing_input",
            message,
        }
    }

    pub fn malformed(message: String) -> Self {
        CliError::Usage {
            kind: "malformed_input",
            message,
        }
    }

    fn kind(&self) -> &str {
        match self {
            CliError::Usage { kind, .. } => kind,
            CliError::Domain(e) => e.kind(),
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage { message, .. } => message.clone(),
            CliError::Domain(e) => e.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<unimod::Error> for CliError {
    fn from(e: unimod::Error) -> Self {
        CliError::Domain(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "unimod", version, about = "Exact computations on unimodular lattices, shadows and codes over Z/8")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest rank for which enumeration runs.
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_CAP)]
    rank_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Theta generators as truncated q-series.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Theta decompositions, shadow conditions, minimum-norm bounds.
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Gram-matrix lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Codes over Z/8.
    #[command(subcommand)]
    Code(CodeCmd),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeriesName {
    Theta2,
    Theta3,
    Theta4,
    Delta8,
}

#[derive(Subcommand, Debug)]
enum SeriesCmd {
    /// Expands a generator up to (excluding) q^P.
    Expand {
        #[arg(value_enum)]
        name: SeriesName,
        /// Precision in q-units, a multiple of 1/4.
        #[arg(long, value_parser = parse_rational)]
        precision: Q,
    },
}

#[derive(Subcommand, Debug)]
enum ThetaCmd {
    /// Solves for the decomposition coefficients under shadow constraints.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        min: usize,
        /// Shadow coefficient constraint `r=v` (coefficient of q^r is v).
        #[arg(long = "shadow", value_parser = parse_constraint)]
        shadow: Vec<(Q, Q)>,
        /// Lattice coefficient constraint `r=v`.
        #[arg(long = "theta", value_parser = parse_constraint)]
        theta: Vec<(Q, Q)>,
        /// Working precision in q-units.
        #[arg(long, value_parser = parse_rational)]
        precision: Option<Q>,
    },
    /// Checks a shadow series against the shadow conditions.
    Check {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        min: usize,
        #[arg(long)]
        shadow_file: PathBuf,
    },
    /// Minimum-norm bound for unimodular lattices of dimension n.
    Bound {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand, Debug)]
enum LatticeCmd {
    /// Rank, determinant, parity, minimum and optionally the theta series.
    Analyze {
        file: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        theta_up_to: Option<Q>,
    },
    /// Even sublattice, shadow coset and shadow minimum of an odd unimodular lattice.
    Shadow {
        file: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        theta_up_to: Option<Q>,
    },
    /// Odd 2-neighbor of an even unimodular lattice along a norm-8 vector.
    Neighbor {
        file: PathBuf,
        /// Coordinates of x, comma separated.
        #[arg(long, value_parser = parse_coords)]
        x: Option<Coords>,
    },
    /// First frame of norm k found by backtracking.
    Frame {
        file: PathBuf,
        #[arg(long)]
        k: u64,
    },
}

#[derive(Subcommand, Debug)]
enum CodeCmd {
    /// Size, self-duality, minimum Euclidean weight and Construction A.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        size_cap: u64,
    },
    /// Construction A lattice.
    Lattice {
        file: PathBuf,
        /// Gram of the integer preimage, without the factor 1/8.
        #[arg(long)]
        unscaled: bool,
    },
    /// The code of an 8-frame of a unimodular lattice.
    FromFrame {
        lattice_file: PathBuf,
        #[arg(long)]
        frame_file: PathBuf,
    },
}

fn parse_rational(s: &str) -> Result<Q, String> {
    rational::parse(s.trim()).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn parse_constraint(s: &str) -> Result<(Q, Q), String> {
    let (r, v) = s.split_once('=').ok_or_else(|| format!("expected r=v, got {s:?}"))?;
    Ok((parse_rational(r)?, parse_rational(v)?))
}

#[derive(Clone, Debug)]
struct Coords(Vec<i64>);

fn parse_coords(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Coords)
}

fn grid_index(x: &Q, what: &str) -> Result<i64, CliError> {
    qseries::to_index(x)
        .filter(|&i| i >= 0)
        .ok_or_else(|| CliError::malformed(format!("{what} {} is not a nonnegative multiple of 1/4", rational::format(x))))
}

fn run(cli: Cli) -> Result<Value, CliError> {
    let cap = cli.rank_cap;
    let load_lattice = |p: &PathBuf| load::lattice(p).map(|l| l.with_rank_cap(cap));
    match cli.command {
        Command::Series(SeriesCmd::Expand { name, precision }) => {
            let p = grid_index(&precision, "precision")?;
            let s = match name {
                SeriesName::Theta2 => qseries::theta2(p),
                SeriesName::Theta3 => qseries::theta3(p),
                SeriesName::Theta4 => qseries::theta4(p),
                SeriesName::Delta8 => qseries::delta8(p),
            };
            Ok(s.to_json())
        }
        Command::Theta(ThetaCmd::Solve {
            n,
            min,
            shadow,
            theta,
            precision,
        }) => {
            let shadow: Vec<ShadowConstraint> = shadow.into_iter().map(|(r, value)| ShadowConstraint { r, value }).collect();
            let theta: Vec<LatticeConstraint> = theta.into_iter().map(|(r, value)| LatticeConstraint { r, value }).collect();
            let precision = precision.map(|p| grid_index(&p, "precision")).transpose()?;
            Ok(thetafit::solve(n, min, &shadow, &theta, precision)?.to_json())
        }
        Command::Theta(ThetaCmd::Check { n, min, shadow_file }) => {
            let s = load::series(&shadow_file)?;
            let v = thetafit::check_shadow_conditions(n, min, &s)?;
            Ok(json!({
                "n": n,
                "min_norm": min,
                "satisfied": v.is_empty(),
                "violations": v.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
            }))
        }
        Command::Theta(ThetaCmd::Bound { n }) => {
            let b = thetafit::minimum_norm_bound(n);
            Ok(json!({
                "n": n,
                "bound": b.bound,
                "bound_forces_even": b.bound_forces_even,
                "optimal_odd": b.optimal_odd,
            }))
        }
        Command::Lattice(LatticeCmd::Analyze { file, theta_up_to }) => {
            let l = load_lattice(&file)?;
            let within = l.rank() <= l.rank_cap();
            let mut out = json!({
                "lattice": l.to_json(),
                "rank": l.rank(),
                "determinant": rational::to_json(&l.determinant()),
                "integral": l.is_integral(),
                "unimodular": l.is_unimodular(),
                "even": l.is_even().ok(),
                "min_norm": if within { rational::to_json(&l.min_norm()?) } else { json!("skipped") },
            });
            if let Some(t) = theta_up_to {
                out["theta"] = l.theta_by_enumeration(&t)?.to_json();
            }
            Ok(out)
        }
        Command::Lattice(LatticeCmd::Shadow { file, theta_up_to }) => {
            let l = load_lattice(&file)?;
            let s = l.shadow_coset()?;
            let within = l.rank() <= l.rank_cap();
            let mut out = json!({
                "lattice": l.to_json(),
                "shadow": s.to_json(),
                "characteristic": s.is_characteristic(),
                "shadow_min": if within { rational::to_json(&l.shadow_min()?) } else { json!("skipped") },
            });
            if let Some(t) = theta_up_to {
                out["shadow_theta"] = l.shadow_theta(&t)?.to_json();
            }
            Ok(out)
        }
        Command::Lattice(LatticeCmd::Neighbor { file, x }) => {
            let l = load_lattice(&file)?;
            Ok(neighbor::optimal_odd_pipeline(&l, x.map(|c| c.0))?.to_json())
        }
        Command::Lattice(LatticeCmd::Frame { file, k }) => {
            let l = load_lattice(&file)?;
            let f = l.find_frame(k)?;
            Ok(json!({ "k": k, "frame": f.map(|f| f.to_json()) }))
        }
        Command::Code(CodeCmd::Check { file, size_cap }) => {
            let c = load::code(&file)?;
            let mut out = c.to_json();
            if let (Value::Object(o), Value::Object(r)) = (&mut out, c.report(size_cap)) {
                o.extend(r.into_iter().filter(|(k, _)| k != "length"));
            }
            Ok(out)
        }
        Command::Code(CodeCmd::Lattice { file, unscaled }) => {
            let c = load::code(&file)?;
            let l = c.construction_a(!unscaled)?;
            let mut out = l.to_json();
            out["determinant"] = rational::to_json(&l.determinant());
            out["unimodular"] = json!(l.is_unimodular());
            out["self_dual"] = json!(c.is_self_dual().ok());
            Ok(out)
        }
        Command::Code(CodeCmd::FromFrame {
            lattice_file,
            frame_file,
        }) => {
            let l = load_lattice(&lattice_file)?;
            let f = load::frame(&frame_file)?;
            let c = z8code::code_from_frame(&l, &f)?;
            let mut out = c.to_json();
            out["size"] = json!(c.size().to_string());
            out["self_dual"] = json!(c.is_self_dual().ok());
            Ok(out)
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn is_series(v: &Value) -> Option<QSeries> {
    if v.get("terms").is_some() && v.get("precision").is_some() {
        QSeries::from_json(v).ok()
    } else {
        None
    }
}

/// Indented `key: value` rendering; series print in `q` notation.
fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if let Some(s) = is_series(x) {
                    out.push_str(&format!("{pad}{k}: {s}\n"));
                } else if x.is_object() || x.as_array().is_some_and(|a| a.iter().any(|e| e.is_object())) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", inline(x)));
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if x.is_object() {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", inline(x)));
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other))),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => scalar_text(other),
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Text => {
            if let Some(s) = is_series(v) {
                return format!("{s}\n");
            }
            let mut out = String::new();
            render_text(v, 0, &mut out);
            out
        }
    }
}

fn usage_kind(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::MissingRequiredArgument | ErrorKind::MissingSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            "missing_input"
        }
        ErrorKind::InvalidValue | ErrorKind::ValueValidation | ErrorKind::WrongNumberOfValues | ErrorKind::InvalidUtf8 => {
            "malformed_input"
        }
        _ => "usage",
    }
}

fn fail(err: &CliError, format: Format) -> ExitCode {
    match format {
        Format::Json => {
            let doc = json!({"error": {"kind": err.kind(), "message": err.message()}});
            eprintln!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Text => eprintln!("error ({}): {}", err.kind(), err.message()),
    }
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text_mode = std::env::args().any(|a| a == "text" || a == "--output=text");
            let err = CliError::Usage {
                kind: usage_kind(e.kind()),
                message: e.render().to_string().trim_end().to_string(),
            };
            return fail(&err, if text_mode { Format::Text } else { Format::Json });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&CliError::malformed(format!("--threads: {e}")), cli.output);
        }
    }
    let format = cli.output;
    match run(cli) {
        Ok(v) => {
            print!("{}", render(&v, format));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, format),
    }
}
