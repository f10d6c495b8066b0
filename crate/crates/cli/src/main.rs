use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use posflag::building::{
    cone_c1, cone_c2, flag_apartment, intersect_apartments, intersection_transport,
    ratio_valuations, shearing_translation, snake_marking, DifferenceCone, Marking, NormSplitTest,
};
use posflag::flags::{
    double_ratios, generate_positive_tuple, triple_ratios, tuple_coordinates, FlagTuple,
    GenOptions, Triangulation,
};
use posflag::verify::{run_suites, Fault, Suite, VerifyOptions};
use posflag::{Rational, ValuedScalar};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("invalid JSON input: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] posflag::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Exact Fock-Goncharov invariants of flag tuples and apartment
/// intersections in the associated Euclidean building.
#[derive(Parser)]
#[command(name = "posflag", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a positive flag tuple from random positive coordinates.
    Gen(GenArgs),
    /// Triple and double ratios of a tuple, with valuations and signs.
    Invariants(InvariantsArgs),
    /// Intersection of two apartments as a difference cone.
    Intersect(IntersectArgs),
    /// Closed-form cones of a triple, checked against direct intersections.
    Cones(ConesArgs),
    /// Translation between the markings of two adjacent triangles.
    Shear(ShearArgs),
    /// Run randomized self-checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampled valuations lie in (1/q)Z; 0 samples positive constants.
    #[arg(long, default_value_t = 6)]
    exponent_denominator: u32,
    /// Bound on the absolute value of sampled valuations.
    #[arg(long, default_value_t = 2)]
    max_valuation: u32,
    /// Lower-order terms added to each sampled coordinate.
    #[arg(long, default_value_t = 1)]
    extra_terms: usize,
    /// Positive rational constants only: every valuation is 0.
    #[arg(long)]
    constants: bool,
}

impl SampleArgs {
    fn options(&self) -> GenOptions {
        if self.constants {
            GenOptions::constants()
        } else {
            GenOptions {
                exponent_denominator: self.exponent_denominator,
                max_valuation: self.max_valuation,
                extra_terms: self.extra_terms,
            }
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Dimension of the vector space.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    d: u32,
    /// Number of flags.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
    t: u32,
    #[command(flatten)]
    sample: SampleArgs,
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InvariantsArgs {
    /// Flag tuple JSON, or - for stdin.
    input: PathBuf,
    /// Diagonals `i,k` of the triangulation; the fan at vertex 1 if omitted.
    #[arg(long = "diagonal", value_name = "I,K")]
    diagonals: Vec<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IntersectArgs {
    /// Either `{"markings": [m1, m2]}` or a flag tuple JSON.
    input: PathBuf,
    /// Flags `i,j` of the first apartment when the input is a tuple.
    #[arg(long, value_name = "I,J")]
    first: Option<String>,
    /// Flags `k,l` of the second apartment when the input is a tuple.
    #[arg(long, value_name = "K,L")]
    second: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConesArgs {
    /// Flag tuple JSON, or - for stdin.
    input: PathBuf,
    /// Flags playing `E, F, G`.
    #[arg(long, default_value = "1,2,3", value_name = "I,J,K")]
    triple: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ShearArgs {
    /// Flag tuple JSON, or - for stdin.
    input: PathBuf,
    /// Flags playing `E, F, G, H`.
    #[arg(long, default_value = "1,2,3,4", value_name = "I,J,K,L")]
    quad: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Field,
    Symmetry,
    Snakes,
    Tnn,
    Intersection,
    Main,
    Shearing,
    Monotonicity,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    /// Negate the first double ratio on diagonal (1,3) before reconstruction.
    NegateDoubleRatio,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_values_t = [SuiteArg::All])]
    suite: Vec<SuiteArg>,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    exponent_denominator: u32,
    /// Corrupt generated data to confirm the checks notice.
    #[arg(long, value_enum)]
    inject_fault: Option<FaultArg>,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

fn read_input(path: &Path) -> Result<String> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn write_json(value: &impl Serialize, output: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            }),
    }
}

/// Parses `N` comma-separated 1-based flag indices, each at most `t`.
fn parse_indices<const N: usize>(s: &str, t: usize) -> Result<[usize; N]> {
    let parsed: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("expected {N} comma-separated indices, got {s:?}")))?;
    let idx: [usize; N] = parsed
        .try_into()
        .map_err(|_| CliError::Usage(format!("expected {N} comma-separated indices, got {s:?}")))?;
    if let Some(bad) = idx.iter().find(|&&i| i == 0 || i > t) {
        return Err(CliError::Usage(format!("flag index {bad} out of range 1..={t}")));
    }
    Ok(idx)
}

fn read_tuple(path: &Path) -> Result<FlagTuple> {
    Ok(serde_json::from_str(&read_input(path)?)?)
}

fn sign(x: &ValuedScalar) -> i8 {
    x.sign() as i8
}

fn described(x: &ValuedScalar) -> Value {
    json!({ "value": x, "valuation": x.valuation(), "sign": sign(x) })
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let generated = generate_positive_tuple(
        args.d as usize,
        args.t as usize,
        args.sample.seed,
        &args.sample.options(),
    )?;
    write_json(&generated, args.output.as_deref())
}

fn cmd_invariants(args: &InvariantsArgs) -> Result<()> {
    let tuple = read_tuple(&args.input)?;
    let triangulation = if args.diagonals.is_empty() {
        Triangulation::Fan
    } else {
        let edges = args
            .diagonals
            .iter()
            .map(|s| parse_indices::<2>(s, tuple.t()).map(|[i, k]| (i, k)))
            .collect::<Result<_>>()?;
        Triangulation::Edges(edges)
    };
    let coords = tuple_coordinates(&tuple, &triangulation)?;
    let triangles: Vec<Value> = coords
        .triangles
        .iter()
        .map(|(&(i, j, k), ratios)| {
            let ratios: Vec<Value> = ratios
                .iter()
                .map(|(idx, x)| {
                    let mut v = described(x);
                    v["index"] = json!([idx.a, idx.b, idx.c]);
                    v
                })
                .collect();
            json!({ "vertices": [i, j, k], "triple_ratios": ratios })
        })
        .collect();
    let edges: Vec<Value> = coords
        .edges
        .iter()
        .map(|(&(i, k), z)| {
            let ratios: Vec<Value> = z
                .iter()
                .enumerate()
                .map(|(n, x)| {
                    let mut v = described(x);
                    v["index"] = json!(n + 1);
                    v
                })
                .collect();
            json!({ "diagonal": [i, k], "double_ratios": ratios })
        })
        .collect();
    let report = json!({
        "d": coords.d,
        "t": coords.t,
        "count": coords.count(),
        "all_positive": coords.all_positive(),
        "triangles": triangles,
        "edges": edges,
        "coordinates": coords,
    });
    write_json(&report, args.output.as_deref())
}

/// Points of the slice around `center`: the center itself and its moves
/// along `e_i - e_j` by 1/2, 1 and 2.
fn probe_points(center: &[Rational]) -> Vec<Vec<Rational>> {
    let d = center.len();
    let mut points = vec![center.to_vec()];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            for s in [Rational::new(1, 2), Rational::one(), Rational::from_int(2)] {
                let mut p = center.to_vec();
                p[i] = &p[i] + &s;
                p[j] = &p[j] - &s;
                points.push(p);
            }
        }
    }
    points
}

fn cone_json(cone: &DifferenceCone) -> Value {
    let constraints: Vec<String> = cone
        .constraints()
        .iter()
        .map(|(i, j, c)| format!("x{} - x{} <= {c}", i + 1, j + 1))
        .collect();
    json!({
        "cone": cone,
        "constraints": constraints,
        "single_point": cone.is_single_point(),
        "point": cone.interior_point(),
    })
}

fn cmd_intersect(args: &IntersectArgs) -> Result<()> {
    let text = read_input(&args.input)?;
    let value: Value = serde_json::from_str(&text)?;
    let (m1, m2) = if let Some(markings) = value.get("markings") {
        let [m1, m2]: [Marking; 2] = serde_json::from_value(markings.clone())?;
        (m1, m2)
    } else {
        let tuple: FlagTuple = serde_json::from_value(value)?;
        let (Some(first), Some(second)) = (&args.first, &args.second) else {
            return Err(CliError::Usage("a tuple input needs --first and --second".into()));
        };
        let [i, j] = parse_indices::<2>(first, tuple.t())?;
        let [k, l] = parse_indices::<2>(second, tuple.t())?;
        (
            flag_apartment(tuple.flag(i), tuple.flag(j))?.named(format!("A({i},{j})")),
            flag_apartment(tuple.flag(k), tuple.flag(l))?.named(format!("A({k},{l})")),
        )
    };
    let cone = intersect_apartments(&m1, &m2)?;
    let reverse = intersect_apartments(&m2, &m1)?;
    let transport = intersection_transport(&m1, &m2)?;
    // Direct norm test at probe points, plus agreement of the two
    // orderings through the transport map.
    let oracle = NormSplitTest::new(&m1, &m2)?;
    let center = cone.interior_point().unwrap_or_else(|| {
        let d = m1.d();
        vec![Rational::new(1, d as i64); d]
    });
    let mut pointwise = true;
    for p in probe_points(&center) {
        pointwise &= oracle.contains(&p)? == cone.contains(&p);
    }
    let symmetric = match &transport {
        Some(w) => cone.transport(w, m2.name.clone()) == reverse,
        None => cone.is_empty() && reverse.is_empty(),
    };
    let report = json!({
        "first": m1.name,
        "second": m2.name,
        "intersection": cone_json(&cone),
        "reverse": cone_json(&reverse),
        "transport": transport,
        "verified": pointwise && symmetric,
    });
    write_json(&report, args.output.as_deref())
}

fn cmd_cones(args: &ConesArgs) -> Result<()> {
    let tuple = read_tuple(&args.input)?;
    let [i, j, k] = parse_indices::<3>(&args.triple, tuple.t())?;
    let (e, f, g) = (tuple.flag(i), tuple.flag(j), tuple.flag(k));
    let d = tuple.d();
    let vals = ratio_valuations(&triple_ratios(e, f, g)?)?;
    let name = "f_EG";
    let c1 = cone_c1(d, &vals, name)?;
    let c2 = cone_c2(d, &vals, name)?;
    let both = c1.intersect(&c2);
    let m_eg = snake_marking(e, f, g)?.named(name);
    let p1 = intersect_apartments(&m_eg, &flag_apartment(e, f)?)?;
    let p2 = intersect_apartments(&m_eg, &flag_apartment(f, g)?)?;
    let valuations: serde_json::Map<String, Value> = vals
        .iter()
        .map(|(idx, v)| (idx.to_string(), json!(v)))
        .collect();
    let report = json!({
        "triple": [i, j, k],
        "valuations": valuations,
        "c1": cone_json(&c1),
        "c2": cone_json(&c2),
        "intersection": cone_json(&both),
        "verified": c1 == p1 && c2 == p2,
    });
    write_json(&report, args.output.as_deref())
}

fn cmd_shear(args: &ShearArgs) -> Result<()> {
    let tuple = read_tuple(&args.input)?;
    let [i, j, k, l] = parse_indices::<4>(&args.quad, tuple.t())?;
    let (e, f, g, h) = (tuple.flag(i), tuple.flag(j), tuple.flag(k), tuple.flag(l));
    let formula = shearing_translation(e, f, g, h)?;
    let direct = posflag::building::compare_markings(&snake_marking(e, h, g)?, &snake_marking(e, f, g)?)?;
    let z: Vec<Value> = double_ratios(e, f, g, h)?.iter().map(described).collect();
    let report = json!({
        "quadruple": [i, j, k, l],
        "double_ratios": z,
        "translation": formula,
        "verified": formula == direct,
    });
    write_json(&report, args.output.as_deref())
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let mut suites: Vec<Suite> = Vec::new();
    for s in &args.suite {
        let add: Vec<Suite> = match s {
            SuiteArg::All => Suite::all().to_vec(),
            SuiteArg::Field => vec![Suite::Field],
            SuiteArg::Symmetry => vec![Suite::Symmetry],
            SuiteArg::Snakes => vec![Suite::Snakes],
            SuiteArg::Tnn => vec![Suite::Tnn],
            SuiteArg::Intersection => vec![Suite::Intersection],
            SuiteArg::Main => vec![Suite::Main],
            SuiteArg::Shearing => vec![Suite::Shearing],
            SuiteArg::Monotonicity => vec![Suite::Monotonicity],
        };
        for x in add {
            if !suites.contains(&x) {
                suites.push(x);
            }
        }
    }
    let opts = VerifyOptions {
        trials: args.trials as usize,
        seed: args.seed,
        gen: GenOptions {
            exponent_denominator: args.exponent_denominator,
            ..GenOptions::default()
        },
        fault: args.inject_fault.map(|f| match f {
            FaultArg::NegateDoubleRatio => Fault::NegateDoubleRatio,
        }),
    };
    let report = run_suites(&suites, &opts);
    if args.json {
        write_json(&report, None)?;
    } else {
        let mut out = io::stdout().lock();
        let io_err = |source| CliError::Io {
            path: "stdout".into(),
            source,
        };
        for check in &report.checks {
            writeln!(out, "{check}").map_err(io_err)?;
        }
        let failed = report.checks.iter().filter(|c| !c.ok()).count();
        writeln!(
            out,
            "{} checks, {} failed (seed {})",
            report.checks.len(),
            failed,
            report.seed
        )
        .map_err(io_err)?;
    }
    Ok(report.passed)
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Invariants(a) => cmd_invariants(a).map(|_| true),
        Command::Intersect(a) => cmd_intersect(a).map(|_| true),
        Command::Cones(a) => cmd_cones(a).map(|_| true),
        Command::Shear(a) => cmd_shear(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
