//! `morrey`: command-line front end for `morrey_core`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morrey_core::{
    build_case3_family, build_case4_family, build_flat_family, build_infinite_witness, check_gp,
    classify_morrey_envelope, classify_nb_envelope, delta_in_nb, estimate_morrey_envelope, morrey_embedding,
    morrey_linfty, morrey_lower_bound, morrey_nontrivial, morrey_norm_dyadic, n_norm, nb_embedding, nb_l1loc,
    nb_linfty, ratio_to_f64, rearrange, spread_simple_function, write_csv, CoeffArray, Error, ExtReal,
    GapRule, Mode, PhiSpec, SimpleFunction, SpaceParams,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "morrey", version, about = "Generalised Morrey and Besov-Morrey space toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check membership of φ in G_p.
    PhiCheck(PhiArgs),
    /// Growth envelope of M_{φ,p}.
    ClassifyMorrey(PhiArgs),
    /// Growth envelope of N^s_{φ,p,q}.
    ClassifyBesov(SpaceArgs),
    /// M_{φ,p} ↪ M_{φ2,p2}.
    EmbedMorrey(PairArgs),
    /// N^s_{φ,p,q} ↪ N^{s2}_{φ2,p2,q2}.
    EmbedBesov(PairArgs),
    /// Embeddings into and from L_∞ (Besov-Morrey when -s and -q are given).
    Linfty(OptSpaceArgs),
    /// N^s_{φ,p,q} ⊂ L_1^loc.
    L1loc(SpaceArgs),
    /// δ ∈ N^s_{φ,p,q}.
    Delta(SpaceArgs),
    /// Morrey norm of a simple function (exact for dyadic input, lower bound otherwise).
    NormMorrey(FnArgs),
    /// Sequence-space quasi-norm of a coefficient array.
    NormSeq(SeqArgs),
    /// Decreasing rearrangement of a simple function.
    Rearrange(RearrangeArgs),
    /// Spread a normalised simple function into far-apart small cubes.
    Spread(FnArgs),
    /// Build an extremal family.
    Family(FamilyArgs),
    /// Lower bounds for the growth envelope of M_{φ,p} on a grid.
    Envelope(EnvelopeArgs),
}

#[derive(Args)]
struct Common {
    /// Write the result to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct PhiArgs {
    /// Weight function: JSON file or inline JSON.
    #[arg(long)]
    phi: String,
    #[arg(short)]
    p: f64,
    /// Expected dimension; checked against φ.
    #[arg(short)]
    d: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long)]
    phi: String,
    #[arg(short, allow_hyphen_values = true)]
    s: f64,
    #[arg(short)]
    p: f64,
    #[arg(short, value_parser = parse_ext)]
    q: ExtReal,
    #[arg(short)]
    d: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OptSpaceArgs {
    #[arg(long)]
    phi: String,
    #[arg(short, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(short)]
    p: f64,
    #[arg(short, value_parser = parse_ext)]
    q: Option<ExtReal>,
    #[arg(short)]
    d: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    phi: String,
    #[arg(short, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(short)]
    p: f64,
    #[arg(short, value_parser = parse_ext)]
    q: Option<ExtReal>,
    #[arg(long)]
    phi2: String,
    #[arg(long, allow_hyphen_values = true)]
    s2: Option<f64>,
    #[arg(long)]
    p2: f64,
    #[arg(long, value_parser = parse_ext)]
    q2: Option<ExtReal>,
    #[arg(short)]
    d: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct FnArgs {
    /// Simple function: JSON file or inline JSON.
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    phi: String,
    #[arg(short)]
    p: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SeqArgs {
    /// Coefficient array (carries s, p, q): JSON file or inline JSON.
    #[arg(long)]
    coeffs: String,
    #[arg(long)]
    phi: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RearrangeArgs {
    #[arg(long = "fn")]
    function: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Flat,
    Witness,
    Case3,
    Case4,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GapArg {
    Recursion,
    Lattice,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    kind: FamilyKind,
    #[arg(long)]
    phi: String,
    #[arg(short, allow_hyphen_values = true, default_value_t = 0.0)]
    s: f64,
    #[arg(short)]
    p: f64,
    #[arg(short, value_parser = parse_ext, default_value = "inf")]
    q: ExtReal,
    /// Level (flat, case3, case4) or largest level (witness).
    #[arg(short)]
    j: u32,
    /// Number of translated copies (flat, witness).
    #[arg(long, default_value_t = 1)]
    copies: usize,
    #[arg(long, value_enum, default_value_t = GapArg::Recursion)]
    gaps: GapArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EnvelopeArgs {
    #[arg(long)]
    phi: String,
    #[arg(short)]
    p: f64,
    /// Comma-separated evaluation points.
    #[arg(long)]
    t_grid: String,
    #[arg(long, default_value_t = 20)]
    budget: u32,
    #[command(flatten)]
    common: Common,
}

fn parse_ext(s: &str) -> Result<ExtReal, String> {
    ExtReal::parse(s).ok_or_else(|| format!("expected a number or \"inf\", got {s:?}"))
}

/// Failure with its exit code and the payload printed on standard output.
struct Failure {
    code: u8,
    payload: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotGp(report) => {
                Failure { code: 2, payload: serde_json::to_value(*report).unwrap_or(Value::Null) }
            }
            Error::Parse(msg) => Failure { code: 3, payload: json!({ "error": "parse", "message": msg }) },
            other => Failure {
                code: 1,
                payload: json!({ "error": error_tag(&other), "message": other.to_string() }),
            },
        }
    }
}

fn error_tag(e: &Error) -> &'static str {
    match e {
        Error::InvalidPhi(_) => "invalid_phi",
        Error::NonPositiveArgument(_) => "non_positive_argument",
        Error::NotGp(_) => "not_gp",
        Error::NotInvertible(_) => "not_invertible",
        Error::BelowRange(_) => "below_range",
        Error::InvalidP(_) => "invalid_p",
        Error::InvalidQ(_) => "invalid_q",
        Error::InvalidV(_) => "invalid_v",
        Error::TooFewSamples { .. } => "too_few_samples",
        Error::InvalidFunction(_) => "invalid_function",
        Error::WrongMode { .. } => "wrong_mode",
        Error::NotNormalized(_) => "not_normalized",
        Error::HypothesisViolated(_) => "hypothesis_violated",
        Error::BudgetExceeded(_) => "budget_exceeded",
        Error::OutOfScope(_) => "out_of_scope",
        Error::NotRegular => "not_regular",
        Error::MalformedIndex(_) => "malformed_index",
        Error::DimensionMismatch(..) => "dimension_mismatch",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
    }
}

fn parse_failure(msg: impl Into<String>) -> Failure {
    Failure { code: 3, payload: json!({ "error": "parse", "message": msg.into() }) }
}

/// Reads inline JSON (starting with `{`) or the named file.
fn load_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| parse_failure(format!("{what} {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| parse_failure(format!("{what}: {e}")))
}

fn load_phi(arg: &str, dim: Option<usize>) -> Result<PhiSpec, Failure> {
    let phi: PhiSpec = load_json(arg, "phi")?;
    match dim {
        Some(d) if d != phi.dim() => Err(Error::DimensionMismatch(d, phi.dim()).into()),
        _ => Ok(phi),
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| parse_failure(format!("missing required flag {flag}")))
}

enum Output {
    Json(Value),
    Csv(Vec<u8>),
}

fn json_of<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn csv_unsupported(common: &Common) -> Result<(), Failure> {
    if common.format == Format::Csv {
        Err(parse_failure("csv output is available for rearrange and envelope only"))
    } else {
        Ok(())
    }
}

fn run(cmd: &Command) -> Result<Output, Failure> {
    let out = match cmd {
        Command::PhiCheck(a) => {
            csv_unsupported(&a.common)?;
            let phi = load_phi(&a.phi, a.d)?;
            let report = check_gp(&phi, a.p)?;
            if !report.is_member {
                return Err(Failure { code: 2, payload: json_of(&report) });
            }
            Output::Json(json_of(&report))
        }
        Command::ClassifyMorrey(a) => {
            csv_unsupported(&a.common)?;
            let phi = load_phi(&a.phi, a.d)?;
            Output::Json(json_of(&classify_morrey_envelope(&phi, a.p)?))
        }
        Command::ClassifyBesov(a) => {
            csv_unsupported(&a.common)?;
            let sp = space(a)?;
            Output::Json(json_of(&classify_nb_envelope(&sp)?))
        }
        Command::EmbedMorrey(a) => {
            csv_unsupported(&a.common)?;
            let phi1 = load_phi(&a.phi, a.d)?;
            let phi2 = load_phi(&a.phi2, a.d)?;
            let holds = morrey_embedding(&phi1, a.p, &phi2, a.p2)?;
            Output::Json(json!({ "embedding": holds, "citations": ["morrey-embedding"] }))
        }
        Command::EmbedBesov(a) => {
            csv_unsupported(&a.common)?;
            let phi1 = load_phi(&a.phi, a.d)?;
            let phi2 = load_phi(&a.phi2, a.d)?;
            let sa = SpaceParams::new(need(a.s, "-s")?, a.p, need(a.q, "-q")?, phi1)?;
            let sb = SpaceParams::new(need(a.s2, "--s2")?, a.p2, need(a.q2, "--q2")?, phi2)?;
            let mut v = json_of(&nb_embedding(&sa, &sb)?);
            v["citations"] = json!(["nb-embedding"]);
            Output::Json(v)
        }
        Command::Linfty(a) => {
            csv_unsupported(&a.common)?;
            let phi = load_phi(&a.phi, a.d)?;
            match (a.s, a.q) {
                (Some(s), Some(q)) => {
                    let sp = SpaceParams::new(s, a.p, q, phi)?;
                    Output::Json(json!({ "into_linfty": nb_linfty(&sp)?, "citations": ["nb-linfty"] }))
                }
                (None, None) => {
                    let (into, from) = morrey_linfty(&phi, a.p)?;
                    Output::Json(json!({
                        "into_linfty": into,
                        "linfty_into": from,
                        "nontrivial": morrey_nontrivial(&phi, a.p)?,
                        "citations": ["morrey-linfty"],
                    }))
                }
                _ => return Err(parse_failure("-s and -q must be given together")),
            }
        }
        Command::L1loc(a) => {
            csv_unsupported(&a.common)?;
            let sp = space(a)?;
            Output::Json(json!({ "l1loc": json_of(&nb_l1loc(&sp)?), "citations": ["nb-l1loc"] }))
        }
        Command::Delta(a) => {
            csv_unsupported(&a.common)?;
            let sp = space(a)?;
            Output::Json(json!({ "delta_member": delta_in_nb(&sp)?, "citations": ["nb-delta"] }))
        }
        Command::NormMorrey(a) => {
            csv_unsupported(&a.common)?;
            let f: SimpleFunction = load_json(&a.function, "function")?;
            let phi = load_phi(&a.phi, Some(f.dim()))?;
            if f.mode() == Mode::Dyadic {
                Output::Json(json!({ "norm": morrey_norm_dyadic(&f, &phi, a.p)?, "exact": true }))
            } else {
                Output::Json(json!({ "norm": morrey_lower_bound(&f, &phi, a.p)?, "exact": false }))
            }
        }
        Command::NormSeq(a) => {
            csv_unsupported(&a.common)?;
            let c: CoeffArray = load_json(&a.coeffs, "coefficients")?;
            let phi = load_phi(&a.phi, Some(c.dim()))?;
            Output::Json(json!({ "norm": n_norm(&c, &phi)? }))
        }
        Command::Rearrange(a) => {
            let f: SimpleFunction = load_json(&a.function, "function")?;
            let fs = rearrange(&f);
            match a.common.format {
                Format::Json => Output::Json(json_of(&fs)),
                Format::Csv => {
                    let mut buf = b"height,width\n".to_vec();
                    for s in fs.steps() {
                        writeln!(buf, "{:.16e},{}", s.height, s.width).expect("write to memory");
                    }
                    Output::Csv(buf)
                }
            }
        }
        Command::Spread(a) => {
            csv_unsupported(&a.common)?;
            let f: SimpleFunction = load_json(&a.function, "function")?;
            let phi = load_phi(&a.phi, Some(f.dim()))?;
            let levels: Vec<(f64, f64)> =
                rearrange(&f).steps().iter().map(|s| (s.height, ratio_to_f64(&s.width))).collect();
            let (g, plan) = spread_simple_function(&levels, &phi, a.p)?;
            plan.verify(&phi)?;
            Output::Json(json!({
                "function": json_of(&g),
                "plan": json_of(&plan),
                "lower_bound": morrey_lower_bound(&g, &phi, a.p)?,
            }))
        }
        Command::Family(a) => {
            csv_unsupported(&a.common)?;
            let phi = load_phi(&a.phi, None)?;
            match a.kind {
                FamilyKind::Flat => {
                    let rule = match a.gaps {
                        GapArg::Recursion => GapRule::Recursion,
                        GapArg::Lattice => GapRule::Lattice,
                    };
                    let f = build_flat_family(&phi, a.p, a.j, a.copies, rule)?;
                    let norm = morrey_norm_dyadic(&f, &phi, a.p)?;
                    Output::Json(json!({ "function": json_of(&f), "norm": norm }))
                }
                FamilyKind::Witness | FamilyKind::Case3 | FamilyKind::Case4 => {
                    let c = match a.kind {
                        FamilyKind::Witness => build_infinite_witness(a.s, a.p, a.q, &phi, a.j, a.copies)?,
                        FamilyKind::Case3 => build_case3_family(&phi, a.p, a.q, a.j)?,
                        _ => build_case4_family(&phi, a.s, a.p, a.q, a.j)?,
                    };
                    let norm = n_norm(&c, &phi)?;
                    let sum: f64 = c.entries().map(|(_, _, v)| v.abs()).sum();
                    Output::Json(json!({ "coefficients": json_of(&c), "norm": norm, "sum": sum }))
                }
            }
        }
        Command::Envelope(a) => {
            let phi = load_phi(&a.phi, None)?;
            let grid = a
                .t_grid
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| parse_failure(format!("--t-grid: {e}")))?;
            let est = estimate_morrey_envelope(&phi, a.p, &grid, a.budget)?;
            match a.common.format {
                Format::Json => Output::Json(json_of(&est)),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&est, &mut buf)?;
                    Output::Csv(buf)
                }
            }
        }
    };
    Ok(out)
}

fn space(a: &SpaceArgs) -> Result<SpaceParams, Failure> {
    let phi = load_phi(&a.phi, a.d)?;
    Ok(SpaceParams::new(a.s, a.p, a.q, phi)?)
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::PhiCheck(a) | Command::ClassifyMorrey(a) => &a.common,
        Command::ClassifyBesov(a) | Command::L1loc(a) | Command::Delta(a) => &a.common,
        Command::EmbedMorrey(a) | Command::EmbedBesov(a) => &a.common,
        Command::Linfty(a) => &a.common,
        Command::NormMorrey(a) | Command::Spread(a) => &a.common,
        Command::NormSeq(a) => &a.common,
        Command::Rearrange(a) => &a.common,
        Command::Family(a) => &a.common,
        Command::Envelope(a) => &a.common,
    }
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure {
            code: 1,
            payload: json!({ "error": "io", "message": format!("{}: {e}", path.display()) }),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure { code: 1, payload: json!({ "error": "io", "message": e.to_string() }) })
        }
    }
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_else(|_| "null".into());
    s.push('\n');
    s.into_bytes()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli.command).and_then(|o| {
        let bytes = match o {
            Output::Json(v) => pretty(&v),
            Output::Csv(b) => b,
        };
        emit(&bytes, common(&cli.command).out.as_deref())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = std::io::stdout().write_all(&pretty(&f.payload));
            if let Some(msg) = f.payload.get("message").and_then(Value::as_str) {
                eprintln!("error: {msg}");
            }
            ExitCode::from(f.code)
        }
    }
}
