use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cyclelift::identity::{verify_main_theorem, verify_remark_identity, SymbolicDivisor};
use cyclelift::localcycles::{unitary_cycle, LocalCycle, OrthEndo, Sign, SpecialHom};
use cyclelift::padic::LocalContext;
use cyclelift::qseries::{
    rational_to_string, shimura_lift, shimura_lift_to, ConstantTerm, FormalSeries, JsonCoefficient, ShimuraParams,
};
use cyclelift::quadfield::QuadField;
use cyclelift::{Error, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

mod parse;
mod verify;

const DEFAULT_SEED: u64 = 20240601;
const PRECISION_VAR: &str = "CYCLELIFT_PRECISION";

#[derive(Parser)]
#[command(name = "cyclelift", version, about = "Special cycles on the Bruhat-Tits tree and the Shimura lift")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Rho,
    RFormula,
    LocalCompare,
    MainIdentity,
    RemarkIdentity,
    Hilbert,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the verification sweeps; exits 1 on any mismatch.
    Verify {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        /// Quaternion discriminant.
        #[arg(long)]
        db: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        /// Upper bound for `rho` (default 5000) and `hilbert` (default 50).
        #[arg(long)]
        max: Option<u64>,
        #[arg(long, default_value_t = 300)]
        mmax: u64,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        /// Number of random vectors.
        #[arg(long, default_value_t = 50)]
        count: u32,
        #[arg(long, default_value_t = 4)]
        alpha_max: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Decompose a local special cycle.
    Cycle {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        #[arg(long, default_value = "minus")]
        sign: String,
        /// `x0+y0d,x1+y1d`, optionally followed by `/p^e`.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Treat `b` as an eigenvector of an orthogonal endomorphism.
        #[arg(long)]
        ortho: bool,
        #[arg(long, default_value_t = 0)]
        alpha: u32,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Apply the Shimura lift to a series file.
    Lift {
        #[arg(long, default_value_t = 3)]
        kappa: u32,
        #[arg(long)]
        level: u64,
        #[arg(long)]
        t: u64,
        /// `principal` or `kronecker:D`.
        #[arg(long, default_value = "principal")]
        chi: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Compute the lift up to this exponent.
        #[arg(long)]
        mmax: Option<u64>,
    },
}

/// What a subcommand produced: a JSON document, CSV rows, and whether the
/// check passed.
struct Output {
    json: Value,
    csv: Vec<Vec<String>>,
    ok: bool,
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required")))
}

fn context(p: u64, delta: i64, flag: Option<u32>, t_max: u32, radius: u32) -> Result<LocalContext> {
    let env = match std::env::var(PRECISION_VAR) {
        Ok(s) => Some(
            s.parse::<u32>()
                .map_err(|_| Error::InvalidInput(format!("{PRECISION_VAR}={s:?} is not a number")))?,
        ),
        Err(_) => None,
    };
    match flag.or(env) {
        Some(n) => LocalContext::new(p, delta, n),
        None => LocalContext::with_default_precision(p, delta, t_max, radius),
    }
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Rho => "rho",
        Kind::RFormula => "r-formula",
        Kind::LocalCompare => "local-compare",
        Kind::MainIdentity => "main-identity",
        Kind::RemarkIdentity => "remark-identity",
        Kind::Hilbert => "hilbert",
    }
}

fn run_verify(cmd: Command) -> Result<Output> {
    let Command::Verify { kind, delta, db, p, max, mmax, radius, count, alpha_max, seed, precision } = cmd
    else {
        unreachable!()
    };
    let report = match kind {
        Kind::Rho => verify::rho(need(delta, "delta")?, max.unwrap_or(5000))?.to_json(),
        Kind::RFormula => {
            let ctx = context(need(p, "p")?, need(delta, "delta")?, precision, 3, radius)?;
            verify::r_formula(&ctx, count, radius, seed)?.to_json()
        }
        Kind::LocalCompare => {
            let ctx = context(need(p, "p")?, need(delta, "delta")?, precision, alpha_max, alpha_max + 2)?;
            verify::local_compare(&ctx, alpha_max, count, seed)?.to_json()
        }
        Kind::MainIdentity => {
            let field = QuadField::new(need(delta, "delta")?)?;
            verify_main_theorem(&field, need(db, "db")?, mmax)?.to_json()
        }
        Kind::RemarkIdentity => {
            let field = QuadField::new(need(delta, "delta")?)?;
            let d_b = need(db, "db")?;
            let classes = field.optimal_embedding_count(d_b)?;
            verify_remark_identity(&field, d_b, mmax, classes)?.to_json()
        }
        Kind::Hilbert => verify::hilbert(need(delta, "delta")?, max.unwrap_or(50))?.to_json(),
    };
    let mismatches = report["mismatches"].as_array().map_or(0, Vec::len);
    let c_prime_ok = report.get("c_prime").is_none_or(|c| c.as_array().is_some_and(Vec::is_empty));
    let ok = mismatches == 0 && c_prime_ok;
    let csv = vec![
        vec!["kind".into(), "checked".into(), "mismatches".into(), "status".into()],
        vec![
            kind_name(kind).into(),
            report["checked"].to_string(),
            mismatches.to_string(),
            if ok { "pass" } else { "fail" }.into(),
        ],
    ];
    Ok(Output { json: report, csv, ok })
}

fn cycle_rows(z: &LocalCycle) -> Result<Vec<Vec<String>>> {
    let v = z.to_json()?;
    let mut rows = vec![vec!["part".to_string(), "vertex".to_string(), "value".to_string()]];
    for (part, key) in [("horizontal", "count"), ("vertical", "mult")] {
        for e in v[part].as_array().into_iter().flatten() {
            rows.push(vec![
                part.to_string(),
                e["vertex"].as_str().unwrap_or_default().to_string(),
                e[key].to_string(),
            ]);
        }
    }
    Ok(rows)
}

fn run_cycle(cmd: Command) -> Result<Output> {
    let Command::Cycle { p, delta, sign, b, ortho, alpha, precision } = cmd else {
        unreachable!()
    };
    let ctx = context(p, delta, precision, 8, 8)?;
    let vec = parse::parse_vector(&ctx, &b)?;
    let z = if ortho {
        cyclelift::localcycles::orthogonal_cycle(&OrthEndo::new(alpha, vec)?)?
    } else {
        unitary_cycle(&SpecialHom::new(sign.parse::<Sign>()?, vec)?)?
    };
    Ok(Output { json: z.to_json()?, csv: cycle_rows(&z)?, ok: true })
}

fn lift_series<C: JsonCoefficient>(
    input: &Value,
    params: &ShimuraParams,
    mmax: Option<u64>,
    render: fn(&C) -> String,
) -> Result<Output> {
    let f = FormalSeries::<C>::from_json(input)?;
    let lift = match mmax {
        Some(m) => shimura_lift_to(&f, params, m)?,
        None => shimura_lift(&f, params)?,
    };
    let mut json = lift.series.to_json();
    json["constant"] = match &lift.constant {
        ConstantTerm::Exact => json!("exact"),
        ConstantTerm::Deferred { a0 } => json!({"deferred": {"a0": a0.to_json()}}),
    };
    json["params"] = json!({
        "kappa": params.kappa(), "level": params.level(), "t": params.t(),
        "chi": format!("{:?}", params.chi()),
    });
    let mut csv = vec![vec!["n".to_string(), "c".to_string()]];
    csv.extend(lift.series.iter().map(|(n, c)| vec![n.to_string(), render(c)]));
    Ok(Output { json, csv, ok: true })
}

fn run_lift(cmd: Command) -> Result<(Output, Option<PathBuf>)> {
    let Command::Lift { kappa, level, t, chi, input, output, mmax } = cmd else {
        unreachable!()
    };
    let params = ShimuraParams::new(kappa, level, t, parse::parse_character(&chi)?)?;
    let text = std::fs::read_to_string(&input)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", input.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", input.display())))?;
    let symbolic = value["coeffs"]
        .as_array()
        .is_some_and(|cs| cs.iter().any(|c| c["c"].is_array()));
    let out = if symbolic {
        lift_series::<SymbolicDivisor>(&value, &params, mmax, |c| c.to_string())?
    } else {
        lift_series::<BigRational>(&value, &params, mmax, rational_to_string)?
    };
    Ok((out, output))
}

fn write_output(out: &Output, format: Format, path: Option<&Path>) -> std::io::Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &out.json)?;
            buf.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut buf);
            for row in &out.csv {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    match path {
        Some(p) => std::fs::write(p, buf),
        None => std::io::stdout().write_all(&buf),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted { .. } | Error::SearchRadiusExceeded { .. } => 3,
        Error::TruncationInsufficient { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        cmd @ Command::Verify { .. } => run_verify(cmd).map(|o| (o, None)),
        cmd @ Command::Cycle { .. } => run_cycle(cmd).map(|o| (o, None)),
        cmd @ Command::Lift { .. } => run_lift(cmd),
    };
    match result {
        Ok((out, path)) => {
            let path = path.or(cli.out);
            if let Err(e) = write_output(&out, cli.format, path.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
