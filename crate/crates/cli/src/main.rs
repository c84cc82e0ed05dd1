//! `ceresa`: command-line front end for ceresa-core.
//!
//! Exit codes: 0 success (or `proven_nontrivial`), 2 `unknown` certificate, 1 computation
//! or data error, 64 usage error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use ceresa_core::arith::parse_rational;
use ceresa_core::certifier::{certify_with, CertifyOptions, Verdict};
use ceresa_core::geometry::{x0_star_profile, DEFAULT_ENUMERATION_BOUND};
use ceresa_core::heegner::{enumerate_heegner_divisor, heegner_r_values, HeegnerIndex};
use ceresa_core::lattice::GramLattice;
use ceresa_core::newforms::config::Config;
use ceresa_core::newforms::{Mode, NewformClient};
use ceresa_core::pullback::decompose_heegner;
use ceresa_core::{build_lattice_l, build_lattice_p, build_lattice_w, gamma_n_profile_bounded, x0_profile};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

const EXIT_ERROR: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "ceresa", version, about = "Special divisors, Heegner divisors and Ceresa-cycle certificates for X_N")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Curve {
    X0,
    X0star,
    Xn,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certificate of nontriviality of the Ceresa and Gross–Kudla–Schoen cycles of X_N.
    Certify {
        n: u128,
        /// Directory of `level_<M>.json` newform fixtures to use instead of the bundled ones.
        #[arg(long, conflicts_with = "online")]
        fixtures: Option<PathBuf>,
        /// Query the newform database over HTTP.
        #[arg(long)]
        online: bool,
    },
    /// Heegner divisor P_{D,r} on X0(N).
    #[command(allow_negative_numbers = true)]
    Heegner {
        n: u64,
        d: i64,
        /// Residue mod 2N with r² ≡ D (mod 4N); the smallest admissible one by default.
        r: Option<u64>,
    },
    /// Express the special divisor Z(m0, μ_r) as a pullback of ambient special divisors.
    Pullback {
        n: u64,
        #[arg(long, value_parser = parse_m0)]
        m0: Rational64,
        #[arg(long)]
        r: u64,
    },
    /// Genus and elliptic/cusp data of a modular curve.
    Genus {
        n: u64,
        #[arg(long, value_enum)]
        curve: Curve,
    },
    /// Gram matrices and discriminant groups of the lattices W, P and L at level N.
    Lattice { n: u64 },
    /// Weight-2 newforms of trivial character at level M.
    Newforms {
        m: u64,
        #[arg(long)]
        online: bool,
    },
    /// Run the built-in consistency suites.
    Selftest,
}

fn parse_m0(s: &str) -> Result<Rational64, String> {
    parse_rational(s).ok_or_else(|| format!("expected an integer or NUM/DEN, got {s:?}"))
}

struct Output {
    value: Value,
    exit: u8,
}

impl Output {
    fn ok(v: impl Serialize) -> Result<Self> {
        Ok(Self { value: serde_json::to_value(v)?, exit: 0 })
    }
}

fn client(cfg: &Config, online: bool, fixtures: Option<PathBuf>) -> NewformClient {
    let mut nf = cfg.newforms.clone();
    if fixtures.is_some() {
        nf.fixtures_dir = fixtures;
    }
    NewformClient::new(nf, if online { Mode::Online } else { Mode::Offline })
}

fn enumeration_bound(cfg: &Config) -> u64 {
    cfg.geometry.enumeration_bound.unwrap_or(DEFAULT_ENUMERATION_BOUND)
}

#[derive(Serialize)]
struct ClassView {
    a: i64,
    b: i64,
    c: i64,
    weight: String,
}

#[derive(Serialize)]
struct LatticeView {
    kind: ceresa_core::lattice::LatticeKind,
    rank: usize,
    gram: Value,
    signature: (usize, usize),
    determinant: String,
    discriminant_invariants: Vec<u64>,
    discriminant_group_order: u64,
}

fn lattice_view(l: &GramLattice) -> Result<LatticeView> {
    let raw = serde_json::to_value(l)?;
    Ok(LatticeView {
        kind: l.kind,
        rank: l.rank,
        gram: raw["gram"].clone(),
        signature: l.signature,
        determinant: ceresa_core::arith::fmt_rational(&l.determinant()),
        discriminant_invariants: l.discriminant_invariants(),
        discriminant_group_order: l.discriminant_group_order(),
    })
}

fn run(cli: Cli) -> Result<Output> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Certify { n, fixtures, online } => {
            let src = client(&cfg, online, fixtures);
            let cert = certify_with(n, Some(&src), CertifyOptions { enumeration_bound: enumeration_bound(&cfg) })?;
            let exit = if cert.verdict == Verdict::Unknown { EXIT_UNKNOWN } else { 0 };
            Ok(Output { value: serde_json::to_value(&cert)?, exit })
        }
        Command::Heegner { n, d, r } => {
            let r_values = heegner_r_values(n, d);
            let r = match r {
                Some(r) => r,
                None => *r_values.first().ok_or_else(|| anyhow!("{d} is not a square modulo {}", 4 * n))?,
            };
            let div = enumerate_heegner_divisor(&HeegnerIndex::new(n, d, r)?)?;
            let reps: Vec<_> = div
                .classes
                .iter()
                .map(|c| ClassView { a: c.form.a, b: c.form.b, c: c.form.c, weight: ceresa_core::arith::fmt_rational(&c.weight) })
                .collect();
            Output::ok(json!({
                "level": n,
                "D": d,
                "r": r,
                "r_values": r_values,
                "degree": ceresa_core::arith::fmt_rational(&div.degree),
                "self_paired": div.self_paired,
                "class_representatives": reps,
            }))
        }
        Command::Pullback { n, m0, r } => {
            let dec = decompose_heegner(n, m0, r)?;
            let residual = dec.residual()?;
            Output::ok(json!({
                "decomposition": dec,
                "residual": residual,
                "round_trip_exact": residual.heeg.is_empty(),
            }))
        }
        Command::Genus { n, curve } => {
            let profile = match curve {
                Curve::X0 => x0_profile(n)?,
                Curve::X0star => x0_star_profile(n)?,
                Curve::Xn => gamma_n_profile_bounded(n, enumeration_bound(&cfg))?,
            };
            Output::ok(profile)
        }
        Command::Lattice { n } => {
            let lattices =
                [build_lattice_w(n)?, build_lattice_p(n)?, build_lattice_l(n)?].iter().map(lattice_view).collect::<Result<Vec<_>>>()?;
            Output::ok(json!({ "level": n, "lattices": lattices }))
        }
        Command::Newforms { m, online } => {
            let snap = client(&cfg, online, None).fetch_newforms(m).with_context(|| format!("newforms at level {m}"))?;
            Output::ok(snap)
        }
        Command::Selftest => {
            let report = ceresa_core::selftest::run_all();
            let ok = report.ok();
            Ok(Output { value: json!({ "ok": ok, "suites": report.suites }), exit: if ok { 0 } else { EXIT_ERROR } })
        }
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if is_scalar(val) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(val)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(val, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str(&format!("{pad}(none)\n"));
            }
            for item in items {
                if is_scalar(item) {
                    out.push_str(&format!("{pad}- {}\n", scalar(item)));
                } else if item.as_array().is_some_and(|row| row.iter().all(is_scalar)) {
                    let row: Vec<_> = item.as_array().into_iter().flatten().map(scalar).collect();
                    out.push_str(&format!("{pad}- [{}]\n", row.join(", ")));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(item, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn emit(v: &Value, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(v)? + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(v, 0, &mut s);
            s
        }
    };
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let format = cli.format;
    let result = run(cli).and_then(|out| {
        emit(&out.value, format)?;
        Ok(out.exit)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let message = format!("{e:#}");
            eprintln!("error: {message}");
            if format == Format::Json {
                let _ = emit(&json!({ "error": { "message": message } }), format);
            }
            ExitCode::from(EXIT_ERROR)
        }
    }
}
