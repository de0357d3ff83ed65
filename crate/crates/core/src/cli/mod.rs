//! Command-line driver. `run` takes the argument vector and writers so the
//! binary and in-process callers share one code path.
//!
//! Config files are flat `key=value` lines whose keys are flag names; they are
//! spliced in ahead of the real flags, and later occurrences win.

use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::arithforms::{coeff_table, lookup, NewformSpec};
use crate::error::{Error, Result};
use crate::farey::{build_farey_system, farey_rows, FareyParams, FareySystem};
use crate::lfunction::{afe_evaluate, completed_lambda, lvalue_critical, subconvexity_scan, AfeMode, M0Rule};
use crate::sieve::{
    band_members, gk_bound, large_sieve_check, resonance_count_b, resonance_grid_for, unimodular_weights, Resonant,
    SieveBand,
};
use crate::special::{gamma_c, CutoffG, QuadratureSpec};
use crate::statphase::{check_stationary_phase, core_sample, BlockPhaseData, Sign};
use crate::voronoi::{additive_twist_decompose, verify_twist_identity, voronoi_check, Bump, VoronoiParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "jutila-lab", version, about = "Modular-form L-function experiments", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Worker threads; output does not depend on it [default: logical cores]
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    /// Output path, `-` for stdout
    #[arg(long, default_value = "-")]
    #[serde(skip)]
    out: String,
    /// csv or json [default: csv, json for sieve-count]
    #[arg(long)]
    #[serde(skip)]
    format: Option<Format>,
    /// Seed for randomised weights
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Flat key=value file; flags override it
    #[arg(long)]
    #[serde(skip)]
    config: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
enum SignArg {
    Plus,
    Minus,
    Both,
}

impl SignArg {
    fn signs(self) -> Vec<Sign> {
        match self {
            SignArg::Plus => vec![Sign::Plus],
            SignArg::Minus => vec![Sign::Minus],
            SignArg::Both => Sign::BOTH.to_vec(),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
enum LMethod {
    /// Gaussian-smoothed functional equation, any t
    Smoothed,
    /// Cutoff-g functional equation, |t| ≤ 20
    Afe,
    /// The two cutoff sums without correction
    Literal,
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Fourier coefficients a(n) and λ(n) = a(n)/n^{(k−1)/2}
    Coeffs {
        /// Form label: 1.12.a, 4.6.a, 9.4.a, 11.2.a
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// Largest n
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[command(flatten)]
        common: Common,
    },
    /// L(1/2 + it) at one or more heights
    Lvalue {
        /// Form label
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// Comma-separated heights
        #[arg(long, default_value = "0", value_delimiter = ',')]
        t: Vec<f64>,
        /// Evaluation route
        #[arg(long, value_enum, default_value = "smoothed")]
        method: LMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Approximate functional equation against the completed-Λ route
    AfeCheck {
        /// Form label
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// Comma-separated heights, |t| ≤ 20
        #[arg(long, default_value = "0,5,10", value_delimiter = ',')]
        t: Vec<f64>,
        /// Cutoff dilation λ
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Additive twist against its multiplicative-twist expansion
    TwistCheck {
        /// Form label
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// Numerator of a/q
        #[arg(long, default_value_t = 1)]
        a: i64,
        /// Denominator of a/q
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Re s
        #[arg(long, default_value_t = 2.0)]
        s_re: f64,
        /// Im s
        #[arg(long, default_value_t = 0.0)]
        s_im: f64,
        /// Truncation X of both sides
        #[arg(long, default_value_t = 100_000)]
        x: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Both sides of the Voronoi formula for a smooth bump
    VoronoiCheck {
        /// Form label
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// Numerator of a/q
        #[arg(long, default_value_t = 1)]
        a: i64,
        /// Denominator of a/q
        #[arg(long, default_value_t = 1)]
        q: u64,
        /// Bump support A:B
        #[arg(long, default_value = "500:900")]
        support: String,
        /// Edge width as a fraction of B − A
        #[arg(long, default_value_t = 0.25)]
        edge: f64,
        /// Target relative size of the dual-sum tail
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Farey system dump
    Farey {
        /// Form label
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// Height t
        #[arg(long, default_value_t = 1e4)]
        t: f64,
        /// Dyadic size M [default: M0]
        #[arg(long = "M")]
        m: Option<u64>,
        /// Block scale M0 [default: ⌈t^{2/3}⌉]
        #[arg(long = "M0")]
        m0: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Stationary-phase main term against the direct integral
    StatphaseCheck {
        /// Form label
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// Height t
        #[arg(long, default_value_t = 1e5)]
        t: f64,
        /// Dyadic size M [default: M0]
        #[arg(long = "M")]
        m: Option<u64>,
        /// Block scale M0 [default: ⌈t^{2/3}⌉]
        #[arg(long = "M0")]
        m0: Option<u64>,
        /// Block index [default: middle block]
        #[arg(long)]
        j: Option<usize>,
        /// Largest frequency scanned for core stationary points
        #[arg(long, default_value_t = 200_000)]
        lmax: u64,
        /// Frequencies sampled per sign
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Branch: plus, minus or both
        #[arg(long, value_enum, default_value = "both")]
        sign: SignArg,
        #[command(flatten)]
        common: Common,
    },
    /// Resonance count B(Δ1, Δ2) against the counting bound
    SieveCount {
        /// Form whose level fixes the good/bad split
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// Height t
        #[arg(long, default_value_t = 1e6)]
        t: f64,
        /// Dyadic size M
        #[arg(long = "M", default_value_t = 20_000)]
        m: u64,
        /// Block scale M0
        #[arg(long = "M0", default_value_t = 20)]
        m0: u64,
        /// Shift r, coprime to the block moduli
        #[arg(long, default_value_t = 1)]
        r: u64,
        /// Bad part β = c/d
        #[arg(long, default_value = "0/1")]
        beta: String,
        /// Dyadic sizes L,U,V; ranges are (L/2, L], [U/2, U), [V/2, V)
        #[arg(long, default_value = "32,128,32")]
        band: String,
        /// Fraction closeness Δ1
        #[arg(long, default_value_t = 0.1)]
        delta1: f64,
        /// Product closeness Δ2
        #[arg(long, default_value_t = 0.05)]
        delta2: f64,
        /// CSV grid over every dyadic band with X-derived (Δ1, Δ2)
        #[arg(long)]
        gk_grid: bool,
        /// Grid points per band
        #[arg(long, default_value_t = 9)]
        xs: usize,
        /// Also report the large-sieve ratio with seeded unimodular weights
        #[arg(long)]
        large_sieve: bool,
        #[command(flatten)]
        common: Common,
    },
    /// |L(1/2 + it)| normalised by t^{1/3} ln t and by t^{1/2}
    Scan {
        /// Form label
        #[arg(long, default_value = "1.12.a")]
        form: String,
        /// First height
        #[arg(long, default_value_t = 2.0)]
        t_min: f64,
        /// Last height
        #[arg(long, default_value_t = 2000.0)]
        t_max: f64,
        /// Height step
        #[arg(long, default_value_t = 2.0)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Coeffs { common, .. }
            | Command::Lvalue { common, .. }
            | Command::AfeCheck { common, .. }
            | Command::TwistCheck { common, .. }
            | Command::VoronoiCheck { common, .. }
            | Command::Farey { common, .. }
            | Command::StatphaseCheck { common, .. }
            | Command::SieveCount { common, .. }
            | Command::Scan { common, .. } => common,
        }
    }
}

enum Output {
    Table { columns: Vec<&'static str>, rows: Vec<Vec<Value>> },
    Record(Map<String, Value>),
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match splice_config(args) {
        Ok(a) => a,
        Err(e) => return report(err, &e),
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let common = cli.cmd.common().clone();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(common.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return report(err, &Error::Invalid(format!("thread pool: {e}"))),
    };
    let result = pool.install(|| dispatch(&cli.cmd));
    let output = match result {
        Ok(o) => o,
        Err(e) => return report(err, &e),
    };
    let format = common.format.unwrap_or(match cli.cmd {
        Command::SieveCount { gk_grid: false, .. } => Format::Json,
        _ => Format::Csv,
    });
    let text = render(&output, format, &config_hash(&cli.cmd));
    let written = if common.out == "-" {
        out.write_all(text.as_bytes()).map_err(|e| e.to_string())
    } else {
        fs::write(&common.out, text).map_err(|e| e.to_string())
    };
    match written {
        Ok(()) => 0,
        Err(e) => report(err, &Error::Invalid(format!("writing {}: {e}", common.out))),
    }
}

fn report(err: &mut dyn Write, e: &Error) -> i32 {
    let code = e.exit_code();
    let _ = writeln!(err, "error code={code} reason={}", e.to_string().replace('\n', " "));
    code
}

/// Inserts `--key=value` pairs from the config file right after the
/// subcommand so that explicit flags, parsed later, take precedence.
fn splice_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = args.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| Error::Invalid(format!("config {path}: {e}")))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("config {path}:{}: expected key=value", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "config" {
            return Err(Error::Invalid(format!("config {path}:{}: nested config", n + 1)));
        }
        match v {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => extra.push(format!("--{k}={v}")),
        }
    }
    // the subcommand is the first argument that is not a flag
    let at = args.iter().skip(1).position(|a| !a.starts_with('-')).map_or(args.len(), |p| p + 2);
    let mut out = args[..at.min(args.len())].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at.min(args.len())..]);
    Ok(out)
}

fn config_hash(cmd: &Command) -> String {
    let canonical = serde_json::to_string(cmd).expect("config serialises");
    let digest = Sha256::digest(canonical.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn render(output: &Output, format: Format, hash: &str) -> String {
    let header = format!("jutila-lab v{VERSION}, config-hash={hash}");
    match (output, format) {
        (Output::Table { columns, rows }, Format::Csv) => {
            let mut s = format!("# {header}\n{}\n", columns.join(","));
            for r in rows {
                s.push_str(&r.iter().map(csv_cell).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
        (Output::Record(m), Format::Csv) => {
            let keys: Vec<&str> = m.keys().map(String::as_str).collect();
            let vals: Vec<String> = m.values().map(csv_cell).collect();
            format!("# {header}\n{}\n{}\n", keys.join(","), vals.join(","))
        }
        (Output::Table { columns, rows }, Format::Json) => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                .collect();
            let doc = json!({ "generator": header, "config_hash": hash, "rows": rows });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        (Output::Record(m), Format::Json) => {
            let mut doc = m.clone();
            doc.insert("generator".into(), json!(header));
            doc.insert("config_hash".into(), json!(hash));
            serde_json::to_string_pretty(&Value::Object(doc)).expect("json") + "\n"
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

fn farey_system(t: f64, m: Option<u64>, m0: Option<u64>) -> Result<FareySystem> {
    if !(t > 1.0) {
        return Err(Error::Invalid(format!("t = {t} must exceed 1")));
    }
    let m0 = m0.unwrap_or_else(|| M0Rule::TwoThirds.m0(t));
    build_farey_system(FareyParams::dyadic(t, m.unwrap_or(m0), m0)?)
}

fn parse_pair(s: &str, sep: char, what: &str) -> Result<(i64, i64)> {
    let bad = || Error::Invalid(format!("{what}: expected two integers separated by '{sep}', got {s:?}"));
    let (a, b) = s.split_once(sep).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn dispatch(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Coeffs { form, limit, .. } => {
            let table = coeff_table(&lookup(form)?, (*limit).max(1))?;
            let rows =
                (1..=*limit).map(|n| vec![json!(n), json!(table.a(n).to_string()), num(table.lambda(n))]).collect();
            Ok(Output::Table { columns: vec!["n", "a_n", "lambda_n"], rows })
        }
        Command::Lvalue { form, t, method, .. } => {
            let spec = lookup(form)?;
            let mut rows = Vec::new();
            for &t in t {
                let r = match method {
                    LMethod::Smoothed => lvalue_critical(&spec, t)?,
                    LMethod::Afe => afe_evaluate(&spec, t, &CutoffG::default(), AfeMode::Exact)?,
                    LMethod::Literal => afe_evaluate(&spec, t, &CutoffG::default(), AfeMode::Literal)?,
                };
                let v = r.value();
                rows.push(vec![
                    num(t),
                    num(v.re),
                    num(v.im),
                    num(v.norm()),
                    json!(r.truncation),
                    num(r.error_estimate),
                ]);
            }
            Ok(Output::Table { columns: vec!["t", "re_L", "im_L", "abs_L", "truncation", "error_estimate"], rows })
        }
        Command::AfeCheck { form, t, lambda, .. } => {
            let spec = lookup(form)?;
            let g = CutoffG::scaled(*lambda);
            let mut rows = Vec::new();
            for &t in t {
                let afe = afe_evaluate(&spec, t, &g, AfeMode::Exact)?.value();
                let lam = completed_route(&spec, t)?;
                let diff = (afe - lam).norm();
                rows.push(vec![
                    num(t),
                    num(afe.re),
                    num(afe.im),
                    num(lam.re),
                    num(lam.im),
                    num(diff),
                    num(diff / lam.norm().max(1.0)),
                ]);
            }
            Ok(Output::Table {
                columns: vec!["t", "afe_re", "afe_im", "lambda_re", "lambda_im", "abs_diff", "scaled_diff"],
                rows,
            })
        }
        Command::TwistCheck { form, a, q, s_re, s_im, x, .. } => {
            let d = additive_twist_decompose(&lookup(form)?, *a, *q)?;
            let c = verify_twist_identity(&d, Complex64::new(*s_re, *s_im), *x)?;
            let row = vec![
                json!(form),
                json!(a),
                json!(q),
                json!(d.terms.len()),
                num(c.lhs_re),
                num(c.lhs_im),
                num(c.residual),
                num(c.tail_bound),
            ];
            Ok(Output::Table {
                columns: vec!["form", "a", "q", "terms", "lhs_re", "lhs_im", "residual", "tail_bound"],
                rows: vec![row],
            })
        }
        Command::VoronoiCheck { form, a, q, support, edge, tol, .. } => {
            let (lo, hi) = parse_pair(support, ':', "--support")?;
            let f = Bump::with_edges(lo as f64, hi as f64, *edge)?;
            let c =
                voronoi_check(&lookup(form)?, *a, *q, &f, &VoronoiParams { tol: *tol, ..VoronoiParams::default() })?;
            let row = vec![
                num(c.lhs_re),
                num(c.lhs_im),
                num(c.rhs.re),
                num(c.rhs.im),
                num(c.abs_err),
                num(c.rel_err),
                json!(c.rhs.l_trunc),
                num(c.rhs.tail_bound),
            ];
            Ok(Output::Table {
                columns: vec!["lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err", "l_trunc", "tail_bound"],
                rows: vec![row],
            })
        }
        Command::Farey { form, t, m, m0, .. } => {
            let spec = lookup(form)?;
            let sys = farey_system(*t, *m, *m0)?;
            let rows = farey_rows(&sys, spec.level)?
                .into_iter()
                .map(|r| {
                    vec![
                        json!(r.j),
                        json!(r.u),
                        json!(r.v),
                        json!(r.rho_num),
                        json!(r.rho_den),
                        json!(r.n_j),
                        json!(r.q),
                        json!(r.d),
                        json!(r.c),
                        json!(r.a),
                    ]
                })
                .collect();
            Ok(Output::Table {
                columns: vec!["j", "u_j", "v_j", "rho_num", "rho_den", "N_j", "q_j", "d_j", "c_j", "a_j"],
                rows,
            })
        }
        Command::StatphaseCheck { form, t, m, m0, j, lmax, samples, sign, .. } => {
            let spec = lookup(form)?;
            let sys = farey_system(*t, *m, *m0)?;
            let j = j.unwrap_or(sys.len().div_ceil(2));
            let data = BlockPhaseData::new(&sys, j, 1, spec.level, spec.weight)?;
            let signs = sign.signs();
            let quad = QuadratureSpec::default();
            let rows = core_sample(&data, *lmax, *samples)
                .into_iter()
                .filter(|(_, s)| signs.contains(s))
                .map(|(l, s)| {
                    let c = check_stationary_phase(&data, l as f64, s, &quad)?;
                    Ok(vec![
                        json!(l),
                        json!(sign_name(s)),
                        num(c.x_star),
                        num(c.direct_re),
                        num(c.direct_im),
                        num(c.main_re),
                        num(c.main_im),
                        num(c.rel_err),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Output::Table {
                columns: vec!["ell", "sign", "x_star", "direct_re", "direct_im", "main_re", "main_im", "rel_err"],
                rows,
            })
        }
        Command::SieveCount {
            form, t, m, m0, r, beta, band, delta1, delta2, gk_grid, xs, large_sieve, common, ..
        } => {
            let spec = lookup(form)?;
            if *gk_grid {
                let grid = resonance_grid_for(&[(*t, *m, *m0)], spec.level, spec.weight, *xs)?;
                let rows = grid
                    .iter()
                    .map(|p| {
                        vec![
                            json!(p.u1),
                            json!(p.u2),
                            json!(p.v1),
                            json!(p.v2),
                            json!(p.members),
                            num(p.x),
                            num(p.delta1),
                            num(p.delta2),
                            num(p.a),
                            num(p.c),
                            json!(p.count),
                            num(p.gk),
                            num(p.ratio),
                        ]
                    })
                    .collect();
                return Ok(Output::Table {
                    columns: vec![
                        "u1", "u2", "v1", "v2", "members", "x", "delta1", "delta2", "A", "C", "count_B", "gk_bound",
                        "ratio",
                    ],
                    rows,
                });
            }
            let (c, d) = parse_pair(beta, '/', "--beta")?;
            let sizes: Vec<u64> = band
                .split(',')
                .map(|s| s.trim().parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Invalid(format!("--band: expected L,U,V, got {band:?}")))?;
            let [l, u, v] = sizes[..] else {
                return Err(Error::Invalid(format!("--band: expected three sizes, got {band:?}")));
            };
            if [l, u, v].iter().any(|&x| x < 2 || !x.is_power_of_two()) {
                return Err(Error::Invalid(format!("--band: sizes must be powers of two ≥ 2, got {band:?}")));
            }
            let sb = SieveBand::new(
                *t,
                *r,
                (c, d),
                (l / 2 + 1, l),
                ((u / 2) as i64, u as i64 - 1),
                ((v / 2) as i64, v as i64 - 1),
            )?;
            let sys = build_farey_system(FareyParams::dyadic(*t, *m, *m0)?)?;
            let members = band_members(&sys, &sb, spec.level, spec.weight)?;
            let set: Vec<Resonant> = members.iter().map(Resonant::from).collect();
            let count = resonance_count_b(&set, sb.uv(), *delta1, *delta2)?;
            let (a, cc) = sb.gk_parameters();
            let gk = gk_bound(*delta1, *delta2, a, cc);
            let mut rec = Map::new();
            rec.insert("count_B".into(), json!(count));
            rec.insert("gk_bound".into(), num(gk));
            rec.insert("ratio".into(), num(count as f64 / gk));
            rec.insert("members".into(), json!(members.len()));
            rec.insert("A".into(), num(a));
            rec.insert("C".into(), num(cc));
            rec.insert("eta".into(), num(sb.eta()));
            if *large_sieve && !members.is_empty() {
                let n_ell = (sb.l2 - sb.l1 + 1) as usize;
                let nu = unimodular_weights(members.len(), common.seed);
                let lambda = unimodular_weights(n_ell, common.seed.wrapping_add(1));
                for s in Sign::BOTH {
                    let rep = large_sieve_check(&members, &sb, &nu, &lambda, s)?;
                    rec.insert(format!("large_sieve_ratio_{}", sign_name(s)), num(rep.ratio));
                }
            }
            Ok(Output::Record(rec))
        }
        Command::Scan { form, t_min, t_max, step, .. } => {
            if !(step > &0.0) || t_max < t_min {
                return Err(Error::Invalid(format!("scan range [{t_min}, {t_max}] with step {step}")));
            }
            let n = ((t_max - t_min) / step + 1e-9).floor() as usize;
            let grid: Vec<f64> = (0..=n).map(|i| t_min + i as f64 * step).collect();
            let rows = subconvexity_scan(&lookup(form)?, &grid, M0Rule::TwoThirds)?
                .into_iter()
                .map(|r| {
                    vec![
                        num(r.t),
                        num(r.re_l),
                        num(r.im_l),
                        num(r.abs_l),
                        num(r.weyl_ratio),
                        num(r.convexity_ratio),
                        num(r.conductor),
                        json!(r.x_trunc),
                    ]
                })
                .collect();
            Ok(Output::Table {
                columns: vec!["t", "re_L", "im_L", "abs_L", "weyl_ratio", "convexity_ratio", "C", "X_trunc"],
                rows,
            })
        }
    }
}

/// L(1/2 + it) as Λ(s)/Γ_C(s + (k−1)/2).
fn completed_route(spec: &NewformSpec, t: f64) -> Result<Complex64> {
    let s = Complex64::new(0.5, t);
    let w = s + (spec.weight as f64 - 1.0) / 2.0;
    Ok(completed_lambda(spec, s)? / gamma_c(w)?)
}
