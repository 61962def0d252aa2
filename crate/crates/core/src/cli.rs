//! Command-line front end.
//!
//! Every subcommand produces one document. JSON output carries
//! `"schema_version": 1`, complex numbers are `{"re": .., "im": ..}` and all
//! floating-point values are written with 17 significant digits.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map, Number, Value};

use crate::cfrac::cf_ratio_eval;
use crate::cfrac::{
    approximant, c_coeff, d_coeff, jacobi_coeffs, moment_oracle, offdiag_roots, FractionKind, RootPolicy,
};
use crate::classify::{
    build_h, h_m_function, kappa_certificate, leading_block_signature, quadrature, schur_chain, sign_signature,
    stieltjes_check, SignSignature, DEFAULT_SCAN_LIMIT,
};
use crate::error::{Error, Result};
use crate::hyp::{ratio_series, validate_params, HypParams};
use crate::spectral::{b_function, band_distance, discrete_spectrum, spectral_to_hyp, Method, SpectralResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const CSV_HELP: &str = "\
CSV columns:
  eval      z_re,z_im,cf_re,cf_im,resolvent_re,resolvent_im,difference,methods_agree
  coeffs    kind,index,re,im            (kind: c, d, a, b2)
  spectrum  re,im,distance
  zeros     function,re,im              (function: shifted, numerator)
  classify  index,epsilon,b2,btilde
  measure   node,weight
  check     name,status,value,limit
  sweep     line,a_re,a_im,b_re,b_im,c_re,c_im,status,n_eigenvalues,distance_sum,trace_bound,holds,kappa

Exit codes: 0 success, 2 invalid input, 3 numerical failure or failed check.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hypjac", version, about = "Hypergeometric continued fractions, Jacobi matrices and their spectra", after_help = CSV_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Parameter a, as "re" or "re,im"
    #[arg(short = 'a', global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Parameter b, as "re" or "re,im"
    #[arg(short = 'b', global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Parameter c, as "re" or "re,im"
    #[arg(short = 'c', global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Tolerance in [1e-14, 1e-2]
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Truncation order in [8, 8192]
    #[arg(long = "N", global = true, default_value_t = 256)]
    pub n: usize,
    /// Master seed for randomized checks
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the document here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// B at --z by the continued fraction and by truncated resolvents
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// C-fraction and J-fraction coefficient tables up to order N
    Coeffs,
    /// Discrete spectrum off [-2, 2] with the Lieb-Thirring data
    Spectrum,
    /// Zeros of F(a, b+1, c+1; .) and F(a, b, c; .) off [1, inf)
    Zeros,
    /// Sign signature, index kappa and randomized kernel certificate
    Classify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        samples: usize,
    },
    /// Gauss quadrature of the spectral measure (classical case)
    Measure,
    /// Invariant suite on one triple
    Check,
    /// Spectrum and signature for every "a b c" line of a manifest
    Sweep {
        #[arg(long)]
        manifest: PathBuf,
    },
}

/// One failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            },
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_VALIDATION,
        message: message.into(),
    }
}

/// Rows of a CSV document.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Document {
    json: Value,
    table: Table,
    code: i32,
}

pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |t: &str| f64::from_str(t).map_err(|_| format!("cannot parse {t:?} as a number"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(format!("expected \"re\" or \"re,im\", got {s:?}")),
    }
}

pub fn fmt_f64(x: f64) -> String {
    let s = format!("{:.16e}", x + 0.0);
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_f64(x)).expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

fn cnum(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

fn cnums(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|z| cnum(*z)).collect())
}

fn params_json(p: &HypParams) -> Value {
    json!({ "a": cnum(p.a), "b": cnum(p.b), "c": cnum(p.c) })
}

fn header(subcommand: &str, p: Option<&HypParams>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("subcommand".into(), json!(subcommand));
    if let Some(p) = p {
        m.insert("params".into(), params_json(p));
    }
    m
}

fn params_from(cli: &Cli) -> std::result::Result<HypParams, Failure> {
    let get = |name: &str, v: &Option<String>| -> std::result::Result<Complex64, Failure> {
        let s = v
            .as_deref()
            .ok_or_else(|| invalid(format!("missing parameter -{name}")))?;
        parse_complex(s).map_err(|e| invalid(format!("parameter -{name}: {e}")))
    };
    Ok(validate_params(
        get("a", &cli.a)?,
        get("b", &cli.b)?,
        get("c", &cli.c)?,
    )?)
}

fn spectrum_json(m: &mut Map<String, Value>, s: &SpectralResult) {
    m.insert("eigenvalues".into(), cnums(&s.eigenvalues));
    m.insert(
        "clusters".into(),
        Value::Array(
            s.clusters
                .iter()
                .map(|c| json!({ "center": cnum(c.center), "multiplicity": c.multiplicity }))
                .collect(),
        ),
    );
    m.insert("distance_sum".into(), num(s.distance_sum));
    m.insert("trace_bound".into(), num(s.trace_bound));
    m.insert("holds".into(), json!(s.distance_sum <= s.trace_bound + 1e-9));
    m.insert("n_used".into(), json!(s.n_used));
    m.insert("n_check".into(), json!(s.n_check));
    m.insert("discarded".into(), cnums(&s.discarded));
    m.insert("max_residual".into(), num(s.max_residual));
    m.insert("terminated".into(), json!(s.terminated));
}

fn cmd_eval(cli: &Cli, z: &str) -> std::result::Result<Document, Failure> {
    let p = params_from(cli)?;
    let z = parse_complex(z).map_err(|e| invalid(format!("--z: {e}")))?;
    let cf = b_function(&p, z, Method::Cf, cli.tol)?;
    let resolvent = b_function(&p, z, Method::Resolvent, cli.tol);
    let mut m = header("eval", Some(&p));
    m.insert("z".into(), cnum(z));
    m.insert("value".into(), cnum(cf));
    m.insert("cf".into(), cnum(cf));
    let (diff, agree, res_row) = match &resolvent {
        Ok(r) => {
            let diff = (cf - r).norm();
            let agree = diff <= 10.0 * cli.tol * cf.norm().max(1.0);
            m.insert("resolvent".into(), cnum(*r));
            (num(diff), agree, [fmt_f64(r.re), fmt_f64(r.im), fmt_f64(diff)])
        }
        Err(e) => {
            m.insert("resolvent".into(), Value::Null);
            m.insert("resolvent_error".into(), json!(e.to_string()));
            (Value::Null, false, [String::new(), String::new(), String::new()])
        }
    };
    m.insert("difference".into(), diff);
    m.insert("methods_agree".into(), json!(agree));
    let [rr, ri, d] = res_row;
    let row = vec![
        fmt_f64(z.re),
        fmt_f64(z.im),
        fmt_f64(cf.re),
        fmt_f64(cf.im),
        rr,
        ri,
        d,
        agree.to_string(),
    ];
    Ok(Document {
        json: Value::Object(m),
        table: Table {
            header: vec![
                "z_re",
                "z_im",
                "cf_re",
                "cf_im",
                "resolvent_re",
                "resolvent_im",
                "difference",
                "methods_agree",
            ],
            rows: vec![row],
        },
        code: EXIT_OK,
    })
}

fn cmd_coeffs(cli: &Cli) -> std::result::Result<Document, Failure> {
    let p = params_from(cli)?;
    let n = cli.n;
    let jc = offdiag_roots(jacobi_coeffs(&p, n), RootPolicy::Principal);
    let cs: Vec<Complex64> = (1..=2 * n + 1).map(|j| c_coeff(&p, j)).collect();
    let ds: Vec<Complex64> = cs.iter().map(|c| -c).collect();
    let mut m = header("coeffs", Some(&p));
    m.insert("c".into(), cnums(&cs));
    m.insert("d".into(), cnums(&ds));
    m.insert("a".into(), cnums(&jc.diag));
    m.insert("b_squared".into(), cnums(&jc.offdiag_sq));
    m.insert("b".into(), cnums(&jc.offdiag));
    m.insert("terminated_at".into(), json!(jc.terminated_at));
    let mut rows = Vec::new();
    let mut push = |kind: &str, first: usize, vals: &[Complex64]| {
        for (i, v) in vals.iter().enumerate() {
            rows.push(vec![
                kind.to_string(),
                (first + i).to_string(),
                fmt_f64(v.re),
                fmt_f64(v.im),
            ]);
        }
    };
    push("c", 1, &cs);
    push("d", 1, &ds);
    push("a", 0, &jc.diag);
    push("b2", 0, &jc.offdiag_sq);
    Ok(Document {
        json: Value::Object(m),
        table: Table {
            header: vec!["kind", "index", "re", "im"],
            rows,
        },
        code: EXIT_OK,
    })
}

fn cmd_spectrum(cli: &Cli) -> std::result::Result<Document, Failure> {
    let p = params_from(cli)?;
    let s = discrete_spectrum(&p, cli.n, cli.tol)?;
    let mut m = header("spectrum", Some(&p));
    spectrum_json(&mut m, &s);
    let rows = s
        .eigenvalues
        .iter()
        .map(|l| vec![fmt_f64(l.re), fmt_f64(l.im), fmt_f64(band_distance(*l))])
        .collect();
    Ok(Document {
        json: Value::Object(m),
        table: Table {
            header: vec!["re", "im", "distance"],
            rows,
        },
        code: EXIT_OK,
    })
}

fn cmd_zeros(cli: &Cli) -> std::result::Result<Document, Failure> {
    let p = params_from(cli)?;
    let s = discrete_spectrum(&p, cli.n, cli.tol)?;
    let zeros: Vec<Complex64> = s.eigenvalues.iter().map(|l| spectral_to_hyp(*l)).collect();
    let numerator = match p.shifted(0.0, -1.0, -1.0) {
        Ok(q) => {
            let sq = discrete_spectrum(&q, cli.n, cli.tol)?;
            Some(sq.eigenvalues.iter().map(|l| spectral_to_hyp(*l)).collect::<Vec<_>>())
        }
        Err(_) => None,
    };
    let mut m = header("zeros", Some(&p));
    m.insert("eigenvalues".into(), cnums(&s.eigenvalues));
    m.insert("zeros".into(), cnums(&zeros));
    m.insert(
        "numerator_zeros".into(),
        numerator.as_deref().map_or(Value::Null, cnums),
    );
    let mut rows: Vec<Vec<String>> = zeros
        .iter()
        .map(|w| vec!["shifted".into(), fmt_f64(w.re), fmt_f64(w.im)])
        .collect();
    for w in numerator.iter().flatten() {
        rows.push(vec!["numerator".into(), fmt_f64(w.re), fmt_f64(w.im)]);
    }
    Ok(Document {
        json: Value::Object(m),
        table: Table {
            header: vec!["function", "re", "im"],
            rows,
        },
        code: EXIT_OK,
    })
}

fn signature_or_block(p: &HypParams) -> Result<SignSignature> {
    match sign_signature(p, DEFAULT_SCAN_LIMIT) {
        Err(Error::Terminating { .. }) => leading_block_signature(p, DEFAULT_SCAN_LIMIT),
        other => other,
    }
}

fn cmd_classify(cli: &Cli, trials: usize, samples: usize) -> std::result::Result<Document, Failure> {
    let p = params_from(cli)?;
    if samples == 0 {
        return Err(invalid("--samples must be positive"));
    }
    let stieltjes = stieltjes_check(&p)?;
    let sig = signature_or_block(&p)?;
    let cert = kappa_certificate(&p, trials, samples, cli.seed)?;
    let mut m = header("classify", Some(&p));
    m.insert("stieltjes".into(), json!(stieltjes));
    m.insert("N".into(), json!(sig.n));
    m.insert("kappa".into(), json!(sig.kappa));
    m.insert("epsilons".into(), json!(sig.epsilons));
    m.insert(
        "b_squared".into(),
        Value::Array(sig.offdiag_sq.iter().map(|x| num(*x)).collect()),
    );
    m.insert(
        "btilde".into(),
        Value::Array(sig.btilde.iter().map(|x| num(*x)).collect()),
    );
    m.insert("terminated_at".into(), json!(sig.terminated_at));
    m.insert(
        "certificate".into(),
        json!({
            "trials": trials,
            "sample_size": samples,
            "seed": cli.seed,
            "kappa_bound_ok": cert.kappa_bound_ok,
            "max_negatives_seen": cert.max_negatives_seen,
            "counts": cert.counts,
        }),
    );
    let rows = sig
        .epsilons
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let b2 = sig.offdiag_sq.get(j).map_or(String::new(), |x| fmt_f64(*x));
            let bt = sig.btilde.get(j).map_or(String::new(), |x| fmt_f64(*x));
            vec![j.to_string(), e.to_string(), b2, bt]
        })
        .collect();
    Ok(Document {
        json: Value::Object(m),
        table: Table {
            header: vec!["index", "epsilon", "b2", "btilde"],
            rows,
        },
        code: if cert.kappa_bound_ok { EXIT_OK } else { EXIT_NUMERICAL },
    })
}

fn cmd_measure(cli: &Cli) -> std::result::Result<Document, Failure> {
    let p = params_from(cli)?;
    let q = quadrature(&p, cli.n)?;
    let mut m = header("measure", Some(&p));
    m.insert("order".into(), json!(q.order));
    m.insert("nodes".into(), Value::Array(q.nodes.iter().map(|x| num(*x)).collect()));
    m.insert(
        "weights".into(),
        Value::Array(q.weights.iter().map(|x| num(*x)).collect()),
    );
    let rows = q
        .nodes
        .iter()
        .zip(&q.weights)
        .map(|(t, w)| vec![fmt_f64(*t), fmt_f64(*w)])
        .collect();
    Ok(Document {
        json: Value::Object(m),
        table: Table {
            header: vec!["node", "weight"],
            rows,
        },
        code: EXIT_OK,
    })
}

/// Outcome of one invariant in the `check` suite.
struct CheckOutcome {
    name: &'static str,
    status: &'static str,
    value: Option<f64>,
    limit: Option<f64>,
    message: Option<String>,
}

fn measured(name: &'static str, value: Result<f64>, limit: f64) -> CheckOutcome {
    match value {
        Ok(v) => CheckOutcome {
            name,
            status: if v <= limit { "pass" } else { "fail" },
            value: Some(v),
            limit: Some(limit),
            message: None,
        },
        Err(e) => CheckOutcome {
            name,
            status: "fail",
            value: None,
            limit: Some(limit),
            message: Some(e.to_string()),
        },
    }
}

fn skipped(name: &'static str, why: &str) -> CheckOutcome {
    CheckOutcome {
        name,
        status: "skip",
        value: None,
        limit: None,
        message: Some(why.to_string()),
    }
}

fn rel(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / y.norm().max(1e-300)
}

const OFF_BAND: [Complex64; 4] = [
    Complex64::new(3.0, 1.0),
    Complex64::new(-2.5, 0.5),
    Complex64::new(0.5, 2.0),
    Complex64::new(-1.0, -1.5),
];

fn run_checks(p: &HypParams, n: usize) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let disk = [
        Complex64::new(0.3, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(-0.6, 0.2),
        Complex64::new(0.45, -0.55),
    ];
    out.push(measured(
        "cf_matches_series",
        disk.iter().try_fold(0.0f64, |acc, z| {
            let cf = cf_ratio_eval(p, *z, 1e-15, 1 << 20)?.value;
            Ok(acc.max(rel(cf, ratio_series(p, *z, 1e-16)?)))
        }),
        1e-10,
    ));
    out.push(measured(
        "methods_agree",
        OFF_BAND.iter().try_fold(0.0f64, |acc, z| {
            let cf = b_function(p, *z, Method::Cf, 1e-14)?;
            let res = b_function(p, *z, Method::Resolvent, 1e-14)?;
            Ok(acc.max((cf - res).norm() / cf.norm().max(1.0)))
        }),
        1e-8,
    ));
    out.push(measured(
        "moments_match_coefficients",
        (|| {
            let s = moment_oracle(p, 2)?;
            let jc = jacobi_coeffs(p, 2);
            let s1 = jc.diag[0];
            let s2 = jc.diag[0] * jc.diag[0] + jc.offdiag_sq.first().copied().unwrap_or_default();
            Ok((s[0] - 1.0).norm().max((s[1] - s1).norm()).max((s[2] - s2).norm()) / s[2].norm().max(1.0))
        })(),
        1e-12,
    ));
    out.push(measured(
        "even_part_identity",
        OFF_BAND.iter().try_fold(0.0f64, |acc, z| {
            let nn = 10;
            let j = approximant(p, FractionKind::JFraction, nn, *z)?;
            let s = approximant(p, FractionKind::SFraction, 2 * nn, (z - 2.0) / 4.0)?;
            Ok(acc.max(rel(j, -(s - 1.0) / (4.0 * d_coeff(p, 1)))))
        }),
        1e-12,
    ));
    let spectrum = discrete_spectrum(p, n, 1e-8);
    out.push(measured(
        "lieb_thirring",
        spectrum
            .as_ref()
            .map(|s| s.distance_sum - s.trace_bound)
            .map_err(Clone::clone),
        1e-9,
    ));
    if !p.is_real {
        for name in [
            "conjugate_symmetry",
            "stieltjes_positivity",
            "non_real_pole_budget",
            "schur_chain",
            "g_symmetry",
            "h_m_function",
        ] {
            out.push(skipped(name, "complex parameters"));
        }
        return out;
    }
    out.push(measured(
        "conjugate_symmetry",
        OFF_BAND.iter().try_fold(0.0f64, |acc, z| {
            let v = b_function(p, *z, Method::Cf, 1e-14)?;
            let w = b_function(p, z.conj(), Method::Cf, 1e-14)?;
            Ok(acc.max((v.conj() - w).norm() / v.norm().max(1.0)))
        }),
        1e-12,
    ));
    match stieltjes_check(p) {
        Ok(true) => out.push(measured(
            "stieltjes_positivity",
            [-3.0, -1.0, 0.0, 1.5, 3.0].iter().try_fold(0.0f64, |acc, x| {
                let b = b_function(p, Complex64::new(*x, 0.5), Method::Cf, 1e-14)?;
                Ok(acc.max(-b.im))
            }),
            1e-12,
        )),
        _ => out.push(skipped("stieltjes_positivity", "classical condition not satisfied")),
    }
    let sig = signature_or_block(p);
    out.push(measured(
        "non_real_pole_budget",
        match (&sig, &spectrum) {
            (Ok(sig), Ok(s)) => {
                let non_real = s.eigenvalues.iter().filter(|l| l.im != 0.0).count();
                Ok(non_real as f64 - 2.0 * sig.kappa as f64)
            }
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        },
        0.0,
    ));
    out.push(measured(
        "schur_chain",
        OFF_BAND.iter().try_fold(0.0f64, |acc, z| {
            let eps0 = f64::from(signature_or_block(p)?.epsilon(0));
            let chain = schur_chain(p, *z, 1e-15)?;
            let b = b_function(p, *z, Method::Cf, 1e-15)?;
            Ok(acc.max((chain - eps0 * b).norm() / b.norm().max(1.0)))
        }),
        1e-10,
    ));
    out.push(measured(
        "g_symmetry",
        build_h(p, n).map(|h| h.g_symmetry_residual() / h.norm().max(1e-300)),
        1e-15,
    ));
    out.push(measured(
        "h_m_function",
        (|| {
            let z = Complex64::new(3.0, 2.0);
            let eps0 = f64::from(signature_or_block(p)?.epsilon(0));
            let b = b_function(p, z, Method::Cf, 1e-15)?;
            let h = h_m_function(p, z, 2 * n)?;
            Ok((h - eps0 * b).norm() / b.norm().max(1.0))
        })(),
        1e-9,
    ));
    out
}

fn cmd_check(cli: &Cli) -> std::result::Result<Document, Failure> {
    let p = params_from(cli)?;
    let outcomes = run_checks(&p, cli.n);
    let all_pass = outcomes.iter().all(|o| o.status != "fail");
    let mut m = header("check", Some(&p));
    m.insert("all_pass".into(), json!(all_pass));
    m.insert(
        "checks".into(),
        Value::Array(
            outcomes
                .iter()
                .map(|o| {
                    let mut c = Map::new();
                    c.insert("name".into(), json!(o.name));
                    c.insert("status".into(), json!(o.status));
                    c.insert("value".into(), o.value.map_or(Value::Null, num));
                    c.insert("limit".into(), o.limit.map_or(Value::Null, num));
                    if let Some(msg) = &o.message {
                        c.insert("message".into(), json!(msg));
                    }
                    Value::Object(c)
                })
                .collect(),
        ),
    );
    let opt = |x: Option<f64>| x.map_or(String::new(), fmt_f64);
    let rows = outcomes
        .iter()
        .map(|o| vec![o.name.to_string(), o.status.to_string(), opt(o.value), opt(o.limit)])
        .collect();
    Ok(Document {
        json: Value::Object(m),
        table: Table {
            header: vec!["name", "status", "value", "limit"],
            rows,
        },
        code: if all_pass { EXIT_OK } else { EXIT_NUMERICAL },
    })
}

/// Parses a sweep manifest into `(line number, a, b, c)` records.
pub fn parse_manifest(text: &str) -> std::result::Result<Vec<(usize, [Complex64; 3])>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(format!("line {}: expected three fields \"a b c\"", i + 1));
        }
        let mut vals = [Complex64::default(); 3];
        for (v, f) in vals.iter_mut().zip(&fields) {
            *v = parse_complex(f).map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        out.push((i + 1, vals));
    }
    Ok(out)
}

fn cmd_sweep(cli: &Cli, manifest: &PathBuf) -> std::result::Result<Document, Failure> {
    let text = std::fs::read_to_string(manifest)
        .map_err(|e| invalid(format!("cannot read manifest {}: {e}", manifest.display())))?;
    let records = parse_manifest(&text).map_err(invalid)?;
    let (n, tol) = (cli.n, cli.tol);
    let results: Vec<(Value, Vec<String>)> = records
        .par_iter()
        .map(|(line, [a, b, c])| sweep_record(*line, *a, *b, *c, n, tol))
        .collect();
    let mut m = header("sweep", None);
    m.insert("N".into(), json!(n));
    m.insert(
        "records".into(),
        Value::Array(results.iter().map(|r| r.0.clone()).collect()),
    );
    Ok(Document {
        json: Value::Object(m),
        table: Table {
            header: vec![
                "line",
                "a_re",
                "a_im",
                "b_re",
                "b_im",
                "c_re",
                "c_im",
                "status",
                "n_eigenvalues",
                "distance_sum",
                "trace_bound",
                "holds",
                "kappa",
            ],
            rows: results.into_iter().map(|r| r.1).collect(),
        },
        code: EXIT_OK,
    })
}

fn sweep_record(line: usize, a: Complex64, b: Complex64, c: Complex64, n: usize, tol: f64) -> (Value, Vec<String>) {
    let mut m = Map::new();
    m.insert("line".into(), json!(line));
    m.insert("params".into(), json!({ "a": cnum(a), "b": cnum(b), "c": cnum(c) }));
    let mut row = vec![line.to_string()];
    for z in [a, b, c] {
        row.push(fmt_f64(z.re));
        row.push(fmt_f64(z.im));
    }
    let outcome = validate_params(a, b, c).and_then(|p| {
        let s = discrete_spectrum(&p, n, tol)?;
        let kappa = if p.is_real {
            signature_or_block(&p).ok().map(|s| s.kappa)
        } else {
            None
        };
        Ok((s, kappa))
    });
    match outcome {
        Ok((s, kappa)) => {
            m.insert("status".into(), json!("ok"));
            spectrum_json(&mut m, &s);
            m.insert("kappa".into(), json!(kappa));
            row.extend([
                "ok".to_string(),
                s.eigenvalues.len().to_string(),
                fmt_f64(s.distance_sum),
                fmt_f64(s.trace_bound),
                (s.distance_sum <= s.trace_bound + 1e-9).to_string(),
                kappa.map_or(String::new(), |k| k.to_string()),
            ]);
        }
        Err(e) => {
            m.insert("status".into(), json!("error"));
            m.insert("error".into(), json!(e.to_string()));
            row.extend([
                "error".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
    }
    (Value::Object(m), row)
}

fn render(doc: &Document, format: Format) -> std::result::Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc.json).map_err(|e| Failure {
                code: EXIT_NUMERICAL,
                message: e.to_string(),
            })?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| Failure {
                code: EXIT_NUMERICAL,
                message: e.to_string(),
            };
            w.write_record(&doc.table.header).map_err(io_err)?;
            for row in &doc.table.rows {
                w.write_record(row).map_err(io_err)?;
            }
            w.into_inner().map_err(|e| Failure {
                code: EXIT_NUMERICAL,
                message: e.to_string(),
            })
        }
    }
}

fn execute(cli: &Cli) -> std::result::Result<Document, Failure> {
    if !(1e-14..=1e-2).contains(&cli.tol) {
        return Err(invalid(format!("--tol {} outside [1e-14, 1e-2]", cli.tol)));
    }
    if !(8..=8192).contains(&cli.n) {
        return Err(invalid(format!("--N {} outside [8, 8192]", cli.n)));
    }
    match &cli.command {
        Command::Eval { z } => cmd_eval(cli, z),
        Command::Coeffs => cmd_coeffs(cli),
        Command::Spectrum => cmd_spectrum(cli),
        Command::Zeros => cmd_zeros(cli),
        Command::Classify { trials, samples } => cmd_classify(cli, *trials, *samples),
        Command::Measure => cmd_measure(cli),
        Command::Check => cmd_check(cli),
        Command::Sweep { manifest } => cmd_sweep(cli, manifest),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return match e.exit_code() {
                0 => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
        }
    };
    let result = execute(&cli).and_then(|doc| Ok((render(&doc, cli.format)?, doc.code)));
    match result {
        Ok((bytes, code)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &bytes),
                None => stdout.write_all(&bytes),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_VALIDATION;
            }
            if code != EXIT_OK {
                let _ = writeln!(stderr, "error: a check failed (see output)");
            }
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
