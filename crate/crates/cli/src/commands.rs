use serde::Serialize;
use serde_json::{json, Map, Value};
use symlab_core::rational::grid;
use symlab_core::{
    certificate_bound, simulate_embedding, simulate_ito_identity, solve_symmetrizer,
    verify_certificate, verify_conditioning, DiscreteDist, Error, Rational, SymmetrizerProblem,
};

use crate::args::{Command, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_INVALID_CONFIG: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;

/// A failed run: exit code plus the message for standard error. Some
/// failures (an infeasible grid) still carry a JSON document.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    pub document: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible => EXIT_INFEASIBLE,
            Error::SolverInconsistency(_) | Error::CyclingSuspected(_) => EXIT_SOLVER,
            _ => EXIT_INVALID_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
            document: None,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn document(cfg: &RunConfig, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA_VERSION));
    out.insert("command".into(), json!(cfg.command.name()));
    out.insert("p".into(), to_value(&cfg.p));
    if let Value::Object(fields) = body {
        out.extend(fields);
    }
    Value::Object(out)
}

fn p_f64(cfg: &RunConfig) -> f64 {
    cfg.p.to_f64()
}

fn is_fair(cfg: &RunConfig) -> bool {
    cfg.p == Rational::new(1, 2).expect("valid fraction")
}

fn solve(cfg: &RunConfig) -> Result<Value, Failure> {
    let x = DiscreteDist::bernoulli(cfg.p)?;
    let y_grid = grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_step)?;
    let prob = SymmetrizerProblem::new(x, y_grid)?;
    let grid_info = json!({
        "lo": to_value(&cfg.grid_lo),
        "hi": to_value(&cfg.grid_hi),
        "step": to_value(&cfg.grid_step),
    });
    match solve_symmetrizer(&prob) {
        Ok(sol) => {
            let mut body = to_value(&sol);
            body["grid"] = grid_info;
            Ok(body)
        }
        Err(Error::Infeasible) => Err(Failure {
            code: EXIT_INFEASIBLE,
            message: Error::Infeasible.to_string(),
            document: Some(json!({ "status": "Infeasible", "grid": grid_info })),
        }),
        Err(e) => Err(e.into()),
    }
}

fn certify(cfg: &RunConfig) -> Result<Value, Failure> {
    let p = p_f64(cfg);
    let bound = certificate_bound(p)?;
    let report = verify_certificate(cfg.samples, cfg.sim.seed, p)?;
    Ok(json!({
        "bound": bound,
        "pq": p * (1.0 - p),
        // at p = 1/2 the bound degenerates; the minimum variance there is 0
        "applies": !is_fair(cfg),
        "report": to_value(&report),
        "max_violation": report.max_violation(),
    }))
}

fn verify_rho(cfg: &RunConfig) -> Result<Value, Failure> {
    let report = verify_certificate(cfg.samples, cfg.sim.seed, p_f64(cfg))?;
    let mut body = to_value(&report);
    body["max_violation"] = json!(report.max_violation());
    Ok(body)
}

fn embed(cfg: &RunConfig) -> Result<Value, Failure> {
    let target = DiscreteDist::bernoulli(cfg.p)?.negate().center()?;
    let report = simulate_embedding(&target, &cfg.sim)?;
    let mut body = to_value(&report);
    body["sim"] = to_value(&cfg.sim);
    Ok(body)
}

fn ito(cfg: &RunConfig) -> Result<Value, Failure> {
    let p = p_f64(cfg);
    let q = 1.0 - p;
    let report = simulate_ito_identity(p, &cfg.sim)?;
    let conditioning = verify_conditioning(p, &cfg.sim)?;
    // -E[rho(B_0)] = -(p rho(q) + q rho(-p))
    let expected_lhs = -(p * symlab_core::rho(q)? + q * symlab_core::rho(-p)?);

    let mut ito = to_value(&report);
    ito["expected_lhs"] = json!(expected_lhs);
    ito["tolerance"] = json!(report.tolerance());
    ito["sides_agree"] = json!(report.sides_agree());
    ito["valid"] = json!(report.is_valid());
    let mut cond = to_value(&conditioning);
    cond["passes"] = json!(conditioning.passes(3.0));
    Ok(json!({ "ito": ito, "conditioning": cond, "sim": to_value(&cfg.sim) }))
}

fn all(cfg: &RunConfig) -> Result<Value, Failure> {
    let solved = solve(cfg)?;
    let certificate = certify(cfg)?;
    let embedding = embed(cfg)?;
    let ito = ito(cfg)?;
    let bound = if is_fair(cfg) {
        Value::Null
    } else {
        certificate["bound"].clone()
    };
    let headline = json!({
        "lp_variance": solved["variance"],
        "certificate_bound": bound,
        "simulated_e_tau": embedding["mean_tau"],
    });
    Ok(json!({
        "headline": headline,
        "solve": solved,
        "certificate": certificate,
        "embedding": embedding,
        "ito": ito["ito"],
        "conditioning": ito["conditioning"],
    }))
}

/// Runs one command and returns its JSON document.
pub fn run(cfg: &RunConfig) -> Result<Value, Failure> {
    let body = match cfg.command {
        Command::Solve => solve(cfg),
        Command::Certify => certify(cfg),
        Command::Embed => embed(cfg),
        Command::Ito => ito(cfg),
        Command::VerifyRho => verify_rho(cfg),
        Command::All => all(cfg),
    };
    match body {
        Ok(body) => Ok(document(cfg, body)),
        Err(mut f) => {
            f.document = f.document.take().map(|d| document(cfg, d));
            Err(f)
        }
    }
}

/// Flattens a JSON document into aligned `path  value` lines.
pub fn render_table(doc: &Value) -> String {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, child, rows);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), child, rows);
                }
            }
            Value::String(s) => rows.push((prefix.to_string(), s.clone())),
            other => rows.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", doc, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}
