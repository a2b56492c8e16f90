//! Dispatch from command names to core operations.

use std::collections::BTreeMap;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qwx_core::hall::{verify_fi, verify_log_lemma};
use qwx_core::rational;
use qwx_core::rep::hom_complex;
use qwx_core::stability::{chamber_decomposition, critical_values};
use qwx_core::wallcross::{cross_all_walls, enforce_genus_vanishing, invert_wall, wall_correction, FramedValues};
use qwx_core::{InvariantTable, NumericalClass, Rational};

use crate::document::{InputError, Problem};
use crate::render::TextTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Euler,
    Ext,
    Critical,
    Chambers,
    VerifyHall,
    Wallcross,
    Invert,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Euler => "euler",
            Command::Ext => "ext",
            Command::Critical => "critical",
            Command::Chambers => "chambers",
            Command::VerifyHall => "verify-hall",
            Command::Wallcross => "wallcross",
            Command::Invert => "invert",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    VerificationFailed,
}

impl Status {
    /// Process exit code: 0 for success, 2 for a failed verification.
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 2,
        }
    }
}

/// Exit code for input errors of any kind.
pub const INPUT_ERROR_EXIT: u8 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input_sha256: String,
    pub status: Status,
    pub payload: Value,
    #[serde(skip)]
    pub tables: Vec<TextTable>,
}

impl ResultDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result documents serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}: {}\n", self.tool, self.command, match self.status {
            Status::Ok => "ok",
            Status::VerificationFailed => "VERIFICATION FAILED",
        });
        for t in &self.tables {
            out.push('\n');
            out.push_str(&t.render());
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `run.tau_max` from the document.
    pub tau_max: Option<Rational>,
}

fn q(x: &Rational) -> String {
    rational::format(x)
}

fn input_hash(problem: &Problem) -> String {
    let canonical = serde_json::to_vec(&problem.doc).expect("documents serialize");
    Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
}

fn tau_max(problem: &Problem, opts: &RunOptions) -> Result<Rational, InputError> {
    let t = opts
        .tau_max
        .clone()
        .or_else(|| problem.doc.run.tau_max.as_ref().map(|t| t.0.clone()))
        .ok_or_else(|| InputError::new("MISSING_TAU_MAX", "run.tau_max", "give `--tau-max` or `run.tau_max`"))?;
    if t <= rational::int(0) {
        return Err(InputError::new("NON_POSITIVE_TAU", "--tau-max", format!("{} is not positive", q(&t))));
    }
    Ok(t)
}

fn tau0(problem: &Problem) -> Result<Rational, InputError> {
    problem
        .doc
        .run
        .tau0
        .as_ref()
        .map(|t| t.0.clone())
        .ok_or_else(|| InputError::new("MISSING_FIELD", "run.tau0", "this command needs `run.tau0`"))
}

fn values_json(problem: &Problem, values: &FramedValues) -> Value {
    Value::Object(values.iter().map(|(c, j)| (problem.name_of(c), json!(q(j)))).collect())
}

pub fn run_command(cmd: Command, problem: &Problem, opts: &RunOptions) -> Result<ResultDocument, InputError> {
    let (status, payload, tables) = match cmd {
        Command::Validate => validate(problem),
        Command::Euler => euler(problem)?,
        Command::Ext => ext(problem)?,
        Command::Critical => critical(problem, opts, false)?,
        Command::Chambers => critical(problem, opts, true)?,
        Command::VerifyHall => verify_hall(problem, opts)?,
        Command::Wallcross => wallcross(problem, opts)?,
        Command::Invert => invert(problem)?,
    };
    Ok(ResultDocument {
        tool: "qwx",
        version: env!("CARGO_PKG_VERSION"),
        command: cmd.name(),
        input_sha256: input_hash(problem),
        status,
        payload,
        tables,
    })
}

type Outcome = (Status, Value, Vec<TextTable>);

fn validate(problem: &Problem) -> Outcome {
    let q_ = problem.shape.quiver();
    let gauged: Vec<&str> = problem.shape.gauged().iter().map(|&v| q_.vertex_id(v)).collect();
    let mut classes = TextTable::new("classes", &["name", "class", "kind"]);
    let class_json: Vec<Value> = problem
        .classes
        .iter()
        .map(|(n, c)| {
            let kind = if c.is_framed() { "framed" } else { "unframed" };
            classes.row(vec![n.clone(), c.to_string(), kind.into()]);
            json!({ "name": n, "class": c.to_string(), "kind": kind })
        })
        .collect();
    let reps: Vec<Value> = problem
        .representations
        .iter()
        .map(|(n, r)| json!({ "name": n, "dims": r.dims(), "relation_holds": true }))
        .collect();
    let mut summary = TextTable::new("problem", &["item", "value"]);
    summary.row(vec!["vertices".into(), q_.vertex_count().to_string()]);
    summary.row(vec!["doubled arrows".into(), q_.arrow_count().to_string()]);
    summary.row(vec!["framing vertex".into(), q_.vertex_id(problem.shape.framing_vertex()).into()]);
    summary.row(vec!["genus".into(), problem.twist.genus.to_string()]);
    summary.row(vec!["dim K".into(), problem.framing.dim_k().to_string()]);
    summary.row(vec!["representations".into(), reps.len().to_string()]);
    let payload = json!({
        "vertices": q_.vertex_count(),
        "doubled_arrows": q_.arrow_count(),
        "gauged": gauged,
        "framing": q_.vertex_id(problem.shape.framing_vertex()),
        "genus": problem.twist.genus,
        "dim_k": problem.framing.dim_k(),
        "twist_pairing_holds": true,
        "classes": class_json,
        "representations": reps,
    });
    (Status::Ok, payload, vec![summary, classes])
}

fn euler(problem: &Problem) -> Result<Outcome, InputError> {
    let pairs: Vec<(String, String)> = if problem.doc.run.euler_pairs.is_empty() {
        let names: Vec<&String> = problem.classes.keys().collect();
        names
            .iter()
            .flat_map(|a| names.iter().filter(move |b| a != *b).map(move |b| ((*a).clone(), (*b).clone())))
            .collect()
    } else {
        problem.doc.run.euler_pairs.clone()
    };
    let ctx = problem.lie.euler();
    let mut table = TextTable::new("euler form", &["left", "right", "chi", "doubly framed"]);
    let mut rows = Vec::new();
    for (a, b) in &pairs {
        let (e, f) = (problem.class(a, "run.euler_pairs")?, problem.class(b, "run.euler_pairs")?);
        let v = ctx.euler_checked(e, f).map_err(|err| InputError::core("run.euler_pairs", &err))?;
        table.row(vec![a.clone(), b.clone(), v.value.to_string(), v.doubly_framed.to_string()]);
        rows.push(json!({ "left": a, "right": b, "chi": v.value, "doubly_framed": v.doubly_framed }));
    }
    Ok((Status::Ok, json!({ "pairs": rows }), vec![table]))
}

fn ext(problem: &Problem) -> Result<Outcome, InputError> {
    let pairs: Vec<(String, String)> = if problem.doc.run.ext_pairs.is_empty() {
        let names: Vec<&String> = problem.representations.keys().collect();
        names
            .iter()
            .flat_map(|a| names.iter().map(move |b| ((*a).clone(), (*b).clone())))
            .collect()
    } else {
        problem.doc.run.ext_pairs.clone()
    };
    let mut table = TextTable::new("hom and ext", &["left", "right", "hom", "ext1", "C0", "C1", "C2"]);
    let mut rows = Vec::new();
    for (a, b) in &pairs {
        let (v, w) = (&problem.representations[a], &problem.representations[b]);
        let cx = hom_complex(v, w).map_err(|e| InputError::core("run.ext_pairs", &e))?;
        let (hom, ext1) = cx.cohomology_dims();
        let (c0, c1, c2) = cx.dims();
        table.row([a.clone(), b.clone()].into_iter().chain([hom, ext1, c0, c1, c2].map(|x| x.to_string())).collect());
        rows.push(json!({ "left": a, "right": b, "hom": hom, "ext1": ext1, "complex": [c0, c1, c2] }));
    }
    Ok((Status::Ok, json!({ "pairs": rows }), vec![table]))
}

fn critical(problem: &Problem, opts: &RunOptions, with_chambers: bool) -> Result<Outcome, InputError> {
    let gamma = problem.gamma()?;
    let n = tau_max(problem, opts)?;
    let name = problem.doc.run.gamma.clone().unwrap_or_default();
    if !with_chambers {
        let walls = critical_values(gamma, &n).map_err(|e| InputError::core("run.gamma", &e))?;
        let mut table = TextTable::new(&format!("walls of {name} in (0, {}]", q(&n)), &["#", "tau"]);
        for (i, w) in walls.iter().enumerate() {
            table.row(vec![(i + 1).to_string(), q(w)]);
        }
        let payload = json!({
            "gamma": name,
            "class": gamma.to_string(),
            "tau_max": q(&n),
            "walls": walls.iter().map(q).collect::<Vec<_>>(),
        });
        return Ok((Status::Ok, payload, vec![table]));
    }
    let dec = chamber_decomposition(gamma, &n).map_err(|e| InputError::core("run.gamma", &e))?;
    let mut table = TextTable::new(&format!("chambers of {name} in (0, {}]", q(&n)), &["#", "lower", "upper", "representative"]);
    let chambers: Vec<Value> = dec
        .chambers
        .iter()
        .enumerate()
        .map(|(i, c)| {
            table.row(vec![(i + 1).to_string(), q(&c.lower), q(&c.upper), q(&c.representative)]);
            json!({ "lower": q(&c.lower), "upper": q(&c.upper), "representative": q(&c.representative) })
        })
        .collect();
    let payload = json!({
        "gamma": name,
        "class": gamma.to_string(),
        "tau_max": q(&n),
        "walls": dec.walls.iter().map(q).collect::<Vec<_>>(),
        "chambers": chambers,
    });
    Ok((Status::Ok, payload, vec![table]))
}

fn verify_hall(problem: &Problem, opts: &RunOptions) -> Result<Outcome, InputError> {
    let gamma = problem.gamma()?;
    let support = problem.support()?;
    let walls = match &problem.doc.run.tau0 {
        Some(t) => vec![t.0.clone()],
        None => critical_values(gamma, &tau_max(problem, opts)?).map_err(|e| InputError::core("run.gamma", &e))?,
    };
    let core = |e: qwx_core::Error| InputError::core("run", &e);
    let mut table = TextTable::new(
        "identity checks",
        &["tau0", "fi2+", "fi2-", "fi3", "log", "tau-", "tau+", "log terms"],
    );
    let mut all = true;
    let mut rows = Vec::new();
    let mark = |b: bool| if b { "pass" } else { "FAIL" }.to_string();
    for t in &walls {
        let fi = verify_fi(gamma, t, &support, &problem.framing).map_err(core)?;
        let log = verify_log_lemma(gamma, t, &support, &problem.framing).map_err(core)?;
        all &= fi.holds() && log.holds();
        table.row(vec![
            q(t),
            mark(fi.fi2_plus.holds()),
            mark(fi.fi2_minus.holds()),
            mark(fi.fi3.holds()),
            mark(log.holds()),
            q(&log.tau_minus),
            q(&log.tau_plus),
            format!("{}/{}", log.identity.lhs_terms, log.identity.rhs_terms),
        ]);
        let check = |c: &qwx_core::hall::IdentityCheck| {
            json!({ "holds": c.holds(), "lhs_terms": c.lhs_terms, "rhs_terms": c.rhs_terms })
        };
        rows.push(json!({
            "tau0": q(t),
            "fi2_plus": check(&fi.fi2_plus),
            "fi2_minus": check(&fi.fi2_minus),
            "fi3": check(&fi.fi3),
            "log_lemma": {
                "holds": log.holds(),
                "tau_minus": q(&log.tau_minus),
                "tau_plus": q(&log.tau_plus),
                "lhs_terms": log.identity.lhs_terms,
                "rhs_terms": log.identity.rhs_terms,
            },
        }));
    }
    let payload = json!({
        "gamma": problem.doc.run.gamma,
        "class": gamma.to_string(),
        "support": support.classes().iter().map(|c| problem.name_of(c)).collect::<Vec<_>>(),
        "walls": rows,
    });
    let status = if all { Status::Ok } else { Status::VerificationFailed };
    Ok((status, payload, vec![table]))
}

fn wallcross(problem: &Problem, opts: &RunOptions) -> Result<Outcome, InputError> {
    let gamma = problem.gamma()?;
    let n = tau_max(problem, opts)?;
    let table = InvariantTable::new(problem.support_table()?).map_err(|e| InputError::core("run.support", &e))?;
    let rule = enforce_genus_vanishing(&table, &problem.twist);
    let unframed = rule.table.unframed;

    let dec = chamber_decomposition(gamma, &n).map_err(|e| InputError::core("run.gamma", &e))?;
    let out = cross_all_walls(&dec, &problem.asymptotic, &unframed, &problem.lie)
        .map_err(|e| InputError::core("tables.asymptotic", &e))?;

    let mut round_trip = true;
    for (w, above, below) in out.wall_sides() {
        let back = invert_wall(w, below, &unframed, &problem.lie).map_err(|e| InputError::core("tables", &e))?;
        round_trip &= &back == above;
    }

    let names: Vec<String> = problem.asymptotic.keys().map(|c| problem.name_of(c)).collect();
    let mut headers = vec!["lower".to_string(), "upper".to_string()];
    headers.extend(names.iter().cloned());
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut text = TextTable::new("framed invariants by chamber", &header_refs);
    let chambers: Vec<Value> = out
        .decomposition
        .chambers
        .iter()
        .zip(&out.tables)
        .map(|(c, t)| {
            let mut row = vec![q(&c.lower), q(&c.upper)];
            row.extend(t.values().map(q));
            text.row(row);
            json!({
                "lower": q(&c.lower),
                "upper": q(&c.upper),
                "representative": q(&c.representative),
                "values": values_json(problem, t),
            })
        })
        .collect();
    let payload = json!({
        "gamma": problem.doc.run.gamma,
        "class": gamma.to_string(),
        "tau_max": q(&n),
        "genus_rule": {
            "applied": problem.twist.genus >= 1,
            "zeroed": rule.changed.iter().map(|c| problem.name_of(c)).collect::<Vec<_>>(),
        },
        "walls_of_gamma": dec.walls.iter().map(q).collect::<Vec<_>>(),
        "walls": out.decomposition.walls.iter().map(q).collect::<Vec<_>>(),
        "chambers": chambers,
        "round_trip_holds": round_trip,
    });
    let status = if round_trip { Status::Ok } else { Status::VerificationFailed };
    Ok((status, payload, vec![text]))
}

fn invert(problem: &Problem) -> Result<Outcome, InputError> {
    let t = tau0(problem)?;
    let unframed = problem.support_table()?;
    if problem.low_side.is_empty() {
        return Err(InputError::new("MISSING_FIELD", "tables.low_side", "`invert` needs `tables.low_side`"));
    }
    let plus = invert_wall(&t, &problem.low_side, &unframed, &problem.lie)
        .map_err(|e| InputError::core("tables.low_side", &e))?;
    let mut consistent = true;
    let mut text = TextTable::new(&format!("invariants at the wall {}", q(&t)), &["class", "below", "above"]);
    let mut recomputed: BTreeMap<&NumericalClass, Rational> = BTreeMap::new();
    for (c, j) in &plus {
        let corr = wall_correction(c, &t, &unframed, &plus, &problem.lie).map_err(|e| InputError::core("tables", &e))?;
        recomputed.insert(c, j + corr);
        text.row(vec![problem.name_of(c), q(&problem.low_side[c]), q(j)]);
    }
    for (c, j) in &recomputed {
        consistent &= &problem.low_side[*c] == j;
    }
    let payload = json!({
        "tau0": q(&t),
        "low_side": values_json(problem, &problem.low_side),
        "plus_side": values_json(problem, &plus),
        "round_trip_holds": consistent,
    });
    let status = if consistent { Status::Ok } else { Status::VerificationFailed };
    Ok((status, payload, vec![text]))
}
