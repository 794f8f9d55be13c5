use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::antispecker::{build_escape_schedule, StarOracle};
use crate::error::{Error, Result};
use crate::fusion::{
    bound_range_term_at_traced, bound_range_term_traced, dc_chain_traced, fuse_pseudobound_traced,
    Trace,
};
use crate::seq::{Condition, Point};
use crate::terms::{RangeTerm, TermSequence};

/// An operation, its inputs, the derivation it produced and its outputs.
/// Verification reruns the operation and demands identical trace and
/// outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub operation: String,
    pub inputs: Value,
    pub trace: Value,
    pub outputs: Value,
}

#[derive(Serialize, Deserialize)]
struct BoundInputs {
    open: Condition,
    term: RangeTerm,
    bound: u64,
    #[serde(default)]
    depth: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct PseudoInputs {
    open: Condition,
    terms: TermSequence,
    point: Point,
    stages: usize,
}

/// A step rule for dependent choice: the next witness is the current one
/// plus `add`, decided as a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRule {
    pub add: u64,
}

#[derive(Serialize, Deserialize)]
struct DcInputs {
    open: Condition,
    rule: StepRule,
    start: u64,
    steps: usize,
}

#[derive(Serialize, Deserialize)]
struct ScheduleInputs {
    open: Condition,
    oracle: StarOracle,
    bound: u64,
    horizon: usize,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone())
        .map_err(|e| Error::CertificateMismatch(format!("unreadable inputs: {e}")))
}

pub fn certify_bound(
    open: &Condition,
    term: &RangeTerm,
    bound: u64,
    depth: Option<usize>,
) -> Result<Certificate> {
    let mut trace = Trace::default();
    let q = match depth {
        Some(m) => bound_range_term_at_traced(open, term, bound, m, &mut trace)?,
        None => bound_range_term_traced(open, term, bound, &mut trace)?,
    };
    let inputs = BoundInputs {
        open: open.clone(),
        term: term.clone(),
        bound,
        depth,
    };
    Ok(Certificate {
        operation: "fuse.bound".into(),
        inputs: to_value(&inputs),
        trace: to_value(&trace),
        outputs: to_value(&q),
    })
}

pub fn certify_pseudo(
    open: &Condition,
    terms: &TermSequence,
    point: &Point,
    stages: usize,
) -> Result<Certificate> {
    let (outcome, trace) = fuse_pseudobound_traced(open, terms, point, stages)?;
    let inputs = PseudoInputs {
        open: open.clone(),
        terms: terms.clone(),
        point: point.clone(),
        stages,
    };
    Ok(Certificate {
        operation: "fuse.pseudo".into(),
        inputs: to_value(&inputs),
        trace: to_value(&trace),
        outputs: to_value(&outcome),
    })
}

pub fn certify_dc(
    open: &Condition,
    rule: StepRule,
    start: u64,
    steps: usize,
) -> Result<Certificate> {
    let mut trace = Trace::default();
    let oracle =
        move |cur: u64, _: &Condition| Ok((RangeTerm::constant(cur.saturating_add(rule.add)), 0));
    let outcome = dc_chain_traced(open, &oracle, start, steps, &mut trace)?;
    let inputs = DcInputs {
        open: open.clone(),
        rule,
        start,
        steps,
    };
    Ok(Certificate {
        operation: "fuse.dc".into(),
        inputs: to_value(&inputs),
        trace: to_value(&trace),
        outputs: to_value(&outcome),
    })
}

pub fn certify_schedule(
    open: &Condition,
    oracle: &StarOracle,
    bound: u64,
    horizon: usize,
) -> Result<Certificate> {
    let out = build_escape_schedule(open, oracle, bound, horizon)?;
    let inputs = ScheduleInputs {
        open: open.clone(),
        oracle: oracle.clone(),
        bound,
        horizon,
    };
    Ok(Certificate {
        operation: "as.schedule".into(),
        inputs: to_value(&inputs),
        trace: to_value(&out.stages),
        outputs: json!({ "open": out.open, "m": out.m }),
    })
}

/// Replays `cert` and checks that trace and outputs agree exactly.
pub fn verify(cert: &Certificate) -> Result<()> {
    let replay = match cert.operation.as_str() {
        "fuse.bound" => {
            let i: BoundInputs = from_value(&cert.inputs)?;
            certify_bound(&i.open, &i.term, i.bound, i.depth)?
        }
        "fuse.pseudo" => {
            let i: PseudoInputs = from_value(&cert.inputs)?;
            certify_pseudo(&i.open, &i.terms, &i.point, i.stages)?
        }
        "fuse.dc" => {
            let i: DcInputs = from_value(&cert.inputs)?;
            certify_dc(&i.open, i.rule, i.start, i.steps)?
        }
        "as.schedule" => {
            let i: ScheduleInputs = from_value(&cert.inputs)?;
            certify_schedule(&i.open, &i.oracle, i.bound, i.horizon)?
        }
        other => {
            return Err(Error::CertificateMismatch(format!(
                "unknown operation `{other}`"
            )))
        }
    };
    if replay.trace != cert.trace {
        return Err(Error::CertificateMismatch(
            "the replayed trace differs".into(),
        ));
    }
    if replay.outputs != cert.outputs {
        return Err(Error::CertificateMismatch(
            "the replayed outputs differ".into(),
        ));
    }
    Ok(())
}
