//! Good-extension search and fusion.
//!
//! The existence proofs for good extensions descend through splits until the
//! term is decided. Terms have finite modulus, so the descent is a terminating
//! recursion over a finitely branching tree instead of a refutation.
//! Infinite fusions are exposed through their finite stages only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::{BasicOpen, BoundSchedule, Condition, Point};
use crate::terms::{amalgamate, GuardedTerm, RangeTerm, TermSequence};

/// One step of a construction, recorded for replayable certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// The open with this fixed prefix already satisfies the goal.
    Accept { node: Vec<u64> },
    /// A fully decided open that cannot satisfy the goal.
    Reject { node: Vec<u64> },
    /// Children `0..=stem_value` were merged by pointwise minimum.
    Merge { node: Vec<u64>, stem_value: u64 },
    /// An open cover by all compatible nodes of the given depth.
    Cover { depth: usize, count: usize },
    /// A node of a cover decided to a value.
    Decide { node: Vec<u64>, value: u64 },
    /// A fusion stage with its bound and the depth below which the schedule
    /// was kept.
    Stage {
        stage: usize,
        bound: u64,
        depth: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    fn push(&mut self, event: TraceEvent) {
        self.events.push(event);
    }
}

fn min_schedule<'a>(
    schedules: impl IntoIterator<Item = &'a BoundSchedule>,
) -> Option<BoundSchedule> {
    schedules
        .into_iter()
        .fold(None, |acc: Option<BoundSchedule>, s| match acc {
            None => Some(s.clone()),
            Some(m) => Some(m.pointwise_min(s)),
        })
}

/// Best good extension of `p` with the same stem: all full-depth nodes of the
/// result have value `<= bound`, and among such extensions the value at the
/// stem is as large as possible (deeper levels recursively likewise).
fn good_extension(
    p: &Condition,
    t: &RangeTerm,
    bound: u64,
    trace: &mut Trace,
) -> Result<Option<Condition>> {
    if t.bounded_by(p, bound)? {
        trace.push(TraceEvent::Accept { node: p.prefix() });
        return Ok(Some(p.clone()));
    }
    if p.stem() >= t.modulus() {
        trace.push(TraceEvent::Reject { node: p.prefix() });
        return Ok(None);
    }
    let stem = p.stem();
    let floor = p.prefix_max();
    let mut children: Vec<Condition> = Vec::new();
    let mut next_min = u64::MAX;
    let mut best: Option<u64> = None;
    for i in 0..=p.g(stem) {
        let Some(child) = good_extension(&p.split(i)?, t, bound, trace)? else {
            break;
        };
        next_min = next_min.min(child.g(stem + 1));
        children.push(child);
        if next_min < i {
            break;
        }
        if i >= floor {
            best = Some(i);
        }
    }
    let Some(top) = best else {
        trace.push(TraceEvent::Reject { node: p.prefix() });
        return Ok(None);
    };
    let tail = min_schedule(children[..=top as usize].iter().map(Condition::schedule))
        .expect("at least one child");
    let mut prefix = p.prefix();
    prefix.push(top);
    trace.push(TraceEvent::Merge {
        node: p.prefix(),
        stem_value: top,
    });
    Ok(Some(Condition::new(stem, tail.with_prefix(&prefix))?))
}

fn check_candidate(p: &Condition, depth: usize, bound: u64) -> Result<()> {
    let below = (0..depth).map(|n| p.g(n)).max().unwrap_or(0);
    if below > bound || bound > p.g(depth) {
        return Err(Error::BadCandidate(format!(
            "need max g(<{depth}) = {below} <= {bound} <= g({depth}) = {}",
            p.g(depth)
        )));
    }
    Ok(())
}

/// An extension with the same stem, `g_q(stem) >= bound`, forcing `t <= bound`.
pub fn bound_range_term(p: &Condition, t: &RangeTerm, bound: u64) -> Result<Condition> {
    bound_range_term_traced(p, t, bound, &mut Trace::default())
}

pub fn bound_range_term_traced(
    p: &Condition,
    t: &RangeTerm,
    bound: u64,
    trace: &mut Trace,
) -> Result<Condition> {
    check_candidate(p, p.stem(), bound)?;
    good_extension(p, t, bound, trace)?.ok_or_else(|| {
        Error::NoGoodExtension(format!(
            "term exceeds {bound} on a decided node; is it a range term?"
        ))
    })
}

/// The depth-`depth` variant: `g_q` agrees with `g_p` below `depth`, the
/// stem is kept, `g_q(depth) >= bound`, and `q` forces `t <= bound`.
pub fn bound_range_term_at(
    p: &Condition,
    t: &RangeTerm,
    bound: u64,
    depth: usize,
) -> Result<Condition> {
    bound_range_term_at_traced(p, t, bound, depth, &mut Trace::default())
}

pub fn bound_range_term_at_traced(
    p: &Condition,
    t: &RangeTerm,
    bound: u64,
    depth: usize,
    trace: &mut Trace,
) -> Result<Condition> {
    if depth < p.stem() {
        return Err(Error::BadCandidate(format!(
            "depth {depth} is below the stem {}",
            p.stem()
        )));
    }
    check_candidate(p, depth, bound)?;
    // every piece of the cover would be accepted unchanged
    if t.modulus() <= depth && t.bounded_by(p, bound)? {
        trace.push(TraceEvent::Accept { node: p.prefix() });
        return Ok(p.clone());
    }
    let cover = p.nodes(depth);
    trace.push(TraceEvent::Cover {
        depth,
        count: cover.len(),
    });
    let mut parts = Vec::with_capacity(cover.len());
    for node in &cover {
        parts.push(bound_range_term_traced(
            &p.restrict(node)?,
            t,
            bound,
            trace,
        )?);
    }
    let tail = min_schedule(parts.iter().map(Condition::schedule)).expect("covers are nonempty");
    p.with_tail_from(depth, &tail)
}

/// The finite stages of the pseudo-boundedness fusion below a point `f`.
///
/// Stage `j` forces `a(N + j) <= N + j`, where `N = sup(rng f)`; every stage
/// is a subset of the previous one and still contains `f`.
pub struct FusionStages<'a> {
    terms: &'a TermSequence,
    sup: u64,
    current: Condition,
    stage: usize,
    trace: Trace,
}

impl<'a> FusionStages<'a> {
    pub fn new(p: &Condition, terms: &'a TermSequence, f: &Point) -> Result<Self> {
        if !p.contains(f) {
            return Err(Error::PointNotInOpen);
        }
        Ok(FusionStages {
            terms,
            sup: f.sup(),
            current: p.clone(),
            stage: 0,
            trace: Trace::default(),
        })
    }

    pub fn sup(&self) -> u64 {
        self.sup
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn next_stage(&mut self) -> Result<Condition> {
        let bound = self.sup + self.stage as u64;
        let g = self.current.schedule();
        let depth = if self.stage == 0 {
            g.first_above(0, self.sup)
        } else {
            g.first_at_least(0, bound)
        };
        self.trace.push(TraceEvent::Stage {
            stage: self.stage,
            bound,
            depth,
        });
        let term = self.terms.get(bound as usize);
        let q = bound_range_term_at_traced(&self.current, term, bound, depth, &mut self.trace)?;
        self.current = q.clone();
        self.stage += 1;
        Ok(q)
    }
}

impl Iterator for FusionStages<'_> {
    type Item = Result<Condition>;
    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_stage())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionOutcome {
    /// `sup(rng f)`: the index from which `a(n) <= n` is forced.
    pub start: u64,
    pub chain: Vec<BasicOpen>,
}

/// Runs stages `0..=stages` of the fusion.
pub fn fuse_pseudobound(
    p: &Condition,
    a: &TermSequence,
    f: &Point,
    stages: usize,
) -> Result<FusionOutcome> {
    fuse_pseudobound_traced(p, a, f, stages).map(|(o, _)| o)
}

pub fn fuse_pseudobound_traced(
    p: &Condition,
    a: &TermSequence,
    f: &Point,
    stages: usize,
) -> Result<(FusionOutcome, Trace)> {
    let mut it = FusionStages::new(p, a, f)?;
    let chain = (0..=stages)
        .map(|_| it.next_stage().map(Condition::open))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        FusionOutcome {
            start: it.sup(),
            chain,
        },
        it.trace,
    ))
}

/// Node to witness value and deciding term.
pub type Entries = BTreeMap<Vec<u64>, (u64, RangeTerm)>;

/// Per-node witnesses for an existential statement: at the declared depth,
/// each node maps to the value of the witness and a term deciding to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessOracle {
    pub depth: usize,
    #[serde(with = "oracle_rows")]
    pub entries: Entries,
}

mod oracle_rows {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row {
        node: Vec<u64>,
        value: u64,
        term: RangeTerm,
    }

    pub fn serialize<S: Serializer>(map: &Entries, s: S) -> std::result::Result<S::Ok, S::Error> {
        map.iter()
            .map(|(node, (value, term))| Row {
                node: node.clone(),
                value: *value,
                term: term.clone(),
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Entries, D::Error> {
        Ok(Vec::<Row>::deserialize(d)?
            .into_iter()
            .map(|r| (r.node, (r.value, r.term)))
            .collect())
    }
}

impl WitnessOracle {
    /// Oracle assigning each compatible node of `p` at `depth` the given term,
    /// which must be decided below that node.
    pub fn from_term_fn(
        p: &Condition,
        depth: usize,
        mut term: impl FnMut(&[u64]) -> RangeTerm,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for node in p.nodes(depth) {
            let t = term(&node);
            let value = decided_below(p, &node, &t)?;
            entries.insert(node, (value, t));
        }
        Ok(WitnessOracle { depth, entries })
    }

    fn lookup(&self, node: &[u64]) -> Result<&(u64, RangeTerm)> {
        self.entries
            .get(node)
            .ok_or_else(|| Error::OracleNotTotal(format!("no witness for node {node:?}")))
    }
}

fn restrict_to(p: &Condition, node: &[u64]) -> Result<Condition> {
    if node.len() >= p.stem() {
        p.restrict(node)
    } else {
        Ok(p.clone())
    }
}

fn decided_below(p: &Condition, node: &[u64], t: &RangeTerm) -> Result<u64> {
    t.decide(&restrict_to(p, node)?)?.ok_or_else(|| {
        Error::MalformedOracle(format!("witness term undecided below node {node:?}"))
    })
}

/// Good extension for an existential statement. With a total oracle every
/// split below the deciding depth is good, so the recursion keeps the full
/// schedule; its content is the amalgamated witness term.
fn witness_extension(
    p: &Condition,
    oracle: &WitnessOracle,
    trace: &mut Trace,
) -> Result<Condition> {
    if p.stem() >= oracle.depth {
        let node = &p.prefix()[..oracle.depth];
        oracle.lookup(node)?;
        trace.push(TraceEvent::Accept { node: p.prefix() });
        return Ok(p.clone());
    }
    let stem = p.stem();
    let top = p.g(stem);
    let mut children = Vec::new();
    for i in 0..=top {
        children.push(witness_extension(&p.split(i)?, oracle, trace)?);
    }
    let tail =
        min_schedule(children.iter().map(Condition::schedule)).expect("nonempty split cover");
    let mut prefix = p.prefix();
    prefix.push(top);
    trace.push(TraceEvent::Merge {
        node: p.prefix(),
        stem_value: top,
    });
    Condition::new(stem, tail.with_prefix(&prefix))
}

fn amalgamate_witnesses(
    q: &Condition,
    oracle: &WitnessOracle,
    trace: &mut Trace,
) -> Result<GuardedTerm> {
    let depth = oracle.depth.max(q.stem());
    let nodes = q.nodes(depth);
    trace.push(TraceEvent::Cover {
        depth,
        count: nodes.len(),
    });
    let mut parts = Vec::with_capacity(nodes.len());
    for node in nodes {
        let (value, term) = oracle.lookup(&node[..oracle.depth])?;
        let guard = q.restrict(&node)?;
        if term.decide(&guard)? != Some(*value) {
            return Err(Error::MalformedOracle(format!(
                "witness term for node {node:?} does not decide to {value}"
            )));
        }
        trace.push(TraceEvent::Decide {
            node: node.clone(),
            value: *value,
        });
        parts.push((guard.open(), term.clone()));
    }
    amalgamate(parts)
}

/// Existential witness extraction: `q` keeps the stem with `g_q(stem) >= bound`
/// and the amalgamated term decides, below every deciding node of `q`, to the
/// oracle's value.
pub fn extract_witness(
    p: &Condition,
    oracle: &WitnessOracle,
    bound: u64,
) -> Result<(Condition, GuardedTerm)> {
    extract_witness_traced(p, oracle, bound, &mut Trace::default())
}

pub fn extract_witness_traced(
    p: &Condition,
    oracle: &WitnessOracle,
    bound: u64,
    trace: &mut Trace,
) -> Result<(Condition, GuardedTerm)> {
    if bound > p.g(p.stem()) {
        return Err(Error::BadCandidate(format!(
            "{bound} exceeds g(stem) = {}",
            p.g(p.stem())
        )));
    }
    p.for_each_node(oracle.depth, |node| oracle.entries.contains_key(node))
        .then_some(())
        .ok_or_else(|| {
            Error::OracleNotTotal(format!("oracle misses a node of depth {}", oracle.depth))
        })?;
    let q = witness_extension(p, oracle, trace)?;
    let sigma = amalgamate_witnesses(&q, oracle, trace)?;
    Ok((q, sigma))
}

/// The depth-`depth` variant of [`extract_witness`]: the schedule below
/// `depth` is kept and the cover at that depth is processed piecewise.
pub fn extract_witness_at(
    p: &Condition,
    oracle: &WitnessOracle,
    bound: u64,
    depth: usize,
    trace: &mut Trace,
) -> Result<(Condition, GuardedTerm)> {
    if depth < p.stem() {
        return Err(Error::BadCandidate(format!(
            "depth {depth} is below the stem {}",
            p.stem()
        )));
    }
    if bound > p.g(depth) {
        return Err(Error::BadCandidate(format!(
            "{bound} exceeds g({depth}) = {}",
            p.g(depth)
        )));
    }
    let cover = p.nodes(depth);
    trace.push(TraceEvent::Cover {
        depth,
        count: cover.len(),
    });
    let mut parts = Vec::with_capacity(cover.len());
    for node in &cover {
        let piece = p.restrict(node)?;
        piece
            .for_each_node(oracle.depth, |n| oracle.entries.contains_key(n))
            .then_some(())
            .ok_or_else(|| Error::OracleNotTotal(format!("oracle misses a node below {node:?}")))?;
        parts.push(witness_extension(&piece, oracle, trace)?);
    }
    let tail = min_schedule(parts.iter().map(Condition::schedule)).expect("covers are nonempty");
    let q = p.with_tail_from(depth, &tail)?;
    let sigma = amalgamate_witnesses(&q, oracle, trace)?;
    Ok((q, sigma))
}

/// Supplies the next witness of a dependent-choice step: given the current
/// witness value decided below an open, a term for the next witness and the
/// depth at which it is decided.
pub trait StepOracle {
    fn next(&self, current: u64, open: &Condition) -> Result<(RangeTerm, usize)>;
}

impl<F> StepOracle for F
where
    F: Fn(u64, &Condition) -> Result<(RangeTerm, usize)>,
{
    fn next(&self, current: u64, open: &Condition) -> Result<(RangeTerm, usize)> {
        self(current, open)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DcOutcome {
    /// `chain[0]` is the starting open; `chain[n]` decides the step from
    /// witness `n-1` to witness `n`.
    pub chain: Vec<BasicOpen>,
    pub witnesses: Vec<GuardedTerm>,
    /// Depth at which `witnesses[n]` is decided below `chain[n]`.
    pub depths: Vec<usize>,
}

/// Dependent choice by iterated witness extraction. Stage `n` keeps the
/// schedule up to and including the first index carrying a value
/// `>= I + n - 1`, where `I = g_p(stem)`, so every finite stage stays open.
pub fn dc_chain(
    p: &Condition,
    oracle: &dyn StepOracle,
    start: u64,
    steps: usize,
) -> Result<DcOutcome> {
    dc_chain_traced(p, oracle, start, steps, &mut Trace::default())
}

pub fn dc_chain_traced(
    p: &Condition,
    oracle: &dyn StepOracle,
    start: u64,
    steps: usize,
    trace: &mut Trace,
) -> Result<DcOutcome> {
    let base = p.g(p.stem());
    let mut current = p.clone();
    let mut witness = amalgamate(vec![(p.clone().open(), RangeTerm::constant(start))])?;
    let mut depth = p.stem();
    let mut out = DcOutcome {
        chain: vec![p.clone().open()],
        witnesses: vec![witness.clone()],
        depths: vec![depth],
    };
    for stage in 1..=steps {
        let mut next_terms: BTreeMap<Vec<u64>, RangeTerm> = BTreeMap::new();
        let mut deciding = depth;
        for node in current.nodes(depth) {
            let below = restrict_to(&current, &node)?;
            let value = witness.decide(&below.clone().open())?.ok_or_else(|| {
                Error::MalformedOracle(format!("witness {} undecided below {node:?}", stage - 1))
            })?;
            let (term, d) = oracle.next(value, &below)?;
            deciding = deciding.max(d).max(term.modulus());
            next_terms.insert(node, term);
        }
        let keep = if stage == 1 {
            current.stem()
        } else {
            current
                .schedule()
                .first_at_least(0, base + stage as u64 - 1)
                + 1
        };
        let keep = keep.max(current.stem());
        trace.push(TraceEvent::Stage {
            stage,
            bound: base + stage as u64 - 1,
            depth: keep,
        });
        let oracle_at = WitnessOracle::from_term_fn(&current, deciding, |node| {
            next_terms[&node[..depth]].clone()
        })?;
        let lemma_bound = current.g(keep);
        let (q, sigma) = extract_witness_at(&current, &oracle_at, lemma_bound, keep, trace)?;
        depth = deciding.max(keep);
        current = q;
        witness = sigma;
        out.chain.push(current.clone().open());
        out.witnesses.push(witness.clone());
        out.depths.push(depth);
    }
    Ok(out)
}
