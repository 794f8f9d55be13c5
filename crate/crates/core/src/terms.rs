//! Integer terms decided by finite initial segments of the generic sequence.
//!
//! A [`RangeTerm`] of modulus `k` assigns to every length-`k` node a value,
//! optionally with a witness index `m < k` such that `node[m] == value`; an
//! open refining the node then forces `t = G(m)`, hence `t ∈ rng(G)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::{BasicOpen, Condition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub value: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermRule {
    /// The same value on every node; carries no range witness.
    Const(u64),
    /// `G(i)`, witnessed by `i` itself.
    Coord(usize),
    Table(#[serde(with = "table_rows")] BTreeMap<Vec<u64>, NodeEntry>),
}

mod table_rows {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row {
        node: Vec<u64>,
        value: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<usize>,
    }

    pub fn serialize<S: Serializer>(
        table: &BTreeMap<Vec<u64>, NodeEntry>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Row> = table
            .iter()
            .map(|(node, e)| Row {
                node: node.clone(),
                value: e.value,
                witness: e.witness,
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Vec<u64>, NodeEntry>, D::Error> {
        let rows = Vec::<Row>::deserialize(d)?;
        Ok(rows
            .into_iter()
            .map(|r| {
                (
                    r.node,
                    NodeEntry {
                        value: r.value,
                        witness: r.witness,
                    },
                )
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TermRepr", into = "TermRepr")]
pub struct RangeTerm {
    modulus: usize,
    rule: TermRule,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    modulus: usize,
    rule: TermRule,
}

impl TryFrom<TermRepr> for RangeTerm {
    type Error = Error;
    fn try_from(r: TermRepr) -> Result<Self> {
        RangeTerm::new(r.modulus, r.rule)
    }
}

impl From<RangeTerm> for TermRepr {
    fn from(t: RangeTerm) -> Self {
        TermRepr {
            modulus: t.modulus,
            rule: t.rule,
        }
    }
}

impl RangeTerm {
    pub fn new(modulus: usize, rule: TermRule) -> Result<Self> {
        match &rule {
            TermRule::Const(_) => {}
            TermRule::Coord(i) if *i >= modulus => {
                return Err(Error::MalformedTerm(format!(
                    "coordinate {i} not below modulus {modulus}"
                )))
            }
            TermRule::Coord(_) => {}
            TermRule::Table(table) => {
                for (node, entry) in table {
                    if node.len() != modulus {
                        return Err(Error::MalformedTerm(format!(
                            "node {node:?} does not have length {modulus}"
                        )));
                    }
                    if let Some(w) = entry.witness {
                        if node.get(w) != Some(&entry.value) {
                            return Err(Error::MalformedTerm(format!(
                                "witness {w} of node {node:?} does not carry value {}",
                                entry.value
                            )));
                        }
                    }
                }
            }
        }
        Ok(RangeTerm { modulus, rule })
    }

    pub fn constant(value: u64) -> Self {
        RangeTerm {
            modulus: 0,
            rule: TermRule::Const(value),
        }
    }

    /// The term `G(index)`, read off a node of length `modulus`.
    pub fn coordinate(modulus: usize, index: usize) -> Result<Self> {
        RangeTerm::new(modulus, TermRule::Coord(index))
    }

    /// A table term whose node values are given by their witness index.
    pub fn from_witnesses(
        modulus: usize,
        witnesses: impl IntoIterator<Item = (Vec<u64>, usize)>,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (node, w) in witnesses {
            let value = *node.get(w).ok_or_else(|| {
                Error::MalformedTerm(format!("witness {w} outside node {node:?}"))
            })?;
            table.insert(
                node,
                NodeEntry {
                    value,
                    witness: Some(w),
                },
            );
        }
        RangeTerm::new(modulus, TermRule::Table(table))
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn rule(&self) -> &TermRule {
        &self.rule
    }

    /// Whether every node carries a range witness.
    pub fn is_range_term(&self) -> bool {
        match &self.rule {
            TermRule::Const(_) => false,
            TermRule::Coord(_) => true,
            TermRule::Table(t) => t.values().all(|e| e.witness.is_some()),
        }
    }

    pub fn entry(&self, node: &[u64]) -> Result<NodeEntry> {
        match &self.rule {
            TermRule::Const(c) => Ok(NodeEntry {
                value: *c,
                witness: None,
            }),
            TermRule::Coord(i) => Ok(NodeEntry {
                value: node[*i],
                witness: Some(*i),
            }),
            TermRule::Table(t) => t
                .get(node)
                .copied()
                .ok_or_else(|| Error::TermNotTotal(node.to_vec())),
        }
    }

    /// The decided value under `p`, if all compatible full-depth nodes agree.
    pub fn decide(&self, p: &Condition) -> Result<Option<u64>> {
        if let TermRule::Const(c) = self.rule {
            return Ok(Some(c));
        }
        let mut seen: Option<u64> = None;
        let mut agree = true;
        let mut missing = None;
        p.for_each_node(self.modulus, |node| match self.entry(node) {
            Ok(e) => {
                match seen {
                    None => seen = Some(e.value),
                    Some(v) if v != e.value => agree = false,
                    _ => {}
                }
                true
            }
            Err(err) => {
                missing = Some(err);
                false
            }
        });
        if let Some(err) = missing {
            return Err(err);
        }
        Ok(if agree { seen } else { None })
    }

    /// Largest value over the compatible full-depth nodes of `p`.
    pub fn max_value(&self, p: &Condition) -> Result<u64> {
        if let TermRule::Const(c) = self.rule {
            return Ok(c);
        }
        let mut best = 0;
        let mut missing = None;
        p.for_each_node(self.modulus, |node| match self.entry(node) {
            Ok(e) => {
                best = best.max(e.value);
                true
            }
            Err(err) => {
                missing = Some(err);
                false
            }
        });
        match missing {
            Some(err) => Err(err),
            None => Ok(best),
        }
    }

    /// Whether every compatible full-depth node of `p` has value `<= bound`.
    pub fn bounded_by(&self, p: &Condition, bound: u64) -> Result<bool> {
        Ok(self.max_value(p)? <= bound)
    }
}

pub fn decide_term(p: &BasicOpen, t: &RangeTerm) -> Result<Option<u64>> {
    t.decide(p.condition()?)
}

/// A term that behaves as its body beneath the guard of a piece and is the
/// default value 0 outside every guard.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardedTerm {
    pieces: Vec<GuardedPiece>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardedPiece {
    pub guard: BasicOpen,
    pub body: RangeTerm,
}

pub const GUARD_DEFAULT: u64 = 0;

impl GuardedTerm {
    pub fn pieces(&self) -> &[GuardedPiece] {
        &self.pieces
    }

    pub fn decide(&self, q: &BasicOpen) -> Result<Option<u64>> {
        let qc = q.condition()?;
        let mut disjoint_from_all = true;
        for piece in &self.pieces {
            let guard = piece.guard.condition()?;
            if qc.is_subset_of(guard) {
                return piece.body.decide(qc);
            }
            if !qc.intersect(guard).is_empty() {
                disjoint_from_all = false;
            }
        }
        Ok(disjoint_from_all.then_some(GUARD_DEFAULT))
    }
}

/// `t↾r`: empty until beneath `r`, then `t`.
pub fn restrict_term(t: &RangeTerm, r: &BasicOpen) -> Result<GuardedTerm> {
    r.condition()?;
    Ok(GuardedTerm {
        pieces: vec![GuardedPiece {
            guard: r.clone(),
            body: t.clone(),
        }],
    })
}

/// `⋃ σ_i↾q_i`: wait until the open determines which `q_i` it lies in.
pub fn amalgamate(parts: Vec<(BasicOpen, RangeTerm)>) -> Result<GuardedTerm> {
    let mut pieces = Vec::with_capacity(parts.len());
    for (guard, body) in parts {
        guard.condition()?;
        pieces.push(GuardedPiece { guard, body });
    }
    for (i, a) in pieces.iter().enumerate() {
        for b in &pieces[i + 1..] {
            if let BasicOpen::Basic(overlap) = crate::seq::intersect(&a.guard, &b.guard) {
                if let (Some(x), Some(y)) = (a.body.decide(&overlap)?, b.body.decide(&overlap)?) {
                    if x != y {
                        return Err(Error::AmbiguousAmalgamation(x, y));
                    }
                }
            }
        }
    }
    Ok(GuardedTerm { pieces })
}

/// A total sequence of terms: explicit terms for the first indices, then a
/// repeating tail term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSequence {
    pub terms: Vec<RangeTerm>,
    pub tail: RangeTerm,
}

impl TermSequence {
    pub fn uniform(term: RangeTerm) -> Self {
        TermSequence {
            terms: Vec::new(),
            tail: term,
        }
    }

    pub fn get(&self, n: usize) -> &RangeTerm {
        self.terms.get(n).unwrap_or(&self.tail)
    }
}

/// The least `N` with `seq[n] <= n` for all `N <= n < len`, or `None` when
/// the final entry still violates the bound.
pub fn is_pseudobounded_violation(seq: &[u64]) -> Option<usize> {
    match seq.iter().enumerate().rposition(|(n, &a)| a > n as u64) {
        None => Some(0),
        Some(last) if last + 1 == seq.len() => None,
        Some(last) => Some(last + 1),
    }
}
