//! Star/non-star decision levels over the tree of compatible sequences, and
//! the staged escape schedule forcing a decided sequence to be eventually
//! star.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::{BoundSchedule, Condition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Star,
    Nonstar,
}

/// Labels of the nodes at one decision level. An explicit entry wins; then a
/// node with some entry `>= threshold` is non-star; otherwise the default
/// applies. A node resolved by none of these makes the oracle partial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLabels {
    #[serde(default, with = "label_rows")]
    pub nodes: BTreeMap<Vec<u64>, Label>,
    #[serde(default)]
    pub threshold: Option<u64>,
    #[serde(default)]
    pub default: Option<Label>,
}

mod label_rows {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row {
        node: Vec<u64>,
        label: Label,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<Vec<u64>, Label>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        map.iter()
            .map(|(node, &label)| Row {
                node: node.clone(),
                label,
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Vec<u64>, Label>, D::Error> {
        Ok(Vec::<Row>::deserialize(d)?
            .into_iter()
            .map(|r| (r.node, r.label))
            .collect())
    }
}

/// Decision levels `i_n` and the labels of the level-`i_n` nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarOracle {
    pub levels: Vec<usize>,
    pub labels: Vec<LevelLabels>,
}

/// Nodes of one length whose entries are bounded coordinatewise above a
/// fixed prefix.
#[derive(Clone, Debug)]
struct NodeBox {
    fixed: Vec<u64>,
    upper: Vec<u64>,
}

impl NodeBox {
    fn depth(&self) -> usize {
        self.upper.len()
    }

    fn free(&self) -> std::ops::Range<usize> {
        self.fixed.len().min(self.depth())..self.depth()
    }

    fn contains(&self, node: &[u64]) -> bool {
        node.len() == self.depth()
            && node
                .iter()
                .enumerate()
                .all(|(k, &x)| match self.fixed.get(k) {
                    Some(&f) => x == f,
                    None => x <= self.upper[k],
                })
    }

    fn count(&self) -> u128 {
        self.free()
            .map(|k| self.upper[k] as u128 + 1)
            .fold(1, u128::saturating_mul)
    }

    /// Number of nodes with every entry `< bound`.
    fn count_below(&self, bound: u64) -> u128 {
        let fixed = &self.fixed[..self.fixed.len().min(self.depth())];
        if bound == 0 || fixed.iter().any(|&x| x >= bound) {
            return 0;
        }
        self.free()
            .map(|k| self.upper[k].min(bound - 1) as u128 + 1)
            .fold(1, u128::saturating_mul)
    }

    fn for_each(&self, mut visit: impl FnMut(&[u64]) -> Result<()>) -> Result<()> {
        let fixed = self.fixed.len().min(self.depth());
        let mut node: Vec<u64> = self.fixed[..fixed].to_vec();
        node.resize(self.depth(), 0);
        loop {
            visit(&node)?;
            let mut k = self.depth();
            loop {
                if k == fixed {
                    return Ok(());
                }
                k -= 1;
                if node[k] < self.upper[k] {
                    node[k] += 1;
                    break;
                }
                node[k] = 0;
            }
        }
    }
}

impl LevelLabels {
    fn label(&self, node: &[u64]) -> Option<Label> {
        if let Some(&l) = self.nodes.get(node) {
            return Some(l);
        }
        if self.threshold.is_some_and(|t| node.iter().any(|&x| x >= t)) {
            return Some(Label::Nonstar);
        }
        self.default
    }

    /// Whether some node of the box is non-star, by counting instead of
    /// enumerating.
    fn nonstar_in(&self, bx: &NodeBox, level: usize) -> Result<bool> {
        let explicit: Vec<(&Vec<u64>, Label)> = self
            .nodes
            .iter()
            .filter(|(n, _)| bx.contains(n))
            .map(|(n, &l)| (n, l))
            .collect();
        if explicit.iter().any(|(_, l)| *l == Label::Nonstar) {
            return Ok(true);
        }
        let above = |n: &[u64], t: u64| n.iter().any(|&x| x >= t);
        let unlabeled = match self.threshold {
            Some(t) => {
                let hits = bx.count() - bx.count_below(t);
                let covered = explicit.iter().filter(|(n, _)| above(n, t)).count() as u128;
                if hits > covered {
                    return Ok(true);
                }
                bx.count_below(t) - explicit.iter().filter(|(n, _)| !above(n, t)).count() as u128
            }
            None => bx.count() - explicit.len() as u128,
        };
        match (unlabeled, self.default) {
            (0, _) | (_, Some(Label::Star)) => Ok(false),
            (_, Some(Label::Nonstar)) => Ok(true),
            (_, None) => Err(Error::OracleNotTotal(format!(
                "unlabeled nodes at level {level}"
            ))),
        }
    }
}

impl StarOracle {
    pub fn new(levels: Vec<usize>, labels: Vec<LevelLabels>) -> Result<Self> {
        if levels.len() != labels.len() {
            return Err(Error::MalformedOracle(
                "one label table per level is required".into(),
            ));
        }
        if levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::MalformedOracle(
                "levels must be non-decreasing".into(),
            ));
        }
        for (n, table) in labels.iter().enumerate() {
            if let Some(node) = table.nodes.keys().find(|node| node.len() != levels[n]) {
                return Err(Error::MalformedOracle(format!(
                    "node {node:?} is not at level {}",
                    levels[n]
                )));
            }
        }
        Ok(StarOracle { levels, labels })
    }

    pub fn level(&self, n: usize) -> Result<usize> {
        self.levels
            .get(n)
            .copied()
            .ok_or_else(|| Error::OracleNotTotal(format!("no decision level for n={n}")))
    }

    pub fn label(&self, n: usize, node: &[u64]) -> Result<Label> {
        self.level(n)?;
        self.labels[n]
            .label(node)
            .ok_or_else(|| Error::OracleNotTotal(format!("node {node:?} at n={n} is unlabeled")))
    }
}

/// The compatible sequences of an ambient open with all entries `< bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedTree {
    pub ambient: Condition,
    pub bound: u64,
}

impl BoundedTree {
    fn level_box(&self, depth: usize) -> Option<NodeBox> {
        let fixed = self.ambient.prefix();
        if self.bound == 0 || fixed.iter().take(depth).any(|&x| x >= self.bound) {
            return None;
        }
        let upper = (0..depth)
            .map(|k| self.ambient.g(k).min(self.bound - 1))
            .collect();
        Some(NodeBox { fixed, upper })
    }

    /// `∏_{j < depth} min(J, g(j)+1)` over the free coordinates, and 0 if the
    /// fixed prefix already leaves the tree.
    pub fn level_count(&self, depth: usize) -> u128 {
        self.level_box(depth).map_or(0, |b| b.count())
    }
}

pub fn enumerate_level(tree: &BoundedTree, depth: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    if let Some(bx) = tree.level_box(depth) {
        bx.for_each(|n| {
            out.push(n.to_vec());
            Ok(())
        })
        .expect("collecting cannot fail");
    }
    out
}

pub fn nonstar_nodes(tree: &BoundedTree, oracle: &StarOracle, n: usize) -> Result<Vec<Vec<u64>>> {
    let level = oracle.level(n)?;
    let mut out = Vec::new();
    if let Some(bx) = tree.level_box(level) {
        bx.for_each(|node| {
            if oracle.label(n, node)? == Label::Nonstar {
                out.push(node.to_vec());
            }
            Ok(())
        })?;
    }
    Ok(out)
}

/// One stage of the construction: entries above the frontier may reach
/// `bound`; `reach` is the longest non-star node found (0 if none) and
/// `frontier` the defined length after the stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeStage {
    pub stage: usize,
    pub bound: u64,
    pub reach: usize,
    pub frontier: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeSchedule {
    pub open: Condition,
    /// Every level `i_m` with `M < m <= horizon` is star throughout `open`.
    pub m: usize,
    pub stages: Vec<EscapeStage>,
}

fn schedule_box(q: &Condition, depth: usize, upper: impl Fn(usize) -> u64) -> NodeBox {
    NodeBox {
        fixed: q.prefix(),
        upper: (0..depth).map(upper).collect(),
    }
}

/// Longest level `i_n` (`n <= horizon`) holding a non-star node inside the
/// box family described by `upper`, or 0.
fn reach(
    q: &Condition,
    oracle: &StarOracle,
    horizon: usize,
    upper: &dyn Fn(usize) -> u64,
) -> Result<usize> {
    let mut best = 0;
    for n in 0..=horizon {
        let level = oracle.levels[n];
        if level > best && oracle.labels[n].nonstar_in(&schedule_box(q, level, upper), level)? {
            best = level;
        }
    }
    Ok(best)
}

/// The staged escape construction. Stage `e` lets entries beyond the current
/// frontier reach `I+e+1`, finds the longest non-star node in that tree and
/// fills the new segment with `I+e`; past the horizon the schedule closes
/// with slope 1. Everything is capped by `g_q`.
pub fn build_escape_schedule(
    q: &Condition,
    oracle: &StarOracle,
    bound: u64,
    horizon: usize,
) -> Result<EscapeSchedule> {
    if q.prefix_max() > bound || bound > q.g(q.stem()) {
        return Err(Error::BadCandidate(format!(
            "need max prefix {} <= {bound} <= g(stem) {}",
            q.prefix_max(),
            q.g(q.stem())
        )));
    }
    let top = oracle.level(horizon)?;
    let whole = |k: usize| q.g(k);
    if reach(q, oracle, horizon, &whole)? == 0 {
        return Ok(EscapeSchedule {
            open: q.clone(),
            m: 0,
            stages: Vec::new(),
        });
    }
    let stem = q.stem();
    let mut g: Vec<u64> = q.prefix();
    let mut stages = Vec::new();
    let mut first_reach = 0;
    let mut e = 0usize;
    while g.len() < top || e == 0 {
        let cap = bound + e as u64 + 1;
        let defined = g.clone();
        let upper = |k: usize| defined.get(k).copied().unwrap_or_else(|| cap.min(q.g(k)));
        let r = reach(q, oracle, horizon, &upper)?;
        if r == top {
            return Err(Error::ScheduleUnsound(format!(
                "stage {e} finds non-star nodes at the top level {top}; their lengths are not bounded within the horizon"
            )));
        }
        if e == 0 {
            first_reach = r;
        }
        let frontier = r.max(g.len() + 1);
        let fill = bound + e as u64;
        while g.len() < frontier {
            let k = g.len();
            g.push(fill.min(q.g(k)));
        }
        stages.push(EscapeStage {
            stage: e,
            bound: cap,
            reach: r,
            frontier,
        });
        e += 1;
    }
    let base = bound + e as u64;
    let closed = BoundSchedule::new(g, base, 1)?.pointwise_min(q.schedule());
    let open = Condition::new(stem, closed.with_prefix(&q.prefix()))?;
    let m = (0..=horizon)
        .rev()
        .find(|&n| oracle.levels[n] <= first_reach)
        .unwrap_or(0);
    for n in m + 1..=horizon {
        let level = oracle.levels[n];
        if oracle.labels[n].nonstar_in(&schedule_box(&open, level, |k| open.g(k)), level)? {
            return Err(Error::ScheduleUnsound(format!(
                "level {level} (n={n}) is non-star below the schedule"
            )));
        }
    }
    Ok(EscapeSchedule { open, m, stages })
}
