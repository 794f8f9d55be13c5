use serde::{Deserialize, Serialize};

use super::schedule::BoundSchedule;
use crate::error::{Error, Result};

/// A point of the space: a finite-range sequence, represented as a finite
/// prefix followed by a constant tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct Point {
    prefix: Vec<u64>,
    tail: u64,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    prefix: Vec<u64>,
    tail: u64,
}

impl TryFrom<PointRepr> for Point {
    type Error = Error;
    fn try_from(r: PointRepr) -> Result<Self> {
        Ok(Point::new(r.prefix, r.tail))
    }
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> Self {
        PointRepr {
            prefix: p.prefix,
            tail: p.tail,
        }
    }
}

impl Point {
    pub fn new(mut prefix: Vec<u64>, tail: u64) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        Point { prefix, tail }
    }

    pub fn constant(value: u64) -> Self {
        Point::new(Vec::new(), value)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn tail(&self) -> u64 {
        self.tail
    }

    pub fn eval(&self, n: usize) -> u64 {
        self.prefix.get(n).copied().unwrap_or(self.tail)
    }

    /// `sup(rng f)`, which is a maximum since the range is finite.
    pub fn sup(&self) -> u64 {
        self.prefix.iter().copied().fold(self.tail, u64::max)
    }
}

/// A nonempty basic open: a stem together with a bounding schedule that is
/// non-decreasing from the stem on and dominates the fixed prefix at the stem.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BasicOpen", into = "BasicOpen")]
pub struct Condition {
    stem: usize,
    schedule: BoundSchedule,
}

/// A basic open set of the space of finite-range sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OpenRepr", into = "OpenRepr")]
pub enum BasicOpen {
    Empty,
    Basic(Condition),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OpenRepr {
    Basic {
        stem: usize,
        explicit: Vec<u64>,
        base: u64,
        slope: u64,
    },
    Empty {
        empty: bool,
    },
}

impl TryFrom<OpenRepr> for BasicOpen {
    type Error = Error;
    fn try_from(r: OpenRepr) -> Result<Self> {
        match r {
            OpenRepr::Empty { empty: true } => Ok(BasicOpen::Empty),
            OpenRepr::Empty { empty: false } => Err(Error::MalformedSchedule(
                "`empty: false` carries no open".into(),
            )),
            OpenRepr::Basic {
                stem,
                explicit,
                base,
                slope,
            } => {
                let schedule = BoundSchedule::new(explicit, base, slope)?;
                Ok(BasicOpen::Basic(Condition::new(stem, schedule)?))
            }
        }
    }
}

impl From<BasicOpen> for OpenRepr {
    fn from(o: BasicOpen) -> Self {
        match o {
            BasicOpen::Empty => OpenRepr::Empty { empty: true },
            BasicOpen::Basic(c) => OpenRepr::Basic {
                stem: c.stem,
                explicit: c.schedule.explicit().to_vec(),
                base: c.schedule.base(),
                slope: c.schedule.slope(),
            },
        }
    }
}

impl TryFrom<BasicOpen> for Condition {
    type Error = Error;
    fn try_from(o: BasicOpen) -> Result<Self> {
        match o {
            BasicOpen::Empty => Err(Error::EmptyOpen),
            BasicOpen::Basic(c) => Ok(c),
        }
    }
}

impl From<Condition> for BasicOpen {
    fn from(c: Condition) -> Self {
        BasicOpen::Basic(c)
    }
}

impl Condition {
    pub fn new(stem: usize, schedule: BoundSchedule) -> Result<Self> {
        if !schedule.nondecreasing_from(stem) {
            return Err(Error::MalformedSchedule(format!(
                "schedule decreases beyond the stem {stem}"
            )));
        }
        let prefix_max = (0..stem).map(|n| schedule.eval(n)).max().unwrap_or(0);
        if schedule.eval(stem) < prefix_max {
            return Err(Error::MalformedSchedule(format!(
                "g(stem) = {} is below the prefix maximum {prefix_max}",
                schedule.eval(stem)
            )));
        }
        Ok(Condition { stem, schedule })
    }

    /// Convenience constructor from raw schedule parts.
    pub fn from_parts(stem: usize, explicit: &[u64], base: u64, slope: u64) -> Result<Self> {
        Condition::new(stem, BoundSchedule::new(explicit.to_vec(), base, slope)?)
    }

    pub fn stem(&self) -> usize {
        self.stem
    }

    pub fn schedule(&self) -> &BoundSchedule {
        &self.schedule
    }

    pub fn g(&self, n: usize) -> u64 {
        self.schedule.eval(n)
    }

    /// The fixed values `g↾stem`.
    pub fn prefix(&self) -> Vec<u64> {
        self.schedule.values(self.stem)
    }

    pub fn prefix_max(&self) -> u64 {
        self.prefix().into_iter().max().unwrap_or(0)
    }

    pub fn open(self) -> BasicOpen {
        BasicOpen::Basic(self)
    }

    pub fn contains(&self, f: &Point) -> bool {
        let dominated_at = self
            .schedule
            .first_at_least(self.schedule.explicit().len().max(self.stem), f.tail());
        let horizon = f.prefix().len().max(self.stem).max(dominated_at) + 1;
        (0..horizon).all(|n| {
            let (x, bound) = (f.eval(n), self.g(n));
            if n < self.stem {
                x == bound
            } else {
                x <= bound
            }
        })
    }

    pub fn canonical_point(&self) -> Point {
        Point::new(self.prefix(), 0)
    }

    /// Whether `seq` (of length at least the stem) is compatible: equal to the
    /// schedule below the stem and bounded by it afterwards.
    pub fn is_compatible(&self, seq: &[u64]) -> bool {
        seq.len() >= self.stem
            && seq.iter().enumerate().all(|(n, &x)| {
                if n < self.stem {
                    x == self.g(n)
                } else {
                    x <= self.g(n)
                }
            })
    }

    /// Number of compatible nodes of the given length.
    pub fn node_count(&self, depth: usize) -> u128 {
        (self.stem.min(depth)..depth)
            .map(|n| self.g(n) as u128 + 1)
            .fold(1u128, |acc, k| acc.saturating_mul(k))
    }

    /// Calls `visit` on every compatible node of length `depth`, in
    /// lexicographic order. Below the stem the single node is the truncated
    /// prefix. Stops early when `visit` returns `false`; returns whether the
    /// enumeration ran to completion.
    pub fn for_each_node(&self, depth: usize, mut visit: impl FnMut(&[u64]) -> bool) -> bool {
        let fixed = self.stem.min(depth);
        let mut node: Vec<u64> = self.schedule.values(fixed);
        node.resize(depth, 0);
        let bounds: Vec<u64> = (0..depth).map(|n| self.g(n)).collect();
        loop {
            if !visit(&node) {
                return false;
            }
            // odometer over the free coordinates
            let mut i = depth;
            loop {
                if i == fixed {
                    return true;
                }
                i -= 1;
                if node[i] < bounds[i] {
                    node[i] += 1;
                    break;
                }
                node[i] = 0;
            }
        }
    }

    pub fn nodes(&self, depth: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        self.for_each_node(depth, |n| {
            out.push(n.to_vec());
            true
        });
        out
    }

    pub fn intersect(&self, other: &Condition) -> BasicOpen {
        let (long, short) = if self.stem >= other.stem {
            (self, other)
        } else {
            (other, self)
        };
        let stem = long.stem;
        for n in 0..stem {
            let (x, bound) = (long.g(n), short.g(n));
            let ok = if n < short.stem {
                x == bound
            } else {
                x <= bound
            };
            if !ok {
                return BasicOpen::Empty;
            }
        }
        let tail = self.schedule.pointwise_min(&other.schedule);
        let schedule = tail.with_prefix(&long.prefix());
        BasicOpen::Basic(
            Condition::new(stem, schedule)
                .expect("intersection of well-formed opens is well-formed"),
        )
    }

    /// Whether every member of `self` belongs to `other`. Members of `self`
    /// range independently over `[0, g(n)]` beyond the stem, so inclusion
    /// reduces to coordinatewise comparisons.
    pub fn is_subset_of(&self, other: &Condition) -> bool {
        for n in 0..other.stem {
            let ok = if n < self.stem {
                self.g(n) == other.g(n)
            } else {
                self.g(n) == 0 && other.g(n) == 0
            };
            if !ok {
                return false;
            }
        }
        self.schedule.dominated_from(&other.schedule, other.stem)
    }

    /// The split `r_i`: the value at the stem is fixed to `i`.
    pub fn split(&self, i: u64) -> Result<Condition> {
        let bound = self.g(self.stem);
        if i > bound {
            return Err(Error::SplitOutOfRange { value: i, bound });
        }
        Condition::new(self.stem + 1, self.schedule.with_value(self.stem, i))
    }

    /// The cover `{r_i | i <= g(stem)}`.
    pub fn split_cover(&self) -> Vec<Condition> {
        (0..=self.g(self.stem))
            .map(|i| self.split(i).expect("in range"))
            .collect()
    }

    /// `p↾σ`: stem becomes `len(σ)`, schedule follows σ below it.
    pub fn restrict(&self, seq: &[u64]) -> Result<Condition> {
        if !self.is_compatible(seq) {
            return Err(Error::IncompatibleSeq(format!("{seq:?}")));
        }
        Condition::new(seq.len(), self.schedule.with_prefix(seq))
    }

    pub fn forces_value(&self, n: usize) -> Option<u64> {
        (n < self.stem).then(|| self.g(n))
    }

    /// An extension forcing `bound ∈ rng(G)`: unchanged when the prefix
    /// already holds the value, otherwise the first position `k` beyond the
    /// stem with `g(k) >= bound` is fixed to `bound`, with zeros in between.
    pub fn force_into_range(&self, bound: u64) -> Condition {
        if self.prefix().contains(&bound) {
            return self.clone();
        }
        let at = self.schedule.first_at_least(self.stem, bound);
        let mut seq = self.prefix();
        seq.resize(at, 0);
        seq.push(bound);
        self.restrict(&seq)
            .expect("zeros and a dominated value are compatible")
    }

    /// Replace the schedule on `[from, ∞)` by `tail`, keeping it below `from`.
    pub(crate) fn with_tail_from(&self, from: usize, tail: &BoundSchedule) -> Result<Condition> {
        Condition::new(self.stem, tail.with_prefix(&self.schedule.values(from)))
    }
}

impl BasicOpen {
    pub fn basic(stem: usize, explicit: &[u64], base: u64, slope: u64) -> Result<Self> {
        Ok(BasicOpen::Basic(Condition::from_parts(
            stem, explicit, base, slope,
        )?))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, BasicOpen::Empty)
    }

    pub fn condition(&self) -> Result<&Condition> {
        match self {
            BasicOpen::Empty => Err(Error::EmptyOpen),
            BasicOpen::Basic(c) => Ok(c),
        }
    }
}

pub fn eval_schedule(g: &BoundSchedule, n: usize) -> u64 {
    g.eval(n)
}

pub fn member(f: &Point, p: &BasicOpen) -> bool {
    match p {
        BasicOpen::Empty => false,
        BasicOpen::Basic(c) => c.contains(f),
    }
}

pub fn canonical_point(p: &BasicOpen) -> Result<Point> {
    Ok(p.condition()?.canonical_point())
}

pub fn intersect(p: &BasicOpen, q: &BasicOpen) -> BasicOpen {
    match (p, q) {
        (BasicOpen::Basic(a), BasicOpen::Basic(b)) => a.intersect(b),
        _ => BasicOpen::Empty,
    }
}

pub fn subset(p: &BasicOpen, q: &BasicOpen) -> bool {
    match (p, q) {
        (BasicOpen::Empty, _) => true,
        (BasicOpen::Basic(_), BasicOpen::Empty) => false,
        (BasicOpen::Basic(a), BasicOpen::Basic(b)) => a.is_subset_of(b),
    }
}

pub fn split(r: &BasicOpen, i: u64) -> Result<BasicOpen> {
    Ok(r.condition()?.split(i)?.open())
}

pub fn restrict_by_seq(p: &BasicOpen, seq: &CompatSeq) -> Result<BasicOpen> {
    Ok(p.condition()?.restrict(seq.entries())?.open())
}

#[allow(non_snake_case)]
pub fn forces_G_value(p: &BasicOpen, n: usize) -> Result<Option<u64>> {
    Ok(p.condition()?.forces_value(n))
}

pub fn force_value_into_range(p: &BasicOpen, bound: u64) -> Result<BasicOpen> {
    Ok(p.condition()?.force_into_range(bound).open())
}

/// A finite sequence checked to be compatible with an ambient open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatSeq {
    entries: Vec<u64>,
    ambient: Condition,
}

impl CompatSeq {
    pub fn new(entries: Vec<u64>, ambient: &BasicOpen) -> Result<Self> {
        let ambient = ambient.condition()?;
        if !ambient.is_compatible(&entries) {
            return Err(Error::IncompatibleSeq(format!("{entries:?}")));
        }
        Ok(CompatSeq {
            entries,
            ambient: ambient.clone(),
        })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn ambient(&self) -> &Condition {
        &self.ambient
    }
}
