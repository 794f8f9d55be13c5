use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An eventually periodic set of naturals: `prefix[n]` for `n < prefix.len()`,
/// then `period` repeated.
///
/// Stored with the shortest period and then the shortest prefix, so equal
/// sets have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BitsRepr", into = "BitsRepr")]
pub struct PeriodicSet {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct BitsRepr {
    prefix_bits: Vec<u8>,
    period_bits: Vec<u8>,
}

fn bits(raw: Vec<u8>) -> Result<Vec<bool>> {
    raw.into_iter()
        .map(|b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::MalformedOracle(format!("bit {other} is not 0 or 1"))),
        })
        .collect()
}

impl TryFrom<BitsRepr> for PeriodicSet {
    type Error = Error;
    fn try_from(r: BitsRepr) -> Result<Self> {
        PeriodicSet::new(bits(r.prefix_bits)?, bits(r.period_bits)?)
    }
}

impl From<PeriodicSet> for BitsRepr {
    fn from(s: PeriodicSet) -> Self {
        let raw = |v: Vec<bool>| v.into_iter().map(u8::from).collect();
        BitsRepr {
            prefix_bits: raw(s.prefix),
            period_bits: raw(s.period),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl PeriodicSet {
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::MalformedOracle("period must be nonempty".into()));
        }
        Ok(PeriodicSet { prefix, period }.normalized())
    }

    pub fn empty() -> Self {
        PeriodicSet {
            prefix: Vec::new(),
            period: vec![false],
        }
    }

    pub fn all() -> Self {
        PeriodicSet {
            prefix: Vec::new(),
            period: vec![true],
        }
    }

    /// `{n | n ≡ residue mod modulus}`.
    pub fn residues(modulus: usize, residues: &[usize]) -> Self {
        let mut period = vec![false; modulus.max(1)];
        let len = period.len();
        for &r in residues {
            period[r % len] = true;
        }
        PeriodicSet {
            prefix: Vec::new(),
            period,
        }
        .normalized()
    }

    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Self {
        let mut prefix = Vec::new();
        for e in elements {
            let e = e as usize;
            if prefix.len() <= e {
                prefix.resize(e + 1, false);
            }
            prefix[e] = true;
        }
        PeriodicSet {
            prefix,
            period: vec![false],
        }
        .normalized()
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    fn normalized(mut self) -> Self {
        let len = self.period.len();
        if let Some(d) = (1..len).find(|&d| {
            len.is_multiple_of(d) && (0..len).all(|i| self.period[i] == self.period[i % d])
        }) {
            self.period.truncate(d);
        }
        while let Some(&last) = self.prefix.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.prefix.pop();
            self.period.rotate_right(1);
        }
        self
    }

    pub fn contains(&self, n: u64) -> bool {
        let n = n as usize;
        match self.prefix.get(n) {
            Some(&b) => b,
            None => self.period[(n - self.prefix.len()) % self.period.len()],
        }
    }

    /// Combines two sets pointwise over one common period.
    pub fn zip_with(&self, other: &PeriodicSet, op: impl Fn(bool, bool) -> bool) -> PeriodicSet {
        let start = self.prefix.len().max(other.prefix.len());
        let (a, b) = (self.period.len(), other.period.len());
        let lcm = a / gcd(a, b) * b;
        let at = |n: usize| op(self.contains(n as u64), other.contains(n as u64));
        let prefix = (0..start).map(at).collect();
        let period = (start..start + lcm).map(at).collect();
        PeriodicSet { prefix, period }.normalized()
    }

    pub fn union(&self, other: &PeriodicSet) -> PeriodicSet {
        self.zip_with(other, |x, y| x || y)
    }

    pub fn intersection(&self, other: &PeriodicSet) -> PeriodicSet {
        self.zip_with(other, |x, y| x && y)
    }

    pub fn complement(&self) -> PeriodicSet {
        let flip = |v: &[bool]| v.iter().map(|b| !b).collect();
        PeriodicSet {
            prefix: flip(&self.prefix),
            period: flip(&self.period),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period.iter().all(|b| !b)
    }

    pub fn is_cofinite(&self) -> bool {
        self.period.iter().all(|&b| b)
    }

    /// Whether the set is infinite, i.e. a point of the space.
    pub fn is_unbounded(&self) -> bool {
        !self.is_finite()
    }

    /// Least element `> n`, if any.
    pub fn least_above(&self, n: u64) -> Option<u64> {
        let horizon = (self.prefix.len() + self.period.len()) as u64;
        let last = n.max(horizon) + self.period.len() as u64;
        (n + 1..=last).find(|&m| self.contains(m))
    }

    /// The elements of a finite set, or `None` if it is infinite.
    pub fn elements(&self) -> Option<Vec<u64>> {
        self.is_finite().then(|| {
            self.prefix
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i as u64)
                .collect()
        })
    }

    /// The same set modulo finite differences, with an empty prefix.
    pub fn mod_finite(&self) -> PeriodicSet {
        let mut period = self.period.clone();
        let shift = self.prefix.len() % period.len();
        period.rotate_right(shift);
        PeriodicSet {
            prefix: Vec::new(),
            period,
        }
        .normalized()
    }
}
