use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An unbounded bounding sequence in explicit-prefix plus affine-tail form:
/// `g(n) = explicit[n]` for `n < explicit.len()`, and
/// `g(n) = base + slope * (n - explicit.len())` afterwards.
///
/// Values are kept in canonical form: the explicit part never ends in an
/// entry that the affine tail would reproduce, so two schedules are equal as
/// functions iff they are equal as values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr", into = "ScheduleRepr")]
pub struct BoundSchedule {
    explicit: Vec<u64>,
    base: u64,
    slope: u64,
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    explicit: Vec<u64>,
    base: u64,
    slope: u64,
}

impl TryFrom<ScheduleRepr> for BoundSchedule {
    type Error = Error;
    fn try_from(r: ScheduleRepr) -> Result<Self> {
        BoundSchedule::new(r.explicit, r.base, r.slope)
    }
}

impl From<BoundSchedule> for ScheduleRepr {
    fn from(s: BoundSchedule) -> Self {
        ScheduleRepr {
            explicit: s.explicit,
            base: s.base,
            slope: s.slope,
        }
    }
}

impl BoundSchedule {
    pub fn new(explicit: Vec<u64>, base: u64, slope: u64) -> Result<Self> {
        if slope == 0 {
            return Err(Error::MalformedSchedule(
                "tail slope must be at least 1".into(),
            ));
        }
        Ok(BoundSchedule {
            explicit,
            base,
            slope,
        }
        .normalized())
    }

    /// The affine schedule `n ↦ base + slope·n`.
    pub fn affine(base: u64, slope: u64) -> Result<Self> {
        Self::new(Vec::new(), base, slope)
    }

    pub fn explicit(&self) -> &[u64] {
        &self.explicit
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn slope(&self) -> u64 {
        self.slope
    }

    pub fn eval(&self, n: usize) -> u64 {
        match self.explicit.get(n) {
            Some(&v) => v,
            None => {
                let offset = (n - self.explicit.len()) as u64;
                self.base.saturating_add(self.slope.saturating_mul(offset))
            }
        }
    }

    /// The values `g(0..len)`.
    pub fn values(&self, len: usize) -> Vec<u64> {
        (0..len).map(|n| self.eval(n)).collect()
    }

    fn normalized(mut self) -> Self {
        while let Some(&last) = self.explicit.last() {
            if self.base >= self.slope && last == self.base - self.slope {
                self.explicit.pop();
                self.base = last;
            } else {
                break;
            }
        }
        self
    }

    /// Same function, with the first `values.len()` entries replaced.
    pub fn with_prefix(&self, values: &[u64]) -> Self {
        let len = values.len().max(self.explicit.len());
        let mut explicit: Vec<u64> = self.values(len);
        explicit[..values.len()].copy_from_slice(values);
        let base = self.eval(len);
        BoundSchedule {
            explicit,
            base,
            slope: self.slope,
        }
        .normalized()
    }

    pub fn with_value(&self, n: usize, value: u64) -> Self {
        let mut explicit = self.values((n + 1).max(self.explicit.len()));
        explicit[n] = value;
        let base = self.eval(explicit.len());
        BoundSchedule {
            explicit,
            base,
            slope: self.slope,
        }
        .normalized()
    }

    /// Pointwise minimum, re-normalized into a single affine tail. Two affine
    /// tails cross at most once, after which the smaller slope stays below.
    pub fn pointwise_min(&self, other: &BoundSchedule) -> BoundSchedule {
        let start = self.explicit.len().max(other.explicit.len());
        let (a, b) = (self.eval(start), other.eval(start));
        let (low, high) = if self.slope <= other.slope {
            (self, other)
        } else {
            (other, self)
        };
        let (vl, vh) = if self.slope <= other.slope {
            (a, b)
        } else {
            (b, a)
        };
        let cross = if low.slope == high.slope || vl <= vh {
            start
        } else {
            let gap = vl - vh;
            let closing = high.slope - low.slope;
            start + gap.div_ceil(closing) as usize
        };
        let explicit: Vec<u64> = (0..cross)
            .map(|n| self.eval(n).min(other.eval(n)))
            .collect();
        let base = if low.slope == high.slope {
            vl.min(vh)
        } else {
            low.eval(cross)
        };
        BoundSchedule {
            explicit,
            base,
            slope: low.slope,
        }
        .normalized()
    }

    /// Whether `self(n) <= other(n)` for every `n >= start`.
    pub fn dominated_from(&self, other: &BoundSchedule, start: usize) -> bool {
        let horizon = self.explicit.len().max(other.explicit.len()).max(start);
        if (start..horizon).any(|n| self.eval(n) > other.eval(n)) {
            return false;
        }
        self.eval(horizon) <= other.eval(horizon) && self.slope <= other.slope
    }

    /// Whether the schedule is non-decreasing on `[start, ∞)`.
    pub fn nondecreasing_from(&self, start: usize) -> bool {
        let horizon = self.explicit.len().max(start);
        (start..horizon).all(|n| self.eval(n) <= self.eval(n + 1))
    }

    /// Least `n >= from` with `g(n) >= target`.
    pub fn first_at_least(&self, from: usize, target: u64) -> usize {
        let mut n = from;
        while n < self.explicit.len() {
            if self.eval(n) >= target {
                return n;
            }
            n += 1;
        }
        let at = self.eval(n);
        if at >= target {
            return n;
        }
        n + (target - at).div_ceil(self.slope) as usize
    }

    /// Least `n >= from` with `g(n) > target`.
    pub fn first_above(&self, from: usize, target: u64) -> usize {
        self.first_at_least(from, target.saturating_add(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(explicit: &[u64], base: u64, slope: u64) -> BoundSchedule {
        BoundSchedule::new(explicit.to_vec(), base, slope).unwrap()
    }

    #[test]
    fn eval_examples() {
        let g = sched(&[3, 1], 3, 1);
        assert_eq!(g.eval(0), 3);
        assert_eq!(g.eval(5), 6);
        assert_eq!(sched(&[], 0, 2).eval(4), 8);
    }

    #[test]
    fn zero_slope_rejected() {
        assert!(matches!(
            BoundSchedule::new(vec![], 3, 0),
            Err(Error::MalformedSchedule(_))
        ));
    }

    #[test]
    fn canonical_form_drops_redundant_explicit_entries() {
        let g = sched(&[2, 3, 4], 5, 1);
        assert_eq!(g, sched(&[], 2, 1));
        assert!(g.explicit().is_empty());
    }

    #[test]
    fn min_of_crossing_tails() {
        // n+2 against 2n: 2n is smaller up to n=2, then n+2 wins.
        let a = sched(&[], 2, 1);
        let b = sched(&[], 0, 2);
        let m = a.pointwise_min(&b);
        for n in 0..60 {
            assert_eq!(m.eval(n), a.eval(n).min(b.eval(n)), "n={n}");
        }
        assert_eq!(m.slope(), 1);
    }

    #[test]
    fn domination_and_search() {
        let a = sched(&[1, 1], 2, 1);
        let b = sched(&[], 1, 1);
        assert!(a.dominated_from(&b, 0));
        assert!(!b.dominated_from(&a, 0));
        assert!(!sched(&[], 0, 2).dominated_from(&sched(&[], 100, 1), 0));
        assert_eq!(b.first_at_least(0, 4), 3);
        assert_eq!(b.first_above(0, 4), 4);
        assert_eq!(a.first_at_least(0, 1), 0);
    }

    #[test]
    fn overrides_keep_function_elsewhere() {
        let g = sched(&[], 1, 1);
        let h = g.with_value(3, 0);
        assert_eq!(h.values(6), vec![1, 2, 3, 0, 5, 6]);
        let p = g.with_prefix(&[7, 7]);
        assert_eq!(p.values(4), vec![7, 7, 3, 4]);
    }
}
