use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::PeriodicSet;

/// A basic open `⟨P, N⟩`: the infinite sets containing `P` and meeting `N`
/// only finitely. `N` matters only modulo finite sets and is stored as its
/// prefix-free representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SetOpenRepr", into = "SetOpenRepr")]
pub struct SetOpen {
    positive: BTreeSet<u64>,
    negative: PeriodicSet,
}

#[derive(Serialize, Deserialize)]
struct SetOpenRepr {
    positive: BTreeSet<u64>,
    negative: PeriodicSet,
}

impl TryFrom<SetOpenRepr> for SetOpen {
    type Error = Error;
    fn try_from(r: SetOpenRepr) -> Result<Self> {
        Ok(SetOpen::new(r.positive, r.negative))
    }
}

impl From<SetOpen> for SetOpenRepr {
    fn from(o: SetOpen) -> Self {
        SetOpenRepr {
            positive: o.positive,
            negative: o.negative,
        }
    }
}

impl SetOpen {
    pub fn new(positive: impl IntoIterator<Item = u64>, negative: PeriodicSet) -> Self {
        SetOpen {
            positive: positive.into_iter().collect(),
            negative: negative.mod_finite(),
        }
    }

    pub fn positive(&self) -> &BTreeSet<u64> {
        &self.positive
    }

    pub fn negative(&self) -> &PeriodicSet {
        &self.negative
    }

    pub fn is_empty(&self) -> bool {
        self.negative.is_cofinite()
    }

    fn nonempty(&self) -> Result<&Self> {
        if self.is_empty() {
            Err(Error::EmptyOpen)
        } else {
            Ok(self)
        }
    }

    /// Whether every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &SetOpen) -> bool {
        self.is_empty()
            || (other.positive.is_subset(&self.positive)
                && other
                    .negative
                    .intersection(&self.negative.complement())
                    .is_finite())
    }
}

pub fn member_set(x: &PeriodicSet, o: &SetOpen) -> Result<bool> {
    if !x.is_unbounded() {
        return Err(Error::NotAPoint);
    }
    Ok(o.positive.iter().all(|&n| x.contains(n)) && o.negative.intersection(x).is_finite())
}

pub fn intersect_set(o: &SetOpen, u: &SetOpen) -> SetOpen {
    SetOpen::new(
        o.positive.union(&u.positive).copied(),
        o.negative.union(&u.negative),
    )
}

/// `P ∪ (ℕ − N)`, the canonical member.
pub fn canonical_set_point(o: &SetOpen) -> Result<PeriodicSet> {
    let o = o.nonempty()?;
    Ok(PeriodicSet::finite(o.positive.iter().copied()).union(&o.negative.complement()))
}

pub fn forces_in_generic(o: &SetOpen, n: u64) -> Result<bool> {
    Ok(o.nonempty()?.positive.contains(&n))
}

/// `⟨{j}, ∅⟩` for the least `j > n` in `X`.
pub fn unbounded_step(x: &PeriodicSet, n: u64) -> Result<SetOpen> {
    if !x.is_unbounded() {
        return Err(Error::NotAPoint);
    }
    let j = x
        .least_above(n)
        .expect("infinite sets have elements above any bound");
    Ok(SetOpen::new([j], PeriodicSet::empty()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityCheck {
    pub holds: bool,
    /// A common point of `⟨Pext, N_O⟩` and `V`.
    pub witness: PeriodicSet,
}

/// Checks that `O′ = ⟨Pext, N_O⟩` meets the nonempty subopen `V` of `O`,
/// exhibiting `Pext ∪ P_V ∪ (ℕ − N_V)` as a common point.
pub fn compatible_extension_check(
    o: &SetOpen,
    pext: &BTreeSet<u64>,
    v: &SetOpen,
) -> Result<CompatibilityCheck> {
    if !o.positive.is_subset(pext) {
        return Err(Error::BadCandidate("the extension must contain P_O".into()));
    }
    if v.is_empty() || !v.is_subset_of(o) {
        return Err(Error::NotASubopen);
    }
    let extended = SetOpen::new(pext.iter().copied(), o.negative.clone());
    let witness =
        PeriodicSet::finite(pext.union(&v.positive).copied()).union(&v.negative.complement());
    let holds = member_set(&witness, &extended)? && member_set(&witness, v)?;
    Ok(CompatibilityCheck { holds, witness })
}

/// Validates a family decided below `O` and returns `max(P_O)` (0 when `P_O`
/// is empty) as the bound `O` forces on it. Each entry `(P_U, value)` says the
/// neighbourhood `⟨P_U, N_O⟩` of the canonical point decides the value.
pub fn sequential_bound(o: &SetOpen, decided: &[(BTreeSet<u64>, u64)]) -> Result<u64> {
    let x = canonical_set_point(o)?;
    for (pu, value) in decided {
        if let Some(bad) = pu.iter().find(|&&n| !x.contains(n)) {
            return Err(Error::InconsistentTermFamily(format!(
                "{bad} is not in the canonical point"
            )));
        }
        if !o.positive.contains(value) {
            return Err(Error::InconsistentTermFamily(format!(
                "decided value {value} is not in P_O"
            )));
        }
        let u = SetOpen::new(pu.iter().copied(), o.negative.clone());
        let below = intersect_set(o, &u);
        let check =
            compatible_extension_check(o, &o.positive.union(pu).copied().collect(), &below)?;
        if !check.holds {
            return Err(Error::InconsistentTermFamily(format!(
                "no common point for value {value}"
            )));
        }
    }
    Ok(o.positive.iter().next_back().copied().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> PeriodicSet {
        PeriodicSet::residues(2, &[0])
    }

    fn odds() -> PeriodicSet {
        PeriodicSet::residues(2, &[1])
    }

    fn set(xs: &[u64]) -> BTreeSet<u64> {
        xs.iter().copied().collect()
    }

    #[test]
    fn membership() {
        let o = SetOpen::new([1, 3], evens());
        assert!(member_set(&odds(), &o).unwrap());
        assert!(!member_set(&evens(), &o).unwrap());
        assert!(!member_set(&PeriodicSet::all(), &SetOpen::new([], PeriodicSet::all())).unwrap());
        assert_eq!(
            member_set(&PeriodicSet::finite([1, 2]), &o),
            Err(Error::NotAPoint)
        );
    }

    #[test]
    fn intersection_is_union_of_components() {
        let o = SetOpen::new([1, 3], evens());
        let u = SetOpen::new([3, 5], PeriodicSet::residues(3, &[0]));
        let w = intersect_set(&o, &u);
        assert_eq!(w.positive(), &set(&[1, 3, 5]));
        assert!(!w.is_empty());
        assert_eq!(intersect_set(&o, &o), o);
        assert!(intersect_set(&o, &SetOpen::new([], PeriodicSet::all())).is_empty());
    }

    #[test]
    fn canonical_point_and_forcing() {
        let o = SetOpen::new([1, 3], evens());
        let x = canonical_set_point(&o).unwrap();
        assert_eq!(x, odds());
        assert!(member_set(&x, &o).unwrap());
        assert_eq!(
            canonical_set_point(&SetOpen::new([], PeriodicSet::empty())).unwrap(),
            PeriodicSet::all()
        );
        let empty = SetOpen::new([], PeriodicSet::all());
        assert_eq!(canonical_set_point(&empty), Err(Error::EmptyOpen));
        assert!(forces_in_generic(&o, 3).unwrap());
        assert!(!forces_in_generic(&o, 2).unwrap());
        assert_eq!(forces_in_generic(&empty, 1), Err(Error::EmptyOpen));
    }

    #[test]
    fn unbounded_steps() {
        assert_eq!(unbounded_step(&odds(), 4).unwrap().positive(), &set(&[5]));
        assert_eq!(unbounded_step(&evens(), 0).unwrap().positive(), &set(&[2]));
        assert_eq!(
            unbounded_step(&PeriodicSet::all(), 7).unwrap().positive(),
            &set(&[8])
        );
        assert_eq!(
            unbounded_step(&PeriodicSet::finite([3]), 1),
            Err(Error::NotAPoint)
        );
    }

    #[test]
    fn compatibility() {
        let o = SetOpen::new([1], evens());
        let v = SetOpen::new([1, 3], evens().union(&PeriodicSet::residues(5, &[0])));
        let check = compatible_extension_check(&o, &set(&[1, 7]), &v).unwrap();
        assert!(check.holds);
        for n in [1, 3, 7] {
            assert!(check.witness.contains(n));
        }
        assert!(
            compatible_extension_check(&o, &set(&[1]), &v)
                .unwrap()
                .holds
        );
        let empty = SetOpen::new([], PeriodicSet::all());
        assert_eq!(
            compatible_extension_check(&o, &set(&[1]), &empty),
            Err(Error::NotASubopen)
        );
        let wider = SetOpen::new([], PeriodicSet::empty());
        assert_eq!(
            compatible_extension_check(&o, &set(&[1]), &wider),
            Err(Error::NotASubopen)
        );
    }

    #[test]
    fn sequential_bounds() {
        let o = SetOpen::new([2, 9], evens());
        let decided = vec![(set(&[9]), 9), (set(&[2]), 2), (set(&[2, 9]), 9)];
        assert_eq!(sequential_bound(&o, &decided).unwrap(), 9);
        assert_eq!(sequential_bound(&o, &[]).unwrap(), 9);
        assert!(matches!(
            sequential_bound(&o, &[(set(&[9]), 5)]),
            Err(Error::InconsistentTermFamily(_))
        ));
    }
}
