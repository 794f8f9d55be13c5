use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{check_proof, unpair, Machine, Program};

/// Steps allowed for a run whose convergence must be established outright.
pub const DEFAULT_STEP_CAP: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VTrace {
    pub n: u64,
    pub qualifying_ks: Vec<u64>,
    pub value: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cost {
    /// `max(steps, output) + 1`: the least `n` with `↓_{<n}`.
    Known(u64),
    /// Did not converge within the step cap.
    Beyond,
}

/// Computes `v` from the monotone cost table
/// `C(k) = max { max(steps, output) + 1 | j, w, z < k, check_proof(j, w) }`:
/// `k` qualifies for `n` iff `C(k) <= n`, so `v(n)` is the largest `k < n`
/// with `C(k) <= n`.
pub struct FpLab {
    machine: Machine,
    step_cap: u64,
    /// `costs[k] = C(k)`.
    costs: Vec<Cost>,
    /// Certified program indices `w` with `2w + 1 < costs.len() - 1`.
    certified: Vec<u64>,
}

impl Default for FpLab {
    fn default() -> Self {
        Self::new(DEFAULT_STEP_CAP)
    }
}

fn worse(a: Cost, b: Cost) -> Cost {
    match (a, b) {
        (Cost::Known(x), Cost::Known(y)) => Cost::Known(x.max(y)),
        _ => Cost::Beyond,
    }
}

impl FpLab {
    pub fn new(step_cap: u64) -> Self {
        FpLab {
            machine: Machine::new(),
            step_cap,
            costs: vec![Cost::Known(0)],
            certified: Vec::new(),
        }
    }

    fn cost_of(&mut self, w: u64, z: u64) -> Cost {
        match self.machine.run_index(w, z, self.step_cap) {
            Some(r) => Cost::Known(r.steps.max(r.value).saturating_add(1)),
            None => Cost::Beyond,
        }
    }

    /// Extends the table so that `C(k)` is known.
    fn cost(&mut self, k: u64) -> Cost {
        while self.costs.len() as u64 <= k {
            // triples below `next` that are not below `next - 1`
            let next = self.costs.len() as u64;
            let last = next - 1;
            let mut c = self.costs[last as usize];
            for i in 0..self.certified.len() {
                c = worse(c, self.cost_of(self.certified[i], last));
            }
            if last % 2 == 1 {
                let w = (last - 1) / 2;
                if check_proof(&BigUint::from(last), &BigUint::from(w)) {
                    self.certified.push(w);
                    for z in 0..=last {
                        c = worse(c, self.cost_of(w, z));
                    }
                }
            }
            self.costs.push(c);
        }
        self.costs[k as usize]
    }

    fn qualifies(&mut self, k: u64, n: u64) -> Result<bool> {
        match self.cost(k) {
            Cost::Known(c) => Ok(c <= n),
            Cost::Beyond if n <= self.step_cap => Ok(false),
            Cost::Beyond => Err(Error::BudgetExhausted(format!(
                "a certified run below {k} exceeds the step cap {}",
                self.step_cap
            ))),
        }
    }

    /// `v(n)` restricted to `k <= limit`.
    pub fn v_upto(&mut self, n: u64, limit: u64) -> Result<u64> {
        let mut best = 0;
        for k in 1..n.min(limit.saturating_add(1)) {
            if !self.qualifies(k, n)? {
                break;
            }
            best = k;
        }
        Ok(best)
    }

    pub fn v(&mut self, n: u64) -> Result<VTrace> {
        let value = self.v_upto(n, u64::MAX)?;
        let qualifying_ks = if n == 0 {
            Vec::new()
        } else {
            (0..=value).collect()
        };
        Ok(VTrace {
            n,
            qualifying_ks,
            value,
        })
    }

    /// An `n` with `v(n) >= k`, post-verified.
    pub fn unbounded_witness(&mut self, k: u64) -> Result<u64> {
        let n = match self.cost(k) {
            Cost::Known(c) => c.max(k + 1),
            Cost::Beyond => {
                return Err(Error::BudgetExhausted(format!(
                    "a certified run below {k} exceeds the step cap"
                )))
            }
        };
        let got = self.v_upto(n, k)?;
        assert!(got >= k, "v({n}) = {got} < {k}");
        Ok(n)
    }

    /// The table `(n, v(first({x}(n))))` for `cert < n <= cert + window`,
    /// checking `f(n) <= n` throughout.
    pub fn pseudobound_scenario(
        &mut self,
        x: &Program,
        cert: u64,
        window: u64,
    ) -> Result<Vec<(u64, u64)>> {
        let index = x.index();
        let bad = || Error::BadCertificate {
            cert,
            program: x.to_string(),
        };
        if !check_proof(&BigUint::from(cert), &index) || BigUint::from(cert) <= index {
            return Err(bad());
        }
        let mut table = Vec::with_capacity(window as usize);
        for n in cert + 1..=cert.saturating_add(window) {
            let out = self
                .machine
                .run(x, n, self.step_cap)
                .ok_or_else(|| Error::BudgetExhausted(format!("{x} on {n}")))?;
            let m = unpair(out.value).0;
            let f = self.v_upto(m, n + 1)?;
            if f > n {
                return Err(Error::TheoremViolated { n, value: f });
            }
            table.push((n, f));
        }
        Ok(table)
    }
}

/// The certificate of `x` as a machine word, if it fits.
pub fn certificate_u64(x: &Program) -> Option<u64> {
    crate::machine::certificate(&x.index()).to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::eval_steps;

    /// The definition read literally: all triples below `k`, all `k < n`.
    fn v_brute(n: u64) -> u64 {
        let mut best = 0;
        for k in 0..n {
            let ok = (0..k).all(|j| {
                (0..k).all(|w| {
                    !check_proof(&BigUint::from(j), &BigUint::from(w))
                        || (0..k)
                            .all(|z| eval_steps(&BigUint::from(w), z, n).is_some_and(|v| v < n))
                })
            });
            if ok {
                best = k;
            }
        }
        best
    }

    #[test]
    fn small_values_match_the_definition() {
        let mut lab = FpLab::default();
        assert_eq!(lab.v(0).unwrap().value, 0);
        assert_eq!(lab.v(1).unwrap().value, 0);
        for n in 0..40 {
            assert_eq!(lab.v(n).unwrap().value, v_brute(n), "n={n}");
        }
    }

    #[test]
    fn witnesses() {
        let mut lab = FpLab::default();
        assert_eq!(lab.unbounded_witness(0).unwrap(), 1);
        for k in 1..=10 {
            let n = lab.unbounded_witness(k).unwrap();
            assert!(lab.v(n).unwrap().value >= k);
        }
    }

    #[test]
    fn scenarios() {
        let mut lab = FpLab::default();
        let zero_pair: Program = "(pair zero zero)".parse().unwrap();
        let cert = certificate_u64(&zero_pair).unwrap();
        let table = lab.pseudobound_scenario(&zero_pair, cert, 20).unwrap();
        assert!(table.iter().all(|&(_, f)| f == 0));
        let diag: Program = "(pair id zero)".parse().unwrap();
        let cert = certificate_u64(&diag).unwrap();
        for (n, f) in lab.pseudobound_scenario(&diag, cert, 30).unwrap() {
            assert_eq!(f, lab.v(n).unwrap().value);
            assert!(f < n);
        }
        assert!(matches!(
            lab.pseudobound_scenario(&diag, cert + 2, 5),
            Err(Error::BadCertificate { .. })
        ));
    }
}
