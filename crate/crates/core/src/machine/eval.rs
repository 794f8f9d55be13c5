use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::machine::pairing::{pair, unpair};
use crate::machine::Program;

/// Nested self-applications deeper than this count as non-convergence.
pub const APPLY_DEPTH_LIMIT: usize = 2048;

struct Halt;

/// A converged run: the output and the number of steps taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    pub value: u64,
    pub steps: u64,
}

/// Step-counted evaluator. Keeps decoded programs for self-application.
#[derive(Default)]
pub struct Machine {
    decoded: HashMap<u64, Rc<Program>>,
    budget: u64,
    steps: u64,
    depth: usize,
}

impl Machine {
    pub fn new() -> Self {
        Self::default()
    }

    fn decode(&mut self, w: u64) -> Rc<Program> {
        self.decoded
            .entry(w)
            .or_insert_with(|| Rc::new(Program::from_u64(w)))
            .clone()
    }

    /// Runs `p` on `z`, succeeding only if it halts in fewer than `budget`
    /// steps.
    pub fn run(&mut self, p: &Program, z: u64, budget: u64) -> Option<Run> {
        self.budget = budget;
        self.steps = 0;
        self.depth = 0;
        let value = self.step(p, z).ok()?;
        Some(Run {
            value,
            steps: self.steps,
        })
    }

    pub fn run_index(&mut self, w: u64, z: u64, budget: u64) -> Option<Run> {
        let p = self.decode(w);
        self.run(&p, z, budget)
    }

    fn tick(&mut self) -> Result<(), Halt> {
        self.steps += 1;
        if self.steps >= self.budget {
            Err(Halt)
        } else {
            Ok(())
        }
    }

    fn step(&mut self, p: &Program, x: u64) -> Result<u64, Halt> {
        self.tick()?;
        Ok(match p {
            Program::Zero => 0,
            Program::Succ => x.saturating_add(1),
            Program::Id => x,
            Program::Left => unpair(x).0,
            Program::Right => unpair(x).1,
            Program::Const(c) => c.to_u64().unwrap_or(u64::MAX),
            Program::Seq(list) => usize::try_from(x)
                .ok()
                .and_then(|i| list.get(i))
                .copied()
                .unwrap_or(0),
            Program::Comp(f, g) => {
                let y = self.step(g, x)?;
                self.step(f, y)?
            }
            Program::Pair(f, g) => {
                let a = self.step(f, x)?;
                let b = self.step(g, x)?;
                pair(a, b)
            }
            Program::Rec(f, g) => {
                let (a, n) = unpair(x);
                let mut acc = self.step(f, a)?;
                for i in 0..n {
                    self.tick()?;
                    acc = self.step(g, pair(pair(a, i), acc))?;
                }
                acc
            }
            Program::Min(f) => {
                let (a, b) = unpair(x);
                let mut found = b;
                for y in 0..b {
                    self.tick()?;
                    if self.step(f, pair(a, y))? == 0 {
                        found = y;
                        break;
                    }
                }
                found
            }
            Program::Mu(f) => {
                let mut y = 0u64;
                loop {
                    self.tick()?;
                    if self.step(f, pair(x, y))? == 0 {
                        break y;
                    }
                    y = y.checked_add(1).ok_or(Halt)?;
                }
            }
            Program::Apply(f, g) => {
                let w = self.step(f, x)?;
                let z = self.step(g, x)?;
                if self.depth >= APPLY_DEPTH_LIMIT {
                    return Err(Halt);
                }
                let callee = self.decode(w);
                self.depth += 1;
                let out = self.step(&callee, z);
                self.depth -= 1;
                out?
            }
        })
    }
}

/// `{w}(z)` if it converges in fewer than `budget` steps.
pub fn eval_steps(w: &BigUint, z: u64, budget: u64) -> Option<u64> {
    let p = Program::from_index(w);
    Machine::new().run(&p, z, budget).map(|r| r.value)
}

/// `{w}(z)↓_{<n}`: converges in fewer than `n` steps with output below `n`.
pub fn converges_below(machine: &mut Machine, w: u64, z: u64, n: u64) -> Option<u64> {
    machine
        .run_index(w, z, n)
        .map(|r| r.value)
        .filter(|&v| v < n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn successor_and_budgets() {
        assert_eq!(eval_steps(&big(1), 4, 100), Some(5));
        assert_eq!(eval_steps(&big(1), 4, 0), None);
        assert_eq!(eval_steps(&big(1), 4, 1), None);
        assert_eq!(eval_steps(&big(1), 4, 2), Some(5));
        for budget in [10, 1000, 100_000] {
            assert_eq!(eval_steps(&big(19), 3, budget), None);
        }
        assert_eq!(eval_steps(&big(11), 3, 100), Some(0));
    }

    #[test]
    fn combinators() {
        let mut m = Machine::new();
        let add: Program = "(rec id (comp succ right))".parse().unwrap();
        assert_eq!(m.run(&add, pair(3, 4), 1000).unwrap().value, 7);
        let first_zero: Program = "(min (comp (seq 5 4 0 1) right))".parse().unwrap();
        assert_eq!(m.run(&first_zero, pair(0, 10), 1000).unwrap().value, 2);
        assert_eq!(m.run(&first_zero, pair(0, 2), 1000).unwrap().value, 2);
        let call: Program = "(apply (const 1) id)".parse().unwrap();
        assert_eq!(m.run(&call, 9, 100).unwrap().value, 10);
    }

    #[test]
    fn larger_budgets_agree() {
        let mut m = Machine::new();
        for w in 0..400u64 {
            for z in 0..5 {
                if let Some(r) = m.run_index(w, z, 200) {
                    assert_eq!(m.run_index(w, z, 5000).unwrap(), r);
                    assert!(m.run_index(w, z, r.steps).is_none());
                    assert_eq!(m.run_index(w, z, r.steps + 1), Some(r));
                }
            }
        }
    }
}
