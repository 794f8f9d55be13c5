use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{Machine, Program};

/// `g(i) = values[i]` below the length, 0 afterwards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSupportFn {
    pub values: Vec<u64>,
}

impl FiniteSupportFn {
    pub fn zeros() -> Self {
        FiniteSupportFn { values: Vec::new() }
    }

    pub fn eval(&self, i: u64) -> u64 {
        usize::try_from(i)
            .ok()
            .and_then(|i| self.values.get(i))
            .copied()
            .unwrap_or(0)
    }

    pub fn extends_zeros(&self, m: usize) -> bool {
        self.values.iter().take(m).all(|&v| v == 0)
    }

    pub fn program(&self) -> Program {
        Program::Seq(self.values.clone())
    }
}

/// The constant-0 function `e_0`.
pub fn e0() -> Program {
    Program::Zero
}

/// The constant-0 functional `E_0`.
pub fn big_e0() -> Program {
    Program::Zero
}

fn index_word(p: &Program) -> Result<u64> {
    p.index()
        .to_u64()
        .ok_or_else(|| Error::BudgetExhausted(format!("the index of {p} exceeds a machine word")))
}

/// `{z}(g)` with `g` passed by index.
pub fn apply_functional(
    machine: &mut Machine,
    z: &Program,
    g: &Program,
    budget: u64,
) -> Result<u64> {
    let arg = index_word(g)?;
    machine
        .run(z, arg, budget)
        .map(|r| r.value)
        .ok_or_else(|| Error::BudgetExhausted(format!("{z} on {g}")))
}

/// `α ↦ 0` if `α(m+1) = 0`, else `β(α(m+1) - 1)`.
pub fn make_f_beta(beta: &Program, m: u64) -> Program {
    let step = Program::comp(beta.clone(), Program::comp(Program::Right, Program::Left));
    let select = Program::comp(
        Program::rec(Program::Zero, step),
        Program::pair(Program::Zero, Program::Id),
    );
    Program::comp(
        select,
        Program::apply(Program::Id, Program::constant(m + 1)),
    )
}

/// Some `g` extending `0^m`, supported below `support_bound + 1` with values
/// below `value_bound`, that `z` separates from `e_0`.
pub fn az_witness(
    z: &Program,
    m: usize,
    support_bound: usize,
    value_bound: u64,
    budget: u64,
) -> Result<Option<FiniteSupportFn>> {
    let mut machine = Machine::new();
    let baseline = apply_functional(&mut machine, z, &e0(), budget)?;
    let len = support_bound + 1;
    if m > len || value_bound == 0 {
        return Ok(None);
    }
    let mut values = vec![0u64; len];
    loop {
        let g = FiniteSupportFn {
            values: values.clone(),
        };
        if apply_functional(&mut machine, z, &g.program(), budget)? != baseline {
            return Ok(Some(g));
        }
        let mut k = len;
        loop {
            if k == m {
                return Ok(None);
            }
            k -= 1;
            if values[k] + 1 < value_bound {
                values[k] += 1;
                break;
            }
            values[k] = 0;
        }
    }
}

/// `{0} ∪ {m <= support_bound | some g extending 0^m separates z from e_0}`
/// over the searched window. Membership is downward closed, so the search
/// runs from the top.
pub fn enumerate_az(
    z: &Program,
    support_bound: usize,
    value_bound: u64,
    budget: u64,
) -> Result<BTreeSet<u64>> {
    for m in (1..=support_bound).rev() {
        if az_witness(z, m, support_bound, value_bound, budget)?.is_some() {
            return Ok((0..=m as u64).collect());
        }
    }
    Ok(BTreeSet::from([0]))
}

/// Least `i` with `{z}(g_j) = {z}(g)` for every listed `j >= i`.
pub fn seq_continuity_bound(
    z: &Program,
    g_seq: &[Program],
    g: &Program,
    budget: u64,
) -> Result<usize> {
    let mut machine = Machine::new();
    let target = apply_functional(&mut machine, z, g, budget)?;
    let mut bound = 0;
    for (i, gi) in g_seq.iter().enumerate() {
        if apply_functional(&mut machine, z, gi, budget)? != target {
            bound = i + 1;
        }
    }
    if bound == g_seq.len() && bound > 0 {
        return Err(Error::NoStabilization);
    }
    Ok(bound)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoboundDemo {
    /// From this index on `{z}(h_n) = {z}(e_0)`.
    pub stable_from: usize,
    /// `(n, m_n)` for every `n >= stable_from`; each has `m_n < n`.
    pub bounded: Vec<(u64, u64)>,
}

/// Runs the pseudo-boundedness argument on members `m_n` of `A_z`: `h_n` is
/// `e_0` when `m_n < n`, otherwise a witness extending `0^{m_n}`; once
/// `{z}(h_n)` has settled at `{z}(e_0)`, only the first case is possible.
pub fn pseudobound_demo(
    z: &Program,
    members: &[u64],
    support_bound: usize,
    value_bound: u64,
    budget: u64,
) -> Result<PseudoboundDemo> {
    let mut h = Vec::with_capacity(members.len());
    for (n, &m) in members.iter().enumerate() {
        if m < n as u64 {
            h.push(e0());
            continue;
        }
        let witness = if m == 0 {
            None
        } else {
            az_witness(z, m as usize, support_bound, value_bound, budget)?
        };
        match witness {
            Some(g) => h.push(g.program()),
            None if m == 0 => h.push(e0()),
            None => {
                return Err(Error::InconsistentTermFamily(format!(
                    "{m} is not in A_z within the window"
                )))
            }
        }
    }
    let stable_from = seq_continuity_bound(z, &h, &e0(), budget)?;
    let bounded: Vec<(u64, u64)> = members
        .iter()
        .enumerate()
        .skip(stable_from)
        .map(|(n, &m)| (n as u64, m))
        .collect();
    if let Some(&(n, m)) = bounded.iter().find(|&&(n, m)| m >= n && m > 0) {
        return Err(Error::TheoremViolated { n, value: m });
    }
    Ok(PseudoboundDemo {
        stable_from,
        bounded,
    })
}
