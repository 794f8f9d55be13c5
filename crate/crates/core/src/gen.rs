//! Seeded generators for randomized suites.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::antispecker::{Label, LevelLabels, StarOracle};
use crate::machine::Program;
use crate::seq::{BoundSchedule, Condition, Point};
use crate::sets::{PeriodicSet, SetOpen};
use crate::terms::RangeTerm;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A condition with stem `<= max_stem` and values `<= max_value` on the
/// explicit part; the tail has slope 1 or 2.
pub fn condition(rng: &mut impl Rng, max_stem: usize, max_value: u64) -> Condition {
    let stem = rng.gen_range(0..=max_stem);
    let mut values: Vec<u64> = (0..stem).map(|_| rng.gen_range(0..=max_value)).collect();
    let mut level = values
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .max(rng.gen_range(0..=max_value));
    for _ in 0..rng.gen_range(1..=3) {
        values.push(level);
        level = (level + rng.gen_range(0..=1)).min(max_value.max(level));
    }
    let slope = rng.gen_range(1..=2);
    let schedule = BoundSchedule::new(values, level, slope).expect("slope is positive");
    Condition::new(stem, schedule).expect("non-decreasing from the stem")
}

/// A point of `p`: its prefix, then random admissible entries, then a tail.
pub fn point_in(rng: &mut impl Rng, p: &Condition) -> Point {
    let extra = rng.gen_range(0..=3);
    let len = p.stem() + extra;
    let mut prefix = p.prefix();
    for n in p.stem()..len {
        prefix.push(rng.gen_range(0..=p.g(n)));
    }
    let tail = rng.gen_range(0..=p.g(len));
    Point::new(prefix, tail)
}

pub fn point(rng: &mut impl Rng, len: usize, max_value: u64) -> Point {
    let prefix = (0..len).map(|_| rng.gen_range(0..=max_value)).collect();
    Point::new(prefix, rng.gen_range(0..=max_value))
}

/// A range term over the compatible nodes of `p` at depth `modulus`: each node
/// takes the value of a random coordinate of itself.
pub fn range_term(rng: &mut impl Rng, p: &Condition, modulus: usize) -> RangeTerm {
    if modulus == 0 {
        return RangeTerm::constant(0);
    }
    if rng.gen_bool(0.2) {
        let i = rng.gen_range(0..modulus);
        return RangeTerm::coordinate(modulus, i).expect("coordinate below the modulus");
    }
    let nodes = p.nodes(modulus);
    let witnesses: Vec<(Vec<u64>, usize)> = nodes
        .into_iter()
        .map(|n| (n, rng.gen_range(0..modulus)))
        .collect();
    RangeTerm::from_witnesses(modulus, witnesses).expect("witnesses index the node")
}

pub fn periodic(
    rng: &mut impl Rng,
    max_prefix: usize,
    max_period: usize,
    density: f64,
) -> PeriodicSet {
    let prefix = (0..rng.gen_range(0..=max_prefix))
        .map(|_| rng.gen_bool(density))
        .collect();
    let period = (0..rng.gen_range(1..=max_period))
        .map(|_| rng.gen_bool(density))
        .collect();
    PeriodicSet::new(prefix, period).expect("nonempty period")
}

/// An infinite periodic set.
pub fn unbounded_periodic(rng: &mut impl Rng, max_prefix: usize, max_period: usize) -> PeriodicSet {
    loop {
        let s = periodic(rng, max_prefix, max_period, 0.5);
        if s.is_unbounded() {
            return s;
        }
    }
}

pub fn finite_set(rng: &mut impl Rng, max_len: usize, max_value: u64) -> BTreeSet<u64> {
    (0..rng.gen_range(0..=max_len))
        .map(|_| rng.gen_range(0..=max_value))
        .collect()
}

/// A nonempty open.
pub fn set_open(rng: &mut impl Rng) -> SetOpen {
    loop {
        let o = SetOpen::new(finite_set(rng, 3, 12), periodic(rng, 4, 6, 0.4));
        if !o.is_empty() {
            return o;
        }
    }
}

/// A nonempty subopen of `o`: more positive information and a negative part
/// that adds a random set to `N_O`, plus finitely many changes.
pub fn subopen(rng: &mut impl Rng, o: &SetOpen) -> SetOpen {
    loop {
        let mut positive = o.positive().clone();
        positive.extend(finite_set(rng, 3, 15));
        let negative = o.negative().union(&periodic(rng, 4, 6, 0.3));
        let v = SetOpen::new(positive, negative);
        if !v.is_empty() {
            return v;
        }
    }
}

fn star_table(default: Label) -> LevelLabels {
    LevelLabels {
        default: Some(default),
        ..Default::default()
    }
}

/// Levels `i_0 <= i_1 <= ...` starting at or beyond the stem.
fn levels(rng: &mut impl Rng, q: &Condition, horizon: usize) -> Vec<usize> {
    let mut level = q.stem() + rng.gen_range(0..=1);
    (0..=horizon)
        .map(|_| {
            level += rng.gen_range(0..=2);
            level.max(1)
        })
        .collect()
}

/// An oracle satisfying the finiteness property: level `n` is non-star
/// exactly on nodes with an entry `>= I + 1 + c·n`, plus finitely many
/// explicit non-star nodes at low levels.
pub fn genuine_star_oracle(
    rng: &mut impl Rng,
    q: &Condition,
    bound: u64,
    horizon: usize,
) -> StarOracle {
    let levels = levels(rng, q, horizon);
    let c = rng.gen_range(1..=3);
    let top = levels[horizon];
    // the top level stays star so that every non-star length is seen
    // strictly inside the horizon
    let mut labels: Vec<LevelLabels> = (0..=horizon)
        .map(|n| LevelLabels {
            threshold: (levels[n] < top).then_some(bound + 1 + c * n as u64),
            ..star_table(Label::Star)
        })
        .collect();
    let low: Vec<usize> = (0..=horizon).filter(|&n| levels[n] < top).collect();
    for _ in 0..rng.gen_range(0..=3) {
        let Some(&n) = low.choose(rng) else { break };
        let node: Vec<u64> = (0..levels[n])
            .map(|k| {
                if k < q.stem() {
                    q.g(k)
                } else {
                    rng.gen_range(0..=q.g(k).min(bound))
                }
            })
            .collect();
        labels[n].nodes.insert(node, Label::Nonstar);
    }
    StarOracle::new(levels, labels).expect("levels are non-decreasing")
}

/// An oracle violating the finiteness property: one path, all zeros or
/// random below `I + 1`, is non-star at every level.
pub fn violating_star_oracle(
    rng: &mut impl Rng,
    q: &Condition,
    bound: u64,
    horizon: usize,
) -> StarOracle {
    let levels = levels(rng, q, horizon);
    let zeros = rng.gen_bool(0.5);
    let top = *levels.last().expect("horizon levels");
    let path: Vec<u64> = (0..top)
        .map(|k| match k {
            k if k < q.stem() => q.g(k),
            _ if zeros => 0,
            k => rng.gen_range(0..=q.g(k).min(bound + 1)),
        })
        .collect();
    let labels = levels
        .iter()
        .map(|&len| {
            let mut l = star_table(Label::Star);
            l.nodes.insert(path[..len].to_vec(), Label::Nonstar);
            l
        })
        .collect();
    StarOracle::new(levels, labels).expect("levels are non-decreasing")
}

/// A program without `mu` or `apply`, of depth at most `depth`.
pub fn total_program(rng: &mut impl Rng, depth: usize) -> Program {
    let leaves = [
        Program::Zero,
        Program::Succ,
        Program::Id,
        Program::Left,
        Program::Right,
    ];
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..7) {
            5 => Program::constant(rng.gen_range(0..10)),
            6 => Program::Seq(
                (0..rng.gen_range(0..4))
                    .map(|_| rng.gen_range(0..6))
                    .collect(),
            ),
            _ => leaves.choose(rng).expect("nonempty").clone(),
        };
    }
    let sub = |rng: &mut _| total_program(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => Program::comp(sub(rng), sub(rng)),
        1 => Program::pair(sub(rng), sub(rng)),
        2 => Program::rec(sub(rng), sub(rng)),
        _ => Program::min(sub(rng)),
    }
}

/// A `rec` step whose value exceeds the largest of `a`, `i` and the
/// accumulator by at most a constant.
fn tame_step(rng: &mut impl Rng, depth: usize) -> Program {
    let accumulator = Program::Right;
    let a = Program::comp(Program::Left, Program::Left);
    let i = Program::comp(Program::Right, Program::Left);
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..5) {
            0 => Program::Zero,
            1 => Program::constant(rng.gen_range(0..5)),
            2 => a,
            3 => i,
            _ => accumulator,
        };
    }
    Program::comp(Program::Succ, tame_step(rng, depth - 1))
}

/// A program of the total fragment whose values grow polynomially in the
/// input, so every run is short: `rec` steps come from [`tame_step`].
pub fn tame_program(rng: &mut impl Rng, depth: usize) -> Program {
    if depth == 0 || rng.gen_bool(0.3) {
        return total_program(rng, 0);
    }
    let sub = |rng: &mut _| tame_program(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => Program::comp(sub(rng), sub(rng)),
        1 => Program::pair(sub(rng), sub(rng)),
        2 => Program::rec(sub(rng), tame_step(rng, 2)),
        _ => Program::min(sub(rng)),
    }
}
