//! Brute-force reference implementations, written from the definitions and
//! sharing no code with the library beyond its data types.
#![allow(dead_code)]

use bdlab::seq::{Condition, Point};
use bdlab::sets::PeriodicSet;
use bdlab::terms::{RangeTerm, TermRule};

pub fn g(p: &Condition, n: usize) -> u64 {
    let s = p.schedule();
    match s.explicit().get(n) {
        Some(&v) => v,
        None => s
            .base()
            .saturating_add(s.slope().saturating_mul((n - s.explicit().len()) as u64)),
    }
}

/// Beyond this index both schedules are affine and the point is constant.
fn horizon(p: &Condition, extra: usize) -> usize {
    p.schedule().explicit().len().max(p.stem()) + extra + 2
}

pub fn member(f: &Point, p: &Condition) -> bool {
    let far = horizon(p, f.prefix().len()) + f.tail() as usize;
    (0..far).all(|n| {
        let (x, b) = (f.eval(n), g(p, n));
        if n < p.stem() {
            x == b
        } else {
            x <= b
        }
    })
}

/// Nodes of length `depth` compatible with `p`, lexicographically.
pub fn nodes(p: &Condition, depth: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for k in 0..depth {
        let choices: Vec<u64> = if k < p.stem() {
            vec![g(p, k)]
        } else {
            (0..=g(p, k)).collect()
        };
        out = out
            .into_iter()
            .flat_map(|node| {
                choices.iter().map(move |&c| {
                    let mut n = node.clone();
                    n.push(c);
                    n
                })
            })
            .collect();
    }
    out
}

pub fn term_value(t: &RangeTerm, node: &[u64]) -> u64 {
    match t.rule() {
        TermRule::Const(c) => *c,
        TermRule::Coord(i) => node[*i],
        TermRule::Table(table) => table[&node[..t.modulus()]].value,
    }
}

/// Every point of `q` lies in `p`.
pub fn subset(q: &Condition, p: &Condition) -> bool {
    let far = horizon(q, 0).max(horizon(p, 0)) + 8;
    let window = (0..far).chain([1_000, 1_000_000]).all(|n| {
        let (bq, bp) = (g(q, n), g(p, n));
        match (n < q.stem(), n < p.stem()) {
            (true, true) => bq == bp,
            (true, false) => bq <= bp,
            (false, true) => bq == 0 && bp == 0,
            (false, false) => bq <= bp,
        }
    });
    window && q.schedule().slope() <= p.schedule().slope()
}

/// Whether `q` decides `G(n) = v`.
pub fn forces_entry(q: &Condition, n: usize, v: u64) -> bool {
    n < q.stem() && g(q, n) == v
}

/// A finite set and a periodic set intersect finitely; decided by scanning
/// one full joint period past both prefixes.
pub fn meets_finitely(a: &PeriodicSet, b: &PeriodicSet) -> bool {
    let start = a.prefix().len().max(b.prefix().len());
    let span = a.period().len() * b.period().len();
    (start..start + span).all(|n| !(a.contains(n as u64) && b.contains(n as u64)))
}

pub fn is_infinite(a: &PeriodicSet) -> bool {
    a.period().iter().any(|&b| b)
}
