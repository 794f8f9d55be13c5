//! The acceptance suite. Prints one pass/fail line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use bdlab::antispecker::{build_escape_schedule, Label, StarOracle};
use bdlab::cli;
use bdlab::fusion::{bound_range_term, bound_range_term_at, fuse_pseudobound};
use bdlab::gen;
use bdlab::labs::{big_e0, certificate_u64, enumerate_az, make_f_beta, FpLab};
use bdlab::machine::{check_proof, eval_steps, Program};
use bdlab::seq::{self, BasicOpen, Condition};
use bdlab::sets::{
    canonical_set_point, compatible_extension_check, member_set, sequential_bound, unbounded_step,
};
use bdlab::terms::{RangeTerm, TermSequence};
use bdlab::Error;
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Check {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:.2?}, limit {limit:?}");
    Ok(format!("{took:.2?}"))
}

/// A compatible node of `p` of the given length.
fn random_node(rng: &mut impl Rng, p: &Condition, len: usize) -> Vec<u64> {
    (0..len)
        .map(|k| {
            if k < p.stem() {
                common::g(p, k)
            } else {
                rng.gen_range(0..=common::g(p, k))
            }
        })
        .collect()
}

fn open_algebra() -> Check {
    let start = Instant::now();
    let mut rng = gen::rng(1);
    let mut samples = 0;
    for case in 0..500 {
        let p = gen::condition(&mut rng, 4, 5);
        let q = gen::condition(&mut rng, 4, 5);
        let both = p.intersect(&q);
        let cover = p.split_cover();
        for piece in &cover {
            ensure!(
                common::subset(piece, &p),
                "case {case}: split piece {piece:?} escapes {p:?}"
            );
        }
        let len = p.stem() + rng.gen_range(0..=2);
        let sigma = random_node(&mut rng, &p, len);
        let r = p
            .restrict(&sigma)
            .map_err(|e| format!("case {case}: {e}"))?;
        for _ in 0..100 {
            let f = match rng.gen_range(0..5) {
                0 => gen::point_in(&mut rng, &p),
                1 => gen::point_in(&mut rng, &q),
                2 => gen::point_in(&mut rng, &r),
                3 => match &both {
                    BasicOpen::Basic(c) => gen::point_in(&mut rng, c),
                    BasicOpen::Empty => gen::point(&mut rng, 6, 7),
                },
                _ => gen::point(&mut rng, 6, 7),
            };
            let (in_p, in_q) = (common::member(&f, &p), common::member(&f, &q));
            ensure!(
                p.contains(&f) == in_p,
                "case {case}: membership of {f:?} in {p:?}"
            );
            ensure!(
                seq::member(&f, &both) == (in_p && in_q),
                "case {case}: intersection at {f:?}"
            );
            let hits = cover.iter().filter(|c| common::member(&f, c)).count();
            ensure!(
                hits == usize::from(in_p),
                "case {case}: {f:?} lies in {hits} split pieces"
            );
            let in_r = in_p && sigma.iter().enumerate().all(|(n, &x)| f.eval(n) == x);
            ensure!(r.contains(&f) == in_r, "case {case}: restriction at {f:?}");
            samples += 1;
        }
    }
    Ok(format!(
        "500 pairs, {samples} points, {}",
        within(start, Duration::from_secs(10))?
    ))
}

/// Largest `c` such that every node of `p` of length `depth` with free
/// entries `<= c` has value `<= bound`.
fn best_stem_value(p: &Condition, t: &RangeTerm, bound: u64, depth: usize) -> Option<u64> {
    let nodes = common::nodes(p, depth);
    (p.prefix_max()..=common::g(p, p.stem())).rev().find(|&c| {
        nodes
            .iter()
            .filter(|node| node[p.stem().min(depth)..].iter().all(|&x| x <= c))
            .all(|node| common::term_value(t, node) <= bound)
    })
}

fn small_condition(rng: &mut impl Rng, modulus: usize) -> Condition {
    loop {
        let p = gen::condition(rng, 2, 3);
        if (0..modulus.max(p.stem() + 3)).all(|n| common::g(&p, n) <= 5) {
            return p;
        }
    }
}

fn lemma_engine() -> Check {
    let start = Instant::now();
    let mut rng = gen::rng(2);
    let mut lowered = 0;
    for case in 0..200 {
        let modulus = rng.gen_range(1..=5);
        let p = small_condition(&mut rng, modulus);
        let t = gen::range_term(&mut rng, &p, modulus);
        let bound = rng.gen_range(p.prefix_max()..=common::g(&p, p.stem()));
        let q = bound_range_term(&p, &t, bound).map_err(|e| format!("case {case}: {e}"))?;
        lowered += usize::from(q != p);
        let stem = p.stem();
        ensure!(q.stem() == stem, "case {case}: stem moved");
        ensure!(
            common::g(&q, stem) >= bound,
            "case {case}: g_q(stem) < {bound}"
        );
        ensure!(
            common::subset(&q, &p),
            "case {case}: {q:?} is not inside {p:?}"
        );
        let depth = modulus.max(stem);
        for node in common::nodes(&q, depth) {
            ensure!(
                common::term_value(&t, &node) <= bound,
                "case {case}: node {node:?} exceeds {bound}"
            );
        }
        let best = best_stem_value(&p, &t, bound, depth);
        ensure!(
            best == Some(common::g(&q, stem)),
            "case {case}: brute force {best:?}, engine {}",
            common::g(&q, stem)
        );
    }
    for case in 0..100 {
        let modulus = rng.gen_range(1..=5);
        let p = small_condition(&mut rng, modulus);
        let t = gen::range_term(&mut rng, &p, modulus);
        let m = p.stem() + rng.gen_range(0..=2);
        let below = (0..m).map(|k| common::g(&p, k)).max().unwrap_or(0);
        let bound = rng.gen_range(below..=common::g(&p, m));
        let q = bound_range_term_at(&p, &t, bound, m)
            .map_err(|e| format!("case {case} at {m}: {e}"))?;
        ensure!(q.stem() == p.stem(), "case {case}: stem moved");
        ensure!(
            (0..m).all(|k| common::g(&q, k) == common::g(&p, k)),
            "case {case}: changed below {m}"
        );
        ensure!(common::g(&q, m) >= bound, "case {case}: g_q({m}) < {bound}");
        ensure!(common::subset(&q, &p), "case {case}: not a subset");
        let depth = modulus.max(m);
        for node in common::nodes(&q, depth) {
            ensure!(
                common::term_value(&t, &node) <= bound,
                "case {case}: node {node:?} exceeds {bound}"
            );
        }
        let expected = common::nodes(&p, m)
            .iter()
            .map(|sigma| best_stem_value(&p.restrict(sigma).expect("compatible"), &t, bound, depth))
            .min()
            .flatten();
        ensure!(
            expected == Some(common::g(&q, m)),
            "case {case}: brute force {expected:?} at {m}"
        );
    }
    Ok(format!(
        "300 cases ({lowered} of 200 lowered), {}",
        within(start, Duration::from_secs(60))?
    ))
}

fn term_sequence(rng: &mut impl Rng, p: &Condition) -> TermSequence {
    let terms = (0..24)
        .map(|_| {
            let modulus = rng.gen_range(0..=3);
            gen::range_term(rng, p, modulus)
        })
        .collect();
    TermSequence {
        terms,
        tail: gen::range_term(rng, p, 2),
    }
}

fn pseudobound_fusion() -> Check {
    let mut rng = gen::rng(3);
    let stages = 8;
    for case in 0..60 {
        let p = gen::condition(&mut rng, 2, 3);
        let a = term_sequence(&mut rng, &p);
        let f = gen::point_in(&mut rng, &p);
        let out = fuse_pseudobound(&p, &a, &f, stages).map_err(|e| format!("case {case}: {e}"))?;
        let start = out.start;
        ensure!(
            start == f.sup(),
            "case {case}: N = {start}, sup = {}",
            f.sup()
        );
        let mut previous = p.clone();
        for (j, link) in out.chain.iter().enumerate() {
            let c = link.condition().map_err(|e| format!("case {case}: {e}"))?;
            ensure!(
                common::subset(c, &previous),
                "case {case}: chain not nested at {j}"
            );
            ensure!(
                common::member(&f, c),
                "case {case}: f left the chain at {j}"
            );
            for i in 0..=j as u64 {
                let n = start + i;
                let t = a.get(n as usize);
                for node in common::nodes(c, t.modulus().max(c.stem())) {
                    ensure!(
                        common::term_value(t, &node) <= n,
                        "case {case}: chain({j}) lets a({n}) exceed {n}"
                    );
                }
            }
            previous = c.clone();
        }
    }
    Ok(format!("60 sequences, j <= {stages}"))
}

fn range_escape() -> Check {
    let mut rng = gen::rng(4);
    for bound in 0..=20u64 {
        for case in 0..50 {
            let p = gen::condition(&mut rng, 4, 6);
            let q = seq::force_value_into_range(&p.clone().open(), bound)
                .map_err(|e| format!("B={bound}: {e}"))?;
            let q = q.condition().map_err(|e| format!("B={bound}: {e}"))?;
            ensure!(common::subset(q, &p), "B={bound} case {case}: not a subset");
            ensure!(
                (0..q.stem()).any(|n| common::forces_entry(q, n, bound)),
                "B={bound} case {case}: {bound} is not forced into the range"
            );
        }
    }
    Ok("B <= 20, 50 opens each".into())
}

fn set_model() -> Check {
    let mut rng = gen::rng(5);
    for case in 0..200 {
        let o = gen::set_open(&mut rng);
        let v = gen::subopen(&mut rng, &o);
        let mut pext = o.positive().clone();
        pext.extend(gen::finite_set(&mut rng, 4, 30));
        let check =
            compatible_extension_check(&o, &pext, &v).map_err(|e| format!("case {case}: {e}"))?;
        let w = &check.witness;
        ensure!(check.holds, "case {case}: no common point reported");
        ensure!(
            pext.iter().chain(v.positive()).all(|&n| w.contains(n)),
            "case {case}: witness misses positives"
        );
        ensure!(
            common::meets_finitely(w, o.negative()),
            "case {case}: witness meets N_O infinitely"
        );
        ensure!(
            common::meets_finitely(w, v.negative()),
            "case {case}: witness meets N_V infinitely"
        );
        ensure!(common::is_infinite(w), "case {case}: witness is finite");

        let canonical = canonical_set_point(&o).map_err(|e| e.to_string())?;
        let values: Vec<u64> = o.positive().iter().copied().collect();
        let decided: Vec<(BTreeSet<u64>, u64)> = (0..4)
            .filter_map(|_| {
                let value = *values.choose(&mut rng)?;
                let pu = gen::finite_set(&mut rng, 3, 30)
                    .into_iter()
                    .filter(|&n| canonical.contains(n))
                    .collect();
                Some((pu, value))
            })
            .collect();
        let expected = o.positive().iter().next_back().copied().unwrap_or(0);
        ensure!(
            sequential_bound(&o, &decided) == Ok(expected),
            "case {case}: sequential bound is not max(P_O)"
        );
        let stray = (0..)
            .find(|n| !o.positive().contains(n))
            .expect("P_O is finite");
        ensure!(
            matches!(
                sequential_bound(&o, &[(BTreeSet::new(), stray)]),
                Err(Error::InconsistentTermFamily(_))
            ),
            "case {case}: undecidable value {stray} accepted"
        );
    }
    for point in 0..20 {
        let x = gen::unbounded_periodic(&mut rng, 5, 6);
        for n in 0..=20 {
            let step = unbounded_step(&x, n).map_err(|e| format!("point {point}: {e}"))?;
            ensure!(
                step.positive().iter().all(|&k| x.contains(k))
                    && common::meets_finitely(&x, step.negative()),
                "point {point}: x is outside its step open at {n}"
            );
            ensure!(
                member_set(&x, &step) == Ok(true),
                "point {point}: member_set disagrees at {n}"
            );
            ensure!(
                step.positive().iter().any(|&k| k > n),
                "point {point}: nothing above {n} forced"
            );
        }
    }
    Ok("200 compatibility instances, unbounded steps for n <= 20 on 20 points".into())
}

/// Whether some node of length `len` compatible with `r` is non-star.
/// Requires the default label star and only non-star explicit labels.
fn nonstar_compatible(oracle: &StarOracle, m: usize, r: &Condition) -> bool {
    let labels = &oracle.labels[m];
    assert_eq!(labels.default, Some(Label::Star));
    assert!(labels.nodes.values().all(|&l| l == Label::Nonstar));
    let len = oracle.levels[m];
    let compatible = |node: &[u64]| {
        node.iter().enumerate().all(|(k, &x)| {
            if k < r.stem() {
                x == common::g(r, k)
            } else {
                x <= common::g(r, k)
            }
        })
    };
    labels.nodes.keys().any(|node| compatible(node))
        || labels
            .threshold
            .is_some_and(|t| (0..len).any(|k| common::g(r, k) >= t))
}

fn escape_schedule() -> Check {
    let mut rng = gen::rng(6);
    let (mut staged, mut caught) = (0, 0);
    for case in 0..80 {
        let q = gen::condition(&mut rng, 2, 3);
        let top = common::g(&q, q.stem()).min(5);
        if q.prefix_max() > top {
            continue;
        }
        let bound = rng.gen_range(q.prefix_max()..=top);
        let horizon = rng.gen_range(1..=12);
        let oracle = gen::genuine_star_oracle(&mut rng, &q, bound, horizon);
        let out = build_escape_schedule(&q, &oracle, bound, horizon)
            .map_err(|e| format!("case {case}: {e}"))?;
        ensure!(
            common::subset(&out.open, &q),
            "case {case}: schedule escapes q"
        );
        for m in out.m + 1..=horizon {
            ensure!(
                !nonstar_compatible(&oracle, m, &out.open),
                "case {case}: level {m} > M = {} has a non-star node",
                out.m
            );
        }
        staged += usize::from(!out.stages.is_empty());
    }
    ensure!(
        staged >= 50,
        "only {staged} oracles exercised the staged construction"
    );
    for case in 0..40 {
        let q = gen::condition(&mut rng, 2, 3);
        let bound = rng.gen_range(q.prefix_max()..=common::g(&q, q.stem()));
        let horizon = rng.gen_range(1..=12);
        let oracle = gen::violating_star_oracle(&mut rng, &q, bound, horizon);
        match build_escape_schedule(&q, &oracle, bound, horizon) {
            Err(Error::ScheduleUnsound(_)) => caught += 1,
            other => return Err(format!("violation {case} not caught: {other:?}")),
        }
    }
    Ok(format!(
        "{staged} staged schedules sound, {caught}/40 violations caught"
    ))
}

/// `v(n)` straight from the definition, using that a larger `k` only adds
/// triples.
fn v_reference(n: u64) -> u64 {
    let converges = |w: u64, z: u64| eval_steps(&BigUint::from(w), z, n).is_some_and(|v| v < n);
    let certified = |j: u64, w: u64| check_proof(&BigUint::from(j), &BigUint::from(w));
    let mut best = 0;
    for k in 1..n {
        let last = k - 1;
        // triples whose largest component is `k - 1`
        let ok = (0..k).all(|j| {
            (0..k).all(|w| {
                if j != last && w != last {
                    return (0..k).all(|z| z != last || !certified(j, w) || converges(w, z));
                }
                !certified(j, w) || (0..k).all(|z| converges(w, z))
            })
        });
        if !ok {
            break;
        }
        best = k;
    }
    best
}

fn fp_lab() -> Check {
    let start = Instant::now();
    let mut lab = FpLab::default();
    let values: Vec<u64> = (0..=200)
        .map(|n| lab.v(n).map(|t| t.value))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let took = within(start, Duration::from_secs(120))?;
    for n in 0..=200u64 {
        ensure!(
            values[n as usize] == v_reference(n),
            "v({n}) = {}, reference {}",
            values[n as usize],
            v_reference(n)
        );
    }
    for n in 1..=200usize {
        ensure!(
            values[n] < n as u64,
            "v({n}) = {} is not below {n}",
            values[n]
        );
        ensure!(values[n] >= values[n - 1], "v decreases at {n}");
    }
    for k in 0..=15 {
        let n = lab.unbounded_witness(k).map_err(|e| e.to_string())?;
        ensure!(v_reference(n) >= k, "witness {n} for {k} fails");
    }
    let programs: Vec<Program> = (0u64..)
        .map(Program::from_u64)
        .filter(Program::is_total_fragment)
        .take(110)
        .collect();
    for x in &programs {
        let cert = certificate_u64(x).expect("small index");
        let table = lab
            .pseudobound_scenario(x, cert, 100)
            .map_err(|e| format!("{x}: {e}"))?;
        ensure!(
            table.len() == 100 && table.iter().all(|&(n, f)| f <= n),
            "{x}: bound broken"
        );
    }
    Ok(format!(
        "v exact for n <= 200 in {took}, witnesses for k <= 15, {} scenarios",
        programs.len()
    ))
}

fn ext_lab() -> Check {
    let budget = cli::DEFAULT_EXT_BUDGET;
    let az0 = enumerate_az(&big_e0(), 8, 3, budget).map_err(|e| e.to_string())?;
    ensure!(az0 == BTreeSet::from([0]), "A(E_0) = {az0:?}");
    let betas = [
        "succ",
        "id",
        "left",
        "(const 1)",
        "(const 5)",
        "(comp succ succ)",
        "(pair id id)",
        "(pair succ zero)",
        "(comp succ left)",
        "(seq 0 4)",
    ];
    for text in betas {
        let beta: Program = text.parse().map_err(|e: Error| e.to_string())?;
        for m in 0..=6u64 {
            let az = enumerate_az(&make_f_beta(&beta, m), m as usize + 2, 3, budget)
                .map_err(|e| e.to_string())?;
            ensure!(az == (0..=m + 1).collect(), "beta {text}, m {m}: {az:?}");
        }
    }
    Ok(format!("E_0 and {} betas for m <= 6", betas.len()))
}

fn call(args: &[&str]) -> (i32, String) {
    cli::run(std::iter::once("bdlab").chain(args.iter().copied()))
}

fn certificates(v: &Value, out: &mut Vec<Value>) {
    match v {
        Value::Object(map) if map.contains_key("operation") => out.push(v.clone()),
        Value::Object(map) => map.values().for_each(|x| certificates(x, out)),
        Value::Array(xs) => xs.iter().for_each(|x| certificates(x, out)),
        _ => {}
    }
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut found = Vec::new();
    let mut runs = 0;
    for name in ["seq", "fuse", "set", "as", "fp", "ext"] {
        for seed in ["11", "12"] {
            let args = ["suite", name, "--seed", seed, "--count", "6"];
            let (code, first) = call(&args);
            ensure!(code == 0, "suite {name} exits {code}");
            ensure!(
                call(&args) == (code, first.clone()),
                "suite {name} seed {seed} is not reproducible"
            );
            let doc: Value = serde_json::from_str(&first).map_err(|e| e.to_string())?;
            certificates(&doc, &mut found);
            runs += 1;
        }
    }
    let (a, b) = (
        call(&["fp", "v", "--max-n", "30"]),
        call(&["fp", "v", "--max-n", "30"]),
    );
    ensure!(a == b && a.0 == 0, "fp v is not reproducible");
    for (i, cert) in found.iter().enumerate() {
        let path = dir.path().join(format!("cert{i}.json"));
        std::fs::write(&path, cert.to_string()).map_err(|e| e.to_string())?;
        let (code, out) = call(&["verify", path.to_str().expect("utf-8 path")]);
        ensure!(
            code == 0,
            "certificate {i} ({}) fails: {out}",
            cert["operation"]
        );
    }
    ensure!(
        found.len() >= 40,
        "only {} certificates emitted",
        found.len()
    );
    Ok(format!(
        "{runs} suite runs reproducible, {} certificates verify",
        found.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("open-set algebra", open_algebra),
        ("good-extension engine", lemma_engine),
        ("pseudo-bounded fusion", pseudobound_fusion),
        ("range escapes every bound", range_escape),
        ("unbounded-set model", set_model),
        ("escape schedule", escape_schedule),
        ("fp lab", fp_lab),
        ("ext lab", ext_lab),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {}: {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
