use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::cert::{certify_bound, certify_dc, certify_pseudo, certify_schedule, StepRule};
use crate::error::Result;
use crate::gen;
use crate::labs::{certificate_u64, enumerate_az, make_f_beta, FpLab};
use crate::machine::Program;
use crate::seq::{self, BasicOpen};
use crate::sets::{
    canonical_set_point, compatible_extension_check, sequential_bound, unbounded_step,
};
use crate::terms::TermSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Seq,
    Fuse,
    Set,
    As,
    Fp,
    Ext,
}

fn outcome<T: Serialize>(r: Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).expect("plain data serializes"),
        Err(e) => json!({ "error": { "code": e.code(), "message": e.to_string() } }),
    }
}

/// Runs `count` seeded cases of the named demo. Equal seeds give equal
/// documents. Certificates sit under the `bound`, `pseudo`, `dc` and
/// `schedule` keys of the fuse and as suites.
pub fn suite(name: SuiteName, seed: u64, count: usize) -> Value {
    let mut rng = gen::rng(seed);
    let rng = &mut rng;
    let cases: Vec<Value> = match name {
        SuiteName::Seq => (0..count).map(|_| seq_case(rng)).collect(),
        SuiteName::Fuse => (0..count).map(|_| fuse_case(rng)).collect(),
        SuiteName::Set => (0..count).map(|_| set_case(rng)).collect(),
        SuiteName::As => (0..count).map(|_| as_case(rng)).collect(),
        SuiteName::Fp => fp_cases(rng, count),
        SuiteName::Ext => (0..count).map(|_| ext_case(rng)).collect(),
    };
    json!({ "suite": format!("{name:?}").to_lowercase(), "seed": seed, "cases": cases })
}

fn seq_case(rng: &mut impl Rng) -> Value {
    let p = gen::condition(rng, 4, 5);
    let q = gen::condition(rng, 4, 5);
    let both = p.intersect(&q);
    let points: Vec<Value> = (0..4)
        .map(|_| {
            let f = if rng.gen_bool(0.5) {
                gen::point_in(rng, &p)
            } else {
                gen::point(rng, 6, 6)
            };
            json!({
                "point": f,
                "in_p": p.contains(&f),
                "in_q": q.contains(&f),
                "in_both": seq::member(&f, &both),
            })
        })
        .collect();
    let bound = rng.gen_range(0..=6);
    json!({
        "p": p,
        "q": q,
        "intersection": both,
        "split_cover": p.split_cover(),
        "force_range": { "bound": bound, "open": BasicOpen::from(p.force_into_range(bound)) },
        "points": points,
    })
}

fn fuse_case(rng: &mut impl Rng) -> Value {
    let p = gen::condition(rng, 2, 2);
    let modulus = rng.gen_range(1..=3);
    let t = gen::range_term(rng, &p, modulus);
    let bound = rng.gen_range(p.prefix_max()..=p.g(p.stem()));
    let terms = TermSequence {
        terms: (0..6)
            .map(|_| {
                let modulus = rng.gen_range(0..=3);
                gen::range_term(rng, &p, modulus)
            })
            .collect(),
        tail: gen::range_term(rng, &p, 2),
    };
    let f = gen::point_in(rng, &p);
    let rule = StepRule {
        add: rng.gen_range(0..=2),
    };
    let start = rng.gen_range(0..=2);
    json!({
        "bound": outcome(certify_bound(&p, &t, bound, None)),
        "pseudo": outcome(certify_pseudo(&p, &terms, &f, 3)),
        "dc": outcome(certify_dc(&p, rule, start, 3)),
    })
}

fn set_case(rng: &mut impl Rng) -> Value {
    let o = gen::set_open(rng);
    let v = gen::subopen(rng, &o);
    let mut pext = o.positive().clone();
    pext.extend(gen::finite_set(rng, 3, 20));
    let x = gen::unbounded_periodic(rng, 4, 5);
    let steps: Vec<Value> = (0..=4).map(|n| outcome(unbounded_step(&x, n))).collect();
    // decided by neighbourhoods of the canonical point, with values in `P_O`
    let canonical = canonical_set_point(&o).expect("nonempty open");
    let values: Vec<u64> = o.positive().iter().copied().collect();
    let decided: Vec<_> = (0..3)
        .filter_map(|_| {
            let value = *values.choose(rng)?;
            let pu = gen::finite_set(rng, 2, 20)
                .into_iter()
                .filter(|&n| canonical.contains(n))
                .collect();
            Some((pu, value))
        })
        .collect();
    json!({
        "o": o,
        "v": v,
        "pext": pext,
        "compat": outcome(compatible_extension_check(&o, &pext, &v)),
        "x": x,
        "unbounded_steps": steps,
        "sequential_bound": outcome(sequential_bound(&o, &decided)),
    })
}

fn as_case(rng: &mut impl Rng) -> Value {
    let q = gen::condition(rng, 2, 3);
    let bound = rng.gen_range(q.prefix_max()..=q.g(q.stem()));
    let horizon = rng.gen_range(2..=6);
    let violating = rng.gen_bool(0.3);
    let oracle = if violating {
        gen::violating_star_oracle(rng, &q, bound, horizon)
    } else {
        gen::genuine_star_oracle(rng, &q, bound, horizon)
    };
    json!({ "violating": violating, "schedule": outcome(certify_schedule(&q, &oracle, bound, horizon)) })
}

/// Scenarios for small certified programs drawn from the total fragment.
fn fp_cases(rng: &mut impl Rng, count: usize) -> Vec<Value> {
    let pool: Vec<Program> = (0..120u64)
        .map(Program::from_u64)
        .filter(Program::is_total_fragment)
        .collect();
    let mut lab = FpLab::default();
    (0..count)
        .map(|_| {
            let x = pool.choose(rng).expect("the pool is nonempty").clone();
            let cert = certificate_u64(&x).expect("small index");
            json!({
                "program": x.to_string(),
                "cert": cert,
                "table": outcome(lab.pseudobound_scenario(&x, cert, 10)),
            })
        })
        .collect()
}

fn ext_case(rng: &mut impl Rng) -> Value {
    let betas = ["succ", "id", "(const 2)", "(comp succ succ)", "left"];
    let beta: Program = betas
        .choose(rng)
        .expect("nonempty")
        .parse()
        .expect("valid syntax");
    let m = rng.gen_range(0..=3);
    let f = make_f_beta(&beta, m);
    json!({
        "beta": beta.to_string(),
        "m": m,
        "az": outcome(enumerate_az(&f, m as usize + 2, 3, super::DEFAULT_EXT_BUDGET)),
    })
}
