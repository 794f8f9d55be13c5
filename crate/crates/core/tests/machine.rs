use bdlab::gen;
use bdlab::machine::{check_proof, converges_below, eval_steps, Machine, Program};
use num_bigint::BigUint;
use proptest::prelude::*;

const BUDGET: u64 = 20_000_000;

#[test]
fn certified_programs_converge() {
    let mut rng = gen::rng(9);
    let mut machine = Machine::new();
    // nests of `rec` over growing accumulators are total but can run for
    // astronomically long, so the sample comes from the tame sub-fragment
    let mut seen = std::collections::HashSet::new();
    while seen.len() < 120 {
        let x = gen::tame_program(&mut rng, 3);
        let w = x.index();
        let cert = BigUint::from(2u32) * &w + 1u32;
        assert!(check_proof(&cert, &w), "{x} lacks its certificate");
        for z in 0..20 {
            assert!(machine.run(&x, z, BUDGET).is_some(), "{x} diverges on {z}");
        }
        seen.insert(x);
    }
}

#[test]
fn uncertified_programs_are_rejected() {
    let mu: Program = "(mu succ)".parse().unwrap();
    let w = mu.index();
    assert!(!check_proof(&(BigUint::from(2u32) * &w + 1u32), &w));
    let id = Program::Id.index();
    assert!(!check_proof(&(BigUint::from(2u32) * &id), &id));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn more_budget_keeps_the_answer(w in 0u64..5000, z in 0u64..30, budget in 1u64..400) {
        let w = BigUint::from(w);
        let first = eval_steps(&w, z, budget);
        prop_assert_eq!(first, eval_steps(&w, z, budget));
        if first.is_some() {
            prop_assert_eq!(eval_steps(&w, z, budget * 3), first);
        }
    }

    #[test]
    fn convergence_below_is_upward_closed(w in 0u64..5000, z in 0u64..30, n in 1u64..300) {
        let mut machine = Machine::new();
        if let Some(v) = converges_below(&mut machine, w, z, n) {
            prop_assert_eq!(converges_below(&mut machine, w, z, n + 1), Some(v));
        }
    }

    #[test]
    fn program_text_round_trips(seed in any::<u64>()) {
        let x = gen::total_program(&mut gen::rng(seed), 4);
        prop_assert_eq!(x.to_string().parse::<Program>().unwrap(), x.clone());
        prop_assert_eq!(Program::from_index(&x.index()), x);
    }
}
