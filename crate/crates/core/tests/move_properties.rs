mod common;

use chainfill::exactalg::abelian_iso;
use chainfill::homology::h1;
use chainfill::manifolds::Manifold;
use chainfill::moves::{apply_move, equivalent, fiber_intersections, normalize, Move, Verdict};
use chainfill::notation::print_expr;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normalize_is_idempotent_and_keeps_h1(seed in any::<u64>()) {
        let x = common::expr(&mut common::rng(seed));
        let once = normalize(&x);
        prop_assert_eq!(normalize(&once), once.clone(), "{}", print_expr(&x));
        prop_assert!(abelian_iso(&h1(&x).unwrap(), &h1(&once).unwrap()), "{} -> {}", print_expr(&x), print_expr(&once));
    }

    #[test]
    fn moves_keep_h1_and_equivalence(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x = common::expr(&mut r);
        let Manifold::Graph(g) = &x else { return Ok(()) };
        for _ in 0..4 {
            let mv = common::random_move(&mut r, g);
            let Ok(y) = apply_move(&x, mv) else { continue };
            let tag = format!("{mv} on {} gives {}", print_expr(&x), print_expr(&y));
            prop_assert!(abelian_iso(&h1(&x).unwrap(), &h1(&y).unwrap()), "{}", tag);
            prop_assert_eq!(equivalent(&x, &y), Verdict::Yes, "{}", tag);
            if matches!(mv.number(), 5..=7) {
                prop_assert_eq!(fiber_intersections(&x), fiber_intersections(&y), "{}", tag);
            }
        }
    }

    #[test]
    fn move_sequences_keep_the_normal_form(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x = common::expr(&mut r);
        let mut y = x.clone();
        for _ in 0..6 {
            let Manifold::Graph(g) = &y else { break };
            let mv = common::random_move(&mut r, g);
            if matches!(mv, Move::Reverse) {
                continue;
            }
            if let Ok(z) = apply_move(&y, mv) {
                y = z;
            }
        }
        prop_assert_eq!(normalize(&x), normalize(&y), "{} vs {}", print_expr(&x), print_expr(&y));
    }

    #[test]
    fn negative_answers_name_a_differing_invariant(a in any::<u64>(), b in any::<u64>()) {
        let x = common::expr(&mut common::rng(a));
        let y = common::expr(&mut common::rng(b));
        if let Verdict::No { invariant } = equivalent(&x, &y) {
            if invariant == "H1" {
                prop_assert!(!abelian_iso(&h1(&x).unwrap(), &h1(&y).unwrap()));
            } else {
                prop_assert!(!invariant.is_empty());
                prop_assert_ne!(normalize(&x), normalize(&y));
            }
        }
    }
}

#[test]
fn every_move_kind_fires() {
    let mut seen = [false; 12];
    for seed in 0..4000 {
        let mut r = common::rng(seed);
        let x = common::expr(&mut r);
        let Manifold::Graph(g) = &x else { continue };
        let mv = common::random_move(&mut r, g);
        if apply_move(&x, mv).is_ok() {
            seen[usize::from(mv.number())] = true;
        }
    }
    let missing: Vec<usize> = (1..=11).filter(|&i| !seen[i]).collect();
    assert!(missing.is_empty(), "moves never applied: {missing:?}");
}
