use proptest::prelude::*;
use ratlp::{int, solve, verify_certificate, Direction, LpProblem, Relation, Status};

fn relation(code: u8) -> Relation {
    match code % 3 {
        0 => Relation::Le,
        1 => Relation::Ge,
        _ => Relation::Eq,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Every optimal answer must carry a certificate that checks out exactly.
    #[test]
    fn optimal_answers_are_certified(
        maximize in any::<bool>(),
        objective in prop::collection::vec(-4i64..6, 1..5),
        rows in prop::collection::vec(
            (prop::collection::vec(-3i64..4, 5), any::<u8>(), -4i64..8), 0..5),
    ) {
        let n = objective.len();
        let dir = if maximize { Direction::Maximize } else { Direction::Minimize };
        let mut p = LpProblem::new(dir, objective.iter().map(|&c| int(c)).collect());
        // keep maximization bounded-ish by capping the variable sum
        if maximize {
            p.add_constraint((0..n).map(|j| (j, int(1))).collect(), Relation::Le, int(10));
        }
        for (coeffs, rel, rhs) in rows {
            let coeffs = coeffs.into_iter().take(n).enumerate().map(|(j, a)| (j, int(a))).collect();
            p.add_constraint(coeffs, relation(rel), int(rhs));
        }
        let s = solve(&p).unwrap();
        if s.status == Status::Optimal {
            prop_assert!(verify_certificate(&p, &s), "{}", p);
        }
    }

    // Set-cover relaxations are always feasible and bounded.
    #[test]
    fn cover_relaxations_are_optimal(
        masks in prop::collection::vec(1u8..16, 1..12),
        costs in prop::collection::vec(1i64..6, 12),
    ) {
        let universe: u8 = masks.iter().fold(0, |a, m| a | m);
        let mut p = LpProblem::new(Direction::Minimize, masks.iter().zip(&costs).map(|(_, &c)| int(c)).collect());
        for e in 0..4 {
            if universe >> e & 1 == 0 { continue; }
            let row = masks.iter().enumerate().filter(|(_, m)| *m >> e & 1 == 1).map(|(j, _)| (j, int(1))).collect();
            p.add_constraint(row, Relation::Ge, int(1));
        }
        let s = solve(&p).unwrap();
        prop_assert_eq!(s.status, Status::Optimal);
        prop_assert!(verify_certificate(&p, &s));
    }
}
