use proptest::prelude::*;

use proxplay_core::playcore::{inclusion_residual, vi_residual};
use proxplay_core::{solve_play, Path, Point, SetSpec, SolverOptions};

fn catalog() -> Vec<(SetSpec, Point)> {
    vec![
        (
            SetSpec::cube([-1.0, -1.0], [1.0, 1.0]).unwrap(),
            Point::from([0.2, -0.3]),
        ),
        (
            SetSpec::ball([0.0, 0.0], 1.0).unwrap(),
            Point::from([1.0, 0.0]),
        ),
        (
            SetSpec::halfspace([0.6, 0.8], 0.5).unwrap(),
            Point::from([0.0, 0.0]),
        ),
        (
            SetSpec::complement_of_ball([0.0, 0.0], 1.0).unwrap(),
            Point::from([1.0, 0.0]),
        ),
        (
            SetSpec::union(
                vec![
                    SetSpec::ball([-2.0, 0.0], 1.0).unwrap(),
                    SetSpec::ball([2.0, 0.0], 1.0).unwrap(),
                ],
                2.0,
            )
            .unwrap(),
            Point::from([-1.0, 0.0]),
        ),
    ]
}

/// Random polyline in the plane starting at the origin.
fn input() -> impl Strategy<Value = Path> {
    prop::collection::vec((0.01f64..1.0, -0.8f64..0.8, -0.8f64..0.8), 1..24).prop_map(|steps| {
        let mut times = vec![0.0];
        let mut values = vec![Point::zeros(2)];
        for (dt, a, b) in steps {
            times.push(times.last().unwrap() + dt);
            values.push(values.last().unwrap() + &Point::from([a, b]));
        }
        Path::new(times, values).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outputs_satisfy_constraint_and_identities(u in input(), which in 0usize..5) {
        let (set, z0) = catalog().swap_remove(which);
        let sol = solve_play(&set, &u, &z0, &SolverOptions::default()).unwrap();
        prop_assert_eq!(sol.x().start(), &z0);
        for k in 0..sol.u().len() {
            let (u, y, x, w) = (&sol.u().values()[k], &sol.y().values()[k], &sol.x().values()[k], &sol.w().values()[k]);
            prop_assert!(set.contains(x).unwrap());
            prop_assert!((&(x + y) - u).norm() <= 1e-12);
            prop_assert!((&(&(y * 2.0) - u) - w).norm() <= 1e-12);
        }
    }

    #[test]
    fn residuals_certify_solutions(u in input(), which in 0usize..5, seed in any::<u64>()) {
        let (set, z0) = catalog().swap_remove(which);
        let opts = SolverOptions { residual_targets: 16, ..SolverOptions::default() };
        let sol = solve_play(&set, &u, &z0, &opts).unwrap();
        prop_assert!(vi_residual(&sol, seed) <= 1e-9);
        prop_assert!(inclusion_residual(&sol, 0.5).unwrap() <= 1e-9);
    }

    #[test]
    fn retiming_leaves_outputs_unchanged(u in input(), which in 0usize..5, stretch in 0.1f64..10.0) {
        let (set, z0) = catalog().swap_remove(which);
        let opts = SolverOptions::default();
        let times: Vec<f64> = u.times().iter().map(|t| stretch * t * (1.0 + t)).collect();
        let a = solve_play(&set, &u, &z0, &opts).unwrap();
        let b = solve_play(&set, &u.retimed(times).unwrap(), &z0, &opts).unwrap();
        prop_assert_eq!(a.y().values(), b.y().values());
    }

    #[test]
    fn prefix_solves_agree(u in input(), which in 0usize..5, cut in 0.0f64..1.0) {
        let (set, z0) = catalog().swap_remove(which);
        let opts = SolverOptions::default();
        let nodes = 2 + ((u.len() - 2) as f64 * cut) as usize;
        let full = solve_play(&set, &u, &z0, &opts).unwrap();
        let part = solve_play(&set, &u.prefix(nodes).unwrap(), &z0, &opts).unwrap();
        let n = part.y().len();
        prop_assert_eq!(&full.y().values()[..n], part.y().values());
    }

    #[test]
    fn convex_stop_is_nonexpansive(u in input()) {
        // same input, different initial states
        let set = SetSpec::ball([0.0, 0.0], 1.0).unwrap();
        let opts = SolverOptions::default();
        let a = solve_play(&set, &u, &Point::from([0.5, 0.0]), &opts).unwrap();
        let b = solve_play(&set, &u, &Point::from([-0.3, 0.4]), &opts).unwrap();
        let d = a.x().values().iter().zip(b.x().values()).map(|(p, q)| p.dist(q)).collect::<Vec<_>>();
        for w in d.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
