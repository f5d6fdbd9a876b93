mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rlkh::io::{parse_tour, write_tour, TimeWindowData};
use rlkh::kopt::{k_opt, KOptConfig, Shorter};
use rlkh::onetree::{alpha_values, ascend_pi, AscentConfig};
use rlkh::rl::{StagnationBudget, StrategyController};
use rlkh::solver::{better, double_bridge, jv_transform, prepare, violation_tsptw, SolutionPair};
use rlkh::{CandidateSets, City, Mode, QTable, SolverConfig, Tour};

use common::random_euclidean;

fn shuffled(n: usize, seed: u64) -> Tour {
    let mut order: Vec<City> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Tour::new(order).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kopt_moves_shorten_by_their_gain(n in 5usize..60, seed in any::<u64>(), kmax in 2usize..7) {
        let inst = random_euclidean(seed, n, 1000.0);
        let cs = prepare(&inst, &SolverConfig::with_mode(Mode::LkhAlpha)).candidates;
        let mut tour = shuffled(n, seed ^ 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = KOptConfig { k_max: kmax, ..KOptConfig::default() };
        for p1 in 0..n {
            let before = tour.length(&inst);
            match k_opt(&inst, &mut tour, &cs, p1, &cfg, &mut rng, &mut Shorter) {
                Some(imp) => {
                    prop_assert!(imp.gain > 0);
                    prop_assert!(imp.seq.k() <= kmax);
                    prop_assert_eq!(before - tour.length(&inst), imp.gain);
                    prop_assert_eq!(imp.seq.gain(&inst), imp.gain);
                }
                None => prop_assert_eq!(tour.length(&inst), before),
            }
            prop_assert!(tour.validate().is_ok());
        }
    }

    #[test]
    fn double_bridge_keeps_a_permutation(n in 8usize..200, seed in any::<u64>()) {
        let tour = shuffled(n, seed);
        let kicked = double_bridge(&tour, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(kicked.validate().is_ok());
        prop_assert_eq!(kicked.len(), n);
        let fresh = kicked.edges().filter(|&(a, b)| !tour.adjacent(a, b)).count();
        prop_assert!(fresh <= 4);
    }

    #[test]
    fn bound_below_every_tour(n in 5usize..40, seed in any::<u64>()) {
        let inst = random_euclidean(seed, n, 1000.0);
        let a = ascend_pi(&inst, &AscentConfig::default());
        prop_assert!(a.w >= a.initial_w);
        for k in 0..5 {
            prop_assert!(a.w <= shuffled(n, seed.wrapping_add(k)).length(&inst));
        }
    }

    #[test]
    fn alpha_is_zero_on_tree_edges_and_nonnegative(n in 5usize..30, seed in any::<u64>()) {
        let inst = random_euclidean(seed, n, 1000.0);
        let a = ascend_pi(&inst, &AscentConfig::default());
        let table = alpha_values(&inst, &a.tree);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    prop_assert!(table.get(i, j) >= 0);
                    prop_assert_eq!(table.get(i, j), table.get(j, i));
                }
            }
        }
        for (i, j) in a.tree.edges() {
            prop_assert_eq!(table.get(i, j), 0);
        }
    }

    #[test]
    fn resort_orders_by_descending_q(vals in proptest::collection::vec(-100i32..100, 2..10)) {
        let n = vals.len() + 1;
        let mut q = QTable::new(n);
        for (k, &v) in vals.iter().enumerate() {
            q.set_pair(0, k + 1, v as f64);
        }
        let mut lists = vec![(1..n).collect::<Vec<_>>()];
        lists.extend((1..n).map(|_| vec![0]));
        let mut cs = CandidateSets::new(lists);
        cs.resort(&q);
        let got: Vec<f64> = cs.of(0).iter().map(|&j| q.get(0, j).unwrap()).collect();
        prop_assert!(got.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(q.get(3.min(n - 1), 0), q.get(0, 3.min(n - 1)));
    }

    #[test]
    fn lexicographic_order_is_strict(a in (0i64..5, 0i64..5), b in (0i64..5, 0i64..5)) {
        let (x, y) = (SolutionPair { fv: a.0, fo: a.1 }, SolutionPair { fv: b.0, fo: b.1 });
        prop_assert!(!better(x, x));
        prop_assert!(!(better(x, y) && better(y, x)));
        prop_assert_eq!(better(x, y), (a.0, a.1) < (b.0, b.1));
    }

    #[test]
    fn open_windows_give_the_tour_length(n in 3usize..40, seed in any::<u64>()) {
        let inst = random_euclidean(seed, n, 1000.0);
        let tour = shuffled(n, seed);
        let s = violation_tsptw(&inst, &TimeWindowData::unbounded(n), &tour);
        prop_assert_eq!(s, SolutionPair { fv: 0, fo: tour.length(&inst) });
    }

    #[test]
    fn jv_round_trip(n in 3usize..20, seed in any::<u64>()) {
        let costs: Vec<i64> = (0..n * n).map(|k| if k % (n + 1) == 0 { 0 } else { (k as i64 * 7919 + seed as i64 % 97).rem_euclid(100) + 1 }).collect();
        let jv = jv_transform(&costs, n).unwrap();
        let mut rest: Vec<City> = (1..n).collect();
        rest.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut route = vec![0];
        route.extend(rest);
        let tour = jv.encode(&route);
        prop_assert_eq!(jv.recover(&tour), Some(route.clone()));
        let len: i64 = (0..n).map(|k| costs[route[k] * n + route[(k + 1) % n]]).sum();
        prop_assert_eq!(tour.length(&jv.instance) - jv.offset, len);
    }

    #[test]
    fn tour_file_round_trip(n in 1usize..100, seed in any::<u64>()) {
        let tour = shuffled(n, seed);
        let text = write_tour(&tour, "t", None);
        prop_assert_eq!(parse_tour(&text).unwrap(), tour.order().to_vec());
    }

    #[test]
    fn controller_switches_after_n_max_stagnant_iterations(
        n_max in 1u64..6,
        trace in proptest::collection::vec(any::<bool>(), 1..80),
    ) {
        let mut ctl = StrategyController::new(StagnationBudget::Iterations(n_max));
        let mut num = 0u64;
        let mut m = 1u8;
        for &improved in &trace {
            num += 1;
            if num >= n_max {
                m = m % 3 + 1;
                num = 0;
            }
            prop_assert_eq!(ctl.strategy_step(improved).index(), m);
            if improved {
                num = 0;
            }
            prop_assert_eq!(ctl.stagnation(), num);
        }
    }
}
