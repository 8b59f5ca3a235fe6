use proptest::prelude::*;

use littlestone_lab::dimensions::{ldim, ldim_by_trees, tdim, LittlestoneTree};
use littlestone_lab::fooling::{
    cylinder_in_union, fool_many_with, fool_single, materialize, weaken, FoolingVerdict, Origin, Restriction,
    RestrictionStream,
};
use littlestone_lab::learners::{
    run_game, soa, worst_case_mistakes, ConstantLearner, Learner, MajorityLearner, SeededLearner,
};
use littlestone_lab::par::Exec;
use littlestone_lab::{Cylinder, FiniteClass, Hypothesis, Point, Sample};

fn class(n: usize) -> impl Strategy<Value = FiniteClass> {
    prop::collection::btree_set(0u64..1 << n, 0..=(1usize << n).min(12))
        .prop_map(move |ms| FiniteClass::new(n, ms.into_iter().map(|m| Hypothesis::from_mask(n, m))).unwrap())
}

fn any_class() -> impl Strategy<Value = FiniteClass> {
    (1usize..=4).prop_flat_map(class)
}

fn pairs(support: usize, max_len: usize) -> impl Strategy<Value = Vec<(Point, bool)>> {
    prop::collection::vec((0..support, any::<bool>()), 0..=max_len)
}

fn sample(p: &[(Point, bool)]) -> Sample {
    Sample::from_pairs(p.iter().copied())
}

fn all_functions(n: usize) -> impl Iterator<Item = Hypothesis> {
    (0u64..1 << n).map(move |m| Hypothesis::from_mask(n, m))
}

fn agrees(f: &Hypothesis, p: &[(Point, bool)]) -> bool {
    p.iter().all(|&(x, b)| f.get(x) == b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ldim_bounded_by_log_size(h in any_class()) {
        let d = ldim(&h);
        prop_assert!(d < 0 || (1usize << d) <= h.len());
        prop_assert_eq!(d < 0, h.is_empty());
    }

    #[test]
    fn ldim_is_monotone(h in any_class(), keep in prop::collection::vec(any::<bool>(), 16)) {
        let sub = FiniteClass::new(
            h.domain_size(),
            h.hypotheses().iter().zip(keep.iter().cycle()).filter(|(_, &k)| k).map(|(f, _)| f.clone()),
        ).unwrap();
        prop_assert!(ldim(&sub) <= ldim(&h));
    }

    #[test]
    fn tree_search_matches_recursion_both_ways(h in any_class()) {
        let seq = ldim_by_trees(&h, h.domain_size(), Exec::Sequential).within();
        let par = ldim_by_trees(&h, h.domain_size(), Exec::Parallel).within();
        prop_assert_eq!(seq, par);
        prop_assert_eq!(seq, Some(ldim(&h).max(0) as usize));
    }

    #[test]
    fn threshold_witness_is_realized(h in any_class()) {
        let w = tdim(&h, h.domain_size()).within().unwrap();
        prop_assert_eq!(w.sequence.len(), w.tdim);
        for i in 1..=w.tdim {
            let p: Vec<_> = w.sequence.iter().enumerate().map(|(j, &x)| (x, j + 1 >= i)).collect();
            prop_assert!(h.hypotheses().iter().any(|f| agrees(f, &p)));
        }
    }

    #[test]
    fn soa_within_ldim_and_sequential_agrees(h in class(3)) {
        prop_assume!(!h.is_empty());
        let l = soa(&h).unwrap();
        let a = worst_case_mistakes(&l, &h, 3, 1_000_000, Exec::Sequential);
        let b = worst_case_mistakes(&l, &h, 3, 1_000_000, Exec::Parallel);
        prop_assert_eq!(&a, &b);
        prop_assert!(a.mistakes as i32 <= ldim(&h).max(0));
    }

    #[test]
    fn game_replay_counts_mistakes(seed in any::<u64>(), p in pairs(6, 8)) {
        let l = SeededLearner::new(seed);
        let t = run_game(&l, &sample(&p), 1_000);
        prop_assert_eq!(t.rounds.len(), p.len());
        let wrong = t.rounds.iter().filter(|r| r.predicted.bit() != Some(r.truth)).count();
        prop_assert_eq!(t.mistakes, wrong);
    }

    #[test]
    fn cylinder_cover_matches_enumeration(
        support in 1usize..=8,
        c in pairs(8, 3),
        forbidden in prop::collection::vec(pairs(8, 3), 0..10),
    ) {
        let clip = |p: &[(Point, bool)]| p.iter().map(|&(x, b)| (x % support, b)).collect::<Vec<_>>();
        let c = clip(&c);
        let forbidden: Vec<_> = forbidden.iter().map(|p| clip(p)).collect();
        let brute = all_functions(support).any(|f| agrees(&f, &c) && forbidden.iter().all(|p| !agrees(&f, p)));
        let cyls: Vec<Cylinder> = forbidden.iter().map(|p| Cylinder::new(sample(p))).collect();
        prop_assert_eq!(cylinder_in_union(&Cylinder::new(sample(&c)), &cyls).unwrap(), !brute);
    }

    #[test]
    fn weakening_removes_only_functions_with_a_one_in_the_block(
        forbid in pairs(6, 3),
        block in prop::collection::btree_set(0usize..6, 1..4),
    ) {
        let block: Vec<Point> = block.into_iter().collect();
        let r = Restriction::new(sample(&forbid), Origin::BlockValue(0));
        let weak = weaken(&r, &block);
        for f in all_functions(6) {
            let hit = weak.iter().any(|w| w.hits(&f));
            let expected = r.hits(&f) && block.iter().any(|&y| f.get(y));
            prop_assert_eq!(hit, expected, "{}", f);
        }
    }

    #[test]
    fn more_restrictions_mean_fewer_functions(rs in prop::collection::vec(pairs(7, 3), 0..8)) {
        let mut stream = RestrictionStream::new();
        let mut last = materialize(&stream, 7, u128::MAX).unwrap();
        for p in &rs {
            stream.push(Restriction::new(sample(p), Origin::FirstType));
            let now = materialize(&stream, 7, u128::MAX).unwrap();
            prop_assert!(now.iter().all(|f| last.contains(f)));
            prop_assert!(now.iter().all(|f| stream.admits(f)));
            let brute = all_functions(7).filter(|f| stream.admits(f)).count();
            prop_assert_eq!(now.len(), brute);
            last = now;
        }
    }

    #[test]
    fn jsonl_roundtrip(rs in prop::collection::vec(pairs(9, 4), 0..6)) {
        let mut stream = RestrictionStream::new();
        for (i, p) in rs.iter().enumerate() {
            let origin = if i % 2 == 0 { Origin::BlockEquality(i) } else { Origin::FirstType };
            stream.push(Restriction::new(sample(p), origin));
        }
        let text = stream.to_jsonl();
        let back = RestrictionStream::read_jsonl(text.as_bytes()).unwrap();
        prop_assert_eq!(back, stream);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fooling_verdicts_replay(seed in any::<u64>(), fuel in 1u64..4, iters in 1usize..5) {
        let block: Vec<Point> = (0..fuel as usize * iters + 1).collect();
        let l = SeededLearner::new(seed);
        let run = fool_single(&l, &block, fuel, iters).unwrap();
        match &run.verdict {
            FoolingVerdict::ForcedMistakes { count, witness, transcript, .. } => {
                prop_assert_eq!(*count, iters);
                let s = Sample::from_pairs(transcript.rounds.iter().map(|r| (r.x, r.truth)));
                prop_assert_eq!(run_game(&l, &s, fuel).mistakes, iters);
                prop_assert!(agrees(witness, s.pairs()));
                prop_assert!(run.stream.admits(witness));
            }
            FoolingVerdict::DivergedOnRealizable { .. } => prop_assert!(false, "seeded learners always answer"),
        }
    }

    #[test]
    fn fool_many_is_executor_independent(fuel in 1u64..3, iters in 1usize..4) {
        let ppb = fuel as usize * iters + 1;
        let learners: Vec<Box<dyn Learner>> = vec![
            Box::new(ConstantLearner::new(true)),
            Box::new(MajorityLearner),
            Box::new(SeededLearner::new(fuel)),
        ];
        let a = fool_many_with(&learners, ppb, fuel, iters, Exec::Sequential).unwrap();
        let b = fool_many_with(&learners, ppb, fuel, iters, Exec::Parallel).unwrap();
        prop_assert_eq!(&a.stream, &b.stream);
        prop_assert_eq!(a.witness_checks, b.witness_checks);
    }

    #[test]
    fn tree_leaves_cover_every_path(depth in 1usize..4, labels in prop::collection::vec(0usize..5, 7)) {
        let t = LittlestoneTree::new(depth, labels[..(1 << depth) - 1].to_vec()).unwrap();
        let paths: std::collections::BTreeSet<Vec<bool>> = t
            .leaves()
            .map(|l| t.leaf_sample(&l).unwrap().pairs().iter().map(|&(_, b)| b).collect())
            .collect();
        prop_assert_eq!(paths.len(), 1 << depth);
    }
}
