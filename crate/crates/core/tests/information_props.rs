mod common;

use common::{entropy_of, random_partition, random_system, random_weights, rng, NAMES};
use ld_core::*;
use rand::Rng;

#[test]
fn content_grows_under_refinement() {
    let mut r = rng(31);
    for _ in 0..300 {
        let n = r.gen_range(1..=7);
        let p = random_partition(&mut r, n);
        let q = random_partition(&mut r, n);
        let fine = p.common_refinement(&q).unwrap();
        assert!(content(&p).is_subset(&content(&fine)).unwrap());
        assert_eq!(content(&fine), content(&p).union(&content(&q)).unwrap());
    }
}

#[test]
fn mutual_information_expression_matches_region() {
    let mut r = rng(32);
    let expr: EntropyExpr = "H(X) + H(Y) - H(X,Y)".parse().unwrap();
    let sugar: EntropyExpr = "I(X;Y)".parse().unwrap();
    for _ in 0..100 {
        let sys = {
            let n = r.gen_range(2..=6);
            random_system(&mut r, n, 2)
        };
        let a = expression_to_formal_sum(&sys, &expr).unwrap();
        assert_eq!(a, expression_to_formal_sum(&sys, &sugar).unwrap());
        let region = quantity_region(&sys, QuantityKind::MutualInformation, &["X", "Y"]).unwrap();
        assert_eq!(a, FormalSum::from_set(&region));
    }
}

#[test]
fn expression_measure_matches_direct_evaluation() {
    let mut r = rng(33);
    let sources = [
        "I(X;Y|Z)",
        "H(X|Y,Z) + 2H(Z) - I(X;Y;Z)",
        "3*H(X,Y) - 2I(Y;Z) + H(Z|X)",
        "-H(X) + I(X;Y;Z|X)",
    ];
    for _ in 0..60 {
        let sys = {
            let n = r.gen_range(2..=7);
            random_system(&mut r, n, 3)
        };
        for src in sources {
            let expr: EntropyExpr = src.parse().unwrap();
            let z = expression_to_formal_sum(&sys, &expr).unwrap();
            let direct = expr.evaluate_direct(&sys).unwrap();
            assert!(
                (sys.measure_sum(&z).unwrap() - direct).abs() < 1e-9,
                "{src}"
            );
        }
    }
}

#[test]
fn independent_variables_have_zero_co_information() {
    // X, Y, Z are independent bits on eight equiprobable outcomes
    let space = OutcomeSpace::numbered(&[0.125; 8]).unwrap();
    let bit = |k: u32| {
        let labels: Vec<u32> = (0..8u32).map(|i| i >> k & 1).collect();
        Partition::from_labels(&labels)
    };
    let sys = InfoSystem::new(
        space,
        vec![
            ("X".into(), bit(0)),
            ("Y".into(), bit(1)),
            ("Z".into(), bit(2)),
        ],
    )
    .unwrap();
    for names in [&["X", "Y"][..], &["X", "Y", "Z"]] {
        let co = quantity(&sys, QuantityKind::CoInformation, names).unwrap();
        assert!(co.abs() < 1e-12, "{co}");
    }
    let mi = quantity(&sys, QuantityKind::MutualInformation, &["X", "Y"]).unwrap();
    assert!(mi.abs() < 1e-12);
}

#[test]
fn total_correlation_of_two_is_mutual_information() {
    let mut r = rng(34);
    for _ in 0..100 {
        let sys = {
            let n = r.gen_range(2..=7);
            random_system(&mut r, n, 2)
        };
        let tc =
            multiplicity_quantity(&sys, MultiplicityKind::TotalCorrelation, &["X", "Y"]).unwrap();
        let mi =
            entropy_of(&sys, &["X"]) + entropy_of(&sys, &["Y"]) - entropy_of(&sys, &["X", "Y"]);
        assert!((tc - mi).abs() < 1e-9);
    }
}

fn split_all(space: &OutcomeSpace, ways: usize) -> RefinementMap {
    let splits: Vec<(String, Vec<(String, f64)>)> = (0..space.len())
        .map(|i| {
            let w = space.weight(i) / ways as f64;
            let kids = (0..ways)
                .map(|j| (format!("{}{}", space.label(i), j), w))
                .collect();
            (space.label(i).to_string(), kids)
        })
        .collect();
    RefinementMap::new(space, &splits).unwrap()
}

#[test]
fn split_order_does_not_matter() {
    let mut r = rng(35);
    for _ in 0..100 {
        let n = r.gen_range(2..=4);
        let space = OutcomeSpace::numbered(&random_weights(&mut r, n, 0.0)).unwrap();
        let map = split_all(&space, r.gen_range(2..=4));
        let atoms = enumerate_atoms(n);
        let z = FormalSum::from_terms(n, atoms.iter().map(|&a| (a, r.gen_range(-2..=2))));
        let seq = map.map_formal_sum_with(&z, SplitOrder::Sequential).unwrap();
        let half = map.map_formal_sum_with(&z, SplitOrder::Halving).unwrap();
        assert_eq!(seq, half);
        assert_eq!(seq, map.map_formal_sum_closed(&z).unwrap());
    }
}

#[test]
fn composed_maps_agree_with_stepwise_maps() {
    let mut r = rng(36);
    for _ in 0..50 {
        let n = r.gen_range(2..=4);
        let space = OutcomeSpace::numbered(&random_weights(&mut r, n, 0.0)).unwrap();
        let first = split_all(&space, 2);
        let second = RefinementMap::new(
            first.child(),
            &[(
                first.child().label(0),
                vec![
                    ("left", first.child().weight(0) / 2.0),
                    ("right", first.child().weight(0) / 2.0),
                ],
            )],
        )
        .unwrap();
        let both = first.compose(&second).unwrap();
        let z = FormalSum::from_set(&AtomSet::full(n));
        let stepwise = second
            .map_formal_sum(&first.map_formal_sum(&z).unwrap())
            .unwrap();
        assert_eq!(both.map_formal_sum(&z).unwrap(), stepwise);
        let (parent, child) = both.tables(LogBase::BITS);
        let diff = child.measure_sum(&stepwise).unwrap() - parent.measure_sum(&z).unwrap();
        assert!(diff.abs() < 1e-9);
    }
}

#[test]
fn equivalence_is_reflexive_symmetric_transitive() {
    let mut r = rng(37);
    for _ in 0..50 {
        let n = r.gen_range(2..=4);
        let space = OutcomeSpace::numbered(&random_weights(&mut r, n, 0.0)).unwrap();
        let a = split_all(&space, 2);
        let b = RefinementMap::new(
            a.child(),
            &[(
                a.child().label(1),
                vec![
                    ("p", a.child().weight(1) / 3.0),
                    ("q", 2.0 * a.child().weight(1) / 3.0),
                ],
            )],
        )
        .unwrap();
        let ab = a.compose(&b).unwrap();
        let top = RefinementMap::identity(b.child());

        let x = random_partition(&mut r, n);
        let s0 = content(&x);
        let s1 = a.map_atom_set(&s0).unwrap();
        let s2 = ab.map_atom_set(&s0).unwrap();

        assert!(equivalent_under_refinement(&s0, &ab, &s0, &ab).unwrap());
        assert_eq!(
            equivalent_under_refinement(&s0, &ab, &s1, &b).unwrap(),
            equivalent_under_refinement(&s1, &b, &s0, &ab).unwrap()
        );
        assert!(equivalent_under_refinement(&s0, &ab, &s1, &b).unwrap());
        assert!(equivalent_under_refinement(&s1, &b, &s2, &top).unwrap());
        assert!(equivalent_under_refinement(&s0, &ab, &s2, &top).unwrap());

        let y = random_partition(&mut r, n);
        let other = content(&y);
        assert_eq!(
            equivalent_under_refinement(&s0, &ab, &other, &ab).unwrap(),
            s0 == other
        );
        assert!(matches!(
            equivalent_under_refinement(&s0, &ab, &s1, &a),
            Err(Error::NoCommonRefinement)
        ));
    }
}

#[test]
fn refinement_three_outcome_scenario() {
    // X = {{a,b},{c}} before and after splitting a; Y separates b from the rest
    let space = OutcomeSpace::new(["a", "b", "c"], &[0.4, 0.3, 0.3]).unwrap();
    let map = RefinementMap::new(&space, &[("a", vec![("a1", 0.2), ("a2", 0.2)])]).unwrap();
    let x = Partition::from_blocks(&space, &[vec!["a", "b"], vec!["c"]]).unwrap();
    let y = Partition::from_blocks(&space, &[vec!["a", "c"], vec!["b"]]).unwrap();
    let dx = content(&x);
    let psi_dx = map.map_atom_set(&dx).unwrap();
    let id = RefinementMap::identity(map.child());
    assert!(equivalent_under_refinement(&dx, &map, &psi_dx, &id).unwrap());
    assert!(!equivalent_under_refinement(&dx, &map, &content(&y), &map).unwrap());
    let (parent, child) = map.tables(LogBase::BITS);
    let diff = child.measure_set(&psi_dx).unwrap() - parent.measure_set(&dx).unwrap();
    assert!(diff.abs() < 1e-12);
    assert_eq!(psi_dx, content(&map.map_partition(&x).unwrap()));
}

#[test]
fn micro_macro_parts_cover_region() {
    let mut r = rng(38);
    for _ in 0..100 {
        let n = r.gen_range(2..=7);
        let sys = random_system(&mut r, n, 2);
        let region = sys
            .content_of("X")
            .unwrap()
            .intersection(&sys.content_of("Y").unwrap())
            .unwrap();
        let subsystems = random_partition(&mut r, n);
        let parts = micro_macro_split(&sys, &region, &subsystems).unwrap();
        let mut union = AtomSet::empty(n);
        let mut total = 0.0;
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i + 1..] {
                assert!(a.atoms.intersection(&b.atoms).unwrap().is_empty());
            }
            union = union.union(&a.atoms).unwrap();
            total += a.measure;
        }
        assert_eq!(union, region);
        assert!((total - sys.measure(&region).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn micro_macro_edge_cases() {
    let sys = build_canonical_system(CanonicalSystemName::Dyadic)
        .unwrap()
        .system;
    let region = sys.content_of("X").unwrap();
    let parts = micro_macro_split(&sys, &region, &Partition::trivial(8)).unwrap();
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0].atoms, region);
    let empty = micro_macro_split(&sys, &AtomSet::empty(8), &Partition::singletons(8)).unwrap();
    assert!(empty.iter().all(|p| p.atoms.is_empty() && p.measure == 0.0));
}

#[test]
fn redundant_pair_refined_split() {
    let pair = build_canonical_system(CanonicalSystemName::RedundantPair)
        .unwrap()
        .system;
    let map = RefinementMap::new(
        pair.space(),
        &[
            (
                "00",
                vec![("aa", 0.125), ("ab", 0.125), ("ba", 0.125), ("bb", 0.125)],
            ),
            (
                "11",
                vec![("cc", 0.125), ("cd", 0.125), ("dc", 0.125), ("dd", 0.125)],
            ),
        ],
    )
    .unwrap();
    let child = map.child().clone();
    let first: Vec<char> = child
        .labels()
        .iter()
        .map(|l| l.chars().next().unwrap())
        .collect();
    let second: Vec<char> = child
        .labels()
        .iter()
        .map(|l| l.chars().nth(1).unwrap())
        .collect();
    let sys = InfoSystem::new(
        child.clone(),
        vec![
            ("X'".into(), Partition::from_labels(&first)),
            ("Y'".into(), Partition::from_labels(&second)),
        ],
    )
    .unwrap();
    let low = child.mask_of(&["aa", "ab", "ba", "bb"]).unwrap();
    let high = child.mask_of(&["cc", "cd", "dc", "dd"]).unwrap();

    let crossing = star(8, &[low, high]).unwrap();
    let image = map.map_atom_set(&star(2, &[0b01, 0b10]).unwrap()).unwrap();
    assert_eq!(crossing, image);

    let region = sys
        .content_of("X'")
        .unwrap()
        .intersection(&sys.content_of("Y'").unwrap())
        .unwrap();
    let local = restrict(&sys.content_of("Y'").unwrap(), low);
    assert_eq!(
        local,
        content_of_blocks(8, &sys.variable("Y'").unwrap().restrict(low))
    );

    let subsystems = Partition::from_masks(8, [low, high]).unwrap();
    let parts = micro_macro_split(&sys, &region, &subsystems).unwrap();
    assert_eq!(parts.len(), 3);
    assert!(parts[0].measure.abs() < 1e-12 && parts[1].measure.abs() < 1e-12);
    assert!(!parts[0].atoms.is_empty());
    assert!((parts[2].measure - 1.0).abs() < 1e-9);
    assert_eq!(parts[2].atoms, crossing);
}

#[test]
fn kl_matches_direct_divergence() {
    let mut r = rng(39);
    for _ in 0..100 {
        let n = r.gen_range(1..=40);
        let p = random_weights(&mut r, n, 0.2);
        let direct: f64 = p
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| x * (x * n as f64).log2())
            .sum();
        assert!((kl_via_measure(&p, n, LogBase::BITS).unwrap() - direct).abs() < 1e-9);
    }
}

#[test]
fn every_region_of_three_variables_is_consistent() {
    let mut r = rng(40);
    let regions = ["X\\(Y|Z)", "(X&Y)\\Z", "X&Y&Z", "(X|Y)\\Z", "X|Y|Z"];
    for _ in 0..50 {
        let sys = {
            let n = r.gen_range(3..=7);
            random_system(&mut r, n, 3)
        };
        for src in regions {
            let set = eval_region(&sys, &src.parse().unwrap()).unwrap();
            assert!(set.iter().all(|a| set.contains(a)));
            let v = sys.measure(&set).unwrap();
            assert!(v.is_finite());
        }
        let hx = entropy_of(&sys, &["X"]);
        let union = eval_region(&sys, &"X|Y|Z".parse().unwrap()).unwrap();
        assert!((sys.measure(&union).unwrap() - entropy_of(&sys, &NAMES)).abs() < 1e-9);
        let own = eval_region(&sys, &"X".parse().unwrap()).unwrap();
        assert!((sys.measure(&own).unwrap() - hx).abs() < 1e-9);
    }
}
