use kncross::diagram::*;
use proptest::prelude::*;

fn d(n: usize, arcs: &[(usize, usize)]) -> Diagram {
    Diagram::new(n, arcs.to_vec()).unwrap()
}

#[test]
fn k_noncrossing_examples() {
    assert!(!d(6, &[(1, 4), (2, 5), (3, 6)]).is_k_noncrossing(3));
    assert!(d(4, &[(1, 3), (2, 4)]).is_k_noncrossing(3));
    assert!(!d(4, &[(1, 3), (2, 4)]).is_k_noncrossing(2));
    assert_eq!(enumerate_count(6, &Query::matching(3)).unwrap(), 14);
    assert_eq!(enumerate_count(4, &Query::matching(3)).unwrap(), 3);
}

#[test]
fn rejects_invalid_diagrams() {
    assert!(Diagram::new(4, vec![(1, 3), (3, 4)]).is_err());
    assert!(Diagram::new(4, vec![(2, 2)]).is_err());
    assert!(Diagram::new(4, vec![(1, 5)]).is_err());
}

#[test]
fn skeleton_examples() {
    assert!(d(4, &[(1, 3), (2, 4)]).is_skeleton_matching());
    assert!(!d(4, &[(1, 2), (3, 4)]).is_skeleton_matching());
    let w = d(12, &[(1, 9), (2, 8), (3, 7), (4, 12), (5, 11), (6, 10)]);
    assert!(w.is_canonical_skeleton());
    let all = enumerate_list(6, &Query::skeleton_matching(3), DEFAULT_LIMIT).unwrap();
    let expect = [
        d(6, &[(1, 3), (2, 5), (4, 6)]),
        d(6, &[(1, 4), (2, 6), (3, 5)]),
        d(6, &[(1, 5), (2, 4), (3, 6)]),
    ];
    let mut got = all.clone();
    got.sort();
    let mut want = expect.to_vec();
    want.sort();
    assert_eq!(got, want);
}

#[test]
fn modular_examples() {
    assert_eq!(enumerate_count(7, &Query::modular(2)).unwrap(), 2);
    let list = enumerate_list(7, &Query::modular(2), DEFAULT_LIMIT).unwrap();
    assert!(list.contains(&d(7, &[])));
    assert!(list.contains(&d(7, &[(1, 7), (2, 6)])));
}

#[test]
fn core_examples() {
    assert_eq!(d(6, &[(1, 6), (2, 5), (3, 4)]).core(), d(2, &[(1, 2)]));
    // two stacks separated by isolated vertices form one stem
    let stem = d(10, &[(1, 10), (2, 9), (4, 7), (5, 6)]);
    assert_eq!(stem.core(), d(2, &[(1, 2)]));
    let s = d(12, &[(1, 9), (2, 8), (3, 7), (4, 12), (5, 11), (6, 10)]).core();
    assert_eq!(s, d(4, &[(1, 3), (2, 4)]));
    assert!(s.is_shape());
}

#[test]
fn stacked_diagram_maps_to_its_shape() {
    let m = d(
        26,
        &[(1, 14), (2, 13), (4, 19), (5, 18), (7, 24), (8, 23), (10, 12), (15, 26), (16, 25)],
    );
    let shape = m.shape();
    assert_eq!(shape, d(10, &[(1, 6), (2, 8), (3, 9), (4, 5), (7, 10)]));
    assert!(shape.is_shape());
    assert_eq!(shape.shape(), shape);
}

#[test]
fn classify_examples() {
    let t = d(2, &[(1, 2)]).classify_arcs().unwrap();
    assert_eq!((t.s, t.u1, t.u2, t.u3, t.u4), (1, 1, 0, 0, 0));
    let t = d(4, &[(1, 3), (2, 4)]).classify_arcs().unwrap();
    assert_eq!((t.u1, t.u2, t.u3, t.u4), (0, 1, 0, 0));
    // (2,4) uniquely crosses (3,8) and (5,7) uniquely crosses (1,6)
    let t = d(8, &[(1, 6), (2, 4), (3, 8), (5, 7)]).classify_arcs().unwrap();
    assert_eq!((t.u1, t.u2, t.u3, t.u4), (0, 0, 2, 0));
    // (1,3) and (5,7) both cross (2,6); (8,10) uniquely crosses (4,9)
    let t = d(10, &[(1, 3), (2, 6), (4, 9), (5, 7), (8, 10)]).classify_arcs().unwrap();
    assert_eq!((t.u1, t.u2, t.u3, t.u4), (0, 0, 1, 1));
    assert!(d(4, &[(1, 4), (2, 3)]).classify_arcs().is_err());
}

#[test]
fn oracle_limit_enforced() {
    assert!(enumerate_count(19, &Query::all()).is_err());
    assert!(enumerate_count_with_limit(19, &Query::modular(3), 19).is_ok());
}

#[test]
fn display_round_trip() {
    let x = d(6, &[(1, 4), (2, 6)]);
    assert_eq!(x.to_string(), "6; (1,4) (2,6)");
    assert_eq!(x.to_string().parse::<Diagram>().unwrap(), x);
}

#[test]
fn tallies_respect_boundary() {
    for s in 0..=6 {
        for sh in enumerate_list(2 * s, &Query::shape(3), DEFAULT_LIMIT).unwrap() {
            let t = sh.classify_arcs().unwrap();
            assert!(t.u1 + 2 * t.u2 + 2 * t.u3 + 3 * t.u4 <= t.s);
        }
    }
}

#[test]
fn pruned_search_matches_filtered_full_search() {
    let queries = [
        Query::matching(3),
        Query::modular(2),
        Query::modular(3),
        Query::secondary(3),
        Query::shape(3),
        Query::irreducible(3),
        Query::skeleton_matching(3),
        Query::canonical_skeleton(),
    ];
    for n in 0..=10 {
        let all = enumerate_list(n, &Query::all(), DEFAULT_LIMIT).unwrap();
        for q in &queries {
            let want = all.iter().filter(|x| q.accepts(x)).count() as u64;
            assert_eq!(enumerate_count(n, q).unwrap(), want, "n={n} {q:?}");
        }
    }
}

#[test]
fn mirror_invariance() {
    let queries = [Query::modular(3), Query::shape(4), Query::canonical_skeleton(), Query::irreducible(3)];
    for q in &queries {
        for n in [8, 10, 12] {
            let list = enumerate_list(n, q, DEFAULT_LIMIT).unwrap();
            let mut mirrored: Vec<Diagram> = list.iter().map(Diagram::mirror).collect();
            mirrored.sort();
            let mut orig = list.clone();
            orig.sort();
            assert_eq!(mirrored, orig, "{q:?} n={n}");
        }
    }
}

#[test]
fn deterministic_order() {
    let a = enumerate_list(10, &Query::modular(3), DEFAULT_LIMIT).unwrap();
    let b = enumerate_list(10, &Query::modular(3), DEFAULT_LIMIT).unwrap();
    assert_eq!(a, b);
}

fn arb_diagram() -> impl Strategy<Value = Diagram> {
    (0usize..=12).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n).prop_perturb(move |mask, mut rng| {
            let mut free: Vec<usize> = (1..=n).collect();
            let mut arcs = Vec::new();
            for (i, keep) in mask.iter().enumerate() {
                if *keep && free.len() >= 2 && i % 2 == 0 {
                    let a = free.remove(rng.random_range(0..free.len()));
                    let b = free.remove(rng.random_range(0..free.len()));
                    arcs.push((a.min(b), a.max(b)));
                }
            }
            Diagram::new(n, arcs).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn shape_is_idempotent(x in arb_diagram()) {
        let s = x.shape();
        prop_assert_eq!(s.shape(), s.clone());
        prop_assert!(s.is_shape() || s.arc_count() == 0);
    }

    #[test]
    fn predicates_are_mirror_symmetric(x in arb_diagram()) {
        let m = x.mirror();
        for k in 2..=4 {
            prop_assert_eq!(x.is_k_noncrossing(k), m.is_k_noncrossing(k));
            prop_assert_eq!(x.is_modular(k), m.is_modular(k));
        }
        prop_assert_eq!(x.is_irreducible(), m.is_irreducible());
        prop_assert_eq!(x.is_skeleton_matching(), m.is_skeleton_matching());
        prop_assert_eq!(x.is_canonical_skeleton(), m.is_canonical_skeleton());
        prop_assert_eq!(x.is_canonical(2), m.is_canonical(2));
    }

    #[test]
    fn k_noncrossing_matches_pairwise_definition(x in arb_diagram()) {
        // 2-noncrossing iff no two arcs cross
        let arcs = x.arcs();
        let crossing = arcs.iter().any(|a| arcs.iter().any(|b| a.0 < b.0 && b.0 < a.1 && a.1 < b.1));
        prop_assert_eq!(x.is_k_noncrossing(2), !crossing);
    }
}
