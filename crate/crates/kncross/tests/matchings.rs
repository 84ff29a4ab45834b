use kncross::diagram::{enumerate_count, Query};
use kncross::matchings::*;
use kncross::rational;
use num_bigint::BigInt;

#[test]
fn walk_small_values() {
    assert_eq!(count_matchings_walk(2, 3).unwrap().counts[3], BigInt::from(5));
    assert_eq!(count_matchings_walk(3, 0).unwrap().counts, vec![BigInt::from(1)]);
    assert_eq!(count_matchings_walk(3, 3).unwrap().counts[3], BigInt::from(14));
    assert!(count_matchings_walk(1, 3).is_err());
}

#[test]
fn f3_closed_values() {
    let v: Vec<BigInt> = (2..=4).map(f3_closed).collect();
    assert_eq!(v, [3, 14, 84].map(BigInt::from));
}

#[test]
fn walk_matches_closed_forms_to_200() {
    let c2 = count_matchings_walk(2, 200).unwrap();
    let c3 = count_matchings_walk(3, 200).unwrap();
    for n in 0..=200 {
        assert_eq!(c2.counts[n], catalan(n), "k=2 n={n}");
        assert_eq!(c3.counts[n], f3_closed(n), "k=3 n={n}");
    }
}

#[test]
fn walk_matches_brute_force() {
    for k in 2..=4 {
        let t = count_matchings_walk(k, 8).unwrap();
        for n in 0..=8 {
            let b = enumerate_count(2 * n, &Query::matching(k)).unwrap();
            assert_eq!(t.counts[n], BigInt::from(b), "k={k} n={n}");
        }
    }
}

#[test]
fn table_invariants() {
    for k in 2..=6 {
        let t = count_matchings_walk(k, 20).unwrap();
        let mut dfact = BigInt::from(1);
        for n in 0..=20 {
            if n > 0 {
                dfact *= 2 * n - 1;
                assert!(t.counts[n] >= t.counts[n - 1]);
            }
            assert!(t.counts[n] <= dfact);
        }
        assert_eq!(t.counts[1], BigInt::from(1));
    }
}

#[test]
fn ode_rows_match_walk() {
    for k in 2..=9 {
        assert_eq!(ode_row_mismatch(k, 60).unwrap(), None, "k={k}");
    }
}

#[test]
fn both_methods_agree() {
    for k in [2, 3, 4, 5] {
        let a = build_fk_series(k, 60, FkMethod::Walk).unwrap();
        let b = build_fk_series(k, 60, FkMethod::Ode).unwrap();
        assert_eq!(a, b, "k={k}");
    }
    let f3 = build_fk_series(3, 5, FkMethod::Walk).unwrap();
    assert_eq!(f3.to_bigints().unwrap(), [1, 1, 3, 14, 84, 594].map(BigInt::from));
}

#[test]
fn rho_values() {
    assert_eq!(rho_k(2).unwrap(), rational::frac(1, 2));
    assert_eq!(rho_k(3).unwrap(), rational::frac(1, 4));
    let r5 = rho_k(5).unwrap();
    assert_eq!(&r5 * &r5, rational::frac(1, 64));
}

#[test]
fn growth_ratio_k3() {
    let t = count_matchings_walk(3, 60).unwrap();
    let r = rational::to_f64(&kncross::Rational::new(t.counts[60].clone(), t.counts[59].clone()));
    // the raw ratio carries the (1 - 1/n)^5 polynomial factor
    let corrected = r * (60.0f64 / 59.0).powi(5);
    assert!((corrected / 16.0 - 1.0).abs() < 0.05, "{corrected}");
    assert!(r < 16.0);
}

#[test]
fn csv_round_trip() {
    let t = count_matchings_walk(4, 12).unwrap();
    assert_eq!(MatchingCountTable::from_csv(&t.to_csv()).unwrap(), t);
}

#[test]
fn cache_reuses_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cache = kncross::cache::Cache::new(dir.path()).unwrap();
    let a = count_matchings_cached(3, 30, FkMethod::Walk, Some(&cache)).unwrap();
    let b = count_matchings_cached(3, 30, FkMethod::Walk, Some(&cache)).unwrap();
    assert_eq!(a, b);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
