use kncross::diagram::{enumerate_count, Query};
use kncross::marked::MarkedSeries;
use kncross::rational;
use kncross::shapes::*;
use num_bigint::BigInt;

#[test]
fn bivariate_small_coefficients() {
    let i = gf_ik_bivariate(3, 8).unwrap();
    assert_eq!(i.get(0, &[0]), rational::int(1));
    assert_eq!(i.get(1, &[1]), rational::int(1));
    assert_eq!(i.get(1, &[0]), rational::int(0));
    let marg = i.eval_markers_one();
    for s in 0..=6 {
        let b = enumerate_count(2 * s, &Query::shape(3)).unwrap();
        assert_eq!(*marg.coeff(s), rational::int(b as i64), "s={s}");
    }
}

#[test]
fn w_small_coefficients_and_boundary() {
    let w = gf_wk(3, 20).unwrap();
    assert_eq!(w.get(2, &[0, 1]), rational::int(1));
    for (s, m, c) in w.entries() {
        assert!(m[0] as usize + 2 * m[1] as usize <= s || c == rational::int(0));
    }
    assert!(gf_wk(2, 5).is_err());
    assert!(gf_ik5(2, 5).is_err());
}

#[test]
fn marginal_collapses_to_order_30() {
    for k in [3, 4] {
        let i5 = gf_ik5(k, 30).unwrap();
        let w = gf_wk(k, 30).unwrap();
        let i2 = gf_ik_bivariate(k, 30).unwrap();
        assert!(same_coefficients(&ik5_collapse(&i5).unwrap(), &w, 30), "k={k}");
        let w1 = w.eval_marker("w", &rational::int(1)).unwrap();
        assert!(same_coefficients(&w1, &i2, 30), "k={k}");
    }
}

#[test]
fn i5_boundary_cone() {
    let i5 = gf_ik5(3, 20).unwrap();
    let t = ShapeTable::from_series(3, &i5).unwrap();
    assert!(t.within_boundary());
}

#[test]
fn triple_agreement() {
    for (k, s_max) in [(3, 7), (4, 6)] {
        let closed = ShapeTable::from_series(k, &gf_ik5(k, s_max).unwrap()).unwrap();
        let rec = recursion_table_u4(k, s_max).unwrap();
        let oracle = oracle_table(k, s_max).unwrap();
        assert_eq!(closed.entries, rec.entries, "closed vs recursion k={k}");
        assert_eq!(closed.entries, oracle.entries, "closed vs oracle k={k}");
        let w = ShapeTable::from_series(k, &gf_wk(k, s_max).unwrap()).unwrap();
        assert_eq!(w.entries, recursion_table_u2(k, s_max).unwrap().entries);
        assert_eq!(w.entries, oracle.marginal(2).entries);
    }
}

#[test]
fn pde_identities() {
    let r = verify_pde_identities(3, 20).unwrap();
    for (name, ok) in &r.results {
        assert!(ok, "{name}");
    }
    let r4 = verify_pde_identities(4, 15).unwrap();
    assert!(r4.all_pass(), "{r4:?}");
}

#[test]
fn perturbed_series_fail_pdes() {
    let w = gf_wk(3, 12).unwrap();
    let bump = MarkedSeries::from_terms(&["y", "w"], 12, &[(5, &[1, 1], 1)]).unwrap();
    assert!(pde_w_holds(&w).unwrap());
    assert!(!pde_w_holds(&w.add(&bump).unwrap()).unwrap());
    let i5 = gf_ik5(3, 12).unwrap();
    let bump = MarkedSeries::from_terms(&["y", "z", "w", "t"], 12, &[(6, &[0, 0, 1, 1], 1)]).unwrap();
    let bad = i5.add(&bump).unwrap();
    assert!(!pde_i5_u4_holds(&bad).unwrap());
    assert!(!pde_i5_u3_holds(&bad).unwrap());
}

#[test]
fn recursion_spot_values() {
    let t = recursion_table_u2(3, 6).unwrap();
    assert_eq!(t.get([2, 0, 1, 0, 0]), BigInt::from(1));
    let w = gf_wk(3, 6).unwrap();
    assert_eq!(rational::int(t.get([2, 2, 0, 0, 0]).try_into().unwrap()), w.get(2, &[2, 0]));
}

#[test]
fn table_csv_and_marginals() {
    let t = recursion_table_u4(3, 5).unwrap();
    let csv = t.to_csv();
    assert!(csv.starts_with("k,s,u1,u2,u3,u4,count\n"));
    assert_eq!(csv.lines().count(), t.entries.len() + 1);
    let m1 = t.marginal(1);
    let bi = ShapeTable::from_series(3, &gf_ik_bivariate(3, 5).unwrap()).unwrap();
    assert_eq!(m1.entries, bi.entries);
}
