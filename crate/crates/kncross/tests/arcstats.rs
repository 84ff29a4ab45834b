use kncross::arcstats::*;
use kncross::asymptotics::clt_params;
use kncross::diagram::{histogram, Query};
use kncross::structures::{gf_arc_bivariate, gf_canonical_skeleton_fast};
use num_bigint::BigInt;

#[test]
fn small_n_point_mass_and_empty() {
    let d = arc_distribution(12).unwrap();
    assert_eq!(d.counts.len(), 1);
    assert_eq!(d.counts[&6], BigInt::from(1));
    let m = exact_moments(&d).unwrap();
    assert_eq!(m.mean_f64(), 6.0);
    assert_eq!(m.variance_f64(), 0.0);
    assert!(matches!(normal_overlay_compare(&d, 0.38, 0.07), Err(kncross::Error::Degenerate)));

    let e = arc_distribution(11).unwrap();
    assert!(e.is_empty());
    assert!(matches!(exact_moments(&e), Err(kncross::Error::EmptyDistribution)));
}

#[test]
fn histograms_match_oracle() {
    let a = gf_arc_bivariate(16).unwrap();
    for n in 0..=16 {
        let d = ArcDistribution::from_bivariate(&a, n).unwrap();
        let oracle = histogram(n, &Query::canonical_skeleton(), 16, |x| x.arc_count()).unwrap();
        let want: std::collections::BTreeMap<usize, BigInt> =
            oracle.into_iter().map(|(h, c)| (h, BigInt::from(c))).collect();
        assert_eq!(d.counts, want, "n={n}");
    }
}

#[test]
fn totals_and_support() {
    let a = gf_arc_bivariate(120).unwrap();
    let s = gf_canonical_skeleton_fast(120).unwrap().counts().unwrap();
    for n in 0..=120 {
        let d = ArcDistribution::from_bivariate(&a, n).unwrap();
        assert_eq!(d.total, s[n]);
        for h in d.counts.keys() {
            assert!(*h >= 6 && 2 * h <= n);
        }
    }
    assert!(ArcDistribution::from_bivariate(&a, 121).is_err());
}

#[test]
fn normal_limit_at_350() {
    let p = clt_params().unwrap();
    let ds = arc_distributions(&[200, 275, 350]).unwrap();
    let sup: Vec<f64> = ds.iter().map(|d| normal_overlay_compare(d, p.mu, p.sigma2).unwrap().sup_distance).collect();
    assert!(sup[2] < sup[0]);
    assert!(sup[2] < SUP_DISTANCE_MAX);
    let d = &ds[2];
    let (m, v) = normalized_moments(d).unwrap();
    assert!((m / 350.0 - p.mu).abs() / p.mu <= MEAN_REL_TOL);
    assert!((v / 350.0 - p.sigma2).abs() / p.sigma2 <= VARIANCE_REL_TOL);
    for d in &ds {
        assert!(standardized_third_abs_moment(d).unwrap() < THIRD_MOMENT_MAX);
    }
}

#[test]
fn overlay_csv_shape() {
    let d = arc_distribution(60).unwrap();
    let o = normal_overlay_compare(&d, 0.385, 0.0686).unwrap();
    let csv = o.to_csv();
    assert!(csv.starts_with("x,empirical_density,normal_density\n"));
    assert_eq!(csv.lines().count(), o.rows.len() + 1);
    let dcsv = d.to_csv();
    assert_eq!(dcsv.lines().count(), d.counts.len() + 1);
    let psum: f64 = d.counts.keys().map(|h| d.probability(*h)).sum();
    assert!((psum - 1.0).abs() < 1e-12);
}
