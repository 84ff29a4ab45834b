//! Structure-level generating functions: secondary structures, modular
//! diagrams, irreducible and skeleton matchings, skeleton shapes, canonical
//! skeleton diagrams and the arc-marking bivariate series.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::intpoly::{self, from_i64s};
use crate::marked::{mono, MPoly, MarkedSeries};
use crate::matchings::fk_coeffs;
use crate::rational::{self, Rational};
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Matchings,
    Secondary,
    Modular,
    Irreducible,
    SkeletonMatching,
    SkeletonShape,
    CanonicalSkeleton,
    ArcBivariate,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Matchings,
        Family::Secondary,
        Family::Modular,
        Family::Irreducible,
        Family::SkeletonMatching,
        Family::SkeletonShape,
        Family::CanonicalSkeleton,
        Family::ArcBivariate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Matchings => "matchings",
            Family::Secondary => "secondary",
            Family::Modular => "modular",
            Family::Irreducible => "irreducible",
            Family::SkeletonMatching => "skeleton-matching",
            Family::SkeletonShape => "skeleton-shape",
            Family::CanonicalSkeleton => "canonical-skeleton",
            Family::ArcBivariate => "arc-bivariate",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Params {
    pub k: Option<usize>,
    pub lambda: Option<usize>,
    pub tau: Option<usize>,
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(l) = self.lambda {
            parts.push(format!("lambda={l}"));
        }
        if let Some(t) = self.tau {
            parts.push(format!("tau={t}"));
        }
        f.write_str(&parts.join(";"))
    }
}

/// A counting series tagged with its family and parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSeries {
    pub family: Family,
    pub params: Params,
    pub series: TruncatedSeries,
}

impl ModelSeries {
    pub fn new(family: Family, params: Params, series: TruncatedSeries) -> Self {
        Self { family, params, series }
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Coefficients as integers; fails on a fractional or negative entry.
    pub fn counts(&self) -> Result<Vec<BigInt>> {
        self.series
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| match rational::to_bigint(c) {
                Some(v) if !v.is_negative() => Ok(v),
                _ => Err(Error::Inconsistent(format!("{} coefficient {n} is {c}, not a count", self.family))),
            })
            .collect()
    }

    /// `family,params,n,coefficient` rows; integers print without a denominator.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("family,params,n,coefficient\n");
        for (n, c) in self.series.coeffs().iter().enumerate() {
            let v = if c.is_integer() { c.numer().to_string() } else { rational::format(c) };
            s.push_str(&format!("{},{},{n},{v}\n", self.family, self.params));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "family": self.family.name(),
            "params": self.params.to_string(),
            "series": serde_json::from_str::<serde_json::Value>(&self.series.to_json()).expect("series JSON"),
        })
        .to_string()
    }
}

fn ints(v: &[BigInt], order: usize) -> TruncatedSeries {
    TruncatedSeries::from_bigints(v, order)
}

/// num/den as a power series; den(0) = ±1.
fn ratfn(num: &[i64], den: &[i64], len: usize) -> Result<Vec<BigInt>> {
    intpoly::div_poly(&from_i64s(num), &from_i64s(den), len)
}

/// outer(num/den) truncated to `len` coefficients.
fn compose(outer: &[BigInt], num: &[i64], den: &[i64], len: usize) -> Result<Vec<BigInt>> {
    intpoly::compose_rational(outer, &from_i64s(num), &from_i64s(den), len)
}

fn outer_len(order: usize, valuation: usize) -> usize {
    order / valuation
}

// ---------------------------------------------------------------- secondary

/// T(n) = T(n-1) + Σ_{i=0}^{n-λ-1} T(i) T(n-i-2), T(n) = 1 for n ≤ λ.
pub fn secondary_counts(lambda: usize, n_max: usize) -> Result<Vec<BigInt>> {
    if lambda < 1 {
        return Err(Error::InvalidParameter("lambda must be at least 1".into()));
    }
    let mut t: Vec<BigInt> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n <= lambda {
            t.push(BigInt::one());
            continue;
        }
        let mut v = t[n - 1].clone();
        for i in 0..=n - lambda - 1 {
            v += &t[i] * &t[n - i - 2];
        }
        t.push(v);
    }
    Ok(t)
}

pub fn gf_secondary(lambda: usize, n_max: usize) -> Result<ModelSeries> {
    let c = secondary_counts(lambda, n_max)?;
    Ok(ModelSeries::new(Family::Secondary, Params { lambda: Some(lambda), ..Default::default() }, ints(&c, n_max)))
}

// ---------------------------------------------------------------- modular

const Q2_DEN: [i64; 7] = [1, -1, -1, 1, 2, 0, 1];
const Q2_INNER_NUM: [i64; 9] = [0, 0, 0, 0, 1, 0, -1, 0, 1];
const QK_Q: [i64; 13] = [1, -1, -1, 1, 2, 0, 1, 0, -1, 0, 1, 0, -1];
const QK_INNER_NUM: [i64; 13] = [0, 0, 0, 0, 1, 0, -1, 0, -1, 0, 2, 0, -1];
const PREFACTOR_NUM: [i64; 5] = [1, 0, -1, 0, 1];

/// q(z) of the modular formula, ascending coefficients.
pub fn q_poly() -> &'static [i64] {
    &QK_Q
}

fn square(p: &[i64]) -> Vec<i64> {
    let mut out = vec![0; 2 * p.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in p.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn modular_assemble(k: usize, order: usize, den: &[i64], inner_num: &[i64]) -> Result<TruncatedSeries> {
    let len = order + 1;
    let f = fk_coeffs(k, outer_len(order, 4))?;
    let inner = compose(&f, inner_num, &square(den), len)?;
    let pre = ratfn(&PREFACTOR_NUM, den, len)?;
    Ok(ints(&intpoly::mul_trunc(&pre, &inner, len), order))
}

/// (1-z²+z⁴)/(1-z-z²+z³+2z⁴+z⁶) · F_2((z⁴-z⁶+z⁸)/(1-z-z²+z³+2z⁴+z⁶)²)
pub fn gf_q2(order: usize) -> Result<ModelSeries> {
    let s = modular_assemble(2, order, &Q2_DEN, &Q2_INNER_NUM)?;
    Ok(ModelSeries::new(Family::Modular, Params { k: Some(2), ..Default::default() }, s))
}

/// (1-z²+z⁴)/q(z) · F_k(ϑ(z)) without the k > 2 guard.
pub fn qk_formula(k: usize, order: usize) -> Result<TruncatedSeries> {
    modular_assemble(k, order, &QK_Q, &QK_INNER_NUM)
}

/// Modular k-noncrossing diagrams, k > 2.
pub fn gf_qk(k: usize, order: usize) -> Result<ModelSeries> {
    if k <= 2 {
        return Err(Error::InvalidParameter(format!("the q(z) formula needs k > 2, got {k}; use gf_q2")));
    }
    Ok(ModelSeries::new(Family::Modular, Params { k: Some(k), ..Default::default() }, qk_formula(k, order)?))
}

/// Modular series for any k ≥ 2.
pub fn gf_modular(k: usize, order: usize) -> Result<ModelSeries> {
    if k == 2 {
        gf_q2(order)
    } else {
        gf_qk(k, order)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemarkK2 {
    pub n: usize,
    pub q2: BigInt,
    pub formula: BigInt,
}

/// First index where Q_2 and the k-formula evaluated at k = 2 differ.
pub fn check_remark_k2(order: usize) -> Result<RemarkK2> {
    let a = gf_q2(order)?.counts()?;
    let b = qk_formula(2, order)?;
    for n in 0..=order {
        let bn = rational::to_bigint(b.coeff(n)).ok_or_else(|| Error::Inconsistent("non-integral coefficient".into()))?;
        if a[n] != bn {
            return Ok(RemarkK2 { n, q2: a[n].clone(), formula: bn });
        }
    }
    Err(Error::Inconsistent(format!("Q_2 and the k-formula agree up to order {order}")))
}

// ---------------------------------------------------------------- irreducible

/// Irr(z) = 2 - 1/F_3(z)
pub fn gf_irreducible(order: usize) -> Result<ModelSeries> {
    let f3 = fk_coeffs(3, order)?;
    let mut r = intpoly::div_poly(&[BigInt::one()], &f3, order + 1)?;
    for c in r.iter_mut() {
        *c = -&*c;
    }
    r[0] += 2;
    Ok(ModelSeries::new(Family::Irreducible, Params { k: Some(3), ..Default::default() }, ints(&r, order)))
}

// ---------------------------------------------------------------- skeleton

/// S from S(zF_k²) = F_k through the compositional inverse of y = zF_k².
pub fn skeleton_series_inverse(k: usize, order: usize) -> Result<TruncatedSeries> {
    let f = ints(&fk_coeffs(k, order)?, order);
    let y = TruncatedSeries::monomial(Rational::one(), 1, order).mul(&f.mul(&f)?)?;
    let z = y.compositional_inverse()?;
    f.compose(&z)
}

/// The same series by triangular elimination in integers:
/// S(h) = f(h) - Σ_{j<h} S(j)[z^h]Y^j with Y = zF_k².
pub fn skeleton_series_power(k: usize, order: usize) -> Result<Vec<BigInt>> {
    let len = order + 1;
    let f = fk_coeffs(k, order)?;
    let f2 = intpoly::mul_trunc(&f, &f, len);
    let mut y = vec![BigInt::zero(); len];
    y[1..].clone_from_slice(&f2[..len - 1]);
    let mut s = Vec::with_capacity(len);
    let mut acc = vec![BigInt::zero(); len];
    let mut p = vec![BigInt::zero(); len];
    p[0] = BigInt::one();
    for h in 0..len {
        let sh = &f[h] - &acc[h];
        for n in h + 1..len {
            if !p[n].is_zero() {
                acc[n] += &sh * &p[n];
            }
        }
        s.push(sh);
        if h + 1 < len {
            // p <- p·Y, supported on [h+1, order]
            let mut next = vec![BigInt::zero(); len];
            for (n, slot) in next.iter_mut().enumerate().skip(h + 1) {
                let mut v = BigInt::zero();
                for i in h..n {
                    if !p[i].is_zero() {
                        v += &p[i] * &y[n - i];
                    }
                }
                *slot = v;
            }
            p = next;
        }
    }
    Ok(s)
}

const INVERSE_ROUTE_MAX: usize = 128;

/// S(h) for h ≤ order, with the convention S(0) = S(1) = 1.
pub fn gf_skeleton_matching(order: usize) -> Result<ModelSeries> {
    let s = if order <= INVERSE_ROUTE_MAX {
        skeleton_series_inverse(3, order)?
    } else {
        ints(&skeleton_series_power(3, order)?, order)
    };
    Ok(ModelSeries::new(Family::SkeletonMatching, Params { k: Some(3), ..Default::default() }, s))
}

/// S(zF_3²) - F_3, which vanishes identically.
pub fn skeleton_residual(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    let n = s.order();
    let f = ints(&fk_coeffs(3, n)?, n);
    let y = TruncatedSeries::monomial(Rational::one(), 1, n).mul(&f.mul(&f)?)?;
    s.compose(&y)?.sub(&f)
}

/// G(x) = S(x) - 1 - x
pub fn g_coeffs(s: &[BigInt]) -> Vec<BigInt> {
    let mut g = s.to_vec();
    for c in g.iter_mut().take(2) {
        *c = BigInt::zero();
    }
    g
}

fn skeleton_ints(order: usize) -> Result<Vec<BigInt>> {
    if order <= INVERSE_ROUTE_MAX {
        skeleton_series_inverse(3, order)?.to_bigints().ok_or_else(|| Error::Inconsistent("non-integral S".into()))
    } else {
        skeleton_series_power(3, order)
    }
}

/// IS(z) = Σ_{h≥2} S(h)(z/(1+z))^h
pub fn gf_skeleton_shape(order: usize) -> Result<ModelSeries> {
    let g = g_coeffs(&skeleton_ints(order)?);
    let r = compose(&g, &[0, 1], &[1, 1], order + 1)?;
    Ok(ModelSeries::new(Family::SkeletonShape, Params { k: Some(3), ..Default::default() }, ints(&r, order)))
}

const ROUTE1_DEN: [i64; 9] = [1, -2, 0, 2, -1, 0, 1, -2, 1];
const ROUTE2_DEN: [i64; 9] = [1, -2, 0, 2, -1, 0, 0, -2, 1];
const Z6: [i64; 7] = [0, 0, 0, 0, 0, 0, 1];

fn times_one_minus_z(v: &mut [BigInt]) {
    for n in (1..v.len()).rev() {
        let prev = v[n - 1].clone();
        v[n] -= prev;
    }
}

/// (1-z)·G(z⁶/((1-z²+z⁶)(1-z)²))
pub fn canonical_skeleton_route_g(order: usize) -> Result<Vec<BigInt>> {
    let g = g_coeffs(&skeleton_ints(outer_len(order, 6))?);
    let mut r = compose(&g, &Z6, &ROUTE1_DEN, order + 1)?;
    times_one_minus_z(&mut r);
    Ok(r)
}

/// (1-z)·IS(z⁶/(1-2z+2z³-z⁴-2z⁷+z⁸))
pub fn canonical_skeleton_route_is(order: usize) -> Result<Vec<BigInt>> {
    let is = gf_skeleton_shape(outer_len(order, 6))?.counts()?;
    let mut r = compose(&is, &Z6, &ROUTE2_DEN, order + 1)?;
    times_one_minus_z(&mut r);
    Ok(r)
}

/// S_3^[4](z), computed by both routes; they must agree exactly.
pub fn gf_canonical_skeleton(order: usize) -> Result<ModelSeries> {
    let a = canonical_skeleton_route_g(order)?;
    let b = canonical_skeleton_route_is(order)?;
    if let Some(n) = (0..=order).find(|&n| a[n] != b[n]) {
        return Err(Error::Inconsistent(format!("canonical skeleton routes disagree at n = {n}: {} vs {}", a[n], b[n])));
    }
    Ok(ModelSeries::new(Family::CanonicalSkeleton, Params { k: Some(3), ..Default::default() }, ints(&a, order)))
}

/// Only the G route, for large orders.
pub fn gf_canonical_skeleton_fast(order: usize) -> Result<ModelSeries> {
    let a = canonical_skeleton_route_g(order)?;
    Ok(ModelSeries::new(Family::CanonicalSkeleton, Params { k: Some(3), ..Default::default() }, ints(&a, order)))
}

// ---------------------------------------------------------------- bivariate

/// A(z,u) with dense integer u-polynomials: rows[n][h] = [z^n u^h].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcBivariate {
    pub order: usize,
    pub rows: Vec<Vec<BigInt>>,
}

fn add_shifted(dst: &mut Vec<BigInt>, src: &[BigInt], shift: usize, c: i64) {
    if dst.len() < src.len() + shift {
        dst.resize(src.len() + shift, BigInt::zero());
    }
    for (i, v) in src.iter().enumerate() {
        if !v.is_zero() {
            dst[i + shift] += v * c;
        }
    }
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

/// (1 - uz² + u³z⁶)(1 - z)² as (z power, u power, coefficient).
const BIV_DEN: [(usize, usize, i64); 9] =
    [(0, 0, 1), (1, 0, -2), (2, 0, 1), (2, 1, -1), (3, 1, 2), (4, 1, -1), (6, 3, 1), (7, 3, -2), (8, 3, 1)];

/// A(z,u) = (1-z)·G(u³z⁶/((1-uz²+u³z⁶)(1-z)²))
pub fn gf_arc_bivariate(order: usize) -> Result<ArcBivariate> {
    let g = g_coeffs(&skeleton_ints(outer_len(order, 6))?);
    let len = order + 1;
    let top = order / 6;
    let mut acc: Vec<Vec<BigInt>> = Vec::new();
    for h in (0..=top).rev() {
        let keep = len - 6 * h;
        let mut next: Vec<Vec<BigInt>> = vec![Vec::new(); keep];
        if !acc.is_empty() {
            // acc · u³z⁶, then divide by the denominator term by term
            for n in 6..keep {
                if n - 6 < acc.len() {
                    add_shifted(&mut next[n], &acc[n - 6], 3, 1);
                }
            }
            for n in 0..keep {
                let mut row = std::mem::take(&mut next[n]);
                for &(zp, up, c) in &BIV_DEN[1..] {
                    if zp <= n {
                        let prev = next[n - zp].clone();
                        add_shifted(&mut row, &prev, up, -c);
                    }
                }
                trim(&mut row);
                next[n] = row;
            }
        }
        if !g[h].is_zero() {
            if next[0].is_empty() {
                next[0].push(BigInt::zero());
            }
            next[0][0] += &g[h];
        }
        acc = next;
    }
    acc.resize(len, Vec::new());
    for n in (1..len).rev() {
        let prev = acc[n - 1].clone();
        add_shifted(&mut acc[n], &prev, 0, -1);
        trim(&mut acc[n]);
    }
    Ok(ArcBivariate { order, rows: acc })
}

impl ArcBivariate {
    pub fn coeff(&self, n: usize, h: usize) -> BigInt {
        self.rows.get(n).and_then(|r| r.get(h)).cloned().unwrap_or_default()
    }

    /// A(z,1)
    pub fn at_u_one(&self) -> Vec<BigInt> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn to_marked(&self) -> Result<MarkedSeries> {
        let coeffs = self
            .rows
            .iter()
            .map(|r| {
                let mut p = MPoly::zero();
                for (h, c) in r.iter().enumerate() {
                    p.add_term(mono(&[h as u16]), Rational::from_integer(c.clone()));
                }
                p
            })
            .collect();
        MarkedSeries::new(&["u"], coeffs, self.order)
    }

    /// `n,h,count` rows with nonzero counts.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,h,count\n");
        for (n, r) in self.rows.iter().enumerate() {
            for (h, c) in r.iter().enumerate() {
                if !c.is_zero() {
                    s.push_str(&format!("{n},{h},{c}\n"));
                }
            }
        }
        s
    }
}

/// Counting series for a family by name, as used by the CLI.
pub fn build_family(family: Family, params: Params, order: usize) -> Result<ModelSeries> {
    let k = params.k;
    match family {
        Family::Matchings => {
            let k = k.unwrap_or(3);
            let c = fk_coeffs(k, order)?;
            Ok(ModelSeries::new(family, Params { k: Some(k), ..Default::default() }, ints(&c, order)))
        }
        Family::Secondary => gf_secondary(params.lambda.unwrap_or(1), order),
        Family::Modular => gf_modular(k.unwrap_or(3), order),
        Family::Irreducible => gf_irreducible(order),
        Family::SkeletonMatching => gf_skeleton_matching(order),
        Family::SkeletonShape => gf_skeleton_shape(order),
        Family::CanonicalSkeleton => {
            if order <= 200 {
                gf_canonical_skeleton(order)
            } else {
                gf_canonical_skeleton_fast(order)
            }
        }
        Family::ArcBivariate => {
            let a = gf_arc_bivariate(order)?;
            Ok(ModelSeries::new(Family::ArcBivariate, Params { k: Some(3), ..Default::default() }, ints(&a.at_u_one(), order)))
        }
    }
}
