//! Shape generating functions and the colored-shape recursion system.
//!
//! Markers: in I_k(z,u), u marks 1-arcs. In W_k(x,y,w), y marks 1-arcs and
//! w marks pairs of mutually crossing 2-arcs (class C2). In the 5-variate
//! I_k(x,y,z,w,t) the markers y,z,w,t count classes C1,C2,C3,C4.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::diagram::{histogram, Query};
use crate::error::{Error, Result};
use crate::marked::MarkedSeries;
use crate::matchings::fk_coeffs;
use crate::rational::{self, Rational};
use crate::series::TruncatedSeries;

pub const BIVARIATE_MARKERS: [&str; 1] = ["u"];
pub const W_MARKERS: [&str; 2] = ["y", "w"];
pub const I5_MARKERS: [&str; 4] = ["y", "z", "w", "t"];

fn fk(k: usize, order: usize) -> Result<TruncatedSeries> {
    Ok(TruncatedSeries::from_bigints(&fk_coeffs(k, order)?, order))
}

fn require_k_above_2(k: usize) -> Result<()> {
    if k <= 2 {
        return Err(Error::InvalidParameter(format!("the colored-shape formula needs k > 2, got {k}")));
    }
    Ok(())
}

/// (1+z)/(1+2z-zu) · F_k(z(1+z)/(1+2z-zu)²)
pub fn gf_ik_bivariate(k: usize, order: usize) -> Result<MarkedSeries> {
    let m = &BIVARIATE_MARKERS;
    let d = MarkedSeries::from_terms(m, order, &[(0, &[0], 1), (1, &[0], 2), (1, &[1], -1)])?;
    let one_plus = MarkedSeries::from_terms(m, order, &[(0, &[0], 1), (1, &[0], 1)])?;
    let num = MarkedSeries::from_terms(m, order, &[(1, &[0], 1), (2, &[0], 1)])?;
    let inner = MarkedSeries::compose_ratfn(&fk(k, order)?, &num, &d.mul(&d)?)?;
    one_plus.mul(&inner)?.div(&d)
}

/// (1+x)v · F_k(x(1+x)v²), v = 1/((1-w)x³ + (1-w)x² + (2-y)x + 1)
pub fn gf_wk(k: usize, order: usize) -> Result<MarkedSeries> {
    require_k_above_2(k)?;
    let m = &W_MARKERS;
    let d = MarkedSeries::from_terms(
        m,
        order,
        &[
            (0, &[0, 0], 1),
            (1, &[0, 0], 2),
            (1, &[1, 0], -1),
            (2, &[0, 0], 1),
            (2, &[0, 1], -1),
            (3, &[0, 0], 1),
            (3, &[0, 1], -1),
        ],
    )?;
    let one_plus = MarkedSeries::from_terms(m, order, &[(0, &[0, 0], 1), (1, &[0, 0], 1)])?;
    let num = MarkedSeries::from_terms(m, order, &[(1, &[0, 0], 1), (2, &[0, 0], 1)])?;
    let inner = MarkedSeries::compose_ratfn(&fk(k, order)?, &num, &d.mul(&d)?)?;
    one_plus.mul(&inner)?.div(&d)
}

/// (1+x)/θ · F_k(x(1+(2w-1)x+(t-1)x²)/θ²),
/// θ = 1 - (y-2)x + (2w-z-1)x² + (2w-z-1)x³
pub fn gf_ik5(k: usize, order: usize) -> Result<MarkedSeries> {
    require_k_above_2(k)?;
    let m = &I5_MARKERS;
    let mut theta: Vec<(usize, &[u16], i64)> = vec![(0, &[0, 0, 0, 0], 1), (1, &[0, 0, 0, 0], 2), (1, &[1, 0, 0, 0], -1)];
    for p in [2, 3] {
        theta.extend_from_slice(&[(p, &[0, 0, 1, 0], 2), (p, &[0, 1, 0, 0], -1), (p, &[0, 0, 0, 0], -1)]);
    }
    let theta = MarkedSeries::from_terms(m, order, &theta)?;
    let one_plus = MarkedSeries::from_terms(m, order, &[(0, &[0; 4], 1), (1, &[0; 4], 1)])?;
    let num = MarkedSeries::from_terms(
        m,
        order,
        &[
            (1, &[0, 0, 0, 0], 1),
            (2, &[0, 0, 1, 0], 2),
            (2, &[0, 0, 0, 0], -1),
            (3, &[0, 0, 0, 1], 1),
            (3, &[0, 0, 0, 0], -1),
        ],
    )?;
    let inner = MarkedSeries::compose_ratfn(&fk(k, order)?, &num, &theta.mul(&theta)?)?;
    one_plus.mul(&inner)?.div(&theta)
}

/// Counts keyed by (s, u1, u2, u3, u4); unused marker slots are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeTable {
    pub k: usize,
    /// Number of leading marker slots in use (1, 2 or 4).
    pub markers: usize,
    pub entries: BTreeMap<[u16; 5], BigInt>,
}

impl ShapeTable {
    fn new(k: usize, markers: usize) -> Self {
        Self { k, markers, entries: BTreeMap::new() }
    }

    pub fn get(&self, key: [u16; 5]) -> BigInt {
        self.entries.get(&key).cloned().unwrap_or_default()
    }

    fn get_signed(&self, s: i64, u: [i64; 4]) -> BigInt {
        if s < 0 || u.iter().any(|&x| x < 0) {
            return BigInt::zero();
        }
        self.get([s as u16, u[0] as u16, u[1] as u16, u[2] as u16, u[3] as u16])
    }

    fn insert(&mut self, key: [u16; 5], v: BigInt) {
        if !v.is_zero() {
            self.entries.insert(key, v);
        }
    }

    pub fn s_max(&self) -> usize {
        self.entries.keys().map(|k| k[0] as usize).max().unwrap_or(0)
    }

    /// Coefficients of a shape series with nonnegative integer entries.
    pub fn from_series(k: usize, s: &MarkedSeries) -> Result<Self> {
        let markers = s.markers().len();
        let mut t = Self::new(k, markers);
        for (n, m, c) in s.entries() {
            let v = rational::to_bigint(&c).ok_or_else(|| Error::Inconsistent(format!("non-integral coefficient at s = {n}")))?;
            let mut key = [0u16; 5];
            key[0] = n as u16;
            key[1..=markers].copy_from_slice(&m[..markers]);
            t.insert(key, v);
        }
        Ok(t)
    }

    /// Sums out marker slots beyond the first `markers`.
    pub fn marginal(&self, markers: usize) -> Self {
        let mut t = Self::new(self.k, markers);
        for (key, v) in &self.entries {
            let mut k2 = *key;
            for slot in k2.iter_mut().skip(markers + 1) {
                *slot = 0;
            }
            *t.entries.entry(k2).or_default() += v;
        }
        t.entries.retain(|_, v| !v.is_zero());
        t
    }

    pub fn truncate(&self, s_max: usize) -> Self {
        let mut t = self.clone();
        t.entries.retain(|k, _| k[0] as usize <= s_max);
        t
    }

    /// Whether every nonzero entry satisfies u1 + 2u2 + 2u3 + 3u4 ≤ s.
    pub fn within_boundary(&self) -> bool {
        self.entries.keys().all(|k| {
            let w = k[1] as usize + 2 * k[2] as usize + 2 * k[3] as usize + 3 * k[4] as usize;
            w <= k[0] as usize
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,s,u1,u2,u3,u4,count\n");
        for (key, v) in &self.entries {
            out.push_str(&format!("{},{},{},{},{},{},{v}\n", self.k, key[0], key[1], key[2], key[3], key[4]));
        }
        out
    }
}

/// One recursion term: coefficient (c0 + cs·s + Σ cu_i·u_i) times
/// i_k(s + ds, u + du).
#[derive(Clone, Copy, Debug)]
pub struct RecTerm {
    pub c0: i64,
    pub cs: i64,
    pub cu: [i64; 4],
    pub ds: i64,
    pub du: [i64; 4],
}

const fn term(c0: i64, cs: i64, cu: [i64; 4], ds: i64, du: [i64; 4]) -> RecTerm {
    RecTerm { c0, cs, cu, ds, du }
}

/// (u2+1) i(s+1,u1,u2+1) = right-hand side.
pub const U2_RECURSION: [RecTerm; 2] = [
    term(1, 0, [1, 0, 0, 0], 0, [1, 0, 0, 0]),
    term(1, 0, [1, 0, 0, 0], -1, [1, 0, 0, 0]),
];

/// (u3+1) i(s+1,u1,u2,u3+1,u4) = right-hand side, one entry per printed term.
pub const U3_RECURSION: [RecTerm; 18] = [
    term(0, 0, [2, 0, 0, 0], -1, [0, 0, 0, 0]),
    term(4, 0, [0, 4, 0, 0], -1, [0, 1, 0, 0]),
    term(4, 0, [0, 4, 0, 0], -1, [0, 1, -1, 0]),
    term(4, 0, [0, 4, 0, 0], -2, [0, 1, -1, 0]),
    term(2, 0, [0, 0, 2, 0], 0, [0, 0, 1, 0]),
    term(0, 0, [0, 0, 2, 0], -1, [0, 0, 0, 0]),
    term(6, 0, [0, 0, 6, 0], -1, [0, 0, 1, 0]),
    term(2, 0, [0, 0, 2, 0], -2, [0, 0, 1, 0]),
    term(0, 0, [0, 0, 2, 0], -2, [0, 0, 0, 0]),
    term(4, 0, [0, 0, 0, 4], 0, [0, 0, -1, 1]),
    term(4, 0, [0, 0, 0, 4], -1, [0, 0, -1, 1]),
    term(0, 0, [0, 0, 0, 4], -1, [0, 0, 0, 0]),
    term(4, 0, [0, 0, 0, 4], -1, [0, 0, 0, 1]),
    term(0, 0, [0, 0, 0, 4], -2, [0, 0, 0, 0]),
    term(2, 0, [0, 0, 0, 2], -2, [0, 0, 0, 1]),
    term(0, 2, [-2, -4, -4, -6], 0, [0, 0, 0, 0]),
    term(-4, 4, [-4, -8, -8, -12], -1, [0, 0, 0, 0]),
    term(-4, 2, [0, -4, -4, -6], -2, [0, 0, 0, 0]),
];

/// 2(u4+1) i(s+1,u1,u2,u3,u4+1) = right-hand side.
pub const U4_RECURSION: [RecTerm; 2] = [
    term(1, 0, [0, 0, 1, 0], 0, [0, 0, 1, 0]),
    term(2, 0, [0, 2, 0, 0], 0, [0, 1, 0, 0]),
];

fn eval_rhs(t: &ShapeTable, terms: &[RecTerm], s: i64, u: [i64; 4]) -> BigInt {
    let mut acc = BigInt::zero();
    for tm in terms {
        let c = tm.c0 + tm.cs * s + (0..4).map(|i| tm.cu[i] * u[i]).sum::<i64>();
        if c == 0 {
            continue;
        }
        let mut uu = u;
        for i in 0..4 {
            uu[i] += tm.du[i];
        }
        let v = t.get_signed(s + tm.ds, uu);
        if !v.is_zero() {
            acc += v * c;
        }
    }
    acc
}

fn exact_div(v: BigInt, d: i64, what: &str) -> Result<BigInt> {
    let (q, r) = v.div_rem(&BigInt::from(d));
    if !r.is_zero() {
        return Err(Error::Inconsistent(format!("{what}: {v} not divisible by {d}")));
    }
    Ok(q)
}

fn fill_remainder(t: &mut ShapeTable, s: u16, coarse: &BTreeMap<[u16; 5], BigInt>, slots: usize) -> Result<()> {
    // the all-zero finer entry is whatever the coarse marginal leaves over
    for (key, total) in coarse.iter().filter(|(k, _)| k[0] == s) {
        let mut rest = total.clone();
        for (k2, v) in t.entries.range(*key..) {
            if k2[0] != s || k2[..=slots] != key[..=slots] {
                break;
            }
            rest -= v;
        }
        if rest.is_negative() {
            return Err(Error::Inconsistent(format!("recursion exceeds marginal at {key:?}")));
        }
        t.insert(*key, rest);
    }
    Ok(())
}

/// i_k(s,u1,u2) for s ≤ s_max from the marginal i_k(s,u1) and the u2
/// recursion, by induction on s.
pub fn recursion_table_u2(k: usize, s_max: usize) -> Result<ShapeTable> {
    let marginal = ShapeTable::from_series(k, &gf_ik_bivariate(k, s_max)?)?;
    let mut t = ShapeTable::new(k, 2);
    for s in 0..=s_max as u16 {
        if s > 0 {
            for u1 in 0..=s {
                for u2 in 1..=(s - u1) / 2 {
                    let rhs = eval_rhs(&t, &U2_RECURSION, s as i64 - 1, [u1 as i64, u2 as i64 - 1, 0, 0]);
                    t.insert([s, u1, u2, 0, 0], exact_div(rhs, u2 as i64, "u2 recursion")?);
                }
            }
        }
        fill_remainder(&mut t, s, &marginal.entries, 1)?;
    }
    Ok(t)
}

/// i_k(s,u1,u2,u3,u4) for s ≤ s_max from the (s,u1,u2) table and the u3 and
/// u4 recursions. Entries reachable by both recursions must agree.
pub fn recursion_table_u4(k: usize, s_max: usize) -> Result<ShapeTable> {
    let coarse = recursion_table_u2(k, s_max)?;
    let mut t = ShapeTable::new(k, 4);
    for s in 0..=s_max as u16 {
        let prev = s as i64 - 1;
        for u1 in 0..=s {
            for u2 in 0..=(s - u1) / 2 {
                for u3 in 0..=(s - u1 - 2 * u2) / 2 {
                    for u4 in 0..=(s - u1 - 2 * u2 - 2 * u3) / 3 {
                        if u3 + u4 == 0 || s == 0 {
                            continue;
                        }
                        let (a, b, c, d) = (u1 as i64, u2 as i64, u3 as i64, u4 as i64);
                        let from3 = (u3 > 0)
                            .then(|| exact_div(eval_rhs(&t, &U3_RECURSION, prev, [a, b, c - 1, d]), c, "u3 recursion"))
                            .transpose()?;
                        let from4 = (u4 > 0)
                            .then(|| exact_div(eval_rhs(&t, &U4_RECURSION, prev, [a, b, c, d - 1]), 2 * d, "u4 recursion"))
                            .transpose()?;
                        let v = match (from3, from4) {
                            (Some(x), Some(y)) if x != y => {
                                return Err(Error::Inconsistent(format!(
                                    "u3 and u4 recursions disagree at {:?}: {x} vs {y}",
                                    [s, u1, u2, u3, u4]
                                )))
                            }
                            (Some(x), _) | (None, Some(x)) => x,
                            (None, None) => unreachable!(),
                        };
                        t.insert([s, u1, u2, u3, u4], v);
                    }
                }
            }
        }
        fill_remainder(&mut t, s, &coarse.entries, 2)?;
    }
    Ok(t)
}

/// Brute-force tallies of all V_k-shapes with at most s_max arcs.
pub fn oracle_table(k: usize, s_max: usize) -> Result<ShapeTable> {
    let mut t = ShapeTable::new(k, 4);
    for s in 0..=s_max {
        let h = histogram(2 * s, &Query::shape(k), usize::MAX, |d| d.classify_arcs().expect("enumerated shapes"))?;
        for (tally, c) in h {
            t.insert([s as u16, tally.u1 as u16, tally.u2 as u16, tally.u3 as u16, tally.u4 as u16], BigInt::from(c));
        }
    }
    Ok(t)
}

fn poly(markers: &[&str], order: usize, terms: &[(usize, &[u16], i64)]) -> Result<MarkedSeries> {
    MarkedSeries::from_terms(markers, order, terms)
}

/// ∂W/∂w = (x + x²) ∂W/∂y as a coefficient identity.
pub fn pde_w_holds(w: &MarkedSeries) -> Result<bool> {
    let m = w.markers();
    let n = w.order();
    let lhs = w.partial_marker(&m[1])?;
    let rhs = poly(&m, n, &[(1, &[0, 0], 1), (2, &[0, 0], 1)])?.mul(&w.partial_marker(&m[0])?)?;
    Ok(lhs == rhs)
}

/// 2∂I/∂t = x∂I/∂w + 2x∂I/∂z
pub fn pde_i5_u4_holds(i5: &MarkedSeries) -> Result<bool> {
    let m = i5.markers();
    let n = i5.order();
    let x = poly(&m, n, &[(1, &[0; 4], 1)])?;
    let lhs = i5.partial_marker(&m[3])?.scale(&rational::int(2));
    let rhs = x.mul(&i5.partial_marker(&m[2])?.add(&i5.partial_marker(&m[1])?.scale(&rational::int(2)))?)?;
    Ok(lhs == rhs)
}

/// The first-order PDE in ∂I/∂w implied by the u3 recursion. Compared on
/// coefficients x^0..x^{N-1}, since ∂I/∂x is only known to order N-1.
pub fn pde_i5_u3_holds(i5: &MarkedSeries) -> Result<bool> {
    let m = i5.markers();
    let n = i5.order();
    if n == 0 {
        return Ok(true);
    }
    let n1 = n - 1;
    let p = |terms: &[(usize, &[u16], i64)]| poly(&m, n1, terms);
    let part = |idx: usize| -> Result<MarkedSeries> { i5.partial_marker(&m[idx])?.truncate(n1) };
    const Y: [u16; 4] = [1, 0, 0, 0];
    const Z: [u16; 4] = [0, 1, 0, 0];
    const W: [u16; 4] = [0, 0, 1, 0];
    const T: [u16; 4] = [0, 0, 0, 1];
    const O: [u16; 4] = [0; 4];
    let cx = p(&[(2, &O, 2), (3, &O, 4), (4, &O, 2)])?;
    let cy = p(&[(1, &Y, -2), (2, &Y, -2)])?;
    let cz = p(&[(1, &Z, -4), (2, &W, 4), (2, &O, 4), (3, &Z, -4), (2, &Z, -8), (3, &W, 4)])?;
    let cw = p(&[(1, &W, -4), (1, &O, 2), (2, &W, -6), (2, &O, 6), (3, &W, -2), (3, &O, 2)])?;
    let ct = p(&[(1, &T, -6), (1, &W, 4), (2, &T, -8), (2, &W, 4), (2, &O, 4), (3, &T, -2), (3, &O, 2)])?;
    let rhs = cx
        .mul(&i5.partial_z())?
        .add(&cy.mul(&part(0)?)?)?
        .add(&cz.mul(&part(1)?)?)?
        .add(&cw.mul(&part(2)?)?)?
        .add(&ct.mul(&part(3)?)?)?;
    Ok(part(2)? == rhs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdeReport {
    pub results: Vec<(String, bool)>,
}

impl PdeReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|(_, ok)| *ok)
    }
}

pub fn verify_pde_identities(k: usize, order: usize) -> Result<PdeReport> {
    let w = gf_wk(k, order)?;
    let i5 = gf_ik5(k, order)?;
    Ok(PdeReport {
        results: vec![
            ("W_k: dW/dw = (x + x^2) dW/dy".into(), pde_w_holds(&w)?),
            ("I_k: dI/dw first-order PDE".into(), pde_i5_u3_holds(&i5)?),
            ("I_k: 2 dI/dt = x dI/dw + 2x dI/dz".into(), pde_i5_u4_holds(&i5)?),
        ],
    })
}

/// Marker series restricted to z^0..=z^n, compared coefficientwise without
/// regard to marker names.
pub fn same_coefficients(a: &MarkedSeries, b: &MarkedSeries, n: usize) -> bool {
    n <= a.order() && n <= b.order() && a.coeffs()[..=n] == b.coeffs()[..=n]
}

/// I_k(x,y,z,1,1) restricted to its (y,z) markers.
pub fn ik5_collapse(i5: &MarkedSeries) -> Result<MarkedSeries> {
    let one = Rational::from_integer(1.into());
    i5.eval_marker("t", &one)?.eval_marker("w", &one)
}
