//! k-noncrossing perfect matchings: exact counts f_k(2n,0) and the series
//! F_k(z) = Σ f_k(2n,0) z^n.
//!
//! Counts come from a lattice-walk dynamic program: k-noncrossing matchings
//! on 2n points correspond to closed walks of length 2n with unit steps
//! ±e_i in the Weyl chamber x_1 > x_2 > ... > x_{k-1} ≥ 0. The linear ODEs
//! satisfied by F_k provide an independent route through P-recurrences.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::recurrence::{ode_to_recurrence, IntPoly, OdeSpec, PRecurrence};
use crate::series::TruncatedSeries;

/// f_k(2n,0) for n = 0..=n_max.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingCountTable {
    pub k: usize,
    pub counts: Vec<BigInt>,
}

impl MatchingCountTable {
    pub fn n_max(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,n,count\n");
        for (n, c) in self.counts.iter().enumerate() {
            s.push_str(&format!("{},{n},{c}\n", self.k));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut k = None;
        let mut counts = Vec::new();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            let bad = || Error::Parse(format!("bad row {line:?}"));
            if f.len() != 3 {
                return Err(bad());
            }
            let kk: usize = f[0].parse().map_err(|_| bad())?;
            let n: usize = f[1].parse().map_err(|_| bad())?;
            if *k.get_or_insert(kk) != kk || n != counts.len() {
                return Err(bad());
            }
            counts.push(f[2].parse().map_err(|_| bad())?);
        }
        match k {
            Some(k) => Ok(Self { k, counts }),
            None => Err(Error::Parse("empty table".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FkMethod {
    Walk,
    Ode,
}

impl FkMethod {
    pub fn name(self) -> &'static str {
        match self {
            FkMethod::Walk => "walk",
            FkMethod::Ode => "ode",
        }
    }
}

pub fn catalan(n: usize) -> BigInt {
    binomial(BigInt::from(2 * n), BigInt::from(n)) / BigInt::from(n + 1)
}

/// C(n)C(n+2) - C(n+1)^2
pub fn f3_closed(n: usize) -> BigInt {
    let c1 = catalan(n + 1);
    catalan(n) * catalan(n + 2) - &c1 * &c1
}

/// 1/(2(k-1)); the dominant singularity of F_k is its square.
pub fn rho_k(k: usize) -> Result<Rational> {
    check_k(k)?;
    Ok(rational::frac(1, 2 * (k as i64 - 1)))
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

fn partitions_into(m: usize, max_part: usize, parts_left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if m == 0 {
        out.push(cur.clone());
        return;
    }
    if parts_left == 0 {
        return;
    }
    for p in (1..=max_part.min(m)).rev() {
        cur.push(p as u16);
        partitions_into(m - p, p, parts_left - 1, cur, out);
        cur.pop();
    }
}

/// Exact counts via the Weyl-chamber walk recursion.
///
/// A chamber point x_i = λ_i + (k-1-i) is identified with the partition λ,
/// and |λ| is the distance from the origin; only partitions with |λ| ≤ n_max
/// can lie on a closed walk of length 2 n_max.
pub fn count_matchings_walk(k: usize, n_max: usize) -> Result<MatchingCountTable> {
    check_k(k)?;
    if n_max > u16::MAX as usize {
        return Err(Error::InvalidParameter(format!("n_max = {n_max} is too large")));
    }
    let d = (k - 1).min(n_max.max(1));
    let mut states: Vec<Vec<u16>> = Vec::new();
    let mut offsets = vec![0usize];
    for m in 0..=n_max {
        partitions_into(m, m, d, &mut Vec::new(), &mut states);
        offsets.push(states.len());
    }
    let index: HashMap<&[u16], u32> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i as u32)).collect();
    // the chamber graph is undirected, so one neighbour list serves both directions
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); states.len()];
    let mut scratch = Vec::with_capacity(d);
    for (i, s) in states.iter().enumerate() {
        for part in 0..d {
            let cur = s.get(part).copied().unwrap_or(0);
            let above = if part == 0 { u16::MAX } else { s.get(part - 1).copied().unwrap_or(0) };
            if cur < above {
                scratch.clear();
                scratch.extend_from_slice(s);
                if part < scratch.len() {
                    scratch[part] += 1;
                } else {
                    scratch.push(1);
                }
                if let Some(&j) = index.get(scratch.as_slice()) {
                    adj[i].push(j);
                    adj[j as usize].push(i as u32);
                }
            }
        }
    }
    drop(index);
    let total = 2 * n_max;
    let mut prev = vec![BigInt::zero(); states.len()];
    let mut next = prev.clone();
    prev[0] = BigInt::one();
    let mut counts = vec![BigInt::one()];
    for t in 1..=total {
        let reach = t.min(total - t);
        for m in (t % 2..=reach).step_by(2) {
            for s in offsets[m]..offsets[m + 1] {
                let v = &mut next[s];
                v.set_zero();
                for &nb in &adj[s] {
                    *v += &prev[nb as usize];
                }
            }
        }
        std::mem::swap(&mut prev, &mut next);
        if t % 2 == 0 {
            counts.push(prev[0].clone());
        }
    }
    Ok(MatchingCountTable { k, counts })
}

/// Cached walk counts keyed by (k, n_max, method).
pub fn count_matchings_cached(k: usize, n_max: usize, method: FkMethod, cache: Option<&Cache>) -> Result<MatchingCountTable> {
    let key = format!("matchings;k={k};n_max={n_max};method={}", method.name());
    if let Some(c) = cache {
        if let Some(text) = c.get(&key) {
            if let Ok(t) = MatchingCountTable::from_csv(&text) {
                if t.k == k && t.n_max() == n_max {
                    return Ok(t);
                }
            }
        }
    }
    let table = match method {
        FkMethod::Walk => count_matchings_walk(k, n_max)?,
        FkMethod::Ode => {
            let s = build_fk_series(k, n_max, FkMethod::Ode)?;
            MatchingCountTable { k, counts: s.to_bigints().ok_or_else(|| Error::Inconsistent("non-integral counts".into()))? }
        }
    };
    if let Some(c) = cache {
        c.put(&key, &table.to_csv())?;
    }
    Ok(table)
}

const ODE_2_5: &[(usize, &[&[i64]])] = &[
    (2, &[&[0, -1, 4], &[-2, 10], &[2]]),
    (3, &[&[0, 0, -1, 16], &[0, -8, 96], &[-12, 108], &[12]]),
    (
        4,
        &[
            &[0, 0, 0, 1, -40, 144],
            &[0, 0, 20, -556, 1584],
            &[0, 112, -1968, 4428],
            &[168, -1728, 3024],
            &[-168, 216],
        ],
    ),
    (
        5,
        &[
            &[0, 0, 0, 0, 1, -80, 1024],
            &[0, 0, 0, 40, -2256, 20480],
            &[0, 0, 532, -19380, 121600],
            &[0, 2728, -56692, 241920],
            &[4400, -46048, 130560],
            &[-4400, 7680],
        ],
    ),
];

const ODE_TABLE: &str = include_str!("../data/ode_table.txt");

fn parse_poly(s: &str) -> Result<IntPoly> {
    let mut coeffs: Vec<BigInt> = Vec::new();
    for tok in s.split_whitespace() {
        let bad = || Error::Parse(format!("bad ODE term {tok:?}"));
        let (c, p) = match tok.split_once('x') {
            None => (tok, 0usize),
            Some((c, rest)) => {
                let p = if rest.is_empty() { 1 } else { rest.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())? };
                (c, p)
            }
        };
        let c: BigInt = match c {
            "" | "+" => BigInt::one(),
            "-" => -BigInt::one(),
            _ => c.trim_start_matches('+').parse().map_err(|_| bad())?,
        };
        if coeffs.len() <= p {
            coeffs.resize(p + 1, BigInt::zero());
        }
        coeffs[p] += c;
    }
    Ok(IntPoly::new(coeffs))
}

/// ODE rows stored in the data table, keyed by k.
pub fn ode_table_rows() -> Result<Vec<(usize, OdeSpec)>> {
    let mut rows = Vec::new();
    let mut cur: Option<(usize, Vec<IntPoly>)> = None;
    for line in ODE_TABLE.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(k) = line.strip_prefix("k=") {
            if let Some((k0, p)) = cur.take() {
                rows.push((k0, OdeSpec::new(p)?));
            }
            let k = k.parse().map_err(|_| Error::Parse(format!("bad row header {line:?}")))?;
            cur = Some((k, Vec::new()));
            continue;
        }
        let (_, body) = line.split_once(':').ok_or_else(|| Error::Parse(format!("bad ODE line {line:?}")))?;
        let (_, polys) = cur.as_mut().ok_or_else(|| Error::Parse("ODE line before header".into()))?;
        polys.push(parse_poly(body)?);
    }
    if let Some((k0, p)) = cur {
        rows.push((k0, OdeSpec::new(p)?));
    }
    Ok(rows)
}

/// The ODE for F_k (k = 2..=9), leading derivative first.
pub fn fk_ode(k: usize) -> Result<OdeSpec> {
    if let Some((_, rows)) = ODE_2_5.iter().find(|(kk, _)| *kk == k) {
        return OdeSpec::new(rows.iter().map(|r| IntPoly::from_i64s(r)).collect());
    }
    ode_table_rows()?
        .into_iter()
        .find(|(kk, _)| *kk == k)
        .map(|(_, o)| o)
        .ok_or_else(|| Error::InvalidParameter(format!("no ODE encoded for k = {k}")))
}

/// P-recurrence for f_k(2n,0) with initial terms taken from the walk counts.
pub fn fk_recurrence(k: usize) -> Result<PRecurrence> {
    let rec = ode_to_recurrence(&fk_ode(k)?)?;
    let need = rec.required_initial_terms().max(1);
    let walk = count_matchings_walk(k, need - 1)?;
    Ok(rec.with_initial_terms(walk.counts.into_iter().map(Rational::from_integer).collect()))
}

/// First index ≤ n_max where the ODE route disagrees with the walk counts.
pub fn ode_row_mismatch(k: usize, n_max: usize) -> Result<Option<usize>> {
    let walk = count_matchings_walk(k, n_max)?;
    let rec = match fk_recurrence(k) {
        Ok(r) => r,
        Err(Error::InvalidParameter(m)) => return Err(Error::InvalidParameter(m)),
        Err(_) => return Ok(Some(0)),
    };
    let vals = match rec.unroll(n_max) {
        Ok(v) => v,
        Err(Error::LeadingZero { n }) => return Ok(Some(n.max(0) as usize)),
        Err(Error::Inconsistent(_)) => return Ok(Some(0)),
        Err(e) => return Err(e),
    };
    Ok(vals
        .iter()
        .zip(&walk.counts)
        .position(|(a, b)| *a != Rational::from_integer(b.clone())))
}

/// F_k to the given order.
///
/// The ODE route validates its row against the walk counts for n ≤ 60 (or
/// the requested order if smaller) before unrolling.
pub fn build_fk_series(k: usize, order: usize, method: FkMethod) -> Result<TruncatedSeries> {
    check_k(k)?;
    match method {
        FkMethod::Walk => Ok(TruncatedSeries::from_bigints(&count_matchings_walk(k, order)?.counts, order)),
        FkMethod::Ode => {
            let check = order.min(60);
            if let Some(n) = ode_row_mismatch(k, check)? {
                return Err(Error::Inconsistent(format!("ODE row for k = {k} disagrees with walk counts at n = {n}")));
            }
            let vals = fk_recurrence(k)?.unroll(order)?;
            Ok(TruncatedSeries::new(vals, order))
        }
    }
}

/// Integer coefficients of F_k via the ODE recurrence, for large orders.
pub fn fk_coeffs(k: usize, order: usize) -> Result<Vec<BigInt>> {
    if k == 3 {
        return Ok((0..=order).map(f3_closed).collect());
    }
    if k == 2 {
        return Ok((0..=order).map(catalan).collect());
    }
    build_fk_series(k, order, if order <= 40 { FkMethod::Walk } else { FkMethod::Ode })?
        .to_bigints()
        .ok_or_else(|| Error::Inconsistent("non-integral matching counts".into()))
}
