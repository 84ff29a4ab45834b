//! Power series in a main variable z whose coefficients are sparse
//! polynomials in up to four marker variables.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::series::TruncatedSeries;

pub const MAX_MARKERS: usize = 4;

/// Exponent vector; unused slots stay 0.
pub type Mono = [u16; MAX_MARKERS];

/// Sparse polynomial in the markers; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MPoly(BTreeMap<Mono, Rational>);

impl MPoly {
    pub fn zero() -> Self {
        MPoly(BTreeMap::new())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term([0; MAX_MARKERS], c)
    }

    pub fn term(m: Mono, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, m: &Mono) -> Rational {
        self.0.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rational)> {
        self.0.iter()
    }

    /// The constant, if the polynomial has no marker dependence.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::zero()),
            1 => self.0.get(&[0; MAX_MARKERS]).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, o: &MPoly, s: &Rational) {
        for (m, c) in &o.0 {
            self.add_term(*m, c * s);
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        r.add_assign_scaled(o, &Rational::one());
        r
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        r.add_assign_scaled(o, &-Rational::one());
        r
    }

    pub fn scale(&self, s: &Rational) -> MPoly {
        if s.is_zero() {
            return MPoly::zero();
        }
        MPoly(self.0.iter().map(|(m, c)| (*m, c * s)).collect())
    }

    /// self += a·b
    pub fn add_product(&mut self, a: &MPoly, b: &MPoly) {
        for (ma, ca) in &a.0 {
            for (mb, cb) in &b.0 {
                let mut m = *ma;
                for i in 0..MAX_MARKERS {
                    m[i] += mb[i];
                }
                self.add_term(m, ca * cb);
            }
        }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut r = MPoly::zero();
        r.add_product(self, o);
        r
    }

    /// Substitutes a value for marker `idx` and drops that slot.
    pub fn eval_marker(&self, idx: usize, value: &Rational) -> MPoly {
        let mut r = MPoly::zero();
        for (m, c) in &self.0 {
            let mut pow = Rational::one();
            for _ in 0..m[idx] {
                pow *= value;
            }
            let mut nm = [0; MAX_MARKERS];
            let mut k = 0;
            for (i, e) in m.iter().enumerate() {
                if i != idx {
                    nm[k] = *e;
                    k += 1;
                }
            }
            r.add_term(nm, c * pow);
        }
        r
    }

    pub fn partial(&self, idx: usize) -> MPoly {
        let mut r = MPoly::zero();
        for (m, c) in &self.0 {
            if m[idx] > 0 {
                let mut nm = *m;
                nm[idx] -= 1;
                r.add_term(nm, c * rational::int(m[idx] as i64));
            }
        }
        r
    }

    pub fn sum_coeffs(&self) -> Rational {
        self.0.values().fold(Rational::zero(), |a, c| a + c)
    }
}

/// z-series with marker-polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSeries {
    markers: Vec<String>,
    order: usize,
    coeffs: Vec<MPoly>,
}

/// Exponent vector from a short slice.
pub fn mono(e: &[u16]) -> Mono {
    let mut m = [0; MAX_MARKERS];
    m[..e.len()].copy_from_slice(e);
    m
}

impl MarkedSeries {
    pub fn new(markers: &[&str], mut coeffs: Vec<MPoly>, order: usize) -> Result<Self> {
        if markers.len() > MAX_MARKERS {
            return Err(Error::InvalidParameter(format!("at most {MAX_MARKERS} markers")));
        }
        coeffs.resize(order + 1, MPoly::zero());
        Ok(Self { markers: markers.iter().map(|s| s.to_string()).collect(), order, coeffs })
    }

    pub fn zero(markers: &[&str], order: usize) -> Result<Self> {
        Self::new(markers, Vec::new(), order)
    }

    /// Polynomial from (z exponent, marker exponents, coefficient) triples.
    pub fn from_terms(markers: &[&str], order: usize, terms: &[(usize, &[u16], i64)]) -> Result<Self> {
        let mut s = Self::zero(markers, order)?;
        for &(n, e, c) in terms {
            if e.len() != markers.len() {
                return Err(Error::InvalidParameter("exponent vector length".into()));
            }
            if n <= order {
                s.coeffs[n].add_term(mono(e), rational::int(c));
            }
        }
        Ok(s)
    }

    pub fn from_univariate(s: &TruncatedSeries, markers: &[&str]) -> Result<Self> {
        let c = s.coeffs().iter().map(|c| MPoly::constant(c.clone())).collect();
        Self::new(markers, c, s.order())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn markers(&self) -> Vec<&str> {
        self.markers.iter().map(String::as_str).collect()
    }

    pub fn coeff(&self, n: usize) -> &MPoly {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[MPoly] {
        &self.coeffs
    }

    /// [z^n · markers^e]
    pub fn get(&self, n: usize, e: &[u16]) -> Rational {
        self.coeffs[n].get(&mono(e))
    }

    fn marker_index(&self, name: &str) -> Result<usize> {
        self.markers
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown marker {name}")))
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.order != o.order {
            return Err(Error::OrderMismatch { left: self.order, right: o.order });
        }
        if self.markers != o.markers {
            return Err(Error::MarkerMismatch);
        }
        Ok(())
    }

    fn with(&self, coeffs: Vec<MPoly>, order: usize) -> Self {
        Self { markers: self.markers.clone(), order, coeffs }
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order {
            return Err(Error::InsufficientOrder { have: self.order, need: order });
        }
        Ok(self.with(self.coeffs[..=order].to_vec(), order))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.with(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect(), self.order))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.with(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect(), self.order))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        self.with(self.coeffs.iter().map(|c| c.scale(s)).collect(), self.order)
    }

    /// Product truncated at the common order; zero coefficients are skipped,
    /// so multiplying by a short polynomial is cheap.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.order;
        let mut out = vec![MPoly::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j].add_product(a, b);
                }
            }
        }
        Ok(self.with(out, n))
    }

    /// self / d, where d has a nonzero constant as its z^0 coefficient.
    pub fn div(&self, d: &Self) -> Result<Self> {
        self.check(d)?;
        let d0 = d.coeffs[0].as_constant().filter(|c| !c.is_zero()).ok_or(Error::ZeroConstantTerm)?;
        let inv = d0.recip();
        let tail: Vec<(usize, &MPoly)> =
            d.coeffs.iter().enumerate().skip(1).filter(|(_, c)| !c.is_zero()).collect();
        let mut out: Vec<MPoly> = Vec::with_capacity(self.order + 1);
        for n in 0..=self.order {
            let mut v = self.coeffs[n].clone();
            let m1 = -Rational::one();
            for &(j, c) in &tail {
                if j > n {
                    break;
                }
                let mut prod = MPoly::zero();
                prod.add_product(c, &out[n - j]);
                v.add_assign_scaled(&prod, &m1);
            }
            out.push(v.scale(&inv));
        }
        Ok(self.with(out, self.order))
    }

    pub fn reciprocal(&self) -> Result<Self> {
        let one = Self::from_terms(&self.markers(), self.order, &[(0, &vec![0; self.markers.len()], 1)])?;
        one.div(self)
    }

    /// outer(self) by Horner's rule; self must vanish at z = 0.
    pub fn compose_into(&self, outer: &TruncatedSeries) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroInnerConstant);
        }
        let n = self.order;
        if outer.order() < n {
            return Err(Error::InsufficientOrder { have: outer.order(), need: n });
        }
        let mut acc = Self::zero(&self.markers(), n)?;
        for h in (0..=n).rev() {
            acc = acc.mul(self)?;
            acc.coeffs[0].add_term([0; MAX_MARKERS], outer.coeff(h).clone());
        }
        Ok(acc)
    }

    /// outer(num/den) where num, den are short z-polynomials, num(0) = 0.
    pub fn compose_ratfn(outer: &TruncatedSeries, num: &Self, den: &Self) -> Result<Self> {
        num.check(den)?;
        if !num.coeffs[0].is_zero() {
            return Err(Error::NonzeroInnerConstant);
        }
        let v = num
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::InvalidParameter("inner numerator is zero".into()))?;
        let n = num.order;
        let top = n / v;
        if outer.order() < top {
            return Err(Error::InsufficientOrder { have: outer.order(), need: top });
        }
        let mut acc: Option<Self> = None;
        for h in (0..=top).rev() {
            let keep = n - v * h;
            let mut next = match acc {
                None => Self::zero(&num.markers(), keep)?,
                Some(a) => {
                    let a = Self { order: keep, coeffs: { let mut c = a.coeffs; c.resize(keep + 1, MPoly::zero()); c }, markers: a.markers };
                    a.mul(&num.truncate(keep)?)?.div(&den.truncate(keep)?)?
                }
            };
            next.coeffs[0].add_term([0; MAX_MARKERS], outer.coeff(h).clone());
            acc = Some(next);
        }
        Ok(acc.expect("at least one Horner step"))
    }

    /// Substitutes a value for one marker, removing it from the marker set.
    pub fn eval_marker(&self, name: &str, value: &Rational) -> Result<Self> {
        let idx = self.marker_index(name)?;
        let markers: Vec<String> = self.markers.iter().filter(|m| *m != name).cloned().collect();
        Ok(Self { markers, order: self.order, coeffs: self.coeffs.iter().map(|c| c.eval_marker(idx, value)).collect() })
    }

    /// All markers set to 1.
    pub fn eval_markers_one(&self) -> TruncatedSeries {
        TruncatedSeries::new(self.coeffs.iter().map(MPoly::sum_coeffs).collect(), self.order)
    }

    pub fn partial_marker(&self, name: &str) -> Result<Self> {
        let idx = self.marker_index(name)?;
        Ok(self.with(self.coeffs.iter().map(|c| c.partial(idx)).collect(), self.order))
    }

    /// d/dz; the order drops by one.
    pub fn partial_z(&self) -> Self {
        if self.order == 0 {
            return self.with(vec![MPoly::zero()], 0);
        }
        let c = (1..=self.order).map(|n| self.coeffs[n].scale(&rational::int(n as i64))).collect();
        self.with(c, self.order - 1)
    }

    /// All (z exponent, exponent vector, coefficient) triples, in order.
    pub fn entries(&self) -> Vec<(usize, Mono, Rational)> {
        let mut v = Vec::new();
        for (n, p) in self.coeffs.iter().enumerate() {
            for (m, c) in p.terms() {
                v.push((n, *m, c.clone()));
            }
        }
        v
    }
}
