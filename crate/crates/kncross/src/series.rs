//! Truncated formal power series over exact rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intpoly;
use crate::rational::{self, Rational};

/// Coefficients of z^0..=z^order.
///
/// The coefficient vector always has exactly `order + 1` entries and no
/// operation extends the order on its own.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    order: usize,
    coeffs: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    order: usize,
    coeffs: Vec<String>,
}

impl TruncatedSeries {
    /// Pads with zeros or truncates to `order + 1` coefficients.
    pub fn new(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        Self { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::new(vec![Rational::one()], order)
    }

    /// c·z^power (zero if the power lies beyond the order).
    pub fn monomial(c: Rational, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    pub fn from_i64s(v: &[i64], order: usize) -> Self {
        Self::new(v.iter().map(|&x| rational::int(x)).collect(), order)
    }

    pub fn from_bigints(v: &[BigInt], order: usize) -> Self {
        Self::new(v.iter().cloned().map(Rational::from_integer).collect(), order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn set_coeff(&mut self, n: usize, c: Rational) {
        self.coeffs[n] = c;
    }

    /// Lowest index with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(rational::is_integer)
    }

    /// Integer coefficients, if every coefficient is an integer.
    pub fn to_bigints(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(rational::to_bigint).collect()
    }

    /// Keeps z^0..=z^order (order may only shrink).
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order {
            return Err(Error::InsufficientOrder { have: self.order, need: order });
        }
        Ok(Self::new(self.coeffs[..=order].to_vec(), order))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch { left: self.order, right: other.order });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { order: self.order, coeffs: c })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { order: self.order, coeffs: c })
    }

    pub fn neg(&self) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let (a, da) = integral_parts(&self.coeffs);
        let (b, db) = integral_parts(&other.coeffs);
        let prod = intpoly::mul_trunc(&a, &b, self.order + 1);
        let d = da * db;
        let coeffs = prod.into_iter().map(|p| Rational::new(p, d.clone())).collect();
        Ok(Self { order: self.order, coeffs })
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = a0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.order + 1);
        out.push(inv0.clone());
        for n in 1..=self.order {
            let mut acc = Rational::zero();
            for j in 1..=n {
                let a = &self.coeffs[j];
                if !a.is_zero() {
                    acc += a * &out[n - j];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(Self { order: self.order, coeffs: out })
    }

    /// Formal derivative; the result has order one less (order 0 stays 0).
    pub fn derivative(&self) -> Self {
        if self.order == 0 {
            return Self::zero(0);
        }
        let c = (1..=self.order)
            .map(|n| &self.coeffs[n] * rational::int(n as i64))
            .collect();
        Self::new(c, self.order - 1)
    }

    /// self(inner) truncated at the inner order.
    ///
    /// The inner series must have zero constant term and the outer series must
    /// carry at least ceil(N / valuation(inner)) coefficients.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroInnerConstant);
        }
        let n = inner.order;
        let Some(v) = inner.valuation() else {
            return Ok(Self::new(vec![self.coeffs[0].clone()], n));
        };
        let top = n / v;
        if self.order < top {
            return Err(Error::InsufficientOrder { have: self.order, need: top });
        }
        let mut acc = Self::zero(n);
        for h in (0..=top).rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] += &self.coeffs[h];
        }
        Ok(acc)
    }

    /// self(num/den) for polynomials `num`, `den` with num(0) = 0, den(0) ≠ 0,
    /// truncated at `order`.
    pub fn compose_ratfn(&self, num: &[Rational], den: &[Rational], order: usize) -> Result<Self> {
        let ints = (
            self.to_bigints(),
            num.iter().map(rational::to_bigint).collect::<Option<Vec<_>>>(),
            den.iter().map(rational::to_bigint).collect::<Option<Vec<_>>>(),
        );
        if let (Some(o), Some(p), Some(q)) = ints {
            if q.first().is_some_and(|d| d.is_one() || (-d).is_one()) {
                let r = intpoly::compose_rational(&o, &p, &q, order + 1)?;
                return Ok(Self::from_bigints(&r, order));
            }
        }
        let p = Self::new(num.to_vec(), order);
        let q = Self::new(den.to_vec(), order);
        self.compose(&p.mul(&q.reciprocal()?)?)
    }

    /// Series reversion: returns z(y) with self(z(y)) = y.
    ///
    /// Newton iteration on truncated series, doubling the working order each
    /// round.
    pub fn compositional_inverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroInnerConstant);
        }
        let n = self.order;
        if n == 0 {
            return Ok(Self::zero(0));
        }
        let a1 = &self.coeffs[1];
        if a1.is_zero() {
            return Err(Error::ZeroLinearCoefficient);
        }
        let mut z = Self::monomial(a1.recip(), 1, 1);
        let mut prec = 1;
        while prec < n {
            prec = (2 * prec).min(n);
            let z_p = Self::new(z.coeffs.clone(), prec);
            let y_p = self.truncate(prec)?;
            let dy_p = Self::new(self.derivative().coeffs, prec);
            let resid = y_p.compose(&z_p)?.sub(&Self::monomial(Rational::one(), 1, prec))?;
            let slope = dy_p.compose(&z_p)?.reciprocal()?;
            z = z_p.sub(&resid.mul(&slope)?)?;
        }
        Ok(z)
    }

    /// Value at a rational point, treating the truncation as a polynomial.
    pub fn eval_poly(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_json(&self) -> String {
        let doc = SeriesDoc { order: self.order, coeffs: self.coeffs.iter().map(rational::format).collect() };
        serde_json::to_string(&doc).expect("series document serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: SeriesDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.coeffs.len() != doc.order + 1 {
            return Err(Error::Parse(format!(
                "order {} needs {} coefficients, found {}",
                doc.order,
                doc.order + 1,
                doc.coeffs.len()
            )));
        }
        let coeffs = doc.coeffs.iter().map(|c| rational::parse(c)).collect::<Result<Vec<_>>>()?;
        Ok(Self { order: doc.order, coeffs })
    }

    /// `n,numerator,denominator` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,numerator,denominator\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{n},{},{}\n", c.numer(), c.denom()));
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (row, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (row == 0 && line.starts_with('n')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("bad row {line:?}")));
            }
            let n: usize = fields[0].trim().parse().map_err(|_| Error::Parse(format!("bad index in {line:?}")))?;
            if n != coeffs.len() {
                return Err(Error::Parse(format!("expected index {}, found {n}", coeffs.len())));
            }
            coeffs.push(rational::parse(&format!("{}/{}", fields[1], fields[2]))?);
        }
        if coeffs.is_empty() {
            return Err(Error::Parse("empty series".into()));
        }
        let order = coeffs.len() - 1;
        Ok(Self { order, coeffs })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order + 1)
    }
}

/// Splits rationals into integers over a common denominator.
pub(crate) fn integral_parts(v: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let d = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = v.iter().map(|c| c.numer() * (&d / c.denom())).collect();
    (ints, d)
}
