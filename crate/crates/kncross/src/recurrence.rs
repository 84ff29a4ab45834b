//! P-recursive sequences and conversion from linear ODEs with polynomial
//! coefficients.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Integer polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        IntPoly(c)
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// p(n + s) as a polynomial in n.
    pub fn shift(&self, s: i64) -> Self {
        let lin = IntPoly::from_i64s(&[s, 1]);
        let mut out = IntPoly::default();
        for c in self.0.iter().rev() {
            out = out.mul(&lin).add(&IntPoly::new(vec![c.clone()]));
        }
        out
    }

    /// Integer roots, found by scanning up to the Cauchy bound.
    pub fn integer_roots(&self) -> Vec<i64> {
        let Some(d) = self.degree() else { return Vec::new() };
        if d == 0 {
            return Vec::new();
        }
        let lead = self.0[d].abs();
        let bound = self.0[..d]
            .iter()
            .map(|c| (c.abs() / &lead).to_i64().unwrap_or(i64::MAX / 4))
            .max()
            .unwrap_or(0)
            .saturating_add(1)
            .min(1 << 20);
        (-bound..=bound).filter(|&x| self.eval_i64(x).is_zero()).collect()
    }
}

/// Falling factorial (x)_j = x(x-1)...(x-j+1) as a polynomial in x.
fn falling(j: usize) -> IntPoly {
    let mut p = IntPoly::from_i64s(&[1]);
    for i in 0..j {
        p = p.mul(&IntPoly::from_i64s(&[-(i as i64), 1]));
    }
    p
}

/// Linear ODE Σ q_j(x) F^(j)(x) = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeSpec {
    /// q_e, q_{e-1}, ..., q_0 (leading derivative first).
    pub poly_coeffs: Vec<IntPoly>,
}

impl OdeSpec {
    pub fn new(poly_coeffs: Vec<IntPoly>) -> Result<Self> {
        match poly_coeffs.first() {
            Some(p) if !p.is_zero() => Ok(Self { poly_coeffs }),
            _ => Err(Error::DegenerateOde),
        }
    }

    pub fn order(&self) -> usize {
        self.poly_coeffs.len() - 1
    }

    /// Coefficient polynomial of F^(j).
    pub fn q(&self, j: usize) -> &IntPoly {
        &self.poly_coeffs[self.order() - j]
    }
}

/// Σ_{r=0}^{m} p_r(n) f(n+r) = 0 for every integer n ≥ `start`,
/// with f(i) = 0 for i < 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PRecurrence {
    /// p_0, ..., p_m.
    pub coeff_polys: Vec<IntPoly>,
    pub start: i64,
    pub initial_terms: Vec<Rational>,
}

impl PRecurrence {
    pub fn new(coeff_polys: Vec<IntPoly>, start: i64, initial_terms: Vec<Rational>) -> Result<Self> {
        if coeff_polys.last().map_or(true, IntPoly::is_zero) {
            return Err(Error::InvalidParameter("leading recurrence polynomial is zero".into()));
        }
        Ok(Self { coeff_polys, start, initial_terms })
    }

    pub fn order(&self) -> usize {
        self.coeff_polys.len() - 1
    }

    pub fn with_initial_terms(&self, init: Vec<Rational>) -> Self {
        Self { initial_terms: init, ..self.clone() }
    }

    /// Same relation written for f(n+s+r): every p_r is replaced by p_r(n-s).
    pub fn recentered(&self, s: i64) -> Vec<IntPoly> {
        self.coeff_polys.iter().map(|p| p.shift(-s)).collect()
    }

    /// Smallest number of initial terms that makes unrolling well defined:
    /// covers every index not reachable by a relation with nonzero leading
    /// coefficient.
    pub fn required_initial_terms(&self) -> usize {
        let m = self.order() as i64;
        let mut need = (self.start + m).max(0);
        for r in self.coeff_polys[self.order()].integer_roots() {
            if r >= self.start {
                need = need.max(r + m + 1);
            }
        }
        need as usize
    }

    /// f(0..=n_max). Relations whose top index is already fixed by initial
    /// terms are checked for consistency.
    pub fn unroll(&self, n_max: usize) -> Result<Vec<Rational>> {
        let m = self.order() as i64;
        let mut f: Vec<Rational> = self.initial_terms.iter().take(n_max + 1).cloned().collect();
        let lead = &self.coeff_polys[self.order()];
        let rhs = |f: &[Rational], n: i64| -> Rational {
            let mut acc = Rational::zero();
            for r in 0..m {
                let idx = n + r;
                if idx < 0 {
                    continue;
                }
                let p = self.coeff_polys[r as usize].eval_i64(n);
                if !p.is_zero() {
                    acc += Rational::from_integer(p) * &f[idx as usize];
                }
            }
            acc
        };
        let known = f.len();
        for t in 0..known as i64 {
            let n = t - m;
            if n < self.start {
                continue;
            }
            let lhs = Rational::from_integer(lead.eval_i64(n)) * &f[t as usize] + rhs(&f, n);
            if !lhs.is_zero() {
                return Err(Error::Inconsistent(format!("initial terms violate the relation at n = {n}")));
            }
        }
        for t in known as i64..=n_max as i64 {
            let n = t - m;
            if n < self.start {
                return Err(Error::NotEnoughInitialTerms {
                    needed: self.required_initial_terms(),
                    got: self.initial_terms.len(),
                });
            }
            let l = lead.eval_i64(n);
            if l.is_zero() {
                return Err(Error::LeadingZero { n });
            }
            let v = -rhs(&f, n) / Rational::from_integer(l);
            f.push(v);
        }
        Ok(f)
    }
}

/// Equates coefficients of x^m after expanding x^i F^(j) = Σ (n)_j f_n x^{n-j+i}.
pub fn ode_to_recurrence(ode: &OdeSpec) -> Result<PRecurrence> {
    let e = ode.order();
    let mut terms: Vec<(i64, usize, BigInt)> = Vec::new();
    for j in 0..=e {
        for (i, a) in ode.q(j).0.iter().enumerate() {
            if !a.is_zero() {
                terms.push((j as i64 - i as i64, j, a.clone()));
            }
        }
    }
    if terms.is_empty() {
        return Err(Error::DegenerateOde);
    }
    let dmin = terms.iter().map(|t| t.0).min().unwrap();
    let dmax = terms.iter().map(|t| t.0).max().unwrap();
    let m = (dmax - dmin) as usize;
    let mut polys = vec![IntPoly::default(); m + 1];
    // relation index n = (power of x) + dmin; f(n + r) with r = d - dmin
    for (d, j, a) in terms {
        let r = (d - dmin) as usize;
        let ff = falling(j).shift(r as i64).scale(&a);
        polys[r] = polys[r].add(&ff);
    }
    while polys.len() > 1 && polys.last().unwrap().is_zero() {
        polys.pop();
    }
    let mut lo = 0;
    while lo + 1 < polys.len() && polys[lo].is_zero() {
        lo += 1;
    }
    let polys: Vec<IntPoly> = polys[lo..].iter().map(|p| p.shift(-(lo as i64))).collect();
    if polys.iter().all(IntPoly::is_zero) {
        return Err(Error::DegenerateOde);
    }
    PRecurrence::new(polys, dmin + lo as i64, Vec::new())
}

/// Normalizes sign so the leading polynomial has positive leading coefficient.
pub fn normalize_sign(p: &[IntPoly]) -> Vec<IntPoly> {
    let neg = p
        .last()
        .and_then(|l| l.0.last())
        .is_some_and(|c| c.is_negative());
    if neg {
        let m1 = -BigInt::one();
        p.iter().map(|q| q.scale(&m1)).collect()
    } else {
        p.to_vec()
    }
}
