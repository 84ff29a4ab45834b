//! Floating-point layer: dominant singularities, transfer estimates, the
//! skeleton constants and the arc-count limit law parameters.

use std::f64::consts::PI;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational;

/// Rational function with real coefficients, ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn dhorner(p: &[f64], x: f64) -> f64 {
    p.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, c)| acc * x + i as f64 * c)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl RatFn {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Self {
        Self { num, den }
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.num, x) / horner(&self.den, x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let (n, d) = (horner(&self.num, x), horner(&self.den, x));
        (dhorner(&self.num, x) * d - n * dhorner(&self.den, x)) / (d * d)
    }
}

fn to_f64s(v: &[i64]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

/// ϑ(z) = z⁴(1-z²-z⁴+2z⁶-z⁸)/q(z)², the inner function for modular k > 2.
pub fn modular_theta() -> RatFn {
    let q = to_f64s(crate::structures::q_poly());
    RatFn::new(vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0, -1.0, 0.0, 2.0, 0.0, -1.0], poly_mul(&q, &q))
}

/// (z⁴-z⁶+z⁸)/(1-z-z²+z³+2z⁴+z⁶)², the inner function for k = 2.
pub fn modular_theta_k2() -> RatFn {
    let d = vec![1.0, -1.0, -1.0, 1.0, 2.0, 0.0, 1.0];
    RatFn::new(vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0], poly_mul(&d, &d))
}

/// Φ(z) = w₀(z)z²/(1-z)² = z⁶/((1-z²+z⁶)(1-z)²)
pub fn skeleton_phi() -> RatFn {
    RatFn::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], vec![1.0, -2.0, 0.0, 2.0, -1.0, 0.0, 1.0, -2.0, 1.0])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularitySolve {
    pub target_name: String,
    pub target: f64,
    pub gamma: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
}

pub const SCAN_STEP: f64 = 1e-3;
pub const DEFAULT_BRACKET: (f64, f64) = (1e-6, 0.999);

/// Smallest root of f(z) = target in the bracket: a sign scan from the left
/// end locates the first crossing, bisection narrows it to 1e-14 and Newton
/// polishes the result.
pub fn solve_dominant_singularity(name: &str, f: &RatFn, target: f64, bracket: (f64, f64)) -> Result<SingularitySolve> {
    let g = |z: f64| f.eval(z) - target;
    let (lo0, hi0) = bracket;
    let mut a = lo0;
    let mut ga = g(a);
    let mut found = None;
    while a < hi0 {
        let b = (a + SCAN_STEP).min(hi0);
        let gb = g(b);
        if ga == 0.0 {
            found = Some((a, a));
            break;
        }
        if ga.signum() != gb.signum() {
            found = Some((a, b));
            break;
        }
        a = b;
        ga = gb;
    }
    let (mut lo, mut hi) = found.ok_or(Error::NoSignChange { lo: lo0, hi: hi0 })?;
    let mut glo = g(lo);
    let mut iters = 0;
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        iters += 1;
        if iters > 200 {
            return Err(Error::NoConvergence);
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..5 {
        let d = f.deriv(z);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = z - g(z) / d;
        if !(next >= lo - 1e-12 && next <= hi + 1e-12) || g(next).abs() > g(z).abs() {
            break;
        }
        z = next;
    }
    let residual = g(z).abs();
    if residual >= 1e-12 {
        return Err(Error::NoConvergence);
    }
    Ok(SingularitySolve { target_name: name.to_string(), target, gamma: z, residual, bracket })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModularRow {
    pub k: usize,
    pub gamma: f64,
    pub growth: f64,
    pub residual: f64,
}

/// γ_k and 1/γ_k for each k > 2, from ϑ(z) = ρ_k² = 1/(4(k-1)²).
pub fn modular_growth_table(ks: impl IntoIterator<Item = usize>) -> Result<Vec<ModularRow>> {
    let theta = modular_theta();
    ks.into_iter()
        .map(|k| {
            if k <= 2 {
                return Err(Error::InvalidParameter(format!("the q(z) formula needs k > 2, got {k}")));
            }
            let target = 1.0 / (4.0 * ((k - 1) * (k - 1)) as f64);
            let s = solve_dominant_singularity(&format!("modular k={k}"), &theta, target, DEFAULT_BRACKET)?;
            Ok(ModularRow { k, gamma: s.gamma, growth: 1.0 / s.gamma, residual: s.residual })
        })
        .collect()
}

/// Root of the k = 2 inner function at 1/4, and its reciprocal.
pub fn gamma2() -> Result<(f64, f64)> {
    let s = solve_dominant_singularity("modular k=2", &modular_theta_k2(), 0.25, DEFAULT_BRACKET)?;
    Ok((s.gamma, 1.0 / s.gamma))
}

/// Exponent of n in the modular asymptotics: -((k-1)² + (k-1)/2).
pub fn modular_exponent(k: usize) -> f64 {
    let m = (k - 1) as f64;
    -(m * m + m / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    ClosedForm,
    EmpiricalFit,
}

/// f(n) ~ constant · n^exponent · rate^n
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub constant: f64,
    pub exponent: f64,
    pub rate: f64,
    pub provenance: Provenance,
}

/// Coefficient asymptotics of a singular term at z = γ.
///
/// With a logarithm, `degree` must be a natural number kk and the term
/// multiplier·(z-γ)^kk·log(z-γ) maps to -multiplier·kk!·γ^kk · n^{-kk-1} γ^{-n}.
/// Without one, multiplier·(1-z/γ)^α maps to multiplier/Γ(-α) · n^{-α-1} γ^{-n}
/// (α not a natural number).
pub fn transfer_estimate(degree: f64, log_present: bool, gamma: f64, multiplier: f64) -> Result<AsymptoticEstimate> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter("gamma must be positive".into()));
    }
    let constant = if log_present {
        if degree < 0.0 || degree.fract() != 0.0 {
            return Err(Error::InvalidParameter("the log case needs a natural degree".into()));
        }
        -multiplier * libm::tgamma(degree + 1.0) * gamma.powf(degree)
    } else {
        if degree >= 0.0 && degree.fract() == 0.0 {
            return Err(Error::InvalidParameter("a polynomial term has no coefficient asymptotics".into()));
        }
        multiplier / libm::tgamma(-degree)
    };
    Ok(AsymptoticEstimate { constant, exponent: -degree - 1.0, rate: 1.0 / gamma, provenance: Provenance::ClosedForm })
}

/// coeff(n) / (n^e r^n) for each n, evaluated in logarithms.
pub fn empirical_ratio(coeffs: &[BigInt], est: &AsymptoticEstimate, n_list: &[usize]) -> Result<Vec<(usize, f64)>> {
    n_list
        .iter()
        .map(|&n| {
            let c = coeffs.get(n).ok_or(Error::InsufficientOrder { have: coeffs.len().saturating_sub(1), need: n })?;
            if c.sign() != num_bigint::Sign::Plus {
                return Ok((n, 0.0));
            }
            let l = rational::ln_abs(c) - est.exponent * (n as f64).ln() - n as f64 * est.rate.ln();
            Ok((n, l.exp()))
        })
        .collect()
}

/// F_3(1/16) by direct summation with f_3(n)/16^n = 24 c_n c_{n+1}/((n+2)(n+3)),
/// c_n = C(n)/4^n ≤ 1/(√π n^{3/2}), so the tail past N is below 6/(π N⁴).
pub fn f3_at_rho(tol: f64) -> Result<(f64, f64)> {
    let n_max = ((6.0 / (PI * tol)).powf(0.25)).ceil() as usize + 1;
    let mut c = 1.0f64;
    let mut sum = 0.0;
    for n in 0..=n_max {
        let c1 = c * (2.0 * (2 * n + 1) as f64) / ((n + 2) as f64) / 4.0;
        sum += 24.0 * c * c1 / (((n + 2) * (n + 3)) as f64);
        c = c1;
    }
    let tail = 6.0 / (PI * (n_max as f64).powi(4));
    if tail > tol {
        return Err(Error::Numeric(format!("tail bound {tail} exceeds {tol}")));
    }
    Ok((sum, tail))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkeletonConstants {
    pub rho: f64,
    pub f3_rho: f64,
    pub f3_rho_tail_bound: f64,
    pub r_series: f64,
    pub r_closed: f64,
    pub c: f64,
    pub eta: SingularitySolve,
    pub c_prime: f64,
}

pub fn r_closed() -> f64 {
    let t = 11.0 / 8.0 - 64.0 / (15.0 * PI);
    256.0 * t * t
}

pub fn c_closed() -> f64 {
    24.0 * (-512.0 + 165.0 * PI).powi(5) / (3125.0 * (256.0 - 81.0 * PI).powi(5) * PI)
}

/// C' = (1-η)·Φ'(η)⁴·820125π⁷/(256(256-81π)⁵(-512+165π)³)·4!·η⁴
pub fn c_prime_closed(eta: f64) -> f64 {
    let d = skeleton_phi().deriv(eta);
    (1.0 - eta) * d.powi(4) * 820125.0 * PI.powi(7) / (256.0 * (256.0 - 81.0 * PI).powi(5) * (-512.0 + 165.0 * PI).powi(3))
        * 24.0
        * eta.powi(4)
}

pub fn skeleton_constants() -> Result<SkeletonConstants> {
    let rho = 1.0 / 16.0;
    let (f3, tail) = f3_at_rho(1e-10)?;
    let r_series = rho * f3 * f3;
    let r = r_closed();
    let eta = solve_dominant_singularity("skeleton Phi", &skeleton_phi(), r, DEFAULT_BRACKET)?;
    let c_prime = c_prime_closed(eta.gamma);
    Ok(SkeletonConstants { rho, f3_rho: f3, f3_rho_tail_bound: tail, r_series, r_closed: r, c: c_closed(), eta, c_prime })
}

/// Φ(s,z) + R = e^{3s}z⁶/((1-e^s z²+e^{3s}z⁶)(1-z)²) with its first and
/// second partial derivatives.
#[derive(Clone, Copy, Debug)]
struct PhiPartials {
    e: f64,
    s: f64,
    z: f64,
    ss: f64,
    sz: f64,
    zz: f64,
}

fn phi_partials(s: f64, z: f64) -> PhiPartials {
    let u = s.exp();
    let d1 = 1.0 - u * z * z + u.powi(3) * z.powi(6);
    let e = u.powi(3) * z.powi(6) / (d1 * (1.0 - z).powi(2));
    // L = ln E and its partials
    let a = -u * z * z + 3.0 * u.powi(3) * z.powi(6);
    let a_s = -u * z * z + 9.0 * u.powi(3) * z.powi(6);
    let a_z = -2.0 * u * z + 18.0 * u.powi(3) * z.powi(5);
    let d1_z = -2.0 * u * z + 6.0 * u.powi(3) * z.powi(5);
    let d1_zz = -2.0 * u + 30.0 * u.powi(3) * z.powi(4);
    let l_s = 3.0 - a / d1;
    let l_ss = -(a_s * d1 - a * a) / (d1 * d1);
    let l_z = 6.0 / z - d1_z / d1 + 2.0 / (1.0 - z);
    let l_zz = -6.0 / (z * z) - (d1_zz * d1 - d1_z * d1_z) / (d1 * d1) + 2.0 / (1.0 - z).powi(2);
    let l_sz = -(a_z * d1 - a * d1_z) / (d1 * d1);
    PhiPartials {
        e,
        s: e * l_s,
        z: e * l_z,
        ss: e * (l_ss + l_s * l_s),
        sz: e * (l_sz + l_s * l_z),
        zz: e * (l_zz + l_z * l_z),
    }
}

/// γ(s): root of Φ(s,z) = 0 near η, by Newton in z.
pub fn gamma_of_s(s: f64, r: f64, start: f64) -> Result<f64> {
    let mut z = start;
    for _ in 0..100 {
        let p = phi_partials(s, z);
        let step = (p.e - r) / p.z;
        z -= step;
        if step.abs() < 1e-16 * z.abs().max(1.0) {
            return Ok(z);
        }
    }
    let p = phi_partials(s, z);
    if (p.e - r).abs() < 1e-14 {
        Ok(z)
    } else {
        Err(Error::NoConvergence)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltParams {
    pub mu: f64,
    pub sigma2: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma1_fd: f64,
    pub gamma2_fd: f64,
    pub mu_fd: f64,
    pub sigma2_fd: f64,
}

/// μ = -γ'(0)/γ(0), σ² = (γ'(0)/γ(0))² - γ''(0)/γ(0), with γ' and γ'' from
/// implicit differentiation and, independently, Richardson-extrapolated
/// central differences of γ(s).
pub fn clt_params() -> Result<CltParams> {
    let k = skeleton_constants()?;
    let r = k.r_closed;
    let g0 = gamma_of_s(0.0, r, k.eta.gamma)?;
    let p = phi_partials(0.0, g0);
    if p.z == 0.0 || !p.z.is_finite() {
        return Err(Error::Degenerate);
    }
    let g1 = -p.s / p.z;
    let g2 = -(p.ss + 2.0 * p.sz * g1 + p.zz * g1 * g1) / p.z;
    let h = 1e-3;
    let g = |s: f64| gamma_of_s(s, r, g0);
    let (gp1, gm1, gp2, gm2) = (g(h)?, g(-h)?, g(2.0 * h)?, g(-2.0 * h)?);
    let g1_fd = (8.0 * (gp1 - gm1) - (gp2 - gm2)) / (12.0 * h);
    let g2_fd = (16.0 * (gp1 + gm1) - (gp2 + gm2) - 30.0 * g0) / (12.0 * h * h);
    let stats = |d1: f64, d2: f64| (-d1 / g0, (d1 / g0).powi(2) - d2 / g0);
    let (mu, sigma2) = stats(g1, g2);
    let (mu_fd, sigma2_fd) = stats(g1_fd, g2_fd);
    Ok(CltParams { mu, sigma2, gamma0: g0, gamma1: g1, gamma2: g2, gamma1_fd: g1_fd, gamma2_fd: g2_fd, mu_fd, sigma2_fd })
}
