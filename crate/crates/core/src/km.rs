//! The Kesten–McKay distribution and the triangles that describe its moments.
//!
//! For `v >= 2` the density is
//! `v·√(4(v-1) - x²) / (2π(v² - x²))` on `|x| <= 2√(v-1)`.
//! Its even moments are sums over Catalan's triangle, and after the change of
//! variable `v = 1/p` they become alternating sums over Borel's triangle.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::quad::integrate;

/// Absolute tolerance of the CDF quadrature.
pub const CDF_TOLERANCE: f64 = 1e-10;

/// Kesten–McKay law with parameter `v >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMDistribution {
    v: f64,
}

impl KMDistribution {
    pub fn new(v: f64) -> Result<Self> {
        if !(v >= 2.0) || !v.is_finite() {
            return Err(invalid(format!("Kesten-McKay parameter v = {v} must be >= 2")));
        }
        Ok(Self { v })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// Support half-width `2√(v-1)`.
    pub fn edge(&self) -> f64 {
        2.0 * (self.v - 1.0).sqrt()
    }

    pub fn support(&self) -> (f64, f64) {
        let r = self.edge();
        (-r, r)
    }

    pub fn density(&self, x: f64) -> f64 {
        let v = self.v;
        let disc = 4.0 * (v - 1.0) - x * x;
        if disc < 0.0 {
            return 0.0;
        }
        let denom = v * v - x * x;
        if denom <= 0.0 {
            // only reachable at v = 2, x = ±2 where the density tends to 1/π
            // from inside; the boundary itself carries no mass
            return if disc == 0.0 { 0.0 } else { 1.0 / PI };
        }
        v * disc.sqrt() / (2.0 * PI * denom)
    }

    /// Density pulled back along `x = -R cos θ`, `θ ∈ [0, π]`, including the
    /// Jacobian. Smooth on the closed interval, even at `v = 2`.
    fn angular_density(&self, theta: f64) -> f64 {
        let v = self.v;
        let r = self.edge();
        // v - R = (√(v-1) - 1)², evaluated without cancellation
        let a = ((v - 1.0).sqrt() - 1.0).powi(2);
        let (s, c) = (0.5 * theta).sin_cos();
        let (s2, c2) = (s * s, c * c);
        // v ∓ R cos θ written as a + 2R sin²(θ/2) and a + 2R cos²(θ/2)
        let lower = a + 2.0 * r * s2;
        let upper = a + 2.0 * r * c2;
        if lower == 0.0 || upper == 0.0 {
            return if a == 0.0 { 1.0 / PI } else { 0.0 };
        }
        v * r * r * 4.0 * s2 * c2 / (2.0 * PI * lower * upper)
    }

    fn theta_of(&self, x: f64) -> f64 {
        (-x / self.edge()).clamp(-1.0, 1.0).acos()
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        let r = self.edge();
        if x <= -r {
            return Ok(0.0);
        }
        if x >= r {
            return Ok(1.0);
        }
        let theta = self.theta_of(x);
        let val = integrate(|t| self.angular_density(t), 0.0, theta, CDF_TOLERANCE)?;
        Ok(val.clamp(0.0, 1.0))
    }

    /// `∫ x^k dμ` from the closed-form Catalan-triangle sum.
    pub fn moment(&self, k: u32) -> f64 {
        km_moment(self.v, k)
    }

    /// `∫ f(x) dμ` by adaptive quadrature in the angular variable.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, tol: f64) -> Result<f64> {
        let r = self.edge();
        integrate(
            |t| f(-r * t.cos()) * self.angular_density(t),
            0.0,
            PI,
            tol,
        )
    }
}

pub fn km_density(v: f64, x: f64) -> Result<f64> {
    Ok(KMDistribution::new(v)?.density(x))
}

pub fn km_cdf(v: f64, x: f64) -> Result<f64> {
    KMDistribution::new(v)?.cdf(x)
}

/// Moment `∫ x^k dμ_KM(v)`: 1 for `k = 0`, 0 for odd `k`, and
/// `Σ_{j=1}^{k/2} C(k/2-1, k/2-j) v^j (v-1)^{k/2-j}` otherwise.
pub fn km_moment(v: f64, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k % 2 == 1 {
        return 0.0;
    }
    let h = (k / 2) as u64;
    (1..=h)
        .map(|j| {
            let c = catalan_triangle(h - 1, h - j).expect("moment order within table range") as f64;
            c * v.powi(j as i32) * (v - 1.0).powi((h - j) as i32)
        })
        .sum()
}

/// Exact rational version of [`km_moment`].
pub fn km_moment_exact(v: &BigRational, k: u32) -> Result<BigRational> {
    if k == 0 {
        return Ok(BigRational::one());
    }
    if k % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let h = (k / 2) as u64;
    let vm1 = v - BigRational::one();
    let mut acc = BigRational::zero();
    for j in 1..=h {
        let c = BigRational::from_integer(BigInt::from(catalan_triangle(h - 1, h - j)?));
        acc += c * pow(v, j) * pow(&vm1, h - j);
    }
    Ok(acc)
}

fn pow(x: &BigRational, e: u64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

// ---- exact integer sequences ----

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

/// `binom(n, k)` in checked 128-bit arithmetic.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| overflow("binomial"))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// Catalan number `C_s = binom(2s, s) / (s + 1)`.
pub fn catalan_number(s: u64) -> Result<u128> {
    let b = binomial(2 * s, s).map_err(|_| overflow(&format!("Catalan number C_{s}")))?;
    Ok(b / (s as u128 + 1))
}

/// Catalan's triangle `C(n, k) = (n+k)!(n-k+1) / (k!(n+1)!)`.
pub fn catalan_triangle(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Err(invalid(format!("Catalan triangle needs k <= n, got ({n}, {k})")));
    }
    // (n+k)! / (k! n!) · (n-k+1) / (n+1)
    let b = binomial(n + k, k)?;
    let num = b
        .checked_mul((n - k + 1) as u128)
        .ok_or_else(|| overflow("Catalan triangle"))?;
    debug_assert_eq!(num % (n as u128 + 1), 0);
    Ok(num / (n as u128 + 1))
}

/// Borel's triangle `B(n, k) = Σ_{j=k}^{n} binom(j, k) C(n, j)`.
pub fn borel_triangle(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Err(invalid(format!("Borel triangle needs k <= n, got ({n}, {k})")));
    }
    let mut acc: u128 = 0;
    for j in k..=n {
        let term = binomial(j, k)?
            .checked_mul(catalan_triangle(n, j)?)
            .ok_or_else(|| overflow("Borel triangle"))?;
        acc = acc.checked_add(term).ok_or_else(|| overflow("Borel triangle"))?;
    }
    Ok(acc)
}

/// Rows `0..=n_max` of Catalan's triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalanTable {
    pub rows: Vec<Vec<u128>>,
}

impl CatalanTable {
    pub fn new(n_max: u64) -> Result<Self> {
        let rows = (0..=n_max)
            .map(|n| (0..=n).map(|k| catalan_triangle(n, k)).collect())
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    pub fn get(&self, n: usize, k: usize) -> Option<u128> {
        self.rows.get(n)?.get(k).copied()
    }
}

/// Rows `0..=n_max` of Borel's triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorelTable {
    pub rows: Vec<Vec<u128>>,
}

impl BorelTable {
    pub fn new(n_max: u64) -> Result<Self> {
        let rows = (0..=n_max)
            .map(|n| (0..=n).map(|k| borel_triangle(n, k)).collect())
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    pub fn get(&self, n: usize, k: usize) -> Option<u128> {
        self.rows.get(n)?.get(k).copied()
    }
}

/// Signed Borel coefficient `(-1)^{t-k/2-1} B(k/2-1, t-k/2-1)`: the limit of
/// the `p^t` coefficient of `n^{-(k/2+1)} E tr(X^k)`. Zero off the range
/// `k/2+1 <= t <= k` and for odd `k`.
pub fn signed_borel(k: u64, t: u64) -> Result<i128> {
    if k == 0 || k % 2 == 1 {
        return Ok(0);
    }
    let h = k / 2;
    if t < h + 1 || t > k {
        return Ok(0);
    }
    let idx = t - h - 1;
    let b = borel_triangle(h - 1, idx)?;
    let b = i128::try_from(b).map_err(|_| overflow("signed Borel coefficient"))?;
    Ok(if idx % 2 == 0 { b } else { -b })
}

/// Map `t ↦ coefficient of p^t` for `t = 1..=k`.
pub fn limiting_trace_coefficients(k: u64) -> Result<BTreeMap<u64, i128>> {
    if k == 0 {
        return Err(invalid("moment order k must be >= 1"));
    }
    (1..=k).map(|t| Ok((t, signed_borel(k, t)?))).collect()
}

/// Compares `p^{k+1}·m_k(1/p)` with `Σ_t coeff_t p^t` at a single rational `p`.
pub fn moment_forms_agree_at(k: u64, p: &BigRational) -> Result<bool> {
    if p.is_zero() || p.is_negative() {
        return Err(invalid("p must be positive"));
    }
    let v = p.recip();
    let lhs = pow(p, k + 1) * km_moment_exact(&v, k as u32)?;
    let mut rhs = BigRational::zero();
    for (t, c) in limiting_trace_coefficients(k)? {
        rhs += BigRational::from_integer(BigInt::from(c)) * pow(p, t);
    }
    Ok(lhs == rhs)
}

/// Checks the two moment forms agree as polynomials in `p` by exact evaluation
/// at `k + 2` distinct points `p = 1/2, 1/3, …` (enough for degree `k + 1`).
pub fn moment_form_equivalence(k: u64) -> Result<bool> {
    for i in 0..(k + 2) {
        let p = BigRational::new(BigInt::one(), BigInt::from(i + 2));
        if !moment_forms_agree_at(k, &p)? {
            return Ok(false);
        }
    }
    Ok(true)
}
