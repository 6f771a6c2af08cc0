//! Combinatorial kernels: exact and log-space binomials, shifted factorials,
//! Krawtchouk polynomials and the binary entropy function.

mod log_value;

pub use log_value::{log_sum_exp, LogValue, Sign};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Slack allowed on the argument of [`binary_entropy`] before it is rejected.
pub const ENTROPY_ARG_TOL: f64 = 1e-12;

/// `C(n, k)` as an exact integer; zero outside `0 <= k <= n`.
pub fn binomial_exact(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    // acc * (n - k + j) / j stays integral at every step.
    for j in 1..=k {
        acc *= n - k + j;
        acc /= j;
    }
    acc
}

/// Natural log of a big integer. `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        if let Some(v) = x.to_f64() {
            return v.ln();
        }
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit prefix fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

// Stirling correction ln Γ(x+1) - [x ln x - x + ln(2πx)/2], valid for x >= 30.
fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))
}

/// `ln C(n, k)` in floating point.
///
/// Short products are summed exactly term by term; otherwise the log-gamma
/// difference is taken through its Stirling form, grouped so that the large
/// `n ln n` pieces cancel analytically rather than numerically.
pub fn ln_binomial(n: u64, k: i64) -> Result<f64> {
    if k < 0 || k as u64 > n {
        return domain(format!("ln_binomial: k={k} outside 0..={n}"));
    }
    let k = k as u64;
    let m = k.min(n - k);
    if m == 0 {
        return Ok(0.0);
    }
    if m <= 30 {
        let base = (n - m) as f64;
        return Ok((1..=m).map(|j| (base / j as f64).ln_1p()).sum());
    }
    let (nf, kf, lf) = (n as f64, k as f64, (n - k) as f64);
    let main = kf * (nf / kf).ln() - lf * (-kf / nf).ln_1p();
    let half = 0.5 * (nf / (2.0 * std::f64::consts::PI * kf * lf)).ln();
    Ok(main + half + stirling_tail(nf) - stirling_tail(kf) - stirling_tail(lf))
}

/// Infallible `ln C(n, k)` that returns `-inf` outside the support.
pub(crate) fn ln_binomial_or_neg_inf(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        f64::NEG_INFINITY
    } else {
        ln_binomial(n as u64, k).expect("range checked")
    }
}

/// Shifted factorial `(a)_j = a (a+1) ... (a+j-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, t| acc * (a + t as f64))
}

fn check_krawtchouk_args(i: u32, x: u32, q: u32, d: u32) -> Result<()> {
    if q < 2 {
        return domain(format!("krawtchouk: q={q} must be at least 2"));
    }
    if d == 0 || i > d || x > d {
        return domain(format!("krawtchouk: need 0 <= i, x <= d with d >= 1 (i={i}, x={x}, d={d})"));
    }
    Ok(())
}

/// Exact value of the hypergeometric sum
/// `sum_j (-i)_j (-x)_j / ((-d)_j j!) (q/(q-1))^j`.
///
/// The partial terms reach far beyond the final value for large `d` and `q`,
/// so the terms are accumulated as rationals and rounded once by the caller.
pub(crate) fn krawtchouk_exact(i: u32, x: u32, q: u32, d: u32) -> Result<BigRational> {
    check_krawtchouk_args(i, x, q, d)?;
    let ratio = BigRational::new(BigInt::from(q), BigInt::from(q - 1));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for j in 0..i as i64 {
        let num = BigInt::from(j - i as i64) * BigInt::from(j - x as i64);
        let den = BigInt::from(j - d as i64) * BigInt::from(j + 1);
        if num.is_zero() {
            break;
        }
        term = term * BigRational::new(num, den) * &ratio;
        sum += &term;
    }
    Ok(sum)
}

/// Krawtchouk polynomial `K_i(x; (q-1)/q, d)` for integer argument `x`.
pub fn krawtchouk(i: u32, x: u32, q: u32, d: u32) -> Result<f64> {
    let exact = krawtchouk_exact(i, x, q, d)?;
    Ok(rational_to_f64(&exact))
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to the ratio of logs for magnitudes beyond f64.
    let sign = if r.numer() < &BigInt::zero() { -1.0 } else { 1.0 };
    let ln = ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude());
    sign * ln.exp()
}

/// Binary entropy `s(x) = -x ln x - (1-x) ln(1-x)` in nats.
///
/// Arguments within [`ENTROPY_ARG_TOL`] of `[0, 1]` are clamped.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-ENTROPY_ARG_TOL..=1.0 + ENTROPY_ARG_TOL).contains(&x) {
        return domain(format!("binary_entropy: argument {x} outside [0, 1]"));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(binary_entropy_pair(x, 1.0 - x))
}

/// `s(x)` given both `x` and its complement `y = 1 - x`, each carried to full
/// relative precision. Lets callers near `x = 1` avoid forming `1 - x`.
pub fn binary_entropy_pair(x: f64, y: f64) -> f64 {
    let x = x.max(0.0);
    let y = y.max(0.0);
    let mut s = 0.0;
    if x > 0.0 {
        let lx = if x < 0.5 { x.ln() } else { (-y).ln_1p() };
        s -= x * lx;
    }
    if y > 0.0 {
        let ly = if y < 0.5 { y.ln() } else { (-x).ln_1p() };
        s -= y * ly;
    }
    s
}
