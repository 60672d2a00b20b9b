//! Lattice trigonometric sums `P_i(x) = Σ cos(lx)/l^i`, `Q_i(x) = Σ sin(lx)/l^i`,
//! Bernoulli polynomials, and the kernel function `g` with its first two derivatives.
//!
//! Even-index `P` and odd-index `Q` have Bernoulli closed forms; the other parity is
//! summed directly with a rigorous tail bound `1/((i-1) L^(i-1))`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::f64::consts::PI;
use thiserror::Error;

const TWO_PI: f64 = 2.0 * PI;

/// Default absolute accuracy target for series evaluation.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Bernoulli polynomials are tabulated up to this degree (covers `g''` for n ≤ 48 plus slack).
pub const MAX_DEGREE: usize = 50;

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("series index {0} too small; absolute convergence needs i >= 2")]
    IndexTooSmall(i64),
    #[error("nonfinite input x")]
    NonfiniteInput,
    #[error("x = {0} outside the domain [0, 2*pi]")]
    OutOfDomain(f64),
    #[error("Bernoulli degree {0} exceeds table maximum {MAX_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("t = {0} outside [0, 1]")]
    ArgumentOutOfRange(f64),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("dimension {0} too small; kernel needs n >= 4")]
    DimensionTooSmall(usize),
}

/// Coefficient table of B_0 .. B_maxdeg, built once from the exact rational recurrence.
pub struct BernoulliTable {
    /// `coeffs[m][j]` = coefficient of `t^j` in `B_m(t)`, rendered to f64.
    coeffs: Vec<Vec<f64>>,
    /// Bernoulli numbers `B_m(0)` as f64 (for invariant checks and closed forms).
    numbers: Vec<f64>,
}

impl BernoulliTable {
    /// Builds B_0..B_maxdeg exactly: b_m = -1/(m+1) Σ_{j<m} C(m+1,j) b_j,
    /// B_m(t) = Σ_j C(m,j) b_{m-j} t^j.
    pub fn new(maxdeg: usize) -> Self {
        let mut numbers: Vec<BigRational> = Vec::with_capacity(maxdeg + 1);
        numbers.push(BigRational::one());
        for m in 1..=maxdeg {
            let mut acc = BigRational::zero();
            for (j, bj) in numbers.iter().enumerate() {
                acc += BigRational::from_integer(binomial(m + 1, j)) * bj;
            }
            let denom = BigRational::from_integer(BigInt::from(m as u64 + 1));
            numbers.push(-acc / denom);
        }

        let mut coeffs = Vec::with_capacity(maxdeg + 1);
        for m in 0..=maxdeg {
            let mut row: Vec<BigRational> = vec![BigRational::zero(); m + 1];
            for j in 0..=m {
                row[j] = BigRational::from_integer(binomial(m, j)) * &numbers[m - j];
            }
            // periodicity of the Fourier closed form: B_m(1) = B_m(0) for m >= 2
            if m >= 2 {
                let at_one: BigRational = row.iter().cloned().sum();
                assert_eq!(at_one, numbers[m], "exact Bernoulli recurrence violated");
            }
            coeffs.push(row.iter().map(rational_to_f64).collect());
        }
        let numbers_f64 = numbers.iter().map(rational_to_f64).collect();
        BernoulliTable { coeffs, numbers: numbers_f64 }
    }

    pub fn maxdeg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn number(&self, m: usize) -> Result<f64, SeriesError> {
        self.numbers.get(m).copied().ok_or(SeriesError::DegreeOutOfRange(m))
    }

    /// Horner evaluation of B_m(t) on [0, 1]. Uses B_m(1-t) = (-1)^m B_m(t) to keep
    /// t <= 1/2, where the expansion is best conditioned.
    pub fn eval(&self, m: usize, t: f64) -> Result<f64, SeriesError> {
        if m > self.maxdeg() {
            return Err(SeriesError::DegreeOutOfRange(m));
        }
        if !t.is_finite() {
            return Err(SeriesError::NonfiniteInput);
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(SeriesError::ArgumentOutOfRange(t));
        }
        let (tt, sign) = if t > 0.5 {
            (1.0 - t, if m % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            (t, 1.0)
        };
        let row = &self.coeffs[m];
        let mut acc = 0.0;
        for &c in row.iter().rev() {
            acc = acc * tt + c;
        }
        Ok(sign * acc)
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from((n - i) as u64);
        den *= BigInt::from((i + 1) as u64);
    }
    num / den
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // BigRational has no direct to_f64 through num's re-export in all versions;
    // go through a scaled integer division to keep full f64 precision.
    let num = r.numer();
    let den = r.denom();
    big_to_f64(num) / big_to_f64(den)
}

fn big_to_f64(x: &BigInt) -> f64 {
    let s = x.to_string();
    s.parse::<f64>().unwrap_or_else(|_| {
        let neg = x.is_negative();
        if neg {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

static TABLE: Lazy<BernoulliTable> = Lazy::new(|| BernoulliTable::new(MAX_DEGREE));

/// Shared table of Bernoulli polynomial coefficients to degree 50.
pub fn bernoulli_table() -> &'static BernoulliTable {
    &TABLE
}

/// B_m(t) from the shared table.
pub fn bernoulli_poly(m: usize, t: f64) -> Result<f64, SeriesError> {
    TABLE.eval(m, t)
}

fn check_args(i: i64, x: f64, tol: f64) -> Result<(), SeriesError> {
    if i < 2 {
        return Err(SeriesError::IndexTooSmall(i));
    }
    if !x.is_finite() {
        return Err(SeriesError::NonfiniteInput);
    }
    if !(0.0..=TWO_PI + 1e-9).contains(&x) {
        return Err(SeriesError::OutOfDomain(x));
    }
    if !(tol > 0.0) {
        return Err(SeriesError::BadTolerance(tol));
    }
    Ok(())
}

/// Number of terms so the integral tail bound 1/((i-1) L^(i-1)) drops below tol/2.
fn truncation_length(i: i64, tol: f64) -> u64 {
    let im1 = (i - 1) as f64;
    let l = (2.0 / (im1 * tol)).powf(1.0 / im1);
    (l.ceil() as u64).max(4)
}

/// Direct tail-bounded summation of Σ f(l·x)/l^i, ascending l, Kahan-compensated.
/// `cos_part` selects cos (true) or sin (false).
pub fn direct_sum(i: i64, x: f64, tol: f64, cos_part: bool) -> Result<f64, SeriesError> {
    check_args(i, x, tol)?;
    let terms = truncation_length(i, tol);
    let (c0, s0) = (x.cos(), x.sin());
    let (mut c, mut s) = (c0, s0);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for l in 1..=terms {
        let w = if cos_part { c } else { s };
        let term = w / (l as f64).powi(i as i32);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        // rotate e^(i l x) -> e^(i (l+1) x)
        let cn = c * c0 - s * s0;
        let sn = c * s0 + s * c0;
        c = cn;
        s = sn;
    }
    Ok(sum)
}

/// P_i(x) = Σ_{l>=1} cos(lx)/l^i with absolute error <= tol.
///
/// Even i uses the Bernoulli closed form
/// P_{2m}(x) = (-1)^(m-1) (2π)^{2m} / (2 (2m)!) · B_{2m}(x/2π);
/// odd i uses tail-bounded direct summation.
pub fn p_sum(i: i64, x: f64, tol: f64) -> Result<f64, SeriesError> {
    check_args(i, x, tol)?;
    if i % 2 == 0 {
        p_closed_form(i, x)
    } else {
        direct_sum(i, x, tol, true)
    }
}

/// Q_i(x) = Σ_{l>=1} sin(lx)/l^i with absolute error <= tol.
/// Odd i >= 3 uses the Bernoulli closed form; even i uses direct summation.
pub fn q_sum(i: i64, x: f64, tol: f64) -> Result<f64, SeriesError> {
    check_args(i, x, tol)?;
    if i % 2 == 1 {
        q_closed_form(i, x)
    } else {
        direct_sum(i, x, tol, false)
    }
}

/// Closed form for even index, exposed so the even path can be cross-checked
/// against `direct_sum` in tests.
pub fn p_closed_form(i: i64, x: f64) -> Result<f64, SeriesError> {
    debug_assert!(i % 2 == 0 && i >= 2);
    let m = (i / 2) as usize;
    let t = (x / TWO_PI).clamp(0.0, 1.0);
    let b = TABLE.eval(2 * m, t)?;
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * TWO_PI.powi(i as i32) / (2.0 * factorial(2 * m)) * b)
}

pub fn q_closed_form(i: i64, x: f64) -> Result<f64, SeriesError> {
    debug_assert!(i % 2 == 1 && i >= 3);
    let m = ((i - 1) / 2) as usize;
    let t = (x / TWO_PI).clamp(0.0, 1.0);
    let b = TABLE.eval(2 * m + 1, t)?;
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * TWO_PI.powi(i as i32) / (2.0 * factorial(2 * m + 1)) * b)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product::<f64>().max(1.0)
}

/// Evaluator for g(x) = Σ (1-cos(jx))/j^n with g' = Q_{n-1} and g'' = P_{n-2}.
#[derive(Debug, Clone, Copy)]
pub struct GKernel {
    n: usize,
    tol: f64,
}

impl GKernel {
    pub fn new(n: usize, tol: f64) -> Result<Self, SeriesError> {
        if n < 4 {
            return Err(SeriesError::DimensionTooSmall(n));
        }
        if !(tol > 0.0) {
            return Err(SeriesError::BadTolerance(tol));
        }
        Ok(GKernel { n, tol })
    }

    pub fn with_default_tol(n: usize) -> Result<Self, SeriesError> {
        GKernel::new(n, DEFAULT_TOL)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// g(x). For x below the cancellation threshold the defining series
    /// Σ 2 sin²(jx/2)/j^n is summed directly (all terms nonnegative), because
    /// P_n(0) - P_n(x) loses every significant digit once g(x) ~ tol.
    pub fn g(&self, x: f64) -> Result<f64, SeriesError> {
        self.check_x(x)?;
        if x < 0.05 {
            return self.g_small_x(x);
        }
        let n = self.n as i64;
        Ok(p_sum(n, 0.0, self.tol)? - p_sum(n, x, self.tol)?)
    }

    fn g_small_x(&self, x: f64) -> Result<f64, SeriesError> {
        let n = self.n as i64;
        // tail of Σ 2 sin²(jx/2)/j^n bounded by 2/((n-1) L^(n-1))
        let terms = {
            let im1 = (n - 1) as f64;
            ((4.0 / (im1 * self.tol)).powf(1.0 / im1).ceil() as u64).max(4)
        };
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for j in 1..=terms {
            let s = (0.5 * x * j as f64).sin();
            let term = 2.0 * s * s / (j as f64).powi(n as i32);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        Ok(sum)
    }

    pub fn g_prime(&self, x: f64) -> Result<f64, SeriesError> {
        self.check_x(x)?;
        q_sum(self.n as i64 - 1, x, self.tol)
    }

    pub fn g_second(&self, x: f64) -> Result<f64, SeriesError> {
        self.check_x(x)?;
        p_sum(self.n as i64 - 2, x, self.tol)
    }

    /// (g, g', g'') in one call.
    pub fn eval(&self, x: f64) -> Result<(f64, f64, f64), SeriesError> {
        Ok((self.g(x)?, self.g_prime(x)?, self.g_second(x)?))
    }

    fn check_x(&self, x: f64) -> Result<(), SeriesError> {
        if !x.is_finite() {
            return Err(SeriesError::NonfiniteInput);
        }
        if !(0.0..=PI + 1e-12).contains(&x) {
            return Err(SeriesError::OutOfDomain(x));
        }
        Ok(())
    }
}
