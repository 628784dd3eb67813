//! Integer-order Bessel functions of the first kind.

use super::ddouble::DoubleDouble;
use crate::error::{Error, Result};

/// Below this |x| the ascending series is used; above it, Miller's backward recurrence.
const SERIES_LIMIT: f64 = 12.0;

/// J_n(x) for any integer order and finite x.
pub fn bessel_j(order: i32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "bessel_j argument must be finite, got {x}"
        )));
    }
    Ok(jn(order, x))
}

/// Unchecked J_n(x); returns NaN for non-finite x.
pub fn jn(order: i32, x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let n = order.unsigned_abs();
    let mut sign = if order < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
    if x < 0.0 && n % 2 == 1 {
        sign = -sign;
    }
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        series(n, ax)
    } else {
        miller(n, ax)
    };
    sign * v
}

/// x-derivative J_n'(x) = (J_{n−1}(x) − J_{n+1}(x))/2.
pub fn jn_prime(order: i32, x: f64) -> f64 {
    0.5 * (jn(order - 1, x) - jn(order + 1, x))
}

/// The s-th positive zero (s ≥ 1) of J_n, found by bracketing and bisection.
pub fn bessel_j_zero(order: i32, s: u32) -> Result<f64> {
    if s == 0 {
        return Err(Error::domain("zero index starts at 1"));
    }
    let n = order.unsigned_abs() as i32;
    let step = 0.1;
    let mut count = 0;
    let mut a = if n == 0 {
        1e-3
    } else {
        f64::from(n).max(1e-3) * 0.5 + 1e-3
    };
    let mut fa = jn(n, a);
    loop {
        let b = a + step;
        let fb = jn(n, b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            count += 1;
            if count == s {
                return Ok(bisect(|x| jn(n, x), a, b));
            }
        }
        a = b;
        fa = fb;
        if a > 1e5 {
            return Err(Error::domain("zero index too large"));
        }
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// The pair (J_n(x), J_{n−1}(x)).
pub fn jn_pair(order: i32, x: f64) -> (f64, f64) {
    (jn(order, x), jn(order - 1, x))
}

fn series(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut lead = 1.0;
    for i in 1..=n {
        lead *= half / f64::from(i);
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    let nf = f64::from(n);
    for m in 1..200u32 {
        let mf = f64::from(m);
        term = (-term).mul_f64(q).div_f64(mf * (mf + nf));
        sum = sum + term;
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    lead * sum.to_f64()
}

fn miller(n: u32, x: f64) -> f64 {
    let top = f64::from(n).max(x.ceil());
    let mut m = (top + 30.0 + (50.0 * top).sqrt()) as u32;
    m += m % 2;
    let two_over_x = 2.0 / x;
    let mut jp1 = 0.0f64;
    let mut j = 1e-30f64;
    let mut sum = 0.0f64;
    let mut ans = 0.0f64;
    for k in (1..=m).rev() {
        let jm1 = f64::from(k) * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        let order = k - 1;
        if order == n {
            ans = j;
        }
        if order > 0 && order % 2 == 0 {
            sum += 2.0 * j;
        }
        if j.abs() > 1e200 {
            j *= 1e-200;
            jp1 *= 1e-200;
            ans *= 1e-200;
            sum *= 1e-200;
        }
    }
    sum += j;
    ans / sum
}
