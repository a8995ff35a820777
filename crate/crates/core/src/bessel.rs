//! Spherical Bessel functions of the first kind and their zeros.

use std::f64::consts::PI;

/// `j_ℓ(x)` for `x ≥ 0`.
pub fn spherical_jn(l: usize, x: f64) -> f64 {
    let x = x.abs();
    if x < 1.0 || x < l as f64 {
        return series(l, x);
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if l == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for m in 1..l {
        let next = (2 * m + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn series(l: usize, x: f64) -> f64 {
    let mut lead = 1.0;
    for m in 0..l {
        lead *= x / (2 * m + 3) as f64;
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..200 {
        term *= q / ((k + 1) as f64 * (2 * l + 2 * k + 3) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// First `count` positive zeros of `j_ℓ`.
///
/// Zeros of consecutive orders interlace, so each zero of `j_ℓ` is bracketed
/// by two consecutive zeros of `j_{ℓ-1}`, starting from `j_0` with zeros `kπ`.
pub fn spherical_jn_zeros(l: usize, count: usize) -> Vec<f64> {
    let mut zeros: Vec<f64> = (1..=count + l).map(|k| k as f64 * PI).collect();
    for order in 1..=l {
        let needed = count + l - order;
        zeros = (0..needed).map(|k| bisect(order, zeros[k], zeros[k + 1])).collect();
    }
    zeros.truncate(count);
    zeros
}

fn bisect(l: usize, mut a: f64, mut b: f64) -> f64 {
    let mut fa = spherical_jn(l, a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = spherical_jn(l, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
