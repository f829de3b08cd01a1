//! Modified Bessel function of the first kind, order zero.

const SERIES_LIMIT: f64 = 50.0;

/// Exponentially scaled `I₀(x)·e^{-x}` for `x ≥ 0`.
///
/// Power series up to `x = 50`, asymptotic expansion above, where the
/// series would need to carry values near `e^{x}`.
pub fn i0e(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        i0_series(x) * (-x).exp()
    } else {
        i0e_asymptotic(x)
    }
}

/// `ln I₀(x)`, finite for all finite `x`.
pub fn ln_i0(x: f64) -> f64 {
    let x = x.abs();
    i0e(x).ln() + x
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

// I₀(x) ~ e^x / sqrt(2πx) · Σ_k ((2k-1)!!)² / (k! (8x)^k)
fn i0e_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (k as f64 * 8.0 * x);
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}
