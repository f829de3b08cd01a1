//! Quality measures between a Dirac mixture and a continuous reference.
//!
//! These are diagnostics only; the sampler never consumes them.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::density::CircularDensity;
use crate::error::{Error, Result};
use crate::mixture::DiracMixture;

/// Sub-intervals per bin when discretizing the reference density.
const BIN_SUBDIVISIONS: usize = 4;

/// `(1/L) Σ exp(i·n·θᵢ)`.
pub fn trig_moment_dm(samples: &DiracMixture, order: u32) -> Complex64 {
    let n = order as f64;
    let sum: Complex64 = samples
        .angles()
        .iter()
        .map(|&t| Complex64::from_polar(1.0, n * t))
        .sum();
    sum / samples.len() as f64
}

/// Periodic trapezoid of `∫ exp(i·n·θ) f(θ) dθ` on `grid_size` points.
pub fn trig_moment_continuous(density: &CircularDensity, order: u32, grid_size: usize) -> Result<Complex64> {
    if grid_size < 256 {
        return Err(Error::param("grid_size", format!("must be >= 256, got {grid_size}")));
    }
    let h = TAU / grid_size as f64;
    let n = order as f64;
    let sum: Complex64 = (0..grid_size)
        .map(|k| {
            let t = k as f64 * h;
            Complex64::from_polar(density.pdf(t), n * t)
        })
        .sum();
    Ok(sum * h)
}

/// Mean resultant length of a set of angles.
pub fn resultant_length(angles: &[f64]) -> f64 {
    let (s, c) = angles
        .iter()
        .fold((0.0, 0.0), |(s, c), t| (s + t.sin(), c + t.cos()));
    s.hypot(c) / angles.len() as f64
}

/// Circular standard deviation `sqrt(-2 ln R)`.
pub fn circular_std(angles: &[f64]) -> f64 {
    (-2.0 * resultant_length(angles).ln()).max(0.0).sqrt()
}

/// Mass of `density` in each of `resolution` equal bins starting at 0,
/// normalized to sum to one. Trapezoid per bin on a few sub-points plus
/// every jump or kink of the density, so narrow features are not missed.
pub fn discretize_density(density: &CircularDensity, resolution: usize) -> Vec<f64> {
    let h = TAU / resolution as f64;
    let sub = h / BIN_SUBDIVISIONS as f64;
    let features = density.features();
    let mut next = 0;
    let mut nodes = Vec::with_capacity(BIN_SUBDIVISIONS + 3);
    let mut mass: Vec<f64> = (0..resolution)
        .map(|k| {
            let start = k as f64 * h;
            let end = start + h;
            nodes.clear();
            nodes.extend((0..=BIN_SUBDIVISIONS).map(|j| start + j as f64 * sub));
            while next < features.len() && features[next] < end {
                if features[next] > start {
                    nodes.push(features[next]);
                }
                next += 1;
            }
            nodes.sort_by(f64::total_cmp);
            let mut m = 0.0;
            // one-sided limits at jumps: nudge the evaluation inward
            for w in nodes.windows(2) {
                let (a, b) = (w[0], w[1]);
                if b > a {
                    let eps = 1e-12 * (b - a).max(1.0);
                    m += 0.5 * (b - a) * (density.pdf(a + eps) + density.pdf(b - eps));
                }
            }
            m
        })
        .collect();
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|m| *m /= total);
    mass
}

/// Mass `1/L` of each sample assigned to the bin containing it.
pub fn discretize_samples(samples: &DiracMixture, resolution: usize) -> Vec<f64> {
    let h = TAU / resolution as f64;
    let w = 1.0 / samples.len() as f64;
    let mut mass = vec![0.0; resolution];
    for t in samples.angles() {
        let k = ((t / h) as usize).min(resolution - 1);
        mass[k] += w;
    }
    mass
}

/// Circular W₁ between two binned measures on the same uniform grid.
///
/// With `D` the running difference of the cumulatives, the distance is
/// `h · min_c Σ |D_k - c|`. Moving the cut point of the circle shifts `D`
/// by a constant, and the minimum over constants is attained at a median
/// of `D`.
pub fn circular_wasserstein_binned(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let h = TAU / a.len() as f64;
    let mut acc = 0.0;
    let diff: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            acc += x - y;
            acc
        })
        .collect();
    let mut sorted = diff.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    h * diff.iter().map(|d| (d - median).abs()).sum::<f64>()
}

/// Circular Wasserstein-1 distance between the mixture and the density on
/// a grid of `resolution` bins.
pub fn circular_wasserstein(samples: &DiracMixture, density: &CircularDensity, resolution: usize) -> Result<f64> {
    if resolution < 10 * samples.len() {
        return Err(Error::param(
            "resolution",
            format!("must be >= 10·L = {}, got {resolution}", 10 * samples.len()),
        ));
    }
    Ok(circular_wasserstein_binned(
        &discretize_samples(samples, resolution),
        &discretize_density(density, resolution),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensitySpec;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn bessel_series(order: u32, x: f64) -> f64 {
        // Σ (x/2)^{2k+n} / (k! (k+n)!)
        let mut term = (0.5 * x).powi(order as i32) / (1..=order).map(|k| k as f64).product::<f64>();
        let mut sum = 0.0f64;
        let mut k = 0.0;
        while term > 1e-18 * sum.max(1e-300) || k < 2.0 {
            sum += term;
            k += 1.0;
            term *= (0.5 * x).powi(2) / (k * (k + order as f64));
        }
        sum
    }

    // scan every cut offset directly
    fn scanned(a: &[f64], b: &[f64]) -> f64 {
        let h = TAU / a.len() as f64;
        let mut acc = 0.0;
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| { acc += x - y; acc }).collect();
        diff.iter()
            .map(|&c| h * diff.iter().map(|d| (d - c).abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn moment_examples() {
        let eq = DiracMixture::from_angles(&[0.0, PI / 2.0, PI, 1.5 * PI]).unwrap();
        assert!(trig_moment_dm(&eq, 1).norm() < 1e-15);
        let one = DiracMixture::from_angles(&[0.0]).unwrap();
        assert_eq!(trig_moment_dm(&one, 3), Complex64::new(1.0, 0.0));

        let u = CircularDensity::new(DensitySpec::Uniform).unwrap();
        assert!(trig_moment_continuous(&u, 1, 1024).unwrap().norm() < 1e-14);

        let (mu, kappa) = (0.8, 2.5);
        let vm = CircularDensity::new(DensitySpec::VonMises { mu, kappa }).unwrap();
        let m = trig_moment_continuous(&vm, 1, 4096).unwrap();
        let ratio = bessel_series(1, kappa) / bessel_series(0, kappa);
        assert!((m - Complex64::from_polar(ratio, mu)).norm() < 1e-8);

        let (mu, sigma) = (2.0, 0.7);
        let wn = CircularDensity::new(DensitySpec::WrappedNormal { mu, sigma }).unwrap();
        let m = trig_moment_continuous(&wn, 1, 4096).unwrap();
        assert!((m - Complex64::from_polar((-0.5 * sigma * sigma).exp(), mu)).norm() < 1e-8);
        assert!(trig_moment_continuous(&wn, 1, 100).is_err());
    }

    #[test]
    fn bessel_ratio_reference() {
        let r = bessel_series(1, 1.0) / bessel_series(0, 1.0);
        assert!((r - 0.4464).abs() < 1e-4);
    }

    #[test]
    fn equidistant_atoms_against_uniform() {
        let u = CircularDensity::new(DensitySpec::Uniform).unwrap();
        for l in [2usize, 5, 8] {
            let angles: Vec<f64> = (0..l).map(|k| 0.1 + TAU * k as f64 / l as f64).collect();
            let m = DiracMixture::from_angles(&angles).unwrap();
            let w = circular_wasserstein(&m, &u, 10_000).unwrap();
            // exact value for L equally spaced atoms is π/(2L)
            assert!((w - PI / (2.0 * l as f64)).abs() < 2e-3, "L={l}: {w}");
            assert!(w <= PI / l as f64 + TAU / 10_000.0);
        }
    }

    #[test]
    fn antipodal_pair_brute_force() {
        // discrete transport of uniform bin masses onto two antipodal atoms
        let res = 10_000;
        let h = TAU / res as f64;
        let mut cost = 0.0;
        for k in 0..res {
            let t = (k as f64 + 0.5) * h;
            let d0 = t.min(TAU - t);
            let d1 = (t - PI).abs();
            cost += d0.min(d1) / res as f64;
        }
        let m = DiracMixture::from_angles(&[0.0, PI]).unwrap();
        let u = CircularDensity::new(DensitySpec::Uniform).unwrap();
        let w = circular_wasserstein(&m, &u, res).unwrap();
        assert!((cost - PI / 4.0).abs() < 1e-3);
        assert!((w - cost).abs() < 0.01, "{w} vs {cost}");
    }

    #[test]
    fn coincident_spike_vanishes() {
        let theta0 = 2.0;
        let mut last = f64::INFINITY;
        for res in [100usize, 1000, 10_000] {
            let n = 64;
            let width = 1e-5;
            let mut thetas: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
            thetas.retain(|t| (t - theta0).abs() > 0.01);
            thetas.extend([theta0 - width, theta0, theta0 + width]);
            thetas.sort_by(f64::total_cmp);
            let values = thetas.iter().map(|&t| if t == theta0 { 1.0 } else { 0.0 }).collect();
            let d = CircularDensity::new(DensitySpec::Tabulated { thetas, values }).unwrap();
            let m = DiracMixture::from_angles(&[theta0]).unwrap();
            let w = circular_wasserstein(&m, &d, res).unwrap();
            // only binning error remains
            assert!(w.is_finite() && w <= TAU / res as f64, "res={res}: {w}");
            last = w;
        }
        assert!(last < 1e-3, "{last}");
    }

    #[test]
    fn resolution_precondition() {
        let u = CircularDensity::new(DensitySpec::Uniform).unwrap();
        let m = DiracMixture::from_angles(&[0.0, 1.0]).unwrap();
        assert!(circular_wasserstein(&m, &u, 19).is_err());
    }

    proptest! {
        #[test]
        fn median_matches_cut_scan(a in proptest::collection::vec(0.0..1.0f64, 40), b in proptest::collection::vec(0.0..1.0f64, 40)) {
            let sa: f64 = a.iter().sum();
            let sb: f64 = b.iter().sum();
            let a: Vec<f64> = a.iter().map(|x| x / sa).collect();
            let b: Vec<f64> = b.iter().map(|x| x / sb).collect();
            let fast = circular_wasserstein_binned(&a, &b);
            let slow = scanned(&a, &b);
            prop_assert!((fast - slow).abs() < 1e-12);
            prop_assert!(fast >= 0.0);
            prop_assert!(circular_wasserstein_binned(&a, &a) == 0.0);
        }

        #[test]
        fn rotation_invariant(shift in 0usize..360, angles in proptest::collection::vec(0.0..TAU, 1..10)) {
            let res = 360;
            let d = CircularDensity::new(DensitySpec::VonMises { mu: 1.0, kappa: 2.0 }).unwrap();
            let m = DiracMixture::from_angles(&angles).unwrap();
            let w = circular_wasserstein(&m, &d, res).unwrap();
            let phi = TAU * shift as f64 / res as f64;
            let w2 = circular_wasserstein(&m.rotated(phi), &d.rotated(phi), res).unwrap();
            // bin assignment of atoms can move by one bin
            prop_assert!((w - w2).abs() <= 2.0 * TAU / res as f64, "{} vs {}", w, w2);
        }
    }
}
