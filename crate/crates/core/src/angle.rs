use std::f64::consts::{PI, TAU};

/// An angle in radians, kept in the canonical range `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64) -> Self {
        Angle(wrap_tau(theta))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Angle of a planar vector, `atan2(y, x)` mapped to `[0, 2π)`.
    pub fn of_vector(v: [f64; 2]) -> Self {
        Angle::new(v[1].atan2(v[0]))
    }

    pub fn unit_vector(self) -> [f64; 2] {
        let (s, c) = self.0.sin_cos();
        [c, s]
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// Reduces `theta` modulo 2π into `[0, 2π)`.
pub fn wrap_tau(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces `theta` modulo 2π into `[-π, π)`.
pub fn wrap_pi(theta: f64) -> f64 {
    let r = wrap_tau(theta + PI) - PI;
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_range() {
        assert_eq!(Angle::new(0.0).radians(), 0.0);
        assert_eq!(Angle::new(TAU).radians(), 0.0);
        assert_eq!(Angle::new(-1e-300).radians(), 0.0);
        assert!((Angle::new(-PI / 2.0).radians() - 1.5 * PI).abs() < 1e-15);
        assert!((wrap_pi(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn vector_roundtrip() {
        let a = Angle::new(2.5);
        let b = Angle::of_vector(a.unit_vector());
        assert!((a.radians() - b.radians()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(theta in -1e4f64..1e4) {
            let once = Angle::new(theta).radians();
            prop_assert!((0.0..TAU).contains(&once));
            prop_assert_eq!(Angle::new(once).radians(), once);
            let p = wrap_pi(theta);
            prop_assert!((-PI..PI).contains(&p));
        }
    }
}
