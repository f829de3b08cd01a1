use crate::angle::Angle;
use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-12;

/// `L` equally weighted point masses on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMixture {
    samples: Vec<[f64; 2]>,
}

impl DiracMixture {
    /// Builds a mixture from unit vectors; rejects empty input and
    /// vectors off the circle.
    pub fn new(samples: Vec<[f64; 2]>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Format("a Dirac mixture needs at least one sample".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            let norm = s[0].hypot(s[1]);
            if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
                return Err(Error::Format(format!("sample {i} has norm {norm}, expected 1")));
            }
        }
        Ok(DiracMixture { samples })
    }

    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&a| Angle::new(a).unit_vector()).collect())
    }

    pub(crate) fn from_unit_vectors_unchecked(samples: Vec<[f64; 2]>) -> Self {
        DiracMixture { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[[f64; 2]] {
        &self.samples
    }

    /// Sample angles in `[0, 2π)`.
    pub fn angles(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| Angle::of_vector(s).radians()).collect()
    }

    /// Rotates every sample counterclockwise by `phi`.
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        DiracMixture {
            samples: self
                .samples
                .iter()
                .map(|v| [c * v[0] - s * v[1], s * v[0] + c * v[1]])
                .collect(),
        }
    }

    /// Largest deviation of any sample norm from one.
    pub fn max_norm_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s[0].hypot(s[1]) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
