//! One-dimensional projections of circular densities and sample sets.
//!
//! Two projections are supported. The exponential map cuts the circle open
//! at the direction `u` and unrolls it onto `[0, 2π]`. The orthographic
//! projection takes `r = uᵀx` and yields the marginal on `[-1, 1]`, whose
//! density carries integrable `1/sqrt(1 - r²)` poles at both ends.
//!
//! For quadrature the orthographic marginal is handled in the arc
//! coordinate `s = asin(r)` on `[-π/2, π/2]`, where the density
//! `f(r)·sqrt(1 - r²)` stays bounded. CDF values are invariant under this
//! monotone change of variable, so quantiles found in `s` map back to `r`
//! through `r = sin(s)`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angle::{wrap_pi, wrap_tau, Angle};
use crate::density::CircularDensity;
use crate::error::{Error, Result};
use crate::mixture::DiracMixture;
use crate::univariate::{build_evaluation_points, cumtrapz, Density1d};

/// Orthographic evaluation points are kept this far inside `[-1, 1]`.
pub const ORTHOGRAPHIC_EPSILON: f64 = 1e-6;
/// Upper bound on reported orthographic density values.
pub const DENSITY_CAP: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ProjectionMode {
    #[default]
    #[serde(rename = "orthographic")]
    Orthographic,
    #[serde(rename = "expmap")]
    ExponentialMap,
}

impl ProjectionMode {
    pub fn support(self) -> (f64, f64) {
        match self {
            ProjectionMode::Orthographic => (-1.0, 1.0),
            ProjectionMode::ExponentialMap => (0.0, TAU),
        }
    }
}

impl fmt::Display for ProjectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProjectionMode::Orthographic => "orthographic",
            ProjectionMode::ExponentialMap => "expmap",
        })
    }
}

impl FromStr for ProjectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthographic" => Ok(ProjectionMode::Orthographic),
            "expmap" => Ok(ProjectionMode::ExponentialMap),
            other => Err(Error::param(
                "mode",
                format!("expected `orthographic` or `expmap`, got `{other}`"),
            )),
        }
    }
}

/// A unit vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    u: [f64; 2],
    angle: f64,
}

impl Direction {
    pub fn from_angle(phi: f64) -> Self {
        let angle = Angle::new(phi);
        Direction {
            u: angle.unit_vector(),
            angle: angle.radians(),
        }
    }

    pub fn new(u: [f64; 2]) -> Result<Self> {
        let norm = u[0].hypot(u[1]);
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::param("direction", format!("norm is {norm}, expected 1")));
        }
        Ok(Direction {
            u,
            angle: Angle::of_vector(u).radians(),
        })
    }

    pub fn vector(&self) -> [f64; 2] {
        self.u
    }

    /// `atan2(u₂, u₁)` in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// The marginal of a circular density along a direction.
#[derive(Debug, Clone, Copy)]
pub struct UnivariateProjection<'a> {
    density: &'a CircularDensity,
    direction: Direction,
    mode: ProjectionMode,
}

impl<'a> UnivariateProjection<'a> {
    pub fn new(density: &'a CircularDensity, direction: Direction, mode: ProjectionMode) -> Self {
        UnivariateProjection {
            density,
            direction,
            mode,
        }
    }

    pub fn mode(&self) -> ProjectionMode {
        self.mode
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn support(&self) -> (f64, f64) {
        self.mode.support()
    }

    /// `f(r|u)`. Zero outside the support. Orthographic evaluation clamps
    /// `r` into `[-1+ε, 1-ε]` and caps the value at [`DENSITY_CAP`].
    pub fn pdf(&self, r: f64) -> f64 {
        let base = self.direction.angle;
        match self.mode {
            ProjectionMode::ExponentialMap => {
                if (0.0..=TAU).contains(&r) {
                    self.density.pdf(r + base)
                } else {
                    0.0
                }
            }
            ProjectionMode::Orthographic => {
                if !(-1.0..=1.0).contains(&r) {
                    return 0.0;
                }
                let r = r.clamp(-1.0 + ORTHOGRAPHIC_EPSILON, 1.0 - ORTHOGRAPHIC_EPSILON);
                let alpha = r.acos();
                let jacobian = ((1.0 - r) * (1.0 + r)).sqrt();
                let value =
                    (self.density.pdf(base + alpha) + self.density.pdf(base - alpha)) / jacobian;
                value.min(DENSITY_CAP)
            }
        }
    }

    /// The projected density in its quadrature coordinate.
    pub fn quadrature(&self) -> QuadratureDensity<'a> {
        QuadratureDensity { projection: *self }
    }

    /// Maps a projected location `r` to the quadrature coordinate.
    pub fn to_coordinate(&self, r: f64) -> f64 {
        match self.mode {
            ProjectionMode::ExponentialMap => r.clamp(0.0, TAU),
            ProjectionMode::Orthographic => r.clamp(-1.0, 1.0).asin(),
        }
    }

    pub fn from_coordinate(&self, s: f64) -> f64 {
        match self.mode {
            ProjectionMode::ExponentialMap => s,
            ProjectionMode::Orthographic => s.sin(),
        }
    }

    /// Tabulates `f(r|u)` and the cumulative `F(r|u)` on `points`
    /// uniformly spaced locations spanning the support.
    pub fn table(&self, points: usize) -> Vec<ProjectionRow> {
        let points = points.max(2);
        let (lo, hi) = self.support();
        let rs: Vec<f64> = (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect();
        let q = self.quadrature();
        let coords: Vec<f64> = rs.iter().map(|&r| self.to_coordinate(r)).collect();
        let values: Vec<f64> = coords.iter().map(|&s| q.pdf(s)).collect();
        let cdf = cumtrapz(&coords, &values);
        rs.iter()
            .zip(cdf)
            .map(|(&r, cdf)| ProjectionRow {
                r,
                density: self.pdf(r),
                cdf,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionRow {
    pub r: f64,
    pub density: f64,
    pub cdf: f64,
}

/// A projection expressed in the coordinate used for cumulative matching:
/// `r` itself for the exponential map, `s = asin(r)` for orthographic.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureDensity<'a> {
    projection: UnivariateProjection<'a>,
}

impl Density1d for QuadratureDensity<'_> {
    fn support(&self) -> (f64, f64) {
        match self.projection.mode {
            ProjectionMode::ExponentialMap => (0.0, TAU),
            ProjectionMode::Orthographic => (-FRAC_PI_2, FRAC_PI_2),
        }
    }

    fn pdf(&self, s: f64) -> f64 {
        let p = &self.projection;
        // one-sided limits at the support ends, where a jump may sit
        let (lo, hi) = self.support();
        let eps = ENDPOINT_NUDGE * (hi - lo);
        let s = if s == lo { lo + eps } else if s == hi { hi - eps } else { s };
        match p.mode {
            ProjectionMode::ExponentialMap => p.pdf(s),
            ProjectionMode::Orthographic => {
                if !(-FRAC_PI_2..=FRAC_PI_2).contains(&s) {
                    return 0.0;
                }
                let alpha = FRAC_PI_2 - s;
                let base = p.direction.angle;
                p.density.pdf(base + alpha) + p.density.pdf(base - alpha)
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let p = &self.projection;
        let (lo, hi) = self.support();
        let mut out: Vec<f64> = p
            .density
            .breakpoints()
            .into_iter()
            .map(|b| match p.mode {
                ProjectionMode::ExponentialMap => wrap_tau(b - p.direction.angle),
                ProjectionMode::Orthographic => FRAC_PI_2 - wrap_pi(b - p.direction.angle).abs(),
            })
            .filter(|&x| x > lo && x < hi)
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// Uniform in `r` for both modes, mapped into the quadrature coordinate.
    fn fixed_points(&self, count: usize) -> Vec<f64> {
        let p = &self.projection;
        build_evaluation_points(p.support(), count, &[])
            .into_iter()
            .map(|r| p.to_coordinate(r))
            .collect()
    }
}

/// Relative inward offset used to evaluate the quadrature density at the
/// ends of its support.
const ENDPOINT_NUDGE: f64 = 1e-12;

/// Projects every sample: `uᵀx` (orthographic) or the angle measured
/// counterclockwise from `u` (exponential map).
pub fn project_samples(samples: &DiracMixture, dir: Direction, mode: ProjectionMode) -> Vec<f64> {
    samples
        .samples()
        .iter()
        .map(|&x| project_point(x, dir, mode))
        .collect()
}

pub fn project_point(x: [f64; 2], dir: Direction, mode: ProjectionMode) -> f64 {
    match mode {
        ProjectionMode::Orthographic => dir.u[0] * x[0] + dir.u[1] * x[1],
        ProjectionMode::ExponentialMap => wrap_tau(Angle::of_vector(x).radians() - dir.angle),
    }
}

/// Lifts a projected step back into the plane.
///
/// Orthographic steps move along `u`. Exponential-map steps are angular
/// and move along the counterclockwise tangent at the sample `at`.
pub fn backproject_step(delta: f64, dir: Direction, mode: ProjectionMode, at: [f64; 2]) -> [f64; 2] {
    match mode {
        ProjectionMode::Orthographic => [delta * dir.u[0], delta * dir.u[1]],
        ProjectionMode::ExponentialMap => {
            let norm = at[0].hypot(at[1]);
            [-delta * at[1] / norm, delta * at[0] / norm]
        }
    }
}
