//! Iterative deterministic sampling on the circle.
//!
//! Each iteration draws a random base orientation `φ₀`, projects density and
//! samples onto `N` symmetric directions `φ = π(n-1)/N + φ₀`, matches the
//! projected cumulatives, backprojects the 1-D steps, and moves every
//! sample by the averaged step scaled with an exponentially decaying gain.
//! Samples are pulled back onto the circle through their angle.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::density::CircularDensity;
use crate::error::{Error, Result};
use crate::metrics;
use crate::mixture::DiracMixture;
use crate::projection::{backproject_step, project_samples, Direction, ProjectionMode, UnivariateProjection};
use crate::rng::SplitMix64;
use crate::univariate::UnivariateSampler;

const EARLY_STOP_THRESHOLD: f64 = 1e-10;
const EARLY_STOP_PATIENCE: usize = 5;
const COINCIDENT_OFFSET: f64 = 1e-9;
/// Grid resolution of the optional per-iteration Wasserstein trace.
pub const TRACE_RESOLUTION: usize = 3600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Number of samples `L`.
    pub count: usize,
    /// Iterations `M`.
    pub iterations: usize,
    /// Projections per iteration `N`.
    pub projections: usize,
    /// Per-iteration gain factor `λ₀`.
    pub decay: f64,
    /// Uniformly spaced evaluation points per projection.
    pub fixed_points: usize,
    pub mode: ProjectionMode,
    pub seed: u64,
    /// Use the current samples as extra evaluation points.
    pub adaptive_points: bool,
    /// Bracket density discontinuities with evaluation points.
    pub breakpoints: bool,
    /// Stop once the mean step stays below 1e-10 for 5 iterations.
    pub early_stop: bool,
    /// Record the circular Wasserstein distance after every iteration.
    pub trace_metric: bool,
    /// Added to every initial angle and every `φ₀` draw. Running a density
    /// rotated by `φ` with offset `φ` rotates the result by `φ`.
    pub angle_offset: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            count: 15,
            iterations: 200,
            projections: 2,
            decay: 0.99,
            fixed_points: 30,
            mode: ProjectionMode::Orthographic,
            seed: 0,
            adaptive_points: true,
            breakpoints: true,
            early_stop: false,
            trace_metric: false,
            angle_offset: 0.0,
        }
    }
}

impl SamplerConfig {
    pub fn new(count: usize) -> Self {
        SamplerConfig {
            count,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::Config("count must be >= 1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        if self.projections < 1 {
            return Err(Error::Config("projections must be >= 1".into()));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::Config(format!("decay must lie in (0, 1], got {}", self.decay)));
        }
        if self.fixed_points < 2 {
            return Err(Error::Config("fixed-points must be >= 2".into()));
        }
        if !self.angle_offset.is_finite() {
            return Err(Error::Config("angle offset must be finite".into()));
        }
        Ok(())
    }

    fn univariate(&self) -> UnivariateSampler {
        UnivariateSampler {
            fixed_points: self.fixed_points,
            adaptive: self.adaptive_points,
            breakpoints: self.breakpoints,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub lambda: f64,
    /// Mean norm of the applied planar steps `λ·Δx̂ᵢ/N`.
    pub mean_step_norm: f64,
    pub wasserstein: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Quantile targets outside the cumulative range, summed over projections.
    pub clamped_targets: usize,
    /// Updates that landed on the origin and were skipped.
    pub degenerate_updates: usize,
}

#[derive(Debug, Clone)]
pub struct SamplingRun {
    pub samples: DiracMixture,
    pub trace: ConvergenceTrace,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub samples: DiracMixture,
    pub mean_step_norm: f64,
    pub diagnostics: Diagnostics,
}

/// `count` angles uniform on `[0, 2π)` from a seeded generator.
pub fn init_samples(count: usize, seed: u64) -> DiracMixture {
    let mut rng = SplitMix64::new(seed);
    let angles = initial_angles(&mut rng, count, 0.0);
    DiracMixture::from_unit_vectors_unchecked(angles.iter().map(|&a| Angle::new(a).unit_vector()).collect())
}

fn initial_angles(rng: &mut SplitMix64, count: usize, offset: f64) -> Vec<f64> {
    (0..count).map(|_| TAU * rng.next_f64() + offset).collect()
}

/// Nudges exactly coincident samples apart by alternating `±1e-9` rad so
/// that every projection has a strict order.
pub fn separate_coincident(samples: &DiracMixture) -> DiracMixture {
    let angles = samples.angles();
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]).then(i.cmp(&j)));
    let mut out = angles.clone();
    let mut changed = false;
    let mut run = 0usize;
    for w in 1..order.len() {
        if angles[order[w]] == angles[order[w - 1]] {
            run += 1;
            let magnitude = run.div_ceil(2) as f64 * COINCIDENT_OFFSET;
            let sign = if run % 2 == 1 { 1.0 } else { -1.0 };
            out[order[w]] += sign * magnitude;
            changed = true;
        } else {
            run = 0;
        }
    }
    if !changed {
        return samples.clone();
    }
    DiracMixture::from_unit_vectors_unchecked(out.iter().map(|&a| Angle::new(a).unit_vector()).collect())
}

/// Directions used in one iteration: `π·n/N + φ₀` for `n = 0..N`.
pub fn projection_angles(projections: usize, phi0: f64) -> Vec<f64> {
    (0..projections)
        .map(|n| PI * n as f64 / projections as f64 + phi0)
        .collect()
}

/// One update of all samples with gain `lambda` and base orientation `phi0`.
pub fn iteration_step(
    samples: &DiracMixture,
    density: &CircularDensity,
    config: &SamplerConfig,
    lambda: f64,
    phi0: f64,
) -> StepOutcome {
    let sampler = config.univariate();
    let mode = config.mode;
    let points = samples.samples();

    // independent per projection; reduced below in fixed order
    let contributions: Vec<(Vec<[f64; 2]>, usize)> = projection_angles(config.projections, phi0)
        .into_par_iter()
        .map(|phi| {
            let dir = Direction::from_angle(phi);
            let projection = UnivariateProjection::new(density, dir, mode);
            let r = project_samples(samples, dir, mode);
            let coords: Vec<f64> = r.iter().map(|&x| projection.to_coordinate(x)).collect();
            let matching = sampler.matching(&projection.quadrature(), &coords);
            let steps = matching
                .locations
                .iter()
                .zip(&r)
                .zip(points)
                .map(|((&loc, &ri), &x)| {
                    let delta = projection.from_coordinate(loc) - ri;
                    backproject_step(delta, dir, mode, x)
                })
                .collect();
            (steps, matching.clamped)
        })
        .collect();

    let mut diagnostics = Diagnostics::default();
    let mut total = vec![[0.0f64; 2]; points.len()];
    for (steps, clamped) in &contributions {
        diagnostics.clamped_targets += clamped;
        for (acc, s) in total.iter_mut().zip(steps) {
            acc[0] += s[0];
            acc[1] += s[1];
        }
    }

    let gain = lambda / config.projections as f64;
    let mut norm_sum = 0.0;
    let updated = points
        .iter()
        .zip(&total)
        .map(|(x, d)| {
            let step = [gain * d[0], gain * d[1]];
            norm_sum += step[0].hypot(step[1]);
            let moved = [x[0] + step[0], x[1] + step[1]];
            if moved[0] == 0.0 && moved[1] == 0.0 {
                diagnostics.degenerate_updates += 1;
                *x
            } else {
                Angle::of_vector(moved).unit_vector()
            }
        })
        .collect();

    StepOutcome {
        samples: DiracMixture::from_unit_vectors_unchecked(updated),
        mean_step_norm: norm_sum / points.len() as f64,
        diagnostics,
    }
}

/// Runs the full sampler from seeded uniform initial samples.
pub fn sample_circle(density: &CircularDensity, config: &SamplerConfig) -> Result<SamplingRun> {
    config.validate()?;
    let mut rng = SplitMix64::new(config.seed);
    let angles = initial_angles(&mut rng, config.count, config.angle_offset);
    let initial = DiracMixture::from_unit_vectors_unchecked(
        angles.iter().map(|&a| Angle::new(a).unit_vector()).collect(),
    );
    run(density, config, initial, rng)
}

/// Runs the sampler from user-supplied initial samples. The generator is
/// still seeded from `config.seed` for the per-iteration orientations.
pub fn sample_circle_from(
    density: &CircularDensity,
    config: &SamplerConfig,
    initial: DiracMixture,
) -> Result<SamplingRun> {
    config.validate()?;
    if initial.len() != config.count {
        return Err(Error::Config(format!(
            "{} initial samples for count {}",
            initial.len(),
            config.count
        )));
    }
    run(density, config, initial, SplitMix64::new(config.seed))
}

fn run(
    density: &CircularDensity,
    config: &SamplerConfig,
    initial: DiracMixture,
    mut rng: SplitMix64,
) -> Result<SamplingRun> {
    let mut samples = separate_coincident(&initial);
    let mut trace = ConvergenceTrace::default();
    let mut diagnostics = Diagnostics::default();
    let mut lambda = 1.0;
    let mut quiet = 0;
    for m in 1..=config.iterations {
        let phi0 = PI * rng.next_f64() + config.angle_offset;
        // the gain decays before it is applied, so iteration m uses λ₀^m
        lambda *= config.decay;
        let outcome = iteration_step(&samples, density, config, lambda, phi0);
        samples = outcome.samples;
        diagnostics.clamped_targets += outcome.diagnostics.clamped_targets;
        diagnostics.degenerate_updates += outcome.diagnostics.degenerate_updates;
        let wasserstein = if config.trace_metric {
            let resolution = TRACE_RESOLUTION.max(10 * config.count);
            Some(metrics::circular_wasserstein(&samples, density, resolution)?)
        } else {
            None
        };
        trace.records.push(IterationRecord {
            iteration: m,
            lambda,
            mean_step_norm: outcome.mean_step_norm,
            wasserstein,
        });
        if config.early_stop {
            quiet = if outcome.mean_step_norm < EARLY_STOP_THRESHOLD { quiet + 1 } else { 0 };
            if quiet >= EARLY_STOP_PATIENCE {
                break;
            }
        }
    }
    Ok(SamplingRun {
        samples,
        trace,
        diagnostics,
    })
}
