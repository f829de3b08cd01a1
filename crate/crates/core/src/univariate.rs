//! Deterministic sampling of a univariate density by matching cumulatives.
//!
//! The density is evaluated on a set of points made of a fixed uniform grid
//! plus the current sample locations, integrated with the composite
//! trapezoidal rule, and the resulting piecewise-quadratic CDF is inverted
//! at the midpoint quantiles `(2i-1)/(2L)`. Current samples are paired with
//! the inverted locations in sorted order, which is the 1-D optimal
//! transport assignment.

/// Abscissae closer than this are merged.
pub const DEDUP_TOLERANCE: f64 = 1e-14;

/// Half-width, relative to the support, of the bracket placed around a
/// density discontinuity.
const BREAKPOINT_BRACKET: f64 = 1e-9;

/// A density on a bounded interval of the real line.
pub trait Density1d {
    /// Closed interval outside which the density vanishes.
    fn support(&self) -> (f64, f64);

    fn pdf(&self, x: f64) -> f64;

    /// Interior locations where the density jumps.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// The `count` fixed evaluation points; uniform over the support unless
    /// overridden.
    fn fixed_points(&self, count: usize) -> Vec<f64> {
        build_evaluation_points(self.support(), count, &[])
    }
}

/// Sorted union of `fixed_count` uniformly spaced points spanning `support`
/// and the current samples (clamped into the support), with points closer
/// than [`DEDUP_TOLERANCE`] merged.
pub fn build_evaluation_points(support: (f64, f64), fixed_count: usize, samples: &[f64]) -> Vec<f64> {
    let (lo, hi) = support;
    let n = fixed_count.max(2);
    let mut points: Vec<f64> = (0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect();
    points.extend(samples.iter().filter(|x| x.is_finite()).map(|x| x.clamp(lo, hi)));
    sort_dedup(&mut points);
    points
}

fn sort_dedup(points: &mut Vec<f64>) {
    points.sort_by(f64::total_cmp);
    points.dedup_by(|b, a| *b - *a <= DEDUP_TOLERANCE);
}

/// Cumulative trapezoid: `F₁ = 0`, `Fⱼ = Fⱼ₋₁ + (tⱼ - tⱼ₋₁)(fⱼ + fⱼ₋₁)/2`.
pub fn cumtrapz(points: &[f64], values: &[f64]) -> Vec<f64> {
    debug_assert_eq!(points.len(), values.len());
    let mut out = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    for j in 0..points.len() {
        if j > 0 {
            acc += (points[j] - points[j - 1]) * 0.5 * (values[j] + values[j - 1]);
        }
        out.push(acc);
    }
    out
}

/// Shifts the cumulative by `(1 - F_end)/2` so the quadrature deficit (or
/// overshoot) is split evenly between both tails.
pub fn center_cdf(cumulative: &[f64]) -> Vec<f64> {
    let Some(&last) = cumulative.last() else {
        return Vec::new();
    };
    let shift = 0.5 * (1.0 - last);
    cumulative.iter().map(|f| f + shift).collect()
}

/// Midpoint quantile levels `(2i-1)/(2L)`, `i = 1..=L`.
pub fn deterministic_targets(count: usize) -> Vec<f64> {
    let denom = 2.0 * count as f64;
    (1..=count).map(|i| (2 * i - 1) as f64 / denom).collect()
}

/// How a quantile was located inside its segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionBranch {
    Quadratic,
    Linear,
    /// The target fell outside the cumulative range; the nearest end point
    /// was returned.
    Clamped,
    /// Degenerate segment without mass; its midpoint was returned.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub location: f64,
    pub branch: InversionBranch,
}

/// Centered trapezoid CDF over sorted evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCdf {
    points: Vec<f64>,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PiecewiseCdf {
    /// Integrates `density` given on strictly increasing `points` and centers
    /// the result.
    pub fn new(points: Vec<f64>, density: Vec<f64>) -> Self {
        assert_eq!(points.len(), density.len(), "one density value per point");
        assert!(points.len() >= 2, "need at least two evaluation points");
        let cumulative = center_cdf(&cumtrapz(&points, &density));
        PiecewiseCdf {
            points,
            density,
            cumulative,
        }
    }

    pub fn evaluate<D: Density1d + ?Sized>(density: &D, points: Vec<f64>) -> Self {
        let values = points.iter().map(|&t| density.pdf(t)).collect();
        Self::new(points, values)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Location where the piecewise-quadratic CDF reaches `target`.
    pub fn invert(&self, target: f64) -> Inversion {
        let f = &self.cumulative;
        let n = f.len();
        if !(target >= f[0]) {
            return Inversion {
                location: self.points[0],
                branch: InversionBranch::Clamped,
            };
        }
        if target >= f[n - 1] {
            return Inversion {
                location: self.points[n - 1],
                branch: InversionBranch::Clamped,
            };
        }
        // first index with F > target; F[right-1] <= target < F[right]
        let right = f.partition_point(|&v| v <= target);
        let left = right - 1;
        invert_segment(
            (self.points[left], self.points[right]),
            (self.density[left], self.density[right]),
            (f[left], f[right]),
            target,
        )
    }
}

fn invert_segment(t: (f64, f64), dens: (f64, f64), cum: (f64, f64), target: f64) -> Inversion {
    let width = t.1 - t.0;
    if !(cum.1 > cum.0) || !(width > 0.0) {
        return Inversion {
            location: 0.5 * (t.0 + t.1),
            branch: InversionBranch::Midpoint,
        };
    }
    // secant of the cumulative over the segment
    let linear = t.0 + (target - cum.0) * width / (cum.1 - cum.0);

    // F_L + f_L·h + (m/2)·h² = target for the offset h = x - t_L
    let slope = (dens.1 - dens.0) / width;
    let a = 0.5 * slope;
    let b = dens.0;
    let c = cum.0 - target;
    let tol = 1e-12 * width;
    let mut inside = [0.0f64; 2];
    let mut count = 0;
    for h in quadratic_roots(a, b, c).into_iter().flatten() {
        if h >= -tol && h <= width + tol {
            inside[count] = t.0 + h.clamp(0.0, width);
            count += 1;
        }
    }
    match count {
        1 => Inversion {
            location: inside[0],
            branch: InversionBranch::Quadratic,
        },
        2 => {
            let best = if (inside[0] - linear).abs() <= (inside[1] - linear).abs() {
                inside[0]
            } else {
                inside[1]
            };
            Inversion {
                location: best,
                branch: InversionBranch::Quadratic,
            }
        }
        _ => Inversion {
            location: linear.clamp(t.0, t.1),
            branch: InversionBranch::Linear,
        },
    }
}

/// Real roots of `a·h² + b·h + c`, computed without cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64) -> [Option<f64>; 2] {
    if a == 0.0 {
        return if b != 0.0 { [Some(-c / b), None] } else { [None, None] };
    }
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // tangency lost to rounding
        if disc > -1e-14 * (b * b + (4.0 * a * c).abs()) {
            disc = 0.0;
        } else {
            return [None, None];
        }
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return [Some(0.0), None];
    }
    [Some(q / a), Some(c / q)]
}

/// Indices that sort `values` ascending; ties keep their input order.
pub fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    idx
}

/// Pairs the `k`-th smallest current value with the `k`-th smallest target
/// and returns each sample's partner in the original sample order.
pub fn associate_sorted(current: &[f64], sorted_targets: &[f64]) -> Vec<f64> {
    assert_eq!(current.len(), sorted_targets.len());
    let mut out = vec![0.0; current.len()];
    for (rank, &i) in argsort(current).iter().enumerate() {
        out[i] = sorted_targets[rank];
    }
    out
}

/// Options for one cumulative-matching pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnivariateSampler {
    /// Number of uniformly spaced evaluation points.
    pub fixed_points: usize,
    /// Include the current samples as evaluation points.
    pub adaptive: bool,
    /// Bracket density discontinuities with evaluation points.
    pub breakpoints: bool,
}

impl Default for UnivariateSampler {
    fn default() -> Self {
        UnivariateSampler {
            fixed_points: 30,
            adaptive: true,
            breakpoints: true,
        }
    }
}

/// Result of one matching pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Matched target location per sample, in the original sample order.
    pub locations: Vec<f64>,
    /// Targets that fell outside the cumulative range.
    pub clamped: usize,
}

impl UnivariateSampler {
    pub fn evaluation_points<D: Density1d + ?Sized>(&self, density: &D, current: &[f64]) -> Vec<f64> {
        let support = density.support();
        let (lo, hi) = support;
        let mut points = density.fixed_points(self.fixed_points);
        if self.adaptive {
            points.extend(current.iter().filter(|x| x.is_finite()).map(|x| x.clamp(lo, hi)));
        }
        sort_dedup(&mut points);
        if self.breakpoints {
            let breaks = density.breakpoints();
            if !breaks.is_empty() {
                let delta = BREAKPOINT_BRACKET * (hi - lo);
                for b in breaks {
                    points.push((b - delta).max(lo));
                    points.push((b + delta).min(hi));
                }
                sort_dedup(&mut points);
            }
        }
        points
    }

    pub fn cdf<D: Density1d + ?Sized>(&self, density: &D, current: &[f64]) -> PiecewiseCdf {
        PiecewiseCdf::evaluate(density, self.evaluation_points(density, current))
    }

    /// Inverts the CDF at every midpoint quantile and pairs the results with
    /// the current samples by sorted order.
    pub fn matching<D: Density1d + ?Sized>(&self, density: &D, current: &[f64]) -> Matching {
        let cdf = self.cdf(density, current);
        let mut clamped = 0;
        let targets: Vec<f64> = deterministic_targets(current.len())
            .into_iter()
            .map(|p| {
                let inv = cdf.invert(p);
                if inv.branch == InversionBranch::Clamped {
                    clamped += 1;
                }
                inv.location
            })
            .collect();
        Matching {
            locations: associate_sorted(current, &targets),
            clamped,
        }
    }

    /// Proposed step `Δrᵢ` for every current sample, in input order.
    pub fn steps<D: Density1d + ?Sized>(&self, density: &D, current: &[f64]) -> Vec<f64> {
        let m = self.matching(density, current);
        m.locations.iter().zip(current).map(|(t, r)| t - r).collect()
    }
}

/// One matching pass with default options: the steps that move `current`
/// onto the deterministic quantiles of `density`.
pub fn sample_projected<D: Density1d + ?Sized>(density: &D, current: &[f64]) -> Vec<f64> {
    UnivariateSampler::default().steps(density, current)
}
