//! Continuous reference densities on the unit circle.
//!
//! A [`DensitySpec`] is the declarative, serializable description of a
//! density (family plus parameters). [`CircularDensity`] is the validated,
//! normalized evaluator built from it.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::angle::{wrap_pi, wrap_tau, Angle};
use crate::bessel;
use crate::error::{Error, Result};

/// Relative deviation from unit mass above which a density is rescaled.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

const MIXTURE_WEIGHT_TOLERANCE: f64 = 1e-12;
const CHECK_GRID: usize = 1 << 14;
const MIN_TABULATED: usize = 8;

/// Declarative description of a density on S¹. Angles are in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DensitySpec {
    Uniform,
    VonMises { mu: f64, kappa: f64 },
    WrappedNormal { mu: f64, sigma: f64 },
    WrappedCauchy { mu: f64, rho: f64 },
    WrappedExponential { lambda: f64 },
    WrappedLaplace { mu: f64, lambda: f64 },
    Mixture { components: Vec<MixtureComponent> },
    /// `levels[i]` on `[edges[i], edges[i+1])`, zero outside `[edges[0], edges[n])`.
    PiecewiseConstant { edges: Vec<f64>, levels: Vec<f64> },
    /// Values on a grid of angles, linearly interpolated with periodic wrap.
    Tabulated { thetas: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub spec: DensitySpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    VonMises,
    WrappedNormal,
    WrappedCauchy,
    WrappedExponential,
    WrappedLaplace,
    Mixture,
    PiecewiseConstant,
    Uniform,
    Tabulated,
}

impl DensitySpec {
    /// Parses a density document, reporting the field path on schema errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: ".".to_string(),
            message: e.to_string(),
        })?;
        schema::spec(&value, "")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("density spec serializes")
    }

    pub fn family(&self) -> Family {
        match self {
            DensitySpec::Uniform => Family::Uniform,
            DensitySpec::VonMises { .. } => Family::VonMises,
            DensitySpec::WrappedNormal { .. } => Family::WrappedNormal,
            DensitySpec::WrappedCauchy { .. } => Family::WrappedCauchy,
            DensitySpec::WrappedExponential { .. } => Family::WrappedExponential,
            DensitySpec::WrappedLaplace { .. } => Family::WrappedLaplace,
            DensitySpec::Mixture { .. } => Family::Mixture,
            DensitySpec::PiecewiseConstant { .. } => Family::PiecewiseConstant,
            DensitySpec::Tabulated { .. } => Family::Tabulated,
        }
    }
}

/// Number of wrapped terms on each side for the wrapped normal.
///
/// Keeps omitted terms below 1e-14 relative: the first dropped image sits
/// at least `8.5σ` from the evaluation point.
pub(crate) fn wrapped_normal_terms(sigma: f64) -> i64 {
    3.max((8.5 * sigma / TAU).ceil() as i64 + 2)
}

/// Number of wrapped terms on each side for exponential-tailed families.
pub(crate) fn exponential_tail_terms(lambda: f64) -> i64 {
    (-(1e-14f64).ln() / (TAU * lambda)).ceil() as i64 + 1
}

pub(crate) fn wrapped_normal_series(d: f64, sigma: f64, terms: i64) -> f64 {
    let norm = 1.0 / (sigma * TAU.sqrt());
    let mut sum = 0.0;
    for k in -terms..=terms {
        let x = d + TAU * k as f64;
        sum += (-0.5 * (x / sigma).powi(2)).exp();
    }
    sum * norm
}

pub(crate) fn wrapped_laplace_series(d: f64, lambda: f64, terms: i64) -> f64 {
    let mut sum = 0.0;
    for k in -terms..=terms {
        let x = d + TAU * k as f64;
        sum += (-lambda * x.abs()).exp();
    }
    0.5 * lambda * sum
}

#[derive(Debug, Clone)]
enum Kernel {
    Uniform,
    VonMises { mu: f64, kappa: f64, norm: f64 },
    WrappedNormal { mu: f64, sigma: f64, terms: i64 },
    WrappedCauchy { mu: f64, rho: f64 },
    WrappedExponential { lambda: f64, norm: f64 },
    WrappedLaplace { mu: f64, lambda: f64, terms: i64 },
    Mixture(Vec<(f64, CircularDensity)>),
    PiecewiseConstant { edges: Vec<f64>, levels: Vec<f64> },
    Tabulated { thetas: Vec<f64>, values: Vec<f64> },
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(field, format!("must be finite, got {v}")))
    }
}

impl Kernel {
    fn from_spec(spec: &DensitySpec) -> Result<Self> {
        Ok(match *spec {
            DensitySpec::Uniform => Kernel::Uniform,
            DensitySpec::VonMises { mu, kappa } => {
                finite("mu", mu)?;
                if !(finite("kappa", kappa)? >= 0.0) {
                    return Err(Error::param("kappa", format!("must be >= 0, got {kappa}")));
                }
                Kernel::VonMises {
                    mu,
                    kappa,
                    norm: 1.0 / (TAU * bessel::i0e(kappa)),
                }
            }
            DensitySpec::WrappedNormal { mu, sigma } => {
                finite("mu", mu)?;
                if !(finite("sigma", sigma)? > 0.0) {
                    return Err(Error::param("sigma", format!("must be > 0, got {sigma}")));
                }
                Kernel::WrappedNormal {
                    mu,
                    sigma,
                    terms: wrapped_normal_terms(sigma),
                }
            }
            DensitySpec::WrappedCauchy { mu, rho } => {
                finite("mu", mu)?;
                if !(0.0..1.0).contains(&finite("rho", rho)?) {
                    return Err(Error::param("rho", format!("must lie in [0, 1), got {rho}")));
                }
                Kernel::WrappedCauchy { mu, rho }
            }
            DensitySpec::WrappedExponential { lambda } => {
                if !(finite("lambda", lambda)? > 0.0) {
                    return Err(Error::param("lambda", format!("must be > 0, got {lambda}")));
                }
                Kernel::WrappedExponential {
                    lambda,
                    norm: lambda / -(-TAU * lambda).exp_m1(),
                }
            }
            DensitySpec::WrappedLaplace { mu, lambda } => {
                finite("mu", mu)?;
                if !(finite("lambda", lambda)? > 0.0) {
                    return Err(Error::param("lambda", format!("must be > 0, got {lambda}")));
                }
                Kernel::WrappedLaplace {
                    mu,
                    lambda,
                    terms: exponential_tail_terms(lambda),
                }
            }
            DensitySpec::Mixture { ref components } => {
                if components.is_empty() {
                    return Err(Error::param("components", "mixture needs at least one component"));
                }
                let mut total = 0.0;
                let mut parts = Vec::with_capacity(components.len());
                for (i, c) in components.iter().enumerate() {
                    if !(c.weight.is_finite() && c.weight >= 0.0) {
                        return Err(Error::param(
                            &format!("components[{i}].weight"),
                            format!("must be finite and >= 0, got {}", c.weight),
                        ));
                    }
                    total += c.weight;
                    let density = CircularDensity::new(c.spec.clone()).map_err(|e| match e {
                        Error::InvalidParameter { field, message } => Error::InvalidParameter {
                            field: format!("components[{i}].spec.{field}"),
                            message,
                        },
                        other => other,
                    })?;
                    parts.push((c.weight, density));
                }
                if (total - 1.0).abs() > MIXTURE_WEIGHT_TOLERANCE {
                    return Err(Error::param("components", format!("weights sum to {total}")));
                }
                Kernel::Mixture(parts)
            }
            DensitySpec::PiecewiseConstant {
                ref edges,
                ref levels,
            } => {
                if levels.is_empty() || edges.len() != levels.len() + 1 {
                    return Err(Error::param(
                        "edges",
                        format!(
                            "need levels.len() + 1 edges, got {} edges for {} levels",
                            edges.len(),
                            levels.len()
                        ),
                    ));
                }
                if edges[0] < 0.0 || edges[edges.len() - 1] > TAU {
                    return Err(Error::param("edges", "must lie within [0, 2π]"));
                }
                if edges.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::param("edges", "must be strictly increasing"));
                }
                if let Some(bad) = levels.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
                    return Err(Error::param("levels", format!("must be finite and >= 0, got {bad}")));
                }
                Kernel::PiecewiseConstant {
                    edges: edges.clone(),
                    levels: levels.clone(),
                }
            }
            DensitySpec::Tabulated {
                ref thetas,
                ref values,
            } => {
                if thetas.len() != values.len() {
                    return Err(Error::param(
                        "values",
                        format!("{} values for {} thetas", values.len(), thetas.len()),
                    ));
                }
                if thetas.len() < MIN_TABULATED {
                    return Err(Error::param(
                        "thetas",
                        format!("need at least {MIN_TABULATED} entries, got {}", thetas.len()),
                    ));
                }
                if thetas[0] < 0.0 || thetas[thetas.len() - 1] >= TAU {
                    return Err(Error::param("thetas", "must lie within [0, 2π)"));
                }
                if thetas.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::param("thetas", "must be strictly increasing"));
                }
                if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(Error::param("values", format!("must be finite and >= 0, got {bad}")));
                }
                Kernel::Tabulated {
                    thetas: thetas.clone(),
                    values: values.clone(),
                }
            }
        })
    }

    /// Unnormalized evaluation at a canonical angle in `[0, 2π)`.
    fn eval(&self, theta: f64) -> f64 {
        match self {
            Kernel::Uniform => 1.0 / TAU,
            Kernel::VonMises { mu, kappa, norm } => {
                norm * (kappa * ((theta - mu).cos() - 1.0)).exp()
            }
            Kernel::WrappedNormal { mu, sigma, terms } => {
                wrapped_normal_series(wrap_pi(theta - mu), *sigma, *terms)
            }
            Kernel::WrappedCauchy { mu, rho } => {
                (1.0 - rho * rho) / (TAU * (1.0 + rho * rho - 2.0 * rho * (theta - mu).cos()))
            }
            Kernel::WrappedExponential { lambda, norm } => norm * (-lambda * theta).exp(),
            Kernel::WrappedLaplace { mu, lambda, terms } => {
                wrapped_laplace_series(wrap_pi(theta - mu), *lambda, *terms)
            }
            Kernel::Mixture(parts) => parts.iter().map(|(w, d)| w * d.pdf(theta)).sum(),
            Kernel::PiecewiseConstant { edges, levels } => {
                let idx = edges.partition_point(|&e| e <= theta);
                if idx == 0 || idx > levels.len() {
                    0.0
                } else {
                    levels[idx - 1]
                }
            }
            Kernel::Tabulated { thetas, values } => {
                let n = thetas.len();
                let idx = thetas.partition_point(|&t| t <= theta);
                let (t0, v0, t1, v1, x) = if idx == 0 {
                    (thetas[n - 1], values[n - 1], thetas[0] + TAU, values[0], theta + TAU)
                } else if idx == n {
                    (thetas[n - 1], values[n - 1], thetas[0] + TAU, values[0], theta)
                } else {
                    (thetas[idx - 1], values[idx - 1], thetas[idx], values[idx], theta)
                };
                v0 + (v1 - v0) * (x - t0) / (t1 - t0)
            }
        }
    }

    /// Mass over the circle where it is known in closed form.
    fn exact_integral(&self) -> Option<f64> {
        match self {
            Kernel::Uniform | Kernel::WrappedExponential { .. } => Some(1.0),
            Kernel::Mixture(parts) => Some(parts.iter().map(|(w, _)| w).sum()),
            Kernel::PiecewiseConstant { edges, levels } => Some(
                edges
                    .windows(2)
                    .zip(levels)
                    .map(|(w, l)| (w[1] - w[0]) * l)
                    .sum(),
            ),
            Kernel::Tabulated { thetas, values } => {
                let n = thetas.len();
                let mut sum = 0.0;
                for i in 0..n {
                    let j = (i + 1) % n;
                    let width = if j == 0 {
                        thetas[0] + TAU - thetas[n - 1]
                    } else {
                        thetas[j] - thetas[i]
                    };
                    sum += 0.5 * (values[i] + values[j]) * width;
                }
                Some(sum)
            }
            _ => None,
        }
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Kernel::WrappedExponential { .. } => out.push(0.0),
            Kernel::PiecewiseConstant { edges, .. } => {
                out.extend(edges.iter().map(|&e| wrap_tau(e)))
            }
            Kernel::Mixture(parts) => {
                for (_, d) in parts {
                    out.extend(d.breakpoints());
                }
            }
            _ => {}
        }
    }

    fn nodes(&self, out: &mut Vec<f64>) {
        match self {
            Kernel::Tabulated { thetas, .. } => out.extend(thetas.iter().map(|&t| wrap_tau(t))),
            Kernel::Mixture(parts) => {
                for (_, d) in parts {
                    d.kernel.nodes(out);
                }
            }
            _ => {}
        }
    }
}

// Hand-rolled reader: serde's internally tagged enums buffer their input
// and lose the location of type errors.
mod schema {
    use serde_json::{Map, Value};

    use super::{DensitySpec, MixtureComponent};
    use crate::error::{Error, Result};

    fn err(path: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            path: if path.is_empty() { ".".to_string() } else { path.to_string() },
            message: message.into(),
        }
    }

    fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
        v.as_object().ok_or_else(|| err(path, format!("expected an object, got {v}")))
    }

    fn field<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
        o.get(key).ok_or_else(|| err(path, format!("missing field `{key}`")))
    }

    fn number(o: &Map<String, Value>, key: &str, path: &str) -> Result<f64> {
        let at = format!("{path}.{key}");
        let v = field(o, key, path)?;
        v.as_f64().ok_or_else(|| err(&at, format!("expected a number, got {v}")))
    }

    fn numbers(o: &Map<String, Value>, key: &str, path: &str) -> Result<Vec<f64>> {
        let at = format!("{path}.{key}");
        let v = field(o, key, path)?;
        let items = v.as_array().ok_or_else(|| err(&at, format!("expected an array, got {v}")))?;
        items
            .iter()
            .enumerate()
            .map(|(i, x)| x.as_f64().ok_or_else(|| err(&format!("{at}[{i}]"), format!("expected a number, got {x}"))))
            .collect()
    }

    fn only(o: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
        for key in o.keys() {
            if key != "family" && !allowed.contains(&key.as_str()) {
                return Err(err(&format!("{path}.{key}"), format!("unknown field, expected one of {allowed:?}")));
            }
        }
        Ok(())
    }

    pub(super) fn spec(v: &Value, path: &str) -> Result<DensitySpec> {
        let o = object(v, path)?;
        let family_path = format!("{path}.family");
        let family = field(o, "family", path)?
            .as_str()
            .ok_or_else(|| err(&family_path, "expected a string"))?;
        let (allowed, spec): (&[&str], _) = match family {
            "uniform" => (&[], DensitySpec::Uniform),
            "von_mises" => (&["mu", "kappa"], DensitySpec::VonMises {
                mu: number(o, "mu", path)?,
                kappa: number(o, "kappa", path)?,
            }),
            "wrapped_normal" => (&["mu", "sigma"], DensitySpec::WrappedNormal {
                mu: number(o, "mu", path)?,
                sigma: number(o, "sigma", path)?,
            }),
            "wrapped_cauchy" => (&["mu", "rho"], DensitySpec::WrappedCauchy {
                mu: number(o, "mu", path)?,
                rho: number(o, "rho", path)?,
            }),
            "wrapped_exponential" => (&["lambda"], DensitySpec::WrappedExponential {
                lambda: number(o, "lambda", path)?,
            }),
            "wrapped_laplace" => (&["mu", "lambda"], DensitySpec::WrappedLaplace {
                mu: number(o, "mu", path)?,
                lambda: number(o, "lambda", path)?,
            }),
            "piecewise_constant" => (&["edges", "levels"], DensitySpec::PiecewiseConstant {
                edges: numbers(o, "edges", path)?,
                levels: numbers(o, "levels", path)?,
            }),
            "tabulated" => (&["thetas", "values"], DensitySpec::Tabulated {
                thetas: numbers(o, "thetas", path)?,
                values: numbers(o, "values", path)?,
            }),
            "mixture" => {
                let at = format!("{path}.components");
                let v = field(o, "components", path)?;
                let items = v.as_array().ok_or_else(|| err(&at, format!("expected an array, got {v}")))?;
                let mut components = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    let here = format!("{at}[{i}]");
                    let c = object(item, &here)?;
                    for key in c.keys() {
                        if key != "weight" && key != "spec" {
                            return Err(err(&format!("{here}.{key}"), "unknown field, expected `weight` or `spec`"));
                        }
                    }
                    components.push(MixtureComponent {
                        weight: number(c, "weight", &here)?,
                        spec: spec(field(c, "spec", &here)?, &format!("{here}.spec"))?,
                    });
                }
                (&["components"], DensitySpec::Mixture { components })
            }
            other => return Err(err(&family_path, format!("unknown family `{other}`"))),
        };
        only(o, allowed, path)?;
        Ok(spec)
    }
}

/// A validated density on the unit circle with unit total mass.
///
/// Immutable after construction; evaluation is a pure function.
#[derive(Debug, Clone)]
pub struct CircularDensity {
    spec: DensitySpec,
    kernel: Kernel,
    scale: f64,
    rotation: f64,
    raw_integral: f64,
    renormalized: bool,
}

impl CircularDensity {
    /// Validates parameters and checks the total mass.
    ///
    /// Densities whose mass deviates from one by more than
    /// [`NORMALIZATION_TOLERANCE`] are rescaled and flagged, see
    /// [`CircularDensity::was_renormalized`].
    pub fn new(spec: DensitySpec) -> Result<Self> {
        let kernel = Kernel::from_spec(&spec)?;
        let h = TAU / CHECK_GRID as f64;
        let mut grid_sum = 0.0;
        for k in 0..CHECK_GRID {
            let theta = k as f64 * h;
            let v = kernel.eval(theta);
            if !v.is_finite() {
                return Err(Error::NonFinite { theta });
            }
            grid_sum += v;
        }
        let integral = kernel.exact_integral().unwrap_or(grid_sum * h);
        if !(integral.is_finite() && integral > 0.0) {
            return Err(Error::NotNormalizable { integral });
        }
        let renormalized = (integral - 1.0).abs() > NORMALIZATION_TOLERANCE;
        // tabulated input is always rescaled to its interpolant's mass
        let scale = if renormalized || matches!(kernel, Kernel::Tabulated { .. }) {
            1.0 / integral
        } else {
            1.0
        };
        Ok(CircularDensity {
            spec,
            kernel,
            scale,
            rotation: 0.0,
            raw_integral: integral,
            renormalized,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(DensitySpec::from_json(text)?)
    }

    pub fn spec(&self) -> &DensitySpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family()
    }

    /// Whether construction had to rescale the density to unit mass.
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    /// Mass of the density as specified, before any rescaling.
    pub fn raw_integral(&self) -> f64 {
        self.raw_integral
    }

    /// Density value at `theta` (any real; reduced modulo 2π).
    pub fn pdf(&self, theta: f64) -> f64 {
        let theta = if self.rotation == 0.0 {
            wrap_tau(theta)
        } else {
            wrap_tau(theta - self.rotation)
        };
        self.scale * self.kernel.eval(theta)
    }

    pub fn pdf_at(&self, angle: Angle) -> f64 {
        self.pdf(angle.radians())
    }

    /// The same density rotated counterclockwise by `phi`.
    pub fn rotated(&self, phi: f64) -> Self {
        let mut out = self.clone();
        out.rotation += phi;
        out
    }

    /// Canonical angles where the density jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.kernel.breakpoints(&mut out);
        for b in out.iter_mut() {
            *b = wrap_tau(*b + self.rotation);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Jumps plus kinks of a tabulated density (its nodes), sorted in `[0, 2π)`.
    pub fn features(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.kernel.breakpoints(&mut out);
        self.kernel.nodes(&mut out);
        for b in out.iter_mut() {
            *b = wrap_tau(*b + self.rotation);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Largest density value on a fine grid; used for plot scaling.
    pub fn approximate_max(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|k| self.pdf(TAU * k as f64 / grid as f64))
            .fold(0.0, f64::max)
    }
}

/// Composite trapezoid of the unnormalized density over `[0, 2π]` on
/// `grid_size` uniformly spaced points including both endpoints.
pub fn normalization_integral(spec: &DensitySpec, grid_size: usize) -> Result<f64> {
    if grid_size < 64 {
        return Err(Error::param("grid_size", format!("must be >= 64, got {grid_size}")));
    }
    let kernel = Kernel::from_spec(spec)?;
    let h = TAU / (grid_size - 1) as f64;
    let mut sum = 0.0;
    for k in 0..grid_size {
        let v = kernel.eval(wrap_tau(k as f64 * h));
        let w = if k == 0 || k == grid_size - 1 { 0.5 } else { 1.0 };
        sum += w * v;
    }
    Ok(sum * h)
}

/// Named reference densities in the style of the evaluation gallery.
pub mod catalog {
    use super::*;

    fn sinusoidal() -> DensitySpec {
        let n = 72;
        let thetas: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
        let values = thetas
            .iter()
            .map(|t| 1.5 + (3.0 * t).sin() + 0.4 * t.cos())
            .collect();
        DensitySpec::Tabulated { thetas, values }
    }

    /// The eight gallery densities, in display order.
    pub fn gallery() -> Vec<(&'static str, DensitySpec)> {
        vec![
            ("von_mises", DensitySpec::VonMises { mu: 1.0, kappa: 2.0 }),
            ("wrapped_cauchy", DensitySpec::WrappedCauchy { mu: 2.0, rho: 0.6 }),
            ("wrapped_normal", DensitySpec::WrappedNormal { mu: 4.0, sigma: 0.8 }),
            ("wrapped_exponential", DensitySpec::WrappedExponential { lambda: 0.5 }),
            (
                "von_mises_mixture",
                DensitySpec::Mixture {
                    components: vec![
                        MixtureComponent {
                            weight: 0.6,
                            spec: DensitySpec::VonMises { mu: 1.0, kappa: 6.0 },
                        },
                        MixtureComponent {
                            weight: 0.4,
                            spec: DensitySpec::VonMises { mu: 4.0, kappa: 3.0 },
                        },
                    ],
                },
            ),
            ("custom_sinusoidal", sinusoidal()),
            (
                "piecewise_constant",
                DensitySpec::PiecewiseConstant {
                    edges: vec![0.0, 1.0, 2.5, 4.0, 5.0, TAU],
                    levels: vec![0.25, 0.05, 0.3, 0.08, 0.12],
                },
            ),
            ("uniform", DensitySpec::Uniform),
        ]
    }

    /// One instance of every family: the gallery plus a wrapped Laplace.
    pub fn all_families() -> Vec<(&'static str, DensitySpec)> {
        let mut out = gallery();
        out.push(("wrapped_laplace", DensitySpec::WrappedLaplace { mu: 3.0, lambda: 2.0 }));
        out
    }

    pub fn wrapped_laplace_35() -> DensitySpec {
        DensitySpec::WrappedLaplace { mu: PI / 2.0, lambda: 1.5 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vm(mu: f64, kappa: f64) -> CircularDensity {
        CircularDensity::new(DensitySpec::VonMises { mu, kappa }).unwrap()
    }

    // independent power-series oracle
    fn i0_oracle(x: f64) -> f64 {
        let mut k = 0u32;
        let mut term = 1.0f64;
        let mut sum = 0.0;
        loop {
            let prev = sum;
            sum += term;
            k += 1;
            term *= (x / 2.0).powi(2) / (k as f64).powi(2);
            if (sum - prev).abs() < 1e-15 * sum {
                return sum;
            }
        }
    }

    #[test]
    fn uniform_value() {
        let d = CircularDensity::new(DensitySpec::Uniform).unwrap();
        for t in [0.0, 1.0, -3.0, 100.0] {
            assert_eq!(d.pdf(t), 1.0 / TAU);
        }
    }

    #[test]
    fn von_mises_at_mode() {
        let i0 = i0_oracle(1.0);
        assert!((i0 - 1.26607).abs() < 1e-5);
        let expected = 1f64.exp() / (TAU * i0);
        assert!((vm(0.0, 1.0).pdf(0.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn wrapped_cauchy_closed_form_and_series() {
        let d = CircularDensity::new(DensitySpec::WrappedCauchy { mu: 0.0, rho: 0.5 }).unwrap();
        let expected = 0.75 / (TAU * 2.25);
        assert!((d.pdf(PI) - expected).abs() < 1e-15);
        // Cauchy scale γ with ρ = e^{-γ}
        let gamma = -(0.5f64).ln();
        let series: f64 = (-200i64..=200)
            .map(|k| {
                let x = PI + TAU * k as f64;
                gamma / (PI * (gamma * gamma + x * x))
            })
            .sum();
        assert!((d.pdf(PI) - series).abs() < 1e-4, "{} vs {}", d.pdf(PI), series);
    }

    #[test]
    fn wrapped_exponential_matches_series() {
        let lambda = 0.7;
        let d = CircularDensity::new(DensitySpec::WrappedExponential { lambda }).unwrap();
        for t in [0.1, 2.0, 6.0] {
            let series: f64 = (0..200)
                .map(|k| lambda * (-lambda * (t + TAU * k as f64)).exp())
                .sum();
            assert!((d.pdf(t) - series).abs() < 1e-13);
        }
        assert_eq!(d.breakpoints(), vec![0.0]);
    }

    #[test]
    fn parse_examples() {
        let u = DensitySpec::from_json(r#"{"family":"uniform"}"#).unwrap();
        assert_eq!(u, DensitySpec::Uniform);
        let v = DensitySpec::from_json(r#"{"family":"von_mises","mu":0.0,"kappa":500.0}"#).unwrap();
        assert_eq!(v, DensitySpec::VonMises { mu: 0.0, kappa: 500.0 });
        let d = CircularDensity::new(v).unwrap();
        assert!(!d.was_renormalized());
        assert!(d.pdf(0.0).is_finite());
    }

    #[test]
    fn mixture_weight_violation() {
        let text = r#"{"family":"mixture","components":[
            {"weight":0.6,"spec":{"family":"uniform"}},
            {"weight":0.5,"spec":{"family":"von_mises","mu":1.0,"kappa":2.0}}]}"#;
        let err = CircularDensity::from_json(text).unwrap_err();
        assert!(err.to_string().contains("weights sum to 1.1"), "{err}");
    }

    #[test]
    fn parse_error_has_path() {
        let err = DensitySpec::from_json(
            r#"{"family":"mixture","components":[{"weight":"x","spec":{"family":"uniform"}}]}"#,
        )
        .unwrap_err();
        match &err {
            Error::Parse { .. } => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().starts_with(".components[0].weight:"), "{err}");
        let err = DensitySpec::from_json(r#"{"family":"von_mises","mu":0.0}"#).unwrap_err();
        assert!(err.to_string().contains("kappa"), "{err}");
        let err = DensitySpec::from_json(r#"{"family":"von_mises","mu":0.0,"kappa":"x"}"#).unwrap_err();
        assert!(err.to_string().starts_with(".kappa:"), "{err}");
        let err = DensitySpec::from_json(
            r#"{"family":"mixture","components":[{"weight":1.0,"spec":{"family":"wrapped_cauchy","mu":0,"ro":0.5}}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains(".components[0].spec"), "{err}");
        assert!(DensitySpec::from_json(r#"{"family":"gamma"}"#).is_err());
        assert!(DensitySpec::from_json("[1, 2]").is_err());
        assert!(DensitySpec::from_json("{").is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(CircularDensity::new(DensitySpec::VonMises { mu: 0.0, kappa: -1.0 }).is_err());
        assert!(CircularDensity::new(DensitySpec::WrappedCauchy { mu: 0.0, rho: 1.0 }).is_err());
        assert!(CircularDensity::new(DensitySpec::WrappedNormal { mu: 0.0, sigma: 0.0 }).is_err());
        let short = DensitySpec::Tabulated {
            thetas: vec![0.0, 1.0],
            values: vec![1.0, 1.0],
        };
        assert!(CircularDensity::new(short).is_err());
        let zero = DensitySpec::PiecewiseConstant {
            edges: vec![0.0, TAU],
            levels: vec![0.0],
        };
        assert!(matches!(
            CircularDensity::new(zero),
            Err(Error::NotNormalizable { .. })
        ));
    }

    #[test]
    fn normalization_integral_examples() {
        let u = normalization_integral(&DensitySpec::Uniform, 256).unwrap();
        assert!((u - 1.0).abs() < 1e-14);
        let spec = DensitySpec::VonMises { mu: 0.0, kappa: 1.0 };
        let i = normalization_integral(&spec, 4096).unwrap();
        let fine = normalization_integral(&spec, 8192).unwrap();
        assert!((i - fine).abs() < 1e-12);
        assert!((i - 1.0).abs() < 1e-8);
        let pwc = DensitySpec::PiecewiseConstant {
            edges: vec![0.0, TAU],
            levels: vec![1.0 / PI],
        };
        assert!((normalization_integral(&pwc, 256).unwrap() - 2.0).abs() < 1e-13);
        assert!(normalization_integral(&pwc, 10).is_err());
    }

    #[test]
    fn unnormalized_input_is_rescaled() {
        let pwc = DensitySpec::PiecewiseConstant {
            edges: vec![0.0, TAU],
            levels: vec![1.0 / PI],
        };
        let d = CircularDensity::new(pwc).unwrap();
        assert!(d.was_renormalized());
        assert!((d.raw_integral() - 2.0).abs() < 1e-14);
        assert!((d.pdf(1.0) - 1.0 / TAU).abs() < 1e-15);
    }

    #[test]
    fn piecewise_constant_is_zero_outside_edges() {
        let d = CircularDensity::new(DensitySpec::PiecewiseConstant {
            edges: vec![1.0, 2.0],
            levels: vec![1.0],
        })
        .unwrap();
        assert_eq!(d.pdf(0.5), 0.0);
        assert_eq!(d.pdf(1.5), 1.0);
        assert_eq!(d.pdf(2.0), 0.0);
        assert_eq!(d.breakpoints(), vec![1.0, 2.0]);
    }

    #[test]
    fn tabulated_interpolates_with_wrap() {
        let thetas: Vec<f64> = (0..8).map(|k| 0.5 + k as f64 * 0.7).collect();
        let values = vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 3.0];
        let d = CircularDensity::new(DensitySpec::Tabulated {
            thetas: thetas.clone(),
            values: values.clone(),
        })
        .unwrap();
        let s = 1.0 / d.raw_integral();
        assert!((d.pdf(thetas[1]) - 2.0 * s).abs() < 1e-14);
        assert!((d.pdf(0.5 + 0.35) - 1.5 * s).abs() < 1e-14);
        // wrap segment from thetas[7] = 5.4 to 0.5 + 2π
        let span = 0.5 + TAU - 5.4;
        let at = |t: f64| 3.0 + (1.0 - 3.0) * (t - 5.4) / span;
        assert!((d.pdf(6.0) - at(6.0) * s).abs() < 1e-14);
        assert!((d.pdf(0.1) - at(0.1 + TAU) * s).abs() < 1e-14);
        let mass = normalization_integral(d.spec(), 1 << 16).unwrap() * s;
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn series_truncation_is_converged() {
        for sigma in [0.05, 0.3, 1.0, 3.0, 10.0, 40.0] {
            let k = wrapped_normal_terms(sigma);
            for d in [-PI, -1.0, 0.0, 2.0, 3.1] {
                let a = wrapped_normal_series(d, sigma, k);
                let b = wrapped_normal_series(d, sigma, k + 5);
                assert!((a - b).abs() < 1e-12, "sigma {sigma}: {a} vs {b}");
            }
        }
        for lambda in [0.05, 0.3, 1.0, 5.0, 50.0] {
            let k = exponential_tail_terms(lambda);
            for d in [-PI, -1.0, 0.0, 2.0, 3.1] {
                let a = wrapped_laplace_series(d, lambda, k);
                let b = wrapped_laplace_series(d, lambda, k + 5);
                assert!((a - b).abs() < 1e-12, "lambda {lambda}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn catalog_is_normalized() {
        for (name, spec) in catalog::all_families() {
            let d = CircularDensity::new(spec).unwrap();
            let n = 1 << 16;
            let h = TAU / n as f64;
            let mass: f64 = (0..n).map(|k| d.pdf(k as f64 * h)).sum::<f64>() * h;
            assert!((mass - 1.0).abs() < 1e-4, "{name}: {mass}");
        }
    }

    #[test]
    fn rotation_shifts_density() {
        let d = vm(0.5, 3.0);
        let r = d.rotated(1.0);
        let expected = vm(1.5, 3.0);
        for t in [0.0, 1.0, 2.5, 5.0] {
            assert!((r.pdf(t) - expected.pdf(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn round_trip_through_json() {
        for (_, spec) in catalog::all_families() {
            let text = spec.to_json();
            assert_eq!(DensitySpec::from_json(&text).unwrap(), spec);
        }
    }

    fn arb_spec() -> impl Strategy<Value = DensitySpec> {
        let mu = 0.0..TAU;
        prop_oneof![
            Just(DensitySpec::Uniform),
            (mu.clone(), 0.0..600.0).prop_map(|(mu, kappa)| DensitySpec::VonMises { mu, kappa }),
            (mu.clone(), 0.02..20.0).prop_map(|(mu, sigma)| DensitySpec::WrappedNormal { mu, sigma }),
            (mu.clone(), 0.0..0.99).prop_map(|(mu, rho)| DensitySpec::WrappedCauchy { mu, rho }),
            (0.01..20.0).prop_map(|lambda| DensitySpec::WrappedExponential { lambda }),
            (mu.clone(), 0.05..20.0).prop_map(|(mu, lambda)| DensitySpec::WrappedLaplace { mu, lambda }),
            (mu, 0.1..10.0, 0.0..1.0).prop_map(|(mu, kappa, w)| DensitySpec::Mixture {
                components: vec![
                    MixtureComponent { weight: w, spec: DensitySpec::VonMises { mu, kappa } },
                    MixtureComponent { weight: 1.0 - w, spec: DensitySpec::Uniform },
                ]
            }),
            proptest::collection::vec(0.0..5.0f64, 8..20).prop_map(|values| {
                let n = values.len();
                let mut values = values;
                values[0] += 0.1;
                DensitySpec::Tabulated {
                    thetas: (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
                    values,
                }
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn nonnegative_and_periodic(spec in arb_spec(), theta in -20.0..20.0f64) {
            let d = CircularDensity::new(spec).unwrap();
            let n = 10_000;
            for k in 0..n {
                let v = d.pdf(TAU * k as f64 / n as f64);
                prop_assert!(v.is_finite() && v >= 0.0);
            }
            let a = d.pdf(theta);
            let b = d.pdf(Angle::new(theta).radians() + TAU);
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn mixture_is_linear(mu in 0.0..TAU, kappa in 0.1..50.0, w in 0.0..1.0f64, theta in 0.0..TAU) {
            let a = DensitySpec::VonMises { mu, kappa };
            let b = DensitySpec::WrappedCauchy { mu: mu + 1.0, rho: 0.4 };
            let m = CircularDensity::new(DensitySpec::Mixture { components: vec![
                MixtureComponent { weight: w, spec: a.clone() },
                MixtureComponent { weight: 1.0 - w, spec: b.clone() },
            ]}).unwrap();
            let da = CircularDensity::new(a).unwrap();
            let db = CircularDensity::new(b).unwrap();
            prop_assert_eq!(m.pdf(theta), w * da.pdf(theta) + (1.0 - w) * db.pdf(theta));
        }
    }
}
