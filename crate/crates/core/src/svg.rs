//! Static SVG rendering of a density and a sample set on the circle.
//!
//! The density is drawn as a closed curve at radius `1 + f(θ)·scale` around
//! the unit circle. Every sample is a spoke leaving the circle outward, with
//! length equal to the maximum of the density, so spokes and curve share a
//! scale.

use std::fmt::Write as _;
use std::path::Path;

use crate::density::CircularDensity;
use crate::error::Result;
use crate::mixture::DiracMixture;

const SIZE: f64 = 480.0;
const CURVE_POINTS: usize = 720;
/// Largest radial extent of the density curve, in units of the circle radius.
const MAX_EXTENT: f64 = 0.8;

pub fn render(density: &CircularDensity, samples: &DiracMixture) -> String {
    let fmax = density.approximate_max(4096).max(f64::MIN_POSITIVE);
    let scale = MAX_EXTENT / fmax;
    let radius = SIZE / (2.0 * (1.0 + MAX_EXTENT) * 1.05);
    let c = SIZE / 2.0;
    // y axis points down in SVG
    let at = |theta: f64, rho: f64| (c + radius * rho * theta.cos(), c - radius * rho * theta.sin());

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<circle cx="{c:.3}" cy="{c:.3}" r="{radius:.3}" fill="none" stroke="black" stroke-width="1"/>"#
    )
    .unwrap();

    let mut path = String::new();
    for k in 0..CURVE_POINTS {
        let theta = std::f64::consts::TAU * k as f64 / CURVE_POINTS as f64;
        let (x, y) = at(theta, 1.0 + scale * density.pdf(theta));
        write!(path, "{}{x:.3},{y:.3} ", if k == 0 { "M" } else { "L" }).unwrap();
    }
    path.push('Z');
    writeln!(out, r#"<path d="{path}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#).unwrap();

    for theta in samples.angles() {
        let (x0, y0) = at(theta, 1.0);
        let (x1, y1) = at(theta, 1.0 + scale * fmax);
        writeln!(
            out,
            r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="crimson" stroke-width="1.5"/>"#
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

pub fn write(path: &Path, density: &CircularDensity, samples: &DiracMixture) -> Result<()> {
    std::fs::write(path, render(density, samples))?;
    Ok(())
}
