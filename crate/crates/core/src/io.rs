//! Reading and writing sample sets, convergence traces and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::density::DensitySpec;
use crate::error::{Error, Result};
use crate::mixture::DiracMixture;
use crate::sampler::{ConvergenceTrace, SamplerConfig};

pub const SAMPLES_HEADER: &str = "index,theta,x,y";
pub const TRACE_HEADER: &str = "iteration,lambda,mean_step_norm,wasserstein";

/// Fixed 17-significant-digit formatting, so equal values give equal bytes.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn samples_csv(samples: &DiracMixture) -> String {
    let mut out = String::from(SAMPLES_HEADER);
    out.push('\n');
    for (i, x) in samples.samples().iter().enumerate() {
        let theta = Angle::of_vector(*x).radians();
        writeln!(out, "{i},{},{},{}", num(theta), num(x[0]), num(x[1])).unwrap();
    }
    out
}

pub fn write_samples(path: &Path, samples: &DiracMixture) -> Result<()> {
    fs::write(path, samples_csv(samples))?;
    Ok(())
}

/// Parses a samples file. Rows must be numbered `0..L` in order; `x, y`
/// are authoritative and `theta` must agree with them.
pub fn parse_samples(text: &str) -> Result<DiracMixture> {
    let bad = |line: usize, msg: String| Error::Format(format!("line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == SAMPLES_HEADER => {}
        Some((_, h)) => return Err(bad(1, format!("expected header `{SAMPLES_HEADER}`, got `{h}`"))),
        None => return Err(Error::Format("empty samples file".into())),
    }
    let mut points = Vec::new();
    for (n, line) in lines {
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(line_no, format!("expected 4 fields, got {}", fields.len())));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| bad(line_no, format!("bad index `{}`", fields[0])))?;
        if index != points.len() {
            return Err(bad(line_no, format!("expected index {}, got {index}", points.len())));
        }
        let mut v = [0.0; 3];
        for (slot, f) in v.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|_| bad(line_no, format!("bad number `{f}`")))?;
        }
        let [theta, x, y] = v;
        let from_xy = Angle::of_vector([x, y]).radians();
        let diff = (crate::angle::wrap_pi(theta - from_xy)).abs();
        if diff > 1e-9 {
            return Err(bad(line_no, format!("theta {theta} disagrees with (x, y)")));
        }
        points.push([x, y]);
    }
    if points.is_empty() {
        return Err(Error::Format("samples file has no rows".into()));
    }
    DiracMixture::new(points)
}

pub fn read_samples(path: &Path) -> Result<DiracMixture> {
    parse_samples(&fs::read_to_string(path)?)
}

pub fn trace_csv(trace: &ConvergenceTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &trace.records {
        let w = r.wasserstein.map(num).unwrap_or_default();
        writeln!(out, "{},{},{},{w}", r.iteration, num(r.lambda), num(r.mean_step_norm)).unwrap();
    }
    out
}

pub fn write_trace(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    fs::write(path, trace_csv(trace))?;
    Ok(())
}

/// Everything needed to repeat a `sample` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub density_path: Option<PathBuf>,
    pub density: DensitySpec,
    pub config: SamplerConfig,
    pub samples_path: PathBuf,
    pub trace_path: PathBuf,
    pub plot_path: Option<PathBuf>,
    pub duration_seconds: f64,
    pub clamped_targets: usize,
    pub degenerate_updates: usize,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::IterationRecord;

    #[test]
    fn samples_round_trip_bitwise() {
        let m = DiracMixture::from_angles(&[0.1, 2.0, 6.0, 1e-17]).unwrap();
        let text = samples_csv(&m);
        assert!(text.starts_with("index,theta,x,y\n0,"));
        assert_eq!(text.lines().nth(1).unwrap().split(',').nth(1).unwrap().len(), "1.0000000000000000e-1".len());
        let back = parse_samples(&text).unwrap();
        assert_eq!(back.samples(), m.samples());
        assert_eq!(samples_csv(&back), text);
    }

    #[test]
    fn malformed_samples_are_rejected() {
        assert!(parse_samples("").is_err());
        assert!(parse_samples("index,theta,x,y\n").is_err());
        assert!(parse_samples("a,b\n0,0,1,0\n").is_err());
        assert!(parse_samples("index,theta,x,y\n0,0,1\n").is_err());
        assert!(parse_samples("index,theta,x,y\n1,0,1,0\n").is_err());
        assert!(parse_samples("index,theta,x,y\n0,1.0,1,0\n").is_err());
        assert!(parse_samples("index,theta,x,y\n0,0,2,0\n").is_err());
        assert!(parse_samples("index,theta,x,y\n0,0,1,0\n").is_ok());
    }

    #[test]
    fn trace_leaves_missing_metric_empty() {
        let trace = ConvergenceTrace {
            records: vec![
                IterationRecord { iteration: 1, lambda: 0.99, mean_step_norm: 0.5, wasserstein: None },
                IterationRecord { iteration: 2, lambda: 0.9801, mean_step_norm: 0.25, wasserstein: Some(0.1) },
            ],
        };
        let text = trace_csv(&trace);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert!(lines[1].ends_with(','));
        assert!(lines[2].ends_with("1.0000000000000001e-1"));
    }

    #[test]
    fn manifest_round_trip() {
        let m = RunManifest {
            tool_version: "0.1.0".into(),
            density_path: None,
            density: DensitySpec::VonMises { mu: 1.0, kappa: 2.0 },
            config: SamplerConfig::new(7).with_seed(3),
            samples_path: "s.csv".into(),
            trace_path: "t.csv".into(),
            plot_path: None,
            duration_seconds: 0.5,
            clamped_targets: 0,
            degenerate_updates: 0,
        };
        assert_eq!(RunManifest::from_json(&m.to_json()).unwrap(), m);
        let err = RunManifest::from_json(r#"{"tool_version": 3}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }
}
