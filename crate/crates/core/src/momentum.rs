//! Radial (s-wave) transform between position fields and momentum amplitudes.
//!
//! ```text
//! a(p) = √(2/π) ∫ ψ(r) sinc(pr) r² dr
//! ψ(r) = √(2/π) ∫ a(p) sinc(pr) p² dp
//! ```
//!
//! The pair is unitary for the measure `4πr²dr ↔ 4πp²dp`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Domain, Grid1D, RadialGrid, RealField};

pub const DEFAULT_RMIN: f64 = 1e-3;
pub const DEFAULT_RMAX: f64 = 60.0;
pub const DEFAULT_R_NODES: usize = 6000;
pub const DEFAULT_PMAX: f64 = 50.0;
pub const DEFAULT_P_SAMPLES: usize = 5000;

/// Tail size `|ψ(rmax)|·rmax²` above which truncation is reported.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

pub fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

pub fn default_radial_grid() -> RadialGrid {
    RadialGrid::new(DEFAULT_RMIN, DEFAULT_RMAX, DEFAULT_R_NODES).expect("default grid is valid")
}

/// `DEFAULT_P_SAMPLES` evenly spaced momenta on `[0, DEFAULT_PMAX]`.
pub fn default_p_samples() -> Vec<f64> {
    let n = DEFAULT_P_SAMPLES;
    (0..n).map(|i| DEFAULT_PMAX * i as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentumSpectrum {
    pub p: Vec<f64>,
    pub amplitude: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Quadrature weights for samples `x` (Simpson when uniform, trapezoid
/// otherwise).
fn sample_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    let uniform = x
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
    if uniform && n >= 5 {
        if let Ok(g) = Grid1D::new(x[0], x[n - 1], n, Boundary::Decaying) {
            return g.weights().to_vec();
        }
    }
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let d = 0.5 * (x[i + 1] - x[i]);
        w[i] += d;
        w[i + 1] += d;
    }
    w
}

fn check_samples(name: &'static str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::domain(name, "need at least one sample"));
    }
    if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::domain(name, "samples must be finite and non-negative"));
    }
    Ok(())
}

/// Forward transform of a radial field.
pub fn radial_momentum_transform(psi: &RealField, p_samples: &[f64]) -> Result<MomentumSpectrum> {
    let Domain::Radial(grid) = psi.domain() else {
        return Err(Error::domain("psi", "momentum transform needs a radial field"));
    };
    check_samples("p", p_samples)?;
    let r = grid.nodes();
    let vals = psi.values();
    // radial weights carry 4πr²
    let w: Vec<f64> = grid.weights().iter().zip(vals).map(|(w, v)| w * v / (4.0 * PI)).collect();
    let pref = (2.0 / PI).sqrt();
    let amplitude = p_samples
        .iter()
        .map(|&p| pref * r.iter().zip(&w).map(|(r, w)| w * sinc(p * r)).sum::<f64>())
        .collect();
    let rmax = grid.rmax();
    let tail = vals[vals.len() - 1].abs() * rmax * rmax;
    let warning = (tail > TRUNCATION_THRESHOLD).then(|| {
        format!("field does not decay: |psi(rmax)|*rmax^2 = {tail:.3e} exceeds {TRUNCATION_THRESHOLD:e}")
    });
    Ok(MomentumSpectrum {
        p: p_samples.to_vec(),
        amplitude,
        warning,
    })
}

impl MomentumSpectrum {
    /// `∫|a|² 4πp² dp` over the sampled range.
    pub fn norm2(&self) -> f64 {
        sample_weights(&self.p)
            .iter()
            .zip(&self.p)
            .zip(&self.amplitude)
            .map(|((w, p), a)| w * a * a * 4.0 * PI * p * p)
            .sum()
    }

    /// `a(p)/a(0)` at each sample; needs a sample at `p = 0`.
    pub fn ratio_to_origin(&self) -> Option<Vec<f64>> {
        let i0 = self.p.iter().position(|p| *p == 0.0)?;
        let a0 = self.amplitude[i0];
        (a0 != 0.0).then(|| self.amplitude.iter().map(|a| a / a0).collect())
    }
}

/// Inverse transform onto the radii `r`.
pub fn roundtrip(spectrum: &MomentumSpectrum, r: &[f64]) -> Result<Vec<f64>> {
    check_samples("p", &spectrum.p)?;
    check_samples("r", r)?;
    if spectrum.p.len() != spectrum.amplitude.len() {
        return Err(Error::structural("spectrum has mismatched p and a lengths"));
    }
    let pref = (2.0 / PI).sqrt();
    let w: Vec<f64> = sample_weights(&spectrum.p)
        .iter()
        .zip(&spectrum.p)
        .zip(&spectrum.amplitude)
        .map(|((w, p), a)| w * a * p * p)
        .collect();
    Ok(r.iter()
        .map(|&r| pref * spectrum.p.iter().zip(&w).map(|(p, w)| w * sinc(p * r)).sum::<f64>())
        .collect())
}
