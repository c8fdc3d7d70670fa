//! Wavefunctions built as finite sums of constant-amplitude plane waves.
//!
//! Each [`WaveComponent`] is one state of motion `(p, E)` carrying a complex
//! amplitude `a`. The field is
//!
//! ```text
//! ψ(x, t) = (2π)^{-1/2} Σ_k a_k exp(i(p_k x − E_k t))
//! ```
//!
//! and the local momentum and energy fields weight each term by `p_k` and
//! `E_k`. All time dependence is analytic.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid1D};
use crate::sampling;

/// One virtual wave.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveComponent {
    pub amplitude: Complex64,
    pub momentum: f64,
    pub energy: f64,
}

impl WaveComponent {
    /// Free-particle component with `E = p²/2`.
    pub fn free(amplitude: Complex64, momentum: f64) -> Self {
        Self {
            amplitude,
            momentum,
            energy: 0.5 * momentum * momentum,
        }
    }

    pub fn weight(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    /// Value of this single term at `(x, t)`, prefactor included.
    pub fn wave(&self, x: f64, t: f64) -> Complex64 {
        let phase = Complex64::new(0.0, self.momentum * x - self.energy * t).exp();
        self.amplitude * phase / (2.0 * PI).sqrt()
    }
}

/// JSON record `{re, im, p}` with an optional explicit energy `e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
}

impl From<ComponentRecord> for WaveComponent {
    fn from(r: ComponentRecord) -> Self {
        let amplitude = Complex64::new(r.re, r.im);
        match r.e {
            Some(energy) => WaveComponent {
                amplitude,
                momentum: r.p,
                energy,
            },
            None => WaveComponent::free(amplitude, r.p),
        }
    }
}

impl From<&WaveComponent> for ComponentRecord {
    fn from(c: &WaveComponent) -> Self {
        ComponentRecord {
            re: c.amplitude.re,
            im: c.amplitude.im,
            p: c.momentum,
            e: Some(c.energy),
        }
    }
}

pub fn parse_components(json: &str) -> Result<Vec<WaveComponent>> {
    let records: Vec<ComponentRecord> = serde_json::from_str(json)?;
    Ok(records.into_iter().map(WaveComponent::from).collect())
}

fn check_nonempty(components: &[WaveComponent]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::domain("components", "need at least one wave component"));
    }
    Ok(())
}

fn weighted_sum(
    components: &[WaveComponent],
    grid: &Grid1D,
    t: f64,
    factor: impl Fn(&WaveComponent) -> f64,
) -> ComplexField {
    ComplexField::on_line(grid, |x| {
        components.iter().map(|c| c.wave(x, t) * factor(c)).sum()
    })
}

/// `ψ(x, t)` on the grid nodes.
pub fn superpose(components: &[WaveComponent], grid: &Grid1D, t: f64) -> Result<ComplexField> {
    check_nonempty(components)?;
    Ok(weighted_sum(components, grid, t, |_| 1.0))
}

/// Local momentum field `Σ p_k ψ_k` and local energy field `Σ E_k ψ_k`,
/// both evaluated term by term.
pub fn local_fields(
    components: &[WaveComponent],
    grid: &Grid1D,
    t: f64,
) -> Result<(ComplexField, ComplexField)> {
    check_nonempty(components)?;
    Ok((
        weighted_sum(components, grid, t, |c| c.momentum),
        weighted_sum(components, grid, t, |c| c.energy),
    ))
}

/// Projection `a = √(2π)/L ∫ ψ exp(−i(px − Et)) dx` over one period. Recovers
/// a component amplitude exactly when `p` is a grid wavenumber.
pub fn project_amplitude(psi: &ComplexField, momentum: f64, energy: f64, t: f64) -> Result<Complex64> {
    let grid = psi
        .domain()
        .axis()
        .filter(|g| g.is_periodic())
        .ok_or_else(|| Error::domain("psi", "projection needs a periodic line grid"))?;
    let period = grid.xmax() - grid.xmin();
    let basis = ComplexField::on_line(grid, |x| Complex64::new(0.0, momentum * x - energy * t).exp());
    Ok(basis.inner(psi)? * (2.0 * PI).sqrt() / period)
}

/// Simulated measurements: each trial materializes one component with
/// probability `|a_k|² / Σ|a_j|²`. Returns counts per component.
pub fn measurement_histogram(components: &[WaveComponent], trials: u64, seed: u64) -> Result<Vec<u64>> {
    check_nonempty(components)?;
    let weights: Vec<f64> = components.iter().map(WaveComponent::weight).collect();
    if weights.iter().all(|w| *w == 0.0) {
        return Err(Error::domain("components", "all amplitudes are zero"));
    }
    sampling::sample_counts(&weights, trials, seed)
}
