//! Point-slit interference with constant-amplitude path waves.
//!
//! Every slit sends a wave of unit modulus to each screen point; the path
//! amplitude is the pure phase `w_s e^{i2πr_s/λ}` with `r_s` the exact
//! Euclidean distance in the plane. Intensity is `|Σ_s|²` scaled so the peak
//! is 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;

/// Minimum number of screen samples.
pub const MIN_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlitConfig {
    pub wavelength: f64,
    /// Slit offsets along the slit line.
    pub slits: Vec<f64>,
    /// Per-slit amplitude weights; equal weights when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub screen_distance: f64,
    /// Screen covers `[-screen_half_width, screen_half_width]`.
    pub screen_half_width: f64,
    pub samples: usize,
}

impl SlitConfig {
    /// Two slits at `±d/2`.
    pub fn double(wavelength: f64, separation: f64, screen_distance: f64) -> Self {
        Self::evenly_spaced(2, wavelength, separation, screen_distance)
    }

    /// `count` slits with pitch `separation`, centred on zero. The screen
    /// spans three fringe spacings `λL/d` either side.
    pub fn evenly_spaced(count: usize, wavelength: f64, separation: f64, screen_distance: f64) -> Self {
        let mid = (count as f64 - 1.0) / 2.0;
        let slits = (0..count).map(|k| (k as f64 - mid) * separation).collect();
        let fringe = wavelength * screen_distance / separation;
        Self {
            wavelength,
            slits,
            weights: None,
            screen_distance,
            screen_half_width: 3.0 * fringe,
            samples: 6001,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.slits.is_empty() {
            return Err(Error::domain("slits", "need at least one slit"));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::domain("wavelength", "must be positive"));
        }
        if !(self.screen_distance > 0.0 && self.screen_distance.is_finite()) {
            return Err(Error::domain("screen_distance", "must be positive"));
        }
        if !(self.screen_half_width > 0.0 && self.screen_half_width.is_finite()) {
            return Err(Error::domain("screen_half_width", "must be positive"));
        }
        if self.samples < MIN_SAMPLES {
            return Err(Error::domain(
                "samples",
                format!("need at least {MIN_SAMPLES} screen samples, got {}", self.samples),
            ));
        }
        if self.slits.iter().any(|s| !s.is_finite()) {
            return Err(Error::domain("slits", "slit offsets must be finite"));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.slits.len() {
                return Err(Error::domain("weights", "one weight per slit"));
            }
            if w.iter().any(|v| !v.is_finite()) || w.iter().all(|v| *v == 0.0) {
                return Err(Error::domain("weights", "weights must be finite and not all zero"));
            }
        }
        Ok(())
    }

    /// Separation for a two-slit setup.
    pub fn separation(&self) -> Option<f64> {
        match self.slits.as_slice() {
            [a, b] => Some((b - a).abs()),
            _ => None,
        }
    }

    /// Total slit-array aperture.
    pub fn aperture(&self) -> f64 {
        let lo = self.slits.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.slits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    /// `L ≥ 100·d²/λ` with `d` the aperture.
    pub fn far_field(&self) -> bool {
        let d = self.aperture();
        self.screen_distance >= 100.0 * d * d / self.wavelength
    }

    /// Small-angle fringe spacing `λL/d` for two slits.
    pub fn fraunhofer_spacing(&self) -> Option<f64> {
        self.separation()
            .filter(|d| *d > 0.0)
            .map(|d| self.wavelength * self.screen_distance / d)
    }

    fn weight(&self, s: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[s])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScreenProfile {
    pub y: Vec<f64>,
    pub intensity: Vec<f64>,
}

fn screen_positions(hw: f64, n: usize) -> Vec<f64> {
    // built from both ends so the grid is mirror-exact about y = 0
    let step = 2.0 * hw / (n as f64 - 1.0);
    (0..n)
        .map(|i| {
            let j = n - 1 - i;
            if i <= j {
                -hw + i as f64 * step
            } else {
                hw - j as f64 * step
            }
        })
        .collect()
}

pub fn slit_pattern(config: &SlitConfig) -> Result<ScreenProfile> {
    config.validate()?;
    let k = 2.0 * PI / config.wavelength;
    let l2 = config.screen_distance * config.screen_distance;
    let y = screen_positions(config.screen_half_width, config.samples);
    let raw: Vec<f64> = y
        .iter()
        .map(|&yy| {
            config
                .slits
                .iter()
                .enumerate()
                .map(|(s, &ys)| {
                    let r = (l2 + (yy - ys) * (yy - ys)).sqrt();
                    Complex64::from_polar(config.weight(s), k * r)
                })
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    let peak = raw.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::domain("weights", "screen intensity vanishes everywhere"));
    }
    Ok(ScreenProfile {
        y,
        intensity: raw.into_iter().map(|v| v / peak).collect(),
    })
}

impl ScreenProfile {
    fn peak(&self) -> f64 {
        self.intensity.iter().copied().fold(0.0, f64::max)
    }

    /// Refined positions of local maxima at or above half the peak.
    pub fn maxima(&self) -> Vec<f64> {
        let n = self.intensity.len();
        let f = &self.intensity;
        let peak = self.peak();
        let floor = f.iter().copied().fold(f64::INFINITY, f64::min);
        let mut out = Vec::new();
        // round-off ripples on a flat profile are not fringes
        if peak - floor <= 1e-9 * peak {
            return out;
        }
        let half = 0.5 * peak;
        for i in 1..n.saturating_sub(1) {
            if f[i] >= f[i - 1] && f[i] > f[i + 1] && f[i] >= half {
                // parabola through the three samples
                let denom = f[i - 1] - 2.0 * f[i] + f[i + 1];
                let shift = if denom != 0.0 {
                    (0.5 * (f[i - 1] - f[i + 1]) / denom).clamp(-0.5, 0.5)
                } else {
                    0.0
                };
                let h = self.y[i + 1] - self.y[i];
                out.push(self.y[i] + shift * h);
            }
        }
        out
    }
}

/// Mean spacing of consecutive maxima in the central half of the screen;
/// `None` when fewer than two maxima are found there.
pub fn fringe_spacing(profile: &ScreenProfile) -> Option<f64> {
    let reach = profile.y.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let centre: Vec<f64> = profile
        .maxima()
        .into_iter()
        .filter(|y| y.abs() <= 0.5 * reach)
        .collect();
    if centre.len() < 2 {
        return None;
    }
    Some((centre[centre.len() - 1] - centre[0]) / (centre.len() - 1) as f64)
}

/// Full width at half maximum of the peak closest to `y = 0`.
pub fn central_fwhm(profile: &ScreenProfile) -> Option<f64> {
    let f = &profile.intensity;
    let y = &profile.y;
    let centre = profile
        .maxima()
        .into_iter()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))?;
    let i0 = y.iter().position(|v| *v >= centre).unwrap_or(y.len() - 1);
    let i0 = if i0 > 0 && f[i0 - 1] > f[i0] { i0 - 1 } else { i0 };
    let half = 0.5 * f[i0];
    let cross = |range: &mut dyn Iterator<Item = usize>, step: isize| -> Option<f64> {
        for i in range {
            let j = (i as isize - step) as usize;
            if f[i] < half {
                let t = (f[j] - half) / (f[j] - f[i]);
                return Some(y[j] + t * (y[i] - y[j]));
            }
        }
        None
    };
    let right = cross(&mut (i0 + 1..f.len()), 1)?;
    let left = cross(&mut (0..i0).rev(), -1)?;
    Some(right - left)
}

/// Simulated detections: each trial lands whole in one screen bin with
/// probability proportional to its intensity.
pub fn detections(profile: &ScreenProfile, trials: u64, seed: u64) -> Result<Vec<u64>> {
    sampling::sample_counts(&profile.intensity, trials, seed)
}
