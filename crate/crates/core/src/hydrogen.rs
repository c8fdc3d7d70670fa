//! Closed-form hydrogen ground state (a = 1, E = −1/2 hartree).
//!
//! These are the analytic references every numerical route is checked
//! against: the orbital `ψ₁(r) = π^{-1/2} e^{-r}`, its gradient-form and
//! Laplacian-form kinetic densities, the Coulomb potential density and the
//! normalized momentum amplitude.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Ground-state energy in hartree.
pub const GROUND_ENERGY: f64 = -0.5;

/// Hartree → electronvolt.
pub const HARTREE_EV: f64 = 27.211386;

pub fn psi1(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain("r", format!("radius must be non-negative, got {r}")));
    }
    Ok((-r).exp() / PI.sqrt())
}

/// `½|∇ψ₁|²`
pub fn ke_closed(r: f64) -> f64 {
    (-2.0 * r).exp() / (2.0 * PI)
}

/// `−½ψ₁∇²ψ₁`; changes sign at r = 2.
pub fn k_closed(r: f64) -> f64 {
    (1.0 / r - 0.5) * (-2.0 * r).exp() / PI
}

/// `V|ψ₁|²` with `V = −1/r`.
pub fn pe_closed(r: f64) -> f64 {
    -(-2.0 * r).exp() / (PI * r)
}

/// `E|ψ₁|²`
pub fn e_density_closed(r: f64) -> f64 {
    GROUND_ENERGY * (-2.0 * r).exp() / PI
}

/// Normalized momentum amplitude `a(p) = (2√2/π)(1 + p²)^{-2}`, with
/// `∫|a|² 4πp² dp = 1`.
pub fn hydrogen_momentum_amplitude(p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::domain("p", format!("momentum must be non-negative, got {p}")));
    }
    Ok(2.0 * 2f64.sqrt() / PI / (1.0 + p * p).powi(2))
}

pub fn hartree_to_ev(e: f64) -> f64 {
    e * HARTREE_EV
}

/// Closed-form densities sampled on a radial grid.
#[derive(Clone, Debug)]
pub struct HydrogenProfile {
    pub grid: RadialGrid,
    pub psi: Vec<f64>,
    pub ke: Vec<f64>,
    pub k: Vec<f64>,
    pub pe: Vec<f64>,
    pub e_density: Vec<f64>,
}

/// Volume integrals of the closed-form densities over `[0, rmax]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HydrogenTotals {
    pub ke: f64,
    pub k: f64,
    pub pe: f64,
    pub e: f64,
    pub norm2: f64,
}

pub fn hydrogen_profile(grid: &RadialGrid) -> HydrogenProfile {
    let r = grid.nodes();
    HydrogenProfile {
        grid: grid.clone(),
        psi: r.iter().map(|&r| (-r).exp() / PI.sqrt()).collect(),
        ke: r.iter().map(|&r| ke_closed(r)).collect(),
        k: r.iter().map(|&r| k_closed(r)).collect(),
        pe: r.iter().map(|&r| pe_closed(r)).collect(),
        e_density: r.iter().map(|&r| e_density_closed(r)).collect(),
    }
}

impl HydrogenProfile {
    pub fn radii(&self) -> Vec<f64> {
        self.grid.nodes()
    }

    /// Totals from Simpson on `[rmin, rmax]` plus the exact integral of each
    /// (bounded) weighted density over the excluded core `[0, rmin]`.
    pub fn totals(&self) -> HydrogenTotals {
        let axis = self.grid.axis();
        let w: Vec<f64> = axis
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let r = axis.node(i);
                w * 4.0 * PI * r * r
            })
            .collect();
        let tail = |v: &[f64]| -> f64 { v.iter().zip(&w).map(|(a, b)| a * b).sum() };
        let a = self.grid.rmin();
        let e2a = (-2.0 * a).exp();
        let head_norm = 1.0 - (2.0 * a * a + 2.0 * a + 1.0) * e2a;
        let head_ke = 0.5 - (a * a + a + 0.5) * e2a;
        let head_k = 0.5 + (a * a - a - 0.5) * e2a;
        let head_pe = -(1.0 - (2.0 * a + 1.0) * e2a);
        let psi2: Vec<f64> = self.psi.iter().map(|p| p * p).collect();
        HydrogenTotals {
            ke: tail(&self.ke) + head_ke,
            k: tail(&self.k) + head_k,
            pe: tail(&self.pe) + head_pe,
            e: tail(&self.e_density) + GROUND_ENERGY * head_norm,
            norm2: tail(&psi2) + head_norm,
        }
    }

    /// Signed pointwise imbalance `E|ψ|² − KE(r) − PE(r)`.
    pub fn balance_defect(&self) -> Vec<f64> {
        self.e_density
            .iter()
            .zip(&self.ke)
            .zip(&self.pe)
            .map(|((e, ke), pe)| e - ke - pe)
            .collect()
    }

    /// Imbalance per unit probability density, `E − (KE + PE)/|ψ|²`; equals
    /// `1/r − 1` for the ground state.
    pub fn local_energy_mismatch(&self) -> Vec<f64> {
        self.balance_defect()
            .iter()
            .zip(&self.psi)
            .map(|(d, p)| d / (p * p))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> RadialGrid {
        RadialGrid::new(1e-3, 40.0, 4000).unwrap()
    }

    #[test]
    fn psi1_values() {
        assert_abs_diff_eq!(psi1(0.0).unwrap(), 0.5641896, epsilon = 1e-7);
        assert_abs_diff_eq!(psi1(1.0).unwrap(), 0.2075537, epsilon = 1e-7);
        assert!(psi1(-1.0).is_err());
        let mut prev = psi1(0.0).unwrap();
        for i in 1..200 {
            let v = psi1(i as f64 * 0.5).unwrap();
            assert!(v < prev && v >= 0.0);
            prev = v;
        }
    }

    #[test]
    fn profile_matches_closed_forms() {
        let p = hydrogen_profile(&grid());
        for (i, r) in p.radii().into_iter().enumerate() {
            assert_abs_diff_eq!(p.psi[i], (-r).exp() / PI.sqrt(), epsilon = 1e-14);
            assert!(p.ke[i] >= 0.0);
        }
    }

    #[test]
    fn k_vanishes_at_two_bohr() {
        let g = grid();
        let p = hydrogen_profile(&g);
        let i = g.axis().nearest(2.0);
        assert!(p.k[i].abs() < (-4.0f64).exp() / PI * g.spacing());
        for (j, r) in p.radii().into_iter().enumerate() {
            if j == i {
                continue;
            }
            if r < 2.0 {
                assert!(p.k[j] > 0.0, "k({r}) = {}", p.k[j]);
            } else {
                assert!(p.k[j] < 0.0, "k({r}) = {}", p.k[j]);
            }
        }
    }

    #[test]
    fn energy_ledger() {
        let t = hydrogen_profile(&grid()).totals();
        assert_abs_diff_eq!(t.ke, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(t.pe, -1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(t.e, -0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(t.ke, t.k, epsilon = 1e-5);
        assert_abs_diff_eq!(t.norm2, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn core_correction_makes_totals_insensitive_to_rmin() {
        let coarse = hydrogen_profile(&RadialGrid::new(0.05, 40.0, 4000).unwrap()).totals();
        let fine = hydrogen_profile(&grid()).totals();
        assert_abs_diff_eq!(coarse.k, fine.k, epsilon = 1e-6);
        assert_abs_diff_eq!(coarse.ke, fine.ke, epsilon = 1e-6);
    }

    #[test]
    fn local_balance_fails_except_near_one_bohr() {
        let g = grid();
        let p = hydrogen_profile(&g);
        let defect = p.balance_defect();
        let max = defect.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        assert!(max > 0.01);
        let mismatch = p.local_energy_mismatch();
        let (imin, _) = mismatch
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap();
        assert!((g.node(imin) - 1.0).abs() <= g.spacing());
        for r in [0.5, 2.0] {
            assert!(defect[g.axis().nearest(r)].abs() > 0.0);
        }
    }

    #[test]
    fn ke_bounded_at_origin() {
        let p = hydrogen_profile(&grid());
        let (imax, max) = p
            .ke
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert_eq!(imax, 0);
        assert!(max <= 1.0 / (2.0 * PI) + 1e-12);
    }

    #[test]
    fn momentum_amplitude() {
        let a0 = hydrogen_momentum_amplitude(0.0).unwrap();
        assert_abs_diff_eq!(a0, 0.900316, epsilon = 1e-6);
        assert_abs_diff_eq!(hydrogen_momentum_amplitude(1.0).unwrap() / a0, 0.25, epsilon = 1e-15);
        assert!(hydrogen_momentum_amplitude(-0.1).is_err());
        // ∫|a|² 4πp² dp on [0, 50], trapezoid at dp = 1e-3
        let dp = 1e-3;
        let norm: f64 = (0..=50_000)
            .map(|i| {
                let p = i as f64 * dp;
                let a = hydrogen_momentum_amplitude(p).unwrap();
                let w = if i == 0 || i == 50_000 { 0.5 } else { 1.0 };
                w * dp * a * a * 4.0 * PI * p * p
            })
            .sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn ev_conversion() {
        assert_abs_diff_eq!(hartree_to_ev(-0.5), -13.605693, epsilon = 1e-6);
        assert_eq!(format!("{:.3}", hartree_to_ev(-0.5)), "-13.606");
        assert_eq!(format!("{:.1}", hartree_to_ev(-0.5)), "-13.6");
        assert_eq!(hartree_to_ev(0.0), 0.0);
        assert_abs_diff_eq!(hartree_to_ev(1.0), 27.211386, epsilon = 1e-12);
    }
}
