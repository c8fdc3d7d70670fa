//! Local energy densities of a sampled wavefunction.
//!
//! Two candidate kinetic densities are computed side by side:
//!
//! - gradient form `KE = ½|∇ψ|²`, non-negative at every node;
//! - Laplacian form `K = Re(−½ ψ* ∇²ψ)`, which may go negative.
//!
//! Both integrate to the same total whenever the boundary flux
//! `½ Re(ψ* ∂ₙψ)` vanishes, and [`totals`] reports that flux explicitly so
//! the integration-by-parts identity `KE = K + surface` can be checked.
//!
//! Radial fields are treated as s-states: `∇²ψ = ψ'' + 2ψ'/r`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, partial, Axis, ComplexField, Domain, RealField};

/// Per-node densities of one field.
#[derive(Clone, Debug)]
pub struct DensityProfile {
    pub psi: ComplexField,
    pub ke: Vec<f64>,
    pub k: Vec<f64>,
    /// Imaginary part of `−½ψ*∇²ψ`, kept for diagnostics.
    pub k_imag: Vec<f64>,
    pub pe: Vec<f64>,
    pub e_density: Vec<f64>,
}

/// Integrated totals; `ke_total − k_total` should equal `surface_term`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub ke_total: f64,
    pub k_total: f64,
    pub k_imag_total: f64,
    pub pe_total: f64,
    pub e_total: f64,
    pub surface_term: f64,
    pub norm2: f64,
}

fn gradient(psi: &ComplexField) -> Result<Vec<Vec<Complex64>>> {
    match psi.domain() {
        Domain::Plane(_) => Ok(vec![
            partial(psi, Axis::X, 1)?.into_values(),
            partial(psi, Axis::Y, 1)?.into_values(),
        ]),
        _ => Ok(vec![grid::derivative(psi, 1)?.into_values()]),
    }
}

fn laplacian(psi: &ComplexField) -> Result<Vec<Complex64>> {
    match psi.domain() {
        Domain::Line(_) => Ok(grid::derivative(psi, 2)?.into_values()),
        Domain::Radial(g) => {
            let d1 = grid::derivative(psi, 1)?;
            let d2 = grid::derivative(psi, 2)?;
            Ok(d2
                .values()
                .iter()
                .zip(d1.values())
                .enumerate()
                .map(|(i, (a, b))| a + b * (2.0 / g.node(i)))
                .collect())
        }
        Domain::Plane(_) => {
            let xx = partial(psi, Axis::X, 2)?;
            let yy = partial(psi, Axis::Y, 2)?;
            Ok(xx.values().iter().zip(yy.values()).map(|(a, b)| a + b).collect())
        }
    }
}

fn real_field(psi: &ComplexField, values: Vec<f64>) -> RealField {
    RealField::new(psi.domain().clone(), values).expect("length preserved")
}

/// Gradient-form kinetic density `½|∇ψ|²`.
pub fn ke_density(psi: &ComplexField) -> Result<RealField> {
    let grad = gradient(psi)?;
    let values = (0..psi.len())
        .map(|i| 0.5 * grad.iter().map(|g| g[i].norm_sqr()).sum::<f64>())
        .collect();
    Ok(real_field(psi, values))
}

/// `−½ψ*∇²ψ` per node, complex.
pub fn k_density_complex(psi: &ComplexField) -> Result<ComplexField> {
    let lap = laplacian(psi)?;
    let values = psi
        .values()
        .iter()
        .zip(&lap)
        .map(|(p, l)| -0.5 * p.conj() * l)
        .collect();
    ComplexField::new(psi.domain().clone(), values)
}

/// Laplacian-form kinetic density `Re(−½ψ*∇²ψ)`.
pub fn k_density(psi: &ComplexField) -> Result<RealField> {
    let k = k_density_complex(psi)?;
    Ok(real_field(psi, k.values().iter().map(|v| v.re).collect()))
}

/// `V|ψ|²`.
pub fn pe_density(psi: &ComplexField, potential: &RealField) -> Result<RealField> {
    if psi.domain() != potential.domain() {
        return Err(Error::structural("potential is sampled on a different grid"));
    }
    let values = psi
        .values()
        .iter()
        .zip(potential.values())
        .map(|(p, v)| v * p.norm_sqr())
        .collect();
    Ok(real_field(psi, values))
}

/// Local momentum field `−i∇ψ`, one component per dimension. This is the
/// amplitude-weighted momentum, not a normalized expectation value.
pub fn local_momentum(psi: &ComplexField) -> Result<Vec<ComplexField>> {
    let minus_i = Complex64::new(0.0, -1.0);
    gradient(psi)?
        .into_iter()
        .map(|g| ComplexField::new(psi.domain().clone(), g.into_iter().map(|v| minus_i * v).collect()))
        .collect()
}

/// Local angular momentum `L_z = x·p_y − y·p_x` on a plane grid.
pub fn local_lz(psi: &ComplexField) -> Result<ComplexField> {
    let Domain::Plane(g) = psi.domain() else {
        return Err(Error::domain("psi", "L_z needs a field on a plane grid"));
    };
    let p = local_momentum(psi)?;
    let values = (0..psi.len())
        .map(|i| {
            let (x, y) = g.point(i);
            p[1].values()[i] * x - p[0].values()[i] * y
        })
        .collect();
    ComplexField::new(psi.domain().clone(), values)
}

/// Every per-node density at once. `energy` is the caller's eigenvalue,
/// used only for `E|ψ|²`.
pub fn density_profile(psi: &ComplexField, potential: &RealField, energy: f64) -> Result<DensityProfile> {
    let ke = ke_density(psi)?.into_values();
    let kc = k_density_complex(psi)?;
    let pe = pe_density(psi, potential)?.into_values();
    let e_density = psi.values().iter().map(|p| energy * p.norm_sqr()).collect();
    Ok(DensityProfile {
        psi: psi.clone(),
        ke,
        k: kc.values().iter().map(|v| v.re).collect(),
        k_imag: kc.values().iter().map(|v| v.im).collect(),
        pe,
        e_density,
    })
}

/// Integrated energy ledger plus the boundary flux from integration by parts.
pub fn totals(psi: &ComplexField, potential: &RealField, energy: f64) -> Result<EnergyReport> {
    let prof = density_profile(psi, potential, energy)?;
    let dom = psi.domain();
    let integ = |v: &[f64]| grid::integrate_real(dom, v);
    let norm2 = psi.norm2();
    Ok(EnergyReport {
        ke_total: integ(&prof.ke),
        k_total: integ(&prof.k),
        k_imag_total: integ(&prof.k_imag),
        pe_total: integ(&prof.pe),
        e_total: energy * norm2,
        surface_term: surface_term(psi)?,
        norm2,
    })
}

/// 4th-order one-sided first derivative at index 0 of `f` (stepping by
/// `stride`, signed spacing `h`).
fn edge_derivative(f: impl Fn(usize) -> Complex64, h: f64) -> Complex64 {
    (f(0) * -25.0 + f(1) * 48.0 - f(2) * 36.0 + f(3) * 16.0 - f(4) * 3.0) / (12.0 * h)
}

/// `½ Re(ψ* ∂ₙψ)` integrated over the boundary. Zero on periodic grids; on
/// radial grids only the outer shell at `rmax` contributes.
pub fn surface_term(psi: &ComplexField) -> Result<f64> {
    let v = psi.values();
    match psi.domain() {
        Domain::Line(g) => {
            if g.is_periodic() {
                return Ok(0.0);
            }
            let n = v.len();
            if n < 5 {
                return Err(Error::domain("n", "surface term needs at least 5 nodes"));
            }
            let h = g.spacing();
            let right = edge_derivative(|j| v[n - 1 - j], -h);
            let left = edge_derivative(|j| v[j], h);
            Ok(0.5 * ((v[n - 1].conj() * right).re - (v[0].conj() * left).re))
        }
        Domain::Radial(g) => {
            let n = v.len();
            if n < 5 {
                return Err(Error::domain("n", "surface term needs at least 5 nodes"));
            }
            let r = g.rmax();
            let d = edge_derivative(|j| v[n - 1 - j], -g.spacing());
            Ok(0.5 * (v[n - 1].conj() * d).re * 4.0 * std::f64::consts::PI * r * r)
        }
        Domain::Plane(g) => {
            if g.x().is_periodic() {
                return Ok(0.0);
            }
            let (nx, ny) = (g.x().len(), g.y().len());
            if nx < 5 || ny < 5 {
                return Err(Error::domain("n", "surface term needs at least 5 nodes per axis"));
            }
            let (hx, hy) = (g.x().spacing(), g.y().spacing());
            let at = |ix: usize, iy: usize| v[iy * nx + ix];
            // flux through x = xmax minus x = xmin, integrated along y
            let mut east = vec![0.0; ny];
            let mut west = vec![0.0; ny];
            for (iy, (e, w)) in east.iter_mut().zip(west.iter_mut()).enumerate() {
                let de = edge_derivative(|j| at(nx - 1 - j, iy), -hx);
                let dw = edge_derivative(|j| at(j, iy), hx);
                *e = 0.5 * (at(nx - 1, iy).conj() * de).re;
                *w = 0.5 * (at(0, iy).conj() * dw).re;
            }
            let mut north = vec![0.0; nx];
            let mut south = vec![0.0; nx];
            for (ix, (nn, s)) in north.iter_mut().zip(south.iter_mut()).enumerate() {
                let dn = edge_derivative(|j| at(ix, ny - 1 - j), -hy);
                let ds = edge_derivative(|j| at(ix, j), hy);
                *nn = 0.5 * (at(ix, ny - 1).conj() * dn).re;
                *s = 0.5 * (at(ix, 0).conj() * ds).re;
            }
            let iy = |w: &[f64]| grid::integrate_on_axis(g.y(), w);
            let ix = |w: &[f64]| grid::integrate_on_axis(g.x(), w);
            Ok(iy(&east)? - iy(&west)? + ix(&north)? - ix(&south)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Boundary, Grid1D, Grid2D, RadialGrid};
    use crate::hydrogen;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn gaussian_line(n: usize) -> ComplexField {
        let g = Grid1D::new(-10.0, 10.0, n, Boundary::Decaying).unwrap();
        ComplexField::on_line(&g, |x| Complex64::new(PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0))
    }

    fn max_abs(a: &[f64]) -> f64 {
        a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    #[test]
    fn plane_wave_densities_agree() {
        let g = Grid1D::new(0.0, 2.0 * PI, 4096, Boundary::Periodic).unwrap();
        let amp = 0.7;
        for k in [1.0, 2.0, 3.0] {
            let psi = ComplexField::on_line(&g, |x| Complex64::new(0.0, k * x).exp() * amp);
            let ke = ke_density(&psi).unwrap();
            let kk = k_density(&psi).unwrap();
            for (a, b) in ke.values().iter().zip(kk.values()) {
                assert_abs_diff_eq!(*a, k * k / 2.0 * amp * amp, epsilon = 1e-8);
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn gaussian_densities() {
        let psi = gaussian_line(2001);
        let g = psi.domain().axis().unwrap().clone();
        let mid = g.nearest(0.0);
        let ke = ke_density(&psi).unwrap();
        assert!(ke.values()[mid].abs() < 1e-10);
        assert_abs_diff_eq!(ke.integrate(), 0.25, epsilon = 1e-6);

        let k = k_density(&psi).unwrap();
        assert_abs_diff_eq!(k.values()[mid], 0.5 / PI.sqrt(), epsilon = 1e-6);
        for (i, x) in g.nodes().into_iter().enumerate() {
            let exact = 0.5 * (1.0 - x * x) * (-x * x).exp() / PI.sqrt();
            assert_abs_diff_eq!(k.values()[i], exact, epsilon = 1e-6);
            if x.abs() > 1.0 + g.spacing() && x.abs() < 6.0 {
                assert!(k.values()[i] < 0.0);
            }
        }
    }

    #[test]
    fn hydrogen_k_matches_closed_form() {
        let g = RadialGrid::new(1e-3, 40.0, 4000).unwrap();
        let psi = ComplexField::on_radial(&g, |r| Complex64::new(hydrogen::psi1(r).unwrap(), 0.0));
        let k = k_density(&psi).unwrap();
        let err = g
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, &r)| r >= 0.05)
            .map(|(i, &r)| (k.values()[i] - hydrogen::k_closed(r)).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-4, "max error {err}");
    }

    #[test]
    fn pe_density_cases() {
        let psi = gaussian_line(401);
        let dom = psi.domain().clone();
        let zero = pe_density(&psi, &RealField::constant(&dom, 0.0)).unwrap();
        assert_eq!(max_abs(zero.values()), 0.0);
        let c = pe_density(&psi, &RealField::constant(&dom, 2.5)).unwrap();
        assert_abs_diff_eq!(c.integrate(), 2.5, epsilon = 1e-10);

        let g = RadialGrid::new(1e-3, 40.0, 4000).unwrap();
        let h = ComplexField::on_radial(&g, |r| Complex64::new(hydrogen::psi1(r).unwrap(), 0.0));
        let v = RealField::on_domain(&g.clone().into(), |r, _| -1.0 / r);
        let pe = pe_density(&h, &v).unwrap();
        for (i, r) in g.nodes().into_iter().enumerate() {
            assert_abs_diff_eq!(pe.values()[i], hydrogen::pe_closed(r), epsilon = 1e-10);
        }

        let other = Grid1D::new(-10.0, 10.0, 11, Boundary::Decaying).unwrap();
        assert!(matches!(
            pe_density(&psi, &RealField::constant(&other.into(), 1.0)),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn local_momentum_cases() {
        let g = Grid1D::new(0.0, 2.0 * PI, 4096, Boundary::Periodic).unwrap();
        let k = 2.0;
        let psi = ComplexField::on_line(&g, |x| Complex64::new(0.0, k * x).exp());
        let p = &local_momentum(&psi).unwrap()[0];
        for (a, b) in p.values().iter().zip(psi.values()) {
            assert!((a - b * k).norm() < 1e-8);
        }
        let standing = ComplexField::on_line(&g, |x| Complex64::new((k * x).cos(), 0.0));
        let p = &local_momentum(&standing).unwrap()[0];
        assert!(p.values().iter().all(|v| v.re == 0.0));
        assert!(standing.inner(p).unwrap().norm() < 1e-10);
    }

    #[test]
    fn lz_cases() {
        let ax = Grid1D::new(-6.0, 6.0, 401, Boundary::Decaying).unwrap();
        let g = Grid2D::new(ax.clone(), ax).unwrap();
        let vortex = ComplexField::on_plane(&g, |x, y| Complex64::new(x, y) * (-(x * x + y * y) / 2.0).exp());
        let lz = local_lz(&vortex).unwrap();
        let h = g.x().spacing();
        for i in 0..g.len() {
            let (x, y) = g.point(i);
            if x.abs() < 6.0 - 3.0 * h && y.abs() < 6.0 - 3.0 * h {
                assert!((lz.values()[i] - vortex.values()[i]).norm() < 1e-6);
            }
        }
        let round = ComplexField::on_plane(&g, |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0));
        let lz = local_lz(&round).unwrap();
        // analytically zero; the residue is the O(h⁴) stencil error
        assert!(lz.values().iter().all(|v| v.norm() < 1e-6));

        assert!(matches!(local_lz(&gaussian_line(101)), Err(Error::Domain { .. })));
    }

    #[test]
    fn lz_plane_wave_along_x() {
        let ax = Grid1D::new(0.0, 2.0 * PI, 512, Boundary::Periodic).unwrap();
        let g = Grid2D::new(ax.clone(), ax).unwrap();
        let k = 2.0;
        let psi = ComplexField::on_plane(&g, |x, _| Complex64::new(0.0, k * x).exp());
        let lz = local_lz(&psi).unwrap();
        for i in 0..g.len() {
            let (_, y) = g.point(i);
            let expect = psi.values()[i] * (-y * k);
            assert!((lz.values()[i] - expect).norm() < 1e-5 * (1.0 + y.abs()));
            if y == 0.0 {
                assert!(lz.values()[i].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hydrogen_totals() {
        let g = RadialGrid::new(1e-3, 40.0, 4000).unwrap();
        let psi = ComplexField::on_radial(&g, |r| Complex64::new(hydrogen::psi1(r).unwrap(), 0.0));
        let v = RealField::on_domain(&g.into(), |r, _| -1.0 / r);
        let t = totals(&psi, &v, -0.5).unwrap();
        assert_abs_diff_eq!(t.ke_total, 0.5, epsilon = 1e-5);
        assert_abs_diff_eq!(t.pe_total, -1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(t.e_total, -0.5, epsilon = 1e-5);
        assert!(t.surface_term.abs() < 1e-8);
        assert_abs_diff_eq!(t.ke_total, t.k_total + t.surface_term, epsilon = 1e-6 * t.ke_total);
    }

    #[test]
    fn surface_terms() {
        let g = Grid1D::new(0.0, 2.0 * PI, 128, Boundary::Periodic).unwrap();
        let psi = ComplexField::on_line(&g, |x| Complex64::new(0.0, 3.0 * x).exp());
        assert_eq!(surface_term(&psi).unwrap(), 0.0);
        assert!(surface_term(&gaussian_line(2001)).unwrap().abs() < 1e-20);

        // open interval: the flux is what separates the two totals
        let g = Grid1D::new(0.0, 1.3, 2001, Boundary::Decaying).unwrap();
        let psi = ComplexField::on_line(&g, |x| Complex64::new((2.0 * x).cos(), (x * x).sin()));
        let t = totals(&psi, &RealField::constant(psi.domain(), 0.0), 0.0).unwrap();
        assert!(t.surface_term.abs() > 0.1);
        assert!((t.ke_total - t.k_total - t.surface_term).abs() < 1e-6 * t.ke_total.abs());
    }
}
