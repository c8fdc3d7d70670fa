//! Time-independent Schrödinger solvers on uniform grids.
//!
//! Two independent routes reach the ground state of `H = −½ d²/dx² + V`:
//!
//! 1. [`ground_state`] / [`excited_states`]: Sturm-sequence bisection on the
//!    symmetric tridiagonal operator followed by shifted inverse iteration
//!    with Rayleigh-quotient shift updates.
//! 2. [`variational_minimize`]: descent on the normalized energy functional
//!    `E[ψ] = ⟨ψ, Hψ⟩ / ⟨ψ, ψ⟩` with a tangent-projected, preconditioned
//!    gradient, Armijo backtracking and renormalization after every step.
//!
//! The operator uses the three-point second difference so it stays symmetric
//! tridiagonal. [`schrodinger_residual`] evaluates `Eψ + ½ψ'' − Vψ` with the
//! same stencil, so a converged pair has a residual at round-off level.
//!
//! Node layouts:
//!
//! - non-periodic line: end nodes are pinned to zero, interior nodes are
//!   unknowns;
//! - periodic line: every node is an unknown, the stencil wraps;
//! - radial Coulomb: the reduced function `u = rR` is solved on the radial
//!   nodes with `u(rmax) = 0`; the left neighbour of the first node sits at
//!   `rmin − h` and takes the value `u₀(rmin − h)/rmin`, i.e. `u` is
//!   continued linearly through `u(0) = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, ComplexField, Domain, Grid1D, RadialGrid, RealField};
use crate::sampling;
use crate::table;

pub const SHIFT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 10_000;
const NORM_TOLERANCE: f64 = 1e-10;

/// Potential energy `V(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    /// `V = 0` between hard walls at the two grid ends; the grid must span
    /// exactly `width`.
    InfiniteWell { width: f64 },
    /// `V = ½ω²x²`.
    Harmonic { omega: f64 },
    /// `V = height` for `|x − center| < width/2`, zero elsewhere.
    FiniteBarrier {
        height: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `V = −Z/r`, radial grids only.
    CoulombRadial { charge: f64 },
    /// Tabulated `(x, V)` pairs, linearly interpolated onto the grid.
    CustomSamples { x: Vec<f64>, v: Vec<f64> },
}

impl Potential {
    pub fn kind(&self) -> &'static str {
        match self {
            Potential::InfiniteWell { .. } => "infinite-well",
            Potential::Harmonic { .. } => "harmonic",
            Potential::FiniteBarrier { .. } => "finite-barrier",
            Potential::CoulombRadial { .. } => "coulomb-radial",
            Potential::CustomSamples { .. } => "custom-samples",
        }
    }

    /// Parses a two-column `x,V` table; a non-numeric first line is taken as
    /// a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = table::parse_numeric_table(text, 2)?;
        let p = Potential::CustomSamples {
            x: table::column(&rows, 0),
            v: table::column(&rows, 1),
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Potential::InfiniteWell { width } if !(*width > 0.0) => {
                Err(Error::domain("width", "well width must be positive"))
            }
            Potential::Harmonic { omega } if !(*omega > 0.0) => {
                Err(Error::domain("omega", "oscillator frequency must be positive"))
            }
            Potential::FiniteBarrier { height, width, center }
                if !(height.is_finite() && *width > 0.0 && center.is_finite()) =>
            {
                Err(Error::domain("width", "barrier needs finite height and positive width"))
            }
            Potential::CoulombRadial { charge } if !charge.is_finite() => {
                Err(Error::domain("charge", "charge must be finite"))
            }
            Potential::CustomSamples { x, v } => {
                if x.len() != v.len() || x.len() < 2 {
                    return Err(Error::domain("samples", "need at least two (x, V) pairs"));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::domain("samples", "x must be strictly increasing"));
                }
                if v.iter().any(|v| !v.is_finite()) {
                    return Err(Error::domain("samples", "V must be finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Values at every node of `domain`.
    pub fn sample(&self, domain: &Domain) -> Result<RealField> {
        self.validate()?;
        let values = match (self, domain) {
            (Potential::CoulombRadial { charge }, Domain::Radial(g)) => {
                g.nodes().iter().map(|r| -charge / r).collect()
            }
            (Potential::CoulombRadial { .. }, _) => {
                return Err(Error::domain("grid", "coulomb-radial needs a radial grid"))
            }
            (_, Domain::Radial(_)) => {
                return Err(Error::domain("grid", "radial grids pair only with coulomb-radial"))
            }
            (_, Domain::Plane(_)) => {
                return Err(Error::domain("grid", "potentials are sampled on line grids"))
            }
            (p, Domain::Line(g)) => sample_line(p, g)?,
        };
        RealField::new(domain.clone(), values)
    }
}

fn sample_line(p: &Potential, g: &Grid1D) -> Result<Vec<f64>> {
    let nodes = g.nodes();
    Ok(match p {
        Potential::InfiniteWell { width } => {
            let span = g.xmax() - g.xmin();
            if (span - width).abs() > 1e-9 * width {
                return Err(Error::domain(
                    "width",
                    format!("grid spans {span} but the well is {width} wide"),
                ));
            }
            vec![0.0; nodes.len()]
        }
        Potential::Harmonic { omega } => nodes.iter().map(|x| 0.5 * omega * omega * x * x).collect(),
        Potential::FiniteBarrier { height, width, center } => nodes
            .iter()
            .map(|x| if (x - center).abs() < 0.5 * width { *height } else { 0.0 })
            .collect(),
        Potential::CustomSamples { x, v } => {
            let (lo, hi) = (x[0], x[x.len() - 1]);
            let slack = 1e-9 * (hi - lo);
            let mut out = Vec::with_capacity(nodes.len());
            for &t in &nodes {
                if t < lo - slack || t > hi + slack {
                    return Err(Error::domain(
                        "samples",
                        format!("grid node {t} lies outside the tabulated range [{lo}, {hi}]"),
                    ));
                }
                let t = t.clamp(lo, hi);
                let j = x.partition_point(|&s| s <= t).clamp(1, x.len() - 1);
                let f = (t - x[j - 1]) / (x[j] - x[j - 1]);
                out.push(v[j - 1] + f * (v[j] - v[j - 1]));
            }
            out
        }
        Potential::CoulombRadial { .. } => unreachable!("handled by caller"),
    })
}

/// Symmetric tridiagonal matrix, optionally closed cyclically by `wrap`
/// (the `(0, m−1)` entry).
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub wrap: Option<f64>,
}

fn guard_pivot(q: f64, scale: f64) -> f64 {
    let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    if q.abs() < tiny {
        if q < 0.0 {
            -tiny
        } else {
            tiny
        }
    } else {
        q
    }
}

impl SymTridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn scale(&self) -> f64 {
        let d = self.diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let o = self.off.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        d.max(o).max(self.wrap.map_or(0.0, f64::abs))
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..m - 1 {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        if let Some(w) = self.wrap {
            y[0] += w * x[m - 1];
            y[m - 1] += w * x[0];
        }
        y
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let m = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..m {
            let mut rad = 0.0;
            if i > 0 {
                rad += self.off[i - 1].abs();
            }
            if i + 1 < m {
                rad += self.off[i].abs();
            }
            if let Some(w) = self.wrap {
                if i == 0 || i == m - 1 {
                    rad += w.abs();
                }
            }
            lo = lo.min(self.diag[i] - rad);
            hi = hi.max(self.diag[i] + rad);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma` (Sylvester inertia).
    pub fn count_below(&self, sigma: f64) -> usize {
        let scale = self.scale().max(sigma.abs());
        match self.wrap {
            None => sturm(&self.diag, &self.off, sigma, scale),
            Some(_) => {
                let m = self.dim();
                let lead = sturm(&self.diag[..m - 1], &self.off[..m - 2], sigma, scale);
                let schur = self.border_schur(sigma);
                lead + usize::from(schur < 0.0)
            }
        }
    }

    /// Border vector coupling the last unknown to the leading block.
    fn border(&self) -> Vec<f64> {
        let m = self.dim();
        let mut b = vec![0.0; m - 1];
        b[m - 2] += self.off[m - 2];
        b[0] += self.wrap.unwrap_or(0.0);
        b
    }

    fn border_schur(&self, sigma: f64) -> f64 {
        let m = self.dim();
        let b = self.border();
        let y = thomas(&self.diag[..m - 1], &self.off[..m - 2], sigma, &b, self.scale());
        let s = self.diag[m - 1] - sigma - dot(&b, &y);
        guard_pivot(s, self.scale())
    }

    /// Solves `(A − σI) x = rhs`.
    pub fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let scale = self.scale().max(sigma.abs());
        match self.wrap {
            None => thomas(&self.diag, &self.off, sigma, rhs, scale),
            Some(_) => {
                let m = self.dim();
                let (d, o) = (&self.diag[..m - 1], &self.off[..m - 2]);
                let b = self.border();
                let yr = thomas(d, o, sigma, &rhs[..m - 1], scale);
                let yb = thomas(d, o, sigma, &b, scale);
                let s = guard_pivot(self.diag[m - 1] - sigma - dot(&b, &yb), scale);
                let last = (rhs[m - 1] - dot(&b, &yr)) / s;
                let mut x: Vec<f64> = yr.iter().zip(&yb).map(|(r, b)| r - b * last).collect();
                x.push(last);
                x
            }
        }
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn sturm(diag: &[f64], off: &[f64], sigma: f64, scale: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
        q = guard_pivot(diag[i] - sigma - coupling, scale);
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn thomas(diag: &[f64], off: &[f64], sigma: f64, rhs: &[f64], scale: f64) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut piv = guard_pivot(diag[0] - sigma, scale);
    c[0] = if m > 1 { off[0] / piv } else { 0.0 };
    d[0] = rhs[0] / piv;
    for i in 1..m {
        piv = guard_pivot(diag[i] - sigma - off[i - 1] * c[i - 1], scale);
        if i + 1 < m {
            c[i] = off[i] / piv;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Pinned,
    Periodic,
    ReducedRadial,
}

/// Discrete `−½D² + V` over the unknown nodes of a grid.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    layout: Layout,
    n_nodes: usize,
    inv_h2: f64,
    potential: Vec<f64>,
    ghost: f64,
    radial: Option<RadialGrid>,
    axis: Grid1D,
}

/// Discretizes `potential` on `domain`.
pub fn build_hamiltonian(potential: &Potential, domain: &Domain) -> Result<Hamiltonian> {
    let sampled = potential.sample(domain)?.into_values();
    let (layout, axis, radial) = match domain {
        Domain::Line(g) if g.is_periodic() => (Layout::Periodic, g.clone(), None),
        Domain::Line(g) => (Layout::Pinned, g.clone(), None),
        Domain::Radial(g) => (Layout::ReducedRadial, g.axis().clone(), Some(g.clone())),
        Domain::Plane(_) => unreachable!("rejected by Potential::sample"),
    };
    let n = axis.len();
    let h = axis.spacing();
    let range = unknown_range(layout, n);
    let ghost = match layout {
        Layout::ReducedRadial => 1.0 - h / axis.xmin(),
        _ => 0.0,
    };
    Ok(Hamiltonian {
        layout,
        n_nodes: n,
        inv_h2: 1.0 / (h * h),
        potential: sampled[range].to_vec(),
        ghost,
        radial,
        axis,
    })
}

fn unknown_range(layout: Layout, n: usize) -> std::ops::Range<usize> {
    match layout {
        Layout::Pinned => 1..n - 1,
        Layout::Periodic => 0..n,
        Layout::ReducedRadial => 0..n - 1,
    }
}

impl Hamiltonian {
    /// Number of unknowns.
    pub fn dim(&self) -> usize {
        self.potential.len()
    }

    pub fn is_reduced_radial(&self) -> bool {
        self.layout == Layout::ReducedRadial
    }

    /// Grid carrying the solved function (the radial axis for `u = rR`).
    pub fn axis(&self) -> &Grid1D {
        &self.axis
    }

    fn range(&self) -> std::ops::Range<usize> {
        unknown_range(self.layout, self.n_nodes)
    }

    /// Node indices where the bare three-point stencil applies.
    fn interior(&self) -> std::ops::Range<usize> {
        match self.layout {
            Layout::Pinned => 1..self.n_nodes - 1,
            Layout::Periodic => 0..self.n_nodes,
            Layout::ReducedRadial => 1..self.n_nodes - 1,
        }
    }

    /// `Hu` on the unknowns, written stencil-first so that constants are
    /// annihilated exactly by the kinetic part.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|j| {
                let c = u[j];
                let left = if j > 0 {
                    u[j - 1]
                } else {
                    match self.layout {
                        Layout::Pinned => 0.0,
                        Layout::Periodic => u[m - 1],
                        Layout::ReducedRadial => self.ghost * c,
                    }
                };
                let right = if j + 1 < m {
                    u[j + 1]
                } else if self.layout == Layout::Periodic {
                    u[0]
                } else {
                    0.0
                };
                -0.5 * (left - 2.0 * c + right) * self.inv_h2 + self.potential[j] * c
            })
            .collect()
    }

    fn apply_complex(&self, u: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = u.iter().map(|v| v.re).collect();
        let im: Vec<f64> = u.iter().map(|v| v.im).collect();
        self.apply(&re)
            .into_iter()
            .zip(self.apply(&im))
            .map(|(a, b)| Complex64::new(a, b))
            .collect()
    }

    /// Tridiagonal form of `H + diag(shift)`.
    fn matrix_with(&self, v: impl Fn(f64) -> f64) -> SymTridiagonal {
        let m = self.dim();
        let kin = self.inv_h2;
        let mut diag: Vec<f64> = self.potential.iter().map(|&p| kin + v(p)).collect();
        if self.layout == Layout::ReducedRadial {
            diag[0] -= 0.5 * self.ghost * kin;
        }
        SymTridiagonal {
            diag,
            off: vec![-0.5 * kin; m - 1],
            wrap: (self.layout == Layout::Periodic).then_some(-0.5 * kin),
        }
    }

    pub fn matrix(&self) -> SymTridiagonal {
        self.matrix_with(|p| p)
    }

    fn gather(&self, values: &[Complex64]) -> Vec<Complex64> {
        values[self.range()].to_vec()
    }

    fn scatter(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_nodes];
        out[self.range()].copy_from_slice(u);
        out
    }

    fn field_domain(&self) -> Domain {
        Domain::Line(self.axis.clone())
    }
}

/// Outcome of an eigen-solve.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub energy: f64,
    /// Unit-norm eigenfunction. For radial problems this is `u = rR` on the
    /// radial axis; see [`EigenResult::radial_field`].
    pub field: ComplexField,
    pub residual_max: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Grid of the originating radial problem, if any.
    pub radial: Option<RadialGrid>,
    pub message: Option<String>,
}

impl EigenResult {
    /// `R = u/r` normalized with the volume weight.
    pub fn radial_field(&self) -> Option<ComplexField> {
        let g = self.radial.as_ref()?;
        let values = self
            .field
            .values()
            .iter()
            .enumerate()
            .map(|(i, u)| u / (g.node(i) * (4.0 * PI).sqrt()))
            .collect();
        ComplexField::new(g.clone(), values).ok()?.normalized().ok()
    }
}

/// Quadrature-normalized field from unknown values.
fn to_field(h: &Hamiltonian, u: &[Complex64]) -> Result<ComplexField> {
    ComplexField::new(h.field_domain(), h.scatter(u))?.normalized()
}

/// Residual `Eψ + ½ψ'' − Vψ` with the solver's stencil and its max-norm over
/// interior nodes. `psi` holds one value per grid node (`u = rR` for radial
/// problems); boundary entries of the returned field are zero.
pub fn schrodinger_residual(
    psi: &ComplexField,
    energy: f64,
    potential: &Potential,
    domain: &Domain,
) -> Result<(ComplexField, f64)> {
    let h = build_hamiltonian(potential, domain)?;
    if psi.len() != h.n_nodes {
        return Err(Error::structural(format!(
            "field has {} nodes, grid has {}",
            psi.len(),
            h.n_nodes
        )));
    }
    let u = h.gather(psi.values());
    let hu = h.apply_complex(&u);
    let r: Vec<Complex64> = u.iter().zip(&hu).map(|(a, b)| a * energy - b).collect();
    let mut full = h.scatter(&r);
    let interior = h.interior();
    for (i, v) in full.iter_mut().enumerate() {
        if !interior.contains(&i) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    let max = full.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    Ok((ComplexField::new(h.field_domain(), full)?, max))
}

/// Discrete energy functional `⟨ψ, Hψ⟩ / ⟨ψ, ψ⟩`.
pub fn energy_functional(psi: &ComplexField, potential: &Potential, domain: &Domain) -> Result<f64> {
    let h = build_hamiltonian(potential, domain)?;
    if psi.len() != h.n_nodes {
        return Err(Error::structural("field and grid sizes differ"));
    }
    let u = h.gather(psi.values());
    let n2 = cnorm2(&u);
    if !(n2 > 0.0) {
        return Err(Error::domain("psi", "zero field"));
    }
    Ok(cdot(&u, &h.apply_complex(&u)).re / n2)
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm2(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum()
}

fn start_vector(h: &Hamiltonian, mode: usize) -> Vec<f64> {
    let m = h.dim();
    (0..m)
        .map(|j| {
            let t = (j as f64 + 1.0) / (m as f64 + 1.0);
            (PI * (mode as f64 + 1.0) * t).sin() + if mode == 0 { 0.0 } else { 1e-3 * t }
        })
        .collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn deflate(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
    }
}

/// Shifted inverse iteration for one eigenpair, deflating `previous`.
fn inverse_iteration(
    h: &Hamiltonian,
    mat: &SymTridiagonal,
    index: usize,
    previous: &[Vec<f64>],
    tol: f64,
) -> Result<(EigenResult, Vec<f64>)> {
    let mut sigma = mat.eigenvalue(index);
    let mut x = start_vector(h, index);
    deflate(&mut x, previous);
    normalize(&mut x);
    let mut rho = dot(&x, &mat.apply(&x));
    let mut iterations = 0;
    let mut shift_ok = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut y = mat.solve_shifted(sigma, &x);
        deflate(&mut y, previous);
        if normalize(&mut y) == 0.0 || y.iter().any(|v| !v.is_finite()) {
            break;
        }
        x = y;
        rho = dot(&x, &mat.apply(&x));
        let resid = mat
            .apply(&x)
            .iter()
            .zip(&x)
            .fold(0.0f64, |m, (a, b)| m.max((a - rho * b).abs()));
        let settled = (rho - sigma).abs() <= SHIFT_TOLERANCE * rho.abs().max(1.0);
        if settled && resid <= 1e-12 * mat.scale() {
            shift_ok = true;
            break;
        }
        // keep the shift on this eigenvalue: only accept Rayleigh updates
        // that do not change the Sturm count below it
        if mat.count_below(rho) == index || settled {
            sigma = rho;
        }
    }
    let u: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let field = to_field(h, &u)?;
    let dom = match &h.radial {
        Some(g) => Domain::Radial(g.clone()),
        None => h.field_domain(),
    };
    let (_, residual_max) = residual_on(h, &field, rho, &dom)?;
    let converged = shift_ok && residual_max <= tol && (field.norm2() - 1.0).abs() <= NORM_TOLERANCE;
    let message = (!converged).then(|| {
        format!("inverse iteration stopped after {iterations} solves (residual {residual_max:.3e})")
    });
    Ok((
        EigenResult {
            energy: rho,
            field,
            residual_max,
            iterations,
            converged,
            radial: h.radial.clone(),
            message,
        },
        x,
    ))
}

fn residual_on(h: &Hamiltonian, field: &ComplexField, energy: f64, _dom: &Domain) -> Result<(ComplexField, f64)> {
    let u = h.gather(field.values());
    let hu = h.apply_complex(&u);
    let r: Vec<Complex64> = u.iter().zip(&hu).map(|(a, b)| a * energy - b).collect();
    let mut full = h.scatter(&r);
    let interior = h.interior();
    for (i, v) in full.iter_mut().enumerate() {
        if !interior.contains(&i) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    let max = full.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    Ok((ComplexField::new(h.field_domain(), full)?, max))
}

/// Lowest eigenpair.
pub fn ground_state(potential: &Potential, domain: &Domain, tol: f64) -> Result<EigenResult> {
    let h = build_hamiltonian(potential, domain)?;
    let mat = h.matrix();
    Ok(inverse_iteration(&h, &mat, 0, &[], tol)?.0)
}

/// The `count` lowest eigenpairs, each deflated against those before it.
pub fn excited_states(
    potential: &Potential,
    domain: &Domain,
    count: usize,
    tol: f64,
) -> Result<Vec<EigenResult>> {
    if count == 0 {
        return Err(Error::domain("count", "need at least one state"));
    }
    let h = build_hamiltonian(potential, domain)?;
    if count > h.dim() {
        return Err(Error::domain("count", format!("grid supports only {} states", h.dim())));
    }
    let mat = h.matrix();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (res, x) = inverse_iteration(&h, &mat, k, &vectors, tol)?;
        vectors.push(x);
        out.push(res);
    }
    Ok(out)
}

/// Step control for [`variational_minimize`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    /// Trial step used when the exact line minimizer is unavailable.
    pub initial_step: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Backtracking gives up below this step.
    pub min_step: f64,
    pub max_iterations: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            armijo: 1e-4,
            min_step: 1e-14,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

/// Seeded random start on the unknown nodes of `domain`.
pub fn random_init(potential: &Potential, domain: &Domain, seed: u64) -> Result<ComplexField> {
    let h = build_hamiltonian(potential, domain)?;
    let mut rng = sampling::seeded_rng(seed);
    let u: Vec<Complex64> = (0..h.dim())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
        .collect();
    ComplexField::new(h.field_domain(), h.scatter(&u))
}

/// Minimizes `⟨ψ, Hψ⟩` on the unit sphere.
///
/// Each step takes the residual `r = Hψ − E[ψ]ψ`, preconditions it with
/// `(−½D² + |V| + 1)⁻¹` and projects out the `ψ` component. The trial step is
/// the exact minimizer along that direction; it is halved until the Armijo
/// condition holds, then the state is renormalized. The functional change
/// is evaluated in closed form on the two-vector span, which avoids
/// cancellation once the decrease drops to the round-off level of `E`.
pub fn variational_minimize(
    potential: &Potential,
    domain: &Domain,
    init: &ComplexField,
    policy: &StepPolicy,
    tol: f64,
) -> Result<EigenResult> {
    let h = build_hamiltonian(potential, domain)?;
    if init.len() != h.n_nodes {
        return Err(Error::structural(format!(
            "initial field has {} nodes, grid has {}",
            init.len(),
            h.n_nodes
        )));
    }
    let mut u = h.gather(init.values());
    let n0 = cnorm2(&u).sqrt();
    if !(n0 > 0.0) || !n0.is_finite() {
        return Err(Error::domain("init", "initial field has zero norm"));
    }
    u.iter_mut().for_each(|v| *v /= n0);
    let precond = h.matrix_with(|p| p.abs() + 1.0);
    let weights = h.field_domain().weights();
    let full_scale = |u: &[Complex64]| -> f64 {
        let full = h.scatter(u);
        let n2: f64 = full.iter().zip(&weights).map(|(v, w)| v.norm_sqr() * w).sum();
        1.0 / n2.sqrt()
    };
    let interior = h.interior();
    let offset = h.range().start;

    let mut step = policy.initial_step;
    let mut iterations = 0;
    let mut converged = false;
    let mut message = None;
    let mut rho;
    loop {
        let hu = h.apply_complex(&u);
        rho = cdot(&u, &hu).re;
        let r: Vec<Complex64> = hu.iter().zip(&u).map(|(a, b)| a - b * rho).collect();
        let c = full_scale(&u);
        let res_max = r
            .iter()
            .enumerate()
            .filter(|(j, _)| interior.contains(&(j + offset)))
            .fold(0.0f64, |m, (_, v)| m.max(v.norm() * c));
        if res_max <= tol {
            converged = true;
            break;
        }
        if iterations >= policy.max_iterations {
            message = Some(format!("no convergence in {iterations} steps (residual {res_max:.3e})"));
            break;
        }
        let re: Vec<f64> = r.iter().map(|v| v.re).collect();
        let im: Vec<f64> = r.iter().map(|v| v.im).collect();
        let mut d: Vec<Complex64> = precond
            .solve_shifted(0.0, &re)
            .into_iter()
            .zip(precond.solve_shifted(0.0, &im))
            .map(|(a, b)| -Complex64::new(a, b))
            .collect();
        let along = cdot(&u, &d);
        d.iter_mut().zip(&u).for_each(|(x, y)| *x -= along * y);

        let slope = cdot(&d, &r).re;
        let hd = h.apply_complex(&d);
        let nd2 = cnorm2(&d);
        let curv = cdot(&d, &hd).re - rho * nd2;
        if !(slope < 0.0) {
            message = Some(format!("descent direction lost (slope {slope:.3e}, residual {res_max:.3e})"));
            break;
        }
        // first trial: exact minimizer of the quotient on span{u, d}
        let nd = nd2.sqrt();
        let (e, b) = (0.5 * curv / nd2, slope / nd);
        let root = (e * e + b * b).sqrt();
        let shift = if e > 0.0 { -b * b / (e + root) } else { e - root };
        let exact = shift / b / nd;
        let mut alpha = if exact.is_finite() && exact > 0.0 { exact } else { 2.0 * step };
        let accepted = loop {
            let delta = (2.0 * alpha * slope + alpha * alpha * curv) / (1.0 + alpha * alpha * nd2);
            if delta <= policy.armijo * alpha * 2.0 * slope {
                break true;
            }
            alpha *= 0.5;
            if alpha < policy.min_step {
                break false;
            }
        };
        if !accepted {
            message = Some(format!("step collapse at iteration {iterations} (residual {res_max:.3e})"));
            break;
        }
        step = alpha;
        let s = 1.0 / (1.0 + alpha * alpha * nd2).sqrt();
        u.iter_mut().zip(&d).for_each(|(x, y)| *x = (*x + y * alpha) * s);
        iterations += 1;
    }
    let field = to_field(&h, &u)?;
    let (_, residual_max) = residual_on(&h, &field, rho, domain)?;
    let converged = converged && residual_max <= tol && (field.norm2() - 1.0).abs() <= NORM_TOLERANCE;
    Ok(EigenResult {
        energy: rho,
        field,
        residual_max,
        iterations,
        converged,
        radial: h.radial.clone(),
        message,
    })
}

/// Convenience: line grid with ends pinned to zero.
pub fn dirichlet_grid(xmin: f64, xmax: f64, n: usize) -> Result<Grid1D> {
    Grid1D::new(xmin, xmax, n, Boundary::DirichletZero)
}
