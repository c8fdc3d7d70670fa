//! Uniform grids, composite quadrature and finite-difference derivatives.
//!
//! Three sample domains are supported: a uniform line ([`Grid1D`]), a radial
//! shell grid with the `4πr²` volume weight folded into its quadrature
//! ([`RadialGrid`]) and a tensor-product plane ([`Grid2D`]). Fields sampled on
//! any of them are carried by [`ComplexField`] and [`RealField`].
//!
//! Quadrature is composite Simpson on non-periodic axes (closed with a
//! Simpson 3/8 panel when the interval count is odd) and the rectangle rule on
//! periodic axes, which is exact for trigonometric polynomials resolved by the
//! grid. Derivatives use 4th-order central stencils in the interior and
//! 2nd-order closures near non-periodic ends.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a grid treats its ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// `xmax` is identified with `xmin`; `n` distinct nodes span one period.
    Periodic,
    /// The field vanishes at both end nodes.
    DirichletZero,
    /// The field decays towards the ends but is not pinned to zero.
    Decaying,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::DirichletZero => "dirichlet-zero",
            Boundary::Decaying => "decaying",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "dirichlet-zero" | "dirichlet" => Ok(Boundary::DirichletZero),
            "decaying" => Ok(Boundary::Decaying),
            other => Err(Error::domain(
                "boundary",
                format!("unknown boundary policy `{other}`"),
            )),
        }
    }
}

/// Uniform sample axis.
///
/// Non-periodic grids place nodes at `xmin + i·(xmax − xmin)/(n − 1)`, so both
/// ends are nodes. Periodic grids use spacing `(xmax − xmin)/n` and stop one
/// spacing short of `xmax`, which is the image of `xmin`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    xmin: f64,
    xmax: f64,
    n: usize,
    spacing: f64,
    boundary: Boundary,
    weights: Arc<[f64]>,
}

impl Grid1D {
    pub fn new(xmin: f64, xmax: f64, n: usize, boundary: Boundary) -> Result<Self> {
        if !xmin.is_finite() {
            return Err(Error::domain("xmin", "must be finite"));
        }
        if !xmax.is_finite() || xmax <= xmin {
            return Err(Error::domain(
                "xmax",
                format!("must exceed xmin ({xmin}), got {xmax}"),
            ));
        }
        if n < 3 {
            return Err(Error::domain("n", format!("need at least 3 nodes, got {n}")));
        }
        let spacing = match boundary {
            Boundary::Periodic => (xmax - xmin) / n as f64,
            _ => (xmax - xmin) / (n - 1) as f64,
        };
        let weights: Arc<[f64]> = match boundary {
            Boundary::Periodic => vec![spacing; n].into(),
            _ => composite_weights(n, spacing).into(),
        };
        Ok(Self {
            xmin,
            xmax,
            n,
            spacing,
            boundary,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }

    pub fn xmax(&self) -> f64 {
        self.xmax
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Quadrature weights, one per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> f64 {
        self.xmin + i as f64 * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the node closest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let i = ((x - self.xmin) / self.spacing).round();
        (i.max(0.0) as usize).min(self.n - 1)
    }

    /// Same nodes, different boundary policy.
    pub fn with_boundary(&self, boundary: Boundary) -> Result<Self> {
        Self::new(self.xmin, self.xmax, self.n, boundary)
    }
}

/// Free-function constructor mirroring [`Grid1D::new`].
pub fn make_uniform_grid(xmin: f64, xmax: f64, n: usize, boundary: Boundary) -> Result<Grid1D> {
    Grid1D::new(xmin, xmax, n, boundary)
}

/// Composite Simpson weights; an odd number of intervals is closed with a
/// 3/8 panel on the last three intervals. Exact for cubics either way.
fn composite_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) {
        intervals
    } else {
        intervals - 3
    };
    let mut i = 0;
    while i < simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if simpson_end < intervals {
        let s = simpson_end;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

/// Radial shell grid on `[rmin, rmax]` with `rmin > 0`.
///
/// Quadrature weights include the `4πr²` volume element. The excluded core
/// `[0, rmin]` is covered by a single linear panel assuming the weighted
/// integrand vanishes at the origin, which holds for `f·r²` with `f` growing
/// no faster than `1/r`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    axis: Grid1D,
    weights: Arc<[f64]>,
}

impl RadialGrid {
    pub const DEFAULT_RMIN: f64 = 1e-3;

    pub fn new(rmin: f64, rmax: f64, n: usize) -> Result<Self> {
        if !(rmin > 0.0) {
            return Err(Error::domain(
                "rmin",
                format!("radial grids exclude the origin, got rmin = {rmin}"),
            ));
        }
        let axis = Grid1D::new(rmin, rmax, n, Boundary::Decaying)?;
        let mut weights: Vec<f64> = axis
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let r = axis.node(i);
                w * 4.0 * PI * r * r
            })
            .collect();
        weights[0] += 0.5 * rmin * 4.0 * PI * rmin * rmin;
        Ok(Self {
            axis,
            weights: weights.into(),
        })
    }

    pub fn axis(&self) -> &Grid1D {
        &self.axis
    }

    pub fn rmin(&self) -> f64 {
        self.axis.xmin
    }

    pub fn rmax(&self) -> f64 {
        self.axis.xmax
    }

    pub fn len(&self) -> usize {
        self.axis.n
    }

    pub fn is_empty(&self) -> bool {
        self.axis.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.axis.spacing
    }

    pub fn node(&self, i: usize) -> f64 {
        self.axis.node(i)
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.axis.nodes()
    }

    /// Volume-weighted quadrature weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Tensor-product plane grid. Nodes are stored row-major with `x` fastest:
/// node `(ix, iy)` sits at index `iy·nx + ix`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    x: Grid1D,
    y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Result<Self> {
        if x.boundary != y.boundary {
            return Err(Error::domain(
                "boundary",
                format!(
                    "both axes must share a boundary policy ({} vs {})",
                    x.boundary.name(),
                    y.boundary.name()
                ),
            ));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &Grid1D {
        &self.x
    }

    pub fn y(&self) -> &Grid1D {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.n * self.y.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.x.n + ix
    }

    pub fn point(&self, i: usize) -> (f64, f64) {
        (self.x.node(i % self.x.n), self.y.node(i / self.x.n))
    }

    pub fn weights(&self) -> Vec<f64> {
        let (wx, wy) = (self.x.weights(), self.y.weights());
        wy.iter()
            .flat_map(|&b| wx.iter().map(move |&a| a * b))
            .collect()
    }
}

/// The sample domain of a field.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Line(Grid1D),
    Radial(RadialGrid),
    Plane(Grid2D),
}

impl Domain {
    pub fn len(&self) -> usize {
        match self {
            Domain::Line(g) => g.len(),
            Domain::Radial(g) => g.len(),
            Domain::Plane(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weights(&self) -> Vec<f64> {
        match self {
            Domain::Line(g) => g.weights().to_vec(),
            Domain::Radial(g) => g.weights().to_vec(),
            Domain::Plane(g) => g.weights(),
        }
    }

    /// The underlying axis for one-dimensional domains.
    pub fn axis(&self) -> Option<&Grid1D> {
        match self {
            Domain::Line(g) => Some(g),
            Domain::Radial(g) => Some(g.axis()),
            Domain::Plane(_) => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        match self {
            Domain::Line(g) => g.is_periodic(),
            Domain::Radial(_) => false,
            Domain::Plane(g) => g.x().is_periodic(),
        }
    }
}

impl From<Grid1D> for Domain {
    fn from(g: Grid1D) -> Self {
        Domain::Line(g)
    }
}

impl From<RadialGrid> for Domain {
    fn from(g: RadialGrid) -> Self {
        Domain::Radial(g)
    }
}

impl From<Grid2D> for Domain {
    fn from(g: Grid2D) -> Self {
        Domain::Plane(g)
    }
}

/// Complex samples on a domain, one per node.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    domain: Domain,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(domain: impl Into<Domain>, values: Vec<Complex64>) -> Result<Self> {
        let domain = domain.into();
        if values.len() != domain.len() {
            return Err(Error::structural(format!(
                "field has {} values but its grid has {} nodes",
                values.len(),
                domain.len()
            )));
        }
        Ok(Self { domain, values })
    }

    pub fn on_line(grid: &Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self {
            domain: Domain::Line(grid.clone()),
            values,
        }
    }

    pub fn on_radial(grid: &RadialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self {
            domain: Domain::Radial(grid.clone()),
            values,
        }
    }

    pub fn on_plane(grid: &Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.point(i);
                f(x, y)
            })
            .collect();
        Self {
            domain: Domain::Plane(grid.clone()),
            values,
        }
    }

    pub fn from_real(domain: impl Into<Domain>, values: &[f64]) -> Result<Self> {
        Self::new(domain, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `∫|ψ|²` with the domain's quadrature.
    pub fn norm2(&self) -> f64 {
        let w = self.domain.weights();
        self.values
            .iter()
            .zip(&w)
            .map(|(v, w)| v.norm_sqr() * w)
            .sum()
    }

    /// Rescaled to unit `norm2`. Fails on a zero field.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm2();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::domain("psi", "cannot normalize a field with zero norm"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n2.sqrt(), 0.0)))
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
        }
    }

    /// `∫ self* · other`.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        self.check_same_domain(other)?;
        let w = self.domain.weights();
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&w)
            .map(|((a, b), w)| a.conj() * b * w)
            .sum())
    }

    pub fn add(&self, other: &ComplexField) -> Result<Self> {
        self.check_same_domain(other)?;
        Ok(Self {
            domain: self.domain.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub(crate) fn check_same_domain(&self, other: &ComplexField) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::structural("fields live on different grids"));
        }
        Ok(())
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            domain: self.domain.clone(),
            values,
        }
    }
}

/// Real samples on a domain (densities, potentials).
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    domain: Domain,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(domain: impl Into<Domain>, values: Vec<f64>) -> Result<Self> {
        let domain = domain.into();
        if values.len() != domain.len() {
            return Err(Error::structural(format!(
                "field has {} values but its grid has {} nodes",
                values.len(),
                domain.len()
            )));
        }
        Ok(Self { domain, values })
    }

    pub fn on_domain(domain: &Domain, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = match domain {
            Domain::Line(g) => (0..g.len()).map(|i| f(g.node(i), 0.0)).collect(),
            Domain::Radial(g) => (0..g.len()).map(|i| f(g.node(i), 0.0)).collect(),
            Domain::Plane(g) => (0..g.len())
                .map(|i| {
                    let (x, y) = g.point(i);
                    f(x, y)
                })
                .collect(),
        };
        Self {
            domain: domain.clone(),
            values,
        }
    }

    pub fn constant(domain: &Domain, c: f64) -> Self {
        Self {
            domain: domain.clone(),
            values: vec![c; domain.len()],
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn integrate(&self) -> f64 {
        integrate_real(&self.domain, &self.values)
    }
}

/// Quadrature of a complex field over its domain. Radial domains include the
/// `4πr²` weight.
pub fn integrate(f: &ComplexField) -> Complex64 {
    let w = f.domain.weights();
    f.values.iter().zip(&w).map(|(v, w)| v * w).sum()
}

/// Quadrature of raw real samples; fails when the length does not match.
pub fn try_integrate_real(domain: &Domain, values: &[f64]) -> Result<f64> {
    if values.len() != domain.len() {
        return Err(Error::structural(format!(
            "{} samples for a grid of {} nodes",
            values.len(),
            domain.len()
        )));
    }
    Ok(integrate_real(domain, values))
}

pub(crate) fn integrate_real(domain: &Domain, values: &[f64]) -> f64 {
    let w = domain.weights();
    values.iter().zip(&w).map(|(v, w)| v * w).sum()
}

/// Plain (unweighted) composite rule along a grid axis.
pub fn integrate_on_axis(grid: &Grid1D, values: &[f64]) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::structural(format!(
            "{} samples for a grid of {} nodes",
            values.len(),
            grid.len()
        )));
    }
    Ok(values.iter().zip(grid.weights()).map(|(v, w)| v * w).sum())
}

/// Direction of a partial derivative on a plane grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

fn check_order(order: u8) -> Result<()> {
    if order == 1 || order == 2 {
        Ok(())
    } else {
        Err(Error::domain(
            "order",
            format!("derivative order must be 1 or 2, got {order}"),
        ))
    }
}

/// First or second derivative along the axis of a line or radial field.
pub fn derivative(f: &ComplexField, order: u8) -> Result<ComplexField> {
    check_order(order)?;
    let axis = f.domain.axis().ok_or_else(|| {
        Error::domain("f", "plane fields need `partial` with an explicit axis")
    })?;
    let out = diff_axis(&f.values, axis.spacing(), axis.is_periodic(), order)?;
    Ok(f.with_values(out))
}

/// Partial derivative of a plane field.
pub fn partial(f: &ComplexField, axis: Axis, order: u8) -> Result<ComplexField> {
    check_order(order)?;
    let Domain::Plane(g) = &f.domain else {
        return Err(Error::domain("f", "partial derivatives need a plane grid"));
    };
    let (nx, ny) = (g.x().len(), g.y().len());
    let mut out = vec![Complex64::new(0.0, 0.0); f.len()];
    match axis {
        Axis::X => {
            for iy in 0..ny {
                let row = &f.values[iy * nx..(iy + 1) * nx];
                let d = diff_axis(row, g.x().spacing(), g.x().is_periodic(), order)?;
                out[iy * nx..(iy + 1) * nx].copy_from_slice(&d);
            }
        }
        Axis::Y => {
            let mut col = vec![Complex64::new(0.0, 0.0); ny];
            for ix in 0..nx {
                for iy in 0..ny {
                    col[iy] = f.values[iy * nx + ix];
                }
                let d = diff_axis(&col, g.y().spacing(), g.y().is_periodic(), order)?;
                for iy in 0..ny {
                    out[iy * nx + ix] = d[iy];
                }
            }
        }
    }
    Ok(f.with_values(out))
}

/// 4th-order central differences; periodic wrap or 2nd-order closures at
/// the two outermost nodes of each end.
pub(crate) fn diff_axis(
    f: &[Complex64],
    h: f64,
    periodic: bool,
    order: u8,
) -> Result<Vec<Complex64>> {
    let n = f.len();
    if n < 5 {
        return Err(Error::domain(
            "n",
            format!("4th-order stencils need at least 5 nodes, got {n}"),
        ));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let at = |i: isize| -> Complex64 {
        let m = n as isize;
        f[(((i % m) + m) % m) as usize]
    };
    let central = |i: isize| -> Complex64 {
        let (m2, m1, c, p1, p2) = (at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2));
        if order == 1 {
            (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h)
        } else {
            (-m2 + m1 * 16.0 - c * 30.0 + p1 * 16.0 - p2) / (12.0 * h * h)
        }
    };
    if periodic {
        for (i, o) in out.iter_mut().enumerate() {
            *o = central(i as isize);
        }
        return Ok(out);
    }
    for (i, o) in out.iter_mut().enumerate().take(n - 2).skip(2) {
        *o = central(i as isize);
    }
    // 2nd-order central one node in from each end
    for &i in &[1, n - 2] {
        out[i] = if order == 1 {
            (f[i + 1] - f[i - 1]) / (2.0 * h)
        } else {
            (f[i + 1] - f[i] * 2.0 + f[i - 1]) / (h * h)
        };
    }
    // 2nd-order one-sided at the ends
    let (l, r) = if order == 1 {
        (
            (f[0] * -3.0 + f[1] * 4.0 - f[2]) / (2.0 * h),
            (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) / (2.0 * h),
        )
    } else {
        (
            (f[0] * 2.0 - f[1] * 5.0 + f[2] * 4.0 - f[3]) / (h * h),
            (f[n - 1] * 2.0 - f[n - 2] * 5.0 + f[n - 3] * 4.0 - f[n - 4]) / (h * h),
        )
    };
    out[0] = l;
    out[n - 1] = r;
    Ok(out)
}
