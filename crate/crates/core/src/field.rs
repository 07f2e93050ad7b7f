//! Sampled complex scalar fields on uniform 2-D grids.
//!
//! Arrays are stored row-major with shape `(ny, nx)`: the first index is the
//! y sample `j`, the second the x sample `i`. Sample `(nx/2, ny/2)` sits on the
//! grid centre, so sample `(i, j)` has coordinates
//! `center + ((i - nx/2)·dx, (j - ny/2)·dy)`.
//!
//! Field values carry units of √(power)/m so that `Σ|u|²·dx·dy` is the power
//! crossing the plane.

use std::f64::consts::PI;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub center: (f64, f64),
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2x2 samples, got {nx}x{ny}"
            )));
        }
        if !(dx > 0.0 && dx.is_finite() && dy > 0.0 && dy.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "pitches must be positive and finite, got dx={dx}, dy={dy}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            center: (0.0, 0.0),
        })
    }

    pub fn square(n: usize, pitch: f64) -> Result<Self> {
        Self::new(n, n, pitch, pitch)
    }

    pub fn with_center(mut self, cx: f64, cy: f64) -> Self {
        self.center = (cx, cy);
        self
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.ny, self.nx)
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn extent_x(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn extent_y(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    /// Offset of sample `i` from the centre sample, in samples.
    #[inline]
    pub fn offset_x(&self, i: usize) -> f64 {
        i as f64 - (self.nx / 2) as f64
    }

    #[inline]
    pub fn offset_y(&self, j: usize) -> f64 {
        j as f64 - (self.ny / 2) as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.center.0 + self.offset_x(i) * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.center.1 + self.offset_y(j) * self.dy
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    /// Index of the sample nearest to `(x, y)`, or `None` outside the grid.
    pub fn index_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fi = ((x - self.center.0) / self.dx).round() + (self.nx / 2) as f64;
        let fj = ((y - self.center.1) / self.dy).round() + (self.ny / 2) as f64;
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    /// Largest |x| and |y| reached by any sample.
    pub fn edge_abs(&self) -> (f64, f64) {
        let ex = self.x(0).abs().max(self.x(self.nx - 1).abs());
        let ey = self.y(0).abs().max(self.y(self.ny - 1).abs());
        (ex, ey)
    }

    /// Row index of the y = 0 cut (nearest sample).
    pub fn row_of_y0(&self) -> usize {
        self.index_of(self.center.0, 0.0)
            .map(|(_, j)| j)
            .unwrap_or(self.ny / 2)
    }

    pub fn same_sampling(&self, other: &GridSpec) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
        self.nx == other.nx
            && self.ny == other.ny
            && close(self.dx, other.dx)
            && close(self.dy, other.dy)
            && (self.center.0 - other.center.0).abs() <= 1e-9 * self.dx
            && (self.center.1 - other.center.1).abs() <= 1e-9 * self.dy
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} @ ({:.4e} m, {:.4e} m)",
            self.nx, self.ny, self.dx, self.dy
        )
    }
}

/// Which plane of the bench a field lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlaneLabel {
    Aperture,
    PreLens,
    PostLens,
    Focal,
    Image,
    /// Arbitrary plane at the given axial position (m).
    Custom(f64),
}

impl fmt::Display for PlaneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneLabel::Aperture => f.write_str("aperture"),
            PlaneLabel::PreLens => f.write_str("pre_lens"),
            PlaneLabel::PostLens => f.write_str("post_lens"),
            PlaneLabel::Focal => f.write_str("focal"),
            PlaneLabel::Image => f.write_str("image"),
            PlaneLabel::Custom(z) => write!(f, "custom_z{z:e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: GridSpec,
    values: Array2<Complex64>,
    wavelength: f64,
    plane: PlaneLabel,
}

impl ComplexField {
    pub fn new(
        grid: GridSpec,
        values: Array2<Complex64>,
        wavelength: f64,
        plane: PlaneLabel,
    ) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::InvalidField(format!(
                "array shape {:?} does not match grid {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidField(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidField("non-finite sample".into()));
        }
        Ok(Self {
            grid,
            values,
            wavelength,
            plane,
        })
    }

    pub fn zeros(grid: GridSpec, wavelength: f64, plane: PlaneLabel) -> Result<Self> {
        Self::new(grid, Array2::zeros(grid.shape()), wavelength, plane)
    }

    /// Builds a field by evaluating `f(x, y)` at every sample.
    pub fn from_fn(
        grid: GridSpec,
        wavelength: f64,
        plane: PlaneLabel,
        mut f: impl FnMut(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let values = Array2::from_shape_fn(grid.shape(), |(j, i)| f(grid.x(i), grid.y(j)));
        Self::new(grid, values, wavelength, plane)
    }

    /// Internal constructor for results of operations that preserve validity.
    pub(crate) fn from_parts(
        grid: GridSpec,
        values: Array2<Complex64>,
        wavelength: f64,
        plane: PlaneLabel,
    ) -> Self {
        debug_assert_eq!(values.dim(), grid.shape());
        Self {
            grid,
            values,
            wavelength,
            plane,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn plane(&self) -> PlaneLabel {
        self.plane
    }

    pub fn with_plane(mut self, plane: PlaneLabel) -> Self {
        self.plane = plane;
        self
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_parts(
            self.grid,
            self.values.mapv(|v| v * c),
            self.wavelength,
            self.plane,
        )
    }

    /// `a·self + b·other`; grids must match.
    pub fn combine(&self, a: Complex64, other: &ComplexField, b: Complex64) -> Result<Self> {
        if !self.grid.same_sampling(&other.grid) {
            return Err(Error::GridMismatch(format!(
                "{} vs {}",
                self.grid, other.grid
            )));
        }
        let values = &self.values.mapv(|v| v * a) + &other.values.mapv(|v| v * b);
        Ok(Self::from_parts(
            self.grid,
            values,
            self.wavelength,
            self.plane,
        ))
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[(j, i)]
    }
}

#[derive(Debug, Clone)]
pub struct IntensityMap {
    grid: GridSpec,
    values: Array2<f64>,
}

impl IntensityMap {
    pub fn new(grid: GridSpec, values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::InvalidField(format!(
                "array shape {:?} does not match grid {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidField(
                "intensity must be finite and non-negative".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn(grid.shape(), |(j, i)| f(grid.x(i), grid.y(j)));
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[(j, i)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Σ I·dx·dy.
    pub fn total(&self) -> f64 {
        self.values.sum() * self.grid.cell_area()
    }

    /// Copy rescaled to unit total power.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::DegenerateField);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.mapv(|v| v / total),
        })
    }

    /// Intensity along the y = 0 row.
    pub fn cut_y0(&self) -> Profile {
        self.row_profile(self.grid.row_of_y0())
    }

    pub fn row_profile(&self, j: usize) -> Profile {
        Profile {
            x: self.grid.xs(),
            values: self.values.row(j).to_vec(),
        }
    }

    /// ∫ I dy as a function of x.
    pub fn x_marginal(&self) -> Profile {
        let dy = self.grid.dy;
        let values = (0..self.grid.nx)
            .map(|i| self.values.column(i).sum() * dy)
            .collect();
        Profile {
            x: self.grid.xs(),
            values,
        }
    }
}

/// A 1-D intensity cut: sample positions and values.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl Profile {
    pub fn new(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if x.len() != values.len() {
            return Err(Error::InvalidField(format!(
                "profile has {} positions but {} values",
                x.len(),
                values.len()
            )));
        }
        Ok(Self { x, values })
    }

    pub fn from_fn(x: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let values = x.iter().map(|&v| f(v)).collect();
        Self { x, values }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn pitch(&self) -> f64 {
        if self.x.len() < 2 {
            return 0.0;
        }
        (self.x[self.x.len() - 1] - self.x[0]) / (self.x.len() - 1) as f64
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn intensity_of(field: &ComplexField) -> IntensityMap {
    IntensityMap {
        grid: field.grid,
        values: field.values.mapv(|v| v.norm_sqr()),
    }
}

pub fn total_power(field: &ComplexField) -> f64 {
    field.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid.cell_area()
}

/// Rescales a field to unit total power.
pub fn normalize_power(field: &ComplexField) -> Result<ComplexField> {
    let p = total_power(field);
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::DegenerateField);
    }
    Ok(field.scaled(Complex64::new(1.0 / p.sqrt(), 0.0)))
}

/// Result of [`sampling_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingReport {
    pub passed: bool,
    /// Largest phase change between adjacent samples at the grid edge (rad).
    pub worst_phase_step: f64,
    pub lens_phase_step: f64,
    pub propagation_phase_step: f64,
}

/// Checks that the quadratic phases `k r²/(2f)` of a thin lens and
/// `k r²/(2z)` of free propagation change by less than π per sample at the
/// grid edge. Either source may be omitted.
pub fn sampling_check(
    grid: &GridSpec,
    wavelength: f64,
    max_distance: Option<f64>,
    focal_length: Option<f64>,
) -> SamplingReport {
    let k = 2.0 * PI / wavelength;
    let (ex, ey) = grid.edge_abs();
    let step = |length: f64| {
        if !(length > 0.0) || !length.is_finite() {
            return 0.0;
        }
        let sx = k * ex * grid.dx / length;
        let sy = k * ey * grid.dy / length;
        sx.max(sy)
    };
    let lens_phase_step = focal_length.map_or(0.0, step);
    let propagation_phase_step = max_distance.map_or(0.0, step);
    let worst_phase_step = lens_phase_step.max(propagation_phase_step);
    SamplingReport {
        passed: worst_phase_step < PI,
        worst_phase_step,
        lens_phase_step,
        propagation_phase_step,
    }
}
