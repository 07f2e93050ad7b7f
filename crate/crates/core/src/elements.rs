//! Source fields and thin transmission masks.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::analytic::OpticalConfig;
use crate::error::{Error, Result};
use crate::fft::cis;
use crate::field::{normalize_power, sampling_check, ComplexField, GridSpec, PlaneLabel};

/// Slack allowed on `|t| ≤ 1` for rounding in computed transmissions.
const PASSIVITY_SLACK: f64 = 1e-12;

/// Complex amplitude transmission sampled on a grid.
#[derive(Debug, Clone)]
pub struct TransmissionMask {
    grid: GridSpec,
    values: Array2<Complex64>,
    label: String,
}

impl TransmissionMask {
    pub fn new(
        grid: GridSpec,
        values: Array2<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(Error::InvalidField(format!(
                "mask shape {:?} does not match grid {:?}",
                values.dim(),
                grid.shape()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.norm() <= 1.0 + PASSIVITY_SLACK)) {
            return Err(Error::InvalidField(format!(
                "transmission modulus {} exceeds 1",
                v.norm()
            )));
        }
        Ok(Self {
            grid,
            values,
            label: label.into(),
        })
    }

    pub fn identity(grid: GridSpec) -> Self {
        Self {
            grid,
            values: Array2::from_elem(grid.shape(), Complex64::new(1.0, 0.0)),
            label: "identity".into(),
        }
    }

    pub fn from_fn(
        grid: GridSpec,
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let values = Array2::from_shape_fn(grid.shape(), |(j, i)| f(grid.x(i), grid.y(j)));
        Self::new(grid, values, label)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[(j, i)]
    }

    /// Pointwise product of two masks on the same grid.
    pub fn product(&self, other: &TransmissionMask) -> Result<Self> {
        if !self.grid.same_sampling(&other.grid) {
            return Err(Error::GridMismatch(format!(
                "{} vs {}",
                self.grid, other.grid
            )));
        }
        Ok(Self {
            grid: self.grid,
            values: &self.values * &other.values,
            label: format!("{}*{}", self.label, other.label),
        })
    }
}

/// Absorbing wires parallel to the y axis.
#[derive(Debug, Clone, PartialEq)]
pub struct WireGridSpec {
    pub wire_centers: Vec<f64>,
    pub wire_width: f64,
}

impl WireGridSpec {
    pub fn new(mut wire_centers: Vec<f64>, wire_width: f64) -> Result<Self> {
        if !(wire_width > 0.0 && wire_width.is_finite()) {
            return Err(Error::validation(
                "wire_width",
                format!("must be positive, got {wire_width}"),
            ));
        }
        wire_centers.sort_by(f64::total_cmp);
        if let Some(w) = wire_centers.windows(2).find(|w| w[1] - w[0] < wire_width) {
            return Err(Error::Geometry(format!(
                "wires at {:e} and {:e} overlap (width {:e})",
                w[0], w[1], wire_width
            )));
        }
        Ok(Self {
            wire_centers,
            wire_width,
        })
    }

    /// One wire on every focal-plane fringe minimum inside `[x_min, x_max]`,
    /// each `fill_factor` of the fringe period wide.
    pub fn at_minima(
        config: &OpticalConfig,
        fill_factor: f64,
        x_min: f64,
        x_max: f64,
    ) -> Result<Self> {
        if !(fill_factor > 0.0 && fill_factor < 1.0) {
            return Err(Error::validation(
                "wire_fill_factor",
                format!("must lie in (0, 1), got {fill_factor}"),
            ));
        }
        let width = fill_factor * config.focal_fringe_period();
        Self::new(config.focal_minima(x_min, x_max)?, width)
    }

    pub fn is_empty(&self) -> bool {
        self.wire_centers.is_empty()
    }

    /// True when `x` lies inside a wire.
    pub fn blocks(&self, x: f64) -> bool {
        let half = 0.5 * self.wire_width;
        self.wire_centers.iter().any(|c| (x - c).abs() < half)
    }
}

/// Two Gaussian sub-sources of waist `w₀` at `x_A` and `x_B` weighted by `A`
/// and `B`, normalized to unit power.
pub fn double_pinhole_field(config: &OpticalConfig, grid: &GridSpec) -> Result<ComplexField> {
    let w0 = config.pinhole_waist;
    let pitch = grid.dx.max(grid.dy);
    if !(w0 > 3.0 * pitch) {
        return Err(Error::sampling(
            "double_pinhole_field",
            format!(
                "pinhole waist {w0:e} m must exceed 3 samples ({:e} m)",
                3.0 * pitch
            ),
        ));
    }
    if !(w0 < config.pinhole_separation / 10.0) {
        return Err(Error::sampling(
            "double_pinhole_field",
            format!(
                "pinhole waist {w0:e} m must be below d/10 = {:e} m",
                config.pinhole_separation / 10.0
            ),
        ));
    }
    let (xa, xb) = (config.pinhole_a(), config.pinhole_b());
    let (a, b) = (config.amplitude_a, config.amplitude_b);
    let inv_w2 = 1.0 / (w0 * w0);
    let gauss =
        |x: f64, y: f64, s: (f64, f64)| (-((x - s.0).powi(2) + (y - s.1).powi(2)) * inv_w2).exp();
    let field = ComplexField::from_fn(*grid, config.wavelength, PlaneLabel::Aperture, |x, y| {
        a * gauss(x, y, xa) + b * gauss(x, y, xb)
    })?;
    normalize_power(&field)
}

/// Gaussian-apodized thin lens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLens {
    pub sigma: f64,
    /// `f64::INFINITY` gives a pure apodizer.
    pub focal_length: f64,
}

impl GaussianLens {
    pub fn from_config(config: &OpticalConfig) -> Self {
        Self {
            sigma: config.lens_sigma,
            focal_length: config.focal_length,
        }
    }

    /// `exp(-r²/(2σ²))·exp(-ik r²/(2f))` on `grid`.
    pub fn mask(&self, wavelength: f64, grid: &GridSpec) -> Result<TransmissionMask> {
        if !(self.sigma > 0.0) {
            return Err(Error::validation("lens_sigma", "must be positive"));
        }
        if !(self.focal_length > 0.0) {
            return Err(Error::validation("focal_length", "must be positive"));
        }
        let finite = self.focal_length.is_finite();
        if finite {
            let report = sampling_check(grid, wavelength, None, Some(self.focal_length));
            if !report.passed {
                return Err(Error::sampling(
                    "gaussian_lens_mask",
                    format!(
                        "lens phase step {:.3} rad per sample at the grid edge exceeds π",
                        report.lens_phase_step
                    ),
                ));
            }
        }
        let k = 2.0 * PI / wavelength;
        let inv_2s2 = 0.5 / (self.sigma * self.sigma);
        let curvature = if finite {
            0.5 * k / self.focal_length
        } else {
            0.0
        };
        TransmissionMask::from_fn(*grid, "gaussian_lens", |x, y| {
            let r2 = x * x + y * y;
            cis(-curvature * r2) * (-r2 * inv_2s2).exp()
        })
    }
}

pub fn gaussian_lens_mask(config: &OpticalConfig, grid: &GridSpec) -> Result<TransmissionMask> {
    GaussianLens::from_config(config).mask(config.wavelength, grid)
}

/// Binary mask: 0 inside any wire, 1 elsewhere.
pub fn wire_grid_mask(spec: &WireGridSpec, grid: &GridSpec) -> Result<TransmissionMask> {
    if !spec.is_empty() && spec.wire_width < 3.0 * grid.dx {
        return Err(Error::sampling(
            "wire_grid_mask",
            format!(
                "wire width {:e} m spans fewer than 3 samples of pitch {:e} m",
                spec.wire_width, grid.dx
            ),
        ));
    }
    let column: Vec<bool> = (0..grid.nx).map(|i| spec.blocks(grid.x(i))).collect();
    let values = Array2::from_shape_fn(grid.shape(), |(_, i)| {
        if column[i] {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    TransmissionMask::new(*grid, values, "wire_grid")
}

/// Opaque screen with two circular holes.
pub fn two_hole_screen_mask(
    centers: [(f64, f64); 2],
    hole_radius: f64,
    grid: &GridSpec,
) -> Result<TransmissionMask> {
    if !(hole_radius >= 3.0 * grid.dx.max(grid.dy)) {
        return Err(Error::sampling(
            "two_hole_screen_mask",
            format!("hole radius {hole_radius:e} m spans fewer than 3 samples"),
        ));
    }
    let [c1, c2] = centers;
    let gap = ((c1.0 - c2.0).powi(2) + (c1.1 - c2.1).powi(2)).sqrt();
    if gap < 2.0 * hole_radius {
        return Err(Error::Geometry(format!(
            "holes of radius {hole_radius:e} m with centres {gap:e} m apart overlap"
        )));
    }
    let r2 = hole_radius * hole_radius;
    let inside = |x: f64, y: f64, c: (f64, f64)| (x - c.0).powi(2) + (y - c.1).powi(2) < r2;
    TransmissionMask::from_fn(*grid, "two_hole_screen", |x, y| {
        if inside(x, y, c1) || inside(x, y, c2) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `cos(2πx/period)·exp(-(x² + y²)/window²)`, unit power.
pub fn sinusoidal_object_field(
    period: f64,
    window: f64,
    wavelength: f64,
    grid: &GridSpec,
) -> Result<ComplexField> {
    if !(period >= 8.0 * grid.dx) {
        return Err(Error::sampling(
            "sinusoidal_object_field",
            format!(
                "period {period:e} m spans fewer than 8 samples of {:e} m",
                grid.dx
            ),
        ));
    }
    if !(2.0 * window >= 10.0 * period) {
        return Err(Error::sampling(
            "sinusoidal_object_field",
            format!("window {window:e} m holds fewer than 10 periods"),
        ));
    }
    let q = 2.0 * PI / period;
    let inv_w2 = 1.0 / (window * window);
    let field = ComplexField::from_fn(*grid, wavelength, PlaneLabel::Aperture, |x, y| {
        Complex64::new((q * x).cos() * (-(x * x + y * y) * inv_w2).exp(), 0.0)
    })?;
    normalize_power(&field)
}
