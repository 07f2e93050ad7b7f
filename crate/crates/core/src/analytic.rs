//! Closed-form model of the two-pinhole / Gaussian-lens bench.
//!
//! Two point sources at `x_A = (-d/2, 0)` and `x_B = (+d/2, 0)` with complex
//! weights `A`, `B` sit a distance `P` in front of a thin lens of focal length
//! `f` whose amplitude transmission is `exp(-|x|²/(2σ²))`. Behind the lens, at
//! distance `P'`, the paraxial field is a sum of two complex Gaussians with
//! parameter `α`, `α⁻¹ = 2(1/σ² - ikε)`, `ε = 1/P + 1/P' - 1/f`. Everything
//! here is evaluated in closed form and serves as the reference for the
//! numerical engine.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Threshold on `P/(kσ²)` below which the focal-plane fringe formula is valid.
pub const FOCAL_VALIDITY_LIMIT: f64 = 0.05;
/// Tolerance on `|ε|·f` for a plane to count as the image plane.
pub const LENS_EQUATION_TOLERANCE: f64 = 1e-6;
/// Spot-separation ratio `kσd/P` from which image spots count as separated.
pub const SEPARATION_LIMIT: f64 = 5.0;

/// Geometry and wave parameters of the bench. Lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalConfig {
    pub wavelength: f64,
    pub pinhole_separation: f64,
    pub amplitude_a: Complex64,
    pub amplitude_b: Complex64,
    pub lens_sigma: f64,
    pub focal_length: f64,
    pub lens_to_pinholes: f64,
    pub lens_to_observation: f64,
    pub prelens_distance: f64,
    /// Waist of the Gaussian sub-sources used by the numerical engine only.
    pub pinhole_waist: f64,
}

impl Default for OpticalConfig {
    fn default() -> Self {
        let d = 200e-6;
        Self {
            wavelength: 532e-9,
            pinhole_separation: d,
            amplitude_a: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            amplitude_b: Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            lens_sigma: 1.5e-3,
            focal_length: 0.1,
            lens_to_pinholes: 0.2,
            lens_to_observation: 0.2,
            prelens_distance: 0.15,
            pinhole_waist: d / 200.0,
        }
    }
}

impl OpticalConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength", self.wavelength),
            ("pinhole_separation", self.pinhole_separation),
            ("lens_sigma", self.lens_sigma),
            ("focal_length", self.focal_length),
            ("lens_to_pinholes", self.lens_to_pinholes),
            ("lens_to_observation", self.lens_to_observation),
            ("prelens_distance", self.prelens_distance),
            ("pinhole_waist", self.pinhole_waist),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(key, format!("must be positive, got {v}")));
            }
        }
        if self.amplitude_a.norm_sqr() + self.amplitude_b.norm_sqr() <= 0.0 {
            return Err(Error::validation(
                "amplitude_a",
                "|A|² + |B|² must be positive",
            ));
        }
        Ok(())
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn pinhole_a(&self) -> (f64, f64) {
        (-0.5 * self.pinhole_separation, 0.0)
    }

    pub fn pinhole_b(&self) -> (f64, f64) {
        (0.5 * self.pinhole_separation, 0.0)
    }

    pub fn with_amplitudes(mut self, a: Complex64, b: Complex64) -> Self {
        self.amplitude_a = a;
        self.amplitude_b = b;
        self
    }

    /// `ε = 1/P + 1/P' - 1/f` for the given observation distance.
    pub fn epsilon(&self, observation: f64) -> f64 {
        1.0 / self.lens_to_pinholes + 1.0 / observation - 1.0 / self.focal_length
    }

    /// `P/(kσ²)`; the focal fringe formula needs this ≪ 1.
    pub fn focal_validity_ratio(&self) -> f64 {
        self.lens_to_pinholes / (self.wavenumber() * self.lens_sigma.powi(2))
    }

    pub fn focal_regime_valid(&self) -> bool {
        self.focal_validity_ratio() < FOCAL_VALIDITY_LIMIT
    }

    /// `|ε|·f` at the configured observation plane.
    pub fn lens_equation_mismatch(&self) -> f64 {
        self.epsilon(self.lens_to_observation).abs() * self.focal_length
    }

    pub fn is_image_plane(&self) -> bool {
        self.lens_equation_mismatch() < LENS_EQUATION_TOLERANCE
    }

    /// `kσd/P`: image spot spacing over spot 1/e half-width.
    pub fn separation_ratio(&self) -> f64 {
        self.wavenumber() * self.lens_sigma * self.pinhole_separation / self.lens_to_pinholes
    }

    pub fn magnification(&self) -> f64 {
        -self.lens_to_observation / self.lens_to_pinholes
    }

    /// Focal-plane fringe period `λf/d`.
    pub fn focal_fringe_period(&self) -> f64 {
        self.wavelength * self.focal_length / self.pinhole_separation
    }

    /// Pre-lens fringe period `λp/d`.
    pub fn prelens_fringe_period(&self) -> f64 {
        self.wavelength * self.prelens_distance / self.pinhole_separation
    }

    /// 1/e half-width `P'/(kσ)` of each image-plane intensity spot.
    pub fn image_spot_half_width(&self) -> f64 {
        self.lens_to_observation / (self.wavenumber() * self.lens_sigma)
    }

    /// Geometric images A' and B' at `-(P'/P)·x_{A,B}`.
    pub fn image_spot_centers(&self) -> [(f64, f64); 2] {
        let m = self.magnification();
        let (a, b) = (self.pinhole_a(), self.pinhole_b());
        [(m * a.0, m * a.1), (m * b.0, m * b.1)]
    }

    /// Focal-plane fringe minima `X_n = (f/(kd))·(π - φ + 2πn)` that fall in
    /// `[x_min, x_max]`.
    pub fn focal_minima(&self, x_min: f64, x_max: f64) -> Result<Vec<f64>> {
        let (_, phi) = visibility_phase(self.amplitude_a, self.amplitude_b)?;
        let scale = self.focal_length / (self.wavenumber() * self.pinhole_separation);
        let period = 2.0 * PI * scale;
        let first = scale * (PI - phi);
        let n_lo = ((x_min - first) / period).ceil() as i64;
        let n_hi = ((x_max - first) / period).floor() as i64;
        Ok((n_lo..=n_hi)
            .map(|n| scale * (PI - phi + 2.0 * PI * n as f64))
            .collect())
    }

    /// Minimum number `n` of the focal fringes.
    pub fn focal_minimum(&self, n: i64) -> Result<f64> {
        let (_, phi) = visibility_phase(self.amplitude_a, self.amplitude_b)?;
        let scale = self.focal_length / (self.wavenumber() * self.pinhole_separation);
        Ok(scale * (PI - phi + 2.0 * PI * n as f64))
    }

    /// Focal plane to observation plane, `P' - f`.
    pub fn focal_to_image_distance(&self) -> f64 {
        self.lens_to_observation - self.focal_length
    }
}

/// `||A|² - |B|²| / (|A|² + |B|²)`.
pub fn distinguishability(a: Complex64, b: Complex64) -> Result<f64> {
    let (pa, pb) = (a.norm_sqr(), b.norm_sqr());
    let total = pa + pb;
    if !(total > 0.0) {
        return Err(Error::DegenerateState);
    }
    Ok((pa - pb).abs() / total)
}

/// Fringe visibility `2|A||B|/(|A|²+|B|²)` and phase `arg A - arg B`, wrapped
/// to (-π, π].
pub fn visibility_phase(a: Complex64, b: Complex64) -> Result<(f64, f64)> {
    let total = a.norm_sqr() + b.norm_sqr();
    if !(total > 0.0) {
        return Err(Error::DegenerateState);
    }
    let v = 2.0 * a.norm() * b.norm() / total;
    let phi = if a.norm() == 0.0 || b.norm() == 0.0 {
        0.0
    } else {
        wrap_phase(a.arg() - b.arg())
    };
    Ok((v.min(1.0), phi))
}

/// Wraps an angle to (-π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut p = phi % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    pub distinguishability: f64,
    pub visibility: f64,
    pub phase: f64,
    /// D² + V²
    pub duality_sum: f64,
}

pub fn duality_check(a: Complex64, b: Complex64) -> Result<DualityReport> {
    let d = distinguishability(a, b)?;
    let (v, phi) = visibility_phase(a, b)?;
    Ok(DualityReport {
        distinguishability: d,
        visibility: v,
        phase: phi,
        duality_sum: d * d + v * v,
    })
}

/// Which-path value taken on a sub-ensemble combined with a visibility taken
/// on the full ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisuseReport {
    /// D' = 1 for the photons found in a single image spot.
    pub d_prime: f64,
    /// V of the full ensemble.
    pub visibility: f64,
    /// D'² + V²; reaches 2 for balanced amplitudes.
    pub sum: f64,
    /// True when D' and V refer to different photon ensembles, so the sum is
    /// not the duality relation.
    pub cross_ensemble: bool,
}

pub fn duality_misuse_demo(a: Complex64, b: Complex64) -> Result<MisuseReport> {
    let (v, _) = visibility_phase(a, b)?;
    let single_path = a.norm() == 0.0 || b.norm() == 0.0;
    // Conditioning on one spot makes the origin certain.
    let d_prime = 1.0;
    Ok(MisuseReport {
        d_prime,
        visibility: v,
        sum: d_prime * d_prime + v * v,
        cross_ensemble: !single_path,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelAlpha {
    pub epsilon: f64,
    pub alpha: Complex64,
}

pub fn fresnel_alpha(config: &OpticalConfig, observation: f64) -> FresnelAlpha {
    let epsilon = config.epsilon(observation);
    let k = config.wavenumber();
    let inv = Complex64::new(2.0 / config.lens_sigma.powi(2), -2.0 * k * epsilon);
    FresnelAlpha {
        epsilon,
        alpha: inv.inv(),
    }
}

/// Unnormalized Gaussian term `exp(-k²α|X/P' + x_s/P|²)`.
fn post_lens_term(
    config: &OpticalConfig,
    k2_alpha: Complex64,
    source: (f64, f64),
    x: (f64, f64),
    observation: f64,
) -> Complex64 {
    let p = config.lens_to_pinholes;
    let ux = x.0 / observation + source.0 / p;
    let uy = x.1 / observation + source.1 / p;
    (-k2_alpha * (ux * ux + uy * uy)).exp()
}

/// Total power `∫|A g_A + B g_B|² d²X` of the unnormalized post-lens field.
///
/// With `a = k²α`: `∫|g|² = πP'²/(2 Re a)` and the overlap integral is the
/// same factor times `exp(-|a|²|δ|²/(2 Re a))`, `δ = (x_B - x_A)/P`.
fn post_lens_power(config: &OpticalConfig, k2_alpha: Complex64, observation: f64) -> f64 {
    let re = k2_alpha.re;
    let single = PI * observation * observation / (2.0 * re);
    let delta = config.pinhole_separation / config.lens_to_pinholes;
    let overlap = (-(k2_alpha.norm_sqr()) * delta * delta / (2.0 * re)).exp();
    let (a, b) = (config.amplitude_a, config.amplitude_b);
    single * (a.norm_sqr() + b.norm_sqr() + 2.0 * (a * b.conj()).re * overlap)
}

/// Field behind the lens at transverse position `x` in the plane a distance
/// `observation` from the lens, normalized to unit power over that plane.
pub fn post_lens_field(config: &OpticalConfig, x: (f64, f64), observation: f64) -> Complex64 {
    let k = config.wavenumber();
    let k2_alpha = fresnel_alpha(config, observation).alpha * (k * k);
    let norm = post_lens_power(config, k2_alpha, observation).sqrt();
    let ga = post_lens_term(config, k2_alpha, config.pinhole_a(), x, observation);
    let gb = post_lens_term(config, k2_alpha, config.pinhole_b(), x, observation);
    (config.amplitude_a * ga + config.amplitude_b * gb) / norm
}

/// `|post_lens_field|²`.
pub fn post_lens_intensity(config: &OpticalConfig, x: (f64, f64), observation: f64) -> f64 {
    post_lens_field(config, x, observation).norm_sqr()
}

fn unit_amplitudes(config: &OpticalConfig) -> (Complex64, Complex64) {
    let n = (config.amplitude_a.norm_sqr() + config.amplitude_b.norm_sqr()).sqrt();
    (config.amplitude_a / n, config.amplitude_b / n)
}

/// Focal-plane field in the limit `1/σ² ≪ k/P`:
/// `N·[A e^{-ikP(X/f + x_A/P)²/2} + B e^{-ikP(X/f + x_B/P)²/2}]`, with `N`
/// chosen so the mean intensity is 1.
pub fn focal_field(config: &OpticalConfig, x: (f64, f64)) -> Complex64 {
    let (a, b) = unit_amplitudes(config);
    let k = config.wavenumber();
    let (p, f) = (config.lens_to_pinholes, config.focal_length);
    let term = |s: (f64, f64)| {
        let ux = x.0 / f + s.0 / p;
        let uy = x.1 / f + s.1 / p;
        Complex64::new(0.0, -0.5 * k * p * (ux * ux + uy * uy)).exp()
    };
    a * term(config.pinhole_a()) + b * term(config.pinhole_b())
}

/// `1 + V cos(k d X/f + φ)` along the x axis.
pub fn focal_fringe_intensity(config: &OpticalConfig, x: f64) -> Result<f64> {
    fringe(config, x, config.focal_length)
}

/// `1 + V cos(k d X/p + φ)` in front of the lens.
pub fn prelens_fringe_intensity(config: &OpticalConfig, x: f64) -> Result<f64> {
    fringe(config, x, config.prelens_distance)
}

fn fringe(config: &OpticalConfig, x: f64, length: f64) -> Result<f64> {
    let (v, phi) = visibility_phase(config.amplitude_a, config.amplitude_b)?;
    let k = config.wavenumber();
    Ok(1.0 + v * (k * config.pinhole_separation * x / length + phi).cos())
}

fn require_image_plane(config: &OpticalConfig) -> Result<()> {
    if !config.is_image_plane() {
        return Err(Error::Configuration(format!(
            "observation plane violates the lens equation: |1/P + 1/P' - 1/f|·f = {:.3e} (tolerance {:.0e})",
            config.lens_equation_mismatch(),
            LENS_EQUATION_TOLERANCE
        )));
    }
    Ok(())
}

/// Image-plane intensity, two incoherent-looking Gaussian spots at A' and B',
/// normalized to unit total power.
pub fn image_intensity(config: &OpticalConfig, x: (f64, f64)) -> Result<f64> {
    require_image_plane(config)?;
    let k = config.wavenumber();
    let (p, pp, s) = (
        config.lens_to_pinholes,
        config.lens_to_observation,
        config.lens_sigma,
    );
    let spot = |src: (f64, f64)| {
        let ux = x.0 / pp + src.0 / p;
        let uy = x.1 / pp + src.1 / p;
        (-(k * s).powi(2) * (ux * ux + uy * uy)).exp()
    };
    let (pa, pb) = (config.amplitude_a.norm_sqr(), config.amplitude_b.norm_sqr());
    let norm = (pa + pb) * PI * pp * pp / (k * s).powi(2);
    Ok((pa * spot(config.pinhole_a()) + pb * spot(config.pinhole_b())) / norm)
}

/// Image-plane field from the exact Gaussian-lens expression at ε = 0, in
/// units where a lone unit-weight spot peaks at amplitude |A|/√(|A|²+|B|²).
fn image_field_unit(config: &OpticalConfig, x: (f64, f64)) -> Complex64 {
    let (a, b) = unit_amplitudes(config);
    let k = config.wavenumber();
    let (p, pp, s) = (
        config.lens_to_pinholes,
        config.lens_to_observation,
        config.lens_sigma,
    );
    let spot = |src: (f64, f64)| {
        let ux = x.0 / pp + src.0 / p;
        let uy = x.1 / pp + src.1 / p;
        (-0.5 * (k * s).powi(2) * (ux * ux + uy * uy)).exp()
    };
    a * spot(config.pinhole_a()) + b * spot(config.pinhole_b())
}

/// The three contributions to the image-plane intensity with a point
/// scatterer in the focal plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterTerms {
    /// `|αΨ(x₀)|²`, the same at every image point.
    pub background: f64,
    /// `|Ψ_A + Ψ_B|²`, the unperturbed image.
    pub direct: f64,
    /// `2 Re[(Ψ_A + Ψ_B)* · S]` with `S = αΨ(x₀)e^{ik|x₀ - X|²/(2R)}`.
    pub cross: f64,
}

impl ScatterTerms {
    pub fn total(&self) -> f64 {
        self.background + self.direct + self.cross
    }
}

/// Splits the image-plane intensity with a point scatterer at focal-plane
/// position `x0` into background, direct and cross terms.
///
/// Units are dimensionless: the focal field has unit mean intensity and each
/// image spot peaks at its relative weight, so `polarizability` is the
/// scattered image amplitude per unit focal amplitude.
pub fn scatter_terms(
    config: &OpticalConfig,
    x0: (f64, f64),
    polarizability: Complex64,
    x: (f64, f64),
) -> Result<ScatterTerms> {
    require_image_plane(config)?;
    let r = config.focal_to_image_distance();
    if r.abs() < 1e-12 * config.focal_length {
        return Err(Error::Geometry(
            "image plane coincides with the focal plane (P' - f = 0)".into(),
        ));
    }
    let k = config.wavenumber();
    let psi0 = focal_field(config, x0);
    let dist2 = (x0.0 - x.0).powi(2) + (x0.1 - x.1).powi(2);
    let scattered = polarizability * psi0 * Complex64::new(0.0, k * dist2 / (2.0 * r)).exp();
    let direct = image_field_unit(config, x);
    Ok(ScatterTerms {
        background: scattered.norm_sqr(),
        direct: direct.norm_sqr(),
        cross: 2.0 * (direct.conj() * scattered).re,
    })
}

pub fn scattered_image_intensity(
    config: &OpticalConfig,
    x0: (f64, f64),
    polarizability: Complex64,
    x: (f64, f64),
) -> Result<f64> {
    scatter_terms(config, x0, polarizability, x).map(|t| t.total())
}
