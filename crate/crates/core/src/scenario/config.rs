//! Flat `key = value` configuration files.
//!
//! Blank lines and text after `#` are ignored. Every key is optional; unknown
//! keys are rejected with their line number.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::analytic::OpticalConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    FocalFringes,
    PrelensFringes,
    ImageSpots,
    WireGridDouble,
    WireGridSingle,
    PointScatterer,
    DualitySweep,
    SinusoidalScreen,
    PhotonSampling,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::FocalFringes,
        Scenario::PrelensFringes,
        Scenario::ImageSpots,
        Scenario::WireGridDouble,
        Scenario::WireGridSingle,
        Scenario::PointScatterer,
        Scenario::DualitySweep,
        Scenario::SinusoidalScreen,
        Scenario::PhotonSampling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::FocalFringes => "focal_fringes",
            Scenario::PrelensFringes => "prelens_fringes",
            Scenario::ImageSpots => "image_spots",
            Scenario::WireGridDouble => "wire_grid_double",
            Scenario::WireGridSingle => "wire_grid_single",
            Scenario::PointScatterer => "point_scatterer",
            Scenario::DualitySweep => "duality_sweep",
            Scenario::SinusoidalScreen => "sinusoidal_screen",
            Scenario::PhotonSampling => "photon_sampling",
        }
    }

    /// Scenarios whose image plane must satisfy the lens equation.
    pub fn needs_image_plane(self) -> bool {
        !matches!(self, Scenario::FocalFringes | Scenario::PrelensFringes)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Option<Scenario>,
    pub optics: OpticalConfig,
    pub grid_points: usize,
    pub aperture_pitch: f64,
    pub lens_pitch: f64,
    /// Focal-plane samples per fringe period; odd values put minima mid-sample.
    pub focal_samples_per_period: usize,
    pub image_pitch: f64,
    pub prelens_pitch: f64,
    pub object_pitch: f64,
    pub screen_image_pitch: f64,
    pub wire_fill_factor: f64,
    pub scatterer_polarizability: Complex64,
    /// Index `n` of the fringe minimum holding the scatterer.
    pub scatterer_order: i64,
    pub sinusoid_period: f64,
    pub sinusoid_window: f64,
    pub screen_hole_radius: f64,
    pub photons: usize,
    pub seed: u64,
    pub duality_ratios: Vec<f64>,
    pub output_dir: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            optics: OpticalConfig::default(),
            grid_points: 2048,
            aperture_pitch: 0.25e-6,
            lens_pitch: 5e-6,
            focal_samples_per_period: 101,
            image_pitch: 1e-6,
            prelens_pitch: 5e-6,
            object_pitch: 2e-6,
            screen_image_pitch: 2e-6,
            wire_fill_factor: 0.06,
            scatterer_polarizability: Complex64::new(0.05, 0.0),
            scatterer_order: 0,
            sinusoid_period: 200e-6,
            sinusoid_window: 1e-3,
            screen_hole_radius: 100e-6,
            photons: 100_000,
            seed: 42,
            duality_ratios: vec![1.0, 2.0, 4.0, 10.0],
            output_dir: None,
        }
    }
}

/// Every accepted key, in documentation order.
pub const KEYS: &[&str] = &[
    "scenario",
    "wavelength",
    "pinhole_separation",
    "amplitude_a_re",
    "amplitude_a_im",
    "amplitude_b_re",
    "amplitude_b_im",
    "lens_sigma",
    "focal_length",
    "lens_to_pinholes",
    "lens_to_observation",
    "prelens_distance",
    "pinhole_waist",
    "grid_points",
    "aperture_pitch",
    "lens_pitch",
    "focal_samples_per_period",
    "image_pitch",
    "prelens_pitch",
    "object_pitch",
    "screen_image_pitch",
    "wire_fill_factor",
    "scatterer_polarizability_re",
    "scatterer_polarizability_im",
    "scatterer_order",
    "sinusoid_period",
    "sinusoid_window",
    "screen_hole_radius",
    "photons",
    "seed",
    "duality_ratios",
    "output_dir",
];

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::validation(key, format!("cannot parse `{value}`")))
}

impl ScenarioConfig {
    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let o = &mut self.optics;
        match key {
            "scenario" => self.scenario = Some(value.parse()?),
            "wavelength" => o.wavelength = number(key, value)?,
            "pinhole_separation" => o.pinhole_separation = number(key, value)?,
            "amplitude_a_re" => o.amplitude_a.re = number(key, value)?,
            "amplitude_a_im" => o.amplitude_a.im = number(key, value)?,
            "amplitude_b_re" => o.amplitude_b.re = number(key, value)?,
            "amplitude_b_im" => o.amplitude_b.im = number(key, value)?,
            "lens_sigma" => o.lens_sigma = number(key, value)?,
            "focal_length" => o.focal_length = number(key, value)?,
            "lens_to_pinholes" => o.lens_to_pinholes = number(key, value)?,
            "lens_to_observation" => o.lens_to_observation = number(key, value)?,
            "prelens_distance" => o.prelens_distance = number(key, value)?,
            "pinhole_waist" => o.pinhole_waist = number(key, value)?,
            "grid_points" => self.grid_points = number(key, value)?,
            "aperture_pitch" => self.aperture_pitch = number(key, value)?,
            "lens_pitch" => self.lens_pitch = number(key, value)?,
            "focal_samples_per_period" => self.focal_samples_per_period = number(key, value)?,
            "image_pitch" => self.image_pitch = number(key, value)?,
            "prelens_pitch" => self.prelens_pitch = number(key, value)?,
            "object_pitch" => self.object_pitch = number(key, value)?,
            "screen_image_pitch" => self.screen_image_pitch = number(key, value)?,
            "wire_fill_factor" => self.wire_fill_factor = number(key, value)?,
            "scatterer_polarizability_re" => self.scatterer_polarizability.re = number(key, value)?,
            "scatterer_polarizability_im" => self.scatterer_polarizability.im = number(key, value)?,
            "scatterer_order" => self.scatterer_order = number(key, value)?,
            "sinusoid_period" => self.sinusoid_period = number(key, value)?,
            "sinusoid_window" => self.sinusoid_window = number(key, value)?,
            "screen_hole_radius" => self.screen_hole_radius = number(key, value)?,
            "photons" => self.photons = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "duality_ratios" => {
                self.duality_ratios = value
                    .split(',')
                    .map(|v| number(key, v.trim()))
                    .collect::<Result<_>>()?
            }
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            _ => {
                return Err(Error::validation(key, "unknown key"));
            }
        }
        Ok(())
    }

    /// Checks every parameter; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        self.optics.validate()?;
        if self.grid_points < 16 {
            return Err(Error::validation("grid_points", "must be at least 16"));
        }
        let positive = [
            ("aperture_pitch", self.aperture_pitch),
            ("lens_pitch", self.lens_pitch),
            ("image_pitch", self.image_pitch),
            ("prelens_pitch", self.prelens_pitch),
            ("object_pitch", self.object_pitch),
            ("screen_image_pitch", self.screen_image_pitch),
            ("sinusoid_period", self.sinusoid_period),
            ("sinusoid_window", self.sinusoid_window),
            ("screen_hole_radius", self.screen_hole_radius),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(key, format!("must be positive, got {v}")));
            }
        }
        if self.focal_samples_per_period < 8 {
            return Err(Error::validation(
                "focal_samples_per_period",
                "must be at least 8",
            ));
        }
        if !(self.wire_fill_factor > 0.0 && self.wire_fill_factor < 1.0) {
            return Err(Error::validation(
                "wire_fill_factor",
                format!("must lie in (0, 1), got {}", self.wire_fill_factor),
            ));
        }
        let p = self.scatterer_polarizability;
        if !(p.re.is_finite() && p.im.is_finite()) {
            return Err(Error::validation(
                "scatterer_polarizability_re",
                "must be finite",
            ));
        }
        if self.photons == 0 {
            return Err(Error::validation("photons", "must be at least 1"));
        }
        if self.duality_ratios.is_empty()
            || self
                .duality_ratios
                .iter()
                .any(|r| !(*r > 0.0 && r.is_finite()))
        {
            return Err(Error::validation(
                "duality_ratios",
                "need one or more positive ratios",
            ));
        }
        let o = &self.optics;
        if o.lens_to_observation <= o.focal_length {
            return Err(Error::validation(
                "lens_to_observation",
                "the observation plane must lie beyond the focal plane",
            ));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the checks specific to `scenario`.
    pub fn validate_for(&self, scenario: Scenario) -> Result<()> {
        self.validate()?;
        if scenario.needs_image_plane() && !self.optics.is_image_plane() {
            return Err(Error::Configuration(format!(
                "{scenario} needs the observation plane at the image plane: \
                 |1/P + 1/P' - 1/f|·f = {:.3e}",
                self.optics.lens_equation_mismatch()
            )));
        }
        Ok(())
    }

    /// Focal-plane sample pitch: the fringe period over the samples per period.
    pub fn focal_pitch(&self) -> f64 {
        self.optics.focal_fringe_period() / self.focal_samples_per_period as f64
    }
}

/// Parses configuration text; `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.to_string(),
            line: index + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(parse_err(format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(parse_err(format!("missing value for `{key}`")));
        }
        cfg.set(key, value).map_err(|e| match e {
            Error::Validation { message, .. } => parse_err(format!("`{key}`: {message}")),
            other => other,
        })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}
