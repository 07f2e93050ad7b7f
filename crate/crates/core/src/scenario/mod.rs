//! Config-driven runs of the bench layouts, with reports and exports.

mod config;
mod export;
mod report;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::analysis::{
    absorption_fraction, cross_engine_residual, cross_engine_residual_in,
    measure_distinguishability, measure_visibility, sample_photons, spot_centroids,
    wire_subensemble_report, EventLedger, PhotonEvent,
};
use crate::analytic::{
    distinguishability, duality_check, duality_misuse_demo, focal_field, post_lens_intensity,
    prelens_fringe_intensity, scatter_terms, visibility_phase, wrap_phase, OpticalConfig,
};
use crate::elements::{
    double_pinhole_field, gaussian_lens_mask, sinusoidal_object_field, two_hole_screen_mask,
    wire_grid_mask, TransmissionMask, WireGridSpec,
};
use crate::error::{Error, Result};
use crate::field::{intensity_of, ComplexField, GridSpec, IntensityMap, PlaneLabel, Profile};
use crate::propagation::{apply_mask, fresnel_scaled, run_chain, Step};

pub use config::{load_config, parse_config, Scenario, ScenarioConfig, KEYS};
pub use export::{events_csv, export_outputs, pgm_bytes, profile_csv, Artifacts};
pub use report::{Check, RunReport, SummaryRow, SUMMARY_HEADER};

/// Largest accepted analytic-vs-numerical r.m.s. residual, relative to the peak.
pub const CROSS_ENGINE_LIMIT: f64 = 0.01;

/// Per-plane sampling grids and the lens, shared by the scenarios.
pub struct Bench {
    pub config: ScenarioConfig,
    pub aperture: GridSpec,
    pub lens: GridSpec,
    pub focal: GridSpec,
    pub image: GridSpec,
    pub prelens: GridSpec,
    lens_mask: TransmissionMask,
}

impl Bench {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let n = config.grid_points;
        let lens = GridSpec::square(n, config.lens_pitch)?;
        Ok(Self {
            config: config.clone(),
            aperture: GridSpec::square(n, config.aperture_pitch)?,
            lens_mask: gaussian_lens_mask(&config.optics, &lens)?,
            lens,
            focal: GridSpec::square(n, config.focal_pitch())?,
            image: GridSpec::square(n, config.image_pitch)?,
            prelens: GridSpec::square(n, config.prelens_pitch)?,
        })
    }

    pub fn optics(&self) -> &OpticalConfig {
        &self.config.optics
    }

    pub fn source(&self, a: Complex64, b: Complex64) -> Result<ComplexField> {
        double_pinhole_field(&self.optics().with_amplitudes(a, b), &self.aperture)
    }

    /// Source → lens → focal plane, recorded as `Focal`.
    pub fn focal_plan(&self) -> Vec<Step> {
        let o = self.optics();
        vec![
            Step::fresnel(o.lens_to_pinholes, self.lens),
            Step::Element(self.lens_mask.clone()),
            Step::fresnel(o.focal_length, self.focal),
            Step::Record(PlaneLabel::Focal),
        ]
    }

    /// Source → lens → image plane, recorded as `Image`.
    pub fn image_plan(&self) -> Vec<Step> {
        let o = self.optics();
        vec![
            Step::fresnel(o.lens_to_pinholes, self.lens),
            Step::Element(self.lens_mask.clone()),
            Step::fresnel(o.lens_to_observation, self.image),
            Step::Record(PlaneLabel::Image),
        ]
    }

    /// Focal and image fields of one source.
    pub fn focal_and_image(&self, source: &ComplexField) -> Result<(ComplexField, ComplexField)> {
        let o = self.optics();
        let at_lens = run_chain(
            source,
            &[
                Step::fresnel(o.lens_to_pinholes, self.lens),
                Step::Element(self.lens_mask.clone()),
                Step::Record(PlaneLabel::PostLens),
            ],
        )?
        .output;
        let focal =
            fresnel_scaled(&at_lens, o.focal_length, &self.focal)?.with_plane(PlaneLabel::Focal);
        let image = fresnel_scaled(&at_lens, o.lens_to_observation, &self.image)?
            .with_plane(PlaneLabel::Image);
        Ok((focal, image))
    }

    pub fn focal_field(&self, source: &ComplexField) -> Result<ComplexField> {
        let r = run_chain(source, &self.focal_plan())?;
        Ok(r.output)
    }

    /// Focal plane to image plane.
    pub fn focal_to_image(&self, focal: &ComplexField) -> Result<ComplexField> {
        let o = self.optics();
        Ok(
            fresnel_scaled(focal, o.focal_to_image_distance(), &self.image)?
                .with_plane(PlaneLabel::Image),
        )
    }

    /// Wires on every focal minimum of the configured amplitudes that lies at
    /// least one wire width inside the focal grid.
    pub fn wire_spec(&self) -> Result<WireGridSpec> {
        let g = &self.focal;
        let w = self.config.wire_fill_factor * self.optics().focal_fringe_period();
        WireGridSpec::at_minima(
            self.optics(),
            self.config.wire_fill_factor,
            g.x(0) + w,
            g.x(g.nx - 1) - w,
        )
    }
}

fn unit_map(field: &ComplexField) -> Result<IntensityMap> {
    intensity_of(field).normalized()
}

fn analytic_cut(grid: &GridSpec, f: impl Fn(f64) -> f64) -> Profile {
    Profile::from_fn(grid.xs(), f)
}

/// Residual of a numerical focal cut against `|post_lens_field|²` at `P' = f`.
fn focal_residual(optics: &OpticalConfig, map: &IntensityMap) -> Result<(f64, Profile)> {
    let f = optics.focal_length;
    let reference = analytic_cut(map.grid(), |x| post_lens_intensity(optics, (x, 0.0), f));
    Ok((cross_engine_residual(&map.cut_y0(), &reference)?, reference))
}

fn image_residual(optics: &OpticalConfig, map: &IntensityMap) -> Result<(f64, Profile)> {
    let values = map
        .grid()
        .xs()
        .into_iter()
        .map(|x| crate::analytic::image_intensity(optics, (x, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let reference = Profile::new(map.grid().xs(), values)?;
    Ok((cross_engine_residual(&map.cut_y0(), &reference)?, reference))
}

fn normalized_pair(ratio: f64) -> (Complex64, Complex64) {
    let n = (1.0 + ratio * ratio).sqrt();
    (Complex64::new(ratio / n, 0.0), Complex64::new(1.0 / n, 0.0))
}

/// Runs `scenario` on `config`.
pub fn run_scenario(config: &ScenarioConfig, scenario: Scenario) -> Result<(RunReport, Artifacts)> {
    config.validate_for(scenario)?;
    let bench = Bench::new(config)?;
    match scenario {
        Scenario::FocalFringes => focal_fringes(&bench),
        Scenario::PrelensFringes => prelens_fringes(&bench),
        Scenario::ImageSpots => image_spots(&bench),
        Scenario::WireGridDouble => wire_grid(&bench, false),
        Scenario::WireGridSingle => wire_grid(&bench, true),
        Scenario::PointScatterer => point_scatterer(&bench),
        Scenario::DualitySweep => duality_sweep(&bench),
        Scenario::SinusoidalScreen => sinusoidal_screen(&bench),
        Scenario::PhotonSampling => photon_sampling(&bench),
    }
}

fn fringe_checks(report: &mut RunReport, label: &str, measured: f64, expected: f64) {
    report.checks.push(Check::new(
        format!("{label}_period"),
        measured,
        format!("{expected:e} m within 0.5%"),
        (measured / expected - 1.0).abs() <= 0.005,
    ));
}

fn focal_fringes(bench: &Bench) -> Result<(RunReport, Artifacts)> {
    let o = bench.optics();
    let mut report = RunReport::new(Scenario::FocalFringes.name());
    let source = bench.source(o.amplitude_a, o.amplitude_b)?;
    let focal = bench.focal_field(&source)?;
    let map = unit_map(&focal)?;
    let period = o.focal_fringe_period();
    let m = measure_visibility(&map.cut_y0(), period)?;
    let (v, phi) = visibility_phase(o.amplitude_a, o.amplitude_b)?;
    let (residual, reference) = focal_residual(o, &map)?;

    fringe_checks(&mut report, "focal", m.period, period);
    report
        .checks
        .push(Check::near("focal_visibility", m.visibility, v, 0.02));
    report.checks.push(Check::new(
        "focal_phase",
        wrap_phase(m.phase - phi),
        "|phi_measured - phi| < 5e-2 rad",
        wrap_phase(m.phase - phi).abs() < 0.05,
    ));
    report.checks.push(Check::below(
        "cross_engine_focal",
        residual,
        CROSS_ENGINE_LIMIT,
    ));
    report.residuals.push(("focal".into(), residual));
    report.note(format!(
        "focal regime ratio P/(k sigma^2) = {:.3e} ({}, threshold 5e-2)",
        o.focal_validity_ratio(),
        if o.focal_regime_valid() {
            "valid"
        } else {
            "NOT valid"
        }
    ));
    report.note(format!(
        "analytic V = {v:.6}, phi = {phi:.6} rad, period = {period:.6e} m"
    ));
    report
        .rows
        .push(SummaryRow::new(report.scenario.clone()).with_fringes(&m));
    report.fringes = Some(m);
    let artifacts = Artifacts {
        planes: vec![("focal".into(), map)],
        profiles: vec![("focal_analytic".into(), reference)],
        events: vec![],
    };
    Ok((report, artifacts))
}

fn prelens_fringes(bench: &Bench) -> Result<(RunReport, Artifacts)> {
    let o = bench.optics();
    let mut report = RunReport::new(Scenario::PrelensFringes.name());
    let source = bench.source(o.amplitude_a, o.amplitude_b)?;
    let chain = run_chain(
        &source,
        &[
            Step::fresnel(o.prelens_distance, bench.prelens),
            Step::Record(PlaneLabel::PreLens),
        ],
    )?;
    let map = unit_map(&chain.output)?;
    let period = o.prelens_fringe_period();
    let m = measure_visibility(&map.cut_y0(), period)?;
    let (v, phi) = visibility_phase(o.amplitude_a, o.amplitude_b)?;
    let reference = analytic_cut(&bench.prelens, |x| {
        prelens_fringe_intensity(o, x).unwrap_or(0.0)
    });
    let half = 4.0 * period;
    let residual = cross_engine_residual_in(&map.cut_y0(), &reference, -half, half)?;

    fringe_checks(&mut report, "prelens", m.period, period);
    report
        .checks
        .push(Check::near("prelens_visibility", m.visibility, v, 0.02));
    report.checks.push(Check::new(
        "prelens_phase",
        wrap_phase(m.phase - phi),
        "|phi_measured - phi| < 5e-2 rad",
        wrap_phase(m.phase - phi).abs() < 0.05,
    ));
    report.checks.push(Check::below(
        "cross_engine_prelens",
        residual,
        CROSS_ENGINE_LIMIT,
    ));
    report.residuals.push(("prelens".into(), residual));
    report.note(format!(
        "residual window: |x| <= {half:.3e} m (four periods)"
    ));
    report
        .rows
        .push(SummaryRow::new(report.scenario.clone()).with_fringes(&m));
    report.fringes = Some(m);
    Ok((
        report,
        Artifacts {
            planes: vec![("prelens".into(), map)],
            profiles: vec![("prelens_analytic".into(), reference)],
            events: vec![],
        },
    ))
}

/// Image-plane metrics shared by the image and sweep scenarios.
struct ImageMetrics {
    d: f64,
    mass_a: f64,
    mass_b: f64,
    centroids: [(f64, f64); 2],
    residual: f64,
    reference: Profile,
}

fn image_metrics(o: &OpticalConfig, map: &IntensityMap) -> Result<ImageMetrics> {
    let split = 0.0;
    let dr = measure_distinguishability(map, split)?;
    let centroids = spot_centroids(map, split)?;
    let (residual, reference) = image_residual(o, map)?;
    // x_A = -d/2 images to positive X.
    let a_right = o.image_spot_centers()[0].0 > split;
    let (mass_a, mass_b) = if a_right {
        (dr.mass_right, dr.mass_left)
    } else {
        (dr.mass_left, dr.mass_right)
    };
    Ok(ImageMetrics {
        d: dr.distinguishability,
        mass_a,
        mass_b,
        centroids,
        residual,
        reference,
    })
}

fn image_spots(bench: &Bench) -> Result<(RunReport, Artifacts)> {
    let o = bench.optics();
    let mut report = RunReport::new(Scenario::ImageSpots.name());
    let source = bench.source(o.amplitude_a, o.amplitude_b)?;
    let image = run_chain(&source, &bench.image_plan())?.output;
    let map = unit_map(&image)?;
    let im = image_metrics(o, &map)?;
    let d_an = distinguishability(o.amplitude_a, o.amplitude_b)?;
    let pitch = bench.image.dx;
    let [ca, cb] = o.image_spot_centers();
    let expected = if ca.0 < cb.0 { [ca, cb] } else { [cb, ca] };
    for (side, (got, want)) in ["left", "right"]
        .iter()
        .zip(im.centroids.iter().zip(expected))
    {
        let err = ((got.0 - want.0).powi(2) + (got.1 - want.1).powi(2)).sqrt();
        report.checks.push(Check::new(
            format!("centroid_{side}"),
            err,
            format!(
                "distance to ({:.4e}, {:.4e}) m <= one pixel ({pitch:e} m)",
                want.0, want.1
            ),
            err <= pitch,
        ));
    }
    let (pa, pb) = (o.amplitude_a.norm_sqr(), o.amplitude_b.norm_sqr());
    if pa > 0.0 && pb > 0.0 {
        let ratio = im.mass_a / im.mass_b;
        let target = pa / pb;
        report.checks.push(Check::new(
            "mass_ratio",
            ratio,
            format!("{target:e} within 2%"),
            (ratio / target - 1.0).abs() <= 0.02,
        ));
    }
    report
        .checks
        .push(Check::near("image_distinguishability", im.d, d_an, 0.01));
    report.checks.push(Check::below(
        "cross_engine_image",
        im.residual,
        CROSS_ENGINE_LIMIT,
    ));
    report.residuals.push(("image".into(), im.residual));
    report.note(format!(
        "spot separation ratio k sigma d/P = {:.3} ({}); spot half-width P'/(k sigma) = {:.3e} m",
        o.separation_ratio(),
        if o.separation_ratio() >= crate::analytic::SEPARATION_LIMIT {
            "separated"
        } else {
            "not separated"
        },
        o.image_spot_half_width()
    ));
    report.note(format!(
        "analytic D = {d_an:.6}; spot masses A = {:.6}, B = {:.6}",
        im.mass_a, im.mass_b
    ));
    let mut row = SummaryRow::new(report.scenario.clone());
    row.distinguishability = Some(im.d);
    report.rows.push(row);
    report.distinguishability = Some(im.d);
    report.centroids = Some(im.centroids);
    Ok((
        report,
        Artifacts {
            planes: vec![("image".into(), map)],
            profiles: vec![("image_analytic".into(), im.reference)],
            events: vec![],
        },
    ))
}

/// `(π²/6)(w/Λ)³`: wire absorption on V = 1 fringes for thin wires at minima.
pub fn quadratic_minimum_prediction(fill_factor: f64) -> f64 {
    PI * PI / 6.0 * fill_factor.powi(3)
}

struct WireRun {
    focal: ComplexField,
    after: ComplexField,
    spec: WireGridSpec,
    absorption: f64,
}

fn run_wires(bench: &Bench, a: Complex64, b: Complex64) -> Result<WireRun> {
    let spec = bench.wire_spec()?;
    let mask = wire_grid_mask(&spec, &bench.focal)?;
    let focal = bench.focal_field(&bench.source(a, b)?)?;
    let after = apply_mask(&focal, &mask)?;
    let absorption = absorption_fraction(&focal, &after)?;
    Ok(WireRun {
        focal,
        after,
        spec,
        absorption,
    })
}

fn wire_grid(bench: &Bench, single: bool) -> Result<(RunReport, Artifacts)> {
    let o = bench.optics();
    let scenario = if single {
        Scenario::WireGridSingle
    } else {
        Scenario::WireGridDouble
    };
    let mut report = RunReport::new(scenario.name());
    let (a, b) = if single {
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (o.amplitude_a, o.amplitude_b)
    };
    let run = run_wires(bench, a, b)?;
    let fill = bench.config.wire_fill_factor;
    let prediction = quadratic_minimum_prediction(fill);
    let r = run.absorption;
    if single {
        report
            .checks
            .push(Check::near("absorption_single", r, fill, 0.01));
    } else {
        report
            .checks
            .push(Check::new("absorption_double", r, "<= 5e-3", r <= 0.005));
        let ratio = r / prediction;
        report.checks.push(Check::new(
            "absorption_vs_quadratic_prediction",
            ratio,
            format!("R/{prediction:.3e} within a factor 2"),
            (0.5..=2.0).contains(&ratio),
        ));
    }
    let analytic_optics = o.with_amplitudes(a, b);
    let focal_map = unit_map(&run.focal)?;
    let (residual, reference) = focal_residual(&analytic_optics, &focal_map)?;
    report.checks.push(Check::below(
        "cross_engine_focal",
        residual,
        CROSS_ENGINE_LIMIT,
    ));
    report.residuals.push(("focal".into(), residual));
    report.note(format!(
        "{} wires of width {:.4e} m (fill {fill}) at the focal minima; quadratic-minimum prediction {prediction:.4e}",
        run.spec.wire_centers.len(),
        run.spec.wire_width
    ));
    let image = bench.focal_to_image(&run.after)?;
    let image_map = unit_map(&image)?;
    let mut row = SummaryRow::new(report.scenario.clone());
    row.absorption = Some(r);
    report.rows.push(row);
    report.absorption = Some(r);
    Ok((
        report,
        Artifacts {
            planes: vec![
                ("focal".into(), focal_map),
                ("image_after_wires".into(), image_map),
            ],
            profiles: vec![("focal_analytic".into(), reference)],
            events: vec![],
        },
    ))
}

fn point_scatterer(bench: &Bench) -> Result<(RunReport, Artifacts)> {
    let o = bench.optics();
    let cfg = &bench.config;
    let mut report = RunReport::new(Scenario::PointScatterer.name());
    let x0 = o.focal_minimum(cfg.scatterer_order)?;
    let pol = cfg.scatterer_polarizability;
    let xs = bench.image.xs();
    let zero = Complex64::new(0.0, 0.0);
    let single = o.with_amplitudes(o.amplitude_a, zero);

    let mut clean = Vec::with_capacity(xs.len());
    let mut with = Vec::with_capacity(xs.len());
    let mut single_with = Vec::with_capacity(xs.len());
    let mut background: f64 = 0.0;
    for &x in &xs {
        clean.push(scatter_terms(o, (x0, 0.0), zero, (x, 0.0))?.total());
        with.push(scatter_terms(o, (x0, 0.0), pol, (x, 0.0))?.total());
        let t = scatter_terms(&single, (x0, 0.0), pol, (x, 0.0))?;
        background = background.max(t.background);
        single_with.push(t.total());
    }
    let peak = clean.iter().copied().fold(0.0, f64::max);
    let max_diff = clean
        .iter()
        .zip(&with)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let rel = max_diff / peak;
    report.checks.push(Check::new(
        "double_pinhole_image_change",
        rel,
        "<= 1e-6 of the unperturbed peak",
        rel <= 1e-6,
    ));
    report.checks.push(Check::new(
        "single_pinhole_background",
        background,
        format!(">= 1e3 x double-pinhole change ({max_diff:.3e}) and > 0"),
        background > 0.0 && background >= 1e3 * max_diff,
    ));
    report.note(format!(
        "scatterer at x0 = {x0:.6e} m (minimum n = {}), polarizability {pol}, |Psi(x0)|^2 = {:.3e} (both) / {:.3e} (single)",
        cfg.scatterer_order,
        focal_field(o, (x0, 0.0)).norm_sqr(),
        focal_field(&single, (x0, 0.0)).norm_sqr()
    ));

    let focal = bench.focal_field(&bench.source(o.amplitude_a, o.amplitude_b)?)?;
    let map = unit_map(&focal)?;
    let (residual, reference) = focal_residual(o, &map)?;
    report.checks.push(Check::below(
        "cross_engine_focal",
        residual,
        CROSS_ENGINE_LIMIT,
    ));
    report.residuals.push(("focal".into(), residual));
    let cut = map.cut_y0();
    let pitch = bench.focal.dx;
    let period = o.focal_fringe_period();
    let near = |x: f64, r: f64| -> Vec<f64> {
        cut.x
            .iter()
            .zip(&cut.values)
            .filter(|(xi, _)| (**xi - x).abs() <= r)
            .map(|(_, v)| *v)
            .collect()
    };
    let null = near(x0, pitch).into_iter().fold(f64::INFINITY, f64::min);
    let local_max = near(x0, 0.5 * period).into_iter().fold(0.0, f64::max);
    report.note(format!(
        "numerical focal null depth at x0: I_min/I_local_max = {:.3e} (samples within one pixel)",
        null / local_max
    ));
    let mut row = SummaryRow::new(report.scenario.clone());
    row.residual = None;
    report.rows.push(row);
    Ok((
        report,
        Artifacts {
            planes: vec![("focal".into(), map)],
            profiles: vec![
                ("focal_analytic".into(), reference),
                ("image_unperturbed".into(), Profile::new(xs.clone(), clean)?),
                (
                    "image_scatterer_double".into(),
                    Profile::new(xs.clone(), with)?,
                ),
                (
                    "image_scatterer_single".into(),
                    Profile::new(xs, single_with)?,
                ),
            ],
            events: vec![],
        },
    ))
}

fn duality_sweep(bench: &Bench) -> Result<(RunReport, Artifacts)> {
    let o = bench.optics();
    let mut report = RunReport::new(Scenario::DualitySweep.name());
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (focal_a, image_a) = bench.focal_and_image(&bench.source(one, zero)?)?;
    let (focal_b, image_b) = bench.focal_and_image(&bench.source(zero, one)?)?;
    let mut worst_residual: f64 = 0.0;
    let mut worst_sum_error: f64 = 0.0;
    let mut artifacts = Artifacts::default();
    for &ratio in &bench.config.duality_ratios {
        let (a, b) = normalized_pair(ratio);
        let optics = o.with_amplitudes(a, b);
        let focal = focal_a.combine(a, &focal_b, b)?;
        let image = image_a.combine(a, &image_b, b)?;
        let fmap = unit_map(&focal)?;
        let imap = unit_map(&image)?;
        let m = measure_visibility(&fmap.cut_y0(), o.focal_fringe_period())?;
        let im = image_metrics(&optics, &imap)?;
        let (fr, _) = focal_residual(&optics, &fmap)?;
        let sum = im.d * im.d + m.visibility * m.visibility;
        let analytic = duality_check(a, b)?;
        let misuse = duality_misuse_demo(a, b)?;
        report.checks.push(Check::near(
            format!("duality_sum_ratio_{ratio}"),
            sum,
            1.0,
            0.02,
        ));
        report.checks.push(Check::near(
            format!("analytic_duality_sum_ratio_{ratio}"),
            analytic.duality_sum,
            1.0,
            1e-12,
        ));
        report.note(format!(
            "|A|/|B| = {ratio}: V = {:.6} (analytic {:.6}), D = {:.6} (analytic {:.6}), D^2+V^2 = {sum:.6}; \
             misuse D'^2+V^2 = {:.6} (cross-ensemble: {})",
            m.visibility,
            analytic.visibility,
            im.d,
            analytic.distinguishability,
            misuse.sum,
            misuse.cross_ensemble
        ));
        worst_residual = worst_residual.max(fr).max(im.residual);
        worst_sum_error = worst_sum_error.max((sum - 1.0).abs());
        report.residuals.push((format!("focal_ratio_{ratio}"), fr));
        report
            .residuals
            .push((format!("image_ratio_{ratio}"), im.residual));
        let mut row =
            SummaryRow::new(format!("{}:ratio={ratio}", report.scenario)).with_fringes(&m);
        row.distinguishability = Some(im.d);
        row.duality_sum = Some(sum);
        report.rows.push(row);
        if (ratio - 1.0).abs() < f64::EPSILON {
            report.checks.push(Check::new(
                "misuse_sum_balanced",
                misuse.sum,
                "exactly 2 and flagged cross-ensemble",
                misuse.sum == 2.0 && misuse.cross_ensemble,
            ));
        }
        artifacts
            .planes
            .push((format!("focal_ratio_{ratio}"), fmap));
        artifacts
            .planes
            .push((format!("image_ratio_{ratio}"), imap));
    }
    report.checks.push(Check::below(
        "cross_engine_worst",
        worst_residual,
        CROSS_ENGINE_LIMIT,
    ));
    report.duality_sum = report.rows.first().and_then(|r| r.duality_sum);
    report.note(format!(
        "largest |D^2 + V^2 - 1| over the sweep: {worst_sum_error:.3e}"
    ));
    Ok((report, artifacts))
}

fn sinusoidal_screen(bench: &Bench) -> Result<(RunReport, Artifacts)> {
    let o = bench.optics();
    let cfg = &bench.config;
    let mut report = RunReport::new(Scenario::SinusoidalScreen.name());
    let n = cfg.grid_points;
    let object = GridSpec::square(n, cfg.object_pitch)?;
    let image = GridSpec::square(n, cfg.screen_image_pitch)?;
    let source = sinusoidal_object_field(
        cfg.sinusoid_period,
        cfg.sinusoid_window,
        o.wavelength,
        &object,
    )?;
    let peak = o.wavelength * o.focal_length / cfg.sinusoid_period;
    let screen = two_hole_screen_mask(
        [(-peak, 0.0), (peak, 0.0)],
        cfg.screen_hole_radius,
        &bench.focal,
    )?;
    let plan = vec![
        Step::fresnel(o.lens_to_pinholes, bench.lens),
        Step::Element(bench.lens_mask.clone()),
        Step::fresnel(o.focal_length, bench.focal),
        Step::Record(PlaneLabel::Focal),
        Step::Element(screen),
        Step::fresnel(o.focal_to_image_distance(), image),
        Step::Record(PlaneLabel::Image),
    ];
    let chain = run_chain(&source, &plan)?;
    let screen_step = &chain.audit[4];
    let absorption = screen_step.loss() / screen_step.power_in;
    let image_field = chain
        .recorded(PlaneLabel::Image)
        .ok_or_else(|| Error::Accounting("image plane not recorded".into()))?;
    let focal_field = chain
        .recorded(PlaneLabel::Focal)
        .ok_or_else(|| Error::Accounting("focal plane not recorded".into()))?;
    let imap = unit_map(image_field)?;
    let magnification = (o.lens_to_observation / o.lens_to_pinholes).abs();
    let fringe_period = 0.5 * cfg.sinusoid_period * magnification;
    let m = measure_visibility(&imap.cut_y0(), fringe_period)?;
    report
        .checks
        .push(Check::below("screen_absorption", absorption, 1e-3));
    report.checks.push(Check::new(
        "image_visibility",
        m.visibility,
        "> 0.95",
        m.visibility > 0.95,
    ));
    fringe_checks(&mut report, "image", m.period, fringe_period);
    report.note(format!(
        "focal peaks expected at +-{peak:.4e} m; holes of radius {:.3e} m",
        cfg.screen_hole_radius
    ));
    for e in &chain.audit {
        report.note(format!(
            "audit step {} ({}): power {:.6e} -> {:.6e}",
            e.step, e.description, e.power_in, e.power_out
        ));
    }
    let mut row = SummaryRow::new(report.scenario.clone()).with_fringes(&m);
    row.absorption = Some(absorption);
    report.rows.push(row);
    report.absorption = Some(absorption);
    report.fringes = Some(m);
    Ok((
        report,
        Artifacts {
            planes: vec![
                ("focal".into(), unit_map(focal_field)?),
                ("image".into(), imap),
            ],
            profiles: vec![],
            events: vec![],
        },
    ))
}

fn photon_sampling(bench: &Bench) -> Result<(RunReport, Artifacts)> {
    let o = bench.optics();
    let cfg = &bench.config;
    let mut report = RunReport::new(Scenario::PhotonSampling.name());
    let run = run_wires(bench, o.amplitude_a, o.amplitude_b)?;
    let focal_map = unit_map(&run.focal)?;
    let image_map = unit_map(&bench.focal_to_image(&run.after)?)?;

    let n = cfg.photons;
    let arrivals = sample_photons(&focal_map, n, cfg.seed, PlaneLabel::Focal, 0)?;
    let (absorbed, passed): (Vec<PhotonEvent>, Vec<PhotonEvent>) =
        arrivals.into_iter().partition(|e| run.spec.blocks(e.x));
    let image_events: Vec<PhotonEvent> = if passed.is_empty() {
        Vec::new()
    } else {
        sample_photons(
            &image_map,
            passed.len(),
            cfg.seed.wrapping_add(1),
            PlaneLabel::Image,
            0,
        )?
        .into_iter()
        .zip(&passed)
        .map(|(e, p)| PhotonEvent {
            event_id: p.event_id,
            ..e
        })
        .collect()
    };

    let mut ledger = EventLedger::with_events(absorbed.iter().chain(&image_events).copied())?;
    let wire_ids: Vec<u64> = absorbed.iter().map(|e| e.event_id).collect();
    let image_ids: Vec<u64> = image_events.iter().map(|e| e.event_id).collect();
    ledger.consume(&wire_ids, "fringe_minima")?;
    ledger.consume(&image_ids, "image_spots")?;

    let attempts = image_ids.len().min(1000);
    let mut fired = 0usize;
    for &id in image_ids.iter().take(attempts) {
        if let Err(Error::ComplementarityViolation { .. }) = ledger.consume(&[id], "fringe_pattern")
        {
            fired += 1;
        }
    }
    let fire_rate = if attempts > 0 {
        fired as f64 / attempts as f64
    } else {
        1.0
    };
    report.checks.push(Check::new(
        "double_consumption_rejected",
        fire_rate,
        format!("all {attempts} reuse attempts rejected"),
        fired == attempts,
    ));

    let sub = wire_subensemble_report(&absorbed, &image_events)?;
    let r = run.absorption;
    let sigma = (r * (1.0 - r) / n as f64).sqrt();
    report.checks.push(Check::new(
        "absorbed_fraction",
        sub.wire_fraction,
        format!("{r:.4e} within 3 sigma ({:.3e}) + 1/n", 3.0 * sigma),
        (sub.wire_fraction - r).abs() <= 3.0 * sigma + 1.0 / n as f64,
    ));
    let right = image_events.iter().filter(|e| e.x >= 0.0).count() as f64;
    let total = image_events.len() as f64;
    if total > 0.0 {
        let d_events = (2.0 * right - total).abs() / total;
        let d_an = distinguishability(o.amplitude_a, o.amplitude_b)?;
        let p = 0.5 * (1.0 + d_an);
        let sd = 2.0 * (p * (1.0 - p) / total).sqrt();
        report.checks.push(Check::new(
            "event_distinguishability",
            d_events,
            format!("{d_an:.4} within 3 sigma ({:.3e})", 3.0 * sd),
            (d_events - d_an).abs() <= 3.0 * sd + 1.0 / total,
        ));
        report.distinguishability = Some(d_events);
    }
    report.note(sub.summary.clone());
    report.note(format!(
        "ledger: {} events registered, {} consumed by fringe_minima, {} by image_spots",
        ledger.len(),
        ledger.consumed_by("fringe_minima").len(),
        ledger.consumed_by("image_spots").len()
    ));
    let mut row = SummaryRow::new(report.scenario.clone());
    row.absorption = Some(sub.wire_fraction);
    row.distinguishability = report.distinguishability;
    report.rows.push(row);
    report.absorption = Some(r);

    let mut events: Vec<PhotonEvent> = absorbed.into_iter().chain(image_events).collect();
    events.sort_by_key(|e| e.event_id);
    Ok((
        report,
        Artifacts {
            planes: vec![("focal".into(), focal_map), ("image".into(), image_map)],
            profiles: vec![],
            events,
        },
    ))
}
