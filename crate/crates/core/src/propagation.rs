//! Numerical scalar diffraction.
//!
//! Two propagators are available. [`angular_spectrum`] is exact within the
//! scalar model and keeps the grid; its transfer function is band-limited so
//! that the circular convolution does not alias. [`fresnel_scaled`] evaluates
//! the paraxial Fresnel integral onto an arbitrary output grid with a chirp-z
//! transform, which is what carries a field from a micron-scale aperture to a
//! millimetre-scale lens pupil and back down to a fringe-resolving focal grid.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::elements::TransmissionMask;
use crate::error::{Error, Result};
use crate::fft::{cis, fft2, ifft2, scaled_dft_2d, signed_bin, ScaledDft};
use crate::field::{total_power, ComplexField, GridSpec, PlaneLabel};

/// Band-limited angular-spectrum propagation over `distance` on the same grid.
pub fn angular_spectrum(field: &ComplexField, distance: f64) -> Result<ComplexField> {
    if distance < 0.0 || !distance.is_finite() {
        return Err(Error::NegativeDistance(distance));
    }
    if distance == 0.0 {
        return Ok(field.clone());
    }
    let grid = *field.grid();
    let lambda = field.wavelength();
    let inv_l2 = 1.0 / (lambda * lambda);
    let (nx, ny) = (grid.nx, grid.ny);
    let (du, dv) = (1.0 / (nx as f64 * grid.dx), 1.0 / (ny as f64 * grid.dy));
    let u_limit = 1.0 / (lambda * ((2.0 * du * distance).powi(2) + 1.0).sqrt());
    let v_limit = 1.0 / (lambda * ((2.0 * dv * distance).powi(2) + 1.0).sqrt());

    // Sample (0, 0) sits at grid offset -n/2; shifting the origin to index 0
    // keeps the transfer function centred.
    let sx = nx / 2;
    let sy = ny / 2;
    let mut spectrum = Array2::from_shape_fn((ny, nx), |(j, i)| {
        field.values()[((j + sy) % ny, (i + sx) % nx)]
    });
    fft2(&mut spectrum);

    let kz = 2.0 * PI * distance;
    let fy: Vec<f64> = (0..ny).map(|q| signed_bin(q, ny) * dv).collect();
    let fx: Vec<f64> = (0..nx).map(|q| signed_bin(q, nx) * du).collect();
    for ((j, i), s) in spectrum.indexed_iter_mut() {
        let (u, v) = (fx[i], fy[j]);
        let w2 = inv_l2 - u * u - v * v;
        if w2 <= 0.0 || u.abs() > u_limit || v.abs() > v_limit {
            *s = Complex64::default();
        } else {
            *s *= cis(kz * w2.sqrt());
        }
    }
    ifft2(&mut spectrum);

    let values = Array2::from_shape_fn((ny, nx), |(j, i)| {
        spectrum[((j + ny - sy) % ny, (i + nx - sx) % nx)]
    });
    Ok(ComplexField::from_parts(
        grid,
        values,
        lambda,
        PlaneLabel::Custom(distance),
    ))
}

/// Sampling figures of a scaled Fresnel hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelDiagnostics {
    /// `a²/(λz)` with `a` the half-extent of the input grid.
    pub fresnel_number: f64,
    /// Largest per-sample step of the input chirp `k x²/(2z)` (rad).
    pub input_phase_step: f64,
    /// Same for the output chirp.
    pub output_phase_step: f64,
    /// Output period `λz/dx_in` of the discrete transform, per axis.
    pub alias_period: (f64, f64),
    pub output_extent: (f64, f64),
}

impl FresnelDiagnostics {
    pub fn passed(&self) -> bool {
        self.input_phase_step < PI
            && self.output_phase_step < PI
            && self.output_extent.0 <= self.alias_period.0
            && self.output_extent.1 <= self.alias_period.1
    }
}

fn edge_step(grid: &GridSpec, k: f64, z: f64) -> f64 {
    let (ex, ey) = grid.edge_abs();
    (k * ex * grid.dx / z).max(k * ey * grid.dy / z)
}

pub fn fresnel_diagnostics(
    input: &GridSpec,
    output: &GridSpec,
    wavelength: f64,
    distance: f64,
) -> FresnelDiagnostics {
    let k = 2.0 * PI / wavelength;
    let half = 0.5 * input.extent_x().max(input.extent_y());
    FresnelDiagnostics {
        fresnel_number: half * half / (wavelength * distance),
        input_phase_step: edge_step(input, k, distance),
        output_phase_step: edge_step(output, k, distance),
        alias_period: (
            wavelength * distance / input.dx,
            wavelength * distance / input.dy,
        ),
        output_extent: (output.extent_x(), output.extent_y()),
    }
}

fn check_fresnel(
    input: &GridSpec,
    output: &GridSpec,
    wavelength: f64,
    distance: f64,
) -> Result<()> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::NegativeDistance(distance));
    }
    let d = fresnel_diagnostics(input, output, wavelength, distance);
    if !d.passed() {
        return Err(Error::sampling(
            "fresnel_scaled",
            format!(
                "z = {distance:e} m: input chirp step {:.3} rad, output chirp step {:.3} rad (limit π), \
                 output extent {:e} x {:e} m vs alias period {:e} x {:e} m",
                d.input_phase_step,
                d.output_phase_step,
                d.output_extent.0,
                d.output_extent.1,
                d.alias_period.0,
                d.alias_period.1
            ),
        ));
    }
    Ok(())
}

/// Samples `center + (i - n/2)·pitch` along one axis.
#[derive(Clone, Copy)]
struct Axis {
    n: usize,
    pitch: f64,
    center: f64,
}

fn fresnel_axis_plan(input: Axis, output: Axis, k: f64, z: f64) -> ScaledDft {
    let a = 0.5 * k / z;
    let beta = k * input.pitch * output.pitch / z;
    ScaledDft::new(
        input.n,
        output.n,
        beta,
        |m| {
            let x = input.center + m * input.pitch;
            cis(a * x * x - k * output.center * m * input.pitch / z)
        },
        |n| {
            let x = output.center + n * output.pitch;
            cis(a * x * x - k * input.center * n * output.pitch / z)
        },
    )
}

/// Paraxial Fresnel propagation over `distance` onto `output_grid`:
/// `U(X) = e^{ikz}/(iλz) ∫ u(x) e^{ik|X - x|²/(2z)} d²x`.
pub fn fresnel_scaled(
    field: &ComplexField,
    distance: f64,
    output_grid: &GridSpec,
) -> Result<ComplexField> {
    let input = field.grid();
    let lambda = field.wavelength();
    check_fresnel(input, output_grid, lambda, distance)?;
    let k = 2.0 * PI / lambda;
    let z = distance;
    let axes = |g: &GridSpec| {
        (
            Axis {
                n: g.nx,
                pitch: g.dx,
                center: g.center.0,
            },
            Axis {
                n: g.ny,
                pitch: g.dy,
                center: g.center.1,
            },
        )
    };
    let ((in_x, in_y), (out_x, out_y)) = (axes(input), axes(output_grid));
    let x_plan = fresnel_axis_plan(in_x, out_x, k, z);
    let y_plan = fresnel_axis_plan(in_y, out_y, k, z);
    let mut values = scaled_dft_2d(field.values(), &x_plan, &y_plan);
    let cross = input.center.0 * output_grid.center.0 + input.center.1 * output_grid.center.1;
    let factor = cis(k * z - k * cross / z) / Complex64::new(0.0, lambda * z) * input.cell_area();
    values.mapv_inplace(|v| v * factor);
    Ok(ComplexField::from_parts(
        *output_grid,
        values,
        lambda,
        PlaneLabel::Custom(distance),
    ))
}

/// Pointwise product with a mask on the same grid.
pub fn apply_mask(field: &ComplexField, mask: &TransmissionMask) -> Result<ComplexField> {
    if !field.grid().same_sampling(mask.grid()) {
        return Err(Error::GridMismatch(format!(
            "field on {} but mask `{}` on {}",
            field.grid(),
            mask.label(),
            mask.grid()
        )));
    }
    let values = field.values() * mask.values();
    Ok(ComplexField::from_parts(
        *field.grid(),
        values,
        field.wavelength(),
        field.plane(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    AngularSpectrum,
    Fresnel { output_grid: GridSpec },
}

#[derive(Debug, Clone)]
pub enum Step {
    Propagate {
        distance: f64,
        method: Method,
    },
    Element(TransmissionMask),
    /// Stores a copy of the current field tagged with the label.
    Record(PlaneLabel),
}

impl Step {
    pub fn fresnel(distance: f64, output_grid: GridSpec) -> Self {
        Step::Propagate {
            distance,
            method: Method::Fresnel { output_grid },
        }
    }

    pub fn angular(distance: f64) -> Self {
        Step::Propagate {
            distance,
            method: Method::AngularSpectrum,
        }
    }

    fn describe(&self) -> String {
        match self {
            Step::Propagate {
                distance,
                method: Method::AngularSpectrum,
            } => format!("angular spectrum {distance:e} m"),
            Step::Propagate {
                distance,
                method: Method::Fresnel { .. },
            } => format!("fresnel {distance:e} m"),
            Step::Element(m) => format!("element {}", m.label()),
            Step::Record(label) => format!("record {label}"),
        }
    }
}

/// Power before and after one step.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditEntry {
    pub step: usize,
    pub description: String,
    pub power_in: f64,
    pub power_out: f64,
}

impl AuditEntry {
    pub fn loss(&self) -> f64 {
        self.power_in - self.power_out
    }
}

#[derive(Debug, Clone)]
pub struct ChainResult {
    pub recorded: Vec<ComplexField>,
    pub output: ComplexField,
    pub audit: Vec<AuditEntry>,
}

impl ChainResult {
    pub fn recorded(&self, label: PlaneLabel) -> Option<&ComplexField> {
        self.recorded.iter().find(|f| f.plane() == label)
    }
}

fn validate_plan(field: &ComplexField, plan: &[Step]) -> Result<()> {
    let mut grid = *field.grid();
    let lambda = field.wavelength();
    for (index, step) in plan.iter().enumerate() {
        let wrap = |e: Error| Error::Chain {
            step: index,
            source: Box::new(e),
        };
        match step {
            Step::Propagate {
                distance,
                method: Method::AngularSpectrum,
            } => {
                if *distance < 0.0 || !distance.is_finite() {
                    return Err(wrap(Error::NegativeDistance(*distance)));
                }
            }
            Step::Propagate {
                distance,
                method: Method::Fresnel { output_grid },
            } => {
                check_fresnel(&grid, output_grid, lambda, *distance).map_err(wrap)?;
                grid = *output_grid;
            }
            Step::Element(mask) => {
                if !grid.same_sampling(mask.grid()) {
                    return Err(wrap(Error::GridMismatch(format!(
                        "mask `{}` on {} but field on {}",
                        mask.label(),
                        mask.grid(),
                        grid
                    ))));
                }
            }
            Step::Record(_) => {}
        }
    }
    Ok(())
}

/// Runs `plan` on `field`. The whole plan is validated before any step runs;
/// the first failing check aborts with its step index.
pub fn run_chain(field: &ComplexField, plan: &[Step]) -> Result<ChainResult> {
    validate_plan(field, plan)?;
    let mut current = field.clone();
    let mut recorded = Vec::new();
    let mut audit = Vec::with_capacity(plan.len());
    for (index, step) in plan.iter().enumerate() {
        let power_in = total_power(&current);
        let wrap = |e: Error| Error::Chain {
            step: index,
            source: Box::new(e),
        };
        match step {
            Step::Propagate { distance, method } => {
                let plane = current.plane();
                let next = match method {
                    Method::AngularSpectrum => angular_spectrum(&current, *distance),
                    Method::Fresnel { output_grid } => {
                        fresnel_scaled(&current, *distance, output_grid)
                    }
                }
                .map_err(wrap)?;
                current = next.with_plane(match plane {
                    PlaneLabel::Custom(z) => PlaneLabel::Custom(z + distance),
                    _ => PlaneLabel::Custom(*distance),
                });
            }
            Step::Element(mask) => current = apply_mask(&current, mask).map_err(wrap)?,
            Step::Record(label) => {
                current = current.with_plane(*label);
                recorded.push(current.clone());
            }
        }
        audit.push(AuditEntry {
            step: index,
            description: step.describe(),
            power_in,
            power_out: total_power(&current),
        });
    }
    Ok(ChainResult {
        recorded,
        output: current,
        audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 532e-9;

    fn gaussian(grid: GridSpec, w0: f64, x0: f64) -> ComplexField {
        ComplexField::from_fn(grid, LAMBDA, PlaneLabel::Aperture, |x, y| {
            Complex64::new((-((x - x0).powi(2) + y * y) / (w0 * w0)).exp(), 0.0)
        })
        .unwrap()
    }

    /// Paraxial Gaussian beam `(q0/q) e^{ikz} e^{ikr²/(2q)}`, `q = z - i z_R`.
    fn gaussian_oracle(w0: f64, z: f64, x: f64, y: f64) -> Complex64 {
        let k = 2.0 * PI / LAMBDA;
        let q0 = Complex64::new(0.0, -0.5 * k * w0 * w0);
        let q = q0 + z;
        (q0 / q) * cis(k * z) * (Complex64::new(0.0, 0.5 * k * (x * x + y * y)) / q).exp()
    }

    fn rms_rel(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
        let num: f64 = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    fn second_moment_width(f: &ComplexField) -> f64 {
        let g = f.grid();
        let (mut m0, mut m2) = (0.0, 0.0);
        for ((j, i), v) in f.values().indexed_iter() {
            let _ = j;
            let p = v.norm_sqr();
            m0 += p;
            m2 += p * g.x(i).powi(2);
        }
        2.0 * (m2 / m0).sqrt()
    }

    #[test]
    fn zero_distance_is_identity() {
        let f = gaussian(GridSpec::square(64, 2e-6).unwrap(), 10e-6, 3e-6);
        let g = angular_spectrum(&f, 0.0).unwrap();
        for (a, b) in f.values().iter().zip(g.values().iter()) {
            assert!((a - b).norm() <= 1e-14);
        }
    }

    #[test]
    fn negative_distance_is_rejected() {
        let f = gaussian(GridSpec::square(16, 2e-6).unwrap(), 10e-6, 0.0);
        assert!(matches!(
            angular_spectrum(&f, -1.0),
            Err(Error::NegativeDistance(_))
        ));
    }

    #[test]
    fn angular_spectrum_matches_gaussian_beam() {
        let grid = GridSpec::square(256, 1e-6).unwrap();
        let w0 = 15e-6;
        let z = 1.5e-3;
        let f = gaussian(grid, w0, 0.0);
        let g = angular_spectrum(&f, z).unwrap();
        let z_r = PI * w0 * w0 / LAMBDA;
        let expected = w0 * (1.0 + (z / z_r).powi(2)).sqrt();
        let measured = second_moment_width(&g);
        assert!(
            (measured / expected - 1.0).abs() < 1e-3,
            "{measured} vs {expected}"
        );
        assert_relative_eq!(total_power(&g), total_power(&f), max_relative = 1e-10);
        let oracle = Array2::from_shape_fn(grid.shape(), |(j, i)| {
            gaussian_oracle(w0, z, grid.x(i), grid.y(j))
        });
        assert!(rms_rel(g.values(), &oracle) < 1e-3);
    }

    #[test]
    fn angular_spectrum_semigroup() {
        let grid = GridSpec::square(128, 1e-6).unwrap();
        let f = gaussian(grid, 12e-6, 4e-6);
        let once = angular_spectrum(&f, 7e-4).unwrap();
        let twice = angular_spectrum(&angular_spectrum(&f, 3e-4).unwrap(), 4e-4).unwrap();
        let scale = once.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in once.values().iter().zip(twice.values().iter()) {
            assert!((a - b).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn fresnel_matches_gaussian_beam_on_a_different_grid() {
        let input = GridSpec::square(256, 1e-6).unwrap();
        let w0 = 10e-6;
        let z = 0.02;
        let out = GridSpec::square(256, 4e-6)
            .unwrap()
            .with_center(40e-6, -24e-6);
        let f = gaussian(input, w0, 0.0);
        let g = fresnel_scaled(&f, z, &out).unwrap();
        let oracle = Array2::from_shape_fn(out.shape(), |(j, i)| {
            gaussian_oracle(w0, z, out.x(i), out.y(j))
        });
        assert!(rms_rel(g.values(), &oracle) < 1e-3);
    }

    #[test]
    fn fresnel_agrees_with_angular_spectrum() {
        let grid = GridSpec::square(256, 2e-6).unwrap();
        let f = gaussian(grid, 20e-6, 30e-6);
        let z = 2e-3;
        let a = angular_spectrum(&f, z).unwrap();
        let b = fresnel_scaled(&f, z, &grid).unwrap();
        assert!(rms_rel(b.values(), a.values()) < 1e-3);
    }

    #[test]
    fn fresnel_preserves_mirror_symmetry() {
        let input = GridSpec::square(128, 1e-6).unwrap();
        let f = ComplexField::from_fn(input, LAMBDA, PlaneLabel::Aperture, |x, y| {
            let g = |c: f64| (-((x - c).powi(2) + y * y) / (5e-6f64).powi(2)).exp();
            Complex64::new(g(-20e-6) + g(20e-6), 0.0)
        })
        .unwrap();
        let out = GridSpec::square(128, 5e-6).unwrap();
        let g = fresnel_scaled(&f, 0.01, &out).unwrap();
        let scale = g.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for j in 0..out.ny {
            for i in 1..out.nx {
                let mirror = out.nx - i;
                assert!((g.at(i, j) - g.at(mirror, j)).norm() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn fresnel_rejects_aliased_output() {
        let input = GridSpec::square(64, 1e-6).unwrap();
        let f = gaussian(input, 5e-6, 0.0);
        let wide = GridSpec::square(64, 1e-3).unwrap();
        assert!(matches!(
            fresnel_scaled(&f, 0.01, &wide),
            Err(Error::Sampling { .. })
        ));
        assert!(matches!(
            fresnel_scaled(&f, 0.0, &input),
            Err(Error::NegativeDistance(_))
        ));
    }

    #[test]
    fn masks_commute_and_are_passive() {
        let grid = GridSpec::square(32, 1e-6).unwrap();
        let f = gaussian(grid, 8e-6, 0.0);
        let m1 = TransmissionMask::from_fn(grid, "a", |x, _| cis(x * 1e5) * 0.9).unwrap();
        let m2 = TransmissionMask::from_fn(grid, "b", |_, y| {
            Complex64::new(if y > 0.0 { 1.0 } else { 0.5 }, 0.0)
        })
        .unwrap();
        let ab = apply_mask(&apply_mask(&f, &m1).unwrap(), &m2).unwrap();
        let ba = apply_mask(&apply_mask(&f, &m2).unwrap(), &m1).unwrap();
        let prod = apply_mask(&f, &m1.product(&m2).unwrap()).unwrap();
        for ((a, b), c) in ab
            .values()
            .iter()
            .zip(ba.values().iter())
            .zip(prod.values().iter())
        {
            assert!((a - b).norm() <= 1e-15);
            assert!((a - c).norm() <= 1e-15);
        }
        assert!(total_power(&ab) <= total_power(&f));
        let id = apply_mask(&f, &TransmissionMask::identity(grid)).unwrap();
        assert_eq!(id.values(), f.values());
        let other = TransmissionMask::identity(GridSpec::square(32, 2e-6).unwrap());
        assert!(matches!(
            apply_mask(&f, &other),
            Err(Error::GridMismatch(_))
        ));
    }

    fn sample_plan() -> (ComplexField, Vec<Step>) {
        let input = GridSpec::square(64, 1e-6).unwrap();
        let mid = GridSpec::square(64, 4e-6).unwrap();
        let f = gaussian(input, 4e-6, 5e-6);
        let wires = TransmissionMask::from_fn(mid, "wires", |x, _| {
            Complex64::new(if (x - 20e-6).abs() < 6e-6 { 0.0 } else { 1.0 }, 0.0)
        })
        .unwrap();
        let plan = vec![
            Step::fresnel(5e-3, mid),
            Step::Record(PlaneLabel::PreLens),
            Step::Element(wires),
            Step::angular(1e-4),
            Step::Record(PlaneLabel::Focal),
        ];
        (f, plan)
    }

    #[test]
    fn record_only_plan_returns_input() {
        let (f, _) = sample_plan();
        let r = run_chain(&f, &[Step::Record(PlaneLabel::Aperture)]).unwrap();
        assert_eq!(r.recorded.len(), 1);
        assert_eq!(r.recorded[0].values(), f.values());
    }

    #[test]
    fn identity_element_changes_nothing() {
        let (f, plan) = sample_plan();
        let base = run_chain(&f, &plan).unwrap();
        let mut with_id = plan.clone();
        with_id.insert(
            1,
            Step::Element(TransmissionMask::identity(
                GridSpec::square(64, 4e-6).unwrap(),
            )),
        );
        let other = run_chain(&f, &with_id).unwrap();
        for (a, b) in base.recorded.iter().zip(&other.recorded) {
            for (x, y) in a.values().iter().zip(b.values().iter()) {
                assert!((x - y).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn chain_is_linear() {
        let (f1, plan) = sample_plan();
        let f2 = gaussian(*f1.grid(), 3e-6, -7e-6);
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.4));
        let mixed = f1.combine(a, &f2, b).unwrap();
        let r1 = run_chain(&f1, &plan).unwrap();
        let r2 = run_chain(&f2, &plan).unwrap();
        let rm = run_chain(&mixed, &plan).unwrap();
        for k in 0..rm.recorded.len() {
            let expected = r1.recorded[k].combine(a, &r2.recorded[k], b).unwrap();
            let scale = expected
                .values()
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            for (x, y) in rm.recorded[k].values().iter().zip(expected.values().iter()) {
                assert!((x - y).norm() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn chain_audit_attributes_losses() {
        let (f, plan) = sample_plan();
        let r = run_chain(&f, &plan).unwrap();
        for e in &r.audit {
            assert!(e.power_out <= e.power_in * (1.0 + 1e-9), "{e:?}");
        }
        let wire = &r.audit[2];
        assert!(wire.loss() > 0.0);
        assert!(r.audit[1].loss().abs() < 1e-15);
        assert_eq!(r.recorded(PlaneLabel::Focal).unwrap().grid().dx, 4e-6);
    }

    #[test]
    fn chain_reports_failing_step() {
        let (f, mut plan) = sample_plan();
        plan.push(Step::fresnel(1e-3, GridSpec::square(64, 1e-3).unwrap()));
        match run_chain(&f, &plan) {
            Err(Error::Chain { step, source }) => {
                assert_eq!(step, 5);
                assert!(matches!(*source, Error::Sampling { .. }));
            }
            other => panic!("{other:?}"),
        }
        let (f, mut plan) = sample_plan();
        plan.insert(0, Step::angular(-1.0));
        assert!(matches!(
            run_chain(&f, &plan),
            Err(Error::Chain { step: 0, .. })
        ));
    }
}
