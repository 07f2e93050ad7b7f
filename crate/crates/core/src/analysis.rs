//! Metrics extracted from intensity patterns, Monte Carlo photon detection
//! and the single-use event ledger.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::analytic::wrap_phase;
use crate::error::{Error, Result};
use crate::field::{total_power, ComplexField, IntensityMap, PlaneLabel, Profile};

/// Envelope level, relative to its maximum, that bounds the fit window.
pub const WINDOW_LEVEL: f64 = 0.05;
/// Minimum number of fringe periods inside the fit window.
pub const MIN_PERIODS: f64 = 5.0;
/// Largest acceptable r.m.s. fit residual relative to the peak.
pub const MAX_FIT_RESIDUAL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeMetrics {
    pub visibility: f64,
    /// Phase of `cos(2πX/Λ + φ)` at X = 0, in (-π, π].
    pub phase: f64,
    pub period: f64,
    /// r.m.s. residual over the window divided by the peak intensity.
    pub fit_residual: f64,
    pub window: (f64, f64),
}

impl FringeMetrics {
    pub fn periods_in_window(&self) -> f64 {
        (self.window.1 - self.window.0) / self.period
    }
}

fn check_profile(profile: &Profile) -> Result<f64> {
    if profile.len() < 8 {
        return Err(Error::UnreliableFit(format!(
            "profile has only {} samples",
            profile.len()
        )));
    }
    if profile
        .values
        .iter()
        .any(|v| !(*v >= 0.0) || !v.is_finite())
    {
        return Err(Error::InvalidField(
            "profile intensities must be finite and non-negative".into(),
        ));
    }
    let pitch = profile.pitch();
    if !(pitch > 0.0) {
        return Err(Error::InvalidField(
            "profile positions must increase".into(),
        ));
    }
    if profile.max() <= 0.0 {
        return Err(Error::DegenerateField);
    }
    Ok(pitch)
}

/// Centred moving average over `width` samples, shrinking at the edges.
fn moving_average(values: &[f64], width: usize) -> Vec<f64> {
    let n = values.len();
    let half = width / 2;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Contiguous index range around the envelope maximum where the envelope
/// stays above `WINDOW_LEVEL` of that maximum.
fn fit_window(envelope: &[f64]) -> (usize, usize) {
    let (peak, max) = envelope
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let level = WINDOW_LEVEL * max;
    let mut lo = peak;
    while lo > 0 && envelope[lo - 1] >= level {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < envelope.len() && envelope[hi + 1] >= level {
        hi += 1;
    }
    (lo, hi)
}

/// Least-squares `a + b cos(q t) + s sin(q t)`; returns coefficients and the
/// residual sum of squares.
fn linear_carrier_fit(t: &[f64], y: &[f64], q: f64) -> (Vector3<f64>, f64) {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let (s, c) = (q * ti).sin_cos();
        let row = Vector3::new(1.0, c, s);
        ata += row * row.transpose();
        aty += row * yi;
    }
    let coef = ata
        .cholesky()
        .map(|ch| ch.solve(&aty))
        .unwrap_or_else(|| Vector3::new(y.iter().sum::<f64>() / y.len() as f64, 0.0, 0.0));
    let rss = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let (s, c) = (q * ti).sin_cos();
            (yi - coef[0] - coef[1] * c - coef[2] * s).powi(2)
        })
        .sum();
    (coef, rss)
}

fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..80 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

type P6 = SVector<f64, 6>;

/// `exp(c0 + c1 t + c2 t²)·(1 + V cos(κ t + ψ))` and its gradient.
fn fringe_model(p: &P6, t: f64) -> (f64, P6) {
    let env = (p[0] + p[1] * t + p[2] * t * t).exp();
    let (s, c) = (p[4] * t + p[5]).sin_cos();
    let carrier = 1.0 + p[3] * c;
    let value = env * carrier;
    let grad = P6::from([
        value,
        value * t,
        value * t * t,
        env * c,
        -env * p[3] * s * t,
        -env * p[3] * s,
    ]);
    (value, grad)
}

fn sum_squares(p: &P6, t: &[f64], y: &[f64]) -> f64 {
    t.iter()
        .zip(y)
        .map(|(&ti, &yi)| (yi - fringe_model(p, ti).0).powi(2))
        .sum()
}

fn levenberg_marquardt(mut p: P6, t: &[f64], y: &[f64]) -> P6 {
    let mut cost = sum_squares(&p, t, y);
    let mut lambda = 1e-3;
    for _ in 0..300 {
        let mut jtj = SMatrix::<f64, 6, 6>::zeros();
        let mut jtr = P6::zeros();
        for (&ti, &yi) in t.iter().zip(y) {
            let (v, g) = fringe_model(&p, ti);
            jtj += g * g.transpose();
            jtr += g * (yi - v);
        }
        let scale = jtj.diagonal().max().max(f64::MIN_POSITIVE);
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj;
            for i in 0..6 {
                a[(i, i)] += lambda * (jtj[(i, i)] + 1e-12 * scale);
            }
            let Some(step) = a.cholesky().map(|ch| ch.solve(&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let trial_cost = sum_squares(&trial, t, y);
            if trial_cost.is_finite() && trial_cost <= cost {
                let gain = cost - trial_cost;
                p = trial;
                cost = trial_cost;
                lambda = (lambda * 0.3).max(1e-12);
                improved = gain > 1e-15 * cost.max(f64::MIN_POSITIVE);
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    p
}

/// Fits `exp(c0 + c1 X + c2 X²)·(1 + V cos(2πX/Λ + φ))` to the central part
/// of an intensity cut.
///
/// The fit window is where a one-period moving average exceeds
/// [`WINDOW_LEVEL`] of its maximum; it must contain at least
/// [`MIN_PERIODS`] periods of `period_hint`.
pub fn measure_visibility(profile: &Profile, period_hint: f64) -> Result<FringeMetrics> {
    let pitch = check_profile(profile)?;
    if !(period_hint >= 4.0 * pitch) {
        return Err(Error::UnreliableFit(format!(
            "period hint {period_hint:e} m is under 4 samples of {pitch:e} m"
        )));
    }
    let per_period = (period_hint / pitch).round() as usize;
    let envelope = moving_average(&profile.values, per_period);
    let (lo, hi) = fit_window(&envelope);
    let x_lo = profile.x[lo];
    let x_hi = profile.x[hi];
    if x_hi - x_lo < MIN_PERIODS * period_hint {
        return Err(Error::UnreliableFit(format!(
            "fit window [{x_lo:e}, {x_hi:e}] m holds {:.2} periods, need {MIN_PERIODS}",
            (x_hi - x_lo) / period_hint
        )));
    }

    let x_mid = 0.5 * (x_lo + x_hi);
    let half = 0.5 * (x_hi - x_lo);
    let t: Vec<f64> = profile.x[lo..=hi]
        .iter()
        .map(|x| (x - x_mid) / half)
        .collect();
    let y = &profile.values[lo..=hi];
    let peak = y.iter().copied().fold(0.0, f64::max);

    // Carrier from the envelope-normalized ratio.
    let ratio: Vec<f64> = y
        .iter()
        .zip(&envelope[lo..=hi])
        .map(|(v, e)| if *e > 0.0 { v / e } else { 0.0 })
        .collect();
    let kappa0 = 2.0 * PI * half / period_hint;
    let span = 0.1 * kappa0;
    let steps = 400;
    let rss_at = |k: f64| linear_carrier_fit(&t, &ratio, k).1;
    let (mut best_k, mut best_rss) = (kappa0, f64::INFINITY);
    for i in 0..=steps {
        let k = kappa0 - span + 2.0 * span * i as f64 / steps as f64;
        let r = rss_at(k);
        if r < best_rss {
            best_rss = r;
            best_k = k;
        }
    }
    let dk = 2.0 * span / steps as f64;
    let kappa = golden_section(best_k - dk, best_k + dk, rss_at);
    let (coef, _) = linear_carrier_fit(&t, &ratio, kappa);
    let amp = (coef[1] * coef[1] + coef[2] * coef[2]).sqrt();
    let v0 = if coef[0] > 0.0 {
        (amp / coef[0]).min(1.0)
    } else {
        0.0
    };
    let psi0 = (-coef[2]).atan2(coef[1]);

    // Quadratic log-envelope from the moving average.
    let log_env: Vec<f64> = envelope[lo..=hi]
        .iter()
        .map(|e| e.max(1e-300).ln())
        .collect();
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&ti, &le) in t.iter().zip(&log_env) {
        let row = Vector3::new(1.0, ti, ti * ti);
        ata += row * row.transpose();
        aty += row * le;
    }
    let c = ata.cholesky().map(|ch| ch.solve(&aty)).unwrap_or_else(|| {
        Vector3::new(log_env.iter().sum::<f64>() / log_env.len() as f64, 0.0, 0.0)
    });

    let start = P6::from([c[0], c[1], c[2], v0, kappa, psi0]);
    let mut p = if v0 > 0.0 {
        levenberg_marquardt(start, &t, y)
    } else {
        start
    };
    if p[3] < 0.0 {
        p[3] = -p[3];
        p[5] += PI;
    }
    let rss = sum_squares(&p, &t, y);
    let fit_residual = (rss / t.len() as f64).sqrt() / peak;
    let q = p[4] / half;
    let metrics = FringeMetrics {
        visibility: p[3],
        phase: wrap_phase(p[5] - q * x_mid),
        period: 2.0 * PI / q,
        fit_residual,
        window: (x_lo, x_hi),
    };
    if !(fit_residual <= MAX_FIT_RESIDUAL) || !metrics.period.is_finite() {
        return Err(Error::UnreliableFit(format!(
            "r.m.s. residual {fit_residual:.3e} of peak exceeds {MAX_FIT_RESIDUAL}"
        )));
    }
    Ok(metrics)
}

/// `(I_max - I_min)/(I_max + I_min)` over one period either side of the
/// brightest sample.
pub fn raw_extrema_visibility(profile: &Profile, period: f64) -> Result<f64> {
    let pitch = check_profile(profile)?;
    let (peak, _) =
        profile
            .values
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
    let reach = (period / pitch).ceil() as usize;
    let lo = peak.saturating_sub(reach);
    let hi = (peak + reach).min(profile.len() - 1);
    let slice = &profile.values[lo..=hi];
    let max = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = slice.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((max - min) / (max + min))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistinguishabilityReport {
    pub distinguishability: f64,
    /// Power with x < split.
    pub mass_left: f64,
    /// Power with x ≥ split.
    pub mass_right: f64,
    /// Marginal saddle over the smaller peak; 0 for a single spot.
    pub saddle_ratio: f64,
    pub single_spot: bool,
}

/// Path distinguishability from the powers on either side of `x = split`.
pub fn measure_distinguishability(
    image: &IntensityMap,
    split: f64,
) -> Result<DistinguishabilityReport> {
    let grid = image.grid();
    let marginal = image.x_marginal();
    let (mut left, mut right) = (0.0, 0.0);
    let (mut peak_l, mut peak_r) = ((0, 0.0), (0, 0.0));
    for (i, (&x, &m)) in marginal.x.iter().zip(&marginal.values).enumerate() {
        if x < split {
            left += m;
            if m > peak_l.1 {
                peak_l = (i, m);
            }
        } else {
            right += m;
            if m > peak_r.1 {
                peak_r = (i, m);
            }
        }
    }
    left *= grid.dx;
    right *= grid.dx;
    let total = left + right;
    if !(total > 0.0) {
        return Err(Error::DegenerateField);
    }
    let smaller = peak_l.1.min(peak_r.1);
    let larger = peak_l.1.max(peak_r.1);
    let single_spot = smaller <= 1e-6 * larger;
    let saddle_ratio = if single_spot {
        0.0
    } else {
        let (a, b) = (peak_l.0.min(peak_r.0), peak_l.0.max(peak_r.0));
        let saddle = marginal.values[a..=b]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        saddle / smaller
    };
    if saddle_ratio > 0.1 {
        return Err(Error::Separation {
            ratio: saddle_ratio,
        });
    }
    Ok(DistinguishabilityReport {
        distinguishability: (left - right).abs() / total,
        mass_left: left,
        mass_right: right,
        saddle_ratio,
        single_spot,
    })
}

/// Intensity-weighted centroids of the left (`x < split`) and right spots,
/// each over samples above 1% of that side's peak.
pub fn spot_centroids(image: &IntensityMap, split: f64) -> Result<[(f64, f64); 2]> {
    let grid = image.grid();
    let mut peaks = [0.0f64; 2];
    for ((j, i), &v) in image.values().indexed_iter() {
        let _ = j;
        let side = usize::from(grid.x(i) >= split);
        peaks[side] = peaks[side].max(v);
    }
    let mut acc = [(0.0, 0.0, 0.0); 2];
    for ((j, i), &v) in image.values().indexed_iter() {
        let x = grid.x(i);
        let side = usize::from(x >= split);
        if v >= 0.01 * peaks[side] && v > 0.0 {
            acc[side].0 += v;
            acc[side].1 += v * x;
            acc[side].2 += v * grid.y(j);
        }
    }
    let mut out = [(0.0, 0.0); 2];
    for (o, a) in out.iter_mut().zip(acc) {
        if !(a.0 > 0.0) {
            return Err(Error::DegenerateField);
        }
        *o = (a.1 / a.0, a.2 / a.0);
    }
    Ok(out)
}

/// `R = 1 - P_after/P_before` across an absorbing element.
pub fn absorption_fraction(before: &ComplexField, after: &ComplexField) -> Result<f64> {
    let (p0, p1) = (total_power(before), total_power(after));
    if !(p0 > 0.0) {
        return Err(Error::DegenerateField);
    }
    if p1 > p0 * (1.0 + 1e-12) {
        return Err(Error::Accounting(format!(
            "power rose from {p0:e} to {p1:e} across a passive element"
        )));
    }
    Ok((1.0 - p1 / p0).max(0.0))
}

/// r.m.s. difference of two cuts, each normalized to unit sum over the
/// window where `reference` exceeds 1e-3 of its peak, divided by the
/// normalized reference peak.
pub fn cross_engine_residual(numerical: &Profile, reference: &Profile) -> Result<f64> {
    let peak = reference.max();
    let level = 1e-3 * peak;
    let idx: Vec<usize> = (0..reference.len())
        .filter(|&i| reference.values[i] >= level)
        .collect();
    residual_over(numerical, reference, &idx)
}

/// As [`cross_engine_residual`] over an explicit `[x_lo, x_hi]` window.
pub fn cross_engine_residual_in(
    numerical: &Profile,
    reference: &Profile,
    x_lo: f64,
    x_hi: f64,
) -> Result<f64> {
    let idx: Vec<usize> = (0..reference.len())
        .filter(|&i| reference.x[i] >= x_lo && reference.x[i] <= x_hi)
        .collect();
    residual_over(numerical, reference, &idx)
}

fn residual_over(numerical: &Profile, reference: &Profile, idx: &[usize]) -> Result<f64> {
    if numerical.len() != reference.len() {
        return Err(Error::GridMismatch(format!(
            "profiles have {} and {} samples",
            numerical.len(),
            reference.len()
        )));
    }
    if idx.len() < 2 {
        return Err(Error::DegenerateField);
    }
    let sn: f64 = idx.iter().map(|&i| numerical.values[i]).sum();
    let sr: f64 = idx.iter().map(|&i| reference.values[i]).sum();
    if !(sn > 0.0 && sr > 0.0) {
        return Err(Error::DegenerateField);
    }
    let mut sq = 0.0;
    let mut peak: f64 = 0.0;
    for &i in idx {
        let r = reference.values[i] / sr;
        sq += (numerical.values[i] / sn - r).powi(2);
        peak = peak.max(r);
    }
    Ok((sq / idx.len() as f64).sqrt() / peak)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonEvent {
    pub event_id: u64,
    pub plane: PlaneLabel,
    pub x: f64,
    pub y: f64,
}

/// Draws `n` detection events from `intensity` treated as a probability
/// density: a cell is chosen with probability proportional to its value and
/// the position is jittered uniformly inside it. Ids run from `first_id`.
pub fn sample_photons(
    intensity: &IntensityMap,
    n: usize,
    seed: u64,
    plane: PlaneLabel,
    first_id: u64,
) -> Result<Vec<PhotonEvent>> {
    if n == 0 {
        return Err(Error::DegenerateDistribution(
            "requested zero events".into(),
        ));
    }
    let grid = intensity.grid();
    let weights = intensity
        .values()
        .as_slice()
        .ok_or_else(|| Error::InvalidField("intensity array is not contiguous".into()))?;
    let dist =
        WeightedIndex::new(weights).map_err(|e| Error::DegenerateDistribution(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let nx = grid.nx;
    Ok((0..n as u64)
        .map(|k| {
            let cell = dist.sample(&mut rng);
            let (j, i) = (cell / nx, cell % nx);
            let jx: f64 = rng.gen_range(-0.5..0.5);
            let jy: f64 = rng.gen_range(-0.5..0.5);
            PhotonEvent {
                event_id: first_id + k,
                plane,
                x: grid.x(i) + jx * grid.dx,
                y: grid.y(j) + jy * grid.dy,
            }
        })
        .collect())
}

/// Registry of detection events in which each event may feed at most one
/// statistic.
#[derive(Debug, Clone, Default)]
pub struct EventLedger {
    events: BTreeMap<u64, PhotonEvent>,
    consumed_by: HashMap<u64, String>,
}

impl EventLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_events(events: impl IntoIterator<Item = PhotonEvent>) -> Result<Self> {
        let mut ledger = Self::new();
        ledger.register(events)?;
        Ok(ledger)
    }

    /// Adds events; a repeated id is rejected and nothing is added.
    pub fn register(&mut self, events: impl IntoIterator<Item = PhotonEvent>) -> Result<()> {
        let incoming: Vec<PhotonEvent> = events.into_iter().collect();
        let mut seen = HashSet::with_capacity(incoming.len());
        for e in &incoming {
            if self.events.contains_key(&e.event_id) || !seen.insert(e.event_id) {
                return Err(Error::Ledger(format!("duplicate event id {}", e.event_id)));
            }
        }
        self.events
            .extend(incoming.into_iter().map(|e| (e.event_id, e)));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&PhotonEvent> {
        self.events.get(&id)
    }

    pub fn events(&self) -> impl Iterator<Item = &PhotonEvent> {
        self.events.values()
    }

    pub fn owner(&self, id: u64) -> Option<&str> {
        self.consumed_by.get(&id).map(String::as_str)
    }

    pub fn consumed_count(&self) -> usize {
        self.consumed_by.len()
    }

    /// Ids consumed by `statistic`, ascending.
    pub fn consumed_by(&self, statistic: &str) -> Vec<u64> {
        let mut ids: Vec<u64> = self
            .consumed_by
            .iter()
            .filter(|(_, s)| s.as_str() == statistic)
            .map(|(id, _)| *id)
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Marks `ids` as used by `statistic`. Either every id is granted or, on
    /// the first conflict, none is.
    pub fn consume(&mut self, ids: &[u64], statistic: &str) -> Result<()> {
        let mut seen = HashSet::with_capacity(ids.len());
        for &id in ids {
            if !self.events.contains_key(&id) {
                return Err(Error::Ledger(format!("unknown event id {id}")));
            }
            if let Some(owner) = self.consumed_by.get(&id) {
                return Err(Error::ComplementarityViolation {
                    event_id: id,
                    owner: owner.clone(),
                    requested: statistic.to_string(),
                });
            }
            if !seen.insert(id) {
                return Err(Error::Ledger(format!("event id {id} listed twice")));
            }
        }
        for &id in ids {
            self.consumed_by.insert(id, statistic.to_string());
        }
        Ok(())
    }
}

/// Value-style wrapper around [`EventLedger::consume`].
pub fn consume_events(
    mut ledger: EventLedger,
    ids: &[u64],
    statistic: &str,
) -> Result<EventLedger> {
    ledger.consume(ids, statistic)?;
    Ok(ledger)
}

/// Ledger shared between threads; every consume is atomic.
#[derive(Debug, Clone, Default)]
pub struct SharedLedger {
    inner: Arc<Mutex<EventLedger>>,
}

impl SharedLedger {
    pub fn new(ledger: EventLedger) -> Self {
        Self {
            inner: Arc::new(Mutex::new(ledger)),
        }
    }

    pub fn consume(&self, ids: &[u64], statistic: &str) -> Result<()> {
        self.inner
            .lock()
            .map_err(|_| Error::Ledger("ledger lock poisoned".into()))?
            .consume(ids, statistic)
    }

    pub fn snapshot(&self) -> Result<EventLedger> {
        Ok(self
            .inner
            .lock()
            .map_err(|_| Error::Ledger("ledger lock poisoned".into()))?
            .clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubensembleReport {
    pub wire_events: usize,
    pub image_events: usize,
    pub wire_fraction: f64,
    pub image_fraction: f64,
    pub summary: String,
}

/// Accounting of which events can inform the fringe minima (those absorbed
/// at the wires) and which can inform the image spots.
pub fn wire_subensemble_report(
    wire_events: &[PhotonEvent],
    image_events: &[PhotonEvent],
) -> Result<SubensembleReport> {
    let wire_ids: HashSet<u64> = wire_events.iter().map(|e| e.event_id).collect();
    if wire_ids.len() != wire_events.len() {
        return Err(Error::Ledger("duplicate id among wire events".into()));
    }
    let mut image_ids = HashSet::with_capacity(image_events.len());
    for e in image_events {
        if wire_ids.contains(&e.event_id) {
            return Err(Error::Ledger(format!(
                "event {} appears both at the wires and in the image",
                e.event_id
            )));
        }
        if !image_ids.insert(e.event_id) {
            return Err(Error::Ledger("duplicate id among image events".into()));
        }
    }
    let total = (wire_events.len() + image_events.len()) as f64;
    let (wf, imf) = if total > 0.0 {
        (
            wire_events.len() as f64 / total,
            image_events.len() as f64 / total,
        )
    } else {
        (0.0, 0.0)
    };
    let summary = format!(
        "{} of {} events ({:.3e}) were absorbed at the wires and are the only ones \
         informing the fringe minima; the {} image-plane events ({:.6}) carry no fringe information",
        wire_events.len(),
        total as usize,
        wf,
        image_events.len(),
        imf
    );
    Ok(SubensembleReport {
        wire_events: wire_events.len(),
        image_events: image_events.len(),
        wire_fraction: wf,
        image_fraction: imf,
        summary,
    })
}
