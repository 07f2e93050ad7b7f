use std::fmt::{self, Write as _};

use crate::analysis::FringeMetrics;

/// One pass/fail comparison with the tolerance it was judged against.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: String,
    pub passed: bool,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        value: f64,
        tolerance: impl Into<String>,
        passed: bool,
    ) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: tolerance.into(),
            passed,
        }
    }

    /// Passes when `value < limit`.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, format!("< {limit:e}"), value < limit)
    }

    /// Passes when `|value - target| ≤ tol`.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self::new(
            name,
            value,
            format!("{target:e} ± {tol:e}"),
            (value - target).abs() <= tol,
        )
    }
}

/// One line of `summary.csv`; absent quantities stay empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub visibility: Option<f64>,
    pub phase: Option<f64>,
    pub period: Option<f64>,
    pub distinguishability: Option<f64>,
    pub duality_sum: Option<f64>,
    pub absorption: Option<f64>,
    pub residual: Option<f64>,
}

impl SummaryRow {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Self::default()
        }
    }

    pub fn with_fringes(mut self, m: &FringeMetrics) -> Self {
        self.visibility = Some(m.visibility);
        self.phase = Some(m.phase);
        self.period = Some(m.period);
        self.residual = Some(m.fit_residual);
        self
    }

    pub fn csv_line(&self) -> String {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.label,
            cell(self.visibility),
            cell(self.phase),
            cell(self.period),
            cell(self.distinguishability),
            cell(self.duality_sum),
            cell(self.absorption),
            cell(self.residual)
        )
    }
}

pub const SUMMARY_HEADER: &str = "scenario,V,phi_rad,period_m,D,duality_sum,R,residual";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub fringes: Option<FringeMetrics>,
    pub distinguishability: Option<f64>,
    pub duality_sum: Option<f64>,
    pub absorption: Option<f64>,
    pub centroids: Option<[(f64, f64); 2]>,
    /// Analytic vs numerical r.m.s. residuals, relative to the peak.
    pub residuals: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub rows: Vec<SummaryRow>,
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(s, "scenario: {}", self.scenario)?;
        if let Some(m) = &self.fringes {
            writeln!(
                s,
                "fringes: V = {:.6}, phi = {:.6} rad, period = {:.6e} m, fit residual = {:.3e} (r.m.s./peak, limit 1e-1), window [{:.4e}, {:.4e}] m",
                m.visibility, m.phase, m.period, m.fit_residual, m.window.0, m.window.1
            )?;
        }
        if let Some(d) = self.distinguishability {
            writeln!(s, "distinguishability: D = {d:.6}")?;
        }
        if let Some(v) = self.duality_sum {
            writeln!(s, "duality sum: D^2 + V^2 = {v:.6}")?;
        }
        if let Some(r) = self.absorption {
            writeln!(s, "absorption: R = {r:.6e}")?;
        }
        if let Some([l, r]) = self.centroids {
            writeln!(
                s,
                "spot centroids: left ({:.4e}, {:.4e}) m, right ({:.4e}, {:.4e}) m",
                l.0, l.1, r.0, r.1
            )?;
        }
        for (name, v) in &self.residuals {
            writeln!(
                s,
                "cross-engine residual [{name}]: {v:.3e} of peak (limit 1e-2)"
            )?;
        }
        for c in &self.checks {
            writeln!(
                s,
                "check {}: {} (value {:.6e}, required {})",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.value,
                c.tolerance
            )?;
        }
        for n in &self.notes {
            writeln!(s, "note: {n}")?;
        }
        writeln!(s, "status: {}", if self.passed() { "PASS" } else { "FAIL" })?;
        f.write_str(&s)
    }
}
