use serde::{Deserialize, Serialize};

/// One named residual compared against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Named residuals produced by a verification routine. Failures are recorded,
/// never raised.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> &mut Self {
        let passed = residual.is_finite() && residual <= tolerance;
        self.checks.push(Check { name: name.into(), residual, tolerance, passed });
        self
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn residual(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, |c| c.residual)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<4} {:<40} residual {:>10.3e}  tol {:>8.1e}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

/// Running maximum over a sequence of residuals.
pub(crate) fn max_of(iter: impl IntoIterator<Item = f64>) -> f64 {
    iter.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}
