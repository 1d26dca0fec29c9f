//! JSON run configuration and its translation into core types.

use crate::CliError;
use magtorus_core::{GaugeConfig, SkewIntMatrix};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub task: Task,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Problem {
    pub n: Option<usize>,
    #[serde(default = "default_charge")]
    pub q: i64,
    pub nu: Vec<Vec<i64>>,
    pub alpha: Option<Vec<f64>>,
    pub shift: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub a_prime: Vec<VectorMode>,
    #[serde(default)]
    pub v_prime: Vec<ScalarMode>,
}

fn default_charge() -> i64 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarMode {
    pub l: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorMode {
    pub l: Vec<i64>,
    pub re: Vec<f64>,
    pub im: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct Numerics {
    pub grid: usize,
    pub n_max: u32,
    pub l_max: i64,
    pub theta_cutoff: f64,
    pub mass: f64,
    pub tolerances: Tolerances,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { grid: 64, n_max: 8, l_max: 6, theta_cutoff: 1e-18, mass: 0.5, tolerances: Tolerances::default() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", default)]
pub struct Tolerances {
    pub cocycle: f64,
    pub phase: f64,
    pub gram: f64,
    pub eigen: f64,
    pub quasiperiodicity: f64,
    pub bundle: f64,
    pub section: f64,
    pub spectrum: f64,
    pub convergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cocycle: 1e-12,
            phase: 1e-12,
            gram: 1e-8,
            eigen: 1e-9,
            quasiperiodicity: 1e-10,
            bundle: 1e-12,
            section: 1e-10,
            spectrum: 1e-8,
            convergence: 1e-6,
        }
    }
}

/// Parameters used by individual commands; each ignores the ones it does not need.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Task {
    /// `group`: product of named generators.
    pub expression: Option<String>,
    /// `normal-form`: an elementary divisor chain to validate.
    pub chain: Option<Vec<i64>>,
    /// `spectrum`: explicit labels to sweep.
    pub sweep: Option<Vec<Vec<f64>>>,
    /// `spectrum`: points per axis of a uniform label grid.
    pub sweep_grid: Option<usize>,
    /// `verify` / `bundle-check`: random samples per check.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// `bundle-check`: strip width of the standard cover.
    pub overlap: Option<f64>,
    /// `verify`: highest Landau index in the orthonormality check.
    pub levels: Option<u32>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<(RunConfig, Value), CliError> {
        let echo: Value = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("config: {e}")))?;
        let cfg: RunConfig =
            serde_json::from_value(echo.clone()).map_err(|e| CliError::Invalid(format!("config: {e}")))?;
        cfg.check_numerics()?;
        Ok((cfg, echo))
    }

    pub fn dim(&self) -> usize {
        self.problem.nu.len()
    }

    fn check_numerics(&self) -> Result<(), CliError> {
        let num = &self.numerics;
        if num.grid == 0 {
            return Err(CliError::Invalid("numerics.grid must be positive".into()));
        }
        if num.l_max < 0 {
            return Err(CliError::Invalid("numerics.lMax must be non-negative".into()));
        }
        if !(num.theta_cutoff > 0.0 && num.theta_cutoff < 1.0) {
            return Err(CliError::Invalid("numerics.thetaCutoff must lie in (0, 1)".into()));
        }
        if !(num.mass > 0.0 && num.mass.is_finite()) {
            return Err(CliError::Invalid("numerics.mass must be positive".into()));
        }
        Ok(())
    }

    pub fn flux_matrix(&self) -> Result<SkewIntMatrix, CliError> {
        let n = self.dim();
        if let Some(declared) = self.problem.n {
            if declared != n {
                return Err(CliError::Invalid(format!("problem.n = {declared} but nu is {n}×{n}")));
            }
        }
        if n == 0 {
            return Err(CliError::Invalid("problem.nu must be non-empty".into()));
        }
        if let Some(row) = self.problem.nu.iter().find(|r| r.len() != n) {
            return Err(CliError::Invalid(format!("problem.nu row has {} entries, expected {n}", row.len())));
        }
        Ok(SkewIntMatrix::from_rows(&self.problem.nu)?)
    }

    /// The full gauge configuration, validated.
    pub fn gauge(&self) -> Result<GaugeConfig, CliError> {
        let nu = self.flux_matrix()?;
        let n = nu.dim();
        let p = &self.problem;
        let mut cfg = GaugeConfig::canonical(p.q, nu, p.alpha.clone().unwrap_or_else(|| vec![0.0; n]))?;
        if let Some(shift) = &p.shift {
            cfg.shift = shift.clone();
        }
        for m in &p.v_prime {
            cfg.v_prime.insert(m.l.clone(), Complex64::new(m.re, m.im));
        }
        for m in &p.a_prime {
            let im = m.im.clone().unwrap_or_else(|| vec![0.0; m.re.len()]);
            if im.len() != m.re.len() {
                return Err(CliError::Invalid("aPrime entry has re and im of different lengths".into()));
            }
            cfg.a_prime.insert(m.l.clone(), m.re.iter().zip(&im).map(|(&r, &i)| Complex64::new(r, i)).collect());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
