use std::path::{Path, PathBuf};

use flamespeed_core::hj;
use flamespeed_core::inequalities::SuiteConfig;
use flamespeed_core::perturbation::{Alpha2Form, DEFAULT_TRUNCATION};
use flamespeed_core::{FlowSpec, Momentum, Scheme, SolverOptions};
use serde::Deserialize;

use crate::Failure;

pub const DEFAULT_SWEEP: [f64; 6] = [4.0, 2.0, 1.0, 0.5, 0.25, 0.1];
pub const DEFAULT_SELECT: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const DEFAULT_SLOPE: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumConfig {
    pub gamma: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub grid_n: Option<usize>,
    pub scheme: Option<Scheme>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectSection {
    pub d_schedule: Option<Vec<f64>>,
    pub slope_d: Option<Vec<f64>>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub discrete_cases: Option<usize>,
    pub continuous_cases: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSection {
    /// Fourier data file; the shear flow `[flow]` is used when absent.
    pub field: Option<PathBuf>,
    /// Direction `p`, normalized before use. Defaults to the momentum.
    pub direction: Option<Vec<f64>>,
    pub d: Option<f64>,
    pub delta: Option<f64>,
    pub truncation: Option<i64>,
    pub form: Option<Alpha2Form>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    /// Shear cross-check at these `delta` (largest first).
    #[serde(default)]
    pub cross_check: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HjSection {
    pub hamiltonian: Option<String>,
    pub potential: Option<FlowSpec>,
    pub p: Option<f64>,
    pub d_schedule: Option<Vec<f64>>,
}

/// The TOML run configuration. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub flow: Option<FlowSpec>,
    pub momentum: Option<MomentumConfig>,
    pub d: Option<f64>,
    pub d_schedule: Option<Vec<f64>>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub select: SelectSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub perturb: PerturbSection,
    #[serde(default)]
    pub hj: HjSection,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

fn config_error(msg: impl Into<String>) -> Failure {
    Failure::config(msg)
}

fn check_schedule(name: &str, ds: &[f64]) -> Result<(), Failure> {
    if ds.is_empty() {
        return Err(config_error(format!("{name} is empty")));
    }
    if let Some(d) = ds.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(config_error(format!("{name} has a non-positive entry {d}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, Failure> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Applies the overrides and checks every field that a command may read.
    pub fn finish(mut self, o: &Overrides) -> Result<RunConfig, Failure> {
        if let Some(out) = &o.out {
            self.output_dir = Some(out.clone());
        }
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.grid.is_some() {
            self.solver.grid_n = o.grid;
        }
        if o.tol.is_some() {
            self.solver.tol = o.tol;
        }
        if let Some(n) = self.solver.grid_n {
            if n < 16 || !n.is_power_of_two() {
                return Err(config_error(format!("grid_n must be a power of two >= 16, got {n}")));
            }
        }
        if let Some(t) = self.solver.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_error(format!("tol must be positive, got {t}")));
            }
        }
        if let Some(flow) = &self.flow {
            self.flow = Some(flow.resolve().map_err(|e| config_error(e.to_string()))?);
        }
        if let Some(m) = self.momentum {
            if !(m.gamma.is_finite() && m.mu.is_finite()) {
                return Err(config_error("momentum must be finite"));
            }
        }
        if let Some(d) = self.d {
            if !(d > 0.0 && d.is_finite()) {
                return Err(config_error(format!("d must be positive, got {d}")));
            }
        }
        if let Some(ds) = &self.d_schedule {
            check_schedule("d_schedule", ds)?;
        }
        if let Some(ds) = &self.select.d_schedule {
            check_schedule("select.d_schedule", ds)?;
        }
        if let Some(ds) = &self.select.slope_d {
            check_schedule("select.slope_d", ds)?;
            if ds.len() < 2 {
                return Err(config_error("select.slope_d needs at least two entries"));
            }
        }
        if let Some(ds) = &self.hj.d_schedule {
            check_schedule("hj.d_schedule", ds)?;
        }
        Ok(self)
    }

    pub fn flow_spec(&self) -> FlowSpec {
        self.flow
            .clone()
            .unwrap_or_else(|| FlowSpec::preset("single-well").expect("built-in preset"))
    }

    pub fn momentum(&self) -> Momentum {
        let m = self.momentum.unwrap_or(MomentumConfig { gamma: 1.0, mu: 0.1 });
        Momentum::new(m.gamma, m.mu)
    }

    pub fn d(&self) -> f64 {
        self.d.unwrap_or(1.0)
    }

    pub fn sweep_schedule(&self) -> Vec<f64> {
        self.d_schedule.clone().unwrap_or_else(|| DEFAULT_SWEEP.to_vec())
    }

    pub fn solver(&self) -> SolverOptions {
        let mut o = SolverOptions {
            grid_n: self.solver.grid_n,
            scheme: self.solver.scheme,
            ..SolverOptions::default()
        };
        if let Some(t) = self.solver.tol {
            o.tol = t;
        }
        if let Some(m) = self.solver.max_iter {
            o.max_iter = m;
        }
        o
    }

    pub fn select_schedule(&self) -> Vec<f64> {
        self.select.d_schedule.clone().unwrap_or_else(|| DEFAULT_SELECT.to_vec())
    }

    pub fn slope_schedule(&self) -> Vec<f64> {
        self.select.slope_d.clone().unwrap_or_else(|| DEFAULT_SLOPE.to_vec())
    }

    pub fn select_tol(&self) -> f64 {
        self.select.tol.unwrap_or(1e-12)
    }

    pub fn suite(&self) -> SuiteConfig {
        let mut s = SuiteConfig::default();
        if let Some(n) = self.verify.discrete_cases {
            s.discrete_cases = n;
        }
        if let Some(n) = self.verify.continuous_cases {
            s.continuous_cases = n;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s
    }

    pub fn field_path(&self) -> Option<PathBuf> {
        self.perturb.field.as_ref().map(|p| if p.is_absolute() { p.clone() } else { self.base_dir.join(p) })
    }

    pub fn truncation(&self) -> i64 {
        self.perturb.truncation.unwrap_or(DEFAULT_TRUNCATION)
    }

    pub fn hamiltonian(&self) -> Result<Box<dyn hj::Hamiltonian>, Failure> {
        hj::hamiltonian_by_name(self.hj.hamiltonian.as_deref().unwrap_or("quadratic"))
            .map_err(|e| config_error(e.to_string()))
    }

    pub fn potential(&self) -> Result<FlowSpec, Failure> {
        match &self.hj.potential {
            Some(p) => p.resolve().map_err(|e| config_error(e.to_string())),
            None => Ok(FlowSpec::new(vec![1.0], vec![], 0.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, Failure> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Failure::config(e.to_string()))?;
        cfg.finish(&Overrides::default())
    }

    #[test]
    fn full_config() {
        let cfg = parse(
            r#"
            d = 0.5
            seed = 3
            [flow]
            preset = "two-max-distinct"
            [momentum]
            gamma = 1.0
            mu = 0.2
            [solver]
            grid_n = 256
            scheme = "spectral"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.d(), 0.5);
        assert_eq!(cfg.momentum(), Momentum::new(1.0, 0.2));
        assert_eq!(cfg.solver().grid_n, Some(256));
        assert_eq!(cfg.suite().seed, 3);
        assert_eq!(cfg.flow_spec().cos.len(), 3);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse("d_schedule = []").is_err());
        assert!(parse("[solver]\ngrid_n = 300").is_err());
        assert!(parse("d = -1.0").is_err());
        assert!(parse("unknown = 1").is_err());
        assert!(parse("[flow]\npreset = \"nope\"").is_err());
    }

    #[test]
    fn overrides_win() {
        let cfg: RunConfig = toml::from_str("seed = 1\n[solver]\ngrid_n = 64").unwrap();
        let o = Overrides {
            seed: Some(9),
            grid: Some(128),
            ..Default::default()
        };
        let cfg = cfg.finish(&o).unwrap();
        assert_eq!(cfg.suite().seed, 9);
        assert_eq!(cfg.solver().grid_n, Some(128));
    }
}
