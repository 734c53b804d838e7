//! Run configuration: a flat key-value text file with sections. Unknown
//! keys or sections are errors, not warnings — a typo in a tolerance name
//! must not silently mask a failing check.

use std::path::{Path, PathBuf};

use gaudin_core::bethe::SolverConfig;
use gaudin_core::params::{ModelParams, Tolerances};
use gaudin_core::C64;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteFlags {
    pub algebra: bool,
    pub bethe: bool,
    pub eigen: bool,
    pub scalar: bool,
}

impl Default for SuiteFlags {
    fn default() -> Self {
        SuiteFlags {
            algebra: true,
            bethe: true,
            eigen: true,
            scalar: true,
        }
    }
}

impl SuiteFlags {
    pub fn any(&self) -> bool {
        self.algebra || self.bethe || self.eigen || self.scalar
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub solver: SolverConfig,
    /// Master seed for all randomized checks; per-check streams derive
    /// from it.
    pub rng_seed: u64,
    pub suites: SuiteFlags,
    pub roots_path: PathBuf,
    pub report_path: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ModelParams::from_real(0.3, 0.7, 0.5, 0.2, 0.1, &[0.11, 0.23])
                .expect("default instance is valid"),
            solver: SolverConfig::default(),
            rng_seed: 1,
            suites: SuiteFlags::default(),
            roots_path: PathBuf::from("roots.json"),
            report_path: PathBuf::from("report.jsonl"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let mut model_fields: ModelFields = ModelFields::default();
        let mut tol = Tolerances::default();
        let mut solver = SolverConfig::default();
        let mut rng_seed: u64 = 1;
        let mut suites = SuiteFlags::default();
        let mut roots_path = PathBuf::from("roots.json");
        let mut report_path = PathBuf::from("report.jsonl");

        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_string();
                match section.as_str() {
                    "model" | "tolerances" | "solver" | "suites" | "output" => {}
                    other => {
                        return Err(CliError::Config(format!(
                            "line {}: unknown section [{other}]",
                            lineno + 1
                        )))
                    }
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let bad_key = || {
                CliError::Config(format!(
                    "line {}: unknown key `{key}` in section [{section}]",
                    lineno + 1
                ))
            };
            match section.as_str() {
                "model" => match key {
                    "lambda1" => model_fields.lambda1 = parse_f64(key, value)?,
                    "lambda2" => model_fields.lambda2 = parse_f64(key, value)?,
                    "xi" => model_fields.xi = parse_f64(key, value)?,
                    "delta" => model_fields.delta = parse_f64(key, value)?,
                    "eta" => model_fields.eta = parse_f64(key, value)?,
                    "z" => {
                        model_fields.z = value
                            .split(',')
                            .map(|s| parse_f64("z entry", s.trim()))
                            .collect::<Result<Vec<_>, _>>()?
                    }
                    _ => return Err(bad_key()),
                },
                "tolerances" => match key {
                    "eps_degenerate" => tol.eps_degenerate = parse_f64(key, value)?,
                    "eps_singular_gauge" => tol.eps_singular_gauge = parse_f64(key, value)?,
                    "tol_onshell" => tol.tol_onshell = parse_f64(key, value)?,
                    "tol_identity" => tol.tol_identity = parse_f64(key, value)?,
                    "fd_step" => tol.fd_step = parse_f64(key, value)?,
                    "fd_disagree" => tol.fd_disagree = parse_f64(key, value)?,
                    "cond_warn" => tol.cond_warn = parse_f64(key, value)?,
                    "cond_ill" => tol.cond_ill = parse_f64(key, value)?,
                    _ => return Err(bad_key()),
                },
                "solver" => match key {
                    "rng_seed" => rng_seed = parse_u64(key, value)?,
                    "starts" => solver.starts = parse_u64(key, value)? as usize,
                    "max_iter" => solver.max_iter = parse_u64(key, value)? as usize,
                    "tol" => solver.tol = parse_f64(key, value)?,
                    "dedup_tol" => solver.dedup_tol = parse_f64(key, value)?,
                    "im_cap" => solver.im_cap = parse_f64(key, value)?,
                    _ => return Err(bad_key()),
                },
                "suites" => match key {
                    "algebra" => suites.algebra = parse_bool(key, value)?,
                    "bethe" => suites.bethe = parse_bool(key, value)?,
                    "eigen" => suites.eigen = parse_bool(key, value)?,
                    "scalar" => suites.scalar = parse_bool(key, value)?,
                    _ => return Err(bad_key()),
                },
                "output" => match key {
                    "roots" => roots_path = PathBuf::from(value),
                    "report" => report_path = PathBuf::from(value),
                    _ => return Err(bad_key()),
                },
                "" => {
                    return Err(CliError::Config(format!(
                        "line {}: key `{key}` outside any section",
                        lineno + 1
                    )))
                }
                _ => unreachable!(),
            }
        }

        let mut config = RunConfig {
            params: model_fields.build(tol)?,
            solver,
            rng_seed,
            suites,
            roots_path,
            report_path,
        };
        config.solver.seed = rng_seed;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !self.suites.any() {
            return Err(CliError::Config("suite selection is empty".into()));
        }
        let t = &self.params.tol;
        for (name, v) in [
            ("eps_degenerate", t.eps_degenerate),
            ("eps_singular_gauge", t.eps_singular_gauge),
            ("tol_onshell", t.tol_onshell),
            ("tol_identity", t.tol_identity),
            ("fd_step", t.fd_step),
            ("fd_disagree", t.fd_disagree),
        ] {
            if v <= 0.0 || v.is_nan() {
                return Err(CliError::Config(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        self.params
            .validate()
            .map_err(|e| CliError::Config(format!("model: {e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct ModelFields {
    lambda1: f64,
    lambda2: f64,
    xi: f64,
    delta: f64,
    eta: f64,
    z: Vec<f64>,
}

impl Default for ModelFields {
    fn default() -> Self {
        ModelFields {
            lambda1: 0.3,
            lambda2: 0.7,
            xi: 0.5,
            delta: 0.2,
            eta: 0.1,
            z: vec![0.11, 0.23],
        }
    }
}

impl ModelFields {
    fn build(self, tol: Tolerances) -> Result<ModelParams, CliError> {
        let p = ModelParams::new(
            C64::new(self.lambda1, 0.0),
            C64::new(self.lambda2, 0.0),
            C64::new(self.xi, 0.0),
            C64::new(self.delta, 0.0),
            C64::new(self.eta, 0.0),
            self.z.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
        .map_err(|e| CliError::Config(format!("model: {e}")))?;
        Ok(p.with_tolerances(tol))
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("key `{key}`: `{value}` is not a number")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64, CliError> {
    value
        .parse::<u64>()
        .map_err(|_| CliError::Config(format!("key `{key}`: `{value}` is not an integer")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::Config(format!(
            "key `{key}`: `{value}` is not a boolean"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# example
[model]
lambda1 = 0.31
lambda2 = 0.72
xi = 0.51
delta = 0.21
eta = 0.12
z = 0.11, 0.23, 0.41, 0.59

[tolerances]
tol_onshell = 1e-9

[solver]
rng_seed = 42
starts = 128

[suites]
algebra = true
bethe = true
eigen = false
scalar = true

[output]
roots = out/r.json
report = out/rep.jsonl
";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.params.n_sites, 4);
        assert_eq!(cfg.rng_seed, 42);
        assert_eq!(cfg.solver.seed, 42);
        assert_eq!(cfg.solver.starts, 128);
        assert!(!cfg.suites.eigen);
        assert_eq!(cfg.params.tol.tol_onshell, 1e-9);
        assert_eq!(cfg.roots_path, PathBuf::from("out/r.json"));
    }

    #[test]
    fn unknown_key_is_an_error() {
        let text = "[tolerances]\ntol_onshel = 1e-9\n";
        let err = RunConfig::parse(text).unwrap_err();
        assert!(err.to_string().contains("unknown key"));
    }

    #[test]
    fn unknown_section_is_an_error() {
        assert!(RunConfig::parse("[modell]\n").is_err());
    }

    #[test]
    fn empty_suite_selection_is_an_error() {
        let text = "[suites]\nalgebra = false\nbethe = false\neigen = false\nscalar = false\n";
        let err = RunConfig::parse(text).unwrap_err();
        assert!(err.to_string().contains("suite selection"));
    }

    #[test]
    fn odd_chain_is_an_error() {
        let text = "[model]\nz = 0.1, 0.2, 0.3\n";
        assert!(RunConfig::parse(text).is_err());
    }
}
