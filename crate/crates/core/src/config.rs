//! Run configuration: flat `key = value` files (`#` starts a comment) or
//! the equivalent JSON object.
//!
//! Model keys: `n`, `alpha`, `mu`, `p`, `epsilon`, `R`, `nonlinearity`
//! (`ut` | `grad`) and optional `w`, which replaces `alpha` and `mu` by
//! their FLRW values. Solver keys: `dr`, `t_max`, `cfl`, `threshold`,
//! `confirm_factor`, `dt_cap`, `profile`, `linear`, `diag_every`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{flrw_to_model, FlrwParams, ModelParams, Nonlinearity};
use crate::solver::{InitialProfile, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: u32,
    pub alpha: f64,
    pub mu: f64,
    pub p: f64,
    pub epsilon: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub nonlinearity: Nonlinearity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    pub dr: f64,
    pub t_max: f64,
    pub cfl: f64,
    pub threshold: f64,
    pub confirm_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_cap: Option<f64>,
    pub profile: InitialProfile,
    pub linear: bool,
    pub diag_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 3,
            alpha: 0.0,
            mu: 0.0,
            p: 2.0,
            epsilon: 0.1,
            radius: 1.0,
            nonlinearity: Nonlinearity::TimeDerivative,
            w: None,
            dr: 0.02,
            t_max: 100.0,
            cfl: 0.5,
            threshold: 1e6,
            confirm_factor: 100.0,
            dt_cap: None,
            profile: InitialProfile::Standard,
            linear: false,
            diag_every: 50,
        }
    }
}

fn num(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| Error::Config(format!("`{key}`: not a number: `{v}`")))
}

impl RunConfig {
    /// Parses `key = value` lines on top of the defaults.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    /// Parses a JSON object (as written to `manifest.json`).
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// JSON if the first non-blank character is `{`, key–value otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_kv(text)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "n" => self.n = v.parse().map_err(|_| Error::Config(format!("`n`: not a positive integer: `{v}`")))?,
            "alpha" => self.alpha = num(key, v)?,
            "mu" => self.mu = num(key, v)?,
            "p" => self.p = num(key, v)?,
            "epsilon" | "eps" => self.epsilon = num(key, v)?,
            "R" | "radius" => self.radius = num(key, v)?,
            "nonlinearity" => self.nonlinearity = Nonlinearity::parse(v)?,
            "w" => self.w = Some(num(key, v)?),
            "dr" => self.dr = num(key, v)?,
            "t_max" => self.t_max = num(key, v)?,
            "cfl" => self.cfl = num(key, v)?,
            "threshold" => self.threshold = num(key, v)?,
            "confirm_factor" => self.confirm_factor = num(key, v)?,
            "dt_cap" => self.dt_cap = Some(num(key, v)?),
            "profile" => self.profile = InitialProfile::parse(v)?,
            "linear" => {
                self.linear = v.parse().map_err(|_| Error::Config(format!("`linear`: expected true/false, got `{v}`")))?
            }
            "diag_every" => {
                self.diag_every = v.parse().map_err(|_| Error::Config(format!("`diag_every`: not an integer: `{v}`")))?
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Validated model; `w`, when present, fixes `alpha` and `mu`.
    pub fn model(&self) -> Result<ModelParams<f64>> {
        match self.w {
            Some(w) => {
                let f = FlrwParams::new(self.n, w)?;
                flrw_to_model(&f, self.p, self.epsilon, self.radius, self.nonlinearity)
            }
            None => ModelParams::new(self.n, self.alpha, self.mu, self.p, self.epsilon, self.radius, self.nonlinearity)
                .validate(),
        }
    }

    /// The configuration with `alpha` and `mu` replaced by the values the
    /// model actually uses.
    pub fn resolved(&self) -> Result<Self> {
        let m = self.model()?;
        Ok(Self { alpha: m.alpha, mu: m.mu, ..self.clone() })
    }

    pub fn solver_config(&self) -> Result<SolverConfig<f64>> {
        let mut s = SolverConfig::new(self.model()?, self.dr, self.t_max);
        s.cfl = self.cfl;
        s.blowup_threshold = self.threshold;
        s.confirm_factor = self.confirm_factor;
        if let Some(cap) = self.dt_cap {
            s.dt_cap = cap;
        }
        s.profile = self.profile;
        s.nonlinear = !self.linear;
        s.diag_every = self.diag_every;
        s.validate()?;
        Ok(s)
    }
}
