//! Sweep configuration from INI files and command-line overrides.
//!
//! Keys live either at the top level or under a `[sweep]` section:
//!
//! ```ini
//! kind = detuning
//! start = -45
//! stop = 45
//! points = 901
//! chi = 15
//! omega_ratio = 2
//! eta = 0.1
//! gamma = 0.5
//! delta0 = 0
//! branch = d2
//! nmax = 12
//! out = sweep.csv
//! ```
//!
//! Also accepted: `spacing` (`linear` or `log`), `g_over_delta` (a comma
//! separated list), `alpha` and `parallel`.

use std::path::{Path, PathBuf};

use ini::Ini;

use crate::error::{Error, Result};
use crate::model::{FockTruncation, ResonanceLabel};
use crate::sweep::{Spacing, SweepKind, SweepSpec};

/// Environment variable overriding the default Fock truncation.
pub const NMAX_ENV: &str = "BLOCKADE_NMAX";

/// Optional settings; unset fields fall back to the next layer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepConfig {
    pub kind: Option<SweepKind>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<Spacing>,
    pub chi: Option<f64>,
    pub omega_ratio: Option<f64>,
    pub eta: Option<f64>,
    pub gamma: Option<f64>,
    pub delta0: Option<f64>,
    pub branch: Option<ResonanceLabel>,
    pub nmax: Option<usize>,
    pub out: Option<PathBuf>,
    pub g_over_delta: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub parallel: Option<bool>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad value for '{key}': '{value}'")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl SweepConfig {
    pub fn from_ini_str(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("cannot parse config: {e}")))?;
        Self::from_ini(&ini)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let ini = Ini::load_from_file(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_ini(&ini)
    }

    fn from_ini(ini: &Ini) -> Result<Self> {
        let mut c = Self::default();
        for (section, props) in ini.iter() {
            match section {
                None | Some("sweep") => {}
                Some(other) => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown config section [{other}]"
                    )))
                }
            }
            for (key, value) in props.iter() {
                c.set(key, value)?;
            }
        }
        Ok(c)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key.trim().to_ascii_lowercase().replace('-', "_");
        match k.as_str() {
            "kind" => self.kind = Some(value.parse()?),
            "start" => self.start = Some(parse(key, value)?),
            "stop" => self.stop = Some(parse(key, value)?),
            "points" => self.points = Some(parse(key, value)?),
            "spacing" => self.spacing = Some(value.parse()?),
            "chi" => self.chi = Some(parse(key, value)?),
            "omega_ratio" => self.omega_ratio = Some(parse(key, value)?),
            "eta" => self.eta = Some(parse(key, value)?),
            "gamma" => self.gamma = Some(parse(key, value)?),
            "delta0" | "delta_0" => self.delta0 = Some(parse(key, value)?),
            "branch" | "resonance_branch" => self.branch = Some(value.trim().parse()?),
            "nmax" | "n_max" => self.nmax = Some(parse(key, value)?),
            "out" | "output_path" => self.out = Some(PathBuf::from(value.trim())),
            "g_over_delta" => self.g_over_delta = Some(parse_list(key, value)?),
            "alpha" => self.alpha = Some(parse(key, value)?),
            "parallel" => self.parallel = Some(parse(key, value)?),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown config key '{key}'"
                )))
            }
        }
        Ok(())
    }

    /// `self` with every field set in `over` replaced.
    pub fn overlay(self, over: SweepConfig) -> Self {
        Self {
            kind: over.kind.or(self.kind),
            start: over.start.or(self.start),
            stop: over.stop.or(self.stop),
            points: over.points.or(self.points),
            spacing: over.spacing.or(self.spacing),
            chi: over.chi.or(self.chi),
            omega_ratio: over.omega_ratio.or(self.omega_ratio),
            eta: over.eta.or(self.eta),
            gamma: over.gamma.or(self.gamma),
            delta0: over.delta0.or(self.delta0),
            branch: over.branch.or(self.branch),
            nmax: over.nmax.or(self.nmax),
            out: over.out.or(self.out),
            g_over_delta: over.g_over_delta.or(self.g_over_delta),
            alpha: over.alpha.or(self.alpha),
            parallel: over.parallel.or(self.parallel),
        }
    }

    /// Resolves the final spec. `default_kind` is used when no kind is set;
    /// a conflicting explicit kind is an error. `env_nmax` is the value of
    /// [`NMAX_ENV`], consulted only when `nmax` is unset.
    pub fn resolve(
        &self,
        default_kind: Option<SweepKind>,
        env_nmax: Option<&str>,
    ) -> Result<SweepSpec> {
        let kind = match (self.kind, default_kind) {
            (Some(k), Some(d)) if k != d => {
                return Err(Error::InvalidParameter(format!(
                    "config asks for a {k} sweep but the command runs a {d} sweep"
                )))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(Error::InvalidParameter("sweep kind is not set".into())),
        };
        let mut spec = SweepSpec::defaults(kind);
        if let Some(v) = self.start {
            spec.axis.start = v;
        }
        if let Some(v) = self.stop {
            spec.axis.stop = v;
        }
        if let Some(v) = self.points {
            spec.axis.points = v;
        }
        if let Some(v) = self.spacing {
            spec.axis.spacing = v;
        }
        if let Some(v) = self.chi {
            spec.fixed.chi = v;
        }
        if let Some(v) = self.omega_ratio {
            spec.omega_ratio = v;
        }
        if let Some(v) = self.eta {
            spec.fixed.eta = v;
        }
        if let Some(v) = self.gamma {
            spec.fixed.gamma = v;
        }
        if let Some(v) = self.delta0 {
            spec.fixed.delta_0 = v;
        }
        if self.branch.is_some() {
            spec.resonance_branch = self.branch;
        }
        let nmax = match (self.nmax, env_nmax) {
            (Some(n), _) => Some(n),
            (None, Some(text)) => Some(parse(NMAX_ENV, text)?),
            (None, None) => None,
        };
        if let Some(n) = nmax {
            spec.truncation = FockTruncation::new(n)?;
        }
        if let Some(v) = &self.g_over_delta {
            spec.g_over_delta = v.clone();
        }
        if let Some(v) = self.alpha {
            spec.alpha = v;
        }
        if let Some(v) = self.parallel {
            spec.parallel = v;
        }
        spec.fixed.omega_r = spec.omega_ratio * spec.fixed.chi;
        spec.validate()?;
        Ok(spec)
    }
}
