//! Gate fidelities, durations and the dephasing time.
//!
//! File format (`key = value`, `#` comments, durations take `s`, `ms`,
//! `us` or `ns` suffixes):
//!
//! ```text
//! format = spindse-noise/1
//! f_single = 0.9999
//! f_two = 0.9998
//! t_single = 100ns
//! t2_star = 10us
//! ```
//!
//! Omitted keys take their defaults. `f_shuttle` defaults to `f_single`,
//! `f_swap` to `f_two^3` and `t_swap` to `3 * t_two`; these derived
//! defaults follow the values given in the same file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{DurationClass, GateKind, TqgFlavor};

pub const NOISE_FORMAT_TAG: &str = "spindse-noise/1";

#[derive(Debug, Error, PartialEq)]
pub enum NoiseConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("`{key}` = {value} is out of range: {reason}")]
    Range {
        key: String,
        value: f64,
        reason: &'static str,
    },
}

/// Noise parameters used by the ESP model and by SWAP replacement.
///
/// The default duration profile (100 ns single-qubit, 200 ns two-qubit,
/// 50 ns shuttle, 10 us T2*) is a placeholder for tests and examples, not a
/// calibrated device model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub f_single: f64,
    pub f_two: f64,
    pub f_shuttle: f64,
    pub f_swap: f64,
    /// Seconds.
    pub t_single: f64,
    pub t_two: f64,
    pub t_shuttle: f64,
    pub t_swap: f64,
    pub t2_star: f64,
    /// Number of native two-qubit gates charged for one `cx`.
    pub cx_multiplier: u32,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig::builder()
            .build()
            .expect("defaults are in range")
    }
}

impl NoiseConfig {
    pub fn builder() -> NoiseConfigBuilder {
        NoiseConfigBuilder::default()
    }

    /// Duration of a shuttle-based Z rotation (two shuttles).
    pub fn t_zshuttle(&self) -> f64 {
        2.0 * self.t_shuttle
    }

    pub fn fidelity(&self, kind: GateKind, flavor: Option<TqgFlavor>) -> f64 {
        match kind.duration_class() {
            DurationClass::Single => self.f_single,
            DurationClass::Two => self.f_two.powi(self.multiplier(flavor) as i32),
            DurationClass::Shuttle => self.f_shuttle,
            DurationClass::Swap => self.f_swap,
        }
    }

    pub fn log_fidelity(&self, kind: GateKind, flavor: Option<TqgFlavor>) -> f64 {
        match kind.duration_class() {
            DurationClass::Two => self.multiplier(flavor) as f64 * self.f_two.ln(),
            _ => self.fidelity(kind, flavor).ln(),
        }
    }

    pub fn duration(&self, kind: GateKind, flavor: Option<TqgFlavor>) -> f64 {
        match kind.duration_class() {
            DurationClass::Single => self.t_single,
            DurationClass::Two => self.multiplier(flavor) as f64 * self.t_two,
            DurationClass::Shuttle => self.t_shuttle,
            DurationClass::Swap => self.t_swap,
        }
    }

    fn multiplier(&self, flavor: Option<TqgFlavor>) -> u32 {
        match flavor {
            Some(TqgFlavor::Cx) => self.cx_multiplier,
            _ => 1,
        }
    }

    pub fn parse(text: &str) -> Result<NoiseConfig, NoiseConfigError> {
        let mut b = NoiseConfig::builder();
        let mut saw_format = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| NoiseConfigError::Parse { line, message };
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let key = key.trim();
            let value = value.trim();
            let number = || {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("bad number `{value}`")))
            };
            let seconds =
                || parse_duration(value).ok_or_else(|| err(format!("bad duration `{value}`")));
            match key {
                "format" => {
                    if value != NOISE_FORMAT_TAG {
                        return Err(err(format!(
                            "unsupported format tag, expected `{NOISE_FORMAT_TAG}`"
                        )));
                    }
                    saw_format = true;
                }
                "f_single" => b.f_single = number()?,
                "f_two" => b.f_two = number()?,
                "f_shuttle" => b.f_shuttle = Some(number()?),
                "f_swap" => b.f_swap = Some(number()?),
                "t_single" => b.t_single = seconds()?,
                "t_two" => b.t_two = seconds()?,
                "t_shuttle" => b.t_shuttle = seconds()?,
                "t_swap" => b.t_swap = Some(seconds()?),
                "t2_star" => b.t2_star = seconds()?,
                "cx_multiplier" => {
                    b.cx_multiplier = value
                        .parse()
                        .map_err(|_| err(format!("bad integer `{value}`")))?
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        if !saw_format {
            return Err(NoiseConfigError::Parse {
                line: 0,
                message: format!("missing `format = {NOISE_FORMAT_TAG}` line"),
            });
        }
        b.build()
    }

    pub fn serialize(&self) -> String {
        format!(
            "format = {NOISE_FORMAT_TAG}\nf_single = {}\nf_two = {}\nf_shuttle = {}\nf_swap = {}\n\
             t_single = {}ns\nt_two = {}ns\nt_shuttle = {}ns\nt_swap = {}ns\nt2_star = {}ns\ncx_multiplier = {}\n",
            self.f_single,
            self.f_two,
            self.f_shuttle,
            self.f_swap,
            self.t_single * 1e9,
            self.t_two * 1e9,
            self.t_shuttle * 1e9,
            self.t_swap * 1e9,
            self.t2_star * 1e9,
            self.cx_multiplier
        )
    }
}

fn parse_duration(text: &str) -> Option<f64> {
    let t = text.trim();
    let (num, scale) = if let Some(n) = t.strip_suffix("ns") {
        (n, 1e-9)
    } else if let Some(n) = t.strip_suffix("us") {
        (n, 1e-6)
    } else if let Some(n) = t.strip_suffix("µs") {
        (n, 1e-6)
    } else if let Some(n) = t.strip_suffix("ms") {
        (n, 1e-3)
    } else {
        (t.strip_suffix('s')?, 1.0)
    };
    num.trim().parse::<f64>().ok().map(|v| v * scale)
}

/// Builder resolving the derived defaults.
#[derive(Clone, Debug)]
pub struct NoiseConfigBuilder {
    pub f_single: f64,
    pub f_two: f64,
    pub f_shuttle: Option<f64>,
    pub f_swap: Option<f64>,
    pub t_single: f64,
    pub t_two: f64,
    pub t_shuttle: f64,
    pub t_swap: Option<f64>,
    pub t2_star: f64,
    pub cx_multiplier: u32,
}

impl Default for NoiseConfigBuilder {
    fn default() -> Self {
        NoiseConfigBuilder {
            f_single: 0.9999,
            f_two: 0.9998,
            f_shuttle: None,
            f_swap: None,
            t_single: 100e-9,
            t_two: 200e-9,
            t_shuttle: 50e-9,
            t_swap: None,
            t2_star: 10e-6,
            cx_multiplier: 1,
        }
    }
}

impl NoiseConfigBuilder {
    pub fn f_single(mut self, v: f64) -> Self {
        self.f_single = v;
        self
    }
    pub fn f_two(mut self, v: f64) -> Self {
        self.f_two = v;
        self
    }
    pub fn f_shuttle(mut self, v: f64) -> Self {
        self.f_shuttle = Some(v);
        self
    }
    pub fn f_swap(mut self, v: f64) -> Self {
        self.f_swap = Some(v);
        self
    }
    pub fn t_single(mut self, v: f64) -> Self {
        self.t_single = v;
        self
    }
    pub fn t_two(mut self, v: f64) -> Self {
        self.t_two = v;
        self
    }
    pub fn t_shuttle(mut self, v: f64) -> Self {
        self.t_shuttle = v;
        self
    }
    pub fn t_swap(mut self, v: f64) -> Self {
        self.t_swap = Some(v);
        self
    }
    pub fn t2_star(mut self, v: f64) -> Self {
        self.t2_star = v;
        self
    }
    pub fn cx_multiplier(mut self, v: u32) -> Self {
        self.cx_multiplier = v;
        self
    }

    pub fn build(self) -> Result<NoiseConfig, NoiseConfigError> {
        let cfg = NoiseConfig {
            f_single: self.f_single,
            f_two: self.f_two,
            f_shuttle: self.f_shuttle.unwrap_or(self.f_single),
            f_swap: self.f_swap.unwrap_or(self.f_two.powi(3)),
            t_single: self.t_single,
            t_two: self.t_two,
            t_shuttle: self.t_shuttle,
            t_swap: self.t_swap.unwrap_or(3.0 * self.t_two),
            t2_star: self.t2_star,
            cx_multiplier: self.cx_multiplier,
        };
        for (key, v) in [
            ("f_single", cfg.f_single),
            ("f_two", cfg.f_two),
            ("f_shuttle", cfg.f_shuttle),
            ("f_swap", cfg.f_swap),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(NoiseConfigError::Range {
                    key: key.into(),
                    value: v,
                    reason: "fidelities lie in (0, 1]",
                });
            }
        }
        for (key, v) in [
            ("t_single", cfg.t_single),
            ("t_two", cfg.t_two),
            ("t_shuttle", cfg.t_shuttle),
            ("t_swap", cfg.t_swap),
            ("t2_star", cfg.t2_star),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(NoiseConfigError::Range {
                    key: key.into(),
                    value: v,
                    reason: "durations are positive",
                });
            }
        }
        if cfg.cx_multiplier == 0 {
            return Err(NoiseConfigError::Range {
                key: "cx_multiplier".into(),
                value: 0.0,
                reason: "at least one native gate per cx",
            });
        }
        Ok(cfg)
    }
}
