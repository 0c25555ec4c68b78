//! `key = value` settings read from the file named by `CHAIN_SPECTRA_CONFIG`.

use std::path::Path;

use crate::chain::{DEFAULT_STATE_CAP, DEGENERACY_TOLERANCE};

pub const CONFIG_ENV: &str = "CHAIN_SPECTRA_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Width of one level-diagram column.
    pub panel_width: f64,
    pub panel_gap: f64,
    pub tick_length: f64,
    pub margin: f64,
    /// Height of the common [0, 1] range.
    pub plot_height: f64,
    pub label_size: f64,
    pub degeneracy_tol: f64,
    pub state_cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            panel_width: 120.0,
            panel_gap: 30.0,
            tick_length: 80.0,
            margin: 40.0,
            plot_height: 400.0,
            label_size: 14.0,
            degeneracy_tol: DEGENERACY_TOLERANCE,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

fn positive(key: &str, value: &str) -> Result<f64, String> {
    match value.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("config key {key} needs a positive number, got {value:?}")),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "panel_width" => cfg.panel_width = positive(key, value)?,
                "panel_gap" => cfg.panel_gap = positive(key, value)?,
                "tick_length" => cfg.tick_length = positive(key, value)?,
                "margin" => cfg.margin = positive(key, value)?,
                "plot_height" => cfg.plot_height = positive(key, value)?,
                "label_size" => cfg.label_size = positive(key, value)?,
                "degeneracy_tol" => cfg.degeneracy_tol = positive(key, value)?,
                "state_cap" => {
                    cfg.state_cap = value
                        .parse()
                        .map_err(|_| format!("config key state_cap needs an integer, got {value:?}"))?
                }
                other => return Err(format!("config line {}: unknown key {other:?}", lineno + 1)),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Config::parse(&text)
    }

    /// Defaults, overridden by the file in `CHAIN_SPECTRA_CONFIG` if set.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Config::load(Path::new(&p)),
            _ => Ok(Config::default()),
        }
    }
}
