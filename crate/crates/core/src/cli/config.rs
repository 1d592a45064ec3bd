//! JSON run configurations. Complex numbers are `[re, im]` (a bare number is
//! read as real), matrices are row-major nested arrays.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::numerics::{CMatrix, C64};

/// Error raised while reading or validating a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cx {
    Real(f64),
    Pair([f64; 2]),
}

impl Cx {
    pub fn value(self) -> C64 {
        match self {
            Cx::Real(x) => C64::new(x, 0.0),
            Cx::Pair([a, b]) => C64::new(a, b),
        }
    }
}

impl Default for Cx {
    fn default() -> Self {
        Cx::Real(0.0)
    }
}

pub type MatrixLit = Vec<Vec<Cx>>;

pub fn matrix(name: &str, m: &MatrixLit) -> Result<CMatrix, ConfigError> {
    let n = m.len();
    if n == 0 {
        return Err(bad(format!("{name}: empty matrix")));
    }
    if let Some(row) = m.iter().find(|row| row.len() != n) {
        return Err(bad(format!("{name}: not square ({n} rows, a row of length {})", row.len())));
    }
    let rows: Vec<Vec<C64>> = m.iter().map(|row| row.iter().map(|z| z.value()).collect()).collect();
    let out = CMatrix::from_rows(&rows);
    if !out.is_finite() {
        return Err(bad(format!("{name}: non-finite entry")));
    }
    Ok(out)
}

pub fn matrix_lit(m: &CMatrix) -> MatrixLit {
    let d = m.dim();
    (0..d).map(|i| (0..d).map(|j| Cx::Pair([m[(i, j)].re, m[(i, j)].im])).collect()).collect()
}

pub fn positive(name: &str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive and finite, got {x}")))
    }
}

pub fn finite(name: &str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be finite, got {x}")))
    }
}

pub fn window(name: &str, w: [f64; 2]) -> Result<(), ConfigError> {
    if w[0].is_finite() && w[1].is_finite() && w[0] < w[1] {
        Ok(())
    } else {
        Err(bad(format!("{name} must be an increasing pair of finite numbers, got {w:?}")))
    }
}

pub fn at_least(name: &str, n: usize, min: usize) -> Result<(), ConfigError> {
    if n >= min {
        Ok(())
    } else {
        Err(bad(format!("{name} must be at least {min}, got {n}")))
    }
}

/// Read a JSON file (or `{}` when `path` is None) and apply `key=value`
/// overrides. Keys may be dotted (`pendulum.h=100`); values are parsed as
/// JSON and fall back to strings.
pub fn load(path: Option<&std::path::Path>, overrides: &[String]) -> Result<Value, ConfigError> {
    let mut v = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| bad(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    if !v.is_object() {
        return Err(bad("config must be a JSON object"));
    }
    for o in overrides {
        let (key, raw) = o.split_once('=').ok_or_else(|| bad(format!("override '{o}' is not key=value")))?;
        let val = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(&mut v, key, val)?;
    }
    Ok(v)
}

fn set_path(v: &mut Value, key: &str, val: Value) -> Result<(), ConfigError> {
    let mut cur = v;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(bad(format!("override key '{key}' has an empty segment")));
        }
        let obj = cur.as_object_mut().ok_or_else(|| bad(format!("override '{key}': '{part}' is not inside an object")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), val);
            return Ok(());
        }
        cur = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

pub fn parse<T: DeserializeOwned>(v: Value) -> Result<T, ConfigError> {
    serde_json::from_value(v).map_err(|e| bad(e.to_string()))
}

fn d_seed() -> u64 {
    0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomState {
    pub d: usize,
    #[serde(default = "d_scale")]
    pub scale: f64,
}

fn d_scale() -> f64 {
    0.3
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub seed: u64,
    pub c: Option<MatrixLit>,
    pub f: Option<MatrixLit>,
    pub b: Option<MatrixLit>,
    /// Draw F, B, C at random from `seed` instead of giving them.
    pub random: Option<RandomState>,
    pub alpha: Cx,
    pub tag: String,
    pub t_end: f64,
    pub tol: f64,
    pub samples: usize,
    pub mu: Vec<Cx>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            seed: d_seed(),
            c: None,
            f: None,
            b: None,
            random: Some(RandomState { d: 3, scale: d_scale() }),
            alpha: Cx::Real(0.0),
            tag: "none".into(),
            t_end: 10.0,
            tol: 1e-10,
            samples: 101,
            mu: vec![Cx::Pair([0.7, 0.2]), Cx::Pair([-0.4, 1.1])],
        }
    }
}

/// Pendulum parameters; unspecified δ and R default to the Fig 1 values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PendulumLit {
    pub delta: f64,
    pub r: f64,
    /// Either H₀ or the scaled energy h = (1+δ)²H₀/δ.
    pub h0: Option<f64>,
    pub h: Option<f64>,
}

impl Default for PendulumLit {
    fn default() -> Self {
        PendulumLit { delta: 0.5, r: 10.0, h0: None, h: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopLit {
    pub omega: MatrixLit,
    pub p: MatrixLit,
    pub j: MatrixLit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopConfig {
    pub seed: u64,
    pub pendulum: Option<PendulumLit>,
    pub state: Option<TopLit>,
    /// Defaults to one period for a pendulum, 10 otherwise.
    pub t_end: Option<f64>,
    pub samples: usize,
}

impl Default for TopConfig {
    fn default() -> Self {
        TopConfig {
            seed: d_seed(),
            pendulum: Some(PendulumLit { delta: 0.5, r: 10.0, h0: Some(20.0 / 9.0), h: None }),
            state: None,
            t_end: None,
            samples: 201,
        }
    }
}

/// Source of a potential for `bands` and `monodromy`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    pub seed: u64,
    /// pendulum | mathieu | elliptic | soliton | top-trajectory
    pub source: String,
    pub pendulum: PendulumLit,
    pub a: f64,
    pub gamma: f64,
    pub k: f64,
    pub state: Option<TopLit>,
    /// Period of a top-trajectory potential; without it no monodromy is computed.
    pub period: Option<f64>,
    pub symmetrized: bool,
    pub window: [f64; 2],
    pub points: usize,
    pub curve_samples: usize,
    /// Monodromy only: explicit λ values instead of the window grid.
    pub lambdas: Option<Vec<f64>>,
    /// Monodromy only: locate multiplier collisions in the window.
    pub collisions: bool,
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig {
            seed: d_seed(),
            source: "pendulum".into(),
            pendulum: PendulumLit { delta: 0.5, r: 10.0, h0: None, h: Some(10.0) },
            a: 2.0,
            gamma: -2.0,
            k: 0.5,
            state: None,
            period: None,
            symmetrized: false,
            window: [-40.0, 40.0],
            points: 200,
            curve_samples: 800,
            lambdas: None,
            collisions: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillatorConfig {
    pub seed: u64,
    pub alpha: f64,
    pub k: f64,
    pub gamma: f64,
    pub chi0: f64,
    /// Grid for U and the ground states.
    pub x_range: [f64; 2],
    /// Grid for the reduced equation solution φ.
    pub phi_range: [f64; 2],
    pub points: usize,
    pub window: [f64; 2],
    pub step: f64,
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        OscillatorConfig {
            seed: d_seed(),
            alpha: 1.0,
            k: 0.5,
            gamma: 0.05,
            chi0: 0.0,
            x_range: [-5.0, 5.0],
            phi_range: [-40.0, 40.0],
            points: 401,
            window: [-0.7, 4.6],
            step: 0.05,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymfLit {
    pub k1: f64,
    pub k2: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamiliesConfig {
    pub seed: u64,
    pub mathieu_a: f64,
    pub symf: SymfLit,
    pub elliptic_gamma: f64,
    pub elliptic_k: f64,
    pub soliton_gamma: f64,
}

impl Default for FamiliesConfig {
    fn default() -> Self {
        FamiliesConfig {
            seed: d_seed(),
            mathieu_a: 2.0,
            symf: SymfLit { k1: 0.7, k2: 0.4, omega0: 0.3, omega1: 0.1, alpha: 0.0 },
            elliptic_gamma: -2.0,
            elliptic_k: 0.5,
            soliton_gamma: 0.25,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckConfig {
    pub seed: u64,
    /// Criterion ids to run; all when empty.
    pub only: Vec<u8>,
}
