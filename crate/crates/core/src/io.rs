//! Instance file I/O.
//!
//! Instances are stored as JSON objects:
//!
//! ```json
//! {"n": 2, "beta": 0.5, "P": [[0.5, 0.5], [0.5, 0.5]], "R": [1.0, 0.0],
//!  "Q": [0.0, 0.0], "nu": 0.5}
//! ```
//!
//! Numbers are IEEE-754 doubles; `P` is row-major by state. `Q` and `nu`
//! are optional, and the presence of `Q` marks a stopping instance (`nu`
//! defaults to 0 when absent). Values survive a save/load round trip
//! bit-exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::model::{BanditInstance, StoppingInstance};
use crate::scalar::Scalar;

/// Result of loading an instance file, depending on whether terminal
/// rewards are present.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedInstance<S> {
    Bandit(BanditInstance<S>),
    Stopping(StoppingInstance<S>),
}

impl<S: Scalar> LoadedInstance<S> {
    pub fn base(&self) -> &BanditInstance<S> {
        match self {
            LoadedInstance::Bandit(b) => b,
            LoadedInstance::Stopping(s) => s.base(),
        }
    }

    pub fn into_bandit(self) -> BanditInstance<S> {
        match self {
            LoadedInstance::Bandit(b) => b,
            LoadedInstance::Stopping(s) => s.base().clone(),
        }
    }

    pub fn as_stopping(&self) -> Option<&StoppingInstance<S>> {
        match self {
            LoadedInstance::Stopping(s) => Some(s),
            LoadedInstance::Bandit(_) => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    beta: f64,
    #[serde(rename = "P")]
    p: Vec<Vec<f64>>,
    #[serde(rename = "R")]
    r: Vec<f64>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    q: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
}

fn from_raw<S: Scalar>(raw: RawInstance) -> Result<LoadedInstance<S>> {
    if raw.p.len() != raw.n || raw.r.len() != raw.n {
        return Err(Error::dims(format!(
            "file declares n = {} but P has {} rows and R has {} entries",
            raw.n,
            raw.p.len(),
            raw.r.len()
        )));
    }
    let p = Mat::from_rows(
        raw.p
            .into_iter()
            .map(|row| row.into_iter().map(S::from_f64).collect())
            .collect(),
    )?;
    let r = raw.r.into_iter().map(S::from_f64).collect();
    let base = BanditInstance::new(p, r, S::from_f64(raw.beta))?;
    match raw.q {
        None => Ok(LoadedInstance::Bandit(base)),
        Some(q) => {
            let q = q.into_iter().map(S::from_f64).collect();
            let nu = S::from_f64(raw.nu.unwrap_or(0.0));
            Ok(LoadedInstance::Stopping(StoppingInstance::new(
                base, q, nu,
            )?))
        }
    }
}

fn to_raw<S: Scalar>(
    base: &BanditInstance<S>,
    stopping: Option<(&[S], S)>,
) -> RawInstance {
    let widen = |v: &[S]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    RawInstance {
        n: base.n_states(),
        beta: base.discount().as_f64(),
        p: (0..base.n_states())
            .map(|i| widen(base.transitions().row(i)))
            .collect(),
        r: widen(base.rewards()),
        q: stopping.map(|(q, _)| widen(q)),
        nu: stopping.map(|(_, nu)| nu.as_f64()),
    }
}

/// Parses an instance from JSON text.
pub fn parse_instance<S: Scalar>(text: &str) -> Result<LoadedInstance<S>> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    from_raw(raw)
}

/// Loads an instance file, dispatching on the presence of `Q`.
pub fn load_instance<S: Scalar>(path: impl AsRef<Path>) -> Result<LoadedInstance<S>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_instance(&text).map_err(|e| match e {
        Error::ParseError(msg) => {
            Error::ParseError(format!("{}: {msg}", path.display()))
        }
        other => other,
    })
}

fn write_json(path: &Path, raw: &RawInstance) -> Result<()> {
    let mut text = serde_json::to_string_pretty(raw)
        .map_err(|e| Error::ParseError(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Saves a bandit instance as JSON.
pub fn save_instance<S: Scalar>(
    instance: &BanditInstance<S>,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_json(path.as_ref(), &to_raw(instance, None))
}

/// Saves a stopping instance as JSON (includes `Q` and `nu`).
pub fn save_stopping_instance<S: Scalar>(
    instance: &StoppingInstance<S>,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_json(
        path.as_ref(),
        &to_raw(
            instance.base(),
            Some((instance.terminal_rewards(), instance.charge())),
        ),
    )
}
