//! Versioned JSON form of [`MolecularTensors`].
//!
//! `{version, n_spatial, n_electrons?, constant, h, g}` with `h` and `g` as
//! flattened row-major spin-orbital arrays. Floats round-trip bit-exactly.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{validate, MolecularTensors, Tensor4};
use crate::error::{Error, Result};

pub const JSON_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Out<'a> {
    version: u32,
    n_spatial: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_electrons: Option<usize>,
    constant: f64,
    h: Vec<f64>,
    g: &'a [f64],
}

// Option<f64> entries: serde_json writes non-finite floats as null.
#[derive(Deserialize)]
struct In {
    version: Option<u32>,
    n_spatial: Option<usize>,
    #[serde(default)]
    n_electrons: Option<usize>,
    constant: Option<Option<f64>>,
    h: Option<Vec<Option<f64>>>,
    g: Option<Vec<Option<f64>>>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema {
        expected: JSON_SCHEMA_VERSION,
        msg: msg.into(),
    }
}

pub fn to_json_string(t: &MolecularTensors) -> Result<String> {
    let v = validate(t);
    if !v.is_empty() {
        return Err(Error::Validation(v.iter().map(|x| x.to_string()).collect()));
    }
    let n = t.n_spin();
    let mut h = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            h.push(t.h[(p, q)]);
        }
    }
    let out = Out {
        version: JSON_SCHEMA_VERSION,
        n_spatial: t.n_spatial,
        n_electrons: t.n_electrons,
        constant: t.constant,
        h,
        g: t.g.as_slice(),
    };
    Ok(serde_json::to_string(&out)?)
}

pub fn from_json_str(text: &str) -> Result<MolecularTensors> {
    let raw: In = serde_json::from_str(text)?;
    let version = raw.version.ok_or_else(|| schema("missing \"version\""))?;
    if version != JSON_SCHEMA_VERSION {
        return Err(schema(format!("unsupported version {version}")));
    }
    let n_spatial = raw
        .n_spatial
        .ok_or_else(|| schema("missing \"n_spatial\""))?;
    let constant = raw.constant.ok_or_else(|| schema("missing \"constant\""))?;
    let h = raw.h.ok_or_else(|| schema("missing \"h\""))?;
    let g = raw.g.ok_or_else(|| schema("missing \"g\""))?;
    let n = 2 * n_spatial;
    if h.len() != n * n {
        return Err(schema(format!(
            "\"h\" has {} entries, expected {}",
            h.len(),
            n * n
        )));
    }
    if g.len() != n.pow(4) {
        return Err(schema(format!(
            "\"g\" has {} entries, expected {}",
            g.len(),
            n.pow(4)
        )));
    }
    let nan = |x: Option<f64>| x.unwrap_or(f64::NAN);
    let h = DMatrix::from_row_iterator(n, n, h.into_iter().map(nan));
    let g = Tensor4::from_vec(n, g.into_iter().map(nan).collect())?;
    MolecularTensors::new(n_spatial, nan(constant), h, g, raw.n_electrons)
}

pub fn save_json(t: &MolecularTensors, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json_string(t)?)?;
    Ok(())
}

pub fn load_json(path: impl AsRef<Path>) -> Result<MolecularTensors> {
    from_json_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MolecularTensors {
        let mut t = MolecularTensors::zeros(1);
        t.constant = 0.1 + 0.2;
        t.h[(0, 0)] = -1.0 / 3.0;
        t.h[(1, 1)] = -1.0 / 3.0;
        for s in 0..2 {
            for u in 0..2 {
                t.g.set(s, s, u, u, std::f64::consts::PI / 7.0);
            }
        }
        t
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let t = sample();
        let back = from_json_str(&to_json_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.constant.to_bits(), t.constant.to_bits());
    }

    #[test]
    fn missing_g_is_schema_error() {
        let text = r#"{"version":1,"n_spatial":1,"constant":0.0,"h":[0,0,0,0]}"#;
        assert!(matches!(from_json_str(text), Err(Error::Schema { .. })));
    }

    #[test]
    fn wrong_version_is_schema_error() {
        let mut v: serde_json::Value =
            serde_json::from_str(&to_json_string(&sample()).unwrap()).unwrap();
        v["version"] = 7.into();
        assert!(matches!(
            from_json_str(&v.to_string()),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn null_entry_is_validation_error() {
        let mut v: serde_json::Value =
            serde_json::from_str(&to_json_string(&sample()).unwrap()).unwrap();
        v["g"][3] = serde_json::Value::Null;
        assert!(matches!(
            from_json_str(&v.to_string()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn saving_nan_is_validation_error() {
        let mut t = sample();
        t.h[(0, 1)] = f64::NAN;
        assert!(matches!(to_json_string(&t), Err(Error::Validation(_))));
    }
}
