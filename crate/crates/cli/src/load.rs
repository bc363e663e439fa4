//! Input documents. Loaders look through the wrapper keys that the CLI itself
//! emits, so any output document can be fed back in.

use std::path::Path;

use serde_json::Value;
use unimod::lattice::{Frame, LatticeForm};
use unimod::qseries::QSeries;
use unimod::z8code::{self, Z8Code};

use crate::CliError;

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::missing(format!("{}: no such file", path.display())),
        _ => CliError::malformed(format!("{}: {e}", path.display())),
    })
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

/// First object among `v` and `v[key]` for the given keys that has `field`.
fn locate<'a>(v: &'a Value, field: &str, keys: &[&str]) -> &'a Value {
    if v.get(field).is_some() {
        return v;
    }
    keys.iter()
        .filter_map(|k| v.get(*k))
        .find(|inner| inner.get(field).is_some())
        .unwrap_or(v)
}

pub fn lattice(path: &Path) -> Result<LatticeForm, CliError> {
    let v = read_json(path)?;
    let doc = if v.get("gram").is_some() || v.get("basis").is_some() {
        &v
    } else {
        let g = locate(&v, "gram", &["lattice", "gamma"]);
        if g.get("gram").is_some() {
            g
        } else {
            locate(&v, "basis", &["lattice", "gamma"])
        }
    };
    Ok(LatticeForm::from_json(doc)?)
}

pub fn series(path: &Path) -> Result<QSeries, CliError> {
    let v = read_json(path)?;
    Ok(QSeries::from_json(locate(&v, "terms", &["theta_S", "shadow_theta", "series"]))?)
}

pub fn frame(path: &Path) -> Result<Frame, CliError> {
    let v = read_json(path)?;
    Ok(Frame::from_json(locate(&v, "vectors", &["frame"]))?)
}

/// JSON `{length, generators}` (possibly under `code`), else digit rows.
pub fn code(path: &Path) -> Result<Z8Code, CliError> {
    let text = read_text(path)?;
    match serde_json::from_str::<Value>(&text) {
        Ok(v) if v.is_object() => Ok(Z8Code::from_json(locate(&v, "generators", &["code"]))?),
        _ => Ok(z8code::parse_generator_matrix(&text)?),
    }
}
