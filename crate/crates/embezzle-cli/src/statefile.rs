//! On-disk descriptions of bipartite pure states.
//!
//! Two JSON shapes are accepted:
//!
//! ```json
//! {"kind": "schmidt", "coeffs": [0.8, 0.6]}
//! {"kind": "amplitudes", "rows": 2, "cols": 2,
//!  "entries": [[0.7071, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071, 0.0]]}
//! ```
//!
//! `coeffs` are Schmidt coefficients (square roots of the reduced
//! spectrum); `entries` list the complex amplitudes of |row>|col> row by
//! row as `[re, im]` pairs.

use std::path::Path;

use embezzle_core::{schmidt_decompose, AmplitudeMatrix, Complex64, TargetState};
use serde::Deserialize;

use crate::CliError;

/// Squared-mass deviations at or below this pass silently: they are
/// indistinguishable from honest serialization noise.
const SILENT_BAND: f64 = 1e-6;
/// Deviations up to this are accepted with a renormalization warning on
/// stderr; anything larger is rejected as a malformed state.
const REJECT_BAND: f64 = 1e-4;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum StateFile {
    Schmidt {
        coeffs: Vec<f64>,
    },
    Amplitudes {
        rows: usize,
        cols: usize,
        entries: Vec<(f64, f64)>,
    },
}

/// Reads, validates, renormalizes, and (for amplitude files) decomposes a
/// state file into its canonical Schmidt form.
pub fn load_target(path: &Path) -> Result<TargetState, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: not a valid state file: {e}", path.display())))?;

    match file {
        StateFile::Schmidt { coeffs } => {
            if coeffs.is_empty() {
                return Err(CliError::Input(format!(
                    "{}: empty coefficient list",
                    path.display()
                )));
            }
            for (i, &c) in coeffs.iter().enumerate() {
                if !c.is_finite() || c < 0.0 {
                    return Err(CliError::Input(format!(
                        "{}: coefficient {i} is {c}; Schmidt coefficients are finite and non-negative",
                        path.display()
                    )));
                }
            }
            let mass: f64 = coeffs.iter().map(|c| c * c).sum();
            let scale = renormalization_scale(path, mass, "coefficient")?;
            TargetState::from_coeffs(coeffs.iter().map(|c| c * scale).collect())
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        StateFile::Amplitudes {
            rows,
            cols,
            entries,
        } => {
            let expected = rows
                .checked_mul(cols)
                .filter(|_| rows > 0 && cols > 0)
                .ok_or_else(|| {
                    CliError::Input(format!(
                        "{}: rows and cols must be positive (got {rows} x {cols})",
                        path.display()
                    ))
                })?;
            if entries.len() != expected {
                return Err(CliError::Input(format!(
                    "{}: a {rows} x {cols} state needs {expected} entries, found {}",
                    path.display(),
                    entries.len()
                )));
            }
            let mut amplitudes = Vec::with_capacity(entries.len());
            for (i, &(re, im)) in entries.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(CliError::Input(format!(
                        "{}: entry {i} is not finite",
                        path.display()
                    )));
                }
                amplitudes.push(Complex64::new(re, im));
            }
            let mass: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
            let scale = renormalization_scale(path, mass, "amplitude")?;
            let rescaled = amplitudes.iter().map(|z| z * scale).collect();
            let amp = AmplitudeMatrix::new(rows, cols, rescaled)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let sigma = schmidt_decompose(&amp)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(TargetState::new(sigma))
        }
    }
}

/// Checks the squared mass against the acceptance bands and returns the
/// rescale factor, warning on stderr in the middle band.
fn renormalization_scale(path: &Path, squared_mass: f64, what: &str) -> Result<f64, CliError> {
    if !squared_mass.is_finite() || squared_mass <= 0.0 {
        return Err(CliError::Input(format!(
            "{}: {what} squared mass is {squared_mass}, cannot normalize",
            path.display()
        )));
    }
    let deviation = (squared_mass - 1.0).abs();
    if deviation > REJECT_BAND {
        return Err(CliError::Input(format!(
            "{}: state is not normalized: {what} squared mass {squared_mass} is off by {deviation:.3e} (limit {REJECT_BAND:.0e})",
            path.display()
        )));
    }
    if deviation > SILENT_BAND {
        eprintln!(
            "warning: {}: renormalized {what}s; squared mass was off by {deviation:.3e}",
            path.display()
        );
    }
    Ok(squared_mass.sqrt().recip())
}
