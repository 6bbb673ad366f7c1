//! Construction of circulant couplings from command-line flags.

use clap::Args;
use num_complex::Complex64;
use serde_json::Value;

use qgraph::circulant::CirculantUnitary;

use crate::CliError;

#[derive(Debug, Args)]
pub struct CouplingArgs {
    /// Coupling family: shift | delta | perm-invariant | custom
    #[arg(long, default_value = "shift")]
    pub coupling: String,

    /// Vertex degree (shift, delta, perm-invariant)
    #[arg(long)]
    pub n: Option<usize>,

    /// Phase of the shift coupling e^{i mu} R
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,

    /// Negate the shift coupling (-e^{i mu} R)
    #[arg(long, default_value_t = false)]
    pub negate: bool,

    /// Delta-coupling strength: U = -I + 2/(n + i alpha) J
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,

    /// Diagonal parameter "re,im" of a permutation-invariant coupling u I + v J
    #[arg(long)]
    pub u: Option<String>,

    /// Off-diagonal parameter "re,im" of a permutation-invariant coupling
    #[arg(long)]
    pub v: Option<String>,

    /// First row of a custom circulant as JSON: [[re, im], ...] or
    /// {"n": int, "first_row": [[re, im], ...]}
    #[arg(long)]
    pub first_row: Option<String>,
}

fn parse_pair(text: &str, what: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Validation(format!(
            "{what} must be \"re,im\", got {text:?}"
        )));
    }
    let re = parts[0]
        .trim()
        .parse::<f64>()
        .map_err(|e| CliError::Validation(format!("{what}: {e}")))?;
    let im = parts[1]
        .trim()
        .parse::<f64>()
        .map_err(|e| CliError::Validation(format!("{what}: {e}")))?;
    Ok(Complex64::new(re, im))
}

fn row_from_json(value: &Value) -> Result<Vec<Complex64>, CliError> {
    let array = match value {
        Value::Array(a) => a,
        Value::Object(obj) => {
            let row = obj
                .get("first_row")
                .ok_or_else(|| CliError::Validation("missing \"first_row\" field".into()))?;
            let Value::Array(a) = row else {
                return Err(CliError::Validation(
                    "\"first_row\" must be an array".into(),
                ));
            };
            if let Some(n) = obj.get("n").and_then(Value::as_u64) {
                if n as usize != a.len() {
                    return Err(CliError::Validation(format!(
                        "declared n = {n} but first_row has {} entries",
                        a.len()
                    )));
                }
            }
            a
        }
        _ => {
            return Err(CliError::Validation(
                "first-row JSON must be an array or an object".into(),
            ))
        }
    };
    array
        .iter()
        .map(|entry| {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| CliError::Validation("each entry must be [re, im]".into()))?;
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| CliError::Validation("non-numeric entry".into()))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| CliError::Validation("non-numeric entry".into()))?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

impl CouplingArgs {
    pub fn build(&self) -> Result<CirculantUnitary, CliError> {
        let need_n = || {
            self.n.ok_or_else(|| {
                CliError::Validation(format!("--n is required for --coupling {}", self.coupling))
            })
        };
        match self.coupling.as_str() {
            "shift" => {
                let n = need_n()?;
                CirculantUnitary::phased_shift(n, self.mu, self.negate)
                    .map_err(CliError::from_library)
            }
            "delta" => {
                let n = need_n()?;
                let v = Complex64::new(2.0, 0.0) / Complex64::new(n as f64, self.alpha);
                CirculantUnitary::permutation_invariant(n, Complex64::new(-1.0, 0.0), v)
                    .map_err(CliError::from_library)
            }
            "perm-invariant" => {
                let n = need_n()?;
                let u = parse_pair(
                    self.u.as_deref().ok_or_else(|| {
                        CliError::Validation("--u is required for perm-invariant".into())
                    })?,
                    "--u",
                )?;
                let v = parse_pair(
                    self.v.as_deref().ok_or_else(|| {
                        CliError::Validation("--v is required for perm-invariant".into())
                    })?,
                    "--v",
                )?;
                CirculantUnitary::permutation_invariant(n, u, v).map_err(CliError::from_library)
            }
            "custom" => {
                let text = self.first_row.as_deref().ok_or_else(|| {
                    CliError::Validation("--first-row is required for custom".into())
                })?;
                let value: Value = serde_json::from_str(text)
                    .map_err(|e| CliError::Validation(format!("first-row JSON: {e}")))?;
                let row = row_from_json(&value)?;
                CirculantUnitary::from_first_row(row).map_err(CliError::from_library)
            }
            other => Err(CliError::Validation(format!(
                "unknown coupling {other:?}; expected shift | delta | perm-invariant | custom"
            ))),
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "coupling": self.coupling,
            "n": self.n,
            "mu": self.mu,
            "negate": self.negate,
            "alpha": self.alpha,
        })
    }
}
