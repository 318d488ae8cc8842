//! Instance files.
//!
//! ```json
//! {"T": 2, "m": 1, "beta": 1.0, "convention": "up_only",
//!  "functions": [{"kind": "table", "values": [1.0, 0.0]},
//!                {"kind": "affine_abs", "eps": 0.5, "center": 1.0}]}
//! ```
//!
//! A third kind, `{"kind": "restricted", "eps": e, "slope_k": k, "lambda": l}`,
//! is `x·e|1 − k·l/x|` with the constraint `x ≥ l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AllowedStates, Convention, CostFunction, ProblemInstance, UnitLoad};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(rename = "T")]
    t: usize,
    m: u64,
    beta: f64,
    #[serde(default)]
    convention: Convention,
    functions: Vec<FunctionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FunctionSpec {
    Table { values: Vec<f64> },
    AffineAbs { eps: f64, center: f64 },
    Restricted { eps: f64, slope_k: f64, lambda: f64 },
}

/// Parses and shape-checks an instance. Convexity and sign are left to
/// [`crate::model::validate`].
pub fn parse_instance(text: &str) -> Result<ProblemInstance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if file.functions.len() != file.t {
        return Err(Error::Schema(format!(
            "T = {} but functions has {} entries",
            file.t,
            file.functions.len()
        )));
    }
    let expected = file.m as usize + 1;
    let functions = file
        .functions
        .into_iter()
        .enumerate()
        .map(|(i, spec)| match spec {
            FunctionSpec::Table { values } => {
                if values.len() != expected {
                    return Err(Error::Schema(format!(
                        "functions[{i}].values has {} entries, expected m + 1 = {expected}",
                        values.len()
                    )));
                }
                if let Some(j) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::Schema(format!("functions[{i}].values[{j}] is not finite")));
                }
                Ok(CostFunction::table(values))
            }
            FunctionSpec::AffineAbs { eps, center } => Ok(CostFunction::affine_abs(eps, center)),
            FunctionSpec::Restricted { eps, slope_k, lambda } => {
                Ok(CostFunction::restricted(UnitLoad { eps, slope_k }, lambda))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProblemInstance::new(file.m, file.beta, functions).with_convention(file.convention))
}

fn spec_of(f: &CostFunction, t: usize) -> Result<FunctionSpec> {
    Ok(match f {
        CostFunction::Table(v) => FunctionSpec::Table { values: v.to_vec() },
        CostFunction::AffineAbs { eps, center } => {
            FunctionSpec::AffineAbs { eps: *eps, center: *center }
        }
        CostFunction::RestrictedLoad { unit, load } => {
            FunctionSpec::Restricted { eps: unit.eps, slope_k: unit.slope_k, lambda: *load }
        }
        _ => {
            return Err(Error::Schema(format!(
                "functions[{t}] is a derived function with no file representation"
            )))
        }
    })
}

/// Serializes an instance; derived functions and restricted state sets are
/// rejected.
pub fn to_json(instance: &ProblemInstance) -> Result<String> {
    if instance.allowed != AllowedStates::All {
        return Err(Error::Schema("restricted state sets have no file representation".into()));
    }
    let file = InstanceFile {
        t: instance.horizon(),
        m: instance.m,
        beta: instance.beta,
        convention: instance.convention,
        functions: instance
            .functions
            .iter()
            .enumerate()
            .map(|(t, f)| spec_of(f, t))
            .collect::<Result<_>>()?,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Schema(e.to_string()))
}
