//! JSON function documents.
//!
//! A two-variable document:
//!
//! ```json
//! {"schema_version": "1", "x_weights": ["1/2", "1/2"], "y_weights": ["1/2", "1/2"],
//!  "values": [["0", "1"], ["1", "0"]]}
//! ```
//!
//! An `n`-variable document replaces the weights with `weights_per_axis`,
//! gives the `shape` and stores `values` flat, last axis fastest.

use matdist_core::ratio::{one, zero};
use matdist_core::{format_rational, parse_rational, FiniteFunction, FiniteMeasureSpace, Rational, TensorFunction};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1";

/// Value labels are strings; bare JSON numbers are accepted and kept verbatim.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Number(serde_json::Number),
}

impl Label {
    fn into_string(self) -> String {
        match self {
            Label::Text(s) => s,
            Label::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema_version: String,
    #[serde(default)]
    numeric: bool,
    x_atoms: Option<Vec<String>>,
    y_atoms: Option<Vec<String>>,
    x_weights: Option<Vec<String>>,
    y_weights: Option<Vec<String>>,
    atoms_per_axis: Option<Vec<Vec<String>>>,
    weights_per_axis: Option<Vec<Vec<String>>>,
    shape: Option<Vec<usize>>,
    values: serde_json::Value,
}

/// Serialized form written by the tool. Atom ids are omitted when they are
/// the default `"0"`, `"1"`, ….
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionDocument {
    pub schema_version: String,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub numeric: bool,
    #[serde(flatten)]
    pub body: DocumentBody,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum DocumentBody {
    Matrix {
        #[serde(skip_serializing_if = "Option::is_none")]
        x_atoms: Option<Vec<String>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        y_atoms: Option<Vec<String>>,
        x_weights: Vec<String>,
        y_weights: Vec<String>,
        values: Vec<Vec<String>>,
    },
    Tensor {
        #[serde(skip_serializing_if = "Option::is_none")]
        atoms_per_axis: Option<Vec<Vec<String>>>,
        weights_per_axis: Vec<Vec<String>>,
        shape: Vec<usize>,
        values: Vec<String>,
    },
}

/// A parsed document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Function {
    Matrix(FiniteFunction<String>),
    Tensor(TensorFunction<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loaded {
    pub function: Function,
    pub numeric: bool,
}

impl Loaded {
    /// The two-variable view; arity-2 tensor documents qualify.
    pub fn matrix(&self) -> Result<FiniteFunction<String>, CliError> {
        match &self.function {
            Function::Matrix(f) => Ok(f.clone()),
            Function::Tensor(t) if t.arity() == 2 => {
                FiniteFunction::from_row_major(t.spaces()[0].clone(), t.spaces()[1].clone(), t.values().to_vec())
                    .map_err(CliError::from)
            }
            Function::Tensor(t) => Err(CliError::unsupported(format!(
                "this command needs a two-variable function, the document has {} variables",
                t.arity()
            ))),
        }
    }

    pub fn tensor(&self) -> TensorFunction<String> {
        match &self.function {
            Function::Matrix(f) => TensorFunction::from(f),
            Function::Tensor(t) => t.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        match &self.function {
            Function::Matrix(_) => 2,
            Function::Tensor(t) => t.arity(),
        }
    }
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::parse_field(field, message)
}

fn parse_weights(field: &str, weights: &[String]) -> Result<Vec<Rational>, CliError> {
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| parse_rational(w).map_err(|e| field_error(format!("{field}[{i}]"), e.to_string())))
        .collect()
}

fn space(field: &str, atoms: Option<&Vec<String>>, weights: &[String]) -> Result<FiniteMeasureSpace, CliError> {
    let weights = parse_weights(field, weights)?;
    let ids = match atoms {
        Some(ids) => {
            if ids.len() != weights.len() {
                return Err(field_error(
                    field,
                    format!("{} weights for {} atom ids", weights.len(), ids.len()),
                ));
            }
            ids.clone()
        }
        None => (0..weights.len()).map(|i| i.to_string()).collect(),
    };
    FiniteMeasureSpace::new(ids, weights).map_err(|e| field_error(field, e.to_string()))
}

fn labels(field: &str, value: serde_json::Value) -> Result<Vec<String>, CliError> {
    let items: Vec<Label> =
        serde_json::from_value(value).map_err(|_| field_error(field, "expected an array of string labels"))?;
    Ok(items.into_iter().map(Label::into_string).collect())
}

fn check_numeric(values: &[String]) -> Result<(), CliError> {
    for (i, v) in values.iter().enumerate() {
        let q = parse_rational(v).map_err(|e| field_error(format!("values[{i}]"), e.to_string()))?;
        if q < zero() || q > one() {
            return Err(field_error(
                format!("values[{i}]"),
                format!("numeric value {v} outside [0, 1]"),
            ));
        }
    }
    Ok(())
}

/// Parses and validates a document.
pub fn parse(text: &str) -> Result<Loaded, CliError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(CliError::from_json)?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(field_error(
            "schema_version",
            format!(
                "unsupported version `{}`, expected `{SCHEMA_VERSION}`",
                raw.schema_version
            ),
        ));
    }
    let numeric = raw.numeric;
    let function = match (raw.weights_per_axis, raw.x_weights, raw.y_weights) {
        (Some(axes), None, None) => {
            if raw.x_atoms.is_some() || raw.y_atoms.is_some() {
                return Err(field_error("x_atoms", "use atoms_per_axis with weights_per_axis"));
            }
            let shape = raw
                .shape
                .ok_or_else(|| field_error("shape", "required with weights_per_axis"))?;
            if let Some(atoms) = &raw.atoms_per_axis {
                if atoms.len() != axes.len() {
                    return Err(field_error("atoms_per_axis", "one list per axis expected"));
                }
            }
            let spaces = axes
                .iter()
                .enumerate()
                .map(|(a, w)| {
                    let atoms = raw.atoms_per_axis.as_ref().map(|ids| &ids[a]);
                    space(&format!("weights_per_axis[{a}]"), atoms, w)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let actual: Vec<usize> = spaces.iter().map(FiniteMeasureSpace::len).collect();
            if actual != shape {
                return Err(field_error(
                    "shape",
                    format!("{shape:?} does not match the axis sizes {actual:?}"),
                ));
            }
            let values = labels("values", raw.values)?;
            if numeric {
                check_numeric(&values)?;
            }
            Function::Tensor(TensorFunction::new(spaces, values).map_err(|e| field_error("values", e.to_string()))?)
        }
        (None, Some(xw), Some(yw)) => {
            if raw.shape.is_some() || raw.atoms_per_axis.is_some() {
                return Err(field_error("shape", "only valid with weights_per_axis"));
            }
            let x = space("x_weights", raw.x_atoms.as_ref(), &xw)?;
            let y = space("y_weights", raw.y_atoms.as_ref(), &yw)?;
            let rows: Vec<serde_json::Value> =
                serde_json::from_value(raw.values).map_err(|_| field_error("values", "expected a matrix of labels"))?;
            let rows = rows
                .into_iter()
                .enumerate()
                .map(|(i, row)| labels(&format!("values[{i}]"), row))
                .collect::<Result<Vec<_>, _>>()?;
            if numeric {
                check_numeric(&rows.concat())?;
            }
            Function::Matrix(FiniteFunction::new(x, y, rows).map_err(|e| field_error("values", e.to_string()))?)
        }
        _ => {
            return Err(field_error(
                "x_weights",
                "give either x_weights and y_weights, or weights_per_axis",
            ))
        }
    };
    Ok(Loaded { function, numeric })
}

fn weights_of(space: &FiniteMeasureSpace) -> Vec<String> {
    space.weights().iter().map(format_rational).collect()
}

fn ids_of(space: &FiniteMeasureSpace) -> Option<Vec<String>> {
    let default = space.atom_ids().iter().enumerate().all(|(i, id)| *id == i.to_string());
    (!default).then(|| space.atom_ids().to_vec())
}

impl FunctionDocument {
    pub fn from_matrix(f: &FiniteFunction<String>, numeric: bool) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            numeric,
            body: DocumentBody::Matrix {
                x_atoms: ids_of(f.x_space()),
                y_atoms: ids_of(f.y_space()),
                x_weights: weights_of(f.x_space()),
                y_weights: weights_of(f.y_space()),
                values: f.to_rows(),
            },
        }
    }

    pub fn from_tensor(t: &TensorFunction<String>, numeric: bool) -> Self {
        let ids: Vec<Option<Vec<String>>> = t.spaces().iter().map(ids_of).collect();
        let atoms_per_axis = ids
            .iter()
            .any(Option::is_some)
            .then(|| t.spaces().iter().map(|s| s.atom_ids().to_vec()).collect());
        Self {
            schema_version: SCHEMA_VERSION.into(),
            numeric,
            body: DocumentBody::Tensor {
                atoms_per_axis,
                weights_per_axis: t.spaces().iter().map(weights_of).collect(),
                shape: t.shape().to_vec(),
                values: t.values().to_vec(),
            },
        }
    }

    pub fn from_loaded(doc: &Loaded) -> Self {
        match &doc.function {
            Function::Matrix(f) => Self::from_matrix(f, doc.numeric),
            Function::Tensor(t) => Self::from_tensor(t, doc.numeric),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR: &str = r#"{"schema_version": "1", "x_weights": ["1/2", "1/2"], "y_weights": ["1/2", "1/2"],
        "values": [["0", "1"], ["1", "0"]]}"#;

    #[test]
    fn round_trip_is_identity() {
        let doc = parse(XOR).unwrap();
        let text = serde_json::to_string(&FunctionDocument::from_loaded(&doc)).unwrap();
        assert_eq!(parse(&text).unwrap(), doc);
    }

    #[test]
    fn numbers_are_labels() {
        let doc = parse(r#"{"schema_version": "1", "x_weights": ["1"], "y_weights": ["1"], "values": [[3]]}"#).unwrap();
        assert_eq!(doc.matrix().unwrap().value(0, 0), "3");
    }

    #[test]
    fn tensor_documents_parse() {
        let text = r#"{"schema_version": "1", "weights_per_axis": [["1/2", "1/2"], ["1"], ["1/3", "2/3"]],
            "shape": [2, 1, 2], "values": ["a", "b", "c", "d"]}"#;
        let doc = parse(text).unwrap();
        assert_eq!(doc.arity(), 3);
        assert!(doc.matrix().is_err());
        let again = serde_json::to_string(&FunctionDocument::from_loaded(&doc)).unwrap();
        assert_eq!(parse(&again).unwrap(), doc);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = XOR.replace("\"1/2\", \"1/2\"], \"y", "\"2/4\", \"1/2\"], \"y");
        let err = parse(&bad).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("x_weights[0]"));
        let err = parse(&XOR.replace("[\"1\", \"0\"]", "[\"1\"]")).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("values"));
        let err = parse("{\"schema_version\": \"1\",\n  \"x_weights\": [}").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn numeric_values_are_checked() {
        let text = XOR.replace(
            "\"schema_version\": \"1\",",
            "\"schema_version\": \"1\", \"numeric\": true,",
        );
        assert!(parse(&text).unwrap().numeric);
        assert!(parse(&text.replace("\"0\"]]", "\"3/2\"]]")).is_err());
    }
}
