//! One function per subcommand. Each returns the `result` payload and the
//! effective parameters that go into the report envelope.

use std::collections::{BTreeMap, BTreeSet};

use matdist_core::ratio::parse_decimal;
use matdist_core::reconstruction::{empirical_density, reconstruction_report, stable_depth};
use matdist_core::symmetry::congruence_group;
use matdist_core::{
    definetti_diagnostic, empirical_simplicity_diagnostic, exact_corner_distribution, exact_tensor_corner,
    first_difference, format_rational, parse_rational, sample_matrix, sample_tensor, CanonicalForm, FiniteFunction,
    MetricType, Rational, SimplicityDiagnostic, ValueMatrix,
};
use serde_json::{json, Value as Json};

use crate::document::{FunctionDocument, Loaded};
use crate::error::{CliError, ErrorKind};

pub type Parameters = BTreeMap<String, Json>;

/// Payload plus effective parameters.
pub struct Outcome {
    pub result: Json,
    pub parameters: Parameters,
    pub seed: Option<u64>,
}

fn rat(q: &Rational) -> Json {
    Json::String(format_rational(q))
}

fn metric_type(m: &MetricType) -> Json {
    Json::Array(m.weights().iter().map(rat).collect())
}

/// Cells laid out as nested arrays of depth `arity`, last axis innermost.
pub fn nest(cells: &[String], arity: usize, side: usize) -> Json {
    if arity == 0 {
        return Json::String(cells[0].clone());
    }
    let stride = cells.len() / side.max(1);
    Json::Array(
        (0..side)
            .map(|i| nest(&cells[i * stride..(i + 1) * stride], arity - 1, side))
            .collect(),
    )
}

fn matrix_json(m: &ValueMatrix<String>) -> Json {
    json!(m.to_rows())
}

/// Integer labels in the same order as the strings they replace, so ties
/// and class ranks come out exactly as for the string function.
struct Interned {
    f: FiniteFunction<u32>,
    labels: Vec<String>,
}

impl Interned {
    fn new(f: &FiniteFunction<String>) -> Self {
        let labels: Vec<String> = f
            .row_major()
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let f = f.map_values(|v| labels.binary_search(v).expect("label present") as u32);
        Self { f, labels }
    }

    fn label(&self, v: &u32) -> String {
        self.labels[*v as usize].clone()
    }
}

fn check_cells(n: usize, arity: usize, budget: u64) -> Result<(), CliError> {
    let cells = (n as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    if cells > budget as u128 {
        return Err(matdist_core::Error::BudgetExceeded {
            required: cells,
            budget,
        }
        .into());
    }
    Ok(())
}

pub fn parse_parameter(name: &str, text: &str) -> Result<Rational, CliError> {
    parse_decimal(text).map_err(|e| CliError::parse_field(format!("--{name}"), e.to_string()))
}

pub fn purify(doc: &Loaded) -> Result<Outcome, CliError> {
    let f = doc.matrix()?;
    let (pure, maps) = f.purify();
    Ok(Outcome {
        result: json!({
            "document": FunctionDocument::from_matrix(&pure, doc.numeric),
            "already_pure": f.is_pure(),
            "row_projection": maps.row_projection,
            "col_projection": maps.col_projection,
        }),
        parameters: Parameters::new(),
        seed: None,
    })
}

fn canonical_json(c: &CanonicalForm<String>) -> Json {
    let values: Vec<Vec<Json>> = c
        .values
        .iter()
        .map(|row| {
            row.iter()
                .map(|cell| {
                    json!({
                        "value": cell.base,
                        "row_type": metric_type(&cell.row_type),
                        "col_type": metric_type(&cell.col_type),
                    })
                })
                .collect()
        })
        .collect();
    json!({
        "x_weights": c.x_weights.iter().map(rat).collect::<Vec<_>>(),
        "y_weights": c.y_weights.iter().map(rat).collect::<Vec<_>>(),
        "values": values,
    })
}

pub fn canonical(doc: &Loaded) -> Result<Outcome, CliError> {
    let f = doc.matrix()?;
    Ok(Outcome {
        result: json!({ "canonical_form": canonical_json(&f.canonical_form()) }),
        parameters: Parameters::new(),
        seed: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Compare canonical forms and emit an isomorphism.
    Canonical,
    /// Compare exact corner distributions at size k.
    Corners,
}

pub fn iso(f: &Loaded, g: &Loaded, mode: Mode, k: Option<usize>, budget: u64) -> Result<Outcome, CliError> {
    let mut parameters = Parameters::new();
    let result = match mode {
        Mode::Canonical => {
            let (a, b) = (f.matrix()?, g.matrix()?);
            parameters.insert("mode".into(), json!("canonical"));
            let witness = a.isomorphism(&b).map(|w| {
                json!({
                    "row_map": w.row_map,
                    "col_map": w.col_map,
                    "atom_row_map": w.atom_row_map,
                    "atom_col_map": w.atom_col_map,
                })
            });
            json!({ "mode": "canonical", "isomorphic": witness.is_some(), "witness": witness })
        }
        Mode::Corners => {
            if f.arity() != g.arity() {
                return Err(CliError::unsupported(format!(
                    "cannot compare functions of {} and {} variables",
                    f.arity(),
                    g.arity()
                )));
            }
            let (tf, tg) = (f.tensor(), g.tensor());
            let k = k.unwrap_or_else(|| tf.shape().iter().chain(tg.shape()).copied().max().unwrap_or(1) + 1);
            parameters.insert("mode".into(), json!("corners"));
            parameters.insert("k".into(), json!(k));
            parameters.insert("budget".into(), json!(budget));
            let difference = if f.arity() == 2 {
                let da = exact_corner_distribution(&f.matrix()?, k, budget)?;
                let db = exact_corner_distribution(&g.matrix()?, k, budget)?;
                first_difference(&da, &db).map(|(m, p, q)| (matrix_json(&m), p, q))
            } else {
                let da = exact_tensor_corner(&tf, k, budget)?;
                let db = exact_tensor_corner(&tg, k, budget)?;
                let keys: BTreeSet<_> = da.entries().keys().chain(db.entries().keys()).collect();
                let first = keys
                    .into_iter()
                    .map(|t| (t, da.probability(t), db.probability(t)))
                    .find(|(_, p, q)| p != q)
                    .map(|(t, p, q)| (nest(t.cells(), t.arity(), t.side()), p, q));
                first
            };
            let witness = difference.map(|(corner, p, q)| json!({ "corner": corner, "p_f": rat(&p), "p_g": rat(&q) }));
            json!({ "mode": "corners", "k": k, "isomorphic": witness.is_none(), "first_difference": witness })
        }
    };
    Ok(Outcome {
        result,
        parameters,
        seed: None,
    })
}

pub fn matdist(doc: &Loaded, k: usize, budget: u64) -> Result<Outcome, CliError> {
    let mut entries = serde_json::Map::new();
    if doc.arity() == 2 {
        for (m, p) in exact_corner_distribution(&doc.matrix()?, k, budget)?.iter() {
            entries.insert(matrix_json(m).to_string(), rat(p));
        }
    } else {
        for (t, p) in exact_tensor_corner(&doc.tensor(), k, budget)?.entries() {
            entries.insert(nest(t.cells(), t.arity(), t.side()).to_string(), rat(p));
        }
    }
    Ok(Outcome {
        result: json!({ "arity": doc.arity(), "k": k, "support": entries.len(), "distribution": entries }),
        parameters: BTreeMap::from([("k".into(), json!(k)), ("budget".into(), json!(budget))]),
        seed: None,
    })
}

pub fn sample(doc: &Loaded, n: usize, seed: u64, budget: u64) -> Result<Outcome, CliError> {
    check_cells(n, doc.arity(), budget)?;
    let result = if doc.arity() == 2 {
        let f = doc.matrix()?;
        let interned = Interned::new(&f);
        let r = sample_matrix(&interned.f, n, seed)?;
        let ids = |space: &matdist_core::FiniteMeasureSpace, atoms: &[usize]| -> Vec<String> {
            atoms.iter().map(|&a| space.atom_ids()[a].clone()).collect()
        };
        let rows: Vec<Vec<String>> = (0..n)
            .map(|i| r.row(i).iter().map(|v| interned.label(v)).collect())
            .collect();
        json!({
            "arity": 2,
            "n": n,
            "row_atoms": ids(f.x_space(), r.row_atoms()),
            "col_atoms": ids(f.y_space(), r.col_atoms()),
            "values": rows,
        })
    } else {
        let t = sample_tensor(&doc.tensor(), n, seed, budget)?;
        json!({ "arity": t.arity(), "n": n, "values": nest(t.values(), t.arity(), t.side()) })
    };
    Ok(Outcome {
        result,
        parameters: BTreeMap::from([("N".into(), json!(n)), ("budget".into(), json!(budget))]),
        seed: Some(seed),
    })
}

pub struct ReconstructArgs {
    pub n: usize,
    pub depth: Option<usize>,
    pub seed: u64,
    pub tol: Rational,
    pub min_class_mass: Rational,
    pub budget: u64,
}

pub fn reconstruct(doc: &Loaded, args: &ReconstructArgs) -> Result<Outcome, CliError> {
    check_cells(args.n, 2, args.budget)?;
    let f = doc.matrix()?;
    let interned = Interned::new(&f);
    let r = sample_matrix(&interned.f, args.n, args.seed)?;
    let depth = args.depth.unwrap_or_else(|| stable_depth(&r));
    let report = reconstruction_report(&interned.f, &r, depth, &args.tol, &args.min_class_mass)?;
    let reconstructed = report.reconstructed.map_values(|v| interned.label(v));

    let density = if doc.numeric {
        let means = empirical_density(&r, depth, |v| parse_rational(&interned.labels[*v as usize]).ok())?;
        let rows: Vec<&Vec<u32>> = means
            .keys()
            .map(|(a, _)| a)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let cols: Vec<&Vec<u32>> = means
            .keys()
            .map(|(_, b)| b)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let grid: Vec<Vec<Json>> = rows
            .iter()
            .map(|a| {
                cols.iter()
                    .map(|b| rat(&means[&((*a).clone(), (*b).clone())]))
                    .collect()
            })
            .collect();
        Some(json!(grid))
    } else {
        None
    };
    let exchangeability = (args.n % 2 == 0).then(|| definetti_diagnostic(&r, depth)).transpose()?;

    let mut parameters = Parameters::new();
    parameters.insert("N".into(), json!(args.n));
    parameters.insert("depth".into(), args.depth.map_or_else(|| json!("auto"), |d| json!(d)));
    parameters.insert("tol".into(), rat(&args.tol));
    parameters.insert("min_class_mass".into(), rat(&args.min_class_mass));
    parameters.insert("budget".into(), json!(args.budget));
    Ok(Outcome {
        result: json!({
            "reconstructed": FunctionDocument::from_matrix(&reconstructed, doc.numeric),
            "values_match": report.values_match,
            "isomorphic_to_source": report.isomorphic_to_source,
            "weight_tv": rat(&report.weight_tv),
            "depth_used": report.depth_used,
            "row_map": report.row_map,
            "col_map": report.col_map,
            "density": density,
            "pair_independence_tv": exchangeability.as_ref().map(rat),
        }),
        parameters,
        seed: Some(args.seed),
    })
}

pub fn congruence(doc: &Loaded) -> Result<Outcome, CliError> {
    let f = doc.matrix()?;
    let (pure, _) = f.purify();
    let group = congruence_group(&f)?;
    let elements: Vec<Json> = group
        .elements()
        .iter()
        .map(|(s, t)| json!({ "rows": s, "cols": t }))
        .collect();
    Ok(Outcome {
        result: json!({
            "pure_shape": [pure.n_rows(), pure.n_cols()],
            "order": group.order(),
            "trivial": group.is_trivial(),
            "completely_pure": f.is_pure() && group.is_trivial(),
            "elements": elements,
        }),
        parameters: Parameters::new(),
        seed: None,
    })
}

fn diagnostic_json(d: &SimplicityDiagnostic<String>) -> Json {
    let violations: Vec<Vec<Json>> = d
        .violations
        .iter()
        .map(|orbits| orbits.iter().map(matrix_json).collect())
        .collect();
    json!({
        "k": d.k,
        "groups": d.groups,
        "certifies_non_simple": d.certifies_non_simple(),
        "violations": violations,
        "note": SimplicityDiagnostic::<String>::NOTE,
    })
}

pub fn simplicity(doc: &Loaded, k: usize, budget: u64) -> Result<Outcome, CliError> {
    let f = doc.matrix()?;
    let group = congruence_group(&f)?;
    let diagnostic = empirical_simplicity_diagnostic(&f, k, budget)?;
    if diagnostic.certifies_non_simple() && group.is_trivial() {
        return Err(CliError::new(
            ErrorKind::Invalid,
            "internal inconsistency: corner diagnostic contradicts the congruence group",
        ));
    }
    Ok(Outcome {
        result: json!({
            "simple": group.is_trivial(),
            "group_order": group.order(),
            "diagnostic": diagnostic_json(&diagnostic),
        }),
        parameters: BTreeMap::from([("k".into(), json!(k)), ("budget".into(), json!(budget))]),
        seed: None,
    })
}
