//! JSON tensor documents with expression-string entries.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "coordinates": ["x1", "x2"],
//!   "parameters": [],
//!   "domain": ["x1 - x2 > 0"],
//!   "tensors": {
//!     "g": { "variance": "dd", "symmetric": true,
//!            "entries": [["x1 - x2", "0"], ["0", "x2 - x1"]] },
//!     "L": { "variance": "ud", "entries": [["x1", "0"], ["0", "x2"]] }
//!   },
//!   "pencil": { "g0": [["1","0"],["0","1"]], "a": [["1","0"],["0","1"]],
//!               "b": ["1","0"], "K": "0" }
//! }
//! ```

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geodesic::PencilData;
use crate::ratfun::{parse_expression, Mat, RatFun, VarSet};
use crate::tensor::{TensorField, Variance};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTensor {
    variance: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    symmetric: bool,
    entries: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPencil {
    g0: Vec<Vec<String>>,
    a: Vec<Vec<String>>,
    b: Vec<String>,
    #[serde(rename = "K")]
    k: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    dim: usize,
    coordinates: Vec<String>,
    #[serde(default)]
    parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    domain: Vec<String>,
    tensors: BTreeMap<String, RawTensor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pencil: Option<RawPencil>,
}

/// A domain condition `lhs > rhs` stored as the positive expression `lhs − rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality(pub RatFun);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedTensor {
    pub field: TensorField,
    pub symmetric: bool,
}

/// A parsed and validated document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorDocument {
    pub vars: VarSet,
    pub domain: Vec<Inequality>,
    pub tensors: BTreeMap<String, NamedTensor>,
    pub pencil: Option<PencilData>,
}

fn doc_err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

fn parse_variance(s: &str) -> Result<Vec<Variance>> {
    s.chars()
        .map(|c| match c {
            'u' => Ok(Variance::Up),
            'd' => Ok(Variance::Down),
            other => Err(doc_err(format!("variance letter `{other}` (expected u or d)"))),
        })
        .collect()
}

fn variance_string(v: &[Variance]) -> String {
    v.iter()
        .map(|x| match x {
            Variance::Up => 'u',
            Variance::Down => 'd',
        })
        .collect()
}

fn expr(text: &str, vars: &VarSet, place: &str) -> Result<RatFun> {
    parse_expression(text, vars).map_err(|e| match e {
        Error::Parse { pos, msg } => doc_err(format!("{place}: column {}: {msg}", pos + 1)),
        other => doc_err(format!("{place}: {other}")),
    })
}

fn constant(text: &str, place: &str) -> Result<BigRational> {
    let empty = VarSet::new::<&str>(&[], &[])?;
    expr(text, &empty, place)?
        .constant_value()
        .ok_or_else(|| doc_err(format!("{place}: not a rational constant")))
}

/// Flattens a nested entry grid of depth `rank` with side `dim`.
fn flatten<'a>(v: &'a Value, rank: usize, dim: usize, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a str)>) -> Result<()> {
    if rank == 0 {
        let s = v
            .as_str()
            .ok_or_else(|| doc_err(format!("entry {path:?} is not a string")))?;
        out.push((path.clone(), s));
        return Ok(());
    }
    let items = v
        .as_array()
        .ok_or_else(|| doc_err(format!("entry grid at {path:?} is not an array")))?;
    if items.len() != dim {
        return Err(doc_err(format!(
            "entry grid at {path:?} has length {}, expected {dim}",
            items.len()
        )));
    }
    for (i, item) in items.iter().enumerate() {
        path.push(i);
        flatten(item, rank - 1, dim, path, out)?;
        path.pop();
    }
    Ok(())
}

fn nest(field: &TensorField, names: &[String]) -> Value {
    fn go(field: &TensorField, names: &[String], prefix: &mut Vec<usize>) -> Value {
        if prefix.len() == field.rank() {
            return Value::String(field.get(prefix).display_with(names));
        }
        Value::Array(
            (0..field.dim())
                .map(|i| {
                    prefix.push(i);
                    let v = go(field, names, prefix);
                    prefix.pop();
                    v
                })
                .collect(),
        )
    }
    go(field, names, &mut Vec::new())
}

fn parse_inequality(text: &str, vars: &VarSet, place: &str) -> Result<Inequality> {
    let (lhs, rhs, flip) = if let Some((l, r)) = text.split_once('>') {
        (l, r, false)
    } else if let Some((l, r)) = text.split_once('<') {
        (l, r, true)
    } else {
        (text, "0", false)
    };
    let (l, r) = (expr(lhs, vars, place)?, expr(rhs, vars, place)?);
    Ok(Inequality(if flip { r.sub_ref(&l) } else { l.sub_ref(&r) }))
}

impl TensorDocument {
    /// Parses JSON text; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawDocument = serde_json::from_str(text).map_err(|e| {
            doc_err(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        if raw.coordinates.len() != raw.dim {
            return Err(doc_err(format!(
                "dim is {} but {} coordinates are named",
                raw.dim,
                raw.coordinates.len()
            )));
        }
        let vars = VarSet::new(&raw.coordinates, &raw.parameters)?;
        let nv = vars.nvars();
        let domain = raw
            .domain
            .iter()
            .enumerate()
            .map(|(i, d)| parse_inequality(d, &vars, &format!("domain[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut tensors = BTreeMap::new();
        for (name, t) in &raw.tensors {
            let variance = parse_variance(&t.variance)
                .map_err(|e| doc_err(format!("tensor `{name}`: {e}")))?;
            let mut flat = Vec::new();
            flatten(&t.entries, variance.len(), raw.dim, &mut Vec::new(), &mut flat)
                .map_err(|e| doc_err(format!("tensor `{name}`: {e}")))?;
            let data = flat
                .iter()
                .map(|(idx, s)| expr(s, &vars, &format!("tensor `{name}` entry {idx:?}")))
                .collect::<Result<Vec<_>>>()?;
            let field = TensorField::from_data(raw.dim, nv, variance, data)?;
            if t.symmetric && (field.rank() != 2 || !field.is_symmetric_in(0, 1)) {
                return Err(doc_err(format!("tensor `{name}` is declared symmetric but is not")));
            }
            tensors.insert(
                name.clone(),
                NamedTensor {
                    field,
                    symmetric: t.symmetric,
                },
            );
        }
        let pencil = raw
            .pencil
            .as_ref()
            .map(|p| {
                let grid = |rows: &[Vec<String>], what: &str| {
                    if rows.len() != raw.dim || rows.iter().any(|r| r.len() != raw.dim) {
                        return Err(doc_err(format!("pencil `{what}` must be {0} × {0}", raw.dim)));
                    }
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| {
                            r.iter()
                                .enumerate()
                                .map(|(j, s)| constant(s, &format!("pencil `{what}` [{i}, {j}]")))
                                .collect()
                        })
                        .collect::<Result<Vec<Vec<_>>>>()
                };
                if p.b.len() != raw.dim {
                    return Err(doc_err(format!("pencil `b` must have {} entries", raw.dim)));
                }
                let b = p
                    .b
                    .iter()
                    .enumerate()
                    .map(|(i, s)| constant(s, &format!("pencil `b` [{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                PencilData::new(grid(&p.g0, "g0")?, grid(&p.a, "a")?, b, constant(&p.k, "pencil `K`")?)
            })
            .transpose()?;
        Ok(TensorDocument {
            vars,
            domain,
            tensors,
            pencil,
        })
    }

    pub fn dim(&self) -> usize {
        self.vars.ncoords()
    }

    /// Canonical JSON: sorted keys, entries printed in normal form.
    pub fn to_json(&self) -> String {
        let names = self.vars.names();
        let tensors = self
            .tensors
            .iter()
            .map(|(name, t)| {
                (
                    name.clone(),
                    RawTensor {
                        variance: variance_string(t.field.variance()),
                        symmetric: t.symmetric,
                        entries: nest(&t.field, &names),
                    },
                )
            })
            .collect();
        let show = |q: &BigRational| q.to_string();
        let rows = |m: &[Vec<BigRational>]| -> Vec<Vec<String>> {
            m.iter().map(|r| r.iter().map(show).collect()).collect()
        };
        let raw = RawDocument {
            dim: self.dim(),
            coordinates: self.vars.coords().to_vec(),
            parameters: self.vars.params().to_vec(),
            domain: self
                .domain
                .iter()
                .map(|d| format!("{} > 0", d.0.display_with(&names)))
                .collect(),
            tensors,
            pencil: self.pencil.as_ref().map(|p| RawPencil {
                g0: rows(p.g0()),
                a: rows(p.a()),
                b: p.b().iter().map(show).collect(),
                k: show(p.k()),
            }),
        };
        let value = serde_json::to_value(&raw).expect("document serializes");
        serde_json::to_string_pretty(&value).expect("document serializes")
    }

    /// A document holding `g`, `L` and the pencil data of a pair in the
    /// standard coordinates.
    pub fn from_pair(g: &Mat, l: &Mat, pencil: Option<PencilData>) -> Self {
        let n = g.rows();
        let mut tensors = BTreeMap::new();
        tensors.insert(
            "g".to_string(),
            NamedTensor {
                field: TensorField::from_mat(g, [Variance::Down, Variance::Down]),
                symmetric: true,
            },
        );
        tensors.insert(
            "L".to_string(),
            NamedTensor {
                field: TensorField::from_mat(l, [Variance::Up, Variance::Down]),
                symmetric: false,
            },
        );
        TensorDocument {
            vars: VarSet::standard(n),
            domain: Vec::new(),
            tensors,
            pencil,
        }
    }

    fn tensor(&self, name: &str, variance: &[Variance]) -> Result<Option<&TensorField>> {
        match self.tensors.get(name) {
            None => Ok(None),
            Some(t) if t.field.variance() == variance => Ok(Some(&t.field)),
            Some(t) => Err(doc_err(format!(
                "tensor `{name}` has variance `{}`, expected `{}`",
                variance_string(t.field.variance()),
                variance_string(variance)
            ))),
        }
    }

    /// Metric `g` (variance `dd`).
    pub fn metric(&self) -> Result<Option<Mat>> {
        Ok(self.tensor("g", &[Variance::Down, Variance::Down])?.map(TensorField::to_mat))
    }

    /// Second metric `g2` (variance `dd`).
    pub fn second_metric(&self) -> Result<Option<Mat>> {
        Ok(self.tensor("g2", &[Variance::Down, Variance::Down])?.map(TensorField::to_mat))
    }

    /// Operator `L` (variance `ud`).
    pub fn operator(&self) -> Result<Option<Mat>> {
        Ok(self.tensor("L", &[Variance::Up, Variance::Down])?.map(TensorField::to_mat))
    }

    /// Density `h` (rank 0).
    pub fn density(&self) -> Result<Option<RatFun>> {
        Ok(self.tensor("h", &[])?.map(|t| t.get(&[]).clone()))
    }
}
