//! JSON oracle specifications.
//!
//! ```json
//! {"type":"coverage","universe":4,"covers":{"1":[0,1],"2":[1,2]},"weights":[1,1,2,1]}
//! {"type":"modular","values":{"1":5,"2":3}}
//! {"type":"uniform","k":3}
//! {"type":"partition","blocks":[[1,2],[3]],"capacities":[1,1]}
//! {"type":"graphic","edges":[[0,1,1],[1,2,2],[2,0,3]]}
//! ```
//!
//! A problem file is either a bare function spec (cardinality runs) or
//! `{"function": <function spec>, "matroid": <matroid spec>}`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::element::ElementId;
use crate::error::{Error, Result};

use super::{
    Coverage, CoverageSpec, Graphic, MatroidOracle, Modular, Partition, SubmodularOracle, Uniform,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum OracleSpec {
    Coverage {
        universe: usize,
        /// Keys are element ids written as strings, as JSON requires.
        covers: BTreeMap<String, Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    Modular {
        values: BTreeMap<String, f64>,
    },
    Uniform {
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<ElementId>>,
        capacities: Vec<usize>,
    },
    Graphic {
        edges: Vec<(usize, usize, ElementId)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatroidKind {
    Uniform(usize),
    Partition {
        blocks: Vec<Vec<ElementId>>,
        capacities: Vec<usize>,
    },
    Graphic {
        edges: Vec<(usize, usize, ElementId)>,
        vertices: Option<usize>,
    },
}

pub fn make_coverage_oracle(spec: &CoverageSpec) -> Result<SubmodularOracle> {
    Ok(SubmodularOracle::new(Arc::new(Coverage::new(spec)?)))
}

pub fn make_matroid(kind: &MatroidKind) -> Result<MatroidOracle> {
    Ok(match kind {
        MatroidKind::Uniform(k) => MatroidOracle::new(Arc::new(Uniform::new(*k)?)),
        MatroidKind::Partition { blocks, capacities } => {
            MatroidOracle::new(Arc::new(Partition::new(blocks, capacities)?))
        }
        MatroidKind::Graphic { edges, vertices } => {
            MatroidOracle::new(Arc::new(Graphic::new(edges, *vertices)?))
        }
    })
}

fn parse_keys<V: Clone>(map: &BTreeMap<String, V>) -> Result<BTreeMap<ElementId, V>> {
    map.iter()
        .map(|(k, v)| {
            k.trim()
                .parse::<u64>()
                .map(|id| (ElementId(id), v.clone()))
                .map_err(|_| {
                    Error::Validation(format!("element key {k:?} is not a nonnegative integer"))
                })
        })
        .collect()
}

impl OracleSpec {
    pub fn coverage(spec: &CoverageSpec) -> Self {
        OracleSpec::Coverage {
            universe: spec.universe_size,
            covers: spec
                .covers
                .iter()
                .map(|(e, items)| (e.to_string(), items.clone()))
                .collect(),
            weights: spec.item_weights.clone(),
        }
    }

    pub fn matroid(kind: &MatroidKind) -> Self {
        match kind.clone() {
            MatroidKind::Uniform(k) => OracleSpec::Uniform { k },
            MatroidKind::Partition { blocks, capacities } => {
                OracleSpec::Partition { blocks, capacities }
            }
            MatroidKind::Graphic { edges, vertices } => OracleSpec::Graphic { edges, vertices },
        }
    }

    pub fn is_function(&self) -> bool {
        matches!(
            self,
            OracleSpec::Coverage { .. } | OracleSpec::Modular { .. }
        )
    }

    pub fn build_function(&self) -> Result<SubmodularOracle> {
        match self {
            OracleSpec::Coverage {
                universe,
                covers,
                weights,
            } => make_coverage_oracle(&CoverageSpec {
                universe_size: *universe,
                covers: parse_keys(covers)?,
                item_weights: weights.clone(),
            }),
            OracleSpec::Modular { values } => Ok(SubmodularOracle::new(Arc::new(Modular::new(
                parse_keys(values)?,
            )?))),
            other => Err(Error::Validation(format!(
                "{} is not a set function spec",
                other.type_name()
            ))),
        }
    }

    pub fn matroid_kind(&self) -> Result<MatroidKind> {
        match self {
            OracleSpec::Uniform { k } => Ok(MatroidKind::Uniform(*k)),
            OracleSpec::Partition { blocks, capacities } => Ok(MatroidKind::Partition {
                blocks: blocks.clone(),
                capacities: capacities.clone(),
            }),
            OracleSpec::Graphic { edges, vertices } => Ok(MatroidKind::Graphic {
                edges: edges.clone(),
                vertices: *vertices,
            }),
            other => Err(Error::Validation(format!(
                "{} is not a matroid spec",
                other.type_name()
            ))),
        }
    }

    pub fn build_matroid(&self) -> Result<MatroidOracle> {
        make_matroid(&self.matroid_kind()?)
    }

    fn type_name(&self) -> &'static str {
        match self {
            OracleSpec::Coverage { .. } => "coverage",
            OracleSpec::Modular { .. } => "modular",
            OracleSpec::Uniform { .. } => "uniform",
            OracleSpec::Partition { .. } => "partition",
            OracleSpec::Graphic { .. } => "graphic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub function: OracleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matroid: Option<OracleSpec>,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let spec = if value.get("function").is_some() {
            serde_json::from_value::<ProblemSpec>(value)?
        } else {
            let bare: OracleSpec = serde_json::from_value(value)?;
            if bare.is_function() {
                ProblemSpec {
                    function: bare,
                    matroid: None,
                }
            } else {
                return Err(Error::Validation(
                    "a bare matroid spec needs a set function; wrap both as {\"function\":..,\"matroid\":..}".into(),
                ));
            }
        };
        if !spec.function.is_function() {
            return Err(Error::Validation(
                "\"function\" must be a coverage or modular spec".into(),
            ));
        }
        if let Some(m) = &spec.matroid {
            m.matroid_kind()?;
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("oracle specs always serialize")
    }
}
