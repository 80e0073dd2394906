//! JSON metric files: one chart, expression-valued metric
//! components, optional Weyl one-form, and a sampling box.
//!
//! ```json
//! {
//!   "label": "round 2-sphere",
//!   "dimension": 2,
//!   "coordinates": ["th", "ph"],
//!   "metric": [["1", "0"], [null, "sin(th)^2"]],
//!   "params": {},
//!   "weyl_one_form": ["0", "0"],
//!   "sample_box": [[0.5, 2.5], [0, 6]]
//! }
//! ```
//!
//! Every row has `dimension` entries. Only the upper triangle is required;
//! a lower entry may be `null`, and if present must parse to the same
//! expression as its mirror.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exprdsl::{parse, Expr, ParseError};
use crate::geometry::{Chart, GeometryError, MetricField, WeylStructure};
use crate::subject::{Classification, Subject};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed spec JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("{location}: {source}")]
    Expression {
        location: String,
        source: ParseError,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn invalid(msg: impl Into<String>) -> SpecError {
    SpecError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub label: String,
    pub dimension: usize,
    pub coordinates: Vec<String>,
    pub metric: Vec<Vec<Option<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weyl_one_form: Option<Vec<String>>,
    pub sample_box: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    /// Free-text domain of validity of the chart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity: Option<String>,
}

fn parse_at(text: &str, location: impl FnOnce() -> String) -> Result<Expr, SpecError> {
    parse(text).map_err(|source| SpecError::Expression {
        location: location(),
        source,
    })
}

impl MetricSpec {
    pub fn from_json(text: &str) -> Result<MetricSpec, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<MetricSpec, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        MetricSpec::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Parsed upper triangle in row order, after checking grid shape and
    /// lower-triangle consistency.
    fn upper_triangle(&self) -> Result<Vec<Expr>, SpecError> {
        let n = self.dimension;
        if self.metric.len() != n {
            return Err(invalid(format!(
                "metric has {} rows, dimension is {n}",
                self.metric.len()
            )));
        }
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in self.metric.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!(
                    "metric row {i} has {} entries, dimension is {n}",
                    row.len()
                )));
            }
            for j in i..n {
                let text = row[j]
                    .as_deref()
                    .ok_or_else(|| invalid(format!("metric[{i}][{j}] is required")))?;
                upper.push(parse_at(text, || format!("metric[{i}][{j}]"))?);
            }
        }
        for i in 0..n {
            for j in 0..i {
                if let Some(text) = self.metric[i][j].as_deref() {
                    let lower = parse_at(text, || format!("metric[{i}][{j}]"))?;
                    let mirror = &upper[crate::geometry::upper_index(n, j, i)];
                    if &lower != mirror {
                        return Err(invalid(format!(
                            "metric[{i}][{j}] = `{lower}` does not match metric[{j}][{i}] = `{mirror}`"
                        )));
                    }
                }
            }
        }
        Ok(upper)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        self.structure(&BTreeMap::new()).map(|_| ())?;
        self.checked_box().map(|_| ())
    }

    fn checked_box(&self) -> Result<Vec<(f64, f64)>, SpecError> {
        if self.sample_box.len() != self.dimension {
            return Err(invalid(format!(
                "sample_box has {} intervals, dimension is {}",
                self.sample_box.len(),
                self.dimension
            )));
        }
        self.sample_box
            .iter()
            .enumerate()
            .map(|(i, &[lo, hi])| {
                if !lo.is_finite() || !hi.is_finite() {
                    Err(invalid(format!("sample_box[{i}] is not finite")))
                } else if lo > hi {
                    Err(invalid(format!("sample_box[{i}] is empty: [{lo}, {hi}]")))
                } else {
                    Ok((lo, hi))
                }
            })
            .collect()
    }

    /// Builds the Weyl structure, with `overrides` replacing or adding
    /// parameter values.
    pub fn structure(&self, overrides: &BTreeMap<String, f64>) -> Result<WeylStructure, SpecError> {
        if self.coordinates.len() != self.dimension {
            return Err(invalid(format!(
                "{} coordinates given, dimension is {}",
                self.coordinates.len(),
                self.dimension
            )));
        }
        let mut params = self.params.clone();
        params.extend(overrides.iter().map(|(k, v)| (k.clone(), *v)));
        if let Some((k, _)) = params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(invalid(format!("parameter `{k}` is not finite")));
        }
        let chart = Chart::new(self.coordinates.clone(), self.validity.clone())?;
        let metric = MetricField::new(chart, self.upper_triangle()?, params)?;
        match &self.weyl_one_form {
            None => Ok(WeylStructure::levi_civita(metric)),
            Some(form) => {
                if form.len() != self.dimension {
                    return Err(invalid(format!(
                        "weyl_one_form has {} components, dimension is {}",
                        form.len(),
                        self.dimension
                    )));
                }
                let form = form
                    .iter()
                    .enumerate()
                    .map(|(i, t)| parse_at(t, || format!("weyl_one_form[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(WeylStructure::new(metric, form)?)
            }
        }
    }

    pub fn to_subject(
        &self,
        id: &str,
        overrides: &BTreeMap<String, f64>,
    ) -> Result<Subject, SpecError> {
        Ok(Subject {
            id: id.to_string(),
            structure: self.structure(overrides)?,
            sample_box: self.checked_box()?,
            classification: self.classification,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE2: &str = r#"{
        "label": "round 2-sphere",
        "dimension": 2,
        "coordinates": ["th", "ph"],
        "metric": [["1", "0"], [null, "sin(th)^2"]],
        "sample_box": [[0.5, 2.5], [0, 6]]
    }"#;

    #[test]
    fn parses_minimal_file() {
        let spec = MetricSpec::from_json(SPHERE2).unwrap();
        let s = spec.to_subject("s2", &BTreeMap::new()).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.structure.is_levi_civita());
        assert_eq!(s.sample_box, vec![(0.5, 2.5), (0.0, 6.0)]);
    }

    #[test]
    fn lower_triangle_must_match() {
        let bad = SPHERE2.replace("[null, ", "[\"1\", ");
        let err = MetricSpec::from_json(&bad).unwrap().validate().unwrap_err();
        assert!(err.to_string().contains("does not match"), "{err}");
        let ok = SPHERE2.replace("[null, ", "[\"0.0\", ");
        MetricSpec::from_json(&ok).unwrap().validate().unwrap();
    }

    #[test]
    fn rejects_bad_shapes_and_expressions() {
        let cases = [
            SPHERE2.replace("\"dimension\": 2", "\"dimension\": 3"),
            SPHERE2.replace("[0, 6]", "[6, 0]"),
            SPHERE2.replace("sin(th)^2", "sin(th"),
            SPHERE2.replace("[\"1\", \"0\"]", "[\"1\"]"),
            SPHERE2.replace("[[0.5, 2.5], [0, 6]]", "[[0.5, 2.5]]"),
        ];
        for text in cases {
            let res = MetricSpec::from_json(&text).and_then(|s| s.validate());
            assert!(res.is_err(), "{text}");
        }
        assert!(MetricSpec::from_json(&SPHERE2.replace("label", "lable")).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let spec = MetricSpec::from_json(SPHERE2).unwrap();
        let again = MetricSpec::from_json(&spec.to_json_pretty()).unwrap();
        assert_eq!(spec, again);
    }
}
