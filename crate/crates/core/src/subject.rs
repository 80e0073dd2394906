//! A Weyl structure together with its sampling box: the unit every check
//! runs on.

use serde::{Deserialize, Serialize};

use crate::curvature::CurvaturePack;
use crate::geometry::{connection_for, Connection, MetricAtPoint, WeylStructure};
use crate::Error;

/// Expected character of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Flat,
    Einstein,
    NonEinstein,
    WeylNonclosed,
}

impl Classification {
    /// Whether the base connection is expected to have `Φ = φ = 0`.
    pub fn expects_coincidence(self) -> bool {
        matches!(self, Classification::Flat | Classification::Einstein)
    }
}

#[derive(Debug, Clone)]
pub struct Subject {
    pub id: String,
    pub structure: WeylStructure,
    pub sample_box: Vec<(f64, f64)>,
    pub classification: Option<Classification>,
}

impl Subject {
    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn connection_label(&self) -> &'static str {
        if self.structure.is_levi_civita() {
            "levi_civita"
        } else {
            "weyl"
        }
    }

    /// Center of the sampling box.
    pub fn center(&self) -> Vec<f64> {
        self.sample_box.iter().map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

/// Metric jets (order 3), base connection (order 2) and all curvature values
/// at one point.
#[derive(Debug, Clone)]
pub struct PointEval {
    pub point: Vec<f64>,
    pub metric: MetricAtPoint,
    pub connection: Connection,
    pub pack: CurvaturePack,
}

/// Order of the metric jets the curvature pipeline needs.
pub const METRIC_ORDER: usize = 3;

pub fn evaluate(structure: &WeylStructure, point: &[f64]) -> Result<PointEval, Error> {
    let metric = structure.metric().at(point, METRIC_ORDER)?;
    let connection = connection_for(structure, &metric)?;
    let pack = CurvaturePack::compute(&connection, &metric)?;
    Ok(PointEval {
        point: point.to_vec(),
        metric,
        connection,
        pack,
    })
}
