//! JSON document emitted by `compute`.

use serde::Serialize;

use curvlab::curvature::CurvaturePack;
use curvlab::subject::{PointEval, Subject};
use curvlab::tensor::{Slot, Tensor};

/// Flattened row-major components; `index_order` names the symbol's indices
/// in storage order.
#[derive(Debug, Serialize)]
pub struct TensorJson {
    pub symbol: &'static str,
    pub index_order: &'static str,
    pub slots: Vec<Slot>,
    pub shape: Vec<usize>,
    pub max_abs: f64,
    pub components: Vec<f64>,
}

fn tensor(symbol: &'static str, index_order: &'static str, t: &Tensor<f64>) -> TensorJson {
    TensorJson {
        symbol,
        index_order,
        slots: t.slots().to_vec(),
        shape: t.shape(),
        max_abs: t.max_abs(),
        components: t.data().to_vec(),
    }
}

#[derive(Debug, Serialize)]
pub struct Diagnostics {
    /// `max|W - C|`.
    pub coincidence_residual: f64,
    /// `max(1, max|R_ij^k_l|)`, the scale tolerances are relative to.
    pub scale: f64,
    pub phi_max_abs: f64,
    pub varphi_max_abs: f64,
    /// `max|W_kj^k_l|`; zero up to roundoff.
    pub w_trace_max_abs: f64,
    /// `max|C_kj^k_l|`; zero up to roundoff.
    pub c_trace_max_abs: f64,
    /// `|det g|` at the point.
    pub det_g: f64,
}

#[derive(Debug, Serialize)]
pub struct ComputeDocument {
    pub tool_version: &'static str,
    pub metric_id: String,
    pub connection: &'static str,
    pub dimension: usize,
    pub coordinates: Vec<String>,
    pub point: Vec<f64>,
    pub scalar_curvature: f64,
    /// `∂_m R`.
    pub scalar_gradient: Vec<f64>,
    pub tensors: Vec<TensorJson>,
    pub diagnostics: Diagnostics,
}

pub fn compute_document(subject: &Subject, eval: &PointEval) -> ComputeDocument {
    let p: &CurvaturePack = &eval.pack;
    let gamma = eval.connection.values();
    let tensors = vec![
        tensor("g", "g_ij -> [i][j]", &p.g),
        tensor("g_inv", "g^ij -> [i][j]", &p.g_inv),
        tensor("christoffel", "Γ^k_ij -> [k][i][j]", &gamma),
        tensor("riemann", "R_ij^k_l -> [i][j][k][l]", &p.riemann),
        tensor("ricci", "R_jl = R_kj^k_l -> [j][l]", &p.ricci),
        tensor("phi", "Φ_ij (symmetric trace-free Ricci) -> [i][j]", &p.phi),
        tensor("varphi", "φ_ij (skew Ricci) -> [i][j]", &p.varphi),
        tensor("rho", "ρ_ij (projective Schouten) -> [i][j]", &p.rho),
        tensor("p", "P_ij (conformal Schouten) -> [i][j]", &p.p),
        tensor("w", "W_ij^k_l (projective Weyl) -> [i][j][k][l]", &p.w),
        tensor("c", "C_ij^k_l (conformal Weyl) -> [i][j][k][l]", &p.c),
        tensor("y", "y_ijl = ∇_i ρ_jl - ∇_j ρ_il -> [i][j][l]", &p.y),
        tensor("yy", "Y_ijl = ∇_i P_jl - ∇_j P_il -> [i][j][l]", &p.yy),
        tensor("div_w", "∇_k W_ij^k_l -> [i][j][l]", &p.div_w),
        tensor("div_c", "∇_k C_ij^k_l -> [i][j][l]", &p.div_c),
    ];
    ComputeDocument {
        tool_version: env!("CARGO_PKG_VERSION"),
        metric_id: subject.id.clone(),
        connection: subject.connection_label(),
        dimension: p.dim,
        coordinates: subject.structure.metric().chart().coord_names().to_vec(),
        point: eval.point.clone(),
        scalar_curvature: p.scalar,
        scalar_gradient: p.d_scalar.clone(),
        tensors,
        diagnostics: Diagnostics {
            coincidence_residual: p.w.max_abs_diff(&p.c),
            scale: p.scale(&[]),
            phi_max_abs: p.phi.max_abs(),
            varphi_max_abs: p.varphi.max_abs(),
            w_trace_max_abs: CurvaturePack::first_trace(&p.w).max_abs(),
            c_trace_max_abs: CurvaturePack::first_trace(&p.c).max_abs(),
            det_g: eval.metric.det.value().abs(),
        },
    }
}

/// Short human-readable digest printed when the JSON goes to a file.
pub fn summary(doc: &ComputeDocument) -> String {
    let mut out = format!(
        "{} ({}, n = {}) at {:?}\n",
        doc.metric_id, doc.connection, doc.dimension, doc.point
    );
    out.push_str(&format!(
        "  scalar curvature R = {:.12e}\n",
        doc.scalar_curvature
    ));
    for t in &doc.tensors {
        out.push_str(&format!("  max|{}| = {:.6e}\n", t.symbol, t.max_abs));
    }
    let d = &doc.diagnostics;
    out.push_str(&format!(
        "  max|W - C| = {:.6e} (scale {:.6e})\n",
        d.coincidence_residual, d.scale
    ));
    out
}
