//! Transformation law of the Schouten tensors under a connection change
//! `Γ̌ = Γ + Σ·b` (projective) or `Γ̂ = Γ + S·b` (conformal):
//!
//! ```text
//! ρ_ij - ρ̌_ij = ∇_i b_j + ½ Σ^{kl}_{ij} b_k b_l
//! P_ij - P̂_ij = ∇_i b_j + ½ S^{kl}_{ij} b_k b_l
//! ```
//!
//! The statement leaves open which connection differentiates `b` and the
//! sign of the `∇b` term. [`calibrate`] evaluates all four readings on cases
//! with known answers; the winner is hard-coded as [`RESOLVED_CONVENTION`]
//! and a regression test keeps the two in sync.

use serde::Serialize;

use crate::curvature::{
    covariant_derivative, ricci, riemann, schouten_conformal, schouten_projective,
};
use crate::exprdsl::Expr;
use crate::geometry::{apply_change_jets, connection_for, ChangeKind, Connection, WeylStructure};
use crate::subject::METRIC_ORDER;
use crate::tensor::{Slot, Tensor};
use crate::Error;

/// Which connection differentiates `b` in the `∇b` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeConnection {
    Original,
    Changed,
}

/// One reading of the transformation law: `sign · ∇^X b + quadratic(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransformConvention {
    pub sign: i8,
    pub derivative: DerivativeConnection,
}

pub const ALL_CONVENTIONS: [TransformConvention; 4] = [
    TransformConvention {
        sign: 1,
        derivative: DerivativeConnection::Original,
    },
    TransformConvention {
        sign: 1,
        derivative: DerivativeConnection::Changed,
    },
    TransformConvention {
        sign: -1,
        derivative: DerivativeConnection::Original,
    },
    TransformConvention {
        sign: -1,
        derivative: DerivativeConnection::Changed,
    },
];

/// `b` differentiated by the changed connection, with a `+` sign. This is
/// the only reading under which the law holds; see [`calibrate`].
pub const RESOLVED_CONVENTION: TransformConvention = TransformConvention {
    sign: 1,
    derivative: DerivativeConnection::Changed,
};

/// Both sides of the law at one point.
#[derive(Debug, Clone)]
pub struct SchoutenLawSample {
    /// Old Schouten tensor minus new.
    pub difference: Tensor<f64>,
    /// `∇_i b_j` with the original connection.
    pub grad_original: Tensor<f64>,
    /// `∇_i b_j` with the changed connection.
    pub grad_changed: Tensor<f64>,
    /// `½Σ^{kl}_{ij} b_k b_l` or `½S^{kl}_{ij} b_k b_l`.
    pub quadratic: Tensor<f64>,
    /// `max(1, |R|, |Ř|, |old|, |new|, |∇b|)`.
    pub scale: f64,
}

impl SchoutenLawSample {
    pub fn predicted(&self, convention: TransformConvention) -> Tensor<f64> {
        let grad = match convention.derivative {
            DerivativeConnection::Original => &self.grad_original,
            DerivativeConnection::Changed => &self.grad_changed,
        };
        let s = f64::from(convention.sign);
        Tensor::from_fn(grad.dim(), vec![Slot::Down, Slot::Down], |ix| {
            s * grad.get(ix) + self.quadratic.get(ix)
        })
    }

    pub fn residual(&self, convention: TransformConvention) -> f64 {
        self.difference.max_abs_diff(&self.predicted(convention))
    }
}

fn schouten_values(
    conn: &Connection,
    kind: ChangeKind,
    g: &Tensor<crate::jets::Jet>,
    g_inv: &Tensor<crate::jets::Jet>,
) -> Result<(Tensor<f64>, Tensor<f64>), Error> {
    let riem = riemann(conn)?;
    let order = riem.data()[0].order();
    let ric = ricci(&riem)?;
    let s = match kind {
        ChangeKind::Projective => schouten_projective(&ric)?,
        ChangeKind::Conformal => {
            let g = g.map(|x| x.truncate(order));
            let gi = g_inv.map(|x| x.truncate(order));
            schouten_conformal(&ric, &g, &gi)?
        }
    };
    Ok((s.values(), riem.values()))
}

/// Evaluates both sides of the law for the structure's base connection
/// changed by `b` at `point`.
pub fn schouten_law_at(
    structure: &WeylStructure,
    point: &[f64],
    kind: ChangeKind,
    b: &[Expr],
) -> Result<SchoutenLawSample, Error> {
    let metric = structure.metric().at(point, METRIC_ORDER)?;
    let conn = connection_for(structure, &metric)?;
    let b_jets = structure.metric().one_form_at(b, point, conn.order())?;
    let changed = apply_change_jets(&conn, kind, &b_jets, &metric);

    let (old, riem_old) = schouten_values(&conn, kind, &metric.g, &metric.g_inv)?;
    let (new, riem_new) = schouten_values(&changed, kind, &metric.g, &metric.g_inv)?;
    let difference = Tensor::from_fn(old.dim(), vec![Slot::Down, Slot::Down], |ix| {
        old.get(ix) - new.get(ix)
    });

    let n = structure.dim();
    let b_field = Tensor::from_vec(
        n,
        vec![Slot::Down],
        b_jets.iter().map(|x| x.truncate(1)).collect(),
    );
    let grad_original = covariant_derivative(&b_field, &conn)?.values();
    let grad_changed = covariant_derivative(&b_field, &changed)?.values();

    let bv: Vec<f64> = b_jets.iter().map(|x| x.value()).collect();
    let g = metric.g_values();
    let gi = metric.g_inv_values();
    let b_sq: f64 = (0..n)
        .flat_map(|k| (0..n).map(move |l| (k, l)))
        .map(|(k, l)| gi.get(&[k, l]) * bv[k] * bv[l])
        .sum();
    let quadratic = Tensor::from_fn(n, vec![Slot::Down, Slot::Down], |ix| {
        let bb = bv[ix[0]] * bv[ix[1]];
        match kind {
            ChangeKind::Projective => bb,
            ChangeKind::Conformal => bb - 0.5 * g.get(ix) * b_sq,
        }
    });

    let scale = [
        &riem_old,
        &riem_new,
        &old,
        &new,
        &grad_original,
        &grad_changed,
    ]
    .iter()
    .map(|t| t.max_abs())
    .fold(1.0, f64::max);

    Ok(SchoutenLawSample {
        difference,
        grad_original,
        grad_changed,
        quadratic,
        scale,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantResidual {
    pub convention: TransformConvention,
    /// Worst `residual / scale` over the calibration cases.
    pub relative_residual: f64,
}

/// Outcome of [`calibrate`]: the winning reading and how every reading did.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationRecord {
    pub convention: TransformConvention,
    pub variants: Vec<VariantResidual>,
    pub cases: Vec<String>,
}

fn calibration_cases() -> Vec<(&'static str, ChangeKind, Vec<f64>, Vec<&'static str>)> {
    vec![
        (
            "euclidean4",
            ChangeKind::Projective,
            vec![0.2, -0.1, 0.3, 0.05],
            vec!["0.3", "-0.2", "0.1", "0.4"],
        ),
        (
            "euclidean4",
            ChangeKind::Conformal,
            vec![0.2, -0.1, 0.3, 0.05],
            vec!["0.3", "-0.2", "0.1", "0.4"],
        ),
        (
            "sphere4",
            ChangeKind::Projective,
            vec![0.3, 0.1, -0.2, 0.4],
            vec!["0.1*x2", "0.2 - 0.1*x1", "0.05*x3*x4", "x1*x2"],
        ),
        (
            "sphere4",
            ChangeKind::Conformal,
            vec![0.3, 0.1, -0.2, 0.4],
            vec!["0.1*x2", "0.2 - 0.1*x1", "0.05*x3*x4", "x1*x2"],
        ),
    ]
}

/// Evaluates all four readings of the law on flat space with a constant
/// one-form and on the round 4-sphere with a non-closed one, and picks the
/// reading with the smallest worst-case residual.
pub fn calibrate() -> Result<CalibrationRecord, Error> {
    let mut samples = Vec::new();
    let mut cases = Vec::new();
    for (entry, kind, point, b) in calibration_cases() {
        let subject = crate::catalog::subject(entry, &Default::default())?;
        let b: Vec<Expr> = b
            .iter()
            .map(|s| crate::exprdsl::parse(s).expect("valid calibration expression"))
            .collect();
        samples.push(schouten_law_at(&subject.structure, &point, kind, &b)?);
        cases.push(format!(
            "{entry}/{}",
            match kind {
                ChangeKind::Projective => "projective",
                ChangeKind::Conformal => "conformal",
            }
        ));
    }
    let variants: Vec<VariantResidual> = ALL_CONVENTIONS
        .iter()
        .map(|&convention| VariantResidual {
            convention,
            relative_residual: samples
                .iter()
                .map(|s| s.residual(convention) / s.scale)
                .fold(0.0, f64::max),
        })
        .collect();
    let best = variants
        .iter()
        .min_by(|a, b| a.relative_residual.total_cmp(&b.relative_residual))
        .expect("four variants")
        .convention;
    Ok(CalibrationRecord {
        convention: best,
        variants,
        cases,
    })
}
