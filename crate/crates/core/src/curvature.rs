//! Riemann, Ricci, Schouten, Weyl and Cotton-York tensors of a torsion-free
//! connection.
//!
//! Conventions:
//! - `2∇_[i ∇_j] v^k = R_ij^k_l v^l`, stored at `[i][j][k][l]`.
//! - `R_jl = R_kj^k_l`.
//! - `T_[ij] = (T_ij - T_ji)/2`, `T_(ij) = (T_ij + T_ji)/2`.
//!
//! Jet orders step down along the pipeline: metric 3, connection 2,
//! curvature 1, derivatives of curvature 0.

use thiserror::Error;

use crate::geometry::{delta, Connection, ConnectionKind, MetricAtPoint};
use crate::jets::{Jet, JetError};
use crate::tensor::{Coeff, Slot, Tensor};
use crate::theorems::glue::{glue_conformal, glue_projective};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("{what} requires dimension at least {min}, got {n}")]
    DimensionTooSmall {
        what: &'static str,
        min: usize,
        n: usize,
    },
    #[error("expected index signature {expected:?}, got {got:?}")]
    VarianceMismatch { expected: Vec<Slot>, got: Vec<Slot> },
    #[error(transparent)]
    Jet(#[from] JetError),
}

const RIEMANN_SLOTS: [Slot; 4] = [Slot::Down, Slot::Down, Slot::Up, Slot::Down];
const COVARIANT2: [Slot; 2] = [Slot::Down, Slot::Down];

fn expect_slots(t: &[Slot], expected: &[Slot]) -> Result<(), CurvatureError> {
    if t != expected {
        return Err(CurvatureError::VarianceMismatch {
            expected: expected.to_vec(),
            got: t.to_vec(),
        });
    }
    Ok(())
}

/// `R_ij^k_l = ∂_i Γ^k_jl - ∂_j Γ^k_il + Γ^k_im Γ^m_jl - Γ^k_jm Γ^m_il`,
/// one jet order below the connection.
pub fn riemann(conn: &Connection) -> Result<Tensor<Jet>, CurvatureError> {
    let n = conn.dim();
    let order = conn
        .order()
        .checked_sub(1)
        .ok_or(JetError::OrderExhausted)?;
    let gamma = conn.coefficients();
    // dgamma[m][k][i][j] = ∂_m Γ^k_ij
    let mut dgamma = Vec::with_capacity(n.pow(4));
    for m in 0..n {
        for g in gamma.data() {
            dgamma.push(g.differentiate(m)?);
        }
    }
    let dg = |m: usize, k: usize, i: usize, j: usize| &dgamma[((m * n + k) * n + i) * n + j];
    let low: Vec<Jet> = gamma.data().iter().map(|g| g.truncate(order)).collect();
    let gm = |k: usize, i: usize, j: usize| &low[(k * n + i) * n + j];

    let mut data = vec![None; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let at = ((i * n + j) * n + k) * n + l;
                    if j < i {
                        let mirror: &Jet = data[((j * n + i) * n + k) * n + l].as_ref().unwrap();
                        data[at] = Some(-mirror);
                        continue;
                    }
                    if i == j {
                        data[at] = Some(Jet::zero(low[0].dim(), order));
                        continue;
                    }
                    let mut r = dg(i, k, j, l) - dg(j, k, i, l);
                    for m in 0..n {
                        r = &r + &(gm(k, i, m) * gm(m, j, l));
                        r = &r - &(gm(k, j, m) * gm(m, i, l));
                    }
                    data[at] = Some(r);
                }
            }
        }
    }
    Ok(Tensor::from_vec(
        n,
        RIEMANN_SLOTS.to_vec(),
        data.into_iter().map(Option::unwrap).collect(),
    ))
}

/// `R_jl = Σ_k R_kj^k_l`.
pub fn ricci<T: Coeff>(riem: &Tensor<T>) -> Result<Tensor<T>, CurvatureError> {
    expect_slots(riem.slots(), &RIEMANN_SLOTS)?;
    let n = riem.dim();
    Ok(Tensor::from_fn(n, COVARIANT2.to_vec(), |ix| {
        let (j, l) = (ix[0], ix[1]);
        let mut acc = riem.get(&[0, j, 0, l]).clone();
        for k in 1..n {
            acc = acc.add(riem.get(&[k, j, k, l]));
        }
        acc
    }))
}

/// Irreducible pieces of a covariant 2-tensor with respect to `g`:
/// `Ric = Φ + φ + (R/n) g`.
#[derive(Debug, Clone)]
pub struct RicciParts<T> {
    /// Symmetric trace-free part.
    pub phi: Tensor<T>,
    /// Skew part.
    pub varphi: Tensor<T>,
    /// `R = g^{jl} R_jl`.
    pub scalar: T,
}

fn symmetric_part<T: Coeff>(t: &Tensor<T>) -> Tensor<T> {
    Tensor::from_fn(t.dim(), COVARIANT2.to_vec(), |ix| {
        t.get(&[ix[0], ix[1]])
            .add(t.get(&[ix[1], ix[0]]))
            .scale(0.5)
    })
}

fn skew_part<T: Coeff>(t: &Tensor<T>) -> Tensor<T> {
    Tensor::from_fn(t.dim(), COVARIANT2.to_vec(), |ix| {
        t.get(&[ix[0], ix[1]])
            .sub(t.get(&[ix[1], ix[0]]))
            .scale(0.5)
    })
}

/// Full contraction `g^{ij} T_ij`.
pub fn metric_trace<T: Coeff>(t: &Tensor<T>, g_inv: &Tensor<T>) -> T {
    let n = t.dim();
    let mut acc = t.data()[0].zero_like();
    for i in 0..n {
        for j in 0..n {
            acc = acc.add(&g_inv.get(&[i, j]).mul(t.get(&[i, j])));
        }
    }
    acc
}

pub fn ricci_decompose<T: Coeff>(
    ric: &Tensor<T>,
    g: &Tensor<T>,
    g_inv: &Tensor<T>,
) -> Result<RicciParts<T>, CurvatureError> {
    expect_slots(ric.slots(), &COVARIANT2)?;
    let n = ric.dim();
    let sym = symmetric_part(ric);
    let scalar = metric_trace(&sym, g_inv);
    let per_dim = scalar.scale(1.0 / n as f64);
    let phi = Tensor::from_fn(n, COVARIANT2.to_vec(), |ix| {
        sym.get(ix).sub(&per_dim.mul(g.get(ix)))
    });
    Ok(RicciParts {
        phi,
        varphi: skew_part(ric),
        scalar,
    })
}

/// `ρ_ij = R_(ij)/(n-1) + R_[ij]/(n+1)`.
pub fn schouten_projective<T: Coeff>(ric: &Tensor<T>) -> Result<Tensor<T>, CurvatureError> {
    expect_slots(ric.slots(), &COVARIANT2)?;
    let n = ric.dim() as f64;
    let (sym, skew) = (symmetric_part(ric), skew_part(ric));
    Ok(Tensor::from_fn(ric.dim(), COVARIANT2.to_vec(), |ix| {
        sym.get(ix)
            .scale(1.0 / (n - 1.0))
            .add(&skew.get(ix).scale(1.0 / (n + 1.0)))
    }))
}

/// `P_ij = R_(ij)/(n-2) + R_[ij]/n - g^{kl}R_kl g_ij / (2(n-2)(n-1))`.
pub fn schouten_conformal<T: Coeff>(
    ric: &Tensor<T>,
    g: &Tensor<T>,
    g_inv: &Tensor<T>,
) -> Result<Tensor<T>, CurvatureError> {
    expect_slots(ric.slots(), &COVARIANT2)?;
    if ric.dim() < 3 {
        return Err(CurvatureError::DimensionTooSmall {
            what: "conformal Schouten tensor",
            min: 3,
            n: ric.dim(),
        });
    }
    let n = ric.dim() as f64;
    let (sym, skew) = (symmetric_part(ric), skew_part(ric));
    let trace = metric_trace(ric, g_inv).scale(1.0 / (2.0 * (n - 2.0) * (n - 1.0)));
    Ok(Tensor::from_fn(ric.dim(), COVARIANT2.to_vec(), |ix| {
        sym.get(ix)
            .scale(1.0 / (n - 2.0))
            .add(&skew.get(ix).scale(1.0 / n))
            .sub(&trace.mul(g.get(ix)))
    }))
}

/// `ρ = Φ/(n-1) + φ/(n+1) + R g/(n(n-1))`, the same tensor assembled from
/// the irreducible parts.
pub fn schouten_projective_from_parts<T: Coeff>(parts: &RicciParts<T>, g: &Tensor<T>) -> Tensor<T> {
    let n = g.dim() as f64;
    let trace = parts.scalar.scale(1.0 / (n * (n - 1.0)));
    Tensor::from_fn(g.dim(), COVARIANT2.to_vec(), |ix| {
        parts
            .phi
            .get(ix)
            .scale(1.0 / (n - 1.0))
            .add(&parts.varphi.get(ix).scale(1.0 / (n + 1.0)))
            .add(&trace.mul(g.get(ix)))
    })
}

/// `P = Φ/(n-2) + φ/n + R g/(2n(n-1))`.
///
/// In two dimensions the `Φ` term is dropped: the symmetric trace-free Ricci
/// part of a Weyl connection vanishes identically there, and the remaining
/// terms are the only curvature-determined part of `P`.
pub fn schouten_conformal_from_parts<T: Coeff>(parts: &RicciParts<T>, g: &Tensor<T>) -> Tensor<T> {
    let n = g.dim() as f64;
    let trace = parts.scalar.scale(1.0 / (2.0 * n * (n - 1.0)));
    Tensor::from_fn(g.dim(), COVARIANT2.to_vec(), |ix| {
        let base = parts
            .varphi
            .get(ix)
            .scale(1.0 / n)
            .add(&trace.mul(g.get(ix)));
        if g.dim() > 2 {
            base.add(&parts.phi.get(ix).scale(1.0 / (n - 2.0)))
        } else {
            base
        }
    })
}

/// `W = R - 2Σ_{l[i}^{km} ρ_{j]m}`.
pub fn weyl_projective<T: Coeff>(riem: &Tensor<T>, rho: &Tensor<T>) -> Tensor<T> {
    let glue = glue_projective(rho);
    subtract(riem, &glue)
}

/// `C = R - 2S_{l[i}^{km} P_{j]m}`.
pub fn weyl_conformal<T: Coeff>(
    riem: &Tensor<T>,
    p: &Tensor<T>,
    g: &Tensor<T>,
    g_inv: &Tensor<T>,
) -> Tensor<T> {
    let glue = glue_conformal(p, g, g_inv);
    subtract(riem, &glue)
}

fn subtract<T: Coeff>(a: &Tensor<T>, b: &Tensor<T>) -> Tensor<T> {
    Tensor::from_vec(
        a.dim(),
        a.slots().to_vec(),
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| x.sub(y))
            .collect(),
    )
}

/// `∇_m T`, with the new derivative index in the first slot.
pub fn covariant_derivative(
    t: &Tensor<Jet>,
    conn: &Connection,
) -> Result<Tensor<Jet>, CurvatureError> {
    let n = t.dim();
    let order = t.data()[0]
        .order()
        .checked_sub(1)
        .ok_or(JetError::OrderExhausted)?;
    let gamma: Vec<Jet> = conn
        .coefficients()
        .data()
        .iter()
        .map(|g| g.truncate(order))
        .collect();
    let gm = |k: usize, i: usize, j: usize| &gamma[(k * n + i) * n + j];
    let mut slots = vec![Slot::Down];
    slots.extend_from_slice(t.slots());

    let mut partials = Vec::with_capacity(n * t.data().len());
    for m in 0..n {
        for comp in t.data() {
            partials.push(comp.differentiate(m)?);
        }
    }
    let per_m = t.data().len();
    let lowered: Vec<Jet> = t.data().iter().map(|c| c.truncate(order)).collect();

    let mut src = vec![0; t.rank()];
    Ok(Tensor::from_fn(n, slots, |ix| {
        let m = ix[0];
        let rest = &ix[1..];
        let mut acc = partials[m * per_m + t.offset(rest)].clone();
        for (s, slot) in t.slots().iter().enumerate() {
            src.copy_from_slice(rest);
            for c in 0..n {
                src[s] = c;
                let comp = &lowered[t.offset(&src)];
                match slot {
                    Slot::Up => acc = &acc + &(gm(rest[s], m, c) * comp),
                    Slot::Down => acc = &acc - &(gm(c, m, rest[s]) * comp),
                }
            }
        }
        acc
    }))
}

/// `2∇_[i T_j]l = ∇_i T_jl - ∇_j T_il` for a Schouten-type field.
pub fn cotton_york(
    schouten: &Tensor<Jet>,
    conn: &Connection,
) -> Result<Tensor<Jet>, CurvatureError> {
    expect_slots(schouten.slots(), &COVARIANT2)?;
    let d = covariant_derivative(schouten, conn)?;
    Ok(Tensor::from_fn(
        schouten.dim(),
        vec![Slot::Down, Slot::Down, Slot::Down],
        |ix| {
            let (i, j, l) = (ix[0], ix[1], ix[2]);
            d.get(&[i, j, l]) - d.get(&[j, i, l])
        },
    ))
}

/// `∇_k T_ij^k_l` for a Riemann-type field.
pub fn weyl_divergence(t: &Tensor<Jet>, conn: &Connection) -> Result<Tensor<Jet>, CurvatureError> {
    expect_slots(t.slots(), &RIEMANN_SLOTS)?;
    let n = t.dim();
    let d = covariant_derivative(t, conn)?;
    Ok(Tensor::from_fn(
        n,
        vec![Slot::Down, Slot::Down, Slot::Down],
        |ix| {
            let (i, j, l) = (ix[0], ix[1], ix[2]);
            let mut acc = d.get(&[0, i, j, 0, l]).clone();
            for k in 1..n {
                acc = &acc + d.get(&[k, i, j, k, l]);
            }
            acc
        },
    ))
}

/// All curvature data of a connection at one point (values only).
#[derive(Debug, Clone)]
pub struct CurvaturePack {
    pub dim: usize,
    pub kind: ConnectionKind,
    pub g: Tensor<f64>,
    pub g_inv: Tensor<f64>,
    pub riemann: Tensor<f64>,
    pub ricci: Tensor<f64>,
    pub scalar: f64,
    pub phi: Tensor<f64>,
    pub varphi: Tensor<f64>,
    pub rho: Tensor<f64>,
    pub p: Tensor<f64>,
    pub w: Tensor<f64>,
    pub c: Tensor<f64>,
    pub y: Tensor<f64>,
    pub yy: Tensor<f64>,
    /// `∇_k W_ij^k_l`.
    pub div_w: Tensor<f64>,
    /// `∇_k C_ij^k_l`.
    pub div_c: Tensor<f64>,
    /// `∂_m R`.
    pub d_scalar: Vec<f64>,
}

impl CurvaturePack {
    /// Runs the full pipeline. `conn` needs jets of order ≥ 2 and `metric`
    /// of order ≥ 1.
    pub fn compute(
        conn: &Connection,
        metric: &MetricAtPoint,
    ) -> Result<CurvaturePack, CurvatureError> {
        let n = conn.dim();
        let riem = riemann(conn)?;
        let order = riem.data()[0].order();
        let (g, g_inv) = metric.truncated(order);
        let ric = ricci(&riem)?;
        let parts = ricci_decompose(&ric, &g, &g_inv)?;
        let rho = schouten_projective(&ric)?;
        let p = if n >= 3 {
            schouten_conformal(&ric, &g, &g_inv)?
        } else {
            schouten_conformal_from_parts(&parts, &g)
        };
        let w = weyl_projective(&riem, &rho);
        let c = weyl_conformal(&riem, &p, &g, &g_inv);
        let y = cotton_york(&rho, conn)?;
        let yy = cotton_york(&p, conn)?;
        let div_w = weyl_divergence(&w, conn)?;
        let div_c = weyl_divergence(&c, conn)?;
        let d_scalar = (0..n)
            .map(|m| parts.scalar.differentiate(m).map(|d| d.value()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CurvaturePack {
            dim: n,
            kind: conn.kind,
            g: g.values(),
            g_inv: g_inv.values(),
            riemann: riem.values(),
            ricci: ric.values(),
            scalar: parts.scalar.value(),
            phi: parts.phi.values(),
            varphi: parts.varphi.values(),
            rho: rho.values(),
            p: p.values(),
            w: w.values(),
            c: c.values(),
            y: y.values(),
            yy: yy.values(),
            div_w: div_w.values(),
            div_c: div_c.values(),
            d_scalar,
        })
    }

    /// `max(1, max|R_ij^k_l|, max|t| for t in extra)`.
    pub fn scale(&self, extra: &[&Tensor<f64>]) -> f64 {
        extra
            .iter()
            .map(|t| t.max_abs())
            .fold(self.riemann.max_abs().max(1.0), f64::max)
    }

    /// First-third trace `T_kj^k_l` of a Riemann-type tensor.
    pub fn first_trace(t: &Tensor<f64>) -> Tensor<f64> {
        ricci(t).expect("Riemann-type slots")
    }

    /// Fully covariant `T_ijml = g_mk T_ij^k_l`.
    pub fn lower(&self, t: &Tensor<f64>) -> Tensor<f64> {
        let n = self.dim;
        Tensor::from_fn(n, vec![Slot::Down; 4], |ix| {
            let (i, j, m, l) = (ix[0], ix[1], ix[2], ix[3]);
            (0..n)
                .map(|k| self.g.get(&[m, k]) * t.get(&[i, j, k, l]))
                .sum()
        })
    }
}

/// `δ^k_i` as a (1,1) tensor with slots `[k][i]`.
pub fn kronecker(dim: usize, order: usize, n: usize) -> Tensor<Jet> {
    Tensor::from_fn(n, vec![Slot::Up, Slot::Down], |ix| {
        Jet::constant(dim, order, delta(ix[0], ix[1]))
    })
}
