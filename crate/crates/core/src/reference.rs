//! Jet-free reference computations used to cross-check the pipeline:
//! curvature by nested finite differences of plain-number metric values,
//! and the Kretschmann scalar.

use std::collections::BTreeMap;

use crate::curvature::CurvaturePack;
use crate::exprdsl::eval_f64;
use crate::geometry::{GeometryError, MetricField};
use crate::tensor::{Slot, Tensor};
use crate::theorems::algebra::invert_matrix;

/// Step of the fourth-order central differences.
pub const STEP: f64 = 1e-3;

/// Metric components at `x` by plain-number evaluation, row-major.
pub fn metric_values(m: &MetricField, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let n = m.dim();
    let coords: BTreeMap<String, f64> = m
        .chart()
        .coord_names()
        .iter()
        .cloned()
        .zip(x.iter().copied())
        .collect();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = eval_f64(m.component(i, j), &coords, m.params())?;
            g[i * n + j] = v;
            g[j * n + i] = v;
        }
    }
    Ok(g)
}

type VectorFn<'a, E> = dyn Fn(&[f64]) -> Result<Vec<f64>, E> + 'a;

/// Fourth-order central difference of a vector-valued `f` along `axis`,
/// with step `h·max(1, |x_axis|)`.
pub fn central<E>(
    f: &VectorFn<'_, E>,
    x: &[f64],
    axis: usize,
    h: f64,
) -> Result<Vec<f64>, E> {
    let h = h * x[axis].abs().max(1.0);
    let at = |s: f64| {
        let mut q = x.to_vec();
        q[axis] += s * h;
        f(&q)
    };
    let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
    Ok((0..p1.len())
        .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
        .collect())
}

/// `Γ^k_ij` flattened as `[k][i][j]`, from finite differences of `g`.
pub fn christoffel(m: &MetricField, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let n = m.dim();
    let values = |q: &[f64]| metric_values(m, q);
    let dg = (0..n)
        .map(|a| central(&values, x, a, STEP))
        .collect::<Result<Vec<_>, _>>()?;
    let g = metric_values(m, x)?;
    let gi = invert_matrix(&Tensor::from_vec(
        n,
        vec![Slot::Down, Slot::Down],
        g.clone(),
    ))
    .ok_or(GeometryError::SingularMetric {
        det: 0.0,
        floor: 0.0,
    })?;
    let gi = |k: usize, l: usize| *gi.get(&[k, l]);
    let mut out = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += gi(k, l) * (dg[i][j * n + l] + dg[j][i * n + l] - dg[l][i * n + j]);
                }
                out[(k * n + i) * n + j] = 0.5 * acc;
            }
        }
    }
    Ok(out)
}

/// `R_ij^k_l` flattened as `[i][j][k][l]`: the commutator
/// `(∇_i∇_j - ∇_j∇_i) e_l` of the constant-component field `e_l`, with the
/// connection and every derivative taken by nested finite differences.
pub fn riemann(m: &MetricField, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let n = m.dim();
    let gm = |g: &[f64], k: usize, i: usize, j: usize| g[(k * n + i) * n + j];
    let g0 = christoffel(m, x)?;
    let mut out = vec![0.0; n * n * n * n];
    for l in 0..n {
        // T_j^k = ∇_j (e_l)^k = Γ^k_jl, flattened [j][k].
        let t = |q: &[f64]| -> Result<Vec<f64>, GeometryError> {
            let g = christoffel(m, q)?;
            Ok((0..n * n).map(|jk| gm(&g, jk % n, jk / n, l)).collect())
        };
        let t0 = t(x)?;
        let dt = (0..n)
            .map(|i| central(&t, x, i, STEP))
            .collect::<Result<Vec<_>, _>>()?;
        // ∇_i T_j^k = ∂_i T_j^k + Γ^k_im T_j^m - Γ^m_ij T_m^k.
        let nabla = |i: usize, j: usize, k: usize| {
            let mut v = dt[i][j * n + k];
            for mm in 0..n {
                v += gm(&g0, k, i, mm) * t0[j * n + mm] - gm(&g0, mm, i, j) * t0[mm * n + k];
            }
            v
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[((i * n + j) * n + k) * n + l] = nabla(i, j, k) - nabla(j, i, k);
                }
            }
        }
    }
    Ok(out)
}

/// `R_abcd R^abcd` from the pack's `R_ij^k_l`, `g` and `g^-1`.
pub fn kretschmann(p: &CurvaturePack) -> f64 {
    let n = p.dim;
    let r = |i, j, k, l| *p.riemann.get(&[i, j, k, l]);
    let g = |i, j| *p.g.get(&[i, j]);
    let gi = |i, j| *p.g_inv.get(&[i, j]);
    let mut total = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    // R_ab c d with c lowered, and R^ab_c^d with a, b, d raised.
                    let low: f64 = (0..n).map(|k| g(c, k) * r(a, b, k, d)).sum();
                    let mut up = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            for l in 0..n {
                                up += gi(a, i) * gi(b, j) * gi(d, l) * r(i, j, c, l);
                            }
                        }
                    }
                    total += low * up;
                }
            }
        }
    }
    total
}
