//! Pointwise algebra on a metric and a Ricci-type tensor: the trace of the
//! glue difference and the M-tensor contraction.

use rand::Rng;

use crate::curvature::{ricci_decompose, schouten_conformal, schouten_projective, RicciParts};
use crate::geometry::delta;
use crate::tensor::{Slot, Tensor};
use crate::theorems::glue::{glue_conformal, glue_projective};

fn covariant2(n: usize, f: impl Fn(usize, usize) -> f64) -> Tensor<f64> {
    Tensor::from_fn(n, vec![Slot::Down, Slot::Down], |ix| f(ix[0], ix[1]))
}

/// Inverse of a small dense matrix by Gauss-Jordan elimination.
pub fn invert_matrix(m: &Tensor<f64>) -> Option<Tensor<f64>> {
    let n = m.dim();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| *m.get(&[i, j])).collect())
        .collect();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| delta(i, j)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    Some(Tensor::from_fn(n, vec![Slot::Up, Slot::Up], |ix| {
        inv[ix[0]][ix[1]]
    }))
}

/// Random non-degenerate metric `L D Lᵀ` (unit lower-triangular `L` with
/// small entries, `|D_ii| ∈ [0.5, 2]`, occasionally one negative entry) and
/// its inverse.
pub fn random_metric(rng: &mut impl Rng, n: usize) -> (Tensor<f64>, Tensor<f64>) {
    let lower: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Greater => rng.random_range(-0.5..0.5),
                    std::cmp::Ordering::Equal => 1.0,
                    std::cmp::Ordering::Less => 0.0,
                })
                .collect()
        })
        .collect();
    let lorentzian = rng.random_bool(0.3);
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let d = rng.random_range(0.5..2.0);
            if lorentzian && i == 0 {
                -d
            } else {
                d
            }
        })
        .collect();
    let g = covariant2(n, |i, j| {
        let (i, j) = (i.min(j), i.max(j));
        (0..n).map(|k| lower[i][k] * diag[k] * lower[j][k]).sum()
    });
    let g_inv = invert_matrix(&g).expect("L D Lᵀ with nonzero D is invertible");
    (g, g_inv)
}

/// Random Ricci-type tensor with entries in `[-1, 1]`; symmetric unless
/// `with_skew`.
pub fn random_ricci(rng: &mut impl Rng, n: usize, with_skew: bool) -> Tensor<f64> {
    let raw: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    covariant2(n, |i, j| {
        if with_skew {
            raw[i * n + j]
        } else {
            0.5 * (raw[i * n + j] + raw[j * n + i])
        }
    })
}

/// The `g^{il}` traces of both glue terms and the irreducible decomposition
/// of their difference.
#[derive(Debug, Clone)]
pub struct TraceIdentity {
    /// `g^{il} 2Σ_{l[i}^{km} ρ_{j]m}`, slots `[j][k]`.
    pub lhs: Tensor<f64>,
    /// `g^{il} 2S_{l[i}^{km} P_{j]m}`, slots `[j][k]`.
    pub rhs: Tensor<f64>,
    /// Measured coefficient of `Φ` in the lowered difference.
    pub phi_coefficient: f64,
    /// Measured coefficient of `φ`.
    pub varphi_coefficient: f64,
    /// Trace of the difference divided by `R`.
    pub scalar_coefficient: f64,
    /// `max |D - c_Φ Φ - c_φ φ - (c_R R/n) g|` after fitting.
    pub fit_residual: f64,
    pub parts: RicciParts<f64>,
}

/// Coefficients the trace identity predicts: `(n/(n-1), (n²-4)/(n(n+1)))`.
pub fn predicted_trace_coefficients(n: usize) -> (f64, f64) {
    let n = n as f64;
    (n / (n - 1.0), (n * n - 4.0) / (n * (n + 1.0)))
}

fn trace_il(t: &Tensor<f64>, g_inv: &Tensor<f64>) -> Tensor<f64> {
    let n = t.dim();
    Tensor::from_fn(n, vec![Slot::Down, Slot::Up], |ix| {
        let (j, k) = (ix[0], ix[1]);
        let mut acc = 0.0;
        for i in 0..n {
            for l in 0..n {
                acc += g_inv.get(&[i, l]) * t.get(&[i, j, k, l]);
            }
        }
        acc
    })
}

fn inner(a: &Tensor<f64>, b: &Tensor<f64>) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

pub fn trace_identity(ric: &Tensor<f64>, g: &Tensor<f64>, g_inv: &Tensor<f64>) -> TraceIdentity {
    let n = ric.dim();
    assert!(n >= 3, "trace identity needs n ≥ 3");
    let parts = ricci_decompose(ric, g, g_inv).expect("covariant input");
    let rho = schouten_projective(ric).expect("covariant input");
    let p = schouten_conformal(ric, g, g_inv).expect("n ≥ 3");
    let lhs = trace_il(&glue_projective(&rho), g_inv);
    let rhs = trace_il(&glue_conformal(&p, g, g_inv), g_inv);
    // D_jl = (lhs - rhs)_j^k g_kl
    let diff = covariant2(n, |j, l| {
        (0..n)
            .map(|k| (lhs.get(&[j, k]) - rhs.get(&[j, k])) * g.get(&[k, l]))
            .sum()
    });
    let d_parts = ricci_decompose(&diff, g, g_inv).expect("covariant input");
    let fit = |part: &Tensor<f64>, basis: &Tensor<f64>| {
        let norm2 = inner(basis, basis);
        if norm2 == 0.0 {
            0.0
        } else {
            inner(part, basis) / norm2
        }
    };
    let phi_coefficient = fit(&d_parts.phi, &parts.phi);
    let varphi_coefficient = fit(&d_parts.varphi, &parts.varphi);
    let scalar_coefficient = if parts.scalar == 0.0 {
        d_parts.scalar
    } else {
        d_parts.scalar / parts.scalar
    };
    let fitted = covariant2(n, |j, l| {
        phi_coefficient * parts.phi.get(&[j, l])
            + varphi_coefficient * parts.varphi.get(&[j, l])
            + scalar_coefficient * parts.scalar / n as f64 * g.get(&[j, l])
    });
    TraceIdentity {
        lhs,
        rhs,
        phi_coefficient,
        varphi_coefficient,
        scalar_coefficient,
        fit_residual: diff.max_abs_diff(&fitted),
        parts,
    }
}

/// Dense `M_abcd^ef` at a point, slots `[a][b][c][d][e][f]`:
///
/// ```text
/// M_abcd^ef = 2 g_a[c δ^e_d] δ^f_b + 2 g_a[d g_c]b g^ef + 2(n-1) g_b[d δ^f_c] δ^e_a
/// ```
#[derive(Debug, Clone)]
pub struct NurowskiTensor {
    pub components: Tensor<f64>,
}

impl NurowskiTensor {
    pub fn new(g: &Tensor<f64>, g_inv: &Tensor<f64>) -> NurowskiTensor {
        let n = g.dim();
        let nm1 = (n - 1) as f64;
        let gg = |a: usize, b: usize| *g.get(&[a, b]);
        let slots = vec![
            Slot::Down,
            Slot::Down,
            Slot::Down,
            Slot::Down,
            Slot::Up,
            Slot::Up,
        ];
        let components = Tensor::from_fn(n, slots, |ix| {
            let (a, b, c, d, e, f) = (ix[0], ix[1], ix[2], ix[3], ix[4], ix[5]);
            let first = (gg(a, c) * delta(e, d) - gg(a, d) * delta(e, c)) * delta(f, b);
            let second = (gg(a, d) * gg(c, b) - gg(a, c) * gg(d, b)) * g_inv.get(&[e, f]);
            let third = nm1 * (gg(b, d) * delta(f, c) - gg(b, c) * delta(f, d)) * delta(e, a);
            first + second + third
        });
        NurowskiTensor { components }
    }

    /// `M_abcd^ef R_ef`, slots `[a][b][c][d]`.
    pub fn contract(&self, ric: &Tensor<f64>) -> Tensor<f64> {
        let n = ric.dim();
        let m = &self.components;
        Tensor::from_fn(n, vec![Slot::Down; 4], |ix| {
            let mut acc = 0.0;
            for e in 0..n {
                for f in 0..n {
                    acc += m.get(&[ix[0], ix[1], ix[2], ix[3], e, f]) * ric.get(&[e, f]);
                }
            }
            acc
        })
    }
}

/// `M_abcd^ef R_ef` and its max-abs.
pub fn nurowski_contraction(
    ric: &Tensor<f64>,
    g: &Tensor<f64>,
    g_inv: &Tensor<f64>,
) -> (Tensor<f64>, f64) {
    let out = NurowskiTensor::new(g, g_inv).contract(ric);
    let max = out.max_abs();
    (out, max)
}

/// Symmetric trace-free tensor with unit component norm plus `λ g`.
pub fn unit_phi_ricci(
    rng: &mut impl Rng,
    g: &Tensor<f64>,
    g_inv: &Tensor<f64>,
    lambda: f64,
) -> (Tensor<f64>, Tensor<f64>) {
    let n = g.dim();
    loop {
        let sym = random_ricci(rng, n, false);
        let phi = ricci_decompose(&sym, g, g_inv).expect("covariant").phi;
        let norm = phi.norm();
        if norm > 1e-3 {
            let phi = phi.map(|x| x / norm);
            let ric = covariant2(n, |i, j| phi.get(&[i, j]) + lambda * g.get(&[i, j]));
            return (phi, ric);
        }
    }
}
