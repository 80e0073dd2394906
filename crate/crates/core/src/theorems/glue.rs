//! The two "glue" terms that split Riemann into a Weyl part and a Schouten
//! part:
//!
//! ```text
//! R_ij^k_l = W_ij^k_l + 2Σ_{l[i}^{km} ρ_{j]m} = C_ij^k_l + 2S_{l[i}^{km} P_{j]m}
//! ```
//!
//! Each glue has two constructions: a direct contraction with the `Σ`/`S`
//! projectors, and an expanded form written in terms of the irreducible
//! Ricci parts `Φ`, `φ`, `R`. Both are kept so they can be checked against
//! each other.

use crate::curvature::RicciParts;
use crate::geometry::delta;
use crate::tensor::{Coeff, Slot, Tensor};

const SLOTS: [Slot; 4] = [Slot::Down, Slot::Down, Slot::Up, Slot::Down];

fn sigma(k: usize, m: usize, l: usize, i: usize) -> f64 {
    delta(k, l) * delta(m, i) + delta(m, l) * delta(k, i)
}

/// `Σ_m (Σ^{km}_{li} X_jm - Σ^{km}_{lj} X_im)`.
fn sigma_glue<T: Coeff>(x: &Tensor<T>) -> Tensor<T> {
    let n = x.dim();
    let zero = x.data()[0].zero_like();
    Tensor::from_fn(n, SLOTS.to_vec(), |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = zero.clone();
        for m in 0..n {
            let a = sigma(k, m, l, i);
            if a != 0.0 {
                acc = acc.add(&x.get(&[j, m]).scale(a));
            }
            let b = sigma(k, m, l, j);
            if b != 0.0 {
                acc = acc.sub(&x.get(&[i, m]).scale(b));
            }
        }
        acc
    })
}

/// `2Σ_{l[i}^{km} ρ_{j]m}` by direct contraction.
pub fn glue_projective<T: Coeff>(rho: &Tensor<T>) -> Tensor<T> {
    sigma_glue(rho)
}

/// `2S_{l[i}^{km} P_{j]m}` by direct contraction, with
/// `S^{km}_{li} = Σ^{km}_{li} - g_li g^{km}`.
pub fn glue_conformal<T: Coeff>(p: &Tensor<T>, g: &Tensor<T>, g_inv: &Tensor<T>) -> Tensor<T> {
    let n = p.dim();
    let zero = p.data()[0].zero_like();
    // raised[j][k] = g^{km} P_jm
    let raised = Tensor::from_fn(n, vec![Slot::Down, Slot::Up], |ix| {
        let (j, k) = (ix[0], ix[1]);
        (0..n).fold(zero.clone(), |acc, m| {
            acc.add(&g_inv.get(&[k, m]).mul(p.get(&[j, m])))
        })
    });
    let sig = sigma_glue(p);
    Tensor::from_fn(n, SLOTS.to_vec(), |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        sig.get(ix)
            .sub(&g.get(&[l, i]).mul(raised.get(&[j, k])))
            .add(&g.get(&[l, j]).mul(raised.get(&[i, k])))
    })
}

/// `2δ^k_[i X_j]l = δ^k_i X_jl - δ^k_j X_il`.
fn delta_wedge<T: Coeff>(x: &Tensor<T>, i: usize, j: usize, k: usize, l: usize) -> T {
    let zero = x.data()[0].zero_like();
    let mut acc = zero;
    if k == i {
        acc = acc.add(x.get(&[j, l]));
    }
    if k == j {
        acc = acc.sub(x.get(&[i, l]));
    }
    acc
}

/// `2g_l[i X_j]m g^{km} = g_li X_jm g^{km} - g_lj X_im g^{km}`.
fn metric_wedge<T: Coeff>(
    x: &Tensor<T>,
    g: &Tensor<T>,
    g_inv: &Tensor<T>,
    (i, j, k, l): (usize, usize, usize, usize),
) -> T {
    let n = x.dim();
    let zero = x.data()[0].zero_like();
    let mut acc = zero;
    for m in 0..n {
        let gk = g_inv.get(&[k, m]);
        acc = acc.add(&g.get(&[l, i]).mul(x.get(&[j, m])).mul(gk));
        acc = acc.sub(&g.get(&[l, j]).mul(x.get(&[i, m])).mul(gk));
    }
    acc
}

/// Expanded projective glue:
/// `(2/(n-1)) δ_[i^k Φ_j]l + (2R/(n(n-1))) δ_[i^k g_j]l
///  + (2/(n+1)) δ_[i^k φ_j]l - (2/(n+1)) δ_l^k φ_ij`.
pub fn glue_projective_expanded<T: Coeff>(parts: &RicciParts<T>, g: &Tensor<T>) -> Tensor<T> {
    let n = g.dim() as f64;
    let r = parts.scalar.scale(1.0 / (n * (n - 1.0)));
    Tensor::from_fn(g.dim(), SLOTS.to_vec(), |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = delta_wedge(&parts.phi, i, j, k, l)
            .scale(1.0 / (n - 1.0))
            .add(&r.mul(&delta_wedge(g, i, j, k, l)))
            .add(&delta_wedge(&parts.varphi, i, j, k, l).scale(1.0 / (n + 1.0)));
        if k == l {
            acc = acc.sub(&parts.varphi.get(&[i, j]).scale(2.0 / (n + 1.0)));
        }
        acc
    })
}

/// Expanded conformal glue:
/// `(2/(n-2)) δ_[i^k Φ_j]l - (2/(n-2)) g_l[i Φ_j]m g^km + (2R/(n(n-1))) δ_[i^k g_j]l
///  + (2/n) δ_[i^k φ_j]l - (2/n) g_l[i φ_j]m g^km - (2/n) δ_l^k φ_ij`.
/// Requires `n ≥ 3`.
pub fn glue_conformal_expanded<T: Coeff>(
    parts: &RicciParts<T>,
    g: &Tensor<T>,
    g_inv: &Tensor<T>,
) -> Tensor<T> {
    let n = g.dim() as f64;
    assert!(g.dim() >= 3, "expanded conformal glue needs n ≥ 3");
    let r = parts.scalar.scale(1.0 / (n * (n - 1.0)));
    Tensor::from_fn(g.dim(), SLOTS.to_vec(), |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let phi_part = delta_wedge(&parts.phi, i, j, k, l)
            .sub(&metric_wedge(&parts.phi, g, g_inv, (i, j, k, l)))
            .scale(1.0 / (n - 2.0));
        let skew_part = delta_wedge(&parts.varphi, i, j, k, l)
            .sub(&metric_wedge(&parts.varphi, g, g_inv, (i, j, k, l)))
            .scale(1.0 / n);
        let mut acc = phi_part
            .add(&r.mul(&delta_wedge(g, i, j, k, l)))
            .add(&skew_part);
        if k == l {
            acc = acc.sub(&parts.varphi.get(&[i, j]).scale(2.0 / n));
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{ricci_decompose, schouten_conformal, schouten_projective};
    use crate::theorems::algebra::{random_metric, random_ricci};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_schouten_gives_zero_glue() {
        let z = Tensor::from_fn(4, vec![Slot::Down, Slot::Down], |_| 0.0);
        assert_eq!(glue_projective(&z).max_abs(), 0.0);
    }

    #[test]
    fn pure_trace_projective_glue() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (g, g_inv) = random_metric(&mut rng, 4);
        let lambda = 0.37;
        let rho = g.map(|x| lambda * x);
        let glue = glue_projective(&rho);
        // R = n(n-1)λ makes the scalar term of the expansion equal 2λ δ_[i^k g_j]l.
        let parts = RicciParts {
            phi: g.map(|_| 0.0),
            varphi: g.map(|_| 0.0),
            scalar: 12.0 * lambda,
        };
        let expanded = glue_projective_expanded(&parts, &g);
        assert!(glue.max_abs_diff(&expanded) < 1e-14);
        let _ = g_inv;
    }

    #[test]
    fn direct_and_expanded_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..=6 {
            for _ in 0..10 {
                let (g, g_inv) = random_metric(&mut rng, n);
                let ric = random_ricci(&mut rng, n, true);
                let parts = ricci_decompose(&ric, &g, &g_inv).unwrap();
                let rho = schouten_projective(&ric).unwrap();
                let p = schouten_conformal(&ric, &g, &g_inv).unwrap();
                let a = glue_projective(&rho);
                let b = glue_projective_expanded(&parts, &g);
                assert!(a.max_abs_diff(&b) < 1e-13, "n={n}");
                let a = glue_conformal(&p, &g, &g_inv);
                let b = glue_conformal_expanded(&parts, &g, &g_inv);
                assert!(a.max_abs_diff(&b) < 1e-13, "n={n}");
            }
        }
    }
}
