//! Dense component storage for tensors at a point.

use serde::Serialize;

use crate::jets::Jet;

/// Variance of one index slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Up,
    Down,
}

/// Row-major array of `n^rank` components with a variance signature.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    dim: usize,
    slots: Vec<Slot>,
    data: Vec<T>,
}

impl<T> Tensor<T> {
    pub fn from_vec(dim: usize, slots: Vec<Slot>, data: Vec<T>) -> Tensor<T> {
        assert_eq!(data.len(), dim.pow(slots.len() as u32), "component count");
        Tensor { dim, slots, data }
    }

    pub fn from_fn(dim: usize, slots: Vec<Slot>, mut f: impl FnMut(&[usize]) -> T) -> Tensor<T> {
        let rank = slots.len();
        let total = dim.pow(rank as u32);
        let mut index = vec![0; rank];
        let mut data = Vec::with_capacity(total);
        for _ in 0..total {
            data.push(f(&index));
            for slot in (0..rank).rev() {
                index[slot] += 1;
                if index[slot] < dim {
                    break;
                }
                index[slot] = 0;
            }
        }
        Tensor { dim, slots, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.slots.len());
        index.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, index: &[usize]) -> &T {
        &self.data[self.offset(index)]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Tensor<U> {
        Tensor {
            dim: self.dim,
            slots: self.slots.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.dim; self.slots.len()]
    }
}

impl Tensor<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Componentwise `max |self - other|`.
    pub fn max_abs_diff(&self, other: &Tensor<f64>) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Tensor<Jet> {
    pub fn values(&self) -> Tensor<f64> {
        self.map(Jet::value)
    }
}

/// Arithmetic shared by plain and jet-valued components, so the algebraic
/// curvature formulas can be written once.
pub trait Coeff: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn value(&self) -> f64;
}

impl Coeff for f64 {
    fn zero_like(&self) -> f64 {
        0.0
    }
    fn add(&self, other: &f64) -> f64 {
        self + other
    }
    fn sub(&self, other: &f64) -> f64 {
        self - other
    }
    fn mul(&self, other: &f64) -> f64 {
        self * other
    }
    fn scale(&self, c: f64) -> f64 {
        self * c
    }
    fn value(&self) -> f64 {
        *self
    }
}

impl Coeff for Jet {
    fn zero_like(&self) -> Jet {
        Jet::zero(self.dim(), self.order())
    }
    fn add(&self, other: &Jet) -> Jet {
        self + other
    }
    fn sub(&self, other: &Jet) -> Jet {
        self - other
    }
    fn mul(&self, other: &Jet) -> Jet {
        self * other
    }
    fn scale(&self, c: f64) -> Jet {
        Jet::scale(self, c)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let t = Tensor::from_fn(3, vec![Slot::Down, Slot::Up, Slot::Down], |ix| {
            (ix[0] * 100 + ix[1] * 10 + ix[2]) as f64
        });
        assert_eq!(t.data().len(), 27);
        assert_eq!(*t.get(&[2, 1, 0]), 210.0);
        assert_eq!(t.offset(&[1, 0, 2]), 9 + 2);
        assert_eq!(t.data()[5], 12.0);
    }

    #[test]
    fn norms() {
        let a = Tensor::from_vec(2, vec![Slot::Down, Slot::Down], vec![3.0, 0.0, -4.0, 0.0]);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.max_abs(), 4.0);
        let b = a.map(|x| x + 0.5);
        assert_eq!(a.max_abs_diff(&b), 0.5);
    }
}
