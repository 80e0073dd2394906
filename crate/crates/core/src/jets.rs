//! Truncated multivariate Taylor arithmetic ("jets") up to third order.
//!
//! A [`Jet`] stores the value of a function together with every raw partial
//! derivative `∂^α f(x₀)` for `|α| ≤ order`, one entry per sorted
//! multi-index. Coefficients are *not* divided by `α!`; the combinatorial
//! weights of the Leibniz and Faà di Bruno rules are written out explicitly
//! in the product, quotient and composition routines below.
//!
//! Layout of `coeffs` for dimension `n`:
//!
//! ```text
//! [ f | f_0 .. f_{n-1} | f_ij (i ≤ j) | f_ijk (i ≤ j ≤ k) ]
//! ```

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Highest supported derivative order.
pub const MAX_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("variable index {index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("jet order {0} exceeds the supported maximum of 3")]
    OrderTooHigh(usize),
    #[error("multi-index of degree {degree} exceeds jet order {order}")]
    DegreeTooHigh { degree: usize, order: usize },
    #[error("multi-index has {got} entries, expected {dim}")]
    MultiIndexLength { got: usize, dim: usize },
    #[error("singular evaluation in {function} at {value}")]
    Singular { function: &'static str, value: f64 },
    #[error("derivative of an order-0 jet")]
    OrderExhausted,
}

/// Elementary functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elementary {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Neg => "neg",
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Tan => "tan",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Sqrt => "sqrt",
            Elementary::Sinh => "sinh",
            Elementary::Cosh => "cosh",
            Elementary::Tanh => "tanh",
        }
    }

    /// Plain-number evaluation with the same domain rules as the jet version.
    pub fn apply_f64(self, x: f64) -> Result<f64, JetError> {
        Ok(self.derivatives(x, 0)?[0])
    }

    /// Value and the first three derivatives of the function at `x`.
    /// Entries above `order` are left at zero.
    fn derivatives(self, x: f64, order: usize) -> Result<[f64; 4], JetError> {
        let singular = |function| JetError::Singular { function, value: x };
        let d = match self {
            Elementary::Neg => [-x, -1.0, 0.0, 0.0],
            Elementary::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s, -c]
            }
            Elementary::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c, s]
            }
            Elementary::Tan => {
                if x.cos() == 0.0 {
                    return Err(singular("tan"));
                }
                let t = x.tan();
                let sec2 = 1.0 + t * t;
                [t, sec2, 2.0 * t * sec2, (2.0 + 6.0 * t * t) * sec2]
            }
            Elementary::Exp => {
                let e = x.exp();
                [e, e, e, e]
            }
            Elementary::Log => {
                if x.is_nan() || x <= 0.0 {
                    return Err(singular("log"));
                }
                let r = 1.0 / x;
                [x.ln(), r, -r * r, 2.0 * r * r * r]
            }
            Elementary::Sqrt => {
                if x.is_nan() || x <= 0.0 {
                    return Err(singular("sqrt"));
                }
                let s = x.sqrt();
                if order == 0 {
                    [s, 0.0, 0.0, 0.0]
                } else {
                    let r = 1.0 / s;
                    [s, 0.5 * r, -0.25 * r * r * r, 0.375 * r * r * r * r * r]
                }
            }
            Elementary::Sinh => {
                let (sh, ch) = (x.sinh(), x.cosh());
                [sh, ch, sh, ch]
            }
            Elementary::Cosh => {
                let (sh, ch) = (x.sinh(), x.cosh());
                [ch, sh, ch, sh]
            }
            Elementary::Tanh => {
                let t = x.tanh();
                let sech2 = 1.0 - t * t;
                [t, sech2, -2.0 * t * sech2, (6.0 * t * t - 2.0) * sech2]
            }
        };
        Ok(d)
    }
}

/// Position of the sorted pair `(i, j)`, `i ≤ j`, among all sorted pairs in
/// dimension `n`.
#[inline]
fn pair_rank(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * (2 * n + 1 - i) / 2 + (j - i)
}

/// Position of the sorted triple `(i, j, k)` among all sorted triples.
#[inline]
fn triple_rank(n: usize, i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i <= j && j <= k && k < n);
    let mut before = 0;
    for a in 0..i {
        let m = n - a;
        before += m * (m + 1) / 2;
    }
    before + pair_rank(n - i, j - i, k - i)
}

#[inline]
fn sort3(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    let mut v = [a, b, c];
    v.sort_unstable();
    (v[0], v[1], v[2])
}

/// Number of coefficients of a jet in `dim` variables truncated at `order`:
/// `C(dim + order, order)`.
pub fn coefficient_count(dim: usize, order: usize) -> usize {
    let mut count = 1;
    if order >= 1 {
        count += dim;
    }
    if order >= 2 {
        count += dim * (dim + 1) / 2;
    }
    if order >= 3 {
        count += dim * (dim + 1) * (dim + 2) / 6;
    }
    count
}

/// Value plus raw partial derivatives through `order` at a base point.
#[derive(Clone, PartialEq)]
pub struct Jet {
    dim: usize,
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    /// Constant function with value `value`.
    pub fn constant(dim: usize, order: usize, value: f64) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} > {MAX_ORDER}");
        let mut coeffs = vec![0.0; coefficient_count(dim, order)];
        coeffs[0] = value;
        Jet { dim, order, coeffs }
    }

    pub fn zero(dim: usize, order: usize) -> Self {
        Self::constant(dim, order, 0.0)
    }

    /// Jet of the coordinate function `x^var` at `point`.
    pub fn seed(point: &[f64], var: usize, order: usize) -> Result<Self, JetError> {
        if var >= point.len() {
            return Err(JetError::VariableOutOfRange {
                index: var,
                dim: point.len(),
            });
        }
        if order > MAX_ORDER {
            return Err(JetError::OrderTooHigh(order));
        }
        let mut jet = Self::constant(point.len(), order, point[var]);
        if order >= 1 {
            jet.coeffs[1 + var] = 1.0;
        }
        Ok(jet)
    }

    /// Builds a jet from its raw coefficient vector in the layout described
    /// in the module docs.
    pub fn from_coeffs(dim: usize, order: usize, coeffs: Vec<f64>) -> Result<Self, JetError> {
        if order > MAX_ORDER {
            return Err(JetError::OrderTooHigh(order));
        }
        assert_eq!(coeffs.len(), coefficient_count(dim, order));
        Ok(Jet { dim, order, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    fn off2(&self) -> usize {
        1 + self.dim
    }

    #[inline]
    fn off3(&self) -> usize {
        1 + self.dim + self.dim * (self.dim + 1) / 2
    }

    #[inline]
    fn d1(&self, i: usize) -> f64 {
        self.coeffs[1 + i]
    }

    #[inline]
    fn d2(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[self.off2() + pair_rank(self.dim, a, b)]
    }

    #[inline]
    fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        let (a, b, c) = sort3(i, j, k);
        self.coeffs[self.off3() + triple_rank(self.dim, a, b, c)]
    }

    /// Raw partial derivative with respect to the listed variables, e.g.
    /// `derivative(&[0, 0, 2])` is `∂₀∂₀∂₂ f`.
    pub fn derivative(&self, vars: &[usize]) -> Result<f64, JetError> {
        if vars.len() > self.order {
            return Err(JetError::DegreeTooHigh {
                degree: vars.len(),
                order: self.order,
            });
        }
        if let Some(&bad) = vars.iter().find(|&&v| v >= self.dim) {
            return Err(JetError::VariableOutOfRange {
                index: bad,
                dim: self.dim,
            });
        }
        Ok(match *vars {
            [] => self.value(),
            [i] => self.d1(i),
            [i, j] => self.d2(i, j),
            [i, j, k] => self.d3(i, j, k),
            _ => unreachable!(),
        })
    }

    /// Raw partial derivative `∂^α` for the multi-index `alpha`
    /// (`alpha[i]` = number of derivatives in variable `i`).
    pub fn partial(&self, alpha: &[usize]) -> Result<f64, JetError> {
        if alpha.len() != self.dim {
            return Err(JetError::MultiIndexLength {
                got: alpha.len(),
                dim: self.dim,
            });
        }
        let degree: usize = alpha.iter().sum();
        if degree > self.order {
            return Err(JetError::DegreeTooHigh {
                degree,
                order: self.order,
            });
        }
        let vars: Vec<usize> = alpha
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| std::iter::repeat_n(i, a))
            .collect();
        self.derivative(&vars)
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            dim: self.dim,
            order,
            coeffs: self.coeffs[..coefficient_count(self.dim, order)].to_vec(),
        }
    }

    /// The jet of `∂_var f`, one order lower.
    pub fn differentiate(&self, var: usize) -> Result<Jet, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderExhausted);
        }
        if var >= self.dim {
            return Err(JetError::VariableOutOfRange {
                index: var,
                dim: self.dim,
            });
        }
        let n = self.dim;
        let order = self.order - 1;
        let mut out = Jet::zero(n, order);
        out.coeffs[0] = self.d1(var);
        if order >= 1 {
            for i in 0..n {
                out.coeffs[1 + i] = self.d2(var, i);
            }
        }
        if order >= 2 {
            let base = out.off2();
            let mut slot = base;
            for i in 0..n {
                for j in i..n {
                    out.coeffs[slot] = self.d3(var, i, j);
                    slot += 1;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            dim: self.dim,
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add_constant(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// `self + c * other`, truncated to the lower order.
    pub fn add_scaled(&self, other: &Jet, c: f64) -> Jet {
        let (order, count) = self.common(other);
        let coeffs = (0..count)
            .map(|i| self.coeffs[i] + c * other.coeffs[i])
            .collect();
        Jet {
            dim: self.dim,
            order,
            coeffs,
        }
    }

    fn common(&self, other: &Jet) -> (usize, usize) {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        let order = self.order.min(other.order);
        (order, coefficient_count(self.dim, order))
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let (order, count) = self.common(other);
        let coeffs = (0..count)
            .map(|i| f(self.coeffs[i], other.coeffs[i]))
            .collect();
        Jet {
            dim: self.dim,
            order,
            coeffs,
        }
    }

    /// Leibniz product. Jets of different order multiply at the lower order.
    pub fn mul_jet(&self, g: &Jet) -> Jet {
        let f = self;
        let (order, _) = f.common(g);
        let n = f.dim;
        let mut out = Jet::zero(n, order);
        let (f0, g0) = (f.value(), g.value());
        out.coeffs[0] = f0 * g0;
        if order >= 1 {
            for i in 0..n {
                out.coeffs[1 + i] = f.d1(i) * g0 + f0 * g.d1(i);
            }
        }
        if order >= 2 {
            let mut slot = out.off2();
            for i in 0..n {
                for j in i..n {
                    out.coeffs[slot] =
                        f.d2(i, j) * g0 + f.d1(i) * g.d1(j) + f.d1(j) * g.d1(i) + f0 * g.d2(i, j);
                    slot += 1;
                }
            }
        }
        if order >= 3 {
            let mut slot = out.off3();
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        out.coeffs[slot] = f.d3(i, j, k) * g0
                            + f.d2(i, j) * g.d1(k)
                            + f.d2(i, k) * g.d1(j)
                            + f.d2(j, k) * g.d1(i)
                            + f.d1(i) * g.d2(j, k)
                            + f.d1(j) * g.d2(i, k)
                            + f.d1(k) * g.d2(i, j)
                            + f0 * g.d3(i, j, k);
                        slot += 1;
                    }
                }
            }
        }
        out
    }

    /// Quotient `self / b`, obtained by solving the product rule for the
    /// quotient coefficients order by order.
    pub fn div(&self, b: &Jet) -> Result<Jet, JetError> {
        let a = self;
        let b0 = b.value();
        if b0 == 0.0 {
            return Err(JetError::Singular {
                function: "div",
                value: b0,
            });
        }
        let (order, _) = a.common(b);
        let n = a.dim;
        let mut q = Jet::zero(n, order);
        let q0 = a.value() / b0;
        q.coeffs[0] = q0;
        if order >= 1 {
            for i in 0..n {
                q.coeffs[1 + i] = (a.d1(i) - q0 * b.d1(i)) / b0;
            }
        }
        if order >= 2 {
            let mut slot = q.off2();
            for i in 0..n {
                for j in i..n {
                    let rest = q.d1(i) * b.d1(j) + q.d1(j) * b.d1(i) + q0 * b.d2(i, j);
                    q.coeffs[slot] = (a.d2(i, j) - rest) / b0;
                    slot += 1;
                }
            }
        }
        if order >= 3 {
            let mut slot = q.off3();
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let rest = q.d2(i, j) * b.d1(k)
                            + q.d2(i, k) * b.d1(j)
                            + q.d2(j, k) * b.d1(i)
                            + q.d1(i) * b.d2(j, k)
                            + q.d1(j) * b.d2(i, k)
                            + q.d1(k) * b.d2(i, j)
                            + q0 * b.d3(i, j, k);
                        q.coeffs[slot] = (a.d3(i, j, k) - rest) / b0;
                        slot += 1;
                    }
                }
            }
        }
        Ok(q)
    }

    /// Composes a univariate function, given its derivatives `[φ, φ', φ'', φ''']`
    /// at `self.value()`, with this jet.
    fn compose(&self, d: [f64; 4]) -> Jet {
        let a = self;
        let n = a.dim;
        let mut out = Jet::zero(n, a.order);
        out.coeffs[0] = d[0];
        if a.order >= 1 {
            for i in 0..n {
                out.coeffs[1 + i] = d[1] * a.d1(i);
            }
        }
        if a.order >= 2 {
            let mut slot = out.off2();
            for i in 0..n {
                for j in i..n {
                    out.coeffs[slot] = d[2] * a.d1(i) * a.d1(j) + d[1] * a.d2(i, j);
                    slot += 1;
                }
            }
        }
        if a.order >= 3 {
            let mut slot = out.off3();
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        out.coeffs[slot] = d[3] * a.d1(i) * a.d1(j) * a.d1(k)
                            + d[2]
                                * (a.d2(i, j) * a.d1(k)
                                    + a.d2(i, k) * a.d1(j)
                                    + a.d2(j, k) * a.d1(i))
                            + d[1] * a.d3(i, j, k);
                        slot += 1;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, function: Elementary) -> Result<Jet, JetError> {
        if function == Elementary::Neg {
            return Ok(self.scale(-1.0));
        }
        Ok(self.compose(function.derivatives(self.value(), self.order)?))
    }

    /// `self^c` for a real constant exponent; requires a positive base.
    pub fn powf(&self, c: f64) -> Result<Jet, JetError> {
        let x = self.value();
        if x.is_nan() || x <= 0.0 {
            return Err(JetError::Singular {
                function: "pow",
                value: x,
            });
        }
        let d = [
            x.powf(c),
            c * x.powf(c - 1.0),
            c * (c - 1.0) * x.powf(c - 2.0),
            c * (c - 1.0) * (c - 2.0) * x.powf(c - 3.0),
        ];
        Ok(self.compose(d))
    }

    /// Integer power by repeated squaring; valid for any base (negative
    /// exponents need a nonzero base).
    pub fn powi(&self, k: i32) -> Result<Jet, JetError> {
        let positive = repeated_square(
            self.clone(),
            k.unsigned_abs(),
            |a, b| a.mul_jet(b),
            || Jet::constant(self.dim, self.order, 1.0),
        );
        if k < 0 {
            Jet::constant(self.dim, self.order, 1.0).div(&positive)
        } else {
            Ok(positive)
        }
    }

    /// `self^e` with a jet-valued exponent, evaluated as `exp(e·log(self))`.
    pub fn pow(&self, e: &Jet) -> Result<Jet, JetError> {
        let log = self
            .apply(Elementary::Log)
            .map_err(|_| JetError::Singular {
                function: "pow",
                value: self.value(),
            })?;
        e.mul_jet(&log).apply(Elementary::Exp)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Exponentiation by squaring shared by the jet and plain-number paths so
/// both produce identical value slots.
pub(crate) fn repeated_square<T>(
    base: T,
    mut exp: u32,
    mul: impl Fn(&T, &T) -> T,
    one: impl Fn() -> T,
) -> T {
    let mut result: Option<T> = None;
    let mut base = base;
    while exp > 0 {
        if exp & 1 == 1 {
            result = Some(match result {
                None => mul(&one(), &base),
                Some(r) => mul(&r, &base),
            });
        }
        exp >>= 1;
        if exp > 0 {
            base = mul(&base, &base);
        }
    }
    result.unwrap_or_else(one)
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_at(x: f64) -> Jet {
        Jet::seed(&[x], 0, 3).unwrap()
    }

    fn univariate(j: &Jet) -> Vec<f64> {
        (0..=j.order())
            .map(|k| j.derivative(&vec![0; k]).unwrap())
            .collect()
    }

    #[test]
    fn seed_coordinate_function() {
        assert_eq!(univariate(&x_at(2.0)), vec![2.0, 1.0, 0.0, 0.0]);

        let j = Jet::seed(&[1.0, 5.0], 1, 2).unwrap();
        assert_eq!(j.value(), 5.0);
        assert_eq!(j.derivative(&[1]).unwrap(), 1.0);
        assert_eq!(j.derivative(&[0]).unwrap(), 0.0);
        assert!(j.coeffs()[3..].iter().all(|&c| c == 0.0));

        let j = Jet::seed(&[0.0], 0, 0).unwrap();
        assert_eq!(j.coeffs(), &[0.0]);
    }

    #[test]
    fn seed_rejects_bad_input() {
        assert!(matches!(
            Jet::seed(&[1.0], 1, 3),
            Err(JetError::VariableOutOfRange { .. })
        ));
        assert_eq!(Jet::seed(&[1.0], 0, 4), Err(JetError::OrderTooHigh(4)));
    }

    #[test]
    fn coefficient_count_matches_binomial() {
        assert_eq!(coefficient_count(4, 3), 35);
        assert_eq!(coefficient_count(1, 3), 4);
        assert_eq!(coefficient_count(6, 2), 28);
        assert_eq!(coefficient_count(5, 0), 1);
    }

    #[test]
    fn rank_tables_enumerate_in_order() {
        for n in 1..=6 {
            let mut expect = 0;
            for i in 0..n {
                for j in i..n {
                    assert_eq!(pair_rank(n, i, j), expect);
                    expect += 1;
                }
            }
            let mut expect = 0;
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        assert_eq!(triple_rank(n, i, j, k), expect);
                        expect += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn square_and_reciprocal() {
        let x = x_at(3.0);
        assert_eq!(univariate(&(&x * &x)), vec![9.0, 6.0, 2.0, 0.0]);

        let one = Jet::constant(1, 3, 1.0);
        let r = one.div(&x_at(2.0)).unwrap();
        assert_eq!(univariate(&r), vec![0.5, -0.25, 0.25, -0.375]);
    }

    #[test]
    fn add_negation_is_zero() {
        let a = x_at(1.7).apply(Elementary::Sin).unwrap();
        let z = &a + &(-&a);
        assert!(z.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn division_by_zero_value_is_singular() {
        let err = Jet::constant(1, 3, 1.0).div(&x_at(0.0)).unwrap_err();
        assert!(matches!(
            err,
            JetError::Singular {
                function: "div",
                ..
            }
        ));
    }

    #[test]
    fn maclaurin_values() {
        let z = x_at(0.0);
        assert_eq!(
            univariate(&z.apply(Elementary::Sin).unwrap()),
            vec![0.0, 1.0, 0.0, -1.0]
        );
        assert_eq!(
            univariate(&z.apply(Elementary::Exp).unwrap()),
            vec![1.0, 1.0, 1.0, 1.0]
        );
        assert_eq!(
            univariate(&x_at(4.0).apply(Elementary::Sqrt).unwrap()),
            vec![2.0, 0.25, -1.0 / 32.0, 3.0 / 256.0]
        );
    }

    #[test]
    fn domain_errors_name_the_function() {
        let err = x_at(-1.0).apply(Elementary::Log).unwrap_err();
        assert_eq!(
            err,
            JetError::Singular {
                function: "log",
                value: -1.0
            }
        );
        assert!(x_at(0.0).apply(Elementary::Sqrt).is_err());
        assert!(x_at(-2.0).powf(0.5).is_err());
    }

    #[test]
    fn partial_by_multi_index() {
        let x = x_at(3.0);
        let sq = &x * &x;
        assert_eq!(sq.partial(&[2]).unwrap(), 2.0);
        assert_eq!(sq.partial(&[0]).unwrap(), 9.0);
        assert_eq!(
            x_at(0.0)
                .apply(Elementary::Sin)
                .unwrap()
                .partial(&[3])
                .unwrap(),
            -1.0
        );
        assert!(matches!(
            Jet::seed(&[1.0], 0, 2).unwrap().partial(&[3]),
            Err(JetError::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn mixed_partials_of_product() {
        // f = x² y at (2, 3): f_xxy = 2, f_xy = 2x = 4, f_xx = 2y = 6.
        let p = [2.0, 3.0];
        let x = Jet::seed(&p, 0, 3).unwrap();
        let y = Jet::seed(&p, 1, 3).unwrap();
        let f = &(&x * &x) * &y;
        assert_eq!(f.value(), 12.0);
        assert_eq!(f.derivative(&[0, 0, 1]).unwrap(), 2.0);
        assert_eq!(f.derivative(&[1, 0, 0]).unwrap(), 2.0);
        assert_eq!(f.derivative(&[0, 1]).unwrap(), 4.0);
        assert_eq!(f.derivative(&[0, 0]).unwrap(), 6.0);
        assert_eq!(f.derivative(&[1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn differentiate_shifts_coefficients() {
        let p = [0.4, -0.3];
        let x = Jet::seed(&p, 0, 3).unwrap();
        let y = Jet::seed(&p, 1, 3).unwrap();
        let f = (&x * &y).apply(Elementary::Sin).unwrap();
        let fx = f.differentiate(0).unwrap();
        assert_eq!(fx.order(), 2);
        assert_eq!(fx.value(), f.derivative(&[0]).unwrap());
        assert_eq!(fx.derivative(&[1]).unwrap(), f.derivative(&[0, 1]).unwrap());
        assert_eq!(
            fx.derivative(&[1, 1]).unwrap(),
            f.derivative(&[0, 1, 1]).unwrap()
        );
        assert_eq!(
            Jet::constant(2, 0, 1.0).differentiate(0),
            Err(JetError::OrderExhausted)
        );
    }

    #[test]
    fn integer_powers() {
        let x = x_at(-1.5);
        let cube = x.powi(3).unwrap();
        assert_eq!(univariate(&cube), vec![-3.375, 6.75, -9.0, 6.0]);
        let inv = x.powi(-1).unwrap();
        assert!((inv.value() + 1.0 / 1.5).abs() < 1e-15);
        assert_eq!(x.powi(0).unwrap().coeffs(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn mixed_order_ops_truncate() {
        let a = Jet::seed(&[1.0, 2.0], 0, 3).unwrap();
        let b = Jet::seed(&[1.0, 2.0], 1, 1).unwrap();
        assert_eq!((&a * &b).order(), 1);
        assert_eq!((&a + &b).order(), 1);
    }
}
