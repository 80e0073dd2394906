//! Charts, metric fields, general Weyl structures and torsion-free
//! connections, with the projective and conformal connection changes.
//!
//! Index conventions: `Γ^k_ij` is stored at `[k][i][j]`; matrices are
//! row-major `[i][j]`.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::exprdsl::{eval_jet, EvalEnv, EvalError, Expr};
use crate::jets::{Jet, JetError};
use crate::tensor::{Slot, Tensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("chart dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("duplicate coordinate name `{0}`")]
    DuplicateCoordinate(String),
    #[error("invalid coordinate name `{0}`")]
    BadCoordinateName(String),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("point has {got} coordinates, chart has {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("metric is singular at the point (|det g| = {det:e}, floor {floor:e})")]
    SingularMetric { det: f64, floor: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// A single coordinate system.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    coord_names: Vec<String>,
    validity_hint: Option<String>,
}

impl Chart {
    pub fn new(
        coord_names: Vec<String>,
        validity_hint: Option<String>,
    ) -> Result<Chart, GeometryError> {
        if coord_names.len() < 2 {
            return Err(GeometryError::DimensionTooSmall(coord_names.len()));
        }
        let mut seen = HashSet::new();
        for name in &coord_names {
            let valid = name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(GeometryError::BadCoordinateName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(GeometryError::DuplicateCoordinate(name.clone()));
            }
        }
        Ok(Chart {
            coord_names,
            validity_hint,
        })
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coord_names
    }

    pub fn validity_hint(&self) -> Option<&str> {
        self.validity_hint.as_deref()
    }
}

/// Index of `(i, j)` in the packed upper triangle.
pub(crate) fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * (2 * n + 1 - a) / 2 + (b - a)
}

/// Expression-defined metric `g_ij(x)`. Only the upper triangle is stored,
/// so symmetry holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    chart: Chart,
    upper: Vec<Expr>,
    params: BTreeMap<String, f64>,
}

impl MetricField {
    /// `upper` lists `g_ij` for `i ≤ j` in row order.
    pub fn new(
        chart: Chart,
        upper: Vec<Expr>,
        params: BTreeMap<String, f64>,
    ) -> Result<MetricField, GeometryError> {
        let n = chart.dim();
        let expected = n * (n + 1) / 2;
        if upper.len() != expected {
            return Err(GeometryError::ComponentCount {
                expected,
                got: upper.len(),
            });
        }
        if let Some(name) = chart.coord_names().iter().find(|c| params.contains_key(*c)) {
            return Err(EvalError::Ambiguous(name.clone()).into());
        }
        Ok(MetricField {
            chart,
            upper,
            params,
        })
    }

    /// Diagonal metric from one expression per coordinate.
    pub fn diagonal(
        chart: Chart,
        diag: Vec<Expr>,
        params: BTreeMap<String, f64>,
    ) -> Result<MetricField, GeometryError> {
        let n = chart.dim();
        if diag.len() != n {
            return Err(GeometryError::ComponentCount {
                expected: n,
                got: diag.len(),
            });
        }
        let mut diag = diag.into_iter();
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(if i == j {
                    diag.next().unwrap()
                } else {
                    Expr::num(0.0)
                });
            }
        }
        MetricField::new(chart, upper, params)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.upper[upper_index(self.dim(), i, j)]
    }

    /// Replaces every component by `factor * g_ij`.
    pub fn rescaled(&self, factor: &Expr) -> MetricField {
        use crate::exprdsl::BinaryOp;
        MetricField {
            chart: self.chart.clone(),
            upper: self
                .upper
                .iter()
                .map(|g| Expr::binary(BinaryOp::Mul, factor.clone(), g.clone()))
                .collect(),
            params: self.params.clone(),
        }
    }

    pub fn env(&self, point: &[f64], order: usize) -> Result<EvalEnv, GeometryError> {
        if point.len() != self.dim() {
            return Err(GeometryError::PointDimension {
                expected: self.dim(),
                got: point.len(),
            });
        }
        Ok(EvalEnv::at_point(
            self.chart.coord_names(),
            point,
            order,
            &self.params,
        )?)
    }

    /// Metric, inverse metric and determinant as jets of `order` at `point`.
    pub fn at(&self, point: &[f64], order: usize) -> Result<MetricAtPoint, GeometryError> {
        let env = self.env(point, order)?;
        let n = self.dim();
        let mut packed = Vec::with_capacity(self.upper.len());
        for e in &self.upper {
            packed.push(eval_jet(e, &env)?);
        }
        let g = Tensor::from_fn(n, vec![Slot::Down, Slot::Down], |ix| {
            packed[upper_index(n, ix[0], ix[1])].clone()
        });
        let (g_inv, det) = invert(&g)?;
        Ok(MetricAtPoint {
            point: point.to_vec(),
            order,
            g,
            g_inv,
            det,
        })
    }

    /// Evaluates a list of expressions (a one-form) as jets at `point`.
    pub fn one_form_at(
        &self,
        form: &[Expr],
        point: &[f64],
        order: usize,
    ) -> Result<Vec<Jet>, GeometryError> {
        let n = self.dim();
        if form.len() != n {
            return Err(GeometryError::ComponentCount {
                expected: n,
                got: form.len(),
            });
        }
        let env = self.env(point, order)?;
        form.iter()
            .map(|e| eval_jet(e, &env).map_err(GeometryError::from))
            .collect()
    }
}

/// Jet-valued Gauss-Jordan inversion with partial pivoting on values.
fn invert(g: &Tensor<Jet>) -> Result<(Tensor<Jet>, Jet), GeometryError> {
    let n = g.dim();
    let proto = &g.data()[0];
    let (dim, order) = (proto.dim(), proto.order());
    let scale = g
        .data()
        .iter()
        .fold(0.0f64, |m, x| m.max(x.value().abs()))
        .max(f64::MIN_POSITIVE);
    let floor = 1e-12 * scale.powi(n as i32);

    let mut a: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| g.get(&[i, j]).clone()).collect())
        .collect();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(dim, order, if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    let mut det = Jet::constant(dim, order, 1.0);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].value().abs().total_cmp(&a[q][col].value().abs()))
            .unwrap();
        if a[pivot][col].value() == 0.0 {
            return Err(GeometryError::SingularMetric { det: 0.0, floor });
        }
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = det.scale(-1.0);
        }
        let p = a[col][col].clone();
        det = &det * &p;
        for j in 0..n {
            a[col][j] = a[col][j].div(&p)?;
            inv[col][j] = inv[col][j].div(&p)?;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r][col].clone();
            if factor.max_abs() == 0.0 {
                continue;
            }
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&factor * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&factor * &inv[col][j]);
            }
        }
    }
    if det.value().abs() <= floor {
        return Err(GeometryError::SingularMetric {
            det: det.value().abs(),
            floor,
        });
    }
    let g_inv = Tensor::from_fn(n, vec![Slot::Up, Slot::Up], |ix| inv[ix[0]][ix[1]].clone());
    Ok((g_inv, det))
}

/// Metric data at one point.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub point: Vec<f64>,
    pub order: usize,
    pub g: Tensor<Jet>,
    pub g_inv: Tensor<Jet>,
    pub det: Jet,
}

impl MetricAtPoint {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn g_values(&self) -> Tensor<f64> {
        self.g.values()
    }

    pub fn g_inv_values(&self) -> Tensor<f64> {
        self.g_inv.values()
    }

    /// Metric and inverse truncated to `order`.
    pub fn truncated(&self, order: usize) -> (Tensor<Jet>, Tensor<Jet>) {
        (
            self.g.map(|x| x.truncate(order)),
            self.g_inv.map(|x| x.truncate(order)),
        )
    }
}

/// A metric together with the one-form `f` of a general Weyl connection,
/// `∇_i g_kl = -2 f_i g_kl`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylStructure {
    metric: MetricField,
    one_form: Vec<Expr>,
}

impl WeylStructure {
    pub fn new(metric: MetricField, one_form: Vec<Expr>) -> Result<WeylStructure, GeometryError> {
        if one_form.len() != metric.dim() {
            return Err(GeometryError::ComponentCount {
                expected: metric.dim(),
                got: one_form.len(),
            });
        }
        Ok(WeylStructure { metric, one_form })
    }

    /// The Levi-Civita case, `f = 0`.
    pub fn levi_civita(metric: MetricField) -> WeylStructure {
        let n = metric.dim();
        WeylStructure {
            metric,
            one_form: vec![Expr::num(0.0); n],
        }
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn one_form(&self) -> &[Expr] {
        &self.one_form
    }

    pub fn is_levi_civita(&self) -> bool {
        self.one_form.iter().all(Expr::is_zero_literal)
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Projective,
    Conformal,
}

/// A connection change `Γ → Γ + Σ·b` (projective) or `Γ → Γ + S·b`
/// (conformal) by an expression-valued one-form.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionChange {
    pub kind: ChangeKind,
    pub b: Vec<Expr>,
}

/// The algebraic projectors `Σ^{kl}_{ij}` and `S^{kl}_{ij}` at a point.
#[derive(Debug, Clone)]
pub struct Projectors {
    n: usize,
    g: Tensor<f64>,
    g_inv: Tensor<f64>,
}

pub fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

impl Projectors {
    pub fn new(g: Tensor<f64>, g_inv: Tensor<f64>) -> Projectors {
        Projectors {
            n: g.dim(),
            g,
            g_inv,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Σ^{kl}_{ij} = δ^k_i δ^l_j + δ^l_i δ^k_j`.
    pub fn sigma(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        delta(k, i) * delta(l, j) + delta(l, i) * delta(k, j)
    }

    /// `S^{kl}_{ij} = Σ^{kl}_{ij} - g_ij g^{kl}`.
    pub fn s(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        self.sigma(k, l, i, j) - self.g.get(&[i, j]) * self.g_inv.get(&[k, l])
    }

    /// Dense `Σ` with slot order `[k][l][i][j]`.
    pub fn sigma_tensor(&self) -> Tensor<f64> {
        Tensor::from_fn(
            self.n,
            vec![Slot::Up, Slot::Up, Slot::Down, Slot::Down],
            |x| self.sigma(x[0], x[1], x[2], x[3]),
        )
    }

    /// Dense `S` with slot order `[k][l][i][j]`.
    pub fn s_tensor(&self) -> Tensor<f64> {
        Tensor::from_fn(
            self.n,
            vec![Slot::Up, Slot::Up, Slot::Down, Slot::Down],
            |x| self.s(x[0], x[1], x[2], x[3]),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionKind {
    LeviCivita,
    Weyl,
    Changed,
}

/// Jet-valued coefficients `Γ^k_ij` of a torsion-free connection at a point.
#[derive(Debug, Clone)]
pub struct Connection {
    pub kind: ConnectionKind,
    gamma: Tensor<Jet>,
}

impl Connection {
    /// Symmetrizes the lower pair so `Γ^k_ij = Γ^k_ji` holds exactly.
    pub fn from_fn(
        n: usize,
        kind: ConnectionKind,
        f: impl Fn(usize, usize, usize) -> Jet,
    ) -> Connection {
        let mut data: Vec<Option<Jet>> = vec![None; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = f(k, i, j);
                    data[(k * n + j) * n + i] = Some(v.clone());
                    data[(k * n + i) * n + j] = Some(v);
                }
            }
        }
        let gamma = Tensor::from_vec(
            n,
            vec![Slot::Up, Slot::Down, Slot::Down],
            data.into_iter().map(Option::unwrap).collect(),
        );
        Connection { kind, gamma }
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Jet {
        self.gamma.get(&[k, i, j])
    }

    pub fn coefficients(&self) -> &Tensor<Jet> {
        &self.gamma
    }

    pub fn order(&self) -> usize {
        self.gamma.data()[0].order()
    }

    pub fn values(&self) -> Tensor<f64> {
        self.gamma.values()
    }
}

/// Levi-Civita connection `Γ^k_ij = ½ g^{km}(∂_i g_jm + ∂_j g_im - ∂_m g_ij)`.
/// The result carries jets one order below `metric`.
pub fn levi_civita(metric: &MetricAtPoint) -> Result<Connection, GeometryError> {
    let n = metric.dim();
    let order = metric
        .order
        .checked_sub(1)
        .ok_or(JetError::OrderExhausted)?;
    // dg[m][i][j] = ∂_m g_ij
    let mut dg = Vec::with_capacity(n * n * n);
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                dg.push(metric.g.get(&[i, j]).differentiate(m)?);
            }
        }
    }
    let d = |m: usize, i: usize, j: usize| &dg[(m * n + i) * n + j];
    let (_, g_inv) = metric.truncated(order);
    Ok(Connection::from_fn(
        n,
        ConnectionKind::LeviCivita,
        |k, i, j| {
            let mut acc = Jet::zero(metric.g.data()[0].dim(), order);
            for m in 0..n {
                let christoffel_first = &(d(i, j, m) + d(j, i, m)) - d(m, i, j);
                acc = &acc + &(g_inv.get(&[k, m]) * &christoffel_first);
            }
            acc.scale(0.5)
        },
    ))
}

/// `S^{kl}_{ij} b_l = δ^k_i b_j + δ^k_j b_i - g_ij g^{kl} b_l` (or the
/// `Σ` version without the metric term), jet-valued.
fn contract_change(
    kind: ChangeKind,
    b: &[Jet],
    g: &Tensor<Jet>,
    g_inv: &Tensor<Jet>,
    k: usize,
    i: usize,
    j: usize,
) -> Jet {
    let n = b.len();
    let mut out = Jet::zero(b[0].dim(), b[0].order());
    if k == i {
        out = &out + &b[j];
    }
    if k == j {
        out = &out + &b[i];
    }
    if kind == ChangeKind::Conformal {
        let mut raised = Jet::zero(b[0].dim(), b[0].order());
        for l in 0..n {
            raised = &raised + &(g_inv.get(&[k, l]) * &b[l]);
        }
        out = &out - &(g.get(&[i, j]) * &raised);
    }
    out
}

/// General Weyl connection `Γ = Γ_LC + S^{kl}_{ij} f_l`.
pub fn weyl_connection(
    ws: &WeylStructure,
    metric: &MetricAtPoint,
) -> Result<Connection, GeometryError> {
    let lc = levi_civita(metric)?;
    if ws.is_levi_civita() {
        return Ok(lc);
    }
    let f = ws
        .metric()
        .one_form_at(ws.one_form(), &metric.point, lc.order())?;
    let mut conn = apply_change_jets(&lc, ChangeKind::Conformal, &f, metric);
    conn.kind = ConnectionKind::Weyl;
    Ok(conn)
}

/// Base connection of a structure: Levi-Civita when `f = 0`, otherwise the
/// Weyl connection.
pub fn connection_for(
    ws: &WeylStructure,
    metric: &MetricAtPoint,
) -> Result<Connection, GeometryError> {
    weyl_connection(ws, metric)
}

/// Applies a change by an already-evaluated jet one-form.
pub fn apply_change_jets(
    conn: &Connection,
    kind: ChangeKind,
    b: &[Jet],
    metric: &MetricAtPoint,
) -> Connection {
    let order = conn.order();
    let b: Vec<Jet> = b.iter().map(|x| x.truncate(order)).collect();
    let (g, g_inv) = metric.truncated(order);
    Connection::from_fn(conn.dim(), ConnectionKind::Changed, |k, i, j| {
        conn.gamma(k, i, j) + &contract_change(kind, &b, &g, &g_inv, k, i, j)
    })
}

/// `Γ + Σ^{kl}_{ij} b_l` or `Γ + S^{kl}_{ij} b_l` with `b` given by
/// expressions in the metric's chart.
pub fn apply_change(
    conn: &Connection,
    change: &ConnectionChange,
    metric_field: &MetricField,
    metric: &MetricAtPoint,
) -> Result<Connection, GeometryError> {
    let b = metric_field.one_form_at(&change.b, &metric.point, conn.order())?;
    Ok(apply_change_jets(conn, change.kind, &b, metric))
}

/// `max |∂_i g_kl - Γ^m_ik g_ml - Γ^m_il g_km + 2 f_i g_kl|` at the point.
pub fn check_compatibility(
    conn: &Connection,
    ws: &WeylStructure,
    point: &[f64],
) -> Result<f64, GeometryError> {
    let metric = ws.metric().at(point, 1)?;
    let f = ws.metric().one_form_at(ws.one_form(), point, 0)?;
    let n = metric.dim();
    let g = metric.g_values();
    let gamma = conn.values();
    let mut worst = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            for l in 0..n {
                let mut r = metric.g.get(&[k, l]).derivative(&[i])?;
                for m in 0..n {
                    r -= gamma.get(&[m, i, k]) * g.get(&[m, l]);
                    r -= gamma.get(&[m, i, l]) * g.get(&[k, m]);
                }
                r += 2.0 * f[i].value() * g.get(&[k, l]);
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprdsl::parse;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn diag_metric(coords: &[&str], diag: &[&str]) -> MetricField {
        let chart = Chart::new(names(coords), None).unwrap();
        MetricField::diagonal(
            chart,
            diag.iter().map(|s| parse(s).unwrap()).collect(),
            BTreeMap::new(),
        )
        .unwrap()
    }

    fn euclid4() -> MetricField {
        diag_metric(&["x1", "x2", "x3", "x4"], &["1", "1", "1", "1"])
    }

    #[test]
    fn chart_validation() {
        assert_eq!(
            Chart::new(names(&["x"]), None).unwrap_err(),
            GeometryError::DimensionTooSmall(1)
        );
        assert_eq!(
            Chart::new(names(&["x", "x"]), None).unwrap_err(),
            GeometryError::DuplicateCoordinate("x".into())
        );
        assert!(Chart::new(names(&["x", "1y"]), None).is_err());
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let m = euclid4().at(&[0.3, -1.0, 2.0, 0.0], 3).unwrap();
        assert_eq!(m.det.value(), 1.0);
        for i in 0..4 {
            for j in 0..4 {
                let gij = m.g.get(&[i, j]);
                assert_eq!(gij.value(), delta(i, j));
                assert!(gij.coeffs()[1..].iter().all(|&c| c == 0.0));
            }
        }
    }

    #[test]
    fn stereographic_sphere_at_origin() {
        let m = diag_metric(&["x", "y"], &["4/(1+x^2+y^2)^2", "4/(1+x^2+y^2)^2"])
            .at(&[0.0, 0.0], 3)
            .unwrap();
        assert_eq!(m.g.get(&[0, 0]).value(), 4.0);
        assert_eq!(m.det.value(), 16.0);
    }

    #[test]
    fn schwarzschild_time_component() {
        let chart = Chart::new(names(&["t", "r", "th", "ph"]), Some("r > 2M".into())).unwrap();
        let params = [("M".to_string(), 1.0)].into_iter().collect();
        let metric = MetricField::diagonal(
            chart,
            ["-(1-2*M/r)", "1/(1-2*M/r)", "r^2", "r^2*sin(th)^2"]
                .iter()
                .map(|s| parse(s).unwrap())
                .collect(),
            params,
        )
        .unwrap();
        let m = metric.at(&[0.0, 4.0, 1.0, 0.0], 3).unwrap();
        assert_eq!(m.g.get(&[0, 0]).value(), -0.5);
    }

    #[test]
    fn singular_metric_rejected() {
        let m = diag_metric(&["x", "y"], &["x", "1"]);
        assert!(matches!(
            m.at(&[0.0, 1.0], 2),
            Err(GeometryError::SingularMetric { .. })
        ));
    }

    #[test]
    fn inverse_matches_at_every_order() {
        let chart = Chart::new(names(&["u", "v", "w"]), None).unwrap();
        let upper = [
            "2+u^2",
            "sin(v)*0.3",
            "u*w*0.1",
            "1+exp(w)",
            "0.2*u",
            "3+v^2",
        ]
        .iter()
        .map(|s| parse(s).unwrap())
        .collect();
        let metric = MetricField::new(chart, upper, BTreeMap::new()).unwrap();
        let m = metric.at(&[0.4, -0.7, 0.2], 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Jet::zero(3, 3);
                for k in 0..3 {
                    acc = &acc + &(m.g.get(&[i, k]) * m.g_inv.get(&[k, j]));
                }
                let acc = acc.add_constant(-delta(i, j));
                assert!(acc.max_abs() < 1e-13, "{acc:?}");
            }
        }
    }

    #[test]
    fn euclidean_levi_civita_vanishes() {
        let m = euclid4().at(&[1.0, 2.0, 3.0, 4.0], 3).unwrap();
        let lc = levi_civita(&m).unwrap();
        assert_eq!(lc.order(), 2);
        assert!(lc.coefficients().data().iter().all(|j| j.max_abs() == 0.0));
    }

    #[test]
    fn polar_sphere_christoffels() {
        let metric = diag_metric(&["th", "ph"], &["1", "sin(th)^2"]);
        let th = std::f64::consts::FRAC_PI_4;
        let lc = levi_civita(&metric.at(&[th, 0.3], 3).unwrap()).unwrap();
        assert!((lc.gamma(0, 1, 1).value() + 0.5).abs() < 1e-15);
        assert!((lc.gamma(1, 0, 1).value() - 1.0).abs() < 1e-15);
        assert!((lc.gamma(1, 1, 0).value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weyl_connection_from_s_contraction() {
        let ws = WeylStructure::new(
            euclid4(),
            ["0", "x1", "0", "0"]
                .iter()
                .map(|s| parse(s).unwrap())
                .collect(),
        )
        .unwrap();
        let point = [1.0, 1.0, 1.0, 1.0];
        let m = ws.metric().at(&point, 3).unwrap();
        let conn = weyl_connection(&ws, &m).unwrap();
        assert_eq!(conn.kind, ConnectionKind::Weyl);
        // f = (0, 1, 0, 0): Γ^k_ij = δ^k_i f_j + δ^k_j f_i - δ_ij f^k.
        let f = [0.0, 1.0, 0.0, 0.0];
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    let expect = delta(k, i) * f[j] + delta(k, j) * f[i] - delta(i, j) * f[k];
                    assert_eq!(conn.gamma(k, i, j).value(), expect, "{k}{i}{j}");
                }
            }
        }
        assert_eq!(conn.gamma(1, 0, 0).value(), -1.0);
        assert_eq!(conn.gamma(1, 1, 1).value(), 1.0);
        assert!(check_compatibility(&conn, &ws, &point).unwrap() <= 1e-12);
    }

    #[test]
    fn zero_one_form_gives_levi_civita() {
        let metric = diag_metric(&["a", "b"], &["1+a^2", "2+sin(b)"]);
        let ws = WeylStructure::levi_civita(metric);
        let m = ws.metric().at(&[0.3, 0.2], 3).unwrap();
        let a = weyl_connection(&ws, &m).unwrap();
        let b = levi_civita(&m).unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
        assert!(check_compatibility(&a, &ws, &[0.3, 0.2]).unwrap() <= 1e-12);
    }

    #[test]
    fn levi_civita_fails_weyl_compatibility_by_two_f_g() {
        let metric = diag_metric(&["a", "b"], &["2", "3"]);
        let ws =
            WeylStructure::new(metric, vec![parse("0.5").unwrap(), parse("0").unwrap()]).unwrap();
        let m = ws.metric().at(&[0.0, 0.0], 3).unwrap();
        let lc = levi_civita(&m).unwrap();
        let r = check_compatibility(&lc, &ws, &[0.0, 0.0]).unwrap();
        assert_eq!(r, 2.0 * 0.5 * 3.0);
    }

    #[test]
    fn projective_change_by_constant() {
        let metric = euclid4();
        let m = metric.at(&[0.0; 4], 3).unwrap();
        let lc = levi_civita(&m).unwrap();
        let c = 0.7;
        let change = ConnectionChange {
            kind: ChangeKind::Projective,
            b: vec![Expr::num(c), Expr::num(0.0), Expr::num(0.0), Expr::num(0.0)],
        };
        let changed = apply_change(&lc, &change, &metric, &m).unwrap();
        assert_eq!(changed.gamma(0, 0, 0).value(), 2.0 * c);
        assert_eq!(changed.gamma(1, 0, 1).value(), c);
        assert_eq!(changed.gamma(1, 1, 1).value(), 0.0);

        let zero = ConnectionChange {
            kind: ChangeKind::Projective,
            b: vec![Expr::num(0.0); 4],
        };
        let same = apply_change(&lc, &zero, &metric, &m).unwrap();
        assert_eq!(same.coefficients(), lc.coefficients());
    }

    #[test]
    fn conformal_change_reproduces_weyl_connection() {
        let metric = diag_metric(&["x", "y", "z"], &["1+y^2", "2+x*z", "exp(x)"]);
        let form: Vec<Expr> = ["x*y", "z", "sin(x)"]
            .iter()
            .map(|s| parse(s).unwrap())
            .collect();
        let ws = WeylStructure::new(metric.clone(), form.clone()).unwrap();
        let point = [0.2, 0.4, 0.5];
        let m = metric.at(&point, 3).unwrap();
        let lc = levi_civita(&m).unwrap();
        let changed = apply_change(
            &lc,
            &ConnectionChange {
                kind: ChangeKind::Conformal,
                b: form,
            },
            &metric,
            &m,
        )
        .unwrap();
        let weyl = weyl_connection(&ws, &m).unwrap();
        assert_eq!(changed.coefficients().data(), weyl.coefficients().data());
        assert!(check_compatibility(&weyl, &ws, &point).unwrap() <= 1e-12);
    }

    #[test]
    fn s_trace_identity() {
        let metric = diag_metric(&["x", "y", "z"], &["1+y^2", "2+x*z", "exp(x)"]);
        let m = metric.at(&[0.1, 0.9, -0.4], 0).unwrap();
        let p = Projectors::new(m.g_values(), m.g_inv_values());
        let g = m.g_values();
        for i in 0..3 {
            for j in 0..3 {
                let mut tr = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        tr += p.s(k, l, i, j) * g.get(&[k, l]);
                        assert_eq!(p.sigma(k, l, i, j), p.sigma(l, k, i, j));
                        assert_eq!(p.sigma(k, l, i, j), p.sigma(k, l, j, i));
                    }
                }
                assert!((tr - (2.0 - 3.0) * g.get(&[i, j])).abs() < 1e-12);
            }
        }
    }
}
