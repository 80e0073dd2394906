//! Built-in metrics and Weyl structures, each with a safe sampling box and
//! an expected classification.

use std::collections::BTreeMap;

use crate::specfile::MetricSpec;
use crate::subject::{Classification, Subject};
use crate::Error;

/// Entry ids in sorted order.
pub const IDS: [&str; 11] = [
    "aniso4",
    "desitter_like5",
    "euclidean4",
    "flrw4",
    "generic3",
    "hyperbolic4",
    "schwarzschild",
    "sphere2",
    "sphere3",
    "sphere4",
    "weyl_nonclosed4",
];

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Full symmetric grid with `diag` on the diagonal and `off` entries
/// `(i, j, expr)` for `i < j`, mirrored below.
fn grid(diag: &[&str], off: &[(usize, usize, &str)]) -> Vec<Vec<Option<String>>> {
    let n = diag.len();
    let mut g = vec![vec![Some("0".to_string()); n]; n];
    for (i, d) in diag.iter().enumerate() {
        g[i][i] = Some(d.to_string());
    }
    for &(i, j, e) in off {
        g[i][j] = Some(e.to_string());
        g[j][i] = Some(e.to_string());
    }
    g
}

struct Entry {
    label: &'static str,
    coordinates: Vec<String>,
    metric: Vec<Vec<Option<String>>>,
    params: &'static [(&'static str, f64)],
    one_form: Option<Vec<&'static str>>,
    sample_box: Vec<[f64; 2]>,
    classification: Classification,
    validity: Option<&'static str>,
}

impl Entry {
    fn into_spec(self) -> MetricSpec {
        MetricSpec {
            label: self.label.to_string(),
            dimension: self.coordinates.len(),
            coordinates: self.coordinates,
            metric: self.metric,
            params: self
                .params
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
            weyl_one_form: self
                .one_form
                .map(|f| f.into_iter().map(str::to_string).collect()),
            sample_box: self.sample_box,
            classification: Some(self.classification),
            validity: self.validity.map(str::to_string),
        }
    }
}

fn stereographic(n: usize, sign: &str) -> String {
    let sum: Vec<String> = (1..=n).map(|i| format!("x{i}^2")).collect();
    format!("4/(1{sign}{})^2", sum.join(sign))
}

fn sphere(n: usize) -> Entry {
    let d = stereographic(n, "+");
    Entry {
        label: "unit sphere, stereographic chart",
        coordinates: names("x", n),
        metric: grid(&vec![d.as_str(); n], &[]),
        params: &[],
        one_form: None,
        sample_box: vec![[-1.0, 1.0]; n],
        classification: Classification::Einstein,
        validity: Some("all of R^n (misses one point of the sphere)"),
    }
}

/// The [`MetricSpec`] of a catalog entry.
// The φ bound 6.28 is a sampling interval, not an approximation of 2π.
#[allow(clippy::approx_constant)]
pub fn spec(id: &str) -> Option<MetricSpec> {
    let entry = match id {
        "euclidean4" => Entry {
            label: "flat Euclidean 4-space",
            coordinates: names("x", 4),
            metric: grid(&["1"; 4], &[]),
            params: &[],
            one_form: None,
            sample_box: vec![[-1.0, 1.0]; 4],
            classification: Classification::Flat,
            validity: None,
        },
        "sphere2" => sphere(2),
        "sphere3" => sphere(3),
        "sphere4" => sphere(4),
        "hyperbolic4" => {
            let d = stereographic(4, "-");
            Entry {
                label: "unit hyperbolic 4-space, Poincare ball",
                coordinates: names("x", 4),
                metric: grid(&[d.as_str(); 4], &[]),
                params: &[],
                one_form: None,
                sample_box: vec![[-0.25, 0.25]; 4],
                classification: Classification::Einstein,
                validity: Some("|x| < 1; the box keeps |x| <= 0.5"),
            }
        }
        "schwarzschild" => Entry {
            label: "Schwarzschild exterior, Schwarzschild coordinates",
            coordinates: vec!["t".into(), "r".into(), "th".into(), "ph".into()],
            metric: grid(
                &["-(1 - 2*M/r)", "1/(1 - 2*M/r)", "r^2", "r^2*sin(th)^2"],
                &[],
            ),
            params: &[("M", 1.0)],
            one_form: None,
            sample_box: vec![[0.0, 1.0], [3.0, 10.0], [0.5, 2.6], [0.0, 6.28]],
            classification: Classification::Einstein,
            validity: Some("r > 2*M, 0 < th < pi"),
        },
        "desitter_like5" => Entry {
            label: "de Sitter 5-space, flat slicing",
            coordinates: vec![
                "t".into(),
                "x1".into(),
                "x2".into(),
                "x3".into(),
                "x4".into(),
            ],
            metric: grid(&["-1", "exp(2*t)", "exp(2*t)", "exp(2*t)", "exp(2*t)"], &[]),
            params: &[],
            one_form: None,
            sample_box: vec![
                [-0.5, 0.5],
                [-1.0, 1.0],
                [-1.0, 1.0],
                [-1.0, 1.0],
                [-1.0, 1.0],
            ],
            classification: Classification::Einstein,
            validity: None,
        },
        "aniso4" => Entry {
            label: "anisotropic diagonal 4-metric",
            coordinates: names("x", 4),
            // Each component depends on a different coordinate than its own
            // index; diag(1+x1^2, 1+2x2^2, 1+3x3^2, 1) would be flat.
            metric: grid(&["1 + x2^2", "1 + 2*x3^2", "1 + 3*x1^2", "1"], &[]),
            params: &[],
            one_form: None,
            sample_box: vec![[-1.0, 1.0]; 4],
            classification: Classification::NonEinstein,
            validity: None,
        },
        "flrw4" => Entry {
            label: "spatially flat FLRW, dust scale factor",
            coordinates: vec!["t".into(), "x".into(), "y".into(), "z".into()],
            metric: grid(&["-1", "t^(4/3)", "t^(4/3)", "t^(4/3)"], &[]),
            params: &[],
            one_form: None,
            sample_box: vec![[1.0, 2.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
            classification: Classification::NonEinstein,
            validity: Some("t > 0"),
        },
        "weyl_nonclosed4" => Entry {
            label: "Euclidean metric with Weyl one-form x1 dx2",
            coordinates: names("x", 4),
            metric: grid(&["1"; 4], &[]),
            params: &[],
            one_form: Some(vec!["0", "x1", "0", "0"]),
            sample_box: vec![[-1.0, 1.0]; 4],
            classification: Classification::WeylNonclosed,
            validity: None,
        },
        "generic3" => Entry {
            label: "generic non-symmetric 3-metric",
            coordinates: vec!["x".into(), "y".into(), "z".into()],
            metric: grid(
                &["1 + y^2", "2 + sin(x)", "1 + 0.5*x^2*z^2"],
                &[(0, 1, "0.1*z"), (1, 2, "0.2*x*y")],
            ),
            params: &[],
            one_form: None,
            sample_box: vec![[-1.0, 1.0]; 3],
            classification: Classification::NonEinstein,
            validity: None,
        },
        _ => return None,
    };
    Some(entry.into_spec())
}

pub fn subject(id: &str, overrides: &BTreeMap<String, f64>) -> Result<Subject, Error> {
    let spec = spec(id).ok_or_else(|| Error::UnknownEntry(id.to_string()))?;
    Ok(spec.to_subject(id, overrides)?)
}

/// Every entry, sorted by id.
pub fn all_subjects(overrides: &BTreeMap<String, f64>) -> Result<Vec<Subject>, Error> {
    IDS.iter().map(|id| subject(id, overrides)).collect()
}
