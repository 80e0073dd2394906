//! Verification suites. Each suite fans out over (subject, point) pairs;
//! every point draws from its own random stream, and results are assembled
//! in subject order, then point order, so reports are stable for a seed.

use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore};

use crate::curvature::CurvaturePack;
use crate::exprdsl::{BinaryOp, Expr};
use crate::geometry::{apply_change_jets, levi_civita, ChangeKind, WeylStructure};
use crate::jets::Elementary;
use crate::parallel::{map_range, map_with, Execution};
use crate::sampling::{sample_until, stream, Sampled};
use crate::subject::{evaluate, Classification, PointEval, Subject, METRIC_ORDER};
use crate::tensor::{Slot, Tensor};
use crate::theorems::algebra::{
    nurowski_contraction, predicted_trace_coefficients, random_metric, random_ricci,
    trace_identity, unit_phi_ricci,
};
use crate::theorems::report::{CheckResult, Criterion, VerificationReport};
use crate::theorems::transform::{calibrate, schouten_law_at, RESOLVED_CONVENTION};
use crate::Error;

/// `max|W - C|` for coincidence.
pub const COINCIDENCE_TOL: f64 = 1e-8;
/// Separation threshold for `max|W - C|` and the Einstein diagnostics.
pub const SEPARATION_TOL: f64 = 1e-5;
/// Fraction of points that must be separated.
pub const SEPARATION_FRACTION: f64 = 0.9;
pub const COTTON_YORK_TOL: f64 = 1e-7;
pub const SCALAR_GRADIENT_TOL: f64 = 1e-8;
pub const INVARIANCE_TOL: f64 = 1e-7;
pub const RESCALING_TOL: f64 = 1e-8;
pub const BIANCHI_TOL: f64 = 1e-7;
pub const SCHOUTEN_LAW_TOL: f64 = 1e-9;
pub const LOWDIM_TOL: f64 = 1e-10;
/// `max|W|` below which three-dimensional tensors count as agreeing.
pub const LOWDIM_AGREEMENT_TOL: f64 = 1e-9;
pub const TRACE_FREE_TOL: f64 = 1e-10;
pub const TRACE_COEFFICIENT_TOL: f64 = 1e-12;
pub const NUROWSKI_TOL: f64 = 1e-13;
/// Minimal contraction size accepted as "strictly positive" for unit `Φ`.
pub const NUROWSKI_MARGIN: f64 = 1e-8;
/// Random inputs per dimension in the algebraic suites.
pub const ALGEBRAIC_TRIALS: usize = 100;
/// Dimensions covered by the algebraic suites.
pub const ALGEBRAIC_DIMS: [usize; 3] = [4, 5, 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Coincidence,
    Invariance,
    Bianchi,
    Traces,
    Lowdim,
    Nurowski,
    SchoutenLaw,
    All,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Coincidence,
        Suite::Invariance,
        Suite::Bianchi,
        Suite::Traces,
        Suite::Lowdim,
        Suite::Nurowski,
        Suite::SchoutenLaw,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Coincidence => "coincidence",
            Suite::Invariance => "invariance",
            Suite::Bianchi => "bianchi",
            Suite::Traces => "traces",
            Suite::Lowdim => "lowdim",
            Suite::Nurowski => "nurowski",
            Suite::SchoutenLaw => "schouten-law",
            Suite::All => "all",
        }
    }

    /// Whether the suite looks at subjects at all.
    pub fn uses_subjects(self) -> bool {
        !matches!(self, Suite::Traces | Suite::Nurowski)
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    /// Multiplies every upper-bound tolerance.
    pub tolerance_factor: Option<f64>,
    pub execution: Execution,
}

impl RunConfig {
    pub fn new(seed: u64, samples: usize) -> RunConfig {
        RunConfig {
            seed,
            samples,
            tolerance_factor: None,
            execution: Execution::Auto,
        }
    }

    fn at_most(&self, tolerance: f64) -> Criterion {
        Criterion::AtMost {
            tolerance: tolerance * self.tolerance_factor.unwrap_or(1.0),
        }
    }
}

fn at_least(tolerance: f64, min_fraction: f64) -> Criterion {
    Criterion::AtLeast {
        tolerance,
        min_fraction,
    }
}

/// Residual, scale and named side quantities at one point.
struct Outcome {
    residual: f64,
    scale: f64,
    diagnostics: Vec<(&'static str, f64)>,
}

impl Outcome {
    fn new(residual: f64, scale: f64) -> Outcome {
        Outcome {
            residual,
            scale,
            diagnostics: Vec::new(),
        }
    }

    fn with(mut self, key: &'static str, value: f64) -> Outcome {
        self.diagnostics.push((key, value));
        self
    }
}

/// Per-point sampling results of one family of checks.
struct Samples<O> {
    items: Vec<Result<(Vec<f64>, O), String>>,
    wall_time: Duration,
}

type PointFn<'a, O> = dyn Fn(&[f64], &mut dyn RngCore) -> Result<Option<O>, Error> + Sync + 'a;

fn sample_points<O: Send>(
    cfg: &RunConfig,
    subject: &Subject,
    family: &str,
    f: &PointFn<'_, O>,
) -> Samples<O> {
    let start = Instant::now();
    let items = map_range(cfg.execution, cfg.samples, |i| {
        let mut rng = stream(cfg.seed, family, &subject.id, i);
        match sample_until(&mut rng, &subject.sample_box, |p, r| f(p, r)) {
            Sampled::Ok { point, value, .. } => Ok((point, value)),
            Sampled::Exhausted {
                attempts,
                last_error,
            } => Err(format!(
                "sample {i}: no usable point in {attempts} attempts ({last_error})"
            )),
        }
    });
    Samples {
        items,
        wall_time: start.elapsed(),
    }
}

impl<O> Samples<O> {
    /// Fills `check` from the samples that pass `keep`, mapping each through
    /// `outcome`.
    fn build(
        &self,
        mut check: CheckResult,
        keep: impl Fn(usize) -> bool,
        outcome: impl Fn(&O) -> Outcome,
    ) -> CheckResult {
        for (i, item) in self.items.iter().enumerate() {
            match item {
                Ok((point, value)) if keep(i) => {
                    let o = outcome(value);
                    check.push(point.clone(), o.residual, o.scale);
                    for (k, v) in o.diagnostics {
                        check.push_diagnostic(k, v);
                    }
                }
                Ok(_) => {}
                Err(e) => check.sampling_failures.push(e.clone()),
            }
        }
        check.wall_time = self.wall_time;
        check.finish()
    }

    fn all(&self, check: CheckResult, outcome: impl Fn(&O) -> Outcome) -> CheckResult {
        self.build(check, |_| true, outcome)
    }
}

fn new_check(subject: &Subject, cfg: &RunConfig, id: &str, criterion: Criterion) -> CheckResult {
    CheckResult::new(
        id,
        &subject.id,
        subject.connection_label(),
        cfg.seed,
        criterion,
    )
}

fn einstein_diagnostic(pack: &CurvaturePack) -> f64 {
    pack.phi.max_abs().max(pack.varphi.max_abs())
}

/// `(coincidence, corollary_cotton_york, corollary_scalar)` at shared points.
/// The corollaries only look at points where coincidence holds and are
/// skipped when it fails everywhere.
pub fn coincidence_family(subject: &Subject, cfg: &RunConfig) -> Vec<CheckResult> {
    let coincidence = new_check(subject, cfg, "coincidence", cfg.at_most(COINCIDENCE_TOL));
    let cy = new_check(
        subject,
        cfg,
        "corollary_cotton_york",
        cfg.at_most(COTTON_YORK_TOL),
    );
    let sc = new_check(
        subject,
        cfg,
        "corollary_scalar",
        cfg.at_most(SCALAR_GRADIENT_TOL),
    );
    if subject.dim() < 4 {
        let why = "coincidence theorem needs n >= 4";
        return vec![coincidence.skipped(why), cy.skipped(why), sc.skipped(why)];
    }
    let samples = sample_points(cfg, subject, "coincidence", &|p, _| {
        Ok(Some(evaluate(&subject.structure, p)?))
    });
    let coincidence = samples.all(coincidence, |e: &PointEval| {
        let pack = &e.pack;
        Outcome::new(pack.w.max_abs_diff(&pack.c), pack.scale(&[]))
            .with("phi", pack.phi.max_abs())
            .with("varphi", pack.varphi.max_abs())
            .with("scalar", pack.scalar)
    });
    let holds: Vec<bool> = {
        let mut k = 0;
        samples
            .items
            .iter()
            .map(|item| {
                if item.is_ok() {
                    k += 1;
                    coincidence.point_ok(k - 1)
                } else {
                    false
                }
            })
            .collect()
    };
    if !holds.iter().any(|&h| h) {
        let why = "coincidence fails at every point";
        return vec![coincidence, cy.skipped(why), sc.skipped(why)];
    }
    let cy = samples.build(
        cy,
        |i| holds[i],
        |e| {
            let p = &e.pack;
            Outcome::new(p.y.max_abs().max(p.yy.max_abs()), p.scale(&[]))
                .with("y", p.y.max_abs())
                .with("Y", p.yy.max_abs())
        },
    );
    let sc = samples.build(
        sc,
        |i| holds[i],
        |e| {
            let p = &e.pack;
            let grad = p.d_scalar.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            Outcome::new(grad, p.scale(&[]))
        },
    );
    vec![coincidence, cy, sc]
}

/// Contrapositive: `W - C` and the Einstein diagnostics both large.
pub fn separation(subject: &Subject, cfg: &RunConfig) -> CheckResult {
    let check = new_check(
        subject,
        cfg,
        "separation",
        at_least(SEPARATION_TOL, SEPARATION_FRACTION),
    );
    if subject.dim() < 4 {
        return check.skipped("coincidence theorem needs n >= 4");
    }
    let samples = sample_points(cfg, subject, "separation", &|p, _| {
        Ok(Some(evaluate(&subject.structure, p)?))
    });
    samples.all(check, |e: &PointEval| {
        let pack = &e.pack;
        let wc = pack.w.max_abs_diff(&pack.c);
        let einstein = einstein_diagnostic(pack);
        Outcome::new(wc.min(einstein), pack.scale(&[]))
            .with("w_minus_c", wc)
            .with("einstein_diagnostic", einstein)
    })
}

/// Pointwise biconditional: `W ≈ C` exactly when `Φ ≈ 0` and `φ ≈ 0`.
/// Points where either quantity falls between the coincidence and
/// separation thresholds are inconclusive and redrawn.
pub fn theorem_iff(subject: &Subject, cfg: &RunConfig) -> CheckResult {
    let check = new_check(
        subject,
        cfg,
        "theorem_iff",
        Criterion::AtMost { tolerance: 0.0 },
    );
    if subject.dim() < 4 {
        return check.skipped("coincidence theorem needs n >= 4");
    }
    let samples = sample_points(cfg, subject, "theorem_iff", &|p, _| {
        let e = evaluate(&subject.structure, p)?;
        let scale = e.pack.scale(&[]);
        let classify = |x: f64| {
            if x <= COINCIDENCE_TOL * scale {
                Some(true)
            } else if x >= SEPARATION_TOL * scale {
                Some(false)
            } else {
                None
            }
        };
        let wc = e.pack.w.max_abs_diff(&e.pack.c);
        let ein = einstein_diagnostic(&e.pack);
        Ok(match (classify(wc), classify(ein)) {
            (Some(a), Some(b)) => Some((a == b, wc, ein, scale)),
            _ => None,
        })
    });
    samples.all(check, |&(consistent, wc, ein, scale)| {
        Outcome::new(if consistent { 0.0 } else { 1.0 }, scale)
            .with("w_minus_c", wc)
            .with("einstein_diagnostic", ein)
    })
}

/// Checks the catalog tag against the computed Ricci decomposition.
pub fn classification_check(subject: &Subject, cfg: &RunConfig) -> Option<CheckResult> {
    let class = subject.classification?;
    let criterion = match class {
        Classification::Flat | Classification::Einstein => cfg.at_most(COINCIDENCE_TOL),
        Classification::NonEinstein | Classification::WeylNonclosed => {
            at_least(SEPARATION_TOL, SEPARATION_FRACTION)
        }
    };
    let check = new_check(subject, cfg, "classification", criterion);
    let samples = sample_points(cfg, subject, "classification", &|p, _| {
        Ok(Some(evaluate(&subject.structure, p)?))
    });
    let mut check = samples.all(check, |e: &PointEval| {
        let p = &e.pack;
        let residual = match class {
            Classification::Flat => p.riemann.max_abs().max(einstein_diagnostic(p)),
            Classification::Einstein | Classification::NonEinstein => einstein_diagnostic(p),
            Classification::WeylNonclosed => p.varphi.max_abs(),
        };
        Outcome::new(residual, p.scale(&[]))
            .with("phi", p.phi.max_abs())
            .with("varphi", p.varphi.max_abs())
    });
    let tag = serde_json::to_value(class).expect("tag serializes");
    check.note = Some(format!("tag {}", tag.as_str().unwrap_or_default()));
    if class == Classification::WeylNonclosed && subject.structure.is_levi_civita() {
        check.verdict = crate::theorems::report::Verdict::Fail;
        check.note = Some("tagged weyl_nonclosed but the one-form is zero".into());
    }
    Some(check)
}

fn first_trace(t: &Tensor<f64>) -> Tensor<f64> {
    CurvaturePack::first_trace(t)
}

/// `W_kj^k_l = 0`, `C_kj^k_l = 0`, and the trace of `C - W` over `il`
/// against the irreducible prediction `n/(n-1) Φ + (n²-4)/(n(n+1)) φ`.
pub fn trace_family(subject: &Subject, cfg: &RunConfig) -> Vec<CheckResult> {
    let tf = new_check(subject, cfg, "trace_free", cfg.at_most(TRACE_FREE_TOL));
    let tp = new_check(
        subject,
        cfg,
        "trace_prediction",
        cfg.at_most(TRACE_FREE_TOL),
    );
    let samples = sample_points(cfg, subject, "trace", &|p, _| {
        Ok(Some(evaluate(&subject.structure, p)?))
    });
    let tf = samples.all(tf, |e: &PointEval| {
        let p = &e.pack;
        let w = first_trace(&p.w).max_abs();
        let c = first_trace(&p.c).max_abs();
        Outcome::new(w.max(c), p.scale(&[]))
            .with("w_trace", w)
            .with("c_trace", c)
    });
    if subject.dim() < 3 {
        return vec![tf, tp.skipped("trace prediction needs n >= 3")];
    }
    let tp = samples.all(tp, |e: &PointEval| {
        let p = &e.pack;
        let n = p.dim;
        let (cp, cs) = predicted_trace_coefficients(n);
        let predicted = Tensor::from_fn(n, vec![Slot::Down, Slot::Down], |ix| {
            cp * p.phi.get(ix) + cs * p.varphi.get(ix)
        });
        // (C - W) traced over il, with k lowered.
        let measured = Tensor::from_fn(n, vec![Slot::Down, Slot::Down], |ix| {
            let (j, l) = (ix[0], ix[1]);
            let mut acc = 0.0;
            for k in 0..n {
                let mut t = 0.0;
                for i in 0..n {
                    for m in 0..n {
                        t += p.g_inv.get(&[i, m])
                            * (p.c.get(&[i, j, k, m]) - p.w.get(&[i, j, k, m]));
                    }
                }
                acc += t * p.g.get(&[k, l]);
            }
            acc
        });
        Outcome::new(measured.max_abs_diff(&predicted), p.scale(&[]))
            .with("trace_norm", measured.max_abs())
    });
    vec![tf, tp]
}

/// Random quadratic one-form about the box center with coefficients in
/// `[-0.1, 0.1]`.
pub fn random_one_form(rng: &mut dyn RngCore, subject: &Subject) -> Vec<Expr> {
    let names = subject.structure.metric().chart().coord_names().to_vec();
    let center = subject.center();
    let n = names.len();
    let shifted: Vec<Expr> = (0..n)
        .map(|i| {
            Expr::binary(
                BinaryOp::Sub,
                Expr::sym(names[i].clone()),
                Expr::num(center[i]),
            )
        })
        .collect();
    let mut coeff = || Expr::num(rng.random_range(-0.1..0.1));
    (0..n)
        .map(|_| {
            let mut e = coeff();
            for i in 0..n {
                let term = Expr::binary(BinaryOp::Mul, coeff(), shifted[i].clone());
                e = Expr::binary(BinaryOp::Add, e, term);
                for j in i..n {
                    let quad = Expr::binary(BinaryOp::Mul, shifted[i].clone(), shifted[j].clone());
                    let term = Expr::binary(BinaryOp::Mul, coeff(), quad);
                    e = Expr::binary(BinaryOp::Add, e, term);
                }
            }
            e
        })
        .collect()
}

/// Bounded conformal factor exponent `ω = 0.1 sin(c1) + 0.1 cos(c2)`.
pub fn rescaling_exponent(structure: &WeylStructure) -> Expr {
    let names = structure.metric().chart().coord_names();
    let term = |f: Elementary, name: &str| {
        Expr::binary(
            BinaryOp::Mul,
            Expr::num(0.1),
            Expr::Call(f, Box::new(Expr::sym(name))),
        )
    };
    Expr::binary(
        BinaryOp::Add,
        term(Elementary::Sin, &names[0]),
        term(Elementary::Cos, &names[1]),
    )
}

/// `W` under projective and `C` under conformal changes; `C` under metric
/// rescaling for Levi-Civita subjects. Cross effects are recorded, not
/// asserted.
pub fn invariance_family(subject: &Subject, cfg: &RunConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (kind, id, family) in [
        (
            ChangeKind::Projective,
            "invariance_projective",
            "invariance_projective",
        ),
        (
            ChangeKind::Conformal,
            "invariance_conformal",
            "invariance_conformal",
        ),
    ] {
        let check = new_check(subject, cfg, id, cfg.at_most(INVARIANCE_TOL));
        let samples = sample_points(cfg, subject, family, &|p, rng| {
            let b = random_one_form(rng, subject);
            let e = evaluate(&subject.structure, p)?;
            let b_jets = subject
                .structure
                .metric()
                .one_form_at(&b, p, e.connection.order())?;
            let changed = apply_change_jets(&e.connection, kind, &b_jets, &e.metric);
            let after = CurvaturePack::compute(&changed, &e.metric)?;
            Ok(Some((e.pack, after)))
        });
        out.push(samples.all(check, |(before, after)| {
            let dw = before.w.max_abs_diff(&after.w);
            let dc = before.c.max_abs_diff(&after.c);
            let scale = before.scale(&[&after.riemann]);
            match kind {
                ChangeKind::Projective => Outcome::new(dw, scale).with("cross_effect_c", dc),
                ChangeKind::Conformal => Outcome::new(dc, scale).with("cross_effect_w", dw),
            }
        }));
    }
    let check = new_check(
        subject,
        cfg,
        "invariance_rescaling",
        cfg.at_most(RESCALING_TOL),
    );
    if !subject.structure.is_levi_civita() {
        out.push(check.skipped("metric rescaling applies to Levi-Civita connections"));
        return out;
    }
    let omega = rescaling_exponent(&subject.structure);
    let factor = Expr::Call(
        Elementary::Exp,
        Box::new(Expr::binary(BinaryOp::Mul, Expr::num(2.0), omega)),
    );
    let rescaled = WeylStructure::levi_civita(subject.structure.metric().rescaled(&factor));
    let samples = sample_points(cfg, subject, "invariance_rescaling", &|p, _| {
        let before = evaluate(&subject.structure, p)?;
        let metric = rescaled.metric().at(p, METRIC_ORDER)?;
        let conn = levi_civita(&metric)?;
        let after = CurvaturePack::compute(&conn, &metric)?;
        Ok(Some((before.pack, after)))
    });
    out.push(samples.all(check, |(before, after)| {
        Outcome::new(
            before.c.max_abs_diff(&after.c),
            before.scale(&[&after.riemann]),
        )
        .with("cross_effect_w", before.w.max_abs_diff(&after.w))
    }));
    out
}

/// `∇_k W_ij^k_l = (n-2) y_ijl` and `∇_k C_ij^k_l = (n-3) Y_ijl`.
pub fn bianchi_family(subject: &Subject, cfg: &RunConfig) -> Vec<CheckResult> {
    let bp = new_check(subject, cfg, "bianchi_projective", cfg.at_most(BIANCHI_TOL));
    let bc = new_check(subject, cfg, "bianchi_conformal", cfg.at_most(BIANCHI_TOL));
    if subject.dim() < 3 {
        let why = "Bianchi identities need n >= 3";
        return vec![bp.skipped(why), bc.skipped(why)];
    }
    let samples = sample_points(cfg, subject, "bianchi", &|p, _| {
        Ok(Some(evaluate(&subject.structure, p)?))
    });
    let residual = |div: &Tensor<f64>, cy: &Tensor<f64>, c: f64| {
        let scaled = cy.map(|x| c * x);
        div.max_abs_diff(&scaled)
    };
    let bp = samples.all(bp, |e: &PointEval| {
        let p = &e.pack;
        let n = p.dim as f64;
        Outcome::new(residual(&p.div_w, &p.y, n - 2.0), p.scale(&[&p.div_w]))
            .with("y", p.y.max_abs())
    });
    let bc = samples.all(bc, |e: &PointEval| {
        let p = &e.pack;
        let n = p.dim as f64;
        Outcome::new(residual(&p.div_c, &p.yy, n - 3.0), p.scale(&[&p.div_c]))
            .with("Y", p.yy.max_abs())
    });
    vec![bp, bc]
}

/// The Schouten transformation law under the resolved convention, with a
/// random quadratic `b` per point.
pub fn schouten_law_family(subject: &Subject, cfg: &RunConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (kind, id) in [
        (ChangeKind::Projective, "schouten_law_projective"),
        (ChangeKind::Conformal, "schouten_law_conformal"),
    ] {
        let check = new_check(subject, cfg, id, cfg.at_most(SCHOUTEN_LAW_TOL));
        if kind == ChangeKind::Conformal && subject.dim() < 3 {
            out.push(check.skipped("conformal Schouten tensor needs n >= 3"));
            continue;
        }
        let samples = sample_points(cfg, subject, id, &|p, rng| {
            let b = random_one_form(rng, subject);
            Ok(Some(schouten_law_at(&subject.structure, p, kind, &b)?))
        });
        out.push(samples.all(check, |s| {
            Outcome::new(s.residual(RESOLVED_CONVENTION), s.scale)
        }));
    }
    out
}

/// `n = 2`: `W = C = 0`. `n = 3`: `C = 0`, with `W` reported and the
/// agreement verdict stated for the sampled points only.
pub fn lowdim_check(subject: &Subject, cfg: &RunConfig) -> CheckResult {
    let check = new_check(subject, cfg, "lowdim", cfg.at_most(LOWDIM_TOL));
    let n = subject.dim();
    if n > 3 {
        return check.skipped("low-dimensional check applies to n = 2, 3");
    }
    let samples = sample_points(cfg, subject, "lowdim", &|p, _| {
        Ok(Some(evaluate(&subject.structure, p)?))
    });
    let mut check = samples.all(check, |e: &PointEval| {
        let p = &e.pack;
        let (w, c) = (p.w.max_abs(), p.c.max_abs());
        let residual = if n == 2 { w.max(c) } else { c };
        Outcome::new(residual, p.scale(&[]))
            .with("w", w)
            .with("c", c)
    });
    if n == 3 && !check.points.is_empty() {
        let agree = check.diagnostics["w"]
            .iter()
            .zip(&check.scales)
            .all(|(w, s)| *w <= LOWDIM_AGREEMENT_TOL * s);
        check.note = Some(if agree {
            "W ≈ 0, tensors agree (at sampled points)".into()
        } else {
            "W ≠ 0, tensors disagree (at sampled points)".into()
        });
    } else if n == 2 {
        check.note = Some("n = 2: W = C = 0".into());
    }
    check
}

fn algebraic_check(id: &str, cfg: &RunConfig, criterion: Criterion) -> CheckResult {
    CheckResult::new(id, "algebraic", "none", cfg.seed, criterion)
}

/// Trace of both glues over `il`: measured coefficients of `Φ`, `φ` and the
/// scalar part against `n/(n-1)`, `(n²-4)/(n(n+1))` and `0`.
pub fn traces_check(cfg: &RunConfig) -> CheckResult {
    let start = Instant::now();
    let mut check = algebraic_check("trace_identity", cfg, cfg.at_most(TRACE_COEFFICIENT_TOL));
    for n in ALGEBRAIC_DIMS {
        let (cp, cs) = predicted_trace_coefficients(n);
        let results = map_range(cfg.execution, ALGEBRAIC_TRIALS, |t| {
            let mut rng = stream(cfg.seed, "trace_identity", &n.to_string(), t);
            let (g, gi) = random_metric(&mut rng, n);
            let ric = random_ricci(&mut rng, n, true);
            trace_identity(&ric, &g, &gi)
        });
        for r in results {
            let residual = (r.phi_coefficient - cp)
                .abs()
                .max((r.varphi_coefficient - cs).abs())
                .max(r.scalar_coefficient.abs())
                .max(r.fit_residual);
            check.push(Vec::new(), residual, 1.0);
            check.push_diagnostic("dimension", n as f64);
            check.push_diagnostic("phi_coefficient", r.phi_coefficient);
            check.push_diagnostic("varphi_coefficient", r.varphi_coefficient);
            check.push_diagnostic("scalar_coefficient", r.scalar_coefficient);
        }
    }
    check.wall_time = start.elapsed();
    check.finish()
}

/// `M_abcd^ef R_ef` vanishes for pure-trace Ricci and is bounded away from
/// zero for unit trace-free parts.
pub fn nurowski_checks(cfg: &RunConfig) -> Vec<CheckResult> {
    let start = Instant::now();
    let mut annihilation = algebraic_check("nurowski_annihilation", cfg, cfg.at_most(NUROWSKI_TOL));
    let mut detection = algebraic_check("nurowski_detection", cfg, at_least(NUROWSKI_MARGIN, 1.0));
    let mut margin = f64::INFINITY;
    for n in ALGEBRAIC_DIMS {
        let results = map_range(cfg.execution, ALGEBRAIC_TRIALS, |t| {
            let mut rng = stream(cfg.seed, "nurowski", &n.to_string(), t);
            let (g, gi) = random_metric(&mut rng, n);
            let lambda = rng.random_range(-2.0..2.0);
            let (_, pure) = nurowski_contraction(&g.map(|x| lambda * x), &g, &gi);
            let (_, ric) = unit_phi_ricci(&mut rng, &g, &gi, lambda);
            let (_, detected) = nurowski_contraction(&ric, &g, &gi);
            (lambda, pure, detected)
        });
        for (lambda, pure, detected) in results {
            annihilation.push(Vec::new(), pure, 1.0);
            annihilation.push_diagnostic("dimension", n as f64);
            annihilation.push_diagnostic("lambda", lambda);
            detection.push(Vec::new(), detected, 1.0);
            detection.push_diagnostic("dimension", n as f64);
            margin = margin.min(detected);
        }
    }
    annihilation.wall_time = start.elapsed();
    detection.wall_time = start.elapsed();
    let mut detection = detection.finish();
    detection.note = Some(format!("smallest contraction for unit Φ: {margin:.6e}"));
    vec![annihilation.finish(), detection]
}

/// Checks that calibration still selects the hard-coded convention.
fn convention_check(cfg: &RunConfig, report: &mut VerificationReport) -> Result<(), Error> {
    let record = calibrate()?;
    let mut check = algebraic_check(
        "transformation_convention",
        cfg,
        Criterion::AtMost { tolerance: 0.0 },
    );
    check.push(
        Vec::new(),
        if record.convention == RESOLVED_CONVENTION {
            0.0
        } else {
            1.0
        },
        1.0,
    );
    for v in &record.variants {
        check.push_diagnostic("variant_relative_residual", v.relative_residual);
    }
    report.checks.push(check.finish());
    report.transformation_convention = Some(record);
    Ok(())
}

fn subject_checks(suite: Suite, subject: &Subject, cfg: &RunConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    match suite {
        Suite::Coincidence => out.extend(coincidence_family(subject, cfg)),
        Suite::Invariance => out.extend(invariance_family(subject, cfg)),
        Suite::Bianchi => out.extend(bianchi_family(subject, cfg)),
        Suite::Lowdim => out.push(lowdim_check(subject, cfg)),
        Suite::SchoutenLaw => out.extend(schouten_law_family(subject, cfg)),
        Suite::Traces | Suite::Nurowski => {}
        Suite::All => {
            out.extend(classification_check(subject, cfg));
            match subject.classification {
                Some(c) if c.expects_coincidence() => out.extend(coincidence_family(subject, cfg)),
                Some(_) => out.push(separation(subject, cfg)),
                None => out.push(theorem_iff(subject, cfg)),
            }
            out.extend(trace_family(subject, cfg));
            out.extend(invariance_family(subject, cfg));
            if subject.dim() >= 3 {
                out.extend(bianchi_family(subject, cfg));
            }
            out.extend(schouten_law_family(subject, cfg));
            if subject.dim() <= 3 {
                out.push(lowdim_check(subject, cfg));
            }
        }
    }
    out
}

/// Runs `suite` on `subjects` (in the given order) and assembles the report.
pub fn run_suite(
    suite: Suite,
    subjects: &[Subject],
    cfg: &RunConfig,
) -> Result<VerificationReport, Error> {
    let mut report =
        VerificationReport::new(suite.name(), cfg.seed, cfg.samples, cfg.tolerance_factor);
    if matches!(suite, Suite::SchoutenLaw | Suite::All) {
        convention_check(cfg, &mut report)?;
    }
    if matches!(suite, Suite::Traces | Suite::All) {
        report.checks.push(traces_check(cfg));
    }
    if matches!(suite, Suite::Nurowski | Suite::All) {
        report.checks.extend(nurowski_checks(cfg));
    }
    if suite.uses_subjects() {
        let per_subject = map_with(cfg.execution, subjects, |_, s| {
            subject_checks(suite, s, cfg)
        });
        report.checks.extend(per_subject.into_iter().flatten());
    }
    Ok(report.finish())
}
