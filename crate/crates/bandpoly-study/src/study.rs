//! Exact against predicted recurrence coefficients over a range of degrees.

use crate::audit::{run_audits, AuditReport};
use crate::config::StudyConfig;
use crate::error::{Result, Stage};
use crate::fit::{fit_rate, RateFit};
use bandpoly::asymptotics::predict_recurrence;
use bandpoly::quadrature::assemble_discrete_measure;
use bandpoly::recurrence::rkpw_reduce;
use bandpoly::{AsymptoticModel, Error};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

pub const SCHEMA: u32 = 1;
pub const CSV_HEADER: [&str; 8] = ["n", "a_exact", "b_exact", "a_pred", "b_pred", "err_a", "err_b", "skip_reason"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactRow {
    pub n: usize,
    pub a: f64,
    /// Links `p_n` and `p_{n+1}`.
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredRow {
    pub n: usize,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub skip_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub n: usize,
    pub a_exact: f64,
    pub b_exact: f64,
    pub a_pred: Option<f64>,
    pub b_pred: Option<f64>,
    pub err_a: Option<f64>,
    pub err_b: Option<f64>,
    pub skip_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FitOutcome {
    Fitted(RateFit),
    Unfitted { reason: String },
}

impl FitOutcome {
    pub fn fitted(&self) -> Option<&RateFit> {
        match self {
            FitOutcome::Fitted(f) => Some(f),
            FitOutcome::Unfitted { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fits {
    pub window: [usize; 2],
    pub err_a: FitOutcome,
    pub err_b: FitOutcome,
}

/// Model constants; complex quantities that are purely imaginary keep only
/// their imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub genus: usize,
    pub log_capacity: f64,
    pub g1: f64,
    pub delta_imag: Vec<f64>,
    pub zeta_imag: Vec<f64>,
    pub tau: Vec<Vec<f64>>,
    pub g_inf: [f64; 2],
    pub point_masses: usize,
}

impl Constants {
    pub fn of(m: &AsymptoticModel) -> Self {
        Constants {
            genus: m.genus(),
            log_capacity: m.gd.log_capacity,
            g1: m.gd.g1,
            delta_imag: m.gd.deltas.iter().map(|d| d.im).collect(),
            zeta_imag: m.sz.zeta.iter().map(|z| z.im).collect(),
            tau: m.sd.tau.clone(),
            g_inf: [m.sz.g_inf.re, m.sz.g_inf.im],
            point_masses: m.p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub schema: u32,
    pub config: StudyConfig,
    pub rows: Vec<Row>,
    pub fits: Fits,
    pub constants: Constants,
    pub audits: Option<AuditReport>,
}

/// `a_n`, `b_n` for every configured degree.
pub fn run_exact(cfg: &StudyConfig) -> Result<Vec<ExactRow>> {
    cfg.check()?;
    let q = assemble_discrete_measure(&cfg.measure_spec(), cfg.quadrature_size()).stage("quadrature")?;
    let rec = rkpw_reduce(&q, cfg.study.n_max + 2).stage("rkpw")?;
    Ok(cfg.degrees().into_iter().map(|n| ExactRow { n, a: rec.a[n], b: rec.offdiag(n) }).collect())
}

pub fn build_model(cfg: &StudyConfig) -> Result<AsymptoticModel> {
    AsymptoticModel::new(&cfg.measure_spec()).stage("model")
}

fn skip_tag(e: &Error) -> String {
    match e {
        Error::ThetaPole => "theta_pole".into(),
        Error::Overflow => "overflow".into(),
        other => format!("prediction_failed: {other}"),
    }
}

/// Predictions at each degree, in parallel, ordered by `n`.
pub fn predict_rows(m: &AsymptoticModel, degrees: &[usize]) -> Vec<PredRow> {
    degrees
        .par_iter()
        .map(|&n| match predict_recurrence(m, n) {
            Ok(p) if p.b2 > 0.0 && p.b2.is_finite() && p.a.is_finite() => {
                PredRow { n, a: Some(p.a), b: Some(p.b2.sqrt()), skip_reason: None }
            }
            Ok(_) => PredRow { n, a: None, b: None, skip_reason: Some("nonpositive_b2".into()) },
            Err(e) => PredRow { n, a: None, b: None, skip_reason: Some(skip_tag(&e)) },
        })
        .collect()
}

pub fn run_predict(cfg: &StudyConfig) -> Result<Vec<PredRow>> {
    cfg.check()?;
    let m = build_model(cfg)?;
    Ok(predict_rows(&m, &cfg.degrees()))
}

pub fn merge_rows(exact: &[ExactRow], pred: &[PredRow]) -> Vec<Row> {
    exact
        .iter()
        .zip(pred)
        .map(|(e, p)| {
            debug_assert_eq!(e.n, p.n);
            Row {
                n: e.n,
                a_exact: e.a,
                b_exact: e.b,
                a_pred: p.a,
                b_pred: p.b,
                err_a: p.a.map(|a| (e.a - a).abs()),
                err_b: p.b.map(|b| (e.b - b).abs()),
                skip_reason: p.skip_reason.clone(),
            }
        })
        .collect()
}

pub fn fit_rows(rows: &[Row], window: (usize, usize)) -> Fits {
    let fit = |pick: fn(&Row) -> Option<f64>| {
        let s: Vec<(usize, f64)> = rows.iter().filter_map(|r| pick(r).map(|e| (r.n, e))).collect();
        match fit_rate(&s, window) {
            Ok(f) => FitOutcome::Fitted(f),
            Err(e) => FitOutcome::Unfitted { reason: e.to_string() },
        }
    };
    Fits { window: [window.0, window.1], err_a: fit(|r| r.err_a), err_b: fit(|r| r.err_b) }
}

/// The full comparison, fits and the configured audits. `seed` drives the
/// random audit points.
pub fn run_study(cfg: &StudyConfig, seed: u64) -> Result<StudyReport> {
    cfg.check()?;
    let model = build_model(cfg)?;
    let exact = run_exact(cfg)?;
    let pred = predict_rows(&model, &cfg.degrees());
    let rows = merge_rows(&exact, &pred);
    let fits = fit_rows(&rows, cfg.fit_window());
    let audits = if cfg.study.audits.is_empty() { None } else { Some(run_audits(cfg, Some(&model), seed)?) };
    Ok(StudyReport { schema: SCHEMA, config: cfg.clone(), rows, fits, constants: Constants::of(&model), audits })
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e16)`.
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_rows_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            fmt_float(r.a_exact),
            fmt_float(r.b_exact),
            opt(r.a_pred),
            opt(r.b_pred),
            opt(r.err_a),
            opt(r.err_b),
            r.skip_reason.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_exact_csv<W: Write>(rows: &[ExactRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "a_exact", "b_exact"])?;
    for r in rows {
        w.write_record([r.n.to_string(), fmt_float(r.a), fmt_float(r.b)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pred_csv<W: Write>(rows: &[PredRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "a_pred", "b_pred", "skip_reason"])?;
    for r in rows {
        w.write_record([r.n.to_string(), opt(r.a), opt(r.b), r.skip_reason.clone().unwrap_or_default()])?;
    }
    w.flush()?;
    Ok(())
}
