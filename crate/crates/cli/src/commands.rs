//! The four subcommands. Each returns an [`Outcome`] with its verdict.

use finsler_core::diffkit::{y_jet2, Derivative};
use finsler_core::dynamics::{rapcsak_point, IntegratorStats, Termination};
use finsler_core::integrals::{
    charpoly_coefficients, conservation_run, relative_gap, CrossChecks, Drift, PairPoint,
};
use finsler_core::oracle::{charpoly_by_interpolation, delta_alpha_combinatorial, fd_derivative};
use finsler_core::{Error, FinslerMetric, TangentPoint};
use finsler_core::nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{PairConfig, Setup};
use crate::error::CliError;
use crate::report::{cells, indexed, Outcome, Table};

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct Header<'a> {
    command: &'static str,
    dimension: usize,
    seed: u64,
    base: String,
    comparison: String,
    flow: String,
    pair: &'a PairConfig,
}

fn header<'a>(setup: &'a Setup, command: &'static str) -> Header<'a> {
    Header {
        command,
        dimension: setup.config.dimension,
        seed: setup.config.seed,
        base: setup.pair.base.to_string(),
        comparison: setup.pair.comparison.to_string(),
        flow: setup.flow.to_string(),
        pair: &setup.config.pair,
    }
}

// ---------------------------------------------------------------- evaluate

#[derive(Serialize)]
struct PointRecord {
    index: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    f: f64,
    f_tilde: f64,
    g: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
    h_tensor: Vec<Vec<f64>>,
    first_integrals: Vec<f64>,
    delta: Vec<f64>,
    mu: f64,
    i0: f64,
    i1: f64,
    sarlet_k: Vec<Vec<f64>>,
    checks: CrossChecks,
    passed: bool,
}

#[derive(Serialize)]
struct EvaluateReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    identity_tolerance: f64,
    trace_tolerance: f64,
    points: Vec<PointRecord>,
    passed: bool,
}

fn evaluate_point(setup: &Setup, index: usize, p: &TangentPoint, tol: f64) -> Result<PointRecord, Error> {
    let pp = PairPoint::new(&setup.pair, p)?;
    let fi = pp.first_integrals()?;
    let checks = pp.cross_checks(&fi)?;
    let trace_tol = setup.config.tolerances.trace;
    let passed = checks.f1_rel <= tol && checks.i0_rel <= tol && checks.i1_rel <= tol && checks.fn1_rel <= trace_tol;
    Ok(PointRecord {
        index,
        x: p.x.as_slice().to_vec(),
        y: p.y.as_slice().to_vec(),
        f: pp.jet.f,
        f_tilde: pp.jet_tilde.f,
        g: rows(&pp.jet.g),
        h: rows(&pp.jet.h),
        h_tensor: rows(&pp.h_tensor().h),
        first_integrals: fi.f.clone(),
        delta: fi.delta.clone(),
        mu: pp.mu()?,
        i0: pp.painleve_i0()?,
        i1: pp.tm_i1()?,
        sarlet_k: rows(&pp.sarlet_k()?),
        checks,
        passed,
    })
}

pub fn evaluate(setup: &Setup) -> Result<Outcome, CliError> {
    let tol = setup.tolerance_or(setup.config.tolerances.identity);
    let points = setup.tangent_points()?;
    let records = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| evaluate_point(setup, i, p, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = records.iter().all(|r| r.passed);

    let n = setup.config.dimension;
    let mut table = Table::new(
        ["index"]
            .into_iter()
            .map(String::from)
            .chain(indexed("x", n))
            .chain(indexed("y", n))
            .chain(["F", "F_tilde"].map(String::from))
            .chain(indexed("f", n))
            .chain(["mu", "I0", "I1", "f1_rel", "fn1_rel", "i0_rel", "i1_rel", "passed"].map(String::from))
            .collect(),
    );
    for r in &records {
        let c = &r.checks;
        table.push(
            std::iter::once(r.index.to_string())
                .chain(cells(&r.x))
                .chain(cells(&r.y))
                .chain(cells(&[r.f, r.f_tilde]))
                .chain(cells(&r.first_integrals))
                .chain(cells(&[r.mu, r.i0, r.i1, c.f1_rel, c.fn1_rel, c.i0_rel, c.i1_rel]))
                .chain(std::iter::once(r.passed.to_string()))
                .collect(),
        );
    }
    let report = EvaluateReport {
        header: header(setup, "evaluate"),
        identity_tolerance: tol,
        trace_tolerance: setup.config.tolerances.trace,
        points: records,
        passed,
    };
    Outcome::new(passed, &report, table)
}

// ---------------------------------------------------------------- geodesic

#[derive(Serialize)]
struct AlphaDrift {
    alpha: usize,
    initial: f64,
    max_abs: f64,
    max_rel: f64,
}

#[derive(Serialize)]
struct Sample {
    t: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    f: Vec<f64>,
    energy: f64,
}

#[derive(Serialize)]
struct TrajectoryReport {
    index: usize,
    x0: Vec<f64>,
    y0: Vec<f64>,
    integrator: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    termination: Option<Termination>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_final: Option<f64>,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<IntegratorStats>,
    integrals: Vec<AlphaDrift>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<Drift>,
    energy_within_tolerance: bool,
    max_drift: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    trajectory: Vec<Sample>,
}

#[derive(Serialize)]
struct GeodesicReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    t_end: f64,
    drift_tolerance: f64,
    energy_tolerance: f64,
    max_drift: f64,
    trajectories: Vec<TrajectoryReport>,
    passed: bool,
}

fn run_trajectory(setup: &Setup, index: usize, p0: &TangentPoint, tol: f64) -> TrajectoryReport {
    let cfg = &setup.config;
    let method = cfg.integrator.method;
    let mut report = TrajectoryReport {
        index,
        x0: p0.x.as_slice().to_vec(),
        y0: p0.y.as_slice().to_vec(),
        integrator: method.name(),
        termination: None,
        t_final: None,
        samples: 0,
        stats: None,
        integrals: Vec::new(),
        energy: None,
        energy_within_tolerance: false,
        max_drift: f64::NAN,
        passed: false,
        error: None,
        trajectory: Vec::new(),
    };
    let run = match conservation_run(&setup.pair, &setup.flow, p0, cfg.integrator.t_end, method) {
        Ok(run) => run,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.termination = Some(run.trajectory.termination);
    report.t_final = Some(run.trajectory.final_time());
    report.samples = run.trajectory.len();
    report.stats = Some(run.trajectory.stats);
    report.integrals = run
        .drifts
        .iter()
        .enumerate()
        .map(|(a, d)| AlphaDrift {
            alpha: a + 1,
            initial: d.initial,
            max_abs: d.max_abs,
            max_rel: d.max_rel,
        })
        .collect();
    report.energy = Some(run.energy_drift);
    report.energy_within_tolerance = run.energy_drift.max_rel <= cfg.tolerances.energy;
    report.max_drift = run.max_integral_drift();
    report.passed = report.max_drift <= tol;
    report.trajectory = run
        .trajectory
        .times
        .iter()
        .zip(&run.trajectory.states)
        .zip(run.integrals.iter().zip(&run.energy))
        .map(|((t, s), (f, e))| Sample {
            t: *t,
            x: s.x.as_slice().to_vec(),
            y: s.y.as_slice().to_vec(),
            f: f.clone(),
            energy: *e,
        })
        .collect();
    report
}

pub fn geodesic(setup: &Setup) -> Result<Outcome, CliError> {
    let tol = setup.tolerance_or(setup.config.tolerances.drift);
    let points = setup.tangent_points()?;
    let reports: Vec<TrajectoryReport> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| run_trajectory(setup, i, p, tol))
        .collect();
    let passed = reports.iter().all(|r| r.passed);
    let max_drift = reports.iter().map(|r| r.max_drift).fold(0.0, f64::max);

    let n = setup.config.dimension;
    let mut table = Table::new(
        ["trajectory", "t"]
            .into_iter()
            .map(String::from)
            .chain(indexed("x", n))
            .chain(indexed("y", n))
            .chain(indexed("f", n))
            .chain(std::iter::once("energy".to_string()))
            .collect(),
    );
    for r in &reports {
        for s in &r.trajectory {
            table.push(
                [r.index.to_string(), s.t.to_string()]
                    .into_iter()
                    .chain(cells(&s.x))
                    .chain(cells(&s.y))
                    .chain(cells(&s.f))
                    .chain(std::iter::once(s.energy.to_string()))
                    .collect(),
            );
        }
    }
    let report = GeodesicReport {
        header: header(setup, "geodesic"),
        t_end: setup.config.integrator.t_end,
        drift_tolerance: tol,
        energy_tolerance: setup.config.tolerances.energy,
        max_drift,
        trajectories: reports,
        passed,
    };
    Outcome::new(passed, &report, table)
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct ResidualRecord {
    index: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    residual: Vec<f64>,
    norm: f64,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    tolerance: f64,
    max_norm: f64,
    mean_norm: f64,
    points: Vec<ResidualRecord>,
    passed: bool,
}

pub fn verify(setup: &Setup) -> Result<Outcome, CliError> {
    let tol = setup.tolerance_or(setup.config.tolerances.rapcsak);
    let points = setup.tangent_points()?;
    let records = points
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let r = rapcsak_point(&setup.pair, p)?;
            Ok(ResidualRecord {
                index,
                x: p.x.as_slice().to_vec(),
                y: p.y.as_slice().to_vec(),
                norm: r.norm(),
                residual: r.as_slice().to_vec(),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let max_norm = records.iter().map(|r| r.norm).fold(0.0, f64::max);
    let mean_norm = records.iter().map(|r| r.norm).sum::<f64>() / records.len() as f64;
    let passed = max_norm <= tol;

    let n = setup.config.dimension;
    let mut table = Table::new(
        std::iter::once("index".to_string())
            .chain(indexed("x", n))
            .chain(indexed("y", n))
            .chain(indexed("r", n))
            .chain(std::iter::once("norm".to_string()))
            .collect(),
    );
    for r in &records {
        table.push(
            std::iter::once(r.index.to_string())
                .chain(cells(&r.x))
                .chain(cells(&r.y))
                .chain(cells(&r.residual))
                .chain(std::iter::once(r.norm.to_string()))
                .collect(),
        );
    }
    let report = VerifyReport {
        header: header(setup, "verify"),
        tolerance: tol,
        max_norm,
        mean_norm,
        points: records,
        passed,
    };
    Outcome::new(passed, &report, table)
}

// ---------------------------------------------------------------- oracle

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Serialize)]
struct CheckRecord {
    check: &'static str,
    point: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<usize>,
    gap: f64,
    tolerance: f64,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct CheckSummary {
    check: &'static str,
    count: usize,
    skipped: usize,
    max_gap: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct OracleReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    summary: Vec<CheckSummary>,
    checks: Vec<CheckRecord>,
    passed: bool,
}

const CHECKS: [&str; 3] = ["charpoly_interpolation", "delta_combinatorial", "fd_y_hessian"];

fn judged(check: &'static str, point: usize, alpha: Option<usize>, gap: f64, tolerance: f64) -> CheckRecord {
    CheckRecord {
        check,
        point,
        alpha,
        gap,
        tolerance,
        status: if gap <= tolerance { Status::Pass } else { Status::Fail },
        note: None,
    }
}

fn fd_hessian_gap(metric: &FinslerMetric, p: &TangentPoint, step: f64) -> Result<f64, Error> {
    let (_, _, ad) = y_jet2(metric, p.x.as_slice(), p.y.as_slice())?;
    let fd = fd_derivative(metric, p.x.as_slice(), p.y.as_slice(), Derivative::YHessian, step)?
        .into_matrix()
        .expect("Hessian request yields a matrix");
    Ok((&ad - &fd).amax() / fd.amax().max(f64::MIN_POSITIVE))
}

fn oracle_point(setup: &Setup, index: usize, p: &TangentPoint, tol_override: Option<f64>) -> Result<Vec<CheckRecord>, Error> {
    let t = &setup.config.tolerances;
    let oc = &setup.config.oracle;
    let n = setup.config.dimension;
    let mut out = Vec::new();

    let pp = PairPoint::new(&setup.pair, p)?;
    let h = pp.h_tensor().h;
    let fl = charpoly_coefficients(&h)?;
    let tol = tol_override.unwrap_or(t.oracle_charpoly);
    match charpoly_by_interpolation(&h, oc.nodes.as_deref()) {
        Ok(interp) => {
            let diff = interp.iter().zip(&fl).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = fl.iter().map(|v| v.abs()).fold(0.0, f64::max);
            out.push(judged(CHECKS[0], index, None, diff / scale, tol));
        }
        Err(e @ Error::OracleConditioning(_)) => out.push(CheckRecord {
            check: CHECKS[0],
            point: index,
            alpha: None,
            gap: f64::NAN,
            tolerance: tol,
            status: Status::Fail,
            note: Some(e.to_string()),
        }),
        Err(e) => return Err(e),
    }

    let fi = pp.first_integrals()?;
    let tol = tol_override.unwrap_or(t.oracle_delta);
    for alpha in 1..=n {
        match delta_alpha_combinatorial(&setup.pair, p, alpha) {
            Ok(d) => out.push(judged(CHECKS[1], index, Some(alpha), relative_gap(d, fi.delta[alpha - 1]), tol)),
            Err(e @ Error::OracleScopeExceeded { .. }) => {
                out.push(CheckRecord {
                    check: CHECKS[1],
                    point: index,
                    alpha: None,
                    gap: f64::NAN,
                    tolerance: tol,
                    status: Status::Skipped,
                    note: Some(e.to_string()),
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let tol = tol_override.unwrap_or(t.oracle_fd);
    for metric in [&setup.pair.base, &setup.pair.comparison] {
        let gap = fd_hessian_gap(metric, p, oc.fd_step)?;
        let mut rec = judged(CHECKS[2], index, None, gap, tol);
        rec.note = Some(metric.to_string());
        out.push(rec);
    }
    Ok(out)
}

pub fn oracle(setup: &Setup) -> Result<Outcome, CliError> {
    let points = setup.tangent_points()?;
    let per_point = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| oracle_point(setup, i, p, setup.tolerance_override))
        .collect::<Result<Vec<_>, Error>>()?;
    let checks: Vec<CheckRecord> = per_point.into_iter().flatten().collect();
    let summary: Vec<CheckSummary> = CHECKS
        .iter()
        .map(|&name| {
            let of: Vec<&CheckRecord> = checks.iter().filter(|c| c.check == name).collect();
            let judged: Vec<&&CheckRecord> = of.iter().filter(|c| c.status != Status::Skipped).collect();
            CheckSummary {
                check: name,
                count: judged.len(),
                skipped: of.len() - judged.len(),
                max_gap: judged.iter().map(|c| c.gap).fold(0.0, f64::max),
                tolerance: of.first().map_or(f64::NAN, |c| c.tolerance),
                passed: judged.iter().all(|c| c.status == Status::Pass),
            }
        })
        .collect();
    let passed = summary.iter().all(|s| s.passed);

    let mut table = Table::new(
        ["check", "point", "alpha", "gap", "tolerance", "status", "note"]
            .map(String::from)
            .to_vec(),
    );
    for c in &checks {
        table.push(vec![
            c.check.to_string(),
            c.point.to_string(),
            c.alpha.map_or(String::new(), |a| a.to_string()),
            c.gap.to_string(),
            c.tolerance.to_string(),
            serde_json::to_value(c.status)?.as_str().unwrap_or_default().to_string(),
            c.note.clone().unwrap_or_default(),
        ]);
    }
    let report = OracleReport {
        header: header(setup, "oracle"),
        summary,
        checks,
        passed,
    };
    Outcome::new(passed, &report, table)
}
