//! Comma-separated output plus aligned text tables.
//!
//! Deterministic results and wall-clock timings go to separate files so the
//! former stay byte-reproducible for a fixed (config, seed).

use super::runners::{CollisionBenchReport, PlanningReport, SweepReport};
use super::{fmt_opt, BenchError};
use std::path::Path;

fn write_lines(path: &Path, header: &str, rows: &[String]) -> Result<(), BenchError> {
    let mut out = String::with_capacity(rows.len() * 48 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes `metrics.csv` (deterministic) and `metrics_timing.csv`.
pub fn write_collision_csvs(report: &CollisionBenchReport, dir: &Path) -> Result<(), BenchError> {
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.trial,
                r.move_idx,
                r.checker,
                r.metrics.tp,
                r.metrics.fp,
                r.metrics.tn,
                r.metrics.fn_,
                fmt_opt(r.metrics.accuracy),
                fmt_opt(r.metrics.tpr),
                fmt_opt(r.metrics.tnr),
                fmt_opt(r.support_count.map(|s| s as f64)),
                r.converged,
            )
        })
        .collect();
    write_lines(
        &dir.join("metrics.csv"),
        "trial,move,checker,tp,fp,tn,fn,accuracy,tpr,tnr,support_count,converged",
        &rows,
    )?;

    let trows: Vec<String> = report
        .timing
        .iter()
        .map(|t| {
            format!(
                "{},{},{},{},{}",
                t.trial,
                t.move_idx,
                t.checker,
                t.query_time_us,
                fmt_opt(t.update_time_ms),
            )
        })
        .collect();
    write_lines(
        &dir.join("metrics_timing.csv"),
        "trial,move,checker,query_time_us,update_time_ms",
        &trows,
    )
}

/// Writes `sweep.csv` (deterministic) and `sweep_timing.csv`.
pub fn write_sweep_csvs(report: &SweepReport, dir: &Path) -> Result<(), BenchError> {
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{}",
                r.obstacle_count,
                r.checker,
                fmt_opt(r.support_count.map(|s| s as f64)),
                fmt_opt(r.accuracy),
            )
        })
        .collect();
    write_lines(
        &dir.join("sweep.csv"),
        "obstacle_count,checker,support_count,accuracy",
        &rows,
    )?;

    let trows: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{},{},{}", r.obstacle_count, r.checker, r.query_time_us))
        .collect();
    write_lines(
        &dir.join("sweep_timing.csv"),
        "obstacle_count,checker,query_time_us",
        &trows,
    )
}

/// Writes `planning.csv` (deterministic) and `planning_timing.csv`.
pub fn write_planning_csvs(report: &PlanningReport, dir: &Path) -> Result<(), BenchError> {
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.planner,
                r.checker,
                r.trial,
                r.success,
                fmt_opt(r.initial_length),
                fmt_opt(r.final_length),
                fmt_opt(r.repaired_segments.map(|s| s as f64)),
            )
        })
        .collect();
    write_lines(
        &dir.join("planning.csv"),
        "planner,checker,trial,success,initial_length,final_length,repaired_segments",
        &rows,
    )?;

    let trows: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.planner, r.checker, r.trial, r.plan_time_ms, r.verify_time_ms, r.repair_time_ms,
            )
        })
        .collect();
    write_lines(
        &dir.join("planning_timing.csv"),
        "planner,checker,trial,plan_time_ms,verify_time_ms,repair_time_ms",
        &trows,
    )
}

fn align(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let emit = |out: &mut String, cells: &[String]| {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(&format!("{:>width$}", c, width = widths[i]));
        }
        out.push('\n');
    };
    emit(&mut out, &headers.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    for row in rows {
        emit(&mut out, row);
    }
    out
}

fn f3(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "undef".into(),
    }
}

/// Aggregated per-checker summary in the shape of a results table.
pub fn render_collision_table(report: &CollisionBenchReport) -> String {
    use super::{CheckerKind, Stats};
    let mut rows = Vec::new();
    for kind in [CheckerKind::FastronFk, CheckerKind::FastronRq, CheckerKind::OracleGjk] {
        let acc = report.metric_values(kind, |r| r.metrics.accuracy);
        if acc.is_empty() {
            continue;
        }
        let tpr = report.metric_values(kind, |r| r.metrics.tpr);
        let tnr = report.metric_values(kind, |r| r.metrics.tnr);
        let sup = report.metric_values(kind, |r| r.support_count.map(|s| s as f64));
        let q = report.mean_query_time_us(kind);
        let stat = |xs: &[f64]| {
            Stats::from_samples(xs)
                .map(|s| format!("{:.3} ± {:.3}", s.mean, s.std))
                .unwrap_or_else(|| "undef".into())
        };
        rows.push(vec![
            kind.to_string(),
            stat(&acc),
            stat(&tpr),
            stat(&tnr),
            if sup.is_empty() { "-".into() } else { stat(&sup) },
            f3(q),
        ]);
    }
    align(
        &["checker", "accuracy", "tpr", "tnr", "|S|", "query_us"],
        &rows,
    )
}

pub fn render_sweep_table(report: &SweepReport) -> String {
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.obstacle_count.to_string(),
                r.checker.to_string(),
                r.support_count.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
                f3(r.accuracy),
                format!("{:.3}", r.query_time_us),
            ]
        })
        .collect();
    align(&["obstacles", "checker", "|S|", "accuracy", "query_us"], &rows)
}

pub fn render_planning_table(report: &PlanningReport) -> String {
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.planner.to_string(),
                r.checker.to_string(),
                r.trial.to_string(),
                r.success.to_string(),
                f3(r.initial_length),
                f3(r.final_length),
                r.repaired_segments.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
                format!("{:.3}", r.plan_time_ms + r.verify_time_ms + r.repair_time_ms),
            ]
        })
        .collect();
    align(
        &["planner", "checker", "trial", "ok", "len0", "len", "repairs", "total_ms"],
        &rows,
    )
}
