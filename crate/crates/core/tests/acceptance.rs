//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use df_secrecy::analytic::sop_closed_form;
use df_secrecy::model::CaseId;
use df_secrecy::montecarlo::{estimate_sop_paired, Parallelism, SopEstimate};
use df_secrecy::stats::score_standard_error;
use df_secrecy::sweep::{fit_diversity_order, run_sweep, SweepRow, SweepSpec};
use df_secrecy::validate::{reference_grid, run_validation, ClosedForm, GridCell, ValidationConfig};

/// Tolerances, pinned.
const MC_SAMPLES: u64 = 1_000_000;
const MC_SIGMAS: f64 = 4.0;
const FIG2_ASYMPTOTE_REL: f64 = 0.05;
const FIG2_ASYMPTOTE_FROM_DB: f64 = 40.0;
const FIG3_LIMIT_REL: f64 = 0.01;
const FIG3_AT_DB: f64 = 50.0;
const FIG4_SLOPE_REL: f64 = 0.02;
const FIG4_FROM_DB: f64 = 40.0;
const SDO_WINDOW_DB: (f64, f64) = (30.0, 50.0);
const SDO_TOL: f64 = 0.05;

/// Limits at alpha = 0.5, beta = 1, R = 1:
/// 1 - 1/(1 + 0.5*2), 1 - 1/(1 + 2), 1 - (1/2)(1/3).
const LIMITS: [f64; 3] = [0.5, 2.0 / 3.0, 5.0 / 6.0];
/// Scaled-regime slopes at alpha = 0.5, beta = 1, R = 1, with
/// (2^R - 1)(1 + 1/alpha) = 3: 3/2, 3/3, 3/(2*3).
const SCALED_SLOPES: [f64; 3] = [1.5, 1.0, 0.5];

struct Outcome {
    passed: bool,
    summary: String,
}

fn rows_for(rows: &[SweepRow], case: CaseId) -> Vec<SweepRow> {
    rows.iter().filter(|r| r.case == case).cloned().collect()
}

fn case_index(case: CaseId) -> usize {
    CaseId::ANALYTIC.iter().position(|&c| c == case).unwrap()
}

/// Paired estimates (cases I, II, III, conventional) for every cell of the
/// 81-point reference grid.
fn grid_estimates() -> Vec<(GridCell, Vec<SopEstimate>)> {
    reference_grid()
        .into_iter()
        .enumerate()
        .map(|(i, cell)| {
            let est = estimate_sop_paired(
                &CaseId::ALL,
                &cell.snrs(),
                cell.r(),
                MC_SAMPLES,
                1000 + i as u64,
                Parallelism::Auto,
            )
            .expect("valid grid cell");
            (cell, est)
        })
        .collect()
}

fn criterion_1(grid: &[(GridCell, Vec<SopEstimate>)]) -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut cells = 0;
    for (cell, est) in grid {
        for e in &est[..3] {
            let p = sop_closed_form(e.case, &cell.snrs(), cell.r()).unwrap();
            let z = (e.value - p).abs() / score_standard_error(p, MC_SAMPLES);
            worst = worst.max(z);
            cells += 1;
            if z > MC_SIGMAS {
                failures.push(format!("case {} at {cell}: MC {} vs {p} ({z:.2} SE)", e.case, e.value));
            }
        }
    }
    Outcome {
        passed: failures.is_empty() && cells == 243,
        summary: format!(
            "closed form vs Monte Carlo: {cells} cells at n={MC_SAMPLES}, worst deviation {worst:.2} SE (bound {MC_SIGMAS}){}",
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    }
}

fn criterion_2() -> Outcome {
    let spec = SweepSpec {
        mc_samples: MC_SAMPLES,
        ..SweepSpec::fixed_eve_default()
    };
    let rows = run_sweep(&spec).unwrap();
    let mut problems = Vec::new();
    let per_case: Vec<Vec<SweepRow>> = CaseId::ANALYTIC.iter().map(|&c| rows_for(&rows, c)).collect();

    for (case, own) in CaseId::ANALYTIC.iter().zip(&per_case) {
        for w in own.windows(2) {
            if !(w[1].sop_analytic.unwrap() < w[0].sop_analytic.unwrap()) {
                problems.push(format!("case {case} not decreasing at {} dB", w[1].gamma_d_db));
            }
        }
    }
    let mut worst_asym = 0.0f64;
    for i in 0..per_case[0].len() {
        let p: Vec<f64> = per_case.iter().map(|c| c[i].sop_analytic.unwrap()).collect();
        if !(p[2] > p[1] && p[1] > p[0]) {
            problems.push(format!("P3 > P2 > P1 violated at {} dB: {p:?}", per_case[0][i].gamma_d_db));
        }
        for own in &per_case {
            let row = &own[i];
            if row.gamma_d_db >= FIG2_ASYMPTOTE_FROM_DB - 1e-9 {
                let a = row.sop_analytic.unwrap();
                let rel = (row.sop_asymptotic.unwrap() - a).abs() / a;
                worst_asym = worst_asym.max(rel);
                if rel > FIG2_ASYMPTOTE_REL {
                    problems.push(format!("case {} asymptote off by {rel:.4} at {} dB", row.case, row.gamma_d_db));
                }
            }
            if let Some(mc) = row.sop_mc {
                let a = row.sop_analytic.unwrap();
                let z = (mc - a).abs() / score_standard_error(a, MC_SAMPLES);
                if z > MC_SIGMAS {
                    problems.push(format!("case {} MC off by {z:.2} SE at {} dB", row.case, row.gamma_d_db));
                }
            }
        }
    }
    Outcome {
        passed: problems.is_empty(),
        summary: format!(
            "fixed-eve sweep (alpha=0.5, gamma_e=1 dB, R=1, 0-50 dB): monotone, P3 > P2 > P1 at all {} points, worst asymptote error at >= 40 dB {:.4} (bound {FIG2_ASYMPTOTE_REL}){}",
            per_case[0].len(),
            worst_asym,
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    }
}

fn scaled_rows() -> Vec<SweepRow> {
    run_sweep(&SweepSpec::scaled_eve_default()).unwrap()
}

fn criterion_3(rows: &[SweepRow]) -> Outcome {
    let mut problems = Vec::new();
    let mut at_top = [0.0; 3];
    for case in CaseId::ANALYTIC {
        let i = case_index(case);
        let row = rows
            .iter()
            .find(|r| r.case == case && (r.gamma_d_db - FIG3_AT_DB).abs() < 1e-9)
            .expect("50 dB grid point");
        let p = row.sop_analytic.unwrap();
        at_top[i] = p;
        let rel = (p - LIMITS[i]).abs() / LIMITS[i];
        if rel > FIG3_LIMIT_REL {
            problems.push(format!("case {case}: {p} vs limit {} ({rel:.4})", LIMITS[i]));
        }
        if (row.sop_limit.unwrap() - LIMITS[i]).abs() > 1e-12 {
            problems.push(format!("case {case}: computed limit {} != {}", row.sop_limit.unwrap(), LIMITS[i]));
        }
    }
    let lim: Vec<f64> = CaseId::ANALYTIC
        .iter()
        .map(|&c| rows_for(rows, c)[0].sop_limit.unwrap())
        .collect();
    if !(lim[2] > lim[1] && lim[1] > lim[0]) {
        problems.push(format!("plateau ordering violated: {lim:?}"));
    }
    Outcome {
        passed: problems.is_empty(),
        summary: format!(
            "scaled-eve limits (alpha=0.5, beta=1, R=1): SOP at 50 dB = [{:.6}, {:.6}, {:.6}] vs [0.5, 0.6667, 0.8333] within {FIG3_LIMIT_REL}, P3lim > P2lim > P1lim{}",
            at_top[0],
            at_top[1],
            at_top[2],
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    }
}

fn criterion_4(rows: &[SweepRow]) -> Outcome {
    let mut problems = Vec::new();
    let mut worst = 0.0f64;
    let mut at_top = [0.0; 3];
    for case in CaseId::ANALYTIC {
        let i = case_index(case);
        for row in rows_for(rows, case).iter().filter(|r| r.gamma_d_db >= FIG4_FROM_DB - 1e-9) {
            let gd = 10f64.powf(row.gamma_d_db / 10.0);
            let scaled = row.excess.unwrap() * gd;
            let rel = (scaled - SCALED_SLOPES[i]).abs() / SCALED_SLOPES[i];
            worst = worst.max(rel);
            at_top[i] = scaled;
            if rel > FIG4_SLOPE_REL {
                problems.push(format!("case {case} at {} dB: {scaled} vs {}", row.gamma_d_db, SCALED_SLOPES[i]));
            }
        }
    }
    if !(at_top[2] < at_top[1] && at_top[1] < at_top[0]) {
        problems.push(format!("M^3 < M^2 < M^1 violated: {at_top:?}"));
    }
    Outcome {
        passed: problems.is_empty(),
        summary: format!(
            "scaled-eve convergence: (P - Plim)*gamma_d at 50 dB = [{:.5}, {:.5}, {:.5}] vs [1.5, 1.0, 0.5], worst error at >= 40 dB {worst:.5} (bound {FIG4_SLOPE_REL}){}",
            at_top[0],
            at_top[1],
            at_top[2],
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    }
}

fn criterion_5() -> Outcome {
    let rows = run_sweep(&SweepSpec::fixed_eve_default()).unwrap();
    let mut orders = Vec::new();
    let mut passed = true;
    for case in CaseId::ANALYTIC {
        match fit_diversity_order(&rows_for(&rows, case), SDO_WINDOW_DB) {
            Ok(sdo) => {
                passed &= (sdo - 1.0).abs() <= SDO_TOL;
                orders.push(format!("{sdo:.4}"));
            }
            Err(e) => {
                passed = false;
                orders.push(format!("error: {e}"));
            }
        }
    }
    Outcome {
        passed,
        summary: format!(
            "secrecy diversity order over 30-50 dB (fixed-eve): [{}], expected 1 +/- {SDO_TOL}",
            orders.join(", ")
        ),
    }
}

fn criterion_6() -> Outcome {
    let cfg = ValidationConfig {
        mc_samples: 100_000,
        trials: 100_000,
        seed: 77,
    };
    let report = run_validation(&ClosedForm, &cfg);
    for c in &report.checks {
        println!(
            "        [{}] {}",
            if c.passed() { "pass" } else { "FAIL" },
            c.name
        );
    }
    let failed: Vec<&str> = report.failed().map(|c| c.name).collect();
    Outcome {
        passed: failed.is_empty(),
        summary: format!(
            "property suite: {}/{} checks passed{}",
            report.checks.len() - failed.len(),
            report.checks.len(),
            if failed.is_empty() { String::new() } else { format!("; failed: {failed:?}") }
        ),
    }
}

fn criterion_7(grid: &[(GridCell, Vec<SopEstimate>)]) -> Outcome {
    let mut violations = Vec::new();
    let mut min_gap = f64::INFINITY;
    let mut max_gap = 0.0f64;
    for (cell, est) in grid {
        let (c1, conv) = (&est[0], &est[3]);
        debug_assert_eq!(c1.case, CaseId::Case1);
        debug_assert_eq!(conv.case, CaseId::Case1Conventional);
        let gap = conv.value - c1.value;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
        if conv.outages < c1.outages {
            violations.push(format!("{cell}: conventional {} < case I {}", conv.value, c1.value));
        }
    }
    Outcome {
        passed: violations.is_empty(),
        summary: format!(
            "conventional vs case I on common draws: SOP gap in [{min_gap:.5}, {max_gap:.5}] over {} cells{}",
            grid.len(),
            violations.first().map(|v| format!("; {v}")).unwrap_or_default()
        ),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let grid = grid_estimates();
    let scaled = scaled_rows();

    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        ("AC1", Box::new(|| criterion_1(&grid))),
        ("AC2", Box::new(criterion_2)),
        ("AC3", Box::new(|| criterion_3(&scaled))),
        ("AC4", Box::new(|| criterion_4(&scaled))),
        ("AC5", Box::new(criterion_5)),
        ("AC6", Box::new(criterion_6)),
        ("AC7", Box::new(|| criterion_7(&grid))),
    ];

    let mut failed = 0;
    for (id, run) in criteria {
        let outcome = run();
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {id} {}", outcome.summary);
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1} s)",
        7 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
