//! SNR sweeps pairing analytic, asymptotic and simulated SOPs, plus the
//! CSV / JSON-lines table format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::analytic::{sop_asymptotic, sop_closed_form};
use crate::model::{db_to_linear, linear_to_db, CaseId, RateThreshold, ScenarioScaling, SnrTriple};
use crate::montecarlo::{estimate_sop_paired, Parallelism};
use crate::stats::ls_slope;
use crate::{Error, Result};

/// Column order of every table written by this module.
pub const COLUMNS: [&str; 12] = [
    "case",
    "gamma_d_db",
    "gamma_r_db",
    "gamma_e_db",
    "rate",
    "sop_analytic",
    "sop_asymptotic",
    "sop_limit",
    "sop_mc",
    "mc_ci_low",
    "mc_ci_high",
    "excess",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// `gamma_e` fixed while `gamma_r = alpha * gamma_d` grows.
    FixedEve,
    /// `gamma_r = alpha * gamma_d = beta * gamma_e` all grow together.
    ScaledEve,
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-eve" => Ok(Scenario::FixedEve),
            "scaled-eve" => Ok(Scenario::ScaledEve),
            other => Err(Error::validation(format!("unknown scenario '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    JsonLines,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "jsonl" | "json-lines" => Ok(TableFormat::JsonLines),
            other => Err(Error::validation(format!("unknown table format '{other}'"))),
        }
    }
}

/// One SNR sweep. `beta` goes with [`Scenario::ScaledEve`], `gamma_e_fixed`
/// (linear) with [`Scenario::FixedEve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub cases: Vec<CaseId>,
    pub gamma_d_db_start: f64,
    pub gamma_d_db_stop: f64,
    pub gamma_d_db_step: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma_e_fixed: Option<f64>,
    pub r: RateThreshold,
    /// 0 disables simulation.
    pub mc_samples: u64,
    pub seed: u64,
}

impl SweepSpec {
    /// Fixed eavesdropper at 1 dB, `alpha = 0.5`, `R = 1`, 0–50 dB in 2 dB steps.
    pub fn fixed_eve_default() -> Self {
        Self {
            scenario: Scenario::FixedEve,
            cases: CaseId::ANALYTIC.to_vec(),
            gamma_d_db_start: 0.0,
            gamma_d_db_stop: 50.0,
            gamma_d_db_step: 2.0,
            alpha: 0.5,
            beta: None,
            gamma_e_fixed: Some(10f64.powf(0.1)),
            r: RateThreshold::new(1.0).expect("positive rate"),
            mc_samples: 0,
            seed: 1,
        }
    }

    /// `alpha = 0.5`, `beta = 1`, `R = 1`, 0–50 dB in 2 dB steps.
    pub fn scaled_eve_default() -> Self {
        Self {
            scenario: Scenario::ScaledEve,
            beta: Some(1.0),
            gamma_e_fixed: None,
            ..Self::fixed_eve_default()
        }
    }

    fn scaling(&self) -> Result<ScenarioScaling> {
        ScenarioScaling::new(self.alpha, self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, step) = (self.gamma_d_db_start, self.gamma_d_db_stop, self.gamma_d_db_step);
        if !(a.is_finite() && b.is_finite() && step.is_finite()) {
            return Err(Error::validation("sweep endpoints and step must be finite"));
        }
        if a > b {
            return Err(Error::validation(format!("sweep start {a} dB exceeds stop {b} dB")));
        }
        if step <= 0.0 {
            return Err(Error::validation(format!("sweep step must be > 0, got {step}")));
        }
        if self.cases.is_empty() {
            return Err(Error::validation("no cases selected"));
        }
        match (self.scenario, self.beta, self.gamma_e_fixed) {
            (Scenario::ScaledEve, Some(_), None) | (Scenario::FixedEve, None, Some(_)) => {}
            (Scenario::ScaledEve, _, _) => {
                return Err(Error::validation("scaled-eve sweeps need beta and no fixed gamma_e"))
            }
            (Scenario::FixedEve, _, _) => {
                return Err(Error::validation("fixed-eve sweeps need a fixed gamma_e and no beta"))
            }
        }
        let scaling = self.scaling()?;
        // validates gamma_e_fixed
        SnrTriple::from_scenario(1.0, scaling, self.gamma_e_fixed)?;
        Ok(())
    }

    /// Grid of `gamma_d` values in dB, endpoints included.
    pub fn grid_db(&self) -> Vec<f64> {
        let span = (self.gamma_d_db_stop - self.gamma_d_db_start) / self.gamma_d_db_step;
        let count = (span + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.gamma_d_db_start + i as f64 * self.gamma_d_db_step)
            .collect()
    }
}

/// One `(case, gamma_d)` point of a sweep. Columns without a value (analytic
/// quantities of the conventional variant, skipped simulation) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub case: CaseId,
    pub gamma_d_db: f64,
    pub gamma_r_db: f64,
    pub gamma_e_db: f64,
    pub rate: f64,
    pub sop_analytic: Option<f64>,
    pub sop_asymptotic: Option<f64>,
    pub sop_limit: Option<f64>,
    pub sop_mc: Option<f64>,
    pub mc_ci_low: Option<f64>,
    pub mc_ci_high: Option<f64>,
    /// `sop_analytic - sop_limit`.
    pub excess: Option<f64>,
}

/// Whether the simulation budget can resolve probability `p`: at least one
/// expected outage. With 10^6 samples this skips points below 10^-6.
fn mc_worthwhile(p: Option<f64>, samples: u64) -> bool {
    samples > 0 && p.map_or(true, |p| p * samples as f64 >= 1.0)
}

fn sweep_point(spec: &SweepSpec, cases: &[CaseId], gamma_d_db: f64) -> Result<Vec<SweepRow>> {
    let scaling = spec.scaling()?;
    let gamma_d = db_to_linear(gamma_d_db)?;
    let snrs = SnrTriple::from_scenario(gamma_d, scaling, spec.gamma_e_fixed)?;

    let mut rows = Vec::with_capacity(cases.len());
    for &case in cases {
        let (analytic, asym, limit) = if case.has_closed_form() {
            let a = sop_asymptotic(case, gamma_d, scaling, spec.gamma_e_fixed, spec.r)?;
            (Some(sop_closed_form(case, &snrs, spec.r)?), Some(a.approx), Some(a.limit))
        } else {
            (None, None, None)
        };
        rows.push(SweepRow {
            case,
            gamma_d_db,
            gamma_r_db: linear_to_db(snrs.gamma_r())?,
            gamma_e_db: linear_to_db(snrs.gamma_e())?,
            rate: spec.r.bits(),
            sop_analytic: analytic,
            sop_asymptotic: asym,
            sop_limit: limit,
            sop_mc: None,
            mc_ci_low: None,
            mc_ci_high: None,
            excess: analytic.zip(limit).map(|(p, l)| p - l),
        });
    }

    // Simulate the cases that need it on common draws.
    let simulate: Vec<usize> = (0..rows.len())
        .filter(|&i| mc_worthwhile(rows[i].sop_analytic, spec.mc_samples))
        .collect();
    if !simulate.is_empty() {
        let sim_cases: Vec<CaseId> = simulate.iter().map(|&i| rows[i].case).collect();
        let est = estimate_sop_paired(
            &sim_cases,
            &snrs,
            spec.r,
            spec.mc_samples,
            spec.seed,
            Parallelism::Auto,
        )?;
        for (&i, e) in simulate.iter().zip(est) {
            rows[i].sop_mc = Some(e.value);
            rows[i].mc_ci_low = Some(e.ci_low);
            rows[i].mc_ci_high = Some(e.ci_high);
        }
    }
    Ok(rows)
}

/// Evaluates the sweep. Rows are ordered by case, then by `gamma_d`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut cases = spec.cases.clone();
    cases.sort();
    cases.dedup();
    let grid = spec.grid_db();

    #[cfg(feature = "parallel")]
    let per_point: Vec<Result<Vec<SweepRow>>> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&db| sweep_point(spec, &cases, db)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_point: Vec<Result<Vec<SweepRow>>> =
        grid.iter().map(|&db| sweep_point(spec, &cases, db)).collect();

    let mut by_case: Vec<Vec<SweepRow>> = vec![Vec::with_capacity(grid.len()); cases.len()];
    for point in per_point {
        for (slot, row) in by_case.iter_mut().zip(point?) {
            slot.push(row);
        }
    }
    Ok(by_case.into_iter().flatten().collect())
}

/// Secrecy diversity order: minus the least-squares slope of
/// `log10(sop_analytic)` against `log10(gamma_d)` over rows whose
/// `gamma_d_db` lies in the inclusive window.
pub fn fit_diversity_order(rows: &[SweepRow], fit_window_db: (f64, f64)) -> Result<f64> {
    let (lo, hi) = fit_window_db;
    let tol = 1e-9;
    let window: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.gamma_d_db >= lo - tol && r.gamma_d_db <= hi + tol)
        .collect();
    if window.len() < 3 {
        return Err(Error::validation(format!(
            "need at least 3 rows in [{lo}, {hi}] dB, found {}",
            window.len()
        )));
    }
    let case = window[0].case;
    let mut points = Vec::with_capacity(window.len());
    for row in window {
        if row.case != case {
            return Err(Error::validation("fit window mixes rows from different cases"));
        }
        if row.sop_limit.is_some_and(|l| l > 0.0) {
            return Err(Error::validation(
                "diversity order is fitted on fixed-eve rows (zero SOP floor)",
            ));
        }
        let p = row
            .sop_analytic
            .ok_or_else(|| Error::validation(format!("row for case {case} has no analytic SOP")))?;
        if !(p > 0.0) {
            return Err(Error::validation(format!(
                "non-positive SOP {p} at {} dB",
                row.gamma_d_db
            )));
        }
        points.push((row.gamma_d_db / 10.0, p.log10()));
    }
    ls_slope(&points)
        .map(|s| -s)
        .ok_or_else(|| Error::validation("fit window has no spread in gamma_d"))
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn json_num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => fmt_num(v),
        _ => "null".to_string(),
    }
}

impl SweepRow {
    fn numeric_fields(&self) -> [Option<f64>; 11] {
        [
            Some(self.gamma_d_db),
            Some(self.gamma_r_db),
            Some(self.gamma_e_db),
            Some(self.rate),
            self.sop_analytic,
            self.sop_asymptotic,
            self.sop_limit,
            self.sop_mc,
            self.mc_ci_low,
            self.mc_ci_high,
            self.excess,
        ]
    }

    fn from_fields(case: CaseId, f: [Option<f64>; 11]) -> Result<Self> {
        let need = |v: Option<f64>, col: &str| {
            v.ok_or_else(|| Error::Parse(format!("column {col} must not be empty")))
        };
        Ok(Self {
            case,
            gamma_d_db: need(f[0], "gamma_d_db")?,
            gamma_r_db: need(f[1], "gamma_r_db")?,
            gamma_e_db: need(f[2], "gamma_e_db")?,
            rate: need(f[3], "rate")?,
            sop_analytic: f[4],
            sop_asymptotic: f[5],
            sop_limit: f[6],
            sop_mc: f[7],
            mc_ci_low: f[8],
            mc_ci_high: f[9],
            excess: f[10],
        })
    }
}

/// Writes rows to any sink. CSV gets a header line; numbers carry 17
/// significant digits; empty values are empty CSV fields or JSON `null`.
pub fn write_rows<W: Write>(rows: &[SweepRow], out: W, format: TableFormat) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    match format {
        TableFormat::Csv => {
            writeln!(out, "{}", COLUMNS.join(","))?;
            for row in rows {
                let mut line = row.case.label().to_string();
                for v in row.numeric_fields() {
                    line.push(',');
                    line.push_str(&fmt_opt(v));
                }
                writeln!(out, "{line}")?;
            }
        }
        TableFormat::JsonLines => {
            for row in rows {
                let mut line = format!("{{\"case\":\"{}\"", row.case.label());
                for (name, v) in COLUMNS[1..].iter().zip(row.numeric_fields()) {
                    line.push_str(&format!(",\"{name}\":{}", json_num(v)));
                }
                line.push('}');
                writeln!(out, "{line}")?;
            }
        }
    }
    out.flush()
}

/// Writes rows to `destination`, reporting I/O failures with the path.
pub fn write_table(rows: &[SweepRow], destination: &Path, format: TableFormat) -> Result<()> {
    let io_err = |source| Error::Io {
        path: destination.to_path_buf(),
        source,
    };
    let file = File::create(destination).map_err(io_err)?;
    write_rows(rows, file, format).map_err(io_err)
}

fn parse_case(s: &str) -> Result<CaseId> {
    s.parse().map_err(|_| Error::Parse(format!("unknown case label '{s}'")))
}

/// Parses a table written by [`write_rows`].
pub fn read_rows<R: Read>(input: R, format: TableFormat) -> Result<Vec<SweepRow>> {
    match format {
        TableFormat::Csv => {
            let mut reader = csv::Reader::from_reader(input);
            let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
            if header.iter().ne(COLUMNS.iter().copied()) {
                return Err(Error::Parse(format!("unexpected header: {header:?}")));
            }
            let mut rows = Vec::new();
            for record in reader.records() {
                let record = record.map_err(|e| Error::Parse(e.to_string()))?;
                let case = parse_case(&record[0])?;
                let mut f = [None; 11];
                for (slot, field) in f.iter_mut().zip(record.iter().skip(1)) {
                    if !field.is_empty() {
                        *slot = Some(field.parse::<f64>().map_err(|e| {
                            Error::Parse(format!("bad number '{field}': {e}"))
                        })?);
                    }
                }
                rows.push(SweepRow::from_fields(case, f)?);
            }
            Ok(rows)
        }
        TableFormat::JsonLines => {
            let mut rows = Vec::new();
            for line in BufReader::new(input).lines() {
                let line = line.map_err(|e| Error::Parse(e.to_string()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let v: serde_json::Value =
                    serde_json::from_str(&line).map_err(|e| Error::Parse(e.to_string()))?;
                let case = v["case"]
                    .as_str()
                    .ok_or_else(|| Error::Parse("missing case".into()))
                    .and_then(parse_case)?;
                let mut f = [None; 11];
                for (slot, name) in f.iter_mut().zip(&COLUMNS[1..]) {
                    *slot = v[*name].as_f64();
                }
                // JSON has no infinities; an absent eavesdropper is written as null
                if f[2].is_none() {
                    f[2] = Some(f64::NEG_INFINITY);
                }
                rows.push(SweepRow::from_fields(case, f)?);
            }
            Ok(rows)
        }
    }
}
