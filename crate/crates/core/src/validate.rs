//! Self-check suite run by `df-secrecy validate`.
//!
//! Each check evaluates one property over a parameter grid or randomized
//! trials and records the first failing cell. The outage-probability model
//! is injected through [`SopModel`] so the suite can be pointed at a
//! deliberately broken implementation to confirm it notices.
//!
//! The SOP ordering "as stated" (the two branches swapped relative to what
//! the closed forms imply) is tallied separately and never gates the exit
//! status.

use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{ordering_predicates, slope_fixed_eve, slope_scaled_eve, sop_asymptotic, sop_closed_form, sop_limit, sop_survival};
use crate::capacity::{self, capacity_case1, capacity_case1_conventional, capacity_case2, capacity_case3};
use crate::channel::{ChannelDraw, SampleStream};
use crate::model::{db_to_linear, CaseId, RateThreshold, ScenarioScaling, SnrTriple};
use crate::montecarlo::{count_outages, estimate_sop_paired, Parallelism};
use crate::stats::{ls_slope, score_standard_error};
use crate::Result;

/// Source of closed-form outage probabilities under test.
pub trait SopModel: Sync {
    fn sop(&self, case: CaseId, snrs: &SnrTriple, r: RateThreshold) -> Result<f64>;

    /// `1 - P`. Implementations with a cancellation-free form should
    /// override this; the factorization check depends on its precision.
    fn survival(&self, case: CaseId, snrs: &SnrTriple, r: RateThreshold) -> Result<f64> {
        self.sop(case, snrs, r).map(|p| 1.0 - p)
    }
}

/// The closed forms implemented in [`crate::analytic`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedForm;

impl SopModel for ClosedForm {
    fn sop(&self, case: CaseId, snrs: &SnrTriple, r: RateThreshold) -> Result<f64> {
        sop_closed_form(case, snrs, r)
    }

    fn survival(&self, case: CaseId, snrs: &SnrTriple, r: RateThreshold) -> Result<f64> {
        sop_survival(case, snrs, r)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    /// Samples per grid cell for the simulation checks.
    pub mc_samples: u64,
    /// Randomized trials for the capacity and ordering checks.
    pub trials: usize,
    pub seed: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            mc_samples: 200_000,
            trials: 100_000,
            seed: 20_210_501,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub evaluated: usize,
    /// First failing cell, if any.
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Tally of the two SOP ordering readings over the operating-point grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SopOrderingTally {
    pub points: usize,
    pub derived_holds: usize,
    pub as_stated_holds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
    pub sop_ordering: SopOrderingTally,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Process exit status: 0 when every gating check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "[{status}] {} ({} evaluations)", c.name, c.evaluated);
            if let Some(f) = &c.failure {
                let _ = writeln!(s, "       first failure: {f}");
            }
        }
        let t = self.sop_ordering;
        let _ = writeln!(s);
        let _ = writeln!(s, "SOP ordering between cases (informational, {} operating points):", t.points);
        let _ = writeln!(
            s,
            "  derived from closed forms (P3 > P2 > P1 if gamma_d > gamma_r, else P3 > P1 >= P2): holds at {}/{}",
            t.derived_holds, t.points
        );
        let _ = writeln!(
            s,
            "  as stated with branches swapped (P3 > P1 > P2 if gamma_d > gamma_r, else P3 > P2 >= P1): holds at {}/{}",
            t.as_stated_holds, t.points
        );
        let _ = writeln!(s);
        let total = self.checks.len();
        let failed = self.failed().count();
        if failed == 0 {
            let _ = writeln!(s, "all {total} checks passed");
        } else {
            let _ = writeln!(s, "{failed} of {total} checks failed");
        }
        s
    }
}

/// One cell of the reference parameter grid.
#[derive(Debug, Clone, Copy)]
pub struct GridCell {
    pub gamma_d: f64,
    pub alpha: f64,
    pub gamma_e: f64,
    pub rate: f64,
}

impl GridCell {
    pub fn snrs(&self) -> SnrTriple {
        SnrTriple::new(self.alpha * self.gamma_d, self.gamma_d, self.gamma_e).expect("grid values are positive")
    }

    pub fn r(&self) -> RateThreshold {
        RateThreshold::new(self.rate).expect("grid rates are positive")
    }
}

impl std::fmt::Display for GridCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "gamma_d={}, alpha={}, gamma_e={}, R={}",
            self.gamma_d, self.alpha, self.gamma_e, self.rate
        )
    }
}

/// `{1, 10, 100} x {0.5, 1, 2} x {0.1, 1, 10} x {0.5, 1, 2}`: 81 operating
/// points, 243 with the three analytic cases.
pub fn reference_grid() -> Vec<GridCell> {
    let mut cells = Vec::with_capacity(81);
    for gamma_d in [1.0, 10.0, 100.0] {
        for alpha in [0.5, 1.0, 2.0] {
            for gamma_e in [0.1, 1.0, 10.0] {
                for rate in [0.5, 1.0, 2.0] {
                    cells.push(GridCell { gamma_d, alpha, gamma_e, rate });
                }
            }
        }
    }
    cells
}

struct Check {
    name: &'static str,
    evaluated: usize,
    failure: Option<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self { name, evaluated: 0, failure: None }
    }

    /// Records one evaluation; keeps the first failure message.
    fn expect(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.evaluated += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(detail());
        }
    }

    fn error(&mut self, e: crate::Error) {
        self.expect(false, || e.to_string());
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            evaluated: self.evaluated,
            failure: self.failure,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
}

fn random_snrs(rng: &mut ChaCha8Rng) -> SnrTriple {
    SnrTriple::from_db(uniform(rng, -20.0, 40.0), uniform(rng, -20.0, 40.0), uniform(rng, -20.0, 30.0))
        .expect("finite dB values")
}

fn check_capacities(cfg: &ValidationConfig) -> Vec<CheckOutcome> {
    let mut clamp = Check::new("capacity non-negativity and clamping");
    let mut dominance = Check::new("capacity pointwise dominance (R3 <= min(R1, R2), conventional <= R1)");
    let mut monotone = Check::new("capacity monotonicity in SNRs and gains");
    let mut no_eve = Check::new("capacity cases coincide without eavesdropper");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stream = SampleStream::new(cfg.seed, 0);

    for _ in 0..cfg.trials {
        let s = random_snrs(&mut rng);
        let d = stream.sample_draw();
        let (r1, r2, r3) = (capacity_case1(&d, &s), capacity_case2(&d, &s), capacity_case3(&d, &s));
        let conv = capacity_case1_conventional(&d, &s);
        let cell = || format!("draw {d:?}, snrs {s:?}");
        for c in [r1, r2, r3] {
            clamp.expect(
                c.end_to_end >= 0.0 && c.end_to_end == c.hop_sr.min(c.hop_rd).max(0.0),
                cell,
            );
        }
        clamp.expect(conv >= 0.0, cell);
        dominance.expect(r3.end_to_end <= r1.end_to_end.min(r2.end_to_end) && conv <= r1.end_to_end, cell);
    }

    let up = 1.5;
    for _ in 0..cfg.trials / 10 {
        let s = random_snrs(&mut rng);
        let d = stream.sample_draw();
        let (gr, gd, ge) = (s.gamma_r(), s.gamma_d(), s.gamma_e());
        let snr_steps = [
            (SnrTriple::new(gr * up, gd, ge), 1.0),
            (SnrTriple::new(gr, gd * up, ge), 1.0),
            (SnrTriple::new(gr, gd, ge * up), -1.0),
        ];
        let draw_steps = [
            (ChannelDraw { g_sr: d.g_sr * up, ..d }, 1.0),
            (ChannelDraw { g_rd: d.g_rd * up, ..d }, 1.0),
            (ChannelDraw { g_se: d.g_se * up, ..d }, -1.0),
            (ChannelDraw { g_re: d.g_re * up, ..d }, -1.0),
        ];
        for case in CaseId::ALL {
            let base = capacity::end_to_end(case, &d, &s);
            for (s2, dir) in &snr_steps {
                let s2 = s2.as_ref().expect("scaled SNRs stay valid");
                monotone.expect(dir * (capacity::end_to_end(case, &d, s2) - base) >= 0.0, || {
                    format!("case {case}, snrs {s:?} -> {s2:?}, draw {d:?}")
                });
            }
            for (d2, dir) in &draw_steps {
                monotone.expect(dir * (capacity::end_to_end(case, d2, &s) - base) >= 0.0, || {
                    format!("case {case}, draw {d:?} -> {d2:?}, snrs {s:?}")
                });
            }
        }
        let quiet = s.with_gamma_e(0.0).expect("zero is admissible");
        let df = capacity_case1(&d, &quiet).hop_sr.min(capacity_case2(&d, &quiet).hop_rd).max(0.0);
        for case in CaseId::ALL {
            no_eve.expect(capacity::end_to_end(case, &d, &quiet) == df, || {
                format!("case {case}, draw {d:?}, snrs {quiet:?}")
            });
        }
    }
    vec![clamp.finish(), dominance.finish(), monotone.finish(), no_eve.finish()]
}

fn check_closed_forms(model: &dyn SopModel, grid: &[GridCell]) -> Vec<CheckOutcome> {
    let mut range = Check::new("SOP range [0, 1)");
    let mut monotone = Check::new("SOP monotonicity in R, gamma_e, gamma_d, gamma_r");
    let mut symmetry = Check::new("case I / case II symmetry under gamma_r <-> gamma_d");
    let mut factor = Check::new("case III factorization 1-P3 = (1-P1)(1-P2)/(1-P0)");
    let mut dominance = Check::new("case III SOP dominance P3 >= max(P1, P2)");

    for cell in grid {
        let s = cell.snrs();
        let r = cell.r();
        let eval = |case, s: &SnrTriple, r| model.sop(case, s, r);
        let values: Result<Vec<f64>> = CaseId::ANALYTIC.iter().map(|&c| eval(c, &s, r)).collect();
        let [p1, p2, p3] = match values {
            Ok(v) => [v[0], v[1], v[2]],
            Err(e) => {
                range.error(e);
                continue;
            }
        };
        for (case, p) in CaseId::ANALYTIC.iter().zip([p1, p2, p3]) {
            range.expect((0.0..1.0).contains(&p), || format!("case {case}: P={p} at {cell}"));

            let up = 1.1;
            let steps = [
                (s, RateThreshold::new(cell.rate * up).unwrap(), 1.0, "R"),
                (s.with_gamma_e(s.gamma_e() * up).unwrap(), r, 1.0, "gamma_e"),
                (SnrTriple::new(s.gamma_r(), s.gamma_d() * up, s.gamma_e()).unwrap(), r, -1.0, "gamma_d"),
                (SnrTriple::new(s.gamma_r() * up, s.gamma_d(), s.gamma_e()).unwrap(), r, -1.0, "gamma_r"),
            ];
            for (s2, r2, dir, what) in steps {
                match eval(*case, &s2, r2) {
                    Ok(q) => monotone.expect(dir * (q - p) > 0.0, || {
                        format!("case {case}: raising {what} moved P from {p} to {q} at {cell}")
                    }),
                    Err(e) => monotone.error(e),
                }
            }
        }

        match eval(CaseId::Case2, &s.swapped(), r) {
            Ok(q) => symmetry.expect(q == p1, || format!("P1={p1}, swapped P2={q} at {cell}")),
            Err(e) => symmetry.error(e),
        }

        let surv = |case, s: &SnrTriple| model.survival(case, s, r);
        let quiet = s.with_gamma_e(0.0).unwrap();
        match (surv(CaseId::Case1, &s), surv(CaseId::Case2, &s), surv(CaseId::Case3, &s), surv(CaseId::Case1, &quiet)) {
            (Ok(s1), Ok(s2), Ok(s3), Ok(s0)) => {
                let rhs = s1 * s2 / s0;
                factor.expect((s3 - rhs).abs() <= 1e-12 * s3.abs(), || {
                    format!("1-P3={s3}, (1-P1)(1-P2)/(1-P0)={rhs} at {cell}")
                });
            }
            (Err(e), ..) | (_, Err(e), ..) | (.., Err(e), _) | (.., Err(e)) => factor.error(e),
        }

        dominance.expect(p3 >= p1.max(p2), || format!("P1={p1}, P2={p2}, P3={p3} at {cell}"));
    }
    vec![range.finish(), monotone.finish(), symmetry.finish(), factor.finish(), dominance.finish()]
}

fn check_asymptotics(model: &dyn SopModel) -> Vec<CheckOutcome> {
    let r = RateThreshold::new(1.0).unwrap();
    let mut consistency = Check::new("scaled-eve approximation approaches fixed-eve as beta grows");
    let mut attainment = Check::new("(P - P^lim) * gamma_d -> M^ along the scaled-eve scenario");
    let mut order = Check::new("secrecy diversity order 1 in fixed-eve regime (30-50 dB)");

    for case in CaseId::ANALYTIC {
        for alpha in [0.5, 1.0, 2.0] {
            let gd = 100.0;
            let mut prev = f64::INFINITY;
            for beta in [1e1, 1e2, 1e3, 1e4, 1e5] {
                let scaled = ScenarioScaling::scaled_eve(alpha, beta)
                    .and_then(|sc| sop_asymptotic(case, gd, sc, None, r));
                let fixed = ScenarioScaling::fixed_eve(alpha)
                    .and_then(|sc| sop_asymptotic(case, gd, sc, Some(alpha * gd / beta), r));
                match (scaled, fixed) {
                    (Ok(a), Ok(b)) => {
                        let rel = (a.approx - b.approx).abs() / b.approx;
                        consistency.expect(rel < prev, || {
                            format!("case {case}, alpha={alpha}: gap {rel} did not shrink at beta={beta}")
                        });
                        prev = rel;
                    }
                    (Err(e), _) | (_, Err(e)) => consistency.error(e),
                }
            }
            consistency.expect(prev < 1e-3, || format!("case {case}, alpha={alpha}: final gap {prev}"));

            for beta in [0.5, 1.0, 2.0] {
                let (lim, mh) = match (sop_limit(case, alpha, beta, r), slope_scaled_eve(case, alpha, beta, r)) {
                    (Ok(l), Ok(m)) => (l, m),
                    (Err(e), _) | (_, Err(e)) => {
                        attainment.error(e);
                        continue;
                    }
                };
                for gd in [1e4, 1e5, 1e6] {
                    let s = SnrTriple::new(alpha * gd, gd, alpha * gd / beta).unwrap();
                    match model.sop(case, &s, r) {
                        Ok(p) => {
                            let scaled = (p - lim) * gd;
                            attainment.expect((scaled - mh).abs() / mh < 0.02, || {
                                format!("case {case}, alpha={alpha}, beta={beta}, gamma_d={gd}: {scaled} vs {mh}")
                            });
                        }
                        Err(e) => attainment.error(e),
                    }
                }
            }

            let ge = db_to_linear(1.0).unwrap();
            let pts: Result<Vec<(f64, f64)>> = (0..=10)
                .map(|i| {
                    let gd = db_to_linear(30.0 + 2.0 * i as f64)?;
                    let p = model.sop(case, &SnrTriple::new(alpha * gd, gd, ge)?, r)?;
                    Ok((gd.log10(), p.log10()))
                })
                .collect();
            match pts {
                Ok(pts) => {
                    let slope = ls_slope(&pts).unwrap_or(f64::NAN);
                    order.expect((slope + 1.0).abs() <= 0.05, || {
                        format!("case {case}, alpha={alpha}: log-log slope {slope}")
                    });
                }
                Err(e) => order.error(e),
            }

            // fixed-eve slope constants must match the closed form at high SNR
            if let Ok(m) = slope_fixed_eve(case, alpha, ge, r) {
                let gd = 1e6;
                if let Ok(p) = model.sop(case, &SnrTriple::new(alpha * gd, gd, ge).unwrap(), r) {
                    order.expect(((p * gd) - m).abs() / m < 1e-2, || {
                        format!("case {case}, alpha={alpha}: P*gamma_d={} vs M={m}", p * gd)
                    });
                }
            }
        }
    }
    vec![consistency.finish(), attainment.finish(), order.finish()]
}

fn check_orderings(cfg: &ValidationConfig) -> (CheckOutcome, SopOrderingTally) {
    let mut chains = Check::new("slope / limit ordering chains on both alpha branches");
    let mut tally = SopOrderingTally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let n = (cfg.trials / 100).max(100);
    for i in 0..n {
        // every fourth point sits exactly on alpha = 1
        let alpha = if i % 4 == 0 { 1.0 } else { 10f64.powf(uniform(&mut rng, -1.5, 1.5)) };
        let beta = 10f64.powf(uniform(&mut rng, -1.5, 1.5));
        let rate = uniform(&mut rng, 0.05, 4.0);
        let gd = 10f64.powf(uniform(&mut rng, -1.0, 4.0));
        let ge = 10f64.powf(uniform(&mut rng, -1.0, 2.0));
        let r = RateThreshold::new(rate).unwrap();
        let s = SnrTriple::new(alpha * gd, gd, ge).unwrap();
        match ordering_predicates(&s, alpha, beta, r) {
            Ok(rep) => {
                chains.expect(
                    rep.universal && rep.slope_fixed_chain && rep.limit_chain && rep.slope_scaled_chain,
                    || format!("alpha={alpha}, beta={beta}, R={rate}, gamma_d={gd}, gamma_e={ge}: {rep:?}"),
                );
                if alpha == 1.0 {
                    chains.expect(
                        rep.slope_fixed[0] == rep.slope_fixed[1]
                            && rep.slope_scaled[0] == rep.slope_scaled[1]
                            && rep.limit[0] == rep.limit[1],
                        || format!("alpha=1 symmetry broken: {rep:?}"),
                    );
                }
                tally.points += 1;
                tally.derived_holds += usize::from(rep.sop_chain_derived);
                tally.as_stated_holds += usize::from(rep.sop_chain_as_stated);
            }
            Err(e) => chains.error(e),
        }
    }
    (chains.finish(), tally)
}

fn check_simulation(model: &dyn SopModel, grid: &[GridCell], cfg: &ValidationConfig) -> Vec<CheckOutcome> {
    let mut agreement = Check::new("Monte Carlo agrees with closed forms within 4 standard errors");
    let mut workers = Check::new("Monte Carlo results independent of worker count");
    let mut conventional = Check::new("conventional case I SOP >= case I SOP on common draws");
    let n = cfg.mc_samples.max(1);

    for (i, cell) in grid.iter().enumerate() {
        let s = cell.snrs();
        let r = cell.r();
        let est = match estimate_sop_paired(&CaseId::ALL, &s, r, n, cfg.seed.wrapping_add(i as u64), Parallelism::Auto) {
            Ok(e) => e,
            Err(e) => {
                agreement.error(e);
                continue;
            }
        };
        for e in &est[..3] {
            match model.sop(e.case, &s, r) {
                Ok(p) => {
                    let se = score_standard_error(p, n);
                    agreement.expect((e.value - p).abs() <= 4.0 * se, || {
                        format!("case {}: MC {} vs closed form {p} (4 SE = {}) at {cell}", e.case, e.value, 4.0 * se)
                    });
                }
                Err(err) => agreement.error(err),
            }
        }
        conventional.expect(est[3].outages >= est[0].outages, || {
            format!("conventional {} < case I {} at {cell}", est[3].value, est[0].value)
        });
    }

    let s = grid[grid.len() / 2].snrs();
    let r = grid[grid.len() / 2].r();
    let m = (n / 4).max(1) + 12_345;
    let reference = count_outages(&CaseId::ALL, &s, r, cfg.seed, 0..m, Parallelism::Sequential);
    for w in [1usize, 4, 16] {
        let got = count_outages(&CaseId::ALL, &s, r, cfg.seed, 0..m, Parallelism::Workers(w));
        workers.expect(got == reference, || format!("{w} workers: {got:?} vs sequential {reference:?}"));
    }
    vec![agreement.finish(), workers.finish(), conventional.finish()]
}

/// Runs every check against `model`.
pub fn run_validation(model: &dyn SopModel, cfg: &ValidationConfig) -> ValidationReport {
    let grid = reference_grid();
    let mut checks = check_capacities(cfg);
    checks.extend(check_closed_forms(model, &grid));
    checks.extend(check_asymptotics(model));
    let (chains, sop_ordering) = check_orderings(cfg);
    checks.push(chains);
    checks.extend(check_simulation(model, &grid, cfg));
    ValidationReport { checks, sop_ordering }
}
