//! Closed-form secrecy outage probabilities (SOP) and their high-SNR
//! behaviour.
//!
//! With `t = 2^R`, every case shares the survival factor
//! `exp(-(t - 1)(1/gamma_r + 1/gamma_d))` and multiplies it by
//! `1 / (1 + t gamma_e / gamma_d)` when E overhears R and by
//! `1 / (1 + t gamma_e / gamma_r)` when E overhears S. The outage
//! probability is one minus that product.
//!
//! Two high-SNR regimes are covered, both with `gamma_r = alpha * gamma_d`:
//! a fixed eavesdropper SNR, where `P_i ~ M_i / gamma_d`, and an eavesdropper
//! scaling with the legitimate links (`gamma_r = beta * gamma_e`), where
//! `P_i ~ P_i^lim + M^_i / gamma_d`.

use crate::model::{require_non_negative, require_positive, CaseId, RateThreshold, ScenarioScaling, SnrTriple};
use crate::{Error, Result};

fn require_closed_form(case: CaseId) -> Result<()> {
    if case.has_closed_form() {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "case {case} has no closed-form outage probability; use Monte Carlo estimation"
        )))
    }
}

/// Which eavesdropper factors apply: `(overhears_relay, overhears_source)`.
fn eve_links(case: CaseId) -> (bool, bool) {
    match case {
        CaseId::Case1 | CaseId::Case1Conventional => (true, false),
        CaseId::Case2 => (false, true),
        CaseId::Case3 => (true, true),
    }
}

/// Natural log of the probability of no secrecy outage.
fn log_survival(case: CaseId, snrs: &SnrTriple, r: RateThreshold) -> f64 {
    let t = r.pow2();
    let common = r.pow2_m1() * (1.0 / snrs.gamma_r() + 1.0 / snrs.gamma_d());
    let (relay, source) = eve_links(case);
    let mut log_s = -common;
    if relay {
        log_s -= (t * snrs.gamma_e() / snrs.gamma_d()).ln_1p();
    }
    if source {
        log_s -= (t * snrs.gamma_e() / snrs.gamma_r()).ln_1p();
    }
    log_s
}

/// Probability of no secrecy outage, `1 - P_i`, computed without
/// cancellation.
pub fn sop_survival(case: CaseId, snrs: &SnrTriple, r: RateThreshold) -> Result<f64> {
    require_closed_form(case)?;
    Ok(log_survival(case, snrs, r).exp())
}

/// Exact SOP of case I, II or III.
///
/// Evaluated as `-expm1(ln S)` so that values far below `1e-15` keep full
/// relative precision. The result lies in `[0, 1)`.
pub fn sop_closed_form(case: CaseId, snrs: &SnrTriple, r: RateThreshold) -> Result<f64> {
    require_closed_form(case)?;
    Ok(-log_survival(case, snrs, r).exp_m1())
}

/// `(2^R - 1)(1 + 1/alpha)`, the part of every slope constant that does not
/// involve the eavesdropper.
fn legit_slope(alpha: f64, r: RateThreshold) -> f64 {
    r.pow2_m1() * (1.0 + 1.0 / alpha)
}

/// Convergence constant `M_i` of the fixed-eavesdropper regime,
/// `P_i ~ M_i / gamma_d`.
pub fn slope_fixed_eve(case: CaseId, alpha: f64, gamma_e: f64, r: RateThreshold) -> Result<f64> {
    require_closed_form(case)?;
    let alpha = require_positive("alpha", alpha)?;
    let gamma_e = require_non_negative("gamma_e", gamma_e)?;
    let eve = r.pow2() * gamma_e;
    let k = legit_slope(alpha, r);
    Ok(match case {
        CaseId::Case1 => k + eve,
        CaseId::Case2 => k + eve / alpha,
        _ => k + eve * (1.0 + 1.0 / alpha),
    })
}

/// `(t alpha / beta, t / beta)`: the eavesdropper-to-legitimate SNR ratios of
/// the R→D and S→R hops in the scaled-eavesdropper regime.
fn scaled_ratios(alpha: f64, beta: f64, r: RateThreshold) -> Result<(f64, f64)> {
    let alpha = require_positive("alpha", alpha)?;
    let beta = require_positive("beta", beta)?;
    let t = r.pow2();
    Ok((alpha * t / beta, t / beta))
}

/// High-SNR floor `P_i^lim` of the scaled-eavesdropper regime.
pub fn sop_limit(case: CaseId, alpha: f64, beta: f64, r: RateThreshold) -> Result<f64> {
    require_closed_form(case)?;
    let (x, y) = scaled_ratios(alpha, beta, r)?;
    // 1 - 1/(1+x) = x/(1+x); 1 - 1/((1+x)(1+y)) = (x + y + xy)/((1+x)(1+y))
    Ok(match case {
        CaseId::Case1 => x / (1.0 + x),
        CaseId::Case2 => y / (1.0 + y),
        _ => (x + y + x * y) / ((1.0 + x) * (1.0 + y)),
    })
}

/// Convergence constant `M^_i` of the scaled-eavesdropper regime,
/// `P_i ~ P_i^lim + M^_i / gamma_d`.
pub fn slope_scaled_eve(case: CaseId, alpha: f64, beta: f64, r: RateThreshold) -> Result<f64> {
    require_closed_form(case)?;
    let (x, y) = scaled_ratios(alpha, beta, r)?;
    let k = legit_slope(alpha, r);
    Ok(match case {
        CaseId::Case1 => k / (1.0 + x),
        CaseId::Case2 => k / (1.0 + y),
        _ => k / ((1.0 + x) * (1.0 + y)),
    })
}

/// First-order high-SNR approximation `limit + slope / gamma_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticResult {
    /// `P_i^lim`, or 0 in the fixed-eavesdropper regime.
    pub limit: f64,
    /// `M_i` or `M^_i`.
    pub slope: f64,
    pub approx: f64,
}

/// Asymptotic SOP at `gamma_d` under the scenario given by `scaling` and
/// `gamma_e_fixed` (exactly one eavesdropper specification, as for
/// [`SnrTriple::from_scenario`]).
pub fn sop_asymptotic(
    case: CaseId,
    gamma_d: f64,
    scaling: ScenarioScaling,
    gamma_e_fixed: Option<f64>,
    r: RateThreshold,
) -> Result<AsymptoticResult> {
    require_closed_form(case)?;
    let snrs = SnrTriple::from_scenario(gamma_d, scaling, gamma_e_fixed)?;
    let alpha = scaling.alpha();
    let (limit, slope) = match scaling.beta() {
        Some(beta) => (
            sop_limit(case, alpha, beta, r)?,
            slope_scaled_eve(case, alpha, beta, r)?,
        ),
        None => (0.0, slope_fixed_eve(case, alpha, snrs.gamma_e(), r)?),
    };
    Ok(AsymptoticResult {
        limit,
        slope,
        approx: limit + slope / snrs.gamma_d(),
    })
}

/// Values and ordering verdicts across the three cases at one operating
/// point. Arrays are indexed by case (I, II, III).
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub alpha: f64,
    pub beta: f64,
    pub sop: [f64; 3],
    pub slope_fixed: [f64; 3],
    pub limit: [f64; 3],
    pub slope_scaled: [f64; 3],
    /// SOP chain implied by the closed forms: `P3 > P2 > P1` when
    /// `gamma_d > gamma_r`, otherwise `P3 > P1 >= P2`.
    pub sop_chain_derived: bool,
    /// The same chain with the two branches exchanged (`P3 > P1 > P2` when
    /// `gamma_d > gamma_r`, otherwise `P3 > P2 >= P1`), as the ordering is
    /// commonly stated. Informational only.
    pub sop_chain_as_stated: bool,
    /// `M3 > M1 > M2` for `alpha > 1`, `M3 > M2 >= M1` otherwise.
    pub slope_fixed_chain: bool,
    /// `P3^lim > P1^lim > P2^lim` for `alpha > 1`,
    /// `P3^lim > P2^lim >= P1^lim` otherwise.
    pub limit_chain: bool,
    /// `M^2 > M^1 > M^3` for `alpha > 1`, `M^1 >= M^2 > M^3` otherwise.
    pub slope_scaled_chain: bool,
    /// Relations that hold for every valid input: case III has the largest
    /// SOP, fixed-regime slope and limit, and the smallest scaled-regime
    /// slope.
    pub universal: bool,
}

/// Evaluates all closed forms at `snrs` (SOPs, with `gamma_e` feeding the
/// fixed-regime slopes) and at `(alpha, beta)` (limits and scaled-regime
/// slopes), then checks the ordering chains between the cases.
pub fn ordering_predicates(
    snrs: &SnrTriple,
    alpha: f64,
    beta: f64,
    r: RateThreshold,
) -> Result<OrderingReport> {
    let per_case = |f: &dyn Fn(CaseId) -> Result<f64>| -> Result<[f64; 3]> {
        Ok([f(CaseId::Case1)?, f(CaseId::Case2)?, f(CaseId::Case3)?])
    };
    let sop = per_case(&|c| sop_closed_form(c, snrs, r))?;
    // Compare on log-survival: P rounds to 1.0 long before ln(1 - P) loses precision.
    let log_s = per_case(&|c| {
        require_closed_form(c)?;
        Ok(log_survival(c, snrs, r))
    })?;
    let m = per_case(&|c| slope_fixed_eve(c, alpha, snrs.gamma_e(), r))?;
    let lim = per_case(&|c| sop_limit(c, alpha, beta, r))?;
    let mh = per_case(&|c| slope_scaled_eve(c, alpha, beta, r))?;

    // P_i > P_j  <=>  ln S_i < ln S_j
    let [p1, p2, p3] = log_s.map(|l| -l);
    let relay_stronger = snrs.gamma_d() > snrs.gamma_r();
    let sop_chain_derived = if relay_stronger {
        p3 > p2 && p2 > p1
    } else {
        p3 > p1 && p1 >= p2
    };
    let sop_chain_as_stated = if relay_stronger {
        p3 > p1 && p1 > p2
    } else {
        p3 > p2 && p2 >= p1
    };

    let above = alpha > 1.0;
    let slope_fixed_chain = if above {
        m[2] > m[0] && m[0] > m[1]
    } else {
        m[2] > m[1] && m[1] >= m[0]
    };
    let limit_chain = if above {
        lim[2] > lim[0] && lim[0] > lim[1]
    } else {
        lim[2] > lim[1] && lim[1] >= lim[0]
    };
    let slope_scaled_chain = if above {
        mh[1] > mh[0] && mh[0] > mh[2]
    } else {
        mh[0] >= mh[1] && mh[1] > mh[2]
    };
    let universal = p3 >= p1.max(p2)
        && m[2] >= m[0].max(m[1])
        && lim[2] >= lim[0].max(lim[1])
        && mh[2] <= mh[0].min(mh[1]);

    Ok(OrderingReport {
        alpha,
        beta,
        sop,
        slope_fixed: m,
        limit: lim,
        slope_scaled: mh,
        sop_chain_derived,
        sop_chain_as_stated,
        slope_fixed_chain,
        limit_chain,
        slope_scaled_chain,
        universal,
    })
}
