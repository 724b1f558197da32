//! System parameterization: average SNRs, target secrecy rate, scenario
//! scalings and the eavesdropping case under study.
//!
//! Every constructor here validates its input, so the rest of the crate can
//! assume finite, correctly signed values.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Converts a value in decibels to linear scale.
pub fn db_to_linear(x_db: f64) -> Result<f64> {
    if !x_db.is_finite() {
        return Err(Error::validation(format!("dB value must be finite, got {x_db}")));
    }
    Ok(10f64.powf(x_db / 10.0))
}

/// Converts a positive linear value to decibels. Zero maps to `-inf`.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::validation(format!(
            "linear value must be finite and non-negative, got {x}"
        )));
    }
    Ok(10.0 * x.log10())
}

pub(crate) fn require_positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::validation(format!("{name} must be finite and > 0, got {v}")))
    }
}

pub(crate) fn require_non_negative(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::validation(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Average SNRs of the S→R, R→D and eavesdropper links, linear scale.
///
/// Each node transmits with half of the total power `P`, so
/// `gamma_j = P / (2 sigma_j^2)`. `gamma_e = 0` models an absent
/// eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrTriple {
    gamma_r: f64,
    gamma_d: f64,
    gamma_e: f64,
}

impl SnrTriple {
    pub fn new(gamma_r: f64, gamma_d: f64, gamma_e: f64) -> Result<Self> {
        Ok(Self {
            gamma_r: require_positive("gamma_r", gamma_r)?,
            gamma_d: require_positive("gamma_d", gamma_d)?,
            gamma_e: require_non_negative("gamma_e", gamma_e)?,
        })
    }

    /// Builds the triple from dB values. `gamma_e_db = -inf` yields `gamma_e = 0`.
    pub fn from_db(gamma_r_db: f64, gamma_d_db: f64, gamma_e_db: f64) -> Result<Self> {
        let gamma_e = if gamma_e_db == f64::NEG_INFINITY {
            0.0
        } else {
            db_to_linear(gamma_e_db)?
        };
        Self::new(db_to_linear(gamma_r_db)?, db_to_linear(gamma_d_db)?, gamma_e)
    }

    /// Equal split of the total power `p` between S and R.
    pub fn from_power(p: f64, sigma2_r: f64, sigma2_d: f64, sigma2_e: f64) -> Result<Self> {
        let p = require_positive("transmit power", p)?;
        let sigma2_r = require_positive("sigma2_r", sigma2_r)?;
        let sigma2_d = require_positive("sigma2_d", sigma2_d)?;
        let sigma2_e = require_positive("sigma2_e", sigma2_e)?;
        Self::new(p / (2.0 * sigma2_r), p / (2.0 * sigma2_d), p / (2.0 * sigma2_e))
    }

    /// Builds the triple for one of the two high-SNR scenarios:
    /// `gamma_r = alpha * gamma_d`, and either `gamma_e = gamma_r / beta`
    /// (scaled eavesdropper) or a fixed `gamma_e`. Exactly one of
    /// `scaling.beta` and `gamma_e_fixed` must be given.
    pub fn from_scenario(
        gamma_d: f64,
        scaling: ScenarioScaling,
        gamma_e_fixed: Option<f64>,
    ) -> Result<Self> {
        let gamma_d = require_positive("gamma_d", gamma_d)?;
        let gamma_r = scaling.alpha * gamma_d;
        let gamma_e = match (scaling.beta, gamma_e_fixed) {
            (Some(beta), None) => gamma_r / beta,
            (None, Some(e)) => e,
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    "both beta and a fixed gamma_e given; specify exactly one",
                ))
            }
            (None, None) => {
                return Err(Error::validation(
                    "neither beta nor a fixed gamma_e given; specify exactly one",
                ))
            }
        };
        Self::new(gamma_r, gamma_d, gamma_e)
    }

    pub fn gamma_r(&self) -> f64 {
        self.gamma_r
    }

    pub fn gamma_d(&self) -> f64 {
        self.gamma_d
    }

    pub fn gamma_e(&self) -> f64 {
        self.gamma_e
    }

    pub fn with_gamma_e(self, gamma_e: f64) -> Result<Self> {
        Self::new(self.gamma_r, self.gamma_d, gamma_e)
    }

    /// Exchanges the roles of the two legitimate hops.
    pub fn swapped(self) -> Self {
        Self {
            gamma_r: self.gamma_d,
            gamma_d: self.gamma_r,
            gamma_e: self.gamma_e,
        }
    }
}

/// Free function form of [`SnrTriple::from_power`].
pub fn snr_from_power(p: f64, sigma2_r: f64, sigma2_d: f64, sigma2_e: f64) -> Result<SnrTriple> {
    SnrTriple::from_power(p, sigma2_r, sigma2_d, sigma2_e)
}

/// Free function form of [`SnrTriple::from_scenario`].
pub fn snrs_from_scenario(
    gamma_d: f64,
    scaling: ScenarioScaling,
    gamma_e_fixed: Option<f64>,
) -> Result<SnrTriple> {
    SnrTriple::from_scenario(gamma_d, scaling, gamma_e_fixed)
}

/// Target secrecy rate in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RateThreshold(f64);

impl RateThreshold {
    pub fn new(bits: f64) -> Result<Self> {
        require_positive("rate", bits).map(Self)
    }

    pub fn bits(&self) -> f64 {
        self.0
    }

    /// `2^R`.
    pub fn pow2(&self) -> f64 {
        self.0.exp2()
    }

    /// `2^R - 1`, accurate for small rates.
    pub fn pow2_m1(&self) -> f64 {
        (self.0 * std::f64::consts::LN_2).exp_m1()
    }
}

/// Scenario constants: `gamma_r = alpha * gamma_d` and, when present,
/// `gamma_r = beta * gamma_e`. An absent `beta` selects the
/// fixed-eavesdropper regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioScaling {
    alpha: f64,
    beta: Option<f64>,
}

impl ScenarioScaling {
    pub fn new(alpha: f64, beta: Option<f64>) -> Result<Self> {
        let alpha = require_positive("alpha", alpha)?;
        let beta = beta.map(|b| require_positive("beta", b)).transpose()?;
        Ok(Self { alpha, beta })
    }

    pub fn fixed_eve(alpha: f64) -> Result<Self> {
        Self::new(alpha, None)
    }

    pub fn scaled_eve(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, Some(beta))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }
}

/// Which links the eavesdropper overhears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    /// E overhears R only; only the relay uses secrecy coding.
    Case1,
    /// E overhears S only; only the source uses secrecy coding.
    Case2,
    /// E overhears both S and R; both hops use secrecy coding.
    Case3,
    /// The widely used single-ratio case I expression, kept for contrast.
    Case1Conventional,
}

impl CaseId {
    /// The three cases with closed-form outage probabilities.
    pub const ANALYTIC: [CaseId; 3] = [CaseId::Case1, CaseId::Case2, CaseId::Case3];
    pub const ALL: [CaseId; 4] = [
        CaseId::Case1,
        CaseId::Case2,
        CaseId::Case3,
        CaseId::Case1Conventional,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CaseId::Case1 => "1",
            CaseId::Case2 => "2",
            CaseId::Case3 => "3",
            CaseId::Case1Conventional => "1conv",
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, CaseId::Case1Conventional)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "i" => Ok(CaseId::Case1),
            "2" | "ii" => Ok(CaseId::Case2),
            "3" | "iii" => Ok(CaseId::Case3),
            "1conv" | "1-conv" | "conventional" => Ok(CaseId::Case1Conventional),
            other => Err(Error::validation(format!("unknown case '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert_eq!(db_to_linear(10.0).unwrap(), 10.0);
        // 10^0.3
        assert_relative_eq!(db_to_linear(3.0).unwrap(), 1.995_262_314_968_879_5, max_relative = 1e-15);
        assert!(db_to_linear(f64::NAN).is_err());
        assert!(db_to_linear(f64::INFINITY).is_err());
        assert_eq!(linear_to_db(0.0).unwrap(), f64::NEG_INFINITY);
        assert!(linear_to_db(-1.0).is_err());
    }

    #[test]
    fn power_constructor() {
        let s = snr_from_power(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!((s.gamma_r(), s.gamma_d(), s.gamma_e()), (1.0, 1.0, 1.0));
        let s = snr_from_power(20.0, 1.0, 0.5, 10.0).unwrap();
        assert_eq!((s.gamma_r(), s.gamma_d(), s.gamma_e()), (10.0, 20.0, 1.0));
        assert!(snr_from_power(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(snr_from_power(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(snr_from_power(1.0, 1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn scenario_constructor() {
        let s = snrs_from_scenario(100.0, ScenarioScaling::fixed_eve(0.5).unwrap(), Some(1.2589))
            .unwrap();
        assert_eq!((s.gamma_r(), s.gamma_d(), s.gamma_e()), (50.0, 100.0, 1.2589));
        let s = snrs_from_scenario(100.0, ScenarioScaling::scaled_eve(0.5, 1.0).unwrap(), None)
            .unwrap();
        assert_eq!((s.gamma_r(), s.gamma_d(), s.gamma_e()), (50.0, 100.0, 50.0));
        let s = snrs_from_scenario(10.0, ScenarioScaling::scaled_eve(1.0, 1.0).unwrap(), None)
            .unwrap();
        assert_eq!((s.gamma_r(), s.gamma_d(), s.gamma_e()), (10.0, 10.0, 10.0));

        let both = ScenarioScaling::scaled_eve(1.0, 1.0).unwrap();
        assert!(snrs_from_scenario(10.0, both, Some(1.0)).is_err());
        let neither = ScenarioScaling::fixed_eve(1.0).unwrap();
        assert!(snrs_from_scenario(10.0, neither, None).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SnrTriple::new(0.0, 1.0, 1.0).is_err());
        assert!(SnrTriple::new(1.0, f64::INFINITY, 1.0).is_err());
        assert!(SnrTriple::new(1.0, 1.0, -1e-9).is_err());
        assert!(SnrTriple::new(1.0, 1.0, 0.0).is_ok());
        assert!(RateThreshold::new(0.0).is_err());
        assert!(RateThreshold::new(-1.0).is_err());
        assert!(ScenarioScaling::new(0.0, None).is_err());
        assert!(ScenarioScaling::new(1.0, Some(0.0)).is_err());
    }

    #[test]
    fn case_labels_parse_back() {
        for case in CaseId::ALL {
            assert_eq!(case.label().parse::<CaseId>().unwrap(), case);
        }
        assert!("4".parse::<CaseId>().is_err());
    }

    #[test]
    fn rate_helpers() {
        let r = RateThreshold::new(1.0).unwrap();
        assert_eq!(r.pow2(), 2.0);
        assert_relative_eq!(r.pow2_m1(), 1.0, max_relative = 1e-15);
        let tiny = RateThreshold::new(1e-12).unwrap();
        assert_relative_eq!(tiny.pow2_m1(), 1e-12 * std::f64::consts::LN_2, max_relative = 1e-9);
    }

    proptest! {
        #[test]
        fn db_round_trip(x in -100.0f64..100.0) {
            let back = linear_to_db(db_to_linear(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn scaled_scenario_is_exact(gd in 1e-3f64..1e6, alpha in 1e-2f64..1e2, beta in 1e-2f64..1e2) {
            let s = snrs_from_scenario(gd, ScenarioScaling::scaled_eve(alpha, beta).unwrap(), None).unwrap();
            prop_assert_eq!(s.gamma_r(), alpha * s.gamma_d());
            prop_assert_eq!(s.gamma_e(), s.gamma_r() / beta);
            // beta * (gamma_r / beta) can differ from gamma_r by one rounding
            prop_assert!((beta * s.gamma_e() - s.gamma_r()).abs() <= 2.0 * f64::EPSILON * s.gamma_r());
        }
    }
}
