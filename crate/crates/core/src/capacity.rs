//! Instantaneous secrecy capacities of the DF relay wiretap channel.
//!
//! The end-to-end rate is the clamped minimum of the two hop rates,
//! `max(min(R_sr, R_rd), 0)`. A hop the eavesdropper overhears carries the
//! positive part of the log-ratio of legitimate to eavesdropper SNR factors;
//! an unobserved hop carries its plain Shannon capacity.
//!
//! Everything is computed in nats and converted to bits once per hop.

use std::f64::consts::LN_2;

use crate::channel::ChannelDraw;
use crate::model::{CaseId, SnrTriple};

/// Per-hop rates and the resulting end-to-end secrecy capacity, in bits per
/// channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityBreakdown {
    pub hop_sr: f64,
    pub hop_rd: f64,
    pub end_to_end: f64,
}

impl CapacityBreakdown {
    fn from_hops(hop_sr: f64, hop_rd: f64) -> Self {
        Self {
            hop_sr,
            hop_rd,
            end_to_end: hop_sr.min(hop_rd).max(0.0),
        }
    }
}

/// `log2(1 + snr)`
#[inline]
fn plain_bits(snr: f64) -> f64 {
    snr.ln_1p() / LN_2
}

/// `max(log2((1 + legit) / (1 + eve)), 0)`
#[inline]
fn secrecy_bits(legit: f64, eve: f64) -> f64 {
    ((legit.ln_1p() - eve.ln_1p()) / LN_2).max(0.0)
}

/// Case I: E overhears R. S uses ordinary coding; R uses secrecy coding.
pub fn capacity_case1(draw: &ChannelDraw, snrs: &SnrTriple) -> CapacityBreakdown {
    CapacityBreakdown::from_hops(
        plain_bits(snrs.gamma_r() * draw.g_sr),
        secrecy_bits(snrs.gamma_d() * draw.g_rd, snrs.gamma_e() * draw.g_re),
    )
}

/// The conventional case I expression, a single log-ratio with the weaker
/// legitimate hop in the numerator. It never exceeds
/// [`capacity_case1`]'s end-to-end value.
pub fn capacity_case1_conventional(draw: &ChannelDraw, snrs: &SnrTriple) -> f64 {
    let legit = (snrs.gamma_d() * draw.g_rd).min(snrs.gamma_r() * draw.g_sr);
    secrecy_bits(legit, snrs.gamma_e() * draw.g_re)
}

/// Case II: E overhears S. S uses secrecy coding; R uses ordinary coding.
pub fn capacity_case2(draw: &ChannelDraw, snrs: &SnrTriple) -> CapacityBreakdown {
    CapacityBreakdown::from_hops(
        secrecy_bits(snrs.gamma_r() * draw.g_sr, snrs.gamma_e() * draw.g_se),
        plain_bits(snrs.gamma_d() * draw.g_rd),
    )
}

/// Case III: E overhears both hops and both nodes use secrecy coding with
/// independent code ensembles.
pub fn capacity_case3(draw: &ChannelDraw, snrs: &SnrTriple) -> CapacityBreakdown {
    CapacityBreakdown::from_hops(
        secrecy_bits(snrs.gamma_r() * draw.g_sr, snrs.gamma_e() * draw.g_se),
        secrecy_bits(snrs.gamma_d() * draw.g_rd, snrs.gamma_e() * draw.g_re),
    )
}

/// End-to-end secrecy capacity for any case, including the conventional
/// variant.
#[inline]
pub fn end_to_end(case: CaseId, draw: &ChannelDraw, snrs: &SnrTriple) -> f64 {
    match case {
        CaseId::Case1 => capacity_case1(draw, snrs).end_to_end,
        CaseId::Case2 => capacity_case2(draw, snrs).end_to_end,
        CaseId::Case3 => capacity_case3(draw, snrs).end_to_end,
        CaseId::Case1Conventional => capacity_case1_conventional(draw, snrs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SampleStream;
    use approx::assert_relative_eq;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TRIALS: usize = 100_000;

    fn unit() -> SnrTriple {
        SnrTriple::new(1.0, 1.0, 1.0).unwrap()
    }

    fn draw(g_sr: f64, g_rd: f64, g_se: f64, g_re: f64) -> ChannelDraw {
        ChannelDraw::new(g_sr, g_rd, g_se, g_re).unwrap()
    }

    /// Independent straight-from-the-definition evaluator using `log2`.
    fn reference(case: CaseId, d: &ChannelDraw, s: &SnrTriple) -> f64 {
        let (gr, gd, ge) = (s.gamma_r(), s.gamma_d(), s.gamma_e());
        let sr_plain = (1.0 + gr * d.g_sr).log2();
        let rd_plain = (1.0 + gd * d.g_rd).log2();
        let sr_sec = ((1.0 + gr * d.g_sr) / (1.0 + ge * d.g_se)).log2().max(0.0);
        let rd_sec = ((1.0 + gd * d.g_rd) / (1.0 + ge * d.g_re)).log2().max(0.0);
        let r = match case {
            CaseId::Case1 => sr_plain.min(rd_sec),
            CaseId::Case2 => sr_sec.min(rd_plain),
            CaseId::Case3 => sr_sec.min(rd_sec),
            CaseId::Case1Conventional => {
                ((1.0 + (gd * d.g_rd).min(gr * d.g_sr)) / (1.0 + ge * d.g_re)).log2()
            }
        };
        r.max(0.0)
    }

    /// Random SNR triples spread over roughly -20..40 dB.
    fn random_snrs(rng: &mut ChaCha8Rng) -> SnrTriple {
        let mut db = || -20.0 + 60.0 * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let (r, d, e) = (db(), db(), db());
        SnrTriple::from_db(r, d, e).unwrap()
    }

    #[test]
    fn case1_examples() {
        let c = capacity_case1(&draw(3.0, 3.0, 0.5, 0.0), &unit());
        assert_relative_eq!(c.hop_sr, 2.0, max_relative = 1e-15);
        assert_relative_eq!(c.hop_rd, 2.0, max_relative = 1e-15);
        assert_relative_eq!(c.end_to_end, 2.0, max_relative = 1e-15);

        let c = capacity_case1(&draw(1.0, 1.0, 0.5, 1.0), &unit());
        assert_eq!(c.hop_rd, 0.0);
        assert_eq!(c.end_to_end, 0.0);

        let c = capacity_case1(&draw(0.0, 7.0, 0.5, 0.0), &unit());
        assert_eq!(c.hop_sr, 0.0);
        assert_eq!(c.end_to_end, 0.0);
    }

    #[test]
    fn conventional_examples() {
        assert_relative_eq!(
            capacity_case1_conventional(&draw(3.0, 3.0, 0.5, 0.0), &unit()),
            2.0,
            max_relative = 1e-15
        );
        assert_eq!(capacity_case1_conventional(&draw(3.0, 1.0, 0.5, 1.0), &unit()), 0.0);
    }

    #[test]
    fn case2_examples() {
        let c = capacity_case2(&draw(3.0, 3.0, 0.0, 0.5), &unit());
        assert_relative_eq!(c.end_to_end, 2.0, max_relative = 1e-15);
        let c = capacity_case2(&draw(1.0, 3.0, 1.0, 0.5), &unit());
        assert_eq!(c.hop_sr, 0.0);
        assert_eq!(c.end_to_end, 0.0);
    }

    #[test]
    fn case3_examples() {
        let c = capacity_case3(&draw(3.0, 3.0, 0.0, 0.0), &unit());
        assert_relative_eq!(c.end_to_end, 2.0, max_relative = 1e-15);
        let c = capacity_case3(&draw(1.0, 1.0, 1.0, 1.0), &unit());
        assert_eq!(c.end_to_end, 0.0);
    }

    #[test]
    fn matches_reference_evaluator() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut stream = SampleStream::new(1, 0);
        for _ in 0..TRIALS / 10 {
            let s = random_snrs(&mut rng);
            let d = stream.sample_draw();
            for case in CaseId::ALL {
                let got = end_to_end(case, &d, &s);
                let want = reference(case, &d, &s);
                assert!(
                    (got - want).abs() <= 1e-12 * want.max(1.0),
                    "{case}: {got} vs {want} at {d:?} {s:?}"
                );
            }
        }
    }

    #[test]
    fn pointwise_dominance_and_non_negativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut stream = SampleStream::new(2, 0);
        for _ in 0..TRIALS {
            let s = random_snrs(&mut rng);
            let d = stream.sample_draw();
            let r1 = capacity_case1(&d, &s);
            let r2 = capacity_case2(&d, &s);
            let r3 = capacity_case3(&d, &s);
            let conv = capacity_case1_conventional(&d, &s);
            for c in [r1, r2, r3] {
                assert!(c.end_to_end >= 0.0);
                assert_eq!(c.end_to_end, c.hop_sr.min(c.hop_rd).max(0.0));
            }
            assert!(conv >= 0.0);
            assert!(r3.end_to_end <= r1.end_to_end.min(r2.end_to_end));
            assert!(conv <= r1.end_to_end, "{conv} > {} at {d:?} {s:?}", r1.end_to_end);
        }
    }

    #[test]
    fn case2_mirrors_case1() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut stream = SampleStream::new(3, 0);
        for _ in 0..TRIALS {
            let s = random_snrs(&mut rng);
            let d = stream.sample_draw();
            let c2 = capacity_case2(&d, &s);
            let c1 = capacity_case1(&d.mirrored(), &s.swapped());
            assert_eq!(c2.hop_sr, c1.hop_rd);
            assert_eq!(c2.hop_rd, c1.hop_sr);
            assert_eq!(c2.end_to_end, c1.end_to_end);
        }
    }

    #[test]
    fn monotone_in_every_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut stream = SampleStream::new(4, 0);
        let up = 1.25;
        for _ in 0..TRIALS / 10 {
            let s = random_snrs(&mut rng);
            let d = stream.sample_draw();
            let (gr, gd, ge) = (s.gamma_r(), s.gamma_d(), s.gamma_e());
            let snr_variants = [
                (SnrTriple::new(gr * up, gd, ge).unwrap(), 1.0),
                (SnrTriple::new(gr, gd * up, ge).unwrap(), 1.0),
                (SnrTriple::new(gr, gd, ge * up).unwrap(), -1.0),
            ];
            let draw_variants = [
                (ChannelDraw { g_sr: d.g_sr * up, ..d }, 1.0),
                (ChannelDraw { g_rd: d.g_rd * up, ..d }, 1.0),
                (ChannelDraw { g_se: d.g_se * up, ..d }, -1.0),
                (ChannelDraw { g_re: d.g_re * up, ..d }, -1.0),
            ];
            for case in CaseId::ALL {
                let base = end_to_end(case, &d, &s);
                for (s2, dir) in snr_variants {
                    assert!(dir * (end_to_end(case, &d, &s2) - base) >= 0.0);
                }
                for (d2, dir) in draw_variants {
                    assert!(dir * (end_to_end(case, &d2, &s) - base) >= 0.0);
                }
            }
        }
    }

    #[test]
    fn absent_eavesdropper_collapses_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut stream = SampleStream::new(5, 0);
        for _ in 0..TRIALS / 10 {
            let s = random_snrs(&mut rng).with_gamma_e(0.0).unwrap();
            let d = stream.sample_draw();
            let df = plain_bits(s.gamma_r() * d.g_sr)
                .min(plain_bits(s.gamma_d() * d.g_rd))
                .max(0.0);
            for case in CaseId::ALL {
                assert_eq!(end_to_end(case, &d, &s), df, "{case}");
            }
        }
    }
}
