//! Monte Carlo estimation of secrecy outage probabilities.
//!
//! Sample `k` of a run always uses the channel draw at offset
//! `k % BATCH_SIZE` of substream `(seed, k / BATCH_SIZE)`, so the set of draws
//! depends only on `(seed, n)`. Work is split on batch boundaries and the
//! per-chunk outage counts are integers, making the estimate bit-identical
//! for any worker count, including the sequential build without the
//! `parallel` feature.
//!
//! All cases requested in one call are evaluated on the same draws.

use std::ops::Range;

use crate::capacity;
use crate::channel::{SampleStream, BATCH_SIZE};
use crate::model::{CaseId, RateThreshold, SnrTriple};
use crate::stats::{wilson_interval, Z_95};
use crate::{Error, Result};

/// How sample chunks are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// One thread, chunks in order.
    Sequential,
    /// The global rayon pool (sequential without the `parallel` feature).
    #[default]
    Auto,
    /// A dedicated pool with this many workers (sequential without the
    /// `parallel` feature).
    Workers(usize),
}

/// Monte Carlo SOP estimate with a two-sided 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimate {
    pub case: CaseId,
    pub value: f64,
    pub outages: u64,
    pub n: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    /// Set by adaptive runs: whether the requested relative half-width was
    /// reached within the sample budget. `None` for fixed-size runs.
    pub target_met: Option<bool>,
}

impl SopEstimate {
    fn from_counts(case: CaseId, outages: u64, n: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(outages, n, Z_95);
        Self {
            case,
            value: outages as f64 / n as f64,
            outages,
            n,
            ci_low,
            ci_high,
            seed,
            target_met: None,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    /// Half-width relative to the estimate; infinite when no outage was seen.
    pub fn relative_half_width(&self) -> f64 {
        if self.value > 0.0 {
            self.half_width() / self.value
        } else {
            f64::INFINITY
        }
    }
}

/// Splits `range` at multiples of [`BATCH_SIZE`].
fn batch_chunks(range: Range<u64>) -> Vec<Range<u64>> {
    let mut chunks = Vec::new();
    let mut start = range.start;
    while start < range.end {
        let end = ((start / BATCH_SIZE + 1) * BATCH_SIZE).min(range.end);
        chunks.push(start..end);
        start = end;
    }
    chunks
}

/// Outage counts per case over one chunk that lies inside a single batch.
fn count_chunk(
    cases: &[CaseId],
    snrs: &SnrTriple,
    r: RateThreshold,
    seed: u64,
    chunk: Range<u64>,
) -> Vec<u64> {
    let mut stream = SampleStream::for_sample(seed, chunk.start);
    let mut counts = vec![0u64; cases.len()];
    let rate = r.bits();
    for _ in chunk {
        let draw = stream.sample_draw();
        for (count, &case) in counts.iter_mut().zip(cases) {
            if capacity::end_to_end(case, &draw, snrs) < rate {
                *count += 1;
            }
        }
    }
    counts
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Outage counts for each of `cases` over sample indices `range`.
pub fn count_outages(
    cases: &[CaseId],
    snrs: &SnrTriple,
    r: RateThreshold,
    seed: u64,
    range: Range<u64>,
    parallelism: Parallelism,
) -> Vec<u64> {
    let chunks = batch_chunks(range);
    let zero = || vec![0u64; cases.len()];
    let sequential = |chunks: Vec<Range<u64>>| {
        chunks
            .into_iter()
            .map(|c| count_chunk(cases, snrs, r, seed, c))
            .fold(zero(), add_counts)
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let parallel = |chunks: Vec<Range<u64>>| {
            chunks
                .into_par_iter()
                .map(|c| count_chunk(cases, snrs, r, seed, c))
                .reduce(zero, add_counts)
        };
        match parallelism {
            Parallelism::Sequential => sequential(chunks),
            Parallelism::Auto => parallel(chunks),
            Parallelism::Workers(w) => match rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
            {
                Ok(pool) => pool.install(|| parallel(chunks)),
                Err(_) => sequential(chunks),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = parallelism;
        sequential(chunks)
    }
}

fn require_samples(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::validation("sample count must be at least 1"))
    } else {
        Ok(())
    }
}

/// SOP estimates for several cases on common draws.
pub fn estimate_sop_paired(
    cases: &[CaseId],
    snrs: &SnrTriple,
    r: RateThreshold,
    n: u64,
    seed: u64,
    parallelism: Parallelism,
) -> Result<Vec<SopEstimate>> {
    require_samples(n)?;
    let counts = count_outages(cases, snrs, r, seed, 0..n, parallelism);
    Ok(cases
        .iter()
        .zip(counts)
        .map(|(&case, k)| SopEstimate::from_counts(case, k, n, seed))
        .collect())
}

/// Fraction of `n` draws whose end-to-end secrecy capacity falls strictly
/// below `r`.
pub fn estimate_sop(
    case: CaseId,
    snrs: &SnrTriple,
    r: RateThreshold,
    n: u64,
    seed: u64,
) -> Result<SopEstimate> {
    estimate_sop_with(case, snrs, r, n, seed, Parallelism::Auto)
}

pub fn estimate_sop_with(
    case: CaseId,
    snrs: &SnrTriple,
    r: RateThreshold,
    n: u64,
    seed: u64,
    parallelism: Parallelism,
) -> Result<SopEstimate> {
    Ok(estimate_sop_paired(&[case], snrs, r, n, seed, parallelism)?[0])
}

/// Grows the sample count, doubling from one batch, until the 95% interval
/// half-width is at most `target_rel_halfwidth` times the estimate or
/// `max_n` samples have been used. The final estimate equals a fixed-size
/// run with the same `n` and seed.
pub fn estimate_sop_adaptive(
    case: CaseId,
    snrs: &SnrTriple,
    r: RateThreshold,
    target_rel_halfwidth: f64,
    max_n: u64,
    seed: u64,
) -> Result<SopEstimate> {
    if !(target_rel_halfwidth > 0.0 && target_rel_halfwidth < 1.0) {
        return Err(Error::validation(format!(
            "relative half-width target must lie in (0, 1), got {target_rel_halfwidth}"
        )));
    }
    require_samples(max_n)?;

    let mut n = 0u64;
    let mut outages = 0u64;
    loop {
        let next = if n == 0 { BATCH_SIZE } else { n.saturating_mul(2) }.min(max_n);
        outages += count_outages(&[case], snrs, r, seed, n..next, Parallelism::Auto)[0];
        n = next;
        let mut est = SopEstimate::from_counts(case, outages, n, seed);
        let met = est.relative_half_width() <= target_rel_halfwidth;
        if met || n >= max_n {
            est.target_met = Some(met);
            return Ok(est);
        }
    }
}
