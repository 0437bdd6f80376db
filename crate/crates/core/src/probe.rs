//! Interval probabilities of weighted Rademacher sums `Sigma = sum_i a_i s_i`
//! with independent uniform signs `s_i`, computed exactly by convolution over
//! the integer support and estimated by sampling.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{seeded, seeded_stream};
use crate::scan::map_blocks;

/// Largest `sum |a_i|` accepted by the exact oracle.
pub const MAX_SUPPORT: u64 = 10_000_000;

/// Samples drawn per independent stream in [`mc_interval_prob`].
const MC_CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedSum {
    a: Vec<i64>,
    /// `sum |a_i|`.
    span: u64,
}

impl WeightedSum {
    pub fn new(a: Vec<i64>) -> Result<Self> {
        let mut span = 0u64;
        for &x in &a {
            if x == 0 || x == i64::MIN {
                return Err(Error::invalid(format!("weight {x} must satisfy 1 <= |a_i| < 2^63")));
            }
            span = span
                .checked_add(x.unsigned_abs())
                .filter(|&s| s <= i64::MAX as u64)
                .ok_or(Error::Overflow)?;
        }
        Ok(WeightedSum { a, span })
    }

    pub fn weights(&self) -> &[i64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn span(&self) -> u64 {
        self.span
    }
}

/// Outcome counts: entry `x + span` holds the number of sign vectors with
/// `Sigma = x`. The counts sum to `2^n`.
pub fn distribution(w: &WeightedSum) -> Result<Vec<BigUint>> {
    if w.span > MAX_SUPPORT {
        return Err(Error::limit(format!("support {} exceeds {MAX_SUPPORT}", w.span)));
    }
    let width = 2 * w.span as usize + 1;
    let mut dist = vec![BigUint::zero(); width];
    dist[w.span as usize] = BigUint::one();
    // Only [mid - reach, mid + reach] can be nonzero so far.
    let mid = w.span as usize;
    let mut reach = 0usize;
    for &x in &w.a {
        let s = x.unsigned_abs() as usize;
        let mut next = vec![BigUint::zero(); width];
        for v in mid - reach..=mid + reach {
            if dist[v].is_zero() {
                continue;
            }
            next[v - s] += &dist[v];
            next[v + s] += &dist[v];
        }
        dist = next;
        reach += s;
    }
    Ok(dist)
}

fn window(dist: &[BigUint], span: i64, lo: i64, hi: i64) -> BigUint {
    let lo = lo.max(-span);
    let hi = hi.min(span);
    let mut total = BigUint::zero();
    if lo > hi {
        return total;
    }
    for x in lo..=hi {
        total += &dist[(x + span) as usize];
    }
    total
}

fn ratio(count: BigUint, n: usize) -> BigRational {
    BigRational::new(count.into(), (BigUint::one() << n).into())
}

fn check_delta(delta: i64) -> Result<()> {
    if delta < 0 {
        return Err(Error::invalid(format!("delta {delta} must be nonnegative")));
    }
    Ok(())
}

/// Exact `Pr(|Sigma + h| <= delta)`.
pub fn exact_interval_prob(w: &WeightedSum, delta: i64, h: i64) -> Result<BigRational> {
    check_delta(delta)?;
    let dist = distribution(w)?;
    let span = w.span as i64;
    Ok(ratio(window(&dist, span, -h - delta, -h + delta), w.len()))
}

/// Maximizer of `Pr(|Sigma + h| <= delta)` over integer `h` in
/// `[-span - delta, span + delta]`; the smallest `h` wins ties.
pub fn max_interval_prob(w: &WeightedSum, delta: i64) -> Result<(i64, BigRational)> {
    check_delta(delta)?;
    let dist = distribution(w)?;
    let span = w.span as i64;
    // prefix[k] = sum of dist[..k]
    let mut prefix = Vec::with_capacity(dist.len() + 1);
    prefix.push(BigUint::zero());
    for c in &dist {
        let next = prefix.last().expect("nonempty") + c;
        prefix.push(next);
    }
    let count = |lo: i64, hi: i64| -> BigUint {
        let lo = (lo.max(-span) + span) as usize;
        let hi = hi.min(span) + span;
        if hi < 0 || lo as i64 > hi {
            return BigUint::zero();
        }
        &prefix[hi as usize + 1] - &prefix[lo]
    };
    let mut best_h = -span - delta;
    let mut best = count(-best_h - delta, -best_h + delta);
    for h in -span - delta + 1..=span + delta {
        let c = count(-h - delta, -h + delta);
        if c > best {
            best = c;
            best_h = h;
        }
    }
    Ok((best_h, ratio(best, w.len())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// `sqrt(p (1 - p) / samples)` at the estimate.
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Monte Carlo estimate of `Pr(|Sigma + h| <= delta)`. Samples are drawn in
/// fixed chunks, chunk `c` from stream `c` of the seed, so the result does
/// not depend on `workers`.
pub fn mc_interval_prob(
    w: &WeightedSum,
    delta: i64,
    h: i64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<McEstimate> {
    check_delta(delta)?;
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let a = w.weights();
    let hits: u64 = map_blocks(chunks as usize, workers, |c| {
        let c = c as u64;
        let count = MC_CHUNK.min(samples - c * MC_CHUNK);
        let mut rng = seeded_stream(seed, c);
        let mut hits = 0u64;
        for _ in 0..count {
            let mut sum = h as i128;
            for block in a.chunks(64) {
                let bits = rng.next_u64();
                for (k, &x) in block.iter().enumerate() {
                    if (bits >> k) & 1 == 1 {
                        sum += x as i128;
                    } else {
                        sum -= x as i128;
                    }
                }
            }
            if sum.abs() <= delta as i128 {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        hits,
        samples,
    })
}

/// How [`lemma_scaling_report`] draws `n` weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightGen {
    Unit,
    /// Uniform choice from the listed magnitudes.
    Choice(Vec<i64>),
}

impl WeightGen {
    pub fn draw(&self, n: usize, seed: u64) -> Result<WeightedSum> {
        match self {
            WeightGen::Unit => WeightedSum::new(vec![1; n]),
            WeightGen::Choice(values) => {
                if values.is_empty() {
                    return Err(Error::invalid("empty weight choice list"));
                }
                let mut rng = seeded(seed);
                WeightedSum::new((0..n).map(|_| *values.choose(&mut rng).expect("nonempty")).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub h_star: i64,
    /// Exact maximum probability as `p/q`.
    pub value_exact: String,
    pub value: f64,
    /// `value * sqrt(n) / delta`.
    pub normalized: f64,
    /// `value / previous row's value`.
    pub ratio_to_previous: Option<f64>,
}

/// Maximum interval probability for each `n`, normalized by `sqrt(n) / delta`.
pub fn lemma_scaling_report(n_list: &[usize], gen: &WeightGen, delta: i64, seed: u64) -> Result<Vec<ScalingRow>> {
    if delta < 1 {
        return Err(Error::invalid("delta must be at least 1 for the scaling table"));
    }
    let mut rows: Vec<ScalingRow> = Vec::with_capacity(n_list.len());
    for (k, &n) in n_list.iter().enumerate() {
        let w = gen.draw(n, seed.wrapping_add(k as u64))?;
        let (h_star, exact) = max_interval_prob(&w, delta)?;
        let value = exact.to_f64().unwrap_or(f64::NAN);
        rows.push(ScalingRow {
            n,
            h_star,
            value_exact: exact.to_string(),
            value,
            normalized: value * (n as f64).sqrt() / delta as f64,
            ratio_to_previous: rows.last().map(|r| value / r.value),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(r))
    }

    fn ws(a: &[i64]) -> WeightedSum {
        WeightedSum::new(a.to_vec()).unwrap()
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_interval_prob(&ws(&[1, 1, 1, 1]), 1, 0).unwrap(), q(6, 16));
        assert_eq!(exact_interval_prob(&ws(&[1]), 1, 0).unwrap(), q(1, 1));
        assert_eq!(exact_interval_prob(&ws(&[2, 2]), 1, 0).unwrap(), q(1, 2));
        assert_eq!(exact_interval_prob(&ws(&[]), 0, 0).unwrap(), q(1, 1));
    }

    #[test]
    fn max_examples_take_smallest_h() {
        assert_eq!(max_interval_prob(&ws(&[1, 1, 1, 1]), 1).unwrap(), (-1, q(10, 16)));
        assert_eq!(max_interval_prob(&ws(&[1]), 0).unwrap(), (-1, q(1, 2)));
        assert_eq!(max_interval_prob(&ws(&[5]), 5).unwrap(), (0, q(1, 1)));
        assert_eq!(exact_interval_prob(&ws(&[1, 1, 1, 1]), 1, 1).unwrap(), q(10, 16));
    }

    #[test]
    fn distribution_sums_to_one_and_negative_weights_match() {
        let d = distribution(&ws(&[3, -1, 2, 2])).unwrap();
        let total: BigUint = d.iter().sum();
        assert_eq!(total, BigUint::from(16u32));
        assert_eq!(d, distribution(&ws(&[3, 1, 2, 2])).unwrap());
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(WeightedSum::new(vec![1, 0]).is_err());
        assert!(exact_interval_prob(&ws(&[1]), -1, 0).is_err());
        assert!(matches!(
            distribution(&ws(&[MAX_SUPPORT as i64 + 1])),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn mc_is_deterministic_and_close() {
        let w = ws(&[1, 1, 1, 1]);
        let a = mc_interval_prob(&w, 1, 0, 200_000, 9, 1).unwrap();
        let b = mc_interval_prob(&w, 1, 0, 200_000, 9, 4).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - 0.375).abs() <= 4.0 * a.std_error);
        let one = mc_interval_prob(&w, 1, 0, 1, 3, 1).unwrap();
        assert!(one.estimate == 0.0 || one.estimate == 1.0);
    }

    #[test]
    fn unit_scaling_ratio() {
        let rows = lemma_scaling_report(&[16, 64, 256], &WeightGen::Unit, 1, 0).unwrap();
        assert!(rows[1].ratio_to_previous.unwrap() <= 0.6);
        assert!(rows[2].ratio_to_previous.unwrap() <= 0.6);
        let single = lemma_scaling_report(&[1], &WeightGen::Unit, 1, 0).unwrap();
        assert_eq!(single[0].value, 1.0);
    }
}
