//! Monte Carlo estimates of the curl ratio `Curl_φ(n) / |B_n|`.
//!
//! Words are drawn uniformly from `B_n`. Samples are split into fixed-size
//! batches; batch `i` draws from ChaCha8 seeded with `seed` on stream `i`, so
//! the estimate depends only on `(φ, n, samples, seed)` and not on how the
//! batches are scheduled.

use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::joint::ball_sizes;
use crate::morphisms::Endomorphism;
use crate::words::{GroupContext, Letter, Word};

pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), stream = batch index";
const BATCH: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub n: usize,
    pub samples: u64,
    pub hits: u64,
    pub point: f64,
    pub ci95: f64,
    pub seed: u64,
    pub rng: &'static str,
}

impl RatioEstimate {
    pub fn flux_point(&self) -> f64 {
        1.0 - self.point
    }

    pub fn contains(&self, value: f64) -> bool {
        (self.point - value).abs() <= self.ci95
    }
}

/// Draws uniform elements of `B_n`.
pub struct BallSampler {
    ctx: GroupContext,
    n: usize,
    /// `|B_0|, ..., |B_n|`
    balls: Vec<BigUint>,
}

impl BallSampler {
    pub fn new(ctx: &GroupContext, n: usize) -> BallSampler {
        BallSampler { ctx: ctx.clone(), n, balls: ball_sizes(ctx, n) }
    }

    /// Length `l` with probability `|S_l| / |B_n|`: the smallest `l` with
    /// `u < |B_l|` for `u` uniform in `[0, |B_n|)`.
    pub fn sample_length<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        let u = uniform_below(&self.balls[self.n], rng);
        self.balls.partition_point(|b| *b <= u)
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Word {
        let len = self.sample_length(rng);
        let alphabet = self.ctx.alphabet_size();
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        for i in 0..len {
            let l = if i == 0 {
                Letter::from_code(rng.random_range(0..alphabet))
            } else {
                // uniform over the 2r - 1 letters other than the inverse of the last
                let forbidden = letters[i - 1].inverse().code();
                let mut c = rng.random_range(0..alphabet - 1);
                if c >= forbidden {
                    c += 1;
                }
                Letter::from_code(c)
            };
            letters.push(l);
        }
        Word::from_reduced_unchecked(letters)
    }
}

/// Uniform integer in `[0, bound)` by rejection on `bound.bits()` random bits.
fn uniform_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let bits = bound.bits() as usize;
    let bytes = bits.div_ceil(8);
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        let extra = bytes * 8 - bits;
        if extra > 0 {
            buf[bytes - 1] &= 0xff >> extra;
        }
        let candidate = BigUint::from_bytes_le(&buf);
        if candidate < *bound {
            return candidate;
        }
    }
}

pub fn sample_uniform_ball<R: RngCore + ?Sized>(ctx: &GroupContext, n: usize, rng: &mut R) -> Word {
    BallSampler::new(ctx, n).sample(rng)
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Fraction of uniform `w ∈ B_n` with `|φ(w)| <= n`, with a normal
/// approximation 95% half-width.
pub fn estimate_curl_ratio(phi: &Endomorphism, n: usize, samples: u64, seed: u64) -> RatioEstimate {
    assert!(samples >= 1, "need at least one sample");
    let sampler = BallSampler::new(phi.ctx(), n);
    let batches = samples.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let count = BATCH.min(samples - b * BATCH);
            (0..count).filter(|_| phi.image_len(&sampler.sample(&mut rng)) <= n).count() as u64
        })
        .sum();
    let point = hits as f64 / samples as f64;
    let ci95 = 1.96 * (point * (1.0 - point) / samples as f64).sqrt();
    RatioEstimate { n, samples, hits, point, ci95, seed, rng: RNG_ALGORITHM }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_count::curl_flux_brute;
    use crate::metrics::ratio_f64;
    use crate::words::DEFAULT_ENUMERATION_CAP;

    fn xy() -> GroupContext {
        GroupContext::with_names("xy").unwrap()
    }

    #[test]
    fn radius_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert!(sample_uniform_ball(&xy(), 0, &mut rng).is_identity());
        }
    }

    #[test]
    fn samples_are_reduced_and_in_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ctx = GroupContext::new(3).unwrap();
        let s = BallSampler::new(&ctx, 9);
        for _ in 0..2000 {
            let w = s.sample(&mut rng);
            assert!(w.len() <= 9);
            assert!(Word::is_reduced_seq(w.letters()));
        }
    }

    #[test]
    fn length_distribution_matches_spheres() {
        let ctx = xy();
        let n = 5;
        let s = BallSampler::new(&ctx, n);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let total = 100_000u32;
        let mut counts = vec![0u32; n + 1];
        for _ in 0..total {
            counts[s.sample_length(&mut rng)] += 1;
        }
        let ball = ctx.ball_size(n);
        let mut chi2 = 0.0;
        for (l, &c) in counts.iter().enumerate() {
            let p = ratio_f64(&ctx.sphere_size(l), &ball);
            let expected = p * total as f64;
            let sigma = (total as f64 * p * (1.0 - p)).sqrt();
            assert!((c as f64 - expected).abs() <= 4.0 * sigma, "l={l} count={c} expected={expected}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 5 degrees of freedom, 99.9% quantile is about 20.5
        assert!(chi2 < 20.5, "chi2 = {chi2}");
    }

    #[test]
    fn letters_are_uniform_given_length() {
        let ctx = xy();
        let s = BallSampler::new(&ctx, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = std::collections::HashMap::new();
        let mut sphere_hits = 0u32;
        for _ in 0..200_000 {
            let w = s.sample(&mut rng);
            if w.len() == 3 {
                *seen.entry(w).or_insert(0u32) += 1;
                sphere_hits += 1;
            }
        }
        assert_eq!(seen.len(), 36);
        let expected = sphere_hits as f64 / 36.0;
        for &c in seen.values() {
            assert!((c as f64 - expected).abs() < 5.0 * expected.sqrt());
        }
    }

    #[test]
    fn identity_estimate_is_exact() {
        let e = estimate_curl_ratio(&Endomorphism::identity(&xy()), 12, 5000, 9);
        assert_eq!(e.point, 1.0);
        assert_eq!(e.ci95, 0.0);
        assert_eq!(e.flux_point(), 0.0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let phi = Endomorphism::parse(&xy(), &["xy", "y"]).unwrap();
        let a = estimate_curl_ratio(&phi, 10, 10_000, 42);
        let b = estimate_curl_ratio(&phi, 10, 10_000, 42);
        let c = estimate_curl_ratio(&phi, 10, 10_000, 43);
        assert_eq!(a, b);
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn estimate_brackets_exact_ratio() {
        let phi = Endomorphism::parse(&xy(), &["xy", "y"]).unwrap();
        let p = curl_flux_brute(&phi, 8, DEFAULT_ENUMERATION_CAP).unwrap();
        let exact = ratio_f64(&p.curl_count, &p.ball);
        let e = estimate_curl_ratio(&phi, 8, 50_000, 5);
        assert!(e.contains(exact), "{e:?} vs {exact}");
    }
}
