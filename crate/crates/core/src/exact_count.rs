//! Brute-force oracle: curl/flux functions and growth functions by
//! enumerating balls and spheres.

use std::collections::HashSet;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::joint::{CurlFluxPoint, JointLengthTable};
use crate::morphisms::Endomorphism;
use crate::words::{GroupContext, Letter, DEFAULT_ENUMERATION_CAP};

/// Abort growth iteration once an image exceeds this many letters.
pub const DEFAULT_GROWTH_CAP: usize = 1_000_000;

fn check_ball(ctx: &GroupContext, n: usize, cap: u64) -> Result<()> {
    let size = ctx.ball_size(n);
    if size > BigUint::from(cap) {
        return Err(Error::EnumerationTooLarge { size: size.to_string(), cap });
    }
    Ok(())
}

/// Exact joint histogram `N[l][m]` for `l <= n` by depth-first enumeration
/// of `B_n`, maintaining `φ(w)` incrementally. Rows are padded so every
/// `m <= n` is stored, and nothing lands in the OUT bucket.
pub fn joint_length_histogram(phi: &Endomorphism, n: usize, cap: u64) -> Result<JointLengthTable> {
    let ctx = phi.ctx();
    check_ball(ctx, n, cap)?;
    let width = (phi.max_image_len() * n).max(n) + 1;
    let letters: Vec<Letter> = ctx.letters().collect();

    let partial: Vec<Vec<Vec<u64>>> = letters
        .par_iter()
        .map(|&first| {
            let mut hist = vec![vec![0u64; width]; n + 1];
            if n >= 1 {
                let mut walker = Walker { phi, image: Vec::new(), hist: &mut hist, n };
                walker.descend(first, 1);
            }
            hist
        })
        .collect();

    let mut rows: Vec<Vec<BigUint>> = (0..=n).map(|_| vec![BigUint::default(); width]).collect();
    rows[0][0] = BigUint::from(1u32);
    for hist in partial {
        for (row, counts) in rows.iter_mut().zip(hist) {
            for (cell, c) in row.iter_mut().zip(counts) {
                if c != 0 {
                    *cell += c;
                }
            }
        }
    }
    let out = vec![BigUint::default(); n + 1];
    Ok(JointLengthTable::new(ctx.rank(), rows, out))
}

struct Walker<'a> {
    phi: &'a Endomorphism,
    image: Vec<Letter>,
    hist: &'a mut Vec<Vec<u64>>,
    n: usize,
}

impl Walker<'_> {
    fn descend(&mut self, b: Letter, depth: usize) {
        let img = self.phi.letter_image(b).letters();
        let cancel = self.image.iter().rev().zip(img).take_while(|(a, c)| **a == c.inverse()).count();
        self.image.truncate(self.image.len() - cancel);
        self.image.extend_from_slice(&img[cancel..]);

        self.hist[depth][self.image.len()] += 1;
        if depth < self.n {
            for code in 0..self.phi.ctx().alphabet_size() {
                let next = Letter::from_code(code);
                if next != b.inverse() {
                    self.descend(next, depth + 1);
                }
            }
        }

        // the cancelled letters were the inverses of img[..cancel], reversed
        self.image.truncate(self.image.len() - (img.len() - cancel));
        self.image.extend(img[..cancel].iter().rev().map(|l| l.inverse()));
    }
}

/// Curl and flux counts at every radius `0..=n`.
pub fn curl_flux_series_brute(phi: &Endomorphism, n: usize, cap: u64) -> Result<Vec<CurlFluxPoint>> {
    Ok(joint_length_histogram(phi, n, cap)?.points(phi.ctx()))
}

/// `Curl_φ(n) = #{w : |w| <= n, |φ(w)| <= n}`, flux as `|B_n| - Curl_φ(n)`.
pub fn curl_flux_brute(phi: &Endomorphism, n: usize, cap: u64) -> Result<CurlFluxPoint> {
    Ok(curl_flux_series_brute(phi, n, cap)?.pop().expect("series has n + 1 points"))
}

/// `|φ(B_n) ∩ B_n|` as a set of images. Equals the curl count when `φ` is
/// injective on `B_n`; smaller otherwise.
pub fn image_cardinality(phi: &Endomorphism, n: usize, cap: u64) -> Result<BigUint> {
    let ctx = phi.ctx();
    check_ball(ctx, n, cap)?;
    let mut images = HashSet::new();
    for l in 0..=n {
        for w in ctx.enumerate_sphere(l, cap)? {
            let img = phi.apply(&w);
            if img.len() <= n {
                images.insert(img);
            }
        }
    }
    Ok(BigUint::from(images.len()))
}

/// `Γ_{φ,m}(n) = max_{|w| = m} |φ^n(w)|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthPoint {
    pub m: usize,
    pub n: usize,
    pub value: usize,
}

/// `Γ_{φ,m}(k)` for `k = 0..=n`, iterating `apply` on every word of `S_m`.
pub fn growth_series(phi: &Endomorphism, m: usize, n: usize, cap: u64, growth_cap: usize) -> Result<Vec<GrowthPoint>> {
    let mut best = vec![0usize; n + 1];
    for w in phi.ctx().enumerate_sphere(m, cap)? {
        let mut current = w;
        best[0] = best[0].max(current.len());
        for (k, slot) in best.iter_mut().enumerate().skip(1) {
            current = phi.apply(&current);
            if current.len() > growth_cap {
                return Err(Error::GrowthBlowUp { length: current.len(), cap: growth_cap, iteration: k });
            }
            *slot = (*slot).max(current.len());
        }
    }
    Ok(best.into_iter().enumerate().map(|(k, value)| GrowthPoint { m, n: k, value }).collect())
}

pub fn growth_function(phi: &Endomorphism, m: usize, n: usize) -> Result<GrowthPoint> {
    Ok(growth_series(phi, m, n, DEFAULT_ENUMERATION_CAP, DEFAULT_GROWTH_CAP)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphisms::random_endomorphism;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const CAP: u64 = DEFAULT_ENUMERATION_CAP;

    fn xy() -> GroupContext {
        GroupContext::with_names("xy").unwrap()
    }

    fn map(ctx: &GroupContext, images: &[&str]) -> Endomorphism {
        Endomorphism::parse(ctx, images).unwrap()
    }

    /// Curl count straight from the definition: enumerate B_n word by word.
    fn naive_curl(phi: &Endomorphism, n: usize) -> u64 {
        (0..=n).flat_map(|l| phi.ctx().enumerate_sphere(l, CAP).unwrap()).filter(|w| phi.image_len(w) <= n).count() as u64
    }

    #[test]
    fn identity_keeps_everything() {
        let ctx = xy();
        for n in 0..=6 {
            let p = curl_flux_brute(&Endomorphism::identity(&ctx), n, CAP).unwrap();
            assert_eq!(p.curl_count, ctx.ball_size(n));
            assert_eq!(p.flux_count, BigUint::default());
        }
    }

    #[test]
    fn alpha_ratio_at_ten() {
        let ctx = xy();
        let p = curl_flux_brute(&map(&ctx, &["xy", "y"]), 10, CAP).unwrap();
        let ratio = crate::metrics::ratio_f64(&p.curl_count, &p.ball);
        assert_eq!(format!("{:.6}", ratio), "0.331634");
    }

    #[test]
    fn square_map_keeps_half_radius_ball() {
        let ctx = xy();
        let p = curl_flux_brute(&map(&ctx, &["xx", "yy"]), 4, CAP).unwrap();
        assert_eq!(p.curl_count, BigUint::from(17u32));
    }

    #[test]
    fn histogram_shapes() {
        let ctx = xy();
        let id = joint_length_histogram(&Endomorphism::identity(&ctx), 6, CAP).unwrap();
        let sq = joint_length_histogram(&map(&ctx, &["xx", "yy"]), 6, CAP).unwrap();
        for l in 0..=6 {
            for m in 0..id.row(l).len() {
                if m != l {
                    assert_eq!(id.get(l, m).unwrap(), &BigUint::default());
                }
            }
            for m in 0..sq.row(l).len() {
                if m != 2 * l {
                    assert_eq!(sq.get(l, m).unwrap(), &BigUint::default());
                }
            }
        }
        let alpha = joint_length_histogram(&map(&ctx, &["xy", "y"]), 2, CAP).unwrap();
        assert_eq!(alpha.row_total(2), BigUint::from(12u32));
        assert!(alpha.rows_match_spheres(&ctx));
    }

    #[test]
    fn histogram_matches_naive_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for rank in 1..=3 {
            let ctx = GroupContext::new(rank).unwrap();
            for _ in 0..8 {
                let phi = random_endomorphism(&ctx, 3, &mut rng);
                let series = curl_flux_series_brute(&phi, 5, CAP).unwrap();
                let table = joint_length_histogram(&phi, 5, CAP).unwrap();
                assert!(table.rows_match_spheres(&ctx));
                for p in &series {
                    assert!(p.is_consistent());
                    assert_eq!(p.curl_count, BigUint::from(naive_curl(&phi, p.n)), "{phi} n={}", p.n);
                    assert_eq!(p.ball, ctx.ball_size(p.n));
                }
            }
        }
    }

    #[test]
    fn curl_is_at_least_the_scaled_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ctx = xy();
        for _ in 0..20 {
            let phi = random_endomorphism(&ctx, 3, &mut rng);
            let k = phi.max_image_len().max(1);
            for p in curl_flux_series_brute(&phi, 7, CAP).unwrap() {
                assert!(p.curl_count >= ctx.ball_size(p.n / k));
            }
        }
    }

    #[test]
    fn image_cardinality_vs_counting_form() {
        let ctx = xy();
        let alpha = map(&ctx, &["xy", "y"]);
        for n in 0..=5 {
            assert_eq!(image_cardinality(&alpha, n, CAP).unwrap(), curl_flux_brute(&alpha, n, CAP).unwrap().curl_count);
        }
        // not injective: several words share an image
        let collapse = map(&ctx, &["xy", "1"]);
        let n = 4;
        assert!(image_cardinality(&collapse, n, CAP).unwrap() < curl_flux_brute(&collapse, n, CAP).unwrap().curl_count);
    }

    #[test]
    fn cap_is_enforced() {
        let ctx = xy();
        let err = curl_flux_brute(&Endomorphism::identity(&ctx), 10, 1000).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { .. }));
    }

    #[test]
    fn growth_examples() {
        let ctx = xy();
        let alpha = map(&ctx, &["xy", "y"]);
        for p in growth_series(&alpha, 1, 15, CAP, DEFAULT_GROWTH_CAP).unwrap() {
            assert_eq!(p.value, p.n + 1);
        }
        let swap = map(&ctx, &["Y", "x"]);
        for m in 0..=4 {
            assert!(growth_series(&swap, m, 6, CAP, DEFAULT_GROWTH_CAP).unwrap().iter().all(|p| p.value == m));
        }
        let fib = map(&ctx, &["xy", "x"]);
        let (mut a, mut b) = (1usize, 2usize);
        for p in growth_series(&fib, 1, 20, CAP, DEFAULT_GROWTH_CAP).unwrap() {
            assert_eq!(p.value, a);
            (a, b) = (b, a + b);
        }
        assert_eq!(growth_function(&alpha, 2, 0).unwrap().value, 2);
    }

    #[test]
    fn growth_cap_is_enforced() {
        let ctx = xy();
        let doubling = map(&ctx, &["xx", "yy"]);
        let err = growth_series(&doubling, 1, 30, CAP, 1000).unwrap_err();
        assert!(matches!(err, Error::GrowthBlowUp { iteration: 10, .. }));
    }
}
