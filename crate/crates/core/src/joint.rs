//! Counting results shared by the brute-force and transducer engines.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::words::GroupContext;

/// `Curl_φ(n)` and `Flux_φ(n)` at one radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurlFluxPoint {
    pub n: usize,
    #[serde(serialize_with = "crate::serde_big::decimal")]
    pub curl_count: BigUint,
    #[serde(serialize_with = "crate::serde_big::decimal")]
    pub flux_count: BigUint,
    #[serde(serialize_with = "crate::serde_big::decimal")]
    pub ball: BigUint,
}

impl CurlFluxPoint {
    /// Flux is `ball - curl`.
    pub fn from_curl(n: usize, curl_count: BigUint, ball: BigUint) -> CurlFluxPoint {
        assert!(curl_count <= ball, "curl count {curl_count} exceeds |B_{n}| = {ball}");
        let flux_count = &ball - &curl_count;
        CurlFluxPoint { n, curl_count, flux_count, ball }
    }

    pub fn is_consistent(&self) -> bool {
        &self.curl_count + &self.flux_count == self.ball
    }
}

/// `N[l][m] = #{w : |w| = l, |φ(w)| = m}` for `l <= n`.
///
/// Each row stores the cells `m = 0..row.len()` exactly; words whose image is
/// longer than the stored extent are aggregated in `out[l]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointLengthTable {
    rank: usize,
    n: usize,
    rows: Vec<Vec<BigUint>>,
    out: Vec<BigUint>,
}

impl JointLengthTable {
    pub fn new(rank: usize, rows: Vec<Vec<BigUint>>, out: Vec<BigUint>) -> JointLengthTable {
        assert_eq!(rows.len(), out.len());
        assert!(!rows.is_empty());
        JointLengthTable { rank, n: rows.len() - 1, rows, out }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Exact cell, or `None` when `m` is beyond the stored extent of row `l`.
    pub fn get(&self, l: usize, m: usize) -> Option<&BigUint> {
        self.rows.get(l)?.get(m)
    }

    pub fn row(&self, l: usize) -> &[BigUint] {
        &self.rows[l]
    }

    pub fn out(&self, l: usize) -> &BigUint {
        &self.out[l]
    }

    pub fn row_total(&self, l: usize) -> BigUint {
        self.rows[l].iter().sum::<BigUint>() + &self.out[l]
    }

    /// Check `sum_m N[l][m] + OUT[l] = |S_l|` for every row.
    pub fn rows_match_spheres(&self, ctx: &GroupContext) -> bool {
        ctx.sphere_sizes(self.n).iter().enumerate().all(|(l, s)| self.row_total(l) == *s)
    }

    /// Curl count for every radius `0..=n`; needs every row to store `m <= n`.
    pub fn curl_counts(&self) -> Vec<BigUint> {
        let cell =
            |l: usize, m: usize| -> &BigUint { self.rows[l].get(m).unwrap_or_else(|| panic!("row {l} does not store m = {m}")) };
        let mut out = Vec::with_capacity(self.n + 1);
        let mut acc = BigUint::zero();
        for k in 0..=self.n {
            // new cells: row k with m <= k, and column k with l < k
            for m in 0..=k {
                acc += cell(k, m);
            }
            for l in 0..k {
                acc += cell(l, k);
            }
            out.push(acc.clone());
        }
        out
    }

    pub fn points(&self, ctx: &GroupContext) -> Vec<CurlFluxPoint> {
        let balls = ball_sizes(ctx, self.n);
        self.curl_counts().into_iter().zip(balls).enumerate().map(|(n, (c, b))| CurlFluxPoint::from_curl(n, c, b)).collect()
    }
}

pub(crate) fn ball_sizes(ctx: &GroupContext, n: usize) -> Vec<BigUint> {
    let mut acc = BigUint::zero();
    ctx.sphere_sizes(n)
        .into_iter()
        .map(|s| {
            acc += s;
            acc.clone()
        })
        .collect()
}
