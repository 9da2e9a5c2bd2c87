//! Ratios and n-th roots of exact counts, and executable checks of the
//! structural properties of curl and flux.
//!
//! Rates are never reported as limits: a [`RateEstimate`] is the finite table
//! of roots with their successive differences.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::engine::{Engine, EngineConfig};
use crate::error::Result;
use crate::exact_count::growth_series;
use crate::joint::CurlFluxPoint;
use crate::morphisms::{classify, compose, Endomorphism, VerifiedAutomorphism};
use crate::words::{GroupContext, Word};

/// Top 64 significant bits of `x` and the shift that restores it.
fn top_bits(x: &BigUint) -> (f64, i64) {
    let bits = x.bits() as i64;
    let shift = (bits - 64).max(0);
    let top = (x >> shift as usize).to_u64().unwrap();
    (top as f64, shift)
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln of zero");
    let (top, shift) = top_bits(x);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `num / den` as a float without overflowing either operand.
pub fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let (a, sa) = top_bits(num);
    let (b, sb) = top_bits(den);
    (a / b) * 2f64.powi((sa - sb) as i32)
}

/// `(num / den)^(1/n)` in the log domain; 0 when `num = 0`, 1 at `n = 0`.
pub fn nth_root_ratio(num: &BigUint, den: &BigUint, n: usize) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    if n == 0 {
        return 1.0;
    }
    let (a, sa) = top_bits(num);
    let (b, sb) = top_bits(den);
    let ln_ratio = (a / b).ln() + (sa - sb) as f64 * std::f64::consts::LN_2;
    (ln_ratio / n as f64).exp()
}

/// Format like C's `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RateKind {
    Curl,
    Flux,
    Growth,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: usize,
    /// `count / ball` for curl and flux, `Γ` itself for growth.
    pub ratio: f64,
    pub root: f64,
    pub count: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    pub kind: RateKind,
    pub points: Vec<RatePoint>,
    /// The last few `(n, root, root - previous root)`.
    pub trend: Vec<(usize, f64, f64)>,
}

const TREND_LEN: usize = 5;

impl RateEstimate {
    fn from_points(kind: RateKind, points: Vec<RatePoint>) -> RateEstimate {
        let start = points.len().saturating_sub(TREND_LEN);
        let trend = points[start..]
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let prev = if start + i == 0 { p.root } else { points[start + i - 1].root };
                (p.n, p.root, p.root - prev)
            })
            .collect();
        RateEstimate { kind, points, trend }
    }

    pub fn at(&self, n: usize) -> Option<&RatePoint> {
        self.points.iter().find(|p| p.n == n)
    }

    pub fn root_at(&self, n: usize) -> Option<f64> {
        self.at(n).map(|p| p.root)
    }
}

/// Curl ratios and roots (`kind = Curl`) or flux ratios and roots.
pub fn roots(points: &[CurlFluxPoint], kind: RateKind) -> RateEstimate {
    let pts = points
        .iter()
        .map(|p| {
            let count = match kind {
                RateKind::Flux => &p.flux_count,
                _ => &p.curl_count,
            };
            RatePoint {
                n: p.n,
                ratio: ratio_f64(count, &p.ball),
                root: nth_root_ratio(count, &p.ball, p.n),
                count: count.to_string(),
            }
        })
        .collect();
    RateEstimate::from_points(kind, pts)
}

/// `(n, Γ_{φ,m}(n), Γ^{1/n})` for `n = 0..=n_max`; `growth_cap` bounds the
/// image length reached while iterating.
pub fn growth_rate_points(phi: &Endomorphism, m: usize, n_max: usize, cap: u64, growth_cap: usize) -> Result<RateEstimate> {
    let series = growth_series(phi, m, n_max, cap, growth_cap)?;
    let pts = series
        .into_iter()
        .map(|g| RatePoint {
            n: g.n,
            ratio: g.value as f64,
            root: if g.n == 0 { 1.0 } else { (g.value as f64).powf(1.0 / g.n as f64) },
            count: g.value.to_string(),
        })
        .collect();
    Ok(RateEstimate::from_points(RateKind::Growth, pts))
}

/// Outcome of one property check over one or more instances.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub instances: usize,
    pub comparisons: usize,
    pub violations: Vec<String>,
    /// Smallest slack seen (exact integers, or a root distance for trends).
    pub worst_margin: Option<String>,
    /// Soft findings that are reported but never fail the check.
    pub warnings: Vec<String>,
    pub descriptions: Vec<String>,
}

impl PropertyReport {
    pub fn new(property: impl Into<String>) -> PropertyReport {
        PropertyReport { property: property.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Fold another report for the same property into this one.
    pub fn merge(&mut self, other: PropertyReport) {
        self.instances += other.instances;
        self.comparisons += other.comparisons;
        self.violations.extend(other.violations);
        self.warnings.extend(other.warnings);
        self.descriptions.extend(other.descriptions);
        self.worst_margin = match (self.worst_margin.take(), other.worst_margin) {
            (Some(a), Some(b)) => Some(min_margin(a, b)),
            (a, b) => a.or(b),
        };
    }

    fn note_margin(&mut self, margin: &BigInt) {
        let m = margin.to_string();
        self.worst_margin = Some(match self.worst_margin.take() {
            Some(prev) => min_margin(prev, m),
            None => m,
        });
    }

    fn note_float_margin(&mut self, margin: f64) {
        let m = format!("{margin:.6}");
        self.worst_margin = Some(match self.worst_margin.take() {
            Some(prev) if prev.parse::<f64>().unwrap_or(f64::INFINITY) <= margin => prev,
            _ => m,
        });
    }

    fn compare(&mut self, what: impl FnOnce() -> String, ok: bool) {
        self.comparisons += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

fn min_margin(a: String, b: String) -> String {
    match (a.parse::<BigInt>(), b.parse::<BigInt>()) {
        (Ok(x), Ok(y)) => x.min(y).to_string(),
        _ => match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) if y < x => b,
            _ => a,
        },
    }
}

/// Asymptotic curl rate of the power map `x_i -> x_i^k`.
pub fn power_map_curl_rate(rank: usize, k: usize) -> f64 {
    let base = (2 * rank - 1) as f64;
    base.powf(1.0 / k as f64) / base
}

/// `Curl` and `Flux` of `φ` and `φ^-1` agree as exact integers at every `n <= n_max`.
pub fn check_inverse_symmetry(
    a: &VerifiedAutomorphism,
    n_max: usize,
    engine: Engine,
    cfg: &EngineConfig,
) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("inverse symmetry");
    report.instances = 1;
    report.descriptions.push(format!("{} / inverse {}", a.forward(), a.inverse()));
    let fwd = cfg.series(a.forward(), n_max, engine)?;
    let inv = cfg.series(a.inverse(), n_max, engine)?;
    for (p, q) in fwd.iter().zip(&inv) {
        report.compare(
            || format!("{}: n={} curl {} vs {}", a.forward(), p.n, p.curl_count, q.curl_count),
            p.curl_count == q.curl_count,
        );
        report.compare(
            || format!("{}: n={} flux {} vs {}", a.forward(), p.n, p.flux_count, q.flux_count),
            p.flux_count == q.flux_count,
        );
    }
    Ok(report)
}

/// Which of the composition inequalities apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InequalityScope {
    /// (a) and (b), valid for arbitrary endomorphisms.
    Endomorphisms,
    /// (a) through (e); both maps must be automorphisms.
    Automorphisms,
}

/// With `αβ` meaning α applied first:
/// (a) `Curl_αβ <= Curl_β + Flux_α`,
/// (b) `Flux_αβ <= Flux_α + Flux_β`,
/// (c) `Curl_αβ >= Curl_β - Flux_α`,
/// (d) `Flux_αβ >= |Flux_β - Flux_α|`,
/// (e) `Flux_αβ >= Curl_α - Curl_β`.
pub fn check_composition_inequalities(
    alpha: &Endomorphism,
    beta: &Endomorphism,
    n_max: usize,
    scope: InequalityScope,
    engine: Engine,
    cfg: &EngineConfig,
) -> Result<PropertyReport> {
    let name = match scope {
        InequalityScope::Endomorphisms => "composition inequalities (a)-(b)",
        InequalityScope::Automorphisms => "composition inequalities (a)-(e)",
    };
    let mut report = PropertyReport::new(name);
    report.instances = 1;
    report.descriptions.push(format!("alpha {alpha}, beta {beta}"));
    let ab = compose(alpha, beta)?;
    let sa = cfg.series(alpha, n_max, engine)?;
    let sb = cfg.series(beta, n_max, engine)?;
    let sab = cfg.series(&ab, n_max, engine)?;
    for n in 1..=n_max {
        let big = |x: &BigUint| BigInt::from(x.clone());
        let (ca, fa) = (big(&sa[n].curl_count), big(&sa[n].flux_count));
        let (cb, fb) = (big(&sb[n].curl_count), big(&sb[n].flux_count));
        let (cab, fab) = (big(&sab[n].curl_count), big(&sab[n].flux_count));
        let mut slacks: Vec<(&str, BigInt)> = vec![("a", &cb + &fa - &cab), ("b", &fa + &fb - &fab)];
        if scope == InequalityScope::Automorphisms {
            slacks.push(("c", &cab - (&cb - &fa)));
            slacks.push(("d1", &fab - (&fb - &fa)));
            slacks.push(("d2", &fab - (&fa - &fb)));
            slacks.push(("e", &fab - (&ca - &cb)));
        }
        for (label, slack) in slacks {
            report.note_margin(&slack);
            report
                .compare(|| format!("({label}) fails at n={n} for {alpha} then {beta}: slack {slack}"), slack >= BigInt::zero());
        }
    }
    Ok(report)
}

/// `Curl_φ(n) = |B_{⌊n/k⌋}|` exactly for the power map, plus the root at
/// `n_max` against `(2r-1)^(1/k) / (2r-1)` once `n_max >= 50`.
pub fn check_power_map_formula(
    rank: usize,
    k: usize,
    n_max: usize,
    engine: Engine,
    cfg: &EngineConfig,
) -> Result<PropertyReport> {
    let ctx = GroupContext::new(rank)?;
    let phi = Endomorphism::power_map(&ctx, k);
    let mut report = PropertyReport::new("power map curl formula");
    report.instances = 1;
    report.descriptions.push(format!("r={rank} k={k} n<={n_max}"));
    let series = cfg.series(&phi, n_max, engine)?;
    for p in &series {
        let expected = ctx.ball_size(p.n / k);
        report.compare(
            || format!("r={rank} k={k} n={}: curl {} != |B_{}| = {expected}", p.n, p.curl_count, p.n / k),
            p.curl_count == expected,
        );
    }
    let last = series.last().unwrap();
    let root = nth_root_ratio(&last.curl_count, &last.ball, last.n);
    let distance = (root - power_map_curl_rate(rank, k)).abs();
    report.note_float_margin(ROOT_TOLERANCE - distance);
    if n_max >= 50 {
        report.compare(|| format!("r={rank} k={k}: root {root} is {distance} from the limit"), distance <= ROOT_TOLERANCE);
    }
    Ok(report)
}

/// Tolerance on roots at the largest computed radius for asymptotic checks.
pub const ROOT_TOLERANCE: f64 = 0.02;

/// Gap check for injective maps: single-letter images give zero flux
/// exactly; otherwise the flux root at `n_max` is reported and flagged, not
/// failed, when below 1/4.
pub fn check_flux_gap(phi: &Endomorphism, n_max: usize, engine: Engine, cfg: &EngineConfig) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("flux gap");
    report.instances = 1;
    report.descriptions.push(phi.to_string());
    let series = cfg.series(phi, n_max, engine)?;
    if phi.images().all(|w| w.len() == 1) {
        for p in &series {
            report.compare(
                || format!("{phi}: single-letter images but flux {} at n={}", p.flux_count, p.n),
                p.flux_count.is_zero(),
            );
        }
        return Ok(report);
    }
    let last = series.last().unwrap();
    let root = nth_root_ratio(&last.flux_count, &last.ball, last.n);
    report.comparisons += 1;
    report.note_float_margin(root - 0.25);
    if root < 0.25 {
        report.warnings.push(format!("{phi}: flux root {root:.6} below 1/4 at n={n_max}"));
    }
    Ok(report)
}

/// Composing with a letter permutation on either side leaves the curl and
/// flux functions unchanged exactly. Composing with conjugations is only
/// compared on roots at `rate_n`; flux roots too when `injective` and some
/// image has length at least 2 (a map with zero flux gets positive flux
/// from a conjugation).
#[allow(clippy::too_many_arguments)]
pub fn check_invariance_under_simple_composition(
    phi: &Endomorphism,
    n_max: usize,
    permutations: &[Endomorphism],
    conjugators: &[Word],
    rate_n: usize,
    injective: bool,
    engine: Engine,
    cfg: &EngineConfig,
) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("invariance under simple composition");
    report.instances = 1;
    report.descriptions.push(phi.to_string());
    let base = cfg.series(phi, n_max, engine)?;
    for pi in permutations {
        for composite in [compose(phi, pi)?, compose(pi, phi)?] {
            let other = cfg.series(&composite, n_max, engine)?;
            for (p, q) in base.iter().zip(&other) {
                report.compare(
                    || format!("{composite} vs {phi}: n={} curl {} vs {}", p.n, q.curl_count, p.curl_count),
                    p.curl_count == q.curl_count,
                );
            }
        }
    }
    if !conjugators.is_empty() {
        let base = cfg.series(phi, rate_n, Engine::Dp)?;
        let curl = roots(&base, RateKind::Curl).root_at(rate_n).unwrap();
        let flux = roots(&base, RateKind::Flux).root_at(rate_n).unwrap();
        let compare_flux = injective && phi.images().any(|w| w.len() >= 2);
        for g in conjugators {
            let inner = Endomorphism::inner(phi.ctx(), g);
            for composite in [compose(phi, &inner)?, compose(&inner, phi)?] {
                let other = cfg.series(&composite, rate_n, Engine::Dp)?;
                let c = roots(&other, RateKind::Curl).root_at(rate_n).unwrap();
                report.note_float_margin(ROOT_TOLERANCE - (c - curl).abs());
                report.compare(
                    || format!("{composite}: curl root {c:.6} vs {curl:.6} at n={rate_n}"),
                    (c - curl).abs() <= ROOT_TOLERANCE,
                );
                if compare_flux {
                    let f = roots(&other, RateKind::Flux).root_at(rate_n).unwrap();
                    report.note_float_margin(ROOT_TOLERANCE - (f - flux).abs());
                    report.compare(
                        || format!("{composite}: flux root {f:.6} vs {flux:.6} at n={rate_n}"),
                        (f - flux).abs() <= ROOT_TOLERANCE,
                    );
                }
            }
        }
    }
    Ok(report)
}

/// Simple maps: permutations keep everything (zero flux); a nontrivial
/// conjugator gives curl and flux roots both at least 0.9 at `n`.
pub fn check_simple_classifier(phi: &Endomorphism, n: usize, engine: Engine, cfg: &EngineConfig) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("simple maps keep curl root near 1");
    report.instances = 1;
    report.descriptions.push(phi.to_string());
    let class = classify(phi);
    if !class.is_simple() {
        return Ok(report);
    }
    let series = cfg.series(phi, n, engine)?;
    match class {
        crate::morphisms::Classification::Permutation(_) => {
            for p in &series {
                report.compare(|| format!("{phi}: permutation with flux {} at n={}", p.flux_count, p.n), p.flux_count.is_zero());
            }
        }
        _ => {
            let c = roots(&series, RateKind::Curl).root_at(n).unwrap();
            let f = roots(&series, RateKind::Flux).root_at(n).unwrap();
            report.note_float_margin(c.min(f) - 0.9);
            report.compare(|| format!("{phi}: curl root {c:.6}, flux root {f:.6} at n={n}"), c >= 0.9 && f >= 0.9);
        }
    }
    Ok(report)
}
