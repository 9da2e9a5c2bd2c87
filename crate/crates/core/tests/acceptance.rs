//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output.
//!
//! A criterion listed in `KNOWN_UNATTAINABLE` still runs and still prints
//! FAIL when it fails; it just does not fail the process.

use std::time::Instant;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use curlflux::battery::{random_monomorphism, standard_maps};
use curlflux::error::Error;
use curlflux::exact_count::{curl_flux_series_brute, growth_series, DEFAULT_GROWTH_CAP};
use curlflux::metrics::{
    check_composition_inequalities, check_inverse_symmetry, check_power_map_formula, format_sig, nth_root_ratio, ratio_f64,
    InequalityScope, PropertyReport,
};
use curlflux::morphisms::{random_automorphism, random_endomorphism};
use curlflux::sampler::estimate_curl_ratio;
use curlflux::transducer::{build, curl_flux_series_dp, BuildConfig, DpOptions};
use curlflux::words::DEFAULT_ENUMERATION_CAP;
use curlflux::{CurlFluxPoint, Endomorphism, Engine, EngineConfig, GroupContext};

/// Criteria whose statement does not hold; see the project notes.
const KNOWN_UNATTAINABLE: &[&str] = &["7c"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Run {
    outcomes: Vec<Outcome>,
    points: Vec<CurlFluxPoint>,
}

impl Run {
    fn record(&mut self, id: &'static str, pass: bool, detail: impl Into<String>) {
        let detail = detail.into();
        println!("[{}] criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.outcomes.push(Outcome { id, pass, detail });
    }

    fn keep(&mut self, points: &[CurlFluxPoint]) {
        self.points.extend_from_slice(points);
    }

    fn dp(&mut self, phi: &Endomorphism, n: usize) -> Vec<CurlFluxPoint> {
        let s = curl_flux_series_dp(phi, n, &BuildConfig::default(), &DpOptions::default()).unwrap();
        self.keep(&s);
        s
    }

    fn brute(&mut self, phi: &Endomorphism, n: usize) -> Vec<CurlFluxPoint> {
        let s = curl_flux_series_brute(phi, n, DEFAULT_ENUMERATION_CAP).unwrap();
        self.keep(&s);
        s
    }
}

fn xy() -> GroupContext {
    GroupContext::with_names("xy").unwrap()
}

fn xyz() -> GroupContext {
    GroupContext::with_names("xyz").unwrap()
}

fn map(ctx: &GroupContext, images: &[&str]) -> Endomorphism {
    Endomorphism::parse(ctx, images).unwrap()
}

fn sig(x: f64) -> String {
    format_sig(x, 6)
}

fn curl_ratio(p: &CurlFluxPoint) -> f64 {
    ratio_f64(&p.curl_count, &p.ball)
}

fn curl_root(p: &CurlFluxPoint) -> f64 {
    nth_root_ratio(&p.curl_count, &p.ball, p.n)
}

fn flux_root(p: &CurlFluxPoint) -> f64 {
    nth_root_ratio(&p.flux_count, &p.ball, p.n)
}

fn compare_table(got: &[(usize, f64)], want: &[(usize, &str)]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (&(n, x), &(_, w)) in got.iter().zip(want) {
        let s = sig(x);
        ok &= s == w;
        parts.push(format!("n={n} {s}{}", if s == w { String::new() } else { format!(" (want {w})") }));
    }
    (ok, parts.join(", "))
}

fn report_line(r: &PropertyReport) -> String {
    format!(
        "{} instances, {} comparisons, {} violations, worst margin {}",
        r.instances,
        r.comparisons,
        r.violations.len(),
        r.worst_margin.as_deref().unwrap_or("-")
    )
}

const ROWS: [usize; 4] = [10, 20, 50, 100];

fn criterion_1(run: &mut Run) -> Vec<CurlFluxPoint> {
    let t = Instant::now();
    let s = run.dp(&map(&xy(), &["xy", "y"]), 100);
    let elapsed = t.elapsed();
    let curl: Vec<_> = ROWS.iter().map(|&n| (n, curl_ratio(&s[n]))).collect();
    let flux: Vec<_> = ROWS.iter().map(|&n| (n, flux_root(&s[n]))).collect();
    let (a, da) = compare_table(&curl, &[(10, "0.331634"), (20, "0.181176"), (50, "0.0372579"), (100, "0.0033803")]);
    let (b, db) = compare_table(&flux, &[(10, "0.960509"), (20, "0.990055"), (50, "0.999241"), (100, "0.999966")]);
    let fast = elapsed.as_secs() <= 300;
    run.record("1", a && b && fast, format!("x->xy, y->y curl ratios [{da}]; flux roots [{db}]; {elapsed:.2?}"));

    let t = Instant::now();
    let big = curl_flux_series_dp(&map(&xy(), &["xy", "y"]), 500, &BuildConfig::default(), &DpOptions::default()).unwrap();
    let p = &big[500];
    println!(
        "[INFO] criterion 1 stretch (non-gating): n=500 curl ratio {} (expected 6.71114e-11), {:.2?}",
        sig(curl_ratio(p)),
        t.elapsed()
    );
    run.keep(&big[490..]);
    s
}

fn criterion_2(run: &mut Run, f2: &[CurlFluxPoint]) {
    let s = run.dp(&map(&xyz(), &["xy", "y", "z"]), 100);
    let curl: Vec<_> = [10, 20].iter().map(|&n| (n, curl_ratio(&s[n]))).collect();
    let (a, da) = compare_table(&curl, &[(10, "0.220658"), (20, "0.0832884")]);
    let below: Vec<String> = ROWS.iter().filter(|&&n| curl_root(&s[n]) >= curl_root(&f2[n])).map(|n| format!("n={n}")).collect();
    run.record(
        "2",
        a && below.is_empty(),
        format!(
            "x->xy, y->y, z->z curl ratios [{da}]; roots below the rank-2 roots at n in {ROWS:?}{}",
            if below.is_empty() { String::new() } else { format!(" except {}", below.join(",")) }
        ),
    );
}

fn criterion_3(run: &mut Run) {
    let s = run.dp(&map(&xy(), &["xyy", "y"]), 20);
    let (ok, d) = compare_table(&[(10, curl_ratio(&s[10])), (20, curl_ratio(&s[20]))], &[(10, "0.143331"), (20, "0.0408009")]);
    run.record("3", ok, format!("x->xy^2, y->y curl ratios [{d}]"));
}

fn criterion_4(run: &mut Run) {
    let mut agreeing = 0;
    let mut bad = Vec::new();
    for phi in standard_maps().iter().filter(|m| m.label() != Some("collapse")) {
        let n = if phi.rank() == 3 { 7 } else { 8 };
        let b = run.brute(phi, n);
        let d = run.dp(phi, n);
        if b == d {
            agreeing += 1;
        } else {
            bad.push(phi.to_string());
        }
    }
    run.record(
        "4",
        agreeing >= 9 && bad.is_empty(),
        format!("{agreeing} maps with identical brute/DP counts at n <= 8; mismatches {bad:?}"),
    );
}

fn criterion_6(run: &mut Run) {
    let cfg = EngineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total = PropertyReport::new("inverse symmetry");
    for i in 0..20 {
        let ctx = if i % 4 == 3 { xyz() } else { xy() };
        let a = random_automorphism(&ctx, 4, &mut rng);
        total.merge(check_inverse_symmetry(&a, 8, Engine::Brute, &cfg).unwrap());
        let dp = check_inverse_symmetry(&a, 40, Engine::Dp, &cfg).unwrap();
        total.comparisons += dp.comparisons;
        total.violations.extend(dp.violations);
    }
    run.record(
        "6",
        total.passed() && total.instances >= 20,
        format!("inverse symmetry, brute n <= 8 and DP n <= 40: {}", report_line(&total)),
    );
}

fn criterion_7(run: &mut Run) {
    let cfg = EngineConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut autos = PropertyReport::new("(a)-(e)");
    for i in 0..50 {
        let ctx = if i % 5 == 4 { xyz() } else { xy() };
        let a = random_automorphism(&ctx, 4, &mut rng);
        let b = random_automorphism(&ctx, 4, &mut rng);
        autos.merge(
            check_composition_inequalities(a.forward(), b.forward(), 7, InequalityScope::Automorphisms, Engine::Brute, &cfg)
                .unwrap(),
        );
    }
    run.record(
        "7a",
        autos.passed() && autos.instances >= 50,
        format!("(a)-(e) on automorphism pairs, n <= 7: {}", report_line(&autos)),
    );

    let mut mono = PropertyReport::new("(a)-(b)");
    for _ in 0..20 {
        let a = random_monomorphism(&xy(), 4, &mut rng).unwrap();
        let b = random_endomorphism(&xy(), 2, &mut rng);
        mono.merge(check_composition_inequalities(&a, &b, 6, InequalityScope::Endomorphisms, Engine::Brute, &cfg).unwrap());
    }
    run.record(
        "7b",
        mono.passed() && mono.instances >= 20,
        format!("(a)-(b) on endomorphism pairs with injective first map, n <= 6: {}", report_line(&mono)),
    );

    let mut any = PropertyReport::new("(a)-(b)");
    for _ in 0..20 {
        let a = random_endomorphism(&xy(), 2, &mut rng);
        let b = random_endomorphism(&xy(), 2, &mut rng);
        any.merge(check_composition_inequalities(&a, &b, 6, InequalityScope::Endomorphisms, Engine::Brute, &cfg).unwrap());
    }
    let example = any.violations.first().cloned().unwrap_or_default();
    run.record(
        "7c",
        any.passed(),
        format!("(a)-(b) on arbitrary endomorphism pairs, n <= 6: {}; first: {example}", report_line(&any)),
    );
}

fn criterion_8(run: &mut Run) {
    let cfg = EngineConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (r, k) in [(2, 2), (2, 3), (2, 5), (3, 2)] {
        let rep = check_power_map_formula(r, k, 50, Engine::Dp, &cfg).unwrap();
        ok &= rep.passed();
        parts.push(format!("r={r} k={k}: {}", report_line(&rep)));
        let ctx = GroupContext::new(r).unwrap();
        let s = run.dp(&Endomorphism::power_map(&ctx, k), 50);
        ok &= s.iter().all(|p| p.curl_count == ctx.ball_size(p.n / k));
    }
    run.record("8", ok, format!("power maps exact to n <= 50, root at 50 within 0.02; {}", parts.join("; ")));
}

fn criterion_9(run: &mut Run) {
    let phi = map(&xy(), &["xy", "1"]);
    let s = run.brute(&phi, 8);
    let ratio = ratio_f64(&s[8].flux_count, &s[8].ball);
    let strict = !s[8].flux_count.eq(&BigUint::ZERO) && s[8].flux_count < s[8].ball;
    let e1 = build(&phi, &BuildConfig::default()).err();
    let e2 = build(&phi, &BuildConfig::default()).err();
    let deterministic = e1.is_some() && e1 == e2;
    let expected = matches!(e1, Some(Error::UnboundedCancellation { .. }) | Some(Error::StateBudgetExceeded { .. }));
    run.record(
        "9",
        strict && deterministic && expected,
        format!(
            "x->xy, y->1 brute flux ratio at n=8 {}; transducer: {}",
            sig(ratio),
            e1.map(|e| e.to_string()).unwrap_or_else(|| "built".into())
        ),
    );
}

fn criterion_10(run: &mut Run) {
    let phi = map(&xy(), &["xy", "y"]);
    let e = estimate_curl_ratio(&phi, 10, 100_000, 2024);
    let big = e.contains(0.331634);

    let exact = curl_ratio(&run.brute(&phi, 8)[8]);
    let covered = (0..200u64).filter(|&seed| estimate_curl_ratio(&phi, 8, 4000, 10_000 + seed).contains(exact)).count();
    run.record(
        "10",
        big && covered >= 180,
        format!(
            "n=10, 1e5 samples: {} +/- {} (contains 0.331634: {big}); n=8 coverage {covered}/200 at 4000 samples",
            sig(e.point),
            sig(e.ci95)
        ),
    );
}

fn criterion_11(run: &mut Run) {
    let linear = growth_series(&map(&xy(), &["xy", "y"]), 1, 30, DEFAULT_ENUMERATION_CAP, DEFAULT_GROWTH_CAP).unwrap();
    let lin_ok = linear.iter().all(|p| p.value == p.n + 1);
    let fib = growth_series(&map(&xy(), &["xy", "x"]), 1, 25, DEFAULT_ENUMERATION_CAP, DEFAULT_GROWTH_CAP).unwrap();
    let (mut a, mut b) = (1usize, 1usize);
    let mut fib_ok = true;
    for p in &fib {
        fib_ok &= p.value == b;
        (a, b) = (b, a + b);
    }
    let last = fib.last().unwrap();
    let root = (last.value as f64).powf(1.0 / last.n as f64);
    run.record(
        "11",
        lin_ok && fib_ok && root > 1.55,
        format!(
            "x->xy, y->y growth n+1 for n <= 30: {lin_ok}; x->xy, y->x Fibonacci for n <= 25: {fib_ok}, root at 25 {}",
            sig(root)
        ),
    );
}

fn main() {
    let start = Instant::now();
    let mut run = Run::default();
    let f2 = criterion_1(&mut run);
    criterion_2(&mut run, &f2);
    criterion_3(&mut run);
    criterion_4(&mut run);
    criterion_6(&mut run);
    criterion_7(&mut run);
    criterion_8(&mut run);
    criterion_9(&mut run);
    criterion_10(&mut run);
    criterion_11(&mut run);

    let inconsistent = run.points.iter().filter(|p| !p.is_consistent()).count();
    run.record(
        "5",
        inconsistent == 0,
        format!("curl + flux = |B_n| on {} computed points, {inconsistent} off", run.points.len()),
    );

    let gating: Vec<&Outcome> = run.outcomes.iter().filter(|o| !o.pass && !KNOWN_UNATTAINABLE.contains(&o.id)).collect();
    for o in run.outcomes.iter().filter(|o| !o.pass && KNOWN_UNATTAINABLE.contains(&o.id)) {
        println!("[NOTE] criterion {} fails as recorded (known unattainable): {}", o.id, o.detail);
    }
    let passed = run.outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria passed in {:.2?}", run.outcomes.len(), start.elapsed());
    if !gating.is_empty() {
        eprintln!("failing criteria: {:?}", gating.iter().map(|o| o.id).collect::<Vec<_>>());
        std::process::exit(1);
    }
}
