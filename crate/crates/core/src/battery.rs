//! The standard property battery run by `curlflux check` and the
//! acceptance suite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Engine, EngineConfig};
use crate::error::Result;
use crate::metrics::{
    check_composition_inequalities, check_flux_gap, check_invariance_under_simple_composition, check_inverse_symmetry,
    check_power_map_formula, check_simple_classifier, InequalityScope, PropertyReport,
};
use crate::morphisms::{compose, random_automorphism, random_endomorphism, Endomorphism};
use crate::words::{GroupContext, Letter};

#[derive(Clone, Debug)]
pub struct BatteryConfig {
    pub seed: u64,
    /// Random Nielsen products checked for inverse symmetry.
    pub automorphisms: usize,
    pub max_moves: usize,
    /// Radius for the enumeration side of the inverse-symmetry check.
    pub symmetry_brute_n: usize,
    /// Radius for the DP side; 0 skips it.
    pub symmetry_dp_n: usize,
    pub automorphism_pairs: usize,
    /// Pairs for (a)-(b) whose first map is injective but not onto.
    pub endomorphism_pairs: usize,
    pub inequality_n: usize,
    /// Radius for the power map formula (DP).
    pub power_map_n: usize,
    /// Radius at which roots are compared after composing with conjugations.
    pub inner_rate_n: usize,
    pub engine: EngineConfig,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            seed: 2024,
            automorphisms: 20,
            max_moves: 4,
            symmetry_brute_n: 8,
            symmetry_dp_n: 40,
            automorphism_pairs: 50,
            endomorphism_pairs: 20,
            inequality_n: 7,
            power_map_n: 40,
            inner_rate_n: 200,
            engine: EngineConfig::default(),
        }
    }
}

impl BatteryConfig {
    /// Smaller radii, same instance counts.
    pub fn quick() -> BatteryConfig {
        BatteryConfig { symmetry_dp_n: 20, power_map_n: 20, ..Default::default() }
    }
}

/// Fixed maps used wherever a battery of concrete examples is needed.
pub fn standard_maps() -> Vec<Endomorphism> {
    let xy = GroupContext::with_names("xy").unwrap();
    let xyz = GroupContext::with_names("xyz").unwrap();
    let m = |ctx: &GroupContext, images: &[&str], label: &str| Endomorphism::parse(ctx, images).unwrap().with_label(label);
    vec![
        Endomorphism::identity(&xy).with_label("identity"),
        m(&xy, &["y", "x"], "swap"),
        m(&xy, &["Y", "x"], "signed permutation"),
        Endomorphism::inner(&xy, &xy.parse_word("x").unwrap()).with_label("inner(x)"),
        Endomorphism::inner(&xy, &xy.parse_word("xy").unwrap()).with_label("inner(xy)"),
        m(&xy, &["xy", "y"], "alpha"),
        m(&xy, &["xyy", "y"], "alpha squared"),
        m(&xy, &["xx", "yy"], "square map"),
        m(&xy, &["xy", "x"], "fibonacci"),
        m(&xy, &["xy", "1"], "collapse"),
        m(&xyz, &["xy", "y", "z"], "alpha stabilized"),
        m(&xyz, &["x", "xyX", "z"], "inner(x) stabilized"),
        m(&xy, &["xxx", "yyy"], "cube map"),
    ]
}

/// A random automorphism composed with a power map, on a random side.
/// Injective, and not onto.
pub fn random_monomorphism<R: rand::Rng + ?Sized>(ctx: &GroupContext, max_moves: usize, rng: &mut R) -> Result<Endomorphism> {
    let a = random_automorphism(ctx, max_moves, rng);
    let p = Endomorphism::power_map(ctx, rng.random_range(2..=3));
    if rng.random_bool(0.5) {
        compose(a.forward(), &p)
    } else {
        compose(&p, a.forward())
    }
}

pub fn run_battery(cfg: &BatteryConfig) -> Result<Vec<PropertyReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let r2 = GroupContext::with_names("xy").unwrap();
    let r3 = GroupContext::with_names("xyz").unwrap();
    let e = &cfg.engine;
    let mut reports = Vec::new();

    let mut symmetry = PropertyReport::new("inverse symmetry");
    for i in 0..cfg.automorphisms {
        let ctx = if i % 4 == 3 { &r3 } else { &r2 };
        let a = random_automorphism(ctx, cfg.max_moves, &mut rng);
        let brute_n = if ctx.rank() == 3 { cfg.symmetry_brute_n.min(7) } else { cfg.symmetry_brute_n };
        let mut rep = check_inverse_symmetry(&a, brute_n, Engine::Brute, e)?;
        if cfg.symmetry_dp_n > 0 {
            let dp = check_inverse_symmetry(&a, cfg.symmetry_dp_n, Engine::Dp, e)?;
            rep.comparisons += dp.comparisons;
            rep.violations.extend(dp.violations);
        }
        symmetry.merge(rep);
    }
    reports.push(symmetry);

    let mut auto_pairs = PropertyReport::new("composition inequalities (a)-(e)");
    for i in 0..cfg.automorphism_pairs {
        let ctx = if i % 5 == 4 { &r3 } else { &r2 };
        let n = if ctx.rank() == 3 { cfg.inequality_n.min(6) } else { cfg.inequality_n };
        let a = random_automorphism(ctx, cfg.max_moves, &mut rng);
        let b = random_automorphism(ctx, cfg.max_moves, &mut rng);
        auto_pairs.merge(check_composition_inequalities(
            a.forward(),
            b.forward(),
            n,
            InequalityScope::Automorphisms,
            Engine::Brute,
            e,
        )?);
    }
    reports.push(auto_pairs);

    let mut endo_pairs = PropertyReport::new("composition inequalities (a)-(b), injective first map");
    for _ in 0..cfg.endomorphism_pairs {
        let a = random_monomorphism(&r2, cfg.max_moves, &mut rng)?;
        let b = random_endomorphism(&r2, 2, &mut rng);
        endo_pairs.merge(check_composition_inequalities(
            &a,
            &b,
            cfg.inequality_n.min(6),
            InequalityScope::Endomorphisms,
            Engine::Brute,
            e,
        )?);
    }
    reports.push(endo_pairs);

    let mut power = PropertyReport::new("power map curl formula");
    for (r, k) in [(2, 2), (2, 3), (2, 5), (3, 2)] {
        power.merge(check_power_map_formula(r, k, cfg.power_map_n, Engine::Dp, e)?);
    }
    reports.push(power);

    let maps = standard_maps();
    let mut gap = PropertyReport::new("flux gap");
    for phi in maps.iter().filter(|m| m.label() != Some("collapse")) {
        gap.merge(check_flux_gap(phi, 20, Engine::Dp, e)?);
    }
    reports.push(gap);

    let mut invariance = PropertyReport::new("invariance under simple composition");
    let swap = Endomorphism::permutation(&r2, &[Letter::new(1, false), Letter::new(0, false)])?;
    let signed = Endomorphism::permutation(&r2, &[Letter::new(0, true), Letter::new(1, true)])?;
    for phi in maps.iter().filter(|m| m.rank() == 2) {
        invariance.merge(check_invariance_under_simple_composition(
            phi,
            cfg.inequality_n,
            &[swap.clone(), signed.clone()],
            &[],
            0,
            false,
            Engine::Brute,
            e,
        )?);
    }
    reports.push(invariance);

    let mut rates = PropertyReport::new("inner composition keeps curl and flux roots");
    let conjugators: Vec<_> = ["x", "xY", "yxY"].iter().map(|g| r2.parse_word(g)).collect::<Result<_>>()?;
    for phi in maps.iter().filter(|m| m.rank() == 2 && m.label() != Some("collapse")) {
        rates.merge(check_invariance_under_simple_composition(phi, 0, &[], &conjugators, cfg.inner_rate_n, true, Engine::Dp, e)?);
    }
    reports.push(rates);

    let mut simple = PropertyReport::new("simple maps keep curl root near 1");
    for phi in maps.iter().filter(|m| crate::morphisms::classify(m).is_simple()) {
        simple.merge(check_simple_classifier(phi, 50, Engine::Dp, e)?);
    }
    reports.push(simple);

    Ok(reports)
}
