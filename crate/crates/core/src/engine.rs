//! Exact engine selection.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::Result;
use crate::exact_count::curl_flux_series_brute;
use crate::joint::CurlFluxPoint;
use crate::morphisms::Endomorphism;
use crate::transducer::{curl_flux_series_dp, BuildConfig, DpOptions};
use crate::words::DEFAULT_ENUMERATION_CAP;

/// `auto` uses enumeration while `|B_n|` stays at or below this.
pub const AUTO_BRUTE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Brute,
    Dp,
    Auto,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub enumeration_cap: u64,
    pub auto_brute_limit: u64,
    pub build: BuildConfig,
    pub dp: DpOptions,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            auto_brute_limit: AUTO_BRUTE_LIMIT,
            build: BuildConfig::default(),
            dp: DpOptions::default(),
        }
    }
}

impl EngineConfig {
    /// Concrete engine `auto` resolves to at radius `n`.
    pub fn resolve(&self, phi: &Endomorphism, n: usize, engine: Engine) -> Engine {
        match engine {
            Engine::Auto if phi.ctx().ball_size(n) <= BigUint::from(self.auto_brute_limit) => Engine::Brute,
            Engine::Auto => Engine::Dp,
            e => e,
        }
    }

    /// Points for every radius `0..=n`.
    pub fn series(&self, phi: &Endomorphism, n: usize, engine: Engine) -> Result<Vec<CurlFluxPoint>> {
        match self.resolve(phi, n, engine) {
            Engine::Brute => curl_flux_series_brute(phi, n, self.enumeration_cap),
            _ => curl_flux_series_dp(phi, n, &self.build, &self.dp),
        }
    }
}
