//! Curl and flux of endomorphisms of free groups.
//!
//! For an endomorphism `φ` of `F_r`, the curl function counts the elements of
//! the ball `B_n` that stay inside it, `Curl_φ(n) = #{w : |w| <= n, |φ(w)| <= n}`,
//! and the flux function counts the rest, `Flux_φ(n) = |B_n| - Curl_φ(n)`.
//! Three engines compute them:
//!
//! - [`exact_count`]: enumeration of the ball, the oracle for small `n`;
//! - [`transducer`]: a finite-state image-length transducer with an exact
//!   big-integer DP, for `n` in the hundreds;
//! - [`sampler`]: Monte Carlo estimates of the curl ratio.
//!
//! [`metrics`] turns counts into ratios and n-th roots and checks the
//! structural properties of curl and flux; [`battery`] bundles those checks.

pub mod battery;
pub mod cli;
pub mod engine;
pub mod error;
pub mod exact_count;
pub mod joint;
mod limbs;
pub mod metrics;
pub mod morphisms;
pub mod sampler;
mod serde_big;
pub mod transducer;
pub mod words;

pub use engine::{Engine, EngineConfig};
pub use error::{Error, Result};
pub use joint::{CurlFluxPoint, JointLengthTable};
pub use morphisms::{classify, compose, Classification, Endomorphism, VerifiedAutomorphism};
pub use words::{GroupContext, Letter, Word};
