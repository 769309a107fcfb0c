//! Cumulative Tsallis entropies, their duals, and the risk measures built on
//! them.
//!
//! | module          | contents                                                     |
//! |-----------------|--------------------------------------------------------------|
//! | [`specfun`]     | log-gamma, digamma, trigamma, Pochhammer symbols              |
//! | [`distributions`] | catalog laws, affine maps, negation, sampling              |
//! | [`entropy`]     | Δ_s and ∇_s by quadrature, closed forms and plug-in           |
//! | [`duality`]     | order series linking Δ_n and ∇_n, randomization pmf           |
//! | [`risk`]        | distortion risk measures, coherence and axiom diagnostics     |
//! | [`skewness`]    | skewness ratios and parameters, β-indexed curves              |
//! | [`extremal`]    | sharp bounds on normalized entropies, Gamma-ratio inequality  |
//! | [`relevation`]  | Monte Carlo relevation processes and the randomization law    |
//! | [`selftest`]    | aggregated numerical checks                                   |
//!
//! Parallel work runs on the rayon global pool. Set `CTENT_THREADS` to cap its
//! size; [`init_threads`] applies it.

pub mod distributions;
pub mod duality;
pub mod entropy;
pub mod error;
pub mod extremal;
pub mod quad;
pub mod relevation;
pub mod risk;
pub mod roots;
pub mod selftest;
pub mod skewness;
pub mod specfun;

pub use distributions::{Distribution, EmpiricalSample, Family};
pub use entropy::{EntropyValue, Method};
pub use error::{Error, Result};

/// Size the global worker pool from `CTENT_THREADS`, if set. Returns the
/// number of threads in use. Later calls have no effect on the pool.
pub fn init_threads() -> usize {
    if let Some(n) = std::env::var("CTENT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // fails only when the pool already exists, which is fine
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    rayon::current_num_threads()
}
