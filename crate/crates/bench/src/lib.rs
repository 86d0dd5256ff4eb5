//! Shared fixtures for the benchmarks.

use dlra_core::integrator::Derivative;
use dlra_core::random::{random_tucker, seeded};
use dlra_core::{Result, TuckerTensor};

/// Random Tucker state of uniform size and rank.
pub fn state(dim: usize, size: usize, rank: usize, seed: u64) -> TuckerTensor {
    let mut rng = seeded(seed);
    random_tucker(&mut rng, &vec![size; dim], &vec![rank; dim])
}

/// Linear right-hand side `F(t, Y) = −Y + P`, with `P` a fixed Tucker tensor
/// outside the tangent space of `Y`.
pub fn linear_rhs(forcing: TuckerTensor) -> impl Fn(f64, &TuckerTensor) -> Result<Derivative> {
    move |_t, y| {
        let sum = dlra_core::tucker::tucker_sum(&[y, &forcing], &[-1.0, 1.0])?;
        Ok(Derivative::Tucker(sum))
    }
}
