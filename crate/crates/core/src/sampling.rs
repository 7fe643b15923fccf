//! Deterministic generation of generic rational spectral-parameter
//! pairs. A fixed seed keeps verification output byte-identical across
//! runs.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Rat;

/// `n` rational `(u, v)` pairs avoiding the exchange-relation pole
/// `u - v = -eta` (and `u = v`, which is a valid but trivial point).
pub fn random_rational_pairs(seed: u64, n: usize, eta: &Rat) -> Vec<(Rat, Rat)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let numer = rng.gen_range(-24i64..=24);
        let denom = rng.gen_range(1i64..=6);
        Rat::ratio(numer, denom)
    };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u = draw(&mut rng);
        let v = draw(&mut rng);
        if u == v {
            continue;
        }
        if (&(&u - &v) + eta).is_zero() {
            continue;
        }
        out.push((u, v));
    }
    out
}
