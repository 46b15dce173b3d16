use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::Vector;

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1)`.
pub(crate) fn uniform_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// A random unit vector; falls back to `e_0` in the measure-zero zero case.
pub(crate) fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    let v = uniform_vector(rng, n);
    if v.norm() > 0.0 {
        v.normalized()
    } else {
        Vector::basis(n, 0)
    }
}
