use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CHUNK: usize = 4096;

/// Split `count` samples into fixed chunks, each with its own stream of the
/// seeded generator, and run them in parallel. Results come back in chunk
/// order, so the outcome does not depend on the thread count.
pub(crate) fn chunked<T, F>(seed: u64, tag: u64, count: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.rotate_left(32));
            rng.set_stream(c as u64);
            let n = CHUNK.min(count - c * CHUNK);
            job(&mut rng, n)
        })
        .collect()
}

pub(crate) fn unit_circle<R: Rng>(rng: &mut R) -> [f64; 2] {
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    [a.cos(), a.sin()]
}

pub(crate) fn unit_sphere<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * a.cos(), r * a.sin(), z]
}
