use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::numeric::Cx;

/// Half-width of the square each complex component is drawn from.
pub const SAMPLING_SCALE: f64 = 1.25;

/// Seeded source of random parameters and states.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    scale: f64,
}

impl Sampler {
    /// Independent stream `stream` of the generator seeded with `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            rng,
            scale: SAMPLING_SCALE,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Uniform on `[-scale, scale]^2`.
    pub fn cx(&mut self) -> Cx {
        let s = self.scale;
        Cx::new(self.rng.gen_range(-s..=s), self.rng.gen_range(-s..=s))
    }

    pub fn pair(&mut self) -> [Cx; 2] {
        [self.cx(), self.cx()]
    }

    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.rng.gen_range(0..items.len())]
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }
}

/// Depth at which `|1+k|^ell` still stays within `2^base`, capped at `base`.
/// Exponents grow like `(1+k)^ell`, so larger `|k|` gets shallower checks.
pub fn default_ellmax(k: i64, base: usize) -> usize {
    let growth = (1 + k).unsigned_abs();
    if growth <= 2 {
        return base;
    }
    let limit = 1u128 << base;
    let mut ell = 0;
    let mut pow: u128 = 1;
    while ell < base {
        pow = pow.saturating_mul(growth as u128);
        if pow > limit {
            break;
        }
        ell += 1;
    }
    ell.max(1)
}
