//! Seeded generators for exact random test data.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exact_geometry::{Configuration, FpMobius, Mobius, ProjPoint};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random point with small numerator and denominator; infinity occasionally.
pub fn random_point<R: Rng>(rng: &mut R) -> ProjPoint {
    if rng.gen_ratio(1, 12) {
        return ProjPoint::infinity();
    }
    let a: i64 = rng.gen_range(-30..=30);
    let b: i64 = rng.gen_range(1..=12);
    ProjPoint::new(a, b).unwrap()
}

/// `n` pairwise distinct random points.
pub fn random_distinct_points<R: Rng>(rng: &mut R, n: usize) -> Vec<ProjPoint> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = random_point(rng);
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

pub fn random_generic_configuration<R: Rng>(rng: &mut R, n: usize) -> Configuration {
    Configuration::new(random_distinct_points(rng, n))
}

pub fn random_mobius<R: Rng>(rng: &mut R) -> Mobius {
    loop {
        let mut e = || rng.gen_range(-9i64..=9);
        if let Ok(g) = Mobius::from_i64([[e(), e()], [e(), e()]]) {
            return g;
        }
    }
}

pub fn random_fp_mobius<R: Rng>(rng: &mut R, p: u64) -> FpMobius {
    loop {
        let mut e = || rng.gen_range(0..p);
        if let Some(g) = FpMobius::new([[e(), e()], [e(), e()]], p) {
            return g;
        }
    }
}
