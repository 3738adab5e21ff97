#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vertalign::synth::{generate, SynthInstance, SynthSpec};

pub const GRID_STEP: f64 = 0.25;

/// One road of `3 + seed % 3` sections, one material, one haul type, pits
/// at both ends. Ground heights are whole multiples of the grid step, so a
/// level road is always reachable with grid offsets.
pub fn oracle_instance(seed: u64) -> SynthInstance {
    let n = 3 + (seed % 3) as usize;
    let mut inst = generate(&SynthSpec {
        sections_per_road: n,
        offset_bound: 2.0,
        seed,
        ..SynthSpec::default()
    })
    .unwrap();
    inst.network.haul_types.truncate(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for s in &mut inst.network.roads[0].sections {
        s.ground_elevation = 100.0 + GRID_STEP * f64::from(rng.gen_range(-4i32..=4));
    }
    inst.network.ensure_valid().unwrap();
    inst
}

pub fn on_grid(u: f64, step: f64) -> bool {
    ((u / step).round() * step - u).abs() < 1e-7
}
