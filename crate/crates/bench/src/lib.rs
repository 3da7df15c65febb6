//! Shared setup helpers for the pipeline benchmarks.

use std::sync::Arc;

use swpic_core::domain::{DecoratedParticle, DomainSpec};
use swpic_core::field::{PeriodicMesh, StiffnessSystem};
use swpic_core::reduction::{sample_initial, InitialDistribution};
use swpic_core::rng::Rng;
use swpic_core::MarkerParticle;

pub fn landau_markers(n: usize, length: f64, seed: u64) -> Vec<MarkerParticle> {
    let mut rng = Rng::seed_from(seed);
    sample_initial(
        &InitialDistribution::Landau {
            amplitude: 0.5,
            wavenumber: std::f64::consts::TAU / length,
        },
        n,
        length,
        &mut rng,
    )
    .expect("valid sampling parameters")
}

pub fn zero_dual_particles(markers: &[MarkerParticle]) -> Vec<DecoratedParticle> {
    markers.iter().map(DecoratedParticle::from_marker).collect()
}

pub fn assembled_system(length: f64, n_elements: usize, degree: usize) -> StiffnessSystem {
    let mesh = Arc::new(PeriodicMesh::uniform(length, n_elements, degree).expect("valid mesh"));
    StiffnessSystem::assemble(mesh).expect("assembly succeeds")
}

pub fn torus(length: f64) -> DomainSpec {
    DomainSpec::torus(length).expect("positive length")
}
