//! End-to-end particle scenario execution: sample, compress, integrate,
//! record diagnostics, emit CSV artifacts and a machine-readable summary.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use crate::domain::{DecoratedParticle, DomainSpec};
use crate::dynamics::{CurvatureMode, Ensemble, Forcing, Leapfrog, PrescribedPotential};
use crate::error::{Error, Result};
use crate::field::{FieldState, PeriodicMesh, StiffnessSystem};
use crate::reduction::{
    build_decorated, kmeans_cluster, sample_initial, CFunction, InitialDistribution,
};
use crate::rng::Rng;
use crate::MarkerParticle;

use super::config::{ScenarioConfig, ScenarioKind};
use super::diagnostics::{e_amplitude, fit_rate, TimeSeries};
use super::output::{write_csv, write_summary};

/// Machine-readable run record; mirrored into `summary.txt`.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub n_markers: usize,
    pub n_clusters: usize,
    pub n_decorated: usize,
    pub marker_dofs: usize,
    pub decorated_dofs: usize,
    pub dof_ratio: Option<f64>,
    pub gamma: Option<f64>,
    pub wall_time_s: f64,
    pub psi_total_initial: f64,
    pub psi_total_final: f64,
    pub max_psi_drift: f64,
    /// Largest |q*| or |p*| at the end of a zero-dual (PIC-embedded) run.
    pub max_dual_abs: Option<f64>,
    pub node_nudges: u64,
}

impl RunSummary {
    fn entries(&self, cfg: &ScenarioConfig) -> Vec<(String, String)> {
        let mut rows: Vec<(String, String)> = vec![
            ("scenario".into(), self.scenario.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("n_elements".into(), cfg.n_elements.to_string()),
            ("degree".into(), cfg.degree.to_string()),
            ("dt".into(), format!("{:.17}", cfg.dt)),
            ("n_steps".into(), cfg.n_steps.to_string()),
            ("n_markers".into(), self.n_markers.to_string()),
            ("n_clusters".into(), self.n_clusters.to_string()),
            ("n_decorated".into(), self.n_decorated.to_string()),
            ("marker_dofs".into(), self.marker_dofs.to_string()),
            ("decorated_dofs".into(), self.decorated_dofs.to_string()),
        ];
        if let Some(ratio) = self.dof_ratio {
            rows.push(("dof_ratio".into(), format!("{ratio:.6}")));
        }
        if let Some(gamma) = self.gamma {
            rows.push(("gamma".into(), format!("{gamma:.6}")));
        }
        rows.push(("psi_total_initial".into(), format!("{:.17e}", self.psi_total_initial)));
        rows.push(("psi_total_final".into(), format!("{:.17e}", self.psi_total_final)));
        rows.push(("max_psi_drift".into(), format!("{:.17e}", self.max_psi_drift)));
        if let Some(dual) = self.max_dual_abs {
            rows.push(("max_dual_abs".into(), format!("{dual:.17e}")));
        }
        rows.push(("node_nudges".into(), self.node_nudges.to_string()));
        rows.push(("wall_time_s".into(), format!("{:.3}", self.wall_time_s)));
        rows
    }
}

/// Everything a run produced, both on disk and in memory.
pub struct RunArtifacts {
    pub amplitude: Option<TimeSeries>,
    pub energy: TimeSeries,
    pub summary: RunSummary,
    pub out_dir: PathBuf,
    pub final_field: Option<FieldState>,
    pub final_particles: Vec<DecoratedParticle>,
}

/// Preset marker layout of the test-particle scenario: three Gaussian
/// groups of equal population at fixed phase-space centers.
pub fn test_particle_markers(rng: &mut Rng, length: f64, n: usize) -> Vec<MarkerParticle> {
    let centers = [(0.2 * length, 1.5), (0.5 * length, -1.0), (0.8 * length, 0.5)];
    let spread = 0.02 * length;
    let weight = length / n as f64;
    let per_group = n / centers.len();
    let mut markers = Vec::with_capacity(n);
    for (gi, &(qc, pc)) in centers.iter().enumerate() {
        let count = if gi + 1 == centers.len() { n - markers.len() } else { per_group };
        for _ in 0..count {
            markers.push(MarkerParticle {
                q: crate::wrap_position(qc + spread * rng.normal(), length).unwrap(),
                p: pc + 0.2 * rng.normal(),
                psi_star: weight,
            });
        }
    }
    markers
}

fn write_phase_snapshot(
    dir: &std::path::Path,
    t: f64,
    particles: &[DecoratedParticle],
    with_duals: bool,
) -> Result<()> {
    let path = dir.join(format!("phase_t{t:.3}.csv"));
    if with_duals {
        let rows: Vec<Vec<f64>> = particles
            .iter()
            .map(|p| vec![p.q, p.p, p.psi_star, p.q_star, p.p_star])
            .collect();
        write_csv(&path, &["Q", "P", "psi_star", "q_star", "p_star"], &rows)
    } else {
        let rows: Vec<Vec<f64>> =
            particles.iter().map(|p| vec![p.q, p.p, p.psi_star]).collect();
        write_csv(&path, &["Q", "P", "psi_star"], &rows)
    }
}

/// Runs a particle scenario (test particle, two-stream, or Landau).
///
/// Study scenarios have their own entry points (`convergence_study`,
/// `error_scaling_study`); passing them here is a config error.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    match cfg.scenario {
        ScenarioKind::TestParticle | ScenarioKind::TwoStream | ScenarioKind::Landau => {}
        other => {
            return Err(Error::config(format!(
                "scenario '{other}' is a study; use its dedicated entry point"
            )));
        }
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let started = Instant::now();
    let mut rng = Rng::seed_from(cfg.seed);
    let length = cfg.length;
    let domain = DomainSpec::torus(length)?;

    let markers = match cfg.scenario {
        ScenarioKind::TestParticle => test_particle_markers(&mut rng, length, cfg.n_markers),
        ScenarioKind::TwoStream => sample_initial(
            &InitialDistribution::TwoStream { temperature: cfg.temperature },
            cfg.n_markers,
            length,
            &mut rng,
        )?,
        ScenarioKind::Landau => sample_initial(
            &InitialDistribution::Landau {
                amplitude: cfg.perturb_amplitude,
                wavenumber: std::f64::consts::TAU / length,
            },
            cfg.n_markers,
            length,
            &mut rng,
        )?,
        _ => unreachable!(),
    };

    let swpic = cfg.n_clusters > 0;
    let particles: Vec<DecoratedParticle> = if swpic {
        let assignment = kmeans_cluster(&markers, cfg.n_clusters, &mut rng, length)?;
        build_decorated(&markers, &assignment, CFunction::PeriodicSine { length }, &domain)
    } else {
        markers.iter().map(DecoratedParticle::from_marker).collect()
    };
    let n_decorated = particles.len();
    let initial_weights: Vec<f64> = particles.iter().map(|p| p.psi_star).collect();
    let psi_total_initial: f64 = initial_weights.iter().sum();
    let started_with_zero_duals =
        particles.iter().all(|p| p.q_star == 0.0 && p.p_star == 0.0);

    let mut ensemble = Ensemble::new(particles, domain);

    // forcing backends live here so the stepper can borrow them
    let potential;
    let system;
    let forcing = match cfg.scenario {
        ScenarioKind::TestParticle => {
            potential = PrescribedPotential::new(
                cfg.potential_amplitude,
                std::f64::consts::TAU / length,
                length,
            )?;
            Forcing::Prescribed(&potential)
        }
        _ => {
            let mesh = Arc::new(PeriodicMesh::uniform(length, cfg.n_elements, cfg.degree)?);
            system = StiffnessSystem::assemble(mesh)?;
            Forcing::SelfConsistent(&system)
        }
    };
    let self_consistent = matches!(forcing, Forcing::SelfConsistent(_));
    let mut stepper = Leapfrog::new(forcing, CurvatureMode::ElementLocal, &ensemble)?;

    let mut amplitude = TimeSeries::default();
    let mut energy = TimeSeries::default();
    energy.push(0.0, stepper.hamiltonian(&ensemble));
    if let Some(field) = stepper.field() {
        amplitude.push(0.0, e_amplitude(field));
    }
    let snapshot_due = |t: f64| -> bool {
        cfg.snapshot_times.iter().any(|&s| (s - t).abs() <= 0.5 * cfg.dt)
    };
    if snapshot_due(0.0) {
        write_phase_snapshot(&cfg.out_dir, 0.0, &ensemble.particles, swpic)?;
    }

    for step in 1..=cfg.n_steps {
        stepper.step(&mut ensemble, cfg.dt)?;
        let t = step as f64 * cfg.dt;
        energy.push(t, stepper.hamiltonian(&ensemble));
        if let Some(field) = stepper.field() {
            amplitude.push(t, e_amplitude(field));
        }
        if snapshot_due(t) {
            write_phase_snapshot(&cfg.out_dir, t, &ensemble.particles, swpic)?;
        }
    }

    let max_psi_drift = ensemble
        .particles
        .iter()
        .zip(&initial_weights)
        .map(|(p, w0)| (p.psi_star - w0).abs())
        .fold(0.0, f64::max);
    let psi_total_final = ensemble.total_weight();
    let max_dual_abs = started_with_zero_duals.then(|| {
        ensemble
            .particles
            .iter()
            .map(|p| p.q_star.abs().max(p.p_star.abs()))
            .fold(0.0, f64::max)
    });

    let gamma = if self_consistent && cfg.fit_end > cfg.fit_start {
        Some(fit_rate(&amplitude, (cfg.fit_start, cfg.fit_end))?)
    } else {
        None
    };

    // artifacts
    if self_consistent {
        let rows: Vec<Vec<f64>> = amplitude
            .times()
            .iter()
            .zip(amplitude.values())
            .map(|(&t, &v)| vec![t, v])
            .collect();
        write_csv(&cfg.out_dir.join("amplitude.csv"), &["t", "amplitude"], &rows)?;
    }
    let rows: Vec<Vec<f64>> = energy
        .times()
        .iter()
        .zip(energy.values())
        .map(|(&t, &v)| vec![t, v])
        .collect();
    write_csv(&cfg.out_dir.join("energy.csv"), &["t", "hamiltonian"], &rows)?;

    let marker_dofs = 3 * cfg.n_markers;
    let decorated_dofs = if swpic { 5 * n_decorated } else { 0 };
    let summary = RunSummary {
        scenario: cfg.scenario,
        seed: cfg.seed,
        n_markers: cfg.n_markers,
        n_clusters: cfg.n_clusters,
        n_decorated,
        marker_dofs,
        decorated_dofs,
        dof_ratio: swpic.then(|| decorated_dofs as f64 / marker_dofs as f64),
        gamma,
        wall_time_s: started.elapsed().as_secs_f64(),
        psi_total_initial,
        psi_total_final,
        max_psi_drift,
        max_dual_abs,
        node_nudges: stepper.nudged,
    };
    write_summary(&cfg.out_dir.join("summary.txt"), &summary.entries(cfg))?;

    Ok(RunArtifacts {
        amplitude: self_consistent.then_some(amplitude),
        energy,
        summary,
        out_dir: cfg.out_dir.clone(),
        final_field: stepper.field().cloned(),
        final_particles: ensemble.particles,
    })
}
