//! `swpic` command line: runs scenarios and studies from a config file.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use swpic_core::scenario::{
    convergence_study, error_scaling_study, run_scenario, write_csv, write_summary,
    ErrorScalingParams, ScenarioConfig, ScenarioKind,
};

#[derive(Parser)]
#[command(name = "swpic", about = "1D1V Vlasov-Poisson: PIC and decorated-particle runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the scenario described by a config file.
    Run {
        /// Flat key=value config file; `scenario` selects the preset.
        #[arg(long)]
        config: PathBuf,
        /// Override the scenario kind.
        #[arg(long)]
        scenario: Option<String>,
        /// Override the RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the marker count.
        #[arg(long)]
        n_markers: Option<usize>,
        /// Override the cluster count (0 = pure PIC).
        #[arg(long)]
        n_clusters: Option<usize>,
        /// Override the time step.
        #[arg(long)]
        dt: Option<f64>,
        /// Override the step count.
        #[arg(long)]
        steps: Option<usize>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, scenario, seed, n_markers, n_clusters, dt, steps, out } => {
            let mut cfg = ScenarioConfig::from_file(&config)
                .with_context(|| format!("reading config {}", config.display()))?;
            if let Some(s) = scenario {
                cfg.set_key("scenario", &s)?;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if let Some(v) = n_markers {
                cfg.n_markers = v;
            }
            if let Some(v) = n_clusters {
                cfg.n_clusters = v;
            }
            if let Some(v) = dt {
                cfg.dt = v;
            }
            if let Some(v) = steps {
                cfg.n_steps = v;
            }
            if let Some(v) = out {
                cfg.out_dir = v;
            }
            cfg.validate()?;
            dispatch(&cfg)
        }
    }
}

fn dispatch(cfg: &ScenarioConfig) -> anyhow::Result<()> {
    match cfg.scenario {
        ScenarioKind::TestParticle | ScenarioKind::TwoStream | ScenarioKind::Landau => {
            let artifacts = run_scenario(cfg)?;
            println!("run complete: {}", artifacts.out_dir.display());
            if let Some(gamma) = artifacts.summary.gamma {
                println!("fitted rate gamma = {gamma:.4}");
            }
            println!(
                "particles: {} markers -> {} decorated; wall time {:.2} s",
                artifacts.summary.n_markers,
                artifacts.summary.n_decorated,
                artifacts.summary.wall_time_s
            );
        }
        ScenarioKind::Convergence => {
            std::fs::create_dir_all(&cfg.out_dir)?;
            let source_q = cfg.length / 2f64.sqrt();
            let tables =
                convergence_study(cfg.length, source_q, 1.0, 1.0, cfg.n_elements, 6, &[1, 2])?;
            let mut rows = Vec::new();
            println!("degree  n_elem        h          e_mono    order      e_dip    order");
            for table in &tables {
                for (m, d) in table.monopole.iter().zip(&table.dipole) {
                    println!(
                        "{:>6} {:>7} {:>10.6} {:>12.4e} {:>8} {:>11.4e} {:>8}",
                        table.degree,
                        m.n_elements,
                        m.h,
                        m.error,
                        m.order.map_or("   -".into(), |o| format!("{o:.3}")),
                        d.error,
                        d.order.map_or("   -".into(), |o| format!("{o:.3}")),
                    );
                    rows.push(vec![
                        table.degree as f64,
                        m.n_elements as f64,
                        m.h,
                        m.error,
                        m.order.unwrap_or(f64::NAN),
                        d.error,
                        d.order.unwrap_or(f64::NAN),
                    ]);
                }
            }
            write_csv(
                &cfg.out_dir.join("convergence.csv"),
                &["degree", "n_elements", "h", "e_monopole", "order_monopole", "e_dipole", "order_dipole"],
                &rows,
            )?;
            println!("table written to {}", cfg.out_dir.join("convergence.csv").display());
        }
        ScenarioKind::ErrorScaling => {
            std::fs::create_dir_all(&cfg.out_dir)?;
            let params = ErrorScalingParams::from_config(cfg);
            let result = error_scaling_study(&params)?;
            println!("PIC   slope {:.3}", result.pic_slope);
            println!("SWPIC slope {:.3}", result.swpic_slope);
            println!(
                "parity: SWPIC@{} eps={:.4e} vs PIC@{} eps={:.4e}",
                result.swpic_parity.0,
                result.swpic_parity.1,
                result.pic_reference.0,
                result.pic_reference.1
            );
            let mut rows: Vec<Vec<f64>> = result
                .pic
                .iter()
                .map(|&(n, e)| vec![0.0, n as f64, e])
                .collect();
            rows.extend(result.swpic.iter().map(|&(n, e)| vec![1.0, n as f64, e]));
            write_csv(
                &cfg.out_dir.join("error_scaling.csv"),
                &["is_swpic", "n", "relative_e_error"],
                &rows,
            )?;
            write_summary(
                &cfg.out_dir.join("summary.txt"),
                &[
                    ("pic_slope".into(), format!("{:.6}", result.pic_slope)),
                    ("swpic_slope".into(), format!("{:.6}", result.swpic_slope)),
                    ("pic_reference_n".into(), result.pic_reference.0.to_string()),
                    ("pic_reference_eps".into(), format!("{:.6e}", result.pic_reference.1)),
                    ("swpic_parity_n".into(), result.swpic_parity.0.to_string()),
                    ("swpic_parity_eps".into(), format!("{:.6e}", result.swpic_parity.1)),
                    ("oracle_rate".into(), format!("{:.6}", result.oracle_rate)),
                ],
            )?;
        }
    }
    Ok(())
}
