//! The headline comparison: set-membership uncertainty against the
//! least-squares confidence region, over a grid of sample counts.
//!
//!     cargo run --release --example sme_vs_ols

use bilinear_sme::experiment::{run_sweep, ExperimentConfig, SystemSource};
use bilinear_sme::stochastic::BoundedSpec;

fn main() {
    let out_dir = std::env::temp_dir().join("sme_vs_ols_example");
    let config = ExperimentConfig {
        system: SystemSource::Generated { n: 3, m: 2, target_radius: 0.98, seed: 7 },
        input: BoundedSpec::standard_truncated_gaussian(2),
        noise: BoundedSpec::standard_truncated_laplace(3),
        t_grid: vec![100, 200, 500, 1000, 2000],
        replications: 5,
        master_seed: 42,
        prior_r0: 10.0,
        n_directions: Some(32),
        confidence_level: 0.90,
        ridge: 1e-6,
        x0: None,
        out_dir: out_dir.to_str().unwrap().into(),
    };
    let out = run_sweep(&config).unwrap();
    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12}",
        "T", "sme_upper", "ols_90%_diam", "sme_pt_err", "ols_pt_err"
    );
    for &t in &config.t_grid {
        let rows: Vec<_> = out.rows.iter().filter(|r| r.t == t).collect();
        let med = |f: &dyn Fn(&bilinear_sme::experiment::SweepRow) -> f64| {
            let mut v: Vec<f64> = rows.iter().map(|r| f(r)).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v[v.len() / 2]
        };
        println!(
            "{t:>5} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            med(&|r| r.sme_upper),
            med(&|r| r.ols_conf_diam),
            med(&|r| r.sme_point_err_fro),
            med(&|r| r.ols_err_fro),
        );
    }
    println!("\nfull CSVs in {}", out.dir.display());
}
