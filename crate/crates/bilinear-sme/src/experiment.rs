//! Experiment orchestration: seeded simulation campaigns, the
//! contraction sweep comparing the set-membership and least-squares
//! estimators, constant estimation, and sample-size bound reports, all
//! persisted as machine-readable CSV/JSON with metadata sidecars.
//!
//! Determinism contract: every random draw comes from a ChaCha stream
//! addressed by `(master_seed, stream)`, where replication `k` owns streams
//! `2k` (trajectory) and `2k + 1` (diameter directions). Results for a
//! prefix grid point are therefore identical whether or not larger `T`
//! values are computed in the same run, and repeated runs produce
//! byte-identical headline CSVs. Wall-clock timings are nondeterministic by
//! nature and go to a separate `timings.csv` sidecar.

use crate::complexity::{
    self, covariance_recursion, default_block_length, default_truncation, empirical_small_ball,
    estimate_boundary_mass, min_sample_complexity, optimize_small_ball, small_ball_constants,
    ComplexityInputs,
};
use crate::error::{Error, Result};
use crate::model::{generate_structured_system, BilinearSystem, Trajectory};
use crate::ols::{ols_confidence_diameter, ols_fit};
use crate::sme::{build_feasible_set, default_directions, FeasibleSet};
use crate::stochastic::{simulate, trajectory_to_csv, BoundedSpec, StreamRng};
use crate::tensor::Matrix;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Where the system under study comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum SystemSource {
    Generated { n: usize, m: usize, target_radius: f64, seed: u64 },
    File { path: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_system")]
    pub system: SystemSource,
    #[serde(default = "default_input_spec")]
    pub input: BoundedSpec,
    #[serde(default = "default_noise_spec")]
    pub noise: BoundedSpec,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    #[serde(default = "default_prior_r0")]
    pub prior_r0: f64,
    /// Random diameter directions per set; defaults to 64 per dimension.
    #[serde(default)]
    pub n_directions: Option<usize>,
    #[serde(default = "default_confidence_level")]
    pub confidence_level: f64,
    #[serde(default = "default_ridge")]
    pub ridge: f64,
    /// Initial state; defaults to the origin.
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
}

// Defaults for the quantities the experiment protocol leaves open, chosen
// at desk scale: n = 3, m = 2, target radius 0.98, unit bounds, horizon
// grid up to 5000, 10 replications.
fn default_system() -> SystemSource {
    SystemSource::Generated { n: 3, m: 2, target_radius: 0.98, seed: 7 }
}
fn default_input_spec() -> BoundedSpec {
    BoundedSpec::standard_truncated_gaussian(2)
}
fn default_noise_spec() -> BoundedSpec {
    BoundedSpec::standard_truncated_laplace(3)
}
fn default_t_grid() -> Vec<usize> {
    vec![100, 200, 500, 1000, 2000, 5000]
}
fn default_replications() -> usize {
    10
}
fn default_master_seed() -> u64 {
    42
}
fn default_prior_r0() -> f64 {
    10.0
}
fn default_confidence_level() -> f64 {
    0.90
}
fn default_ridge() -> f64 {
    1e-6
}
fn default_out_dir() -> String {
    "out".into()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: default_system(),
            input: default_input_spec(),
            noise: default_noise_spec(),
            t_grid: default_t_grid(),
            replications: default_replications(),
            master_seed: default_master_seed(),
            prior_r0: default_prior_r0(),
            n_directions: None,
            confidence_level: default_confidence_level(),
            ridge: default_ridge(),
            x0: None,
            out_dir: default_out_dir(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {path:?}: {e}")))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() || self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "t_grid must be nonempty and strictly increasing".into(),
            ));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if !(0.0 < self.confidence_level && self.confidence_level < 1.0) {
            return Err(Error::Config(format!(
                "confidence_level must be in (0, 1), got {}",
                self.confidence_level
            )));
        }
        if !(self.prior_r0.is_finite() && self.prior_r0 > 0.0) {
            return Err(Error::Config(format!(
                "prior_r0 must be finite and positive, got {}",
                self.prior_r0
            )));
        }
        if !(self.ridge.is_finite() && self.ridge > 0.0) {
            return Err(Error::Config(format!(
                "ridge must be finite and positive, got {}",
                self.ridge
            )));
        }
        Ok(())
    }

    /// Build or load the system and check it against the sampler specs.
    pub fn resolve_system(&self) -> Result<BilinearSystem> {
        let sys = match &self.system {
            SystemSource::Generated { n, m, target_radius, seed } => generate_structured_system(
                *n,
                *m,
                *target_radius,
                self.input.variance(),
                self.noise.bound,
                self.input.bound,
                *seed,
            )?,
            SystemSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read system {path:?}: {e}")))?;
                BilinearSystem::from_json_str(&text)?
            }
        };
        if self.input.dimension != sys.input_dim() {
            return Err(Error::Config(format!(
                "input dimension {} does not match system m = {}",
                self.input.dimension,
                sys.input_dim()
            )));
        }
        if self.noise.dimension != sys.state_dim() {
            return Err(Error::Config(format!(
                "noise dimension {} does not match system n = {}",
                self.noise.dimension,
                sys.state_dim()
            )));
        }
        if self.input.bound != sys.u_max || self.noise.bound != sys.w_max {
            return Err(Error::Config(format!(
                "sampler bounds (u = {}, w = {}) do not match the system (u_max = {}, w_max = {})",
                self.input.bound, self.noise.bound, sys.u_max, sys.w_max
            )));
        }
        Ok(sys)
    }

    fn x0_for(&self, sys: &BilinearSystem) -> Result<Vec<f64>> {
        match &self.x0 {
            None => Ok(vec![0.0; sys.state_dim()]),
            Some(x0) => {
                if x0.len() != sys.state_dim() {
                    return Err(Error::Config(format!(
                        "x0 has length {}, state dimension is {}",
                        x0.len(),
                        sys.state_dim()
                    )));
                }
                Ok(x0.clone())
            }
        }
    }

    fn directions_per_set(&self, dim: usize) -> usize {
        self.n_directions.unwrap_or_else(|| default_directions(dim))
    }

    /// Stable 64-bit FNV-1a hash of the canonical config JSON.
    pub fn stable_hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serialization cannot fail");
        let mut hash: u64 = 0xcbf29ce484222325;
        for byte in canon.as_bytes() {
            hash ^= *byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        format!("{hash:016x}")
    }

    /// Trajectory stream for replication `k`; stream `2k + 1` is reserved
    /// for that replication's diameter directions.
    pub fn trajectory_rng(&self, replication: usize) -> StreamRng {
        StreamRng::new(self.master_seed, 2 * replication as u64)
    }

    pub fn direction_rng(&self, replication: usize) -> StreamRng {
        StreamRng::new(self.master_seed, 2 * replication as u64 + 1)
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    generator: &'static str,
    master_seed: u64,
    config_hash: String,
    log_base: &'static str,
    float_format: &'static str,
    files: &'a [String],
    /// Spectral radius of the augmented matrix for generated systems.
    #[serde(skip_serializing_if = "Option::is_none")]
    augmented_radius: Option<f64>,
}

fn write_metadata(
    config: &ExperimentConfig,
    dir: &Path,
    files: &[String],
    augmented_radius: Option<f64>,
) -> Result<()> {
    let meta = Metadata {
        tool: "bilinear-sme",
        version: env!("CARGO_PKG_VERSION"),
        generator: StreamRng::ALGORITHM,
        master_seed: config.master_seed,
        config_hash: config.stable_hash(),
        log_base: "e",
        float_format: "shortest-roundtrip",
        files,
        augmented_radius,
    };
    std::fs::write(dir.join("metadata.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

fn augmented_radius_of(config: &ExperimentConfig, sys: &BilinearSystem) -> Result<f64> {
    let cov = Matrix::identity(sys.input_dim()).scale(config.input.variance());
    let aug = crate::model::augmented_matrix(sys, &vec![0.0; sys.input_dim()], &cov)?;
    crate::tensor::spectral_radius(&aug, 48, 1e-6)
}

/// Outcome of `simulate`: one trajectory CSV per replication plus the
/// system and metadata files.
pub struct SimulateOutput {
    pub dir: PathBuf,
    pub trajectory_files: Vec<PathBuf>,
}

pub fn run_simulate(config: &ExperimentConfig) -> Result<SimulateOutput> {
    config.validate()?;
    let sys = config.resolve_system()?;
    let x0 = config.x0_for(&sys)?;
    let dir = PathBuf::from(&config.out_dir);
    std::fs::create_dir_all(&dir)?;
    let horizon = *config.t_grid.last().expect("validated nonempty");
    let mut files = vec!["system.json".to_string()];
    std::fs::write(dir.join("system.json"), sys.to_json_string() + "\n")?;
    let mut trajectory_files = Vec::new();
    for k in 0..config.replications {
        let mut rng = config.trajectory_rng(k);
        let traj = simulate(&sys, &x0, horizon, &config.input, &config.noise, &mut rng)?;
        let name = format!("trajectory_{k:03}.csv");
        std::fs::write(dir.join(&name), trajectory_to_csv(&traj))?;
        trajectory_files.push(dir.join(&name));
        files.push(name);
    }
    let rho = augmented_radius_of(config, &sys)?;
    files.push("metadata.json".to_string());
    write_metadata(config, &dir, &files, Some(rho))?;
    Ok(SimulateOutput { dir, trajectory_files })
}

/// One sweep observation: a (replication, sample count) cell.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub replication: usize,
    pub t: usize,
    pub failed: bool,
    pub truth_in_set: bool,
    pub sme_lower: f64,
    pub sme_upper: f64,
    pub sme_point_err_fro: f64,
    pub ols_err_fro: f64,
    pub ols_conf_diam: f64,
    /// Wall-clock milliseconds; written to the timings sidecar only.
    pub wall_ms: f64,
}

pub struct SweepOutput {
    pub dir: PathBuf,
    pub rows: Vec<SweepRow>,
    pub sweep_csv: PathBuf,
    pub summary_csv: PathBuf,
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let sys = config.resolve_system()?;
    let theta_star = sys.theta_star();
    let x0 = config.x0_for(&sys)?;
    let horizon = *config.t_grid.last().expect("validated nonempty");
    let n_directions = config.directions_per_set(sys.regressor_dim());

    let mut rows: Vec<SweepRow> = Vec::new();
    for k in 0..config.replications {
        let mut rng = config.trajectory_rng(k);
        let traj = simulate(&sys, &x0, horizon, &config.input, &config.noise, &mut rng)?;
        let mut set = FeasibleSet::prior_only(
            sys.state_dim(),
            sys.input_dim(),
            sys.w_max,
            config.prior_r0,
        );
        let mut appended = 0usize;
        let mut replication_failed = false;
        for &t_check in &config.t_grid {
            let started = Instant::now();
            while appended < t_check {
                let z = traj.regressor(appended);
                set.append_sample(&z.z, &traj.states[appended + 1])?;
                appended += 1;
            }
            if replication_failed {
                rows.push(SweepRow {
                    replication: k,
                    t: t_check,
                    failed: true,
                    truth_in_set: false,
                    sme_lower: f64::NAN,
                    sme_upper: f64::NAN,
                    sme_point_err_fro: f64::NAN,
                    ols_err_fro: f64::NAN,
                    ols_conf_diam: f64::NAN,
                    wall_ms: 0.0,
                });
                continue;
            }
            let truth_in_set = set.contains(&theta_star)?;
            // A fresh direction stream per grid point replays the same
            // direction set, keeping upper bounds comparable across T.
            let mut dir_rng = config.direction_rng(k);
            let cell = (|| -> Result<(f64, f64, f64)> {
                let report = set.diameter(n_directions, &mut dir_rng)?;
                let (centers, _) = set.chebyshev_centers()?;
                let point_err = centers.sub(&theta_star)?.frobenius_norm();
                Ok((report.lower, report.upper, point_err))
            })();
            match cell {
                Ok((sme_lower, sme_upper, sme_point_err_fro)) => {
                    let prefix = Trajectory {
                        states: traj.states[..=t_check].to_vec(),
                        inputs: traj.inputs[..t_check].to_vec(),
                        noises: None,
                        seed: traj.seed,
                    };
                    let fit = ols_fit(&prefix, config.ridge)?;
                    let conf = ols_confidence_diameter(
                        &fit,
                        config.confidence_level,
                        sys.w_max,
                        config.ridge,
                    )?;
                    let ols_err_fro = fit.theta_hat.sub(&theta_star)?.frobenius_norm();
                    let row = SweepRow {
                        replication: k,
                        t: t_check,
                        failed: false,
                        truth_in_set,
                        sme_lower,
                        sme_upper,
                        sme_point_err_fro,
                        ols_err_fro,
                        ols_conf_diam: conf.diameter,
                        wall_ms: started.elapsed().as_secs_f64() * 1e3,
                    };
                    debug_assert!(row.sme_lower <= row.sme_upper + 1e-12);
                    rows.push(row);
                }
                Err(Error::InfeasibleRow { .. }) => {
                    // Misspecified noise bound: record and keep sweeping
                    // the other replications.
                    replication_failed = true;
                    rows.push(SweepRow {
                        replication: k,
                        t: t_check,
                        failed: true,
                        truth_in_set,
                        sme_lower: f64::NAN,
                        sme_upper: f64::NAN,
                        sme_point_err_fro: f64::NAN,
                        ols_err_fro: f64::NAN,
                        ols_conf_diam: f64::NAN,
                        wall_ms: started.elapsed().as_secs_f64() * 1e3,
                    });
                }
                Err(other) => return Err(other),
            }
        }
    }

    let dir = PathBuf::from(&config.out_dir);
    std::fs::create_dir_all(&dir)?;
    let sweep_csv = dir.join("sweep.csv");
    std::fs::write(&sweep_csv, sweep_rows_to_csv(&rows))?;
    let summary_csv = dir.join("summary.csv");
    std::fs::write(&summary_csv, summarize_sweep(&rows, &config.t_grid))?;
    std::fs::write(dir.join("timings.csv"), timings_to_csv(&rows))?;
    std::fs::write(dir.join("plot.gp"), GNUPLOT_SCRIPT)?;
    let rho = augmented_radius_of(config, &sys)?;
    let files = vec![
        "sweep.csv".to_string(),
        "summary.csv".to_string(),
        "timings.csv".to_string(),
        "plot.gp".to_string(),
        "metadata.json".to_string(),
    ];
    write_metadata(config, &dir, &files, Some(rho))?;
    Ok(SweepOutput { dir, rows, sweep_csv, summary_csv })
}

fn fmt_metric(v: f64, failed: bool) -> String {
    if failed {
        String::new()
    } else {
        assert!(v.is_finite(), "sweep metrics must be finite");
        format!("{v}")
    }
}

pub fn sweep_rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "replication,T,status,truth_in_set,sme_lower,sme_upper,sme_point_err_fro,ols_err_fro,ols_conf_diam\n",
    );
    for row in rows {
        let status = if row.failed { "failed" } else { "ok" };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.replication,
            row.t,
            status,
            row.truth_in_set,
            fmt_metric(row.sme_lower, row.failed),
            fmt_metric(row.sme_upper, row.failed),
            fmt_metric(row.sme_point_err_fro, row.failed),
            fmt_metric(row.ols_err_fro, row.failed),
            fmt_metric(row.ols_conf_diam, row.failed),
        ));
    }
    out
}

/// Renders summary.csv with gnuplot; no graphical dependency at runtime.
const GNUPLOT_SCRIPT: &str = "\
set datafile separator ','
set logscale xy
set xlabel 'T'
set ylabel 'diameter'
set key left bottom
plot 'summary.csv' using 1:7:8:9 with yerrorlines title 'feasible-set upper bound', \\
     'summary.csv' using 1:12:13:14 with yerrorlines title 'OLS confidence diameter'
";

fn timings_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("replication,T,wall_ms\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.replication, row.t, row.wall_ms));
    }
    out
}

/// Percentile by linear interpolation between order statistics.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let idx = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    let frac = idx - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Per-T medians and 5th/95th percentile bands across replications.
pub fn summarize_sweep(rows: &[SweepRow], t_grid: &[usize]) -> String {
    let mut out = String::from(
        "T,completed,failed,sme_lower_median,sme_lower_p05,sme_lower_p95,\
         sme_upper_median,sme_upper_p05,sme_upper_p95,sme_point_err_fro_median,\
         ols_err_fro_median,ols_conf_diam_median,ols_conf_diam_p05,ols_conf_diam_p95\n",
    );
    for &t in t_grid {
        let cell: Vec<&SweepRow> = rows.iter().filter(|r| r.t == t && !r.failed).collect();
        let failed = rows.iter().filter(|r| r.t == t && r.failed).count();
        if cell.is_empty() {
            out.push_str(&format!("{t},0,{failed},,,,,,,,,,,\n"));
            continue;
        }
        let collect = |f: fn(&SweepRow) -> f64| -> Vec<f64> {
            let mut v: Vec<f64> = cell.iter().map(|r| f(r)).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let sme_lower = collect(|r| r.sme_lower);
        let sme_upper = collect(|r| r.sme_upper);
        let point_err = collect(|r| r.sme_point_err_fro);
        let ols_err = collect(|r| r.ols_err_fro);
        let ols_diam = collect(|r| r.ols_conf_diam);
        out.push_str(&format!(
            "{t},{},{failed},{},{},{},{},{},{},{},{},{},{},{}\n",
            cell.len(),
            percentile(&sme_lower, 0.5),
            percentile(&sme_lower, 0.05),
            percentile(&sme_lower, 0.95),
            percentile(&sme_upper, 0.5),
            percentile(&sme_upper, 0.05),
            percentile(&sme_upper, 0.95),
            percentile(&point_err, 0.5),
            percentile(&ols_err, 0.5),
            percentile(&ols_diam, 0.5),
            percentile(&ols_diam, 0.05),
            percentile(&ols_diam, 0.95),
        ));
    }
    out
}

fn finite_or_none(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Sample-size bound report: the minimal `T`, the block length and
/// truncation level used, and both probability-bound evaluations at that
/// `T`. Non-finite bound values are reported as `null` with a note.
#[derive(Debug, Serialize)]
pub struct BoundReport {
    pub inputs: ComplexityInputs,
    #[serde(rename = "T_min")]
    pub t_min: u64,
    pub kappa: f64,
    #[serde(rename = "M")]
    pub truncation: f64,
    pub excitation_failure_bound: Option<f64>,
    pub error_survival_bound: Option<f64>,
    pub log_base: &'static str,
    pub notes: Vec<String>,
}

pub fn run_bound(inputs: &ComplexityInputs) -> Result<BoundReport> {
    let t_min = min_sample_complexity(inputs)?;
    let t = t_min as f64;
    let kappa = default_block_length(t, inputs.eta, inputs.p_z);
    let truncation = default_truncation(inputs.c_z, t, inputs.r);
    let mut notes = Vec::new();
    let excitation = match complexity::excitation_failure_bound(
        t,
        kappa,
        truncation,
        inputs.n,
        inputs.r,
        inputs.c_z,
        inputs.k_z,
        inputs.p_z,
    ) {
        Ok(v) => {
            if !v.is_finite() {
                notes.push("excitation failure bound overflowed to infinity".into());
            }
            finite_or_none(v)
        }
        Err(Error::CoveringRadiusOutOfRange(eps)) => {
            notes.push(format!("excitation covering radius {eps} out of range"));
            None
        }
        Err(e) => return Err(e),
    };
    let survival = match complexity::error_survival_bound(
        t,
        kappa,
        truncation,
        inputs.n,
        inputs.m,
        inputs.r,
        inputs.c_z,
        inputs.delta,
        inputs.k_z,
        inputs.p_z,
        inputs.c_w,
    ) {
        Ok(v) => {
            if !v.is_finite() {
                notes.push("error survival bound overflowed to infinity".into());
            }
            finite_or_none(v)
        }
        Err(Error::CoveringRadiusOutOfRange(eps)) => {
            notes.push(format!("survival covering radius {eps} out of range"));
            None
        }
        Err(e) => return Err(e),
    };
    Ok(BoundReport {
        inputs: inputs.clone(),
        t_min,
        kappa,
        truncation,
        excitation_failure_bound: excitation,
        error_survival_bound: survival,
        log_base: "e",
        notes,
    })
}

/// Constants report: theoretical and empirical excitation constants, the
/// boundary-mass estimate, and the growth certificate summary.
#[derive(Debug, Serialize)]
pub struct ConstantsReport {
    pub generator: &'static str,
    pub log_base: &'static str,
    pub sigma_u: f64,
    pub sigma_w: f64,
    pub k0: f64,
    pub k1: f64,
    pub k_z: f64,
    pub p_z: f64,
    pub optimized: OptimizedConstants,
    pub p_hat: f64,
    pub p_hat_se: f64,
    pub p_hat_samples: usize,
    pub p_hat_directions: usize,
    pub c_w_hat: f64,
    pub c_w_cells: Vec<complexity::EpsilonCell>,
    pub c_w_samples: usize,
    /// None when the system is explosive; see `growth_valid`.
    pub rho: f64,
    pub growth_valid: bool,
    pub growth_exponent: Option<usize>,
    pub growth_constant: Option<f64>,
    #[serde(rename = "C_z")]
    pub c_z: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct OptimizedConstants {
    pub k0: f64,
    pub k1: f64,
    pub k_z: f64,
    pub p_z: f64,
    /// The maximized combination `k_z² p_z³`.
    pub objective: f64,
}

pub fn run_constants(config: &ExperimentConfig) -> Result<ConstantsReport> {
    config.validate()?;
    let sys = config.resolve_system()?;
    let sigma_u = config.input.variance().sqrt();
    let sigma_w = config.noise.variance().sqrt();
    let k0 = sigma_w / 2.0;
    let k1 = sigma_u.min(1.0) / 2.0;
    let constants = small_ball_constants(sigma_u, sigma_w, sys.u_max, sys.input_dim(), k0, k1)?;
    let (optimal, objective) =
        optimize_small_ball(sigma_u, sigma_w, sys.u_max, sys.input_dim(), 64)?;

    let n_traj = 200;
    let horizon = 51;
    let n_directions = 20;
    let mut rng = StreamRng::new(config.master_seed, 1_000_003);
    let p_hat = empirical_small_ball(
        &sys,
        &config.input,
        &config.noise,
        constants.k_z,
        n_traj,
        horizon,
        n_directions,
        &mut rng,
    )?;
    let p_hat_samples = n_traj * (horizon - 1);
    let p_hat_se = (p_hat * (1.0 - p_hat) / p_hat_samples as f64).sqrt();

    let w_max = sys.w_max;
    let eps_grid: Vec<f64> = [0.05, 0.1, 0.2, 0.5].iter().map(|f| f * w_max).collect();
    let c_w_samples = 200_000;
    let mut cw_rng = StreamRng::new(config.master_seed, 1_000_004);
    let boundary = estimate_boundary_mass(&config.noise, &eps_grid, c_w_samples, &mut cw_rng)?;

    let mut warnings = boundary.warnings.clone();
    let input_cov = Matrix::identity(sys.input_dim()).scale(config.input.variance());
    let sigma_w_mat = Matrix::identity(sys.state_dim()).scale(config.noise.variance());
    let x0 = config.x0_for(&sys)?;
    let mut sigma_0 = Matrix::zeros(sys.state_dim(), sys.state_dim());
    for i in 0..sys.state_dim() {
        for j in 0..sys.state_dim() {
            sigma_0[(i, j)] = x0[i] * x0[j];
        }
    }
    let growth = covariance_recursion(
        &sys,
        &vec![0.0; sys.input_dim()],
        &input_cov,
        &sigma_w_mat,
        &sigma_0,
        200,
    );
    let (rho, growth_valid, growth_exponent, growth_constant, c_z) = match growth {
        Ok(cert) => {
            let c_z = cert.growth_constant
                * (1.0 + sys.input_dim() as f64 * sys.u_max * sys.u_max);
            (cert.rho, true, Some(cert.growth_exponent), Some(cert.growth_constant), Some(c_z))
        }
        Err(Error::ExplosiveSystem { rho }) => {
            warnings.push(format!("system is explosive (rho = {rho}); growth fields invalid"));
            (rho, false, None, None, None)
        }
        Err(e) => return Err(e),
    };

    Ok(ConstantsReport {
        generator: StreamRng::ALGORITHM,
        log_base: "e",
        sigma_u,
        sigma_w,
        k0,
        k1,
        k_z: constants.k_z,
        p_z: constants.p_z,
        optimized: OptimizedConstants {
            k0: optimal.k0,
            k1: optimal.k1,
            k_z: optimal.k_z,
            p_z: optimal.p_z,
            objective,
        },
        p_hat,
        p_hat_se,
        p_hat_samples,
        p_hat_directions: n_directions,
        c_w_hat: boundary.c_w_hat,
        c_w_cells: boundary.per_epsilon,
        c_w_samples,
        rho,
        growth_valid,
        growth_exponent,
        growth_constant,
        c_z,
        warnings,
    })
}

/// Ad-hoc feasible-set query on a stored trajectory: build the set from
/// the first `t` samples (all, when `None`) and report the diameter.
pub struct DiamOutput {
    pub report: crate::sme::DiameterReport,
    pub samples: usize,
    pub csv: String,
    pub set_json: Option<String>,
}

pub fn run_diam(
    config: &ExperimentConfig,
    trajectory: &Trajectory,
    t: Option<usize>,
    export_set: bool,
) -> Result<DiamOutput> {
    config.validate()?;
    let samples = t.unwrap_or(trajectory.len());
    if samples > trajectory.len() {
        return Err(Error::Config(format!(
            "requested T = {samples} but the trajectory has {} samples",
            trajectory.len()
        )));
    }
    let prefix = Trajectory {
        states: trajectory.states[..=samples].to_vec(),
        inputs: trajectory.inputs[..samples].to_vec(),
        noises: None,
        seed: trajectory.seed,
    };
    let set = build_feasible_set(&prefix, config.noise.bound, config.prior_r0)?;
    let n_directions = config.directions_per_set(set.dim());
    let mut rng = config.direction_rng(0);
    let report = set.diameter(n_directions, &mut rng)?;
    let csv = report.to_csv(samples);
    let set_json = export_set.then(|| set.to_json_string());
    Ok(DiamOutput { report, samples, csv, set_json })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(dir: &str) -> ExperimentConfig {
        ExperimentConfig {
            system: SystemSource::Generated { n: 2, m: 1, target_radius: 0.9, seed: 3 },
            input: BoundedSpec::standard_truncated_gaussian(1),
            noise: BoundedSpec::standard_truncated_laplace(2),
            t_grid: vec![20, 50, 100],
            replications: 3,
            master_seed: 11,
            prior_r0: 10.0,
            n_directions: Some(8),
            confidence_level: 0.9,
            ridge: 1e-6,
            x0: None,
            out_dir: dir.into(),
        }
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert_eq!(percentile(&v, 0.5), 2.5);
        assert!((percentile(&v, 0.05) - 1.15).abs() < 1e-12);
    }

    #[test]
    fn config_defaults_parse_from_empty_json() {
        let config: ExperimentConfig = serde_json::from_str("{}").unwrap();
        config.validate().unwrap();
        assert_eq!(config.replications, 10);
        assert_eq!(config.t_grid.last(), Some(&5000));
        matches!(config.system, SystemSource::Generated { n: 3, m: 2, .. });
    }

    #[test]
    fn config_rejects_bad_grid_and_unknown_fields() {
        let bad: ExperimentConfig =
            serde_json::from_str(r#"{"t_grid": [100, 100]}"#).unwrap();
        assert!(bad.validate().is_err());
        let unknown = serde_json::from_str::<ExperimentConfig>(r#"{"t_gridd": [100]}"#);
        assert!(unknown.is_err());
    }

    #[test]
    fn sweep_is_deterministic_and_prefix_stable() {
        let base = std::env::temp_dir().join("bilinear_sme_test_sweep");
        let _ = std::fs::remove_dir_all(&base);
        let dir_a = base.join("a");
        let dir_b = base.join("b");
        let mut config_a = small_config(dir_a.to_str().unwrap());
        let out_a = run_sweep(&config_a).unwrap();
        config_a.out_dir = dir_b.to_str().unwrap().into();
        let out_b = run_sweep(&config_a).unwrap();
        let bytes_a = std::fs::read(&out_a.sweep_csv).unwrap();
        let bytes_b = std::fs::read(&out_b.sweep_csv).unwrap();
        assert_eq!(bytes_a, bytes_b);

        // Prefix property: a run whose grid stops at 50 reproduces the
        // T = 20 and T = 50 rows of the longer run exactly.
        let dir_c = base.join("c");
        let mut config_c = small_config(dir_c.to_str().unwrap());
        config_c.t_grid = vec![20, 50];
        let out_c = run_sweep(&config_c).unwrap();
        for row_c in &out_c.rows {
            let row_a = out_a
                .rows
                .iter()
                .find(|r| r.replication == row_c.replication && r.t == row_c.t)
                .unwrap();
            assert_eq!(row_a.sme_upper, row_c.sme_upper);
            assert_eq!(row_a.sme_lower, row_c.sme_lower);
            assert_eq!(row_a.ols_err_fro, row_c.ols_err_fro);
        }
        let _ = std::fs::remove_dir_all(&base);
    }

    #[test]
    fn sweep_rows_monotone_and_truthful() {
        let dir = std::env::temp_dir().join("bilinear_sme_test_monotone");
        let _ = std::fs::remove_dir_all(&dir);
        let config = small_config(dir.to_str().unwrap());
        let out = run_sweep(&config).unwrap();
        for k in 0..config.replications {
            let uppers: Vec<f64> = out
                .rows
                .iter()
                .filter(|r| r.replication == k)
                .map(|r| r.sme_upper)
                .collect();
            assert_eq!(uppers.len(), 3);
            assert!(uppers[1] <= uppers[0] + 1e-9);
            assert!(uppers[2] <= uppers[1] + 1e-9);
        }
        assert!(out.rows.iter().all(|r| r.truth_in_set));
        assert!(out.rows.iter().all(|r| !r.failed));
        // Summary has one line per grid point plus the header.
        let summary = std::fs::read_to_string(&out.summary_csv).unwrap();
        assert_eq!(summary.lines().count(), 1 + config.t_grid.len());
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn misspecified_noise_marks_replication_failed() {
        let dir = std::env::temp_dir().join("bilinear_sme_test_failed");
        let _ = std::fs::remove_dir_all(&dir);
        let mut config = small_config(dir.to_str().unwrap());
        // Claim a much smaller noise bound than the data was generated
        // with: some replication's feasible set should empty out.
        config.system = SystemSource::Generated { n: 2, m: 1, target_radius: 0.9, seed: 3 };
        let sys = config.resolve_system().unwrap();
        let x0 = vec![0.0; 2];
        let mut rng = config.trajectory_rng(0);
        let traj = simulate(&sys, &x0, 100, &config.input, &config.noise, &mut rng).unwrap();
        // Write the honest trajectory but rebuild the set claiming w_max/20.
        let mut set = FeasibleSet::prior_only(2, 1, sys.w_max / 20.0, config.prior_r0);
        let mut infeasible = false;
        for t in 0..traj.len() {
            let z = traj.regressor(t);
            set.append_sample(&z.z, &traj.states[t + 1]).unwrap();
            if t > 20 {
                if let Err(Error::InfeasibleRow { .. }) = set.chebyshev_centers() {
                    infeasible = true;
                    break;
                }
            }
        }
        assert!(infeasible, "tight noise bound should empty the set");
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn bound_report_echoes_inputs_and_is_minimal() {
        let inputs = ComplexityInputs {
            n: 2,
            m: 1,
            k_z: 0.5,
            p_z: 0.5,
            c_w: 0.5,
            delta: 0.1,
            eta: 0.1,
            epsilon_r: 0.25,
            epsilon: 0.25,
            r: 0,
            c_z: 1.0,
        };
        let report = run_bound(&inputs).unwrap();
        assert_eq!(report.inputs.n, 2);
        assert_eq!(report.log_base, "e");
        let t = report.t_min as f64;
        assert!(t >= inputs.required_samples_rhs(t));
        assert!((t - 1.0) < inputs.required_samples_rhs(t - 1.0));
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["T_min"].is_number());
        assert!(json["M"].is_number());
        assert!(json["inputs"]["k_z"].is_number());
    }

    #[test]
    fn constants_report_on_small_instance() {
        let dir = std::env::temp_dir().join("bilinear_sme_test_constants");
        let config = small_config(dir.to_str().unwrap());
        let report = run_constants(&config).unwrap();
        assert!(report.growth_valid);
        assert!(report.rho < 1.0);
        assert_eq!(report.growth_exponent, Some(0));
        assert!(report.p_hat >= report.p_z, "{} < {}", report.p_hat, report.p_z);
        assert!(report.c_w_hat > 0.0);
        assert!(report.c_z.unwrap() > 0.0);
        assert_eq!(report.generator, "chacha12");
    }

    #[test]
    fn constants_with_uniform_noise_recovers_half() {
        // Uniform boundary mass is ε/2 at every ε, so c_w_hat ≈ 1/2.
        let dir = std::env::temp_dir().join("bilinear_sme_test_constants_uniform");
        let mut config = small_config(dir.to_str().unwrap());
        config.noise = BoundedSpec {
            family: crate::stochastic::SampleFamily::UniformBox,
            scale: 1.0,
            bound: 1.0,
            dimension: 2,
        };
        let report = run_constants(&config).unwrap();
        let worst_se = report.c_w_cells.iter().map(|c| c.se).fold(0.0f64, f64::max);
        assert!(
            (report.c_w_hat - 0.5).abs() <= 4.0 * worst_se + 0.01,
            "c_w_hat = {}",
            report.c_w_hat
        );
    }

    #[test]
    fn diam_query_matches_direct_construction() {
        let dir = std::env::temp_dir().join("bilinear_sme_test_diam");
        let config = small_config(dir.to_str().unwrap());
        let sys = config.resolve_system().unwrap();
        let mut rng = config.trajectory_rng(0);
        let traj = simulate(&sys, &[0.0; 2], 60, &config.input, &config.noise, &mut rng).unwrap();
        let out = run_diam(&config, &traj, Some(40), true).unwrap();
        assert_eq!(out.samples, 40);
        assert!(out.csv.starts_with("T,row,lower,upper\n"));
        assert_eq!(out.csv.lines().count(), 1 + 2);
        assert!(out.set_json.is_some());
        assert!(out.report.lower <= out.report.upper);
        assert!(run_diam(&config, &traj, Some(61), false).is_err());
    }
}
