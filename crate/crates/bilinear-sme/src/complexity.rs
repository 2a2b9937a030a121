//! Finite-sample machinery evaluated as computable quantities: the state
//! covariance recursion and its polynomial growth certificate, theoretical
//! and empirical small-ball excitation constants, the disturbance
//! boundary-mass constant, covering numbers, and the sample-size bound for
//! feasible-set contraction.
//!
//! All logarithms are natural; every report that leaves this module says so.

use crate::error::{Error, Result};
use crate::model::{augmented_matrix, BilinearSystem};
use crate::stochastic::{simulate, BoundedSpec, StreamRng};
use crate::tensor::{self, dot, Matrix};
use serde::{Deserialize, Serialize};

/// Certificate that the state second moment grows at most polynomially:
/// `tr(Σ_t) ≤ growth_constant · (1 + t^growth_exponent)` on the checked
/// horizon, valid when `rho ≤ 1`.
#[derive(Debug, Clone)]
pub struct GrowthCertificate {
    /// The augmented matrix driving `vec(Σ_{t+1}) = Ã vec(Σ_t) + vec(Σ_w)`.
    pub augmented: Matrix,
    pub rho: f64,
    /// Fitted growth exponent, the smallest integer in `[0, n²]` whose
    /// normalized traces stay bounded over the horizon.
    pub growth_exponent: usize,
    /// Conservative fallback exponent `n²` (the worst defective case).
    pub growth_exponent_conservative: usize,
    /// Supremum of `tr(Σ_t) / (1 + t^r)` over the horizon.
    pub growth_constant: f64,
    /// `tr(Σ_t)` for `t = 0..=horizon`.
    pub sigma_traces: Vec<f64>,
}

/// Iterate the exact covariance recursion and certify polynomial growth.
///
/// Refuses systems whose augmented matrix has spectral radius above one:
/// the second moment then grows geometrically and no polynomial bound holds.
pub fn covariance_recursion(
    sys: &BilinearSystem,
    input_mean: &[f64],
    input_cov: &Matrix,
    sigma_w: &Matrix,
    sigma_0: &Matrix,
    horizon: usize,
) -> Result<GrowthCertificate> {
    let n = sys.state_dim();
    for (name, m) in [("sigma_w", sigma_w), ("sigma_0", sigma_0)] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!("{name} must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 {
                    return Err(Error::InvalidArgument { arg: "covariance", reason: format!("{name} must be symmetric") });
                }
            }
        }
        let eigs = tensor::symmetric_eigenvalues(m)?;
        if eigs[0] < -1e-10 {
            return Err(Error::InvalidArgument {
                arg: "covariance",
                reason: format!("{name} must be positive semidefinite"),
            });
        }
    }
    if horizon < 8 {
        return Err(Error::InvalidArgument {
            arg: "horizon",
            reason: "growth fitting needs a horizon of at least 8".into(),
        });
    }
    let augmented = augmented_matrix(sys, input_mean, input_cov)?;
    let rho = tensor::spectral_radius(&augmented, 48, 1e-6)?;
    if rho > 1.0 + 1e-6 {
        return Err(Error::ExplosiveSystem { rho });
    }
    let mut v = tensor::vectorize(sigma_0);
    let w_vec = tensor::vectorize(sigma_w);
    let trace_of = |v: &[f64]| (0..n).map(|j| v[j * n + j]).sum::<f64>();
    let mut sigma_traces = Vec::with_capacity(horizon + 1);
    sigma_traces.push(trace_of(&v));
    for _ in 0..horizon {
        let mut next = augmented.matvec(&v)?;
        for (x, w) in next.iter_mut().zip(&w_vec) {
            *x += w;
        }
        sigma_traces.push(trace_of(&next));
        v = next;
    }
    let (growth_exponent, growth_constant) = fit_growth_exponent(&sigma_traces, n);
    Ok(GrowthCertificate {
        augmented,
        rho,
        growth_exponent,
        growth_exponent_conservative: n * n,
        growth_constant,
        sigma_traces,
    })
}

/// Smallest exponent whose normalized trace sequence stops growing: the
/// late-horizon maximum of `tr(Σ_t)/(1+t^r)` must not exceed the earlier
/// maximum by more than 5%. Falls back to the conservative `n²` when no
/// candidate passes.
fn fit_growth_exponent(traces: &[f64], n: usize) -> (usize, f64) {
    let cap = n * n;
    let h = traces.len() - 1;
    let split = 3 * h / 4;
    let normalized = |t: usize, r: usize| traces[t] / (1.0 + (t as f64).powi(r as i32));
    for r in 0..=cap {
        let early = (0..=split).map(|t| normalized(t, r)).fold(0.0f64, f64::max);
        let late = (split + 1..=h).map(|t| normalized(t, r)).fold(0.0f64, f64::max);
        if late <= early * 1.05 + 1e-12 {
            let sup = (0..=h).map(|t| normalized(t, r)).fold(0.0f64, f64::max);
            return (r, sup);
        }
    }
    let sup = (0..=h).map(|t| normalized(t, cap)).fold(0.0f64, f64::max);
    (cap, sup)
}

/// Excitation constants for the regressor process: thresholds `k0`
/// (disturbance direction) and `k1` (input direction) combine into the
/// small-ball level `k_z = k0·k1` holding with probability at least `p_z`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SmallBallConstants {
    pub k0: f64,
    pub k1: f64,
    pub k_z: f64,
    pub p_z: f64,
    pub sigma_w: f64,
    pub sigma_u: f64,
    pub u_max: f64,
    pub m: usize,
}

/// Evaluate the small-ball probability lower bound
/// `p_z = σ_u⁴ / (12 m² u_max⁴) · (1 − k1²/σ_u²)² · (1 − k0²/σ_w²)²`.
///
/// `k0` must lie in `[0, σ_w)` and `k1` in `[0, min(1, σ_u))`; the closed
/// lower endpoints evaluate the degenerate `k_z = 0` case.
pub fn small_ball_constants(
    sigma_u: f64,
    sigma_w: f64,
    u_max: f64,
    m: usize,
    k0: f64,
    k1: f64,
) -> Result<SmallBallConstants> {
    if !(sigma_u > 0.0 && sigma_w > 0.0 && u_max > 0.0 && m >= 1) {
        return Err(Error::InvalidArgument {
            arg: "stats",
            reason: format!("sigma_u = {sigma_u}, sigma_w = {sigma_w}, u_max = {u_max}, m = {m}"),
        });
    }
    if !(0.0..sigma_w).contains(&k0) {
        return Err(Error::InvalidArgument {
            arg: "k0",
            reason: format!("must be in [0, sigma_w = {sigma_w}), got {k0}"),
        });
    }
    let k1_cap = sigma_u.min(1.0);
    if !(0.0..k1_cap).contains(&k1) {
        return Err(Error::InvalidArgument {
            arg: "k1",
            reason: format!("must be in [0, min(1, sigma_u) = {k1_cap}), got {k1}"),
        });
    }
    let base = sigma_u.powi(4) / (12.0 * (m as f64).powi(2) * u_max.powi(4));
    let input_term = 1.0 - k1 * k1 / (sigma_u * sigma_u);
    let noise_term = 1.0 - k0 * k0 / (sigma_w * sigma_w);
    let p_z = base * input_term * input_term * noise_term * noise_term;
    Ok(SmallBallConstants { k0, k1, k_z: k0 * k1, p_z, sigma_w, sigma_u, u_max, m })
}

/// Grid-search `(k0, k1)` maximizing `k_z² p_z³`, the combination entering
/// the sample-size bound's denominator.
pub fn optimize_small_ball(
    sigma_u: f64,
    sigma_w: f64,
    u_max: f64,
    m: usize,
    grid: usize,
) -> Result<(SmallBallConstants, f64)> {
    let mut best: Option<(SmallBallConstants, f64)> = None;
    for i in 1..grid {
        let k0 = sigma_w * i as f64 / grid as f64;
        for j in 1..grid {
            let k1 = sigma_u.min(1.0) * j as f64 / grid as f64;
            let c = small_ball_constants(sigma_u, sigma_w, u_max, m, k0, k1)?;
            let objective = c.k_z * c.k_z * c.p_z.powi(3);
            if best.as_ref().is_none_or(|(_, b)| objective > *b) {
                best = Some((c, objective));
            }
        }
    }
    best.ok_or(Error::InvalidArgument { arg: "grid", reason: "grid must be at least 2".into() })
}

/// Monte-Carlo proxy for the small-ball probability: the minimum over
/// sampled unit directions `v` of the empirical frequency of
/// `|v·z_t| ≥ k_z` across trajectories and times `t ≥ 1`.
///
/// This estimates a marginal (unconditioned) probability; the conditional
/// small-ball property it proxies is at least as hard to satisfy, so the
/// theoretical lower bound should sit below this estimate.
#[allow(clippy::too_many_arguments)]
pub fn empirical_small_ball(
    sys: &BilinearSystem,
    input_spec: &BoundedSpec,
    noise_spec: &BoundedSpec,
    k_z: f64,
    n_traj: usize,
    horizon: usize,
    n_directions: usize,
    rng: &mut StreamRng,
) -> Result<f64> {
    if k_z < 0.0 || n_traj == 0 || horizon < 2 || n_directions == 0 {
        return Err(Error::InvalidArgument {
            arg: "empirical_small_ball",
            reason: "need k_z >= 0, horizon >= 2, and positive sample counts".into(),
        });
    }
    let d = sys.regressor_dim();
    let directions: Vec<Vec<f64>> = (0..n_directions).map(|_| rng.unit_direction(d)).collect();
    let x0 = vec![0.0; sys.state_dim()];
    let mut hits = vec![0usize; n_directions];
    let mut total = 0usize;
    for _ in 0..n_traj {
        let traj = simulate(sys, &x0, horizon, input_spec, noise_spec, rng)?;
        // Regressors need an input at the same index, so t stops at horizon−1.
        for t in 1..horizon {
            let z = traj.regressor(t).z;
            total += 1;
            for (h, v) in hits.iter_mut().zip(&directions) {
                if dot(v, &z).abs() >= k_z {
                    *h += 1;
                }
            }
        }
    }
    Ok(hits.iter().map(|h| *h as f64 / total as f64).fold(f64::INFINITY, f64::min))
}

/// One cell of the boundary-mass estimate.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonCell {
    pub epsilon: f64,
    /// `min` over coordinates and signs of `P(b·w[j] ≥ bound − ε) / ε`.
    pub estimate: f64,
    /// Standard error of the estimate (binomial, scaled by `1/ε`).
    pub se: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryMassEstimate {
    /// `min` over the usable grid of the per-ε estimates.
    pub c_w_hat: f64,
    pub per_epsilon: Vec<EpsilonCell>,
    pub samples: usize,
    pub warnings: Vec<String>,
}

/// Estimate the boundary-mass constant of a bounded noise law: the smallest
/// observed ratio `P(b·w[j] ≥ bound − ε)/ε` over an ε grid, coordinates,
/// and signs. Grid points with zero empirical mass are dropped with a
/// warning (the usable grid is refined upward).
pub fn estimate_boundary_mass(
    noise_spec: &BoundedSpec,
    eps_grid: &[f64],
    n_samples: usize,
    rng: &mut StreamRng,
) -> Result<BoundaryMassEstimate> {
    let bound = noise_spec.bound;
    if bound <= 0.0 {
        return Err(Error::InvalidArgument {
            arg: "noise_spec",
            reason: "boundary mass needs a positive bound".into(),
        });
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|e| *e <= 0.0 || *e > bound) {
        return Err(Error::InvalidArgument {
            arg: "eps_grid",
            reason: format!("grid must lie in (0, {bound}]"),
        });
    }
    let dim = noise_spec.dimension;
    // counts[e][j][sign]
    let mut counts = vec![vec![[0usize; 2]; dim]; eps_grid.len()];
    for _ in 0..n_samples {
        let w = crate::stochastic::sample_noise(noise_spec, rng);
        for (e, eps) in eps_grid.iter().enumerate() {
            let threshold = bound - eps;
            for j in 0..dim {
                if w[j] >= threshold {
                    counts[e][j][0] += 1;
                }
                if -w[j] >= threshold {
                    counts[e][j][1] += 1;
                }
            }
        }
    }
    let mut per_epsilon = Vec::with_capacity(eps_grid.len());
    let mut warnings = Vec::new();
    let mut usable = Vec::new();
    for (e, eps) in eps_grid.iter().enumerate() {
        let mut worst_hits = usize::MAX;
        for j in 0..dim {
            for s in 0..2 {
                worst_hits = worst_hits.min(counts[e][j][s]);
            }
        }
        let p = worst_hits as f64 / n_samples as f64;
        let estimate = p / eps;
        let se = (p * (1.0 - p) / n_samples as f64).sqrt() / eps;
        per_epsilon.push(EpsilonCell { epsilon: *eps, estimate, se });
        if worst_hits == 0 {
            warnings.push(format!(
                "no samples within {eps} of the boundary; dropping this grid point (refine upward)"
            ));
        } else {
            usable.push(estimate);
        }
    }
    let c_w_hat = usable.into_iter().fold(f64::INFINITY, f64::min);
    let c_w_hat = if c_w_hat.is_finite() { c_w_hat } else { 0.0 };
    if c_w_hat == 0.0 {
        warnings.push("all grid points had zero empirical boundary mass".into());
    }
    Ok(BoundaryMassEstimate { c_w_hat, per_epsilon, samples: n_samples, warnings })
}

/// Covering-number bound for the Euclidean unit ball:
/// `544 · dim^2.5 · ln(dim/ε) · (1/ε)^dim`, valid for `0 < ε < 0.5`.
pub fn covering_number(dim: usize, eps: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidArgument { arg: "dim", reason: "must be at least 1".into() });
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::CoveringRadiusOutOfRange(eps));
    }
    let d = dim as f64;
    Ok(544.0 * d.powf(2.5) * (d / eps).ln() * (1.0 / eps).powf(d))
}

/// Failure probability that some length-`kappa` block of regressors is not
/// excited at level `a1 = k_z p_z / 4`:
/// `(T/κ) · v(M) · exp(−κ p_z²/8) + C_z T^{r+1} / M²`, where `v(M)` is the
/// covering bound at net radius `a1²/(2M²)` in dimension `n`.
#[allow(clippy::too_many_arguments)]
pub fn excitation_failure_bound(
    t: f64,
    kappa: f64,
    m_trunc: f64,
    n: usize,
    r: usize,
    c_z: f64,
    k_z: f64,
    p_z: f64,
) -> Result<f64> {
    if t <= 0.0 || kappa <= 0.0 || m_trunc <= 0.0 || c_z <= 0.0 || k_z <= 0.0 || p_z <= 0.0 {
        return Err(Error::InvalidArgument {
            arg: "excitation_failure_bound",
            reason: "all inputs must be positive".into(),
        });
    }
    let a1 = k_z * p_z / 4.0;
    let eps = a1 * a1 / (2.0 * m_trunc * m_trunc);
    let v = covering_number(n, eps)?;
    let first = t / kappa * v * (-kappa * p_z * p_z / 8.0).exp();
    let tail = c_z * t.powi(r as i32 + 1) / (m_trunc * m_trunc);
    Ok(first + tail)
}

/// Survival probability of a large feasible parameter error under excited
/// blocks: `v_γ(M) · (1 − q_w(ε_δ))^⌊T/κ⌋ + C_z T^{r+1}/M²` with the net
/// over error directions of dimension `n² + n²m`, `ε_γ = a1/(4M√n)`,
/// `ε_δ = a1 δ/(4√n)`, and the boundary-mass rate `q_w(ε) = min(1, c_w ε)`.
#[allow(clippy::too_many_arguments)]
pub fn error_survival_bound(
    t: f64,
    kappa: f64,
    m_trunc: f64,
    n: usize,
    m: usize,
    r: usize,
    c_z: f64,
    delta: f64,
    k_z: f64,
    p_z: f64,
    c_w: f64,
) -> Result<f64> {
    if t <= 0.0
        || kappa <= 0.0
        || m_trunc <= 0.0
        || c_z <= 0.0
        || delta <= 0.0
        || k_z <= 0.0
        || p_z <= 0.0
        || c_w <= 0.0
    {
        return Err(Error::InvalidArgument {
            arg: "error_survival_bound",
            reason: "all inputs must be positive".into(),
        });
    }
    let a1 = k_z * p_z / 4.0;
    let n_f = n as f64;
    let eps_gamma = a1 / (4.0 * m_trunc * n_f.sqrt());
    let eps_delta = a1 * delta / (4.0 * n_f.sqrt());
    let net_dim = n * n + n * n * m;
    let v_gamma = covering_number(net_dim, eps_gamma)?;
    let q_w = (c_w * eps_delta).min(1.0);
    let blocks = (t / kappa).floor();
    let first = v_gamma * (1.0 - q_w).powf(blocks);
    let tail = c_z * t.powi(r as i32 + 1) / (m_trunc * m_trunc);
    Ok(first + tail)
}

/// Everything the sample-size bound needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexityInputs {
    pub n: usize,
    pub m: usize,
    pub k_z: f64,
    pub p_z: f64,
    pub c_w: f64,
    pub delta: f64,
    pub eta: f64,
    pub epsilon_r: f64,
    pub epsilon: f64,
    pub r: usize,
    pub c_z: f64,
}

impl ComplexityInputs {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidArgument { arg: "n/m", reason: "dimensions must be at least 1".into() });
        }
        for (name, v) in [
            ("k_z", self.k_z),
            ("p_z", self.p_z),
            ("c_w", self.c_w),
            ("epsilon_r", self.epsilon_r),
            ("epsilon", self.epsilon),
            ("c_z", self.c_z),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument {
                    arg: "constants",
                    reason: format!("{name} must be finite and positive, got {v}"),
                });
            }
        }
        for (name, v) in [("delta", self.delta), ("eta", self.eta)] {
            if !(0.0 < v && v < 1.0) {
                return Err(Error::InvalidArgument {
                    arg: "probabilities",
                    reason: format!("{name} must be in (0, 1), got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Right-hand side of the sample-size inequality at sample count `t`.
    pub fn required_samples_rhs(&self, t: f64) -> f64 {
        let n = self.n as f64;
        let m = self.m as f64;
        let lead = 256.0 * n.sqrt() / (self.k_z * self.p_z.powi(3) * self.c_w * self.delta);
        let first = (1632.0 * t / self.eta).ln() + 10.0 * n * n * m * (n * m / self.epsilon_r).ln();
        let second = 2.5 * (1632.0 * n / self.eta).ln() + 2.0 * n * (1.0 / self.epsilon).ln();
        lead * first * second
    }
}

/// Default block length: long enough that one block's excitation failure
/// mass is at most `η / (2T)`.
pub fn default_block_length(t: f64, eta: f64, p_z: f64) -> f64 {
    (8.0 * (2.0 * t / eta).ln() / (p_z * p_z)).ceil()
}

/// Default regressor-truncation level `√(6 C_z T^{r+1})`.
pub fn default_truncation(c_z: f64, t: f64, r: usize) -> f64 {
    (6.0 * c_z * t.powi(r as i32 + 1)).sqrt()
}

/// Smallest integer sample count satisfying the contraction inequality
/// `T ≥ required_samples_rhs(T)`.
///
/// The right side grows only logarithmically in `T`, so the fixed-point
/// iteration from `T = 1` increases monotonically to the crossing; a
/// doubling step breaks slow stalls, and a final integer scan pins down
/// minimality. Beyond 2^52 the scan is skipped (integers are no longer
/// exact in `f64`) and the rounded-up fixed point is returned.
pub fn min_sample_complexity(inputs: &ComplexityInputs) -> Result<u64> {
    inputs.validate()?;
    let mut t = 1.0f64;
    let mut converged = false;
    for _ in 0..500 {
        let next = inputs.required_samples_rhs(t).max(1.0);
        if !next.is_finite() {
            return Err(Error::BoundNonConvergence { last: t });
        }
        if (next - t).abs() <= 0.5 {
            t = next;
            converged = true;
            break;
        }
        // Doubling past slow stalls keeps the iterate strictly growing.
        t = if next > t && next < t * 1.000001 { t * 2.0 } else { next };
    }
    if !converged {
        return Err(Error::BoundNonConvergence { last: t });
    }
    if t >= (1u64 << 52) as f64 {
        return Ok(t.ceil() as u64);
    }
    let mut candidate = t.ceil().max(1.0) as u64;
    // Walk up while violated, then down to the minimal satisfying integer.
    while (candidate as f64) < inputs.required_samples_rhs(candidate as f64) {
        candidate += 1;
    }
    while candidate > 1 {
        let below = (candidate - 1) as f64;
        if below >= inputs.required_samples_rhs(below) {
            candidate -= 1;
        } else {
            break;
        }
    }
    let t_final = candidate as f64;
    if t_final < inputs.required_samples_rhs(t_final) {
        return Err(Error::BoundNonConvergence { last: t_final });
    }
    Ok(candidate)
}
