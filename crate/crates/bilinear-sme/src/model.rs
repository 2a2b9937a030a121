//! Discrete-time bilinear system model: parameters, regressors, one-step
//! dynamics, and the augmented matrix that governs mean-square stability.
//!
//! The dynamics are `x⁺ = A x + Σ_i u[i] B_i x + w` with state dimension `n`
//! and input dimension `m`. Stacking `z = [x; u ⊗ x]` makes the map linear
//! in the parameter block `Θ★ = [A  B_1 … B_m]`, which is what both the
//! set-membership estimator and the least-squares baseline identify.

use crate::error::{Error, Result};
use crate::stochastic::StreamRng;
use crate::tensor::{self, kron, kron_vec, norm_inf, Matrix};
use serde::{Deserialize, Serialize};

/// Bilinear system with known noise and input bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSystem {
    n: usize,
    m: usize,
    a: Matrix,
    b: Vec<Matrix>,
    pub w_max: f64,
    pub u_max: f64,
}

impl BilinearSystem {
    pub fn new(a: Matrix, b: Vec<Matrix>, w_max: f64, u_max: f64) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() {
            return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        for (i, bi) in b.iter().enumerate() {
            if bi.rows() != n || bi.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "input matrix {} is {}x{}, expected {}x{}",
                    i,
                    bi.rows(),
                    bi.cols(),
                    n,
                    n
                )));
            }
        }
        if !w_max.is_finite() || w_max < 0.0 {
            return Err(Error::InvalidArgument {
                arg: "w_max",
                reason: format!("must be finite and nonnegative, got {w_max}"),
            });
        }
        if !u_max.is_finite() || u_max <= 0.0 {
            return Err(Error::InvalidArgument {
                arg: "u_max",
                reason: format!("must be finite and positive, got {u_max}"),
            });
        }
        let m = b.len();
        Ok(Self { n, m, a, b, w_max, u_max })
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    /// Regressor dimension `n + n·m`.
    pub fn regressor_dim(&self) -> usize {
        self.n + self.n * self.m
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[Matrix] {
        &self.b
    }

    /// The true parameter block `[A  B_1 … B_m]`, `n x (n + nm)`.
    pub fn theta_star(&self) -> Matrix {
        let d = self.regressor_dim();
        let mut theta = Matrix::zeros(self.n, d);
        for i in 0..self.n {
            for j in 0..self.n {
                theta[(i, j)] = self.a[(i, j)];
            }
            for (k, bk) in self.b.iter().enumerate() {
                for j in 0..self.n {
                    theta[(i, self.n + k * self.n + j)] = bk[(i, j)];
                }
            }
        }
        theta
    }

    pub fn to_json_string(&self) -> String {
        let json = SystemJson {
            n: self.n,
            m: self.m,
            a: self.a.entries().to_vec(),
            b: self.b.iter().map(|bi| bi.entries().to_vec()).collect(),
            w_max: self.w_max,
            u_max: self.u_max,
        };
        serde_json::to_string_pretty(&json).expect("system serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: SystemJson = serde_json::from_str(s)?;
        let a = Matrix::new(json.n, json.n, json.a)?;
        let b = json
            .b
            .into_iter()
            .map(|entries| Matrix::new(json.n, json.n, entries))
            .collect::<Result<Vec<_>>>()?;
        if b.len() != json.m {
            return Err(Error::Config(format!(
                "system file declares m = {} but has {} input matrices",
                json.m,
                b.len()
            )));
        }
        Self::new(a, b, json.w_max, json.u_max)
    }
}

/// On-disk schema: matrices as row-major entry lists.
#[derive(Serialize, Deserialize)]
struct SystemJson {
    n: usize,
    m: usize,
    #[serde(rename = "A")]
    a: Vec<f64>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    w_max: f64,
    u_max: f64,
}

/// Stacked regressor `z = [x; u ⊗ x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressor {
    pub z: Vec<f64>,
}

pub fn build_regressor(x: &[f64], u: &[f64]) -> Regressor {
    let mut z = Vec::with_capacity(x.len() + u.len() * x.len());
    z.extend_from_slice(x);
    z.extend(kron_vec(u, x));
    Regressor { z }
}

/// One step of the dynamics: `A x + Σ u[i] B_i x + w`.
pub fn step(sys: &BilinearSystem, x: &[f64], u: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if x.len() != sys.n || u.len() != sys.m || w.len() != sys.n {
        return Err(Error::DimensionMismatch(format!(
            "step got |x| = {}, |u| = {}, |w| = {} for n = {}, m = {}",
            x.len(),
            u.len(),
            w.len(),
            sys.n,
            sys.m
        )));
    }
    let w_norm = norm_inf(w);
    if w_norm > sys.w_max + 1e-12 {
        return Err(Error::NoiseBoundViolated { value: w_norm, bound: sys.w_max });
    }
    let mut next = sys.a.matvec(x)?;
    for (k, bk) in sys.b.iter().enumerate() {
        let uk = u[k];
        if uk == 0.0 {
            continue;
        }
        let bx = bk.matvec(x)?;
        for i in 0..sys.n {
            next[i] += uk * bx[i];
        }
    }
    for i in 0..sys.n {
        next[i] += w[i];
    }
    Ok(next)
}

/// Augmented matrix `F ⊗ F + Σ_{k,ℓ} γ_{kℓ} B_ℓ ⊗ B_k` with
/// `F = A + Σ_k mean[k] B_k` and `γ` the input covariance. Its spectral
/// radius decides whether the state covariance recursion is contractive,
/// marginally stable, or explosive.
pub fn augmented_matrix(
    sys: &BilinearSystem,
    input_mean: &[f64],
    input_cov: &Matrix,
) -> Result<Matrix> {
    if input_mean.len() != sys.m || input_cov.rows() != sys.m || input_cov.cols() != sys.m {
        return Err(Error::DimensionMismatch(format!(
            "input stats must have dimension m = {}",
            sys.m
        )));
    }
    for i in 0..sys.m {
        for j in 0..sys.m {
            if (input_cov[(i, j)] - input_cov[(j, i)]).abs() > 1e-10 {
                return Err(Error::InvalidArgument {
                    arg: "input_cov",
                    reason: "must be symmetric".into(),
                });
            }
        }
    }
    let eigs = tensor::symmetric_eigenvalues(input_cov)?;
    if eigs.first().copied().unwrap_or(0.0) < -1e-10 {
        return Err(Error::InvalidArgument {
            arg: "input_cov",
            reason: "must be positive semidefinite".into(),
        });
    }
    let mut f = sys.a.clone();
    for (k, bk) in sys.b.iter().enumerate() {
        if input_mean[k] != 0.0 {
            f = f.add(&bk.scale(input_mean[k]))?;
        }
    }
    let mut augmented = kron(&f, &f);
    for k in 0..sys.m {
        for l in 0..sys.m {
            let gamma = input_cov[(k, l)];
            if gamma == 0.0 {
                continue;
            }
            augmented = augmented.add(&kron(&sys.b[l], &sys.b[k]).scale(gamma))?;
        }
    }
    Ok(augmented)
}

/// Generate a structured system: diagonal `A`, strictly lower-triangular
/// `B_i`, raw entries uniform on [-1, 1], then one joint multiplicative
/// scale found by bisection so that the augmented matrix under zero-mean
/// inputs of variance `input_variance` has spectral radius
/// `target_radius ± 1e-3`.
pub fn generate_structured_system(
    n: usize,
    m: usize,
    target_radius: f64,
    input_variance: f64,
    w_max: f64,
    u_max: f64,
    seed: u64,
) -> Result<BilinearSystem> {
    if n == 0 || target_radius <= 0.0 || target_radius > 1.0 {
        return Err(Error::InvalidArgument {
            arg: "target_radius",
            reason: format!("need n >= 1 and target in (0, 1], got n = {n}, target = {target_radius}"),
        });
    }
    let mut rng = StreamRng::new(seed, 0);
    let mut diag = vec![0.0; n];
    for d in diag.iter_mut() {
        *d = rng.uniform_symmetric();
    }
    // Raw A is diagonal with entries in [-1, 1], so ρ(A) ≤ 1 holds before
    // scaling; the joint scale below only shrinks it further for targets ≤ 1.
    let a_raw = Matrix::diagonal(&diag);
    let mut b_raw = Vec::with_capacity(m);
    for _ in 0..m {
        let mut bk = Matrix::zeros(n, n);
        for i in 1..n {
            for j in 0..i {
                bk[(i, j)] = rng.uniform_symmetric();
            }
        }
        b_raw.push(bk);
    }

    let input_mean = vec![0.0; m];
    let input_cov = Matrix::identity(m).scale(input_variance);
    let radius_at = |scale: f64| -> Result<f64> {
        let sys = BilinearSystem::new(
            a_raw.scale(scale),
            b_raw.iter().map(|bk| bk.scale(scale)).collect(),
            w_max,
            u_max,
        )?;
        let aug = augmented_matrix(&sys, &input_mean, &input_cov)?;
        tensor::spectral_radius(&aug, 48, 1e-6)
    };

    let rho_raw = radius_at(1.0)?;
    if rho_raw < 1e-12 {
        return Err(Error::CalibrationFailed(0));
    }
    // ρ scales as scale² here, so this bracket always straddles the target.
    let guess = (target_radius / rho_raw).sqrt();
    let mut lo = guess * 0.5;
    let mut hi = guess * 2.0;
    let cap = 200;
    let mut scale = guess;
    let mut converged = false;
    for _ in 0..cap {
        scale = 0.5 * (lo + hi);
        let rho = radius_at(scale)?;
        if (rho - target_radius).abs() <= 2e-4 {
            converged = true;
            break;
        }
        if rho > target_radius {
            hi = scale;
        } else {
            lo = scale;
        }
    }
    if !converged {
        return Err(Error::CalibrationFailed(cap));
    }
    BilinearSystem::new(
        a_raw.scale(scale),
        b_raw.iter().map(|bk| bk.scale(scale)).collect(),
        w_max,
        u_max,
    )
}

/// A simulated trajectory: `T + 1` states, `T` inputs, and (when recorded)
/// the `T` ground-truth noises.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    pub noises: Option<Vec<Vec<f64>>>,
    pub seed: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn regressor(&self, t: usize) -> Regressor {
        build_regressor(&self.states[t], &self.inputs[t])
    }

    /// Check the defining invariant against a system: recorded noises
    /// reproduce each transition exactly and respect both bounds.
    pub fn verify(&self, sys: &BilinearSystem) -> Result<()> {
        if self.states.len() != self.inputs.len() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} states for {} inputs",
                self.states.len(),
                self.inputs.len()
            )));
        }
        let theta = sys.theta_star();
        for t in 0..self.len() {
            if norm_inf(&self.inputs[t]) > sys.u_max + 1e-12 {
                return Err(Error::InvalidArgument {
                    arg: "inputs",
                    reason: format!("input bound violated at t = {t}"),
                });
            }
            if let Some(noises) = &self.noises {
                let w_norm = norm_inf(&noises[t]);
                if w_norm > sys.w_max + 1e-12 {
                    return Err(Error::NoiseBoundViolated { value: w_norm, bound: sys.w_max });
                }
                let z = self.regressor(t);
                let predicted = theta.matvec(&z.z)?;
                for i in 0..sys.state_dim() {
                    let gap = (self.states[t + 1][i] - predicted[i] - noises[t][i]).abs();
                    if gap > 1e-10 {
                        return Err(Error::InvalidArgument {
                            arg: "states",
                            reason: format!("transition residual {gap} at t = {t}, row {i}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}
