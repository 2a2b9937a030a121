//! Dense linear programming over halfspace-described polytopes.
//!
//! Problems arrive in inequality form: optimize `c·θ` subject to `A θ ≤ b`
//! with free variables. The feasible sets in this crate have thousands of
//! constraints but only a handful of variables, so the two-phase simplex
//! runs on the standard-form dual (`d` equations, `k` nonnegative
//! variables): the working tableau is `(d+1) x (k+d+1)` instead of
//! `(k+1) x (k+d+1)`. The primal optimizer is recovered from the simplex
//! multipliers of the optimal dual basis and re-certified against every
//! original constraint before it is returned, so the small-tableau route
//! cannot silently report a wrong optimum.
//!
//! Anti-cycling: pivoting starts with Dantzig's most-negative rule and
//! switches permanently to Bland's rule as soon as the objective stalls,
//! which preserves the finite-termination guarantee.

use crate::error::{Error, Result};
use crate::tensor::{dot, Matrix};
use crate::tol;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Linear program over the region `{θ : constraints·θ ≤ bounds}`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub constraints: Matrix,
    pub bounds: Vec<f64>,
    pub objective: Vec<f64>,
    pub sense: Sense,
}

impl LinearProgram {
    pub fn new(constraints: Matrix, bounds: Vec<f64>, objective: Vec<f64>, sense: Sense) -> Result<Self> {
        if constraints.rows() == 0 || constraints.cols() == 0 {
            return Err(Error::InvalidArgument {
                arg: "constraints",
                reason: "need at least one constraint and one variable".into(),
            });
        }
        if bounds.len() != constraints.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} bounds for {} constraints",
                bounds.len(),
                constraints.rows()
            )));
        }
        if objective.len() != constraints.cols() {
            return Err(Error::DimensionMismatch(format!(
                "objective length {} for {} variables",
                objective.len(),
                constraints.cols()
            )));
        }
        if bounds.iter().chain(objective.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("linear program data"));
        }
        Ok(Self { constraints, bounds, objective, sense })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub optimizer: Option<Vec<f64>>,
    pub value: Option<f64>,
}

impl LpOutcome {
    fn of_status(status: LpStatus) -> Self {
        Self { status, optimizer: None, value: None }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_inequality_form(&lp.constraints, &lp.bounds, &lp.objective, lp.sense)
}

/// Solve `optimize c·θ s.t. a·θ ≤ b` without constructing a [`LinearProgram`].
/// Callers that query many objectives over one constraint set use this form.
pub fn solve_inequality_form(a: &Matrix, b: &[f64], c: &[f64], sense: Sense) -> Result<LpOutcome> {
    let c_max: Vec<f64> = match sense {
        Sense::Maximize => c.to_vec(),
        Sense::Minimize => c.iter().map(|x| -x).collect(),
    };
    let mut outcome = solve_max(a, b, &c_max)?;
    if sense == Sense::Minimize {
        outcome.value = outcome.value.map(|v| -v);
    }
    Ok(outcome)
}

/// Maximize `c·θ` over `{θ : a θ ≤ b}` via the dual standard form.
fn solve_max(a: &Matrix, b: &[f64], c: &[f64]) -> Result<LpOutcome> {
    match dual_simplex(a, b, c)? {
        DualOutcome::Optimal { theta, value } => {
            certify(a, b, c, &theta, value)?;
            Ok(LpOutcome { status: LpStatus::Optimal, optimizer: Some(theta), value: Some(value) })
        }
        // Dual unbounded below means no θ satisfies the constraints.
        DualOutcome::Unbounded => Ok(LpOutcome::of_status(LpStatus::Infeasible)),
        // Dual infeasible: the primal is unbounded if it admits any feasible
        // point, otherwise infeasible. Probe with the zero objective, whose
        // dual is feasible (y = 0) and unbounded exactly when the primal
        // region is empty (Farkas).
        DualOutcome::Infeasible => {
            let zero = vec![0.0; c.len()];
            match dual_simplex(a, b, &zero)? {
                DualOutcome::Optimal { .. } => Ok(LpOutcome::of_status(LpStatus::Unbounded)),
                DualOutcome::Unbounded => Ok(LpOutcome::of_status(LpStatus::Infeasible)),
                DualOutcome::Infeasible => Err(Error::LpCertification(
                    "feasibility probe returned dual-infeasible".into(),
                )),
            }
        }
    }
}

fn certify(a: &Matrix, b: &[f64], c: &[f64], theta: &[f64], value: f64) -> Result<()> {
    let scale = 1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..a.rows() {
        let lhs = dot(a.row(i), theta);
        if lhs > b[i] + tol::LP_FEASIBILITY * scale {
            return Err(Error::LpCertification(format!(
                "constraint {i} violated: {lhs} > {}",
                b[i]
            )));
        }
    }
    let primal_value = dot(c, theta);
    if (primal_value - value).abs() > tol::EQUALITY * (1.0 + value.abs()) {
        return Err(Error::LpCertification(format!(
            "objective mismatch: c·θ = {primal_value}, dual value = {value}"
        )));
    }
    Ok(())
}

enum DualOutcome {
    Optimal { theta: Vec<f64>, value: f64 },
    Unbounded,
    Infeasible,
}

/// Two-phase simplex on `min b·y s.t. Aᵀ y = c, y ≥ 0`.
///
/// Column layout: `0..k` are the dual variables, `k..k+d` the artificials,
/// column `k+d` the right-hand side. Rows whose rhs starts negative are
/// negated up front (`row_sign` records this so the multipliers can be
/// mapped back). Redundant equations whose artificial cannot be driven out
/// keep an all-zero real part forever and are simply never chosen as pivot
/// rows.
fn dual_simplex(a: &Matrix, b: &[f64], c: &[f64]) -> Result<DualOutcome> {
    let k = a.rows();
    let d = a.cols();
    let width = k + d + 1;
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut row_sign = vec![1.0f64; d];
    for i in 0..d {
        let mut row = vec![0.0; width];
        let sign = if c[i] < 0.0 { -1.0 } else { 1.0 };
        row_sign[i] = sign;
        for j in 0..k {
            row[j] = sign * a[(j, i)];
        }
        row[k + i] = 1.0;
        row[k + d] = sign * c[i];
        tab.push(row);
    }
    let mut basis: Vec<usize> = (k..k + d).collect();

    // Phase 1: minimize the artificial sum.
    let phase1_cost: Vec<f64> = (0..k + d).map(|j| if j < k { 0.0 } else { 1.0 }).collect();
    run_phase(&mut tab, &mut basis, &phase1_cost, k, true)?;
    let infeasibility: f64 = tab
        .iter()
        .enumerate()
        .filter(|(i, _)| basis[*i] >= k)
        .map(|(_, row)| row[k + d])
        .sum();
    let scale = 1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if infeasibility > 1e-7 * scale {
        return Ok(DualOutcome::Infeasible);
    }
    drive_out_artificials(&mut tab, &mut basis, k);

    // Phase 2: minimize the true dual objective b·y.
    let mut phase2_cost = vec![0.0; k + d];
    phase2_cost[..k].copy_from_slice(b);
    let bounded = run_phase(&mut tab, &mut basis, &phase2_cost, k, false)?;
    if !bounded {
        return Ok(DualOutcome::Unbounded);
    }

    // Simplex multipliers from the artificial columns give the primal point.
    let mut theta = vec![0.0; d];
    for i in 0..d {
        let mut pi = 0.0;
        for (r, row) in tab.iter().enumerate() {
            let cost = if basis[r] < k { b[basis[r]] } else { 0.0 };
            pi += cost * row[k + i];
        }
        theta[i] = row_sign[i] * pi;
    }
    let mut value = 0.0;
    for (r, row) in tab.iter().enumerate() {
        if basis[r] < k {
            value += b[basis[r]] * row[k + d];
        }
    }
    Ok(DualOutcome::Optimal { theta, value })
}

/// Run simplex iterations for one phase. Returns `false` when the phase-2
/// objective is unbounded below. `phase1` allows artificial columns to stay
/// basic; in phase 2 they are barred from entering.
fn run_phase(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    k: usize,
    phase1: bool,
) -> Result<bool> {
    let d = tab.len();
    let width = k + d + 1;
    let enter_limit = if phase1 { k + d } else { k };
    // Reduced costs, maintained under pivots.
    let mut rc: Vec<f64> = (0..enter_limit).map(|j| cost[j]).collect();
    let mut objective = 0.0;
    for (i, row) in tab.iter().enumerate() {
        let cb = cost[basis[i]];
        if cb != 0.0 {
            for j in 0..enter_limit {
                rc[j] -= cb * row[j];
            }
            objective += cb * row[width - 1];
        }
    }

    let cap = 50 * (k + d) + 5_000;
    let mut bland = false;
    let mut stall = 0usize;
    for iteration in 0..=cap {
        if iteration == cap {
            return Err(Error::LpIterationLimit { cap, iterations: iteration });
        }
        // Entering column.
        let mut entering = None;
        if bland {
            for (j, r) in rc.iter().enumerate() {
                if *r < -tol::LP_PIVOT {
                    entering = Some(j);
                    break;
                }
            }
        } else {
            let mut best = -tol::LP_PIVOT;
            for (j, r) in rc.iter().enumerate() {
                if *r < best {
                    best = *r;
                    entering = Some(j);
                }
            }
        }
        let Some(jc) = entering else {
            return Ok(true);
        };

        // Ratio test; ties break toward the smallest basis index.
        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in tab.iter().enumerate() {
            let aij = row[jc];
            if aij <= tol::LP_PIVOT {
                continue;
            }
            let ratio = row[width - 1].max(0.0) / aij;
            match leave {
                None => leave = Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - 1e-12 || (ratio < br + 1e-12 && basis[i] < basis[bi]) {
                        leave = Some((i, ratio));
                    }
                }
            }
        }
        let Some((ir, _)) = leave else {
            return Ok(false);
        };

        pivot(tab, basis, &mut rc, ir, jc, enter_limit);
        let new_objective = {
            let mut z = 0.0;
            for (i, row) in tab.iter().enumerate() {
                z += cost[basis[i]] * row[width - 1];
            }
            z
        };
        if new_objective < objective - 1e-12 * (1.0 + objective.abs()) {
            stall = 0;
        } else {
            stall += 1;
            if stall > 50 {
                bland = true;
            }
        }
        objective = new_objective;
    }
    unreachable!()
}

fn pivot(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    rc: &mut [f64],
    ir: usize,
    jc: usize,
    enter_limit: usize,
) {
    let width = tab[0].len();
    let pivot_val = tab[ir][jc];
    for x in tab[ir].iter_mut() {
        *x /= pivot_val;
    }
    for i in 0..tab.len() {
        if i == ir {
            continue;
        }
        let factor = tab[i][jc];
        if factor == 0.0 {
            continue;
        }
        for j in 0..width {
            tab[i][j] -= factor * tab[ir][j];
        }
        tab[i][jc] = 0.0;
        // Guard the invariant rhs >= 0 against roundoff.
        if tab[i][width - 1] < 0.0 && tab[i][width - 1] > -1e-11 {
            tab[i][width - 1] = 0.0;
        }
    }
    let factor = rc[jc];
    if factor != 0.0 {
        for j in 0..enter_limit {
            rc[j] -= factor * tab[ir][j];
        }
        rc[jc] = 0.0;
    }
    basis[ir] = jc;
}

/// Replace basic artificials at zero by real variables where possible.
fn drive_out_artificials(tab: &mut [Vec<f64>], basis: &mut [usize], k: usize) {
    let d = tab.len();
    for i in 0..d {
        if basis[i] < k {
            continue;
        }
        let jc = (0..k).find(|&j| tab[i][j].abs() > 1e-9);
        if let Some(jc) = jc {
            let width = tab[0].len();
            let pivot_val = tab[i][jc];
            for x in tab[i].iter_mut() {
                *x /= pivot_val;
            }
            for r in 0..d {
                if r == i {
                    continue;
                }
                let factor = tab[r][jc];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..width {
                    tab[r][j] -= factor * tab[i][j];
                }
                tab[r][jc] = 0.0;
            }
            basis[i] = jc;
        }
        // Otherwise the equation is redundant: the row keeps an all-zero
        // real part under further pivots and is never selected again.
    }
}
