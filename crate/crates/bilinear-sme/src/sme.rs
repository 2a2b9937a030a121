//! Set-membership estimation: the feasible parameter set, membership
//! queries, the Chebyshev-center point estimate, and certified diameter
//! bounds.
//!
//! Each data pair `(z_t, x_{t+1})` constrains row `i` of the parameter
//! block to the slab `|z_t·θ_i − x_{t+1}[i]| ≤ w_max`, so the feasible set
//! factors into one polytope per output row and its squared diameter is the
//! sum of squared row diameters. Because the set can be unbounded at small
//! `T`, every row carries a prior box `‖θ‖_∞ ≤ R₀`; reported diameters are
//! relative to that prior and the report flags when the prior is still
//! active at a bounding-box optimum.
//!
//! The diameter of a polytope is approximated by a certified sandwich:
//! an upper bound from the axis-aligned bounding box and a lower bound from
//! directional widths over the axes plus random unit directions.

use crate::error::{Error, Result};
use crate::lp::{self, LpStatus, Sense};
use crate::model::Trajectory;
use crate::stochastic::StreamRng;
use crate::tensor::{dot, Matrix};
use crate::tol;
use serde::Serialize;

/// Halfspace `a·θ ≤ b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Feasible polytope for one output row of the parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct RowPolytope {
    index: usize,
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl RowPolytope {
    /// Prior box `‖θ‖_∞ ≤ r0` for one row, `2·dim` constraints.
    fn prior_box(index: usize, dim: usize, r0: f64) -> Self {
        let mut halfspaces = Vec::with_capacity(2 * dim);
        for j in 0..dim {
            let mut pos = vec![0.0; dim];
            pos[j] = 1.0;
            halfspaces.push(Halfspace { a: pos, b: r0 });
            let mut neg = vec![0.0; dim];
            neg[j] = -1.0;
            halfspaces.push(Halfspace { a: neg, b: r0 });
        }
        Self { index, dim, halfspaces }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    fn push_pair(&mut self, z: &[f64], target: f64, w_max: f64) {
        self.halfspaces.push(Halfspace { a: z.to_vec(), b: target + w_max });
        self.halfspaces.push(Halfspace { a: z.iter().map(|v| -v).collect(), b: -target + w_max });
    }

    pub fn contains(&self, theta_row: &[f64]) -> bool {
        self.halfspaces
            .iter()
            .all(|h| dot(&h.a, theta_row) <= h.b + tol::LP_FEASIBILITY)
    }

    fn constraint_parts(&self) -> (Matrix, Vec<f64>) {
        let k = self.halfspaces.len();
        let mut entries = Vec::with_capacity(k * self.dim);
        let mut bounds = Vec::with_capacity(k);
        for h in &self.halfspaces {
            entries.extend_from_slice(&h.a);
            bounds.push(h.b);
        }
        (Matrix::new(k, self.dim, entries).expect("halfspace dims are checked"), bounds)
    }

    /// Support value `max a·θ` over the row polytope.
    pub fn support(&self, direction: &[f64]) -> Result<f64> {
        let (a, b) = self.constraint_parts();
        self.support_with(&a, &b, direction)
    }

    fn support_with(&self, a: &Matrix, b: &[f64], direction: &[f64]) -> Result<f64> {
        let out = lp::solve_inequality_form(a, b, direction, Sense::Maximize)?;
        match out.status {
            LpStatus::Optimal => Ok(out.value.expect("optimal outcome has a value")),
            LpStatus::Infeasible => Err(Error::InfeasibleRow { row: self.index }),
            LpStatus::Unbounded => Err(Error::LpCertification(format!(
                "row {} is unbounded despite the prior box",
                self.index
            ))),
        }
    }

    /// Center and radius of the largest inscribed ball, by LP over
    /// `(θ, r)`: maximize `r` subject to `a·θ + ‖a‖₂ r ≤ b`.
    ///
    /// A negative optimal radius means no parameter satisfies every
    /// constraint, which signals a misspecified noise bound.
    pub fn chebyshev_center(&self) -> Result<(Vec<f64>, f64)> {
        let k = self.halfspaces.len();
        let d = self.dim;
        let mut entries = Vec::with_capacity(k * (d + 1));
        let mut bounds = Vec::with_capacity(k);
        for h in &self.halfspaces {
            entries.extend_from_slice(&h.a);
            entries.push(dot(&h.a, &h.a).sqrt());
            bounds.push(h.b);
        }
        let a = Matrix::new(k, d + 1, entries)?;
        let mut objective = vec![0.0; d + 1];
        objective[d] = 1.0;
        let out = lp::solve_inequality_form(&a, &bounds, &objective, Sense::Maximize)?;
        match out.status {
            LpStatus::Optimal => {
                let opt = out.optimizer.expect("optimal outcome has an optimizer");
                let radius = opt[d];
                if radius < -tol::LP_FEASIBILITY {
                    return Err(Error::InfeasibleRow { row: self.index });
                }
                Ok((opt[..d].to_vec(), radius.max(0.0)))
            }
            LpStatus::Infeasible => Err(Error::InfeasibleRow { row: self.index }),
            LpStatus::Unbounded => Err(Error::LpCertification(format!(
                "chebyshev LP unbounded for row {}",
                self.index
            ))),
        }
    }

    /// Remove halfspaces whose deletion leaves the region unchanged.
    ///
    /// Each constraint is tested by maximizing its normal over the set with
    /// the constraint itself removed; if the optimum stays within the bound
    /// the constraint is redundant. Geometric equality of the result is
    /// certified by re-checking all axis support values.
    pub fn prune_redundant(&self) -> Result<RowPolytope> {
        let mut axis_supports = Vec::with_capacity(2 * self.dim);
        for j in 0..self.dim {
            let mut dir = vec![0.0; self.dim];
            dir[j] = 1.0;
            axis_supports.push(self.support(&dir)?);
            dir[j] = -1.0;
            axis_supports.push(self.support(&dir)?);
        }

        let mut kept: Vec<Halfspace> = self.halfspaces.clone();
        let mut i = 0;
        while i < kept.len() {
            if kept.len() == 1 {
                break;
            }
            let candidate = kept[i].clone();
            let rest: Vec<Halfspace> =
                kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, h)| h.clone()).collect();
            let trial = RowPolytope { index: self.index, dim: self.dim, halfspaces: rest };
            let (a, b) = trial.constraint_parts();
            let out = lp::solve_inequality_form(&a, &b, &candidate.a, Sense::Maximize)?;
            let redundant = match out.status {
                LpStatus::Optimal => {
                    out.value.expect("optimal outcome has a value")
                        <= candidate.b + tol::LP_FEASIBILITY
                }
                // Dropping the constraint unbounds the region, so it is
                // essential; an infeasible remainder cannot happen for a
                // feasible row.
                _ => false,
            };
            if redundant {
                kept.remove(i);
            } else {
                i += 1;
            }
        }

        let pruned = RowPolytope { index: self.index, dim: self.dim, halfspaces: kept };
        for (slot, j) in (0..self.dim).flat_map(|j| [(0usize, j), (1usize, j)]).enumerate() {
            let (sign, axis) = (if j.0 == 0 { 1.0 } else { -1.0 }, j.1);
            let mut dir = vec![0.0; self.dim];
            dir[axis] = sign;
            let after = pruned.support(&dir)?;
            if (after - axis_supports[slot]).abs() > 1e-7 * (1.0 + axis_supports[slot].abs()) {
                return Err(Error::LpCertification(format!(
                    "pruning changed the support of row {} along axis {axis}",
                    self.index
                )));
            }
        }
        Ok(pruned)
    }
}

/// The feasible set after `T` samples: one polytope per output row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    rows: Vec<RowPolytope>,
    samples: usize,
    pub w_max: f64,
    pub prior_r0: f64,
}

/// Intersect the prior box with the data slabs of a trajectory.
pub fn build_feasible_set(data: &Trajectory, w_max: f64, prior_r0: f64) -> Result<FeasibleSet> {
    if !(w_max.is_finite() && w_max >= 0.0) || !(prior_r0.is_finite() && prior_r0 > 0.0) {
        return Err(Error::InvalidArgument {
            arg: "bounds",
            reason: format!("w_max = {w_max}, prior_r0 = {prior_r0}"),
        });
    }
    let n = data.states[0].len();
    let m = if data.inputs.is_empty() { 0 } else { data.inputs[0].len() };
    let dim = n + n * m;
    let mut set = FeasibleSet {
        rows: (0..n).map(|i| RowPolytope::prior_box(i, dim, prior_r0)).collect(),
        samples: 0,
        w_max,
        prior_r0,
    };
    for t in 0..data.len() {
        let z = data.regressor(t);
        set.append_sample(&z.z, &data.states[t + 1])?;
    }
    Ok(set)
}

impl FeasibleSet {
    /// Prior box only (the `T = 0` set).
    pub fn prior_only(n: usize, m: usize, w_max: f64, prior_r0: f64) -> Self {
        let dim = n + n * m;
        FeasibleSet {
            rows: (0..n).map(|i| RowPolytope::prior_box(i, dim, prior_r0)).collect(),
            samples: 0,
            w_max,
            prior_r0,
        }
    }

    pub fn rows(&self) -> &[RowPolytope] {
        &self.rows
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    pub fn state_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.rows[0].dim
    }

    /// Append one data pair, preserving existing constraint order.
    pub fn append_sample(&mut self, z: &[f64], x_next: &[f64]) -> Result<()> {
        if z.len() != self.dim() || x_next.len() != self.rows.len() {
            return Err(Error::DimensionMismatch(format!(
                "sample has |z| = {}, |x⁺| = {}, expected {} and {}",
                z.len(),
                x_next.len(),
                self.dim(),
                self.rows.len()
            )));
        }
        let w_max = self.w_max;
        for (i, row) in self.rows.iter_mut().enumerate() {
            row.push_pair(z, x_next[i], w_max);
        }
        self.samples += 1;
        Ok(())
    }

    /// True iff every row of `theta` satisfies every halfspace within the
    /// feasibility tolerance.
    pub fn contains(&self, theta: &Matrix) -> Result<bool> {
        if theta.rows() != self.rows.len() || theta.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "theta is {}x{}, feasible set wants {}x{}",
                theta.rows(),
                theta.cols(),
                self.rows.len(),
                self.dim()
            )));
        }
        Ok(self.rows.iter().enumerate().all(|(i, row)| row.contains(theta.row(i))))
    }

    /// Per-row Chebyshev centers stacked into a point estimate of the
    /// parameter block, with the per-row inscribed radii.
    pub fn chebyshev_centers(&self) -> Result<(Matrix, Vec<f64>)> {
        let mut entries = Vec::with_capacity(self.rows.len() * self.dim());
        let mut radii = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let (center, radius) = row.chebyshev_center()?;
            entries.extend_from_slice(&center);
            radii.push(radius);
        }
        Ok((Matrix::new(self.rows.len(), self.dim(), entries)?, radii))
    }

    /// Certified diameter interval. See the module docs for the method.
    /// Directions are drawn once from `rng` and shared across rows, so a
    /// fixed seed gives a fixed direction set.
    pub fn diameter(&self, n_directions: usize, rng: &mut StreamRng) -> Result<DiameterReport> {
        let d = self.dim();
        let directions: Vec<Vec<f64>> =
            (0..n_directions).map(|_| rng.unit_direction(d)).collect();
        let mut per_row = Vec::with_capacity(self.rows.len());
        let mut prior_active = false;
        for row in &self.rows {
            let (a, b) = row.constraint_parts();
            let mut widths_sq_sum = 0.0;
            let mut lower_row: f64 = 0.0;
            for j in 0..d {
                let mut dir = vec![0.0; d];
                dir[j] = 1.0;
                let hi = row.support_with(&a, &b, &dir)?;
                dir[j] = -1.0;
                let lo = -row.support_with(&a, &b, &dir)?;
                let width = (hi - lo).max(0.0);
                widths_sq_sum += width * width;
                lower_row = lower_row.max(width);
                if hi >= self.prior_r0 - 1e-7 || lo <= -self.prior_r0 + 1e-7 {
                    prior_active = true;
                }
            }
            let upper_row = widths_sq_sum.sqrt();
            for dir in &directions {
                let hi = row.support_with(&a, &b, dir)?;
                let neg: Vec<f64> = dir.iter().map(|v| -v).collect();
                let lo = -row.support_with(&a, &b, &neg)?;
                lower_row = lower_row.max((hi - lo).max(0.0));
            }
            // The bounding box also upper-bounds every directional width,
            // so roundoff is the only way lower can exceed upper.
            lower_row = lower_row.min(upper_row);
            per_row.push((lower_row, upper_row));
        }
        // Rows are independent, so the squared diameters add.
        let lower = per_row.iter().map(|(l, _)| l * l).sum::<f64>().sqrt();
        let upper = per_row.iter().map(|(_, u)| u * u).sum::<f64>().sqrt();
        Ok(DiameterReport {
            lower,
            upper,
            per_row,
            directions_used: n_directions + d,
            prior_active,
        })
    }

    /// JSON export of the halfspace description.
    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct RowJson<'a> {
            halfspaces: &'a [Halfspace],
        }
        #[derive(Serialize)]
        struct SetJson<'a> {
            rows: Vec<RowJson<'a>>,
        }
        let doc = SetJson {
            rows: self.rows.iter().map(|r| RowJson { halfspaces: &r.halfspaces }).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("feasible set serialization cannot fail")
    }
}

/// Certified interval for the feasible-set diameter.
#[derive(Debug, Clone, Serialize)]
pub struct DiameterReport {
    pub lower: f64,
    pub upper: f64,
    pub per_row: Vec<(f64, f64)>,
    pub directions_used: usize,
    /// True when a bounding-box optimum sits on the prior box, meaning the
    /// reported upper bound is still prior-dominated.
    pub prior_active: bool,
}

impl DiameterReport {
    /// CSV rows `T,row,lower,upper` for this report.
    pub fn to_csv(&self, samples: usize) -> String {
        let mut out = String::from("T,row,lower,upper\n");
        for (i, (lo, up)) in self.per_row.iter().enumerate() {
            out.push_str(&format!("{samples},{i},{lo},{up}\n"));
        }
        out
    }
}

/// Default number of random directions for the diameter sandwich.
pub fn default_directions(dim: usize) -> usize {
    64 * dim
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_regressor, generate_structured_system, BilinearSystem};
    use crate::stochastic::{simulate, BoundedSpec, StreamRng};

    fn unit_box_row(dim: usize) -> RowPolytope {
        RowPolytope::prior_box(0, dim, 1.0)
    }

    #[test]
    fn prior_only_diameter_is_box_diagonal() {
        let set = FeasibleSet::prior_only(2, 1, 1.0, 10.0);
        let mut rng = StreamRng::new(1, 0);
        let report = set.diameter(8, &mut rng).unwrap();
        let d = set.dim() as f64;
        let expect = 2.0 * 10.0 * (2.0 * d).sqrt();
        assert!((report.upper - expect).abs() < 1e-6, "upper = {}", report.upper);
        assert!(report.prior_active);
        assert!(report.lower <= report.upper);
        assert!(report.lower >= 2.0 * 10.0 - 1e-6);
    }

    #[test]
    fn hand_built_row_polytope_is_unit_box() {
        // n = 1, m = 1: z₁ = [1,0] with x₂ = 0 and z₂ = [0,1] with x₃ = 0,
        // w_max = 1, R₀ = 10 intersect to the unit box.
        let mut set = FeasibleSet::prior_only(1, 1, 1.0, 10.0);
        set.append_sample(&[1.0, 0.0], &[0.0]).unwrap();
        set.append_sample(&[0.0, 1.0], &[0.0]).unwrap();
        let row = &set.rows()[0];
        for j in 0..2 {
            let mut dir = vec![0.0; 2];
            dir[j] = 1.0;
            assert!((row.support(&dir).unwrap() - 1.0).abs() < 1e-9);
            dir[j] = -1.0;
            assert!((row.support(&dir).unwrap() - 1.0).abs() < 1e-9);
        }
        let (center, radius) = row.chebyshev_center().unwrap();
        assert!(center.iter().all(|c| c.abs() < 1e-9));
        assert!((radius - 1.0).abs() < 1e-9);
    }

    #[test]
    fn chebyshev_center_translated_box() {
        // Box [0,2] × [-1,1] has center (1, 0) and radius 1.
        let mut row = unit_box_row(2);
        row.halfspaces.clear();
        row.halfspaces.push(Halfspace { a: vec![1.0, 0.0], b: 2.0 });
        row.halfspaces.push(Halfspace { a: vec![-1.0, 0.0], b: 0.0 });
        row.halfspaces.push(Halfspace { a: vec![0.0, 1.0], b: 1.0 });
        row.halfspaces.push(Halfspace { a: vec![0.0, -1.0], b: 1.0 });
        let (center, radius) = row.chebyshev_center().unwrap();
        assert!((center[0] - 1.0).abs() < 1e-9);
        assert!(center[1].abs() < 1e-9);
        assert!((radius - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_row_is_signalled() {
        let mut set = FeasibleSet::prior_only(1, 0, 0.1, 10.0);
        // Two contradictory slabs: z = [1], targets 0 and 1 with w_max 0.1.
        set.append_sample(&[1.0], &[0.0]).unwrap();
        set.append_sample(&[1.0], &[1.0]).unwrap();
        let err = set.rows()[0].chebyshev_center();
        assert!(matches!(err, Err(Error::InfeasibleRow { row: 0 })));
        let err = set.diameter(4, &mut StreamRng::new(1, 0));
        assert!(matches!(err, Err(Error::InfeasibleRow { row: 0 })));
    }

    fn default_instance() -> (BilinearSystem, BoundedSpec, BoundedSpec) {
        let input = BoundedSpec::standard_truncated_gaussian(2);
        let noise = BoundedSpec::standard_truncated_laplace(3);
        let sys =
            generate_structured_system(3, 2, 0.98, input.variance(), 1.0, 1.0, 1234).unwrap();
        (sys, input, noise)
    }

    #[test]
    fn truth_stays_feasible() {
        let (sys, input, noise) = default_instance();
        let theta = sys.theta_star();
        for rep in 0..5 {
            let mut rng = StreamRng::new(55, rep);
            let traj = simulate(&sys, &[0.0; 3], 300, &input, &noise, &mut rng).unwrap();
            let set = build_feasible_set(&traj, sys.w_max, 10.0).unwrap();
            assert!(set.contains(&theta).unwrap(), "rep {rep}");
        }
    }

    #[test]
    fn violating_offset_is_rejected() {
        let (sys, input, noise) = default_instance();
        let mut rng = StreamRng::new(56, 0);
        let traj = simulate(&sys, &[0.0; 3], 200, &input, &noise, &mut rng).unwrap();
        let set = build_feasible_set(&traj, sys.w_max, 10.0).unwrap();
        // Push θ★ along e₁ far enough that some constraint must break:
        // an offset of 3 w_max / min_t |z_t·e₁| violates that sample's slab.
        let mut min_z1 = f64::INFINITY;
        for t in 0..traj.len() {
            let z1 = traj.regressor(t).z[0].abs();
            if z1 > 1e-6 {
                min_z1 = min_z1.min(z1);
            }
        }
        let offset = 3.0 * sys.w_max / min_z1;
        let mut theta = sys.theta_star();
        theta[(0, 0)] += offset;
        assert!(!set.contains(&theta).unwrap());
    }

    #[test]
    fn empty_set_accepts_anything_in_prior() {
        let set = FeasibleSet::prior_only(2, 1, 1.0, 5.0);
        let theta = Matrix::new(2, 4, vec![4.9; 8]).unwrap();
        assert!(set.contains(&theta).unwrap());
        let theta = Matrix::new(2, 4, vec![5.2; 8]).unwrap();
        assert!(!set.contains(&theta).unwrap());
    }

    #[test]
    fn diameter_shrinks_with_more_data() {
        let (sys, input, noise) = default_instance();
        let mut rng = StreamRng::new(57, 0);
        let traj = simulate(&sys, &[0.0; 3], 400, &input, &noise, &mut rng).unwrap();
        let mut uppers = Vec::new();
        for t_check in [50usize, 200, 400] {
            let prefix = Trajectory {
                states: traj.states[..=t_check].to_vec(),
                inputs: traj.inputs[..t_check].to_vec(),
                noises: None,
                seed: traj.seed,
            };
            let set = build_feasible_set(&prefix, sys.w_max, 10.0).unwrap();
            let report = set.diameter(16, &mut StreamRng::new(58, 0)).unwrap();
            uppers.push(report.upper);
        }
        assert!(uppers[1] <= uppers[0] + 1e-9);
        assert!(uppers[2] <= uppers[1] + 1e-9);
    }

    #[test]
    fn near_noiseless_set_is_tiny() {
        // Exact data with d independent regressors and w_max = 1e-6: the
        // instance constant c is the same LP bound evaluated at w_max = 1,
        // by linearity of the slab geometry in w_max.
        let w_small = 1e-6;
        let n = 1;
        let m = 1;
        let theta = Matrix::new(1, 2, vec![0.4, 0.3]).unwrap();
        let samples = vec![
            (build_regressor(&[1.0], &[0.2]).z, 0.0),
            (build_regressor(&[0.7], &[-0.9]).z, 0.0),
        ];
        let build = |w: f64| -> FeasibleSet {
            let mut set = FeasibleSet::prior_only(n, m, w, 10.0);
            for (z, _) in &samples {
                let x_next = [dot(theta.row(0), z)];
                set.append_sample(z, &x_next).unwrap();
            }
            set
        };
        let mut rng = StreamRng::new(59, 0);
        let c = build(1.0).diameter(4, &mut rng).unwrap().upper;
        let report = build(w_small).diameter(4, &mut StreamRng::new(59, 0)).unwrap();
        assert!(
            report.upper <= c * w_small * (1.0 + 1e-6) + 1e-12,
            "upper = {}, c = {c}",
            report.upper
        );
        assert!(!report.prior_active);
    }

    #[test]
    fn prune_removes_duplicates_and_slack() {
        let mut row = unit_box_row(2);
        let before = row.halfspaces.len();
        // Duplicate of an existing face plus a slack constraint θ₁ ≤ 5.
        row.halfspaces.push(Halfspace { a: vec![1.0, 0.0], b: 1.0 });
        row.halfspaces.push(Halfspace { a: vec![1.0, 0.0], b: 5.0 });
        let pruned = row.prune_redundant().unwrap();
        assert_eq!(pruned.halfspaces().len(), before);
        for h in pruned.halfspaces() {
            assert!(h.b <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn prune_preserves_diameter() {
        let (sys, input, noise) = default_instance();
        let mut rng = StreamRng::new(60, 0);
        let traj = simulate(&sys, &[0.0; 3], 40, &input, &noise, &mut rng).unwrap();
        let set = build_feasible_set(&traj, sys.w_max, 10.0).unwrap();
        let row = &set.rows()[0];
        let pruned = row.prune_redundant().unwrap();
        assert!(pruned.halfspaces().len() < row.halfspaces().len());
        for j in 0..set.dim() {
            let mut dir = vec![0.0; set.dim()];
            dir[j] = 1.0;
            let before = row.support(&dir).unwrap();
            let after = pruned.support(&dir).unwrap();
            assert!((before - after).abs() < 1e-8);
        }
    }

    #[test]
    fn feasible_set_json_schema() {
        let set = FeasibleSet::prior_only(1, 0, 1.0, 2.0);
        let json: serde_json::Value = serde_json::from_str(&set.to_json_string()).unwrap();
        let rows = json["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 1);
        let hs = rows[0]["halfspaces"].as_array().unwrap();
        assert_eq!(hs.len(), 2);
        assert!(hs[0]["a"].is_array());
        assert!(hs[0]["b"].is_number());
    }
}
