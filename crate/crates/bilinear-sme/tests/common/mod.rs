//! Brute-force oracles for the integration suites. Everything here is
//! deliberately independent of the library's LP and sampling code paths:
//! vertices come from enumerating constraint subsets, integrals from
//! composite Simpson quadrature.
//!
//! Each test binary compiles its own copy and uses a subset.
#![allow(dead_code, clippy::needless_range_loop)]

use bilinear_sme::stochastic::StreamRng;
use bilinear_sme::tensor::{dot, lu_solve, Matrix};

pub struct HalfspacePolytope {
    pub constraints: Matrix,
    pub bounds: Vec<f64>,
}

/// Random bounded, nonempty polytope: a box of random half-width plus
/// random cuts that all keep a witness point interior.
pub fn random_polytope(dim: usize, extra_cuts: usize, rng: &mut StreamRng) -> HalfspacePolytope {
    let half_width = 0.5 + 2.5 * rng.uniform01();
    let witness: Vec<f64> =
        (0..dim).map(|_| 0.6 * half_width * rng.uniform_symmetric()).collect();
    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    for j in 0..dim {
        let mut pos = vec![0.0; dim];
        pos[j] = 1.0;
        rows.extend_from_slice(&pos);
        bounds.push(half_width);
        let mut neg = vec![0.0; dim];
        neg[j] = -1.0;
        rows.extend_from_slice(&neg);
        bounds.push(half_width);
    }
    for _ in 0..extra_cuts {
        let dir = rng.unit_direction(dim);
        let margin = 0.05 + 0.8 * rng.uniform01() * half_width;
        bounds.push(dot(&dir, &witness) + margin);
        rows.extend_from_slice(&dir);
    }
    let k = bounds.len();
    HalfspacePolytope { constraints: Matrix::new(k, dim, rows).unwrap(), bounds }
}

/// All vertices by enumerating `dim`-subsets of active constraints.
pub fn enumerate_vertices(poly: &HalfspacePolytope) -> Vec<Vec<f64>> {
    let k = poly.constraints.rows();
    let d = poly.constraints.cols();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut subset = vec![0usize; d];
    enumerate_subsets(k, d, 0, 0, &mut subset, &mut |s| {
        let mut entries = Vec::with_capacity(d * d);
        let mut rhs = Vec::with_capacity(d);
        for &i in s.iter() {
            entries.extend_from_slice(poly.constraints.row(i));
            rhs.push(poly.bounds[i]);
        }
        let system = Matrix::new(d, d, entries).unwrap();
        let Ok(x) = lu_solve(&system, &rhs) else { return };
        for i in 0..k {
            if dot(poly.constraints.row(i), &x) > poly.bounds[i] + 1e-7 {
                return;
            }
        }
        if !vertices.iter().any(|v| {
            v.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max) < 1e-8
        }) {
            vertices.push(x);
        }
    });
    vertices
}

fn enumerate_subsets(
    k: usize,
    d: usize,
    start: usize,
    depth: usize,
    subset: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == d {
        visit(subset);
        return;
    }
    for i in start..k {
        subset[depth] = i;
        enumerate_subsets(k, d, i + 1, depth + 1, subset, visit);
    }
}

/// Brute-force LP optimum: the best vertex.
pub fn vertex_lp_max(poly: &HalfspacePolytope, objective: &[f64]) -> f64 {
    enumerate_vertices(poly)
        .iter()
        .map(|v| dot(objective, v))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Brute-force diameter: the widest vertex pair.
pub fn vertex_diameter(poly: &HalfspacePolytope) -> f64 {
    let vertices = enumerate_vertices(poly);
    let mut best = 0.0f64;
    for (i, a) in vertices.iter().enumerate() {
        for b in vertices.iter().skip(i + 1) {
            let dist = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            best = best.max(dist);
        }
    }
    best
}

/// Axis-aligned bounding-box diagonal from the vertex set.
pub fn vertex_bbox_diagonal(poly: &HalfspacePolytope) -> f64 {
    let vertices = enumerate_vertices(poly);
    let d = poly.constraints.cols();
    let mut sum = 0.0;
    for j in 0..d {
        let hi = vertices.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max);
        let lo = vertices.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min);
        sum += (hi - lo) * (hi - lo);
    }
    sum.sqrt()
}

/// Chebyshev radius by dense grid search over the vertex bounding box:
/// the best interior margin `min_i (b_i − a_i·x)/‖a_i‖` over grid points.
pub fn grid_chebyshev_radius(poly: &HalfspacePolytope, cells: usize) -> f64 {
    let vertices = enumerate_vertices(poly);
    let d = poly.constraints.cols();
    assert_eq!(d, 2, "grid oracle is two-dimensional");
    let bound = |j: usize, pick_max: bool| {
        vertices
            .iter()
            .map(|v| v[j])
            .fold(if pick_max { f64::NEG_INFINITY } else { f64::INFINITY }, |acc, x| {
                if pick_max {
                    acc.max(x)
                } else {
                    acc.min(x)
                }
            })
    };
    let (x_lo, x_hi) = (bound(0, false), bound(0, true));
    let (y_lo, y_hi) = (bound(1, false), bound(1, true));
    let norms: Vec<f64> =
        (0..poly.constraints.rows()).map(|i| dot(poly.constraints.row(i), poly.constraints.row(i)).sqrt()).collect();
    let mut best = f64::NEG_INFINITY;
    for ix in 0..=cells {
        for iy in 0..=cells {
            let x = x_lo + (x_hi - x_lo) * ix as f64 / cells as f64;
            let y = y_lo + (y_hi - y_lo) * iy as f64 / cells as f64;
            let point = [x, y];
            let mut margin = f64::INFINITY;
            for i in 0..poly.constraints.rows() {
                let slack = poly.bounds[i] - dot(poly.constraints.row(i), &point);
                if norms[i] > 1e-12 {
                    margin = margin.min(slack / norms[i]);
                }
            }
            best = best.max(margin);
        }
    }
    best
}

/// Composite Simpson quadrature with `2n` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let steps = 2 * n;
    let h = (b - a) / steps as f64;
    let mut sum = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

/// Variance of the standard normal conditioned on `[-bound, bound]`.
pub fn truncated_normal_variance(bound: f64) -> f64 {
    let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mass = simpson(pdf, -bound, bound, 4000);
    simpson(|x| x * x * pdf(x), -bound, bound, 4000) / mass
}

/// `P(X ≥ threshold)` for the standard Laplace conditioned on `[-bound, bound]`.
pub fn truncated_laplace_tail(threshold: f64, bound: f64) -> f64 {
    let pdf = |x: f64| 0.5 * (-x.abs()).exp();
    let mass = simpson(pdf, -bound, bound, 4000);
    simpson(pdf, threshold, bound, 4000) / mass
}
