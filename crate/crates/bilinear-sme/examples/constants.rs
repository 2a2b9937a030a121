//! Excitation and boundary-mass constants: closed-form lower bounds,
//! a grid-optimized combination, and Monte-Carlo estimates.
//!
//!     cargo run --release --example constants

use bilinear_sme::complexity::{
    empirical_small_ball, estimate_boundary_mass, optimize_small_ball, small_ball_constants,
};
use bilinear_sme::model::generate_structured_system;
use bilinear_sme::stochastic::{BoundedSpec, StreamRng};

fn main() {
    let input = BoundedSpec::standard_truncated_gaussian(2);
    let noise = BoundedSpec::standard_truncated_laplace(3);
    let sigma_u = input.variance().sqrt();
    let sigma_w = noise.variance().sqrt();
    println!("sigma_u = {sigma_u:.4}, sigma_w = {sigma_w:.4}");

    let c = small_ball_constants(sigma_u, sigma_w, 1.0, 2, sigma_w / 2.0, sigma_u.min(1.0) / 2.0)
        .unwrap();
    println!("at the midpoint thresholds: k_z = {:.4}, p_z = {:.3e}", c.k_z, c.p_z);
    let (best, objective) = optimize_small_ball(sigma_u, sigma_w, 1.0, 2, 64).unwrap();
    println!(
        "optimized k_z² p_z³: k0 = {:.3}, k1 = {:.3}, k_z = {:.4}, p_z = {:.3e} (objective {objective:.3e})",
        best.k0, best.k1, best.k_z, best.p_z
    );

    // The empirical frequency of |v·z| ≥ k_z sits far above the bound.
    let sys = generate_structured_system(3, 2, 0.98, input.variance(), 1.0, 1.0, 7).unwrap();
    let mut rng = StreamRng::new(5, 0);
    let p_hat = empirical_small_ball(&sys, &input, &noise, c.k_z, 200, 51, 20, &mut rng).unwrap();
    println!("empirical small-ball frequency at k_z: {p_hat:.4} (bound {:.3e})", c.p_z);

    // Boundary mass of the truncated Laplace noise: ratio P(w ≥ 1−ε)/ε.
    let mut rng = StreamRng::new(6, 0);
    let est = estimate_boundary_mass(&noise, &[0.05, 0.1, 0.2, 0.5], 200_000, &mut rng).unwrap();
    println!("{:>6} {:>10} {:>10}", "eps", "estimate", "se");
    for cell in &est.per_epsilon {
        println!("{:>6} {:>10.5} {:>10.5}", cell.epsilon, cell.estimate, cell.se);
    }
    println!("c_w_hat = {:.5}", est.c_w_hat);
}
