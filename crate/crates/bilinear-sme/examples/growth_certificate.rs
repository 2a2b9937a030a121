#![allow(clippy::needless_range_loop)]

//! Certify polynomial mean-square growth of the state and cross-check the
//! covariance recursion against a Monte-Carlo estimate.
//!
//!     cargo run --release --example growth_certificate

use bilinear_sme::complexity::covariance_recursion;
use bilinear_sme::model::{generate_structured_system, BilinearSystem};
use bilinear_sme::stochastic::{simulate, BoundedSpec, StreamRng};
use bilinear_sme::tensor::Matrix;

fn main() {
    let input = BoundedSpec::standard_truncated_gaussian(2);
    let noise = BoundedSpec::standard_truncated_laplace(3);
    let sys = generate_structured_system(3, 2, 0.98, input.variance(), 1.0, 1.0, 7).unwrap();
    let input_cov = Matrix::identity(2).scale(input.variance());
    let sigma_w = Matrix::identity(3).scale(noise.variance());
    let cert =
        covariance_recursion(&sys, &[0.0; 2], &input_cov, &sigma_w, &Matrix::zeros(3, 3), 200)
            .unwrap();
    println!(
        "rho = {:.4}, growth exponent = {} (conservative cap {}), constant = {:.4}",
        cert.rho, cert.growth_exponent, cert.growth_exponent_conservative, cert.growth_constant
    );

    // Monte-Carlo cross-check of E‖x_t‖² at a few horizons.
    let rollouts = 2000;
    let horizon = 30;
    let mut sums = vec![0.0; horizon + 1];
    for k in 0..rollouts {
        let mut rng = StreamRng::new(77, k as u64);
        let traj = simulate(&sys, &[0.0; 3], horizon, &input, &noise, &mut rng).unwrap();
        for t in 0..=horizon {
            sums[t] += traj.states[t].iter().map(|x| x * x).sum::<f64>();
        }
    }
    println!("{:>4} {:>12} {:>12}", "t", "tr(Sigma_t)", "MC mean");
    for t in [0usize, 5, 10, 20, 30] {
        println!("{t:>4} {:>12.5} {:>12.5}", cert.sigma_traces[t], sums[t] / rollouts as f64);
    }

    // A marginally stable scalar random walk grows exactly linearly.
    let walk = BilinearSystem::new(
        Matrix::new(1, 1, vec![1.0]).unwrap(),
        vec![Matrix::zeros(1, 1)],
        1.0,
        1.0,
    )
    .unwrap();
    let cert = covariance_recursion(
        &walk,
        &[0.0],
        &Matrix::new(1, 1, vec![0.25]).unwrap(),
        &Matrix::new(1, 1, vec![0.3]).unwrap(),
        &Matrix::zeros(1, 1),
        200,
    )
    .unwrap();
    println!(
        "random walk: exponent = {}, tr(Sigma_200) = {:.1} (0.3 per step)",
        cert.growth_exponent,
        cert.sigma_traces[200]
    );
}
