//! Build the feasible parameter set from a trajectory and watch its
//! certified diameter contract as samples accumulate.
//!
//!     cargo run --release --example feasible_set

use bilinear_sme::model::generate_structured_system;
use bilinear_sme::sme::FeasibleSet;
use bilinear_sme::stochastic::{simulate, BoundedSpec, StreamRng};

fn main() {
    let input = BoundedSpec::standard_truncated_gaussian(2);
    let noise = BoundedSpec::standard_truncated_laplace(3);
    let sys = generate_structured_system(3, 2, 0.98, input.variance(), 1.0, 1.0, 7).unwrap();
    let theta_star = sys.theta_star();

    let horizon = 2000;
    let mut rng = StreamRng::new(42, 0);
    let traj = simulate(&sys, &[0.0; 3], horizon, &input, &noise, &mut rng).unwrap();

    let mut set = FeasibleSet::prior_only(3, 2, sys.w_max, 10.0);
    let mut appended = 0;
    println!("{:>6} {:>12} {:>12} {:>10} {:>6}", "T", "lower", "upper", "cheb_err", "truth");
    for t_check in [0usize, 100, 200, 500, 1000, 2000] {
        while appended < t_check {
            let z = traj.regressor(appended);
            set.append_sample(&z.z, &traj.states[appended + 1]).unwrap();
            appended += 1;
        }
        // A fresh stream replays the same 32 directions at every T, so the
        // bounds are comparable across the grid.
        let mut dir_rng = StreamRng::new(43, 0);
        let report = set.diameter(32, &mut dir_rng).unwrap();
        let (centers, _) = set.chebyshev_centers().unwrap();
        let err = centers.sub(&theta_star).unwrap().frobenius_norm();
        let truth = set.contains(&theta_star).unwrap();
        println!(
            "{t_check:>6} {:>12.5} {:>12.5} {:>10.5} {truth:>6}{}",
            report.lower,
            report.upper,
            err,
            if report.prior_active { "  (prior active)" } else { "" }
        );
    }
}
