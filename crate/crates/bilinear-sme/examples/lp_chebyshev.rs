//! Linear programming over halfspace polytopes and Chebyshev centers.
//!
//!     cargo run --example lp_chebyshev

use bilinear_sme::lp::{solve_lp, LinearProgram, Sense};
use bilinear_sme::sme::FeasibleSet;
use bilinear_sme::tensor::Matrix;

fn main() {
    // Maximize x + 2y over a pentagon.
    let constraints = Matrix::new(
        5,
        2,
        vec![
            1.0, 0.0, // x ≤ 2
            0.0, 1.0, // y ≤ 1.5
            -1.0, 0.0, // x ≥ -1
            0.0, -1.0, // y ≥ -1
            1.0, 1.0, // x + y ≤ 2.5
        ],
    )
    .unwrap();
    let lp = LinearProgram::new(
        constraints,
        vec![2.0, 1.5, 1.0, 1.0, 2.5],
        vec![1.0, 2.0],
        Sense::Maximize,
    )
    .unwrap();
    let out = solve_lp(&lp).unwrap();
    println!("status: {:?}", out.status);
    println!("optimum {:.3} at {:?}", out.value.unwrap(), out.optimizer.unwrap());

    // Unbounded and infeasible cases are detected, not mis-solved.
    let half_line = LinearProgram::new(
        Matrix::new(1, 1, vec![-1.0]).unwrap(),
        vec![0.0],
        vec![1.0],
        Sense::Maximize,
    )
    .unwrap();
    println!("max x s.t. x ≥ 0: {:?}", solve_lp(&half_line).unwrap().status);

    let empty = LinearProgram::new(
        Matrix::new(2, 1, vec![1.0, -1.0]).unwrap(),
        vec![-1.0, 0.0],
        vec![1.0],
        Sense::Maximize,
    )
    .unwrap();
    println!("x ≤ -1 and x ≥ 0: {:?}", solve_lp(&empty).unwrap().status);

    // Chebyshev center of a data-constrained parameter row.
    let mut set = FeasibleSet::prior_only(1, 1, 1.0, 10.0);
    set.append_sample(&[1.0, 0.0], &[0.3]).unwrap();
    set.append_sample(&[0.0, 1.0], &[-0.2]).unwrap();
    set.append_sample(&[1.0, 1.0], &[0.1]).unwrap();
    let (center, radius) = set.rows()[0].chebyshev_center().unwrap();
    println!("chebyshev center {center:?}, inscribed radius {radius:.4}");
}
