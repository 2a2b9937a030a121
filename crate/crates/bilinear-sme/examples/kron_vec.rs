//! Kronecker products, vectorization, and spectral-radius estimation.
//!
//!     cargo run --example kron_vec

use bilinear_sme::stochastic::StreamRng;
use bilinear_sme::tensor::{kron, spectral_radius_default, unvectorize, vectorize, Matrix};

fn main() {
    // vec(M X N) == (Nᵀ ⊗ M) vec(X): the identity that turns matrix
    // recursions into linear ones on vectorized covariances.
    let mut rng = StreamRng::new(1, 0);
    let rand3 = |rng: &mut StreamRng| {
        Matrix::new(3, 3, (0..9).map(|_| rng.uniform_symmetric()).collect()).unwrap()
    };
    let m = rand3(&mut rng);
    let x = rand3(&mut rng);
    let n = rand3(&mut rng);
    let lhs = vectorize(&m.matmul(&x).unwrap().matmul(&n).unwrap());
    let rhs = kron(&n.transpose(), &m).matvec(&vectorize(&x)).unwrap();
    let gap = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    println!("vec(MXN) vs (N' ⊗ M) vec(X): max gap = {gap:.3e}");

    let back = unvectorize(&vectorize(&x), 3, 3).unwrap();
    println!("vectorize round-trip exact: {}", back == x);

    // Spectral radii of a few shapes.
    let diag = Matrix::diagonal(&[0.9, -0.3, 0.5]);
    println!("rho(diag(0.9, -0.3, 0.5)) ≈ {:.6}", spectral_radius_default(&diag).unwrap());
    let rotation = Matrix::new(2, 2, vec![0.0, 1.0, -1.0, 0.0]).unwrap();
    println!("rho(rotation) ≈ {:.6}", spectral_radius_default(&rotation).unwrap());
    let nilpotent = Matrix::new(2, 2, vec![0.0, 5.0, 0.0, 0.0]).unwrap();
    println!("rho(nilpotent) = {:.6}", spectral_radius_default(&nilpotent).unwrap());
}
