//! Evaluate the minimal sample count for a target feasible-set diameter
//! and confidence, and inspect how it scales.
//!
//!     cargo run --example sample_complexity

use bilinear_sme::complexity::{
    default_block_length, default_truncation, error_survival_bound, excitation_failure_bound,
    min_sample_complexity, ComplexityInputs,
};

fn main() {
    let inputs = |delta: f64, eta: f64| ComplexityInputs {
        n: 2,
        m: 1,
        k_z: 0.5,
        p_z: 0.5,
        c_w: 0.5,
        delta,
        eta,
        epsilon_r: 0.25,
        epsilon: 0.25,
        r: 0,
        c_z: 1.0,
    };

    println!("{:>8} {:>8} {:>14}", "delta", "eta", "T_min");
    for delta in [0.4, 0.2, 0.1, 0.05] {
        let t = min_sample_complexity(&inputs(delta, 0.1)).unwrap();
        println!("{delta:>8} {:>8} {t:>14}", 0.1);
    }
    for eta in [0.1, 0.01] {
        let t = min_sample_complexity(&inputs(0.1, eta)).unwrap();
        println!("{:>8} {eta:>8} {t:>14}", 0.1);
    }

    // The probability bounds behind the guarantee, at the returned T.
    let spec = inputs(0.1, 0.1);
    let t = min_sample_complexity(&spec).unwrap() as f64;
    let kappa = default_block_length(t, spec.eta, spec.p_z);
    let m_trunc = default_truncation(spec.c_z, t, spec.r);
    println!("\nat T = {t}: block length kappa = {kappa}, truncation M = {m_trunc:.3e}");
    let excitation =
        excitation_failure_bound(t, kappa, m_trunc, spec.n, spec.r, spec.c_z, spec.k_z, spec.p_z);
    let survival = error_survival_bound(
        t, kappa, m_trunc, spec.n, spec.m, spec.r, spec.c_z, spec.delta, spec.k_z, spec.p_z,
        spec.c_w,
    );
    println!("excitation failure bound: {excitation:?}");
    println!("error survival bound:     {survival:?}");
    println!("(values above 1 mean the union bound is vacuous at this scale; the");
    println!(" minimal T keeps the certified combination below eta)");
}
