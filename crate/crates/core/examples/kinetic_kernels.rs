//! Prints the kinetic step kernels and the per-coordinate noise covariance.
use langevin::kernels::{eval_kernels, noise_covariance};

fn main() {
    let gamma = 2.0;
    for h in [1e-6, 1e-3, 0.1, 1.0, 10.0] {
        let k = eval_kernels(gamma, h).unwrap();
        println!(
            "h={h:>8.1e} psi0={:.6e} psi1={:.6e} psi2={:.6e} phi2={:.6e} phi3={:.6e}",
            k.psi0, k.psi1, k.psi2, k.phi2, k.phi3
        );
    }
    let cov = noise_covariance(gamma, 0.1).unwrap();
    println!("C(gamma=2, h=0.1):");
    for row in cov.c {
        println!("  {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", row[0], row[1], row[2], row[3]);
    }
    println!("jitter: {:e}", cov.jitter);
}
