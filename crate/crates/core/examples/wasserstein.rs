//! Empirical Wasserstein distances against the Gaussian closed form.
use langevin::metrics::{gaussian_w2, wasserstein_empirical, GaussianLaw};
use nalgebra::{DMatrix, DVector};

fn main() {
    let a = GaussianLaw::new(DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
    let b = GaussianLaw::new(DVector::from_vec(vec![2.0, 0.0]), DMatrix::from_diagonal_element(2, 2, 2.0)).unwrap();
    println!("closed form W2 = {:.4}", gaussian_w2(&a, &b).unwrap());
    for n in [100, 500, 2000] {
        let xa = a.sample(n, 1, 0).unwrap();
        let xb = b.sample(n, 1, 1).unwrap();
        let w1 = wasserstein_empirical(&xa, &xb, 1).unwrap();
        let w2 = wasserstein_empirical(&xa, &xb, 2).unwrap();
        println!("n={n:>5}: W1 = {w1:.4}, W2 = {w2:.4}");
    }
}
