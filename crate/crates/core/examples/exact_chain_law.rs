//! Follows the exact law of a planned KLMC chain towards its Gaussian target.
use langevin::metrics::{gaussian_chain_law, gaussian_w2, GaussianLaw};
use langevin::planner::{plan, PlannerInputs, Recipe};
use langevin::potentials::make_gaussian_potential;

fn main() {
    let pot = make_gaussian_potential(3, &[1.0, 2.0, 4.0]).unwrap();
    let target = GaussianLaw::target_of(&pot).unwrap();
    let mu2 = target.second_moment();
    let planned = plan(Recipe::Klmc, &PlannerInputs::new(3, 4.0, mu2, 0.3, 2)).unwrap();
    println!("planned K = {}, target = {:.4}", planned.k, planned.target);
    let base = planned.sampler_config(0).with_initial_theta(vec![5.0, -5.0, 5.0]);
    for k in [0, 1_000, 10_000, 100_000, planned.k as usize] {
        let mut config = base.clone();
        config.steps = k;
        let law = gaussian_chain_law(&config, &pot).unwrap();
        println!("K={k:>9} W2 = {:.6}", gaussian_w2(&law.theta, &target).unwrap());
    }
}
