//! Plans KLMC, runs chains at the planned parameters and checks the scaled criterion.
use langevin::metrics::{
    gaussian_chain_law, gaussian_w2, scaled_error_check, wasserstein_empirical, GaussianLaw, Provenance, SampleCloud,
};
use langevin::planner::{plan, PlannerInputs, Recipe};
use langevin::potentials::make_gaussian_potential;
use langevin::samplers::final_states;

fn main() {
    let eps = 0.5;
    let pot = make_gaussian_potential(2, &[1.0, 1.0]).unwrap();
    let target = GaussianLaw::target_of(&pot).unwrap();
    let mu2 = target.second_moment();
    let planned = plan(Recipe::Klmc, &PlannerInputs::new(2, 1.0, mu2, eps, 1)).unwrap();
    let mut config = planned.sampler_config(7);
    // the planned K is conservative; a shorter run shows the same picture faster
    config.steps = config.steps.min(100_000);
    let states = final_states(&config, &pot, 200).unwrap();
    let chains = SampleCloud::new(&states, Provenance::ChainFinalStates).unwrap();
    let reference = target.sample(200, 7, u64::MAX).unwrap();
    let exact = gaussian_w2(&gaussian_chain_law(&config, &pot).unwrap().theta, &target).unwrap();
    println!("planned K = {}, used K = {}", planned.k, config.steps);
    println!("empirical W1 (n=200) = {:.4}", wasserstein_empirical(&chains, &reference, 1).unwrap());
    println!("exact W2 of the chain law = {exact:.6}");
    println!("target eps*sqrt(mu2) = {:.4}, pass = {}", planned.target, scaled_error_check(exact, mu2, eps));
}
