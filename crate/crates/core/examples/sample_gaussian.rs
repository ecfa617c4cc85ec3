//! Runs the three samplers on an anisotropic Gaussian and reports moments of the final states.
use langevin::metrics::{Provenance, SampleCloud};
use langevin::potentials::make_gaussian_potential;
use langevin::samplers::{final_states, Algorithm, SamplerConfig};

fn main() {
    let precision = [1.0, 4.0];
    let pot = make_gaussian_potential(2, &precision).unwrap();
    let configs = [
        SamplerConfig::lmc(0.0, 0.05, 2000, 1),
        SamplerConfig::kinetic(Algorithm::Klmc, 0.0, 0.1, 2.0, 1000, 1),
        SamplerConfig::kinetic(Algorithm::Klmc2, 0.0, 0.1, 2.0, 1000, 1),
    ];
    for config in configs {
        let states = final_states(&config, &pot, 4000).unwrap();
        let cloud = SampleCloud::new(&states, Provenance::ChainFinalStates).unwrap();
        let cov = cloud.covariance();
        println!(
            "{:<6} mean=({:+.3}, {:+.3}) var=({:.3}, {:.3}) target var=({:.3}, {:.3})",
            config.algorithm.name(),
            cloud.mean()[0],
            cloud.mean()[1],
            cov[(0, 0)],
            cov[(1, 1)],
            1.0 / precision[0],
            1.0 / precision[1]
        );
    }
}
