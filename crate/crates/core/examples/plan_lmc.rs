//! Tunes every recipe for a two-dimensional problem and prints the plans.
use langevin::planner::{plan, PlannerInputs, Recipe};

fn main() {
    let inputs = PlannerInputs::new(2, 1.0, 2.0, 0.25, 2).with_hess_lipschitz(0.5);
    for recipe in [Recipe::Lmc, Recipe::LmcHessian, Recipe::Klmc, Recipe::Klmc2] {
        match plan(recipe, &inputs) {
            Ok(p) => println!(
                "{recipe:?}: alpha={:.3e} h={:.3e} gamma={:?} K={} predicted={:.4} target={:.4}",
                p.alpha, p.h, p.gamma, p.k, p.predicted_error, p.target
            ),
            Err(e) => println!("{recipe:?}: {e}"),
        }
    }
}
