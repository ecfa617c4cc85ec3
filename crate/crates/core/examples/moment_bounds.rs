//! Compares moment bounds with quadrature for the capped quadratic target.
use langevin::moments::{
    lower_bound_moment_oracle, moment_bound_inside_ball, moment_bound_outside_ball, moment_bound_outside_ball_general,
    moment_bound_strong,
};

fn main() {
    let a = 2.0;
    for p in [3, 5, 10] {
        let inside = moment_bound_inside_ball(p, 1.0, 1.0, 1.0, a).unwrap();
        let oracle = lower_bound_moment_oracle(p, a).unwrap();
        println!(
            "p={p:>2}: lower {:.3} <= numeric {:.3} <= inside-ball {:.3} (dominated by {})",
            oracle.closed_form_lower_bound, oracle.numeric_moment, inside.bound, inside.dominating_term
        );
    }
    for radius in [0.5, 2.0, 8.0] {
        let sharp = moment_bound_outside_ball(4, 1.0, radius, 1.0, a).unwrap().bound;
        let general = moment_bound_outside_ball_general(4, 1.0, radius, a).unwrap();
        println!("R={radius}: outside-ball {sharp:.3e}, general {general:.3e}");
    }
    println!("strong (p=4, m=1): {}", moment_bound_strong(4, 1.0, a).unwrap());
}
