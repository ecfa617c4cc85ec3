//! Minimizes the moment-inequality constant for a few orders.
use langevin::moments::khintchine_constant;

fn main() {
    for k in [2.0, 2.5, 3.0, 4.0, 6.0] {
        let r = khintchine_constant(k).unwrap();
        println!("k={k}: A_k={:.4} lambda={:?} gamma={:?}", r.a_k, r.lambda_opt, r.gamma_opt);
    }
}
