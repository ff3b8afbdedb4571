//! Finite nets of full-rank states: size, eigenvalue floor and empirical
//! coverage in trace distance and relative entropy.

use cqrate::divergences::quantum::relative_entropy;
use cqrate::geometry::net::gamma_net;
use cqrate::sampling::{random_mixed_state, random_pure_state, seeded_rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>2} {:>6} {:>9} {:>12} {:>10} {:>8} {:>8}",
        "d", "gamma", "size", "bound", "floor", "max TD", "max D"
    );
    for (d, gamma) in [(2, 0.5), (2, 0.2), (2, 0.1), (3, 0.5)] {
        let net = gamma_net(d, gamma, 0)?;
        let s = net.summary();
        let mut rng = seeded_rng(1);
        let (mut td_max, mut d_max) = (0.0f64, 0.0f64);
        for i in 0..1000 {
            let rho = if i % 2 == 0 {
                random_pure_state(d, &mut rng)
            } else {
                random_mixed_state(d, &mut rng)
            };
            let (tau, td) = net.closest(&rho)?;
            td_max = td_max.max(td);
            d_max = d_max.max(relative_entropy(&rho, &tau)?);
        }
        println!(
            "{:>2} {:>6.2} {:>9} {:>12.3e} {:>10.5} {:>8.4} {:>8.4}",
            d, gamma, s.cardinality, s.cardinality_bound, s.min_eigenvalue_floor, td_max, d_max
        );
    }
    Ok(())
}
