//! Holevo capacity, divergence center and dispersion range of the qubit
//! amplitude-damping channel as the damping grows from 0 to 1.

use cqrate::channels::{amplitude_damping, channel_metrics};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ln2 = std::f64::consts::LN_2;
    println!(
        "{:>6} {:>11} {:>10} {:>11} {:>11} {:>11} {:>6}",
        "gamma", "chi [bits]", "center z", "v_min", "v_max", "gap", "iters"
    );
    for k in 0..=10 {
        let gamma = k as f64 / 10.0;
        let m = channel_metrics(&amplitude_damping(gamma)?, 2000, 1e-9)?;
        let [_, _, z] = m.sigma_star.bloch_vector()?;
        println!(
            "{:>6.2} {:>11.6} {:>10.6} {:>11.6} {:>11.6} {:>11.1e} {:>6}",
            gamma,
            m.chi / ln2,
            z,
            m.v_min / (ln2 * ln2),
            m.v_max / (ln2 * ln2),
            m.report.gap,
            m.report.iterations
        );
    }
    Ok(())
}
