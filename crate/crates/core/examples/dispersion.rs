//! Peripheral set, variance range and Carathéodory-pruned ensembles of a
//! random qutrit state set.

use cqrate::channels::{set_metrics, MetricsOptions};
use cqrate::divergences::quantum::relative_entropy_variance;
use cqrate::geometry::StateSet;
use cqrate::sampling::{random_mixed_state, seeded_rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = seeded_rng(42);
    let set = StateSet::new((0..40).map(|_| random_mixed_state(3, &mut rng)).collect())?;
    let m = set_metrics(set, MetricsOptions::default())?;
    println!(
        "chi in [{:.9}, {:.9}] nats after {} iterations",
        m.chi_lower, m.chi_upper, m.report.iterations
    );
    println!(
        "peripheral states: {:?} (slack {:.1e}, {} clusters)",
        m.range.peripheral,
        m.slack,
        m.clusters.len()
    );
    println!(
        "v_min = {:.6}, v_max = {:.6}, LP residual {:.1e}",
        m.v_min, m.v_max, m.range.residual
    );
    for (name, pruned) in [("v_min", &m.pruned_min), ("v_max", &m.pruned_max)] {
        let v: f64 = pruned
            .weights
            .iter()
            .zip(&pruned.support)
            .map(|(w, &i)| {
                Ok::<_, cqrate::Error>(w * relative_entropy_variance(m.set.get(i), &m.sigma_star)?)
            })
            .sum::<Result<f64, _>>()?;
        println!(
            "{name}: support {:?} with weights {:.4?}, variance {:.6}",
            pruned.support, pruned.weights, v
        );
    }
    Ok(())
}
