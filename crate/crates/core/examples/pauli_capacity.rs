//! Capacity and dispersion of a bit-flip channel, computed three ways.
//!
//! The same binary symmetric channel is given as an explicit pair of output
//! states, as a depolarizing channel and as an anisotropic Pauli channel whose
//! longest axis has the same crossover probability. All three agree with the
//! closed forms `ln 2 − h(p)` and `p(1−p) ln²((1−p)/p)`.
//!
//! Run with `cargo run --example pauli_capacity -- 0.11`.

use cqrate::channels::{channel_metrics, pauli_channel, set_metrics, MetricsOptions};
use cqrate::geometry::StateSet;
use cqrate::DensityMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(0.11);
    let ln2 = std::f64::consts::LN_2;
    let h = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
    let chi_exact = (ln2 - h) / ln2;
    let v_exact = p * (1.0 - p) * ((1.0 - p) / p).ln().powi(2) / (ln2 * ln2);

    let pair = StateSet::new(vec![
        DensityMatrix::from_real_diagonal(&[1.0 - p, p])?,
        DensityMatrix::from_real_diagonal(&[p, 1.0 - p])?,
    ])?;
    let runs = [
        (
            "two output states",
            set_metrics(pair, MetricsOptions::default())?,
        ),
        (
            "depolarizing",
            channel_metrics(&pauli_channel(p / 2.0, p / 2.0, p / 2.0)?, 2000, 1e-10)?,
        ),
        (
            "anisotropic Pauli",
            channel_metrics(&pauli_channel(0.6 * p, 0.4 * p, 0.7 * p)?, 2000, 1e-10)?,
        ),
    ];

    println!("bit-flip p = {p}: chi = {chi_exact:.9} bits, V = {v_exact:.9} bits^2");
    println!(
        "{:<20} {:>14} {:>14} {:>14} {:>10}",
        "representation", "chi [bits]", "v_min", "v_max", "gap"
    );
    for (name, m) in &runs {
        println!(
            "{:<20} {:>14.9} {:>14.9} {:>14.9} {:>10.1e}",
            name,
            m.chi / ln2,
            m.v_min / (ln2 * ln2),
            m.v_max / (ln2 * ln2),
            m.report.gap
        );
    }
    Ok(())
}
