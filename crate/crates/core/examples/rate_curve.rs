//! Normal approximation and certified bounds on the best rate at blocklength
//! `n` for amplitude damping at `γ ∈ {0, 1/4, 3/4}` and error `ε = 1%`.
//!
//! Pass a directory to also write one CSV per channel.

use std::io::Write;

use cqrate::blocklength::bounds::rate_curve;
use cqrate::channels::{amplitude_damping, channel_metrics};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1);
    let ln2 = std::f64::consts::LN_2;
    let eps = 0.01;
    let ns: Vec<u64> = (2..=16)
        .map(|k| 10f64.powf(k as f64 / 2.0).round() as u64)
        .collect();
    for (label, gamma) in [("0", 0.0), ("1_4", 0.25), ("3_4", 0.75)] {
        let m = channel_metrics(&amplitude_damping(gamma)?, 2000, 1e-9)?;
        let curve = rate_curve(&m, eps, &ns)?;
        println!(
            "gamma = {gamma}: chi = {:.6} bits, V_eps = {:.6} bits^2",
            m.chi / ln2,
            m.v_eps(eps) / (ln2 * ln2)
        );
        println!(
            "{:>12} {:>10} {:>10} {:>10}",
            "n", "approx", "lower", "upper"
        );
        let mut csv = String::from("n,approx,lower,upper\n");
        for p in &curve {
            let n = p.n as f64;
            let (a, l, u) = (p.approx / n / ln2, p.lower / n / ln2, p.upper / n / ln2);
            println!("{:>12} {:>10.5} {:>10.5} {:>10.5}", p.n, a, l, u);
            csv.push_str(&format!("{},{a},{l},{u}\n", p.n));
        }
        if let Some(dir) = &out_dir {
            let path = std::path::Path::new(dir).join(format!("rate_curve_gamma_{label}.csv"));
            std::fs::File::create(&path)?.write_all(csv.as_bytes())?;
            println!("wrote {}", path.display());
        }
        println!();
    }
    Ok(())
}
