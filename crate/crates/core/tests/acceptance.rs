//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::Instant;

use cqrate::blocklength::bounds::rate_curve;
use cqrate::blocklength::normal::phi_inv;
use cqrate::blocklength::tensor::iid_dh_exact;
use cqrate::channels::{
    amplitude_damping, channel_metrics, pauli_channel, set_metrics, ChannelMetrics, MetricsOptions,
};
use cqrate::divergences::bracket::{
    berry_esseen_in_range, product_dh_bracket, xi, BracketVariant, CopyMoments,
};
use cqrate::divergences::classical::{
    classical_beta, kl_divergence, llr_variance, ClassicalDistribution,
};
use cqrate::divergences::hypothesis::{dh, quantum_beta};
use cqrate::divergences::quantum::{
    ns_moments, nussbaum_skola, relative_entropy, relative_entropy_variance,
};
use cqrate::geometry::center::{divergence_center_with, CenterOptions, Init};
use cqrate::geometry::net::{eigenvalue_floor, gamma_net};
use cqrate::geometry::state_set::StateSet;
use cqrate::operator::{trace_distance, CMatrix, DensityMatrix, HermitianOperator};
use cqrate::sampling::{
    random_commuting_pair, random_mixed_state, random_pure_state, random_unitary, seeded_rng,
};
use serde_json::Value;

type Check = Result<String, String>;

const LN2: f64 = std::f64::consts::LN_2;

fn h_nat(p: f64) -> f64 {
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

fn bsc_variance(p: f64) -> f64 {
    p * (1.0 - p) * ((1.0 - p) / p).ln().powi(2)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_cli(args: &[&str], config: &str) -> (i32, String, String) {
    let mut input = config.as_bytes();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cqrate::cli::run(args.iter().copied(), &mut input, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn cli_json(command: &str, config: &str) -> Result<Value, String> {
    let (code, out, err) = run_cli(&["cqrate", command, "-"], config);
    if code != 0 {
        return Err(format!("{command} exited with {code}: {err}"));
    }
    serde_json::from_str(&out).map_err(|e| e.to_string())
}

fn field(v: &Value, key: &str) -> Result<f64, String> {
    v[key]
        .as_f64()
        .ok_or_else(|| format!("missing numeric field {key}"))
}

fn diag_json(p: &[f64]) -> String {
    let d = p.len();
    let rows: Vec<String> = (0..d)
        .map(|i| {
            let cells: Vec<String> = (0..d)
                .map(|j| {
                    if i == j {
                        format!("[{},0]", p[i])
                    } else {
                        "[0,0]".into()
                    }
                })
                .collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// 1. Pauli/BSC equivalence through the `capacity` and `dispersion` commands.
fn pauli_bsc() -> Check {
    let mut worst_chi: f64 = 0.0;
    let mut worst_v: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for p in [0.05, 0.11, 0.25] {
        let start = Instant::now();
        let chi_ref = LN2 - h_nat(p);
        let v_ref = bsc_variance(p);
        let channels = [
            format!(
                r#"{{"channel":{{"cq_states":[{},{}]}}}}"#,
                diag_json(&[1.0 - p, p]),
                diag_json(&[p, 1.0 - p])
            ),
            format!(
                r#"{{"channel":{{"pauli":[{},{},{}]}}}}"#,
                p / 2.0,
                p / 2.0,
                p / 2.0
            ),
            // anisotropic, z the longest axis with crossover p
            format!(
                r#"{{"channel":{{"pauli":[{},{},{}]}}}}"#,
                0.6 * p,
                0.4 * p,
                0.7 * p
            ),
        ];
        for ch in &channels {
            let cfg = ch.replacen('{', r#"{"units":"nats","tol":1e-10,"resolution":2000,"#, 1);
            let cap = cli_json("capacity", &cfg)?;
            let disp = cli_json("dispersion", &cfg)?;
            let chi = field(&cap, "chi")?;
            let v_min = field(&disp, "v_min")?;
            let v_max = field(&disp, "v_max")?;
            worst_chi = worst_chi.max((chi - chi_ref).abs());
            worst_v = worst_v
                .max((v_min - v_ref).abs())
                .max((v_max - v_ref).abs());
        }
        slowest = slowest.max(start.elapsed().as_secs_f64());
    }
    ensure(worst_chi < 1e-6, || {
        format!("max |chi - oracle| = {worst_chi:.2e}")
    })?;
    ensure(worst_v < 1e-6, || {
        format!("max |v - oracle| = {worst_v:.2e}")
    })?;
    ensure(slowest < 5.0, || format!("slowest p took {slowest:.1} s"))?;
    Ok(format!(
        "max |dchi| = {worst_chi:.1e} nats, max |dv| = {worst_v:.1e} nats^2, slowest p {slowest:.2} s"
    ))
}

/// 2. Noiseless and fully damped endpoints.
fn damping_endpoints() -> Check {
    let start = Instant::now();
    let zero = cli_json(
        "capacity",
        r#"{"channel":{"amplitude_damping":0.0},"resolution":2000}"#,
    )?;
    let zero_d = cli_json(
        "dispersion",
        r#"{"channel":{"amplitude_damping":0.0},"resolution":2000}"#,
    )?;
    let one = cli_json(
        "capacity",
        r#"{"channel":{"amplitude_damping":1.0},"resolution":2000}"#,
    )?;
    let secs = start.elapsed().as_secs_f64();
    let chi0 = field(&zero, "chi")?;
    let v0 = field(&zero_d, "v_min")?
        .abs()
        .max(field(&zero_d, "v_max")?.abs());
    let chi1 = field(&one, "chi")?;
    ensure(
        format!("{chi0:.6}") == "1.000000" && (chi0 - 1.0).abs() < 1e-6,
        || format!("chi(0) = {chi0} bits"),
    )?;
    ensure(v0 < 1e-6, || format!("v(0) = {v0}"))?;
    ensure(chi1 <= 1e-6, || format!("chi(1) = {chi1}"))?;
    ensure(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "chi(0) = {chi0:.9} bits, v(0) = {v0:.1e}, chi(1) = {chi1:.1e}, {secs:.2} s"
    ))
}

/// 3. Amplitude-damping sweep: strictly decreasing radius, center on the z-axis.
fn damping_sweep() -> Check {
    let mut chis = Vec::new();
    let mut off_axis: f64 = 0.0;
    for k in 0..=10 {
        let g = k as f64 / 10.0;
        let m = channel_metrics(
            &amplitude_damping(g).map_err(|e| e.to_string())?,
            2000,
            1e-9,
        )
        .map_err(|e| e.to_string())?;
        let b = m.sigma_star.bloch_vector().map_err(|e| e.to_string())?;
        off_axis = off_axis.max(b[0].abs()).max(b[1].abs());
        chis.push(m.chi / LN2);
    }
    let mut min_margin = f64::INFINITY;
    for k in 0..10 {
        let margin = chis[k] - chis[k + 1];
        ensure(margin > 0.0, || {
            format!("chi not decreasing at gamma = {}", (k + 1) as f64 / 10.0)
        })?;
        if k > 0 && k < 9 {
            min_margin = min_margin.min(margin);
        }
    }
    ensure(min_margin > 1e-4, || {
        format!("smallest interior step {min_margin:.2e} bits")
    })?;
    ensure(chis[10].abs() < 1e-9, || format!("chi(1) = {}", chis[10]))?;
    ensure(off_axis <= 1e-6, || {
        format!("center off the z-axis by {off_axis:.2e}")
    })?;
    let shown: Vec<String> = chis.iter().map(|c| format!("{c:.4}")).collect();
    Ok(format!(
        "chi(gamma) bits = [{}], min interior step {min_margin:.3e}, max |x|,|y| of center {off_axis:.1e}",
        shown.join(", ")
    ))
}

/// 4. Nussbaum–Skoła distributions preserve relative entropy and its variance.
fn ns_preservation() -> Check {
    let start = Instant::now();
    let mut rng = seeded_rng(4);
    let mut dd: f64 = 0.0;
    let mut dv: f64 = 0.0;
    for i in 0..200 {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let rho = random_mixed_state(d, &mut rng);
        let sigma = random_mixed_state(d, &mut rng);
        let (p, q) = nussbaum_skola(&rho, &sigma).map_err(|e| e.to_string())?;
        let dq = relative_entropy(&rho, &sigma).map_err(|e| e.to_string())?;
        let vq = relative_entropy_variance(&rho, &sigma).map_err(|e| e.to_string())?;
        dd = dd.max((kl_divergence(&p, &q).map_err(|e| e.to_string())? - dq).abs());
        dv = dv.max((llr_variance(&p, &q).map_err(|e| e.to_string())? - vq).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(dd < 1e-9 && dv < 1e-9, || {
        format!("max |dD| = {dd:.2e}, max |dV| = {dv:.2e}")
    })?;
    ensure(secs < 5.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "max |dD| = {dd:.1e}, max |dV| = {dv:.1e} over 200 pairs, {secs:.2} s"
    ))
}

fn pinch(rho: &DensityMatrix, u: &CMatrix) -> DensityMatrix {
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    for k in 0..d {
        let v = u.column(k).into_owned();
        let proj = &v * v.adjoint();
        out += &proj * rho.matrix() * &proj;
    }
    DensityMatrix::new(
        HermitianOperator::new((&out + out.adjoint()).scale(0.5))
            .unwrap()
            .into_matrix(),
    )
    .unwrap()
}

/// 5. Neyman–Pearson on commuting pairs, and the basic properties of `D_h`.
fn neyman_pearson() -> Check {
    let mut rng = seeded_rng(5);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let d = 2 + i % 3;
        let (rho, sigma) = random_commuting_pair(d, &mut rng);
        // common eigenbasis from a generic combination of the pair
        let combo =
            HermitianOperator::new(rho.matrix() + sigma.matrix().scale(std::f64::consts::PI))
                .map_err(|e| e.to_string())?;
        let spec = combo.eig();
        let p = ClassicalDistribution::new(
            spec.diagonal_of(rho.matrix())
                .iter()
                .map(|x| x.max(0.0))
                .collect(),
        )
        .map_err(|e| e.to_string())?;
        let q = ClassicalDistribution::new(
            spec.diagonal_of(sigma.matrix())
                .iter()
                .map(|x| x.max(0.0))
                .collect(),
        )
        .map_err(|e| e.to_string())?;
        for eps in [0.01, 0.1, 0.5, 0.9] {
            let bq = quantum_beta(&rho, &sigma, eps).map_err(|e| e.to_string())?;
            let bc = classical_beta(&p, &q, eps).map_err(|e| e.to_string())?;
            worst = worst.max((bq - bc).abs());
        }
    }
    ensure(worst < 1e-9, || {
        format!("max |beta_q - beta_c| = {worst:.2e}")
    })?;

    let tol = 1e-9;
    let mut violations = Vec::new();
    for i in 0..100 {
        let d = 2 + i % 2;
        let eps = [0.05, 0.2, 0.5, 0.8][i % 4];
        let rho = random_mixed_state(d, &mut rng);
        let sigma = random_mixed_state(d, &mut rng);
        let e = |r: &DensityMatrix, s: &DensityMatrix| dh(r, s, eps).map_err(|e| e.to_string());
        let base = e(&rho, &sigma)?;
        if base < -tol || e(&rho, &rho)?.abs() > tol {
            violations.push(format!("positivity #{i}"));
        }
        let u = random_unitary(d, &mut rng);
        if e(&pinch(&rho, &u), &pinch(&sigma, &u))? > base + tol {
            violations.push(format!("data processing #{i}"));
        }
        let w1 = random_mixed_state(d, &mut rng);
        let w2 = random_mixed_state(d, &mut rng);
        let half = DensityMatrix::mixture(&[0.5, 0.5], &[w1.clone(), w2.clone()])
            .map_err(|e| e.to_string())?;
        let bound = e(&rho, &w1)?.min(e(&rho, &w2)?) + LN2;
        if e(&rho, &half)? > bound + tol {
            violations.push(format!("mixture bound #{i}"));
        }
        let r2 = random_mixed_state(d, &mut rng);
        let lam = 0.3;
        let mix = DensityMatrix::mixture(&[lam, 1.0 - lam], &[rho.clone(), r2.clone()])
            .map_err(|e| e.to_string())?;
        if e(&mix, &sigma)? > base.max(e(&r2, &sigma)?) + tol {
            violations.push(format!("quasi-convexity #{i}"));
        }
    }
    ensure(violations.is_empty(), || {
        format!("violations: {}", violations.join(", "))
    })?;
    Ok(format!(
        "max |beta_q - beta_c| = {worst:.1e} over 400 cases; positivity, pinching, mixture and quasi-convexity hold on 100 instances"
    ))
}

/// 6. Exact tensor-power values lie inside the product brackets.
fn bracket_containment() -> Check {
    let start = Instant::now();
    let rho = DensityMatrix::from_bloch(0.3, 0.1, 0.6).unwrap();
    let sigma = DensityMatrix::from_bloch(-0.2, 0.4, 0.1).unwrap();
    let (d, v, t) = ns_moments(&rho, &sigma).map_err(|e| e.to_string())?;
    let m = CopyMoments { d, v, t };
    let x = xi(&sigma);
    let mut checked_cheb = 0;
    let mut checked_be = 0;
    let mut scheduled = 0;
    for eps in [0.05f64, 0.25] {
        let limit = eps.min((1.0 - eps) / 4.0);
        for n in 1..=10usize {
            let nf = n as f64;
            let exact = iid_dh_exact(&rho, &sigma, n, eps).map_err(|e| e.to_string())?;
            let sched = 1.0 / nf.sqrt();
            let mut deltas = vec![0.5 * limit];
            if sched < limit {
                deltas.push(sched);
                scheduled += 1;
            }
            for delta in deltas {
                let cheb = product_dh_bracket(&[m], x, nf, eps, delta, BracketVariant::Chebyshev)
                    .map_err(|e| e.to_string())?;
                ensure(cheb.contains(exact, 1e-9), || {
                    format!(
                        "Chebyshev n={n} eps={eps}: {exact} not in [{}, {}]",
                        cheb.lower, cheb.upper
                    )
                })?;
                checked_cheb += 1;
                if berry_esseen_in_range(m, nf, eps, delta) {
                    let be =
                        product_dh_bracket(&[m], x, nf, eps, delta, BracketVariant::BerryEsseen)
                            .map_err(|e| e.to_string())?;
                    ensure(be.contains(exact, 1e-9), || {
                        format!(
                            "Berry-Esseen n={n} eps={eps}: {exact} not in [{}, {}]",
                            be.lower, be.upper
                        )
                    })?;
                    checked_be += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "{checked_cheb} Chebyshev and {checked_be} Berry-Esseen brackets contain the exact value \
         ({scheduled} points where delta = n^-1/2 is admissible, the rest at delta = half the admissible limit), {secs:.2} s"
    ))
}

fn certificate(
    name: &str,
    set: StateSet,
    worst: &mut Vec<String>,
) -> Result<(f64, f64, f64, usize), String> {
    let d = set.dim();
    let opts = MetricsOptions {
        tol: 1e-9,
        max_iter: 10_000,
        ..Default::default()
    };
    let m: ChannelMetrics = set_metrics(set.clone(), opts).map_err(|e| format!("{name}: {e}"))?;
    if !(m.report.gap <= 1e-6 && m.report.iterations <= 10_000) {
        worst.push(format!(
            "{name}: gap {:.2e} after {} iterations",
            m.report.gap, m.report.iterations
        ));
    }
    if m.range.residual > 1e-6 {
        worst.push(format!("{name}: LP residual {:.2e}", m.range.residual));
    }
    let other = divergence_center_with(
        &set,
        CenterOptions {
            tol: 1e-9,
            max_iter: 10_000,
            init: Init::Random(99),
        },
    )
    .map_err(|e| e.to_string())?;
    let td = trace_distance(&m.sigma_star, &other.sigma_star).map_err(|e| e.to_string())?;
    if td > 1e-5 {
        worst.push(format!("{name}: initializations differ by {td:.2e}"));
    }
    let mut prune_err: f64 = 0.0;
    let mut max_support = 0;
    for (full, pruned, target) in [
        (&m.range.p_min, &m.pruned_min, m.range.v_min),
        (&m.range.p_max, &m.pruned_max, m.range.v_max),
    ] {
        max_support = max_support.max(pruned.support.len());
        if pruned.support.len() > d * d + 1 {
            worst.push(format!("{name}: support {} > d^2+1", pruned.support.len()));
        }
        let mut before = CMatrix::zeros(d, d);
        for (w, &i) in full.iter().zip(&m.range.peripheral) {
            before += set.get(i).matrix().scale(*w);
        }
        let mut after = CMatrix::zeros(d, d);
        let mut v_after = 0.0;
        for (w, &i) in pruned.weights.iter().zip(&pruned.support) {
            after += set.get(i).matrix().scale(*w);
            v_after += w * relative_entropy_variance(set.get(i), &m.sigma_star)
                .map_err(|e| e.to_string())?;
        }
        prune_err = prune_err
            .max((before - after).norm())
            .max((v_after - target).abs());
    }
    if prune_err > 1e-9 {
        worst.push(format!(
            "{name}: pruning moved mean or variance by {prune_err:.2e}"
        ));
    }
    Ok((m.report.gap, m.range.residual, td, max_support))
}

/// 7. Radius certificates on a battery of channels.
fn geometry_certificates() -> Check {
    let mut sets: Vec<(String, StateSet)> = Vec::new();
    let image = |ch: cqrate::channels::KrausChannel, res: usize| {
        cqrate::channels::discretize_image(&ch, res, 0).unwrap().set
    };
    sets.push((
        "depolarizing p=0.11".into(),
        image(pauli_channel(0.055, 0.055, 0.055).unwrap(), 500),
    ));
    sets.push((
        "pauli (0.05, 0.02, 0.1)".into(),
        image(pauli_channel(0.05, 0.02, 0.1).unwrap(), 500),
    ));
    for g in [0.1, 0.25, 0.5, 0.75, 0.9] {
        sets.push((
            format!("amplitude damping {g}"),
            image(amplitude_damping(g).unwrap(), 500),
        ));
    }
    let p = 0.11;
    sets.push((
        "bsc pair p=0.11".into(),
        StateSet::new(vec![
            DensityMatrix::from_real_diagonal(&[1.0 - p, p]).unwrap(),
            DensityMatrix::from_real_diagonal(&[p, 1.0 - p]).unwrap(),
        ])
        .unwrap(),
    ));
    let mut rng = seeded_rng(7);
    sets.push((
        "12 random qutrit states".into(),
        StateSet::new((0..12).map(|_| random_mixed_state(3, &mut rng)).collect()).unwrap(),
    ));
    sets.push((
        "8 random pure qubits".into(),
        StateSet::new((0..8).map(|_| random_pure_state(2, &mut rng)).collect()).unwrap(),
    ));
    let mut problems = Vec::new();
    let mut max_gap: f64 = 0.0;
    let mut max_res: f64 = 0.0;
    let mut max_td: f64 = 0.0;
    let mut max_support = 0;
    for (name, set) in sets.iter() {
        let (gap, res, td, sup) = certificate(name, set.clone(), &mut problems)?;
        max_gap = max_gap.max(gap);
        max_res = max_res.max(res);
        max_td = max_td.max(td);
        max_support = max_support.max(sup);
    }
    ensure(problems.is_empty(), || problems.join("; "))?;
    Ok(format!(
        "{} sets: max gap {max_gap:.1e}, max LP residual {max_res:.1e}, max init disagreement {max_td:.1e}, max pruned support {max_support}",
        sets.len()
    ))
}

/// 8. Qubit nets cover within gamma with the divergence and eigenvalue guarantees.
fn gamma_nets() -> Check {
    let start = Instant::now();
    let d = 2;
    let mut summary = Vec::new();
    for gamma in [0.1, 0.2, 0.5] {
        let net = gamma_net(d, gamma, 0).map_err(|e| e.to_string())?;
        let s = net.summary();
        let floor = eigenvalue_floor(d, gamma);
        ensure(s.min_eigenvalue >= floor, || {
            format!(
                "gamma={gamma}: net eigenvalue {} below {floor}",
                s.min_eigenvalue
            )
        })?;
        let mut rng = seeded_rng(8);
        let mut worst_td: f64 = 0.0;
        let mut worst_d: f64 = 0.0;
        for i in 0..1000 {
            let rho = if i % 2 == 0 {
                random_pure_state(d, &mut rng)
            } else {
                random_mixed_state(d, &mut rng)
            };
            let (tau, td) = net.closest(&rho).map_err(|e| e.to_string())?;
            let div = relative_entropy(&rho, &tau).map_err(|e| e.to_string())?;
            ensure(tau.min_eigenvalue() >= floor, || {
                format!("gamma={gamma}: element below floor")
            })?;
            worst_td = worst_td.max(td);
            worst_d = worst_d.max(div);
        }
        let d_bound = 4.0 * gamma * (2.0 * d as f64 + 1.0);
        ensure(worst_td <= gamma, || {
            format!("gamma={gamma}: trace distance {worst_td}")
        })?;
        ensure(worst_d <= d_bound, || {
            format!("gamma={gamma}: divergence {worst_d} > {d_bound}")
        })?;
        summary.push(format!(
            "gamma={gamma}: |net|={}, max TD {worst_td:.3}, max D {worst_d:.3}",
            s.cardinality
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{}; {secs:.2} s", summary.join("; ")))
}

/// 9. Bounds sandwich the second-order expression and converge to the capacity.
fn bound_sandwich() -> Check {
    let eps = 0.01;
    let p = 0.11;
    let bsc = set_metrics(
        StateSet::new(vec![
            DensityMatrix::from_real_diagonal(&[1.0 - p, p]).unwrap(),
            DensityMatrix::from_real_diagonal(&[p, 1.0 - p]).unwrap(),
        ])
        .unwrap(),
        MetricsOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let ad = channel_metrics(&amplitude_damping(0.25).unwrap(), 2000, 1e-9)
        .map_err(|e| e.to_string())?;
    let ns: Vec<u64> = (2..=8).map(|k| 10u64.pow(k)).collect();
    let mut notes = Vec::new();
    for (name, m) in [("bsc 0.11", &bsc), ("amplitude damping 0.25", &ad)] {
        let curve = rate_curve(m, eps, &ns).map_err(|e| e.to_string())?;
        let v = m.v_eps(eps);
        let c1 = phi_inv(eps).abs() * v.sqrt();
        for pt in &curve {
            let n = pt.n as f64;
            let reference = n * m.chi + (n * v).sqrt() * phi_inv(eps) + c1 * n.sqrt();
            ensure(pt.lower <= reference + 1e-9, || {
                format!("{name} n={}: lower {} above {reference}", pt.n, pt.lower)
            })?;
            ensure(pt.lower <= pt.upper + 1e-9, || {
                format!(
                    "{name} n={}: lower {} above upper {}",
                    pt.n, pt.lower, pt.upper
                )
            })?;
        }
        let last = curve.last().unwrap();
        let n = last.n as f64;
        let lo = (m.chi - last.lower / n) / LN2;
        let hi = (last.upper / n - m.chi) / LN2;
        ensure(lo.abs() < 0.02 && hi.abs() < 0.02, || {
            format!("{name} at n=1e8: lower off by {lo:.4} bits, upper by {hi:.4} bits")
        })?;
        notes.push(format!(
            "{name}: chi - lower/n = {lo:.2e}, upper/n - chi = {hi:.2e} bits at n=1e8"
        ));
    }
    Ok(notes.join("; "))
}

fn parse_curve(csv: &str) -> Result<Vec<[f64; 4]>, String> {
    let mut lines = csv.lines();
    ensure(lines.next() == Some("n,approx,lower,upper"), || {
        "bad CSV header".to_string()
    })?;
    lines
        .map(|l| {
            let cells: Vec<f64> = l
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            ensure(cells.len() == 4, || format!("bad row {l}"))?;
            Ok([cells[0], cells[1], cells[2], cells[3]])
        })
        .collect()
}

/// 10. Normalized second-order curves ordered in gamma and rising to their asymptotes.
fn curve_shape() -> Check {
    let grid = "[100,300,1000,3000,10000,30000,100000,300000,1000000,10000000,100000000]";
    let mut curves = Vec::new();
    let mut chis = Vec::new();
    for g in [0.0, 0.25, 0.75] {
        let cfg = format!(
            r#"{{"channel":{{"amplitude_damping":{g}}},"eps":0.01,"n_grid":{grid},"resolution":2000}}"#
        );
        let (code, out, err) = run_cli(&["cqrate", "curve", "-"], &cfg);
        ensure(code == 0, || format!("curve exited with {code}: {err}"))?;
        let rows = parse_curve(&out)?;
        for r in &rows {
            ensure(r[2] <= r[3], || {
                format!("gamma={g} n={}: lower above upper", r[0])
            })?;
        }
        let cap = cli_json("capacity", &cfg)?;
        chis.push(field(&cap, "chi")?);
        curves.push(rows);
    }
    for (k, rows) in curves.iter().enumerate() {
        for w in rows.windows(2) {
            ensure(w[1][1] >= w[0][1] - 1e-12, || {
                format!("curve {k} decreases at n={}", w[1][0])
            })?;
        }
        for r in rows {
            ensure(r[1] <= chis[k] + 1e-9, || {
                format!("curve {k} above its asymptote at n={}", r[0])
            })?;
        }
        let gap_end = chis[k] - rows.last().unwrap()[1];
        ensure(gap_end < 1e-3, || {
            format!("curve {k} ends {gap_end} below its asymptote")
        })?;
    }
    for ((top, mid), low) in curves[0].iter().zip(&curves[1]).zip(&curves[2]) {
        ensure(top[1] > mid[1] && mid[1] > low[1], || {
            format!("curves not ordered at n={}", top[0])
        })?;
    }
    Ok(format!(
        "asymptotes {:.4}, {:.4}, {:.4} bits; approx at n=100: {:.4}, {:.4}, {:.4}",
        chis[0], chis[1], chis[2], curves[0][0][1], curves[1][0][1], curves[2][0][1]
    ))
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Check);
    let criteria: [Criterion; 10] = [
        (1, "Pauli/BSC equivalence", pauli_bsc),
        (2, "noiseless and fully damped endpoints", damping_endpoints),
        (3, "amplitude-damping radius sweep", damping_sweep),
        (4, "Nussbaum-Skola moment preservation", ns_preservation),
        (
            5,
            "Neyman-Pearson on commuting pairs and D_h properties",
            neyman_pearson,
        ),
        (
            6,
            "bracket containment of exact tensor powers",
            bracket_containment,
        ),
        (7, "geometry certificates", geometry_certificates),
        (8, "gamma-net guarantees", gamma_nets),
        (9, "bound sandwich and convergence", bound_sandwich),
        (10, "normalized curve shape", curve_shape),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{id:>2}] {name} ({secs:.2} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{id:>2}] {name} ({secs:.2} s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
