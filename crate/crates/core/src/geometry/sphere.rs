//! Point sets on the unit sphere, used as Bloch vectors of pure qubit states.

use std::f64::consts::PI;

/// Deterministic grid of exactly `resolution` unit vectors (odd values are
/// rounded up to the next even number).
///
/// The set is closed under `r ↦ −r`, under rotation by `π` about the z-axis
/// and under reflection in the xy-plane, and contains the six axis points.
/// The remaining points follow a golden-angle spiral over a fundamental domain
/// of that symmetry group.
pub fn symmetric_bloch_grid(resolution: usize) -> Vec<[f64; 3]> {
    let res = resolution.max(6);
    let res = res + res % 2;
    let mut pts = vec![
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
    ];
    let rest = res - 6;
    let (generic, equatorial) = if rest.is_multiple_of(4) {
        (rest / 4, 0)
    } else {
        ((rest - 2) / 4, 1)
    };
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    for k in 0..generic {
        let z = (k as f64 + 0.5) / generic as f64;
        // azimuths in [0, π); the rotation by π supplies the other half
        let phi = ((k as f64 * golden).fract() + 0.5 / generic as f64).fract() * PI;
        let rho = (1.0 - z * z).sqrt();
        let (x, y) = (rho * phi.cos(), rho * phi.sin());
        pts.push([x, y, z]);
        pts.push([-x, -y, z]);
        pts.push([x, y, -z]);
        pts.push([-x, -y, -z]);
    }
    if equatorial == 1 {
        let a = PI / 4.0;
        pts.push([a.cos(), a.sin(), 0.0]);
        pts.push([-a.cos(), -a.sin(), 0.0]);
    }
    pts
}

/// Latitude rings spaced by `angle`, each sampled with arc spacing at most
/// `angle`. Every point of the sphere lies within geodesic distance `angle`
/// of the grid.
pub fn ring_grid(angle: f64) -> Vec<[f64; 3]> {
    let rings = (PI / angle).ceil().max(1.0) as usize;
    let step = PI / rings as f64;
    let mut pts = Vec::new();
    for j in 0..=rings {
        let theta = j as f64 * step;
        let s = theta.sin();
        let count = ((2.0 * PI * s / step).ceil() as usize).max(1);
        for k in 0..count {
            let phi = 2.0 * PI * k as f64 / count as f64;
            pts.push([s * phi.cos(), s * phi.sin(), theta.cos()]);
        }
    }
    pts
}

/// Geodesic angle between two unit vectors.
pub fn angle_between(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    dot.clamp(-1.0, 1.0).acos()
}
