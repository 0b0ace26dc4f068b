#![allow(dead_code)]

use git_channel::model::{AsymmetricParams, SymmetricParams, SystemParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo..hi))
}

/// Rates spanning several decades around `ω_B = 1`.
pub fn random_symmetric(rng: &mut ChaCha8Rng) -> SymmetricParams {
    SymmetricParams::new(
        1.0,
        log_uniform(rng, -4.0, 0.0),
        log_uniform(rng, -3.0, 1.0),
        log_uniform(rng, -3.0, 1.0),
        log_uniform(rng, -4.0, 0.0),
        log_uniform(rng, 0.0, 6.0),
    )
    .unwrap()
}

/// Two distinct systems whose mechanical frequencies differ by at most a few
/// mechanical linewidths, with couplings and detunings left generic.
pub fn random_asymmetric(rng: &mut ChaCha8Rng) -> AsymmetricParams {
    let omega_b = rng.random_range(50.0..150.0);
    let sys = |rng: &mut ChaCha8Rng, w: f64| SystemParams {
        omega_b: w,
        gamma: log_uniform(rng, -2.0, 0.0),
        kappa: log_uniform(rng, 0.0, 1.0),
        g: log_uniform(rng, -1.0, 0.5),
        delta: w + rng.random_range(-1.0..1.0),
        n_thermal: log_uniform(rng, 0.0, 2.0),
    };
    let s1 = sys(rng, omega_b);
    let mut s2 = sys(rng, omega_b);
    s2.omega_b = omega_b + rng.random_range(-5.0..5.0) * s2.gamma;
    AsymmetricParams::new(s1, s2, log_uniform(rng, -1.5, 0.0)).unwrap()
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> (f64, f64) {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while (hi - lo) > rel_tol * (a.abs() + b.abs()).max(1e-300) {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        }
        if hi - lo < 1e-300 {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Maximizes `f(x, y)` over a box: coarse `n × n` grid, then Powell-style
/// sweeps (one golden-section search per axis plus one along the net move of
/// the sweep) in brackets that shrink around the best point.
pub fn grid_golden_max_2d(f: &dyn Fn(f64, f64) -> f64, xr: (f64, f64), yr: (f64, f64), n: usize, rel_tol: f64) -> (f64, f64, f64) {
    let at = |r: (f64, f64), i: usize| r.0 + (r.1 - r.0) * i as f64 / (n - 1) as f64;
    let (mut bx, mut by, mut best) = (xr.0, yr.0, f64::NEG_INFINITY);
    for i in 0..n {
        for j in 0..n {
            let v = f(at(xr, i), at(yr, j));
            if v > best {
                (bx, by, best) = (at(xr, i), at(yr, j), v);
            }
        }
    }
    let mut hx = (xr.1 - xr.0) / (n - 1) as f64;
    let mut hy = (yr.1 - yr.0) / (n - 1) as f64;
    for _ in 0..400 {
        let (px, py) = (bx, by);
        bx = golden_max(&|x| f(x, by), bx - hx, bx + hx, rel_tol).0;
        by = golden_max(&|y| f(bx, y), by - hy, by + hy, rel_tol).0;
        let (dx, dy) = (bx - px, by - py);
        if dx != 0.0 || dy != 0.0 {
            let (sx, sy) = (bx, by);
            let t = golden_max(&|t| f(sx + t * dx, sy + t * dy), -2.0, 20.0, rel_tol).0;
            if f(sx + t * dx, sy + t * dy) > f(sx, sy) {
                (bx, by) = (sx + t * dx, sy + t * dy);
            }
        }
        let moved_x = (bx - px).abs();
        let moved_y = (by - py).abs();
        // Keep brackets a few times the last move, never below the tolerance scale.
        hx = (4.0 * moved_x).max(hx * 0.5).max(rel_tol * bx.abs().max(1.0));
        hy = (4.0 * moved_y).max(hy * 0.5).max(rel_tol * by.abs().max(1.0));
        if moved_x <= rel_tol * bx.abs().max(1.0) && moved_y <= rel_tol * by.abs().max(1.0) {
            break;
        }
    }
    (bx, by, f(bx, by))
}
