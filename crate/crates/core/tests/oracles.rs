//! Independent reference computations for the two-mode instance
//! (lambda = {1, 4}, omega = (0.3, 0.8), psi = 2 phi_1 + phi_2, r = 1).
//! They are slow and only re-run on demand (`cargo test -- --ignored`); the
//! values they print are frozen into `two_mode.rs`.

mod common;

use common::*;
use timeopt_core::control::minimal_norm_curve;

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// J for the two-mode instance, built from raw sine samples and composite
/// Gauss-Legendre quadrature (40 panels x 16 points).
pub fn j_oracle(tau: f64, eta: [f64; 2]) -> f64 {
    let n = 63;
    let h = 1.0 / (n as f64 + 1.0);
    let lam = [1.0, 4.0];
    let psi = [2.0, 1.0];
    let mut g = [[0.0; 2]; 2];
    for i in 1..=n {
        let x = i as f64 * h;
        if x > 0.3 && x < 0.8 {
            let s = [
                2f64.sqrt() * (std::f64::consts::PI * x).sin(),
                2f64.sqrt() * (2.0 * std::f64::consts::PI * x).sin(),
            ];
            for a in 0..2 {
                for b in 0..2 {
                    g[a][b] += h * s[a] * s[b];
                }
            }
        }
    }
    let gl = gauss_legendre(16);
    let panels = 40;
    let width = tau / panels as f64;
    let mut s_int = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for &(x, w) in &gl {
            let t = mid + 0.5 * width * x;
            let a = [
                (-lam[0] * (tau - t)).exp() * eta[0],
                (-lam[1] * (tau - t)).exp() * eta[1],
            ];
            let q = a[0] * (g[0][0] * a[0] + g[0][1] * a[1]) + a[1] * (g[1][0] * a[0] + g[1][1] * a[1]);
            s_int += 0.5 * width * w * q.max(0.0).sqrt();
        }
    }
    let lin = psi[0] * (-lam[0] * tau).exp() * eta[0] + psi[1] * (-lam[1] * tau).exp() * eta[1];
    0.5 * s_int * s_int + lin + (eta[0] * eta[0] + eta[1] * eta[1]).sqrt()
}

/// Nelder-Mead on the plane, restarted until the simplex stops moving.
pub fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2]) -> [f64; 2] {
    let mut best = start;
    for _restart in 0..20 {
        let mut s = [best, [best[0] + 0.1, best[1]], [best[0], best[1] + 0.1]];
        let mut fs = s.map(&f);
        for _ in 0..20_000 {
            let mut idx = [0, 1, 2];
            idx.sort_by(|&a, &b| fs[a].partial_cmp(&fs[b]).unwrap());
            s = idx.map(|i| s[i]);
            fs = idx.map(|i| fs[i]);
            let spread = ((s[2][0] - s[0][0]).abs()).max((s[2][1] - s[0][1]).abs());
            if spread < 1e-13 {
                break;
            }
            let c = [(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0];
            let pt = |k: f64| [c[0] + k * (s[2][0] - c[0]), c[1] + k * (s[2][1] - c[1])];
            let xr = pt(-1.0);
            let fr = f(xr);
            if fr < fs[0] {
                let xe = pt(-2.0);
                let fe = f(xe);
                if fe < fr {
                    s[2] = xe;
                    fs[2] = fe;
                } else {
                    s[2] = xr;
                    fs[2] = fr;
                }
            } else if fr < fs[1] {
                s[2] = xr;
                fs[2] = fr;
            } else {
                let xc = if fr < fs[2] { pt(-0.5) } else { pt(0.5) };
                let fc = f(xc);
                if fc < fs[2].min(fr) {
                    s[2] = xc;
                    fs[2] = fc;
                } else {
                    for k in 1..3 {
                        s[k] = [(s[k][0] + s[0][0]) / 2.0, (s[k][1] + s[0][1]) / 2.0];
                        fs[k] = f(s[k]);
                    }
                }
            }
        }
        let moved = (s[0][0] - best[0]).abs() + (s[0][1] - best[1]).abs();
        best = s[0];
        if moved < 1e-13 {
            break;
        }
    }
    best
}

#[test]
#[ignore]
fn derive_two_mode_minimizer() {
    let eta = nelder_mead(|e| j_oracle(0.5, e), [-1.0, -1.0]);
    println!(
        "eta_hat(tau = 0.5) = [{:.12}, {:.12}], J = {:.12}",
        eta[0],
        eta[1],
        j_oracle(0.5, eta)
    );
}

#[test]
#[ignore]
fn derive_two_mode_time_optimal() {
    let p = two_mode_problem();
    let tau_hat = p.tau_hat();
    let n = 10_000;
    let taus: Vec<f64> = (1..=n).map(|i| tau_hat * i as f64 / (n + 1) as f64).collect();
    let curve = minimal_norm_curve(&p, &taus, &settings()).unwrap();
    let target = 2.0;
    let i = curve.iter().position(|c| c.n_star < target).unwrap();
    let (a, b) = (&curve[i - 1], &curve[i]);
    let tau = a.tau + (a.n_star - target) * (b.tau - a.tau) / (a.n_star - b.n_star);
    println!("tau_hat = {tau_hat:.12}, tau*(M = 2) = {tau:.12}");
}
