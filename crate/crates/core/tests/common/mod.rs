//! Shared oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use couette::operators::assemble;
use couette::random::DirichletSampler;
use couette::sim::{buoyancy_rhs, f1, f2, g1, g2, temperature_nonlinear, vorticity_nonlinear, zero_mode_rhs, SimState};
use couette::{CVec, FlowParams, RadialGrid};

/// Samples on `m` equispaced angles, indexed `[j][i]` for angle `j`, node `i`.
pub type Physical = Vec<CVec>;

fn theta(j: usize, m: usize) -> f64 {
    2.0 * std::f64::consts::PI * j as f64 / m as f64
}

/// `Σ_k c_k (ik)^p e^{ikθ_j}` by direct summation.
pub fn synth(modes: &[CVec], m: usize, theta_derivs: u32) -> Physical {
    let k_max = (modes.len() / 2) as i64;
    let n = modes[0].len();
    (0..m)
        .map(|j| {
            let th = theta(j, m);
            let mut col = CVec::zeros(n);
            for (idx, c) in modes.iter().enumerate() {
                let k = idx as i64 - k_max;
                let factor = Complex64::new(0.0, k as f64).powu(theta_derivs) * Complex64::from_polar(1.0, k as f64 * th);
                col += c * factor;
            }
            col
        })
        .collect()
}

/// `(1/m) Σ_j f(θ_j) e^{-ikθ_j}`.
pub fn project(field: &Physical, k: i64) -> CVec {
    let m = field.len();
    let mut out = CVec::zeros(field[0].len());
    for (j, col) in field.iter().enumerate() {
        out += col * Complex64::from_polar(1.0 / m as f64, -(k as f64) * theta(j, m));
    }
    out
}

/// Radial derivative of every angular column.
pub fn d_r(grid: &RadialGrid, field: &Physical) -> Physical {
    field.iter().map(|c| grid.differentiate(c)).collect()
}

pub fn zip(a: &Physical, b: &Physical, f: impl Fn(usize, Complex64, Complex64) -> Complex64) -> Physical {
    a.iter()
        .zip(b)
        .map(|(x, y)| CVec::from_iterator(x.len(), x.iter().zip(y.iter()).enumerate().map(|(i, (&u, &v))| f(i, u, v))))
        .collect()
}

pub fn map(a: &Physical, f: impl Fn(usize, Complex64) -> Complex64) -> Physical {
    a.iter()
        .map(|x| CVec::from_iterator(x.len(), x.iter().enumerate().map(|(i, &u)| f(i, u))))
        .collect()
}

/// Stored profile to plain coefficient: `r^{-1/2} e^{-ikAt}` for `k ≠ 0`.
pub fn unweight(grid: &RadialGrid, k: i64, v: &CVec, a: f64, t: f64) -> CVec {
    if k == 0 {
        return v.clone();
    }
    let r = grid.nodes();
    let ph = Complex64::from_polar(1.0, -(k as f64) * a * t);
    CVec::from_iterator(v.len(), v.iter().enumerate().map(|(i, z)| z * ph / r[i].sqrt()))
}

pub fn reweight(grid: &RadialGrid, k: i64, v: &CVec, a: f64, t: f64) -> CVec {
    if k == 0 {
        return v.clone();
    }
    let r = grid.nodes();
    let ph = Complex64::from_polar(1.0, (k as f64) * a * t);
    CVec::from_iterator(v.len(), v.iter().enumerate().map(|(i, z)| z * ph * r[i].sqrt()))
}

fn max_rel(pairs: &[(CVec, CVec)]) -> f64 {
    let scale = pairs.iter().flat_map(|(_, o)| o.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let diff = pairs
        .iter()
        .map(|(a, o)| (a - o).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Random complex state with modes `-K..=K`, time `t` and rotation `a`.
pub fn random_state(seed: u64, params: &FlowParams, grid: &RadialGrid, t: f64) -> SimState {
    let k_max = params.k_max as i64;
    let mut smp = DirichletSampler::with_modes(seed, 6);
    let ops: Vec<_> = (-k_max..=k_max).map(|k| assemble(params, k, grid).unwrap()).collect();
    let omega: Vec<CVec> = (-k_max..=k_max).map(|_| smp.profile(grid)).collect();
    let rho: Vec<CVec> = (-k_max..=k_max).map(|_| smp.profile(grid)).collect();
    let mut s = SimState::from_profiles(omega, rho, &ops, 1e-3).unwrap();
    s.t = t;
    s
}

/// Largest relative deviation between the mode-space terms and the
/// pseudospectral oracle, per family:
/// `[f1, f2, g1, g2, buoyancy, zero_mode, transport]`.
pub fn oracle_deviation(seed: u64, params: &FlowParams, grid: &RadialGrid, t: f64) -> [f64; 7] {
    let k_max = params.k_max as i64;
    let m = 3 * params.k_max + 1;
    let s = random_state(seed, params, grid, t);
    let r = grid.nodes().to_vec();
    let a = params.a;
    let modes = || -k_max..=k_max;
    let plain = |f: &[couette::ModeField]| f.iter().map(|x| unweight(grid, x.k, &x.values, a, t)).collect::<Vec<_>>();
    let weighted = |f: &[couette::ModeField]| {
        f.iter()
            .map(|x| if x.k == 0 { reweight_zero(grid, &x.values) } else { x.values.clone() })
            .collect::<Vec<_>>()
    };

    // Convolution-form sums on weighted profiles.
    let pw = weighted(&s.phi);
    let ww = weighted(&s.omega);
    let rw = weighted(&s.rho);
    let p_phys = synth(&pw, m, 0);
    let dp_phys = d_r(grid, &map(&p_phys, |i, z| z / r[i].sqrt()));
    let pth_phys = synth(&pw, m, 1);
    let mut out = [0.0; 7];
    for (slot, field, is_g) in [(0usize, &ww, false), (2, &rw, true)] {
        let f_phys = synth(field, m, 0);
        let o1 = zip(&dp_phys, &f_phys, |_, u, v| u * v);
        let o2 = zip(&pth_phys, &f_phys, |i, u, v| u * v * r[i].powf(-1.5));
        let mut p1 = Vec::new();
        let mut p2 = Vec::new();
        for k in modes() {
            let (a1, a2) = if is_g {
                (g1(&pw, field, k, grid), g2(&pw, field, k, grid))
            } else {
                (f1(&pw, field, k, grid), f2(&pw, field, k, grid))
            };
            p1.push((a1, project(&o1, k)));
            p2.push((a2, project(&o2, k)));
        }
        out[slot] = max_rel(&p1);
        out[slot + 1] = max_rel(&p2);
    }

    // Buoyancy `cos θ ∂_rρ - (sin θ / r) ∂_θρ` on plain coefficients.
    let rho_hat = plain(&s.rho);
    let rho_phys = synth(&rho_hat, m, 0);
    let drho = d_r(grid, &rho_phys);
    let rho_th = synth(&rho_hat, m, 1);
    let buoy: Physical = (0..m)
        .map(|j| {
            let th = theta(j, m);
            CVec::from_iterator(r.len(), (0..r.len()).map(|i| th.cos() * drho[j][i] - th.sin() / r[i] * rho_th[j][i]))
        })
        .collect();
    let pairs: Vec<_> = modes()
        .map(|k| {
            (
                buoyancy_rhs(&s.rho, k, t, params, grid).values,
                reweight(grid, k, &project(&buoy, k), a, t) * Complex64::new(params.g_scale, 0.0),
            )
        })
        .collect();
    out[4] = max_rel(&pairs);

    // Transport `(1/r)(∂_rφ ∂_θf - ∂_θφ ∂_rf)`.
    let phi_phys = synth(&plain(&s.phi), m, 0);
    let dphi = d_r(grid, &phi_phys);
    let phi_th = synth(&plain(&s.phi), m, 1);
    let jac = |f_hat: &[CVec]| -> Physical {
        let fp = synth(f_hat, m, 0);
        let df = d_r(grid, &fp);
        let fth = synth(f_hat, m, 1);
        (0..m)
            .map(|j| CVec::from_iterator(r.len(), (0..r.len()).map(|i| (dphi[j][i] * fth[j][i] - phi_th[j][i] * df[j][i]) / r[i])))
            .collect()
    };
    let jw = jac(&plain(&s.omega));
    let jr = jac(&rho_hat);
    let (zw, zr) = zero_mode_rhs(&s, params, grid);
    let ow = project(&buoy, 0) * Complex64::new(params.g_scale, 0.0) - project(&jw, 0);
    let or = -project(&jr, 0);
    out[5] = max_rel(&[(zw, ow), (zr, or)]);
    let mut pairs = Vec::new();
    for k in modes() {
        pairs.push((
            vorticity_nonlinear(&s.omega, &s.phi, k, t, a, grid).values,
            reweight(grid, k, &project(&jw, k), a, t),
        ));
        pairs.push((
            temperature_nonlinear(&s.rho, &s.phi, k, t, a, grid).values,
            reweight(grid, k, &project(&jr, k), a, t),
        ));
    }
    out[6] = max_rel(&pairs);
    out
}

fn reweight_zero(grid: &RadialGrid, v: &CVec) -> CVec {
    let r = grid.nodes();
    CVec::from_iterator(v.len(), v.iter().enumerate().map(|(i, z)| z * r[i].sqrt()))
}

/// Chebyshev collocation eigenvalues of `-(∂² - s/r²)` on `[1, R]` with
/// Dirichlet walls, ascending.
pub fn chebyshev_dirichlet_eigenvalues(aspect: f64, shift: f64, n: usize) -> Vec<f64> {
    // Trefethen's cheb: nodes x_j = cos(πj/n), differentiation matrix D.
    let x: Vec<f64> = (0..=n).map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos()).collect();
    let c = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
    let mut d = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                d[(i, j)] = c(i) / c(j) * sign / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    // Map [-1, 1] to [1, R]: r = 1 + (x + 1)(R - 1)/2.
    let scale = 2.0 / (aspect - 1.0);
    let d2 = &d * &d * (scale * scale);
    let r: Vec<f64> = x.iter().map(|&x| 1.0 + (x + 1.0) * (aspect - 1.0) / 2.0).collect();
    let a = DMatrix::from_fn(n - 1, n - 1, |i, j| {
        let v = -d2[(i + 1, j + 1)];
        if i == j {
            v + shift / (r[i + 1] * r[i + 1])
        } else {
            v
        }
    });
    let mut ev: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Log-log least-squares slope, written out here so tests do not rely on the
/// library's own regression.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
