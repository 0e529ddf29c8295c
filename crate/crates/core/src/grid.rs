//! Radial discretization of the annulus gap `[1, R]`.
//!
//! Nodes are the Legendre-Gauss-Lobatto points mapped affinely onto `[1, R]`.
//! They cluster quadratically at both walls like the Chebyshev extrema, carry
//! positive quadrature weights, and integrate polynomials of degree `2n - 3`
//! exactly. The last property makes the weak-form stiffness matrices used by
//! [`crate::operators`] exact Galerkin integrals, so discrete energy identities
//! hold to roundoff.
//!
//! Every inner product and norm here is the quadrature-weighted `L²(dr)` one.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, domain, Error, Result};

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

/// Collocation grid on `[1, R]` with its derivative matrix and quadrature.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    aspect: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    deriv: DMatrix<f64>,
    /// Cholesky factor of the `H_r^1` Gram matrix on the Dirichlet space.
    h1r_gram: Cholesky<f64, Dyn>,
}

/// The four norms reported for a radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub h1r: f64,
    pub h1r_dual: f64,
    pub linf: f64,
}

impl RadialGrid {
    /// Builds the grid with `n` nodes (walls included) on `[1, aspect]`.
    pub fn build(aspect: f64, n: usize) -> Result<Self> {
        if !(aspect > 1.0) || !aspect.is_finite() {
            return Err(domain(format!("aspect ratio R must exceed 1, got {aspect}")));
        }
        if n < 8 {
            return Err(domain(format!("need at least 8 radial nodes, got {n}")));
        }
        let (x, w, d) = lobatto_reference(n);
        let half = 0.5 * (aspect - 1.0);
        let mut nodes: Vec<f64> = x.iter().map(|&xi| 1.0 + half * (xi + 1.0)).collect();
        nodes[0] = 1.0;
        nodes[n - 1] = aspect;
        let weights: Vec<f64> = w.iter().map(|&wi| wi * half).collect();
        let deriv = d / half;

        let m = n - 2;
        let grad_iso = DMatrix::from_fn(n, m, |i, j| weights[i].sqrt() * deriv[(i, j + 1)] / weights[j + 1].sqrt());
        let mut gram = grad_iso.transpose() * &grad_iso;
        for j in 0..m {
            let r = nodes[j + 1];
            gram[(j, j)] += 1.0 / (r * r);
        }
        let h1r_gram = Cholesky::new(gram).ok_or_else(|| Error::Conditioning("H_r^1 Gram matrix is not positive definite".into()))?;
        Ok(Self {
            aspect,
            nodes,
            weights,
            deriv,
            h1r_gram,
        })
    }

    pub fn aspect(&self) -> f64 {
        self.aspect
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Number of interior (Dirichlet) unknowns.
    pub fn interior(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn deriv(&self) -> &DMatrix<f64> {
        &self.deriv
    }

    /// Cholesky factor of the Dirichlet `H_r^1` Gram matrix in isometric
    /// coordinates; `‖F‖_{H_r^{-1}} = ‖L^{-1} F̂‖`.
    pub(crate) fn h1r_gram(&self) -> &Cholesky<f64, Dyn> {
        &self.h1r_gram
    }

    /// Nodal values of `f(r)`.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> CVec {
        CVec::from_iterator(self.n(), self.nodes.iter().map(|&r| Complex64::new(f(r), 0.0)))
    }

    /// Nodal values of a complex-valued profile.
    pub fn sample_complex(&self, f: impl Fn(f64) -> Complex64) -> CVec {
        CVec::from_iterator(self.n(), self.nodes.iter().map(|&r| f(r)))
    }

    /// Nodal derivative of a nodal profile.
    pub fn differentiate(&self, f: &CVec) -> CVec {
        let n = self.n();
        let mut out = CVec::zeros(n);
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += f[j] * self.deriv[(i, j)];
            }
            out[i] = acc;
        }
        out
    }

    pub fn differentiate_real(&self, f: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(f);
        (&self.deriv * v).iter().copied().collect()
    }

    /// Quadrature of nodal values.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// `⟨f, g⟩ = ∫₁^R f ḡ dr`.
    pub fn inner_product(&self, f: &CVec, g: &CVec) -> Result<Complex64> {
        check_len(self.n(), f.len())?;
        check_len(self.n(), g.len())?;
        Ok(self.inner(f, g))
    }

    pub(crate) fn inner(&self, f: &CVec, g: &CVec) -> Complex64 {
        self.weights.iter().zip(f.iter().zip(g.iter())).map(|(w, (a, b))| a * b.conj() * *w).sum()
    }

    /// Weighted `‖p f‖²` for a nodal real multiplier `p`.
    pub(crate) fn weighted_sq(&self, f: &CVec, p: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(f.iter())
            .map(|((&r, &w), v)| {
                let s = p(r);
                w * s * s * v.norm_sqr()
            })
            .sum()
    }

    pub fn l2(&self, f: &CVec) -> f64 {
        self.weighted_sq(f, |_| 1.0).sqrt()
    }

    /// `‖f/r‖`.
    pub fn l2_over_r(&self, f: &CVec) -> f64 {
        self.weighted_sq(f, |r| 1.0 / r).sqrt()
    }

    /// `‖r^p f‖` for a real power `p`.
    pub fn l2_rpow(&self, f: &CVec, p: f64) -> f64 {
        self.weighted_sq(f, |r| r.powf(p)).sqrt()
    }

    pub fn l1_rpow(&self, f: &CVec, p: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(f.iter())
            .map(|((&r, &w), v)| w * r.powf(p) * v.norm())
            .sum()
    }

    pub fn linf(&self, f: &CVec) -> f64 {
        f.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |r^p f|` over the nodes.
    pub fn linf_rpow(&self, f: &CVec, p: f64) -> f64 {
        self.nodes.iter().zip(f.iter()).map(|(&r, v)| r.powf(p) * v.norm()).fold(0.0, f64::max)
    }

    /// `‖f‖_{H_r^1} = (‖f'‖² + ‖f/r‖²)^{1/2}`.
    pub fn h1r(&self, f: &CVec) -> f64 {
        let df = self.differentiate(f);
        (self.weighted_sq(&df, |_| 1.0) + self.weighted_sq(f, |r| 1.0 / r)).sqrt()
    }

    /// Dual norm over the Dirichlet test space: solves `(-∂_r² + r^{-2}) u = f`
    /// with `u(1) = u(R) = 0` in weak form and returns `Re⟨f, u⟩^{1/2}`.
    pub fn h1r_dual(&self, f: &CVec) -> Result<f64> {
        check_len(self.n(), f.len())?;
        let m = self.interior();
        let load = DVector::from_fn(m, |j, _| f[j + 1] * self.weights[j + 1].sqrt());
        let re = self.h1r_gram.solve(&load.map(|z| z.re));
        let im = self.h1r_gram.solve(&load.map(|z| z.im));
        let val: f64 = (0..m).map(|j| load[j].re * re[j] + load[j].im * im[j]).sum();
        if !val.is_finite() {
            return Err(Error::Conditioning("dual-norm auxiliary solve produced a non-finite value".into()));
        }
        Ok(val.max(0.0).sqrt())
    }

    pub fn norms(&self, f: &CVec) -> Result<NormReport> {
        check_len(self.n(), f.len())?;
        Ok(NormReport {
            l2: self.l2(f),
            h1r: self.h1r(f),
            h1r_dual: self.h1r_dual(f)?,
            linf: self.linf(f),
        })
    }
}

/// LGL nodes (ascending), weights and differentiation matrix on `[-1, 1]`.
fn lobatto_reference(n: usize) -> (Vec<f64>, Vec<f64>, DMatrix<f64>) {
    let order = n - 1;
    let nf = order as f64;
    let mut x: Vec<f64> = (0..n).map(|j| (std::f64::consts::PI * (order - j) as f64 / nf).cos()).collect();
    let mut p_top = vec![0.0; n];
    for (i, xi) in x.iter_mut().enumerate() {
        for _ in 0..100 {
            let (pn, pnm1) = legendre_pair(order, *xi);
            let step = (*xi * pn - pnm1) / (nf * pn);
            *xi -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        p_top[i] = legendre_pair(order, *xi).0;
    }
    x[0] = -1.0;
    x[n - 1] = 1.0;
    p_top[0] = legendre_pair(order, -1.0).0;
    p_top[n - 1] = 1.0;
    let weights: Vec<f64> = p_top.iter().map(|p| 2.0 / (nf * (nf + 1.0) * p * p)).collect();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            if i != j {
                let v = p_top[i] / (p_top[j] * (x[i] - x[j]));
                d[(i, j)] = v;
                row += v;
            }
        }
        d[(i, i)] = -row;
    }
    (x, weights, d)
}

/// `(P_N(x), P_{N-1}(x))` by the three-term recurrence.
fn legendre_pair(order: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    if order == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=order {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * cur - (kf - 1.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_err(a: &CVec, b: &CVec) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(RadialGrid::build(1.0, 16), Err(Error::Domain(_))));
        assert!(matches!(RadialGrid::build(0.5, 16), Err(Error::Domain(_))));
        assert!(matches!(RadialGrid::build(2.0, 7), Err(Error::Domain(_))));
    }

    #[test]
    fn nodes_and_weights() {
        for &(r, n) in &[(2.0, 8), (2.0, 33), (4.0, 64), (16.0, 512)] {
            let g = RadialGrid::build(r, n).unwrap();
            assert_eq!(g.nodes()[0], 1.0);
            assert_eq!(g.nodes()[n - 1], r);
            assert!(g.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(g.weights().iter().all(|&w| w > 0.0));
            let total: f64 = g.weights().iter().sum();
            assert!(((total - (r - 1.0)) / (r - 1.0)).abs() < 1e-12, "{total}");
        }
    }

    #[test]
    fn derivative_of_constant_and_linear() {
        let g = RadialGrid::build(2.0, 16).unwrap();
        let one = g.sample(|_| 1.0);
        assert!(g.linf(&g.differentiate(&one)) < 1e-10);
        let lin = g.sample(|r| r);
        assert!(max_err(&g.differentiate(&lin), &one) < 1e-10);
    }

    #[test]
    fn derivative_of_cubic() {
        let g = RadialGrid::build(2.0, 24).unwrap();
        let d = g.differentiate(&g.sample(|r| r.powi(3)));
        assert!(max_err(&d, &g.sample(|r| 3.0 * r * r)) < 1e-9);
    }

    #[test]
    fn derivative_of_monomials_spectral() {
        for &r_out in &[2.0, 4.0] {
            let g = RadialGrid::build(r_out, 32).unwrap();
            for m in 1..=8 {
                let d = g.differentiate(&g.sample(|r| r.powi(m)));
                let exact = g.sample(|r| m as f64 * r.powi(m - 1));
                let scale = exact.iter().map(|z| z.norm()).fold(1.0, f64::max);
                assert!(max_err(&d, &exact) / scale < 1e-8, "R={r_out} m={m}");
            }
        }
    }

    #[test]
    fn quadrature_exact_for_polynomials() {
        let g = RadialGrid::build(3.0, 20).unwrap();
        for deg in 0..=18 {
            let vals: Vec<f64> = g.nodes().iter().map(|r| r.powi(deg)).collect();
            let exact = (3f64.powi(deg + 1) - 1.0) / (deg as f64 + 1.0);
            assert!(((g.integrate(&vals) - exact) / exact).abs() < 1e-10, "deg {deg}");
        }
    }

    #[test]
    fn inner_product_examples() {
        let g = RadialGrid::build(2.0, 16).unwrap();
        let one = g.sample(|_| 1.0);
        assert!((g.inner_product(&one, &one).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let r = g.sample(|r| r);
        assert!((g.inner_product(&r, &r).unwrap().re - 7.0 / 3.0).abs() < 1e-10);
        let i_one = one.map(|z| z * Complex64::i());
        let v = g.inner_product(&i_one, &one).unwrap();
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let short = CVec::zeros(3);
        assert!(matches!(g.inner_product(&short, &one), Err(Error::Shape { .. })));
    }

    #[test]
    fn norm_examples() {
        let g = RadialGrid::build(2.0, 32).unwrap();
        let zero = CVec::zeros(32);
        let rep = g.norms(&zero).unwrap();
        assert_eq!(
            rep,
            NormReport {
                l2: 0.0,
                h1r: 0.0,
                h1r_dual: 0.0,
                linf: 0.0
            }
        );
        let f = g.sample(|r| r - 1.0);
        assert!((g.norms(&f).unwrap().l2 - (1.0f64 / 3.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn norms_converge_under_refinement() {
        let f = |r: f64| (r - 1.0) * (3.0 - r) * (0.7 * r).sin();
        let coarse = RadialGrid::build(3.0, 32).unwrap();
        let fine = RadialGrid::build(3.0, 64).unwrap();
        let a = coarse.norms(&coarse.sample(f)).unwrap();
        let b = fine.norms(&fine.sample(f)).unwrap();
        for (x, y) in [(a.l2, b.l2), (a.h1r, b.h1r), (a.h1r_dual, b.h1r_dual)] {
            assert!((x - y).abs() / y < 1e-8, "{x} vs {y}");
        }
    }
}
