//! Spin-s representation: S^z basis, ladder coefficients, binomial weights.
//!
//! Spin is carried as the integer 2s everywhere so half-integer values
//! never touch floating point in APIs or serialized configs.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// Coefficient tables for the (2s+1)-dimensional spin representation.
///
/// Vectors are indexed by the basis position n = 0..=2s, corresponding to
/// the S^z eigenvalue m = s - n (highest weight first).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRep {
    twice_s: u32,
    /// m-values s, s-1, ..., -s.
    sz_diag: Vec<f64>,
    /// lambda^+_m = sqrt((s-m)(s+m+1)) at m = sz_diag[n].
    lambda_plus: Vec<f64>,
    /// lambda^-_m = sqrt((s+m)(s-m+1)) at m = sz_diag[n].
    lambda_minus: Vec<f64>,
    /// kappa_n = sqrt(C(2s, n)), computed by multiplicative recurrence.
    kappa: Vec<f64>,
}

/// Spin operator axes, including the ladder combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Dense complex matrix on one or two local sites.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    pub dim: usize,
    /// Row-major dim x dim entries.
    pub entries: Vec<Complex64>,
}

impl LocalOperator {
    pub fn zeros(dim: usize) -> Self {
        LocalOperator {
            dim,
            entries: alloc::vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn dagger(&self) -> Self {
        let mut out = LocalOperator::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(c, r, self.at(r, c).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &LocalOperator) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = LocalOperator::zeros(self.dim);
        for r in 0..self.dim {
            for k in 0..self.dim {
                let a = self.at(r, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..self.dim {
                    let v = out.at(r, c) + a * other.at(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Kronecker product, first factor slowest.
    pub fn kron(&self, other: &LocalOperator) -> Self {
        let d = self.dim * other.dim;
        let mut out = LocalOperator::zeros(d);
        for ra in 0..self.dim {
            for ca in 0..self.dim {
                let a = self.at(ra, ca);
                if a == Complex64::ZERO {
                    continue;
                }
                for rb in 0..other.dim {
                    for cb in 0..other.dim {
                        out.set(ra * other.dim + rb, ca * other.dim + cb, a * other.at(rb, cb));
                    }
                }
            }
        }
        out
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        LocalOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &LocalOperator) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.dim);
        let mut out = alloc::vec![Complex64::ZERO; self.dim];
        for r in 0..self.dim {
            let mut acc = Complex64::ZERO;
            for c in 0..self.dim {
                acc += self.at(r, c) * x[c];
            }
            out[r] = acc;
        }
        out
    }
}

/// Populate the coefficient tables for spin s = twice_s / 2.
pub fn build_spin_rep(twice_s: u32) -> Result<SpinRep> {
    if twice_s < 1 {
        return Err(Error::InvalidSpin { twice_s });
    }
    let dim = twice_s as usize + 1;
    let s = twice_s as f64 / 2.0;
    let mut sz_diag = Vec::with_capacity(dim);
    let mut lambda_plus = Vec::with_capacity(dim);
    let mut lambda_minus = Vec::with_capacity(dim);
    for n in 0..dim {
        let m = s - n as f64;
        sz_diag.push(m);
        lambda_plus.push(libm::sqrt((s - m) * (s + m + 1.0)));
        lambda_minus.push(libm::sqrt((s + m) * (s - m + 1.0)));
    }
    // kappa_n = sqrt(C(2s, n)) via products of ratios; stays finite to 2s ~ 60
    let mut kappa = Vec::with_capacity(dim);
    kappa.push(1.0);
    for n in 1..dim {
        let prev = kappa[n - 1];
        kappa.push(prev * libm::sqrt((twice_s as f64 - n as f64 + 1.0) / n as f64));
    }
    Ok(SpinRep {
        twice_s,
        sz_diag,
        lambda_plus,
        lambda_minus,
        kappa,
    })
}

impl SpinRep {
    pub fn twice_s(&self) -> u32 {
        self.twice_s
    }

    pub fn s(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice_s as usize + 1
    }

    /// m-value at basis position n.
    pub fn m(&self, n: usize) -> f64 {
        self.sz_diag[n]
    }

    pub fn sz_diag(&self) -> &[f64] {
        &self.sz_diag
    }

    /// S^+ coefficient out of basis position n (target n-1); zero at n = 0.
    pub fn lambda_plus(&self, n: usize) -> f64 {
        self.lambda_plus[n]
    }

    /// S^- coefficient out of basis position n (target n+1); zero at n = 2s.
    pub fn lambda_minus(&self, n: usize) -> f64 {
        self.lambda_minus[n]
    }

    pub fn kappa(&self, n: usize) -> f64 {
        self.kappa[n]
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappa
    }
}

/// Dense matrix of a spin operator in the S^z basis (highest weight first).
pub fn spin_matrix(rep: &SpinRep, axis: Axis) -> LocalOperator {
    let dim = rep.dim();
    let mut out = LocalOperator::zeros(dim);
    match axis {
        Axis::Z => {
            for n in 0..dim {
                out.set(n, n, Complex64::new(rep.m(n), 0.0));
            }
        }
        Axis::Plus => {
            // S^+ |m> = lambda^+_m |m+1>: column n feeds row n-1
            for n in 1..dim {
                out.set(n - 1, n, Complex64::new(rep.lambda_plus(n), 0.0));
            }
        }
        Axis::Minus => {
            for n in 0..dim - 1 {
                out.set(n + 1, n, Complex64::new(rep.lambda_minus(n), 0.0));
            }
        }
        Axis::X => {
            let sp = spin_matrix(rep, Axis::Plus);
            let sm = spin_matrix(rep, Axis::Minus);
            for i in 0..dim * dim {
                out.entries[i] = 0.5 * (sp.entries[i] + sm.entries[i]);
            }
        }
        Axis::Y => {
            let sp = spin_matrix(rep, Axis::Plus);
            let sm = spin_matrix(rep, Axis::Minus);
            let half_over_i = Complex64::new(0.0, -0.5);
            for i in 0..dim * dim {
                out.entries[i] = half_over_i * (sp.entries[i] - sm.entries[i]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_spin() {
        assert!(matches!(build_spin_rep(0), Err(Error::InvalidSpin { .. })));
    }

    #[test]
    fn pauli_case() {
        let rep = build_spin_rep(1).unwrap();
        assert_eq!(rep.sz_diag(), &[0.5, -0.5]);
        assert_eq!(rep.kappas(), &[1.0, 1.0]);
        let sz = spin_matrix(&rep, Axis::Z);
        assert_eq!(sz.at(0, 0).re, 0.5);
        assert_eq!(sz.at(1, 1).re, -0.5);
    }

    #[test]
    fn spin_one_kappa_and_ladder() {
        let rep = build_spin_rep(2).unwrap();
        assert!((rep.kappa(1) - libm::sqrt(2.0)).abs() < 1e-15);
        assert_eq!(rep.kappa(0), 1.0);
        assert!((rep.kappa(2) - 1.0).abs() < 1e-15);
        // lambda^+ at m = 0 is sqrt(2)
        assert!((rep.lambda_plus(1) - libm::sqrt(2.0)).abs() < 1e-15);
    }

    #[test]
    fn spin_three_half_ladder() {
        let rep = build_spin_rep(3).unwrap();
        // lambda^- at m = 1/2: sqrt((3/2+1/2)(3/2-1/2+1)) = 2
        assert!((rep.lambda_minus(1) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn su2_commutators_and_casimir() {
        for twice_s in 1..=8u32 {
            let rep = build_spin_rep(twice_s).unwrap();
            let sx = spin_matrix(&rep, Axis::X);
            let sy = spin_matrix(&rep, Axis::Y);
            let sz = spin_matrix(&rep, Axis::Z);
            let comm_minus_isz: Vec<Complex64> = {
                let xy = sx.matmul(&sy);
                let yx = sy.matmul(&sx);
                xy.entries
                    .iter()
                    .zip(&yx.entries)
                    .zip(&sz.entries)
                    .map(|((a, b), c)| a - b - Complex64::new(0.0, 1.0) * c)
                    .collect()
            };
            for v in comm_minus_isz {
                assert!(v.norm() < 1e-14, "2s = {twice_s}");
            }
            let casimir = {
                let mut c = sx.matmul(&sx);
                c.add_assign(&sy.matmul(&sy));
                c.add_assign(&sz.matmul(&sz));
                c
            };
            let s = rep.s();
            let expect = s * (s + 1.0);
            for r in 0..rep.dim() {
                for c in 0..rep.dim() {
                    let want = if r == c { expect } else { 0.0 };
                    assert!((casimir.at(r, c).re - want).abs() < 1e-13);
                    assert!(casimir.at(r, c).im.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn hermiticity_and_ladder_adjoint() {
        let rep = build_spin_rep(5).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let m = spin_matrix(&rep, axis);
            let md = m.dagger();
            for (a, b) in m.entries.iter().zip(&md.entries) {
                assert!((a - b).norm() < 1e-15);
            }
        }
        let sp = spin_matrix(&rep, Axis::Plus);
        let smd = spin_matrix(&rep, Axis::Minus).dagger();
        for (a, b) in sp.entries.iter().zip(&smd.entries) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn ladder_binomial_consistency() {
        // lambda^-_{k+1} kappa_{s-k-1} = (s-k) kappa_{s-k} and the + twin,
        // indexed here by basis position n = s - k.
        for twice_s in 1..=8u32 {
            let rep = build_spin_rep(twice_s).unwrap();
            let s = rep.s();
            for n in 0..rep.dim() {
                let k = s - n as f64; // kappa subscript s - k equals n
                if n >= 1 {
                    // lambda^-_{k+1} kappa_{s-k-1} = (s-k) kappa_{s-k}
                    let lam_minus_kp1 = libm::sqrt((s + k + 1.0) * (s - k));
                    let lhs = lam_minus_kp1 * rep.kappa(n - 1);
                    let rhs = (s - k) * rep.kappa(n);
                    let denom = rhs.abs().max(1.0);
                    assert!((lhs - rhs).abs() / denom < 1e-14, "2s={twice_s} n={n}");
                }
                if n + 1 < rep.dim() {
                    // lambda^+_{k-1} kappa_{s-k+1} = (s+k) kappa_{s-k}
                    let lam_plus_km1 = libm::sqrt((s - k + 1.0) * (s + k));
                    let lhs = lam_plus_km1 * rep.kappa(n + 1);
                    let rhs = (s + k) * rep.kappa(n);
                    let denom = rhs.abs().max(1.0);
                    assert!((lhs - rhs).abs() / denom < 1e-14, "2s={twice_s} n={n}");
                }
            }
        }
    }

    #[test]
    fn kappa_symmetric() {
        let rep = build_spin_rep(7).unwrap();
        for n in 0..rep.dim() {
            let opp = rep.dim() - 1 - n;
            assert!((rep.kappa(n) - rep.kappa(opp)).abs() < 1e-12 * rep.kappa(n));
        }
    }
}
