//! Model variants, theta-parameterized couplings, and Hamiltonian action.
//!
//! The Hamiltonian is never materialized for matrix-free application:
//! bonds are walked in a fixed lexicographic (axis, site, range) order
//! with a single accumulation vector, so results are bit-reproducible.
//! A dense construction from two-site bond operators is provided as the
//! exact-diagonalization path, gated to dim^V <= 4096.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::elliptic::{ell, EllipticContext};
use crate::lattice::{Bond, Boundary, Lattice};
use crate::spin::{spin_matrix, Axis, LocalOperator, SpinRep};
use crate::{Error, Result};

/// Dense matrix-free budget (amplitudes), and the dense-matrix ED gate.
pub const MATRIX_FREE_BUDGET: usize = 1 << 24;
pub const DENSE_MATRIX_BUDGET: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Xyz,
    Xxz,
    /// eta = 1/2: anisotropic XY with J_x/J_y > 0.
    XyA,
    /// eta = 1/2 - tau: the second XY reduction.
    XyB,
    LongRange,
    DirectionDependent,
    OpenChain1d,
}

/// A fully specified model instance.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub variant: Variant,
    /// Global modulation parameter (the XY variants pin it themselves).
    pub eta: Complex64,
    /// Per-axis parameters, direction-dependent variant only.
    pub eta_per_axis: Vec<Complex64>,
    /// Absent for the XXZ variant, which is purely trigonometric.
    pub ctx: Option<EllipticContext>,
    pub spin: SpinRep,
    pub lattice: Lattice,
    /// (k, F_k) pairs, long-range variant only.
    pub long_range_weights: Vec<(usize, f64)>,
    /// Boundary phase, open-chain variant only.
    pub u0: Complex64,
}

impl ModelSpec {
    pub fn xyz(eta: Complex64, ctx: EllipticContext, spin: SpinRep, lattice: Lattice) -> Self {
        ModelSpec {
            variant: Variant::Xyz,
            eta,
            eta_per_axis: Vec::new(),
            ctx: Some(ctx),
            spin,
            lattice,
            long_range_weights: Vec::new(),
            u0: Complex64::ZERO,
        }
    }

    pub fn xxz(eta: Complex64, spin: SpinRep, lattice: Lattice) -> Self {
        ModelSpec {
            variant: Variant::Xxz,
            eta,
            eta_per_axis: Vec::new(),
            ctx: None,
            spin,
            lattice,
            long_range_weights: Vec::new(),
            u0: Complex64::ZERO,
        }
    }

    pub fn xy_a(ctx: EllipticContext, spin: SpinRep, lattice: Lattice) -> Self {
        let mut spec = Self::xyz(Complex64::new(0.5, 0.0), ctx, spin, lattice);
        spec.variant = Variant::XyA;
        spec
    }

    pub fn xy_b(ctx: EllipticContext, spin: SpinRep, lattice: Lattice) -> Self {
        let eta = Complex64::new(0.5, 0.0) - ctx.tau();
        let mut spec = Self::xyz(eta, ctx, spin, lattice);
        spec.variant = Variant::XyB;
        spec
    }

    pub fn long_range(
        eta: Complex64,
        ctx: EllipticContext,
        weights: Vec<(usize, f64)>,
        spin: SpinRep,
        lattice: Lattice,
    ) -> Self {
        let mut spec = Self::xyz(eta, ctx, spin, lattice);
        spec.variant = Variant::LongRange;
        spec.long_range_weights = weights;
        spec
    }

    pub fn direction_dependent(
        eta_per_axis: Vec<Complex64>,
        ctx: EllipticContext,
        spin: SpinRep,
        lattice: Lattice,
    ) -> Self {
        let mut spec = Self::xyz(eta_per_axis[0], ctx, spin, lattice);
        spec.variant = Variant::DirectionDependent;
        spec.eta_per_axis = eta_per_axis;
        spec
    }

    pub fn open_chain(
        eta: Complex64,
        ctx: EllipticContext,
        u0: Complex64,
        spin: SpinRep,
        lattice: Lattice,
    ) -> Self {
        debug_assert_eq!(lattice.boundary(), Boundary::Open);
        debug_assert_eq!(lattice.d(), 1);
        let mut spec = Self::xyz(eta, ctx, spin, lattice);
        spec.variant = Variant::OpenChain1d;
        spec.u0 = u0;
        spec
    }

    /// Total Hilbert-space dimension dim(spin)^V.
    pub fn state_len(&self) -> usize {
        self.spin.dim().pow(self.lattice.volume() as u32)
    }

    /// Modulation parameter for bonds along `axis` at neighbor range `k`.
    pub fn bond_eta(&self, axis: usize, range: usize) -> Complex64 {
        match self.variant {
            Variant::DirectionDependent => self.eta_per_axis[axis],
            Variant::LongRange => self.eta * range as f64,
            _ => self.eta,
        }
    }

    /// Couplings for bonds along `axis` at range `k`.
    pub fn couplings(&self, axis: usize, range: usize) -> Result<Couplings> {
        match self.variant {
            Variant::Xxz => Ok(couplings_xxz(self.eta)),
            _ => couplings_xyz(
                self.bond_eta(axis, range),
                self.ctx.as_ref().expect("elliptic variant carries a context"),
            ),
        }
    }
}

/// Exchange constants (J_x, J_y, J_z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub jx: Complex64,
    pub jy: Complex64,
    pub jz: Complex64,
}

impl Couplings {
    pub fn j_plus(&self) -> Complex64 {
        self.jx + self.jy
    }

    pub fn j_minus(&self) -> Complex64 {
        self.jx - self.jy
    }
}

/// (l4(eta)/l4(0), l3(eta)/l3(0), l2(eta)/l2(0)).
pub fn couplings_xyz(eta: Complex64, ctx: &EllipticContext) -> Result<Couplings> {
    let zero = Complex64::ZERO;
    Ok(Couplings {
        jx: ell(4, eta, ctx)?.value / ell(4, zero, ctx)?.value,
        jy: ell(3, eta, ctx)?.value / ell(3, zero, ctx)?.value,
        jz: ell(2, eta, ctx)?.value / ell(2, zero, ctx)?.value,
    })
}

/// Trigonometric limit: (1, 1, cos(pi eta)).
pub fn couplings_xxz(eta: Complex64) -> Couplings {
    Couplings {
        jx: Complex64::ONE,
        jy: Complex64::ONE,
        jz: (core::f64::consts::PI * eta).cos(),
    }
}

/// Helper a(u) = l1(eta) l2(u) / (l2(0) l1(u)).
pub fn helper_a(u: Complex64, eta: Complex64, ctx: &EllipticContext) -> Result<Complex64> {
    let l1u = ell(1, u, ctx)?.value;
    if l1u.norm() < ctx.pole_eps() {
        return Err(Error::NearPole { abs_denominator: l1u.norm() });
    }
    Ok(ell(1, eta, ctx)?.value * ell(2, u, ctx)?.value
        / (ell(2, Complex64::ZERO, ctx)?.value * l1u))
}

/// Helper g(u) = l1(eta) l1'(u) / (l1'(0) l1(u)).
pub fn helper_g(u: Complex64, eta: Complex64, ctx: &EllipticContext) -> Result<Complex64> {
    let l1 = ell(1, u, ctx)?;
    if l1.value.norm() < ctx.pole_eps() {
        return Err(Error::NearPole { abs_denominator: l1.value.norm() });
    }
    let d0 = ell(1, Complex64::ZERO, ctx)?.derivative;
    Ok(ell(1, eta, ctx)?.value * l1.derivative / (d0 * l1.value))
}

/// Helper b(u) = g(eta) + g(u) - g(u + eta).
pub fn helper_b(u: Complex64, eta: Complex64, ctx: &EllipticContext) -> Result<Complex64> {
    Ok(helper_g(eta, eta, ctx)? + helper_g(u, eta, ctx)? - helper_g(u + eta, eta, ctx)?)
}

/// Full complex amplitude vector over the product S^z basis.
///
/// Basis index digits run over local positions n = 0..dim (n = 0 is the
/// highest weight |s>), with site 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub amplitudes: Vec<Complex64>,
    pub site_dim: usize,
    pub num_sites: usize,
}

impl DenseState {
    pub fn zeros(site_dim: usize, num_sites: usize) -> Self {
        DenseState {
            amplitudes: alloc::vec![Complex64::ZERO; site_dim.pow(num_sites as u32)],
            site_dim,
            num_sites,
        }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Stride of a site index (site 0 slowest).
    pub fn stride(&self, site: usize) -> usize {
        self.site_dim.pow((self.num_sites - 1 - site) as u32)
    }

    pub fn digit(&self, basis_index: usize, site: usize) -> usize {
        basis_index / self.stride(site) % self.site_dim
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(&self) -> DenseState {
        let n = self.norm();
        DenseState {
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
            ..*self
        }
    }

    pub fn axpy(&mut self, alpha: Complex64, x: &DenseState) {
        for (a, b) in self.amplitudes.iter_mut().zip(&x.amplitudes) {
            *a += alpha * b;
        }
    }
}

/// Two-site bond operator J_x SxSx + J_y SySy + J_z SzSz as a dense
/// (dim^2 x dim^2) matrix, first site slowest.
pub fn bond_operator(spec: &ModelSpec, range_k: usize) -> Result<LocalOperator> {
    bond_operator_for(&spec.couplings(0, range_k)?, &spec.spin)
}

/// Same, from explicit couplings.
pub fn bond_operator_for(couplings: &Couplings, rep: &SpinRep) -> Result<LocalOperator> {
    let sx = spin_matrix(rep, Axis::X);
    let sy = spin_matrix(rep, Axis::Y);
    let sz = spin_matrix(rep, Axis::Z);
    let mut h = sx.kron(&sx).scaled(couplings.jx);
    h.add_assign(&sy.kron(&sy).scaled(couplings.jy));
    h.add_assign(&sz.kron(&sz).scaled(couplings.jz));
    Ok(h)
}

/// The bond list walked by the Hamiltonian, in application order.
pub fn hamiltonian_bonds(spec: &ModelSpec) -> Result<Vec<(Bond, f64)>> {
    match spec.variant {
        Variant::LongRange => {
            let mut out = Vec::new();
            let mut weights = spec.long_range_weights.clone();
            weights.sort_by_key(|&(k, _)| k);
            for (k, f) in weights {
                for b in spec.lattice.axial_neighbors(k)? {
                    out.push((b, f));
                }
            }
            // lexicographic (axis, site, range)
            out.sort_by_key(|(b, _)| (b.direction, b.site_a, b.range));
            Ok(out)
        }
        _ => Ok(spec
            .lattice
            .nearest_neighbor_bonds()
            .into_iter()
            .map(|b| (b, 1.0))
            .collect()),
    }
}

/// Apply the Hamiltonian to a dense state, matrix-free.
pub fn apply_hamiltonian(spec: &ModelSpec, state: &DenseState) -> Result<DenseState> {
    let dim = spec.spin.dim();
    let volume = spec.lattice.volume();
    let expected = spec.state_len();
    if state.amplitudes.len() != expected || state.site_dim != dim || state.num_sites != volume {
        return Err(Error::DimensionMismatch {
            expected,
            got: state.amplitudes.len(),
        });
    }
    if expected > MATRIX_FREE_BUDGET {
        return Err(Error::TooLarge {
            size: expected,
            budget: MATRIX_FREE_BUDGET,
        });
    }

    let rep = &spec.spin;
    let twice_s = rep.twice_s() as usize;
    let mut out = DenseState::zeros(dim, volume);

    for (bond, weight) in hamiltonian_bonds(spec)? {
        let c = spec.couplings(bond.direction, bond.range)?;
        let jz = c.jz * weight;
        let jp4 = c.j_plus() * (0.25 * weight);
        let jm4 = c.j_minus() * (0.25 * weight);
        let sa = state.stride(bond.site_a);
        let sb = state.stride(bond.site_b);
        for i in 0..expected {
            let x = state.amplitudes[i];
            if x == Complex64::ZERO {
                continue;
            }
            let na = i / sa % dim;
            let nb = i / sb % dim;
            // S^z S^z
            out.amplitudes[i] += jz * (rep.m(na) * rep.m(nb)) * x;
            // S^+_a S^-_b
            if na > 0 && nb < twice_s {
                out.amplitudes[i - sa + sb] +=
                    jp4 * (rep.lambda_plus(na) * rep.lambda_minus(nb)) * x;
            }
            // S^-_a S^+_b
            if na < twice_s && nb > 0 {
                out.amplitudes[i + sa - sb] +=
                    jp4 * (rep.lambda_minus(na) * rep.lambda_plus(nb)) * x;
            }
            // S^+_a S^+_b
            if na > 0 && nb > 0 {
                out.amplitudes[i - sa - sb] +=
                    jm4 * (rep.lambda_plus(na) * rep.lambda_plus(nb)) * x;
            }
            // S^-_a S^-_b
            if na < twice_s && nb < twice_s {
                out.amplitudes[i + sa + sb] +=
                    jm4 * (rep.lambda_minus(na) * rep.lambda_minus(nb)) * x;
            }
        }
    }

    // boundary fields of the open chain
    if spec.variant == Variant::OpenChain1d {
        let ctx = spec.ctx.as_ref().expect("open chain carries a context");
        let s = rep.s();
        let len = spec.lattice.dims()[0] as f64;
        let left = -s * helper_a(spec.u0 + spec.eta, spec.eta, ctx)?;
        let right = s * helper_a(spec.u0 + len * spec.eta, spec.eta, ctx)?;
        let s0 = state.stride(0);
        let sl = state.stride(volume - 1);
        for i in 0..expected {
            let x = state.amplitudes[i];
            if x == Complex64::ZERO {
                continue;
            }
            let n0 = i / s0 % dim;
            let nl = i / sl % dim;
            out.amplitudes[i] += (left * rep.m(n0) + right * rep.m(nl)) * x;
        }
    }

    Ok(out)
}

/// Dense Hamiltonian matrix assembled from bond operators via Kronecker
/// embedding. This is the exact-diagonalization route, independent of
/// the matrix-free path, gated to dim^V <= 4096.
pub fn dense_hamiltonian(spec: &ModelSpec) -> Result<Vec<Complex64>> {
    let dim = spec.spin.dim();
    let total = spec.state_len();
    if total > DENSE_MATRIX_BUDGET {
        return Err(Error::TooLarge {
            size: total,
            budget: DENSE_MATRIX_BUDGET,
        });
    }
    let volume = spec.lattice.volume();
    let mut h = alloc::vec![Complex64::ZERO; total * total];
    let probe = DenseState::zeros(dim, volume);

    for (bond, weight) in hamiltonian_bonds(spec)? {
        let c = spec.couplings(bond.direction, bond.range)?;
        let op = bond_operator_for(&c, &spec.spin)?;
        let sa = probe.stride(bond.site_a);
        let sb = probe.stride(bond.site_b);
        for col in 0..total {
            let na = col / sa % dim;
            let nb = col / sb % dim;
            for na2 in 0..dim {
                for nb2 in 0..dim {
                    let v = op.at(na2 * dim + nb2, na * dim + nb);
                    if v == Complex64::ZERO {
                        continue;
                    }
                    let row = col - na * sa - nb * sb + na2 * sa + nb2 * sb;
                    h[row * total + col] += v * weight;
                }
            }
        }
    }

    if spec.variant == Variant::OpenChain1d {
        let ctx = spec.ctx.as_ref().expect("open chain carries a context");
        let s = spec.spin.s();
        let len = spec.lattice.dims()[0] as f64;
        let left = -s * helper_a(spec.u0 + spec.eta, spec.eta, ctx)?;
        let right = s * helper_a(spec.u0 + len * spec.eta, spec.eta, ctx)?;
        let s0 = probe.stride(0);
        let sl = probe.stride(volume - 1);
        for i in 0..total {
            let n0 = i / s0 % dim;
            let nl = i / sl % dim;
            h[i * total + i] += left * spec.spin.m(n0) + right * spec.spin.m(nl);
        }
    }

    Ok(h)
}
