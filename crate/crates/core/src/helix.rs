//! Spin-helix product states, commensurability witnesses, closed-form
//! energies, tower states, entanglement entropies, and the Q/P expansion
//! basis.
//!
//! Local vectors are numerically normalized to unit 2-norm; the analytic
//! normalization is exposed separately as [`analytic_normalization`] and
//! is exact only on the Re tau = 0 locus.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::elliptic::{bell, ell, EllipticContext};
use crate::lattice::{Boundary, ChiralityVector};
use crate::model::{DenseState, ModelSpec, Variant};
use crate::spin::SpinRep;
use crate::{Error, Result};

use core::f64::consts::PI;

/// Default bound on per-axis winding residuals.
pub const COMMENSURABILITY_TOL: f64 = 1e-9;

/// Subset enumeration for expansion states is capped at 2^16 amplitudes.
pub const EXPANSION_MAX_SITES: usize = 16;

/// One-site coherent vector over the S^z basis |s>, |s-1>, ..., |-s>.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalVector {
    /// Unit-norm coefficients, highest weight first.
    pub coeffs: Vec<Complex64>,
    /// The phase argument this vector was built at.
    pub u: Complex64,
    /// Polar angle: tan(gamma/2) equals the coefficient-ratio magnitude.
    pub gamma: f64,
    /// Azimuthal angle: the coefficient-ratio argument.
    pub beta: f64,
}

/// Lazy tensor product of per-site local vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    pub locals: Vec<LocalVector>,
    pub u: Complex64,
    pub epsilon: ChiralityVector,
    /// Modulation parameter per axis as actually used by the build.
    pub eta_used: Vec<Complex64>,
}

impl ProductState {
    /// Materialize the full amplitude vector, site 0 slowest.
    pub fn to_dense(&self) -> DenseState {
        let dim = self.locals[0].coeffs.len();
        let mut amplitudes = alloc::vec![Complex64::ONE];
        for local in &self.locals {
            let mut next = Vec::with_capacity(amplitudes.len() * dim);
            for a in &amplitudes {
                for c in &local.coeffs {
                    next.push(a * c);
                }
            }
            amplitudes = next;
        }
        DenseState {
            amplitudes,
            site_dim: dim,
            num_sites: self.locals.len(),
        }
    }
}

/// Integer winding data solving L_a eta = 2 p_a tau + 2 q_a per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CommensurabilityWitness {
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    pub residuals: Vec<f64>,
}

/// Fixed-magnetization collective excitation over the fully polarized state.
#[derive(Debug, Clone)]
pub struct TowerState {
    pub n: usize,
    pub epsilon: ChiralityVector,
    pub amplitudes: DenseState,
}

/// The four explicit expansion-basis states: flip-count parity crossed
/// with the absence/presence of the extra P-weighted sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionLevel {
    EvenZero,
    OddZero,
    EvenOne,
    OddOne,
}

impl ExpansionLevel {
    fn wants_even(self) -> bool {
        matches!(self, ExpansionLevel::EvenZero | ExpansionLevel::EvenOne)
    }

    fn wants_p_sum(self) -> bool {
        matches!(self, ExpansionLevel::EvenOne | ExpansionLevel::OddOne)
    }
}

/// Coherent local vector with coefficients kappa_n l1~(u)^{2s-n} l4~(u)^n,
/// numerically normalized.
pub fn local_vector(u: Complex64, rep: &SpinRep, ctx: &EllipticContext) -> Result<LocalVector> {
    let b1 = bell(1, u, ctx)?.value;
    let b4 = bell(4, u, ctx)?.value;
    if b1.norm() < ctx.pole_eps() && b4.norm() < ctx.pole_eps() {
        return Err(Error::DegenerateArgument);
    }
    let dim = rep.dim();
    let twice_s = rep.twice_s() as usize;
    let mut coeffs = Vec::with_capacity(dim);
    for n in 0..dim {
        coeffs.push(rep.kappa(n) * b1.powu((twice_s - n) as u32) * b4.powu(n as u32));
    }
    normalize(&mut coeffs);
    let gamma = 2.0 * libm::atan2(b4.norm(), b1.norm());
    let beta = (b4 * b1.conj()).arg();
    Ok(LocalVector { coeffs, u, gamma, beta })
}

/// Trigonometric coherent vector kappa_n e^{i pi n u}, normalized.
pub fn local_vector_trig(u: Complex64, rep: &SpinRep) -> LocalVector {
    let dim = rep.dim();
    let phase = (Complex64::i() * PI * u).exp();
    let mut coeffs = Vec::with_capacity(dim);
    let mut p = Complex64::ONE;
    for n in 0..dim {
        coeffs.push(rep.kappa(n) * p);
        p *= phase;
    }
    normalize(&mut coeffs);
    let gamma = 2.0 * libm::atan2(phase.norm(), 1.0);
    let beta = phase.arg();
    LocalVector { coeffs, u, gamma, beta }
}

fn normalize(coeffs: &mut [Complex64]) {
    let norm = libm::sqrt(coeffs.iter().map(|c| c.norm_sqr()).sum());
    for c in coeffs.iter_mut() {
        *c /= norm;
    }
}

/// Analytic normalization (l4(Re u) l3(i Im u))^s of the unnormalized
/// coherent vector. Exact on the Re tau = 0 locus only.
pub fn analytic_normalization(
    u: Complex64,
    rep: &SpinRep,
    ctx: &EllipticContext,
) -> Result<Complex64> {
    let a = ell(4, Complex64::new(u.re, 0.0), ctx)?.value;
    let b = ell(3, Complex64::new(0.0, u.im), ctx)?.value;
    Ok((a * b).powf(rep.s()))
}

/// Expectation triple (s sin g cos b, s sin g sin b, s cos g).
pub fn local_expectations(v: &LocalVector, rep: &SpinRep) -> [f64; 3] {
    let s = rep.s();
    [
        s * libm::sin(v.gamma) * libm::cos(v.beta),
        s * libm::sin(v.gamma) * libm::sin(v.beta),
        s * libm::cos(v.gamma),
    ]
}

/// Per-site expectation triples of a product state.
pub fn texture(state: &ProductState, rep: &SpinRep) -> Vec<[f64; 3]> {
    state.locals.iter().map(|v| local_expectations(v, rep)).collect()
}

/// Solve L_a eta = 2 p_a tau + 2 q_a per axis, rounding to the nearest
/// integer pair and reporting residuals; errors above `tol`.
pub fn commensurability(
    eta: Complex64,
    tau: Complex64,
    dims: &[usize],
    tol: f64,
) -> Result<CommensurabilityWitness> {
    commensurability_per_axis(&alloc::vec![eta; dims.len()], tau, dims, tol)
}

/// Direction-dependent form: one eta per axis.
pub fn commensurability_per_axis(
    etas: &[Complex64],
    tau: Complex64,
    dims: &[usize],
    tol: f64,
) -> Result<CommensurabilityWitness> {
    let mut p = Vec::with_capacity(dims.len());
    let mut q = Vec::with_capacity(dims.len());
    let mut residuals = Vec::with_capacity(dims.len());
    for (axis, &len) in dims.iter().enumerate() {
        let target = etas[axis] * len as f64;
        // Im tau > 0 determines p from the imaginary part alone
        let pa = libm::round(target.im / (2.0 * tau.im)) as i64;
        let qa = libm::round((target.re - 2.0 * pa as f64 * tau.re) / 2.0) as i64;
        let res = (target - 2.0 * pa as f64 * tau - Complex64::new(2.0 * qa as f64, 0.0)).norm();
        p.push(pa);
        q.push(qa);
        residuals.push(res);
    }
    if residuals.iter().any(|r| *r > tol) {
        return Err(Error::NotCommensurate { residuals });
    }
    Ok(CommensurabilityWitness { p, q, residuals })
}

/// Root-of-unity form L_a eta = 2 q_a (no tau): the trigonometric condition.
pub fn commensurability_trig(
    eta: Complex64,
    dims: &[usize],
    tol: f64,
) -> Result<CommensurabilityWitness> {
    let mut q = Vec::with_capacity(dims.len());
    let mut residuals = Vec::with_capacity(dims.len());
    for &len in dims {
        let target = eta * len as f64;
        let qa = libm::round(target.re / 2.0) as i64;
        let res = (target - Complex64::new(2.0 * qa as f64, 0.0)).norm();
        q.push(qa);
        residuals.push(res);
    }
    if residuals.iter().any(|r| *r > tol) {
        return Err(Error::NotCommensurate { residuals });
    }
    Ok(CommensurabilityWitness {
        p: alloc::vec![0; dims.len()],
        q,
        residuals,
    })
}

/// The witness appropriate to a model variant, plus the variant's own
/// length gates.
pub fn commensurability_for(spec: &ModelSpec) -> Result<CommensurabilityWitness> {
    let dims = spec.lattice.dims();
    match spec.variant {
        Variant::Xxz => commensurability_trig(spec.eta, dims, COMMENSURABILITY_TOL),
        Variant::XyA | Variant::XyB => {
            for (axis, &len) in dims.iter().enumerate() {
                if len % 4 != 0 {
                    return Err(Error::WrongLength {
                        axis,
                        len,
                        required_multiple: 4,
                    });
                }
            }
            let tau = spec.ctx.as_ref().expect("xy variant carries a context").tau();
            commensurability(spec.eta, tau, dims, COMMENSURABILITY_TOL)
        }
        Variant::DirectionDependent => {
            let tau = spec.ctx.as_ref().expect("elliptic variant carries a context").tau();
            commensurability_per_axis(&spec.eta_per_axis, tau, dims, COMMENSURABILITY_TOL)
        }
        Variant::OpenChain1d => Ok(CommensurabilityWitness {
            p: alloc::vec![0],
            q: alloc::vec![0],
            residuals: alloc::vec![0.0],
        }),
        _ => {
            let tau = spec.ctx.as_ref().expect("elliptic variant carries a context").tau();
            commensurability(spec.eta, tau, dims, COMMENSURABILITY_TOL)
        }
    }
}

/// Canonical representative of eta in the rectangle
/// 0 <= Re < 2, 0 <= Im < 2 Im tau (couplings are invariant under
/// both shifts).
pub fn canonical_eta(eta: Complex64, tau: Complex64) -> Complex64 {
    let l = libm::floor(eta.im / (2.0 * tau.im));
    let shifted = eta - 2.0 * l * tau;
    let k = libm::floor(shifted.re / 2.0);
    shifted - Complex64::new(2.0 * k, 0.0)
}

/// Assemble the helix product state at phase origin `u` and chirality
/// `epsilon`, after checking the variant's commensurability gate.
pub fn build_shs(
    u: Complex64,
    epsilon: &ChiralityVector,
    spec: &ModelSpec,
) -> Result<ProductState> {
    commensurability_for(spec)?;
    let volume = spec.lattice.volume();
    let mut locals = Vec::with_capacity(volume);
    let eta_used: Vec<Complex64> = match spec.variant {
        Variant::DirectionDependent => spec.eta_per_axis.clone(),
        _ => alloc::vec![spec.eta; spec.lattice.d()],
    };
    for j in 0..volume {
        let arg = match spec.variant {
            Variant::DirectionDependent => {
                let coords = spec.lattice.coords(j);
                let mut a = Complex64::ZERO;
                for (axis, &c) in coords.iter().enumerate() {
                    a += spec.eta_per_axis[axis]
                        * (epsilon.signs()[axis] as f64)
                        * c as f64;
                }
                u + a
            }
            // open chain: sites 1..=L at phases u0 + eta, ..., u0 + L eta
            Variant::OpenChain1d => spec.u0 + spec.eta * (j + 1) as f64,
            _ => u + spec.eta * spec.lattice.phase(epsilon, j) as f64,
        };
        let local = match spec.variant {
            Variant::Xxz => local_vector_trig(arg, &spec.spin),
            _ => local_vector(
                arg,
                &spec.spin,
                spec.ctx.as_ref().expect("elliptic variant carries a context"),
            )?,
        };
        locals.push(local);
    }
    Ok(ProductState {
        locals,
        u,
        epsilon: epsilon.clone(),
        eta_used,
    })
}

/// Closed-form helix energy for the variant; the open chain has none and
/// reports its Rayleigh quotient instead.
pub fn shs_energy(spec: &ModelSpec, witness: &CommensurabilityWitness) -> Result<Complex64> {
    let s2 = spec.spin.s() * spec.spin.s();
    let volume = spec.lattice.volume() as f64;
    let dims = spec.lattice.dims();
    match spec.variant {
        Variant::Xxz => {
            let d = spec.lattice.d() as f64;
            Ok(Complex64::new(d * s2 * volume, 0.0) * (PI * spec.eta).cos())
        }
        Variant::XyA | Variant::XyB => Ok(Complex64::ZERO),
        Variant::OpenChain1d => Err(Error::NoClosedForm),
        Variant::LongRange => {
            let ctx = spec.ctx.as_ref().expect("elliptic variant carries a context");
            let mut e = Complex64::ZERO;
            for &(k, f) in &spec.long_range_weights {
                e += f * axis_sum_energy(spec.eta * k as f64, witness, k as i64, dims, s2, ctx)?;
            }
            Ok(e)
        }
        Variant::DirectionDependent => {
            let ctx = spec.ctx.as_ref().expect("elliptic variant carries a context");
            let d0 = ell(1, Complex64::ZERO, ctx)?.derivative;
            let mut e = Complex64::ZERO;
            for (axis, &len) in dims.iter().enumerate() {
                let eta = spec.eta_per_axis[axis];
                let l1 = ell(1, eta, ctx)?;
                e += s2 * l1.derivative / d0 * volume
                    + Complex64::new(0.0, 4.0 * PI) * s2 * l1.value / d0
                        * (witness.p[axis] as f64)
                        * (volume / len as f64);
            }
            Ok(e)
        }
        _ => {
            let ctx = spec.ctx.as_ref().expect("elliptic variant carries a context");
            axis_sum_energy(spec.eta, witness, 1, dims, s2, ctx)
        }
    }
}

/// s^2 sum over axes of (l1'(eta)/l1'(0)) V + 4 pi i (l1(eta)/l1'(0))
/// (k p_a) V / L_a, the per-bond-range energy contribution.
fn axis_sum_energy(
    eta: Complex64,
    witness: &CommensurabilityWitness,
    range_k: i64,
    dims: &[usize],
    s2: f64,
    ctx: &EllipticContext,
) -> Result<Complex64> {
    let l1 = ell(1, eta, ctx)?;
    let d0 = ell(1, Complex64::ZERO, ctx)?.derivative;
    let volume: f64 = dims.iter().map(|&l| l as f64).product();
    let mut e = Complex64::ZERO;
    for (axis, &len) in dims.iter().enumerate() {
        e += s2 * l1.derivative / d0 * volume
            + Complex64::new(0.0, 4.0 * PI) * s2 * l1.value / d0
                * ((range_k * witness.p[axis]) as f64)
                * (volume / len as f64);
    }
    Ok(e)
}

/// n-magnon tower state over the fully polarized state, built by direct
/// enumeration of site-occupation digit strings (never by repeated
/// operator application).
pub fn tower_state(n: usize, epsilon: &ChiralityVector, spec: &ModelSpec) -> Result<TowerState> {
    if spec.variant != Variant::Xxz {
        return Err(Error::WrongVariant);
    }
    let volume = spec.lattice.volume();
    let max_n = spec.spin.twice_s() as usize * volume;
    if n > max_n {
        return Err(Error::OutOfRange {
            value: n,
            max: max_n,
        });
    }
    let dim = spec.spin.dim();
    let total = spec.state_len();
    if total > crate::model::MATRIX_FREE_BUDGET {
        return Err(Error::TooLarge {
            size: total,
            budget: crate::model::MATRIX_FREE_BUDGET,
        });
    }
    // per-site single-flip phase e^{i pi eta (eps . n_j)}
    let phases: Vec<Complex64> = (0..volume)
        .map(|j| (Complex64::i() * PI * spec.eta * spec.lattice.phase(epsilon, j) as f64).exp())
        .collect();
    let mut amplitudes = alloc::vec![Complex64::ZERO; total];
    // digit odometer with a running flip count
    let mut digits = alloc::vec![0usize; volume];
    for (idx, amp) in amplitudes.iter_mut().enumerate() {
        let flips: usize = digits.iter().sum();
        if flips == n {
            let mut a = Complex64::ONE;
            for (j, &dj) in digits.iter().enumerate() {
                a *= phases[j].powu(dj as u32) * spec.spin.kappa(dj);
            }
            *amp = a;
        }
        let _ = idx;
        // increment, site V-1 fastest (matches the dense index layout)
        for j in (0..volume).rev() {
            digits[j] += 1;
            if digits[j] < dim {
                break;
            }
            digits[j] = 0;
        }
    }
    Ok(TowerState {
        n,
        epsilon: epsilon.clone(),
        amplitudes: DenseState {
            amplitudes,
            site_dim: dim,
            num_sites: volume,
        },
    })
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    libm::lgamma((n + 1) as f64) - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
}

/// Bipartite entanglement entropy of the n-magnon tower state for a
/// subsystem of va sites: the hypergeometric weight sum over the full
/// support.
pub fn tower_entropy(n: usize, va: usize, twice_s: u32, volume: usize) -> Result<f64> {
    let total = twice_s as usize * volume;
    if n > total {
        return Err(Error::OutOfRange { value: n, max: total });
    }
    if va < 1 || va >= volume {
        return Err(Error::OutOfRange {
            value: va,
            max: volume - 1,
        });
    }
    let na = twice_s as usize * va;
    let nb = total - na;
    let lo = n.saturating_sub(nb);
    let hi = na.min(n);
    let ln_total = ln_binomial(total, n);
    let mut entropy = 0.0;
    for j in lo..=hi {
        let lnp = ln_binomial(na, j) + ln_binomial(nb, n - j) - ln_total;
        let p = libm::exp(lnp);
        if p > 0.0 {
            entropy -= p * lnp;
        }
    }
    Ok(entropy)
}

/// Large-V entropy scale (1/2) ln(s pi V / 4) + 1/2 at half filling and
/// half cut.
pub fn asymptotic_entropy(twice_s: u32, volume: usize) -> f64 {
    let s = twice_s as f64 / 2.0;
    0.5 * libm::log(s * PI * volume as f64 / 4.0) + 0.5
}

/// (Q, P) with Q = l1~/l4~ and P = Q' / (pi l2~(0) l3~(0)); the analytic
/// derivative fixes the sign branch.
pub fn qp_functions(u: Complex64, ctx: &EllipticContext) -> Result<(Complex64, Complex64)> {
    let b1 = bell(1, u, ctx)?;
    let b4 = bell(4, u, ctx)?;
    if b4.value.norm() < ctx.pole_eps() {
        return Err(Error::NearPole {
            abs_denominator: b4.value.norm(),
        });
    }
    let q = b1.value / b4.value;
    let dq = (b1.derivative * b4.value - b1.value * b4.derivative) / (b4.value * b4.value);
    let b20 = bell(2, Complex64::ZERO, ctx)?.value;
    let b30 = bell(3, Complex64::ZERO, ctx)?.value;
    Ok((q, dq / (PI * b20 * b30)))
}

/// One of the four explicit spin-1/2 expansion states, assembled by
/// direct subset enumeration over flipped-up site sets.
pub fn expansion_states(
    level: ExpansionLevel,
    epsilon_sign: i8,
    spec: &ModelSpec,
) -> Result<DenseState> {
    if spec.spin.twice_s() != 1 {
        return Err(Error::InvalidSpin {
            twice_s: spec.spin.twice_s(),
        });
    }
    if spec.lattice.d() != 1 {
        return Err(Error::WrongVariant);
    }
    let len = spec.lattice.dims()[0];
    if len > EXPANSION_MAX_SITES {
        return Err(Error::TooLarge {
            size: len,
            budget: EXPANSION_MAX_SITES,
        });
    }
    let ctx = spec.ctx.as_ref().expect("elliptic variant carries a context");
    let eps = epsilon_sign as f64;
    // Pole-free per-site data at epsilon * n_j * eta (0-based coordinates):
    // a = l1~, b = l4~, and w = P b^2 written through the quotient-rule
    // numerator so poles of Q never materialize. Level-0 amplitudes carry
    // a global factor prod b_j, level-1 a global prod b_j^2; at an eta
    // where some b_j vanishes this realizes the projective limit of the
    // raw Q/P weights.
    let b20 = bell(2, Complex64::ZERO, ctx)?.value;
    let b30 = bell(3, Complex64::ZERO, ctx)?.value;
    let mut av = Vec::with_capacity(len);
    let mut bv = Vec::with_capacity(len);
    let mut wv = Vec::with_capacity(len);
    for j in 0..len {
        let arg = spec.eta * (eps * j as f64);
        let b1 = bell(1, arg, ctx)?;
        let b4 = bell(4, arg, ctx)?;
        av.push(b1.value);
        bv.push(b4.value);
        wv.push((b1.derivative * b4.value - b1.value * b4.derivative) / (PI * b20 * b30));
    }
    let total = 1usize << len;
    let mut amplitudes = alloc::vec![Complex64::ZERO; total];
    for mask in 0..total {
        // bit j of mask marks site j flipped up
        let flips = (mask as u32).count_ones() as usize;
        // for the P-weighted levels the parity label counts the Q-modulated
        // flips only, one fewer than the total flip count
        let label = if level.wants_p_sum() {
            if flips == 0 {
                continue;
            }
            flips - 1
        } else {
            flips
        };
        if (label % 2 == 0) != level.wants_even() {
            continue;
        }
        let amp = if level.wants_p_sum() {
            let mut acc = Complex64::ZERO;
            for k in 0..len {
                if mask >> k & 1 == 0 {
                    continue;
                }
                let mut t = wv[k];
                for j in 0..len {
                    if j == k {
                        continue;
                    }
                    t *= if mask >> j & 1 == 1 {
                        av[j] * bv[j]
                    } else {
                        bv[j] * bv[j]
                    };
                }
                acc += t;
            }
            acc
        } else {
            let mut t = Complex64::ONE;
            for j in 0..len {
                t *= if mask >> j & 1 == 1 { av[j] } else { bv[j] };
            }
            t
        };
        // digit 0 = up at flipped sites, digit 1 = down elsewhere
        let mut idx = 0usize;
        for j in 0..len {
            idx = idx * 2 + (1 - (mask >> j & 1));
        }
        amplitudes[idx] = amp;
    }
    Ok(DenseState {
        amplitudes,
        site_dim: 2,
        num_sites: len,
    })
}

/// The alternative spin-1 XY product state with locals
/// l1~^2(arg)|1> - l4~^2(arg)|-1>, arg = u + (sum of coordinates)/2.
pub fn spin1_xy_state(u: Complex64, spec: &ModelSpec) -> Result<ProductState> {
    if spec.spin.twice_s() != 2 {
        return Err(Error::InvalidSpin {
            twice_s: spec.spin.twice_s(),
        });
    }
    for (axis, &len) in spec.lattice.dims().iter().enumerate() {
        if len % 2 != 0 {
            return Err(Error::WrongLength {
                axis,
                len,
                required_multiple: 2,
            });
        }
    }
    let ctx = spec.ctx.as_ref().expect("xy variant carries a context");
    let volume = spec.lattice.volume();
    let mut locals = Vec::with_capacity(volume);
    for j in 0..volume {
        let csum: usize = spec.lattice.coords(j).iter().sum();
        let arg = u + Complex64::new(csum as f64 / 2.0, 0.0);
        let b1 = bell(1, arg, ctx)?.value;
        let b4 = bell(4, arg, ctx)?.value;
        let mut coeffs = alloc::vec![b1 * b1, Complex64::ZERO, -b4 * b4];
        normalize(&mut coeffs);
        let gamma = 2.0 * libm::atan2(b4.norm_sqr(), b1.norm_sqr());
        let beta = (-(b4 * b4) * (b1 * b1).conj()).arg();
        locals.push(LocalVector {
            coeffs,
            u: arg,
            gamma,
            beta,
        });
    }
    Ok(ProductState {
        locals,
        u,
        epsilon: ChiralityVector::uniform(spec.lattice.d(), 1),
        eta_used: alloc::vec![Complex64::new(0.5, 0.0); spec.lattice.d()],
    })
}

/// 1D open-chain helper: true when the lattice is an open chain.
pub fn is_open_chain(spec: &ModelSpec) -> bool {
    spec.lattice.boundary() == Boundary::Open
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::SplitMix64;
    use crate::lattice::build_lattice;
    use crate::model::apply_hamiltonian;
    use crate::spin::{build_spin_rep, spin_matrix, Axis};

    fn ctx(tau_im: f64) -> EllipticContext {
        EllipticContext::new(Complex64::new(0.0, tau_im)).unwrap()
    }

    fn apply_local(op: &crate::spin::LocalOperator, v: &[Complex64]) -> Vec<Complex64> {
        op.apply(v)
    }

    fn rayleigh_residual(spec: &ModelSpec, x: &DenseState) -> (Complex64, f64) {
        let hx = apply_hamiltonian(spec, x).unwrap();
        let nrm2 = x.inner(x);
        let lambda = x.inner(&hx) / nrm2;
        let mut diff = hx;
        diff.axpy(-lambda, x);
        (lambda, diff.norm() / x.norm())
    }

    #[test]
    fn local_vector_axis_eigenvectors() {
        let c = ctx(0.8);
        let tau = c.tau();
        for twice_s in [1u32, 2, 3] {
            let rep = build_spin_rep(twice_s).unwrap();
            let s = rep.s();
            // u = (1+tau)/2: S^x eigenvector with eigenvalue s
            let vx = local_vector((Complex64::ONE + tau) / 2.0, &rep, &c).unwrap();
            let sx = spin_matrix(&rep, Axis::X);
            let got = apply_local(&sx, &vx.coeffs);
            for (g, v) in got.iter().zip(&vx.coeffs) {
                assert!((g - s * v).norm() < 1e-12, "2s={twice_s}");
            }
            // u = (2+tau)/2: S^y eigenvector with eigenvalue s
            let vy = local_vector((Complex64::new(2.0, 0.0) + tau) / 2.0, &rep, &c).unwrap();
            let sy = spin_matrix(&rep, Axis::Y);
            let got = apply_local(&sy, &vy.coeffs);
            for (g, v) in got.iter().zip(&vy.coeffs) {
                assert!((g - s * v).norm() < 1e-12, "2s={twice_s}");
            }
        }
    }

    #[test]
    fn rotated_highest_weight_property() {
        // (sin g cos b Sx + sin g sin b Sy + cos g Sz) psi = s psi
        let c = ctx(0.8);
        let mut rng = SplitMix64(41);
        for twice_s in [1u32, 2, 3] {
            let rep = build_spin_rep(twice_s).unwrap();
            let s = rep.s();
            for _ in 0..5 {
                let u = Complex64::new(0.1 + 0.7 * rng.next_f64(), 0.05 + 0.6 * rng.next_f64());
                let v = local_vector(u, &rep, &c).unwrap();
                let mut n_dot_s = spin_matrix(&rep, Axis::X)
                    .scaled(Complex64::new(libm::sin(v.gamma) * libm::cos(v.beta), 0.0));
                n_dot_s.add_assign(
                    &spin_matrix(&rep, Axis::Y)
                        .scaled(Complex64::new(libm::sin(v.gamma) * libm::sin(v.beta), 0.0)),
                );
                n_dot_s.add_assign(
                    &spin_matrix(&rep, Axis::Z).scaled(Complex64::new(libm::cos(v.gamma), 0.0)),
                );
                let got = apply_local(&n_dot_s, &v.coeffs);
                for (g, w) in got.iter().zip(&v.coeffs) {
                    assert!((g - s * w).norm() < 1e-12, "2s={twice_s} u={u}");
                }
            }
        }
    }

    #[test]
    fn expectations_match_matrix_elements() {
        let c = ctx(0.8);
        let rep = build_spin_rep(4).unwrap();
        let mut rng = SplitMix64(43);
        for _ in 0..8 {
            let u = Complex64::new(0.1 + 0.7 * rng.next_f64(), 0.05 + 0.6 * rng.next_f64());
            let v = local_vector(u, &rep, &c).unwrap();
            let want = local_expectations(&v, &rep);
            for (axis, w) in [Axis::X, Axis::Y, Axis::Z].into_iter().zip(want) {
                let m = spin_matrix(&rep, axis);
                let got: Complex64 = v
                    .coeffs
                    .iter()
                    .zip(apply_local(&m, &v.coeffs))
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                assert!((got.re - w).abs() < 1e-12 && got.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_normalization_on_rectangular_locus() {
        let c = ctx(0.8);
        let mut rng = SplitMix64(47);
        for twice_s in [1u32, 3] {
            let rep = build_spin_rep(twice_s).unwrap();
            for _ in 0..5 {
                let u = Complex64::new(0.1 + 0.7 * rng.next_f64(), 0.05 + 0.6 * rng.next_f64());
                let b1 = bell(1, u, &c).unwrap().value;
                let b4 = bell(4, u, &c).unwrap().value;
                let raw_norm = {
                    let mut acc = 0.0;
                    for n in 0..rep.dim() {
                        let t = rep.kappa(n)
                            * b1.powu((twice_s as usize - n) as u32)
                            * b4.powu(n as u32);
                        acc += t.norm_sqr();
                    }
                    libm::sqrt(acc)
                };
                let analytic = analytic_normalization(u, &rep, &c).unwrap();
                assert!(
                    (raw_norm - analytic.norm()).abs() < 1e-11 * raw_norm,
                    "2s={twice_s} u={u}"
                );
                assert!(analytic.im.abs() < 1e-11 * analytic.norm());
            }
        }
    }

    #[test]
    fn trig_local_vector_is_transverse() {
        let rep = build_spin_rep(1).unwrap();
        let v = local_vector_trig(Complex64::new(0.37, 0.0), &rep);
        assert!((v.gamma - PI / 2.0).abs() < 1e-14);
        let e = local_expectations(&v, &rep);
        assert!(e[2].abs() < 1e-14);
    }

    #[test]
    fn commensurability_known_windings() {
        // 11 * (2/11) = 2: (p, q) = (0, 1)
        let w = commensurability(
            Complex64::new(2.0 / 11.0, 0.0),
            Complex64::new(0.0, 0.8),
            &[11],
            1e-9,
        )
        .unwrap();
        assert_eq!((w.p[0], w.q[0]), (0, 1));
        // 27 * (10 tau / 27) = 10 tau: (p, q) = (5, 0)
        let tau = Complex64::new(0.0, 0.7);
        let w = commensurability(tau * (10.0 / 27.0), tau, &[27], 1e-9).unwrap();
        assert_eq!((w.p[0], w.q[0]), (5, 0));
        // generic complex eta misses the winding lattice
        let r = commensurability(
            Complex64::new(0.1, 0.1),
            Complex64::new(0.0, 0.8),
            &[10],
            1e-9,
        );
        match r {
            Err(Error::NotCommensurate { residuals }) => assert!(residuals[0] > 0.5),
            other => panic!("expected NotCommensurate, got {other:?}"),
        }
    }

    #[test]
    fn wrap_consistency_under_commensurability() {
        let c = ctx(0.8);
        let rep = build_spin_rep(2).unwrap();
        let eta = Complex64::new(2.0 / 11.0, 0.0);
        let u = Complex64::new(0.28, 0.0);
        let a = local_vector(u, &rep, &c).unwrap();
        let b = local_vector(u + 11.0 * eta, &rep, &c).unwrap();
        let overlap: Complex64 = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.conj() * y).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn xxz_shs_is_transverse_helix() {
        let rep = build_spin_rep(1).unwrap();
        let lat = build_lattice(&[6], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xxz(Complex64::new(1.0 / 3.0, 0.0), rep, lat);
        let eps = ChiralityVector::uniform(1, 1);
        let state = build_shs(Complex64::new(0.2, 0.0), &eps, &spec).unwrap();
        for w in state.locals.windows(2) {
            assert!((w[0].gamma - PI / 2.0).abs() < 1e-13);
            let mut db = w[1].beta - w[0].beta;
            while db < 0.0 {
                db += 2.0 * PI;
            }
            assert!((db - PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn xxz_energy_value() {
        let rep = build_spin_rep(1).unwrap();
        let lat = build_lattice(&[6], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xxz(Complex64::new(1.0 / 3.0, 0.0), rep, lat);
        let w = commensurability_for(&spec).unwrap();
        let e = shs_energy(&spec, &w).unwrap();
        assert!((e - Complex64::new(0.75, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn xxz_shs_eigenstate_smoke() {
        let rep = build_spin_rep(1).unwrap();
        let lat = build_lattice(&[4], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xxz(Complex64::new(0.5, 0.0), rep, lat);
        let w = commensurability_for(&spec).unwrap();
        let want = shs_energy(&spec, &w).unwrap();
        for sign in [1i8, -1] {
            let eps = ChiralityVector::uniform(1, sign);
            let x = build_shs(Complex64::new(0.3, 0.0), &eps, &spec).unwrap().to_dense();
            let (lambda, res) = rayleigh_residual(&spec, &x);
            assert!(res < 1e-12, "sign={sign} res={res}");
            assert!((lambda - want).norm() < 1e-12);
        }
    }

    #[test]
    fn xyz_shs_eigenstate_smoke() {
        let c = ctx(0.8);
        let rep = build_spin_rep(1).unwrap();
        let lat = build_lattice(&[11], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xyz(Complex64::new(2.0 / 11.0, 0.0), c, rep, lat);
        let w = commensurability_for(&spec).unwrap();
        let want = shs_energy(&spec, &w).unwrap();
        // closed-form value for this chain, cross-checked below against
        // the Rayleigh quotient
        assert!((want - Complex64::new(2.36775132260299, 0.0)).norm() < 1e-11);
        for sign in [1i8, -1] {
            let eps = ChiralityVector::uniform(1, sign);
            let x = build_shs(Complex64::new(0.28, 0.0), &eps, &spec).unwrap().to_dense();
            let (lambda, res) = rayleigh_residual(&spec, &x);
            assert!(res < 1e-11, "sign={sign} res={res}");
            assert!((lambda - want).norm() < 1e-10, "sign={sign} lambda={lambda}");
        }
    }

    #[test]
    fn tower_endpoints_and_orthogonality() {
        let rep = build_spin_rep(1).unwrap();
        let lat = build_lattice(&[4], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xxz(Complex64::new(0.5, 0.0), rep, lat);
        let eps = ChiralityVector::uniform(1, 1);
        let t0 = tower_state(0, &eps, &spec).unwrap();
        assert_eq!(t0.amplitudes.amplitudes[0], Complex64::ONE);
        assert!(t0.amplitudes.amplitudes[1..].iter().all(|a| *a == Complex64::ZERO));
        let tfull = tower_state(4, &eps, &spec).unwrap();
        let last = *tfull.amplitudes.amplitudes.last().unwrap();
        assert!((last.norm() - 1.0).abs() < 1e-12);
        assert!(tfull.amplitudes.amplitudes[..15].iter().all(|a| *a == Complex64::ZERO));
        // magnon number fixes the digit sum of every populated basis state
        let t2 = tower_state(2, &eps, &spec).unwrap();
        for (i, a) in t2.amplitudes.amplitudes.iter().enumerate() {
            let flips = (i as u32).count_ones() as usize;
            if flips != 2 {
                assert_eq!(*a, Complex64::ZERO);
            }
        }
        // distinct magnon numbers are orthogonal
        for n in 0..4 {
            for m in (n + 1)..=4 {
                let a = tower_state(n, &eps, &spec).unwrap().amplitudes;
                let b = tower_state(m, &eps, &spec).unwrap().amplitudes;
                assert!(a.inner(&b).norm() < 1e-12);
            }
        }
        assert!(matches!(
            tower_state(5, &eps, &spec),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn tower_states_are_eigenstates() {
        let rep = build_spin_rep(1).unwrap();
        let lat = build_lattice(&[6], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xxz(Complex64::new(1.0 / 3.0, 0.0), rep, lat);
        for sign in [1i8, -1] {
            let eps = ChiralityVector::uniform(1, sign);
            for n in 0..=6 {
                let t = tower_state(n, &eps, &spec).unwrap();
                let (lambda, res) = rayleigh_residual(&spec, &t.amplitudes);
                assert!(res < 1e-12, "n={n} sign={sign} res={res}");
                assert!((lambda - Complex64::new(0.75, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn entropy_small_case_and_asymptotics() {
        // V=4, s=1/2, n=2, half cut: p = (1/6, 4/6, 1/6) over j=0,1,2
        let s = tower_entropy(2, 2, 1, 4).unwrap();
        let want = (1.0 / 3.0) * libm::log(6.0) + (2.0 / 3.0) * libm::log(1.5);
        assert!((s - want).abs() < 1e-14);
        assert_eq!(tower_entropy(0, 2, 1, 4).unwrap(), 0.0);
        // large-V agreement with the logarithmic scale
        let exact = tower_entropy(50, 50, 1, 100).unwrap();
        let asym = asymptotic_entropy(1, 100);
        assert!((exact - asym).abs() / asym < 0.02, "exact={exact} asym={asym}");
    }

    #[test]
    fn qp_values_and_identities() {
        let c = ctx(0.8);
        let (q0, p0) = qp_functions(Complex64::ZERO, &c).unwrap();
        assert!(q0.norm() < 1e-14);
        assert!((p0 - Complex64::ONE).norm() < 1e-12);
        let (qh, _) = qp_functions(Complex64::new(0.5, 0.0), &c).unwrap();
        let mut rng = SplitMix64(53);
        for _ in 0..10 {
            let u = Complex64::new(0.1 + 0.6 * rng.next_f64(), 0.05 + 0.5 * rng.next_f64());
            let v = Complex64::new(0.1 + 0.6 * rng.next_f64(), 0.05 + 0.5 * rng.next_f64());
            let (qu, pu) = qp_functions(u, &c).unwrap();
            let (qv, pv) = qp_functions(v, &c).unwrap();
            let (quv, _) = qp_functions(u + v, &c).unwrap();
            let lhs = quv * (Complex64::ONE - qu * qu * qv * qv);
            let rhs = qu * pv + qv * pu;
            assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0), "u={u} v={v}");
            let lhs = pu * pu;
            let rhs = (Complex64::ONE - qu * qu / (qh * qh))
                * (Complex64::ONE - qh * qh * qu * qu);
            assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0), "u={u}");
        }
    }

    #[test]
    fn expansion_states_are_eigenstates() {
        let c = ctx(0.9);
        let tau = c.tau();
        let rep = build_spin_rep(1).unwrap();
        let lat = build_lattice(&[4], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xyz(tau * 0.5, c, rep, lat);
        let w = commensurability_for(&spec).unwrap();
        assert_eq!((w.p[0], w.q[0]), (1, 0));
        let want = shs_energy(&spec, &w).unwrap();
        for level in [
            ExpansionLevel::EvenZero,
            ExpansionLevel::OddZero,
            ExpansionLevel::EvenOne,
            ExpansionLevel::OddOne,
        ] {
            for sign in [1i8, -1] {
                let x = expansion_states(level, sign, &spec).unwrap();
                let (lambda, res) = rayleigh_residual(&spec, &x);
                assert!(res < 1e-10, "{level:?} sign={sign} res={res}");
                assert!(
                    (lambda - want).norm() < 1e-9 * want.norm().max(1.0),
                    "{level:?} sign={sign} lambda={lambda} want={want}"
                );
            }
        }
        // away from l4~ zeros the empty-subset amplitude is the global
        // factor prod_j l4~(j eta), i.e. unit weight in the Q-normalized
        // gauge
        let c2 = ctx(0.8);
        let lat2 = build_lattice(&[4], Boundary::Periodic).unwrap();
        let spec2 = ModelSpec::xyz(
            Complex64::new(0.5, 0.0),
            c2.clone(),
            build_spin_rep(1).unwrap(),
            lat2,
        );
        let x = expansion_states(ExpansionLevel::EvenZero, 1, &spec2).unwrap();
        let mut global = Complex64::ONE;
        for j in 0..4 {
            global *= bell(4, Complex64::new(0.5 * j as f64, 0.0), &c2).unwrap().value;
        }
        assert!((x.amplitudes.last().unwrap() - global).norm() < 1e-13);
    }

    #[test]
    fn spin1_xy_alternative_state() {
        let c = ctx(0.8);
        let rep = build_spin_rep(2).unwrap();
        let lat = build_lattice(&[4], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xy_a(c, rep, lat);
        let mut rng = SplitMix64(59);
        for _ in 0..3 {
            let u = Complex64::new(0.1 + 0.6 * rng.next_f64(), 0.05 + 0.5 * rng.next_f64());
            let state = spin1_xy_state(u, &spec).unwrap();
            for v in &state.locals {
                assert_eq!(v.coeffs[1], Complex64::ZERO);
            }
            let x = state.to_dense();
            let hx = apply_hamiltonian(&spec, &x).unwrap();
            assert!(hx.norm() / x.norm() < 1e-11, "u={u}");
        }
        // odd lengths are rejected
        let lat5 = build_lattice(&[5], Boundary::Periodic).unwrap();
        let spec5 = ModelSpec::xy_a(ctx(0.8), build_spin_rep(2).unwrap(), lat5);
        assert!(matches!(
            spin1_xy_state(Complex64::new(0.3, 0.0), &spec5),
            Err(Error::WrongLength { .. })
        ));
    }

    #[test]
    fn canonical_eta_rectangle() {
        let tau = Complex64::new(0.1, 0.8);
        let eta = Complex64::new(-3.7, 2.9);
        let can = canonical_eta(eta, tau);
        assert!((0.0..2.0).contains(&can.re));
        assert!((0.0..2.0 * tau.im).contains(&can.im));
        // the 2 tau shift rescales all three couplings by a common factor,
        // so only the ratios are canonical
        let c = EllipticContext::new(tau).unwrap();
        let a = crate::model::couplings_xyz(eta, &c).unwrap();
        let b = crate::model::couplings_xyz(can, &c).unwrap();
        let ra = a.jx / a.jz;
        let rb = b.jx / b.jz;
        assert!((ra - rb).norm() < 1e-9 * ra.norm().max(1.0));
        let ra = a.jy / a.jz;
        let rb = b.jy / b.jz;
        assert!((ra - rb).norm() < 1e-9 * ra.norm().max(1.0));
    }

    #[test]
    fn texture_triples_have_coherent_length() {
        let c = ctx(0.8);
        let rep = build_spin_rep(3).unwrap();
        let lat = build_lattice(&[11], Boundary::Periodic).unwrap();
        let spec = ModelSpec::xyz(Complex64::new(2.0 / 11.0, 0.0), c, rep.clone(), lat);
        let eps = ChiralityVector::uniform(1, 1);
        let state = build_shs(Complex64::new(0.28, 0.0), &eps, &spec).unwrap();
        for t in texture(&state, &rep) {
            let norm = libm::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
            assert!((norm - rep.s()).abs() < 1e-13);
        }
    }
}
