//! Exact unitary dynamics: random product-state sampling, spectral-basis
//! time evolution, and infinite-temperature Heisenberg traces.
//!
//! Evolution is exact: `ψ(t) = Q e^{−iΛt} Qᵀ ψ(0)` from a full spectral
//! decomposition, so times are arbitrary nonnegative reals and grids are
//! purely an output choice. Transport observables never evolve a state at
//! all; they evaluate two-operator traces
//! `tr(B e^{−iHt} A e^{iHt})/D = (1/D) Σ_{m,n} B̂_{mn} Â_{nm} e^{i(λ_m−λ_n)t}`
//! directly from rotated operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::basis::{Parity, SpinBasis};
use crate::eigensolver::{
    BlockedDecomposition, BlockedOperator, EigenbasisOperator, SpectralDecomposition,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::hamiltonian::{ChainOperator, CouplingParams, SymmetricMatrix, TermIndex};

/// Norm tolerance enforced on pure states.
pub const NORM_TOL: f64 = 1e-10;

/// Tolerance on the imaginary residue of a Heisenberg trace.
pub const TRACE_IMAG_TOL: f64 = 1e-10;

/// A normalized pure state over the full `2^L` computational basis.
#[derive(Clone, Debug)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Wrap an amplitude vector, checking unit norm (to `1e-10`) and a
    /// power-of-two length.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() || amplitudes.len() < 2 {
            return Err(Error::Domain(format!(
                "state length {} is not a power of two",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!(
                "state norm {norm} deviates from 1 by more than {NORM_TOL:.1e}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// The computational basis state `|index⟩`.
    pub fn basis_state(basis: &SpinBasis, index: usize) -> Result<Self> {
        if index >= basis.dimension() {
            return Err(Error::Domain(format!(
                "basis index {index} out of range for dimension {}",
                basis.dimension()
            )));
        }
        let mut amplitudes = DVector::from_element(basis.dimension(), Complex64::new(0.0, 0.0));
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// Number of sites `log2(dimension)`.
    pub fn sites(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Bloch-sphere angles of a product state, one `(θ, φ)` pair per site with
/// `θ ∈ [0, π)` and `φ ∈ [0, 2π)`.
#[derive(Clone, Debug)]
pub struct BlochAngles {
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl BlochAngles {
    pub fn new(theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if theta.len() != phi.len() {
            return Err(Error::Domain(format!(
                "angle lists have mismatched lengths {} and {}",
                theta.len(),
                phi.len()
            )));
        }
        if let Some(t) = theta
            .iter()
            .find(|t| !(0.0..std::f64::consts::PI).contains(*t))
        {
            return Err(Error::Domain(format!("theta {t} outside [0, pi)")));
        }
        if let Some(p) = phi
            .iter()
            .find(|p| !(0.0..std::f64::consts::TAU).contains(*p))
        {
            return Err(Error::Domain(format!("phi {p} outside [0, 2 pi)")));
        }
        Ok(Self { theta, phi })
    }

    pub fn sites(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// The product state `⊗_i [cos(θ_i/2)|↑⟩ + e^{iφ_i} sin(θ_i/2)|↓⟩]`.
    pub fn product_state(&self) -> PureState {
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for (theta, phi) in self.theta.iter().zip(&self.phi) {
            let up = Complex64::new((theta / 2.0).cos(), 0.0);
            let down = Complex64::from_polar((theta / 2.0).sin(), *phi);
            let mut next = vec![Complex64::new(0.0, 0.0); amps.len() * 2];
            for (n, a) in amps.iter().enumerate() {
                next[n] = a * down;
                next[n + amps.len()] = a * up;
            }
            amps = next;
        }
        PureState::new(DVector::from_vec(amps)).expect("product construction is normalized")
    }
}

/// How the polar angle of each site is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    /// Uniform direction on the Bloch sphere: `cos θ` uniform on `(−1, 1]`.
    SphereUniform,
    /// `θ` itself uniform on `[0, π)`.
    LiteralRanges,
}

impl SamplingMode {
    pub fn label(&self) -> &'static str {
        match self {
            SamplingMode::SphereUniform => "sphere",
            SamplingMode::LiteralRanges => "literal",
        }
    }
}

/// Deterministic RNG stream for ensemble member `member` of a chain of
/// length `sites`: one ChaCha stream per `(base_seed, L, member)` triple, so
/// ensembles are reproducible and independent of evaluation order.
pub fn ensemble_rng(base_seed: u64, sites: usize, member: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
    rng.set_stream(((sites as u64) << 32) | member as u64);
    rng
}

/// Draw a random product state. Per site the draw order is fixed: first the
/// polar variable, then `φ` uniform on `[0, 2π)`.
pub fn sample_product_state(
    rng: &mut impl Rng,
    sites: usize,
    mode: SamplingMode,
) -> (BlochAngles, PureState) {
    let mut theta = Vec::with_capacity(sites);
    let mut phi = Vec::with_capacity(sites);
    for _ in 0..sites {
        let u: f64 = rng.gen();
        let t = match mode {
            // u in [0, 1) makes cos θ = 1 − 2u uniform on (−1, 1]
            SamplingMode::SphereUniform => (1.0 - 2.0 * u).acos(),
            SamplingMode::LiteralRanges => u * std::f64::consts::PI,
        };
        theta.push(t);
        phi.push(rng.gen::<f64>() * std::f64::consts::TAU);
    }
    let angles = BlochAngles::new(theta, phi).expect("sampled angles are in range");
    let state = angles.product_state();
    (angles, state)
}

/// The central-bond energy perturbation: `ρ(0) = (I + ε σ^z σ^z_center)/2^L`
/// with the strength `ε` kept symbolic. Every transport quantity in this
/// crate is linear in ε and divided by it, so ε never takes a numeric value;
/// `ρ(0)` would be positive semidefinite exactly when `|ε| ≤ 1`.
#[derive(Clone, Debug)]
pub struct EnergyPerturbation {
    operator: SymmetricMatrix,
}

impl EnergyPerturbation {
    pub fn central_bond(basis: &SpinBasis) -> Self {
        Self {
            operator: crate::hamiltonian::central_bond_operator(basis),
        }
    }

    /// The perturbation operator `σ^z_{L/2} σ^z_{L/2+1}`.
    pub fn operator(&self) -> &SymmetricMatrix {
        &self.operator
    }
}

// ---------------------------------------------------------------------------
// evolution
// ---------------------------------------------------------------------------

fn real_tr_mul_complex(q: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let re = DVector::from_iterator(v.len(), v.iter().map(|c| c.re));
    let im = DVector::from_iterator(v.len(), v.iter().map(|c| c.im));
    let out_re = q.tr_mul(&re);
    let out_im = q.tr_mul(&im);
    out_re
        .iter()
        .zip(out_im.iter())
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect()
}

fn real_mul_complex(q: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let re = DVector::from_iterator(v.len(), v.iter().map(|c| c.re));
    let im = DVector::from_iterator(v.len(), v.iter().map(|c| c.im));
    let out_re = q * re;
    let out_im = q * im;
    out_re
        .iter()
        .zip(out_im.iter())
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect()
}

fn apply_phases(coeffs: &[Complex64], eigenvalues: &[f64], t: f64) -> Vec<Complex64> {
    coeffs
        .iter()
        .zip(eigenvalues)
        .map(|(c, &lambda)| c * Complex64::from_polar(1.0, -lambda * t))
        .collect()
}

/// A state expressed in the eigenbasis of a full-space decomposition; lets a
/// caller amortize the forward rotation over many evaluation times.
#[derive(Clone, Debug)]
pub struct EigenbasisState {
    coeffs: Vec<Complex64>,
}

/// Rotate a state into the eigenbasis: `c = Qᵀ ψ`.
pub fn to_eigenbasis(d: &SpectralDecomposition, psi: &PureState) -> Result<EigenbasisState> {
    if d.dimension() != psi.dimension() {
        return Err(Error::Domain(format!(
            "state dimension {} does not match decomposition dimension {}",
            psi.dimension(),
            d.dimension()
        )));
    }
    Ok(EigenbasisState {
        coeffs: real_tr_mul_complex(d.eigenvectors(), psi.amplitudes().as_slice()),
    })
}

/// The state at time `t`: `ψ(t) = Q e^{−iΛt} c`.
pub fn state_at(d: &SpectralDecomposition, state: &EigenbasisState, t: f64) -> Result<PureState> {
    if d.dimension() != state.coeffs.len() {
        return Err(Error::Domain(format!(
            "coefficient length {} does not match decomposition dimension {}",
            state.coeffs.len(),
            d.dimension()
        )));
    }
    let phased = apply_phases(&state.coeffs, d.eigenvalues(), t);
    let amps = real_mul_complex(d.eigenvectors(), &phased);
    PureState::new(DVector::from_vec(amps))
}

/// Exact evolution `ψ(t) = Q e^{−iΛt} Qᵀ ψ0` with a full-space decomposition.
pub fn evolve_state(d: &SpectralDecomposition, psi0: &PureState, t: f64) -> Result<PureState> {
    state_at(d, &to_eigenbasis(d, psi0)?, t)
}

/// A state split into parity components, each in its sector eigenbasis.
#[derive(Clone, Debug)]
pub struct BlockedEigenbasisState {
    even: Vec<Complex64>,
    odd: Vec<Complex64>,
}

/// Split a state into parity components and rotate each into its sector
/// eigenbasis. The components evolve independently because H is
/// reflection-symmetric.
pub fn to_eigenbasis_blocked(
    d: &BlockedDecomposition,
    psi: &PureState,
) -> Result<BlockedEigenbasisState> {
    if d.total_dimension() != psi.dimension() {
        return Err(Error::Domain(format!(
            "state dimension {} does not match blocked dimension {}",
            psi.dimension(),
            d.total_dimension()
        )));
    }
    let amps = psi.amplitudes().as_slice();
    let even = d.sectors().project_state(amps, Parity::Even)?;
    let odd = d.sectors().project_state(amps, Parity::Odd)?;
    Ok(BlockedEigenbasisState {
        even: real_tr_mul_complex(d.sector(Parity::Even).eigenvectors(), &even),
        odd: real_tr_mul_complex(d.sector(Parity::Odd).eigenvectors(), &odd),
    })
}

/// The state at time `t` from parity components.
pub fn state_at_blocked(
    d: &BlockedDecomposition,
    state: &BlockedEigenbasisState,
    t: f64,
) -> Result<PureState> {
    let even = real_mul_complex(
        d.sector(Parity::Even).eigenvectors(),
        &apply_phases(&state.even, d.sector(Parity::Even).eigenvalues(), t),
    );
    let odd = real_mul_complex(
        d.sector(Parity::Odd).eigenvectors(),
        &apply_phases(&state.odd, d.sector(Parity::Odd).eigenvalues(), t),
    );
    let full = d.sectors().embed_state(&even, &odd)?;
    PureState::new(DVector::from_vec(full))
}

/// Exact evolution through the parity blocks; agrees with [`evolve_state`]
/// on the full decomposition to high precision.
pub fn evolve_state_blocked(
    d: &BlockedDecomposition,
    psi0: &PureState,
    t: f64,
) -> Result<PureState> {
    state_at_blocked(d, &to_eigenbasis_blocked(d, psi0)?, t)
}

// ---------------------------------------------------------------------------
// Heisenberg traces
// ---------------------------------------------------------------------------

/// Unnormalized `Σ_{m,n} B̂_{mn} Â_{nm} e^{i(λ_m−λ_n)t}`, row-parallel with a
/// fixed sequential reduction order.
fn trace_raw(
    eigenvalues: &[f64],
    a: &EigenbasisOperator,
    b: &EigenbasisOperator,
    t: f64,
) -> Complex64 {
    let dim = eigenvalues.len();
    let phases: Vec<Complex64> = eigenvalues
        .iter()
        .map(|&l| Complex64::from_polar(1.0, l * t))
        .collect();
    // e^{i(λ_m−λ_n)t} = p_m conj(p_n); with both operators symmetric the row
    // sum becomes p_m · conj(Σ_n Â_nm B̂_nm p_n), one pass over column m.
    let rows = exec::indexed_map(dim, |m| {
        let a_col = a.matrix().column(m);
        let b_col = b.matrix().column(m);
        let mut s = Complex64::new(0.0, 0.0);
        for n in 0..dim {
            s += a_col[n] * b_col[n] * phases[n];
        }
        phases[m] * s.conj()
    });
    rows.into_iter().sum()
}

/// Infinite-temperature two-operator trace
/// `tr(B e^{−iHt} A e^{iHt})/D`, with both operators already rotated into
/// the eigenbasis of `d`. The imaginary residue must stay below `1e-10`; it
/// is checked and discarded.
pub fn heisenberg_trace(
    d: &SpectralDecomposition,
    a_hat: &EigenbasisOperator,
    b_hat: &EigenbasisOperator,
    t: f64,
) -> Result<f64> {
    if a_hat.dimension() != d.dimension() || b_hat.dimension() != d.dimension() {
        return Err(Error::Domain(format!(
            "operator dimensions ({}, {}) do not match decomposition dimension {}",
            a_hat.dimension(),
            b_hat.dimension(),
            d.dimension()
        )));
    }
    let raw = trace_raw(d.eigenvalues(), a_hat, b_hat, t);
    let value = raw / d.dimension() as f64;
    if value.im.abs() > TRACE_IMAG_TOL {
        return Err(Error::Numerical(format!(
            "heisenberg trace imaginary residue {:.3e} exceeds {TRACE_IMAG_TOL:.1e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// [`heisenberg_trace`] over both parity blocks of reflection-symmetric
/// operators: the block traces add, normalized by the full dimension.
pub fn heisenberg_trace_blocked(
    d: &BlockedDecomposition,
    a_hat: &BlockedOperator,
    b_hat: &BlockedOperator,
    t: f64,
) -> Result<f64> {
    let raw_even = trace_raw(
        d.sector(Parity::Even).eigenvalues(),
        &a_hat.even,
        &b_hat.even,
        t,
    );
    let raw_odd = trace_raw(
        d.sector(Parity::Odd).eigenvalues(),
        &a_hat.odd,
        &b_hat.odd,
        t,
    );
    let value = (raw_even + raw_odd) / d.total_dimension() as f64;
    if value.im.abs() > TRACE_IMAG_TOL {
        return Err(Error::Numerical(format!(
            "heisenberg trace imaginary residue {:.3e} exceeds {TRACE_IMAG_TOL:.1e}",
            value.im
        )));
    }
    Ok(value.re)
}

// ---------------------------------------------------------------------------
// local energy profiles
// ---------------------------------------------------------------------------

/// Precomputed rotated operators for the local-energy profile
/// `r ↦ ⟨H_r⟩(t)/ε` after the central-bond perturbation.
///
/// Values are normalized by the conserved energy `⟨H⟩/ε = J`, so the profile
/// starts as a delta at the central bond and sums to one for any couplings
/// (with the unit-coupling convention `J = 1` this is the plain `1/ε`
/// normalization).
pub struct EnergyProfiler {
    terms: Vec<(TermIndex, EigenbasisOperator)>,
    center: EigenbasisOperator,
    coupling: f64,
}

impl EnergyProfiler {
    pub fn new(
        d: &SpectralDecomposition,
        p: &CouplingParams,
        basis: &SpinBasis,
    ) -> Result<Self> {
        if d.dimension() != basis.dimension() {
            return Err(Error::Domain(format!(
                "decomposition dimension {} does not cover the full space {}",
                d.dimension(),
                basis.dimension()
            )));
        }
        let terms = TermIndex::all(basis.sites())
            .into_iter()
            .map(|r| {
                let term = crate::hamiltonian::build_local_term(r, p, basis)?;
                Ok((r, d.rotate(&term)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let center = d.rotate(&crate::hamiltonian::central_bond_operator(basis))?;
        Ok(Self {
            terms,
            center,
            coupling: p.j,
        })
    }

    /// `⟨H_r⟩(t)/ε` for every site and bond, ordered by position.
    pub fn profile(&self, d: &SpectralDecomposition, t: f64) -> Result<Vec<(TermIndex, f64)>> {
        self.terms
            .iter()
            .map(|(r, hr)| {
                let v = heisenberg_trace(d, &self.center, hr, t)?;
                Ok((*r, v / self.coupling))
            })
            .collect()
    }
}

/// One-shot convenience for [`EnergyProfiler`].
pub fn energy_profile(
    d: &SpectralDecomposition,
    p: &CouplingParams,
    basis: &SpinBasis,
    t: f64,
) -> Result<Vec<(TermIndex, f64)>> {
    EnergyProfiler::new(d, p, basis)?.profile(d, t)
}

/// Parity-blocked energy profiler.
///
/// Individual local terms do not commute with reflection (H_r maps to
/// H_{L+1−r}), so each term is symmetrized to `(H_r + H_{L+1−r})/2` before
/// projection. Because the evolved perturbation is itself reflection
/// symmetric, the symmetrized trace equals the plain one and the profile is
/// unchanged.
pub struct BlockedEnergyProfiler {
    terms: Vec<(TermIndex, BlockedOperator)>,
    center: BlockedOperator,
    coupling: f64,
}

impl BlockedEnergyProfiler {
    pub fn new(
        d: &BlockedDecomposition,
        p: &CouplingParams,
        basis: &SpinBasis,
    ) -> Result<Self> {
        let l = basis.sites();
        let terms = TermIndex::all(l)
            .into_iter()
            .map(|r| {
                let a = ChainOperator::local_term(r, p, basis)?;
                let b = ChainOperator::local_term(r.reflected(l), p, basis)?;
                let sym = a.averaged_with(&b)?;
                Ok((r, d.rotate_chain(&sym, basis)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let center = d.rotate_chain(&ChainOperator::central_bond(basis), basis)?;
        Ok(Self {
            terms,
            center,
            coupling: p.j,
        })
    }

    /// `⟨H_r⟩(t)/ε` for every site and bond, ordered by position.
    pub fn profile(&self, d: &BlockedDecomposition, t: f64) -> Result<Vec<(TermIndex, f64)>> {
        self.terms
            .iter()
            .map(|(r, hr)| {
                let v = heisenberg_trace_blocked(d, &self.center, hr, t)?;
                Ok((*r, v / self.coupling))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::eigendecompose;
    use crate::hamiltonian::{build_hamiltonian, central_bond_operator};
    use crate::reference;
    use approx::assert_abs_diff_eq;

    fn setup(l: usize) -> (CouplingParams, SpinBasis, SpectralDecomposition) {
        let basis = SpinBasis::new(l).unwrap();
        let p = CouplingParams::main(l);
        let h = build_hamiltonian(&p, &basis).unwrap();
        (p, basis, eigendecompose(&h).unwrap())
    }

    fn random_state(l: usize, seed: u64) -> PureState {
        let mut rng = ensemble_rng(seed, l, 0);
        sample_product_state(&mut rng, l, SamplingMode::SphereUniform).1
    }

    #[test]
    fn sampled_states_are_normalized_with_angles_in_range() {
        for mode in [SamplingMode::SphereUniform, SamplingMode::LiteralRanges] {
            let mut rng = ensemble_rng(7, 6, 3);
            for _ in 0..20 {
                let (angles, state) = sample_product_state(&mut rng, 6, mode);
                assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-12);
                assert!(angles
                    .theta()
                    .iter()
                    .all(|t| (0.0..std::f64::consts::PI).contains(t)));
                assert!(angles
                    .phi()
                    .iter()
                    .all(|p| (0.0..std::f64::consts::TAU).contains(p)));
            }
        }
    }

    #[test]
    fn ensemble_streams_are_reproducible_and_distinct() {
        let a1 = sample_product_state(&mut ensemble_rng(42, 8, 5), 8, SamplingMode::SphereUniform);
        let a2 = sample_product_state(&mut ensemble_rng(42, 8, 5), 8, SamplingMode::SphereUniform);
        assert_eq!(a1.0.theta(), a2.0.theta());
        assert_eq!(a1.0.phi(), a2.0.phi());
        let b = sample_product_state(&mut ensemble_rng(42, 8, 6), 8, SamplingMode::SphereUniform);
        assert_ne!(a1.0.theta(), b.0.theta());
        let c = sample_product_state(&mut ensemble_rng(42, 6, 5), 6, SamplingMode::SphereUniform);
        assert_ne!(&a1.0.theta()[..6], c.0.theta());
    }

    /// Monte Carlo of the stated distributions: single-site magnetizations
    /// vanish on average in both sampling modes (infinite temperature).
    #[test]
    fn single_site_magnetization_averages_to_zero() {
        for mode in [SamplingMode::SphereUniform, SamplingMode::LiteralRanges] {
            let mut rng = ensemble_rng(123, 2, 0);
            let samples = 100_000;
            let (mut mz, mut mx) = (0.0, 0.0);
            for _ in 0..samples {
                let (angles, _) = sample_product_state(&mut rng, 2, mode);
                mz += angles.theta()[0].cos();
                mx += angles.theta()[0].sin() * angles.phi()[0].cos();
            }
            mz /= samples as f64;
            mx /= samples as f64;
            assert!(mz.abs() < 0.01, "{mode:?}: <sigma_z> = {mz}");
            assert!(mx.abs() < 0.01, "{mode:?}: <sigma_x> = {mx}");
        }
    }

    #[test]
    fn product_state_amplitudes_follow_bit_convention() {
        // site 1 fully up (θ=0), site 2 fully down (θ→π not representable;
        // use θ=π−1e-9 ≈ down) would be awkward; instead check a two-site
        // state analytically at θ = π/2.
        let angles = BlochAngles::new(
            vec![0.0, std::f64::consts::FRAC_PI_2],
            vec![0.0, std::f64::consts::FRAC_PI_2],
        )
        .unwrap();
        let psi = angles.product_state();
        let a = psi.amplitudes();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // site 1 up means only indices with bit 0 set are populated
        assert_abs_diff_eq!(a[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[2].norm(), 0.0, epsilon = 1e-15);
        // site 2: up amplitude cos(π/4), down amplitude e^{iπ/2} sin(π/4)
        assert_abs_diff_eq!(a[3].re, s, epsilon = 1e-15);
        assert!((a[1] - Complex64::new(0.0, s)).norm() < 1e-15);
    }

    #[test]
    fn evolution_at_zero_time_is_identity() {
        let (_, _, d) = setup(4);
        let psi = random_state(4, 11);
        let out = evolve_state(&d, &psi, 0.0).unwrap();
        let defect = (out.amplitudes() - psi.amplitudes()).norm();
        assert!(defect <= 1e-13, "defect {defect:.3e}");
    }

    #[test]
    fn eigenvectors_are_stationary() {
        let (_, _, d) = setup(4);
        let k = 7;
        let col = d.eigenvectors().column(k);
        let psi = PureState::new(DVector::from_iterator(
            16,
            col.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
        .unwrap();
        let t = 2.9;
        let out = evolve_state(&d, &psi, t).unwrap();
        let phase = Complex64::from_polar(1.0, -d.eigenvalues()[k] * t);
        for (o, p) in out.amplitudes().iter().zip(psi.amplitudes().iter()) {
            assert!((o - phase * p).norm() < 1e-12);
        }
    }

    #[test]
    fn evolution_matches_series_propagator() {
        let (p, basis, d) = setup(4);
        let h = build_hamiltonian(&p, &basis).unwrap();
        let psi = random_state(4, 5);
        for t in [0.3, 1.7, 6.0] {
            let fast = evolve_state(&d, &psi, t).unwrap();
            let slow = reference::evolve(&h, psi.amplitudes().as_slice(), t).unwrap();
            let defect = fast
                .amplitudes()
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(defect < 1e-8, "t = {t}: defect {defect:.3e}");
        }
    }

    #[test]
    fn evolutions_compose() {
        let (_, _, d) = setup(6);
        let psi = random_state(6, 21);
        let step = evolve_state(&d, &evolve_state(&d, &psi, 1.3).unwrap(), 2.1).unwrap();
        let direct = evolve_state(&d, &psi, 3.4).unwrap();
        let defect = (step.amplitudes() - direct.amplitudes()).norm();
        assert!(defect < 1e-9, "composition defect {defect:.3e}");
    }

    #[test]
    fn blocked_evolution_matches_full_space() {
        for l in [4usize, 6] {
            let (p, basis, d) = setup(l);
            let blocked = BlockedDecomposition::compute(&p, &basis).unwrap();
            let psi = random_state(l, 17);
            for t in [0.4, 2.0, 9.5] {
                let full = evolve_state(&d, &psi, t).unwrap();
                let fast = evolve_state_blocked(&blocked, &psi, t).unwrap();
                let defect = (full.amplitudes() - fast.amplitudes()).norm();
                assert!(defect < 1e-9, "L = {l}, t = {t}: defect {defect:.3e}");
            }
        }
    }

    #[test]
    fn unitarity_holds_to_long_times() {
        let (_, _, d) = setup(6);
        let psi = random_state(6, 2);
        let coeffs = to_eigenbasis(&d, &psi).unwrap();
        for t in [1.0, 20.0, 80.0, 200.0] {
            let out = state_at(&d, &coeffs, t).unwrap();
            assert!(
                (out.norm() - 1.0).abs() < 1e-10,
                "t = {t}: norm {}",
                out.norm()
            );
        }
    }

    #[test]
    fn central_bond_trace_at_zero_time_is_one() {
        let (_, basis, d) = setup(4);
        let a = d.rotate(&central_bond_operator(&basis)).unwrap();
        let v = heisenberg_trace(&d, &a, &a, 0.0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_is_conserved_under_the_trace() {
        let (p, basis, d) = setup(6);
        let h = build_hamiltonian(&p, &basis).unwrap();
        let a = d.rotate(&central_bond_operator(&basis)).unwrap();
        let h_hat = d.rotate(&h).unwrap();
        let v0 = heisenberg_trace(&d, &a, &h_hat, 0.0).unwrap();
        assert_abs_diff_eq!(v0, p.j, epsilon = 1e-10);
        for t in [0.7, 3.0, 25.0] {
            let v = heisenberg_trace(&d, &a, &h_hat, t).unwrap();
            assert_abs_diff_eq!(v, v0, epsilon = 1e-10);
        }
    }

    #[test]
    fn trace_is_symmetric_under_swap_with_time_reversal() {
        let (p, basis, d) = setup(4);
        let a = d.rotate(&central_bond_operator(&basis)).unwrap();
        let w = d
            .rotate(&crate::hamiltonian::build_weighted_spread_operator(&p, &basis).unwrap())
            .unwrap();
        for t in [0.5, 1.9] {
            let ab = heisenberg_trace(&d, &a, &w, t).unwrap();
            let ba = heisenberg_trace(&d, &w, &a, -t).unwrap();
            assert_abs_diff_eq!(ab, ba, epsilon = 1e-10);
        }
    }

    #[test]
    fn profile_is_a_delta_then_conserves_and_reflects() {
        let (p, basis, d) = setup(6);
        let profiler = EnergyProfiler::new(&d, &p, &basis).unwrap();
        let at0 = profiler.profile(&d, 0.0).unwrap();
        for (r, v) in &at0 {
            let expect = if *r == TermIndex::central_bond(6) {
                1.0
            } else {
                0.0
            };
            assert_abs_diff_eq!(*v, expect, epsilon = 1e-10);
        }
        for t in [0.8, 4.0] {
            let profile = profiler.profile(&d, t).unwrap();
            let total: f64 = profile.iter().map(|(_, v)| v).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
            for (r, v) in &profile {
                let mirrored = profile
                    .iter()
                    .find(|(s, _)| *s == r.reflected(6))
                    .unwrap()
                    .1;
                assert_abs_diff_eq!(*v, mirrored, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn profile_matches_density_matrix_oracle() {
        let (p, basis, d) = setup(4);
        let profiler = EnergyProfiler::new(&d, &p, &basis).unwrap();
        for t in [0.3, 1.7, 6.0] {
            let fast = profiler.profile(&d, t).unwrap();
            let slow = reference::energy_profile(&p, &basis, 0.5, t).unwrap();
            for ((ra, va), (rb, vb)) in fast.iter().zip(&slow) {
                assert_eq!(ra, rb);
                assert_abs_diff_eq!(*va, *vb, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn blocked_profile_matches_full_profile() {
        let (p, basis, d) = setup(6);
        let blocked = BlockedDecomposition::compute(&p, &basis).unwrap();
        let full = EnergyProfiler::new(&d, &p, &basis).unwrap();
        let fast = BlockedEnergyProfiler::new(&blocked, &p, &basis).unwrap();
        for t in [0.0, 1.1, 7.3] {
            let a = full.profile(&d, t).unwrap();
            let b = fast.profile(&blocked, t).unwrap();
            for ((ra, va), (rb, vb)) in a.iter().zip(&b) {
                assert_eq!(ra, rb);
                assert_abs_diff_eq!(*va, *vb, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn dimension_mismatches_are_domain_errors() {
        let (_, _, d4) = setup(4);
        let psi6 = random_state(6, 1);
        assert!(matches!(
            evolve_state(&d4, &psi6, 1.0),
            Err(Error::Domain(_))
        ));
    }
}
