//! Brute-force reference implementations.
//!
//! Everything here trades speed for directness: the propagator is a truncated
//! power series of `e^{−iHt}` with scaling and squaring, transport observables
//! evolve the full density matrix explicitly, and entropy diagonalizes the
//! reduced density matrix instead of taking a singular value decomposition.
//! None of it touches the spectral-decomposition code paths, so these
//! routines serve as independent cross-checks for the fast implementations.
//! Practical only for small chains (L ≤ 8).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::SpinBasis;
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_hamiltonian, build_local_term, central_bond_operator, CouplingParams, SymmetricMatrix,
    TermIndex,
};

/// `e^{−iHt}` by scaling and squaring of the truncated Taylor series.
pub fn propagator(h: &SymmetricMatrix, t: f64) -> DMatrix<Complex64> {
    let d = h.dimension();
    let a = h.matrix().map(|x| Complex64::new(0.0, -x * t));
    // scale so the series argument has infinity norm below 1
    let norm: f64 = (0..d)
        .map(|i| (0..d).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 1.0 {
        norm.log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.map(|x| x / 2f64.powi(squarings as i32));

    let mut result = DMatrix::<Complex64>::identity(d, d);
    let mut term = DMatrix::<Complex64>::identity(d, d);
    for k in 1..=40 {
        term = (&term * &scaled).map(|x| x / k as f64);
        result += &term;
        let tail: f64 = term.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if tail < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Evolve raw amplitudes with the series propagator.
pub fn evolve(h: &SymmetricMatrix, amplitudes: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    if amplitudes.len() != h.dimension() {
        return Err(Error::Domain(format!(
            "state length {} does not match dimension {}",
            amplitudes.len(),
            h.dimension()
        )));
    }
    let u = propagator(h, t);
    let psi = nalgebra::DVector::from_column_slice(amplitudes);
    Ok((u * psi).iter().copied().collect())
}

/// Local energy profile `⟨H_r⟩(t)/ε` by explicit density-matrix evolution of
/// `ρ(0) = (I + ε σ^z σ^z_center)/2^L`, for an explicit perturbation
/// strength `ε` (the result is ε-independent; passing different values only
/// exercises roundoff).
pub fn energy_profile(
    p: &CouplingParams,
    basis: &SpinBasis,
    eps: f64,
    t: f64,
) -> Result<Vec<(TermIndex, f64)>> {
    let d = basis.dimension() as f64;
    let h = build_hamiltonian(p, basis)?;
    let u = propagator(&h, t);
    let a = central_bond_operator(basis);
    let rho0 = DMatrix::<Complex64>::from_fn(basis.dimension(), basis.dimension(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new((delta + eps * a.matrix()[(i, j)]) / d, 0.0)
    });
    let rho_t = &u * rho0 * u.adjoint();
    TermIndex::all(basis.sites())
        .into_iter()
        .map(|r| {
            let hr = build_local_term(r, p, basis)?;
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..basis.dimension() {
                for j in 0..basis.dimension() {
                    tr += Complex64::new(hr.matrix()[(i, j)], 0.0) * rho_t[(j, i)];
                }
            }
            Ok((r, tr.re / eps))
        })
        .collect()
}

/// Energy spread distance `R(t) = (2/ε) Σ_r |r − (L+1)/2| ⟨H_r⟩(t)` by
/// explicit density-matrix evolution.
pub fn spread_distance(p: &CouplingParams, basis: &SpinBasis, eps: f64, t: f64) -> Result<f64> {
    let profile = energy_profile(p, basis, eps, t)?;
    Ok(2.0
        * profile
            .iter()
            .map(|(r, v)| r.distance_from_center(basis.sites()) * v)
            .sum::<f64>())
}

/// Bipartite entanglement entropy in bits across `cut`, via the eigenvalues
/// of the reduced density matrix of the first `cut` sites.
pub fn entropy_bits(amplitudes: &[Complex64], cut: usize) -> Result<f64> {
    let d = amplitudes.len();
    if !d.is_power_of_two() {
        return Err(Error::Domain(format!("state length {d} is not a power of two")));
    }
    let sites = d.trailing_zeros() as usize;
    if cut == 0 || cut >= sites {
        return Err(Error::Domain(format!(
            "cut must satisfy 1 <= cut <= {}, got {cut}",
            sites - 1
        )));
    }
    let da = 1usize << cut;
    let db = d >> cut;
    // ρ_A[a, a'] = Σ_b ψ[a + b·da] ψ*[a' + b·da]
    let mut rho = DMatrix::<Complex64>::zeros(da, da);
    for b in 0..db {
        for a_row in 0..da {
            for a_col in 0..da {
                rho[(a_row, a_col)] +=
                    amplitudes[a_row + (b << cut)] * amplitudes[a_col + (b << cut)].conj();
            }
        }
    }
    let eigs = rho.symmetric_eigen().eigenvalues;
    let mut s = 0.0;
    for p in eigs.iter() {
        if *p > 1e-12 {
            s -= p * p.log2();
        }
    }
    Ok(s)
}
