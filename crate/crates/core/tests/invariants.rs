//! Cross-module invariants at sizes above the per-module unit tests.

use approx::assert_abs_diff_eq;
use edising_core::basis::{Parity, ParitySectors, SpinBasis};
use edising_core::dynamics::{
    ensemble_rng, evolve_state, evolve_state_blocked, sample_product_state, SamplingMode,
};
use edising_core::eigensolver::{
    eigendecompose, verify_decomposition, BlockedDecomposition,
};
use edising_core::hamiltonian::{build_hamiltonian, ChainOperator, CouplingParams};
use edising_core::observables::{energy_spread_r_blocked, entanglement_entropy};
use edising_core::reference;

#[test]
fn full_and_blocked_spectra_agree_to_l10() {
    let l = 10;
    let basis = SpinBasis::new(l).unwrap();
    let p = CouplingParams::main(l);
    let h = build_hamiltonian(&p, &basis).unwrap();
    let full = eigendecompose(&h).unwrap();
    let report = verify_decomposition(&h, &full).unwrap();
    assert!(report.orthonormality_defect <= 1e-10);
    assert!(report.reconstruction_defect <= 1e-9 * h.matrix().amax().max(1.0));

    let blocked = BlockedDecomposition::compute(&p, &basis).unwrap();
    let mut union: Vec<f64> = blocked
        .sector(Parity::Even)
        .eigenvalues()
        .iter()
        .chain(blocked.sector(Parity::Odd).eigenvalues())
        .copied()
        .collect();
    union.sort_by(f64::total_cmp);
    for (a, b) in full.eigenvalues().iter().zip(&union) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
    }
}

#[test]
fn sector_block_residuals_stay_within_bounds_at_l12() {
    // eigendecompose self-verifies; this pins the bound explicitly on the
    // largest block the suite builds
    let l = 12;
    let basis = SpinBasis::new(l).unwrap();
    let p = CouplingParams::main(l);
    let sectors = ParitySectors::build(&basis);
    let block = ChainOperator::hamiltonian(&p, &basis)
        .unwrap()
        .sector_block(&sectors, Parity::Even)
        .unwrap();
    let d = eigendecompose(&block).unwrap();
    let report = verify_decomposition(&block, &d).unwrap();
    assert!(
        report.orthonormality_defect <= 1e-10,
        "orthonormality {:.3e}",
        report.orthonormality_defect
    );
    assert!(
        report.reconstruction_defect <= 1e-9 * block.matrix().amax().max(1.0),
        "reconstruction {:.3e}",
        report.reconstruction_defect
    );
}

#[test]
fn blocked_evolution_matches_full_space_at_l8() {
    let l = 8;
    let basis = SpinBasis::new(l).unwrap();
    let p = CouplingParams::main(l);
    let h = build_hamiltonian(&p, &basis).unwrap();
    let full = eigendecompose(&h).unwrap();
    let blocked = BlockedDecomposition::compute(&p, &basis).unwrap();
    let mut rng = ensemble_rng(31, l, 0);
    let (_, psi) = sample_product_state(&mut rng, l, SamplingMode::SphereUniform);
    for t in [0.7, 5.0, 42.0] {
        let a = evolve_state(&full, &psi, t).unwrap();
        let b = evolve_state_blocked(&blocked, &psi, t).unwrap();
        let defect = (a.amplitudes() - b.amplitudes()).norm();
        assert!(defect < 1e-9, "t = {t}: defect {defect:.3e}");
        // the two paths also agree on the measured observable
        let sa = entanglement_entropy(&a, l / 2).unwrap();
        let sb = entanglement_entropy(&b, l / 2).unwrap();
        assert_abs_diff_eq!(sa, sb, epsilon = 1e-9);
    }
}

#[test]
fn blocked_spread_matches_density_matrix_oracle() {
    for l in [4usize, 6] {
        let basis = SpinBasis::new(l).unwrap();
        let p = CouplingParams::main(l);
        let d = BlockedDecomposition::compute(&p, &basis).unwrap();
        let w = d
            .rotate_chain(&ChainOperator::weighted_spread(&p, &basis).unwrap(), &basis)
            .unwrap();
        let a = d
            .rotate_chain(&ChainOperator::central_bond(&basis), &basis)
            .unwrap();
        for t in [0.0, 0.9, 3.7] {
            let fast = energy_spread_r_blocked(&d, &w, &a, t).unwrap() / p.j;
            let slow = reference::spread_distance(&p, &basis, 0.25, t).unwrap();
            assert_abs_diff_eq!(fast, slow, epsilon = 1e-8);
        }
    }
}

/// The supp-a preset shows a banded (quasi-periodic) spectral bulk where the
/// production preset is featureless. Both spectra have sparse extreme tails,
/// so the discriminator is bulk smoothness: total neighbor-to-neighbor count
/// variation across the middle half of a 50-bin histogram, relative to the
/// mass there.
#[test]
fn eigenvalue_band_structure_separates_presets() {
    let l = 12;
    let basis = SpinBasis::new(l).unwrap();
    let sectors = ParitySectors::build(&basis);
    let bulk_fluctuation = |p: &CouplingParams| {
        let block = ChainOperator::hamiltonian(p, &basis)
            .unwrap()
            .sector_block(&sectors, Parity::Even)
            .unwrap();
        let d = eigendecompose(&block).unwrap();
        let hist = edising_core::spectral::eigenvalue_histogram(d.eigenvalues(), 50).unwrap();
        let counts: Vec<f64> = hist.bins()[12..38].iter().map(|b| b.value).collect();
        let variation: f64 = counts.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        variation / counts.iter().sum::<f64>()
    };
    let featureless = bulk_fluctuation(&CouplingParams::main(l));
    let banded = bulk_fluctuation(&CouplingParams::preset("supp-a", l).unwrap());
    assert!(
        featureless < 0.15,
        "main preset bulk should be smooth, fluctuation {featureless:.3}"
    );
    assert!(
        banded > 2.0 * featureless,
        "supp-a bulk should oscillate, fluctuation {banded:.3} vs {featureless:.3}"
    );
}
