//! Dense assembly of the Ising-chain Hamiltonian, its local decomposition,
//! and parity-block projections.
//!
//! The chain is open, with transverse field `g` on every site, longitudinal
//! field `h` on bulk sites, `h − J` on the two end sites, and Ising coupling
//! `J` on every bond:
//!
//!   H = Σ_i g σ^x_i + Σ_{i=2}^{L−1} h σ^z_i + (h−J)(σ^z_1 + σ^z_L)
//!       + Σ_{i=1}^{L−1} J σ^z_i σ^z_{i+1}
//!
//! The same operator partitions into local pieces H_r attached to sites
//! (integer r) and bonds (half-integer r), which is what the energy-transport
//! observables integrate against. σ^z is diagonal in the computational basis
//! and σ^x is a single bit flip, so every matrix here is real symmetric, and
//! every operator of interest has the compact form captured by
//! [`ChainOperator`]: a diagonal plus one bit-flip amplitude per site. That
//! form projects straight into a parity block without ever materializing the
//! full `2^L × 2^L` matrix.

use nalgebra::DMatrix;

use crate::basis::{Parity, ParitySectors, SpinBasis};
use crate::error::{Error, Result};

/// Coupling constants of the chain, together with its length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingParams {
    /// Transverse field.
    pub g: f64,
    /// Bulk longitudinal field.
    pub h: f64,
    /// Ising coupling; the end sites carry longitudinal field `h − j`.
    pub j: f64,
    /// Even chain length.
    pub sites: usize,
}

/// Names accepted by [`CouplingParams::preset`].
pub const PRESET_NAMES: [&str; 3] = ["main", "supp-a", "supp-b"];

impl CouplingParams {
    /// Validated constructor. `J = 0` is rejected; vanishing `g` or `h`
    /// (integrable limits) are allowed but logged, since they are useful as
    /// test oracles rather than production settings.
    pub fn new(g: f64, h: f64, j: f64, sites: usize) -> Result<Self> {
        if j == 0.0 {
            return Err(Error::Config(
                "Ising coupling J must be nonzero".to_string(),
            ));
        }
        if g == 0.0 || h == 0.0 {
            log::warn!(
                "couplings (g, h, J) = ({g}, {h}, {j}) lie on an integrable line; \
                 nonintegrable behavior requires g != 0 and h != 0"
            );
        }
        Ok(Self { g, h, j, sites })
    }

    /// The production choice `g = (√5 + 5)/8, h = (√5 + 1)/4, J = 1`.
    pub fn main(sites: usize) -> Self {
        Self {
            g: (5.0f64.sqrt() + 5.0) / 8.0,
            h: (5.0f64.sqrt() + 1.0) / 4.0,
            j: 1.0,
            sites,
        }
    }

    /// Resolve a named preset: `"main"`, `"supp-a"` = (0.6, 1.0, 1.0),
    /// `"supp-b"` = (−1.45, π/2, 1.0).
    pub fn preset(name: &str, sites: usize) -> Result<Self> {
        match name {
            "main" => Ok(Self::main(sites)),
            "supp-a" => Self::new(0.6, 1.0, 1.0, sites),
            "supp-b" => Self::new(-1.45, std::f64::consts::FRAC_PI_2, 1.0, sites),
            other => Err(Error::Config(format!(
                "unknown preset {other:?}; expected one of {PRESET_NAMES:?}"
            ))),
        }
    }

    /// Longitudinal field on the end sites, `h − J`.
    pub fn end_field(&self) -> f64 {
        self.h - self.j
    }
}

/// Dense real symmetric matrix; symmetry is checked at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    entries: DMatrix<f64>,
}

/// Relative symmetry tolerance enforced by [`SymmetricMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

impl SymmetricMatrix {
    /// Wrap a matrix, verifying squareness and symmetry to `1e-12` relative
    /// to the largest entry.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Domain(format!(
                "matrix is {}x{}, not square",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let scale = entries.amax().max(1.0);
        for i in 0..entries.nrows() {
            for j in 0..i {
                let defect = (entries[(i, j)] - entries[(j, i)]).abs();
                if defect > SYMMETRY_TOL * scale {
                    return Err(Error::Domain(format!(
                        "asymmetric entry at ({i}, {j}): defect {defect:.3e} exceeds {:.1e}",
                        SYMMETRY_TOL * scale
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    /// The underlying dense matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Consume into the underlying matrix.
    pub fn into_inner(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

/// Position of one local term: a site (integer r in 1..=L) or a bond
/// (half-integer r in 3/2..=L−1/2). Stored as the doubled integer `2r` so
/// positions stay exact and hashable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermIndex {
    doubled: usize,
}

impl TermIndex {
    /// Term attached to `site` (1-based).
    pub fn site(site: usize) -> Self {
        Self { doubled: 2 * site }
    }

    /// Term on the bond between `left_site` and `left_site + 1`.
    pub fn bond(left_site: usize) -> Self {
        Self {
            doubled: 2 * left_site + 1,
        }
    }

    /// The doubled position `2r`.
    pub fn doubled(&self) -> usize {
        self.doubled
    }

    /// The position `r` as a float (integer for sites, half-integer for bonds).
    pub fn position(&self) -> f64 {
        self.doubled as f64 / 2.0
    }

    pub fn is_site(&self) -> bool {
        self.doubled % 2 == 0
    }

    pub fn is_bond(&self) -> bool {
        !self.is_site()
    }

    /// Distance from the chain center, `|r − (L+1)/2|`.
    pub fn distance_from_center(&self, sites: usize) -> f64 {
        let twice = self.doubled as i64 - (sites as i64 + 1);
        twice.abs() as f64 / 2.0
    }

    /// The central bond `r = (L+1)/2`.
    pub fn central_bond(sites: usize) -> Self {
        Self { doubled: sites + 1 }
    }

    /// The mirror image `L + 1 − r` under chain reflection.
    pub fn reflected(&self, sites: usize) -> Self {
        Self {
            doubled: 2 * (sites + 1) - self.doubled,
        }
    }

    /// All sites and bonds of an `L`-site chain, ordered by position.
    pub fn all(sites: usize) -> Vec<TermIndex> {
        (2..=2 * sites).map(|doubled| Self { doubled }).collect()
    }

    fn validate(&self, sites: usize) -> Result<()> {
        let ok = if self.is_site() {
            (2..=2 * sites).contains(&self.doubled)
        } else {
            (3..=2 * sites - 1).contains(&self.doubled)
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "term position r = {} outside chain of length {sites}",
                self.position()
            )))
        }
    }
}

impl std::fmt::Display for TermIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_site() {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

fn check_lengths(p: &CouplingParams, basis: &SpinBasis) -> Result<()> {
    if p.sites != basis.sites() {
        return Err(Error::Domain(format!(
            "coupling parameters are for L = {} but basis has L = {}",
            p.sites,
            basis.sites()
        )));
    }
    Ok(())
}

/// A chain operator in the compact form `diag(v) + Σ_i c_i σ^x_i`.
///
/// Every operator this crate builds (H, the local terms H_r, the weighted
/// spread operator W, the central-bond perturbation) has this shape. Matrix
/// elements are computed on demand, so parity blocks of large chains can be
/// assembled directly, without the `2^L × 2^L` dense intermediate.
#[derive(Clone, Debug)]
pub struct ChainOperator {
    sites: usize,
    diagonal: Vec<f64>,
    /// Bit-flip amplitude per site, indexed by `site − 1`.
    flip_amplitudes: Vec<f64>,
}

impl ChainOperator {
    fn zeros(basis: &SpinBasis) -> Self {
        Self {
            sites: basis.sites(),
            diagonal: vec![0.0; basis.dimension()],
            flip_amplitudes: vec![0.0; basis.sites()],
        }
    }

    /// The full Hamiltonian.
    pub fn hamiltonian(p: &CouplingParams, basis: &SpinBasis) -> Result<Self> {
        check_lengths(p, basis)?;
        let l = basis.sites();
        let mut op = Self::zeros(basis);
        for n in 0..basis.dimension() {
            let mut diag = 0.0;
            for site in 1..=l {
                let z = basis.z_value(n, site);
                let field = if site == 1 || site == l {
                    p.end_field()
                } else {
                    p.h
                };
                diag += field * z;
                if site < l {
                    diag += p.j * z * basis.z_value(n, site + 1);
                }
            }
            op.diagonal[n] = diag;
        }
        op.flip_amplitudes.fill(p.g);
        Ok(op)
    }

    /// One local term of the decomposition `H = Σ_r H_r`.
    pub fn local_term(r: TermIndex, p: &CouplingParams, basis: &SpinBasis) -> Result<Self> {
        check_lengths(p, basis)?;
        let l = basis.sites();
        r.validate(l)?;
        let mut op = Self::zeros(basis);
        if r.is_site() {
            let site = r.doubled() / 2;
            let field = if site == 1 || site == l {
                p.end_field()
            } else {
                p.h
            };
            for n in 0..basis.dimension() {
                op.diagonal[n] = field * basis.z_value(n, site);
            }
            op.flip_amplitudes[site - 1] = p.g;
        } else {
            let left = (r.doubled() - 1) / 2;
            for n in 0..basis.dimension() {
                op.diagonal[n] = p.j * basis.z_value(n, left) * basis.z_value(n, left + 1);
            }
        }
        Ok(op)
    }

    /// The distance-weighted energy operator `W = Σ_r |r − (L+1)/2| H_r`.
    pub fn weighted_spread(p: &CouplingParams, basis: &SpinBasis) -> Result<Self> {
        check_lengths(p, basis)?;
        let l = basis.sites();
        let mut op = Self::zeros(basis);
        for r in TermIndex::all(l) {
            let w = r.distance_from_center(l);
            if w == 0.0 {
                continue;
            }
            let term = Self::local_term(r, p, basis)?;
            for (acc, v) in op.diagonal.iter_mut().zip(&term.diagonal) {
                *acc += w * v;
            }
            for (acc, v) in op.flip_amplitudes.iter_mut().zip(&term.flip_amplitudes) {
                *acc += w * v;
            }
        }
        Ok(op)
    }

    /// The central-bond operator `σ^z_{L/2} σ^z_{L/2+1}` (unit coupling).
    pub fn central_bond(basis: &SpinBasis) -> Self {
        let half = basis.sites() / 2;
        let mut op = Self::zeros(basis);
        for n in 0..basis.dimension() {
            op.diagonal[n] = basis.z_value(n, half) * basis.z_value(n, half + 1);
        }
        op
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    /// Matrix element between computational basis states.
    #[inline]
    pub fn element(&self, n: usize, m: usize) -> f64 {
        if n == m {
            return self.diagonal[n];
        }
        let x = n ^ m;
        if x & (x - 1) == 0 {
            self.flip_amplitudes[x.trailing_zeros() as usize]
        } else {
            0.0
        }
    }

    /// Materialize the dense matrix.
    pub fn to_dense(&self) -> SymmetricMatrix {
        let d = self.dimension();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for n in 0..d {
            m[(n, n)] = self.diagonal[n];
            for (bit, &amp) in self.flip_amplitudes.iter().enumerate() {
                if amp != 0.0 {
                    m[(n, n ^ (1 << bit))] += amp;
                }
            }
        }
        SymmetricMatrix::new(m).expect("construction is symmetric")
    }

    /// The average `(self + other)/2`, used to symmetrize mirrored local
    /// terms before parity projection.
    pub fn averaged_with(&self, other: &ChainOperator) -> Result<ChainOperator> {
        if self.sites != other.sites {
            return Err(Error::Domain(format!(
                "cannot average operators for L = {} and L = {}",
                self.sites, other.sites
            )));
        }
        let mut out = self.clone();
        for (acc, v) in out.diagonal.iter_mut().zip(&other.diagonal) {
            *acc = 0.5 * (*acc + v);
        }
        for (acc, v) in out.flip_amplitudes.iter_mut().zip(&other.flip_amplitudes) {
            *acc = 0.5 * (*acc + v);
        }
        Ok(out)
    }

    /// Largest defect against reflection symmetry, `max_n |v_n − v_ñ|`
    /// together with the flip-amplitude mismatch across mirrored sites.
    pub fn reflection_defect(&self, basis: &SpinBasis) -> Result<f64> {
        if basis.sites() != self.sites {
            return Err(Error::Domain(format!(
                "operator is for L = {} but basis has L = {}",
                self.sites,
                basis.sites()
            )));
        }
        let mut defect: f64 = 0.0;
        for n in 0..self.dimension() {
            let m = basis.reflect(n)?;
            defect = defect.max((self.diagonal[n] - self.diagonal[m]).abs());
        }
        for site in 1..=self.sites {
            defect = defect.max(
                (self.flip_amplitudes[site - 1] - self.flip_amplitudes[self.sites - site]).abs(),
            );
        }
        Ok(defect)
    }

    /// Project onto one parity sector in the orthonormal symmetrized basis,
    /// assembling the block directly from on-demand matrix elements.
    ///
    /// Only meaningful when the operator commutes with reflection; check
    /// with [`ChainOperator::reflection_defect`] when in doubt.
    pub fn sector_block(&self, sectors: &ParitySectors, parity: Parity) -> Result<SymmetricMatrix> {
        if sectors.total_dim() != self.dimension() {
            return Err(Error::Domain(format!(
                "operator dimension {} does not match sector total {}",
                self.dimension(),
                sectors.total_dim()
            )));
        }
        let states = sectors.states(parity);
        let sign = parity.sign();
        let dim = states.len();
        let mut block = DMatrix::<f64>::zeros(dim, dim);
        for (col, sc) in states.iter().enumerate() {
            for (row, sr) in states.iter().enumerate() {
                let mut v = self.element(sr.representative, sc.representative);
                match (sr.partner, sc.partner) {
                    (None, None) => {}
                    (Some(rp), None) => v += sign * self.element(rp, sc.representative),
                    (None, Some(cp)) => v += sign * self.element(sr.representative, cp),
                    (Some(rp), Some(cp)) => {
                        v += sign * self.element(rp, sc.representative)
                            + sign * self.element(sr.representative, cp)
                            + self.element(rp, cp);
                    }
                }
                block[(row, col)] = v * sr.coefficient() * sc.coefficient();
            }
        }
        SymmetricMatrix::new(block)
    }
}

/// Assemble the full Hamiltonian as a dense `2^L × 2^L` symmetric matrix.
pub fn build_hamiltonian(p: &CouplingParams, basis: &SpinBasis) -> Result<SymmetricMatrix> {
    Ok(ChainOperator::hamiltonian(p, basis)?.to_dense())
}

/// Assemble one local term of the decomposition `H = Σ_r H_r`:
/// `g σ^x_r + h σ^z_r` on bulk sites, `g σ^x_r + (h−J) σ^z_r` on the end
/// sites, and `J σ^z σ^z` on bonds.
pub fn build_local_term(
    r: TermIndex,
    p: &CouplingParams,
    basis: &SpinBasis,
) -> Result<SymmetricMatrix> {
    Ok(ChainOperator::local_term(r, p, basis)?.to_dense())
}

/// The central-bond operator `σ^z_{L/2} σ^z_{L/2+1}` (unit coupling). This is
/// the perturbation whose spreading the energy-transport observables track.
pub fn central_bond_operator(basis: &SpinBasis) -> SymmetricMatrix {
    ChainOperator::central_bond(basis).to_dense()
}

/// The distance-weighted energy operator `W = Σ_r |r − (L+1)/2| H_r`, so the
/// spread distance is `R(t) = 2 ⟨W⟩(t)/ε`. Reflection-symmetric because the
/// weights are.
pub fn build_weighted_spread_operator(
    p: &CouplingParams,
    basis: &SpinBasis,
) -> Result<SymmetricMatrix> {
    Ok(ChainOperator::weighted_spread(p, basis)?.to_dense())
}

/// Largest entrywise defect of `M` against conjugation by the reflection
/// permutation, `max |M[n,m] − M[ñ,m̃]|`.
pub fn reflection_commutator_defect(m: &SymmetricMatrix, basis: &SpinBasis) -> Result<f64> {
    if m.dimension() != basis.dimension() {
        return Err(Error::Domain(format!(
            "matrix dimension {} does not match basis dimension {}",
            m.dimension(),
            basis.dimension()
        )));
    }
    let d = basis.dimension();
    let reflected: Vec<usize> = (0..d)
        .map(|n| basis.reflect(n).expect("in range"))
        .collect();
    let mat = m.matrix();
    let mut defect: f64 = 0.0;
    for n in 0..d {
        for mm in 0..d {
            defect = defect.max((mat[(n, mm)] - mat[(reflected[n], reflected[mm])]).abs());
        }
    }
    Ok(defect)
}

/// Project a reflection-symmetric operator onto one parity sector, in the
/// orthonormal symmetrized basis. The commutation precondition is not
/// verified here; see [`project_to_sector_checked`].
pub fn project_to_sector(
    m: &SymmetricMatrix,
    sectors: &ParitySectors,
    parity: Parity,
) -> Result<SymmetricMatrix> {
    if m.dimension() != sectors.total_dim() {
        return Err(Error::Domain(format!(
            "matrix dimension {} does not match sector total {}",
            m.dimension(),
            sectors.total_dim()
        )));
    }
    let states = sectors.states(parity);
    let sign = parity.sign();
    let mat = m.matrix();
    let dim = states.len();
    let mut block = DMatrix::<f64>::zeros(dim, dim);
    for (col, sc) in states.iter().enumerate() {
        for (row, sr) in states.iter().enumerate() {
            let mut v = mat[(sr.representative, sc.representative)];
            match (sr.partner, sc.partner) {
                (None, None) => {}
                (Some(rp), None) => v += sign * mat[(rp, sc.representative)],
                (None, Some(cp)) => v += sign * mat[(sr.representative, cp)],
                (Some(rp), Some(cp)) => {
                    v += sign * mat[(rp, sc.representative)]
                        + sign * mat[(sr.representative, cp)]
                        + mat[(rp, cp)];
                }
            }
            block[(row, col)] = v * sr.coefficient() * sc.coefficient();
        }
    }
    SymmetricMatrix::new(block)
}

/// Tolerance for the reflection-commutation check in
/// [`project_to_sector_checked`].
pub const REFLECTION_TOL: f64 = 1e-10;

/// As [`project_to_sector`], but first verifies that `M` commutes with the
/// reflection to `1e-10`; a violation is an error rather than a silently
/// wrong block.
pub fn project_to_sector_checked(
    m: &SymmetricMatrix,
    sectors: &ParitySectors,
    basis: &SpinBasis,
    parity: Parity,
) -> Result<SymmetricMatrix> {
    let defect = reflection_commutator_defect(m, basis)?;
    if defect > REFLECTION_TOL {
        return Err(Error::Symmetry(format!(
            "operator does not commute with reflection: defect {defect:.3e} > {REFLECTION_TOL:.1e}"
        )));
    }
    project_to_sector(m, sectors, parity)
}
