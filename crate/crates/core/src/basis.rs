//! Computational basis of an open spin-1/2 chain and its reflection-parity
//! sectors.
//!
//! Basis index `n` encodes the z-configuration bitwise: bit `b` of `n` is the
//! σ^z eigenvalue of site `b + 1` (bit set ⇔ spin up ⇔ eigenvalue +1). The
//! chain inversion `site i ↔ site L + 1 − i` acts on indices by reversing the
//! low `L` bits, and splits the Hilbert space into even and odd sectors of
//! dimension `(2^L ± 2^{L/2}) / 2`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default upper cap on the chain length; `2^16` amplitudes is the largest
/// full-space vector the workflows here are designed for.
pub const MAX_SITES: usize = 16;

/// The computational z-basis of an `L`-site chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinBasis {
    sites: usize,
    dimension: usize,
}

impl SpinBasis {
    /// Build the basis for an even chain length `2 ≤ L ≤ MAX_SITES`.
    pub fn new(sites: usize) -> Result<Self> {
        Self::with_cap(sites, MAX_SITES)
    }

    /// Build the basis with a custom upper cap (memory guard).
    pub fn with_cap(sites: usize, cap: usize) -> Result<Self> {
        if sites % 2 != 0 {
            return Err(Error::Config(format!(
                "chain length must be even so the central bond is defined, got L = {sites}"
            )));
        }
        if sites < 2 || sites > cap {
            return Err(Error::Config(format!(
                "chain length must satisfy 2 <= L <= {cap}, got L = {sites}"
            )));
        }
        Ok(Self {
            sites,
            dimension: 1usize << sites,
        })
    }

    /// Number of sites `L`.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Hilbert-space dimension `2^L`.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Whether `site` (1-based) points up in basis state `index`.
    #[inline]
    pub fn spin_up(&self, index: usize, site: usize) -> bool {
        debug_assert!((1..=self.sites).contains(&site));
        index >> (site - 1) & 1 == 1
    }

    /// σ^z eigenvalue (±1) of `site` in basis state `index`.
    #[inline]
    pub fn z_value(&self, index: usize, site: usize) -> f64 {
        if self.spin_up(index, site) {
            1.0
        } else {
            -1.0
        }
    }

    /// Basis index with the spin at `site` flipped.
    #[inline]
    pub fn flip(&self, index: usize, site: usize) -> usize {
        index ^ (1 << (site - 1))
    }

    /// Index of the state obtained by inverting the chain about its center:
    /// bit `b` of the result equals bit `L − 1 − b` of `index`. An involution.
    pub fn reflect(&self, index: usize) -> Result<usize> {
        if index >= self.dimension {
            return Err(Error::Domain(format!(
                "basis index {index} out of range for dimension {}",
                self.dimension
            )));
        }
        let mut out = 0usize;
        for bit in 0..self.sites {
            if index >> bit & 1 == 1 {
                out |= 1 << (self.sites - 1 - bit);
            }
        }
        Ok(out)
    }
}

/// Reflection-parity label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Lower-case label used in file names and reports.
    pub fn label(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }

    /// Sign of the reflection eigenvalue: +1 for even, −1 for odd.
    pub fn sign(&self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One reflection orbit, normalized as a sector basis vector.
///
/// `partner == None` marks a palindrome (fixed point of the reflection): the
/// sector vector is `|rep⟩` with coefficient 1, and it exists only in the
/// even sector. Otherwise the vector is `(|rep⟩ ± |partner⟩)/√2` with the
/// sign set by the sector parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitState {
    pub representative: usize,
    pub partner: Option<usize>,
}

impl OrbitState {
    /// Normalization coefficient of the symmetrized vector.
    pub fn coefficient(&self) -> f64 {
        match self.partner {
            Some(_) => std::f64::consts::FRAC_1_SQRT_2,
            None => 1.0,
        }
    }
}

/// Orthonormal bases of the even and odd reflection sectors.
#[derive(Clone, Debug)]
pub struct ParitySectors {
    sites: usize,
    even: Vec<OrbitState>,
    odd: Vec<OrbitState>,
}

impl ParitySectors {
    /// Decompose the full space into reflection orbits.
    ///
    /// Every basis index appears in exactly one orbit; palindromes go to the
    /// even sector only, two-element orbits contribute one vector to each.
    pub fn build(basis: &SpinBasis) -> Self {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for n in 0..basis.dimension() {
            let m = basis.reflect(n).expect("index in range by construction");
            match m.cmp(&n) {
                std::cmp::Ordering::Equal => even.push(OrbitState {
                    representative: n,
                    partner: None,
                }),
                std::cmp::Ordering::Greater => {
                    even.push(OrbitState {
                        representative: n,
                        partner: Some(m),
                    });
                    odd.push(OrbitState {
                        representative: n,
                        partner: Some(m),
                    });
                }
                // m < n: orbit already recorded from its representative
                std::cmp::Ordering::Less => {}
            }
        }
        Self {
            sites: basis.sites(),
            even,
            odd,
        }
    }

    /// Chain length the sectors were built for.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Sector basis states.
    pub fn states(&self, parity: Parity) -> &[OrbitState] {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    /// Sector dimension.
    pub fn dim(&self, parity: Parity) -> usize {
        self.states(parity).len()
    }

    /// `(2^L + 2^{L/2}) / 2`.
    pub fn even_dim(&self) -> usize {
        self.even.len()
    }

    /// `(2^L − 2^{L/2}) / 2`.
    pub fn odd_dim(&self) -> usize {
        self.odd.len()
    }

    /// Full-space dimension `even_dim + odd_dim`.
    pub fn total_dim(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    /// Components of a full-space vector in the orthonormal sector basis.
    pub fn project_state(&self, amplitudes: &[Complex64], parity: Parity) -> Result<Vec<Complex64>> {
        if amplitudes.len() != self.total_dim() {
            return Err(Error::Domain(format!(
                "state length {} does not match full dimension {}",
                amplitudes.len(),
                self.total_dim()
            )));
        }
        let sign = parity.sign();
        Ok(self
            .states(parity)
            .iter()
            .map(|s| match s.partner {
                Some(m) => (amplitudes[s.representative] + sign * amplitudes[m]) * s.coefficient(),
                None => amplitudes[s.representative],
            })
            .collect())
    }

    /// Reassemble a full-space vector from its even and odd sector components.
    pub fn embed_state(&self, even: &[Complex64], odd: &[Complex64]) -> Result<Vec<Complex64>> {
        if even.len() != self.even_dim() || odd.len() != self.odd_dim() {
            return Err(Error::Domain(format!(
                "sector component lengths ({}, {}) do not match sector dimensions ({}, {})",
                even.len(),
                odd.len(),
                self.even_dim(),
                self.odd_dim()
            )));
        }
        let mut full = vec![Complex64::new(0.0, 0.0); self.total_dim()];
        for (s, &c) in self.even.iter().zip(even) {
            let w = c * s.coefficient();
            full[s.representative] += w;
            if let Some(m) = s.partner {
                full[m] += w;
            }
        }
        for (s, &c) in self.odd.iter().zip(odd) {
            let w = c * s.coefficient();
            full[s.representative] += w;
            if let Some(m) = s.partner {
                // odd vectors are (|rep⟩ − |partner⟩)/√2
                full[m] -= w;
            }
        }
        Ok(full)
    }
}
