//! Level-spacing ratio statistics and spectral histograms.
//!
//! The ratio of adjacent gaps, `r_i = (λ_{i+2} − λ_{i+1})/(λ_{i+1} − λ_i)`,
//! needs no spectral unfolding: its `min(r, 1/r)` mean distinguishes
//! level-repelling (GOE-like, ≈ 0.536) from Poissonian (≈ 0.386) spectra.
//! Must be fed a single symmetry sector; mixing sectors destroys the
//! repulsion these statistics detect.

use crate::error::{Error, Result};

/// Gap ratios of one spectrum, with exact degeneracies counted separately.
#[derive(Clone, Debug)]
pub struct GapRatios {
    ratios: Vec<f64>,
    degenerate_gaps: usize,
}

impl GapRatios {
    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// Number of exactly zero gaps encountered (and excluded). More than a
    /// handful signals a symmetry leak in the input spectrum.
    pub fn degenerate_gaps(&self) -> usize {
        self.degenerate_gaps
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }
}

/// Ratios of adjacent level spacings of an ascending spectrum.
///
/// Ratios whose denominator gap is exactly zero are excluded and counted in
/// [`GapRatios::degenerate_gaps`].
pub fn gap_ratios(eigenvalues: &[f64]) -> Result<GapRatios> {
    if eigenvalues.len() < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 eigenvalues for ratios, got {}",
            eigenvalues.len()
        )));
    }
    if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain(
            "eigenvalues must be sorted in ascending order".into(),
        ));
    }
    let mut ratios = Vec::with_capacity(eigenvalues.len() - 2);
    let mut degenerate = 0usize;
    for w in eigenvalues.windows(3) {
        let lower = w[1] - w[0];
        let upper = w[2] - w[1];
        if lower == 0.0 {
            degenerate += 1;
        } else {
            ratios.push(upper / lower);
        }
    }
    Ok(GapRatios {
        ratios,
        degenerate_gaps: degenerate,
    })
}

/// Mean of `r̃ = min(r, 1/r) ∈ [0, 1]`.
pub fn r_tilde_mean(ratios: &GapRatios) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::Domain("no ratios to average".into()));
    }
    let sum: f64 = ratios.ratios.iter().map(|&r| r.min(1.0 / r)).sum();
    Ok(sum / ratios.len() as f64)
}

/// `⟨r̃⟩` of the GOE Wigner-like surmise: `4 − 2√3 ≈ 0.536`.
pub const GOE_MEAN_R_TILDE: f64 = 0.5358983848622456;

/// `⟨r̃⟩` of the Poisson reference: `2 ln 2 − 1 ≈ 0.386`.
pub const POISSON_MEAN_R_TILDE: f64 = 0.3862943611198906;

/// Reference ratio distributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceEnsemble {
    /// Level-repelling Wigner-like surmise for the Gaussian orthogonal
    /// ensemble: `P(r) = (27/8)(r + r²)/(1 + r + r²)^{5/2}`.
    Goe,
    /// Uncorrelated levels: `P(r) = 1/(1 + r)²`.
    Poisson,
}

/// Reference probability density at ratio `r ≥ 0`.
pub fn surmise_pdf(r: f64, ensemble: ReferenceEnsemble) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::Domain(format!("ratio {r} is negative")));
    }
    Ok(match ensemble {
        ReferenceEnsemble::Goe => 27.0 / 8.0 * (r + r * r) / (1.0 + r + r * r).powf(2.5),
        ReferenceEnsemble::Poisson => 1.0 / ((1.0 + r) * (1.0 + r)),
    })
}

/// One histogram bin, `[left, right)` (the last bin is closed).
#[derive(Clone, Copy, Debug)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub value: f64,
}

/// Equal-width histogram; `value` is either a count or a probability density
/// depending on the constructor.
#[derive(Clone, Debug)]
pub struct Histogram {
    bins: Vec<HistogramBin>,
}

impl Histogram {
    fn build(values: &[f64], bins: usize, normalize: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("cannot histogram an empty sample".into()));
        }
        if bins == 0 {
            return Err(Error::Domain("need at least one bin".into()));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        if span == 0.0 {
            // degenerate sample: everything lands in the first bin
            let mut out = vec![HistogramBin {
                left: min,
                right: min,
                value: 0.0,
            }; bins];
            out[0].value = values.len() as f64;
            return Ok(Self { bins: out });
        }
        let width = span / bins as f64;
        let mut counts = vec![0usize; bins];
        for &v in values {
            let k = (((v - min) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        let scale = if normalize {
            1.0 / (values.len() as f64 * width)
        } else {
            1.0
        };
        let bins = counts
            .into_iter()
            .enumerate()
            .map(|(k, c)| HistogramBin {
                left: min + k as f64 * width,
                right: min + (k + 1) as f64 * width,
                value: c as f64 * scale,
            })
            .collect();
        Ok(Self { bins })
    }

    pub fn bins(&self) -> &[HistogramBin] {
        &self.bins
    }

    /// `Σ value · width`; 1 for a density, the sample size times the width
    /// for counts.
    pub fn integral(&self) -> f64 {
        self.bins
            .iter()
            .map(|b| b.value * (b.right - b.left))
            .sum()
    }

    /// Sum of bin values (the sample size for a count histogram).
    pub fn total(&self) -> f64 {
        self.bins.iter().map(|b| b.value).sum()
    }

    /// Number of empty bins strictly between the first and last occupied
    /// bins; a band-structure heuristic for eigenvalue histograms.
    pub fn empty_interior_bins(&self) -> usize {
        let occupied: Vec<usize> = self
            .bins
            .iter()
            .enumerate()
            .filter(|(_, b)| b.value != 0.0)
            .map(|(k, _)| k)
            .collect();
        match (occupied.first(), occupied.last()) {
            (Some(&first), Some(&last)) if last > first => self.bins[first..=last]
                .iter()
                .filter(|b| b.value == 0.0)
                .count(),
            _ => 0,
        }
    }
}

/// Probability-density histogram of the lowest `keep_lowest` ratios, with
/// `bins` equal-width bins spanning the kept range.
pub fn ratio_histogram(rs: &GapRatios, bins: usize, keep_lowest: usize) -> Result<Histogram> {
    if keep_lowest > rs.len() {
        return Err(Error::Domain(format!(
            "cannot keep {keep_lowest} of {} ratios",
            rs.len()
        )));
    }
    if keep_lowest == 0 {
        return Err(Error::Domain("must keep at least one ratio".into()));
    }
    let mut sorted = rs.ratios().to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.truncate(keep_lowest);
    Histogram::build(&sorted, bins, true)
}

/// The truncation used with [`ratio_histogram`]: the same keep fraction as
/// 32000 of 32894 ratios, rounded, so smaller spectra discard the same share
/// of far-tail ratios.
pub fn default_keep_count(n_ratios: usize) -> usize {
    ((n_ratios as f64) * (32000.0 / 32894.0)).round() as usize
}

/// Count histogram of a spectrum over `[min, max]`.
pub fn eigenvalue_histogram(eigenvalues: &[f64], bins: usize) -> Result<Histogram> {
    Histogram::build(eigenvalues, bins, false)
}
