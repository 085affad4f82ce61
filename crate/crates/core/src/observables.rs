//! Measurements over states and traces: entanglement entropy, its random-state
//! saturation value, the energy-spread distance, ensemble statistics, scaling
//! collapse, and growth-law fits.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{
    self, ensemble_rng, heisenberg_trace, heisenberg_trace_blocked, sample_product_state,
    PureState, SamplingMode,
};
use crate::eigensolver::{BlockedDecomposition, BlockedOperator, EigenbasisOperator,
    SpectralDecomposition};
use crate::error::{Error, Result};
use crate::exec;

/// Singular values below this threshold carry no weight in the entropy.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;

/// Von Neumann entanglement entropy, in bits, of the first `cut` sites.
///
/// The amplitude vector reshapes into a `2^cut × 2^{L−cut}` coefficient
/// matrix whose squared singular values are the Schmidt weights:
/// `S = −Σ_k s_k² log₂ s_k²` with `0·log 0 := 0`.
pub fn entanglement_entropy(psi: &PureState, cut: usize) -> Result<f64> {
    let sites = psi.sites();
    if cut == 0 || cut >= sites {
        return Err(Error::Domain(format!(
            "cut must satisfy 1 <= cut <= {}, got {cut}",
            sites - 1
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!(
            "state norm {norm} deviates from 1 by more than 1e-8"
        )));
    }
    let rows = 1usize << cut;
    let cols = 1usize << (sites - cut);
    // column-major layout matches the bit convention: row index = low bits
    let coeffs = DMatrix::<Complex64>::from_column_slice(rows, cols, psi.amplitudes().as_slice());
    let singular = coeffs.singular_values();
    let mut entropy = 0.0;
    for s in singular.iter() {
        if *s > SCHMIDT_CUTOFF {
            let p = s * s;
            entropy -= p * p.log2();
        }
    }
    Ok(entropy.max(0.0))
}

/// Mean entanglement entropy of a Haar-random pure state across a
/// `cut | L − cut` bipartition, in bits: `log₂ m − m/(2 n ln 2)` with
/// `m ≤ n` the subsystem dimensions (higher-order terms dropped). Clamped at
/// zero, which also covers the degenerate cuts `0` and `L`.
pub fn page_value(sites: usize, cut: usize) -> f64 {
    let small = cut.min(sites - cut);
    let large = cut.max(sites - cut);
    let m = (1usize << small) as f64;
    let n = (1usize << large) as f64;
    (m.log2() - m / (2.0 * n * std::f64::consts::LN_2)).max(0.0)
}

/// Energy-spread distance `R(t) = 2 · tr(W e^{−iHt} A e^{iHt})/D` from
/// rotated spread and perturbation operators (unit-coupling convention
/// `J = 1`; divide by `J` otherwise).
pub fn energy_spread_r(
    d: &SpectralDecomposition,
    w_hat: &EigenbasisOperator,
    a_hat: &EigenbasisOperator,
    t: f64,
) -> Result<f64> {
    Ok(2.0 * heisenberg_trace(d, a_hat, w_hat, t)?)
}

/// Parity-blocked [`energy_spread_r`].
pub fn energy_spread_r_blocked(
    d: &BlockedDecomposition,
    w_hat: &BlockedOperator,
    a_hat: &BlockedOperator,
    t: f64,
) -> Result<f64> {
    Ok(2.0 * heisenberg_trace_blocked(d, a_hat, w_hat, t)?)
}

/// The equal-distribution long-time value `R(∞) = (L/2)·(2L−2)/(2L−1)`
/// reached if the perturbation energy spreads uniformly over all sites and
/// bonds.
pub fn spread_saturation_formula(sites: usize) -> f64 {
    let l = sites as f64;
    (l / 2.0) * (2.0 * l - 2.0) / (2.0 * l - 1.0)
}

/// Ensemble-averaged observable on a time grid.
#[derive(Clone, Debug)]
pub struct EnsembleSeries {
    times: Vec<f64>,
    mean: Vec<f64>,
    stderr: Vec<f64>,
    count: usize,
}

impl EnsembleSeries {
    /// Aggregate per-member series. The standard error at each time is the
    /// sample standard deviation over members divided by `√count`; member
    /// draws are independent, so errors at a fixed time are uncorrelated.
    pub fn from_members(times: Vec<f64>, members: &[Vec<f64>]) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Domain("ensemble must have at least one member".into()));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("time grid must be strictly ascending".into()));
        }
        if members.iter().any(|m| m.len() != times.len()) {
            return Err(Error::Domain(
                "member series length does not match the time grid".into(),
            ));
        }
        let count = members.len();
        let mut mean = vec![0.0; times.len()];
        let mut stderr = vec![0.0; times.len()];
        for (k, m) in mean.iter_mut().enumerate() {
            *m = members.iter().map(|s| s[k]).sum::<f64>() / count as f64;
        }
        if count > 1 {
            for (k, e) in stderr.iter_mut().enumerate() {
                let var = members
                    .iter()
                    .map(|s| (s[k] - mean[k]).powi(2))
                    .sum::<f64>()
                    / (count - 1) as f64;
                *e = (var / count as f64).sqrt();
            }
        }
        Ok(Self {
            times,
            mean,
            stderr,
            count,
        })
    }

    /// A single deterministic curve (count 1, zero standard error).
    pub fn deterministic(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_members(times, std::slice::from_ref(&values))
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn stderr(&self) -> &[f64] {
        &self.stderr
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Fit the mean curve over a window.
    pub fn fit(&self, window: (f64, f64), kind: FitKind) -> Result<FitResult> {
        fit_growth(&self.times, &self.mean, window, kind)
    }
}

/// Mean central-observable series over an ensemble of random product states,
/// evolved through the parity blocks. Member `i` draws from the stream
/// `(base_seed, L, i)`; members evaluate in parallel and aggregate in a fixed
/// order, so the result is independent of the worker count.
pub fn ensemble_entropy_series(
    d: &BlockedDecomposition,
    times: &[f64],
    ensemble: usize,
    base_seed: u64,
    mode: SamplingMode,
    cut: usize,
) -> Result<EnsembleSeries> {
    if ensemble == 0 {
        return Err(Error::Domain("ensemble must have at least one member".into()));
    }
    let sites = d.sectors().sites();
    let members = exec::indexed_map(ensemble, |member| -> Result<Vec<f64>> {
        let mut rng = ensemble_rng(base_seed, sites, member);
        let (_, psi0) = sample_product_state(&mut rng, sites, mode);
        let coeffs = dynamics::to_eigenbasis_blocked(d, &psi0)?;
        times
            .iter()
            .map(|&t| {
                let psi = dynamics::state_at_blocked(d, &coeffs, t)?;
                entanglement_entropy(&psi, cut)
            })
            .collect()
    });
    let members = members.into_iter().collect::<Result<Vec<_>>>()?;
    EnsembleSeries::from_members(times.to_vec(), &members)
}

/// Deterministic `R(t)` series over a time grid (parallel over times),
/// normalized by the coupling `j` so the conserved energy is one.
pub fn energy_spread_series(
    d: &BlockedDecomposition,
    w_hat: &BlockedOperator,
    a_hat: &BlockedOperator,
    times: &[f64],
    j: f64,
) -> Result<Vec<f64>> {
    let values = exec::indexed_map(times.len(), |k| {
        energy_spread_r_blocked(d, w_hat, a_hat, times[k]).map(|r| r / j)
    });
    values.into_iter().collect()
}

/// Window-averaged long-time estimate.
#[derive(Clone, Copy, Debug)]
pub struct SaturationEstimate {
    pub value: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Average `eval` at `samples` times uniformly spaced across `window`.
pub fn saturation_estimate(
    mut eval: impl FnMut(f64) -> Result<f64>,
    window: (f64, f64),
    samples: usize,
) -> Result<SaturationEstimate> {
    if !(window.0 < window.1) || samples == 0 {
        return Err(Error::Domain(format!(
            "saturation window [{}, {}] with {samples} samples is empty",
            window.0, window.1
        )));
    }
    let times = sample_times(window, samples);
    let mut total = 0.0;
    for t in &times {
        total += eval(*t)?;
    }
    Ok(SaturationEstimate {
        value: total / times.len() as f64,
        window,
        samples,
    })
}

/// The sampling grid used by [`saturation_estimate`].
pub fn sample_times(window: (f64, f64), samples: usize) -> Vec<f64> {
    if samples == 1 {
        return vec![0.5 * (window.0 + window.1)];
    }
    (0..samples)
        .map(|i| window.0 + (window.1 - window.0) * i as f64 / (samples - 1) as f64)
        .collect()
}

/// Average the in-window points of an existing series.
pub fn saturation_from_series(
    series: &EnsembleSeries,
    window: (f64, f64),
) -> Result<SaturationEstimate> {
    let points: Vec<f64> = series
        .times()
        .iter()
        .zip(series.mean())
        .filter(|(t, _)| (window.0..=window.1).contains(*t))
        .map(|(_, v)| *v)
        .collect();
    if points.is_empty() {
        return Err(Error::Domain(format!(
            "no series points inside window [{}, {}]",
            window.0, window.1
        )));
    }
    Ok(SaturationEstimate {
        value: points.iter().sum::<f64>() / points.len() as f64,
        window,
        samples: points.len(),
    })
}

/// What a growth fit assumes about the data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitKind {
    /// `y = v·t`, least squares through the origin.
    Linear,
    /// `y = a·t^b`, least squares in log-log coordinates.
    PowerLaw,
}

/// Result of a growth fit.
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    pub kind: FitKind,
    /// Slope `v` for linear fits, prefactor `a` for power laws.
    pub coefficient: f64,
    /// Exponent `b`, power laws only.
    pub exponent: Option<f64>,
    pub window: (f64, f64),
    /// Root-mean-square residual in the fitted coordinates (linear space for
    /// linear fits, log space for power laws).
    pub rms_residual: f64,
}

/// Fit the growth law of a curve over a time window. Requires at least four
/// in-window points.
pub fn fit_growth(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    kind: FitKind,
) -> Result<FitResult> {
    if times.len() != values.len() {
        return Err(Error::Domain(format!(
            "times and values have mismatched lengths {} and {}",
            times.len(),
            values.len()
        )));
    }
    let points: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| (window.0..=window.1).contains(*t))
        .map(|(t, v)| (*t, *v))
        .collect();
    if points.len() < 4 {
        return Err(Error::Domain(format!(
            "fit window [{}, {}] holds {} points; at least 4 required",
            window.0,
            window.1,
            points.len()
        )));
    }
    match kind {
        FitKind::Linear => {
            let num: f64 = points.iter().map(|(t, y)| t * y).sum();
            let den: f64 = points.iter().map(|(t, _)| t * t).sum();
            let v = num / den;
            let rms = (points
                .iter()
                .map(|(t, y)| (y - v * t).powi(2))
                .sum::<f64>()
                / points.len() as f64)
                .sqrt();
            Ok(FitResult {
                kind,
                coefficient: v,
                exponent: None,
                window,
                rms_residual: rms,
            })
        }
        FitKind::PowerLaw => {
            if points.iter().any(|(t, y)| *t <= 0.0 || *y <= 0.0) {
                return Err(Error::Domain(
                    "power-law fit requires positive times and values in the window".into(),
                ));
            }
            let logs: Vec<(f64, f64)> = points.iter().map(|(t, y)| (t.ln(), y.ln())).collect();
            let n = logs.len() as f64;
            let sx: f64 = logs.iter().map(|(x, _)| x).sum();
            let sy: f64 = logs.iter().map(|(_, y)| y).sum();
            let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
            let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            let intercept = (sy - slope * sx) / n;
            let rms = (logs
                .iter()
                .map(|(x, y)| (y - intercept - slope * x).powi(2))
                .sum::<f64>()
                / logs.len() as f64)
                .sqrt();
            Ok(FitResult {
                kind,
                coefficient: intercept.exp(),
                exponent: Some(slope),
                window,
                rms_residual: rms,
            })
        }
    }
}

/// One rescaled entropy curve, `x = t/S_L(∞)`, `y = S(t)/S_L(∞)`.
#[derive(Clone, Debug)]
pub struct CollapseCurve {
    pub sites: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Rescaled curves plus a collapse-quality score.
#[derive(Clone, Debug)]
pub struct CollapseResult {
    pub curves: Vec<CollapseCurve>,
    /// RMS spread of `y` across chain lengths, interpolated on a common `x`
    /// grid over `score_window`.
    pub score: f64,
    pub score_window: (f64, f64),
}

/// The `x` window and grid resolution used for the collapse score.
pub const COLLAPSE_SCORE_WINDOW: (f64, f64) = (0.2, 0.8);
const COLLAPSE_SCORE_POINTS: usize = 25;

/// Rescale entropy curves by their saturation values and score the collapse.
///
/// Takes one `(L, series)` pair per chain length with the matching
/// `S_L(∞)` estimates; every rescaled curve must cover the score window.
pub fn scaling_collapse(
    series: &[(usize, &EnsembleSeries)],
    s_inf: &[f64],
) -> Result<CollapseResult> {
    if series.len() < 2 {
        return Err(Error::Domain(
            "scaling collapse needs at least two chain lengths".into(),
        ));
    }
    if series.len() != s_inf.len() {
        return Err(Error::Domain(format!(
            "{} series but {} saturation values",
            series.len(),
            s_inf.len()
        )));
    }
    let curves: Vec<CollapseCurve> = series
        .iter()
        .zip(s_inf)
        .map(|((sites, s), &sat)| {
            if sat <= 0.0 {
                return Err(Error::Domain(format!(
                    "saturation value {sat} for L = {sites} must be positive"
                )));
            }
            Ok(CollapseCurve {
                sites: *sites,
                x: s.times().iter().map(|t| t / sat).collect(),
                y: s.mean().iter().map(|v| v / sat).collect(),
            })
        })
        .collect::<Result<_>>()?;

    let (lo, hi) = COLLAPSE_SCORE_WINDOW;
    for c in &curves {
        let (first, last) = (c.x[0], c.x[c.x.len() - 1]);
        if first > lo || last < hi {
            return Err(Error::Domain(format!(
                "curve for L = {} spans x in [{first:.3}, {last:.3}], \
                 not covering the score window [{lo}, {hi}]",
                c.sites
            )));
        }
    }
    let grid: Vec<f64> = (0..COLLAPSE_SCORE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (COLLAPSE_SCORE_POINTS - 1) as f64)
        .collect();
    let mut total = 0.0;
    let mut count = 0usize;
    for &x in &grid {
        let ys: Vec<f64> = curves.iter().map(|c| interpolate(&c.x, &c.y, x)).collect();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        total += ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>();
        count += ys.len();
    }
    Ok(CollapseResult {
        curves,
        score: (total / count as f64).sqrt(),
        score_window: COLLAPSE_SCORE_WINDOW,
    })
}

/// Linear interpolation on an ascending grid; clamps at the ends.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => ys[i],
        Err(0) => ys[0],
        Err(i) if i >= xs.len() => ys[ys.len() - 1],
        Err(i) => {
            let f = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            ys[i - 1] + f * (ys[i] - ys[i - 1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::SpinBasis;
    use crate::dynamics::BlochAngles;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn state_from(amps: Vec<Complex64>) -> PureState {
        let v = DVector::from_vec(amps);
        let n = v.norm();
        PureState::new(v / Complex64::new(n, 0.0)).unwrap()
    }

    fn random_state(l: usize, seed: u64) -> PureState {
        let mut rng = ensemble_rng(seed, l, 0);
        let amps: Vec<Complex64> = (0..1usize << l)
            .map(|_| Complex64::new(rand::Rng::gen::<f64>(&mut rng) - 0.5, rand::Rng::gen::<f64>(&mut rng) - 0.5))
            .collect();
        state_from(amps)
    }

    #[test]
    fn bell_pair_has_one_bit() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = state_from(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ]);
        assert_abs_diff_eq!(entanglement_entropy(&psi, 1).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn product_states_have_zero_entropy_at_every_cut() {
        let mut rng = ensemble_rng(3, 6, 1);
        let (_, psi) = sample_product_state(&mut rng, 6, SamplingMode::SphereUniform);
        for cut in 1..6 {
            let s = entanglement_entropy(&psi, cut).unwrap();
            assert!(s.abs() < 1e-10, "cut {cut}: {s}");
        }
    }

    #[test]
    fn maximally_entangled_state_saturates_the_cut() {
        // coefficient matrix = I/√(2^cut) across the central cut of L = 6
        let (l, cut) = (6usize, 3usize);
        let rows = 1usize << cut;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << l];
        for a in 0..rows {
            amps[a + (a << cut)] = Complex64::new(1.0 / (rows as f64).sqrt(), 0.0);
        }
        let psi = PureState::new(DVector::from_vec(amps)).unwrap();
        assert_abs_diff_eq!(
            entanglement_entropy(&psi, cut).unwrap(),
            cut as f64,
            epsilon = 1e-12
        );
    }

    /// Tracing out either side of one bipartition gives the same entropy:
    /// reducing onto the last `L − cut` sites equals reducing onto the first
    /// `cut`, which the chain reflection turns into a testable identity
    /// `S(ψ, cut) = S(Πψ, L − cut)`.
    #[test]
    fn entropy_is_cut_symmetric_and_bounded() {
        let l = 6;
        let psi = random_state(l, 9);
        let basis = SpinBasis::new(l).unwrap();
        let mut mirrored = psi.amplitudes().clone();
        for n in 0..mirrored.len() {
            mirrored[n] = psi.amplitudes()[basis.reflect(n).unwrap()];
        }
        let mirrored = PureState::new(mirrored).unwrap();
        for cut in 1..l {
            let s = entanglement_entropy(&psi, cut).unwrap();
            let other_side = entanglement_entropy(&mirrored, l - cut).unwrap();
            assert_abs_diff_eq!(s, other_side, epsilon = 1e-10);
            assert!(s >= 0.0 && s <= cut.min(l - cut) as f64 + 1e-12);
        }
    }

    #[test]
    fn entropy_invariant_under_one_sided_local_unitary() {
        let l = 4;
        let psi = random_state(l, 31);
        let before = entanglement_entropy(&psi, 2).unwrap();
        // random SU(2) on site 1 (inside side A for cut = 2)
        let (a, b) = (Complex64::new(0.6, 0.3), Complex64::new(-0.2, 0.705));
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / norm, b / norm);
        let mut amps = psi.amplitudes().clone();
        for n in 0..amps.len() {
            if n & 1 == 0 {
                let m = n | 1;
                let (lo, hi) = (amps[n], amps[m]);
                amps[n] = a * lo + b * hi;
                amps[m] = -b.conj() * lo + a.conj() * hi;
            }
        }
        let rotated = PureState::new(amps).unwrap();
        let after = entanglement_entropy(&rotated, 2).unwrap();
        assert_abs_diff_eq!(before, after, epsilon = 1e-10);
    }

    #[test]
    fn entropy_rejects_bad_cuts() {
        let psi = random_state(4, 1);
        assert!(entanglement_entropy(&psi, 0).is_err());
        assert!(entanglement_entropy(&psi, 4).is_err());
    }

    #[test]
    fn page_values() {
        let half = 1.0 / (2.0 * std::f64::consts::LN_2);
        assert_abs_diff_eq!(page_value(8, 4), 4.0 - half, epsilon = 1e-12);
        assert_abs_diff_eq!(page_value(8, 4), 3.2786524795555183, epsilon = 1e-12);
        assert_abs_diff_eq!(page_value(2, 1), 0.2786524795555183, epsilon = 1e-12);
        assert_eq!(page_value(4, 0), 0.0);
        // asymmetric cut: m = 2, n = 8
        assert_abs_diff_eq!(
            page_value(4, 1),
            1.0 - 2.0 / (16.0 * std::f64::consts::LN_2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn spread_formula_value() {
        assert_abs_diff_eq!(spread_saturation_formula(8), 56.0 / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn ensemble_statistics() {
        let times = vec![0.0, 1.0];
        let members = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let s = EnsembleSeries::from_members(times, &members).unwrap();
        assert_eq!(s.mean(), &[2.0, 3.0]);
        // sample std = √2, stderr = √2/√2 = 1
        assert_abs_diff_eq!(s.stderr()[0], 1.0, epsilon = 1e-14);
        assert_eq!(s.count(), 2);

        let single = EnsembleSeries::from_members(vec![0.0], &[vec![5.0]]).unwrap();
        assert_eq!(single.stderr(), &[0.0]);
        assert!(EnsembleSeries::from_members(vec![1.0, 0.5], &[vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn saturation_estimators() {
        let est = saturation_estimate(|_| Ok(2.5), (10.0, 20.0), 21).unwrap();
        assert_abs_diff_eq!(est.value, 2.5, epsilon = 1e-14);
        assert_eq!(est.samples, 21);
        assert!(saturation_estimate(|_| Ok(0.0), (20.0, 10.0), 5).is_err());

        let series =
            EnsembleSeries::deterministic(vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 1.0, 3.0, 5.0])
                .unwrap();
        let from = saturation_from_series(&series, (2.0, 4.0)).unwrap();
        assert_abs_diff_eq!(from.value, 3.0, epsilon = 1e-14);
        assert!(saturation_from_series(&series, (10.0, 20.0)).is_err());
    }

    #[test]
    fn fits_recover_planted_laws() {
        let times: Vec<f64> = (1..=20).map(|i| i as f64 * 0.25).collect();
        let linear: Vec<f64> = times.iter().map(|t| 0.7 * t).collect();
        let fit = fit_growth(&times, &linear, (0.5, 5.0), FitKind::Linear).unwrap();
        assert_abs_diff_eq!(fit.coefficient, 0.7, epsilon = 1e-12);
        assert!(fit.rms_residual < 1e-12);

        let power: Vec<f64> = times.iter().map(|t| 2.0 * t.sqrt()).collect();
        let fit = fit_growth(&times, &power, (0.5, 5.0), FitKind::PowerLaw).unwrap();
        assert_abs_diff_eq!(fit.exponent.unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.coefficient, 2.0, epsilon = 1e-12);
        assert!(fit.rms_residual < 1e-12);

        // diffusion constant backed out of R ≈ (4/√π)√(Dt)
        let d_planted = 0.37;
        let diffusive: Vec<f64> = times
            .iter()
            .map(|t| 4.0 / std::f64::consts::PI.sqrt() * (d_planted * t).sqrt())
            .collect();
        let fit = fit_growth(&times, &diffusive, (0.5, 5.0), FitKind::PowerLaw).unwrap();
        let d = (fit.coefficient * std::f64::consts::PI.sqrt() / 4.0).powi(2);
        assert_abs_diff_eq!(d, d_planted, epsilon = 1e-12);
    }

    #[test]
    fn fit_rejects_sparse_windows() {
        let times = vec![1.0, 2.0, 3.0, 4.0];
        let values = vec![1.0, 2.0, 3.0, 4.0];
        assert!(fit_growth(&times, &values, (3.5, 10.0), FitKind::Linear).is_err());
    }

    #[test]
    fn collapse_of_identical_curves_scores_zero() {
        let times: Vec<f64> = (1..=60).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = times.iter().map(|t| (0.7 * t).min(2.0)).collect();
        let s1 = EnsembleSeries::deterministic(times.clone(), values.clone()).unwrap();
        let s2 = EnsembleSeries::deterministic(times, values).unwrap();
        let result = scaling_collapse(&[(8, &s1), (10, &s2)], &[2.0, 2.0]).unwrap();
        assert!(result.score < 1e-14);
        assert_eq!(result.curves.len(), 2);
    }

    #[test]
    fn collapse_requires_two_lengths_and_coverage() {
        let times: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let values = vec![1.0; 10];
        let s = EnsembleSeries::deterministic(times, values).unwrap();
        assert!(scaling_collapse(&[(8, &s)], &[1.0]).is_err());
        // with S_inf = 100 the x range [0.01, 0.1] misses the score window
        let t2: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let s2 = EnsembleSeries::deterministic(t2, vec![1.0; 10]).unwrap();
        assert!(scaling_collapse(&[(8, &s), (10, &s2)], &[100.0, 100.0]).is_err());
    }

    #[test]
    fn blocked_series_is_zero_at_time_zero_for_products() {
        let basis = SpinBasis::new(4).unwrap();
        let p = crate::hamiltonian::CouplingParams::main(4);
        let blocked = BlockedDecomposition::compute(&p, &basis).unwrap();
        let series =
            ensemble_entropy_series(&blocked, &[0.0, 0.5], 3, 11, SamplingMode::SphereUniform, 2)
                .unwrap();
        assert!(series.mean()[0].abs() < 1e-10);
        assert_eq!(series.count(), 3);
        let _ = BlochAngles::new(vec![0.0], vec![0.0]).unwrap();
    }
}
