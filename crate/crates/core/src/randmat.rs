//! Random principal submatrices of a conference matrix and their spectra.
//!
//! Each index is kept independently with probability `p`. The scaled
//! submatrix `X/(p√n)` has an empirical spectral distribution close to the
//! Kesten–McKay law with parameter `1/p`.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conference::{ConferenceMatrix, GramFactor};
use crate::error::{invalid, Error, Result};
use crate::km::{binomial, KMDistribution};
use crate::linalg::symmetric_eigenvalues;

/// Symmetry and residual tolerance handed to the eigensolver.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_BINS: usize = 100;

/// Inclusion probability plus the `(seed, trial_index)` pair that fixes the
/// random stream of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub p: f64,
    pub seed: u64,
    pub trial_index: u64,
}

impl SubsampleSpec {
    pub fn new(p: f64, seed: u64, trial_index: u64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self {
            p,
            seed,
            trial_index,
        })
    }

    /// ChaCha8 keyed by `seed`, with `trial_index` selecting the stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

pub fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("p = {p} must lie strictly between 0 and 1")))
    }
}

/// Indices of `0..n` kept independently with probability `spec.p`.
pub fn sample_subset(n: usize, spec: &SubsampleSpec) -> Result<Vec<usize>> {
    check_probability(spec.p)?;
    if n == 0 {
        return Err(invalid("order must be >= 1"));
    }
    let mut rng = spec.rng();
    Ok((0..n).filter(|_| rng.random_bool(spec.p)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalSubmatrix {
    parent_n: usize,
    indices: Vec<usize>,
    entries: Vec<i8>,
}

impl PrincipalSubmatrix {
    pub fn parent_order(&self) -> usize {
        self.parent_n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> i8 {
        self.entries[a * self.order() + b]
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let m = self.order();
        DMatrix::from_fn(m, m, |a, b| self.get(a, b) as f64)
    }
}

pub fn principal_submatrix(s: &ConferenceMatrix, indices: &[usize]) -> Result<PrincipalSubmatrix> {
    let n = s.order();
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, order: n });
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("indices must be strictly increasing"));
    }
    let mut entries = Vec::with_capacity(indices.len() * indices.len());
    for &i in indices {
        let row = s.row(i);
        entries.extend(indices.iter().map(|&j| row[j]));
    }
    Ok(PrincipalSubmatrix {
        parent_n: n,
        indices: indices.to_vec(),
        entries,
    })
}

/// Sorted eigenvalues together with the factor that was applied to the
/// matrix before diagonalising.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub scale: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

pub fn sym_eigenvalues(m: &DMatrix<f64>, tol: f64) -> Result<Spectrum> {
    Ok(Spectrum {
        values: symmetric_eigenvalues(m, tol)?,
        scale: 1.0,
    })
}

/// Eigenvalues of `X/(p√n)` where `n` is the order of the parent matrix.
pub fn scaled_spectrum(x: &PrincipalSubmatrix, p: f64) -> Result<Spectrum> {
    check_probability(p)?;
    let scale = 1.0 / (p * (x.parent_order() as f64).sqrt());
    let m = x.to_f64() * scale;
    let values = symmetric_eigenvalues(&m, EIGEN_TOLERANCE)?;
    Ok(Spectrum { values, scale })
}

/// `(1/N) Σ λ_i^k`.
pub fn esd_moment(spec: &Spectrum, k: u32) -> Result<f64> {
    if spec.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let sum: f64 = spec.values.iter().map(|v| v.powi(k as i32)).sum();
    Ok(sum / spec.len() as f64)
}

/// Moment of the distribution that equals the ESD when the spectrum is
/// non-empty and the point mass at zero otherwise.
pub fn zeta_moment(spec: &Spectrum, k: u32) -> f64 {
    if spec.is_empty() {
        if k == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        let sum: f64 = spec.values.iter().map(|v| v.powi(k as i32)).sum();
        sum / spec.len() as f64
    }
}

fn int_matmul(a: &[i64], b: &[i64], m: usize) -> Vec<i64> {
    let mut out = vec![0i64; m * m];
    for i in 0..m {
        for l in 0..m {
            let ail = a[i * m + l];
            if ail == 0 {
                continue;
            }
            let brow = &b[l * m..(l + 1) * m];
            let orow = &mut out[i * m..(i + 1) * m];
            for (o, &blj) in orow.iter_mut().zip(brow) {
                *o += ail * blj;
            }
        }
    }
    out
}

/// `tr(X^k)` in exact integer arithmetic, or `None` when `N^k` does not fit
/// comfortably in 63 bits (every entry of `X^j` is bounded by `N^{j-1}`).
pub fn trace_power_exact(x: &PrincipalSubmatrix, k: u32) -> Option<i64> {
    let m = x.order();
    if m == 0 {
        return Some(0);
    }
    if (m as f64).powi(k as i32) >= 2f64.powi(62) {
        return None;
    }
    if k == 0 {
        return Some(m as i64);
    }
    let base: Vec<i64> = x.entries.iter().map(|&v| v as i64).collect();
    // tr(X^k) = Σ_ij (X^a)_ij (X^b)_ji with a = ⌈k/2⌉, b = ⌊k/2⌋ and X symmetric
    let a = k.div_ceil(2);
    let b = k / 2;
    let mut pow_a = base.clone();
    let mut pow_b = if b == 0 { None } else { Some(base.clone()) };
    for j in 2..=a {
        pow_a = int_matmul(&pow_a, &base, m);
        if j == b {
            pow_b = Some(pow_a.clone());
        }
    }
    Some(match pow_b {
        None => (0..m).map(|i| pow_a[i * m + i]).sum(),
        Some(pb) => pow_a.iter().zip(&pb).map(|(u, v)| u * v).sum(),
    })
}

/// `tr(X^k)`, exactly when small enough and in floating point otherwise.
pub fn trace_power(x: &PrincipalSubmatrix, k: u32) -> f64 {
    if let Some(v) = trace_power_exact(x, k) {
        return v as f64;
    }
    let m = x.to_f64();
    let mut acc = DMatrix::identity(x.order(), x.order());
    for _ in 0..k {
        acc = &acc * &m;
    }
    acc.trace()
}

/// `tr(X^j)` for `j = 0..=k_max` by successive products in floating point.
/// Integer entries keep every product exact until magnitudes reach 2^53.
pub fn trace_powers(x: &PrincipalSubmatrix, k_max: u32) -> Vec<f64> {
    let m = x.to_f64();
    let mut pow = DMatrix::identity(x.order(), x.order());
    let mut out = Vec::with_capacity(k_max as usize + 1);
    out.push(x.order() as f64);
    for _ in 0..k_max {
        pow = &pow * &m;
        out.push(pow.trace());
    }
    out
}

/// `V = tr(Z^k) / (p n)` with `Z = X/(p√n)`; zero for an empty submatrix.
pub fn trace_power_proxy(x: &PrincipalSubmatrix, p: f64, k: u32) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    proxy_from_trace(trace_power(x, k), x.parent_order(), p, k)
}

/// `V` from a precomputed `tr(X^k)`.
pub fn proxy_from_trace(trace: f64, parent_n: usize, p: f64, k: u32) -> f64 {
    let n = parent_n as f64;
    trace / (p * n.sqrt()).powi(k as i32) / (p * n)
}

/// `tr(X^k) / n^{k/2+1}`, the quantity whose expectation is a polynomial
/// in `p`.
pub fn normalized_trace(x: &PrincipalSubmatrix, k: u32) -> f64 {
    let n = x.parent_order() as f64;
    trace_power(x, k) / n.powf(k as f64 / 2.0 + 1.0)
}

/// Relative gap between `V` and `(N/(pn)) W`, where `W` is the ESD moment
/// of the scaled spectrum. The scale is `(N/(pn)) · mean|λ|^k`, which stays
/// meaningful when odd moments nearly cancel.
pub fn proxy_identity_gap(x: &PrincipalSubmatrix, spectrum: &Spectrum, p: f64, k: u32) -> Result<f64> {
    if x.is_empty() {
        return Ok(0.0);
    }
    identity_gap(trace_power_proxy(x, p, k), spectrum, x.parent_order(), p, k)
}

/// [`proxy_identity_gap`] for an already computed `V`.
pub fn identity_gap(proxy: f64, spectrum: &Spectrum, parent_n: usize, p: f64, k: u32) -> Result<f64> {
    let n = parent_n as f64;
    let big_n = spectrum.len() as f64;
    let w = esd_moment(spectrum, k)?;
    let abs_moment: f64 =
        spectrum.values.iter().map(|l| l.abs().powi(k as i32)).sum::<f64>() / big_n;
    let scale = big_n / (p * n) * abs_moment;
    let gap = (proxy - big_n / (p * n) * w).abs();
    Ok(if scale > 0.0 { gap / scale } else { gap })
}

/// One-sample Kolmogorov–Smirnov statistic. Both one-sided empirical limits
/// are compared at every distinct sample value, so ties are handled.
pub fn ks_distance<F: Fn(f64) -> f64>(spec: &Spectrum, cdf: F) -> Result<f64> {
    let mut sorted = spec.values.clone();
    sorted.sort_by(f64::total_cmp);
    let cdf_values: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    ks_sorted(&sorted, &cdf_values)
}

/// KS distance to `KM(v)`.
pub fn ks_to_km(spec: &Spectrum, v: f64) -> Result<f64> {
    let km = KMDistribution::new(v)?;
    let mut sorted = spec.values.clone();
    sorted.sort_by(f64::total_cmp);
    let cdf_values = sorted.iter().map(|&x| km.cdf(x)).collect::<Result<Vec<_>>>()?;
    ks_sorted(&sorted, &cdf_values)
}

fn ks_sorted(sorted: &[f64], cdf_values: &[f64]) -> Result<f64> {
    let total = sorted.len();
    if total == 0 {
        return Err(Error::EmptySpectrum);
    }
    let nf = total as f64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < total {
        let mut j = i;
        while j < total && sorted[j] == sorted[i] {
            j += 1;
        }
        let c = cdf_values[i];
        let below = i as f64 / nf;
        let upto = j as f64 / nf;
        worst = worst.max((c - below).abs()).max((upto - c).abs());
        i = j;
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub overlay: Option<Vec<f64>>,
}

impl HistogramData {
    /// `bins` equal-width bins over `[-half_width, half_width]`, plus one bin
    /// of the same width on each side. Values beyond the padding are counted
    /// in the outermost bins so that the total is conserved.
    pub fn padded(half_width: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(invalid("bins must be >= 1"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid(format!("half width {half_width} must be positive")));
        }
        let width = 2.0 * half_width / bins as f64;
        let bin_edges = (0..=bins + 2)
            .map(|i| -half_width - width + i as f64 * width)
            .collect();
        Ok(Self {
            counts: vec![0; bins + 2],
            bin_edges,
            total: 0,
            overlay: None,
        })
    }

    /// [`HistogramData::padded`] over the `KM(v)` support with the density
    /// at bin midpoints as overlay.
    pub fn for_km_support(v: f64, bins: usize) -> Result<Self> {
        let km = KMDistribution::new(v)?;
        let mut h = Self::padded(km.edge(), bins)?;
        h.overlay = Some(h.midpoints().iter().map(|&x| km.density(x)).collect());
        Ok(h)
    }

    pub fn add(&mut self, x: f64) {
        let lo = self.bin_edges[0];
        let last = self.counts.len() - 1;
        let width = self.bin_edges[1] - lo;
        let idx = ((x - lo) / width).floor();
        let idx = if idx.is_nan() || idx < 0.0 {
            0
        } else {
            (idx as usize).min(last)
        };
        self.counts[idx] += 1;
        self.total += 1;
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Counts normalised to integrate to one.
    pub fn empirical_density(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .zip(&self.counts)
            .map(|(w, &c)| {
                if self.total == 0 {
                    0.0
                } else {
                    c as f64 / (self.total as f64 * (w[1] - w[0]))
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Format(e.to_string());
        writeln!(w, "bin_left,bin_right,count,empirical_density,km_density").map_err(io)?;
        let dens = self.empirical_density();
        for (i, e) in self.bin_edges.windows(2).enumerate() {
            let km = self.overlay.as_ref().map(|o| o[i].to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{},{}", e[0], e[1], self.counts[i], dens[i], km).map_err(io)?;
        }
        Ok(())
    }
}

/// Subset, submatrix order and scaled spectrum of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub trial_index: u64,
    pub indices: Vec<usize>,
    pub spectrum: Spectrum,
}

/// Runs `trials` independent draws in parallel; results come back in trial
/// order regardless of scheduling.
pub fn run_trials(s: &ConferenceMatrix, p: f64, seed: u64, trials: u64) -> Result<Vec<Trial>> {
    check_probability(p)?;
    (0..trials)
        .into_par_iter()
        .map(|trial_index| {
            let spec = SubsampleSpec::new(p, seed, trial_index)?;
            let indices = sample_subset(s.order(), &spec)?;
            let x = principal_submatrix(s, &indices)?;
            let spectrum = scaled_spectrum(&x, p)?;
            Ok(Trial {
                trial_index,
                indices,
                spectrum,
            })
        })
        .collect()
}

/// Pooled result of a Monte Carlo spectrum run.
#[derive(Debug, Clone, PartialEq)]
pub struct EsdRun {
    pub q: Option<u64>,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub trials: u64,
    pub sizes: Vec<usize>,
    pub pooled: Spectrum,
    pub histogram: HistogramData,
}

impl EsdRun {
    pub fn empty_trials(&self) -> usize {
        self.sizes.iter().filter(|&&s| s == 0).count()
    }

    /// KS distance to `KM(1/p)`; `None` when `p > 1/2`.
    pub fn ks_distance(&self) -> Result<Option<f64>> {
        if self.p > 0.5 {
            return Ok(None);
        }
        ks_to_km(&self.pooled, 1.0 / self.p).map(Some)
    }

    pub fn metadata(&self, bins: usize, moments_up_to: u32) -> Result<RunMetadata> {
        let moments = (1..=moments_up_to)
            .map(|k| Ok((k.to_string(), esd_moment(&self.pooled, k)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(RunMetadata {
            q: self.q,
            n: self.n,
            p: self.p,
            seed: self.seed,
            trials: self.trials,
            bins,
            pooled: self.trials > 1,
            empty_trials: self.empty_trials(),
            total_eigenvalues: self.pooled.len(),
            ks_distance: self.ks_distance()?,
            moments,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub q: Option<u64>,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub trials: u64,
    pub bins: usize,
    pub pooled: bool,
    pub empty_trials: usize,
    pub total_eigenvalues: usize,
    pub ks_distance: Option<f64>,
    pub moments: BTreeMap<String, f64>,
}

/// Pooled histogram of scaled spectra over `trials` draws. Empty draws add
/// nothing to the pool; they are counted in [`EsdRun::empty_trials`].
pub fn monte_carlo_esd(s: &ConferenceMatrix, p: f64, seed: u64, trials: u64, bins: usize) -> Result<EsdRun> {
    if trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    check_probability(p)?;
    // the limit law only exists for p <= 1/2; above that, bin over the norm
    // bound 1/p without an overlay
    let mut histogram = if p <= 0.5 {
        HistogramData::for_km_support(1.0 / p, bins)?
    } else {
        HistogramData::padded(1.0 / p, bins)?
    };
    let outcomes = run_trials(s, p, seed, trials)?;
    let sizes: Vec<usize> = outcomes.iter().map(|t| t.indices.len()).collect();
    let mut pooled: Vec<f64> = outcomes.into_iter().flat_map(|t| t.spectrum.values).collect();
    if pooled.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    pooled.sort_by(f64::total_cmp);
    for &x in &pooled {
        histogram.add(x);
    }
    Ok(EsdRun {
        q: s.q(),
        n: s.order(),
        p,
        seed,
        trials,
        sizes,
        pooled: Spectrum {
            values: pooled,
            scale: 1.0 / (p * (s.order() as f64).sqrt()),
        },
        histogram,
    })
}

/// Per-trial trace proxies `V_k` for `k = 1..=k_max`, along with the largest
/// relative gap seen in the identity `V = (N/(pn)) W`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxySamples {
    pub k_max: u32,
    /// `values[trial][k - 1]`.
    pub values: Vec<Vec<f64>>,
    pub sizes: Vec<usize>,
    pub max_identity_gap: f64,
}

impl ProxySamples {
    pub fn column(&self, k: u32) -> Vec<f64> {
        self.values.iter().map(|row| row[k as usize - 1]).collect()
    }
}

pub fn trace_proxy_samples(s: &ConferenceMatrix, p: f64, seed: u64, trials: u64, k_max: u32) -> Result<ProxySamples> {
    check_probability(p)?;
    if trials == 0 || k_max == 0 {
        return Err(invalid("trials and k_max must be >= 1"));
    }
    let n = s.order();
    let rows = (0..trials)
        .into_par_iter()
        .map(|trial_index| {
            let spec = SubsampleSpec::new(p, seed, trial_index)?;
            let x = principal_submatrix(s, &sample_subset(n, &spec)?)?;
            if x.is_empty() {
                return Ok((vec![0.0; k_max as usize], 0, 0.0));
            }
            let traces = trace_powers(&x, k_max);
            let spectrum = scaled_spectrum(&x, p)?;
            let mut worst = 0.0f64;
            let mut proxies = Vec::with_capacity(k_max as usize);
            for k in 1..=k_max {
                let v = proxy_from_trace(traces[k as usize], n, p, k);
                worst = worst.max(identity_gap(v, &spectrum, n, p, k)?);
                proxies.push(v);
            }
            Ok((proxies, x.order(), worst))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_identity_gap = rows.iter().fold(0.0f64, |m, r| m.max(r.2));
    let sizes = rows.iter().map(|r| r.1).collect();
    Ok(ProxySamples {
        k_max,
        values: rows.into_iter().map(|r| r.0).collect(),
        sizes,
        max_identity_gap,
    })
}

/// Sample mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

pub fn mean_estimate(xs: &[f64]) -> Result<MeanEstimate> {
    let m = xs.len();
    if m == 0 {
        return Err(invalid("no samples"));
    }
    let mean = xs.iter().sum::<f64>() / m as f64;
    let std_error = if m < 2 {
        f64::INFINITY
    } else {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        (var / m as f64).sqrt()
    };
    Ok(MeanEstimate {
        mean,
        std_error,
        samples: m,
    })
}

/// Both sides of the trace identity relating `Y = PSP/(p√n)` to the
/// Schatten `2k`-norm of `F` restricted to the sampled columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenshiftCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl EigenshiftCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn eigenshift_check(
    s: &ConferenceMatrix,
    factor: &GramFactor,
    subset: &[usize],
    p: f64,
    k: u32,
) -> Result<EigenshiftCheck> {
    check_probability(p)?;
    if k == 0 {
        return Err(invalid("k must be >= 1"));
    }
    if factor.n != s.order() {
        return Err(invalid("factor and matrix orders differ"));
    }
    let x = principal_submatrix(s, subset)?;
    if x.is_empty() {
        return Ok(EigenshiftCheck { lhs: 0.0, rhs: 0.0 });
    }
    let n = s.order();
    let y = x.to_f64() / (p * (n as f64).sqrt());
    // tr(Y^j) for j = 1..=k by repeated multiplication
    let mut traces = Vec::with_capacity(k as usize + 1);
    traces.push(x.order() as f64);
    let mut pow = DMatrix::identity(x.order(), x.order());
    for _ in 1..=k {
        pow = &pow * &y;
        traces.push(pow.trace());
    }
    let fp = DMatrix::from_fn(n, subset.len(), |r, c| factor.matrix[(r, subset[c])]);
    let singular = fp
        .try_svd(false, false, 1e-14, 10_000)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?
        .singular_values;
    let schatten: f64 = singular.iter().map(|v| v.powi(2 * k as i32)).sum();

    let pinv = 1.0 / p;
    let mut rhs = pinv.powi(k as i32) * schatten - pinv.powi(k as i32) * traces[0];
    for j in 1..k {
        let c = binomial(k as u64, j as u64)? as f64;
        rhs -= c * pinv.powi((k - j) as i32) * traces[j as usize];
    }
    Ok(EigenshiftCheck {
        lhs: traces[k as usize],
        rhs,
    })
}
