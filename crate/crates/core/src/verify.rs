//! Statistical verification of the APP.
//!
//! Surface points are drawn as `x″` uniform on `Ω` (rejection from the bounding
//! box), a direction uniform on `S^{k-1}` and the point `(f(x″)·direction, x″)`.
//! That is the normalized hypersurface measure exactly when the base density
//! `f^{k-1}√(1 + ‖∇f‖²)` is constant, which is what the tests here probe.
//!
//! Sampling runs in chunks of [`SAMPLE_CHUNK`] points; chunk `c` reads Philox
//! stream `c` of the seed, so output does not depend on the worker count.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{ArrayDescription, Region, SphericalArray, WarpMode};
use crate::base::BaseDomain;
use crate::error::{domain, Error, Result};
use crate::rng::Stream;
use crate::special::{chi_square_sf, QuadratureSpec};

pub const SAMPLE_CHUNK: usize = 1 << 14;

/// Per-region `|z|` above which a region counts as a violation.
pub const Z_GATE: f64 = 4.0;

/// Smallest aggregate p-value that passes.
pub const P_GATE: f64 = 1e-3;

/// Regions expecting fewer hits than this are flagged as under-sampled.
pub const MIN_EXPECTED_HITS: f64 = 100.0;

/// Asymptotic Kolmogorov-Smirnov critical value at the 1% level, to be
/// divided by `√N`.
pub const KS_CRITICAL_1PCT: f64 = 1.627_62;

/// Sampled points of `R^n`, stored row by row in the `[x′, x″]` layout.
#[derive(Debug, Clone)]
pub struct SurfaceSample {
    dim: usize,
    coords: Vec<f64>,
    proposals: u64,
}

impl SurfaceSample {
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Accepted base draws over bounding-box proposals.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            return f64::NAN;
        }
        self.len() as f64 / self.proposals as f64
    }
}

/// Samples the uniform hypersurface measure of an APP array.
pub fn sample_surface(h: &SphericalArray, count: usize, seed: u64) -> Result<SurfaceSample> {
    check_sampleable(h)?;
    sample_base_fiber(h, count, seed)
}

/// Base-uniform × fiber-uniform sampling for any warping. This is the surface
/// measure only for APP arrays.
pub fn sample_base_fiber(h: &SphericalArray, count: usize, seed: u64) -> Result<SurfaceSample> {
    let parts: Vec<Result<(Vec<f64>, u64)>> = (0..count.div_ceil(SAMPLE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let m = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            let mut coords = Vec::with_capacity(m * h.n());
            let proposals = sample_chunk(h, seed, c, m, &mut |p| {
                coords.extend_from_slice(p);
                Ok(())
            })?;
            Ok((coords, proposals))
        })
        .collect();
    let mut coords = Vec::with_capacity(count * h.n());
    let mut proposals = 0;
    for part in parts {
        let (c, p) = part?;
        coords.extend(c);
        proposals += p;
    }
    Ok(SurfaceSample { dim: h.n(), coords, proposals })
}

fn check_sampleable(h: &SphericalArray) -> Result<()> {
    match h.mode() {
        WarpMode::Archimedean | WarpMode::Cylinder => Ok(()),
        WarpMode::Custom(_) => {
            Err(Error::Unsupported(format!("surface sampling of a {} array needs density weighting", h.mode().name())))
        }
    }
}

/// Draws `count` points of chunk `c`, passing each to `visit`. Returns the
/// number of base proposals.
fn sample_chunk(
    h: &SphericalArray,
    seed: u64,
    c: usize,
    count: usize,
    visit: &mut dyn FnMut(&[f64]) -> Result<()>,
) -> Result<u64> {
    let base = h.base();
    let (lo, hi) = base.bounding_box();
    let k = h.k();
    let mut rng = Stream::new(seed, c as u64);
    let mut point = vec![0.0; h.n()];
    let mut proposals = 0u64;
    for _ in 0..count {
        loop {
            proposals += 1;
            for (i, v) in point[k..].iter_mut().enumerate() {
                *v = rng.uniform_in(lo[i], hi[i]);
            }
            if base.contains(&point[k..]) {
                break;
            }
        }
        let direction = rng.unit_vector(k);
        let f = h.warping(&point[k..])?;
        for (p, d) in point[..k].iter_mut().zip(direction) {
            *p = f * d;
        }
        visit(&point)?;
    }
    Ok(proposals)
}

/// `count` boxes and balls with centres uniform in the interior of `d` and
/// sizes (half-widths or radii) uniform in `[0.05, 0.5]·inradius`.
pub fn random_regions(d: &BaseDomain, count: usize, seed: u64) -> Result<Vec<Region>> {
    if count == 0 {
        return Err(domain("need at least one region"));
    }
    let (lo, hi) = d.bounding_box();
    let r = d.inradius();
    let mut rng = Stream::new(seed, 0);
    let mut regions = Vec::with_capacity(count);
    while regions.len() < count {
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.uniform_in(*a, *b)).collect();
        if d.signed_distance(&center)? <= 0.0 {
            continue;
        }
        let is_ball = rng.uniform() < 0.5;
        let region = if is_ball {
            Region::new_ball(center, rng.uniform_in(0.05 * r, 0.5 * r))?
        } else {
            let half: Vec<f64> = center.iter().map(|_| rng.uniform_in(0.05 * r, 0.5 * r)).collect();
            Region::new_box(
                center.iter().zip(&half).map(|(c, w)| c - w).collect(),
                center.iter().zip(&half).map(|(c, w)| c + w).collect(),
            )?
        };
        regions.push(region);
    }
    Ok(regions)
}

/// Which measure supplies the predicted hit fraction of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedMeasure {
    /// `Vol(U ∩ Ω)/Vol(Ω)`.
    Base,
    /// `Vol(π⁻¹(U ∩ Ω))/Vol(H)` from the surface density, which coincides with
    /// the base fraction exactly when the APP holds.
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// [`sample_surface`]; rejects Custom warps.
    Surface,
    /// [`sample_base_fiber`].
    BaseFiber,
}

#[derive(Debug, Clone)]
pub struct StatisticalConfig {
    pub samples: usize,
    pub seed: u64,
    pub expected: ExpectedMeasure,
    pub sampler: Sampler,
    pub quadrature: QuadratureSpec,
}

impl StatisticalConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            expected: ExpectedMeasure::Base,
            sampler: Sampler::Surface,
            quadrature: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionResult {
    pub region: Region,
    /// Predicted hit probability.
    pub expected: f64,
    pub expected_hits: f64,
    pub observed: u64,
    pub fraction: f64,
    /// `(observed - N·p)/√(N·p·(1 - p))`.
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub chi2: f64,
    pub dof: usize,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatisticalReport {
    pub array: ArrayDescription,
    pub samples: usize,
    pub seed: u64,
    pub expected_measure: ExpectedMeasure,
    pub sampler: Sampler,
    pub acceptance_rate: f64,
    pub regions: Vec<RegionResult>,
    pub aggregate: Aggregate,
    pub regions_over_z_gate: usize,
    /// Indices of regions with fewer than [`MIN_EXPECTED_HITS`] expected hits.
    pub insufficient: Vec<usize>,
    pub passed: bool,
}

/// Tests the sampled pushforward against base-volume fractions.
pub fn app_statistical_test(
    h: &SphericalArray,
    regions: &[Region],
    samples: usize,
    seed: u64,
) -> Result<StatisticalReport> {
    app_statistical_test_with(h, regions, &StatisticalConfig::new(samples, seed))
}

/// Counts sampled base projections in each region and compares with the
/// predicted fractions.
///
/// The aggregate statistic is `N·dᵀ S⁺ d` with `d` the vector of fraction
/// deviations and `S` the sample covariance of the region indicators
/// (regions may overlap); it is chi-square with `rank(S)` degrees of freedom
/// under the null.
pub fn app_statistical_test_with(
    h: &SphericalArray,
    regions: &[Region],
    config: &StatisticalConfig,
) -> Result<StatisticalReport> {
    if regions.is_empty() {
        return Err(domain("need at least one region"));
    }
    if config.samples == 0 {
        return Err(domain("need at least one sample"));
    }
    if config.sampler == Sampler::Surface {
        check_sampleable(h)?;
    }
    let expected = expected_fractions(h, regions, config)?;
    let (counts, co, proposals) = count_hits(h, regions, config)?;

    let n = config.samples as f64;
    let results: Vec<RegionResult> = regions
        .iter()
        .zip(&expected)
        .zip(&counts)
        .map(|((u, &p), &obs)| {
            let var = n * p * (1.0 - p);
            let dev = obs as f64 - n * p;
            let z = if var > 0.0 {
                dev / var.sqrt()
            } else if dev == 0.0 {
                0.0
            } else {
                dev.signum() * f64::INFINITY
            };
            RegionResult {
                region: u.clone(),
                expected: p,
                expected_hits: n * p,
                observed: obs,
                fraction: obs as f64 / n,
                z,
            }
        })
        .collect();

    let aggregate = mahalanobis(&expected, &counts, &co, config.samples)?;
    let regions_over_z_gate = results.iter().filter(|r| !(r.z.abs() <= Z_GATE)).count();
    let insufficient: Vec<usize> =
        results.iter().enumerate().filter(|(_, r)| r.expected_hits < MIN_EXPECTED_HITS).map(|(i, _)| i).collect();
    let passed = aggregate.p >= P_GATE && regions_over_z_gate <= 1 && insufficient.is_empty();
    Ok(StatisticalReport {
        array: h.description(),
        samples: config.samples,
        seed: config.seed,
        expected_measure: config.expected,
        sampler: config.sampler,
        acceptance_rate: config.samples as f64 / proposals as f64,
        regions: results,
        aggregate,
        regions_over_z_gate,
        insufficient,
        passed,
    })
}

fn expected_fractions(h: &SphericalArray, regions: &[Region], config: &StatisticalConfig) -> Result<Vec<f64>> {
    let spec = &config.quadrature;
    match config.expected {
        ExpectedMeasure::Base => {
            let total = h.base().volume();
            regions.iter().map(|u| Ok(u.clipped_volume(h.base(), spec)? / total)).collect()
        }
        ExpectedMeasure::Surface => {
            let total = h.total_volume(spec)?.numeric.value;
            regions.iter().map(|u| Ok(h.patch_volume(u, spec)?.value / total)).collect()
        }
    }
}

// Hit counts, co-occurrence counts (row-major, m × m) and base proposals.
type Tally = (Vec<u64>, Vec<u64>, u64);

fn count_hits(h: &SphericalArray, regions: &[Region], config: &StatisticalConfig) -> Result<Tally> {
    let m = regions.len();
    let k = h.k();
    let parts: Vec<Result<Tally>> = (0..config.samples.div_ceil(SAMPLE_CHUNK))
        .into_par_iter()
        .map(|c| {
            let count = SAMPLE_CHUNK.min(config.samples - c * SAMPLE_CHUNK);
            let mut hits = vec![0u64; m];
            let mut co = vec![0u64; m * m];
            let mut inside = Vec::with_capacity(m);
            let proposals = sample_chunk(h, config.seed, c, count, &mut |p| {
                let base = &p[k..];
                inside.clear();
                inside.extend((0..m).filter(|&i| regions[i].contains(base)));
                for &i in &inside {
                    hits[i] += 1;
                    for &j in &inside {
                        co[i * m + j] += 1;
                    }
                }
                Ok(())
            })?;
            Ok((hits, co, proposals))
        })
        .collect();
    let mut hits = vec![0u64; m];
    let mut co = vec![0u64; m * m];
    let mut proposals = 0;
    for part in parts {
        let (a, b, p) = part?;
        hits.iter_mut().zip(a).for_each(|(x, y)| *x += y);
        co.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        proposals += p;
    }
    Ok((hits, co, proposals))
}

fn mahalanobis(expected: &[f64], counts: &[u64], co: &[u64], samples: usize) -> Result<Aggregate> {
    let m = expected.len();
    let n = samples as f64;
    let phat: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let s = DMatrix::from_fn(m, m, |i, j| co[i * m + j] as f64 / n - phat[i] * phat[j]);
    let d = DVector::from_fn(m, |i, _| phat[i] - expected[i]);
    let eig = s.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let cutoff = top * 1e-10;
    let mut chi2 = 0.0;
    let mut dof = 0;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff && lambda > 0.0 {
            let proj = eig.eigenvectors.column(i).dot(&d);
            chi2 += n * proj * proj / lambda;
            dof += 1;
        }
    }
    if dof == 0 {
        // every region was hit by all samples or none
        let exact = d.iter().all(|v| *v == 0.0);
        return Ok(Aggregate {
            chi2: if exact { 0.0 } else { f64::INFINITY },
            dof: 0,
            p: if exact { 1.0 } else { 0.0 },
        });
    }
    let p = if chi2.is_finite() { chi_square_sf(chi2, dof)? } else { 0.0 };
    Ok(Aggregate { chi2, dof, p })
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / base as f64;
    let (mut x, mut scale) = (0.0, inv);
    while i > 0 {
        x += (i % b) as f64 * scale;
        i /= b;
        scale *= inv;
    }
    x
}

/// `count` Halton points of the base, mapped from its bounding box, at
/// distance more than the boundary offset from `∂Ω` and more than the
/// singular band from `Σ`.
pub fn interior_points(h: &SphericalArray, count: usize) -> Result<Vec<Vec<f64>>> {
    let base = h.base();
    let d = base.dim();
    if d > PRIMES.len() {
        return Err(Error::Unsupported(format!("Halton points in dimension {d}")));
    }
    let (lo, hi) = base.bounding_box();
    let mut points = Vec::with_capacity(count);
    let mut i = 0u64;
    while points.len() < count {
        i += 1;
        if i > 1000 * (count as u64 + 10) {
            return Err(Error::IterationLimit("interior point generation"));
        }
        let x: Vec<f64> = (0..d).map(|j| lo[j] + (hi[j] - lo[j]) * radical_inverse(i, PRIMES[j])).collect();
        if base.signed_distance(&x)? <= h.boundary_offset() {
            continue;
        }
        if base.singular_set_distance(&x)? <= base.singular_band() {
            continue;
        }
        points.push(x);
    }
    Ok(points)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub points: usize,
    pub max_abs_residual: f64,
    pub worst_point: Vec<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Largest `|app_residual|` over [`interior_points`].
pub fn app_residual_check(h: &SphericalArray, count: usize, tolerance: f64) -> Result<ResidualReport> {
    let points = interior_points(h, count)?;
    let residuals: Vec<f64> = points.par_iter().map(|x| h.app_residual(x)).collect::<Result<_>>()?;
    let (worst, max) =
        residuals
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(wi, m), (i, r)| if !(r.abs() <= m) { (i, r.abs()) } else { (wi, m) });
    Ok(ResidualReport {
        points: points.len(),
        max_abs_residual: max,
        worst_point: points[worst].clone(),
        tolerance,
        passed: max <= tolerance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralRegion {
    pub region: Region,
    pub clipped_volume: f64,
    pub patch_volume: f64,
    pub quadrature_error: f64,
    /// `C·Vol(U ∩ Ω)`.
    pub predicted: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralReport {
    pub app_constant: f64,
    pub regions: Vec<IntegralRegion>,
    pub max_relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares `Vol(π⁻¹(U ∩ Ω))` with `C·Vol(U ∩ Ω)` region by region.
pub fn app_integral_check(
    h: &SphericalArray,
    regions: &[Region],
    tolerance: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralReport> {
    let c = h.app_constant();
    let rows: Vec<IntegralRegion> = regions
        .par_iter()
        .map(|u| {
            let clipped = u.clipped_volume(h.base(), spec)?;
            let patch = h.patch_volume(u, spec)?;
            let predicted = c * clipped;
            Ok(IntegralRegion {
                region: u.clone(),
                clipped_volume: clipped,
                patch_volume: patch.value,
                quadrature_error: patch.error,
                predicted,
                relative_error: ((patch.value - predicted) / predicted).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let max = rows.iter().map(|r| r.relative_error).fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
    Ok(IntegralReport { app_constant: c, regions: rows, max_relative_error: max, tolerance, passed: max <= tolerance })
}

/// Kolmogorov-Smirnov statistic `sup |F_N - F|` of `values` against `cdf`.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}
