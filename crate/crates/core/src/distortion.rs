//! Euclidean distortion of finite metric spaces.
//!
//! `exact_c2` bisects on the distortion bound `C`. Feasibility of
//! `{Q ⪰ 0, d²ᵢⱼ ≤ Qᵢᵢ + Qⱼⱼ − 2Qᵢⱼ ≤ C²d²ᵢⱼ}` is decided by alternating
//! projections: cyclic projections onto the pair slabs, then eigenvalue
//! clipping onto the PSD cone. A bound counts as feasible only once the
//! factored iterate is an embedding whose measured distortion is within it,
//! so the reported upper bound is always realized by the returned witness.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codes::{cube_quotient_space, Code};
use crate::error::{Error, Result};
use crate::tsmetric::FiniteMetricSpace;

/// Default cap on the number of points handed to the SDP.
pub const DEFAULT_SDP_CAP: usize = 128;

#[derive(Clone, Debug)]
pub struct SdpParams {
    /// Bisection stops once the bracket is narrower than this.
    pub tol: f64,
    /// Relative slab violation below which an iterate counts as converged.
    pub residual: f64,
    /// Projection sweeps allowed per feasibility test.
    pub max_sweeps: usize,
    pub max_points: usize,
}

impl Default for SdpParams {
    fn default() -> Self {
        SdpParams {
            tol: 1e-4,
            residual: 1e-8,
            max_sweeps: 20_000,
            max_points: DEFAULT_SDP_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Point coordinates realizing `upper_bound`.
    pub witness: Vec<Vec<f64>>,
    /// Smallest ratio of witness distance to original distance.
    pub expansion_ratio: f64,
    pub solver_residual: f64,
    /// Smallest eigenvalue of the witness Gram matrix.
    pub gram_min_eigenvalue: f64,
    pub iterations: usize,
    /// Set when some feasibility test ran out of sweeps, leaving the bracket wide.
    pub inconclusive: bool,
}

/// `(distortion, expansion ratio)` of `map: src → dst`. A pair mapped to a
/// single point yields infinite distortion.
pub fn measure_map(src: &FiniteMetricSpace, dst: &FiniteMetricSpace, map: &[usize]) -> Result<(f64, f64)> {
    if map.len() != src.len() || map.iter().any(|&j| j >= dst.len()) {
        return Err(Error::DimensionMismatch("map does not send every source point into the target".into()));
    }
    ratio_extremes(src.len(), |i, j| dst.dist(map[i], map[j]) / src.dist(i, j))
}

fn ratio_extremes(n: usize, ratio: impl Fn(usize, usize) -> f64) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = ratio(i, j);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if n < 2 {
        return Ok((1.0, 1.0));
    }
    if lo <= 0.0 {
        return Ok((f64::INFINITY, 0.0));
    }
    Ok((hi / lo, lo))
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `(distortion, expansion ratio)` of a coordinate embedding of `space`.
pub fn embedding_distortion(space: &FiniteMetricSpace, coords: &[Vec<f64>]) -> Result<(f64, f64)> {
    if coords.len() != space.len() {
        return Err(Error::DimensionMismatch(format!("{} coordinates for {} points", coords.len(), space.len())));
    }
    ratio_extremes(space.len(), |i, j| euclid(&coords[i], &coords[j]) / space.dist(i, j))
}

fn squared_distances(space: &FiniteMetricSpace, scale: f64) -> DMatrix<f64> {
    let n = space.len();
    DMatrix::from_fn(n, n, |i, j| (space.dist(i, j) / scale).powi(2))
}

/// Classical scaling Gram matrix `-½ J D² J`.
fn mds_gram(d2: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d2.nrows();
    let j = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    -0.5 * &j * d2 * &j
}

fn clip_psd(q: &DMatrix<f64>) -> (DMatrix<f64>, SymmetricEigen<f64, nalgebra::Dyn>) {
    let sym = (q + q.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    (rebuilt, eig)
}

fn factor(eig: &SymmetricEigen<f64, nalgebra::Dyn>, dims: Option<usize>) -> Vec<Vec<f64>> {
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&k| eig.eigenvalues[k] > 0.0)
        .take(dims.unwrap_or(n))
        .collect();
    (0..n)
        .map(|i| keep.iter().map(|&k| eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt()).collect())
        .collect()
}

fn slab_residual(q: &DMatrix<f64>, d2: &DMatrix<f64>, c2: f64) -> f64 {
    let n = q.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let e = q[(i, i)] + q[(j, j)] - 2.0 * q[(i, j)];
            let lo = d2[(i, j)];
            let v = if e < lo { (lo - e) / lo } else if e > c2 * lo { (e - c2 * lo) / lo } else { 0.0 };
            worst = worst.max(v);
        }
    }
    worst
}

enum Feasibility {
    Feasible { coords: Vec<Vec<f64>>, distortion: f64 },
    Infeasible,
    OutOfSweeps,
}

struct FeasOutcome {
    verdict: Feasibility,
    sweeps: usize,
    residual: f64,
}

fn feasibility(space: &FiniteMetricSpace, d2: &DMatrix<f64>, c: f64, q: &mut DMatrix<f64>, params: &SdpParams) -> Result<FeasOutcome> {
    let n = q.nrows();
    let c2 = c * c;
    let mut best_window = f64::INFINITY;
    let mut window_min = f64::INFINITY;
    let mut residual = f64::INFINITY;
    const WINDOW: usize = 250;
    for sweep in 1..=params.max_sweeps {
        for i in 0..n {
            for j in i + 1..n {
                let e = q[(i, i)] + q[(j, j)] - 2.0 * q[(i, j)];
                let lo = d2[(i, j)];
                let hi = c2 * lo;
                let delta = if e < lo {
                    (lo - e) / 4.0
                } else if e > hi {
                    (hi - e) / 4.0
                } else {
                    continue;
                };
                q[(i, i)] += delta;
                q[(j, j)] += delta;
                q[(i, j)] -= delta;
                q[(j, i)] -= delta;
            }
        }
        let (psd, eig) = clip_psd(q);
        *q = psd;
        residual = slab_residual(q, d2, c2);
        window_min = window_min.min(residual);
        if residual < 1e-3 || sweep % 25 == 0 {
            let coords = factor(&eig, None);
            let (dist, _) = embedding_distortion(space, &coords)?;
            if dist <= c * (1.0 + 1e-12) || residual < params.residual {
                return Ok(FeasOutcome {
                    verdict: Feasibility::Feasible { coords, distortion: dist },
                    sweeps: sweep,
                    residual,
                });
            }
        }
        if sweep % WINDOW == 0 {
            // Converging iterates keep shrinking the violation; a cycle
            // between disjoint sets does not.
            if window_min > params.residual && window_min > best_window * 0.99 {
                return Ok(FeasOutcome {
                    verdict: Feasibility::Infeasible,
                    sweeps: sweep,
                    residual,
                });
            }
            best_window = best_window.min(window_min);
            window_min = f64::INFINITY;
        }
    }
    Ok(FeasOutcome {
        verdict: Feasibility::OutOfSweeps,
        sweeps: params.max_sweeps,
        residual,
    })
}

fn report_for(space: &FiniteMetricSpace, lower: f64, coords: Vec<Vec<f64>>, residual: f64, iterations: usize, inconclusive: bool) -> Result<DistortionReport> {
    let (upper, expansion) = embedding_distortion(space, &coords)?;
    let n = coords.len();
    let gram = DMatrix::from_fn(n, n, |i, j| coords[i].iter().zip(&coords[j]).map(|(a, b)| a * b).sum::<f64>());
    let gram_min = if n == 0 {
        0.0
    } else {
        SymmetricEigen::new(gram).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    };
    Ok(DistortionReport {
        lower_bound: lower.min(upper),
        upper_bound: upper,
        witness: coords,
        expansion_ratio: expansion,
        solver_residual: residual,
        gram_min_eigenvalue: gram_min,
        iterations,
        inconclusive,
    })
}

/// Euclidean distortion `c₂` by bisection over alternating-projection
/// feasibility tests.
pub fn exact_c2(space: &FiniteMetricSpace, params: &SdpParams) -> Result<DistortionReport> {
    let n = space.len();
    if n > params.max_points {
        return Err(Error::capacity("sdp", params.max_points as u64, format!("space with {n} points")));
    }
    if !(params.tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if n <= 2 {
        let coords = (0..n).map(|i| vec![if i == 0 { 0.0 } else { space.dist(0, 1) }]).collect();
        return report_for(space, 1.0, coords, 0.0, 0, false);
    }
    let d_min = space.min_separation().expect("at least two points");
    let d2 = squared_distances(space, d_min);
    let (mut q, eig) = clip_psd(&mds_gram(&d2));
    let mds_coords = factor(&eig, None);
    let (mds_dist, _) = embedding_distortion(space, &mds_coords)?;
    if mds_dist <= 1.0 + 1e-9 {
        return report_for(space, 1.0, mds_coords, 0.0, 0, false);
    }

    // A simplex embedding has distortion diam/d_min, bounding c₂ from above.
    let simplex: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| if k == i { d_min / 2f64.sqrt() } else { 0.0 }).collect()).collect();
    let (simplex_dist, _) = embedding_distortion(space, &simplex)?;
    let (mut best, mut hi) = if mds_dist < simplex_dist { (mds_coords, mds_dist) } else { (simplex, simplex_dist) };
    let mut lo = 1.0f64;
    let mut iterations = 0;
    let mut residual = 0.0;
    let mut inconclusive = false;
    while hi - lo > params.tol {
        let mid = 0.5 * (lo + hi);
        let mut trial = q.clone();
        let out = feasibility(space, &d2, mid, &mut trial, params)?;
        iterations += out.sweeps;
        match out.verdict {
            Feasibility::Feasible { coords, distortion } => {
                residual = out.residual;
                if distortion < hi {
                    hi = distortion;
                    best = coords;
                }
                q = trial;
                if distortion > mid {
                    lo = lo.max(mid.min(distortion) - params.tol);
                }
            }
            Feasibility::Infeasible => lo = mid,
            Feasibility::OutOfSweeps => {
                inconclusive = true;
                break;
            }
        }
    }
    report_for(space, lo, best, residual, iterations, inconclusive)
}

fn truncated_mds(space: &FiniteMetricSpace, dim: usize) -> Vec<Vec<f64>> {
    let d2 = squared_distances(space, 1.0);
    let (_, eig) = clip_psd(&mds_gram(&d2));
    let mut coords = factor(&eig, Some(dim));
    for c in &mut coords {
        c.resize(dim, 0.0);
    }
    coords
}

fn distortion_or_inf(space: &FiniteMetricSpace, coords: &[Vec<f64>]) -> f64 {
    embedding_distortion(space, coords).map(|(d, _)| d).unwrap_or(f64::INFINITY)
}

fn local_search(space: &FiniteMetricSpace, mut coords: Vec<Vec<f64>>, rng: &mut ChaCha8Rng, max_evals: usize) -> (Vec<Vec<f64>>, f64) {
    let n = coords.len();
    let dim = coords.first().map_or(0, Vec::len);
    let mut value = distortion_or_inf(space, &coords);
    let mut step = 0.25 * space.diameter();
    let floor = 1e-9 * space.diameter().max(1e-300);
    let mut evals = 0;
    while step > floor && evals < max_evals {
        let mut improved = false;
        for i in 0..n {
            for k in 0..dim {
                for sign in [1.0, -1.0] {
                    coords[i][k] += sign * step;
                    let v = distortion_or_inf(space, &coords);
                    evals += 1;
                    if v < value {
                        value = v;
                        improved = true;
                    } else {
                        coords[i][k] -= sign * step;
                    }
                }
            }
        }
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let dir: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            for (c, d) in coords[i].iter_mut().zip(&dir) {
                *c += step * d;
            }
            let v = distortion_or_inf(space, &coords);
            evals += 1;
            if v < value {
                value = v;
                improved = true;
            } else {
                for (c, d) in coords[i].iter_mut().zip(&dir) {
                    *c -= step * d;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (coords, value)
}

/// Best embedding into `R^target_dim` found by pattern search from a
/// truncated classical scaling start and `restarts - 1` random starts.
/// Restart `k` uses the stream seeded by `seed + k`.
pub fn embedding_upper_bound(space: &FiniteMetricSpace, target_dim: usize, restarts: usize, seed: u64) -> Result<DistortionReport> {
    if target_dim == 0 {
        return Err(Error::InvalidInput("target dimension must be positive".into()));
    }
    let n = space.len();
    let diam = space.diameter();
    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    for k in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let start = if k == 0 {
            truncated_mds(space, target_dim)
        } else {
            (0..n).map(|_| (0..target_dim).map(|_| rng.random_range(0.0..diam.max(1.0))).collect()).collect()
        };
        let (coords, value) = local_search(space, start, &mut rng, 200_000);
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((coords, value));
        }
    }
    let (coords, _) = best.expect("at least one restart");
    report_for(space, 1.0, coords, 0.0, restarts.max(1), false)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileRow {
    pub d: usize,
    pub dim_c: usize,
    pub points: usize,
    pub lower: f64,
    pub upper: f64,
    pub inconclusive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistortionProfile {
    pub rows: Vec<ProfileRow>,
    /// Whether measured `c₂` never drops by more than the tolerance along the family.
    pub nondecreasing: bool,
}

pub fn quotient_distortion_profile(codes: &[Code], params: &SdpParams) -> Result<DistortionProfile> {
    let mut rows = Vec::new();
    for code in codes {
        let space = cube_quotient_space(code, params.max_points)?;
        let r = exact_c2(&space, params)?;
        rows.push(ProfileRow {
            d: code.d(),
            dim_c: code.c().dim(),
            points: space.len(),
            lower: r.lower_bound,
            upper: r.upper_bound,
            inconclusive: r.inconclusive,
        });
    }
    let nondecreasing = rows.windows(2).all(|w| w[1].upper >= w[0].upper - params.tol);
    Ok(DistortionProfile { rows, nondecreasing })
}

/// Hamming cube `Z₂^d`.
pub fn hamming_cube(d: usize) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_fn((0..1usize << d).map(|i| format!("{i:0d$b}")).collect(), Some(1.0), |i, j| {
        (i ^ j).count_ones() as f64
    })
}
