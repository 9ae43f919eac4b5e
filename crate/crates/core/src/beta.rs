//! Jones beta numbers of atomic measures over balls and cubes.
//!
//! For `p = 2` the infimum over planes is a weighted second-moment eigenproblem
//! and is solved exactly. Other exponents use iteratively reweighted least
//! squares started from the `p = 2` plane; those values are feasible upper
//! bounds and carry `exact = false`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{distance, numerical_rank, AffinePlane};
use crate::measure::{check_dimension, unit_ball_volume, CubeRegion, PointCloudMeasure};
use crate::sum::NeumaierSum;

const IRLS_DIST_FLOOR: f64 = 1e-12;
const IRLS_TOLERANCE: f64 = 1e-10;
const IRLS_MAX_ITER: usize = 200;
/// Extra IRLS starts through atoms when the objective is not the least-squares one.
const IRLS_MAX_STARTS: usize = 48;
const POLISH_MIN_STEP: f64 = 1e-10;
const POLISH_MAX_EVALUATIONS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaParams {
    pub m: usize,
    pub p: f64,
    pub centred: bool,
}

impl BetaParams {
    pub fn new(m: usize, p: f64, centred: bool) -> Self {
        Self { m, p, centred }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_dimension(self.m, n)?;
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::invalid(format!(
                "exponent p = {} must lie in [1, inf)",
                self.p
            )));
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.p == 2.0
    }
}

/// A beta number together with whether it is a certified infimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaValue {
    pub value: f64,
    pub exact: bool,
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("radius must be finite and positive"));
    }
    Ok(())
}

fn check_plane(plane: &AffinePlane, mu: &PointCloudMeasure, m: usize) -> Result<()> {
    if plane.ambient_dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: plane.ambient_dim(),
        });
    }
    if plane.dim() != m {
        return Err(Error::invalid(format!(
            "plane has dimension {}, expected m = {m}",
            plane.dim()
        )));
    }
    Ok(())
}

/// `Σ w(y) dist(y, L)^p` over the given atoms.
pub(crate) fn lp_sum(
    mu: &PointCloudMeasure,
    indices: &[usize],
    plane: &AffinePlane,
    p: f64,
) -> f64 {
    let mut acc = NeumaierSum::new();
    for &i in indices {
        let d = plane.distance_unchecked(mu.point(i));
        let term = if p == 2.0 { d * d } else { d.powf(p) };
        acc.add(mu.weight(i) * term);
    }
    acc.value()
}

/// Scale normalisation `(1/s) (s^{-m} numerator)^{1/p}` shared by balls and cubes.
pub(crate) fn normalise(numerator: f64, scale: f64, m: usize, p: f64) -> f64 {
    (numerator.max(0.0) / scale.powi(m as i32)).powf(1.0 / p) / scale
}

/// `β_{μ,p}(x, r, L)`.
pub fn beta_given_plane(
    mu: &PointCloudMeasure,
    x: &[f64],
    r: f64,
    plane: &AffinePlane,
    params: &BetaParams,
) -> Result<f64> {
    params.validate(mu.dim())?;
    check_radius(r)?;
    check_plane(plane, mu, params.m)?;
    let idx = mu.ball_indices(x, r)?;
    Ok(normalise(
        lp_sum(mu, &idx, plane, params.p),
        r,
        params.m,
        params.p,
    ))
}

/// `β_{μ,p}(Q, L)` with the side length of `cube` as the scale.
pub fn beta_cube_given_plane(
    mu: &PointCloudMeasure,
    cube: &CubeRegion,
    plane: &AffinePlane,
    params: &BetaParams,
) -> Result<f64> {
    params.validate(mu.dim())?;
    check_plane(plane, mu, params.m)?;
    let idx = mu.cube_indices(cube)?;
    Ok(normalise(
        lp_sum(mu, &idx, plane, params.p),
        cube.side,
        params.m,
        params.p,
    ))
}

/// Weighted least-squares `m`-plane through the atoms `indices`, with optional
/// extra per-atom factors on the weights. With `through`, the plane is forced
/// through that point and the second-moment matrix is taken about it.
fn fit_l2(
    mu: &PointCloudMeasure,
    indices: &[usize],
    extra: Option<&[f64]>,
    m: usize,
    through: Option<&[f64]>,
) -> AffinePlane {
    let n = mu.dim();
    let weight = |k: usize| mu.weight(indices[k]) * extra.map_or(1.0, |e| e[k]);

    let center: Vec<f64> = match through {
        Some(x) => x.to_vec(),
        None => {
            let mut total = NeumaierSum::new();
            let mut first = vec![NeumaierSum::new(); n];
            for (k, &i) in indices.iter().enumerate() {
                let w = weight(k);
                total.add(w);
                for (acc, v) in first.iter_mut().zip(mu.point(i)) {
                    acc.add(w * v);
                }
            }
            let total = total.value();
            if total > 0.0 {
                first.iter().map(|s| s.value() / total).collect()
            } else {
                indices
                    .first()
                    .map_or_else(|| vec![0.0; n], |&i| mu.point(i).to_vec())
            }
        }
    };

    let mut scatter = vec![NeumaierSum::new(); n * n];
    for (k, &i) in indices.iter().enumerate() {
        let w = weight(k);
        if w == 0.0 {
            continue;
        }
        let y = mu.point(i);
        for a in 0..n {
            let da = y[a] - center[a];
            for b in a..n {
                scatter[a * n + b].add(w * da * (y[b] - center[b]));
            }
        }
    }
    let matrix = DMatrix::from_fn(n, n, |a, b| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        scatter[lo * n + hi].value()
    });

    let SymmetricEigen {
        eigenvectors,
        eigenvalues,
    } = matrix.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let mut directions: Vec<Vec<f64>> = order[..m]
        .iter()
        .map(|&j| eigenvectors.column(j).iter().copied().collect())
        .collect();
    let mut plane = AffinePlane::spanned_by(center.clone(), &directions);
    // Numerically dependent eigenvectors: complete with coordinate axes.
    let mut axis = 0;
    while plane.dim() < m && axis < n {
        directions = plane.basis().to_vec();
        let mut e = vec![0.0; n];
        e[axis] = 1.0;
        directions.push(e);
        plane = AffinePlane::spanned_by(center.clone(), &directions);
        axis += 1;
    }
    plane
}

/// Rank of the weighted cloud about `center` under the global singular-value cutoff.
fn scatter_rank(mu: &PointCloudMeasure, indices: &[usize], through: Option<&[f64]>) -> usize {
    let n = mu.dim();
    let support: Vec<usize> = indices
        .iter()
        .copied()
        .filter(|&i| mu.weight(i) > 0.0)
        .collect();
    if support.is_empty() {
        return 0;
    }
    // Without a forced point, differences from one support atom span the affine hull.
    let center: Vec<f64> = match through {
        Some(x) => x.to_vec(),
        None => mu.point(support[0]).to_vec(),
    };
    let data = DMatrix::from_fn(support.len(), n, |k, j| {
        let i = support[k];
        mu.weight(i).sqrt() * (mu.point(i)[j] - center[j])
    });
    let sv: Vec<f64> = data.singular_values().iter().copied().collect();
    numerical_rank(&sv)
}

/// Best `m`-plane in the least-squares sense and its residual `Σ w dist²`.
/// The residual is exactly 0 when the weighted support spans at most an
/// `m`-plane (through `through` when given).
fn best_plane_indices(
    mu: &PointCloudMeasure,
    indices: &[usize],
    m: usize,
    through: Option<&[f64]>,
) -> (AffinePlane, f64) {
    let plane = fit_l2(mu, indices, None, m, through);
    // m + 1 atoms always lie in an m-plane; m atoms do together with the forced point.
    let support = indices.iter().filter(|&&i| mu.weight(i) > 0.0).count();
    let trivially_flat = match through {
        None => support <= m + 1,
        Some(_) => support <= m,
    };
    if trivially_flat || scatter_rank(mu, indices, through) <= m {
        return (plane, 0.0);
    }
    let residual = lp_sum(mu, indices, &plane, 2.0);
    (plane, residual)
}

/// Exact least-squares plane for a (restricted) measure.
pub fn best_plane_l2(
    mu: &PointCloudMeasure,
    m: usize,
    through: Option<&[f64]>,
) -> Result<(AffinePlane, f64)> {
    if mu.is_empty() {
        return Err(Error::Empty("best_plane_l2 needs at least one atom"));
    }
    check_dimension(m, mu.dim())?;
    if let Some(x) = through {
        mu.check_point(x)?;
    }
    let idx: Vec<usize> = (0..mu.len()).collect();
    Ok(best_plane_indices(mu, &idx, m, through))
}

/// Starting planes spanned by `m + 1` support atoms (`m` atoms and the forced
/// point when centred). Every subset when there are few, otherwise a fixed
/// pseudo-random selection so results stay reproducible.
fn atom_starts(
    mu: &PointCloudMeasure,
    indices: &[usize],
    m: usize,
    through: Option<&[f64]>,
) -> Vec<AffinePlane> {
    let support: Vec<usize> = indices
        .iter()
        .copied()
        .filter(|&i| mu.weight(i) > 0.0)
        .collect();
    let k = if through.is_some() { m } else { m + 1 };
    if support.len() < k {
        return Vec::new();
    }
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let total = (0..k).fold(1u128, |acc, j| {
        acc * (support.len() - j) as u128 / (j + 1) as u128
    });
    if total <= IRLS_MAX_STARTS as u128 {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            subsets.push(combo.iter().map(|&c| support[c]).collect());
            let Some(pos) = (0..k).rev().find(|&j| combo[j] < support.len() - k + j) else {
                break;
            };
            combo[pos] += 1;
            for j in pos + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..IRLS_MAX_STARTS {
            subsets.push(
                sample(&mut rng, support.len(), k)
                    .iter()
                    .map(|c| support[c])
                    .collect(),
            );
        }
    }
    subsets
        .into_iter()
        .filter_map(|subset| {
            let (base, rest) = match through {
                Some(x) => (x.to_vec(), &subset[..]),
                None => (mu.point(subset[0]).to_vec(), &subset[1..]),
            };
            let dirs: Vec<Vec<f64>> = rest
                .iter()
                .map(|&i| mu.point(i).iter().zip(&base).map(|(a, b)| a - b).collect())
                .collect();
            let plane = AffinePlane::spanned_by(base, &dirs);
            (plane.dim() == m).then_some(plane)
        })
        .collect()
}

/// Plain IRLS from one starting plane; returns the best plane visited.
fn irls_from(
    mu: &PointCloudMeasure,
    indices: &[usize],
    m: usize,
    p: f64,
    through: Option<&[f64]>,
    start: AffinePlane,
) -> (AffinePlane, f64) {
    let mut plane = start;
    let mut objective = lp_sum(mu, indices, &plane, p);
    let mut best = (plane.clone(), objective);
    let mut factors: Vec<f64> = Vec::new();
    for _ in 0..IRLS_MAX_ITER {
        if objective == 0.0 {
            break;
        }
        let fresh = indices.iter().map(|&i| {
            plane
                .distance_unchecked(mu.point(i))
                .max(IRLS_DIST_FLOOR)
                .powf(p - 2.0)
        });
        // Plain updates oscillate for p > 2; averaging with the previous weights damps them.
        factors = if p > 2.0 && !factors.is_empty() {
            fresh
                .zip(&factors)
                .map(|(f, old)| 0.5 * (f + old))
                .collect()
        } else {
            fresh.collect()
        };
        plane = fit_l2(mu, indices, Some(&factors), m, through);
        let next = lp_sum(mu, indices, &plane, p);
        if next < best.1 {
            best = (plane.clone(), next);
        }
        let change = (objective - next).abs() / objective.max(f64::MIN_POSITIVE);
        objective = next;
        if change < IRLS_TOLERANCE {
            break;
        }
    }
    best
}

/// Pattern search over small rotations of the plane (basis vector towards a
/// normal) and, without a forced point, shifts along the normals. Only
/// accepts strict improvements, so the result is never worse than `start`.
fn polish(
    mu: &PointCloudMeasure,
    indices: &[usize],
    p: f64,
    through: Option<&[f64]>,
    start: (AffinePlane, f64),
) -> (AffinePlane, f64) {
    let n = start.0.ambient_dim();
    let mut base = start.0.base().to_vec();
    let mut frame: Vec<Vec<f64>> = start.0.basis().to_vec();
    let m = frame.len();
    for axis in 0..n {
        if frame.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[axis] = 1.0;
        let mut candidate = frame.clone();
        candidate.push(e);
        let completed = AffinePlane::spanned_by(base.clone(), &candidate);
        if completed.dim() > frame.len() {
            frame = completed.basis().to_vec();
        }
    }
    let spread = indices
        .iter()
        .map(|&i| distance(mu.point(i), &base))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let evaluate = |base: &[f64], frame: &[Vec<f64>]| {
        let plane = AffinePlane::spanned_by(base.to_vec(), &frame[..m]);
        let value = lp_sum(mu, indices, &plane, p);
        (plane, value)
    };
    let mut best = start;
    let mut step = 0.05;
    let mut evaluations = 0;
    while step > POLISH_MIN_STEP && evaluations < POLISH_MAX_EVALUATIONS {
        let mut improved = false;
        for i in 0..m {
            for j in m..n {
                for sign in [1.0, -1.0] {
                    let (c, s) = ((sign * step).cos(), (sign * step).sin());
                    let mut trial = frame.clone();
                    trial[i] = frame[i]
                        .iter()
                        .zip(&frame[j])
                        .map(|(a, b)| c * a + s * b)
                        .collect();
                    trial[j] = frame[i]
                        .iter()
                        .zip(&frame[j])
                        .map(|(a, b)| -s * a + c * b)
                        .collect();
                    let candidate = evaluate(&base, &trial);
                    evaluations += 1;
                    if candidate.1 < best.1 {
                        best = candidate;
                        frame = trial;
                        improved = true;
                    }
                }
            }
        }
        if through.is_none() {
            for j in m..n {
                for sign in [1.0, -1.0] {
                    let shift = sign * step * spread;
                    let trial: Vec<f64> = base
                        .iter()
                        .zip(&frame[j])
                        .map(|(a, b)| a + shift * b)
                        .collect();
                    let candidate = evaluate(&trial, &frame);
                    evaluations += 1;
                    if candidate.1 < best.1 {
                        best = candidate;
                        base = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Multi-start IRLS for `min_L Σ w dist(y, L)^p`, started from the
/// least-squares plane and from planes through atoms, then polished by pattern search. Returns the best plane
/// visited and its objective, which is attained and therefore an upper bound
/// on the infimum.
fn best_plane_lp(
    mu: &PointCloudMeasure,
    indices: &[usize],
    m: usize,
    p: f64,
    through: Option<&[f64]>,
) -> (AffinePlane, f64) {
    let (plane, l2_residual) = best_plane_indices(mu, indices, m, through);
    if l2_residual == 0.0 {
        return (plane, 0.0);
    }
    let mut best = irls_from(mu, indices, m, p, through, plane);
    for start in atom_starts(mu, indices, m, through) {
        let candidate = irls_from(mu, indices, m, p, through, start);
        if candidate.1 < best.1 {
            best = candidate;
        }
    }
    polish(mu, indices, p, through, best)
}

/// `inf_L Σ w dist^p` over the atoms, with a minimising plane.
pub(crate) fn beta_numerator(
    mu: &PointCloudMeasure,
    indices: &[usize],
    params: &BetaParams,
    through: Option<&[f64]>,
) -> (AffinePlane, f64) {
    if params.is_exact() {
        best_plane_indices(mu, indices, params.m, through)
    } else {
        best_plane_lp(mu, indices, params.m, params.p, through)
    }
}

/// `β_{μ,p}(x, r)`, or the centred `β̊_{μ,p}(x, r)` when `params.centred`.
pub fn beta_ball(
    mu: &PointCloudMeasure,
    x: &[f64],
    r: f64,
    params: &BetaParams,
) -> Result<BetaValue> {
    params.validate(mu.dim())?;
    check_radius(r)?;
    let idx = mu.ball_indices(x, r)?;
    let exact = params.is_exact();
    if idx.is_empty() {
        return Ok(BetaValue { value: 0.0, exact });
    }
    let through = params.centred.then_some(x);
    let (_, numerator) = beta_numerator(mu, &idx, params, through);
    Ok(BetaValue {
        value: normalise(numerator, r, params.m, params.p),
        exact,
    })
}

/// Cube beta number and a minimising plane.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeBeta {
    pub value: f64,
    pub exact: bool,
    pub plane: AffinePlane,
}

/// `β_{μ,p}(Q)`. For an empty cube the value is 0 and the plane is the
/// coordinate plane through the cube centre. `params.centred` is ignored.
pub fn beta_cube(
    mu: &PointCloudMeasure,
    cube: &CubeRegion,
    params: &BetaParams,
) -> Result<CubeBeta> {
    params.validate(mu.dim())?;
    let idx = mu.cube_indices(cube)?;
    let exact = params.is_exact();
    if idx.is_empty() {
        return Ok(CubeBeta {
            value: 0.0,
            exact,
            plane: AffinePlane::coordinate(cube.center(), params.m),
        });
    }
    let (plane, numerator) = beta_numerator(mu, &idx, params, None);
    Ok(CubeBeta {
        value: normalise(numerator, cube.side, params.m, params.p),
        exact,
        plane,
    })
}

/// One interval `[r_lo, r_hi)` of a scale profile on which the ball contents
/// do not change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileInterval {
    pub r_lo: f64,
    pub r_hi: f64,
    /// `μ(B̄(x, r))` for `r` in the interval.
    pub mass: f64,
    /// `inf_L Σ w dist(y, L)^p` over the ball, under the centring constraint if any.
    pub beta_numerator: f64,
    pub exact: bool,
}

/// Piecewise closed form of `Θ^m(μ, x, r)` and `β(x, r)^p` for `0 < r <= rho`.
///
/// On each interval `β^p = C r^{-p-m}` and `Θ^m = M / (ω_m r^m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleProfile {
    pub center: Vec<f64>,
    pub rho: f64,
    pub params: BetaParams,
    /// Sorted distinct positive atom distances from the centre that are `<= rho`.
    pub breakpoints: Vec<f64>,
    pub intervals: Vec<ProfileInterval>,
}

impl ScaleProfile {
    pub fn interval_at(&self, r: f64) -> Option<&ProfileInterval> {
        if !(r > 0.0 && r <= self.rho) {
            return None;
        }
        let k = self.breakpoints.partition_point(|&b| b <= r);
        self.intervals.get(k)
    }

    /// `β(x, r)^p` from the closed form.
    pub fn beta_pow(&self, r: f64) -> Option<f64> {
        let m = self.params.m as f64;
        self.interval_at(r)
            .map(|iv| iv.beta_numerator * r.powf(-self.params.p - m))
    }

    pub fn beta(&self, r: f64) -> Option<f64> {
        self.interval_at(r)
            .map(|iv| normalise(iv.beta_numerator, r, self.params.m, self.params.p))
    }

    /// `Θ^m(μ, x, r)` from the closed form.
    pub fn theta(&self, r: f64) -> Option<f64> {
        let m = self.params.m;
        self.interval_at(r)
            .map(|iv| iv.mass / (unit_ball_volume(m) * r.powi(m as i32)))
    }

    pub fn is_exact(&self) -> bool {
        self.intervals.iter().all(|iv| iv.exact)
    }
}

/// Build the scale profile of `mu` around `x` up to radius `rho` (may be infinite).
pub fn scale_profile(
    mu: &PointCloudMeasure,
    x: &[f64],
    rho: f64,
    params: &BetaParams,
) -> Result<ScaleProfile> {
    params.validate(mu.dim())?;
    mu.check_point(x)?;
    if rho.is_nan() || rho <= 0.0 {
        return Err(Error::invalid("profile radius must be positive"));
    }
    let mut by_distance: Vec<(f64, usize)> = (0..mu.len())
        .map(|i| (distance(mu.point(i), x), i))
        .filter(|&(d, _)| d <= rho)
        .collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut breakpoints: Vec<f64> = Vec::new();
    // counts[k]: number of sorted atoms inside the ball on interval k.
    let mut counts: Vec<usize> = Vec::new();
    let mut k = 0;
    while k < by_distance.len() && by_distance[k].0 == 0.0 {
        k += 1;
    }
    counts.push(k);
    while k < by_distance.len() {
        let d = by_distance[k].0;
        while k < by_distance.len() && by_distance[k].0 == d {
            k += 1;
        }
        breakpoints.push(d);
        counts.push(k);
    }
    let through = params.centred.then_some(x);
    let exact = params.is_exact();
    let intervals: Vec<ProfileInterval> = counts
        .par_iter()
        .enumerate()
        .map(|(j, &count)| {
            let mut idx: Vec<usize> = by_distance[..count].iter().map(|&(_, i)| i).collect();
            idx.sort_unstable();
            let r_lo = if j == 0 { 0.0 } else { breakpoints[j - 1] };
            let r_hi = breakpoints.get(j).copied().unwrap_or(rho);
            let beta_numerator = if idx.is_empty() {
                0.0
            } else {
                beta_numerator(mu, &idx, params, through).1
            };
            ProfileInterval {
                r_lo,
                r_hi,
                mass: mu.mass_of(&idx),
                beta_numerator,
                exact,
            }
        })
        .collect();

    Ok(ScaleProfile {
        center: x.to_vec(),
        rho,
        params: *params,
        breakpoints,
        intervals,
    })
}
