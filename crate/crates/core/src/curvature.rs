//! Discrete curvature `K^α_{μ,p}(x, R)`, the restricted integrand `E(x, y)`,
//! a Monte Carlo estimator of `K`, and the global functional `M_p`.
//!
//! Exact evaluation enumerates ordered tuples of atoms with repetition in
//! lexicographic index order. Each first index is summed independently and the
//! per-index partial sums are combined with a fixed pairwise tree, so results
//! are bit-identical regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, WeightedAliasIndex};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{diam, distance, h_min_unchecked, kappa};
use crate::measure::{check_dimension, PointCloudMeasure};
use crate::sum::{pairwise_sum, NeumaierSum};

/// Default cap on the number of enumerated tuples.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureParams {
    pub m: usize,
    pub p: f64,
    pub alpha: f64,
    /// Ball radius; `f64::INFINITY` integrates over the whole measure.
    pub radius: f64,
}

impl CurvatureParams {
    pub fn new(m: usize, p: f64, alpha: f64, radius: f64) -> Self {
        Self {
            m,
            p,
            alpha,
            radius,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_dimension(self.m, n)?;
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::invalid(format!(
                "exponent p = {} must lie in [1, inf)",
                self.p
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha = {} must lie in [0, 1]",
                self.alpha
            )));
        }
        if self.radius.is_nan() || self.radius <= 0.0 {
            return Err(Error::invalid("curvature radius must be positive"));
        }
        Ok(())
    }

    /// Exponent of the diameter in the integrand denominator.
    pub fn diam_exponent(&self) -> f64 {
        let m = self.m as f64;
        m * (m + 1.0) + (1.0 + self.alpha) * self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureEstimate {
    pub value: f64,
    pub stderr: f64,
    pub terms_or_samples: u64,
    pub method: Method,
}

/// `h_min^p / diam^{m(m+1) + (1+α)p}` for the tuple `(x_0, ..., x_{m+1})`.
pub fn k_integrand<P: AsRef<[f64]>>(tuple: &[P], params: &CurvatureParams) -> Result<f64> {
    if tuple.len() != params.m + 2 {
        return Err(Error::invalid(format!(
            "curvature integrand needs m + 2 = {} points, got {}",
            params.m + 2,
            tuple.len()
        )));
    }
    Ok(k_term(tuple, params))
}

fn k_term<P: AsRef<[f64]>>(tuple: &[P], params: &CurvatureParams) -> f64 {
    let d = diam(tuple);
    if d == 0.0 {
        return 0.0;
    }
    let h = h_min_unchecked(tuple);
    if h == 0.0 {
        return 0.0;
    }
    h.powf(params.p) / d.powf(params.diam_exponent())
}

fn tuple_count(count: usize, arity: usize) -> u128 {
    (count as u128).saturating_pow(arity as u32)
}

fn check_budget(count: usize, arity: usize, budget: u64) -> Result<u64> {
    let terms = tuple_count(count, arity);
    if terms > budget as u128 {
        return Err(Error::BudgetExceeded { terms, budget });
    }
    Ok(terms as u64)
}

/// Σ over ordered `arity`-tuples of `0..count` (with repetition) of `term`.
pub(crate) fn ordered_tuple_sum<F>(count: usize, arity: usize, term: F) -> f64
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    if arity == 0 {
        return term(&[]);
    }
    let blocks: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|first| {
            let mut tuple = vec![0usize; arity];
            tuple[0] = first;
            let mut acc = NeumaierSum::new();
            loop {
                acc.add(term(&tuple));
                let mut k = arity - 1;
                loop {
                    if k == 0 {
                        return acc.value();
                    }
                    tuple[k] += 1;
                    if tuple[k] < count {
                        break;
                    }
                    tuple[k] = 0;
                    k -= 1;
                }
            }
        })
        .collect();
    pairwise_sum(&blocks)
}

fn has_repeat(tuple: &[usize]) -> bool {
    tuple
        .iter()
        .enumerate()
        .any(|(i, a)| tuple[i + 1..].contains(a))
}

/// Exact `K^α_{μ,p}(x, R)` by enumeration of all ordered `(m+1)`-tuples of atoms
/// in the closed ball. Refuses when the tuple count exceeds `budget`.
pub fn curvature_exact(
    mu: &PointCloudMeasure,
    x: &[f64],
    params: &CurvatureParams,
    budget: u64,
) -> Result<CurvatureEstimate> {
    params.validate(mu.dim())?;
    let ball = mu.ball_indices(x, params.radius)?;
    let arity = params.m + 1;
    let terms = check_budget(ball.len(), arity, budget)?;
    let value = ordered_tuple_sum(ball.len(), arity, |t| {
        // Repeated atoms make the simplex degenerate, so the term is exactly 0.
        if has_repeat(t) {
            return 0.0;
        }
        let w: f64 = t.iter().map(|&k| mu.weight(ball[k])).product();
        if w == 0.0 {
            return 0.0;
        }
        let mut pts: Vec<&[f64]> = Vec::with_capacity(arity + 1);
        pts.push(x);
        pts.extend(t.iter().map(|&k| mu.point(ball[k])));
        w * k_term(&pts, params)
    });
    Ok(CurvatureEstimate {
        value,
        stderr: 0.0,
        terms_or_samples: terms,
        method: Method::Exact,
    })
}

/// `E(x, y)`: the sum over ordered `m`-tuples `z` of atoms with
/// `|z_j - x| <= |y - x|` of `k_integrand(x, y, z_1, ..., z_m)`.
pub fn e_integrand(
    mu: &PointCloudMeasure,
    x: &[f64],
    y: &[f64],
    params: &CurvatureParams,
    budget: u64,
) -> Result<f64> {
    params.validate(mu.dim())?;
    mu.check_point(y)?;
    let reach = distance(x, y);
    if reach == 0.0 {
        return Err(Error::invalid("E(x, y) is undefined for y = x"));
    }
    let near = mu.ball_indices(x, reach)?;
    let arity = params.m;
    check_budget(near.len(), arity, budget)?;
    Ok(ordered_tuple_sum(near.len(), arity, |t| {
        if has_repeat(t) {
            return 0.0;
        }
        let w: f64 = t.iter().map(|&k| mu.weight(near[k])).product();
        if w == 0.0 {
            return 0.0;
        }
        let mut pts: Vec<&[f64]> = Vec::with_capacity(arity + 2);
        pts.push(x);
        pts.push(y);
        pts.extend(t.iter().map(|&k| mu.point(near[k])));
        w * k_term(&pts, params)
    }))
}

/// Unbiased Monte Carlo estimate of `K^α_{μ,p}(x, R)`.
///
/// Each of `x_1, ..., x_{m+1}` is drawn independently from the ball atoms with
/// probability proportional to weight; the estimate is `μ(ball)^{m+1}` times the
/// sample mean of the integrand.
pub fn curvature_mc(
    mu: &PointCloudMeasure,
    x: &[f64],
    params: &CurvatureParams,
    samples: u64,
    seed: u64,
) -> Result<CurvatureEstimate> {
    params.validate(mu.dim())?;
    if samples < 2 {
        return Err(Error::invalid("Monte Carlo needs at least 2 samples"));
    }
    let ball = mu.ball_indices(x, params.radius)?;
    let weights: Vec<f64> = ball.iter().map(|&i| mu.weight(i)).collect();
    let mass = mu.mass_of(&ball);
    if ball.is_empty() || mass <= 0.0 {
        return Err(Error::Empty("ball carries no mass"));
    }
    let alias = WeightedAliasIndex::new(weights)
        .map_err(|e| Error::invalid(format!("cannot build sampling table: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arity = params.m + 1;
    let mut sum = NeumaierSum::new();
    let mut sum_sq = NeumaierSum::new();
    let mut pts: Vec<&[f64]> = Vec::with_capacity(arity + 1);
    for _ in 0..samples {
        pts.clear();
        pts.push(x);
        for _ in 0..arity {
            pts.push(mu.point(ball[alias.sample(&mut rng)]));
        }
        let v = k_term(&pts, params);
        sum.add(v);
        sum_sq.add(v * v);
    }
    let n = samples as f64;
    let mean = sum.value() / n;
    let var = ((sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
    let scale = mass.powi(arity as i32);
    Ok(CurvatureEstimate {
        value: scale * mean,
        stderr: scale * (var / n).sqrt(),
        terms_or_samples: samples,
        method: Method::MonteCarlo,
    })
}

/// `M_p(μ)`: the sum over all ordered `(m+2)`-tuples of atoms of `κ^p / diam^p`.
pub fn m_p_functional(mu: &PointCloudMeasure, p: f64, m: usize, budget: u64) -> Result<f64> {
    check_dimension(m, mu.dim())?;
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::invalid(format!(
            "exponent p = {p} must lie in [1, inf)"
        )));
    }
    let arity = m + 2;
    check_budget(mu.len(), arity, budget)?;
    Ok(ordered_tuple_sum(mu.len(), arity, |t| {
        if has_repeat(t) {
            return 0.0;
        }
        let w: f64 = t.iter().map(|&k| mu.weight(k)).product();
        if w == 0.0 {
            return 0.0;
        }
        let pts: Vec<&[f64]> = t.iter().map(|&k| mu.point(k)).collect();
        let d = diam(&pts);
        if d == 0.0 {
            return 0.0;
        }
        w * (kappa(&pts) / d).powf(p)
    }))
}

/// Ingredients of the comparison between `M_p` and the integrated curvature
/// with `α = 1 - m(m+1)/p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaComparison {
    pub m_p: f64,
    /// `∫ K^α_{μ,p}(x, ∞) dμ(x)`.
    pub integrated_curvature: f64,
    /// Largest `κ diam / h_min` over non-degenerate tuples of the measure.
    pub gamma_estimate: f64,
    /// `m_p / integrated_curvature`, 0 when both vanish.
    pub ratio: f64,
}

/// Evaluates both sides of `M_p(μ) <= Γ^p ∫ K^α(x, ∞) dμ(x)` together with the
/// empirical constant `Γ` over the tuples of `mu`. Requires `p >= m(m+1)`.
pub fn kappa_comparison(
    mu: &PointCloudMeasure,
    p: f64,
    m: usize,
    budget: u64,
) -> Result<KappaComparison> {
    let threshold = (m * (m + 1)) as f64;
    if p < threshold {
        return Err(Error::invalid(format!(
            "p = {p} must be at least m(m+1) = {threshold}"
        )));
    }
    let alpha = 1.0 - threshold / p;
    let m_p = m_p_functional(mu, p, m, budget)?;
    let params = CurvatureParams::new(m, p, alpha, f64::INFINITY);
    check_budget(mu.len(), m + 2, budget)?;
    let mut per_atom = Vec::with_capacity(mu.len());
    for (x, w) in mu.atoms() {
        per_atom.push(w * curvature_exact(mu, x, &params, budget)?.value);
    }
    let integrated_curvature = pairwise_sum(&per_atom);

    let arity = m + 2;
    let count = mu.len();
    let gamma_estimate = (0..count)
        .into_par_iter()
        .map(|first| {
            let mut best = 0.0_f64;
            let mut tuple = vec![0usize; arity];
            tuple[0] = first;
            loop {
                if !has_repeat(&tuple) {
                    let pts: Vec<&[f64]> = tuple.iter().map(|&k| mu.point(k)).collect();
                    let h = h_min_unchecked(&pts);
                    if h > 0.0 {
                        best = best.max(kappa(&pts) * diam(&pts) / h);
                    }
                }
                let mut k = arity - 1;
                loop {
                    if k == 0 {
                        return best;
                    }
                    tuple[k] += 1;
                    if tuple[k] < count {
                        break;
                    }
                    tuple[k] = 0;
                    k -= 1;
                }
            }
        })
        .reduce(|| 0.0, f64::max);
    let ratio = if integrated_curvature == 0.0 {
        if m_p == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        m_p / integrated_curvature
    };
    Ok(KappaComparison {
        m_p,
        integrated_curvature,
        gamma_estimate,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> PointCloudMeasure {
        PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]]).unwrap()
    }

    fn params(m: usize) -> CurvatureParams {
        CurvatureParams::new(m, 2.0, 0.0, f64::INFINITY)
    }

    #[test]
    fn integrand_examples() {
        let v = k_integrand(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]], &params(1)).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        assert_eq!(
            k_integrand(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]], &params(1)).unwrap(),
            0.0
        );
        assert_eq!(
            k_integrand(&[[0.0, 0.0], [1.0, 1.0], [3.0, 3.0]], &params(1)).unwrap(),
            0.0
        );
        assert_eq!(k_integrand(&[[0.0, 0.0]; 3], &params(1)).unwrap(), 0.0);
        assert!(k_integrand(&[[0.0, 0.0]; 2], &params(1)).is_err());
    }

    #[test]
    fn exact_triangle_is_one_half() {
        let k = curvature_exact(&tri(), &[0.0, 0.0], &params(1), DEFAULT_BUDGET).unwrap();
        assert!((k.value - 0.5).abs() < 1e-12);
        assert_eq!(k.method, Method::Exact);
        assert_eq!(k.stderr, 0.0);
        assert_eq!(k.terms_or_samples, 9);
    }

    #[test]
    fn flat_measure_has_zero_curvature() {
        let line = PointCloudMeasure::unit(2, &[[0.0, 0.0], [0.3, 0.6], [1.0, 2.0], [-0.5, -1.0]])
            .unwrap();
        assert_eq!(
            curvature_exact(&line, &[0.0, 0.0], &params(1), DEFAULT_BUDGET)
                .unwrap()
                .value,
            0.0
        );
        let far = CurvatureParams::new(1, 2.0, 0.0, 0.1);
        assert_eq!(
            curvature_exact(&tri(), &[5.0, 5.0], &far, DEFAULT_BUDGET)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn budget_is_enforced() {
        let err = curvature_exact(&tri(), &[0.0, 0.0], &params(1), 8).unwrap_err();
        assert!(matches!(
            err,
            Error::BudgetExceeded {
                terms: 9,
                budget: 8
            }
        ));
    }

    #[test]
    fn e_integrand_example() {
        let e = e_integrand(&tri(), &[0.0, 0.0], &[1.0, 0.0], &params(1), DEFAULT_BUDGET).unwrap();
        assert!((e - 0.25).abs() < 1e-15);
        assert!(e_integrand(&tri(), &[0.0, 0.0], &[0.0, 0.0], &params(1), DEFAULT_BUDGET).is_err());
        let line = PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        let e = e_integrand(&line, &[0.0, 0.0], &[9.0, 0.0], &params(1), DEFAULT_BUDGET).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn monte_carlo_contracts() {
        let a = curvature_mc(&tri(), &[0.0, 0.0], &params(1), 100_000, 42).unwrap();
        let b = curvature_mc(&tri(), &[0.0, 0.0], &params(1), 100_000, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.method, Method::MonteCarlo);
        assert!((a.value - 0.5).abs() <= 4.0 * a.stderr);

        let line = PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        let z = curvature_mc(&line, &[0.0, 0.0], &params(1), 1000, 1).unwrap();
        assert_eq!((z.value, z.stderr), (0.0, 0.0));

        assert!(curvature_mc(&tri(), &[0.0, 0.0], &params(1), 1, 1).is_err());
        let tiny = CurvatureParams::new(1, 2.0, 0.0, 0.1);
        assert!(curvature_mc(&tri(), &[5.0, 5.0], &tiny, 10, 1).is_err());
    }

    #[test]
    fn m_p_examples() {
        let h = 3f64.sqrt() / 2.0;
        let eq = PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
        assert!((m_p_functional(&eq, 2.0, 1, DEFAULT_BUDGET).unwrap() - 9.0 / 8.0).abs() < 1e-14);
        let line = PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(m_p_functional(&line, 2.0, 1, DEFAULT_BUDGET).unwrap(), 0.0);
        let one = PointCloudMeasure::unit(2, &[[0.0, 0.0]]).unwrap();
        assert_eq!(m_p_functional(&one, 2.0, 1, DEFAULT_BUDGET).unwrap(), 0.0);
    }

    #[test]
    fn kappa_comparison_on_small_cloud() {
        let mu = PointCloudMeasure::new(
            2,
            &[[0.0, 0.0], [1.0, 0.2], [0.3, 0.9], [0.7, 0.5], [0.1, 0.4]],
            vec![1.0, 0.5, 2.0, 1.5, 0.25],
        )
        .unwrap();
        let c = kappa_comparison(&mu, 2.0, 1, DEFAULT_BUDGET).unwrap();
        assert!(c.gamma_estimate >= 0.5);
        assert!(c.ratio <= c.gamma_estimate.powf(2.0) * (1.0 + 1e-12));
        assert!(kappa_comparison(&mu, 1.0, 1, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn tuple_sum_visits_every_tuple_once() {
        let total = ordered_tuple_sum(4, 3, |t| (t[0] * 16 + t[1] * 4 + t[2]) as f64);
        assert_eq!(total, (0..64).sum::<usize>() as f64);
        assert_eq!(ordered_tuple_sum(0, 2, |_| 1.0), 0.0);
        assert_eq!(ordered_tuple_sum(5, 1, |_| 1.0), 5.0);
    }
}
