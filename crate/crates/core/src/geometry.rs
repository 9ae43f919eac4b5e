//! Affine planes and simplex quantities: hulls, distances, minimal heights,
//! simplex volumes, Menger curvature and the normalised volume `kappa`.
//!
//! Degeneracy is decided once, by a singular-value rank test on the edge
//! vectors of a tuple, and degenerate tuples get exact zeros. That keeps the
//! curvature integrands exactly zero on measures supported in a plane.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative singular-value cutoff used for every rank decision.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Tolerance for orthonormality of plane bases.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-12;

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Number of singular values above `RANK_TOLERANCE * (largest + 1)`.
pub fn numerical_rank(singular_values: &[f64]) -> usize {
    let largest = singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_TOLERANCE * (largest + 1.0);
    singular_values.iter().filter(|&&s| s > cutoff).count()
}

fn edge_matrix<P: AsRef<[f64]>>(points: &[P]) -> DMatrix<f64> {
    let base = points[0].as_ref();
    let n = base.len();
    DMatrix::from_fn(points.len() - 1, n, |i, j| {
        points[i + 1].as_ref()[j] - base[j]
    })
}

fn singular_values<P: AsRef<[f64]>>(points: &[P]) -> Vec<f64> {
    if points.len() < 2 {
        return Vec::new();
    }
    edge_matrix(points)
        .singular_values()
        .iter()
        .copied()
        .collect()
}

/// True when the points are affinely independent under the rank cutoff.
pub fn affinely_independent<P: AsRef<[f64]>>(points: &[P]) -> bool {
    if points.len() <= 1 {
        return !points.is_empty();
    }
    let sv = singular_values(points);
    numerical_rank(&sv) == points.len() - 1
}

/// An affine plane stored as a base point and an orthonormal direction basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePlane {
    base: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl AffinePlane {
    pub fn new(base: Vec<f64>, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = base.len();
        if base.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("plane base must be finite"));
        }
        for (i, u) in basis.iter().enumerate() {
            if u.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: u.len(),
                });
            }
            for (j, v) in basis.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot(u, v) - expected).abs() > ORTHONORMAL_TOLERANCE {
                    return Err(Error::invalid("plane basis is not orthonormal"));
                }
            }
        }
        if basis.len() > n {
            return Err(Error::invalid("plane dimension exceeds ambient dimension"));
        }
        Ok(Self { base, basis })
    }

    /// Orthonormalises arbitrary spanning directions. Directions that are
    /// dependent on earlier ones are dropped.
    pub fn spanned_by(base: Vec<f64>, directions: &[Vec<f64>]) -> Self {
        let basis = gram_schmidt(directions);
        Self { base, basis }
    }

    /// The plane through `base` spanned by the first `dim` coordinate axes.
    pub fn coordinate(base: Vec<f64>, dim: usize) -> Self {
        let n = base.len();
        let basis = (0..dim.min(n))
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        Self { base, basis }
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// Distance without the dimension check; callers guarantee `y.len() == ambient_dim`.
    pub(crate) fn distance_unchecked(&self, y: &[f64]) -> f64 {
        let mut v = sub(y, &self.base);
        for u in &self.basis {
            let c = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        norm(&v)
    }

    /// The same plane translated by `offset`.
    pub fn translated(&self, offset: &[f64]) -> Self {
        Self {
            base: self.base.iter().zip(offset).map(|(a, b)| a + b).collect(),
            basis: self.basis.clone(),
        }
    }
}

/// Modified Gram-Schmidt with one re-orthogonalisation pass.
fn gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let scale = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = dot(&w, u);
                w.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
            }
        }
        let len = norm(&w);
        if len > RANK_TOLERANCE * (scale + 1.0) {
            w.iter_mut().for_each(|a| *a /= len);
            out.push(w);
        }
    }
    out
}

/// Smallest affine plane containing `points`, with dimension decided by the
/// singular-value rank cutoff.
pub fn affine_hull<P: AsRef<[f64]>>(points: &[P]) -> Result<AffinePlane> {
    let first = points
        .first()
        .ok_or(Error::Empty("affine_hull needs at least one point"))?;
    let n = first.as_ref().len();
    for p in points {
        if p.as_ref().len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.as_ref().len(),
            });
        }
    }
    let base = first.as_ref().to_vec();
    if points.len() == 1 {
        return Ok(AffinePlane {
            base,
            basis: Vec::new(),
        });
    }
    let svd = edge_matrix(points).svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let rank = numerical_rank(&sv);
    // nalgebra does not promise sorted singular values.
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let directions: Vec<Vec<f64>> = order[..rank]
        .iter()
        .map(|&i| v_t.row(i).iter().copied().collect())
        .collect();
    Ok(AffinePlane {
        base,
        basis: gram_schmidt(&directions),
    })
}

pub fn dist_to_plane(y: &[f64], plane: &AffinePlane) -> Result<f64> {
    if y.len() != plane.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: plane.ambient_dim(),
            got: y.len(),
        });
    }
    Ok(plane.distance_unchecked(y))
}

/// Largest pairwise distance; 0 for fewer than two points.
pub fn diam<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let mut best = 0.0_f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(distance(a.as_ref(), b.as_ref()));
        }
    }
    best
}

/// Minimal height of the simplex spanned by `m + 2` points.
pub fn h_min<P: AsRef<[f64]>>(points: &[P], m: usize) -> Result<f64> {
    if points.len() != m + 2 {
        return Err(Error::invalid(format!(
            "h_min needs exactly m + 2 = {} points, got {}",
            m + 2,
            points.len()
        )));
    }
    Ok(h_min_unchecked(points))
}

pub(crate) fn h_min_unchecked<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    if !affinely_independent(points) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for j in 0..points.len() {
        let others: Vec<&[f64]> = points
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, p)| p.as_ref())
            .collect();
        let base = others[0];
        let dirs: Vec<Vec<f64>> = others[1..].iter().map(|p| sub(p, base)).collect();
        let plane = AffinePlane {
            base: base.to_vec(),
            basis: gram_schmidt(&dirs),
        };
        best = best.min(plane.distance_unchecked(points[j].as_ref()));
    }
    best
}

/// k-dimensional volume of the simplex on `k + 1` vertices; 0 when degenerate.
pub fn simplex_measure<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    match points.len() {
        0 => 0.0,
        1 => 1.0,
        len => {
            let k = len - 1;
            let sv = singular_values(points);
            if numerical_rank(&sv) < k {
                return 0.0;
            }
            let factorial: f64 = (1..=k).map(|i| i as f64).product();
            sv.iter().product::<f64>() / factorial
        }
    }
}

/// Menger curvature `4 * area / (|x-y| |y-z| |z-x|)`, the reciprocal circumradius.
pub fn menger_c(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let sides = distance(x, y) * distance(y, z) * distance(z, x);
    if sides == 0.0 {
        return 0.0;
    }
    let area = simplex_measure(&[x, y, z]);
    4.0 * area / sides
}

/// `H^{k}(simplex) / diam^{k}` for a tuple of `k + 1` points.
pub fn kappa<P: AsRef<[f64]>>(points: &[P]) -> f64 {
    let d = diam(points);
    if d == 0.0 || points.len() < 2 {
        return 0.0;
    }
    simplex_measure(points) / d.powi(points.len() as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn hull_of_collinear_points_is_a_line() {
        let h = affine_hull(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        assert_eq!(h.dim(), 1);
        assert!(close(h.basis()[0][0].abs(), 1.0, 1e-14));
        assert!(h.basis()[0][1].abs() < 1e-14);
    }

    #[test]
    fn hull_of_three_points_in_space_is_xy_plane() {
        let h = affine_hull(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(h.dim(), 2);
        assert!(close(
            dist_to_plane(&[3.0, -2.0, 1.0], &h).unwrap(),
            1.0,
            1e-14
        ));
        assert!(dist_to_plane(&[0.3, 0.4, 0.0], &h).unwrap() < 1e-15);
    }

    #[test]
    fn hull_of_single_point() {
        let h = affine_hull(&[[1.0, 2.0]]).unwrap();
        assert_eq!(h.dim(), 0);
        assert_eq!(h.base(), &[1.0, 2.0]);
        let empty: [[f64; 2]; 0] = [];
        assert!(matches!(affine_hull(&empty), Err(Error::Empty(_))));
    }

    #[test]
    fn distances_to_planes() {
        let xy = AffinePlane::coordinate(vec![0.0; 3], 2);
        assert_eq!(dist_to_plane(&[0.0, 0.0, 1.0], &xy).unwrap(), 1.0);
        let x_axis = AffinePlane::coordinate(vec![0.0; 2], 1);
        assert_eq!(dist_to_plane(&[3.0, 4.0], &x_axis).unwrap(), 4.0);
        assert_eq!(dist_to_plane(&[3.0, 0.0], &x_axis).unwrap(), 0.0);
        assert!(matches!(
            dist_to_plane(&[1.0], &x_axis),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn plane_constructor_rejects_non_orthonormal_basis() {
        assert!(AffinePlane::new(vec![0.0, 0.0], vec![vec![1.0, 1.0]]).is_err());
        assert!(AffinePlane::new(vec![0.0, 0.0], vec![vec![0.6, 0.8]]).is_ok());
    }

    #[test]
    fn diameters() {
        assert_eq!(diam(&[[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]]), 5.0);
        assert_eq!(diam(&[[1.0, 1.0]]), 0.0);
        assert_eq!(diam(&[[1.0, 1.0], [1.0, 1.0]]), 0.0);
    }

    #[test]
    fn h_min_examples() {
        let t = [[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]];
        assert!(close(h_min(&t, 1).unwrap(), 2.4, 1e-14));
        let tet = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        assert!(close(h_min(&tet, 2).unwrap(), 1.0 / 3f64.sqrt(), 1e-14));
        let flat = [
            [0.0, 0.0, 5.0],
            [1.0, 2.0, 5.0],
            [3.0, -1.0, 5.0],
            [7.0, 7.0, 5.0],
        ];
        assert_eq!(h_min(&flat, 2).unwrap(), 0.0);
        let repeated = [[0.0, 0.0], [1.0, 1.0], [1.0, 1.0]];
        assert_eq!(h_min(&repeated, 1).unwrap(), 0.0);
        assert!(h_min(&t, 2).is_err());
    }

    #[test]
    fn simplex_measures() {
        assert!(close(
            simplex_measure(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            0.5,
            1e-14
        ));
        let tet = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        assert!(close(simplex_measure(&tet), 1.0 / 6.0, 1e-14));
        assert_eq!(simplex_measure(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]), 0.0);
        assert!(close(
            simplex_measure(&[[0.0, 0.0], [3.0, 4.0]]),
            5.0,
            1e-14
        ));
    }

    #[test]
    fn menger_curvature_examples() {
        let c = menger_c(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]);
        assert!(close(c, 2f64.sqrt(), 1e-14));
        assert_eq!(menger_c(&[0.0, 0.0], &[1.0, 1.0], &[3.0, 3.0]), 0.0);
        assert_eq!(menger_c(&[0.0, 0.0], &[0.0, 0.0], &[3.0, 3.0]), 0.0);
    }

    #[test]
    fn kappa_examples() {
        let eq = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
        assert!(close(kappa(&eq), 3f64.sqrt() / 4.0, 1e-14));
        assert_eq!(kappa(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]), 0.0);
        assert_eq!(kappa(&[[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]), 0.0);
    }
}
