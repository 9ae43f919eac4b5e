//! Finite atomic measures, balls, dyadic cubes and the mass queries on them.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Read;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::distance;
use crate::index::KdTree;
use crate::sum::{compensated_sum, pairwise_sum};

/// Lebesgue measure of the unit ball in `R^m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / m as f64 * unit_ball_volume(m - 2),
    }
}

pub(crate) fn check_dimension(m: usize, n: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::invalid(format!(
            "plane dimension m = {m} must satisfy 0 < m < n = {n}"
        )));
    }
    Ok(())
}

/// A finite weighted sum of point masses in `R^n`.
#[derive(Debug, Clone)]
pub struct PointCloudMeasure {
    dim: usize,
    positions: Vec<f64>,
    weights: Vec<f64>,
    total_mass: f64,
    index: KdTree,
}

impl PartialEq for PointCloudMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.positions == other.positions && self.weights == other.weights
    }
}

impl PointCloudMeasure {
    pub fn new<P: AsRef<[f64]>>(dim: usize, points: &[P], weights: Vec<f64>) -> Result<Self> {
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            flat.extend_from_slice(p);
        }
        Self::from_flat(dim, flat, weights)
    }

    /// Unit weights on every point.
    pub fn unit<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        Self::new(dim, points, vec![1.0; points.len()])
    }

    pub fn from_flat(dim: usize, positions: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ambient dimension must be at least 1"));
        }
        if positions.len() != weights.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: weights.len() * dim,
                got: positions.len(),
            });
        }
        if positions.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("atom coordinates must be finite"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid(
                "atom weights must be finite and non-negative",
            ));
        }
        let total_mass = pairwise_sum(&weights);
        let index = KdTree::build(&positions, dim);
        Ok(Self {
            dim,
            positions,
            weights,
            total_mass,
            index,
        })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Self::from_flat(dim, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.positions
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(())
    }

    /// Indices of atoms in the closed ball, ascending. An infinite radius selects every atom.
    pub fn ball_indices(&self, center: &[f64], radius: f64) -> Result<Vec<usize>> {
        self.check_point(center)?;
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::invalid("ball radius must be non-negative"));
        }
        if radius == f64::INFINITY {
            return Ok((0..self.len()).collect());
        }
        Ok(self.index.within_ball(&self.positions, center, radius))
    }

    pub fn ball_restrict(&self, ball: &Ball) -> Result<Self> {
        let idx = self.ball_indices(&ball.center, ball.radius)?;
        Ok(self.subset(&idx))
    }

    pub fn ball_mass(&self, center: &[f64], radius: f64) -> Result<f64> {
        let idx = self.ball_indices(center, radius)?;
        Ok(self.mass_of(&idx))
    }

    /// Indices of atoms in the half-open cube region, ascending.
    pub fn cube_indices(&self, cube: &CubeRegion) -> Result<Vec<usize>> {
        self.check_point(&cube.lower)?;
        let hi = cube.upper();
        Ok(self.index.within_box(&self.positions, &cube.lower, &hi))
    }

    pub fn cube_restrict(&self, cube: &CubeRegion) -> Result<Self> {
        let idx = self.cube_indices(cube)?;
        Ok(self.subset(&idx))
    }

    pub fn mass_of(&self, indices: &[usize]) -> f64 {
        compensated_sum(indices.iter().map(|&i| self.weights[i]))
    }

    /// Sub-measure on the given atoms, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut positions = Vec::with_capacity(indices.len() * self.dim);
        let mut weights = Vec::with_capacity(indices.len());
        for &i in indices {
            positions.extend_from_slice(self.point(i));
            weights.push(self.weights[i]);
        }
        let total_mass = pairwise_sum(&weights);
        let index = KdTree::build(&positions, self.dim);
        Self {
            dim: self.dim,
            positions,
            weights,
            total_mass,
            index,
        }
    }
}

/// Closed ball `{ y : |y - center| <= radius }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("ball radius must be finite and positive"));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        distance(y, &self.center) <= self.radius
    }
}

/// Dyadic cube `2^{-level} (corner + [0,1)^n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicCube {
    pub level: i32,
    pub corner: Vec<i64>,
}

impl DyadicCube {
    pub fn new(level: i32, corner: Vec<i64>) -> Self {
        Self { level, corner }
    }

    /// The level-`level` cube containing `y`.
    pub fn containing(y: &[f64], level: i32) -> Self {
        let scale = 2f64.powi(level);
        let corner = y.iter().map(|v| (v * scale).floor() as i64).collect();
        Self { level, corner }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    /// Side length `l(Q) = 2^{-level}`.
    pub fn side(&self) -> f64 {
        2f64.powi(-self.level)
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        let scale = 2f64.powi(self.level);
        y.len() == self.corner.len()
            && y.iter()
                .zip(&self.corner)
                .all(|(v, &a)| (v * scale).floor() as i64 == a)
    }

    pub fn region(&self) -> CubeRegion {
        let side = self.side();
        CubeRegion {
            lower: self.corner.iter().map(|&a| a as f64 * side).collect(),
            side,
        }
    }
}

/// Axis-aligned half-open cube `lower + [0, side)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeRegion {
    pub lower: Vec<f64>,
    pub side: f64,
}

impl CubeRegion {
    pub fn upper(&self) -> Vec<f64> {
        self.lower.iter().map(|a| a + self.side).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().map(|a| a + 0.5 * self.side).collect()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.lower.len()
            && y.iter()
                .zip(&self.lower)
                .all(|(&v, &a)| a <= v && v < a + self.side)
    }

    /// Concentric cube with side `factor * side`.
    pub fn expand(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid(
                "expansion factor must be finite and positive",
            ));
        }
        let half_growth = 0.5 * (factor - 1.0) * self.side;
        Ok(Self {
            lower: self.lower.iter().map(|a| a - half_growth).collect(),
            side: factor * self.side,
        })
    }
}

impl From<&DyadicCube> for CubeRegion {
    fn from(q: &DyadicCube) -> Self {
        q.region()
    }
}

/// `kQ`: the cube with the centre of `q` and side `factor * l(q)`.
pub fn expand_cube(q: &DyadicCube, factor: f64) -> Result<CubeRegion> {
    q.region().expand(factor)
}

/// `Θ^m(μ, x, r) = μ(B̄(x, r)) / (ω_m r^m)`.
pub fn theta_ball(mu: &PointCloudMeasure, x: &[f64], r: f64, m: usize) -> Result<f64> {
    check_dimension(m, mu.dim())?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("radius must be finite and positive"));
    }
    let mass = mu.ball_mass(x, r)?;
    Ok(mass / (unit_ball_volume(m) * r.powi(m as i32)))
}

/// `Θ^m(μ, Q) = μ(Q) / l(Q)^m`.
pub fn theta_cube(mu: &PointCloudMeasure, q: &DyadicCube, m: usize) -> Result<f64> {
    check_dimension(m, mu.dim())?;
    if q.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: q.dim(),
        });
    }
    let idx = mu.cube_indices(&q.region())?;
    Ok(mu.mass_of(&idx) / q.side().powi(m as i32))
}

/// Level-`k` dyadic cubes carrying positive mass, in lexicographic corner order.
pub fn dyadic_cubes_touching(mu: &PointCloudMeasure, k: i32) -> Vec<DyadicCube> {
    let cubes: BTreeSet<DyadicCube> = mu
        .atoms()
        .filter(|(_, w)| *w > 0.0)
        .map(|(y, _)| DyadicCube::containing(y, k))
        .collect();
    cubes.into_iter().collect()
}

/// Parse `x0,...,x{n-1}[,w]` CSV text. Row numbers in errors are 1-based
/// file lines, the header being line 1.
pub fn load_csv<R: Read>(reader: R) -> Result<PointCloudMeasure> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Input {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    let has_weight = names.last() == Some(&"w");
    let dim = if has_weight {
        names.len() - 1
    } else {
        names.len()
    };
    if dim == 0 {
        return Err(Error::Input {
            row: 1,
            message: "header must name at least one coordinate column".into(),
        });
    }
    for (j, name) in names[..dim].iter().enumerate() {
        if *name != format!("x{j}") {
            return Err(Error::Input {
                row: 1,
                message: format!("expected column x{j}, found {name:?}"),
            });
        }
    }

    let mut positions = Vec::new();
    let mut weights = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let fallback_row = k + 2;
        let record = record.map_err(|e| Error::Input {
            row: fallback_row,
            message: e.to_string(),
        })?;
        let row = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(fallback_row);
        if record.len() != names.len() {
            return Err(Error::Input {
                row,
                message: format!("expected {} columns, found {}", names.len(), record.len()),
            });
        }
        let mut values = Vec::with_capacity(record.len());
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Input {
                row,
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Input {
                    row,
                    message: format!("non-finite value {field:?}"),
                });
            }
            values.push(v);
        }
        let w = if has_weight { values[dim] } else { 1.0 };
        if w < 0.0 {
            return Err(Error::Input {
                row,
                message: format!("negative weight {w}"),
            });
        }
        positions.extend_from_slice(&values[..dim]);
        weights.push(w);
    }
    PointCloudMeasure::from_flat(dim, positions, weights)
}

/// Push-forward under `y ↦ scale * rotation * y + translation`, with weights
/// multiplied by `scale^weight_exponent`.
pub fn similarity_transform(
    mu: &PointCloudMeasure,
    scale: f64,
    rotation: &DMatrix<f64>,
    translation: &[f64],
    weight_exponent: f64,
) -> Result<PointCloudMeasure> {
    let n = mu.dim();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::invalid("scale must be finite and positive"));
    }
    if rotation.nrows() != n || rotation.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rotation.nrows(),
        });
    }
    if translation.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: translation.len(),
        });
    }
    let gram = rotation.transpose() * rotation;
    let defect = (gram - DMatrix::<f64>::identity(n, n)).amax();
    if defect > 1e-12 {
        return Err(Error::invalid(format!(
            "rotation is not orthogonal (max |R^T R - I| = {defect:e})"
        )));
    }
    let mut positions = Vec::with_capacity(mu.positions().len());
    for (y, _) in mu.atoms() {
        for i in 0..n {
            let ry: f64 = (0..n).map(|j| rotation[(i, j)] * y[j]).sum();
            positions.push(scale * ry + translation[i]);
        }
    }
    let factor = scale.powf(weight_exponent);
    let weights = mu.weights().iter().map(|w| w * factor).collect();
    PointCloudMeasure::from_flat(n, positions, weights)
}
