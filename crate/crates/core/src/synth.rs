//! Seeded generators for synthetic test measures.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measure::PointCloudMeasure;

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Uniform samples on `[0, length] × {0}^{dim-1}`.
    Segment {
        length: f64,
        samples: usize,
        dim: usize,
    },
    /// Uniform samples on the circle of the given radius in the first two coordinates.
    Circle {
        radius: f64,
        samples: usize,
        dim: usize,
    },
    /// Regular grid with `per_side^m` nodes spanning the first `m` coordinates.
    FlatPlaneGrid {
        per_side: usize,
        spacing: f64,
        m: usize,
        dim: usize,
    },
    /// Uniform samples on the sphere `S^{dim-1}` of the given radius.
    Sphere {
        radius: f64,
        samples: usize,
        dim: usize,
    },
    /// Uniform positions in `[0, extent)^dim`, weights uniform in `(0, 2]`.
    RandomCloud {
        count: usize,
        dim: usize,
        extent: f64,
    },
    /// Unit atoms at (0,0), (1,0), (0.5,0.5).
    Triangle,
    /// Unit atoms at (0,0), (1,0), (0,1).
    RightTriangle,
    /// Base generator with every atom displaced by at most `amplitude`.
    Noisy {
        base: Box<Generator>,
        amplitude: f64,
    },
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Segment { dim, .. }
            | Generator::Circle { dim, .. }
            | Generator::FlatPlaneGrid { dim, .. }
            | Generator::Sphere { dim, .. }
            | Generator::RandomCloud { dim, .. } => *dim,
            Generator::Triangle | Generator::RightTriangle => 2,
            Generator::Noisy { base, .. } => base.dim(),
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "{what} must be finite and positive"
                )))
            }
        };
        let at_least = |v: usize, min: usize, what: &str| {
            if v >= min {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be at least {min}")))
            }
        };
        match self {
            Generator::Segment {
                length,
                samples,
                dim,
            } => {
                positive(*length, "segment length")?;
                at_least(*samples, 1, "sample count")?;
                at_least(*dim, 1, "dimension")
            }
            Generator::Circle {
                radius,
                samples,
                dim,
            } => {
                positive(*radius, "circle radius")?;
                at_least(*samples, 1, "sample count")?;
                at_least(*dim, 2, "dimension")
            }
            Generator::FlatPlaneGrid {
                per_side,
                spacing,
                m,
                dim,
            } => {
                positive(*spacing, "grid spacing")?;
                at_least(*per_side, 1, "grid side count")?;
                at_least(*m, 1, "plane dimension")?;
                if m > dim {
                    return Err(Error::invalid(
                        "grid plane dimension exceeds ambient dimension",
                    ));
                }
                Ok(())
            }
            Generator::Sphere {
                radius,
                samples,
                dim,
            } => {
                positive(*radius, "sphere radius")?;
                at_least(*samples, 1, "sample count")?;
                at_least(*dim, 2, "dimension")
            }
            Generator::RandomCloud { count, dim, extent } => {
                positive(*extent, "cloud extent")?;
                at_least(*count, 1, "atom count")?;
                at_least(*dim, 1, "dimension")
            }
            Generator::Triangle | Generator::RightTriangle => Ok(()),
            Generator::Noisy { base, amplitude } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(Error::invalid(
                        "noise amplitude must be finite and non-negative",
                    ));
                }
                base.validate()
            }
        }
    }
}

/// Build the measure described by `kind`. Deterministic in `seed`.
pub fn synthesize(kind: &Generator, seed: u64) -> Result<PointCloudMeasure> {
    kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (positions, weights) = generate(kind, &mut rng, seed);
    PointCloudMeasure::from_flat(kind.dim(), positions, weights)
}

fn generate(kind: &Generator, rng: &mut ChaCha8Rng, seed: u64) -> (Vec<f64>, Vec<f64>) {
    match kind {
        Generator::Segment {
            length,
            samples,
            dim,
        } => {
            let mut pos = vec![0.0; samples * dim];
            for i in 0..*samples {
                pos[i * dim] = length * rng.gen::<f64>();
            }
            (pos, vec![1.0; *samples])
        }
        Generator::Circle {
            radius,
            samples,
            dim,
        } => {
            let mut pos = vec![0.0; samples * dim];
            for i in 0..*samples {
                let t = 2.0 * PI * rng.gen::<f64>();
                pos[i * dim] = radius * t.cos();
                pos[i * dim + 1] = radius * t.sin();
            }
            (pos, vec![1.0; *samples])
        }
        Generator::FlatPlaneGrid {
            per_side,
            spacing,
            m,
            dim,
        } => {
            let count = per_side.pow(*m as u32);
            let mut pos = vec![0.0; count * dim];
            for i in 0..count {
                let mut rest = i;
                for j in 0..*m {
                    pos[i * dim + j] = spacing * (rest % per_side) as f64;
                    rest /= per_side;
                }
            }
            (pos, vec![1.0; count])
        }
        Generator::Sphere {
            radius,
            samples,
            dim,
        } => {
            let mut pos = Vec::with_capacity(samples * dim);
            for _ in 0..*samples {
                pos.extend(random_direction(rng, *dim).into_iter().map(|v| radius * v));
            }
            (pos, vec![1.0; *samples])
        }
        Generator::RandomCloud { count, dim, extent } => {
            let pos = (0..count * dim)
                .map(|_| extent * rng.gen::<f64>())
                .collect();
            let weights = (0..*count)
                .map(|_| 2.0 * (1.0 - rng.gen::<f64>()))
                .collect();
            (pos, weights)
        }
        Generator::Triangle => (vec![0.0, 0.0, 1.0, 0.0, 0.5, 0.5], vec![1.0; 3]),
        Generator::RightTriangle => (vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![1.0; 3]),
        Generator::Noisy { base, amplitude } => {
            let (mut pos, weights) = generate(base, rng, seed);
            let dim = base.dim();
            // Separate stream: the base positions do not depend on the amplitude.
            let mut noise = ChaCha8Rng::seed_from_u64(seed);
            noise.set_stream(1);
            for atom in pos.chunks_exact_mut(dim) {
                let dir = random_direction(&mut noise, dim);
                let len = amplitude * noise.gen::<f64>().powf(1.0 / dim as f64);
                atom.iter_mut().zip(dir).for_each(|(a, d)| *a += len * d);
            }
            (pos, weights)
        }
    }
}

/// Unit vector uniformly distributed on `S^{dim-1}`.
pub fn random_direction<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 1e-12 {
            return v.into_iter().map(|a| a / len).collect();
        }
    }
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_rotation<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Parses `kind[:key=value,...]`, e.g. `circle:samples=100,radius=1` or
/// `segment:length=2,samples=50,noise=0.01`. Any kind accepts `noise=<amplitude>`.
impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = std::collections::BTreeMap::new();
        for pair in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| {
                Error::invalid(format!("generator parameter {pair:?} is not key=value"))
            })?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let take_f =
            |params: &mut std::collections::BTreeMap<String, String>, key: &str, default: f64| {
                params.remove(key).map_or(Ok(default), |v| {
                    v.parse::<f64>().map_err(|_| {
                        Error::invalid(format!("generator parameter {key}={v} is not a number"))
                    })
                })
            };
        let take_u =
            |params: &mut std::collections::BTreeMap<String, String>, key: &str, default: usize| {
                params.remove(key).map_or(Ok(default), |v| {
                    v.parse::<usize>().map_err(|_| {
                        Error::invalid(format!("generator parameter {key}={v} is not an integer"))
                    })
                })
            };
        let noise = take_f(&mut params, "noise", 0.0)?;
        let base = match kind.trim() {
            "segment" => Generator::Segment {
                length: take_f(&mut params, "length", 1.0)?,
                samples: take_u(&mut params, "samples", 50)?,
                dim: take_u(&mut params, "dim", 2)?,
            },
            "circle" => Generator::Circle {
                radius: take_f(&mut params, "radius", 1.0)?,
                samples: take_u(&mut params, "samples", 100)?,
                dim: take_u(&mut params, "dim", 2)?,
            },
            "plane" | "flat_plane_grid" => Generator::FlatPlaneGrid {
                per_side: take_u(&mut params, "per_side", 5)?,
                spacing: take_f(&mut params, "spacing", 0.25)?,
                m: take_u(&mut params, "m", 2)?,
                dim: take_u(&mut params, "dim", 3)?,
            },
            "sphere" => Generator::Sphere {
                radius: take_f(&mut params, "radius", 1.0)?,
                samples: take_u(&mut params, "samples", 100)?,
                dim: take_u(&mut params, "dim", 3)?,
            },
            "cloud" | "random_cloud" => Generator::RandomCloud {
                count: take_u(&mut params, "count", 10)?,
                dim: take_u(&mut params, "dim", 2)?,
                extent: take_f(&mut params, "extent", 1.0)?,
            },
            "triangle" => Generator::Triangle,
            "right_triangle" | "right-triangle" => Generator::RightTriangle,
            other => return Err(Error::invalid(format!("unknown generator {other:?}"))),
        };
        if let Some(key) = params.keys().next() {
            return Err(Error::invalid(format!(
                "unknown generator parameter {key:?}"
            )));
        }
        let gen = if noise != 0.0 {
            Generator::Noisy {
                base: Box::new(base),
                amplitude: noise,
            }
        } else {
            base
        };
        gen.validate()?;
        Ok(gen)
    }
}
