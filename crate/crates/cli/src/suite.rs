//! Seeded batteries of inequality checks on random and flat atomic measures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rectifiability::curvature::{curvature_exact, e_integrand, DEFAULT_BUDGET};
use rectifiability::sum::NeumaierSum;
use rectifiability::synth::random_rotation;
use rectifiability::{
    synthesize, verify_corollary_lw11, verify_lemma1, verify_lemma2, verify_pointwise_bounds,
    CurvatureParams, DyadicCube, Generator, MultiscaleParams, PointCloudMeasure, Result,
    VerificationReport,
};

use crate::SuiteSize;

/// Largest number of failing reports kept verbatim per battery.
const KEPT_FAILURES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Battery {
    pub name: String,
    pub instances: u64,
    pub checks: u64,
    pub passed: u64,
    pub failed: u64,
    pub vacuous: u64,
    /// Checks built from approximate components; never counted as failures.
    pub non_assertive: u64,
    /// Largest `lhs / rhs` over non-vacuous checks.
    pub worst_ratio: f64,
    pub failures: Vec<VerificationReport>,
}

impl Battery {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            instances: 0,
            checks: 0,
            passed: 0,
            failed: 0,
            vacuous: 0,
            non_assertive: 0,
            worst_ratio: 0.0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, report: VerificationReport) {
        self.checks += 1;
        if report.vacuous {
            self.vacuous += 1;
        } else {
            self.worst_ratio = self.worst_ratio.max(report.ratio);
        }
        if report.pass {
            self.passed += 1;
        } else if !report.exact {
            self.non_assertive += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(report);
            }
        }
    }

    fn record_plain(&mut self, pass: bool, ratio: f64) {
        self.checks += 1;
        self.worst_ratio = self.worst_ratio.max(ratio);
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub size: SuiteSize,
    pub seed: u64,
    pub checks: u64,
    pub passed: u64,
    pub failed: u64,
    pub vacuous: u64,
    pub non_assertive: u64,
    pub batteries: Vec<Battery>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Atoms uniform in `lower + [0, side)^n` with weights uniform in `(0, 2]`.
pub fn random_measure(
    rng: &mut ChaCha8Rng,
    count: usize,
    lower: &[f64],
    side: f64,
) -> PointCloudMeasure {
    let n = lower.len();
    let positions: Vec<f64> = (0..count)
        .flat_map(|_| {
            lower
                .iter()
                .map(|&l| l + side * rng.gen::<f64>())
                .collect::<Vec<_>>()
        })
        .collect();
    let weights = (0..count).map(|_| 2.0 * (1.0 - rng.gen::<f64>())).collect();
    PointCloudMeasure::from_flat(n, positions, weights).expect("finite random measure")
}

fn dims(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let n = rng.gen_range(2..=3);
    let m = if n == 2 { 1 } else { rng.gen_range(1..=2) };
    (n, m)
}

fn positive_atoms(mu: &PointCloudMeasure) -> Vec<Vec<f64>> {
    mu.atoms()
        .filter(|(_, w)| *w > 0.0)
        .map(|(y, _)| y.to_vec())
        .collect()
}

/// Random cube of the given level with corner in `{-1, 0, 1}^n`, and a measure
/// on its threefold enlargement with at least one atom inside the cube.
fn cube_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    level: i32,
    count: usize,
) -> (DyadicCube, PointCloudMeasure) {
    let corner: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
    let cube = DyadicCube::new(level, corner);
    let side = cube.side();
    let lower: Vec<f64> = cube.corner.iter().map(|&a| a as f64 * side).collect();
    let inside = (count / 3).max(1);
    let a = random_measure(rng, inside, &lower, side);
    let outer_lower: Vec<f64> = lower.iter().map(|l| l - side).collect();
    let b = random_measure(rng, count - inside, &outer_lower, 3.0 * side);
    let positions = [a.positions(), b.positions()].concat();
    let weights = [a.weights(), b.weights()].concat();
    (
        cube,
        PointCloudMeasure::from_flat(n, positions, weights).expect("finite random measure"),
    )
}

/// Random measures with `N <= 15` atoms, `p = 2`, `α ∈ {0, 1/2, 1}`, `R ∈ {1, 2, ∞}`,
/// checked at every atom.
pub fn lemma1_battery(seed: u64, count: u64) -> Result<Battery> {
    let mut rng = stream(seed, 1);
    let mut battery = Battery::new("lemma1");
    for i in 0..count {
        let (n, m) = dims(&mut rng);
        let atoms = rng.gen_range(3..=15);
        let mu = random_measure(&mut rng, atoms, &vec![0.0; n], 2.0);
        let alpha = [0.0, 0.5, 1.0][(i % 3) as usize];
        let radius = [1.0, 2.0, f64::INFINITY][((i / 3) % 3) as usize];
        for x in positive_atoms(&mu) {
            battery.record(verify_lemma1(
                &mu,
                &x,
                radius,
                m,
                2.0,
                alpha,
                DEFAULT_BUDGET,
            )?);
        }
        battery.instances += 1;
    }
    Ok(battery)
}

/// Dyadic cubes at levels `{-1, 0, 1}`, `(p, q) ∈ {(2, 2), (2, 1)}`, `γ ∈ {0, 1, m}`, `α ∈ {0, 1}`.
pub fn lemma2_battery(seed: u64, count: u64) -> Result<Battery> {
    let mut rng = stream(seed, 2);
    let mut battery = Battery::new("lemma2");
    for i in 0..count {
        let (n, m) = dims(&mut rng);
        let level = [-1, 0, 1][(i % 3) as usize];
        let atoms = rng.gen_range(4..=15);
        let (cube, mu) = cube_instance(&mut rng, n, level, atoms);
        let q = [2.0, 1.0][((i / 3) % 2) as usize];
        let gamma = [0.0, 1.0, m as f64][((i / 6) % 3) as usize];
        let alpha = [0.0, 1.0][((i / 18) % 2) as usize];
        let rho = cube.side() * [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let params = MultiscaleParams {
            m,
            n,
            p: 2.0,
            q,
            gamma,
            alpha,
            rho,
            centred: true,
        };
        battery.record(verify_lemma2(&mu, &cube, &params)?);
        battery.instances += 1;
    }
    Ok(battery)
}

/// Cube-integrated curvature against the non-centred multiscale integral on `3Q`.
pub fn corollary_battery(seed: u64, count: u64) -> Result<Battery> {
    let mut rng = stream(seed, 3);
    let mut battery = Battery::new("corollary");
    for i in 0..count {
        let (n, m) = dims(&mut rng);
        let level = [-1, 0, 1][(i % 3) as usize];
        let atoms = rng.gen_range(4..=12);
        let (cube, mu) = cube_instance(&mut rng, n, level, atoms);
        let alpha = [0.0, 0.5, 1.0][((i / 3) % 3) as usize];
        let radius = cube.side() * [0.5, 1.0, 2.0, f64::INFINITY][rng.gen_range(0..4)];
        battery.record(verify_corollary_lw11(
            &mu,
            &cube,
            radius,
            m,
            2.0,
            alpha,
            DEFAULT_BUDGET,
        )?);
        battery.instances += 1;
    }
    Ok(battery)
}

/// Checks `K(x, R) = (m + 1) Σ_{y ∈ B̄(x,R)} w(y) E(x, y)` to `1e-12` relative.
///
/// Positions are in general position with probability one, so no two atoms tie
/// in distance from `x`; ties would count a tuple under two farthest points.
pub fn identity_battery(seed: u64, count: u64) -> Result<Battery> {
    let mut rng = stream(seed, 4);
    let mut battery = Battery::new("curvature_identity");
    for _ in 0..count {
        let (n, m) = dims(&mut rng);
        let atoms = rng.gen_range(4..=10);
        let mu = random_measure(&mut rng, atoms, &vec![0.0; n], 2.0);
        let p = [1.5, 2.0, 3.0][rng.gen_range(0..3)];
        let alpha = rng.gen::<f64>();
        let radius = [1.0, f64::INFINITY][rng.gen_range(0..2)];
        let x: Vec<f64> = if rng.gen_bool(0.5) {
            mu.point(rng.gen_range(0..atoms)).to_vec()
        } else {
            (0..n).map(|_| 2.0 * rng.gen::<f64>()).collect()
        };
        let params = CurvatureParams::new(m, p, alpha, radius);
        let k = curvature_exact(&mu, &x, &params, DEFAULT_BUDGET)?.value;
        let mut sum = NeumaierSum::new();
        // Tuples whose farthest point is x itself are degenerate and contribute nothing.
        for i in mu.ball_indices(&x, radius)? {
            if mu.point(i) == x.as_slice() {
                continue;
            }
            sum.add(mu.weight(i) * e_integrand(&mu, &x, mu.point(i), &params, DEFAULT_BUDGET)?);
        }
        let via_e = (m as f64 + 1.0) * sum.value();
        let err = if k == 0.0 && via_e == 0.0 {
            0.0
        } else {
            (k - via_e).abs() / k.abs().max(via_e.abs())
        };
        battery.record_plain(err <= 1e-12, err);
        battery.instances += 1;
    }
    Ok(battery)
}

/// Randomised height, diameter, beta-scale and density-scale bounds.
pub fn bounds_battery(seed: u64, samples: u64) -> Result<Battery> {
    let report = verify_pointwise_bounds(samples, seed)?;
    let mut battery = Battery::new("pointwise_bounds");
    battery.instances = samples;
    for d in &report.diagnostics {
        if let rectifiability::lab::Diagnostic::Bound {
            trials, violations, ..
        } = d
        {
            battery.checks += trials;
            battery.failed += violations;
            battery.passed += trials - violations;
        }
    }
    battery.worst_ratio = report.lhs;
    if !report.pass {
        battery.failures.push(report);
    }
    Ok(battery)
}

/// Random points on a random `m`-plane through the unit cube.
fn random_flat(rng: &mut ChaCha8Rng, n: usize, m: usize, count: usize) -> PointCloudMeasure {
    let rotation = random_rotation(rng, n);
    let base: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut positions = Vec::with_capacity(count * n);
    for _ in 0..count {
        let coeffs: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for k in 0..n {
            positions.push(base[k] + (0..m).map(|j| coeffs[j] * rotation[(k, j)]).sum::<f64>());
        }
    }
    let weights = (0..count).map(|_| 2.0 * (1.0 - rng.gen::<f64>())).collect();
    PointCloudMeasure::from_flat(n, positions, weights).expect("finite flat measure")
}

/// Plane-supported measures: every check must come out with both sides exactly zero.
pub fn flat_battery(seed: u64) -> Result<Battery> {
    let mut rng = stream(seed, 5);
    let mut battery = Battery::new("flat_vacuous");
    let mut cases: Vec<(PointCloudMeasure, usize)> = vec![
        (
            synthesize(
                &Generator::Segment {
                    length: 1.0,
                    samples: 8,
                    dim: 2,
                },
                seed,
            )?,
            1,
        ),
        (
            synthesize(
                &Generator::FlatPlaneGrid {
                    per_side: 3,
                    spacing: 0.3,
                    m: 2,
                    dim: 3,
                },
                seed,
            )?,
            2,
        ),
    ];
    cases.push((random_flat(&mut rng, 2, 1, 8), 1));
    cases.push((random_flat(&mut rng, 3, 1, 8), 1));
    cases.push((random_flat(&mut rng, 3, 2, 8), 2));
    for (mu, m) in &cases {
        let (m, n) = (*m, mu.dim());
        for x in positive_atoms(mu) {
            battery.record(verify_lemma1(
                mu,
                &x,
                f64::INFINITY,
                m,
                2.0,
                0.5,
                DEFAULT_BUDGET,
            )?);
        }
        let cube = DyadicCube::containing(mu.point(0), 0);
        let params = MultiscaleParams {
            m,
            n,
            p: 2.0,
            q: 2.0,
            gamma: m as f64,
            alpha: 0.0,
            rho: 1.0,
            centred: true,
        };
        battery.record(verify_lemma2(mu, &cube, &params)?);
        battery.record(verify_corollary_lw11(
            mu,
            &cube,
            1.0,
            m,
            2.0,
            0.0,
            DEFAULT_BUDGET,
        )?);
        battery.instances += 1;
    }
    // A flat battery entry that is not vacuous is itself a failure.
    let nonvacuous = battery.checks - battery.vacuous;
    battery.failed += nonvacuous;
    battery.passed -= nonvacuous.min(battery.passed);
    Ok(battery)
}

/// Every battery with deterministic seeding; identical inputs give identical summaries.
pub fn run_suite(seed: u64, size: SuiteSize) -> Result<SuiteSummary> {
    let (l1, l2, cor, id, bounds) = match size {
        SuiteSize::Smoke => (12, 18, 8, 8, 500),
        SuiteSize::Full => (200, 200, 100, 50, 10_000),
    };
    let batteries = vec![
        lemma1_battery(seed, l1)?,
        lemma2_battery(seed, l2)?,
        corollary_battery(seed, cor)?,
        identity_battery(seed, id)?,
        bounds_battery(seed, bounds)?,
        flat_battery(seed)?,
    ];
    let total = |f: fn(&Battery) -> u64| batteries.iter().map(f).sum::<u64>();
    Ok(SuiteSummary {
        size,
        seed,
        checks: total(|b| b.checks),
        passed: total(|b| b.passed),
        failed: total(|b| b.failed),
        vacuous: total(|b| b.vacuous),
        non_assertive: total(|b| b.non_assertive),
        batteries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_suite_is_green_and_deterministic() {
        let a = run_suite(7, SuiteSize::Smoke).unwrap();
        assert_eq!(a.failed, 0, "{a:#?}");
        assert_eq!(a.non_assertive, 0);
        let b = run_suite(7, SuiteSize::Smoke).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn flat_measures_are_vacuous() {
        let b = flat_battery(1).unwrap();
        assert_eq!(b.failed, 0, "{b:#?}");
        assert_eq!(b.vacuous, b.checks);
    }

    #[test]
    fn cube_instances_put_an_atom_inside() {
        let mut rng = stream(0, 9);
        for level in [-1, 0, 1] {
            let (cube, mu) = cube_instance(&mut rng, 3, level, 7);
            assert!(cube.contains(mu.point(0)));
            assert!(cube.region().expand(3.0).unwrap().contains(mu.point(6)));
        }
    }
}
