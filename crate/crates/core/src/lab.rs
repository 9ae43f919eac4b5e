//! Explicit constants, exact multiscale integrals and inequality checks.
//!
//! A multiscale integral `∫_0^ρ Θ^m(μ,x,r)^γ β(x,r)^q r^{-αq} dr/r` of an
//! atomic measure is a finite sum of power integrals: on every profile interval
//! the integrand is `(M/ω_m)^γ C^{q/p} r^{-γm - q - qm/p - αq - 1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::beta::{beta_given_plane, scale_profile, BetaParams, ScaleProfile};
use crate::curvature::{curvature_exact, CurvatureParams};
use crate::error::{Error, Result};
use crate::geometry::{diam, distance, h_min_unchecked, AffinePlane};
use crate::measure::{
    check_dimension, theta_ball, unit_ball_volume, DyadicCube, PointCloudMeasure,
};
use crate::sum::pairwise_sum;
use crate::synth::random_rotation;

/// Relative slack in every `lhs <= rhs` decision.
pub const ASSERT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiscaleParams {
    pub m: usize,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// Upper integration limit; may be infinite.
    pub rho: f64,
    pub centred: bool,
}

impl MultiscaleParams {
    pub fn validate(&self) -> Result<()> {
        check_dimension(self.m, self.n)?;
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::invalid(format!(
                "p = {} must lie in [1, inf)",
                self.p
            )));
        }
        if !(self.q >= 1.0 && self.q <= self.p) {
            return Err(Error::invalid(format!("q = {} must lie in [1, p]", self.q)));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid(format!(
                "gamma = {} must be finite and >= 0",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha = {} must lie in [0, 1]",
                self.alpha
            )));
        }
        if self.rho.is_nan() || self.rho <= 0.0 {
            return Err(Error::invalid("rho must be positive"));
        }
        Ok(())
    }

    fn beta_params(&self) -> BetaParams {
        BetaParams::new(self.m, self.p, self.centred)
    }

    /// Exponent `e` with integrand `∝ r^{e - 1}` on each profile interval.
    pub fn radial_exponent(&self) -> f64 {
        let m = self.m as f64;
        -self.gamma * m - self.q - self.q * m / self.p - self.alpha * self.q
    }
}

/// `Γ(m, p, α) = 2(m+1)(m+2) ω_m^m 4^{m + (1+α)p + m² + 1}`.
pub fn gamma_lemma1(m: usize, p: f64, alpha: f64) -> f64 {
    let mf = m as f64;
    let exponent = mf + (1.0 + alpha) * p + mf * mf + 1.0;
    2.0 * (mf + 1.0) * (mf + 2.0) * unit_ball_volume(m).powi(m as i32) * 4f64.powf(exponent)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubeConstants {
    pub delta1: f64,
    pub delta2: f64,
    pub product: f64,
}

/// `Δ₁ = 6^{q + mq/p + γm} 2^{2 + αq}`, `Δ₂ = 3^n (2√n)^{γm + αq + mq/p + q} / ln 2`.
pub fn gamma_lemma2(n: usize, m: usize, p: f64, q: f64, alpha: f64, gamma: f64) -> CubeConstants {
    let (nf, mf) = (n as f64, m as f64);
    let delta1 = 6f64.powf(q + mf * q / p + gamma * mf) * 2f64.powf(2.0 + alpha * q);
    let delta2 = 3f64.powi(n as i32)
        * (2.0 * nf.sqrt()).powf(gamma * mf + alpha * q + mf * q / p + q)
        / std::f64::consts::LN_2;
    CubeConstants {
        delta1,
        delta2,
        product: delta1 * delta2,
    }
}

/// `∫_a^b r^{e-1} dr` for `0 < a <= b <= ∞`.
fn power_integral(a: f64, b: f64, e: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b.is_infinite() {
        if e >= 0.0 {
            return Err(Error::Divergent(format!(
                "tail integral with exponent {e} >= 0"
            )));
        }
        return Ok(-a.powf(e) / e);
    }
    let log_ratio = ((b - a) / a).ln_1p();
    if e == 0.0 {
        return Ok(log_ratio);
    }
    Ok(a.powf(e) * (e * log_ratio).exp_m1() / e)
}

/// Contribution of one profile interval to a multiscale integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalTerm {
    pub r_lo: f64,
    pub r_hi: f64,
    pub mass: f64,
    pub beta_numerator: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiscaleValue {
    pub value: f64,
    /// True when every beta numerator is a certified infimum (`p = 2`).
    pub exact: bool,
    pub terms: Vec<IntervalTerm>,
}

/// Integrates a prepared profile in closed form.
pub fn integrate_profile(
    profile: &ScaleProfile,
    params: &MultiscaleParams,
) -> Result<MultiscaleValue> {
    params.validate()?;
    let omega = unit_ball_volume(params.m);
    let e = params.radial_exponent();
    let mut terms = Vec::with_capacity(profile.intervals.len());
    for iv in &profile.intervals {
        let r_hi = iv.r_hi.min(params.rho);
        let contribution = if iv.beta_numerator == 0.0 || iv.r_lo >= r_hi {
            0.0
        } else {
            if iv.r_lo == 0.0 {
                return Err(Error::Divergent(
                    "non-zero beta numerator at arbitrarily small scales".into(),
                ));
            }
            let coefficient =
                (iv.mass / omega).powf(params.gamma) * iv.beta_numerator.powf(params.q / params.p);
            coefficient * power_integral(iv.r_lo, r_hi, e)?
        };
        terms.push(IntervalTerm {
            r_lo: iv.r_lo,
            r_hi,
            mass: iv.mass,
            beta_numerator: iv.beta_numerator,
            contribution,
        });
    }
    let parts: Vec<f64> = terms.iter().map(|t| t.contribution).collect();
    Ok(MultiscaleValue {
        value: pairwise_sum(&parts),
        exact: profile.is_exact(),
        terms,
    })
}

/// `∫_0^ρ Θ^m(μ,x,r)^γ β(x,r)^q / r^{αq} dr/r`, centred or not per `params`.
pub fn multiscale_integral(
    mu: &PointCloudMeasure,
    x: &[f64],
    params: &MultiscaleParams,
) -> Result<MultiscaleValue> {
    params.validate()?;
    if params.n != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            got: params.n,
        });
    }
    let profile = scale_profile(mu, x, params.rho, &params.beta_params())?;
    integrate_profile(&profile, params)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportParams {
    Curvature(CurvatureParams),
    Multiscale(MultiscaleParams),
    Cube {
        level: i32,
        corner: Vec<i64>,
        multiscale: MultiscaleParams,
    },
    Corollary {
        level: i32,
        corner: Vec<i64>,
        curvature: CurvatureParams,
        multiscale: MultiscaleParams,
    },
    Bounds {
        samples: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    Interval(IntervalTerm),
    Atom {
        side: Side,
        atom: usize,
        weight: f64,
        value: f64,
    },
    Bound {
        name: String,
        trials: u64,
        violations: u64,
        worst_ratio: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    /// `lhs / rhs`; 0 when both sides vanish.
    pub ratio: f64,
    pub pass: bool,
    /// Both sides are exactly zero.
    pub vacuous: bool,
    /// Built only from certified components; approximate reports are not assertive.
    pub exact: bool,
    pub params: ReportParams,
    pub diagnostics: Vec<Diagnostic>,
}

impl VerificationReport {
    pub fn new(
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        constant: f64,
        exact: bool,
        params: ReportParams,
        diagnostics: Vec<Diagnostic>,
    ) -> Self {
        let vacuous = lhs == 0.0 && rhs == 0.0;
        let ratio = if vacuous {
            0.0
        } else if rhs == 0.0 {
            f64::INFINITY
        } else {
            lhs / rhs
        };
        let pass = if rhs == 0.0 {
            lhs == 0.0
        } else {
            lhs <= rhs * (1.0 + ASSERT_TOLERANCE)
        };
        Self {
            name: name.into(),
            lhs,
            rhs,
            constant,
            ratio,
            pass,
            vacuous,
            exact,
            params,
            diagnostics,
        }
    }
}

/// `K^α_{μ,p}(x, R) <= Γ ∫_0^{2R} Θ^m(μ,x,r)^m β̊_{μ,p}(x,r)^p r^{-αp} dr/r`.
pub fn verify_lemma1(
    mu: &PointCloudMeasure,
    x: &[f64],
    radius: f64,
    m: usize,
    p: f64,
    alpha: f64,
    budget: u64,
) -> Result<VerificationReport> {
    let curvature = CurvatureParams::new(m, p, alpha, radius);
    curvature.validate(mu.dim())?;
    let lhs = curvature_exact(mu, x, &curvature, budget)?.value;
    let multiscale = MultiscaleParams {
        m,
        n: mu.dim(),
        p,
        q: p,
        gamma: m as f64,
        alpha,
        rho: 2.0 * radius,
        centred: true,
    };
    let integral = multiscale_integral(mu, x, &multiscale)?;
    let constant = gamma_lemma1(m, p, alpha);
    let diagnostics = integral
        .terms
        .iter()
        .copied()
        .map(Diagnostic::Interval)
        .collect();
    Ok(VerificationReport::new(
        "lemma1",
        lhs,
        constant * integral.value,
        constant,
        integral.exact,
        ReportParams::Curvature(curvature),
        diagnostics,
    ))
}

/// Σ over the given atoms of `w(x) * f(x)`, evaluated in parallel and reduced in order.
fn weighted_atom_sum<F>(
    mu: &PointCloudMeasure,
    atoms: &[usize],
    side: Side,
    f: F,
) -> Result<(f64, Vec<Diagnostic>)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let values: Vec<f64> = atoms
        .par_iter()
        .map(|&i| f(mu.point(i)))
        .collect::<Result<Vec<f64>>>()?;
    let weighted: Vec<f64> = atoms
        .iter()
        .zip(&values)
        .map(|(&i, v)| mu.weight(i) * v)
        .collect();
    let diagnostics = atoms
        .iter()
        .zip(&values)
        .map(|(&atom, &value)| Diagnostic::Atom {
            side,
            atom,
            weight: mu.weight(atom),
            value,
        })
        .collect();
    Ok((pairwise_sum(&weighted), diagnostics))
}

/// `∫_Q ∫_0^ρ (centred) dμ <= Δ₁Δ₂ ∫_{3Q} ∫_0^{12ρ√n} (non-centred) dμ`.
pub fn verify_lemma2(
    mu: &PointCloudMeasure,
    cube: &DyadicCube,
    params: &MultiscaleParams,
) -> Result<VerificationReport> {
    params.validate()?;
    let n = mu.dim();
    if params.n != n || cube.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if params.n != n { params.n } else { cube.dim() },
        });
    }
    let inner = mu.cube_indices(&cube.region())?;
    let outer = mu.cube_indices(&cube.region().expand(3.0)?)?;
    let centred = MultiscaleParams {
        centred: true,
        ..*params
    };
    let free = MultiscaleParams {
        centred: false,
        rho: 12.0 * params.rho * (n as f64).sqrt(),
        ..*params
    };
    let (lhs, mut diagnostics) = weighted_atom_sum(mu, &inner, Side::Lhs, |x| {
        Ok(multiscale_integral(mu, x, &centred)?.value)
    })?;
    let (integral, outer_diag) = weighted_atom_sum(mu, &outer, Side::Rhs, |x| {
        Ok(multiscale_integral(mu, x, &free)?.value)
    })?;
    diagnostics.extend(outer_diag);
    let constant =
        gamma_lemma2(n, params.m, params.p, params.q, params.alpha, params.gamma).product;
    Ok(VerificationReport::new(
        "lemma2",
        lhs,
        constant * integral,
        constant,
        params.p == 2.0,
        ReportParams::Cube {
            level: cube.level,
            corner: cube.corner.clone(),
            multiscale: *params,
        },
        diagnostics,
    ))
}

/// `∫_Q K dμ <= Γ₁Γ₂ ∫_{3Q} ∫_0^{24R√n} Θ^m β^p r^{-αp} dr/r dμ`.
pub fn verify_corollary_lw11(
    mu: &PointCloudMeasure,
    cube: &DyadicCube,
    radius: f64,
    m: usize,
    p: f64,
    alpha: f64,
    budget: u64,
) -> Result<VerificationReport> {
    let n = mu.dim();
    let curvature = CurvatureParams::new(m, p, alpha, radius);
    curvature.validate(n)?;
    if cube.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: cube.dim(),
        });
    }
    let multiscale = MultiscaleParams {
        m,
        n,
        p,
        q: p,
        gamma: m as f64,
        alpha,
        rho: 24.0 * radius * (n as f64).sqrt(),
        centred: false,
    };
    let inner = mu.cube_indices(&cube.region())?;
    let outer = mu.cube_indices(&cube.region().expand(3.0)?)?;
    let (lhs, mut diagnostics) = weighted_atom_sum(mu, &inner, Side::Lhs, |x| {
        Ok(curvature_exact(mu, x, &curvature, budget)?.value)
    })?;
    let (integral, outer_diag) = weighted_atom_sum(mu, &outer, Side::Rhs, |x| {
        Ok(multiscale_integral(mu, x, &multiscale)?.value)
    })?;
    diagnostics.extend(outer_diag);
    let constant = gamma_lemma1(m, p, alpha) * gamma_lemma2(n, m, p, p, alpha, m as f64).product;
    Ok(VerificationReport::new(
        "corollary_lw11",
        lhs,
        constant * integral,
        constant,
        p == 2.0,
        ReportParams::Corollary {
            level: cube.level,
            corner: cube.corner.clone(),
            curvature,
            multiscale,
        },
        diagnostics,
    ))
}

fn random_plane(rng: &mut ChaCha8Rng, n: usize, m: usize, through: Option<&[f64]>) -> AffinePlane {
    let base = match through {
        Some(x) => x.to_vec(),
        None => (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect(),
    };
    let rotation = random_rotation(rng, n);
    let dirs: Vec<Vec<f64>> = (0..m)
        .map(|j| rotation.column(j).iter().copied().collect())
        .collect();
    AffinePlane::spanned_by(base, &dirs)
}

#[derive(Default)]
struct BoundTally {
    trials: u64,
    violations: u64,
    worst: f64,
}

impl BoundTally {
    /// Records `lhs <= rhs`; a zero right side demands a zero left side.
    fn record(&mut self, lhs: f64, rhs: f64) {
        self.trials += 1;
        let ratio = if rhs == 0.0 {
            if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / rhs
        };
        if ratio > 1.0 + ASSERT_TOLERANCE {
            self.violations += 1;
        }
        self.worst = self.worst.max(ratio);
    }

    fn diagnostic(self, name: &str) -> Diagnostic {
        Diagnostic::Bound {
            name: name.to_string(),
            trials: self.trials,
            violations: self.violations,
            worst_ratio: self.worst,
        }
    }
}

/// Randomised check of the four pointwise bounds behind the curvature estimate:
/// the height bound `h_min <= 2(m+2) max dist(x_i, L)`, the diameter bound,
/// and the scale monotonicity of fixed-plane beta numbers and densities for
/// `s/2 <= t <= s`. Each bound gets `samples` trials.
pub fn verify_pointwise_bounds(samples: u64, seed: u64) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut height = BoundTally::default();
    let mut diameter = BoundTally::default();
    let mut beta = BoundTally::default();
    let mut density = BoundTally::default();

    for trial in 0..samples {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(1..n).min(2);

        let mut tuple: Vec<Vec<f64>> = (0..m + 2)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        if trial % 10 == 0 {
            tuple[m + 1] = tuple[0].clone();
        }
        let plane = random_plane(&mut rng, n, m, None);
        let h = h_min_unchecked(&tuple);
        let far = tuple
            .iter()
            .map(|y| plane.distance_unchecked(y))
            .fold(0.0, f64::max);
        height.record(h, 2.0 * (m as f64 + 2.0) * far);
        let reach = tuple
            .iter()
            .map(|y| distance(y, &tuple[0]))
            .fold(0.0, f64::max);
        diameter.record(reach, diam(&tuple));

        let count = rng.gen_range(1..=12);
        let positions: Vec<f64> = (0..count * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let weights: Vec<f64> = (0..count).map(|_| 2.0 * (1.0 - rng.gen::<f64>())).collect();
        let mu = PointCloudMeasure::from_flat(n, positions, weights)?;
        let x: Vec<f64> = if rng.gen_bool(0.5) {
            mu.point(rng.gen_range(0..count)).to_vec()
        } else {
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let s = rng.gen_range(0.05..2.5);
        let t = if trial % 25 == 0 {
            s
        } else {
            s * rng.gen_range(0.5..=1.0)
        };
        let p = [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
        let centred = rng.gen_bool(0.5);
        let plane = random_plane(&mut rng, n, m, centred.then_some(x.as_slice()));
        let params = BetaParams::new(m, p, false);
        let at_t = beta_given_plane(&mu, &x, t, &plane, &params)?.powf(p);
        let at_s = beta_given_plane(&mu, &x, s, &plane, &params)?.powf(p);
        beta.record(at_t, (s / t).powf(m as f64 + p) * at_s);
        let theta_t = theta_ball(&mu, &x, t, m)?;
        let theta_s = theta_ball(&mu, &x, s, m)?;
        density.record(theta_t, (s / t).powi(m as i32) * theta_s);
    }

    let worst = [&height, &diameter, &beta, &density]
        .iter()
        .map(|b| b.worst)
        .fold(0.0, f64::max);
    let diagnostics = vec![
        height.diagnostic("height"),
        diameter.diagnostic("diameter"),
        beta.diagnostic("beta_scale"),
        density.diagnostic("density_scale"),
    ];
    let pass = diagnostics
        .iter()
        .all(|d| matches!(d, Diagnostic::Bound { violations: 0, .. }));
    let mut report = VerificationReport::new(
        "pointwise_bounds",
        worst,
        1.0,
        1.0,
        true,
        ReportParams::Bounds { samples, seed },
        diagnostics,
    );
    report.pass = report.pass && pass;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn right_triangle() -> PointCloudMeasure {
        PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    fn triangle() -> PointCloudMeasure {
        PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]]).unwrap()
    }

    fn ms(gamma: f64, rho: f64, centred: bool) -> MultiscaleParams {
        MultiscaleParams {
            m: 1,
            n: 2,
            p: 2.0,
            q: 2.0,
            gamma,
            alpha: 0.0,
            rho,
            centred,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn lemma1_constants() {
        assert_eq!(gamma_lemma1(1, 2.0, 0.0), 24576.0);
        assert_eq!(gamma_lemma1(1, 2.0, 1.0), 393216.0);
        let pi = std::f64::consts::PI;
        assert!(rel(gamma_lemma1(2, 2.0, 0.0), 24.0 * pi * pi * 4f64.powi(9)) < 1e-15);
    }

    #[test]
    fn lemma2_constants() {
        let c = gamma_lemma2(2, 1, 2.0, 2.0, 0.0, 1.0);
        assert!(rel(c.delta1, 5184.0) < 1e-15);
        assert!(rel(c.delta2, 576.0 / std::f64::consts::LN_2) < 1e-14);
        assert!((c.delta2 - 830.9923).abs() < 1e-4);
        assert!(rel(c.product, c.delta1 * c.delta2) < 1e-15);
        let c = gamma_lemma2(3, 2, 3.0, 3.0, 0.0, 0.0);
        assert!(rel(c.delta1, 6f64.powf(5.0) * 4.0) < 1e-14);
    }

    #[test]
    fn analytic_multiscale_values() {
        let v = multiscale_integral(&right_triangle(), &[0.0, 0.0], &ms(0.0, 2.0, true)).unwrap();
        assert!(v.exact);
        assert!(rel(v.value, 7.0 / 24.0) < 1e-14);
        let v = multiscale_integral(&right_triangle(), &[0.0, 0.0], &ms(1.0, 2.0, true)).unwrap();
        assert!(rel(v.value, 45.0 / 128.0) < 1e-14);
        let line = PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
        let v = multiscale_integral(&line, &[0.0, 0.0], &ms(1.0, f64::INFINITY, true)).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn infinite_rho_matches_closed_form_tail() {
        // Centred, γ = 0: ∫_1^∞ r^{-4} dr = 1/3.
        let v = multiscale_integral(
            &right_triangle(),
            &[0.0, 0.0],
            &ms(0.0, f64::INFINITY, true),
        )
        .unwrap();
        assert!(rel(v.value, 1.0 / 3.0) < 1e-14);
    }

    #[test]
    fn power_integral_branches() {
        assert!(rel(power_integral(1.0, 2.0, -3.0).unwrap(), 7.0 / 24.0) < 1e-15);
        assert!(rel(power_integral(1.0, std::f64::consts::E, 0.0).unwrap(), 1.0) < 1e-15);
        assert!(rel(power_integral(2.0, f64::INFINITY, -1.0).unwrap(), 0.5) < 1e-15);
        assert!(power_integral(2.0, f64::INFINITY, 0.5).is_err());
        assert_eq!(power_integral(2.0, 2.0, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn parameter_validation() {
        let mut p = ms(1.0, 1.0, true);
        p.q = 3.0;
        assert!(p.validate().is_err());
        let mut p = ms(1.0, 1.0, true);
        p.alpha = 1.5;
        assert!(p.validate().is_err());
        let mut p = ms(1.0, 1.0, true);
        p.m = 2;
        assert!(p.validate().is_err());
    }

    #[test]
    fn lemma1_triangle() {
        let r = verify_lemma1(&triangle(), &[0.0, 0.0], 2.0, 1, 2.0, 0.0, 1_000_000).unwrap();
        assert!(r.pass);
        assert!(r.exact);
        assert!((r.lhs - 0.5).abs() < 1e-12);
        assert_eq!(r.constant, 24576.0);
        assert!(r.rhs > r.lhs);
    }

    #[test]
    fn lemma1_flat_measure_is_vacuous() {
        let line =
            PointCloudMeasure::unit(2, &[[0.0, 0.0], [1.0, 0.0], [2.5, 0.0], [-1.0, 0.0]]).unwrap();
        let r = verify_lemma1(&line, &[0.0, 0.0], 2.0, 1, 2.0, 0.0, 1_000_000).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));
        assert!(r.pass && r.vacuous);
    }

    #[test]
    fn lemma2_triangle_and_flat() {
        let q = DyadicCube::new(0, vec![0, 0]);
        let r = verify_lemma2(&triangle(), &q, &ms(1.0, 1.0, true)).unwrap();
        assert!(r.pass);
        assert!(rel(r.constant, 5184.0 * 576.0 / std::f64::consts::LN_2) < 1e-14);
        let line = PointCloudMeasure::unit(2, &[[0.1, 0.1], [0.4, 0.4], [0.9, 0.9]]).unwrap();
        let r = verify_lemma2(&line, &q, &ms(1.0, 1.0, true)).unwrap();
        assert!(r.pass && r.vacuous);
    }

    #[test]
    fn corollary_triangle_and_flat() {
        let q = DyadicCube::new(0, vec![0, 0]);
        let r = verify_corollary_lw11(&triangle(), &q, 2.0, 1, 2.0, 0.0, 1_000_000).unwrap();
        assert!(r.pass);
        assert!(r.lhs > 0.0);
        let line = PointCloudMeasure::unit(2, &[[0.1, 0.1], [0.4, 0.4], [0.9, 0.9]]).unwrap();
        let r = verify_corollary_lw11(&line, &q, 2.0, 1, 2.0, 0.0, 1_000_000).unwrap();
        assert!(r.pass && r.vacuous);
    }

    #[test]
    fn report_pass_rule() {
        let p = ReportParams::Bounds {
            samples: 1,
            seed: 0,
        };
        assert!(VerificationReport::new("a", 1.0, 1.0, 1.0, true, p.clone(), vec![]).pass);
        assert!(VerificationReport::new("a", 1.0 + 1e-10, 1.0, 1.0, true, p.clone(), vec![]).pass);
        assert!(!VerificationReport::new("a", 1.0 + 1e-8, 1.0, 1.0, true, p.clone(), vec![]).pass);
        let r = VerificationReport::new("a", 1e-300, 0.0, 1.0, true, p.clone(), vec![]);
        assert!(!r.pass && r.ratio.is_infinite());
        let r = VerificationReport::new("a", 0.0, 0.0, 1.0, true, p, vec![]);
        assert!(r.pass && r.vacuous && r.ratio == 0.0);
    }

    #[test]
    fn pointwise_bounds_hold() {
        let r = verify_pointwise_bounds(500, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.lhs <= 1.0 + ASSERT_TOLERANCE);
    }
}
