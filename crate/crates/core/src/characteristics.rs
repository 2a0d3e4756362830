//! Null characteristic dynamics on a moving boundary.
//!
//! A curve x(σ(t), t) on the boundary is null for the Minkowski metric
//! restricted to the boundary exactly when σ' solves
//!
//! ```text
//! 0 = 1 − |x_t|² − 2 (x_σ·x_t) σ' − |x_σ|² σ'²
//! ```
//!
//! The two roots are the slow/fast speed fields returned by
//! [`characteristic_speeds`]; every blend between them is time-like.
//! This module integrates those scalar ODEs with a fixed-step RK4 whose
//! step is fixed by Richardson acceptance, builds one-period Poincaré
//! maps, and classifies bounded orbits into the periodic / asymptotic /
//! unbounded trichotomy forced by time periodicity.

use crate::boundary::{BoundaryCurve2D, SigmaDomain};
use crate::error::{CoreError, Result};
use crate::numerics::dot;
use serde::{Deserialize, Serialize};

/// Tolerance accepted for the end state when the integrator halves its
/// step (Richardson acceptance).
pub const TOL_ODE: f64 = 1e-8;
/// σ-tolerance for periodic / asymptotic decisions of the Poincaré map.
pub const TOL_ORBIT: f64 = 1e-6;
/// Discriminants in [-NEG_DISC_SLACK, 0) are clamped to zero; anything
/// below is a time-likeness violation.
const NEG_DISC_SLACK: f64 = 1e-12;

/// The pair of null speeds at a point, `lower < upper`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpeedPair {
    pub lower: f64,
    pub upper: f64,
}

/// Both null speeds at (σ, t).
///
/// `lower/upper = (−x_σ·x_t ∓ √((x_σ·x_t)² + (1−|x_t|²)|x_σ|²)) / |x_σ|²`.
/// The discriminant equals the time-like margin, so it is positive on
/// valid curves; values within `-1e-12` of zero are clamped.
pub fn characteristic_speeds(curve: &BoundaryCurve2D, sigma: f64, t: f64) -> Result<SpeedPair> {
    let jet = curve.eval_unchecked(sigma, t);
    let g2 = dot(jet.x_sigma, jet.x_sigma);
    if g2 <= 0.0 {
        return Err(CoreError::DegenerateTangent { sigma, t });
    }
    let p = dot(jet.x_sigma, jet.x_t);
    let mut disc = p * p + (1.0 - dot(jet.x_t, jet.x_t)) * g2;
    if disc < 0.0 {
        if disc < -NEG_DISC_SLACK {
            return Err(CoreError::TimelikeViolation {
                sigma,
                t,
                margin: disc,
            });
        }
        disc = 0.0;
    }
    let r = disc.sqrt();
    Ok(SpeedPair {
        lower: (-p - r) / g2,
        upper: (-p + r) / g2,
    })
}

/// A null/time-like direction field on a boundary: the blend
/// `α·lower + (1−α)·upper` (α = 0 is the fast field, α = 1 the slow one).
#[derive(Debug, Clone)]
pub struct SpeedField {
    curve: BoundaryCurve2D,
    blend: f64,
}

impl SpeedField {
    pub fn new(curve: BoundaryCurve2D, blend: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&blend) {
            return Err(CoreError::InvalidConfig(format!(
                "field blend {blend} must lie in [0, 1]"
            )));
        }
        Ok(Self { curve, blend })
    }

    /// The fast field (α = 0).
    pub fn upper(curve: BoundaryCurve2D) -> Self {
        Self { curve, blend: 0.0 }
    }

    /// The slow field (α = 1).
    pub fn lower(curve: BoundaryCurve2D) -> Self {
        Self { curve, blend: 1.0 }
    }

    pub fn curve(&self) -> &BoundaryCurve2D {
        &self.curve
    }

    pub fn blend(&self) -> f64 {
        self.blend
    }

    pub fn value(&self, sigma: f64, t: f64) -> Result<f64> {
        let s = characteristic_speeds(&self.curve, sigma, t)?;
        Ok(self.blend * s.lower + (1.0 - self.blend) * s.upper)
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    /// Reached the requested end time.
    HorizonReached,
    /// Left an interval σ-domain; carries the exit parameter.
    LeftInterval { end: f64 },
    /// A step tripped the margin assertion.
    StepFailure,
}

/// An integrated characteristic σ(t) with unwrapped σ samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub termination: Termination,
    /// Signed lap count for circle domains (zero on intervals).
    pub winding: i64,
}

impl Trajectory {
    pub fn start(&self) -> (f64, f64) {
        (self.times[0], self.sigmas[0])
    }

    pub fn end(&self) -> (f64, f64) {
        (
            *self.times.last().expect("nonempty trajectory"),
            *self.sigmas.last().expect("nonempty trajectory"),
        )
    }

    pub fn min_sigma(&self) -> f64 {
        self.sigmas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_sigma(&self) -> f64 {
        self.sigmas.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Linear interpolation of σ at time `t` within the sampled range.
    pub fn sigma_at(&self, t: f64) -> f64 {
        let ts = &self.times;
        if ts.len() < 2 {
            return self.sigmas[0];
        }
        let forward = ts[ts.len() - 1] >= ts[0];
        let mut lo = 0usize;
        let mut hi = ts.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if (ts[mid] <= t) == forward {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = if ts[hi] == ts[lo] {
            0.0
        } else {
            (t - ts[lo]) / (ts[hi] - ts[lo])
        };
        self.sigmas[lo] + w.clamp(0.0, 1.0) * (self.sigmas[hi] - self.sigmas[lo])
    }
}

/// Integrate σ' = field(σ, t) from (σ0, t0) to `t_end` (backward when
/// `t_end < t0`).
///
/// Fixed-step RK4; the number of steps doubles until halving it moves
/// σ(t_end) by less than [`TOL_ODE`]. Circle domains integrate the
/// unwrapped coordinate and report the signed lap count; interval
/// domains terminate at the first step that exits, with the crossing
/// located by linear interpolation.
pub fn integrate_characteristic(
    field: &SpeedField,
    sigma0: f64,
    t0: f64,
    t_end: f64,
) -> Result<Trajectory> {
    let span = (t_end - t0).abs();
    if span == 0.0 {
        return Ok(Trajectory {
            times: vec![t0],
            sigmas: vec![sigma0],
            termination: Termination::HorizonReached,
            winding: 0,
        });
    }
    let mut n: usize = ((span * 64.0).ceil() as usize).clamp(64, 1 << 22);
    let mut prev = run_fixed(field, sigma0, t0, t_end, n, false)?;
    loop {
        n *= 2;
        let cur = run_fixed(field, sigma0, t0, t_end, n, false)?;
        let (pt, ps) = prev.1;
        let (ct, cs) = cur.1;
        if (ps - cs).abs() + (pt - ct).abs() < TOL_ODE || n >= 1 << 23 {
            let full = run_fixed(field, sigma0, t0, t_end, n, true)?;
            return Ok(full.0);
        }
        prev = cur;
    }
}

/// One fixed-step run; returns the trajectory (recorded or not) and the
/// final (t, σ).
fn run_fixed(
    field: &SpeedField,
    sigma0: f64,
    t0: f64,
    t_end: f64,
    n: usize,
    record: bool,
) -> Result<(Trajectory, (f64, f64))> {
    let h = (t_end - t0) / n as f64;
    let interval = match field.curve().sigma_domain() {
        SigmaDomain::Interval { lo, hi } => Some((lo, hi)),
        SigmaDomain::Circle { .. } => None,
    };
    let mut times = Vec::with_capacity(if record { n + 1 } else { 2 });
    let mut sigmas = Vec::with_capacity(if record { n + 1 } else { 2 });
    if record {
        times.push(t0);
        sigmas.push(sigma0);
    }
    let mut sigma = sigma0;
    let mut t = t0;
    let mut termination = Termination::HorizonReached;
    for i in 0..n {
        let t_next = t0 + (i + 1) as f64 * (t_end - t0) / n as f64;
        let k1 = field.value(sigma, t)?;
        let k2 = field.value(sigma + 0.5 * h * k1, t + 0.5 * h)?;
        let k3 = field.value(sigma + 0.5 * h * k2, t + 0.5 * h)?;
        let k4 = field.value(sigma + h * k3, t_next)?;
        let sigma_next = sigma + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if let Some((lo, hi)) = interval {
            if sigma_next < lo || sigma_next > hi {
                let edge = if sigma_next < lo { lo } else { hi };
                let w = if sigma_next != sigma {
                    ((edge - sigma) / (sigma_next - sigma)).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                t = t + w * h;
                sigma = edge;
                termination = Termination::LeftInterval { end: edge };
                if record {
                    times.push(t);
                    sigmas.push(sigma);
                }
                break;
            }
        }
        sigma = sigma_next;
        t = t_next;
        if record {
            times.push(t);
            sigmas.push(sigma);
        }
    }
    if !record {
        times = vec![t0, t];
        sigmas = vec![sigma0, sigma];
    }
    let winding = match field.curve().sigma_domain() {
        SigmaDomain::Circle { period } => ((sigma - sigma0) / period + 1e-9).floor() as i64,
        SigmaDomain::Interval { .. } => 0,
    };
    Ok((
        Trajectory {
            times,
            sigmas,
            termination,
            winding,
        },
        (t, sigma),
    ))
}

/// One-period flow map σ0 ↦ σ(t0 + T) in the unwrapped coordinate.
/// Monotone in σ0: solutions of a scalar ODE cannot cross.
pub fn poincare_map(field: &SpeedField, sigma0: f64, t0: f64) -> Result<f64> {
    let period = field.curve().time_period().ok_or_else(|| {
        CoreError::InvalidConfig("Poincaré map requires a time-periodic curve".into())
    })?;
    let traj = integrate_characteristic(field, sigma0, t0, t0 + period)?;
    if traj.termination != Termination::HorizonReached {
        return Err(CoreError::StepFailure {
            t: traj.end().0,
            sigma: traj.end().1,
            reason: "trajectory left the domain within one period".into(),
        });
    }
    Ok(traj.end().1)
}

/// Orbit classification of the one-period map iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitClass {
    Periodic,
    AsymptoticFromBelow,
    AsymptoticFromAbove,
    UnboundedUp,
    UnboundedDown,
}

/// Result of [`classify_orbit`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitReport {
    pub kind: OrbitClass,
    /// σ(t0 + nT) for n = 0..=N.
    pub section: Vec<f64>,
    /// Fixed point of the one-period map, for asymptotic orbits.
    pub fixed_point: Option<f64>,
    /// |P(σ*) − σ*| at the located fixed point.
    pub fixed_point_residual: Option<f64>,
    /// Geometric decay ratio of the section residuals, when asymptotic.
    pub convergence_rate: Option<f64>,
    /// Mean drift per period, for unbounded orbits.
    pub rotation_number: Option<f64>,
    /// One sampled period of the limit orbit, for asymptotic orbits.
    pub limit_orbit: Option<Vec<(f64, f64)>>,
}

/// Iterate the Poincaré map for `horizon_periods` periods and classify:
/// fixed section within [`TOL_ORBIT`] after one period ⇒ periodic;
/// vanishing drift ⇒ asymptotic to the periodic orbit at the map's fixed
/// point (located by bisection, sound because the map is monotone);
/// persistent single-signed drift ⇒ unbounded with a rotation number.
/// Anything else is an explicit undetermined-at-horizon error carrying
/// the drift sequence.
pub fn classify_orbit(
    field: &SpeedField,
    sigma0: f64,
    t0: f64,
    horizon_periods: usize,
) -> Result<OrbitReport> {
    let n_max = horizon_periods.max(50);
    let period = field.curve().time_period().ok_or_else(|| {
        CoreError::InvalidConfig("orbit classification requires a time-periodic curve".into())
    })?;
    let mut section = Vec::with_capacity(n_max + 1);
    section.push(sigma0);
    for i in 0..n_max {
        let prev = section[i];
        let next = poincare_map(field, prev, t0)?;
        section.push(next);
    }
    let d1 = section[1] - section[0];
    let d_last = section[n_max] - section[n_max - 1];
    if d1.abs() < TOL_ORBIT {
        let limit = sample_orbit(field, section[0], t0, period)?;
        return Ok(OrbitReport {
            kind: OrbitClass::Periodic,
            section,
            fixed_point: Some(sigma0),
            fixed_point_residual: Some(d1.abs()),
            convergence_rate: None,
            rotation_number: None,
            limit_orbit: Some(limit),
        });
    }
    if d_last.abs() < TOL_ORBIT {
        // Drift died out: asymptotic. Bracket the fixed point ahead of the
        // final section point and bisect P(σ) − σ.
        let dir = d1.signum();
        let mut lo = section[n_max];
        let mut step = (d_last.abs() * 4.0).max(16.0 * TOL_ORBIT);
        let mut hi = lo + dir * step;
        let mut gap = poincare_map(field, hi, t0)? - hi;
        let mut tries = 0;
        while gap * dir > 0.0 {
            step *= 2.0;
            hi += dir * step;
            gap = poincare_map(field, hi, t0)? - hi;
            tries += 1;
            if tries > 60 {
                return Err(CoreError::UndeterminedOrbit {
                    periods: n_max,
                    last_drift: d_last,
                    drifts: drifts_of(&section),
                });
            }
        }
        if dir < 0.0 {
            std::mem::swap(&mut lo, &mut hi);
        }
        let mut f = |s: f64| poincare_map(field, s, t0).unwrap_or(s) - s;
        let star = crate::numerics::bisect(&mut f, lo, hi, 1e-11);
        let residual = (poincare_map(field, star, t0)? - star).abs();
        let limit = sample_orbit(field, star, t0, period)?;
        let rate = {
            let r_far = (section[n_max - 10] - star).abs();
            let r_near = (section[n_max] - star).abs();
            if r_far > 0.0 && r_near > 0.0 {
                Some((r_near / r_far).powf(0.1))
            } else {
                None
            }
        };
        let kind = if dir > 0.0 {
            OrbitClass::AsymptoticFromBelow
        } else {
            OrbitClass::AsymptoticFromAbove
        };
        return Ok(OrbitReport {
            kind,
            section,
            fixed_point: Some(star),
            fixed_point_residual: Some(residual),
            convergence_rate: rate,
            rotation_number: None,
            limit_orbit: Some(limit),
        });
    }
    // Persistent drift: unbounded when it has not decayed appreciably.
    if d_last.abs() >= 0.5 * d1.abs() && d_last.signum() == d1.signum() {
        let rotation = (section[n_max] - section[0]) / n_max as f64;
        let kind = if rotation > 0.0 {
            OrbitClass::UnboundedUp
        } else {
            OrbitClass::UnboundedDown
        };
        return Ok(OrbitReport {
            kind,
            section,
            fixed_point: None,
            fixed_point_residual: None,
            convergence_rate: None,
            rotation_number: Some(rotation),
            limit_orbit: None,
        });
    }
    Err(CoreError::UndeterminedOrbit {
        periods: n_max,
        last_drift: d_last,
        drifts: drifts_of(&section),
    })
}

fn drifts_of(section: &[f64]) -> Vec<f64> {
    section.windows(2).map(|w| w[1] - w[0]).collect()
}

fn sample_orbit(
    field: &SpeedField,
    sigma0: f64,
    t0: f64,
    period: f64,
) -> Result<Vec<(f64, f64)>> {
    let traj = integrate_characteristic(field, sigma0, t0, t0 + period)?;
    let n = 64;
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = t0 + period * i as f64 / n as f64;
        out.push((t, traj.sigma_at(t)));
    }
    Ok(out)
}

/// Extrema of the two speed fields over a validation grid, and whether
/// the spreading-fan condition `min upper > max lower` holds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FanCriterion {
    pub min_upper: f64,
    pub max_lower: f64,
    pub satisfied: bool,
    /// `min_upper − max_lower`; positive margin means every fan spreads
    /// at least this fast.
    pub margin: f64,
}

/// Scan the speed fields over a σ × t grid. When the criterion holds on
/// a circle-domain curve, the fan from any seed covers a full σ-period
/// after `span / margin` time.
pub fn fan_criterion(curve: &BoundaryCurve2D, grid_resolution: usize) -> Result<FanCriterion> {
    let n = grid_resolution.max(64);
    let (s_lo, s_span) = match curve.sigma_domain() {
        SigmaDomain::Circle { period } => (0.0, period),
        SigmaDomain::Interval { lo, hi } => (lo, hi - lo),
    };
    let t_span = curve.time_period().unwrap_or(1.0);
    let mut min_upper = f64::INFINITY;
    let mut max_lower = f64::NEG_INFINITY;
    for i in 0..=n {
        let sigma = s_lo + s_span * i as f64 / n as f64;
        for j in 0..n {
            let t = t_span * j as f64 / n as f64;
            let s = characteristic_speeds(curve, sigma, t)?;
            min_upper = min_upper.min(s.upper);
            max_lower = max_lower.max(s.lower);
        }
    }
    Ok(FanCriterion {
        min_upper,
        max_lower,
        satisfied: min_upper > max_lower,
        margin: min_upper - max_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::StefanovWallParams;

    const PI: f64 = std::f64::consts::PI;

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn unit_circle_speeds() {
        let c = BoundaryCurve2D::unit_circle();
        let s = characteristic_speeds(&c, 0.3, 1.1).unwrap();
        assert!((s.upper - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!((s.lower + 1.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn vieta_product_identity() {
        // upper·lower = −(1−|x_t|²)/|x_σ|² at random points.
        let curves = [
            BoundaryCurve2D::translating_circle([0.0, 0.0], 1.0, [0.05, 0.03], 1.0),
            BoundaryCurve2D::breathing_circle([0.0, 0.0], 1.0, 0.1, 0.0),
            BoundaryCurve2D::slip_circle(0.3, 0.3).unwrap(),
        ];
        let mut state = 42u64;
        for curve in &curves {
            for _ in 0..1000 {
                let sigma = lcg(&mut state);
                let t = lcg(&mut state) * 3.0;
                let s = characteristic_speeds(curve, sigma, t).unwrap();
                let jet = curve.eval_unchecked(sigma, t);
                let g2 = dot(jet.x_sigma, jet.x_sigma);
                let want = -(1.0 - dot(jet.x_t, jet.x_t)) / g2;
                let got = s.upper * s.lower;
                assert!(
                    (got - want).abs() <= 1e-10 * (1.0 + want.abs()),
                    "vieta failed: {got} vs {want}"
                );
                assert!(s.lower < s.upper);
            }
        }
    }

    #[test]
    fn speeds_match_quadratic_roots_oracle() {
        // Independent route: solve |x_σ|² λ² + 2(x_σ·x_t) λ − (1−|x_t|²) = 0
        // with the numerically stable quadratic formula.
        let c = BoundaryCurve2D::translating_circle([0.0, 0.0], 1.0, [0.08, 0.0], 0.0);
        let mut state = 7u64;
        for _ in 0..1000 {
            let sigma = lcg(&mut state);
            let t = lcg(&mut state);
            let jet = c.eval_unchecked(sigma, t);
            let a = dot(jet.x_sigma, jet.x_sigma);
            let b = 2.0 * dot(jet.x_sigma, jet.x_t);
            let cc = -(1.0 - dot(jet.x_t, jet.x_t));
            let disc = (b * b - 4.0 * a * cc).sqrt();
            let q = -0.5 * (b + b.signum() * disc);
            let (mut r1, mut r2) = (q / a, cc / q);
            if r1 > r2 {
                std::mem::swap(&mut r1, &mut r2);
            }
            let s = characteristic_speeds(&c, sigma, t).unwrap();
            assert!((s.lower - r1).abs() < 1e-10);
            assert!((s.upper - r2).abs() < 1e-10);
        }
    }

    #[test]
    fn circle_lap_in_two_pi_time() {
        // Constant speed 1/(2π): after t = 2π exactly one lap.
        let field = SpeedField::upper(BoundaryCurve2D::unit_circle());
        let traj = integrate_characteristic(&field, 0.0, 0.0, 2.0 * PI).unwrap();
        assert_eq!(traj.termination, Termination::HorizonReached);
        assert!((traj.end().1 - 1.0).abs() < 1e-9);
        assert_eq!(traj.winding, 1);
    }

    #[test]
    fn stationary_blend_half_is_constant() {
        let field = SpeedField::new(BoundaryCurve2D::unit_circle(), 0.5).unwrap();
        let traj = integrate_characteristic(&field, 0.37, 0.0, 5.0).unwrap();
        assert!((traj.end().1 - 0.37).abs() < 1e-12);
    }

    #[test]
    fn time_reversal_returns_to_start() {
        let field = SpeedField::upper(
            BoundaryCurve2D::translating_circle([0.0, 0.0], 1.0, [0.05, 0.0], 0.0),
        );
        let fwd = integrate_characteristic(&field, 0.1, 0.0, 3.0).unwrap();
        let back = integrate_characteristic(&field, fwd.end().1, 3.0, 0.0).unwrap();
        assert!((back.end().1 - 0.1).abs() < 1e-7);
    }

    #[test]
    fn local_ode_residual_along_samples() {
        // Consecutive samples satisfy the Simpson quadrature of the field
        // to integrator accuracy.
        let field = SpeedField::upper(
            BoundaryCurve2D::breathing_circle([0.0, 0.0], 1.0, 0.08, 0.0),
        );
        let traj = integrate_characteristic(&field, 0.0, 0.0, 1.0).unwrap();
        for w in traj.times.windows(2).zip(traj.sigmas.windows(2)).take(200) {
            let (ts, ss) = w;
            let h = ts[1] - ts[0];
            let mid_sigma = 0.5 * (ss[0] + ss[1]);
            let quad = h / 6.0
                * (field.value(ss[0], ts[0]).unwrap()
                    + 4.0 * field.value(mid_sigma, 0.5 * (ts[0] + ts[1])).unwrap()
                    + field.value(ss[1], ts[1]).unwrap());
            assert!((ss[1] - ss[0] - quad).abs() < 1e-9);
        }
    }

    #[test]
    fn poincare_monotone_and_semigroup() {
        let field = SpeedField::upper(BoundaryCurve2D::slip_circle(0.3, 0.3).unwrap());
        let mut state = 99u64;
        for _ in 0..100 {
            let a = lcg(&mut state);
            let b = a + 1e-3 + lcg(&mut state) * 0.3;
            let pa = poincare_map(&field, a, 0.0).unwrap();
            let pb = poincare_map(&field, b, 0.0).unwrap();
            assert!(pa < pb, "monotonicity failed: P({a})={pa}, P({b})={pb}");
        }
        // P over two periods equals the composition of one-period maps.
        let two = integrate_characteristic(&field, 0.2, 0.0, 2.0).unwrap().end().1;
        let composed = poincare_map(&field, poincare_map(&field, 0.2, 0.0).unwrap(), 1.0).unwrap();
        assert!((two - composed).abs() < 1e-8);
    }

    #[test]
    fn classify_circle_rotation() {
        let field = SpeedField::upper(BoundaryCurve2D::unit_circle());
        let report = classify_orbit(&field, 0.0, 0.0, 50).unwrap();
        assert_eq!(report.kind, OrbitClass::UnboundedUp);
        let rot = report.rotation_number.unwrap();
        assert!((rot - 1.0 / (2.0 * PI)).abs() < 1e-6);
    }

    #[test]
    fn classify_stationary_noncircular_blend_half() {
        // A stationary ellipse-like Fourier curve: the half blend field
        // vanishes identically, so every orbit is periodic.
        let terms_x = vec![crate::boundary::FourierTerm {
            m: 1,
            n: 0,
            cos_coef: 1.2,
            sin_coef: 0.0,
        }];
        let terms_y = vec![crate::boundary::FourierTerm {
            m: 1,
            n: 0,
            cos_coef: 0.0,
            sin_coef: 0.8,
        }];
        let ellipse = BoundaryCurve2D::fourier(terms_x, terms_y);
        let field = SpeedField::new(ellipse, 0.5).unwrap();
        let report = classify_orbit(&field, 0.13, 0.0, 50).unwrap();
        assert_eq!(report.kind, OrbitClass::Periodic);
    }

    #[test]
    fn classify_slip_circle_asymptotic() {
        // The sliding parametrization carries attracting periodic orbits
        // for the fast field; an orbit between the attractor and the
        // repeller converges monotonically.
        let field = SpeedField::upper(BoundaryCurve2D::slip_circle(0.3, 0.3).unwrap());
        let report = classify_orbit(&field, 0.30, 0.0, 80).unwrap();
        assert!(
            matches!(
                report.kind,
                OrbitClass::AsymptoticFromBelow | OrbitClass::AsymptoticFromAbove
            ),
            "got {:?}",
            report.kind
        );
        let star = report.fixed_point.unwrap();
        assert!(report.fixed_point_residual.unwrap() < 1e-6);
        // Section residuals decrease monotonically toward the fixed point.
        let res: Vec<f64> = report.section.iter().map(|s| (s - star).abs()).collect();
        for w in res.windows(2).take(30) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        // Drift is single-signed after the first period.
        let drifts: Vec<f64> = report.section.windows(2).map(|w| w[1] - w[0]).collect();
        let sign = drifts[0].signum();
        for d in &drifts[1..] {
            assert!(d.signum() == sign || d.abs() < 1e-12);
        }
    }

    #[test]
    fn fan_criterion_circle_and_slow_translation() {
        let fc = fan_criterion(&BoundaryCurve2D::unit_circle(), 64).unwrap();
        assert!((fc.min_upper - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!((fc.max_lower + 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!(fc.satisfied);

        let slow = BoundaryCurve2D::translating_circle(
            [0.0, 0.0],
            1.0,
            [0.01 / (2.0 * PI), 0.0],
            0.0,
        );
        let fc = fan_criterion(&slow, 128).unwrap();
        assert!(fc.satisfied);
        assert!(fc.margin > 0.3, "margin {}", fc.margin);
    }

    #[test]
    fn fan_criterion_wall_extrema_match_plateau_formulas() {
        // On the plateau the speeds are (2s ± √(1+3s))/(1+4s) with
        // s = k²f'² ranging over [0, 4π²k²]; the grid extrema land at the
        // endpoints of that range. Both extrema stay on the same side of
        // 1/2, so the spreading condition itself holds on the wall; what
        // fails for the wall is coverage, since its σ-domain is an
        // interval and the fan drifts rightward (see the drift analysis
        // in `stefanov`).
        let wall =
            BoundaryCurve2D::stefanov_wall(StefanovWallParams::default_example(1)).unwrap();
        let fc = fan_criterion(&wall, 512).unwrap();
        let s_max = 4.0 * PI * PI;
        let upper_at = |s: f64| (2.0 * s + (1.0 + 3.0 * s).sqrt()) / (1.0 + 4.0 * s);
        let lower_at = |s: f64| (2.0 * s - (1.0 + 3.0 * s).sqrt()) / (1.0 + 4.0 * s);
        assert!((fc.min_upper - upper_at(s_max)).abs() < 1e-3);
        assert!((fc.max_lower - lower_at(s_max)).abs() < 1e-3);
        assert!((lower_at(0.0) + 1.0).abs() < 1e-12);
        assert!(fc.min_upper > 0.5 && fc.max_lower < 0.5);
    }

    #[test]
    fn wall_slow_characteristic_never_reaches_minus_m() {
        let wall =
            BoundaryCurve2D::stefanov_wall(StefanovWallParams::default_example(1)).unwrap();
        let field = SpeedField::lower(wall);
        let traj = integrate_characteristic(&field, 0.0, 0.0, 100.0).unwrap();
        assert!(traj.min_sigma() > -2.0, "min sigma {}", traj.min_sigma());
    }

    #[test]
    fn step_failure_on_margin_violation() {
        // A curve that turns superluminal after t = 0.2: integration must
        // fail with a time-likeness error rather than return garbage.
        let c = BoundaryCurve2D::translating_circle([0.0, 0.0], 1.0, [1.4 / TWO_PI_T, 0.0], 0.0);
        let field = SpeedField::upper(c);
        let err = integrate_characteristic(&field, 0.0, 0.0, 1.0);
        assert!(err.is_err());
    }

    const TWO_PI_T: f64 = std::f64::consts::TAU;
}
