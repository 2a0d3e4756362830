//! Quantitative analysis of the travelling-wall counterexample.
//!
//! On the wall plateau the slow characteristic obeys an autonomous drift
//! equation in w = 2σ − t:
//!
//! ```text
//! w' = −F(k w, k),   F(z, k) = (1 + 2√(1 + 3 s)) / (1 + 4 s),  s = k² f'(z)²
//! ```
//!
//! Since F > 0, time along the orbit equals the quadrature of 1/F, and
//! the period integral H₀ = ∫₀¹ dz / F controls the drift: once H₀ > 1,
//! 2σ(t) ≥ (1 − 1/H₀)(t − t₀) − 1/k, so the slow characteristic can never
//! move more than half a wavelength to the left. A wave number with
//! k ∫|f'| > √2 suffices for the wall; k ∫|f'| > √6 leaves room for the
//! widened cones inside a narrow channel under the wall, whose dropped
//! offset terms this module bounds explicitly.

use crate::boundary::{BoundaryCurve2D, StefanovWallParams, WaveShape};
use crate::characteristics::{characteristic_speeds, SpeedPair};
use crate::error::{CoreError, Result};
use crate::numerics::{adaptive_simpson, bisect, rk4_step};
use serde::{Deserialize, Serialize};

/// Quadrature tolerance for H₀ and for the time-identity checks.
pub const TOL_QUAD: f64 = 1e-8;

/// Autonomous drift rate F(z, k) of the slow characteristic on the wall
/// plateau; always positive. At critical points of f it equals 3.
pub fn drift_rate(wave: &WaveShape, wave_number: u32, z: f64) -> f64 {
    widened_drift_rate(wave, wave_number, z, 1.0)
}

/// Drift rate with the cone constant widened from 1 to `cone_constant`
/// (2 + remainder for channel dynamics; 1 recovers the wall rate).
pub fn widened_drift_rate(wave: &WaveShape, wave_number: u32, z: f64, cone_constant: f64) -> f64 {
    let k = wave_number as f64;
    let s = (k * wave.d1(z)).powi(2);
    let c = cone_constant;
    (1.0 + 2.0 * (c + (4.0 * c - 1.0) * s).sqrt()) / (1.0 + 4.0 * s)
}

/// Slow/fast speeds on the plateau under a widened cone constant.
pub fn widened_speeds(wave: &WaveShape, wave_number: u32, z: f64, cone_constant: f64) -> SpeedPair {
    let k = wave_number as f64;
    let s = (k * wave.d1(z)).powi(2);
    let disc = (cone_constant + (4.0 * cone_constant - 1.0) * s).sqrt();
    SpeedPair {
        lower: (2.0 * s - disc) / (1.0 + 4.0 * s),
        upper: (2.0 * s + disc) / (1.0 + 4.0 * s),
    }
}

/// Period integral H₀ = ∫₀¹ dz / F(z, k) by adaptive quadrature.
pub fn h0(wave: &WaveShape, wave_number: u32) -> f64 {
    h0_widened(wave, wave_number, 1.0)
}

/// H₀ for the widened cone: ∫₀¹ dz / F̃(z, k).
pub fn h0_widened(wave: &WaveShape, wave_number: u32, cone_constant: f64) -> f64 {
    adaptive_simpson(
        &|z| 1.0 / widened_drift_rate(wave, wave_number, z, cone_constant),
        0.0,
        1.0,
        TOL_QUAD,
    )
}

/// Total variation ∫₀¹ |f'(z)| dz, split at the sign changes of f' so the
/// quadrature never straddles a kink of the integrand.
pub fn wave_total_variation(wave: &WaveShape) -> f64 {
    let mut cuts = vec![0.0];
    cuts.extend(wave.d1_zeros());
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += adaptive_simpson(&|z| wave.d1(z).abs(), w[0], w[1], TOL_QUAD).abs();
        }
    }
    total
}

/// Minimal integer wave number with k ∫|f'| strictly above the threshold
/// (√2 for the bare wall, √6 when a channel must also be blocked).
/// Errors when f' vanishes identically.
pub fn choose_wave_number(wave: &WaveShape, channel: bool) -> Result<u32> {
    let tv = wave_total_variation(wave);
    if tv < 1e-12 {
        return Err(CoreError::NoValidWaveNumber);
    }
    let threshold = if channel { 6.0f64.sqrt() } else { 2.0f64.sqrt() };
    let mut k = (threshold / tv).floor() as u32 + 1;
    while (k as f64) * tv <= threshold {
        k += 1;
    }
    Ok(k)
}

/// Integral of dz/F over [a, b] using the periodic decomposition
/// (b − a = m + r): m·H₀ plus an adaptive tail over [a, a + r].
pub fn inverse_rate_integral(wave: &WaveShape, wave_number: u32, cone_constant: f64, a: f64, b: f64) -> f64 {
    let h = h0_widened(wave, wave_number, cone_constant);
    let span = b - a;
    let m = span.floor();
    let r = span - m;
    let tail = adaptive_simpson(
        &|z| 1.0 / widened_drift_rate(wave, wave_number, z, cone_constant),
        a,
        a + r,
        TOL_QUAD,
    );
    m * h + tail
}

/// Outcome of the drift lower-bound verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum WallBoundOutcome {
    /// The displayed bound held pointwise over the horizon.
    Verified(WallBoundReport),
    /// H₀ ≤ 1: the bound is vacuous (drift slope not positive).
    NotApplicable { h0: f64 },
    /// First time at which the bound failed.
    Violated { t: f64, sigma: f64, bound: f64 },
}

/// Diagnostics from a verified run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WallBoundReport {
    pub h0: f64,
    pub drift_slope: f64,
    pub min_sigma: f64,
    /// Largest deviation |(t − t₀) − (1/k)∫ dz/F| along the trajectory.
    pub max_identity_residual: f64,
    /// Worst slack of the displayed bound (min over t of lhs − rhs).
    pub min_bound_slack: f64,
    /// (t, w) samples of the autonomous drift orbit.
    pub w_samples: Vec<(f64, f64)>,
}

/// Drift/threshold summary for one wall instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WallAnalysis {
    pub wave_number: u32,
    pub wave_total_variation: f64,
    pub h0: f64,
    pub drift_slope: f64,
}

impl WallAnalysis {
    pub fn new(wave: &WaveShape, wave_number: u32) -> Self {
        let h = h0(wave, wave_number);
        Self {
            wave_number,
            wave_total_variation: wave_total_variation(wave),
            h0: h,
            drift_slope: 1.0 - 1.0 / h,
        }
    }
}

/// Integrate the autonomous drift equation for `horizon` time units and
/// check the displayed lower bound 2σ(t) ≥ (1 − 1/H₀)(t − t₀) − 1/k and
/// the exact time identity t − t₀ = (1/k) ∫ dz/F, both pointwise.
///
/// The integration runs in w = 2σ − t, where the equation is autonomous,
/// so the bound is checked on the plateau dynamics for the full horizon
/// regardless of how far right the characteristic drifts.
pub fn verify_wall_bound(
    wave: &WaveShape,
    wave_number: u32,
    sigma0: f64,
    t0: f64,
    horizon: f64,
    tolerance: f64,
) -> WallBoundOutcome {
    verify_drift_bound(wave, wave_number, 1.0, sigma0, t0, horizon, tolerance)
}

/// The same verification under a widened cone constant.
pub fn verify_drift_bound(
    wave: &WaveShape,
    wave_number: u32,
    cone_constant: f64,
    sigma0: f64,
    t0: f64,
    horizon: f64,
    tolerance: f64,
) -> WallBoundOutcome {
    let k = wave_number as f64;
    let h = h0_widened(wave, wave_number, cone_constant);
    if h <= 1.0 {
        return WallBoundOutcome::NotApplicable { h0: h };
    }
    let slope = 1.0 - 1.0 / h;

    // Fixed-step RK4 on w' = −F(kw) with Richardson acceptance.
    let w0 = 2.0 * sigma0 - t0;
    let mut rhs = |_t: f64, w: f64| -widened_drift_rate(wave, wave_number, k * w, cone_constant);
    let run = |n: usize, rhs: &mut dyn FnMut(f64, f64) -> f64| -> Vec<(f64, f64)> {
        let hstep = horizon / n as f64;
        let mut w = w0;
        let mut out = Vec::with_capacity(n + 1);
        out.push((t0, w));
        for i in 0..n {
            let t = t0 + i as f64 * hstep;
            w = rk4_step(rhs, t, w, hstep);
            out.push((t0 + (i + 1) as f64 * hstep, w));
        }
        out
    };
    let mut n = ((horizon * 512.0) as usize).clamp(1 << 10, 1 << 21);
    let mut prev = run(n, &mut rhs);
    let samples = loop {
        n *= 2;
        let cur = run(n, &mut rhs);
        if (cur.last().unwrap().1 - prev.last().unwrap().1).abs() < 1e-9 || n >= 1 << 22 {
            break cur;
        }
        prev = cur;
    };

    let mut min_sigma = f64::INFINITY;
    let mut min_slack = f64::INFINITY;
    let mut max_resid = 0.0f64;
    let stride = (samples.len() / 2000).max(1);
    let mut w_out = Vec::new();
    for (i, &(t, w)) in samples.iter().enumerate() {
        let sigma = 0.5 * (w + t);
        min_sigma = min_sigma.min(sigma);
        let bound = slope * (t - t0) - 1.0 / k;
        let slack = 2.0 * sigma - bound;
        min_slack = min_slack.min(slack);
        if slack < -tolerance {
            return WallBoundOutcome::Violated { t, sigma, bound };
        }
        if i % stride == 0 || i + 1 == samples.len() {
            // Exact identity: elapsed time equals the inverse-rate quadrature.
            let quad = inverse_rate_integral(wave, wave_number, cone_constant, k * w, k * w0) / k;
            max_resid = max_resid.max(((t - t0) - quad).abs());
            w_out.push((t, w));
        }
    }
    WallBoundOutcome::Verified(WallBoundReport {
        h0: h,
        drift_slope: slope,
        min_sigma,
        max_identity_residual: max_resid,
        min_bound_slack: min_slack,
        w_samples: w_out,
    })
}

/// Certified offset-coordinate geometry of the channel under the wall.
///
/// The offset map x(σ,t) + η ν(σ,t) (ν the downward unit normal) is a
/// valid chart while the dropped terms of the channel speed inequality
/// stay below one:
///
/// ```text
/// R(η) = η · sup( 2 Λ̃ |x_σ| |ν̇| + 2 |x_t| |ν̇| ) + η² · sup|ν̇|²
/// ```
///
/// `delta` is the largest η with R(η) < 1; any channel width below it is
/// admissible and yields the widened cone constant `2 + R(ε)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelGeometry {
    pub params: StefanovWallParams,
    pub epsilon: f64,
    pub delta: f64,
    /// Remainder at the chosen width.
    pub remainder: f64,
    /// Widened cone constant 2 + remainder used for the channel speeds.
    pub cone_constant: f64,
    /// sup over the wall of the normal-variation bound |ν̇|.
    pub nu_dot_sup: f64,
    /// Coefficients of R(η) = linear·η + quadratic·η².
    pub remainder_linear: f64,
    pub remainder_quadratic: f64,
    /// Bound on |Λ̃±| used in the remainder assembly.
    pub speed_bound: f64,
    /// Minimum offset-map Jacobian determinant at η = ε over the grid.
    pub min_offset_jacobian: f64,
}

/// Assemble the channel geometry. `epsilon = None` picks δ/2. Requested
/// widths at or above δ are rejected, naming δ.
pub fn build_channel(params: &StefanovWallParams, epsilon: Option<f64>) -> Result<ChannelGeometry> {
    params.validate(512)?;
    let n_sigma = 1024usize;
    let n_t = 256usize;
    let width = params.inner_half_width + params.taper_width;

    // Iterate the speed bound once to a fixed point: start from the
    // widened cones with remainder 1 (the admissibility edge), assemble
    // R's coefficients, then recompute with the implied remainder.
    let mut speed_bound = widened_speed_sup(params, 3.0);
    let mut linear = 0.0;
    let mut quadratic = 0.0;
    let mut nu_dot_sup = 0.0f64;
    for _ in 0..2 {
        linear = 0.0;
        quadratic = 0.0;
        nu_dot_sup = 0.0;
        for i in 0..=n_sigma {
            let sigma = -width + 2.0 * width * i as f64 / n_sigma as f64;
            for j in 0..n_t {
                let t = j as f64 / n_t as f64;
                let jet = params.slope_jet(sigma, t);
                let one_g2 = 1.0 + jet.g * jet.g;
                let nu_sigma = jet.g_sigma.abs() / one_g2;
                let nu_t = jet.g_t.abs() / one_g2;
                let nu_dot = speed_bound * nu_sigma + nu_t;
                let x_sigma_norm = one_g2.sqrt();
                let x_t_norm = jet.height_t.abs();
                let lin_here = 2.0 * speed_bound * x_sigma_norm * nu_dot + 2.0 * x_t_norm * nu_dot;
                linear = f64::max(linear, lin_here);
                quadratic = f64::max(quadratic, nu_dot * nu_dot);
                nu_dot_sup = f64::max(nu_dot_sup, nu_dot);
            }
        }
        let delta = largest_admissible(linear, quadratic);
        let remainder = linear * delta + quadratic * delta * delta;
        speed_bound = widened_speed_sup(params, 2.0 + remainder);
    }
    let delta = largest_admissible(linear, quadratic);
    let eps = epsilon.unwrap_or(0.5 * delta);
    if eps >= delta || eps <= 0.0 {
        return Err(CoreError::ChannelTooWide {
            requested: eps,
            delta,
        });
    }
    let remainder = linear * eps + quadratic * eps * eps;

    // Offset-map injectivity at the chosen width: the (σ, η) chart has
    // Jacobian determinant -(|x_σ| + η ν_σ·x̂_σ-component); sampled sign
    // check via the slope jet.
    let mut min_jac = f64::INFINITY;
    for i in 0..=n_sigma {
        let sigma = -width + 2.0 * width * i as f64 / n_sigma as f64;
        for j in 0..n_t {
            let t = j as f64 / n_t as f64;
            let jet = params.slope_jet(sigma, t);
            let one_g2 = 1.0 + jet.g * jet.g;
            // d(offset)/dσ = x_σ + η ν_σ with ν_σ = g_σ (1, g)/(1+g²)^{3/2};
            // projecting on x̂_σ gives |x_σ| + η g_σ/(1+g²) ... determinant
            // against ν (unit, orthogonal to x_σ) is that projection.
            let jac = one_g2.sqrt() + eps * jet.g_sigma / one_g2;
            min_jac = min_jac.min(jac);
        }
    }
    if min_jac <= 0.0 {
        return Err(CoreError::ChannelTooWide {
            requested: eps,
            delta: min_jac.abs(),
        });
    }

    Ok(ChannelGeometry {
        params: *params,
        epsilon: eps,
        delta,
        remainder,
        cone_constant: 2.0 + remainder,
        nu_dot_sup,
        remainder_linear: linear,
        remainder_quadratic: quadratic,
        speed_bound,
        min_offset_jacobian: min_jac,
    })
}

fn largest_admissible(linear: f64, quadratic: f64) -> f64 {
    if quadratic <= 0.0 {
        if linear <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / linear
        }
    } else {
        (-linear + (linear * linear + 4.0 * quadratic).sqrt()) / (2.0 * quadratic)
    }
}

fn widened_speed_sup(params: &StefanovWallParams, cone_constant: f64) -> f64 {
    let mut sup = 0.0f64;
    let n = 4096;
    for i in 0..n {
        let z = i as f64 / n as f64;
        let s = widened_speeds(&params.wave, params.wave_number, z, cone_constant);
        sup = sup.max(s.lower.abs()).max(s.upper.abs());
    }
    sup
}

/// Outcome of the channel traversal check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ChannelOutcome {
    /// No widened-cone curve starting at σ = M reaches −M in the horizon.
    Blocked {
        h0_widened: f64,
        min_sigma: f64,
        bound: WallBoundReport,
    },
    /// A traversal occurred; carries the offending trajectory.
    Traversed {
        t: f64,
        trajectory: Vec<(f64, f64)>,
    },
}

/// Integrate the worst-case leftward channel dynamics σ' = Λ̃−(σ, t)
/// (equivalently the widened autonomous drift) from σ₀ = M and verify
/// that σ stays above −M for the whole horizon.
pub fn verify_channel_inaccessibility(geom: &ChannelGeometry, horizon: f64) -> ChannelOutcome {
    verify_channel_with_constant(geom, geom.cone_constant, horizon)
}

/// Traversal check under an explicit cone constant. Oversized constants
/// model a remainder too large for the argument; they serve as negative
/// controls for the detector.
pub fn verify_channel_with_constant(
    geom: &ChannelGeometry,
    cone_constant: f64,
    horizon: f64,
) -> ChannelOutcome {
    let m = geom.params.inner_half_width;
    let outcome = verify_drift_bound(
        &geom.params.wave,
        geom.params.wave_number,
        cone_constant,
        m,
        0.0,
        horizon,
        1e-5,
    );
    match outcome {
        WallBoundOutcome::Verified(report) => {
            if report.min_sigma > -m {
                ChannelOutcome::Blocked {
                    h0_widened: report.h0,
                    min_sigma: report.min_sigma,
                    bound: report,
                }
            } else {
                let traj = report
                    .w_samples
                    .iter()
                    .map(|&(t, w)| (t, 0.5 * (w + t)))
                    .collect();
                ChannelOutcome::Traversed {
                    t: report
                        .w_samples
                        .iter()
                        .find(|&&(t, w)| 0.5 * (w + t) <= -m)
                        .map(|&(t, _)| t)
                        .unwrap_or(horizon),
                    trajectory: traj,
                }
            }
        }
        _ => {
            // Bound not applicable: integrate directly and report the
            // crossing time.
            let k = geom.params.wave_number as f64;
            let wave = geom.params.wave;
            let mut rhs =
                move |_t: f64, w: f64| -widened_drift_rate(&wave, geom.params.wave_number, k * w, cone_constant);
            let n = ((horizon * 4096.0) as usize).max(1 << 12);
            let hstep = horizon / n as f64;
            let mut w = 2.0 * m;
            let mut traj = vec![(0.0, m)];
            for i in 0..n {
                let t = i as f64 * hstep;
                w = rk4_step(&mut rhs, t, w, hstep);
                let t1 = (i + 1) as f64 * hstep;
                let sigma = 0.5 * (w + t1);
                if i % 64 == 0 {
                    traj.push((t1, sigma));
                }
                if sigma <= -m {
                    traj.push((t1, sigma));
                    return ChannelOutcome::Traversed {
                        t: t1,
                        trajectory: traj,
                    };
                }
            }
            ChannelOutcome::Blocked {
                h0_widened: h0_widened(&geom.params.wave, geom.params.wave_number, cone_constant),
                min_sigma: traj.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
                bound: WallBoundReport {
                    h0: 0.0,
                    drift_slope: 0.0,
                    min_sigma: 0.0,
                    max_identity_residual: 0.0,
                    min_bound_slack: 0.0,
                    w_samples: traj,
                },
            }
        }
    }
}

/// Find the fixed point of a scalar map on a bracket (helper re-export
/// used by orchestration code).
pub fn fixed_point_on<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64, tol: f64) -> f64 {
    bisect(&mut |x| f(x) - x, lo, hi, tol)
}

/// Cross-module consistency: the drift rate must reproduce 1 − 2Λ− from
/// the curve-level speeds on the plateau.
pub fn drift_rate_from_curve(curve: &BoundaryCurve2D, sigma: f64, t: f64) -> Result<f64> {
    let s = characteristic_speeds(curve, sigma, t)?;
    Ok(1.0 - 2.0 * s.lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryCurve2D;

    const PI: f64 = std::f64::consts::PI;

    fn sine() -> WaveShape {
        WaveShape::Sine { amplitude: 1.0 }
    }

    #[test]
    fn drift_rate_at_critical_points_is_three() {
        // s = 0 gives (1 + 2)/1 = 3.
        assert!((drift_rate(&sine(), 1, 0.25) - 3.0).abs() < 1e-12);
        assert!((drift_rate(&sine(), 7, 0.75) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn drift_rate_large_s_asymptotics() {
        // F ~ (√3/2)/√s as s → ∞, so F·√s → √3/2. Probe with an s of 1e6
        // by picking z near the steepest point and scaling k.
        let wave = sine();
        let k = 160u32; // s at z=0: (2πk)² ≈ 1.01e6
        let z = 0.0;
        let s = (k as f64 * wave.d1(z)).powi(2);
        assert!(s > 1e6 - 2e4 && s < 1.1e6);
        let f = drift_rate(&wave, k, z);
        let ratio = f * s.sqrt() / (3.0f64.sqrt() / 2.0);
        assert!((ratio - 1.0).abs() < 1e-2, "ratio {ratio}");
        assert!(f > 0.0 && f < 1e-2);
    }

    #[test]
    fn drift_rate_positive_everywhere() {
        for k in [1u32, 2, 5, 9] {
            for i in 0..2000 {
                let z = i as f64 / 2000.0;
                assert!(drift_rate(&sine(), k, z) > 0.0);
            }
        }
    }

    #[test]
    fn drift_rate_matches_curve_level_speeds() {
        // w' from the slow curve field equals −F(kw) on the plateau:
        // 1 − 2Λ−(σ,t) == F(k(2σ−t)) at 1000 points, to 1e-10.
        let params = StefanovWallParams::default_example(2);
        let wall = BoundaryCurve2D::stefanov_wall(params).unwrap();
        let mut state = 5u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let sigma = next() * 3.8 - 1.9;
            let t = next() * 10.0;
            let z = 2.0 * (2.0 * sigma - t);
            let via_curve = drift_rate_from_curve(&wall, sigma, t).unwrap();
            let direct = drift_rate(&params.wave, 2, z);
            assert!((via_curve - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn h0_constant_wave_is_one_third() {
        // f' ≡ 0 ⇒ F ≡ 3 ⇒ H₀ = 1/3.
        let flat = WaveShape::Sine { amplitude: 0.0 };
        assert!((h0(&flat, 1) - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn h0_exceeds_one_for_default_wall() {
        let h = h0(&sine(), 1);
        assert!(h > 1.0, "h0 = {h}");
        // Independent oracle: composite Simpson with uniform refinement.
        let composite = |n: usize| {
            let mut acc = 0.0;
            for i in 0..n {
                let a = i as f64 / n as f64;
                let b = (i + 1) as f64 / n as f64;
                let m = 0.5 * (a + b);
                acc += (b - a) / 6.0
                    * (1.0 / drift_rate(&sine(), 1, a)
                        + 4.0 / drift_rate(&sine(), 1, m)
                        + 1.0 / drift_rate(&sine(), 1, b));
            }
            acc
        };
        let oracle = composite(4096);
        assert!((h - oracle).abs() < 1e-7, "adaptive {h} vs composite {oracle}");
    }

    #[test]
    fn h0_monotone_in_wave_number() {
        let mut prev = 0.0;
        for k in 1..=10 {
            let h = h0(&sine(), k);
            assert!(h >= prev - 1e-12, "h0({k}) = {h} < h0({}) = {prev}", k - 1);
            prev = h;
        }
    }

    #[test]
    fn wave_total_variation_of_sine_is_four() {
        assert!((wave_total_variation(&sine()) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn choose_wave_number_thresholds() {
        // ∫|f'| = 4 > √6: k = 1 for both thresholds.
        assert_eq!(choose_wave_number(&sine(), false).unwrap(), 1);
        assert_eq!(choose_wave_number(&sine(), true).unwrap(), 1);
        // ∫|f'| = 1: k = 2 over √2, k = 3 over √6.
        let quarter = WaveShape::Sine { amplitude: 0.25 };
        assert!((wave_total_variation(&quarter) - 1.0).abs() < 1e-9);
        assert_eq!(choose_wave_number(&quarter, false).unwrap(), 2);
        assert_eq!(choose_wave_number(&quarter, true).unwrap(), 3);
        // Chosen k also certifies H₀ > 1.
        assert!(h0(&quarter, 2) > 1.0);
        let flat = WaveShape::Sine { amplitude: 0.0 };
        assert!(matches!(
            choose_wave_number(&flat, false),
            Err(CoreError::NoValidWaveNumber)
        ));
    }

    #[test]
    fn wall_bound_verified_for_default_instance() {
        match verify_wall_bound(&sine(), 1, 0.0, 0.0, 100.0, 1e-5) {
            WallBoundOutcome::Verified(report) => {
                assert!(report.h0 > 1.0);
                assert!(report.min_sigma > -0.5, "min sigma {}", report.min_sigma);
                assert!(report.max_identity_residual < 1e-6);
                assert!(report.min_bound_slack > -1e-5);
            }
            other => panic!("expected verified, got {other:?}"),
        }
    }

    #[test]
    fn wall_bound_not_applicable_for_flat_wave() {
        // f' ≡ 0 gives w' = −3, σ(t) = σ₀ − (t − t₀), H₀ = 1/3: vacuous.
        let flat = WaveShape::Sine { amplitude: 0.0 };
        match verify_wall_bound(&flat, 1, 0.0, 0.0, 5.0, 1e-6) {
            WallBoundOutcome::NotApplicable { h0 } => assert!((h0 - 1.0 / 3.0).abs() < 1e-9),
            other => panic!("expected NotApplicable, got {other:?}"),
        }
    }

    #[test]
    fn wall_bound_detects_leftward_wave() {
        // Amplitude 0.2 keeps k = 1 below both thresholds: H₀ < 1 and the
        // characteristic really does run left past −M.
        let weak = WaveShape::Sine { amplitude: 0.2 };
        assert!(h0(&weak, 1) < 1.0);
        match verify_wall_bound(&weak, 1, 0.0, 0.0, 20.0, 1e-6) {
            WallBoundOutcome::NotApplicable { h0 } => assert!(h0 < 1.0),
            other => panic!("expected NotApplicable, got {other:?}"),
        }
    }

    #[test]
    fn time_identity_along_orbit() {
        // t − t₀ and the inverse-rate quadrature agree to 1e-6 pointwise;
        // already asserted inside verify, re-checked here at a few times
        // with an independent direct quadrature (no periodic split).
        if let WallBoundOutcome::Verified(report) = verify_wall_bound(&sine(), 1, 0.0, 0.0, 10.0, 1e-5)
        {
            for &(t, w) in report.w_samples.iter().step_by(100) {
                let direct = adaptive_simpson(&|z| 1.0 / drift_rate(&sine(), 1, z), w, 0.0, 1e-10);
                assert!(((t - 0.0) - direct).abs() < 1e-6, "identity at t={t}");
            }
        } else {
            panic!("expected verified");
        }
    }

    #[test]
    fn widened_cones_nest_the_plain_ones() {
        // Λ̃− ≤ Λ− ≤ Λ+ ≤ Λ̃+ pointwise for any widening above 1.
        for i in 0..500 {
            let z = i as f64 / 500.0;
            let plain = widened_speeds(&sine(), 1, z, 1.0);
            let wide = widened_speeds(&sine(), 1, z, 2.7);
            assert!(wide.lower <= plain.lower + 1e-14);
            assert!(plain.upper <= wide.upper + 1e-14);
        }
    }

    #[test]
    fn channel_geometry_certifies_a_width() {
        let params = StefanovWallParams::default_example(1);
        let geom = build_channel(&params, None).unwrap();
        assert!(geom.delta > 0.0);
        assert!(geom.epsilon > 0.0 && geom.epsilon < geom.delta);
        assert!(geom.remainder < 1.0);
        assert!(geom.min_offset_jacobian > 0.0);
        // R(0) = 0 and R nondecreasing in η.
        let r = |eta: f64| geom.remainder_linear * eta + geom.remainder_quadratic * eta * eta;
        assert_eq!(r(0.0), 0.0);
        assert!(r(geom.epsilon) <= r(geom.delta) + 1e-12);
        // Requesting a width at δ must fail, naming δ.
        match build_channel(&params, Some(geom.delta * 1.5)) {
            Err(CoreError::ChannelTooWide { delta, .. }) => {
                assert!((delta - geom.delta).abs() < 1e-12)
            }
            other => panic!("expected ChannelTooWide, got {other:?}"),
        }
    }

    #[test]
    fn channel_blocked_for_default_instance() {
        let params = StefanovWallParams::default_example(1);
        let geom = build_channel(&params, None).unwrap();
        match verify_channel_inaccessibility(&geom, 100.0) {
            ChannelOutcome::Blocked {
                h0_widened,
                min_sigma,
                ..
            } => {
                assert!(h0_widened > 1.0);
                assert!(min_sigma > -params.inner_half_width);
            }
            ChannelOutcome::Traversed { t, .. } => panic!("unexpected traversal at t={t}"),
        }
    }

    #[test]
    fn oversized_remainder_is_detected_as_traversal() {
        // Negative control: with the cone constant forced far above what
        // the argument tolerates, H₀ drops below 1 and the detector must
        // report a traversal.
        let params = StefanovWallParams::default_example(1);
        let geom = build_channel(&params, None).unwrap();
        let bad_constant = 90.0;
        assert!(h0_widened(&params.wave, 1, bad_constant) < 1.0);
        match verify_channel_with_constant(&geom, bad_constant, 200.0) {
            ChannelOutcome::Traversed { t, trajectory } => {
                assert!(t > 0.0);
                assert!(trajectory.last().unwrap().1 <= -params.inner_half_width);
            }
            ChannelOutcome::Blocked { .. } => panic!("negative control failed to traverse"),
        }
    }

    #[test]
    fn plateau_speed_range_brackets() {
        // The widened sup bound must dominate the plain plateau speeds.
        let params = StefanovWallParams::default_example(1);
        let sup = widened_speed_sup(&params, 2.0);
        assert!(sup >= 2.0f64.sqrt() - 1e-9);
        assert!(sup < 1.6);
        let s_max = 4.0 * PI * PI;
        let plain_lower_at_smax = (2.0 * s_max - (1.0 + 3.0 * s_max).sqrt()) / (1.0 + 4.0 * s_max);
        assert!(plain_lower_at_smax < sup);
    }
}
