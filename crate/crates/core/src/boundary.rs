//! Moving boundary curves in 2+1 spacetime.
//!
//! A boundary is a parametrized family x(σ, t) in the plane together with
//! exact partial derivatives x_σ and x_t. The built-in families are
//! analytic; general curves are truncated Fourier series in (σ, t) that
//! differentiate term by term. The decision quantity everywhere is the
//! time-like margin
//!
//! ```text
//! m(σ, t) = |x_σ|² + (x_t · x_σ)² − |x_σ|² |x_t|²
//! ```
//!
//! which is positive exactly when the normal velocity of the boundary is
//! subluminal (speed < 1 for the wave operator).

use crate::error::{CoreError, Result};
use crate::numerics::{dot, smoothstep, smoothstep_d1, smoothstep_d2};
use serde::{Deserialize, Serialize};

pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Parameter domain of the σ coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SigmaDomain {
    /// σ lives on a circle of the given period (canonically 1).
    Circle { period: f64 },
    /// σ lives on a closed interval; curves terminate at the ends.
    Interval { lo: f64, hi: f64 },
}

impl SigmaDomain {
    pub fn contains(&self, sigma: f64) -> bool {
        match *self {
            SigmaDomain::Circle { .. } => true,
            SigmaDomain::Interval { lo, hi } => (lo..=hi).contains(&sigma),
        }
    }

    /// Length of one σ-period (circle) or of the interval.
    pub fn span(&self) -> f64 {
        match *self {
            SigmaDomain::Circle { period } => period,
            SigmaDomain::Interval { lo, hi } => hi - lo,
        }
    }
}

/// Position and exact first derivatives of a curve at one (σ, t).
#[derive(Debug, Clone, Copy)]
pub struct CurveJet {
    pub x: [f64; 2],
    pub x_sigma: [f64; 2],
    pub x_t: [f64; 2],
}

/// Which construction produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveFamily {
    FourierSeries,
    Circle,
    TranslatingCurve,
    BreathingCircle,
    StefanovWall,
}

/// One real Fourier term `a cos(2π(mσ + nt)) + b sin(2π(mσ + nt))`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FourierTerm {
    pub m: i32,
    pub n: i32,
    pub cos_coef: f64,
    pub sin_coef: f64,
}

/// Periodic profile used by the travelling wall; smooth with period 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WaveShape {
    Sine { amplitude: f64 },
}

impl WaveShape {
    pub fn value(&self, z: f64) -> f64 {
        match *self {
            WaveShape::Sine { amplitude } => amplitude * (TWO_PI * z).sin(),
        }
    }

    pub fn d1(&self, z: f64) -> f64 {
        match *self {
            WaveShape::Sine { amplitude } => amplitude * TWO_PI * (TWO_PI * z).cos(),
        }
    }

    pub fn d2(&self, z: f64) -> f64 {
        match *self {
            WaveShape::Sine { amplitude } => -amplitude * TWO_PI * TWO_PI * (TWO_PI * z).sin(),
        }
    }

    /// Locations of the sign changes of the derivative inside [0, 1),
    /// used to split the total-variation quadrature at its kinks.
    pub fn d1_zeros(&self) -> Vec<f64> {
        match *self {
            WaveShape::Sine { .. } => vec![0.25, 0.75],
        }
    }
}

/// Parameters for the travelling wall `(σ, φ(σ) f(k(2σ − t)))`.
///
/// `φ` is a C2 bump equal to 1 on |σ| ≤ M, supported in (−M−L, M+L),
/// with |φ'| ≤ 1 guaranteed for L > 1.875; `f` has period one and
/// |f| ≤ 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StefanovWallParams {
    pub wave_number: u32,
    pub inner_half_width: f64,
    pub taper_width: f64,
    pub wave: WaveShape,
}

impl StefanovWallParams {
    pub fn new(wave_number: u32, inner_half_width: f64, taper_width: f64, wave: WaveShape) -> Self {
        Self {
            wave_number,
            inner_half_width,
            taper_width,
            wave,
        }
    }

    /// Default instance: f(z) = sin 2πz, M = L = 2.
    pub fn default_example(wave_number: u32) -> Self {
        Self::new(wave_number, 2.0, 2.0, WaveShape::Sine { amplitude: 1.0 })
    }

    /// Bump value and first two derivatives at σ.
    pub fn bump(&self, sigma: f64) -> (f64, f64, f64) {
        let m = self.inner_half_width;
        let l = self.taper_width;
        let d = sigma.abs();
        if d <= m {
            (1.0, 0.0, 0.0)
        } else if d >= m + l {
            (0.0, 0.0, 0.0)
        } else {
            let u = (m + l - d) / l;
            let s = sigma.signum();
            (
                smoothstep(u),
                -s * smoothstep_d1(u) / l,
                smoothstep_d2(u) / (l * l),
            )
        }
    }

    /// Dense-sampling validation of the stated bounds on f and φ.
    pub fn validate(&self, samples: usize) -> Result<()> {
        if self.wave_number == 0 {
            return Err(CoreError::InvalidConfig(
                "wave number must be a positive integer".into(),
            ));
        }
        if self.taper_width <= 1.0 {
            return Err(CoreError::InvalidConfig(format!(
                "taper width {} must exceed 1 so that |phi'| <= 1",
                self.taper_width
            )));
        }
        if self.inner_half_width <= 0.5 {
            return Err(CoreError::InvalidConfig(format!(
                "inner half width {} must exceed 1/2",
                self.inner_half_width
            )));
        }
        let n = samples.max(256);
        for i in 0..=n {
            let z = i as f64 / n as f64;
            if self.wave.value(z).abs() > 1.0 + 1e-12 {
                return Err(CoreError::InvalidConfig(format!(
                    "|f| exceeds 1 at z = {z}"
                )));
            }
        }
        let width = self.inner_half_width + self.taper_width;
        for i in 0..=n {
            let sigma = -width + 2.0 * width * i as f64 / n as f64;
            let (phi, dphi, _) = self.bump(sigma);
            if dphi.abs() > 1.0 + 1e-12 {
                return Err(CoreError::InvalidConfig(format!(
                    "|phi'| exceeds 1 at sigma = {sigma}"
                )));
            }
            if sigma.abs() <= self.inner_half_width && (phi - 1.0).abs() > 1e-12 {
                return Err(CoreError::InvalidConfig(format!(
                    "phi != 1 inside the plateau at sigma = {sigma}"
                )));
            }
            if sigma.abs() >= width && phi.abs() > 1e-12 {
                return Err(CoreError::InvalidConfig(format!(
                    "phi != 0 outside the support at sigma = {sigma}"
                )));
            }
        }
        Ok(())
    }

    /// Slope g = ∂σ x₂ and its σ- and t-derivatives at (σ, t); used by the
    /// channel geometry to bound the normal's variation.
    pub fn slope_jet(&self, sigma: f64, t: f64) -> SlopeJet {
        let k = self.wave_number as f64;
        let z = k * (2.0 * sigma - t);
        let (phi, dphi, ddphi) = self.bump(sigma);
        let f = self.wave.value(z);
        let f1 = self.wave.d1(z);
        let f2 = self.wave.d2(z);
        let g = dphi * f + 2.0 * k * phi * f1;
        let g_sigma = ddphi * f + 4.0 * k * dphi * f1 + 4.0 * k * k * phi * f2;
        let g_t = -k * (dphi * f1 + 2.0 * k * phi * f2);
        SlopeJet {
            height: phi * f,
            g,
            g_sigma,
            g_t,
            height_t: -k * phi * f1,
        }
    }
}

/// Height and slope data of the wall graph x₂ = φ(σ) f(k(2σ − t)).
#[derive(Debug, Clone, Copy)]
pub struct SlopeJet {
    pub height: f64,
    pub g: f64,
    pub g_sigma: f64,
    pub g_t: f64,
    pub height_t: f64,
}

#[derive(Debug, Clone)]
enum FamilyKind {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    /// Circle of fixed radius with periodically translating center
    /// l(t) = (ax sin 2πt, ay sin(2πt + phase)).
    TranslatingCircle {
        center: [f64; 2],
        radius: f64,
        amp: [f64; 2],
        phase: f64,
    },
    BreathingCircle {
        center: [f64; 2],
        base_radius: f64,
        amplitude: f64,
        phase: f64,
    },
    Fourier {
        x_terms: Vec<FourierTerm>,
        y_terms: Vec<FourierTerm>,
    },
    Wall(StefanovWallParams),
}

/// A moving boundary curve with exact derivative evaluation.
#[derive(Debug, Clone)]
pub struct BoundaryCurve2D {
    sigma_domain: SigmaDomain,
    time_period: Option<f64>,
    family: FamilyKind,
}

impl BoundaryCurve2D {
    /// Stationary circle; σ-period 1.
    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        Self {
            sigma_domain: SigmaDomain::Circle { period: 1.0 },
            time_period: Some(1.0),
            family: FamilyKind::Circle { center, radius },
        }
    }

    /// Unit circle at the origin.
    pub fn unit_circle() -> Self {
        Self::circle([0.0, 0.0], 1.0)
    }

    /// Circle translating along l(t) = (ax sin 2πt, ay sin(2πt + phase)).
    pub fn translating_circle(center: [f64; 2], radius: f64, amp: [f64; 2], phase: f64) -> Self {
        Self {
            sigma_domain: SigmaDomain::Circle { period: 1.0 },
            time_period: Some(1.0),
            family: FamilyKind::TranslatingCircle {
                center,
                radius,
                amp,
                phase,
            },
        }
    }

    /// Circle with radius r0 + a sin(2πt + phase).
    pub fn breathing_circle(center: [f64; 2], base_radius: f64, amplitude: f64, phase: f64) -> Self {
        Self {
            sigma_domain: SigmaDomain::Circle { period: 1.0 },
            time_period: Some(1.0),
            family: FamilyKind::BreathingCircle {
                center,
                base_radius,
                amplitude,
                phase,
            },
        }
    }

    /// Truncated Fourier series in (σ, t); σ-period and time period 1.
    pub fn fourier(x_terms: Vec<FourierTerm>, y_terms: Vec<FourierTerm>) -> Self {
        Self {
            sigma_domain: SigmaDomain::Circle { period: 1.0 },
            time_period: Some(1.0),
            family: FamilyKind::Fourier { x_terms, y_terms },
        }
    }

    /// Travelling wall `(σ, φ(σ) f(k(2σ − t)))` on the interval
    /// [−M−L, M+L]; time period 1 because k is an integer.
    pub fn stefanov_wall(params: StefanovWallParams) -> Result<Self> {
        params.validate(512)?;
        let w = params.inner_half_width + params.taper_width;
        Ok(Self {
            sigma_domain: SigmaDomain::Interval { lo: -w, hi: w },
            time_period: Some(1.0),
            family: FamilyKind::Wall(params),
        })
    }

    /// Wall with the bump removed: the graph `(σ, f(k(2σ − t)))` extended
    /// over an arbitrarily wide interval. This is the field that governs
    /// the travelling-wall drift analysis away from the taper.
    pub fn stefanov_wall_core(params: StefanovWallParams, half_width: f64) -> Self {
        let core = StefanovWallParams {
            inner_half_width: half_width,
            taper_width: 1.0 + 1e-9,
            ..params
        };
        Self {
            sigma_domain: SigmaDomain::Interval {
                lo: -half_width,
                hi: half_width,
            },
            time_period: Some(1.0),
            family: FamilyKind::Wall(core),
        }
    }

    /// Unit circle with a tangentially sliding parametrization
    ///
    /// ```text
    /// x(σ, t) = e(h),  h = σ + (c₁/2π) sin 2π(σ−t) + (c₂/2π) sin 2π(2σ−t)
    /// ```
    ///
    /// stored as a truncated Fourier series. The two travelling phase
    /// waves give the characteristic fields a σ-dependent mean drift, so
    /// this family carries attracting and repelling periodic orbits; it is
    /// the standard test bed for the orbit trichotomy. Requires
    /// c₁ + 2c₂ < 1 for a non-degenerate parametrization.
    pub fn slip_circle(c1: f64, c2: f64) -> Result<Self> {
        if c1 < 0.0 || c2 < 0.0 || c1 + 2.0 * c2 >= 1.0 {
            return Err(CoreError::InvalidConfig(format!(
                "slip circle requires c1, c2 >= 0 and c1 + 2 c2 < 1, got ({c1}, {c2})"
            )));
        }
        let h = move |sigma: f64, t: f64| {
            sigma
                + c1 / TWO_PI * (TWO_PI * (sigma - t)).sin()
                + c2 / TWO_PI * (TWO_PI * (2.0 * sigma - t)).sin()
        };
        let map = move |sigma: f64, t: f64| {
            let a = TWO_PI * h(sigma, t);
            [a.cos(), a.sin()]
        };
        let (x_terms, y_terms) = fourier_fit(&map, 64, 24, 1e-13);
        Ok(Self::fourier(x_terms, y_terms))
    }

    pub fn sigma_domain(&self) -> SigmaDomain {
        self.sigma_domain
    }

    pub fn time_period(&self) -> Option<f64> {
        self.time_period
    }

    pub fn family(&self) -> CurveFamily {
        match self.family {
            FamilyKind::Circle { .. } => CurveFamily::Circle,
            FamilyKind::TranslatingCircle { .. } => CurveFamily::TranslatingCurve,
            FamilyKind::BreathingCircle { .. } => CurveFamily::BreathingCircle,
            FamilyKind::Fourier { .. } => CurveFamily::FourierSeries,
            FamilyKind::Wall(_) => CurveFamily::StefanovWall,
        }
    }

    /// Wall parameters, when this curve is a travelling wall.
    pub fn wall_params(&self) -> Option<&StefanovWallParams> {
        match &self.family {
            FamilyKind::Wall(p) => Some(p),
            _ => None,
        }
    }

    /// Position and exact derivatives at (σ, t). Circle-domain σ is
    /// reduced internally; interval-domain σ outside the domain is an
    /// error.
    pub fn eval(&self, sigma: f64, t: f64) -> Result<CurveJet> {
        if let SigmaDomain::Interval { lo, hi } = self.sigma_domain {
            if !(lo..=hi).contains(&sigma) {
                return Err(CoreError::SigmaOutOfDomain { sigma, lo, hi });
            }
        }
        Ok(self.eval_unchecked(sigma, t))
    }

    /// Evaluation without the domain check; interval families are
    /// extended by their defining formula (used by integrators to probe
    /// one step past the edge).
    pub fn eval_unchecked(&self, sigma: f64, t: f64) -> CurveJet {
        match &self.family {
            FamilyKind::Circle { center, radius } => {
                let a = TWO_PI * sigma;
                CurveJet {
                    x: [center[0] + radius * a.cos(), center[1] + radius * a.sin()],
                    x_sigma: [-radius * TWO_PI * a.sin(), radius * TWO_PI * a.cos()],
                    x_t: [0.0, 0.0],
                }
            }
            FamilyKind::TranslatingCircle {
                center,
                radius,
                amp,
                phase,
            } => {
                let a = TWO_PI * sigma;
                let b = TWO_PI * t;
                CurveJet {
                    x: [
                        center[0] + radius * a.cos() + amp[0] * b.sin(),
                        center[1] + radius * a.sin() + amp[1] * (b + phase).sin(),
                    ],
                    x_sigma: [-radius * TWO_PI * a.sin(), radius * TWO_PI * a.cos()],
                    x_t: [
                        amp[0] * TWO_PI * b.cos(),
                        amp[1] * TWO_PI * (b + phase).cos(),
                    ],
                }
            }
            FamilyKind::BreathingCircle {
                center,
                base_radius,
                amplitude,
                phase,
            } => {
                let a = TWO_PI * sigma;
                let b = TWO_PI * t + phase;
                let r = base_radius + amplitude * b.sin();
                let rt = amplitude * TWO_PI * b.cos();
                CurveJet {
                    x: [center[0] + r * a.cos(), center[1] + r * a.sin()],
                    x_sigma: [-r * TWO_PI * a.sin(), r * TWO_PI * a.cos()],
                    x_t: [rt * a.cos(), rt * a.sin()],
                }
            }
            FamilyKind::Fourier { x_terms, y_terms } => {
                let mut jet = CurveJet {
                    x: [0.0, 0.0],
                    x_sigma: [0.0, 0.0],
                    x_t: [0.0, 0.0],
                };
                for (j, terms) in [x_terms, y_terms].into_iter().enumerate() {
                    for term in terms {
                        let ang = TWO_PI * (term.m as f64 * sigma + term.n as f64 * t);
                        let (s, c) = ang.sin_cos();
                        let val = term.cos_coef * c + term.sin_coef * s;
                        let dval = -term.cos_coef * s + term.sin_coef * c;
                        jet.x[j] += val;
                        jet.x_sigma[j] += TWO_PI * term.m as f64 * dval;
                        jet.x_t[j] += TWO_PI * term.n as f64 * dval;
                    }
                }
                jet
            }
            FamilyKind::Wall(p) => {
                let jet = p.slope_jet(sigma, t);
                CurveJet {
                    x: [sigma, jet.height],
                    x_sigma: [1.0, jet.g],
                    x_t: [0.0, jet.height_t],
                }
            }
        }
    }

    /// Time-like margin m = |x_σ|² + (x_t·x_σ)² − |x_σ|²|x_t|²; the
    /// boundary is time-like at (σ, t) exactly when m > 0.
    pub fn timelike_margin(&self, sigma: f64, t: f64) -> f64 {
        let jet = self.eval_unchecked(sigma, t);
        margin_of(&jet)
    }

    /// Norm of the normal component of x_t; equals |ν_x · x_t| for the
    /// unit spatial normal ν_x.
    pub fn normal_speed(&self, sigma: f64, t: f64) -> Result<f64> {
        let jet = self.eval(sigma, t)?;
        let g2 = dot(jet.x_sigma, jet.x_sigma);
        if g2 <= 0.0 {
            return Err(CoreError::DegenerateTangent { sigma, t });
        }
        let proj = dot(jet.x_t, jet.x_sigma) / g2;
        let n = [
            jet.x_t[0] - proj * jet.x_sigma[0],
            jet.x_t[1] - proj * jet.x_sigma[1],
        ];
        Ok(dot(n, n).sqrt())
    }

    /// Infima of |x_σ|² and of the time-like margin over a validation
    /// grid; both must be positive for the curve to be accepted.
    ///
    /// The grid covers one σ-period (or the interval) and one time period
    /// with at least 64 points per axis.
    pub fn uniform_constants(&self, grid_resolution: usize) -> Result<UniformConstants> {
        let n = grid_resolution.max(64);
        let (s_lo, s_span) = match self.sigma_domain {
            SigmaDomain::Circle { period } => (0.0, period),
            SigmaDomain::Interval { lo, hi } => (lo, hi - lo),
        };
        let t_span = self.time_period.unwrap_or(1.0);
        let mut min_nd = f64::INFINITY;
        let mut min_tl = f64::INFINITY;
        let mut worst = (s_lo, 0.0);
        for i in 0..=n {
            let sigma = s_lo + s_span * i as f64 / n as f64;
            for j in 0..n {
                let t = t_span * j as f64 / n as f64;
                let jet = self.eval_unchecked(sigma, t);
                let nd = dot(jet.x_sigma, jet.x_sigma);
                let tl = margin_of(&jet);
                if nd.min(tl) < min_nd.min(min_tl) {
                    worst = (sigma, t);
                }
                min_nd = min_nd.min(nd);
                min_tl = min_tl.min(tl);
            }
        }
        if min_nd <= 0.0 || min_tl <= 0.0 {
            let jet = self.eval_unchecked(worst.0, worst.1);
            return Err(CoreError::CurveRejected {
                sigma: worst.0,
                t: worst.1,
                nondegeneracy: dot(jet.x_sigma, jet.x_sigma),
                timelike_margin: margin_of(&jet),
            });
        }
        Ok(UniformConstants {
            nondegeneracy: min_nd,
            timelike_margin: min_tl,
        })
    }

    /// Residual |x(σ, t+T) − x(σ, t)| sampled over a grid; zero for a
    /// correctly declared time period.
    pub fn periodicity_residual(&self, samples: usize) -> f64 {
        let Some(period) = self.time_period else {
            return 0.0;
        };
        let n = samples.max(32);
        let (s_lo, s_span) = match self.sigma_domain {
            SigmaDomain::Circle { period } => (0.0, period),
            SigmaDomain::Interval { lo, hi } => (lo, hi - lo),
        };
        let mut worst = 0.0f64;
        for i in 0..=n {
            let sigma = s_lo + s_span * i as f64 / n as f64;
            for j in 0..n {
                let t = 1.7 * j as f64 / n as f64 - 0.3;
                let a = self.eval_unchecked(sigma, t);
                let b = self.eval_unchecked(sigma, t + period);
                let d = [(a.x[0] - b.x[0]).abs(), (a.x[1] - b.x[1]).abs()];
                worst = worst.max(d[0].max(d[1]));
            }
        }
        worst
    }
}

/// Validation infima returned by [`BoundaryCurve2D::uniform_constants`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UniformConstants {
    /// inf |x_σ|² over the grid.
    pub nondegeneracy: f64,
    /// inf of the time-like margin over the grid.
    pub timelike_margin: f64,
}

pub(crate) fn margin_of(jet: &CurveJet) -> f64 {
    let g2 = dot(jet.x_sigma, jet.x_sigma);
    let p = dot(jet.x_t, jet.x_sigma);
    let v2 = dot(jet.x_t, jet.x_t);
    g2 + p * p - g2 * v2
}

/// Least-squares-free spectral fit: samples `map` on a `grid`×`grid`
/// lattice over the unit torus and returns the Fourier terms with
/// |coefficient| above `threshold`, up to `max_mode` in each index.
///
/// Sampling a real-analytic map on a uniform lattice recovers its
/// coefficients to spectral accuracy, so the truncation error is set by
/// `threshold` alone.
pub fn fourier_fit(
    map: &dyn Fn(f64, f64) -> [f64; 2],
    grid: usize,
    max_mode: usize,
    threshold: f64,
) -> (Vec<FourierTerm>, Vec<FourierTerm>) {
    let g = grid;
    let mut samples = vec![[0.0f64; 2]; g * g];
    for p in 0..g {
        for q in 0..g {
            samples[p * g + q] = map(p as f64 / g as f64, q as f64 / g as f64);
        }
    }
    let modes = max_mode.min(g / 2 - 1) as i32;
    let mut out = (Vec::new(), Vec::new());
    for m in -modes..=modes {
        for n in -modes..=modes {
            // Half lattice: pair (m,n) with (-m,-n).
            if m < 0 || (m == 0 && n < 0) {
                continue;
            }
            let mut re = [0.0f64; 2];
            let mut im = [0.0f64; 2];
            for p in 0..g {
                for q in 0..g {
                    let ang = -TWO_PI * (m as f64 * p as f64 + n as f64 * q as f64) / g as f64;
                    let (s, c) = ang.sin_cos();
                    let v = samples[p * g + q];
                    re[0] += v[0] * c;
                    im[0] += v[0] * s;
                    re[1] += v[1] * c;
                    im[1] += v[1] * s;
                }
            }
            let norm = 1.0 / (g * g) as f64;
            for j in 0..2 {
                let (a, b) = if m == 0 && n == 0 {
                    (re[j] * norm, 0.0)
                } else {
                    (2.0 * re[j] * norm, -2.0 * im[j] * norm)
                };
                if a.abs() > threshold || b.abs() > threshold {
                    let term = FourierTerm {
                        m,
                        n,
                        cos_coef: a,
                        sin_coef: b,
                    };
                    if j == 0 {
                        out.0.push(term);
                    } else {
                        out.1.push(term);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::norm;

    const PI: f64 = std::f64::consts::PI;

    fn fd_jet(curve: &BoundaryCurve2D, sigma: f64, t: f64, h: f64) -> ([f64; 2], [f64; 2]) {
        let xp = curve.eval_unchecked(sigma + h, t).x;
        let xm = curve.eval_unchecked(sigma - h, t).x;
        let tp = curve.eval_unchecked(sigma, t + h).x;
        let tm = curve.eval_unchecked(sigma, t - h).x;
        (
            [(xp[0] - xm[0]) / (2.0 * h), (xp[1] - xm[1]) / (2.0 * h)],
            [(tp[0] - tm[0]) / (2.0 * h), (tp[1] - tm[1]) / (2.0 * h)],
        )
    }

    #[test]
    fn unit_circle_jet_at_zero() {
        let c = BoundaryCurve2D::unit_circle();
        let jet = c.eval(0.0, 3.7).unwrap();
        assert!(norm(crate::numerics::sub(jet.x, [1.0, 0.0])) < 1e-15);
        assert!(norm(crate::numerics::sub(jet.x_sigma, [0.0, TWO_PI])) < 1e-12);
        assert_eq!(jet.x_t, [0.0, 0.0]);
        assert!((c.timelike_margin(0.3, 0.0) - 4.0 * PI * PI).abs() < 1e-9);
        assert_eq!(c.normal_speed(0.2, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // Finite-difference oracle: central differences at step 1e-4 agree
        // with the exact derivatives to relative error 1e-6, over 1000
        // pseudo-random points per family.
        let wall =
            BoundaryCurve2D::stefanov_wall(StefanovWallParams::default_example(1)).unwrap();
        let curves = [
            BoundaryCurve2D::unit_circle(),
            BoundaryCurve2D::translating_circle([0.0, 0.0], 1.0, [0.05, 0.02], 0.4),
            BoundaryCurve2D::breathing_circle([0.1, 0.0], 1.0, 0.1, 0.0),
            BoundaryCurve2D::slip_circle(0.24, 0.24).unwrap(),
            wall,
        ];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for curve in &curves {
            for _ in 0..1000 {
                let sigma = match curve.sigma_domain() {
                    SigmaDomain::Circle { period } => next() * period,
                    // keep FD probes off the bump's C2 joins, where the
                    // third derivative jumps
                    SigmaDomain::Interval { lo, hi } => lo * 0.8 + (hi - lo) * 0.8 * next(),
                };
                let t = next() * 2.0 - 0.5;
                let jet = curve.eval_unchecked(sigma, t);
                let (ds, dt) = fd_jet(curve, sigma, t, 1e-4);
                let scale = norm(jet.x_sigma).max(norm(jet.x_t)).max(1.0);
                assert!(
                    norm(crate::numerics::sub(jet.x_sigma, ds)) / scale < 1e-6,
                    "x_sigma mismatch for {:?} at ({sigma}, {t})",
                    curve.family()
                );
                assert!(
                    norm(crate::numerics::sub(jet.x_t, dt)) / scale < 1e-6,
                    "x_t mismatch for {:?} at ({sigma}, {t})",
                    curve.family()
                );
            }
        }
    }

    #[test]
    fn wall_margin_matches_closed_form_inside_plateau() {
        // On |σ| ≤ M the jet is x_σ = (1, 2k f'), x_t = (0, -k f'), so the
        // margin reduces to 1 + 3 s with s = k² f'².
        let params = StefanovWallParams::default_example(3);
        let wall = BoundaryCurve2D::stefanov_wall(params).unwrap();
        for i in 0..200 {
            let sigma = -1.9 + 3.8 * i as f64 / 199.0;
            let t = 0.77 * i as f64;
            let k = params.wave_number as f64;
            let s = (k * params.wave.d1(k * (2.0 * sigma - t))).powi(2);
            let m = wall.timelike_margin(sigma, t);
            assert!((m - (1.0 + 3.0 * s)).abs() < 1e-9 * (1.0 + s));
        }
    }

    #[test]
    fn wall_x_t_vanishes_at_wave_crests_and_outside_support() {
        let wall =
            BoundaryCurve2D::stefanov_wall(StefanovWallParams::default_example(1)).unwrap();
        // f'(k(2σ−t)) = 0 at z = 1/4: pick σ = 0.25, t = 0.25 => z = ... choose t so z = 1/4.
        let sigma = 0.3;
        let t = 2.0 * sigma - 0.25;
        let jet = wall.eval(sigma, t).unwrap();
        assert!(jet.x_t[0].abs() < 1e-15 && jet.x_t[1].abs() < 1e-12);
        // Outside supp φ the wall is the stationary line (σ, 0).
        for t in [0.0, 0.33, 1.9] {
            let jet = wall.eval(3.999, t).unwrap();
            assert_eq!(jet.x_t, [0.0, 0.0]);
            assert!(jet.x[1].abs() < 1e-12);
        }
    }

    #[test]
    fn wall_normal_speed_closed_form_and_bound() {
        let params = StefanovWallParams::default_example(2);
        let wall = BoundaryCurve2D::stefanov_wall(params).unwrap();
        let mut max_speed = 0.0f64;
        let n = 512;
        for i in 0..=n {
            let sigma = -4.0 + 8.0 * i as f64 / n as f64;
            for j in 0..n {
                let t = j as f64 / n as f64;
                let k = params.wave_number as f64;
                let z = k * (2.0 * sigma - t);
                let (phi, dphi, _) = params.bump(sigma);
                let a = k * phi * params.wave.d1(z);
                let b = dphi * params.wave.value(z);
                let expect = a.abs() / (1.0 + (b + 2.0 * a).powi(2)).sqrt();
                let speed = wall.normal_speed(sigma, j as f64 / n as f64).unwrap();
                assert!((speed - expect).abs() < 1e-10 * (1.0 + expect));
                max_speed = max_speed.max(speed);
            }
        }
        // |ν_x · x_t| ≤ 1/√2 whenever |φ' f| ≤ 1.
        assert!(max_speed <= 0.5f64.sqrt() + 1e-12);
    }

    #[test]
    fn uniform_constants_on_circle_and_wall() {
        let c = BoundaryCurve2D::unit_circle();
        let u = c.uniform_constants(64).unwrap();
        assert!((u.nondegeneracy - 4.0 * PI * PI).abs() < 1e-9);
        assert!((u.timelike_margin - 4.0 * PI * PI).abs() < 1e-9);

        let wall =
            BoundaryCurve2D::stefanov_wall(StefanovWallParams::default_example(1)).unwrap();
        let u = wall.uniform_constants(256).unwrap();
        assert!(u.nondegeneracy > 0.0);
        // margin = 1 + 3s ≥ 1 on the plateau; the taper cannot go below
        // the global floor found by the scan.
        assert!(u.timelike_margin >= 0.5, "margin floor {}", u.timelike_margin);
    }

    #[test]
    fn superluminal_curve_rejected_with_certificate() {
        // Normal speed reaches 1.2 > 1 somewhere: must be rejected and the
        // certificate point must itself violate the margin.
        let c = BoundaryCurve2D::translating_circle([0.0, 0.0], 1.0, [1.2 / TWO_PI, 0.0], 0.0);
        match c.uniform_constants(128) {
            Err(CoreError::CurveRejected {
                sigma,
                t,
                timelike_margin,
                ..
            }) => {
                assert!(timelike_margin <= 0.0);
                assert!(c.timelike_margin(sigma, t) <= 0.0);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn tangential_motion_keeps_full_margin() {
        // x_t parallel to x_σ: margin reduces to |x_σ|² regardless of |x_t|.
        let slip = BoundaryCurve2D::slip_circle(0.3, 0.3).unwrap();
        for i in 0..100 {
            let sigma = i as f64 / 100.0;
            let t = (i as f64 * 0.37) % 1.0;
            let jet = slip.eval_unchecked(sigma, t);
            let g2 = dot(jet.x_sigma, jet.x_sigma);
            let m = margin_of(&jet);
            assert!((m - g2).abs() < 1e-7 * g2, "tangential margin at {sigma}");
        }
    }

    #[test]
    fn periodicity_residual_is_tiny() {
        let wall =
            BoundaryCurve2D::stefanov_wall(StefanovWallParams::default_example(2)).unwrap();
        assert!(wall.periodicity_residual(64) < 1e-12);
        let b = BoundaryCurve2D::breathing_circle([0.0, 0.0], 1.0, 0.1, 0.3);
        assert!(b.periodicity_residual(64) < 1e-12);
        let s = BoundaryCurve2D::slip_circle(0.24, 0.24).unwrap();
        assert!(s.periodicity_residual(64) < 1e-11);
    }

    #[test]
    fn margin_invariant_under_parameter_shifts() {
        let c = BoundaryCurve2D::breathing_circle([0.0, 0.0], 1.0, 0.1, 0.0);
        for i in 0..50 {
            let sigma = i as f64 * 0.013;
            let t = i as f64 * 0.029;
            let a = c.timelike_margin(sigma, t);
            let b = c.timelike_margin(sigma + 1.0, t);
            let d = c.timelike_margin(sigma, t + 1.0);
            assert!((a - b).abs() < 1e-9 && (a - d).abs() < 1e-9);
        }
    }

    #[test]
    fn interval_domain_errors_outside() {
        let wall =
            BoundaryCurve2D::stefanov_wall(StefanovWallParams::default_example(1)).unwrap();
        assert!(matches!(
            wall.eval(4.5, 0.0),
            Err(CoreError::SigmaOutOfDomain { .. })
        ));
    }

    #[test]
    fn invalid_wall_params_rejected() {
        let bad = StefanovWallParams::new(1, 2.0, 0.5, WaveShape::Sine { amplitude: 1.0 });
        assert!(BoundaryCurve2D::stefanov_wall(bad).is_err());
        let bad = StefanovWallParams::new(0, 2.0, 2.0, WaveShape::Sine { amplitude: 1.0 });
        assert!(BoundaryCurve2D::stefanov_wall(bad).is_err());
    }

    #[test]
    fn fourier_fit_reproduces_the_map() {
        let map = |sigma: f64, t: f64| {
            [
                (TWO_PI * sigma).cos() + 0.3 * (TWO_PI * (sigma + t)).sin(),
                (TWO_PI * sigma).sin() - 0.1 * (TWO_PI * (2.0 * sigma - t)).cos(),
            ]
        };
        let (xt, yt) = fourier_fit(&map, 32, 8, 1e-12);
        let c = BoundaryCurve2D::fourier(xt, yt);
        for i in 0..40 {
            let s = i as f64 * 0.025;
            let t = (i as f64 * 0.07) % 1.0;
            let jet = c.eval_unchecked(s, t);
            let want = map(s, t);
            assert!(norm(crate::numerics::sub(jet.x, want)) < 1e-10);
        }
    }
}
