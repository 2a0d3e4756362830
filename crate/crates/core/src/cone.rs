//! Lorentzian cone algebra for second-order hyperbolic operators, plus
//! flows of time-like vector fields and the standard deformation
//! constructions.
//!
//! The principal symbol τ² − 2τ a·ξ − ξ·Aξ is the quadratic form of the
//! symmetric (n+1)×(n+1) matrix
//!
//! ```text
//! B = [ −A   −a ]
//!     [ −aᵀ   1 ]
//! ```
//!
//! which has Lorentzian signature (one positive, n negative eigenvalues)
//! exactly when A is positive definite. Tangent vectors v are time-like
//! when v·B⁻¹v > 0; surface conormals w are time-like normals when
//! w·Bw < 0.

use crate::error::{CoreError, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Assembled cone form with its eigen-data.
#[derive(Debug, Clone)]
pub struct HyperbolicForm {
    pub dim: usize,
    pub a_matrix: DMatrix<f64>,
    pub a_vector: DVector<f64>,
    pub b: DMatrix<f64>,
    pub b_inv: DMatrix<f64>,
    /// The single positive eigenvalue.
    pub lambda0: f64,
    /// Unit eigenvector of the positive eigenvalue.
    pub e0: DVector<f64>,
    /// The n negative eigenvalues.
    pub negative_eigenvalues: Vec<f64>,
}

impl HyperbolicForm {
    /// Assemble B from (A, a), decompose, and verify both the signature
    /// and the cofactor identity (B⁻¹)_{n+1,n+1} = (−1)ⁿ det A / det B
    /// against direct inversion.
    pub fn new(a_matrix: DMatrix<f64>, a_vector: DVector<f64>) -> Result<Self> {
        let n = a_matrix.nrows();
        if a_matrix.ncols() != n || a_vector.len() != n {
            return Err(CoreError::InvalidConfig(
                "A must be square and a must match its dimension".into(),
            ));
        }
        let sym_err = (&a_matrix - a_matrix.transpose()).abs().max();
        if sym_err > 1e-10 {
            return Err(CoreError::InvalidConfig(format!(
                "A must be symmetric (asymmetry {sym_err:e})"
            )));
        }
        let mut b = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = -a_matrix[(i, j)];
            }
            b[(i, n)] = -a_vector[i];
            b[(n, i)] = -a_vector[i];
        }
        b[(n, n)] = 1.0;

        let eig = b.clone().symmetric_eigen();
        let mut lambda0 = f64::NEG_INFINITY;
        let mut e0 = DVector::zeros(n + 1);
        let mut negative = Vec::new();
        let mut positive_count = 0usize;
        for (idx, &val) in eig.eigenvalues.iter().enumerate() {
            if val > 0.0 {
                positive_count += 1;
                if val > lambda0 {
                    lambda0 = val;
                    e0 = eig.eigenvectors.column(idx).into_owned();
                }
            } else {
                negative.push(val);
            }
        }
        if positive_count != 1 || negative.len() != n || negative.iter().any(|&v| v >= 0.0) {
            return Err(CoreError::NotHyperbolic {
                positive: positive_count,
                negative: negative.len(),
            });
        }
        let b_inv = b.clone().try_inverse().ok_or_else(|| {
            CoreError::InvalidConfig("cone form is numerically singular".into())
        })?;

        let det_a = a_matrix.clone().lu().determinant();
        let det_b = b.clone().lu().determinant();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let identity = sign * det_a / det_b;
        let direct = b_inv[(n, n)];
        let scale = 1.0 + direct.abs();
        if (identity - direct).abs() > 1e-10 * scale {
            return Err(CoreError::InvalidConfig(format!(
                "cofactor identity failed: {identity} vs {direct}"
            )));
        }
        negative.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(Self {
            dim: n,
            a_matrix,
            a_vector,
            b,
            b_inv,
            lambda0,
            e0,
            negative_eigenvalues: negative,
        })
    }

    /// 2D wave operator form (A = I, a = 0).
    pub fn wave_2d() -> Self {
        Self::new(DMatrix::identity(2, 2), DVector::zeros(2)).expect("wave form is hyperbolic")
    }

    /// Value of the symbol quadratic form on a covector (ξ, τ).
    pub fn symbol(&self, xi: &DVector<f64>, tau: f64) -> f64 {
        let mut w = DVector::zeros(self.dim + 1);
        for i in 0..self.dim {
            w[i] = xi[i];
        }
        w[self.dim] = tau;
        (w.transpose() * &self.b * w)[(0, 0)]
    }

    /// The two real symbol roots τ±(ξ) = a·ξ ± √((a·ξ)² + ξ·Aξ); with A
    /// positive definite they have opposite signs.
    pub fn principal_roots(&self, xi: &DVector<f64>) -> Result<(f64, f64)> {
        if xi.norm() == 0.0 {
            return Err(CoreError::ZeroVector {
                context: "symbol roots need a nonzero spatial covector",
            });
        }
        let adot = self.a_vector.dot(xi);
        let q = (xi.transpose() * &self.a_matrix * xi)[(0, 0)];
        let disc = (adot * adot + q).sqrt();
        Ok((adot - disc, adot + disc))
    }

    /// v·B⁻¹v, the time-like test for tangent vectors.
    pub fn vector_margin(&self, v: &DVector<f64>) -> f64 {
        (v.transpose() * &self.b_inv * v)[(0, 0)]
    }

    /// w·Bw, the time-like-normal test for covectors.
    pub fn normal_margin(&self, w: &DVector<f64>) -> f64 {
        (w.transpose() * &self.b * w)[(0, 0)]
    }

    /// Classify a nonzero (n+1)-vector by both quadratic forms.
    pub fn classify(&self, v: &DVector<f64>) -> Result<VectorClassification> {
        if v.norm() == 0.0 {
            return Err(CoreError::ZeroVector {
                context: "classification needs a nonzero vector",
            });
        }
        let vector_margin = self.vector_margin(v);
        let normal_margin = self.normal_margin(v);
        let tol = 1e-12 * (1.0 + v.norm_squared());
        let kind = if vector_margin > tol {
            VectorKind::TimelikeVector
        } else if normal_margin < -tol {
            VectorKind::TimelikeSurfaceNormal
        } else if vector_margin.abs() <= tol || normal_margin.abs() <= tol {
            VectorKind::Null
        } else {
            VectorKind::Spacelike
        };
        Ok(VectorClassification {
            kind,
            vector_margin,
            normal_margin,
        })
    }

    /// Given a time-like surface normal ν (ν·Bν < 0), return the tangent
    /// time-like direction d = ê₀ + a₀ B w from the normalized
    /// decomposition ν = a₀ ê₀ + w, w·Bw = −1.
    ///
    /// d satisfies d·ν = 0 and d·B⁻¹d = λ₀⁻¹ − a₀² > 0; both residuals
    /// are returned.
    pub fn boundary_tangent(&self, nu: &DVector<f64>) -> Result<TangentWitness> {
        let q = self.normal_margin(nu);
        if q >= 0.0 {
            return Err(CoreError::NotTimelikeNormal { value: q });
        }
        let a0_raw = self.e0.dot(nu);
        let w_raw = nu - &self.e0 * a0_raw;
        let wbw = self.normal_margin(&w_raw);
        if wbw >= -1e-14 {
            // w = 0 means ν ∥ ê₀, but then ν·Bν = a₀²λ₀ > 0, contradicting
            // the precondition; numerically near-parallel ν is rejected too.
            return Err(CoreError::NotTimelikeNormal { value: q });
        }
        let scale = 1.0 / (-wbw).sqrt();
        let a0 = a0_raw * scale;
        let w = w_raw * scale;
        let d = &self.e0 + &self.b * &w * a0;
        let orth = d.dot(nu);
        let margin = self.vector_margin(&d);
        let expected = 1.0 / self.lambda0 - a0 * a0;
        Ok(TangentWitness {
            d,
            a0,
            orthogonality: orth,
            margin,
            margin_identity_residual: (margin - expected).abs(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorKind {
    TimelikeVector,
    TimelikeSurfaceNormal,
    Null,
    Spacelike,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorClassification {
    pub kind: VectorKind,
    /// v·B⁻¹v.
    pub vector_margin: f64,
    /// v·Bv.
    pub normal_margin: f64,
}

/// Output of [`HyperbolicForm::boundary_tangent`].
#[derive(Debug, Clone)]
pub struct TangentWitness {
    pub d: DVector<f64>,
    pub a0: f64,
    pub orthogonality: f64,
    pub margin: f64,
    pub margin_identity_residual: f64,
}

/// A planar vector field with its spatial Jacobian, the data needed to
/// integrate both a flow and its variational equation.
pub trait VectorField2: Sync {
    fn value(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn jacobian(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2];
}

/// Rigid rotation v(x) = ω(−x₂, x₁).
pub struct RotationField {
    pub omega: f64,
}

impl VectorField2 for RotationField {
    fn value(&self, x: [f64; 2], _t: f64) -> [f64; 2] {
        [-self.omega * x[1], self.omega * x[0]]
    }
    fn jacobian(&self, _x: [f64; 2], _t: f64) -> [[f64; 2]; 2] {
        [[0.0, -self.omega], [self.omega, 0.0]]
    }
}

/// Linear dilation v(x) = c x; its flow is exactly exponential, so the
/// Gronwall envelope is attained with equality.
pub struct LinearField {
    pub c: f64,
}

impl VectorField2 for LinearField {
    fn value(&self, x: [f64; 2], _t: f64) -> [f64; 2] {
        [self.c * x[0], self.c * x[1]]
    }
    fn jacobian(&self, _x: [f64; 2], _t: f64) -> [[f64; 2]; 2] {
        [[self.c, 0.0], [0.0, self.c]]
    }
}

/// The zero field.
pub struct ZeroField;

impl VectorField2 for ZeroField {
    fn value(&self, _x: [f64; 2], _t: f64) -> [f64; 2] {
        [0.0, 0.0]
    }
    fn jacobian(&self, _x: [f64; 2], _t: f64) -> [[f64; 2]; 2] {
        [[0.0, 0.0], [0.0, 0.0]]
    }
}

/// Radial breathing field v(x, t) = (R'(t)/R(t)) β(|x|) x with β a C²
/// cutoff equal to 1 inside `rho0` and 0 beyond `rho`; moves the circle
/// of radius R(t) while fixing a neighborhood of the outer cylinder.
pub struct BreathingField {
    pub base_radius: f64,
    pub amplitude: f64,
    pub rho0: f64,
    pub rho: f64,
}

impl BreathingField {
    fn rate(&self, t: f64) -> f64 {
        let ang = crate::boundary::TWO_PI * t;
        let r = self.base_radius + self.amplitude * ang.cos();
        let rp = -self.amplitude * crate::boundary::TWO_PI * ang.sin();
        rp / r
    }

    fn cutoff(&self, s: f64) -> (f64, f64) {
        let u = (self.rho - s) / (self.rho - self.rho0);
        (
            crate::numerics::smoothstep(u),
            -crate::numerics::smoothstep_d1(u) / (self.rho - self.rho0),
        )
    }
}

impl VectorField2 for BreathingField {
    fn value(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (beta, _) = self.cutoff(s);
        let c = self.rate(t) * beta;
        [c * x[0], c * x[1]]
    }
    fn jacobian(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2] {
        let s = (x[0] * x[0] + x[1] * x[1]).sqrt().max(1e-12);
        let (beta, dbeta) = self.cutoff(s);
        let r = self.rate(t);
        let mut j = [[0.0; 2]; 2];
        for i in 0..2 {
            for l in 0..2 {
                let kron = if i == l { 1.0 } else { 0.0 };
                j[i][l] = r * (beta * kron + dbeta * x[i] * x[l] / s);
            }
        }
        j
    }
}

/// Flow samples F(t, y) with Jacobians of one seed set.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub seeds: Vec<[f64; 2]>,
    pub times: Vec<f64>,
    /// positions[seed][time index]
    pub positions: Vec<Vec<[f64; 2]>>,
    /// jacobians[seed][time index], row-major 2×2
    pub jacobians: Vec<Vec<[[f64; 2]; 2]>>,
    /// Sup over seeds of ‖∂v/∂x‖₂ per time sample.
    pub psi: Vec<f64>,
}

fn mat_norm2(m: [[f64; 2]; 2]) -> f64 {
    // Spectral norm of a 2×2 matrix via the singular value closed form.
    let a = m[0][0];
    let b = m[0][1];
    let c = m[1][0];
    let d = m[1][1];
    let q = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let s = ((q + 2.0 * det.abs()).max(0.0)).sqrt();
    let t = ((q - 2.0 * det.abs()).max(0.0)).sqrt();
    0.5 * (s + t)
}

/// Integrate dF/dt = v(F, t), F(0) = y for each seed, carrying the
/// variational equation d(∂F/∂y)/dt = (∂v/∂x)(F, t) · (∂F/∂y) alongside.
/// Every sample is checked to stay in the time-like cone of `form`
/// ((v, 1)·B⁻¹(v, 1) > 0).
pub fn integrate_flow(
    field: &dyn VectorField2,
    form: &HyperbolicForm,
    seeds: &[[f64; 2]],
    t_range: (f64, f64),
    steps: usize,
) -> Result<FlowField> {
    if form.dim != 2 {
        return Err(CoreError::InvalidConfig(
            "flow integration is two-dimensional".into(),
        ));
    }
    let n = steps.max(64);
    let h = (t_range.1 - t_range.0) / n as f64;
    let mut times = Vec::with_capacity(n + 1);
    for i in 0..=n {
        times.push(t_range.0 + i as f64 * h);
    }
    let mut positions = Vec::with_capacity(seeds.len());
    let mut jacobians = Vec::with_capacity(seeds.len());
    let mut psi = vec![0.0f64; n + 1];
    for &seed in seeds {
        let mut x = seed;
        let mut jac = [[1.0, 0.0], [0.0, 1.0]];
        let mut xs = Vec::with_capacity(n + 1);
        let mut js = Vec::with_capacity(n + 1);
        xs.push(x);
        js.push(jac);
        check_cone(field, form, x, times[0])?;
        psi[0] = psi[0].max(mat_norm2(field.jacobian(x, times[0])));
        for i in 0..n {
            let t = times[i];
            // RK4 on the coupled (position, Jacobian) system.
            let (k1, m1) = rhs(field, x, jac, t);
            let (k2, m2) = rhs(field, step(x, k1, 0.5 * h), step_m(jac, m1, 0.5 * h), t + 0.5 * h);
            let (k3, m3) = rhs(field, step(x, k2, 0.5 * h), step_m(jac, m2, 0.5 * h), t + 0.5 * h);
            let (k4, m4) = rhs(field, step(x, k3, h), step_m(jac, m3, h), t + h);
            for j in 0..2 {
                x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                for l in 0..2 {
                    jac[j][l] += h / 6.0 * (m1[j][l] + 2.0 * m2[j][l] + 2.0 * m3[j][l] + m4[j][l]);
                }
            }
            let t_next = times[i + 1];
            check_cone(field, form, x, t_next)?;
            psi[i + 1] = psi[i + 1].max(mat_norm2(field.jacobian(x, t_next)));
            xs.push(x);
            js.push(jac);
        }
        positions.push(xs);
        jacobians.push(js);
    }
    Ok(FlowField {
        seeds: seeds.to_vec(),
        times,
        positions,
        jacobians,
        psi,
    })
}

fn rhs(
    field: &dyn VectorField2,
    x: [f64; 2],
    jac: [[f64; 2]; 2],
    t: f64,
) -> ([f64; 2], [[f64; 2]; 2]) {
    let v = field.value(x, t);
    let dv = field.jacobian(x, t);
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = dv[i][0] * jac[0][j] + dv[i][1] * jac[1][j];
        }
    }
    (v, m)
}

fn step(x: [f64; 2], k: [f64; 2], h: f64) -> [f64; 2] {
    [x[0] + h * k[0], x[1] + h * k[1]]
}

fn step_m(m: [[f64; 2]; 2], k: [[f64; 2]; 2], h: f64) -> [[f64; 2]; 2] {
    let mut out = m;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += h * k[i][j];
        }
    }
    out
}

fn check_cone(
    field: &dyn VectorField2,
    form: &HyperbolicForm,
    x: [f64; 2],
    t: f64,
) -> Result<()> {
    let v = field.value(x, t);
    let vt = DVector::from_vec(vec![v[0], v[1], 1.0]);
    let margin = form.vector_margin(&vt);
    if margin <= 0.0 {
        return Err(CoreError::ConeViolation {
            x: x[0],
            y: x[1],
            t,
            margin,
        });
    }
    Ok(())
}

/// Gronwall envelope check of a flow's Jacobians.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GronwallReport {
    /// Worst relative excess of |w(t)| over |w(0)| exp(∫ψ) (forward).
    pub max_forward_violation: f64,
    /// Worst relative deficit against the mirrored lower envelope.
    pub max_backward_violation: f64,
    /// exp(∫ψ) over the whole range: the uniform Jacobian bound.
    pub uniform_bound: f64,
    /// Largest Jacobian column norm observed.
    pub max_column_norm: f64,
}

/// Check columnwise |w(t)| ≤ |w(0)| exp(∫₀ᵗ ψ) (and the mirrored lower
/// bound) against the sampled ψ(t) = sup ‖∂v/∂x‖.
pub fn jacobian_bound_check(flow: &FlowField) -> GronwallReport {
    let n = flow.times.len();
    // Cumulative ∫ψ by trapezoid.
    let mut cum = vec![0.0f64; n];
    for i in 1..n {
        let h = flow.times[i] - flow.times[i - 1];
        cum[i] = cum[i - 1] + 0.5 * h * (flow.psi[i] + flow.psi[i - 1]);
    }
    let mut fwd = 0.0f64;
    let mut bwd = 0.0f64;
    let mut max_col = 0.0f64;
    for js in &flow.jacobians {
        for col in 0..2 {
            let w0 = (js[0][0][col].powi(2) + js[0][1][col].powi(2)).sqrt();
            for (i, j) in js.iter().enumerate() {
                let w = (j[0][col].powi(2) + j[1][col].powi(2)).sqrt();
                max_col = max_col.max(w);
                let upper = w0 * cum[i].exp();
                let lower = w0 * (-cum[i]).exp();
                fwd = fwd.max((w - upper) / upper.max(1e-300));
                bwd = bwd.max((lower - w) / lower.max(1e-300));
            }
        }
    }
    GronwallReport {
        max_forward_violation: fwd,
        max_backward_violation: bwd,
        uniform_bound: cum[n - 1].exp(),
        max_column_norm: max_col,
    }
}

/// The three deformation constructions with their hypothesis checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PsiMode {
    /// Ψ(y, t) = O(ωt) y + β(|y|) l(t): rigid rotation plus localized
    /// translation; requires ωρ + sup|l'| < 1 and |l| < ρ − ρ0.
    Rigid {
        omega: f64,
        translation_amp: [f64; 2],
        rho0: f64,
    },
    /// Even periodic motion: Ψ follows the flow for t ∈ [0, ½] and its
    /// time reflection on [½, 1]; the time derivative jumps at ½ but both
    /// one-sided derivatives stay time-like.
    EvenPeriodic { base_radius: f64, amplitude: f64, rho0: f64 },
    /// Slow and uniform periodic motion: Ψ(y, t) = y + ∫₀ᵗ u(y, s) ds for
    /// a small zero-mean periodic velocity extension u.
    SlowUniform { eps0: f64, rho_prime: f64 },
}

/// Hypothesis diagnostics for one deformation construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsiReport {
    /// (i) max |Ψ(y, 0) − y| over the sample set.
    pub identity_residual: f64,
    /// (ii)/(ii') boundary behavior: max |Ψ(y, t)| − ρ deviation on |y| = ρ
    /// (rigid) or max |Ψ(y, t) − y| for |y| ≥ ρ' (others).
    pub boundary_residual: f64,
    /// (iii) min over samples of the time-like margin of (Ψ_t, 1).
    pub min_timelike_margin: f64,
    /// (iv) sup ‖Ψ_y‖.
    pub jacobian_sup: f64,
    /// Even mode: the jump |Ψ_t⁺ − Ψ_t⁻| at the half period and the two
    /// one-sided margins.
    pub half_period_jump: Option<f64>,
    pub one_sided_margins: Option<(f64, f64)>,
    /// Slow mode: sup ‖Ψ_y − I‖ (must stay below 1).
    pub max_jacobian_identity_gap: Option<f64>,
    pub all_hypotheses_hold: bool,
}

/// Sample a deformation construction over |y| ≤ ρ and one time period
/// and check hypotheses (i)-(iv).
pub fn build_psi(mode: &PsiMode, rho: f64, resolution: usize) -> Result<PsiReport> {
    let form = HyperbolicForm::wave_2d();
    let n_r = resolution.max(16);
    let n_a = 2 * n_r;
    let n_t = 2 * n_r;
    let mut samples = Vec::new();
    for i in 0..=n_r {
        let r = rho * i as f64 / n_r as f64;
        for j in 0..n_a {
            let ang = crate::boundary::TWO_PI * j as f64 / n_a as f64;
            samples.push([r * ang.cos(), r * ang.sin()]);
        }
    }
    match mode {
        PsiMode::Rigid {
            omega,
            translation_amp,
            rho0,
        } => {
            if *rho0 >= rho {
                return Err(CoreError::InvalidConfig("rho0 must be below rho".into()));
            }
            let sup_lp = crate::boundary::TWO_PI
                * (translation_amp[0].powi(2) + translation_amp[1].powi(2)).sqrt();
            if omega.abs() * rho + sup_lp >= 1.0 {
                return Err(CoreError::InvalidConfig(format!(
                    "rigid speed bound violated: {} >= 1",
                    omega.abs() * rho + sup_lp
                )));
            }
            let beta = |s: f64| -> (f64, f64) {
                let u = (rho - s) / (rho - rho0);
                (
                    crate::numerics::smoothstep(u),
                    -crate::numerics::smoothstep_d1(u) / (rho - rho0),
                )
            };
            let l = |t: f64| -> ([f64; 2], [f64; 2]) {
                let ang = crate::boundary::TWO_PI * t;
                (
                    [translation_amp[0] * ang.sin(), translation_amp[1] * ang.sin()],
                    [
                        translation_amp[0] * crate::boundary::TWO_PI * ang.cos(),
                        translation_amp[1] * crate::boundary::TWO_PI * ang.cos(),
                    ],
                )
            };
            let mut identity = 0.0f64;
            let mut boundary = 0.0f64;
            let mut min_margin = f64::INFINITY;
            let mut jac_sup = 0.0f64;
            for &y in &samples {
                let s = (y[0] * y[0] + y[1] * y[1]).sqrt();
                let (b, db) = beta(s);
                for jt in 0..=n_t {
                    let t = jt as f64 / n_t as f64;
                    let (lt, lpt) = l(t);
                    let (sin_t, cos_t) = (omega * t).sin_cos();
                    let psi = [
                        cos_t * y[0] - sin_t * y[1] + b * lt[0],
                        sin_t * y[0] + cos_t * y[1] + b * lt[1],
                    ];
                    if t == 0.0 {
                        identity = identity
                            .max(((psi[0] - y[0]).powi(2) + (psi[1] - y[1]).powi(2)).sqrt());
                    }
                    if (s - rho).abs() < 1e-12 {
                        let r_psi = (psi[0] * psi[0] + psi[1] * psi[1]).sqrt();
                        boundary = boundary.max((r_psi - rho).abs());
                    }
                    let psi_t = [
                        -omega * (sin_t * y[0] + cos_t * y[1]) + b * lpt[0],
                        omega * (cos_t * y[0] - sin_t * y[1]) + b * lpt[1],
                    ];
                    min_margin =
                        min_margin.min(1.0 - psi_t[0] * psi_t[0] - psi_t[1] * psi_t[1]);
                    // Ψ_y = O + l ⊗ β'(s) ŷ
                    let hat = if s > 1e-12 {
                        [y[0] / s, y[1] / s]
                    } else {
                        [0.0, 0.0]
                    };
                    let jac = [
                        [
                            cos_t + lt[0] * db * hat[0],
                            -sin_t + lt[0] * db * hat[1],
                        ],
                        [
                            sin_t + lt[1] * db * hat[0],
                            cos_t + lt[1] * db * hat[1],
                        ],
                    ];
                    jac_sup = jac_sup.max(mat_norm2(jac));
                }
            }
            let _ = form;
            Ok(PsiReport {
                identity_residual: identity,
                boundary_residual: boundary,
                min_timelike_margin: min_margin,
                jacobian_sup: jac_sup,
                half_period_jump: None,
                one_sided_margins: None,
                max_jacobian_identity_gap: None,
                all_hypotheses_hold: identity < 1e-12
                    && boundary < 1e-9
                    && min_margin > 0.0
                    && jac_sup.is_finite(),
            })
        }
        PsiMode::EvenPeriodic {
            base_radius,
            amplitude,
            rho0,
        } => {
            let field = BreathingField {
                base_radius: *base_radius,
                amplitude: *amplitude,
                rho0: *rho0,
                rho,
            };
            let seeds: Vec<[f64; 2]> = samples.iter().copied().step_by(7).collect();
            let flow = integrate_flow(&field, &form, &seeds, (0.0, 0.5), 512)?;
            let mut identity = 0.0f64;
            let mut boundary = 0.0f64;
            let mut min_margin = f64::INFINITY;
            let mut jac_sup = 0.0f64;
            let mut jump = 0.0f64;
            let mut margins_half = (f64::INFINITY, f64::INFINITY);
            for (si, &seed) in flow.seeds.iter().enumerate() {
                let first = flow.positions[si][0];
                identity = identity
                    .max(((first[0] - seed[0]).powi(2) + (first[1] - seed[1]).powi(2)).sqrt());
                let s = (seed[0] * seed[0] + seed[1] * seed[1]).sqrt();
                for (ti, &t) in flow.times.iter().enumerate() {
                    let x = flow.positions[si][ti];
                    if s >= rho - 1e-12 {
                        boundary = boundary
                            .max(((x[0] - seed[0]).powi(2) + (x[1] - seed[1]).powi(2)).sqrt());
                    }
                    let v = field.value(x, t);
                    let m = 1.0 - v[0] * v[0] - v[1] * v[1];
                    min_margin = min_margin.min(m);
                    jac_sup = jac_sup.max(mat_norm2(flow.jacobians[si][ti]));
                }
                // One-sided time derivatives at the half period: ±v.
                let x_half = *flow.positions[si].last().unwrap();
                let v = field.value(x_half, 0.5);
                let speed2 = v[0] * v[0] + v[1] * v[1];
                jump = jump.max(2.0 * speed2.sqrt());
                let m = 1.0 - speed2;
                margins_half.0 = margins_half.0.min(m);
                margins_half.1 = margins_half.1.min(m);
            }
            Ok(PsiReport {
                identity_residual: identity,
                boundary_residual: boundary,
                min_timelike_margin: min_margin,
                jacobian_sup: jac_sup,
                half_period_jump: Some(jump),
                one_sided_margins: Some(margins_half),
                max_jacobian_identity_gap: None,
                all_hypotheses_hold: identity < 1e-9
                    && boundary < 1e-9
                    && min_margin > 0.0
                    && margins_half.0 > 0.0,
            })
        }
        PsiMode::SlowUniform { eps0, rho_prime } => {
            if *rho_prime >= rho {
                return Err(CoreError::InvalidConfig("rho' must be below rho".into()));
            }
            // Velocity extension u(y, t) = ε₀ sin(2πt) χ(|y|) e₁ with a C²
            // cutoff of slope ≤ 1/(ρ − ρ'): periodic, zero time mean,
            // vanishing for |y| ≥ ρ'.
            let chi = |s: f64| -> (f64, f64) {
                let u = (rho_prime - s) / (rho - rho_prime) + 1.0;
                (
                    crate::numerics::smoothstep(u),
                    -crate::numerics::smoothstep_d1(u) / (rho - rho_prime),
                )
            };
            let mut identity = 0.0f64;
            let mut boundary = 0.0f64;
            let mut min_margin = f64::INFINITY;
            let mut jac_sup = 0.0f64;
            let mut gap_sup = 0.0f64;
            for &y in &samples {
                let s = (y[0] * y[0] + y[1] * y[1]).sqrt();
                let (c, dc) = chi(s);
                for jt in 0..=n_t {
                    let t = jt as f64 / n_t as f64;
                    let ang = crate::boundary::TWO_PI * t;
                    let shift = eps0 * c * (1.0 - ang.cos()) / crate::boundary::TWO_PI;
                    let psi = [y[0] + shift, y[1]];
                    if t == 0.0 {
                        identity = identity.max((psi[0] - y[0]).abs());
                    }
                    if s >= *rho_prime {
                        boundary = boundary.max((psi[0] - y[0]).abs());
                    }
                    let u_t = eps0 * c * ang.sin();
                    min_margin = min_margin.min(1.0 - u_t * u_t);
                    let hat = if s > 1e-12 {
                        [y[0] / s, y[1] / s]
                    } else {
                        [0.0, 0.0]
                    };
                    let coef = eps0 * dc * (1.0 - ang.cos()) / crate::boundary::TWO_PI;
                    let jac = [[1.0 + coef * hat[0], coef * hat[1]], [0.0, 1.0]];
                    jac_sup = jac_sup.max(mat_norm2(jac));
                    let gap = [[coef * hat[0], coef * hat[1]], [0.0, 0.0]];
                    gap_sup = gap_sup.max(mat_norm2(gap));
                }
            }
            Ok(PsiReport {
                identity_residual: identity,
                boundary_residual: boundary,
                min_timelike_margin: min_margin,
                jacobian_sup: jac_sup,
                half_period_jump: None,
                one_sided_margins: None,
                max_jacobian_identity_gap: Some(gap_sup),
                all_hypotheses_hold: identity == 0.0
                    && boundary < 1e-12
                    && min_margin > 0.0
                    && gap_sup < 1.0,
            })
        }
    }
}

/// Deterministic random suite over (SPD A, a) draws: cofactor identity,
/// symbol-root residuals and signs, the orthogonality property of
/// time-like vectors, and the tangent-witness identity. Returns the
/// worst residuals observed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomFormSuite {
    pub draws: usize,
    pub max_cofactor_residual: f64,
    pub max_root_residual: f64,
    pub opposite_sign_failures: usize,
    pub orthogonality_failures: usize,
    pub max_tangent_identity_residual: f64,
    pub max_tangent_orthogonality: f64,
}

pub fn random_form_suite(draws: usize, seed: u64) -> Result<RandomFormSuite> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut suite = RandomFormSuite {
        draws,
        max_cofactor_residual: 0.0,
        max_root_residual: 0.0,
        opposite_sign_failures: 0,
        orthogonality_failures: 0,
        max_tangent_identity_residual: 0.0,
        max_tangent_orthogonality: 0.0,
    };
    for i in 0..draws {
        let n = 1 + (i % 4);
        let mut m = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        m = &m * m.transpose() + DMatrix::identity(n, n) * 0.2;
        let a = DVector::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let form = HyperbolicForm::new(m, a)?;

        // Cofactor identity residual against direct inversion.
        let det_a = form.a_matrix.clone().lu().determinant();
        let det_b = form.b.clone().lu().determinant();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let resid = (sign * det_a / det_b - form.b_inv[(n, n)]).abs();
        suite.max_cofactor_residual = suite.max_cofactor_residual.max(resid);

        // Symbol roots: substitution residual and opposite signs.
        let xi = DVector::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        if xi.norm() > 1e-6 {
            let (tm, tp) = form.principal_roots(&xi)?;
            let scale = 1.0 + tm.abs().max(tp.abs()).powi(2);
            suite.max_root_residual = suite
                .max_root_residual
                .max(form.symbol(&xi, tm).abs() / scale)
                .max(form.symbol(&xi, tp).abs() / scale);
            if !(tm < 0.0 && tp > 0.0) {
                suite.opposite_sign_failures += 1;
            }
        }

        // Orthogonality: v time-like, w ⊥ v nonzero ⇒ w·Bw < 0.
        let mut v = DVector::from_fn(n + 1, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        v[n] = 1.0 + rng.random::<f64>();
        // Push v into the time-like cone by shrinking its spatial part.
        for _ in 0..60 {
            if form.vector_margin(&v) > 1e-9 {
                break;
            }
            for j in 0..n {
                v[j] *= 0.5;
            }
        }
        if form.vector_margin(&v) > 0.0 {
            let mut w = DVector::from_fn(n + 1, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let proj = w.dot(&v) / v.norm_squared();
            w -= &v * proj;
            if w.norm() > 1e-9 && form.normal_margin(&w) >= 0.0 {
                suite.orthogonality_failures += 1;
            }
        }

        // Tangent witness on a random time-like normal: build one from
        // the decomposition a0 ê0 + w with a0² λ0 < 1.
        let mut w = DVector::from_fn(n + 1, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let proj = w.dot(&form.e0);
        w -= &form.e0 * proj;
        if w.norm() > 1e-9 {
            let wbw = form.normal_margin(&w);
            let w_unit = &w / (-wbw).sqrt();
            let a0_max = (1.0 / form.lambda0).sqrt();
            let a0 = (rng.random::<f64>() * 1.8 - 0.9) * a0_max;
            let nu = &form.e0 * a0 + w_unit;
            if form.normal_margin(&nu) < 0.0 {
                let witness = form.boundary_tangent(&nu)?;
                suite.max_tangent_identity_residual = suite
                    .max_tangent_identity_residual
                    .max(witness.margin_identity_residual);
                suite.max_tangent_orthogonality =
                    suite.max_tangent_orthogonality.max(witness.orthogonality.abs());
            }
        }
    }
    Ok(suite)
}
