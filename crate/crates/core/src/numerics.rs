//! Small shared numerical kernels: RK4 steps, adaptive quadrature,
//! bracketed root finding, and the C2 smoothstep.

/// One classical RK4 step for a scalar ODE y' = f(t, y).
pub fn rk4_step<F: FnMut(f64, f64) -> f64 + ?Sized>(f: &mut F, t: f64, y: f64, h: f64) -> f64 {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    let k4 = f(t + h, y + h * k3);
    y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Fallible RK4 step; aborts as soon as the right-hand side fails.
pub fn rk4_step_try<E, F: FnMut(f64, f64) -> Result<f64, E>>(
    f: &mut F,
    t: f64,
    y: f64,
    h: f64,
) -> Result<f64, E> {
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, y + 0.5 * h * k1)?;
    let k3 = f(t + 0.5 * h, y + 0.5 * h * k2)?;
    let k4 = f(t + h, y + h * k3)?;
    Ok(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Bisection on a bracketing interval; `f(lo)` and `f(hi)` must have
/// opposite signs. Returns the midpoint after the interval shrinks
/// below `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(f: &mut F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0, "bisect requires a sign change");
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (flo <= 0.0) == (fm <= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// C2 smoothstep: 0 for u <= 0, 1 for u >= 1, 6u^5 - 15u^4 + 10u^3 between.
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

/// First derivative of [`smoothstep`]: 30 u^2 (1-u)^2 on (0, 1).
pub fn smoothstep_d1(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let w = u * (1.0 - u);
        30.0 * w * w
    }
}

/// Second derivative of [`smoothstep`]: 60 u (1-u)(1-2u) on (0, 1).
pub fn smoothstep_d2(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    }
}

/// Euclidean helpers on fixed-size 2-vectors.
pub fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn scale(a: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] * s, a[1] * s]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_matches_closed_forms() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
        let v = adaptive_simpson(&|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12);
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(&mut |x: f64| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn smoothstep_is_c2_at_joins() {
        for h in [1e-5, 1e-6] {
            assert!((smoothstep(h) / h).abs() < 1e-3);
            assert!(((1.0 - smoothstep(1.0 - h)) / h).abs() < 1e-3);
        }
        assert_eq!(smoothstep_d1(0.0), 0.0);
        assert_eq!(smoothstep_d2(1.0), 0.0);
        assert!((smoothstep_d1(0.5) - 1.875).abs() < 1e-12);
    }

    #[test]
    fn rk4_exponential() {
        let mut y = 1.0;
        let mut f = |_t: f64, y: f64| y;
        let n = 1000;
        let h = 1.0 / n as f64;
        for i in 0..n {
            y = rk4_step(&mut f, i as f64 * h, y, h);
        }
        assert!((y - std::f64::consts::E).abs() < 1e-10);
    }
}
