use movobs_core::boundary::{BoundaryCurve2D, FourierTerm};
use movobs_core::characteristics::{poincare_map, SpeedField};

// x(σ,t) = (1 + a sin(2π(m1 σ − t)) + b sin(2π(m2 σ − t))) e(2πσ)
fn wavy2(m1: i32, a: f64, m2: i32, b: f64) -> BoundaryCurve2D {
    let mut xt = vec![FourierTerm { m: 1, n: 0, cos_coef: 1.0, sin_coef: 0.0 }];
    let mut yt = vec![FourierTerm { m: 1, n: 0, cos_coef: 0.0, sin_coef: 1.0 }];
    for (m, c) in [(m1, a), (m2, b)] {
        xt.push(FourierTerm { m: m + 1, n: -1, cos_coef: 0.0, sin_coef: c / 2.0 });
        xt.push(FourierTerm { m: m - 1, n: -1, cos_coef: 0.0, sin_coef: c / 2.0 });
        yt.push(FourierTerm { m: m + 1, n: -1, cos_coef: -c / 2.0, sin_coef: 0.0 });
        yt.push(FourierTerm { m: m - 1, n: -1, cos_coef: c / 2.0, sin_coef: 0.0 });
    }
    BoundaryCurve2D::fourier(xt, yt)
}

fn main() {
    for &(m1, m2) in &[(14i32, 11i32), (13, 10), (15, 11)] {
        for &(a, b) in &[(0.12f64, 0.12f64), (0.13, 0.13), (0.14, 0.12), (0.14, 0.14), (0.15, 0.13)] {
            let curve = wavy2(m1, a, m2, b);
            let Ok(u) = curve.uniform_constants(256) else {
                println!("m=({m1},{m2}) a=({a:.3},{b:.3}): rejected");
                continue;
            };
            let field = SpeedField::lower(curve.clone());
            let mut s = 0.0;
            let mut ok = true;
            for _ in 0..30 {
                match poincare_map(&field, s, 0.0) { Ok(v) => s = v, Err(_) => { ok = false; break } }
            }
            if !ok { println!("m=({m1},{m2}) a=({a:.3},{b:.3}): failed"); continue }
            let rot = s / 30.0;
            let mut min = (f64::INFINITY, 0.0);
            let mut max = (f64::NEG_INFINITY, 0.0);
            for i in 0..60 {
                let s0 = i as f64 / 60.0;
                let p = poincare_map(&field, s0, 0.0).unwrap() - s0;
                if p < min.0 { min = (p, s0); }
                if p > max.0 { max = (p, s0); }
            }
            println!(
                "m=({m1},{m2}) a=({a:.3},{b:.3}): margin={:.2} rot~{rot:+.5} P-s in [{:+.5}@{:.2}, {:+.5}@{:.2}] {}",
                u.timelike_margin, min.0, min.1, max.0, max.1,
                if min.0 < 0.0 && max.0 > 0.0 { "LOCKED" } else { "" }
            );
        }
    }
}
