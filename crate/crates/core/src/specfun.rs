//! Special-function kernel: the modified Bessel function of the second kind
//! of order one, and the Laplace-type integral it closes.

use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument the ascending series is used, above it Steed's
/// continued fraction.
const SERIES_CROSSOVER: f64 = 2.0;

/// Evaluates `K₁(x)` for `x > 0`.
///
/// Relative accuracy is better than 1e-13 over `[1e-6, 50]`. Large arguments
/// underflow to `0.0` (the value is below `f64::MIN_POSITIVE` past ~705).
pub fn bessel_k1(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(domain("x", x, "K1 requires a finite positive argument"));
    }
    Ok(if x <= SERIES_CROSSOVER {
        k1_series(x)
    } else {
        k1_continued_fraction(x)
    })
}

/// `K₁(x) = 1/x + ln(x/2)·I₁(x) − (x/4)·Σ [ψ(k+1)+ψ(k+2)] (x²/4)^k / (k!(k+1)!)`
fn k1_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0; // (x²/4)^k / (k!(k+1)!)
    let mut psi_k1 = -EULER_GAMMA; // ψ(k+1)
    let mut i1_sum = 0.0;
    let mut psi_sum = 0.0;
    let mut k = 0u32;
    loop {
        let psi_k2 = psi_k1 + 1.0 / f64::from(k + 1);
        i1_sum += term;
        psi_sum += (psi_k1 + psi_k2) * term;
        k += 1;
        term *= y / (f64::from(k) * f64::from(k + 1));
        psi_k1 = psi_k2;
        if term < 1e-18 * i1_sum {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * psi_sum
}

/// Steed's method on the second continued fraction (Temme's CF2) for order
/// zero, followed by the recurrence step to order one.
fn k1_continued_fraction(x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    const MAX_ITER: u32 = 10_000;

    let a1 = 0.25; // 1/4 − ν² with ν = 0
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_ITER {
        let fi = f64::from(i);
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    k0 * (x + 0.5 - h) / x
}

/// `∫₀^∞ exp(−λ/(4t) − γt) dt = √(λ/γ)·K₁(√(λγ))`.
pub fn laplace_bessel_integral(lambda: f64, gamma: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain("lambda", lambda, "must be finite and positive"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(domain("gamma", gamma, "must be finite and positive"));
    }
    let z = (lambda * gamma).sqrt();
    Ok((lambda / gamma).sqrt() * bessel_k1(z)?)
}

/// `z·K₁(z)`, the quantity every broadcast term reduces to. Tends to 1 as
/// `z → 0⁺`, which the series form evaluates without cancellation.
pub fn scaled_bessel_k1(z: f64) -> Result<f64> {
    Ok(z * bessel_k1(z)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `K₁(x) = ∫₀^∞ e^{−x cosh t} cosh t dt`, trapezoid rule on the half
    /// line. The integrand is entire and doubly-exponentially decaying, so the
    /// rule converges geometrically in the step.
    fn k1_quadrature(x: f64) -> f64 {
        let h = 1.0 / 128.0;
        let mut sum = 0.5 * (-x).exp();
        let mut i = 1u32;
        loop {
            let t = f64::from(i) * h;
            let ch = t.cosh();
            let f = (-x * ch).exp() * ch;
            sum += f;
            if x * ch > 800.0 || (f < 1e-300 && x * ch > 50.0) {
                break;
            }
            i += 1;
        }
        sum * h
    }

    #[test]
    fn reference_values() {
        assert!((bessel_k1(1.0).unwrap() - 0.601_907_230_2).abs() < 1e-10);
        assert!((bessel_k1(2.0).unwrap() - 0.139_865_881_8).abs() < 1e-10);
    }

    #[test]
    fn both_branches_match_quadrature() {
        for &x in &[
            1e-6, 1e-3, 0.1, 0.5, 1.0, 1.999, 2.0, 2.001, 3.0, 7.5, 20.0, 50.0,
        ] {
            let got = bessel_k1(x).unwrap();
            let want = k1_quadrature(x);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn branches_agree_at_crossover() {
        for &x in &[1.9, 2.0, 2.1] {
            let s = k1_series(x);
            let c = k1_continued_fraction(x);
            assert!(((s - c) / c).abs() < 1e-14, "x={x}: {s} vs {c}");
        }
    }

    #[test]
    fn small_argument_limit() {
        let x = 1e-3;
        assert!((x * bessel_k1(x).unwrap() - 1.0).abs() < 1e-5);
        assert!((scaled_bessel_k1(1e-9).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn large_argument_underflows_to_zero() {
        assert_eq!(bessel_k1(1e4).unwrap(), 0.0);
        assert!(bessel_k1(700.0).unwrap() > 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(bessel_k1(x).is_err());
        }
        assert!(laplace_bessel_integral(0.0, 1.0).is_err());
        assert!(laplace_bessel_integral(1.0, -1.0).is_err());
    }

    #[test]
    fn laplace_identity_examples() {
        let v = laplace_bessel_integral(4.0, 1.0).unwrap();
        assert!((v - 0.279_731_763_6).abs() < 1e-9);
        let v = laplace_bessel_integral(4.0, 4.0).unwrap();
        assert!((v - 0.012_483_498_8).abs() < 1e-9, "{v}");
        let v = laplace_bessel_integral(1e-12, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }
}
