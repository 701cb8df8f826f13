//! Reference special functions used as oracles.

use statrs::function::gamma::ln_gamma;

/// K_ν(x) = ∫_0^∞ e^{-x cosh s} cosh(νs) ds for x > 0, by a doubling
/// trapezoid rule on the half line.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k needs x > 0");
    let f = |s: f64| (-x * s.cosh() + nu.abs() * s).exp() * 0.5 * (1.0 + (-2.0 * nu.abs() * s).exp());
    let sum = |h: f64| {
        let mut total = 0.5 * f(0.0);
        let mut k = 1;
        loop {
            let v = f(k as f64 * h);
            total += v;
            if v < 1e-20 * total && (k as f64 * h) > 1.0 {
                break;
            }
            k += 1;
        }
        total * h
    };
    let mut h = 0.5;
    let mut prev = sum(h);
    loop {
        h *= 0.5;
        let next = sum(h);
        if (next - prev).abs() <= 1e-15 * next || h < 1e-4 {
            return next;
        }
        prev = next;
    }
}

/// ∫_0^∞ e^{w/ħ} w^{c/ħ} dw/w = Γ(c/ħ)(-ħ)^{c/ħ}, for ħ < 0 and c/ħ > 0.
pub fn one_variable_factor(c: f64, hbar: f64) -> f64 {
    log_one_variable_factor(c, hbar).exp()
}

pub fn log_one_variable_factor(c: f64, hbar: f64) -> f64 {
    let a = c / hbar;
    assert!(a > 0.0 && hbar < 0.0, "factor needs c/ħ > 0 and ħ < 0");
    ln_gamma(a) + a * (-hbar).ln()
}
