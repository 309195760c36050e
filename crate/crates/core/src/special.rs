//! Special-function kernels: generalized Laguerre polynomials with real
//! parameter and complex argument, the real gamma function on both sides of
//! the origin, and principal-branch complex powers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Degree and (real, unrestricted) superscript parameter of `L_n^{(a)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParam {
    pub a: f64,
    pub n: usize,
}

impl LaguerreParam {
    pub fn new(n: usize, a: f64) -> Self {
        Self { a, n }
    }
}

/// `L_n^{(a)}(zeta)` by the three-term recurrence in degree.
///
/// The recurrence is valid for every real `a`, including the continuation
/// below `a = -1` where the polynomials lose their orthogonality weight.
pub fn laguerre(param: LaguerreParam, zeta: Complex64) -> Complex64 {
    let a = param.a;
    let one = Complex64::new(1.0, 0.0);
    if param.n == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = one * (1.0 + a) - zeta;
    for k in 1..param.n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - zeta) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `d/dzeta L_n^{(a)}(zeta) = -L_{n-1}^{(a+1)}(zeta)`, zero for `n = 0`.
pub fn laguerre_deriv(param: LaguerreParam, zeta: Complex64) -> Complex64 {
    if param.n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    -laguerre(LaguerreParam::new(param.n - 1, param.a + 1.0), zeta)
}

/// Monomial coefficients of `L_n^{(a)}` in ascending powers of its argument.
///
/// Built with the same degree recurrence as [`laguerre`], applied to
/// coefficient vectors.
pub fn laguerre_coefficients(param: LaguerreParam) -> Vec<f64> {
    let a = param.a;
    let mut prev = vec![1.0];
    if param.n == 0 {
        return prev;
    }
    let mut cur = vec![1.0 + a, -1.0];
    for k in 1..param.n {
        let kf = k as f64;
        let mut next = vec![0.0; k + 2];
        for (j, &cj) in cur.iter().enumerate() {
            next[j] += (2.0 * kf + 1.0 + a) * cj;
            next[j + 1] -= cj;
        }
        for (j, &pj) in prev.iter().enumerate() {
            next[j] -= (kf + a) * pj;
        }
        for v in next.iter_mut() {
            *v /= kf + 1.0;
        }
        prev = cur;
        cur = next;
    }
    cur
}

const POLE_TOL: f64 = 1e-9;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi * x)` with the argument reduced exactly before scaling by pi.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]; fold onto [-1/2, 1/2] where sin is well conditioned.
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// `cos(pi * x)`.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn lanczos(x: f64) -> f64 {
    // Gamma(x) for x >= 0.5
    let x = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * sum
}

/// Real gamma function.
///
/// Positive arguments use the Lanczos approximation; arguments below one
/// half go through `Gamma(x) Gamma(1 - x) = pi / sin(pi x)`.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite argument {x}")));
    }
    if x <= 0.0 && (x - x.round()).abs() < POLE_TOL {
        return Err(Error::Pole { x });
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * lanczos(1.0 - x)))
    } else if x.fract() == 0.0 && x <= 21.0 {
        // exact factorials where they fit in a double without rounding
        Ok((1..x as u64).map(|k| k as f64).product())
    } else {
        Ok(lanczos(x))
    }
}

/// Principal-branch power `exp(p Log w)` with `arg w` in `(-pi, pi]`.
pub fn complex_power(w: Complex64, p: f64) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 {
        if p > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::Domain(format!("0 raised to non-positive power {p}")));
    }
    if p == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok((w.ln() * p).exp())
}
