//! The PT-symmetric oscillator
//!
//! ```text
//! H = -d²/dx² + (x - ic)² + (α² - 1/4) / (x - ic)²,   α > 0, c > 0
//! ```
//!
//! with its double spectrum `E_qn = 4n + 2 - 2qα`, closed-form eigenfunctions
//! and the indefinite inner product `(u|v) = ∫ u*(-x) v(x) dx`.
//!
//! Eigenfunctions carry the phase `(-1)^n` on top of the positive magnitude
//! `|N_qn|`; this is the phase generated by building excited states with the
//! creation operator from a real positive ground state, so that the ladder
//! coefficients come out as `+sqrt(n)`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, UniformGrid};
use crate::quadrature::{integrate_line, QuadratureConfig};
use crate::special::{complex_power, cos_pi, gamma_real, laguerre, sin_pi, LaguerreParam};

pub const DEFAULT_SHIFT: f64 = 1.0;
const INTEGER_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuasiParity {
    Plus,
    Minus,
}

impl QuasiParity {
    pub const BOTH: [QuasiParity; 2] = [QuasiParity::Plus, QuasiParity::Minus];

    pub fn from_sign(q: i32) -> Result<Self> {
        match q {
            1 => Ok(Self::Plus),
            -1 => Ok(Self::Minus),
            _ => Err(Error::InvalidParams(format!("quasi-parity must be +1 or -1, got {q}"))),
        }
    }

    pub fn sign(self) -> i32 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }

    pub fn value(self) -> f64 {
        self.sign() as f64
    }
}

impl fmt::Display for QuasiParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "+1",
            Self::Minus => "-1",
        })
    }
}

pub(crate) fn is_near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_GUARD
}

/// Coupling `α` and imaginary shift `c`, with the branch `N = floor(α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtoParams {
    alpha: f64,
    c: f64,
    branch_n: u32,
}

impl PtoParams {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
        }
        if is_near_integer(alpha) {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} is (too close to) an integer"
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!("shift c must be positive, got {c}")));
        }
        Ok(Self {
            alpha,
            c,
            branch_n: alpha.floor() as u32,
        })
    }

    pub fn with_default_shift(alpha: f64) -> Result<Self> {
        Self::new(alpha, DEFAULT_SHIFT)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn branch_n(&self) -> u32 {
        self.branch_n
    }

    /// Strength `G = α² - 1/4` of the centrifugal-like core.
    pub fn core_strength(&self) -> f64 {
        self.alpha * self.alpha - 0.25
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenstateSpec {
    pub params: PtoParams,
    pub q: QuasiParity,
    pub n: usize,
}

impl EigenstateSpec {
    pub fn new(params: PtoParams, q: QuasiParity, n: usize) -> Self {
        Self { params, q, n }
    }

    pub fn with_level(self, n: usize) -> Self {
        Self { n, ..self }
    }
}

/// `E_qn = 4n + 2 - 2qα`.
pub fn energy(spec: &EigenstateSpec) -> f64 {
    4.0 * spec.n as f64 + 2.0 - 2.0 * spec.q.value() * spec.params.alpha
}

/// Sign of the squared pseudo-norm assigned to level `n`.
pub fn sigma(params: &PtoParams, q: QuasiParity, n: usize) -> i32 {
    let big_n = params.branch_n as usize;
    let parity = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
    match q {
        QuasiParity::Minus => parity(big_n + 1),
        QuasiParity::Plus if n < big_n => parity(n),
        QuasiParity::Plus => parity(big_n),
    }
}

/// `|N_qn|`, fixed so that `(u_qn|u_qn) = sigma(α, q, n)`.
pub fn norm_coeff_abs(spec: &EigenstateSpec) -> Result<f64> {
    let alpha = spec.params.alpha;
    let n = spec.n;
    let big_n = spec.params.branch_n as usize;
    let sign_n = if big_n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sign_lvl = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let ratio = gamma_ratio(-spec.q.value() * alpha, n)?;
    let bracket = match spec.q {
        QuasiParity::Plus if n < big_n => sign_lvl * sin_pi(alpha) * ratio,
        _ => sign_n * sin_pi(alpha) * ratio,
    };
    if !(bracket > 0.0) {
        return Err(Error::InternalSign {
            alpha,
            q: spec.q.sign(),
            n,
            value: bracket,
        });
    }
    Ok(bracket.powf(-0.5))
}

/// `Gamma(a + n + 1) / n!`
fn gamma_ratio(a: f64, n: usize) -> Result<f64> {
    Ok(gamma_real(a + n as f64 + 1.0)? / gamma_real(n as f64 + 1.0)?)
}

/// `|N|^2 cos(pi(-qα + 1/2)) Gamma(-qα + n + 1) / n!`
pub fn pseudo_norm_analytic(spec: &EigenstateSpec, coeff_abs: f64) -> Result<f64> {
    let a = -spec.q.value() * spec.params.alpha;
    Ok(coeff_abs * coeff_abs * cos_pi(a + 0.5) * gamma_ratio(a, spec.n)?)
}

/// Magnitude of the normalization for an arbitrary non-integer parameter
/// label, positive or not. Agrees with [`norm_coeff_abs`] for valid `α`.
pub fn norm_coeff_abs_at(label: f64, q: QuasiParity, n: usize) -> Result<f64> {
    if is_near_integer(label) {
        return Err(Error::InvalidParams(format!("parameter label {label} is an integer")));
    }
    let v = (sin_pi(label) * gamma_ratio(-q.value() * label, n)?).abs();
    Ok(v.powf(-0.5))
}

/// Sign of the pseudo-norm of a magnitude-normalized eigenfunction at an
/// arbitrary non-integer label. Agrees with [`sigma`] for valid `α`.
pub fn pseudo_norm_sign_at(label: f64, q: QuasiParity, n: usize) -> Result<i32> {
    if is_near_integer(label) {
        return Err(Error::InvalidParams(format!("parameter label {label} is an integer")));
    }
    let v = q.value() * sin_pi(label) * gamma_ratio(-q.value() * label, n)?;
    Ok(if v > 0.0 { 1 } else { -1 })
}

/// A normalized eigenfunction with its coefficient precomputed.
///
/// The label need not be a valid coupling: ladder constructions evaluate
/// the same closed form at `α ± 1`, which can be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenstate {
    label: f64,
    q: QuasiParity,
    n: usize,
    c: f64,
    coeff: f64,
}

impl Eigenstate {
    pub fn new(spec: &EigenstateSpec) -> Result<Self> {
        let mag = norm_coeff_abs(spec)?;
        Ok(Self {
            label: spec.params.alpha,
            q: spec.q,
            n: spec.n,
            c: spec.params.c,
            coeff: if spec.n.is_multiple_of(2) { mag } else { -mag },
        })
    }

    pub fn at_label(label: f64, q: QuasiParity, n: usize, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParams(format!("shift c must be positive, got {c}")));
        }
        let mag = norm_coeff_abs_at(label, q, n)?;
        Ok(Self {
            label,
            q,
            n,
            c,
            coeff: if n.is_multiple_of(2) { mag } else { -mag },
        })
    }

    pub fn label(&self) -> f64 {
        self.label
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn quasi_parity(&self) -> QuasiParity {
        self.q
    }

    /// Signed real coefficient `N_qn` including the phase.
    pub fn coefficient(&self) -> f64 {
        self.coeff
    }

    pub fn energy(&self) -> f64 {
        4.0 * self.n as f64 + 2.0 - 2.0 * self.q.value() * self.label
    }

    fn laguerre_a(&self) -> f64 {
        -self.q.value() * self.label
    }

    fn w(&self, x: f64) -> Complex64 {
        Complex64::new(x, -self.c)
    }

    // coefficient * exp(-w²/2) * w^p
    fn envelope(&self, w: Complex64) -> Complex64 {
        let p = self.laguerre_a() + 0.5;
        let pw = complex_power(w, p).expect("w = x - ic never vanishes for c > 0");
        (-(w * w) * 0.5).exp() * pw * self.coeff
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let w = self.w(x);
        self.envelope(w) * laguerre(LaguerreParam::new(self.n, self.laguerre_a()), w * w)
    }

    /// Analytic first or second derivative in `x`.
    pub fn deriv(&self, x: f64, order: u8) -> Result<Complex64> {
        let w = self.w(x);
        let t = w * w;
        let a = self.laguerre_a();
        let p = a + 0.5;
        let n = self.n;
        let lag = |k: usize, shift: f64| -> Complex64 {
            if k > n {
                Complex64::new(0.0, 0.0)
            } else {
                laguerre(LaguerreParam::new(n - k, a + shift), t)
            }
        };
        let l0 = lag(0, 0.0);
        // dL/dt and d²L/dt²
        let l1 = -lag(1, 1.0);
        let l2 = lag(2, 2.0);
        let b = self.envelope(w);
        let f = -w + p / w;
        match order {
            1 => Ok(b * (f * l0 + w * l1 * 2.0)),
            2 => {
                let fp = -1.0 - p / t;
                Ok(b * ((f * f + fp) * l0 + (f * w * 4.0 + 2.0) * l1 + t * l2 * 4.0))
            }
            _ => Err(Error::InvalidParams(format!("derivative order {order} not supported"))),
        }
    }

    /// `(H u)(x)` using the analytic second derivative.
    pub fn apply_hamiltonian(&self, x: f64) -> Complex64 {
        let w = self.w(x);
        let g = self.label * self.label - 0.25;
        let u = self.value(x);
        let upp = self.deriv(x, 2).expect("order 2 is supported");
        -upp + (w * w + g / (w * w)) * u
    }

    pub fn sample(&self, grid: UniformGrid) -> Result<GridFunction> {
        GridFunction::sample(grid, |x| self.value(x))
    }
}

/// `u_qn(x)`.
pub fn eigenfunction(spec: &EigenstateSpec, x: f64) -> Result<Complex64> {
    Ok(Eigenstate::new(spec)?.value(x))
}

/// Analytic `d/dx` (order 1) or `d²/dx²` (order 2) of `u_qn`.
pub fn eigenfunction_deriv(spec: &EigenstateSpec, x: f64, order: u8) -> Result<Complex64> {
    Eigenstate::new(spec)?.deriv(x, order)
}

/// `(u|v) = ∫ u*(-x) v(x) dx` for functions given in closed form.
pub fn pseudo_inner<U, V>(u: U, v: V, cfg: &QuadratureConfig) -> Result<Complex64>
where
    U: Fn(f64) -> Complex64,
    V: Fn(f64) -> Complex64,
{
    Ok(integrate_line(|x| u(-x).conj() * v(x), cfg)?.value)
}

/// `(u|u)` of a normalized eigenstate by quadrature.
pub fn pseudo_norm_quadrature(state: &Eigenstate, cfg: &QuadratureConfig) -> Result<Complex64> {
    pseudo_inner(|x| state.value(x), |x| state.value(x), cfg)
}

/// Largest `|(H - E) u|` over the grid, relative to the largest `|u|`.
pub fn hamiltonian_residual(spec: &EigenstateSpec, grid: &UniformGrid) -> Result<f64> {
    let state = Eigenstate::new(spec)?;
    let e = energy(spec);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for x in grid.points() {
        let u = state.value(x);
        worst = worst.max((state.apply_hamiltonian(x) - u * e).norm());
        scale = scale.max(u.norm());
    }
    Ok(worst / scale)
}

/// Pseudo-Rayleigh quotient `(u|Hu) / (u|u)`.
pub fn pseudo_rayleigh(spec: &EigenstateSpec, cfg: &QuadratureConfig) -> Result<Complex64> {
    let state = Eigenstate::new(spec)?;
    let num = pseudo_inner(|x| state.value(x), |x| state.apply_hamiltonian(x), cfg)?;
    let den = pseudo_norm_quadrature(&state, cfg)?;
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::DEFAULT_TOL;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn spec(alpha: f64, c: f64, q: QuasiParity, n: usize) -> EigenstateSpec {
        EigenstateSpec::new(PtoParams::new(alpha, c).unwrap(), q, n)
    }

    use QuasiParity::{Minus, Plus};

    #[test]
    fn params_validation() {
        assert!(PtoParams::new(1.0, 1.0).is_err());
        assert!(PtoParams::new(2.0 + 1e-10, 1.0).is_err());
        assert!(PtoParams::new(-0.5, 1.0).is_err());
        assert!(PtoParams::new(0.5, 0.0).is_err());
        let p = PtoParams::new(2.7, 0.5).unwrap();
        assert_eq!(p.branch_n(), 2);
        assert_relative_eq!(p.core_strength(), 2.7 * 2.7 - 0.25);
        assert!(QuasiParity::from_sign(0).is_err());
        assert_eq!(QuasiParity::from_sign(-1).unwrap(), Minus);
    }

    #[test]
    fn energies() {
        assert_eq!(energy(&spec(0.5, 1.0, Plus, 0)), 1.0);
        assert_eq!(energy(&spec(0.5, 1.0, Minus, 0)), 3.0);
        assert_relative_eq!(energy(&spec(1.7, 1.0, Plus, 3)), 10.6, max_relative = 1e-15);
        for q in QuasiParity::BOTH {
            for n in 0..10 {
                let s = spec(1.3, 1.0, q, n);
                assert!((energy(&s.with_level(n + 1)) - energy(&s) - 4.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn sigma_examples() {
        let p03 = PtoParams::new(0.3, 1.0).unwrap();
        let p15 = PtoParams::new(1.5, 1.0).unwrap();
        assert_eq!(sigma(&p03, Minus, 5), -1);
        assert_eq!(sigma(&p15, Plus, 0), 1);
        assert_eq!(sigma(&p15, Plus, 4), -1);
    }

    #[test]
    fn sigma_matches_analytic_sign() {
        for alpha in [0.25, 0.5, 0.9, 1.2, 1.5, 2.5, 3.3, 4.7] {
            let p = PtoParams::new(alpha, 1.0).unwrap();
            for q in QuasiParity::BOTH {
                for n in 0..8 {
                    assert_eq!(sigma(&p, q, n), pseudo_norm_sign_at(alpha, q, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn norm_coefficients() {
        assert_relative_eq!(
            norm_coeff_abs(&spec(0.5, 1.0, Plus, 0)).unwrap(),
            PI.powf(-0.25),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            norm_coeff_abs(&spec(0.5, 1.0, Minus, 0)).unwrap(),
            (2.0 / PI.sqrt()).sqrt(),
            max_relative = 1e-14
        );
        let want = (2.0 * PI.sqrt()).powf(-0.5);
        assert_relative_eq!(
            norm_coeff_abs(&spec(1.5, 1.0, Plus, 0)).unwrap(),
            want,
            max_relative = 1e-14
        );
        assert_relative_eq!(want, 0.531_125_966_014, max_relative = 1e-11);
        for alpha in [0.3, 1.5, 2.5, 3.7] {
            for q in QuasiParity::BOTH {
                for n in 0..7 {
                    let s = spec(alpha, 1.0, q, n);
                    assert_relative_eq!(
                        norm_coeff_abs(&s).unwrap(),
                        norm_coeff_abs_at(alpha, q, n).unwrap(),
                        max_relative = 1e-14
                    );
                }
            }
        }
    }

    #[test]
    fn analytic_pseudo_norm() {
        let s = spec(0.5, 1.0, Plus, 0);
        let v = pseudo_norm_analytic(&s, norm_coeff_abs(&s).unwrap()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-14);

        let v = pseudo_norm_analytic(&spec(0.5, 1.0, Minus, 0), 1.0).unwrap();
        assert_relative_eq!(v, -PI.sqrt() / 2.0, max_relative = 1e-14);

        let s = spec(1.5, 1.0, Plus, 0);
        let v = pseudo_norm_analytic(&s, norm_coeff_abs(&s).unwrap()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-14);

        for alpha in [0.25, 0.75, 1.5, 2.5, 3.4] {
            let p = PtoParams::new(alpha, 1.0).unwrap();
            for q in QuasiParity::BOTH {
                for n in 0..8 {
                    let s = EigenstateSpec::new(p, q, n);
                    let v = pseudo_norm_analytic(&s, norm_coeff_abs(&s).unwrap()).unwrap();
                    assert_relative_eq!(v, sigma(&p, q, n) as f64, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn eigenfunction_plug_in() {
        // u(0) = pi^{-1/4} exp(-(-i)^2 / 2) (-i)^0 = pi^{-1/4} e^{1/2}
        let s = spec(0.5, 1.0, Plus, 0);
        let u = eigenfunction(&s, 0.0).unwrap();
        let w = Complex64::new(0.0, -1.0);
        let want = (-(w * w) * 0.5).exp() * PI.powf(-0.25);
        assert!((u - want).norm() < 1e-15);
        assert_relative_eq!(u.re, PI.powf(-0.25) * 0.5f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn ground_state_derivative() {
        let s = spec(0.5, 1.0, Plus, 0);
        let u0 = eigenfunction(&s, 0.0).unwrap();
        let d = eigenfunction_deriv(&s, 0.0, 1).unwrap();
        assert!((d - Complex64::new(0.0, 1.0) * u0).norm() < 1e-14);
        assert!(eigenfunction_deriv(&s, 0.0, 3).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for &(alpha, q, n, c) in &[
            (0.5, Plus, 3, 1.0),
            (1.7, Minus, 2, 1.0),
            (2.5, Plus, 1, 0.5),
            (0.3, Minus, 5, 2.0),
        ] {
            let st = Eigenstate::new(&spec(alpha, c, q, n)).unwrap();
            for &x in &[-2.3, -0.4, 0.0, 0.9, 1.8] {
                let fd1 = (st.value(x + h) - st.value(x - h)) / (2.0 * h);
                let d1 = st.deriv(x, 1).unwrap();
                assert!((fd1 - d1).norm() <= 1e-7 * d1.norm(), "d1 {alpha} {n} {x}");
                let fd2 = (st.value(x + h) - st.value(x) * 2.0 + st.value(x - h)) / (h * h);
                let d2 = st.deriv(x, 2).unwrap();
                assert!((fd2 - d2).norm() <= 1e-5 * d2.norm(), "d2 {alpha} {n} {x}");
            }
        }
    }

    #[test]
    fn ground_state_pseudo_norms() {
        let cfg = QuadratureConfig::default();
        let plus = Eigenstate::new(&spec(0.5, 1.0, Plus, 0)).unwrap();
        let minus = Eigenstate::new(&spec(0.5, 1.0, Minus, 0)).unwrap();
        let one = Eigenstate::new(&spec(0.5, 1.0, Plus, 1)).unwrap();
        assert!((pseudo_norm_quadrature(&plus, &cfg).unwrap() - 1.0).norm() < 1e-9);
        assert!((pseudo_norm_quadrature(&minus, &cfg).unwrap() + 1.0).norm() < 1e-9);
        let cross = pseudo_inner(|x| plus.value(x), |x| one.value(x), &cfg).unwrap();
        assert!(cross.norm() < 1e-9);
    }

    #[test]
    fn hermitian_like_symmetry() {
        let cfg = QuadratureConfig::for_shift(1.0, DEFAULT_TOL).unwrap();
        let u = Eigenstate::new(&spec(1.5, 1.0, Plus, 2)).unwrap();
        let gauss = |x: f64| {
            let w = Complex64::new(x - 0.3, -1.0);
            (-(w * w) * 0.5).exp() * Complex64::new(0.2, 1.1)
        };
        let uv = pseudo_inner(|x| u.value(x), gauss, &cfg).unwrap();
        let vu = pseudo_inner(gauss, |x| u.value(x), &cfg).unwrap();
        assert!((uv - vu.conj()).norm() < 1e-9);
    }

    #[test]
    fn residual_examples() {
        let grid = UniformGrid::default();
        assert!(hamiltonian_residual(&spec(0.5, 1.0, Plus, 0), &grid).unwrap() < 1e-10);
        let s = spec(1.7, 1.0, Minus, 2);
        assert_relative_eq!(energy(&s), 13.4, max_relative = 1e-15);
        assert!(hamiltonian_residual(&s, &grid).unwrap() < 1e-8);
    }

    #[test]
    fn rayleigh_quotient() {
        let s = spec(0.8, 1.0, Plus, 1);
        let r = pseudo_rayleigh(&s, &QuadratureConfig::default()).unwrap();
        assert!((r - 4.4).norm() < 1e-8, "{r}");
    }

    #[test]
    fn negative_labels_evaluate() {
        // label -0.5 with q = +1 has the same closed form as label 0.5, q = -1
        let a = Eigenstate::at_label(-0.5, Plus, 3, 1.0).unwrap();
        let b = Eigenstate::new(&spec(0.5, 1.0, Minus, 3)).unwrap();
        for x in [-1.0, 0.2, 2.0] {
            assert!((a.value(x) - b.value(x)).norm() < 1e-14);
        }
        assert!(Eigenstate::at_label(-2.0, Plus, 0, 1.0).is_err());
    }
}
