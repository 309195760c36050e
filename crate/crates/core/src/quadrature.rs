//! Whole-line quadrature for complex integrands with Gaussian decay.
//!
//! The line is truncated to `[-X, X]` and covered by composite
//! Gauss-Legendre panels. Every refinement halves all panels; the loop stops
//! once two consecutive estimates agree to the absolute tolerance, or to the
//! rounding floor `ROUNDOFF_SAFETY * eps * sum(w |f|)` when that is larger.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
const GL_ORDER: usize = 16;
const MAX_REFINEMENT_CAP: u32 = 30;
/// Integrands whose absolute mass dwarfs the integral (large shifts, high
/// levels) cannot be summed more accurately than a few eps times that mass.
const ROUNDOFF_SAFETY: f64 = 4.0;

/// Shifts below this get a densely subdivided core around `x = 0`.
const CORE_SHIFT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute tolerance between consecutive refinements.
    pub tol: f64,
    /// Truncation half-width `X`.
    pub half_width: f64,
    pub max_refinements: u32,
    /// Half-width of a region around the origin that starts out with panels
    /// of this size instead of unit panels.
    pub core: Option<f64>,
}

impl QuadratureConfig {
    pub fn new(tol: f64, half_width: f64, max_refinements: u32) -> Result<Self> {
        let cfg = Self {
            tol,
            half_width,
            max_refinements,
            core: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults for integrands carrying an `exp(-x^2 + c^2)` envelope.
    ///
    /// `X = c + sqrt(ln(1/tol)) + 4`; the margin covers polynomial prefactors
    /// up to degree ~120.
    pub fn for_shift(c: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParams(format!("tolerance {tol} not in (0, 1)")));
        }
        let mut cfg = Self::new(tol, c.abs() + (1.0 / tol).ln().sqrt() + 4.0, 12)?;
        if c.abs() < CORE_SHIFT_THRESHOLD {
            cfg.core = Some(c.abs().max(0.02));
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "half_width must be positive, got {}",
                self.half_width
            )));
        }
        if self.max_refinements > MAX_REFINEMENT_CAP {
            return Err(Error::InvalidParams(format!(
                "max_refinements {} exceeds {MAX_REFINEMENT_CAP}",
                self.max_refinements
            )));
        }
        if let Some(core) = self.core {
            if !(core > 0.0) {
                return Err(Error::InvalidParams(format!("core width must be positive, got {core}")));
            }
        }
        Ok(())
    }

    fn base_breakpoints(&self) -> Vec<f64> {
        let x = self.half_width;
        let outer = (2.0 * x).ceil().max(1.0) as usize;
        let mut pts: Vec<f64> = (0..=outer).map(|i| -x + 2.0 * x * i as f64 / outer as f64).collect();
        if let Some(core) = self.core {
            // panels of width `core` across a few core widths around the origin
            let reach = (4.0 * core).max(0.5).min(x);
            let m = (2.0 * reach / core).ceil() as usize;
            pts.retain(|p| p.abs() >= reach);
            pts.extend((0..=m).map(|i| -reach + 2.0 * reach * i as f64 / m as f64));
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        }
        pts
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::for_shift(1.0, DEFAULT_TOL).expect("default config is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    /// Difference between the last two refinements, or the rounding floor
    /// if that is what stopped the loop.
    pub error_estimate: f64,
    pub refinements: u32,
    pub evaluations: usize,
    /// Stopped on the rounding floor rather than on `tol`.
    pub roundoff_limited: bool,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite sum and the matching sum of `w |f|`.
fn composite<F>(f: &F, breaks: &[f64], split: usize, nodes: &[f64], weights: &[f64]) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for pair in breaks.windows(2) {
        let h = (pair[1] - pair[0]) / split as f64;
        for s in 0..split {
            let a = pair[0] + h * s as f64;
            let mid = a + 0.5 * h;
            let half = 0.5 * h;
            let mut panel = Complex64::new(0.0, 0.0);
            let mut panel_mass = 0.0;
            for (&t, &w) in nodes.iter().zip(weights) {
                let v = f(mid + half * t);
                panel += v * w;
                panel_mass += v.norm() * w;
            }
            total += panel * half;
            mass += panel_mass * half;
        }
    }
    (total, mass)
}

/// Integral of `f` over the real line, truncated to `[-X, X]`.
pub fn integrate_line<F>(f: F, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    let (nodes, weights) = gauss_legendre(GL_ORDER);
    let breaks = cfg.base_breakpoints();
    let panels = breaks.len() - 1;

    let mut split = 1usize;
    let (mut prev, _) = composite(&f, &breaks, split, &nodes, &weights);
    let mut evaluations = panels * GL_ORDER;
    let mut estimate = f64::INFINITY;
    for r in 1..=cfg.max_refinements {
        split *= 2;
        let (cur, mass) = composite(&f, &breaks, split, &nodes, &weights);
        evaluations += panels * split * GL_ORDER;
        if !(cur.re.is_finite() && cur.im.is_finite()) {
            return Err(Error::Domain("integrand produced a non-finite value".into()));
        }
        estimate = (cur - prev).norm();
        let floor = ROUNDOFF_SAFETY * f64::EPSILON * mass;
        if estimate < cfg.tol.max(floor) {
            let roundoff_limited = estimate >= cfg.tol;
            return Ok(Integral {
                value: cur,
                error_estimate: if roundoff_limited { floor } else { estimate },
                refinements: r,
                evaluations,
                roundoff_limited,
            });
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        refinements: cfg.max_refinements,
        estimate,
        tol: cfg.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_real;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(GL_ORDER);
        let sum_w: f64 = w.iter().sum();
        assert!((sum_w - 2.0).abs() < 1e-14);
        // x^30 is exact for a 16-point rule
        let m30: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate_line(|x| c((-x * x).exp(), 0.0), &QuadratureConfig::default()).unwrap();
        assert!((r.value - PI.sqrt()).norm() < 1e-12);
        assert!(r.error_estimate < 1e-10);
    }

    #[test]
    fn shifted_gaussian_integral() {
        let r = integrate_line(
            |x| {
                let w = c(x, -1.0);
                (-(w * w)).exp()
            },
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((r.value - PI.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn ground_state_norm_integrand() {
        // alpha = 1/2, c = 1, q = +1, unit coefficient: u(x) = exp(-(x - i)^2 / 2)
        let u = |x: f64| {
            let w = c(x, -1.0);
            (-(w * w) * 0.5).exp()
        };
        let r = integrate_line(|x| u(-x).conj() * u(x), &QuadratureConfig::default()).unwrap();
        // cos(0) Gamma(-alpha + 1) / 0! = Gamma(1/2)
        let want = gamma_real(0.5).unwrap();
        assert!((r.value - want).norm() < 1e-12);
    }

    #[test]
    fn core_refinement_for_small_shift() {
        let cfg = QuadratureConfig::for_shift(0.1, 1e-10).unwrap();
        assert!(cfg.core.is_some());
        let bp = cfg.base_breakpoints();
        assert!(bp.windows(2).all(|p| p[1] > p[0]));
        // 1 / (x - 0.1 i)^2 times a Gaussian; its contour shift to the
        // real axis is not available, so compare against a much finer run.
        let f = |x: f64| {
            let w = c(x, -0.1);
            (-(w * w)).exp() / (w * w)
        };
        let r = integrate_line(f, &cfg).unwrap();
        let fine = QuadratureConfig {
            tol: 1e-13,
            max_refinements: 16,
            ..cfg
        };
        let r2 = integrate_line(f, &fine).unwrap();
        assert!((r.value - r2.value).norm() < 1e-9);
    }

    #[test]
    fn no_convergence_reported() {
        let cfg = QuadratureConfig::new(1e-14, 5.0, 1).unwrap();
        // discontinuous integrand defeats exponential convergence
        let r = integrate_line(|x| c(if x > 0.3 { 1.0 } else { 0.0 }, 0.0), &cfg);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn stops_on_rounding_floor() {
        let cfg = QuadratureConfig::for_shift(0.0, 1e-14).unwrap();
        // exact value 1e8 sqrt(pi) e^-400, i.e. zero in double precision
        let r = integrate_line(|x| c(1e8 * (40.0 * x).cos() * (-x * x).exp(), 0.0), &cfg).unwrap();
        assert!(r.roundoff_limited);
        assert!(r.value.norm() < r.error_estimate, "{r:?}");
        assert!(r.error_estimate < 1e-5);

        let plain = integrate_line(|x| c((-x * x).exp(), 0.0), &QuadratureConfig::default()).unwrap();
        assert!(!plain.roundoff_limited);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(0.0, 5.0, 3).is_err());
        assert!(QuadratureConfig::new(1e-8, -1.0, 3).is_err());
        assert!(QuadratureConfig::new(1e-8, 5.0, 31).is_err());
        assert!(QuadratureConfig::for_shift(1.0, 2.0).is_err());
        let d = QuadratureConfig::default();
        assert!((d.half_width - (1.0 + (1e10f64).ln().sqrt() + 4.0)).abs() < 1e-12);
    }

    #[test]
    fn refinement_does_not_increase_error_on_gaussians() {
        let (nodes, weights) = gauss_legendre(GL_ORDER);
        for &width in &[0.5, 1.0, 2.0] {
            let f = |x: f64| c((-(x * x) / (width * width)).exp(), 0.0);
            let exact = width * PI.sqrt();
            let cfg = QuadratureConfig::new(1e-10, 12.0 * width, 8).unwrap();
            let breaks = cfg.base_breakpoints();
            let mut last = f64::INFINITY;
            for k in 0..5 {
                let err = (composite(&f, &breaks, 1 << k, &nodes, &weights).0 - exact).norm();
                assert!(err <= last.max(1e-14), "width {width} level {k}");
                last = err;
            }
        }
    }

    #[test]
    fn tail_independent_of_half_width() {
        let cshift = 1.0f64;
        let tol = 1e-10f64;
        let f = |x: f64| {
            let w = c(x, -cshift);
            (-(w * w)).exp() * w * w * w * w
        };
        let base = cshift + (1.0 / tol).ln().sqrt() + 3.0;
        let a = integrate_line(f, &QuadratureConfig::new(tol, base, 12).unwrap()).unwrap();
        let b = integrate_line(f, &QuadratureConfig::new(tol, base + 5.0, 12).unwrap()).unwrap();
        assert!((a.value - b.value).norm() < tol);
        // int (x - i)^4 e^{-(x-i)^2} dx = 3 sqrt(pi) / 4
        assert!((a.value - 0.75 * PI.sqrt()).norm() < 1e-10);
    }

    proptest! {
        #[test]
        fn linearity(ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0, shift in 0.2f64..2.0) {
            let cfg = QuadratureConfig::for_shift(shift, 1e-11).unwrap();
            let a = c(ar, ai);
            let b = c(br, 0.0);
            let f = |x: f64| { let w = c(x, -shift); (-(w * w)).exp() * w };
            let g = |x: f64| { let w = c(x, -shift); (-(w * w) * 0.5).exp() };
            let lhs = integrate_line(|x| a * f(x) + b * g(x), &cfg).unwrap().value;
            let rhs = a * integrate_line(f, &cfg).unwrap().value + b * integrate_line(g, &cfg).unwrap().value;
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}
