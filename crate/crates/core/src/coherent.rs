//! Coherent states `|z, α, q) = N(|z|) Σ z^n / sqrt(n!) |u_qn)`, their
//! pseudo-norms and where those pseudo-norms vanish.
//!
//! Everything here reduces to the signed exponential series
//! `S(ζ) = Σ σ_qn ζ^n / n!`, which has the closed form
//!
//! ```text
//! q = -1:  (-1)^(N+1) e^ζ
//! q = +1:  (-1)^N [ e^ζ + Σ_{n<N} ((-1)^(n-N) - 1) ζ^n / n! ]
//! ```

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, UniformGrid};
use crate::oscillator::{sigma, Eigenstate, EigenstateSpec, PtoParams, QuasiParity};

const MIN_TRUNCATION: usize = 20;
const MAX_TRUNCATION: usize = 400;
/// `|S|` below this counts as a vanishing pseudo-norm.
pub const NORM_ZERO_TOL: f64 = 1e-12;
/// Upper end of the zero search in `s = |z|²`.
///
/// For `N <= 30` the correction polynomial is bounded by
/// `2 e^s P(Poisson(s) < N)`, which at `s = 50` is already below `e^s / 2`
/// and keeps shrinking, so no zero can sit beyond this point.
pub const ZERO_SEARCH_MAX: f64 = 50.0;
const ZERO_SCAN_STEP: f64 = 1e-3;
const BISECTION_TOL: f64 = 1e-12;

fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentStateSpec {
    pub z: Complex64,
    pub params: PtoParams,
    pub q: QuasiParity,
    pub n_max: usize,
    pub tail_tol: f64,
}

impl CoherentStateSpec {
    /// Truncates at the smallest `n >= 20` with `|z|^(2(n+1)) / (n+1)! < tail_tol / 2`.
    pub fn new(z: Complex64, params: PtoParams, q: QuasiParity, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tail tolerance must be positive, got {tail_tol}"
            )));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParams("z must be finite".into()));
        }
        let s = z.norm_sqr();
        // term = s^(n+1) / (n+1)!
        let mut term = 1.0;
        let mut n = 0usize;
        loop {
            term *= s / (n + 1) as f64;
            if n >= MIN_TRUNCATION && term < tail_tol / 2.0 {
                break;
            }
            n += 1;
            if n > MAX_TRUNCATION {
                return Err(Error::Domain(format!(
                    "|z| = {} needs more than {MAX_TRUNCATION} terms",
                    z.norm()
                )));
            }
        }
        Ok(Self {
            z,
            params,
            q,
            n_max: n,
            tail_tol,
        })
    }

    /// Fixed truncation order; it still has to meet the tail bound.
    pub fn with_n_max(z: Complex64, params: PtoParams, q: QuasiParity, n_max: usize, tail_tol: f64) -> Result<Self> {
        let s = z.norm_sqr();
        let lead: f64 = (1..=n_max + 1).map(|k| s / k as f64).product();
        if lead >= tail_tol / 2.0 {
            return Err(Error::InvalidParams(format!(
                "n_max = {n_max} leaves a tail of about {lead:e} at |z| = {}",
                z.norm()
            )));
        }
        Ok(Self {
            z,
            params,
            q,
            n_max,
            tail_tol,
        })
    }

    pub fn s(&self) -> f64 {
        self.z.norm_sqr()
    }
}

/// `z^n / sqrt(n!)` for `n = 0..=n_max`, by iterated multiplication.
pub fn cs_coefficients(spec: &CoherentStateSpec) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(spec.n_max + 1);
    let mut cur = Complex64::new(1.0, 0.0);
    out.push(cur);
    for n in 1..=spec.n_max {
        cur = cur * spec.z / (n as f64).sqrt();
        out.push(cur);
    }
    out
}

/// `max_n |sqrt(n+1) c_{n+1} - z c_n|`: how far the truncated expansion is
/// from an eigenvector of the lowering action.
pub fn annihilation_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    coeffs
        .windows(2)
        .enumerate()
        .map(|(n, w)| (w[1] * ((n + 1) as f64).sqrt() - z * w[0]).norm())
        .fold(0.0, f64::max)
}

/// Closed form of `Σ σ_qn ζ^n / n!`.
pub fn signed_exp_series(params: &PtoParams, q: QuasiParity, zeta: Complex64) -> Complex64 {
    let big_n = params.branch_n() as i64;
    match q {
        QuasiParity::Minus => zeta.exp() * parity(big_n + 1),
        QuasiParity::Plus => {
            let mut poly = Complex64::new(0.0, 0.0);
            let mut term = Complex64::new(1.0, 0.0);
            for n in 0..big_n {
                if n > 0 {
                    term = term * zeta / n as f64;
                }
                poly += term * (parity(n - big_n) - 1.0);
            }
            (zeta.exp() + poly) * parity(big_n)
        }
    }
}

/// `Σ_{n <= n_max} σ_qn ζ^n / n!`, summed term by term.
pub fn direct_series(params: &PtoParams, q: QuasiParity, zeta: Complex64, n_max: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 0..=n_max {
        if n > 0 {
            term = term * zeta / n as f64;
        }
        sum += term * sigma(params, q, n) as f64;
    }
    sum
}

/// `S(s)` for real `s = |z|²`.
pub fn signed_norm_series(params: &PtoParams, q: QuasiParity, s: f64) -> f64 {
    signed_exp_series(params, q, Complex64::new(s, 0.0)).re
}

/// `dS/ds`.
fn signed_norm_series_deriv(params: &PtoParams, q: QuasiParity, s: f64) -> f64 {
    let big_n = params.branch_n() as i64;
    match q {
        QuasiParity::Minus => s.exp() * parity(big_n + 1),
        QuasiParity::Plus => {
            let mut poly = 0.0;
            let mut term = 1.0;
            for n in 1..big_n {
                if n > 1 {
                    term *= s / (n - 1) as f64;
                }
                poly += term * (parity(n - big_n) - 1.0);
            }
            (s.exp() + poly) * parity(big_n)
        }
    }
}

/// Unnormalized overlap `Σ (z1* z2)^n σ_qn / n!`, zero across quasi-parities.
pub fn cs_overlap_analytic(
    z1: Complex64,
    q1: QuasiParity,
    z2: Complex64,
    q2: QuasiParity,
    params: &PtoParams,
) -> Complex64 {
    if q1 != q2 {
        return Complex64::new(0.0, 0.0);
    }
    signed_exp_series(params, q1, z1.conj() * z2)
}

/// Unnormalized squared pseudo-norm `S(α, q, |z|²)`.
pub fn cs_pseudo_norm(spec: &CoherentStateSpec) -> f64 {
    signed_norm_series(&spec.params, spec.q, spec.s())
}

/// Normalization of a coherent state: `|N| = |S|^(-1/2)`, after which the
/// squared pseudo-norm equals `sign`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsNormalization {
    pub magnitude: f64,
    pub sign: i32,
}

pub fn cs_normalization(spec: &CoherentStateSpec) -> Result<CsNormalization> {
    let s_val = cs_pseudo_norm(spec);
    if s_val.abs() < NORM_ZERO_TOL {
        return Err(Error::NotNormalizableAt { z_abs: spec.z.norm() });
    }
    Ok(CsNormalization {
        magnitude: s_val.abs().powf(-0.5),
        sign: if s_val > 0.0 { 1 } else { -1 },
    })
}

/// Truncated expansion `Σ_{n<=n_max} z^n / sqrt(n!) u_qn` sampled on `grid`
/// (normalization factor not applied).
pub fn cs_grid_expansion(spec: &CoherentStateSpec, grid: UniformGrid) -> Result<GridFunction> {
    let coeffs = cs_coefficients(spec);
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len];
    for (n, &cn) in coeffs.iter().enumerate() {
        let state = Eigenstate::new(&EigenstateSpec::new(spec.params, spec.q, n))?;
        for (v, x) in values.iter_mut().zip(grid.points()) {
            *v += state.value(x) * cn;
        }
    }
    GridFunction::new(grid, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormZeroReport {
    pub q: QuasiParity,
    pub branch_n: u32,
    pub zero_exists: bool,
    /// `|z|` of the first zero.
    pub z_abs: Option<f64>,
    /// All zeros found, as `|z|`.
    pub zeros: Vec<f64>,
    /// Minimum of `|S|` over the search interval (zero when a zero exists).
    pub min_value: f64,
    pub min_location_s: f64,
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sign_changes<F: Fn(f64) -> f64>(f: &F) -> Vec<f64> {
    let steps = (ZERO_SEARCH_MAX / ZERO_SCAN_STEP).round() as usize;
    let mut roots = Vec::new();
    let mut prev_s = 0.0;
    let mut prev = f(0.0);
    for i in 1..=steps {
        let s = i as f64 * ZERO_SCAN_STEP;
        let cur = f(s);
        if cur == 0.0 {
            roots.push(s);
        } else if prev != 0.0 && (cur > 0.0) != (prev > 0.0) {
            roots.push(bisect(f, prev_s, s));
        }
        prev_s = s;
        prev = cur;
    }
    roots
}

/// Brackets and bisects the zeros of `S(α, q, s)` on `s ∈ (0, 50]`.
pub fn find_norm_zero(params: &PtoParams, q: QuasiParity) -> NormZeroReport {
    let series = |s: f64| signed_norm_series(params, q, s);
    let zeros_s = sign_changes(&series);
    let zeros: Vec<f64> = zeros_s.iter().map(|s| s.sqrt()).collect();
    let (min_value, min_location_s) = if let Some(&first) = zeros_s.first() {
        (0.0, first)
    } else {
        // |S| is smooth and sign-definite: its minimum sits at an endpoint
        // or at a stationary point of S.
        let deriv = |s: f64| signed_norm_series_deriv(params, q, s);
        let mut candidates = sign_changes(&deriv);
        candidates.push(0.0);
        candidates.push(ZERO_SEARCH_MAX);
        candidates
            .into_iter()
            .map(|s| (series(s).abs(), s))
            .fold((f64::INFINITY, 0.0), |best, c| if c.0 < best.0 { c } else { best })
    };
    NormZeroReport {
        q,
        branch_n: params.branch_n(),
        zero_exists: !zeros.is_empty(),
        z_abs: zeros.first().copied(),
        zeros,
        min_value,
        min_location_s,
    }
}

/// Computed normalizability per quasi-parity next to the blanket claim
/// that coherent states are normalizable exactly for `0 < α < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub alpha: f64,
    pub branch_n: u32,
    pub plus: NormZeroReport,
    pub minus: NormZeroReport,
    /// Both families free of pseudo-norm zeros.
    pub computed_normalizable: bool,
    pub claimed_normalizable: bool,
    pub discrepancy: bool,
}

impl Classification {
    pub fn report(&self, q: QuasiParity) -> &NormZeroReport {
        match q {
            QuasiParity::Plus => &self.plus,
            QuasiParity::Minus => &self.minus,
        }
    }
}

pub fn classify_normalizability(alpha: f64) -> Result<Classification> {
    let params = PtoParams::with_default_shift(alpha)?;
    let plus = find_norm_zero(&params, QuasiParity::Plus);
    let minus = find_norm_zero(&params, QuasiParity::Minus);
    let computed_normalizable = !plus.zero_exists && !minus.zero_exists;
    let claimed_normalizable = alpha < 1.0;
    Ok(Classification {
        alpha,
        branch_n: params.branch_n(),
        plus,
        minus,
        computed_normalizable,
        claimed_normalizable,
        discrepancy: computed_normalizable != claimed_normalizable,
    })
}

/// `classify_normalizability` at `points` values of α spread evenly over
/// `(0, alpha_max)`, skipping anything within `margin` of an integer.
pub fn classify_sweep(alpha_max: f64, points: usize, margin: f64) -> Result<Vec<Classification>> {
    if !(alpha_max > 0.0) || points == 0 {
        return Err(Error::InvalidParams(
            "sweep needs alpha_max > 0 and at least one point".into(),
        ));
    }
    let alphas: Vec<f64> = (1..=points)
        .map(|i| alpha_max * i as f64 / (points + 1) as f64)
        .filter(|a| (a - a.round()).abs() > margin && *a > margin)
        .collect();
    alphas.into_par_iter().map(classify_normalizability).collect()
}
