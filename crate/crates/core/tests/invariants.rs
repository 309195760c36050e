use pto_core::ladder::ladder_residuals;
use pto_core::oscillator::{energy, hamiltonian_residual, pseudo_inner, sigma};
use pto_core::quadrature::integrate_line;
use pto_core::{Eigenstate, EigenstateSpec, PtoParams, QuadratureConfig, QuasiParity, UniformGrid};

const ALPHAS: [f64; 5] = [0.25, 0.5, 0.75, 1.5, 2.5];
const SHIFTS: [f64; 3] = [0.5, 1.0, 2.0];
const N_MAX: usize = 6;

fn states(alpha: f64, c: f64) -> Vec<Eigenstate> {
    let p = PtoParams::new(alpha, c).unwrap();
    let mut out = Vec::new();
    for q in QuasiParity::BOTH {
        for n in 0..=N_MAX {
            out.push(Eigenstate::new(&EigenstateSpec::new(p, q, n)).unwrap());
        }
    }
    out
}

/// Pseudo-Gram matrix over levels `0..=6` of both parities.
///
/// At `c = 2` the integrand of the highest levels peaks near 1e8 while the
/// integral is 1, so even correctly rounded samples leave a few 1e-8 of
/// summation noise. Those entries must be flagged as rounding-limited by the
/// quadrature and stay inside its reported floor; everything else meets 1e-8.
#[test]
fn pseudo_gram_matrix_is_diagonal_sigma() {
    let mut worst_diag: f64 = 0.0;
    let mut worst_off: f64 = 0.0;
    let mut floor_limited = Vec::new();
    for alpha in ALPHAS {
        for c in SHIFTS {
            let p = PtoParams::new(alpha, c).unwrap();
            let cfg = QuadratureConfig::for_shift(c, 1e-10).unwrap();
            let s = states(alpha, c);
            for (i, u) in s.iter().enumerate() {
                for v in &s[i..] {
                    let r = integrate_line(|x| u.value(-x).conj() * v.value(x), &cfg).unwrap();
                    let diagonal = u.quasi_parity() == v.quasi_parity() && u.level() == v.level();
                    let want = if diagonal {
                        sigma(&p, u.quasi_parity(), u.level()) as f64
                    } else {
                        0.0
                    };
                    let err = (r.value - want).norm();
                    if err >= 1e-8 {
                        assert!(
                            r.roundoff_limited && err < r.error_estimate,
                            "alpha {alpha} c {c}: {err:e} {r:?}"
                        );
                        floor_limited.push((c, u.level().max(v.level())));
                    } else if diagonal {
                        worst_diag = worst_diag.max(err);
                    } else {
                        worst_off = worst_off.max(err);
                    }
                }
            }
        }
    }
    assert!(worst_diag < 1e-8, "diagonal {worst_diag:e}");
    assert!(worst_off < 1e-8, "off-diagonal {worst_off:e}");
    assert!(
        floor_limited.iter().all(|&(c, n)| c == 2.0 && n >= 5),
        "{floor_limited:?}"
    );
}

#[test]
fn results_do_not_depend_on_shift() {
    let grid = UniformGrid::default();
    for alpha in ALPHAS {
        let per_shift: Vec<Vec<f64>> = SHIFTS
            .iter()
            .map(|&c| {
                let cfg = QuadratureConfig::for_shift(c, 1e-10).unwrap();
                states(alpha, c)
                    .iter()
                    .map(|u| pseudo_inner(|x| u.value(x), |x| u.value(x), &cfg).unwrap().re)
                    .collect()
            })
            .collect();
        for k in 0..per_shift[0].len() {
            for other in &per_shift[1..] {
                assert!((per_shift[0][k] - other[k]).abs() < 1e-7, "alpha {alpha} state {k}");
            }
        }
        for c in SHIFTS {
            let p = PtoParams::new(alpha, c).unwrap();
            for q in QuasiParity::BOTH {
                for n in 0..=N_MAX {
                    let r = hamiltonian_residual(&EigenstateSpec::new(p, q, n), &grid).unwrap();
                    assert!(r < 1e-7, "alpha {alpha} c {c} q {q} n {n}: {r:e}");
                }
            }
        }
    }
}

#[test]
fn spectrum_is_equidistant_within_each_parity() {
    for alpha in ALPHAS {
        let p = PtoParams::with_default_shift(alpha).unwrap();
        for q in QuasiParity::BOTH {
            for n in 0..20 {
                let a = energy(&EigenstateSpec::new(p, q, n));
                let b = energy(&EigenstateSpec::new(p, q, n + 1));
                assert!((b - a - 4.0).abs() < 1e-12);
            }
        }
        let gap = energy(&EigenstateSpec::new(p, QuasiParity::Minus, 0))
            - energy(&EigenstateSpec::new(p, QuasiParity::Plus, 0));
        assert!((gap - 4.0 * alpha).abs() < 1e-12);
    }
}

#[test]
fn ladder_relations_on_wider_alpha_set() {
    let grid = UniformGrid::default();
    for alpha in [0.5, 0.8, 1.5, 2.5] {
        for q in QuasiParity::BOTH {
            for n in 0..=5 {
                let r = ladder_residuals(q, alpha, 1.0, n, grid).unwrap();
                assert!(r.raising < 1e-7, "alpha {alpha} q {q} n {n}: {r:?}");
                let bound = if n == 0 { 1e-10 } else { 1e-7 };
                assert!(r.lowering < bound, "alpha {alpha} q {q} n {n}: {r:?}");
            }
        }
    }
}
