//! Desk-scale evaluation of `zeta(1/2 + i t)`.
//!
//! Uses the alternating Dirichlet eta series `eta(s) = sum (-1)^(k-1) k^(-s)`
//! with Borwein's Chebyshev-weighted acceleration and the continuation
//! `zeta(s) = eta(s) / (1 - 2^(1-s))`, valid for `Re(s) > 0`. With `n` terms
//! the truncation error is bounded by
//!
//! ```text
//! 3 (1 + 2|t|) e^(pi |t| / 2) / ((3 + sqrt 8)^n |1 - 2^(1-s)|)
//! ```
//!
//! so roughly `0.9 |t|` terms suffice; the default rule takes `2|t|`.
//! Accuracy is only promised for `|t| <= 1e4`, where double-precision phase
//! evaluation `t ln k` still leaves about ten correct digits.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `|t|` for which the default term rule is guaranteed.
pub const GUARANTEED_T: f64 = 1.0e4;

/// Smallest accepted term count.
pub const MIN_TERMS: usize = 16;

/// Term count used when the caller does not choose one: `max(64, ceil(2|t|))`.
pub fn default_terms(t: f64) -> usize {
    let scaled = (2.0 * t.abs()).ceil();
    if scaled > 64.0 {
        scaled as usize
    } else {
        64
    }
}

/// Evaluation controls for [`zeta_critical_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZetaOptions {
    /// Number of series terms; `None` applies [`default_terms`].
    pub terms: Option<usize>,
    /// Evaluate beyond [`GUARANTEED_T`] without the accuracy guarantee.
    pub allow_out_of_range: bool,
}

/// `zeta(1/2 + i t)` with the default term rule.
pub fn zeta_critical(t: f64) -> Result<Complex64> {
    zeta_critical_with(t, ZetaOptions::default())
}

pub fn zeta_critical_with(t: f64, opts: ZetaOptions) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::precondition(format!("t must be finite, got {t}")));
    }
    if t.abs() > GUARANTEED_T && !opts.allow_out_of_range {
        return Err(Error::Range {
            t: t.abs(),
            limit: GUARANTEED_T,
        });
    }
    let terms = opts.terms.unwrap_or_else(|| default_terms(t));
    if terms < MIN_TERMS {
        return Err(Error::precondition(format!(
            "terms must be at least {MIN_TERMS}, got {terms}"
        )));
    }
    let weights = borwein_weights(terms);
    let mut sum = Complex64::new(0.0, 0.0);
    // Summed from the tail so the small, heavily damped terms accumulate first.
    for k in (0..terms).rev() {
        let w = weights[k];
        if w == 0.0 {
            continue;
        }
        let n = (k + 1) as f64;
        let ln_n = n.ln();
        let (sin, cos) = (t * ln_n).sin_cos();
        let mag = w / n.sqrt();
        let term = Complex64::new(mag * cos, -mag * sin);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum / one_minus_two_pow(t))
}

/// `1 - 2^(1-s)` at `s = 1/2 + i t`.
fn one_minus_two_pow(t: f64) -> Complex64 {
    let (sin, cos) = (t * LN_2).sin_cos();
    let r = std::f64::consts::SQRT_2;
    Complex64::new(1.0 - r * cos, r * sin)
}

/// Acceleration weights `w_k = (d_n - d_k) / d_n` for `k = 0..n`, where
/// `d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)`.
///
/// The coefficients overflow `f64` long before `n = 2e4`, so they are built
/// in log space, rescaled by their maximum, and turned into normalized tail
/// sums.
pub(crate) fn borwein_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut log_c = Vec::with_capacity(n + 1);
    // c_0 = (n-1)!/n! = 1/n; the common factor n cancels in the ratio.
    let mut current = -nf.ln();
    log_c.push(current);
    for i in 0..n {
        let fi = i as f64;
        current += (4.0 * (nf + fi) * (nf - fi)).ln() - ((2.0 * fi + 1.0) * (2.0 * fi + 2.0)).ln();
        log_c.push(current);
    }
    let peak = log_c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c: Vec<f64> = log_c.iter().map(|l| (l - peak).exp()).collect();
    let mut tails = vec![0.0; n + 1];
    let mut acc = 0.0;
    for i in (0..=n).rev() {
        tails[i] = acc;
        acc += c[i];
    }
    // acc now holds sum_{i=0..n} c_i; w_k = sum_{i>k} c_i / total.
    tails.truncate(n);
    tails.iter().map(|t| t / acc).collect()
}

/// Truncation error bound for `n` terms at ordinate `t`.
///
/// Strictly decreasing in `n`; infinite only when the bound overflows.
pub fn error_bound(t: f64, terms: usize) -> f64 {
    let t = t.abs();
    let denom = one_minus_two_pow(t).norm();
    let log_bound = 3.0f64.ln() + (1.0 + 2.0 * t).ln() + PI * t / 2.0
        - terms as f64 * (3.0 + 8.0f64.sqrt()).ln()
        - denom.ln();
    log_bound.exp()
}

/// `true` iff `|zeta(1/2 + i t)| < tol`.
pub fn verify_zero(t: f64, tol: f64) -> Result<bool> {
    verify_zero_with(t, tol, ZetaOptions::default())
}

pub fn verify_zero_with(t: f64, tol: f64, opts: ZetaOptions) -> Result<bool> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::precondition(format!("tol must be positive, got {tol}")));
    }
    Ok(zeta_critical_with(t, opts)?.norm() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Reference value of zeta(1/2), to 16 digits.
    const ZETA_HALF: f64 = -1.460_354_508_809_586_8;

    /// Euler-Maclaurin evaluation of zeta(s), independent of the eta route.
    fn euler_maclaurin(s: Complex64, cutoff: usize) -> Complex64 {
        // B_2k / (2k)! for k = 1..10.
        const B: [f64; 10] = [
            1.0 / 6.0 / 2.0,
            -1.0 / 30.0 / 24.0,
            1.0 / 42.0 / 720.0,
            -1.0 / 30.0 / 40320.0,
            5.0 / 66.0 / 3628800.0,
            -691.0 / 2730.0 / 479001600.0,
            7.0 / 6.0 / 87178291200.0,
            -3617.0 / 510.0 / 20922789888000.0,
            43867.0 / 798.0 / 6402373705728000.0,
            -174611.0 / 330.0 / 2432902008176640000.0,
        ];
        let nn = cutoff as f64;
        let pow = |x: f64, e: Complex64| (e * x.ln()).exp();
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..cutoff {
            sum += pow(k as f64, -s);
        }
        sum += pow(nn, Complex64::new(1.0, 0.0) - s) / (s - 1.0);
        sum += pow(nn, -s) * 0.5;
        let mut rising = s;
        let mut npow = pow(nn, -s - 1.0);
        for (k, b) in B.iter().enumerate() {
            sum += rising * npow * *b;
            let a = 2.0 * k as f64 + 1.0;
            rising = rising * (s + a) * (s + a + 1.0);
            npow /= nn * nn;
        }
        sum
    }

    fn reference(t: f64) -> Complex64 {
        euler_maclaurin(Complex64::new(0.5, t), 200)
    }

    #[test]
    fn oracle_matches_known_zeta_half() {
        assert!((reference(0.0).re - ZETA_HALF).abs() < 1e-12);
    }

    #[test]
    fn zeta_at_half() {
        let z = zeta_critical(0.0).unwrap();
        assert!((z.re - ZETA_HALF).abs() < 1e-9, "{z}");
        assert!(z.im.abs() < 1e-12);
        // Direct high-term evaluation agrees.
        let hi = zeta_critical_with(
            0.0,
            ZetaOptions {
                terms: Some(400),
                ..Default::default()
            },
        )
        .unwrap();
        assert!((hi - z).norm() < 1e-12);
    }

    #[test]
    fn first_zero_vanishes() {
        let t = 14.134725142;
        let z = zeta_critical(t).unwrap();
        assert!(z.norm() < 1e-6, "{z}");
        let doubled = zeta_critical_with(
            t,
            ZetaOptions {
                terms: Some(2 * default_terms(t)),
                ..Default::default()
            },
        )
        .unwrap();
        assert!((doubled - z).norm() < 1e-10);
    }

    #[test]
    fn non_zero_at_ten() {
        let z = zeta_critical(10.0).unwrap();
        assert!(z.norm() > 0.1);
        assert!((z - reference(10.0)).norm() < 1e-10, "{z}");
    }

    #[test]
    fn agrees_with_euler_maclaurin_on_a_grid() {
        for k in 0..=60 {
            let t = 1.7 * k as f64;
            let got = zeta_critical(t).unwrap();
            let want = reference(t);
            assert!((got - want).norm() < 1e-9, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn default_rule_matches_doubled_terms_at_large_t() {
        for &t in &[500.25, 2_345.5, 7_005.07, 9_876.479] {
            let base = zeta_critical(t).unwrap();
            let doubled = zeta_critical_with(
                t,
                ZetaOptions {
                    terms: Some(2 * default_terms(t)),
                    ..Default::default()
                },
            )
            .unwrap();
            assert!((base - doubled).norm() < 1e-8, "t={t}: {base} vs {doubled}");
        }
    }

    #[test]
    fn range_guard() {
        assert!(matches!(zeta_critical(1.0e4 + 1.0), Err(Error::Range { .. })));
        let opts = ZetaOptions {
            allow_out_of_range: true,
            ..Default::default()
        };
        assert!(zeta_critical_with(1.0e4 + 1.0, opts).is_ok());
    }

    #[test]
    fn too_few_terms_rejected() {
        let opts = ZetaOptions {
            terms: Some(15),
            ..Default::default()
        };
        assert!(matches!(zeta_critical_with(1.0, opts), Err(Error::Precondition(_))));
    }

    #[test]
    fn verify_examples() {
        assert!(verify_zero(14.134725142, 1e-5).unwrap());
        assert!(!verify_zero(15.0, 1e-5).unwrap());
        assert!(matches!(verify_zero(14.134725142, 0.0), Err(Error::Precondition(_))));
        assert!(matches!(verify_zero(14.134725142, f64::NAN), Err(Error::Precondition(_))));
    }

    #[test]
    fn default_terms_rule() {
        assert_eq!(default_terms(0.0), 64);
        assert_eq!(default_terms(32.0), 64);
        assert_eq!(default_terms(32.1), 65);
        assert_eq!(default_terms(-9876.4), 19753);
    }

    #[test]
    fn weights_decrease_from_one_to_zero() {
        let w = borwein_weights(64);
        assert_eq!(w.len(), 64);
        assert!((w[0] - 1.0).abs() < 1e-15);
        assert!(w.windows(2).all(|p| p[0] >= p[1]));
        // The last weight decays like (4 / (3 + sqrt 8))^n.
        assert!(w[63] > 0.0 && w[63] < 1e-9);
    }

    proptest! {
        #[test]
        fn conjugate_symmetry(t in -2_000.0f64..2_000.0) {
            let a = zeta_critical(t).unwrap();
            let b = zeta_critical(-t).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-10);
        }

        #[test]
        fn error_bound_monotone_in_terms(t in 0.0f64..1e4, n in 16usize..40_000) {
            prop_assert!(error_bound(t, n + 1) <= error_bound(t, n));
        }
    }

    #[test]
    fn fixture_ordinates_are_zeros() {
        let text = include_str!("../tests/data/zeros_first_100.txt");
        let zeros = crate::zeros::parse_zeros(text.as_bytes(), "fixture").unwrap();
        assert_eq!(zeros.len(), 100);
        for &t in zeros.values() {
            assert!(verify_zero(t, 1e-5).unwrap(), "t={t}");
        }
    }
}
