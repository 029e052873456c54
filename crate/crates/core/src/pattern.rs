//! Sinusoid fits of embedding components and the cross-component laws
//! `A_p ~ p^k` and `omega_p ~ p`.
//!
//! A component series `y_i`, `i = 1..N`, is modelled as `A sin(omega i + phi)`.
//! For fixed `omega` the model is linear in `(A cos phi, A sin phi)`, so the
//! residual sum of squares `RSS(omega)` has a closed form. The frequency is
//! found by taking the dominant bin of an 8x zero-padded DFT, picking the best
//! grid point near it by `RSS`, then golden-section search between the
//! neighbouring grid points.

use std::f64::consts::PI;
use std::io::{self, Write};

use ndarray::ArrayView1;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::mds::Embedding;

/// Zero-padding factor of the coarse frequency grid.
const PAD: usize = 8;
/// Grid points on each side of the DFT peak that are re-scored by `RSS`.
const NEIGHBOURS: usize = 4;
const GOLDEN_ITERATIONS: usize = 80;

/// Default `r2` at or above which a component is annotated as periodic.
pub const PERIODIC_R2: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    /// 1-based component index (0 for a bare series).
    pub p: usize,
    pub amplitude: f64,
    /// Radians per index step, in `(0, pi)`.
    pub omega: f64,
    /// Radians in `(-pi, pi]`.
    pub phi: f64,
    pub r2: f64,
}

impl SinusoidFit {
    pub fn is_periodic(&self, threshold: f64) -> bool {
        self.r2 >= threshold
    }

    /// Model value at index `i` (1-based).
    pub fn eval(&self, i: f64) -> f64 {
        self.amplitude * (self.omega * i + self.phi).sin()
    }
}

/// Closed-form least squares at a fixed frequency.
struct Projection {
    rss: f64,
    sin_coef: f64,
    cos_coef: f64,
}

fn project(y: &[f64], sum_sq: f64, omega: f64) -> Projection {
    let (mut ss, mut cc, mut sc, mut ys, mut yc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &v) in y.iter().enumerate() {
        let (s, c) = (omega * (k + 1) as f64).sin_cos();
        ss += s * s;
        cc += c * c;
        sc += s * c;
        ys += v * s;
        yc += v * c;
    }
    let det = ss * cc - sc * sc;
    if det <= 1e-12 * ss.max(cc) * ss.max(cc) {
        // sin and cos are numerically collinear on this grid; fall back to
        // the better single-regressor fit.
        let a = if ss > 0.0 { ys / ss } else { 0.0 };
        let b = if cc > 0.0 { yc / cc } else { 0.0 };
        let (rss_s, rss_c) = (sum_sq - a * ys, sum_sq - b * yc);
        return if rss_s <= rss_c {
            Projection {
                rss: rss_s.max(0.0),
                sin_coef: a,
                cos_coef: 0.0,
            }
        } else {
            Projection {
                rss: rss_c.max(0.0),
                sin_coef: 0.0,
                cos_coef: b,
            }
        };
    }
    let a = (cc * ys - sc * yc) / det;
    let b = (ss * yc - sc * ys) / det;
    Projection {
        rss: (sum_sq - a * ys - b * yc).max(0.0),
        sin_coef: a,
        cos_coef: b,
    }
}

fn wrap_phase(phi: f64) -> f64 {
    if phi <= -PI {
        phi + 2.0 * PI
    } else {
        phi
    }
}

fn dominant_bin(y: &[f64], len: usize) -> usize {
    let mut buf: Vec<Complex<f64>> = y.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mut best = 1;
    for k in 1..len.div_ceil(2) {
        if buf[k].norm_sqr() > buf[best].norm_sqr() {
            best = k;
        }
    }
    best
}

/// Fits `A sin(omega i + phi)` to `series` after removing its mean.
pub fn fit_sinusoid(series: &[f64]) -> Result<SinusoidFit> {
    let n = series.len();
    if n < 8 {
        return Err(Error::InsufficientData { needed: 8, got: n });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("series has non-finite values".into()));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let y: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let sum_sq: f64 = y.iter().map(|v| v * v).sum();
    let scale = series.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sum_sq == 0.0 || sum_sq.sqrt() <= 1e-13 * scale * (n as f64).sqrt() {
        return Err(Error::DegenerateSeries);
    }

    let len = PAD * n;
    let step = 2.0 * PI / len as f64;
    let peak = dominant_bin(&y, len);
    let last_bin = len.div_ceil(2) - 1;
    let lo_bin = peak.saturating_sub(NEIGHBOURS).max(1);
    let hi_bin = (peak + NEIGHBOURS).min(last_bin);
    let mut best_bin = peak;
    let mut best_rss = project(&y, sum_sq, peak as f64 * step).rss;
    for k in lo_bin..=hi_bin {
        let rss = project(&y, sum_sq, k as f64 * step).rss;
        if rss < best_rss {
            best_rss = rss;
            best_bin = k;
        }
    }

    // Bracket between neighbouring grid points, kept inside (0, pi).
    let mut lo = (best_bin as f64 - 1.0) * step;
    let mut hi = (best_bin as f64 + 1.0) * step;
    lo = lo.max(0.5 * step);
    hi = hi.min(PI - 0.5 * step);
    let mut omega = best_bin as f64 * step;
    let mut rss = best_rss;
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = project(&y, sum_sq, x1).rss;
    let mut f2 = project(&y, sum_sq, x2).rss;
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = project(&y, sum_sq, x1).rss;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = project(&y, sum_sq, x2).rss;
        }
    }
    let (cand, cand_rss) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if cand_rss < rss {
        omega = cand;
        rss = cand_rss;
    }

    let fit = project(&y, sum_sq, omega);
    let amplitude = fit.sin_coef.hypot(fit.cos_coef);
    let phi = wrap_phase(fit.cos_coef.atan2(fit.sin_coef));
    Ok(SinusoidFit {
        p: 0,
        amplitude,
        omega,
        phi,
        r2: (1.0 - rss / sum_sq).clamp(0.0, 1.0),
    })
}

fn fit_view(series: ArrayView1<f64>) -> Result<SinusoidFit> {
    match series.as_slice() {
        Some(s) => fit_sinusoid(s),
        None => fit_sinusoid(&series.to_vec()),
    }
}

/// One independent fit per embedding column `p = 1..=p_max`.
pub fn fit_components(e: &Embedding, p_max: usize) -> Result<Vec<SinusoidFit>> {
    if p_max > e.dims() {
        return Err(Error::precondition(format!(
            "{p_max} components requested but the embedding has {} dimensions",
            e.dims()
        )));
    }
    (0..p_max)
        .into_par_iter()
        .map(|col| {
            fit_view(e.component(col))
                .map(|f| SinusoidFit { p: col + 1, ..f })
                .map_err(|err| err.at_component(col + 1))
        })
        .collect()
}

/// `p,A,omega,phi,r2`.
pub fn write_fits_csv<W: Write>(fits: &[SinusoidFit], mut w: W) -> io::Result<()> {
    writeln!(w, "p,A,omega,phi,r2")?;
    for f in fits {
        writeln!(w, "{},{},{},{},{}", f.p, f.amplitude, f.omega, f.phi, f.r2)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Coefficient of determination in log-log space.
    pub r2: f64,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl LinearFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

fn ordinary_least_squares(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    // A constant response is fitted exactly by a flat line.
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - rss / syy).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r2,
    })
}

/// Least squares on `(ln p, ln A)`: exponent is the slope, prefactor `exp(intercept)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    if let Some((x, y)) = points
        .iter()
        .find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::Domain(format!(
            "power-law points must be strictly positive, got ({x}, {y})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let line = ordinary_least_squares(&logs)?;
    Ok(PowerLawFit {
        exponent: line.slope,
        prefactor: line.intercept.exp(),
        r2: line.r2,
    })
}

pub fn fit_linear(points: &[(f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    ordinary_least_squares(points)
}

/// Cross-component laws; `None` when fewer components than the law needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawSummary {
    pub amplitude_law: Option<PowerLawFit>,
    pub frequency_law: Option<LinearFit>,
}

/// Fits `A_p ~ p^k` (needs 3 components) and `omega_p ~ p` (needs 3, to
/// report a meaningful `r2`).
pub fn summarize(fits: &[SinusoidFit]) -> Result<LawSummary> {
    if fits.len() < 3 {
        return Ok(LawSummary {
            amplitude_law: None,
            frequency_law: None,
        });
    }
    let amps: Vec<(f64, f64)> = fits.iter().map(|f| (f.p as f64, f.amplitude)).collect();
    let freqs: Vec<(f64, f64)> = fits.iter().map(|f| (f.p as f64, f.omega)).collect();
    Ok(LawSummary {
        amplitude_law: Some(fit_power_law(&amps)?),
        frequency_law: Some(fit_linear(&freqs)?),
    })
}

impl LawSummary {
    /// `law,param1,param2,r2`; missing laws are written as `NA`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "law,param1,param2,r2")?;
        match self.amplitude_law {
            Some(f) => writeln!(w, "power_law,{},{},{}", f.exponent, f.prefactor, f.r2)?,
            None => writeln!(w, "power_law,NA,NA,NA")?,
        }
        match self.frequency_law {
            Some(f) => writeln!(w, "linear,{},{},{}", f.slope, f.intercept, f.r2)?,
            None => writeln!(w, "linear,NA,NA,NA")?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn series(n: usize, mut f: impl FnMut(f64) -> f64) -> Vec<f64> {
        (1..=n).map(|i| f(i as f64)).collect()
    }

    fn phase_distance(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    }

    #[test]
    fn exact_sinusoid() {
        let fit = fit_sinusoid(&series(500, |i| (0.1 * i).sin())).unwrap();
        assert!((fit.amplitude - 1.0).abs() < 1e-3, "{fit:?}");
        assert!((fit.omega - 0.1).abs() < 1e-4, "{fit:?}");
        assert!(fit.phi.abs() < 1e-3, "{fit:?}");
        assert!(fit.r2 > 0.999_999);
    }

    #[test]
    fn noisy_sinusoid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let y = series(1000, |i| 2.0 * (0.3 * i + 1.0).sin() + noise.sample(&mut rng));
        let fit = fit_sinusoid(&y).unwrap();
        assert!((fit.amplitude - 2.0).abs() < 0.02, "{fit:?}");
        assert!((fit.omega - 0.3).abs() < 1e-3, "{fit:?}");
        assert!(phase_distance(fit.phi, 1.0) < 0.05, "{fit:?}");
        assert!(fit.r2 >= 0.99);
    }

    #[test]
    fn half_period_cosine() {
        // The slowest classical-MDS mode: half a cycle over the series.
        let n = 1000;
        let w = PI / n as f64;
        let y = series(n, |i| 0.7 * (w * (i - 0.5)).cos());
        let fit = fit_sinusoid(&y).unwrap();
        assert!(fit.r2 > 0.9999, "{fit:?}");
        assert!((fit.omega - w).abs() < 1e-3 * w, "{fit:?}");
        assert!((fit.amplitude - 0.7).abs() < 1e-3, "{fit:?}");
    }

    #[test]
    fn high_frequency_near_nyquist() {
        let fit = fit_sinusoid(&series(300, |i| (3.0 * i + 0.2).sin())).unwrap();
        assert!((fit.omega - 3.0).abs() < 1e-6, "{fit:?}");
        assert!(fit.omega < PI);
    }

    #[test]
    fn offset_is_removed() {
        let fit = fit_sinusoid(&series(400, |i| 5.0 + (0.2 * i).sin())).unwrap();
        assert!((fit.omega - 0.2).abs() < 1e-4);
        assert!(fit.r2 > 0.999);
    }

    #[test]
    fn degenerate_and_short_series() {
        assert_eq!(fit_sinusoid(&[0.0; 32]), Err(Error::DegenerateSeries));
        assert_eq!(fit_sinusoid(&[3.5; 32]), Err(Error::DegenerateSeries));
        assert_eq!(
            fit_sinusoid(&[1.0, 2.0, 3.0]),
            Err(Error::InsufficientData { needed: 8, got: 3 })
        );
    }

    #[test]
    fn refinement_never_worse_than_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let y = series(257, |i| (0.0537 * i).sin() + 0.4 * (0.21 * i).cos() + noise.sample(&mut rng));
        let fit = fit_sinusoid(&y).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let yc: Vec<f64> = y.iter().map(|v| v - mean).collect();
        let sum_sq: f64 = yc.iter().map(|v| v * v).sum();
        let len = PAD * y.len();
        let step = 2.0 * PI / len as f64;
        let peak = dominant_bin(&yc, len);
        let grid_rss = project(&yc, sum_sq, peak as f64 * step).rss;
        let fit_rss = (1.0 - fit.r2) * sum_sq;
        assert!(fit_rss <= grid_rss * (1.0 + 1e-12));
    }

    #[test]
    fn components_are_labelled_and_checked() {
        let n = 200;
        let coords = Array2::from_shape_fn((n, 3), |(i, p)| {
            ((p + 1) as f64 * 0.3 * (i + 1) as f64).sin() / ((p + 1) as f64).sqrt()
        });
        let e = Embedding::from_coordinates(coords);
        let fits = fit_components(&e, 3).unwrap();
        assert_eq!(fits.iter().map(|f| f.p).collect::<Vec<_>>(), vec![1, 2, 3]);
        for f in &fits {
            assert!((f.omega - 0.3 * f.p as f64).abs() < 1e-3, "{f:?}");
            assert!(f.r2 > 0.99, "{f:?}");
        }
        assert!(fit_components(&e, 0).unwrap().is_empty());
        assert!(matches!(fit_components(&e, 4), Err(Error::Precondition(_))));

        let mut flat = Array2::from_shape_fn((n, 2), |(i, _)| (0.1 * i as f64).sin());
        flat.column_mut(1).fill(1.0);
        match fit_components(&Embedding::from_coordinates(flat), 2) {
            Err(Error::Component { p: 2, source }) => assert_eq!(*source, Error::DegenerateSeries),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn power_law_examples() {
        let f = fit_power_law(&[(1.0, 1.0), (4.0, 0.5), (9.0, 1.0 / 3.0)]).unwrap();
        assert!((f.exponent + 0.5).abs() < 1e-12);
        assert!((f.prefactor - 1.0).abs() < 1e-12);
        let c = fit_power_law(&[(1.0, 2.5), (2.0, 2.5), (3.0, 2.5)]).unwrap();
        assert!(c.exponent.abs() < 1e-12);
        assert!((c.prefactor - 2.5).abs() < 1e-12);
        assert!(matches!(
            fit_power_law(&[(1.0, 1.0), (0.0, 1.0), (2.0, 1.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_power_law(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_power_law(&[(1.0, 1.0), (2.0, 1.0)]),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn linear_examples() {
        let f = fit_linear(&[(1.0, 0.1), (2.0, 0.2), (3.0, 0.3)]).unwrap();
        assert!((f.slope - 0.1).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        let two = fit_linear(&[(1.0, 4.0), (3.0, -2.0)]).unwrap();
        assert!((two.slope + 3.0).abs() < 1e-12 && (two.intercept - 7.0).abs() < 1e-12);
        assert_eq!(two.r2, 1.0);
        assert!(matches!(
            fit_linear(&[(1.0, 1.0)]),
            Err(Error::InsufficientData { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn summary_needs_three_components() {
        let fit = SinusoidFit {
            p: 1,
            amplitude: 1.0,
            omega: 0.1,
            phi: 0.0,
            r2: 1.0,
        };
        let s = summarize(&[fit]).unwrap();
        assert!(s.amplitude_law.is_none() && s.frequency_law.is_none());
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "law,param1,param2,r2\npower_law,NA,NA,NA\nlinear,NA,NA,NA\n"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exact_power_law_recovered(k in -3.0f64..3.0, c in 0.01f64..100.0, n in 3usize..30) {
            let pts: Vec<(f64, f64)> = (1..=n).map(|p| (p as f64, c * (p as f64).powf(k))).collect();
            let f = fit_power_law(&pts).unwrap();
            prop_assert!((f.exponent - k).abs() <= 1e-12);
        }

        #[test]
        fn negation_shifts_phase_only(
            amp in 0.1f64..5.0,
            omega in 0.01f64..3.0,
            phi in -3.0f64..3.0,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, 0.1).unwrap();
            let y = series(120, |i| amp * (omega * i + phi).sin() + noise.sample(&mut rng));
            let neg: Vec<f64> = y.iter().map(|v| -v).collect();
            let a = fit_sinusoid(&y).unwrap();
            let b = fit_sinusoid(&neg).unwrap();
            prop_assert_eq!(a.amplitude, b.amplitude);
            prop_assert_eq!(a.omega, b.omega);
            prop_assert!(phase_distance(a.phi + PI, b.phi) < 1e-12);
            prop_assert!(b.phi > -PI && b.phi <= PI);
        }

        #[test]
        fn fits_are_deterministic(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, 1.0).unwrap();
            let y: Vec<f64> = (0..64).map(|_| noise.sample(&mut rng)).collect();
            prop_assert_eq!(fit_sinusoid(&y).unwrap(), fit_sinusoid(&y).unwrap());
        }
    }
}
