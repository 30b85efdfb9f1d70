//! Weighted linear least squares for the exponent estimates.
//!
//! Two fits are provided. Taking logs of the restriction formula gives
//! `log P(W <= w) = b log|phi_w'(0)| + bbar log|phi_w'(i)|`, linear in
//! `(b, bbar)` with no intercept. The endpoint-angle histogram should follow
//! `sin(theta)^(b - bbar)` up to an unknown constant, so its log-log slope is
//! fitted with an intercept.

use nalgebra::{DMatrix, DVector};

use crate::conformal::{factors, Statistic};
use crate::error::{Error, Result};
use crate::estimators::{AngularBin, Finalized};

pub const MIN_CDF_ROWS: usize = 100;
pub const MIN_ANGULAR_BINS: usize = 50;
pub const MIN_ECDF: f64 = 1e-6;
pub const MIN_EFFECTIVE_COUNT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub predictors: Vec<f64>,
    pub response: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    /// Row-major `(X^T W X)^-1`.
    pub covariance: Vec<Vec<f64>>,
    /// `sum ((response - prediction) / sigma)^2`.
    pub chi_square: f64,
    pub used: usize,
    pub excluded: usize,
}

impl FitResult {
    pub fn stderr(&self, i: usize) -> f64 {
        self.covariance[i][i].sqrt()
    }
}

/// Minimizes `sum ((response - predictors . beta) / sigma)^2` by QR on the
/// whitened design.
pub fn wls(rows: &[FitRow]) -> Result<FitResult> {
    let p = rows.first().map_or(0, |r| r.predictors.len());
    if p == 0 || rows.len() < p {
        return Err(Error::TooFewPoints {
            usable: rows.len(),
            required: p.max(1),
        });
    }
    if let Some(bad) = rows
        .iter()
        .find(|r| !(r.sigma > 0.0) || r.predictors.len() != p)
    {
        return Err(Error::Config(format!("malformed fit row {bad:?}")));
    }
    let design = DMatrix::from_fn(rows.len(), p, |i, j| rows[i].predictors[j] / rows[i].sigma);
    let target = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.response / r.sigma));
    let qr = design.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if r.diagonal().iter().any(|v| !(v.abs() > 1e-12 * scale)) {
        return Err(Error::Singular);
    }
    let qty = qr.q().transpose() * &target;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::Singular)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(Error::Singular)?;
    let cov = &r_inv * r_inv.transpose();
    let residual = &target - &design * &beta;
    Ok(FitResult {
        coefficients: beta.iter().copied().collect(),
        covariance: (0..p)
            .map(|i| (0..p).map(|j| cov[(i, j)]).collect())
            .collect(),
        chi_square: residual.norm_squared(),
        used: rows.len(),
        excluded: 0,
    })
}

/// One threshold of one weighted ECDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfPoint {
    pub stat: Statistic,
    pub w: f64,
    pub ecdf: f64,
    pub stderr: f64,
}

pub fn cdf_points(f: &Finalized) -> Vec<CdfPoint> {
    f.cdfs
        .iter()
        .flat_map(|c| {
            c.thresholds
                .iter()
                .zip(&c.ecdf)
                .zip(&c.stderr)
                .map(|((&w, &ecdf), &stderr)| CdfPoint {
                    stat: c.stat,
                    w,
                    ecdf,
                    stderr,
                })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExponentFitOptions {
    /// Adds a constant column; off by default since the normalization is fixed.
    pub intercept: bool,
}

/// Fits `(b, bbar)` (and an intercept if requested) to the log ECDFs.
///
/// Points are dropped when the ECDF is at most 1e-6, the error is zero or
/// undefined, fewer than ten effective samples lie below the threshold, or
/// the threshold is on the edge of the statistic's domain.
pub fn fit_b_bbar(
    points: &[CdfPoint],
    effective_samples: f64,
    options: ExponentFitOptions,
) -> Result<FitResult> {
    let mut rows = Vec::with_capacity(points.len());
    for pt in points {
        if !(pt.ecdf > MIN_ECDF)
            || !(pt.stderr > 0.0)
            || !pt.stderr.is_finite()
            || pt.ecdf * effective_samples < MIN_EFFECTIVE_COUNT
        {
            continue;
        }
        let Ok(f) = factors(pt.stat, pt.w) else {
            continue;
        };
        let (l0, li) = (f.d0.ln(), f.di.ln());
        if !l0.is_finite() || !li.is_finite() {
            continue;
        }
        let mut predictors = vec![l0, li];
        if options.intercept {
            predictors.push(1.0);
        }
        rows.push(FitRow {
            predictors,
            response: pt.ecdf.ln(),
            sigma: pt.stderr / pt.ecdf,
        });
    }
    if rows.len() < MIN_CDF_ROWS {
        return Err(Error::TooFewPoints {
            usable: rows.len(),
            required: MIN_CDF_ROWS,
        });
    }
    let mut fit = wls(&rows)?;
    fit.excluded = points.len() - fit.used;
    Ok(fit)
}

/// Slope (first coefficient) and intercept of `log expectation` against
/// `log sin(bin midpoint)`.
pub fn fit_angular_slope(bins: &[AngularBin]) -> Result<FitResult> {
    let rows: Vec<FitRow> = bins
        .iter()
        .filter(|b| {
            b.expectation > 0.0
                && b.stderr > 0.0
                && b.stderr.is_finite()
                && b.effective_samples >= MIN_EFFECTIVE_COUNT
        })
        .map(|b| FitRow {
            predictors: vec![b.mid.sin().ln(), 1.0],
            response: b.expectation.ln(),
            sigma: b.stderr / b.expectation,
        })
        .collect();
    if rows.len() < MIN_ANGULAR_BINS {
        return Err(Error::TooFewPoints {
            usable: rows.len(),
            required: MIN_ANGULAR_BINS,
        });
    }
    let mut fit = wls(&rows)?;
    fit.excluded = bins.len() - fit.used;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::exact_cdf;
    use crate::estimators::{GridSpec, ANGULAR_BINS};
    use crate::exponents::Exponents;
    use std::f64::consts::PI;

    fn row(x: &[f64], y: f64) -> FitRow {
        FitRow {
            predictors: x.to_vec(),
            response: y,
            sigma: 1.0,
        }
    }

    #[test]
    fn exact_line() {
        let rows: Vec<FitRow> = (0..3)
            .map(|i| row(&[1.0, i as f64], 2.0 * i as f64 + 1.0))
            .collect();
        let fit = wls(&rows).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-14);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-14);
        assert!(fit.chi_square < 1e-26);
        assert_eq!(fit.used, 3);
    }

    #[test]
    fn duplicate_columns_are_singular() {
        let rows: Vec<FitRow> = (0..5)
            .map(|i| row(&[i as f64, i as f64], i as f64))
            .collect();
        assert!(matches!(wls(&rows), Err(Error::Singular)));
    }

    #[test]
    fn too_few_rows() {
        assert!(wls(&[row(&[1.0, 2.0], 3.0)]).is_err());
        assert!(wls(&[]).is_err());
    }

    #[test]
    fn covariance_of_a_mean() {
        // Fitting a constant to n points with sigma s has variance s^2 / n.
        let rows: Vec<FitRow> = (0..16)
            .map(|i| FitRow {
                predictors: vec![1.0],
                response: i as f64,
                sigma: 2.0,
            })
            .collect();
        let fit = wls(&rows).unwrap();
        assert!((fit.coefficients[0] - 7.5).abs() < 1e-13);
        assert!((fit.covariance[0][0] - 0.25).abs() < 1e-14);
    }

    fn exact_points(e: &Exponents) -> Vec<CdfPoint> {
        let mut pts = Vec::new();
        for stat in Statistic::ALL {
            for w in GridSpec::standard(stat).thresholds() {
                let ecdf = exact_cdf(stat, w, e).unwrap();
                pts.push(CdfPoint {
                    stat,
                    w,
                    ecdf,
                    stderr: 1e-3 * ecdf,
                });
            }
        }
        pts
    }

    #[test]
    fn synthetic_truth_design_roundtrip() {
        let e = Exponents::conjectured();
        let rows: Vec<FitRow> = exact_points(&e)
            .iter()
            .filter_map(|p| {
                let f = factors(p.stat, p.w).ok()?;
                let (u, v) = (f.d0.ln(), f.di.ln());
                (u.is_finite() && v.is_finite()).then(|| row(&[u, v], 0.625 * u + (5.0 / 48.0) * v))
            })
            .collect();
        let fit = wls(&rows).unwrap();
        assert!((fit.coefficients[0] - 0.625).abs() < 1e-10);
        assert!((fit.coefficients[1] - 5.0 / 48.0).abs() < 1e-10);
    }

    #[test]
    fn exact_cdfs_recover_the_exponents() {
        let e = Exponents::conjectured();
        let pts = exact_points(&e);
        let fit = fit_b_bbar(&pts, 1e12, ExponentFitOptions::default()).unwrap();
        assert!((fit.coefficients[0] - 0.625).abs() < 1e-9);
        assert!((fit.coefficients[1] - 5.0 / 48.0).abs() < 1e-9);
        // X at 0 and Y, R at 1 sit on domain edges.
        assert_eq!(fit.excluded, 3);
        let with_c = fit_b_bbar(&pts, 1e12, ExponentFitOptions { intercept: true }).unwrap();
        assert!((with_c.coefficients[0] - 0.625).abs() < 1e-8);
        assert!(with_c.coefficients[2].abs() < 1e-9);
    }

    #[test]
    fn exponent_fit_scale_behaviour_with_intercept() {
        let e = Exponents::conjectured();
        let scaled: Vec<CdfPoint> = exact_points(&e)
            .into_iter()
            .map(|p| CdfPoint {
                ecdf: 0.5 * p.ecdf,
                stderr: 0.5 * p.stderr,
                ..p
            })
            .collect();
        let fit = fit_b_bbar(&scaled, 1e12, ExponentFitOptions { intercept: true }).unwrap();
        assert!((fit.coefficients[0] - 0.625).abs() < 1e-8);
        assert!((fit.coefficients[1] - 5.0 / 48.0).abs() < 1e-8);
        assert!((fit.coefficients[2] - 0.5f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn exclusions() {
        let e = Exponents::conjectured();
        let mut pts = exact_points(&e);
        for p in pts.iter_mut().take(50) {
            p.stderr = 0.0;
        }
        let fit = fit_b_bbar(&pts, 1e12, ExponentFitOptions::default()).unwrap();
        assert_eq!(fit.used + fit.excluded, pts.len());
        assert!(fit.excluded >= 50);
        // Too few effective samples leaves nothing to fit.
        assert!(matches!(
            fit_b_bbar(&pts, 5.0, ExponentFitOptions::default()),
            Err(Error::TooFewPoints { .. })
        ));
    }

    fn synthetic_bins(scale: f64) -> Vec<AngularBin> {
        let width = PI / ANGULAR_BINS as f64;
        (0..ANGULAR_BINS)
            .map(|k| {
                let lo = k as f64 * width;
                let mid = lo + 0.5 * width;
                let expectation = scale * mid.sin().powf(25.0 / 48.0);
                AngularBin {
                    lo,
                    mid,
                    hi: lo + width,
                    expectation,
                    stderr: 0.01 * expectation,
                    effective_samples: 1e6,
                }
            })
            .collect()
    }

    #[test]
    fn angular_slope_roundtrip_and_scale_invariance() {
        let fit = fit_angular_slope(&synthetic_bins(1e-3)).unwrap();
        assert!((fit.coefficients[0] - 25.0 / 48.0).abs() < 1e-10);
        let scaled = fit_angular_slope(&synthetic_bins(7e-2)).unwrap();
        assert!((scaled.coefficients[0] - fit.coefficients[0]).abs() < 1e-10);
        assert!((scaled.coefficients[1] - fit.coefficients[1] - 70f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn angular_fit_needs_enough_bins() {
        let mut bins = synthetic_bins(1.0);
        for b in bins.iter_mut().skip(40) {
            b.effective_samples = 3.0;
        }
        assert!(matches!(
            fit_angular_slope(&bins),
            Err(Error::TooFewPoints { usable: 40, .. })
        ));
    }
}
