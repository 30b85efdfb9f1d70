//! Turns a merged accumulator into CDF tables, the angular histogram and the
//! exponent fits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sawsle_core::conformal::AngularDensity;
use sawsle_core::fitting::{cdf_points, fit_angular_slope, fit_b_bbar, ExponentFitOptions};
use sawsle_core::{exact_cdf, Accumulator, Exponents, Finalized, FitResult, Statistic};

use crate::output::{fmt_f64, write_all_atomic};

#[derive(Debug, Clone)]
pub struct Analysis {
    pub finalized: Finalized,
    pub exponent_fit: FitResult,
    pub angular_fit: FitResult,
    pub intercept: bool,
    /// `max |ECDF - exact|` over each statistic's grid, indexed like
    /// [`Statistic::ALL`].
    pub max_cdf_deviation: [f64; 4],
    exact: [Vec<f64>; 4],
}

impl Analysis {
    pub fn b(&self) -> f64 {
        self.exponent_fit.coefficients[0]
    }

    pub fn bbar(&self) -> f64 {
        self.exponent_fit.coefficients[1]
    }

    pub fn angular_slope(&self) -> f64 {
        self.angular_fit.coefficients[0]
    }

    pub fn files(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for stat in Statistic::ALL {
            out.push((format!("cdf_{stat}.csv"), self.cdf_csv(stat)));
        }
        out.push(("angular.csv".into(), self.angular_csv()));
        out.push(("fit_exponents.csv".into(), self.exponent_csv()));
        out.push(("fit_angular.csv".into(), self.angular_fit_csv()));
        out.push(("least_sq.plt".into(), self.least_squares_plot()));
        out
    }

    fn cdf_csv(&self, stat: Statistic) -> String {
        let c = self.finalized.cdf(stat);
        let mut s = String::from("w,ecdf,stderr,exact_cdf,diff\n");
        for (i, &w) in c.thresholds.iter().enumerate() {
            let exact = self.exact[stat.index()][i];
            writeln!(
                s,
                "{},{},{},{},{}",
                fmt_f64(w),
                fmt_f64(c.ecdf[i]),
                fmt_f64(c.stderr[i]),
                fmt_f64(exact),
                fmt_f64(c.ecdf[i] - exact)
            )
            .unwrap();
        }
        s
    }

    fn angular_csv(&self) -> String {
        let mut s = String::from("bin_lo,bin_mid,bin_hi,expectation,stderr\n");
        for b in &self.finalized.angular {
            writeln!(
                s,
                "{},{},{},{},{}",
                fmt_f64(b.lo),
                fmt_f64(b.mid),
                fmt_f64(b.hi),
                fmt_f64(b.expectation),
                fmt_f64(b.stderr)
            )
            .unwrap();
        }
        s
    }

    fn exponent_csv(&self) -> String {
        let e = Exponents::conjectured();
        let f = &self.exponent_fit;
        let mut names = vec!["b", "bbar"];
        let mut expected = vec![e.b_f64(), e.bbar_f64()];
        if self.intercept {
            names.push("intercept");
            expected.push(0.0);
        }
        fit_csv(f, &names, &expected)
    }

    fn angular_fit_csv(&self) -> String {
        let e = Exponents::conjectured();
        let bins = &self.finalized.angular;
        let width = bins.first().map_or(0.0, |b| b.hi - b.lo);
        let intercept = (width / AngularDensity::new(&e).normalizer()).ln();
        fit_csv(
            &self.angular_fit,
            &["slope", "intercept"],
            &[e.angular_power(), intercept],
        )
    }

    /// Two columns, `log sin(theta_mid)` and `log expectation`, for every
    /// bin with positive mass.
    fn least_squares_plot(&self) -> String {
        let mut s = String::from("# log_sin_theta log_expectation\n");
        for b in self
            .finalized
            .angular
            .iter()
            .filter(|b| b.expectation > 0.0)
        {
            writeln!(
                s,
                "{} {}",
                fmt_f64(b.mid.sin().ln()),
                fmt_f64(b.expectation.ln())
            )
            .unwrap();
        }
        s
    }
}

fn fit_csv(f: &FitResult, names: &[&str], expected: &[f64]) -> String {
    let mut s = String::from("parameter,estimate,expected,delta,stderr");
    for n in names {
        write!(s, ",cov_{n}").unwrap();
    }
    s.push_str(",points_used,points_excluded,chi_square\n");
    for (i, name) in names.iter().enumerate() {
        let est = f.coefficients[i];
        write!(
            s,
            "{name},{},{},{},{}",
            fmt_f64(est),
            fmt_f64(expected[i]),
            fmt_f64(est - expected[i]),
            fmt_f64(f.stderr(i))
        )
        .unwrap();
        for v in &f.covariance[i] {
            write!(s, ",{}", fmt_f64(*v)).unwrap();
        }
        writeln!(s, ",{},{},{}", f.used, f.excluded, fmt_f64(f.chi_square)).unwrap();
    }
    s
}

/// Computes every output in memory; nothing touches the disk here.
pub fn analyze(acc: &Accumulator, intercept: bool) -> Result<Analysis> {
    let exponents = Exponents::conjectured();
    let finalized = acc.finalize().context("finalizing accumulator")?;
    let mut exact: [Vec<f64>; 4] = Default::default();
    let mut max_cdf_deviation = [0.0; 4];
    for stat in Statistic::ALL {
        let c = finalized.cdf(stat);
        let values = c
            .thresholds
            .iter()
            .map(|&w| exact_cdf(stat, w, &exponents))
            .collect::<sawsle_core::Result<Vec<f64>>>()?;
        max_cdf_deviation[stat.index()] = values
            .iter()
            .zip(&c.ecdf)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        exact[stat.index()] = values;
    }
    let exponent_fit = fit_b_bbar(
        &cdf_points(&finalized),
        finalized.effective_samples,
        ExponentFitOptions { intercept },
    )
    .context("fitting b and bbar")?;
    let angular_fit = fit_angular_slope(&finalized.angular).context("fitting the angular slope")?;
    Ok(Analysis {
        finalized,
        exponent_fit,
        angular_fit,
        intercept,
        max_cdf_deviation,
        exact,
    })
}

/// Writes all analysis files into `dir` at once; returns their paths.
pub fn write_analysis(dir: &Path, analysis: &Analysis) -> Result<Vec<PathBuf>> {
    let files: Vec<(PathBuf, Vec<u8>)> = analysis
        .files()
        .into_iter()
        .map(|(name, text)| (dir.join(name), text.into_bytes()))
        .collect();
    write_all_atomic(&files)?;
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
