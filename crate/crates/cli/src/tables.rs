//! Exact CDF tables and short-walk enumeration.

use std::fmt::Write as _;

use anyhow::Result;
use sawsle_core::conformal::factors_closed;
use sawsle_core::{enumerate_half_plane_saws, exact_cdf, Exponents, GridSpec, Statistic};

use crate::output::fmt_f64;

/// `stat,w,d0,di,cdf` over the standard grid of every statistic.
pub fn exact_table(exponents: &Exponents) -> Result<String> {
    let mut s = String::from("stat,w,d0,di,cdf\n");
    for stat in Statistic::ALL {
        for w in GridSpec::standard(stat).thresholds() {
            let f = factors_closed(stat, w)?;
            let cdf = exact_cdf(stat, w, exponents)?;
            writeln!(
                s,
                "{stat},{},{},{},{}",
                fmt_f64(w),
                fmt_f64(f.d0),
                fmt_f64(f.di),
                fmt_f64(cdf)
            )
            .unwrap();
        }
    }
    Ok(s)
}

/// `count=<k>` followed by every walk in the text walk format.
pub fn enumeration_text(n: usize) -> Result<String> {
    let walks = enumerate_half_plane_saws(n)?;
    let mut s = format!("count={}\n", walks.len());
    for w in &walks {
        s.push_str(&w.to_text());
    }
    Ok(s)
}
