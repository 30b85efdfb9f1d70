//! Excursion statistics of a walk after the Mobius map that sends its
//! endpoint to i.
//!
//! [`stats_fast`] skips runs of sites that provably cannot raise any running
//! maximum: a nearest-neighbour walk moves at most `l` in `l` steps, and within
//! `|x^2 + y^2 - x z| / (2|x|)` of `z` the map's derivative is at most
//! `4 |phi'(z)|`, so `l` steps move the image by at most `4 |phi'(z)| l`.

use num_complex::Complex64;

use crate::conformal::EndpointMap;
use crate::error::{Error, Result};
use crate::exponents::{to_f64, Exponents, Rational};
use crate::walk::{LatticeWalk, Site};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedStats {
    /// Max real part of the transformed walk.
    pub x: f64,
    /// Max imaginary part.
    pub y: f64,
    /// Max modulus.
    pub rmax: f64,
    /// Max distance from i.
    pub s: f64,
    /// Endpoint radius of the walk scaled by `N^-nu`.
    pub rend: f64,
    /// Polar angle of the endpoint, in `(0, pi)`.
    pub theta: f64,
}

impl TransformedStats {
    pub fn get(&self, stat: crate::conformal::Statistic) -> f64 {
        use crate::conformal::Statistic::*;
        match stat {
            X => self.x,
            Y => self.y,
            R => self.rmax,
            S => self.s,
        }
    }

    pub fn max_abs_diff(&self, other: &TransformedStats) -> f64 {
        [
            self.x - other.x,
            self.y - other.y,
            self.rmax - other.rmax,
            self.s - other.s,
            self.rend - other.rend,
            self.theta - other.theta,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Running maxima of the four excursion statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maxima {
    pub x: f64,
    pub y: f64,
    pub rmax: f64,
    pub s: f64,
}

impl Maxima {
    const EMPTY: Maxima = Maxima {
        x: f64::NEG_INFINITY,
        y: f64::NEG_INFINITY,
        rmax: f64::NEG_INFINITY,
        s: f64::NEG_INFINITY,
    };

    #[inline]
    fn update(&mut self, w: Complex64) {
        self.update_with_norms(w, w.norm(), (w - I).norm());
    }

    #[inline]
    fn update_with_norms(&mut self, w: Complex64, r: f64, s: f64) {
        self.x = self.x.max(w.re);
        self.y = self.y.max(w.im);
        self.rmax = self.rmax.max(r);
        self.s = self.s.max(s);
    }

    /// How far `w` can move before it could raise any maximum; never negative.
    #[inline]
    pub fn slack(&self, w: Complex64) -> f64 {
        (self.x - w.re)
            .min(self.y - w.im)
            .min(self.rmax - w.norm())
            .min(self.s - (w - I).norm())
            .max(0.0)
    }

    /// True iff `w` does not exceed any of the maxima.
    pub fn dominates(&self, w: Complex64) -> bool {
        w.re <= self.x && w.im <= self.y && w.norm() <= self.rmax && (w - I).norm() <= self.s
    }
}

#[inline]
fn point(s: Site) -> Complex64 {
    Complex64::new(s.x as f64, s.y as f64)
}

fn endpoint_map_of(walk: &LatticeWalk) -> Result<EndpointMap> {
    let e = walk.endpoint();
    EndpointMap::new(point(e)).map_err(|_| Error::DegenerateEndpoint {
        re: e.x as f64,
        im: e.y as f64,
    })
}

fn finish(walk: &LatticeWalk, m: Maxima, nu: Rational) -> TransformedStats {
    let e = walk.endpoint();
    let n = walk.steps() as f64;
    TransformedStats {
        x: m.x,
        y: m.y,
        rmax: m.rmax,
        s: m.s,
        rend: (e.x as f64).hypot(e.y as f64) * n.powf(-to_f64(nu)),
        theta: (e.y as f64).atan2(e.x as f64),
    }
}

/// Maxima of the image of `points` under the map sending `endpoint` to i.
pub fn transformed_maxima(points: &[Complex64], endpoint: Complex64) -> Result<Maxima> {
    let map = EndpointMap::new(endpoint)?;
    let mut m = Maxima::EMPTY;
    for z in points {
        m.update(map.apply(*z));
    }
    Ok(m)
}

/// Evaluates the map at every site.
pub fn stats_bruteforce(walk: &LatticeWalk, nu: Rational) -> Result<TransformedStats> {
    let map = endpoint_map_of(walk)?;
    let mut m = Maxima::EMPTY;
    for s in walk.sites() {
        m.update(map.apply(point(*s)));
    }
    Ok(finish(walk, m, nu))
}

/// A run of sites passed over by [`stats_fast`]: the map was evaluated at
/// `from` and next at `to`, and `maxima` were the running values at `from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Skip {
    pub from: usize,
    pub to: usize,
    pub maxima: Maxima,
}

fn scan(walk: &LatticeWalk, mut skips: Option<&mut Vec<Skip>>) -> Result<Maxima> {
    let map = endpoint_map_of(walk)?;
    let sites = walk.sites();
    let n = walk.steps();
    // Lower bounds on the maxima from the endpoint and a sparse subset of sites.
    let mut m = Maxima::EMPTY;
    let stride = ((n as f64).sqrt() as usize).max(1);
    for z in sites
        .iter()
        .step_by(stride)
        .chain(std::iter::once(&sites[n]))
    {
        m.update(map.apply(point(*z)));
    }
    let mut j = 0;
    loop {
        let z = point(sites[j]);
        let w = map.apply(z);
        let (r, sd) = (w.norm(), (w - I).norm());
        m.update_with_norms(w, r, sd);
        if j == n {
            break;
        }
        let mut step = 1;
        let d = (m.x - w.re).min(m.y - w.im).min(m.rmax - r).min(m.s - sd);
        if d > 0.0 {
            let l = map.skip_reach(z, d).floor();
            if l >= 2.0 {
                step = (l.min((n - j) as f64)) as usize;
            }
        }
        if step > 1 {
            if let Some(log) = skips.as_deref_mut() {
                log.push(Skip {
                    from: j,
                    to: j + step,
                    maxima: m,
                });
            }
        }
        j += step;
    }
    Ok(m)
}

/// Same result as [`stats_bruteforce`], evaluating the map at fewer sites.
pub fn stats_fast(walk: &LatticeWalk, nu: Rational) -> Result<TransformedStats> {
    let m = scan(walk, None)?;
    Ok(finish(walk, m, nu))
}

/// [`stats_fast`] plus the list of skipped runs.
pub fn stats_fast_with_skips(
    walk: &LatticeWalk,
    nu: Rational,
) -> Result<(TransformedStats, Vec<Skip>)> {
    let mut skips = Vec::new();
    let m = scan(walk, Some(&mut skips))?;
    Ok((finish(walk, m, nu), skips))
}

/// `Rend^p` with `p = (rho - gamma) / nu`.
pub fn weight(stats: &TransformedStats, exponents: &Exponents) -> f64 {
    stats.rend.powf(exponents.p_f64())
}
