//! Conformal maps of the upper half plane and the closed-form radial
//! SLE(8/3) distributions of four excursion statistics.
//!
//! For radial SLE(8/3) from 0 to i the probability of avoiding a hull `A` is
//! `|phi_A'(0)|^b |phi_A'(i)|^bbar`, where `phi_A` maps `H \ A` onto `H` fixing
//! 0 and i. Each statistic below reduces to one explicit `phi_A`; the factor
//! functions return the two derivative magnitudes separately because the
//! exponent fit regresses on their logarithms.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::quadrature;

pub type ComplexPoint = Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    /// Rightmost excursion, `max Re`.
    X,
    /// Highest excursion, `max Im`.
    Y,
    /// Largest distance from the origin.
    R,
    /// Largest distance from i.
    S,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [Statistic::X, Statistic::Y, Statistic::R, Statistic::S];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::X => "X",
            Statistic::Y => "Y",
            Statistic::R => "R",
            Statistic::S => "S",
        }
    }

    /// Smallest value the statistic can take for a curve from 0 to i.
    pub fn lower_edge(self) -> f64 {
        match self {
            Statistic::X => 0.0,
            _ => 1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Statistic::X),
            "Y" | "y" => Ok(Statistic::Y),
            "R" | "r" => Ok(Statistic::R),
            "S" | "s" => Ok(Statistic::S),
            _ => Err(Error::parse(0, format!("unknown statistic {s:?}"))),
        }
    }
}

/// `(|phi'(0)|, |phi'(i)|)` for one statistic and threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleCdfFactors {
    pub d0: f64,
    pub di: f64,
}

impl SleCdfFactors {
    pub fn cdf(&self, exponents: &Exponents) -> f64 {
        if self.d0 == 0.0 {
            return 0.0;
        }
        self.d0.powf(exponents.b_f64()) * self.di.powf(exponents.bbar_f64())
    }
}

/// Mobius automorphism of the half plane fixing 0 and sending a given
/// endpoint `x + iy` to i: `phi(z) = y z / (x^2 + y^2 - x z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointMap {
    x: f64,
    y: f64,
    norm_sq: f64,
}

impl EndpointMap {
    pub fn new(endpoint: ComplexPoint) -> Result<Self> {
        if !(endpoint.im > 0.0) || !endpoint.re.is_finite() || !endpoint.im.is_finite() {
            return Err(Error::DegenerateEndpoint {
                re: endpoint.re,
                im: endpoint.im,
            });
        }
        Ok(EndpointMap {
            x: endpoint.re,
            y: endpoint.im,
            norm_sq: endpoint.norm_sqr(),
        })
    }

    /// `x^2 + y^2 - x z`, the denominator of the map.
    #[inline]
    pub fn denominator(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.norm_sq - self.x * z.re, -self.x * z.im)
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.y * z / self.denominator(z)
    }

    /// `|phi'(z)| = y (x^2 + y^2) / |x^2 + y^2 - x z|^2`.
    #[inline]
    pub fn derivative_abs(&self, z: Complex64) -> f64 {
        self.y * self.norm_sq / self.denominator(z).norm_sqr()
    }

    /// Radius around `z` on which `|phi'|` stays below `4 |phi'(z)|`:
    /// `|x^2 + y^2 - x z| / (2 |x|)`, infinite when `x = 0`.
    #[inline]
    pub fn derivative_bound_radius(&self, z: Complex64) -> f64 {
        if self.x == 0.0 {
            f64::INFINITY
        } else {
            self.denominator(z).norm() / (2.0 * self.x.abs())
        }
    }

    /// `min(derivative_bound_radius(z), slack / (4 |phi'(z)|))`, with one
    /// square root at most.
    #[inline]
    pub fn skip_reach(&self, z: Complex64, slack: f64) -> f64 {
        let den_sq = self.denominator(z).norm_sqr();
        let by_slack = slack * den_sq / (4.0 * self.y * self.norm_sq);
        let radius_sq = den_sq / (4.0 * self.x * self.x);
        if by_slack * by_slack <= radius_sq {
            by_slack
        } else {
            radius_sq.sqrt()
        }
    }
}

pub fn endpoint_map(endpoint: ComplexPoint, z: ComplexPoint) -> Result<ComplexPoint> {
    Ok(EndpointMap::new(endpoint)?.apply(z))
}

fn domain_error(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain,
    }
}

pub fn factors_x(x: f64) -> Result<SleCdfFactors> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain_error("x", x, "x > 0"));
    }
    let q = 4.0 * x * x;
    Ok(SleCdfFactors {
        d0: q / (q + 1.0),
        di: x.hypot(1.0) / x,
    })
}

pub fn factors_y(y: f64) -> Result<SleCdfFactors> {
    if !(y > 1.0) || !y.is_finite() {
        return Err(domain_error("y", y, "y > 1"));
    }
    // sin(pi/y) / (1 - cos(pi/y)) = cot(pi/(2y)), so d0 = a cot a.
    let a = FRAC_PI_2 / y;
    let (sin_a, cos_a) = a.sin_cos();
    Ok(SleCdfFactors {
        d0: a * cos_a / sin_a,
        di: a / (sin_a * cos_a),
    })
}

pub fn factors_r(r: f64) -> Result<SleCdfFactors> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(domain_error("r", r, "r > 1"));
    }
    let r2 = r * r;
    let gap = (r - 1.0) * (r + 1.0);
    Ok(SleCdfFactors {
        d0: gap / r2,
        di: (r2 + 1.0) / gap,
    })
}

/// Exact `s = 1` limit of [`factors_s`]: `d0 = 1/2`, `di = 2`.
pub const FACTORS_S_AT_ONE: SleCdfFactors = SleCdfFactors { d0: 0.5, di: 2.0 };

/// Angles of the wedge construction for the S statistic.
///
/// With `l = sqrt(s^2 - 1)` the disc complement is sent by `(l + z)/(l - z)`
/// onto a wedge of opening `theta = pi - atan(l)`, and i lands on
/// `exp(i alpha)` with `alpha = 2 atan(1/l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeAngles {
    pub l: f64,
    pub theta: f64,
    pub alpha: f64,
}

impl WedgeAngles {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(domain_error("s", s, "s > 1"));
        }
        let l = ((s - 1.0) * (s + 1.0)).sqrt();
        Ok(WedgeAngles {
            l,
            theta: PI - l.atan(),
            alpha: 2.0 * l.recip().atan(),
        })
    }
}

pub fn factors_s(s: f64) -> Result<SleCdfFactors> {
    if s == 1.0 {
        return Ok(FACTORS_S_AT_ONE);
    }
    if !(s > 1.0) || !s.is_finite() {
        return Err(domain_error("s", s, "s >= 1"));
    }
    let l = ((s - 1.0) * (s + 1.0)).sqrt();
    if l == 0.0 {
        return Ok(FACTORS_S_AT_ONE);
    }
    // With u = atan l, v = atan(1/l) and theta = pi - u, the angle
    // pi alpha / theta equals 2 delta for delta = pi v / theta, and
    // pi/2 - delta = pi u / (2 theta). Writing sin(2 delta) and
    // 1 - cos(2 delta) through sin(delta), sin(pi/2 - delta) keeps both
    // ends of the domain free of cancellation.
    let u = l.atan();
    let v = l.recip().atan();
    let theta = PI - u;
    let sin_delta = (PI * v / theta).sin();
    let cos_delta = (PI * u / (2.0 * theta)).sin();
    Ok(SleCdfFactors {
        d0: PI * cos_delta / (l * theta * sin_delta),
        di: PI * l / (theta * sin_delta * cos_delta * (l * l + 1.0)),
    })
}

pub fn factors(stat: Statistic, w: f64) -> Result<SleCdfFactors> {
    match stat {
        Statistic::X => factors_x(w),
        Statistic::Y => factors_y(w),
        Statistic::R => factors_r(w),
        Statistic::S => factors_s(w),
    }
}

/// `P(W <= w)` for radial SLE in the half plane from 0 to i.
///
/// At the lower edge of the domain this is the limiting value: 0 for X, Y and
/// R, and `2^(bbar - b)` for S, which has an atom at 1.
pub fn exact_cdf(stat: Statistic, w: f64, exponents: &Exponents) -> Result<f64> {
    if stat != Statistic::S && w == stat.lower_edge() {
        return Ok(0.0);
    }
    Ok(factors(stat, w)?.cdf(exponents))
}

/// Factors including the lower-edge limit (`d0 = 0`, `di = inf`) for X, Y, R.
pub fn factors_closed(stat: Statistic, w: f64) -> Result<SleCdfFactors> {
    if stat != Statistic::S && w == stat.lower_edge() {
        return Ok(SleCdfFactors {
            d0: 0.0,
            di: f64::INFINITY,
        });
    }
    factors(stat, w)
}

/// The conformal map `H \ {Re z >= x} -> H` fixing 0 and i.
pub fn phi_x(x: f64, z: Complex64) -> Complex64 {
    let num = 2.0 * x * (2.0 * x * z - z * z);
    num / (z * z - 2.0 * x * z + 4.0 * x * x + 1.0)
}

/// The conformal map from the strip `0 < Im z < y` onto H fixing 0 and i.
pub fn phi_y(y: f64, z: Complex64) -> Complex64 {
    let a = FRAC_PI_2 / y;
    (z * a).tanh() / a.tan()
}

/// The conformal map `H \ {|z| >= r} -> H` fixing 0 and i.
pub fn phi_r(r: f64, z: Complex64) -> Complex64 {
    (r * r - 1.0) * z / (z * z + r * r)
}

/// The conformal map `H \ {|z - i| >= s} -> H` fixing 0 and i, for `s > 1`.
pub fn phi_s(s: f64, z: Complex64) -> Complex64 {
    let wedge = WedgeAngles::new(s).expect("phi_s needs s > 1");
    let power = PI / wedge.theta;
    let to_wedge = |z: Complex64| (wedge.l + z) / (wedge.l - z);
    let open = |z: Complex64| z.powf(power) - 1.0;
    let target = open(to_wedge(I));
    let normalize = EndpointMap::new(target).expect("wedge image of i lies in H");
    normalize.apply(open(to_wedge(z)))
}

pub fn phi(stat: Statistic, w: f64, z: Complex64) -> Complex64 {
    match stat {
        Statistic::X => phi_x(w, z),
        Statistic::Y => phi_y(w, z),
        Statistic::R => phi_r(w, z),
        Statistic::S => phi_s(w, z),
    }
}

/// Conjectured density of the weighted endpoint angle on `[0, pi]`:
/// `sin(theta)^(b - bbar)` normalized to unit mass.
#[derive(Debug, Clone, Copy)]
pub struct AngularDensity {
    power: f64,
    normalizer: f64,
}

impl AngularDensity {
    pub fn new(exponents: &Exponents) -> Self {
        let power = exponents.angular_power();
        let normalizer = quadrature::integrate(|a| a.sin().max(0.0).powf(power), 0.0, PI, 1e-12);
        AngularDensity { power, normalizer }
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn density(&self, theta: f64) -> f64 {
        theta.sin().max(0.0).powf(self.power) / self.normalizer
    }
}

pub fn angular_density_reference(theta: f64, exponents: &Exponents) -> f64 {
    static CONJECTURED: OnceLock<AngularDensity> = OnceLock::new();
    if *exponents == Exponents::conjectured() {
        CONJECTURED
            .get_or_init(|| AngularDensity::new(exponents))
            .density(theta)
    } else {
        AngularDensity::new(exponents).density(theta)
    }
}
