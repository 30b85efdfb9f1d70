//! Conjectured critical exponents of the two-dimensional self-avoiding walk
//! and the radial SLE(8/3) boundary/interior exponents, held as exact
//! rationals.

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// Exponent set used by weights, exact distributions and fits.
///
/// `p` is always derived as `(rho - gamma) / nu` so it cannot drift from the
/// other three.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exponents {
    pub nu: Rational,
    pub gamma: Rational,
    pub rho: Rational,
    pub b: Rational,
    pub bbar: Rational,
}

impl Exponents {
    /// nu = 3/4, gamma = 43/32, rho = 25/64, b = 5/8, bbar = 5/48.
    pub fn conjectured() -> Self {
        Exponents {
            nu: Ratio::new(3, 4),
            gamma: Ratio::new(43, 32),
            rho: Ratio::new(25, 64),
            b: Ratio::new(5, 8),
            bbar: Ratio::new(5, 48),
        }
    }

    /// Power of the endpoint radius in the walk weight.
    pub fn p(&self) -> Rational {
        (self.rho - self.gamma) / self.nu
    }

    pub fn nu_f64(&self) -> f64 {
        to_f64(self.nu)
    }

    pub fn p_f64(&self) -> f64 {
        to_f64(self.p())
    }

    pub fn b_f64(&self) -> f64 {
        to_f64(self.b)
    }

    pub fn bbar_f64(&self) -> f64 {
        to_f64(self.bbar)
    }

    /// Exponent of `sin(theta)` in the endpoint-angle density.
    pub fn angular_power(&self) -> f64 {
        to_f64(self.b - self.bbar)
    }
}

impl Default for Exponents {
    fn default() -> Self {
        Self::conjectured()
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjectured_relations_hold_exactly() {
        let e = Exponents::conjectured();
        assert_eq!(e.p(), Ratio::new(-61, 48));
        assert_eq!(e.b + e.bbar, e.p() + Ratio::from_integer(2));
        assert_eq!(e.b + e.bbar, Ratio::new(35, 48));
        assert_eq!(e.b - e.bbar, Ratio::new(25, 48));
    }

    #[test]
    fn float_views() {
        let e = Exponents::default();
        assert_eq!(e.nu_f64(), 0.75);
        assert_eq!(e.p_f64(), -61.0 / 48.0);
        assert_eq!(e.angular_power(), 25.0 / 48.0);
    }
}
