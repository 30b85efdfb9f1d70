//! Neumaier compensated summation.

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub const ZERO: CompensatedSum = CompensatedSum {
        sum: 0.0,
        carry: 0.0,
    };

    pub fn from_parts(sum: f64, carry: f64) -> Self {
        CompensatedSum { sum, carry }
    }

    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.carry)
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_summation() {
        let mut s = CompensatedSum::ZERO;
        let mut naive = 0.0;
        for v in [1e16, 1.0, -1e16, 1.0] {
            s.add(v);
            naive += v;
        }
        assert_eq!(s.value(), 2.0);
        assert_ne!(naive, 2.0);
    }
}
