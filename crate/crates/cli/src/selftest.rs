//! Fast end-to-end sanity checks of the installed build.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use sawsle_core::conformal::{factors, factors_s, phi, SleCdfFactors, FACTORS_S_AT_ONE};
use sawsle_core::{
    enumerate_half_plane_saws, stats_bruteforce, stats_fast, ChainRng, ChainState, ComplexPoint,
    Exponents, LatticeWalk, Statistic,
};

/// Deliberate defects used to confirm the checks can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Takes the wedge angle of the S map from the principal arctangent,
    /// which lands on the wrong branch for `s < sqrt(2)`.
    SBranch,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn branch_fault_factors_s(s: f64) -> SleCdfFactors {
    if s == 1.0 {
        return FACTORS_S_AT_ONE;
    }
    let l = (s * s - 1.0).sqrt();
    let theta = PI - l.atan();
    let alpha = (2.0 * l / (l * l - 1.0)).atan();
    let a = PI * alpha / theta;
    SleCdfFactors {
        d0: PI * a.sin() / (l * theta * (1.0 - a.cos())),
        di: 2.0 * PI * l / (theta * a.sin() * (l * l + 1.0)),
    }
}

fn s_factors(fault: Fault, s: f64) -> SleCdfFactors {
    match fault {
        Fault::None => factors_s(s).expect("s >= 1"),
        Fault::SBranch => branch_fault_factors_s(s),
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn fixed_points() -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let zero = ComplexPoint::new(0.0, 0.0);
    let i = ComplexPoint::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for _ in 0..250 {
        for stat in Statistic::ALL {
            let w = stat.lower_edge() + rng.gen_range(0.01..6.0);
            worst = worst
                .max(phi(stat, w, zero).norm())
                .max((phi(stat, w, i) - i).norm());
        }
    }
    check(
        "fixed_points",
        worst <= 1e-12,
        format!("max deviation {worst:.3e}"),
    )
}

fn derivatives() -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(18);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        for stat in Statistic::ALL {
            let w: f64 = stat.lower_edge() + rng.gen_range(0.05..6.0);
            let scale = match stat {
                Statistic::X => w.min(1.0),
                Statistic::S => (w * w - 1.0).sqrt().min(w - 1.0).min(1.0),
                _ => (w - 1.0).min(1.0),
            };
            let h = 1e-3 * scale;
            let f = factors(stat, w).expect("inside domain");
            for (z, exact) in [
                (ComplexPoint::new(0.0, 0.0), f.d0),
                (ComplexPoint::new(0.0, 1.0), f.di),
            ] {
                let g = |t: f64| phi(stat, w, z + t);
                let d = (g(-2.0 * h) - 8.0 * g(-h) + 8.0 * g(h) - g(2.0 * h)) / (12.0 * h);
                worst = worst.max((d.norm() - exact).abs() / exact);
            }
        }
    }
    check(
        "derivatives",
        worst <= 1e-8,
        format!("max relative error {worst:.3e}"),
    )
}

fn s_atom(fault: Fault) -> Check {
    let e = Exponents::conjectured();
    let target = 2f64.powf(-25.0 / 48.0);
    let at_one = (s_factors(fault, 1.0).cdf(&e) - target).abs();
    let near_one = (s_factors(fault, 1.0 + 1e-12).cdf(&e) - target).abs();
    let r3 = 3f64.sqrt();
    let sq2 = s_factors(fault, 2f64.sqrt());
    let at_sqrt2 = (sq2.d0 - 4.0 * r3 / 9.0)
        .abs()
        .max((sq2.di - 8.0 * r3 / 9.0).abs());
    let passed = at_one <= 1e-12 && near_one <= 1e-6 && at_sqrt2 <= 1e-12;
    check(
        "s_at_one",
        passed,
        format!("|cdf(1) - 2^(-25/48)| = {at_one:.3e}, limit from above {near_one:.3e}, s=sqrt2 {at_sqrt2:.3e}"),
    )
}

fn fast_statistics() -> Check {
    let nu = Exponents::conjectured().nu;
    let mut worst = 0.0f64;
    for (k, n) in [100usize, 500, 1000].into_iter().enumerate() {
        for seed in 0..10u64 {
            let mut st = ChainState::new(LatticeWalk::rod(n), ChainRng::for_chain(seed, k as u64));
            for _ in 0..3 * n {
                st.pivot_step();
            }
            let (a, b) = match (stats_bruteforce(st.walk(), nu), stats_fast(st.walk(), nu)) {
                (Ok(a), Ok(b)) => (a, b),
                (a, b) => return check("fast_statistics", false, format!("{a:?} / {b:?}")),
            };
            worst = worst.max(a.max_abs_diff(&b));
        }
    }
    check(
        "fast_statistics",
        worst <= 1e-9,
        format!("max difference {worst:.3e}"),
    )
}

fn uniformity() -> Check {
    let walks = match enumerate_half_plane_saws(6) {
        Ok(w) => w,
        Err(e) => return check("uniformity", false, e.to_string()),
    };
    let index: HashMap<&LatticeWalk, usize> =
        walks.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut counts = vec![0u64; walks.len()];
    let mut st = ChainState::new(LatticeWalk::rod(6), ChainRng::for_chain(6, 0));
    for _ in 0..10_000 {
        st.pivot_step();
    }
    let samples = 500_000u64;
    for _ in 0..samples {
        for _ in 0..10 {
            st.pivot_step();
        }
        counts[index[st.walk()]] += 1;
    }
    let p = 1.0 / walks.len() as f64;
    let tv = 0.5
        * counts
            .iter()
            .map(|&c| (c as f64 / samples as f64 - p).abs())
            .sum::<f64>();
    let passed = walks.len() == 131 && tv < 0.03;
    check(
        "uniformity",
        passed,
        format!("{} walks, total variation {tv:.4}", walks.len()),
    )
}

fn enumeration_counts() -> Check {
    let counts: Vec<usize> = (1..=3)
        .map(|n| enumerate_half_plane_saws(n).map_or(0, |w| w.len()))
        .collect();
    check(
        "enumeration",
        counts == [1, 3, 7],
        format!("counts for N=1..3: {counts:?}"),
    )
}

pub fn run_selftest(fault: Fault) -> Vec<Check> {
    vec![
        fixed_points(),
        derivatives(),
        s_atom(fault),
        enumeration_counts(),
        fast_statistics(),
        uniformity(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_fault_is_detected() {
        assert!(s_atom(Fault::None).passed);
        assert!(!s_atom(Fault::SBranch).passed);
    }

    #[test]
    fn faulty_branch_agrees_away_from_the_edge() {
        for s in [1.5, 2.0, 4.0] {
            let (a, b) = (s_factors(Fault::None, s), s_factors(Fault::SBranch, s));
            assert!((a.d0 - b.d0).abs() < 1e-12 && (a.di - b.di).abs() < 1e-12);
        }
    }
}
