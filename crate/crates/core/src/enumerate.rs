//! Exhaustive enumeration of short half-plane walks, the exact oracle for the
//! uniform measure the pivot chain targets.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::walk::{LatticeWalk, Site, MIN_INTERIOR_ROW};

pub const ENUMERATION_CAP: usize = 12;

const STEPS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Every N-step walk passing `validate_walk`, each exactly once, in
/// depth-first order with steps tried as right, left, up, down.
pub fn enumerate_half_plane_saws(n: usize) -> Result<Vec<LatticeWalk>> {
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    let mut out = Vec::new();
    let mut path = vec![Site::ORIGIN];
    let mut seen: HashSet<Site> = HashSet::from([Site::ORIGIN]);
    extend(n, &mut path, &mut seen, &mut out);
    Ok(out)
}

fn extend(n: usize, path: &mut Vec<Site>, seen: &mut HashSet<Site>, out: &mut Vec<LatticeWalk>) {
    if path.len() == n + 1 {
        out.push(LatticeWalk::from_sites_unchecked(path.clone()));
        return;
    }
    let tip = *path.last().unwrap();
    for (dx, dy) in STEPS {
        let next = Site::new(tip.x + dx, tip.y + dy);
        if next.y < MIN_INTERIOR_ROW || seen.contains(&next) {
            continue;
        }
        seen.insert(next);
        path.push(next);
        extend(n, path, seen, out);
        path.pop();
        seen.remove(&next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::validate_walk;

    #[test]
    fn small_counts() {
        let counts: Vec<usize> = (0..=3)
            .map(|n| enumerate_half_plane_saws(n).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 3, 7]);
        let one = enumerate_half_plane_saws(1).unwrap();
        assert_eq!(one[0].sites(), &[Site::new(0, 0), Site::new(0, 1)]);
    }

    #[test]
    fn rejects_above_cap() {
        assert!(matches!(
            enumerate_half_plane_saws(13),
            Err(Error::EnumerationCap { n: 13, cap: 12 })
        ));
    }

    #[test]
    fn monotone_valid_distinct_and_mirror_closed() {
        let mut prev = 0;
        for n in 1..=9 {
            let walks = enumerate_half_plane_saws(n).unwrap();
            assert!(walks.len() > prev);
            prev = walks.len();
            let set: HashSet<&LatticeWalk> = walks.iter().collect();
            assert_eq!(set.len(), walks.len());
            for w in &walks {
                assert!(validate_walk(w.sites()));
                assert_eq!(w.steps(), n);
                assert!(set.contains(&w.reflected()));
            }
        }
    }

    // Brute force over all 4^N step sequences: independent of the pruned DFS.
    #[test]
    fn matches_unpruned_brute_force() {
        for n in 1..=7usize {
            let mut count = 0;
            for code in 0..4usize.pow(n as u32) {
                let mut c = code;
                let mut sites = vec![Site::ORIGIN];
                for _ in 0..n {
                    let (dx, dy) = STEPS[c % 4];
                    c /= 4;
                    let t = *sites.last().unwrap();
                    sites.push(Site::new(t.x + dx, t.y + dy));
                }
                if validate_walk(&sites) {
                    count += 1;
                }
            }
            assert_eq!(enumerate_half_plane_saws(n).unwrap().len(), count, "N={n}");
        }
    }
}
