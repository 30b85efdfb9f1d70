//! Lattice walks on the square lattice anchored at the origin and confined to
//! the upper half plane, plus the site-to-index occupancy map used by the
//! pivot chain.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const WALK_FORMAT_HEADER: &str = "sawsle-walk v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Site {
    pub x: i32,
    pub y: i32,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        Site { x, y }
    }

    pub fn is_neighbor(self, other: Site) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(i32, i32)> for Site {
    fn from((x, y): (i32, i32)) -> Self {
        Site { x, y }
    }
}

/// Lowest row a site other than the origin may occupy.
///
/// Walks touch the real axis only at the origin.
pub const MIN_INTERIOR_ROW: i32 = 1;

/// True iff `sites` starts at the origin, takes unit steps, never revisits a
/// site and stays at `y >= 1` after the origin.
pub fn validate_walk(sites: &[Site]) -> bool {
    let Some(&first) = sites.first() else {
        return false;
    };
    if first != Site::ORIGIN {
        return false;
    }
    if sites[1..].iter().any(|s| s.y < MIN_INTERIOR_ROW) {
        return false;
    }
    if sites.windows(2).any(|w| !w[0].is_neighbor(w[1])) {
        return false;
    }
    let mut seen = std::collections::HashSet::with_capacity(sites.len());
    sites.iter().all(|s| seen.insert(*s))
}

/// An N-step half-plane self-avoiding walk.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeWalk {
    sites: Vec<Site>,
}

impl LatticeWalk {
    pub fn new(sites: Vec<Site>) -> Result<Self> {
        if !validate_walk(&sites) {
            return Err(Error::InvalidWalk(format!(
                "{}-site sequence fails the half-plane SAW invariants",
                sites.len()
            )));
        }
        Ok(LatticeWalk { sites })
    }

    /// Caller guarantees `validate_walk(&sites)`.
    pub(crate) fn from_sites_unchecked(sites: Vec<Site>) -> Self {
        debug_assert!(validate_walk(&sites));
        LatticeWalk { sites }
    }

    /// The straight vertical rod `(0,0), (0,1), ..., (0,n)`.
    pub fn rod(n: usize) -> Self {
        LatticeWalk {
            sites: (0..=n as i32).map(|y| Site::new(0, y)).collect(),
        }
    }

    pub fn steps(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [Site] {
        &mut self.sites
    }

    pub fn endpoint(&self) -> Site {
        *self.sites.last().expect("walks hold at least the origin")
    }

    pub fn into_sites(self) -> Vec<Site> {
        self.sites
    }

    /// Mirror image under `(x, y) -> (-x, y)`.
    pub fn reflected(&self) -> Self {
        LatticeWalk {
            sites: self.sites.iter().map(|s| Site::new(-s.x, s.y)).collect(),
        }
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} N={}", WALK_FORMAT_HEADER, self.steps())?;
        for s in &self.sites {
            writeln!(out, "{} {}", s.x, s.y)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::with_capacity(8 * self.sites.len());
        self.write_text(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("walk text is ASCII")
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = numbered_lines(input);
        let walk = Self::read_from_lines(&mut lines)?;
        if let Some(line) = lines.next() {
            let (no, text) = line?;
            if !text.trim().is_empty() {
                return Err(Error::parse(no, "trailing content after walk"));
            }
        }
        Ok(walk)
    }

    /// Consumes the header and exactly `N + 1` coordinate lines.
    pub(crate) fn read_from_lines<I>(lines: &mut I) -> Result<Self>
    where
        I: Iterator<Item = Result<(usize, String)>>,
    {
        let (no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing walk header"))??;
        let rest = header
            .strip_prefix(WALK_FORMAT_HEADER)
            .ok_or_else(|| Error::Version {
                expected: WALK_FORMAT_HEADER,
                found: header.clone(),
            })?;
        let n: usize = rest
            .trim()
            .strip_prefix("N=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(no, "expected `N=<steps>` after the header"))?;
        let mut sites = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            let (no, text) = lines
                .next()
                .ok_or_else(|| Error::parse(no, "walk ended before N + 1 sites"))??;
            let mut parts = text.split_whitespace();
            let mut coord = || -> Result<i32> {
                parts
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::parse(no, format!("bad site line {text:?}")))
            };
            let site = Site::new(coord()?, coord()?);
            if parts.next().is_some() {
                return Err(Error::parse(no, format!("bad site line {text:?}")));
            }
            sites.push(site);
        }
        LatticeWalk::new(sites)
    }
}

pub(crate) fn numbered_lines<R: BufRead>(
    input: R,
) -> impl Iterator<Item = Result<(usize, String)>> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from))
}

const EMPTY: u32 = u32::MAX;
const DENSE_CELL_LIMIT: usize = 1 << 25;

/// Constant-time map from lattice site to its index along a walk.
///
/// Small walks use a dense array over the bounding box `|x| <= N, 0 <= y <= N`
/// that every valid walk fits in; long walks fall back to a hash map.
#[derive(Debug, Clone)]
pub enum OccupancyIndex {
    Dense {
        n: i32,
        width: usize,
        cells: Vec<u32>,
    },
    Sparse(HashMap<Site, u32>),
}

impl OccupancyIndex {
    pub fn build(walk: &LatticeWalk) -> Self {
        let n = walk.steps();
        let width = 2 * n + 1;
        let mut index = match width.checked_mul(n + 1) {
            Some(cells) if cells <= DENSE_CELL_LIMIT => OccupancyIndex::Dense {
                n: n as i32,
                width,
                cells: vec![EMPTY; cells],
            },
            _ => OccupancyIndex::Sparse(HashMap::with_capacity(n + 1)),
        };
        for (i, s) in walk.sites().iter().enumerate() {
            index.insert(*s, i as u32);
        }
        index
    }

    #[inline]
    fn slot(n: i32, width: usize, s: Site) -> Option<usize> {
        if s.x < -n || s.x > n || s.y < 0 || s.y > n {
            return None;
        }
        Some(s.y as usize * width + (s.x + n) as usize)
    }

    #[inline]
    pub fn get(&self, s: Site) -> Option<u32> {
        match self {
            OccupancyIndex::Dense { n, width, cells } => {
                Self::slot(*n, *width, s).and_then(|k| (cells[k] != EMPTY).then_some(cells[k]))
            }
            OccupancyIndex::Sparse(map) => map.get(&s).copied(),
        }
    }

    #[inline]
    pub fn insert(&mut self, s: Site, index: u32) {
        match self {
            OccupancyIndex::Dense { n, width, cells } => {
                let k = Self::slot(*n, *width, s).expect("site outside the walk bounding box");
                cells[k] = index;
            }
            OccupancyIndex::Sparse(map) => {
                map.insert(s, index);
            }
        }
    }

    #[inline]
    pub fn remove(&mut self, s: Site) {
        match self {
            OccupancyIndex::Dense { n, width, cells } => {
                if let Some(k) = Self::slot(*n, *width, s) {
                    cells[k] = EMPTY;
                }
            }
            OccupancyIndex::Sparse(map) => {
                map.remove(&s);
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            OccupancyIndex::Dense { cells, .. } => cells.iter().filter(|&&c| c != EMPTY).count(),
            OccupancyIndex::Sparse(map) => map.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True iff the index holds exactly the sites of `walk` at their indices.
    pub fn matches(&self, walk: &LatticeWalk) -> bool {
        self.len() == walk.sites().len()
            && walk
                .sites()
                .iter()
                .enumerate()
                .all(|(i, s)| self.get(*s) == Some(i as u32))
    }
}
