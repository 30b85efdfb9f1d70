//! Non-identity elements of the dihedral group of the square.

use crate::walk::Site;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryOp {
    Rotate90,
    Rotate180,
    Rotate270,
    /// Mirror across the horizontal axis through the pivot.
    ReflectHorizontal,
    /// Mirror across the vertical axis through the pivot.
    ReflectVertical,
    /// Mirror across the line y = x.
    ReflectDiagonal,
    /// Mirror across the line y = -x.
    ReflectAntiDiagonal,
}

impl SymmetryOp {
    pub const ALL: [SymmetryOp; 7] = [
        SymmetryOp::Rotate90,
        SymmetryOp::Rotate180,
        SymmetryOp::Rotate270,
        SymmetryOp::ReflectHorizontal,
        SymmetryOp::ReflectVertical,
        SymmetryOp::ReflectDiagonal,
        SymmetryOp::ReflectAntiDiagonal,
    ];

    /// Image of the displacement `(dx, dy)`.
    #[inline]
    pub fn apply_offset(self, dx: i32, dy: i32) -> (i32, i32) {
        match self {
            SymmetryOp::Rotate90 => (-dy, dx),
            SymmetryOp::Rotate180 => (-dx, -dy),
            SymmetryOp::Rotate270 => (dy, -dx),
            SymmetryOp::ReflectHorizontal => (dx, -dy),
            SymmetryOp::ReflectVertical => (-dx, dy),
            SymmetryOp::ReflectDiagonal => (dy, dx),
            SymmetryOp::ReflectAntiDiagonal => (-dy, -dx),
        }
    }

    #[inline]
    pub fn apply_about(self, pivot: Site, s: Site) -> Site {
        let (dx, dy) = self.apply_offset(s.x - pivot.x, s.y - pivot.y);
        Site::new(pivot.x + dx, pivot.y + dy)
    }

    pub fn inverse(self) -> Self {
        match self {
            SymmetryOp::Rotate90 => SymmetryOp::Rotate270,
            SymmetryOp::Rotate270 => SymmetryOp::Rotate90,
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const PROBES: [(i32, i32); 3] = [(1, 0), (0, 1), (2, 3)];

    #[test]
    fn ops_are_distinct_non_identity_isometries() {
        let images: HashSet<Vec<(i32, i32)>> = SymmetryOp::ALL
            .iter()
            .map(|op| PROBES.iter().map(|&(x, y)| op.apply_offset(x, y)).collect())
            .collect();
        assert_eq!(images.len(), 7);
        assert!(!images.contains(PROBES.as_slice()));
        for op in SymmetryOp::ALL {
            for (x, y) in PROBES {
                let (u, v) = op.apply_offset(x, y);
                assert_eq!(u * u + v * v, x * x + y * y);
            }
        }
    }

    #[test]
    fn inverse_undoes_and_pivot_is_fixed() {
        let pivot = Site::new(-4, 7);
        for op in SymmetryOp::ALL {
            assert_eq!(op.apply_about(pivot, pivot), pivot);
            for (x, y) in PROBES {
                let s = Site::new(x, y);
                assert_eq!(op.inverse().apply_about(pivot, op.apply_about(pivot, s)), s);
            }
        }
    }

    #[test]
    fn closed_under_composition_with_identity() {
        let mut group: HashSet<Vec<(i32, i32)>> = SymmetryOp::ALL
            .iter()
            .map(|op| PROBES.iter().map(|&(x, y)| op.apply_offset(x, y)).collect())
            .collect();
        group.insert(PROBES.to_vec());
        for a in SymmetryOp::ALL {
            for b in SymmetryOp::ALL {
                let img: Vec<_> = PROBES
                    .iter()
                    .map(|&(x, y)| {
                        let (u, v) = b.apply_offset(x, y);
                        a.apply_offset(u, v)
                    })
                    .collect();
                assert!(group.contains(&img));
            }
        }
    }
}
