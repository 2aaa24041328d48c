//! Meissner bodies on the regular tetrahedron with vertices
//! `(±1, 0, 1/√2)` and `(0, ±1, −1/√2)`.
//!
//! Vertex `k` is the projection of `√2·e_k`, so the ambient coordinate
//! `θ_k` of a direction measures `V_k·θ = √2·θ_k`. A Meissner body is the
//! Reuleaux tetrahedron on these vertices with one edge out of every pair
//! of opposite edges rounded. Rounding edge `ij` replaces its neighborhood
//! by the surface whose support is `2 − h(−θ)` with `−θ` ranging over the
//! normal cone of the opposite (sharp) edge `kl`.
//!
//! On the sphere of directions:
//!
//! * three positive ambient coordinates: the spherical face about the
//!   vertex with the negative coordinate, `h = 2 + √2·min θ`;
//! * one positive coordinate: that vertex, `h = √2·max θ`;
//! * two positive coordinates `i, j`: the zone of edge `ij`. If the edge is
//!   sharp its arc is seen while `|θ_k − θ_l| ≤ 1/√2` and a face beyond
//!   that; if it is rounded the rounded surface is seen while
//!   `|θ_i − θ_j| ≤ 1/√2` and a vertex beyond that.
//!
//! Body `A` has the three edges at vertex 3 (`z`) rounded, leaving the edge
//! `wx` sharp; body `B` has the opposite three edges rounded.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::chart::{from_ambient, sorted_desc, to_ambient, AbcPoint};
use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Edges of the tetrahedron as vertex index pairs.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn edge_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    EDGES.iter().position(|&e| e == (i, j)).expect("valid edge")
}

/// Index of the edge opposite to `EDGES[e]`.
pub fn opposite_edge(e: usize) -> usize {
    5 - e
}

/// The vertices `V_w, V_x, V_y, V_z` in `(a, b, c)` coordinates.
pub fn vertices() -> [Vector3<f64>; 4] {
    std::array::from_fn(|k| {
        let mut t = [0.0; 4];
        t[k] = SQRT_2;
        from_ambient(&t)
    })
}

/// Which boundary piece of a Meissner body is seen from a direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeissnerPiece {
    Vertex(usize),
    /// Spherical face centered at the given vertex.
    Face(usize),
    /// Sharp edge arc, indexed into [`EDGES`].
    Arc(usize),
    /// Rounded surface replacing the indexed edge.
    Rounded(usize),
}

impl MeissnerPiece {
    /// Whether the piece is a two-dimensional smooth patch.
    pub fn is_smooth(self) -> bool {
        matches!(self, MeissnerPiece::Face(_) | MeissnerPiece::Rounded(_))
    }
}

/// A Meissner body: the Reuleaux tetrahedron with a choice of rounded edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Meissner {
    rounded: [bool; 6],
}

impl Meissner {
    /// Rounded edges `wz, xz, yz`; the edge `wx` is sharp.
    pub fn a() -> Self {
        Self { rounded: [false, false, true, false, true, true] }
    }

    /// Rounded edges `wx, wy, xy`, opposite to those of [`Meissner::a`].
    pub fn b() -> Self {
        Self { rounded: [true, true, false, true, false, false] }
    }

    /// A body with the given rounded edges. Exactly one edge of every
    /// opposite pair must be listed.
    pub fn with_rounded(edges: &[(usize, usize)]) -> Result<Self> {
        let mut rounded = [false; 6];
        for &(i, j) in edges {
            if i == j || i > 3 || j > 3 {
                return Err(Error::InvalidArgument(format!("no edge ({i}, {j})")));
            }
            rounded[edge_index(i, j)] = true;
        }
        if (0..3).any(|e| rounded[e] == rounded[opposite_edge(e)]) {
            return Err(Error::InvalidArgument(
                "exactly one edge of each opposite pair must be rounded".into(),
            ));
        }
        Ok(Self { rounded })
    }

    pub fn rounded_edges(&self) -> Vec<(usize, usize)> {
        EDGES.iter().zip(self.rounded).filter_map(|(&e, r)| r.then_some(e)).collect()
    }

    /// Piece seen from a unit direction, with the sorted ambient
    /// coordinates used to decide it.
    fn locate(&self, t: &[f64; 4]) -> (MeissnerPiece, [f64; 4], [usize; 4]) {
        let (s, idx) = sorted_desc(t);
        let piece = if s[2] >= 0.0 {
            MeissnerPiece::Face(idx[3])
        } else if s[1] < 0.0 {
            MeissnerPiece::Vertex(idx[0])
        } else {
            let e = edge_index(idx[0], idx[1]);
            if self.rounded[e] {
                if s[0] - s[1] <= FRAC_1_SQRT_2 {
                    MeissnerPiece::Rounded(e)
                } else {
                    MeissnerPiece::Vertex(idx[0])
                }
            } else if s[2] - s[3] <= FRAC_1_SQRT_2 {
                MeissnerPiece::Arc(e)
            } else {
                MeissnerPiece::Face(idx[3])
            }
        };
        (piece, s, idx)
    }

    pub fn piece(&self, theta: &Vector3<f64>) -> MeissnerPiece {
        self.locate(&to_ambient(theta)).0
    }

    /// Support value at a unit direction.
    pub fn support(&self, theta: &Vector3<f64>) -> f64 {
        let t = to_ambient(theta);
        let (piece, s, _) = self.locate(&t);
        match piece {
            MeissnerPiece::Face(_) => 2.0 + SQRT_2 * s[3],
            MeissnerPiece::Vertex(_) => SQRT_2 * s[0],
            MeissnerPiece::Arc(_) => {
                let d = s[2] - s[3];
                (s[2] + s[3]) * FRAC_1_SQRT_2 + SQRT_3 * (1.0 - 0.5 * d * d).sqrt()
            }
            MeissnerPiece::Rounded(_) => {
                let d = s[0] - s[1];
                2.0 + (s[0] + s[1]) * FRAC_1_SQRT_2 - SQRT_3 * (1.0 - 0.5 * d * d).sqrt()
            }
        }
    }

    /// Contact point in direction `theta`: the gradient of the homogeneous
    /// extension of the support function.
    pub fn boundary_point(&self, theta: &Vector3<f64>) -> Vector3<f64> {
        let v = vertices();
        let t = to_ambient(theta);
        let (piece, _, idx) = self.locate(&t);
        // Circle through the edge with endpoints p, q: centered at the
        // midpoint of the other two vertices, radius √3, axis along them.
        let circle = |p: usize, q: usize| {
            let center = (v[p] + v[q]) / 2.0;
            let axis = (v[p] - v[q]) / 2.0;
            let radial = theta - axis * theta.dot(&axis);
            (center, radial / radial.norm())
        };
        match piece {
            MeissnerPiece::Vertex(k) => v[k],
            MeissnerPiece::Face(k) => v[k] + theta * 2.0,
            MeissnerPiece::Arc(_) => {
                let (center, radial) = circle(idx[2], idx[3]);
                center + radial * SQRT_3
            }
            MeissnerPiece::Rounded(_) => {
                let (center, radial) = circle(idx[0], idx[1]);
                theta * 2.0 + center - radial * SQRT_3
            }
        }
    }

    /// Rough distance from `theta` to the nearest piece boundary.
    pub fn margin(&self, theta: &Vector3<f64>) -> f64 {
        let t = to_ambient(theta);
        let zero = t.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        let (_, s, idx) = self.locate(&t);
        let split = if s[1] >= 0.0 && s[2] < 0.0 {
            let d = if self.rounded[edge_index(idx[0], idx[1])] { s[0] - s[1] } else { s[2] - s[3] };
            (d - FRAC_1_SQRT_2).abs()
        } else {
            f64::INFINITY
        };
        zero.min(split)
    }
}

/// Support function of Meissner body `A` at a unit point.
pub fn support_meissner_a(p: &AbcPoint) -> Result<f64> {
    let p = AbcPoint::new(p.a, p.b, p.c)?;
    Ok(Meissner::a().support(&p.to_vector()))
}

/// Support function of Meissner body `B` at a unit point.
pub fn support_meissner_b(p: &AbcPoint) -> Result<f64> {
    let p = AbcPoint::new(p.a, p.b, p.c)?;
    Ok(Meissner::b().support(&p.to_vector()))
}

/// Support function of `(A + B)/2` at a unit point.
pub fn support_meissner_average(p: &AbcPoint) -> Result<f64> {
    let p = AbcPoint::new(p.a, p.b, p.c)?;
    Ok(support_average(&p.to_vector()))
}

/// Support function of the Minkowski average `(A + B)/2`.
pub fn support_average(theta: &Vector3<f64>) -> f64 {
    0.5 * (Meissner::a().support(theta) + Meissner::b().support(theta))
}

pub(crate) fn boundary_point_average(theta: &Vector3<f64>) -> Vector3<f64> {
    (Meissner::a().boundary_point(theta) + Meissner::b().boundary_point(theta)) / 2.0
}
