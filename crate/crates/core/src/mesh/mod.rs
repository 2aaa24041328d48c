//! Boundary meshes of three-dimensional bodies.
//!
//! An icosphere grid of directions is pushed through the contact map
//! `θ ↦ ∇h̃(θ)`, the gradient of the homogeneous extension of the support
//! function. Each triangle is labeled with the case region of its
//! direction centroid, so the `U₃` mesh shows four spherical caps and two
//! cut surfaces along each edge.

mod io;

use std::collections::{BTreeMap, HashMap};

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{classify_case, AbcPoint, BodySpec, CaseRegion, Direction};
use crate::error::{Error, Result};
use crate::volume::fd_spherical_gradient;

pub use io::{export_mesh, import_mesh, read_obj, read_ply, write_obj, write_ply, MeshFormat};

/// Directions closer than this to a piece boundary are refused in
/// analytic mode and nudged when meshing.
pub const BOUNDARY_MARGIN: f64 = 1e-9;
/// Length of the nudge applied to such directions.
pub const NUDGE: f64 = 1e-8;
/// Largest accepted subdivision level.
pub const MAX_SUBDIVISIONS: u32 = 8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub labels: Vec<CaseRegion>,
}

/// How the contact point is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Closed-form gradient of the piece containing the direction.
    Analytic,
    /// `h(θ)θ + ∇_S h(θ)` with a central-difference spherical gradient.
    FiniteDifference,
}

/// Point of the body's boundary whose outer normal is `theta`.
///
/// ```
/// use constwidth::bodies::{BodySpec, Direction};
/// use constwidth::mesh::{boundary_point, BoundaryMode};
///
/// let theta = Direction::new(vec![0.0, 0.8, 0.6]).unwrap();
/// let x = boundary_point(&BodySpec::u3(), &theta, BoundaryMode::Analytic).unwrap();
/// let center = nalgebra::Vector3::new(0.0, -1.0, -std::f64::consts::FRAC_1_SQRT_2);
/// assert!(((x - center).norm() - 2.0).abs() < 1e-12);
/// ```
pub fn boundary_point(body: &BodySpec, theta: &Direction, mode: BoundaryMode) -> Result<Vector3<f64>> {
    if theta.dim() != 3 || body.ambient_dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: if body.ambient_dim != 3 { body.ambient_dim } else { theta.dim() },
        });
    }
    let t = Vector3::from_column_slice(theta.coords());
    let b = body.body();
    match mode {
        BoundaryMode::Analytic => {
            let margin = b.piece_margin3(&t);
            if margin < BOUNDARY_MARGIN {
                return Err(Error::OnPieceBoundary { margin });
            }
            b.contact3(&t)
        }
        BoundaryMode::FiniteDifference => {
            let h = |u: &Vector3<f64>| b.support3(u);
            Ok(t * h(&t) + fd_spherical_gradient(&h, &t, 1e-6))
        }
    }
}

/// Unit icosphere: the icosahedron with every triangle split into four
/// `subdivisions` times, outward oriented.
pub fn icosphere(subdivisions: u32) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vector3<f64>> = [
        (-1.0, p, 0.0),
        (1.0, p, 0.0),
        (-1.0, -p, 0.0),
        (1.0, -p, 0.0),
        (0.0, -1.0, p),
        (0.0, 1.0, p),
        (0.0, -1.0, -p),
        (0.0, 1.0, -p),
        (p, 0.0, -1.0),
        (p, 0.0, 1.0),
        (-p, 0.0, -1.0),
        (-p, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, verts: &mut Vec<Vector3<f64>>| {
            let key = (i.min(j), i.max(j));
            *cache.entry(key).or_insert_with(|| {
                verts.push((verts[i] + verts[j]).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    (verts, tris)
}

/// Boundary mesh of a three-dimensional body.
pub fn generate_mesh(spec: &BodySpec, subdivisions: u32) -> Result<TriangleMesh> {
    if subdivisions > MAX_SUBDIVISIONS {
        return Err(Error::InvalidArgument(format!(
            "subdivisions must lie in 0..={MAX_SUBDIVISIONS}, got {subdivisions}"
        )));
    }
    if spec.ambient_dim != 3 {
        return Err(Error::UnsupportedBody(spec.to_string()));
    }
    let body = spec.body();
    let (dirs, tris) = icosphere(subdivisions);
    // One incident triangle per vertex, used as the nudge target.
    let mut incident = vec![usize::MAX; dirs.len()];
    for (k, tri) in tris.iter().enumerate() {
        for &v in tri {
            if incident[v] == usize::MAX {
                incident[v] = k;
            }
        }
    }
    let centroid = |tri: &[usize; 3]| (dirs[tri[0]] + dirs[tri[1]] + dirs[tri[2]]).normalize();
    let vertices = dirs
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            let mut t = *d;
            if body.piece_margin3(&t) < BOUNDARY_MARGIN {
                let c = centroid(&tris[incident[i]]);
                t = (t + (c - t).normalize() * NUDGE).normalize();
            }
            body.contact3(&t).map(|x| [x.x, x.y, x.z])
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = tris.iter().map(|tri| classify_case(&AbcPoint::from_vector(&centroid(tri)))).collect();
    Ok(TriangleMesh { vertices, triangles: tris, labels })
}

/// Checks that every edge is shared by exactly two triangles traversing
/// it in opposite directions.
pub fn check_watertight(mesh: &TriangleMesh) -> Result<()> {
    if mesh.labels.len() != mesh.triangles.len() {
        return Err(Error::InvalidArgument(format!(
            "{} labels for {} triangles",
            mesh.labels.len(),
            mesh.triangles.len()
        )));
    }
    if mesh.triangles.is_empty() {
        return Err(Error::NotWatertight("mesh has no triangles".into()));
    }
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (i, j) = (tri[k], tri[(k + 1) % 3]);
            if i >= mesh.vertices.len() || j >= mesh.vertices.len() {
                return Err(Error::InvalidArgument(format!("vertex index {} out of range", i.max(j))));
            }
            *directed.entry((i, j)).or_default() += 1;
        }
    }
    for (&(i, j), &count) in &directed {
        if count != 1 || directed.get(&(j, i)) != Some(&1) {
            return Err(Error::NotWatertight(format!(
                "edge ({i}, {j}) is not shared by exactly two consistently oriented triangles"
            )));
        }
    }
    Ok(())
}

/// Enclosed volume by signed tetrahedra against the origin.
pub fn mesh_volume(mesh: &TriangleMesh) -> Result<f64> {
    check_watertight(mesh)?;
    let v = |i: usize| Vector3::from(mesh.vertices[i]);
    Ok(mesh.triangles.iter().map(|&[a, b, c]| v(a).dot(&v(b).cross(&v(c)))).sum::<f64>() / 6.0)
}

/// Components with fewer triangles than this are counted as fragments.
pub const MIN_PATCH_TRIANGLES: usize = 4;

/// Edge-connected components of equally labeled triangles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchCensus {
    /// Components of at least [`MIN_PATCH_TRIANGLES`] triangles, by label.
    pub patches: BTreeMap<CaseRegion, usize>,
    /// Smaller components. They appear where a region narrows to a wedge
    /// at a junction of several regions and the grid cuts off its tip.
    pub fragments: usize,
}

impl PatchCensus {
    pub fn count(&self, region: CaseRegion) -> usize {
        self.patches.get(&region).copied().unwrap_or(0)
    }
}

pub fn patch_census(mesh: &TriangleMesh) -> PatchCensus {
    let n = mesh.triangles.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (k, tri) in mesh.triangles.iter().enumerate() {
        for e in 0..3 {
            let (i, j) = (tri[e], tri[(e + 1) % 3]);
            let key = (i.min(j), i.max(j));
            if let Some(&other) = by_edge.get(&key) {
                if mesh.labels[other] == mesh.labels[k] {
                    let (ra, rb) = (find(&mut parent, other), find(&mut parent, k));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            } else {
                by_edge.insert(key, k);
            }
        }
    }
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for k in 0..n {
        *sizes.entry(find(&mut parent, k)).or_insert(0) += 1;
    }
    let mut census = PatchCensus::default();
    for (root, size) in sizes {
        if size >= MIN_PATCH_TRIANGLES {
            *census.patches.entry(mesh.labels[root]).or_insert(0) += 1;
        } else {
            census.fragments += 1;
        }
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cube() -> TriangleMesh {
        let mut vertices = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    vertices.push([x, y, z]);
                }
            }
        }
        // Index = 4·[x>0] + 2·[y>0] + [z>0].
        let quads = [[0, 1, 3, 2], [4, 6, 7, 5], [0, 4, 5, 1], [2, 3, 7, 6], [0, 2, 6, 4], [1, 5, 7, 3]];
        let mut triangles = Vec::new();
        for q in quads {
            triangles.push([q[0], q[1], q[2]]);
            triangles.push([q[0], q[2], q[3]]);
        }
        let labels = vec![CaseRegion::I; triangles.len()];
        TriangleMesh { vertices, triangles, labels }
    }

    #[test]
    fn cube_volume_is_eight() {
        assert_eq!(mesh_volume(&cube()).unwrap(), 8.0);
    }

    #[test]
    fn open_mesh_is_rejected() {
        let mut m = cube();
        m.triangles.pop();
        m.labels.pop();
        assert!(matches!(mesh_volume(&m), Err(Error::NotWatertight(_))));
    }

    #[test]
    fn icosphere_counts() {
        for k in 0..4 {
            let (v, t) = icosphere(k);
            assert_eq!(t.len(), 20 * 4usize.pow(k));
            assert_eq!(v.len(), 10 * 4usize.pow(k) + 2);
        }
    }

    #[test]
    fn ball_mesh_volume() {
        let m = generate_mesh(&BodySpec::ball(3).unwrap(), 5).unwrap();
        let v = mesh_volume(&m).unwrap();
        assert!((v / (4.0 * std::f64::consts::PI / 3.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn case_iii_directions_share_the_vertex() {
        let vertex = Vector3::new(1.0, 0.0, FRAC_1_SQRT_2);
        for (a, b) in [(0.8, 0.0), (0.85, 0.1), (0.75, -0.2)] {
            let p = AbcPoint::from_ab(a, b).unwrap();
            assert_eq!(classify_case(&p), CaseRegion::III);
            let d = Direction::new(vec![p.a, p.b, p.c]).unwrap();
            let x = boundary_point(&BodySpec::u3(), &d, BoundaryMode::Analytic).unwrap();
            assert_abs_diff_eq!((x - vertex).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn analytic_mode_refuses_piece_boundaries() {
        let d = Direction::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            boundary_point(&BodySpec::u3(), &d, BoundaryMode::Analytic),
            Err(Error::OnPieceBoundary { .. })
        ));
        assert!(boundary_point(&BodySpec::u3(), &d, BoundaryMode::FiniteDifference).is_ok());
    }

    #[test]
    fn ball_boundary_is_the_direction() {
        let d = Direction::normalized(vec![1.0, 2.0, -2.0]).unwrap();
        let x = boundary_point(&BodySpec::ball(3).unwrap(), &d, BoundaryMode::Analytic).unwrap();
        assert_abs_diff_eq!((x - Vector3::from_column_slice(d.coords())).norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn subdivision_cap() {
        assert!(generate_mesh(&BodySpec::u3(), 9).is_err());
    }
}
