//! Closed surfaces from the group orbit of a fundamental disk.
//!
//! Every group element carries the disk to one piece of the surface. Pieces
//! meet along the fixed geodesic edges, where their boundary vertices
//! coincide; welding identifies those vertices and the topology of the
//! result is read off from the combinatorics.

use std::collections::HashMap;

use log::debug;
use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::spatial::PointGrid;
use crate::sphere::{normalize, Point4};
use crate::symmetry::Group;

/// A welded triangle mesh together with its topological type.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedMesh {
    mesh: TriMesh,
    closed: bool,
    orientable: bool,
    component_count: usize,
}

impl ClosedMesh {
    /// Analyze `mesh`. If it is orientable, its triangles are rewound so that
    /// adjacent triangles induce opposite directions on their shared edge.
    pub fn from_mesh(mesh: TriMesh) -> Result<Self> {
        let closed = mesh.edge_incidence().iter().all(|&(_, n)| n == 2);
        let (triangles, orientable) = orient(&mesh);
        let component_count = components(&mesh);
        let mesh = if orientable {
            TriMesh::with_boundary_flags(
                mesh.vertices().to_vec(),
                triangles,
                mesh.boundary_flags().to_vec(),
            )?
        } else {
            mesh
        };
        Ok(ClosedMesh {
            mesh,
            closed,
            orientable,
            component_count,
        })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn into_mesh(self) -> TriMesh {
        self.mesh
    }

    /// Every edge has exactly two incident triangles.
    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn orientable(&self) -> bool {
        self.orientable
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn euler_characteristic(&self) -> i64 {
        euler_characteristic(self)
    }

    pub fn genus(&self) -> Result<i64> {
        genus(self)
    }
}

/// One copy of `disk` per group element.
///
/// Copies whose word has odd length are rewound: a halfturn fixes the shared
/// edge pointwise, so the reflected copy would otherwise traverse it in the
/// same direction as the original.
pub fn orbit_mesh(group: &Group, disk: &TriMesh) -> Vec<TriMesh> {
    group
        .elements()
        .iter()
        .zip(group.words())
        .map(|(g, word)| {
            let copy = disk.transformed(g);
            if word.len() % 2 == 1 {
                copy.flipped()
            } else {
                copy
            }
        })
        .collect()
}

/// Weld the copies and demand a closed result.
pub fn weld(copies: &[TriMesh], weld_tol: f64) -> Result<ClosedMesh> {
    let welded = weld_open(copies, weld_tol)?;
    if !welded.closed {
        let open_edges = welded
            .mesh
            .edge_incidence()
            .iter()
            .filter(|&&(_, n)| n != 2)
            .count();
        return Err(Error::NotClosed { open_edges });
    }
    Ok(welded)
}

/// Weld boundary vertices closer than `weld_tol`; the result may be open.
///
/// Interior vertices never merge. Each cluster is replaced by its normalized
/// centroid. A vertex whose merge candidates are spread farther than
/// `weld_tol / 10` apart is reported as ambiguous.
pub fn weld_open(copies: &[TriMesh], weld_tol: f64) -> Result<ClosedMesh> {
    let mut points = Vec::new();
    let mut on_boundary = Vec::new();
    let mut triangles = Vec::new();
    for copy in copies {
        let offset = points.len();
        points.extend_from_slice(copy.vertices());
        on_boundary.extend_from_slice(copy.boundary_flags());
        triangles.extend(copy.triangles().iter().map(|t| t.map(|v| v + offset)));
    }

    let mut sets = UnionFind::new(points.len());
    if weld_tol > 0.0 {
        let boundary: Vec<usize> = (0..points.len()).filter(|&i| on_boundary[i]).collect();
        let grid = PointGrid::with_subset(&points, weld_tol, boundary.iter().copied());
        for &i in &boundary {
            let candidates = grid.within(&points[i], weld_tol);
            for (x, &a) in candidates.iter().enumerate() {
                for &b in &candidates[x + 1..] {
                    let distance = points[a].distance(&points[b]);
                    if distance > weld_tol / 10.0 {
                        return Err(Error::WeldAmbiguous {
                            vertex: i,
                            distance,
                        });
                    }
                }
            }
            for &j in &candidates {
                sets.union(i, j);
            }
        }
    }

    let mut index = HashMap::new();
    let mut sums: Vec<(Vector4<f64>, bool)> = Vec::new();
    let mut remap = vec![0; points.len()];
    for i in 0..points.len() {
        let root = sets.find(i);
        let slot = *index.entry(root).or_insert_with(|| {
            sums.push((Vector4::zeros(), true));
            sums.len() - 1
        });
        sums[slot].0 += points[i].0;
        sums[slot].1 &= on_boundary[i];
        remap[i] = slot;
    }
    let vertices = sums
        .iter()
        .map(|(sum, _)| normalize(*sum))
        .collect::<Result<Vec<Point4>>>()?;
    let triangles: Vec<[usize; 3]> = triangles.iter().map(|t| t.map(|v| remap[v])).collect();
    debug!(
        "welded {} vertices into {}",
        points.len(),
        vertices.len()
    );

    let draft = TriMesh::new(vertices.clone(), triangles.clone())?;
    let mut flags = vec![false; vertices.len()];
    for ([a, b], n) in draft.edge_incidence() {
        if n != 2 {
            flags[a] = true;
            flags[b] = true;
        }
    }
    ClosedMesh::from_mesh(TriMesh::with_boundary_flags(vertices, triangles, flags)?)
}

/// `V − E + F` of the welded complex.
pub fn euler_characteristic(mesh: &ClosedMesh) -> i64 {
    mesh.mesh.euler_characteristic()
}

/// `(2 − χ) / 2` for a closed, orientable, connected mesh.
pub fn genus(mesh: &ClosedMesh) -> Result<i64> {
    if !mesh.closed {
        let open_edges = mesh
            .mesh
            .edge_incidence()
            .iter()
            .filter(|&&(_, n)| n != 2)
            .count();
        return Err(Error::NotClosed { open_edges });
    }
    if !mesh.orientable {
        return Err(Error::NotOrientable);
    }
    if mesh.component_count != 1 {
        return Err(Error::Disconnected {
            components: mesh.component_count,
        });
    }
    let chi = euler_characteristic(mesh);
    if chi % 2 != 0 {
        return Err(Error::OddEuler { chi });
    }
    Ok((2 - chi) / 2)
}

/// Breadth-first propagation of triangle winding across manifold edges.
///
/// Returns the rewound triangles and whether no parity conflict occurred.
/// Edges with more than two triangles make the mesh non-orientable.
fn orient(mesh: &TriMesh) -> (Vec<[usize; 3]>, bool) {
    let tris = mesh.triangles();
    let mut by_edge: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for e in 0..3 {
            let (a, b) = (tri[e], tri[(e + 1) % 3]);
            by_edge.entry([a.min(b), a.max(b)]).or_default().push(t);
        }
    }
    if by_edge.values().any(|ts| ts.len() > 2) {
        return (tris.to_vec(), false);
    }
    // flip[t] is None until visited, then whether triangle t gets rewound.
    let mut flip: Vec<Option<bool>> = vec![None; tris.len()];
    let mut queue = std::collections::VecDeque::new();
    let directed = |tri: [usize; 3], flipped: bool, a: usize, b: usize| -> bool {
        // true if the (possibly flipped) triangle traverses a -> b
        let forward = (0..3).any(|e| tri[e] == a && tri[(e + 1) % 3] == b);
        forward != flipped
    };
    for start in 0..tris.len() {
        if flip[start].is_some() {
            continue;
        }
        flip[start] = Some(false);
        queue.push_back(start);
        while let Some(t) = queue.pop_front() {
            let tri = tris[t];
            let ft = flip[t].unwrap_or(false);
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                for &u in &by_edge[&[a.min(b), a.max(b)]] {
                    if u == t {
                        continue;
                    }
                    let t_forward = directed(tri, ft, a, b);
                    // the neighbour must traverse the edge the other way
                    let u_forward_unflipped = directed(tris[u], false, a, b);
                    let want = u_forward_unflipped == t_forward;
                    match flip[u] {
                        None => {
                            flip[u] = Some(want);
                            queue.push_back(u);
                        }
                        Some(f) if f != want => return (tris.to_vec(), false),
                        Some(_) => {}
                    }
                }
            }
        }
    }
    let out = tris
        .iter()
        .zip(&flip)
        .map(|(&[a, b, c], f)| if f == &Some(true) { [a, c, b] } else { [a, b, c] })
        .collect();
    (out, true)
}

/// Connected components of the triangles, joined through shared vertices.
fn components(mesh: &TriMesh) -> usize {
    let mut sets = UnionFind::new(mesh.vertex_count());
    let mut used = vec![false; mesh.vertex_count()];
    for &[a, b, c] in mesh.triangles() {
        sets.union(a, b);
        sets.union(b, c);
        used[a] = true;
        used[b] = true;
        used[c] = true;
    }
    let mut roots: Vec<usize> = (0..mesh.vertex_count())
        .filter(|&v| used[v])
        .map(|v| sets.find(v))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, so cluster ids do not depend on visit order
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}
