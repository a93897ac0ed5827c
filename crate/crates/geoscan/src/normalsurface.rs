//! Normal surfaces in ideal triangulations.
//!
//! A normal surface meets each tetrahedron in triangles (one type per
//! vertex, cutting off that corner) and quadrilaterals (one type per way of
//! separating the four vertices into two pairs). A surface is recorded as a
//! vector of 7 counts per tetrahedron: [tri0, tri1, tri2, tri3, q0, q1, q2]
//! with quad kinds 0 = {01}|{23}, 1 = {02}|{13}, 2 = {03}|{12}.
//!
//! On a face, each disk leaves an arc cutting off one corner; gluing faces
//! must match arc counts corner by corner (the matching equations), and an
//! embedded surface allows at most one nonzero quad kind per tetrahedron
//! (admissibility). From a vector satisfying both, the disk complex is
//! reconstructed by stacking parallel copies in distance order from each
//! corner, which pins down exactly which disk glues to which across every
//! face; Euler characteristic, connectedness, and orientability follow.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::scalar::Real;
use crate::triangulation::{edge_index, IdealTriangulation};

/// Vertex partition of each quad kind: (zero side, other side), where the
/// zero side is the pair containing vertex 0.
pub const QUAD_PARTITIONS: [([usize; 2], [usize; 2]); 3] =
    [([0, 1], [2, 3]), ([0, 2], [1, 3]), ([0, 3], [1, 2])];

/// Quad kind whose partition puts `a` and `b` on the same side.
pub fn quad_kind_of_pair(a: usize, b: usize) -> usize {
    debug_assert!(a != b && a < 4 && b < 4);
    for (k, (lo, hi)) in QUAD_PARTITIONS.iter().enumerate() {
        if (lo.contains(&a) && lo.contains(&b)) || (hi.contains(&a) && hi.contains(&b)) {
            return k;
        }
    }
    unreachable!("every vertex pair lies on one side of one partition")
}

/// The vertex paired with `v` by quad kind `k`.
pub fn quad_partner(k: usize, v: usize) -> usize {
    let (lo, hi) = QUAD_PARTITIONS[k];
    for side in [lo, hi] {
        if side[0] == v {
            return side[1];
        }
        if side[1] == v {
            return side[0];
        }
    }
    unreachable!("vertex out of range")
}

/// Is `v` on the side of partition `k` containing vertex 0?
pub fn on_zero_side(k: usize, v: usize) -> bool {
    QUAD_PARTITIONS[k].0.contains(&v)
}

/// Normal coordinate vector: 7 entries per tetrahedron.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalVector {
    pub coords: Vec<i64>,
}

impl fmt::Debug for NormalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (tet, chunk) in self.coords.chunks(7).enumerate() {
            if tet > 0 {
                write!(f, "; ")?;
            }
            write!(
                f,
                "{},{},{},{}|{},{},{}",
                chunk[0], chunk[1], chunk[2], chunk[3], chunk[4], chunk[5], chunk[6]
            )?;
        }
        write!(f, "]")
    }
}

impl NormalVector {
    pub fn zero(num_tetrahedra: usize) -> Self {
        NormalVector {
            coords: vec![0; 7 * num_tetrahedra],
        }
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.coords.len() / 7
    }

    pub fn tri(&self, tet: usize, v: usize) -> i64 {
        self.coords[7 * tet + v]
    }

    pub fn quad(&self, tet: usize, k: usize) -> i64 {
        self.coords[7 * tet + 4 + k]
    }

    pub fn set_tri(&mut self, tet: usize, v: usize, n: i64) {
        self.coords[7 * tet + v] = n;
    }

    pub fn set_quad(&mut self, tet: usize, k: usize, n: i64) {
        self.coords[7 * tet + 4 + k] = n;
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        NormalVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, n: i64) -> Self {
        NormalVector {
            coords: self.coords.iter().map(|c| c * n).collect(),
        }
    }

    /// Divides by the gcd of the entries (no-op on the zero vector).
    pub fn primitive(&self) -> Self {
        let mut g: i64 = 0;
        for &c in &self.coords {
            g = num_integer::gcd(g, c);
        }
        if g <= 1 {
            return self.clone();
        }
        NormalVector {
            coords: self.coords.iter().map(|c| c / g).collect(),
        }
    }

    /// True when every entry is even.
    pub fn is_even(&self) -> bool {
        self.coords.iter().all(|&c| c % 2 == 0)
    }

    pub fn half(&self) -> Self {
        debug_assert!(self.is_even());
        NormalVector {
            coords: self.coords.iter().map(|c| c / 2).collect(),
        }
    }

    /// Arc count of corner `v` on face `f` of `tet`: triangles at that
    /// corner plus the quads separating v from f.
    pub fn arcs(&self, tet: usize, f: usize, v: usize) -> i64 {
        debug_assert!(f != v);
        self.tri(tet, v) + self.quad(tet, quad_kind_of_pair(v, f))
    }

    /// No quads anywhere: a union of vertex-linking components.
    pub fn is_vertex_linking(&self) -> bool {
        (0..self.num_tetrahedra()).all(|t| (0..3).all(|k| self.quad(t, k) == 0))
    }

    /// At most one quad kind per tetrahedron is nonzero.
    pub fn is_quad_compatible(&self) -> bool {
        (0..self.num_tetrahedra())
            .all(|t| (0..3).filter(|&k| self.quad(t, k) != 0).count() <= 1)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0)
    }
}

#[derive(Debug, Error)]
pub enum NormalSurfaceError {
    #[error("coordinate vector has length {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("coordinate {index} is negative")]
    NegativeCoordinate { index: usize },
    #[error("tetrahedron {tet} has two different quad kinds; the surface would self-intersect")]
    QuadConflict { tet: usize },
    #[error(
        "matching fails across face {face} of tetrahedron {tet} at corner {corner}: {left} vs {right} arcs"
    )]
    MatchingFailed {
        tet: usize,
        face: usize,
        corner: usize,
        left: i64,
        right: i64,
    },
}

/// One normal disk: a triangle type (cut vertex) or quad kind, plus which
/// parallel copy it is. Triangle copy 0 is nearest its vertex; quad copy 0
/// is nearest the partition edge on the side containing vertex 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiskKind {
    Tri(usize),
    Quad(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Disk {
    pub tet: usize,
    pub kind: DiskKind,
    pub copy: usize,
}

impl Disk {
    /// Corner cut off by this disk's arc on face `f`, or None when the disk
    /// has no side on that face (triangles miss their own vertex's face).
    pub fn cut_corner(&self, f: usize) -> Option<usize> {
        match self.kind {
            DiskKind::Tri(v) => {
                if f == v {
                    None
                } else {
                    Some(v)
                }
            }
            DiskKind::Quad(k) => Some(quad_partner(k, f)),
        }
    }

    /// Tetrahedron edges holding this disk's corners.
    pub fn corner_edges(&self) -> Vec<usize> {
        match self.kind {
            DiskKind::Tri(v) => (0..4).filter(|&w| w != v).map(|w| edge_index(v, w)).collect(),
            DiskKind::Quad(k) => {
                let (lo, hi) = QUAD_PARTITIONS[k];
                let mut edges: Vec<usize> = lo
                    .iter()
                    .flat_map(|&a| hi.iter().map(move |&b| edge_index(a, b)))
                    .collect();
                edges.sort_unstable();
                edges
            }
        }
    }
}

/// A disk side: the arc of disk `disk` on face `face` of its tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ArcRef {
    pub disk: usize,
    pub face: usize,
}

/// Two identified arcs, with the identification of their endpoints: entry
/// (edge_a, edge_b) says the corner of disk a on tetrahedron edge `edge_a`
/// is glued to the corner of disk b on `edge_b`.
#[derive(Clone, Debug)]
pub struct ArcGluing {
    pub a: ArcRef,
    pub b: ArcRef,
    pub corner_map: [(usize, usize); 2],
}

/// The reconstructed disk complex of a normal surface.
#[derive(Clone, Debug)]
pub struct SurfaceComplex {
    pub disks: Vec<Disk>,
    pub gluings: Vec<ArcGluing>,
    /// Surface vertex id for each (disk, tet-edge) corner slot.
    corner_class: BTreeMap<(usize, usize), usize>,
    pub vertex_count: usize,
    /// Connected component id per disk.
    component: Vec<usize>,
    pub component_count: usize,
    orientable: bool,
}

impl SurfaceComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.gluings.len() as i64 + self.disks.len() as i64
    }

    pub fn is_connected(&self) -> bool {
        self.component_count == 1
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn corner_class(&self, disk: usize, edge: usize) -> usize {
        self.corner_class[&(disk, edge)]
    }

    pub fn component_of(&self, disk: usize) -> usize {
        self.component[disk]
    }

    /// Closed-surface name from Euler characteristic and orientability:
    /// genus g orientable (chi = 2 - 2g) or cross-cap number k (chi = 2 - k).
    pub fn describe(&self) -> String {
        if !self.is_connected() {
            return format!(
                "{} components, total Euler characteristic {}",
                self.component_count,
                self.euler_characteristic()
            );
        }
        let chi = self.euler_characteristic();
        if self.orientable {
            format!("orientable, genus {}", (2 - chi) / 2)
        } else {
            format!("non-orientable, {} cross-caps", 2 - chi)
        }
    }
}

/// Verifies the matching equations for `vec` on `tri`.
pub fn satisfies_matching<R: Real>(tri: &IdealTriangulation<R>, vec: &NormalVector) -> bool {
    check_matching(tri, vec).is_ok()
}

fn check_matching<R: Real>(
    tri: &IdealTriangulation<R>,
    vec: &NormalVector,
) -> Result<(), NormalSurfaceError> {
    for tet in 0..tri.num_tetrahedra() {
        for face in 0..4 {
            let g = tri.gluing(tet, face);
            let far_face = g.perm.apply(face);
            for v in 0..4 {
                if v == face {
                    continue;
                }
                let left = vec.arcs(tet, face, v);
                let right = vec.arcs(g.tet, far_face, g.perm.apply(v));
                if left != right {
                    return Err(NormalSurfaceError::MatchingFailed {
                        tet,
                        face,
                        corner: v,
                        left,
                        right,
                    });
                }
            }
        }
    }
    Ok(())
}

/// The matching equations as integer rows over the 7t coordinates
/// (left side minus right side of each face-corner constraint, one
/// canonical row per glued face pair and corner).
pub fn matching_equations<R: Real>(tri: &IdealTriangulation<R>) -> Vec<Vec<i64>> {
    let t = tri.num_tetrahedra();
    let mut rows = Vec::new();
    for tet in 0..t {
        for face in 0..4 {
            let g = tri.gluing(tet, face);
            let far_face = g.perm.apply(face);
            // Each face pair once.
            if (g.tet, far_face) < (tet, face) {
                continue;
            }
            for v in 0..4 {
                if v == face {
                    continue;
                }
                let mut row = vec![0i64; 7 * t];
                row[7 * tet + v] += 1;
                row[7 * tet + 4 + quad_kind_of_pair(v, face)] += 1;
                let w = g.perm.apply(v);
                row[7 * g.tet + w] -= 1;
                row[7 * g.tet + 4 + quad_kind_of_pair(w, far_face)] -= 1;
                if row.iter().any(|&c| c != 0) {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Builds the disk complex of an admissible matching vector.
pub fn build_surface<R: Real>(
    tri: &IdealTriangulation<R>,
    vec: &NormalVector,
) -> Result<SurfaceComplex, NormalSurfaceError> {
    let t = tri.num_tetrahedra();
    if vec.coords.len() != 7 * t {
        return Err(NormalSurfaceError::WrongLength {
            got: vec.coords.len(),
            expected: 7 * t,
        });
    }
    if let Some(index) = vec.coords.iter().position(|&c| c < 0) {
        return Err(NormalSurfaceError::NegativeCoordinate { index });
    }
    for tet in 0..t {
        if (0..3).filter(|&k| vec.quad(tet, k) != 0).count() > 1 {
            return Err(NormalSurfaceError::QuadConflict { tet });
        }
    }
    check_matching(tri, vec)?;

    // Instantiate disks in a deterministic order.
    let mut disks = Vec::new();
    let mut disk_id: BTreeMap<(usize, DiskKind, usize), usize> = BTreeMap::new();
    for tet in 0..t {
        for v in 0..4 {
            for copy in 0..vec.tri(tet, v) as usize {
                disk_id.insert((tet, DiskKind::Tri(v), copy), disks.len());
                disks.push(Disk {
                    tet,
                    kind: DiskKind::Tri(v),
                    copy,
                });
            }
        }
        for k in 0..3 {
            for copy in 0..vec.quad(tet, k) as usize {
                disk_id.insert((tet, DiskKind::Quad(k), copy), disks.len());
                disks.push(Disk {
                    tet,
                    kind: DiskKind::Quad(k),
                    copy,
                });
            }
        }
    }

    // Ordered arc stack for a face corner: disk ids by distance from the
    // corner. Triangle copies come first (copy 0 innermost); then the quad
    // stack, ascending when the corner is on the quad's zero side and
    // descending otherwise.
    let arcs_at = |tet: usize, face: usize, v: usize| -> Vec<usize> {
        let mut out = Vec::new();
        for copy in 0..vec.tri(tet, v) as usize {
            out.push(disk_id[&(tet, DiskKind::Tri(v), copy)]);
        }
        let k = quad_kind_of_pair(v, face);
        let q = vec.quad(tet, k) as usize;
        if on_zero_side(k, v) {
            for copy in 0..q {
                out.push(disk_id[&(tet, DiskKind::Quad(k), copy)]);
            }
        } else {
            for copy in (0..q).rev() {
                out.push(disk_id[&(tet, DiskKind::Quad(k), copy)]);
            }
        }
        out
    };

    let mut gluings = Vec::new();
    for tet in 0..t {
        for face in 0..4 {
            let g = tri.gluing(tet, face);
            let far_face = g.perm.apply(face);
            if (g.tet, far_face) < (tet, face) {
                continue;
            }
            for v in 0..4 {
                if v == face {
                    continue;
                }
                let w = g.perm.apply(v);
                let here = arcs_at(tet, face, v);
                let there = arcs_at(g.tet, far_face, w);
                debug_assert_eq!(here.len(), there.len(), "matching verified above");
                // Endpoint edges: {v, x} for the two face vertices x != v.
                let ends: Vec<usize> = (0..4).filter(|&x| x != face && x != v).collect();
                for (&da, &db) in here.iter().zip(&there) {
                    let corner_map = [
                        (
                            edge_index(v, ends[0]),
                            edge_index(w, g.perm.apply(ends[0])),
                        ),
                        (
                            edge_index(v, ends[1]),
                            edge_index(w, g.perm.apply(ends[1])),
                        ),
                    ];
                    gluings.push(ArcGluing {
                        a: ArcRef { disk: da, face },
                        b: ArcRef {
                            disk: db,
                            face: far_face,
                        },
                        corner_map,
                    });
                }
            }
        }
    }

    // Surface vertices: union-find over (disk, corner edge) slots.
    let mut slots: Vec<(usize, usize)> = Vec::new();
    let mut slot_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (d, disk) in disks.iter().enumerate() {
        for e in disk.corner_edges() {
            slot_index.insert((d, e), slots.len());
            slots.push((d, e));
        }
    }
    let mut parent: Vec<usize> = (0..slots.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for gl in &gluings {
        for &(ea, eb) in &gl.corner_map {
            let sa = slot_index[&(gl.a.disk, ea)];
            let sb = slot_index[&(gl.b.disk, eb)];
            let (ra, rb) = (find(&mut parent, sa), find(&mut parent, sb));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
    }
    let mut class_rename: BTreeMap<usize, usize> = BTreeMap::new();
    let mut corner_class = BTreeMap::new();
    for (i, &(d, e)) in slots.iter().enumerate() {
        let root = find(&mut parent, i);
        let next = class_rename.len();
        let id = *class_rename.entry(root).or_insert(next);
        corner_class.insert((d, e), id);
    }
    let vertex_count = class_rename.len();

    // Components and orientability in one sweep: BFS assigning each disk a
    // transverse sign. Signs must satisfy o_a * s_a == o_b * s_b per glued
    // arc, where s says whether the disk's reference arrow points at the
    // cut corner on that face.
    let arrow_sign = |disk: &Disk, face: usize| -> i64 {
        match disk.kind {
            DiskKind::Tri(_) => 1,
            DiskKind::Quad(k) => {
                let v = quad_partner(k, face);
                if on_zero_side(k, v) {
                    1
                } else {
                    -1
                }
            }
        }
    };
    let mut adjacency: Vec<Vec<(usize, i64)>> = vec![Vec::new(); disks.len()];
    for gl in &gluings {
        let s = arrow_sign(&disks[gl.a.disk], gl.a.face) * arrow_sign(&disks[gl.b.disk], gl.b.face);
        adjacency[gl.a.disk].push((gl.b.disk, s));
        adjacency[gl.b.disk].push((gl.a.disk, s));
    }
    let mut component = vec![usize::MAX; disks.len()];
    let mut orient = vec![0i64; disks.len()];
    let mut component_count = 0;
    let mut orientable = true;
    for start in 0..disks.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let comp = component_count;
        component_count += 1;
        component[start] = comp;
        orient[start] = 1;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(d) = queue.pop_front() {
            for &(next, s) in &adjacency[d] {
                let want = orient[d] * s;
                if component[next] == usize::MAX {
                    component[next] = comp;
                    orient[next] = want;
                    queue.push_back(next);
                } else if orient[next] != want {
                    orientable = false;
                }
            }
        }
    }

    Ok(SurfaceComplex {
        disks,
        gluings,
        corner_class,
        vertex_count,
        component,
        component_count,
        orientable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{fig8, t1_twist};

    #[test]
    fn quad_partition_helpers() {
        assert_eq!(quad_kind_of_pair(0, 1), 0);
        assert_eq!(quad_kind_of_pair(2, 3), 0);
        assert_eq!(quad_kind_of_pair(0, 2), 1);
        assert_eq!(quad_kind_of_pair(1, 3), 1);
        assert_eq!(quad_kind_of_pair(0, 3), 2);
        assert_eq!(quad_kind_of_pair(1, 2), 2);
        assert_eq!(quad_partner(0, 0), 1);
        assert_eq!(quad_partner(0, 3), 2);
        assert_eq!(quad_partner(1, 1), 3);
        assert_eq!(quad_partner(2, 2), 1);
        assert!(on_zero_side(0, 1) && !on_zero_side(0, 2));
        assert!(on_zero_side(2, 3) && !on_zero_side(2, 1));
    }

    /// The vertex-linking vector (all triangles once, no quads).
    fn vertex_link(t: usize) -> NormalVector {
        let mut v = NormalVector::zero(t);
        for tet in 0..t {
            for c in 0..4 {
                v.set_tri(tet, c, 1);
            }
        }
        v
    }

    #[test]
    fn vertex_link_of_fig8_is_a_torus() {
        let tri = fig8();
        let v = vertex_link(2);
        assert!(v.is_vertex_linking());
        assert!(satisfies_matching(&tri, &v));
        let s = build_surface(&tri, &v).unwrap();
        assert_eq!(s.disks.len(), 8);
        assert_eq!(s.gluings.len(), 12);
        assert!(s.is_connected());
        assert!(s.is_orientable());
        assert_eq!(s.euler_characteristic(), 0);
        // Cross-check the vertex count against the cusp link machinery,
        // which derives corner classes by an entirely different route.
        let cusps = crate::cusp::cusp_links(&tri);
        assert_eq!(s.vertex_count, cusps[0].corner_classes);
    }

    #[test]
    fn vertex_link_of_t1_twist_has_two_components() {
        let tri = t1_twist();
        let v = vertex_link(1);
        let s = build_surface(&tri, &v).unwrap();
        assert_eq!(s.component_count, 2);
        assert!(!s.is_connected());
        // This synthetic fixture is not hyperbolic; its two vertex links
        // are spheres (3 corner classes, 3 edges, 2 triangles each).
        assert_eq!(s.euler_characteristic(), 4);
        assert!(s.is_orientable());
        assert_eq!(s.vertex_count, 6);
    }

    #[test]
    fn t1_twist_single_quad_is_a_torus() {
        let tri = t1_twist();
        let mut v = NormalVector::zero(1);
        v.set_quad(0, 0, 1);
        assert!(satisfies_matching(&tri, &v));
        let s = build_surface(&tri, &v).unwrap();
        assert_eq!(s.disks.len(), 1);
        assert_eq!(s.gluings.len(), 2);
        assert_eq!(s.vertex_count, 1);
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.is_connected());
        assert!(s.is_orientable());
        assert_eq!(s.describe(), "orientable, genus 1");
    }

    #[test]
    fn matching_violations_are_reported() {
        let tri = fig8();
        let mut v = NormalVector::zero(2);
        v.set_tri(0, 0, 1);
        assert!(!satisfies_matching(&tri, &v));
        let err = build_surface(&tri, &v).unwrap_err();
        assert!(matches!(err, NormalSurfaceError::MatchingFailed { .. }));
    }

    #[test]
    fn quad_conflicts_and_negatives_are_rejected() {
        let tri = t1_twist();
        let mut v = NormalVector::zero(1);
        v.set_quad(0, 0, 1);
        v.set_quad(0, 1, 1);
        assert!(matches!(
            build_surface(&tri, &v),
            Err(NormalSurfaceError::QuadConflict { tet: 0 })
        ));
        let mut v = NormalVector::zero(1);
        v.set_tri(0, 0, -1);
        assert!(matches!(
            build_surface(&tri, &v),
            Err(NormalSurfaceError::NegativeCoordinate { index: 0 })
        ));
        let v = NormalVector {
            coords: vec![0; 3],
        };
        assert!(matches!(
            build_surface(&tri, &v),
            Err(NormalSurfaceError::WrongLength { .. })
        ));
    }

    #[test]
    fn matching_equations_annihilate_valid_vectors() {
        let tri = fig8();
        let rows = matching_equations(&tri);
        assert!(!rows.is_empty());
        let v = vertex_link(2);
        for row in &rows {
            let dot: i64 = row.iter().zip(&v.coords).map(|(a, b)| a * b).sum();
            assert_eq!(dot, 0);
        }
        // And they reject the broken vector from the matching test.
        let mut bad = NormalVector::zero(2);
        bad.set_tri(0, 0, 1);
        assert!(rows
            .iter()
            .any(|row| row.iter().zip(&bad.coords).map(|(a, b)| a * b).sum::<i64>() != 0));
    }

    #[test]
    fn doubled_vector_doubles_the_complex() {
        let tri = t1_twist();
        let mut v = NormalVector::zero(1);
        v.set_quad(0, 0, 2);
        let s = build_surface(&tri, &v).unwrap();
        assert_eq!(s.disks.len(), 2);
        // Two parallel tori.
        assert_eq!(s.component_count, 2);
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.is_orientable());
    }

    #[test]
    fn primitive_and_parity_helpers() {
        let mut v = NormalVector::zero(1);
        v.set_tri(0, 1, 4);
        v.set_quad(0, 2, 6);
        let p = v.primitive();
        assert_eq!(p.tri(0, 1), 2);
        assert_eq!(p.quad(0, 2), 3);
        assert!(v.is_even());
        assert!(!p.is_even());
        assert_eq!(v.half().tri(0, 1), 2);
        assert_eq!(v.add(&v).scale(1), v.scale(2));
    }
}
