//! Fundamental group presentations from dual skeletons.
//!
//! For the manifold, nodes of the dual skeleton are tetrahedra and dual
//! edges are glued face pairs. Collapsing a breadth-first spanning tree
//! leaves one generator per non-tree dual edge, and one relator per edge
//! class of the triangulation, read off by walking once around the edge
//! and recording every face crossing. A cusped manifold deformation
//! retracts onto this dual spine, so the presentation is a genuine
//! presentation of its fundamental group.
//!
//! For a normal surface the same construction applies to its disk
//! complex: nodes are disks, dual edges are glued arc pairs, and relators
//! are the loops around surface vertices (corner classes). Each arc
//! crossing also crosses a face of the ambient triangulation, which gives
//! the induced map into the manifold group: a surface generator maps to
//! the sequence of manifold face crossings along tree-path, crossing,
//! reverse tree-path.

use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

use crate::normalsurface::SurfaceComplex;
use crate::scalar::Real;
use crate::triangulation::{IdealTriangulation, EDGE_ENDPOINTS};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("presentation simplification stalled after {passes} passes")]
    SimplificationStalled { passes: usize },
    #[error("edge walk around class {class} did not close")]
    EdgeWalkBroken { class: usize },
}

/// A finite presentation; letters in relators are +-(index+1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

fn free_reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &x in word {
        if out.last().is_some_and(|&y| y == -x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn cyclic_reduce(mut word: Vec<i32>) -> Vec<i32> {
    word = free_reduce(&word);
    while word.len() >= 2 && word.first().copied() == word.last().map(|&x| -x) {
        word.remove(0);
        word.pop();
        word = free_reduce(&word);
    }
    word
}

impl Presentation {
    /// Euler characteristic of the presentation 2-complex
    /// (one 0-cell, one 1-cell per generator, one 2-cell per relator).
    pub fn complex_euler_characteristic(&self) -> i64 {
        1 - self.generators as i64 + self.relators.len() as i64
    }

    /// Tietze simplification. Repeatedly: free- and cyclically reduce,
    /// drop empty relators, then pick a (relator, generator) pair where
    /// the generator occurs exactly once in that relator, solve for it,
    /// and substitute everywhere else, removing one generator and one
    /// relator. The pair minimizing substitution growth is chosen each
    /// round. This preserves the group and the presentation complex Euler
    /// characteristic. Fails loudly if the total letter count explodes.
    pub fn simplified(&self) -> Result<Presentation, GroupError> {
        const MAX_LETTERS: usize = 1 << 16;
        let mut gens = self.generators;
        let mut relators: Vec<Vec<i32>> = self
            .relators
            .iter()
            .map(|w| cyclic_reduce(w.clone()))
            .filter(|w| !w.is_empty())
            .collect();
        let mut passes = 0usize;
        loop {
            passes += 1;
            // occurrences per generator per relator
            let mut total = vec![0usize; gens + 1];
            for w in &relators {
                for &x in w {
                    total[x.unsigned_abs() as usize] += 1;
                }
            }
            // Candidate eliminations: generator g occurring once in
            // relator r. Cost: letters added elsewhere by substitution.
            let mut best: Option<(usize, usize, usize)> = None; // (cost, r, g)
            for (ri, w) in relators.iter().enumerate() {
                let mut in_this = vec![0usize; gens + 1];
                for &x in w {
                    in_this[x.unsigned_abs() as usize] += 1;
                }
                for g in 1..=gens {
                    if in_this[g] == 1 {
                        let cost = (w.len() - 1) * (total[g] - 1);
                        if best.map_or(true, |(c, _, _)| cost < c) {
                            best = Some((cost, ri, g));
                        }
                    }
                }
            }
            let Some((_, ri, g)) = best else {
                return Ok(Presentation {
                    generators: gens,
                    relators,
                });
            };
            // Solve relator ri for g: with w = u x v and x = +-g,
            // x = u^-1 v^-1, so g = u^-1 v^-1 or g = v u.
            let w = relators.remove(ri);
            let pos = w
                .iter()
                .position(|&x| x.unsigned_abs() as usize == g)
                .unwrap();
            let (u, rest) = w.split_at(pos);
            let (x, v) = (rest[0], &rest[1..]);
            let inv = |s: &[i32]| -> Vec<i32> { s.iter().rev().map(|&y| -y).collect() };
            let expr: Vec<i32> = if x > 0 {
                let mut e = inv(u);
                e.extend(inv(v));
                e
            } else {
                let mut e = v.to_vec();
                e.extend_from_slice(u);
                e
            };
            relators = relators
                .into_iter()
                .map(|word| {
                    let mut out = Vec::with_capacity(word.len() + expr.len());
                    for y in word {
                        if y.unsigned_abs() as usize == g {
                            if y > 0 {
                                out.extend_from_slice(&expr);
                            } else {
                                out.extend(inv(&expr));
                            }
                        } else {
                            out.push(y);
                        }
                    }
                    cyclic_reduce(out)
                })
                .filter(|word| !word.is_empty())
                .collect();
            // Renumber generators above g downward.
            for word in relators.iter_mut() {
                for y in word.iter_mut() {
                    if y.unsigned_abs() as usize > g {
                        *y -= y.signum();
                    }
                }
            }
            gens -= 1;
            let letters: usize = relators.iter().map(|w| w.len()).sum();
            if letters > MAX_LETTERS {
                return Err(GroupError::SimplificationStalled { passes });
            }
        }
    }
}

/// One dual edge of the manifold skeleton: a glued face pair, stored with
/// the lexicographically smaller (tet, face) side first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualEdge {
    pub a: (usize, usize),
    pub b: (usize, usize),
}

/// Dual skeleton with spanning tree and generator labels.
#[derive(Clone, Debug)]
pub struct ManifoldSkeleton {
    pub num_tetrahedra: usize,
    pub edges: Vec<DualEdge>,
    /// Dual edge index for each (tet, face).
    edge_of_face: BTreeMap<(usize, usize), usize>,
    pub is_tree_edge: Vec<bool>,
    /// Dense generator index per non-tree edge.
    pub generator_of_edge: Vec<Option<usize>>,
    pub generator_count: usize,
    /// BFS discovery order; parent[tet] = dual edge into the tree, except
    /// at the root.
    pub bfs_order: Vec<usize>,
    pub parent_edge: Vec<Option<usize>>,
}

impl ManifoldSkeleton {
    pub fn edge_at(&self, tet: usize, face: usize) -> usize {
        self.edge_of_face[&(tet, face)]
    }

    /// Letter for crossing face `face` of `tet` outward: generator index
    /// and sign (+1 when crossing from the canonical side), or None on a
    /// tree edge.
    pub fn letter(&self, tet: usize, face: usize) -> Option<(usize, i32)> {
        let e = self.edge_at(tet, face);
        let g = self.generator_of_edge[e]?;
        let sign = if self.edges[e].a == (tet, face) { 1 } else { -1 };
        Some((g, sign))
    }
}

pub fn manifold_skeleton<R: Real>(tri: &IdealTriangulation<R>) -> ManifoldSkeleton {
    let t = tri.num_tetrahedra();
    let mut edges = Vec::new();
    let mut edge_of_face = BTreeMap::new();
    for tet in 0..t {
        for face in 0..4 {
            let g = tri.gluing(tet, face);
            let other = (g.tet, g.perm.apply(face));
            if (tet, face) < other {
                let idx = edges.len();
                edges.push(DualEdge {
                    a: (tet, face),
                    b: other,
                });
                edge_of_face.insert((tet, face), idx);
                edge_of_face.insert(other, idx);
            }
        }
    }

    let mut is_tree_edge = vec![false; edges.len()];
    let mut parent_edge = vec![None; t];
    let mut seen = vec![false; t];
    let mut bfs_order = Vec::with_capacity(t);
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(tet) = queue.pop_front() {
        bfs_order.push(tet);
        for face in 0..4 {
            let g = tri.gluing(tet, face);
            if !seen[g.tet] {
                seen[g.tet] = true;
                let e = edge_of_face[&(tet, face)];
                is_tree_edge[e] = true;
                parent_edge[g.tet] = Some(e);
                queue.push_back(g.tet);
            }
        }
    }
    debug_assert!(seen.iter().all(|&s| s), "face gluings connect all tetrahedra");

    let mut generator_of_edge = vec![None; edges.len()];
    let mut generator_count = 0;
    for (e, tree) in is_tree_edge.iter().enumerate() {
        if !tree {
            generator_of_edge[e] = Some(generator_count);
            generator_count += 1;
        }
    }
    ManifoldSkeleton {
        num_tetrahedra: t,
        edges,
        edge_of_face,
        is_tree_edge,
        generator_of_edge,
        generator_count,
        bfs_order,
        parent_edge,
    }
}

/// One step of a walk around an edge class: leave `tet` through `face`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceCrossing {
    pub tet: usize,
    pub face: usize,
}

/// The manifold group data: skeleton, one crossing loop per edge class,
/// and the resulting presentation.
#[derive(Clone, Debug)]
pub struct ManifoldGroup {
    pub skeleton: ManifoldSkeleton,
    pub edge_loops: Vec<Vec<FaceCrossing>>,
    pub presentation: Presentation,
}

/// Walks once around each edge class and reads the crossings as relators.
pub fn manifold_group<R: Real>(
    tri: &IdealTriangulation<R>,
) -> Result<ManifoldGroup, GroupError> {
    let skeleton = manifold_skeleton(tri);
    let classes = tri.edge_classes();
    let mut edge_loops = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        let (t0, e0) = class.members[0];
        // Faces adjacent to an edge are the two faces not containing
        // either endpoint label.
        let faces_of = |edge: usize| -> [usize; 2] {
            let (a, b) = EDGE_ENDPOINTS[edge];
            let mut it = (0..4).filter(|&f| f != a && f != b);
            [it.next().unwrap(), it.next().unwrap()]
        };
        let start_exit = faces_of(e0)[0];
        let mut state = (t0, e0, start_exit);
        let mut steps = Vec::new();
        let cap = 24 * tri.num_tetrahedra() + 4;
        loop {
            let (tet, edge, exit) = state;
            steps.push(FaceCrossing { tet, face: exit });
            let g = tri.gluing(tet, exit);
            let (a, b) = EDGE_ENDPOINTS[edge];
            let edge_next =
                crate::triangulation::edge_index(g.perm.apply(a), g.perm.apply(b));
            let entry = g.perm.apply(exit);
            let [fa, fb] = faces_of(edge_next);
            let exit_next = if fa == entry { fb } else { fa };
            state = (g.tet, edge_next, exit_next);
            if state == (t0, e0, start_exit) {
                break;
            }
            if steps.len() > cap {
                return Err(GroupError::EdgeWalkBroken { class: ci });
            }
        }
        edge_loops.push(steps);
    }

    let relators = edge_loops
        .iter()
        .map(|steps| {
            steps
                .iter()
                .filter_map(|c| skeleton.letter(c.tet, c.face))
                .map(|(g, sign)| sign * (g as i32 + 1))
                .collect()
        })
        .collect();
    let presentation = Presentation {
        generators: skeleton.generator_count,
        relators,
    };
    Ok(ManifoldGroup {
        skeleton,
        edge_loops,
        presentation,
    })
}

/// Surface group data: presentation from the disk complex's dual skeleton,
/// plus, for every surface generator, the ambient face crossings of the
/// loop it represents (tree path out, one non-tree arc, tree path back).
#[derive(Clone, Debug)]
pub struct SurfaceGroup {
    pub presentation: Presentation,
    /// Arc gluing index represented by each generator.
    pub generator_gluings: Vec<usize>,
    /// Ambient (tet, face) crossings, in order, for each generator loop.
    pub generator_paths: Vec<Vec<FaceCrossing>>,
}

pub fn surface_group(complex: &SurfaceComplex) -> Result<SurfaceGroup, GroupError> {
    let n = complex.disks.len();
    // side_map: (disk, face) -> (gluing index, is_side_a)
    let mut side_map: BTreeMap<(usize, usize), (usize, bool)> = BTreeMap::new();
    for (i, g) in complex.gluings.iter().enumerate() {
        side_map.insert((g.a.disk, g.a.face), (i, true));
        side_map.insert((g.b.disk, g.b.face), (i, false));
    }

    // Spanning tree over disks via arc gluings, smallest gluing index first.
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, g) in complex.gluings.iter().enumerate() {
        adjacency[g.a.disk].push((i, g.b.disk));
        adjacency[g.b.disk].push((i, g.a.disk));
    }
    for adj in adjacency.iter_mut() {
        adj.sort_unstable();
    }
    let mut is_tree = vec![false; complex.gluings.len()];
    let mut parent: Vec<Option<usize>> = vec![None; n]; // gluing index up the tree
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(d) = queue.pop_front() {
        for &(gi, other) in &adjacency[d] {
            if !seen[other] {
                seen[other] = true;
                is_tree[gi] = true;
                parent[other] = Some(gi);
                queue.push_back(other);
            }
        }
    }
    // The complex must be connected for a single presentation.
    debug_assert!(seen.iter().all(|&s| s));

    let mut generator_of_gluing = vec![None; complex.gluings.len()];
    let mut generator_gluings = Vec::new();
    for (gi, tree) in is_tree.iter().enumerate() {
        if !tree {
            generator_of_gluing[gi] = Some(generator_gluings.len());
            generator_gluings.push(gi);
        }
    }

    // Relators: loops around corner classes. From a corner (disk, edge),
    // its two incident sides are the faces adjacent to that tetrahedron
    // edge which carry a side of the disk.
    let incident_faces = |disk: usize, edge: usize| -> Vec<usize> {
        let d = &complex.disks[disk];
        let (a, b) = EDGE_ENDPOINTS[edge];
        (0..4)
            .filter(|&f| f != a && f != b && d.cut_corner(f).is_some())
            .collect()
    };

    // One walk per corner class, from its smallest (disk, edge) slot,
    // exiting through the smaller incident face. The walk visits every
    // corner of the class once in one rotation sense.
    let mut class_start: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (di, disk) in complex.disks.iter().enumerate() {
        for edge in disk.corner_edges() {
            class_start
                .entry(complex.corner_class(di, edge))
                .or_insert((di, edge));
        }
    }
    let mut relators = Vec::new();
    for (&class, &(di, edge)) in &class_start {
        let start = (di, edge, incident_faces(di, edge)[0]);
        let mut state = start;
        let mut word = Vec::new();
        loop {
            let (d, e, f) = state;
            debug_assert_eq!(complex.corner_class(d, e), class);
            let (gi, is_a) = side_map[&(d, f)];
            if let Some(g) = generator_of_gluing[gi] {
                word.push(if is_a { g as i32 + 1 } else { -(g as i32 + 1) });
            }
            let gl = &complex.gluings[gi];
            let (to_disk, to_face) = if is_a {
                (gl.b.disk, gl.b.face)
            } else {
                (gl.a.disk, gl.a.face)
            };
            let to_edge = gl
                .corner_map
                .iter()
                .find_map(|&(ea, eb)| {
                    if is_a && ea == e {
                        Some(eb)
                    } else if !is_a && eb == e {
                        Some(ea)
                    } else {
                        None
                    }
                })
                .expect("arc endpoint present in corner map");
            let faces = incident_faces(to_disk, to_edge);
            let next_exit = if faces[0] == to_face { faces[1] } else { faces[0] };
            state = (to_disk, to_edge, next_exit);
            if state == start {
                break;
            }
            if word.len() > 4 * complex.gluings.len() + 4 {
                return Err(GroupError::EdgeWalkBroken { class });
            }
        }
        relators.push(word);
    }

    let presentation = Presentation {
        generators: generator_gluings.len(),
        relators,
    };

    // Generator loops as ambient face crossings: tree path to the arc's a
    // side, the arc itself, then the reverse tree path from the b side.
    let tree_path_to_root = |mut d: usize| -> Vec<(usize, bool)> {
        // (gluing index, crossed from b to a side?) going UP toward root
        let mut path = Vec::new();
        while let Some(gi) = parent[d] {
            let g = &complex.gluings[gi];
            let up_is_a = seen_parent_side(g, d);
            path.push((gi, up_is_a));
            d = if up_is_a { g.a.disk } else { g.b.disk };
        }
        path
    };
    fn seen_parent_side(g: &crate::normalsurface::ArcGluing, child: usize) -> bool {
        // returns true when the parent is on the a side
        if g.b.disk == child {
            true
        } else {
            debug_assert_eq!(g.a.disk, child);
            false
        }
    }

    let crossing_of = |gi: usize, from_a: bool| -> FaceCrossing {
        let g = &complex.gluings[gi];
        let (disk, face) = if from_a {
            (g.a.disk, g.a.face)
        } else {
            (g.b.disk, g.b.face)
        };
        FaceCrossing {
            tet: complex.disks[disk].tet,
            face,
        }
    };

    let mut generator_paths = Vec::new();
    for &gi in &generator_gluings {
        let g = &complex.gluings[gi];
        let mut path = Vec::new();
        // Root -> a-side disk: reverse of the up-walk, crossing downward.
        let up = tree_path_to_root(g.a.disk);
        for &(tgi, up_is_a) in up.iter().rev() {
            path.push(crossing_of(tgi, up_is_a));
        }
        // The generator arc itself, a -> b.
        path.push(crossing_of(gi, true));
        // b-side disk -> root, crossing upward.
        for &(tgi, up_is_a) in &tree_path_to_root(g.b.disk) {
            path.push(crossing_of(tgi, !up_is_a));
        }
        generator_paths.push(path);
    }

    Ok(SurfaceGroup {
        presentation,
        generator_gluings,
        generator_paths,
    })
}

/// Checks that a simplified presentation is the polygon identification of
/// a closed surface of the stated orientability: one relator using every
/// generator exactly twice, with opposite signs throughout exactly when
/// the surface is orientable, and all polygon corners identified to a
/// single vertex class by the side pairings.
pub fn polygon_check(p: &Presentation, orientable: bool) -> bool {
    if p.relators.len() != 1 || p.generators == 0 {
        return false;
    }
    let w = &p.relators[0];
    let n = w.len();
    if n != 2 * p.generators {
        return false;
    }
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); p.generators + 1];
    for (i, &x) in w.iter().enumerate() {
        let g = x.unsigned_abs() as usize;
        if g == 0 || g > p.generators {
            return false;
        }
        occurrences[g].push(i);
    }
    if occurrences[1..].iter().any(|occ| occ.len() != 2) {
        return false;
    }
    let all_opposite = occurrences[1..].iter().all(|occ| w[occ[0]] == -w[occ[1]]);
    if all_opposite != orientable {
        return false;
    }
    // Corner identification: corner i precedes side i around the polygon.
    // A pair glued with opposite signs matches head to tail; a same-sign
    // pair matches head to head.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for occ in &occurrences[1..] {
        let (i, j) = (occ[0], occ[1]);
        if w[i] == -w[j] {
            union(&mut parent, i, (j + 1) % n);
            union(&mut parent, (i + 1) % n, j);
        } else {
            union(&mut parent, i, j);
            union(&mut parent, (i + 1) % n, (j + 1) % n);
        }
    }
    let root = find(&mut parent, 0);
    (1..n).all(|i| find(&mut parent, i) == root)
}
