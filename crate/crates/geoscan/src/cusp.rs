//! Edge consistency and cusp completeness for ideal triangulations.
//!
//! Edge check: around every edge class the shape moduli must multiply to 1
//! with angles summing to 2 pi, i.e. the logs sum to 2 pi i.
//!
//! Cusp check: truncating each ideal vertex cuts a triangle out of every
//! incident tetrahedron corner; glued up, these link triangles tile the cusp
//! cross-section. Walking a closed loop in the dual graph of that tiling
//! multiplies one similarity-derivative factor per triangle passage: cutting
//! a corner keeps the left corner's modulus, inverts the right corner's, and
//! an immediate backtrack contributes -1. The cusp is complete exactly when
//! every loop's product is 1, so the report carries |log| of the product for
//! one loop per independent cycle of the dual graph (a BFS spanning tree's
//! non-tree edges). Loops around link vertices come out trivial whenever the
//! edge equations hold, so this residual set is complete.

use num_complex::Complex;
use std::collections::BTreeMap;

use crate::fundgroup::FaceCrossing;
use crate::scalar::Real;
use crate::triangulation::{edge_index, IdealTriangulation};

/// Counterclockwise corner cycle of the link triangle at vertex v, listing
/// the far endpoints w of the corner edges {v, w}. The order is chosen so
/// that the permutation (v, w0, w1, w2) of the vertex labels is odd, which
/// is what "counterclockwise seen from the ideal vertex" works out to for
/// positively oriented tetrahedra.
const LINK_CCW: [[usize; 3]; 4] = [[1, 3, 2], [0, 2, 3], [0, 3, 1], [0, 1, 2]];

/// One cusp of the manifold: the connected component of link triangles
/// (tet, vertex) at an identified ideal vertex.
#[derive(Clone, Debug)]
pub struct Cusp {
    /// Link triangles as (tet, vertex), ascending.
    pub triangles: Vec<(usize, usize)>,
    /// Independent dual-graph cycles, one per non-tree edge of the BFS tree.
    generators: Vec<Vec<Crossing>>,
    /// Link vertex count (corner classes), for the Euler characteristic.
    pub corner_classes: usize,
}

impl Cusp {
    pub fn euler_characteristic(&self) -> i64 {
        let f = self.triangles.len() as i64;
        let e = 3 * f / 2;
        self.corner_classes as i64 - e + f
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Peripheral loops as ambient face-crossing paths, one per dual cycle
    /// of the link, all based at the same link triangle. Pushing them
    /// through a holonomy representation gives the cusp subgroup matrices;
    /// on a torus link those must commute pairwise.
    pub fn generator_paths(&self) -> Vec<Vec<FaceCrossing>> {
        self.generators
            .iter()
            .map(|cycle| {
                cycle
                    .iter()
                    .map(|c| FaceCrossing {
                        tet: c.from.0,
                        face: c.f_from,
                    })
                    .collect()
            })
            .collect()
    }
}

/// A dual-graph step: leave triangle `from` through its side in face
/// `f_from`, entering triangle `to` through its side in face `f_to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Crossing {
    from: (usize, usize),
    f_from: usize,
    to: (usize, usize),
    f_to: usize,
}

/// Per-cusp completeness diagnostics.
#[derive(Clone, Debug)]
pub struct CuspReport {
    pub index: usize,
    pub link_triangles: usize,
    pub corner_classes: usize,
    pub euler_characteristic: i64,
    /// |log holonomy-derivative| per dual cycle; all ~0 iff complete.
    pub generator_residuals: Vec<f64>,
}

/// Combined edge-equation and cusp-completeness report.
#[derive(Clone, Debug)]
pub struct GluingReport {
    /// |sum of shape logs - 2 pi i| per edge class, in edge-class order.
    pub edge_residuals: Vec<f64>,
    pub cusps: Vec<CuspReport>,
    pub tolerance: f64,
}

impl GluingReport {
    pub fn edges_pass(&self) -> bool {
        self.edge_residuals.iter().all(|&r| r <= self.tolerance)
    }

    pub fn cusps_pass(&self) -> bool {
        self.cusps
            .iter()
            .flat_map(|c| &c.generator_residuals)
            .all(|&r| r <= self.tolerance)
    }

    pub fn passes(&self) -> bool {
        self.edges_pass() && self.cusps_pass()
    }

    pub fn max_edge_residual(&self) -> f64 {
        self.edge_residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_cusp_residual(&self) -> f64 {
        self.cusps
            .iter()
            .flat_map(|c| &c.generator_residuals)
            .cloned()
            .fold(0.0, f64::max)
    }
}

/// Builds the cusp links: connected components of the link-triangle dual
/// graph, each with a deterministic BFS tree and its non-tree cycles.
pub fn cusp_links<R: Real>(tri: &IdealTriangulation<R>) -> Vec<Cusp> {
    let t = tri.num_tetrahedra();
    let node_id = |(tet, v): (usize, usize)| 4 * tet + v;
    let neighbor = |node: (usize, usize), f: usize| -> ((usize, usize), usize) {
        let g = tri.gluing(node.0, f);
        ((g.tet, g.perm.apply(node.1)), g.perm.apply(f))
    };

    // Corner classes across the whole triangulation, then counted per cusp.
    let corner_class_of = corner_classes(tri);

    let mut visited = vec![false; 4 * t];
    let mut cusps = Vec::new();
    for start_tet in 0..t {
        for start_v in 0..4 {
            let start = (start_tet, start_v);
            if visited[node_id(start)] {
                continue;
            }
            // BFS with faces in ascending order for determinism.
            let mut parent: BTreeMap<(usize, usize), Crossing> = BTreeMap::new();
            let mut component = vec![start];
            let mut tree_arcs: Vec<((usize, usize), usize)> = Vec::new();
            visited[node_id(start)] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(node) = queue.pop_front() {
                for f in 0..4 {
                    if f == node.1 {
                        continue;
                    }
                    let (next, f_to) = neighbor(node, f);
                    if !visited[node_id(next)] {
                        visited[node_id(next)] = true;
                        parent.insert(
                            next,
                            Crossing {
                                from: node,
                                f_from: f,
                                to: next,
                                f_to,
                            },
                        );
                        tree_arcs.push((node, f));
                        tree_arcs.push((next, f_to));
                        component.push(next);
                        queue.push_back(next);
                    }
                }
            }
            component.sort_unstable();

            // Non-tree arcs, canonicalized so each dual edge appears once.
            let mut generators = Vec::new();
            for &node in &component {
                for f in 0..4 {
                    if f == node.1 {
                        continue;
                    }
                    if tree_arcs.contains(&(node, f)) {
                        continue;
                    }
                    let (other, f_other) = neighbor(node, f);
                    // Keep one orientation per non-tree edge.
                    if (node, f) > (other, f_other) {
                        continue;
                    }
                    let cross = Crossing {
                        from: node,
                        f_from: f,
                        to: other,
                        f_to: f_other,
                    };
                    generators.push(build_cycle(&parent, start, cross));
                }
            }

            let classes = &corner_class_of;
            let mut class_ids: Vec<usize> = component
                .iter()
                .flat_map(|&(tet, v)| {
                    (0..4)
                        .filter(move |&w| w != v)
                        .map(move |w| classes[corner_id(tet, v, w)])
                })
                .collect();
            class_ids.sort_unstable();
            class_ids.dedup();

            cusps.push(Cusp {
                triangles: component,
                generators,
                corner_classes: class_ids.len(),
            });
        }
    }
    cusps
}

fn corner_id(tet: usize, v: usize, w: usize) -> usize {
    16 * tet + 4 * v + w
}

/// Union-find over link-triangle corners (tet, v, w): the corner of link(v)
/// on edge {v, w}. Corners on a glued face are identified.
fn corner_classes<R: Real>(tri: &IdealTriangulation<R>) -> Vec<usize> {
    let t = tri.num_tetrahedra();
    let n = 16 * t;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for tet in 0..t {
        for f in 0..4 {
            let g = tri.gluing(tet, f);
            for v in 0..4 {
                if v == f {
                    continue;
                }
                for w in 0..4 {
                    if w == v || w == f {
                        continue;
                    }
                    let a = find(&mut parent, corner_id(tet, v, w));
                    let b = find(
                        &mut parent,
                        corner_id(g.tet, g.perm.apply(v), g.perm.apply(w)),
                    );
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi] = lo;
                    }
                }
            }
        }
    }
    (0..n).map(|x| find(&mut parent, x)).collect()
}

/// Closed dual cycle for a non-tree edge: root -> tail, cross, head -> root.
fn build_cycle(
    parent: &BTreeMap<(usize, usize), Crossing>,
    root: (usize, usize),
    cross: Crossing,
) -> Vec<Crossing> {
    let path_from_root = |mut node: (usize, usize)| -> Vec<Crossing> {
        let mut down = Vec::new();
        while node != root {
            let c = parent[&node];
            down.push(c);
            node = c.from;
        }
        down.reverse();
        down
    };
    let mut cycle = path_from_root(cross.from);
    cycle.push(cross);
    let mut back: Vec<Crossing> = path_from_root(cross.to)
        .into_iter()
        .rev()
        .map(|c| Crossing {
            from: c.to,
            f_from: c.f_to,
            to: c.from,
            f_to: c.f_from,
        })
        .collect();
    cycle.append(&mut back);
    cycle
}

/// Similarity derivative picked up when a path crosses a link triangle,
/// entering through the side in face `f_in` and leaving through `f_out`.
fn passage_factor<R: Real>(
    tri: &IdealTriangulation<R>,
    node: (usize, usize),
    f_in: usize,
    f_out: usize,
) -> Complex<R> {
    if f_in == f_out {
        return Complex::new(-R::one(), R::zero());
    }
    let (tet, v) = node;
    let cut = 6 - v - f_in - f_out;
    let zeta = tri.edge_shape(tet, edge_index(v, cut));
    let cycle = LINK_CCW[v];
    let pos = |f: usize| cycle.iter().position(|&w| w == f).expect("side label");
    let (i, o) = (pos(f_in), pos(f_out));
    if o == (i + 1) % 3 {
        // Cut corner on the right of the directed path.
        zeta.finv()
    } else {
        debug_assert_eq!(o, (i + 2) % 3);
        zeta
    }
}

/// Holonomy derivative around one closed dual cycle.
fn cycle_derivative<R: Real>(tri: &IdealTriangulation<R>, cycle: &[Crossing]) -> Complex<R> {
    let k = cycle.len();
    let mut acc = Complex::new(R::one(), R::zero());
    for j in 0..k {
        let node = cycle[j].to;
        let f_in = cycle[j].f_to;
        let f_out = cycle[(j + 1) % k].f_from;
        debug_assert_eq!(cycle[(j + 1) % k].from, node);
        acc = acc * passage_factor(tri, node, f_in, f_out);
    }
    acc
}

fn log_residual_to_one<R: Real>(value: Complex<R>) -> f64 {
    // |Log value| with the principal branch; zero iff value == 1.
    let ln = value.ln();
    let mag = (ln.re * ln.re + ln.im * ln.im).sqrt();
    mag.to_f64().unwrap_or(f64::INFINITY)
}

/// Checks the edge consistency equations and cusp completeness, reporting
/// one residual per edge class and one per independent cusp dual cycle.
pub fn validate_gluing_equations<R: Real>(
    tri: &IdealTriangulation<R>,
    tolerance: f64,
) -> GluingReport {
    let two_pi = R::PI() + R::PI();
    let edge_residuals: Vec<f64> = tri
        .edge_classes()
        .iter()
        .map(|class| {
            let mut log_sum = Complex::new(R::zero(), R::zero());
            for &(tet, edge) in &class.members {
                log_sum = log_sum + tri.edge_shape(tet, edge).ln();
            }
            let target = Complex::new(R::zero(), two_pi);
            let diff = log_sum - target;
            (diff.re * diff.re + diff.im * diff.im)
                .sqrt()
                .to_f64()
                .unwrap_or(f64::INFINITY)
        })
        .collect();

    let cusps = cusp_links(tri)
        .iter()
        .enumerate()
        .map(|(index, cusp)| CuspReport {
            index,
            link_triangles: cusp.triangles.len(),
            corner_classes: cusp.corner_classes,
            euler_characteristic: cusp.euler_characteristic(),
            generator_residuals: cusp
                .generators
                .iter()
                .map(|cycle| log_residual_to_one(cycle_derivative(tri, cycle)))
                .collect(),
        })
        .collect();

    GluingReport {
        edge_residuals,
        cusps,
        tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{fig8, t1_twist};
    use crate::triangulation::{FaceGluing, Perm4};
    use std::f64::consts::PI;

    #[test]
    fn link_ccw_orders_are_odd_permutations() {
        for v in 0..4 {
            let cyc = LINK_CCW[v];
            let perm = Perm4([v as u8, cyc[0] as u8, cyc[1] as u8, cyc[2] as u8]);
            assert!(perm.is_valid());
            assert!(perm.is_odd(), "link cycle at vertex {v}");
        }
    }

    #[test]
    fn fig8_has_one_torus_cusp() {
        let tri = fig8();
        let cusps = cusp_links(&tri);
        assert_eq!(cusps.len(), 1);
        let c = &cusps[0];
        assert_eq!(c.triangles.len(), 8);
        assert_eq!(c.corner_classes, 4);
        assert_eq!(c.euler_characteristic(), 0);
        // Dual cycle rank: E - F + 1 = 12 - 8 + 1.
        assert_eq!(c.generator_count(), 5);
    }

    #[test]
    fn fig8_satisfies_edge_and_cusp_equations() {
        let tri = fig8();
        let report = validate_gluing_equations(&tri, 1e-9);
        assert_eq!(report.edge_residuals.len(), 2);
        assert!(report.edges_pass(), "edge residuals {:?}", report.edge_residuals);
        assert!(report.cusps_pass(), "cusp residuals {:?}", report.cusps[0].generator_residuals);
        assert!(report.passes());
        assert!(report.max_edge_residual() < 1e-12);
        assert!(report.max_cusp_residual() < 1e-9);
    }

    #[test]
    fn perturbed_shapes_fail_edge_equations() {
        let tri = fig8();
        let bad_shape = num_complex::Complex::new(0.6, 0.9);
        let gluings: Vec<[FaceGluing; 4]> = (0..2)
            .map(|t| [0, 1, 2, 3].map(|f| tri.gluing(t, f)))
            .collect();
        let bad =
            IdealTriangulation::from_parts(vec![bad_shape, bad_shape], gluings).unwrap();
        let report = validate_gluing_equations(&bad, 1e-9);
        assert!(!report.edges_pass());
        assert!(!report.passes());
    }

    #[test]
    fn t1_twist_residuals_match_hand_computation() {
        // Class {01}: single edge with modulus i, log = i pi/2, residual
        // |i pi/2 - 2 pi i| = 3 pi/2. Middle class: product of moduli is -1
        // with magnitude 1, log sum = i pi, residual pi. Class {23}: as {01}.
        let tri = t1_twist();
        let report = validate_gluing_equations(&tri, 1e-9);
        assert_eq!(report.edge_residuals.len(), 3);
        assert!((report.edge_residuals[0] - 3.0 * PI / 2.0).abs() < 1e-12);
        assert!((report.edge_residuals[1] - PI).abs() < 1e-12);
        assert!((report.edge_residuals[2] - 3.0 * PI / 2.0).abs() < 1e-12);
        assert!(!report.passes());
    }

    #[test]
    fn t1_twist_has_two_cusps() {
        let tri = t1_twist();
        let cusps = cusp_links(&tri);
        assert_eq!(cusps.len(), 2);
        for c in &cusps {
            assert_eq!(c.triangles.len(), 2);
            // Two triangles, three dual edges: rank 2 cycle space.
            assert_eq!(c.generator_count(), 2);
        }
        assert_eq!(cusps[0].triangles, vec![(0, 0), (0, 1)]);
        assert_eq!(cusps[1].triangles, vec![(0, 2), (0, 3)]);
    }

    #[test]
    fn backtrack_passages_square_to_identity() {
        // Crossing into a triangle and straight back contributes -1; a
        // doubled backtrack is the identity, so a trivial out-and-back
        // cycle has derivative exactly 1.
        let tri = fig8();
        let g = tri.gluing(0, 1);
        let node = (0usize, 0usize);
        let (next, f_to) = ((g.tet, g.perm.apply(0)), g.perm.apply(1));
        let cycle = vec![
            Crossing {
                from: node,
                f_from: 1,
                to: next,
                f_to,
            },
            Crossing {
                from: next,
                f_from: f_to,
                to: node,
                f_to: 1,
            },
        ];
        let d = cycle_derivative(&tri, &cycle);
        assert!((d - num_complex::Complex::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn peripheral_loops_commute_on_the_complete_manifold() {
        use crate::holonomy::Representation;
        let tri = crate::testutil::fig8();
        let rep = Representation::from_shapes(&tri, 1e-6).unwrap();
        let cusps = cusp_links(&tri);
        assert_eq!(cusps.len(), 1);
        for cusp in &cusps {
            let mats: Vec<_> = cusp
                .generator_paths()
                .iter()
                .map(|p| rep.path_matrix(p))
                .collect();
            assert!(mats.len() >= 2);
            for a in &mats {
                for b in &mats {
                    let ab = a.mul(b);
                    let ba = b.mul(a);
                    let d = (ab.a - ba.a)
                        .norm()
                        .max((ab.b - ba.b).norm())
                        .max((ab.c - ba.c).norm())
                        .max((ab.d - ba.d).norm());
                    assert!(d < 1e-9, "peripheral pair fails to commute by {d:.3e}");
                }
            }
        }
    }
}
