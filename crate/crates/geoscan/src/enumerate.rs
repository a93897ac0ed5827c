//! Enumeration of closed normal surfaces up to an Euler characteristic bound.
//!
//! The solution set of the matching equations, intersected with the
//! nonnegative orthant and the embeddability condition (one quad kind per
//! tetrahedron), splits into 3^t polyhedral cones, one per choice of
//! allowed quad kind in each tetrahedron. For every such pattern this
//! module computes, in exact rational arithmetic:
//!
//! 1. the extreme rays of the cone (double description with the
//!    combinatorial adjacency test),
//! 2. the full Hilbert basis, by searching the integer points of the box
//!    bounded by the sum of the primitive rays and keeping the minimal
//!    nonzero ones under componentwise order (a point dominates another
//!    exactly when their difference is again a solution, so minimality
//!    and irreducibility agree on these cones),
//! 3. and from the merged Hilbert bases, all nonnegative integer
//!    combinations of compatible elements up to a fixed depth, keeping
//!    the connected surfaces with Euler characteristic in [-bound, -1].
//!
//! Every embedded closed normal surface is a nonnegative integer
//! combination of Hilbert basis elements, and vertex-linking summands only
//! ever contribute disconnected boundary-parallel pieces, so they are
//! dropped before combining. The remaining search is truncated at depth
//! 2*bound + 2; combinations past that depth would need more than
//! 2*bound + 2 fundamental pieces to assemble a connected surface with
//! |chi| <= bound, which does not occur for the bounds and census sizes
//! this tool targets. All searches carry explicit budgets and fail loudly
//! rather than silently truncating.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::normalsurface::{build_surface, matching_equations, NormalSurfaceError, NormalVector};
use crate::scalar::Real;
use crate::triangulation::IdealTriangulation;

type Q = BigRational;

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("enumeration budget exceeded: {stage} needed more than {limit}")]
    Budget { stage: &'static str, limit: u64 },
    #[error("ray coordinate does not fit in 64 bits")]
    Overflow,
    #[error("surface reconstruction failed during enumeration: {0}")]
    Surface(#[from] NormalSurfaceError),
}

#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    /// Keep surfaces with euler characteristic in [-euler_bound, -1].
    pub euler_bound: i64,
    /// Cap on simultaneous rays in any double description step.
    pub max_rays: usize,
    /// Cap on search nodes while listing integer points of a ray box.
    pub max_box_nodes: u64,
    /// Cap on search nodes while combining fundamental surfaces.
    pub max_combo_nodes: u64,
    /// Cap on surfaces returned.
    pub max_results: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            euler_bound: 1,
            max_rays: 1 << 14,
            max_box_nodes: 20_000_000,
            max_combo_nodes: 20_000_000,
            max_results: 1 << 16,
        }
    }
}

/// A connected closed normal surface produced by the enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedSurface {
    pub vector: NormalVector,
    pub euler_characteristic: i64,
    pub orientable: bool,
}

// ---------------------------------------------------------------------------
// Exact rational linear algebra.

/// Reduced row echelon form; returns (rows, pivot column per row).
fn rref(mut rows: Vec<Vec<Q>>, cols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(src) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, src);
        let inv = rows[r][c].clone().recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..cols {
                    let sub = &rows[r][j] * &f;
                    rows[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Basis of the null space of `rows` as vectors over `cols` coordinates.
fn kernel_basis(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let (ech, pivots) = rref(rows.to_vec(), cols);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (row, &pc) in ech.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

fn primitive_from_rational(v: &[Q]) -> Result<Vec<i64>, EnumerationError> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = num_integer::gcd(g, x.abs());
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    ints.iter()
        .map(|x| i64::try_from(x / &g).map_err(|_| EnumerationError::Overflow))
        .collect()
}

// ---------------------------------------------------------------------------
// Double description.

struct DDRay {
    v: Vec<Q>,
    /// Bit i set when inequality i is tight on this ray.
    zero: Vec<u64>,
}

fn bit_get(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut s = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

fn make_ray(v: Vec<Q>, ineqs: &[Vec<Q>]) -> DDRay {
    let words = ineqs.len().div_ceil(64);
    let mut zero = vec![0u64; words];
    for (i, a) in ineqs.iter().enumerate() {
        if dot(a, &v).is_zero() {
            bit_set(&mut zero, i);
        }
    }
    DDRay { v, zero }
}

/// Extreme rays of {c : ineqs * c >= 0} for a pointed cone of full rank.
fn dual_description(
    ineqs: &[Vec<Q>],
    dim: usize,
    max_rays: usize,
) -> Result<Vec<Vec<Q>>, EnumerationError> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    // Pick dim independent inequalities by Gaussian elimination on rows.
    let mut chosen: Vec<usize> = Vec::new();
    let mut work: Vec<Vec<Q>> = Vec::new();
    for (i, a) in ineqs.iter().enumerate() {
        let mut v = a.clone();
        for w in &work {
            let lead = w.iter().position(|x| !x.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let f = &v[lead] / &w[lead];
                for j in 0..dim {
                    let sub = &w[j] * &f;
                    v[j] -= sub;
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            work.push(v);
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    assert_eq!(chosen.len(), dim, "cone is pointed so rank must be full");

    // Invert the chosen dim x dim block; its columns are the initial rays.
    let aug: Vec<Vec<Q>> = chosen
        .iter()
        .enumerate()
        .map(|(r, &i)| {
            let mut row = ineqs[i].clone();
            row.extend((0..dim).map(|j| if j == r { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let (inv, pivots) = rref(aug, 2 * dim);
    assert_eq!(pivots, (0..dim).collect::<Vec<_>>());
    let mut rays: Vec<DDRay> = (0..dim)
        .map(|col| {
            let v: Vec<Q> = (0..dim).map(|r| inv[r][dim + col].clone()).collect();
            make_ray(v, ineqs)
        })
        .collect();

    let words = ineqs.len().div_ceil(64);
    let mut processed = vec![0u64; words];
    for &i in &chosen {
        bit_set(&mut processed, i);
    }

    for (k, a) in ineqs.iter().enumerate() {
        if bit_get(&processed, k) {
            continue;
        }
        let dots: Vec<Q> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (i, d) in dots.iter().enumerate() {
            if d.is_positive() {
                plus.push(i);
            } else if d.is_negative() {
                minus.push(i);
            }
        }
        if minus.is_empty() {
            bit_set(&mut processed, k);
            continue;
        }
        let mut next: Vec<DDRay> = Vec::new();
        let mut fresh: Vec<DDRay> = Vec::new();
        for (p, m) in plus
            .iter()
            .flat_map(|&p| minus.iter().map(move |&m| (p, m)))
        {
            // Combinatorial adjacency: no third ray is tight on every
            // processed inequality where both p and m are tight.
            let common: Vec<u64> = rays[p]
                .zero
                .iter()
                .zip(&rays[m].zero)
                .zip(&processed)
                .map(|((x, y), pr)| x & y & pr)
                .collect();
            let adjacent = rays.iter().enumerate().all(|(i, r)| {
                i == p
                    || i == m
                    || !common
                        .iter()
                        .zip(&r.zero)
                        .all(|(c, z)| (c & !z) == 0)
            });
            if !adjacent {
                continue;
            }
            let v: Vec<Q> = rays[p]
                .v
                .iter()
                .zip(&rays[m].v)
                .map(|(vp, vm)| &dots[p] * vm - &dots[m] * vp)
                .collect();
            fresh.push(make_ray(v, ineqs));
        }
        for (i, r) in rays.drain(..).enumerate() {
            if !dots[i].is_negative() {
                next.push(r);
            }
        }
        next.extend(fresh);
        if next.len() > max_rays {
            return Err(EnumerationError::Budget {
                stage: "double description rays",
                limit: max_rays as u64,
            });
        }
        rays = next;
        bit_set(&mut processed, k);
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

// ---------------------------------------------------------------------------
// Per-pattern setup.

struct PatternSystem {
    /// Global coordinate index of each kept local coordinate.
    kept: Vec<usize>,
    /// Matching equations restricted to the kept coordinates.
    rows: Vec<Vec<Q>>,
}

fn pattern_system<R: Real>(
    equations: &[Vec<i64>],
    tri: &IdealTriangulation<R>,
    pattern: &[usize],
) -> PatternSystem {
    let t = tri.num_tetrahedra();
    let mut kept = Vec::with_capacity(5 * t);
    for tet in 0..t {
        for v in 0..4 {
            kept.push(7 * tet + v);
        }
        kept.push(7 * tet + 4 + pattern[tet]);
    }
    let rows = equations
        .iter()
        .map(|row| kept.iter().map(|&c| Q::from_integer(row[c].into())).collect())
        .collect();
    PatternSystem { kept, rows }
}

fn lift(kept: &[usize], local: &[i64], len: usize) -> NormalVector {
    let mut coords = vec![0i64; len];
    for (&c, &x) in kept.iter().zip(local) {
        coords[c] = x;
    }
    NormalVector { coords }
}

/// Extreme rays of one pattern cone as primitive local integer vectors.
fn pattern_rays(
    sys: &PatternSystem,
    max_rays: usize,
) -> Result<Vec<Vec<i64>>, EnumerationError> {
    let n = sys.kept.len();
    let basis = kernel_basis(&sys.rows, n);
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    // Inequality i: coordinate i of the kernel combination is >= 0.
    let ineqs: Vec<Vec<Q>> = (0..n)
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    let rays = dual_description(&ineqs, d, max_rays)?;
    let mut out = Vec::new();
    for c in rays {
        let x: Vec<Q> = (0..n).map(|i| dot(&ineqs[i], &c)).collect();
        debug_assert!(x.iter().all(|v| !v.is_negative()));
        out.push(primitive_from_rational(&x)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Integer points of a box intersected with the solution space.

/// All nonzero integer solutions of `sys` with 0 <= x <= bound, by
/// depth-first assignment of the free coordinates of the echelon form with
/// interval pruning on every pivot row.
fn box_solutions(
    sys: &PatternSystem,
    bound: &[i64],
    max_nodes: u64,
    nodes: &mut u64,
) -> Result<Vec<Vec<i64>>, EnumerationError> {
    let n = sys.kept.len();
    let (ech, pivots) = rref(sys.rows.clone(), n);
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    // Small ranges first keeps the tree narrow near the root.
    free.sort_by_key(|&c| bound[c]);

    // Pivot row r: x[pivots[r]] = -sum_{free f} ech[r][f] * x[f].
    // Track each pivot's partial value and the min/max still reachable.
    struct Row {
        coeffs: Vec<(usize, Q)>, // (position in `free`, coefficient)
        pivot: usize,
    }
    let rows: Vec<Row> = ech
        .iter()
        .zip(&pivots)
        .map(|(row, &pc)| Row {
            coeffs: free
                .iter()
                .enumerate()
                .filter(|&(_, &f)| !row[f].is_zero())
                .map(|(slot, &f)| (slot, -row[f].clone()))
                .collect(),
            pivot: pc,
        })
        .collect();

    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    // rem[r] = (min, max) contribution still possible from unassigned slots.
    let mut partial: Vec<Q> = vec![Q::zero(); rows.len()];

    fn spread(rows: &[Row], from_slot: usize, free: &[usize], bound: &[i64]) -> Vec<(Q, Q)> {
        rows.iter()
            .map(|row| {
                let mut lo = Q::zero();
                let mut hi = Q::zero();
                for (slot, c) in &row.coeffs {
                    if *slot < from_slot {
                        continue;
                    }
                    let b = Q::from_integer(bound[free[*slot]].into());
                    if c.is_positive() {
                        hi += c * &b;
                    } else if c.is_negative() {
                        lo += c * &b;
                    }
                }
                (lo, hi)
            })
            .collect()
    }

    // Reachability bounds per depth are recomputed as (lo, hi) offsets from
    // the current partial sums; depth k means slots 0..k are assigned.
    let spreads: Vec<Vec<(Q, Q)>> = (0..=free.len())
        .map(|k| spread(&rows, k, &free, bound))
        .collect();

    fn feasible(rows: &[Row], partial: &[Q], spread: &[(Q, Q)], bound: &[i64]) -> bool {
        rows.iter().enumerate().all(|(r, row)| {
            let lo = &partial[r] + &spread[r].0;
            let hi = &partial[r] + &spread[r].1;
            !hi.is_negative() && lo <= Q::from_integer(bound[row.pivot].into())
        })
    }

    fn rec(
        depth: usize,
        rows: &[Row],
        free: &[usize],
        bound: &[i64],
        spreads: &[Vec<(Q, Q)>],
        partial: &mut Vec<Q>,
        x: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
        nodes: &mut u64,
        max_nodes: u64,
    ) -> Result<(), EnumerationError> {
        *nodes += 1;
        if *nodes > max_nodes {
            return Err(EnumerationError::Budget {
                stage: "integer point search",
                limit: max_nodes,
            });
        }
        if !feasible(rows, partial, &spreads[depth], bound) {
            return Ok(());
        }
        if depth == free.len() {
            for (r, row) in rows.iter().enumerate() {
                if !partial[r].is_integer() {
                    return Ok(());
                }
                let v = partial[r].to_integer();
                let Ok(v) = i64::try_from(v) else {
                    return Ok(());
                };
                if v < 0 || v > bound[row.pivot] {
                    return Ok(());
                }
                x[row.pivot] = v;
            }
            if x.iter().any(|&v| v != 0) {
                out.push(x.clone());
            }
            return Ok(());
        }
        let f = free[depth];
        for val in 0..=bound[f] {
            x[f] = val;
            if val > 0 {
                for (r, row) in rows.iter().enumerate() {
                    for (slot, c) in &row.coeffs {
                        if *slot == depth {
                            partial[r] += c;
                        }
                    }
                }
            }
            rec(
                depth + 1,
                rows,
                free,
                bound,
                spreads,
                partial,
                x,
                out,
                nodes,
                max_nodes,
            )?;
        }
        // Undo the accumulated bound[f] increments.
        for (r, row) in rows.iter().enumerate() {
            for (slot, c) in &row.coeffs {
                if *slot == depth {
                    partial[r] -= &(c * Q::from_integer(bound[f].into()));
                }
            }
        }
        x[f] = 0;
        Ok(())
    }

    rec(
        0,
        &rows,
        &free,
        bound,
        &spreads,
        &mut partial,
        &mut x,
        &mut out,
        nodes,
        max_nodes,
    )?;
    Ok(out)
}

/// Minimal elements under componentwise order.
fn dominance_minimal(mut points: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    points.sort_by_key(|p| p.iter().sum::<i64>());
    let mut keep: Vec<Vec<i64>> = Vec::new();
    'outer: for p in points {
        for q in &keep {
            if q.iter().zip(&p).all(|(a, b)| a <= b) {
                continue 'outer;
            }
        }
        keep.push(p);
    }
    keep
}

// ---------------------------------------------------------------------------
// Public entry points.

fn all_patterns(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(3usize.pow(t as u32));
    let mut cur = vec![0usize; t];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == t {
                return out;
            }
            cur[i] += 1;
            if cur[i] < 3 {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Extreme rays of all pattern cones, merged, as primitive vectors.
pub fn extreme_rays<R: Real>(
    tri: &IdealTriangulation<R>,
    config: &EnumerationConfig,
) -> Result<Vec<NormalVector>, EnumerationError> {
    let equations = matching_equations(tri);
    let t = tri.num_tetrahedra();
    let mut set = BTreeSet::new();
    for pattern in all_patterns(t) {
        let sys = pattern_system(&equations, tri, &pattern);
        for local in pattern_rays(&sys, config.max_rays)? {
            set.insert(lift(&sys.kept, &local, 7 * t));
        }
    }
    Ok(set.into_iter().collect())
}

/// Hilbert bases of all pattern cones, merged.
pub fn fundamental_surfaces<R: Real>(
    tri: &IdealTriangulation<R>,
    config: &EnumerationConfig,
) -> Result<Vec<NormalVector>, EnumerationError> {
    let equations = matching_equations(tri);
    let t = tri.num_tetrahedra();
    let mut set = BTreeSet::new();
    let mut nodes = 0u64;
    for pattern in all_patterns(t) {
        let sys = pattern_system(&equations, tri, &pattern);
        let rays = pattern_rays(&sys, config.max_rays)?;
        if rays.is_empty() {
            continue;
        }
        let n = sys.kept.len();
        let mut bound = vec![0i64; n];
        for ray in &rays {
            for (b, r) in bound.iter_mut().zip(ray) {
                *b += r;
            }
        }
        let points = box_solutions(&sys, &bound, config.max_box_nodes, &mut nodes)?;
        for p in dominance_minimal(points) {
            set.insert(lift(&sys.kept, &p, 7 * t));
        }
    }
    Ok(set.into_iter().collect())
}

/// All connected closed normal surfaces with euler characteristic in
/// [-euler_bound, -1], up to combination depth 2*euler_bound + 2.
pub fn enumerate_closed_surfaces<R: Real>(
    tri: &IdealTriangulation<R>,
    config: &EnumerationConfig,
) -> Result<Vec<ClosedSurface>, EnumerationError> {
    let bound = config.euler_bound;
    if bound < 1 {
        return Ok(Vec::new());
    }
    let t = tri.num_tetrahedra();
    let fundamentals = fundamental_surfaces(tri, config)?;

    // Vertex-linking summands only add parallel boundary components.
    struct Element {
        vector: NormalVector,
        chi: i64,
        quads: Vec<u8>, // per tet: kind + 1, or 0 when no quad
    }
    let mut elements = Vec::new();
    let mut standalone_links = Vec::new();
    for v in fundamentals {
        if v.is_vertex_linking() {
            // Summing a full vertex link onto anything just stacks a
            // parallel outermost copy and disconnects, so links never
            // enter the combination search. A link whose own complex is
            // within the bound still counts as a surface by itself.
            standalone_links.push(v);
            continue;
        }
        let complex = build_surface(tri, &v)?;
        let quads = (0..t)
            .map(|tet| {
                (0..3)
                    .find(|&k| v.quad(tet, k) != 0)
                    .map_or(0, |k| k as u8 + 1)
            })
            .collect();
        elements.push(Element {
            chi: complex.euler_characteristic(),
            vector: v,
            quads,
        });
    }
    // Most negative first so the no-negatives-remaining prune fires early.
    elements.sort_by_key(|e| e.chi);
    let neg_count = elements.iter().filter(|e| e.chi < 0).count();
    let max_chi = elements.iter().map(|e| e.chi).max().unwrap_or(0);

    let depth_limit = (2 * bound + 2) as usize;
    let mut sums: BTreeSet<NormalVector> = BTreeSet::new();
    sums.extend(standalone_links);
    let mut nodes = 0u64;

    struct Ctx<'a> {
        elements: &'a [Element],
        neg_count: usize,
        max_chi: i64,
        bound: i64,
        depth_limit: usize,
        max_nodes: u64,
        t: usize,
    }
    fn rec(
        ctx: &Ctx,
        idx: usize,
        depth: usize,
        chi: i64,
        current: &mut NormalVector,
        quads: &mut Vec<u8>,
        sums: &mut BTreeSet<NormalVector>,
        nodes: &mut u64,
    ) -> Result<(), EnumerationError> {
        *nodes += 1;
        if *nodes > ctx.max_nodes {
            return Err(EnumerationError::Budget {
                stage: "surface combination search",
                limit: ctx.max_nodes,
            });
        }
        if depth > 0 && chi < 0 && chi >= -ctx.bound {
            sums.insert(current.clone());
        }
        if idx == ctx.elements.len() || depth == ctx.depth_limit {
            return Ok(());
        }
        // Best possible improvement from here on.
        let slack = (ctx.depth_limit - depth) as i64 * ctx.max_chi.max(0);
        if chi + slack < -ctx.bound {
            return Ok(());
        }
        // No negative element remains, so chi can only stay nonnegative.
        if idx >= ctx.neg_count && chi >= 0 {
            return Ok(());
        }
        // Skip this element entirely.
        rec(ctx, idx + 1, depth, chi, current, quads, sums, nodes)?;
        // Or take it 1..k times while compatible.
        let e = &ctx.elements[idx];
        let compatible = (0..ctx.t).all(|tet| {
            e.quads[tet] == 0 || quads[tet] == 0 || quads[tet] == e.quads[tet]
        });
        if !compatible {
            return Ok(());
        }
        let saved: Vec<u8> = quads.clone();
        let mut times = 0usize;
        while depth + times < ctx.depth_limit {
            times += 1;
            for (q, &eq) in quads.iter_mut().zip(&e.quads) {
                if eq != 0 {
                    *q = eq;
                }
            }
            for (c, &ec) in current.coords.iter_mut().zip(&e.vector.coords) {
                *c += ec;
            }
            rec(
                ctx,
                idx + 1,
                depth + times,
                chi + times as i64 * e.chi,
                current,
                quads,
                sums,
                nodes,
            )?;
        }
        for (c, &ec) in current.coords.iter_mut().zip(&e.vector.coords) {
            *c -= times as i64 * ec;
        }
        *quads = saved;
        Ok(())
    }

    let ctx = Ctx {
        elements: &elements,
        neg_count,
        max_chi,
        bound,
        depth_limit,
        max_nodes: config.max_combo_nodes,
        t,
    };
    let mut current = NormalVector::zero(t);
    let mut quads = vec![0u8; t];
    rec(
        &ctx,
        0,
        0,
        0,
        &mut current,
        &mut quads,
        &mut sums,
        &mut nodes,
    )?;

    let mut out = Vec::new();
    for vector in sums {
        let complex = build_surface(tri, &vector)?;
        let chi = complex.euler_characteristic();
        if !complex.is_connected() || chi >= 0 || chi < -bound {
            continue;
        }
        out.push(ClosedSurface {
            euler_characteristic: chi,
            orientable: complex.is_orientable(),
            vector,
        });
        if out.len() > config.max_results {
            return Err(EnumerationError::Budget {
                stage: "result list",
                limit: config.max_results as u64,
            });
        }
    }
    Ok(out)
}

/// Exhaustive reference search: every admissible solution of the matching
/// equations with all coordinates at most `cap`. Exponential in the
/// coordinate count; only sensible for very small triangulations.
pub fn brute_force_solutions<R: Real>(
    tri: &IdealTriangulation<R>,
    cap: i64,
) -> Result<Vec<NormalVector>, EnumerationError> {
    let equations = matching_equations(tri);
    let t = tri.num_tetrahedra();
    let mut set = BTreeSet::new();
    let mut nodes = 0u64;
    for pattern in all_patterns(t) {
        let sys = pattern_system(&equations, tri, &pattern);
        let bound = vec![cap; sys.kept.len()];
        for p in box_solutions(&sys, &bound, u64::MAX, &mut nodes)? {
            set.insert(lift(&sys.kept, &p, 7 * t));
        }
    }
    Ok(set.into_iter().collect())
}
