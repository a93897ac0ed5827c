//! Shared helpers for unit tests: fixture loading, common triangulations,
//! and reference matrix groups.

use crate::holonomy::Mat2;
use crate::triangulation::{parse_triangulation, IdealTriangulation};
use num_complex::Complex64;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Figure-eight knot complement: 2 regular ideal tetrahedra, 1 cusp,
/// shapes exp(i pi/3), trace field Q(sqrt(-3)).
pub fn fig8() -> IdealTriangulation<f64> {
    parse_triangulation(&fixture_path("fig8.json")).expect("fig8 fixture parses")
}

/// One-tetrahedron structural fixture (not a hyperbolic solution): faces
/// 0<->1 glued by the transposition (01), faces 2<->3 by (23). Its edge
/// classes have sizes 1, 4, 1 and it carries an embedded normal torus.
pub fn t1_twist() -> IdealTriangulation<f64> {
    parse_triangulation(&fixture_path("t1_twist.json")).expect("t1_twist fixture parses")
}

/// Two-tetrahedron structural fixture (not a hyperbolic solution) found by
/// exhaustive search over bipartite gluings: it carries a connected
/// orientable genus-2 normal surface with one quad per tetrahedron.
pub fn t2_genus2() -> IdealTriangulation<f64> {
    parse_triangulation(&fixture_path("t2_genus2.json")).expect("t2_genus2 fixture parses")
}

/// Three-tetrahedron structural fixture (not a hyperbolic solution): a
/// chain 0-1, 0-2, 1-2 with two face pairs between each tetrahedron pair,
/// all gluings by transpositions.
pub fn t3_chain() -> IdealTriangulation<f64> {
    parse_triangulation(&fixture_path("t3_chain.json")).expect("t3_chain fixture parses")
}

/// One-tetrahedron structural fixture (not a hyperbolic solution) found by
/// exhaustive search over four-cycle gluings: it carries a one-sided normal
/// Klein bottle (a single quad), whose double is a connected orientable
/// torus.
pub fn t1_klein() -> IdealTriangulation<f64> {
    parse_triangulation(&fixture_path("t1_klein.json")).expect("t1_klein fixture parses")
}

/// Two-tetrahedron structural fixture (not a hyperbolic solution) found by
/// exhaustive search over general face pairings: it carries a one-sided
/// non-orientable normal surface with three cross-caps (chi = -1) whose
/// double is a connected orientable genus-2 surface.
pub fn t2_cross() -> IdealTriangulation<f64> {
    parse_triangulation(&fixture_path("t2_cross.json")).expect("t2_cross fixture parses")
}

fn real_mat(a: f64, b: f64, c: f64, d: f64) -> Mat2<Complex64> {
    Mat2 {
        a: Complex64::new(a, 0.0),
        b: Complex64::new(b, 0.0),
        c: Complex64::new(c, 0.0),
        d: Complex64::new(d, 0.0),
    }
}

/// Elliptic rotation by angle theta about i in SL(2, R).
pub fn rotation(theta: f64) -> Mat2<Complex64> {
    real_mat(theta.cos(), theta.sin(), -theta.sin(), theta.cos())
}

/// Hyperbolic translation along the imaginary axis with eigenvalue l.
pub fn dilation(l: f64) -> Mat2<Complex64> {
    real_mat(l, 0.0, 0.0, 1.0 / l)
}

/// Four hyperbolic elements of SL(2, R) whose axes pass through i at
/// angles k pi/4, with translation eigenvalue 1 + sqrt(2) + sqrt(2 + 2
/// sqrt(2)), the side-pairing length of the regular hyperbolic octagon.
/// They generate a genus-2-like real (hence Fuchsian) matrix group.
pub fn octagon_generators() -> Vec<Mat2<Complex64>> {
    let s2 = 2.0f64.sqrt();
    let l = 1.0 + s2 + (2.0 + 2.0 * s2).sqrt();
    let a = dilation(l);
    (0..4)
        .map(|k| {
            let r = rotation(k as f64 * std::f64::consts::PI / 8.0);
            r.mul(&a).mul(&r.adjugate())
        })
        .collect()
}

/// Conjugates the chosen generators by the parabolic [[1, i*eps], [0, 1]],
/// bending the group out of SL(2, R) while preserving each generator's own
/// trace.
pub fn bend(mats: &[Mat2<Complex64>], indices: &[usize], eps: f64) -> Vec<Mat2<Complex64>> {
    let c = Mat2 {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, eps),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    };
    mats.iter()
        .enumerate()
        .map(|(i, m)| {
            if indices.contains(&i) {
                c.mul(m).mul(&c.adjugate())
            } else {
                m.clone()
            }
        })
        .collect()
}

/// Real diagonal representation of the t2_genus2 manifold group: exponents
/// (4, 1, 1) span the kernel of the abelianized relator matrix, so powers
/// of two satisfy both relators exactly in floating point.
pub fn t2_genus2_rep() -> Vec<Mat2<Complex64>> {
    vec![dilation(16.0), dilation(2.0), dilation(2.0)]
}

/// Real representation of the t1_klein manifold group (both generators are
/// forced equal with fourth power central): rotation by pi/4, whose fourth
/// power is -I.
pub fn t1_klein_rep() -> Vec<Mat2<Complex64>> {
    let r = rotation(std::f64::consts::FRAC_PI_4);
    vec![r.clone(), r]
}

/// The t1_twist manifold group kills both generators (two length-one
/// relators), so the only diagonal representation is trivial.
pub fn t1_twist_rep() -> Vec<Mat2<Complex64>> {
    vec![dilation(1.0), dilation(1.0)]
}

/// Real representation of the t2_cross manifold group. Its relators force
/// the third generator to a scalar and the second to the inverse of the
/// first, which must square to a scalar; an order-four rotation realizes
/// that nontrivially.
pub fn t2_cross_rep() -> Vec<Mat2<Complex64>> {
    vec![
        rotation(std::f64::consts::FRAC_PI_2),
        rotation(-std::f64::consts::FRAC_PI_2),
        dilation(1.0),
    ]
}

/// Real diagonal representation of the t3_chain manifold group from the
/// kernel vector (1, -1, -1, -1) of its abelianized relator matrix.
pub fn t3_chain_rep() -> Vec<Mat2<Complex64>> {
    vec![
        dilation(2.0),
        dilation(0.5),
        dilation(0.5),
        dilation(0.5),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::Representation;

    #[test]
    fn bundled_matrix_representations_satisfy_their_relators() {
        for (tri, mats) in [
            (t1_twist(), t1_twist_rep()),
            (t1_klein(), t1_klein_rep()),
            (t2_genus2(), t2_genus2_rep()),
            (t2_cross(), t2_cross_rep()),
            (t3_chain(), t3_chain_rep()),
        ] {
            let rep = Representation::from_matrices(&tri, mats, 1e-9).unwrap();
            assert!(rep.max_relator_defect < 1e-12, "{:?}", tri.name());
        }
    }

    #[test]
    fn octagon_generators_are_real_with_the_octagon_trace() {
        let gens = octagon_generators();
        assert_eq!(gens.len(), 4);
        let expected = 2.0 * (1.0 + 2.0f64.sqrt());
        for g in &gens {
            for e in [&g.a, &g.b, &g.c, &g.d] {
                assert_eq!(e.im, 0.0);
            }
            assert!((g.trace().re - expected).abs() < 1e-12);
            assert!((g.det() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // Bending keeps each generator's own trace but breaks pair traces.
        let bent = bend(&gens, &[2, 3], 0.2);
        for (g, b) in gens.iter().zip(&bent) {
            assert!((g.trace() - b.trace()).norm() < 1e-12);
        }
        let pair = bent[0].mul(&bent[2]);
        assert!(pair.trace().im.abs() > 0.01, "{}", pair.trace());
    }

    /// Writes the bundled matrix fixture files. Run manually after editing
    /// the constructors above:
    /// cargo test -p geoscan --lib regenerate_matrix_fixtures -- --ignored
    #[test]
    #[ignore]
    fn regenerate_matrix_fixtures() {
        let entries: [(&str, Vec<Mat2<Complex64>>); 7] = [
            ("mats_t1_twist.json", t1_twist_rep()),
            ("mats_t1_klein.json", t1_klein_rep()),
            ("mats_t2_genus2.json", t2_genus2_rep()),
            ("mats_t2_cross.json", t2_cross_rep()),
            ("mats_t3_chain.json", t3_chain_rep()),
            ("mats_octagon_real.json", octagon_generators()),
            ("mats_octagon_bent.json", bend(&octagon_generators(), &[2, 3], 0.2)),
        ];
        for (name, mats) in entries {
            let gens: Vec<_> = mats
                .iter()
                .map(|m| {
                    [
                        [[m.a.re, m.a.im], [m.b.re, m.b.im]],
                        [[m.c.re, m.c.im], [m.d.re, m.d.im]],
                    ]
                })
                .collect();
            let doc = serde_json::json!({ "generators": gens });
            let text = serde_json::to_string_pretty(&doc).unwrap();
            std::fs::write(fixture_path(name), text + "\n").unwrap();
        }
    }
}
