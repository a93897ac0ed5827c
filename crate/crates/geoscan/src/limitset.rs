//! Limit-set sampling and circle fitting.
//!
//! A surface subgroup that is Fuchsian up to conjugacy has a limit set
//! lying on a geometric circle (or a line, the circle through infinity)
//! on the boundary sphere. Sampling images of a base point under long
//! random words and fitting an algebraic circle to the cloud gives a
//! numeric diagnostic: tiny residuals are consistent with Fuchsian,
//! visible residuals mean the limit set is a fractal curve and the group
//! is only quasi-Fuchsian at best.

use num_complex::Complex;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::holonomy::{Mat2, ProjPoint};
use crate::scalar::Real;

#[derive(Debug, thiserror::Error)]
pub enum LimitSetError {
    #[error("limit set sampling needs at least one generator")]
    NoGenerators,
    #[error("circle fitting needs at least 3 distinct points, got {got}")]
    TooFewPoints { got: usize },
    #[error("sample is degenerate (points coincide or carry no shape)")]
    DegenerateSample,
}

/// Images of the base point 1 + 0i under random words, sorted by real
/// then imaginary part so the sample is independent of evaluation order.
#[derive(Clone, Debug)]
pub struct LimitSetSample<R: Real> {
    pub points: Vec<Complex<R>>,
    pub seed: u64,
    pub word_length_max: usize,
    /// Points requested; fewer appear when a word sends the base point
    /// to infinity, which the complex plane cannot hold.
    pub num_points: usize,
    pub skipped_infinite: usize,
}

#[derive(Clone, Debug)]
pub enum LocusKind<R: Real> {
    Circle { center: Complex<R>, radius: R },
    /// A circle through infinity: the line through `point` along the unit
    /// vector `direction`.
    Line {
        point: Complex<R>,
        direction: Complex<R>,
    },
}

#[derive(Clone, Debug)]
pub struct CircleFit<R: Real> {
    pub kind: LocusKind<R>,
    pub max_residual: R,
    pub rms_residual: R,
}

impl<R: Real> CircleFit<R> {
    /// Distance from a point to the fitted locus.
    pub fn residual_to(&self, p: Complex<R>) -> R {
        match &self.kind {
            LocusKind::Circle { center, radius } => ((p - center).norm_sqr().sqrt() - *radius).abs(),
            LocusKind::Line { point, direction } => {
                let rel = p - point;
                // Component of rel orthogonal to the unit direction.
                (rel.re * direction.im - rel.im * direction.re).abs()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Sampling.

fn renormalize<R: Real>(m: &mut Mat2<Complex<R>>) {
    let norm = |z: &Complex<R>| z.norm_sqr().sqrt();
    let s = norm(&m.a).max(norm(&m.b)).max(norm(&m.c)).max(norm(&m.d));
    if s > R::zero() && s.is_finite() {
        let inv = Complex::new(R::one() / s, R::zero());
        m.a = m.a * inv;
        m.b = m.b * inv;
        m.c = m.c * inv;
        m.d = m.d * inv;
    }
}

fn to_plane<R: Real>(p: &ProjPoint<Complex<R>>) -> Option<Complex<R>> {
    let nz = p.0.norm_sqr().sqrt();
    let nw = p.1.norm_sqr().sqrt();
    if nw <= (nz + nw) * R::of(1e-14) {
        return None;
    }
    let z = p.0 / p.1;
    if z.re.is_finite() && z.im.is_finite() {
        Some(z)
    } else {
        None
    }
}

fn sample_one<R: Real>(
    generators: &[Mat2<Complex<R>>],
    max_word: usize,
    seed: u64,
    index: u64,
) -> Option<Complex<R>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let length = 1 + (rng.next_u64() % max_word as u64) as usize;
    let choices = 2 * generators.len() as u64;
    let sample = Complex::new(R::zero(), R::zero());
    let mut m = Mat2::identity_like(&sample);
    for step in 0..length {
        let draw = rng.next_u64() % choices;
        let g = &generators[(draw / 2) as usize];
        let letter = if draw % 2 == 1 { g.adjugate() } else { g.clone() };
        m = m.mul(&letter);
        // Entries of a length-2000 word overflow doubles; the map is
        // projective, so rescaling by the largest entry changes nothing.
        if step % 32 == 31 {
            renormalize(&mut m);
        }
    }
    let base = ProjPoint(
        Complex::new(R::one(), R::zero()),
        Complex::new(R::one(), R::zero()),
    );
    to_plane(&m.apply(&base))
}

/// Samples `num_points` images of the base point 1 + 0i, one per
/// independent RNG stream of the seed, each under a uniformly random word
/// of length 1..=max_word in the generators and their inverses. Points
/// landing at infinity are counted and excluded. The result depends only
/// on (generators, num_points, max_word, seed).
pub fn sample_limit_set<R: Real>(
    generators: &[Mat2<Complex<R>>],
    num_points: usize,
    max_word: usize,
    seed: u64,
) -> Result<LimitSetSample<R>, LimitSetError> {
    if generators.is_empty() {
        return Err(LimitSetError::NoGenerators);
    }
    let max_word = max_word.max(1);
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
        .min(num_points.max(1));
    let chunk = num_points.div_ceil(workers.max(1));
    let mut points: Vec<Complex<R>> = Vec::with_capacity(num_points);
    let mut skipped = 0usize;
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(num_points);
            if lo >= hi {
                break;
            }
            handles.push(scope.spawn(move || {
                let mut local = Vec::with_capacity(hi - lo);
                let mut local_skipped = 0usize;
                for i in lo..hi {
                    match sample_one(generators, max_word, seed, i as u64) {
                        Some(z) => local.push(z),
                        None => local_skipped += 1,
                    }
                }
                (local, local_skipped)
            }));
        }
        for h in handles {
            let (local, local_skipped) = h.join().expect("sampling worker panicked");
            points.extend(local);
            skipped += local_skipped;
        }
    });
    points.sort_by(|u, v| {
        u.re.partial_cmp(&v.re)
            .expect("finite point")
            .then(u.im.partial_cmp(&v.im).expect("finite point"))
    });
    Ok(LimitSetSample {
        points,
        seed,
        word_length_max: max_word,
        num_points,
        skipped_infinite: skipped,
    })
}

// ---------------------------------------------------------------------------
// Circle fitting.

/// Eigenvector for the smallest eigenvalue of a symmetric 4x4 matrix, by
/// cyclic Jacobi rotations.
fn smallest_eigenvector4<R: Real>(mut m: [[R; 4]; 4]) -> [R; 4] {
    let mut v = [[R::zero(); 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = R::one();
    }
    for _ in 0..256 {
        let mut p = 0;
        let mut q = 1;
        let mut big = R::zero();
        for i in 0..4 {
            for j in (i + 1)..4 {
                if m[i][j].abs() > big {
                    big = m[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if big <= R::of(1e-300) {
            break;
        }
        let tau = (m[q][q] - m[p][p]) / (R::of(2.0) * m[p][q]);
        let t = tau.signum() / (tau.abs() + (tau * tau + R::one()).sqrt());
        let c = R::one() / (t * t + R::one()).sqrt();
        let s = t * c;
        // m <- J^T m J and v <- v J for the (p, q) rotation J.
        for k in 0..4 {
            let mp = m[p][k];
            let mq = m[q][k];
            m[p][k] = c * mp - s * mq;
            m[q][k] = s * mp + c * mq;
        }
        for k in 0..4 {
            let mp = m[k][p];
            let mq = m[k][q];
            m[k][p] = c * mp - s * mq;
            m[k][q] = s * mp + c * mq;
            let vp = v[k][p];
            let vq = v[k][q];
            v[k][p] = c * vp - s * vq;
            v[k][q] = s * vp + c * vq;
        }
    }
    let mut best = 0;
    for i in 1..4 {
        if m[i][i] < m[best][best] {
            best = i;
        }
    }
    [v[0][best], v[1][best], v[2][best], v[3][best]]
}

/// Least-squares algebraic circle through a point cloud: minimizes the
/// residual of a(x^2 + y^2) + bx + cy + d over unit (a, b, c, d). The
/// data is centered and scaled to unit spread first, so the coefficient
/// magnitudes are comparable; a vanishing leading coefficient means the
/// best locus is a line. Residuals are geometric distances in the
/// original coordinates.
pub fn fit_circle<R: Real>(points: &[Complex<R>]) -> Result<CircleFit<R>, LimitSetError> {
    if points.len() < 3 {
        return Err(LimitSetError::TooFewPoints { got: points.len() });
    }
    let n = R::of(points.len() as f64);
    let mut mean = Complex::new(R::zero(), R::zero());
    for p in points {
        mean = mean + *p;
    }
    let mean = Complex::new(mean.re / n, mean.im / n);
    let mut spread = R::zero();
    for p in points {
        spread = spread + (*p - mean).norm_sqr();
    }
    let scale = (spread / n).sqrt();
    if scale <= R::of(1e-300) {
        return Err(LimitSetError::DegenerateSample);
    }
    let mut distinct = 0usize;
    for (i, p) in points.iter().enumerate() {
        if i == 0 || (*p - points[i - 1]).norm_sqr() > R::zero() {
            distinct += 1;
        }
    }
    if distinct < 3 {
        return Err(LimitSetError::TooFewPoints { got: distinct });
    }
    let mut m = [[R::zero(); 4]; 4];
    for p in points {
        let x = (p.re - mean.re) / scale;
        let y = (p.im - mean.im) / scale;
        let row = [x * x + y * y, x, y, R::one()];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = m[i][j] + row[i] * row[j] / n;
            }
        }
    }
    let [a, b, c, d] = smallest_eigenvector4(m);
    let bc = (b * b + c * c).sqrt();
    let kind = if a.abs() > R::of(1e-9) {
        let half = R::of(0.5);
        let center_local = Complex::new(-b * half / a, -c * half / a);
        let radius_sq = (b * b + c * c) / (R::of(4.0) * a * a) - d / a;
        if radius_sq <= R::zero() {
            return Err(LimitSetError::DegenerateSample);
        }
        LocusKind::Circle {
            center: Complex::new(mean.re + scale * center_local.re, mean.im + scale * center_local.im),
            radius: scale * radius_sq.sqrt(),
        }
    } else {
        if bc <= R::of(1e-9) {
            return Err(LimitSetError::DegenerateSample);
        }
        // bx + cy + d = 0 in local coordinates.
        let foot_local = Complex::new(-d * b / (bc * bc), -d * c / (bc * bc));
        LocusKind::Line {
            point: Complex::new(mean.re + scale * foot_local.re, mean.im + scale * foot_local.im),
            direction: Complex::new(-c / bc, b / bc),
        }
    };
    let fit = CircleFit {
        kind,
        max_residual: R::zero(),
        rms_residual: R::zero(),
    };
    let mut max_residual = R::zero();
    let mut sum_sq = R::zero();
    for p in points {
        let r = fit.residual_to(*p);
        max_residual = max_residual.max(r);
        sum_sq = sum_sq + r * r;
    }
    Ok(CircleFit {
        kind: fit.kind,
        max_residual,
        rms_residual: (sum_sq / n).sqrt(),
    })
}

impl<R: Real> LimitSetSample<R> {
    pub fn fit(&self) -> Result<CircleFit<R>, LimitSetError> {
        fit_circle(&self.points)
    }
}

// ---------------------------------------------------------------------------
// Rendering.

fn f64_of<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Scatter plot of the sample with the fitted locus overlaid, as a fixed
/// 800x800 SVG. All coordinates are printed with four decimals, so the
/// output bytes depend only on the sample and fit values.
pub fn render_svg<R: Real>(sample: &LimitSetSample<R>, fit: Option<&CircleFit<R>>) -> String {
    const SIZE: f64 = 800.0;
    const MARGIN: f64 = 50.0;
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &sample.points {
        min_x = min_x.min(f64_of(p.re));
        max_x = max_x.max(f64_of(p.re));
        min_y = min_y.min(f64_of(p.im));
        max_y = max_y.max(f64_of(p.im));
    }
    if sample.points.is_empty() {
        min_x = -1.0;
        max_x = 1.0;
        min_y = -1.0;
        max_y = 1.0;
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let pad = span * 0.05;
    let span = span + 2.0 * pad;
    let cx = (min_x + max_x) / 2.0;
    let cy = (min_y + max_y) / 2.0;
    let extent = SIZE - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + (x - (cx - span / 2.0)) / span * extent;
    let py = |y: f64| SIZE - MARGIN - (y - (cy - span / 2.0)) / span * extent;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {size} {size}\" width=\"{size}\" height=\"{size}\">\n",
        size = SIZE as u32
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for p in &sample.points {
        out.push_str(&format!(
            "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"1.2\" fill=\"#1f2937\" fill-opacity=\"0.65\"/>\n",
            px(f64_of(p.re)),
            py(f64_of(p.im))
        ));
    }
    if let Some(fit) = fit {
        match &fit.kind {
            LocusKind::Circle { center, radius } => {
                out.push_str(&format!(
                    "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"{:.4}\" fill=\"none\" stroke=\"#dc2626\" stroke-width=\"1\"/>\n",
                    px(f64_of(center.re)),
                    py(f64_of(center.im)),
                    f64_of(*radius) / span * extent
                ));
            }
            LocusKind::Line { point, direction } => {
                let (x0, y0) = (f64_of(point.re), f64_of(point.im));
                let (dx, dy) = (f64_of(direction.re), f64_of(direction.im));
                let reach = span * 2.0;
                out.push_str(&format!(
                    "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#dc2626\" stroke-width=\"1\"/>\n",
                    px(x0 - reach * dx),
                    py(y0 - reach * dy),
                    px(x0 + reach * dx),
                    py(y0 + reach * dy)
                ));
            }
        }
        let label = match &fit.kind {
            LocusKind::Circle { .. } => "circle",
            LocusKind::Line { .. } => "line",
        };
        out.push_str(&format!(
            "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"14\" fill=\"#111\">{} fit, max residual {:.3e}, rms {:.3e}</text>\n",
            MARGIN,
            SIZE - 18.0,
            label,
            f64_of(fit.max_residual),
            f64_of(fit.rms_residual)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"monospace\" font-size=\"14\" fill=\"#111\">{} points, seed {}, max word {}</text>\n",
        MARGIN,
        MARGIN - 20.0,
        sample.points.len(),
        sample.seed,
        sample.word_length_max
    ));
    out.push_str("</svg>\n");
    out
}

/// One "re,im" line per point, in sample order.
pub fn render_csv<R: Real>(sample: &LimitSetSample<R>) -> String {
    let mut out = String::new();
    for p in &sample.points {
        out.push_str(&format!("{},{}\n", f64_of(p.re), f64_of(p.im)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{bend, octagon_generators, rotation};
    use num_complex::Complex64;

    // Sends the real line to a genuine circle while fixing the base point
    // 1 + 0i (rows sum to the same value), so sampled orbits stay exactly
    // on the conjugated limit circle at every word length.
    fn mobius() -> Mat2<Complex64> {
        Mat2 {
            a: Complex64::new(1.0, 0.5),
            b: Complex64::new(-0.25, 1.0),
            c: Complex64::new(0.75, -0.5),
            d: Complex64::new(0.0, 2.0),
        }
    }

    fn apply(m: &Mat2<Complex64>, z: Complex64) -> Complex64 {
        let p = m.apply(&ProjPoint(z, Complex64::new(1.0, 0.0)));
        p.0 / p.1
    }

    #[test]
    fn identity_generators_fix_the_base_point() {
        let id = Mat2::identity_like(&Complex64::new(0.0, 0.0));
        let sample = sample_limit_set(&[id], 40, 10, 7).unwrap();
        assert_eq!(sample.points.len(), 40);
        assert_eq!(sample.skipped_infinite, 0);
        for p in &sample.points {
            assert_eq!(*p, Complex64::new(1.0, 0.0));
        }
        assert!(matches!(sample.fit(), Err(LimitSetError::DegenerateSample)));
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let gens = octagon_generators();
        let a = sample_limit_set(&gens, 64, 40, 11).unwrap();
        let b = sample_limit_set(&gens, 64, 40, 11).unwrap();
        assert_eq!(a.points, b.points);
        let c = sample_limit_set(&gens, 64, 40, 12).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn real_generators_sample_the_real_line() {
        let sample = sample_limit_set(&octagon_generators(), 400, 60, 3).unwrap();
        assert!(sample.points.len() > 300);
        for p in &sample.points {
            assert!(p.im.abs() < 1e-6, "point {} strays off the line", p);
        }
        let fit = sample.fit().unwrap();
        assert!(matches!(fit.kind, LocusKind::Line { .. }));
        assert!(fit.max_residual < 1e-6);
        assert!(fit.rms_residual <= fit.max_residual);
    }

    #[test]
    fn conjugated_real_generators_sample_a_circle() {
        let m = mobius();
        let det = m.det();
        let inv = {
            let adj = m.adjugate();
            Mat2 {
                a: adj.a / det,
                b: adj.b / det,
                c: adj.c / det,
                d: adj.d / det,
            }
        };
        let gens: Vec<Mat2<Complex64>> = octagon_generators()
            .iter()
            .map(|g| m.mul(g).mul(&inv))
            .collect();
        let sample = sample_limit_set(&gens, 600, 80, 5).unwrap();
        let fit = sample.fit().unwrap();
        let LocusKind::Circle { center, radius } = fit.kind else {
            panic!("conjugated real group should fit a circle");
        };
        assert!(fit.max_residual < 1e-6);
        // Oracle: the locus must be the image of the real line under the
        // conjugating map; check three images of real points.
        for x in [0.0, 1.0, -3.0] {
            let z = apply(&m, Complex64::new(x, 0.0));
            assert!(
                ((z - center).norm() - radius).abs() < 1e-6,
                "image of {} misses the fitted circle",
                x
            );
        }
        // Equivariance: group elements move sample points along the locus.
        for p in sample.points.iter().take(50) {
            let moved = apply(&gens[0], *p);
            assert!(((moved - center).norm() - radius).abs() < 1e-5);
        }
    }

    #[test]
    fn bent_generators_leave_visible_residuals() {
        let gens = bend(&octagon_generators(), &[2, 3], 0.2);
        let sample = sample_limit_set(&gens, 600, 80, 5).unwrap();
        let fit = sample.fit().unwrap();
        assert!(
            fit.max_residual > 0.01,
            "bent group looked circular: {}",
            fit.max_residual
        );
    }

    #[test]
    fn synthetic_circle_and_line_fit_exactly() {
        let circle: Vec<Complex64> = (0..100)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 100.0;
                Complex64::new(2.0 + 1.5 * t.cos(), -1.0 + 1.5 * t.sin())
            })
            .collect();
        let fit = fit_circle(&circle).unwrap();
        let LocusKind::Circle { center, radius } = fit.kind else {
            panic!("expected a circle");
        };
        assert!((center - Complex64::new(2.0, -1.0)).norm() < 1e-9);
        assert!((radius - 1.5).abs() < 1e-9);
        assert!(fit.max_residual < 1e-9);

        let line: Vec<Complex64> = (0..100)
            .map(|k| {
                let t = k as f64 / 10.0 - 5.0;
                Complex64::new(t, 0.5 * t + 2.0)
            })
            .collect();
        let fit = fit_circle(&line).unwrap();
        let LocusKind::Line { point, direction } = fit.kind else {
            panic!("expected a line");
        };
        assert!(fit.max_residual < 1e-9);
        assert!((point.im - (0.5 * point.re + 2.0)).abs() < 1e-9);
        assert!((direction.im / direction.re - 0.5).abs() < 1e-9);
    }

    #[test]
    fn residuals_are_invariant_under_euclidean_motions() {
        use rand_core::{RngCore, SeedableRng};
        let gens = bend(&octagon_generators(), &[2, 3], 0.2);
        let base = sample_limit_set(&gens, 200, 50, 9).unwrap();
        let reference = base.fit().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let unit = |r: &mut ChaCha8Rng| (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        for trial in 0..50 {
            let theta = unit(&mut rng) * 2.0 * std::f64::consts::PI;
            let shift = Complex64::new(unit(&mut rng) * 10.0 - 5.0, unit(&mut rng) * 10.0 - 5.0);
            let rot = Complex64::new(theta.cos(), theta.sin());
            let moved: Vec<Complex64> = base.points.iter().map(|p| p * rot + shift).collect();
            let fit = fit_circle(&moved).unwrap();
            assert!(
                (fit.max_residual - reference.max_residual).abs() < 1e-9,
                "trial {}: {} vs {}",
                trial,
                fit.max_residual,
                reference.max_residual
            );
            assert!((fit.rms_residual - reference.rms_residual).abs() < 1e-9);
        }
    }

    #[test]
    fn words_hitting_infinity_are_skipped_not_lied_about() {
        // z -> z/(1 - z) sends the base point 1 straight to infinity.
        let g = Mat2 {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(-1.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        };
        let sample = sample_limit_set(&[g], 60, 3, 1).unwrap();
        assert!(sample.skipped_infinite > 0);
        assert_eq!(sample.points.len() + sample.skipped_infinite, 60);
        for p in &sample.points {
            assert!(p.re.is_finite() && p.im.is_finite());
        }
    }

    #[test]
    fn rendering_is_byte_stable() {
        let sample = sample_limit_set(&octagon_generators(), 50, 20, 4).unwrap();
        let fit = sample.fit().unwrap();
        let svg1 = render_svg(&sample, Some(&fit));
        let svg2 = render_svg(&sample, Some(&fit));
        assert_eq!(svg1, svg2);
        assert!(svg1.starts_with("<svg "));
        assert!(svg1.contains("max residual"));
        let csv1 = render_csv(&sample);
        let csv2 = render_csv(&sample);
        assert_eq!(csv1, csv2);
        assert_eq!(csv1.lines().count(), sample.points.len());
        // Rotations by pi/2 keep the base point finite and on a known
        // two-point orbit, a cheap smoke test for the plane conversion.
        let tiny = sample_limit_set(&[rotation(std::f64::consts::FRAC_PI_2)], 10, 5, 2).unwrap();
        for p in &tiny.points {
            assert!((p.re.abs() - 1.0).abs() < 1e-12 && p.im.abs() < 1e-12);
        }
    }
}
