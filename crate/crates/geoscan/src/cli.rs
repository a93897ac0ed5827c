//! Command-line pipeline: validate triangulations, check single surfaces,
//! scan whole manifolds, and plot limit sets.
//!
//! Exit codes: 0 success, 1 negative verdict under --strict, 2 input
//! error, 3 incomplete run (budget or timeout), 4 internal inconsistency
//! such as a relator check failure.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::geodesic::{
    check_surface, scan_manifold, surface_generator_matrices, GeodesicConfig, GeodesicError,
    GeodesicVerdict, ScanReport,
};
use crate::holonomy::{matrices_from_path, HolonomyError, Mat2, Representation};
use crate::limitset::{fit_circle, render_csv, render_svg, sample_limit_set, CircleFit,
    LimitSetSample};
use crate::report::{
    check_json, fit_json, input_json, scan_json, wrap_report, SurfaceFile, SurfaceFileError,
};
use crate::triangulation::{file_sha256, IdealTriangulation, TriangulationError};
use crate::volume::compute_volume;
use crate::cusp;

pub const EXIT_OK: i32 = 0;
pub const EXIT_STRICT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser)]
#[command(
    name = "geoscan",
    version,
    about = "Finds totally geodesic closed normal surfaces in ideally triangulated cusped hyperbolic 3-manifolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct RunFlags {
    /// |Im tr| above this counts as off the real line in numeric mode.
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    /// Wall-clock budget per surface check, in seconds.
    #[arg(long, default_value_t = 5000.0)]
    pub timeout: f64,
    /// Replace the volume-derived Euler characteristic bound.
    #[arg(long = "euler-bound")]
    pub euler_bound: Option<i64>,
    /// Points to sample when plotting limit sets.
    #[arg(long, default_value_t = 10000)]
    pub points: usize,
    /// Largest random word length for limit-set sampling.
    #[arg(long = "max-word", default_value_t = 2000)]
    pub max_word: usize,
    /// RNG seed for limit-set sampling, recorded in reports.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Worker threads; falls back to GEOSCAN_THREADS, then to the
    /// available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Exit 1 when the verdict is negative (NotFuchsian, or a limit-set
    /// residual above the residual threshold).
    #[arg(long)]
    pub strict: bool,
    /// Require certified trace tests; fails if the input carries no exact
    /// shape data.
    #[arg(long)]
    pub exact: bool,
    /// Largest circle-fit max residual still reported as circle-like.
    #[arg(long = "residual-threshold", default_value_t = 1e-3)]
    pub residual_threshold: f64,
    /// Keep surfaces whose quads fully encircle an edge class instead of
    /// skipping them.
    #[arg(long = "no-tube-filter")]
    pub no_tube_filter: bool,
    /// Cap on simultaneous rays during enumeration; exceeding it marks
    /// the scan incomplete.
    #[arg(long = "max-rays")]
    pub max_rays: Option<usize>,
    /// Cap on search nodes per enumeration stage; exceeding it marks the
    /// scan incomplete.
    #[arg(long = "max-nodes")]
    pub max_nodes: Option<u64>,
    /// Directory for report, SVG, and CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse a triangulation and verify the gluing and completeness
    /// equations; print residuals and the volume.
    Validate {
        /// Triangulation JSON file.
        tri: PathBuf,
    },
    /// Decide whether one normal surface is a totally geodesic candidate.
    Check {
        /// Triangulation JSON file.
        tri: PathBuf,
        /// Surface JSON file with the 7t coordinate vector.
        surface: PathBuf,
        /// Take manifold group matrices from a file instead of developing
        /// them from the shapes.
        #[arg(long)]
        matrices: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Enumerate closed surfaces up to the Euler bound and check each.
    Scan {
        /// Triangulation JSON file.
        tri: PathBuf,
        /// Take manifold group matrices from a file instead of developing
        /// them from the shapes.
        #[arg(long)]
        matrices: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Sample a limit set and fit a circle; write SVG and CSV.
    Limitset {
        /// Triangulation JSON file (with a surface file), or omit and
        /// pass --matrices.
        tri: Option<PathBuf>,
        /// Surface JSON file naming the subgroup to sample.
        surface: Option<PathBuf>,
        /// Sample the group generated by the matrices in this file.
        #[arg(long)]
        matrices: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<TriangulationError> for Failure {
    fn from(e: TriangulationError) -> Self {
        Failure::input(format!("triangulation: {e}"))
    }
}

impl From<SurfaceFileError> for Failure {
    fn from(e: SurfaceFileError) -> Self {
        Failure::input(format!("surface: {e}"))
    }
}

impl From<HolonomyError> for Failure {
    fn from(e: HolonomyError) -> Self {
        let code = match &e {
            // The developed representation failed its own relator check:
            // the tool's output would be meaningless, not the user's fault.
            HolonomyError::InconsistentDevelopment { .. }
            | HolonomyError::ExactlyInconsistent { .. } => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: format!("holonomy: {e}"),
        }
    }
}

impl From<GeodesicError> for Failure {
    fn from(e: GeodesicError) -> Self {
        let code = match &e {
            GeodesicError::Timeout { .. } => EXIT_INCOMPLETE,
            GeodesicError::Enumeration(_) => EXIT_INCOMPLETE,
            GeodesicError::Surface(_) | GeodesicError::Group(_) | GeodesicError::MalformedDouble => {
                EXIT_INPUT
            }
            GeodesicError::Holonomy(_) | GeodesicError::Exact(_) => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: format!("{e}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(format!("io: {e}"))
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Validate { tri } => cmd_validate(&tri),
        Command::Check {
            tri,
            surface,
            matrices,
            flags,
        } => cmd_check(&tri, &surface, matrices.as_deref(), &flags),
        Command::Scan {
            tri,
            matrices,
            flags,
        } => cmd_scan(&tri, matrices.as_deref(), &flags),
        Command::Limitset {
            tri,
            surface,
            matrices,
            flags,
        } => cmd_limitset(tri.as_deref(), surface.as_deref(), matrices.as_deref(), &flags),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("geoscan: {}", f.message);
            f.code
        }
    }
}

fn resolve_threads(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("GEOSCAN_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
}

fn geodesic_config(flags: &RunFlags) -> Result<GeodesicConfig, Failure> {
    if !(flags.threshold > 0.0) {
        return Err(Failure::input("--threshold must be positive"));
    }
    if !(flags.timeout > 0.0) {
        return Err(Failure::input("--timeout must be positive"));
    }
    let mut config = GeodesicConfig::default();
    config.imaginary_threshold = flags.threshold;
    config.surface_timeout = Duration::from_secs_f64(flags.timeout);
    config.euler_bound_override = flags.euler_bound;
    config.tube_filter = !flags.no_tube_filter;
    config.threads = resolve_threads(flags.threads);
    if let Some(rays) = flags.max_rays {
        config.enumeration.max_rays = rays;
    }
    if let Some(nodes) = flags.max_nodes {
        config.enumeration.max_box_nodes = nodes;
        config.enumeration.max_combo_nodes = nodes;
    }
    Ok(config)
}

fn config_json(flags: &RunFlags) -> Value {
    json!({
        "threshold_im": flags.threshold,
        "surface_timeout_s": flags.timeout,
        "euler_bound_override": flags.euler_bound,
        "points": flags.points,
        "max_word": flags.max_word,
        "seed": flags.seed,
        "threads": resolve_threads(flags.threads),
        "strict": flags.strict,
        "exact": flags.exact,
        "residual_threshold": flags.residual_threshold,
        "tube_filter": !flags.no_tube_filter,
    })
}

fn load_triangulation(path: &Path) -> Result<(IdealTriangulation<f64>, Value), Failure> {
    let tri = IdealTriangulation::from_path(path)?;
    let sha = match tri.source_sha256() {
        Some(s) => s.to_string(),
        None => file_sha256(path)?,
    };
    Ok((tri, input_json(path, &sha)))
}

fn build_representation(
    tri: &IdealTriangulation<f64>,
    matrices: Option<&Path>,
    exact_required: bool,
) -> Result<Representation<f64>, Failure> {
    let rep = match matrices {
        Some(path) => Representation::from_matrix_file(tri, path, 1e-6)?,
        None => Representation::from_shapes(tri, 1e-6)?,
    };
    if exact_required && rep.exact.is_none() {
        return Err(Failure::input(
            "--exact requires exact shape data in the triangulation and shape-developed matrices",
        ));
    }
    Ok(rep)
}

fn ensure_out_dir(out: &Option<PathBuf>) -> Result<(), Failure> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn write_if_out(out: &Option<PathBuf>, name: &str, bytes: &str) -> Result<Option<String>, Failure> {
    match out {
        Some(dir) => {
            let path = dir.join(name);
            std::fs::write(&path, bytes)?;
            Ok(Some(path.display().to_string()))
        }
        None => Ok(None),
    }
}

/// Samples the limit set of the traced surface group and fits a circle;
/// returns the JSON summary plus rendered SVG and CSV.
fn limit_set_attachment(
    generators: &[Mat2<Complex64>],
    flags: &RunFlags,
) -> (Value, String, String) {
    let sample = match sample_limit_set(generators, flags.points, flags.max_word, flags.seed) {
        Ok(s) => s,
        Err(e) => return (json!({ "error": e.to_string() }), String::new(), String::new()),
    };
    let fit = sample.fit().ok();
    let svg = render_svg(&sample, fit.as_ref());
    let csv = render_csv(&sample);
    let summary = match &fit {
        Some(fit) => {
            let mut v = fit_json(&sample, fit);
            v["circle_like"] = json!(circle_like(fit, flags));
            v
        }
        None => json!({ "error": "degenerate sample, no locus fitted" }),
    };
    (summary, svg, csv)
}

fn circle_like(fit: &CircleFit<f64>, flags: &RunFlags) -> bool {
    fit.max_residual <= flags.residual_threshold
}

fn is_candidate(verdict: &GeodesicVerdict) -> bool {
    matches!(
        verdict,
        GeodesicVerdict::TotallyGeodesicCandidate { .. }
            | GeodesicVerdict::NonOrientableTotallyGeodesicCandidate { .. }
            | GeodesicVerdict::FuchsianDoubleCover { .. }
    )
}

fn print_report(report: &Value) {
    println!("{}", serde_json::to_string_pretty(report).expect("serializable report"));
}

// ---------------------------------------------------------------------------
// validate

fn cmd_validate(tri_path: &Path) -> Result<i32, Failure> {
    let (tri, input) = load_triangulation(tri_path)?;
    let gluing = cusp::validate_gluing_equations(&tri, 1e-9);
    let volume = compute_volume(&tri);
    let flat = tri.flat_tets();
    let report = wrap_report(
        "validate",
        json!({ "tolerance": gluing.tolerance }),
        vec![input],
        json!({
            "name": tri.name(),
            "tetrahedra": tri.num_tetrahedra(),
            "volume": volume,
            "edge_residuals": gluing.edge_residuals,
            "max_edge_residual": gluing.max_edge_residual(),
            "cusps": gluing.cusps.iter().map(|c| json!({
                "index": c.index,
                "link_triangles": c.link_triangles,
                "euler_characteristic": c.euler_characteristic,
                "generator_residuals": c.generator_residuals,
            })).collect::<Vec<_>>(),
            "max_cusp_residual": gluing.max_cusp_residual(),
            "flat_tetrahedra": flat,
            "passes": gluing.passes(),
        }),
    );
    print_report(&report);
    if !flat.is_empty() {
        eprintln!(
            "geoscan: warning: flat tetrahedra {:?} contribute no volume",
            flat
        );
    }
    if gluing.passes() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::input(format!(
            "gluing equations fail: max edge residual {:.3e}, max cusp residual {:.3e}",
            gluing.max_edge_residual(),
            gluing.max_cusp_residual()
        )))
    }
}

// ---------------------------------------------------------------------------
// check

fn cmd_check(
    tri_path: &Path,
    surface_path: &Path,
    matrices: Option<&Path>,
    flags: &RunFlags,
) -> Result<i32, Failure> {
    ensure_out_dir(&flags.out)?;
    let (tri, tri_input) = load_triangulation(tri_path)?;
    let mut inputs = vec![tri_input];
    inputs.push(input_json(surface_path, &file_sha256(surface_path)?));
    if let Some(m) = matrices {
        inputs.push(input_json(m, &file_sha256(m)?));
    }
    let vector = SurfaceFile::from_path(surface_path)?
        .into_vector(tri.num_tetrahedra(), tri.source_sha256())?;
    let rep = build_representation(&tri, matrices, flags.exact)?;
    let config = geodesic_config(flags)?;
    let check = check_surface(&tri, &rep, &vector, &config)?;
    let mut body = check_json(&check);
    let strict_negative = matches!(check.verdict, GeodesicVerdict::NotFuchsian { .. });
    if is_candidate(&check.verdict) {
        let generators = surface_generator_matrices(&tri, &rep, &vector)?;
        let (summary, svg, csv) = limit_set_attachment(&generators, flags);
        body["limit_set"] = summary;
        if let Some(path) = write_if_out(&flags.out, "limitset.svg", &svg)? {
            body["limit_set"]["svg"] = json!(path);
        }
        if let Some(path) = write_if_out(&flags.out, "limitset.csv", &csv)? {
            body["limit_set"]["csv"] = json!(path);
        }
    }
    let report = wrap_report("check", config_json(flags), inputs, body);
    print_report(&report);
    write_if_out(
        &flags.out,
        "check.json",
        &serde_json::to_string_pretty(&report).expect("serializable report"),
    )?;
    if flags.strict && strict_negative {
        Ok(EXIT_STRICT)
    } else {
        Ok(EXIT_OK)
    }
}

// ---------------------------------------------------------------------------
// scan

fn attach_candidate_outputs(
    report: &ScanReport,
    body: &mut Value,
    tri: &IdealTriangulation<f64>,
    rep: &Representation<f64>,
    tri_sha: Option<&str>,
    flags: &RunFlags,
) -> Result<(), Failure> {
    let mut candidate_index = 0usize;
    for (i, row) in report.rows.iter().enumerate() {
        let Some(check) = &row.check else { continue };
        if !is_candidate(&check.verdict) {
            continue;
        }
        let generators = surface_generator_matrices(tri, rep, &row.vector)?;
        let (summary, svg, csv) = limit_set_attachment(&generators, flags);
        body["surfaces"][i]["limit_set"] = summary;
        let stem = format!("candidate_{candidate_index}");
        if let Some(path) = write_if_out(&flags.out, &format!("{stem}.svg"), &svg)? {
            body["surfaces"][i]["limit_set"]["svg"] = json!(path);
        }
        if let Some(path) = write_if_out(&flags.out, &format!("{stem}.csv"), &csv)? {
            body["surfaces"][i]["limit_set"]["csv"] = json!(path);
        }
        let surface_file = SurfaceFile {
            coordinates: row.vector.coords.clone(),
            triangulation_hash: tri_sha.map(|s| s.to_string()),
        };
        if let Some(path) = write_if_out(
            &flags.out,
            &format!("{stem}.surface.json"),
            &serde_json::to_string_pretty(&surface_file).expect("serializable surface"),
        )? {
            body["surfaces"][i]["surface_file"] = json!(path);
        }
        candidate_index += 1;
    }
    Ok(())
}

fn cmd_scan(tri_path: &Path, matrices: Option<&Path>, flags: &RunFlags) -> Result<i32, Failure> {
    ensure_out_dir(&flags.out)?;
    let (tri, tri_input) = load_triangulation(tri_path)?;
    let mut inputs = vec![tri_input];
    if let Some(m) = matrices {
        inputs.push(input_json(m, &file_sha256(m)?));
    }
    let rep = build_representation(&tri, matrices, flags.exact)?;
    let config = geodesic_config(flags)?;
    let scan = scan_manifold(&tri, &rep, &config)?;
    let mut body = scan_json(&scan);
    attach_candidate_outputs(&scan, &mut body, &tri, &rep, tri.source_sha256(), flags)?;
    let report = wrap_report("scan", config_json(flags), inputs, body);
    print_report(&report);
    write_if_out(
        &flags.out,
        "scan.json",
        &serde_json::to_string_pretty(&report).expect("serializable report"),
    )?;
    if !scan.complete {
        return Err(Failure {
            code: EXIT_INCOMPLETE,
            message: format!(
                "scan incomplete: {}",
                scan.enumeration_error.as_deref().unwrap_or("budget exhausted")
            ),
        });
    }
    let any_not_fuchsian = scan.rows.iter().any(|r| {
        matches!(
            r.check.as_ref().map(|c| &c.verdict),
            Some(GeodesicVerdict::NotFuchsian { .. })
        )
    });
    if flags.strict && any_not_fuchsian {
        Ok(EXIT_STRICT)
    } else {
        Ok(EXIT_OK)
    }
}

// ---------------------------------------------------------------------------
// limitset

fn cmd_limitset(
    tri_path: Option<&Path>,
    surface_path: Option<&Path>,
    matrices: Option<&Path>,
    flags: &RunFlags,
) -> Result<i32, Failure> {
    ensure_out_dir(&flags.out)?;
    let mut inputs = Vec::new();
    let generators: Vec<Mat2<Complex64>> = match (tri_path, surface_path, matrices) {
        (_, _, Some(m)) if tri_path.is_none() => {
            inputs.push(input_json(m, &file_sha256(m)?));
            matrices_from_path(m).map_err(Failure::from)?
        }
        (Some(t), Some(s), m) => {
            let (tri, tri_input) = load_triangulation(t)?;
            inputs.push(tri_input);
            inputs.push(input_json(s, &file_sha256(s)?));
            if let Some(m) = m {
                inputs.push(input_json(m, &file_sha256(m)?));
            }
            let vector = SurfaceFile::from_path(s)?
                .into_vector(tri.num_tetrahedra(), tri.source_sha256())?;
            let rep = build_representation(&tri, m, flags.exact)?;
            surface_generator_matrices(&tri, &rep, &vector)?
        }
        _ => {
            return Err(Failure::input(
                "limitset needs either TRI SURFACE or --matrices FILE",
            ));
        }
    };
    let sample: LimitSetSample<f64> =
        sample_limit_set(&generators, flags.points, flags.max_word, flags.seed)
            .map_err(|e| Failure::input(e.to_string()))?;
    let fit = fit_circle(&sample.points).ok();
    let svg = render_svg(&sample, fit.as_ref());
    let csv = render_csv(&sample);
    let mut body = match &fit {
        Some(f) => {
            let mut v = json!({ "limit_set": fit_json(&sample, f) });
            v["limit_set"]["circle_like"] = json!(circle_like(f, flags));
            v
        }
        None => json!({ "limit_set": { "error": "degenerate sample, no locus fitted" } }),
    };
    if let Some(path) = write_if_out(&flags.out, "limitset.svg", &svg)? {
        body["limit_set"]["svg"] = json!(path);
    }
    if let Some(path) = write_if_out(&flags.out, "limitset.csv", &csv)? {
        body["limit_set"]["csv"] = json!(path);
    }
    let report = wrap_report("limitset", config_json(flags), inputs, body);
    print_report(&report);
    let circle_ok = fit.as_ref().map(|f| circle_like(f, flags)).unwrap_or(false);
    if flags.strict && !circle_ok {
        Ok(EXIT_STRICT)
    } else {
        Ok(EXIT_OK)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_line_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn threads_fall_back_to_the_environment() {
        assert_eq!(resolve_threads(Some(3)), Some(3));
        // The env fallback is read at call time; with the variable unset
        // the resolution stays None.
        std::env::remove_var("GEOSCAN_THREADS");
        assert_eq!(resolve_threads(None), None);
    }

    #[test]
    fn bad_flag_values_are_input_errors() {
        let mut flags = RunFlags {
            threshold: 0.01,
            timeout: 5000.0,
            euler_bound: None,
            points: 100,
            max_word: 50,
            seed: 7,
            threads: None,
            strict: false,
            exact: false,
            residual_threshold: 1e-3,
            no_tube_filter: false,
            max_rays: None,
            max_nodes: None,
            out: None,
        };
        assert!(geodesic_config(&flags).is_ok());
        flags.threshold = 0.0;
        assert_eq!(geodesic_config(&flags).unwrap_err().code, EXIT_INPUT);
        flags.threshold = 0.01;
        flags.timeout = -1.0;
        assert_eq!(geodesic_config(&flags).unwrap_err().code, EXIT_INPUT);
    }
}
