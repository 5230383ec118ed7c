//! Subcommand bodies. Each reads its inputs, calls the library, runs the
//! relevant invariant self-checks and returns a [`Report`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use fluidgeom::continuum_map::{
    build_rhat, definiteness_report, ContinuumState, DefinitenessReport, ModelKind, PressureLaw, StressModel,
};
use fluidgeom::dynamics::bianchi_consistency;
use fluidgeom::embedding::{
    build_shear_embedding, energy, fundamental_forms, induced_metric, is_short, ProfileAxis, EMBEDDING_TOL,
};
use fluidgeom::fields::{solve_pressure_poisson_with, Gauge, Grid3, PoissonConfig, Profile1D};
use fluidgeom::geometry::{normal_jet_metric, second_bianchi_residual, Curvature3, CurvaturePoint, Metric3};
use fluidgeom::linalg::SymMat3;
use fluidgeom::onset::{critical_profile_eval, fit_profile, transition_scan, ProfileFit, ProfileSample};
use serde_json::json;

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::fieldfile::{Encoding, FieldFile};
use crate::profile_csv::{read_profile, write_rows};
use crate::report::Report;
use crate::{AxisArg, DiagnoseArgs, DynamicsArgs, EmbedArgs, JetArgs, ModelArg, Output, PoissonArgs, RhatArgs};

const STATE_NAMES: [&str; 4] = ["rho", "u1", "u2", "u3"];
const MATRIX_NAMES: [&str; 6] = ["m11", "m22", "m33", "m12", "m13", "m23"];
const METRIC_NAMES: [&str; 6] = ["g11", "g22", "g33", "g12", "g13", "g23"];
const DEFORMATION_NAMES: [&str; 9] = ["F11", "F12", "F13", "F21", "F22", "F23", "F31", "F32", "F33"];

/// The closed form printed for `f′` alongside the geometric relation uses
/// arctan; it does not satisfy that relation and is not computed.
const ARCTAN_NOTE: &str = "an arctan closed form for f' is inconsistent with H = -f''/sqrt(B^2 + f'^2) = u1^2; \
                           f is integrated from that relation and checked against f' = -B sinh(int u1^2)";

fn new_report(echo: Vec<String>, config: &Config) -> Report {
    Report::new(echo, serde_json::to_value(config).expect("config serializes"))
}

fn encoding(config: &Config) -> Encoding {
    if config.output.binary_payload {
        Encoding::F64le
    } else {
        Encoding::Csv
    }
}

/// Report emitted alongside exit code 3.
pub fn failure_report(echo: Vec<String>, err: &CliError) -> Report {
    let mut r = Report::new(echo, serde_json::Value::Null);
    r.status = "numerical-failure";
    r.entry("error", "message", err.to_string());
    if let CliError::Core(e) = err {
        match e {
            fluidgeom::Error::NotConverged { iterations, residual } => {
                r.number("solve_periodic_poisson", "relative_residual", *residual);
                r.entry("solve_periodic_poisson", "iterations", iterations);
            }
            fluidgeom::Error::SingularMetric { index, det } | fluidgeom::Error::SingularDeformation { index, det } => {
                r.number("determinant", "det", *det);
                r.entry("determinant", "index", index);
            }
            fluidgeom::Error::NeighborhoodTooSmall { radius } => {
                r.number("normal_jet_metric", "radius", *radius);
            }
            fluidgeom::Error::Integrator { x, value } => {
                r.number("integrator", "x", *x);
                r.number("integrator", "last_good_value", *value);
            }
            fluidgeom::Error::NotPositiveDefinite { index } => {
                r.entry("metric", "index", index);
            }
            _ => {}
        }
    }
    r
}

fn add_definiteness(r: &mut Report, d: &DefinitenessReport, per_node: bool) {
    r.entry("definiteness_report", "all_positive_definite", d.all_positive_definite);
    r.entry("definiteness_report", "degenerate_nodes", d.degenerate_nodes);
    r.number("definiteness_report", "min_eigenvalue", d.min_eigenvalue);
    r.number("definiteness_report", "max_abs_det", d.max_abs_det);
    if per_node {
        let nodes: Vec<_> = d
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "det": n.det, "minor1": n.minor1, "minor2": n.minor2,
                    "eigenvalues": n.eigenvalues, "positive_definite": n.positive_definite,
                    "nondegenerate": n.nondegenerate,
                })
            })
            .collect();
        r.entry("node_definiteness", "nodes", nodes);
    }
    r.tolerance("definiteness", fluidgeom::continuum_map::DEFINITENESS_TOL);
}

fn read_law(path: &Path) -> CliResult<PressureLaw> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let (mut rho, mut p) = (Vec::new(), Vec::new());
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::input(format!("{}: line {}: {e}", path.display(), k + 2)))?;
        let num = |i: usize| -> CliResult<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| CliError::input(format!("{}: line {}: expected two numbers", path.display(), k + 2)))
        };
        rho.push(num(0)?);
        p.push(num(1)?);
    }
    Ok(PressureLaw::new(rho, p)?)
}

pub fn rhat(a: RhatArgs, config: Config, echo: Vec<String>) -> CliResult<Report> {
    let state_file = FieldFile::read(&a.state)?;
    let grid = state_file.grid;
    let rho = state_file.scalar(STATE_NAMES[0])?;
    let u = state_file.vector([STATE_NAMES[1], STATE_NAMES[2], STATE_NAMES[3]])?;
    let on_grid = |f: FieldFile, what: &str| -> CliResult<FieldFile> {
        if f.grid != grid {
            return Err(CliError::input(format!("{what} field is on a different grid from the state")));
        }
        Ok(f)
    };
    let pressure = match &a.p {
        Some(p) => Some(on_grid(FieldFile::read(p)?, "pressure")?.scalar("p")?),
        None => None,
    };
    let deformation = match &a.deformation {
        Some(p) => Some(on_grid(FieldFile::read(p)?, "deformation")?.tensor(DEFORMATION_NAMES)?),
        None => None,
    };
    let law = a.law.as_deref().map(read_law).transpose()?;
    let kind = match a.model {
        ModelArg::EulerC => ModelKind::EulerCompressible,
        ModelArg::EulerI => ModelKind::EulerIncompressible,
        ModelArg::Ns => ModelKind::NavierStokes,
        ModelArg::Neo => ModelKind::NeoHookean,
    };
    let model = StressModel::from_parts(kind, law, pressure, a.gamma, deformation)?;
    let state = ContinuumState::from_model(&model, rho, u)?;
    let rhat = build_rhat(&state)?;
    let definiteness = definiteness_report(&rhat.matrix)?;

    let mut r = new_report(echo, &config);
    r.grid(&grid);
    r.entry("build_rhat", "model", format!("{kind:?}"));
    add_definiteness(&mut r, &definiteness, config.output.per_node);
    if model.is_incompressible() {
        let div = state.divergence_report(config.numerics.divergence_tolerance)?;
        r.number("divergence_report", "max_abs_div_u", div.max_abs);
        r.entry("divergence_report", "flagged", div.flagged);
        r.tolerance("divergence", div.tolerance);
    }
    let back = Curvature3::from_matrix_field(&rhat.matrix);
    let round_trip = back.max_abs_diff(&rhat.curvature);
    r.check("build_rhat", "matrix_tensor_round_trip", round_trip == 0.0, round_trip, 0.0);
    if let Some(out) = &a.out {
        FieldFile::new(grid).with_sym(MATRIX_NAMES, &rhat.matrix).write(out, encoding(&config))?;
        r.entry("build_rhat", "output", out.display().to_string());
    }
    Ok(r)
}

pub fn diagnose(a: DiagnoseArgs, config: Config, echo: Vec<String>) -> CliResult<Report> {
    let f = FieldFile::read(&a.rhat)?;
    let m = f.sym(MATRIX_NAMES)?;
    let d = definiteness_report(&m)?;
    let mut r = new_report(echo, &config);
    r.grid(&f.grid);
    add_definiteness(&mut r, &d, config.output.per_node);
    let consistent = d.nodes.iter().all(|n| !n.positive_definite || n.eigenvalues[2] > 0.0);
    r.check("definiteness_report", "minors_agree_with_eigenvalues", consistent, consistent, true);
    Ok(r)
}

fn parse_grid_spec(spec: &str) -> CliResult<Grid3> {
    let bad = || CliError::input(format!("grid spec {spec:?} must be N:H with odd N >= 5 and H > 0"));
    let (n, h) = spec.split_once(':').ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let h: f64 = h.trim().parse().map_err(|_| bad())?;
    if n < 5 || n.is_multiple_of(2) || !(h.is_finite() && h > 0.0) {
        return Err(bad());
    }
    let half = (n / 2) as f64 * h;
    Grid3::new([n; 3], [h; 3], [-half; 3], [fluidgeom::fields::Boundary::Clamped; 3]).map_err(|e| CliError::input(e.to_string()))
}

pub fn jet(a: JetArgs, config: Config, echo: Vec<String>) -> CliResult<Report> {
    let grid = parse_grid_spec(&a.grid)?;
    let r0 = CurvaturePoint(a.rhat_at_point.clone().try_into().map_err(|_| CliError::input("--rhat-at-point needs 6 values"))?);
    let jet = normal_jet_metric(&r0, grid)?;
    let err = jet.round_trip_error()?;
    let recovered = jet.curvature_at_origin()?;
    let origin_metric = jet.metric.components().at(jet.origin);
    let mut r = new_report(echo, &config);
    r.grid(&grid);
    r.number("normal_jet_metric", "radius", jet.radius);
    r.entry("riemann_curvature", "recovered_at_origin", recovered.0);
    r.number("riemann_curvature", "round_trip_error", err);
    r.check("normal_jet_metric", "identity_at_origin", origin_metric == SymMat3::IDENTITY, origin_metric.0, 0.0);
    r.note("round-trip error is O(h^2); halve H to confirm the rate");
    if let Some(out) = &a.out {
        FieldFile::new(grid).with_sym(METRIC_NAMES, jet.metric.components()).write(out, encoding(&config))?;
        r.entry("normal_jet_metric", "output", out.display().to_string());
    }
    Ok(r)
}

pub fn poisson(a: PoissonArgs, config: Config, echo: Vec<String>) -> CliResult<Report> {
    let f = FieldFile::read(&a.u)?;
    let u = f.vector(["u1", "u2", "u3"])?;
    let cfg = PoissonConfig {
        tolerance: config.numerics.poisson_tolerance,
        max_iter_factor: config.numerics.poisson_max_iter_factor,
        ..PoissonConfig::default()
    };
    let sol = solve_pressure_poisson_with(&u, Gauge::ZeroMean, &cfg)?;
    let mut r = new_report(echo, &config);
    r.grid(&f.grid);
    r.tolerance("poisson", cfg.tolerance);
    r.entry("solve_pressure_poisson", "iterations", sol.iterations);
    r.number("solve_pressure_poisson", "max_abs_pressure", sol.pressure.max_abs());
    r.number("pressure_rhs", "rhs_mean", sol.rhs.mean());
    r.check(
        "solve_pressure_poisson",
        "relative_residual",
        sol.relative_residual <= cfg.tolerance,
        sol.relative_residual,
        cfg.tolerance,
    );
    let mean = sol.pressure.mean();
    r.check("solve_pressure_poisson", "zero_mean_gauge", mean.abs() <= 1e-12 * sol.pressure.max_abs().max(1.0), mean, 1e-12);
    if let Some(out) = &a.out {
        FieldFile::new(f.grid).with_scalar("p", &sol.pressure).write(out, encoding(&config))?;
        r.entry("solve_pressure_poisson", "output", out.display().to_string());
    }
    Ok(r)
}

pub fn embed(a: EmbedArgs, config: Config, echo: Vec<String>) -> CliResult<Report> {
    let profile = read_profile(&a.profile)?;
    let axis = match a.axis {
        AxisArg::X2 => ProfileAxis::X2,
        AxisArg::X3 => ProfileAxis::X3,
    };
    let e = build_shear_embedding(&profile, a.b, axis)?;
    let h = profile.spacing();
    let nt = config.numerics.transverse_nodes.max(5);
    let mut dims = [nt; 3];
    let mut lo = [0.0; 3];
    let mut hi = [(nt - 1) as f64 * h; 3];
    let p = axis.axis().index();
    dims[p] = profile.len();
    lo[p] = profile.start();
    hi[p] = profile.end();
    let grid = Grid3::clamped(dims, lo, hi)?;

    let induced = induced_metric(&e, grid)?;
    let forms = fundamental_forms(&e, grid)?;
    let target = e.target();
    let short = is_short(&Metric3::euclidean(grid), &target)?;
    let energy = energy(&target, grid)?;

    let mut r = new_report(echo, &config);
    r.grid(&grid);
    r.tolerance("embedding", EMBEDDING_TOL);
    r.number("build_shear_embedding", "rk4_half_step_change", e.step_error());
    r.number("induced_metric", "isometry_residual", induced.residual);
    r.number("fundamental_forms", "gauss_residual", forms.gauss_residual);
    r.number("fundamental_forms", "round_trip_residual", forms.round_trip_residual);
    r.number("fundamental_forms", "normal_connection_max", forms.normal_connection_max);
    r.number("is_short", "min_margin_vs_euclidean", short.min_margin);
    r.entry("is_short", "short_vs_euclidean", short.all_short);
    r.number("energy", "trace_integral", energy);
    r.check("fundamental_forms", "frame_orthonormal", forms.frame_residual <= EMBEDDING_TOL, forms.frame_residual, EMBEDDING_TOL);
    r.check("fundamental_forms", "gauss_lhs_zero", forms.gauss_lhs_max == 0.0, forms.gauss_lhs_max, 0.0);
    r.check("fundamental_forms", "codazzi_zero", forms.codazzi_residual == 0.0, forms.codazzi_residual, 0.0);
    r.note(ARCTAN_NOTE);
    if let Some(path) = &a.samples {
        let rows = (0..profile.len()).map(|k| {
            vec![
                profile.position(k),
                profile.values()[k],
                e.height().values()[k],
                e.slope().values()[k],
                forms.bending.values()[k],
            ]
        });
        write_rows(path, &["s", "u1", "f", "fp", "H"], rows)?;
        r.entry("build_shear_embedding", "samples", path.display().to_string());
    }
    Ok(r)
}

fn parse_metric_spec(spec: &str) -> CliResult<f64> {
    match spec.split_once(':') {
        None if spec == "euclidean" => Ok(0.0),
        None if spec == "perturbed" => Ok(0.01),
        Some(("perturbed", eps)) => eps
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|e| e.is_finite() && e.abs() < 1.0)
            .ok_or_else(|| CliError::input(format!("perturbation {eps:?} must be a number with |eps| < 1"))),
        _ => Err(CliError::input(format!("unknown metric {spec:?}; expected euclidean or perturbed[:EPS]"))),
    }
}

pub fn dynamics_check(a: DynamicsArgs, config: Config, echo: Vec<String>) -> CliResult<Report> {
    let eps = parse_metric_spec(&a.metric)?;
    if !(a.h.is_finite() && a.h > 0.0) {
        return Err(CliError::input(format!("--h must be positive, got {}", a.h)));
    }
    let n = ((2.0 * PI / a.h).round() as usize).max(fluidgeom::fields::MIN_DIM);
    let grid = Grid3::periodic([n; 3], [2.0 * PI; 3])?;
    let g = Metric3::analytic(grid, move |x| {
        let mut m = SymMat3::IDENTITY;
        m.0[0] += eps * x[1].sin() * x[2].sin();
        m
    })?;
    let rep = bianchi_consistency(&g)?;
    let bianchi = second_bianchi_residual(&g)?;
    let mut r = new_report(echo, &config);
    r.grid(&grid);
    r.number("bianchi_consistency", "max_abs_momentum_plus_flux_divergence", rep.residual);
    r.number("momentum_rhs", "max_abs_momentum", rep.momentum_scale);
    r.number("second_bianchi_residual", "max", bianchi.max());
    r.entry("bianchi_consistency", "excluded_layers", rep.excluded_layers);
    r.note("both residuals are O(h^2); compare two spacings to confirm the rate");
    Ok(r)
}

pub fn onset_fit(config: Config, echo: Vec<String>) -> CliResult<Report> {
    let [x3, u1] = config.onset.anchor;
    let anchor = ProfileSample::new(x3, u1)?;
    let fit = fit_profile(anchor, config.onset.reynolds)?;
    let mut r = new_report(echo, &config);
    for (label, f, s) in [
        ("exact", &fit.exact, fit.sqrt_p0_exact),
        ("paper-rounding", &fit.two_step, fit.sqrt_p0_rounded),
    ] {
        r.number("fit_profile", &format!("{label}.a"), f.a);
        r.number("fit_profile", &format!("{label}.p0"), f.p0);
        r.number("fit_profile", &format!("{label}.sqrt_p0"), s);
        r.number("fit_profile", &format!("{label}.reynolds"), f.reynolds);
        r.number("fit_profile", &format!("{label}.v"), f.v);
    }
    let back = critical_profile_eval(&fit.exact, x3)?;
    r.check("fit_profile", "anchor_reproduced", (back - u1).abs() <= 1e-12, back - u1, 1e-12);
    let inv = fit.exact.p0.sqrt() * fit.exact.reynolds - fit.exact.a;
    r.check("fit_profile", "a_equals_sqrt_p0_times_re", inv.abs() <= 4.0 * f64::EPSILON * fit.exact.a, inv, 4.0 * f64::EPSILON);
    r.note("paper-rounding rounds sqrt(p0) to 3 significant figures before multiplying by Re");
    Ok(r)
}

pub fn onset_profile(a: f64, n: usize, out: Option<PathBuf>) -> CliResult<Output> {
    if n < 2 {
        return Err(CliError::input("--n must be at least 2"));
    }
    let fit = ProfileFit::from_exponent(a, fluidgeom::onset::DEFAULT_REYNOLDS)?;
    let m = (n - 1) as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let x = (2.0 * k as f64 - m) / m;
            critical_profile_eval(&fit, x).map(|u| vec![x, u])
        })
        .collect::<Result<_, _>>()?;
    match out {
        Some(path) => {
            write_rows(&path, &["x3", "u1"], rows)?;
            Ok(Output::Text(String::new()))
        }
        None => {
            let mut text = String::from("x3,u1\n");
            for row in rows {
                text.push_str(&format!("{:?},{:?}\n", row[0], row[1]));
            }
            Ok(Output::Text(text))
        }
    }
}

pub fn onset_scan(
    profile_path: &Path,
    p0: f64,
    range: (f64, f64),
    out: Option<PathBuf>,
    config: Config,
    echo: Vec<String>,
) -> CliResult<Report> {
    let profile: Profile1D = read_profile(profile_path)?;
    let scan = transition_scan(&profile, None, p0, range, config.onset.bisection_iterations)?;
    let mut r = new_report(echo, &config);
    r.entry("transition_scan", "points", scan.points.len());
    r.entry("transition_scan", "out_of_range", scan.out_of_range);
    for (label, v) in [("min", scan.min), ("max", scan.max)] {
        match v {
            Some((g, x)) => {
                r.number("transition_scan", &format!("{label}.gamma_crit"), g);
                r.number("transition_scan", &format!("{label}.x3"), x);
                r.number("transition_scan", &format!("{label}.reynolds"), 1.0 / g);
            }
            None => {
                r.entry("transition_scan", &format!("{label}.gamma_crit"), serde_json::Value::Null);
            }
        }
    }
    let mut worst = 0.0_f64;
    for p in &scan.points {
        if let (Some(g), true) = (p.gamma_crit, p.u1p != 0.0) {
            let closed = fluidgeom::onset::critical_gamma(p0, p.u1, p.u1p)?;
            if closed <= range.1 {
                worst = worst.max((g - closed).abs() / closed.max(1.0));
            }
        }
    }
    let tol = 1e-10;
    r.check("transition_scan", "bisection_matches_closed_form", worst <= tol, worst, tol);
    if let Some(path) = &out {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| CliError::input(format!("{}: {e}", path.display()));
        w.write_record(["x3", "u1", "u1p", "gamma_crit"]).map_err(io)?;
        for p in &scan.points {
            let g = p.gamma_crit.map(|g| format!("{g:?}")).unwrap_or_default();
            w.write_record([format!("{:?}", p.x3), format!("{:?}", p.u1), format!("{:?}", p.u1p), g]).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
        r.entry("transition_scan", "output", path.display().to_string());
    }
    r.note("empty gamma_crit cells mark samples with no sign change in the scanned range");
    Ok(r)
}
