//! `renvol`: runs the model computations, convergence studies and
//! cross-validation suites, emitting JSON or CSV reports.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical non-convergence
//! (including acceptance criteria that fail).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use renvol_core::adapted::{correction_max, epsilon1_threshold, full_annulus_l1_report, CurveSystem};
use renvol_core::cusp::{
    boundary_term_b, cusp_w_volume, cusp_w_volume_engine, rho_of_eps, truncated_cusp_renvol,
    truncated_cusp_renvol_eps_form, CuspTruncation, Schedule,
};
use renvol_core::epstein::{epstein_point, forms_at_infinity};
use renvol_core::extrapolate::{fit_limit, SchedulePoint};
use renvol_core::field::{Holomorphic, PerturbedCuspField};
use renvol_core::tube::{tube_w_volume, tube_w_volume_direct, tube_wvol_asymptote, TubeSpec};
use renvol_core::{Complex, ConformalMetric, CoreError, QuadratureConfig};

#[derive(Parser)]
#[command(name = "renvol", version, about = "Epstein surfaces, W-volumes and the adapted renormalized volume")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for quadrature cells and enumeration subtrees
    /// (values are identical for any degree).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the Epstein surface of a model metric over a radial grid.
    Epstein(EpsteinArgs),
    /// W-volume of a cusp annulus or tube, by one or both routes.
    Wvol(WvolArgs),
    /// Convergence table and extrapolated limit of a renormalized volume.
    RenvolLimit(RenvolLimitArgs),
    /// Multicurve correction term of a curve system from a JSON file.
    Adapted(AdaptedArgs),
    /// Run the full acceptance suite.
    Check(CheckArgs),
}

#[derive(Args)]
struct EpsteinArgs {
    #[arg(long, value_enum)]
    metric: MetricKind,
    /// Core length for the tube metric.
    #[arg(long)]
    ell: Option<f64>,
    /// Constant Liouville field for the flat metric.
    #[arg(long, default_value_t = 0.0)]
    phi0: f64,
    /// Linear coefficient "re,im" of the holomorphic perturbation psi(z) = a z.
    #[arg(long)]
    psi_a: Option<String>,
    #[arg(long)]
    rho_min: f64,
    #[arg(long)]
    rho_max: f64,
    /// Number of grid rows (geometric in radius).
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Fixed angular coordinate of the grid.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MetricKind {
    Cusp,
    Tube,
    Flat,
    Perturbed,
}

#[derive(Args)]
struct WvolArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    rho1: Option<f64>,
    #[arg(long)]
    rho2: Option<f64>,
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = Route::Both)]
    route: Route,
    /// Also report the residual against the divergence asymptote (tube).
    #[arg(long)]
    asymptote: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Cusp,
    Tube,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Route {
    Direct,
    ClosedForm,
    Polyakov,
    Both,
}

#[derive(Args)]
struct RenvolLimitArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Outer truncation, as a horocycle length (cusp model).
    #[arg(long)]
    eps_bar: Option<f64>,
    /// Boundary length of the tube model.
    #[arg(long)]
    eps: Option<f64>,
    /// Schedule: "k0:k1" for rho = 10^-k decades (cusp), or a comma list of
    /// radii (cusp) / core lengths (tube), strictly decreasing.
    #[arg(long)]
    schedule: String,
    /// Use the horocycle-length form of the counterterms (cusp).
    #[arg(long)]
    eps_form: bool,
}

#[derive(Args)]
struct AdaptedArgs {
    /// CurveSystem JSON document.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0x5eed_2026)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized; --jobs ignored");
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<CoreError>() {
                Some(CoreError::Validation(_)) | Some(CoreError::OutsideDomain(_)) => 2,
                Some(_) => 3,
                None => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let cfg = QuadratureConfig::with_rel_tol(cli.tol);
    cfg.validate()?;
    match &cli.command {
        Command::Epstein(args) => cmd_epstein(cli, &cfg, args),
        Command::Wvol(args) => cmd_wvol(cli, &cfg, args),
        Command::RenvolLimit(args) => cmd_renvol_limit(cli, &cfg, args),
        Command::Adapted(args) => cmd_adapted(cli, args),
        Command::Check(args) => cmd_check(cli, args),
    }
}

fn write_output(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path:?}"))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Full-precision decimal for CSV cells (17 significant digits).
fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct EpsteinRow {
    rho: f64,
    theta: f64,
    surface_x: f64,
    surface_y: f64,
    surface_t: f64,
    mean_curvature: f64,
    q_re: f64,
    q_im: f64,
    gauss_curvature: f64,
}

fn parse_complex(text: &str) -> anyhow::Result<Complex> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(anyhow!(CoreError::Validation(format!(
            "expected \"re,im\", got {text:?}"
        ))));
    }
    Ok(Complex::new(parts[0].trim().parse()?, parts[1].trim().parse()?))
}

fn build_metric(args: &EpsteinArgs) -> anyhow::Result<ConformalMetric> {
    if !(args.rho_min > 0.0 && args.rho_min <= args.rho_max) {
        return Err(anyhow!(CoreError::Validation(format!(
            "grid needs 0 < rho_min <= rho_max, got ({}, {})",
            args.rho_min, args.rho_max
        ))));
    }
    let domain = renvol_core::field::Domain::annulus(args.rho_min * 0.98, args.rho_max * 1.02)?;
    Ok(match args.metric {
        MetricKind::Cusp => {
            if args.rho_max * 1.02 >= 1.0 {
                return Err(anyhow!(CoreError::Validation(
                    "cusp grid must stay inside the punctured unit disk".into()
                )));
            }
            ConformalMetric::new(domain, Arc::new(renvol_core::field::CuspField))
        }
        MetricKind::Tube => {
            let ell = args.ell.ok_or_else(|| {
                anyhow!(CoreError::Validation("tube metric needs --ell".into()))
            })?;
            ConformalMetric::new(domain, Arc::new(renvol_core::field::TubeField::new(ell)?))
        }
        MetricKind::Flat => ConformalMetric::new(
            domain,
            Arc::new(renvol_core::field::ConstField(args.phi0)),
        ),
        MetricKind::Perturbed => {
            let a = parse_complex(args.psi_a.as_deref().ok_or_else(|| {
                anyhow!(CoreError::Validation(
                    "perturbed metric needs --psi-a re,im".into()
                ))
            })?)?;
            ConformalMetric::new(
                domain,
                Arc::new(PerturbedCuspField {
                    psi: Holomorphic::linear(a),
                }),
            )
        }
    })
}

fn cmd_epstein(cli: &Cli, _cfg: &QuadratureConfig, args: &EpsteinArgs) -> anyhow::Result<ExitCode> {
    let mut rows: Vec<EpsteinRow> = Vec::with_capacity(args.count);
    if args.count > 0 {
        let metric = build_metric(args)?;
        for i in 0..args.count {
            let f = if args.count == 1 {
                0.0
            } else {
                i as f64 / (args.count - 1) as f64
            };
            let rho = args.rho_min * (args.rho_max / args.rho_min).powf(f);
            let z = Complex::from_polar(rho, args.theta);
            let frame = forms_at_infinity(&metric, z)?;
            let p = epstein_point(&metric, z)?;
            rows.push(EpsteinRow {
                rho,
                theta: args.theta,
                surface_x: p.horizontal.re,
                surface_y: p.horizontal.im,
                surface_t: p.height,
                mean_curvature: frame.mean_curvature,
                q_re: frame.q.0,
                q_im: frame.q.1,
                gauss_curvature: metric.gaussian_curvature(z)?,
            });
        }
    }
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut out = String::from(
                "rho,theta,surface_x,surface_y,surface_t,mean_curvature,q_re,q_im,gauss_curvature\n",
            );
            for r in &rows {
                out += &[
                    csv_num(r.rho),
                    csv_num(r.theta),
                    csv_num(r.surface_x),
                    csv_num(r.surface_y),
                    csv_num(r.surface_t),
                    csv_num(r.mean_curvature),
                    csv_num(r.q_re),
                    csv_num(r.q_im),
                    csv_num(r.gauss_curvature),
                ]
                .join(",");
                out.push('\n');
            }
            out
        }
    };
    write_output(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct WvolOutput {
    model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct: Option<renvol_core::WVolumeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<renvol_core::WVolumeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polyakov_route: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    route_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptote: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptote_residual: Option<f64>,
}

fn cmd_wvol(cli: &Cli, cfg: &QuadratureConfig, args: &WvolArgs) -> anyhow::Result<ExitCode> {
    let out = match args.model {
        ModelKind::Cusp => {
            let (rho1, rho2) = require_pair(args.rho1, args.rho2, "--rho1/--rho2")?;
            let tr = CuspTruncation::new(rho1, rho2)?;
            let mut out = WvolOutput {
                model: "cusp".into(),
                direct: None,
                closed_form: None,
                polyakov_route: None,
                route_delta: None,
                asymptote: None,
                asymptote_residual: None,
            };
            if matches!(args.route, Route::Direct | Route::Both) {
                out.direct = Some(cusp_w_volume_engine(&tr, cfg)?);
            }
            if matches!(args.route, Route::ClosedForm | Route::Both | Route::Polyakov) {
                out.closed_form = Some(cusp_w_volume(&tr)?);
            }
            if let (Some(a), Some(b)) = (&out.direct, &out.closed_form) {
                out.route_delta = Some((a.total_w - b.total_w).abs());
            }
            out
        }
        ModelKind::Tube => {
            let (ell, eps) = require_pair(args.ell, args.eps, "--ell/--eps")?;
            let spec = TubeSpec::new(ell, eps)?;
            let mut out = WvolOutput {
                model: "tube".into(),
                direct: None,
                closed_form: None,
                polyakov_route: None,
                route_delta: None,
                asymptote: None,
                asymptote_residual: None,
            };
            match args.route {
                Route::Direct => out.direct = Some(tube_w_volume_direct(&spec, cfg)?),
                Route::Polyakov | Route::ClosedForm | Route::Both => {
                    let both = tube_w_volume(&spec, cfg)?;
                    out.polyakov_route = Some(both.polyakov_route);
                    out.route_delta = Some(both.route_gap);
                    out.direct = Some(both.direct);
                }
            }
            if args.asymptote {
                let asym = tube_wvol_asymptote(&spec)?;
                out.asymptote = Some(asym);
                if let Some(d) = &out.direct {
                    out.asymptote_residual = Some(d.total_w - asym);
                }
            }
            out
        }
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out)? + "\n",
        Format::Csv => {
            let w = out
                .direct
                .as_ref()
                .or(out.closed_form.as_ref())
                .map(|r| r.total_w)
                .unwrap_or(f64::NAN);
            let mut s = String::from("model,total_w,route_delta,asymptote_residual\n");
            s += &format!(
                "{},{},{},{}\n",
                out.model,
                csv_num(w),
                out.route_delta.map(csv_num).unwrap_or_default(),
                out.asymptote_residual.map(csv_num).unwrap_or_default()
            );
            s
        }
    };
    write_output(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn require_pair(a: Option<f64>, b: Option<f64>, what: &str) -> anyhow::Result<(f64, f64)> {
    match (a, b) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(anyhow!(CoreError::Validation(format!("{what} required")))),
    }
}

#[derive(Serialize)]
struct LimitRow {
    parameter: f64,
    value: f64,
    increment: Option<f64>,
}

#[derive(Serialize)]
struct LimitOutput {
    model: String,
    rows: Vec<LimitRow>,
    fitted_rate: Option<f64>,
    extrapolated_limit: Option<f64>,
    rate_fit_failed: bool,
}

fn parse_schedule(text: &str) -> anyhow::Result<Vec<f64>> {
    if let Some((a, b)) = text.split_once(':') {
        let k0: u32 = a.trim().parse()?;
        let k1: u32 = b.trim().parse()?;
        if k1 < k0 {
            return Err(anyhow!(CoreError::Validation(
                "schedule k0:k1 needs k0 <= k1".into()
            )));
        }
        Ok((k0..=k1).map(|k| 10f64.powi(-(k as i32))).collect())
    } else {
        let vals: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
        Ok(vals?)
    }
}

fn cmd_renvol_limit(
    cli: &Cli,
    cfg: &QuadratureConfig,
    args: &RenvolLimitArgs,
) -> anyhow::Result<ExitCode> {
    let schedule = parse_schedule(&args.schedule)?;
    for w in schedule.windows(2) {
        if !(w[1] < w[0]) {
            return Err(anyhow!(CoreError::Validation(
                "schedule must be strictly decreasing".into()
            )));
        }
    }
    let out = match args.model {
        ModelKind::Cusp => {
            let eps_bar = args.eps_bar.ok_or_else(|| {
                anyhow!(CoreError::Validation("cusp model needs --eps-bar".into()))
            })?;
            let rho_bar = rho_of_eps(eps_bar);
            let sched = Schedule { radii: schedule };
            let fit = if args.eps_form {
                truncated_cusp_renvol_eps_form(rho_bar, &sched)
            } else {
                truncated_cusp_renvol(rho_bar, &sched)
            };
            match fit {
                Ok(fit) => LimitOutput {
                    model: "cusp".into(),
                    rows: rows_from_points(&fit.points, &sched.radii),
                    fitted_rate: Some(fit.rate),
                    extrapolated_limit: Some(fit.limit),
                    rate_fit_failed: false,
                },
                Err(CoreError::NonConvergent(_)) => {
                    // emit the raw table anyway, flagging the failed fit
                    let pts: Vec<SchedulePoint> = sched
                        .radii
                        .iter()
                        .map(|&rho| {
                            let tr = CuspTruncation::new(rho, rho_bar)?;
                            Ok(SchedulePoint {
                                x: 1.0 / rho.ln().abs(),
                                value: cusp_w_volume(&tr)?.total_w - 0.5 * PI * rho.ln()
                                    + boundary_term_b(rho)?,
                            })
                        })
                        .collect::<Result<_, CoreError>>()?;
                    LimitOutput {
                        model: "cusp".into(),
                        rows: rows_from_points(&pts, &sched.radii),
                        fitted_rate: None,
                        extrapolated_limit: None,
                        rate_fit_failed: true,
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
        ModelKind::Tube => {
            let eps = args
                .eps
                .ok_or_else(|| anyhow!(CoreError::Validation("tube model needs --eps".into())))?;
            let mut pts = Vec::new();
            for &ell in &schedule {
                let spec = TubeSpec::new(ell, eps)?;
                let w = tube_w_volume_direct(&spec, cfg)?.total_w;
                pts.push(SchedulePoint {
                    x: ell,
                    value: w + PI.powi(3) / ell,
                });
            }
            match fit_limit(&pts) {
                Ok(fit) => LimitOutput {
                    model: "tube".into(),
                    rows: rows_from_points(&fit.points, &schedule),
                    fitted_rate: Some(fit.rate),
                    extrapolated_limit: Some(fit.limit),
                    rate_fit_failed: false,
                },
                Err(_) => LimitOutput {
                    model: "tube".into(),
                    rows: rows_from_points(&pts, &schedule),
                    fitted_rate: None,
                    extrapolated_limit: None,
                    rate_fit_failed: true,
                },
            }
        }
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out)? + "\n",
        Format::Csv => {
            let mut s = String::from("parameter,value,increment\n");
            for r in &out.rows {
                s += &format!(
                    "{},{},{}\n",
                    csv_num(r.parameter),
                    csv_num(r.value),
                    r.increment.map(csv_num).unwrap_or_default()
                );
            }
            s
        }
    };
    write_output(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn rows_from_points(points: &[SchedulePoint], params: &[f64]) -> Vec<LimitRow> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| LimitRow {
            parameter: params.get(i).copied().unwrap_or(p.x),
            value: p.value,
            increment: (i > 0).then(|| p.value - points[i - 1].value),
        })
        .collect()
}

#[derive(Serialize)]
struct AdaptedOutput {
    value: f64,
    optima: Vec<renvol_core::adapted::MulticurveSelection>,
    epsilon1: f64,
    marginal_values: Vec<(u32, f64)>,
    full_annulus_l1: renvol_core::adapted::FullAnnulusL1Report,
}

fn cmd_adapted(cli: &Cli, args: &AdaptedArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {:?}", args.input))?;
    let system: CurveSystem = serde_json::from_str(&text)
        .map_err(|e| anyhow!(CoreError::Validation(format!("CurveSystem schema: {e}"))))?;
    let genus = system.genus_sum;
    let validated = system.clone().validate()?;
    let best = correction_max(&validated);
    // marginal value of each curve: optimum drop when it is removed
    let mut marginal_values = Vec::new();
    for c in &system.curves {
        let reduced = CurveSystem {
            genus_sum: system.genus_sum,
            curves: system.curves.iter().filter(|k| k.id != c.id).cloned().collect(),
            intersections: system
                .intersections
                .iter()
                .filter(|(a, b)| *a != c.id && *b != c.id)
                .cloned()
                .collect(),
        };
        let v = correction_max(&reduced.validate()?).value;
        marginal_values.push((c.id, best.value - v));
    }
    let shortest = system
        .curves
        .iter()
        .map(|c| c.length)
        .fold(f64::INFINITY, f64::min);
    let out = AdaptedOutput {
        value: best.value,
        optima: best.optima.clone(),
        epsilon1: epsilon1_threshold(genus)?,
        marginal_values,
        full_annulus_l1: full_annulus_l1_report(if shortest.is_finite() { shortest } else { 1.0 })?,
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out)? + "\n",
        Format::Csv => {
            let mut s = String::from("value,epsilon1,optima\n");
            let optima = out
                .optima
                .iter()
                .map(|sel| {
                    sel.members
                        .iter()
                        .map(|m| m.to_string())
                        .collect::<Vec<_>>()
                        .join("+")
                })
                .collect::<Vec<_>>()
                .join(";");
            s += &format!("{},{},{}\n", csv_num(out.value), csv_num(out.epsilon1), optima);
            s
        }
    };
    write_output(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> anyhow::Result<ExitCode> {
    let results = renvol_core::acceptance::run_all(args.seed);
    let mut lines = String::new();
    for r in &results {
        lines += &r.line();
        lines.push('\n');
    }
    let all_pass = results.iter().all(|r| r.passed);
    lines += &format!(
        "{}/{} criteria passed\n",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    match cli.format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&results)? + "\n";
            write_output(cli, &text)?;
            eprint!("{lines}");
        }
        Format::Csv => {
            write_output(cli, &lines)?;
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}
