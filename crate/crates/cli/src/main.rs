mod json;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tfbound_core::bargmann::{
    fock_norm, phi_identity_residual, verify_bargmann_relation, ComplexPoint, DEFAULT_FOCK_RADIUS, DEFAULT_FOCK_STEP,
};
use tfbound_core::hrt::{certify_independence, fat_tail_scan, PointSetSpec, Region, ShiftSystem, DEFAULT_GRAM_TOL};
use tfbound_core::signal::{GaussianMixture, GeneralizedGaussian, MixtureSpec, PhasePoint};
use tfbound_core::stft::{stft_closed_form_grid, UniformAxis};
use tfbound_core::symplectic::{frft_with_branch, verify_covariance, Rotation};
use tfbound_core::uncertainty::{
    bound_cylinder, bound_sphere, sharpness_sweep, verify_theorem, Geometry, DEFAULT_SEARCH_TOL,
};

const RELATION_TOL: f64 = 1e-9;
const PHI_TOL: f64 = 1e-10;
const FOCK_TOL: f64 = 1e-4;
const COVARIANCE_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "tfbound")]
#[command(about = "STFT uncertainty bounds, Bargmann transforms and Gabor-system certificates for Gaussian mixtures")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the STFT of a signal on a uniform (x, omega) grid
    Stft {
        #[command(flatten)]
        input: SignalInput,
        /// Grid size as <nx>x<nw>
        #[arg(long, default_value = "101x101", value_parser = parse_grid)]
        grid: (usize, usize),
        /// Grid covers [-half_width, half_width] on both axes
        #[arg(long, default_value_t = 3.0, value_parser = positive)]
        half_width: f64,
        #[command(flatten)]
        output: Output,
    },

    /// Print the cylinder and sphere radius bounds for a given N
    Bound {
        #[arg(long = "N")]
        n: f64,
        #[command(flatten)]
        output: Output,
    },

    /// Check the cylinder or sphere uncertainty bound for a signal at radius R
    Verify {
        #[command(flatten)]
        input: SignalInput,
        #[arg(long = "R", value_parser = positive)]
        r: f64,
        #[arg(long, value_enum)]
        geometry: GeometryArg,
        #[arg(long, default_value_t = DEFAULT_SEARCH_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },

    /// Minimal cylinder radius for dilated Gaussians against the closed form
    Sharpness {
        #[arg(long = "N")]
        n: f64,
        /// Comma-separated dilation parameters
        #[arg(long, alias = "lambda", value_delimiter = ',', required = true, num_args = 1..)]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_SEARCH_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },

    /// Residuals of the Bargmann/STFT relations on a grid and the Fock norm
    BargmannCheck {
        #[command(flatten)]
        input: SignalInput,
        #[arg(long, default_value = "21x21", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long, default_value_t = 2.0, value_parser = positive)]
        half_width: f64,
        #[arg(long, default_value_t = DEFAULT_FOCK_RADIUS, value_parser = positive)]
        fock_radius: f64,
        #[arg(long, default_value_t = DEFAULT_FOCK_STEP, value_parser = positive)]
        fock_step: f64,
        #[command(flatten)]
        output: Output,
    },

    /// Gram matrix and independence certificate for a finite Gabor system
    Gram {
        /// Point-set JSON: {"d": 1, "points": [[x, omega], ...]}
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value_t = WindowKind::Gaussian)]
        window: WindowKind,
        #[arg(long, default_value_t = DEFAULT_GRAM_TOL)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },

    /// Scan the condition |V_g f(z)| < |<f,g>|/N outside radius R
    FatTail {
        #[command(flatten)]
        input: SignalInput,
        #[arg(long = "R", value_parser = positive)]
        r: f64,
        #[arg(long = "N", value_parser = positive)]
        n: f64,
        #[arg(long, value_enum, default_value_t = GeometryArg::Exterior)]
        geometry: GeometryArg,
        #[arg(long, default_value_t = DEFAULT_SEARCH_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },

    /// Covariance of |V_g f| under phase-space rotation by theta
    Covariance {
        #[command(flatten)]
        input: SignalInput,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, default_value = "21x21", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long, default_value_t = 3.0, value_parser = positive)]
        half_width: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct SignalInput {
    /// Signal JSON: {"d": 1, "terms": [{"c": [re, im], "a": [re, im], "mu": [..], "nu": [..]}]}
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, value_enum, default_value_t = WindowKind::Gaussian)]
    window: WindowKind,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WindowKind {
    Gaussian,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryArg {
    Cylinder,
    Sphere,
    Exterior,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected <nx>x<nw>, got `{s}`"))?;
    let nx: usize = a.trim().parse().map_err(|_| format!("bad grid size `{a}`"))?;
    let nw: usize = b.trim().parse().map_err(|_| format!("bad grid size `{b}`"))?;
    if nx == 0 || nw == 0 {
        return Err("grid sizes must be positive".into());
    }
    Ok((nx, nw))
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive finite number, got {v}"))
    }
}

/// Usage, input or numerical-domain error; exits with status 2.
struct Failure(String);

impl From<tfbound_core::Error> for Failure {
    fn from(e: tfbound_core::Error) -> Self {
        Failure(e.to_string())
    }
}

struct Report {
    body: Body,
    /// False when a verification fails; exits with status 1.
    holds: bool,
}

enum Body {
    Json(Value),
    Csv(String),
}

fn load_signal(path: &Path) -> Result<GaussianMixture, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    GaussianMixture::from_json_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_points(path: &Path) -> Result<Vec<PhasePoint>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let spec: PointSetSpec = serde_json::from_str(&text)
        .map_err(|e| Failure(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))?;
    spec.into_points().map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn json_only(output: &Output, command: &str) -> Result<(), Failure> {
    if output.format == Format::Csv {
        return Err(Failure(format!("`{command}` has no CSV output; use --format json")));
    }
    Ok(())
}

fn envelope(command: &str, parameters: Value, report: Value) -> Value {
    json!({
        "command": command,
        "parameters": parameters,
        "report": report,
    })
}

fn signal_geometry(g: GeometryArg) -> Result<Geometry, Failure> {
    match g {
        GeometryArg::Cylinder => Ok(Geometry::Cylinder),
        GeometryArg::Sphere => Ok(Geometry::Sphere),
        GeometryArg::Exterior => Err(Failure(
            "`verify` supports --geometry cylinder or sphere; use `fat-tail` for the exterior region".into(),
        )),
    }
}

fn run(command: &Command) -> Result<Report, Failure> {
    match command {
        Command::Stft {
            input,
            grid,
            half_width,
            output,
        } => {
            let f = load_signal(&input.signal)?;
            let g = GeneralizedGaussian::standard(f.dim());
            let x_axis = UniformAxis::symmetric(*half_width, grid.0)?;
            let omega_axis = UniformAxis::symmetric(*half_width, grid.1)?;
            let values = stft_closed_form_grid(&f, &g, x_axis, omega_axis)?;
            let body = match output.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    values.write_csv(&mut buf).map_err(|e| Failure(e.to_string()))?;
                    Body::Csv(String::from_utf8(buf).expect("CSV is UTF-8"))
                }
                Format::Json => {
                    let rows: Vec<Vec<[f64; 2]>> = (0..x_axis.len)
                        .map(|ix| {
                            (0..omega_axis.len)
                                .map(|iw| {
                                    let v = values.get(ix, iw);
                                    [v.re, v.im]
                                })
                                .collect()
                        })
                        .collect();
                    Body::Json(envelope(
                        "stft",
                        json!({"grid": [grid.0, grid.1], "half_width": half_width, "window": "gaussian"}),
                        json!({
                            "x": x_axis.points(),
                            "omega": omega_axis.points(),
                            "values": rows,
                            "moyal_sum": values.moyal_sum(),
                        }),
                    ))
                }
            };
            Ok(Report { body, holds: true })
        }

        Command::Bound { n, output } => {
            json_only(output, "bound")?;
            let report = json!({
                "N": n,
                "cylinder": bound_cylinder(*n)?,
                "sphere": bound_sphere(*n)?,
            });
            Ok(Report {
                body: Body::Json(envelope("bound", json!({"N": n}), report)),
                holds: true,
            })
        }

        Command::Verify {
            input,
            r,
            geometry,
            tol,
            output,
        } => {
            json_only(output, "verify")?;
            let geometry = signal_geometry(*geometry)?;
            let f = load_signal(&input.signal)?;
            let rep = verify_theorem(&f, *r, geometry, *tol)?;
            Ok(Report {
                holds: rep.holds,
                body: Body::Json(envelope(
                    "verify",
                    json!({"R": r, "geometry": geometry.as_str(), "tol": tol, "window": "gaussian"}),
                    to_value(&rep),
                )),
            })
        }

        Command::Sharpness {
            n,
            lambdas,
            tol,
            output,
        } => {
            let rows = sharpness_sweep(*n, lambdas, *tol)?;
            let body = match output.format {
                Format::Csv => {
                    let mut s = String::from("lambda,r_min_numeric,r_min_formula,residual\n");
                    for r in &rows {
                        s.push_str(&format!(
                            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                            r.lambda, r.r_min_numeric, r.r_min_formula, r.residual
                        ));
                    }
                    Body::Csv(s)
                }
                Format::Json => Body::Json(envelope(
                    "sharpness",
                    json!({"N": n, "lambdas": lambdas, "tol": tol}),
                    json!({"rows": to_value(&rows), "bound_cylinder": bound_cylinder(*n)?}),
                )),
            };
            Ok(Report { body, holds: true })
        }

        Command::BargmannCheck {
            input,
            grid,
            half_width,
            fock_radius,
            fock_step,
            output,
        } => {
            json_only(output, "bargmann-check")?;
            let f = load_signal(&input.signal)?;
            if f.dim() != 1 {
                return Err(Failure(format!("bargmann-check needs a d = 1 signal, got d = {}", f.dim())));
            }
            let xs = UniformAxis::symmetric(*half_width, grid.0)?;
            let ws = UniformAxis::symmetric(*half_width, grid.1)?;
            let mut relation = (0.0f64, PhasePoint::origin(1));
            let mut phi = (0.0f64, PhasePoint::origin(1));
            for x in xs.points() {
                for w in ws.points() {
                    let z = ComplexPoint::new1(x, w);
                    let a = verify_bargmann_relation(&f, &z)?;
                    if a > relation.0 {
                        relation = (a, z.to_phase());
                    }
                    let b = phi_identity_residual(&f, &z)?;
                    if b > phi.0 {
                        phi = (b, z.to_phase());
                    }
                }
            }
            let fock = fock_norm(&f, *fock_radius, *fock_step)?;
            let l2 = f.l2_norm();
            let fock_error = (fock.value - l2).abs();
            let holds = relation.0 <= RELATION_TOL && phi.0 <= PHI_TOL && fock_error <= FOCK_TOL;
            let report = json!({
                "relation_max_residual": relation.0,
                "relation_worst_point": to_value(&relation.1),
                "relation_tolerance": RELATION_TOL,
                "phi_max_residual": phi.0,
                "phi_worst_point": to_value(&phi.1),
                "phi_tolerance": PHI_TOL,
                "fock_norm": to_value(&fock),
                "l2_norm": l2,
                "fock_error": fock_error,
                "fock_tolerance": FOCK_TOL,
                "holds": holds,
            });
            Ok(Report {
                holds,
                body: Body::Json(envelope(
                    "bargmann-check",
                    json!({
                        "grid": [grid.0, grid.1],
                        "half_width": half_width,
                        "fock_radius": fock_radius,
                        "fock_step": fock_step,
                        "window": "gaussian",
                    }),
                    report,
                )),
            })
        }

        Command::Gram {
            points,
            window: _,
            tol,
            output,
        } => {
            json_only(output, "gram")?;
            let pts = load_points(points)?;
            let d = pts.first().map_or(1, PhasePoint::dim);
            let system = ShiftSystem::new(GeneralizedGaussian::standard(d), pts)?;
            let cert = certify_independence(&system, *tol)?;
            let mut report = cert.to_json();
            report["min_separation"] = json!(system.min_separation());
            Ok(Report {
                holds: cert.certified_independent,
                body: Body::Json(envelope(
                    "gram",
                    json!({"points": points.display().to_string(), "tol": tol, "window": "gaussian"}),
                    report,
                )),
            })
        }

        Command::FatTail {
            input,
            r,
            n,
            geometry,
            tol,
            output,
        } => {
            json_only(output, "fat-tail")?;
            let f = load_signal(&input.signal)?;
            let region = match geometry {
                GeometryArg::Cylinder => Region::Cylinder,
                GeometryArg::Sphere => Region::Sphere,
                GeometryArg::Exterior => Region::Exterior,
            };
            let rep = fat_tail_scan(&f, *r, *n, region, *tol)?;
            let mut report = to_value(&rep);
            if *n > 1.0 {
                report["bound_sphere"] = json!(bound_sphere(*n)?);
                report["bound_cylinder"] = json!(bound_cylinder(*n)?);
            }
            Ok(Report {
                holds: rep.holds,
                body: Body::Json(envelope(
                    "fat-tail",
                    json!({"R": r, "N": n, "tol": tol, "window": "gaussian"}),
                    report,
                )),
            })
        }

        Command::Covariance {
            input,
            theta,
            grid,
            half_width,
            output,
        } => {
            json_only(output, "covariance")?;
            let f = load_signal(&input.signal)?;
            let transformed = frft_with_branch(&f, *theta)?;
            let xs = UniformAxis::symmetric(*half_width, grid.0)?;
            let ws = UniformAxis::symmetric(*half_width, grid.1)?;
            let mut worst = (0.0f64, PhasePoint::origin(1));
            for x in xs.points() {
                for w in ws.points() {
                    let z = PhasePoint::new1(x, w);
                    let res = verify_covariance(&f, *theta, &z)?;
                    if res > worst.0 {
                        worst = (res, z);
                    }
                }
            }
            let holds = worst.0 <= COVARIANCE_TOL;
            let report = json!({
                "rotation": Rotation::new(*theta).matrix(),
                "max_residual": worst.0,
                "worst_point": to_value(&worst.1),
                "tolerance": COVARIANCE_TOL,
                "branch": transformed.branch,
                "transformed_signal": to_value(&MixtureSpec::from(&transformed.signal)),
                "l2_norm": f.l2_norm(),
                "transformed_l2_norm": transformed.signal.l2_norm(),
                "holds": holds,
            });
            Ok(Report {
                holds,
                body: Body::Json(envelope(
                    "covariance",
                    json!({"theta": theta, "grid": [grid.0, grid.1], "half_width": half_width, "window": "gaussian"}),
                    report,
                )),
            })
        }
    }
}

fn output_of(command: &Command) -> &Output {
    match command {
        Command::Stft { output, .. }
        | Command::Bound { output, .. }
        | Command::Verify { output, .. }
        | Command::Sharpness { output, .. }
        | Command::BargmannCheck { output, .. }
        | Command::Gram { output, .. }
        | Command::FatTail { output, .. }
        | Command::Covariance { output, .. } => output,
    }
}

fn emit(output: &Output, body: &Body) -> Result<(), Failure> {
    let text = match body {
        Body::Json(v) => json::to_string(v),
        Body::Csv(s) => s.clone(),
    };
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|report| {
        emit(output_of(&cli.command), &report.body)?;
        Ok(report.holds)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
