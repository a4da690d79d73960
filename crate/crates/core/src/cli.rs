//! Command-line front end.
//!
//! Every subcommand writes CSV. Single-table commands print to stdout unless
//! `--out` names a directory; the rest write their files into `--out`
//! (default `.`). Angles on the command line and in files are degrees.
//!
//! | subcommand | files |
//! |------------|-------|
//! | `solve` | `solve.csv`: `mcp,pip,l_x,c_1,c_2,q_B,q_D,q_G,q_K,q_N` |
//! | `jacobian` | `jacobian.csv`: `mcp,pip,j11,j12,j21,j22,condition` |
//! | `statics` | `statics.csv`: `mcp,pip,tau1,tau2,ratio,stability` |
//! | `sensitivity` | `sensitivity.csv`, `sensitivity_bars.csv` |
//! | `optimize` | `ranked.csv`, `summary.csv`, `curve.csv` |
//! | `simulate` | `trace.csv` |
//!
//! Exit status is 0 on success, 1 when the computation itself fails and 2 for
//! usage, configuration and I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{load_geometry, reference_geometry, resolve_anthropometry};
use crate::diffkin::{assemble_blocks, reduced_jacobian};
use crate::error::{Error, Result};
use crate::geometry::{Anthropometry, FingerPose, Geometry, Link, MechanismState};
use crate::grasp::{simulate_grasp, there_and_back, FingerImpedance, ObjectShape, SimSettings};
use crate::optimizer::{
    curve_rows, optimize, summary_rows, threads_from_env, EvalContext, ParamRange, RankedRow, SearchSpace,
    WorkspaceSweepSpec, DESIGN_LINKS,
};
use crate::report::{csv_bytes, csv_bytes_with, fmt_f64, write_atomic};
use crate::sensitivity::{rank_parameters, BarRow};
use crate::solver::{solve_from_extension, solve_grid, SolverSettings};
use crate::statics::{grasp_stability, joint_torques, torque_ratio, ActuatorWrench};

#[derive(Debug, Parser)]
#[command(name = "exosynth", version, about = "Kinematic synthesis of a linkage finger exoskeleton")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Geometry file; the bundled reference geometry when omitted.
    #[arg(long, value_name = "FILE")]
    pub geometry: Option<PathBuf>,
    /// `small`, `medium`, `big` or an anthropometry file.
    #[arg(long, default_value = "medium", value_name = "PRESET|FILE")]
    pub anthropometry: String,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PoseArgs {
    /// MCP flexion (deg).
    #[arg(long, allow_negative_numbers = true)]
    pub mcp: Option<f64>,
    /// PIP flexion (deg).
    #[arg(long, allow_negative_numbers = true)]
    pub pip: Option<f64>,
    /// Evaluate the whole workspace grid instead of one pose.
    #[arg(long, conflicts_with_all = ["mcp", "pip"])]
    pub grid: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mechanism state at a finger pose.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pose: PoseArgs,
    },
    /// Reduced Jacobian from (l_x, q_B) rates to phalanx orientation rates.
    Jacobian {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pose: PoseArgs,
    },
    /// Joint torques for an actuator force.
    Statics {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pose: PoseArgs,
        /// Actuator force (N).
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        force: f64,
    },
    /// One-at-a-time sensitivity of the sliders to every link length.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 40.0)]
        mcp: f64,
        #[arg(long, default_value_t = 45.0)]
        pip: f64,
        /// Relative perturbation.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Exhaustive search over the design lengths.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Override one design range, e.g. `L_EJ=30:40` or `L_CD=10`.
        #[arg(long = "range", value_name = "NAME=LO:HI")]
        ranges: Vec<String>,
        /// Grid step of the design lengths (mm).
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Actuator force used for the reported torques (N).
        #[arg(long, default_value_t = 1.0)]
        force: f64,
    },
    /// Quasi-static grasp of a disc.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Disc radius (mm).
        #[arg(long, default_value_t = 20.0)]
        radius: f64,
        /// Disc centre `x,y` (mm); 3 mm clear of the proximal phalanx by default.
        #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
        center: Option<String>,
        /// Stroke shortening before reversing (mm).
        #[arg(long, default_value_t = 1.7)]
        travel: f64,
        /// Steps each way.
        #[arg(long, default_value_t = 85)]
        steps: usize,
        /// MCP stiffness (N·mm/rad).
        #[arg(long, default_value_t = 50.0)]
        k1: f64,
        /// PIP stiffness (N·mm/rad).
        #[arg(long, default_value_t = 50.0)]
        k2: f64,
    },
}

/// Parse `argv`, run and return the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_domain() {
                1
            } else {
                2
            }
        }
    }
}

fn geometry(common: &Common, anthro: &Anthropometry) -> Result<Geometry> {
    let g = match &common.geometry {
        Some(p) => load_geometry(p)?,
        None => reference_geometry(),
    };
    Ok(g.with_anthropometry(anthro))
}

fn usage(message: String) -> Error {
    Error::Config {
        path: "command line".into(),
        line: 0,
        message,
    }
}

fn poses(args: &PoseArgs) -> Result<(Vec<f64>, Vec<f64>)> {
    if args.grid {
        let s = WorkspaceSweepSpec::default();
        return Ok((s.mcp(), s.pip()));
    }
    match (args.mcp, args.pip) {
        (Some(m), Some(p)) => Ok((vec![m], vec![p])),
        _ => Err(usage("give --mcp and --pip, or --grid".into())),
    }
}

/// Write `bytes` to `<out>/<name>`, or to stdout when no directory was given.
fn deliver(out: Option<&Path>, name: &str, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(dir) => write_atomic(&dir.join(name), bytes),
        None => stdout.write_all(bytes).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn out_dir(common: &Common) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn grid_rows<F>(geom: &Geometry, mcp: &[f64], pip: &[f64], mut row: F) -> Result<Vec<Vec<String>>>
where
    F: FnMut(&MechanismState, &FingerPose) -> Result<Vec<f64>>,
{
    let settings = SolverSettings::default();
    let states = if mcp.len() * pip.len() == 1 {
        let pose = FingerPose::from_anatomical_deg(geom.q_o1_ref, mcp[0], pip[0]);
        vec![solve_from_extension(geom, &pose, &settings)?]
    } else {
        solve_grid(geom, mcp, pip, &settings)?
    };
    let mut out = Vec::with_capacity(states.len());
    for (k, state) in states.iter().enumerate() {
        let (m, p) = (mcp[k / pip.len()], pip[k % pip.len()]);
        let pose = FingerPose::from_anatomical_deg(geom.q_o1_ref, m, p);
        let mut fields = vec![fmt_f64(m), fmt_f64(p)];
        fields.extend(row(state, &pose)?.into_iter().map(fmt_f64));
        out.push(fields);
    }
    Ok(out)
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Solve { common, pose } => {
            let anthro = resolve_anthropometry(&common.anthropometry)?;
            let geom = geometry(&common, &anthro)?;
            let (mcp, pip) = poses(&pose)?;
            let rows = grid_rows(&geom, &mcp, &pip, |s, _| {
                Ok(s.to_array()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| if MechanismState::ANGLES.contains(&i) { v.to_degrees() } else { *v })
                    .collect())
            })?;
            let mut header = vec!["mcp", "pip"];
            header.extend(MechanismState::NAMES);
            deliver(common.out.as_deref(), "solve.csv", &csv_bytes_with(&header, rows)?, stdout)
        }
        Command::Jacobian { common, pose } => {
            let anthro = resolve_anthropometry(&common.anthropometry)?;
            let geom = geometry(&common, &anthro)?;
            let (mcp, pip) = poses(&pose)?;
            let rows = grid_rows(&geom, &mcp, &pip, |s, p| {
                let j = reduced_jacobian(&assemble_blocks(s, p, &geom))?;
                Ok(vec![j.j_a[(0, 0)], j.j_a[(0, 1)], j.j_a[(1, 0)], j.j_a[(1, 1)], j.condition])
            })?;
            let header = ["mcp", "pip", "j11", "j12", "j21", "j22", "condition"];
            deliver(common.out.as_deref(), "jacobian.csv", &csv_bytes_with(&header, rows)?, stdout)
        }
        Command::Statics { common, pose, force } => {
            let anthro = resolve_anthropometry(&common.anthropometry)?;
            let geom = geometry(&common, &anthro)?;
            let (mcp, pip) = poses(&pose)?;
            let wrench = ActuatorWrench::new(force);
            let mut stability = Vec::new();
            let mut rows = grid_rows(&geom, &mcp, &pip, |s, p| {
                let t = joint_torques(&reduced_jacobian(&assemble_blocks(s, p, &geom))?, &wrench)?;
                stability.push(match grasp_stability(&t) {
                    Ok(st) => format!("{st:?}").to_lowercase(),
                    Err(_) => "indeterminate".into(),
                });
                Ok(vec![t.tau1, t.tau2, torque_ratio(&t).unwrap_or(f64::NAN)])
            })?;
            for (row, st) in rows.iter_mut().zip(stability) {
                row.push(st);
            }
            let header = ["mcp", "pip", "tau1", "tau2", "ratio", "stability"];
            deliver(common.out.as_deref(), "statics.csv", &csv_bytes_with(&header, rows)?, stdout)
        }
        Command::Sensitivity { common, mcp, pip, delta } => {
            let anthro = resolve_anthropometry(&common.anthropometry)?;
            let geom = geometry(&common, &anthro)?;
            let pose = FingerPose::from_anatomical_deg(geom.q_o1_ref, mcp, pip);
            let report = rank_parameters(&geom, &pose, delta, &SolverSettings::default())?;
            for (name, why) in &report.failures {
                let _ = writeln!(stderr, "warning: {name} not evaluated: {why}");
            }
            let dir = out_dir(&common);
            write_atomic(&dir.join("sensitivity.csv"), &csv_bytes(&report.records)?)?;
            let bars: Vec<BarRow> = report.records.iter().map(BarRow).collect();
            write_atomic(&dir.join("sensitivity_bars.csv"), &csv_bytes(&bars)?)
        }
        Command::Optimize {
            common,
            ranges,
            step,
            force,
        } => {
            let anthro = resolve_anthropometry(&common.anthropometry)?;
            let geom = geometry(&common, &anthro)?;
            let mut space = SearchSpace {
                step,
                ..SearchSpace::default()
            };
            for r in &ranges {
                let (link, range) = parse_range(r)?;
                let k = DESIGN_LINKS.iter().position(|l| *l == link).ok_or_else(|| {
                    usage(format!("{} is not a design length; expected one of {}", link.name(), design_names()))
                })?;
                space.ranges[k] = range;
            }
            space.validate().map_err(|e| usage(e.to_string()))?;
            let ctx = EvalContext {
                anthro,
                f_ac: force,
                ..EvalContext::default()
            };
            let threads = threads_from_env()?;
            let opt = optimize(&space, &geom, &ctx, threads)?;
            let dir = out_dir(&common);
            let ranked: Vec<RankedRow> = opt.ranked.iter().map(RankedRow).collect();
            write_atomic(&dir.join("ranked.csv"), &csv_bytes(&ranked)?)?;
            write_atomic(&dir.join("summary.csv"), &csv_bytes(&summary_rows(&opt))?)?;
            write_atomic(&dir.join("curve.csv"), &csv_bytes(&curve_rows(&opt))?)
        }
        Command::Simulate {
            common,
            radius,
            center,
            travel,
            steps,
            k1,
            k2,
        } => {
            let anthro = resolve_anthropometry(&common.anthropometry)?;
            let geom = geometry(&common, &anthro)?;
            let center = match center {
                Some(c) => parse_point(&c)?,
                None => (-0.6 * anthro.l_ml, radius + 3.0),
            };
            let object = ObjectShape::disc(center, radius)?;
            let start = geom
                .seed
                .ok_or_else(|| Error::InvalidGeometry("geometry has no extension seed".into()))?
                .l_x;
            let impedance = FingerImpedance {
                k1,
                k2,
                ..FingerImpedance::default()
            };
            let schedule = there_and_back(start, start - travel, steps);
            let trace = simulate_grasp(&geom, &anthro, &impedance, Some(&object), &schedule, &SimSettings::default())?;
            if let Some(st) = trace.final_stability {
                let _ = writeln!(stderr, "final pose: {st:?}");
            }
            write_atomic(&out_dir(&common).join("trace.csv"), &csv_bytes(&trace.samples)?)
        }
    }
}

fn design_names() -> String {
    DESIGN_LINKS.iter().map(|l| l.name()).collect::<Vec<_>>().join(", ")
}

fn parse_number(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("{what}: `{s}` is not a number")))
}

/// `NAME=LO:HI` or `NAME=VALUE`.
fn parse_range(text: &str) -> Result<(Link, ParamRange)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| usage(format!("range `{text}` should look like L_EJ=30:40")))?;
    let link = Link::from_name(name.trim()).ok_or_else(|| usage(format!("unknown link `{name}`")))?;
    let range = match value.split_once(':') {
        Some((lo, hi)) => ParamRange::new(parse_number(lo, name)?, parse_number(hi, name)?),
        None => ParamRange::point(parse_number(value, name)?),
    };
    Ok((link, range))
}

fn parse_point(text: &str) -> Result<(f64, f64)> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| usage(format!("centre `{text}` should look like -30,23")))?;
    Ok((parse_number(x, "centre x")?, parse_number(y, "centre y")?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_syntax() {
        let (l, r) = parse_range("L_EJ=30:40").unwrap();
        assert_eq!(l, Link::EJ);
        assert_eq!(r, ParamRange::new(30.0, 40.0));
        let (_, r) = parse_range("L_CD=10").unwrap();
        assert_eq!(r, ParamRange::point(10.0));
        assert!(parse_range("L_ZZ=1:2").is_err());
        assert!(parse_range("L_EJ").is_err());
    }

    #[test]
    fn point_syntax() {
        assert_eq!(parse_point("-30,23").unwrap(), (-30.0, 23.0));
        assert!(parse_point("3").is_err());
    }
}
