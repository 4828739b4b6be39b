//! Subcommands. Each one returns its artifacts (the first is the primary
//! one, printed to stdout) and, separately, the failure that decides the
//! exit code, so that a failing check still emits its report.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use delone_core::geometry::{
    crystallographic_extension, glue, io, packing_violation, random_delone, verify_covering, CrystallographicSet, Cube,
    DeloneSet, Point, PointSet,
};
use delone_core::measures::{cantor_approx, classify, CompactWindow, Measure};
use delone_core::spectra::{
    approximation_experiment, bands, bump_state, spectral_measure, truncated_operator, u_interval, ApproximationPath,
    ExperimentRow, Grid1D, IntervalSet, Potential, EXPERIMENT_CSV_HEADER,
};
use delone_core::topology::{convergence_report, natural_distance, Level};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::provenance::{sha256_hex, Provenance};
use crate::svg;
use crate::table::{finite_or_string, pretty, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Delone sets, their crystallographic approximants and the spectra of the
/// associated 1-D Schrödinger operators.
#[derive(Debug, Parser)]
#[command(name = "delone", version)]
pub struct Cli {
    /// Random seed (experiment; default 7 or the config value).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Tolerance; its meaning and default depend on the command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Directory receiving every artifact of the command.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Rendering of tabular results. Point sets are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct PotentialArgs {
    /// Depth of the trapezoidal single-site well.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub depth: f64,
    /// Half-width of the well's support.
    #[arg(long, default_value_t = 0.3)]
    pub well_half_width: f64,
    /// Width of the linear ramps at the well's edges.
    #[arg(long, default_value_t = 0.05)]
    pub shoulder: f64,
}

impl PotentialArgs {
    fn build(&self) -> CliResult<Potential> {
        Ok(Potential::trapezoid(self.depth, self.well_half_width, self.shoulder)?)
    }

    fn describe(&self) -> String {
        format!("{},{},{}", self.depth, self.well_half_width, self.shoulder)
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated numbers")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("need finite a < b, got {a}, {b}"));
    }
    Ok((a, b))
}

fn parse_level(s: &str) -> Result<Level, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [l, big_l, eps] = parts[..] else {
        return Err(format!("level {s:?} is not of the form l:L:eps"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}"));
    Ok(Level {
        l: num(l)?,
        big_l: num(big_l)?,
        eps: num(eps)?,
    })
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify packing (2r-separation) and covering (radius R) of a point set file.
    Validate {
        input: PathBuf,
        /// Packing radius to check (default: the file's r).
        #[arg(long)]
        r: Option<f64>,
        /// Covering radius to check (default: the file's R).
        #[arg(long = "big-r")]
        big_r: Option<f64>,
        /// Covering grid pitch (default r/8).
        #[arg(long)]
        pitch: Option<f64>,
    },
    /// Crystallographic extension of the set's restriction to Q(S).
    Extend {
        input: PathBuf,
        #[arg(short = 'S', long = "radius")]
        s: f64,
        /// Construction grid pitch (default r/8).
        #[arg(long)]
        pitch: Option<f64>,
        /// Verify and report exact agreement with the input on Q(S).
        #[arg(long)]
        check_agreement: bool,
    },
    /// Glue the set's restriction to Q(S) into a crystallographic background.
    Glue {
        input: PathBuf,
        /// Crystallographic background file.
        #[arg(long)]
        gamma: PathBuf,
        #[arg(short = 'S', long = "radius")]
        s: f64,
        #[arg(long)]
        pitch: Option<f64>,
        /// Verify agreement with the input on Q(S) and with the background
        /// outside Q(S + 2R + r).
        #[arg(long)]
        check_agreement: bool,
    },
    /// Natural distance between two point sets (--tol default 1e-3).
    Dist { a: PathBuf, b: PathBuf },
    /// Local and natural-topology convergence of approximants towards a set.
    Converge {
        omega: PathBuf,
        /// Approximant files, in sequence order.
        #[arg(long, num_args = 1.., conflicts_with = "schedule")]
        approximants: Vec<PathBuf>,
        /// Labels of the approximant files (default 1, 2, ...).
        #[arg(long, value_delimiter = ',')]
        labels: Vec<usize>,
        /// Build crystallographic extensions of omega at these radii instead.
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<f64>,
        /// Levels as l:L:eps, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_level, default_value = "2:4:0.1,8:16:0.1")]
        levels: Vec<Level>,
        #[arg(long)]
        pitch: Option<f64>,
    },
    /// Spectral bands of a 1-D crystallographic set (--tol: edge tolerance, default 1e-9).
    Bands {
        input: PathBuf,
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        #[arg(long, value_parser = parse_pair, default_value = "0,30", allow_hyphen_values = true)]
        window: (f64, f64),
    },
    /// The set U: interiors of either band set minus the other band set.
    Uset {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        #[arg(long, value_parser = parse_pair, default_value = "0,30", allow_hyphen_values = true)]
        window: (f64, f64),
        /// Exit with code 4 when U is empty.
        #[arg(long)]
        require_nonempty: bool,
    },
    /// Spectral measure of the bump state for the Dirichlet truncation on [-box, box].
    Specmeasure {
        input: PathBuf,
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, default_value_t = 0.02)]
        h: f64,
        #[arg(long = "box", default_value_t = 20.0)]
        box_half_width: f64,
    },
    /// Finite-scale classification of measures (JSON files or a Cantor approximation).
    Classify {
        inputs: Vec<PathBuf>,
        /// Classify the uniform measure on the Cantor set of this depth.
        #[arg(long)]
        cantor: Option<u32>,
        #[arg(long, default_value_t = 255)]
        n_max: u32,
        /// Half-width of K_1; K_n = n·K_1.
        #[arg(long, default_value_t = 1.0)]
        k1: f64,
    },
    /// Approximation experiment along both paths (config file, flags override).
    Experiment {
        /// TOML configuration; omitted keys take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<f64>>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long = "box")]
        box_half_width: Option<f64>,
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        window: Option<(f64, f64)>,
        #[arg(long)]
        pitch: Option<f64>,
        #[arg(long)]
        omega_half_width: Option<f64>,
        /// Fail (exit 4) unless delta is non-increasing and within its bound
        /// on both paths and the glued potentials match the background far out.
        #[arg(long = "assert")]
        assert_checks: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

#[derive(Debug)]
pub struct Outcome {
    /// The first artifact is the primary one.
    pub artifacts: Vec<Artifact>,
    /// Where the artifacts go when no --out-dir flag is given.
    pub default_out_dir: Option<PathBuf>,
    /// A check that ran and failed; the artifacts are still emitted.
    pub failure: Option<CliError>,
    /// Diagnostics for stderr.
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(artifacts: Vec<Artifact>) -> Self {
        Outcome {
            artifacts,
            default_out_dir: None,
            failure: None,
            notes: Vec::new(),
        }
    }
}

fn artifact(name: &str, content: String) -> Artifact {
    Artifact {
        name: name.to_string(),
        content,
    }
}

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// The parsed set and the digest of the file's bytes.
fn read_set(path: &Path) -> CliResult<(DeloneSet, String)> {
    let bytes = read_bytes(path)?;
    let text =
        String::from_utf8(bytes.clone()).map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))?;
    let set = io::point_set_from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((set, sha256_hex(&bytes)))
}

fn read_crystal(path: &Path) -> CliResult<(CrystallographicSet, String)> {
    match read_set(path)? {
        (DeloneSet::Crystal(c), hash) => Ok((c, hash)),
        _ => Err(CliError::Usage(format!(
            "{} is not a crystallographic set",
            path.display()
        ))),
    }
}

fn table_artifact(name: &str, table: &Table, format: Format, prov: &Provenance) -> Artifact {
    match format {
        Format::Csv => artifact(&format!("{name}.csv"), table.to_csv(prov)),
        Format::Json => artifact(&format!("{name}.json"), table.to_json(prov)),
    }
}

fn set_artifact(name: &str, set: &DeloneSet, prov: &Provenance, extra: &[(&str, Value)]) -> Artifact {
    let mut p = prov.to_value();
    for (k, v) in extra {
        p[*k] = v.clone();
    }
    let mut text = io::point_set_to_json(set, Some(p));
    text.push('\n');
    artifact(name, text)
}

fn default_pitch(set: &dyn PointSet, pitch: Option<f64>) -> f64 {
    pitch.unwrap_or(set.params().r / 8.0)
}

fn fmt_point(p: &Point) -> String {
    let coords: Vec<String> = p.0.iter().map(f64::to_string).collect();
    format!("({})", coords.join(" "))
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Validate { input, r, big_r, pitch } => cmd_validate(cli, input, *r, *big_r, *pitch),
        Command::Extend {
            input,
            s,
            pitch,
            check_agreement,
        } => cmd_extend(input, *s, *pitch, *check_agreement),
        Command::Glue {
            input,
            gamma,
            s,
            pitch,
            check_agreement,
        } => cmd_glue(input, gamma, *s, *pitch, *check_agreement),
        Command::Dist { a, b } => cmd_dist(cli, a, b),
        Command::Converge {
            omega,
            approximants,
            labels,
            schedule,
            levels,
            pitch,
        } => cmd_converge(cli, omega, approximants, labels, schedule, levels, *pitch),
        Command::Bands {
            input,
            potential,
            h,
            window,
        } => cmd_bands(cli, input, potential, *h, *window),
        Command::Uset {
            a,
            b,
            potential,
            h,
            window,
            require_nonempty,
        } => cmd_uset(cli, a, b, potential, *h, *window, *require_nonempty),
        Command::Specmeasure {
            input,
            potential,
            h,
            box_half_width,
        } => cmd_specmeasure(cli, input, potential, *h, *box_half_width),
        Command::Classify {
            inputs,
            cantor,
            n_max,
            k1,
        } => cmd_classify(cli, inputs, *cantor, *n_max, *k1),
        Command::Experiment { .. } => cmd_experiment(cli),
    }
}

/// Points and covering region for the checks: everything determined by the
/// file, with the covering region shrunk so that no point outside the
/// known part could be the nearest one.
fn validation_data(set: &DeloneSet, big_r: f64, pitch: f64) -> CliResult<(Vec<Point>, Cube)> {
    Ok(match set {
        DeloneSet::Windowed(w) => match &w.tail {
            None => {
                let s = w.window.half_width - big_r;
                if s <= 0.0 {
                    return Err(CliError::Core(delone_core::Error::InsufficientWindow {
                        required: big_r,
                        available: w.window.half_width,
                    }));
                }
                (w.points.clone(), Cube::new(s)?)
            }
            Some(t) => {
                let s = w.window.half_width + t.period;
                (set.points_in_cube(s + 2.0 * big_r + pitch)?, Cube::new(s)?)
            }
        },
        DeloneSet::Crystal(c) => {
            // one cell suffices by periodicity
            let s = c.period / 2.0;
            (c.points_in_cube(s + 2.0 * big_r + pitch)?, Cube::new(s)?)
        }
    })
}

fn cmd_validate(cli: &Cli, input: &Path, r: Option<f64>, big_r: Option<f64>, pitch: Option<f64>) -> CliResult<Outcome> {
    let (set, hash) = read_set(input)?;
    let params = set.params();
    let r = r.unwrap_or(params.r);
    let big_r = big_r.unwrap_or(params.big_r);
    let pitch = pitch.unwrap_or(r / 8.0);
    let prov = Provenance::new(
        "validate",
        &[
            ("input", hash),
            ("r", r.to_string()),
            ("R", big_r.to_string()),
            ("pitch", pitch.to_string()),
        ],
    );
    let (points, region) = validation_data(&set, big_r, pitch)?;

    let violation = packing_violation(&points, r)?;
    let cover = verify_covering(&points, big_r, region, pitch)?;

    let mut table = Table::new(&["check", "passed", "value", "bound", "region", "detail"]);
    let packing_detail = match &violation {
        Some((i, j, d)) => format!(
            "pair {} {} at distance {d}",
            fmt_point(&points[*i]),
            fmt_point(&points[*j])
        ),
        None => format!("no two of {} points closer than 2r", points.len()),
    };
    table.push(vec![
        "packing".into(),
        violation.is_none().into(),
        violation.map(|v| v.2).into(),
        (2.0 * r).into(),
        Cell::Empty,
        packing_detail.into(),
    ]);
    let cover_detail = match &cover.witness {
        Some(w) => format!("node {} not within R", fmt_point(w)),
        None => format!("grid spacing {}", cover.spacing),
    };
    table.push(vec![
        "covering".into(),
        cover.covered.into(),
        if cover.covered {
            Cell::Num(cover.certified_radius)
        } else {
            Cell::Empty
        },
        big_r.into(),
        format!("Q({})", region.half_width).into(),
        cover_detail.into(),
    ]);

    let mut out = Outcome::new(vec![table_artifact("validate", &table, cli.format, &prov)]);
    let mut failed = Vec::new();
    if violation.is_some() {
        failed.push("packing");
    }
    if !cover.covered {
        failed.push("covering");
    }
    if !failed.is_empty() {
        out.failure = Some(CliError::Assertion(format!("{} check failed", failed.join(" and "))));
    }
    Ok(out)
}

fn cmd_extend(input: &Path, s: f64, pitch: Option<f64>, check: bool) -> CliResult<Outcome> {
    let (omega, hash) = read_set(input)?;
    let pitch = default_pitch(&omega, pitch);
    let prov = Provenance::new(
        "extend",
        &[
            ("input", hash.clone()),
            ("S", s.to_string()),
            ("pitch", pitch.to_string()),
        ],
    );
    let rho = crystallographic_extension(&omega, s, pitch)?;
    let mut notes = Vec::new();
    let mut failure = None;
    if check {
        let expected = omega.points_in_cube(s)?;
        if rho.points_in_cube(s)? == expected {
            notes.push(format!("agreement on Q({s}): exact ({} points)", expected.len()));
        } else {
            failure = Some(CliError::Assertion(format!(
                "extension differs from the input on Q({s})"
            )));
        }
    }
    let extra = [
        ("input_sha256", Value::from(hash)),
        ("S", Value::from(s)),
        ("pitch", Value::from(pitch)),
    ];
    let mut out = Outcome::new(vec![set_artifact(
        "extend.json",
        &DeloneSet::Crystal(rho),
        &prov,
        &extra,
    )]);
    out.notes = notes;
    out.failure = failure;
    Ok(out)
}

fn cmd_glue(input: &Path, gamma_path: &Path, s: f64, pitch: Option<f64>, check: bool) -> CliResult<Outcome> {
    let (omega, hash) = read_set(input)?;
    let (gamma, gamma_hash) = read_crystal(gamma_path)?;
    let pitch = default_pitch(&omega, pitch);
    let prov = Provenance::new(
        "glue",
        &[
            ("input", hash.clone()),
            ("gamma", gamma_hash.clone()),
            ("S", s.to_string()),
            ("pitch", pitch.to_string()),
        ],
    );
    let out_set = glue(&omega, &gamma, s, pitch)?;
    let mut notes = vec![format!(
        "added {} points, dropped {} background points",
        out_set.added.len(),
        out_set.dropped.len()
    )];
    let mut failure = None;
    if check {
        let p = omega.params();
        let outer = s + 2.0 * p.big_r + p.r;
        let reach = outer + gamma.period + 2.0 * p.big_r;
        let far = |set: &dyn PointSet| -> CliResult<Vec<Point>> {
            Ok(set
                .points_in_cube(reach)?
                .into_iter()
                .filter(|x| x.sup_norm() > outer)
                .collect())
        };
        let inner_ok = out_set.set.points_in_cube(s)? == omega.points_in_cube(s)?;
        let outer_ok = far(&out_set.set)? == far(&gamma)?;
        let annulus_ok = out_set.added.iter().all(|a| a.sup_norm() > s && a.sup_norm() <= outer);
        notes.push(format!(
            "agreement on Q({s}): {}; agreement with the background on Q({reach}) \\ Q({outer}): {}; additions in the annulus: {}",
            if inner_ok { "exact" } else { "FAILED" },
            if outer_ok { "exact" } else { "FAILED" },
            if annulus_ok { "yes" } else { "NO" },
        ));
        if !(inner_ok && outer_ok && annulus_ok) {
            failure = Some(CliError::Assertion(
                "glued set violates its agreement conditions".into(),
            ));
        }
    }
    let extra = [
        ("input_sha256", Value::from(hash)),
        ("gamma_sha256", Value::from(gamma_hash)),
        ("S", Value::from(s)),
        ("pitch", Value::from(pitch)),
    ];
    let mut out = Outcome::new(vec![set_artifact(
        "glue.json",
        &DeloneSet::Windowed(out_set.set),
        &prov,
        &extra,
    )]);
    out.notes = notes;
    out.failure = failure;
    Ok(out)
}

fn cmd_dist(cli: &Cli, a: &Path, b: &Path) -> CliResult<Outcome> {
    let tol = cli.tol.unwrap_or(1e-3);
    let (fa, ha) = read_set(a)?;
    let (fb, hb) = read_set(b)?;
    let prov = Provenance::new("dist", &[("a", ha), ("b", hb), ("tol", tol.to_string())]);
    let d = natural_distance(&fa, &fb, tol)?;
    let mut table = Table::new(&["delta", "error_bound", "truncation_radius"]);
    table.push(vec![d.value.into(), d.error_bound.into(), (4.0 / tol).into()]);
    Ok(Outcome::new(vec![table_artifact("dist", &table, cli.format, &prov)]))
}

#[allow(clippy::too_many_arguments)]
fn cmd_converge(
    cli: &Cli,
    omega_path: &Path,
    approximants: &[PathBuf],
    labels: &[usize],
    schedule: &[f64],
    levels: &[Level],
    pitch: Option<f64>,
) -> CliResult<Outcome> {
    let tol = cli.tol.unwrap_or(1e-3);
    let (omega, hash) = read_set(omega_path)?;
    let mut inputs = vec![("omega", hash), ("tol", tol.to_string())];
    let levels_desc: Vec<String> = levels
        .iter()
        .map(|l| format!("{}:{}:{}", l.l, l.big_l, l.eps))
        .collect();
    inputs.push(("levels", levels_desc.join(",")));

    let mut sets: Vec<(usize, DeloneSet)> = Vec::new();
    if !schedule.is_empty() {
        if schedule.iter().any(|s| !(*s > 0.0)) || schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage(
                "schedule must be positive and strictly increasing".into(),
            ));
        }
        let pitch = default_pitch(&omega, pitch);
        inputs.push(("schedule", format!("{schedule:?}")));
        inputs.push(("pitch", pitch.to_string()));
        for &s in schedule {
            sets.push((
                s.round() as usize,
                DeloneSet::Crystal(crystallographic_extension(&omega, s, pitch)?),
            ));
        }
    } else {
        if approximants.is_empty() {
            return Err(CliError::Usage("give --approximants or --schedule".into()));
        }
        if !labels.is_empty() && labels.len() != approximants.len() {
            return Err(CliError::Usage(format!(
                "{} labels for {} approximants",
                labels.len(),
                approximants.len()
            )));
        }
        for (i, path) in approximants.iter().enumerate() {
            let (set, h) = read_set(path)?;
            inputs.push(("approximant", h));
            sets.push((labels.get(i).copied().unwrap_or(i + 1), set));
        }
    }
    let prov = Provenance::new("converge", &inputs);
    let seq: Vec<(usize, &(dyn PointSet + Sync))> =
        sets.iter().map(|(n, s)| (*n, s as &(dyn PointSet + Sync))).collect();
    let report = convergence_report(&seq, &omega, levels, tol)?;

    let mut rows = Table::new(&["n", "L", "local_hausdorff", "delta", "delta_error_bound"]);
    for r in &report.rows {
        rows.push(vec![
            r.n.into(),
            r.big_l.into(),
            r.local_hausdorff.into(),
            r.delta.into(),
            r.delta_error_bound.into(),
        ]);
    }
    let mut summary = Table::new(&[
        "l",
        "L",
        "eps",
        "n0",
        "tracked_points",
        "converging_points",
        "spurious_clusters",
    ]);
    for lv in &report.levels {
        summary.push(vec![
            lv.level.l.into(),
            lv.level.big_l.into(),
            lv.level.eps.into(),
            lv.n0.into(),
            lv.tracks.len().into(),
            lv.tracks.iter().filter(|t| t.converges).count().into(),
            lv.spurious.len().into(),
        ]);
    }
    Ok(Outcome::new(vec![
        table_artifact("converge", &rows, cli.format, &prov),
        table_artifact("converge_levels", &summary, cli.format, &prov),
    ]))
}

fn interval_table(set: &IntervalSet) -> Table {
    let mut t = Table::new(&["E_low", "E_high", "open_low", "open_high"]);
    for iv in set.intervals() {
        t.push(vec![iv.lo.into(), iv.hi.into(), iv.open_lo.into(), iv.open_hi.into()]);
    }
    t
}

fn cmd_bands(cli: &Cli, input: &Path, pot: &PotentialArgs, h: f64, window: (f64, f64)) -> CliResult<Outcome> {
    let tol = cli.tol.unwrap_or(1e-9);
    let (gamma, hash) = read_crystal(input)?;
    let v = pot.build()?;
    let prov = Provenance::new(
        "bands",
        &[
            ("input", hash),
            ("potential", pot.describe()),
            ("h", h.to_string()),
            ("window", format!("{},{}", window.0, window.1)),
            ("tol", tol.to_string()),
        ],
    );
    let bs = bands(&gamma, &v, h, window, tol)?;
    let mut out = Outcome::new(vec![
        table_artifact("bands", &interval_table(&bs.bands), cli.format, &prov),
        artifact("bands.svg", svg::band_diagram(&[("bands", &bs.bands)], window, &prov)),
    ]);
    if bs.adjusted {
        out.notes
            .push(format!("h adjusted to {} ({} nodes per period)", bs.h_used, bs.steps));
    }
    Ok(out)
}

fn cmd_uset(
    cli: &Cli,
    a: &Path,
    b: &Path,
    pot: &PotentialArgs,
    h: f64,
    window: (f64, f64),
    require_nonempty: bool,
) -> CliResult<Outcome> {
    let tol = cli.tol.unwrap_or(1e-9);
    let (ga, ha) = read_crystal(a)?;
    let (gb, hb) = read_crystal(b)?;
    let v = pot.build()?;
    let prov = Provenance::new(
        "uset",
        &[
            ("a", ha),
            ("b", hb),
            ("potential", pot.describe()),
            ("h", h.to_string()),
            ("window", format!("{},{}", window.0, window.1)),
            ("tol", tol.to_string()),
        ],
    );
    let ba = bands(&ga, &v, h, window, tol)?.bands;
    let bb = bands(&gb, &v, h, window, tol)?.bands;
    let u = u_interval(&ba, &bb);
    let mut out = Outcome::new(vec![
        table_artifact("uset", &interval_table(&u), cli.format, &prov),
        artifact(
            "uset.svg",
            svg::band_diagram(&[("B(a)", &ba), ("B(b)", &bb), ("U", &u)], window, &prov),
        ),
    ]);
    if require_nonempty && u.is_empty() {
        out.failure = Some(CliError::Assertion("U is empty".into()));
    }
    Ok(out)
}

fn cmd_specmeasure(cli: &Cli, input: &Path, pot: &PotentialArgs, h: f64, box_half_width: f64) -> CliResult<Outcome> {
    let (set, hash) = read_set(input)?;
    let v = pot.build()?;
    let prov = Provenance::new(
        "specmeasure",
        &[
            ("input", hash),
            ("potential", pot.describe()),
            ("h", h.to_string()),
            ("box", box_half_width.to_string()),
        ],
    );
    let grid = Grid1D::new(-box_half_width, box_half_width, h)?;
    let t = truncated_operator(&set, &v, grid)?;
    let mu = spectral_measure(&t, &bump_state(grid)?)?;
    let primary = match cli.format {
        Format::Csv => {
            let mut table = Table::new(&["E", "mass"]);
            for &(x, m) in mu.atoms() {
                table.push(vec![x.into(), m.into()]);
            }
            artifact("specmeasure.csv", table.to_csv(&prov))
        }
        Format::Json => {
            let mut value: Value = serde_json::from_str(&mu.to_json()).expect("measure JSON parses");
            value["provenance"] = prov.to_value();
            artifact("specmeasure.json", pretty(&value))
        }
    };
    Ok(Outcome::new(vec![primary]))
}

fn cmd_classify(cli: &Cli, inputs: &[PathBuf], cantor: Option<u32>, n_max: u32, k1: f64) -> CliResult<Outcome> {
    let k = CompactWindow::new(k1)?;
    let mut measures: Vec<(String, Measure)> = Vec::new();
    let mut prov_inputs = vec![("n_max", n_max.to_string()), ("k1", k1.to_string())];
    if let Some(depth) = cantor {
        measures.push((format!("cantor({depth})"), cantor_approx(depth)?));
        prov_inputs.push(("cantor", depth.to_string()));
    }
    for path in inputs {
        let bytes = read_bytes(path)?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))?;
        let mu = Measure::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let name = path
            .file_name()
            .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        prov_inputs.push(("measure", sha256_hex(&bytes)));
        measures.push((name, mu));
    }
    if measures.is_empty() {
        return Err(CliError::Usage("give measure files or --cantor DEPTH".into()));
    }
    let prov = Provenance::new("classify", &prov_inputs);
    let mut table = Table::new(&["measure", "label", "f1n_first", "f2n_first", "diffusive", "singular"]);
    for (name, mu) in &measures {
        let c = classify(mu, n_max, k)?;
        let opt = |v: Option<u32>| v.map_or(Cell::Text("none".into()), |n| Cell::Int(n as i64));
        table.push(vec![
            name.clone().into(),
            c.label.to_string().into(),
            opt(c.f1n_first),
            opt(c.f2n_first),
            c.diffusive.into(),
            c.singular.into(),
        ]);
    }
    Ok(Outcome::new(vec![table_artifact(
        "classify", &table, cli.format, &prov,
    )]))
}

/// The configuration after applying the command-line overrides.
pub fn experiment_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let Command::Experiment {
        config,
        schedule,
        h,
        box_half_width,
        window,
        pitch,
        omega_half_width,
        ..
    } = &cli.command
    else {
        return Err(CliError::Usage("not an experiment command".into()));
    };
    let mut cfg = match config {
        Some(path) => {
            let bytes = read_bytes(path)?;
            let text =
                String::from_utf8(bytes).map_err(|_| CliError::Config(format!("{} is not UTF-8", path.display())))?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.tolerances.tol = tol;
    }
    if let Some(s) = schedule {
        cfg.schedule.s = s.clone();
    }
    if let Some(h) = h {
        cfg.grid.h = *h;
    }
    if let Some(b) = box_half_width {
        cfg.grid.box_half_width = *b;
    }
    if let Some((a, b)) = window {
        cfg.spectrum.window = [*a, *b];
    }
    if let Some(p) = pitch {
        cfg.tolerances.pitch = *p;
    }
    if let Some(w) = omega_half_width {
        cfg.omega.half_width = Some(*w);
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output.dir = Some(dir.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Failed conditions of `--assert`, one message each.
pub fn experiment_violations(rows: &[ExperimentRow]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if !(r.delta <= r.delta_bound) {
            out.push(format!(
                "{} n={}: delta {} exceeds its bound {}",
                r.path, r.n, r.delta, r.delta_bound
            ));
        }
        if let Some(prev) = rows[..i].iter().rev().find(|p| p.path == r.path) {
            if r.delta > prev.delta {
                out.push(format!(
                    "{} n={}: delta increased from {} to {}",
                    r.path, r.n, prev.delta, r.delta
                ));
            }
        }
        if r.outer_agreement == Some(false) {
            out.push(format!(
                "{} n={}: potential differs from the background far out",
                r.path, r.n
            ));
        }
    }
    out
}

fn experiment_table(rows: &[ExperimentRow]) -> Table {
    let columns: Vec<&str> = EXPERIMENT_CSV_HEADER.split(',').collect();
    let mut table = Table::new(&columns);
    for r in rows {
        table.push(vec![
            r.path.into(),
            r.n.into(),
            r.delta.into(),
            r.delta_bound.into(),
            r.srs_distance.into(),
            r.eig_hausdorff.into(),
            r.bands.as_ref().map(IntervalSet::len).into(),
        ]);
    }
    table
}

fn cmd_experiment(cli: &Cli) -> CliResult<Outcome> {
    let Command::Experiment { assert_checks, .. } = &cli.command else {
        unreachable!("dispatched on the experiment command")
    };
    let cfg = experiment_config(cli)?;
    let prov = Provenance::new("experiment", &[("config", cfg.canonical())]);
    let params = cfg.delone_params()?;
    let spec = cfg.spec();
    let v = cfg.potential.build()?;
    let omega = random_delone(params, cfg.omega_half_width(), cfg.seed, spec.pitch)?;
    let mut rows = approximation_experiment(&omega, &v, &spec, &ApproximationPath::Extension)?;
    rows.extend(approximation_experiment(
        &omega,
        &v,
        &spec,
        &ApproximationPath::Glue {
            gamma: cfg.background()?,
        },
    )?);

    let table = experiment_table(&rows);
    let primary = match cli.format {
        Format::Csv => artifact("experiment.csv", table.to_csv(&prov)),
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("provenance".into(), prov.to_value());
            obj.insert("rows".into(), table.to_value());
            let agreement: Vec<Value> = rows
                .iter()
                .filter_map(|r| {
                    r.outer_agreement
                        .map(|ok| serde_json::json!({"n": finite_or_string(r.n), "outer_agreement": ok}))
                })
                .collect();
            obj.insert("glue_outer_agreement".into(), Value::Array(agreement));
            artifact("experiment.json", pretty(&Value::Object(obj)))
        }
    };
    let series = |path: &str, f: fn(&ExperimentRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().filter(|r| r.path == path).map(|r| (r.n, f(r))).collect()
    };
    let curves = [
        ("delta extension", series("extension", |r| r.delta)),
        ("delta glue", series("glue", |r| r.delta)),
        ("srs extension", series("extension", |r| r.srs_distance)),
        ("srs glue", series("glue", |r| r.srs_distance)),
    ];
    let plot = svg::convergence_plot(&curves, &prov);

    let mut out = Outcome::new(vec![primary, artifact("experiment.svg", plot)]);
    out.default_out_dir = cfg.output.dir.clone();
    if *assert_checks {
        let violations = experiment_violations(&rows);
        if !violations.is_empty() {
            out.failure = Some(CliError::Assertion(violations.join("; ")));
        }
    }
    Ok(out)
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    for a in artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.content).map_err(|source| CliError::Write { path, source })?;
    }
    Ok(())
}

/// Parses `args`, runs the command, prints the primary artifact to stdout
/// and writes all artifacts to the output directory if one is set. Returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    if let Some(primary) = outcome.artifacts.first() {
        print!("{}", primary.content);
    }
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    if let Some(dir) = cli.out_dir.as_ref().or(outcome.default_out_dir.as_ref()) {
        if let Err(e) = write_artifacts(dir, &outcome.artifacts) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    match outcome.failure {
        Some(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_pair("-1,5").unwrap(), (-1.0, 5.0));
        assert!(parse_pair("5,1").is_err());
        assert!(parse_pair("x").is_err());
        assert_eq!(
            parse_level("2:4:0.1").unwrap(),
            Level {
                l: 2.0,
                big_l: 4.0,
                eps: 0.1
            }
        );
        assert!(parse_level("2:4").is_err());
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from([
            "delone",
            "--seed",
            "11",
            "--tol",
            "0.01",
            "experiment",
            "--schedule",
            "3,6",
        ])
        .unwrap();
        let cfg = experiment_config(&cli).unwrap();
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.tolerances.tol, 0.01);
        assert_eq!(cfg.schedule.s, [3.0, 6.0]);
    }

    #[test]
    fn violations_are_reported() {
        let row = |n: f64, delta: f64| ExperimentRow {
            path: "extension",
            n,
            delta,
            delta_bound: 1.0,
            srs_distance: 0.0,
            eig_hausdorff: 0.0,
            bands: None,
            outer_agreement: None,
        };
        assert!(experiment_violations(&[row(1.0, 0.5), row(2.0, 0.4)]).is_empty());
        assert_eq!(experiment_violations(&[row(1.0, 0.4), row(2.0, 0.5)]).len(), 1);
        assert_eq!(experiment_violations(&[row(1.0, 2.0)]).len(), 1);
    }
}
