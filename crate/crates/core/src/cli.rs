//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::asymptotics::{compare_report, convergence_csv, format_float, predictions};
use crate::census::{run_census, CensusRun, CylinderFilter, Filter, Mode, RunConfig};
use crate::curve_type::{multicurve_type, TopType};
use crate::dt::{count_il, volume_limit_check, PantsDecomposition};
use crate::error::{Error, Result};
use crate::foliation::{cylinders, Direction};
use crate::tiling::{GluingTable, MarkedTiling, RawTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "flatcensus",
    version,
    about = "Census of square-tiled surfaces by multicurve type"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate surfaces up to an area and count them by (h_type, v_type).
    Census(CensusArgs),
    /// Merge census directories produced from disjoint shard selections.
    Merge {
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Describe a single gluing table.
    Classify { table: PathBuf },
    /// Print closed-form constants for (g, n).
    Predict {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        names: Vec<String>,
    },
    /// Convergence report of a census against the closed-form constants.
    Compare {
        #[arg(long)]
        census: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count integral Dehn-Thurston points of length at most L.
    DtCount {
        #[arg(long)]
        pants: PathBuf,
        #[arg(long = "L", required = true)]
        l: Vec<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub g: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub max_area: u32,
    #[arg(long, default_value = "pruned")]
    pub mode: String,
    #[arg(long, default_value = "any")]
    pub filter: String,
    #[arg(long)]
    pub h_type: Option<String>,
    #[arg(long, env = "FLATCENSUS_WORKERS", default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub max_work: Option<u64>,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// `i/k`: run every k-th shard starting at i.
    #[arg(long)]
    pub shard: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn parse_shard(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Parse(format!("shard selection {s:?} is not of the form i/k"));
    let (i, k) = s.split_once('/').ok_or_else(bad)?;
    Ok((
        i.trim().parse().map_err(|_| bad())?,
        k.trim().parse().map_err(|_| bad())?,
    ))
}

impl CensusArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(self.g, self.n, self.max_area);
        cfg.mode = self.mode.parse::<Mode>()?;
        cfg.filter = Filter {
            horizontal: self.filter.parse::<CylinderFilter>()?,
            h_type: self.h_type.as_deref().map(str::parse::<TopType>).transpose()?,
        };
        cfg.workers = self.workers;
        cfg.max_work = self.max_work;
        cfg.checkpoint_dir = self.checkpoint.clone();
        cfg.shard = self.shard.as_deref().map(parse_shard).transpose()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceLimit(_) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn rows_json(run: &CensusRun) -> Value {
    Value::Array(
        run.table
            .buckets()
            .map(|(a, h, v, q)| {
                json!({
                    "area": a,
                    "h_type": h,
                    "v_type": v,
                    "count_num": q.numer().to_string(),
                    "count_den": q.denom().to_string(),
                })
            })
            .collect(),
    )
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn cmd_census(args: &CensusArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = args.to_config()?;
    let run = run_census(&cfg)?;
    match &args.out {
        Some(dir) => run.write(dir)?,
        None => match args.format {
            Format::Csv => out.write_all(run.table.to_csv().as_bytes())?,
            Format::Json => out.write_all(pretty(&rows_json(&run)).as_bytes())?,
        },
    }
    Ok(())
}

fn cmd_merge(out_dir: &Path, inputs: &[PathBuf]) -> Result<()> {
    let parts = inputs.iter().map(|p| CensusRun::read(p)).collect::<Result<Vec<_>>>()?;
    CensusRun::merge(&parts)?.write(out_dir)
}

fn direction_json(mt: &MarkedTiling, dir: Direction) -> Result<Value> {
    let cyl = cylinders(mt, dir)?;
    Ok(json!({
        "cylinders": cyl.iter().map(|c| json!({
            "circumference": c.circumference,
            "height": c.height,
            "core": c.core,
        })).collect::<Vec<_>>(),
        "type": multicurve_type(mt, dir)?,
    }))
}

/// Marks a table as given, or when it carries no marks, its angle-π points
/// followed by the lowest-numbered vertices until the surface is hyperbolic.
pub fn default_marking(raw: &RawTable) -> Result<MarkedTiling> {
    let table = GluingTable::from_raw(raw)?;
    let mut ids = raw.marked.clone();
    if ids.is_empty() {
        let cone = crate::tiling::corner_orbits(&table);
        ids = poles(&cone);
        let g = crate::tiling::genus(&table)? as i64;
        for i in 0..cone.len() {
            if 2 - 2 * g - (ids.len() as i64) < 0 {
                break;
            }
            if !ids.contains(&cone.class_id(i)) {
                ids.push(cone.class_id(i));
            }
        }
        ids.sort_unstable();
    }
    MarkedTiling::new(table, &ids)
}

fn poles(cone: &crate::tiling::ConeData) -> Vec<u32> {
    (0..cone.len())
        .filter(|&i| cone.angle(i) == 2)
        .map(|i| cone.class_id(i))
        .collect()
}

/// Report on one table, marked as in [`default_marking`].
pub fn classify(raw: &RawTable) -> Result<Value> {
    let mt = default_marking(raw)?;
    let cone = mt.cone();
    let aut = mt.automorphisms();
    Ok(json!({
        "n_squares": mt.n_squares(),
        "genus": mt.genus(),
        "cone_points": (0..cone.len()).map(|i| json!({
            "id": cone.class_id(i),
            "angle_quarter_turns": cone.angle(i),
            "order": cone.order(i),
            "marked": mt.is_marked(i),
        })).collect::<Vec<_>>(),
        "required_marks": poles(cone),
        "marked": mt.marked_ids(),
        "horizontal": direction_json(&mt, Direction::Horizontal)?,
        "vertical": direction_json(&mt, Direction::Vertical)?,
        "aut_order": aut.order(),
        "aut_has_half_turn": aut.has_half_turn(),
    }))
}

fn cmd_predict(g: u32, n: u32, names: &[String], format: Format, out: &mut dyn Write) -> Result<()> {
    let all = predictions(g, n)?;
    let chosen: Vec<_> = if names.is_empty() {
        all
    } else {
        names
            .iter()
            .map(|name| {
                all.iter()
                    .find(|p| &p.name == name)
                    .cloned()
                    .ok_or_else(|| Error::Domain(format!("no constant named {name:?} for (g, n) = ({g}, {n})")))
            })
            .collect::<Result<_>>()?
    };
    match format {
        Format::Json => {
            let v: Vec<Value> = chosen
                .iter()
                .map(|p| {
                    json!({
                        "name": p.name,
                        "rational": p.constant.rational.to_string(),
                        "pi_power": p.constant.pi_power,
                        "b_power": p.constant.b_power,
                        "provenance": p.constant.provenance,
                    })
                })
                .collect();
            out.write_all(pretty(&Value::Array(v)).as_bytes())?;
        }
        Format::Csv => {
            writeln!(out, "name,rational,pi_power,b_power,provenance")?;
            for p in &chosen {
                let prov = serde_json::to_value(p.constant.provenance)?;
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    p.name,
                    p.constant.rational,
                    p.constant.pi_power,
                    p.constant.b_power,
                    prov.as_str().unwrap_or_default()
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_compare(dir: &Path, out_path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let run = CensusRun::read(dir)?;
    let preds = predictions(run.table.g, run.table.n)?;
    let csv = convergence_csv(&compare_report(&run.table, &preds)?);
    match out_path {
        Some(p) => fs::write(p, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn cmd_dt_count(pants: &Path, ls: &[u64], out: &mut dyn Write) -> Result<()> {
    let pd: PantsDecomposition = serde_json::from_str(&fs::read_to_string(pants)?)?;
    pd.validate()?;
    writeln!(out, "L,count,ratio,limit")?;
    for &l in ls {
        let (ratio, limit) = volume_limit_check(&pd, l)?;
        let count = count_il(&pd, l);
        writeln!(out, "{l},{count},{},{}", float(&ratio), float(&limit))?;
    }
    Ok(())
}

fn float(q: &BigRational) -> String {
    format_float(q.to_f64().unwrap_or(f64::NAN))
}

/// Runs one parsed command, writing its primary output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Census(a) => cmd_census(a, out),
        Command::Merge { out: dir, inputs } => cmd_merge(dir, inputs),
        Command::Classify { table } => {
            let raw: RawTable = serde_json::from_str(&fs::read_to_string(table)?)?;
            out.write_all(pretty(&classify(&raw)?).as_bytes())?;
            Ok(())
        }
        Command::Predict { g, n, format, names } => cmd_predict(*g, *n, names, *format, out),
        Command::Compare { census, out: path } => cmd_compare(census, path.as_deref(), out),
        Command::DtCount { pants, l } => cmd_dt_count(pants, l, out),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
