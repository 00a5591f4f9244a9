use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loadmotif::catalog::{load_catalog, mine_parallel, save_catalog};
use loadmotif::config::RunConfig;
use loadmotif::dataset::{load_dataset, save_dataset};
use loadmotif::ingest::{build_dataset, parse_holidays, parse_readings, CsvOptions};
use loadmotif::sweep::{emit_plot_data, emit_summary, emit_timings, run_sweep, standard_grid, write_comment_header};
use loadmotif::synth::{default_start, desk_fixture, generate, recovery_report, write_readings, write_truth, DESK_DAYS};
use loadmotif::{with_threads, Error, Result};
use loadmotif_core::align::AlignConfig;
use loadmotif_core::evaluate::Measure;
use loadmotif_core::mine::BandScheme;
use loadmotif_core::{DayLabel, Normalization, ParameterSet, RangeMode, Variant};
use serde_json::json;

/// Motif mining for 5-minute electricity-meter data.
///
/// Stages communicate through files: `ingest` writes an aligned dataset
/// cache, `mine` writes a motif catalog, `sweep` scores a grid of parameter
/// sets, `synth` makes test households and `score` checks a catalog against
/// their ground truth.
#[derive(Debug, Parser)]
#[command(name = "loadmotif", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse meter readings, align them to the 5-minute grid and keep labelled days.
    Ingest(IngestArgs),
    /// Mine a motif catalog from a dataset cache.
    Mine(MineArgs),
    /// Mine and score a grid of parameter sets.
    Sweep(SweepArgs),
    /// Generate synthetic households with planted activities.
    Synth(SynthArgs),
    /// Measure how well a catalog's top motifs recover planted activities.
    Score(ScoreArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads [default: one per core]. Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Readings as `household_id,timestamp,watts` rows.
    #[arg(long)]
    input: PathBuf,
    /// Dataset cache to write.
    #[arg(long)]
    out: PathBuf,
    /// Holiday calendar, one ISO date per line.
    #[arg(long)]
    holidays: Option<PathBuf>,
    /// Day labels to keep, comma separated, or `all` [default: working-day].
    #[arg(long, value_delimiter = ',')]
    labels: Option<Vec<String>>,
    /// Input starts with a header row.
    #[arg(long)]
    header: bool,
    /// Field delimiter [default: ,].
    #[arg(long)]
    delimiter: Option<char>,
    /// Longest gap between readings before the day is dropped [default: 30].
    #[arg(long)]
    max_gap_minutes: Option<i64>,
    /// Local time offset from UTC; days start at local midnight [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    utc_offset_minutes: Option<i64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Letters in the symbol alphabet, odd [default: 5].
    #[arg(long)]
    alphabet: Option<usize>,
    /// Window length in 5-minute readings [default: 6].
    #[arg(long)]
    motif_len: Option<usize>,
    /// `raw` readings or `difference` between readings [default: difference].
    #[arg(long)]
    variant: Option<Variant>,
    /// `within_window` or `within_household` [default: within_window].
    #[arg(long)]
    normalization: Option<Normalization>,
    /// Collapse repeated letters [default: true].
    #[arg(long)]
    compress: Option<bool>,
    /// `none`, `per_house` or `appliance` [default: appliance].
    #[arg(long)]
    range_mode: Option<RangeMode>,
    /// Smallest interesting window range in watts [default: 100].
    #[arg(long)]
    min_range: Option<f64>,
    /// Reject words starting with this many middle letters [default: 2].
    #[arg(long)]
    middle_prefix: Option<usize>,
    /// Appliance band edges in watts [default: 300,1000,3000,5000,60000].
    #[arg(long, value_delimiter = ',')]
    cutoffs: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Dataset cache from `ingest`.
    #[arg(long)]
    data: PathBuf,
    /// Catalog file to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Dataset cache from `ingest`.
    #[arg(long)]
    data: PathBuf,
    /// Directory for summary.csv, plot.csv and timings.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// `standard` (72 points), `default` (one point) or `custom` (from the config) [default: standard].
    #[arg(long)]
    grid: Option<String>,
    /// Measures to score, comma separated [default: per_day,unique_days,pct_days].
    #[arg(long, value_delimiter = ',')]
    measures: Option<Vec<Measure>>,
    /// Ranks written to the plot data [default: 10].
    #[arg(long)]
    extend_to: Option<usize>,
    /// Smallest interesting window range in watts [default: 100].
    #[arg(long)]
    min_range: Option<f64>,
    /// Reject words starting with this many middle letters [default: 2].
    #[arg(long)]
    middle_prefix: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Household set to generate; only `desk` is built in.
    #[arg(long, default_value = "desk")]
    fixture: String,
    /// Random seed [default: 7].
    #[arg(long)]
    seed: Option<u64>,
    /// Weekdays to generate [default: 65].
    #[arg(long)]
    days: Option<usize>,
    /// Limit the number of households [default: all 20].
    #[arg(long)]
    households: Option<usize>,
    /// Directory for meters.csv and truth.jsonl.
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Catalog file from `mine`.
    #[arg(long)]
    catalog: PathBuf,
    /// Ground-truth log from `synth`.
    #[arg(long)]
    truth: PathBuf,
    /// Allowed start-slot difference.
    #[arg(long, default_value_t = 2)]
    slack: usize,
    /// Top motifs per household considered.
    #[arg(long, default_value_t = 3)]
    top: usize,
    /// Also write the report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(t) = common.threads {
        config.run.threads = t;
    }
    Ok(config)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(mut out: BufWriter<File>, path: &Path) -> Result<()> {
    out.flush().map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let mut config = load_config(&args.common)?;
    let ing = &mut config.ingest;
    if let Some(l) = args.labels {
        ing.labels = l;
    }
    if args.header {
        ing.header = true;
    }
    if let Some(d) = args.delimiter {
        ing.delimiter = d;
    }
    if let Some(g) = args.max_gap_minutes {
        ing.max_gap_minutes = g;
    }
    if let Some(o) = args.utc_offset_minutes {
        ing.utc_offset_minutes = o;
    }
    if args.holidays.is_some() {
        ing.holidays = args.holidays;
    }
    if !ing.delimiter.is_ascii() {
        return Err(Error::Usage("delimiter must be a single ASCII character".into()));
    }
    let wanted: BTreeSet<DayLabel> = ing
        .labels
        .iter()
        .filter(|l| l.as_str() != "all")
        .map(|l| DayLabel::parse(l).ok_or_else(|| Error::Usage(format!("unknown day label '{l}'"))))
        .collect::<Result<_>>()?;
    let holidays = match &ing.holidays {
        Some(path) => parse_holidays(open(path)?, path)?,
        None => BTreeSet::new(),
    };
    let options = CsvOptions {
        delimiter: ing.delimiter as u8,
        has_header: ing.header,
    };
    let align = AlignConfig {
        max_gap_secs: ing.max_gap_minutes * 60,
        utc_offset_secs: ing.utc_offset_minutes * 60,
    };

    let parsed = parse_readings(open(&args.input)?, &options);
    for e in parsed.errors.iter().take(20) {
        eprintln!("{}:{}: {}", args.input.display(), e.line, e.message);
    }
    if parsed.errors.len() > 20 {
        eprintln!("... {} more rejected rows", parsed.errors.len() - 20);
    }
    let (data, summary) = with_threads(config.run.threads, || build_dataset(&parsed, &align, &wanted, &holidays))?;
    let header = json!({ "ingest": config.ingest, "summary": summary });
    save_dataset(&data, header, &args.out)?;
    println!("rows           {}", summary.rows);
    println!("rows rejected  {}", summary.rows_rejected);
    println!("households     {}", summary.households);
    println!("days kept      {}", summary.days_kept);
    println!("days incomplete {}", summary.days_incomplete);
    println!("days filtered  {}", summary.days_filtered);
    Ok(())
}

fn apply_params(config: &mut RunConfig, p: ParamArgs) {
    let params = &mut config.params;
    if let Some(v) = p.alphabet {
        params.alphabet_size = v;
    }
    if let Some(v) = p.motif_len {
        params.motif_len = v;
    }
    if let Some(v) = p.variant {
        params.variant = v;
    }
    if let Some(v) = p.normalization {
        params.normalization = v;
    }
    if let Some(v) = p.compress {
        params.compression = v;
    }
    if let Some(v) = p.range_mode {
        params.range_mode = v;
    }
    if let Some(v) = p.min_range {
        config.filters.min_range = v;
    }
    if let Some(v) = p.middle_prefix {
        config.filters.middle_prefix_len = v;
    }
    if let Some(v) = p.cutoffs {
        config.bands.cutoffs = v;
    }
}

fn usage_check(r: std::result::Result<(), loadmotif_core::Error>) -> Result<()> {
    r.map_err(|e| Error::Usage(e.to_string()))
}

fn cmd_mine(args: MineArgs) -> Result<()> {
    let mut config = load_config(&args.common)?;
    apply_params(&mut config, args.params);
    let scheme = BandScheme {
        mode: config.params.range_mode,
        cutoffs: config.bands.cutoffs.clone(),
    };
    usage_check(loadmotif_core::mine::validate_run(&config.params, &config.filters, &scheme))?;
    let (_, data) = load_dataset(&args.data)?;
    let catalog = with_threads(config.run.threads, || {
        mine_parallel(&data, &config.params, &config.filters, &scheme)
    })?;
    save_catalog(&catalog, &args.out)?;
    println!("parameter set  {}", config.params.id());
    println!("households     {}", catalog.households.len());
    println!("motifs         {}", catalog.motif_count());
    println!("occurrences    {}", catalog.occurrence_count());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut config = load_config(&args.common)?;
    if let Some(g) = args.grid {
        config.sweep.grid = g;
    }
    if let Some(m) = args.measures {
        config.sweep.measures = m;
    }
    if let Some(e) = args.extend_to {
        config.sweep.extend_to = e;
    }
    if let Some(v) = args.min_range {
        config.filters.min_range = v;
    }
    if let Some(v) = args.middle_prefix {
        config.filters.middle_prefix_len = v;
    }
    let grid: Vec<ParameterSet> = match config.sweep.grid.as_str() {
        "standard" => standard_grid(),
        "default" => vec![config.params],
        "custom" if !config.sweep.points.is_empty() => config.sweep.points.clone(),
        "custom" => return Err(Error::Usage("grid 'custom' needs [[sweep.points]] in the config".into())),
        other => return Err(Error::Usage(format!("unknown grid '{other}', expected standard, default or custom"))),
    };
    if config.sweep.measures.is_empty() {
        return Err(Error::Usage("at least one measure is required".into()));
    }
    let eval = config.eval_config(&config.sweep.measures).map_err(|e| Error::Usage(e.to_string()))?;
    usage_check(config.filters.validate())?;
    let (_, data) = load_dataset(&args.data)?;
    let report = with_threads(config.run.threads, || {
        run_sweep(&data, &grid, &config.filters, &config.bands.cutoffs, &eval)
    });

    let effective = json!({
        "grid": config.sweep.grid,
        "points": grid.len(),
        "filters": config.filters,
        "cutoffs": config.bands.cutoffs,
        "eval": eval,
    });
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let write = |name: &str, kind: &str, f: &dyn Fn(&mut BufWriter<File>) -> io::Result<()>| -> Result<()> {
        let path = args.out_dir.join(name);
        let mut out = create(&path)?;
        write_comment_header(&mut out, kind, &effective)
            .and_then(|_| f(&mut out))
            .map_err(|e| Error::io(&path, e))?;
        finish(out, &path)
    };
    write("summary.csv", "sweep-summary", &|out| emit_summary(&report, out))?;
    write("plot.csv", "plot-data", &|out| emit_plot_data(&report, out))?;
    write("timings.csv", "timings", &|out| emit_timings(&report, out))?;

    let failures: Vec<_> = report.failures().collect();
    for (params, message) in &failures {
        eprintln!("grid point {} failed: {message}", params.id());
    }
    match report.best() {
        Some(best) => {
            let score = best.result.as_ref().map(|r| r.combined_score).unwrap_or_default();
            println!("best           {} (mean region score {score})", best.params.id());
            println!("points         {} ok, {} failed", grid.len() - failures.len(), failures.len());
            Ok(())
        }
        None => Err(Error::format(&args.data, 0, "every grid point failed")),
    }
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let config = load_config(&args.common)?;
    if args.fixture != "desk" {
        return Err(Error::Usage(format!("unknown fixture '{}', expected desk", args.fixture)));
    }
    let seed = args.seed.unwrap_or(7);
    let days = args.days.unwrap_or(DESK_DAYS);
    let mut profiles = desk_fixture(seed);
    if let Some(n) = args.households {
        profiles.truncate(n);
    }
    let (data, truth) = with_threads(config.run.threads, || generate(&profiles, days, default_start(), seed))?;
    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let header = json!({ "fixture": args.fixture, "seed": seed, "days": days, "households": profiles.len() });

    let meters = args.out_dir.join("meters.csv");
    let mut out = create(&meters)?;
    write_comment_header(&mut out, "synth-readings", &header)
        .and_then(|_| write_readings(&data, &mut out))
        .map_err(|e| Error::io(&meters, e))?;
    finish(out, &meters)?;

    let truth_path = args.out_dir.join("truth.jsonl");
    let mut out = create(&truth_path)?;
    write_comment_header(&mut out, "synth-truth", &header)
        .and_then(|_| write_truth(&truth, &mut out))
        .map_err(|e| Error::io(&truth_path, e))?;
    finish(out, &truth_path)?;

    println!("households     {}", profiles.len());
    println!("days           {}", days);
    println!("instances      {}", truth.len());
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let catalog = load_catalog(&args.catalog)?;
    let truth = loadmotif::synth::read_truth(open(&args.truth)?, &args.truth)?;
    let report = recovery_report(&catalog, &truth, args.slack, args.top);
    println!("activity,instances,recovered,recall,precision");
    for a in &report.activities {
        let precision = a.precision.map(|p| format!("{p:.4}")).unwrap_or_default();
        println!("{},{},{},{:.4},{}", a.activity, a.instances, a.recovered, a.recall, precision);
    }
    if let Some(path) = &args.out {
        let mut out = create(path)?;
        serde_json::to_writer_pretty(&mut out, &report)
            .map_err(io::Error::other)
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
        finish(out, path)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Mine(a) => cmd_mine(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Score(a) => cmd_score(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) => ExitCode::from(2),
                Error::Io { ref source, .. } if source.kind() == io::ErrorKind::NotFound => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
