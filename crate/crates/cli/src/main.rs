use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use mrseql::explain::{explain_with_breakdown, export_breakdown, export_saliency};
use mrseql::linear_model::{evaluate, train_model, LogRegParams, Mode, MrSeqlModel, TrainOptions, TrainReport};
use mrseql::multi_rep::{FixedWindow, GridOptions, RepConfig};
use mrseql::persist::{load_model, save_model, write_feature_csv};
use mrseql::{load_dataset, Dataset, Delimiter, Domain, Execution, Representation, SeqlParams};

#[derive(Parser)]
#[command(name = "mrseql", version, about = "Multi-resolution symbolic time series classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the SAX or SFA words of every series.
    Transform(TransformArgs),
    /// Train a model and save it.
    Train(TrainArgs),
    /// Predict labels for a test file.
    Predict(PredictArgs),
    /// Report the error rate on a labeled test file.
    Evaluate(EvaluateArgs),
    /// Write saliency maps for test series.
    Explain(ExplainArgs),
}

#[derive(Args)]
struct Common {
    /// Field delimiter: `,`, `whitespace`, `tab` or any single character.
    #[arg(long, default_value = ",")]
    delimiter: String,
    /// Worker threads for the per-representation work (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Print wall time per phase and peak memory to stderr.
    #[arg(long)]
    report: bool,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    train: PathBuf,
    /// Series to transform; defaults to the training file. SFA tables are
    /// always fitted on the training file.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, default_value = "sax")]
    domain: String,
    #[arg(long)]
    window: usize,
    #[arg(long)]
    word_len: usize,
    #[arg(long, default_value_t = 4)]
    alpha: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

/// Training settings that may also come from a TOML file.
#[derive(Args, Deserialize, Default)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct TrainSettings {
    /// `ensemble` or `fs`.
    #[arg(long)]
    mode: Option<String>,
    /// `sax`, `sfa` or `both`.
    #[arg(long)]
    domains: Option<String>,
    #[arg(long)]
    minl: Option<usize>,
    /// Window step multiplier; 0.5 doubles the grid density.
    #[arg(long)]
    step_mult: Option<f64>,
    /// Single window per domain: a length or `auto` (0.2 of the longest series).
    #[arg(long)]
    fixed_l: Option<String>,
    #[arg(long)]
    w_sax: Option<usize>,
    #[arg(long)]
    w_sfa: Option<usize>,
    #[arg(long)]
    alpha: Option<usize>,
    /// Sequence learner regularization weight.
    #[arg(long)]
    c: Option<f64>,
    /// Sequence learner L1/L2 mix.
    #[arg(long)]
    alpha_reg: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    convergence_tol: Option<f64>,
    /// Logistic regression L2 weight (default 1/N).
    #[arg(long)]
    lambda: Option<f64>,
}

impl TrainSettings {
    fn layered_over(self, base: TrainSettings) -> TrainSettings {
        TrainSettings {
            mode: self.mode.or(base.mode),
            domains: self.domains.or(base.domains),
            minl: self.minl.or(base.minl),
            step_mult: self.step_mult.or(base.step_mult),
            fixed_l: self.fixed_l.or(base.fixed_l),
            w_sax: self.w_sax.or(base.w_sax),
            w_sfa: self.w_sfa.or(base.w_sfa),
            alpha: self.alpha.or(base.alpha),
            c: self.c.or(base.c),
            alpha_reg: self.alpha_reg.or(base.alpha_reg),
            max_iterations: self.max_iterations.or(base.max_iterations),
            convergence_tol: self.convergence_tol.or(base.convergence_tol),
            lambda: self.lambda.or(base.lambda),
        }
    }

    fn options(&self, exec: Execution) -> Result<TrainOptions> {
        let grid_default = GridOptions::default();
        let seql_default = SeqlParams::default();
        let fixed = self
            .fixed_l
            .as_deref()
            .map(str::parse::<FixedWindow>)
            .transpose()?;
        Ok(TrainOptions {
            mode: self.mode.as_deref().unwrap_or("fs").parse()?,
            domains: self.domains.as_deref().unwrap_or("both").parse()?,
            grid: GridOptions {
                minl: self.minl.unwrap_or(grid_default.minl),
                step_mult: self.step_mult.unwrap_or(grid_default.step_mult),
                fixed,
                w_sax: self.w_sax.unwrap_or(grid_default.w_sax),
                w_sfa: self.w_sfa.unwrap_or(grid_default.w_sfa),
                alpha: self.alpha.unwrap_or(grid_default.alpha),
            },
            seql: SeqlParams {
                c: self.c.unwrap_or(seql_default.c),
                alpha_reg: self.alpha_reg.unwrap_or(seql_default.alpha_reg),
                max_iterations: self.max_iterations.unwrap_or(seql_default.max_iterations),
                convergence_tol: self.convergence_tol.unwrap_or(seql_default.convergence_tol),
            },
            logreg: LogRegParams {
                lambda: self.lambda,
                ..LogRegParams::default()
            },
            exec,
        })
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    train: PathBuf,
    /// Where to write the model.
    #[arg(long)]
    model: PathBuf,
    /// Also export the learned features as CSV.
    #[arg(long)]
    features_csv: Option<PathBuf>,
    /// TOML file with training settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: TrainSettings,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// Append the per-class scores to every line.
    #[arg(long)]
    scores: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Trained model; alternatively train one in memory with --train.
    #[arg(long, conflicts_with = "train")]
    model: Option<PathBuf>,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: PathBuf,
    /// Also print the confusion matrix.
    #[arg(long)]
    confusion: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: TrainSettings,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ExplainArgs {
    #[arg(long)]
    model: PathBuf,
    /// File holding the series to explain.
    #[arg(long)]
    test: PathBuf,
    /// Comma-separated series indices (0-based) or `all`.
    #[arg(long, default_value = "0")]
    series: String,
    /// Comma-separated class names or `all`.
    #[arg(long, default_value = "all")]
    class: String,
    /// Output directory; one `saliency_<series>_<class>.csv` per pair.
    #[arg(long)]
    out: PathBuf,
    /// Also write a per-match `breakdown_<series>_<class>.csv`.
    #[arg(long)]
    breakdown: bool,
    #[command(flatten)]
    common: Common,
}

struct Phases {
    enabled: bool,
    start: Instant,
    last: Instant,
}

impl Phases {
    fn new(enabled: bool) -> Self {
        let now = Instant::now();
        Phases {
            enabled,
            start: now,
            last: now,
        }
    }

    fn mark(&mut self, phase: &str) {
        let now = Instant::now();
        if self.enabled {
            eprintln!("[report] {phase}: {:.3}s", (now - self.last).as_secs_f64());
        }
        self.last = now;
    }

    fn finish(&self) {
        if !self.enabled {
            return;
        }
        eprintln!("[report] total: {:.3}s", self.start.elapsed().as_secs_f64());
        match peak_rss_kib() {
            Some(kib) => eprintln!("[report] peak resident memory: {:.1} MB", kib as f64 / 1024.0),
            None => eprintln!("[report] peak resident memory: unavailable"),
        }
    }
}

/// `VmHWM` from /proc, where the platform has it.
fn peak_rss_kib() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn execution(common: &Common) -> Result<Execution> {
    match common.threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            init_pool(n)?;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

#[cfg(feature = "parallel")]
fn init_pool(n: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("cannot configure the thread pool")
}

#[cfg(not(feature = "parallel"))]
fn init_pool(n: usize) -> Result<()> {
    log::warn!("built without parallel support; ignoring --threads {n}");
    Ok(())
}

fn delimiter(common: &Common) -> Result<Delimiter> {
    Ok(common.delimiter.parse()?)
}

fn load(path: &Path, common: &Common) -> Result<Dataset> {
    match load_dataset(path, delimiter(common)?) {
        Ok(d) => Ok(d),
        // io errors already carry the path
        Err(e @ mrseql::Error::Io { .. }) => Err(e.into()),
        Err(e) => Err(anyhow::Error::new(e).context(format!("cannot parse {}", path.display()))),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn settings(flags: TrainSettings, config: Option<&Path>) -> Result<TrainSettings> {
    let Some(path) = config else {
        return Ok(flags);
    };
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let file: TrainSettings =
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))?;
    Ok(flags.layered_over(file))
}

fn print_train_report(report: &TrainReport) {
    eprintln!("[report] representation,seconds,features,iterations,nodes_evaluated,nodes_pruned");
    for m in &report.members {
        eprintln!(
            "[report] {},{:.3},{},{},{},{}",
            m.rep, m.seconds, m.features, m.iterations, m.nodes_evaluated, m.nodes_pruned
        );
    }
    let peak = report.members.iter().map(|m| m.features).max().unwrap_or(0);
    eprintln!(
        "[report] distinct features {}, peak per representation {}",
        report.n_features, peak
    );
}

fn transform(args: TransformArgs) -> Result<()> {
    let mut phases = Phases::new(args.common.report);
    let train = load(&args.train, &args.common)?;
    let target = match &args.test {
        Some(p) => load(p, &args.common)?,
        None => train.clone(),
    };
    phases.mark("load");
    let domain: Domain = args.domain.parse()?;
    let config = RepConfig::new(Representation {
        domain,
        window: args.window,
        word_len: args.word_len,
        alphabet: args.alpha,
    })?
    .fitted(&train)?;
    let t = config.transformer()?;
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "series,offset,word")?;
    for (i, s) in target.series().iter().enumerate() {
        let seq = t
            .transform(s.values())
            .with_context(|| format!("series {i}"))?;
        for (offset, word) in seq.offsets().iter().zip(seq.rendered_words()) {
            writeln!(out, "{i},{offset},{word}")?;
        }
    }
    out.flush()?;
    phases.mark("transform");
    phases.finish();
    Ok(())
}

fn train(args: TrainArgs) -> Result<()> {
    let exec = execution(&args.common)?;
    let mut phases = Phases::new(args.common.report);
    let opts = settings(args.settings, args.config.as_deref())?.options(exec)?;
    let data = load(&args.train, &args.common)?;
    phases.mark("load");
    let (model, report) = train_model(&data, &opts)?;
    log::info!(
        "trained {} model: {} classes, {} representations, {} features",
        model.mode(),
        model.classes().len(),
        model.grid().len(),
        report.n_features
    );
    phases.mark("train");
    save_model(&model, &args.model)?;
    if let Some(path) = &args.features_csv {
        write_feature_csv(&model, output(Some(path))?)?;
    }
    phases.mark("save");
    if args.common.report {
        print_train_report(&report);
    }
    phases.finish();
    Ok(())
}

fn predict(args: PredictArgs) -> Result<()> {
    let exec = execution(&args.common)?;
    let mut phases = Phases::new(args.common.report);
    let model = load_model(&args.model)?;
    let test = load(&args.test, &args.common)?;
    phases.mark("load");
    let predictions = model.predict_all(&test, exec)?;
    phases.mark("predict");
    let mut out = output(args.out.as_deref())?;
    for (i, p) in predictions.iter().enumerate() {
        write!(out, "{i},{}", model.classes()[p.class])?;
        if args.scores {
            for s in &p.scores {
                write!(out, ",{s}")?;
            }
        }
        writeln!(out)?;
    }
    out.flush()?;
    phases.finish();
    Ok(())
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<()> {
    let exec = execution(&args.common)?;
    let mut phases = Phases::new(args.common.report);
    let model: MrSeqlModel = match (&args.model, &args.train) {
        (Some(path), _) => load_model(path)?,
        (None, Some(path)) => {
            let opts = settings(args.settings, args.config.as_deref())?.options(exec)?;
            let data = load(path, &args.common)?;
            phases.mark("load train");
            let (model, report) = train_model(&data, &opts)?;
            if args.common.report {
                print_train_report(&report);
            }
            model
        }
        (None, None) => bail!("evaluate needs --model or --train"),
    };
    phases.mark("model");
    let test = load(&args.test, &args.common)?;
    let eval = evaluate(&model, &test, exec)?;
    phases.mark("evaluate");
    for name in &eval.unseen {
        log::warn!("test label {name:?} was not seen in training; counted as an error");
    }
    let mut out = io::stdout().lock();
    writeln!(out, "error_rate,{}", eval.error_rate)?;
    if args.confusion {
        writeln!(out, "true\\predicted,{}", model.classes().join(","))?;
        for (name, row) in model.classes().iter().zip(&eval.confusion) {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            writeln!(out, "{name},{}", cells.join(","))?;
        }
    }
    phases.finish();
    Ok(())
}

fn parse_selection(list: &str, n: usize, what: &str) -> Result<Vec<usize>> {
    if list == "all" {
        return Ok((0..n).collect());
    }
    list.split(',')
        .map(|t| {
            let i: usize = t
                .trim()
                .parse()
                .map_err(|_| anyhow!("invalid {what} index {t:?}"))?;
            if i >= n {
                bail!("{what} index {i} out of range: valid range is 0..={}", n.saturating_sub(1));
            }
            Ok(i)
        })
        .collect()
}

fn explain(args: ExplainArgs) -> Result<()> {
    let mut phases = Phases::new(args.common.report);
    let model = load_model(&args.model)?;
    if model.mode() != Mode::FeatureSelection {
        bail!("explain needs a model trained with --mode fs; {} is an ensemble model", args.model.display());
    }
    let test = load(&args.test, &args.common)?;
    phases.mark("load");
    let series = parse_selection(&args.series, test.len(), "series")?;
    let classes: Vec<usize> = if args.class == "all" {
        (0..model.classes().len()).collect()
    } else {
        args.class
            .split(',')
            .map(|name| {
                model.classes().iter().position(|c| c == name.trim()).ok_or_else(|| {
                    anyhow!(
                        "class {:?} is not in the model; known classes: {}",
                        name.trim(),
                        model.classes().join(", ")
                    )
                })
            })
            .collect::<Result<_>>()?
    };
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    for &i in &series {
        let values = test.series()[i].values();
        for &k in &classes {
            let (map, breakdown) = explain_with_breakdown(&model, values, k)?;
            let name = &model.classes()[k];
            let path = args.out.join(format!("saliency_{i}_{name}.csv"));
            let mut out = output(Some(&path))?;
            export_saliency(values, &map, &mut out)?;
            out.flush()?;
            if args.breakdown {
                let path = args.out.join(format!("breakdown_{i}_{name}.csv"));
                let mut out = output(Some(&path))?;
                export_breakdown(&model, &breakdown, &mut out)?;
                out.flush()?;
            }
        }
    }
    phases.mark("explain");
    phases.finish();
    Ok(())
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Transform(a) => transform(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Explain(a) => explain(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
