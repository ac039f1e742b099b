//! attraudit: attribution auditing from the command line.
//!
//! Subcommands: `attribute` (score a model at an example), `forge` (build
//! counterexample models with prescribed attribution), `roc-sweep` (the
//! models × examples × thresholds pipeline), `query-test` (brute-force query
//! rates), `prop4` (the random-polynomial sign experiment), and `verify`
//! (the invariant batteries).
//!
//! Exit codes: 0 success, 2 usage/configuration error, 3 paper-assumption
//! violation (the input breaks a required assumption), 4 verification
//! failure. Every run logs its resolved configuration to `{out}/run.json`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use attraudit::attribution::{attribute, MethodSettings, MethodTag};
use attraudit::baseline::Baseline;
use attraudit::experiment::{
    additive_synthetic, ingest_csv, run_sweep, spurious_synthetic, two_class_synthetic, CsvSchema,
    Dataset, ExperimentConfig, TrainConfig,
};
use attraudit::forge::{
    forge_counterexample, forge_pair, random_polynomial_mc, ForgeError, LocalBehaviour,
};
use attraudit::hyptest::{recourse_ground_truth, Neighbourhood};
use attraudit::model::{Model, PiecewiseLinear1D};
use attraudit::querytest::{empirical_rates, theoretical_rates, QueryPlan};
use attraudit::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(
    name = "attraudit",
    version,
    about = "Feature-attribution auditing toolkit"
)]
struct Cli {
    /// Master seed for all randomized operations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Parallelism degree (defaults to the available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// JSON configuration file; consumed by roc-sweep
    /// ({"experiment": {...}, "train": {...}}), ignored elsewhere.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a feature attribution for a model at an example.
    Attribute(AttributeArgs),
    /// Forge a model with prescribed local behaviour and attribution.
    Forge(ForgeArgs),
    /// Run the ROC sweep over trained (or forged) models.
    RocSweep(RocSweepArgs),
    /// Evaluate brute-force query-testing rates.
    QueryTest(QueryTestArgs),
    /// Estimate the sign-disagreement probability for random polynomials.
    Prop4(Prop4Args),
    /// Run an invariant battery; exits 4 on failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AttributeArgs {
    /// Model JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Baseline JSON file (required by shap and integrated gradients).
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Example, comma-separated reals.
    #[arg(long)]
    x: String,
    /// shap | shap_sampled | ig | ig_exact | gradient | smoothgrad | lime.
    #[arg(long)]
    method: String,
    #[command(flatten)]
    settings: SettingsArgs,
}

#[derive(Args)]
struct SettingsArgs {
    #[arg(long)]
    ig_steps: Option<usize>,
    #[arg(long)]
    shap_baseline_samples: Option<usize>,
    #[arg(long)]
    shap_subset_samples: Option<usize>,
    #[arg(long)]
    smoothgrad_sigma: Option<f64>,
    #[arg(long)]
    smoothgrad_samples: Option<usize>,
    #[arg(long)]
    lime_lambda: Option<f64>,
    #[arg(long)]
    lime_sigma: Option<f64>,
    #[arg(long)]
    lime_samples: Option<usize>,
}

impl SettingsArgs {
    fn resolve(&self, seed: u64) -> MethodSettings {
        let mut settings = MethodSettings::default().with_seed(seed);
        if let Some(v) = self.ig_steps {
            settings.ig_steps = v;
        }
        if let Some(v) = self.shap_baseline_samples {
            settings.shap_baseline_samples = v;
        }
        if let Some(v) = self.shap_subset_samples {
            settings.shap_subset_samples = v;
        }
        if let Some(v) = self.smoothgrad_sigma {
            settings.smoothgrad_sigma = v;
        }
        if let Some(v) = self.smoothgrad_samples {
            settings.smoothgrad_samples = v;
        }
        if let Some(v) = self.lime_lambda {
            settings.lime_lambda = v;
        }
        if let Some(v) = self.lime_sigma {
            settings.lime_sigma = v;
        }
        if let Some(v) = self.lime_samples {
            settings.lime_samples = v;
        }
        settings
    }
}

#[derive(Args)]
struct ForgeArgs {
    /// Behaviour g as inline JSON or @file:
    /// {"breakpoints":[...],"values":[...],"left_slope":s,"right_slope":s}.
    #[arg(long)]
    g_spec: String,
    /// Second behaviour for --pair mode.
    #[arg(long)]
    g_spec1: Option<String>,
    /// Example, comma-separated reals.
    #[arg(long)]
    x: String,
    /// Active feature index.
    #[arg(long, default_value_t = 0)]
    j: usize,
    #[arg(long)]
    delta: f64,
    /// Target attribution (shared by both models in --pair mode).
    #[arg(long)]
    phi: f64,
    #[arg(long)]
    baseline: PathBuf,
    /// Per-feature domain box "lo:hi,lo:hi,..."; defaults to the baseline
    /// support hull, widened to contain the neighbourhood.
    #[arg(long)]
    domain: Option<String>,
    /// Forge a pair with identical attribution and the two behaviours.
    #[arg(long)]
    pair: bool,
}

#[derive(Args)]
struct RocSweepArgs {
    /// Input CSV (requires --schema).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Schema JSON: {"target": ..., "target_kind": ..., "categorical": [...]}.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Bundled synthetic dataset: additive | spurious | two_class.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 400)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    dims: usize,
    /// Replace trained models with forged pairs (the constructive check).
    #[arg(long)]
    forged: bool,
}

#[derive(Args)]
struct QueryTestArgs {
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    lipschitz: f64,
    /// Monte Carlo trials; 0 emits theoretical rates only.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// Named preset; "sec5" is the 21,960-evaluation example.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct Prop4Args {
    #[arg(long, default_value_t = 2)]
    n_degree: u32,
    #[arg(long, default_value_t = 1_000_000)]
    mc_samples: usize,
    /// Baseline JSON file; defaults to Unif(−1.5, 1.5).
    #[arg(long)]
    baseline: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// completeness | linearity | forge | roc | query | prop4 | all.
    suite: String,
}

/// Failure category carrying the documented exit code.
enum Failure {
    Usage(anyhow::Error),
    Assumption(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Assumption(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(e) => format!("{e:#}"),
            Failure::Assumption(m) | Failure::Verification(m) => m.clone(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<ForgeError>() {
            Some(ForgeError::AssumptionViolated(detail)) => {
                Failure::Assumption(format!("Assumption 1 violated: {detail}"))
            }
            Some(ForgeError::MomentCondition(value)) => Failure::Assumption(format!(
                "moment condition violated: E X^n = {value} must lie in (1/2, 1)"
            )),
            _ => Failure::Usage(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("cannot create output directory {}", cli.out.display()))
        .map_err(Failure::Usage)?;
    match &cli.command {
        Command::Attribute(args) => cmd_attribute(cli, args).map_err(Into::into),
        Command::Forge(args) => cmd_forge(cli, args).map_err(Into::into),
        Command::RocSweep(args) => cmd_roc_sweep(cli, args).map_err(Into::into),
        Command::QueryTest(args) => cmd_query_test(cli, args).map_err(Into::into),
        Command::Prop4(args) => cmd_prop4(cli, args).map_err(Into::into),
        Command::Verify(args) => cmd_verify(cli, args),
    }
}

fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("cannot parse '{t}' as a real"))
        })
        .collect()
}

fn load_json(path: &Path) -> Result<serde_json::Value> {
    let body =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&body).with_context(|| format!("malformed JSON in {}", path.display()))
}

fn load_model(path: &Path) -> Result<Model> {
    Model::from_json(&load_json(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_baseline(path: &Path) -> Result<Baseline> {
    Baseline::from_json(&load_json(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn write_run_json(cli: &Cli, command: &str, args: serde_json::Value) -> Result<()> {
    let run = serde_json::json!({
        "command": command,
        "seed": cli.seed,
        "out": cli.out.display().to_string(),
        "format": if cli.format == Format::Csv { "csv" } else { "json" },
        "config": cli.config.as_ref().map(|p| p.display().to_string()),
        "jobs": cli.jobs,
        "args": args,
    });
    let path = cli.out.join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(&run)? + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn cmd_attribute(cli: &Cli, args: &AttributeArgs) -> Result<()> {
    let method: MethodTag = args.method.parse().map_err(|e: String| anyhow!(e))?;
    let model = load_model(&args.model)?;
    let baseline = args
        .baseline
        .as_ref()
        .map(|p| load_baseline(p))
        .transpose()?;
    let x = parse_vector(&args.x)?;
    let settings = args.settings.resolve(cli.seed);
    if method.needs_baseline() && baseline.is_none() {
        bail!("method '{}' requires --baseline", method.as_str());
    }
    let attribution = attribute(method, &model, baseline.as_ref(), &x, &settings)?;
    write_run_json(
        cli,
        "attribute",
        serde_json::json!({
            "model": args.model.display().to_string(),
            "baseline": args.baseline.as_ref().map(|p| p.display().to_string()),
            "x": x,
            "method": method.as_str(),
            "settings": settings,
        }),
    )?;
    let path = match cli.format {
        Format::Csv => {
            let path = cli.out.join("attribution.csv");
            std::fs::write(&path, attribution.to_csv_string())?;
            path
        }
        Format::Json => {
            let path = cli.out.join("attribution.json");
            std::fs::write(
                &path,
                serde_json::to_string_pretty(&attribution.to_json())? + "\n",
            )?;
            path
        }
    };
    for (j, row) in attribution.scores.iter().enumerate() {
        let rendered: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        println!("feature {j}: {}", rendered.join(", "));
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn parse_g_spec(spec: &str) -> Result<PiecewiseLinear1D> {
    let body = if let Some(path) = spec.strip_prefix('@') {
        std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?
    } else {
        spec.to_string()
    };
    let pwl: PiecewiseLinear1D = serde_json::from_str(&body)
        .context("behaviour spec must be a piecewise-linear JSON object")?;
    pwl.validate().map_err(|e| anyhow!("behaviour spec: {e}"))?;
    Ok(pwl)
}

fn parse_domain(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|pair| {
            let (lo, hi) = pair
                .split_once(':')
                .ok_or_else(|| anyhow!("domain entries look like 'lo:hi', got '{pair}'"))?;
            Ok((lo.trim().parse()?, hi.trim().parse()?))
        })
        .collect()
}

/// Default witness domain: the baseline support hull, padded outward so no
/// support atom sits exactly on a witness endpoint (the construction keeps
/// the model zero only beyond the endpoints), and widened so the
/// neighbourhood sits strictly inside with a 10%-of-δ margin.
fn default_domain(baseline: &Baseline, x: &[f64], j: usize, delta: f64) -> Vec<(f64, f64)> {
    let p = baseline.dim();
    let hull = |feature: usize| -> (f64, f64) {
        match baseline {
            Baseline::Pointmass { point } => (point[feature], point[feature]),
            Baseline::Empirical { samples } => samples
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                    (lo.min(s[feature]), hi.max(s[feature]))
                }),
            Baseline::UniformBox { lo, hi } => (lo[feature], hi[feature]),
            Baseline::GaussianIso { center, sigma } => {
                (center[feature] - 8.0 * sigma, center[feature] + 8.0 * sigma)
            }
        }
    };
    (0..p)
        .map(|feature| {
            let (mut lo, mut hi) = hull(feature);
            let pad = 1e-6 * ((hi - lo) + 1.0);
            lo -= pad;
            hi += pad;
            if feature == j {
                lo = lo.min(x[j] - delta - 0.1 * delta);
                hi = hi.max(x[j] + delta + 0.1 * delta);
            }
            (lo, hi)
        })
        .collect()
}

fn cmd_forge(cli: &Cli, args: &ForgeArgs) -> Result<()> {
    let baseline = load_baseline(&args.baseline)?;
    let x = parse_vector(&args.x)?;
    let domain = match &args.domain {
        Some(text) => parse_domain(text)?,
        None => default_domain(&baseline, &x, args.j, args.delta),
    };
    let g0 = parse_g_spec(&args.g_spec)?;
    let behaviour0 = LocalBehaviour::new(g0, x.clone(), args.j, args.delta)?;
    write_run_json(
        cli,
        "forge",
        serde_json::json!({
            "g_spec": args.g_spec,
            "g_spec1": args.g_spec1,
            "x": x,
            "j": args.j,
            "delta": args.delta,
            "phi": args.phi,
            "baseline": args.baseline.display().to_string(),
            "domain": domain,
            "pair": args.pair,
        }),
    )?;
    if args.pair {
        let spec1 = args
            .g_spec1
            .as_ref()
            .ok_or_else(|| anyhow!("--pair requires --g-spec1"))?;
        let g1 = parse_g_spec(spec1)?;
        let behaviour1 = LocalBehaviour::new(g1, x.clone(), args.j, args.delta)?;
        let (f0, f1) = forge_pair(&behaviour0, &behaviour1, &baseline, &domain, args.phi)?;
        let mut shap_scores = Vec::new();
        for (name, forged) in [("forged_0.json", &f0), ("forged_1.json", &f1)] {
            let path = cli.out.join(name);
            std::fs::write(
                &path,
                serde_json::to_string_pretty(&forged.to_json())? + "\n",
            )?;
            println!("wrote {}", path.display());
            if baseline.atoms().is_some() {
                let score = attraudit::attribution::shap_exact(&forged.model, &baseline, &x)?
                    .score(args.j, 0);
                shap_scores.push(score);
            }
            // Recourse ground truth over a grid matching the neighbourhood.
            let nb = Neighbourhood::new(x.clone(), args.j, 1.0, args.delta)?;
            let truth = recourse_ground_truth(&forged.model, &nb, 0)?;
            println!("  recourse ground truth: {}", truth as u8);
        }
        if let [s0, s1] = shap_scores[..] {
            println!(
                "exact SHAP scores: {s0} vs {s1} (|Δ| = {:.3e})",
                (s0 - s1).abs()
            );
        }
    } else {
        let forged = forge_counterexample(&behaviour0, &baseline, &domain, args.phi)?;
        let path = cli.out.join("forged.json");
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&forged.to_json())? + "\n",
        )?;
        println!(
            "wrote {} (beta_left {}, beta_right {}, witness [{}, {}])",
            path.display(),
            forged.beta_left(),
            forged.beta_right(),
            forged.provenance.witness.0,
            forged.provenance.witness.1
        );
    }
    Ok(())
}

fn load_sweep_configs(
    path: Option<&PathBuf>,
    seed: u64,
    forged: bool,
) -> Result<(ExperimentConfig, TrainConfig)> {
    let mut exp = ExperimentConfig {
        seed,
        ..ExperimentConfig::default()
    };
    let mut train = TrainConfig::default();
    if let Some(path) = path {
        let value = load_json(path)?;
        if let Some(e) = value.get("experiment") {
            exp = serde_json::from_value(e.clone()).context("experiment config")?;
            exp.seed = seed;
        }
        if let Some(t) = value.get("train") {
            train = serde_json::from_value(t.clone()).context("train config")?;
        }
    }
    exp.forged_injection = forged || exp.forged_injection;
    Ok((exp, train))
}

fn cmd_roc_sweep(cli: &Cli, args: &RocSweepArgs) -> Result<()> {
    let dataset: Dataset = match (&args.data, &args.synthetic) {
        (Some(path), None) => {
            let schema_path = args
                .schema
                .as_ref()
                .ok_or_else(|| anyhow!("--data requires --schema"))?;
            let schema: CsvSchema =
                serde_json::from_value(load_json(schema_path)?).context("schema JSON")?;
            ingest_csv(path, &schema)?
        }
        (None, Some(name)) => match name.as_str() {
            "additive" => additive_synthetic(cli.seed, args.rows, args.dims),
            "spurious" => spurious_synthetic(cli.seed, args.rows),
            "two_class" => two_class_synthetic(cli.seed, args.rows, args.dims),
            other => bail!("unknown synthetic dataset '{other}' (additive | spurious | two_class)"),
        },
        _ => bail!("provide exactly one of --data or --synthetic"),
    };
    for warning in &dataset.warnings {
        eprintln!("warning: {warning}");
    }
    let (exp, train) = load_sweep_configs(cli.config.as_ref(), cli.seed, args.forged)?;
    let output = run_sweep(&dataset, &exp, &train)?;
    write_run_json(
        cli,
        "roc-sweep",
        serde_json::json!({
            "dataset": dataset.name,
            "provenance": output.provenance,
        }),
    )?;
    for (i, report) in output.train_reports.iter().enumerate() {
        println!(
            "model {i}: loss {:.4} -> {:.4}, train metric {:.4}",
            report.initial_loss, report.final_loss, report.train_metric
        );
    }
    for path in output.write_csvs(&cli.out)? {
        println!("wrote {}", path.display());
    }
    for path in output.write_plots(&cli.out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_query_test(cli: &Cli, args: &QueryTestArgs) -> Result<()> {
    let plan = match args.preset.as_deref() {
        Some("sec5") => QueryPlan {
            delta: 0.05,
            p: 10,
            n: 21_960,
            tau: 0.0,
            epsilon: 0.01,
            lipschitz: 1.0,
            rng_seed: cli.seed,
        },
        Some(other) => bail!("unknown preset '{other}' (expected 'sec5')"),
        None => QueryPlan {
            delta: args.delta,
            p: args.p,
            n: args.n,
            tau: args.tau,
            epsilon: args.epsilon,
            lipschitz: args.lipschitz,
            rng_seed: cli.seed,
        },
    };
    let (spec, sens) = theoretical_rates(&plan).map_err(|e| anyhow!("{e}"))?;
    let empirical = if args.trials > 0 {
        Some(empirical_rates(&plan, args.trials).map_err(|e| anyhow!("{e}"))?)
    } else {
        None
    };
    write_run_json(
        cli,
        "query-test",
        serde_json::json!({ "plan": plan, "trials": args.trials, "preset": args.preset }),
    )?;
    let (spec_hat, sens_hat) = empirical.unwrap_or((f64::NAN, f64::NAN));
    let half_width = if args.trials > 0 {
        2.0 * (sens * (1.0 - sens) / args.trials as f64).sqrt()
    } else {
        f64::NAN
    };
    let path = match cli.format {
        Format::Csv => {
            let mut body = String::from(
                "delta,p,n,tau,epsilon,lipschitz,trials,spec_theory,sens_theory,spec_hat,sens_hat,ci_half_width\n",
            );
            body.push_str(&format!(
                "{},{},{},{},{},{},{},{spec},{sens},{spec_hat},{sens_hat},{half_width}\n",
                plan.delta, plan.p, plan.n, plan.tau, plan.epsilon, plan.lipschitz, args.trials
            ));
            let path = cli.out.join("query_rates.csv");
            std::fs::write(&path, body)?;
            path
        }
        Format::Json => {
            let value = serde_json::json!({
                "plan": plan,
                "trials": args.trials,
                "spec_theory": spec,
                "sens_theory": sens,
                "spec_hat": spec_hat,
                "sens_hat": sens_hat,
                "ci_half_width": half_width,
            });
            let path = cli.out.join("query_rates.json");
            std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")?;
            path
        }
    };
    println!("theoretical: spec {spec}, sens {sens}");
    if args.trials > 0 {
        println!(
            "empirical over {} trials: spec {spec_hat}, sens {sens_hat}",
            args.trials
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_prop4(cli: &Cli, args: &Prop4Args) -> Result<()> {
    let baseline = match &args.baseline {
        Some(path) => load_baseline(path)?,
        None => Baseline::UniformBox {
            lo: vec![-1.5],
            hi: vec![1.5],
        },
    };
    let estimate = random_polynomial_mc(args.n_degree, &baseline, args.mc_samples, cli.seed)?;
    write_run_json(
        cli,
        "prop4",
        serde_json::json!({
            "n_degree": args.n_degree,
            "mc_samples": args.mc_samples,
            "baseline": baseline.to_json(),
        }),
    )?;
    let moment = baseline
        .raw_moment(0, args.n_degree)
        .map_err(|e| anyhow!("{e}"))?;
    let path = match cli.format {
        Format::Csv => {
            let path = cli.out.join("prop4.csv");
            std::fs::write(
                &path,
                format!(
                    "n_degree,mc_samples,moment,estimate\n{},{},{moment},{estimate}\n",
                    args.n_degree, args.mc_samples
                ),
            )?;
            path
        }
        Format::Json => {
            let value = serde_json::json!({
                "n_degree": args.n_degree,
                "mc_samples": args.mc_samples,
                "moment": moment,
                "estimate": estimate,
            });
            let path = cli.out.join("prop4.json");
            std::fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")?;
            path
        }
    };
    println!("sign-disagreement estimate: {estimate} (E X^n = {moment})");
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<(), Failure> {
    let suite: Suite = args
        .suite
        .parse()
        .map_err(|e: String| Failure::Usage(anyhow!(e)))?;
    write_run_json(cli, "verify", serde_json::json!({ "suite": args.suite }))
        .map_err(Failure::Usage)?;
    let reports = run_suite(suite, cli.seed);
    let mut all_passed = true;
    for report in &reports {
        for line in &report.lines {
            println!("{}: {line}", report.name);
        }
        all_passed &= report.passed;
    }
    if all_passed {
        println!("verify: all checks passed");
        Ok(())
    } else {
        Err(Failure::Verification(
            "one or more verification checks failed".into(),
        ))
    }
}
