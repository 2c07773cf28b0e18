//! `neurodec` command-line driver.
//!
//! Exit codes: 0 success, 2 configuration or I/O error, 3 failed invariant
//! check, 4 training diverged.

mod config;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use config::{parse_snr_list, parse_weight_map, FileConfig};
use neurodec::code::registry::{self, Registry};
use neurodec::code::CodeSpec;
use neurodec::decoder::weights::WeightFile;
use neurodec::decoder::{
    decode_drn, decode_min_sum, decode_nbp, decode_sum_product, Decoder, DrnWeights, NbpWeights,
};
use neurodec::eval::{self, CostReport, EvalReport, FlopConvention};
use neurodec::train::gradcheck::check_random_point;
use neurodec::train::{self, CodewordSource, Trainable, TrainError};
use output::{file_names, CodeRecord, RunManifest};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Error carrying a specific process exit code.
#[derive(Debug)]
struct Coded(u8, String);

impl fmt::Display for Coded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Coded {}

const EXIT_CONFIG: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_DIVERGED: u8 = 4;

#[derive(Parser)]
#[command(name = "neurodec", version, about = "Train and evaluate neural channel decoders")]
struct Cli {
    /// JSON run configuration; command-line flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; results do not depend on this
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Code registry directory [default: $NEURODEC_CODES_DIR or ./codes]
    #[arg(long, global = true)]
    codes_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Registry name (e.g. ldpc_49_24) or path to an alist file
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Decoding iterations T
    #[arg(long)]
    iterations: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    RandomMessage,
    AllZero,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum DiagKind {
    /// Hard decisions on s versus l after one BP iteration
    SVsL,
    /// Analytic gradients against central differences
    Gradcheck,
    /// Unit-weight NBP/DRN against BP/min-sum
    Equivalence,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a code (or list the registry) with model-size and FLOP counts
    Info {
        #[command(flatten)]
        common: Common,
        /// List registry entries
        #[arg(long)]
        list: bool,
    },
    /// Train an NBP or DRN decoder
    Train {
        #[command(flatten)]
        common: Common,
        /// nbp or drn
        #[arg(long)]
        variant: Option<String>,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        samples_per_snr: Option<usize>,
        /// Training SNRs, e.g. 1,2,3 or 1:6:1
        #[arg(long)]
        snr_grid: Option<String>,
        #[arg(long, value_enum)]
        codeword_source: Option<Source>,
        #[arg(long)]
        log_every: Option<u64>,
    },
    /// Estimate BER of one decoder over an SNR list
    Eval {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        /// uncoded, bp, minsum, nbp or drn
        #[arg(long)]
        variant: Option<String>,
        /// Weight file for nbp/drn (unit weights when omitted)
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Estimate BER of several decoders over an SNR list
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        /// Comma-separated variants [default: uncoded,bp,minsum plus any with weights]
        #[arg(long)]
        variants: Option<String>,
        /// Weight files, e.g. nbp=a.json,drn=b.json
        #[arg(long)]
        weights: Option<String>,
    },
    /// Diagnostics and invariant checks
    Diag {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value = "s-vs-l")]
        kind: DiagKind,
        /// Random points for gradcheck
        #[arg(long, default_value_t = 20)]
        points: u64,
    },
    /// Write the standard code registry
    #[command(hide = true)]
    GenCodes {
        #[arg(long, default_value = "codes")]
        out: PathBuf,
    },
}

#[derive(Args, Clone, Default)]
struct SimArgs {
    /// SNRs (Eb/N0, dB), e.g. 1,2,3 or 1:6:1
    #[arg(long)]
    snr: Option<String>,
    /// Stop each point after this many bit errors
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    max_codewords: Option<u64>,
    /// Transmit without noise (LLRs still use the nominal sigma)
    #[arg(long)]
    noiseless: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Coded>().map_or(EXIT_CONFIG, |c| c.0);
            ExitCode::from(code)
        }
    }
}

struct Ctx {
    cfg: FileConfig,
    codes_dir: PathBuf,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self> {
        let mut cfg = FileConfig::load(cli.config.as_deref())?;
        if cli.workers.is_some() {
            cfg.workers = cli.workers;
        }
        Ok(Self {
            cfg,
            codes_dir: cli
                .codes_dir
                .clone()
                .unwrap_or_else(registry::default_codes_dir),
        })
    }

    fn apply_common(&mut self, c: &Common) {
        if let Some(code) = &c.code {
            self.cfg.code = Some(code.clone());
        }
        if c.seed.is_some() {
            self.cfg.seed = c.seed;
        }
        if c.iterations.is_some() {
            self.cfg.iterations = c.iterations;
        }
        if c.out.is_some() {
            self.cfg.out = c.out.clone();
        }
    }

    fn apply_sim(&mut self, s: &SimArgs) -> Result<()> {
        if let Some(snr) = &s.snr {
            self.cfg.snr = Some(parse_snr_list(snr)?);
        }
        if let Some(m) = s.min_errors {
            self.cfg.eval.min_bit_errors = m;
        }
        if let Some(m) = s.max_codewords {
            self.cfg.eval.max_codewords = m;
        }
        if s.noiseless {
            self.cfg.eval.noiseless = true;
        }
        Ok(())
    }

    fn iterations(&self) -> usize {
        self.cfg.iterations.unwrap_or(self.cfg.train.iterations)
    }

    fn snrs(&self) -> Vec<f64> {
        self.cfg
            .snr
            .clone()
            .unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    }

    fn out_dir(&self, default: String) -> PathBuf {
        self.cfg.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }

    fn load_code(&self) -> Result<(CodeSpec, CodeRecord)> {
        let name = self.cfg.require_code()?;
        let path = if Path::new(name).is_file() {
            PathBuf::from(name)
        } else {
            let reg = Registry::open(&self.codes_dir)
                .with_context(|| format!("opening registry {}", self.codes_dir.display()))?;
            let entry = reg
                .entry(name)
                .ok_or_else(|| anyhow!("unknown code {name:?} in {}", self.codes_dir.display()))?;
            reg.path_of(entry)
        };
        let spec = registry::resolve(name, &self.codes_dir)?;
        for w in &spec.warnings {
            eprintln!("warning: {}: {w:?}", spec.name);
        }
        let record = CodeRecord {
            name: spec.name.clone(),
            n: spec.n,
            k: spec.k,
            path: path.display().to_string(),
            sha256: output::sha256_file(&path)?,
        };
        Ok((spec, record))
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut ctx = Ctx::new(&cli)?;
    match cli.command {
        Command::Info { common, list } => {
            ctx.apply_common(&common);
            ctx.cfg.propagate();
            cmd_info(&ctx, list)
        }
        Command::Train {
            common,
            variant,
            steps,
            lr,
            samples_per_snr,
            snr_grid,
            codeword_source,
            log_every,
        } => {
            ctx.apply_common(&common);
            ctx.cfg.propagate();
            let t = &mut ctx.cfg.train;
            if let Some(s) = steps {
                t.steps = s;
            }
            if let Some(lr) = lr {
                t.learning_rate = lr;
            }
            if let Some(s) = samples_per_snr {
                t.samples_per_snr = s;
            }
            if let Some(g) = snr_grid {
                t.snr_grid = parse_snr_list(&g)?;
            }
            if let Some(src) = codeword_source {
                t.codeword_source = match src {
                    Source::RandomMessage => CodewordSource::RandomMessage,
                    Source::AllZero => CodewordSource::AllZero,
                };
            }
            if let Some(l) = log_every {
                t.log_every = l;
            }
            if variant.is_some() {
                ctx.cfg.variant = variant;
            }
            cmd_train(&ctx)
        }
        Command::Eval {
            common,
            sim,
            variant,
            weights,
        } => {
            ctx.apply_common(&common);
            ctx.apply_sim(&sim)?;
            ctx.cfg.propagate();
            if variant.is_some() {
                ctx.cfg.variant = variant;
            }
            let variant = ctx.cfg.variant.clone().unwrap_or_else(|| "bp".into());
            if let Some(w) = weights {
                ctx.cfg.weights.insert(variant.clone(), w);
            }
            ctx.cfg.variant = Some(variant.clone());
            ctx.cfg.variants = Some(vec![variant]);
            cmd_eval(&ctx, "eval")
        }
        Command::Sweep {
            common,
            sim,
            variants,
            weights,
        } => {
            ctx.apply_common(&common);
            ctx.apply_sim(&sim)?;
            ctx.cfg.propagate();
            if let Some(w) = weights {
                ctx.cfg.weights.extend(parse_weight_map(&w)?);
            }
            if let Some(v) = variants {
                ctx.cfg.variants = Some(v.split(',').map(|s| s.trim().to_string()).collect());
            }
            if ctx.cfg.variants.is_none() {
                let mut v: Vec<String> = ["uncoded", "bp", "minsum"].map(String::from).to_vec();
                v.extend(ctx.cfg.weights.keys().cloned());
                ctx.cfg.variants = Some(v);
            }
            cmd_eval(&ctx, "sweep")
        }
        Command::Diag {
            common,
            sim,
            kind,
            points,
        } => {
            ctx.apply_common(&common);
            ctx.apply_sim(&sim)?;
            ctx.cfg.propagate();
            match kind {
                DiagKind::SVsL => cmd_diag_s_vs_l(&ctx),
                DiagKind::Gradcheck => cmd_diag_gradcheck(&ctx, points),
                DiagKind::Equivalence => cmd_diag_equivalence(&ctx),
            }
        }
        Command::GenCodes { out } => {
            let m = registry::write_standard_registry(&out)?;
            println!("wrote {} codes to {}", m.codes.len(), out.display());
            Ok(())
        }
    }
}

const VARIANTS: [&str; 5] = ["uncoded", "bp", "minsum", "nbp", "drn"];

fn cost_table(spec: &CodeSpec, iterations: usize) -> Vec<CostReport> {
    VARIANTS
        .iter()
        .filter_map(|v| {
            CostReport::new(&spec.name, v, &spec.graph, iterations, FlopConvention::default())
        })
        .collect()
}

fn cmd_info(ctx: &Ctx, list: bool) -> Result<()> {
    if list || ctx.cfg.code.is_none() {
        let reg = Registry::open(&ctx.codes_dir)
            .with_context(|| format!("opening registry {}", ctx.codes_dir.display()))?;
        println!("{:<14} {:>5} {:>5}  {:<8} source", "name", "n", "k", "family");
        for e in reg.entries() {
            println!("{:<14} {:>5} {:>5}  {:<8} {}", e.name, e.n, e.k, e.family, e.source);
        }
        return Ok(());
    }
    let (spec, record) = ctx.load_code()?;
    let t = ctx.iterations();
    println!("code      {}", spec.name);
    println!("file      {} (sha256 {})", record.path, record.sha256);
    println!("n, k      {}, {}  (rate {:.4})", spec.n, spec.k, spec.rate());
    println!("checks    {}", spec.h.rows());
    println!("edges     {}", spec.graph.n_edges());
    println!("density   {:.4}", spec.density());
    println!("var deg   {:?}", spec.graph.var_degree_histogram());
    println!("check deg {:?}", spec.graph.check_degree_histogram());
    println!();
    println!("T = {t}; FLOPs: {}", FlopConvention::default().describe());
    println!("{:<8} {:>8} {:>9} {:>12} {:>12} {:>10} {:>12}", "variant", "params", "bytes", "var", "check", "output", "total");
    for c in cost_table(&spec, t) {
        println!(
            "{:<8} {:>8} {:>9} {:>12} {:>12} {:>10} {:>12}",
            c.variant,
            c.parameter_count,
            c.parameter_bytes,
            c.flops.variable_update,
            c.flops.check_update,
            c.flops.output,
            c.flops_total
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct TrainRun<'a> {
    code: &'a str,
    variant: &'a str,
    train: &'a train::TrainConfig,
}

fn cmd_train(ctx: &Ctx) -> Result<()> {
    let variant = ctx
        .cfg
        .variant
        .clone()
        .ok_or_else(|| anyhow!("train needs --variant nbp|drn"))?;
    let (spec, record) = ctx.load_code()?;
    let tc = &ctx.cfg.train;
    let out = ctx.out_dir(format!("runs/{}_{}_s{}", spec.name, variant, tc.seed));
    match variant.as_str() {
        "drn" => train_variant(ctx, &spec, &record, DrnWeights::ones(&spec.graph, tc.iterations), &out),
        "nbp" => train_variant(ctx, &spec, &record, NbpWeights::ones(&spec.graph, tc.iterations), &out),
        other => bail!("cannot train variant {other:?}; use nbp or drn"),
    }
}

fn log_csv(log: &[train::LossRecord]) -> String {
    let mut s = String::from("step,loss,wall_ms\n");
    for r in log {
        s.push_str(&format!("{},{},{}\n", r.step, r.loss, r.wall_ms));
    }
    s
}

fn train_variant<W: Trainable>(
    ctx: &Ctx,
    spec: &CodeSpec,
    record: &CodeRecord,
    init: W,
    out: &Path,
) -> Result<()> {
    let tc = &ctx.cfg.train;
    let run = TrainRun {
        code: &spec.name,
        variant: W::VARIANT,
        train: tc,
    };
    eprintln!(
        "training {} on {}: {} steps, batch {}, T = {}, seed {}",
        W::VARIANT,
        spec.name,
        tc.steps,
        tc.batch_size(),
        tc.iterations,
        tc.seed
    );
    let result = train::train(spec, init, tc, |r| {
        eprintln!("step {:>6}  loss {:.6}  {} ms", r.step, r.loss, r.wall_ms)
    });
    let mut written = Vec::new();
    let finish = |written: &mut Vec<PathBuf>| -> Result<()> {
        let m = RunManifest {
            tool: "neurodec",
            version: VERSION,
            command: "train",
            code: record,
            config: &run,
            outputs: file_names(written),
        };
        written.push(m.write(out)?);
        Ok(())
    };
    match result {
        Ok(outcome) => {
            let wf = outcome.weights.weight_file(&spec.name, &spec.graph);
            written.push(output::write(out, "weights.json", &wf.to_json())?);
            written.push(output::write(out, "train_log.csv", &log_csv(&outcome.log))?);
            finish(&mut written)?;
            println!("weights written to {}", out.join("weights.json").display());
            Ok(())
        }
        Err(TrainError::DivergenceDetected {
            step,
            last_good,
            log,
        }) => {
            let mut w = W::unit(&spec.graph, tc.iterations);
            w.values_mut().copy_from_slice(&last_good);
            let wf = w.weight_file(&spec.name, &spec.graph);
            written.push(output::write(out, "weights_last_good.json", &wf.to_json())?);
            written.push(output::write(out, "train_log.csv", &log_csv(&log))?);
            finish(&mut written)?;
            Err(Coded(
                EXIT_DIVERGED,
                format!(
                    "training diverged at step {step}; last good weights in {}",
                    out.join("weights_last_good.json").display()
                ),
            )
            .into())
        }
        Err(e) => Err(e.into()),
    }
}

fn build_decoder(ctx: &Ctx, spec: &CodeSpec, variant: &str) -> Result<Decoder> {
    let t = ctx.iterations();
    Ok(match variant {
        "uncoded" => Decoder::Uncoded,
        "bp" => Decoder::SumProduct { iterations: t },
        "minsum" => Decoder::MinSum { iterations: t },
        "nbp" | "drn" => match ctx.cfg.weights.get(variant) {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading weights {}", path.display()))?;
                let wf = WeightFile::from_json(&text)
                    .with_context(|| format!("loading weights {}", path.display()))?;
                if wf.variant != variant {
                    bail!("{} holds {} weights, not {variant}", path.display(), wf.variant);
                }
                if wf.code != spec.name {
                    eprintln!("note: weights were trained on {:?}, evaluating on {:?}", wf.code, spec.name);
                }
                wf.into_decoder(&spec.graph)?
            }
            None => {
                eprintln!("note: no weights for {variant}; using unit weights");
                if variant == "nbp" {
                    Decoder::Nbp(NbpWeights::ones(&spec.graph, t))
                } else {
                    Decoder::Drn(DrnWeights::ones(&spec.graph, t))
                }
            }
        },
        other => bail!("unknown variant {other:?}; expected one of {VARIANTS:?}"),
    })
}

#[derive(Serialize)]
struct EvalRun<'a> {
    code: &'a str,
    variants: &'a [String],
    weights: &'a std::collections::BTreeMap<String, PathBuf>,
    weights_sha256: std::collections::BTreeMap<String, String>,
    iterations: usize,
    snr_db: &'a [f64],
    eval: &'a eval::EvalConfig,
}

fn cmd_eval(ctx: &Ctx, command: &str) -> Result<()> {
    let (spec, record) = ctx.load_code()?;
    let variants = ctx.cfg.variants.clone().unwrap_or_default();
    let snrs = ctx.snrs();
    let out = ctx.out_dir(format!("runs/{}_{command}_s{}", spec.name, ctx.cfg.eval.seed));
    let mut reports = Vec::new();
    let mut written = Vec::new();
    for v in &variants {
        let decoder = build_decoder(ctx, &spec, v)?;
        let mut report = EvalReport {
            code: spec.name.clone(),
            variant: v.clone(),
            iterations: decoder.iterations(),
            seed: ctx.cfg.eval.seed,
            min_bit_errors: ctx.cfg.eval.min_bit_errors,
            max_codewords: ctx.cfg.eval.max_codewords,
            points: Vec::new(),
            cost: CostReport::new(
                &spec.name,
                v,
                &spec.graph,
                decoder.iterations(),
                FlopConvention::default(),
            ),
        };
        for &snr in &snrs {
            let p = eval::estimate_ber(&decoder, &spec, snr, &ctx.cfg.eval)?;
            eprintln!(
                "{:<8} {:>5.2} dB  ber {:.3e}  -ln {:.3}{}  ({} codewords, {} errors){}",
                v,
                snr,
                p.ber,
                p.neg_ln_ber,
                if p.neg_ln_is_lower_bound { "+" } else { "" },
                p.codewords,
                p.bit_errors,
                if p.cap_reached { "  [cap reached]" } else { "" }
            );
            report.points.push(p);
        }
        written.push(output::write(&out, &format!("curve_{v}.dat"), &report.to_gnuplot())?);
        reports.push(report);
    }
    let mut csv = String::from(eval::csv_header());
    csv.push('\n');
    for r in &reports {
        for p in &r.points {
            csv.push_str(&p.csv_row());
            csv.push('\n');
        }
    }
    print!("{csv}");
    written.push(output::write(&out, &format!("{command}.csv"), &csv)?);
    let table = neg_ln_table(&snrs, &reports);
    eprint!("\n{table}");
    written.push(output::write(&out, &format!("{command}_table.txt"), &table)?);
    let json = serde_json::to_string_pretty(&reports).expect("reports serialise") + "\n";
    written.push(output::write(&out, &format!("{command}.json"), &json)?);
    let run = EvalRun {
        code: &spec.name,
        variants: &variants,
        weights: &ctx.cfg.weights,
        weights_sha256: ctx
            .cfg
            .weights
            .iter()
            .filter(|(v, _)| variants.contains(v))
            .map(|(v, p)| Ok((v.clone(), output::sha256_file(p)?)))
            .collect::<Result<_>>()?,
        iterations: ctx.iterations(),
        snr_db: &snrs,
        eval: &ctx.cfg.eval,
    };
    RunManifest {
        tool: "neurodec",
        version: VERSION,
        command,
        code: &record,
        config: &run,
        outputs: file_names(&written),
    }
    .write(&out)?;
    Ok(())
}

/// SNR-by-variant matrix of `-ln(BER)`. `>` marks a zero-error lower bound
/// and `*` a point that stopped at the codeword cap.
fn neg_ln_table(snrs: &[f64], reports: &[EvalReport]) -> String {
    let mut s = format!("{:>8}", "snr_db");
    for r in reports {
        s.push_str(&format!(" {:>10}", r.variant));
    }
    s.push('\n');
    for (i, snr) in snrs.iter().enumerate() {
        s.push_str(&format!("{snr:>8}"));
        for r in reports {
            let p = &r.points[i];
            let cell = format!(
                "{}{:.2}{}",
                if p.neg_ln_is_lower_bound { ">" } else { "" },
                p.neg_ln_ber,
                if p.cap_reached { "*" } else { "" }
            );
            s.push_str(&format!(" {cell:>10}"));
        }
        s.push('\n');
    }
    s
}

fn cmd_diag_s_vs_l(ctx: &Ctx) -> Result<()> {
    let (spec, record) = ctx.load_code()?;
    let snrs = ctx.snrs();
    let rows = eval::s_vs_l_diagnostic(&spec, &snrs, &ctx.cfg.eval)?;
    let mut csv = String::from(
        "snr_db,codewords,ber_s,ci_s_low,ci_s_high,ber_l,ci_l_low,ci_l_high,separated\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}\n",
            r.snr_db,
            r.codewords,
            r.ber_s,
            r.ci_s.0,
            r.ci_s.1,
            r.ber_l,
            r.ci_l.0,
            r.ci_l.1,
            r.separated()
        ));
    }
    print!("{csv}");
    let out = ctx.out_dir(format!("runs/{}_diag_s{}", spec.name, ctx.cfg.eval.seed));
    let written = vec![output::write(&out, "s_vs_l.csv", &csv)?];
    #[derive(Serialize)]
    struct DiagRun<'a> {
        kind: &'static str,
        snr_db: &'a [f64],
        eval: &'a eval::EvalConfig,
    }
    RunManifest {
        tool: "neurodec",
        version: VERSION,
        command: "diag",
        code: &record,
        config: &DiagRun {
            kind: "s-vs-l",
            snr_db: &snrs,
            eval: &ctx.cfg.eval,
        },
        outputs: file_names(&written),
    }
    .write(&out)?;
    let reversed = rows.iter().any(|r| r.ci_l.1 < r.ci_s.0);
    if reversed || !rows.iter().any(|r| r.separated()) {
        return Err(Coded(
            EXIT_INVARIANT,
            "s-based decisions are not separated below l-based decisions".into(),
        )
        .into());
    }
    println!("s-vs-l ordering passed");
    Ok(())
}

fn cmd_diag_gradcheck(ctx: &Ctx, points: u64) -> Result<()> {
    let (spec, _) = ctx.load_code()?;
    let t = ctx.iterations();
    let seed = ctx.cfg.seed.unwrap_or(0);
    let snr = ctx.cfg.snr.as_ref().and_then(|s| s.first().copied()).unwrap_or(2.0);
    let variants: Vec<String> = match &ctx.cfg.variant {
        Some(v) => vec![v.clone()],
        None => vec!["nbp".into(), "drn".into()],
    };
    let mut worst: f64 = 0.0;
    for v in &variants {
        for p in 0..points {
            let check = match v.as_str() {
                "nbp" => check_random_point::<NbpWeights>(&spec, t, seed, p, snr, 4, 1e-5),
                "drn" => check_random_point::<DrnWeights>(&spec, t, seed, p, snr, 4, 1e-5),
                other => bail!("gradcheck supports nbp and drn, not {other:?}"),
            }
            .ok_or_else(|| anyhow!("no tie-free point found for {v} point {p}"))?;
            println!(
                "{v} point {p:>3}: rel error {:.3e}  (|g| {:.3e}, margin {:.2e}, {} redraws)",
                check.report.rel_error, check.report.grad_norm, check.margin, check.rejected
            );
            worst = worst.max(check.report.rel_error);
        }
    }
    if worst >= 1e-4 {
        return Err(Coded(EXIT_INVARIANT, format!("gradient check failed: worst rel error {worst:.3e}")).into());
    }
    println!("gradient check passed: worst rel error {worst:.3e}");
    Ok(())
}

fn cmd_diag_equivalence(ctx: &Ctx) -> Result<()> {
    use neurodec::channel::{llr_from_received, modulate, sigma_from_snr, stream_rng, streams, transmit};
    let (spec, _) = ctx.load_code()?;
    let t = ctx.iterations();
    let seed = ctx.cfg.seed.unwrap_or(0);
    let sigma = sigma_from_snr(2.0, spec.rate())?;
    let zero = vec![0u8; spec.n];
    let mut worst_nbp: f64 = 0.0;
    let mut worst_drn: f64 = 0.0;
    let diff = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    };
    for trial in 0..100u64 {
        let mut rng = stream_rng(seed, &[streams::DIAG, u64::MAX, trial]);
        let llr = llr_from_received(&transmit(&modulate(&zero), sigma, &mut rng), sigma);
        let bp = decode_sum_product(&llr, &spec.graph, t)?;
        let nbp = decode_nbp(&llr, &spec.graph, &NbpWeights::ones(&spec.graph, t))?;
        let ms = decode_min_sum(&llr, &spec.graph, t)?;
        let drn = decode_drn(&llr, &spec.graph, &DrnWeights::ones(&spec.graph, t))?;
        worst_nbp = worst_nbp.max(diff(&bp.soft_trajectory, &nbp.soft_trajectory));
        worst_drn = worst_drn.max(diff(&ms.soft_trajectory, &drn.soft_trajectory));
    }
    println!("unit NBP vs BP:      max |Δs| = {worst_nbp:.3e}");
    println!("unit DRN vs min-sum: max |Δs| = {worst_drn:.3e}");
    if worst_nbp > 1e-9 || worst_drn > 1e-9 {
        return Err(Coded(EXIT_INVARIANT, "unit-weight equivalence violated".into()).into());
    }
    Ok(())
}
