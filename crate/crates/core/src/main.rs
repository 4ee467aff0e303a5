use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use lazyrules::dataset::{parse_with_schema, AttributeKind, Dataset, Schema, TrainingRows};
use lazyrules::discretize::{initial_grid, Discretization};
use lazyrules::encode::{AttrEncoding, EncodingConfig, EncodingMode};
use lazyrules::evaluate::{analyze_row, evaluate_cv, evaluate_loocv, evaluate_train_test, Settings, DEFAULT_LOOCV_CAP};
use lazyrules::predict::describe_rule;
use lazyrules::rule::QualityParams;
use lazyrules::selftest::run_selftest;
use lazyrules::Error;

#[derive(Parser)]
#[command(
    name = "lazyrules",
    version,
    about = "Lazy classification with local conjunctive rules"
)]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one row using every other row for training.
    Predict {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0)]
        row: usize,
        /// Also list the accepted rules.
        #[arg(long)]
        show_rules: bool,
    },
    /// List the accepted rules for one row.
    Rules {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0)]
        row: usize,
        /// Dump the antecedent components first.
        #[arg(long)]
        show_encoding: bool,
    },
    /// Cross-validation, leave-one-out or train/test evaluation.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        /// Cross-validation folds (default 3)
        #[arg(long)]
        folds: Option<usize>,
        /// Fold shuffle seed (default 1)
        #[arg(long)]
        seed: Option<u64>,
        /// Leave-one-out instead of cross-validation
        #[arg(long)]
        loocv: bool,
        /// Row cap for leave-one-out.
        #[arg(long, default_value_t = DEFAULT_LOOCV_CAP)]
        loocv_cap: usize,
        /// Run leave-one-out above the row cap.
        #[arg(long)]
        force: bool,
        /// Separate test file with the same schema; trains on --data.
        #[arg(long)]
        test: Option<PathBuf>,
        /// Write the key=value report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the initial level grid of every ordered or continuous attribute.
    Discretize {
        #[command(flatten)]
        data: DataArgs,
        /// Equal-width bins instead of entropy-MDL.
        #[arg(long)]
        equal_width: Option<usize>,
    },
    /// Randomized agreement trials between the pruned search and brute force.
    Selftest {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with a header row
    #[arg(long)]
    data: PathBuf,
    /// Schema sidecar (default: the data path with a .schema extension).
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    /// TOML file with parameter defaults; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight of exclusion against coverage in the rule quality (default 0.75)
    #[arg(long)]
    lambda: Option<f64>,
    /// Minimum coverage of the predicted class (default 0.08)
    #[arg(long)]
    cmin: Option<f64>,
    /// Minimum coverage for mismatch rows (default 0.02)
    #[arg(long)]
    cmin_mism: Option<f64>,
    /// Most terms in one rule (default 8)
    #[arg(long)]
    max_depth: Option<usize>,
    /// Keep rules within this factor of the best quality (default 0.98)
    #[arg(long)]
    kappa: Option<f64>,
    /// Correctness slack for treating a rule as perfect (default 0)
    #[arg(long)]
    eps: Option<f64>,
    /// exact, levels or levels-all
    #[arg(long)]
    mode: Option<EncodingMode>,
    /// Per-attribute encoding, NAME=exact or NAME=levels. Repeatable.
    #[arg(long = "attr", value_name = "NAME=ENC")]
    overrides: Vec<String>,
    /// Equal-width bins for continuous attributes instead of entropy-MDL.
    #[arg(long)]
    equal_width: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    lambda: Option<f64>,
    cmin: Option<f64>,
    cmin_mism: Option<f64>,
    max_depth: Option<usize>,
    kappa: Option<f64>,
    eps: Option<f64>,
    mode: Option<String>,
    folds: Option<usize>,
    seed: Option<u64>,
    #[serde(default)]
    overrides: BTreeMap<String, String>,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load(args: &DataArgs) -> Result<Dataset, Failure> {
    let schema_path = args
        .schema
        .clone()
        .unwrap_or_else(|| args.data.with_extension("schema"));
    let schema_text = read(&schema_path)?;
    let schema = Schema::parse(&schema_text).map_err(|e| Failure::Data(format!("{}: {e}", schema_path.display())))?;
    let csv = read(&args.data)?;
    parse_with_schema(&csv, schema).map_err(|e| Failure::Data(format!("{}: {e}", args.data.display())))
}

fn parse_encoding(s: &str) -> Result<AttrEncoding, Failure> {
    match s {
        "exact" => Ok(AttrEncoding::Exact),
        "levels" => Ok(AttrEncoding::Levels),
        _ => Err(Failure::Usage(format!(
            "unknown attribute encoding {s:?} (exact, levels)"
        ))),
    }
}

/// Effective settings: flag, then config file, then built-in default.
fn settings(run: &RunArgs, schema: &Schema) -> Result<(Settings, ConfigFile), Failure> {
    let cfg: ConfigFile = match &run.config {
        Some(path) => toml::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => ConfigFile::default(),
    };
    let d = QualityParams::default();
    let params = QualityParams {
        lambda: run.lambda.or(cfg.lambda).unwrap_or(d.lambda),
        c_min: run.cmin.or(cfg.cmin).unwrap_or(d.c_min),
        c_min_mism: run.cmin_mism.or(cfg.cmin_mism).unwrap_or(d.c_min_mism),
        max_terms: run.max_depth.or(cfg.max_depth).unwrap_or(d.max_terms),
        kappa: run.kappa.or(cfg.kappa).unwrap_or(d.kappa),
        eps: run.eps.or(cfg.eps).unwrap_or(d.eps),
    };
    params.validate()?;
    let mode = match (run.mode, &cfg.mode) {
        (Some(m), _) => m,
        (None, Some(m)) => m.parse().map_err(Failure::Usage)?,
        (None, None) => EncodingMode::default(),
    };
    let mut encoding = EncodingConfig::with_mode(mode);
    for (name, enc) in &cfg.overrides {
        encoding.overrides.insert(name.clone(), parse_encoding(enc)?);
    }
    for o in &run.overrides {
        let (name, enc) = o
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--attr expects NAME=ENC, got {o:?}")))?;
        encoding
            .overrides
            .insert(name.trim().to_string(), parse_encoding(enc.trim())?);
    }
    for name in encoding.overrides.keys() {
        if schema.index_of(name).is_none() {
            return Err(Failure::Usage(format!("--attr names unknown attribute {name:?}")));
        }
    }
    if let Some(k) = run.equal_width {
        encoding.discretization = Discretization::EqualWidth(k);
    }
    Ok((Settings { params, encoding }, cfg))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Predict { run, row, show_rules } => {
            let d = load(&run.data)?;
            let (s, _) = settings(&run, d.schema())?;
            let a = analyze_row(&d, row, &s)?;
            let p = &a.prediction;
            println!("row={row}");
            println!("class={}", d.schema().class_name(p.class));
            println!("probability={:.6}", p.probability);
            println!("source={}", p.source);
            println!("rules={}", p.rules.rules.len());
            if show_rules {
                for r in &p.rules.rules {
                    println!("{}", describe_rule(&a.encoded, r));
                }
            }
        }
        Command::Rules {
            run,
            row,
            show_encoding,
        } => {
            let d = load(&run.data)?;
            let (s, _) = settings(&run, d.schema())?;
            let a = analyze_row(&d, row, &s)?;
            if show_encoding {
                print!("{}", a.encoded.describe());
            }
            for r in &a.prediction.rules.rules {
                println!("{}", describe_rule(&a.encoded, r));
            }
            if a.prediction.rules.rules.is_empty() {
                println!("no rules accepted");
            }
        }
        Command::Evaluate {
            run,
            folds,
            seed,
            loocv,
            loocv_cap,
            force,
            test,
            out,
        } => {
            let d = load(&run.data)?;
            let (s, cfg) = settings(&run, d.schema())?;
            let report = if let Some(test) = test {
                let schema = run
                    .data
                    .schema
                    .clone()
                    .unwrap_or_else(|| run.data.data.with_extension("schema"));
                let t = load(&DataArgs {
                    data: test,
                    schema: Some(schema),
                })?;
                evaluate_train_test(&d, &t, &s)?
            } else if loocv {
                evaluate_loocv(&d, &s, loocv_cap, force)?
            } else {
                let k = folds.or(cfg.folds).unwrap_or(3);
                if k < 2 {
                    return Err(Failure::Usage("--folds must be at least 2".into()));
                }
                evaluate_cv(&d, &s, k, seed.or(cfg.seed).unwrap_or(1))?
            };
            let text = report.render();
            print!("{text}");
            eprintln!("wall_time={:.3}s", report.wall_time.as_secs_f64());
            if let Some(out) = out {
                std::fs::write(&out, text).map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            }
        }
        Command::Discretize { data, equal_width } => {
            let d = load(&data)?;
            let method = equal_width.map_or(Discretization::EntropyMdl, Discretization::EqualWidth);
            let labelled = (0..d.len()).filter(|&r| d.class_of(r).is_some()).collect();
            let training = TrainingRows::new(&d, labelled)?;
            for (i, a) in d.schema().attributes().iter().enumerate() {
                let cuts: Vec<String> = match &a.kind {
                    AttributeKind::Continuous => initial_grid(&training, i, method)?
                        .cuts
                        .iter()
                        .map(|c| c.to_string())
                        .collect(),
                    AttributeKind::Ordered(v) => v.clone(),
                    _ => continue,
                };
                println!("{}: {}", a.name, cuts.join(" "));
            }
        }
        Command::Selftest { trials, seed } => {
            let s = run_selftest(trials, seed);
            println!("trials={}", s.trials);
            println!("passed={}", s.passed);
            println!("failed={}", s.failed_seeds.len());
            println!("rules_compared={}", s.rules_compared);
            if !s.failed_seeds.is_empty() {
                let seeds: Vec<String> = s.failed_seeds.iter().map(|x| x.to_string()).collect();
                println!("failed_seeds={}", seeds.join(","));
                return Err(Failure::Data("search disagrees with the exhaustive oracle".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => Err(Failure::Usage(e.to_string())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
