use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use echolab::config::parse_override;
use echolab::runner::{manifest_path, resolve_output_root, OUTPUT_DIR_ENV};
use echolab::{recipes, report, ExperimentConfig, ExperimentKind, RunOptions};

#[derive(Parser)]
#[command(name = "echolab", version, about = "Loschmidt echo experiments on kicked maps and the Ising chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Echo ensembles for the kicked sawtooth or rotator.
    EchoKicked(RunArgs),
    /// Classical correlation, Lyapunov and action-difference oracles.
    OracleClassical(RunArgs),
    /// Free-fermion Ising survival probabilities.
    EchoIsing(RunArgs),
    /// Breakdown scans: D(N) for kicked maps, N_d for the Ising chain.
    Scan(RunArgs),
    /// Fit decay rates to existing series files.
    Fit(RunArgs),
    /// Summary tables and plot data from a manifest.
    Report(ReportArgs),
    /// Run (or print) a bundled figure recipe.
    Recipe(RecipeArgs),
}

#[derive(Args, Default)]
struct Common {
    /// Output root; the experiment writes into `<out>/<name>/`.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Overwrite an existing experiment directory.
    #[arg(long)]
    force: bool,
    /// `section.key=value` override, repeatable. Applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    /// `sawtooth` or `rotator`.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    #[arg(long)]
    n_states: Option<usize>,
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    n_p: Vec<usize>,
    #[arg(long, requires = "lambda")]
    lambda0: Option<f64>,
    #[arg(long, requires = "lambda0")]
    lambda: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    delta_lambda: Vec<f64>,
    /// Series files for `fit`.
    #[arg(long = "input")]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Manifest file or experiment directory.
    manifest: PathBuf,
    /// Directory for report files; defaults to the manifest's directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecipeArgs {
    /// Recipe name (`fig1` … `fig10`).
    #[arg(value_name = "RECIPE")]
    recipe: Option<String>,
    /// Print the recipe TOML instead of running it.
    #[arg(long)]
    print: bool,
    /// List the bundled recipes.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    common: Common,
}

fn list(values: &[impl ToString]) -> String {
    let items: Vec<String> = values.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(", "))
}

impl Common {
    fn overrides(&self) -> anyhow::Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        if let Some(s) = self.seed {
            out.push(("seed".into(), s.to_string()));
        }
        if let Some(n) = &self.name {
            out.push(("name".into(), format!("{n:?}")));
        }
        for s in &self.set {
            out.push(parse_override(s)?);
        }
        Ok(out)
    }
}

impl RunArgs {
    fn overrides(&self, kind: ExperimentKind) -> anyhow::Result<Vec<(String, String)>> {
        let mut out = vec![("kind".to_string(), format!("{:?}", kind.name()))];
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        if let Some(m) = &self.model {
            push("model.name", format!("{m:?}"));
        }
        match self.k.as_slice() {
            [] => {}
            [k] => push("model.k", k.to_string()),
            ks => push("sweep.k", list(ks)),
        }
        if !self.n.is_empty() {
            push("sweep.n", list(&self.n));
        }
        if !self.sigma.is_empty() {
            push("sweep.sigma", list(&self.sigma));
        }
        if let Some(n) = self.n_states {
            push("ensemble.n_states", n.to_string());
        }
        if let Some(t) = self.t_max {
            push("time.t_max", t.to_string());
        }
        if !self.n_p.is_empty() {
            push("sweep.n_p", list(&self.n_p));
        }
        if let (Some(a), Some(b)) = (self.lambda0, self.lambda) {
            push("sweep.pairs", format!("[[{a:?}, {b:?}]]"));
        }
        if !self.delta_lambda.is_empty() {
            push("sweep.delta_lambda", list(&self.delta_lambda));
        }
        if !self.inputs.is_empty() {
            let quoted: Vec<String> = self.inputs.iter().map(|p| format!("{:?}", p.to_string_lossy())).collect();
            push("inputs.series", list(&quoted));
        }
        // generic overrides come last so they win over the typed flags
        out.extend(self.common.overrides()?);
        Ok(out)
    }

    fn config(&self, kind: ExperimentKind) -> anyhow::Result<ExperimentConfig> {
        let overrides = self.overrides(kind)?;
        let cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path, &overrides)
                .with_context(|| format!("loading {}", path.display()))?,
            None => {
                let base = format!("name = {:?}\nkind = {:?}\n", kind.name(), kind.name());
                ExperimentConfig::from_toml_with(&base, &overrides)?
            }
        };
        Ok(cfg)
    }
}

fn execute(cfg: &ExperimentConfig, common: &Common) -> anyhow::Result<()> {
    let opts = RunOptions {
        out_root: resolve_output_root(common.out.clone(), cfg),
        force: common.force,
    };
    let outcome = echolab::run(cfg, &opts)?;
    let files: usize = outcome.manifest.runs.iter().map(|r| r.files.len()).sum();
    println!(
        "{}: {} runs, {} files in {}",
        cfg.name,
        outcome.manifest.runs.len(),
        files,
        outcome.dir.display()
    );
    Ok(())
}

fn main_inner() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let run_kind = |kind, args: &RunArgs| -> anyhow::Result<()> {
        let cfg = args.config(kind)?;
        execute(&cfg, &args.common)
    };
    match &cli.command {
        Command::EchoKicked(a) => run_kind(ExperimentKind::KickedEcho, a),
        Command::OracleClassical(a) => run_kind(ExperimentKind::ClassicalOracle, a),
        Command::EchoIsing(a) => run_kind(ExperimentKind::IsingEcho, a),
        Command::Scan(a) => run_kind(ExperimentKind::Scan, a),
        Command::Fit(a) => run_kind(ExperimentKind::Fit, a),
        Command::Report(a) => {
            let path = if a.manifest.is_dir() {
                manifest_path(&a.manifest, "")
            } else {
                a.manifest.clone()
            };
            let out_dir = match &a.out {
                Some(d) => d.clone(),
                None => path.parent().map(PathBuf::from).unwrap_or_default(),
            };
            let out = report::report(&path, &out_dir)?;
            print!("{}", out.text);
            Ok(())
        }
        Command::Recipe(a) => {
            if a.list {
                for name in recipes::names() {
                    println!("{name}");
                }
                return Ok(());
            }
            let Some(name) = &a.recipe else {
                bail!("recipe name required (see --list)");
            };
            if a.print {
                print!("{}", recipes::recipe_text(name)?);
                return Ok(());
            }
            let cfg = recipes::recipe(name, &a.common.overrides()?)?;
            execute(&cfg, &a.common)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
