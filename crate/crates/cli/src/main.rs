use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lieaid_core::aidcert::AidConfig;
use lieaid_core::catalog::{catalog, AnyTable};
use lieaid_core::derivations::ProbePlan;
use lieaid_core::report::{self, DerivationJson, Report};
use lieaid_core::scalars::FieldSpec;

#[derive(Parser, Debug)]
#[command(name = "lieaid", version, about = "Derivations, almost-inner derivations and Sha = AID/Inn of Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args, Debug, Clone)]
struct Options {
    /// Seed for random probes and witness sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum number of refinement probes.
    #[arg(long, global = true, default_value_t = 2000, value_parser = positive_usize)]
    probe_budget: usize,
    /// Probes without progress before a refinement phase stops.
    #[arg(long, global = true, default_value_t = 25, value_parser = positive_usize)]
    patience: usize,
    /// Largest trimmed augmented system handled by the minors route.
    #[arg(long, global = true, default_value_t = 8, value_parser = positive_usize)]
    minors_limit: usize,
    /// Largest projective point count scanned exhaustively.
    #[arg(long, global = true, default_value_t = 100_000_000, value_parser = positive_u64)]
    scan_budget: u64,
    /// Largest coordinate height of the witness grid over Q and Q(i).
    #[arg(long, global = true, default_value_t = 3, value_parser = positive_u64)]
    witness_height: u64,
    /// Random probes tried before certifying when the field is too large to scan.
    #[arg(long, global = true, default_value_t = 20_000, value_parser = positive_usize)]
    hunt_budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for the exhaustive scan; does not affect results.
    #[arg(long, global = true, value_parser = positive_usize)]
    threads: Option<usize>,
    /// Load tables without checking antisymmetry and Jacobi.
    #[arg(long, global = true)]
    skip_validate: bool,
    /// Write the report to a file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check antisymmetry and the Jacobi identity.
    Validate { input: String },
    /// Basis of Der(g).
    Der { input: String },
    /// Basis of Inn(g).
    Inn { input: String },
    /// Basis of the centre.
    Center { input: String },
    /// Certify AID(g).
    Aid { input: String },
    /// Certify AID(g) and report CAID(g).
    Caid { input: String },
    /// Structure constants of Sha(g) = AID(g)/Inn(g).
    Sha { input: String },
    /// Structure constants of Out(g) = Der(g)/Inn(g).
    Out { input: String },
    /// Certify derivations read from a JSON file.
    Certify { input: String, derivations: PathBuf },
    /// Built-in algebras.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Extend scalars and print the resulting table.
    Extend {
        input: String,
        #[arg(long = "to")]
        to: String,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    List,
    Show { name: String },
}

fn positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> std::result::Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

impl Options {
    fn config(&self) -> AidConfig {
        AidConfig {
            plan: ProbePlan { seed: self.seed, budget: self.probe_budget, patience: self.patience },
            minors_limit: self.minors_limit,
            scan_budget: self.scan_budget,
            witness_height: self.witness_height,
            hunt_budget: self.hunt_budget,
            threads: self.threads,
            ..AidConfig::default()
        }
    }
}

/// A path to an existing file is read as a table; anything else is a catalog name.
fn load(input: &str, validate: bool) -> Result<AnyTable> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {input}"))?;
        return AnyTable::parse_json(&text, validate).with_context(|| format!("loading {input}"));
    }
    catalog(input).with_context(|| format!("{input:?} is neither a file nor a catalog entry"))
}

fn read_derivations(path: &Path) -> Result<Vec<DerivationJson>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ds: Vec<DerivationJson> = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if ds.is_empty() {
        bail!("{} contains no derivations", path.display());
    }
    Ok(ds)
}

fn run(cli: &Cli) -> Result<Report> {
    let o = &cli.opts;
    let validate = !o.skip_validate;
    let config = o.config();
    let start = std::time::Instant::now();
    let mut r = match &cli.command {
        Command::Validate { input } => {
            let t = load(input, false)?;
            t.validate().with_context(|| format!("{input} is not a Lie algebra"))?;
            report::validate_report(&t)
        }
        Command::Der { input } => report::space_report("der", &load(input, validate)?)?,
        Command::Inn { input } => report::space_report("inn", &load(input, validate)?)?,
        Command::Center { input } => report::space_report("center", &load(input, validate)?)?,
        Command::Aid { input } => report::aid_report("aid", &load(input, validate)?, &config, o.timings)?,
        Command::Caid { input } => report::aid_report("caid", &load(input, validate)?, &config, o.timings)?,
        Command::Sha { input } => report::aid_report("sha", &load(input, validate)?, &config, o.timings)?,
        Command::Out { input } => report::out_report(&load(input, validate)?)?,
        Command::Certify { input, derivations } => {
            let t = load(input, validate)?;
            report::certify_report(&t, &read_derivations(derivations)?, &config)?
        }
        Command::Catalog(CatalogCommand::List) => report::catalog_list_report(),
        Command::Catalog(CatalogCommand::Show { name }) => report::table_report("catalog show", &catalog(name)?),
        Command::Extend { input, to } => {
            let spec = FieldSpec::parse_short(to)?;
            let t = load(input, validate)?.extend_scalars(&spec)?;
            report::table_report("extend", &t)
        }
    };
    if o.timings {
        r.timings_ms.get_or_insert_with(Default::default).insert("total".into(), start.elapsed().as_millis() as u64);
    }
    Ok(r)
}

fn emit(cli: &Cli, r: &Report) -> Result<()> {
    // `extend` and `catalog show` in JSON mode emit a loadable table
    let text = match (cli.opts.format, &r.table) {
        (Format::Json, Some(t)) => serde_json::to_string_pretty(t)? + "\n",
        (Format::Json, None) => r.to_json(),
        (Format::Text, _) => r.to_text(),
    };
    match &cli.opts.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
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
    match run(&cli).and_then(|r| emit(&cli, &r).map(|_| r.exit_code())) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
