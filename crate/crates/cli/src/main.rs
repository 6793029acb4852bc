use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use betaplan::DedupPolicy;
use betaplan_cli::{
    cmd_beta, cmd_check_local, cmd_dag, cmd_messages, cmd_simulate, load_program, load_values,
    CliError, DagFormat,
};

const SCHEMA_NOTES: &str = "\
PROGRAM FILES are JSON: {\"objects\": [...], \"kernels\": [...]}.

  object: {\"name\": \"x\", \"N\": 12, \"distribution\": <distribution>}
  distribution: {\"kind\": \"block\" | \"cyclic\" | \"replicated\", \"N\": 12, \"P\": 4}
             or {\"kind\": \"explicit\", \"sets\": [[[lo, hi], ...], ...]}
  kernel: {\"name\": \"heat\", \"input\": \"x\", \"output\": \"y\",
           \"signature\": <signature>, \"combiner\": <combiner>}
  signature: {\"kind\": \"stencil\", \"offsets\": [-1, 0, 1]}
          or {\"kind\": \"affine\", \"stride\": 2, \"offsets\": [0, 1]}
          or {\"kind\": \"sparse\", \"rows\": {\"0\": [[lo, hi], ...], ...}}
          or {\"kind\": \"dense\", \"matrix\": [[0, 1, ...], ...]}   (lowered to sparse)
          or {\"kind\": \"total\"}
  combiner: {\"kind\": \"sum\"} | {\"kind\": \"max\"}
         or {\"kind\": \"weighted\", \"weights\": {\"-1\": -1, \"0\": 2, \"1\": -1}}

Kernels form a chain: the first consumes a program input; every later kernel
consumes the previous kernel's output. Index sets are written as lists of
half-open [lo, hi) intervals. Value files are whitespace-separated integers.

EXIT CODES: 0 success (check-local: all kernels local; simulate: outputs
match); 1 invalid input or non-local kernels under check-local; 2 a kernel
needs an index no processor owns; 3 simulated outputs diverge.";

/// Derive communication structure for data-parallel kernel pipelines.
#[derive(Parser)]
#[command(name = "betaplan", version, after_long_help = SCHEMA_NOTES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every kernel's needed-index (beta) distribution as JSON
    Beta {
        /// Program description file
        file: PathBuf,
    },
    /// Print every kernel's message plan as JSON, with a traffic table on stderr
    Messages {
        /// Program description file
        file: PathBuf,
        /// Who sends an index that several processors own
        #[arg(long, default_value_t = DedupPolicy::LowestOwner, value_parser = parse_policy)]
        policy: DedupPolicy,
    },
    /// Print the layered task graph of the program
    Dag {
        /// Program description file
        file: PathBuf,
        /// Output format
        #[arg(long, value_enum, default_value_t = CliDagFormat::Dot)]
        format: CliDagFormat,
    },
    /// Report which kernels run without communication; exit 0 only if all do
    CheckLocal {
        /// Program description file
        file: PathBuf,
    },
    /// Run the program distributed and compare with a sequential reference
    Simulate {
        /// Program description file
        file: PathBuf,
        /// Input values for the program's input object
        #[arg(long)]
        input: PathBuf,
        /// Who sends an index that several processors own
        #[arg(long, default_value_t = DedupPolicy::LowestOwner, value_parser = parse_policy)]
        policy: DedupPolicy,
        /// Write the event log here as JSON lines
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliDagFormat {
    Dot,
    Json,
}

fn parse_policy(s: &str) -> Result<DedupPolicy, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Beta { file } => {
            let program = load_program(&file)?;
            print!("{}", cmd_beta(&program)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Messages { file, policy } => {
            let program = load_program(&file)?;
            let (plans, table) = cmd_messages(&program, policy)?;
            print!("{plans}");
            eprint!("{table}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Dag { file, format } => {
            let program = load_program(&file)?;
            let format = match format {
                CliDagFormat::Dot => DagFormat::Dot,
                CliDagFormat::Json => DagFormat::Json,
            };
            print!("{}", cmd_dag(&program, format)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckLocal { file } => {
            let program = load_program(&file)?;
            let (report, all_local) = cmd_check_local(&program)?;
            print!("{report}");
            Ok(if all_local {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Simulate {
            file,
            input,
            policy,
            trace,
        } => {
            let program = load_program(&file)?;
            let values = load_values(&input)?;
            let (report, ok) = cmd_simulate(&program, &values, policy, trace.as_deref())?;
            print!("{report}");
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
