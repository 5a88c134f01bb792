//! `warplang`: check, elaborate and run warped stream programs.

mod warp_expr;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser as ClapParser, Subcommand};
use warplang_core::elab::{check_program, elaborate_program, ProgramError, TopDef};
use warplang_core::eval::{evaluate_program, EvalError};
use warplang_core::syntax::{parse_program, ParseError, Span};
use warplang_core::ExtNat;

#[derive(ClapParser)]
#[command(name = "warplang", version, about = "Warped types for productive streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the type of every definition.
    Check(FileArgs),
    /// Print every definition with its inserted coercions.
    Elab(FileArgs),
    /// Evaluate definitions at a given step.
    Eval {
        #[command(flatten)]
        file: FileArgs,
        /// A natural number, or `omega`.
        #[arg(long, default_value = "8", value_parser = parse_step)]
        steps: ExtNat,
        /// Only print this definition.
        #[arg(long)]
        def: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a warp expression, e.g. `"(1 0) * (0 1)"`.
    Warp { expr: String },
}

#[derive(clap::Args)]
struct FileArgs {
    /// Source file, or `-` for standard input.
    file: PathBuf,
    /// Treat bodies as explicit terms and check them as written.
    #[arg(long)]
    explicit: bool,
}

fn parse_step(s: &str) -> Result<ExtNat, String> {
    match s {
        "omega" | "w" => Ok(ExtNat::Omega),
        _ => s.parse().map(ExtNat::Fin).map_err(|_| format!("`{s}` is not a step")),
    }
}

enum Failure {
    Io(String),
    Parse(String),
    Type(String),
    Eval(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Type(_) => 1,
            Failure::Parse(_) | Failure::Io(_) => 2,
            Failure::Eval(_) => 3,
        }
    }
}

struct Source {
    name: String,
    text: String,
}

impl Source {
    fn load(path: &PathBuf) -> Result<Source, Failure> {
        let name = path.display().to_string();
        let text = if name == "-" {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Io(format!("<stdin>: {e}")))?;
            buf
        } else {
            std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{name}: {e}")))?
        };
        let name = if name == "-" { "<stdin>".to_string() } else { name };
        Ok(Source { name, text })
    }

    fn locate(&self, span: Span) -> String {
        let (line, col) = span.line_col(&self.text);
        format!("{}:{line}:{col}", self.name)
    }

    fn parse_error(&self, e: ParseError) -> Failure {
        Failure::Parse(format!("{}:{}:{}: parse error: {}", self.name, e.line, e.col, e.message))
    }

    fn type_error(&self, e: ProgramError) -> Failure {
        Failure::Type(format!("{}: type error: {e}", self.locate(e.span())))
    }

    fn defs(&self, explicit: bool) -> Result<Vec<TopDef>, Failure> {
        let prog = parse_program(&self.text).map_err(|e| self.parse_error(e))?;
        let defs = if explicit { check_program(&prog) } else { elaborate_program(&prog) };
        defs.map_err(|e| self.type_error(e))
    }
}

fn eval_error(e: EvalError) -> Failure {
    Failure::Eval(format!("internal evaluation error: {e}"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check(args) => {
            for d in Source::load(&args.file)?.defs(args.explicit)? {
                println!("{} : {}", d.name, d.ty);
            }
        }
        Command::Elab(args) => {
            for d in Source::load(&args.file)?.defs(args.explicit)? {
                println!("{} : {} =\n  {}", d.name, d.ty, d.term);
            }
        }
        Command::Eval { file, steps, def, json } => {
            let src = Source::load(&file.file)?;
            let defs = src.defs(file.explicit)?;
            if let Some(name) = &def {
                if !defs.iter().any(|d| &d.name == name) {
                    return Err(Failure::Type(format!("{}: no definition named `{name}`", src.name)));
                }
            }
            let values = evaluate_program(&defs, steps).map_err(eval_error)?;
            let selected: Vec<_> =
                values.into_iter().filter(|(name, _)| def.as_ref().is_none_or(|d| d == name)).collect();
            if json {
                let out: Vec<_> = selected
                    .iter()
                    .map(|(name, v)| serde_json::json!({ "name": name, "value": v.to_json() }))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            } else {
                for (name, v) in selected {
                    println!("{name} = {v}");
                }
            }
        }
        Command::Warp { expr } => {
            let answer = warp_expr::run(&expr)
                .map_err(|e| Failure::Parse(format!("<expr>:{}:{}: parse error: {}", e.line, e.col, e.message)))?;
            println!("{answer}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Io(m) | Failure::Parse(m) | Failure::Type(m) | Failure::Eval(m)) = &f;
            eprintln!("{m}");
            ExitCode::from(f.code())
        }
    }
}
