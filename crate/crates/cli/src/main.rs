use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use premonoidal::frontend::{elaborate, parse};
use premonoidal::io::{self, diagram_to_json, read_diagram, read_signature, read_text, read_theory, IoError};
use premonoidal::render::{render, RenderMode, RenderOptions};
use premonoidal::runtime::{braid_canonical, decode, encode, equals_runtime};
use premonoidal::theory::race_condition_cases;
use premonoidal::{
    Diagram, EffectfulSignature, ProofOutcome, RuntimeDiagram, RuntimeSignature, SearchLimits, TheoryError,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "premonoidal", version)]
#[command(about = "Build, compare, rewrite and draw string diagrams for effectful categories")]
struct Cli {
    /// Signature file; overrides the signature named inside diagram files
    #[arg(long, global = true)]
    sig: Option<PathBuf>,

    /// Distinct diagrams the prover may visit
    #[arg(long, global = true, default_value_t = SearchLimits::default().max_states)]
    max_states: usize,

    /// Exchanges the prover may perform before each rule application
    #[arg(long, global = true, default_value_t = SearchLimits::default().max_prelude)]
    max_prelude: usize,

    /// Prover threads; results do not depend on this
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,

    /// Treat diagrams as runtime (monoidal) diagrams: compare and normalize
    /// up to braids, and prove with the braid rules
    #[arg(long, global = true)]
    as_runtime: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a signature for duplicate or undeclared names
    Validate {
        /// Signature file (defaults to --sig)
        file: Option<PathBuf>,
    },
    /// Print the normal form of a diagram
    Normalize {
        diagram: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide equality up to exchange; exits 1 when not equal
    Equal { left: PathBuf, right: PathBuf },
    /// Translate an effectful diagram into the runtime monoidal category
    Encode {
        /// Diagram file, or `-` for standard input
        diagram: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate a runtime diagram back into an effectful one
    Decode {
        /// Diagram file, or `-` for standard input
        diagram: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a rewrite proof that two diagrams are equal
    Prove {
        /// Theory file; defaults to the braid rules with --as-runtime
        #[arg(long)]
        theory: Option<PathBuf>,
        left: PathBuf,
        right: PathBuf,
    },
    /// Compile an arrow do-notation program to a diagram
    Compile {
        source: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw a diagram as text or SVG
    Render {
        diagram: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Text)]
        mode: Mode,
        /// Draw the runtime wire explicitly
        #[arg(long)]
        show_runtime: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Prove the four race-condition outcomes in the theory of global state
    DemoState,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Text,
    Svg,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

/// 1: the input is well-formed but the answer is negative or ill-typed.
fn domain(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

/// 2: the command line or an input file cannot be used at all.
fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn io_failure(error: IoError) -> Failure {
    match error {
        IoError::Read { .. } | IoError::Json { .. } | IoError::MissingSignature(_) => usage(error),
        IoError::RuleSignature(_) | IoError::Diagram(_) | IoError::Theory(_) => domain(error),
    }
}

enum Outcome {
    Success,
    /// A negative verdict that has already been reported.
    Negative,
}

struct Ctx {
    sig: Option<Arc<EffectfulSignature>>,
    limits: SearchLimits,
    json: bool,
    as_runtime: bool,
}

impl Ctx {
    fn diagram(&self, path: &Path) -> Result<Diagram, Failure> {
        read_diagram(path, self.sig.as_ref()).map_err(io_failure)
    }

    fn runtime(&self, path: &Path) -> Result<RuntimeDiagram, Failure> {
        let d = self.diagram(path)?;
        RuntimeDiagram::from_diagram(d)
            .with_context(|| format!("{}", path.display()))
            .map_err(domain)
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(usage),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    io::to_json(value)
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let sig = match &cli.sig {
        Some(path) => Some(Arc::new(read_signature(path).map_err(io_failure)?)),
        None => None,
    };
    if cli.workers == 0 {
        return Err(usage(anyhow!("--workers must be at least 1")));
    }
    let ctx = Ctx {
        sig,
        limits: SearchLimits {
            max_states: cli.max_states,
            max_prelude: cli.max_prelude,
            workers: cli.workers,
        },
        json: cli.json,
        as_runtime: cli.as_runtime,
    };
    match cli.command {
        Command::Validate { file } => validate(&ctx, file.as_deref().or(cli.sig.as_deref())),
        Command::Normalize { diagram, output } => normalize(&ctx, &diagram, output.as_deref()),
        Command::Equal { left, right } => equal(&ctx, &left, &right),
        Command::Encode { diagram, output } => {
            let d = ctx.diagram(&diagram)?;
            let rsig = Arc::new(RuntimeSignature::new(d.sig()).map_err(domain)?);
            let rd = encode(&rsig, &d).map_err(domain)?;
            emit(&diagram_to_json(rd.diagram()), output.as_deref())?;
            Ok(Outcome::Success)
        }
        Command::Decode { diagram, output } => {
            let d = decode(&ctx.runtime(&diagram)?).map_err(domain)?;
            emit(&diagram_to_json(&d), output.as_deref())?;
            Ok(Outcome::Success)
        }
        Command::Prove { theory, left, right } => prove(&ctx, theory.as_deref(), &left, &right),
        Command::Compile { source, output } => compile(&ctx, &source, output.as_deref()),
        Command::Render {
            diagram,
            mode,
            show_runtime,
            output,
        } => {
            let d = ctx.diagram(&diagram)?;
            let opts = RenderOptions {
                mode: match mode {
                    Mode::Text => RenderMode::Text,
                    Mode::Svg => RenderMode::Svg,
                },
                show_runtime,
                ..RenderOptions::default()
            };
            let drawing = render(&d, &opts).map_err(domain)?;
            let text = if ctx.json {
                pretty(&json!({ "mode": opts.mode, "output": drawing }))
            } else {
                drawing
            };
            emit(&text, output.as_deref())?;
            Ok(Outcome::Success)
        }
        Command::DemoState => demo_state(&ctx),
    }
}

fn validate(ctx: &Ctx, file: Option<&Path>) -> Result<Outcome, Failure> {
    let path = file.ok_or_else(|| usage(anyhow!("no signature given: pass a file or --sig")))?;
    let report = read_signature(path).map_err(io_failure)?.validate();
    if ctx.json {
        print!(
            "{}",
            pretty(&json!({ "ok": report.is_ok(), "violations": report.violations }))
        );
    } else {
        println!("{report}");
    }
    Ok(if report.is_ok() {
        Outcome::Success
    } else {
        Outcome::Negative
    })
}

fn normalize(ctx: &Ctx, path: &Path, output: Option<&Path>) -> Result<Outcome, Failure> {
    if ctx.as_runtime {
        let canonical = braid_canonical(&ctx.runtime(path)?).map_err(domain)?;
        emit(&diagram_to_json(canonical.diagram()), output)?;
        return Ok(Outcome::Success);
    }
    let d = ctx.diagram(path)?;
    let (nf, witness) = d.normal_form_with_witness();
    let text = if ctx.json {
        let file = io::DiagramFile::from_diagram(&nf);
        pretty(&json!({ "normal_form": file, "witness": witness }))
    } else {
        diagram_to_json(&nf)
    };
    emit(&text, output)?;
    Ok(Outcome::Success)
}

fn equal(ctx: &Ctx, left: &Path, right: &Path) -> Result<Outcome, Failure> {
    let (a, b) = (ctx.diagram(left)?, ctx.diagram(right)?);
    let runtime = ctx.as_runtime
        || (RuntimeSignature::recover(a.sig()).is_ok() && RuntimeSignature::recover(b.sig()).is_ok());
    let verdict = if runtime {
        let ra = RuntimeDiagram::from_diagram(a).map_err(domain)?;
        let rb = RuntimeDiagram::from_diagram(b).map_err(domain)?;
        equals_runtime(&ra, &rb).map_err(domain)?
    } else {
        a.equals(&b).map_err(domain)?
    };
    let word = if verdict { "equal" } else { "not-equal" };
    if ctx.json {
        let mode = if runtime { "runtime" } else { "exchange" };
        print!("{}", pretty(&json!({ "equal": verdict, "mode": mode })));
    } else {
        println!("{word}");
    }
    Ok(if verdict {
        Outcome::Success
    } else {
        Outcome::Negative
    })
}

fn report_proof(ctx: &Ctx, outcome: &ProofOutcome) -> Outcome {
    match outcome {
        ProofOutcome::Proven(trace) => {
            if ctx.json {
                print!("{}", pretty(&json!({ "outcome": "proven", "trace": trace })));
            } else {
                print!("{trace}");
            }
            Outcome::Success
        }
        ProofOutcome::NotFound { states_explored } => {
            if ctx.json {
                print!(
                    "{}",
                    pretty(&json!({ "outcome": "not-found", "states_explored": states_explored }))
                );
            } else {
                println!("not-found within limits");
            }
            Outcome::Negative
        }
    }
}

/// Running out of states is reported like an exhausted search.
fn settle(result: Result<ProofOutcome, TheoryError>) -> Result<ProofOutcome, Failure> {
    match result {
        Err(TheoryError::LimitExceeded { states_explored }) => Ok(ProofOutcome::NotFound { states_explored }),
        other => other.map_err(domain),
    }
}

fn prove(ctx: &Ctx, theory: Option<&Path>, left: &Path, right: &Path) -> Result<Outcome, Failure> {
    let outcome = match theory {
        Some(path) => {
            let theory = read_theory(path).map_err(io_failure)?;
            let sig = Some(Arc::clone(theory.sig()));
            let read = |p: &Path| read_diagram(p, ctx.sig.as_ref().or(sig.as_ref())).map_err(io_failure);
            let (a, b) = (read(left)?, read(right)?);
            settle(theory.prove_equal(&a, &b, &ctx.limits))?
        }
        None if ctx.as_runtime => {
            let (a, b) = (ctx.runtime(left)?, ctx.runtime(right)?);
            let theory = a.runtime_signature().braid_theory();
            settle(theory.prove_equal(a.diagram(), b.diagram(), &ctx.limits))?
        }
        None => {
            return Err(usage(anyhow!(
                "prove needs --theory, or --as-runtime for the braid rules"
            )))
        }
    };
    Ok(report_proof(ctx, &outcome))
}

fn compile(ctx: &Ctx, source: &Path, output: Option<&Path>) -> Result<Outcome, Failure> {
    let sig = ctx
        .sig
        .as_ref()
        .ok_or_else(|| usage(anyhow!("compile needs --sig")))?;
    let text = read_text(source).map_err(io_failure)?;
    let d = parse(&text)
        .and_then(|p| elaborate(&p, sig))
        .map_err(|e| domain(anyhow!("{}:{e}", source.display())))?;
    emit(&diagram_to_json(&d), output)?;
    Ok(Outcome::Success)
}

fn demo_state(ctx: &Ctx) -> Result<Outcome, Failure> {
    let theory = premonoidal::theory::race_condition_theory();
    let mut all_proven = true;
    let mut records = Vec::new();
    for case in race_condition_cases() {
        let outcome = settle(theory.prove_equal(&case.interleaving, &case.outcome, &ctx.limits))?;
        let trace = match &outcome {
            ProofOutcome::Proven(trace) => Some(trace.clone()),
            ProofOutcome::NotFound { .. } => None,
        };
        all_proven &= trace.is_some();
        if ctx.json {
            records.push(json!({
                "case": case.name,
                "description": case.description,
                "interleaving": io::DiagramFile { sig: None, ..io::DiagramFile::from_diagram(&case.interleaving) },
                "outcome": io::DiagramFile { sig: None, ..io::DiagramFile::from_diagram(&case.outcome) },
                "trace": trace,
            }));
            continue;
        }
        println!("{}: {}", case.name, case.description);
        match trace {
            Some(trace) => {
                println!("proven in {} steps", trace.steps.len());
                for line in trace.to_string().lines() {
                    println!("  {line}");
                }
            }
            None => println!("  not-found within limits"),
        }
        println!();
    }
    if ctx.json {
        print!("{}", pretty(&serde_json::Value::Array(records)));
    }
    Ok(if all_proven {
        Outcome::Success
    } else {
        Outcome::Negative
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
