//! `wittkit`: validate, evaluate and check Witt vector operations from JSON.

mod suites;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use wittkit::category::{check_word, evaluate_morphism, Leg};
use wittkit::io::{
    coords_text, document_kind, ghost_to_json, map_to_json, parse_json, poset_to_json,
    vector_to_json, AnyVector, DocumentKind, IoError, Workspace,
};
use wittkit::witt::{ghost, ghost_apply, universal, GhostVector, OpKind};

use suites::Suite;

const OK: u8 = 0;
const INVALID: u8 = 1;
const PARSE: u8 = 2;
const INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "wittkit",
    version,
    about = "Witt vectors over truncation posets"
)]
struct Cli {
    /// Print plain text instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    /// Workspace bundle whose names the other arguments may use.
    #[arg(long, short, global = true)]
    workspace: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a poset, map, vector, word or workspace file.
    Validate { file: PathBuf },
    /// Apply a word of restrictions, transfers and norms to a vector.
    Eval {
        /// Word file or workspace name.
        word: String,
        /// Vector file or workspace name.
        vector: String,
        /// Print ghost coordinates of the result.
        #[arg(long)]
        ghost: bool,
    },
    /// Run a randomized property suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bound on poset sizes.
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Print the Hasse diagram of a poset.
    Show {
        /// Poset file or workspace name.
        poset: String,
    },
    /// Print the universal polynomials of an operation along a map.
    Universal {
        /// Map file or workspace name.
        map: String,
        /// pull, transfer or norm.
        #[arg(long)]
        kind: OpKind,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = match &e {
            IoError::Json { .. } => PARSE,
            e if e.is_internal() => INTERNAL,
            _ => INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: INVALID,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok(parse_json(&text)?)
}

struct Ctx {
    ws: Workspace,
    text: bool,
}

impl Ctx {
    /// A workspace name if it exists in `names`, otherwise a file.
    fn resolve(&self, arg: &str, known: bool) -> Result<Value, Failure> {
        if known {
            Ok(Value::String(arg.into()))
        } else {
            read_json(Path::new(arg))
        }
    }

    /// Writes the payload; a closed stdout is not an error.
    fn emit(&self, json: Value, text: impl FnOnce() -> String) {
        let body = if self.text {
            text()
        } else {
            serde_json::to_string_pretty(&json).expect("values serialize") + "\n"
        };
        let _ = std::io::stdout().lock().write_all(body.as_bytes());
    }
}

fn validate(ctx: &Ctx, file: &Path) -> Result<u8, Failure> {
    let doc = read_json(file)?;
    let checked: Result<Value, IoError> = (|| {
        Ok(match document_kind(&doc)? {
            DocumentKind::Poset => {
                let p = ctx.ws.poset(&doc)?;
                json!({
                    "kind": "poset",
                    "elements": p.len(),
                    "components": p.roots().len(),
                    "has_joins": p.has_joins(),
                })
            }
            DocumentKind::Map => {
                let f = ctx.ws.map(&doc)?;
                json!({"kind": "map", "class": f.class().to_string()})
            }
            DocumentKind::Vector => {
                ctx.ws.any_vector(&doc)?;
                json!({"kind": "vector"})
            }
            DocumentKind::Word => {
                let legs = ctx.ws.word(&doc)?;
                check_word(&legs)?;
                json!({"kind": "word", "legs": legs.len()})
            }
            DocumentKind::Workspace => {
                let ws = Workspace::from_value(&doc)?;
                for legs in ws.bispans.values() {
                    check_word(legs)?;
                }
                json!({
                    "kind": "workspace",
                    "posets": ws.posets.len(),
                    "maps": ws.maps.len(),
                    "vectors": ws.vectors.len(),
                    "bispans": ws.bispans.len(),
                })
            }
        })
    })();
    match checked {
        Ok(mut report) => {
            report["valid"] = json!(true);
            ctx.emit(report, || "valid\n".into());
            Ok(OK)
        }
        Err(e @ IoError::Json { .. }) => Err(e.into()),
        Err(e) => {
            let message = e.to_string();
            let code = Failure::from(e).code;
            ctx.emit(json!({"valid": false, "error": message}), || {
                format!("invalid: {message}\n")
            });
            Ok(code)
        }
    }
}

fn eval(ctx: &Ctx, word: &str, vector: &str, as_ghost: bool) -> Result<u8, Failure> {
    let legs: Vec<Leg> = {
        let doc = ctx.resolve(word, ctx.ws.bispans.contains_key(word))?;
        ctx.ws.word(&doc)?
    };
    let input = {
        let doc = ctx.resolve(vector, ctx.ws.vectors.contains_key(vector))?;
        ctx.ws.any_vector(&doc)?
    };
    let g: GhostVector = match input {
        AnyVector::Witt(v) => {
            let out = evaluate_morphism(&legs, &v).map_err(IoError::from)?;
            if !as_ghost {
                ctx.emit(vector_to_json(&out), || {
                    coords_text(out.poset(), out.coords())
                });
                return Ok(OK);
            }
            ghost(&out)
        }
        AnyVector::Ghost(mut g) => {
            check_word(&legs).map_err(IoError::from)?;
            for leg in &legs {
                g = ghost_apply(leg.kind, &leg.map, &g).map_err(IoError::from)?;
            }
            g
        }
    };
    ctx.emit(ghost_to_json(&g), || coords_text(g.poset(), g.coords()));
    Ok(OK)
}

fn show(ctx: &Ctx, poset: &str) -> Result<u8, Failure> {
    let doc = ctx.resolve(poset, ctx.ws.posets.contains_key(poset))?;
    let p = ctx.ws.poset(&doc)?;
    let mut j = poset_to_json(&p);
    j["hasse"] = json!(p.hasse_text());
    ctx.emit(j, || p.hasse_text());
    Ok(OK)
}

fn universal_cmd(ctx: &Ctx, map: &str, kind: OpKind) -> Result<u8, Failure> {
    let doc = ctx.resolve(map, ctx.ws.maps.contains_key(map))?;
    let f = ctx.ws.map(&doc)?;
    let u = universal(&f, kind).map_err(IoError::from)?;
    let out = u.output();
    let formulas: Vec<(u64, String)> = u
        .polys
        .iter()
        .enumerate()
        .map(|(i, p)| (out.id(i), p.to_string()))
        .collect();
    ctx.emit(
        json!({
            "kind": kind.to_string(),
            "map": map_to_json(&f),
            "formulas": formulas.iter().map(|(id, p)| (id.to_string(), json!(p))).collect::<serde_json::Map<_, _>>(),
        }),
        || {
            formulas
                .iter()
                .enumerate()
                .map(|(i, (_, p))| format!("{}: {p}\n", out.display(i)))
                .collect()
        },
    );
    Ok(OK)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let ws = match &cli.workspace {
        Some(path) => Workspace::from_value(&read_json(path)?)?,
        None => Workspace::default(),
    };
    let ctx = Ctx { ws, text: cli.text };
    match cli.command {
        Command::Validate { file } => validate(&ctx, &file),
        Command::Eval {
            word,
            vector,
            ghost,
        } => eval(&ctx, &word, &vector, ghost),
        Command::Verify {
            suite,
            seed,
            size,
            trials,
        } => {
            let report = suites::run(suite, seed, size, trials);
            ctx.emit(
                serde_json::to_value(&report).expect("reports serialize"),
                || report.text(),
            );
            Ok(if report.ok() { OK } else { INTERNAL })
        }
        Command::Show { poset } => show(&ctx, &poset),
        Command::Universal { map, kind } => universal_cmd(&ctx, &map, kind),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
