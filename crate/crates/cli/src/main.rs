//! `cnlasp`: batch access to every stage.
//!
//! Exit codes: 0 success or satisfiable, 1 unsatisfiable or no parse,
//! 2 usage, input or asset errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use cnlasp_cnl::frontend::sentences;
use cnlasp_cnl::grammar::chart;
use cnlasp_cnl::reifier::emit_facts;
use cnlasp_cnl::{parse_sentence, render_tree, tokenize, AssetSources, Assets, CnlError, Workbench, WorkbenchConfig};
use cnlasp_core::{parse_program, solve, EngineConfig, Exec, ExternalRegistry};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "cnlasp", version, about = "Controlled natural language over an answer-set engine")]
struct Cli {
    /// TOML file naming asset paths and engine settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Grammar program replacing the built-in one.
    #[arg(long, global = true)]
    grammar: Option<PathBuf>,
    /// Lexicon replacing the built-in one.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a program and print its answer sets.
    Solve {
        program: PathBuf,
        /// Answer sets to print; 0 prints all.
        #[arg(long, default_value_t = 1)]
        models: usize,
    },
    /// Parse one sentence and print its tree.
    Parse {
        #[arg(long)]
        text: String,
    },
    /// Translate a text and print its knowledge base and model.
    Run {
        text_file: PathBuf,
        /// Also print chart edges and meta-level atoms.
        #[arg(long)]
        trace: bool,
    },
    /// Suggest admissible next words.
    Lookahead {
        #[arg(long, default_value = "")]
        prefix: String,
    },
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    assets: AssetPaths,
    #[serde(default)]
    engine: EngineSettings,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct AssetPaths {
    grammar: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    lookahead: Option<PathBuf>,
    reify: Option<PathBuf>,
    meta: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct EngineSettings {
    max_term_depth: Option<u32>,
    naf_atom_budget: Option<usize>,
    lookahead_depth: Option<usize>,
    sequential: Option<bool>,
}

/// Failure carrying its exit code.
struct Exit(u8, String);

fn usage(e: anyhow::Error) -> Exit {
    Exit(2, format!("{e:#}"))
}

fn cnl(e: CnlError) -> Exit {
    let code = match e {
        CnlError::NoParse { .. }
        | CnlError::AmbiguousParse { .. }
        | CnlError::NoContinuation { .. }
        | CnlError::UnresolvedAnaphor { .. }
        | CnlError::Unsupported { .. }
        | CnlError::LexiconGap(_) => 1,
        _ => 2,
    };
    Exit(code, e.to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_settings(cli: &Cli) -> Result<(AssetSources, WorkbenchConfig)> {
    let (file, base) = match &cli.config {
        Some(p) => {
            let cfg: ConfigFile = toml::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            (cfg, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (ConfigFile::default(), PathBuf::new()),
    };
    let mut sources = AssetSources::default();
    let from_file = |p: &Option<PathBuf>| p.as_ref().map(|p| base.join(p));
    let slots: [(&mut String, Option<PathBuf>); 5] = [
        (&mut sources.grammar, cli.grammar.clone().or(from_file(&file.assets.grammar))),
        (&mut sources.lexicon, cli.lexicon.clone().or(from_file(&file.assets.lexicon))),
        (&mut sources.lookahead, from_file(&file.assets.lookahead)),
        (&mut sources.reify, from_file(&file.assets.reify)),
        (&mut sources.meta, from_file(&file.assets.meta)),
    ];
    for (slot, path) in slots {
        if let Some(path) = path {
            *slot = read(&path)?;
        }
    }
    let mut config = WorkbenchConfig::default();
    let e = &file.engine;
    if let Some(v) = e.max_term_depth {
        config.engine.max_term_depth = v;
    }
    if let Some(v) = e.naf_atom_budget {
        config.engine.naf_atom_budget = v;
    }
    if let Some(v) = e.lookahead_depth {
        config.lookahead_depth = v;
    }
    if e.sequential == Some(true) {
        config.engine.exec = Exec::Sequential;
    }
    Ok((sources, config))
}

fn workbench(cli: &Cli) -> Result<Workbench, Exit> {
    let (sources, config) = load_settings(cli).map_err(usage)?;
    let assets = Assets::load(&sources).map_err(cnl)?;
    Workbench::new(Arc::new(assets), config).map_err(cnl)
}

fn cmd_solve(program: &Path, models: usize, engine: &EngineConfig) -> Result<u8, Exit> {
    let src = read(program).map_err(usage)?;
    let p = parse_program(&src).map_err(|e| Exit(2, format!("{}: {e}", program.display())))?;
    let cfg = EngineConfig {
        max_models: if models == 0 { usize::MAX } else { models },
        ..*engine
    };
    let r = solve(&p, &mut ExternalRegistry::new(), &cfg).map_err(|e| Exit(2, e.to_string()))?;
    if !r.is_satisfiable() {
        println!("UNSAT");
        return Ok(1);
    }
    for (i, m) in r.rendered().iter().enumerate() {
        println!("Answer {}:", i + 1);
        for l in m {
            println!("{l}");
        }
    }
    Ok(0)
}

fn cmd_parse(wb: &Workbench, text: &str) -> Result<u8, Exit> {
    let assets = wb.assets();
    let toks = tokenize(text, &assets.lexicon).map_err(|e| cnl(e.into()))?;
    let groups = sentences(&toks);
    if groups.len() != 1 {
        return Err(cnl(CnlError::NotOneSentence(groups.len())));
    }
    let trees = parse_sentence(&groups[0], assets, &wb.config().engine).map_err(cnl)?;
    if trees.is_empty() {
        println!("no parse");
        return Ok(1);
    }
    for (i, t) in trees.iter().enumerate() {
        if i > 0 {
            println!();
        }
        println!("{}", render_tree(*t));
    }
    Ok(0)
}

fn trace(wb: &Workbench) -> Result<(), Exit> {
    let assets = wb.assets();
    let cfg = &wb.config().engine;
    let text: Vec<&str> = wb.sentences().iter().map(|c| c.text.as_str()).collect();
    let toks = tokenize(&text.join(" "), &assets.lexicon).map_err(|e| cnl(e.into()))?;
    for s in sentences(&toks) {
        let out = chart(&s, None, assets, cfg).map_err(cnl)?;
        println!("% chart of sentence {}", s[0].sentence_no);
        for f in out.facts.iter().filter(|f| f.atom.functor().is_some_and(|n| n.as_str() == "rule")) {
            let a = f.atom.args();
            println!("%   {} {}-{}", a[0], a[5], a[6]);
        }
    }
    let mut p = assets.meta.clone();
    p.extend(emit_facts(wb.rules()));
    let r = solve(&p, &mut ExternalRegistry::new(), cfg).map_err(|e| Exit(2, e.to_string()))?;
    println!("% meta atoms of the first candidate");
    for l in r.rendered().first().into_iter().flatten() {
        if !l.starts_with("in_AS(") && !["rule(", "head(", "pbl(", "nbl(", "cstr("].iter().any(|p| l.starts_with(p)) {
            println!("%   {l}");
        }
    }
    Ok(())
}

fn cmd_run(wb: &mut Workbench, file: &Path, with_trace: bool) -> Result<u8, Exit> {
    let text = read(file).map_err(usage)?;
    if !text.trim().is_empty() {
        wb.add_text(&text).map_err(cnl)?;
    }
    if with_trace {
        trace(wb)?;
    }
    print!("{}", wb.kb_text());
    println!();
    let r = wb.result();
    if !r.is_satisfiable() {
        println!("UNSAT");
        if !r.violated.is_empty() {
            let ids: Vec<String> = r.violated.iter().map(i64::to_string).collect();
            println!("violated constraints: {}", ids.join(", "));
        }
        if r.inconsistent {
            println!("inconsistent literals");
        }
        return Ok(1);
    }
    for t in &r.model {
        println!("in_AS({t})");
    }
    Ok(0)
}

fn cmd_lookahead(wb: &Workbench, prefix: &str) -> Result<u8, Exit> {
    match wb.lookahead(prefix) {
        Ok(r) => {
            println!("depth {} ({} fragments)", r.depth_used, r.fragments.len());
            for s in &r.suggestions {
                println!("{:<6} {:<3} {}", s.category.to_string(), s.agreement.as_str(), s.surfaces.join(" | "));
            }
            Ok(0)
        }
        Err(CnlError::NoContinuation { max_depth }) => {
            println!("no continuation within {max_depth} words");
            Ok(1)
        }
        Err(e) => Err(cnl(e)),
    }
}

fn run(cli: &Cli) -> Result<u8, Exit> {
    match &cli.command {
        Command::Solve { program, models } => {
            let (_, config) = load_settings(cli).map_err(usage)?;
            cmd_solve(program, *models, &config.engine)
        }
        Command::Parse { text } => cmd_parse(&workbench(cli)?, text),
        Command::Run { text_file, trace } => cmd_run(&mut workbench(cli)?, text_file, *trace),
        Command::Lookahead { prefix } => cmd_lookahead(&workbench(cli)?, prefix),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
