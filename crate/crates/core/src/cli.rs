//! Command-line surface.
//!
//! Exit codes: 0 ok; 1 verification failure or other error; 2 bad flags or
//! malformed input; 3 inadmissible order; 4 search exhaustion.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::assembly::{generate, plan, spectrum};
use crate::base::{derived_fixture, render_fixture, store_fixture, DerivedFixture};
use crate::catalog::{reverse_class, HeptClass};
use crate::cert::{parse, render, Format};
use crate::error::Error;
use crate::search::{derive_fixture, SearchBudget, SearchRequest};
use crate::verifier::diagnose;

#[derive(Parser, Debug)]
#[command(name = "heptad", about = "Oriented heptagon decompositions of complete symmetric digraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build and verify a decomposition of K*_v.
    Generate {
        #[arg(long)]
        v: u32,
        #[arg(long, value_parser = parse_class)]
        class: HeptClass,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json", value_parser = parse_format)]
        format: Format,
    },
    /// Check a certificate file (JSON or text).
    Verify { path: PathBuf },
    /// List the ten classes with their orientation words.
    Catalog,
    /// Run a starter search described by a JSON file ("-" for stdin).
    Search { path: PathBuf },
    /// Check the stored derived fixtures; with --regen, re-derive them.
    Fixtures {
        #[arg(long)]
        regen: bool,
        /// With --regen, also write the re-derived files into this directory.
        #[arg(long, requires = "regen")]
        write: Option<PathBuf>,
    },
    /// Admissible orders up to --max.
    Spectrum {
        #[arg(long)]
        max: u32,
    },
    /// Print the construction tree for (v, class).
    Explain {
        #[arg(long)]
        v: u32,
        #[arg(long, value_parser = parse_class)]
        class: HeptClass,
    },
}

fn parse_class(s: &str) -> Result<HeptClass, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::NotAdmissible { .. } => 3,
        Error::Exhausted(_) | Error::UnsatisfiableWithinBudget(_) => 4,
        Error::Malformed(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Runs one command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> crate::Result<i32> {
    match cmd {
        Command::Generate { v, class, out: path, format } => {
            let d = generate(v, class)?;
            let text = render(&d, format);
            match path {
                Some(p) => {
                    std::fs::write(&p, text)?;
                    writeln!(out, "{} blocks", d.blocks.len())?;
                }
                None => {
                    out.write_all(text.as_bytes())?;
                    writeln!(err, "{} blocks", d.blocks.len())?;
                }
            }
            Ok(0)
        }
        Command::Verify { path } => {
            let text = std::fs::read_to_string(&path)?;
            let report = parse(&text)?.verify();
            writeln!(out, "{}", diagnose(&report))?;
            Ok(if report.ok { 0 } else { 1 })
        }
        Command::Catalog => {
            for c in HeptClass::all() {
                let r = reverse_class(c);
                let note = if r == c { "self-reverse".to_string() } else { format!("reverse {r}") };
                writeln!(out, "{c}  word {}  canonical {}  {note}", c.word(), c.canonical_word())?;
            }
            for c in HeptClass::all() {
                let r = reverse_class(c);
                if c < r {
                    writeln!(out, "{c} ↔ {r} (reverse pair)")?;
                }
            }
            Ok(0)
        }
        Command::Search { path } => {
            let text = if path.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin())?
            } else {
                std::fs::read_to_string(&path)?
            };
            let request: SearchRequest = serde_json::from_str(&text)?;
            let set = request.run()?;
            writeln!(out, "{}", serde_json::to_string_pretty(&set)?)?;
            Ok(0)
        }
        Command::Fixtures { regen, write } => fixtures(regen, write, out),
        Command::Spectrum { max } => {
            let vs: Vec<String> = spectrum(max).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", vs.join(" "))?;
            Ok(0)
        }
        Command::Explain { v, class } => {
            writeln!(out, "{}", plan(v, class)?)?;
            Ok(0)
        }
    }
}

fn fixtures(regen: bool, write: Option<PathBuf>, out: &mut dyn Write) -> crate::Result<i32> {
    let mut code = 0;
    for id in DerivedFixture::ALL {
        let stored = derived_fixture(id)?;
        if !regen {
            writeln!(out, "{}  {} / {}  verified  {}", id.file_name(), stored.host, stored.class, stored.sha256)?;
            continue;
        }
        let fresh = derive_fixture(&id.host(), id.pattern(), &SearchBudget::default())?;
        let same = fresh.sha256 == stored.sha256 && render_fixture(&fresh) == render_fixture(&stored);
        let status = if same { "reproduced" } else { "MISMATCH" };
        writeln!(out, "{}  {} / {}  {status}  {}", id.file_name(), fresh.host, fresh.class, fresh.sha256)?;
        if !same {
            code = 1;
        }
        if let Some(dir) = &write {
            std::fs::create_dir_all(dir)?;
            store_fixture(&fresh, &dir.join(id.file_name()))?;
        }
    }
    Ok(code)
}
