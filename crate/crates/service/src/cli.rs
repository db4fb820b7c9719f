//! Command line dispatch.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error.

use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand};
use indic_dbcs::codec::Fallback;
use indic_dbcs::ime::ImeSession;
use indic_dbcs::shipped::Resources;
use indic_dbcs::Script;

use crate::http::{self, AppState};
use crate::ops::{self, ServiceError};
use crate::registry::ResourceRegistry;

#[derive(Debug, Parser)]
#[command(name = "indic-dbcs", version, about = "Double-byte Indic text tools")]
pub struct Cli {
    /// Resource directory replacing the built-in data.
    #[arg(long, global = true, env = "INDIC_DBCS_RESOURCES")]
    pub resources: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input file; stdin when absent or `-`.
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// UTF-8 text to internal code.
    Encode(Io),
    /// Internal code to UTF-8 text.
    Decode {
        /// Replace bad units with U+FFFD instead of failing.
        #[arg(long)]
        lossy: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Internal code to the 7-bit interchange form.
    Interchange {
        /// Interchange form back to internal code.
        #[arg(long)]
        reverse: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Moves text between parallel Brahmic blocks.
    Translit {
        #[arg(long)]
        from: Script,
        #[arg(long)]
        to: Script,
        /// strict, passthrough or mark.
        #[arg(long, default_value = "strict")]
        fallback: Fallback,
        #[command(flatten)]
        io: Io,
    },
    /// Shapes one line of text into a PBM bitmap.
    Render {
        #[arg(long, default_value = "16", value_parser = PossibleValuesParser::new(["16", "24", "48"]).map(|s| s.parse::<u16>().unwrap()))]
        size: u16,
        #[command(flatten)]
        io: Io,
    },
    /// Level-1 / level-2 / unassigned fractions of a corpus.
    Coverage {
        /// The corpus is whitespace-separated character ids.
        #[arg(long)]
        ids: bool,
        #[command(flatten)]
        io: Io,
    },
    /// Line-mode input method.
    ///
    /// Each line is typed key by key, except the commands `:select N`,
    /// `:back`, `:commit` and `:page N`.
    Ime(Io),
    /// Word-by-word gloss of each input line.
    Gloss {
        #[arg(long)]
        pair: String,
        #[command(flatten)]
        io: Io,
    },
    /// Inspect loaded resources.
    Resources {
        #[command(subcommand)]
        command: ResourcesCommand,
    },
    /// Runs the HTTP service.
    Serve {
        #[arg(long, env = "INDIC_DBCS_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "INDIC_DBCS_BIND", default_value = "127.0.0.1")]
        bind: String,
        /// Minutes before an idle session is dropped.
        #[arg(long, env = "INDIC_DBCS_IDLE_MINUTES", default_value_t = 30)]
        idle_minutes: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ResourcesCommand {
    /// One line per resource with its language tags.
    List,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Service(#[from] ServiceError),
    #[error("{path}: {source}")]
    File { path: String, source: io::Error },
    #[error("input is not UTF-8: {0}")]
    Utf8(#[from] std::string::FromUtf8Error),
    #[error("{0}")]
    Resources(String),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Reported(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Service(ServiceError::BadRequest(_)) => 2,
            _ => 1,
        }
    }
}

/// Parses `argv` and runs the command. Returns the process exit code.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    match execute(cli, stdin, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_resources(dir: Option<&Path>) -> Result<Resources, CliError> {
    match dir {
        Some(d) => Resources::load_dir(d).map_err(|e| CliError::Resources(e.to_string())),
        None => Ok(Resources::builtin()),
    }
}

fn read_input(io: &Io, stdin: &mut dyn Read) -> Result<Vec<u8>, CliError> {
    match io.input.as_deref() {
        Some(p) if p != Path::new("-") => {
            fs::read(p).map_err(|source| CliError::File { path: p.display().to_string(), source })
        }
        _ => {
            let mut buf = Vec::new();
            stdin.read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn read_text(io: &Io, stdin: &mut dyn Read) -> Result<String, CliError> {
    Ok(String::from_utf8(read_input(io, stdin)?)?)
}

fn write_output(io: &Io, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match &io.out {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::File { path: p.display().to_string(), source }),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn strip_newline(text: &str) -> &str {
    let text = text.strip_suffix('\n').unwrap_or(text);
    text.strip_suffix('\r').unwrap_or(text)
}

fn execute(cli: Cli, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let res = || load_resources(cli.resources.as_deref());
    match cli.command {
        Command::Encode(io) => {
            let text = read_text(&io, stdin)?;
            write_output(&io, &ops::encode(&res()?, &text)?, stdout)
        }
        Command::Decode { lossy, io } => {
            let bytes = read_input(&io, stdin)?;
            write_output(&io, ops::decode(&res()?, &bytes, lossy)?.as_bytes(), stdout)
        }
        Command::Interchange { reverse, io } => {
            let bytes = read_input(&io, stdin)?;
            write_output(&io, &ops::interchange(&bytes, reverse)?, stdout)
        }
        Command::Translit { from, to, fallback, io } => {
            let text = read_text(&io, stdin)?;
            write_output(&io, ops::translit(&res()?, &text, from, to, fallback)?.as_bytes(), stdout)
        }
        Command::Render { size, io } => {
            let text = read_text(&io, stdin)?;
            write_output(&io, &ops::render(&res()?, strip_newline(&text), size)?, stdout)
        }
        Command::Coverage { ids, io } => {
            let text = read_text(&io, stdin)?;
            let c = ops::coverage(&res()?.table, &text, ids);
            write_output(&io, ops::format_coverage(&c).as_bytes(), stdout)
        }
        Command::Gloss { pair, io } => {
            let text = read_text(&io, stdin)?;
            let res = res()?;
            let mut out = String::new();
            for line in text.lines() {
                out.push_str(&ops::gloss(&res, &pair, line)?);
                out.push('\n');
            }
            write_output(&io, out.as_bytes(), stdout)
        }
        Command::Ime(io) => {
            let text = read_text(&io, stdin)?;
            let mut out = Vec::new();
            let failures = ime_lines(&res()?, &text, &mut out, stderr)?;
            write_output(&io, &out, stdout)?;
            match failures {
                0 => Ok(()),
                n => Err(CliError::Reported(format!("{n} ime command(s) failed"))),
            }
        }
        Command::Resources { command: ResourcesCommand::List } => {
            let registry = ResourceRegistry::new(res()?);
            Ok(stdout.write_all(registry.listing().as_bytes())?)
        }
        Command::Serve { port, bind, idle_minutes } => {
            let registry = ResourceRegistry::new(res()?);
            let state = Arc::new(AppState::new(registry, Duration::from_secs(idle_minutes * 60)));
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind((bind.as_str(), port)).await?;
                writeln!(stderr, "listening on http://{}", listener.local_addr()?)?;
                http::serve(listener, state).await
            })?;
            Ok(())
        }
    }
}

fn print_page(session: &ImeSession, page: usize, res: &Resources, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "buffer: {}", session.buffer())?;
    let state = ops::ime_state("", session, &res.table);
    let start = page * indic_dbcs::ime::PAGE_SIZE;
    for c in state.candidates.iter().skip(start).take(indic_dbcs::ime::PAGE_SIZE) {
        writeln!(out, "  {} {} {}", c.index, c.text, c.key)?;
    }
    if session.page_count() > 1 {
        writeln!(out, "  page {}/{}", page + 1, session.page_count())?;
    }
    Ok(())
}

/// Runs line-mode input. Returns the number of failed commands.
fn ime_lines(res: &Resources, text: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<usize, CliError> {
    let mut session = ImeSession::new(res.ime.clone());
    let mut failures = 0;
    for line in text.as_bytes().lines() {
        let line = line?;
        let mut page = 0;
        let result: Result<(), ServiceError> = if let Some(arg) = line.strip_prefix(":select ") {
            match arg.trim().parse() {
                Ok(i) => session.select(i).map(|_| ()).map_err(Into::into),
                Err(_) => Err(ServiceError::BadRequest(format!("bad index {arg:?}"))),
            }
        } else if let Some(arg) = line.strip_prefix(":page ") {
            match arg.trim().parse::<usize>() {
                Ok(p) if p >= 1 => {
                    page = p - 1;
                    Ok(())
                }
                _ => Err(ServiceError::BadRequest(format!("bad page {arg:?}"))),
            }
        } else if line == ":back" {
            session.backspace();
            Ok(())
        } else if line == ":commit" {
            session.commit_raw();
            Ok(())
        } else {
            line.chars().try_for_each(|k| session.feed_key(k).map(|_| ())).map_err(Into::into)
        };
        if let Err(e) = result {
            writeln!(err, "error: {e}")?;
            failures += 1;
        }
        print_page(&session, page, res, out)?;
    }
    writeln!(out, "committed: {}", session.committed_text())?;
    Ok(failures)
}
