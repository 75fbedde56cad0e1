//! The `tacio` command line.
//!
//! Exit status: 0 on success, 1 when the input or query is invalid or a
//! requested entity does not exist, 2 on IO and usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tacio_core::canonicity::{self, CanonicityConfig, CanonicityVerdict};
use tacio_core::lineage::{classify_copy_act, successful, LineageIndex};
use tacio_core::query::{evaluate, parse_query, BindingTable, CompetencyId, QueryError};
use tacio_core::rdf::{self, PrefixTable, RdfError, Term};
use tacio_core::{Diagnostic, EntityId, Graph};

use crate::ingest::{load_log_with, LoadOptions};
use crate::turtle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

/// Table cells longer than this are cut and end in `…`.
pub const MAX_CELL: usize = 48;

#[derive(Debug, Parser)]
#[command(
    name = "tacio",
    version,
    about = "Lineage and canonicity of information-carrier copies"
)]
pub struct Cli {
    /// More output; `-vv` also reports ignored fields in event logs.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load the input and report every diagnostic.
    Validate(Input),
    /// Ancestors, descendants and aggregate of one carrier.
    Lineage {
        #[command(flatten)]
        input: Input,
        carrier: String,
    },
    /// Every aggregate of copies with its classification and members.
    Aggregates(Input),
    /// Canonical-copy and canonical-member verdicts for one carrier.
    Canonical {
        #[command(flatten)]
        input: Input,
        carrier: String,
    },
    /// Write the graph as Turtle to standard output.
    Export(Input),
    /// Run a query file or a canned competency question.
    Query {
        #[command(flatten)]
        input: Input,
        /// File holding the query text.
        #[arg(required_unless_present = "cq", conflicts_with = "cq")]
        query_file: Option<PathBuf>,
        /// Canned competency question, CQ1a through CQ5b.
        #[arg(long)]
        cq: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Events,
    Turtle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Table,
    JsonLines,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Event log (`.jsonl`) or Turtle (`.ttl`) file; `-` reads standard input.
    pub input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Keep going when the input has diagnostics.
    #[arg(long)]
    pub lenient: bool,
    /// Accept canonical members through chains of canonical copies (default).
    #[arg(long, overrides_with = "no_chain_rule")]
    pub chain_rule: bool,
    /// Require a direct or composite vetted act from the aggregate root.
    #[arg(long, overrides_with = "chain_rule")]
    pub no_chain_rule: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub output: OutputMode,
}

impl Input {
    pub fn resolved_format(&self) -> Format {
        self.format
            .unwrap_or_else(|| match self.input.extension().and_then(|e| e.to_str()) {
                Some(ext) if ext.eq_ignore_ascii_case("ttl") => Format::Turtle,
                _ => Format::Events,
            })
    }

    pub fn canonicity(&self) -> CanonicityConfig {
        CanonicityConfig {
            chain_rule: !self.no_chain_rule,
        }
    }
}

/// Failure of a command, carrying its exit status.
struct Failure(i32);

type Outcome = Result<(), Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn out(&mut self, text: &str) -> Outcome {
        self.out
            .write_all(text.as_bytes())
            .map_err(|_| Failure(EXIT_IO))
    }

    fn err(&mut self, text: &str) {
        let _ = self.err.write_all(text.as_bytes());
    }

    fn fail(&mut self, status: i32, message: impl std::fmt::Display) -> Failure {
        self.err(&format!("error: {message}\n"));
        Failure(status)
    }
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_IO
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let mut io = Io { out, err };
    match execute(&cli, &mut io) {
        Ok(()) => EXIT_OK,
        Err(Failure(status)) => status,
    }
}

fn execute(cli: &Cli, io: &mut Io<'_>) -> Outcome {
    match &cli.command {
        Command::Validate(input) => validate(input, cli.verbose, io),
        Command::Lineage { input, carrier } => {
            let g = load(input, cli.verbose, io)?;
            lineage(&g, input, carrier, io)
        }
        Command::Aggregates(input) => {
            let g = load(input, cli.verbose, io)?;
            aggregates(&g, input, io)
        }
        Command::Canonical { input, carrier } => {
            let g = load(input, cli.verbose, io)?;
            canonical(&g, input, carrier, io)
        }
        Command::Export(input) => {
            let g = load(input, cli.verbose, io)?;
            match turtle::export_turtle_with(&g, &input.canonicity()) {
                Ok(text) => io.out(&text),
                Err(RdfError::InvalidGraph(diags)) => {
                    print_diagnostics(io, &input.input, &diags, false);
                    Err(io.fail(EXIT_INVALID, "graph is not well-formed; nothing exported"))
                }
            }
        }
        Command::Query {
            input,
            query_file,
            cq,
        } => {
            let g = load(input, cli.verbose, io)?;
            query(&g, input, query_file.as_deref(), cq.as_deref(), io)
        }
    }
}

fn read_input(path: &Path) -> std::io::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read(path)
    }
}

fn parse_input(
    input: &Input,
    verbosity: u8,
    io: &mut Io<'_>,
) -> Result<(Graph, Vec<Diagnostic>), Failure> {
    let bytes = read_input(&input.input).map_err(|e| {
        io.fail(
            EXIT_IO,
            format_args!("cannot read {}: {e}", input.input.display()),
        )
    })?;
    Ok(match input.resolved_format() {
        Format::Events => load_log_with(&bytes, LoadOptions { verbosity }),
        Format::Turtle => match std::str::from_utf8(&bytes) {
            Ok(text) => turtle::load_turtle(text),
            Err(e) => {
                return Err(io.fail(
                    EXIT_INVALID,
                    format_args!("{} is not UTF-8: {e}", input.input.display()),
                ))
            }
        },
    })
}

fn print_diagnostics(io: &mut Io<'_>, path: &Path, diags: &[Diagnostic], to_stdout: bool) {
    let mut text = String::new();
    for d in diags {
        let _ = write!(text, "{}", path.display());
        if d.line > 0 {
            let _ = write!(text, ":{}", d.line);
        }
        let level = if d.is_error() { "" } else { " note:" };
        let _ = writeln!(text, ":{level} {}: {}", d.code, d.message);
    }
    if to_stdout {
        let _ = io.out(&text);
    } else {
        io.err(&text);
    }
}

fn load(input: &Input, verbosity: u8, io: &mut Io<'_>) -> Result<Graph, Failure> {
    let (g, diags) = parse_input(input, verbosity, io)?;
    print_diagnostics(io, &input.input, &diags, false);
    let errors = diags.iter().filter(|d| d.is_error()).count();
    if errors > 0 && !input.lenient {
        return Err(io.fail(
            EXIT_INVALID,
            format_args!(
                "{errors} problem(s) in {}; use --lenient to continue anyway",
                input.input.display()
            ),
        ));
    }
    Ok(g)
}

fn validate(input: &Input, verbosity: u8, io: &mut Io<'_>) -> Outcome {
    let (g, diags) = parse_input(input, verbosity, io)?;
    print_diagnostics(io, &input.input, &diags, true);
    let errors = diags.iter().filter(|d| d.is_error()).count();
    if errors == 0 {
        let records = g.agents().count()
            + g.contents().count()
            + g.carriers().count()
            + g.icses().count()
            + g.acts().count()
            + g.defeaters().count();
        io.out(&format!("ok: {records} records\n"))
    } else {
        io.out(&format!("{errors} error(s)\n"))?;
        Err(Failure(EXIT_INVALID))
    }
}

fn require_carrier<'g>(g: &'g Graph, id: &str, io: &mut Io<'_>) -> Result<&'g EntityId, Failure> {
    match g.carrier(id) {
        Some(c) => Ok(&c.id),
        None => Err(io.fail(EXIT_INVALID, format_args!("no carrier with id `{id}`"))),
    }
}

fn join(ids: impl IntoIterator<Item = impl AsRef<str>>) -> String {
    let parts: Vec<String> = ids.into_iter().map(|s| s.as_ref().to_owned()).collect();
    if parts.is_empty() {
        "(none)".to_owned()
    } else {
        parts.join(", ")
    }
}

fn ids_json<'a>(ids: impl IntoIterator<Item = &'a EntityId>) -> Value {
    Value::from(ids.into_iter().map(|i| i.as_str()).collect::<Vec<_>>())
}

fn lineage(g: &Graph, input: &Input, carrier: &str, io: &mut Io<'_>) -> Outcome {
    let id = require_carrier(g, carrier, io)?;
    let c = g.carrier(carrier).expect("checked above");
    let index = LineageIndex::new(g);
    let fail = |io: &mut Io<'_>, e: tacio_core::Error| io.fail(EXIT_INVALID, e);
    let ancestors = index.ancestors(carrier).map_err(|e| fail(io, e))?;
    let descendants = index.descendants(carrier).map_err(|e| fail(io, e))?;
    let root = index.earliest_ancestor(carrier).map_err(|e| fail(io, e))?;
    let aggregate = index.aggregate_of(carrier).map_err(|e| fail(io, e))?;

    // Atomic hops from the root down to this carrier.
    let mut hops = Vec::new();
    let mut cursor = id.clone();
    while let Some(act) = index.atomic_copy_producer(cursor.as_str()) {
        let Some(reference) = act.reference.clone() else {
            break;
        };
        let class = classify_copy_act(g, act.id.as_str()).map_err(|e| fail(io, e))?;
        let ok = successful(g, act.id.as_str()).map_err(|e| fail(io, e))?;
        hops.push((reference.clone(), cursor.clone(), act.id.clone(), class, ok));
        if reference == root || hops.len() > g.carriers().count() {
            break;
        }
        cursor = reference;
    }
    hops.reverse();

    let text = match input.output {
        OutputMode::JsonLines => {
            let hops: Vec<Value> = hops
                .iter()
                .map(|(from, to, act, class, ok)| {
                    json!({"from": from.as_str(), "to": to.as_str(), "act": act.as_str(), "class": class.name(), "successful": ok})
                })
                .collect();
            let report = json!({
                "carrier": id.as_str(),
                "carrier_type": c.carrier_type,
                "concretizer_type": c.concretizer_type,
                "earliest_ancestor": root.as_str(),
                "ancestors": ids_json(&ancestors),
                "descendants": ids_json(&descendants),
                "aggregate": {
                    "root": aggregate.root.as_str(),
                    "classification": aggregate.classification.name(),
                    "members": ids_json(&aggregate.members),
                },
                "hops": hops,
            });
            format!("{report}\n")
        }
        OutputMode::Table => {
            let mut t = String::new();
            let _ = writeln!(
                t,
                "carrier:            {id} ({} / {})",
                c.carrier_type, c.concretizer_type
            );
            let _ = writeln!(t, "earliest ancestor:  {root}");
            let _ = writeln!(t, "ancestors:          {}", join(&ancestors));
            let _ = writeln!(t, "descendants:        {}", join(&descendants));
            let _ = writeln!(
                t,
                "aggregate:          {} ({}, {})",
                aggregate.root,
                member_count(aggregate.len()),
                aggregate.classification
            );
            let _ = writeln!(t, "members:            {}", join(&aggregate.members));
            if hops.is_empty() {
                let _ = writeln!(t, "hops:               (root)");
            } else {
                let _ = writeln!(t, "hops:");
                for (from, to, act, class, ok) in &hops {
                    let status = if *ok { "successful" } else { "unsuccessful" };
                    let _ = writeln!(t, "  {from} -> {to}  via {act}  {class}  {status}");
                }
            }
            t
        }
    };
    io.out(&text)
}

fn aggregates(g: &Graph, input: &Input, io: &mut Io<'_>) -> Outcome {
    let index = LineageIndex::new(g);
    let config = input.canonicity();
    let mut text = String::new();
    for agg in index.all_aggregates() {
        let canonical = canonicity::canonical_members(g, agg.root.as_str(), &config)
            .map_err(|e| io.fail(EXIT_INVALID, e))?;
        match input.output {
            OutputMode::JsonLines => {
                let line = json!({
                    "root": agg.root.as_str(),
                    "classification": agg.classification.name(),
                    "size": agg.len(),
                    "members": ids_json(&agg.members),
                    "canonical_members": ids_json(&canonical),
                });
                let _ = writeln!(text, "{line}");
            }
            OutputMode::Table => {
                let _ = writeln!(
                    text,
                    "{} ({}, {})",
                    agg.root,
                    member_count(agg.len()),
                    agg.classification
                );
                let _ = writeln!(text, "  members:   {}", join(&agg.members));
                let _ = writeln!(text, "  canonical: {}", join(&canonical));
            }
        }
    }
    io.out(&text)
}

fn member_count(n: usize) -> String {
    format!("{n} member{}", if n == 1 { "" } else { "s" })
}

fn verdict_text(v: &CanonicityVerdict) -> String {
    match (v.holds, v.via) {
        (true, Some(via)) => format!("canonical via {via}"),
        (true, None) => "canonical".to_owned(),
        (false, _) if v.blocking.is_empty() => "not canonical (no vetted copying act)".to_owned(),
        (false, _) => format!("not canonical; blocked by {}", join(&v.blocking)),
    }
}

fn verdict_json(v: &CanonicityVerdict) -> Value {
    json!({
        "holds": v.holds,
        "via": v.via.map(|r| r.name()),
        "blocking": ids_json(&v.blocking),
    })
}

fn canonical(g: &Graph, input: &Input, carrier: &str, io: &mut Io<'_>) -> Outcome {
    let id = require_carrier(g, carrier, io)?;
    let config = input.canonicity();
    let index = LineageIndex::new(g);
    let mut references: Vec<&EntityId> = g
        .acts()
        .filter(|a| a.is_copying() && &a.output == id)
        .filter_map(|a| a.reference.as_ref())
        .collect();
    references.sort();
    references.dedup();

    let mut copies = Vec::new();
    for r in references {
        let v = canonicity::is_canonical_copy(g, carrier, r.as_str())
            .map_err(|e| io.fail(EXIT_INVALID, e))?;
        copies.push((r, v));
    }
    let root = index
        .earliest_ancestor(carrier)
        .map_err(|e| io.fail(EXIT_INVALID, e))?;
    let member = if &root == id {
        None
    } else {
        Some(
            canonicity::is_canonical_member(g, carrier, root.as_str(), &config)
                .map_err(|e| io.fail(EXIT_INVALID, e))?,
        )
    };

    let text = match input.output {
        OutputMode::JsonLines => {
            let copies: Vec<Value> = copies
                .iter()
                .map(|(r, v)| {
                    let mut o = verdict_json(v);
                    o["reference"] = Value::from(r.as_str());
                    o
                })
                .collect();
            let report = json!({
                "carrier": id.as_str(),
                "chain_rule": config.chain_rule,
                "copy_of": copies,
                "aggregate_root": root.as_str(),
                "member": member.as_ref().map(verdict_json),
            });
            format!("{report}\n")
        }
        OutputMode::Table => {
            let mut t = String::new();
            let _ = writeln!(t, "carrier: {id}");
            if copies.is_empty() {
                let _ = writeln!(t, "copy of: (not the output of any copying act)");
            }
            for (r, v) in &copies {
                let _ = writeln!(t, "copy of {r}: {}", verdict_text(v));
            }
            match &member {
                None => {
                    let _ = writeln!(t, "member of {root}: is the aggregate root");
                }
                Some(v) => {
                    let _ = writeln!(t, "member of {root}: {}", verdict_text(v));
                }
            }
            t
        }
    };
    io.out(&text)
}

fn query(
    g: &Graph,
    input: &Input,
    query_file: Option<&Path>,
    cq: Option<&str>,
    io: &mut Io<'_>,
) -> Outcome {
    let (text, origin) = match (query_file, cq) {
        (_, Some(cq)) => match cq.parse::<CompetencyId>() {
            Ok(id) => (id.text().to_owned(), id.as_str().to_owned()),
            Err(e) => return Err(io.fail(EXIT_INVALID, e)),
        },
        (Some(path), None) => match std::fs::read_to_string(path) {
            Ok(t) => (t, path.display().to_string()),
            Err(e) => {
                return Err(io.fail(EXIT_IO, format_args!("cannot read {}: {e}", path.display())))
            }
        },
        (None, None) => return Err(io.fail(EXIT_IO, "give a query file or --cq")),
    };
    let q = parse_query(&text).map_err(|e| io.fail(EXIT_INVALID, format_args!("{origin}: {e}")))?;
    let triples = match rdf::to_triples_with(g, &input.canonicity()) {
        Ok(t) => t,
        Err(RdfError::InvalidGraph(diags)) => {
            print_diagnostics(io, &input.input, &diags, false);
            return Err(io.fail(EXIT_INVALID, "graph is not well-formed; cannot query it"));
        }
    };
    let table = evaluate(&q, &triples)
        .map_err(|e: QueryError| io.fail(EXIT_INVALID, format_args!("{origin}: {e}")))?;
    let rendered = match input.output {
        OutputMode::Table => render_table(&table),
        OutputMode::JsonLines => render_json_lines(&table),
    };
    io.out(&rendered)
}

fn truncate(s: &str) -> String {
    if s.chars().count() > MAX_CELL {
        let mut cut: String = s.chars().take(MAX_CELL - 1).collect();
        cut.push('…');
        cut
    } else {
        s.to_owned()
    }
}

/// Fixed-width table with a header rule and a row count.
pub fn render_table(table: &BindingTable) -> String {
    let prefixes = PrefixTable::standard();
    let cells: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| r.iter().map(|t| truncate(&t.render(&prefixes))).collect())
        .collect();
    let widths: Vec<usize> = table
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            cells
                .iter()
                .map(|r| r[i].chars().count())
                .chain([c.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |values: &mut dyn Iterator<Item = String>| -> String {
        let padded: Vec<String> = values
            .zip(&widths)
            .map(|(v, w)| format!("{v}{}", " ".repeat(w - v.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_owned()
    };
    let mut out = String::new();
    if !table.columns.is_empty() {
        out.push_str(&line(&mut table.columns.iter().cloned()));
        out.push('\n');
        out.push_str(&line(&mut widths.iter().map(|w| "-".repeat(*w))));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(&mut r.iter().cloned()));
            out.push('\n');
        }
    }
    let n = table.len();
    let _ = writeln!(out, "({n} row{})", if n == 1 { "" } else { "s" });
    out
}

/// One JSON object per row, keys in column order, values as N-Triples
/// terms (`<iri>` or `"literal"`), never truncated.
pub fn render_json_lines(table: &BindingTable) -> String {
    let mut out = String::new();
    for row in &table.rows {
        out.push('{');
        for (i, (col, term)) in table.columns.iter().zip(row).enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&Value::from(col.as_str()).to_string());
            out.push(':');
            out.push_str(&Value::from(term.to_string()).to_string());
        }
        out.push_str("}\n");
    }
    out
}

/// Parses a value written by [`render_json_lines`] back into a term.
pub fn term_from_json_value(value: &str) -> Option<Term> {
    if let Some(iri) = value.strip_prefix('<').and_then(|v| v.strip_suffix('>')) {
        return Some(Term::Iri(iri.to_owned()));
    }
    let (tokens, err) = tacio_core::syntax::tokenize(value);
    match (tokens.as_slice(), err) {
        ([t], None) => match &t.kind {
            tacio_core::syntax::TokenKind::Literal(l) => Some(Term::Literal(l.clone())),
            _ => None,
        },
        _ => None,
    }
}
