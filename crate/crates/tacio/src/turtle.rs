//! Turtle subset: prefix declarations, subject blocks with `;` and `,`
//! lists, `a`, IRIs, prefixed names and plain double-quoted literals.
//! Blank nodes, typed or tagged literals, numbers and collections are
//! rejected with diagnostics.

use std::fmt::Write as _;

use tacio_core::canonicity::CanonicityConfig;
use tacio_core::diagnostic::sort_diagnostics;
use tacio_core::rdf::{
    self, graph_from_triples, normalize_iri, vocab, PrefixTable, RdfError, Term, Triple, RDF_NS,
};
use tacio_core::syntax::{escape_literal, tokenize, Token, TokenKind};
use tacio_core::{DiagCode, Diagnostic, Graph};

fn write_term(out: &mut String, term: &Term, prefixes: &PrefixTable) {
    match term {
        Term::Literal(l) => {
            let _ = write!(out, "\"{}\"", escape_literal(l));
        }
        Term::Iri(iri) => match prefixes.compact(iri) {
            Some((p, local)) => {
                let _ = write!(out, "{p}:{local}");
            }
            None => {
                let _ = write!(out, "<{iri}>");
            }
        },
    }
}

/// Serializes triples (expected sorted) as Turtle: the standard prefix
/// block, then one block per subject.
pub fn write_turtle(triples: &[Triple]) -> String {
    let prefixes = PrefixTable::standard();
    let rdf_type = Term::Iri(format!("{RDF_NS}{}", vocab::RDF_TYPE));
    let mut out = String::new();
    for (p, ns) in prefixes.iter() {
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
    let mut i = 0;
    while i < triples.len() {
        let subject = &triples[i].subject;
        out.push('\n');
        write_term(&mut out, subject, &prefixes);
        let mut first_predicate = true;
        while i < triples.len() && &triples[i].subject == subject {
            let predicate = &triples[i].predicate;
            out.push_str(if first_predicate { " " } else { " ;\n    " });
            first_predicate = false;
            if predicate == &rdf_type {
                out.push('a');
            } else {
                write_term(&mut out, predicate, &prefixes);
            }
            let mut first_object = true;
            while i < triples.len()
                && &triples[i].subject == subject
                && &triples[i].predicate == predicate
            {
                out.push_str(if first_object { " " } else { ", " });
                first_object = false;
                write_term(&mut out, &triples[i].object, &prefixes);
                i += 1;
            }
        }
        out.push_str(" .\n");
    }
    out
}

pub fn export_turtle(g: &Graph) -> Result<String, RdfError> {
    export_turtle_with(g, &CanonicityConfig::default())
}

pub fn export_turtle_with(g: &Graph, config: &CanonicityConfig) -> Result<String, RdfError> {
    Ok(write_turtle(&rdf::to_triples_with(g, config)?))
}

enum Item {
    Tok(Token),
    /// A span the tokenizer could not read; already reported.
    Broken,
}

/// Tokenizes the whole text, restarting on the line after any malformed
/// token so that later statements are still read.
fn tokens_with_recovery(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<Item> {
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    let mut items = Vec::new();
    let mut start_line = 0;
    while start_line < lines.len() {
        let rest: String = lines[start_line..].concat();
        let (tokens, err) = tokenize(&rest);
        items.extend(tokens.into_iter().map(|mut t| {
            t.line += start_line;
            Item::Tok(t)
        }));
        match err {
            None => break,
            Some(e) => {
                let line = e.line + start_line;
                diags.push(Diagnostic::new(
                    line,
                    DiagCode::Syntax,
                    format!("column {}: {}", e.column, e.message),
                ));
                items.push(Item::Broken);
                start_line = line;
            }
        }
    }
    items
}

struct Parser<'a> {
    items: &'a [Item],
    pos: usize,
    prefixes: PrefixTable,
    declared: Vec<String>,
    triples: Vec<Triple>,
    diags: Vec<Diagnostic>,
}

enum Stop {
    /// Malformed statement; the diagnostic is already recorded.
    Abandon,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        match self.items.get(self.pos) {
            Some(Item::Tok(t)) => Some(t),
            _ => None,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.items.len()
    }

    fn last_line(&self) -> usize {
        self.items[..self.pos.min(self.items.len())]
            .iter()
            .rev()
            .find_map(|i| match i {
                Item::Tok(t) => Some(t.line),
                Item::Broken => None,
            })
            .unwrap_or(1)
    }

    fn fail(&mut self, code: DiagCode, message: String) -> Stop {
        let line = self.peek().map_or_else(|| self.last_line(), |t| t.line);
        let message = match self.peek() {
            Some(t) => format!("column {}: {message}", t.column),
            None => message,
        };
        self.diags.push(Diagnostic::new(line, code, message));
        Stop::Abandon
    }

    fn expected(&mut self, what: &str) -> Stop {
        match self.items.get(self.pos) {
            Some(Item::Broken) => Stop::Abandon,
            Some(Item::Tok(t)) => {
                let found = t.kind.to_string();
                let code = match &t.kind {
                    TokenKind::Word(w)
                        if w.starts_with('@') || w.chars().all(|c| c.is_ascii_digit()) =>
                    {
                        DiagCode::Unsupported
                    }
                    TokenKind::Word(w) if w == "true" || w == "false" => DiagCode::Unsupported,
                    TokenKind::Prefixed { prefix, .. } if prefix == "_" => DiagCode::Unsupported,
                    TokenKind::Var(_) => DiagCode::Unsupported,
                    _ => DiagCode::Syntax,
                };
                self.fail(code, format!("expected {what}, found `{found}`"))
            }
            None => self.fail(
                DiagCode::Syntax,
                format!("expected {what}, found end of input"),
            ),
        }
    }

    /// Skips past the next `.` (or to a token opening a new line after a
    /// broken span).
    fn resync(&mut self) {
        let mut after_broken = false;
        while let Some(item) = self.items.get(self.pos) {
            match item {
                Item::Broken => after_broken = true,
                Item::Tok(t) if t.kind == TokenKind::Punct('.') => {
                    self.pos += 1;
                    return;
                }
                Item::Tok(t) if after_broken && t.column == 1 => return,
                Item::Tok(_) => {}
            }
            self.pos += 1;
        }
    }

    fn punct(&self, c: char) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Punct(c))
    }

    fn word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Word(x), .. }) if x.eq_ignore_ascii_case(w))
    }

    fn directive(&mut self, dotted: bool) -> Result<(), Stop> {
        self.pos += 1;
        let prefix = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Prefixed { prefix, local }) if local.is_empty() => prefix.clone(),
            _ => return Err(self.expected("a prefix name such as `cco:`")),
        };
        self.pos += 1;
        let ns = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Iri(i)) => i.clone(),
            _ => return Err(self.expected("a namespace IRI")),
        };
        self.pos += 1;
        if dotted {
            if !self.punct('.') {
                return Err(self.expected("`.` after the prefix declaration"));
            }
            self.pos += 1;
        }
        self.prefixes.declare(&prefix, &ns);
        if !self.declared.contains(&prefix) {
            self.declared.push(prefix);
        }
        Ok(())
    }

    /// `Ok(None)` means an undeclared prefix, already reported; the triple
    /// is dropped but parsing continues.
    fn iri_term(&mut self, allow_literal: bool, what: &str) -> Result<Option<Term>, Stop> {
        let Some(token) = self.peek().cloned() else {
            return Err(self.expected(what));
        };
        let term = match token.kind {
            TokenKind::Iri(i) => Some(Term::Iri(normalize_iri(&i).unwrap_or(i))),
            TokenKind::Prefixed { prefix, local } if prefix != "_" => {
                match self
                    .declared
                    .contains(&prefix)
                    .then(|| self.prefixes.expand(&prefix, &local))
                    .flatten()
                {
                    Some(iri) => Some(Term::Iri(normalize_iri(&iri).unwrap_or(iri))),
                    None => {
                        self.diags.push(Diagnostic::new(
                            token.line,
                            DiagCode::UndeclaredPrefix,
                            format!(
                                "column {}: prefix `{prefix}:` is not declared",
                                token.column
                            ),
                        ));
                        None
                    }
                }
            }
            TokenKind::Literal(l) if allow_literal => Some(Term::Literal(l)),
            _ => return Err(self.expected(what)),
        };
        self.pos += 1;
        if allow_literal && matches!(term, Some(Term::Literal(_))) {
            if let Some(TokenKind::Word(w)) = self.peek().map(|t| &t.kind) {
                if w.starts_with('@') {
                    return Err(self.fail(
                        DiagCode::Unsupported,
                        "language-tagged literals are not supported".into(),
                    ));
                }
            }
        }
        Ok(term)
    }

    fn statement(&mut self) -> Result<(), Stop> {
        let subject = self.iri_term(false, "a subject IRI or prefixed name")?;
        loop {
            let predicate = if self
                .peek()
                .is_some_and(|t| t.kind == TokenKind::Word("a".into()))
            {
                self.pos += 1;
                Some(rdf::rdf(vocab::RDF_TYPE))
            } else {
                self.iri_term(false, "a predicate")?
            };
            loop {
                let object = self.iri_term(true, "an object")?;
                if let (Some(s), Some(p), Some(o)) = (&subject, &predicate, object) {
                    self.triples.push(Triple::new(s.clone(), p.clone(), o));
                }
                if !self.punct(',') {
                    break;
                }
                self.pos += 1;
            }
            if !self.punct(';') {
                break;
            }
            while self.punct(';') {
                self.pos += 1;
            }
            if self.punct('.') {
                break;
            }
        }
        if !self.punct('.') {
            return Err(self.expected("`.`, `;` or `,`"));
        }
        self.pos += 1;
        Ok(())
    }
}

/// Parses Turtle text into triples in document order. Problems are
/// reported as diagnostics and the offending statement is skipped.
pub fn import_turtle(text: &str) -> (Vec<Triple>, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let items = tokens_with_recovery(text, &mut diags);
    let mut p = Parser {
        items: &items,
        pos: 0,
        prefixes: PrefixTable::standard(),
        declared: Vec::new(),
        triples: Vec::new(),
        diags,
    };
    while !p.at_end() {
        let outcome = if matches!(p.items[p.pos], Item::Broken) {
            Err(Stop::Abandon)
        } else if p.word("@prefix") {
            p.directive(true)
        } else if p.word("PREFIX") {
            p.directive(false)
        } else {
            p.statement()
        };
        if let Err(Stop::Abandon) = outcome {
            p.resync();
        }
    }
    let mut diags = p.diags;
    sort_diagnostics(&mut diags);
    (p.triples, diags)
}

/// Imports Turtle and rebuilds the graph it describes, reporting parse
/// problems, reconstruction problems and integrity violations together.
pub fn load_turtle(text: &str) -> (Graph, Vec<Diagnostic>) {
    let (triples, mut diags) = import_turtle(text);
    let (g, rebuild) = graph_from_triples(&triples);
    diags.extend(rebuild);
    diags.extend(g.validate());
    sort_diagnostics(&mut diags);
    (g, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "@prefix cco: <http://www.ontologyrepository.com/CommonCoreOntologies/> .\n\
                        @prefix obo: <http://purl.obolibrary.org/obo/> .\n";

    #[test]
    fn empty_graph_is_prefix_block_only() {
        let text = export_turtle(&Graph::new()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().all(|l| l.starts_with("@prefix")));
        assert_eq!(import_turtle(&text), (vec![], vec![]));
    }

    #[test]
    fn lists_fan_out() {
        let text = format!(
            "{HEAD}<urn:tacio:x> a cco:Image, cco:Dataset ;\n  obo:RO_0010002 <urn:tacio:c> .\n"
        );
        let (triples, diags) = import_turtle(&text);
        assert!(diags.is_empty(), "{diags:?}");
        assert_eq!(triples.len(), 3);
    }

    #[test]
    fn undeclared_prefix() {
        let text =
            format!("{HEAD}<urn:tacio:x> xyz:a <urn:tacio:y> .\n<urn:tacio:x> a cco:Image .\n");
        let (triples, diags) = import_turtle(&text);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::UndeclaredPrefix);
        assert_eq!(diags[0].line, 3);
        assert_eq!(triples.len(), 1);
    }

    #[test]
    fn recovers_after_bad_statements() {
        let text = format!(
            "{HEAD}_:b a cco:Image .\n<urn:tacio:x> obo:RO_0010002 \"s\"@en .\n<urn:tacio:y> a [ ] .\n<urn:tacio:z> a cco:Image .\n"
        );
        let (triples, diags) = import_turtle(&text);
        assert_eq!(triples.len(), 1, "{triples:?}");
        let codes: Vec<_> = diags.iter().map(|d| (d.line, d.code)).collect();
        assert_eq!(
            codes,
            [
                (3, DiagCode::Unsupported),
                (4, DiagCode::Unsupported),
                (5, DiagCode::Syntax)
            ]
        );
    }

    #[test]
    fn quotes_are_escaped() {
        let t = vec![Triple::new(
            Term::Iri("urn:tacio:d".into()),
            rdf::tacio(vocab::tacio::STATEMENT),
            Term::literal("he said \"no\" \\ twice"),
        )];
        let text = write_turtle(&t);
        assert!(text.contains(r#""he said \"no\" \\ twice""#), "{text}");
        assert_eq!(import_turtle(&text), (t, vec![]));
    }
}
