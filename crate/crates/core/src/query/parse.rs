use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{BgpQuery, ParseError, PatternTerm, Projection, TriplePattern};
use crate::rdf::{vocab, RDF_NS};
use crate::syntax::{tokenize, Token, TokenKind};

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Position just past the input, for errors at end of text.
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn error(&self, expected: &str) -> ParseError {
        let (line, column) = self
            .tokens
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.end);
        let found = match self.peek() {
            Some(k) => format!(", found `{k}`"),
            None => String::from(", found end of query"),
        };
        ParseError {
            line,
            column,
            expected: format!("{expected}{found}"),
        }
    }

    fn keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Word(w)) if w.eq_ignore_ascii_case(word))
    }

    fn punct(&self, c: char) -> bool {
        self.peek() == Some(&TokenKind::Punct(c))
    }

    fn expect_punct(&mut self, c: char, expected: &str) -> Result<(), ParseError> {
        if self.punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn prefix_decl(&mut self) -> Result<(String, String), ParseError> {
        let prefix = match self.peek() {
            Some(TokenKind::Prefixed { prefix, local }) if local.is_empty() => prefix.clone(),
            _ => return Err(self.error("a prefix name such as `cco:`")),
        };
        self.pos += 1;
        let iri = match self.peek() {
            Some(TokenKind::Iri(i)) => i.clone(),
            _ => return Err(self.error("a namespace IRI in angle brackets")),
        };
        self.pos += 1;
        Ok((prefix, iri))
    }

    /// Subject or predicate position: anything but a literal.
    fn node(&mut self, expected: &str) -> Result<PatternTerm, ParseError> {
        let term = match self.peek() {
            Some(TokenKind::Var(v)) => PatternTerm::Var(v.clone()),
            Some(TokenKind::Iri(i)) => PatternTerm::Iri(i.clone()),
            Some(TokenKind::Prefixed { prefix, local }) => PatternTerm::Prefixed {
                prefix: prefix.clone(),
                local: local.clone(),
            },
            _ => return Err(self.error(expected)),
        };
        self.pos += 1;
        Ok(term)
    }

    fn verb(&mut self) -> Result<PatternTerm, ParseError> {
        if matches!(self.peek(), Some(TokenKind::Word(w)) if w == "a") {
            self.pos += 1;
            return Ok(PatternTerm::Iri(format!("{RDF_NS}{}", vocab::RDF_TYPE)));
        }
        self.node("a predicate (variable, IRI, prefixed name or `a`)")
    }

    fn object(&mut self) -> Result<PatternTerm, ParseError> {
        if let Some(TokenKind::Literal(l)) = self.peek() {
            let term = PatternTerm::Literal(l.clone());
            self.pos += 1;
            return Ok(term);
        }
        self.node("an object (variable, IRI, prefixed name or literal)")
    }

    /// `subject verb objects (; verb objects)*`, optionally ended by `.`.
    fn block(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), ParseError> {
        let subject = self.node("a subject (variable, IRI or prefixed name) or `}`")?;
        loop {
            let predicate = self.verb()?;
            loop {
                let object = self.object()?;
                out.push(TriplePattern::new(
                    subject.clone(),
                    predicate.clone(),
                    object,
                ));
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
            if self.punct('.') || self.punct('}') {
                break;
            }
        }
        if self.punct('.') {
            self.pos += 1;
        } else if !self.punct('}') {
            return Err(self.error("`.`, `;`, `,` or `}`"));
        }
        Ok(())
    }
}

/// Parses query text into a [`BgpQuery`].
pub fn parse_query(text: &str) -> Result<BgpQuery, ParseError> {
    let (tokens, lex_error) = tokenize(text);
    if let Some(e) = lex_error {
        return Err(ParseError {
            line: e.line,
            column: e.column,
            expected: format!("a well-formed token ({})", e.message),
        });
    }
    let end = text.lines().enumerate().last().map_or((1, 1), |(i, l)| {
        let trailing_newline = text.ends_with('\n');
        if trailing_newline {
            (i + 2, 1)
        } else {
            (i + 1, l.chars().count() + 1)
        }
    });
    let mut p = Parser {
        tokens,
        pos: 0,
        end,
    };

    let mut prefixes = Vec::new();
    loop {
        if p.keyword("PREFIX") {
            p.pos += 1;
            prefixes.push(p.prefix_decl()?);
        } else if p.keyword("@prefix") {
            p.pos += 1;
            prefixes.push(p.prefix_decl()?);
            p.expect_punct('.', "`.` after an @prefix declaration")?;
        } else {
            break;
        }
    }

    if !p.keyword("SELECT") {
        return Err(p.error("`PREFIX` or `SELECT`"));
    }
    p.pos += 1;
    let distinct = p.keyword("DISTINCT");
    if distinct {
        p.pos += 1;
    }
    let projection = if p.punct('*') {
        p.pos += 1;
        Projection::Star
    } else {
        let mut vars = Vec::new();
        while let Some(TokenKind::Var(v)) = p.peek() {
            vars.push(v.clone());
            p.pos += 1;
        }
        if vars.is_empty() {
            return Err(p.error("`*` or at least one `?variable`"));
        }
        Projection::Vars(vars)
    };

    if p.keyword("WHERE") {
        p.pos += 1;
    }
    p.expect_punct('{', "`{` opening the pattern block")?;
    let mut patterns = Vec::new();
    while !p.punct('}') {
        if p.peek().is_none() {
            return Err(p.error("`}` closing the pattern block"));
        }
        p.block(&mut patterns)?;
    }
    p.pos += 1;
    if p.peek().is_some() {
        return Err(p.error("end of query after `}`"));
    }

    let query = BgpQuery {
        prefixes,
        projection,
        distinct,
        patterns,
    };
    if let Projection::Vars(vars) = &query.projection {
        let known = query.pattern_vars();
        if let Some(missing) = vars.iter().find(|v| !known.contains(&v.as_str())) {
            let at = p
                .tokens
                .iter()
                .find(|t| t.kind == TokenKind::Var(missing.to_string()))
                .map_or((1, 1), |t| (t.line, t.column));
            return Err(ParseError {
                line: at.0,
                column: at.1,
                expected: format!("projected variable ?{missing} to appear in some pattern"),
            });
        }
    }
    Ok(query)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pattern() {
        let q = parse_query("SELECT ?x WHERE { ?x a cco:Image }").unwrap();
        assert_eq!(q.patterns.len(), 1);
        assert!(!q.distinct);
        assert_eq!(q.projection, Projection::Vars(alloc::vec!["x".into()]));
    }

    #[test]
    fn missing_predicate_is_an_error() {
        let e = parse_query("SELECT ?x WHERE { ?x }").unwrap_err();
        assert_eq!((e.line, e.column), (1, 22));
        assert!(e.expected.starts_with("a predicate"), "{}", e.expected);
    }

    #[test]
    fn semicolon_and_comma_fan_out() {
        let q = parse_query(
            "PREFIX ex: <http://example.org/>\n\
             SELECT DISTINCT * WHERE {\n\
               ?s ex:p ?a, ?b ;\n   ex:q \"lit\" ; # comment\n   a ex:C .\n\
               ?a ex:p ?s\n\
             }",
        )
        .unwrap();
        assert_eq!(q.patterns.len(), 5);
        assert!(q.distinct);
        assert_eq!(q.prefixes, [("ex".into(), "http://example.org/".into())]);
        assert_eq!(q.columns(), ["s", "a", "b"]);
    }

    #[test]
    fn projected_variable_must_occur() {
        let e = parse_query("SELECT ?y WHERE { ?x a ?z }").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
    }

    #[test]
    fn trailing_tokens_and_unclosed_block() {
        assert!(parse_query("SELECT * WHERE { ?x a ?y } extra").is_err());
        let e = parse_query("SELECT *\nWHERE { ?x a ?y .\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(parse_query("SELECT * WHERE { \"lit\" a ?y }").is_err());
        assert!(parse_query("ASK { ?x a ?y }").is_err());
    }

    #[test]
    fn empty_block_is_allowed() {
        let q = parse_query("SELECT * {}").unwrap();
        assert!(q.patterns.is_empty());
    }
}
