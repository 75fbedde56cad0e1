//! Tokenizer shared by the Turtle subset and the query language.
//!
//! Both languages use the same term syntax: `<iri>`, `prefix:local`,
//! `"literal"` with backslash escapes, `?var`, bare keywords, and the
//! punctuation `. ; , { } *`. `#` starts a comment that runs to the end of
//! the line.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Contents of `<...>`.
    Iri(String),
    /// `prefix:local`; either side may be empty.
    Prefixed {
        prefix: String,
        local: String,
    },
    /// `?name` or `$name`, without the sigil.
    Var(String),
    /// Unescaped literal text.
    Literal(String),
    /// Bare word such as `a`, `SELECT` or `@prefix`.
    Word(String),
    Punct(char),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Iri(i) => write!(f, "<{i}>"),
            TokenKind::Prefixed { prefix, local } => write!(f, "{prefix}:{local}"),
            TokenKind::Var(v) => write!(f, "?{v}"),
            TokenKind::Literal(l) => write!(f, "\"{}\"", escape_literal(l)),
            TokenKind::Word(w) => f.write_str(w),
            TokenKind::Punct(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

/// Escapes `\`, `"`, and line breaks and tabs for a double-quoted literal.
pub fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

const IRI_FORBIDDEN: &[char] = &['<', '"', '{', '}', '|', '^', '`', '\\'];

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '%')
}

struct Cursor<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits `text` into tokens. Lexing stops at the first malformed token;
/// the tokens read so far are returned along with the error so callers can
/// still report on the valid prefix.
pub fn tokenize(text: &str) -> (Vec<Token>, Option<LexError>) {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        while cur.peek().is_some_and(char::is_whitespace) {
            cur.bump();
        }
        let (line, column) = (cur.line, cur.column);
        let Some(c) = cur.peek() else { break };
        let err = |message: String| LexError {
            line,
            column,
            message,
        };
        let kind = match c {
            '#' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
                continue;
            }
            '<' => {
                cur.bump();
                let mut iri = String::new();
                loop {
                    match cur.bump() {
                        Some('>') => break,
                        Some(c) if c.is_whitespace() || IRI_FORBIDDEN.contains(&c) => {
                            return (
                                tokens,
                                Some(err(format!("character {c:?} is not allowed in an IRI"))),
                            );
                        }
                        Some(c) => iri.push(c),
                        None => return (tokens, Some(err("unterminated IRI".into()))),
                    }
                }
                TokenKind::Iri(iri)
            }
            '"' => {
                cur.bump();
                let mut lit = String::new();
                loop {
                    match cur.bump() {
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some('"') => lit.push('"'),
                            Some('\\') => lit.push('\\'),
                            Some('n') => lit.push('\n'),
                            Some('r') => lit.push('\r'),
                            Some('t') => lit.push('\t'),
                            other => {
                                return (
                                    tokens,
                                    Some(err(format!(
                                        "unsupported escape sequence \\{}",
                                        other.map(String::from).unwrap_or_default()
                                    ))),
                                )
                            }
                        },
                        Some('\n') | None => {
                            return (tokens, Some(err("unterminated string literal".into())))
                        }
                        Some(c) => lit.push(c),
                    }
                }
                TokenKind::Literal(lit)
            }
            '?' | '$' => {
                cur.bump();
                let mut name = String::new();
                while let Some(c) = cur.peek().filter(|c| c.is_alphanumeric() || *c == '_') {
                    name.push(c);
                    cur.bump();
                }
                if name.is_empty() {
                    return (tokens, Some(err("expected a variable name".into())));
                }
                TokenKind::Var(name)
            }
            '.' | ';' | ',' | '{' | '}' | '*' => {
                cur.bump();
                TokenKind::Punct(c)
            }
            '@' => {
                cur.bump();
                let mut word = String::from("@");
                while let Some(c) = cur.peek().filter(|c| c.is_alphanumeric()) {
                    word.push(c);
                    cur.bump();
                }
                TokenKind::Word(word)
            }
            c if c.is_alphanumeric() || c == '_' || c == ':' => {
                let mut word = String::new();
                while let Some(c) = cur.peek().filter(|c| is_name_char(*c) || *c == ':') {
                    word.push(c);
                    cur.bump();
                }
                // A trailing '.' ends the statement, it is not part of the name.
                let mut dots = 0;
                while word.ends_with('.') {
                    word.pop();
                    dots += 1;
                }
                let kind = match word.split_once(':') {
                    Some((prefix, local)) => TokenKind::Prefixed {
                        prefix: prefix.into(),
                        local: local.into(),
                    },
                    None => TokenKind::Word(word.clone()),
                };
                tokens.push(Token { kind, line, column });
                let dot_column = column + word.chars().count();
                for i in 0..dots {
                    tokens.push(Token {
                        kind: TokenKind::Punct('.'),
                        line,
                        column: dot_column + i,
                    });
                }
                continue;
            }
            other => {
                return (tokens, Some(err(format!("unexpected character {other:?}"))));
            }
        };
        tokens.push(Token { kind, line, column });
    }
    (tokens, None)
}
