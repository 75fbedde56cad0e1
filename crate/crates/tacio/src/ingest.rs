//! Line-delimited JSON event log: one record object per line.
//!
//! ```text
//! {"kind":"carrier","id":"c1","carrier_type":"Laptop","concretizer_type":"BinaryPattern"}
//! ```
//!
//! Loading is two-pass: every line is parsed and its id claimed first, then
//! records are inserted kind by kind, so references may point forward.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};
use tacio_core::diagnostic::sort_diagnostics;
use tacio_core::{
    ActKind, Carrier, ContentItem, Defeater, DefeaterKind, DiagCode, Diagnostic, EncodingAct,
    EntityId, Graph, Icse,
};

/// A parsed record of one of the six kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Agent(EntityId),
    Content(ContentItem),
    Carrier(Carrier),
    Icse(Icse),
    Act(EncodingAct),
    Defeater(Defeater),
}

impl Record {
    pub fn id(&self) -> &EntityId {
        match self {
            Record::Agent(id) => id,
            Record::Content(c) => &c.id,
            Record::Carrier(c) => &c.id,
            Record::Icse(i) => &i.id,
            Record::Act(a) => &a.id,
            Record::Defeater(d) => &d.id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Record::Agent(_) => "agent",
            Record::Content(_) => "content",
            Record::Carrier(_) => "carrier",
            Record::Icse(_) => "icse",
            Record::Act(_) => "act",
            Record::Defeater(_) => "defeater",
        }
    }

    /// Insertion rank: records are added to the graph in this kind order so
    /// that defeater targets already exist when defeaters arrive.
    fn rank(&self) -> u8 {
        match self {
            Record::Agent(_) => 0,
            Record::Content(_) => 1,
            Record::Icse(_) => 2,
            Record::Carrier(_) => 3,
            Record::Act(_) => 4,
            Record::Defeater(_) => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub line: usize,
    pub record: Record,
    /// Fields present on the line that the record kind does not define.
    pub unknown_fields: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadOptions {
    /// At 2 or more, unknown fields are reported as notes.
    pub verbosity: u8,
}

const KNOWN_FIELDS: &[(&str, &[&str])] = &[
    ("agent", &["kind", "id"]),
    ("content", &["kind", "id", "digest", "about"]),
    (
        "carrier",
        &[
            "kind",
            "id",
            "carrier_type",
            "concretizer_type",
            "carries",
            "parts",
        ],
    ),
    (
        "icse",
        &[
            "kind",
            "id",
            "expected_carrier_type",
            "expected_concretizer_type",
            "payload",
        ],
    ),
    (
        "act",
        &[
            "kind",
            "id",
            "act_kind",
            "act_type",
            "agent",
            "reference",
            "output",
            "ppf",
            "sub_acts",
            "prescribed_by",
            "at",
        ],
    ),
    (
        "defeater",
        &["kind", "id", "target", "defeater_kind", "statement"],
    ),
];

struct Fields<'a> {
    obj: &'a Map<String, Value>,
    line: usize,
}

impl Fields<'_> {
    fn missing(&self, name: &str) -> Diagnostic {
        Diagnostic::new(
            self.line,
            DiagCode::MissingField,
            format!("missing required field `{name}`"),
        )
    }

    fn invalid(&self, name: &str, why: impl std::fmt::Display) -> Diagnostic {
        Diagnostic::new(
            self.line,
            DiagCode::InvalidField,
            format!("field `{name}`: {why}"),
        )
    }

    fn opt_str(&self, name: &str) -> Result<Option<&str>, Diagnostic> {
        match self.obj.get(name) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(self.invalid(name, "expected a string")),
        }
    }

    fn str(&self, name: &str) -> Result<&str, Diagnostic> {
        self.opt_str(name)?.ok_or_else(|| self.missing(name))
    }

    fn id_value(&self, name: &str, s: &str) -> Result<EntityId, Diagnostic> {
        EntityId::new(s).map_err(|e| self.invalid(name, e))
    }

    fn id(&self, name: &str) -> Result<EntityId, Diagnostic> {
        let s = self.str(name)?;
        self.id_value(name, s)
    }

    fn opt_id(&self, name: &str) -> Result<Option<EntityId>, Diagnostic> {
        self.opt_str(name)?
            .map(|s| self.id_value(name, s))
            .transpose()
    }

    fn ids(&self, name: &str) -> Result<Vec<EntityId>, Diagnostic> {
        match self.obj.get(name) {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => self.id_value(name, s),
                    _ => Err(self.invalid(name, "expected an array of id strings")),
                })
                .collect(),
            Some(_) => Err(self.invalid(name, "expected an array of id strings")),
        }
    }

    fn bool(&self, name: &str) -> Result<bool, Diagnostic> {
        match self.obj.get(name) {
            None | Some(Value::Null) => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(self.invalid(name, "expected true or false")),
        }
    }
}

fn parse_record(kind: &str, f: &Fields<'_>) -> Result<Record, Diagnostic> {
    Ok(match kind {
        "agent" => Record::Agent(f.id("id")?),
        "content" => Record::Content(ContentItem {
            id: f.id("id")?,
            digest: f.opt_str("digest")?.map(String::from),
            about: f.ids("about")?.into_iter().collect(),
        }),
        "carrier" => Record::Carrier(Carrier {
            id: f.id("id")?,
            carrier_type: f.str("carrier_type")?.to_owned(),
            concretizer_type: f.str("concretizer_type")?.to_owned(),
            carries: f.ids("carries")?.into_iter().collect(),
            parts: f.ids("parts")?.into_iter().collect(),
        }),
        "icse" => Record::Icse(Icse {
            id: f.id("id")?,
            expected_carrier_type: f.str("expected_carrier_type")?.to_owned(),
            expected_concretizer_type: f.str("expected_concretizer_type")?.to_owned(),
            payload: f.opt_str("payload")?.unwrap_or_default().to_owned(),
        }),
        "act" => {
            let id = f.id("id")?;
            let act_kind = f.str("act_kind")?;
            let kind = ActKind::parse(act_kind).ok_or_else(|| {
                f.invalid(
                    "act_kind",
                    format!("{act_kind:?} is not one of encoding, copying, encoding_icse"),
                )
            })?;
            let agent = f.id("agent")?;
            let output = f.id("output")?;
            let reference = f.opt_id("reference")?;
            if kind == ActKind::Copying && reference.is_none() {
                return Err(f.missing("reference"));
            }
            Record::Act(EncodingAct {
                id,
                kind,
                act_type: f.opt_str("act_type")?.map(String::from),
                agent,
                reference,
                output,
                ppf: f.bool("ppf")?,
                sub_acts: f.ids("sub_acts")?,
                prescribed_by: f.opt_id("prescribed_by")?,
                at: f.opt_str("at")?.map(String::from),
            })
        }
        "defeater" => {
            let id = f.id("id")?;
            let target = f.id("target")?;
            let dk = f.str("defeater_kind")?;
            let kind = DefeaterKind::parse(dk).ok_or_else(|| {
                f.invalid(
                    "defeater_kind",
                    format!("{dk:?} is not one of rebutting, undercutting"),
                )
            })?;
            Record::Defeater(Defeater {
                id,
                target,
                kind,
                statement: f.opt_str("statement")?.unwrap_or_default().to_owned(),
            })
        }
        other => {
            return Err(Diagnostic::new(
                f.line,
                DiagCode::UnknownKind,
                format!("unknown record kind {other:?}"),
            ))
        }
    })
}

/// Parses one line. Blank lines and `#` comments yield `Ok(None)`.
pub fn parse_event(text: &str, line: usize) -> Result<Option<Event>, Diagnostic> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let value: Value = serde_json::from_str(trimmed)
        .map_err(|e| Diagnostic::new(line, DiagCode::Syntax, format!("malformed JSON: {e}")))?;
    let Value::Object(obj) = value else {
        return Err(Diagnostic::new(
            line,
            DiagCode::Syntax,
            "expected a JSON object",
        ));
    };
    let f = Fields { obj: &obj, line };
    let kind = f.str("kind")?;
    let record = parse_record(kind, &f)?;
    let known = KNOWN_FIELDS
        .iter()
        .find(|(k, _)| *k == kind)
        .map(|(_, fields)| *fields)
        .unwrap_or_default();
    let unknown_fields = obj
        .keys()
        .filter(|k| !known.contains(&k.as_str()))
        .cloned()
        .collect();
    Ok(Some(Event {
        line,
        record,
        unknown_fields,
    }))
}

/// Loads a log with default options.
pub fn load_log(input: &[u8]) -> (Graph, Vec<Diagnostic>) {
    load_log_with(input, LoadOptions::default())
}

/// Builds a graph from every valid record in `input`. The graph is returned
/// even when there are error diagnostics; callers decide whether to accept
/// it.
pub fn load_log_with(input: &[u8], options: LoadOptions) -> (Graph, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let mut events = Vec::new();
    for (i, raw) in input.split(|b| *b == b'\n').enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let text = match std::str::from_utf8(raw) {
            Ok(t) => t,
            Err(e) => {
                diags.push(Diagnostic::new(
                    line,
                    DiagCode::Syntax,
                    format!("invalid UTF-8: {e}"),
                ));
                continue;
            }
        };
        match parse_event(text, line) {
            Ok(Some(event)) => events.push(event),
            Ok(None) => {}
            Err(d) => diags.push(d),
        }
    }

    // First declaration of an id wins.
    let mut declared_at: BTreeMap<EntityId, usize> = BTreeMap::new();
    let mut accepted = Vec::with_capacity(events.len());
    for event in events {
        let id = event.record.id();
        if let Some(first) = declared_at.get(id) {
            diags.push(
                Diagnostic::new(
                    event.line,
                    DiagCode::DuplicateId,
                    format!("id `{id}` was already declared on line {first}"),
                )
                .about(id.clone()),
            );
            continue;
        }
        declared_at.insert(id.clone(), event.line);
        if options.verbosity >= 2 {
            for field in &event.unknown_fields {
                diags.push(
                    Diagnostic::new(
                        event.line,
                        DiagCode::UnknownField,
                        format!(
                            "ignoring unknown field `{field}` on {} record",
                            event.record.kind()
                        ),
                    )
                    .about(id.clone())
                    .note(),
                );
            }
        }
        accepted.push(event);
    }

    accepted.sort_by_key(|e| (e.record.rank(), e.line));
    let mut g = Graph::new();
    for event in accepted {
        let line = event.line;
        let result = match event.record {
            Record::Agent(id) => g.add_agent(id),
            Record::Content(c) => g.add_content(c),
            Record::Carrier(c) => g.add_carrier(c),
            Record::Icse(i) => g.add_icse(i),
            Record::Act(a) => g.add_act(a),
            Record::Defeater(d) => g.add_defeater(d),
        };
        if let Err(e) = result {
            diags.push(Diagnostic::new(line, e.diag_code(), e.to_string()));
            declared_at.retain(|_, l| *l != line);
        }
    }

    for mut d in g.validate() {
        if let Some(line) = d.subject.as_ref().and_then(|s| declared_at.get(s)) {
            d.line = *line;
        }
        diags.push(d);
    }
    sort_diagnostics(&mut diags);
    (g, diags)
}

#[derive(Serialize)]
struct AgentLine<'a> {
    kind: &'static str,
    id: &'a str,
}

#[derive(Serialize)]
struct ContentLine<'a> {
    kind: &'static str,
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    digest: Option<&'a str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    about: Vec<&'a str>,
}

#[derive(Serialize)]
struct IcseLine<'a> {
    kind: &'static str,
    id: &'a str,
    expected_carrier_type: &'a str,
    expected_concretizer_type: &'a str,
    #[serde(skip_serializing_if = "str::is_empty")]
    payload: &'a str,
}

#[derive(Serialize)]
struct CarrierLine<'a> {
    kind: &'static str,
    id: &'a str,
    carrier_type: &'a str,
    concretizer_type: &'a str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    carries: Vec<&'a str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    parts: Vec<&'a str>,
}

#[derive(Serialize)]
struct ActLine<'a> {
    kind: &'static str,
    id: &'a str,
    act_kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    act_type: Option<&'a str>,
    agent: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<&'a str>,
    output: &'a str,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    ppf: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sub_acts: Vec<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prescribed_by: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    at: Option<&'a str>,
}

#[derive(Serialize)]
struct DefeaterLine<'a> {
    kind: &'static str,
    id: &'a str,
    target: &'a str,
    defeater_kind: &'static str,
    #[serde(skip_serializing_if = "str::is_empty")]
    statement: &'a str,
}

fn strs<'a>(ids: impl IntoIterator<Item = &'a EntityId>) -> Vec<&'a str> {
    ids.into_iter().map(EntityId::as_str).collect()
}

/// Canonical event-log text for `g`: kinds in insertion order, ids sorted
/// within each kind, fields in a fixed order, one record per line.
pub fn to_event_lines(g: &Graph) -> String {
    fn push(out: &mut String, record: &impl Serialize) {
        out.push_str(&serde_json::to_string(record).expect("records serialize"));
        out.push('\n');
    }
    let mut out = String::new();
    for id in g.agents() {
        push(
            &mut out,
            &AgentLine {
                kind: "agent",
                id: id.as_str(),
            },
        );
    }
    for c in g.contents() {
        push(
            &mut out,
            &ContentLine {
                kind: "content",
                id: c.id.as_str(),
                digest: c.digest.as_deref(),
                about: strs(&c.about),
            },
        );
    }
    for i in g.icses() {
        push(
            &mut out,
            &IcseLine {
                kind: "icse",
                id: i.id.as_str(),
                expected_carrier_type: &i.expected_carrier_type,
                expected_concretizer_type: &i.expected_concretizer_type,
                payload: &i.payload,
            },
        );
    }
    for c in g.carriers() {
        push(
            &mut out,
            &CarrierLine {
                kind: "carrier",
                id: c.id.as_str(),
                carrier_type: &c.carrier_type,
                concretizer_type: &c.concretizer_type,
                carries: strs(&c.carries),
                parts: strs(&c.parts),
            },
        );
    }
    for a in g.acts() {
        push(
            &mut out,
            &ActLine {
                kind: "act",
                id: a.id.as_str(),
                act_kind: a.kind.as_str(),
                act_type: a.act_type.as_deref(),
                agent: a.agent.as_str(),
                reference: a.reference.as_ref().map(EntityId::as_str),
                output: a.output.as_str(),
                ppf: a.ppf,
                sub_acts: strs(&a.sub_acts),
                prescribed_by: a.prescribed_by.as_ref().map(EntityId::as_str),
                at: a.at.as_deref(),
            },
        );
    }
    for d in g.defeaters() {
        push(
            &mut out,
            &DefeaterLine {
                kind: "defeater",
                id: d.id.as_str(),
                target: d.target.as_str(),
                defeater_kind: d.kind.as_str(),
                statement: &d.statement,
            },
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carrier_line() {
        let e = parse_event(
            r#"{"kind":"carrier","id":"c1","carrier_type":"Laptop","concretizer_type":"BinaryPattern"}"#,
            1,
        )
        .unwrap()
        .unwrap();
        assert_eq!(e.record.kind(), "carrier");
        assert_eq!(e.record.id().as_str(), "c1");
    }

    #[test]
    fn unknown_kind() {
        let d = parse_event(r#"{"kind":"widget"}"#, 4).unwrap_err();
        assert_eq!((d.line, d.code), (4, DiagCode::UnknownKind));
    }

    #[test]
    fn copying_without_reference() {
        let d = parse_event(
            r#"{"kind":"act","id":"a1","act_kind":"copying","agent":"u1","output":"c2"}"#,
            1,
        )
        .unwrap_err();
        assert_eq!(d.code, DiagCode::MissingField);
        assert!(d.message.contains("reference"));
    }

    #[test]
    fn skips_blank_and_comment_lines() {
        assert_eq!(parse_event("   ", 1), Ok(None));
        assert_eq!(parse_event("# note", 1), Ok(None));
    }

    #[test]
    fn wrong_types_are_invalid_fields() {
        let d = parse_event(r#"{"kind":"agent","id":7}"#, 1).unwrap_err();
        assert_eq!(d.code, DiagCode::InvalidField);
        let d = parse_event(r#"{"kind":"content","id":"x","about":"t"}"#, 1).unwrap_err();
        assert_eq!(d.code, DiagCode::InvalidField);
        let d = parse_event(r#"[1,2]"#, 1).unwrap_err();
        assert_eq!(d.code, DiagCode::Syntax);
        let d = parse_event(r#"{"id":"x"}"#, 1).unwrap_err();
        assert_eq!(d.code, DiagCode::MissingField);
    }
}
