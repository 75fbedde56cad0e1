use tacio::core::{DiagCode, Severity};
use tacio::fixtures;
use tacio::ingest::{load_log, load_log_with, parse_event, to_event_lines, LoadOptions, Record};

#[test]
fn email_log_loads_without_diagnostics() {
    assert_eq!(fixtures::EMAIL.text.lines().count(), 12);
    let (g, diags) = load_log(fixtures::EMAIL.text.as_bytes());
    assert!(diags.is_empty(), "{diags:?}");
    assert_eq!(g.carriers().count(), 3);
    assert!(g.act("send_1").is_some_and(|a| a.sub_acts.len() == 2));
}

#[test]
fn every_fixture_is_clean() {
    for f in fixtures::ALL {
        let (_, diags) = load_log(f.text.as_bytes());
        assert!(diags.is_empty(), "{}: {diags:?}", f.name);
    }
}

#[test]
fn references_may_point_forward() {
    let log = br#"{"kind":"act","id":"a1","act_kind":"copying","agent":"u1","reference":"c1","output":"c2","ppf":true}
{"kind":"agent","id":"u1"}
{"kind":"carrier","id":"c2","carrier_type":"Disk","concretizer_type":"Magnetic"}
{"kind":"carrier","id":"c1","carrier_type":"Disk","concretizer_type":"Magnetic"}
"#;
    let (g, diags) = load_log(log);
    assert!(diags.is_empty(), "{diags:?}");
    assert_eq!(
        g.act("a1").unwrap().reference.as_ref().unwrap().as_str(),
        "c1"
    );
}

#[test]
fn duplicate_id_keeps_first_declaration() {
    let mut lines: Vec<String> = (1..=6)
        .map(|i| format!(r#"{{"kind":"agent","id":"u{i}"}}"#))
        .collect();
    lines.insert(
        0,
        r#"{"kind":"carrier","id":"c1","carrier_type":"Disk","concretizer_type":"Magnetic"}"#
            .into(),
    );
    lines.push(
        r#"{"kind":"carrier","id":"c1","carrier_type":"Tape","concretizer_type":"Optical"}"#.into(),
    );
    let (g, diags) = load_log(lines.join("\n").as_bytes());
    assert_eq!(diags.len(), 1);
    assert_eq!((diags[0].line, diags[0].code), (8, DiagCode::DuplicateId));
    assert_eq!(g.carrier("c1").unwrap().carrier_type, "Disk");

    // Seventh line duplicates the first.
    let mut lines: Vec<String> = (1..=6)
        .map(|i| format!(r#"{{"kind":"agent","id":"u{i}"}}"#))
        .collect();
    lines.push(r#"{"kind":"agent","id":"u2"}"#.into());
    let (_, diags) = load_log(lines.join("\n").as_bytes());
    assert_eq!(diags.len(), 1);
    assert_eq!((diags[0].line, diags[0].code), (7, DiagCode::DuplicateId));
}

#[test]
fn dangling_reference_is_reported_on_its_line() {
    let log = br#"{"kind":"agent","id":"u1"}
{"kind":"carrier","id":"c1","carrier_type":"Disk","concretizer_type":"Magnetic"}
{"kind":"act","id":"a1","act_kind":"copying","agent":"u1","reference":"c1","output":"ghost"}
"#;
    let (_, diags) = load_log(log);
    assert_eq!(diags.len(), 1, "{diags:?}");
    assert_eq!((diags[0].line, diags[0].code), (3, DiagCode::DanglingRef));
}

#[test]
fn second_atomic_producer_is_rejected() {
    let log = br#"{"kind":"agent","id":"u1"}
{"kind":"carrier","id":"c1","carrier_type":"Disk","concretizer_type":"Magnetic"}
{"kind":"carrier","id":"c2","carrier_type":"Disk","concretizer_type":"Magnetic"}
{"kind":"act","id":"a1","act_kind":"copying","agent":"u1","reference":"c1","output":"c2"}
{"kind":"act","id":"a2","act_kind":"copying","agent":"u1","reference":"c1","output":"c2"}
"#;
    let (g, diags) = load_log(log);
    assert_eq!(
        diags.iter().map(|d| (d.line, d.code)).collect::<Vec<_>>(),
        [(5, DiagCode::SecondProducer)]
    );
    assert!(g.act("a2").is_none());
}

#[test]
fn diagnostics_come_out_sorted() {
    let log =
        b"garbage\n{\"kind\":\"widget\"}\n\n# comment\n{\"kind\":\"agent\"}\nnot json either\n";
    let (_, diags) = load_log(log);
    let keys: Vec<_> = diags.iter().map(|d| (d.line, d.code)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(
        keys,
        [
            (1, DiagCode::Syntax),
            (2, DiagCode::UnknownKind),
            (5, DiagCode::MissingField),
            (6, DiagCode::Syntax)
        ]
    );
}

#[test]
fn unknown_fields_are_notes_only_when_verbose() {
    let log = br#"{"kind":"agent","id":"u1","colour":"blue"}"#;
    let (_, quiet) = load_log(log);
    assert!(quiet.is_empty());
    let (_, verbose) = load_log_with(log, LoadOptions { verbosity: 2 });
    assert_eq!(verbose.len(), 1);
    assert_eq!(verbose[0].code, DiagCode::UnknownField);
    assert_eq!(verbose[0].severity, Severity::Note);
}

#[test]
fn crlf_line_endings_are_accepted() {
    let text = fixtures::EMAIL.text.replace('\n', "\r\n");
    let (g, diags) = load_log(text.as_bytes());
    assert!(diags.is_empty(), "{diags:?}");
    assert_eq!(g, fixtures::EMAIL.load().unwrap());
}

#[test]
fn parse_event_reports_the_record_kind() {
    let ev = parse_event(
        r#"{"kind":"carrier","id":"c1","carrier_type":"Laptop","concretizer_type":"BinaryPattern"}"#,
        4,
    )
    .unwrap()
    .unwrap();
    assert_eq!(ev.line, 4);
    assert!(matches!(ev.record, Record::Carrier(_)));
    assert!(parse_event("   ", 1).unwrap().is_none());
}

#[test]
fn serialization_is_canonical() {
    for f in fixtures::ALL {
        let g = f.load().unwrap();
        let text = to_event_lines(&g);
        // Shuffling the lines of the canonical form changes nothing.
        let mut lines: Vec<&str> = text.lines().collect();
        lines.reverse();
        let (reloaded, diags) = load_log(lines.join("\n").as_bytes());
        assert!(diags.is_empty(), "{}: {diags:?}", f.name);
        assert_eq!(to_event_lines(&reloaded), text, "{}", f.name);
    }
}
