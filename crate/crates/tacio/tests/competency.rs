mod support;

use std::collections::BTreeSet;

use tacio::core::query::{
    evaluate, parse_query, run_competency, CompetencyId, Projection, QueryError,
};
use tacio::core::rdf::{to_triples, Term, Triple};
use tacio::core::Graph;
use tacio::fixtures;

use support::{as_tuples, nested_loop};

fn iri(s: &str) -> Term {
    Term::Iri(format!("http://example.org/{s}"))
}

fn ex(s: &str, p: &str, o: &str) -> Triple {
    Triple::new(iri(s), iri(p), iri(o))
}

#[test]
fn each_query_answers_its_own_scenario() {
    for cq in CompetencyId::ALL {
        let g = fixtures::for_competency(cq).load().unwrap();
        let table = run_competency(cq, &g).unwrap();
        let (_, oracle) = nested_loop(&cq.query(), &as_tuples(&to_triples(&g).unwrap())).unwrap();
        assert_eq!(table.rows, oracle, "{}", cq.as_str());
        assert!(!table.is_empty(), "{} found nothing", cq.as_str());
    }
}

#[test]
fn fanout_lists_every_recipient_once() {
    let g = fixtures::FANOUT.load().unwrap();
    let table = run_competency(CompetencyId::Cq3a, &g).unwrap();
    let recipients: BTreeSet<&Term> = table.values("recipient").collect();
    assert_eq!(recipients.len(), table.len());
    let expected: BTreeSet<Term> = g
        .acts()
        .filter(|a| a.is_copying())
        .map(|a| Term::instance(&a.output))
        .collect();
    assert_eq!(recipients, expected.iter().collect());
}

#[test]
fn fused_row_binds_the_fused_carrier() {
    let g = fixtures::TRAFFIC.load().unwrap();
    let table = run_competency(CompetencyId::Cq2a, &g).unwrap();
    assert_eq!(table.len(), 1);
    // The fused carrier is the output of the composite processing act.
    let processing = g
        .acts()
        .find(|a| !a.sub_acts.is_empty() && !a.is_copying())
        .unwrap();
    let bound: Vec<&Term> = table.rows[0].iter().collect();
    assert!(bound.contains(&&Term::instance(&processing.output)));
    assert!(bound.contains(&&Term::instance(&processing.id)));
}

#[test]
fn protocol_queries_separate_encrypted_from_plain() {
    let tls = fixtures::PASSWORD_TLS.load().unwrap();
    let http = fixtures::PASSWORD_HTTP.load().unwrap();
    assert!(!run_competency(CompetencyId::Cq4a, &tls).unwrap().is_empty());
    assert!(run_competency(CompetencyId::Cq4a, &http)
        .unwrap()
        .is_empty());
    assert!(!run_competency(CompetencyId::Cq4b, &http)
        .unwrap()
        .is_empty());
    assert!(run_competency(CompetencyId::Cq4b, &tls).unwrap().is_empty());
}

#[test]
fn empty_graph_gives_empty_tables() {
    for cq in CompetencyId::ALL {
        let table = run_competency(cq, &Graph::new()).unwrap();
        assert!(table.is_empty());
        assert_eq!(table.columns, cq.query().columns());
    }
}

#[test]
fn ids_parse_case_insensitively() {
    assert_eq!("cq2A".parse::<CompetencyId>().unwrap(), CompetencyId::Cq2a);
    assert!(matches!(
        "CQ9".parse::<CompetencyId>(),
        Err(QueryError::UnknownCompetencyId(_))
    ));
}

#[test]
fn fused_query_expands_to_all_its_patterns() {
    let q = CompetencyId::Cq2a.query();
    // Counted by hand from the query text after `;` and `,` expansion.
    assert_eq!(q.patterns.len(), 32);
    assert!(q.distinct);
    assert_eq!(q.projection, Projection::Star);
}

#[test]
fn single_pattern_and_chain_join() {
    let triples = vec![ex("a", "p", "b"), ex("b", "p", "c"), ex("c", "q", "d")];
    let q =
        parse_query("PREFIX ex: <http://example.org/>\nSELECT ?x ?y WHERE { ?x ex:p ?y }").unwrap();
    assert_eq!(evaluate(&q, &triples).unwrap().len(), 2);
    let q =
        parse_query("PREFIX ex: <http://example.org/>\nSELECT * WHERE { ?a ex:p ?b . ?b ex:p ?c }")
            .unwrap();
    let t = evaluate(&q, &triples).unwrap();
    assert_eq!(t.columns, ["a", "b", "c"]);
    assert_eq!(t.rows, [vec![iri("a"), iri("b"), iri("c")]]);
}

#[test]
fn projection_follows_request_order() {
    let triples = vec![ex("a", "p", "b")];
    let q =
        parse_query("PREFIX ex: <http://example.org/>\nSELECT ?o ?s WHERE { ?s ex:p ?o }").unwrap();
    let t = evaluate(&q, &triples).unwrap();
    assert_eq!(t.columns, ["o", "s"]);
    assert_eq!(t.rows, [vec![iri("b"), iri("a")]]);
}

#[test]
fn distinct_removes_duplicate_rows() {
    let triples = vec![ex("a", "p", "b"), ex("a", "p", "c")];
    let plain =
        parse_query("PREFIX ex: <http://example.org/>\nSELECT ?s WHERE { ?s ex:p ?o }").unwrap();
    let distinct =
        parse_query("PREFIX ex: <http://example.org/>\nSELECT DISTINCT ?s WHERE { ?s ex:p ?o }")
            .unwrap();
    assert_eq!(evaluate(&plain, &triples).unwrap().len(), 2);
    assert_eq!(evaluate(&distinct, &triples).unwrap().len(), 1);
}

#[test]
fn malformed_queries_report_positions() {
    let e = parse_query("SELECT ?x WHERE { ?x }").unwrap_err();
    assert_eq!((e.line, e.column), (1, 22));
    let e = parse_query("SELECT ?x\nWHERE { ?x ?p }").unwrap_err();
    assert_eq!(e.line, 2);
    let q = parse_query("SELECT ?x WHERE { ?x a cco:Image }").unwrap();
    assert_eq!(q.patterns.len(), 1);
    let q = parse_query("SELECT ?x WHERE { ?x a nope:Image }").unwrap();
    assert!(matches!(evaluate(&q, &[]), Err(QueryError::UnknownPrefix(p)) if p == "nope"));
}
