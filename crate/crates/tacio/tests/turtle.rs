mod support;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tacio::core::lineage::classify_copy_act;
use tacio::core::rdf::{self, copy_class_term, to_triples, vocab, Term};
use tacio::core::{DiagCode, Graph};
use tacio::fixtures;
use tacio::turtle::{export_turtle, import_turtle, load_turtle};

use support::{reachability, Spec};

fn instance(s: &str) -> Term {
    Term::Iri(format!("{}{s}", rdf::INSTANCE_NS))
}

#[test]
fn list_syntax_fans_out() {
    let text = "@prefix tacio: <http://www.ontologyrepository.com/CommonCoreOntologies/Exp/NewInformationOntology> .\n\
                @prefix ex: <http://example.org/> .\n\
                ex:iba_1 tacio:has_information_descendant_copy ex:iba_3 ;\n\
                         ex:p ex:a , ex:b .\n";
    let (triples, diags) = import_turtle(text);
    assert!(diags.is_empty(), "{diags:?}");
    assert_eq!(triples.len(), 3);
    assert!(triples
        .iter()
        .all(|t| t.subject == Term::Iri("http://example.org/iba_1".into())));
    assert_eq!(
        triples[0].predicate,
        Term::Iri(format!("{}has_information_descendant_copy", rdf::TACIO_NS))
    );
}

#[test]
fn undeclared_prefix_is_diagnosed() {
    let (triples, diags) = import_turtle("xyz:a xyz:b xyz:c .\n");
    assert!(triples.is_empty());
    assert!(diags.iter().any(|d| d.code == DiagCode::UndeclaredPrefix));
}

#[test]
fn copy_acts_are_typed_by_their_class() {
    for f in fixtures::ALL {
        let g = f.load().unwrap();
        let triples = to_triples(&g).unwrap();
        let rdf_type = rdf::rdf(vocab::RDF_TYPE);
        for act in g.acts().filter(|a| a.is_copying()) {
            let class = classify_copy_act(&g, act.id.as_str()).unwrap();
            let typed = triples.iter().any(|t| {
                t.subject == instance(act.id.as_str())
                    && t.predicate == rdf_type
                    && t.object == copy_class_term(class)
            });
            assert!(typed, "{}: {} lacks its {class} type", f.name, act.id);
        }
    }
}

#[test]
fn carriers_link_to_their_content() {
    let g = fixtures::EMAIL.load().unwrap();
    let triples = to_triples(&g).unwrap();
    let expected = (
        instance("laptop_1"),
        rdf::obo(vocab::obo::IS_CARRIER_OF),
        instance("email_1"),
    );
    assert!(triples
        .iter()
        .any(|t| (t.subject.clone(), t.predicate.clone(), t.object.clone()) == expected));
}

#[test]
fn output_is_sorted() {
    for f in fixtures::ALL {
        let triples = to_triples(&f.load().unwrap()).unwrap();
        let keys: Vec<_> = triples
            .iter()
            .map(|t| (t.subject.clone(), t.predicate.clone(), t.object.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(keys, sorted, "{}", f.name);
    }
}

#[test]
fn export_is_independent_of_insertion_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let spec = Spec::random(&mut rng, 12, 20);
        let a = spec.build(&mut rng);
        let b = spec.build(&mut rng);
        assert_eq!(export_turtle(&a).unwrap(), export_turtle(&b).unwrap());
    }
}

#[test]
fn empty_graph_exports_prefixes_only() {
    let text = export_turtle(&Graph::new()).unwrap();
    assert!(
        text.lines()
            .all(|l| l.is_empty() || l.starts_with("@prefix")),
        "{text}"
    );
    let (triples, diags) = import_turtle(&text);
    assert!(triples.is_empty() && diags.is_empty());
}

#[test]
fn quotes_in_statements_survive_round_trip() {
    let g = fixtures::SHARED_DOC.load().unwrap();
    let mut log = tacio::ingest::to_event_lines(&g);
    log.push_str(
        r#"{"kind":"defeater","id":"quote_1","target":"erin_view_1","defeater_kind":"undercutting","statement":"said \"stale\" twice \\ once"}"#,
    );
    let (g2, diags) = tacio::ingest::load_log(log.as_bytes());
    assert!(diags.is_empty(), "{diags:?}");
    let text = export_turtle(&g2).unwrap();
    assert!(text.contains(r#""said \"stale\" twice \\ once""#), "{text}");
    let (rebuilt, diags) = load_turtle(&text);
    assert!(diags.is_empty(), "{diags:?}");
    assert_eq!(rebuilt, g2);
}

#[test]
fn fixtures_rebuild_from_their_export() {
    for f in fixtures::ALL {
        let g = f.load().unwrap();
        let (rebuilt, diags) = load_turtle(&export_turtle(&g).unwrap());
        assert!(diags.is_empty(), "{}: {diags:?}", f.name);
        assert_eq!(rebuilt, g, "{}", f.name);
    }
}

/// The exported descendant edges form a transitive reduction: closing them
/// gives back the full lineage, and no edge is implied by the others.
#[test]
fn descendant_edges_close_to_the_lineage() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let predicate = rdf::tacio(vocab::tacio::HAS_DESCENDANT_COPY);
    for _ in 0..200 {
        let spec = Spec::random(&mut rng, 12, 20);
        let g = spec.build(&mut rng);
        let names: Vec<Term> = spec.carriers.iter().map(|c| instance(&c.id)).collect();
        let pos = |t: &Term| names.iter().position(|n| n == t).unwrap();
        let emitted: Vec<(usize, usize)> = to_triples(&g)
            .unwrap()
            .into_iter()
            .filter(|t| t.predicate == predicate)
            .map(|t| (pos(&t.subject), pos(&t.object)))
            .collect();
        let n = names.len();
        let all: Vec<(usize, usize)> = spec
            .copies
            .iter()
            .map(|c| (c.reference, c.output))
            .collect();
        assert_eq!(reachability(n, &emitted), reachability(n, &all));
        let set: BTreeSet<_> = emitted.iter().copied().collect();
        for &edge in &set {
            let others: Vec<_> = set.iter().copied().filter(|&e| e != edge).collect();
            assert!(
                !reachability(n, &others)[edge.0][edge.1],
                "redundant edge {edge:?}"
            );
        }
    }
}
