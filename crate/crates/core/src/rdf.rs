//! Triple view of a [`Graph`] in the RDF vocabulary of BFO, the Common Core
//! Ontologies and the TACIO extension.
//!
//! Instances get IRIs of the form `urn:tacio:<percent-encoded id>`, and
//! aggregates `urn:tacio:aggregate:<percent-encoded root id>`. Besides the
//! ontology relations, every record field is emitted as a `tacio:` literal
//! property, so a graph can be rebuilt from its own triples with
//! [`graph_from_triples`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::canonicity::{self, CanonicityConfig};
use crate::diagnostic::{sort_diagnostics, DiagCode, Diagnostic};
use crate::lineage::{classify_copy_act, AggregateClass, CopyClass, LineageIndex};
use crate::model::{
    ActKind, Carrier, ContentItem, Defeater, DefeaterKind, EncodingAct, EntityId, Graph, Icse,
};
use crate::syntax::escape_literal;

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const CCO_NS: &str = "http://www.ontologyrepository.com/CommonCoreOntologies/";
pub const OBO_NS: &str = "http://purl.obolibrary.org/obo/";
pub const TACIO_NS: &str =
    "http://www.ontologyrepository.com/CommonCoreOntologies/Exp/NewInformationOntology";

pub const INSTANCE_NS: &str = "urn:tacio:";
pub const AGGREGATE_NS: &str = "urn:tacio:aggregate:";

/// Local names of the terms the export uses, grouped by namespace.
pub mod vocab {
    pub const RDF_TYPE: &str = "type";

    pub mod obo {
        pub const IS_CARRIER_OF: &str = "RO_0010002";
        pub const HAS_PART: &str = "BFO_0000051";
        pub const HAS_MEMBER: &str = "RO_0002351";
    }

    pub mod cco {
        pub const INFORMATION_CONTENT_ENTITY: &str = "InformationContentEntity";
        pub const AGENT: &str = "Agent";
        pub const DESCRIBES: &str = "describes";
        pub const HAS_INPUT: &str = "has_input";
        pub const INPUT_OF: &str = "input_of";
        pub const HAS_OUTPUT: &str = "has_output";
        pub const AGENT_IN: &str = "agent_in";
        pub const HAS_PROCESS_PART: &str = "has_process_part";
        pub const PRESCRIBED_BY: &str = "prescribed_by";
    }

    pub mod tacio {
        pub const INFORMATION_BEARER: &str = "InformationBearer";
        pub const ACT_OF_ENCODING: &str = "ActOfEncoding";
        pub const ACT_OF_COPYING: &str = "ActOfCopying";
        pub const ACT_OF_DUPLICATION: &str = "ActOfDuplication";
        pub const ACT_OF_CARRIER_TRANSITION: &str = "ActOfInformationCarrierTransition";
        pub const ACT_OF_CONCRETIZER_TRANSITION: &str = "ActOfConcretizerTransition";
        pub const ACT_OF_CARRIER_AND_CONCRETIZER_TRANSITION: &str =
            "ActOfCarrierAndConcretizerTransition";
        /// Spelling found in published queries; accepted on input.
        pub const ACT_OF_CARRIER_AND_CONCRETIZER_TRANSITION_ALIAS: &str =
            "ActofCarrierandConcretizerTransition";
        pub const ACT_OF_ENCODING_ICSE: &str = "ActOfEncodingAnInformationCarrierStructureEntity";
        pub const ICSE: &str = "InformationCarrierStructureEntity";
        pub const DEFEATER: &str = "Defeater";
        pub const AGGREGATE_OF_COPIES: &str = "AggregateOfInformationCarrierCopies";
        pub const AGGREGATE_OF_DUPLICATES: &str = "AggregateOfDuplicateInformationCarriers";
        pub const AGGREGATE_OF_PSEUDO_DUPLICATES: &str =
            "AggregateOfPseudoDuplicateInformationCarriers";

        pub const HAS_DESCENDANT_COPY: &str = "has_information_descendant_copy";
        pub const HAS_CANONICAL_COPY: &str = "has_canonical_copy";
        pub const HAS_CANONICAL_MEMBER: &str = "has_canonical_member";
        pub const HAS_EARLIEST_ANCESTOR: &str = "has_earliest_ancestor";
        pub const HAS_REFERENCE_CARRIER: &str = "has_reference_carrier";
        pub const HAS_DEFEATER: &str = "hasDefeater";

        pub const CARRIER_TYPE: &str = "carrier_type";
        pub const CONCRETIZER_TYPE: &str = "concretizer_type";
        pub const DIGEST: &str = "digest";
        pub const ACT_TYPE: &str = "act_type";
        pub const PPF: &str = "ppf";
        pub const AT: &str = "at";
        pub const SUB_ACTS: &str = "sub_acts";
        pub const EXPECTED_CARRIER_TYPE: &str = "expected_carrier_type";
        pub const EXPECTED_CONCRETIZER_TYPE: &str = "expected_concretizer_type";
        pub const PAYLOAD: &str = "payload";
        pub const DEFEATER_KIND: &str = "defeater_kind";
        pub const STATEMENT: &str = "statement";
    }
}

pub fn rdf(local: &str) -> Term {
    Term::Iri(format!("{RDF_NS}{local}"))
}

pub fn cco(local: &str) -> Term {
    Term::Iri(format!("{CCO_NS}{}", encode_local(local)))
}

pub fn obo(local: &str) -> Term {
    Term::Iri(format!("{OBO_NS}{local}"))
}

pub fn tacio(local: &str) -> Term {
    Term::Iri(format!("{TACIO_NS}{local}"))
}

/// An RDF term. Blank nodes and typed or tagged literals are outside the
/// supported subset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Literal(String),
}

impl Term {
    pub fn literal(s: impl Into<String>) -> Term {
        Term::Literal(s.into())
    }

    pub fn instance(id: &EntityId) -> Term {
        Term::Iri(instance_iri(id.as_str()))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&str> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }

    /// Short human-readable form: the bare id for instances, `prefix:local`
    /// where a standard prefix applies, `<iri>` otherwise, and quoted
    /// literals.
    pub fn render(&self, prefixes: &PrefixTable) -> String {
        match self {
            Term::Literal(l) => format!("\"{}\"", escape_literal(l)),
            Term::Iri(iri) => {
                if let Some(id) = id_from_iri(iri) {
                    return id.as_str().to_string();
                }
                match prefixes.compact(iri) {
                    Some((p, l)) => format!("{p}:{l}"),
                    None => format!("<{iri}>"),
                }
            }
        }
    }
}

/// N-Triples style: `<iri>` or `"literal"`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "<{i}>"),
            Term::Literal(l) => write!(f, "\"{}\"", escape_literal(l)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Prefix to namespace associations. The standard table always declares
/// `rdf:`, `cco:`, `obo:` and `tacio:`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTable {
    entries: Vec<(String, String)>,
}

impl Default for PrefixTable {
    fn default() -> Self {
        Self::standard()
    }
}

impl PrefixTable {
    pub fn standard() -> Self {
        PrefixTable {
            entries: [
                ("rdf", RDF_NS),
                ("cco", CCO_NS),
                ("obo", OBO_NS),
                ("tacio", TACIO_NS),
            ]
            .into_iter()
            .map(|(p, n)| (p.to_string(), n.to_string()))
            .collect(),
        }
    }

    /// Adds or rebinds a prefix.
    pub fn declare(&mut self, prefix: &str, namespace: &str) {
        match self.entries.iter_mut().find(|(p, _)| p == prefix) {
            Some(entry) => entry.1 = namespace.to_string(),
            None => self
                .entries
                .push((prefix.to_string(), namespace.to_string())),
        }
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(p, _)| p == prefix)
            .map(|(_, n)| n.as_str())
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        self.namespace(prefix).map(|ns| format!("{ns}{local}"))
    }

    /// Splits `iri` into a declared prefix and a local name that can be
    /// written as a prefixed name. Prefers the longest matching namespace.
    pub fn compact<'a>(&'a self, iri: &'a str) -> Option<(&'a str, &'a str)> {
        self.entries
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len())
            .map(|(p, ns)| (p.as_str(), &iri[ns.len()..]))
            .filter(|(_, local)| is_simple_local(local))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(p, n)| (p.as_str(), n.as_str()))
    }
}

/// Local names written unbracketed: `[A-Za-z_][A-Za-z0-9_-]*`.
fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Rewrites known alternative spellings to the canonical IRI.
pub fn normalize_iri(iri: &str) -> Option<String> {
    let local = iri.strip_prefix(TACIO_NS)?;
    (local == vocab::tacio::ACT_OF_CARRIER_AND_CONCRETIZER_TRANSITION_ALIAS).then(|| {
        format!(
            "{TACIO_NS}{}",
            vocab::tacio::ACT_OF_CARRIER_AND_CONCRETIZER_TRANSITION
        )
    })
}

fn is_unreserved(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~')
}

fn encode_local(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if is_unreserved(b) {
            out.push(char::from(b));
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn decode_local(s: &str) -> Option<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'%' => {
                let hex = s.get(i + 1..i + 3)?;
                out.push(u8::from_str_radix(hex, 16).ok()?);
                i += 3;
            }
            b if is_unreserved(b) => {
                out.push(b);
                i += 1;
            }
            _ => return None,
        }
    }
    String::from_utf8(out).ok()
}

pub fn instance_iri(id: &str) -> String {
    format!("{INSTANCE_NS}{}", encode_local(id))
}

pub fn aggregate_iri(root: &str) -> String {
    format!("{AGGREGATE_NS}{}", encode_local(root))
}

/// Inverse of [`instance_iri`]. Aggregate IRIs are not instances.
pub fn id_from_iri(iri: &str) -> Option<EntityId> {
    let rest = iri.strip_prefix(INSTANCE_NS)?;
    if rest.contains(':') {
        return None;
    }
    EntityId::new(decode_local(rest)?).ok()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RdfError {
    #[error("graph has {} integrity violation(s)", .0.len())]
    InvalidGraph(Vec<Diagnostic>),
}

pub fn copy_class_term(class: CopyClass) -> Term {
    use vocab::tacio::*;
    tacio(match class {
        CopyClass::Duplication => ACT_OF_DUPLICATION,
        CopyClass::CarrierTransition => ACT_OF_CARRIER_TRANSITION,
        CopyClass::ConcretizerTransition => ACT_OF_CONCRETIZER_TRANSITION,
        CopyClass::CarrierAndConcretizerTransition => ACT_OF_CARRIER_AND_CONCRETIZER_TRANSITION,
    })
}

/// Triple view with the default canonicity configuration.
pub fn to_triples(g: &Graph) -> Result<Vec<Triple>, RdfError> {
    to_triples_with(g, &CanonicityConfig::default())
}

/// Maps a well-formed graph to a sorted, duplicate-free triple sequence.
pub fn to_triples_with(g: &Graph, config: &CanonicityConfig) -> Result<Vec<Triple>, RdfError> {
    let diagnostics = g.validate();
    if !diagnostics.is_empty() {
        return Err(RdfError::InvalidGraph(diagnostics));
    }
    use vocab::{cco as c, obo as o, tacio as t};

    let mut out: BTreeSet<Triple> = BTreeSet::new();
    let mut emit = |s: &Term, p: Term, obj: Term| {
        out.insert(Triple::new(s.clone(), p, obj));
    };
    let a = rdf(vocab::RDF_TYPE);

    for agent in g.agents() {
        emit(&Term::instance(agent), a.clone(), cco(c::AGENT));
    }
    for content in g.contents() {
        let s = Term::instance(&content.id);
        emit(&s, a.clone(), cco(c::INFORMATION_CONTENT_ENTITY));
        if let Some(d) = &content.digest {
            emit(&s, tacio(t::DIGEST), Term::literal(d.as_str()));
        }
        for topic in &content.about {
            emit(&s, cco(c::DESCRIBES), Term::instance(topic));
        }
    }
    for carrier in g.carriers() {
        let s = Term::instance(&carrier.id);
        emit(&s, a.clone(), tacio(t::INFORMATION_BEARER));
        emit(&s, a.clone(), cco(&carrier.carrier_type));
        emit(
            &s,
            tacio(t::CARRIER_TYPE),
            Term::literal(carrier.carrier_type.as_str()),
        );
        emit(
            &s,
            tacio(t::CONCRETIZER_TYPE),
            Term::literal(carrier.concretizer_type.as_str()),
        );
        for content in &carrier.carries {
            emit(&s, obo(o::IS_CARRIER_OF), Term::instance(content));
        }
        for part in &carrier.parts {
            emit(&s, obo(o::HAS_PART), Term::instance(part));
        }
    }
    for icse in g.icses() {
        let s = Term::instance(&icse.id);
        emit(&s, a.clone(), tacio(t::ICSE));
        emit(
            &s,
            tacio(t::EXPECTED_CARRIER_TYPE),
            Term::literal(icse.expected_carrier_type.as_str()),
        );
        emit(
            &s,
            tacio(t::EXPECTED_CONCRETIZER_TYPE),
            Term::literal(icse.expected_concretizer_type.as_str()),
        );
        if !icse.payload.is_empty() {
            emit(&s, tacio(t::PAYLOAD), Term::literal(icse.payload.as_str()));
        }
    }
    for act in g.acts() {
        let s = Term::instance(&act.id);
        emit(&s, a.clone(), tacio(t::ACT_OF_ENCODING));
        match act.kind {
            ActKind::Encoding => {}
            ActKind::Copying => {
                emit(&s, a.clone(), tacio(t::ACT_OF_COPYING));
                if let Ok(class) = classify_copy_act(g, act.id.as_str()) {
                    emit(&s, a.clone(), copy_class_term(class));
                }
            }
            ActKind::EncodingIcse => emit(&s, a.clone(), tacio(t::ACT_OF_ENCODING_ICSE)),
        }
        if let Some(token) = &act.act_type {
            emit(&s, a.clone(), cco(token));
            emit(&s, tacio(t::ACT_TYPE), Term::literal(token.as_str()));
        }
        emit(&Term::instance(&act.agent), cco(c::AGENT_IN), s.clone());
        if let Some(reference) = &act.reference {
            emit(
                &s,
                tacio(t::HAS_REFERENCE_CARRIER),
                Term::instance(reference),
            );
        }
        for input in act_inputs(g, act) {
            emit(&s, cco(c::HAS_INPUT), Term::instance(input));
            emit(&Term::instance(input), cco(c::INPUT_OF), s.clone());
        }
        emit(&s, cco(c::HAS_OUTPUT), Term::instance(&act.output));
        emit(
            &s,
            tacio(t::PPF),
            Term::literal(if act.ppf { "true" } else { "false" }),
        );
        if let Some(at) = &act.at {
            emit(&s, tacio(t::AT), Term::literal(at.as_str()));
        }
        if !act.sub_acts.is_empty() {
            let order: Vec<&str> = act.sub_acts.iter().map(EntityId::as_str).collect();
            emit(&s, tacio(t::SUB_ACTS), Term::literal(order.join(" ")));
        }
        for sub in &act.sub_acts {
            emit(&s, cco(c::HAS_PROCESS_PART), Term::instance(sub));
        }
        if let Some(icse) = &act.prescribed_by {
            emit(&s, cco(c::PRESCRIBED_BY), Term::instance(icse));
        }
    }
    for d in g.defeaters() {
        let s = Term::instance(&d.id);
        emit(&s, a.clone(), tacio(t::DEFEATER));
        emit(
            &Term::instance(&d.target),
            tacio(t::HAS_DEFEATER),
            s.clone(),
        );
        emit(&s, tacio(t::DEFEATER_KIND), Term::literal(d.kind.as_str()));
        if !d.statement.is_empty() {
            emit(&s, tacio(t::STATEMENT), Term::literal(d.statement.as_str()));
        }
    }

    // Derived lineage and canonicity.
    let index = LineageIndex::new(g);
    for (from, to) in index.reduction_edges() {
        emit(
            &Term::instance(from),
            tacio(t::HAS_DESCENDANT_COPY),
            Term::instance(to),
        );
    }
    for (reference, copy) in index.edges() {
        if canonicity::is_canonical_copy(g, copy.as_str(), reference.as_str())
            .is_ok_and(|v| v.holds)
        {
            emit(
                &Term::instance(reference),
                tacio(t::HAS_CANONICAL_COPY),
                Term::instance(copy),
            );
        }
    }
    for agg in index
        .all_aggregates()
        .into_iter()
        .filter(|a| !a.is_singleton())
    {
        let s = Term::Iri(aggregate_iri(agg.root.as_str()));
        emit(&s, a.clone(), tacio(t::AGGREGATE_OF_COPIES));
        emit(
            &s,
            a.clone(),
            tacio(match agg.classification {
                AggregateClass::Duplicates => t::AGGREGATE_OF_DUPLICATES,
                AggregateClass::PseudoDuplicates => t::AGGREGATE_OF_PSEUDO_DUPLICATES,
            }),
        );
        emit(
            &s,
            tacio(t::HAS_EARLIEST_ANCESTOR),
            Term::instance(&agg.root),
        );
        for m in &agg.members {
            emit(&s, obo(o::HAS_MEMBER), Term::instance(m));
        }
        let canonical =
            canonicity::canonical_members_in(&index, agg.root.as_str(), config).unwrap_or_default();
        for m in &canonical {
            emit(&s, tacio(t::HAS_CANONICAL_MEMBER), Term::instance(m));
        }
    }
    Ok(out.into_iter().collect())
}

/// Inputs of an act: its reference carrier, plus for a composite act the
/// reference carriers of its direct sub-acts that are not produced by a
/// sibling sub-act.
pub fn act_inputs<'g>(g: &'g Graph, act: &'g EncodingAct) -> BTreeSet<&'g EntityId> {
    let mut inputs: BTreeSet<&EntityId> = act.reference.iter().collect();
    let subs: Vec<&EncodingAct> = act
        .sub_acts
        .iter()
        .filter_map(|s| g.act(s.as_str()))
        .collect();
    let produced: BTreeSet<&EntityId> = subs.iter().map(|s| &s.output).collect();
    for sub in subs {
        if let Some(r) = &sub.reference {
            if !produced.contains(r) {
                inputs.insert(r);
            }
        }
    }
    inputs
}

#[derive(Default)]
struct Subject<'t> {
    types: BTreeSet<&'t str>,
    props: BTreeMap<&'t str, Vec<&'t Term>>,
}

impl<'t> Subject<'t> {
    fn literal(&self, prop: &str) -> Option<&'t str> {
        self.props.get(prop)?.iter().find_map(|t| t.as_literal())
    }

    fn ids(&self, prop: &str) -> impl Iterator<Item = EntityId> + '_ {
        self.props
            .get(prop)
            .into_iter()
            .flatten()
            .filter_map(|t| t.as_iri().and_then(id_from_iri))
    }
}

/// Rebuilds a graph from a triple view produced by [`to_triples`]. Derived
/// triples (lineage, canonicity, aggregates, classification types) are
/// ignored; they are recomputed from the rebuilt graph.
pub fn graph_from_triples(triples: &[Triple]) -> (Graph, Vec<Diagnostic>) {
    use vocab::{cco as c, obo as o, tacio as t};

    let local = |term: &'_ Term, ns: &str| -> Option<String> {
        term.as_iri()?.strip_prefix(ns).map(String::from)
    };
    let mut subjects: BTreeMap<EntityId, Subject<'_>> = BTreeMap::new();
    let mut defeater_targets: BTreeMap<EntityId, EntityId> = BTreeMap::new();
    let mut agent_in: BTreeMap<EntityId, EntityId> = BTreeMap::new();
    let mut diags = Vec::new();

    let type_iri = format!("{RDF_NS}{}", vocab::RDF_TYPE);
    for triple in triples {
        let Some(sid) = triple.subject.as_iri().and_then(id_from_iri) else {
            continue;
        };
        let Some(pred) = triple.predicate.as_iri() else {
            continue;
        };
        if pred == type_iri {
            if let Some(l) = local(&triple.object, TACIO_NS) {
                let entry = subjects.entry(sid).or_default();
                for known in [
                    t::INFORMATION_BEARER,
                    t::ACT_OF_ENCODING,
                    t::ACT_OF_COPYING,
                    t::ACT_OF_ENCODING_ICSE,
                    t::ICSE,
                    t::DEFEATER,
                ] {
                    if l == known {
                        entry.types.insert(known);
                    }
                }
            } else if let Some(l) = local(&triple.object, CCO_NS) {
                let entry = subjects.entry(sid).or_default();
                if l == c::AGENT {
                    entry.types.insert(c::AGENT);
                } else if l == c::INFORMATION_CONTENT_ENTITY {
                    entry.types.insert(c::INFORMATION_CONTENT_ENTITY);
                }
            }
            continue;
        }
        let key = if let Some(l) = pred.strip_prefix(TACIO_NS) {
            l
        } else if let Some(l) = pred.strip_prefix(CCO_NS) {
            l
        } else if let Some(l) = pred.strip_prefix(OBO_NS) {
            l
        } else {
            continue;
        };
        if key == t::HAS_DEFEATER {
            if let Some(d) = triple.object.as_iri().and_then(id_from_iri) {
                defeater_targets.insert(d, sid);
            }
            continue;
        }
        if key == c::AGENT_IN {
            if let Some(act) = triple.object.as_iri().and_then(id_from_iri) {
                if let Some(prev) = agent_in.insert(act.clone(), sid.clone()) {
                    if prev != sid {
                        diags.push(
                            Diagnostic::new(
                                0,
                                DiagCode::InvalidField,
                                format!("act `{act}` has more than one agent"),
                            )
                            .about(act),
                        );
                    }
                }
            }
            continue;
        }
        // Static lifetime keys keep the map borrow-free of `pred`.
        let key: &'static str = match key {
            k if k == t::CARRIER_TYPE => t::CARRIER_TYPE,
            k if k == t::CONCRETIZER_TYPE => t::CONCRETIZER_TYPE,
            k if k == t::DIGEST => t::DIGEST,
            k if k == t::ACT_TYPE => t::ACT_TYPE,
            k if k == t::PPF => t::PPF,
            k if k == t::AT => t::AT,
            k if k == t::SUB_ACTS => t::SUB_ACTS,
            k if k == t::EXPECTED_CARRIER_TYPE => t::EXPECTED_CARRIER_TYPE,
            k if k == t::EXPECTED_CONCRETIZER_TYPE => t::EXPECTED_CONCRETIZER_TYPE,
            k if k == t::PAYLOAD => t::PAYLOAD,
            k if k == t::DEFEATER_KIND => t::DEFEATER_KIND,
            k if k == t::STATEMENT => t::STATEMENT,
            k if k == t::HAS_REFERENCE_CARRIER => t::HAS_REFERENCE_CARRIER,
            k if k == c::DESCRIBES => c::DESCRIBES,
            k if k == c::HAS_OUTPUT => c::HAS_OUTPUT,
            k if k == c::PRESCRIBED_BY => c::PRESCRIBED_BY,
            k if k == o::IS_CARRIER_OF => o::IS_CARRIER_OF,
            k if k == o::HAS_PART => o::HAS_PART,
            _ => continue,
        };
        subjects
            .entry(sid)
            .or_default()
            .props
            .entry(key)
            .or_default()
            .push(&triple.object);
    }

    let missing = |id: &EntityId, field: &str| {
        Diagnostic::new(0, DiagCode::MissingField, format!("`{id}` has no {field}"))
            .about(id.clone())
    };

    let mut agents = Vec::new();
    let mut contents = Vec::new();
    let mut carriers = Vec::new();
    let mut icses = Vec::new();
    let mut acts = Vec::new();
    let mut defeaters = Vec::new();
    for (id, s) in &subjects {
        let kinds = [
            s.types.contains(c::AGENT),
            s.types.contains(c::INFORMATION_CONTENT_ENTITY),
            s.types.contains(t::INFORMATION_BEARER),
            s.types.contains(t::ICSE),
            s.types.contains(t::ACT_OF_ENCODING),
            s.types.contains(t::DEFEATER),
        ];
        match kinds.iter().filter(|k| **k).count() {
            0 => continue,
            1 => {}
            _ => {
                diags.push(
                    Diagnostic::new(
                        0,
                        DiagCode::InvalidField,
                        format!("`{id}` is typed as more than one kind of record"),
                    )
                    .about(id.clone()),
                );
                continue;
            }
        }
        if kinds[0] {
            agents.push(id.clone());
        } else if kinds[1] {
            let mut content = ContentItem::new(id.clone());
            content.digest = s.literal(t::DIGEST).map(String::from);
            content.about = s.ids(c::DESCRIBES).collect();
            contents.push(content);
        } else if kinds[2] {
            let (Some(ct), Some(zt)) = (s.literal(t::CARRIER_TYPE), s.literal(t::CONCRETIZER_TYPE))
            else {
                diags.push(missing(id, "carrier_type/concretizer_type"));
                continue;
            };
            let mut carrier = Carrier::new(id.clone(), ct, zt);
            carrier.carries = s.ids(o::IS_CARRIER_OF).collect();
            carrier.parts = s.ids(o::HAS_PART).collect();
            carriers.push(carrier);
        } else if kinds[3] {
            let (Some(ct), Some(zt)) = (
                s.literal(t::EXPECTED_CARRIER_TYPE),
                s.literal(t::EXPECTED_CONCRETIZER_TYPE),
            ) else {
                diags.push(missing(
                    id,
                    "expected_carrier_type/expected_concretizer_type",
                ));
                continue;
            };
            icses.push(Icse {
                id: id.clone(),
                expected_carrier_type: ct.into(),
                expected_concretizer_type: zt.into(),
                payload: s.literal(t::PAYLOAD).unwrap_or_default().into(),
            });
        } else if kinds[4] {
            let kind = if s.types.contains(t::ACT_OF_COPYING) {
                ActKind::Copying
            } else if s.types.contains(t::ACT_OF_ENCODING_ICSE) {
                ActKind::EncodingIcse
            } else {
                ActKind::Encoding
            };
            let Some(agent) = agent_in.get(id) else {
                diags.push(missing(id, "agent"));
                continue;
            };
            let Some(output) = s.ids(c::HAS_OUTPUT).next() else {
                diags.push(missing(id, "output"));
                continue;
            };
            let sub_acts = match s.literal(t::SUB_ACTS) {
                Some(list) => match list.split_whitespace().map(EntityId::new).collect() {
                    Ok(v) => v,
                    Err(_) => {
                        diags.push(missing(id, "well-formed sub_acts"));
                        continue;
                    }
                },
                None => Vec::new(),
            };
            acts.push(EncodingAct {
                id: id.clone(),
                kind,
                act_type: s.literal(t::ACT_TYPE).map(String::from),
                agent: agent.clone(),
                reference: s.ids(t::HAS_REFERENCE_CARRIER).next(),
                output,
                ppf: s.literal(t::PPF) == Some("true"),
                sub_acts,
                prescribed_by: s.ids(c::PRESCRIBED_BY).next(),
                at: s.literal(t::AT).map(String::from),
            });
        } else {
            let Some(target) = defeater_targets.get(id) else {
                diags.push(missing(id, "target"));
                continue;
            };
            let Some(kind) = s.literal(t::DEFEATER_KIND).and_then(DefeaterKind::parse) else {
                diags.push(missing(id, "defeater_kind"));
                continue;
            };
            defeaters.push(Defeater {
                id: id.clone(),
                target: target.clone(),
                kind,
                statement: s.literal(t::STATEMENT).unwrap_or_default().into(),
            });
        }
    }

    let mut g = Graph::new();
    let mut record = |r: crate::error::Result<()>| {
        if let Err(e) = r {
            diags.push(Diagnostic::new(0, e.diag_code(), e.to_string()));
        }
    };
    agents.into_iter().for_each(|a| record(g.add_agent(a)));
    contents.into_iter().for_each(|c| record(g.add_content(c)));
    icses.into_iter().for_each(|i| record(g.add_icse(i)));
    carriers.into_iter().for_each(|c| record(g.add_carrier(c)));
    acts.into_iter().for_each(|a| record(g.add_act(a)));
    defeaters
        .into_iter()
        .for_each(|d| record(g.add_defeater(d)));
    sort_diagnostics(&mut diags);
    (g, diags)
}
