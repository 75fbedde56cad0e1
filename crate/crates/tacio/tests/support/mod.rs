//! Reference implementations used as test oracles, and a seeded generator
//! of random, acyclic copy graphs. Nothing here calls the engine code it
//! is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use tacio::core::query::{BgpQuery, PatternTerm, Projection};
use tacio::core::rdf::Term;
use tacio::core::{ActKind, Carrier, EncodingAct, EntityId, Graph};

pub fn id(s: &str) -> EntityId {
    EntityId::new(s).unwrap()
}

// ---------------------------------------------------------------------------
// Random copy graphs

pub const CARRIER_TYPES: [&str; 2] = ["Disk", "Tape"];
pub const CONCRETIZER_TYPES: [&str; 2] = ["Magnetic", "Optical"];

#[derive(Debug, Clone)]
pub struct CarrierSpec {
    pub id: String,
    pub carrier_type: String,
    pub concretizer_type: String,
}

#[derive(Debug, Clone)]
pub struct CopySpec {
    pub id: String,
    pub reference: usize,
    pub output: usize,
    /// Ids of the atomic copies this one is composed of; empty for atomic.
    pub sub_acts: Vec<String>,
    pub ppf: bool,
}

/// Carriers `c0..cN` and copy acts that only go from lower to higher
/// index, so the lineage is acyclic by construction.
#[derive(Debug, Clone)]
pub struct Spec {
    pub carriers: Vec<CarrierSpec>,
    pub copies: Vec<CopySpec>,
}

impl Spec {
    pub fn random(rng: &mut impl Rng, max_carriers: usize, max_copies: usize) -> Spec {
        let n = rng.random_range(1..=max_carriers);
        let carriers: Vec<CarrierSpec> = (0..n)
            .map(|i| CarrierSpec {
                id: format!("c{i}"),
                carrier_type: CARRIER_TYPES[rng.random_range(0..2)].to_owned(),
                concretizer_type: CONCRETIZER_TYPES[rng.random_range(0..2)].to_owned(),
            })
            .collect();
        let mut copies = Vec::new();
        // At most one atomic producer per carrier.
        let mut parent: Vec<Option<(usize, String)>> = vec![None; n];
        for j in 1..n {
            if copies.len() < max_copies && rng.random_bool(0.75) {
                let i = rng.random_range(0..j);
                let act = format!("copy{j}");
                parent[j] = Some((i, act.clone()));
                copies.push(CopySpec {
                    id: act,
                    reference: i,
                    output: j,
                    sub_acts: Vec::new(),
                    ppf: rng.random_bool(0.7),
                });
            }
        }
        // Composite copies spanning two or more atomic hops, each atomic
        // act used by at most one composite.
        let mut used: BTreeSet<String> = BTreeSet::new();
        for x in 0..n {
            if copies.len() >= max_copies || !rng.random_bool(0.5) {
                continue;
            }
            let mut chain = Vec::new();
            let mut cursor = x;
            while let Some((p, act)) = &parent[cursor] {
                chain.push(act.clone());
                cursor = *p;
                if chain.len() >= 2 && rng.random_bool(0.5) {
                    break;
                }
            }
            if chain.len() < 2 || chain.iter().any(|a| used.contains(a)) {
                continue;
            }
            chain.reverse();
            used.extend(chain.iter().cloned());
            copies.push(CopySpec {
                id: format!("composite{x}"),
                reference: cursor,
                output: x,
                sub_acts: chain,
                ppf: rng.random_bool(0.7),
            });
        }
        Spec { carriers, copies }
    }

    pub fn is_atomic_output(&self, carrier: usize) -> bool {
        self.copies
            .iter()
            .any(|c| c.sub_acts.is_empty() && c.output == carrier)
    }

    /// Builds the graph, inserting records in a shuffled order.
    pub fn build(&self, rng: &mut impl Rng) -> Graph {
        let mut g = Graph::new();
        g.add_agent(id("u")).unwrap();
        let mut carriers = self.carriers.clone();
        carriers.shuffle(rng);
        for c in &carriers {
            g.add_carrier(Carrier::new(
                id(&c.id),
                c.carrier_type.as_str(),
                c.concretizer_type.as_str(),
            ))
            .unwrap();
        }
        let mut copies = self.copies.clone();
        copies.shuffle(rng);
        for c in &copies {
            let act = EncodingAct {
                id: id(&c.id),
                kind: ActKind::Copying,
                act_type: None,
                agent: id("u"),
                reference: Some(id(&self.carriers[c.reference].id)),
                output: id(&self.carriers[c.output].id),
                ppf: c.ppf,
                sub_acts: c.sub_acts.iter().map(|s| id(s)).collect(),
                prescribed_by: None,
                at: None,
            };
            g.add_act(act).unwrap();
        }
        g
    }
}

// ---------------------------------------------------------------------------
// Reachability by fixpoint

/// `reach[a][b]` is true when `b` is reachable from `a` through one or more
/// reference-to-output edges. Iterates edge relaxation until nothing
/// changes.
pub fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in edges {
        reach[a][b] = true;
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            for &(a, b) in edges {
                if reach[x][a] && !reach[x][b] {
                    reach[x][b] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return reach;
        }
    }
}

pub struct LineageOracle {
    pub names: Vec<String>,
    pub reach: Vec<Vec<bool>>,
    atomic_output: Vec<bool>,
}

impl LineageOracle {
    pub fn new(spec: &Spec) -> Self {
        let n = spec.carriers.len();
        let edges: Vec<(usize, usize)> = spec
            .copies
            .iter()
            .map(|c| (c.reference, c.output))
            .collect();
        LineageOracle {
            names: spec.carriers.iter().map(|c| c.id.clone()).collect(),
            reach: reachability(n, &edges),
            atomic_output: (0..n).map(|i| spec.is_atomic_output(i)).collect(),
        }
    }

    pub fn descendants(&self, x: usize) -> BTreeSet<String> {
        (0..self.names.len())
            .filter(|&y| self.reach[x][y])
            .map(|y| self.names[y].clone())
            .collect()
    }

    pub fn ancestors(&self, x: usize) -> BTreeSet<String> {
        (0..self.names.len())
            .filter(|&y| self.reach[y][x])
            .map(|y| self.names[y].clone())
            .collect()
    }

    /// The one carrier among `x` and its ancestors that no atomic copy
    /// produced.
    pub fn earliest_ancestor(&self, x: usize) -> String {
        let roots: Vec<usize> = (0..self.names.len())
            .filter(|&y| (y == x || self.reach[y][x]) && !self.atomic_output[y])
            .collect();
        assert_eq!(
            roots.len(),
            1,
            "oracle expects a unique root for {}",
            self.names[x]
        );
        self.names[roots[0]].clone()
    }

    pub fn is_root(&self, x: usize) -> bool {
        !self.atomic_output[x]
    }
}

/// "Duplicates iff every connecting atomic act keeps both types", checked
/// directly on carrier types.
pub fn duplicates_by_rule(spec: &Spec, members: &BTreeSet<usize>, root: usize) -> bool {
    spec.copies
        .iter()
        .filter(|c| c.sub_acts.is_empty() && c.output != root && members.contains(&c.output))
        .all(|c| {
            let (r, o) = (&spec.carriers[c.reference], &spec.carriers[c.output]);
            r.carrier_type == o.carrier_type && r.concretizer_type == o.concretizer_type
        })
}

// ---------------------------------------------------------------------------
// Nested-loop query evaluation

const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const CCO_NS: &str = "http://www.ontologyrepository.com/CommonCoreOntologies/";
const OBO_NS: &str = "http://purl.obolibrary.org/obo/";
const TACIO_NS: &str =
    "http://www.ontologyrepository.com/CommonCoreOntologies/Exp/NewInformationOntology";

fn oracle_term(t: &PatternTerm, prefixes: &HashMap<String, String>) -> Result<Term, String> {
    let fix = |iri: String| {
        iri.replace(
            "NewInformationOntologyActofCarrierandConcretizerTransition",
            "NewInformationOntologyActOfCarrierAndConcretizerTransition",
        )
    };
    match t {
        PatternTerm::Iri(i) => Ok(Term::Iri(fix(i.clone()))),
        PatternTerm::Literal(l) => Ok(Term::Literal(l.clone())),
        PatternTerm::Prefixed { prefix, local } => prefixes
            .get(prefix)
            .map(|ns| Term::Iri(fix(format!("{ns}{local}"))))
            .ok_or_else(|| format!("unknown prefix {prefix}")),
        PatternTerm::Var(_) => unreachable!(),
    }
}

/// Joins patterns strictly in the order written, scanning every triple for
/// every pattern. Returns the projected rows, sorted, deduplicated when the
/// query says `DISTINCT`.
pub fn nested_loop(
    q: &BgpQuery,
    triples: &[Term3],
) -> Result<(Vec<String>, Vec<Vec<Term>>), String> {
    let mut prefixes: HashMap<String, String> = [
        ("rdf", RDF_NS),
        ("cco", CCO_NS),
        ("obo", OBO_NS),
        ("tacio", TACIO_NS),
    ]
    .into_iter()
    .map(|(p, n)| (p.to_owned(), n.to_owned()))
    .collect();
    for (p, n) in &q.prefixes {
        prefixes.insert(p.clone(), n.clone());
    }
    let mut order = Vec::new();
    for p in &q.patterns {
        for t in [&p.subject, &p.predicate, &p.object] {
            if let PatternTerm::Var(v) = t {
                if !order.contains(v) {
                    order.push(v.clone());
                }
            }
        }
    }
    let columns = match &q.projection {
        Projection::Star => order.clone(),
        Projection::Vars(v) => v.clone(),
    };

    enum P {
        V(String),
        C(Term),
    }
    let patterns: Vec<[P; 3]> = q
        .patterns
        .iter()
        .map(|p| {
            let conv = |t: &PatternTerm| match t {
                PatternTerm::Var(v) => Ok(P::V(v.clone())),
                other => oracle_term(other, &prefixes).map(P::C),
            };
            Ok([conv(&p.subject)?, conv(&p.predicate)?, conv(&p.object)?])
        })
        .collect::<Result<_, String>>()?;

    fn go(
        k: usize,
        patterns: &[[P; 3]],
        triples: &[Term3],
        binding: &mut BTreeMap<String, Term>,
        out: &mut Vec<BTreeMap<String, Term>>,
    ) {
        if k == patterns.len() {
            out.push(binding.clone());
            return;
        }
        for t in triples {
            let mut added = Vec::new();
            let mut ok = true;
            for (slot, value) in patterns[k].iter().zip([&t.0, &t.1, &t.2]) {
                match slot {
                    P::C(c) => ok &= c == value,
                    P::V(v) => match binding.get(v) {
                        Some(b) => ok &= b == value,
                        None => {
                            binding.insert(v.clone(), value.clone());
                            added.push(v.clone());
                        }
                    },
                }
                if !ok {
                    break;
                }
            }
            if ok {
                go(k + 1, patterns, triples, binding, out);
            }
            for v in added {
                binding.remove(&v);
            }
        }
    }
    let mut solutions = Vec::new();
    go(0, &patterns, triples, &mut BTreeMap::new(), &mut solutions);
    let mut rows: Vec<Vec<Term>> = solutions
        .into_iter()
        .map(|b| columns.iter().map(|c| b[c].clone()).collect())
        .collect();
    rows.sort();
    if q.distinct {
        rows.dedup();
    }
    Ok((columns, rows))
}

pub type Term3 = (Term, Term, Term);

pub fn as_tuples(triples: &[tacio::core::Triple]) -> Vec<Term3> {
    triples
        .iter()
        .map(|t| (t.subject.clone(), t.predicate.clone(), t.object.clone()))
        .collect()
}
