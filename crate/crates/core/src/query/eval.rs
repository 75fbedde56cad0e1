use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{BgpQuery, BindingTable, ParseError, PatternTerm, QueryError};
use crate::rdf::{normalize_iri, PrefixTable, Term, Triple};

/// A pattern position after prefix resolution: a constant term or the index
/// of a variable in the query's variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Var(usize),
    Const(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedPattern {
    pub slots: [Slot; 3],
}

/// Expands prefixed names against the standard table plus the query's own
/// declarations, and numbers variables in order of first appearance.
pub fn resolve(q: &BgpQuery) -> Result<(Vec<String>, Vec<ResolvedPattern>), QueryError> {
    let mut table = PrefixTable::standard();
    for (prefix, ns) in &q.prefixes {
        table.declare(prefix, ns);
    }
    let vars: Vec<String> = q.pattern_vars().into_iter().map(String::from).collect();
    if let Some(missing) = q.columns().into_iter().find(|c| !vars.contains(c)) {
        return Err(QueryError::Parse(ParseError {
            line: 0,
            column: 0,
            expected: alloc::format!("projected variable ?{missing} to appear in some pattern"),
        }));
    }
    let slot = |t: &PatternTerm| -> Result<Slot, QueryError> {
        Ok(match t {
            PatternTerm::Var(v) => {
                Slot::Var(vars.iter().position(|x| x == v).expect("collected above"))
            }
            PatternTerm::Literal(l) => Slot::Const(Term::Literal(l.clone())),
            PatternTerm::Iri(i) => {
                Slot::Const(Term::Iri(normalize_iri(i).unwrap_or_else(|| i.clone())))
            }
            PatternTerm::Prefixed { prefix, local } => {
                let iri = table
                    .expand(prefix, local)
                    .ok_or_else(|| QueryError::UnknownPrefix(prefix.to_string()))?;
                Slot::Const(Term::Iri(normalize_iri(&iri).unwrap_or(iri)))
            }
        })
    };
    let patterns = q
        .patterns
        .iter()
        .map(|p| {
            Ok(ResolvedPattern {
                slots: [slot(&p.subject)?, slot(&p.predicate)?, slot(&p.object)?],
            })
        })
        .collect::<Result<Vec<_>, QueryError>>()?;
    Ok((vars, patterns))
}

struct Index<'t> {
    triples: &'t [Triple],
    by_position: [BTreeMap<&'t Term, Vec<usize>>; 3],
}

impl<'t> Index<'t> {
    fn new(triples: &'t [Triple]) -> Self {
        let mut by_position: [BTreeMap<&Term, Vec<usize>>; 3] = Default::default();
        for (i, t) in triples.iter().enumerate() {
            for (pos, term) in [&t.subject, &t.predicate, &t.object]
                .into_iter()
                .enumerate()
            {
                by_position[pos].entry(term).or_default().push(i);
            }
        }
        Index {
            triples,
            by_position,
        }
    }

    /// Smallest posting list among the positions fixed by constants or
    /// bound variables; `None` means every triple is a candidate.
    fn candidates<'a>(
        &'a self,
        pattern: &ResolvedPattern,
        binding: &[Option<&'t Term>],
    ) -> Option<&'a [usize]> {
        let empty: &[usize] = &[];
        let mut best: Option<&[usize]> = None;
        for (pos, slot) in pattern.slots.iter().enumerate() {
            let term = match slot {
                Slot::Const(t) => t,
                Slot::Var(v) => match binding[*v] {
                    Some(t) => t,
                    None => continue,
                },
            };
            let list = self.by_position[pos].get(term).map_or(empty, Vec::as_slice);
            if best.is_none_or(|b| list.len() < b.len()) {
                best = Some(list);
            }
        }
        best
    }

    fn estimate(&self, pattern: &ResolvedPattern) -> usize {
        let mut best = self.triples.len();
        for (pos, slot) in pattern.slots.iter().enumerate() {
            if let Slot::Const(t) = slot {
                best = best.min(self.by_position[pos].get(t).map_or(0, Vec::len));
            }
        }
        best
    }
}

fn vars_of(p: &ResolvedPattern) -> impl Iterator<Item = usize> + '_ {
    p.slots.iter().filter_map(|s| match s {
        Slot::Var(v) => Some(*v),
        Slot::Const(_) => None,
    })
}

/// Greedy join order: start from the most selective pattern, then prefer
/// patterns sharing a variable with those already placed.
fn join_order(index: &Index<'_>, patterns: &[ResolvedPattern], var_count: usize) -> Vec<usize> {
    let estimates: Vec<usize> = patterns.iter().map(|p| index.estimate(p)).collect();
    let mut bound = alloc::vec![false; var_count];
    let mut placed = alloc::vec![false; patterns.len()];
    let mut order = Vec::with_capacity(patterns.len());
    for _ in 0..patterns.len() {
        let pick = (0..patterns.len())
            .filter(|&i| !placed[i])
            .min_by_key(|&i| {
                let connected = vars_of(&patterns[i]).any(|v| bound[v]);
                (!connected && !order.is_empty(), estimates[i], i)
            })
            .expect("an unplaced pattern remains");
        placed[pick] = true;
        for v in vars_of(&patterns[pick]) {
            bound[v] = true;
        }
        order.push(pick);
    }
    order
}

fn unify<'t>(
    pattern: &ResolvedPattern,
    triple: &'t Triple,
    binding: &mut [Option<&'t Term>],
    newly: &mut Vec<usize>,
) -> bool {
    for (slot, term) in
        pattern
            .slots
            .iter()
            .zip([&triple.subject, &triple.predicate, &triple.object])
    {
        match slot {
            Slot::Const(c) => {
                if c != term {
                    return false;
                }
            }
            Slot::Var(v) => match binding[*v] {
                Some(b) if b != term => return false,
                Some(_) => {}
                None => {
                    binding[*v] = Some(term);
                    newly.push(*v);
                }
            },
        }
    }
    true
}

fn search<'t>(
    index: &Index<'t>,
    patterns: &[&ResolvedPattern],
    binding: &mut Vec<Option<&'t Term>>,
    emit: &mut dyn FnMut(&[Option<&'t Term>]),
) {
    let Some((first, rest)) = patterns.split_first() else {
        emit(binding);
        return;
    };
    let all: Vec<usize>;
    let candidates = match index.candidates(first, binding) {
        Some(c) => c,
        None => {
            all = (0..index.triples.len()).collect();
            &all
        }
    };
    let mut newly = Vec::new();
    for &i in candidates {
        newly.clear();
        if unify(first, &index.triples[i], binding, &mut newly) {
            search(index, rest, binding, emit);
        }
        for v in &newly {
            binding[*v] = None;
        }
    }
}

fn project(q: &BgpQuery, vars: &[String], solutions: Vec<Vec<Term>>) -> BindingTable {
    let columns = q.columns();
    let picks: Vec<usize> = columns
        .iter()
        .map(|c| {
            vars.iter()
                .position(|v| v == c)
                .expect("projection checked by resolve")
        })
        .collect();
    let mut rows: Vec<Vec<Term>> = solutions
        .into_iter()
        .map(|s| picks.iter().map(|&i| s[i].clone()).collect())
        .collect();
    rows.sort();
    if q.distinct {
        rows.dedup();
    }
    BindingTable { columns, rows }
}

/// Evaluates `q` against a triple sequence. Rows come back sorted; with
/// `DISTINCT` they are also duplicate-free.
pub fn evaluate(q: &BgpQuery, triples: &[Triple]) -> Result<BindingTable, QueryError> {
    let (vars, patterns) = resolve(q)?;
    let index = Index::new(triples);
    let order = join_order(&index, &patterns, vars.len());
    let ordered: Vec<&ResolvedPattern> = order.iter().map(|&i| &patterns[i]).collect();
    let mut solutions = Vec::new();
    let mut binding = alloc::vec![None; vars.len()];
    search(&index, &ordered, &mut binding, &mut |b| {
        solutions.push(
            b.iter()
                .map(|t| t.expect("all variables bound").clone())
                .collect(),
        );
    });
    Ok(project(q, &vars, solutions))
}

/// Reference evaluator: nested loops over the triples in pattern order, no
/// indexes and no reordering.
pub fn evaluate_naive(q: &BgpQuery, triples: &[Triple]) -> Result<BindingTable, QueryError> {
    let (vars, patterns) = resolve(q)?;
    let mut partial: Vec<Vec<Option<&Term>>> = alloc::vec![alloc::vec![None; vars.len()]];
    for p in &patterns {
        let mut next = Vec::new();
        for b in &partial {
            for t in triples {
                let mut candidate = b.clone();
                if unify(p, t, &mut candidate, &mut Vec::new()) {
                    next.push(candidate);
                }
            }
        }
        partial = next;
    }
    let solutions = partial
        .into_iter()
        .map(|b| {
            b.into_iter()
                .map(|t| t.expect("all variables bound").clone())
                .collect()
        })
        .collect();
    Ok(project(q, &vars, solutions))
}
