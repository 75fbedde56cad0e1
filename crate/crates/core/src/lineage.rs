//! Copy lineage: descendant/ancestor closure, copy-act classification and
//! aggregates of carrier copies.
//!
//! Every act of copying, atomic or composite, contributes one descendant
//! edge from its reference carrier to its output. Roots and earliest
//! ancestors are decided by atomic copy acts only, so the shortcut edges
//! contributed by composite acts never move a carrier to another aggregate.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{unknown, EncodingAct, EntityId, Graph};

/// The four kinds of copy act, decided by comparing the reference carrier
/// with the output carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CopyClass {
    /// Same carrier type, same concretizer type.
    Duplication,
    /// Carrier type changes, concretizer type stays.
    CarrierTransition,
    /// Concretizer type changes, carrier type stays.
    ConcretizerTransition,
    /// Both change.
    CarrierAndConcretizerTransition,
}

impl CopyClass {
    pub const ALL: [CopyClass; 4] = [
        CopyClass::Duplication,
        CopyClass::CarrierTransition,
        CopyClass::ConcretizerTransition,
        CopyClass::CarrierAndConcretizerTransition,
    ];

    pub const fn from_differences(carrier_differs: bool, concretizer_differs: bool) -> Self {
        match (carrier_differs, concretizer_differs) {
            (false, false) => CopyClass::Duplication,
            (true, false) => CopyClass::CarrierTransition,
            (false, true) => CopyClass::ConcretizerTransition,
            (true, true) => CopyClass::CarrierAndConcretizerTransition,
        }
    }

    pub const fn carrier_differs(self) -> bool {
        matches!(
            self,
            CopyClass::CarrierTransition | CopyClass::CarrierAndConcretizerTransition
        )
    }

    pub const fn concretizer_differs(self) -> bool {
        matches!(
            self,
            CopyClass::ConcretizerTransition | CopyClass::CarrierAndConcretizerTransition
        )
    }

    pub const fn name(self) -> &'static str {
        match self {
            CopyClass::Duplication => "Duplication",
            CopyClass::CarrierTransition => "CarrierTransition",
            CopyClass::ConcretizerTransition => "ConcretizerTransition",
            CopyClass::CarrierAndConcretizerTransition => "CarrierAndConcretizerTransition",
        }
    }
}

impl fmt::Display for CopyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggregateClass {
    /// Every member joined through an act of duplication.
    Duplicates,
    /// At least one member joined through a transition.
    PseudoDuplicates,
}

impl AggregateClass {
    pub const fn name(self) -> &'static str {
        match self {
            AggregateClass::Duplicates => "Duplicates",
            AggregateClass::PseudoDuplicates => "PseudoDuplicates",
        }
    }
}

impl fmt::Display for AggregateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A root carrier together with all of its descendant copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub root: EntityId,
    /// Includes the root.
    pub members: BTreeSet<EntityId>,
    pub classification: AggregateClass,
}

impl Aggregate {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }
}

/// True when the output carries content identical to some content carried
/// by the reference (identical ids, or equal digests).
pub fn successful(g: &Graph, act: &str) -> Result<bool> {
    let (reference, output) = copy_endpoints(g, act)?;
    let r = g
        .carrier(reference.as_str())
        .ok_or_else(|| unknown(reference.as_str()))?;
    let o = g
        .carrier(output.as_str())
        .ok_or_else(|| unknown(output.as_str()))?;
    Ok(o.carries.iter().any(|oc| {
        r.carries
            .iter()
            .any(|rc| g.same_content(oc.as_str(), rc.as_str()))
    }))
}

pub fn classify_copy_act(g: &Graph, act: &str) -> Result<CopyClass> {
    let (reference, output) = copy_endpoints(g, act)?;
    let r = g
        .carrier(reference.as_str())
        .ok_or_else(|| unknown(reference.as_str()))?;
    let o = g
        .carrier(output.as_str())
        .ok_or_else(|| unknown(output.as_str()))?;
    Ok(CopyClass::from_differences(
        r.carrier_type != o.carrier_type,
        r.concretizer_type != o.concretizer_type,
    ))
}

fn copy_endpoints<'g>(g: &'g Graph, act: &str) -> Result<(&'g EntityId, &'g EntityId)> {
    let a = g.act(act).ok_or_else(|| unknown(act))?;
    match (&a.reference, a.is_copying()) {
        (Some(reference), true) => Ok((reference, &a.output)),
        _ => Err(Error::NotACopyAct(a.id.clone())),
    }
}

/// One `(reference, output)` edge per act of copying whose ends are both
/// carriers.
pub fn descendant_edges(g: &Graph) -> BTreeSet<(EntityId, EntityId)> {
    LineageIndex::new(g)
        .edges()
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect()
}

pub fn descendants(g: &Graph, x: &str) -> Result<BTreeSet<EntityId>> {
    LineageIndex::new(g).descendants(x)
}

pub fn ancestors(g: &Graph, x: &str) -> Result<BTreeSet<EntityId>> {
    LineageIndex::new(g).ancestors(x)
}

pub fn earliest_ancestor(g: &Graph, x: &str) -> Result<EntityId> {
    LineageIndex::new(g).earliest_ancestor(x)
}

pub fn aggregate_of(g: &Graph, x: &str) -> Result<Aggregate> {
    LineageIndex::new(g).aggregate_of(x)
}

pub fn all_aggregates(g: &Graph) -> Vec<Aggregate> {
    LineageIndex::new(g).all_aggregates()
}

/// Adjacency built once over a graph, for callers that ask many lineage
/// questions about the same graph.
#[derive(Debug, Clone)]
pub struct LineageIndex<'g> {
    graph: &'g Graph,
    children: BTreeMap<&'g EntityId, BTreeSet<&'g EntityId>>,
    parents: BTreeMap<&'g EntityId, BTreeSet<&'g EntityId>>,
}

impl<'g> LineageIndex<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let mut children: BTreeMap<&EntityId, BTreeSet<&EntityId>> = BTreeMap::new();
        let mut parents: BTreeMap<&EntityId, BTreeSet<&EntityId>> = BTreeMap::new();
        for act in graph.acts().filter(|a| a.is_copying()) {
            let Some(reference) = &act.reference else {
                continue;
            };
            if graph.carrier(reference.as_str()).is_none()
                || graph.carrier(act.output.as_str()).is_none()
            {
                continue;
            }
            children.entry(reference).or_default().insert(&act.output);
            parents.entry(&act.output).or_default().insert(reference);
        }
        LineageIndex {
            graph,
            children,
            parents,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn edges(&self) -> impl Iterator<Item = (&'g EntityId, &'g EntityId)> + '_ {
        self.children
            .iter()
            .flat_map(|(from, tos)| tos.iter().map(move |to| (*from, *to)))
    }

    /// Direct descendant copies of `x`.
    pub fn children(&self, x: &str) -> impl Iterator<Item = &'g EntityId> + '_ {
        self.graph
            .carrier(x)
            .and_then(|c| self.children.get(&c.id))
            .into_iter()
            .flatten()
            .copied()
    }

    fn carrier_id(&self, x: &str) -> Result<&'g EntityId> {
        self.graph
            .carrier(x)
            .map(|c| &c.id)
            .ok_or_else(|| unknown(x))
    }

    fn closure(
        &self,
        start: &'g EntityId,
        adjacency: &BTreeMap<&'g EntityId, BTreeSet<&'g EntityId>>,
    ) -> BTreeSet<EntityId> {
        let mut seen: BTreeSet<&EntityId> = BTreeSet::new();
        let mut queue: VecDeque<&EntityId> = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            for next in adjacency.get(node).into_iter().flatten() {
                if *next != start && seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter().cloned().collect()
    }

    /// Transitive descendant copies of `x`, excluding `x`.
    pub fn descendants(&self, x: &str) -> Result<BTreeSet<EntityId>> {
        let start = self.carrier_id(x)?;
        Ok(self.closure(start, &self.children))
    }

    /// Transitive ancestor copies of `x`, excluding `x`.
    pub fn ancestors(&self, x: &str) -> Result<BTreeSet<EntityId>> {
        let start = self.carrier_id(x)?;
        Ok(self.closure(start, &self.parents))
    }

    /// The atomic copy act that produced `x`, if `x` is not a root.
    pub fn atomic_copy_producer(&self, x: &str) -> Option<&'g EncodingAct> {
        self.graph.atomic_copy_reference(x)?;
        self.graph.atomic_producer(x)
    }

    pub fn is_root(&self, x: &str) -> bool {
        self.graph.carrier(x).is_some() && self.graph.atomic_copy_reference(x).is_none()
    }

    /// Follows atomic copy producers up to the carrier that has none.
    pub fn earliest_ancestor(&self, x: &str) -> Result<EntityId> {
        let start = self.carrier_id(x)?;
        Ok(self
            .graph
            .atomic_ancestors(x)
            .last()
            .copied()
            .unwrap_or(start)
            .clone())
    }

    pub fn aggregate_of(&self, x: &str) -> Result<Aggregate> {
        let root = self.earliest_ancestor(x)?;
        Ok(self.aggregate_rooted_at(root))
    }

    fn aggregate_rooted_at(&self, root: EntityId) -> Aggregate {
        let mut members = self.closure(
            self.carrier_id(root.as_str()).expect("root is a carrier"),
            &self.children,
        );
        members.insert(root.clone());
        let classification = self.classify_members(&root, &members);
        Aggregate {
            root,
            members,
            classification,
        }
    }

    /// The atomic copy acts that bring non-root members into an aggregate.
    pub fn connecting_acts(
        &self,
        root: &EntityId,
        members: &BTreeSet<EntityId>,
    ) -> Vec<&'g EncodingAct> {
        members
            .iter()
            .filter(|m| *m != root)
            .filter_map(|m| self.atomic_copy_producer(m.as_str()))
            .collect()
    }

    fn classify_members(&self, root: &EntityId, members: &BTreeSet<EntityId>) -> AggregateClass {
        let all_duplication = self.connecting_acts(root, members).iter().all(|act| {
            classify_copy_act(self.graph, act.id.as_str()) == Ok(CopyClass::Duplication)
        });
        if all_duplication {
            AggregateClass::Duplicates
        } else {
            AggregateClass::PseudoDuplicates
        }
    }

    /// One aggregate per root carrier, ordered by root id.
    pub fn all_aggregates(&self) -> Vec<Aggregate> {
        self.graph
            .carriers()
            .filter(|c| self.is_root(c.id.as_str()))
            .map(|c| self.aggregate_rooted_at(c.id.clone()))
            .collect()
    }

    /// Edges of the transitive reduction of the descendant relation. Only
    /// meaningful on acyclic lineage.
    pub fn reduction_edges(&self) -> Vec<(&'g EntityId, &'g EntityId)> {
        self.edges()
            .filter(|(from, to)| {
                !self
                    .children(from.as_str())
                    .filter(|mid| mid != to)
                    .any(|mid| self.closure(mid, &self.children).contains(to.as_str()))
            })
            .collect()
    }
}
