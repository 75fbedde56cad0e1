//! Typed store for content items, carriers, acts of encoding, carrier
//! structure prescriptions and defeaters.
//!
//! Mutation happens through the `add_*` methods, which enforce the
//! invariants that can be checked locally (id uniqueness, field shape,
//! a single atomic producer per output). References between records may be
//! forward references; [`Graph::validate`] reports whatever is still
//! unresolved or structurally inconsistent once everything is loaded.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

use crate::diagnostic::{sort_diagnostics, DiagCode, Diagnostic};
use crate::error::{Error, Result};
use crate::scc;

/// Identifier of any entity in a [`Graph`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(value: impl Into<String>) -> Result<Self> {
        let value = value.into();
        if value.is_empty() || value.chars().any(|c| c.is_whitespace() || c == '"') {
            return Err(Error::InvalidId(value));
        }
        Ok(EntityId(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for EntityId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for EntityId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl core::str::FromStr for EntityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EntityId::new(s)
    }
}

/// An information content entity. When a digest is present it stands in
/// for content identity: two items with equal digests count as the same
/// content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentItem {
    pub id: EntityId,
    pub digest: Option<String>,
    pub about: BTreeSet<EntityId>,
}

impl ContentItem {
    pub fn new(id: EntityId) -> Self {
        ContentItem {
            id,
            digest: None,
            about: BTreeSet::new(),
        }
    }

    pub fn with_digest(mut self, digest: impl Into<String>) -> Self {
        self.digest = Some(digest.into());
        self
    }

    pub fn describing(mut self, topic: EntityId) -> Self {
        self.about.insert(topic);
        self
    }
}

/// An information bearing entity.
///
/// `carrier_type` is the type of the material bearer and
/// `concretizer_type` the type of the pattern that concretizes the carried
/// content in it. Both are compared as exact tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier {
    pub id: EntityId,
    pub carrier_type: String,
    pub concretizer_type: String,
    pub carries: BTreeSet<EntityId>,
    pub parts: BTreeSet<EntityId>,
}

impl Carrier {
    pub fn new(
        id: EntityId,
        carrier_type: impl Into<String>,
        concretizer_type: impl Into<String>,
    ) -> Self {
        Carrier {
            id,
            carrier_type: carrier_type.into(),
            concretizer_type: concretizer_type.into(),
            carries: BTreeSet::new(),
            parts: BTreeSet::new(),
        }
    }

    pub fn carrying(mut self, content: EntityId) -> Self {
        self.carries.insert(content);
        self
    }

    pub fn with_part(mut self, part: EntityId) -> Self {
        self.parts.insert(part);
        self
    }
}

/// A prescription for forming a copy of a reference carrier (for example a
/// packet reassembly rule).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Icse {
    pub id: EntityId,
    pub expected_carrier_type: String,
    pub expected_concretizer_type: String,
    pub payload: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActKind {
    Encoding,
    Copying,
    EncodingIcse,
}

impl ActKind {
    pub const fn as_str(self) -> &'static str {
        match self {
            ActKind::Encoding => "encoding",
            ActKind::Copying => "copying",
            ActKind::EncodingIcse => "encoding_icse",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "encoding" => Some(ActKind::Encoding),
            "copying" => Some(ActKind::Copying),
            "encoding_icse" => Some(ActKind::EncodingIcse),
            _ => None,
        }
    }
}

impl fmt::Display for ActKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An act of encoding. Copying acts take a reference carrier as input.
/// An act with sub-acts is composite; one without is atomic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingAct {
    pub id: EntityId,
    pub kind: ActKind,
    /// Extra process type token, exported as a `cco:` class.
    pub act_type: Option<String>,
    pub agent: EntityId,
    pub reference: Option<EntityId>,
    pub output: EntityId,
    /// The act is a process of proper functioning.
    pub ppf: bool,
    pub sub_acts: Vec<EntityId>,
    pub prescribed_by: Option<EntityId>,
    pub at: Option<String>,
}

impl EncodingAct {
    pub fn encoding(id: EntityId, agent: EntityId, output: EntityId) -> Self {
        EncodingAct {
            id,
            kind: ActKind::Encoding,
            act_type: None,
            agent,
            reference: None,
            output,
            ppf: false,
            sub_acts: Vec::new(),
            prescribed_by: None,
            at: None,
        }
    }

    pub fn copying(id: EntityId, agent: EntityId, reference: EntityId, output: EntityId) -> Self {
        EncodingAct {
            kind: ActKind::Copying,
            reference: Some(reference),
            ..EncodingAct::encoding(id, agent, output)
        }
    }

    pub fn with_ppf(mut self, ppf: bool) -> Self {
        self.ppf = ppf;
        self
    }

    pub fn with_sub_acts(mut self, sub_acts: Vec<EntityId>) -> Self {
        self.sub_acts = sub_acts;
        self
    }

    pub fn is_atomic(&self) -> bool {
        self.sub_acts.is_empty()
    }

    pub fn is_copying(&self) -> bool {
        self.kind == ActKind::Copying
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DefeaterKind {
    /// Evidence that the copy is not faithful.
    Rebutting,
    /// Evidence that the reasons for trusting the copy are questionable.
    Undercutting,
}

impl DefeaterKind {
    pub const fn as_str(self) -> &'static str {
        match self {
            DefeaterKind::Rebutting => "rebutting",
            DefeaterKind::Undercutting => "undercutting",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rebutting" => Some(DefeaterKind::Rebutting),
            "undercutting" => Some(DefeaterKind::Undercutting),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defeater {
    pub id: EntityId,
    /// An act or a carrier.
    pub target: EntityId,
    pub kind: DefeaterKind,
    pub statement: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntityKind {
    Content,
    Carrier,
    Act,
    Icse,
    Defeater,
    Agent,
    Topic,
}

/// The entity store. Equality compares record content only, so graphs built
/// from the same records in any order are equal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    contents: BTreeMap<EntityId, ContentItem>,
    carriers: BTreeMap<EntityId, Carrier>,
    acts: BTreeMap<EntityId, EncodingAct>,
    icses: BTreeMap<EntityId, Icse>,
    defeaters: BTreeMap<EntityId, Defeater>,
    agents: BTreeSet<EntityId>,
    topics: BTreeSet<EntityId>,
    // Derived indexes, fully determined by the records above.
    atomic_producer: BTreeMap<EntityId, EntityId>,
    defeaters_by_target: BTreeMap<EntityId, BTreeSet<EntityId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contents(&self) -> impl Iterator<Item = &ContentItem> {
        self.contents.values()
    }

    pub fn carriers(&self) -> impl Iterator<Item = &Carrier> {
        self.carriers.values()
    }

    pub fn acts(&self) -> impl Iterator<Item = &EncodingAct> {
        self.acts.values()
    }

    pub fn icses(&self) -> impl Iterator<Item = &Icse> {
        self.icses.values()
    }

    pub fn defeaters(&self) -> impl Iterator<Item = &Defeater> {
        self.defeaters.values()
    }

    pub fn agents(&self) -> impl Iterator<Item = &EntityId> {
        self.agents.iter()
    }

    pub fn topics(&self) -> impl Iterator<Item = &EntityId> {
        self.topics.iter()
    }

    pub fn content(&self, id: &str) -> Option<&ContentItem> {
        self.contents.get(id)
    }

    pub fn carrier(&self, id: &str) -> Option<&Carrier> {
        self.carriers.get(id)
    }

    pub fn act(&self, id: &str) -> Option<&EncodingAct> {
        self.acts.get(id)
    }

    pub fn icse(&self, id: &str) -> Option<&Icse> {
        self.icses.get(id)
    }

    pub fn defeater(&self, id: &str) -> Option<&Defeater> {
        self.defeaters.get(id)
    }

    pub fn is_empty(&self) -> bool {
        self.contents.is_empty()
            && self.carriers.is_empty()
            && self.acts.is_empty()
            && self.icses.is_empty()
            && self.defeaters.is_empty()
            && self.agents.is_empty()
    }

    pub fn kind_of(&self, id: &str) -> Option<EntityKind> {
        if self.contents.contains_key(id) {
            Some(EntityKind::Content)
        } else if self.carriers.contains_key(id) {
            Some(EntityKind::Carrier)
        } else if self.acts.contains_key(id) {
            Some(EntityKind::Act)
        } else if self.icses.contains_key(id) {
            Some(EntityKind::Icse)
        } else if self.defeaters.contains_key(id) {
            Some(EntityKind::Defeater)
        } else if self.agents.contains(id) {
            Some(EntityKind::Agent)
        } else if self.topics.contains(id) {
            Some(EntityKind::Topic)
        } else {
            None
        }
    }

    /// True for ids declared by a record. Topics are not declarations: a
    /// later record with a topic's id takes it over.
    pub fn is_declared(&self, id: &str) -> bool {
        !matches!(self.kind_of(id), None | Some(EntityKind::Topic))
    }

    /// The atomic act whose output is `id`, if any.
    pub fn atomic_producer(&self, id: &str) -> Option<&EncodingAct> {
        self.atomic_producer.get(id).and_then(|a| self.acts.get(a))
    }

    /// Defeaters whose target is exactly `id`, in id order.
    pub fn defeaters_targeting(&self, id: &str) -> impl Iterator<Item = &Defeater> {
        self.defeaters_by_target
            .get(id)
            .into_iter()
            .flatten()
            .filter_map(|d| self.defeaters.get(d))
    }

    fn claim(&mut self, id: &EntityId) -> Result<()> {
        if self.is_declared(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
        self.topics.remove(id.as_str());
        Ok(())
    }

    pub fn add_agent(&mut self, id: EntityId) -> Result<()> {
        self.claim(&id)?;
        self.agents.insert(id);
        Ok(())
    }

    /// Stores a content item. About-targets that do not name a declared
    /// entity are registered as opaque topics.
    pub fn add_content(&mut self, content: ContentItem) -> Result<()> {
        if self.is_declared(content.id.as_str()) {
            return Err(Error::DuplicateId(content.id));
        }
        if let Some(digest) = &content.digest {
            if !is_valid_digest(digest) {
                return Err(Error::InvalidField {
                    id: content.id,
                    field: "digest",
                    reason: format!("{digest:?} does not match <alnum>+:<hex>+"),
                });
            }
        }
        self.topics.remove(content.id.as_str());
        for topic in &content.about {
            if !self.is_declared(topic.as_str()) && topic != &content.id {
                self.topics.insert(topic.clone());
            }
        }
        self.contents.insert(content.id.clone(), content);
        Ok(())
    }

    pub fn add_carrier(&mut self, carrier: Carrier) -> Result<()> {
        if self.is_declared(carrier.id.as_str()) {
            return Err(Error::DuplicateId(carrier.id));
        }
        non_empty_token(&carrier.id, "carrier_type", &carrier.carrier_type)?;
        non_empty_token(&carrier.id, "concretizer_type", &carrier.concretizer_type)?;
        self.topics.remove(carrier.id.as_str());
        self.carriers.insert(carrier.id.clone(), carrier);
        Ok(())
    }

    pub fn add_icse(&mut self, icse: Icse) -> Result<()> {
        if self.is_declared(icse.id.as_str()) {
            return Err(Error::DuplicateId(icse.id));
        }
        non_empty_token(
            &icse.id,
            "expected_carrier_type",
            &icse.expected_carrier_type,
        )?;
        non_empty_token(
            &icse.id,
            "expected_concretizer_type",
            &icse.expected_concretizer_type,
        )?;
        self.topics.remove(icse.id.as_str());
        self.icses.insert(icse.id.clone(), icse);
        Ok(())
    }

    pub fn add_act(&mut self, act: EncodingAct) -> Result<()> {
        if self.is_declared(act.id.as_str()) {
            return Err(Error::DuplicateId(act.id));
        }
        match (act.kind, &act.reference) {
            (ActKind::Copying, None) => return Err(Error::MissingReference(act.id)),
            (ActKind::Encoding | ActKind::EncodingIcse, Some(_)) => {
                return Err(Error::InvalidField {
                    id: act.id,
                    field: "reference",
                    reason: "only acts of copying take a reference carrier".to_owned(),
                })
            }
            _ => {}
        }
        if let Some(token) = &act.act_type {
            non_empty_token(&act.id, "act_type", token)?;
        }
        if let Some(at) = &act.at {
            if !is_rfc3339(at) {
                return Err(Error::InvalidField {
                    id: act.id,
                    field: "at",
                    reason: format!("{at:?} is not an RFC 3339 timestamp"),
                });
            }
        }
        if act.is_atomic() {
            if let Some(existing) = self.atomic_producer.get(act.output.as_str()) {
                return Err(Error::SecondProducer {
                    carrier: act.output.clone(),
                    existing: existing.clone(),
                    act: act.id,
                });
            }
            self.atomic_producer
                .insert(act.output.clone(), act.id.clone());
        }
        self.topics.remove(act.id.as_str());
        self.acts.insert(act.id.clone(), act);
        Ok(())
    }

    /// Stores a defeater. Its target must already be an act or a carrier.
    pub fn add_defeater(&mut self, defeater: Defeater) -> Result<()> {
        if self.is_declared(defeater.id.as_str()) {
            return Err(Error::DuplicateId(defeater.id));
        }
        let target = defeater.target.as_str();
        if !self.acts.contains_key(target) && !self.carriers.contains_key(target) {
            return Err(Error::DanglingTarget(defeater.target));
        }
        self.topics.remove(defeater.id.as_str());
        self.defeaters_by_target
            .entry(defeater.target.clone())
            .or_default()
            .insert(defeater.id.clone());
        self.defeaters.insert(defeater.id.clone(), defeater);
        Ok(())
    }

    /// Removes a defeater, returning it.
    pub fn remove_defeater(&mut self, id: &str) -> Option<Defeater> {
        let defeater = self.defeaters.remove(id)?;
        if let Some(set) = self.defeaters_by_target.get_mut(defeater.target.as_str()) {
            set.remove(id);
            if set.is_empty() {
                self.defeaters_by_target.remove(defeater.target.as_str());
            }
        }
        Some(defeater)
    }

    /// All carriers whose carried contents include `content`.
    pub fn carriers_of(&self, content: &str) -> Result<BTreeSet<EntityId>> {
        if !self.contents.contains_key(content) {
            return Err(unknown(content));
        }
        Ok(self
            .carriers
            .values()
            .filter(|c| c.carries.contains(content))
            .map(|c| c.id.clone())
            .collect())
    }

    /// Content identity: equal ids, or digests present on both sides and
    /// equal.
    pub fn same_content(&self, a: &str, b: &str) -> bool {
        if a == b {
            return true;
        }
        match (
            self.contents.get(a).and_then(|c| c.digest.as_deref()),
            self.contents.get(b).and_then(|c| c.digest.as_deref()),
        ) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Reports every integrity violation. An empty result means the graph is
    /// well-formed. Never mutates.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        self.check_references(&mut out);
        self.check_part_cycles(&mut out);
        self.check_containment(&mut out);
        self.check_lineage(&mut out);
        sort_diagnostics(&mut out);
        out
    }

    fn check_references(&self, out: &mut Vec<Diagnostic>) {
        let dangling = |owner: &EntityId, field: &str, target: &EntityId, wanted: &str| {
            Diagnostic::new(
                0,
                DiagCode::DanglingRef,
                format!("`{owner}`.{field} refers to `{target}`, which is not a declared {wanted}"),
            )
            .about(owner.clone())
        };
        for carrier in self.carriers.values() {
            for c in &carrier.carries {
                if !self.contents.contains_key(c.as_str()) {
                    out.push(dangling(&carrier.id, "carries", c, "content item"));
                }
            }
            for p in &carrier.parts {
                if !self.carriers.contains_key(p.as_str()) {
                    out.push(dangling(&carrier.id, "parts", p, "carrier"));
                }
            }
        }
        for act in self.acts.values() {
            let agent = act.agent.as_str();
            if !self.agents.contains(agent) && !self.carriers.contains_key(agent) {
                out.push(dangling(&act.id, "agent", &act.agent, "agent or carrier"));
            }
            if let Some(r) = &act.reference {
                if !self.carriers.contains_key(r.as_str()) {
                    out.push(dangling(&act.id, "reference", r, "carrier"));
                }
            }
            match act.kind {
                ActKind::EncodingIcse => {
                    if !self.icses.contains_key(act.output.as_str()) {
                        out.push(dangling(
                            &act.id,
                            "output",
                            &act.output,
                            "carrier structure entity",
                        ));
                    }
                }
                ActKind::Encoding | ActKind::Copying => {
                    if !self.carriers.contains_key(act.output.as_str()) {
                        out.push(dangling(&act.id, "output", &act.output, "carrier"));
                    }
                }
            }
            for s in &act.sub_acts {
                if !self.acts.contains_key(s.as_str()) {
                    out.push(dangling(&act.id, "sub_acts", s, "act"));
                }
            }
            if let Some(p) = &act.prescribed_by {
                if !self.icses.contains_key(p.as_str()) {
                    out.push(dangling(
                        &act.id,
                        "prescribed_by",
                        p,
                        "carrier structure entity",
                    ));
                }
            }
        }
        for d in self.defeaters.values() {
            let t = d.target.as_str();
            if !self.acts.contains_key(t) && !self.carriers.contains_key(t) {
                out.push(dangling(&d.id, "target", &d.target, "act or carrier"));
            }
        }
    }

    fn check_part_cycles(&self, out: &mut Vec<Diagnostic>) {
        let edges = self.carriers.values().flat_map(|c| {
            c.parts
                .iter()
                .filter(|p| self.carriers.contains_key(p.as_str()))
                .map(move |p| (&c.id, p))
        });
        for cycle in scc::cyclic_components(edges) {
            out.push(cycle_diagnostic("parts", &cycle));
        }
    }

    fn check_containment(&self, out: &mut Vec<Diagnostic>) {
        let mut containers: BTreeMap<&EntityId, Vec<&EntityId>> = BTreeMap::new();
        for act in self.acts.values() {
            for s in act
                .sub_acts
                .iter()
                .filter(|s| self.acts.contains_key(s.as_str()))
            {
                let list = containers.entry(s).or_default();
                if !list.contains(&&act.id) {
                    list.push(&act.id);
                }
            }
        }
        for (sub, list) in &containers {
            if list.len() > 1 {
                out.push(
                    Diagnostic::new(
                        0,
                        DiagCode::SharedSubAct,
                        format!(
                            "act `{sub}` is a sub-act of more than one act: {}",
                            join(list.iter().copied())
                        ),
                    )
                    .about((*sub).clone()),
                );
            }
        }
        let edges = containers
            .iter()
            .flat_map(|(sub, list)| list.iter().map(move |c| (*c, *sub)));
        for cycle in scc::cyclic_components(edges) {
            out.push(cycle_diagnostic("sub-act containment", &cycle));
        }
    }

    fn check_lineage(&self, out: &mut Vec<Diagnostic>) {
        let edges = self.acts.values().filter_map(|a| {
            let r = a.reference.as_ref()?;
            (a.is_copying()
                && self.carriers.contains_key(r.as_str())
                && self.carriers.contains_key(a.output.as_str()))
            .then_some((r, &a.output))
        });
        for cycle in scc::cyclic_components(edges) {
            out.push(cycle_diagnostic("copy lineage", &cycle));
        }
        for act in self
            .acts
            .values()
            .filter(|a| a.is_copying() && !a.is_atomic())
        {
            let Some(reference) = &act.reference else {
                continue;
            };
            if !self
                .atomic_ancestors(act.output.as_str())
                .contains(&reference)
            {
                out.push(
                    Diagnostic::new(
                        0,
                        DiagCode::CompositeSpan,
                        format!(
                            "composite act `{}`: reference `{reference}` is not an ancestor of output `{}` through atomic copies",
                            act.id, act.output
                        ),
                    )
                    .about(act.id.clone()),
                );
            }
        }
    }

    /// Reference carrier of the atomic copy act that produced `id`, when
    /// both ends are carriers.
    pub(crate) fn atomic_copy_reference(&self, id: &str) -> Option<&EntityId> {
        let act = self.atomic_producer(id).filter(|a| a.is_copying())?;
        let reference = act.reference.as_ref()?;
        (self.carriers.contains_key(reference.as_str()) && self.carriers.contains_key(id))
            .then_some(reference)
    }

    /// Carriers reached by walking atomic copy producers upwards from `id`.
    pub(crate) fn atomic_ancestors(&self, id: &str) -> Vec<&EntityId> {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut chain = Vec::new();
        let mut cursor = id;
        seen.insert(id);
        while let Some(reference) = self.atomic_copy_reference(cursor) {
            if !seen.insert(reference.as_str()) {
                break;
            }
            chain.push(reference);
            cursor = reference.as_str();
        }
        chain
    }
}

pub(crate) fn unknown(id: &str) -> Error {
    match EntityId::new(id) {
        Ok(id) => Error::UnknownId(id),
        Err(e) => e,
    }
}

fn non_empty_token(id: &EntityId, field: &'static str, value: &str) -> Result<()> {
    if value.is_empty() || value.chars().any(|c| c.is_whitespace() || c == '"') {
        return Err(Error::InvalidField {
            id: id.clone(),
            field,
            reason: format!("{value:?} is not a non-empty token"),
        });
    }
    Ok(())
}

fn cycle_diagnostic(relation: &str, members: &[&EntityId]) -> Diagnostic {
    Diagnostic::new(
        0,
        DiagCode::Cycle,
        format!("{relation} cycle through {}", join(members.iter().copied())),
    )
    .about(members[0].clone())
}

fn join<'a>(ids: impl Iterator<Item = &'a EntityId>) -> String {
    let mut s = String::new();
    for (i, id) in ids.enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push('`');
        s.push_str(id.as_str());
        s.push('`');
    }
    s
}

/// `<alnum>+:<hex>+`
pub fn is_valid_digest(s: &str) -> bool {
    match s.split_once(':') {
        Some((algo, hex)) => {
            !algo.is_empty()
                && !hex.is_empty()
                && algo.chars().all(|c| c.is_ascii_alphanumeric())
                && hex.chars().all(|c| c.is_ascii_hexdigit())
        }
        None => false,
    }
}

/// Structural RFC 3339 check: `YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM)`.
pub fn is_rfc3339(s: &str) -> bool {
    let b = s.as_bytes();
    let digits =
        |r: core::ops::Range<usize>| b.get(r).is_some_and(|d| d.iter().all(u8::is_ascii_digit));
    if b.len() < 20
        || !digits(0..4)
        || b[4] != b'-'
        || !digits(5..7)
        || b[7] != b'-'
        || !digits(8..10)
        || !matches!(b[10], b'T' | b't')
        || !digits(11..13)
        || b[13] != b':'
        || !digits(14..16)
        || b[16] != b':'
        || !digits(17..19)
    {
        return false;
    }
    let num = |r: core::ops::Range<usize>| -> u32 {
        b[r].iter().fold(0, |acc, d| acc * 10 + u32::from(d - b'0'))
    };
    if !(1..=12).contains(&num(5..7))
        || !(1..=31).contains(&num(8..10))
        || num(11..13) > 23
        || num(14..16) > 59
        || num(17..19) > 60
    {
        return false;
    }
    let mut i = 19;
    if b[i] == b'.' {
        let start = i + 1;
        i = start;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return false;
        }
    }
    match &b[i..] {
        [b'Z' | b'z'] => true,
        [b'+' | b'-', h1, h2, b':', m1, m2] => [h1, h2, m1, m2].iter().all(|d| d.is_ascii_digit()),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> EntityId {
        EntityId::new(s).unwrap()
    }

    #[test]
    fn entity_ids_reject_whitespace_and_quotes() {
        assert!(EntityId::new("ice1").is_ok());
        assert!(EntityId::new("").is_err());
        assert!(EntityId::new("a b").is_err());
        assert!(EntityId::new("a\"b").is_err());
    }

    #[test]
    fn add_content_once() {
        let mut g = Graph::new();
        g.add_content(ContentItem::new(id("ice1"))).unwrap();
        assert_eq!(g.contents().count(), 1);
        assert_eq!(
            g.add_content(ContentItem::new(id("ice1"))),
            Err(Error::DuplicateId(id("ice1")))
        );
    }

    #[test]
    fn about_targets_become_topics() {
        let mut g = Graph::new();
        g.add_content(ContentItem::new(id("ice1")).describing(id("traffic_event_1")))
            .unwrap();
        assert_eq!(g.kind_of("traffic_event_1"), Some(EntityKind::Topic));
        assert!(g.validate().is_empty());
    }

    #[test]
    fn topic_is_taken_over_by_a_later_declaration() {
        let mut a = Graph::new();
        a.add_content(ContentItem::new(id("ice1")).describing(id("x")))
            .unwrap();
        a.add_carrier(Carrier::new(id("x"), "Disk", "Bits"))
            .unwrap();
        let mut b = Graph::new();
        b.add_carrier(Carrier::new(id("x"), "Disk", "Bits"))
            .unwrap();
        b.add_content(ContentItem::new(id("ice1")).describing(id("x")))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.topics().count(), 0);
    }

    #[test]
    fn digest_shape_is_checked() {
        assert!(is_valid_digest("sha256:00ff"));
        assert!(!is_valid_digest("sha256:xyz"));
        assert!(!is_valid_digest("sha-256:00"));
        assert!(!is_valid_digest("00ff"));
        let mut g = Graph::new();
        let err = g
            .add_content(ContentItem::new(id("c")).with_digest("md5:"))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidField {
                field: "digest",
                ..
            }
        ));
    }

    #[test]
    fn two_carriers_of_the_same_content() {
        let mut g = Graph::new();
        g.add_content(ContentItem::new(id("ice1"))).unwrap();
        g.add_carrier(Carrier::new(id("screen1"), "Monitor", "GlyphPi").carrying(id("ice1")))
            .unwrap();
        g.add_carrier(Carrier::new(id("ipad1"), "IPad", "GlyphPi").carrying(id("ice1")))
            .unwrap();
        let carriers: Vec<_> = g.carriers_of("ice1").unwrap().into_iter().collect();
        assert_eq!(carriers, [id("ipad1"), id("screen1")]);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn empty_carrier_type_is_rejected() {
        let mut g = Graph::new();
        let err = g.add_carrier(Carrier::new(id("c"), "", "Ink")).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidField {
                field: "carrier_type",
                ..
            }
        ));
    }

    #[test]
    fn carriers_of_uncarried_and_unknown_content() {
        let mut g = Graph::new();
        g.add_content(ContentItem::new(id("lonely"))).unwrap();
        assert!(g.carriers_of("lonely").unwrap().is_empty());
        assert_eq!(g.carriers_of("ghost"), Err(Error::UnknownId(id("ghost"))));
    }

    #[test]
    fn copy_without_reference_is_rejected() {
        let mut g = Graph::new();
        let mut act = EncodingAct::copying(id("a1"), id("u"), id("c1"), id("c2"));
        act.reference = None;
        assert_eq!(g.add_act(act), Err(Error::MissingReference(id("a1"))));
    }

    #[test]
    fn second_atomic_producer_is_rejected() {
        let mut g = Graph::new();
        g.add_act(EncodingAct::copying(id("a1"), id("u"), id("c1"), id("c2")))
            .unwrap();
        let err = g
            .add_act(EncodingAct::copying(id("a2"), id("u"), id("c0"), id("c2")))
            .unwrap_err();
        assert_eq!(
            err,
            Error::SecondProducer {
                carrier: id("c2"),
                existing: id("a1"),
                act: id("a2"),
            }
        );
        // A composite act may share the output of one of its parts.
        g.add_act(
            EncodingAct::copying(id("a3"), id("u"), id("c1"), id("c2"))
                .with_sub_acts(alloc::vec![id("a1")]),
        )
        .unwrap();
    }

    #[test]
    fn defeaters_need_a_target_and_accumulate() {
        let mut g = Graph::new();
        g.add_agent(id("u")).unwrap();
        g.add_carrier(Carrier::new(id("c1"), "Disk", "Bits"))
            .unwrap();
        g.add_carrier(Carrier::new(id("c2"), "Disk", "Bits"))
            .unwrap();
        g.add_act(EncodingAct::copying(
            id("act1"),
            id("u"),
            id("c1"),
            id("c2"),
        ))
        .unwrap();
        let d = |n: &str, t: &str| Defeater {
            id: id(n),
            target: id(t),
            kind: DefeaterKind::Rebutting,
            statement: String::new(),
        };
        g.add_defeater(d("d1", "act1")).unwrap();
        g.add_defeater(d("d2", "act1")).unwrap();
        assert_eq!(
            g.add_defeater(d("d3", "ghost")),
            Err(Error::DanglingTarget(id("ghost")))
        );
        let on_act: Vec<_> = g
            .defeaters_targeting("act1")
            .map(|d| d.id.as_str())
            .collect();
        assert_eq!(on_act, ["d1", "d2"]);
        g.remove_defeater("d1");
        assert_eq!(g.defeaters_targeting("act1").count(), 1);
    }

    #[test]
    fn parts_cycle_gives_one_diagnostic() {
        let mut g = Graph::new();
        g.add_carrier(Carrier::new(id("a"), "Box", "Ink").with_part(id("b")))
            .unwrap();
        g.add_carrier(Carrier::new(id("b"), "Box", "Ink").with_part(id("a")))
            .unwrap();
        let diags = g.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::Cycle);
    }

    #[test]
    fn dangling_references_are_reported() {
        let mut g = Graph::new();
        g.add_carrier(Carrier::new(id("c1"), "Disk", "Bits").carrying(id("nope")))
            .unwrap();
        g.add_act(EncodingAct::copying(
            id("a1"),
            id("ghost_agent"),
            id("c1"),
            id("c9"),
        ))
        .unwrap();
        let codes: Vec<_> = g.validate().iter().map(|d| d.code).collect();
        assert_eq!(codes, [DiagCode::DanglingRef; 3]);
    }

    #[test]
    fn composite_whose_reference_is_not_an_ancestor() {
        let mut g = Graph::new();
        g.add_agent(id("u")).unwrap();
        for c in ["c1", "c2", "c3", "x"] {
            g.add_carrier(Carrier::new(id(c), "Disk", "Bits")).unwrap();
        }
        g.add_act(EncodingAct::copying(id("h1"), id("u"), id("c1"), id("c2")))
            .unwrap();
        g.add_act(EncodingAct::copying(id("h2"), id("u"), id("c2"), id("c3")))
            .unwrap();
        g.add_act(
            EncodingAct::copying(id("whole"), id("u"), id("c1"), id("c3"))
                .with_sub_acts(alloc::vec![id("h1"), id("h2")]),
        )
        .unwrap();
        assert!(g.validate().is_empty());
        g.add_act(
            EncodingAct::copying(id("bad"), id("u"), id("x"), id("c3"))
                .with_sub_acts(alloc::vec![id("h2")]),
        )
        .unwrap();
        let diags = g.validate();
        let spans: Vec<_> = diags
            .iter()
            .filter(|d| d.code == DiagCode::CompositeSpan)
            .collect();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].subject, Some(id("bad")));
        // h2 now sits inside two composites.
        assert!(diags.iter().any(|d| d.code == DiagCode::SharedSubAct));
    }

    #[test]
    fn copy_lineage_cycle_is_reported() {
        let mut g = Graph::new();
        g.add_agent(id("u")).unwrap();
        g.add_carrier(Carrier::new(id("c1"), "Disk", "Bits"))
            .unwrap();
        g.add_carrier(Carrier::new(id("c2"), "Disk", "Bits"))
            .unwrap();
        g.add_act(EncodingAct::copying(id("a"), id("u"), id("c1"), id("c2")))
            .unwrap();
        g.add_act(EncodingAct::copying(id("b"), id("u"), id("c2"), id("c1")))
            .unwrap();
        let diags = g.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::Cycle);
    }

    #[test]
    fn rfc3339_timestamps() {
        assert!(is_rfc3339("2024-03-01T12:00:00Z"));
        assert!(is_rfc3339("2024-03-01T12:00:00.125+02:00"));
        assert!(!is_rfc3339("2024-13-01T12:00:00Z"));
        assert!(!is_rfc3339("2024-03-01 12:00"));
        assert!(!is_rfc3339("yesterday"));
    }
}
