//! Canonical copies and canonical members of copy aggregates.
//!
//! A copy is canonical relative to its reference carrier when some act of
//! copying from that reference to it is a process of proper functioning
//! and nothing recorded casts doubt on it. These are sufficient conditions
//! only: a verdict that does not hold means "not established by these
//! rules", never "known to be unfaithful". Likewise a canonical copy can
//! still fail digest verification; canonicity is trust, not fidelity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lineage::LineageIndex;
use crate::model::{unknown, Defeater, DefeaterKind, EncodingAct, EntityId, EntityKind, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicityConfig {
    /// Also accept a canonical member when every atomic hop from the
    /// aggregate root is itself a canonical copy.
    pub chain_rule: bool,
}

impl Default for CanonicityConfig {
    fn default() -> Self {
        CanonicityConfig { chain_rule: true }
    }
}

/// How a verdict was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Route {
    DirectPpfAct,
    PpfChain,
    CompositePpfAct,
}

impl Route {
    pub const fn name(self) -> &'static str {
        match self {
            Route::DirectPpfAct => "DirectPpfAct",
            Route::PpfChain => "PpfChain",
            Route::CompositePpfAct => "CompositePpfAct",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CanonicityVerdict {
    pub holds: bool,
    /// Set when `holds`.
    pub via: Option<Route>,
    /// Defeaters found on otherwise qualifying acts. Empty when `holds`.
    pub blocking: BTreeSet<EntityId>,
}

impl CanonicityVerdict {
    fn established(via: Route) -> Self {
        CanonicityVerdict {
            holds: true,
            via: Some(via),
            blocking: BTreeSet::new(),
        }
    }

    fn blocked(blocking: BTreeSet<EntityId>) -> Self {
        CanonicityVerdict {
            holds: false,
            via: None,
            blocking,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fidelity {
    Verified,
    Mismatch,
    Unknown,
}

impl Fidelity {
    pub const fn name(self) -> &'static str {
        match self {
            Fidelity::Verified => "Verified",
            Fidelity::Mismatch => "Mismatch",
            Fidelity::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Fidelity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Defeaters bearing on `target`: those aimed at it directly and, for a
/// carrier, those aimed at any act that output it. Ordered by id.
pub fn defeaters_for<'g>(g: &'g Graph, target: &str) -> Result<Vec<&'g Defeater>> {
    let mut found: BTreeMap<&EntityId, &Defeater> = BTreeMap::new();
    match g.kind_of(target) {
        Some(EntityKind::Carrier) => {
            for act in g.acts().filter(|a| a.output.as_str() == target) {
                found.extend(g.defeaters_targeting(act.id.as_str()).map(|d| (&d.id, d)));
            }
        }
        Some(EntityKind::Act) => {}
        Some(_) if g.is_declared(target) => {}
        _ => return Err(unknown(target)),
    }
    found.extend(g.defeaters_targeting(target).map(|d| (&d.id, d)));
    Ok(found.into_values().collect())
}

fn defeater_ids(g: &Graph, target: &str) -> Result<BTreeSet<EntityId>> {
    Ok(defeaters_for(g, target)?
        .into_iter()
        .map(|d| d.id.clone())
        .collect())
}

fn require_carrier<'g>(g: &'g Graph, id: &str) -> Result<&'g EntityId> {
    g.carrier(id).map(|c| &c.id).ok_or_else(|| unknown(id))
}

/// Whether `copy` is a canonical copy of `reference`.
pub fn is_canonical_copy(g: &Graph, copy: &str, reference: &str) -> Result<CanonicityVerdict> {
    require_carrier(g, copy)?;
    require_carrier(g, reference)?;
    let mut candidates: Vec<&EncodingAct> = g
        .acts()
        .filter(|a| {
            a.is_copying()
                && a.ppf
                && a.output.as_str() == copy
                && a.reference
                    .as_ref()
                    .is_some_and(|r| r.as_str() == reference)
        })
        .collect();
    // Atomic acts first, then by id.
    candidates.sort_by_key(|a| (!a.is_atomic(), &a.id));

    let on_copy = defeater_ids(g, copy)?;
    let mut blocking = BTreeSet::new();
    for act in candidates {
        let mut blockers = on_copy.clone();
        blockers.extend(defeater_ids(g, act.id.as_str())?);
        if blockers.is_empty() {
            let via = if act.is_atomic() {
                Route::DirectPpfAct
            } else {
                Route::CompositePpfAct
            };
            return Ok(CanonicityVerdict::established(via));
        }
        blocking.extend(blockers);
    }
    Ok(CanonicityVerdict::blocked(blocking))
}

/// Every carrier that is a canonical copy of `reference`.
pub fn canonical_copies_of(g: &Graph, reference: &str) -> Result<BTreeSet<EntityId>> {
    require_carrier(g, reference)?;
    let outputs: BTreeSet<&EntityId> = g
        .acts()
        .filter(|a| {
            a.is_copying()
                && a.reference
                    .as_ref()
                    .is_some_and(|r| r.as_str() == reference)
                && g.carrier(a.output.as_str()).is_some()
        })
        .map(|a| &a.output)
        .collect();
    let mut out = BTreeSet::new();
    for x in outputs {
        if is_canonical_copy(g, x.as_str(), reference)?.holds {
            out.insert(x.clone());
        }
    }
    Ok(out)
}

/// Whether `member` is a canonical member of the aggregate rooted at
/// `root`.
pub fn is_canonical_member(
    g: &Graph,
    member: &str,
    root: &str,
    config: &CanonicityConfig,
) -> Result<CanonicityVerdict> {
    let index = LineageIndex::new(g);
    is_canonical_member_in(&index, member, root, config)
}

pub(crate) fn is_canonical_member_in(
    index: &LineageIndex<'_>,
    member: &str,
    root: &str,
    config: &CanonicityConfig,
) -> Result<CanonicityVerdict> {
    let g = index.graph();
    let member_id = require_carrier(g, member)?;
    let root_id = require_carrier(g, root)?;
    let in_aggregate =
        index.is_root(root) && (member == root || index.descendants(root)?.contains(member));
    if !in_aggregate {
        return Err(Error::NotAMember {
            member: member_id.clone(),
            root: root_id.clone(),
        });
    }
    if member == root {
        return Ok(CanonicityVerdict::blocked(BTreeSet::new()));
    }

    let direct = is_canonical_copy(g, member, root)?;
    if direct.holds || !config.chain_rule {
        return Ok(direct);
    }

    let mut blocking = direct.blocking;
    let mut chain_holds = true;
    let mut cursor = member_id;
    while cursor != root_id {
        let Some(parent) = index
            .atomic_copy_producer(cursor.as_str())
            .and_then(|a| a.reference.as_ref())
        else {
            chain_holds = false;
            break;
        };
        let hop = is_canonical_copy(g, cursor.as_str(), parent.as_str())?;
        chain_holds &= hop.holds;
        blocking.extend(hop.blocking);
        cursor = parent;
    }
    if chain_holds {
        Ok(CanonicityVerdict::established(Route::PpfChain))
    } else {
        Ok(CanonicityVerdict::blocked(blocking))
    }
}

/// Canonical members of the aggregate rooted at `root`. The root itself is
/// the reference, not a copy, and is never included.
pub fn canonical_members(
    g: &Graph,
    root: &str,
    config: &CanonicityConfig,
) -> Result<BTreeSet<EntityId>> {
    let index = LineageIndex::new(g);
    canonical_members_in(&index, root, config)
}

pub(crate) fn canonical_members_in(
    index: &LineageIndex<'_>,
    root: &str,
    config: &CanonicityConfig,
) -> Result<BTreeSet<EntityId>> {
    let root_id = require_carrier(index.graph(), root)?;
    if !index.is_root(root) {
        return Err(Error::NotARoot(root_id.clone()));
    }
    let mut out = BTreeSet::new();
    for m in index.descendants(root)? {
        if is_canonical_member_in(index, m.as_str(), root, config)?.holds {
            out.insert(m);
        }
    }
    Ok(out)
}

/// Compares the digests of the contents carried by the reference and the
/// output of a copy act.
///
/// `Verified` needs every carried content on both sides to have a digest
/// and the two digest sets to be equal; any missing digest (or a side with
/// no content) gives `Unknown`.
pub fn verify_fidelity(g: &Graph, act: &str) -> Result<Fidelity> {
    let a = g.act(act).ok_or_else(|| unknown(act))?;
    let reference = match (&a.reference, a.is_copying()) {
        (Some(r), true) => r,
        _ => return Err(Error::NotACopyAct(a.id.clone())),
    };
    let digests = |carrier: &str| -> Result<Option<BTreeSet<&str>>> {
        let c = g.carrier(carrier).ok_or_else(|| unknown(carrier))?;
        if c.carries.is_empty() {
            return Ok(None);
        }
        Ok(c.carries
            .iter()
            .map(|content| {
                g.content(content.as_str())
                    .and_then(|ci| ci.digest.as_deref())
            })
            .collect())
    };
    Ok(
        match (digests(reference.as_str())?, digests(a.output.as_str())?) {
            (Some(r), Some(o)) if r == o => Fidelity::Verified,
            (Some(_), Some(_)) => Fidelity::Mismatch,
            _ => Fidelity::Unknown,
        },
    )
}

/// Registers a rebutting defeater on `act` when its fidelity check is a
/// mismatch. Returns the defeater id, or `None` when there is no mismatch.
pub fn register_mismatch_defeater(g: &mut Graph, act: &str) -> Result<Option<EntityId>> {
    if verify_fidelity(g, act)? != Fidelity::Mismatch {
        return Ok(None);
    }
    let id = EntityId::new(format!("{act}.fidelity-mismatch"))?;
    if let Some(existing) = g.defeater(id.as_str()) {
        if existing.target.as_str() == act {
            return Ok(Some(id));
        }
        return Err(Error::DuplicateId(id));
    }
    g.add_defeater(Defeater {
        id: id.clone(),
        target: EntityId::new(act)?,
        kind: DefeaterKind::Rebutting,
        statement: String::from("content digests of reference and output differ"),
    })?;
    Ok(Some(id))
}
