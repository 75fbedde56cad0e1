//! Cycle detection over small id graphs (iterative Kosaraju, no recursion).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

/// Strongly connected components that contain a cycle: more than one node,
/// or a single node with a self loop. Members are sorted, components are
/// ordered by their first member.
pub(crate) fn cyclic_components<'a, N, I>(edges: I) -> Vec<Vec<&'a N>>
where
    N: Ord + ?Sized + 'a,
    I: IntoIterator<Item = (&'a N, &'a N)>,
{
    let mut index: BTreeMap<&N, usize> = BTreeMap::new();
    let mut pairs = Vec::new();
    for (a, b) in edges {
        pairs.push((a, b));
        let n = index.len();
        index.entry(a).or_insert(n);
        let n = index.len();
        index.entry(b).or_insert(n);
    }
    let mut slots: Vec<Option<&N>> = vec![None; index.len()];
    for (n, i) in &index {
        slots[*i] = Some(*n);
    }
    let nodes: Vec<&N> = slots.into_iter().flatten().collect();
    let count = nodes.len();
    let mut fwd: Vec<Vec<usize>> = vec![Vec::new(); count];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); count];
    let mut self_loop = vec![false; count];
    for (a, b) in &pairs {
        let (ia, ib) = (index[a], index[b]);
        if ia == ib {
            self_loop[ia] = true;
        }
        fwd[ia].push(ib);
        rev[ib].push(ia);
    }

    // First pass: finishing order on the forward graph.
    let mut visited = vec![false; count];
    let mut order = Vec::with_capacity(count);
    for start in 0..count {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut stack = vec![(start, 0usize)];
        while let Some((node, next)) = stack.last_mut() {
            if let Some(&succ) = fwd[*node].get(*next) {
                *next += 1;
                if !visited[succ] {
                    visited[succ] = true;
                    stack.push((succ, 0));
                }
            } else {
                order.push(*node);
                stack.pop();
            }
        }
    }

    // Second pass: components on the reversed graph.
    let mut component = vec![usize::MAX; count];
    let mut found: Vec<Vec<usize>> = Vec::new();
    for &start in order.iter().rev() {
        if component[start] != usize::MAX {
            continue;
        }
        let id = found.len();
        let mut members = Vec::new();
        let mut stack = vec![start];
        component[start] = id;
        while let Some(node) = stack.pop() {
            members.push(node);
            for &pred in &rev[node] {
                if component[pred] == usize::MAX {
                    component[pred] = id;
                    stack.push(pred);
                }
            }
        }
        found.push(members);
    }

    let mut cyclic: Vec<Vec<&N>> = found
        .into_iter()
        .filter(|m| m.len() > 1 || self_loop[m[0]])
        .map(|m| {
            let set: BTreeSet<&N> = m.into_iter().map(|i| nodes[i]).collect();
            set.into_iter().collect()
        })
        .collect();
    cyclic.sort();
    cyclic
}
