//! Multi-release view: per-method event chains, update-count histograms,
//! late documentation updates and the modifier transition graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ApiSnapshot, MethodIdentity};
use crate::semdiff::{comments_equal, detect_sems, diff_modifiers, SemEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    SilentBodyChange,
    CommentChange,
    ModifierChange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEvent {
    /// Index of the adjacent pair (snapshot `pair` to `pair + 1`).
    pub pair: usize,
    pub old_version: String,
    pub new_version: String,
    pub kinds: BTreeSet<EventKind>,
}

impl ChainEvent {
    pub fn has(&self, kind: EventKind) -> bool {
        self.kinds.contains(&kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionChain {
    pub identity: MethodIdentity,
    pub events: Vec<ChainEvent>,
    pub silent_update_count: usize,
    pub late_doc_update: bool,
    /// The method is missing from a release between its first and last
    /// appearance; each contiguous stretch forms its own chain.
    pub gapped: bool,
    /// Access of the most recent silent change was public.
    pub latest_is_pasem: bool,
}

/// SEMs of every adjacent snapshot pair, in release order.
pub fn detect_adjacent(snapshots: &[ApiSnapshot], strict: bool) -> Result<Vec<Vec<SemEntry>>> {
    if snapshots.len() < 2 {
        return Err(Error::TooFewSnapshots(snapshots.len()));
    }
    snapshots
        .par_windows(2)
        .map(|w| detect_sems(&w[0], &w[1], strict))
        .collect()
}

pub fn build_chains(snapshots: &[ApiSnapshot], strict: bool) -> Result<Vec<EvolutionChain>> {
    let pairs = detect_adjacent(snapshots, strict)?;
    Ok(assemble_chains(snapshots, &pairs, strict))
}

/// Folds per-pair SEM results into chains. `pairs[k]` must hold the SEMs
/// between `snapshots[k]` and `snapshots[k + 1]`.
pub fn assemble_chains(
    snapshots: &[ApiSnapshot],
    pairs: &[Vec<SemEntry>],
    strict: bool,
) -> Vec<EvolutionChain> {
    let per_pair: Vec<HashMap<&MethodIdentity, bool>> = pairs
        .iter()
        .map(|entries| entries.iter().map(|e| (&e.identity, e.is_pasem)).collect())
        .collect();
    let ids: BTreeSet<&MethodIdentity> = pairs.iter().flatten().map(|e| &e.identity).collect();

    let mut chains = Vec::new();
    for id in ids {
        let present: Vec<bool> = snapshots
            .iter()
            .map(|s| s.methods.contains_key(id))
            .collect();
        let mut segments = Vec::new();
        let mut k = 0;
        while k < present.len() {
            if !present[k] {
                k += 1;
                continue;
            }
            let start = k;
            while k < present.len() && present[k] {
                k += 1;
            }
            segments.push((start, k - 1));
        }
        let gapped = segments.len() > 1;

        for (first, last) in segments {
            let mut events = Vec::new();
            let mut latest_is_pasem = false;
            for p in first..last {
                let (o, n) = (&snapshots[p].methods[id], &snapshots[p + 1].methods[id]);
                let mut kinds = BTreeSet::new();
                if let Some(&pasem) = per_pair.get(p).and_then(|m| m.get(id)) {
                    kinds.insert(EventKind::SilentBodyChange);
                    latest_is_pasem = pasem;
                }
                if !comments_equal(o, n, strict) {
                    kinds.insert(EventKind::CommentChange);
                }
                if diff_modifiers(o, n).is_some() {
                    kinds.insert(EventKind::ModifierChange);
                }
                if !kinds.is_empty() {
                    events.push(ChainEvent {
                        pair: p,
                        old_version: snapshots[p].label().to_owned(),
                        new_version: snapshots[p + 1].label().to_owned(),
                        kinds,
                    });
                }
            }
            let silent_update_count = events
                .iter()
                .filter(|e| e.has(EventKind::SilentBodyChange))
                .count();
            if silent_update_count == 0 {
                continue;
            }
            let late_doc_update = events
                .iter()
                .position(|e| e.has(EventKind::SilentBodyChange))
                .is_some_and(|first_sem| {
                    events[first_sem + 1..]
                        .iter()
                        .any(|e| e.has(EventKind::CommentChange))
                });
            chains.push(EvolutionChain {
                identity: id.clone(),
                events,
                silent_update_count,
                late_doc_update,
                gapped,
                latest_is_pasem,
            });
        }
    }
    chains
}

/// Number of identities per total silent update count. The segments of a
/// gapped identity are summed; `pasem_only` keeps identities whose most
/// recent SEM is public. Counts of zero are absent.
pub fn update_histogram(chains: &[EvolutionChain], pasem_only: bool) -> BTreeMap<usize, usize> {
    // chains of one identity are in release order, so the last one wins
    let mut per_id: BTreeMap<&MethodIdentity, (usize, bool)> = BTreeMap::new();
    for c in chains.iter().filter(|c| c.silent_update_count > 0) {
        let slot = per_id.entry(&c.identity).or_insert((0, false));
        slot.0 += c.silent_update_count;
        slot.1 = c.latest_is_pasem;
    }
    let mut hist = BTreeMap::new();
    for (count, pasem) in per_id.into_values() {
        if !pasem_only || pasem {
            *hist.entry(count).or_insert(0) += 1;
        }
    }
    hist
}

pub fn histogram_csv(hist: &BTreeMap<usize, usize>) -> String {
    let mut out = String::from("updates,methods\n");
    for (k, v) in hist {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

/// Chains whose comment was rewritten in a release after a silent change.
pub fn late_doc_updates(chains: &[EvolutionChain]) -> Vec<EvolutionChain> {
    let mut out: Vec<EvolutionChain> = chains
        .iter()
        .filter(|c| c.late_doc_update)
        .cloned()
        .collect();
    out.sort_by(|a, b| a.identity.cmp(&b.identity));
    out
}

/// Weighted directed graph of modifier-set labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitionGraph {
    pub edges: BTreeMap<(String, String), u64>,
}

impl TransitionGraph {
    pub fn nodes(&self) -> BTreeSet<&str> {
        self.edges
            .keys()
            .flat_map(|(a, b)| [a.as_str(), b.as_str()])
            .collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn weight(&self, src: &str, dst: &str) -> u64 {
        self.edges
            .get(&(src.to_owned(), dst.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    /// Edges sorted by weight descending, then source and destination.
    pub fn sorted_edges(&self) -> Vec<(&str, &str, u64)> {
        let mut edges: Vec<(&str, &str, u64)> = self
            .edges
            .iter()
            .map(|((a, b), w)| (a.as_str(), b.as_str(), *w))
            .collect();
        edges.sort_by(|x, y| y.2.cmp(&x.2).then(x.0.cmp(y.0)).then(x.1.cmp(y.1)));
        edges
    }

    /// `src,dst,weight` edge list.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["src", "dst", "weight"])?;
        for (a, b, weight) in self.sorted_edges() {
            w.write_record([a, b, &weight.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "transitions.csv".into(),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn transition_graph(entries: &[SemEntry]) -> TransitionGraph {
    let mut graph = TransitionGraph::default();
    for t in entries
        .iter()
        .filter_map(|e| e.modifier_transition.as_ref())
    {
        let (src, dst) = (t.old_label(), t.new_label());
        if src != dst {
            *graph.edges.entry((src, dst)).or_insert(0) += 1;
        }
    }
    graph
}
