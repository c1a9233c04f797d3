//! Safe labeled Petri nets and the token game.
//!
//! Markings are sets: every net handled here is expected to be 1-safe, and
//! the firing rule reports [`FireError::UnsafeFiring`] instead of counting
//! tokens when that assumption breaks.

mod morphism;

pub use morphism::{
    check_net_morphism, morphism_preserves_markings, LabelMap, MorphismViolation, NetMorphism,
    StepWitness,
};

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

string_id!(
    /// Identifier of a place.
    PlaceId
);
string_id!(
    /// Identifier of a transition.
    TransId
);
string_id!(
    /// An opaque label. Ordinary nets label every node with its own id.
    Label
);

/// A marking of a safe net.
pub type Marking = BTreeSet<PlaceId>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub label: Label,
    pub pre: BTreeSet<PlaceId>,
    pub post: BTreeSet<PlaceId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetError {
    #[error("id `{0}` is used more than once")]
    DuplicateId(String),
    #[error("transition `{0}` has an empty preset")]
    EmptyPreset(TransId),
    #[error("transition `{0}` has an empty postset")]
    EmptyPostset(TransId),
    #[error("transition `{transition}` refers to unknown place `{place}`")]
    UnknownPlace { transition: TransId, place: PlaceId },
    #[error("initial marking refers to unknown place `{0}`")]
    UnknownInitialPlace(PlaceId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FireError {
    #[error("unknown transition `{0}`")]
    UnknownTransition(TransId),
    #[error("transition `{0}` is not enabled")]
    NotEnabled(TransId),
    #[error("firing `{transition}` puts a second token on `{place}`")]
    UnsafeFiring { transition: TransId, place: PlaceId },
}

/// A labeled Petri net with set-valued initial marking.
///
/// The flow relation is stored per transition as preset and postset; the
/// place-side views are derived on demand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Net {
    places: BTreeMap<PlaceId, Label>,
    transitions: BTreeMap<TransId, Transition>,
    initial: Marking,
}

impl Net {
    /// Builds a net, checking the structural invariants: disjoint and unique
    /// ids, non-empty presets and postsets, and flow/marking restricted to
    /// known places.
    pub fn new(
        places: BTreeMap<PlaceId, Label>,
        transitions: BTreeMap<TransId, Transition>,
        initial: Marking,
    ) -> Result<Self, NetError> {
        for t in transitions.keys() {
            if places.contains_key(t.as_str()) {
                return Err(NetError::DuplicateId(t.0.clone()));
            }
        }
        for (id, t) in &transitions {
            if t.pre.is_empty() {
                return Err(NetError::EmptyPreset(id.clone()));
            }
            if t.post.is_empty() {
                return Err(NetError::EmptyPostset(id.clone()));
            }
            if let Some(p) = t
                .pre
                .iter()
                .chain(&t.post)
                .find(|p| !places.contains_key(*p))
            {
                return Err(NetError::UnknownPlace {
                    transition: id.clone(),
                    place: p.clone(),
                });
            }
        }
        if let Some(p) = initial.iter().find(|p| !places.contains_key(*p)) {
            return Err(NetError::UnknownInitialPlace(p.clone()));
        }
        Ok(Net {
            places,
            transitions,
            initial,
        })
    }

    pub fn places(&self) -> impl Iterator<Item = &PlaceId> {
        self.places.keys()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&TransId, &Transition)> {
        self.transitions.iter()
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = &TransId> {
        self.transitions.keys()
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn has_place(&self, p: &str) -> bool {
        self.places.contains_key(p)
    }

    pub fn has_transition(&self, t: &str) -> bool {
        self.transitions.contains_key(t)
    }

    pub fn transition(&self, t: &str) -> Option<&Transition> {
        self.transitions.get(t)
    }

    pub fn place_label(&self, p: &str) -> Option<&Label> {
        self.places.get(p)
    }

    pub fn transition_label(&self, t: &str) -> Option<&Label> {
        self.transitions.get(t).map(|t| &t.label)
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    pub fn pre(&self, t: &str) -> Option<&BTreeSet<PlaceId>> {
        self.transitions.get(t).map(|t| &t.pre)
    }

    pub fn post(&self, t: &str) -> Option<&BTreeSet<PlaceId>> {
        self.transitions.get(t).map(|t| &t.post)
    }

    /// Transitions that put a token on `p`.
    pub fn producers(&self, p: &str) -> BTreeSet<TransId> {
        self.transitions
            .iter()
            .filter(|(_, t)| t.post.contains(p))
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Transitions that consume a token from `p`.
    pub fn consumers(&self, p: &str) -> BTreeSet<TransId> {
        self.transitions
            .iter()
            .filter(|(_, t)| t.pre.contains(p))
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Number of arcs in the flow relation.
    pub fn flow_size(&self) -> usize {
        self.transitions
            .values()
            .map(|t| t.pre.len() + t.post.len())
            .sum()
    }

    /// All arcs, place-to-transition arcs first, both in id order.
    pub fn flow(&self) -> Vec<(String, String)> {
        let mut arcs = Vec::with_capacity(self.flow_size());
        for (id, t) in &self.transitions {
            for p in &t.pre {
                arcs.push((p.0.clone(), id.0.clone()));
            }
        }
        for (id, t) in &self.transitions {
            for p in &t.post {
                arcs.push((id.0.clone(), p.0.clone()));
            }
        }
        arcs
    }

    /// `true` when no two transitions carry the same label.
    pub fn transition_labels_injective(&self) -> bool {
        let labels: BTreeSet<&Label> = self.transitions.values().map(|t| &t.label).collect();
        labels.len() == self.transitions.len()
    }

    pub fn enabled(&self, m: &Marking) -> BTreeSet<TransId> {
        self.transitions
            .iter()
            .filter(|(_, t)| t.pre.is_subset(m))
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Fires `t` at `m`, returning `m - pre(t) + post(t)`.
    pub fn fire(&self, m: &Marking, t: &str) -> Result<Marking, FireError> {
        let tr = self
            .transitions
            .get(t)
            .ok_or_else(|| FireError::UnknownTransition(TransId::from(t)))?;
        if !tr.pre.is_subset(m) {
            return Err(FireError::NotEnabled(TransId::from(t)));
        }
        let mut next: Marking = m.difference(&tr.pre).cloned().collect();
        for p in &tr.post {
            if !next.insert(p.clone()) {
                return Err(FireError::UnsafeFiring {
                    transition: TransId::from(t),
                    place: p.clone(),
                });
            }
        }
        Ok(next)
    }

    /// Fires a whole sequence from the initial marking.
    pub fn run<'a>(
        &self,
        steps: impl IntoIterator<Item = &'a str>,
    ) -> Result<FiringSequence, FireError> {
        let mut seq = FiringSequence {
            steps: Vec::new(),
            markings: vec![self.initial.clone()],
        };
        for t in steps {
            let next = self.fire(seq.last_marking(), t)?;
            seq.steps.push(TransId::from(t));
            seq.markings.push(next);
        }
        Ok(seq)
    }

    /// Breadth-first closure of the initial marking under firing, exploring
    /// firing sequences of length at most `bound`.
    pub fn reachable_markings(&self, bound: usize) -> Result<Reachability, UnsafeNet> {
        let mut seen: BTreeSet<Marking> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.initial.clone());
        queue.push_back((self.initial.clone(), 0usize));
        let mut saturated = true;
        while let Some((m, depth)) = queue.pop_front() {
            for t in self.enabled(&m) {
                let next = self.fire(&m, t.as_str()).map_err(|e| match e {
                    FireError::UnsafeFiring { transition, place } => UnsafeNet {
                        marking: m.clone(),
                        transition,
                        place,
                    },
                    other => unreachable!("enabled transition failed to fire: {other}"),
                })?;
                if seen.contains(&next) {
                    continue;
                }
                if depth == bound {
                    saturated = false;
                    continue;
                }
                seen.insert(next.clone());
                queue.push_back((next, depth + 1));
            }
        }
        Ok(Reachability {
            markings: seen,
            saturated,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("net is not safe: firing `{transition}` at {marking:?} doubles the token on `{place}`")]
pub struct UnsafeNet {
    pub marking: Marking,
    pub transition: TransId,
    pub place: PlaceId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    pub markings: BTreeSet<Marking>,
    /// `false` when some marking beyond the bound was left unexplored.
    pub saturated: bool,
}

/// A firing sequence together with the markings it visits.
///
/// Configurations are represented by their sequences: the reached marking is
/// read off the last entry rather than recomputed from the multiset of steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiringSequence {
    pub steps: Vec<TransId>,
    pub markings: Vec<Marking>,
}

impl FiringSequence {
    pub fn last_marking(&self) -> &Marking {
        self.markings
            .last()
            .expect("a firing sequence has at least one marking")
    }

    /// The configuration of the sequence: how often each transition fired.
    pub fn configuration(&self) -> BTreeMap<TransId, usize> {
        let mut c = BTreeMap::new();
        for t in &self.steps {
            *c.entry(t.clone()).or_insert(0) += 1;
        }
        c
    }
}

/// Incremental construction of a [`Net`] from string ids.
#[derive(Default, Debug, Clone)]
pub struct NetBuilder {
    places: Vec<(String, String)>,
    transitions: Vec<(String, String, Vec<String>, Vec<String>)>,
    initial: Vec<String>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a place labeled by its own id.
    pub fn place(mut self, id: &str) -> Self {
        self.places.push((id.to_owned(), id.to_owned()));
        self
    }

    pub fn labeled_place(mut self, id: &str, label: &str) -> Self {
        self.places.push((id.to_owned(), label.to_owned()));
        self
    }

    pub fn marked_place(mut self, id: &str) -> Self {
        self.initial.push(id.to_owned());
        self.place(id)
    }

    /// Adds a transition labeled by its own id.
    pub fn transition(self, id: &str, pre: &[&str], post: &[&str]) -> Self {
        self.labeled_transition(id, id, pre, post)
    }

    pub fn labeled_transition(
        mut self,
        id: &str,
        label: &str,
        pre: &[&str],
        post: &[&str],
    ) -> Self {
        self.transitions.push((
            id.to_owned(),
            label.to_owned(),
            pre.iter().map(|s| s.to_string()).collect(),
            post.iter().map(|s| s.to_string()).collect(),
        ));
        self
    }

    pub fn initial(mut self, id: &str) -> Self {
        self.initial.push(id.to_owned());
        self
    }

    pub fn build(self) -> Result<Net, NetError> {
        let mut places = BTreeMap::new();
        for (id, label) in self.places {
            if places.insert(PlaceId(id.clone()), Label(label)).is_some() {
                return Err(NetError::DuplicateId(id));
            }
        }
        let mut transitions = BTreeMap::new();
        for (id, label, pre, post) in self.transitions {
            let t = Transition {
                label: Label(label),
                pre: pre.into_iter().map(PlaceId).collect(),
                post: post.into_iter().map(PlaceId).collect(),
            };
            if transitions.insert(TransId(id.clone()), t).is_some() {
                return Err(NetError::DuplicateId(id));
            }
        }
        let initial = self.initial.into_iter().map(PlaceId).collect();
        Net::new(places, transitions, initial)
    }
}

/// Collects string ids into a marking.
pub fn marking<'a>(ids: impl IntoIterator<Item = &'a str>) -> Marking {
    ids.into_iter().map(PlaceId::from).collect()
}
