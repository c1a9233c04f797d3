//! Morphisms between safe nets: a partial map on transitions, a relation on
//! places, and a map on labels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::{FireError, Label, Marking, Net, PlaceId, TransId};
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LabelMap {
    Identity,
    Table(BTreeMap<Label, Label>),
}

impl LabelMap {
    pub fn apply(&self, l: &Label) -> Option<Label> {
        match self {
            LabelMap::Identity => Some(l.clone()),
            LabelMap::Table(t) => t.get(l).cloned(),
        }
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &LabelMap) -> LabelMap {
        match (self, then) {
            (LabelMap::Identity, other) => other.clone(),
            (first, LabelMap::Identity) => first.clone(),
            (LabelMap::Table(a), LabelMap::Table(b)) => LabelMap::Table(
                a.iter()
                    .filter_map(|(k, v)| b.get(v).map(|w| (k.clone(), w.clone())))
                    .collect(),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetMorphism {
    /// Partial map on transitions.
    pub trans_map: BTreeMap<TransId, TransId>,
    /// Relation between source and target places.
    pub place_rel: BTreeSet<(PlaceId, PlaceId)>,
    pub label_map: LabelMap,
}

impl NetMorphism {
    pub fn identity(net: &Net) -> Self {
        NetMorphism {
            trans_map: net
                .transition_ids()
                .map(|t| (t.clone(), t.clone()))
                .collect(),
            place_rel: net.places().map(|p| (p.clone(), p.clone())).collect(),
            label_map: LabelMap::Identity,
        }
    }

    /// Image of a set of source places under the place relation.
    pub fn image(&self, m: &Marking) -> Marking {
        self.place_rel
            .iter()
            .filter(|(p, _)| m.contains(p))
            .map(|(_, q)| q.clone())
            .collect()
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &NetMorphism) -> NetMorphism {
        let trans_map = self
            .trans_map
            .iter()
            .filter_map(|(t, u)| then.trans_map.get(u).map(|v| (t.clone(), v.clone())))
            .collect();
        let mut place_rel = BTreeSet::new();
        for (p, q) in &self.place_rel {
            for (q2, r) in &then.place_rel {
                if q == q2 {
                    place_rel.insert((p.clone(), r.clone()));
                }
            }
        }
        NetMorphism {
            trans_map,
            place_rel,
            label_map: self.label_map.then(&then.label_map),
        }
    }

    fn related_to<'a>(&'a self, target: &'a PlaceId) -> impl Iterator<Item = &'a PlaceId> + 'a {
        self.place_rel
            .iter()
            .filter(move |(_, q)| q == target)
            .map(|(p, _)| p)
    }

    fn images_of<'a>(&'a self, source: &'a PlaceId) -> impl Iterator<Item = &'a PlaceId> + 'a {
        self.place_rel
            .iter()
            .filter(move |(p, _)| p == source)
            .map(|(_, q)| q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Pre,
    Post,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Pre => "preset",
            Side::Post => "postset",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    UnknownTransition(TransId),
    UnknownPlace(PlaceId),
    /// A target initial place is related to zero or several source initial places.
    InitialPlace {
        target: PlaceId,
        sources: Vec<PlaceId>,
    },
    /// `p φ p'` but some transition around `p` is not sent around `p'`.
    PlaceNeighbourhood {
        source: PlaceId,
        target: PlaceId,
        side: Side,
        transition: TransId,
    },
    /// `φ(t) = t'` but a place around `t'` has no unique counterpart around `t`.
    TransitionNeighbourhood {
        transition: TransId,
        image: TransId,
        side: Side,
        place: PlaceId,
        related: Vec<PlaceId>,
    },
    LabelMismatch {
        node: String,
        expected: Option<Label>,
        found: Label,
    },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MorphismViolation::*;
        match self {
            UnknownTransition(t) => write!(f, "unknown transition `{t}`"),
            UnknownPlace(p) => write!(f, "unknown place `{p}`"),
            InitialPlace { target, sources } => write!(
                f,
                "initial place `{target}` is related to {} initial source places {sources:?}",
                sources.len()
            ),
            PlaceNeighbourhood {
                source,
                target,
                side,
                transition,
            } => write!(
                f,
                "`{source}` ~ `{target}`: `{transition}` in the {side} of `{source}` is not mapped into the {side} of `{target}`"
            ),
            TransitionNeighbourhood {
                transition,
                image,
                side,
                place,
                related,
            } => write!(
                f,
                "`{transition}` -> `{image}`: `{place}` in the {side} of `{image}` has {} counterparts {related:?} in the {side} of `{transition}`",
                related.len()
            ),
            LabelMismatch {
                node,
                expected,
                found,
            } => match expected {
                Some(e) => write!(f, "label of image of `{node}` is `{found}`, expected `{e}`"),
                None => write!(f, "label map undefined for the label of `{node}` (image labeled `{found}`)"),
            },
        }
    }
}

/// Checks every condition a morphism between safe nets must satisfy.
pub fn check_net_morphism(src: &Net, dst: &Net, f: &NetMorphism) -> Verdict<MorphismViolation> {
    use MorphismViolation::*;
    let mut v = Verdict::new();

    for (t, u) in &f.trans_map {
        if !src.has_transition(t.as_str()) {
            v.push(UnknownTransition(t.clone()));
        }
        if !dst.has_transition(u.as_str()) {
            v.push(UnknownTransition(u.clone()));
        }
    }
    for (p, q) in &f.place_rel {
        if !src.has_place(p.as_str()) {
            v.push(UnknownPlace(p.clone()));
        }
        if !dst.has_place(q.as_str()) {
            v.push(UnknownPlace(q.clone()));
        }
    }
    if !v.is_valid() {
        return v;
    }

    for q in dst.initial_marking() {
        let sources: Vec<PlaceId> = f
            .related_to(q)
            .filter(|p| src.initial_marking().contains(*p))
            .cloned()
            .collect();
        if sources.len() != 1 {
            v.push(InitialPlace {
                target: q.clone(),
                sources,
            });
        }
    }

    for (p, q) in &f.place_rel {
        for (side, around_p, around_q) in [
            (
                Side::Pre,
                src.producers(p.as_str()),
                dst.producers(q.as_str()),
            ),
            (
                Side::Post,
                src.consumers(p.as_str()),
                dst.consumers(q.as_str()),
            ),
        ] {
            for t in around_p {
                let ok = f.trans_map.get(&t).is_some_and(|u| around_q.contains(u));
                if !ok {
                    v.push(PlaceNeighbourhood {
                        source: p.clone(),
                        target: q.clone(),
                        side,
                        transition: t,
                    });
                }
            }
        }
    }

    for (t, u) in &f.trans_map {
        let (st, dt) = (
            src.transition(t.as_str()).unwrap(),
            dst.transition(u.as_str()).unwrap(),
        );
        for (side, src_side, dst_side) in [
            (Side::Pre, &st.pre, &dt.pre),
            (Side::Post, &st.post, &dt.post),
        ] {
            for q in dst_side {
                let related: Vec<PlaceId> = f
                    .related_to(q)
                    .filter(|p| src_side.contains(*p))
                    .cloned()
                    .collect();
                if related.len() != 1 {
                    v.push(TransitionNeighbourhood {
                        transition: t.clone(),
                        image: u.clone(),
                        side,
                        place: q.clone(),
                        related,
                    });
                }
            }
        }
        let expected = f.label_map.apply(&st.label);
        if expected.as_ref() != Some(&dt.label) {
            v.push(LabelMismatch {
                node: t.0.clone(),
                expected,
                found: dt.label.clone(),
            });
        }
    }

    for (p, q) in &f.place_rel {
        let expected = f.label_map.apply(src.place_label(p.as_str()).unwrap());
        let found = dst.place_label(q.as_str()).unwrap();
        if expected.as_ref() != Some(found) {
            v.push(LabelMismatch {
                node: p.0.clone(),
                expected,
                found: found.clone(),
            });
        }
    }
    v
}

/// A source step `m -t-> m'` whose image is not a step of the target net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepWitness {
    pub marking: Marking,
    pub transition: TransId,
    pub image_marking: Marking,
    pub image_transition: TransId,
    pub reason: String,
}

impl fmt::Display for StepWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} -{}-> maps to {:?} -{}->: {}",
            self.marking, self.transition, self.image_marking, self.image_transition, self.reason
        )
    }
}

/// Replays every step reachable in `src` within `bound` through `f` and
/// returns the steps whose images are not steps of `dst`. Steps with an
/// undefined transition image are skipped.
pub fn morphism_preserves_markings(
    src: &Net,
    dst: &Net,
    f: &NetMorphism,
    bound: usize,
) -> Vec<StepWitness> {
    let mut witnesses = Vec::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(src.initial_marking().clone());
    queue.push_back((src.initial_marking().clone(), 0usize));
    while let Some((m, depth)) = queue.pop_front() {
        if depth == bound {
            continue;
        }
        for t in src.enabled(&m) {
            let next = match src.fire(&m, t.as_str()) {
                Ok(n) => n,
                Err(FireError::UnsafeFiring { .. }) => continue,
                Err(e) => unreachable!("{e}"),
            };
            if let Some(u) = f.trans_map.get(&t) {
                let (im, inext) = (f.image(&m), f.image(&next));
                let reason = match dst.fire(&im, u.as_str()) {
                    Ok(got) if got == inext => None,
                    Ok(got) => Some(format!("target reaches {got:?} instead of {inext:?}")),
                    Err(e) => Some(e.to_string()),
                };
                if let Some(reason) = reason {
                    witnesses.push(StepWitness {
                        marking: m.clone(),
                        transition: t.clone(),
                        image_marking: im,
                        image_transition: u.clone(),
                        reason,
                    });
                }
            }
            if seen.insert(next.clone()) {
                queue.push_back((next, depth + 1));
            }
        }
    }
    witnesses
}

impl NetMorphism {
    /// All target places related to `p`.
    pub fn place_images(&self, p: &PlaceId) -> Vec<PlaceId> {
        self.images_of(p).cloned().collect()
    }
}
