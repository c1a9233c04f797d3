use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use super::SpreadNet;
use crate::mcnet::{check_mcn_morphism, McnMorphismViolation};
use crate::net::{NetMorphism, PlaceId, TransId};
use crate::ticking::{tick, TickingDomain, VectorClock, VectorClockDomain, Word};
use crate::verdict::Verdict;

/// Word transformer used by one entry of a clock mapping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordMap {
    Identity,
    Constant(Word),
    Table(BTreeMap<Word, Word>),
    /// Apply the first map, canonicalize in the domain, apply the second.
    Then(Box<WordMap>, Arc<TickingDomain>, Box<WordMap>),
}

impl WordMap {
    pub fn apply(&self, w: &Word) -> Option<Word> {
        match self {
            WordMap::Identity => Some(w.clone()),
            WordMap::Constant(c) => Some(c.clone()),
            WordMap::Table(t) => t.get(w).cloned(),
            WordMap::Then(a, mid, b) => {
                let x = mid.canonical(&a.apply(w)?).ok()?;
                b.apply(&x)
            }
        }
    }
}

/// Target entry `i` of a clock mapping reads source entry `from` through `map`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaEntry {
    pub from: usize,
    pub map: WordMap,
}

/// A mcn-morphism paired with a mapping between vector-clock domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadMorphism {
    pub base: NetMorphism,
    pub delta: Vec<DeltaEntry>,
    source: u64,
    target: u64,
    source_vcd: Arc<VectorClockDomain>,
    target_vcd: Arc<VectorClockDomain>,
}

/// Hash of a spread net's support and clocks, used to match morphism endpoints.
pub fn fingerprint(s: &SpreadNet) -> u64 {
    let mut h = DefaultHasher::new();
    s.mc.hash(&mut h);
    s.h.hash(&mut h);
    h.finish()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("target of the first morphism is not the source of the second")]
pub struct NotComposable;

impl SpreadMorphism {
    pub fn new(
        src: &SpreadNet,
        dst: &SpreadNet,
        base: NetMorphism,
        delta: Vec<DeltaEntry>,
    ) -> Self {
        SpreadMorphism {
            base,
            delta,
            source: fingerprint(src),
            target: fingerprint(dst),
            source_vcd: Arc::new(src.vcd.clone()),
            target_vcd: Arc::new(dst.vcd.clone()),
        }
    }

    pub fn identity(s: &SpreadNet) -> Self {
        let delta = (0..s.vcd.dimension())
            .map(|i| DeltaEntry {
                from: i,
                map: WordMap::Identity,
            })
            .collect();
        Self::new(s, s, NetMorphism::identity(s.mc.net()), delta)
    }

    /// δ(α), canonical in the target domain; `None` where δ is undefined.
    pub fn apply_delta(&self, alpha: &VectorClock) -> Option<VectorClock> {
        if self.delta.len() != self.target_vcd.dimension() {
            return None;
        }
        self.delta
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let w = e.map.apply(alpha.0.get(e.from)?)?;
                self.target_vcd.canonical_entry(i, &w).ok()
            })
            .collect::<Option<Vec<_>>>()
            .map(VectorClock)
    }
}

fn compose_maps(
    first: &WordMap,
    mid: &TickingDomain,
    src: &TickingDomain,
    second: &WordMap,
) -> WordMap {
    match (first, second) {
        (_, WordMap::Identity) => first.clone(),
        (_, WordMap::Constant(c)) => WordMap::Constant(c.clone()),
        (WordMap::Identity, _) if src == mid => second.clone(),
        (WordMap::Constant(c), _) => match mid.canonical(c).ok().and_then(|x| second.apply(&x)) {
            Some(w) => WordMap::Constant(w),
            None => WordMap::Table(BTreeMap::new()),
        },
        _ => WordMap::Then(
            Box::new(first.clone()),
            Arc::new(mid.clone()),
            Box::new(second.clone()),
        ),
    }
}

/// `f` followed by `g`.
pub fn compose_spread_morphisms(
    f: &SpreadMorphism,
    g: &SpreadMorphism,
) -> Result<SpreadMorphism, NotComposable> {
    if f.target != g.source {
        return Err(NotComposable);
    }
    let delta = g
        .delta
        .iter()
        .map(|e2| {
            let e1 = f.delta.get(e2.from).ok_or(NotComposable)?;
            let mid = f.target_vcd.domains().get(e2.from).ok_or(NotComposable)?;
            let src = f.source_vcd.domains().get(e1.from).ok_or(NotComposable)?;
            Ok(DeltaEntry {
                from: e1.from,
                map: compose_maps(&e1.map, mid, src, &e2.map),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(SpreadMorphism {
        base: f.base.then(&g.base),
        delta,
        source: f.source,
        target: g.target,
        source_vcd: f.source_vcd.clone(),
        target_vcd: g.target_vcd.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpreadMorphismViolation {
    Endpoint(&'static str),
    Mcn(McnMorphismViolation),
    DeltaShape(String),
    NotClassRespecting {
        component: usize,
        u: Word,
        v: Word,
    },
    Clock {
        source: PlaceId,
        target: PlaceId,
        expected: VectorClock,
        found: Option<VectorClock>,
    },
    TauCommutation {
        transition: TransId,
        clock: VectorClock,
        component: usize,
        via_source: Option<VectorClock>,
        via_target: Option<VectorClock>,
    },
}

impl fmt::Display for SpreadMorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SpreadMorphismViolation::*;
        let opt =
            |c: &Option<VectorClock>| c.as_ref().map_or("undefined".to_owned(), |c| c.to_string());
        match self {
            Endpoint(which) => write!(f, "morphism was built for a different {which} net"),
            Mcn(v) => v.fmt(f),
            DeltaShape(s) => f.write_str(s),
            NotClassRespecting { component, u, v } => write!(
                f,
                "component {component}: `{u}` and `{v}` are equivalent but their images are not"
            ),
            Clock {
                source,
                target,
                expected,
                found,
            } => write!(
                f,
                "`{source}` ~ `{target}`: clock {} maps to {}",
                expected,
                opt(found)
            ),
            TauCommutation {
                transition,
                clock,
                component,
                via_source,
                via_target,
            } => write!(
                f,
                "`{transition}` at {clock}, component {component}: ticking then mapping gives {}, mapping then ticking gives {}",
                opt(via_source),
                opt(via_target)
            ),
        }
    }
}

/// Words on which class-respect of δ is tested in source component `i`.
fn sample_words(s: &SpreadNet, i: usize) -> BTreeSet<Word> {
    let d = s.vcd.domain(i);
    let len = d.max_word_len().unwrap_or(2).min(3);
    let mut words: BTreeSet<Word> = d.words_up_to(len).into_iter().collect();
    words.extend(s.h.values().map(|c| c.entry(i).clone()));
    words
}

/// Checks `f: src → dst` against every condition on spread morphisms.
pub fn check_spread_morphism(
    src: &SpreadNet,
    dst: &SpreadNet,
    f: &SpreadMorphism,
) -> Verdict<SpreadMorphismViolation> {
    use SpreadMorphismViolation::*;
    let mut v = Verdict::new();
    if f.source != fingerprint(src) {
        v.push(Endpoint("source"));
    }
    if f.target != fingerprint(dst) {
        v.push(Endpoint("target"));
    }
    v.extend(
        check_mcn_morphism(&src.mc, &dst.mc, &f.base)
            .violations
            .into_iter()
            .map(Mcn),
    );
    if f.delta.len() != dst.vcd.dimension() {
        v.push(DeltaShape(format!(
            "clock mapping has {} entries, target has {} components",
            f.delta.len(),
            dst.vcd.dimension()
        )));
        return v;
    }
    if let Some(e) = f.delta.iter().find(|e| e.from >= src.vcd.dimension()) {
        v.push(DeltaShape(format!(
            "clock mapping reads missing source entry {}",
            e.from
        )));
        return v;
    }
    if !v.is_valid() {
        return v;
    }

    for (i, e) in f.delta.iter().enumerate() {
        let sd = src.vcd.domain(e.from);
        let mut image_of: BTreeMap<Word, (Word, Word)> = BTreeMap::new();
        for w in sample_words(src, e.from) {
            let Ok(class) = sd.canonical(&w) else {
                continue;
            };
            let Some(img) = e
                .map
                .apply(&w)
                .and_then(|x| dst.vcd.canonical_entry(i, &x).ok())
            else {
                continue;
            };
            match image_of.get(&class) {
                Some((first, img0)) if *img0 != img => {
                    v.push(NotClassRespecting {
                        component: e.from,
                        u: first.clone(),
                        v: w.clone(),
                    });
                }
                Some(_) => {}
                None => {
                    image_of.insert(class, (w, img));
                }
            }
        }
    }

    for (p, q) in &f.base.place_rel {
        if let (Some(a), Some(b)) = (src.h.get(p), dst.h.get(q)) {
            let got = f.apply_delta(a);
            if got.as_ref() != Some(b) {
                v.push(Clock {
                    source: p.clone(),
                    target: q.clone(),
                    expected: b.clone(),
                    found: got,
                });
            }
        }
    }

    let clocks: BTreeSet<&VectorClock> = src.h.values().collect();
    for (t, t2) in &f.base.trans_map {
        let label = src.mc.net().transition_label(t.as_str()).unwrap();
        let label2 = dst.mc.net().transition_label(t2.as_str()).unwrap();
        for i in 0..src.mc.dimension() {
            if !src.mc.component_transitions(i).contains(t) {
                continue;
            }
            let q = &src.mc.components()[i];
            let Some(i2) = f
                .base
                .place_rel
                .iter()
                .filter(|(p, _)| p == q)
                .find_map(|(_, q2)| dst.mc.component_index(q2.as_str()))
            else {
                continue;
            };
            if !dst.mc.component_transitions(i2).contains(t2) {
                continue;
            }
            for alpha in &clocks {
                let Ok(ticked) = tick(&src.taus[i], &src.vcd, alpha, t, label) else {
                    continue;
                };
                let via_source = f.apply_delta(&ticked);
                let via_target = f
                    .apply_delta(alpha)
                    .and_then(|beta| tick(&dst.taus[i2], &dst.vcd, &beta, t2, label2).ok());
                if via_source.is_none() || via_source != via_target {
                    v.push(TauCommutation {
                        transition: t.clone(),
                        clock: (*alpha).clone(),
                        component: i,
                        via_source,
                        via_target,
                    });
                }
            }
        }
    }
    v
}
