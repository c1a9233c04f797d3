//! Spread nets, the spreading algorithm, folding and spread morphisms.

mod algorithm;
mod folding;
mod morphism;

pub use algorithm::{spread, Bounds, SpreadError, Spreading};
pub use folding::{check_folding, FoldingMorphism, FoldingViolation};
pub use morphism::{
    check_spread_morphism, compose_spread_morphisms, fingerprint, DeltaEntry, NotComposable,
    SpreadMorphism, SpreadMorphismViolation, WordMap,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::mcnet::McNet;
use crate::net::{Label, PlaceId, TransId};
use crate::ticking::{
    op_mix, tick, TickError, TickKind, TickingDomain, TickingMap, VectorClock, VectorClockDomain,
    Word,
};
use crate::verdict::Verdict;

/// An mc-net over a vector-clock domain with its information map `h` and
/// one ticking map per component.
///
/// Node labels of the underlying net name the nodes of the original net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadNet {
    pub mc: McNet,
    pub vcd: VectorClockDomain,
    pub h: BTreeMap<PlaceId, VectorClock>,
    pub taus: Vec<TickingMap>,
}

impl SpreadNet {
    pub fn clock(&self, p: &str) -> Option<&VectorClock> {
        self.h.get(p)
    }

    pub fn place_label(&self, p: &str) -> Option<&Label> {
        self.mc.net().place_label(p)
    }

    /// Places keyed by (label, clock).
    pub fn place_by_label_clock(&self, label: &str, clock: &VectorClock) -> Option<&PlaceId> {
        self.h
            .iter()
            .find(|(p, c)| {
                *c == clock && self.place_label(p.as_str()).map(Label::as_str) == Some(label)
            })
            .map(|(p, _)| p)
    }

    /// The clock of `t`'s postset place `p` as the third axiom prescribes.
    pub fn expected_clock(&self, t: &TransId, p: &PlaceId) -> Result<VectorClock, TickError> {
        let net = self.mc.net();
        let tr = net.transition(t.as_str()).expect("known transition");
        let mut gamma = BTreeMap::new();
        for q in &tr.pre {
            let i = self
                .mc
                .component_of(q.as_str())
                .expect("place has a component");
            gamma.insert(i, self.h.get(q).cloned().unwrap_or_else(|| self.vcd.eps()));
        }
        let j: BTreeSet<usize> = gamma.keys().copied().collect();
        let k = self
            .mc
            .component_of(p.as_str())
            .expect("place has a component");
        let alpha = op_mix(&self.vcd, &gamma, &j, k)?;
        let tau = self.taus.get(k).ok_or(TickError::NoSuchComponent(k))?;
        tick(tau, &self.vcd, &alpha, t, &tr.label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpreadViolation {
    DimensionMismatch {
        net: usize,
        domain: usize,
        taus: usize,
    },
    MissingClock(PlaceId),
    BadClock {
        place: PlaceId,
        error: TickError,
    },
    NotCanonical {
        place: PlaceId,
        clock: VectorClock,
    },
    InitialNotEps {
        place: PlaceId,
        clock: VectorClock,
    },
    SameLabelAndClock {
        first: PlaceId,
        second: PlaceId,
    },
    Tick {
        transition: TransId,
        place: PlaceId,
        expected: VectorClock,
        found: VectorClock,
    },
    TickFailed {
        transition: TransId,
        place: PlaceId,
        error: TickError,
    },
}

impl fmt::Display for SpreadViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SpreadViolation::*;
        match self {
            DimensionMismatch { net, domain, taus } => write!(
                f,
                "net has {net} components, domain {domain}, ticking maps {taus}"
            ),
            MissingClock(p) => write!(f, "place `{p}` has no clock"),
            BadClock { place, error } => write!(f, "clock of `{place}`: {error}"),
            NotCanonical { place, clock } => {
                write!(f, "clock {clock} of `{place}` is not canonical")
            }
            InitialNotEps { place, clock } => {
                write!(f, "initial place `{place}` has clock {clock}")
            }
            SameLabelAndClock { first, second } => {
                write!(f, "places `{first}` and `{second}` share label and clock")
            }
            Tick {
                transition,
                place,
                expected,
                found,
            } => write!(
                f,
                "`{transition}` should give `{place}` the clock {expected}, found {found}"
            ),
            TickFailed {
                transition,
                place,
                error,
            } => {
                write!(f, "cannot tick `{transition}` into `{place}`: {error}")
            }
        }
    }
}

/// Checks the three spread axioms over every place and transition.
pub fn validate_spread(s: &SpreadNet) -> Verdict<SpreadViolation> {
    use SpreadViolation::*;
    let mut v = Verdict::new();
    let (dim, net) = (s.mc.dimension(), s.mc.net());
    if s.vcd.dimension() != dim || s.taus.len() != dim {
        v.push(DimensionMismatch {
            net: dim,
            domain: s.vcd.dimension(),
            taus: s.taus.len(),
        });
        return v;
    }

    for p in net.places() {
        match s.h.get(p) {
            None => v.push(MissingClock(p.clone())),
            Some(c) => match s.vcd.canonical(c) {
                Err(error) => v.push(BadClock {
                    place: p.clone(),
                    error,
                }),
                Ok(canon) if &canon != c => v.push(NotCanonical {
                    place: p.clone(),
                    clock: c.clone(),
                }),
                Ok(_) => {}
            },
        }
    }

    for p in net.initial_marking() {
        if let Some(c) = s.h.get(p) {
            if !c.is_eps() {
                v.push(InitialNotEps {
                    place: p.clone(),
                    clock: c.clone(),
                });
            }
        }
    }

    let mut seen: BTreeMap<(&Label, &VectorClock), &PlaceId> = BTreeMap::new();
    for p in net.places() {
        if let Some(c) = s.h.get(p) {
            let l = net.place_label(p.as_str()).unwrap();
            if let Some(first) = seen.insert((l, c), p) {
                v.push(SameLabelAndClock {
                    first: first.clone(),
                    second: p.clone(),
                });
            }
        }
    }

    for (t, tr) in net.transitions() {
        for p in &tr.post {
            let Some(found) = s.h.get(p) else { continue };
            match s.expected_clock(t, p) {
                Ok(expected) if &expected == found => {}
                Ok(expected) => v.push(Tick {
                    transition: t.clone(),
                    place: p.clone(),
                    expected,
                    found: found.clone(),
                }),
                Err(error) => v.push(TickFailed {
                    transition: t.clone(),
                    place: p.clone(),
                    error,
                }),
            }
        }
    }
    v
}

/// The domain whose every component has the single class [ε].
pub fn trivial_domain(mc: &McNet) -> VectorClockDomain {
    VectorClockDomain::new(
        (0..mc.dimension())
            .map(|i| {
                let alphabet = mc.component_labels(i);
                let equations = alphabet
                    .iter()
                    .map(|a| (Word(vec![a.clone()]), Word::eps()))
                    .collect();
                TickingDomain::finite(alphabet, equations, 1)
                    .expect("one-letter words fit the bound")
            })
            .collect(),
    )
}

/// Constant-ε ticking maps, one per component.
pub fn constant_eps_taus(dim: usize) -> Vec<TickingMap> {
    (0..dim)
        .map(|i| TickingMap::new(TickKind::ConstantEps, i))
        .collect()
}

/// The net itself with every place annotated by the all-ε clock.
pub fn trivial_spread(mc: &McNet) -> SpreadNet {
    let vcd = trivial_domain(mc);
    let h = mc.net().places().map(|p| (p.clone(), vcd.eps())).collect();
    SpreadNet {
        mc: mc.clone(),
        h,
        taus: constant_eps_taus(mc.dimension()),
        vcd,
    }
}

/// Synthesized id of the place for `orig` with `clock`.
pub(crate) fn place_id(vcd: &VectorClockDomain, orig: &PlaceId, clock: &VectorClock) -> PlaceId {
    let entries: Vec<String> = vcd
        .render(clock)
        .into_iter()
        .map(|s| if s.is_empty() { "ε".to_owned() } else { s })
        .collect();
    PlaceId::new(format!("{orig}({})", entries.join(",")))
}

/// Synthesized id of the transition for `orig` with `preset`.
pub(crate) fn transition_id(orig: &TransId, preset: &BTreeSet<PlaceId>) -> TransId {
    let ids: Vec<&str> = preset.iter().map(PlaceId::as_str).collect();
    TransId::new(format!("{orig}[{}]", ids.join(",")))
}
