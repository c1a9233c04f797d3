use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use super::{place_id, transition_id, FoldingMorphism, SpreadNet};
use crate::mcnet::{validate_mcnet, McNet, NotAnMcNet};
use crate::net::{Label, Marking, Net, PlaceId, TransId, Transition};
use crate::ticking::{op_mix, tick, TickError, TickingMap, VectorClock, VectorClockDomain};

/// Exploration limits of the spreading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Most transitions the output may have.
    pub max_events: usize,
    /// Markings this many steps or more from the initial one are not expanded.
    pub max_depth: Option<usize>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_events: 10_000,
            max_depth: None,
        }
    }
}

impl Bounds {
    pub fn depth(max_depth: usize) -> Self {
        Bounds {
            max_depth: Some(max_depth),
            ..Bounds::default()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpreadError {
    #[error(
        "net has {net} components but the domain has {domain} and there are {taus} ticking maps"
    )]
    DimensionMismatch {
        net: usize,
        domain: usize,
        taus: usize,
    },
    #[error("ticking map at position {position} is declared for component {component}")]
    TauComponentMismatch { position: usize, component: usize },
    #[error("transitions `{0}` and `{1}` share a label")]
    NonInjectiveInputLabels(TransId, TransId),
    #[error(transparent)]
    NotAnMcNet(#[from] NotAnMcNet),
    #[error("ticking `{transition}` into `{place}`: {source}")]
    Tick {
        transition: TransId,
        place: PlaceId,
        #[source]
        source: TickError,
    },
    #[error("firing `{transition}` puts a second token on `{place}`")]
    UnsafeFiring { transition: TransId, place: PlaceId },
}

/// Result of spreading: the spread net, its folding onto the input, and
/// whether exploration finished within the bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spreading {
    pub net: SpreadNet,
    pub folding: FoldingMorphism,
    pub saturated: bool,
}

struct Builder<'a> {
    input: &'a McNet,
    vcd: &'a VectorClockDomain,
    taus: &'a [TickingMap],
    places: BTreeMap<PlaceId, (PlaceId, VectorClock, usize)>,
    by_key: HashMap<(PlaceId, VectorClock), PlaceId>,
    transitions: BTreeMap<TransId, (TransId, BTreeSet<PlaceId>, BTreeSet<PlaceId>)>,
    by_preset: HashMap<(BTreeSet<PlaceId>, TransId), TransId>,
}

impl Builder<'_> {
    fn place(&mut self, orig: &PlaceId, clock: VectorClock, component: usize) -> PlaceId {
        if let Some(p) = self.by_key.get(&(orig.clone(), clock.clone())) {
            return p.clone();
        }
        let id = place_id(self.vcd, orig, &clock);
        self.by_key
            .insert((orig.clone(), clock.clone()), id.clone());
        self.places
            .insert(id.clone(), (orig.clone(), clock, component));
        id
    }

    fn add_transition(
        &mut self,
        t: &TransId,
        preset: BTreeSet<PlaceId>,
    ) -> Result<TransId, SpreadError> {
        let tr = self.input.net().transition(t.as_str()).unwrap();
        let gamma: BTreeMap<usize, VectorClock> = preset
            .iter()
            .map(|p| {
                let (_, clock, k) = &self.places[p];
                (*k, clock.clone())
            })
            .collect();
        let j: BTreeSet<usize> = gamma.keys().copied().collect();
        let mut post = BTreeSet::new();
        for p in &tr.post {
            let k = self.input.component_of(p.as_str()).unwrap();
            let err = |source| SpreadError::Tick {
                transition: t.clone(),
                place: p.clone(),
                source,
            };
            let alpha = op_mix(self.vcd, &gamma, &j, k).map_err(err)?;
            let clock = tick(&self.taus[k], self.vcd, &alpha, t, &tr.label).map_err(err)?;
            post.insert(self.place(p, clock, k));
        }
        let id = transition_id(t, &preset);
        self.by_preset
            .insert((preset.clone(), t.clone()), id.clone());
        self.transitions
            .insert(id.clone(), (t.clone(), preset, post));
        Ok(id)
    }
}

/// Spreads `input` over `vcd` with ticking maps `taus`.
///
/// Reachable markings of the output are explored breadth first; at each one
/// every input transition enabled on the folded marking is added once per
/// choice of preset places, and each postset place is reused whenever a place
/// with the same label and clock already exists.
pub fn spread(
    input: &McNet,
    vcd: &VectorClockDomain,
    taus: &[TickingMap],
    bounds: Bounds,
) -> Result<Spreading, SpreadError> {
    let verdict = validate_mcnet(input);
    if !verdict.is_valid() {
        return Err(NotAnMcNet(verdict).into());
    }
    let dim = input.dimension();
    if vcd.dimension() != dim || taus.len() != dim {
        return Err(SpreadError::DimensionMismatch {
            net: dim,
            domain: vcd.dimension(),
            taus: taus.len(),
        });
    }
    if let Some((position, tau)) = taus.iter().enumerate().find(|(i, t)| t.component != *i) {
        return Err(SpreadError::TauComponentMismatch {
            position,
            component: tau.component,
        });
    }
    let mut labels: BTreeMap<&Label, &TransId> = BTreeMap::new();
    for (id, t) in input.net().transitions() {
        if let Some(other) = labels.insert(&t.label, id) {
            return Err(SpreadError::NonInjectiveInputLabels(
                other.clone(),
                id.clone(),
            ));
        }
    }

    let mut b = Builder {
        input,
        vcd,
        taus,
        places: BTreeMap::new(),
        by_key: HashMap::new(),
        transitions: BTreeMap::new(),
        by_preset: HashMap::new(),
    };
    let initial: Marking = input
        .components()
        .iter()
        .enumerate()
        .map(|(i, q)| b.place(q, vcd.eps(), i))
        .collect();
    let out_components: Vec<PlaceId> = input
        .components()
        .iter()
        .map(|q| b.by_key[&(q.clone(), vcd.eps())].clone())
        .collect();

    let mut saturated = true;
    let mut seen = BTreeSet::from([initial.clone()]);
    let mut queue = VecDeque::from([(initial.clone(), 0usize)]);
    while let Some((m, depth)) = queue.pop_front() {
        let expand = bounds.max_depth.is_none_or(|d| depth < d);
        for (t, tr) in input.net().transitions() {
            let options: Vec<Vec<PlaceId>> = tr
                .pre
                .iter()
                .map(|p| m.iter().filter(|x| &b.places[*x].0 == p).cloned().collect())
                .collect();
            for choice in cartesian(&options) {
                let preset: BTreeSet<PlaceId> = choice.into_iter().collect();
                let out = match b.by_preset.get(&(preset.clone(), t.clone())) {
                    Some(id) => id.clone(),
                    None if !expand || b.transitions.len() >= bounds.max_events => {
                        saturated = false;
                        continue;
                    }
                    None => b.add_transition(t, preset.clone())?,
                };
                let mut next: Marking = m.difference(&preset).cloned().collect();
                for p in &b.transitions[&out].2 {
                    if !next.insert(p.clone()) {
                        return Err(SpreadError::UnsafeFiring {
                            transition: out,
                            place: p.clone(),
                        });
                    }
                }
                if seen.contains(&next) {
                    continue;
                }
                if !expand {
                    saturated = false;
                    continue;
                }
                seen.insert(next.clone());
                queue.push_back((next, depth + 1));
            }
        }
    }

    let in_net = input.net();
    let places = b
        .places
        .iter()
        .map(|(id, (orig, _, _))| {
            (
                id.clone(),
                in_net.place_label(orig.as_str()).unwrap().clone(),
            )
        })
        .collect();
    let transitions = b
        .transitions
        .iter()
        .map(|(id, (orig, pre, post))| {
            let t = Transition {
                label: in_net.transition_label(orig.as_str()).unwrap().clone(),
                pre: pre.clone(),
                post: post.clone(),
            };
            (id.clone(), t)
        })
        .collect();
    let net = Net::new(places, transitions, initial).expect("spreading builds a well-formed net");
    let nu = b
        .places
        .iter()
        .map(|(id, (_, _, k))| (id.clone(), out_components[*k].clone()))
        .collect();
    let mc =
        McNet::with_components(net, nu, out_components).expect("spreading preserves components");
    let folding = FoldingMorphism {
        places: b
            .places
            .iter()
            .map(|(id, (orig, _, _))| (id.clone(), orig.clone()))
            .collect(),
        transitions: b
            .transitions
            .iter()
            .map(|(id, (orig, _, _))| (id.clone(), orig.clone()))
            .collect(),
    };
    let h = b
        .places
        .into_iter()
        .map(|(id, (_, clock, _))| (id, clock))
        .collect();
    Ok(Spreading {
        net: SpreadNet {
            mc,
            vcd: vcd.clone(),
            h,
            taus: taus.to_vec(),
        },
        folding,
        saturated,
    })
}

fn cartesian(options: &[Vec<PlaceId>]) -> Vec<Vec<PlaceId>> {
    let mut out = vec![Vec::new()];
    for opts in options {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect();
    }
    out
}
