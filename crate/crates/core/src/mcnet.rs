//! Multi-clock nets: a safe net partitioned into sequential components by ν.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::net::{
    check_net_morphism, Label, Marking, MorphismViolation, Net, NetMorphism, PlaceId, TransId,
    Transition,
};
use crate::verdict::Verdict;

/// A net together with its component map ν.
///
/// Component `i` is the block of the `i`-th entry of `components`; by default
/// that is the initial marking in id order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct McNet {
    net: Net,
    nu: BTreeMap<PlaceId, PlaceId>,
    components: Vec<PlaceId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("not an mc-net:\n{0}")]
pub struct NotAnMcNet(pub Verdict<McNetViolation>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McNetViolation {
    /// ν is undefined on a place of the net.
    Uncovered(PlaceId),
    /// ν is defined on something that is not a place.
    UnknownPlace(PlaceId),
    /// ν sends a place outside the initial marking.
    NotInitial { place: PlaceId, image: PlaceId },
    /// An initial place is not its own image.
    NotIdentityOnInitial { place: PlaceId, image: PlaceId },
    /// Two places of the preset or postset lie in the same component.
    NotInjective {
        transition: TransId,
        side: &'static str,
        component: PlaceId,
        places: Vec<PlaceId>,
    },
    /// A transition does not return every token it takes to the same component.
    Unbalanced {
        transition: TransId,
        pre: BTreeSet<PlaceId>,
        post: BTreeSet<PlaceId>,
    },
    /// The component order is not a listing of the initial marking.
    BadComponentOrder(Vec<PlaceId>),
}

impl fmt::Display for McNetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use McNetViolation::*;
        match self {
            Uncovered(p) => write!(f, "place `{p}` has no component"),
            UnknownPlace(p) => write!(f, "component map mentions unknown place `{p}`"),
            NotInitial { place, image } => {
                write!(
                    f,
                    "component of `{place}` is `{image}`, which is not initially marked"
                )
            }
            NotIdentityOnInitial { place, image } => {
                write!(
                    f,
                    "initial place `{place}` belongs to component `{image}` instead of its own"
                )
            }
            NotInjective {
                transition,
                side,
                component,
                places,
            } => write!(
                f,
                "{side} of `{transition}` has {} places {places:?} in component `{component}`",
                places.len()
            ),
            Unbalanced {
                transition,
                pre,
                post,
            } => write!(
                f,
                "`{transition}` takes tokens from components {pre:?} but returns them to {post:?}"
            ),
            BadComponentOrder(order) => write!(
                f,
                "component order {order:?} does not list the initial marking"
            ),
        }
    }
}

impl McNet {
    /// Builds and validates an mc-net with the default component order.
    pub fn new(net: Net, nu: BTreeMap<PlaceId, PlaceId>) -> Result<Self, NotAnMcNet> {
        let mc = Self::unchecked(net, nu);
        let verdict = validate_mcnet(&mc);
        if verdict.is_valid() {
            Ok(mc)
        } else {
            Err(NotAnMcNet(verdict))
        }
    }

    /// Builds and validates an mc-net whose component `i` is the block of `components[i]`.
    pub fn with_components(
        net: Net,
        nu: BTreeMap<PlaceId, PlaceId>,
        components: Vec<PlaceId>,
    ) -> Result<Self, NotAnMcNet> {
        let mc = McNet {
            net,
            nu,
            components,
        };
        let verdict = validate_mcnet(&mc);
        if verdict.is_valid() {
            Ok(mc)
        } else {
            Err(NotAnMcNet(verdict))
        }
    }

    /// Pairs a net with a component map without validation.
    pub fn unchecked(net: Net, nu: BTreeMap<PlaceId, PlaceId>) -> Self {
        let components = net.initial_marking().iter().cloned().collect();
        McNet {
            net,
            nu,
            components,
        }
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn nu(&self) -> &BTreeMap<PlaceId, PlaceId> {
        &self.nu
    }

    pub fn nu_of(&self, p: &str) -> Option<&PlaceId> {
        self.nu.get(p)
    }

    /// Initial places in component-index order.
    pub fn components(&self) -> &[PlaceId] {
        &self.components
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    /// Index of the component whose initial place is `q`.
    pub fn component_index(&self, q: &str) -> Option<usize> {
        self.components.iter().position(|c| c.as_str() == q)
    }

    /// Index of the component containing `p`.
    pub fn component_of(&self, p: &str) -> Option<usize> {
        self.nu
            .get(p)
            .and_then(|q| self.component_index(q.as_str()))
    }

    /// Places of component `i`.
    pub fn block(&self, i: usize) -> BTreeSet<PlaceId> {
        let q = &self.components[i];
        self.nu
            .iter()
            .filter(|(_, r)| *r == q)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Transitions of component `i`: those touching its block on both sides.
    pub fn component_transitions(&self, i: usize) -> BTreeSet<TransId> {
        let block = self.block(i);
        self.net
            .transitions()
            .filter(|(_, t)| !t.pre.is_disjoint(&block) && !t.post.is_disjoint(&block))
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Labels of the transitions of component `i`.
    pub fn component_labels(&self, i: usize) -> BTreeSet<Label> {
        self.component_transitions(i)
            .iter()
            .map(|t| self.net.transition_label(t.as_str()).unwrap().clone())
            .collect()
    }

    /// Component indices touched by a set of places, in order.
    pub fn components_of<'a>(
        &self,
        places: impl IntoIterator<Item = &'a PlaceId>,
    ) -> BTreeSet<usize> {
        places
            .into_iter()
            .filter_map(|p| self.component_of(p.as_str()))
            .collect()
    }
}

/// Checks the four conditions on ν and the component order.
pub fn validate_mcnet(mc: &McNet) -> Verdict<McNetViolation> {
    use McNetViolation::*;
    let mut v = Verdict::new();
    let net = &mc.net;
    let initial = net.initial_marking();

    for p in net.places() {
        if !mc.nu.contains_key(p) {
            v.push(Uncovered(p.clone()));
        }
    }
    for (p, q) in &mc.nu {
        if !net.has_place(p.as_str()) {
            v.push(UnknownPlace(p.clone()));
        } else if !initial.contains(q) {
            v.push(NotInitial {
                place: p.clone(),
                image: q.clone(),
            });
        }
    }
    for p in initial {
        if let Some(q) = mc.nu.get(p) {
            if q != p {
                v.push(NotIdentityOnInitial {
                    place: p.clone(),
                    image: q.clone(),
                });
            }
        }
    }
    let order: BTreeSet<&PlaceId> = mc.components.iter().collect();
    if order.len() != mc.components.len() || order != initial.iter().collect() {
        v.push(BadComponentOrder(mc.components.clone()));
    }

    for (id, t) in net.transitions() {
        let pre = injective_image(mc, id, "preset", &t.pre, &mut v);
        let post = injective_image(mc, id, "postset", &t.post, &mut v);
        if pre != post {
            v.push(Unbalanced {
                transition: id.clone(),
                pre,
                post,
            });
        }
    }
    v
}

fn injective_image(
    mc: &McNet,
    t: &TransId,
    side: &'static str,
    places: &BTreeSet<PlaceId>,
    v: &mut Verdict<McNetViolation>,
) -> BTreeSet<PlaceId> {
    let mut by_component: BTreeMap<PlaceId, Vec<PlaceId>> = BTreeMap::new();
    for p in places {
        if let Some(q) = mc.nu.get(p) {
            by_component.entry(q.clone()).or_default().push(p.clone());
        }
    }
    for (q, ps) in &by_component {
        if ps.len() > 1 {
            v.push(McNetViolation::NotInjective {
                transition: t.clone(),
                side,
                component: q.clone(),
                places: ps.clone(),
            });
        }
    }
    by_component.into_keys().collect()
}

/// One sequential component of an mc-net.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComponentAutomaton {
    pub index: usize,
    pub net: Net,
}

impl ComponentAutomaton {
    /// The only initially marked place.
    pub fn initial_place(&self) -> &PlaceId {
        self.net
            .initial_marking()
            .iter()
            .next()
            .expect("a component has one initial place")
    }

    /// `true` when every transition has a singleton preset and postset.
    pub fn is_sequential(&self) -> bool {
        self.net
            .transitions()
            .all(|(_, t)| t.pre.len() == 1 && t.post.len() == 1)
    }
}

/// Splits an mc-net into its component automata, in component order.
pub fn components(mc: &McNet) -> Result<Vec<ComponentAutomaton>, NotAnMcNet> {
    let verdict = validate_mcnet(mc);
    if !verdict.is_valid() {
        return Err(NotAnMcNet(verdict));
    }
    Ok((0..mc.dimension()).map(|i| component(mc, i)).collect())
}

pub(crate) fn component(mc: &McNet, i: usize) -> ComponentAutomaton {
    let block = mc.block(i);
    let places = block
        .iter()
        .map(|p| (p.clone(), mc.net.place_label(p.as_str()).unwrap().clone()))
        .collect();
    let transitions = mc
        .component_transitions(i)
        .into_iter()
        .map(|id| {
            let t = mc.net.transition(id.as_str()).unwrap();
            let restricted = Transition {
                label: t.label.clone(),
                pre: t.pre.intersection(&block).cloned().collect(),
                post: t.post.intersection(&block).cloned().collect(),
            };
            (id, restricted)
        })
        .collect();
    let initial: Marking = [mc.components[i].clone()].into_iter().collect();
    let net = Net::new(places, transitions, initial).expect("restriction of a valid net");
    ComponentAutomaton { index: i, net }
}

/// Glues component automata back together, identifying transitions by id.
pub fn compose_automata(parts: &[ComponentAutomaton]) -> Net {
    let mut places = BTreeMap::new();
    let mut transitions: BTreeMap<TransId, Transition> = BTreeMap::new();
    let mut initial = Marking::new();
    for part in parts {
        for p in part.net.places() {
            places.insert(p.clone(), part.net.place_label(p.as_str()).unwrap().clone());
        }
        for (id, t) in part.net.transitions() {
            let e = transitions.entry(id.clone()).or_insert_with(|| Transition {
                label: t.label.clone(),
                pre: BTreeSet::new(),
                post: BTreeSet::new(),
            });
            e.pre.extend(t.pre.iter().cloned());
            e.post.extend(t.post.iter().cloned());
        }
        initial.extend(part.net.initial_marking().iter().cloned());
    }
    Net::new(places, transitions, initial).expect("union of valid automata")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McnMorphismViolation {
    Net(MorphismViolation),
    /// `p φ p'` but the components of `p` and `p'` are unrelated.
    Partition {
        source: PlaceId,
        target: PlaceId,
        source_component: Option<PlaceId>,
        target_component: Option<PlaceId>,
    },
}

impl fmt::Display for McnMorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McnMorphismViolation::Net(v) => v.fmt(f),
            McnMorphismViolation::Partition {
                source,
                target,
                source_component,
                target_component,
            } => write!(
                f,
                "`{source}` ~ `{target}` but their components {source_component:?} and {target_component:?} are unrelated"
            ),
        }
    }
}

/// Net-morphism conditions plus preservation of the component partition.
pub fn check_mcn_morphism(
    src: &McNet,
    dst: &McNet,
    f: &NetMorphism,
) -> Verdict<McnMorphismViolation> {
    let base = check_net_morphism(&src.net, &dst.net, f);
    if !base.is_valid() {
        return base.map(McnMorphismViolation::Net);
    }
    let mut v = Verdict::new();
    for (p, q) in &f.place_rel {
        let (np, nq) = (src.nu.get(p).cloned(), dst.nu.get(q).cloned());
        let ok = match (&np, &nq) {
            (Some(a), Some(b)) => f.place_rel.contains(&(a.clone(), b.clone())),
            _ => false,
        };
        if !ok {
            v.push(McnMorphismViolation::Partition {
                source: p.clone(),
                target: q.clone(),
                source_component: np,
                target_component: nq,
            });
        }
    }
    v
}
