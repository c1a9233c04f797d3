//! JSON file formats for nets, modes and spreadings, and DOT export.

mod dot;

pub use dot::emit_dot;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mcnet::{McNet, NotAnMcNet};
use crate::modes::{CustomComponent, ModeKind, ModeSpec, TauSpec};
use crate::net::{Label, Net, NetError, PlaceId, TransId, Transition};
use crate::spread::{Bounds, FoldingMorphism, SpreadNet, Spreading};
use crate::ticking::{DomainError, TickError, TickingDomain, TickingMap, VectorClockDomain, Word};

const RESERVED: &[char] = &['.', ',', '(', ')', '[', ']', '@', '+', 'ε'];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid id `{0}`: ids are non-empty and avoid whitespace and . , ( ) [ ] @ + ε")]
    BadId(String),
    #[error("place `{0}` has no component")]
    NoComponent(PlaceId),
    #[error("place `{place}` has component {component}, the clocks have {dimension} entries")]
    BadComponentIndex {
        place: PlaceId,
        component: usize,
        dimension: usize,
    },
    #[error("component {0} has no initial place")]
    MissingComponent(usize),
    #[error("component `{component}`: {source}")]
    Word {
        component: PlaceId,
        #[source]
        source: DomainError,
    },
    #[error("clock of `{place}`: {source}")]
    Clock {
        place: PlaceId,
        #[source]
        source: TickError,
    },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    NotAnMcNet(#[from] NotAnMcNet),
}

impl IoError {
    /// Whether the document was readable but describes an invalid mc-net.
    pub fn is_validation(&self) -> bool {
        matches!(self, IoError::NotAnMcNet(_))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    write_text(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn check_id(id: &str) -> Result<(), IoError> {
    if id.is_empty()
        || id
            .chars()
            .any(|c| c.is_whitespace() || RESERVED.contains(&c))
    {
        Err(IoError::BadId(id.to_owned()))
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetPlace {
    pub id: String,
    /// Initial place of the block this place belongs to.
    pub component: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetTransition {
    pub id: String,
    pub pre: Vec<String>,
    pub post: Vec<String>,
}

/// An mc-net whose labels are its ids. Components are numbered in the order
/// of `initial`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetFile {
    pub places: Vec<NetPlace>,
    pub transitions: Vec<NetTransition>,
    pub initial: Vec<String>,
}

impl NetFile {
    pub fn from_mcnet(mc: &McNet) -> Self {
        let net = mc.net();
        NetFile {
            places: net
                .places()
                .map(|p| NetPlace {
                    id: p.0.clone(),
                    component: mc.nu_of(p.as_str()).unwrap().0.clone(),
                })
                .collect(),
            transitions: net
                .transitions()
                .map(|(t, tr)| NetTransition {
                    id: t.0.clone(),
                    pre: tr.pre.iter().map(|p| p.0.clone()).collect(),
                    post: tr.post.iter().map(|p| p.0.clone()).collect(),
                })
                .collect(),
            initial: mc.components().iter().map(|p| p.0.clone()).collect(),
        }
    }

    pub fn to_mcnet(&self) -> Result<McNet, IoError> {
        let mut places = BTreeMap::new();
        let mut nu = BTreeMap::new();
        for p in &self.places {
            check_id(&p.id)?;
            if places
                .insert(PlaceId::new(&p.id), Label::new(&p.id))
                .is_some()
            {
                return Err(NetError::DuplicateId(p.id.clone()).into());
            }
            nu.insert(PlaceId::new(&p.id), PlaceId::new(&p.component));
        }
        let mut transitions = BTreeMap::new();
        for t in &self.transitions {
            check_id(&t.id)?;
            let tr = Transition {
                label: Label::new(&t.id),
                pre: t.pre.iter().map(PlaceId::new).collect(),
                post: t.post.iter().map(PlaceId::new).collect(),
            };
            if transitions.insert(TransId::new(&t.id), tr).is_some() {
                return Err(NetError::DuplicateId(t.id.clone()).into());
            }
        }
        let order: Vec<PlaceId> = self.initial.iter().map(PlaceId::new).collect();
        let initial: BTreeSet<PlaceId> = order.iter().cloned().collect();
        if initial.len() != order.len() {
            let dup = order
                .iter()
                .find(|p| order.iter().filter(|q| q == p).count() > 1)
                .unwrap();
            return Err(NetError::DuplicateId(dup.0.clone()).into());
        }
        let net = Net::new(places, transitions, initial)?;
        Ok(McNet::with_components(net, nu, order)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledPlace {
    pub id: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledTransition {
    pub id: String,
    pub label: String,
    pub pre: Vec<String>,
    pub post: Vec<String>,
}

fn labeled_transitions(net: &Net) -> Vec<LabeledTransition> {
    net.transitions()
        .map(|(t, tr)| LabeledTransition {
            id: t.0.clone(),
            label: tr.label.0.clone(),
            pre: tr.pre.iter().map(|p| p.0.clone()).collect(),
            post: tr.post.iter().map(|p| p.0.clone()).collect(),
        })
        .collect()
}

fn transitions_of(file: &[LabeledTransition]) -> Result<BTreeMap<TransId, Transition>, IoError> {
    let mut out = BTreeMap::new();
    for t in file {
        let tr = Transition {
            label: Label::new(&t.label),
            pre: t.pre.iter().map(PlaceId::new).collect(),
            post: t.post.iter().map(PlaceId::new).collect(),
        };
        if out.insert(TransId::new(&t.id), tr).is_some() {
            return Err(NetError::DuplicateId(t.id.clone()).into());
        }
    }
    Ok(out)
}

/// A plain labeled net, as produced by the oracles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledNetFile {
    pub places: Vec<LabeledPlace>,
    pub transitions: Vec<LabeledTransition>,
    pub initial: Vec<String>,
}

impl LabeledNetFile {
    pub fn from_net(net: &Net) -> Self {
        LabeledNetFile {
            places: net
                .places()
                .map(|p| LabeledPlace {
                    id: p.0.clone(),
                    label: net.place_label(p.as_str()).unwrap().0.clone(),
                })
                .collect(),
            transitions: labeled_transitions(net),
            initial: net.initial_marking().iter().map(|p| p.0.clone()).collect(),
        }
    }

    pub fn to_net(&self) -> Result<Net, IoError> {
        let mut places = BTreeMap::new();
        for p in &self.places {
            if places
                .insert(PlaceId::new(&p.id), Label::new(&p.label))
                .is_some()
            {
                return Err(NetError::DuplicateId(p.id.clone()).into());
            }
        }
        let initial = self.initial.iter().map(PlaceId::new).collect();
        Ok(Net::new(
            places,
            transitions_of(&self.transitions)?,
            initial,
        )?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Bp,
    Trellis,
    Trivial,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauName {
    AppendMatching,
    AppendLocalReset,
    ConstantEps,
}

impl From<TauName> for TauSpec {
    fn from(t: TauName) -> Self {
        match t {
            TauName::AppendMatching => TauSpec::AppendMatching,
            TauName::AppendLocalReset => TauSpec::AppendLocalReset,
            TauName::ConstantEps => TauSpec::ConstantEps,
        }
    }
}

impl From<TauSpec> for TauName {
    fn from(t: TauSpec) -> Self {
        match t {
            TauSpec::AppendMatching => TauName::AppendMatching,
            TauSpec::AppendLocalReset => TauName::AppendLocalReset,
            TauSpec::ConstantEps => TauName::ConstantEps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ComponentFile {
    pub alphabet: Vec<String>,
    #[serde(default)]
    pub equations: Vec<[String; 2]>,
    pub max_word_len: usize,
    pub tau: TauName,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BoundsFile {
    #[serde(default = "default_max_events")]
    pub max_events: usize,
    #[serde(default)]
    pub max_depth: Option<usize>,
}

fn default_max_events() -> usize {
    Bounds::default().max_events
}

impl Default for BoundsFile {
    fn default() -> Self {
        Bounds::default().into()
    }
}

impl From<Bounds> for BoundsFile {
    fn from(b: Bounds) -> Self {
        BoundsFile {
            max_events: b.max_events,
            max_depth: b.max_depth,
        }
    }
}

impl From<BoundsFile> for Bounds {
    fn from(b: BoundsFile) -> Self {
        Bounds {
            max_events: b.max_events,
            max_depth: b.max_depth,
        }
    }
}

/// Mode selection; `components` is keyed by initial place and used only by
/// the custom mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModeFile {
    pub mode: ModeName,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub components: BTreeMap<String, ComponentFile>,
    #[serde(default)]
    pub bounds: BoundsFile,
}

impl ModeFile {
    pub fn from_spec(spec: &ModeSpec) -> Self {
        let (mode, components) = match &spec.kind {
            ModeKind::Bp => (ModeName::Bp, BTreeMap::new()),
            ModeKind::Trellis => (ModeName::Trellis, BTreeMap::new()),
            ModeKind::Trivial => (ModeName::Trivial, BTreeMap::new()),
            ModeKind::Custom(cs) => {
                let files = cs
                    .iter()
                    .map(|(q, c)| {
                        let d = TickingDomain::free(c.alphabet.iter().cloned());
                        let file = ComponentFile {
                            alphabet: c.alphabet.iter().map(|a| a.0.clone()).collect(),
                            equations: c
                                .equations
                                .iter()
                                .map(|(l, r)| [d.render_word(l), d.render_word(r)])
                                .collect(),
                            max_word_len: c.max_word_len,
                            tau: c.tau.into(),
                        };
                        (q.0.clone(), file)
                    })
                    .collect();
                (ModeName::Custom, files)
            }
        };
        ModeFile {
            mode,
            components,
            bounds: spec.bounds.into(),
        }
    }

    pub fn to_spec(&self) -> Result<ModeSpec, IoError> {
        let kind = match self.mode {
            ModeName::Bp => ModeKind::Bp,
            ModeName::Trellis => ModeKind::Trellis,
            ModeName::Trivial => ModeKind::Trivial,
            ModeName::Custom => {
                let mut cs = BTreeMap::new();
                for (q, c) in &self.components {
                    let alphabet: BTreeSet<Label> = c.alphabet.iter().map(Label::new).collect();
                    let d = TickingDomain::free(alphabet.iter().cloned());
                    let word = |s: &str| -> Result<Word, IoError> {
                        d.parse_word(s).map_err(|source| IoError::Word {
                            component: PlaceId::new(q),
                            source,
                        })
                    };
                    let equations = c
                        .equations
                        .iter()
                        .map(|[l, r]| Ok((word(l)?, word(r)?)))
                        .collect::<Result<_, IoError>>()?;
                    cs.insert(
                        PlaceId::new(q),
                        CustomComponent {
                            alphabet,
                            equations,
                            max_word_len: c.max_word_len,
                            tau: c.tau.into(),
                        },
                    );
                }
                ModeKind::Custom(cs)
            }
        };
        Ok(ModeSpec {
            kind,
            bounds: self.bounds.into(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadPlace {
    pub id: String,
    pub label: String,
    /// Index of the clock entry this place's block owns.
    pub component: usize,
    pub clock: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldingFile {
    pub places: BTreeMap<String, String>,
    pub transitions: BTreeMap<String, String>,
}

/// A spread net with its folding onto the input net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadFile {
    pub places: Vec<SpreadPlace>,
    pub transitions: Vec<LabeledTransition>,
    pub initial: Vec<String>,
    pub folding: FoldingFile,
    pub saturated: bool,
}

impl SpreadFile {
    pub fn from_spreading(s: &Spreading) -> Self {
        let mc = &s.net.mc;
        let net = mc.net();
        SpreadFile {
            places: net
                .places()
                .map(|p| SpreadPlace {
                    id: p.0.clone(),
                    label: net.place_label(p.as_str()).unwrap().0.clone(),
                    component: mc.component_of(p.as_str()).unwrap(),
                    clock: s.net.vcd.render(&s.net.h[p]),
                })
                .collect(),
            transitions: labeled_transitions(net),
            initial: net.initial_marking().iter().map(|p| p.0.clone()).collect(),
            folding: FoldingFile {
                places: s
                    .folding
                    .places
                    .iter()
                    .map(|(a, b)| (a.0.clone(), b.0.clone()))
                    .collect(),
                transitions: s
                    .folding
                    .transitions
                    .iter()
                    .map(|(a, b)| (a.0.clone(), b.0.clone()))
                    .collect(),
            },
            saturated: s.saturated,
        }
    }

    /// Reads the spreading back; clocks are interpreted over `vcd`.
    pub fn to_spreading(
        &self,
        vcd: &VectorClockDomain,
        taus: &[TickingMap],
    ) -> Result<Spreading, IoError> {
        let dim = vcd.dimension();
        let mut places = BTreeMap::new();
        let mut h = BTreeMap::new();
        for p in &self.places {
            let id = PlaceId::new(&p.id);
            if places.insert(id.clone(), Label::new(&p.label)).is_some() {
                return Err(NetError::DuplicateId(p.id.clone()).into());
            }
            let clock = vcd.parse(&p.clock).map_err(|source| IoError::Clock {
                place: id.clone(),
                source,
            })?;
            h.insert(id, clock);
        }
        let initial: BTreeSet<PlaceId> = self.initial.iter().map(PlaceId::new).collect();
        let mut components = vec![None; dim];
        for p in &self.places {
            if p.component >= dim {
                return Err(IoError::BadComponentIndex {
                    place: PlaceId::new(&p.id),
                    component: p.component,
                    dimension: dim,
                });
            }
            if initial.contains(p.id.as_str()) {
                components[p.component] = Some(PlaceId::new(&p.id));
            }
        }
        let components = components
            .into_iter()
            .enumerate()
            .map(|(i, q)| q.ok_or(IoError::MissingComponent(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let nu = self
            .places
            .iter()
            .map(|p| (PlaceId::new(&p.id), components[p.component].clone()))
            .collect();
        let net = Net::new(places, transitions_of(&self.transitions)?, initial)?;
        let mc = McNet::with_components(net, nu, components)?;
        let folding = FoldingMorphism {
            places: self
                .folding
                .places
                .iter()
                .map(|(a, b)| (PlaceId::new(a), PlaceId::new(b)))
                .collect(),
            transitions: self
                .folding
                .transitions
                .iter()
                .map(|(a, b)| (TransId::new(a), TransId::new(b)))
                .collect(),
        };
        Ok(Spreading {
            net: SpreadNet {
                mc,
                vcd: vcd.clone(),
                h,
                taus: taus.to_vec(),
            },
            folding,
            saturated: self.saturated,
        })
    }
}
