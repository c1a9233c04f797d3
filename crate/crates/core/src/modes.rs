//! Built-in spreading modes and custom finite-equation modes.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::mcnet::{component, McNet};
use crate::net::{Label, PlaceId};
use crate::spread::{constant_eps_taus, spread, trivial_domain, Bounds, SpreadError, Spreading};
use crate::ticking::{DomainError, TickKind, TickingDomain, TickingMap, VectorClockDomain, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauSpec {
    AppendMatching,
    AppendLocalReset,
    ConstantEps,
}

impl From<TauSpec> for TickKind {
    fn from(t: TauSpec) -> Self {
        match t {
            TauSpec::AppendMatching => TickKind::AppendIfInAlphabet,
            TauSpec::AppendLocalReset => TickKind::AppendLocalResetOthers,
            TauSpec::ConstantEps => TickKind::ConstantEps,
        }
    }
}

/// Domain and ticking map of one component of a custom mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomComponent {
    pub alphabet: BTreeSet<Label>,
    pub equations: Vec<(Word, Word)>,
    pub max_word_len: usize,
    pub tau: TauSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModeKind {
    Bp,
    Trellis,
    Trivial,
    /// Keyed by the initial place of each component.
    Custom(BTreeMap<PlaceId, CustomComponent>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeSpec {
    pub kind: ModeKind,
    pub bounds: Bounds,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModeError {
    #[error("mode describes {mode} components, the net has {net}")]
    DimensionMismatch { mode: usize, net: usize },
    #[error("mode describes component `{0}`, which is not an initial place of the net")]
    UnknownComponent(PlaceId),
    #[error("alphabet of component `{component}` is {given:?}, its transitions are {expected:?}")]
    AlphabetMismatch {
        component: PlaceId,
        given: Vec<Label>,
        expected: Vec<Label>,
    },
    #[error("component `{component}`: {source}")]
    Domain {
        component: PlaceId,
        #[source]
        source: DomainError,
    },
    #[error(transparent)]
    Spread(#[from] SpreadError),
}

/// The vector-clock domain and ticking maps a mode prescribes for `mc`.
pub fn instantiate(
    mode: &ModeSpec,
    mc: &McNet,
) -> Result<(VectorClockDomain, Vec<TickingMap>), ModeError> {
    let dim = mc.dimension();
    let with = |kind: TickKind| {
        (0..dim)
            .map(|i| TickingMap::new(kind.clone(), i))
            .collect::<Vec<_>>()
    };
    match &mode.kind {
        ModeKind::Bp => {
            let vcd = VectorClockDomain::new(
                (0..dim)
                    .map(|i| TickingDomain::free(mc.component_labels(i)))
                    .collect(),
            );
            Ok((vcd, with(TickKind::AppendIfInAlphabet)))
        }
        ModeKind::Trellis => {
            let domains = (0..dim)
                .map(|i| {
                    TickingDomain::trellis(component(mc, i)).map_err(|source| ModeError::Domain {
                        component: mc.components()[i].clone(),
                        source,
                    })
                })
                .collect::<Result<_, _>>()?;
            Ok((
                VectorClockDomain::new(domains),
                with(TickKind::AppendLocalResetOthers),
            ))
        }
        ModeKind::Trivial => Ok((trivial_domain(mc), constant_eps_taus(dim))),
        ModeKind::Custom(spec) => {
            if let Some(q) = spec
                .keys()
                .find(|q| mc.component_index(q.as_str()).is_none())
            {
                return Err(ModeError::UnknownComponent(q.clone()));
            }
            if spec.len() != dim {
                return Err(ModeError::DimensionMismatch {
                    mode: spec.len(),
                    net: dim,
                });
            }
            let mut domains = Vec::with_capacity(dim);
            let mut taus = Vec::with_capacity(dim);
            for (i, q) in mc.components().iter().enumerate() {
                let c = &spec[q];
                let expected = mc.component_labels(i);
                if c.alphabet != expected {
                    return Err(ModeError::AlphabetMismatch {
                        component: q.clone(),
                        given: c.alphabet.iter().cloned().collect(),
                        expected: expected.into_iter().collect(),
                    });
                }
                let d =
                    TickingDomain::finite(c.alphabet.clone(), c.equations.clone(), c.max_word_len)
                        .map_err(|source| ModeError::Domain {
                            component: q.clone(),
                            source,
                        })?;
                domains.push(d);
                taus.push(TickingMap::new(c.tau.into(), i));
            }
            Ok((VectorClockDomain::new(domains), taus))
        }
    }
}

/// Instantiates `mode` and spreads `mc` with it.
pub fn spread_with_mode(mc: &McNet, mode: &ModeSpec) -> Result<Spreading, ModeError> {
    let (vcd, taus) = instantiate(mode, mc)?;
    Ok(spread(mc, &vcd, &taus, mode.bounds)?)
}
