//! Ticking domains, vector clocks, the mixing operation and ticking maps.

mod domain;
mod word;

pub use domain::{DomainError, DomainKind, TickingDomain, MAX_ENUMERATED_WORDS};
pub use word::Word;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::net::{Label, TransId};

/// One canonical word per component.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VectorClock(pub Vec<Word>);

impl VectorClock {
    pub fn eps(dim: usize) -> Self {
        VectorClock(vec![Word::eps(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entry(&self, i: usize) -> &Word {
        &self.0[i]
    }

    pub fn is_eps(&self) -> bool {
        self.0.iter().all(Word::is_empty)
    }
}

impl fmt::Display for VectorClock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TickError {
    #[error("mixing component {k} is not among the contributing components")]
    KNotInJ { k: usize },
    #[error("no clock contributed by component {0}")]
    MissingClock(usize),
    #[error("clock contributed by component {0}, which does not take part")]
    StrayClock(usize),
    #[error("clock has {found} entries, the domain has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no component {0}")]
    NoSuchComponent(usize),
    #[error("ticking table has no entry for {clock} and `{transition}`")]
    TableMiss {
        clock: VectorClock,
        transition: TransId,
    },
    #[error("component {component}: {source}")]
    Domain {
        component: usize,
        #[source]
        source: DomainError,
    },
}

/// Product of one ticking domain per component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorClockDomain {
    domains: Vec<TickingDomain>,
}

impl VectorClockDomain {
    pub fn new(domains: Vec<TickingDomain>) -> Self {
        VectorClockDomain { domains }
    }

    pub fn dimension(&self) -> usize {
        self.domains.len()
    }

    pub fn domain(&self, i: usize) -> &TickingDomain {
        &self.domains[i]
    }

    pub fn domains(&self) -> &[TickingDomain] {
        &self.domains
    }

    pub fn eps(&self) -> VectorClock {
        VectorClock::eps(self.dimension())
    }

    pub fn canonical_entry(&self, i: usize, w: &Word) -> Result<Word, TickError> {
        let d = self.domains.get(i).ok_or(TickError::NoSuchComponent(i))?;
        d.canonical(w).map_err(|source| TickError::Domain {
            component: i,
            source,
        })
    }

    pub fn canonical(&self, alpha: &VectorClock) -> Result<VectorClock, TickError> {
        self.check_dim(alpha)?;
        alpha
            .0
            .iter()
            .enumerate()
            .map(|(i, w)| self.canonical_entry(i, w))
            .collect::<Result<_, _>>()
            .map(VectorClock)
    }

    fn check_dim(&self, alpha: &VectorClock) -> Result<(), TickError> {
        if alpha.dim() != self.dimension() {
            return Err(TickError::DimensionMismatch {
                expected: self.dimension(),
                found: alpha.dim(),
            });
        }
        Ok(())
    }

    /// Renders a clock entry by entry for files.
    pub fn render(&self, alpha: &VectorClock) -> Vec<String> {
        alpha
            .0
            .iter()
            .enumerate()
            .map(|(i, w)| match self.domains.get(i) {
                Some(d) => d.render_word(w),
                None => w.to_text(),
            })
            .collect()
    }

    pub fn parse(&self, entries: &[String]) -> Result<VectorClock, TickError> {
        if entries.len() != self.dimension() {
            return Err(TickError::DimensionMismatch {
                expected: self.dimension(),
                found: entries.len(),
            });
        }
        entries
            .iter()
            .enumerate()
            .map(|(i, s)| {
                self.domains[i]
                    .parse_word(s)
                    .map_err(|source| TickError::Domain {
                        component: i,
                        source,
                    })
            })
            .collect::<Result<_, _>>()
            .map(VectorClock)
    }
}

/// Mixes the clocks contributed by the components in `j`: entry `i` comes
/// from `gamma[i]` when `i ∈ j` and from `gamma[k]` otherwise.
pub fn op_mix(
    vcd: &VectorClockDomain,
    gamma: &BTreeMap<usize, VectorClock>,
    j: &BTreeSet<usize>,
    k: usize,
) -> Result<VectorClock, TickError> {
    if !j.contains(&k) {
        return Err(TickError::KNotInJ { k });
    }
    if let Some(i) = j.iter().find(|i| !gamma.contains_key(i)) {
        return Err(TickError::MissingClock(*i));
    }
    if let Some(i) = gamma.keys().find(|i| !j.contains(i)) {
        return Err(TickError::StrayClock(*i));
    }
    for alpha in gamma.values() {
        vcd.check_dim(alpha)?;
    }
    let entries = (0..vcd.dimension())
        .map(|i| {
            let from = if j.contains(&i) {
                &gamma[&i]
            } else {
                &gamma[&k]
            };
            vcd.canonical_entry(i, from.entry(i))
        })
        .collect::<Result<_, _>>()?;
    Ok(VectorClock(entries))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TickKind {
    /// Append the label to every entry whose alphabet contains it.
    AppendIfInAlphabet,
    /// Append the label to the map's own entry and reset the others to ε.
    AppendLocalResetOthers,
    /// Always the all-ε clock.
    ConstantEps,
    CustomTable(BTreeMap<(VectorClock, TransId), VectorClock>),
}

/// The ticking map of one component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TickingMap {
    pub kind: TickKind,
    pub component: usize,
}

impl TickingMap {
    pub fn new(kind: TickKind, component: usize) -> Self {
        TickingMap { kind, component }
    }
}

/// Applies `tau` to `alpha` for transition `t` labeled `label`; the result is canonical.
pub fn tick(
    tau: &TickingMap,
    vcd: &VectorClockDomain,
    alpha: &VectorClock,
    t: &TransId,
    label: &Label,
) -> Result<VectorClock, TickError> {
    vcd.check_dim(alpha)?;
    let out = match &tau.kind {
        TickKind::AppendIfInAlphabet => VectorClock(
            alpha
                .0
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    if vcd.domain(i).alphabet().contains(label) {
                        w.append(label)
                    } else {
                        w.clone()
                    }
                })
                .collect(),
        ),
        TickKind::AppendLocalResetOthers => {
            let k = tau.component;
            if k >= vcd.dimension() {
                return Err(TickError::NoSuchComponent(k));
            }
            if !vcd.domain(k).alphabet().contains(label) {
                return Err(TickError::Domain {
                    component: k,
                    source: DomainError::LetterOutsideAlphabet(label.clone()),
                });
            }
            let mut out = vcd.eps();
            out.0[k] = alpha.entry(k).append(label);
            out
        }
        TickKind::ConstantEps => vcd.eps(),
        TickKind::CustomTable(table) => table
            .get(&(alpha.clone(), t.clone()))
            .cloned()
            .ok_or_else(|| TickError::TableMiss {
                clock: alpha.clone(),
                transition: t.clone(),
            })?,
    };
    vcd.canonical(&out)
}
