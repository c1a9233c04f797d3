use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::mcnet::{check_mcn_morphism, McNet, McnMorphismViolation};
use crate::net::{Label, LabelMap, NetMorphism, PlaceId, TransId};
use crate::verdict::Verdict;

/// Total map from a spread net's support onto the net it was spread from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FoldingMorphism {
    pub places: BTreeMap<PlaceId, PlaceId>,
    pub transitions: BTreeMap<TransId, TransId>,
}

impl FoldingMorphism {
    /// The folding as a net morphism; labels map as the nodes do.
    pub fn to_net_morphism(
        &self,
        src: &McNet,
        dst: &McNet,
    ) -> (NetMorphism, Vec<FoldingViolation>) {
        let mut conflicts = Vec::new();
        let mut table: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        for (x, y) in &self.places {
            if let (Some(a), Some(b)) = (
                src.net().place_label(x.as_str()),
                dst.net().place_label(y.as_str()),
            ) {
                table.entry(a.clone()).or_default().insert(b.clone());
            }
        }
        for (x, y) in &self.transitions {
            if let (Some(a), Some(b)) = (
                src.net().transition_label(x.as_str()),
                dst.net().transition_label(y.as_str()),
            ) {
                table.entry(a.clone()).or_default().insert(b.clone());
            }
        }
        let mut label_map = BTreeMap::new();
        for (a, bs) in table {
            if bs.len() > 1 {
                conflicts.push(FoldingViolation::LabelConflict {
                    label: a.clone(),
                    images: bs.iter().cloned().collect(),
                });
            }
            label_map.insert(a, bs.into_iter().next().unwrap());
        }
        let m = NetMorphism {
            trans_map: self.transitions.clone(),
            place_rel: self
                .places
                .iter()
                .map(|(p, q)| (p.clone(), q.clone()))
                .collect(),
            label_map: LabelMap::Table(label_map),
        };
        (m, conflicts)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoldingViolation {
    PlaceUnmapped(PlaceId),
    TransitionUnmapped(TransId),
    LabelConflict {
        label: Label,
        images: Vec<Label>,
    },
    Morphism(McnMorphismViolation),
    /// Two transitions with the same preset fold onto the same transition.
    Economy {
        first: TransId,
        second: TransId,
        image: TransId,
    },
}

impl fmt::Display for FoldingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FoldingViolation::*;
        match self {
            PlaceUnmapped(p) => write!(f, "place `{p}` is not folded"),
            TransitionUnmapped(t) => write!(f, "transition `{t}` is not folded"),
            LabelConflict { label, images } => {
                write!(f, "label `{label}` folds onto several labels {images:?}")
            }
            Morphism(v) => v.fmt(f),
            Economy {
                first,
                second,
                image,
            } => write!(
                f,
                "`{first}` and `{second}` share their preset and both fold onto `{image}`"
            ),
        }
    }
}

/// Checks totality, the morphism conditions and economy of a folding.
pub fn check_folding(src: &McNet, dst: &McNet, f: &FoldingMorphism) -> Verdict<FoldingViolation> {
    use FoldingViolation::*;
    let mut v = Verdict::new();
    for p in src.net().places() {
        if !f.places.contains_key(p) {
            v.push(PlaceUnmapped(p.clone()));
        }
    }
    for t in src.net().transition_ids() {
        if !f.transitions.contains_key(t) {
            v.push(TransitionUnmapped(t.clone()));
        }
    }
    let (m, conflicts) = f.to_net_morphism(src, dst);
    v.extend(conflicts);
    v.extend(
        check_mcn_morphism(src, dst, &m)
            .violations
            .into_iter()
            .map(Morphism),
    );

    let mut by_key: BTreeMap<(&BTreeSet<PlaceId>, &TransId), &TransId> = BTreeMap::new();
    for (t, tr) in src.net().transitions() {
        if let Some(image) = f.transitions.get(t) {
            if let Some(first) = by_key.insert((&tr.pre, image), t) {
                v.push(Economy {
                    first: first.clone(),
                    second: t.clone(),
                    image: image.clone(),
                });
            }
        }
    }
    v
}
