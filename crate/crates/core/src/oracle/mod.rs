//! Independent reference constructions used to cross-check spreading.
//!
//! The unfolder and trellis builder work directly on the multi-clock net and
//! share no code with the spreading algorithm.

mod bp;
mod iso;
mod trellis;

pub use bp::unfold_bp_oracle;
pub use iso::{isomorphic, isomorphic_colored, LabeledIso};
pub use trellis::trellis_oracle;

use thiserror::Error;

use crate::mcnet::{validate_mcnet, McNet, NotAnMcNet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    NotAnMcNet(#[from] NotAnMcNet),
}

fn check_input(mc: &McNet) -> Result<(), OracleError> {
    let v = validate_mcnet(mc);
    if v.is_valid() {
        Ok(())
    } else {
        Err(NotAnMcNet(v).into())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::mcnet::tests::{nu_of, running_mcnet};
    use crate::modes::{spread_with_mode, ModeKind, ModeSpec};
    use crate::net::{Net, NetBuilder};
    use crate::spread::Bounds;

    fn labels(n: &Net) -> Vec<String> {
        let mut v: Vec<String> = n.transitions().map(|(_, t)| t.label.0.clone()).collect();
        v.sort();
        v
    }

    fn spread_prefix(mc: &McNet, kind: ModeKind, depth: usize) -> Net {
        let mode = ModeSpec {
            kind,
            bounds: Bounds::depth(depth),
        };
        spread_with_mode(mc, &mode).unwrap().net.mc.net().clone()
    }

    fn loop_mcnet() -> McNet {
        let net = NetBuilder::new()
            .marked_place("a")
            .place("b")
            .transition("x", &["a"], &["b"])
            .transition("y", &["b"], &["a"])
            .build()
            .unwrap();
        McNet::new(net, nu_of(&[("a", "a"), ("b", "a")])).unwrap()
    }

    #[test]
    fn bp_depth_one() {
        let u = unfold_bp_oracle(&running_mcnet(), 1).unwrap();
        assert_eq!(labels(&u), ["s", "t"]);
        assert_eq!(u.place_count(), 4);
    }

    #[test]
    fn bp_depth_zero_is_initial() {
        let u = unfold_bp_oracle(&running_mcnet(), 0).unwrap();
        assert_eq!(u.transition_count(), 0);
        assert_eq!(u.place_count(), 2);
        assert_eq!(u.initial_marking().len(), 2);
    }

    #[test]
    fn bp_is_acyclic_and_conflict_free_per_condition() {
        let u = unfold_bp_oracle(&running_mcnet(), 4).unwrap();
        for p in u.places() {
            assert!(u.producers(p.as_str()).len() <= 1);
        }
        assert!(u
            .initial_marking()
            .iter()
            .all(|p| u.producers(p.as_str()).is_empty()));
    }

    #[test]
    fn bp_prefixes_are_coherent() {
        let mc = running_mcnet();
        for d in 0..4 {
            let small = unfold_bp_oracle(&mc, d).unwrap();
            let big = unfold_bp_oracle(&mc, d + 1).unwrap();
            assert!(small.place_count() <= big.place_count());
            assert!(small.transition_count() <= big.transition_count());
        }
    }

    #[test]
    fn trellis_of_a_loop_is_a_chain() {
        let t = trellis_oracle(&loop_mcnet(), 2).unwrap();
        assert_eq!(t.place_count(), 3);
        assert_eq!(labels(&t), ["x", "y"]);
        let u = unfold_bp_oracle(&loop_mcnet(), 2).unwrap();
        assert!(isomorphic(&t, &u).is_some());
    }

    #[test]
    fn trellis_merges_histories() {
        let t = trellis_oracle(&running_mcnet(), 1).unwrap();
        assert_eq!(labels(&t), ["s", "t"]);
        assert_eq!(t.producers("b@1").len(), 2);
    }

    #[test]
    fn bp_spreading_matches_unfolding() {
        let mc = running_mcnet();
        for d in 1..=4 {
            let s = spread_prefix(&mc, ModeKind::Bp, d);
            let u = unfold_bp_oracle(&mc, d).unwrap();
            assert!(isomorphic(&s, &u).is_some(), "depth {d}");
        }
    }

    #[test]
    fn trellis_spreading_matches_trellis() {
        let mc = running_mcnet();
        for h in 1..=5 {
            let s = spread_prefix(&mc, ModeKind::Trellis, h);
            let t = trellis_oracle(&mc, h).unwrap();
            assert!(isomorphic(&s, &t).is_some(), "height {h}");
        }
    }

    #[test]
    fn bp_and_trellis_differ() {
        let mc = running_mcnet();
        let u = unfold_bp_oracle(&mc, 5).unwrap();
        let t = trellis_oracle(&mc, 5).unwrap();
        assert!(isomorphic(&u, &t).is_none());
    }

    #[test]
    fn rejects_non_mcnets() {
        let net = NetBuilder::new().marked_place("a").build().unwrap();
        let mc = McNet::unchecked(net, BTreeMap::new());
        assert!(unfold_bp_oracle(&mc, 1).is_err());
        assert!(trellis_oracle(&mc, 1).is_err());
    }
}
