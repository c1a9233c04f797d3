use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{check_input, OracleError};
use crate::mcnet::McNet;
use crate::net::{Net, PlaceId, TransId, Transition};

/// Trellis prefix of `mc` built from (place, local time) nodes.
///
/// States assign each component a place and the number of steps it has
/// taken; states `max_height` or more firings away from the start are not
/// expanded.
pub fn trellis_oracle(mc: &McNet, max_height: usize) -> Result<Net, OracleError> {
    check_input(mc)?;
    let net = mc.net();
    let node = |p: &PlaceId, time: usize| PlaceId::new(format!("{p}@{time}"));

    let start: Vec<(PlaceId, usize)> = mc.components().iter().map(|q| (q.clone(), 0)).collect();
    let mut nodes: BTreeMap<PlaceId, PlaceId> = start
        .iter()
        .map(|(p, t)| (node(p, *t), p.clone()))
        .collect();
    let mut events: BTreeMap<(TransId, BTreeSet<PlaceId>), BTreeSet<PlaceId>> = BTreeMap::new();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start.clone(), 0usize)]);

    while let Some((state, dist)) = queue.pop_front() {
        if dist >= max_height {
            continue;
        }
        for (t, tr) in net.transitions() {
            let enabled = tr
                .pre
                .iter()
                .all(|p| state[mc.component_of(p.as_str()).unwrap()].0 == *p);
            if !enabled {
                continue;
            }
            let pre: BTreeSet<PlaceId> = tr
                .pre
                .iter()
                .map(|p| {
                    let (q, time) = &state[mc.component_of(p.as_str()).unwrap()];
                    node(q, *time)
                })
                .collect();
            let mut next = state.clone();
            let mut post = BTreeSet::new();
            for p in &tr.post {
                let k = mc.component_of(p.as_str()).unwrap();
                let time = state[k].1 + 1;
                next[k] = (p.clone(), time);
                nodes.insert(node(p, time), p.clone());
                post.insert(node(p, time));
            }
            events.insert((t.clone(), pre), post);
            if seen.insert(next.clone()) {
                queue.push_back((next, dist + 1));
            }
        }
    }

    let places = nodes
        .iter()
        .map(|(id, p)| (id.clone(), net.place_label(p.as_str()).unwrap().clone()))
        .collect();
    let transitions: BTreeMap<TransId, Transition> = events
        .into_iter()
        .map(|((t, pre), post)| {
            let ids: Vec<&str> = pre.iter().map(PlaceId::as_str).collect();
            let id = TransId::new(format!("{t}@{}", ids.join("+")));
            let label = net.transition_label(t.as_str()).unwrap().clone();
            (id, Transition { label, pre, post })
        })
        .collect();
    let initial = start.iter().map(|(p, t)| node(p, *t)).collect();
    Ok(Net::new(places, transitions, initial).expect("trellis is a well-formed net"))
}
