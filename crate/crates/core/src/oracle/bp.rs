use std::collections::{BTreeMap, BTreeSet};

use super::{check_input, OracleError};
use crate::mcnet::McNet;
use crate::net::{Net, PlaceId, TransId, Transition};

struct Condition {
    place: PlaceId,
    producer: Option<usize>,
}

struct Event {
    trans: TransId,
    pre: Vec<usize>,
    post: Vec<usize>,
    /// Local configuration, including the event itself.
    past: BTreeSet<usize>,
}

/// Branching-process prefix of `mc` by possible extensions: an event is added
/// for every transition and co-set of conditions carrying its preset, as long
/// as its local configuration has at most `max_depth` events.
pub fn unfold_bp_oracle(mc: &McNet, max_depth: usize) -> Result<Net, OracleError> {
    check_input(mc)?;
    let net = mc.net();
    let mut conds: Vec<Condition> = net
        .initial_marking()
        .iter()
        .map(|p| Condition {
            place: p.clone(),
            producer: None,
        })
        .collect();
    let mut events: Vec<Event> = Vec::new();
    let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); conds.len()];
    let mut known: BTreeSet<(TransId, Vec<usize>)> = BTreeSet::new();

    let mut changed = true;
    while changed {
        changed = false;
        for (t, tr) in net.transitions() {
            let options: Vec<Vec<usize>> = tr
                .pre
                .iter()
                .map(|p| (0..conds.len()).filter(|&c| &conds[c].place == p).collect())
                .collect();
            let mut found = Vec::new();
            extensions(
                &conds,
                &events,
                &consumers,
                &options,
                max_depth,
                &mut Vec::new(),
                &BTreeSet::new(),
                &mut found,
            );
            for (mut pre, mut past) in found {
                pre.sort_unstable();
                if known.contains(&(t.clone(), pre.clone())) {
                    continue;
                }
                let id = events.len();
                past.insert(id);
                let mut post = Vec::new();
                for p in &tr.post {
                    conds.push(Condition {
                        place: p.clone(),
                        producer: Some(id),
                    });
                    consumers.push(Vec::new());
                    post.push(conds.len() - 1);
                }
                for &c in &pre {
                    consumers[c].push(id);
                }
                known.insert((t.clone(), pre.clone()));
                events.push(Event {
                    trans: t.clone(),
                    pre,
                    post,
                    past,
                });
                changed = true;
            }
        }
    }

    let cid = |c: usize| PlaceId::new(format!("c{c}"));
    let places = conds
        .iter()
        .enumerate()
        .map(|(i, c)| (cid(i), net.place_label(c.place.as_str()).unwrap().clone()))
        .collect();
    let transitions: BTreeMap<TransId, Transition> = events
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let t = Transition {
                label: net.transition_label(e.trans.as_str()).unwrap().clone(),
                pre: e.pre.iter().map(|&c| cid(c)).collect(),
                post: e.post.iter().map(|&c| cid(c)).collect(),
            };
            (TransId::new(format!("e{i}")), t)
        })
        .collect();
    let initial = (0..net.initial_marking().len()).map(cid).collect();
    Ok(Net::new(places, transitions, initial).expect("unfolding is a well-formed net"))
}

/// Co-sets choosing one condition from each of `options`, with their joint
/// past; partial choices are abandoned as soon as they fail.
#[allow(clippy::too_many_arguments)]
fn extensions(
    conds: &[Condition],
    events: &[Event],
    consumers: &[Vec<usize>],
    options: &[Vec<usize>],
    max_depth: usize,
    chosen: &mut Vec<usize>,
    past: &BTreeSet<usize>,
    out: &mut Vec<(Vec<usize>, BTreeSet<usize>)>,
) {
    let Some(opts) = options.get(chosen.len()) else {
        out.push((chosen.clone(), past.clone()));
        return;
    };
    for &c in opts {
        let mut next = past.clone();
        if let Some(e) = conds[c].producer {
            next.extend(events[e].past.iter().copied());
        }
        if next.len() + 1 > max_depth {
            continue;
        }
        let conflict_free = next.iter().all(|&e| {
            events[e]
                .pre
                .iter()
                .all(|&c| consumers[c].iter().filter(|x| next.contains(x)).count() == 1)
        });
        let in_cut = chosen
            .iter()
            .chain([&c])
            .all(|&c| consumers[c].iter().all(|x| !next.contains(x)));
        if !conflict_free || !in_cut {
            continue;
        }
        chosen.push(c);
        extensions(
            conds, events, consumers, options, max_depth, chosen, &next, out,
        );
        chosen.pop();
    }
}
