#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spreadnet::io::{ModeFile, NetFile};
use spreadnet::mcnet::McNet;
use spreadnet::modes::{CustomComponent, ModeKind, ModeSpec, TauSpec};
use spreadnet::net::{Label, NetBuilder, PlaceId};
use spreadnet::spread::Bounds;
use spreadnet::ticking::Word;

const PREFIXES: [&str; 4] = ["p", "q", "r", "x"];

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub fn running_net() -> McNet {
    let file: NetFile =
        serde_json::from_str(&std::fs::read_to_string(data("running-net.json")).unwrap()).unwrap();
    file.to_mcnet().unwrap()
}

pub fn running_custom_mode() -> ModeSpec {
    let text = std::fs::read_to_string(data("running-custom-mode.json")).unwrap();
    serde_json::from_str::<ModeFile>(&text)
        .unwrap()
        .to_spec()
        .unwrap()
}

/// Random mc-net with `components` sequential components, at most
/// `max_places` places and between 1 and `max_transitions` transitions.
/// Every transition moves one or more components one step; labels are ids.
pub fn random_mcnet(
    rng: &mut ChaCha8Rng,
    components: usize,
    max_places: usize,
    max_transitions: usize,
) -> McNet {
    let mut sizes = vec![1usize; components];
    for _ in 0..rng.gen_range(0..=max_places - components) {
        let i = rng.gen_range(0..components);
        sizes[i] += 1;
    }
    let place = |i: usize, j: usize| format!("{}{j}", PREFIXES[i]);
    let mut b = NetBuilder::new();
    let mut nu = BTreeMap::new();
    for (i, &n) in sizes.iter().enumerate() {
        for j in 0..n {
            b = b.place(&place(i, j));
            nu.insert(PlaceId::new(place(i, j)), PlaceId::new(place(i, 0)));
        }
        b = b.initial(&place(i, 0));
    }
    for k in 0..rng.gen_range(1..=max_transitions) {
        let mut involved: Vec<usize> = (0..components).filter(|_| rng.gen_bool(0.4)).collect();
        if involved.is_empty() {
            involved.push(rng.gen_range(0..components));
        }
        let pre: Vec<String> = involved
            .iter()
            .map(|&i| place(i, rng.gen_range(0..sizes[i])))
            .collect();
        let post: Vec<String> = involved
            .iter()
            .map(|&i| place(i, rng.gen_range(0..sizes[i])))
            .collect();
        let pre: Vec<&str> = pre.iter().map(String::as_str).collect();
        let post: Vec<&str> = post.iter().map(String::as_str).collect();
        b = b.transition(&format!("t{k}"), &pre, &post);
    }
    McNet::new(b.build().unwrap(), nu).unwrap()
}

/// Whether every place is marked and every transition enabled in some
/// reachable marking.
pub fn fully_live(mc: &McNet) -> bool {
    let net = mc.net();
    let Ok(r) = net.reachable_markings(10_000) else {
        return false;
    };
    let marked: BTreeSet<&PlaceId> = r.markings.iter().flatten().collect();
    let fired: BTreeSet<_> = r.markings.iter().flat_map(|m| net.enabled(m)).collect();
    marked.len() == net.place_count() && fired.len() == net.transition_count()
}

/// Equations `rep(q)·a = rep(δ(q, a))` of a random automaton with at most
/// `max_states` states, where `rep(q)` is the shortlex-least word reaching
/// `q`; optionally one extra equation merging two states.
pub fn random_equations(
    rng: &mut ChaCha8Rng,
    alphabet: &BTreeSet<Label>,
    max_states: usize,
) -> Vec<(Word, Word)> {
    let n = rng.gen_range(1..=max_states);
    let letters: Vec<&Label> = alphabet.iter().collect();
    let delta: Vec<Vec<usize>> = (0..n)
        .map(|_| letters.iter().map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let mut rep: Vec<Option<Word>> = vec![None; n];
    rep[0] = Some(Word::eps());
    let mut queue = VecDeque::from([0]);
    while let Some(q) = queue.pop_front() {
        for (k, a) in letters.iter().enumerate() {
            let r = delta[q][k];
            if rep[r].is_none() {
                rep[r] = Some(rep[q].clone().unwrap().append(a));
                queue.push_back(r);
            }
        }
    }
    let mut equations = Vec::new();
    for q in 0..n {
        let Some(w) = &rep[q] else { continue };
        for (k, a) in letters.iter().enumerate() {
            equations.push((w.append(a), rep[delta[q][k]].clone().unwrap()));
        }
    }
    let reached: Vec<&Word> = rep.iter().flatten().collect();
    if reached.len() > 1 && rng.gen_bool(0.5) {
        let pair: Vec<&&Word> = reached.choose_multiple(rng, 2).collect();
        equations.push(((*pair[0]).clone(), (*pair[1]).clone()));
    }
    equations
}

/// Custom mode over random automaton domains with words up to length 4.
pub fn random_custom_mode(rng: &mut ChaCha8Rng, mc: &McNet) -> ModeSpec {
    let components = mc
        .components()
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let alphabet = mc.component_labels(i);
            let equations = random_equations(rng, &alphabet, 4);
            let tau = *[TauSpec::AppendMatching, TauSpec::AppendLocalReset]
                .choose(rng)
                .unwrap();
            let c = CustomComponent {
                alphabet,
                equations,
                max_word_len: 4,
                tau,
            };
            (q.clone(), c)
        })
        .collect();
    ModeSpec {
        kind: ModeKind::Custom(components),
        bounds: Bounds::default(),
    }
}

pub fn mode(kind: ModeKind, depth: usize) -> ModeSpec {
    ModeSpec {
        kind,
        bounds: Bounds::depth(depth),
    }
}
