//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runtime limits are wall-clock on the test build.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spreadnet::mcnet::McNet;
use spreadnet::modes::{instantiate, spread_with_mode, ModeKind, ModeSpec};
use spreadnet::net::{LabelMap, NetBuilder, NetMorphism, PlaceId, TransId};
use spreadnet::oracle::{isomorphic, trellis_oracle, unfold_bp_oracle};
use spreadnet::spread::{
    check_folding, check_spread_morphism, compose_spread_morphisms, trivial_spread,
    validate_spread, DeltaEntry, SpreadMorphism, Spreading, WordMap,
};
use spreadnet::ticking::{op_mix, DomainKind, TickingDomain, VectorClock, VectorClockDomain, Word};

use common::{
    fully_live, mode, random_custom_mode, random_mcnet, running_custom_mode, running_net,
};

const SEED: u64 = 0x5eed_2024;
const LIMIT_RUNNING: Duration = Duration::from_secs(1);
const LIMIT_BP: Duration = Duration::from_secs(30);
const LIMIT_TRELLIS: Duration = Duration::from_secs(1);
const RANDOM_BP_NETS: usize = 50;
const RANDOM_CUSTOM_PAIRS: usize = 100;
const RANDOM_TRIVIAL_NETS: usize = 50;
const BP_DEPTHS: std::ops::RangeInclusive<usize> = 1..=4;
const TRELLIS_HEIGHT: usize = 5;
const BP_FIGURE_DEPTH: usize = 3;
const SAFETY_BOUND: usize = 50;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, result: Result<String, String>) {
        match result {
            Ok(detail) => println!("PASS [{id}] {name}: {detail}"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL [{id}] {name}: {detail}");
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn clock(entries: &[&str]) -> VectorClock {
    VectorClock(entries.iter().map(|e| Word::from_chars(e)).collect())
}

/// The place labelled `label` whose clock is in the class of `entries`.
fn find_place<'a>(s: &'a Spreading, label: &str, entries: &[&str]) -> Result<&'a PlaceId, String> {
    let c = s
        .net
        .vcd
        .canonical(&clock(entries))
        .map_err(|e| e.to_string())?;
    s.net
        .place_by_label_clock(label, &c)
        .ok_or_else(|| format!("no place ({label},{})", clock(entries)))
}

fn criterion_1(spreadings: &mut Vec<(String, McNet, Spreading)>) -> Result<String, String> {
    let mc = running_net();
    let start = Instant::now();
    let s = spread_with_mode(&mc, &running_custom_mode()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let net = s.net.mc.net();
    ensure(s.saturated, || "not saturated".into())?;
    ensure(
        net.place_count() == 10 && net.transition_count() == 10,
        || {
            format!(
                "{} places, {} transitions",
                net.place_count(),
                net.transition_count()
            )
        },
    )?;
    let expected: [(&str, [&str; 2]); 10] = [
        ("a", ["", ""]),
        ("b", ["s", ""]),
        ("d", ["", ""]),
        ("c", ["su", "u"]),
        ("e", ["su", "u"]),
        ("a", ["suz", "uz"]),
        ("d", ["suz", "uz"]),
        ("b", ["s", "uz"]),
        ("b", ["suv", "u"]),
        ("d", ["su", ""]),
    ];
    let mut found = BTreeSet::new();
    for (label, entries) in &expected {
        found.insert(find_place(&s, label, entries)?.clone());
    }
    ensure(found.len() == 10, || {
        "expected clocks do not name 10 distinct places".into()
    })?;
    within(elapsed, LIMIT_RUNNING)?;
    let detail = format!(
        "10 places, 10 transitions, saturated, clock map exact incl. d(su,ε), in {elapsed:?}"
    );
    spreadings.push(("running custom".into(), mc, s));
    Ok(detail)
}

fn bp_matches(mc: &McNet, depth: usize) -> Result<(), String> {
    let s = spread_with_mode(mc, &mode(ModeKind::Bp, depth)).map_err(|e| e.to_string())?;
    let u = unfold_bp_oracle(mc, depth).map_err(|e| e.to_string())?;
    ensure(isomorphic(s.net.mc.net(), &u).is_some(), || {
        format!(
            "depth {depth}: spreading {}/{} vs unfolding {}/{} places/transitions",
            s.net.mc.net().place_count(),
            s.net.mc.net().transition_count(),
            u.place_count(),
            u.transition_count()
        )
    })
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let start = Instant::now();
    let mut nets = vec![running_net()];
    nets.extend((0..RANDOM_BP_NETS).map(|_| random_mcnet(rng, 2, 6, 6)));
    let mut checks = 0;
    for (i, mc) in nets.iter().enumerate() {
        for depth in BP_DEPTHS {
            bp_matches(mc, depth).map_err(|e| format!("net {i}: {e}"))?;
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, LIMIT_BP)?;
    Ok(format!(
        "{} nets x depths 1..4 = {checks} exact isomorphisms in {elapsed:?}",
        nets.len()
    ))
}

fn criterion_3(spreadings: &mut Vec<(String, McNet, Spreading)>) -> Result<String, String> {
    let mc = running_net();
    let start = Instant::now();
    let s = spread_with_mode(&mc, &mode(ModeKind::Trellis, TRELLIS_HEIGHT))
        .map_err(|e| e.to_string())?;
    let t = trellis_oracle(&mc, TRELLIS_HEIGHT).map_err(|e| e.to_string())?;
    let iso = isomorphic(s.net.mc.net(), &t);
    let elapsed = start.elapsed();
    ensure(iso.is_some(), || {
        "spreading and trellis are not isomorphic".into()
    })?;
    let merge = find_place(&s, "d", &["", "uz"])?;
    let net = s.net.mc.net();
    let producers: BTreeSet<String> = net
        .producers(merge.as_str())
        .iter()
        .map(|t| net.transition_label(t.as_str()).unwrap().0.clone())
        .collect();
    ensure(
        producers == BTreeSet::from(["w".into(), "z".into()]),
        || format!("producers of {merge}: {producers:?}"),
    )?;
    within(elapsed, LIMIT_TRELLIS)?;
    let detail = format!(
        "{} places, {} transitions, isomorphic; merge node {merge} produced by w and z; {elapsed:?}",
        net.place_count(),
        net.transition_count()
    );
    spreadings.push(("trellis".into(), mc, s));
    Ok(detail)
}

fn criterion_4(spreadings: &mut Vec<(String, McNet, Spreading)>) -> Result<String, String> {
    let mc = running_net();
    let s =
        spread_with_mode(&mc, &mode(ModeKind::Bp, BP_FIGURE_DEPTH)).map_err(|e| e.to_string())?;
    let left = find_place(&s, "a", &["suz", "uz"])?.clone();
    let right = find_place(&s, "a", &["tuz", "uz"])?.clone();
    ensure(left != right, || {
        "conflicting histories share a place".into()
    })?;
    let net = s.net.mc.net();
    ensure(
        net.place_count() == 16 && net.transition_count() == 10,
        || {
            format!(
                "{} places, {} transitions",
                net.place_count(),
                net.transition_count()
            )
        },
    )?;
    ensure(!s.saturated, || "BP prefix reported saturated".into())?;
    let detail = format!("{left} and {right} distinct; 16 places, 10 transitions, not saturated");
    spreadings.push(("bp".into(), mc, s));
    Ok(detail)
}

fn axioms(mc: &McNet, s: &Spreading, m: Option<&ModeSpec>) -> Result<(), String> {
    let v = validate_spread(&s.net);
    ensure(v.is_valid(), || format!("validate_spread: {v}"))?;
    let f = check_folding(&s.net.mc, mc, &s.folding);
    ensure(f.is_valid(), || format!("check_folding: {f}"))?;
    let net = s.net.mc.net();
    net.reachable_markings(SAFETY_BOUND)
        .map_err(|e| e.to_string())?;
    let keys: BTreeSet<_> = net
        .places()
        .map(|p| (net.place_label(p.as_str()), &s.net.h[p]))
        .collect();
    ensure(keys.len() == net.place_count(), || {
        "(label, clock) pairs repeat".into()
    })?;
    if let Some(m) = m {
        let again = spread_with_mode(mc, m).map_err(|e| e.to_string())?;
        ensure(&again == s, || "second run differs".into())?;
    }
    let id = SpreadMorphism::identity(&s.net);
    let c = check_spread_morphism(&s.net, &s.net, &id);
    ensure(c.is_valid(), || format!("identity morphism: {c}"))?;
    let twice = compose_spread_morphisms(&id, &id).map_err(|e| e.to_string())?;
    ensure(twice == id, || "id∘id differs from id".into())
}

/// Projection of the trivial spreading of the running net onto that of its
/// first component, composed with identities on both sides.
fn projection_laws() -> Result<(), String> {
    let n1 = NetBuilder::new()
        .marked_place("a")
        .place("b")
        .place("c")
        .transition("s", &["a"], &["b"])
        .transition("t", &["a"], &["b"])
        .transition("u", &["b"], &["c"])
        .transition("v", &["c"], &["b"])
        .transition("z", &["c"], &["a"])
        .build()
        .unwrap();
    let nu = ["a", "b", "c"]
        .into_iter()
        .map(|p| (PlaceId::from(p), PlaceId::from("a")))
        .collect();
    let n1 = McNet::new(n1, nu).map_err(|e| e.to_string())?;
    let (g, g1) = (trivial_spread(&running_net()), trivial_spread(&n1));
    let base = NetMorphism {
        trans_map: ["s", "t", "u", "v", "z"]
            .into_iter()
            .map(|t| (TransId::from(t), TransId::from(t)))
            .collect(),
        place_rel: ["a", "b", "c"]
            .into_iter()
            .map(|p| (PlaceId::from(p), PlaceId::from(p)))
            .collect(),
        label_map: LabelMap::Identity,
    };
    let f = SpreadMorphism::new(
        &g,
        &g1,
        base,
        vec![DeltaEntry {
            from: 0,
            map: WordMap::Identity,
        }],
    );
    let v = check_spread_morphism(&g, &g1, &f);
    ensure(v.is_valid(), || format!("projection: {v}"))?;
    let left =
        compose_spread_morphisms(&SpreadMorphism::identity(&g), &f).map_err(|e| e.to_string())?;
    let right =
        compose_spread_morphisms(&f, &SpreadMorphism::identity(&g1)).map_err(|e| e.to_string())?;
    ensure(left == f && right == f, || {
        "identity laws fail for the projection".into()
    })?;
    let v = check_spread_morphism(&g, &g1, &left);
    ensure(v.is_valid(), || format!("composed projection: {v}"))
}

fn criterion_5(
    rng: &mut ChaCha8Rng,
    spreadings: &[(String, McNet, Spreading)],
    domains: &mut Vec<TickingDomain>,
) -> Result<String, String> {
    for (name, mc, s) in spreadings {
        axioms(mc, s, None).map_err(|e| format!("{name}: {e}"))?;
    }
    for i in 0..RANDOM_CUSTOM_PAIRS {
        let mc = random_mcnet(rng, 2, 6, 6);
        let m = random_custom_mode(rng, &mc);
        let s = spread_with_mode(&mc, &m).map_err(|e| format!("pair {i}: {e}"))?;
        ensure(s.saturated, || format!("pair {i}: not saturated"))?;
        axioms(&mc, &s, Some(&m)).map_err(|e| format!("pair {i}: {e}"))?;
        let (vcd, _) = instantiate(&m, &mc).map_err(|e| e.to_string())?;
        domains.extend(vcd.domains().iter().cloned());
    }
    projection_laws()?;
    Ok(format!(
        "{} example spreadings + {RANDOM_CUSTOM_PAIRS} random custom pairs: axioms, folding, safety, uniqueness, determinism, morphism laws",
        spreadings.len()
    ))
}

/// Exhaustive bounded suffix stability and class-function checks.
fn check_domain(d: &TickingDomain) -> Result<(), String> {
    let DomainKind::FiniteEquations { max_word_len, .. } = d.kind() else {
        return Ok(());
    };
    let words = d.words_up_to(*max_word_len);
    let mut canon = BTreeMap::new();
    for w in &words {
        let c = d.canonical(w).map_err(|e| e.to_string())?;
        ensure(d.canonical(&c).map_err(|e| e.to_string())? == c, || {
            format!("canonical not idempotent at {w}")
        })?;
        ensure(c <= *w, || {
            format!("canonical({w}) = {c} is not shortlex-least")
        })?;
        canon.insert(w.clone(), c);
    }
    let classes = d.classes().ok_or("classes unavailable")?;
    for (rep, members) in &classes {
        for m in members {
            ensure(&canon[m] == rep, || {
                format!("{m} listed under {rep}, canonical {}", canon[m])
            })?;
        }
    }
    for u in &words {
        for v in &words {
            if u >= v
                || canon[u] != canon[v]
                || u.len() >= *max_word_len
                || v.len() >= *max_word_len
            {
                continue;
            }
            for a in d.alphabet() {
                let (ua, va) = (u.append(a), v.append(a));
                ensure(canon[&ua] == canon[&va], || {
                    format!("{u} ~ {v} but {ua} !~ {va}")
                })?;
            }
        }
    }
    Ok(())
}

fn op_mix_example() -> Result<(), String> {
    let letters: Vec<_> = (1..=3)
        .flat_map(|i| (1..=2).map(move |j| spreadnet::net::Label::new(format!("w{i}j{j}"))))
        .collect();
    let vcd = VectorClockDomain::new(vec![TickingDomain::free(letters); 3]);
    let member = |j: usize| {
        VectorClock(
            (1..=3)
                .map(|i| Word::from_letters([format!("w{i}j{j}").as_str()]))
                .collect(),
        )
    };
    let gamma = BTreeMap::from([(0, member(1)), (1, member(2))]);
    let j = BTreeSet::from([0, 1]);
    let expect = |ws: [&str; 3]| VectorClock(ws.iter().map(|s| Word::from_letters([*s])).collect());
    let k1 = op_mix(&vcd, &gamma, &j, 0).map_err(|e| e.to_string())?;
    let k2 = op_mix(&vcd, &gamma, &j, 1).map_err(|e| e.to_string())?;
    ensure(k1 == expect(["w1j1", "w2j2", "w3j1"]), || {
        format!("op at j1: {k1}")
    })?;
    ensure(k2 == expect(["w1j1", "w2j2", "w3j2"]), || {
        format!("op at j2: {k2}")
    })
}

fn criterion_6(domains: &[TickingDomain]) -> Result<String, String> {
    let (vcd, _) =
        instantiate(&running_custom_mode(), &running_net()).map_err(|e| e.to_string())?;
    let mut all: Vec<&TickingDomain> = vcd.domains().iter().collect();
    all.extend(domains);
    let trivial = spreadnet::spread::trivial_domain(&running_net());
    all.extend(trivial.domains());
    let mut checked = 0;
    for d in &all {
        if matches!(d.kind(), DomainKind::FiniteEquations { .. }) {
            check_domain(d)?;
            checked += 1;
        }
    }
    op_mix_example()?;
    Ok(format!(
        "{checked} finite domains suffix-stable and canonical; op_mix example exact"
    ))
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut done = 0;
    let mut drawn = 0;
    while done < RANDOM_TRIVIAL_NETS {
        drawn += 1;
        let mc = random_mcnet(rng, 2, 6, 6);
        if !fully_live(&mc) {
            continue;
        }
        let s = spread_with_mode(&mc, &mode(ModeKind::Trivial, 1000)).map_err(|e| e.to_string())?;
        ensure(s.saturated, || format!("net {done}: not saturated"))?;
        ensure(isomorphic(s.net.mc.net(), mc.net()).is_some(), || {
            format!("net {done}: not isomorphic")
        })?;
        done += 1;
    }
    Ok(format!(
        "{done} live nets ({drawn} drawn) reproduced up to isomorphism"
    ))
}

/// Not a criterion: how often BP spreading matches the unfolding on
/// three-component nets.
fn three_components(rng: &mut ChaCha8Rng) -> String {
    let mut agree = 0;
    let total = 20;
    for _ in 0..total {
        let mc = random_mcnet(rng, 3, 7, 6);
        if BP_DEPTHS.clone().all(|d| bp_matches(&mc, d).is_ok()) {
            agree += 1;
        }
    }
    format!("{agree}/{total} random three-component nets match at depths 1..4")
}

fn main() {
    let mut report = Report { failures: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut spreadings = Vec::new();
    let mut domains = Vec::new();
    report.line(
        "1",
        "running-example spreading",
        criterion_1(&mut spreadings),
    );
    report.line("2", "BP equivalence", criterion_2(&mut rng));
    report.line("3", "trellis equivalence", criterion_3(&mut spreadings));
    report.line("4", "BP prefix conflict", criterion_4(&mut spreadings));
    report.line(
        "5",
        "spread-net axioms",
        criterion_5(&mut rng, &spreadings, &mut domains),
    );
    report.line("6", "ticking domains", criterion_6(&domains));
    report.line("7", "trivial-mode fixpoint", criterion_7(&mut rng));
    println!("INFO three components: {}", three_components(&mut rng));
    if report.failures > 0 {
        println!("{} criteria failed", report.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
