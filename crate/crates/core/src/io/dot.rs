use std::fmt::Write;

use crate::spread::SpreadNet;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT rendering of a spread net: places are circles labelled
/// `(label,(clock))`, transitions are boxes, initial places are doubled.
/// Nodes and edges are emitted in id order.
pub fn emit_dot(s: &SpreadNet) -> String {
    let net = s.mc.net();
    let mut out = String::from("digraph spread {\n");
    for p in net.places() {
        let label = format!("({},{})", net.place_label(p.as_str()).unwrap(), s.h[p]);
        let peripheries = if net.initial_marking().contains(p) {
            2
        } else {
            1
        };
        writeln!(
            out,
            "  {} [shape=circle, peripheries={peripheries}, label={}];",
            quote(p.as_str()),
            quote(&label)
        )
        .unwrap();
    }
    for (t, tr) in net.transitions() {
        writeln!(
            out,
            "  {} [shape=box, label={}];",
            quote(t.as_str()),
            quote(tr.label.as_str())
        )
        .unwrap();
    }
    for (t, tr) in net.transitions() {
        for p in &tr.pre {
            writeln!(out, "  {} -> {};", quote(p.as_str()), quote(t.as_str())).unwrap();
        }
        for p in &tr.post {
            writeln!(out, "  {} -> {};", quote(t.as_str()), quote(p.as_str())).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcnet::tests::{nu_of, running_mcnet};
    use crate::mcnet::McNet;
    use crate::modes::spread_with_mode;
    use crate::modes::tests::running_custom_mode;
    use crate::net::NetBuilder;
    use crate::spread::trivial_spread;

    fn count(dot: &str, needle: &str) -> usize {
        dot.lines().filter(|l| l.contains(needle)).count()
    }

    #[test]
    fn single_place() {
        let net = NetBuilder::new().marked_place("a").build().unwrap();
        let mc = McNet::new(net, nu_of(&[("a", "a")])).unwrap();
        let dot = emit_dot(&trivial_spread(&mc));
        assert_eq!(count(&dot, "shape=circle"), 1);
        assert_eq!(count(&dot, "->"), 0);
        assert!(dot.contains("label=\"(a,(ε))\""));
    }

    #[test]
    fn running_example() {
        let s = spread_with_mode(&running_mcnet(), &running_custom_mode()).unwrap();
        let dot = emit_dot(&s.net);
        assert_eq!(count(&dot, "shape=circle") + count(&dot, "shape=box"), 20);
        assert_eq!(count(&dot, "->"), s.net.mc.net().flow_size());
        assert_eq!(count(&dot, "->"), 28);
        assert!(dot.contains("label=\"(c,(su,u))\""));
        assert_eq!(dot, emit_dot(&s.net));
    }

    #[test]
    fn parses_as_dot() {
        let s = spread_with_mode(&running_mcnet(), &running_custom_mode()).unwrap();
        graphviz_rust::parse(&emit_dot(&s.net)).unwrap();
        graphviz_rust::parse(&emit_dot(&trivial_spread(&running_mcnet()))).unwrap();
    }

    #[test]
    fn escapes_quotes() {
        assert_eq!(quote("a\"b\\"), "\"a\\\"b\\\\\"");
    }
}
