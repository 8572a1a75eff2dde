use std::fmt::Write as _;

use crate::model::GameStructure;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering: move edges are solid and labeled by their profile,
/// information sets are dashed undirected links between consecutive members.
pub fn export_dot(g: &GameStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(g.name().unwrap_or("game")));
    let _ = writeln!(out, "  node [shape=circle, label=\"\"];");
    for (ix, nd) in g.nodes().iter().enumerate() {
        if nd.is_terminal() {
            let _ = writeln!(
                out,
                "  n{ix} [shape=plaintext, label={}];",
                quote(nd.terminal_name.as_deref().unwrap_or(""))
            );
        } else {
            let who: Vec<&str> = nd.active.iter().map(|&p| g.players()[p].as_str()).collect();
            let _ = writeln!(out, "  n{ix} [xlabel={}];", quote(&who.join(",")));
        }
    }
    for (ix, nd) in g.nodes().iter().enumerate() {
        for c in &nd.children {
            let _ = writeln!(
                out,
                "  n{ix} -> n{} [label={}];",
                c.0,
                quote(&g.move_string(&g.node(*c).mv))
            );
        }
    }
    for s in g.infosets() {
        for w in s.members.windows(2) {
            let _ = writeln!(
                out,
                "  n{} -> n{} [style=dashed, dir=none, constraint=false, label={}];",
                w[0].0,
                w[1].0,
                quote(&g.players()[s.owner])
            );
        }
    }
    out.push_str("}\n");
    out
}
