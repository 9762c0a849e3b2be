//! The `.mrm` reward-machine format.
//!
//! ```text
//! # comments run to the end of the line
//! alphabet: m e g t j1 j2
//! nodes: 5          # optional; otherwise the largest node mentioned + 1
//! start: u0
//! default: -1       # reward on null observations
//! u0 m u1 10        # edge: from symbol to reward
//! ```
//!
//! Nodes are written `u0`, `u1`, …. Every `(node, symbol)` pair without an
//! edge line is a zero-reward self-loop.

use std::fmt::Write as _;

use crate::automata::{Alphabet, MachineBuilder, MealyRewardMachine, Node};

use super::{content_lines, header, ModelParseError};

fn parse_node(token: &str, line: usize) -> Result<Node, ModelParseError> {
    token
        .strip_prefix('u')
        .and_then(|n| n.parse::<usize>().ok())
        .map(Node)
        .ok_or_else(|| ModelParseError::new(line, format!("`{token}` is not a node name like u0")))
}

fn parse_reward(token: &str, line: usize) -> Result<f64, ModelParseError> {
    token
        .parse::<f64>()
        .ok()
        .filter(|r| r.is_finite())
        .ok_or_else(|| ModelParseError::new(line, format!("`{token}` is not a finite reward")))
}

pub fn parse_mrm(text: &str) -> Result<MealyRewardMachine, ModelParseError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut nodes: Option<usize> = None;
    let mut start = Node(0);
    let mut default = 0.0;
    let mut edges: Vec<(usize, Node, usize, Node, f64)> = Vec::new();
    for (line, content) in content_lines(text) {
        if let Some(rest) = header(content, "alphabet") {
            let a = Alphabet::new(rest.split_whitespace()).map_err(|e| ModelParseError::new(line, e.to_string()))?;
            alphabet = Some(a);
        } else if let Some(rest) = header(content, "nodes") {
            let n = rest
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| ModelParseError::new(line, "`nodes:` needs a positive count"))?;
            nodes = Some(n);
        } else if let Some(rest) = header(content, "start") {
            start = parse_node(rest, line)?;
        } else if let Some(rest) = header(content, "default") {
            default = parse_reward(rest, line)?;
        } else {
            let a = alphabet
                .as_ref()
                .ok_or_else(|| ModelParseError::new(line, "edge before the `alphabet:` header"))?;
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let [from, sym, to, reward] = tokens[..] else {
                return Err(ModelParseError::new(line, "edges look like `u0 symbol u1 reward`"));
            };
            let z = a
                .lookup(sym)
                .ok_or_else(|| ModelParseError::new(line, format!("unknown symbol `{sym}`")))?;
            edges.push((line, parse_node(from, line)?, z.0, parse_node(to, line)?, parse_reward(reward, line)?));
        }
    }
    let alphabet = alphabet.ok_or_else(|| ModelParseError::new(0, "missing `alphabet:` header"))?;
    let mentioned = edges
        .iter()
        .flat_map(|&(_, u, _, v, _)| [u.0, v.0])
        .chain([start.0])
        .max()
        .unwrap_or(0)
        + 1;
    let count = nodes.unwrap_or(mentioned);
    if mentioned > count {
        return Err(ModelParseError::new(0, format!("node u{} exceeds `nodes: {count}`", mentioned - 1)));
    }
    let mut b = MachineBuilder::new(alphabet.clone(), count).default_reward(default);
    let mut seen = vec![false; count * alphabet.len()];
    for (line, u, z, v, r) in edges {
        let slot = u.0 * alphabet.len() + z;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(ModelParseError::new(
                line,
                format!("second edge for (u{}, {})", u.0, alphabet.names()[z]),
            ));
        }
        b.set_edge(u, crate::automata::Symbol(z), v, r)
            .map_err(|e| ModelParseError::new(line, e.to_string()))?;
    }
    b.start(start).map(MachineBuilder::build).map_err(|e| ModelParseError::new(0, e.to_string()))
}

/// Canonical text: headers, then every edge that is not an implicit
/// zero-reward self-loop, node-major in alphabet order.
pub fn emit_mrm(m: &MealyRewardMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "alphabet: {}", m.alphabet().names().join(" "));
    let _ = writeln!(out, "nodes: {}", m.num_nodes());
    let _ = writeln!(out, "start: u{}", m.start().0);
    let _ = writeln!(out, "default: {}", m.default_reward());
    for u in m.nodes() {
        for z in m.alphabet().symbols() {
            let (v, r) = m.transition(u, z);
            if v != u || r != 0.0 {
                let _ = writeln!(out, "u{} {} u{} {}", u.0, m.alphabet().name(z), v.0, r);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{cookie_machine, treasure_machine};

    #[test]
    fn round_trip_is_structural_identity() {
        for m in [treasure_machine(-1.0), treasure_machine(0.0), cookie_machine()] {
            let text = emit_mrm(&m);
            let back = parse_mrm(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.equivalent(&m).unwrap(), None);
            assert_eq!(emit_mrm(&back), text);
        }
    }

    #[test]
    fn unknown_symbols_are_named() {
        let err = parse_mrm("alphabet: a b\nu0 c u1 1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("`c`"), "{err}");
    }

    #[test]
    fn omitted_edges_are_zero_self_loops() {
        let sparse = parse_mrm("alphabet: a b\nstart: u0\nu0 a u1 5\n").unwrap();
        let full = parse_mrm(
            "alphabet: a b\nnodes: 2\nstart: u0\ndefault: 0\n\
             u0 a u1 5\nu0 b u0 0\nu1 a u1 0\nu1 b u1 0\n",
        )
        .unwrap();
        let a = sparse.alphabet().lookup("a").unwrap();
        let b = sparse.alphabet().lookup("b").unwrap();
        for w in [vec![a, a, b], vec![b, a, b, a], vec![]] {
            assert_eq!(sparse.run_word(&w).unwrap(), full.run_word(&w).unwrap());
        }
        assert_eq!(sparse, full);
    }

    #[test]
    fn malformed_files_report_lines() {
        assert_eq!(parse_mrm("u0 a u1 1\n").unwrap_err().line, 1);
        assert_eq!(parse_mrm("alphabet: a\nu0 a u1\n").unwrap_err().line, 2);
        assert_eq!(parse_mrm("alphabet: a\nu0 a x1 1\n").unwrap_err().line, 2);
        assert_eq!(parse_mrm("alphabet: a\nu0 a u0 1\nu0 a u0 2\n").unwrap_err().line, 3);
        assert!(parse_mrm("alphabet: a\nnodes: 1\nu0 a u3 1\n").is_err());
        assert!(parse_mrm("nodes: 2\n").is_err());
        assert_eq!(parse_mrm("alphabet: a\ndefault: nan\n").unwrap_err().line, 2);
    }
}
