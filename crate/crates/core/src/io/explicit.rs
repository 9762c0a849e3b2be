//! Explicit MDP and labeling files for custom domains.
//!
//! MDP file:
//!
//! ```text
//! states: s0 s1 s2
//! actions: left right
//! initial: s0
//! s0 right s1 0.9     # s a s' p; rows for the same (s, a) accumulate
//! s0 right s0 0.1
//! ```
//!
//! Labeling file, read against the machine's alphabet; `*` in the action
//! column labels the state for every action and pairs never listed are null:
//!
//! ```text
//! right s1 coin       # a s z
//! * s2 door
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::automata::{Alphabet, Observation};
use crate::mdp::{ActionId, MASS_TOLERANCE, LabelingFunction, NrMdp, NrMdpBuilder, StateId};

use super::{content_lines, header, ModelParseError};

pub fn parse_mdp(text: &str) -> Result<NrMdp, ModelParseError> {
    let mut states: Option<(usize, Vec<String>)> = None;
    let mut actions: Option<(usize, Vec<String>)> = None;
    let mut initial: Option<(usize, String)> = None;
    let mut rows: Vec<(usize, [String; 3], f64)> = Vec::new();
    for (line, content) in content_lines(text) {
        if let Some(rest) = header(content, "states") {
            states = Some((line, rest.split_whitespace().map(String::from).collect()));
        } else if let Some(rest) = header(content, "actions") {
            actions = Some((line, rest.split_whitespace().map(String::from).collect()));
        } else if let Some(rest) = header(content, "initial") {
            initial = Some((line, rest.to_string()));
        } else {
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let [s, a, t, p] = tokens[..] else {
                return Err(ModelParseError::new(line, "transitions look like `s a s' p`"));
            };
            let p = p
                .parse::<f64>()
                .map_err(|_| ModelParseError::new(line, format!("`{p}` is not a probability")))?;
            rows.push((line, [s.into(), a.into(), t.into()], p));
        }
    }
    let (sline, states) = states.ok_or_else(|| ModelParseError::new(0, "missing `states:` header"))?;
    let (aline, actions) = actions.ok_or_else(|| ModelParseError::new(0, "missing `actions:` header"))?;
    let mut b = NrMdpBuilder::new(states.clone(), actions.clone())
        .map_err(|e| ModelParseError::new(sline.max(aline), e.to_string()))?;
    let state = |name: &str, line: usize| {
        states
            .iter()
            .position(|n| n == name)
            .map(StateId)
            .ok_or_else(|| ModelParseError::new(line, format!("unknown state `{name}`")))
    };
    if let Some((line, name)) = initial {
        b.initial(state(&name, line)?)
            .map_err(|e| ModelParseError::new(line, e.to_string()))?;
    }
    let mut grouped: BTreeMap<(StateId, ActionId), (usize, Vec<(StateId, f64)>)> = BTreeMap::new();
    for (line, [s, a, t], p) in rows {
        let a = actions
            .iter()
            .position(|n| *n == a)
            .map(ActionId)
            .ok_or_else(|| ModelParseError::new(line, format!("unknown action `{a}`")))?;
        let entry = grouped.entry((state(&s, line)?, a)).or_insert((line, Vec::new()));
        entry.1.push((state(&t, line)?, p));
    }
    for ((s, a), (line, row)) in grouped {
        let mass: f64 = row.iter().map(|(_, p)| p).sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(ModelParseError::new(
                line,
                format!("probabilities of ({}, {}) sum to {mass}", states[s.0], actions[a.0]),
            ));
        }
        b.transition(s, a, row).map_err(|e| ModelParseError::new(line, e.to_string()))?;
    }
    b.build().map_err(|e| ModelParseError::new(0, e.to_string()))
}

pub fn emit_mdp(mdp: &NrMdp) -> String {
    let mut out = String::new();
    let states: Vec<&str> = mdp.states().map(|s| mdp.state_name(s)).collect();
    let actions: Vec<&str> = mdp.actions().map(|a| mdp.action_name(a)).collect();
    let _ = writeln!(out, "states: {}", states.join(" "));
    let _ = writeln!(out, "actions: {}", actions.join(" "));
    let _ = writeln!(out, "initial: {}", mdp.state_name(mdp.initial()));
    for s in mdp.states() {
        for a in mdp.actions() {
            for &(t, p) in mdp.distribution(s, a).unwrap_or(&[]) {
                let _ = writeln!(out, "{} {} {} {}", mdp.state_name(s), mdp.action_name(a), mdp.state_name(t), p);
            }
        }
    }
    out
}

/// Reads `a s z` rows; names resolve against `mdp` and `alphabet`.
pub fn parse_labeling(text: &str, mdp: &NrMdp, alphabet: &Alphabet) -> Result<LabelingFunction, ModelParseError> {
    let mut lab = LabelingFunction::new(alphabet.clone(), mdp.num_actions(), mdp.num_states());
    for (line, content) in content_lines(text) {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let [a, s, z] = tokens[..] else {
            return Err(ModelParseError::new(line, "labels look like `a s z`"));
        };
        let s = mdp
            .state_index(s)
            .ok_or_else(|| ModelParseError::new(line, format!("unknown state `{s}`")))?;
        let obs = alphabet
            .observation(z)
            .ok_or_else(|| ModelParseError::new(line, format!("unknown symbol `{z}`")))?;
        if a == "*" {
            lab.set_state(s, obs);
        } else {
            let a = mdp
                .action_index(a)
                .ok_or_else(|| ModelParseError::new(line, format!("unknown action `{a}`")))?;
            lab.set(a, s, obs);
        }
    }
    Ok(lab)
}

/// One `a s z` row per non-null label.
pub fn emit_labeling(lab: &LabelingFunction, mdp: &NrMdp) -> String {
    let mut out = String::new();
    for a in mdp.actions() {
        for s in mdp.states() {
            let obs = lab.label(a, s);
            if obs != Observation::Null {
                let _ = writeln!(
                    out,
                    "{} {} {}",
                    mdp.action_name(a),
                    mdp.state_name(s),
                    lab.alphabet().display(obs)
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::build_treasure_map;

    const CHAIN: &str = "\
states: a b
actions: go stay
initial: b
a go b 0.25   # split over two rows
a go b 0.5
a go a 0.25
b stay b 1
";

    #[test]
    fn rows_accumulate_and_missing_pairs_are_disabled() {
        let mdp = parse_mdp(CHAIN).unwrap();
        assert_eq!(mdp.initial(), StateId(1));
        let row = mdp.distribution(StateId(0), ActionId(0)).unwrap();
        assert_eq!(row, &[(StateId(1), 0.75), (StateId(0), 0.25)]);
        assert_eq!(mdp.distribution(StateId(1), ActionId(0)), None);
    }

    #[test]
    fn bad_rows_report_their_line() {
        assert_eq!(parse_mdp("states: a\nactions: x\na x b 1\n").unwrap_err().line, 3);
        assert_eq!(parse_mdp("states: a\nactions: x\na y a 1\n").unwrap_err().line, 3);
        assert_eq!(parse_mdp("states: a\nactions: x\na x a 0.5\n").unwrap_err().line, 3);
        assert_eq!(parse_mdp("states: a\nactions: x\na x a\n").unwrap_err().line, 3);
        assert!(parse_mdp("actions: x\n").is_err());
    }

    #[test]
    fn labels_resolve_names_and_wildcards() {
        let mdp = parse_mdp(CHAIN).unwrap();
        let alphabet = Alphabet::new(["p", "q"]).unwrap();
        let lab = parse_labeling("* b p\ngo a q\n", &mdp, &alphabet).unwrap();
        let p = Observation::Sym(alphabet.lookup("p").unwrap());
        assert_eq!(lab.label(ActionId(0), StateId(1)), p);
        assert_eq!(lab.label(ActionId(1), StateId(1)), p);
        assert_eq!(lab.label(ActionId(1), StateId(0)), Observation::Null);
        let err = parse_labeling("go a r\n", &mdp, &alphabet).unwrap_err();
        assert!(err.message.contains("`r`"));
    }

    #[test]
    fn treasure_world_round_trips() {
        let d = build_treasure_map(0.8).unwrap();
        let mdp = parse_mdp(&emit_mdp(&d.mdp)).unwrap();
        for s in d.mdp.states() {
            for a in d.mdp.actions() {
                assert_eq!(mdp.distribution(s, a), d.mdp.distribution(s, a));
            }
        }
        let lab = parse_labeling(&emit_labeling(&d.labeling, &d.mdp), &mdp, d.alphabet()).unwrap();
        assert_eq!(lab, d.labeling);
    }
}
