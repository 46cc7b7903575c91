//! Line-oriented text formats: networks, evidence files, cutset files.
//!
//! Network files are UTF-8 with `#` comments. `var <name> <cardinality>`
//! lines declare variables in index order; each `cpt <child> | <parent...>`
//! header is followed by one whitespace-separated probability row per parent
//! configuration, the last-listed parent varying fastest, child values in
//! index order. Serialization writes floats with Rust's shortest round-trip
//! `{}` formatting, so parse(serialize(net)) is bit-exact.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{BayesNet, Cpt, Evidence, ModelError, VarId};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown variable name `{0}`")]
    UnknownVariable(String),
    #[error("variable `{name}` has no cpt block")]
    MissingCpt { name: String },
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Strip a trailing `#` comment and surrounding whitespace.
fn logical_line(raw: &str) -> &str {
    match raw.find('#') {
        Some(pos) => raw[..pos].trim(),
        None => raw.trim(),
    }
}

pub fn parse_network(text: &str) -> Result<BayesNet, FormatError> {
    let mut names: Vec<String> = Vec::new();
    let mut cards: Vec<usize> = Vec::new();
    // (child, parents, rows expected, rows collected, header line)
    let mut pending: Option<(VarId, Vec<VarId>, usize, Vec<Vec<f64>>, usize)> = None;
    let mut cpts: Vec<Option<Cpt>> = Vec::new();

    let lookup = |names: &[String], name: &str, ln: usize| -> Result<VarId, FormatError> {
        names
            .iter()
            .position(|n| n == name)
            .map(VarId)
            .ok_or_else(|| syntax(ln, format!("unknown variable `{name}`")))
    };

    let finish_pending = |pending: &mut Option<(VarId, Vec<VarId>, usize, Vec<Vec<f64>>, usize)>,
                              cpts: &mut Vec<Option<Cpt>>|
     -> Result<(), FormatError> {
        if let Some((child, parents, expected, rows, header_ln)) = pending.take() {
            if rows.len() != expected {
                return Err(syntax(
                    header_ln,
                    format!(
                        "cpt for `{child}` needs {expected} rows, found {}",
                        rows.len()
                    ),
                ));
            }
            cpts[child.0] = Some(Cpt {
                child,
                parents,
                rows,
            });
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = logical_line(raw);
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        match head {
            "var" => {
                finish_pending(&mut pending, &mut cpts)?;
                let name = tokens
                    .next()
                    .ok_or_else(|| syntax(ln, "var line needs a name"))?;
                let card: usize = tokens
                    .next()
                    .ok_or_else(|| syntax(ln, "var line needs a cardinality"))?
                    .parse()
                    .map_err(|_| syntax(ln, "cardinality must be a positive integer"))?;
                if card == 0 {
                    return Err(syntax(ln, "cardinality must be at least 1"));
                }
                if tokens.next().is_some() {
                    return Err(syntax(ln, "trailing tokens after var declaration"));
                }
                if names.iter().any(|n| n == name) {
                    return Err(syntax(ln, format!("duplicate variable `{name}`")));
                }
                names.push(name.to_string());
                cards.push(card);
                cpts.push(None);
            }
            "cpt" => {
                finish_pending(&mut pending, &mut cpts)?;
                let rest: Vec<&str> = tokens.collect();
                let bar = rest.iter().position(|&t| t == "|");
                let (child_tok, parent_toks) = match bar {
                    Some(pos) => (&rest[..pos], &rest[pos + 1..]),
                    None => (&rest[..], &[][..]),
                };
                if child_tok.len() != 1 {
                    return Err(syntax(ln, "cpt line needs exactly one child before `|`"));
                }
                let child = lookup(&names, child_tok[0], ln)?;
                let parents: Vec<VarId> = parent_toks
                    .iter()
                    .map(|t| lookup(&names, t, ln))
                    .collect::<Result<_, _>>()?;
                if cpts[child.0].is_some() {
                    return Err(syntax(ln, format!("duplicate cpt for `{}`", child_tok[0])));
                }
                let expected: usize = parents.iter().map(|p| cards[p.0]).product();
                pending = Some((child, parents, expected, Vec::new(), ln));
            }
            _ => {
                // A probability row for the pending cpt block.
                let Some((child, _, expected, rows, _)) = pending.as_mut() else {
                    return Err(syntax(ln, "probability row outside a cpt block"));
                };
                let row: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| syntax(ln, format!("bad number `{t}`")))
                    })
                    .collect::<Result<_, _>>()?;
                if row.len() != cards[child.0] {
                    return Err(syntax(
                        ln,
                        format!(
                            "row has {} entries, child `{}` has cardinality {}",
                            row.len(),
                            names[child.0],
                            cards[child.0]
                        ),
                    ));
                }
                if rows.len() == *expected {
                    return Err(syntax(ln, "too many rows in cpt block"));
                }
                rows.push(row);
            }
        }
    }
    finish_pending(&mut pending, &mut cpts)?;

    let mut table = Vec::with_capacity(cpts.len());
    for (i, c) in cpts.into_iter().enumerate() {
        table.push(c.ok_or_else(|| FormatError::MissingCpt {
            name: names[i].clone(),
        })?);
    }
    let net = BayesNet::new(names, cards, table)?;
    // Structural construction allows cycles; reject them at the file boundary.
    net.topological_order()?;
    Ok(net)
}

pub fn serialize_network(net: &BayesNet) -> String {
    let mut out = String::new();
    for v in net.vars() {
        writeln!(out, "var {} {}", net.name(v), net.card(v)).unwrap();
    }
    for v in net.vars() {
        let cpt = net.cpt(v);
        out.push_str("cpt ");
        out.push_str(net.name(v));
        if !cpt.parents.is_empty() {
            out.push_str(" |");
            for &p in &cpt.parents {
                out.push(' ');
                out.push_str(net.name(p));
            }
        }
        out.push('\n');
        for row in &cpt.rows {
            let mut first = true;
            for p in row {
                if !first {
                    out.push(' ');
                }
                write!(out, "{p}").unwrap();
                first = false;
            }
            out.push('\n');
        }
    }
    out
}

/// Evidence file: one `<name> <value-index>` per line.
pub fn parse_evidence(text: &str, net: &BayesNet) -> Result<Evidence, FormatError> {
    let mut e = Evidence::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = logical_line(raw);
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let name = tokens.next().unwrap();
        let value: usize = tokens
            .next()
            .ok_or_else(|| syntax(ln, "evidence line needs a value index"))?
            .parse()
            .map_err(|_| syntax(ln, "value index must be a non-negative integer"))?;
        if tokens.next().is_some() {
            return Err(syntax(ln, "trailing tokens on evidence line"));
        }
        let v = net
            .var_by_name(name)
            .ok_or_else(|| FormatError::UnknownVariable(name.to_string()))?;
        if value >= net.card(v) {
            return Err(syntax(
                ln,
                format!("value {value} out of range for `{name}`"),
            ));
        }
        if e.contains(v) {
            return Err(syntax(ln, format!("duplicate evidence for `{name}`")));
        }
        e.set(v, value);
    }
    Ok(e)
}

pub fn serialize_evidence(e: &Evidence, net: &BayesNet) -> String {
    let mut out = String::new();
    for (v, value) in e.iter() {
        writeln!(out, "{} {}", net.name(v), value).unwrap();
    }
    out
}

/// Cutset file: one variable name per line.
pub fn parse_cutset_members(text: &str, net: &BayesNet) -> Result<Vec<VarId>, FormatError> {
    let mut members = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = logical_line(raw);
        if line.is_empty() {
            continue;
        }
        if line.split_whitespace().nth(1).is_some() {
            return Err(syntax(ln, "cutset line must hold a single name"));
        }
        let v = net
            .var_by_name(line)
            .ok_or_else(|| FormatError::UnknownVariable(line.to_string()))?;
        if members.contains(&v) {
            return Err(syntax(ln, format!("duplicate cutset member `{line}`")));
        }
        members.push(v);
    }
    Ok(members)
}

pub fn serialize_cutset_members(members: &[VarId], net: &BayesNet) -> String {
    let mut out = String::new();
    for &v in members {
        out.push_str(net.name(v));
        out.push('\n');
    }
    out
}
