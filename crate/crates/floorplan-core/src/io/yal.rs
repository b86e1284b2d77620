//! Parser for the MCNC YAL block format (subset: MODULE / TYPE /
//! DIMENSIONS / IOLIST / NETWORK / ENDMODULE). Non-parent modules become
//! free blocks sized by the bounding box of their DIMENSIONS vertices;
//! the parent module's NETWORK section yields the netlist, with each
//! signal decomposed into consecutive-pair edges.

use crate::error::{Error, Result};
use crate::model::{Block, CostWeights, Net, ProblemInstance};

pub fn parse_yal(text: &str) -> Result<ProblemInstance> {
    parse_yal_with_warnings(text).map(|(inst, _)| inst)
}

pub fn parse_yal_with_warnings(text: &str) -> Result<(ProblemInstance, Vec<String>)> {
    let statements = tokenize(text)?;
    let mut warnings = Vec::new();

    let mut blocks: Vec<Block> = Vec::new();
    // signal name -> block ids, in first-appearance order
    let mut signals: Vec<(String, Vec<usize>)> = Vec::new();
    let mut instance_name = String::from("yal");

    let mut stmts = statements.iter().peekable();
    while let Some((line, words)) = stmts.next() {
        if words[0] != "MODULE" {
            return Err(Error::Parse {
                line: *line,
                msg: format!("expected MODULE, found '{}'", words[0]),
            });
        }
        let mod_name = words
            .get(1)
            .ok_or_else(|| Error::Parse { line: *line, msg: "MODULE without a name".into() })?
            .clone();

        let mut mod_type = String::new();
        let mut dims: Option<(f64, f64)> = None;
        let mut network: Vec<(usize, Vec<String>)> = Vec::new();
        let mut closed = false;

        while let Some((line, words)) = stmts.next() {
            match words[0].as_str() {
                "TYPE" => {
                    mod_type = words
                        .get(1)
                        .ok_or_else(|| Error::Parse { line: *line, msg: "TYPE without a value".into() })?
                        .clone();
                }
                "DIMENSIONS" => {
                    let nums: Vec<f64> = words[1..]
                        .iter()
                        .map(|w| {
                            w.parse::<f64>().map_err(|_| Error::Parse {
                                line: *line,
                                msg: format!("non-numeric DIMENSIONS value '{w}'"),
                            })
                        })
                        .collect::<Result<_>>()?;
                    if nums.len() < 6 || nums.len() % 2 != 0 {
                        return Err(Error::Parse {
                            line: *line,
                            msg: format!("DIMENSIONS needs an even list of >= 6 values, got {}", nums.len()),
                        });
                    }
                    if nums.len() > 8 {
                        warnings.push(format!(
                            "module {mod_name}: non-rectangular outline ({} vertices), using bounding box",
                            nums.len() / 2
                        ));
                    }
                    let xs: Vec<f64> = nums.iter().step_by(2).copied().collect();
                    let ys: Vec<f64> = nums.iter().skip(1).step_by(2).copied().collect();
                    let w = xs.iter().cloned().fold(f64::MIN, f64::max)
                        - xs.iter().cloned().fold(f64::MAX, f64::min);
                    let h = ys.iter().cloned().fold(f64::MIN, f64::max)
                        - ys.iter().cloned().fold(f64::MAX, f64::min);
                    if !(w > 0.0 && h > 0.0) {
                        return Err(Error::Parse {
                            line: *line,
                            msg: format!("module {mod_name}: degenerate outline ({w} x {h})"),
                        });
                    }
                    dims = Some((w, h));
                }
                "IOLIST" => {
                    // pins carry no geometry we use; skip to ENDIOLIST
                    loop {
                        match stmts.next() {
                            Some((_, w)) if w[0] == "ENDIOLIST" => break,
                            Some(_) => continue,
                            None => {
                                return Err(Error::Parse { line: *line, msg: "unterminated IOLIST".into() })
                            }
                        }
                    }
                }
                "NETWORK" => loop {
                    match stmts.next() {
                        Some((_, w)) if w[0] == "ENDNETWORK" => break,
                        Some((l, w)) => {
                            if w.len() < 2 {
                                return Err(Error::Parse {
                                    line: *l,
                                    msg: "NETWORK entry needs instance and module names".into(),
                                });
                            }
                            network.push((*l, w.clone()));
                        }
                        None => {
                            return Err(Error::Parse { line: *line, msg: "unterminated NETWORK".into() })
                        }
                    }
                },
                "ENDMODULE" => {
                    closed = true;
                    break;
                }
                other => {
                    return Err(Error::Parse {
                        line: *line,
                        msg: format!("unexpected keyword '{other}' inside MODULE {mod_name}"),
                    });
                }
            }
        }
        if !closed {
            return Err(Error::Parse { line: *line, msg: format!("MODULE {mod_name} never closed") });
        }

        if mod_type.eq_ignore_ascii_case("PARENT") {
            instance_name = mod_name.clone();
            for (l, words) in &network {
                let child = &words[1];
                let id = blocks
                    .iter()
                    .position(|b| &b.name == child)
                    .ok_or_else(|| Error::Parse {
                        line: *l,
                        msg: format!("NETWORK references unknown module '{child}'"),
                    })?;
                for sig in &words[2..] {
                    match signals.iter_mut().find(|(s, _)| s == sig) {
                        Some((_, members)) => {
                            if !members.contains(&id) {
                                members.push(id);
                            }
                        }
                        None => signals.push((sig.clone(), vec![id])),
                    }
                }
            }
        } else {
            let (w, h) = dims.ok_or_else(|| Error::Parse {
                line: *line,
                msg: format!("module {mod_name} has no DIMENSIONS"),
            })?;
            blocks.push(Block::free(blocks.len(), mod_name, w, h));
        }
    }

    if signals.is_empty() {
        warnings.push("no parent NETWORK found; instance has an empty net list".into());
    }

    // decompose each signal into consecutive-pair edges
    let mut nets = Vec::new();
    for (_, members) in &signals {
        for pair in members.windows(2) {
            nets.push(Net { id: nets.len(), members: vec![pair[0], pair[1]] });
        }
    }

    let instance = ProblemInstance {
        name: instance_name,
        blocks,
        nets,
        weights: CostWeights::new(1.0, 0.0),
    };
    instance.validate()?;
    Ok((instance, warnings))
}

/// Splits into ';'-terminated statements of whitespace-separated words,
/// tracking the source line of each statement. `/* ... */` comments are
/// stripped first.
fn tokenize(text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut statements = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut stmt_line = 0usize;
    let mut in_comment = false;
    for (lineno, line) in text.lines().enumerate() {
        let mut rest = line;
        let mut cleaned = String::new();
        while !rest.is_empty() {
            if in_comment {
                match rest.find("*/") {
                    Some(end) => {
                        in_comment = false;
                        rest = &rest[end + 2..];
                    }
                    None => rest = "",
                }
            } else {
                match rest.find("/*") {
                    Some(start) => {
                        cleaned.push_str(&rest[..start]);
                        in_comment = true;
                        rest = &rest[start + 2..];
                    }
                    None => {
                        cleaned.push_str(rest);
                        rest = "";
                    }
                }
            }
        }
        for piece in cleaned.split_inclusive(';') {
            let terminated = piece.ends_with(';');
            let body = piece.trim_end_matches(';');
            for word in body.split_whitespace() {
                if current.is_empty() {
                    stmt_line = lineno + 1;
                }
                current.push(word.to_string());
            }
            if terminated && !current.is_empty() {
                statements.push((stmt_line, std::mem::take(&mut current)));
            }
        }
    }
    if !current.is_empty() {
        return Err(Error::Parse {
            line: stmt_line,
            msg: format!("unterminated statement starting with '{}'", current[0]),
        });
    }
    Ok(statements)
}
