//! Text diagrams: one line per wire, one column per gate.
//!
//! Tokens: `@` control, `(0)` negative control, `*` fan-out control, `X`
//! target, `Z` phase target, `H`, `T`, `T^-1`, `S`, `S^-1`, `HM>key` for an
//! X-basis measurement and `Z?key` for a classically controlled CZ. A `|`
//! marks a wire crossed by a multi-wire gate. Spacer lines between wires only
//! carry `|` connectors; a leading `# regions` line records region tags.

use crate::circuit::{valid_name, Circuit, Regions};
use crate::error::RenderError;
use crate::gate::{Control, Gate, GateKind, Polarity, WireId};

fn single_token(kind: GateKind) -> &'static str {
    match kind {
        GateKind::X => "X",
        GateKind::H => "H",
        GateKind::S => "S",
        GateKind::SDag => "S^-1",
        GateKind::T => "T",
        GateKind::TDag => "T^-1",
        GateKind::Z => "Z",
        _ => unreachable!("not a single-wire kind"),
    }
}

fn gate_tokens(g: &Gate) -> Vec<(WireId, String)> {
    let mut out = Vec::new();
    let ctl = |c: &Control| match (g.kind, c.polarity) {
        (GateKind::McxFanout, _) => "*",
        (_, Polarity::Positive) => "@",
        (_, Polarity::Negative) => "(0)",
    };
    for c in &g.controls {
        out.push((c.wire, ctl(c).to_string()));
    }
    for &t in &g.targets {
        let tok = match g.kind {
            GateKind::MeasureX => format!("HM>{}", g.record.as_deref().unwrap_or("")),
            GateKind::ClassicalCz => format!("Z?{}", g.condition.as_deref().unwrap_or("")),
            GateKind::Cz | GateKind::Ccz => "Z".to_string(),
            GateKind::Cx | GateKind::McxFanout | GateKind::Ccx | GateKind::C3x => "X".to_string(),
            k => single_token(k).to_string(),
        };
        out.push((t, tok));
    }
    out
}

pub fn render_ascii(c: &Circuit) -> String {
    let names = c.wire_names();
    let w = names.len();
    let pad = names.iter().map(|n| n.len()).max().unwrap_or(0);
    let mut wire_lines: Vec<String> = names.iter().map(|n| format!("{n:<pad$}: ---")).collect();
    let mut gaps: Vec<String> = vec![" ".repeat(pad + 5); w.saturating_sub(1)];

    for g in c.gates() {
        let toks = gate_tokens(g);
        let width = toks.iter().map(|(_, t)| t.len()).max().unwrap_or(1);
        let lo = g.min_wire().0;
        let hi = g.wires().max().expect("gate with wires").0;
        for (i, line) in wire_lines.iter_mut().enumerate() {
            let cell = match toks.iter().find(|(wire, _)| wire.0 == i) {
                Some((_, t)) => t.clone(),
                None if i > lo && i < hi => "|".to_string(),
                None => String::new(),
            };
            line.push_str(&cell);
            line.push_str(&"-".repeat(width - cell.len() + 3));
        }
        for (i, gap) in gaps.iter_mut().enumerate() {
            let cell = if i >= lo && i < hi { "|" } else { " " };
            gap.push_str(cell);
            gap.push_str(&" ".repeat(width - 1 + 3));
        }
    }

    let mut out = String::new();
    if let Some(r) = c.regions() {
        out.push_str(&format!(
            "# regions fanout={}..{} query={}..{} fanin={}..{}\n",
            r.fanout.start, r.fanout.end, r.query.start, r.query.end, r.fanin.start, r.fanin.end
        ));
    }
    for (i, line) in wire_lines.iter().enumerate() {
        out.push_str(line);
        out.push('\n');
        if let Some(gap) = gaps.get(i) {
            out.push_str(gap.trim_end());
            out.push('\n');
        }
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> RenderError {
    RenderError::Parse { line, message: message.into() }
}

fn parse_regions(spec: &str, line: usize) -> Result<Regions, RenderError> {
    let mut parts = [None, None, None];
    for item in spec.split_whitespace() {
        let (name, range) = item.split_once('=').ok_or_else(|| parse_err(line, "bad region item"))?;
        let (a, b) = range.split_once("..").ok_or_else(|| parse_err(line, "bad region range"))?;
        let (a, b): (usize, usize) = (
            a.parse().map_err(|_| parse_err(line, "bad region bound"))?,
            b.parse().map_err(|_| parse_err(line, "bad region bound"))?,
        );
        let slot = match name {
            "fanout" => 0,
            "query" => 1,
            "fanin" => 2,
            _ => return Err(parse_err(line, format!("unknown region `{name}`"))),
        };
        parts[slot] = Some(a..b);
    }
    match parts {
        [Some(fanout), Some(query), Some(fanin)] => Ok(Regions { fanout, query, fanin }),
        _ => Err(parse_err(line, "regions line needs fanout, query and fanin")),
    }
}

/// Reads a diagram produced by [`render_ascii`].
pub fn parse_ascii(text: &str) -> Result<Circuit, RenderError> {
    let mut regions = None;
    let mut wires: Vec<(usize, String, Vec<char>)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        if let Some(spec) = raw.strip_prefix("# regions") {
            regions = Some(parse_regions(spec, line)?);
            continue;
        }
        let Some((name, rest)) = raw.split_once(':') else {
            if raw.chars().all(|ch| ch == ' ' || ch == '|') {
                continue;
            }
            return Err(parse_err(line, "expected `name: ...` or a connector line"));
        };
        let name = name.trim_end();
        if !valid_name(name) {
            return Err(parse_err(line, format!("invalid wire name `{name}`")));
        }
        let body = rest.strip_prefix(' ').unwrap_or(rest);
        wires.push((line, name.to_string(), body.chars().collect()));
    }

    let mut circuit = Circuit::new();
    for (line, name, _) in &wires {
        circuit.add_wire(name.clone()).map_err(|e| parse_err(*line, e.to_string()))?;
    }
    let len = wires.iter().map(|w| w.2.len()).max().unwrap_or(0);
    let occupied: Vec<bool> = (0..len)
        .map(|p| wires.iter().any(|w| w.2.get(p).is_some_and(|&ch| ch != '-')))
        .collect();

    // Columns are runs of occupied positions; single-dash gaps (as in `T^-1`) are bridged.
    let mut columns: Vec<(usize, usize)> = Vec::new();
    let mut p = 0;
    while p < len {
        if !occupied[p] {
            p += 1;
            continue;
        }
        let start = p;
        let mut end = p + 1;
        loop {
            while end < len && occupied[end] {
                end += 1;
            }
            if end + 1 < len && !occupied[end] && occupied[end + 1] {
                end += 1;
                continue;
            }
            break;
        }
        columns.push((start, end));
        p = end;
    }

    for (start, end) in columns {
        let mut cells: Vec<(WireId, String)> = Vec::new();
        for (i, (_, _, chars)) in wires.iter().enumerate() {
            let s: String = chars.get(start..end.min(chars.len())).unwrap_or(&[]).iter().collect();
            let tok = s.trim_matches('-');
            if !tok.is_empty() && tok != "|" {
                cells.push((WireId(i), tok.to_string()));
            }
        }
        let first_line = wires.first().map_or(0, |w| w.0);
        let gate = column_gate(&cells).map_err(|m| parse_err(first_line, format!("column at {start}: {m}")))?;
        circuit.push(gate).map_err(|e| parse_err(first_line, e.to_string()))?;
    }
    if regions.is_some() {
        circuit.set_regions(regions).map_err(|e| parse_err(1, e.to_string()))?;
    }
    Ok(circuit)
}

fn column_gate(cells: &[(WireId, String)]) -> Result<Gate, String> {
    let mut controls = Vec::new();
    let mut fan = false;
    let mut targets: Vec<(WireId, &str)> = Vec::new();
    for (w, t) in cells {
        match t.as_str() {
            "@" => controls.push(Control::pos(*w)),
            "(0)" => controls.push(Control::neg(*w)),
            "*" => {
                fan = true;
                controls.push(Control::pos(*w));
            }
            other => targets.push((*w, other)),
        }
    }
    let tw: Vec<WireId> = targets.iter().map(|t| t.0).collect();
    let build = |kind| {
        Gate::new(kind, controls.clone(), tw.clone(), None, None).map_err(|e| e.to_string())
    };
    if fan {
        if targets.iter().any(|t| t.1 != "X") {
            return Err("fan-out targets must be X".into());
        }
        return build(GateKind::McxFanout);
    }
    let [(tw0, tok)] = targets[..] else {
        return Err(format!("expected one target, found {}", targets.len()));
    };
    if let Some(key) = tok.strip_prefix("HM>") {
        if !controls.is_empty() {
            return Err("measurement takes no controls".into());
        }
        return Ok(Gate::measure_x(tw0, key));
    }
    if let Some(key) = tok.strip_prefix("Z?") {
        let [c] = controls[..] else {
            return Err("classical CZ needs one control".into());
        };
        return Ok(Gate::classical_cz(c.wire, tw0, key));
    }
    let kind = match (tok, controls.len()) {
        ("X", 0) => GateKind::X,
        ("X", 1) => GateKind::Cx,
        ("X", 2) => GateKind::Ccx,
        ("X", 3) => GateKind::C3x,
        ("Z", 0) => GateKind::Z,
        ("Z", 1) => GateKind::Cz,
        ("Z", 2) => GateKind::Ccz,
        ("H", 0) => GateKind::H,
        ("T", 0) => GateKind::T,
        ("T^-1", 0) => GateKind::TDag,
        ("S", 0) => GateKind::S,
        ("S^-1", 0) => GateKind::SDag,
        (t, n) => return Err(format!("token `{t}` with {n} controls")),
    };
    build(kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cx_renders_control_over_target() {
        let mut c = Circuit::with_wires(["q0", "q1"]).unwrap();
        c.push(Gate::cx(WireId(0), WireId(1))).unwrap();
        let text = render_ascii(&c);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec!["q0: ---@---", "       |", "q1: ---X---"]);
        assert_eq!(parse_ascii(&text).unwrap(), c);
    }

    #[test]
    fn crossing_and_tokens_round_trip() {
        let mut c = Circuit::with_wires(["a", "b", "c", "d"]).unwrap();
        let w = WireId;
        c.extend([
            Gate::tdg(w(1)),
            Gate::controlled(GateKind::Ccx, vec![Control::pos(w(0)), Control::neg(w(3))], w(2)),
            Gate::fanout(w(1), vec![w(0), w(3)]),
            Gate::sdg(w(2)),
            Gate::measure_x(w(3), "r0"),
            Gate::classical_cz(w(0), w(1), "r0"),
            Gate::ccz(w(0), w(1), w(2)),
            Gate::controlled(
                GateKind::C3x,
                vec![Control::pos(w(0)), Control::neg(w(1)), Control::pos(w(3))],
                w(2),
            ),
        ])
        .unwrap();
        let text = render_ascii(&c);
        assert!(text.contains("HM>r0"));
        assert!(text.contains("Z?r0"));
        let back = parse_ascii(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(render_ascii(&back), text);
    }

    #[test]
    fn bad_token_is_reported() {
        let err = parse_ascii("q0: ---Q---\n").unwrap_err();
        assert!(matches!(err, RenderError::Parse { line: 1, .. }));
    }
}
