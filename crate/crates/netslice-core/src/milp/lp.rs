//! LP-file text format: export, parse, and the solution-file companion.
//!
//! The dialect is the common `Minimize / Subject To / Bounds / Binaries /
//! End` layout, readable by mainstream LP tooling. Everything this layer
//! needs beyond that baseline travels in comment lines, which foreign
//! readers skip:
//!
//! * `\ model <name>` — model name.
//! * `\ meta <key>: <value>` — one metadata entry.
//! * `\ var <name> binary` (optionally `prio <n>` for a nonzero branch
//!   priority) or `\ var <name> continuous <lo> <up>` — declaration
//!   order, kind, bounds, and branching hints of every variable.
//! * `\ tag: <tag>` — tag of the next constraint (row labels themselves
//!   stay short and LP-legal: `c1`, `c2`, ...).
//!
//! With those comments present, [`parse_lp`] rebuilds the exact source
//! model and `export_lp(parse_lp(text))` is byte-identical to `text`.
//! Files from other tools parse too (glued tokens, missing comments);
//! they just get appearance-ordered variables and label-derived tags.
//!
//! Numbers are written with the shortest representation that parses back
//! to the same binary value, so no precision is lost in either direction.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{MilpModel, Sense, VarId, VarKind};

/// Errors from LP/solution text handling.
#[derive(Debug, Error)]
pub enum LpError {
    /// The model has an empty objective; the text format cannot express it.
    #[error("model has no objective variables")]
    EmptyObjective,
    /// A variable name cannot be written in an LP file.
    #[error("variable name {0:?} is not LP-legal")]
    IllegalName(String),
    /// A variable bound combination the format cannot express.
    #[error("variable {0} has unsupported bounds [{1}, {2}]")]
    UnsupportedBounds(String, f64, f64),
    /// Parse failure with 1-based line number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> LpError {
    LpError::Parse { line, message: message.into() }
}

/// Shortest decimal form that round-trips to the same `f64`.
fn fmt_num(v: f64) -> String {
    assert!(v.is_finite(), "non-finite coefficient {v}");
    if v == 0.0 {
        "0".to_string() // normalizes -0.0
    } else {
        format!("{v}")
    }
}

/// LP-legal variable name: nonempty, drawn from a conservative charset
/// (letters, digits, `_`, `#`, `.`), not starting with a digit or `.`,
/// and not starting like an exponent (`e`/`E` followed by a digit or `.`),
/// which keeps every common reader from mis-tokenizing it.
pub fn legal_name(name: &str) -> bool {
    let first = match name.chars().next() {
        None => return false,
        Some(c) => c,
    };
    if first.is_ascii_digit() || first == '.' {
        return false;
    }
    if (first == 'e' || first == 'E')
        && name[1..].starts_with(|c: char| c.is_ascii_digit() || c == '.')
    {
        return false;
    }
    name.len() <= 255
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '#' || c == '.')
}

fn write_terms(out: &mut String, model: &MilpModel, terms: &[(VarId, f64)]) {
    for (i, (v, c)) in terms.iter().enumerate() {
        let name = &model.var(*v).name;
        let mag = c.abs();
        if i == 0 {
            if *c < 0.0 {
                out.push_str("- ");
            }
        } else if *c < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if mag != 1.0 {
            let _ = write!(out, "{} ", fmt_num(mag));
        }
        out.push_str(name);
    }
}

/// Renders the model as LP text. Errors on an empty objective, on names
/// the format cannot carry, and on the one bound shape it cannot express
/// (`lower = -inf` with a finite upper, which no builder produces).
pub fn export_lp(model: &MilpModel) -> Result<String, LpError> {
    if model.objective.is_empty() {
        return Err(LpError::EmptyObjective);
    }
    for v in model.vars() {
        if !legal_name(&v.name) {
            return Err(LpError::IllegalName(v.name.clone()));
        }
        if v.lower.is_infinite() && v.upper.is_finite() {
            return Err(LpError::UnsupportedBounds(v.name.clone(), v.lower, v.upper));
        }
    }
    let mut out = String::new();
    if !model.name.is_empty() {
        let _ = writeln!(out, "\\ model {}", model.name);
    }
    for (k, v) in &model.metadata {
        let _ = writeln!(out, "\\ meta {k}: {v}");
    }
    for v in model.vars() {
        match v.kind {
            VarKind::Binary => {
                if v.branch_priority != 0 {
                    let _ = writeln!(out, "\\ var {} binary prio {}", v.name, v.branch_priority);
                } else {
                    let _ = writeln!(out, "\\ var {} binary", v.name);
                }
            }
            VarKind::Continuous => {
                let lo = if v.lower.is_finite() { fmt_num(v.lower) } else { "-inf".to_string() };
                let up = if v.upper.is_finite() { fmt_num(v.upper) } else { "inf".to_string() };
                let _ = writeln!(out, "\\ var {} continuous {lo} {up}", v.name);
            }
        }
    }
    out.push_str("Minimize\n obj: ");
    write_terms(&mut out, model, &model.objective);
    out.push_str("\nSubject To\n");
    for (i, c) in model.constraints.iter().enumerate() {
        let _ = writeln!(out, "\\ tag: {}", c.tag);
        let _ = write!(out, " c{}: ", i + 1);
        write_terms(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), fmt_num(c.rhs));
    }
    let mut bounds = String::new();
    for v in model.vars() {
        if v.kind == VarKind::Binary {
            continue; // the Binaries section implies [0, 1]
        }
        if v.lower == 0.0 && v.upper == f64::INFINITY {
            continue; // the LP default bound needs no line
        }
        let line = if v.lower == v.upper {
            format!(" {} = {}", v.name, fmt_num(v.lower))
        } else if v.lower.is_infinite() {
            format!(" {} free", v.name)
        } else if v.lower == 0.0 {
            format!(" {} <= {}", v.name, fmt_num(v.upper))
        } else if v.upper == f64::INFINITY {
            format!(" {} >= {}", v.name, fmt_num(v.lower))
        } else {
            format!(" {} <= {} <= {}", fmt_num(v.lower), v.name, fmt_num(v.upper))
        };
        let _ = writeln!(bounds, "{line}");
    }
    if !bounds.is_empty() {
        out.push_str("Bounds\n");
        out.push_str(&bounds);
    }
    let binaries: Vec<&str> = model
        .vars()
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for b in binaries {
            let _ = writeln!(out, " {b}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    /// Variable name or keyword.
    Word(String),
    /// Numeric literal.
    Num(f64),
    Plus,
    Minus,
    Sense(Sense),
    /// `name:` label ending in a colon.
    Label(String),
}

/// Section headers, normalized to lowercase with spaces and dots removed.
fn section_of(line: &str) -> Option<&'static str> {
    let norm: String =
        line.chars().filter(|c| !c.is_whitespace() && *c != '.').collect::<String>().to_lowercase();
    match norm.as_str() {
        "minimize" | "min" | "minimum" => Some("minimize"),
        "maximize" | "max" | "maximum" => Some("maximize"),
        "subjectto" | "st" | "suchthat" => Some("subject-to"),
        "bounds" | "bound" => Some("bounds"),
        "binaries" | "binary" | "bin" => Some("binaries"),
        "generals" | "general" | "gen" | "integers" | "integer" => Some("generals"),
        "semicontinuous" | "semis" | "semi" => Some("semis"),
        "end" => Some("end"),
        _ => None,
    }
}

/// Lexes one non-comment line. Handles glued forms (`2x1+3x2<=4`) so
/// files from other exporters parse too.
fn lex_line(line: &str, lineno: usize, out: &mut Vec<(Tok, usize)>) -> Result<(), LpError> {
    let bytes: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' {
            out.push((Tok::Plus, lineno));
            i += 1;
        } else if c == '-' {
            out.push((Tok::Minus, lineno));
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            i += 1;
            let sense = match c {
                '<' => Sense::Le,
                '>' => Sense::Ge,
                _ => {
                    // bare "=", or the archaic "=<" / "=>"
                    match bytes.get(i) {
                        Some('<') => {
                            i += 1;
                            Sense::Le
                        }
                        Some('>') => {
                            i += 1;
                            Sense::Ge
                        }
                        _ => Sense::Eq,
                    }
                }
            };
            if sense != Sense::Eq && bytes.get(i) == Some(&'=') {
                i += 1; // "<=" / ">="
            }
            out.push((Tok::Sense(sense), lineno));
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                i += 1;
            }
            // Exponent only when 'e'/'E' is followed by a (signed) digit
            // run; otherwise it is the start of the next name.
            if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = bytes[start..i].iter().collect();
            let value: f64 = text
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad numeric literal {text:?}")))?;
            out.push((Tok::Num(value), lineno));
        } else if c.is_ascii_alphanumeric() || "_#.!\"&?@'`(){}|~$%".contains(c) {
            let start = i;
            while i < bytes.len() {
                let d = bytes[i];
                if d.is_whitespace() || "+-<>=:".contains(d) {
                    break;
                }
                i += 1;
            }
            let word: String = bytes[start..i].iter().collect();
            if bytes.get(i) == Some(&':') {
                out.push((Tok::Label(word), lineno));
                i += 1;
            } else {
                out.push((Tok::Word(word), lineno));
            }
        } else {
            return Err(parse_err(lineno, format!("unexpected character {c:?}")));
        }
    }
    Ok(())
}

#[derive(Debug)]
struct VarDirective {
    kind: VarKind,
    lower: f64,
    upper: f64,
    branch_priority: i32,
}

fn parse_bound_word(word: &str, lineno: usize) -> Result<f64, LpError> {
    let lower = word.to_ascii_lowercase();
    match lower.as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => word.parse().map_err(|_| parse_err(lineno, format!("bad bound value {word:?}"))),
    }
}

/// A linear expression accumulated by the parser: (name, coefficient)
/// pairs in appearance order, not yet merged.
#[derive(Debug, Default)]
struct Expr {
    terms: Vec<(String, f64)>,
}

/// Consumes `sign? number? name` groups from `toks` starting at `i`.
/// Stops (returning the index) at a sense token or the end.
fn parse_expr(toks: &[(Tok, usize)], mut i: usize, expr: &mut Expr) -> Result<usize, LpError> {
    while i < toks.len() {
        let (tok, lineno) = &toks[i];
        let mut sign = 1.0;
        match tok {
            Tok::Sense(_) => return Ok(i),
            Tok::Plus => {
                i += 1;
            }
            Tok::Minus => {
                sign = -1.0;
                i += 1;
            }
            _ => {}
        }
        if i >= toks.len() {
            return Err(parse_err(*lineno, "dangling sign at end of expression"));
        }
        let (tok, lineno) = &toks[i];
        let mut coef = sign;
        let mut j = i;
        if let Tok::Num(v) = tok {
            coef *= v;
            j += 1;
            if j >= toks.len() {
                return Err(parse_err(*lineno, "number without a variable"));
            }
        }
        match &toks[j] {
            (Tok::Word(name), _) => {
                expr.terms.push((name.clone(), coef));
                i = j + 1;
            }
            (Tok::Sense(_), _) if j > i => {
                return Err(parse_err(*lineno, "constant terms are not supported"));
            }
            (other, l) => {
                return Err(parse_err(*l, format!("expected a variable, found {other:?}")));
            }
        }
    }
    Ok(i)
}

fn resolve(model: &MilpModel, expr: &Expr, what: &str) -> Result<Vec<(VarId, f64)>, LpError> {
    expr.terms
        .iter()
        .map(|(name, c)| {
            model
                .var_id(name)
                .map(|id| (id, *c))
                .ok_or_else(|| parse_err(0, format!("{what} references undeclared variable {name}")))
        })
        .collect()
}

fn declare_default(model: &mut MilpModel, name: &str) {
    if model.var_id(name).is_none() {
        model.add_var_raw(name.to_string(), VarKind::Continuous, 0.0, f64::INFINITY, 0);
    }
}

/// Parses LP text back into a model. Files produced by [`export_lp`]
/// reconstruct exactly (names, order, kinds, bounds, tags, metadata);
/// foreign files get appearance-ordered variables, default bounds
/// refined by their `Bounds`/`Binaries` sections, and row labels as tags.
pub fn parse_lp(text: &str) -> Result<MilpModel, LpError> {
    #[derive(Debug)]
    enum RowTok {
        Tok(Tok),
        Tag(String),
    }

    let mut model_name = String::from("lp-import");
    let mut metadata = BTreeMap::new();
    let mut var_order: Vec<String> = Vec::new();
    let mut var_directives: BTreeMap<String, VarDirective> = BTreeMap::new();

    let mut objective_toks: Vec<(Tok, usize)> = Vec::new();
    let mut row_toks: Vec<(RowTok, usize)> = Vec::new();
    let mut bounds_toks: Vec<Vec<(Tok, usize)>> = Vec::new();
    let mut binary_names: Vec<(String, usize)> = Vec::new();

    let mut section = "preamble";
    let mut maximize = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('\\') {
            let rest = rest.trim_start();
            if let Some(name) = rest.strip_prefix("model ") {
                model_name = name.trim().to_string();
            } else if let Some(kv) = rest.strip_prefix("meta ") {
                match kv.split_once(": ") {
                    Some((k, v)) => {
                        metadata.insert(k.trim().to_string(), v.trim().to_string());
                    }
                    None => return Err(parse_err(lineno, "meta comment without `key: value`")),
                }
            } else if let Some(decl) = rest.strip_prefix("var ") {
                let parts: Vec<&str> = decl.split_whitespace().collect();
                let (name, directive) = match parts.as_slice() {
                    [name, "binary"] => (
                        name.to_string(),
                        VarDirective {
                            kind: VarKind::Binary,
                            lower: 0.0,
                            upper: 1.0,
                            branch_priority: 0,
                        },
                    ),
                    [name, "binary", "prio", p] => (
                        name.to_string(),
                        VarDirective {
                            kind: VarKind::Binary,
                            lower: 0.0,
                            upper: 1.0,
                            branch_priority: p.parse().map_err(|_| {
                                parse_err(lineno, format!("bad branch priority {p:?}"))
                            })?,
                        },
                    ),
                    [name, "continuous", lo, up] => (
                        name.to_string(),
                        VarDirective {
                            kind: VarKind::Continuous,
                            lower: parse_bound_word(lo, lineno)?,
                            upper: parse_bound_word(up, lineno)?,
                            branch_priority: 0,
                        },
                    ),
                    _ => return Err(parse_err(lineno, format!("bad var directive {decl:?}"))),
                };
                if var_directives.insert(name.clone(), directive).is_some() {
                    return Err(parse_err(lineno, format!("variable {name} declared twice")));
                }
                var_order.push(name);
            } else if let Some(tag) = rest.strip_prefix("tag:") {
                if section == "subject-to" {
                    row_toks.push((RowTok::Tag(tag.trim().to_string()), lineno));
                }
                // tag comments outside Subject To are ignored like any
                // other foreign comment
            }
            continue;
        }
        if let Some(kind) = section_of(trimmed) {
            match kind {
                "maximize" => {
                    maximize = true;
                    section = "minimize";
                }
                "generals" | "semis" => {
                    return Err(parse_err(lineno, format!("unsupported section {trimmed:?}")));
                }
                other => section = other,
            }
            continue;
        }
        match section {
            "preamble" => {
                return Err(parse_err(lineno, "expected a section header before expressions"))
            }
            "minimize" => lex_line(trimmed, lineno, &mut objective_toks)?,
            "subject-to" => {
                let mut toks = Vec::new();
                lex_line(trimmed, lineno, &mut toks)?;
                row_toks.extend(toks.into_iter().map(|(t, l)| (RowTok::Tok(t), l)));
            }
            "bounds" => {
                let mut toks = Vec::new();
                lex_line(trimmed, lineno, &mut toks)?;
                if !toks.is_empty() {
                    bounds_toks.push(toks);
                }
            }
            "binaries" => {
                let mut toks = Vec::new();
                lex_line(trimmed, lineno, &mut toks)?;
                for (t, l) in toks {
                    match t {
                        Tok::Word(w) => binary_names.push((w, l)),
                        other => {
                            return Err(parse_err(l, format!("unexpected token {other:?}")));
                        }
                    }
                }
            }
            "end" => return Err(parse_err(lineno, "content after End")),
            other => return Err(parse_err(lineno, format!("unhandled section {other}"))),
        }
    }

    // Objective: optional label, then one expression, no relation.
    let mut obj_expr = Expr::default();
    {
        let mut toks = objective_toks;
        if matches!(toks.first(), Some((Tok::Label(_), _))) {
            toks.remove(0);
        }
        let stop = parse_expr(&toks, 0, &mut obj_expr)?;
        if stop != toks.len() {
            let (_, l) = &toks[stop];
            return Err(parse_err(*l, "relation inside the objective"));
        }
        if obj_expr.terms.is_empty() {
            return Err(LpError::EmptyObjective);
        }
    }

    // Constraints: tag-comment* label? expression relation rhs, repeated.
    struct RawRow {
        tag: Option<String>,
        label: Option<String>,
        expr: Expr,
        sense: Sense,
        rhs: f64,
        line: usize,
    }
    let mut rows: Vec<RawRow> = Vec::new();
    let mut i = 0;
    while i < row_toks.len() {
        let mut tag = None;
        while let (RowTok::Tag(t), l) = &row_toks[i] {
            tag = Some(t.clone());
            i += 1;
            if i >= row_toks.len() {
                return Err(parse_err(*l, "tag comment without a row"));
            }
        }
        let mut label = None;
        if let (RowTok::Tok(Tok::Label(l)), _) = &row_toks[i] {
            label = Some(l.clone());
            i += 1;
        }
        // Collect this row's plain tokens through its relation, then the
        // (signed) right-hand side.
        let mut flat: Vec<(Tok, usize)> = Vec::new();
        let mut sense = None;
        let mut rhs = None;
        while i < row_toks.len() {
            match &row_toks[i] {
                (RowTok::Tag(l), _) => {
                    if sense.is_some() {
                        return Err(parse_err(0, format!("row with tag {l:?} lost its rhs")));
                    }
                    return Err(parse_err(0, "tag comment in the middle of a row"));
                }
                (RowTok::Tok(t), l) => {
                    if let Tok::Sense(s) = t {
                        if sense.is_some() {
                            return Err(parse_err(*l, "second relation in one row"));
                        }
                        sense = Some(*s);
                        flat.push((t.clone(), *l));
                        i += 1;
                    } else if sense.is_some() {
                        let (sign, value_tok, l) = match t {
                            Tok::Minus | Tok::Plus => {
                                let sign = if matches!(t, Tok::Minus) { -1.0 } else { 1.0 };
                                i += 1;
                                match row_toks.get(i) {
                                    Some((RowTok::Tok(tok), l2)) => (sign, tok.clone(), *l2),
                                    _ => return Err(parse_err(*l, "dangling sign in rhs")),
                                }
                            }
                            other => (1.0, other.clone(), *l),
                        };
                        match value_tok {
                            Tok::Num(v) => rhs = Some(sign * v),
                            other => {
                                return Err(parse_err(
                                    l,
                                    format!("expected rhs number, found {other:?}"),
                                ));
                            }
                        }
                        i += 1;
                        break;
                    } else {
                        flat.push((t.clone(), *l));
                        i += 1;
                    }
                }
            }
        }
        let line = flat.last().map(|(_, l)| *l).unwrap_or(0);
        let sense = sense.ok_or_else(|| parse_err(line, "row without a relation"))?;
        let rhs = rhs.ok_or_else(|| parse_err(line, "row without a right-hand side"))?;
        let mut expr = Expr::default();
        let stop = parse_expr(&flat, 0, &mut expr)?;
        if !matches!(flat.get(stop), Some((Tok::Sense(_), _))) {
            return Err(parse_err(line, "malformed row"));
        }
        if expr.terms.is_empty() {
            return Err(parse_err(line, "row without variables"));
        }
        rows.push(RawRow { tag, label, expr, sense, rhs, line });
    }

    // --- model assembly ---
    let mut model = MilpModel::new(model_name);
    model.metadata = metadata;

    if !var_directives.is_empty() {
        for name in &var_order {
            let d = &var_directives[name];
            if !(d.lower <= d.upper) {
                return Err(LpError::UnsupportedBounds(name.clone(), d.lower, d.upper));
            }
            model.add_var_raw(name.clone(), d.kind, d.lower, d.upper, d.branch_priority);
        }
        for (name, l) in &binary_names {
            if model.var_id(name).is_none() {
                return Err(parse_err(*l, format!("Binaries references undeclared {name}")));
            }
        }
    } else {
        // Appearance order: objective, rows, bounds, binaries.
        for (name, _) in &obj_expr.terms {
            declare_default(&mut model, name);
        }
        for row in &rows {
            for (name, _) in &row.expr.terms {
                declare_default(&mut model, name);
            }
        }
        for toks in &bounds_toks {
            for (t, _) in toks {
                if let Tok::Word(w) = t {
                    // Names in Bounds lines, skipping inf/free keywords.
                    if !w.eq_ignore_ascii_case("free") && parse_bound_word(w, 0).is_err() {
                        declare_default(&mut model, w);
                    }
                }
            }
        }
        for (name, _) in &binary_names {
            declare_default(&mut model, name);
        }
        for toks in &bounds_toks {
            apply_bounds_line(&mut model, toks)?;
        }
        for (name, _) in &binary_names {
            let id = model.var_id(name).expect("declared above");
            let var = &mut model.vars[id.0];
            var.kind = VarKind::Binary;
            var.lower = var.lower.max(0.0);
            var.upper = var.upper.min(1.0);
        }
    }

    let sign = if maximize { -1.0 } else { 1.0 };
    let obj_terms: Vec<(VarId, f64)> =
        resolve(&model, &obj_expr, "objective")?.into_iter().map(|(id, c)| (id, sign * c)).collect();
    model.set_objective(obj_terms);
    if model.objective.is_empty() {
        return Err(LpError::EmptyObjective);
    }

    for (idx, row) in rows.iter().enumerate() {
        let terms = resolve(&model, &row.expr, "a row")?;
        if super::merge_terms(terms.clone()).is_empty() {
            return Err(parse_err(row.line, "row coefficients cancel to nothing"));
        }
        let tag = row
            .tag
            .clone()
            .or_else(|| row.label.clone())
            .unwrap_or_else(|| format!("c{}", idx + 1));
        model.add_constraint(tag, terms, row.sense, row.rhs);
    }
    Ok(model)
}

fn apply_bounds_line(model: &mut MilpModel, toks: &[(Tok, usize)]) -> Result<(), LpError> {
    let lineno = toks[0].1;
    #[derive(Debug)]
    enum B {
        Num(f64),
        Name(usize),
        Sense(Sense),
        Free,
    }
    let mut items = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        match &toks[i].0 {
            Tok::Plus => {}
            Tok::Minus => {
                i += 1;
                match toks.get(i) {
                    Some((Tok::Num(v), _)) => items.push(B::Num(-v)),
                    Some((Tok::Word(w), l)) => items.push(B::Num(-parse_bound_word(w, *l)?)),
                    _ => return Err(parse_err(lineno, "dangling sign in bounds")),
                }
            }
            Tok::Num(v) => items.push(B::Num(*v)),
            Tok::Sense(s) => items.push(B::Sense(*s)),
            Tok::Word(w) => {
                if w.eq_ignore_ascii_case("free") {
                    items.push(B::Free);
                } else if let Some(id) = model.var_id(w) {
                    items.push(B::Name(id.0));
                } else {
                    items.push(B::Num(parse_bound_word(w, toks[i].1)?));
                }
            }
            Tok::Label(_) => return Err(parse_err(lineno, "label inside Bounds")),
        }
        i += 1;
    }
    match items.as_slice() {
        [B::Name(v), B::Free] => {
            model.vars[*v].lower = f64::NEG_INFINITY;
            model.vars[*v].upper = f64::INFINITY;
        }
        [B::Name(v), B::Sense(Sense::Le), B::Num(u)] => model.vars[*v].upper = *u,
        [B::Name(v), B::Sense(Sense::Ge), B::Num(l)] => model.vars[*v].lower = *l,
        [B::Name(v), B::Sense(Sense::Eq), B::Num(x)] => {
            model.vars[*v].lower = *x;
            model.vars[*v].upper = *x;
        }
        [B::Num(l), B::Sense(Sense::Le), B::Name(v), B::Sense(Sense::Le), B::Num(u)] => {
            model.vars[*v].lower = *l;
            model.vars[*v].upper = *u;
        }
        [B::Num(u), B::Sense(Sense::Ge), B::Name(v), B::Sense(Sense::Ge), B::Num(l)] => {
            model.vars[*v].lower = *l;
            model.vars[*v].upper = *u;
        }
        _ => return Err(parse_err(lineno, "malformed bounds line")),
    }
    Ok(())
}

/// Renders a named assignment as solution text: `# objective <v>` (when
/// given), then one `<name> <value>` line per variable, sorted by name.
pub fn write_sol(assignment: &BTreeMap<String, f64>, objective: Option<f64>) -> String {
    let mut out = String::new();
    if let Some(obj) = objective {
        let _ = writeln!(out, "# objective {}", fmt_num(obj));
    }
    for (name, value) in assignment {
        let _ = writeln!(out, "{name} {}", fmt_num(*value));
    }
    out
}

/// Parses solution text: `#` comments and blank lines are skipped, every
/// other line must be `<name> <value>`. Returns the assignment and the
/// objective value if a `# objective <v>` comment was present.
pub fn parse_sol(text: &str) -> Result<(BTreeMap<String, f64>, Option<f64>), LpError> {
    let mut out = BTreeMap::new();
    let mut objective = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("objective ") {
                objective = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| parse_err(lineno, "bad objective value in comment"))?,
                );
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let name = parts.next().ok_or_else(|| parse_err(lineno, "missing variable name"))?;
        let value: f64 = parts
            .next()
            .ok_or_else(|| parse_err(lineno, "missing value"))?
            .parse()
            .map_err(|_| parse_err(lineno, "value is not a number"))?;
        if parts.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens after value"));
        }
        if out.insert(name.to_string(), value).is_some() {
            return Err(parse_err(lineno, format!("duplicate entry for {name}")));
        }
    }
    Ok((out, objective))
}

#[cfg(test)]
mod tests {
    use super::super::{MilpModel, Sense};
    use super::*;

    fn sample_model() -> MilpModel {
        let mut m = MilpModel::new("sample");
        m.metadata.insert("formulation".into(), "demo".into());
        m.metadata.insert("paths".into(), "2".into());
        let y1 = m.add_binary("y_C");
        let y2 = m.add_binary("y_E#1");
        let t = m.add_continuous("th_k1_s0", 0.0, 5.0);
        let r = m.add_continuous("r_k1_s0_p1", 0.0, f64::INFINITY);
        let u = m.add_continuous("u_shift", -2.5, 7.0);
        let f = m.add_continuous("u_fixed", 3.0, 3.0);
        m.add_constraint("pick-one[k=1]", vec![(y1, 1.0), (y2, 1.0)], Sense::Eq, 1.0);
        m.add_constraint(
            "cap[link=(A,B)]",
            vec![(r, 1.0), (t, -0.001), (u, 2.0 / 3.0)],
            Sense::Le,
            4.5,
        );
        m.add_constraint("floor[k=1]", vec![(t, 1.0), (f, -1.0)], Sense::Ge, -0.25);
        m.set_objective(vec![(y1, 1.0), (y2, 1.0), (t, 0.001), (r, -1.0)]);
        m
    }

    #[test]
    fn export_parse_round_trip_is_exact_and_byte_stable() {
        let model = sample_model();
        let text = export_lp(&model).unwrap();
        let parsed = parse_lp(&text).unwrap();
        assert_eq!(parsed, model);
        let text2 = export_lp(&parsed).unwrap();
        assert_eq!(text2, text);
    }

    #[test]
    fn export_layout_has_expected_sections() {
        let text = export_lp(&sample_model()).unwrap();
        assert!(text.starts_with("\\ model sample\n"));
        assert!(text.contains("\\ meta formulation: demo\n"));
        assert!(text.contains("\\ var y_E#1 binary\n"));
        assert!(text.contains("\\ var r_k1_s0_p1 continuous 0 inf\n"));
        assert!(text.contains("Minimize\n obj: y_C + y_E#1 + 0.001 th_k1_s0 - r_k1_s0_p1\n"));
        assert!(text.contains("\\ tag: cap[link=(A,B)]\n"));
        // Terms print in variable-id order (the model stores rows sorted).
        assert!(
            text.contains(" c2: - 0.001 th_k1_s0 + r_k1_s0_p1 + 0.6666666666666666 u_shift <= 4.5\n")
        );
        assert!(text.contains(" th_k1_s0 <= 5\n"));
        assert!(text.contains(" -2.5 <= u_shift <= 7\n"));
        assert!(text.contains(" u_fixed = 3\n"));
        // Default-bound continuous variables get no bounds line.
        assert!(!text.contains(" r_k1_s0_p1 <="));
        assert!(text.trim_end().ends_with("End"));
    }

    #[test]
    fn shortest_float_formatting_preserves_values() {
        let mut m = MilpModel::new("precision");
        let a = m.add_continuous("a", 0.0, f64::INFINITY);
        let awkward = 2.0 / 3.0;
        m.add_constraint("row[r=1]", vec![(a, awkward)], Sense::Le, 0.1 + 0.2);
        m.set_objective(vec![(a, 1.0 + f64::EPSILON)]);
        let parsed = parse_lp(&export_lp(&m).unwrap()).unwrap();
        assert_eq!(parsed.constraints[0].terms[0].1, awkward);
        assert_eq!(parsed.constraints[0].rhs, 0.1 + 0.2);
        assert_eq!(parsed.objective[0].1, 1.0 + f64::EPSILON);
    }

    #[test]
    fn foreign_glued_file_parses() {
        let text = "Minimize\n obj: 2x+3y\nSubject To\n c1: x+y>=1\n r2: -x+2y<=3.5\n\
                    Bounds\n x <= 10\n -1 <= y <= 8\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert_eq!(m.num_vars(), 2);
        let x = m.var_id("x").unwrap();
        let y = m.var_id("y").unwrap();
        assert_eq!(m.objective, vec![(x, 2.0), (y, 3.0)]);
        assert_eq!(m.constraints.len(), 2);
        assert_eq!(m.constraints[0].tag, "c1");
        assert_eq!(m.constraints[1].terms, vec![(x, -1.0), (y, 2.0)]);
        assert_eq!(m.var(x).upper, 10.0);
        assert_eq!(m.var(y).lower, -1.0);
    }

    #[test]
    fn foreign_binaries_and_free_variables_parse() {
        let text = "Minimize\n obj: x + y + z\nSubject To\n c1: x + y + z >= 1\n\
                    Bounds\n z free\nBinaries\n x\n y\nEnd\n";
        let m = parse_lp(text).unwrap();
        let x = m.var_id("x").unwrap();
        assert_eq!(m.var(x).kind, VarKind::Binary);
        assert_eq!((m.var(x).lower, m.var(x).upper), (0.0, 1.0));
        let z = m.var_id("z").unwrap();
        assert_eq!(m.var(z).lower, f64::NEG_INFINITY);
        assert_eq!(m.var(z).kind, VarKind::Continuous);
    }

    #[test]
    fn wrapped_rows_parse() {
        let text = "Minimize\n obj: x\n + y\nSubject To\n c1: x + y\n + x <= \n 4\nEnd\n";
        let m = parse_lp(text).unwrap();
        let x = m.var_id("x").unwrap();
        // x appears twice in c1 and merges.
        assert_eq!(m.constraints[0].terms[0], (x, 2.0));
        assert_eq!(m.constraints[0].rhs, 4.0);
    }

    #[test]
    fn maximize_objective_is_negated_into_minimization() {
        let text = "Maximize\n obj: x\nSubject To\n c1: x <= 2\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert_eq!(m.objective[0].1, -1.0);
    }

    #[test]
    fn negative_rhs_and_archaic_senses_parse() {
        let text = "Minimize\n obj: x\nSubject To\n c1: x => -2\n c2: x =< 3\nEnd\n";
        let m = parse_lp(text).unwrap();
        assert_eq!(m.constraints[0].sense, Sense::Ge);
        assert_eq!(m.constraints[0].rhs, -2.0);
        assert_eq!(m.constraints[1].sense, Sense::Le);
    }

    #[test]
    fn export_rejects_empty_objective_and_illegal_names() {
        let mut m = MilpModel::new("bad");
        let a = m.add_binary("ok");
        m.add_constraint("row[r=1]", vec![(a, 1.0)], Sense::Le, 1.0);
        assert!(matches!(export_lp(&m), Err(LpError::EmptyObjective)));
        m.set_objective(vec![(a, 1.0)]);
        assert!(export_lp(&m).is_ok());

        for bad in ["with space", "has-dash", "1leading", "e9exp", ".dot", ""] {
            assert!(!legal_name(bad), "{bad:?} should be illegal");
        }
        for good in ["y_C", "x0_E#1_k1_s2", "th.total", "E#1", "edge_x", "ok2"] {
            assert!(legal_name(good), "{good:?} should be legal");
        }

        let mut m2 = MilpModel::new("bad2");
        let b = m2.add_binary("has-dash");
        m2.add_constraint("row[r=1]", vec![(b, 1.0)], Sense::Le, 1.0);
        m2.set_objective(vec![(b, 1.0)]);
        assert!(matches!(export_lp(&m2), Err(LpError::IllegalName(_))));
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(parse_lp("Minimize\n obj: \nSubject To\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x + 3\nSubject To\n c: x <= 1\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nSubject To\n c: x <= y\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nSubject To\n c: x\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nSubject To\n c: x - x <= 1\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nGenerals\n x\nEnd\n").is_err());
        assert!(parse_lp(" x <= 1\n").is_err());
    }

    #[test]
    fn sol_round_trip() {
        let mut a = BTreeMap::new();
        a.insert("y_C".to_string(), 1.0);
        a.insert("th_k1_s0".to_string(), 2.5);
        a.insert("r_k1_s0_p1".to_string(), 0.0);
        let text = write_sol(&a, Some(3.5));
        let (parsed, obj) = parse_sol(&text).unwrap();
        assert_eq!(parsed, a);
        assert_eq!(obj, Some(3.5));
        // Comment lines and blanks are tolerated.
        let (parsed2, obj2) = parse_sol("# solver x\n\nv 1\n").unwrap();
        assert_eq!(parsed2.len(), 1);
        assert_eq!(obj2, None);
        assert!(parse_sol("v 1 2\n").is_err());
        assert!(parse_sol("v\n").is_err());
        assert!(parse_sol("v 1\nv 2\n").is_err());
    }
}
