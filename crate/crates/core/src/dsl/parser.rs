use std::collections::BTreeSet;

use crate::net::{PlaceKind, TransitionKind};
use crate::time::{parse_time, Bound, TimeInterval};

use super::lexer::{is_identifier, is_reference, lex_line, Lexeme, Tok};
use super::{AnalysisDef, BlockDef, ModelDocument, ParseDiagnostic, PlaceDecl, Severity, TransDecl};

/// Outcome of [`parse_model`]: a document unless some diagnostic is an Error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseResult {
    pub document: Option<ModelDocument>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseResult {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    /// The document, or every diagnostic when loading is impossible.
    pub fn into_result(self) -> Result<ModelDocument, Vec<ParseDiagnostic>> {
        match self.document {
            Some(doc) => Ok(doc),
            None => Err(self.diagnostics),
        }
    }
}

type Failure = (usize, String);

/// An attribute value: a plain word, an interval, or a comma list.
enum Value {
    Word(String),
    Interval(String, String),
    List(Vec<String>),
}

struct Attr {
    key: String,
    value: Value,
    column: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Word(w) => format!("'{w}'"),
        Tok::LBrace => "'{'".into(),
        Tok::RBrace => "'}'".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Plus => "'+'".into(),
        Tok::Equals => "'='".into(),
        Tok::Arrow => "'->'".into(),
        Tok::Stray(c) => format!("'{c}'"),
    }
}

struct Cursor<'a> {
    toks: &'a [Lexeme],
    pos: usize,
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Lexeme> {
        self.toks.get(self.pos)
    }

    fn column(&self) -> usize {
        self.peek().map_or(self.end_column, |l| l.column)
    }

    fn next(&mut self) -> Option<&'a Lexeme> {
        let l = self.toks.get(self.pos);
        self.pos += 1;
        l
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), Failure> {
        match self.next() {
            Some(l) if l.tok == tok => Ok(()),
            Some(l) => Err((l.column, format!("expected {what}, found {}", describe(&l.tok)))),
            None => Err((self.end_column, format!("expected {what} before end of line"))),
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, usize), Failure> {
        match self.next() {
            Some(Lexeme { tok: Tok::Word(w), column }) => Ok((w.clone(), *column)),
            Some(l) => Err((l.column, format!("expected {what}, found {}", describe(&l.tok)))),
            None => Err((self.end_column, format!("expected {what} before end of line"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), Failure> {
        let (w, col) = self.word(what)?;
        if is_identifier(&w) {
            Ok((w, col))
        } else {
            Err((col, format!("invalid identifier '{w}'")))
        }
    }

    fn reference(&mut self, what: &str) -> Result<(String, usize), Failure> {
        let (w, col) = self.word(what)?;
        if is_reference(&w) {
            Ok((w, col))
        } else {
            Err((col, format!("invalid identifier '{w}'")))
        }
    }

    fn done(&self) -> Result<(), Failure> {
        match self.peek() {
            None => Ok(()),
            Some(l) => Err((l.column, format!("unexpected {}", describe(&l.tok)))),
        }
    }

    fn attrs(&mut self, stop_at_brace: bool) -> Result<Vec<Attr>, Failure> {
        let mut out: Vec<Attr> = Vec::new();
        while let Some(l) = self.peek() {
            if stop_at_brace && l.tok == Tok::RBrace {
                break;
            }
            let (key, column) = self.word("attribute")?;
            if out.iter().any(|a| a.key == key) {
                return Err((column, format!("duplicate attribute '{key}'")));
            }
            self.expect(Tok::Equals, "'='")?;
            let value = if self.peek().is_some_and(|l| l.tok == Tok::LBracket) {
                self.next();
                let (lo, _) = self.word("interval lower bound")?;
                self.expect(Tok::Comma, "','")?;
                let (hi, _) = self.word("interval upper bound")?;
                self.expect(Tok::RBracket, "']'")?;
                Value::Interval(lo, hi)
            } else {
                let (first, _) = self.word("attribute value")?;
                let mut items = vec![first];
                while self.peek().is_some_and(|l| l.tok == Tok::Comma) {
                    self.next();
                    items.push(self.word("list item")?.0);
                }
                if items.len() == 1 {
                    Value::Word(items.pop().expect("one item"))
                } else {
                    Value::List(items)
                }
            };
            out.push(Attr { key, value, column });
        }
        Ok(out)
    }
}

fn word_value(attr: &Attr) -> Result<&str, Failure> {
    match &attr.value {
        Value::Word(w) => Ok(w),
        _ => Err((attr.column, format!("attribute '{}' takes a single value", attr.key))),
    }
}

fn unknown_attr(attr: &Attr) -> Failure {
    (attr.column, format!("unknown attribute '{}'", attr.key))
}

fn parse_interval(attr: &Attr) -> Result<TimeInterval, Failure> {
    let Value::Interval(lo, hi) = &attr.value else {
        return Err((attr.column, "malformed interval, expected [min,max]".into()));
    };
    let min = parse_time(lo).map_err(|e| (attr.column, format!("malformed interval: {e}")))?;
    let max: Bound = hi.parse().map_err(|e| (attr.column, format!("malformed interval: {e}")))?;
    let interval = TimeInterval::new(min, max);
    if !interval.is_well_formed() {
        return Err((attr.column, "interval min exceeds max".into()));
    }
    Ok(interval)
}

/// Parses a model file. Recovery is per line, so one pass reports every
/// malformed declaration.
pub fn parse_model(source: &str) -> ParseResult {
    let mut p = Parser::default();
    for (n, line) in source.lines().enumerate() {
        p.line(n + 1, line);
    }
    p.finish(source)
}

struct Pending {
    line: usize,
    column: usize,
    block: String,
    refs: Vec<(String, bool)>,
}

#[derive(Default)]
struct Parser {
    doc: ModelDocument,
    diags: Vec<ParseDiagnostic>,
    open: Option<(String, usize)>,
    /// Endpoint checks deferred to the end of the document.
    pending: Vec<Pending>,
    /// Column and line of each declared attribute reference to check later.
    watch_refs: Vec<(usize, usize, String, String)>,
    call_refs: Vec<(usize, usize, String)>,
}

impl Parser {
    fn error(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic { line, column, message: message.into(), severity: Severity::Error });
    }

    fn line(&mut self, line: usize, text: &str) {
        let toks = lex_line(text);
        let end_column = text.chars().count().max(1);
        if toks.is_empty() {
            return;
        }
        let mut cur = Cursor { toks: &toks, pos: 0, end_column };
        if let Err((column, message)) = self.statement(line, &mut cur) {
            self.error(line, column.min(end_column), message);
        }
    }

    fn statement(&mut self, line: usize, cur: &mut Cursor) -> Result<(), Failure> {
        let first = cur.peek().expect("non-empty line");
        let keyword = match &first.tok {
            Tok::Word(w) => w.clone(),
            Tok::RBrace => {
                cur.next();
                cur.done()?;
                if self.open.take().is_none() {
                    return Err((first.column, "unmatched '}'".into()));
                }
                return Ok(());
            }
            other => return Err((first.column, format!("unexpected {}", describe(other)))),
        };
        let kw_col = first.column;
        cur.next();
        match keyword.as_str() {
            "net" => {
                let (name, col) = cur.ident("net name")?;
                cur.expect(Tok::LBrace, "'{'")?;
                cur.done()?;
                if let Some((open, _)) = &self.open {
                    return Err((kw_col, format!("net '{name}' declared inside net '{open}'")));
                }
                if self.doc.blocks.contains_key(&name) {
                    self.open = Some((name.clone(), line));
                    return Err((col, format!("duplicate net '{name}'")));
                }
                self.doc.blocks.insert(name.clone(), BlockDef::default());
                self.open = Some((name, line));
                Ok(())
            }
            "analysis" => {
                cur.expect(Tok::LBrace, "'{'")?;
                let attrs = cur.attrs(true)?;
                cur.expect(Tok::RBrace, "'}'")?;
                cur.done()?;
                if self.open.is_some() {
                    return Err((kw_col, "analysis section inside a net block".into()));
                }
                if self.doc.analysis.is_some() {
                    return Err((kw_col, "duplicate analysis section".into()));
                }
                self.doc.analysis = Some(analysis(attrs)?);
                Ok(())
            }
            "place" | "stopwatch" | "trans" | "arc" | "invariant" | "normal" => {
                self.declaration(line, &keyword, kw_col, cur)
            }
            other => Err((kw_col, format!("unknown keyword '{other}'"))),
        }
    }

    fn block(&mut self, kw_col: usize) -> Result<(String, &mut BlockDef), Failure> {
        let Some((name, _)) = self.open.clone() else {
            return Err((kw_col, "declaration outside a net block".into()));
        };
        // A duplicate net keeps parsing into a scratch block.
        let block = self.doc.blocks.entry(name.clone()).or_default();
        Ok((name, block))
    }

    fn declaration(&mut self, line: usize, keyword: &str, kw_col: usize, cur: &mut Cursor) -> Result<(), Failure> {
        match keyword {
            "place" => {
                let (id, col) = cur.ident("place id")?;
                let attrs = cur.attrs(false)?;
                let mut decl = PlaceDecl { kind: PlaceKind::Normal, init: 0 };
                for a in &attrs {
                    match a.key.as_str() {
                        "kind" => {
                            let w = word_value(a)?;
                            decl.kind = PlaceKind::from_keyword(w)
                                .ok_or_else(|| (a.column, format!("unknown place kind '{w}'")))?;
                        }
                        "init" => {
                            decl.init = match word_value(a)? {
                                "0" => 0,
                                "1" => 1,
                                w => return Err((a.column, format!("init must be 0 or 1, found '{w}'"))),
                            }
                        }
                        _ => return Err(unknown_attr(a)),
                    }
                }
                let (_, block) = self.block(kw_col)?;
                if block.places.contains_key(&id) || block.transitions.contains_key(&id) {
                    return Err((col, format!("duplicate id '{id}'")));
                }
                block.places.insert(id, decl);
            }
            "stopwatch" => {
                let (id, col) = cur.ident("stopwatch id")?;
                let attrs = cur.attrs(false)?;
                let mut alpha = None;
                for a in &attrs {
                    match a.key.as_str() {
                        "alpha_max" => {
                            let w = word_value(a)?;
                            alpha = Some(
                                w.parse::<Bound>().map_err(|e| (a.column, format!("invalid alpha_max: {e}")))?,
                            );
                        }
                        _ => return Err(unknown_attr(a)),
                    }
                }
                let alpha = alpha.ok_or((col, format!("stopwatch '{id}' needs alpha_max")))?;
                let (_, block) = self.block(kw_col)?;
                if block.stopwatches.insert(id.clone(), alpha).is_some() {
                    return Err((col, format!("duplicate stopwatch '{id}'")));
                }
            }
            "trans" => {
                let (id, col) = cur.ident("transition id")?;
                let attrs = cur.attrs(false)?;
                let mut interval = None;
                let mut kind = TransitionKind::Normal;
                let (mut watch, mut calls, mut label) = (None, None, None);
                for a in &attrs {
                    match a.key.as_str() {
                        "interval" => interval = Some(parse_interval(a)?),
                        "kind" => {
                            let w = word_value(a)?;
                            kind = TransitionKind::from_keyword(w)
                                .ok_or_else(|| (a.column, format!("unknown transition kind '{w}'")))?;
                        }
                        "watch" | "calls" | "label" => {
                            let w = word_value(a)?;
                            if !is_identifier(w) {
                                return Err((a.column, format!("invalid identifier '{w}'")));
                            }
                            let slot = match a.key.as_str() {
                                "watch" => &mut watch,
                                "calls" => &mut calls,
                                _ => &mut label,
                            };
                            *slot = Some((w.to_string(), a.column));
                        }
                        _ => return Err(unknown_attr(a)),
                    }
                }
                let interval = interval.ok_or((col, format!("transition '{id}' needs an interval")))?;
                if kind.needs_stopwatch() != watch.is_some() {
                    let msg = if watch.is_some() {
                        format!("only stop and resume transitions take a stopwatch ('{id}')")
                    } else {
                        format!("{} transition '{id}' needs watch=<stopwatch>", kind.keyword())
                    };
                    return Err((col, msg));
                }
                if calls.is_some() && kind != TransitionKind::Call {
                    return Err((col, format!("only call transitions take calls= ('{id}')")));
                }
                let (name, block) = self.block(kw_col)?;
                if block.places.contains_key(&id) || block.transitions.contains_key(&id) {
                    return Err((col, format!("duplicate id '{id}'")));
                }
                block.transitions.insert(
                    id,
                    TransDecl {
                        interval,
                        kind,
                        watch: watch.as_ref().map(|w| w.0.clone()),
                        calls: calls.as_ref().map(|c| c.0.clone()),
                        label: label.map(|l| l.0),
                    },
                );
                if let Some((w, c)) = watch {
                    self.watch_refs.push((line, c, name.clone(), w));
                }
                if let Some((callee, c)) = calls {
                    self.call_refs.push((line, c, callee));
                }
            }
            "arc" => {
                let (from, col) = cur.reference("arc source")?;
                cur.expect(Tok::Arrow, "'->'")?;
                let (to, _) = cur.reference("arc target")?;
                cur.done()?;
                let (name, block) = self.block(kw_col)?;
                if !block.arcs.insert((from.clone(), to.clone())) {
                    return Err((col, format!("duplicate arc {from} -> {to}")));
                }
                self.pending.push(Pending { line, column: col, block: name, refs: vec![(from, true), (to, true)] });
            }
            "invariant" => {
                let (first, col) = cur.reference("place id")?;
                let mut places = vec![first];
                while cur.peek().is_some_and(|l| l.tok == Tok::Plus) {
                    cur.next();
                    places.push(cur.reference("place id")?.0);
                }
                cur.expect(Tok::Equals, "'='")?;
                let (constant, c_col) = cur.word("invariant constant")?;
                cur.done()?;
                let constant: u32 =
                    constant.parse().map_err(|_| (c_col, format!("invalid invariant constant '{constant}'")))?;
                let (name, block) = self.block(kw_col)?;
                block.invariants.insert((places.clone(), constant));
                self.pending.push(Pending {
                    line,
                    column: col,
                    block: name,
                    refs: places.into_iter().map(|p| (p, false)).collect(),
                });
            }
            "normal" => {
                cur.expect(Tok::LBrace, "'{'")?;
                let mut places = BTreeSet::new();
                let col = cur.column();
                if cur.peek().is_some_and(|l| l.tok != Tok::RBrace) {
                    places.insert(cur.reference("place id")?.0);
                    while cur.peek().is_some_and(|l| l.tok == Tok::Comma) {
                        cur.next();
                        places.insert(cur.reference("place id")?.0);
                    }
                }
                cur.expect(Tok::RBrace, "'}'")?;
                cur.done()?;
                let (name, block) = self.block(kw_col)?;
                if block.normal.is_some() {
                    return Err((kw_col, "duplicate normal set".into()));
                }
                block.normal = Some(places.clone());
                self.pending.push(Pending {
                    line,
                    column: col,
                    block: name,
                    refs: places.into_iter().map(|p| (p, false)).collect(),
                });
            }
            _ => unreachable!("dispatched keywords only"),
        }
        Ok(())
    }

    fn exists(&self, block: &str, reference: &str, transitions_too: bool) -> bool {
        let (b, id) = reference.split_once('.').unwrap_or((block, reference));
        self.doc.blocks.get(b).is_some_and(|blk| {
            blk.places.contains_key(id) || (transitions_too && blk.transitions.contains_key(id))
        })
    }

    fn finish(mut self, source: &str) -> ParseResult {
        if let Some((name, line)) = self.open.take() {
            self.error(line, 1, format!("net '{name}' is never closed"));
        }
        for p in std::mem::take(&mut self.pending) {
            for (r, transitions_too) in &p.refs {
                if !self.exists(&p.block, r, *transitions_too) {
                    self.error(p.line, p.column, format!("unknown endpoint '{r}'"));
                }
            }
            if p.refs.len() == 2 && p.refs.iter().all(|(_, t)| *t) && self.exists(&p.block, &p.refs[0].0, true)
                && self.exists(&p.block, &p.refs[1].0, true)
            {
                let is_place = |r: &str| self.exists(&p.block, r, false);
                if is_place(&p.refs[0].0) == is_place(&p.refs[1].0) {
                    self.error(p.line, p.column, "an arc must join a place and a transition");
                }
            }
        }
        for (line, col, block, w) in std::mem::take(&mut self.watch_refs) {
            if !self.doc.blocks.get(&block).is_some_and(|b| b.stopwatches.contains_key(&w)) {
                self.error(line, col, format!("unknown stopwatch '{w}'"));
            }
        }
        for (line, col, callee) in std::mem::take(&mut self.call_refs) {
            if !self.doc.blocks.contains_key(&callee) {
                self.diags.push(ParseDiagnostic {
                    line,
                    column: col,
                    message: format!("call to undefined net '{callee}'"),
                    severity: Severity::Warning,
                });
            }
        }
        if self.doc.blocks.is_empty() {
            let line = source.lines().count().max(1);
            self.diags.push(ParseDiagnostic {
                line,
                column: 1,
                message: "no net block declared".into(),
                severity: Severity::Warning,
            });
        }
        self.diags.sort_by_key(|d| (d.line, d.column));
        let failed = self.diags.iter().any(|d| d.severity == Severity::Error);
        ParseResult { document: (!failed).then_some(self.doc), diagnostics: self.diags }
    }
}

fn analysis(attrs: Vec<Attr>) -> Result<AnalysisDef, Failure> {
    let mut def = AnalysisDef::default();
    for a in &attrs {
        match a.key.as_str() {
            "target" => {
                let w = word_value(a)?;
                if !is_reference(w) {
                    return Err((a.column, format!("invalid identifier '{w}'")));
                }
                def.target = Some(w.to_string());
            }
            "extra_targets" => {
                let items = match &a.value {
                    Value::Word(w) => vec![w.clone()],
                    Value::List(items) => items.clone(),
                    Value::Interval(..) => return Err((a.column, "extra_targets takes a list of places".into())),
                };
                if let Some(bad) = items.iter().find(|i| !is_reference(i)) {
                    return Err((a.column, format!("invalid identifier '{bad}'")));
                }
                def.extra_targets = items;
            }
            "depth_limit" => {
                let w = word_value(a)?;
                def.depth_limit =
                    Some(w.parse().map_err(|_| (a.column, format!("invalid depth_limit '{w}'")))?);
            }
            "alpha_max" => {
                let w = word_value(a)?;
                def.alpha_max = Some(w.parse().map_err(|e| (a.column, format!("invalid alpha_max: {e}")))?);
            }
            _ => return Err(unknown_attr(a)),
        }
    }
    Ok(def)
}
