//! Experiment descriptions: subsystems with world-lines, interaction and
//! measurement events anchored at spacetime points, an initial state on an
//! initial flat surface, plus named query points and query requests.
//!
//! Scenarios are loaded from a section-based text format (`.scn`); see
//! `Scenario::parse` and the README for the grammar.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::hilbert::{
    apply_local, kron_state, mat_diff, mat_identity, LocalOperator, OperatorKind, SpaceDescriptor,
    StateVector,
};
use crate::spacetime::{causal_partial_order, side_of_surface, CausalSurface, Event, SurfaceSide};

pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Map event-id → chosen outcome name, for any subset of measurement events.
pub type OutcomeAssignment = BTreeMap<String, String>;

/// A piecewise-linear world-line of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldLine {
    pub subsystem: String,
    pub vertices: Vec<Event>,
}

impl WorldLine {
    /// Exact point-membership test (rational arithmetic on the stored
    /// coordinates; every finite f64 is an exact dyadic rational).
    pub fn contains(&self, e: Event) -> bool {
        if self.vertices.len() == 1 {
            return self.vertices[0] == e;
        }
        self.vertices.windows(2).any(|w| on_segment(e, w[0], w[1]))
    }

    pub fn t_start(&self) -> f64 {
        self.vertices.first().map(|v| v.t).unwrap_or(0.0)
    }

    pub fn t_end(&self) -> f64 {
        self.vertices.last().map(|v| v.t).unwrap_or(0.0)
    }

    /// Position at lab time `t`; the final segment's velocity is extrapolated
    /// past the last vertex (and the first segment's before the first).
    pub fn position_at(&self, t: f64) -> f64 {
        let vs = &self.vertices;
        if vs.len() == 1 {
            return vs[0].x;
        }
        let seg = vs
            .windows(2)
            .position(|w| t <= w[1].t)
            .unwrap_or(vs.len() - 2);
        let (a, b) = (vs[seg], vs[seg + 1]);
        let v = (b.x - a.x) / (b.t - a.t);
        a.x + v * (t - a.t)
    }
}

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
}

fn on_segment(e: Event, a: Event, b: Event) -> bool {
    if e.t < a.t || e.t > b.t {
        return false;
    }
    let lhs = (rat(e.x) - rat(a.x)) * (rat(b.t) - rat(a.t));
    let rhs = (rat(b.x) - rat(a.x)) * (rat(e.t) - rat(a.t));
    lhs == rhs
}

/// One named measurement outcome with its projector.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    /// Builtin registry name this projector was resolved from (for emit).
    pub source: String,
    pub projector: LocalOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    Interaction {
        /// Builtin registry name (for emit).
        source: String,
        unitary: LocalOperator,
    },
    Measurement {
        outcomes: Vec<Outcome>,
        /// Builtin family name the outcomes came from, if any (for emit).
        family: Option<String>,
    },
}

/// An interaction or measurement anchored at a spacetime point.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSpec {
    pub id: String,
    pub at: Event,
    pub targets: Vec<String>,
    pub kind: EventKind,
}

impl EventSpec {
    pub fn is_measurement(&self) -> bool {
        matches!(self.kind, EventKind::Measurement { .. })
    }

    pub fn outcome(&self, name: &str) -> Option<&Outcome> {
        match &self.kind {
            EventKind::Measurement { outcomes, .. } => outcomes.iter().find(|o| o.name == name),
            EventKind::Interaction { .. } => None,
        }
    }
}

/// A query request carried by the scenario file, interpreted by the CLI.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub kind: String,
    pub params: BTreeMap<String, String>,
}

/// A single validation violation; violations are data, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation(pub String);

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Resolver for `builtin.*` names referenced by scenario files.
pub trait BuiltinRegistry {
    /// A state over exactly the given labels (in that order).
    fn state(&self, name: &str, labels: &[String], space: &SpaceDescriptor) -> Result<StateVector>;
    /// An operator on the given targets.
    fn operator(
        &self,
        name: &str,
        targets: &[String],
        space: &SpaceDescriptor,
    ) -> Result<LocalOperator>;
    /// A complete named projector family (outcome name, projector).
    fn measurement_family(
        &self,
        name: &str,
        targets: &[String],
        space: &SpaceDescriptor,
    ) -> Result<Vec<(String, LocalOperator)>>;
}

/// A fully-resolved experiment description.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub space: SpaceDescriptor,
    pub worldlines: Vec<WorldLine>,
    pub events: Vec<EventSpec>,
    pub initial: StateVector,
    pub initial_surface: CausalSurface,
    pub points: BTreeMap<String, Event>,
    pub queries: Vec<Query>,
    /// Raw factor expressions of the initial state (for emit).
    pub initial_factors: Vec<String>,
}

impl Scenario {
    pub fn worldline_of(&self, subsystem: &str) -> Option<&WorldLine> {
        self.worldlines.iter().find(|w| w.subsystem == subsystem)
    }

    pub fn event_by_id(&self, id: &str) -> Option<&EventSpec> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn measurement_events(&self) -> impl Iterator<Item = &EventSpec> {
        self.events.iter().filter(|e| e.is_measurement())
    }

    pub fn named_point(&self, name: &str) -> Result<Event> {
        self.points
            .get(name)
            .copied()
            .ok_or_else(|| Error::Query(format!("unknown point name {name}")))
    }

    /// Events strictly before `surf`, in a deterministic linearization of the
    /// causal partial order. Errors if any event lies exactly on the surface.
    pub fn events_before(&self, surf: &CausalSurface) -> Result<Vec<&EventSpec>> {
        let mut before = Vec::new();
        for ev in &self.events {
            match side_of_surface(ev.at, surf) {
                SurfaceSide::On => {
                    return Err(Error::Geometry(format!(
                        "event {} lies exactly on surface {surf}; refusing to guess",
                        ev.id
                    )))
                }
                SurfaceSide::Before => before.push(ev),
                SurfaceSide::After => {}
            }
        }
        let coords: Vec<Event> = before.iter().map(|e| e.at).collect();
        let order = causal_partial_order(&coords)?;
        let lin = order.min_linearization()?;
        Ok(lin.into_iter().map(|i| before[i]).collect())
    }

    /// Checks every scenario invariant; empty result means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |msg: String| out.push(Violation(msg));

        for l in self.space.labels() {
            if l.dim < 2 {
                push(format!("subsystem {} has dimension {} < 2", l.name, l.dim));
            }
        }

        let mut seen = BTreeSet::new();
        for wl in &self.worldlines {
            if !seen.insert(wl.subsystem.clone()) {
                push(format!("subsystem {} has more than one world-line", wl.subsystem));
            }
            if self.space.position(&wl.subsystem).is_err() {
                push(format!("world-line references unknown subsystem {}", wl.subsystem));
            }
            if wl.vertices.is_empty() {
                push(format!("world-line of {} has no vertices", wl.subsystem));
            }
            for w in wl.vertices.windows(2) {
                if w[1].t <= w[0].t {
                    push(format!(
                        "world-line of {} has non-increasing time at {}",
                        wl.subsystem, w[1]
                    ));
                } else if (w[1].x - w[0].x).abs() > (w[1].t - w[0].t) {
                    push(format!(
                        "world-line of {} is superluminal on segment {} -> {}",
                        wl.subsystem, w[0], w[1]
                    ));
                }
            }
        }

        for (i, ev) in self.events.iter().enumerate() {
            for later in &self.events[i + 1..] {
                if later.at == ev.at {
                    push(format!("events {} and {} are coincident at {}", ev.id, later.id, ev.at));
                }
                if later.id == ev.id {
                    push(format!("duplicate event id {}", ev.id));
                }
            }
            if side_of_surface(ev.at, &self.initial_surface) != SurfaceSide::After {
                push(format!("event {} is not strictly after the initial surface", ev.id));
            }
            // Locality: an event may target only subsystems co-located at
            // its spacetime point.
            for target in &ev.targets {
                match self.worldline_of(target) {
                    Some(wl) => {
                        if !wl.contains(ev.at) {
                            push(format!(
                                "locality violation: event {} targets {} whose world-line does not pass through {}",
                                ev.id, target, ev.at
                            ));
                        }
                    }
                    None => push(format!(
                        "event {} targets {} which has no world-line",
                        ev.id, target
                    )),
                }
            }
            match &ev.kind {
                EventKind::Interaction { unitary, .. } => {
                    if unitary.kind() != OperatorKind::Unitary {
                        push(format!("interaction {} operator is not unitary", ev.id));
                    }
                    if unitary.targets() != ev.targets.as_slice() {
                        push(format!("interaction {} operator targets mismatch", ev.id));
                    }
                }
                EventKind::Measurement { outcomes, .. } => {
                    if outcomes.is_empty() {
                        push(format!("measurement {} has no outcomes", ev.id));
                        continue;
                    }
                    let d = outcomes[0].projector.dim();
                    let mut sum = vec![Complex64::new(0.0, 0.0); d * d];
                    for o in outcomes {
                        if o.projector.kind() != OperatorKind::Projector {
                            push(format!("outcome {} of {} is not a projector", o.name, ev.id));
                        }
                        if o.projector.targets() != ev.targets.as_slice() {
                            push(format!("outcome {} of {} targets mismatch", o.name, ev.id));
                        }
                        if o.projector.dim() == d {
                            for (s, m) in sum.iter_mut().zip(o.projector.matrix()) {
                                *s += m;
                            }
                        } else {
                            push(format!("outcome {} of {} dimension mismatch", o.name, ev.id));
                        }
                    }
                    if mat_diff(&sum, &mat_identity(d)) > COMPLETENESS_TOL {
                        push(format!("measurement {} projector family is not complete", ev.id));
                    }
                    for (a, oa) in outcomes.iter().enumerate() {
                        for ob in &outcomes[a + 1..] {
                            let prod = crate::hilbert::matmul(
                                oa.projector.matrix(),
                                ob.projector.matrix(),
                                d,
                            );
                            let zero = vec![Complex64::new(0.0, 0.0); d * d];
                            if mat_diff(&prod, &zero) > COMPLETENESS_TOL {
                                push(format!(
                                    "measurement {} outcomes {} and {} are not orthogonal",
                                    ev.id, oa.name, ob.name
                                ));
                            }
                        }
                    }
                }
            }
        }

        // No event may lie exactly on a query surface declared by the file.
        for surf in self.declared_query_surfaces() {
            for ev in &self.events {
                if side_of_surface(ev.at, &surf) == SurfaceSide::On {
                    push(format!("event {} lies exactly on query surface {surf}", ev.id));
                }
            }
        }

        // The initial state must cover the whole space and be normalized.
        if self.initial.space() != &self.space {
            push("initial state space does not match subsystem registry".into());
        }
        if (self.initial.norm() - 1.0).abs() > 1e-10 {
            push("initial state is not normalized".into());
        }

        out
    }

    /// Surfaces mentioned by `[query]` lines, resolved against named points.
    pub fn declared_query_surfaces(&self) -> Vec<CausalSurface> {
        let mut out = Vec::new();
        for q in &self.queries {
            if let Some(s) = q.params.get("surface") {
                if let Ok(surf) = parse_surface(s, &self.points) {
                    out.push(surf);
                }
            }
            let mut cone_points = Vec::new();
            for key in ["p", "pprime", "point", "point2"] {
                if let Some(name) = q.params.get(key) {
                    if let Ok(ev) = resolve_point(name, &self.points) {
                        out.push(CausalSurface::BackwardCone(ev));
                        cone_points.push(ev);
                    }
                }
            }
            if cone_points.len() == 2 {
                if let Ok(u) = CausalSurface::union_backward_cones(cone_points) {
                    out.push(u);
                }
            }
        }
        out
    }

    pub fn load(path: impl AsRef<Path>, registry: &dyn BuiltinRegistry) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        Scenario::parse(&text, registry)
    }

    /// Parses and fully validates a scenario from `.scn` text.
    pub fn parse(text: &str, registry: &dyn BuiltinRegistry) -> Result<Scenario> {
        let s = parse_unvalidated(text, registry)?;
        let violations = s.validate();
        if violations.is_empty() {
            Ok(s)
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Serializes back to `.scn` text; `load(emit(s))` reproduces `s`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for l in self.space.labels() {
            out.push_str(&format!("[subsystem] name={} dim={}\n", l.name, l.dim));
        }
        for wl in &self.worldlines {
            let pts: Vec<String> = wl.vertices.iter().map(|v| format!("{v}")).collect();
            out.push_str(&format!(
                "[worldline] subsystem={} points={}\n",
                wl.subsystem,
                pts.join(";")
            ));
        }
        if let CausalSurface::Flat { t0, rapidity } = self.initial_surface {
            out.push_str(&format!(
                "[initial] expr={} t0={} rapidity={}\n",
                self.initial_factors.join(";"),
                t0,
                rapidity
            ));
        }
        for ev in &self.events {
            match &ev.kind {
                EventKind::Interaction { source, .. } => {
                    out.push_str(&format!(
                        "[event] id={} at={} kind=interaction targets={} unitary={}\n",
                        ev.id,
                        ev.at,
                        ev.targets.join(","),
                        source
                    ));
                }
                EventKind::Measurement { outcomes, family } => {
                    let spec = match family {
                        Some(f) => f.clone(),
                        None => outcomes
                            .iter()
                            .map(|o| format!("{}:{}", o.name, o.source))
                            .collect::<Vec<_>>()
                            .join(","),
                    };
                    out.push_str(&format!(
                        "[event] id={} at={} kind=measurement targets={} outcomes={}\n",
                        ev.id,
                        ev.at,
                        ev.targets.join(","),
                        spec
                    ));
                }
            }
        }
        for (name, at) in &self.points {
            out.push_str(&format!("[point] name={name} at={at}\n"));
        }
        for q in &self.queries {
            out.push_str(&format!("[query] kind={}", q.kind));
            for (k, v) in &q.params {
                out.push_str(&format!(" {k}={v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Resolves `name` as a named point or an inline `(t,x)` pair.
pub fn resolve_point(name: &str, points: &BTreeMap<String, Event>) -> Result<Event> {
    if let Some(e) = points.get(name) {
        return Ok(*e);
    }
    if name.starts_with('(') {
        return parse_event(name, 0);
    }
    Err(Error::Query(format!("unknown point {name}")))
}

/// Parses a surface descriptor: `flat(t0)`, `flat(t0,phi)`, `sigma(P)`,
/// `sigma(P,P2,...)`, `eta(P)`; point arguments may be names or inline
/// coordinates.
pub fn parse_surface(s: &str, points: &BTreeMap<String, Event>) -> Result<CausalSurface> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| Error::Query(format!("malformed surface descriptor {s}")))?;
    if !s.ends_with(')') {
        return Err(Error::Query(format!("malformed surface descriptor {s}")));
    }
    let head = &s[..open];
    let body = &s[open + 1..s.len() - 1];
    let args = split_top_level(body, ',');
    match head {
        "flat" => {
            let t0: f64 = args
                .first()
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| Error::Query(format!("flat surface needs t0 in {s}")))?;
            let rapidity: f64 = match args.get(1) {
                Some(a) => a
                    .parse()
                    .map_err(|_| Error::Query(format!("bad rapidity in {s}")))?,
                None => 0.0,
            };
            Ok(CausalSurface::flat(t0, rapidity))
        }
        "eta" => {
            if args.len() != 1 {
                return Err(Error::Query(format!("eta takes one vertex in {s}")));
            }
            Ok(CausalSurface::ForwardCone(resolve_point(&args[0], points)?))
        }
        "sigma" => {
            let vs: Result<Vec<Event>> =
                args.iter().map(|a| resolve_point(a, points)).collect();
            let vs = vs?;
            if vs.len() == 1 {
                Ok(CausalSurface::BackwardCone(vs[0]))
            } else {
                CausalSurface::union_backward_cones(vs)
            }
        }
        _ => Err(Error::Query(format!("unknown surface kind {head}"))),
    }
}

/// Parses an outcome assignment list `id:name,id:name`.
pub fn parse_outcomes(s: &str) -> Result<OutcomeAssignment> {
    let mut oa = OutcomeAssignment::new();
    if s.trim().is_empty() {
        return Ok(oa);
    }
    for part in split_top_level(s, ',') {
        let (id, name) = part
            .split_once(':')
            .ok_or_else(|| Error::Query(format!("bad outcome assignment {part}")))?;
        oa.insert(id.trim().to_string(), name.trim().to_string());
    }
    Ok(oa)
}

fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            c if c == sep && depth == 0 => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn parse_event(s: &str, line: usize) -> Result<Event> {
    let body = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("expected (t,x), got {s}"),
        })?;
    let (t, x) = body.split_once(',').ok_or_else(|| Error::Parse {
        line,
        message: format!("expected (t,x), got {s}"),
    })?;
    let t: f64 = t.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad time coordinate {t}"),
    })?;
    let x: f64 = x.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad position coordinate {x}"),
    })?;
    if !t.is_finite() || !x.is_finite() {
        return Err(Error::Parse { line, message: "non-finite coordinate".into() });
    }
    Ok(Event::new(t, x))
}

/// Parses `re`, `imi`, or `re+imi` / `re-imi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let err = || Error::Algebra(format!("bad complex literal {s}"));
    let bytes = s.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    if let Some(im_str) = s.strip_suffix('i') {
        match split {
            Some(i) if i < im_str.len() => {
                let re: f64 = s[..i].parse().map_err(|_| err())?;
                let sign = if bytes[i] as char == '-' { -1.0 } else { 1.0 };
                let mag = &s[i + 1..s.len() - 1];
                let mag: f64 = if mag.is_empty() { 1.0 } else { mag.parse().map_err(|_| err())? };
                Ok(Complex64::new(re, sign * mag))
            }
            _ => {
                let im: f64 = if im_str.is_empty() || im_str == "-" || im_str == "+" {
                    format!("{im_str}1").parse().map_err(|_| err())?
                } else {
                    im_str.parse().map_err(|_| err())?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        Ok(Complex64::new(s.parse().map_err(|_| err())?, 0.0))
    }
}

/// Formats a complex amplitude so that `parse_complex` round-trips it.
pub fn format_complex(c: Complex64) -> String {
    if c.im >= 0.0 || c.im.is_nan() {
        format!("{}+{}i", c.re, c.im)
    } else {
        format!("{}-{}i", c.re, -c.im)
    }
}

struct RawLine {
    line: usize,
    section: String,
    kv: Vec<(String, String)>,
}

fn tokenize(text: &str) -> Result<Vec<RawLine>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        if !s.starts_with('[') {
            return Err(Error::Parse { line, message: format!("expected [section], got {s}") });
        }
        let close = s.find(']').ok_or_else(|| Error::Parse {
            line,
            message: "unterminated [section]".into(),
        })?;
        let section = s[1..close].to_string();
        let mut kv = Vec::new();
        for tok in s[close + 1..].split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected key=value, got {tok}"),
            })?;
            kv.push((k.to_string(), v.to_string()));
        }
        out.push(RawLine { line, section, kv });
    }
    Ok(out)
}

fn get<'a>(kv: &'a [(String, String)], key: &str) -> Option<&'a str> {
    kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn require<'a>(kv: &'a [(String, String)], key: &str, line: usize) -> Result<&'a str> {
    get(kv, key).ok_or_else(|| Error::Parse { line, message: format!("missing key {key}") })
}

fn parse_unvalidated(text: &str, registry: &dyn BuiltinRegistry) -> Result<Scenario> {
    let lines = tokenize(text)?;

    let mut subsystems: Vec<(String, usize)> = Vec::new();
    for l in lines.iter().filter(|l| l.section == "subsystem") {
        let name = require(&l.kv, "name", l.line)?.to_string();
        if subsystems.iter().any(|(n, _)| *n == name) {
            return Err(Error::Parse {
                line: l.line,
                message: format!("duplicate subsystem name {name}"),
            });
        }
        let dim: usize = require(&l.kv, "dim", l.line)?.parse().map_err(|_| Error::Parse {
            line: l.line,
            message: "bad dim".into(),
        })?;
        subsystems.push((name, dim));
    }
    if subsystems.is_empty() {
        return Err(Error::Parse { line: 0, message: "no [subsystem] sections".into() });
    }
    let space = SpaceDescriptor::new(subsystems)?;

    let mut worldlines = Vec::new();
    for l in lines.iter().filter(|l| l.section == "worldline") {
        let subsystem = require(&l.kv, "subsystem", l.line)?.to_string();
        let pts = require(&l.kv, "points", l.line)?;
        let vertices: Result<Vec<Event>> =
            pts.split(';').map(|p| parse_event(p, l.line)).collect();
        worldlines.push(WorldLine { subsystem, vertices: vertices? });
    }

    let initial_line = lines
        .iter()
        .find(|l| l.section == "initial")
        .ok_or_else(|| Error::Parse { line: 0, message: "no [initial] section".into() })?;
    let expr = require(&initial_line.kv, "expr", initial_line.line)?;
    let t0: f64 = match get(&initial_line.kv, "t0") {
        Some(v) => v.parse().map_err(|_| Error::Parse {
            line: initial_line.line,
            message: "bad t0".into(),
        })?,
        None => 0.0,
    };
    let rapidity: f64 = match get(&initial_line.kv, "rapidity") {
        Some(v) => v.parse().map_err(|_| Error::Parse {
            line: initial_line.line,
            message: "bad rapidity".into(),
        })?,
        None => 0.0,
    };
    let initial_factors: Vec<String> = split_top_level(expr, ';');
    let initial = build_initial(&initial_factors, &space, registry, initial_line.line)?;

    let mut events = Vec::new();
    for l in lines.iter().filter(|l| l.section == "event") {
        let id = require(&l.kv, "id", l.line)?.to_string();
        let at = parse_event(require(&l.kv, "at", l.line)?, l.line)?;
        let targets: Vec<String> = require(&l.kv, "targets", l.line)?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let kind = match require(&l.kv, "kind", l.line)? {
            "interaction" => {
                let source = require(&l.kv, "unitary", l.line)?.to_string();
                let unitary = registry.operator(&source, &targets, &space)?;
                EventKind::Interaction { source, unitary }
            }
            "measurement" => {
                let spec = require(&l.kv, "outcomes", l.line)?;
                let (outcomes, family) = if spec.contains(':') {
                    let mut os = Vec::new();
                    for part in split_top_level(spec, ',') {
                        let (name, source) = part.split_once(':').ok_or_else(|| Error::Parse {
                            line: l.line,
                            message: format!("bad outcome spec {part}"),
                        })?;
                        let projector = registry.operator(source, &targets, &space)?;
                        os.push(Outcome {
                            name: name.to_string(),
                            source: source.to_string(),
                            projector,
                        });
                    }
                    (os, None)
                } else {
                    let os = registry
                        .measurement_family(spec, &targets, &space)?
                        .into_iter()
                        .map(|(name, projector)| Outcome {
                            name,
                            source: spec.to_string(),
                            projector,
                        })
                        .collect();
                    (os, Some(spec.to_string()))
                };
                EventKind::Measurement { outcomes, family }
            }
            other => {
                return Err(Error::Parse {
                    line: l.line,
                    message: format!("unknown event kind {other}"),
                })
            }
        };
        events.push(EventSpec { id, at, targets, kind });
    }

    let mut points = BTreeMap::new();
    for l in lines.iter().filter(|l| l.section == "point") {
        let name = require(&l.kv, "name", l.line)?.to_string();
        let at = parse_event(require(&l.kv, "at", l.line)?, l.line)?;
        points.insert(name, at);
    }

    let mut queries = Vec::new();
    for l in lines.iter().filter(|l| l.section == "query") {
        let kind = require(&l.kv, "kind", l.line)?.to_string();
        let params: BTreeMap<String, String> = l
            .kv
            .iter()
            .filter(|(k, _)| k != "kind")
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        queries.push(Query { kind, params });
    }

    Ok(Scenario {
        space,
        worldlines,
        events,
        initial,
        initial_surface: CausalSurface::flat(t0, rapidity),
        points,
        queries,
        initial_factors,
    })
}

/// Builds the initial state from `;`-separated factors. Each factor is
/// `builtin.name(L1,L2,...)` or `amps(L1,...):c0,c1,...` with complex
/// entries in row-major order.
fn build_initial(
    factors: &[String],
    space: &SpaceDescriptor,
    registry: &dyn BuiltinRegistry,
    line: usize,
) -> Result<StateVector> {
    let mut parts = Vec::new();
    let mut covered: BTreeSet<String> = BTreeSet::new();
    for f in factors {
        let open = f.find('(').ok_or_else(|| Error::Parse {
            line,
            message: format!("factor {f} needs label arguments"),
        })?;
        let close = f[open..].find(')').map(|i| i + open).ok_or_else(|| Error::Parse {
            line,
            message: format!("unterminated label list in {f}"),
        })?;
        let head = &f[..open];
        let labels: Vec<String> =
            f[open + 1..close].split(',').map(|s| s.trim().to_string()).collect();
        for lbl in &labels {
            if !covered.insert(lbl.clone()) {
                return Err(Error::Parse {
                    line,
                    message: format!("subsystem {lbl} appears in two initial factors"),
                });
            }
        }
        let sub_space = SpaceDescriptor::new(
            labels
                .iter()
                .map(|l| Ok((l.clone(), space.dim_of(l)?)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let state = if head == "amps" {
            let list = f[close + 1..].strip_prefix(':').ok_or_else(|| Error::Parse {
                line,
                message: format!("amps factor needs :list in {f}"),
            })?;
            let amps: Result<Vec<Complex64>> =
                split_top_level(list, ',').iter().map(|s| parse_complex(s)).collect();
            StateVector::new(sub_space, amps?)?
        } else {
            registry.state(head, &labels, &sub_space)?
        };
        parts.push((labels, state));
    }
    // Factors may list subsystems in any order overall; reassemble in space
    // order by tensoring in file order and requiring full coverage.
    for l in space.names() {
        if !covered.contains(l) {
            return Err(Error::Parse {
                line,
                message: format!("initial state does not cover subsystem {l}"),
            });
        }
    }
    let states: Vec<StateVector> = parts.into_iter().map(|(_, s)| s).collect();
    let joint = kron_state(&states)?;
    reorder_to_space(&joint, space)
}

/// Re-expresses a state over the same label set in `space`'s label order.
pub fn reorder_to_space(psi: &StateVector, space: &SpaceDescriptor) -> Result<StateVector> {
    if psi.space() == space {
        return Ok(psi.clone());
    }
    let from = psi.space();
    if from.labels().len() != space.labels().len() {
        return Err(Error::Algebra("label sets differ".into()));
    }
    let positions: Vec<usize> = space
        .names()
        .map(|n| from.position(n))
        .collect::<Result<Vec<_>>>()?;
    let from_dims: Vec<usize> = from.labels().iter().map(|l| l.dim).collect();
    let from_strides = from.strides();
    let to_dims: Vec<usize> = space.labels().iter().map(|l| l.dim).collect();
    let total = space.total_dim();
    if total != from.total_dim() {
        return Err(Error::Algebra("dimension mismatch".into()));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    for (to_index, amp) in amps.iter_mut().enumerate() {
        // Decompose the destination index, scatter into source strides.
        let mut rem = to_index;
        let mut from_index = 0usize;
        for k in (0..to_dims.len()).rev() {
            let digit = rem % to_dims[k];
            rem /= to_dims[k];
            let p = positions[k];
            debug_assert!(digit < from_dims[p]);
            from_index += digit * from_strides[p];
        }
        *amp = psi.amplitudes()[from_index];
    }
    StateVector::new(space.clone(), amps)
}

/// Applies the unitary of an interaction, or the assigned outcome's projector
/// of a measurement, without renormalization.
pub fn apply_event(
    ev: &EventSpec,
    oa: &OutcomeAssignment,
    psi: &StateVector,
) -> Result<StateVector> {
    match &ev.kind {
        EventKind::Interaction { unitary, .. } => apply_local(unitary, psi),
        EventKind::Measurement { outcomes, .. } => {
            let chosen = oa.get(&ev.id).ok_or_else(|| {
                Error::Query(format!("no outcome assigned to measurement {}", ev.id))
            })?;
            let outcome = outcomes
                .iter()
                .find(|o| &o.name == chosen)
                .ok_or_else(|| {
                    Error::Query(format!("measurement {} has no outcome {chosen}", ev.id))
                })?;
            apply_local(&outcome.projector, psi)
        }
    }
}
