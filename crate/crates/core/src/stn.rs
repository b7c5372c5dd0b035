//! Search trajectory networks over decision-space locations.

use std::collections::{BTreeMap, BTreeSet};

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};

use crate::error::{Error, Result};
use crate::problems::{pf_distance, Problem, ScalingBounds};
use crate::runlog::{RunLog, RunLogRecord};
use crate::scalar::Scalar;
use crate::scalarization::Aggregation;
use crate::solution::Front;

pub const DEFAULT_PRECISION: u32 = 2;

/// Bound-normalised coordinates rounded to `precision` decimals, stored as
/// integer multiples of `10^-precision`.
pub type Location = Vec<i64>;

/// Rounds half up; coordinates are clamped to the box before normalisation.
pub fn map_location<T: Scalar>(x: &[T], bounds: &[(T, T)], precision: u32) -> Location {
    let scale = 10f64.powi(precision as i32);
    x.iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| {
            let range = (hi - lo).to_f64_lossy();
            let u = if range > 0.0 {
                ((v - lo).to_f64_lossy() / range).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (u * scale + 0.5).floor() as i64
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeAttrs {
    pub count: u64,
    pub start: bool,
    pub end: bool,
    pub pareto: bool,
    pub origins: BTreeSet<String>,
}

impl NodeAttrs {
    pub fn shared(&self) -> bool {
        self.origins.len() >= 2
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeAttrs {
    pub count: u64,
    pub origins: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StnGraph {
    pub precision: u32,
    pub nodes: BTreeMap<Location, NodeAttrs>,
    pub edges: BTreeMap<(Location, Location), EdgeAttrs>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StnMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub shared: usize,
    pub pf_nodes: usize,
}

fn check_origin(origin: &str) -> Result<()> {
    if origin.is_empty() || origin.contains(',') || origin.chars().any(char::is_control) {
        return Err(Error::usage(format!("invalid origin id {origin:?}")));
    }
    Ok(())
}

impl StnGraph {
    pub fn new(precision: u32) -> Self {
        Self {
            precision,
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn visit(&mut self, loc: &Location, origin: &str) -> &mut NodeAttrs {
        let node = self.nodes.entry(loc.clone()).or_default();
        node.count += 1;
        node.origins.insert(origin.to_string());
        node
    }

    /// Records a transition; self-loops are ignored.
    pub fn traverse(&mut self, from: &Location, to: &Location, origin: &str) {
        if from == to {
            return;
        }
        let edge = self.edges.entry((from.clone(), to.clone())).or_default();
        edge.count += 1;
        edge.origins.insert(origin.to_string());
    }

    pub fn metrics(&self) -> StnMetrics {
        StnMetrics {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            shared: self.nodes.values().filter(|n| n.shared()).count(),
            pf_nodes: self.nodes.values().filter(|n| n.pareto).count(),
        }
    }

    /// Every edge endpoint is a node and every count is positive.
    pub fn is_consistent(&self) -> bool {
        self.nodes.values().all(|n| n.count >= 1)
            && self
                .edges
                .iter()
                .all(|((a, b), e)| e.count >= 1 && self.nodes.contains_key(a) && self.nodes.contains_key(b))
    }

    /// Replaces every origin with `origin`; used to label one algorithm's graph.
    pub fn relabel(&mut self, origin: &str) {
        let one: BTreeSet<String> = [origin.to_string()].into();
        for n in self.nodes.values_mut() {
            n.origins = one.clone();
        }
        for e in self.edges.values_mut() {
            e.origins = one.clone();
        }
    }
}

pub fn stn_metrics(g: &StnGraph) -> StnMetrics {
    g.metrics()
}

/// Graph union: counts summed, flags and origins united.
pub fn merge(a: &StnGraph, b: &StnGraph) -> Result<StnGraph> {
    if a.precision != b.precision {
        return Err(Error::usage(format!(
            "cannot merge graphs with precision {} and {}",
            a.precision, b.precision
        )));
    }
    let mut out = a.clone();
    for (loc, n) in &b.nodes {
        let m = out.nodes.entry(loc.clone()).or_default();
        m.count += n.count;
        m.start |= n.start;
        m.end |= n.end;
        m.pareto |= n.pareto;
        m.origins.extend(n.origins.iter().cloned());
    }
    for (key, e) in &b.edges {
        let m = out.edges.entry(key.clone()).or_default();
        m.count += e.count;
        m.origins.extend(e.origins.iter().cloned());
    }
    Ok(out)
}

/// Union of the per-vector graphs of one algorithm.
pub fn merge_stns(graphs: &[StnGraph]) -> Result<StnGraph> {
    let (first, rest) = graphs.split_first().ok_or_else(|| Error::usage("no graphs to merge"))?;
    rest.iter().try_fold(first.clone(), |acc, g| merge(&acc, g))
}

/// Union of two algorithms' graphs; nodes reached by both are shared.
pub fn merge_algorithms(a: &StnGraph, b: &StnGraph) -> Result<StnGraph> {
    merge(a, b)
}

/// The `m` extreme vectors followed by the one closest to the centroid, without repeats.
pub fn default_vector_ids<T: Scalar>(weights: &[Vec<T>]) -> Vec<usize> {
    let Some(m) = weights.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut ids = Vec::with_capacity(m + 1);
    let argbest = |key: &dyn Fn(&[T]) -> T| {
        (0..weights.len())
            .min_by(|&a, &b| key(&weights[a]).partial_cmp(&key(&weights[b])).unwrap().then(a.cmp(&b)))
            .expect("non-empty")
    };
    for j in 0..m {
        ids.push(argbest(&|w: &[T]| -w[j]));
    }
    let centre = T::one() / T::from_usize_lossy(m);
    ids.push(argbest(&|w: &[T]| w.iter().map(|&v| (v - centre) * (v - centre)).sum()));
    let mut seen = BTreeSet::new();
    ids.retain(|i| seen.insert(*i));
    ids
}

/// Population snapshots of one run in generation order.
fn snapshots<T: Scalar>(log: &RunLog<T>) -> Vec<(u64, Vec<&RunLogRecord<T>>)> {
    let mut by_gen: BTreeMap<u64, Vec<&RunLogRecord<T>>> = BTreeMap::new();
    for r in log.population_records() {
        by_gen.entry(r.generation).or_default().push(r);
    }
    by_gen.into_iter().collect()
}

/// Snapshot member minimising the unpenalised aggregation for `weight`, with
/// the snapshot scaled by its own bounds. Infeasible members only compete when
/// nothing in the snapshot is feasible.
pub fn representative<'a, T: Scalar>(
    snapshot: &[&'a RunLogRecord<T>],
    weight: &[T],
    aggregation: Aggregation,
) -> Option<&'a RunLogRecord<T>> {
    let any_feasible = snapshot.iter().any(|r| r.feasible);
    let pool: Vec<&RunLogRecord<T>> = snapshot
        .iter()
        .copied()
        .filter(|r| r.feasible || !any_feasible)
        .collect();
    let m = pool.first()?.f.len();
    let bounds = ScalingBounds::from_points(m, pool.iter().map(|r| r.f.as_slice()));
    let lambda = aggregation.effective_weights(weight);
    let z = vec![T::zero(); m];
    let score = |r: &RunLogRecord<T>| crate::scalarization::wt_unchecked(&bounds.scale(&r.f), &lambda, &z);
    let mut best: Option<(T, &RunLogRecord<T>)> = None;
    for r in pool {
        let s = score(r);
        if best.is_none_or(|(b, _)| s < b) {
            best = Some((s, r));
        }
    }
    best.map(|(_, r)| r)
}

/// Trajectory of one tracked vector accumulated over `logs`.
pub fn build_vector_stn<T: Scalar>(
    logs: &[RunLog<T>],
    origin: &str,
    weight: &[T],
    aggregation: Aggregation,
    bounds: &[(T, T)],
    precision: u32,
    is_pareto: &dyn Fn(&RunLogRecord<T>) -> bool,
) -> Result<StnGraph> {
    if logs.is_empty() {
        return Err(Error::usage("no run logs to build a trajectory network from"));
    }
    check_origin(origin)?;
    let mut g = StnGraph::new(precision);
    for log in logs {
        let mut prev: Option<Location> = None;
        let trajectory: Vec<&RunLogRecord<T>> = snapshots(log)
            .iter()
            .filter_map(|(_, snap)| representative(snap, weight, aggregation))
            .collect();
        let last = trajectory.len().saturating_sub(1);
        for (k, r) in trajectory.iter().enumerate() {
            let loc = map_location(&r.x, bounds, precision);
            let pareto = is_pareto(r);
            let node = g.visit(&loc, origin);
            node.start |= k == 0;
            node.end |= k == last;
            node.pareto |= pareto;
            if let Some(p) = &prev {
                g.traverse(p, &loc, origin);
            }
            prev = Some(loc);
        }
    }
    Ok(g)
}

pub type RecordPredicate<'a, T> = Box<dyn Fn(&RunLogRecord<T>) -> bool + Send + Sync + 'a>;

/// Pareto-membership test for representatives: within `eps` of the analytic
/// front when the problem has one, otherwise not dominated by the pooled set.
pub fn pareto_predicate<'a, T: Scalar>(
    problem: &'a dyn Problem<T>,
    pool: Option<Vec<Vec<T>>>,
    eps: T,
) -> Result<RecordPredicate<'a, T>> {
    if problem.pareto_front_point(T::zero()).is_some() {
        return Ok(Box::new(move |r: &RunLogRecord<T>| {
            r.feasible && pf_distance(problem, &r.f).is_some_and(|d| d <= eps)
        }));
    }
    let pool = pool.ok_or_else(|| Error::usage("pooled reference set required without an analytic front"))?;
    let front = Front::new(&pool);
    Ok(Box::new(move |r: &RunLogRecord<T>| {
        r.feasible && !front.dominates(&r.f)
    }))
}

fn format_location(loc: &Location, precision: u32) -> String {
    let unit = 10i64.pow(precision);
    loc.iter()
        .map(|&k| {
            if precision == 0 {
                k.to_string()
            } else {
                format!(
                    "{}.{:0w$}",
                    k.div_euclid(unit),
                    k.rem_euclid(unit),
                    w = precision as usize
                )
            }
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_location(text: &str, precision: u32) -> std::result::Result<Location, String> {
    let unit = 10i64.pow(precision);
    text.split(';')
        .map(|c| {
            let bad = || format!("bad location coordinate {c:?}");
            match c.split_once('.') {
                None if precision == 0 => c.parse::<i64>().map_err(|_| bad()),
                Some((int, frac)) if frac.len() == precision as usize => {
                    let i: i64 = int.parse().map_err(|_| bad())?;
                    let f: i64 = frac.parse().map_err(|_| bad())?;
                    Ok(i * unit + f)
                }
                _ => Err(bad()),
            }
        })
        .collect()
}

fn join_origins(o: &BTreeSet<String>) -> String {
    o.iter().cloned().collect::<Vec<_>>().join(",")
}

fn split_origins(s: &str) -> BTreeSet<String> {
    s.split(',').filter(|o| !o.is_empty()).map(str::to_string).collect()
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_dot(g: &StnGraph) -> String {
    let mut out = String::from("digraph stn {\n");
    out.push_str(&format!("  graph [precision={}];\n", g.precision));
    for (loc, n) in &g.nodes {
        out.push_str(&format!(
            "  {} [count={}, start={}, end={}, pareto={}, shared={}, origins={}];\n",
            dot_quote(&format_location(loc, g.precision)),
            n.count,
            n.start,
            n.end,
            n.pareto,
            n.shared(),
            dot_quote(&join_origins(&n.origins))
        ));
    }
    for ((a, b), e) in &g.edges {
        out.push_str(&format!(
            "  {} -> {} [count={}, origins={}];\n",
            dot_quote(&format_location(a, g.precision)),
            dot_quote(&format_location(b, g.precision)),
            e.count,
            dot_quote(&join_origins(&e.origins))
        ));
    }
    out.push_str("}\n");
    out
}

/// Splits `"quoted" rest` into the unescaped quoted part and the remainder.
fn take_quoted(s: &str) -> Option<(String, &str)> {
    let mut chars = s.strip_prefix('"')?.char_indices();
    let mut out = String::new();
    while let Some((i, c)) = chars.next() {
        match c {
            '\\' => out.push(chars.next()?.1),
            '"' => return Some((out, &s[i + 2..])),
            c => out.push(c),
        }
    }
    None
}

fn parse_dot_attrs(s: &str) -> Option<BTreeMap<String, String>> {
    let mut rest = s.trim().strip_prefix('[')?.trim_start();
    let mut attrs = BTreeMap::new();
    loop {
        if let Some(tail) = rest.strip_prefix(']') {
            return (tail.trim() == ";").then_some(attrs);
        }
        let (key, tail) = rest.split_once('=')?;
        let (value, tail) = if tail.starts_with('"') {
            take_quoted(tail)?
        } else {
            let end = tail.find([',', ']'])?;
            (tail[..end].trim().to_string(), &tail[end..])
        };
        attrs.insert(key.trim().to_string(), value);
        rest = tail.trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
}

fn attr<'a>(attrs: &'a BTreeMap<String, String>, key: &str) -> std::result::Result<&'a str, String> {
    attrs
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| format!("missing attribute {key}"))
}

fn parse_flag(s: &str) -> std::result::Result<bool, String> {
    s.parse().map_err(|_| format!("bad boolean {s:?}"))
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    s.parse().map_err(|_| format!("bad count {s:?}"))
}

/// Parses the output of [`export_dot`].
pub fn parse_dot(text: &str) -> Result<StnGraph> {
    let mut g: Option<StnGraph> = None;
    let mut closed = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let fail = |m: String| Error::parse(line_no, m);
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if closed {
            return Err(fail("content after closing brace".into()));
        }
        if line == "digraph stn {" {
            continue;
        }
        if line == "}" {
            closed = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("graph ") {
            let attrs = parse_dot_attrs(rest).ok_or_else(|| fail("bad graph attributes".into()))?;
            let p = attr(&attrs, "precision").map_err(fail)?;
            g = Some(StnGraph::new(
                p.parse().map_err(|_| fail(format!("bad precision {p:?}")))?,
            ));
            continue;
        }
        let graph = g.as_mut().ok_or_else(|| fail("precision must precede nodes".into()))?;
        let (first, rest) = take_quoted(line).ok_or_else(|| fail("expected quoted node id".into()))?;
        let from = parse_location(&first, graph.precision).map_err(fail)?;
        let rest = rest.trim_start();
        if let Some(tail) = rest.strip_prefix("->") {
            let (second, tail) = take_quoted(tail.trim_start()).ok_or_else(|| fail("expected edge target".into()))?;
            let to = parse_location(&second, graph.precision).map_err(fail)?;
            let attrs = parse_dot_attrs(tail).ok_or_else(|| fail("bad edge attributes".into()))?;
            let e = EdgeAttrs {
                count: parse_count(attr(&attrs, "count").map_err(fail)?).map_err(fail)?,
                origins: split_origins(attr(&attrs, "origins").map_err(fail)?),
            };
            graph.edges.insert((from, to), e);
        } else {
            let attrs = parse_dot_attrs(rest).ok_or_else(|| fail("bad node attributes".into()))?;
            let n = NodeAttrs {
                count: parse_count(attr(&attrs, "count").map_err(fail)?).map_err(fail)?,
                start: parse_flag(attr(&attrs, "start").map_err(fail)?).map_err(fail)?,
                end: parse_flag(attr(&attrs, "end").map_err(fail)?).map_err(fail)?,
                pareto: parse_flag(attr(&attrs, "pareto").map_err(fail)?).map_err(fail)?,
                origins: split_origins(attr(&attrs, "origins").map_err(fail)?),
            };
            graph.nodes.insert(from, n);
        }
    }
    let g = g.ok_or_else(|| Error::parse(1, "missing graph header"))?;
    if !closed {
        return Err(Error::parse(text.lines().count(), "missing closing brace"));
    }
    if !g.is_consistent() {
        return Err(Error::parse(1, "edge endpoint without node"));
    }
    Ok(g)
}

const GRAPHML_NS: &str = "http://graphml.graphdrawing.org/xmlns";
const NODE_KEYS: [(&str, &str); 6] = [
    ("count", "long"),
    ("start", "boolean"),
    ("end", "boolean"),
    ("pareto", "boolean"),
    ("shared", "boolean"),
    ("origins", "string"),
];

fn xml_err(e: impl std::fmt::Display) -> Error {
    Error::usage(format!("xml: {e}"))
}

fn write_data(w: &mut Writer<Vec<u8>>, key: &str, value: &str) -> Result<()> {
    let mut start = BytesStart::new("data");
    start.push_attribute(("key", key));
    w.write_event(Event::Start(start)).map_err(xml_err)?;
    w.write_event(Event::Text(BytesText::new(value))).map_err(xml_err)?;
    w.write_event(Event::End(BytesEnd::new("data"))).map_err(xml_err)?;
    Ok(())
}

pub fn export_graphml(g: &StnGraph) -> Result<String> {
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .map_err(xml_err)?;
    let mut root = BytesStart::new("graphml");
    root.push_attribute(("xmlns", GRAPHML_NS));
    w.write_event(Event::Start(root)).map_err(xml_err)?;
    let mut key = |id: &str, domain: &str, name: &str, ty: &str| {
        let mut k = BytesStart::new("key");
        k.push_attribute(("id", id));
        k.push_attribute(("for", domain));
        k.push_attribute(("attr.name", name));
        k.push_attribute(("attr.type", ty));
        w.write_event(Event::Empty(k)).map_err(xml_err)
    };
    key("precision", "graph", "precision", "int")?;
    for (name, ty) in NODE_KEYS {
        key(name, "node", name, ty)?;
    }
    key("edge_count", "edge", "count", "long")?;
    key("edge_origins", "edge", "origins", "string")?;

    let mut graph = BytesStart::new("graph");
    graph.push_attribute(("id", "stn"));
    graph.push_attribute(("edgedefault", "directed"));
    w.write_event(Event::Start(graph)).map_err(xml_err)?;
    write_data(&mut w, "precision", &g.precision.to_string())?;
    for (loc, n) in &g.nodes {
        let mut node = BytesStart::new("node");
        node.push_attribute(("id", format_location(loc, g.precision).as_str()));
        w.write_event(Event::Start(node)).map_err(xml_err)?;
        write_data(&mut w, "count", &n.count.to_string())?;
        write_data(&mut w, "start", &n.start.to_string())?;
        write_data(&mut w, "end", &n.end.to_string())?;
        write_data(&mut w, "pareto", &n.pareto.to_string())?;
        write_data(&mut w, "shared", &n.shared().to_string())?;
        write_data(&mut w, "origins", &join_origins(&n.origins))?;
        w.write_event(Event::End(BytesEnd::new("node"))).map_err(xml_err)?;
    }
    for ((a, b), e) in &g.edges {
        let mut edge = BytesStart::new("edge");
        edge.push_attribute(("source", format_location(a, g.precision).as_str()));
        edge.push_attribute(("target", format_location(b, g.precision).as_str()));
        w.write_event(Event::Start(edge)).map_err(xml_err)?;
        write_data(&mut w, "edge_count", &e.count.to_string())?;
        write_data(&mut w, "edge_origins", &join_origins(&e.origins))?;
        w.write_event(Event::End(BytesEnd::new("edge"))).map_err(xml_err)?;
    }
    w.write_event(Event::End(BytesEnd::new("graph"))).map_err(xml_err)?;
    w.write_event(Event::End(BytesEnd::new("graphml"))).map_err(xml_err)?;
    let mut text = String::from_utf8(w.into_inner()).map_err(xml_err)?;
    text.push('\n');
    Ok(text)
}

enum Element {
    Node(String, BTreeMap<String, String>),
    Edge(String, String, BTreeMap<String, String>),
}

/// Parses the output of [`export_graphml`].
pub fn parse_graphml(text: &str) -> Result<StnGraph> {
    let line_of = |pos: u64| {
        text.as_bytes()[..(pos as usize).min(text.len())]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1
    };
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);
    let mut precision: Option<u32> = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut current: Option<Element> = None;
    let mut data_key: Option<String> = None;
    let mut graph_data: BTreeMap<String, String> = BTreeMap::new();

    loop {
        let pos = reader.buffer_position();
        let fail = |m: String| Error::parse(line_of(pos), m);
        let event = reader.read_event().map_err(|e| fail(e.to_string()))?;
        match event {
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() != b"data" => {
                let mut attrs = BTreeMap::new();
                for a in e.attributes() {
                    let a = a.map_err(|e| fail(e.to_string()))?;
                    let k = String::from_utf8_lossy(a.key.as_ref()).into_owned();
                    let v = a.unescape_value().map_err(|e| fail(e.to_string()))?.into_owned();
                    attrs.insert(k, v);
                }
                let get = |k: &str| {
                    attrs
                        .get(k)
                        .cloned()
                        .ok_or_else(|| fail(format!("missing {k} attribute")))
                };
                match e.name().as_ref() {
                    b"node" => current = Some(Element::Node(get("id")?, BTreeMap::new())),
                    b"edge" => current = Some(Element::Edge(get("source")?, get("target")?, BTreeMap::new())),
                    _ => {}
                }
            }
            Event::Start(e) => {
                let key = e
                    .try_get_attribute("key")
                    .map_err(|e| fail(e.to_string()))?
                    .ok_or_else(|| fail("data without key".into()))?;
                data_key = Some(key.unescape_value().map_err(|e| fail(e.to_string()))?.into_owned());
            }
            Event::Text(t) => {
                let value = t.unescape().map_err(|e| fail(e.to_string()))?.into_owned();
                let key = data_key.clone().ok_or_else(|| fail("text outside data".into()))?;
                match current.as_mut() {
                    Some(Element::Node(_, d)) | Some(Element::Edge(_, _, d)) => {
                        d.insert(key, value);
                    }
                    None => {
                        graph_data.insert(key, value);
                    }
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"data" => {
                    // empty text means an empty value
                    if let Some(key) = data_key.take() {
                        match current.as_mut() {
                            Some(Element::Node(_, d)) | Some(Element::Edge(_, _, d)) => {
                                d.entry(key).or_default();
                            }
                            None => {
                                graph_data.entry(key).or_default();
                            }
                        }
                    }
                }
                b"node" | b"edge" => elements.extend(current.take()),
                b"graph" => {
                    let p = graph_data
                        .get("precision")
                        .ok_or_else(|| fail("missing precision".into()))?;
                    precision = Some(p.parse().map_err(|_| fail(format!("bad precision {p:?}")))?);
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }

    let precision = precision.ok_or_else(|| Error::parse(1, "missing graph element"))?;
    let mut g = StnGraph::new(precision);
    for el in elements {
        let fail = |m: String| Error::parse(1, m);
        match el {
            Element::Node(id, d) => {
                let loc = parse_location(&id, precision).map_err(fail)?;
                let n = NodeAttrs {
                    count: parse_count(attr(&d, "count").map_err(fail)?).map_err(fail)?,
                    start: parse_flag(attr(&d, "start").map_err(fail)?).map_err(fail)?,
                    end: parse_flag(attr(&d, "end").map_err(fail)?).map_err(fail)?,
                    pareto: parse_flag(attr(&d, "pareto").map_err(fail)?).map_err(fail)?,
                    origins: split_origins(attr(&d, "origins").map_err(fail)?),
                };
                g.nodes.insert(loc, n);
            }
            Element::Edge(a, b, d) => {
                let key = (
                    parse_location(&a, precision).map_err(fail)?,
                    parse_location(&b, precision).map_err(fail)?,
                );
                let e = EdgeAttrs {
                    count: parse_count(attr(&d, "edge_count").map_err(fail)?).map_err(fail)?,
                    origins: split_origins(attr(&d, "edge_origins").map_err(fail)?),
                };
                g.edges.insert(key, e);
            }
        }
    }
    if !g.is_consistent() {
        return Err(Error::parse(1, "edge endpoint without node"));
    }
    Ok(g)
}
