//! Flat certificates: JSON `{host, class, blocks, trace}` and a line-oriented
//! text form (`host <json> class Dk`, then one block per line).
//!
//! Undirected certificates carry `ublocks` instead of `class`/`blocks`.

use serde::{Deserialize, Serialize};

use crate::catalog::{Block, HeptClass, Label};
use crate::design::{Decomposition, PlanNode};
use crate::error::{Error, Result};
use crate::hosts::HostSpec;
use crate::ingredients::UBlock;
use crate::verifier::{verify, verify_undirected, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::Malformed(format!("unknown format {s:?}"))),
        }
    }
}

/// A parsed certificate of either kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Directed(Decomposition),
    Undirected { host: HostSpec, blocks: Vec<UBlock> },
}

impl Certificate {
    pub fn verify(&self) -> Report {
        match self {
            Certificate::Directed(d) => verify(d),
            Certificate::Undirected { host, blocks } => verify_undirected(blocks, host),
        }
    }

    pub fn host(&self) -> &HostSpec {
        match self {
            Certificate::Directed(d) => &d.host,
            Certificate::Undirected { host, .. } => host,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    host: HostSpec,
    class: Option<HeptClass>,
    blocks: Option<Vec<[Label; 7]>>,
    ublocks: Option<Vec<UBlock>>,
    trace: Option<PlanNode>,
}

fn compact<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("certificate parts serialize")
}

fn json_lines<T: Serialize>(items: &[T]) -> String {
    let body: Vec<String> = items.iter().map(|x| format!("    {}", compact(x))).collect();
    if body.is_empty() {
        "[]".into()
    } else {
        format!("[\n{}\n  ]", body.join(",\n"))
    }
}

/// JSON certificate with one block per line.
pub fn render_json(d: &Decomposition) -> String {
    let labels: Vec<[Label; 7]> = d.blocks.iter().map(|b| b.labels).collect();
    format!(
        "{{\n  \"host\": {},\n  \"class\": {},\n  \"blocks\": {},\n  \"trace\": {}\n}}\n",
        compact(&d.host),
        compact(&d.class),
        json_lines(&labels),
        compact(&d.trace)
    )
}

pub fn render_undirected_json(host: &HostSpec, blocks: &[UBlock]) -> String {
    format!("{{\n  \"host\": {},\n  \"ublocks\": {}\n}}\n", compact(host), json_lines(blocks))
}

pub fn render_text(d: &Decomposition) -> String {
    let mut out = format!("host {} class {}\n", compact(&d.host), d.class);
    for b in &d.blocks {
        let l: Vec<String> = b.labels.iter().map(|x| x.to_string()).collect();
        out.push_str(&l.join(" "));
        out.push('\n');
    }
    out
}

pub fn render_undirected_text(host: &HostSpec, blocks: &[UBlock]) -> String {
    let mut out = format!("host {} ublocks\n", compact(host));
    for b in blocks {
        let l: Vec<String> = b.labels().iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("{} {}\n", b.kind(), l.join(" ")));
    }
    out
}

pub fn render(d: &Decomposition, format: Format) -> String {
    match format {
        Format::Json => render_json(d),
        Format::Text => render_text(d),
    }
}

/// Parses either form; the first non-blank character decides which.
pub fn parse(text: &str) -> Result<Certificate> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

fn parse_json(text: &str) -> Result<Certificate> {
    let raw: Raw = serde_json::from_str(text)?;
    match (raw.class, raw.blocks, raw.ublocks) {
        (Some(class), Some(blocks), None) => {
            let blocks = blocks.into_iter().map(|labels| Block { class, labels }).collect();
            let trace = raw.trace.unwrap_or_else(|| PlanNode::leaf("unknown"));
            Ok(Certificate::Directed(Decomposition::new(raw.host, class, blocks, trace)))
        }
        (None, None, Some(blocks)) => Ok(Certificate::Undirected { host: raw.host, blocks }),
        _ => Err(Error::Malformed("expected either class + blocks or ublocks".into())),
    }
}

fn parse_labels(line: &str, lineno: usize) -> Result<Vec<Label>> {
    line.split_whitespace()
        .map(|t| t.parse::<Label>().map_err(|_| Error::Malformed(format!("line {lineno}: bad label {t:?}"))))
        .collect()
}

fn parse_text(text: &str) -> Result<Certificate> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Malformed("empty certificate".into()))?;
    let rest =
        header.strip_prefix("host ").ok_or_else(|| Error::Malformed("header must start with \"host \"".into()))?;
    let (host_json, tail) = if let Some(h) = rest.strip_suffix(" ublocks") {
        (h, None)
    } else {
        let (h, c) = rest
            .rsplit_once(" class ")
            .ok_or_else(|| Error::Malformed("header must end with \"class Dk\" or \"ublocks\"".into()))?;
        (h, Some(c.trim()))
    };
    let host: HostSpec = serde_json::from_str(host_json)?;
    match tail {
        Some(class) => {
            let class: HeptClass = class.parse().map_err(|e: Error| Error::Malformed(e.to_string()))?;
            let mut blocks = Vec::new();
            for (i, line) in lines {
                let l = parse_labels(line, i + 1)?;
                let labels: [Label; 7] =
                    l.try_into().map_err(|_| Error::Malformed(format!("line {}: expected 7 labels", i + 1)))?;
                blocks.push(Block { class, labels });
            }
            Ok(Certificate::Directed(Decomposition::new(host, class, blocks, PlanNode::leaf("unknown"))))
        }
        None => {
            let mut blocks = Vec::new();
            for (i, line) in lines {
                let (kind, rest) = line.trim().split_once(' ').unwrap_or((line.trim(), ""));
                let l = parse_labels(rest, i + 1)?;
                let bad = || Error::Malformed(format!("line {}: {kind} with {} labels", i + 1, l.len()));
                let b = match kind {
                    "K3" => UBlock::Triangle(l.clone().try_into().map_err(|_| bad())?),
                    "K5" => UBlock::Clique5(l.clone().try_into().map_err(|_| bad())?),
                    "C7" => UBlock::Cycle7(l.clone().try_into().map_err(|_| bad())?),
                    "I" => UBlock::FactorEdge(l.clone().try_into().map_err(|_| bad())?),
                    _ => return Err(Error::Malformed(format!("line {}: unknown block kind {kind:?}", i + 1))),
                };
                blocks.push(b);
            }
            Ok(Certificate::Undirected { host, blocks })
        }
    }
}
