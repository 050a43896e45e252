//! The certificate object shared by every construction route.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{reverse_class, Block, HeptClass};
use crate::hosts::HostSpec;

/// One step of a construction; leaves are fixtures or ingredient providers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanNode {
    pub step: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<PlanNode>,
}

impl PlanNode {
    pub fn leaf(step: impl Into<String>) -> Self {
        PlanNode { step: step.into(), children: Vec::new() }
    }

    pub fn node(step: impl Into<String>, children: Vec<PlanNode>) -> Self {
        PlanNode { step: step.into(), children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn render(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&self.step);
        out.push('\n');
        for c in &self.children {
            c.render(depth + 1, out);
        }
    }
}

impl fmt::Display for PlanNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(0, &mut s);
        f.write_str(s.trim_end())
    }
}

/// A claimed `D`-decomposition of a directed host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub host: HostSpec,
    pub class: HeptClass,
    pub blocks: Vec<Block>,
    pub trace: PlanNode,
}

impl Decomposition {
    pub fn new(host: HostSpec, class: HeptClass, blocks: Vec<Block>, trace: PlanNode) -> Self {
        Decomposition { host, class, blocks, trace }
    }

    pub fn arc_count(&self) -> usize {
        self.blocks.len() * 7
    }

    /// Every arc reversed; blocks are re-labeled into the reverse class.
    pub fn reversed(&self) -> Decomposition {
        let class = reverse_class(self.class);
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let arcs = b.arcs().map(|a| a.reversed());
                let (c, witness) = crate::catalog::classify_arcs(&arcs).expect("reversal keeps the heptagon shape");
                debug_assert_eq!(c, reverse_class(b.class));
                witness
            })
            .collect();
        Decomposition {
            host: self.host.clone(),
            class,
            blocks,
            trace: PlanNode::node("reverse", vec![self.trace.clone()]),
        }
    }
}

/// What a fixture or search decomposes into: an oriented heptagon class, or
/// undirected 7-cycles.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Oriented(HeptClass),
    Cycle,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Oriented(c) => write!(f, "{c}"),
            Pattern::Cycle => f.write_str("C7"),
        }
    }
}

impl std::str::FromStr for Pattern {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        if s.eq_ignore_ascii_case("C7") {
            Ok(Pattern::Cycle)
        } else {
            s.parse().map(Pattern::Oriented)
        }
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
