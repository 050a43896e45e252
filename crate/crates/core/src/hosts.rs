//! Host graphs: the complete symmetric digraph, its multipartite relatives,
//! and the undirected graphs that feed the constructions.
//!
//! Labels are always `0..N`. Multipartite hosts assign parts either by
//! consecutive label ranges (part `j` is `7j..7j+6` for parts of size 7) or by
//! residues (part `i` is `{ℓ : ℓ ≡ i mod r}`), matching how cyclic fixtures
//! are written down.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{Arc, Label};
use crate::error::{Error, Result};
use crate::ingredients::UBlock;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    #[default]
    Ranges,
    Residues,
}

/// A perfect matching, stored as sorted pairs `(a, b)` with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OneFactor(Vec<(Label, Label)>);

impl OneFactor {
    pub fn new(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut v: Vec<_> = pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        v.sort_unstable();
        OneFactor(v)
    }

    pub fn pairs(&self) -> &[(Label, Label)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks the pairs are disjoint and cover `0..v`.
    pub fn validate(&self, v: u32) -> Result<()> {
        let mut seen = vec![false; v as usize];
        for &(a, b) in &self.0 {
            if a == b || b >= v {
                return Err(Error::InvalidHost(format!("factor pair ({a},{b}) invalid for {v} points")));
            }
            for p in [a, b] {
                if std::mem::replace(&mut seen[p as usize], true) {
                    return Err(Error::InvalidHost(format!("factor covers {p} twice")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidHost("factor does not cover every point".into()));
        }
        Ok(())
    }

    pub fn contains(&self, a: Label, b: Label) -> bool {
        self.0.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "host")]
pub enum HostSpec {
    /// `K*_v`.
    #[serde(rename = "Kstar")]
    CompleteSym { v: u32 },
    /// `K*_{r×s}` and friends: arcs only between distinct parts.
    #[serde(rename = "KstarMultipartite")]
    SymMultipartite { parts: Vec<u32>, layout: Layout },
    /// `K*_{(2x)×7} − xK*_{7,7}`: parts of size 7 by ranges, parts `2j` and
    /// `2j+1` not joined.
    #[serde(rename = "KstarEvenMinusFactor")]
    SymMultipartiteMinusFactor { x: u32 },
    #[serde(rename = "K")]
    Complete { v: u32 },
    #[serde(rename = "KMinusFactor")]
    CompleteMinusFactor { v: u32, factor: OneFactor },
    #[serde(rename = "KMultipartite")]
    Multipartite { parts: Vec<u32>, layout: Layout },
}

impl HostSpec {
    pub fn kstar(v: u32) -> Self {
        HostSpec::CompleteSym { v }
    }

    pub fn kstar_parts(r: u32, s: u32, layout: Layout) -> Self {
        HostSpec::SymMultipartite { parts: vec![s; r as usize], layout }
    }

    pub fn k_parts(r: u32, s: u32, layout: Layout) -> Self {
        HostSpec::Multipartite { parts: vec![s; r as usize], layout }
    }

    pub fn is_directed(&self) -> bool {
        matches!(
            self,
            HostSpec::CompleteSym { .. }
                | HostSpec::SymMultipartite { .. }
                | HostSpec::SymMultipartiteMinusFactor { .. }
        )
    }

    pub fn order(&self) -> u32 {
        match self {
            HostSpec::CompleteSym { v } | HostSpec::Complete { v } | HostSpec::CompleteMinusFactor { v, .. } => *v,
            HostSpec::SymMultipartite { parts, .. } | HostSpec::Multipartite { parts, .. } => parts.iter().sum(),
            HostSpec::SymMultipartiteMinusFactor { x } => 14 * x,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            HostSpec::SymMultipartite { parts, layout } | HostSpec::Multipartite { parts, layout } => {
                if parts.is_empty() || parts.contains(&0) {
                    return Err(Error::InvalidHost(format!("part sizes {parts:?} must be positive")));
                }
                if *layout == Layout::Residues && parts.iter().any(|&p| p != parts[0]) {
                    return Err(Error::InvalidHost("residue layout needs equal part sizes".into()));
                }
                Ok(())
            }
            HostSpec::SymMultipartiteMinusFactor { x } if *x == 0 => {
                Err(Error::InvalidHost("need at least one pair of parts".into()))
            }
            HostSpec::CompleteMinusFactor { v, factor } => {
                if v % 2 == 1 {
                    return Err(Error::InvalidHost(format!("K_{v} - I needs an even order")));
                }
                factor.validate(*v)
            }
            _ => Ok(()),
        }
    }

    /// Part index of a label; `None` for hosts without parts.
    pub fn part_of(&self, label: Label) -> Option<u32> {
        match self {
            HostSpec::SymMultipartite { parts, layout } | HostSpec::Multipartite { parts, layout } => {
                Some(match layout {
                    Layout::Residues => label % parts.len() as u32,
                    Layout::Ranges => {
                        let mut acc = 0;
                        let mut idx = 0;
                        for (i, &p) in parts.iter().enumerate() {
                            idx = i as u32;
                            acc += p;
                            if label < acc {
                                break;
                            }
                        }
                        idx
                    }
                })
            }
            HostSpec::SymMultipartiteMinusFactor { .. } => Some(label / 7),
            _ => None,
        }
    }

    /// Whether the unordered pair `{a, b}` carries an edge (or both arcs).
    pub fn joins(&self, a: Label, b: Label) -> bool {
        let n = self.order();
        if a == b || a >= n || b >= n {
            return false;
        }
        match self {
            HostSpec::CompleteSym { .. } | HostSpec::Complete { .. } => true,
            HostSpec::CompleteMinusFactor { factor, .. } => !factor.contains(a, b),
            HostSpec::SymMultipartiteMinusFactor { .. } => {
                let (pa, pb) = (a / 7, b / 7);
                pa != pb && pa / 2 != pb / 2
            }
            _ => self.part_of(a) != self.part_of(b),
        }
    }

    pub fn arcs(&self) -> Result<Vec<Arc>> {
        if !self.is_directed() {
            return Err(Error::InvalidHost(format!("{self} is undirected")));
        }
        self.validate()?;
        let n = self.order();
        let mut out = Vec::new();
        for t in 0..n {
            for h in 0..n {
                if self.joins(t, h) {
                    out.push(Arc::new(t, h));
                }
            }
        }
        Ok(out)
    }

    pub fn edges(&self) -> Result<Vec<(Label, Label)>> {
        if self.is_directed() {
            return Err(Error::InvalidHost(format!("{self} is directed")));
        }
        self.validate()?;
        let n = self.order();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.joins(a, b) {
                    out.push((a, b));
                }
            }
        }
        Ok(out)
    }

    /// Number of arcs (directed) or edges (undirected).
    pub fn size(&self) -> usize {
        let n = self.order();
        let mut count = 0;
        for a in 0..n {
            for b in a + 1..n {
                if self.joins(a, b) {
                    count += 1;
                }
            }
        }
        if self.is_directed() {
            2 * count
        } else {
            count
        }
    }
}

impl fmt::Display for HostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let layout = |l: &Layout| match l {
            Layout::Ranges => "",
            Layout::Residues => " (residues)",
        };
        match self {
            HostSpec::CompleteSym { v } => write!(f, "K*_{v}"),
            HostSpec::SymMultipartite { parts, layout: l } => write!(f, "K*_{{{}}}{}", parts_str(parts), layout(l)),
            HostSpec::SymMultipartiteMinusFactor { x } => write!(f, "K*_{{{}x7}} - {x}K*_{{7,7}}", 2 * x),
            HostSpec::Complete { v } => write!(f, "K_{v}"),
            HostSpec::CompleteMinusFactor { v, .. } => write!(f, "K_{v} - I"),
            HostSpec::Multipartite { parts, layout: l } => write!(f, "K_{{{}}}{}", parts_str(parts), layout(l)),
        }
    }
}

fn parts_str(parts: &[u32]) -> String {
    if parts.iter().all(|&p| p == parts[0]) {
        format!("{}x{}", parts.len(), parts[0])
    } else {
        parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("+")
    }
}

/// Vertex groups `H_1..H_m` of equal size laid out by label ranges, plus an
/// optional extra point, which always takes the highest label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupLayout {
    pub group_size: u32,
    pub groups: u32,
    pub infinity: Option<Label>,
}

impl GroupLayout {
    pub fn new(groups: u32, group_size: u32, with_infinity: bool) -> Self {
        let infinity = with_infinity.then_some(groups * group_size);
        GroupLayout { group_size, groups, infinity }
    }

    pub fn order(&self) -> u32 {
        self.groups * self.group_size + u32::from(self.infinity.is_some())
    }

    pub fn group(&self, j: u32) -> std::ops::Range<Label> {
        j * self.group_size..(j + 1) * self.group_size
    }
}

/// One multipartite piece produced by inflating a quotient block: the parts
/// are the inflated groups of the quotient points, in the listed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InflatedPiece {
    pub quotient: Vec<Label>,
    pub weight: u32,
}

impl InflatedPiece {
    pub fn parts(&self) -> usize {
        self.quotient.len()
    }

    /// Label of element `idx` of part `part`.
    pub fn label(&self, part: usize, idx: u32) -> Label {
        self.quotient[part] * self.weight + idx
    }

    /// Maps a label of the residue-layout `K_{r×w}` over `Z_{rw}` to the host.
    pub fn from_residue(&self, l: Label) -> Label {
        let r = self.parts() as u32;
        self.label((l % r) as usize, l / r)
    }

    pub fn arcs(&self) -> Vec<Arc> {
        let mut out = Vec::new();
        for (i, &a) in self.quotient.iter().enumerate() {
            for (j, &b) in self.quotient.iter().enumerate() {
                if i == j {
                    continue;
                }
                for x in 0..self.weight {
                    for y in 0..self.weight {
                        out.push(Arc::new(a * self.weight + x, b * self.weight + y));
                    }
                }
            }
        }
        out
    }
}

/// Blow each quotient point up into `weight` points and each K3/K5 quotient
/// block into the complete multipartite piece on the corresponding groups.
pub fn inflate(blocks: &[UBlock], weight: u32) -> Result<Vec<InflatedPiece>> {
    blocks
        .iter()
        .map(|b| match b {
            UBlock::Triangle(p) => Ok(InflatedPiece { quotient: p.to_vec(), weight }),
            UBlock::Clique5(p) => Ok(InflatedPiece { quotient: p.to_vec(), weight }),
            other => Err(Error::UnsupportedBlock(format!("{other:?}"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingredients::sts;
    use std::collections::BTreeSet;

    #[test]
    fn closed_form_arc_counts() {
        assert_eq!(HostSpec::kstar(7).arcs().unwrap().len(), 42);
        assert_eq!(HostSpec::kstar_parts(3, 7, Layout::Ranges).arcs().unwrap().len(), 294);
        assert_eq!(HostSpec::kstar_parts(3, 7, Layout::Residues).arcs().unwrap().len(), 294);
        assert_eq!(HostSpec::SymMultipartiteMinusFactor { x: 3 }.arcs().unwrap().len(), 1176);
        for v in 2..40 {
            assert_eq!(HostSpec::kstar(v).size(), (v * (v - 1)) as usize);
        }
        for r in 1..8 {
            let h = HostSpec::kstar_parts(r, 7, Layout::Ranges);
            assert_eq!(h.size(), (7 * r * (7 * r - 7)) as usize);
        }
        for x in 1..6 {
            let h = HostSpec::SymMultipartiteMinusFactor { x };
            let full = 14 * x * (14 * x - 7);
            assert_eq!(h.size(), (full - 98 * x) as usize);
        }
    }

    #[test]
    fn residue_and_range_parts() {
        let h = HostSpec::kstar_parts(3, 7, Layout::Residues);
        assert!(!h.joins(0, 3));
        assert!(h.joins(0, 1));
        let h = HostSpec::kstar_parts(3, 7, Layout::Ranges);
        assert!(!h.joins(0, 6));
        assert!(h.joins(6, 7));
    }

    #[test]
    fn minus_factor_host() {
        let f = OneFactor::new([(0, 1), (2, 3), (4, 5)]);
        let h = HostSpec::CompleteMinusFactor { v: 6, factor: f };
        assert_eq!(h.edges().unwrap().len(), 12);
        let bad = HostSpec::CompleteMinusFactor { v: 6, factor: OneFactor::new([(0, 1), (1, 2), (4, 5)]) };
        assert!(matches!(bad.edges(), Err(Error::InvalidHost(_))));
        assert!(HostSpec::kstar_parts(0, 7, Layout::Ranges).arcs().is_err());
    }

    #[test]
    fn inflate_triangle_and_clique() {
        let pieces = inflate(&[UBlock::Triangle([0, 1, 2])], 7).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].arcs().len(), 294);
        let pieces = inflate(&[UBlock::Clique5([0, 1, 2, 3, 4])], 7).unwrap();
        assert_eq!(pieces[0].arcs().len(), 980);
        assert!(inflate(&[UBlock::Cycle7([0, 1, 2, 3, 4, 5, 6])], 7).is_err());
    }

    #[test]
    fn inflated_sts7_partitions_k7x7() {
        let triples = sts(7).unwrap();
        let pieces = inflate(&triples, 7).unwrap();
        assert_eq!(pieces.len(), 7);
        let mut seen = BTreeSet::new();
        for p in &pieces {
            for a in p.arcs() {
                assert!(seen.insert(a), "arc {a} covered twice");
            }
        }
        let host: BTreeSet<_> = HostSpec::kstar_parts(7, 7, Layout::Ranges).arcs().unwrap().into_iter().collect();
        assert_eq!(seen, host);
        assert_eq!(seen.len(), 49 * 42);
    }

    #[test]
    fn host_json_shapes() {
        let s = serde_json::to_string(&HostSpec::kstar(28)).unwrap();
        assert_eq!(s, r#"{"host":"Kstar","v":28}"#);
        let s = serde_json::to_string(&HostSpec::kstar_parts(3, 7, Layout::Residues)).unwrap();
        assert_eq!(s, r#"{"host":"KstarMultipartite","parts":[7,7,7],"layout":"residues"}"#);
        let s = serde_json::to_string(&HostSpec::SymMultipartiteMinusFactor { x: 3 }).unwrap();
        assert_eq!(s, r#"{"host":"KstarEvenMinusFactor","x":3}"#);
        let back: HostSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, HostSpec::SymMultipartiteMinusFactor { x: 3 });
    }
}
