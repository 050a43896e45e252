//! Routing from `(v, class)` to a full decomposition of `K*_v`.
//!
//! Four routes by `v mod 14`: pair-fill (`v ≡ 0`), pair-point-fill or
//! doubling (`v ≡ 1`), group-fill or doubling (`v ≡ 7`), group-point-fill
//! (`v ≡ 8`). The reverse-pair class `D9` is the reverse of the `D8` design.

use std::collections::BTreeMap;

use crate::base::{base_design, fixture_step};
use crate::catalog::{classify_arcs, Arc, Block, HeptClass};
use crate::design::{Decomposition, Pattern, PlanNode};
use crate::error::{Error, Result};
use crate::hosts::{inflate, GroupLayout, HostSpec, InflatedPiece, Layout};
use crate::ingredients::{c7_complete, c7_multipartite_residue, k3k5_even, pbd35, UBlock};
use crate::verifier::ensure;

/// Checks the necessary condition `v ≥ 7` and `7 | v(v−1)`.
pub fn admissible(v: u32) -> Result<()> {
    if v < 7 {
        return Err(Error::NotAdmissible { v, reason: "v < 7".into() });
    }
    let p = u64::from(v) * u64::from(v - 1);
    if p % 7 != 0 {
        return Err(Error::NotAdmissible {
            v, reason: format!("7 ∤ v(v−1): {}·{} = {} not ≡ 0 mod 7", v, v - 1, p)
        });
    }
    Ok(())
}

/// Admissible orders up to `max`.
pub fn spectrum(max: u32) -> Vec<u32> {
    (7..=max).filter(|&v| admissible(v).is_ok()).collect()
}

/// Position maps taking an undirected 7-cycle to the two blocks of its
/// doubling: the class placed along the cycle, then its reverse.
fn doubling_maps(class: HeptClass) -> Result<([usize; 7], [usize; 7])> {
    if !class.is_self_reverse() {
        return Err(Error::NotSelfReverse(class.to_string()));
    }
    let word = class.word();
    let arcs: Vec<Arc> = (0..7u32)
        .map(|j| {
            let (a, b) = (j, (j + 1) % 7);
            if word.is_forward(j as usize) {
                Arc::new(a, b)
            } else {
                Arc::new(b, a)
            }
        })
        .collect();
    let (c1, w1) = classify_arcs(&arcs)?;
    let rev: Vec<Arc> = arcs.iter().map(|a| a.reversed()).collect();
    let (c2, w2) = classify_arcs(&rev)?;
    debug_assert!(c1 == class && c2 == class);
    Ok((w1.labels.map(|l| l as usize), w2.labels.map(|l| l as usize)))
}

/// Both orientations of every 7-cycle, each as a `class` block.
pub fn double_cycles(cycles: &[UBlock], class: HeptClass) -> Result<Vec<Block>> {
    let (m1, m2) = doubling_maps(class)?;
    let mut out = Vec::with_capacity(2 * cycles.len());
    for c in cycles {
        let UBlock::Cycle7(c) = c else {
            return Err(Error::UnsupportedBlock(format!("{c:?}")));
        };
        out.push(Block { class, labels: m1.map(|k| c[k]) });
        out.push(Block { class, labels: m2.map(|k| c[k]) });
    }
    Ok(out)
}

/// Filler blocks for one inflated piece.
fn fill_piece(piece: &InflatedPiece, class: HeptClass) -> Result<Vec<Block>> {
    let r = piece.parts() as u32;
    if class == HeptClass::D8 {
        let host = HostSpec::kstar_parts(r, 7, Layout::Residues);
        let d = base_design(&host, class)?;
        Ok(d.blocks.iter().map(|b| b.map_labels(|l| piece.from_residue(l))).collect())
    } else {
        let cycles: Vec<UBlock> =
            c7_multipartite_residue(r)?.iter().map(|b| b.map_labels(|l| piece.from_residue(l))).collect();
        double_cycles(&cycles, class)
    }
}

fn piece_leaf(r: u32, class: HeptClass) -> PlanNode {
    if class == HeptClass::D8 {
        PlanNode::leaf(fixture_step(&HostSpec::kstar_parts(r, 7, Layout::Residues), Pattern::Oriented(class)))
    } else {
        PlanNode::node("double", vec![PlanNode::leaf(format!("c7-multipartite-residue(r={r})"))])
    }
}

fn pieces_node(r: u32, count: usize, class: HeptClass) -> PlanNode {
    PlanNode::node(format!("pieces({r}x7) x{count}"), vec![piece_leaf(r, class)])
}

/// Fills every piece; the trace groups pieces by part count.
fn fill_pieces(pieces: &[InflatedPiece], class: HeptClass) -> Result<(Vec<Block>, Vec<PlanNode>)> {
    let mut blocks = Vec::new();
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for p in pieces {
        blocks.extend(fill_piece(p, class)?);
        *counts.entry(p.parts() as u32).or_default() += 1;
    }
    let nodes = counts.into_iter().map(|(r, n)| pieces_node(r, n, class)).collect();
    Ok((blocks, nodes))
}

/// Decomposition of `K*_{2x×7} − x K*_{7,7}` (parts `2j`, `2j+1` unjoined).
pub fn skeleton_even(x: u32, class: HeptClass) -> Result<Decomposition> {
    let (quotient, factor) = k3k5_even(2 * x)?;
    let mut relabel = vec![0; 2 * x as usize];
    for (k, &(a, b)) in factor.pairs().iter().enumerate() {
        relabel[a as usize] = 2 * k as u32;
        relabel[b as usize] = 2 * k as u32 + 1;
    }
    let quotient: Vec<UBlock> = quotient.iter().map(|b| b.map_labels(|l| relabel[l as usize])).collect();
    let pieces = inflate(&quotient, 7)?;
    let (blocks, mut children) = fill_pieces(&pieces, class)?;
    children.insert(0, PlanNode::leaf(format!("k3k5-even(n={})", 2 * x)));
    let trace = PlanNode::node(format!("skeleton-even(x={x})"), children);
    Ok(Decomposition::new(HostSpec::SymMultipartiteMinusFactor { x }, class, blocks, trace))
}

/// Decomposition of `K*_{n×7}` (parts by label ranges), `n` odd.
pub fn skeleton_odd(n: u32, class: HeptClass) -> Result<Decomposition> {
    let (quotient, first) = if n == 3 || n == 5 {
        let q = if n == 3 { UBlock::Triangle([0, 1, 2]) } else { UBlock::Clique5([0, 1, 2, 3, 4]) };
        (vec![q], format!("single-block(n={n})"))
    } else {
        (pbd35(n)?, format!("pbd35(n={n})"))
    };
    let pieces = inflate(&quotient, 7)?;
    let (blocks, mut children) = fill_pieces(&pieces, class)?;
    children.insert(0, PlanNode::leaf(first));
    let trace = PlanNode::node(format!("skeleton-odd(n={n})"), children);
    Ok(Decomposition::new(HostSpec::kstar_parts(n, 7, Layout::Ranges), class, blocks, trace))
}

/// Copies of a base design placed on groups, with an optional shared point.
fn place_groups(base: &Decomposition, layout: &GroupLayout) -> Vec<Block> {
    let mut out = Vec::new();
    for j in 0..layout.groups {
        for b in &base.blocks {
            out.push(b.map_labels(|l| match layout.infinity {
                Some(p) if l == layout.group_size => p,
                _ => layout.group(j).start + l,
            }));
        }
    }
    out
}

fn doubled(v: u32, class: HeptClass) -> Result<Decomposition> {
    let blocks = double_cycles(&c7_complete(v)?, class)?;
    let trace = PlanNode::node("double", vec![PlanNode::leaf(format!("c7-complete(v={v})"))]);
    Ok(Decomposition::new(HostSpec::kstar(v), class, blocks, trace))
}

fn fixture(v: u32, class: HeptClass) -> Result<Decomposition> {
    base_design(&HostSpec::kstar(v), class)
}

fn filled(
    class: HeptClass,
    step: String,
    base: Decomposition,
    layout: GroupLayout,
    skeleton: Decomposition,
) -> Decomposition {
    let mut blocks = place_groups(&base, &layout);
    blocks.extend(skeleton.blocks);
    let mut children = vec![PlanNode::node(format!("x{}", layout.groups), vec![base.trace])];
    children.push(skeleton.trace);
    Decomposition::new(HostSpec::kstar(layout.order()), class, blocks, PlanNode::node(step, children))
}

fn build(v: u32, class: HeptClass) -> Result<Decomposition> {
    if class == HeptClass::D9 {
        return Ok(build(v, HeptClass::D8)?.reversed());
    }
    let d8 = class == HeptClass::D8;
    let d = match v % 14 {
        0 if v <= 28 => fixture(v, class)?,
        0 => {
            let x = v / 14;
            filled(
                class,
                format!("pair-fill(x={x})"),
                fixture(14, class)?,
                GroupLayout::new(x, 14, false),
                skeleton_even(x, class)?,
            )
        }
        1 if !d8 => doubled(v, class)?,
        1 if v <= 29 => fixture(v, class)?,
        1 => {
            let x = v / 14;
            let base = fixture(15, class)?;
            filled(
                class,
                format!("pair-point-fill(x={x})"),
                base,
                GroupLayout::new(x, 14, true),
                skeleton_even(x, class)?,
            )
        }
        7 if !d8 => doubled(v, class)?,
        7 if v == 7 => fixture(v, class)?,
        7 => {
            let n = v / 7;
            filled(
                class,
                format!("group-fill(n={n})"),
                fixture(7, class)?,
                GroupLayout::new(n, 7, false),
                skeleton_odd(n, class)?,
            )
        }
        8 if v == 8 => fixture(v, class)?,
        8 => {
            let n = v / 7;
            let base = fixture(8, class)?;
            filled(
                class,
                format!("group-point-fill(n={n})"),
                base,
                GroupLayout::new(n, 7, true),
                skeleton_odd(n, class)?,
            )
        }
        _ => unreachable!("admissible v is 0, 1, 7 or 8 mod 14"),
    };
    Ok(mark_extension(v, class, d))
}

fn mark_extension(v: u32, class: HeptClass, mut d: Decomposition) -> Decomposition {
    if class == HeptClass::D10 && matches!(v % 14, 0 | 8) {
        d.trace = PlanNode::node("extension", vec![d.trace]);
    }
    d
}

/// A verified `class`-decomposition of `K*_v`.
pub fn generate(v: u32, class: HeptClass) -> Result<Decomposition> {
    admissible(v)?;
    let d = build(v, class)?;
    ensure(&d)?;
    Ok(d)
}

/// Reverses every arc of a decomposition.
pub fn reverse_decomposition(d: &Decomposition) -> Decomposition {
    d.reversed()
}

/// Number of K3 and K5 blocks in `pbd35(n)`.
fn pbd_counts(n: u32) -> (usize, usize) {
    let k5 = usize::from(n % 6 == 5);
    let edges = (n * (n - 1) / 2) as usize;
    ((edges - 10 * k5) / 3, k5)
}

fn pieces_plan(k3: usize, k5: usize, class: HeptClass) -> Vec<PlanNode> {
    let mut out = Vec::new();
    if k3 > 0 {
        out.push(pieces_node(3, k3, class));
    }
    if k5 > 0 {
        out.push(pieces_node(5, k5, class));
    }
    out
}

fn skeleton_even_plan(x: u32, class: HeptClass) -> PlanNode {
    let (k3, k5) = pbd_counts(2 * x + 1);
    // Deleting one point removes the x triangles through it.
    let mut children = vec![PlanNode::leaf(format!("k3k5-even(n={})", 2 * x))];
    children.extend(pieces_plan(k3 - x as usize, k5, class));
    PlanNode::node(format!("skeleton-even(x={x})"), children)
}

fn skeleton_odd_plan(n: u32, class: HeptClass) -> PlanNode {
    let (first, k3, k5) = match n {
        3 => (format!("single-block(n={n})"), 1, 0),
        5 => (format!("single-block(n={n})"), 0, 1),
        _ => {
            let (k3, k5) = pbd_counts(n);
            (format!("pbd35(n={n})"), k3, k5)
        }
    };
    let mut children = vec![PlanNode::leaf(first)];
    children.extend(pieces_plan(k3, k5, class));
    PlanNode::node(format!("skeleton-odd(n={n})"), children)
}

fn fixture_plan(v: u32, class: HeptClass) -> PlanNode {
    PlanNode::leaf(fixture_step(&HostSpec::kstar(v), Pattern::Oriented(class)))
}

fn filled_plan(step: String, base: PlanNode, groups: u32, skeleton: PlanNode) -> PlanNode {
    PlanNode::node(step, vec![PlanNode::node(format!("x{groups}"), vec![base]), skeleton])
}

/// The construction tree `generate` follows, computed without building any
/// blocks.
pub fn plan(v: u32, class: HeptClass) -> Result<PlanNode> {
    admissible(v)?;
    if class == HeptClass::D9 {
        return Ok(PlanNode::node("reverse", vec![plan(v, HeptClass::D8)?]));
    }
    let d8 = class == HeptClass::D8;
    let t = match v % 14 {
        0 if v <= 28 => fixture_plan(v, class),
        0 => {
            let x = v / 14;
            filled_plan(format!("pair-fill(x={x})"), fixture_plan(14, class), x, skeleton_even_plan(x, class))
        }
        1 | 7 if !d8 => PlanNode::node("double", vec![PlanNode::leaf(format!("c7-complete(v={v})"))]),
        1 if v <= 29 => fixture_plan(v, class),
        1 => {
            let x = v / 14;
            filled_plan(format!("pair-point-fill(x={x})"), fixture_plan(15, class), x, skeleton_even_plan(x, class))
        }
        7 if v == 7 => fixture_plan(v, class),
        7 => {
            let n = v / 7;
            filled_plan(format!("group-fill(n={n})"), fixture_plan(7, class), n, skeleton_odd_plan(n, class))
        }
        8 if v == 8 => fixture_plan(v, class),
        8 => {
            let n = v / 7;
            filled_plan(format!("group-point-fill(n={n})"), fixture_plan(8, class), n, skeleton_odd_plan(n, class))
        }
        _ => unreachable!("admissible v is 0, 1, 7 or 8 mod 14"),
    };
    if class == HeptClass::D10 && matches!(v % 14, 0 | 8) {
        return Ok(PlanNode::node("extension", vec![t]));
    }
    Ok(t)
}

/// Closed-form block count `v(v−1)/7`.
pub fn expected_blocks(v: u32) -> usize {
    (v as usize * (v as usize - 1)) / 7
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::verify;

    #[test]
    fn necessity() {
        assert_eq!(spectrum(30), vec![7, 8, 14, 15, 21, 22, 28, 29]);
        let e = admissible(10).unwrap_err();
        assert!(e.to_string().contains("10·9 = 90 not ≡ 0 mod 7"), "{e}");
        assert!(matches!(admissible(6), Err(Error::NotAdmissible { .. })));
    }

    #[test]
    fn doubling_rejects_reverse_pair() {
        assert!(matches!(double_cycles(&[], HeptClass::D8), Err(Error::NotSelfReverse(_))));
        assert!(matches!(double_cycles(&[], HeptClass::D9), Err(Error::NotSelfReverse(_))));
        let c = [UBlock::Cycle7([0, 1, 2, 3, 4, 5, 6])];
        for class in HeptClass::all().filter(|c| c.is_self_reverse()) {
            let b = double_cycles(&c, class).unwrap();
            let mut arcs: Vec<_> = b.iter().flat_map(|b| b.arcs()).collect();
            arcs.sort();
            arcs.dedup();
            assert_eq!(arcs.len(), 14, "{class}");
        }
    }

    #[test]
    fn spec_block_counts() {
        assert_eq!(generate(22, HeptClass::D8).unwrap().blocks.len(), 66);
        assert_eq!(generate(21, HeptClass::D9).unwrap().blocks.len(), 60);
        assert_eq!(generate(42, HeptClass::D1).unwrap().blocks.len(), 246);
    }

    #[test]
    fn skeletons_verify() {
        for class in [HeptClass::D3, HeptClass::D8, HeptClass::D10] {
            for x in 3..6 {
                assert!(verify(&skeleton_even(x, class).unwrap()).ok);
            }
            for n in [3, 5, 7, 9, 11] {
                assert!(verify(&skeleton_odd(n, class).unwrap()).ok);
            }
        }
    }

    #[test]
    fn plan_matches_trace() {
        for v in spectrum(120) {
            for class in HeptClass::all() {
                let d = generate(v, class).unwrap();
                assert_eq!(plan(v, class).unwrap(), d.trace, "v={v} {class}");
                assert_eq!(d.blocks.len(), expected_blocks(v));
            }
        }
    }

    #[test]
    fn reverse_pair_routes() {
        let d = generate(43, HeptClass::D9).unwrap();
        assert_eq!(d.trace.step, "reverse");
        assert_eq!(d.trace.children[0].step, "pair-point-fill(x=3)");
        let d = generate(36, HeptClass::D10).unwrap();
        assert_eq!(d.trace.step, "extension");
    }
}
