//! Undirected ingredients: Steiner triple systems, {K3,K5}-decompositions of
//! `K_n` and `K_n − I`, one-factors, and 7-cycle systems of `K_v` and
//! `K_{n×7}`. Every provider checks its own output against the host before
//! returning it.

use std::collections::HashMap;
use std::sync::{Arc as Shared, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::catalog::Label;
use crate::error::{Error, Result};
use crate::hosts::{inflate, HostSpec, Layout, OneFactor};
use crate::search::{self, SearchBudget};
use crate::verifier::ensure_undirected;

/// Node budget for the difference-triple and base-cycle searches.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "labels")]
pub enum UBlock {
    #[serde(rename = "K3")]
    Triangle([Label; 3]),
    #[serde(rename = "K5")]
    Clique5([Label; 5]),
    /// Vertices in cyclic order.
    #[serde(rename = "C7")]
    Cycle7([Label; 7]),
    #[serde(rename = "I")]
    FactorEdge([Label; 2]),
}

impl UBlock {
    pub fn labels(&self) -> &[Label] {
        match self {
            UBlock::Triangle(l) => l,
            UBlock::Clique5(l) => l,
            UBlock::Cycle7(l) => l,
            UBlock::FactorEdge(l) => l,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            UBlock::Triangle(_) => "K3",
            UBlock::Clique5(_) => "K5",
            UBlock::Cycle7(_) => "C7",
            UBlock::FactorEdge(_) => "I",
        }
    }

    pub fn check(&self) -> Result<()> {
        let l = self.labels();
        for i in 0..l.len() {
            for j in i + 1..l.len() {
                if l[i] == l[j] {
                    return Err(Error::InvalidBlock(format!("{} {:?} repeats {}", self.kind(), l, l[i])));
                }
            }
        }
        Ok(())
    }

    pub fn edges(&self) -> Vec<(Label, Label)> {
        match self {
            UBlock::Cycle7(c) => (0..7).map(|i| (c[i], c[(i + 1) % 7])).collect(),
            _ => {
                let l = self.labels();
                let mut out = Vec::new();
                for i in 0..l.len() {
                    for j in i + 1..l.len() {
                        out.push((l[i], l[j]));
                    }
                }
                out
            }
        }
    }

    pub fn map_labels(&self, f: impl Fn(Label) -> Label) -> UBlock {
        match self {
            UBlock::Triangle(l) => UBlock::Triangle(l.map(f)),
            UBlock::Clique5(l) => UBlock::Clique5(l.map(f)),
            UBlock::Cycle7(l) => UBlock::Cycle7(l.map(f)),
            UBlock::FactorEdge(l) => UBlock::FactorEdge(l.map(f)),
        }
    }
}

/// Three differences modulo `m` that close up into a triangle.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiffTriple {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub m: u32,
}

impl DiffTriple {
    pub fn is_valid(&self) -> bool {
        let DiffTriple { a, b, c, m } = *self;
        let distinct = a != b && b != c && a != c;
        let no_half = [a, b, c].iter().all(|&d| d > 0 && d < m && 2 * d != m);
        let closes = (a + b) % m == c % m || (a + b + c) % m == 0;
        distinct && no_half && closes
    }

    /// Base triangle `{0, a, a+b}`; its edges realize differences a, b, c.
    pub fn base_triangle(&self) -> [Label; 3] {
        [0, self.a, (self.a + self.b) % self.m]
    }
}

fn not_admissible(v: u32, reason: impl Into<String>) -> Error {
    Error::NotAdmissible { v, reason: reason.into() }
}

fn develop_triangles(base: [Label; 3], m: u32) -> impl Iterator<Item = UBlock> {
    (0..m).map(move |i| UBlock::Triangle(base.map(|x| (x + i) % m)))
}

/// Steiner triple system on `0..n` (Bose for n ≡ 3, Skolem for n ≡ 1 mod 6).
pub fn sts(n: u32) -> Result<Vec<UBlock>> {
    if n == 1 {
        return Ok(Vec::new());
    }
    if !matches!(n % 6, 1 | 3) {
        return Err(not_admissible(n, format!("STS needs n ≡ 1 or 3 (mod 6), got n ≡ {} (mod 6)", n % 6)));
    }
    let blocks = if n % 6 == 3 { bose(n) } else { skolem(n) };
    ensure_undirected(&blocks, &HostSpec::Complete { v: n })?;
    Ok(blocks)
}

// Points (x, i) ∈ Z_m × Z_3 ↦ 3x + i, with the idempotent commutative
// quasigroup x∘y = (x + y)(m + 1)/2 mod m.
fn bose(n: u32) -> Vec<UBlock> {
    let m = n / 3;
    let half = m.div_ceil(2);
    let p = |x: u32, i: u32| 3 * x + i % 3;
    let op = |x: u32, y: u32| ((x + y) * half) % m;
    let mut out = Vec::with_capacity((n * (n - 1) / 6) as usize);
    for x in 0..m {
        out.push(UBlock::Triangle([p(x, 0), p(x, 1), p(x, 2)]));
    }
    for i in 0..3 {
        for x in 0..m {
            for y in x + 1..m {
                out.push(UBlock::Triangle([p(x, i), p(y, i), p(op(x, y), i + 1)]));
            }
        }
    }
    out
}

// Points ∞ = n−1 and (x, i) ∈ Z_2k × Z_3 ↦ 3x + i, with the half-idempotent
// commutative quasigroup obtained by renaming the sums of Z_2k.
fn skolem(n: u32) -> Vec<UBlock> {
    let k = (n - 1) / 6;
    let order = 2 * k;
    let inf = n - 1;
    let p = |x: u32, i: u32| 3 * x + i % 3;
    let op = |x: u32, y: u32| {
        let s = (x + y) % order;
        if s.is_multiple_of(2) {
            s / 2
        } else {
            k + s / 2
        }
    };
    let mut out = Vec::with_capacity((n * (n - 1) / 6) as usize);
    for x in 0..k {
        out.push(UBlock::Triangle([p(x, 0), p(x, 1), p(x, 2)]));
    }
    for i in 0..3 {
        for x in 0..k {
            out.push(UBlock::Triangle([inf, p(x + k, i), p(x, i + 1)]));
        }
    }
    for i in 0..3 {
        for x in 0..order {
            for y in x + 1..order {
                out.push(UBlock::Triangle([p(x, i), p(y, i), p(op(x, y), i + 1)]));
            }
        }
    }
    out
}

/// Round-robin one-factorization of `K_{2k}` on labels `0..2k`.
pub fn one_factorization(order: u32) -> Vec<OneFactor> {
    assert!(order >= 2 && order.is_multiple_of(2), "one-factorization needs an even order");
    let m = order - 1;
    let inf = m;
    (0..m)
        .map(|i| {
            let mut pairs = vec![(i, inf)];
            for j in 1..order / 2 {
                pairs.push(((i + j) % m, (i + m - j) % m));
            }
            OneFactor::new(pairs)
        })
        .collect()
}

/// The one-factors carried by difference `d` in `Z_m`: the half difference
/// gives one, an even-length circulant 2-factor gives two.
pub fn one_factor_split(d: u32, m: u32) -> Result<Vec<OneFactor>> {
    if m % 2 == 1 || d == 0 || d >= m {
        return Err(Error::NotSplittable { d, m });
    }
    if 2 * d == m {
        return Ok(vec![OneFactor::new((0..d).map(|x| (x, x + d)))]);
    }
    let g = gcd(d, m);
    let len = m / g;
    if len % 2 == 1 {
        return Err(Error::NotSplittable { d, m });
    }
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for c in 0..g {
        for t in 0..len {
            let x = (c + t * d) % m;
            let e = (x, (x + d) % m);
            if t % 2 == 0 {
                even.push(e);
            } else {
                odd.push(e);
            }
        }
    }
    Ok(vec![OneFactor::new(even), OneFactor::new(odd)])
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Partition `diffs` into triples that close up modulo `m`. Backtracks on the
/// element with the fewest completions.
pub fn difference_triples(diffs: &[u32], m: u32, budget: u64) -> Result<Vec<DiffTriple>> {
    if !diffs.len().is_multiple_of(3) {
        return Err(Error::Malformed(format!("{} differences do not split into triples", diffs.len())));
    }
    let mut present = vec![false; m as usize];
    for &d in diffs {
        if d == 0 || d >= m || 2 * d == m || std::mem::replace(&mut present[d as usize], true) {
            return Err(Error::Malformed(format!("difference {d} invalid or repeated modulo {m}")));
        }
    }
    let mut out = Vec::new();
    let mut nodes = 0u64;
    match triples_rec(&mut present, m, &mut out, &mut nodes, budget) {
        Some(true) => {
            out.sort();
            Ok(out)
        }
        _ => Err(Error::UnsatisfiableWithinBudget(nodes)),
    }
}

fn completions(present: &[bool], m: u32, x: u32) -> Vec<DiffTriple> {
    let mut out: Vec<DiffTriple> = Vec::new();
    let has = |d: i64| d > 0 && d < m as i64 && present[d as usize];
    for a in 1..m {
        if a == x || !present[a as usize] {
            continue;
        }
        let (xi, ai, mi) = (x as i64, a as i64, m as i64);
        for b in [xi - ai, ai - xi, mi - xi - ai] {
            if b == ai || b == xi || !has(b) {
                continue;
            }
            let mut t = [a, x, b as u32];
            t.sort_unstable();
            let (lo, mid, hi) = (t[0], t[1], t[2]);
            let triple = DiffTriple { a: lo, b: mid, c: hi, m };
            if triple.is_valid() && !out.contains(&triple) {
                out.push(triple);
            }
        }
    }
    out
}

fn triples_rec(present: &mut [bool], m: u32, out: &mut Vec<DiffTriple>, nodes: &mut u64, budget: u64) -> Option<bool> {
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    let mut best: Option<(u32, Vec<DiffTriple>)> = None;
    for x in (1..m).rev() {
        if !present[x as usize] {
            continue;
        }
        let opts = completions(present, m, x);
        let better = best.as_ref().is_none_or(|(_, o)| opts.len() < o.len());
        if better {
            let done = opts.len() <= 1;
            best = Some((x, opts));
            if done {
                break;
            }
        }
    }
    let Some((_, opts)) = best else { return Some(true) };
    for t in opts {
        for d in [t.a, t.b, t.c] {
            present[d as usize] = false;
        }
        out.push(t);
        match triples_rec(present, m, out, nodes, budget) {
            Some(true) => return Some(true),
            None => return None,
            Some(false) => {}
        }
        out.pop();
        for d in [t.a, t.b, t.c] {
            present[d as usize] = true;
        }
    }
    Some(false)
}

type Memo = Mutex<HashMap<u32, Shared<Vec<UBlock>>>>;

fn memo(
    cell: &'static OnceLock<Memo>,
    key: u32,
    f: impl FnOnce() -> Result<Vec<UBlock>>,
) -> Result<Shared<Vec<UBlock>>> {
    let map = cell.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = map.lock().expect("memo lock").get(&key) {
        return Ok(hit.clone());
    }
    let value = Shared::new(f()?);
    map.lock().expect("memo lock").insert(key, value.clone());
    Ok(value)
}

static PBD_MEMO: OnceLock<Memo> = OnceLock::new();
static C7_MEMO: OnceLock<Memo> = OnceLock::new();
static C7_MULTI_MEMO: OnceLock<Memo> = OnceLock::new();

/// {K3,K5}-decomposition of `K_n` for odd `n`: a Steiner triple system when
/// one exists, otherwise triangles plus exactly one K5.
pub fn pbd35(n: u32) -> Result<Vec<UBlock>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(not_admissible(n, "a {K3,K5}-decomposition of K_n needs odd n ≥ 3"));
    }
    Ok(memo(&PBD_MEMO, n, || pbd35_uncached(n))?.as_ref().clone())
}

fn pbd35_uncached(n: u32) -> Result<Vec<UBlock>> {
    let blocks = match n % 6 {
        1 | 3 => return sts(n),
        _ if n == 5 => vec![UBlock::Clique5([0, 1, 2, 3, 4])],
        _ => match pbd35_hole(n, DEFAULT_NODE_BUDGET) {
            Ok(b) => b,
            Err(_) if n % 12 == 11 => pbd35_doubling(n)?,
            Err(e) if n * (n - 1) / 2 <= 2000 => pbd35_exact_cover(n).map_err(|_| e)?,
            Err(e) => return Err(e),
        },
    };
    ensure_undirected(&blocks, &HostSpec::Complete { v: n })?;
    Ok(blocks)
}

/// `K5` on the hole `{m..m+4}` over `Z_m`, `m = n − 5`: five one-factors
/// (the half difference and two even-length difference classes) are joined
/// to the hole points, and the remaining differences form base triangles.
pub fn pbd35_hole(n: u32, budget: u64) -> Result<Vec<UBlock>> {
    let m = n - 5;
    let half = m / 2;
    let eligible: Vec<u32> = (1..half).filter(|&d| (m / gcd(d, m)).is_multiple_of(2)).collect();
    let mut spent = 0u64;
    for (i, &d1) in eligible.iter().enumerate() {
        for &d2 in &eligible[i + 1..] {
            let rest: Vec<u32> = (1..half).filter(|&d| d != d1 && d != d2).collect();
            // Every closing triple has an even integer sum.
            if rest.iter().sum::<u32>() % 2 == 1 || !rest.len().is_multiple_of(3) {
                continue;
            }
            let triples = match difference_triples(&rest, m, budget.saturating_sub(spent)) {
                Ok(t) => t,
                Err(Error::UnsatisfiableWithinBudget(used)) => {
                    spent += used;
                    if spent >= budget {
                        return Err(Error::UnsatisfiableWithinBudget(spent));
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            let mut factors = one_factor_split(half, m)?;
            factors.extend(one_factor_split(d1, m)?);
            factors.extend(one_factor_split(d2, m)?);
            let mut blocks = vec![UBlock::Clique5([m, m + 1, m + 2, m + 3, m + 4])];
            for (k, f) in factors.iter().enumerate() {
                for &(a, b) in f.pairs() {
                    blocks.push(UBlock::Triangle([a, b, m + k as u32]));
                }
            }
            for t in &triples {
                blocks.extend(develop_triangles(t.base_triangle(), m));
            }
            return Ok(blocks);
        }
    }
    Err(Error::UnsatisfiableWithinBudget(spent))
}

/// `n = 2u + 1`: keep a {K3,K5}-decomposition on `0..u` and join point `x`
/// to the `x`-th factor of a one-factorization of `K_{u+1}` on `u..n`.
pub fn pbd35_doubling(n: u32) -> Result<Vec<UBlock>> {
    let u = (n - 1) / 2;
    let mut blocks = pbd35(u)?;
    for (x, f) in one_factorization(u + 1).iter().enumerate() {
        for &(a, b) in f.pairs() {
            blocks.push(UBlock::Triangle([x as u32, u + a, u + b]));
        }
    }
    Ok(blocks)
}

fn pbd35_exact_cover(n: u32) -> Result<Vec<UBlock>> {
    let host = HostSpec::Complete { v: n };
    search::exact_cover_undirected(&host, &[search::UKind::K3, search::UKind::K5], &SearchBudget::default())
}

/// {K3,K5}-decomposition of `K_n − I` for even `n ≥ 6`, with the factor `I`.
pub fn k3k5_even(n: u32) -> Result<(Vec<UBlock>, OneFactor)> {
    if n < 6 || n % 2 == 1 {
        return Err(not_admissible(n, "a {K3,K5}-decomposition of K_n - I needs even n ≥ 6"));
    }
    let mut blocks = pbd35(n + 1)?;
    if let Some(UBlock::Clique5(k5)) = blocks.iter().find(|b| matches!(b, UBlock::Clique5(_))) {
        if k5.contains(&n) {
            let free = (0..n).find(|p| !k5.contains(p)).expect("n + 1 > 5 points");
            let swap = |x: Label| {
                if x == n {
                    free
                } else if x == free {
                    n
                } else {
                    x
                }
            };
            blocks = blocks.iter().map(|b| b.map_labels(swap)).collect();
        }
    }
    let mut kept = Vec::new();
    let mut pairs = Vec::new();
    for b in blocks {
        match b {
            UBlock::Triangle(t) if t.contains(&n) => {
                let rest: Vec<Label> = t.iter().copied().filter(|&x| x != n).collect();
                pairs.push((rest[0], rest[1]));
            }
            other => kept.push(other),
        }
    }
    let factor = OneFactor::new(pairs);
    let host = HostSpec::CompleteMinusFactor { v: n, factor: factor.clone() };
    ensure_undirected(&kept, &host)?;
    Ok((kept, factor))
}

/// Three Hamiltonian cycles of `K_7` on the given labels; `labels[6]` plays
/// the role of the centre point of the zigzag.
pub fn walecki_k7(labels: [Label; 7]) -> Vec<UBlock> {
    (0..3)
        .map(|i| {
            let z = |k: i32| labels[((i + k).rem_euclid(6)) as usize];
            UBlock::Cycle7([labels[6], z(0), z(1), z(-1), z(2), z(-2), z(3)])
        })
        .collect()
}

/// 7-cycle system of `K_v`, `v ≡ 1, 7 (mod 14)`.
pub fn c7_complete(v: u32) -> Result<Vec<UBlock>> {
    if v < 7 || !matches!(v % 14, 1 | 7) {
        return Err(not_admissible(v, format!("a C7-decomposition of K_v needs v ≡ 1 or 7 (mod 14), got {}", v % 14)));
    }
    Ok(memo(&C7_MEMO, v, || c7_complete_uncached(v))?.as_ref().clone())
}

fn c7_complete_uncached(v: u32) -> Result<Vec<UBlock>> {
    let blocks = if v % 14 == 1 {
        let classes: Vec<u32> = (1..=(v - 1) / 2).collect();
        let bases = search::find_base_cycles(v, &classes, &SearchBudget::default())?;
        develop_cycles(&bases, v)
    } else {
        let n = v / 7;
        let mut blocks = Vec::new();
        for j in 0..n {
            blocks.extend(walecki_k7(std::array::from_fn(|i| 7 * j + i as u32)));
        }
        if n > 1 {
            blocks.extend(c7_multipartite(n)?);
        }
        blocks
    };
    ensure_undirected(&blocks, &HostSpec::Complete { v })?;
    Ok(blocks)
}

pub fn develop_cycles(bases: &[[Label; 7]], m: u32) -> Vec<UBlock> {
    bases.iter().flat_map(|b| (0..m).map(move |i| UBlock::Cycle7(b.map(|x| (x + i) % m)))).collect()
}

/// 7-cycle system of `K_{n×7}` (parts by label ranges), `n` odd.
pub fn c7_multipartite(n: u32) -> Result<Vec<UBlock>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(not_admissible(n, "a C7-decomposition of K_{n×7} is built here for odd n ≥ 3"));
    }
    Ok(memo(&C7_MULTI_MEMO, n, || c7_multipartite_uncached(n))?.as_ref().clone())
}

/// The cyclic `K_{r×7}` system for `r ∈ {3, 5}` over `Z_{7r}`, residue layout.
pub fn c7_multipartite_residue(r: u32) -> Result<Vec<UBlock>> {
    let record = crate::base::derived_fixture(crate::base::DerivedFixture::multipartite_c7(r)?)?;
    let set = record.starter_set()?;
    set.develop_cycles()
}

fn c7_multipartite_uncached(n: u32) -> Result<Vec<UBlock>> {
    let blocks = if n == 3 || n == 5 {
        c7_multipartite_residue(n)?.iter().map(|b| b.map_labels(|l| 7 * (l % n) + l / n)).collect()
    } else {
        let quotient = pbd35(n)?;
        let mut blocks = Vec::new();
        for piece in inflate(&quotient, 7)? {
            let fill = c7_multipartite_residue(piece.parts() as u32)?;
            blocks.extend(fill.iter().map(|b| b.map_labels(|l| piece.from_residue(l))));
        }
        blocks
    };
    ensure_undirected(&blocks, &HostSpec::k_parts(n, 7, Layout::Ranges))?;
    Ok(blocks)
}
