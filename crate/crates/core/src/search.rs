//! Starter-set search and small exact covers.
//!
//! Starter search backtracks over block labelings, one position at a time,
//! with difference-class pruning: every full orbit consumes exactly seven
//! arc-difference classes (two of them the classes "into ∞" and "out of ∞"
//! when the block passes through the fixed point). Plain depth-first search
//! is heavy-tailed on these instances, so it runs in capped attempts: the
//! first in natural candidate order, the rest with candidates shuffled by a
//! generator seeded from the budget seed and the attempt number. An attempt
//! that finishes below its cap has explored the whole space, which ends the
//! search.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::{FixtureRecord, Starter, StarterLabel, StarterSet};
use crate::catalog::{Block, HeptClass, Label, OrientationWord};
use crate::design::{Decomposition, Pattern, PlanNode};
use crate::dlx::{Dlx, Outcome};
use crate::error::{Error, Result};
use crate::hosts::{HostSpec, Layout};
use crate::ingredients::UBlock;
use crate::verifier::{ensure, ensure_undirected};

/// Exact-cover instances above this many arcs (or edges) are refused.
pub const EXACT_COVER_LIMIT: usize = 2000;

const ATTEMPT_CAP: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { nodes: 10_000_000, millis: None, seed: 0 }
    }
}

impl SearchBudget {
    pub fn nodes(nodes: u64) -> Self {
        SearchBudget { nodes, ..SearchBudget::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes == 0 || self.millis == Some(0) {
            return Err(Error::Malformed("search limits must be positive".into()));
        }
        Ok(())
    }
}

/// Requested orbit lengths over `Z_modulus` acting on `rows` copies of
/// itself, optionally with a fixed point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitProfile {
    pub modulus: u32,
    #[serde(default = "one")]
    pub rows: u32,
    pub infinity: bool,
    pub orbits: Vec<u32>,
}

fn one() -> u32 {
    1
}

impl OrbitProfile {
    pub fn full(modulus: u32, infinity: bool, count: usize) -> Self {
        OrbitProfile { modulus, rows: 1, infinity, orbits: vec![modulus; count] }
    }

    pub fn new(modulus: u32, rows: u32, infinity: bool, orbits: Vec<u32>) -> Self {
        OrbitProfile { modulus, rows, infinity, orbits }
    }

    pub fn describe(&self) -> String {
        let rows = if self.rows == 1 { String::new() } else { format!("{}x", self.rows) };
        let inf = if self.infinity { "+inf" } else { "" };
        format!("{rows}Z_{}{inf} {:?}", self.modulus, self.orbits)
    }

    fn check(&self, host: &HostSpec) -> Result<()> {
        let n = self.modulus;
        if n == 0 || self.rows == 0 || host.order() != n * self.rows + u32::from(self.infinity) {
            return Err(Error::InvalidStarter(format!(
                "profile {} does not label the {} points of {host}",
                self.describe(),
                host.order()
            )));
        }
        if self.rows > 1 && !matches!(host, HostSpec::CompleteSym { .. }) {
            return Err(Error::InvalidStarter("several rows are supported for K*_v only".into()));
        }
        let covered: u64 = self.orbits.iter().map(|&o| o as u64 * 7).sum();
        if covered != host.size() as u64 {
            return Err(Error::InvalidStarter(format!(
                "orbits {:?} cover {covered} arcs, host {host} has {}",
                self.orbits,
                host.size()
            )));
        }
        for &o in &self.orbits {
            if o != n && !(n.is_multiple_of(7) && o == n / 7) {
                return Err(Error::InvalidStarter(format!("orbit length {o} unsupported over Z_{n}")));
            }
        }
        Ok(())
    }
}

/// A search description as accepted on the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRequest {
    pub host: HostSpec,
    pub class: Pattern,
    pub modulus: u32,
    #[serde(default = "one")]
    pub rows: u32,
    pub infinity: bool,
    pub orbits: Vec<u32>,
    #[serde(default)]
    pub budget: Option<SearchBudget>,
}

impl SearchRequest {
    pub fn run(&self) -> Result<StarterSet> {
        let profile = OrbitProfile::new(self.modulus, self.rows, self.infinity, self.orbits.clone());
        find_starters(&self.host, self.class, &profile, &self.budget.clone().unwrap_or_default())
    }
}

enum Step {
    Found,
    Dead,
    Stop,
}

struct Control {
    nodes: u64,
    attempt_nodes: u64,
    cap: u64,
    limit: u64,
    deadline: Option<Instant>,
    rng: Option<ChaCha8Rng>,
    capped: bool,
}

impl Control {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.attempt_nodes += 1;
        if self.attempt_nodes > self.cap || self.nodes > self.limit {
            self.capped = true;
            return false;
        }
        if self.nodes.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.limit = 0;
                    self.capped = true;
                    return false;
                }
            }
        }
        true
    }

    fn order<T>(&mut self, items: &mut [T]) {
        if let Some(rng) = self.rng.as_mut() {
            items.shuffle(rng);
        }
    }
}

/// Runs `attempt` with growing caps until it succeeds, proves there is no
/// solution, or the budget runs out.
fn with_restarts<T>(
    budget: &SearchBudget,
    what: &str,
    mut attempt: impl FnMut(&mut Control) -> Option<T>,
) -> Result<T> {
    budget.validate()?;
    let deadline = budget.millis.map(|ms| Instant::now() + Duration::from_millis(ms));
    let mut ctl = Control {
        nodes: 0,
        attempt_nodes: 0,
        cap: ATTEMPT_CAP,
        limit: budget.nodes,
        deadline,
        rng: None,
        capped: false,
    };
    for k in 0u64.. {
        ctl.attempt_nodes = 0;
        ctl.capped = false;
        ctl.cap = ATTEMPT_CAP + 2_000 * k;
        ctl.rng = (k > 0).then(|| ChaCha8Rng::seed_from_u64(budget.seed.wrapping_mul(0x9e37_79b9).wrapping_add(k)));
        if let Some(found) = attempt(&mut ctl) {
            return Ok(found);
        }
        if !ctl.capped {
            return Err(Error::Exhausted(format!("{what}: no solution exists ({} nodes)", ctl.nodes)));
        }
        if ctl.nodes >= ctl.limit {
            break;
        }
    }
    Err(Error::Exhausted(format!("{what}: budget of {} nodes spent", budget.nodes)))
}

/// Difference classes available for a cyclic labeling of `host` over `Z_n`.
fn allowed_differences(host: &HostSpec, n: u32) -> Result<Vec<bool>> {
    let mut ok = vec![false; n as usize];
    match host {
        HostSpec::CompleteSym { .. } | HostSpec::Complete { .. } => {
            for d in 1..n {
                ok[d as usize] = true;
            }
        }
        HostSpec::SymMultipartite { parts, layout: Layout::Residues }
        | HostSpec::Multipartite { parts, layout: Layout::Residues } => {
            let r = parts.len() as u32;
            for d in 1..n {
                ok[d as usize] = d % r != 0;
            }
        }
        other => return Err(Error::InvalidStarter(format!("{other} has no cyclic labeling here"))),
    }
    Ok(ok)
}

/// Finds starters for `host` whose development under `profile` is a
/// decomposition into `pattern`. The result is verified before it is returned.
pub fn find_starters(
    host: &HostSpec,
    pattern: Pattern,
    profile: &OrbitProfile,
    budget: &SearchBudget,
) -> Result<StarterSet> {
    find_starters_extending(host, pattern, profile, &[], budget)
}

/// As [`find_starters`], keeping the given full-orbit starters and searching
/// only for the rest of the profile.
pub fn find_starters_extending(
    host: &HostSpec,
    pattern: Pattern,
    profile: &OrbitProfile,
    fixed: &[Starter],
    budget: &SearchBudget,
) -> Result<StarterSet> {
    profile.check(host)?;
    let n = profile.modulus;
    let set = match pattern {
        Pattern::Oriented(class) => {
            if !host.is_directed() {
                return Err(Error::InvalidStarter(format!("{host} is undirected; {class} needs a directed host")));
            }
            directed_search(host, class, profile, fixed, budget)?
        }
        Pattern::Cycle => {
            if host.is_directed()
                || profile.infinity
                || profile.rows != 1
                || profile.orbits.iter().any(|&o| o != n)
                || !fixed.is_empty()
            {
                return Err(Error::InvalidStarter("7-cycle search supports full orbits over Z_n only".into()));
            }
            let allowed = allowed_differences(host, n)?;
            let classes: Vec<u32> = (1..=(n - 1) / 2).filter(|&d| allowed[d as usize]).collect();
            if n.is_multiple_of(2) && allowed[(n / 2) as usize] {
                return Err(Error::InvalidStarter("the half difference has a short orbit".into()));
            }
            let bases = find_base_cycles(n, &classes, budget)?;
            StarterSet {
                modulus: n,
                rows: 1,
                infinity: false,
                starters: bases.iter().map(|b| Starter { labels: b.map(StarterLabel::Point), orbit: n }).collect(),
            }
        }
    };
    match pattern {
        Pattern::Oriented(class) => ensure(&set.develop(host, class)?)?,
        Pattern::Cycle => ensure_undirected(&set.develop_cycles()?, host)?,
    }
    Ok(set)
}

/// Arc-difference classes of a labeling by `rows` copies of `Z_m` plus an
/// optional fixed point: finite classes `(i, j, d)` for an arc from row `i`
/// to row `j` raising the coordinate by `d`, then "into ∞" and "out of ∞"
/// for every row.
struct Classes {
    m: u32,
    rows: u32,
}

impl Classes {
    fn finite(&self, i: u32, j: u32, d: u32) -> usize {
        ((i * self.rows + j) * self.m + d) as usize
    }

    fn to_inf(&self, row: u32) -> usize {
        (self.rows * self.rows * self.m + 2 * row) as usize
    }

    fn out_of_inf(&self, row: u32) -> usize {
        self.to_inf(row) + 1
    }

    fn len(&self) -> usize {
        self.to_inf(self.rows)
    }

    /// `(i, j, d)` of a finite class; `None` for the ∞ classes.
    fn finite_parts(&self, c: usize) -> Option<(u32, u32, u32)> {
        let c = c as u32;
        if c >= self.rows * self.rows * self.m {
            return None;
        }
        let (ij, d) = (c / self.m, c % self.m);
        Some((ij / self.rows, ij % self.rows, d))
    }

    fn split(&self, label: Label) -> (u32, u32) {
        (label / self.m, label % self.m)
    }

    /// Class of the arc `a → b`, `None` standing for ∞.
    fn of_arc(&self, a: Option<Label>, b: Option<Label>) -> Result<usize> {
        match (a, b) {
            (Some(a), Some(b)) => {
                let ((i, x), (j, y)) = (self.split(a), self.split(b));
                Ok(self.finite(i, j, (y + self.m - x) % self.m))
            }
            (Some(a), None) => Ok(self.to_inf(self.split(a).0)),
            (None, Some(b)) => Ok(self.out_of_inf(self.split(b).0)),
            (None, None) => Err(Error::InvalidStarter("∞ twice in one block".into())),
        }
    }
}

struct Directed {
    cls: Classes,
    word: OrientationWord,
    used: Vec<bool>,
    /// Starters through ∞ still to place; they come first.
    inf_starters: usize,
    full: usize,
    short: usize,
    starters: Vec<[Option<Label>; 7]>,
    shorts: Vec<(u32, u32)>,
}

impl Directed {
    fn moves(&self, from_row: u32, forward: bool, ctl: &mut Control) -> Vec<(u32, u32, usize)> {
        let (m, r) = (self.cls.m, self.cls.rows);
        let mut out = Vec::new();
        for j in 0..r {
            for d in 0..m {
                let c = if forward { self.cls.finite(from_row, j, d) } else { self.cls.finite(j, from_row, d) };
                if !self.used[c] {
                    out.push((j, d, c));
                }
            }
        }
        ctl.order(&mut out);
        out
    }

    fn short_rec(&mut self, k: usize, ctl: &mut Control) -> Step {
        if k == self.short {
            if !self.sum_feasible() {
                return Step::Dead;
            }
            return self.full_rec(0, ctl);
        }
        let m = self.cls.m;
        let mut opts: Vec<(u32, u32)> = (0..self.cls.rows)
            .flat_map(|i| (1..m).map(move |d| (i, d)))
            .filter(|&(i, d)| (7 * d) % m == 0 && !self.used[self.cls.finite(i, i, d)])
            .filter(|&o| self.shorts.last().is_none_or(|&p| p < o))
            .collect();
        ctl.order(&mut opts);
        for (i, d) in opts {
            if !ctl.tick() {
                return Step::Stop;
            }
            let c = self.cls.finite(i, i, d);
            self.used[c] = true;
            self.shorts.push((i, d));
            match self.short_rec(k + 1, ctl) {
                Step::Dead => {}
                other => return other,
            }
            self.shorts.pop();
            self.used[c] = false;
        }
        Step::Dead
    }

    /// All-forward blocks close up, so their coordinate differences sum to 0;
    /// a single block through ∞ must leave a nonzero sum for its path.
    fn sum_feasible(&self) -> bool {
        if self.word != OrientationWord::ALL_FORWARD {
            return true;
        }
        let (m, r) = (self.cls.m, self.cls.rows);
        let mut sum = 0u64;
        for i in 0..r {
            for j in 0..r {
                for d in 0..m {
                    if !self.used[self.cls.finite(i, j, d)] {
                        sum += d as u64;
                    }
                }
            }
        }
        let zero = sum.is_multiple_of(m as u64);
        match self.inf_starters {
            0 => zero,
            1 if r == 1 => !zero,
            _ => true,
        }
    }

    fn full_rec(&mut self, s: usize, ctl: &mut Control) -> Step {
        if s == self.full {
            return Step::Found;
        }
        let rows = self.cls.rows;
        if s < self.inf_starters {
            for p in (0..7).rev() {
                // With one row there is a single class each way, so ∞ must
                // sit where one arc enters and the other leaves.
                if rows == 1 && self.word.is_forward((p + 6) % 7) != self.word.is_forward(p) {
                    continue;
                }
                let order: Vec<usize> = (1..7).map(|k| (p + k) % 7).collect();
                for row in 0..rows {
                    let first = row * self.cls.m;
                    let c = if self.word.is_forward(p) { self.cls.out_of_inf(row) } else { self.cls.to_inf(row) };
                    if self.used[c] {
                        continue;
                    }
                    self.used[c] = true;
                    let mut labels = [None; 7];
                    labels[order[0]] = Some(first);
                    let r = self.chain(s, &mut labels, &order, 1, Some(p), ctl);
                    if !matches!(r, Step::Dead) {
                        return r;
                    }
                    self.used[c] = false;
                }
            }
            return Step::Dead;
        }
        // Starters are interchangeable, so the next one holds the smallest
        // unused class; translation puts that arc's tail at x = 0.
        let Some(c) = (0..self.used.len()).find(|&c| !self.used[c] && self.cls.finite_parts(c).is_some()) else {
            return Step::Dead;
        };
        let (i, j, d) = self.cls.finite_parts(c).expect("finite class");
        let (tail, head) = (i * self.cls.m, j * self.cls.m + d);
        self.used[c] = true;
        for p in 0..7 {
            let order: Vec<usize> = (0..7).map(|k| (p + k) % 7).collect();
            let mut labels = [None; 7];
            if self.word.is_forward(p) {
                labels[p] = Some(tail);
                labels[(p + 1) % 7] = Some(head);
            } else {
                labels[(p + 1) % 7] = Some(tail);
                labels[p] = Some(head);
            }
            match self.chain(s, &mut labels, &order, 2, None, ctl) {
                Step::Dead => {}
                other => return other,
            }
        }
        self.used[c] = false;
        Step::Dead
    }

    /// Assigns `labels[order[i]]` onward. `inf` is the ∞ position, if any;
    /// otherwise the block closes from position 6 back to position 0.
    fn chain(
        &mut self,
        s: usize,
        labels: &mut [Option<Label>; 7],
        order: &[usize],
        i: usize,
        inf: Option<usize>,
        ctl: &mut Control,
    ) -> Step {
        let m = self.cls.m;
        if i == order.len() {
            let c = match inf {
                None => {
                    let q = order[6];
                    let (a, b) = (labels[q], labels[(q + 1) % 7]);
                    let (a, b) = if self.word.is_forward(q) { (a, b) } else { (b, a) };
                    self.cls.of_arc(a, b).expect("finite labels")
                }
                Some(p) => {
                    let last = labels[(p + 6) % 7];
                    if self.word.is_forward((p + 6) % 7) {
                        self.cls.of_arc(last, None).expect("finite tail")
                    } else {
                        self.cls.of_arc(None, last).expect("finite head")
                    }
                }
            };
            if self.used[c] {
                return Step::Dead;
            }
            self.used[c] = true;
            self.starters.push(*labels);
            let r = self.full_rec(s + 1, ctl);
            if !matches!(r, Step::Found) {
                self.starters.pop();
                self.used[c] = false;
            }
            return r;
        }
        let (prev, cur) = (order[i - 1], order[i]);
        let forward = self.word.is_forward(prev);
        let (row, x0) = self.cls.split(labels[prev].expect("assigned"));
        for (j, d, c) in self.moves(row, forward, ctl) {
            let x = if forward { (x0 + d) % m } else { (x0 + m - d) % m };
            let label = j * m + x;
            if labels.contains(&Some(label)) {
                continue;
            }
            if !ctl.tick() {
                return Step::Stop;
            }
            self.used[c] = true;
            labels[cur] = Some(label);
            match self.chain(s, labels, order, i + 1, inf, ctl) {
                Step::Dead => {}
                other => return other,
            }
            labels[cur] = None;
            self.used[c] = false;
        }
        Step::Dead
    }
}

fn starter_classes(cls: &Classes, word: OrientationWord, labels: &[StarterLabel; 7]) -> Result<Vec<usize>> {
    let opt = |l: StarterLabel| match l {
        StarterLabel::Point(x) => Some(x),
        StarterLabel::Inf => None,
    };
    (0..7)
        .map(|j| {
            let (a, b) = (opt(labels[j]), opt(labels[(j + 1) % 7]));
            if word.is_forward(j) {
                cls.of_arc(a, b)
            } else {
                cls.of_arc(b, a)
            }
        })
        .collect()
}

fn directed_search(
    host: &HostSpec,
    class: HeptClass,
    profile: &OrbitProfile,
    fixed: &[Starter],
    budget: &SearchBudget,
) -> Result<StarterSet> {
    let (n, rows) = (profile.modulus, profile.rows);
    let cls = Classes { m: n, rows };
    let short = profile.orbits.iter().filter(|&&o| o != n).count();
    if short > 0 && class != HeptClass::D10 {
        return Err(Error::InvalidStarter(format!("short orbits are constant-difference cycles; {class} is not D10")));
    }
    let mut base_used = vec![true; cls.len()];
    let allowed = allowed_differences(host, n)?;
    for i in 0..rows {
        for j in 0..rows {
            for d in 0..n {
                base_used[cls.finite(i, j, d)] = i == j && !allowed[d as usize];
            }
        }
        if profile.infinity {
            base_used[cls.to_inf(i)] = false;
            base_used[cls.out_of_inf(i)] = false;
        }
    }
    let mut fixed_inf = 0;
    for st in fixed {
        if st.orbit != n {
            return Err(Error::InvalidStarter("kept starters must have full orbits".into()));
        }
        fixed_inf += usize::from(st.labels.contains(&StarterLabel::Inf));
        for c in starter_classes(&cls, class.word(), &st.labels)? {
            if std::mem::replace(&mut base_used[c], true) {
                return Err(Error::InvalidStarter(format!("kept starters reuse difference class {c}")));
            }
        }
    }
    let full = profile.orbits.len() - short;
    let inf_total = if profile.infinity { rows as usize } else { 0 };
    if fixed.len() > full || fixed_inf > inf_total {
        return Err(Error::InvalidStarter("kept starters do not fit the profile".into()));
    }
    let what = format!("{host} / {class} over {}", profile.describe());
    let (starters, shorts) = with_restarts(budget, &what, |ctl| {
        let mut st = Directed {
            cls: Classes { m: n, rows },
            word: class.word(),
            used: base_used.clone(),
            inf_starters: inf_total - fixed_inf,
            full: full - fixed.len(),
            short,
            starters: Vec::new(),
            shorts: Vec::new(),
        };
        match st.short_rec(0, ctl) {
            Step::Found => Some((st.starters, st.shorts)),
            _ => None,
        }
    })?;
    let mut out: Vec<Starter> = fixed.to_vec();
    for s in starters {
        out.push(Starter { labels: s.map(|l| l.map_or(StarterLabel::Inf, StarterLabel::Point)), orbit: n });
    }
    for (i, d) in shorts {
        out.push(Starter {
            labels: std::array::from_fn(|k| StarterLabel::Point(i * n + k as u32 * d % n)),
            orbit: n / 7,
        });
    }
    Ok(StarterSet { modulus: n, rows, infinity: profile.infinity, starters: out })
}

/// Base 7-cycles over `Z_n` whose edge differences use every class in
/// `classes` (each in `1..n/2`) exactly once.
pub fn find_base_cycles(n: u32, classes: &[u32], budget: &SearchBudget) -> Result<Vec<[Label; 7]>> {
    if !classes.len().is_multiple_of(7) {
        return Err(Error::InvalidStarter(format!("{} difference classes do not split into 7-cycles", classes.len())));
    }
    let mut avail = vec![false; n as usize];
    for &c in classes {
        if c == 0 || 2 * c >= n {
            return Err(Error::InvalidStarter(format!("difference class {c} invalid modulo {n}")));
        }
        avail[c as usize] = true;
    }
    let what = format!("7-cycles over Z_{n}");
    with_restarts(budget, &what, |ctl| {
        let mut st = Cycles { n, avail: avail.clone(), out: Vec::new() };
        match st.next_cycle(ctl) {
            Step::Found => Some(st.out),
            _ => None,
        }
    })
}

struct Cycles {
    n: u32,
    avail: Vec<bool>,
    out: Vec<[Label; 7]>,
}

impl Cycles {
    fn class(&self, d: u32) -> u32 {
        let d = d % self.n;
        d.min(self.n - d)
    }

    fn next_cycle(&mut self, ctl: &mut Control) -> Step {
        let Some(top) = (1..self.n).rev().find(|&d| (d as usize) < self.avail.len() && self.avail[d as usize]) else {
            return Step::Found;
        };
        self.avail[top as usize] = false;
        let mut cyc = [0; 7];
        cyc[1] = top;
        let r = self.extend(&mut cyc, 2, ctl);
        if !matches!(r, Step::Found) {
            self.avail[top as usize] = true;
        }
        r
    }

    fn extend(&mut self, cyc: &mut [Label; 7], i: usize, ctl: &mut Control) -> Step {
        let n = self.n;
        if i == 7 {
            let close = self.class(cyc[6]);
            if close == 0 || !self.avail[close as usize] {
                return Step::Dead;
            }
            self.avail[close as usize] = false;
            self.out.push(*cyc);
            let r = self.next_cycle(ctl);
            if !matches!(r, Step::Found) {
                self.out.pop();
                self.avail[close as usize] = true;
            }
            return r;
        }
        let mut moves: Vec<(u32, bool)> = Vec::new();
        for d in (1..n).rev() {
            if (d as usize) < self.avail.len() && self.avail[d as usize] {
                moves.push((d, true));
                moves.push((d, false));
            }
        }
        ctl.order(&mut moves);
        for (d, plus) in moves {
            let x = if plus { (cyc[i - 1] + d) % n } else { (cyc[i - 1] + n - d) % n };
            if cyc[..i].contains(&x) {
                continue;
            }
            if !ctl.tick() {
                return Step::Stop;
            }
            self.avail[d as usize] = false;
            cyc[i] = x;
            match self.extend(cyc, i + 1, ctl) {
                Step::Dead => {}
                other => return other,
            }
            self.avail[d as usize] = true;
        }
        Step::Dead
    }
}

/// Undirected block shapes for exact cover.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UKind {
    K3,
    K5,
    C7,
}

/// What an exact cover should decompose a host into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverTarget {
    Oriented(HeptClass),
    Undirected(Vec<UKind>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cover {
    Directed(Decomposition),
    Undirected(Vec<UBlock>),
}

pub fn exact_cover_small(host: &HostSpec, target: &CoverTarget, budget: &SearchBudget) -> Result<Cover> {
    match target {
        CoverTarget::Oriented(c) => exact_cover_directed(host, *c, budget).map(Cover::Directed),
        CoverTarget::Undirected(kinds) => exact_cover_undirected(host, kinds, budget).map(Cover::Undirected),
    }
}

struct Cells {
    index: Vec<Option<usize>>,
    n: u32,
    count: usize,
}

impl Cells {
    fn new(host: &HostSpec, directed: bool) -> Self {
        let n = host.order();
        let mut index = vec![None; (n * n) as usize];
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                if a != b && (directed || a < b) && host.joins(a, b) {
                    index[(a * n + b) as usize] = Some(count);
                    count += 1;
                }
            }
        }
        Cells { index, n, count }
    }

    fn arc(&self, a: Label, b: Label) -> Option<usize> {
        self.index[(a * self.n + b) as usize]
    }

    fn edge(&self, a: Label, b: Label) -> Option<usize> {
        self.arc(a.min(b), a.max(b))
    }
}

fn guard(host: &HostSpec) -> Result<()> {
    host.validate()?;
    let size = host.size();
    if size > EXACT_COVER_LIMIT {
        return Err(Error::HostTooLarge(size));
    }
    Ok(())
}

fn solve_rows<T: Clone>(columns: usize, rows: &[(Vec<usize>, T)], budget: &SearchBudget, what: &str) -> Result<Vec<T>> {
    let mut dlx = Dlx::new(columns);
    for (cols, _) in rows {
        dlx.add_row(cols);
    }
    match dlx.solve(budget.nodes) {
        (Outcome::Solved(picked), _) => Ok(picked.iter().map(|&r| rows[r].1.clone()).collect()),
        (Outcome::NoSolution, nodes) => Err(Error::Exhausted(format!("{what}: no exact cover ({nodes} nodes)"))),
        (Outcome::OutOfBudget, _) => Err(Error::Exhausted(format!("{what}: budget of {} nodes spent", budget.nodes))),
    }
}

/// Every labeled copy of `class` inside `host`, one row per distinct arc set.
pub fn exact_cover_directed(host: &HostSpec, class: HeptClass, budget: &SearchBudget) -> Result<Decomposition> {
    guard(host)?;
    if !host.is_directed() {
        return Err(Error::InvalidStarter(format!("{host} is undirected")));
    }
    let cells = Cells::new(host, true);
    let n = host.order();
    let word = class.word();
    let mut seen = HashSet::new();
    let mut rows: Vec<(Vec<usize>, Block)> = Vec::new();
    let mut seq = [0 as Label; 7];
    let mut generated = 0u64;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        seq: &mut [Label; 7],
        n: u32,
        word: OrientationWord,
        cells: &Cells,
        out: &mut dyn FnMut(&[Label; 7]) -> Result<()>,
        generated: &mut u64,
        limit: u64,
    ) -> Result<()> {
        *generated += 1;
        if *generated > limit {
            return Err(Error::Exhausted("candidate enumeration exceeded the node budget".into()));
        }
        if i == 7 {
            return out(seq);
        }
        for x in 0..n {
            if seq[..i].contains(&x) {
                continue;
            }
            if i > 0 {
                let (a, b) = if word.is_forward(i - 1) { (seq[i - 1], x) } else { (x, seq[i - 1]) };
                if cells.arc(a, b).is_none() {
                    continue;
                }
            }
            seq[i] = x;
            rec(i + 1, seq, n, word, cells, out, generated, limit)?;
        }
        Ok(())
    }
    let mut push = |s: &[Label; 7]| -> Result<()> {
        let b = Block::new(class, *s)?;
        let (a, h) = if word.is_forward(6) { (s[6], s[0]) } else { (s[0], s[6]) };
        if cells.arc(a, h).is_none() {
            return Ok(());
        }
        let mut cols: Vec<usize> = b.arcs().iter().map(|a| cells.arc(a.tail, a.head).expect("checked")).collect();
        cols.sort_unstable();
        if seen.insert(cols.clone()) {
            rows.push((cols, b));
        }
        Ok(())
    };
    rec(0, &mut seq, n, word, &cells, &mut push, &mut generated, budget.nodes)?;
    let blocks = solve_rows(cells.count, &rows, budget, &format!("{host} / {class}"))?;
    let d = Decomposition::new(host.clone(), class, blocks, PlanNode::leaf(format!("exact-cover({host}/{class})")));
    ensure(&d)?;
    Ok(d)
}

fn subsets(n: u32, k: usize, f: &mut dyn FnMut(&[Label])) {
    fn rec(start: u32, n: u32, k: usize, cur: &mut Vec<Label>, f: &mut dyn FnMut(&[Label])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

pub fn exact_cover_undirected(host: &HostSpec, kinds: &[UKind], budget: &SearchBudget) -> Result<Vec<UBlock>> {
    guard(host)?;
    if host.is_directed() {
        return Err(Error::InvalidStarter(format!("{host} is directed")));
    }
    let cells = Cells::new(host, false);
    let n = host.order();
    let mut rows: Vec<(Vec<usize>, UBlock)> = Vec::new();
    let mut add = |b: UBlock| {
        let cols: Option<Vec<usize>> = b.edges().iter().map(|&(x, y)| cells.edge(x, y)).collect();
        if let Some(mut cols) = cols {
            cols.sort_unstable();
            rows.push((cols, b));
        }
    };
    for kind in kinds {
        match kind {
            UKind::K3 => subsets(n, 3, &mut |s| add(UBlock::Triangle([s[0], s[1], s[2]]))),
            UKind::K5 => subsets(n, 5, &mut |s| add(UBlock::Clique5([s[0], s[1], s[2], s[3], s[4]]))),
            UKind::C7 => subsets(n, 7, &mut |s| {
                // Cycles through s with s[0] first and the second vertex
                // smaller than the last: one per dihedral class.
                let rest: Vec<Label> = s[1..].to_vec();
                permute(&rest, &mut |p| {
                    if p[0] < p[5] {
                        add(UBlock::Cycle7([s[0], p[0], p[1], p[2], p[3], p[4], p[5]]));
                    }
                });
            }),
        }
    }
    let blocks = solve_rows(cells.count, &rows, budget, &format!("{host}"))?;
    ensure_undirected(&blocks, host)?;
    Ok(blocks)
}

fn permute(items: &[Label], f: &mut dyn FnMut(&[Label])) {
    fn rec(items: &mut Vec<Label>, k: usize, f: &mut dyn FnMut(&[Label])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            rec(items, k + 1, f);
            items.swap(k, i);
        }
    }
    rec(&mut items.to_vec(), 0, f);
}

/// Orbit profiles tried for a derived fixture, in order: full orbits over
/// `Z_N`, full orbits over `Z_{N−1} ∪ {∞}`, then profiles mixing full orbits
/// with constant-difference cycles.
pub fn candidate_profiles(host: &HostSpec, pattern: Pattern) -> Vec<OrbitProfile> {
    let big_n = host.order();
    let arcs = host.size() as u32;
    let mut out = Vec::new();
    if !arcs.is_multiple_of(7) || big_n < 2 {
        return out;
    }
    let blocks = arcs / 7;
    let cyclic_only = pattern == Pattern::Cycle || !matches!(host, HostSpec::CompleteSym { .. });
    if blocks.is_multiple_of(big_n) {
        out.push(OrbitProfile::full(big_n, false, (blocks / big_n) as usize));
    }
    if cyclic_only {
        return out;
    }
    let n = big_n - 1;
    if blocks.is_multiple_of(n) {
        out.push(OrbitProfile::full(n, true, (blocks / n) as usize));
    }
    if pattern == Pattern::Oriented(HeptClass::D10) {
        for (m, inf) in [(big_n, false), (n, true)] {
            if m % 7 != 0 {
                continue;
            }
            // f full orbits and s short ones: f·m + s·m/7 = blocks.
            let total = 7 * blocks / m;
            if !(7 * blocks).is_multiple_of(m) {
                continue;
            }
            for s in 1..=total {
                if (total - s).is_multiple_of(7) && s < m {
                    let f = (total - s) / 7;
                    let mut orbits = vec![m; f as usize];
                    orbits.extend(std::iter::repeat_n(m / 7, s as usize));
                    out.push(OrbitProfile::new(m, 1, inf, orbits));
                    break;
                }
            }
        }
        // Z_7 acting on several rows of seven points, with fixed
        // constant-difference cycles inside rows.
        for (points, inf) in [(big_n, false), (n, true)] {
            let rows = points / 7;
            if points % 7 != 0 || rows < 2 {
                continue;
            }
            if let Some(s) = (0..=6 * rows).find(|s| (blocks - s).is_multiple_of(7)) {
                let mut orbits = vec![7; ((blocks - s) / 7) as usize];
                orbits.extend(std::iter::repeat_n(1, s as usize));
                out.push(OrbitProfile::new(7, rows, inf, orbits));
            }
        }
    }
    out
}

/// The six hosts whose base designs are produced by search.
pub fn is_derived_target(host: &HostSpec, pattern: Pattern) -> bool {
    match (host, pattern) {
        (HostSpec::CompleteSym { v }, Pattern::Oriented(HeptClass::D10)) => matches!(v, 7 | 8 | 14 | 28),
        (HostSpec::Multipartite { parts, layout: Layout::Residues }, Pattern::Cycle) => {
            matches!(parts.len(), 3 | 5) && parts.iter().all(|&p| p == 7)
        }
        _ => false,
    }
}

/// Searches the candidate profiles in order and returns the first verified
/// fixture record.
pub fn derive_fixture(host: &HostSpec, pattern: Pattern, budget: &SearchBudget) -> Result<FixtureRecord> {
    if !is_derived_target(host, pattern) {
        return Err(Error::NoFixture { host: host.to_string(), class: pattern.to_string() });
    }
    let mut last = Error::Exhausted(format!("{host} / {pattern}: no orbit profile fits"));
    for profile in candidate_profiles(host, pattern) {
        match find_starters(host, pattern, &profile, budget) {
            Ok(set) => return FixtureRecord::new(host.clone(), pattern, set, "search"),
            Err(e @ Error::Exhausted(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_a_k8_starter_for_every_class() {
        for id in 1..=8 {
            let class = HeptClass::new(id).unwrap();
            let set = find_starters(
                &HostSpec::kstar(8),
                Pattern::Oriented(class),
                &OrbitProfile::full(8, false, 1),
                &SearchBudget::default(),
            )
            .unwrap();
            assert_eq!(set.starters.len(), 1);
        }
    }

    #[test]
    fn no_cyclic_d10_over_z8() {
        // Seven distinct nonzero residues mod 8 sum to 4, never to 0.
        let r = find_starters(
            &HostSpec::kstar(8),
            Pattern::Oriented(HeptClass::D10),
            &OrbitProfile::full(8, false, 1),
            &SearchBudget::default(),
        );
        assert!(matches!(r, Err(Error::Exhausted(ref m)) if m.contains("no solution")));
        assert_eq!((1..8).sum::<u32>() % 8, 4);
    }

    #[test]
    fn k8_d10_with_a_fixed_cycle() {
        let p = OrbitProfile::new(7, 1, true, vec![7, 1]);
        let set = find_starters(&HostSpec::kstar(8), Pattern::Oriented(HeptClass::D10), &p, &SearchBudget::default())
            .unwrap();
        assert_eq!(set.starters.iter().map(|s| s.orbit).collect::<Vec<_>>(), vec![7, 1]);
    }

    #[test]
    fn profile_must_match_host() {
        let p = OrbitProfile::full(8, false, 2);
        let r = find_starters(&HostSpec::kstar(8), Pattern::Oriented(HeptClass::D1), &p, &SearchBudget::default());
        assert!(matches!(r, Err(Error::InvalidStarter(_))));
    }

    #[test]
    fn multipartite_base_cycle() {
        let host = HostSpec::k_parts(3, 7, Layout::Residues);
        let set =
            find_starters(&host, Pattern::Cycle, &OrbitProfile::full(21, false, 1), &SearchBudget::default()).unwrap();
        assert_eq!(set.develop_cycles().unwrap().len(), 21);
    }

    #[test]
    fn base_cycles_for_k15() {
        let c = find_base_cycles(15, &(1..=7).collect::<Vec<_>>(), &SearchBudget::default()).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn exact_cover_examples() {
        let b =
            exact_cover_undirected(&HostSpec::Complete { v: 11 }, &[UKind::K3, UKind::K5], &SearchBudget::default())
                .unwrap();
        assert_eq!(b.iter().filter(|x| x.kind() == "K5").count(), 1);
        assert_eq!(b.iter().filter(|x| x.kind() == "K3").count(), 15);
        let d = exact_cover_directed(&HostSpec::kstar(7), HeptClass::D8, &SearchBudget::default()).unwrap();
        assert_eq!(d.blocks.len(), 6);
        let host = HostSpec::CompleteMinusFactor { v: 4, factor: crate::hosts::OneFactor::new([(0, 1), (2, 3)]) };
        assert!(matches!(
            exact_cover_undirected(&host, &[UKind::K3], &SearchBudget::default()),
            Err(Error::Exhausted(_))
        ));
        assert!(matches!(
            exact_cover_directed(&HostSpec::kstar(50), HeptClass::D1, &SearchBudget::default()),
            Err(Error::HostTooLarge(2450))
        ));
    }

    #[test]
    fn exact_cover_c7_of_k7() {
        let b = exact_cover_undirected(&HostSpec::Complete { v: 7 }, &[UKind::C7], &SearchBudget::default()).unwrap();
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn profiles_in_order() {
        let p = candidate_profiles(&HostSpec::kstar(8), Pattern::Oriented(HeptClass::D10));
        assert_eq!(p[0], OrbitProfile::full(8, false, 1));
        assert!(p.contains(&OrbitProfile::new(7, 1, true, vec![7, 1])));
        let p = candidate_profiles(&HostSpec::kstar(14), Pattern::Oriented(HeptClass::D10));
        assert_eq!(p[0], OrbitProfile::full(13, true, 2));
        assert_eq!(p.last().unwrap().rows, 2);
    }

    #[test]
    fn deterministic() {
        let host = HostSpec::kstar(28);
        let p = OrbitProfile::full(27, true, 4);
        let a = find_starters(&host, Pattern::Oriented(HeptClass::D6), &p, &SearchBudget::default()).unwrap();
        let b = find_starters(&host, Pattern::Oriented(HeptClass::D6), &p, &SearchBudget::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn no_cyclic_d10_over_odd_modulus_with_infinity() {
        // Closed all-forward blocks have difference sum 0 and so does
        // 1 + … + 12 modulo 13, leaving a closed path through ∞.
        let r = find_starters(
            &HostSpec::kstar(14),
            Pattern::Oriented(HeptClass::D10),
            &OrbitProfile::full(13, true, 2),
            &SearchBudget::default(),
        );
        assert!(matches!(r, Err(Error::Exhausted(ref m)) if m.contains("no solution")));
    }

    #[test]
    fn two_row_d10_for_k14() {
        let p = OrbitProfile::new(7, 2, false, [vec![7; 3], vec![1; 5]].concat());
        let set = find_starters(&HostSpec::kstar(14), Pattern::Oriented(HeptClass::D10), &p, &SearchBudget::default())
            .unwrap();
        assert_eq!(set.block_count(), 26);
    }

    #[test]
    fn derives_every_fixture() {
        for (host, pattern) in [
            (HostSpec::kstar(7), Pattern::Oriented(HeptClass::D10)),
            (HostSpec::kstar(8), Pattern::Oriented(HeptClass::D10)),
            (HostSpec::k_parts(5, 7, Layout::Residues), Pattern::Cycle),
        ] {
            let r = derive_fixture(&host, pattern, &SearchBudget::default()).unwrap();
            r.verify().unwrap();
        }
        assert!(matches!(
            derive_fixture(&HostSpec::kstar(9), Pattern::Oriented(HeptClass::D10), &SearchBudget::default()),
            Err(Error::NoFixture { .. })
        ));
    }
}
