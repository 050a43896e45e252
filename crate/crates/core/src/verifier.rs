//! Independent certification of claimed decompositions.
//!
//! The verifier recomputes the host's arc (or edge) set from the host
//! description alone and compares it with the multiset union of the blocks'
//! arcs. Class membership is decided by [`classify_arcs`], never by the
//! labeling a block claims.

use std::fmt::Write as _;

use serde::Serialize;

use crate::catalog::{classify_arcs, Arc, HeptClass};
use crate::design::Decomposition;
use crate::hosts::HostSpec;
use crate::ingredients::UBlock;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub ok: bool,
    pub blocks: usize,
    /// Arcs (or edges) in the host.
    pub host_size: usize,
    pub missing_arcs: Vec<Arc>,
    pub duplicated_arcs: Vec<Arc>,
    pub foreign_arcs: Vec<Arc>,
    pub bad_blocks: Vec<(usize, String)>,
}

impl Report {
    fn finish(mut self) -> Self {
        self.ok = self.missing_arcs.is_empty()
            && self.duplicated_arcs.is_empty()
            && self.foreign_arcs.is_empty()
            && self.bad_blocks.is_empty();
        self
    }
}

struct Tally {
    n: u32,
    counts: Vec<u16>,
    foreign: Vec<Arc>,
}

impl Tally {
    fn new(n: u32) -> Self {
        Tally { n, counts: vec![0; (n as usize) * (n as usize)], foreign: Vec::new() }
    }

    fn add(&mut self, a: Arc) {
        if a.tail >= self.n || a.head >= self.n || a.tail == a.head {
            self.foreign.push(a);
            return;
        }
        let idx = (a.tail * self.n + a.head) as usize;
        self.counts[idx] = self.counts[idx].saturating_add(1);
    }

    fn into_report(self, mut report: Report, member: impl Fn(u32, u32) -> bool, directed: bool) -> Report {
        let n = self.n;
        report.foreign_arcs = self.foreign;
        for t in 0..n {
            let heads = if directed { 0..n } else { t + 1..n };
            for h in heads {
                if t == h {
                    continue;
                }
                let c = self.counts[(t * n + h) as usize];
                let a = Arc::new(t, h);
                if member(t, h) {
                    report.host_size += 1;
                    match c {
                        0 => report.missing_arcs.push(a),
                        1 => {}
                        _ => report.duplicated_arcs.extend(std::iter::repeat_n(a, c as usize - 1)),
                    }
                } else {
                    report.foreign_arcs.extend(std::iter::repeat_n(a, c as usize));
                }
            }
        }
        report.foreign_arcs.sort_unstable();
        report.finish()
    }
}

/// Check that `d.blocks` partition the arcs of `d.host` into copies of `d.class`.
pub fn verify(d: &Decomposition) -> Report {
    let mut report = Report { blocks: d.blocks.len(), ..Report::default() };
    if !d.host.is_directed() || d.host.validate().is_err() {
        report.bad_blocks.push((usize::MAX, format!("host {} is not a valid directed host", d.host)));
        return report.finish();
    }
    let mut tally = Tally::new(d.host.order());
    for (i, b) in d.blocks.iter().enumerate() {
        if let Err(e) = b.check_labels() {
            report.bad_blocks.push((i, e.to_string()));
            continue;
        }
        let arcs = b.arcs();
        match classify_arcs(&arcs) {
            Ok((c, _)) if c == d.class => {}
            Ok((c, _)) => report.bad_blocks.push((i, format!("classifies as {c}, expected {}", d.class))),
            Err(e) => report.bad_blocks.push((i, e.to_string())),
        }
        for a in arcs {
            tally.add(a);
        }
    }
    tally.into_report(report, |t, h| d.host.joins(t, h), true)
}

/// Same contract for undirected blocks over an undirected host. Edges are
/// reported as arcs with `tail < head`.
pub fn verify_undirected(blocks: &[UBlock], host: &HostSpec) -> Report {
    let mut report = Report { blocks: blocks.len(), ..Report::default() };
    if host.is_directed() || host.validate().is_err() {
        report.bad_blocks.push((usize::MAX, format!("host {host} is not a valid undirected host")));
        return report.finish();
    }
    let mut tally = Tally::new(host.order());
    for (i, b) in blocks.iter().enumerate() {
        if let Err(e) = b.check() {
            report.bad_blocks.push((i, e.to_string()));
            continue;
        }
        for (x, y) in b.edges() {
            tally.add(Arc::new(x.min(y), x.max(y)));
        }
    }
    tally.into_report(report, |a, b| host.joins(a, b), false)
}

fn list(out: &mut String, what: &str, arcs: &[Arc]) {
    if arcs.is_empty() {
        return;
    }
    let shown: Vec<String> = arcs.iter().take(20).map(|a| a.to_string()).collect();
    let more = if arcs.len() > 20 { format!(" … (+{})", arcs.len() - 20) } else { String::new() };
    let _ = writeln!(out, "  {} {what}: {}{more}", arcs.len(), shown.join(" "));
}

/// Human-readable rendering of a report, in a stable order.
pub fn diagnose(report: &Report) -> String {
    if report.ok {
        return format!("OK: {} blocks, {} arcs", report.blocks, report.host_size);
    }
    let mut out = format!("FAIL: {} blocks against a host of {} arcs\n", report.blocks, report.host_size);
    list(&mut out, "missing arcs", &report.missing_arcs);
    list(&mut out, "duplicated arcs", &report.duplicated_arcs);
    list(&mut out, "foreign arcs", &report.foreign_arcs);
    for (i, why) in report.bad_blocks.iter().take(20) {
        let _ = writeln!(out, "  block {i}: {why}");
    }
    out.trim_end().to_string()
}

/// Convenience used by constructions: verify and turn failure into an error.
pub fn ensure(d: &Decomposition) -> crate::Result<()> {
    let r = verify(d);
    if r.ok {
        Ok(())
    } else {
        Err(crate::Error::VerificationFailed(format!("{} / {}: {}", d.host, d.class, diagnose(&r))))
    }
}

pub fn ensure_undirected(blocks: &[UBlock], host: &HostSpec) -> crate::Result<()> {
    let r = verify_undirected(blocks, host);
    if r.ok {
        Ok(())
    } else {
        Err(crate::Error::VerificationFailed(format!("{host}: {}", diagnose(&r))))
    }
}

/// The class a block claims is only a labeling; this is what it actually is.
pub fn block_class(arcs: &[Arc]) -> Option<HeptClass> {
    classify_arcs(arcs).ok().map(|(c, _)| c)
}
