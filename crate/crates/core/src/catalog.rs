//! The ten oriented heptagons.
//!
//! An orientation of a 7-cycle `v0 v1 … v6` is recorded as a 7-bit word:
//! bit `j` is set iff the arc on cycle edge `{v_j, v_{j+1 mod 7}}` points
//! forward, from `v_j` to `v_{j+1}`. Two orientations are isomorphic iff
//! their words lie in the same orbit of the dihedral group of order 14,
//! where a rotation shifts the word cyclically and a reflection reverses the
//! bit order and complements every bit (walking the cycle backwards turns
//! every forward arc into a backward one).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Vertex label. Hosts use `0..N`.
pub type Label = u32;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub tail: Label,
    pub head: Label,
}

impl Arc {
    pub fn new(tail: Label, head: Label) -> Self {
        Arc { tail, head }
    }

    pub fn reversed(self) -> Self {
        Arc { tail: self.head, head: self.tail }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tail, self.head)
    }
}

// Arc lists by position, read off the drawing of each orientation.
const ARC_TABLE: [[(u8, u8); 7]; 10] = [
    [(1, 0), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0)],
    [(1, 0), (2, 1), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0)],
    [(1, 0), (1, 2), (3, 2), (3, 4), (4, 5), (5, 6), (6, 0)],
    [(1, 0), (1, 2), (2, 3), (4, 3), (4, 5), (5, 6), (6, 0)],
    [(1, 0), (2, 1), (3, 2), (3, 4), (4, 5), (5, 6), (6, 0)],
    [(1, 0), (2, 1), (2, 3), (3, 4), (5, 4), (5, 6), (6, 0)],
    [(1, 0), (1, 2), (3, 2), (3, 4), (4, 5), (6, 5), (6, 0)],
    [(1, 0), (2, 1), (2, 3), (4, 3), (4, 5), (5, 6), (6, 0)],
    [(1, 0), (2, 1), (2, 3), (3, 4), (4, 5), (6, 5), (6, 0)],
    [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0)],
];

const fn word_of_table(arcs: &[(u8, u8); 7]) -> u8 {
    let mut w = 0u8;
    let mut i = 0;
    while i < 7 {
        let (t, h) = arcs[i];
        if (t + 1) % 7 == h {
            w |= 1 << t;
        }
        i += 1;
    }
    w
}

const CLASS_WORDS: [u8; 10] = {
    let mut out = [0u8; 10];
    let mut i = 0;
    while i < 10 {
        out[i] = word_of_table(&ARC_TABLE[i]);
        i += 1;
    }
    out
};

/// A 7-bit orientation word; bit `j` is the direction of cycle edge `j`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientationWord(u8);

impl OrientationWord {
    pub const ALL_FORWARD: OrientationWord = OrientationWord(0x7f);

    pub fn new(bits: u8) -> Result<Self> {
        if bits & 0x80 != 0 {
            return Err(Error::Malformed(format!("orientation word {bits:#x} has more than 7 bits")));
        }
        Ok(OrientationWord(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_forward(self, edge: usize) -> bool {
        self.0 >> edge & 1 == 1
    }

    pub fn forward_count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn complement(self) -> Self {
        OrientationWord(!self.0 & 0x7f)
    }

    /// Shift so that edge `r` becomes edge 0.
    pub fn rotate(self, r: usize) -> Self {
        let r = r % 7;
        OrientationWord(((self.0 >> r) | (self.0 << (7 - r))) & 0x7f)
    }

    /// Walk the cycle the other way: edge `j` becomes edge `6 - j` and flips.
    pub fn reflect(self) -> Self {
        let mut out = 0u8;
        for j in 0..7 {
            if !self.is_forward(j) {
                out |= 1 << (6 - j);
            }
        }
        OrientationWord(out)
    }

    // Key whose integer order is the lexicographic order of the 7-char string b0..b6.
    fn lex_key(self) -> u8 {
        (0..7).fold(0u8, |acc, j| (acc << 1) | (self.0 >> j & 1))
    }

    pub fn dihedral_images(self) -> impl Iterator<Item = OrientationWord> {
        let refl = self.reflect();
        (0..7).map(move |r| self.rotate(r)).chain((0..7).map(move |r| refl.rotate(r)))
    }

    /// Lexicographically least dihedral image.
    pub fn canonical(self) -> Self {
        self.dihedral_images().min_by_key(|w| w.lex_key()).expect("14 images")
    }

    pub fn all() -> impl Iterator<Item = OrientationWord> {
        (0u8..128).map(OrientationWord)
    }
}

impl fmt::Display for OrientationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..7 {
            f.write_str(if self.is_forward(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for OrientationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrientationWord({self})")
    }
}

impl FromStr for OrientationWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() != 7 {
            return Err(Error::Malformed(format!("orientation word {s:?} must have 7 characters")));
        }
        let mut bits = 0u8;
        for (j, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << j,
                '0' => {}
                _ => return Err(Error::Malformed(format!("orientation word {s:?} must be 0/1"))),
            }
        }
        Ok(OrientationWord(bits))
    }
}

/// Canonical form of a word under the dihedral action.
pub fn canonical_word(w: OrientationWord) -> OrientationWord {
    w.canonical()
}

/// Isomorphism class of an oriented heptagon, numbered 1..=10.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeptClass(u8);

impl HeptClass {
    pub const D1: HeptClass = HeptClass(1);
    pub const D2: HeptClass = HeptClass(2);
    pub const D3: HeptClass = HeptClass(3);
    pub const D4: HeptClass = HeptClass(4);
    pub const D5: HeptClass = HeptClass(5);
    pub const D6: HeptClass = HeptClass(6);
    pub const D7: HeptClass = HeptClass(7);
    pub const D8: HeptClass = HeptClass(8);
    pub const D9: HeptClass = HeptClass(9);
    pub const D10: HeptClass = HeptClass(10);

    pub fn new(id: u8) -> Result<Self> {
        if (1..=10).contains(&id) {
            Ok(HeptClass(id))
        } else {
            Err(Error::UnknownClass(id.to_string()))
        }
    }

    pub fn all() -> impl Iterator<Item = HeptClass> {
        (1u8..=10).map(HeptClass)
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn word(self) -> OrientationWord {
        OrientationWord(CLASS_WORDS[self.0 as usize - 1])
    }

    /// Position pairs `(tail, head)` of the seven arcs.
    pub fn arc_pattern(self) -> &'static [(u8, u8); 7] {
        &ARC_TABLE[self.0 as usize - 1]
    }

    pub fn canonical_word(self) -> OrientationWord {
        self.word().canonical()
    }

    pub fn from_word(w: OrientationWord) -> HeptClass {
        let c = w.canonical();
        HeptClass::all()
            .find(|k| k.canonical_word() == c)
            .expect("every orientation word belongs to one of the ten classes")
    }

    pub fn is_self_reverse(self) -> bool {
        reverse_class(self) == self
    }
}

/// The class of the digraph obtained by reversing every arc.
pub fn reverse_class(c: HeptClass) -> HeptClass {
    HeptClass::from_word(c.word().complement())
}

impl fmt::Display for HeptClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.0)
    }
}

impl fmt::Debug for HeptClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.0)
    }
}

impl FromStr for HeptClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits =
            s.strip_prefix('D').or_else(|| s.strip_prefix('d')).ok_or_else(|| Error::UnknownClass(s.to_string()))?;
        let id: u8 = digits.parse().map_err(|_| Error::UnknownClass(s.to_string()))?;
        HeptClass::new(id).map_err(|_| Error::UnknownClass(s.to_string()))
    }
}

impl Serialize for HeptClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HeptClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A labeled copy `D_i[v0, …, v6]`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub class: HeptClass,
    pub labels: [Label; 7],
}

impl Block {
    pub fn new(class: HeptClass, labels: [Label; 7]) -> Result<Self> {
        let b = Block { class, labels };
        b.check_labels()?;
        Ok(b)
    }

    pub fn check_labels(&self) -> Result<()> {
        for i in 0..7 {
            for j in i + 1..7 {
                if self.labels[i] == self.labels[j] {
                    return Err(Error::InvalidBlock(format!(
                        "{}{:?} repeats label {}",
                        self.class, self.labels, self.labels[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Arcs without the distinct-label check; callers that accept untrusted
    /// blocks use [`arcs_of_block`].
    pub fn arcs(&self) -> [Arc; 7] {
        let l = &self.labels;
        self.class.arc_pattern().map(|(t, h)| Arc::new(l[t as usize], l[h as usize]))
    }

    pub fn map_labels(&self, f: impl Fn(Label) -> Label) -> Block {
        Block { class: self.class, labels: self.labels.map(f) }
    }
}

pub fn arcs_of_block(b: &Block) -> Result<[Arc; 7]> {
    b.check_labels()?;
    Ok(b.arcs())
}

/// Identify the oriented heptagon formed by `arcs`, returning its class and a
/// labeling under which the class's arc pattern reproduces `arcs` exactly.
pub fn classify_arcs(arcs: &[Arc]) -> Result<(HeptClass, Block)> {
    if arcs.len() != 7 {
        return Err(Error::NotAHeptagon(format!("{} arcs, expected 7", arcs.len())));
    }
    let mut adjacency: BTreeMap<Label, Vec<Label>> = BTreeMap::new();
    let mut pairs = BTreeSet::new();
    for a in arcs {
        if a.tail == a.head {
            return Err(Error::NotAHeptagon(format!("loop at {}", a.tail)));
        }
        let key = (a.tail.min(a.head), a.tail.max(a.head));
        if !pairs.insert(key) {
            return Err(Error::NotAHeptagon(format!("pair {{{},{}}} used twice", key.0, key.1)));
        }
        adjacency.entry(a.tail).or_default().push(a.head);
        adjacency.entry(a.head).or_default().push(a.tail);
    }
    if adjacency.len() != 7 || adjacency.values().any(|n| n.len() != 2) {
        return Err(Error::NotAHeptagon("underlying graph is not 2-regular on 7 vertices".into()));
    }
    // Walk the cycle from the smallest label.
    let start = *adjacency.keys().next().expect("7 vertices");
    let mut seq = vec![start];
    let mut prev = start;
    let mut cur = adjacency[&start][0];
    while cur != start {
        seq.push(cur);
        let n = &adjacency[&cur];
        let next = if n[0] != prev { n[0] } else { n[1] };
        prev = cur;
        cur = next;
        if seq.len() > 7 {
            break;
        }
    }
    if seq.len() != 7 {
        return Err(Error::NotAHeptagon("underlying graph is not a single 7-cycle".into()));
    }
    let forward: BTreeSet<(Label, Label)> = arcs.iter().map(|a| (a.tail, a.head)).collect();
    let word_of = |s: &[Label; 7]| {
        let mut bits = 0u8;
        for j in 0..7 {
            if forward.contains(&(s[j], s[(j + 1) % 7])) {
                bits |= 1 << j;
            }
        }
        OrientationWord(bits)
    };
    let base: [Label; 7] = seq.try_into().expect("length checked");
    let class = HeptClass::from_word(word_of(&base));
    let target = class.word();
    for dir in [false, true] {
        for r in 0..7 {
            let labels: [Label; 7] = std::array::from_fn(|j| {
                let k = if dir { (7 + r - j) % 7 } else { (r + j) % 7 };
                base[k]
            });
            if word_of(&labels) == target {
                return Ok((class, Block { class, labels }));
            }
        }
    }
    unreachable!("a word and its canonical class representative share a dihedral orbit")
}

/// Canonical forms of all 128 words, each with the class it names.
pub fn canonical_classes() -> BTreeMap<OrientationWord, HeptClass> {
    OrientationWord::all().map(|w| (w.canonical(), HeptClass::from_word(w))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_words_match_arc_lists() {
        let expected = [
            "0111111", "0011111", "0101111", "0110111", "0001111", "0011011", "0101101", "0010111", "0011101",
            "1111111",
        ];
        for (c, w) in HeptClass::all().zip(expected) {
            assert_eq!(c.word().to_string(), w, "{c}");
        }
    }

    #[test]
    fn each_label_has_total_degree_two() {
        for c in HeptClass::all() {
            let mut deg = [0; 7];
            for &(t, h) in c.arc_pattern() {
                deg[t as usize] += 1;
                deg[h as usize] += 1;
            }
            assert_eq!(deg, [2; 7], "{c}");
        }
    }

    #[test]
    fn arcs_of_d3_and_d10() {
        let b = Block::new(HeptClass::D3, [10, 11, 12, 13, 14, 15, 16]).unwrap();
        let got: BTreeSet<_> = b.arcs().into_iter().collect();
        let want: BTreeSet<_> = [(11, 10), (11, 12), (13, 12), (13, 14), (14, 15), (15, 16), (16, 10)]
            .into_iter()
            .map(|(t, h)| Arc::new(t, h))
            .collect();
        assert_eq!(got, want);

        let b = Block::new(HeptClass::D10, [0, 1, 2, 3, 4, 5, 6]).unwrap();
        let got: Vec<_> = b.arcs().iter().map(|a| (a.tail, a.head)).collect();
        assert_eq!(got, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0)]);
    }

    #[test]
    fn repeated_label_is_invalid() {
        let err = Block::new(HeptClass::D1, [0, 0, 1, 2, 3, 4, 5]).unwrap_err();
        assert!(matches!(err, Error::InvalidBlock(_)));
        let raw = Block { class: HeptClass::D1, labels: [0, 0, 1, 2, 3, 4, 5] };
        assert!(arcs_of_block(&raw).is_err());
    }

    #[test]
    fn all_forward_canonicalizes_to_zero() {
        assert_eq!(canonical_word("1111111".parse().unwrap()).to_string(), "0000000");
    }

    #[test]
    fn exactly_ten_canonical_forms() {
        let forms: BTreeSet<_> = OrientationWord::all().map(canonical_word).collect();
        assert_eq!(forms.len(), 10);
        let class_forms: BTreeSet<_> = HeptClass::all().map(|c| c.canonical_word()).collect();
        assert_eq!(forms, class_forms);
    }

    #[test]
    fn canonical_is_idempotent() {
        for w in OrientationWord::all() {
            assert_eq!(canonical_word(canonical_word(w)), canonical_word(w));
        }
    }

    #[test]
    fn reverse_pairs() {
        assert_eq!(reverse_class(HeptClass::D8), HeptClass::D9);
        assert_eq!(reverse_class(HeptClass::D9), HeptClass::D8);
        for i in 1..=7 {
            let c = HeptClass::new(i).unwrap();
            assert_eq!(reverse_class(c), c);
        }
        assert_eq!(reverse_class(HeptClass::D10), HeptClass::D10);
        for c in HeptClass::all() {
            assert_eq!(reverse_class(reverse_class(c)), c);
        }
    }

    #[test]
    fn complement_orbit_pairs_by_forward_count() {
        // A word and its complement have k and 7 - k forward arcs; the class
        // meets both counts exactly when it is reverse-fixed or paired.
        for c in HeptClass::all() {
            let counts: BTreeSet<u32> =
                OrientationWord::all().filter(|w| HeptClass::from_word(*w) == c).map(|w| w.forward_count()).collect();
            let mirrored: BTreeSet<u32> = OrientationWord::all()
                .filter(|w| HeptClass::from_word(*w) == reverse_class(c))
                .map(|w| 7 - w.forward_count())
                .collect();
            assert_eq!(counts, mirrored, "{c}");
        }
    }

    #[test]
    fn classify_round_trip() {
        let b = Block::new(HeptClass::D4, [3, 1, 4, 0, 5, 2, 6]).unwrap();
        let (c, w) = classify_arcs(&b.arcs()).unwrap();
        assert_eq!(c, HeptClass::D4);
        let a: BTreeSet<_> = w.arcs().into_iter().collect();
        let e: BTreeSet<_> = b.arcs().into_iter().collect();
        assert_eq!(a, e);
    }

    #[test]
    fn disconnected_is_rejected() {
        let arcs = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 3)].map(|(t, h)| Arc::new(t, h));
        assert!(matches!(classify_arcs(&arcs), Err(Error::NotAHeptagon(_))));
        let doubled = [(0, 1), (1, 0), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)].map(|(t, h)| Arc::new(t, h));
        assert!(classify_arcs(&doubled).is_err());
        assert!(classify_arcs(&doubled[..6]).is_err());
    }

    #[test]
    fn flipping_one_arc_of_d8_never_stays_d8_with_same_labeling() {
        let b = Block::new(HeptClass::D8, [0, 1, 2, 3, 4, 5, 6]).unwrap();
        for k in 0..7 {
            let mut arcs = b.arcs();
            arcs[k] = arcs[k].reversed();
            // Any class may come back, but never this labeling.
            let (c, w) = classify_arcs(&arcs).unwrap();
            assert_ne!(w, b);
            let got: BTreeSet<_> = w.arcs().into_iter().collect();
            assert_eq!(got, arcs.iter().copied().collect(), "witness must reproduce the arcs ({c})");
        }
    }

    #[test]
    fn parse_and_display() {
        for c in HeptClass::all() {
            assert_eq!(c.to_string().parse::<HeptClass>().unwrap(), c);
        }
        assert!("D11".parse::<HeptClass>().is_err());
        assert!("X1".parse::<HeptClass>().is_err());
        assert!("011".parse::<OrientationWord>().is_err());
    }
}
