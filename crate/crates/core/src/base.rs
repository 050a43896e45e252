//! Starter sets, their development, and the registry of base designs.
//!
//! The registry holds the literature starter sets (kept verbatim in
//! [`printed_starter_sets`]) and the search-derived fixtures stored as JSON
//! under `fixtures/`. Four printed sets do not develop to decompositions as
//! printed; the registry uses the corrected versions in [`corrected_sets`].

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::catalog::{Block, HeptClass, Label};
use crate::design::{Decomposition, Pattern, PlanNode};
use crate::error::{Error, Result};
use crate::hosts::{HostSpec, Layout};
use crate::ingredients::UBlock;
use crate::verifier::{ensure, ensure_undirected};

/// Environment variable naming a directory that replaces the built-in
/// derived fixtures.
pub const FIXTURE_DIR_VAR: &str = "HEPTAD_FIXTURES";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StarterLabel {
    Point(Label),
    Inf,
}

impl fmt::Display for StarterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarterLabel::Point(x) => write!(f, "{x}"),
            StarterLabel::Inf => f.write_str("∞"),
        }
    }
}

impl Serialize for StarterLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StarterLabel::Point(x) => s.serialize_u32(*x),
            StarterLabel::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for StarterLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = StarterLabel;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative label or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<StarterLabel, E> {
                u32::try_from(v).map(StarterLabel::Point).map_err(|_| E::custom("label too large"))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<StarterLabel, E> {
                u32::try_from(v).map(StarterLabel::Point).map_err(|_| E::custom("negative label"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<StarterLabel, E> {
                if v == "inf" {
                    Ok(StarterLabel::Inf)
                } else {
                    Err(E::custom(format!("unknown label {v:?}")))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Starter {
    pub labels: [StarterLabel; 7],
    pub orbit: u32,
}

impl Starter {
    /// Full-orbit starter from printed labels, `-1` standing for ∞.
    pub fn printed(labels: [i32; 7], n: u32) -> Starter {
        Starter {
            labels: labels.map(|x| if x < 0 { StarterLabel::Inf } else { StarterLabel::Point(x as u32) }),
            orbit: n,
        }
    }
}

/// Starters over `Z_modulus`. With `rows = r > 1` the points are `r` copies
/// of `Z_modulus`, label `row·modulus + x`, and translation acts on `x` only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarterSet {
    pub modulus: u32,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub rows: u32,
    pub infinity: bool,
    pub starters: Vec<Starter>,
}

fn one() -> u32 {
    1
}

fn is_one(r: &u32) -> bool {
    *r == 1
}

impl StarterSet {
    pub fn printed(modulus: u32, infinity: bool, starters: &[[i32; 7]]) -> StarterSet {
        StarterSet {
            modulus,
            rows: 1,
            infinity,
            starters: starters.iter().map(|&s| Starter::printed(s, modulus)).collect(),
        }
    }

    pub fn block_count(&self) -> usize {
        self.starters.iter().map(|s| s.orbit as usize).sum()
    }

    /// Number of finite points.
    pub fn points(&self) -> u32 {
        self.modulus * self.rows
    }

    /// All translates `b + i`, `i ∈ [0, orbit)`, with ∞ mapped to the label
    /// after the finite points.
    pub fn develop_labels(&self) -> Result<Vec<[Label; 7]>> {
        let n = self.modulus;
        let top = self.points();
        if self.rows == 0 {
            return Err(Error::InvalidStarter("a starter set needs at least one row".into()));
        }
        let mut out = Vec::with_capacity(self.block_count());
        for s in &self.starters {
            if s.orbit == 0 || !n.is_multiple_of(s.orbit) {
                return Err(Error::InvalidStarter(format!("orbit {} does not divide {n}", s.orbit)));
            }
            for l in &s.labels {
                match l {
                    StarterLabel::Point(x) if *x >= top => {
                        return Err(Error::InvalidStarter(format!("label {x} outside the {top} finite points")));
                    }
                    StarterLabel::Inf if !self.infinity => {
                        return Err(Error::InvalidStarter("∞ used but the set has no fixed point".into()));
                    }
                    _ => {}
                }
            }
            for i in 0..s.orbit {
                out.push(s.labels.map(|l| match l {
                    StarterLabel::Point(x) => x - x % n + (x % n + i) % n,
                    StarterLabel::Inf => top,
                }));
            }
        }
        Ok(out)
    }

    /// Development into blocks of `class` on `host`; not verified here.
    pub fn develop(&self, host: &HostSpec, class: HeptClass) -> Result<Decomposition> {
        let blocks = self
            .develop_labels()?
            .into_iter()
            .map(|l| Block::new(class, l))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidStarter(e.to_string()))?;
        Ok(Decomposition::new(host.clone(), class, blocks, PlanNode::leaf("develop")))
    }

    pub fn develop_cycles(&self) -> Result<Vec<UBlock>> {
        Ok(self.develop_labels()?.into_iter().map(UBlock::Cycle7).collect())
    }

    /// Adds `c` to every finite label.
    pub fn shifted(&self, c: u32) -> StarterSet {
        let n = self.modulus;
        let mut out = self.clone();
        for s in &mut out.starters {
            for l in &mut s.labels {
                if let StarterLabel::Point(x) = l {
                    *x = *x - *x % n + (*x % n + c) % n;
                }
            }
        }
        out
    }
}

/// A stored base design.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub host: HostSpec,
    pub class: Pattern,
    pub modulus: u32,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub rows: u32,
    pub infinity: bool,
    pub starters: Vec<Starter>,
    pub provenance: String,
    pub sha256: String,
}

#[derive(Serialize)]
struct RecordBody<'a> {
    host: &'a HostSpec,
    class: Pattern,
    modulus: u32,
    #[serde(skip_serializing_if = "is_one")]
    rows: u32,
    infinity: bool,
    starters: &'a [Starter],
    provenance: &'a str,
}

impl FixtureRecord {
    /// Builds a record, refusing starter sets that do not develop to a
    /// decomposition of `host`.
    pub fn new(host: HostSpec, class: Pattern, set: StarterSet, provenance: &str) -> Result<Self> {
        let mut r = FixtureRecord {
            host,
            class,
            modulus: set.modulus,
            rows: set.rows,
            infinity: set.infinity,
            starters: set.starters,
            provenance: provenance.to_string(),
            sha256: String::new(),
        };
        r.verify()?;
        r.sha256 = r.checksum();
        Ok(r)
    }

    pub fn starter_set(&self) -> Result<StarterSet> {
        Ok(StarterSet {
            modulus: self.modulus,
            rows: self.rows,
            infinity: self.infinity,
            starters: self.starters.clone(),
        })
    }

    /// SHA-256 of the compact JSON of every field except the checksum.
    pub fn checksum(&self) -> String {
        let body = RecordBody {
            host: &self.host,
            class: self.class,
            modulus: self.modulus,
            rows: self.rows,
            infinity: self.infinity,
            starters: &self.starters,
            provenance: &self.provenance,
        };
        let bytes = serde_json::to_vec(&body).expect("record serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn verify(&self) -> Result<()> {
        let set = self.starter_set()?;
        match self.class {
            Pattern::Oriented(c) => ensure(&set.develop(&self.host, c)?),
            Pattern::Cycle => ensure_undirected(&set.develop_cycles()?, &self.host),
        }
    }

    pub fn decomposition(&self) -> Result<Decomposition> {
        let Pattern::Oriented(c) = self.class else {
            return Err(Error::Malformed(format!("{} fixture is undirected", self.host)));
        };
        let mut d = self.starter_set()?.develop(&self.host, c)?;
        d.trace = PlanNode::leaf(fixture_step(&self.host, self.class));
        Ok(d)
    }
}

pub fn render_fixture(r: &FixtureRecord) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("record serializes");
    s.push('\n');
    s
}

/// Parses a fixture and checks its checksum and development.
pub fn parse_fixture(text: &str) -> Result<FixtureRecord> {
    let r: FixtureRecord = serde_json::from_str(text)?;
    let computed = r.checksum();
    if computed != r.sha256 {
        return Err(Error::ChecksumMismatch { stored: r.sha256.clone(), computed });
    }
    r.verify()?;
    Ok(r)
}

pub fn load_fixture(path: &Path) -> Result<FixtureRecord> {
    parse_fixture(&std::fs::read_to_string(path)?)
}

/// Writes the record after re-verifying it and refreshing its checksum.
pub fn store_fixture(record: &FixtureRecord, path: &Path) -> Result<FixtureRecord> {
    record.verify()?;
    let mut r = record.clone();
    r.sha256 = r.checksum();
    std::fs::write(path, render_fixture(&r))?;
    Ok(r)
}

/// Trace step naming a base design.
pub fn fixture_step(host: &HostSpec, class: Pattern) -> String {
    format!("fixture:{host}/{class}")
}

/// The search-derived fixtures.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivedFixture {
    KStar7,
    KStar8,
    KStar14,
    KStar28,
    C7Parts3,
    C7Parts5,
}

impl DerivedFixture {
    pub const ALL: [DerivedFixture; 6] = [
        DerivedFixture::KStar7,
        DerivedFixture::KStar8,
        DerivedFixture::KStar14,
        DerivedFixture::KStar28,
        DerivedFixture::C7Parts3,
        DerivedFixture::C7Parts5,
    ];

    pub fn multipartite_c7(r: u32) -> Result<Self> {
        match r {
            3 => Ok(DerivedFixture::C7Parts3),
            5 => Ok(DerivedFixture::C7Parts5),
            _ => Err(Error::NoFixture { host: format!("K_{{{r}x7}}"), class: "C7".into() }),
        }
    }

    pub fn for_host(host: &HostSpec, pattern: Pattern) -> Option<Self> {
        DerivedFixture::ALL.into_iter().find(|f| &f.host() == host && f.pattern() == pattern)
    }

    pub fn host(self) -> HostSpec {
        match self {
            DerivedFixture::KStar7 => HostSpec::kstar(7),
            DerivedFixture::KStar8 => HostSpec::kstar(8),
            DerivedFixture::KStar14 => HostSpec::kstar(14),
            DerivedFixture::KStar28 => HostSpec::kstar(28),
            DerivedFixture::C7Parts3 => HostSpec::k_parts(3, 7, Layout::Residues),
            DerivedFixture::C7Parts5 => HostSpec::k_parts(5, 7, Layout::Residues),
        }
    }

    pub fn pattern(self) -> Pattern {
        match self {
            DerivedFixture::C7Parts3 | DerivedFixture::C7Parts5 => Pattern::Cycle,
            _ => Pattern::Oriented(HeptClass::D10),
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            DerivedFixture::KStar7 => "kstar7_d10.json",
            DerivedFixture::KStar8 => "kstar8_d10.json",
            DerivedFixture::KStar14 => "kstar14_d10.json",
            DerivedFixture::KStar28 => "kstar28_d10.json",
            DerivedFixture::C7Parts3 => "k3x7_c7.json",
            DerivedFixture::C7Parts5 => "k5x7_c7.json",
        }
    }

    fn embedded(self) -> &'static str {
        match self {
            DerivedFixture::KStar7 => include_str!("../fixtures/kstar7_d10.json"),
            DerivedFixture::KStar8 => include_str!("../fixtures/kstar8_d10.json"),
            DerivedFixture::KStar14 => include_str!("../fixtures/kstar14_d10.json"),
            DerivedFixture::KStar28 => include_str!("../fixtures/kstar28_d10.json"),
            DerivedFixture::C7Parts3 => include_str!("../fixtures/k3x7_c7.json"),
            DerivedFixture::C7Parts5 => include_str!("../fixtures/k5x7_c7.json"),
        }
    }

    /// The stored text: from the override directory when set, otherwise the
    /// copy built into the binary.
    pub fn stored_text(self) -> Result<String> {
        match fixture_dir() {
            Some(dir) => Ok(std::fs::read_to_string(dir.join(self.file_name()))?),
            None => Ok(self.embedded().to_string()),
        }
    }
}

pub fn fixture_dir() -> Option<PathBuf> {
    std::env::var_os(FIXTURE_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

static DERIVED_CACHE: OnceLock<Mutex<HashMap<DerivedFixture, FixtureRecord>>> = OnceLock::new();

pub fn derived_fixture(id: DerivedFixture) -> Result<FixtureRecord> {
    let cache = DERIVED_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("fixture cache").get(&id) {
        return Ok(r.clone());
    }
    let r = parse_fixture(&id.stored_text()?)?;
    if r.host != id.host() || r.class != id.pattern() {
        return Err(Error::Malformed(format!("{} holds {} / {}", id.file_name(), r.host, r.class)));
    }
    cache.lock().expect("fixture cache").insert(id, r.clone());
    Ok(r)
}

const INF: i32 = -1;

/// A starter set exactly as it appears in the literature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrintedSet {
    pub host: HostSpec,
    pub class: HeptClass,
    pub set: StarterSet,
}

impl PrintedSet {
    pub fn name(&self) -> String {
        format!("{}/{}", self.host, self.class)
    }
}

fn printed(host: HostSpec, class: u8, modulus: u32, infinity: bool, starters: &[[i32; 7]]) -> PrintedSet {
    PrintedSet {
        host,
        class: HeptClass::new(class).expect("class id"),
        set: StarterSet::printed(modulus, infinity, starters),
    }
}

/// Every literature starter set, verbatim, including the four that do not
/// develop to decompositions as printed.
pub fn printed_starter_sets() -> Vec<PrintedSet> {
    let k = HostSpec::kstar;
    let mut out = vec![printed(k(7), 8, 6, true, &[[0, 1, 3, 4, 2, 5, INF]])];
    let k8: [[i32; 7]; 8] = [
        [0, 2, 3, 7, 4, 6, 5],
        [0, 5, 6, 3, 1, 2, 4],
        [0, 2, 3, 7, 4, 6, 1],
        [0, 1, 3, 7, 4, 5, 2],
        [0, 1, 3, 2, 5, 7, 4],
        [0, 1, 3, 4, 7, 2, 6],
        [0, 1, 2, 4, 7, 3, 6],
        [0, 1, 3, 7, 2, 4, 5],
    ];
    for (i, s) in k8.iter().enumerate() {
        out.push(printed(k(8), i as u8 + 1, 8, false, &[*s]));
    }
    let k14: [[[i32; 7]; 2]; 8] = [
        [[0, 1, 12, 2, 11, 3, 9], [0, 3, 4, 12, 1, 8, INF]],
        [[0, 1, 12, 2, 11, 3, 9], [0, 2, 5, 6, 1, 8, INF]],
        [[0, 1, 12, 2, 11, 3, 9], [0, 5, 6, 4, 7, 1, INF]],
        [[0, 1, 12, 2, 11, 3, 5], [0, 3, 4, 10, 1, 8, INF]],
        [[0, 1, 12, 2, 11, 3, 9], [0, 2, 1, 6, 9, 3, INF]],
        [[0, 1, 12, 2, 11, 3, 9], [0, 2, 5, 6, 11, 4, INF]],
        [[0, 1, 12, 2, 11, 3, 9], [0, 5, 6, INF, 7, 1, 11]],
        [[0, 1, 12, 2, 11, 3, 4], [0, 2, 5, 11, 3, 10, INF]],
    ];
    for (i, s) in k14.iter().enumerate() {
        out.push(printed(k(14), i as u8 + 1, 13, true, s));
    }
    out.push(printed(k(15), 8, 15, false, &[[0, 1, 3, 5, 2, 14, 4], [0, 14, 10, 1, 6, 13, 7]]));
    let k28: [[[i32; 7]; 4]; 8] = [
        [[0, 1, 26, 2, 25, 3, 23], [0, 3, 25, 4, 23, 5, 26], [0, 9, 16, 6, 14, 3, 13], [0, 12, 14, 26, 10, 23, INF]],
        [[0, 1, 26, 2, 25, 3, 23], [0, 3, 19, 4, 23, 5, 26], [0, 5, 16, 6, 14, 3, 13], [0, 2, 14, 20, 6, 13, INF]],
        [[0, 1, 26, 2, 25, 3, 23], [0, 16, 19, 4, 23, 5, 26], [0, 5, 12, 6, 14, 3, 13], [0, 9, 11, 21, 6, 19, INF]],
        [[0, 1, 26, 2, 24, 3, 25], [0, 3, 23, 4, 22, 5, 20], [0, 9, 5, 16, 4, 17, 10], [0, 8, 9, 13, 26, 15, INF]],
        [[0, 1, 26, 2, 25, 3, 23], [0, 2, 14, 4, 23, 5, 26], [0, 5, 16, 26, 7, 10, 21], [0, 11, 4, 17, 3, 15, INF]],
        [[0, 1, 26, 2, 25, 3, 23], [0, 2, 5, 26, 18, 1, 11], [0, 9, 21, 26, 5, 18, 19], [0, 14, 2, 13, 22, 15, INF]],
        [[0, 1, 26, 2, 25, 3, 24], [0, 5, 26, 6, 25, 16, 15], [0, 10, 26, 11, 18, 1, 14], [0, 16, 18, 9, INF, 23, 19]],
        [[0, 1, 26, 2, 25, 3, 21], [0, 2, 5, 26, 3, 25, 18], [0, 8, 18, 7, 19, 2, 16], [0, 15, 2, 3, 23, 4, INF]],
    ];
    for (i, s) in k28.iter().enumerate() {
        out.push(printed(k(28), i as u8 + 1, 27, true, s));
    }
    out.push(printed(
        k(29),
        8,
        29,
        false,
        &[[0, 3, 21, 4, 20, 5, 28], [0, 27, 5, 26, 16, 25, 21], [0, 26, 9, 27, 8, 28, 23], [0, 22, 23, 21, 5, 20, 24]],
    ));
    out.push(printed(
        HostSpec::kstar_parts(3, 7, Layout::Residues),
        8,
        21,
        false,
        &[[0, 1, 5, 12, 4, 17, 10], [0, 2, 7, 12, 8, 18, 20]],
    ));
    out.push(printed(
        HostSpec::kstar_parts(5, 7, Layout::Residues),
        8,
        35,
        false,
        &[[0, 1, 3, 19, 2, 16, 17], [0, 3, 7, 18, 6, 8, 16], [0, 6, 13, 19, 12, 1, 14], [0, 8, 17, 20, 16, 4, 13]],
    ));
    out
}

/// Replacements for the printed sets that fail verification. Two differ from
/// the print in a single label; the other two keep all but one starter and
/// replace that one with a starter found by search.
pub fn corrected_sets() -> Vec<(PrintedSet, &'static str)> {
    let k = HostSpec::kstar;
    vec![
        (
            printed(k(14), 7, 13, true, &[[0, 1, 12, 2, 11, 3, 9], CORRECTED_K14_D7]),
            "literature, second starter replaced by search",
        ),
        (
            printed(
                k(28),
                2,
                27,
                true,
                &[
                    [0, 1, 26, 2, 25, 3, 23],
                    [0, 3, 19, 4, 23, 5, 26],
                    [0, 5, 15, 6, 14, 3, 13],
                    [0, 2, 14, 20, 6, 13, INF],
                ],
            ),
            "literature, one label corrected",
        ),
        (printed(k(28), 4, 27, true, &CORRECTED_K28_D4), "literature, one starter replaced by search"),
        (
            printed(
                k(28),
                5,
                27,
                true,
                &[
                    [0, 1, 26, 2, 25, 3, 23],
                    [0, 2, 14, 4, 23, 5, 26],
                    [0, 5, 16, 26, 7, 10, 21],
                    [2, 11, 4, 17, 3, 15, INF],
                ],
            ),
            "literature, one label corrected",
        ),
    ]
}

const CORRECTED_K14_D7: [i32; 7] = [1, 11, 4, 9, INF, 0, 12];
const CORRECTED_K28_D4: [[i32; 7]; 4] =
    [[0, 1, 26, 2, 24, 3, 25], [0, 3, 23, 4, 22, 5, 20], [0, 6, 17, 3, 7, 19, 9], [0, 8, 9, 13, 26, 15, INF]];

/// One registry entry: where a base design comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegistryEntry {
    pub host: HostSpec,
    pub class: HeptClass,
    pub provenance: String,
}

/// The directed base designs the assembly may call on.
pub fn registry() -> Vec<RegistryEntry> {
    let corrected = corrected_sets();
    let mut out: Vec<RegistryEntry> = printed_starter_sets()
        .into_iter()
        .map(|p| {
            let fixed = corrected.iter().find(|(c, _)| c.host == p.host && c.class == p.class);
            RegistryEntry {
                host: p.host,
                class: p.class,
                provenance: fixed.map_or("literature".to_string(), |(_, why)| why.to_string()),
            }
        })
        .collect();
    for id in DerivedFixture::ALL {
        if let Pattern::Oriented(class) = id.pattern() {
            out.push(RegistryEntry { host: id.host(), class, provenance: "search".into() });
        }
    }
    out
}

static BASE: OnceLock<Mutex<HashMap<(HostSpec, HeptClass), Decomposition>>> = OnceLock::new();

/// The developed, verified base design for `(host, class)`.
pub fn base_design(host: &HostSpec, class: HeptClass) -> Result<Decomposition> {
    let cache = BASE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (host.clone(), class);
    if let Some(d) = cache.lock().expect("base cache").get(&key) {
        return Ok(d.clone());
    }
    let d = build_base_design(host, class)?;
    cache.lock().expect("base cache").insert(key, d.clone());
    Ok(d)
}

fn build_base_design(host: &HostSpec, class: HeptClass) -> Result<Decomposition> {
    let pattern = Pattern::Oriented(class);
    if let Some(id) = DerivedFixture::for_host(host, pattern) {
        return derived_fixture(id)?.decomposition();
    }
    let set = corrected_sets()
        .into_iter()
        .map(|(p, _)| p)
        .chain(printed_starter_sets())
        .find(|p| &p.host == host && p.class == class)
        .ok_or_else(|| Error::NoFixture { host: host.to_string(), class: class.to_string() })?;
    let mut d = set.set.develop(host, class)?;
    d.trace = PlanNode::leaf(fixture_step(host, pattern));
    ensure(&d)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::verify;

    #[test]
    fn develop_small_example() {
        let set = StarterSet::printed(6, true, &[[0, 1, 3, 4, 2, 5, INF]]);
        let d = set.develop(&HostSpec::kstar(7), HeptClass::D8).unwrap();
        assert_eq!(d.blocks.len(), 6);
        assert_eq!(d.arc_count(), 42);
        assert!(verify(&d).ok);
        assert!(d.blocks.iter().all(|b| b.labels[6] == 6));
    }

    #[test]
    fn develop_rejects_bad_labels() {
        let set = StarterSet::printed(6, true, &[[0, 1, 3, 4, 2, 9, INF]]);
        assert!(matches!(set.develop_labels(), Err(Error::InvalidStarter(_))));
        let set = StarterSet::printed(6, false, &[[0, 1, 3, 4, 2, 5, INF]]);
        assert!(matches!(set.develop_labels(), Err(Error::InvalidStarter(_))));
        let empty = StarterSet { modulus: 5, rows: 1, infinity: false, starters: vec![] };
        assert!(empty.develop_labels().unwrap().is_empty());
    }

    #[test]
    fn registry_lookups() {
        let d = base_design(&HostSpec::kstar(8), HeptClass::D4).unwrap();
        assert_eq!(d.blocks[0].labels, [0, 1, 3, 7, 4, 5, 2]);
        assert_eq!(d.blocks.len(), 8);
        assert_eq!(base_design(&HostSpec::kstar(29), HeptClass::D8).unwrap().blocks.len(), 116);
        assert!(matches!(base_design(&HostSpec::kstar(7), HeptClass::D1), Err(Error::NoFixture { .. })));
        assert_eq!(base_design(&HostSpec::kstar(7), HeptClass::D10).unwrap().blocks.len(), 6);
    }

    #[test]
    fn corrected_sets_verify() {
        for (p, _) in corrected_sets() {
            let d = p.set.develop(&p.host, p.class).unwrap();
            assert!(verify(&d).ok, "{}", p.name());
        }
    }

    #[test]
    fn fixture_round_trip_and_tamper() {
        let p = printed_starter_sets().into_iter().find(|p| p.host.order() == 21).unwrap();
        let r = FixtureRecord::new(p.host.clone(), Pattern::Oriented(p.class), p.set.clone(), "literature").unwrap();
        assert_eq!(r.decomposition().unwrap().blocks.len(), 42);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        store_fixture(&r, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let back = load_fixture(&path).unwrap();
        assert_eq!(back, r);
        assert_eq!(render_fixture(&back), text);
        let mut bad = r.clone();
        bad.starters[0].labels[1] = StarterLabel::Point(2);
        assert!(matches!(store_fixture(&bad, &path), Err(Error::VerificationFailed(_))));
        let edited = text.replacen("\"provenance\": \"literature\"", "\"provenance\": \"other\"", 1);
        assert!(matches!(parse_fixture(&edited), Err(Error::ChecksumMismatch { .. })));
    }

    #[test]
    fn inf_serializes_as_string() {
        let s = serde_json::to_string(&Starter::printed([0, 1, 3, 4, 2, 5, INF], 6)).unwrap();
        assert_eq!(s, r#"{"labels":[0,1,3,4,2,5,"inf"],"orbit":6}"#);
        let back: Starter = serde_json::from_str(&s).unwrap();
        assert_eq!(back.labels[6], StarterLabel::Inf);
    }

    #[test]
    fn development_commutes_with_shift() {
        let p = &printed_starter_sets()[10];
        let base: std::collections::BTreeSet<_> = p.set.develop_labels().unwrap().into_iter().collect();
        let n = p.set.modulus;
        let shifted: std::collections::BTreeSet<_> = p.set.shifted(5).develop_labels().unwrap().into_iter().collect();
        let moved: std::collections::BTreeSet<_> =
            base.iter().map(|b| b.map(|x| if x == n { n } else { (x + 5) % n })).collect();
        assert_eq!(shifted, moved);
    }
}
