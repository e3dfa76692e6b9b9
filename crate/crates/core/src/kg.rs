//! Knowledge-graph domain types and ingestion of the tab-separated dataset
//! layout (`ent_ids_{1,2}`, `triples_{1,2}`, `ref_ent_ids`, optional
//! `sup_ent_ids`).
//!
//! Entity and relation indices are local to one graph and dense. The loader
//! keeps the mapping back to file IDs so that results can be written in the
//! dataset's own ID space.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub head: usize,
    pub rel: usize,
    pub tail: usize,
}

impl Triple {
    pub fn new(head: usize, rel: usize, tail: usize) -> Self {
        Self { head, rel, tail }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeGraph {
    pub entity_count: usize,
    pub relation_count: usize,
    pub triples: Vec<Triple>,
    pub entity_names: Option<Vec<String>>,
    pub relation_names: Option<Vec<String>>,
}

impl KnowledgeGraph {
    /// Builds a graph and checks that every triple index is in range.
    pub fn new(entity_count: usize, relation_count: usize, triples: Vec<Triple>) -> Result<Self> {
        let kg = Self {
            entity_count,
            relation_count,
            triples,
            entity_names: None,
            relation_names: None,
        };
        kg.validate()?;
        Ok(kg)
    }

    pub fn with_entity_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.entity_count {
            return Err(Error::DimensionMismatch(format!(
                "{} entity names for {} entities",
                names.len(),
                self.entity_count
            )));
        }
        self.entity_names = Some(names);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.triples {
            for idx in [t.head, t.tail] {
                if idx >= self.entity_count {
                    return Err(Error::EntityOutOfRange {
                        index: idx,
                        count: self.entity_count,
                    });
                }
            }
            if t.rel >= self.relation_count {
                return Err(Error::DimensionMismatch(format!(
                    "relation index {} out of range for {} relations",
                    t.rel, self.relation_count
                )));
            }
        }
        Ok(())
    }

    /// Distinct triples in ascending (head, rel, tail) order.
    pub fn distinct_triples(&self) -> Vec<Triple> {
        let mut out = self.triples.clone();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn entity_name(&self, index: usize) -> Option<&str> {
        self.entity_names
            .as_ref()
            .and_then(|n| n.get(index))
            .map(String::as_str)
    }
}

/// Returns a copy of `kg` where every triple `(h, r, t)` is accompanied by
/// `(t, r + relation_count, h)`. Calling it twice doubles again.
pub fn add_reverse_triples(kg: &KnowledgeGraph) -> KnowledgeGraph {
    let offset = kg.relation_count;
    let mut triples = Vec::with_capacity(kg.triples.len() * 2);
    triples.extend_from_slice(&kg.triples);
    triples.extend(
        kg.triples
            .iter()
            .map(|t| Triple::new(t.tail, t.rel + offset, t.head)),
    );
    let relation_names = kg.relation_names.as_ref().map(|names| {
        names
            .iter()
            .cloned()
            .chain(names.iter().map(|n| format!("{n}^-1")))
            .collect()
    });
    KnowledgeGraph {
        entity_count: kg.entity_count,
        relation_count: offset * 2,
        triples,
        entity_names: kg.entity_names.clone(),
        relation_names,
    }
}

/// Two graphs plus the known (seed) and held-out (test) entity pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct KgPair {
    pub source: KnowledgeGraph,
    pub target: KnowledgeGraph,
    pub seed_pairs: Vec<(usize, usize)>,
    pub test_pairs: Vec<(usize, usize)>,
}

impl KgPair {
    pub fn new(
        source: KnowledgeGraph,
        target: KnowledgeGraph,
        seed_pairs: Vec<(usize, usize)>,
        test_pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let pair = Self {
            source,
            target,
            seed_pairs,
            test_pairs,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.target.validate()?;
        let check = |pairs: &[(usize, usize)]| -> Result<()> {
            for &(s, t) in pairs {
                if s >= self.source.entity_count {
                    return Err(Error::EntityOutOfRange {
                        index: s,
                        count: self.source.entity_count,
                    });
                }
                if t >= self.target.entity_count {
                    return Err(Error::EntityOutOfRange {
                        index: t,
                        count: self.target.entity_count,
                    });
                }
            }
            Ok(())
        };
        check(&self.seed_pairs)?;
        check(&self.test_pairs)?;

        let mut src_seen = HashSet::new();
        let mut tgt_seen = HashSet::new();
        for &(s, t) in &self.seed_pairs {
            if !src_seen.insert(s) || !tgt_seen.insert(t) {
                return Err(Error::InvalidConfig(format!(
                    "seed pair ({s}, {t}) reuses an already aligned entity"
                )));
            }
        }
        let seeds: HashSet<_> = self.seed_pairs.iter().collect();
        if let Some(p) = self.test_pairs.iter().find(|p| seeds.contains(p)) {
            return Err(Error::InvalidConfig(format!(
                "pair {p:?} is both a seed and a test pair"
            )));
        }
        Ok(())
    }
}

impl KgPair {
    /// Re-splits all known pairs (seeds then tests, in order) the same way
    /// [`load_dataset`] splits `ref_ent_ids` with [`SplitSpec::Ratio`].
    pub fn resplit(&self, ratio: f64, seed: u64) -> Result<KgPair> {
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split ratio must lie in (0, 1], got {ratio}"
            )));
        }
        let mut all: Vec<_> = self.seed_pairs.iter().chain(&self.test_pairs).copied().collect();
        seeded_shuffle(&mut all, seed);
        let tests = all.split_off(seed_count(ratio, all.len()));
        KgPair::new(self.source.clone(), self.target.clone(), all, tests)
    }
}

/// How the training pairs are chosen at load time.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitSpec {
    /// Explicit training-pair file; test pairs are the remaining reference pairs.
    TrainFile(PathBuf),
    /// Seeded shuffle of the reference pairs; the first `⌈ratio·n⌉` become seeds.
    Ratio { ratio: f64, seed: u64 },
}

/// Whether the two `ent_ids` files share one ID space or number independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdConvention {
    Global,
    PerKg,
}

/// Dense index <-> file ID mapping for one namespace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdMap {
    ids: Vec<u64>,
    lookup: HashMap<u64, usize>,
}

impl IdMap {
    pub fn from_ids(ids: Vec<u64>) -> Self {
        let lookup = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        Self { ids, lookup }
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.lookup.get(&id).copied()
    }

    pub fn id_of(&self, index: usize) -> u64 {
        self.ids[index]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn insert(&mut self, id: u64) -> usize {
        if let Some(&i) = self.lookup.get(&id) {
            return i;
        }
        self.ids.push(id);
        self.lookup.insert(id, self.ids.len() - 1);
        self.ids.len() - 1
    }
}

/// A loaded dataset: the pair itself plus everything needed to write results
/// back in file-ID space.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub pair: KgPair,
    pub source_entities: IdMap,
    pub target_entities: IdMap,
    pub source_relations: IdMap,
    pub target_relations: IdMap,
    pub convention: IdConvention,
    /// First 8 bytes of SHA-256 over the sorted lines of every input file.
    pub fingerprint: u64,
}

pub const ENT_IDS_1: &str = "ent_ids_1";
pub const ENT_IDS_2: &str = "ent_ids_2";
pub const TRIPLES_1: &str = "triples_1";
pub const TRIPLES_2: &str = "triples_2";
pub const REF_ENT_IDS: &str = "ref_ent_ids";
pub const SUP_ENT_IDS: &str = "sup_ent_ids";

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect())
}

fn parse_id(path: &Path, line_no: usize, field: &str) -> Result<u64> {
    field
        .trim()
        .parse::<u64>()
        .map_err(|_| Error::malformed(path, line_no, format!("not an integer id: {field:?}")))
}

fn parse_ent_ids(path: &Path, lines: &[String]) -> Result<(IdMap, Vec<String>)> {
    let mut map = IdMap::default();
    let mut names = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (id, name) = line
            .split_once('\t')
            .ok_or_else(|| Error::malformed(path, i + 1, "expected `<id> TAB <name>`"))?;
        let id = parse_id(path, i + 1, id)?;
        if map.index_of(id).is_some() {
            return Err(Error::malformed(path, i + 1, format!("duplicate entity id {id}")));
        }
        map.insert(id);
        names.push(name.to_string());
    }
    Ok((map, names))
}

fn parse_fields<const N: usize>(path: &Path, line_no: usize, line: &str) -> Result<[u64; N]> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != N {
        return Err(Error::malformed(
            path,
            line_no,
            format!("expected {N} tab-separated fields, found {}", fields.len()),
        ));
    }
    let mut out = [0u64; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = parse_id(path, line_no, f)?;
    }
    Ok(out)
}

fn parse_triples(path: &Path, lines: &[String], entities: &IdMap) -> Result<(Vec<Triple>, IdMap)> {
    let mut raw = Vec::new();
    let mut rel_ids = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let [h, r, t] = parse_fields::<3>(path, i + 1, line)?;
        let lookup = |id| {
            entities.index_of(id).ok_or(Error::UnknownEntity {
                path: path.to_path_buf(),
                line: i + 1,
                id,
            })
        };
        raw.push((lookup(h)?, r, lookup(t)?));
        rel_ids.push(r);
    }
    rel_ids.sort_unstable();
    rel_ids.dedup();
    let relations = IdMap::from_ids(rel_ids);
    let triples = raw
        .into_iter()
        .map(|(h, r, t)| Triple::new(h, relations.index_of(r).unwrap(), t))
        .collect();
    Ok((triples, relations))
}

fn parse_pairs(path: &Path, lines: &[String], src: &IdMap, tgt: &IdMap) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let [s, t] = parse_fields::<2>(path, i + 1, line)?;
        let unknown = |id| Error::UnknownEntity {
            path: path.to_path_buf(),
            line: i + 1,
            id,
        };
        let s = src.index_of(s).ok_or_else(|| unknown(s))?;
        let t = tgt.index_of(t).ok_or_else(|| unknown(t))?;
        out.push((s, t));
    }
    Ok(out)
}

fn fingerprint(files: &[(&str, &[String])]) -> u64 {
    let mut hasher = Sha256::new();
    for (name, lines) in files {
        let mut sorted: Vec<&String> = lines.iter().filter(|l| !l.is_empty()).collect();
        sorted.sort();
        hasher.update(name.as_bytes());
        hasher.update([0u8]);
        for l in sorted {
            hasher.update(l.as_bytes());
            hasher.update(b"\n");
        }
    }
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().unwrap())
}

/// Portable seeded Fisher-Yates shuffle; draws are 64-bit on every platform.
pub(crate) fn seeded_shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i as u64) as usize;
        items.swap(i, j);
    }
}

/// Number of seed pairs taken from `n` reference pairs at `ratio`.
pub fn seed_count(ratio: f64, n: usize) -> usize {
    // The epsilon absorbs representation error such as 0.3 * 15000.
    ((ratio * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

/// Loads a dataset directory and splits its reference pairs.
pub fn load_dataset(dir: impl AsRef<Path>, split: &SplitSpec) -> Result<Dataset> {
    let dir = dir.as_ref();
    if let SplitSpec::Ratio { ratio, .. } = split {
        if !(*ratio > 0.0 && *ratio <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split ratio must lie in (0, 1], got {ratio}"
            )));
        }
    }

    let path = |name: &str| dir.join(name);
    let ent1_lines = read_lines(&path(ENT_IDS_1))?;
    let ent2_lines = read_lines(&path(ENT_IDS_2))?;
    let tri1_lines = read_lines(&path(TRIPLES_1))?;
    let tri2_lines = read_lines(&path(TRIPLES_2))?;
    let ref_lines = read_lines(&path(REF_ENT_IDS))?;

    let (source_entities, src_names) = parse_ent_ids(&path(ENT_IDS_1), &ent1_lines)?;
    let (target_entities, tgt_names) = parse_ent_ids(&path(ENT_IDS_2), &ent2_lines)?;
    let overlap = source_entities
        .ids
        .iter()
        .any(|id| target_entities.index_of(*id).is_some());
    let convention = if overlap {
        IdConvention::PerKg
    } else {
        IdConvention::Global
    };

    let (src_triples, source_relations) =
        parse_triples(&path(TRIPLES_1), &tri1_lines, &source_entities)?;
    let (tgt_triples, target_relations) =
        parse_triples(&path(TRIPLES_2), &tri2_lines, &target_entities)?;
    let mut reference = parse_pairs(&path(REF_ENT_IDS), &ref_lines, &source_entities, &target_entities)?;
    {
        let mut seen = HashSet::new();
        reference.retain(|p| seen.insert(*p));
    }

    let (seed_pairs, test_pairs) = match split {
        SplitSpec::TrainFile(train) => {
            let lines = read_lines(train)?;
            let seeds = parse_pairs(train, &lines, &source_entities, &target_entities)?;
            let seed_set: HashSet<_> = seeds.iter().copied().collect();
            let tests = reference
                .iter()
                .copied()
                .filter(|p| !seed_set.contains(p))
                .collect();
            (seeds, tests)
        }
        SplitSpec::Ratio { ratio, seed } => {
            let mut shuffled = reference.clone();
            seeded_shuffle(&mut shuffled, *seed);
            let n_seed = seed_count(*ratio, shuffled.len());
            let tests = shuffled.split_off(n_seed);
            (shuffled, tests)
        }
    };

    let mut files: Vec<(&str, &[String])> = vec![
        (ENT_IDS_1, &ent1_lines),
        (ENT_IDS_2, &ent2_lines),
        (TRIPLES_1, &tri1_lines),
        (TRIPLES_2, &tri2_lines),
        (REF_ENT_IDS, &ref_lines),
    ];
    let train_lines;
    if let SplitSpec::TrainFile(train) = split {
        train_lines = read_lines(train)?;
        files.push((SUP_ENT_IDS, &train_lines));
    }
    let fingerprint = fingerprint(&files);

    let source = KnowledgeGraph::new(source_entities.len(), source_relations.len(), src_triples)?
        .with_entity_names(src_names)?;
    let target = KnowledgeGraph::new(target_entities.len(), target_relations.len(), tgt_triples)?
        .with_entity_names(tgt_names)?;
    let pair = KgPair::new(source, target, seed_pairs, test_pairs)?;

    Ok(Dataset {
        pair,
        source_entities,
        target_entities,
        source_relations,
        target_relations,
        convention,
        fingerprint,
    })
}

impl Dataset {
    /// Writes the dataset back in the file layout it was loaded from.
    /// `ref_ent_ids` holds seed and test pairs; `sup_ent_ids` the seeds,
    /// and is only written when there are any.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, body: String| -> Result<()> {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(p, e))
        };
        let ent_lines = |kg: &KnowledgeGraph, ids: &IdMap| {
            let mut s = String::new();
            for i in 0..kg.entity_count {
                s.push_str(&format!("{}\t{}\n", ids.id_of(i), kg.entity_name(i).unwrap_or("")));
            }
            s
        };
        let triple_lines = |kg: &KnowledgeGraph, ents: &IdMap, rels: &IdMap| {
            let mut s = String::new();
            for t in &kg.triples {
                s.push_str(&format!(
                    "{}\t{}\t{}\n",
                    ents.id_of(t.head),
                    rels.id_of(t.rel),
                    ents.id_of(t.tail)
                ));
            }
            s
        };
        let pair_lines = |pairs: &[(usize, usize)]| {
            let mut s = String::new();
            for &(a, b) in pairs {
                s.push_str(&format!(
                    "{}\t{}\n",
                    self.source_entities.id_of(a),
                    self.target_entities.id_of(b)
                ));
            }
            s
        };
        let p = &self.pair;
        write(ENT_IDS_1, ent_lines(&p.source, &self.source_entities))?;
        write(ENT_IDS_2, ent_lines(&p.target, &self.target_entities))?;
        write(TRIPLES_1, triple_lines(&p.source, &self.source_entities, &self.source_relations))?;
        write(TRIPLES_2, triple_lines(&p.target, &self.target_entities, &self.target_relations))?;
        let all: Vec<_> = p.seed_pairs.iter().chain(&p.test_pairs).copied().collect();
        write(REF_ENT_IDS, pair_lines(&all))?;
        if !p.seed_pairs.is_empty() {
            write(SUP_ENT_IDS, pair_lines(&p.seed_pairs))?;
        }
        Ok(())
    }

    /// Wraps an in-memory pair with identity ID maps (IDs = indices,
    /// target IDs offset by the source entity count).
    pub fn from_pair(pair: KgPair) -> Self {
        let n_src = pair.source.entity_count as u64;
        let source_entities = IdMap::from_ids((0..n_src).collect());
        let target_entities =
            IdMap::from_ids((0..pair.target.entity_count as u64).map(|i| i + n_src).collect());
        let source_relations = IdMap::from_ids((0..pair.source.relation_count as u64).collect());
        let target_relations = IdMap::from_ids((0..pair.target.relation_count as u64).collect());
        Self {
            pair,
            source_entities,
            target_entities,
            source_relations,
            target_relations,
            convention: IdConvention::Global,
            fingerprint: 0,
        }
    }
}
