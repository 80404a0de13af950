//! Exact combinatorial dimensions of truncated classes and finite-horizon
//! evidence for star-eluder and VC-eluder sequences.
//!
//! All searches run on a compact form of the class (one `u128` label mask per
//! hypothesis), so domains are limited to 128 points.

use std::collections::{BTreeMap, HashMap, HashSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classcat::{ClassError, ConceptClass, PointId};

pub const MAX_SEARCH_POINTS: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimError {
    #[error("domain of {0} points exceeds the search limit of 128")]
    TooLarge(usize),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error("bad center: {0}")]
    BadCenter(String),
}

/// A labeling of the domain used as the center of star sets and sequences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    AllZero,
    AllOne,
    Hyp(usize),
    /// Explicit (point, label) pairs covering the whole domain.
    Labels(Vec<(PointId, u8)>),
}

impl Center {
    pub fn name(&self) -> String {
        match self {
            Center::AllZero => "all0".into(),
            Center::AllOne => "all1".into(),
            Center::Hyp(i) => format!("hyp:{i}"),
            Center::Labels(_) => "labels".into(),
        }
    }

    /// Parses `all0`, `all1` or `hyp:i`.
    pub fn parse(s: &str) -> Result<Center, DimError> {
        match s {
            "all0" => Ok(Center::AllZero),
            "all1" => Ok(Center::AllOne),
            _ => s
                .strip_prefix("hyp:")
                .and_then(|i| i.parse().ok())
                .map(Center::Hyp)
                .ok_or_else(|| DimError::BadCenter(s.to_string())),
        }
    }

    /// Label table over domain positions.
    pub fn resolve(&self, c: &ConceptClass) -> Result<FixedBitSet, DimError> {
        let n = c.domain.len();
        Ok(match self {
            Center::AllZero => FixedBitSet::with_capacity(n),
            Center::AllOne => {
                let mut t = FixedBitSet::with_capacity(n);
                t.insert_range(..);
                t
            }
            Center::Hyp(i) => c
                .hypotheses
                .get(*i)
                .ok_or_else(|| DimError::BadCenter(format!("no hypothesis {i}")))?
                .table
                .clone(),
            Center::Labels(v) => {
                let mut t = FixedBitSet::with_capacity(n);
                let mut covered = FixedBitSet::with_capacity(n);
                for &(id, y) in v {
                    let pos = c.domain.position(id)?;
                    if y > 1 {
                        return Err(DimError::BadCenter(format!("label {y}")));
                    }
                    t.set(pos, y == 1);
                    covered.insert(pos);
                }
                if covered.count_ones(..) != n {
                    return Err(DimError::BadCenter("labels must cover every domain point".into()));
                }
                t
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    ShatteredSet,
    StarSet,
    EluderSeq,
    SePrefix,
    VcePrefix,
}

/// Existential object behind a dimension value.
///
/// `hypotheses` holds, per kind: one member per labeling of the set (bit i of
/// the labeling index is the label of point i) for shattered sets; the
/// isolating member of each point for star sets and se-prefixes; the member
/// that errs on point k while fitting the earlier ones for eluder sequences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub points: Vec<PointId>,
    #[serde(with = "labels_int")]
    pub labels: Vec<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<usize>,
    pub hypotheses: Vec<usize>,
    /// A member consistent with the whole labeled sequence (prefix kinds).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizer: Option<usize>,
}

mod labels_int {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&b| b as u8))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        Vec::<u8>::deserialize(d)?
            .into_iter()
            .map(|v| match v {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(serde::de::Error::custom("label must be 0 or 1")),
            })
            .collect()
    }
}

impl Witness {
    fn empty(kind: WitnessKind) -> Self {
        Witness { kind, points: vec![], labels: vec![], blocks: vec![], hypotheses: vec![], realizer: None }
    }

    /// Points grouped by block (prefix kinds).
    pub fn block_points(&self) -> Vec<Vec<(PointId, bool)>> {
        let mut out = Vec::new();
        let mut i = 0;
        for &b in &self.blocks {
            out.push((i..i + b).map(|j| (self.points[j], self.labels[j])).collect());
            i += b;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimValue {
    pub value: usize,
    /// The search stopped at the cap; the true value may be larger.
    pub at_cap: bool,
    pub witness: Witness,
}

/// One `u128` label mask per hypothesis, in enumeration order.
#[derive(Clone, Debug)]
pub struct Compact {
    pub n: usize,
    pub masks: Vec<u128>,
    pub ids: Vec<PointId>,
}

impl Compact {
    pub fn new(c: &ConceptClass) -> Result<Self, DimError> {
        let n = c.domain.len();
        if n > MAX_SEARCH_POINTS {
            return Err(DimError::TooLarge(n));
        }
        let masks = c
            .hypotheses
            .iter()
            .map(|h| h.table.ones().fold(0u128, |m, i| m | 1 << i))
            .collect();
        Ok(Compact { n, masks, ids: c.domain.ids().collect() })
    }

    fn all(&self) -> Vec<usize> {
        (0..self.masks.len()).collect()
    }
}

fn table_mask(t: &FixedBitSet) -> u128 {
    t.ones().fold(0u128, |m, i| m | 1 << i)
}

fn set_key(v: &[usize], len: usize) -> FixedBitSet {
    let mut k = FixedBitSet::with_capacity(len);
    for &i in v {
        k.insert(i);
    }
    k
}

/// Index of the restriction of `mask` to positions `pts` (bit i = label of pts[i]).
fn pattern(mask: u128, pts: &[usize]) -> usize {
    pts.iter().enumerate().fold(0, |acc, (i, &p)| acc | (((mask >> p) & 1) as usize) << i)
}

fn shattered_by(members: &[usize], masks: &[u128], pts: &[usize]) -> bool {
    let need = 1usize << pts.len();
    let mut seen = vec![false; need];
    let mut count = 0;
    for &h in members {
        let p = pattern(masks[h], pts);
        if !seen[p] {
            seen[p] = true;
            count += 1;
            if count == need {
                return true;
            }
        }
    }
    count == need
}

// ---------------------------------------------------------------- VC

pub fn vc_dim(c: &ConceptClass, cap: usize) -> Result<DimValue, DimError> {
    let k = Compact::new(c)?;
    let cap = cap.min(k.n);
    let all = k.all();
    // level-wise: every shattered (d+1)-set extends its shattered d-prefix
    let mut level: Vec<Vec<usize>> = vec![vec![]];
    let mut best: Vec<usize> = vec![];
    let mut d = 0;
    while d < cap {
        let mut next = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |&x| x + 1);
            for y in start..k.n {
                let mut t = s.clone();
                t.push(y);
                if shattered_by(&all, &k.masks, &t) {
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        best = next[0].clone();
        level = next;
        d += 1;
    }
    let at_cap = d == cap && level.iter().any(|s| {
        let start = s.last().map_or(0, |&x| x + 1);
        (start..k.n).any(|y| {
            let mut t = s.clone();
            t.push(y);
            shattered_by(&all, &k.masks, &t)
        })
    });
    let mut reps = vec![usize::MAX; 1 << best.len()];
    for (h, &m) in k.masks.iter().enumerate() {
        let p = pattern(m, &best);
        if reps[p] == usize::MAX {
            reps[p] = h;
        }
    }
    Ok(DimValue {
        value: d,
        at_cap,
        witness: Witness {
            kind: WitnessKind::ShatteredSet,
            points: best.iter().map(|&p| k.ids[p]).collect(),
            labels: vec![],
            blocks: vec![],
            hypotheses: reps,
            realizer: None,
        },
    })
}

// ---------------------------------------------------------------- star

/// Largest star set, centered at `center` if given, otherwise over all
/// centers (searched as labelings of the candidate set only).
pub fn star_max(c: &ConceptClass, center: Option<&Center>, cap: usize) -> Result<DimValue, DimError> {
    let k = Compact::new(c)?;
    let cap = cap.min(k.n);
    match center {
        Some(ctr) => {
            let cm = table_mask(&ctr.resolve(c)?);
            let (pts, at_cap) = star_centered_search(&k, &k.all(), cm, cap);
            Ok(DimValue { value: pts.len(), at_cap, witness: star_witness(&k, &k.all(), cm, &pts) })
        }
        None => {
            let (pts, cm, at_cap) = star_global_search(&k, cap);
            Ok(DimValue { value: pts.len(), at_cap, witness: star_witness(&k, &k.all(), cm, &pts) })
        }
    }
}

fn star_witness(k: &Compact, members: &[usize], cm: u128, pts: &[usize]) -> Witness {
    let smask = pts.iter().fold(0u128, |m, &p| m | 1 << p);
    let hyps = pts
        .iter()
        .map(|&x| {
            *members
                .iter()
                .find(|&&h| (k.masks[h] ^ cm) & smask == 1 << x)
                .expect("star witness member")
        })
        .collect();
    Witness {
        kind: WitnessKind::StarSet,
        points: pts.iter().map(|&p| k.ids[p]).collect(),
        labels: pts.iter().map(|&p| (cm >> p) & 1 == 1).collect(),
        blocks: vec![],
        hypotheses: hyps,
        realizer: None,
    }
}

/// DFS over star sets centered at `cm` among `members`, in lexicographic
/// order of positions. Returns the first maximum and whether the cap cut the
/// search short.
fn star_centered_search(k: &Compact, members: &[usize], cm: u128, cap: usize) -> (Vec<usize>, bool) {
    let mut ds: Vec<u128> = members.iter().map(|&h| k.masks[h] ^ cm).filter(|&d| d != 0).collect();
    ds.sort_unstable();
    ds.dedup();
    let cand: Vec<usize> = (0..k.n).filter(|&x| ds.iter().any(|d| d >> x & 1 == 1)).collect();
    let mut best = Vec::new();
    let mut cur = Vec::new();
    let mut at_cap = false;
    star_dfs(&ds, &cand, 0, &mut cur, 0, cap, &mut best, &mut at_cap);
    (best, at_cap)
}

#[allow(clippy::too_many_arguments)]
fn star_dfs(
    ds: &[u128],
    cand: &[usize],
    from: usize,
    cur: &mut Vec<usize>,
    smask: u128,
    cap: usize,
    best: &mut Vec<usize>,
    at_cap: &mut bool,
) {
    if cur.len() > best.len() {
        *best = cur.clone();
    }
    if cur.len() == cap {
        if (from..cand.len()).any(|i| is_star(ds, smask | 1 << cand[i], cur, cand[i])) {
            *at_cap = true;
        }
        return;
    }
    for i in from..cand.len() {
        if cur.len() + (cand.len() - i) <= best.len() || *at_cap {
            return;
        }
        let y = cand[i];
        let m = smask | 1 << y;
        if is_star(ds, m, cur, y) {
            cur.push(y);
            star_dfs(ds, cand, i + 1, cur, m, cap, best, at_cap);
            cur.pop();
        }
    }
}

/// Whether cur ∪ {y} (mask `m`) is a star set given disagreement masks `ds`.
fn is_star(ds: &[u128], m: u128, cur: &[usize], y: usize) -> bool {
    cur.iter().chain(std::iter::once(&y)).all(|&x| ds.iter().any(|&d| d & m == 1 << x))
}

/// Joint search over point sets and center labelings of those sets.
fn star_global_search(k: &Compact, cap: usize) -> (Vec<usize>, u128, bool) {
    let mut best: (Vec<usize>, u128) = (vec![], 0);
    let mut at_cap = false;
    // restriction patterns of the whole class on the current set
    let mut cur = Vec::new();
    global_dfs(k, 0, &mut cur, &[0], cap, &mut best, &mut at_cap);
    (best.0, best.1, at_cap)
}

/// `centers` are the valid center patterns on `cur` (bit i = label of cur[i]).
fn global_dfs(
    k: &Compact,
    from: usize,
    cur: &mut Vec<usize>,
    centers: &[usize],
    cap: usize,
    best: &mut (Vec<usize>, u128),
    at_cap: &mut bool,
) {
    if cur.len() > best.0.len() {
        let c = centers[0];
        let cm = cur.iter().enumerate().fold(0u128, |m, (i, &p)| m | (((c >> i) & 1) as u128) << p);
        *best = (cur.clone(), cm);
    }
    for y in from..k.n {
        if *at_cap || cur.len() + (k.n - y) <= best.0.len() {
            return;
        }
        cur.push(y);
        let pats: HashSet<usize> = k.masks.iter().map(|&m| pattern(m, cur)).collect();
        let top = cur.len() - 1;
        let mut next = Vec::new();
        for &c in centers {
            for b in 0..2usize {
                let c2 = c | b << top;
                if (0..cur.len()).all(|i| pats.contains(&(c2 ^ (1 << i)))) {
                    next.push(c2);
                }
            }
        }
        if !next.is_empty() {
            if cur.len() == cap {
                if cur.len() > best.0.len() {
                    let c = next[0];
                    let cm = cur.iter().enumerate().fold(0u128, |m, (i, &p)| m | (((c >> i) & 1) as u128) << p);
                    *best = (cur.clone(), cm);
                }
                if star_extends(k, cur, &next) {
                    *at_cap = true;
                }
            } else {
                global_dfs(k, y + 1, cur, &next, cap, best, at_cap);
            }
        }
        cur.pop();
    }
}

fn star_extends(k: &Compact, cur: &[usize], centers: &[usize]) -> bool {
    let from = cur.last().map_or(0, |&x| x + 1);
    (from..k.n).any(|y| {
        let mut t = cur.to_vec();
        t.push(y);
        let pats: HashSet<usize> = k.masks.iter().map(|&m| pattern(m, &t)).collect();
        centers.iter().any(|&c| {
            (0..2usize).any(|b| {
                let c2 = c | b << cur.len();
                (0..t.len()).all(|i| pats.contains(&(c2 ^ (1 << i))))
            })
        })
    })
}

// ---------------------------------------------------------------- eluder / Littlestone

struct Memo {
    map: HashMap<FixedBitSet, (usize, bool)>,
}

/// Longest realizable sequence in which each point is mislabeled by some
/// member consistent with the earlier points.
pub fn eluder_dim(c: &ConceptClass, cap: usize) -> Result<DimValue, DimError> {
    let k = Compact::new(c)?;
    let mut memo = Memo { map: HashMap::new() };
    let all = k.all();
    let value = eluder_rec(&k, &all, cap, &mut memo);
    let at_cap = value == cap && eluder_rec(&k, &all, cap + 1, &mut memo) > cap;
    // walk the first optimal path
    let mut w = Witness::empty(WitnessKind::EluderSeq);
    let mut v = all;
    let mut left = value;
    while left > 0 {
        let mut stepped = false;
        'pts: for x in 0..k.n {
            for y in [false, true] {
                let (agree, other): (Vec<usize>, Vec<usize>) =
                    v.iter().partition(|&&h| ((k.masks[h] >> x) & 1 == 1) == y);
                if agree.is_empty() || other.is_empty() {
                    continue;
                }
                if 1 + eluder_rec(&k, &agree, left - 1, &mut memo) >= left {
                    w.points.push(k.ids[x]);
                    w.labels.push(y);
                    w.hypotheses.push(other[0]);
                    v = agree;
                    left -= 1;
                    stepped = true;
                    break 'pts;
                }
            }
        }
        assert!(stepped, "eluder path reconstruction");
    }
    w.realizer = v.first().copied();
    Ok(DimValue { value, at_cap, witness: w })
}

/// min(eluder length from version space `v`, limit).
fn eluder_rec(k: &Compact, v: &[usize], limit: usize, memo: &mut Memo) -> usize {
    if limit == 0 || v.len() < 2 {
        return 0;
    }
    let key = set_key(v, k.masks.len());
    if let Some(&(val, exact)) = memo.map.get(&key) {
        if exact || val >= limit {
            return val.min(limit);
        }
    }
    let mut best = 0;
    'outer: for x in 0..k.n {
        let (ones, zeros): (Vec<usize>, Vec<usize>) = v.iter().partition(|&&h| (k.masks[h] >> x) & 1 == 1);
        if ones.is_empty() || zeros.is_empty() {
            continue;
        }
        for part in [&zeros, &ones] {
            let r = 1 + eluder_rec(k, part, limit - 1, memo);
            if r > best {
                best = r;
                if best >= limit {
                    break 'outer;
                }
            }
        }
    }
    memo.map.insert(key, (best, best < limit));
    best
}

pub fn littlestone_dim(c: &ConceptClass, cap: usize) -> Result<DimValue, DimError> {
    let k = Compact::new(c)?;
    let mut memo = Memo { map: HashMap::new() };
    let all = k.all();
    let value = ls_rec(&k, &all, cap, &mut memo);
    let at_cap = value == cap && ls_rec(&k, &all, cap + 1, &mut memo) > cap;
    Ok(DimValue { value, at_cap, witness: Witness::empty(WitnessKind::EluderSeq) })
}

fn ls_rec(k: &Compact, v: &[usize], limit: usize, memo: &mut Memo) -> usize {
    if limit == 0 || v.len() < 2 {
        return 0;
    }
    let key = set_key(v, k.masks.len());
    if let Some(&(val, exact)) = memo.map.get(&key) {
        if exact || val >= limit {
            return val.min(limit);
        }
    }
    let mut best = 0;
    for x in 0..k.n {
        let (ones, zeros): (Vec<usize>, Vec<usize>) = v.iter().partition(|&&h| (k.masks[h] >> x) & 1 == 1);
        if ones.is_empty() || zeros.is_empty() {
            continue;
        }
        let a = ls_rec(k, &zeros, limit - 1, memo);
        if a < best {
            continue;
        }
        let b = ls_rec(k, &ones, limit - 1, memo);
        best = best.max(1 + a.min(b));
        if best >= limit {
            break;
        }
    }
    memo.map.insert(key, (best, best < limit));
    best
}

// ---------------------------------------------------------------- prefixes

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockSchedule {
    /// Block k has size k.
    Strong,
    /// Every block has size d.
    Constant(usize),
    /// Explicit block sizes.
    Sizes(Vec<usize>),
}

impl BlockSchedule {
    pub fn size(&self, j: usize) -> usize {
        match self {
            BlockSchedule::Strong => j + 1,
            BlockSchedule::Constant(d) => *d,
            BlockSchedule::Sizes(v) => v[j],
        }
    }

    pub fn name(&self) -> String {
        match self {
            BlockSchedule::Strong => "strong".into(),
            BlockSchedule::Constant(d) => format!("d={d}"),
            BlockSchedule::Sizes(v) => format!("sizes={v:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Complete blocks tried per search node.
    pub branching_cap: usize,
    /// Total block-extension steps.
    pub node_cap: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { branching_cap: 64, node_cap: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    /// The requested number of blocks was reached.
    Complete,
    /// Exhaustive search proved no deeper prefix exists.
    Refuted,
    /// A cap cut the search short before either outcome.
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixResult {
    pub depth: usize,
    pub requested: usize,
    pub status: SearchStatus,
    pub nodes: u64,
    pub witness: Witness,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BlockKind {
    Star,
    Shattered,
}

pub fn se_prefix(
    c: &ConceptClass,
    center: &Center,
    blocks: &BlockSchedule,
    k_blocks: usize,
    budget: SearchBudget,
) -> Result<PrefixResult, DimError> {
    prefix_search(c, center, blocks, k_blocks, budget, BlockKind::Star)
}

pub fn vce_prefix(
    c: &ConceptClass,
    center: &Center,
    blocks: &BlockSchedule,
    k_blocks: usize,
    budget: SearchBudget,
) -> Result<PrefixResult, DimError> {
    prefix_search(c, center, blocks, k_blocks, budget, BlockKind::Shattered)
}

struct PrefixSearch<'a> {
    k: &'a Compact,
    cm: u128,
    sched: &'a BlockSchedule,
    target: usize,
    kind: BlockKind,
    budget: SearchBudget,
    nodes: u64,
    truncated: bool,
    failed: HashSet<(FixedBitSet, usize)>,
    path: Vec<(Vec<usize>, Vec<usize>)>,
    best: Vec<(Vec<usize>, Vec<usize>)>,
    best_v: Vec<usize>,
}

fn prefix_search(
    c: &ConceptClass,
    center: &Center,
    sched: &BlockSchedule,
    k_blocks: usize,
    budget: SearchBudget,
    kind: BlockKind,
) -> Result<PrefixResult, DimError> {
    let k = Compact::new(c)?;
    let cm = table_mask(&center.resolve(c)?);
    if let BlockSchedule::Sizes(v) = sched {
        if v.len() < k_blocks {
            return Err(DimError::BadCenter(format!("{} block sizes for {k_blocks} blocks", v.len())));
        }
    }
    let mut s = PrefixSearch {
        k: &k,
        cm,
        sched,
        target: k_blocks,
        kind,
        budget,
        nodes: 0,
        truncated: false,
        failed: HashSet::new(),
        path: vec![],
        best: vec![],
        best_v: vec![],
    };
    let all = k.all();
    s.best_v = all.clone();
    s.dfs(&all);
    let depth = s.best.len();
    let status = if depth == k_blocks {
        SearchStatus::Complete
    } else if s.truncated {
        SearchStatus::BudgetExhausted
    } else {
        SearchStatus::Refuted
    };
    let mut w = Witness::empty(match kind {
        BlockKind::Star => WitnessKind::SePrefix,
        BlockKind::Shattered => WitnessKind::VcePrefix,
    });
    for (blk, iso) in &s.best {
        w.blocks.push(blk.len());
        for &p in blk {
            w.points.push(k.ids[p]);
            w.labels.push((cm >> p) & 1 == 1);
        }
        w.hypotheses.extend(iso);
    }
    w.realizer = s.best_v.first().copied();
    Ok(PrefixResult { depth, requested: k_blocks, status, nodes: s.nodes, witness: w })
}

impl PrefixSearch<'_> {
    /// Returns true once the target depth is reached.
    fn dfs(&mut self, v: &[usize]) -> bool {
        let j = self.path.len();
        if j > self.best.len() {
            self.best = self.path.clone();
            self.best_v = v.to_vec();
        }
        if j == self.target {
            return true;
        }
        let key = (set_key(v, self.k.masks.len()), j);
        if self.failed.contains(&key) {
            return false;
        }
        let size = self.sched.size(j);
        let cm = self.cm;
        let masks = &self.k.masks;
        let cand: Vec<usize> = (0..self.k.n)
            .filter(|&x| match self.kind {
                BlockKind::Star => v.iter().any(|&h| (masks[h] ^ cm) >> x & 1 == 1),
                BlockKind::Shattered => {
                    let first = (masks[v[0]] >> x) & 1;
                    v.iter().any(|&h| (masks[h] >> x) & 1 != first)
                }
            })
            .collect();
        let before = self.truncated;
        self.truncated = false;
        let mut tried = 0usize;
        let mut block = Vec::with_capacity(size);
        let found = self.blocks(v, &cand, 0, size, &mut block, &mut tried);
        let cut = self.truncated;
        self.truncated |= before;
        if !found && !cut {
            self.failed.insert(key);
        }
        found
    }

    fn blocks(
        &mut self,
        v: &[usize],
        cand: &[usize],
        from: usize,
        size: usize,
        block: &mut Vec<usize>,
        tried: &mut usize,
    ) -> bool {
        if block.len() == size {
            *tried += 1;
            let bmask = block.iter().fold(0u128, |m, &p| m | 1 << p);
            let next: Vec<usize> =
                v.iter().copied().filter(|&h| (self.k.masks[h] ^ self.cm) & bmask == 0).collect();
            if next.is_empty() {
                return false;
            }
            let iso = match self.kind {
                BlockKind::Star => block
                    .iter()
                    .map(|&x| {
                        *v.iter()
                            .find(|&&h| (self.k.masks[h] ^ self.cm) & bmask == 1 << x)
                            .expect("isolating member")
                    })
                    .collect(),
                BlockKind::Shattered => vec![],
            };
            self.path.push((block.clone(), iso));
            let ok = self.dfs(&next);
            self.path.pop();
            return ok;
        }
        if cand.len() - from < size - block.len() {
            return false;
        }
        for i in from..cand.len() {
            if *tried >= self.budget.branching_cap || self.nodes >= self.budget.node_cap {
                self.truncated = true;
                return false;
            }
            self.nodes += 1;
            let y = cand[i];
            block.push(y);
            if self.block_ok(v, block) && self.blocks(v, cand, i + 1, size, block, tried) {
                block.pop();
                return true;
            }
            block.pop();
        }
        false
    }

    fn block_ok(&self, v: &[usize], block: &[usize]) -> bool {
        match self.kind {
            BlockKind::Star => {
                let m = block.iter().fold(0u128, |m, &p| m | 1 << p);
                block
                    .iter()
                    .all(|&x| v.iter().any(|&h| (self.k.masks[h] ^ self.cm) & m == 1 << x))
            }
            BlockKind::Shattered => shattered_by(v, &self.k.masks, block),
        }
    }
}

// ---------------------------------------------------------------- verification

/// Re-checks a witness against the raw definitions using the class's label
/// tables directly.
pub fn verify_witness(c: &ConceptClass, w: &Witness) -> Result<(), String> {
    let pos = w
        .points
        .iter()
        .map(|&p| c.domain.position(p).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let distinct: HashSet<_> = pos.iter().collect();
    if distinct.len() != pos.len() {
        return Err("repeated point".into());
    }
    let hyp = |i: usize| c.hypotheses.get(i).ok_or_else(|| format!("no hypothesis {i}"));
    match w.kind {
        WitnessKind::ShatteredSet => {
            if w.hypotheses.len() != 1 << pos.len() {
                return Err("need one member per labeling".into());
            }
            for (lab, &h) in w.hypotheses.iter().enumerate() {
                let h = hyp(h)?;
                for (i, &p) in pos.iter().enumerate() {
                    if h.at(p) != ((lab >> i) & 1 == 1) {
                        return Err(format!("member for labeling {lab} mislabels point {i}"));
                    }
                }
            }
        }
        WitnessKind::StarSet => {
            check_star(c, &pos, &w.labels, &w.hypotheses, &(0..c.len()).collect::<Vec<_>>())?;
        }
        WitnessKind::EluderSeq => {
            if w.labels.len() != pos.len() || w.hypotheses.len() != pos.len() {
                return Err("length mismatch".into());
            }
            for (k, &h) in w.hypotheses.iter().enumerate() {
                let h = hyp(h)?;
                if (0..k).any(|i| h.at(pos[i]) != w.labels[i]) || h.at(pos[k]) == w.labels[k] {
                    return Err(format!("member {k} does not elude at step {k}"));
                }
            }
            check_realizer(c, &pos, &w.labels, w.realizer)?;
        }
        WitnessKind::SePrefix | WitnessKind::VcePrefix => {
            if w.blocks.iter().sum::<usize>() != pos.len() || w.labels.len() != pos.len() {
                return Err("block sizes do not cover the points".into());
            }
            let mut off = 0;
            for &b in &w.blocks {
                let members: Vec<usize> = (0..c.len())
                    .filter(|&h| (0..off).all(|i| c.hypotheses[h].at(pos[i]) == w.labels[i]))
                    .collect();
                let bp = &pos[off..off + b];
                let bl = &w.labels[off..off + b];
                if w.kind == WitnessKind::SePrefix {
                    let hs = w.hypotheses.get(off..off + b).ok_or("missing isolating members")?;
                    check_star(c, bp, bl, hs, &members)?;
                } else {
                    let pats: HashSet<Vec<bool>> =
                        members.iter().map(|&h| bp.iter().map(|&p| c.hypotheses[h].at(p)).collect()).collect();
                    if pats.len() != 1 << b {
                        return Err(format!("block at offset {off} not shattered"));
                    }
                }
                off += b;
            }
            check_realizer(c, &pos, &w.labels, w.realizer)?;
        }
    }
    Ok(())
}

fn check_star(c: &ConceptClass, pos: &[usize], labels: &[bool], hs: &[usize], members: &[usize]) -> Result<(), String> {
    if labels.len() != pos.len() || hs.len() != pos.len() {
        return Err("length mismatch".into());
    }
    for (i, &h) in hs.iter().enumerate() {
        if !members.contains(&h) {
            return Err(format!("isolating member {h} not in the version space"));
        }
        let t = &c.hypotheses[h];
        for (j, &p) in pos.iter().enumerate() {
            if (t.at(p) != labels[j]) != (i == j) {
                return Err(format!("member {h} does not isolate point {i}"));
            }
        }
    }
    Ok(())
}

fn check_realizer(c: &ConceptClass, pos: &[usize], labels: &[bool], r: Option<usize>) -> Result<(), String> {
    let r = r.ok_or("missing realizer")?;
    let h = c.hypotheses.get(r).ok_or("bad realizer")?;
    if pos.iter().zip(labels).any(|(&p, &y)| h.at(p) != y) {
        return Err("realizer inconsistent with the sequence".into());
    }
    Ok(())
}

// ---------------------------------------------------------------- report

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportOptions {
    pub cap: usize,
    pub centers: Vec<Center>,
    pub se_blocks: usize,
    pub vce_blocks: usize,
    /// Block sizes for the d-variants, in addition to the strong variant.
    pub d_variants: Vec<usize>,
    pub budget: SearchBudget,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            cap: 8,
            centers: vec![Center::AllZero, Center::AllOne],
            se_blocks: 4,
            vce_blocks: 4,
            d_variants: vec![],
            budget: SearchBudget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixEvidence {
    pub center: String,
    pub variant: String,
    pub requested: usize,
    pub depth: usize,
    pub status: SearchStatus,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub params: BTreeMap<String, i64>,
    pub domain_size: usize,
    pub hypotheses: usize,
    pub cap: usize,
    pub se_blocks: usize,
    pub vce_blocks: usize,
    pub budget: SearchBudget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub class: String,
    pub vc: usize,
    pub star_global: usize,
    pub star_centered: BTreeMap<String, usize>,
    pub eluder: usize,
    pub littlestone: usize,
    /// Dimensions whose search stopped at the cap.
    pub at_cap: Vec<String>,
    pub se_evidence: Vec<PrefixEvidence>,
    pub vce_evidence: Vec<PrefixEvidence>,
    pub horizon_params: Horizon,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl DimensionReport {
    pub fn budget_exhausted(&self) -> bool {
        self.se_evidence
            .iter()
            .chain(&self.vce_evidence)
            .any(|e| e.status == SearchStatus::BudgetExhausted)
    }

    fn max_depth(ev: &[PrefixEvidence], variant: &str) -> usize {
        ev.iter().filter(|e| e.variant == variant).map(|e| e.depth).max().unwrap_or(0)
    }

    pub fn se_depth(&self) -> usize {
        Self::max_depth(&self.se_evidence, "strong")
    }

    pub fn vce_depth(&self) -> usize {
        Self::max_depth(&self.vce_evidence, "strong")
    }
}

pub fn compute_report(c: &ConceptClass, opts: &ReportOptions) -> Result<DimensionReport, DimError> {
    let vc = vc_dim(c, opts.cap)?;
    let sg = star_max(c, None, opts.cap)?;
    let el = eluder_dim(c, opts.cap)?;
    let ls = littlestone_dim(c, opts.cap)?;
    let mut at_cap = Vec::new();
    for (name, d) in [("vc", &vc), ("star_global", &sg), ("eluder", &el), ("littlestone", &ls)] {
        if d.at_cap {
            at_cap.push(name.to_string());
        }
    }
    let mut witnesses = vec![vc.witness, sg.witness, el.witness];
    let mut star_centered = BTreeMap::new();
    let mut se_evidence = Vec::new();
    let mut vce_evidence = Vec::new();
    let mut variants = vec![BlockSchedule::Strong];
    variants.extend(opts.d_variants.iter().map(|&d| BlockSchedule::Constant(d)));
    for ctr in &opts.centers {
        let s = star_max(c, Some(ctr), opts.cap)?;
        if s.at_cap {
            at_cap.push(format!("star_centered[{}]", ctr.name()));
        }
        star_centered.insert(ctr.name(), s.value);
        witnesses.push(s.witness);
        for v in &variants {
            for (kind, k_blocks, out) in [
                (BlockKind::Star, opts.se_blocks, &mut se_evidence),
                (BlockKind::Shattered, opts.vce_blocks, &mut vce_evidence),
            ] {
                let r = prefix_search(c, ctr, v, k_blocks, opts.budget, kind)?;
                out.push(PrefixEvidence {
                    center: ctr.name(),
                    variant: v.name(),
                    requested: k_blocks,
                    depth: r.depth,
                    status: r.status,
                    nodes: r.nodes,
                });
                if r.depth > 0 {
                    witnesses.push(r.witness);
                }
            }
        }
    }
    Ok(DimensionReport {
        class: c.name.clone(),
        vc: vc.value,
        star_global: sg.value,
        star_centered,
        eluder: el.value,
        littlestone: ls.value,
        at_cap,
        se_evidence,
        vce_evidence,
        horizon_params: Horizon {
            params: c.params.clone(),
            domain_size: c.domain.len(),
            hypotheses: c.len(),
            cap: opts.cap,
            se_blocks: opts.se_blocks,
            vce_blocks: opts.vce_blocks,
            budget: opts.budget,
        },
        witnesses,
        notes: c.notes.clone(),
    })
}

// ---------------------------------------------------------------- classification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateCategory {
    Exponential,
    Linear,
    LogLinear,
    ArbitrarilySlow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub category: RateCategory,
    pub label: String,
    pub notes: Vec<String>,
}

/// Rate category suggested by reports at one or more truncation sizes
/// (ordered by increasing truncation).
///
/// With several reports a quantity "grows" when its value at the largest
/// truncation exceeds its value at the smallest. With a single report it
/// "grows" when its search reached the requested horizon.
pub fn classify_rate(reports: &[DimensionReport]) -> Classification {
    let mut notes = Vec::new();
    let (first, last) = match (reports.first(), reports.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            return Classification {
                category: RateCategory::Exponential,
                label: "evidence at horizon".into(),
                notes: vec!["no reports".into()],
            }
        }
    };
    let trend = reports.len() > 1;
    let grows = |f: &dyn Fn(&DimensionReport) -> usize, at_horizon: &dyn Fn(&DimensionReport) -> bool| {
        if trend {
            f(last) > f(first)
        } else {
            at_horizon(last)
        }
    };
    let sizes: Vec<usize> = reports.iter().map(|r| r.horizon_params.hypotheses).collect();
    notes.push(format!("class sizes across truncations: {sizes:?}"));
    let vc_grows = grows(&|r| r.vc, &|r| r.at_cap.iter().any(|s| s == "vc"));
    let vce_grows = grows(&|r| r.vce_depth(), &|r| r.vce_depth() >= r.horizon_params.vce_blocks.max(3));
    let se_grows = grows(&|r| r.se_depth(), &|r| r.se_depth() >= r.horizon_params.se_blocks.max(2));
    let el_grows = grows(&|r| r.eluder, &|r| r.at_cap.iter().any(|s| s == "eluder"));
    notes.push(format!(
        "vc {} -> {}, strong vce depth {} -> {}, strong se depth {} -> {}, eluder {} -> {}",
        first.vc,
        last.vc,
        first.vce_depth(),
        last.vce_depth(),
        first.se_depth(),
        last.se_depth(),
        first.eluder,
        last.eluder
    ));
    let category = if vc_grows || vce_grows {
        notes.push("VC dimension or VC-eluder depth keeps growing".into());
        RateCategory::ArbitrarilySlow
    } else if se_grows {
        notes.push("star-eluder depth keeps growing with VC dimension stable".into());
        RateCategory::LogLinear
    } else if el_grows {
        notes.push("eluder sequences keep growing while star-eluder depth stalls".into());
        RateCategory::Linear
    } else {
        notes.push("no quantity grows; treated as a finite class".into());
        RateCategory::Exponential
    };
    Classification { category, label: "evidence at horizon".into(), notes }
}
