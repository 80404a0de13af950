//! Concept classes over finite truncated domains, and the example catalog.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type PointId = usize;
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("point {0} is not in the domain")]
    UnknownPoint(PointId),
    #[error("unknown catalog id `{0}`")]
    UnknownId(String),
    #[error("missing or invalid parameter `{0}`")]
    BadParam(String),
    #[error("truncation too large: {0}")]
    Resource(String),
    #[error("invalid class: {0}")]
    Invalid(String),
    #[error("rule cannot be evaluated pointwise: {0}")]
    NotPointwise(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    pub id: PointId,
    pub coords: Option<(Rational, Rational)>,
}

impl Point {
    pub fn new(id: PointId) -> Self {
        Point { id, coords: None }
    }

    pub fn planar(id: PointId, x: Rational, y: Rational) -> Self {
        Point { id, coords: Some((x, y)) }
    }
}

/// Ordered point list. Ids are strictly increasing but need not start at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    points: Vec<Point>,
}

impl Domain {
    pub fn new(points: Vec<Point>) -> Result<Self, ClassError> {
        if points.windows(2).any(|w| w[0].id >= w[1].id) {
            return Err(ClassError::Invalid("point ids must be strictly increasing".into()));
        }
        let planar = points.first().map(|p| p.coords.is_some());
        if points.iter().any(|p| Some(p.coords.is_some()) != planar) {
            return Err(ClassError::Invalid("coords must be present on all points or none".into()));
        }
        Ok(Domain { points })
    }

    pub fn from_ids(ids: impl IntoIterator<Item = PointId>) -> Result<Self, ClassError> {
        Domain::new(ids.into_iter().map(Point::new).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn ids(&self) -> impl Iterator<Item = PointId> + '_ {
        self.points.iter().map(|p| p.id)
    }

    pub fn position(&self, id: PointId) -> Result<usize, ClassError> {
        self.points
            .binary_search_by_key(&id, |p| p.id)
            .map_err(|_| ClassError::UnknownPoint(id))
    }

    pub fn id_at(&self, pos: usize) -> PointId {
        self.points[pos].id
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    ExplicitTable,
    /// 1(x >= t) on the point id.
    Threshold(i64),
    /// 1(x == t) on the point id.
    Singleton(i64),
    /// 1(w1*x + w2*y + b >= 0).
    Halfspace { w1: Rational, w2: Rational, b: Rational },
    /// Catalog block classes. `k` is the block index, `sel` a point index or
    /// subset mask inside the block, depending on the family.
    BlockIndicator { family: &'static str, k: usize, sel: u64 },
}

impl Rule {
    pub fn eval(&self, x: &Point) -> Result<bool, ClassError> {
        match self {
            Rule::Threshold(t) => Ok(x.id as i64 >= *t),
            Rule::Singleton(t) => Ok(x.id as i64 == *t),
            Rule::Halfspace { w1, w2, b } => {
                let (px, py) = x
                    .coords
                    .as_ref()
                    .ok_or(ClassError::NotPointwise("halfspace on a non-planar point"))?;
                Ok(!(w1 * px + w2 * py + b).is_negative())
            }
            Rule::ExplicitTable => Err(ClassError::NotPointwise("explicit table")),
            Rule::BlockIndicator { .. } => Err(ClassError::NotPointwise("block indicator")),
        }
    }
}

/// A classifier together with its label table over the class domain
/// (bit i = label of the i-th domain point).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub rule: Rule,
    pub table: FixedBitSet,
}

impl Hypothesis {
    pub fn from_rule(rule: Rule, domain: &Domain) -> Result<Self, ClassError> {
        let mut table = FixedBitSet::with_capacity(domain.len());
        for (i, p) in domain.points().iter().enumerate() {
            table.set(i, rule.eval(p)?);
        }
        Ok(Hypothesis { rule, table })
    }

    pub fn at(&self, pos: usize) -> bool {
        self.table.contains(pos)
    }

    pub fn predict(&self, domain: &Domain, x: PointId) -> Result<bool, ClassError> {
        Ok(self.table.contains(domain.position(x)?))
    }

    pub fn is_consistent(&self, domain: &Domain, s: &[LabeledExample]) -> Result<bool, ClassError> {
        for e in s {
            if self.predict(domain, e.point)? != e.label {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn predict(h: &Hypothesis, domain: &Domain, x: PointId) -> Result<bool, ClassError> {
    h.predict(domain, x)
}

pub fn is_consistent(h: &Hypothesis, domain: &Domain, s: &[LabeledExample]) -> Result<bool, ClassError> {
    h.is_consistent(domain, s)
}

pub(crate) mod label_int {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*v as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(serde::de::Error::custom(format!("label must be 0 or 1, got {v}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledExample {
    pub point: PointId,
    #[serde(with = "label_int")]
    pub label: bool,
}

impl LabeledExample {
    pub fn new(point: PointId, label: bool) -> Self {
        LabeledExample { point, label }
    }
}

pub type Sample = Vec<LabeledExample>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptClass {
    pub name: String,
    pub params: BTreeMap<String, i64>,
    pub domain: Domain,
    pub hypotheses: Vec<Hypothesis>,
    /// Block structure for the block catalogs, as point ids; empty otherwise.
    pub blocks: Vec<Vec<PointId>>,
    /// Minimum member size per block (ex-B5-blocks only).
    pub block_min: Vec<usize>,
    pub notes: Vec<String>,
}

impl ConceptClass {
    /// Builds a class, dropping hypotheses whose table repeats an earlier one.
    pub fn new(
        name: impl Into<String>,
        params: BTreeMap<String, i64>,
        domain: Domain,
        hyps: impl IntoIterator<Item = Hypothesis>,
    ) -> Result<Self, ClassError> {
        let mut seen = HashSet::new();
        let mut hypotheses = Vec::new();
        for h in hyps {
            if h.table.len() != domain.len() {
                return Err(ClassError::Invalid("label table length differs from domain".into()));
            }
            if seen.insert(h.table.clone()) {
                hypotheses.push(h);
            }
        }
        if hypotheses.is_empty() {
            return Err(ClassError::Invalid("class has no hypotheses".into()));
        }
        Ok(ConceptClass {
            name: name.into(),
            params,
            domain,
            hypotheses,
            blocks: Vec::new(),
            block_min: Vec::new(),
            notes: Vec::new(),
        })
    }

    /// Ad-hoc class from label rows over the given ids.
    pub fn explicit(ids: Vec<PointId>, rows: &[Vec<u8>]) -> Result<Self, ClassError> {
        let domain = Domain::from_ids(ids)?;
        let mut hyps = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != domain.len() {
                return Err(ClassError::Invalid(format!(
                    "row has {} labels, domain has {} points",
                    row.len(),
                    domain.len()
                )));
            }
            let mut table = FixedBitSet::with_capacity(domain.len());
            for (i, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => table.insert(i),
                    _ => return Err(ClassError::Invalid(format!("label {v} is not 0/1"))),
                }
            }
            hyps.push(Hypothesis { rule: Rule::ExplicitTable, table });
        }
        ConceptClass::new("explicit", BTreeMap::new(), domain, hyps)
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn predict(&self, h: usize, x: PointId) -> Result<bool, ClassError> {
        self.hypotheses[h].predict(&self.domain, x)
    }

    /// Index of the member with the given table, if any.
    pub fn find_table(&self, table: &FixedBitSet) -> Option<usize> {
        self.hypotheses.iter().position(|h| &h.table == table)
    }

    /// The sample obtained by labeling the whole domain with member `h`.
    pub fn full_labeling(&self, h: usize) -> Sample {
        self.domain
            .ids()
            .enumerate()
            .map(|(i, id)| LabeledExample::new(id, self.hypotheses[h].at(i)))
            .collect()
    }
}

/// Distinct restriction vectors of the class to `pts`.
pub fn restrictions(c: &ConceptClass, pts: &[PointId]) -> Result<BTreeSet<Vec<bool>>, ClassError> {
    let pos = pts
        .iter()
        .map(|&p| c.domain.position(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(c.hypotheses
        .iter()
        .map(|h| pos.iter().map(|&i| h.at(i)).collect())
        .collect())
}

#[derive(Clone, Copy, Debug)]
pub struct CatalogLimits {
    pub max_points: usize,
    pub max_hypotheses: usize,
}

impl Default for CatalogLimits {
    fn default() -> Self {
        CatalogLimits { max_points: 4096, max_hypotheses: 1 << 20 }
    }
}

pub const CATALOG_IDS: [&str; 12] = [
    "thresholds-N",
    "singletons-N",
    "halfspaces-circle",
    "powerset",
    "ex-B5-blocks",
    "ex-B7",
    "ex-B8",
    "ex-B9",
    "ex-B10",
    "ex-C2",
    "ex-C5",
    "ex-C6",
];

/// Parameter names accepted by each catalog id, required ones first.
pub fn catalog_params(id: &str) -> Option<(&'static [&'static str], &'static [&'static str])> {
    Some(match id {
        "thresholds-N" | "singletons-N" => (&["m"], &[]),
        "halfspaces-circle" | "powerset" => (&["n"], &[]),
        "ex-B5-blocks" => (&["i_max"], &["block_cap"]),
        "ex-B7" | "ex-B8" | "ex-B9" | "ex-B10" => (&["k_max"], &[]),
        "ex-C2" | "ex-C5" | "ex-C6" => (&["d", "k_max"], &[]),
        _ => return None,
    })
}

pub fn build_catalog_class(id: &str, params: &BTreeMap<String, i64>) -> Result<ConceptClass, ClassError> {
    build_catalog_class_with(id, params, CatalogLimits::default())
}

/// Convenience for tests and the reproduction registry.
pub fn catalog(id: &str, params: &[(&str, i64)]) -> Result<ConceptClass, ClassError> {
    let p = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_catalog_class(id, &p)
}

pub fn build_catalog_class_with(
    id: &str,
    params: &BTreeMap<String, i64>,
    limits: CatalogLimits,
) -> Result<ConceptClass, ClassError> {
    let (required, optional) = catalog_params(id).ok_or_else(|| ClassError::UnknownId(id.to_string()))?;
    let id: &'static str = CATALOG_IDS.iter().find(|&&c| c == id).expect("catalog id");
    for k in params.keys() {
        if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
            return Err(ClassError::BadParam(k.clone()));
        }
    }
    let get = |name: &str, min: i64| -> Result<usize, ClassError> {
        let v = *params.get(name).ok_or_else(|| ClassError::BadParam(name.to_string()))?;
        if v < min {
            return Err(ClassError::BadParam(format!("{name} must be >= {min}")));
        }
        Ok(v as usize)
    };
    let b = Builder { limits };
    let mut class = match id {
        "thresholds-N" => b.thresholds(get("m", 1)?),
        "singletons-N" => b.singletons(get("m", 1)?),
        "halfspaces-circle" => b.halfspaces_circle(get("n", 1)?),
        "powerset" => b.powerset(get("n", 0)?),
        "ex-B5-blocks" => {
            let cap = match params.get("block_cap") {
                Some(_) => Some(get("block_cap", 1)?),
                None => None,
            };
            b.b5_blocks(get("i_max", 1)?, cap)
        }
        "ex-B7" | "ex-B8" | "ex-B9" | "ex-B10" => {
            let k = get("k_max", 1)?;
            b.triangular_blocks(id, k)
        }
        "ex-C2" => b.c2(get("d", 1)?, get("k_max", 1)?),
        "ex-C5" | "ex-C6" => b.equal_blocks(id, get("d", 1)?, get("k_max", 1)?),
        _ => unreachable!(),
    }?;
    class.name = id.to_string();
    class.params = params.clone();
    Ok(class)
}

struct Builder {
    limits: CatalogLimits,
}

impl Builder {
    fn check(&self, points: usize, hyps: f64) -> Result<(), ClassError> {
        if points > self.limits.max_points {
            return Err(ClassError::Resource(format!(
                "{points} points exceeds cap {}",
                self.limits.max_points
            )));
        }
        if hyps > self.limits.max_hypotheses as f64 {
            return Err(ClassError::Resource(format!(
                "{hyps} hypotheses exceeds cap {}",
                self.limits.max_hypotheses
            )));
        }
        Ok(())
    }

    fn from_rules(&self, domain: Domain, rules: Vec<Rule>) -> Result<ConceptClass, ClassError> {
        let hyps = rules
            .into_iter()
            .map(|r| Hypothesis::from_rule(r, &domain))
            .collect::<Result<Vec<_>, _>>()?;
        ConceptClass::new("", BTreeMap::new(), domain, hyps)
    }

    /// Points 1..=m; thresholds t = 1..=m+1 (t = m+1 is the all-0 member).
    fn thresholds(&self, m: usize) -> Result<ConceptClass, ClassError> {
        self.check(m, m as f64 + 1.0)?;
        let domain = Domain::from_ids(1..=m)?;
        self.from_rules(domain, (1..=m as i64 + 1).map(Rule::Threshold).collect())
    }

    fn singletons(&self, m: usize) -> Result<ConceptClass, ClassError> {
        self.check(m, m as f64)?;
        let domain = Domain::from_ids(1..=m)?;
        self.from_rules(domain, (1..=m as i64).map(Rule::Singleton).collect())
    }

    fn powerset(&self, n: usize) -> Result<ConceptClass, ClassError> {
        if n > 20 {
            return Err(ClassError::Resource(format!("powerset on {n} points")));
        }
        self.check(n, (1u64 << n) as f64)?;
        let domain = Domain::from_ids(0..n)?;
        let hyps = (0..1u64 << n).map(|mask| Hypothesis {
            rule: Rule::BlockIndicator { family: "powerset", k: 0, sel: mask },
            table: mask_table(n, 0, mask),
        });
        ConceptClass::new("", BTreeMap::new(), domain, hyps)
    }

    /// n points on the unit circle at (approximately) even angles. Coordinates
    /// are exact rationals on the circle, from the tangent half-angle
    /// parametrization. Members: empty, full, tangent caps, and both sides of
    /// every chord.
    fn halfspaces_circle(&self, n: usize) -> Result<ConceptClass, ClassError> {
        if n > 256 {
            return Err(ClassError::Resource(format!("halfspaces-circle with {n} points")));
        }
        self.check(n, (n * n + 2) as f64)?;
        let pts = circle_points(n);
        let domain = Domain::new(pts.iter().cloned().enumerate().map(|(i, (x, y))| Point::planar(i, x, y)).collect())?;
        let zero = Rational::zero();
        let one = Rational::one();
        let mut rules = vec![
            Rule::Halfspace { w1: zero.clone(), w2: zero.clone(), b: -one.clone() },
            Rule::Halfspace { w1: zero.clone(), w2: zero.clone(), b: zero.clone() },
        ];
        for (x, y) in &pts {
            rules.push(Rule::Halfspace { w1: x.clone(), w2: y.clone(), b: -one.clone() });
        }
        for i in 0..n {
            for j in i + 1..n {
                let (xi, yi) = &pts[i];
                let (xj, yj) = &pts[j];
                let w1 = yj - yi;
                let w2 = xi - xj;
                let b = -(&w1 * xi + &w2 * yi);
                rules.push(Rule::Halfspace { w1: w1.clone(), w2: w2.clone(), b: b.clone() });
                rules.push(Rule::Halfspace { w1: -w1, w2: -w2, b: -b });
            }
        }
        self.from_rules(domain, rules)
    }

    /// Blocks X_i of size 2^i (or `cap` if smaller); members 1_S with S in a
    /// single block and |S| >= ceil(|X_i|/2).
    fn b5_blocks(&self, i_max: usize, cap: Option<usize>) -> Result<ConceptClass, ClassError> {
        if i_max > 20 {
            return Err(ClassError::Resource(format!("i_max={i_max}")));
        }
        let sizes: Vec<usize> = (1..=i_max).map(|i| cap.map_or(1 << i, |c| c.min(1 << i))).collect();
        if sizes.iter().any(|&s| s > 20) {
            return Err(ClassError::Resource("blocks above 20 points cannot be enumerated".into()));
        }
        let total: usize = sizes.iter().sum();
        let count: f64 = sizes.iter().map(|&s| (1u64 << s) as f64).sum();
        self.check(total, count)?;
        let domain = Domain::from_ids(0..total)?;
        let mut hyps = Vec::new();
        let mut blocks = Vec::new();
        let mut mins = Vec::new();
        let mut off = 0;
        for (bi, &s) in sizes.iter().enumerate() {
            let req = s.div_ceil(2);
            for mask in 0..1u64 << s {
                if mask.count_ones() as usize >= req {
                    hyps.push(Hypothesis {
                        rule: Rule::BlockIndicator { family: "ex-B5-blocks", k: bi + 1, sel: mask },
                        table: mask_table(total, off, mask),
                    });
                }
            }
            blocks.push((off..off + s).collect());
            mins.push(req);
            off += s;
        }
        let mut c = ConceptClass::new("", BTreeMap::new(), domain, hyps)?;
        c.blocks = blocks;
        c.block_min = mins;
        if sizes.iter().enumerate().any(|(i, &s)| s < 1 << (i + 1)) {
            c.notes.push("block sizes truncated; minimum member size scaled to ceil(|X_i|/2)".into());
        }
        Ok(c)
    }

    /// Blocks X_k of size k for k = 1..=k_max.
    fn triangular_blocks(&self, id: &'static str, k_max: usize) -> Result<ConceptClass, ClassError> {
        let total = k_max * (k_max + 1) / 2;
        let count: f64 = match id {
            "ex-B8" => (1..=k_max).map(|k| 2f64.powi(k as i32)).sum(),
            _ => total as f64,
        };
        self.check(total, count)?;
        if id == "ex-B8" && k_max > 20 {
            return Err(ClassError::Resource(format!("ex-B8 with k_max={k_max}")));
        }
        let blocks: Vec<Vec<usize>> = (1..=k_max).map(|k| (k * (k - 1) / 2..k * (k + 1) / 2).collect()).collect();
        let domain = Domain::from_ids(0..total)?;
        let mut hyps = Vec::new();
        for (bi, blk) in blocks.iter().enumerate() {
            let k = bi + 1;
            let start = blk[0];
            match id {
                // singletons
                "ex-B7" => {
                    for i in 0..k {
                        hyps.push(block_hyp(id, k, i as u64, total, |x| x == start + i));
                    }
                }
                // every subset of a block
                "ex-B8" => {
                    for mask in 0..1u64 << k {
                        hyps.push(Hypothesis {
                            rule: Rule::BlockIndicator { family: "ex-B8", k, sel: mask },
                            table: mask_table(total, start, mask),
                        });
                    }
                }
                // the point itself and all earlier blocks
                "ex-B9" => {
                    for i in 0..k {
                        hyps.push(block_hyp(id, k, i as u64, total, |x| x == start + i || x < start));
                    }
                }
                // the point itself and everything outside its block
                "ex-B10" => {
                    let end = start + k;
                    for i in 0..k {
                        hyps.push(block_hyp(id, k, i as u64, total, |x| x == start + i || x < start || x >= end));
                    }
                }
                _ => unreachable!(),
            }
        }
        let mut c = ConceptClass::new("", BTreeMap::new(), domain, hyps)?;
        c.blocks = blocks;
        Ok(c)
    }

    /// X1 = d points (ids 0..d), X2 = k_max points; members 1_{S ∪ {k}}.
    fn c2(&self, d: usize, k_max: usize) -> Result<ConceptClass, ClassError> {
        if d > 20 {
            return Err(ClassError::Resource(format!("ex-C2 with d={d}")));
        }
        let total = d + k_max;
        self.check(total, 2f64.powi(d as i32) * k_max as f64)?;
        let domain = Domain::from_ids(0..total)?;
        let mut hyps = Vec::new();
        for k in 0..k_max {
            for mask in 0..1u64 << d {
                let mut table = mask_table(total, 0, mask);
                table.insert(d + k);
                hyps.push(Hypothesis { rule: Rule::BlockIndicator { family: "ex-C2", k: k + 1, sel: mask }, table });
            }
        }
        let mut c = ConceptClass::new("", BTreeMap::new(), domain, hyps)?;
        c.blocks = vec![(0..d).collect(), (d..total).collect()];
        Ok(c)
    }

    /// Blocks X_k of size d, k = 1..=k_max.
    /// ex-C5: 1{x = x_{k,j} or x in a later block}.
    /// ex-C6: 1{x in S or x in a later block}, S any subset of X_k.
    fn equal_blocks(&self, id: &'static str, d: usize, k_max: usize) -> Result<ConceptClass, ClassError> {
        let total = d * k_max;
        if id == "ex-C6" && d > 20 {
            return Err(ClassError::Resource(format!("ex-C6 with d={d}")));
        }
        let count = if id == "ex-C6" { 2f64.powi(d as i32) * k_max as f64 } else { total as f64 };
        self.check(total, count)?;
        let domain = Domain::from_ids(0..total)?;
        let mut hyps = Vec::new();
        for k in 0..k_max {
            let start = k * d;
            let end = start + d;
            if id == "ex-C5" {
                for j in 0..d {
                    hyps.push(block_hyp(id, k + 1, j as u64, total, |x| x == start + j || x >= end));
                }
            } else {
                for mask in 0..1u64 << d {
                    let mut table = mask_table(total, start, mask);
                    table.insert_range(end..total);
                    hyps.push(Hypothesis { rule: Rule::BlockIndicator { family: "ex-C6", k: k + 1, sel: mask }, table });
                }
            }
        }
        let mut c = ConceptClass::new("", BTreeMap::new(), domain, hyps)?;
        c.blocks = (0..k_max).map(|k| (k * d..(k + 1) * d).collect()).collect();
        Ok(c)
    }
}

fn mask_table(len: usize, offset: usize, mask: u64) -> FixedBitSet {
    let mut t = FixedBitSet::with_capacity(len);
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        t.insert(offset + b);
        m &= m - 1;
    }
    t
}

fn block_hyp(family: &'static str, k: usize, sel: u64, len: usize, f: impl Fn(usize) -> bool) -> Hypothesis {
    let mut table = FixedBitSet::with_capacity(len);
    for x in 0..len {
        table.set(x, f(x));
    }
    Hypothesis { rule: Rule::BlockIndicator { family, k, sel }, table }
}

fn circle_points(n: usize) -> Vec<(Rational, Rational)> {
    const Q: i64 = 1 << 14;
    let q = BigInt::from(Q);
    (0..n)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            // fold into |phi| <= pi/2 and negate the point for the far half
            let (phi, flip) = if theta > std::f64::consts::FRAC_PI_2 && theta <= 1.5 * std::f64::consts::PI {
                (theta - std::f64::consts::PI, true)
            } else if theta > 1.5 * std::f64::consts::PI {
                (theta - 2.0 * std::f64::consts::PI, false)
            } else {
                (theta, false)
            };
            let a = BigInt::from(((phi / 2.0).tan() * Q as f64).round() as i64);
            let den = &q * &q + &a * &a;
            let x = Rational::new(&q * &q - &a * &a, den.clone());
            let y = Rational::new(BigInt::from(2) * &a * &q, den);
            if flip {
                (-x, -y)
            } else {
                (x, y)
            }
        })
        .collect()
}
