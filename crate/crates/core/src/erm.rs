//! Version spaces, ERM selection rules, true error, and compression sets.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classcat::{ClassError, ConceptClass, Domain, Hypothesis, LabeledExample, PointId, Rule};
use crate::distros::RealizableDistribution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ErmError {
    #[error("empty version space")]
    EmptyVersionSpace,
    #[error("rule `{0}` does not apply: {1}")]
    Inapplicable(String, String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error(transparent)]
    Class(#[from] ClassError),
}

#[derive(Clone, Debug)]
pub struct VersionSpace<'a> {
    pub base: &'a ConceptClass,
    pub constraints: Vec<LabeledExample>,
    /// Indices into `base.hypotheses`, in enumeration order.
    pub members: Vec<usize>,
}

impl VersionSpace<'_> {
    pub fn realizable(&self) -> bool {
        !self.members.is_empty()
    }
}

pub fn version_space<'a>(c: &'a ConceptClass, s: &[LabeledExample]) -> Result<VersionSpace<'a>, ClassError> {
    let pos = s
        .iter()
        .map(|e| Ok((c.domain.position(e.point)?, e.label)))
        .collect::<Result<Vec<_>, ClassError>>()?;
    let members = (0..c.len())
        .filter(|&h| pos.iter().all(|&(p, y)| c.hypotheses[h].at(p) == y))
        .collect();
    Ok(VersionSpace { base: c, constraints: s.to_vec(), members })
}

pub fn true_error(h: &Hypothesis, domain: &Domain, p: &RealizableDistribution) -> Result<f64, ClassError> {
    let mut e = 0.0;
    for a in &p.support {
        if h.predict(domain, a.point)? != a.label {
            e += a.p;
        }
    }
    Ok(e)
}

/// Exact error when the distribution carries exact masses.
pub fn true_error_exact(h: &Hypothesis, domain: &Domain, p: &RealizableDistribution) -> Result<Option<BigRational>, ClassError> {
    let Some(ms) = p.exact_masses() else { return Ok(None) };
    let mut e = BigRational::zero();
    for (a, m) in p.support.iter().zip(ms) {
        if h.predict(domain, a.point)? != a.label {
            e += m;
        }
    }
    Ok(Some(e))
}

fn extreme(v: &VersionSpace, p: &RealizableDistribution, worst: bool) -> Result<usize, ErmError> {
    let mut best: Option<(usize, f64)> = None;
    for &h in &v.members {
        let e = true_error(&v.base.hypotheses[h], &v.base.domain, p)?;
        let better = match best {
            None => true,
            Some((_, b)) => (worst && e > b) || (!worst && e < b),
        };
        if better {
            best = Some((h, e));
        }
    }
    best.map(|b| b.0).ok_or(ErmError::EmptyVersionSpace)
}

/// Member of maximal true error; first in enumeration order on ties.
pub fn worst_case_erm(v: &VersionSpace, p: &RealizableDistribution) -> Result<usize, ErmError> {
    extreme(v, p, true)
}

/// Member of minimal true error; first in enumeration order on ties.
pub fn best_case_erm(v: &VersionSpace, p: &RealizableDistribution) -> Result<usize, ErmError> {
    extreme(v, p, false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScriptedRule {
    /// Threshold just above the largest sampled point (0 on an empty sample).
    ThresholdMaxplus1,
    /// Indicator of the unseen part of the first block that still admits a
    /// member consistent with an all-zero sample.
    B5MinConsistentBlock,
}

impl ScriptedRule {
    pub fn parse(s: &str) -> Result<Self, ErmError> {
        match s {
            "threshold-maxplus1" => Ok(ScriptedRule::ThresholdMaxplus1),
            "b5-min-consistent-block" => Ok(ScriptedRule::B5MinConsistentBlock),
            _ => Err(ErmError::UnknownRule(s.to_string())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            ScriptedRule::ThresholdMaxplus1 => "threshold-maxplus1",
            ScriptedRule::B5MinConsistentBlock => "b5-min-consistent-block",
        }
    }
}

/// Blocks with a minimum member size, as in the half-size block class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFamily {
    pub blocks: Vec<Vec<PointId>>,
    pub min: Vec<usize>,
}

impl BlockFamily {
    pub fn from_class(c: &ConceptClass) -> Option<Self> {
        if c.blocks.is_empty() || c.block_min.len() != c.blocks.len() {
            return None;
        }
        Some(BlockFamily { blocks: c.blocks.clone(), min: c.block_min.clone() })
    }

    /// First block whose unseen part is large enough to be a member.
    pub fn choose(&self, unseen_in: impl Fn(usize) -> usize) -> Option<usize> {
        (0..self.blocks.len()).find(|&b| unseen_in(b) >= self.min[b])
    }
}

pub fn scripted_erm(rule: ScriptedRule, c: &ConceptClass, s: &[LabeledExample]) -> Result<Hypothesis, ErmError> {
    let fail = |why: &str| ErmError::Inapplicable(rule.id().into(), why.into());
    match rule {
        ScriptedRule::ThresholdMaxplus1 => {
            if !c.hypotheses.iter().all(|h| matches!(h.rule, Rule::Threshold(_))) {
                return Err(fail("class is not a threshold class"));
            }
            let max = s.iter().map(|e| e.point).max().unwrap_or(0);
            Ok(Hypothesis::from_rule(Rule::Threshold(max as i64 + 1), &c.domain)?)
        }
        ScriptedRule::B5MinConsistentBlock => {
            let fam = BlockFamily::from_class(c).ok_or_else(|| fail("class has no block minimums"))?;
            if s.iter().any(|e| e.label) {
                return Err(fail("sample must be all-zero"));
            }
            let mut seen = FixedBitSet::with_capacity(c.domain.len());
            for e in s {
                seen.insert(c.domain.position(e.point)?);
            }
            let unseen = |b: usize| fam.blocks[b].iter().filter(|&&id| !seen.contains(c.domain.position(id).unwrap())).count();
            let b = fam.choose(unseen).ok_or_else(|| fail("no block admits a consistent member"))?;
            let mut table = FixedBitSet::with_capacity(c.domain.len());
            let mut sel = 0u64;
            for (i, &id) in fam.blocks[b].iter().enumerate() {
                let p = c.domain.position(id)?;
                if !seen.contains(p) {
                    table.insert(p);
                    sel |= 1 << i;
                }
            }
            Ok(Hypothesis { rule: Rule::BlockIndicator { family: "ex-B5-blocks", k: b + 1, sel }, table })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressionSet {
    /// Indices into the sample, ascending.
    pub subset: Vec<usize>,
    pub exact: bool,
}

/// Smallest sub-sample inducing the same version space. Searches subsets by
/// increasing size while the number of subsets examined stays within
/// `budget`; otherwise falls back to greedy backward elimination.
pub fn compression_set(c: &ConceptClass, s: &[LabeledExample], budget: u64) -> Result<CompressionSet, ClassError> {
    // distinct examples, first occurrence kept
    let mut first: HashMap<LabeledExample, usize> = HashMap::new();
    let mut uniq = Vec::new();
    for (i, e) in s.iter().enumerate() {
        if !first.contains_key(e) {
            first.insert(*e, i);
            uniq.push(i);
        }
    }
    let pos = uniq
        .iter()
        .map(|&i| Ok((c.domain.position(s[i].point)?, s[i].label)))
        .collect::<Result<Vec<_>, ClassError>>()?;
    // for each hypothesis outside V(S): the distinct examples that rule it out
    let kills: Vec<FixedBitSet> = c
        .hypotheses
        .iter()
        .filter_map(|h| {
            let mut k = FixedBitSet::with_capacity(pos.len());
            for (j, &(p, y)) in pos.iter().enumerate() {
                if h.at(p) != y {
                    k.insert(j);
                }
            }
            (k.count_ones(..) > 0).then_some(k)
        })
        .collect();
    let hits = |sub: &[usize]| kills.iter().all(|k| sub.iter().any(|&j| k.contains(j)));
    let u = pos.len();
    let mut spent = 0u64;
    for size in 0..=u {
        let count = binomial(u, size);
        if spent.saturating_add(count) > budget {
            break;
        }
        spent += count;
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if hits(&idx) {
                return Ok(CompressionSet { subset: idx.iter().map(|&j| uniq[j]).collect(), exact: true });
            }
            if !next_combination(&mut idx, u) {
                break;
            }
        }
    }
    let mut keep: Vec<usize> = (0..u).collect();
    let mut j = 0;
    while j < keep.len() {
        let mut trial = keep.clone();
        trial.remove(j);
        if hits(&trial) {
            keep = trial;
        } else {
            j += 1;
        }
    }
    Ok(CompressionSet { subset: keep.iter().map(|&j| uniq[j]).collect(), exact: false })
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = match r.checked_mul((n - i) as u64) {
            Some(x) => x / (i as u64 + 1),
            None => return u64::MAX,
        };
    }
    r
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Domain points on which members of `v` disagree.
pub fn disagreement_region(v: &VersionSpace) -> Vec<PointId> {
    let c = v.base;
    (0..c.domain.len())
        .filter(|&p| {
            let mut labels = v.members.iter().map(|&h| c.hypotheses[h].at(p));
            match labels.next() {
                Some(first) => labels.any(|y| y != first),
                None => false,
            }
        })
        .map(|p| c.domain.id_at(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classcat::catalog;
    use crate::distros::{geometric_eluder, two_point_pair, uniform_singleton};
    use crate::dims::eluder_dim;

    fn ex(p: PointId, y: u8) -> LabeledExample {
        LabeledExample::new(p, y == 1)
    }

    #[test]
    fn version_spaces() {
        let s = catalog("singletons-N", &[("m", 5)]).unwrap();
        assert_eq!(version_space(&s, &[]).unwrap().members.len(), 5);
        let v = version_space(&s, &[ex(3, 0)]).unwrap();
        assert_eq!(v.members, vec![0, 1, 3, 4]);
        let v = version_space(&s, &[ex(3, 0), ex(3, 1)]).unwrap();
        assert!(!v.realizable());
        assert!(version_space(&s, &[ex(9, 0)]).is_err());
    }

    #[test]
    fn errors_and_selection() {
        let t = catalog("thresholds-N", &[("m", 8)]).unwrap();
        let w = eluder_dim(&t, 10).unwrap().witness;
        let p = geometric_eluder(&t, &w).unwrap();
        let target = t.len() - 1;
        assert_eq!(true_error(&t.hypotheses[target], &t.domain, &p).unwrap(), 0.0);
        let v = version_space(&t, &[ex(1, 0), ex(2, 0)]).unwrap();
        let h = worst_case_erm(&v, &p).unwrap();
        assert_eq!(t.hypotheses[h].rule, Rule::Threshold(3));
        let tail: f64 = p.support.iter().filter(|a| a.point >= 3).map(|a| a.p).sum();
        assert_eq!(true_error(&t.hypotheses[h], &t.domain, &p).unwrap(), tail);
        assert_eq!(best_case_erm(&v, &p).unwrap(), target);
        let v1 = version_space(&t, &[ex(1, 0)]).unwrap();
        assert_eq!(best_case_erm(&v1, &p).unwrap(), target);

        let s = catalog("singletons-N", &[("m", 4)]).unwrap();
        let u = uniform_singleton(4).unwrap();
        let v = version_space(&s, &[ex(1, 0), ex(2, 0), ex(3, 0)]).unwrap();
        let h = worst_case_erm(&v, &u).unwrap();
        assert_eq!(s.hypotheses[h].rule, Rule::Singleton(4));
        assert_eq!(true_error(&s.hypotheses[h], &s.domain, &u).unwrap(), 0.25);
        let one = version_space(&s, &[ex(4, 1)]).unwrap();
        assert_eq!(worst_case_erm(&one, &u).unwrap(), 3);
        let empty = version_space(&s, &[ex(4, 1), ex(3, 1)]).unwrap();
        assert_eq!(worst_case_erm(&empty, &u), Err(ErmError::EmptyVersionSpace));
    }

    #[test]
    fn exact_error_reads_masses() {
        let t = catalog("thresholds-N", &[("m", 3)]).unwrap();
        let w = eluder_dim(&t, 10).unwrap().witness;
        let p = geometric_eluder(&t, &w).unwrap();
        let h = ConceptClass::explicit(vec![1, 2, 3], &[vec![0, 1, 0]]).unwrap();
        let e = true_error_exact(&h.hypotheses[0], &t.domain, &p).unwrap().unwrap();
        assert_eq!(e.to_string(), "1/4");
        let (_, p1) = two_point_pair(&t).unwrap();
        let xp = p1.support[1].point;
        let h0 = t.hypotheses.iter().find(|h| !h.predict(&t.domain, xp).unwrap() && h.predict(&t.domain, 2).unwrap()).unwrap();
        assert_eq!(true_error(h0, &t.domain, &p1).unwrap(), 0.5);
    }

    #[test]
    fn scripted() {
        let t = catalog("thresholds-N", &[("m", 8)]).unwrap();
        let h = scripted_erm(ScriptedRule::ThresholdMaxplus1, &t, &[ex(2, 0), ex(5, 0)]).unwrap();
        assert_eq!(h.rule, Rule::Threshold(6));
        assert_eq!(scripted_erm(ScriptedRule::ThresholdMaxplus1, &t, &[]).unwrap().rule, Rule::Threshold(1));
        let s = catalog("singletons-N", &[("m", 4)]).unwrap();
        assert!(scripted_erm(ScriptedRule::ThresholdMaxplus1, &s, &[]).is_err());
        assert!(scripted_erm(ScriptedRule::B5MinConsistentBlock, &t, &[]).is_err());

        let b5 = catalog("ex-B5-blocks", &[("i_max", 3)]).unwrap();
        // block 1 = {0,1}; sample both of its points so block 2 is chosen
        let h = scripted_erm(ScriptedRule::B5MinConsistentBlock, &b5, &[ex(0, 0), ex(1, 0), ex(2, 0)]).unwrap();
        assert!(matches!(h.rule, Rule::BlockIndicator { k: 2, .. }));
        assert!(b5.find_table(&h.table).is_some());
        // avoiding block 1 keeps the choice there
        let h = scripted_erm(ScriptedRule::B5MinConsistentBlock, &b5, &[ex(3, 0)]).unwrap();
        assert!(matches!(h.rule, Rule::BlockIndicator { k: 1, sel: 0b11, .. }));
        assert!(scripted_erm(ScriptedRule::B5MinConsistentBlock, &b5, &[ex(3, 1)]).is_err());
        assert_eq!(ScriptedRule::parse("nope"), Err(ErmError::UnknownRule("nope".into())));
    }

    #[test]
    fn compression_examples() {
        let t = catalog("thresholds-N", &[("m", 10)]).unwrap();
        assert_eq!(compression_set(&t, &[], 1000).unwrap(), CompressionSet { subset: vec![], exact: true });
        let s = [ex(1, 0), ex(3, 0), ex(7, 1), ex(9, 1)];
        let cs = compression_set(&t, &s, 1000).unwrap();
        assert_eq!(cs.subset, vec![1, 2]);
        assert!(cs.exact);
        let greedy = compression_set(&t, &s, 2).unwrap();
        assert!(!greedy.exact);
        let sub: Vec<_> = greedy.subset.iter().map(|&i| s[i]).collect();
        assert_eq!(version_space(&t, &sub).unwrap().members, version_space(&t, &s).unwrap().members);
        // an all-1 class: no example rules anything out
        let one = ConceptClass::explicit(vec![0, 1], &[vec![1, 1]]).unwrap();
        assert!(compression_set(&one, &[ex(0, 1)], 100).unwrap().subset.is_empty());
    }

    #[test]
    fn disagreement() {
        let s = catalog("singletons-N", &[("m", 3)]).unwrap();
        assert_eq!(disagreement_region(&version_space(&s, &[]).unwrap()), vec![1, 2, 3]);
        assert!(disagreement_region(&version_space(&s, &[ex(2, 1)]).unwrap()).is_empty());
        let t = catalog("thresholds-N", &[("m", 5)]).unwrap();
        assert_eq!(disagreement_region(&version_space(&t, &[ex(2, 0), ex(4, 1)]).unwrap()), vec![3]);
    }
}
