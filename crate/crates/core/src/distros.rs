//! Finite-support realizable distributions used by the lower-bound
//! constructions, and the rate-schedule builder behind the slow-rate ones.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classcat::{label_int, ConceptClass, PointId};
use crate::dims::{verify_witness, Witness, WitnessKind};

pub type Rational = BigRational;

pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("invalid distribution: {0}")]
    Invalid(String),
    #[error("witness rejected: {0}")]
    Witness(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("schedule infeasible at t={t}: condition {condition} cannot be met within the tabulated range")]
    Infeasible { t: usize, condition: u8 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: PointId,
    #[serde(with = "label_int")]
    pub label: bool,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub name: String,
    /// Target labels on the support points.
    pub labels: BTreeMap<PointId, u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizableDistribution {
    pub support: Vec<Atom>,
    pub target: Target,
    pub construction: Construction,
    /// Exact masses as "p/q" strings, when the construction is rational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<String>>,
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn pow2_inv(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

fn exact_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

impl RealizableDistribution {
    pub fn new(
        support: Vec<Atom>,
        target: Target,
        construction: Construction,
        exact: Option<Vec<Rational>>,
    ) -> Result<Self, DistError> {
        if support.is_empty() {
            return Err(DistError::Invalid("empty support".into()));
        }
        let mut pts = BTreeSet::new();
        for a in &support {
            if !(a.p > 0.0 && a.p.is_finite()) {
                return Err(DistError::Invalid(format!("atom at {} has mass {}", a.point, a.p)));
            }
            if !pts.insert(a.point) {
                return Err(DistError::Invalid(format!("point {} appears twice", a.point)));
            }
            match target.labels.get(&a.point) {
                Some(&y) if (y == 1) == a.label => {}
                _ => return Err(DistError::Invalid(format!("label at {} differs from the target", a.point))),
            }
        }
        let total: f64 = support.iter().map(|a| a.p).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(DistError::Invalid(format!("masses sum to {total}")));
        }
        if let Some(ex) = &exact {
            if ex.len() != support.len() || ex.iter().sum::<Rational>() != Rational::one() {
                return Err(DistError::Invalid("exact masses do not sum to 1".into()));
            }
        }
        Ok(RealizableDistribution {
            support,
            target,
            construction,
            exact: exact.map(|v| v.iter().map(|r| r.to_string()).collect()),
        })
    }

    /// Builds from (point, label, exact mass) triples; the target is the
    /// labeling itself.
    pub fn from_exact(atoms: Vec<(PointId, bool, Rational)>, target: &str, name: &str, params: serde_json::Value) -> Result<Self, DistError> {
        let support = atoms
            .iter()
            .map(|(p, y, m)| Atom { point: *p, label: *y, p: m.to_f64().unwrap_or(0.0) })
            .collect();
        let labels = atoms.iter().map(|(p, y, _)| (*p, *y as u8)).collect();
        Self::new(
            support,
            Target { name: target.into(), labels },
            Construction { name: name.into(), params },
            Some(atoms.into_iter().map(|a| a.2).collect()),
        )
    }

    /// Re-checks the invariants (e.g. after deserialization).
    pub fn validate(&self) -> Result<(), DistError> {
        let exact = match &self.exact {
            None => None,
            Some(v) => Some(
                v.iter()
                    .map(|s| s.parse::<Rational>().map_err(|_| DistError::Invalid(format!("bad rational {s}"))))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        Self::new(self.support.clone(), self.target.clone(), self.construction.clone(), exact).map(|_| ())
    }

    pub fn exact_masses(&self) -> Option<Vec<Rational>> {
        self.exact.as_ref().map(|v| v.iter().map(|s| s.parse().expect("validated rational")).collect())
    }

    /// Whether some member of `c` labels every atom correctly.
    pub fn realizable_by(&self, c: &ConceptClass) -> bool {
        let pos: Option<Vec<(usize, bool)>> =
            self.support.iter().map(|a| c.domain.position(a.point).ok().map(|p| (p, a.label))).collect();
        match pos {
            None => false,
            Some(pos) => c.hypotheses.iter().any(|h| pos.iter().all(|&(p, y)| h.at(p) == y)),
        }
    }
}

/// Mass 2^{-i} on the i-th pair of a verified eluder sequence, with the tail
/// folded into the last pair.
pub fn geometric_eluder(c: &ConceptClass, seq: &Witness) -> Result<RealizableDistribution, DistError> {
    if seq.kind != WitnessKind::EluderSeq {
        return Err(DistError::Witness("expected an eluder sequence".into()));
    }
    verify_witness(c, seq).map_err(DistError::Witness)?;
    let m = seq.points.len();
    if m == 0 {
        return Err(DistError::Witness("empty sequence".into()));
    }
    let atoms = (0..m)
        .map(|i| {
            let mass = if i + 1 < m { pow2_inv(i + 1) } else { pow2_inv(m - 1) };
            (seq.points[i], seq.labels[i], mass)
        })
        .collect();
    RealizableDistribution::from_exact(atoms, "eluder-sequence labels", "geometric-eluder", serde_json::json!({ "m": m }))
}

/// Block t (1-based) of a star-eluder witness carries mass 2^{-t} spread
/// evenly; the tail 2^{-t_max} is folded into block t_max.
pub fn block_star_eluder(c: &ConceptClass, seq: &Witness, t_max: usize) -> Result<RealizableDistribution, DistError> {
    if !matches!(seq.kind, WitnessKind::SePrefix | WitnessKind::VcePrefix) {
        return Err(DistError::Witness("expected a prefix witness".into()));
    }
    verify_witness(c, seq).map_err(DistError::Witness)?;
    let blocks = seq.block_points();
    if t_max == 0 || blocks.len() < t_max {
        return Err(DistError::Witness(format!("witness has {} blocks, need {t_max}", blocks.len())));
    }
    let mut seen = BTreeSet::new();
    let mut atoms = Vec::new();
    for (t, blk) in blocks.iter().take(t_max).enumerate() {
        let t = t + 1;
        let total = if t < t_max { pow2_inv(t) } else { pow2_inv(t_max - 1) };
        let each = total / Rational::from_integer(BigInt::from(blk.len()));
        for &(p, y) in blk {
            if !seen.insert(p) {
                return Err(DistError::Witness("blocks are not disjoint".into()));
            }
            atoms.push((p, y, each.clone()));
        }
    }
    let sizes: Vec<usize> = blocks.iter().take(t_max).map(|b| b.len()).collect();
    RealizableDistribution::from_exact(
        atoms,
        "witness center",
        "block-star-eluder",
        serde_json::json!({ "t_max": t_max, "block_sizes": sizes }),
    )
}

/// A rate function tabulated at n = 1..=len.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub name: String,
    pub values: Vec<f64>,
}

impl RateTable {
    pub fn from_fn(name: &str, n_max: usize, f: impl Fn(usize) -> f64) -> Self {
        RateTable { name: name.into(), values: (1..=n_max).map(f).collect() }
    }

    /// Named rates: `inv-n`, `inv-sqrt-n`, `inv-log-n` (1/log2(n+1)).
    pub fn named(name: &str, n_max: usize) -> Option<Self> {
        Some(match name {
            "inv-n" => Self::from_fn(name, n_max, |n| 1.0 / n as f64),
            "inv-sqrt-n" => Self::from_fn(name, n_max, |n| 1.0 / (n as f64).sqrt()),
            "inv-log-n" => Self::from_fn(name, n_max, |n| 1.0 / ((n + 1) as f64).log2()),
            _ => return None,
        })
    }

    pub fn at(&self, n: usize) -> f64 {
        self.values[n - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlowSchedule {
    pub rate: String,
    pub c: f64,
    pub p: Vec<f64>,
    pub k: Vec<usize>,
    pub n: Vec<usize>,
}

impl SlowSchedule {
    pub fn total_mass(&self) -> Rational {
        self.p.iter().map(|&x| exact_f64(x)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub t: usize,
    pub condition: u8,
    pub detail: String,
}

/// Independent check of the three schedule conditions, in exact arithmetic
/// on the stored floats:
/// (1) the mass scheduled after t is at most 1/n_t;
/// (2) n_t p_t <= k_t;
/// (3) p_t equals the float product C * R(n_t).
/// Also checks k strictly increasing, n increasing, C in [1/2, 1] and total
/// mass at most 1 (reported as condition 0).
pub fn check_schedule(s: &SlowSchedule, rate: &RateTable) -> Vec<ConditionViolation> {
    let mut out = Vec::new();
    let v = |t, condition, detail: String| ConditionViolation { t, condition, detail };
    let len = s.p.len();
    if s.k.len() != len || s.n.len() != len {
        out.push(v(0, 0, "sequence lengths differ".into()));
        return out;
    }
    if !(0.5..=1.0).contains(&s.c) {
        out.push(v(0, 0, format!("C = {} outside [1/2, 1]", s.c)));
    }
    if s.total_mass() > Rational::one() {
        out.push(v(0, 0, "total mass exceeds 1".into()));
    }
    let ps: Vec<Rational> = s.p.iter().map(|&x| exact_f64(x)).collect();
    for t in 0..len {
        if t > 0 && (s.k[t] <= s.k[t - 1] || s.n[t] <= s.n[t - 1]) {
            out.push(v(t + 1, 0, "k and n must increase".into()));
        }
        if s.n[t] == 0 || s.n[t] > rate.values.len() {
            out.push(v(t + 1, 0, format!("n_t = {} outside the table", s.n[t])));
            continue;
        }
        let tail: Rational = ps[t + 1..].iter().sum();
        if tail > rat(1, s.n[t] as i64) {
            out.push(v(t + 1, 1, format!("tail {tail} > 1/{}", s.n[t])));
        }
        if Rational::from_integer(BigInt::from(s.n[t])) * &ps[t] > Rational::from_integer(BigInt::from(s.k[t])) {
            out.push(v(t + 1, 2, format!("n_t p_t > k_t = {}", s.k[t])));
        }
        if s.p[t] != s.c * rate.at(s.n[t]) || s.p[t] <= 0.0 {
            out.push(v(t + 1, 3, format!("p_t = {} differs from C R(n_t)", s.p[t])));
        }
    }
    out
}

/// Greedy construction: each p_t takes at most half of what the constraints
/// still allow (all of it at the last step), n_t is the smallest admissible
/// sample size, and k_t = max(ceil(n_t p_t), k_{t-1} + 1). C starts at 1/2
/// and is relaxed toward 1 if that fails.
pub fn slow_schedule(rate: &RateTable, t_max: usize) -> Result<SlowSchedule, DistError> {
    if rate.values.iter().any(|&r| !(r > 0.0 && r.is_finite())) || rate.values.windows(2).any(|w| w[1] > w[0]) {
        return Err(DistError::Invalid("rate must be positive and non-increasing".into()));
    }
    let mut last = None;
    for c in [0.5, 0.75, 1.0] {
        match greedy(rate, t_max, c) {
            Ok(s) => {
                let bad = check_schedule(&s, rate);
                if let Some(b) = bad.first() {
                    last = Some(DistError::Infeasible { t: b.t, condition: b.condition });
                    continue;
                }
                return Ok(s);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn greedy(rate: &RateTable, t_max: usize, c: f64) -> Result<SlowSchedule, DistError> {
    let mut s = SlowSchedule { rate: rate.name.clone(), c, p: vec![], k: vec![], n: vec![] };
    let mut remaining = Rational::one();
    let mut budgets: Vec<Rational> = Vec::new();
    let (mut prev_n, mut prev_k) = (0usize, 0usize);
    for t in 1..=t_max {
        let mut cap = remaining.clone();
        for b in &budgets {
            if *b < cap {
                cap = b.clone();
            }
        }
        if t < t_max {
            cap /= Rational::from_integer(BigInt::from(2));
        }
        let n = (prev_n + 1..=rate.values.len())
            .find(|&n| {
                let p = c * rate.at(n);
                p > 0.0 && exact_f64(p) <= cap
            })
            .ok_or(DistError::Infeasible { t, condition: 1 })?;
        let p = c * rate.at(n);
        let pr = exact_f64(p);
        let np = Rational::from_integer(BigInt::from(n)) * &pr;
        let k = (np.ceil().to_integer().to_usize().unwrap_or(usize::MAX)).max(prev_k + 1);
        remaining -= &pr;
        for b in budgets.iter_mut() {
            *b -= &pr;
        }
        budgets.push(rat(1, n as i64));
        s.p.push(p);
        s.k.push(k);
        s.n.push(n);
        prev_n = n;
        prev_k = k;
    }
    Ok(s)
}

/// Block k_t of a VC-eluder witness carries p_t uniformly; the leftover mass
/// goes to a sink point outside the witness, labeled by the witness's
/// realizer. Returns the sink id, if one was needed.
pub fn slow_distribution(
    c: &ConceptClass,
    seq: &Witness,
    sched: &SlowSchedule,
) -> Result<(RealizableDistribution, Option<PointId>), DistError> {
    if !matches!(seq.kind, WitnessKind::VcePrefix | WitnessKind::SePrefix) {
        return Err(DistError::Witness("expected a prefix witness".into()));
    }
    verify_witness(c, seq).map_err(DistError::Witness)?;
    let blocks = seq.block_points();
    let mut used = vec![false; blocks.len()];
    let mut atoms = Vec::new();
    for (t, &k) in sched.k.iter().enumerate() {
        let bi = (0..blocks.len())
            .find(|&i| !used[i] && blocks[i].len() == k)
            .ok_or_else(|| DistError::Witness(format!("no unused block of size {k}")))?;
        used[bi] = true;
        let each = exact_f64(sched.p[t]) / Rational::from_integer(BigInt::from(k));
        for &(p, y) in &blocks[bi] {
            atoms.push((p, y, each.clone()));
        }
    }
    let left = Rational::one() - sched.total_mass();
    if left < Rational::zero() {
        return Err(DistError::Construction("schedule mass exceeds 1".into()));
    }
    let mut sink = None;
    if left > Rational::zero() {
        let r = seq.realizer.ok_or_else(|| DistError::Witness("no realizer".into()))?;
        let in_seq: BTreeSet<PointId> = seq.points.iter().copied().collect();
        let id = c
            .domain
            .ids()
            .find(|id| !in_seq.contains(id))
            .ok_or_else(|| DistError::Construction("no point left for the sink".into()))?;
        let y = c.predict(r, id).map_err(|e| DistError::Construction(e.to_string()))?;
        atoms.push((id, y, left));
        sink = Some(id);
    }
    let d = RealizableDistribution::from_exact(
        atoms,
        "witness center",
        "slow",
        serde_json::json!({ "rate": sched.rate, "c": sched.c, "k": sched.k, "n": sched.n }),
    )?;
    Ok((d, sink))
}

pub fn uniform_singleton(m: usize) -> Result<RealizableDistribution, DistError> {
    if m == 0 {
        return Err(DistError::Invalid("m must be at least 1".into()));
    }
    let atoms = (1..=m).map(|p| (p, false, rat(1, m as i64))).collect();
    RealizableDistribution::from_exact(atoms, "all0", "uniform-singleton", serde_json::json!({ "m": m }))
}

/// Masses on chosen points, labeled by member `h` of the class.
pub fn on_member(c: &ConceptClass, h: usize, masses: Vec<(PointId, Rational)>) -> Result<RealizableDistribution, DistError> {
    let hyp = c.hypotheses.get(h).ok_or_else(|| DistError::Invalid(format!("no member {h}")))?;
    let atoms = masses
        .into_iter()
        .map(|(p, m)| Ok((p, hyp.predict(&c.domain, p).map_err(|e| DistError::Invalid(e.to_string()))?, m)))
        .collect::<Result<Vec<_>, DistError>>()?;
    RealizableDistribution::from_exact(atoms, &format!("member {h}"), "on-member", serde_json::json!({ "member": h }))
}

/// Uniform over the whole domain, labeled by member `h`.
pub fn uniform_member(c: &ConceptClass, h: usize) -> Result<RealizableDistribution, DistError> {
    let n = c.domain.len() as i64;
    let mut d = on_member(c, h, c.domain.ids().into_iter().map(|p| (p, rat(1, n))).collect())?;
    d.construction = Construction { name: "uniform-member".into(), params: serde_json::json!({ "member": h }) };
    Ok(d)
}

/// The two distributions of the exponential lower bound: mass 1/2 on (x, y)
/// and 1/2 on (x', i), where two members agree at x and differ at x'.
/// Scans member pairs in enumeration order, then x, then x', by domain order.
pub fn two_point_pair(c: &ConceptClass) -> Result<(RealizableDistribution, RealizableDistribution), DistError> {
    let n = c.domain.len();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let (a, b) = (&c.hypotheses[i], &c.hypotheses[j]);
            let agree = (0..n).find(|&p| a.at(p) == b.at(p));
            let differ = (0..n).find(|&p| a.at(p) != b.at(p));
            if let (Some(x), Some(xp)) = (agree, differ) {
                let (xid, xpid) = (c.domain.id_at(x), c.domain.id_at(xp));
                let y = a.at(x);
                let make = |lab: bool| {
                    let who = if a.at(xp) == lab { i } else { j };
                    RealizableDistribution::from_exact(
                        vec![(xid, y, rat(1, 2)), (xpid, lab, rat(1, 2))],
                        &format!("hyp:{who}"),
                        "two-point",
                        serde_json::json!({ "x": xid, "x_prime": xpid, "h1": i, "h2": j, "label": lab as u8 }),
                    )
                };
                return Ok((make(false)?, make(true)?));
            }
        }
    }
    Err(DistError::Construction("no pair of members agreeing at one point and differing at another".into()))
}

/// Structural truncation of the block class with half-size members used for
/// the arbitrarily slow example: scheduled blocks X_{i_t} of size 2^{i_t},
/// i_t = t + 6, sample sizes n_t = 4^{t+2}, masses p_t = 2^{i_t - 2} / n_t,
/// and a sink point carrying the rest. All labels are 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct B5Design {
    pub i: Vec<usize>,
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    /// Point ids of each scheduled block.
    pub blocks: Vec<Vec<PointId>>,
    pub sink: PointId,
}

pub fn b5_design(t_max: usize) -> Result<(B5Design, RealizableDistribution), DistError> {
    if t_max == 0 || t_max > 6 {
        return Err(DistError::Invalid("t_max must be in 1..=6".into()));
    }
    let mut d = B5Design { i: vec![], n: vec![], p: vec![], blocks: vec![], sink: 0 };
    let mut atoms = Vec::new();
    let mut next = 0usize;
    let mut total = Rational::zero();
    for t in 1..=t_max {
        let i = t + 6;
        let n = 1usize << (2 * (t + 2));
        let p = Rational::new(BigInt::one() << (i - 2), BigInt::from(n));
        let size = 1usize << i;
        let each = &p / Rational::from_integer(BigInt::from(size));
        let blk: Vec<PointId> = (next..next + size).collect();
        for &id in &blk {
            atoms.push((id, false, each.clone()));
        }
        next += size;
        total += &p;
        d.i.push(i);
        d.n.push(n);
        d.p.push(p.to_f64().unwrap());
        d.blocks.push(blk);
    }
    d.sink = next;
    atoms.push((next, false, Rational::one() - total));
    let dist = RealizableDistribution::from_exact(atoms, "all0", "b5-design", serde_json::json!({ "t_max": t_max }))?;
    Ok((d, dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classcat::catalog;
    use crate::dims::{eluder_dim, se_prefix, vce_prefix, BlockSchedule, Center, SearchBudget};

    fn masses(d: &RealizableDistribution) -> Vec<Rational> {
        d.exact_masses().unwrap()
    }

    #[test]
    fn geometric_masses() {
        let t = catalog("thresholds-N", &[("m", 3)]).unwrap();
        let w = eluder_dim(&t, 10).unwrap().witness;
        let d = geometric_eluder(&t, &w).unwrap();
        assert_eq!(masses(&d), vec![rat(1, 2), rat(1, 4), rat(1, 4)]);
        assert!(d.support.iter().all(|a| !a.label));
        assert!(d.realizable_by(&t));
        let mut short = w.clone();
        short.points.truncate(1);
        short.labels.truncate(1);
        short.hypotheses.truncate(1);
        assert_eq!(masses(&geometric_eluder(&t, &short).unwrap()), vec![rat(1, 1)]);
        let mut bad = w;
        bad.labels[0] = true;
        assert!(matches!(geometric_eluder(&t, &bad), Err(DistError::Witness(_))));
    }

    #[test]
    fn block_masses() {
        let s = catalog("singletons-N", &[("m", 11)]).unwrap();
        let w = se_prefix(&s, &Center::AllZero, &BlockSchedule::Sizes(vec![3]), 1, SearchBudget::default())
            .unwrap()
            .witness;
        assert_eq!(masses(&block_star_eluder(&s, &w, 1).unwrap()), vec![rat(1, 3); 3]);
        let w = se_prefix(&s, &Center::AllZero, &BlockSchedule::Strong, 2, SearchBudget::default())
            .unwrap()
            .witness;
        assert_eq!(masses(&block_star_eluder(&s, &w, 2).unwrap()), vec![rat(1, 2), rat(1, 4), rat(1, 4)]);
        let s = catalog("singletons-N", &[("m", 15)]).unwrap();
        let w = se_prefix(&s, &Center::AllZero, &BlockSchedule::Sizes(vec![2, 4, 8]), 3, SearchBudget::default())
            .unwrap()
            .witness;
        let d = block_star_eluder(&s, &w, 3).unwrap();
        let m = masses(&d);
        assert_eq!(m[0], rat(1, 4));
        assert_eq!(m[2], rat(1, 16));
        assert!(d.realizable_by(&s));
        assert!(block_star_eluder(&s, &w, 4).is_err());
    }

    #[test]
    fn schedules_pass_checks() {
        for (name, t_max) in [("inv-n", 3), ("inv-sqrt-n", 4), ("inv-log-n", 3)] {
            let r = RateTable::named(name, 1 << 16).unwrap();
            let s = slow_schedule(&r, t_max).unwrap();
            assert_eq!(s.p.len(), t_max);
            assert!(check_schedule(&s, &r).is_empty(), "{name}");
        }
        let r = RateTable::named("inv-sqrt-n", 1 << 16).unwrap();
        let s = slow_schedule(&r, 4).unwrap();
        assert_eq!(s.n, vec![1, 4, 16, 64]);
        assert_eq!(s.k, vec![1, 2, 3, 4]);
        assert_eq!(s.p, vec![0.5, 0.25, 0.125, 0.0625]);
        let empty = slow_schedule(&r, 0).unwrap();
        assert!(empty.p.is_empty() && check_schedule(&empty, &r).is_empty());
    }

    #[test]
    fn schedule_infeasible_and_checker() {
        let r = RateTable::named("inv-sqrt-n", 20).unwrap();
        assert!(matches!(slow_schedule(&r, 4), Err(DistError::Infeasible { .. })));
        let r = RateTable::named("inv-n", 100).unwrap();
        let mut s = slow_schedule(&r, 3).unwrap();
        s.k[1] = 0;
        let bad = check_schedule(&s, &r);
        assert!(bad.iter().any(|v| v.condition == 2));
        s.p[2] = 0.6;
        assert!(check_schedule(&s, &r).iter().any(|v| v.condition == 1));
        assert!(check_schedule(&s, &r).iter().any(|v| v.condition == 3));
    }

    #[test]
    fn slow_distribution_blocks() {
        let b8 = catalog("ex-B8", &[("k_max", 5)]).unwrap();
        let w = vce_prefix(&b8, &Center::AllZero, &BlockSchedule::Strong, 4, SearchBudget::default())
            .unwrap()
            .witness;
        let r = RateTable::named("inv-sqrt-n", 1 << 12).unwrap();
        let s = slow_schedule(&r, 4).unwrap();
        let (d, sink) = slow_distribution(&b8, &w, &s).unwrap();
        let m = masses(&d);
        assert_eq!(m.last().unwrap(), &rat(1, 16));
        assert!(sink.is_some());
        assert!(d.realizable_by(&b8));
        // one block, all the mass
        let single = SlowSchedule { rate: "x".into(), c: 1.0, p: vec![1.0], k: vec![3], n: vec![1] };
        let (d, sink) = slow_distribution(&b8, &w, &single).unwrap();
        assert_eq!(masses(&d), vec![rat(1, 3); 3]);
        assert_eq!(sink, None);
    }

    #[test]
    fn uniform_and_pairs() {
        assert_eq!(masses(&uniform_singleton(1).unwrap()), vec![rat(1, 1)]);
        assert_eq!(masses(&uniform_singleton(4).unwrap()), vec![rat(1, 4); 4]);
        assert!(uniform_singleton(4).unwrap().realizable_by(&catalog("singletons-N", &[("m", 5)]).unwrap()));
        let t = catalog("thresholds-N", &[("m", 3)]).unwrap();
        let (p0, p1) = two_point_pair(&t).unwrap();
        assert_eq!(p0.support[0].point, 2);
        assert_eq!(p0.support[1].point, 1);
        assert!(!p0.support[1].label && p1.support[1].label);
        assert!(p0.realizable_by(&t) && p1.realizable_by(&t));
        assert!(two_point_pair(&catalog("powerset", &[("n", 2)]).unwrap()).is_ok());
        let one = ConceptClass::explicit(vec![0, 1], &[vec![1, 0]]).unwrap();
        assert!(two_point_pair(&one).is_err());
    }

    #[test]
    fn invariants_enforced() {
        let d = uniform_singleton(2).unwrap();
        let mut bad = d.clone();
        bad.support[0].p = 0.7;
        assert!(bad.validate().is_err());
        let mut bad = d.clone();
        bad.support[0].label = true;
        bad.exact = None;
        assert!(bad.validate().is_err());
        d.validate().unwrap();
        let json = serde_json::to_string(&d).unwrap();
        let back: RealizableDistribution = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn b5_design_masses() {
        let (d, dist) = b5_design(4).unwrap();
        assert_eq!(d.n, vec![64, 256, 1024, 4096]);
        assert_eq!(d.p, vec![0.5, 0.25, 0.125, 0.0625]);
        for t in 0..4 {
            assert_eq!(d.p[t], (1u64 << (d.i[t] - 2)) as f64 / d.n[t] as f64);
        }
        assert_eq!(dist.support.last().unwrap().p, 0.0625);
    }
}
