//! Monte Carlo learning curves, ratio diagnostics, rate fitting and bound checks.

use fixedbitset::FixedBitSet;
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::WeightedAliasIndex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classcat::{ConceptClass, LabeledExample, Rule, Sample};
use crate::distros::{Atom, Construction, RealizableDistribution};
use crate::erm::{compression_set, BlockFamily, ScriptedRule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("rule `{0}` does not apply: {1}")]
    Inapplicable(String, String),
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at sample size `n`; independent of thread layout.
pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    let h = splitmix64(seed);
    let h = splitmix64(h ^ n as u64);
    splitmix64(h ^ trial as u64)
}

pub fn trial_rng(seed: u64, n: usize, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, n, trial))
}

/// Alias-table sampler over the support of a distribution.
#[derive(Clone, Debug)]
pub struct Sampler {
    atoms: Vec<Atom>,
    alias: WeightedAliasIndex<f64>,
}

impl Sampler {
    pub fn new(p: &RealizableDistribution) -> Result<Self, CurveError> {
        let w: Vec<f64> = p.support.iter().map(|a| a.p).collect();
        let alias = WeightedAliasIndex::new(w).map_err(|e| CurveError::Invalid(e.to_string()))?;
        Ok(Sampler { atoms: p.support.clone(), alias })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn draw_index(&self, rng: &mut ChaCha8Rng) -> usize {
        self.alias.sample(rng)
    }

    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Sample {
        (0..n)
            .map(|_| {
                let a = &self.atoms[self.draw_index(rng)];
                LabeledExample::new(a.point, a.label)
            })
            .collect()
    }
}

/// n i.i.d. draws from `p`.
pub fn sample_dataset(p: &RealizableDistribution, n: usize, rng: &mut ChaCha8Rng) -> Result<Sample, CurveError> {
    Ok(Sampler::new(p)?.sample(n, rng))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerRule {
    Worst,
    Best,
    Scripted(ScriptedRule),
}

impl LearnerRule {
    pub fn parse(s: &str) -> Result<Self, CurveError> {
        match s {
            "worst" => Ok(LearnerRule::Worst),
            "best" => Ok(LearnerRule::Best),
            _ => ScriptedRule::parse(s)
                .map(LearnerRule::Scripted)
                .map_err(|e| CurveError::Invalid(e.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerRule::Worst => "worst",
            LearnerRule::Best => "best",
            LearnerRule::Scripted(r) => r.id(),
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    /// Candidates in preference order with their mistake sets over atoms.
    Ranked { wrong: Vec<FixedBitSet>, error: Vec<f64> },
    Threshold,
    Blocks { family: BlockFamily, atom_block: Vec<Option<usize>> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub error: f64,
    /// The rule had nothing to output (empty version space, or no block
    /// admitting a consistent member); the error is recorded as 0.
    pub undefined: bool,
}

/// An ERM rule prepared against one distribution. Every rule here depends on
/// the sample only through the set of atoms seen, so drawing stops early once
/// the whole support has been seen.
#[derive(Clone, Debug)]
pub struct Learner {
    sampler: Sampler,
    kind: Kind,
    pub rule: LearnerRule,
    pub distribution: Construction,
}

impl Learner {
    pub fn new(c: &ConceptClass, p: &RealizableDistribution, rule: LearnerRule) -> Result<Self, CurveError> {
        p.validate().map_err(|e| CurveError::Invalid(e.to_string()))?;
        let sampler = Sampler::new(p)?;
        let inapplicable = |why: &str| CurveError::Inapplicable(rule.name().into(), why.into());
        let kind = match rule {
            LearnerRule::Worst | LearnerRule::Best => {
                let pos = p
                    .support
                    .iter()
                    .map(|a| c.domain.position(a.point))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CurveError::Invalid(e.to_string()))?;
                let mut cands: Vec<(f64, FixedBitSet)> = c
                    .hypotheses
                    .iter()
                    .map(|h| {
                        let mut w = FixedBitSet::with_capacity(pos.len());
                        let mut e = 0.0;
                        for (j, (&q, a)) in pos.iter().zip(&p.support).enumerate() {
                            if h.at(q) != a.label {
                                w.insert(j);
                                e += a.p;
                            }
                        }
                        (e, w)
                    })
                    .collect();
                // stable sort keeps enumeration order among ties
                if rule == LearnerRule::Worst {
                    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
                } else {
                    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
                }
                let (error, wrong) = cands.into_iter().unzip();
                Kind::Ranked { wrong, error }
            }
            LearnerRule::Scripted(ScriptedRule::ThresholdMaxplus1) => {
                if !c.hypotheses.iter().all(|h| matches!(h.rule, Rule::Threshold(_))) {
                    return Err(inapplicable("class is not a threshold class"));
                }
                Kind::Threshold
            }
            LearnerRule::Scripted(ScriptedRule::B5MinConsistentBlock) => {
                let family = BlockFamily::from_class(c).ok_or_else(|| inapplicable("class has no block minimums"))?;
                return Self::blocks(family, p);
            }
        };
        Ok(Learner { sampler, kind, rule, distribution: p.construction.clone() })
    }

    /// Block rule on an explicit block family, for designs too large to
    /// enumerate as a class. The sample must be all-zero.
    pub fn blocks(family: BlockFamily, p: &RealizableDistribution) -> Result<Self, CurveError> {
        if family.blocks.len() != family.min.len() {
            return Err(CurveError::Invalid("one minimum per block".into()));
        }
        if p.support.iter().any(|a| a.label) {
            return Err(CurveError::Inapplicable(
                ScriptedRule::B5MinConsistentBlock.id().into(),
                "distribution must be all-zero".into(),
            ));
        }
        let atom_block = p
            .support
            .iter()
            .map(|a| family.blocks.iter().position(|b| b.contains(&a.point)))
            .collect();
        Ok(Learner {
            sampler: Sampler::new(p)?,
            kind: Kind::Blocks { family, atom_block },
            rule: LearnerRule::Scripted(ScriptedRule::B5MinConsistentBlock),
            distribution: p.construction.clone(),
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        self.sampler.atoms()
    }

    /// Atoms seen in n draws.
    pub fn draw_seen(&self, n: usize, rng: &mut ChaCha8Rng) -> FixedBitSet {
        let m = self.atoms().len();
        let mut seen = FixedBitSet::with_capacity(m);
        let mut count = 0;
        for _ in 0..n {
            let i = self.sampler.draw_index(rng);
            if !seen.put(i) {
                count += 1;
                if count == m {
                    break;
                }
            }
        }
        seen
    }

    pub fn outcome(&self, seen: &FixedBitSet) -> TrialOutcome {
        let atoms = self.atoms();
        match &self.kind {
            Kind::Ranked { wrong, error } => match wrong.iter().position(|w| w.is_disjoint(seen)) {
                Some(i) => TrialOutcome { error: error[i], undefined: false },
                None => TrialOutcome { error: 0.0, undefined: true },
            },
            Kind::Threshold => {
                let t = seen.ones().map(|i| atoms[i].point).max().unwrap_or(0) + 1;
                let error = atoms.iter().filter(|a| (a.point >= t) != a.label).map(|a| a.p).sum();
                TrialOutcome { error, undefined: false }
            }
            Kind::Blocks { family, atom_block } => {
                // points of a block outside the support are never seen
                let mut seen_in = vec![0usize; family.blocks.len()];
                for i in seen.ones() {
                    if let Some(b) = atom_block[i] {
                        seen_in[b] += 1;
                    }
                }
                match family.choose(|b| family.blocks[b].len() - seen_in[b]) {
                    Some(b) => {
                        let error = (0..atoms.len())
                            .filter(|&i| atom_block[i] == Some(b) && !seen.contains(i))
                            .map(|i| atoms[i].p)
                            .sum();
                        TrialOutcome { error, undefined: false }
                    }
                    None => TrialOutcome { error: 0.0, undefined: true },
                }
            }
        }
    }

    pub fn trial(&self, n: usize, seed: u64, trial: usize) -> TrialOutcome {
        let mut rng = trial_rng(seed, n, trial);
        self.outcome(&self.draw_seen(n, &mut rng))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub grid: Vec<usize>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub rule: String,
    pub distribution: Construction,
    /// Per grid point, trials where the rule had nothing to output.
    pub undefined: Vec<usize>,
}

fn summarize(xs: &[f64]) -> (f64, f64) {
    let t = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / t;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

/// Mean true error over `trials` independent samples at each grid size.
/// Trials run in parallel and are aggregated in index order.
pub fn estimate_curve(l: &Learner, grid: &[usize], trials: usize, seed: u64) -> Result<LearningCurve, CurveError> {
    if grid.is_empty() || trials == 0 {
        return Err(CurveError::Invalid("empty grid or zero trials".into()));
    }
    let mut curve = LearningCurve {
        grid: grid.to_vec(),
        mean: vec![],
        stderr: vec![],
        trials,
        seed,
        rule: l.rule.name().into(),
        distribution: l.distribution.clone(),
        undefined: vec![],
    };
    for &n in grid {
        let out: Vec<TrialOutcome> = (0..trials).into_par_iter().map(|t| l.trial(n, seed, t)).collect();
        let errs: Vec<f64> = out.iter().map(|o| o.error).collect();
        let (m, se) = summarize(&errs);
        curve.mean.push(m);
        curve.stderr.push(se);
        curve.undefined.push(out.iter().filter(|o| o.undefined).count());
    }
    Ok(curve)
}

/// Mean compression-set size of samples drawn with the same seeds as
/// `estimate_curve`. The second vector gives the fraction of exact searches.
pub fn compression_curve(
    c: &ConceptClass,
    p: &RealizableDistribution,
    grid: &[usize],
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<(LearningCurve, Vec<f64>), CurveError> {
    let sampler = Sampler::new(p)?;
    let mut curve = LearningCurve {
        grid: grid.to_vec(),
        mean: vec![],
        stderr: vec![],
        trials,
        seed,
        rule: "compression-size".into(),
        distribution: p.construction.clone(),
        undefined: vec![],
    };
    let mut exact = vec![];
    for &n in grid {
        let out = (0..trials)
            .into_par_iter()
            .map(|t| {
                let s = sampler.sample(n, &mut trial_rng(seed, n, t));
                compression_set(c, &s, budget).map(|cs| (cs.subset.len() as f64, cs.exact))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CurveError::Invalid(e.to_string()))?;
        let sizes: Vec<f64> = out.iter().map(|o| o.0).collect();
        let (m, se) = summarize(&sizes);
        curve.mean.push(m);
        curve.stderr.push(se);
        curve.undefined.push(0);
        exact.push(out.iter().filter(|o| o.1).count() as f64 / trials as f64);
    }
    Ok((curve, exact))
}

fn sig10(x: f64) -> String {
    format!("{x:.9e}")
}

impl LearningCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,mean,stderr,trials\n");
        for i in 0..self.grid.len() {
            s += &format!("{},{},{},{}\n", self.grid[i], sig10(self.mean[i]), sig10(self.stderr[i]), self.trials);
        }
        s
    }

    pub fn at(&self, n: usize) -> Option<(f64, f64)> {
        self.grid.iter().position(|&g| g == n).map(|i| (self.mean[i], self.stderr[i]))
    }
}

/// Worst-case error of the uniform distribution on m points labeled all-0
/// against m singletons: (1/m) P(some point unseen after n draws), from the
/// chain on the number of distinct points seen.
pub fn coupon_expectation(m: usize, n: usize) -> f64 {
    let mut dist = vec![0.0; m + 1];
    dist[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; m + 1];
        for (k, &q) in dist.iter().enumerate() {
            if q == 0.0 {
                continue;
            }
            let f = k as f64 / m as f64;
            next[k] += q * f;
            if k < m {
                next[k + 1] += q * (1.0 - f);
            }
        }
        dist = next;
    }
    (1.0 - dist[m]) / m as f64
}

/// Powers of two from 2^lo to 2^hi.
pub fn dyadic_grid(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub n: usize,
    /// mean(2n) / mean(n); None when mean(n) is 0.
    pub ratio: Option<f64>,
    pub stderr: Option<f64>,
}

/// Ratios mean(2n)/mean(n) for each n whose double is on the grid, with
/// delta-method standard errors treating the two means as independent.
pub fn ratio_diagnostic(c: &LearningCurve) -> Result<Vec<RatioPoint>, CurveError> {
    let mut out = vec![];
    for (i, &n) in c.grid.iter().enumerate() {
        let Some(j) = c.grid.iter().position(|&g| g == 2 * n) else { continue };
        let (a, sa, b, sb) = (c.mean[i], c.stderr[i], c.mean[j], c.stderr[j]);
        if a > 0.0 {
            let r = b / a;
            let se = ((sb / a).powi(2) + (r * sa / a).powi(2)).sqrt();
            out.push(RatioPoint { n, ratio: Some(r), stderr: Some(se) });
        } else {
            out.push(RatioPoint { n, ratio: None, stderr: None });
        }
    }
    if out.is_empty() {
        return Err(CurveError::Invalid("grid has no dyadic pairs".into()));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitCategory {
    Exponential,
    Linear,
    LogLinear,
    Slow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: FitCategory,
    pub log_scale: f64,
    /// Decay constant of the exponential model.
    pub rate: Option<f64>,
    pub rmse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub category: FitCategory,
    pub models: Vec<ModelFit>,
    pub notes: Vec<String>,
}

/// RMSE in log units above which no closed-form model is accepted.
pub const FIT_RESIDUAL: f64 = 0.3;
/// Ratio mean(2n)/mean(n) at the largest n below which decay counts as exponential.
pub const EXP_RATIO: f64 = 0.25;
/// Local log-log slope above which the tail counts as a plateau.
pub const PLATEAU_SLOPE: f64 = -0.5;

/// Least-squares fit of log mean(n) against
/// exp: log a - c n, linear: log a - log n, log-linear: log a + log log n - log n.
pub fn fit_category(curve: &LearningCurve) -> RateFit {
    let pts: Vec<(f64, f64)> = curve
        .grid
        .iter()
        .zip(&curve.mean)
        .filter(|(&n, &m)| n >= 2 && m > 0.0)
        .map(|(&n, &m)| (n as f64, m.ln()))
        .collect();
    let mut notes = vec![];
    if pts.len() < 4 {
        notes.push(format!("{} positive means; treated as exponential", pts.len()));
        return RateFit { category: FitCategory::Exponential, models: vec![], notes };
    }
    let k = pts.len() as f64;
    let one_param = |model: FitCategory, g: &dyn Fn(f64) -> f64| {
        let a = pts.iter().map(|&(n, y)| y - g(n)).sum::<f64>() / k;
        let rmse = (pts.iter().map(|&(n, y)| (y - a - g(n)).powi(2)).sum::<f64>() / k).sqrt();
        ModelFit { model, log_scale: a, rate: None, rmse }
    };
    let exp = {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let a = my - slope * mx;
        let rmse = (pts.iter().map(|&(n, y)| (y - a - slope * n).powi(2)).sum::<f64>() / k).sqrt();
        ModelFit { model: FitCategory::Exponential, log_scale: a, rate: Some(-slope), rmse }
    };
    let lin = one_param(FitCategory::Linear, &|n: f64| -n.ln());
    let loglin = one_param(FitCategory::LogLinear, &|n: f64| n.ln().ln() - n.ln());
    let models = vec![exp, lin, loglin];

    let last_ratio = ratio_diagnostic(curve).ok().and_then(|r| r.last().and_then(|p| p.ratio));
    let exp_ok = matches!(last_ratio, Some(r) if r < EXP_RATIO);
    if !exp_ok {
        notes.push(format!("exponential model rejected: ratio at largest n is {last_ratio:?}"));
    }
    let best = models
        .iter()
        .filter(|m| exp_ok || m.model != FitCategory::Exponential)
        .min_by(|a, b| a.rmse.total_cmp(&b.rmse))
        .unwrap();
    let mut category = best.model;
    if best.rmse > FIT_RESIDUAL {
        let h = pts.len() / 2;
        let (a, b) = (pts[h], pts[pts.len() - 1]);
        let slope = (b.1 - a.1) / (b.0.ln() - a.0.ln());
        notes.push(format!("best rmse {:.3}; tail log-log slope {slope:.3}", best.rmse));
        if slope > PLATEAU_SLOPE {
            category = FitCategory::Slow;
        }
    }
    RateFit { category, models, notes }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    /// scale / n^exponent
    Power { scale: f64, exponent: f64 },
    /// scale / (n + 1)
    InvNPlus1 { scale: f64 },
    /// scale * exp(-rate n)
    Exp { scale: f64, rate: f64 },
    /// Explicit values at listed n.
    Table { points: Vec<(usize, f64)> },
}

impl Envelope {
    pub fn at(&self, n: usize) -> Option<f64> {
        let x = n as f64;
        match self {
            Envelope::Power { scale, exponent } => Some(scale / x.powf(*exponent)),
            Envelope::InvNPlus1 { scale } => Some(scale / (x + 1.0)),
            Envelope::Exp { scale, rate } => Some(scale * (-rate * x).exp()),
            Envelope::Table { points } => points.iter().find(|p| p.0 == n).map(|p| p.1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantifier {
    ForAll,
    /// At least this fraction of the checked points.
    Fraction(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub name: String,
    pub side: Side,
    pub envelope: Envelope,
    pub quantifier: Quantifier,
    /// Multiples of the standard error granted as slack.
    pub slack: f64,
}

impl BoundSpec {
    pub fn new(name: &str, side: Side, envelope: Envelope, quantifier: Quantifier) -> Self {
        BoundSpec { name: name.into(), side, envelope, quantifier, slack: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub checks: Vec<BoundCheck>,
    pub fraction: f64,
    pub pass: bool,
}

/// Checks the envelope at every grid point where it is defined.
pub fn verify_bounds(curve: &LearningCurve, spec: &BoundSpec) -> BoundReport {
    let mut checks = vec![];
    for i in 0..curve.grid.len() {
        let n = curve.grid[i];
        let Some(bound) = spec.envelope.at(n) else { continue };
        let (m, se) = (curve.mean[i], curve.stderr[i]);
        let pass = match spec.side {
            Side::Upper => m <= bound + spec.slack * se,
            Side::Lower => m >= bound - spec.slack * se,
        };
        checks.push(BoundCheck { n, mean: m, stderr: se, bound, pass });
    }
    let ok = checks.iter().filter(|c| c.pass).count();
    let fraction = if checks.is_empty() { 0.0 } else { ok as f64 / checks.len() as f64 };
    let pass = !checks.is_empty()
        && match spec.quantifier {
            Quantifier::ForAll => ok == checks.len(),
            Quantifier::Fraction(f) => fraction >= f,
        };
    BoundReport { name: spec.name.clone(), checks, fraction, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classcat::catalog;
    use crate::dims::eluder_dim;
    use crate::distros::{geometric_eluder, uniform_singleton};

    fn synthetic(grid: &[usize], f: impl Fn(f64) -> f64) -> LearningCurve {
        LearningCurve {
            grid: grid.to_vec(),
            mean: grid.iter().map(|&n| f(n as f64)).collect(),
            stderr: vec![0.0; grid.len()],
            trials: 1,
            seed: 0,
            rule: "synthetic".into(),
            distribution: Construction { name: "none".into(), params: serde_json::Value::Null },
            undefined: vec![0; grid.len()],
        }
    }

    #[test]
    fn fits_synthetic_shapes() {
        let g = dyadic_grid(1, 5);
        assert_eq!(fit_category(&synthetic(&g, |n| 2f64.powf(-n))).category, FitCategory::Exponential);
        let g = dyadic_grid(2, 12);
        assert_eq!(fit_category(&synthetic(&g, |n| 1.0 / n)).category, FitCategory::Linear);
        assert_eq!(fit_category(&synthetic(&g, |n| n.log2() / n)).category, FitCategory::LogLinear);
        assert_eq!(fit_category(&synthetic(&g, |n| 1.0 / n.log2())).category, FitCategory::Slow);
        assert_eq!(fit_category(&synthetic(&[2, 4], |n| 1.0 / n)).category, FitCategory::Exponential);
    }

    #[test]
    fn ratios() {
        let c = synthetic(&[1, 2, 4, 5], |n| 1.0 / n);
        let r = ratio_diagnostic(&c).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].ratio, Some(0.5));
        assert!(ratio_diagnostic(&synthetic(&[3, 5], |n| n)).is_err());
    }

    #[test]
    fn seeds_are_stable() {
        assert_ne!(trial_seed(1, 4, 0), trial_seed(1, 4, 1));
        assert_ne!(trial_seed(1, 4, 0), trial_seed(1, 8, 0));
        assert_eq!(trial_seed(7, 4, 3), trial_seed(7, 4, 3));
    }

    #[test]
    fn coupon_curve() {
        let s = catalog("singletons-N", &[("m", 4)]).unwrap();
        let u = uniform_singleton(4).unwrap();
        let l = Learner::new(&s, &u, LearnerRule::Worst).unwrap();
        let c = estimate_curve(&l, &[0, 1, 2, 64], 2000, 5).unwrap();
        assert_eq!(c.mean[0], 0.25);
        assert_eq!(c.mean[1], 0.25);
        assert_eq!(c.mean[3], 0.0);
        let again = estimate_curve(&l, &[0, 1, 2, 64], 2000, 5).unwrap();
        assert_eq!(c, again);
        let best = estimate_curve(&Learner::new(&s, &u, LearnerRule::Best).unwrap(), &[3], 500, 5).unwrap();
        // every singleton errs on exactly one atom
        assert_eq!(best.mean[0], estimate_curve(&l, &[3], 500, 5).unwrap().mean[0]);
        assert!(c.to_csv().starts_with("n,mean,stderr,trials\n0,2.500000000e-1,"));
    }

    #[test]
    fn coupon_small() {
        assert_eq!(coupon_expectation(4, 0), 0.25);
        assert_eq!(coupon_expectation(4, 3), 0.25);
        // m=2, n=2: both seen with prob 1/2
        assert!((coupon_expectation(2, 2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn threshold_rule_matches_worst() {
        let t = catalog("thresholds-N", &[("m", 8)]).unwrap();
        let p = geometric_eluder(&t, &eluder_dim(&t, 10).unwrap().witness).unwrap();
        let a = Learner::new(&t, &p, LearnerRule::Worst).unwrap();
        let b = Learner::new(&t, &p, LearnerRule::Scripted(ScriptedRule::ThresholdMaxplus1)).unwrap();
        for n in [1, 3, 10] {
            for tr in 0..50 {
                assert_eq!(a.trial(n, 1, tr), b.trial(n, 1, tr));
            }
        }
    }

    #[test]
    fn bounds() {
        let c = synthetic(&[1, 2, 4], |n| 1.0 / n);
        let up = BoundSpec::new("u", Side::Upper, Envelope::Power { scale: 1.0, exponent: 1.0 }, Quantifier::ForAll);
        assert!(verify_bounds(&c, &up).pass);
        let low = BoundSpec::new("l", Side::Lower, Envelope::InvNPlus1 { scale: 1.8 }, Quantifier::Fraction(0.5));
        let r = verify_bounds(&c, &low);
        assert_eq!(r.fraction, 1.0 / 3.0);
        assert!(!r.pass);
        let tab = BoundSpec::new("t", Side::Upper, Envelope::Table { points: vec![(2, 0.4)] }, Quantifier::ForAll);
        let r = verify_bounds(&c, &tab);
        assert_eq!(r.checks.len(), 1);
        assert!(!r.pass);
    }
}
