//! One-command reproductions of the worked examples.

use std::fmt::Write as _;
use std::path::Path;

use ermrates::classcat::{catalog, ConceptClass};
use ermrates::curves::{coupon_expectation, dyadic_grid, verify_bounds, BoundReport, BoundSpec, Envelope, LearnerRule, Quantifier, Side};
use ermrates::dims::{compute_report, star_max, Center, DimensionReport, ReportOptions, SearchBudget, SearchStatus};
use ermrates::distros::{on_member, uniform_member, uniform_singleton, Rational};
use ermrates::erm::ScriptedRule;
use serde::Serialize;

use crate::specs::{parse_dist, DistSpec};
use crate::{run_curve, schedule_report, to_json, write_out, CliError, CurveReport, ScheduleReport};

pub struct BundleInfo {
    pub id: &'static str,
    pub catalog: &'static str,
    pub title: &'static str,
}

pub const REGISTRY: &[BundleInfo] = &[
    BundleInfo { id: "1.2", catalog: "powerset", title: "finite class, exponential rate" },
    BundleInfo { id: "1.3", catalog: "thresholds-N", title: "thresholds on N, linear rate" },
    BundleInfo { id: "1.4", catalog: "singletons-N", title: "singletons, log(n)/n rate" },
    BundleInfo { id: "1.5", catalog: "ex-B5-blocks", title: "half-size block class, arbitrarily slow rate" },
    BundleInfo { id: "1.7", catalog: "halfspaces-circle", title: "halfspaces on points of the circle" },
    BundleInfo { id: "B.1", catalog: "powerset", title: "finite class, explicit exponential bound" },
    BundleInfo { id: "B.2", catalog: "thresholds-N", title: "thresholds under geometric masses" },
    BundleInfo { id: "B.3", catalog: "thresholds-N", title: "thresholds, ERM attaining the linear rate" },
    BundleInfo { id: "B.4", catalog: "singletons-N", title: "singletons under the uniform distribution" },
    BundleInfo { id: "B.5", catalog: "ex-B5-blocks", title: "scheduled blocks, lower bound R(n_t)" },
    BundleInfo { id: "B.6", catalog: "thresholds-N", title: "eluder sequence without a Littlestone tree" },
    BundleInfo { id: "B.7", catalog: "ex-B7", title: "star-eluder sequence from singleton blocks" },
    BundleInfo { id: "B.8", catalog: "ex-B8", title: "VC-eluder sequence from full blocks" },
    BundleInfo { id: "B.9", catalog: "ex-B9", title: "large star sets, no long star-eluder sequence" },
    BundleInfo { id: "B.10", catalog: "ex-B10", title: "star number and star-eluder sequence at different centers" },
    BundleInfo { id: "C.2", catalog: "ex-C2", title: "VC dimension d+1 with VC-eluder dimension 1" },
    BundleInfo { id: "C.5", catalog: "ex-C5", title: "constant-size blocks nested upward" },
    BundleInfo { id: "C.6", catalog: "ex-C6", title: "constant-size full blocks nested upward" },
];

#[derive(Clone, Copy, Debug)]
pub struct BundleConfig {
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BundleSummary {
    pub id: String,
    pub title: String,
    pub dims: Vec<DimensionReport>,
    pub curve: Option<CurveReport>,
    pub bounds: Vec<BoundReport>,
    pub schedule: Option<ScheduleReport>,
    pub notes: Vec<String>,
}

impl BundleSummary {
    pub fn pass(&self) -> bool {
        self.bounds.iter().all(|b| b.pass) && self.schedule.as_ref().map_or(true, |s| s.pass)
    }

    pub fn text(&self) -> String {
        let mut s = format!("{} {}\n", self.id, self.title);
        for d in &self.dims {
            let _ = writeln!(
                s,
                "{} [{} points, {} members]: vc={} star={} eluder={} littlestone={} se-depth={} vce-depth={}{}",
                d.class,
                d.horizon_params.domain_size,
                d.horizon_params.hypotheses,
                d.vc,
                d.star_global,
                d.eluder,
                d.littlestone,
                d.se_depth(),
                d.vce_depth(),
                if d.at_cap.is_empty() { String::new() } else { format!(" (at cap: {})", d.at_cap.join(", ")) }
            );
            for (c, v) in &d.star_centered {
                let _ = writeln!(s, "  star at {c}: {v}");
            }
            for e in d.se_evidence.iter().map(|e| ("se", e)).chain(d.vce_evidence.iter().map(|e| ("vce", e))) {
                let _ = writeln!(s, "  {} {} {}: depth {}/{} {:?}", e.0, e.1.center, e.1.variant, e.1.depth, e.1.requested, e.1.status);
            }
        }
        if let Some(c) = &self.curve {
            let _ = writeln!(s, "curve: rule {}, {} trials, seed {}, fit {:?}", c.curve.rule, c.curve.trials, c.curve.seed, c.fit.category);
        }
        for b in &self.bounds {
            let _ = writeln!(s, "bound {}: {} ({:.3} of points)", b.name, if b.pass { "PASS" } else { "FAIL" }, b.fraction);
        }
        if let Some(r) = &self.schedule {
            let _ = writeln!(s, "schedule {}: n={:?} k={:?} conditions {}", r.schedule.rate, r.schedule.n, r.schedule.k, if r.pass { "PASS" } else { "FAIL" });
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// The worked examples are small enough to search without branching truncation.
fn base_opts() -> ReportOptions {
    ReportOptions { budget: SearchBudget { branching_cap: 100_000, node_cap: 5_000_000 }, ..ReportOptions::default() }
}

fn cls(id: &str, params: &[(&str, i64)]) -> Result<ConceptClass, CliError> {
    catalog(id, params).map_err(|e| CliError::BadInput(e.to_string()))
}

fn report(c: &ConceptClass, opts: &ReportOptions) -> Result<DimensionReport, CliError> {
    compute_report(c, opts).map_err(|e| CliError::BadInput(e.to_string()))
}

fn star_at(c: &ConceptClass, center: &Center) -> Result<usize, CliError> {
    Ok(star_max(c, Some(center), c.domain.len()).map_err(|e| CliError::BadInput(e.to_string()))?.value)
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn bad(e: impl ToString) -> CliError {
    CliError::BadInput(e.to_string())
}

fn empty(id: &str, title: &str) -> BundleSummary {
    BundleSummary { id: id.into(), title: title.into(), dims: vec![], curve: None, bounds: vec![], schedule: None, notes: vec![] }
}

/// Upper bound star/(n+1) from the compression-set argument.
fn star_bound(star: usize) -> BoundSpec {
    BoundSpec::new(
        &format!("upper {star}/(n+1) from star number of the target"),
        Side::Upper,
        Envelope::InvNPlus1 { scale: star as f64 },
        Quantifier::ForAll,
    )
}

fn finite_class(cfg: BundleConfig, s: &mut BundleSummary) -> Result<(), CliError> {
    let c = cls("powerset", &[("n", 3)])?;
    s.dims.push(report(&c, &base_opts())?);
    let dist = on_member(&c, 2, vec![(0, rat(1, 2)), (1, rat(1, 4)), (2, rat(1, 4))]).map_err(bad)?;
    let min_err = c
        .hypotheses
        .iter()
        .map(|h| ermrates::erm::true_error(h, &c.domain, &dist).unwrap())
        .filter(|&e| e > 0.0)
        .fold(f64::INFINITY, f64::min);
    let d = DistSpec { dist, family: None };
    let curve = run_curve(&c, &d, LearnerRule::Worst, &dyadic_grid(0, 6), cfg.trials, cfg.seed)?;
    let b = BoundSpec::new(
        &format!("upper {}*exp(-{min_err}n)", c.len()),
        Side::Upper,
        Envelope::Exp { scale: c.len() as f64, rate: min_err },
        Quantifier::ForAll,
    );
    s.bounds.push(verify_bounds(&curve, &b));
    s.curve = Some(CurveReport::new(curve));
    Ok(())
}

fn thresholds_geometric(cfg: BundleConfig, s: &mut BundleSummary) -> Result<(), CliError> {
    let c = cls("thresholds-N", &[("m", 30)])?;
    s.dims.push(report(&cls("thresholds-N", &[("m", 12)])?, &ReportOptions { cap: 12, ..base_opts() })?);
    let d = parse_dist("geometric", &c)?;
    let curve = run_curve(&c, &d, LearnerRule::Worst, &dyadic_grid(4, 10), cfg.trials, cfg.seed)?;
    s.bounds.push(verify_bounds(
        &curve,
        &BoundSpec::new("upper 1/(n+1)", Side::Upper, Envelope::InvNPlus1 { scale: 1.0 }, Quantifier::ForAll),
    ));
    let mut low = BoundSpec::new(
        "lower 1/(18n) on half the grid",
        Side::Lower,
        Envelope::Power { scale: 1.0 / 18.0, exponent: 1.0 },
        Quantifier::Fraction(0.5),
    );
    low.slack = 0.0;
    s.bounds.push(verify_bounds(&curve, &low));
    s.notes.push("thresholds truncated to m=30 points; geometric masses 2^-t on the eluder sequence".into());
    s.curve = Some(CurveReport::new(curve));
    Ok(())
}

/// Two-sided target: the threshold at the middle of the domain.
fn thresholds_two_sided(cfg: BundleConfig, s: &mut BundleSummary) -> Result<(), CliError> {
    let c = cls("thresholds-N", &[("m", 30)])?;
    s.dims.push(report(&cls("thresholds-N", &[("m", 12)])?, &ReportOptions { cap: 12, ..base_opts() })?);
    let d = parse_dist("uniform-member:h=15", &c)?;
    let curve = run_curve(&c, &d, LearnerRule::Worst, &dyadic_grid(2, 10), cfg.trials, cfg.seed)?;
    s.bounds.push(verify_bounds(
        &curve,
        &BoundSpec::new("upper 2/n", Side::Upper, Envelope::Power { scale: 2.0, exponent: 1.0 }, Quantifier::ForAll),
    ));
    s.notes.push("uniform over 30 points labeled by the threshold at 16; the curve flattens to 0 once every point is seen".into());
    s.curve = Some(CurveReport::new(curve));
    Ok(())
}

fn singletons_uniform(cfg: BundleConfig, s: &mut BundleSummary) -> Result<(), CliError> {
    let m = 64;
    let c = cls("singletons-N", &[("m", m as i64)])?;
    let mut opts = base_opts();
    opts.centers = vec![Center::AllZero];
    s.dims.push(report(&cls("singletons-N", &[("m", 15)])?, &opts)?);
    let d = DistSpec { dist: uniform_singleton(m).map_err(bad)?, family: None };
    let grid = dyadic_grid(4, 14);
    let curve = run_curve(&c, &d, LearnerRule::Worst, &grid, cfg.trials, cfg.seed)?;
    let exact: Vec<(usize, f64)> = grid.iter().map(|&n| (n, coupon_expectation(m, n))).collect();
    for side in [Side::Upper, Side::Lower] {
        let b = BoundSpec::new(
            &format!("{side:?} exact expectation").to_lowercase(),
            side,
            Envelope::Table { points: exact.clone() },
            Quantifier::ForAll,
        );
        s.bounds.push(verify_bounds(&curve, &b));
    }
    s.notes.push("the all-0 target is not a member of the truncated class; trials that collect every point have an empty version space and count as error 0".into());
    s.curve = Some(CurveReport::new(curve));
    Ok(())
}

fn slow_blocks(cfg: BundleConfig, s: &mut BundleSummary) -> Result<(), CliError> {
    let c = cls("ex-B5-blocks", &[("i_max", 3)])?;
    s.dims.push(report(&c, &base_opts())?);
    let d = parse_dist("b5-design:t_max=4", &c)?;
    let n_t: Vec<usize> = (1..=4).map(|t| 1usize << (2 * (t + 2))).collect();
    let curve = run_curve(&c, &d, LearnerRule::Scripted(ScriptedRule::B5MinConsistentBlock), &n_t, cfg.trials, cfg.seed)?;
    let r = n_t.iter().map(|&n| (n, 1.0 / (n as f64).sqrt())).collect();
    s.bounds.push(verify_bounds(
        &curve,
        &BoundSpec::new("lower R(n_t)=n_t^-1/2", Side::Lower, Envelope::Table { points: r }, Quantifier::ForAll),
    ));
    s.schedule = Some(schedule_report("inv-sqrt-n", 4, 1 << 20)?);
    s.notes.push("curve uses the structural block design (blocks of 2^(t+6) points, n_t = 4^(t+2)); the enumerated class is a truncation used for dimensions only".into());
    s.curve = Some(CurveReport::new(curve));
    Ok(())
}

fn circle(cfg: BundleConfig, s: &mut BundleSummary) -> Result<(), CliError> {
    let c = cls("halfspaces-circle", &[("n", 16)])?;
    let mut opts = base_opts();
    opts.se_blocks = 3;
    opts.vce_blocks = 2;
    s.dims.push(report(&c, &opts)?);
    let h0 = (0..c.len()).find(|&h| c.hypotheses[h].table.count_ones(..) == 0).ok_or_else(|| bad("no empty halfspace"))?;
    let d = DistSpec { dist: uniform_member(&c, h0).map_err(bad)?, family: None };
    let curve = run_curve(&c, &d, LearnerRule::Worst, &dyadic_grid(2, 12), cfg.trials, cfg.seed)?;
    s.bounds.push(verify_bounds(&curve, &star_bound(star_at(&c, &Center::Hyp(h0))?)));
    s.curve = Some(CurveReport::new(curve));
    Ok(())
}

fn block_star(cfg: BundleConfig, s: &mut BundleSummary) -> Result<(), CliError> {
    let c = cls("ex-B7", &[("k_max", 6)])?;
    s.dims.push(report(&c, &base_opts())?);
    let d = parse_dist("block-star:t_max=4", &c)?;
    let curve = run_curve(&c, &d, LearnerRule::Worst, &dyadic_grid(1, 10), cfg.trials, cfg.seed)?;
    s.bounds.push(verify_bounds(&curve, &star_bound(star_at(&c, &Center::AllZero)?)));
    s.curve = Some(CurveReport::new(curve));
    Ok(())
}

fn dims_only(c: ConceptClass, opts: ReportOptions, s: &mut BundleSummary) -> Result<(), CliError> {
    s.dims.push(report(&c, &opts)?);
    Ok(())
}

fn growth(id: &str, ks: &[i64], s: &mut BundleSummary) -> Result<(), CliError> {
    let mut opts = base_opts();
    opts.se_blocks = 3;
    opts.vce_blocks = 3;
    for &k in ks {
        s.dims.push(report(&cls(id, &[("k_max", k)])?, &opts)?);
    }
    let cl = ermrates::dims::classify_rate(&s.dims);
    s.notes.push(format!("classification across truncations: {:?} ({})", cl.category, cl.label));
    Ok(())
}

pub fn run_bundle(id: &str, cfg: BundleConfig) -> Result<BundleSummary, CliError> {
    let info = REGISTRY.iter().find(|b| b.id == id).ok_or_else(|| bad(format!("unknown example id `{id}`")))?;
    let mut s = empty(info.id, info.title);
    match id {
        "1.2" | "B.1" => finite_class(cfg, &mut s)?,
        "1.3" | "B.2" => thresholds_geometric(cfg, &mut s)?,
        "B.3" => thresholds_two_sided(cfg, &mut s)?,
        "1.4" | "B.4" => singletons_uniform(cfg, &mut s)?,
        "1.5" | "B.5" => slow_blocks(cfg, &mut s)?,
        "1.7" => circle(cfg, &mut s)?,
        "B.6" => dims_only(cls("thresholds-N", &[("m", 12)])?, ReportOptions { cap: 12, ..base_opts() }, &mut s)?,
        "B.7" => block_star(cfg, &mut s)?,
        "B.8" => growth("ex-B8", &[3, 5], &mut s)?,
        "B.9" => growth("ex-B9", &[3, 5], &mut s)?,
        "B.10" => dims_only(cls("ex-B10", &[("k_max", 5)])?, base_opts(), &mut s)?,
        "C.2" | "C.5" | "C.6" => {
            let cat = info.catalog;
            let (d, k) = if cat == "ex-C2" { (3, 4) } else { (2, 4) };
            let opts = ReportOptions { d_variants: vec![2], vce_blocks: 2, se_blocks: 3, ..base_opts() };
            dims_only(cls(cat, &[("d", d), ("k_max", k)])?, opts, &mut s)?;
            for e in s.dims[0].vce_evidence.iter().filter(|e| e.variant == "d=2") {
                let what = match e.status {
                    SearchStatus::Refuted => "refuted",
                    SearchStatus::Complete => "found",
                    SearchStatus::BudgetExhausted => "undecided",
                };
                s.notes.push(format!("depth-{} VC-eluder prefix with blocks of 2 at {}: {what}", e.requested, e.center));
            }
        }
        _ => unreachable!(),
    }
    Ok(s)
}

/// Runs a bundle and writes its files into `out`.
pub fn cmd_reproduce(id: &str, cfg: BundleConfig, out: &Path) -> Result<BundleSummary, CliError> {
    let s = run_bundle(id, cfg)?;
    for (i, d) in s.dims.iter().enumerate() {
        let name = if i == 0 { "dims.json".to_string() } else { format!("dims-{i}.json") };
        write_out(out, &name, &to_json(d))?;
    }
    if let Some(c) = &s.curve {
        write_out(out, "curve.csv", &c.curve.to_csv())?;
        write_out(out, "fit.json", &to_json(c))?;
    }
    write_out(out, "bounds.json", &to_json(&s.bounds))?;
    if let Some(r) = &s.schedule {
        write_out(out, "schedule.json", &to_json(r))?;
    }
    write_out(out, "summary.txt", &s.text())?;
    if s.dims.iter().any(|d| d.budget_exhausted()) {
        return Err(CliError::Budget("a prefix search hit its node or branching cap".into()));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ermrates::classcat::CATALOG_IDS;
    use std::collections::BTreeSet;

    #[test]
    fn registry_covers_catalog() {
        let covered: BTreeSet<&str> = REGISTRY.iter().map(|b| b.catalog).collect();
        let all: BTreeSet<&str> = CATALOG_IDS.iter().copied().collect();
        assert_eq!(covered, all);
        let ids: BTreeSet<&str> = REGISTRY.iter().map(|b| b.id).collect();
        assert_eq!(ids.len(), REGISTRY.len());
        assert!(run_bundle("1.6", BundleConfig { trials: 1, seed: 0 }).is_err());
    }
}
