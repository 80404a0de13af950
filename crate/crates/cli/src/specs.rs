//! Class and distribution specifications, from files or inline strings.

use std::collections::BTreeMap;
use std::path::Path;

use ermrates::classcat::{build_catalog_class, ConceptClass, PointId};
use ermrates::dims::{eluder_dim, se_prefix, vce_prefix, BlockSchedule, Center, SearchBudget};
use ermrates::distros::{
    b5_design, block_star_eluder, geometric_eluder, slow_distribution, slow_schedule, two_point_pair, uniform_member,
    uniform_singleton, RateTable, RealizableDistribution,
};
use ermrates::erm::BlockFamily;
use serde::Deserialize;

use crate::CliError;

#[derive(Deserialize)]
#[serde(untagged)]
enum ClassFile {
    Catalog { catalog: String, #[serde(default)] params: BTreeMap<String, i64> },
    Explicit { points: Vec<PointId>, rows: Vec<Vec<u8>> },
}

fn bad(e: impl ToString) -> CliError {
    CliError::BadInput(e.to_string())
}

/// `id:k=v,k=v` into the id and its parameters.
pub fn split_inline(s: &str) -> (&str, Vec<(&str, &str)>) {
    let (id, rest) = s.split_once(':').unwrap_or((s, ""));
    let kv = rest.split(',').filter(|x| !x.is_empty()).map(|x| x.split_once('=').unwrap_or((x, ""))).collect();
    (id, kv)
}

/// A class spec is a JSON file (`{"catalog": id, "params": {..}}` or
/// `{"points": [..], "rows": [[0,1,..], ..]}`) or an inline `id:k=v,..`.
pub fn parse_class(spec: &str) -> Result<ConceptClass, CliError> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| bad(format!("{spec}: {e}")))?;
        return match serde_json::from_str::<ClassFile>(&text).map_err(bad)? {
            ClassFile::Catalog { catalog, params } => build_catalog_class(&catalog, &params).map_err(bad),
            ClassFile::Explicit { points, rows } => ConceptClass::explicit(points, &rows).map_err(bad),
        };
    }
    let (id, kv) = split_inline(spec);
    let params = kv
        .into_iter()
        .map(|(k, v)| Ok((k.to_string(), v.parse::<i64>().map_err(|_| bad(format!("parameter {k}={v}")))?)))
        .collect::<Result<BTreeMap<_, _>, CliError>>()?;
    build_catalog_class(id, &params).map_err(bad)
}

/// A distribution together with the block family the scripted block rule
/// should use, when the distribution comes from the structural design.
pub struct DistSpec {
    pub dist: RealizableDistribution,
    pub family: Option<BlockFamily>,
}

fn get<'a>(kv: &[(&str, &'a str)], key: &str) -> Option<&'a str> {
    kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn get_num(kv: &[(&str, &str)], key: &str, default: Option<usize>) -> Result<usize, CliError> {
    match get(kv, key) {
        Some(v) => v.parse().map_err(|_| bad(format!("parameter {key}={v}"))),
        None => default.ok_or_else(|| bad(format!("missing parameter {key}"))),
    }
}

/// A distribution spec is a JSON file holding a distribution, or one of the
/// constructors:
/// `geometric`, `uniform-singleton:m=M`, `uniform-member:h=I`,
/// `block-star:t_max=T[,center=C]`, `two-point[:which=0|1]`,
/// `slow:rate=R,t_max=T[,center=C]`, `b5-design:t_max=T`.
pub fn parse_dist(spec: &str, c: &ConceptClass) -> Result<DistSpec, CliError> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| bad(format!("{spec}: {e}")))?;
        let dist: RealizableDistribution = serde_json::from_str(&text).map_err(bad)?;
        dist.validate().map_err(bad)?;
        return Ok(DistSpec { dist, family: None });
    }
    let (id, kv) = split_inline(spec);
    let center = || Center::parse(get(&kv, "center").unwrap_or("all0")).map_err(bad);
    let dist = match id {
        "geometric" => {
            let w = eluder_dim(c, c.domain.len()).map_err(bad)?.witness;
            geometric_eluder(c, &w).map_err(bad)?
        }
        "uniform-singleton" => uniform_singleton(get_num(&kv, "m", None)?).map_err(bad)?,
        "uniform-member" => uniform_member(c, get_num(&kv, "h", Some(0))?).map_err(bad)?,
        "block-star" => {
            let t = get_num(&kv, "t_max", None)?;
            let r = se_prefix(c, &center()?, &BlockSchedule::Strong, t, SearchBudget::default()).map_err(bad)?;
            if r.depth < t {
                return Err(bad(format!("class has a star-eluder prefix of only {} blocks", r.depth)));
            }
            block_star_eluder(c, &r.witness, t).map_err(bad)?
        }
        "two-point" => {
            let (a, b) = two_point_pair(c).map_err(bad)?;
            if get_num(&kv, "which", Some(0))? == 0 {
                a
            } else {
                b
            }
        }
        "slow" => {
            let t = get_num(&kv, "t_max", None)?;
            let rate = get(&kv, "rate").unwrap_or("inv-sqrt-n");
            let table = RateTable::named(rate, 1 << 20).ok_or_else(|| bad(format!("unknown rate {rate}")))?;
            let sched = slow_schedule(&table, t).map_err(bad)?;
            let r = vce_prefix(c, &center()?, &BlockSchedule::Sizes(sched.k.clone()), t, SearchBudget::default())
                .map_err(bad)?;
            if r.depth < t {
                return Err(bad(format!("class has a VC-eluder prefix of only {} blocks", r.depth)));
            }
            slow_distribution(c, &r.witness, &sched).map_err(bad)?.0
        }
        "b5-design" => {
            let (d, dist) = b5_design(get_num(&kv, "t_max", None)?).map_err(bad)?;
            let min = d.blocks.iter().map(|b| b.len() / 2).collect();
            return Ok(DistSpec { dist, family: Some(BlockFamily { blocks: d.blocks, min }) });
        }
        _ => return Err(bad(format!("unknown distribution `{spec}`"))),
    };
    Ok(DistSpec { dist, family: None })
}

/// `16,32,64` or a dyadic range `2^4..2^10`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>, CliError> {
    let grid: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let exp = |x: &str| x.trim().strip_prefix("2^").and_then(|e| e.parse::<u32>().ok());
        match (exp(a), exp(b)) {
            (Some(lo), Some(hi)) if lo <= hi && hi < 40 => (lo..=hi).map(|e| 1usize << e).collect(),
            _ => return Err(bad(format!("grid `{s}`"))),
        }
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad(format!("grid `{s}`")))).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("grid must be non-empty and increasing"));
    }
    Ok(grid)
}
