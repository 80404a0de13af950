//! Brute-force reference implementations used only by tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use ermrates::classcat::ConceptClass;
use ermrates::distros::Rational;
use num::{BigInt, ToPrimitive};

/// Label rows, one per hypothesis, indexed by domain position.
pub fn rows(c: &ConceptClass) -> Vec<Vec<bool>> {
    c.hypotheses.iter().map(|h| (0..c.domain.len()).map(|p| h.at(p)).collect()).collect()
}

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn patterns(rows: &[Vec<bool>], s: &[usize]) -> HashSet<Vec<bool>> {
    rows.iter().map(|r| s.iter().map(|&p| r[p]).collect()).collect()
}

pub fn naive_vc(rows: &[Vec<bool>], n: usize) -> usize {
    (0u32..1 << n)
        .filter(|&m| patterns(rows, &members(m, n)).len() == 1 << m.count_ones())
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Largest S such that each x in S has a row differing from `center` on S exactly at x.
pub fn naive_star_centered(rows: &[Vec<bool>], n: usize, center: &[bool]) -> usize {
    let mut best = 0;
    for m in 0u32..1 << n {
        let s = members(m, n);
        let ok = s.iter().all(|&x| rows.iter().any(|r| s.iter().all(|&p| (r[p] != center[p]) == (p == x))));
        if ok {
            best = best.max(s.len());
        }
    }
    best
}

/// Largest star set over all center labelings of the set.
pub fn naive_star_global(rows: &[Vec<bool>], n: usize) -> usize {
    let mut best = 0;
    for m in 0u32..1 << n {
        let s = members(m, n);
        if s.len() <= best {
            continue;
        }
        let pats = patterns(rows, &s);
        let found = (0u32..1 << s.len()).any(|y| {
            (0..s.len()).all(|i| {
                let flipped: Vec<bool> = (0..s.len()).map(|j| (y >> j & 1 == 1) != (i == j)).collect();
                pats.contains(&flipped)
            })
        });
        if found {
            best = s.len();
        }
    }
    best
}

fn split(rows: &[Vec<bool>], v: &[usize], x: usize, y: bool) -> Vec<usize> {
    v.iter().copied().filter(|&h| rows[h][x] == y).collect()
}

fn eluder_rec(rows: &[Vec<bool>], n: usize, v: Vec<usize>, memo: &mut HashMap<Vec<usize>, usize>) -> usize {
    if let Some(&e) = memo.get(&v) {
        return e;
    }
    let mut best = 0;
    for x in 0..n {
        let (a, b) = (split(rows, &v, x, false), split(rows, &v, x, true));
        if a.is_empty() || b.is_empty() {
            continue;
        }
        // the label must be realizable and contradicted by some member
        best = best.max(1 + eluder_rec(rows, n, a, memo));
        best = best.max(1 + eluder_rec(rows, n, b, memo));
    }
    memo.insert(v, best);
    best
}

pub fn naive_eluder(rows: &[Vec<bool>], n: usize) -> usize {
    eluder_rec(rows, n, (0..rows.len()).collect(), &mut HashMap::new())
}

fn ld_rec(rows: &[Vec<bool>], n: usize, v: Vec<usize>, memo: &mut HashMap<Vec<usize>, usize>) -> usize {
    if let Some(&e) = memo.get(&v) {
        return e;
    }
    let mut best = 0;
    for x in 0..n {
        let (a, b) = (split(rows, &v, x, false), split(rows, &v, x, true));
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let d = 1 + ld_rec(rows, n, a, memo).min(ld_rec(rows, n, b, memo));
        best = best.max(d);
    }
    memo.insert(v, best);
    best
}

pub fn naive_littlestone(rows: &[Vec<bool>], n: usize) -> usize {
    ld_rec(rows, n, (0..rows.len()).collect(), &mut HashMap::new())
}

/// Largest number of restriction patterns over subsets of size k.
pub fn growth(rows: &[Vec<bool>], n: usize, k: usize) -> usize {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| patterns(rows, &members(m, n)).len()).max().unwrap_or(0)
}

pub fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact expected worst-case error by enumerating every sequence of n
/// atom draws. Atoms are (domain position, label, mass); an empty version
/// space counts as error 0.
pub fn enumerate_worst(rows: &[Vec<bool>], atoms: &[(usize, bool, f64)], n: usize) -> f64 {
    let k = atoms.len();
    let err = |r: &Vec<bool>| atoms.iter().filter(|a| r[a.0] != a.1).map(|a| a.2).sum::<f64>();
    let worst: Vec<f64> = (0u32..1 << k)
        .map(|seen| {
            rows.iter()
                .filter(|r| (0..k).all(|i| seen >> i & 1 == 0 || r[atoms[i].0] == atoms[i].1))
                .map(err)
                .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.max(e))))
                .unwrap_or(0.0)
        })
        .collect();
    fn walk(depth: usize, n: usize, seen: u32, p: f64, atoms: &[(usize, bool, f64)], worst: &[f64]) -> f64 {
        if depth == n {
            return p * worst[seen as usize];
        }
        atoms.iter().enumerate().map(|(i, a)| walk(depth + 1, n, seen | 1 << i, p * a.2, atoms, worst)).sum()
    }
    walk(0, n, 0, 1.0, atoms, &worst)
}

/// (1/m) P(some point unseen) by inclusion-exclusion in exact arithmetic.
pub fn coupon_inclusion_exclusion(m: usize, n: usize) -> f64 {
    let mut total = Rational::from_integer(BigInt::from(0));
    let mut binom = BigInt::from(1);
    for j in 1..=m {
        binom = binom * BigInt::from(m - j + 1) / BigInt::from(j);
        let term = Rational::new(binom.clone() * BigInt::from(m - j).pow(n as u32), BigInt::from(m).pow(n as u32));
        if j % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    (total / Rational::from_integer(BigInt::from(m))).to_f64().unwrap()
}
