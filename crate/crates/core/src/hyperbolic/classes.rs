//! Conjugacy classes of hyperbolic elements (closed geodesics) and the
//! closed-geodesic sums.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::group::{GroupKind, GroupPresentation};
use super::isometry::Isometry;
use super::orbit::{bfs, growth_fit, GrowthFit};
use super::word::Word;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjClass {
    pub representative: Word,
    pub length: f64,
    pub primitive: bool,
    /// Distinct group elements among the cyclic shifts of the representative.
    pub shift_count: usize,
    /// Primitivity could not be decided at tolerance; excluded from sums.
    pub ambiguous: bool,
}

pub fn conj_classes(group: &GroupPresentation, t_len: f64, cap: usize) -> Result<Vec<ConjClass>> {
    if !(t_len > 0.0 && t_len.is_finite()) {
        return Err(Error::domain("T_len must be positive"));
    }
    let mut out = match group.kind {
        GroupKind::Free => free_classes(group, t_len, cap)?,
        GroupKind::Surface => surface_classes(group, t_len, cap)?,
    };
    out.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.representative.cmp(&b.representative)));
    Ok(out)
}

/// Cyclically reduced words of length L in canonical (least) rotation.
fn canonical_cyclic_words(rank: usize, len: usize, f: &mut dyn FnMut(&Word)) {
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|i| [i, -i]).collect();
    let mut buf = Vec::with_capacity(len);
    fn rec(letters: &[i32], len: usize, buf: &mut Vec<i32>, f: &mut dyn FnMut(&Word)) {
        if buf.len() == len {
            if len > 1 && buf[0] == -buf[len - 1] {
                return;
            }
            let w = Word { letters: buf.clone() };
            if w.min_rotation() == w {
                f(&w);
            }
            return;
        }
        for &l in letters {
            if let Some(&p) = buf.last() {
                if p == -l {
                    continue;
                }
            }
            // least rotation starts with a least letter
            if let Some(&first) = buf.first() {
                if l < first {
                    continue;
                }
            }
            buf.push(l);
            rec(letters, len, buf, f);
            buf.pop();
        }
    }
    rec(&letters, len, &mut buf, f);
}

fn free_classes(group: &GroupPresentation, t_len: f64, cap: usize) -> Result<Vec<ConjClass>> {
    let mut out = Vec::new();
    let mut seen = 0usize;
    let mut above = 0;
    for len in 1.. {
        let mut min_len = f64::INFINITY;
        let mut err = None;
        canonical_cyclic_words(group.rank(), len, &mut |w| {
            seen += 1;
            if seen > cap {
                err = Some(Error::Resource(format!("class enumeration exceeded {cap} words")));
                return;
            }
            let l = group.evaluate(w).translation_length();
            min_len = min_len.min(l);
            if l <= t_len && l > 0.0 {
                let primitive = w.is_primitive();
                out.push(ConjClass {
                    representative: w.clone(),
                    length: l,
                    primitive,
                    shift_count: w.period(),
                    ambiguous: false,
                });
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        // translation length grows with cyclic word length in a Schottky group
        above = if min_len > t_len { above + 1 } else { 0 };
        if above >= 2 {
            break;
        }
    }
    Ok(out)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Half-planes {k : k·v ≤ h} cutting out the Dirichlet domain in the Klein
/// disk about the centre.
fn klein_halfplanes(group: &GroupPresentation, c: Complex64) -> Vec<(Complex64, f64)> {
    group
        .letters()
        .into_iter()
        .map(|l| {
            let q = group.letter(l).apply(c);
            let k = to_klein(q, c);
            let q0 = 1.0 / (1.0 - k.norm_sqr()).sqrt();
            (k * q0, q0 - 1.0)
        })
        .collect()
}

fn to_klein(p: Complex64, c: Complex64) -> Complex64 {
    let w = (p - c) / (p - c.conj());
    w * 2.0 / (1.0 + w.norm_sqr())
}

fn boundary_point(xi: Option<f64>, c: Complex64) -> Complex64 {
    match xi {
        None => Complex64::new(1.0, 0.0),
        Some(x) => {
            let z = Complex64::new(x, 0.0);
            let w = (z - c) / (z - c.conj());
            w / w.norm()
        }
    }
}

/// Does the axis of g meet the closed domain (with slack)?
fn axis_meets(g: &Isometry, planes: &[(Complex64, f64)], c: Complex64) -> bool {
    let Some((p, q)) = g.fixed_points() else {
        return false;
    };
    let (w1, w2) = (boundary_point(p, c), boundary_point(q, c));
    let dir = w2 - w1;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for &(v, h) in planes {
        let a = w1.re * v.re + w1.im * v.im;
        let b = dir.re * v.re + dir.im * v.im;
        let rhs = h + 1e-9 * (1.0 + h) - a;
        if b.abs() < 1e-300 {
            if rhs < 0.0 {
                return false;
            }
        } else if b > 0.0 {
            hi = hi.min(rhs / b);
        } else {
            lo = lo.max(rhs / b);
        }
    }
    lo <= hi
}

/// Classes of a surface group with a Dirichlet domain F about c.
///
/// Every class with ℓ ≤ T has representatives whose axis meets F; these lie
/// within 2·asinh(cosh R · sinh(T/2)) of c, and consecutive tiles along the
/// axis link them by conjugation with single generators.
fn surface_classes(group: &GroupPresentation, t_len: f64, cap: usize) -> Result<Vec<ConjClass>> {
    let dom = group
        .domain
        .ok_or_else(|| Error::Unsupported("surface-group classes need a fundamental domain".into()))?;
    let c = dom.center;
    let reach = 2.0 * (dom.circumradius.cosh() * (t_len / 2.0).sinh()).asinh() + 1e-9;
    let table = bfs(group, c, c, reach + dom.circumradius, cap)?;
    let planes = klein_halfplanes(group, c);
    let tl = t_len * (1.0 + 1e-12);

    let members: Vec<u32> = (0..table.nodes.len() as u32)
        .filter(|&i| {
            let n = &table.nodes[i as usize];
            let l = n.m.translation_length();
            n.dist <= reach && l > 0.0 && l <= tl && axis_meets(&n.m, &planes, c)
        })
        .collect();
    let pos: HashMap<u32, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut uf = UnionFind((0..members.len()).collect());
    let gens: Vec<Isometry> = group.letters().into_iter().map(|l| group.letter(l)).collect();
    for (k, &i) in members.iter().enumerate() {
        let m = table.nodes[i as usize].m;
        for g in &gens {
            let conj = g.inverse().mul(&m).mul(g);
            if let Some(j) = table.find(&conj).and_then(|j| pos.get(&j)) {
                uf.union(k, *j);
            }
        }
    }

    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..members.len() {
        let r = uf.find(k);
        comps.entry(r).or_default().push(k);
    }
    let mut classes = Vec::with_capacity(comps.len());
    let mut comp_of = vec![0usize; members.len()];
    for (ci, (_, ks)) in comps.iter().enumerate() {
        for &k in ks {
            comp_of[k] = ci;
        }
        let words: Vec<Word> = ks.iter().map(|&k| table.word(members[k])).collect();
        let best = words
            .iter()
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
            .unwrap();
        let rep = best.cyclic_reduce().min_rotation();
        let m = group.evaluate(&rep);
        classes.push(ConjClass {
            shift_count: distinct_shifts(group, &rep),
            representative: rep,
            length: m.translation_length(),
            primitive: true,
            ambiguous: false,
        });
    }

    // powers β^k share the axis of β, so they are members whenever kℓ ≤ T
    let mut done = vec![false; classes.len()];
    for (k, &i) in members.iter().enumerate() {
        let ci = comp_of[k];
        if done[ci] {
            continue;
        }
        done[ci] = true;
        let beta = table.nodes[i as usize].m;
        let l = classes[ci].length;
        let mut p = beta;
        let mut e = 2;
        while e as f64 * l <= tl {
            p = p.mul(&beta);
            match table.find(&p).and_then(|j| pos.get(&j)) {
                Some(&j) => classes[comp_of[j]].primitive = false,
                None => classes[ci].ambiguous = true,
            }
            e += 1;
        }
    }
    Ok(classes)
}

fn distinct_shifts(group: &GroupPresentation, w: &Word) -> usize {
    let mut mats: Vec<Isometry> = Vec::new();
    for k in 0..w.len() {
        let m = group.evaluate(&w.rotate(k));
        if !mats.iter().any(|o| o.max_diff(&m) <= 1e-9 * m.scale()) {
            mats.push(m);
        }
    }
    mats.len()
}

/// Σ ℓ·e^{−(n−1)Kℓ/2} over primitive, unambiguous classes with ℓ ≤ T,
/// optionally weighted by shift count.
pub fn geodesic_sum(classes: &[ConjClass], t: f64, k: f64, n: usize, weighted: bool) -> f64 {
    classes
        .iter()
        .filter(|c| c.primitive && !c.ambiguous && c.length <= t)
        .map(|c| {
            let w = if weighted { c.shift_count as f64 } else { 1.0 };
            w * c.length * (-(n as f64 - 1.0) * k * c.length / 2.0).exp()
        })
        .sum()
}

pub fn primitive_count(classes: &[ConjClass], t: f64) -> usize {
    classes
        .iter()
        .filter(|c| c.primitive && !c.ambiguous && c.length <= t)
        .count()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicGrowthReport {
    pub t: Vec<f64>,
    pub sums: Vec<f64>,
    pub primitive_counts: Vec<usize>,
    pub sum_fit: GrowthFit,
    /// Fit of log(π(T)·T) against T; slope estimates h.
    pub count_fit: GrowthFit,
}

pub fn geodesic_growth(
    classes: &[ConjClass],
    grid: &[f64],
    k: f64,
    n: usize,
    window: (f64, f64),
) -> Result<GeodesicGrowthReport> {
    let sums: Vec<f64> = grid.iter().map(|&t| geodesic_sum(classes, t, k, n, false)).collect();
    let primitive_counts: Vec<usize> = grid.iter().map(|&t| primitive_count(classes, t)).collect();
    let w: Vec<f64> = primitive_counts.iter().map(|&c| c as f64).collect();
    let scaled: Vec<f64> = w.iter().zip(grid).map(|(c, t)| c * t).collect();
    Ok(GeodesicGrowthReport {
        sum_fit: growth_fit(grid, &sums, &w, window)?,
        count_fit: growth_fit(grid, &scaled, &w, window)?,
        t: grid.to_vec(),
        sums,
        primitive_counts,
    })
}
