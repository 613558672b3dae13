//! Orbit enumeration {ω·y : d(x, ω·y) ≤ T} and the sums S_{x,y}(T).

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::group::GroupPresentation;
use super::isometry::{hyp_distance, hyp_distance_unchecked, Isometry};
use super::word::Word;
use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::models::{g_density, CurvatureSign};

const KEY_STEP: f64 = 1e-8;
const KEY_RECHECK: f64 = 1e-10;

/// Default cap on stored group elements.
pub const DEFAULT_ORBIT_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub word: Word,
    pub matrix: Isometry,
    pub point: [f64; 2],
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct Orbit {
    /// Sorted by distance, then matrix entries.
    pub entries: Vec<OrbitEntry>,
    pub t: f64,
    pub x: Complex64,
    pub y: Complex64,
    /// Prune slack beyond T used by the search.
    pub margin: f64,
    /// Elements stored during the search.
    pub visited: usize,
}

impl Orbit {
    pub fn count_within(&self, t: f64) -> usize {
        self.entries.partition_point(|e| e.distance <= t)
    }
}

#[derive(Clone, Copy)]
pub(crate) struct Node {
    pub m: Isometry,
    pub parent: u32,
    pub letter: i32,
    pub dist: f64,
}

/// Dedup table keyed by rounded canonical entries, with neighbour probing
/// for entries near a rounding boundary.
#[derive(Default)]
pub(crate) struct ElementTable {
    pub nodes: Vec<Node>,
    map: HashMap<[i64; 4], Vec<u32>>,
}

impl ElementTable {
    fn keys(m: &Isometry) -> Vec<[i64; 4]> {
        let mut out = vec![[0i64; 4]];
        for (j, v) in m.entries().iter().enumerate() {
            let s = v / KEY_STEP;
            let r = s.round();
            let frac = s - s.floor();
            let alt = if (frac - 0.5).abs() < 1e-2 {
                Some(if r > s { r - 1.0 } else { r + 1.0 })
            } else {
                None
            };
            let n = out.len();
            for k in 0..n {
                out[k][j] = r as i64;
                if let Some(a) = alt {
                    let mut c = out[k];
                    c[j] = a as i64;
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn find(&self, m: &Isometry) -> Option<u32> {
        let tol = KEY_RECHECK * m.scale();
        for k in Self::keys(m) {
            if let Some(list) = self.map.get(&k) {
                for &i in list {
                    if self.nodes[i as usize].m.max_diff(m) <= tol {
                        return Some(i);
                    }
                }
            }
        }
        None
    }

    pub fn insert(&mut self, node: Node) -> u32 {
        let i = self.nodes.len() as u32;
        let key = Self::keys(&node.m)[0];
        self.map.entry(key).or_default().push(i);
        self.nodes.push(node);
        i
    }

    pub fn word(&self, mut i: u32) -> Word {
        let mut letters = Vec::new();
        while i != 0 {
            let n = &self.nodes[i as usize];
            letters.push(n.letter);
            i = n.parent;
        }
        letters.reverse();
        Word { letters }
    }
}

/// Breadth-first search over right multiplication by generators, keeping
/// elements with d(x, ω·y) ≤ radius.
pub(crate) fn bfs(
    group: &GroupPresentation,
    x: Complex64,
    y: Complex64,
    radius: f64,
    cap: usize,
) -> Result<ElementTable> {
    let letters: Vec<(i32, Isometry)> = group.letters().into_iter().map(|l| (l, group.letter(l))).collect();
    let mut table = ElementTable::default();
    table.insert(Node {
        m: Isometry::IDENTITY,
        parent: 0,
        letter: 0,
        dist: hyp_distance_unchecked(x, y),
    });
    let mut queue = VecDeque::from([0u32]);
    while let Some(i) = queue.pop_front() {
        let node = table.nodes[i as usize];
        for &(l, g) in &letters {
            if l == -node.letter {
                continue;
            }
            let m = node.m.mul(&g);
            let dist = hyp_distance_unchecked(x, m.apply(y));
            if dist > radius || table.find(&m).is_some() {
                continue;
            }
            if table.nodes.len() >= cap {
                return Err(Error::Resource(format!(
                    "orbit enumeration exceeded {cap} elements; partial results discarded"
                )));
            }
            let j = table.insert(Node {
                m,
                parent: i,
                letter: l,
                dist,
            });
            queue.push_back(j);
        }
    }
    Ok(table)
}

/// Prune slack guaranteeing completeness.
///
/// With a Dirichlet domain F of circumradius R about c, every ω with
/// d(x, ω·y) ≤ T is reached through prefixes within T + R + 2d(c,x) + 2d(c,y).
/// Without one the slack is 2Δ.
pub fn prune_margin(group: &GroupPresentation, x: Complex64, y: Complex64) -> f64 {
    match group.domain {
        Some(d) => {
            d.circumradius + 2.0 * hyp_distance_unchecked(d.center, x) + 2.0 * hyp_distance_unchecked(d.center, y)
        }
        None => 2.0 * group.max_displacement(y),
    }
}

pub fn orbit_enumerate(group: &GroupPresentation, x: Complex64, y: Complex64, t: f64, cap: usize) -> Result<Orbit> {
    hyp_distance(x, y)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("T must be positive"));
    }
    let margin = prune_margin(group, x, y);
    let table = bfs(group, x, y, t + margin, cap)?;
    let mut entries: Vec<OrbitEntry> = table
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.dist <= t)
        .map(|(i, n)| {
            let p = n.m.apply(y);
            OrbitEntry {
                word: table.word(i as u32),
                matrix: n.m,
                point: [p.re, p.im],
                distance: n.dist,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| cmp_entries(&a.matrix, &b.matrix))
    });
    Ok(Orbit {
        entries,
        t,
        x,
        y,
        margin,
        visited: table.nodes.len(),
    })
}

fn cmp_entries(a: &Isometry, b: &Isometry) -> std::cmp::Ordering {
    let (a, b) = (a.entries(), b.entries());
    a.iter()
        .zip(&b)
        .map(|(u, v)| u.total_cmp(v))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn s_term(r: f64, n: usize, k: f64) -> Result<f64> {
    if r < 1e-12 {
        return Err(Error::domain("x coincides with an orbit point of y"));
    }
    let g = g_density(CurvatureSign::Negative, k, n, r)?;
    Ok(1.0 / (g * r.powi(n as i32 - 1)).sqrt())
}

/// S(T) = Σ_{r_ω ≤ T} 1/√(g(r_ω) r_ω^{n−1}) over the whole orbit.
pub fn s_sum(orbit: &Orbit, n: usize, k: f64) -> Result<f64> {
    s_sum_to(orbit, n, k, orbit.t)
}

/// S at a cutoff T ≤ orbit.t.
pub fn s_sum_to(orbit: &Orbit, n: usize, k: f64, t: f64) -> Result<f64> {
    if t > orbit.t {
        return Err(Error::domain("cutoff beyond the enumerated radius"));
    }
    let mut s = 0.0;
    for e in &orbit.entries[..orbit.count_within(t)] {
        s += s_term(e.distance, n, k)?;
    }
    Ok(s)
}

/// Exponent fit of log y(T) against T on a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub intercept: f64,
    pub residual: f64,
    pub window: (f64, f64),
    pub fit_points: usize,
}

/// Weighted LSQ of log values vs T; weights are the counts behind each value.
pub fn growth_fit(ts: &[f64], values: &[f64], counts: &[f64], window: (f64, f64)) -> Result<GrowthFit> {
    let (mut xs, mut ys, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..ts.len() {
        if ts[i] >= window.0 && ts[i] <= window.1 && values[i] > 0.0 && counts[i] > 0.0 {
            xs.push(ts[i]);
            ys.push(values[i].ln());
            ws.push(counts[i]);
        }
    }
    if xs.len() < 3 {
        return Err(Error::domain("growth fit needs at least 3 grid points in the window"));
    }
    let LineFit {
        slope,
        intercept,
        slope_stderr,
        residual,
        points,
    } = fit_line(&xs, &ys, Some(&ws))?;
    Ok(GrowthFit {
        exponent: slope,
        exponent_stderr: slope_stderr,
        intercept,
        residual,
        window,
        fit_points: points,
    })
}

/// Default fit window [3ℓ_min, T_max], or the whole grid when that leaves
/// fewer than five points.
pub fn default_window(ts: &[f64], min_translation: f64) -> (f64, f64) {
    let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = 3.0 * min_translation;
    if ts.iter().filter(|&&t| t >= lo).count() >= 5 {
        (lo, hi)
    } else {
        (ts.iter().copied().fold(f64::INFINITY, f64::min), hi)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SGrowthReport {
    pub t: Vec<f64>,
    pub counts: Vec<usize>,
    pub s: Vec<f64>,
    pub s_fit: GrowthFit,
    pub count_fit: GrowthFit,
    /// s_fit.exponent / count_fit.exponent.
    pub ratio: f64,
}

/// S(T) and orbit counts on a grid, with exponent fits.
pub fn s_growth_from_orbit(
    orbit: &Orbit,
    n: usize,
    k: f64,
    grid: &[f64],
    window: Option<(f64, f64)>,
    min_translation: f64,
) -> Result<SGrowthReport> {
    let mut counts = Vec::with_capacity(grid.len());
    let mut s = Vec::with_capacity(grid.len());
    for &t in grid {
        counts.push(orbit.count_within(t));
        s.push(s_sum_to(orbit, n, k, t)?);
    }
    let window = window.unwrap_or_else(|| default_window(grid, min_translation));
    let cf: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let s_fit = growth_fit(grid, &s, &cf, window)?;
    let count_fit = growth_fit(grid, &cf, &cf, window)?;
    let ratio = s_fit.exponent / count_fit.exponent;
    Ok(SGrowthReport {
        t: grid.to_vec(),
        counts,
        s,
        s_fit,
        count_fit,
        ratio,
    })
}

pub fn s_growth(
    group: &GroupPresentation,
    x: Complex64,
    y: Complex64,
    grid: &[f64],
    window: Option<(f64, f64)>,
    cap: usize,
) -> Result<SGrowthReport> {
    let t_max = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let orbit = orbit_enumerate(group, x, y, t_max, cap)?;
    s_growth_from_orbit(&orbit, 2, 1.0, grid, window, group.min_translation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_only_below_first_return() {
        let g = GroupPresentation::octagon().unwrap();
        let x = c(0.05, 1.1);
        let o = orbit_enumerate(&g, x, x, 0.5, 1000).unwrap();
        assert_eq!(o.entries.len(), 1);
        assert!(o.entries[0].word.is_empty());
    }

    #[test]
    fn relator_is_identity() {
        let g = GroupPresentation::octagon().unwrap();
        let m = g.evaluate(g.relation.as_ref().unwrap());
        let table = bfs(&g, c(0.0, 1.0), c(0.0, 1.0), 0.1, 10).unwrap();
        assert_eq!(table.find(&m), Some(0));
    }

    #[test]
    fn single_entry_sum() {
        let o = Orbit {
            entries: vec![OrbitEntry {
                word: Word::default(),
                matrix: Isometry::IDENTITY,
                point: [0.0, 1.0],
                distance: 2.0,
            }],
            t: 3.0,
            x: c(0.0, 1.0),
            y: c(0.0, 1.0),
            margin: 0.0,
            visited: 1,
        };
        assert_relative_eq!(s_sum(&o, 2, 1.0).unwrap(), 1.0 / 2f64.sinh().sqrt(), max_relative = 1e-14);
        let mut z = o.clone();
        z.entries[0].distance = 0.0;
        assert!(s_sum(&z, 2, 1.0).is_err());
    }

    #[test]
    fn entries_match_distance() {
        let g = GroupPresentation::octagon().unwrap();
        let (x, y) = (c(0.1, 0.9), c(-0.2, 1.3));
        let o = orbit_enumerate(&g, x, y, 6.0, 100_000).unwrap();
        for e in &o.entries {
            let p = c(e.point[0], e.point[1]);
            assert!((hyp_distance(x, p).unwrap() - e.distance).abs() < 1e-10);
            let m = g.evaluate(&e.word);
            assert!(m.max_diff(&e.matrix) < 1e-9 * m.scale());
        }
        // no duplicate elements
        for w in o.entries.windows(2) {
            assert!(w[0].matrix.max_diff(&w[1].matrix) > 1e-6);
        }
    }

    #[test]
    fn bad_inputs() {
        let g = GroupPresentation::schottky().unwrap();
        assert!(orbit_enumerate(&g, c(0.0, -1.0), c(0.0, 1.0), 1.0, 10).is_err());
        assert!(orbit_enumerate(&g, c(0.0, 1.0), c(0.0, 1.0), 0.0, 10).is_err());
        assert!(matches!(
            orbit_enumerate(&g, c(0.0, 1.0), c(0.1, 1.0), 8.0, 10),
            Err(Error::Resource(_))
        ));
    }
}
