//! The bump ψ(t) = exp(1 − 1/(1−t²)) and its tabulated cosine transform.

use std::sync::OnceLock;

use rayon::prelude::*;

/// ψ̂ is tabulated on [0, S_TABLE]; beyond that it is below 10⁻¹³ and
/// treated as zero (the envelope accounts for it).
pub const S_TABLE: f64 = 800.0;
const DS: f64 = 0.02;
const HALF_NODES: usize = 500;

pub fn psi(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// Derivatives ψ^{(0)}(u), …, ψ^{(k)}(u).
pub fn psi_derivs(k: usize, u: f64) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    if u.abs() >= 1.0 {
        return out;
    }
    // ψ = e^g with g = 1 − ½[1/(1−u) + 1/(1+u)]
    let a = 1.0 / (1.0 - u);
    let b = 1.0 / (1.0 + u);
    let mut g = vec![0.0; k + 1];
    let mut fact = 1.0;
    let (mut ap, mut bp) = (a, b);
    for (j, gj) in g.iter_mut().enumerate().skip(1) {
        fact *= j as f64;
        ap *= a;
        bp *= b;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *gj = -0.5 * fact * (ap + sign * bp);
    }
    out[0] = psi(u);
    for m in 1..=k {
        // ψ^{(m)} = Σ_j C(m−1, j) g^{(j+1)} ψ^{(m−1−j)}
        let mut s = 0.0;
        let mut c = 1.0;
        for j in 0..m {
            s += c * g[j + 1] * out[m - 1 - j];
            c = c * (m - 1 - j) as f64 / (j + 1) as f64;
        }
        out[m] = s;
    }
    out
}

/// Cached even cosine transform ψ̂(s) = ∫ψ(t)cos(st)dt.
#[derive(Debug, Clone)]
pub struct TestFunction {
    ds: f64,
    nodes: Vec<(f64, f64)>,
    h: f64,
    /// ψ̂, ψ̂′, ψ̂″ at s = k·ds.
    table: Vec<[f64; 3]>,
    envelope: Vec<f64>,
    tail_c: f64,
}

impl TestFunction {
    /// Shared instance, built on first use.
    pub fn shared() -> &'static TestFunction {
        static CELL: OnceLock<TestFunction> = OnceLock::new();
        CELL.get_or_init(|| TestFunction::build(DS, HALF_NODES))
    }

    /// Table with spacing `ds` from a trapezoid rule with `half_nodes` nodes on (0, 1).
    pub fn build(ds: f64, half_nodes: usize) -> Self {
        let h = 1.0 / half_nodes as f64;
        let nodes: Vec<(f64, f64)> = (1..half_nodes)
            .map(|j| {
                let t = j as f64 * h;
                (t, psi(t))
            })
            .filter(|&(_, p)| p > 0.0)
            .collect();
        let count = (S_TABLE / ds).round() as usize + 1;
        let table: Vec<[f64; 3]> = (0..count)
            .into_par_iter()
            .map(|k| trapezoid(&nodes, h, k as f64 * ds))
            .collect();

        // Bound on |ψ̂| over each cell, then suffix maxima.
        let mut cell: Vec<f64> = table
            .windows(2)
            .map(|w| {
                let f = w[0][0].abs().max(w[1][0].abs());
                let d = w[0][1].abs().max(w[1][1].abs());
                let dd = w[0][2].abs().max(w[1][2].abs());
                f + 0.5 * ds * d + 0.125 * ds * ds * dd
            })
            .collect();
        // Fit the asymptotic envelope C·s^{−3/4}·e^{−√s} on the upper half of the table.
        let mut tail_c = 0.0f64;
        for (k, b) in cell.iter().enumerate() {
            let s = k as f64 * ds;
            if s >= 0.5 * S_TABLE {
                tail_c = tail_c.max(b * s.powf(0.75) * s.sqrt().exp());
            }
        }
        tail_c *= 2.0;
        let beyond = tail_c * S_TABLE.powf(-0.75) * (-S_TABLE.sqrt()).exp();
        let mut run = beyond;
        for b in cell.iter_mut().rev() {
            run = run.max(*b);
            *b = run;
        }
        Self {
            ds,
            nodes,
            h,
            table,
            envelope: cell,
            tail_c,
        }
    }

    pub fn psi(&self, t: f64) -> f64 {
        psi(t)
    }

    /// ∫ψ, i.e. ψ̂(0).
    pub fn integral(&self) -> f64 {
        self.table[0][0]
    }

    /// ψ̂(s) by direct trapezoid summation (no table).
    pub fn hat_direct(&self, s: f64) -> f64 {
        trapezoid(&self.nodes, self.h, s)[0]
    }

    /// ψ̂(s) from the table; zero for |s| > S_TABLE.
    pub fn hat(&self, s: f64) -> f64 {
        let s = s.abs();
        let x = s / self.ds;
        let k = x.floor() as usize;
        if k + 1 >= self.table.len() {
            if k + 1 == self.table.len() && x <= k as f64 {
                return self.table[k][0];
            }
            return 0.0;
        }
        let u = x - k as f64;
        let [f0, d0, s0] = self.table[k];
        let [f1, d1, s1] = self.table[k + 1];
        quintic_hermite(u, self.ds, [f0, d0, s0], [f1, d1, s1])
    }

    /// sup_{|u| ≥ s} |ψ̂(u)|.
    pub fn envelope(&self, s: f64) -> f64 {
        let s = s.abs();
        let k = (s / self.ds).floor() as usize;
        if k < self.envelope.len() {
            self.envelope[k]
        } else {
            self.tail_c * s.powf(-0.75) * (-s.sqrt()).exp()
        }
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn spacing(&self) -> f64 {
        self.ds
    }
}

/// ψ̂, ψ̂′, ψ̂″ at s; ψ is flat at ±1 so the trapezoid rule is spectrally accurate.
fn trapezoid(nodes: &[(f64, f64)], h: f64, s: f64) -> [f64; 3] {
    let mut f = 0.5;
    let mut d = 0.0;
    let mut dd = 0.0;
    for &(t, p) in nodes {
        let (sn, cs) = (s * t).sin_cos();
        f += p * cs;
        d -= t * p * sn;
        dd -= t * t * p * cs;
    }
    // ψ(0) = 1 counted once; the symmetric half doubles the rest.
    [2.0 * h * f, 2.0 * h * d, 2.0 * h * dd]
}

fn quintic_hermite(u: f64, h: f64, a: [f64; 3], b: [f64; 3]) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h1 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    let g0 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let g1 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let k0 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let k1 = 0.5 * (u3 - 2.0 * u4 + u5);
    a[0] * h0 + b[0] * h1 + h * (a[1] * g0 + b[1] * g1) + h * h * (a[2] * k0 + b[2] * k1)
}
