//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Single 15-point Kronrod panel, returning `(estimate, error)`.
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the width of the initial panels.
    pub max_panel: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_panel: f64::INFINITY,
            max_depth: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over `[a, b]`. The interval is first cut into panels no
/// wider than `opts.max_panel` (oscillation-aware splitting), then each panel
/// is refined by recursive bisection until the local Kronrod error estimate
/// meets its share of the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let width = hi - lo;
    let panels = if opts.max_panel.is_finite() && opts.max_panel > 0.0 {
        ((width / opts.max_panel).ceil() as usize).clamp(1, 1 << 22)
    } else {
        1
    };
    let step = width / panels as f64;

    // First pass: coarse estimate to set the relative target.
    let mut coarse = Vec::with_capacity(panels);
    let mut total = 0.0;
    for i in 0..panels {
        let pa = lo + step * i as f64;
        let pb = if i + 1 == panels { hi } else { pa + step };
        let r = qk15(&f, pa, pb);
        total += r.0;
        coarse.push((pa, pb, r));
    }
    let target = opts.abs_tol.max(opts.rel_tol * total.abs());
    let per_width = target / width;

    let mut value = 0.0;
    let mut error = 0.0;
    let mut stack: Vec<(f64, f64, (f64, f64), u32)> = Vec::new();
    for (pa, pb, r) in coarse.into_iter().rev() {
        stack.push((pa, pb, r, 0));
    }
    let mut worst_unresolved = 0.0_f64;
    while let Some((pa, pb, (est, err), depth)) = stack.pop() {
        let allowed = per_width * (pb - pa);
        if err <= allowed || depth >= opts.max_depth || (pb - pa) < 1e-15 * width.max(1.0) {
            if err > allowed {
                worst_unresolved = worst_unresolved.max(err);
            }
            value += est;
            error += err;
            continue;
        }
        let mid = 0.5 * (pa + pb);
        let left = qk15(&f, pa, mid);
        let right = qk15(&f, mid, pb);
        stack.push((mid, pb, right, depth + 1));
        stack.push((pa, mid, left, depth + 1));
    }
    if !value.is_finite() {
        return Err(Error::numeric("non-finite integrand", f64::NAN));
    }
    if error > 10.0 * target && worst_unresolved > 0.0 {
        return Err(Error::numeric("quadrature did not converge", error));
    }
    Ok(QuadResult {
        value: sign * value,
        error,
    })
}
