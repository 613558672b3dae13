//! Fuchsian group presentations and built-in presets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::isometry::{hyp_distance_unchecked, Isometry};
use super::word::Word;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Free,
    Surface,
}

/// Fundamental polygon data: the Dirichlet domain of `center`, whose side
/// pairings are the generators, fits in the ball of radius `circumradius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub center: Complex64,
    pub circumradius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    pub generators: Vec<Isometry>,
    pub relation: Option<Word>,
    pub kind: GroupKind,
    /// Smallest generator translation length.
    pub min_translation: f64,
    pub domain: Option<Domain>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub center: [f64; 2],
    pub circumradius: f64,
}

/// JSON form of a presentation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub generators: Vec<[[f64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Vec<i32>>,
    pub kind: GroupKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
}

impl GroupPresentation {
    pub fn new(
        generators: Vec<Isometry>,
        relation: Option<Word>,
        kind: GroupKind,
        domain: Option<Domain>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Validation("no generators".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if !g.is_hyperbolic() {
                return Err(Error::Validation(format!(
                    "generator {} has |trace| = {} <= 2",
                    i + 1,
                    g.trace().abs()
                )));
            }
        }
        if let Some(w) = &relation {
            if w.max_generator() > generators.len() {
                return Err(Error::Validation("relation uses an unknown generator".into()));
            }
            let err = evaluate(&generators, w).distance_to_identity();
            if !(err < 1e-8) {
                return Err(Error::Validation(format!(
                    "relation evaluates {err:e} away from the identity"
                )));
            }
        }
        if kind == GroupKind::Surface && relation.is_none() {
            return Err(Error::Validation("surface group needs a relation".into()));
        }
        if let Some(d) = &domain {
            if !(d.center.im > 0.0 && d.circumradius > 0.0 && d.circumradius.is_finite()) {
                return Err(Error::Validation("invalid domain".into()));
            }
        }
        let min_translation = generators
            .iter()
            .map(Isometry::translation_length)
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            generators,
            relation,
            kind,
            min_translation,
            domain,
        })
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        let generators = spec
            .generators
            .iter()
            .map(|r| Isometry::from_rows(*r))
            .collect::<Result<Vec<_>>>()?;
        let relation = spec.relation.clone().map(Word::new).transpose()?;
        let domain = spec.domain.as_ref().map(|d| Domain {
            center: Complex64::new(d.center[0], d.center[1]),
            circumradius: d.circumradius,
        });
        Self::new(generators, relation, spec.kind, domain)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: GroupSpec =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("group preset: {e}")))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            generators: self
                .generators
                .iter()
                .map(|g| {
                    let [a, b, c, d] = g.entries();
                    [[a, b], [c, d]]
                })
                .collect(),
            relation: self.relation.as_ref().map(|w| w.letters.clone()),
            kind: self.kind,
            domain: self.domain.map(|d| DomainSpec {
                center: [d.center.re, d.center.im],
                circumradius: d.circumradius,
            }),
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Generator or inverse for a signed letter.
    pub fn letter(&self, l: i32) -> Isometry {
        let g = self.generators[(l.unsigned_abs() - 1) as usize];
        if l > 0 {
            g
        } else {
            g.inverse()
        }
    }

    pub fn letters(&self) -> Vec<i32> {
        let g = self.generators.len() as i32;
        (1..=g).flat_map(|i| [i, -i]).collect()
    }

    pub fn evaluate(&self, w: &Word) -> Isometry {
        evaluate(&self.generators, w)
    }

    /// Δ = max over generators and inverses of d(y, g·y).
    pub fn max_displacement(&self, y: Complex64) -> f64 {
        self.letters()
            .into_iter()
            .map(|l| hyp_distance_unchecked(y, self.letter(l).apply(y)))
            .fold(0.0, f64::max)
    }

    /// Genus-2 surface group of the regular hyperbolic octagon, centred at i.
    pub fn octagon() -> Result<Self> {
        let s2 = std::f64::consts::SQRT_2;
        let alpha = 1.0 + s2;
        let beta = (2.0 + 2.0 * s2).sqrt();
        let mut generators = Vec::with_capacity(4);
        for k in 0..4 {
            let th = k as f64 * std::f64::consts::FRAC_PI_4;
            // disk matrix [[α, βe^{iθ}], [βe^{-iθ}, α]] conjugated to the half-plane
            let e = Complex64::from_polar(beta, th);
            let m = from_disk(Complex64::new(alpha, 0.0), e, e.conj(), Complex64::new(alpha, 0.0))?;
            generators.push(m);
        }
        let relation = Word::new(vec![1, -2, 3, -4, -1, 2, -3, 4])?;
        let domain = Domain {
            center: Complex64::new(0.0, 1.0),
            circumradius: (alpha * alpha).acosh(),
        };
        Self::new(generators, Some(relation), GroupKind::Surface, Some(domain))
    }

    /// Two-generator Schottky group: A of trace 3 and its rotation by π/2 about i.
    pub fn schottky() -> Result<Self> {
        let s = 1.25f64.sqrt();
        let a = Isometry::new(1.5, s, s, 1.5)?;
        let h = std::f64::consts::FRAC_PI_4;
        let r = Isometry::new(h.cos(), h.sin(), -h.sin(), h.cos())?;
        let b = r.mul(&a).mul(&r.inverse());
        Self::new(vec![a, b], None, GroupKind::Free, None)
    }
}

fn evaluate(gens: &[Isometry], w: &Word) -> Isometry {
    w.letters.iter().fold(Isometry::IDENTITY, |acc, &l| {
        let g = gens[(l.unsigned_abs() - 1) as usize];
        acc.mul(&if l > 0 { g } else { g.inverse() })
    })
}

/// C⁻¹·G·C with C = [[1, −i], [1, i]]/√(2i), which must come out real.
fn from_disk(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Isometry> {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let s = (2.0 * i).sqrt();
    let cm = [one / s, -i / s, one / s, i / s];
    // inverse of a determinant-one matrix
    let ci = [cm[3], -cm[1], -cm[2], cm[0]];
    let mul = |x: [Complex64; 4], y: [Complex64; 4]| {
        [
            x[0] * y[0] + x[1] * y[2],
            x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3],
        ]
    };
    let m = mul(mul(ci, [a, b, c, d]), cm);
    if m.iter().any(|v| v.im.abs() > 1e-12 * (1.0 + v.re.abs())) {
        return Err(Error::Validation("disk matrix is not in SU(1,1)".into()));
    }
    Isometry::new(m[0].re, m[1].re, m[2].re, m[3].re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn octagon_valid() {
        let g = GroupPresentation::octagon().unwrap();
        for h in &g.generators {
            assert_relative_eq!(h.trace(), 2.0 * (1.0 + std::f64::consts::SQRT_2), max_relative = 1e-14);
        }
        assert_relative_eq!(g.domain.unwrap().circumradius, 2.448452447678, epsilon = 1e-9);
        // round-trip through JSON
        let back = GroupPresentation::from_json(&serde_json::to_string(&g.to_spec()).unwrap()).unwrap();
        assert_eq!(back.generators, g.generators);
    }

    #[test]
    fn tampered_relation_rejected() {
        let mut spec = GroupPresentation::octagon().unwrap().to_spec();
        spec.generators[0][0][1] += 1e-6;
        spec.generators[0][1][1] += 1e-6 * spec.generators[0][1][0] / spec.generators[0][0][0];
        let err = GroupPresentation::from_spec(&spec);
        assert!(err.is_err(), "{err:?}");
        let mut spec = GroupPresentation::octagon().unwrap().to_spec();
        spec.relation = Some(vec![1, 2, 3, 4, -1, -2, -3, -4]);
        assert!(matches!(GroupPresentation::from_spec(&spec), Err(Error::Validation(_))));
    }

    #[test]
    fn elliptic_generator_rejected() {
        let spec = GroupSpec {
            generators: vec![[[0.0, -1.0], [1.0, 0.0]]],
            relation: None,
            kind: GroupKind::Free,
            domain: None,
        };
        assert!(GroupPresentation::from_spec(&spec).is_err());
    }

    #[test]
    fn schottky_lengths() {
        let g = GroupPresentation::schottky().unwrap();
        assert_relative_eq!(g.min_translation, 2.0 * 1.5f64.acosh(), max_relative = 1e-12);
        assert_relative_eq!(g.generators[1].trace(), 3.0, max_relative = 1e-14);
    }
}
