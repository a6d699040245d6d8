//! Bounded enumeration of model elements and recovery of realized fusion.

use std::collections::{BTreeSet, HashMap};

use super::amalgam::AmalgamModel;
use super::{Model, ModelWord, Presentation, Syllable};
use crate::error::ModelError;
use crate::fusion::FusionSystem;
use crate::group::{Elem, InjHom};

/// Largest supported ball radius.
pub const MAX_RADIUS: usize = 8;

/// Equality oracle for enumerated elements.
enum Dedup {
    /// Exact keys from the HNN normal form.
    Hnn(HashMap<super::hnn::HnnNormalForm, ()>),
    /// Buckets by leaf sequence, compared pairwise by the word problem.
    Amalgam(HashMap<Vec<usize>, Vec<usize>>),
}

/// Reduced syllable lists of every element within `radius` letters.
fn ball_syllables(m: &Model, radius: usize) -> Result<Vec<Vec<Syllable>>, ModelError> {
    if radius > MAX_RADIUS {
        return Err(ModelError::RadiusBoundExceeded { radius, bound: MAX_RADIUS });
    }
    let alphabet: Vec<Syllable> = match m {
        Model::Hnn(h) => h
            .base()
            .elements()
            .skip(1)
            .map(|element| Syllable::Element { factor: 0, element })
            .chain((0..h.stable_letters()).flat_map(|index| {
                [Syllable::Stable { index, exponent: 1 }, Syllable::Stable { index, exponent: -1 }]
            }))
            .collect(),
        Model::Amalgam(a) => a
            .factors()
            .iter()
            .enumerate()
            .flat_map(|(factor, g)| g.elements().skip(1).map(move |element| Syllable::Element { factor, element }))
            .collect(),
    };
    let mut dedup = match m {
        Model::Hnn(_) => Dedup::Hnn(HashMap::new()),
        Model::Amalgam(_) => Dedup::Amalgam(HashMap::new()),
    };
    let mut elements: Vec<Vec<Syllable>> = Vec::new();
    let mut admit = |cand: Vec<Syllable>, elements: &mut Vec<Vec<Syllable>>| match &mut dedup {
        Dedup::Hnn(seen) => {
            let h = match m {
                Model::Hnn(h) => h,
                Model::Amalgam(_) => unreachable!(),
            };
            if seen.insert(h.normal_form(&cand), ()).is_none() {
                elements.push(cand);
            }
        }
        Dedup::Amalgam(buckets) => {
            let bucket = buckets.entry(AmalgamModel::leaf_sequence(&cand)).or_default();
            let inv = m.invert(&cand);
            let known = bucket.iter().any(|&j| {
                let mut w = elements[j].clone();
                w.extend_from_slice(&inv);
                m.reduce(&w).is_empty()
            });
            if !known {
                bucket.push(elements.len());
                elements.push(cand);
            }
        }
    };
    admit(Vec::new(), &mut elements);
    let mut frontier = 0..elements.len();
    for _ in 0..radius {
        let start = elements.len();
        for i in frontier.clone() {
            for &a in &alphabet {
                let mut w = elements[i].clone();
                w.push(a);
                let cand = m.reduce(&w);
                admit(cand, &mut elements);
            }
        }
        frontier = start..elements.len();
    }
    Ok(elements)
}

/// Distinct elements within `radius` letters, as reduced words in discovery order.
pub fn ball_enumerate(m: &Presentation, radius: usize) -> Result<Vec<ModelWord>, ModelError> {
    let engine = m.engine()?;
    Ok(ball_syllables(engine, radius)?.iter().map(|s| m.to_word(s)).collect())
}

/// The fusion system generated by conjugations `c_g(x) = g x g⁻¹` by ball
/// elements that carry a subgroup of the base back into it.
pub fn recover_fusion(m: &Presentation, radius: usize) -> Result<FusionSystem, ModelError> {
    let engine = m.engine()?;
    let base = engine.base().clone();
    let p = engine.p();
    let lattice = crate::fusion::SubgroupLattice::new(&base, p)?;
    let ball = ball_syllables(engine, radius)?;
    let mut maps = BTreeSet::new();
    for g in &ball {
        let g_inv = engine.invert(g);
        let mut image_of = HashMap::new();
        let mut conj = |x: Elem| -> Option<Elem> {
            *image_of.entry(x).or_insert_with(|| {
                let mut w = g.clone();
                w.push(engine.base_syllable(x));
                w.extend_from_slice(&g_inv);
                engine.as_base_element(&engine.reduce(&w))
            })
        };
        for sub in lattice.subgroups() {
            let images: Option<Vec<Elem>> = sub.elements().iter().map(|&x| conj(x)).collect();
            if let Some(images) = images {
                maps.insert(InjHom { source: sub.clone(), target: base.whole(), images });
            }
        }
    }
    let maps: Vec<InjHom> = maps.into_iter().collect();
    Ok(FusionSystem::generate(base, p, &maps)?)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fusion::{fusion_equal, is_subfusion};
    use crate::group::{Group, Perm};
    use crate::models::hnn_presentation;

    fn c3() -> Arc<Group> {
        Arc::new(Group::from_permutations("C3", 3, vec![Perm::parse_cycles("(1 2 3)", 3).unwrap()]).unwrap())
    }

    fn inversion(g: &Group) -> InjHom {
        let whole = g.whole();
        InjHom { source: whole.clone(), target: whole.clone(), images: g.elements().map(|x| g.inv(x)).collect() }
    }

    #[test]
    fn c3_inversion_balls() {
        let g = c3();
        let m = hnn_presentation(g.clone(), 3, &[inversion(&g)]).unwrap();
        let b0 = ball_enumerate(&m, 0).unwrap();
        assert_eq!(b0, vec![ModelWord::empty()]);
        let b1: Vec<String> = ball_enumerate(&m, 1).unwrap().iter().map(|w| m.format_word(w)).collect();
        assert_eq!(b1, ["1", "s1^1", "s2^1", "t1^1", "t1^-1"]);
        assert!(matches!(ball_enumerate(&m, 9), Err(ModelError::RadiusBoundExceeded { radius: 9, bound: 8 })));
        let b2 = ball_enumerate(&m, 2).unwrap();
        for (i, u) in b2.iter().enumerate() {
            for v in &b2[..i] {
                assert!(!m.words_equal(u, v).unwrap());
            }
        }
    }

    #[test]
    fn c3_inversion_recovered() {
        let g = c3();
        let phi = inversion(&g);
        let m = hnn_presentation(g.clone(), 3, std::slice::from_ref(&phi)).unwrap();
        let target = FusionSystem::generate(g.clone(), 3, &[phi]).unwrap();
        let r0 = recover_fusion(&m, 0).unwrap();
        assert!(fusion_equal(&r0, &FusionSystem::generate(g.clone(), 3, &[]).unwrap()).unwrap());
        let r1 = recover_fusion(&m, 1).unwrap();
        let r2 = recover_fusion(&m, 2).unwrap();
        assert!(is_subfusion(&r0, &r1).unwrap() && is_subfusion(&r1, &r2).unwrap());
        assert!(fusion_equal(&r2, &target).unwrap());
    }

    #[test]
    fn d8_s4_amalgam_recovers_s4_fusion() {
        let d = crate::models::alperin::tests::d8_s4_datum();
        let m = crate::models::robinson_presentation(&d).unwrap();
        assert_eq!(m.relators().len(), 64 + 576 + 8);
        for r in m.relators() {
            assert!(m.is_identity(r).unwrap());
        }
        let ball = ball_enumerate(&m, 3).unwrap();
        assert_eq!(ball.len(), 24);
        let recovered = recover_fusion(&m, 3).unwrap();
        assert!(fusion_equal(&recovered, d.fusion()).unwrap());
    }

    #[test]
    fn amalgam_over_whole_group_collapses() {
        let d = crate::models::alperin::tests::d8_s4_datum();
        let top = d.entries()[0].clone();
        let f = FusionSystem::generate(d.fusion().base().clone(), 2, &[]).unwrap();
        let doubled = crate::models::AlperinDatum::new(f.clone(), vec![top.clone(), top.clone()]).unwrap();
        let single = crate::models::AlperinDatum::new(f, vec![top]).unwrap();
        let a = crate::models::robinson_presentation(&doubled).unwrap();
        let b = crate::models::robinson_presentation(&single).unwrap();
        for r in 0..4 {
            assert_eq!(ball_enumerate(&a, r).unwrap().len(), ball_enumerate(&b, r).unwrap().len());
        }
    }
}
