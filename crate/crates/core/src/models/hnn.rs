//! Iterated HNN extensions of a finite p-group.
//!
//! Stable letter `t_i` conjugates `u ∈ P_i` to `t_i⁻¹ u t_i = φ_i(u)`.

use std::sync::Arc;

use super::{Letter, Model, ModelKind, ModelWord, Presentation, Syllable};
use crate::error::{FusionError, ModelError};
use crate::group::{check_prime, Elem, Group, InjHom, Subgroup};

#[derive(Clone, Debug)]
struct StableMap {
    domain: Subgroup,
    image: Subgroup,
    forward: Vec<Option<Elem>>,
    backward: Vec<Option<Elem>>,
    /// Least element of the right coset `P g`, indexed by `g`.
    domain_rep: Vec<Elem>,
    image_rep: Vec<Elem>,
}

/// The word-problem engine for `S *_{φ_1} ... *_{φ_r}`.
#[derive(Clone, Debug)]
pub struct HnnModel {
    base: Arc<Group>,
    p: u32,
    maps: Vec<StableMap>,
}

/// Canonical form `g_0 t^{ε_1} r_1 ... t^{ε_n} r_n` with coset representatives `r_k`.
pub type HnnNormalForm = (Elem, Vec<(usize, i8, Elem)>);

fn right_coset_reps(g: &Group, h: &Subgroup) -> Vec<Elem> {
    g.elements().map(|x| h.elements().iter().map(|&u| g.mul(u, x)).min().unwrap()).collect()
}

impl HnnModel {
    pub fn new(base: Arc<Group>, p: u32, maps: &[InjHom]) -> Result<Self, ModelError> {
        check_prime(p)?;
        if !base.is_p_group(p) {
            return Err(FusionError::NotPGroup { order: base.order(), p }.into());
        }
        let n = base.order();
        let maps = maps
            .iter()
            .map(|phi| {
                let phi = InjHom::new(&base, phi.source.clone(), &base, base.whole(), phi.images.clone())?;
                let image = phi.image();
                let mut forward = vec![None; n];
                let mut backward = vec![None; n];
                for (&u, &v) in phi.source.elements().iter().zip(&phi.images) {
                    forward[u as usize] = Some(v);
                    backward[v as usize] = Some(u);
                }
                Ok(StableMap {
                    domain_rep: right_coset_reps(&base, &phi.source),
                    image_rep: right_coset_reps(&base, &image),
                    domain: phi.source,
                    image,
                    forward,
                    backward,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(HnnModel { base, p, maps })
    }

    pub fn base(&self) -> &Arc<Group> {
        &self.base
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn stable_letters(&self) -> usize {
        self.maps.len()
    }

    pub fn domain(&self, i: usize) -> &Subgroup {
        &self.maps[i].domain
    }

    pub fn image(&self, i: usize) -> &Subgroup {
        &self.maps[i].image
    }

    fn element_letters(&self) -> u32 {
        self.base.order() as u32 - 1
    }

    pub(crate) fn to_syllables(&self, w: &ModelWord) -> Vec<Syllable> {
        let k = self.element_letters();
        w.letters()
            .iter()
            .map(|l| {
                if l.generator < k {
                    let x = l.generator + 1;
                    let element = if l.exponent > 0 { x } else { self.base.inv(x) };
                    Syllable::Element { factor: 0, element }
                } else {
                    Syllable::Stable { index: (l.generator - k) as usize, exponent: l.exponent }
                }
            })
            .collect()
    }

    pub(crate) fn to_word(&self, syllables: &[Syllable]) -> ModelWord {
        let k = self.element_letters();
        syllables
            .iter()
            .filter_map(|s| match *s {
                Syllable::Element { element: 0, .. } => None,
                Syllable::Element { element, .. } => Some(Letter::new(element - 1, 1)),
                Syllable::Stable { index, exponent } => Some(Letter::new(k + index as u32, exponent)),
            })
            .collect()
    }

    /// Folds adjacent elements and removes pinches in one left-to-right pass.
    pub fn reduce(&self, syllables: &[Syllable]) -> Vec<Syllable> {
        let mut stack = Vec::with_capacity(syllables.len());
        for &s in syllables {
            self.push(&mut stack, s);
        }
        stack
    }

    fn push(&self, stack: &mut Vec<Syllable>, s: Syllable) {
        match s {
            Syllable::Element { element: 0, .. } => {}
            Syllable::Element { element, .. } => match stack.last_mut() {
                Some(Syllable::Element { element: top, .. }) => {
                    *top = self.base.mul(*top, element);
                    if *top == 0 {
                        stack.pop();
                    }
                }
                _ => stack.push(s),
            },
            Syllable::Stable { index, exponent } => {
                let closes = |t: &Syllable| matches!(*t, Syllable::Stable { index: j, exponent: e } if j == index && e == -exponent);
                match stack.as_slice() {
                    [.., t] if closes(t) => {
                        stack.pop();
                    }
                    [.., t, Syllable::Element { element: u, .. }] if closes(t) => {
                        let map = &self.maps[index];
                        let swapped = if exponent > 0 { map.forward[*u as usize] } else { map.backward[*u as usize] };
                        match swapped {
                            Some(v) => {
                                stack.truncate(stack.len() - 2);
                                self.push(stack, Syllable::Element { factor: 0, element: v });
                            }
                            None => stack.push(s),
                        }
                    }
                    _ => stack.push(s),
                }
            }
        }
    }

    /// Unique representative of a reduced word, obtained by pushing
    /// base-group material leftward through each stable letter.
    pub fn normal_form(&self, reduced: &[Syllable]) -> HnnNormalForm {
        let mut carry: Elem = 0;
        let mut tail = Vec::new();
        let mut segment: Elem = 0;
        for s in reduced.iter().rev() {
            match *s {
                Syllable::Element { element, .. } => segment = self.base.mul(element, segment),
                Syllable::Stable { index, exponent } => {
                    let h = self.base.mul(segment, carry);
                    let map = &self.maps[index];
                    let (rep, absorbed) = if exponent < 0 {
                        let r = map.domain_rep[h as usize];
                        let u = self.base.mul(h, self.base.inv(r));
                        (r, map.forward[u as usize].expect("u lies in the domain"))
                    } else {
                        let r = map.image_rep[h as usize];
                        let v = self.base.mul(h, self.base.inv(r));
                        (r, map.backward[v as usize].expect("v lies in the image"))
                    };
                    tail.push((index, exponent, rep));
                    carry = absorbed;
                    segment = 0;
                }
            }
        }
        tail.reverse();
        (self.base.mul(segment, carry), tail)
    }

    /// Whether the reduced word contains no pinch.
    pub fn is_pinch_free(&self, syllables: &[Syllable]) -> bool {
        self.reduce(syllables).len() == syllables.len()
            && !syllables.iter().any(|s| matches!(s, Syllable::Element { element: 0, .. }))
    }
}

/// Emits `⟨S, t_1..t_r | table of S, t_i⁻¹ u t_i = φ_i(u)⟩`.
pub fn hnn_presentation(base: Arc<Group>, p: u32, maps: &[InjHom]) -> Result<Presentation, ModelError> {
    let model = HnnModel::new(base, p, maps)?;
    let g = &model.base;
    let n = g.order() as Elem;
    let mut generators: Vec<String> = (1..n).map(|x| format!("s{x}")).collect();
    generators.extend((1..=model.maps.len()).map(|i| format!("t{i}")));
    let letter = |x: Elem, e: i8| (x != 0).then(|| Letter::new(x - 1, e));
    let mut relators = Vec::new();
    for a in g.elements() {
        for b in g.elements() {
            relators.push([letter(a, 1), letter(b, 1), letter(g.mul(a, b), -1)].into_iter().flatten().collect());
        }
    }
    for (i, map) in model.maps.iter().enumerate() {
        let t = n - 1 + i as u32;
        for &u in map.domain.elements() {
            let v = map.forward[u as usize].unwrap();
            relators.push(
                [Some(Letter::new(t, -1)), letter(u, 1), Some(Letter::new(t, 1)), letter(v, -1)]
                    .into_iter()
                    .flatten()
                    .collect(),
            );
        }
    }
    Ok(Presentation::new(ModelKind::Hnn, generators, relators, Some(Model::Hnn(Arc::new(model)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Perm;

    fn c3_inversion() -> Presentation {
        let c3 = Arc::new(Group::from_permutations("C3", 3, vec![Perm::parse_cycles("(1 2 3)", 3).unwrap()]).unwrap());
        let whole = c3.whole();
        let images = whole.elements().iter().map(|&x| c3.inv(x)).collect();
        let inv = InjHom { source: whole.clone(), target: whole, images };
        hnn_presentation(c3, 3, &[inv]).unwrap()
    }

    #[test]
    fn c3_inversion_presentation() {
        let m = c3_inversion();
        assert_eq!(m.generators(), ["s1", "s2", "t1"]);
        assert_eq!(m.relators().len(), 9 + 3);
        for r in m.relators() {
            assert!(m.is_identity(r).unwrap(), "{}", m.format_word(r));
        }
    }

    #[test]
    fn pinch_reduces_to_image() {
        let m = c3_inversion();
        let w = m.parse_word("t1^-1 s1^1 t1^1").unwrap();
        assert_eq!(m.format_word(&m.reduce_word(&w).unwrap()), "s2^1");
        let w = m.parse_word("t1^1 t1^-1").unwrap();
        assert!(m.is_identity(&w).unwrap());
        assert!(!m.is_identity(&m.parse_word("t1^1").unwrap()).unwrap());
        assert!(!m.words_equal(&m.base_letter(1).unwrap(), &m.base_letter(2).unwrap()).unwrap());
    }

    #[test]
    fn normal_form_identifies_equal_words() {
        let m = c3_inversion();
        let h = m.hnn().unwrap();
        // t s1 = s2 t, so both spell the same element.
        let a = m.to_syllables(&m.parse_word("t1^1 s1^1").unwrap()).unwrap();
        let b = m.to_syllables(&m.parse_word("s2^1 t1^1").unwrap()).unwrap();
        assert_eq!(h.normal_form(&h.reduce(&a)), h.normal_form(&h.reduce(&b)));
        let c = m.to_syllables(&m.parse_word("t1^1").unwrap()).unwrap();
        assert_ne!(h.normal_form(&h.reduce(&a)), h.normal_form(&h.reduce(&c)));
    }

    #[test]
    fn no_stable_letters_gives_base_presentation() {
        let c3 = Arc::new(Group::from_permutations("C3", 3, vec![Perm::parse_cycles("(1 2 3)", 3).unwrap()]).unwrap());
        let m = hnn_presentation(c3, 3, &[]).unwrap();
        assert_eq!(m.generators().len(), 2);
        assert_eq!(m.relators().len(), 9);
    }
}
