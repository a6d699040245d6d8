//! Seeded random words for property checks of the word problem.

use rand::Rng;

use super::hnn::HnnModel;
use super::{Presentation, Syllable};
use crate::error::ModelError;
use crate::models::ModelWord;

/// A reduced HNN word with between 1 and `max_stable` stable letters and no pinch.
pub fn random_pinch_free(model: &HnnModel, rng: &mut impl Rng, max_stable: usize) -> Vec<Syllable> {
    assert!(model.stable_letters() > 0, "needs at least one stable letter");
    let n = model.base().order() as u32;
    let k = rng.random_range(1..=max_stable.max(1));
    let mut out = Vec::new();
    let head = rng.random_range(0..n);
    if head != 0 {
        out.push(Syllable::Element { factor: 0, element: head });
    }
    let mut prev: Option<(usize, i8)> = None;
    for _ in 0..k {
        let mut letter = (rng.random_range(0..model.stable_letters()), if rng.random_bool(0.5) { 1 } else { -1 });
        let segment = match out.last() {
            Some(Syllable::Element { element, .. }) if prev.is_some() => *element,
            _ => 0,
        };
        if let Some((i, e)) = prev {
            if i == letter.0 && e == -letter.1 {
                let sub = if e < 0 { model.domain(i) } else { model.image(i) };
                if sub.contains(segment) {
                    letter.1 = e;
                }
            }
        }
        out.push(Syllable::Stable { index: letter.0, exponent: letter.1 });
        let tail = rng.random_range(0..n);
        if tail != 0 {
            out.push(Syllable::Element { factor: 0, element: tail });
        }
        prev = Some(letter);
    }
    out
}

/// A uniformly random word of exactly `len` letters.
pub fn random_word(m: &Presentation, rng: &mut impl Rng, len: usize) -> ModelWord {
    let g = m.generators().len() as u32;
    (0..len)
        .map(|_| super::Letter::new(rng.random_range(0..g), if rng.random_bool(0.5) { 1 } else { -1 }))
        .collect()
}

/// `random_pinch_free` rendered as a word of `m`.
pub fn random_pinch_free_word(m: &Presentation, rng: &mut impl Rng, max_stable: usize) -> Result<ModelWord, ModelError> {
    let h = m.hnn().ok_or(ModelError::WrongKind("hnn"))?;
    Ok(m.to_word(&random_pinch_free(h, rng, max_stable)))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::group::{Group, InjHom, Perm};
    use crate::models::hnn_presentation;

    #[test]
    fn britton_on_v4_with_order_three_map() {
        let v4 = Arc::new(
            Group::from_permutations(
                "V4",
                4,
                vec![Perm::parse_cycles("(1 2)(3 4)", 4).unwrap(), Perm::parse_cycles("(1 3)(2 4)", 4).unwrap()],
            )
            .unwrap(),
        );
        let whole = v4.whole();
        // 0,1,2,3 with 1*2 = 3: rotate the three involutions.
        let rho = InjHom::new(&v4, whole.clone(), &v4, whole.clone(), vec![0, 2, 3, 1]).unwrap();
        let m = hnn_presentation(v4, 2, &[rho]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let w = random_pinch_free_word(&m, &mut rng, 6).unwrap();
            assert!(!m.is_identity(&w).unwrap());
            let r = m.reduce_word(&w).unwrap();
            assert_eq!(r, w);
            let u = random_word(&m, &mut rng, 12);
            assert!(m.is_identity(&u.concat(&u.inverse())).unwrap());
            let ru = m.reduce_word(&u).unwrap();
            assert!(ru.len() <= u.len());
            assert_eq!(m.reduce_word(&ru).unwrap(), ru);
        }
    }
}
