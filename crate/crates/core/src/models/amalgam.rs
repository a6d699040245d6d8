//! Trees of finite groups amalgamated over normalizers.
//!
//! Factor `L_1` contains the base group; each further factor `L_k` is glued
//! to `L_1` along `A_k = N_S(P_k)`, embedded in both.

use std::sync::Arc;

use super::alperin::{validate_alperin_datum, AlperinDatum};
use super::{Letter, Model, ModelKind, ModelWord, Presentation, Syllable};
use crate::error::ModelError;
use crate::group::{Elem, Group};

#[derive(Clone, Debug)]
struct Edge {
    /// Indexed by elements of `L_1`.
    to_leaf: Vec<Option<Elem>>,
    /// Indexed by elements of the leaf factor.
    to_center: Vec<Option<Elem>>,
}

/// The word-problem engine for `L_1 *_{A_2} L_2 *_{A_3} ... *_{A_n} L_n`.
#[derive(Clone, Debug)]
pub struct AmalgamModel {
    base: Arc<Group>,
    p: u32,
    factors: Vec<Arc<Group>>,
    offsets: Vec<u32>,
    base_to_center: Vec<Elem>,
    center_to_base: Vec<Option<Elem>>,
    /// `edges[k]` glues factor `k`; `edges[0]` is unused.
    edges: Vec<Edge>,
}

impl AmalgamModel {
    /// Builds the engine from a structurally valid datum.
    pub fn new(datum: &AlperinDatum) -> Self {
        let base = datum.fusion().base().clone();
        let factors: Vec<Arc<Group>> = datum.entries().iter().map(|e| e.group.clone()).collect();
        let center = &factors[0];
        let base_to_center = datum.entries()[0].embedding.clone();
        let mut center_to_base = vec![None; center.order()];
        for (x, &c) in base_to_center.iter().enumerate() {
            center_to_base[c as usize] = Some(x as Elem);
        }
        let mut edges = vec![Edge { to_leaf: Vec::new(), to_center: Vec::new() }];
        for (k, entry) in datum.entries().iter().enumerate().skip(1) {
            let mut to_leaf = vec![None; center.order()];
            let mut to_center = vec![None; factors[k].order()];
            for (&x, &y) in datum.normalizer(k).elements().iter().zip(&entry.embedding) {
                let c = base_to_center[x as usize];
                to_leaf[c as usize] = Some(y);
                to_center[y as usize] = Some(c);
            }
            edges.push(Edge { to_leaf, to_center });
        }
        let mut offsets = Vec::with_capacity(factors.len());
        let mut total = 0u32;
        for f in &factors {
            offsets.push(total);
            total += f.order() as u32 - 1;
        }
        AmalgamModel { base, p: datum.fusion().p(), factors, offsets, base_to_center, center_to_base, edges }
    }

    pub fn base(&self) -> &Arc<Group> {
        &self.base
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn factors(&self) -> &[Arc<Group>] {
        &self.factors
    }

    pub fn factor(&self, k: usize) -> &Group {
        &self.factors[k]
    }

    pub(crate) fn base_in_center(&self, x: Elem) -> Elem {
        self.base_to_center[x as usize]
    }

    pub(crate) fn center_to_base(&self, c: Elem) -> Option<Elem> {
        self.center_to_base[c as usize]
    }

    fn locate(&self, generator: u32) -> (usize, Elem) {
        let k = self.offsets.partition_point(|&o| o <= generator) - 1;
        (k, generator - self.offsets[k] + 1)
    }

    pub(crate) fn to_syllables(&self, w: &ModelWord) -> Vec<Syllable> {
        w.letters()
            .iter()
            .map(|l| {
                let (factor, x) = self.locate(l.generator);
                let element = if l.exponent > 0 { x } else { self.factors[factor].inv(x) };
                Syllable::Element { factor, element }
            })
            .collect()
    }

    pub(crate) fn to_word(&self, syllables: &[Syllable]) -> ModelWord {
        syllables
            .iter()
            .filter_map(|s| match *s {
                Syllable::Element { element: 0, .. } => None,
                Syllable::Element { factor, element } => Some(Letter::new(self.offsets[factor] + element - 1, 1)),
                Syllable::Stable { .. } => unreachable!("amalgams have no stable letters"),
            })
            .collect()
    }

    fn split(s: &Syllable) -> (usize, Elem) {
        match *s {
            Syllable::Element { factor, element } => (factor, element),
            Syllable::Stable { .. } => unreachable!("amalgams have no stable letters"),
        }
    }

    /// Rewrites to a reduced alternating form; the empty word is the identity.
    pub fn reduce(&self, syllables: &[Syllable]) -> Vec<Syllable> {
        let mut w: Vec<(usize, Elem)> = syllables.iter().map(Self::split).collect();
        while self.step(&mut w) {}
        w.into_iter().map(|(factor, element)| Syllable::Element { factor, element }).collect()
    }

    /// Applies the first applicable rewrite; false at a fixed point.
    fn step(&self, w: &mut Vec<(usize, Elem)>) -> bool {
        if let Some(i) = w.iter().position(|&(_, x)| x == 0) {
            w.remove(i);
            return true;
        }
        if let Some(i) = (1..w.len()).find(|&i| w[i - 1].0 == w[i].0) {
            let (k, b) = w.remove(i);
            w[i - 1].1 = self.factors[k].mul(w[i - 1].1, b);
            return true;
        }
        for i in 0..w.len() {
            let (k, x) = w[i];
            if k > 0 {
                if let Some(c) = self.edges[k].to_center[x as usize] {
                    w[i] = (0, c);
                    return true;
                }
                continue;
            }
            let neighbours = [i.checked_sub(1), (i + 1 < w.len()).then_some(i + 1)];
            for j in neighbours.into_iter().flatten() {
                let leaf = w[j].0;
                if leaf > 0 {
                    if let Some(y) = self.edges[leaf].to_leaf[x as usize] {
                        w[i] = (leaf, y);
                        return true;
                    }
                }
            }
        }
        false
    }

    /// The sequence of non-central factors of a reduced word.
    pub(crate) fn leaf_sequence(reduced: &[Syllable]) -> Vec<usize> {
        reduced.iter().map(Self::split).map(|(k, _)| k).filter(|&k| k > 0).collect()
    }
}

/// Emits the amalgam presentation of a validated Alperin datum.
pub fn robinson_presentation(datum: &AlperinDatum) -> Result<Presentation, ModelError> {
    let report = validate_alperin_datum(datum);
    if !report.is_valid() {
        return Err(ModelError::InvalidDatum(report.to_string()));
    }
    let model = AmalgamModel::new(datum);
    let mut generators = Vec::new();
    for (i, f) in model.factors.iter().enumerate() {
        generators.extend((1..f.order()).map(|k| format!("L{}.g{k}", i + 1)));
    }
    let letter = |k: usize, x: Elem, e: i8| (x != 0).then(|| Letter::new(model.offsets[k] + x - 1, e));
    let mut relators = Vec::new();
    for (k, f) in model.factors.iter().enumerate() {
        for a in f.elements() {
            for b in f.elements() {
                relators.push([letter(k, a, 1), letter(k, b, 1), letter(k, f.mul(a, b), -1)].into_iter().flatten().collect());
            }
        }
    }
    for k in 1..model.factors.len() {
        for (&x, &y) in datum.normalizer(k).elements().iter().zip(&datum.entries()[k].embedding) {
            let c = model.base_to_center[x as usize];
            relators.push([letter(0, c, 1), letter(k, y, -1)].into_iter().flatten().collect());
        }
    }
    Ok(Presentation::new(ModelKind::Amalgam, generators, relators, Some(Model::Amalgam(Arc::new(model)))))
}
