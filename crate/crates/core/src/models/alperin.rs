//! Alperin data: the local groups `L_i` feeding the amalgam construction.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::ModelError;
use crate::fusion::{fusion_equal, FusionSystem};
use crate::group::{Elem, Group, InjHom, Subgroup};

/// `(P_i, L_i, ι_i)` with `embedding[k] = ι_i(N_S(P_i).elements()[k])`.
#[derive(Clone, Debug)]
pub struct AlperinEntry {
    pub subgroup: Subgroup,
    pub group: Arc<Group>,
    pub embedding: Vec<Elem>,
}

#[derive(Clone, Debug)]
pub struct AlperinDatum {
    fusion: FusionSystem,
    entries: Vec<AlperinEntry>,
    normalizers: Vec<Subgroup>,
}

impl AlperinDatum {
    /// Checks the structure: `P_1 = S` and every `ι_i` is an injective homomorphism.
    pub fn new(fusion: FusionSystem, entries: Vec<AlperinEntry>) -> Result<Self, ModelError> {
        let bad = |m: String| ModelError::MalformedDatum(m);
        let s = fusion.base().clone();
        match entries.first() {
            None => return Err(bad("no entries".into())),
            Some(e) if e.subgroup != s.whole() => {
                return Err(bad(format!("first subgroup {} is not the whole base group", e.subgroup)))
            }
            _ => {}
        }
        let mut normalizers = Vec::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if fusion.index_of(&e.subgroup).is_none() {
                return Err(bad(format!("entry {}: {} is not a subgroup of the base", i + 1, e.subgroup)));
            }
            let n = s.normalizer(&e.subgroup);
            InjHom::new(&s, n.clone(), &e.group, e.group.whole(), e.embedding.clone())
                .map_err(|err| bad(format!("entry {}: {err}", i + 1)))?;
            normalizers.push(n);
        }
        Ok(AlperinDatum { fusion, entries, normalizers })
    }

    pub fn fusion(&self) -> &FusionSystem {
        &self.fusion
    }

    pub fn entries(&self) -> &[AlperinEntry] {
        &self.entries
    }

    /// `N_S(P_i)`.
    pub fn normalizer(&self, i: usize) -> &Subgroup {
        &self.normalizers[i]
    }

    /// `ι_i` as a map `N_S(P_i) → L_i`.
    pub fn iota(&self, i: usize) -> InjHom {
        let e = &self.entries[i];
        InjHom { source: self.normalizers[i].clone(), target: e.group.whole(), images: e.embedding.clone() }
    }

    fn image_of(&self, i: usize, h: &Subgroup) -> Subgroup {
        let iota = self.iota(i);
        Subgroup::new(&self.entries[i].group, h.elements().iter().map(|&x| iota.apply(x).expect("h lies in N_S(P)")))
            .expect("image of a subgroup under a homomorphism")
    }
}

/// One violated clause of the Alperin conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlperinFailure {
    CoreFailure { entry: usize, image: String, core: String },
    CentralizerFailure { entry: usize, centralizer: String, center_image: String },
    OutMismatch { entry: usize, detail: String },
    SylowFailure { entry: usize, order: usize, p_part: usize },
    NotSubfusion { entry: usize, morphism: String },
    GenerationFailure { missing: String },
}

impl fmt::Display for AlperinFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlperinFailure::CoreFailure { entry, image, core } => {
                write!(f, "entry {entry}: CoreFailure iota(P)={image} O_p(L)={core}")
            }
            AlperinFailure::CentralizerFailure { entry, centralizer, center_image } => {
                write!(f, "entry {entry}: CentralizerFailure C_L(iota(P))={centralizer} iota(Z(P))={center_image}")
            }
            AlperinFailure::OutMismatch { entry, detail } => write!(f, "entry {entry}: OutMismatch {detail}"),
            AlperinFailure::SylowFailure { entry, order, p_part } => {
                write!(f, "entry {entry}: SylowFailure |iota(N_S(P))|={order} p-part of |L|={p_part}")
            }
            AlperinFailure::NotSubfusion { entry, morphism } => {
                write!(f, "entry {entry}: NotSubfusion {morphism}")
            }
            AlperinFailure::GenerationFailure { missing } => write!(f, "GenerationFailure missing {missing}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlperinReport {
    pub failures: Vec<AlperinFailure>,
}

impl AlperinReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for AlperinReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "valid");
        }
        writeln!(f, "invalid")?;
        for x in &self.failures {
            writeln!(f, "  {x}")?;
        }
        Ok(())
    }
}

/// `F_{N_S(P_i)}(L_i)` pulled back to the base group through `ι_i`.
pub fn pulled_back_fusion(datum: &AlperinDatum, i: usize) -> Vec<InjHom> {
    let s = datum.fusion().base();
    let l = &datum.entries()[i].group;
    let n = datum.normalizer(i);
    let iota = datum.iota(i);
    let mut back = vec![None; l.order()];
    for (&x, &y) in n.elements().iter().zip(&iota.images) {
        back[y as usize] = Some(x);
    }
    let mut out = BTreeSet::new();
    for q in datum.fusion().subgroups().iter().filter(|q| q.is_subgroup_of(n)) {
        let lifted: Vec<Elem> = q.elements().iter().map(|&x| iota.apply(x).unwrap()).collect();
        for g in l.elements() {
            let images: Option<Vec<Elem>> = lifted.iter().map(|&y| back[l.conj(g, y) as usize]).collect();
            if let Some(images) = images {
                out.insert(InjHom { source: q.clone(), target: s.whole(), images });
            }
        }
    }
    out.into_iter().collect()
}

/// Checks every Alperin clause and collects one failure per violation.
pub fn validate_alperin_datum(datum: &AlperinDatum) -> AlperinReport {
    let f = datum.fusion();
    let s = f.base();
    let p = f.p();
    let mut failures = Vec::new();
    let mut pulled = Vec::new();
    for (i, e) in datum.entries().iter().enumerate() {
        let entry = i + 1;
        let l = &e.group;
        let image = datum.image_of(i, &e.subgroup);
        match l.o_p(p) {
            Ok(core) if core == image => {}
            Ok(core) => failures.push(AlperinFailure::CoreFailure {
                entry,
                image: image.to_string(),
                core: core.to_string(),
            }),
            Err(err) => failures.push(AlperinFailure::CoreFailure {
                entry,
                image: image.to_string(),
                core: err.to_string(),
            }),
        }
        let centralizer = l.centralizer(&image);
        let center_image = datum.image_of(i, &s.center_of(&e.subgroup));
        if centralizer != center_image {
            failures.push(AlperinFailure::CentralizerFailure {
                entry,
                centralizer: centralizer.to_string(),
                center_image: center_image.to_string(),
            });
        }
        let out = f.out_f(f.index_of(&e.subgroup).expect("checked at construction"));
        let detail = match (l.quotient(&image), out) {
            (Ok(q), Ok(out)) => match q.is_isomorphic(&out) {
                Ok(true) => None,
                Ok(false) => Some(format!("|L/iota(P)|={} |Out_F(P)|={} not isomorphic", q.order(), out.order())),
                Err(err) => Some(err.to_string()),
            },
            (Err(err), _) | (_, Err(err)) => Some(err.to_string()),
        };
        if let Some(detail) = detail {
            failures.push(AlperinFailure::OutMismatch { entry, detail });
        }
        let order = datum.normalizer(i).len();
        if order != l.p_part(p) {
            failures.push(AlperinFailure::SylowFailure { entry, order, p_part: l.p_part(p) });
        }
        let maps = pulled_back_fusion(datum, i);
        if let Some(bad) = maps.iter().find(|m| !f.contains(m)) {
            failures.push(AlperinFailure::NotSubfusion { entry, morphism: bad.to_string() });
        }
        pulled.extend(maps);
    }
    match FusionSystem::generate(s.clone(), p, &pulled) {
        Ok(generated) => {
            if !fusion_equal(&generated, f).unwrap_or(false) {
                let missing = f
                    .all_morphisms()
                    .into_iter()
                    .find(|m| !generated.contains(m))
                    .map(|m| m.to_string())
                    .unwrap_or_else(|| "(generated system is larger)".into());
                failures.push(AlperinFailure::GenerationFailure { missing });
            }
        }
        Err(err) => failures.push(AlperinFailure::GenerationFailure { missing: err.to_string() }),
    }
    AlperinReport { failures }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::group::Perm;

    fn perm_group(name: &str, degree: usize, gens: &[&str]) -> Group {
        let gens = gens.iter().map(|g| Perm::parse_cycles(g, degree).unwrap()).collect();
        Group::from_permutations(name, degree, gens).unwrap()
    }

    /// `F_{D8}(S4)` with the Sylow embedding into `S4`.
    pub(crate) fn d8_s4_datum() -> AlperinDatum {
        let s4 = Arc::new(perm_group("S4", 4, &["(1 2)", "(1 2 3 4)"]));
        let syl = s4.sylow(2).unwrap();
        let f = FusionSystem::from_group(&s4, &syl, 2).unwrap();
        let d8 = f.base().clone();
        let v4 = s4.o_p(2).unwrap();
        let v4_local = Subgroup::new(&d8, v4.elements().iter().map(|&x| syl.position(x).unwrap() as Elem)).unwrap();
        let d8_id = AlperinEntry { subgroup: d8.whole(), group: d8.clone(), embedding: d8.elements().collect() };
        let s4_entry = AlperinEntry { subgroup: v4_local, group: s4, embedding: syl.elements().to_vec() };
        AlperinDatum::new(f, vec![d8_id, s4_entry]).unwrap()
    }

    #[test]
    fn d8_s4_datum_is_valid() {
        let d = d8_s4_datum();
        let report = validate_alperin_datum(&d);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn inner_entry_alone_fails_generation() {
        let d = d8_s4_datum();
        let only = AlperinDatum::new(d.fusion().clone(), vec![d.entries()[0].clone()]).unwrap();
        let report = validate_alperin_datum(&only);
        assert!(matches!(report.failures.as_slice(), [AlperinFailure::GenerationFailure { .. }]), "{report}");
    }

    #[test]
    fn oversized_centralizer_is_reported() {
        let a4 = perm_group("A4", 4, &["(1 2 3)", "(1 2)(3 4)"]);
        let f = FusionSystem::from_group(&a4, &a4.sylow(2).unwrap(), 2).unwrap();
        let v4 = f.base().clone();
        // V4 x C3 on 7 points.
        let l = Arc::new(perm_group("V4xC3", 7, &["(1 2)(3 4)", "(1 3)(2 4)", "(5 6 7)"]));
        let lv4 = l.sylow(2).unwrap();
        let embedding = v4
            .elements()
            .map(|x| {
                let target = v4.label(x);
                // Same permutation on the first four points.
                let want = Perm::parse_cycles(&target, 7).unwrap();
                *lv4.elements().iter().find(|&&y| l.permutation(y).unwrap() == want).unwrap()
            })
            .collect();
        let top = AlperinEntry { subgroup: v4.whole(), group: l, embedding };
        let d = AlperinDatum::new(f, vec![top]).unwrap();
        let report = validate_alperin_datum(&d);
        assert!(report.failures.iter().any(|x| matches!(x, AlperinFailure::CentralizerFailure { entry: 1, .. })));
    }

    #[test]
    fn malformed_data_rejected() {
        let d = d8_s4_datum();
        assert!(AlperinDatum::new(d.fusion().clone(), vec![]).is_err());
        let mut e = d.entries()[1].clone();
        e.embedding.swap(1, 2);
        assert!(AlperinDatum::new(d.fusion().clone(), vec![d.entries()[0].clone(), e]).is_err());
        let wrong_first = d.entries()[1].clone();
        assert!(AlperinDatum::new(d.fusion().clone(), vec![wrong_first]).is_err());
    }
}
