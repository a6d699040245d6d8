//! Fusion systems on a finite p-group, stored as explicit morphism sets.
//!
//! A fusion system is kept as `Hom_F(P, S)` for every subgroup `P` of the
//! base group `S`. Every `Hom_F(P, Q)` is recovered as the maps in
//! `Hom_F(P, S)` whose image lies in `Q`, so each morphism factors as an
//! isomorphism onto its image followed by an inclusion.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{FusionError, GroupError};
use crate::group::{check_prime, p_part, Elem, ElemSet, Group, InjHom, Subgroup};

/// All subgroups of a p-group with lookup by element set.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    subgroups: Vec<Subgroup>,
    index: HashMap<ElemSet, usize>,
    maximal: Vec<Vec<usize>>,
}

impl SubgroupLattice {
    pub fn new(group: &Group, p: u32) -> Result<Self, GroupError> {
        let subgroups = group.subgroups()?;
        let index = subgroups.iter().enumerate().map(|(i, s)| (*s.set(), i)).collect();
        let maximal = subgroups
            .iter()
            .map(|big| {
                subgroups
                    .iter()
                    .enumerate()
                    .filter(|(_, small)| small.len() * p as usize == big.len() && small.is_subgroup_of(big))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        Ok(SubgroupLattice { subgroups, index, maximal })
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn get(&self, i: usize) -> &Subgroup {
        &self.subgroups[i]
    }

    pub fn index_of(&self, s: &Subgroup) -> Option<usize> {
        self.index.get(s.set()).copied()
    }

    pub fn find(&self, set: &ElemSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    /// Subgroups of index p in subgroup `i`.
    pub fn maximal(&self, i: usize) -> &[usize] {
        &self.maximal[i]
    }
}

/// One reason a fusion system fails to be saturated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SaturationWitness {
    /// `Aut_S(P)` is not a Sylow p-subgroup of `Aut_F(P)` at a fully normalized `P`.
    SylowFailure { subgroup: Subgroup, aut_s: usize, aut_f: usize },
    /// A fully normalized `P` that is not fully centralized.
    CentralizedFailure { subgroup: Subgroup },
    /// `φ` with fully centralized image admits no extension to `N_φ`.
    ExtensionFailure { morphism: InjHom, n_phi: Subgroup },
}

impl fmt::Display for SaturationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaturationWitness::SylowFailure { subgroup, aut_s, aut_f } => {
                write!(f, "SylowFailure P={subgroup} |Aut_S(P)|={aut_s} |Aut_F(P)|={aut_f}")
            }
            SaturationWitness::CentralizedFailure { subgroup } => {
                write!(f, "CentralizedFailure P={subgroup}")
            }
            SaturationWitness::ExtensionFailure { morphism, n_phi } => {
                write!(f, "ExtensionFailure phi: {morphism} N_phi={n_phi}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationReport {
    pub saturated: bool,
    pub witnesses: Vec<SaturationWitness>,
}

impl fmt::Display for SaturationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.saturated {
            return writeln!(f, "saturated");
        }
        writeln!(f, "not saturated")?;
        for w in &self.witnesses {
            writeln!(f, "  {w}")?;
        }
        Ok(())
    }
}

type Map = Vec<Elem>;

/// A fusion system on the whole of its base p-group.
#[derive(Clone)]
pub struct FusionSystem {
    base: Arc<Group>,
    p: u32,
    lattice: Arc<SubgroupLattice>,
    /// `homs[P]` is `Hom_F(P, S)`; each map lists images of `P`'s sorted elements.
    homs: Vec<BTreeSet<Map>>,
}

impl fmt::Debug for FusionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FusionSystem(p={}, |S|={}, morphisms={})",
            self.p,
            self.base.order(),
            self.morphism_count()
        )
    }
}

impl FusionSystem {
    /// `F_S(G)`: morphisms are the conjugations `c_g` with `g P g⁻¹ ≤ S`.
    ///
    /// The base of the result is `S` as a standalone group whose local
    /// element `i` is `s.elements()[i]` in `g`.
    pub fn from_group(g: &Group, s: &Subgroup, p: u32) -> Result<Self, FusionError> {
        check_prime(p)?;
        let s = Subgroup::new(g, s.elements().iter().copied())?;
        let full = g.p_part(p);
        if s.len() != full || p_part(s.len(), p) != s.len() {
            return Err(FusionError::NotSylow {
                subgroup: s.to_string(),
                p,
                order: s.len(),
                p_part: full,
            });
        }
        let base = Arc::new(g.induced(&s, format!("{}-Sylow of {}", p, g.name())));
        let lattice = Arc::new(SubgroupLattice::new(&base, p)?);
        let mut homs = vec![BTreeSet::new(); lattice.len()];
        for (i, sub) in lattice.subgroups().iter().enumerate() {
            let parent: Vec<Elem> = sub.elements().iter().map(|&x| s.elements()[x as usize]).collect();
            'conj: for x in g.elements() {
                let mut images = Vec::with_capacity(parent.len());
                for &y in &parent {
                    match s.position(g.conj(x, y)) {
                        Some(k) => images.push(k as Elem),
                        None => continue 'conj,
                    }
                }
                homs[i].insert(images);
            }
        }
        Ok(FusionSystem { base, p, lattice, homs })
    }

    /// The smallest fusion system on `base` containing `generators`.
    ///
    /// Closure is taken under composition, restriction and inverses of
    /// isomorphisms, starting from the inner fusion `F_S(S)`.
    pub fn generate(base: Arc<Group>, p: u32, generators: &[InjHom]) -> Result<Self, FusionError> {
        check_prime(p)?;
        if !base.is_p_group(p) {
            return Err(FusionError::NotPGroup { order: base.order(), p });
        }
        let lattice = Arc::new(SubgroupLattice::new(&base, p)?);
        Self::generate_on(base, p, lattice, generators)
    }

    fn generate_on(
        base: Arc<Group>,
        p: u32,
        lattice: Arc<SubgroupLattice>,
        generators: &[InjHom],
    ) -> Result<Self, FusionError> {
        let mut closure = Closure::new(&lattice);
        for (i, sub) in lattice.subgroups().iter().enumerate() {
            for s in base.elements() {
                closure.add(i, sub.elements().iter().map(|&x| base.conj(s, x)).collect());
            }
        }
        for gen in generators {
            let i = lattice
                .index_of(&gen.source)
                .ok_or_else(|| FusionError::ForeignMorphism(gen.to_string()))?;
            if lattice.index_of(&gen.target).is_none() {
                return Err(FusionError::ForeignMorphism(gen.to_string()));
            }
            InjHom::new(&base, gen.source.clone(), &base, gen.target.clone(), gen.images.clone())?;
            closure.add(i, gen.images.clone());
        }
        closure.run();
        let homs = closure.homs;
        Ok(FusionSystem { base, p, lattice, homs })
    }

    /// Regenerates from every stored morphism; equal to `self` when closed.
    pub fn regenerate(&self) -> Result<Self, FusionError> {
        Self::generate_on(self.base.clone(), self.p, self.lattice.clone(), &self.all_morphisms())
    }

    pub fn base(&self) -> &Arc<Group> {
        &self.base
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn lattice(&self) -> &Arc<SubgroupLattice> {
        &self.lattice
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        self.lattice.subgroups()
    }

    pub fn subgroup(&self, i: usize) -> &Subgroup {
        self.lattice.get(i)
    }

    pub fn index_of(&self, s: &Subgroup) -> Option<usize> {
        self.lattice.index_of(s)
    }

    /// Index of the whole base group.
    pub fn top(&self) -> usize {
        self.lattice.len() - 1
    }

    pub fn morphism_count(&self) -> usize {
        self.homs.iter().map(BTreeSet::len).sum()
    }

    /// Raw maps of `Hom_F(P, S)`, images aligned with `P`'s elements.
    pub fn maps_from(&self, p: usize) -> impl Iterator<Item = &[Elem]> {
        self.homs[p].iter().map(Vec::as_slice)
    }

    pub fn image_index(&self, images: &[Elem]) -> usize {
        self.lattice
            .find(&images.iter().copied().collect())
            .expect("images of an injective homomorphism form a subgroup")
    }

    /// `Hom_F(P, Q)` as explicit homomorphisms.
    pub fn homset(&self, p: usize, q: usize) -> Vec<InjHom> {
        let (src, tgt) = (self.subgroup(p), self.subgroup(q));
        self.homs[p]
            .iter()
            .filter(|m| m.iter().all(|&y| tgt.contains(y)))
            .map(|m| InjHom { source: src.clone(), target: tgt.clone(), images: m.clone() })
            .collect()
    }

    /// Maps in `Aut_F(P)`.
    pub fn automorphisms(&self, p: usize) -> Vec<&[Elem]> {
        let sub = self.subgroup(p);
        self.homs[p].iter().filter(|m| m.iter().all(|&y| sub.contains(y))).map(Vec::as_slice).collect()
    }

    /// Every morphism, as a map into the whole base group.
    pub fn all_morphisms(&self) -> Vec<InjHom> {
        let top = self.base.whole();
        self.homs
            .iter()
            .enumerate()
            .flat_map(|(i, set)| {
                let src = self.subgroup(i).clone();
                let top = top.clone();
                set.iter().map(move |m| InjHom { source: src.clone(), target: top.clone(), images: m.clone() })
            })
            .collect()
    }

    pub fn contains(&self, hom: &InjHom) -> bool {
        match self.index_of(&hom.source) {
            Some(i) => {
                self.homs[i].contains(&hom.images) && hom.images.iter().all(|&y| hom.target.contains(y))
            }
            None => false,
        }
    }

    /// `Aut_S(P)` as maps, i.e. conjugations by `N_S(P)`.
    pub fn aut_s(&self, p: usize) -> BTreeSet<Map> {
        let sub = self.subgroup(p);
        self.base
            .normalizer(sub)
            .elements()
            .iter()
            .map(|&s| sub.elements().iter().map(|&x| self.base.conj(s, x)).collect())
            .collect()
    }

    /// F-conjugacy classes of subgroups, each sorted, ordered by least member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut class_of = vec![usize::MAX; self.lattice.len()];
        let mut classes = Vec::new();
        for i in 0..self.lattice.len() {
            if class_of[i] != usize::MAX {
                continue;
            }
            let members = self.class_members(i);
            for &j in &members {
                class_of[j] = classes.len();
            }
            classes.push(members);
        }
        classes
    }

    /// Subgroups F-isomorphic to `P`, in subgroup order.
    pub fn class_members(&self, p: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.homs[p].iter().map(|m| self.image_index(m)).collect();
        set.into_iter().collect()
    }

    pub fn is_fully_normalized(&self, p: usize) -> bool {
        let n = self.base.normalizer(self.subgroup(p)).len();
        self.class_members(p).iter().all(|&q| self.base.normalizer(self.subgroup(q)).len() <= n)
    }

    pub fn is_fully_centralized(&self, p: usize) -> bool {
        let c = self.base.centralizer(self.subgroup(p)).len();
        self.class_members(p).iter().all(|&q| self.base.centralizer(self.subgroup(q)).len() <= c)
    }

    /// Least fully normalized member of the class of `P`.
    pub fn fully_normalized_representative(&self, p: usize) -> usize {
        let members = self.class_members(p);
        let best = members.iter().map(|&q| self.base.normalizer(self.subgroup(q)).len()).max().unwrap();
        *members
            .iter()
            .find(|&&q| self.base.normalizer(self.subgroup(q)).len() == best)
            .unwrap()
    }

    pub fn is_centric(&self, p: usize) -> bool {
        self.class_members(p).iter().all(|&q| {
            let sub = self.subgroup(q);
            self.base.centralizer(sub).is_subgroup_of(sub)
        })
    }

    pub fn centric_subgroups(&self) -> Vec<Subgroup> {
        (0..self.lattice.len()).filter(|&i| self.is_centric(i)).map(|i| self.subgroup(i).clone()).collect()
    }

    /// `Out_F(P) = Aut_F(P) / Inn(P)` as an explicit group.
    pub fn out_f(&self, p: usize) -> Result<Group, GroupError> {
        let sub = self.subgroup(p);
        let to_perm = |m: &[Elem]| -> Vec<Elem> {
            m.iter().map(|&y| sub.position(y).unwrap() as Elem).collect()
        };
        // The identity map lists P's elements in order, so it sorts first.
        let auts: Vec<Vec<Elem>> = self.automorphisms(p).into_iter().map(to_perm).collect();
        let aut = Group::from_elements(format!("Aut_F({sub})"), &auts, |a, b| {
            b.iter().map(|&k| a[k as usize]).collect()
        })?;
        let index: HashMap<&Vec<Elem>, Elem> = auts.iter().zip(0..).collect();
        let inner: Vec<Elem> = sub
            .elements()
            .iter()
            .map(|&x| {
                let m: Map = sub.elements().iter().map(|&y| self.base.conj(x, y)).collect();
                index[&to_perm(&m)]
            })
            .collect();
        let inn = Subgroup::new(&aut, inner)?;
        Ok(aut.quotient(&inn)?.with_name(format!("Out_F({sub})")))
    }

    /// `Hom_F(P, Q)` split into orbits under post-composition with `c_q`, `q ∈ Q`.
    pub fn orbit_homset(&self, p: usize, q: usize) -> Vec<Vec<InjHom>> {
        let tgt = self.subgroup(q);
        let mut remaining: BTreeSet<InjHom> = self.homset(p, q).into_iter().collect();
        let mut orbits = Vec::new();
        while let Some(first) = remaining.pop_first() {
            let mut orbit: BTreeSet<InjHom> = BTreeSet::new();
            for &x in tgt.elements() {
                let images = first.images.iter().map(|&y| self.base.conj(x, y)).collect();
                let h = InjHom { source: first.source.clone(), target: first.target.clone(), images };
                remaining.remove(&h);
                orbit.insert(h);
            }
            orbits.push(orbit.into_iter().collect());
        }
        orbits
    }

    /// Whether no morphism moves a subgroup of `T` outside `T`.
    pub fn is_strongly_closed(&self, t: usize) -> bool {
        let tset = self.subgroup(t).set();
        (0..self.lattice.len())
            .filter(|&i| self.subgroup(i).set().is_subset(tset))
            .all(|i| self.homs[i].iter().all(|m| m.iter().all(|&y| tset.contains(y))))
    }

    /// Checks the Sylow, centralizer and extension axioms directly.
    pub fn saturation(&self) -> SaturationReport {
        let n = self.lattice.len();
        let norm: Vec<usize> = (0..n).map(|i| self.base.normalizer(self.subgroup(i)).len()).collect();
        let cent: Vec<usize> = (0..n).map(|i| self.base.centralizer(self.subgroup(i)).len()).collect();
        let mut max_cent = vec![0; n];
        let mut witnesses = Vec::new();
        for class in self.conjugacy_classes() {
            let best_n = class.iter().map(|&i| norm[i]).max().unwrap();
            let best_c = class.iter().map(|&i| cent[i]).max().unwrap();
            for &i in &class {
                max_cent[i] = best_c;
            }
            for &i in class.iter().filter(|&&i| norm[i] == best_n) {
                if cent[i] != best_c {
                    witnesses.push(SaturationWitness::CentralizedFailure { subgroup: self.subgroup(i).clone() });
                }
                let aut_f = self.automorphisms(i).len();
                let aut_s = norm[i] / cent[i];
                if aut_s != p_part(aut_f, self.p) {
                    witnesses.push(SaturationWitness::SylowFailure {
                        subgroup: self.subgroup(i).clone(),
                        aut_s,
                        aut_f,
                    });
                }
            }
        }
        let mut aut_s_cache: HashMap<usize, BTreeSet<Map>> = HashMap::new();
        for i in 0..n {
            let sub = self.subgroup(i);
            let normalizer = self.base.normalizer(sub);
            for phi in &self.homs[i] {
                let q = self.image_index(phi);
                if cent[q] != max_cent[q] {
                    continue;
                }
                let target = self.subgroup(q);
                let aut_s_q = aut_s_cache.entry(q).or_insert_with(|| self.aut_s(q));
                // φ c_g φ⁻¹ on φ(P), listed over φ(P)'s sorted elements.
                let mut inverse = vec![0; target.len()];
                for (k, &y) in phi.iter().enumerate() {
                    inverse[target.position(y).unwrap()] = sub.elements()[k];
                }
                let n_phi: ElemSet = normalizer
                    .elements()
                    .iter()
                    .copied()
                    .filter(|&g| {
                        let conj: Map = inverse
                            .iter()
                            .map(|&x| phi[sub.position(self.base.conj(g, x)).unwrap()])
                            .collect();
                        aut_s_q.contains(&conj)
                    })
                    .collect();
                let np = self.lattice.find(&n_phi).expect("N_phi is a subgroup");
                let big = self.subgroup(np);
                let extends = self.homs[np].iter().any(|psi| {
                    sub.elements().iter().zip(phi).all(|(&x, &y)| psi[big.position(x).unwrap()] == y)
                });
                if !extends {
                    witnesses.push(SaturationWitness::ExtensionFailure {
                        morphism: InjHom { source: sub.clone(), target: target.clone(), images: phi.clone() },
                        n_phi: big.clone(),
                    });
                }
            }
        }
        SaturationReport { saturated: witnesses.is_empty(), witnesses }
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation().saturated
    }

    /// Checks the fusion-system axioms on the stored morphism sets.
    pub fn validate(&self) -> Result<(), FusionError> {
        let axiom = |msg: String| Err(FusionError::Axiom(msg));
        for i in 0..self.lattice.len() {
            let sub = self.subgroup(i);
            for s in self.base.elements() {
                let c: Map = sub.elements().iter().map(|&x| self.base.conj(s, x)).collect();
                if !self.homs[i].contains(&c) {
                    return axiom(format!("conjugation by {s} on {sub} missing"));
                }
            }
            for phi in &self.homs[i] {
                let hom = InjHom { source: sub.clone(), target: self.base.whole(), images: phi.clone() };
                InjHom::new(&self.base, hom.source.clone(), &self.base, hom.target.clone(), hom.images.clone())?;
                let q = self.image_index(phi);
                let (inv_idx, inv) = invert(&self.lattice, i, phi);
                if inv_idx != q || !self.homs[q].contains(&inv) {
                    return axiom(format!("inverse of {hom} missing"));
                }
                for psi in &self.homs[q] {
                    if !self.homs[i].contains(&compose(&self.lattice, q, psi, phi)) {
                        return axiom(format!("composite through {} missing", self.subgroup(q)));
                    }
                }
                for &r in self.lattice.maximal(i) {
                    if !self.homs[r].contains(&restrict(&self.lattice, i, phi, r)) {
                        return axiom(format!("restriction of {hom} to {} missing", self.subgroup(r)));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_same_base(&self, other: &FusionSystem) -> Result<(), FusionError> {
        if self.p != other.p || !self.base.same_table(&other.base) {
            return Err(FusionError::MismatchedBase);
        }
        Ok(())
    }
}

/// Whether the two systems have identical morphism sets.
pub fn fusion_equal(a: &FusionSystem, b: &FusionSystem) -> Result<bool, FusionError> {
    a.check_same_base(b)?;
    Ok(a.homs == b.homs)
}

/// Whether every morphism of `a` lies in `b`.
pub fn is_subfusion(a: &FusionSystem, b: &FusionSystem) -> Result<bool, FusionError> {
    a.check_same_base(b)?;
    Ok(a.homs.iter().zip(&b.homs).all(|(x, y)| x.is_subset(y)))
}

fn compose(lattice: &SubgroupLattice, psi_src: usize, psi: &[Elem], phi: &[Elem]) -> Map {
    let mid = lattice.get(psi_src);
    phi.iter().map(|&y| psi[mid.position(y).unwrap()]).collect()
}

fn restrict(lattice: &SubgroupLattice, src: usize, phi: &[Elem], to: usize) -> Map {
    let big = lattice.get(src);
    lattice.get(to).elements().iter().map(|&x| phi[big.position(x).unwrap()]).collect()
}

fn invert(lattice: &SubgroupLattice, src: usize, phi: &[Elem]) -> (usize, Map) {
    let q = lattice.find(&phi.iter().copied().collect()).expect("image is a subgroup");
    let target = lattice.get(q);
    let mut inv = vec![0; phi.len()];
    for (k, &y) in phi.iter().enumerate() {
        inv[target.position(y).unwrap()] = lattice.get(src).elements()[k];
    }
    (q, inv)
}

/// Worklist closure over the groupoid of F-isomorphisms.
struct Closure<'a> {
    lattice: &'a SubgroupLattice,
    homs: Vec<BTreeSet<Map>>,
    /// `into[Q]` lists the stored maps whose image is exactly `Q`.
    into: Vec<Vec<(usize, Map)>>,
    queue: VecDeque<(usize, Map)>,
}

impl<'a> Closure<'a> {
    fn new(lattice: &'a SubgroupLattice) -> Self {
        Closure {
            lattice,
            homs: vec![BTreeSet::new(); lattice.len()],
            into: vec![Vec::new(); lattice.len()],
            queue: VecDeque::new(),
        }
    }

    fn add(&mut self, src: usize, map: Map) {
        if self.homs[src].insert(map.clone()) {
            let q = self.lattice.find(&map.iter().copied().collect()).expect("image is a subgroup");
            self.into[q].push((src, map.clone()));
            self.queue.push_back((src, map));
        }
    }

    fn run(&mut self) {
        while let Some((src, phi)) = self.queue.pop_front() {
            let (q, inv) = invert(self.lattice, src, &phi);
            self.add(q, inv);
            let after: Vec<Map> = self.homs[q].iter().map(|psi| compose(self.lattice, q, psi, &phi)).collect();
            for m in after {
                self.add(src, m);
            }
            let before: Vec<(usize, Map)> = self.into[src]
                .iter()
                .map(|(r, chi)| (*r, compose(self.lattice, src, &phi, chi)))
                .collect();
            for (r, m) in before {
                self.add(r, m);
            }
            for &r in self.lattice.maximal(src) {
                let m = restrict(self.lattice, src, &phi, r);
                self.add(r, m);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Perm;

    fn perm_group(name: &str, degree: usize, gens: &[&str]) -> Group {
        let gens = gens.iter().map(|g| Perm::parse_cycles(g, degree).unwrap()).collect();
        Group::from_permutations(name, degree, gens).unwrap()
    }

    fn transporter(g: &Group, p: u32) -> FusionSystem {
        FusionSystem::from_group(g, &g.sylow(p).unwrap(), p).unwrap()
    }

    fn v4() -> Arc<Group> {
        Arc::new(perm_group("V4", 4, &["(1 2)(3 4)", "(1 3)(2 4)"]))
    }

    /// An automorphism of `V4` given by where it sends the basis `[1, 2]`.
    fn v4_aut(g: &Group, a: Elem, b: Elem) -> InjHom {
        let images: Vec<Elem> = g.elements().map(|x| match x {
            0 => 0,
            1 => a,
            2 => b,
            _ => g.mul(a, b),
        }).collect();
        InjHom::new(g, g.whole(), g, g.whole(), images).unwrap()
    }

    #[test]
    fn abelian_self_fusion_is_trivial() {
        let c2 = perm_group("C2", 2, &["(1 2)"]);
        let f = transporter(&c2, 2);
        assert!(f.maps_from(0).count() == 1 && f.maps_from(1).count() == 1);
        f.validate().unwrap();
    }

    #[test]
    fn a4_fusion_on_v4() {
        let a4 = perm_group("A4", 4, &["(1 2 3)", "(1 2)(3 4)"]);
        let f = transporter(&a4, 2);
        // |N_A4(V4) / C_A4(V4)| by brute force over A4.
        let v = a4.sylow(2).unwrap();
        let n = a4.elements().filter(|&g| v.elements().iter().all(|&x| v.contains(a4.conj(g, x)))).count();
        let c = a4.elements().filter(|&g| v.elements().iter().all(|&x| a4.conj(g, x) == x)).count();
        assert_eq!(f.automorphisms(f.top()).len(), n / c);
        assert_eq!(n / c, 3);
        let classes = f.conjugacy_classes();
        assert_eq!(classes.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 3, 1]);
        let c2 = f.index_of(&f.subgroups()[1].clone()).unwrap();
        assert!(!f.is_strongly_closed(c2));
        assert!(f.is_strongly_closed(f.top()));
        let out = f.out_f(f.top()).unwrap();
        assert_eq!(out.order(), 3);
        f.validate().unwrap();
    }

    #[test]
    fn d8_inner_fusion() {
        let d8 = perm_group("D8", 4, &["(1 2 3 4)", "(1 3)"]);
        let f = transporter(&d8, 2);
        for i in 0..f.lattice().len() {
            let sub = f.subgroup(i);
            let inner: BTreeSet<Map> = d8
                .elements()
                .map(|s| sub.elements().iter().map(|&x| d8.conj(s, x)).collect())
                .collect();
            assert_eq!(f.homs[i], inner);
        }
        let centric: Vec<usize> = f.centric_subgroups().iter().map(Subgroup::len).collect();
        assert_eq!(centric, vec![4, 4, 4, 8]);
        // Two non-central reflections conjugate in D8 are F-conjugate.
        let classes = f.conjugacy_classes();
        assert!(classes.iter().filter(|c| f.subgroup(c[0]).len() == 2 && c.len() == 2).count() == 2);
        assert!(f.is_saturated());
    }

    #[test]
    fn generated_closure_examples() {
        let c3 = Arc::new(perm_group("C3", 3, &["(1 2 3)"]));
        let inv = InjHom::new(&c3, c3.whole(), &c3, c3.whole(), vec![0, 2, 1]).unwrap();
        let f = FusionSystem::generate(c3.clone(), 3, &[inv]).unwrap();
        assert_eq!(f.automorphisms(f.top()).len(), 2);
        f.validate().unwrap();
        let inner = FusionSystem::generate(c3.clone(), 3, &[]).unwrap();
        assert_eq!(inner.automorphisms(inner.top()).len(), 1);
        assert!(inner.is_saturated());

        let v = v4();
        let rho = v4_aut(&v, 2, 3);
        let f = FusionSystem::generate(v.clone(), 2, &[rho]).unwrap();
        assert_eq!(f.automorphisms(f.top()).len(), 3);
        assert_eq!(f.conjugacy_classes()[1].len(), 3);
        f.validate().unwrap();
        assert!(fusion_equal(&f, &f.regenerate().unwrap()).unwrap());
    }

    #[test]
    fn single_involution_on_v4_is_not_saturated() {
        let v = v4();
        let swap = v4_aut(&v, 2, 1);
        let f = FusionSystem::generate(v.clone(), 2, &[swap]).unwrap();
        let report = f.saturation();
        assert!(!report.saturated);
        assert_eq!(
            report.witnesses,
            vec![SaturationWitness::SylowFailure { subgroup: v.whole(), aut_s: 1, aut_f: 2 }]
        );
    }

    #[test]
    fn subfusion_and_mismatch() {
        let a4 = perm_group("A4", 4, &["(1 2 3)", "(1 2)(3 4)"]);
        let f = transporter(&a4, 2);
        let inner = FusionSystem::generate(f.base().clone(), 2, &[]).unwrap();
        assert!(is_subfusion(&inner, &f).unwrap());
        assert!(!is_subfusion(&f, &inner).unwrap());
        assert!(fusion_equal(&f, &f).unwrap());
        let c3 = Arc::new(perm_group("C3", 3, &["(1 2 3)"]));
        let other = FusionSystem::generate(c3, 3, &[]).unwrap();
        assert_eq!(fusion_equal(&f, &other), Err(FusionError::MismatchedBase));
    }

    #[test]
    fn orbit_sizes_sum_to_homset() {
        let s4 = perm_group("S4", 4, &["(1 2)", "(1 2 3 4)"]);
        let f = transporter(&s4, 2);
        for p in 0..f.lattice().len() {
            for q in 0..f.lattice().len() {
                let total: usize = f.orbit_homset(p, q).iter().map(Vec::len).sum();
                assert_eq!(total, f.homset(p, q).len());
            }
        }
    }

    #[test]
    fn not_sylow_rejected() {
        let s4 = perm_group("S4", 4, &["(1 2)", "(1 2 3 4)"]);
        let v = s4.o_p(2).unwrap();
        assert!(matches!(FusionSystem::from_group(&s4, &v, 2), Err(FusionError::NotSylow { .. })));
    }
}
