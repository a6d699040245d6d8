//! Stable elements at the elementary-abelian level.
//!
//! A degree-`d` stable family assigns a class in `H^d(BV; F_p)` to every
//! elementary abelian subgroup `V` so that all restrictions along the
//! morphisms of a category of elementary abelians agree. The category comes
//! either from a fusion system or from the Quillen category of a finite group.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::cohomology::{cohomology_basis, restriction_matrix, CohoElement, Monomial};
use crate::error::{GroupError, StableError};
use crate::fp::FpMatrix;
use crate::fusion::FusionSystem;
use crate::group::{check_prime, Elem, Group, InjHom, Subgroup, MAX_ORDER};

/// Default bound on cohomological degree.
pub const MAX_STABLE_DEGREE: usize = 40;

/// An elementary abelian subgroup with an ordered basis and coordinates.
#[derive(Clone, Debug)]
pub struct ElemAbelianSite {
    p: u32,
    subgroup: Subgroup,
    basis: Vec<Elem>,
    coords: HashMap<Elem, Vec<u32>>,
}

impl ElemAbelianSite {
    pub fn new(group: &Group, subgroup: &Subgroup, p: u32) -> Result<Self, StableError> {
        check_prime(p)?;
        if subgroup.len() > 1 && !group.is_elementary_abelian(subgroup, p) {
            return Err(StableError::NotElementaryAbelian(subgroup.to_string()));
        }
        let basis = group.elementary_abelian_basis(subgroup);
        let mut coords = HashMap::from([(0, vec![0; basis.len()])]);
        let mut frontier = vec![(0 as Elem, vec![0u32; basis.len()])];
        // Span coordinate by coordinate: multiply in each basis vector up to p - 1 times.
        for (i, &b) in basis.iter().enumerate() {
            let mut next = Vec::new();
            for (x, c) in frontier {
                let (mut y, mut cy) = (x, c.clone());
                next.push((x, c));
                for k in 1..p {
                    y = group.mul(y, b);
                    cy[i] = k;
                    coords.insert(y, cy.clone());
                    next.push((y, cy.clone()));
                }
            }
            frontier = next;
        }
        if coords.len() != subgroup.len() {
            return Err(StableError::NotElementaryAbelian(subgroup.to_string()));
        }
        Ok(ElemAbelianSite { p, subgroup: subgroup.clone(), basis, coords })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn coordinates(&self, x: Elem) -> Option<&[u32]> {
        self.coords.get(&x).map(Vec::as_slice)
    }

    pub fn cohomology_basis(&self, d: usize) -> Vec<Monomial> {
        cohomology_basis(self.p, self.rank(), d)
    }

    /// Matrix of `φ: W → self` in the chosen bases; column `j` holds the
    /// coordinates of `φ(w_j)`.
    fn matrix_of(&self, source: &ElemAbelianSite, phi: impl Fn(Elem) -> Elem) -> Vec<Vec<u32>> {
        let cols: Vec<&[u32]> = source
            .basis
            .iter()
            .map(|&w| self.coordinates(phi(w)).expect("image lies in the target site"))
            .collect();
        (0..self.rank()).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    }
}

impl fmt::Display for ElemAbelianSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.subgroup)
    }
}

/// Degree-`d` matrix of the map induced in cohomology by `φ: W → V`.
///
/// Rows index the monomial basis of `W`, columns that of `V`.
pub fn restriction_map(group: &Group, phi: &InjHom, p: u32, d: usize) -> Result<FpMatrix, StableError> {
    if phi.images.len() != phi.source.len() {
        return Err(GroupError::NotAHomomorphism(phi.to_string()).into());
    }
    let w = ElemAbelianSite::new(group, &phi.source, p)?;
    let v = ElemAbelianSite::new(group, &phi.target, p)?;
    if phi.images.iter().any(|&y| v.coordinates(y).is_none()) {
        return Err(GroupError::NotAHomomorphism(phi.to_string()).into());
    }
    let m = v.matrix_of(&w, |x| phi.apply(x).expect("basis lies in the source"));
    Ok(restriction_matrix(p, &m, w.rank(), d))
}

/// A homomorphism between two sites of a category.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SiteMorphism {
    pub source: usize,
    pub target: usize,
    /// `matrix[i][j]`: coordinate `i` in the target of the image of source basis vector `j`.
    pub matrix: Vec<Vec<u32>>,
}

/// Which fusion morphisms constrain the limit.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MorphismSet {
    /// Index-p inclusions and all isomorphisms between elementary abelians.
    Generating,
    /// Every morphism between elementary abelians.
    All,
}

/// A finite category of elementary abelian p-groups.
#[derive(Clone, Debug)]
pub struct EaCategory {
    p: u32,
    sites: Vec<ElemAbelianSite>,
    morphisms: Vec<SiteMorphism>,
    max_degree: usize,
}

impl EaCategory {
    /// Sites are all elementary abelian subgroups of the base group of `f`.
    pub fn from_fusion(f: &FusionSystem, set: MorphismSet) -> Result<Self, StableError> {
        let base = f.base();
        let p = f.p();
        let mut sites = Vec::new();
        let mut site_of = HashMap::new();
        for (i, sub) in f.subgroups().iter().enumerate() {
            if sub.len() == 1 || base.is_elementary_abelian(sub, p) {
                site_of.insert(i, sites.len());
                sites.push(ElemAbelianSite::new(base, sub, p)?);
            }
        }
        let mut morphisms = HashSet::new();
        for (&li, &w) in &site_of {
            let src = f.subgroup(li);
            for images in f.maps_from(li) {
                let phi = |x: Elem| images[src.position(x).expect("basis lies in the source")];
                let image = f.image_index(images);
                let targets: Vec<usize> = match set {
                    MorphismSet::Generating => vec![site_of[&image]],
                    MorphismSet::All => site_of
                        .iter()
                        .filter(|(&lv, _)| f.subgroup(image).is_subgroup_of(f.subgroup(lv)))
                        .map(|(_, &v)| v)
                        .collect(),
                };
                for v in targets {
                    let matrix = sites[v].matrix_of(&sites[w], phi);
                    morphisms.insert(SiteMorphism { source: w, target: v, matrix });
                }
            }
        }
        if set == MorphismSet::Generating {
            for (&lv, &v) in &site_of {
                for &lw in f.lattice().maximal(lv) {
                    let w = site_of[&lw];
                    let matrix = sites[v].matrix_of(&sites[w], |x| x);
                    morphisms.insert(SiteMorphism { source: w, target: v, matrix });
                }
            }
        }
        Ok(Self::assemble(p, sites, morphisms))
    }

    /// The Quillen category of `g`: every elementary abelian p-subgroup, with
    /// all inclusions and all conjugations `c_h`.
    pub fn quillen(g: &Group, p: u32) -> Result<Self, StableError> {
        if g.order() > MAX_ORDER {
            return Err(GroupError::OrderBoundExceeded { order: g.order(), bound: MAX_ORDER }.into());
        }
        let eas = g.elementary_abelians(p)?;
        let sites = eas
            .iter()
            .map(|e| ElemAbelianSite::new(g, &e.subgroup, p))
            .collect::<Result<Vec<_>, _>>()?;
        let index: HashMap<&Subgroup, usize> = eas.iter().enumerate().map(|(i, e)| (&e.subgroup, i)).collect();
        let mut morphisms = HashSet::new();
        for (w, sw) in sites.iter().enumerate() {
            for (v, sv) in sites.iter().enumerate() {
                if w != v && sw.subgroup().is_subgroup_of(sv.subgroup()) {
                    morphisms.insert(SiteMorphism { source: w, target: v, matrix: sv.matrix_of(sw, |x| x) });
                }
            }
            for h in g.elements() {
                let v = index[&g.conjugate(h, sw.subgroup())];
                let matrix = sites[v].matrix_of(sw, |x| g.conj(h, x));
                morphisms.insert(SiteMorphism { source: w, target: v, matrix });
            }
        }
        Ok(Self::assemble(p, sites, morphisms))
    }

    fn assemble(p: u32, sites: Vec<ElemAbelianSite>, morphisms: HashSet<SiteMorphism>) -> Self {
        let mut morphisms: Vec<SiteMorphism> = morphisms.into_iter().collect();
        morphisms.sort_by(|a, b| (a.source, a.target, &a.matrix).cmp(&(b.source, b.target, &b.matrix)));
        EaCategory { p, sites, morphisms, max_degree: MAX_STABLE_DEGREE }
    }

    pub fn with_degree_bound(mut self, bound: usize) -> Self {
        self.max_degree = bound;
        self
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn sites(&self) -> &[ElemAbelianSite] {
        &self.sites
    }

    pub fn morphisms(&self) -> &[SiteMorphism] {
        &self.morphisms
    }

    pub fn site_index(&self, v: &Subgroup) -> Option<usize> {
        self.sites.iter().position(|s| s.subgroup() == v)
    }

    fn check_degree(&self, d: usize) -> Result<(), StableError> {
        if d > self.max_degree {
            return Err(StableError::DegreeBoundExceeded { degree: d, bound: self.max_degree });
        }
        Ok(())
    }

    /// Restriction matrix of one morphism in degree `d`.
    pub fn restriction(&self, m: &SiteMorphism, d: usize) -> FpMatrix {
        restriction_matrix(self.p, &m.matrix, self.sites[m.source].rank(), d)
    }

    /// The compatibility system `R_φ c_V - c_W = 0` in degree `d`.
    fn system(&self, d: usize) -> (FpMatrix, Vec<usize>, Vec<Vec<Monomial>>) {
        let bases: Vec<Vec<Monomial>> = self.sites.iter().map(|s| s.cohomology_basis(d)).collect();
        let mut offsets = Vec::with_capacity(bases.len());
        let mut total = 0;
        for b in &bases {
            offsets.push(total);
            total += b.len();
        }
        let mut rows = Vec::new();
        let mut seen = HashSet::new();
        for m in &self.morphisms {
            let r = self.restriction(m, d);
            for i in 0..r.rows() {
                let mut row = vec![0u32; total];
                for (j, &x) in r.row(i).iter().enumerate() {
                    row[offsets[m.target] + j] = x;
                }
                let k = offsets[m.source] + i;
                row[k] = (row[k] + self.p - 1) % self.p;
                if row.iter().any(|&x| x != 0) && seen.insert(row.clone()) {
                    rows.push(row);
                }
            }
        }
        (FpMatrix::from_rows(self.p, total, rows), offsets, bases)
    }

    /// Dimension of the degree-`d` limit.
    pub fn dimension(&self, d: usize) -> Result<usize, StableError> {
        self.check_degree(d)?;
        let (system, _, _) = self.system(d);
        Ok(system.cols() - system.rank())
    }

    /// A basis of the degree-`d` limit, one family per free unknown.
    pub fn limit(self: &Arc<Self>, d: usize) -> Result<Vec<StableFamily>, StableError> {
        self.check_degree(d)?;
        let (system, offsets, bases) = self.system(d);
        Ok(system
            .nullspace()
            .into_iter()
            .map(|v| {
                let components = self
                    .sites
                    .iter()
                    .enumerate()
                    .map(|(s, site)| {
                        let slice = &v[offsets[s]..offsets[s] + bases[s].len()];
                        CohoElement::from_dense(self.p, site.rank(), &bases[s], slice)
                    })
                    .collect();
                StableFamily { category: Arc::clone(self), degree: d, components }
            })
            .collect())
    }

    /// Checks `R(ψ∘φ) = R(φ)·R(ψ)` on every composable pair in degree `d`.
    pub fn functoriality_holds(&self, d: usize) -> bool {
        let restrictions: Vec<FpMatrix> = self.morphisms.iter().map(|m| self.restriction(m, d)).collect();
        for (a, ra) in self.morphisms.iter().zip(&restrictions) {
            for (b, rb) in self.morphisms.iter().zip(&restrictions) {
                if a.target != b.source {
                    continue;
                }
                let composite = compose_matrices(self.p, &b.matrix, &a.matrix, self.sites[a.source].rank());
                let rc = restriction_matrix(self.p, &composite, self.sites[a.source].rank(), d);
                if rc != ra.mul(rb) {
                    return false;
                }
            }
        }
        true
    }
}

fn compose_matrices(p: u32, outer: &[Vec<u32>], inner: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    outer
        .iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(inner).map(|(&a, r)| a * r[j]).sum::<u32>() % p)
                .collect()
        })
        .collect()
}

/// A compatible family of classes over every site of a category.
#[derive(Clone, Debug)]
pub struct StableFamily {
    category: Arc<EaCategory>,
    degree: usize,
    components: Vec<CohoElement>,
}

impl PartialEq for StableFamily {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.category, &other.category) && self.degree == other.degree && self.components == other.components
    }
}

impl StableFamily {
    /// Builds a family from explicit components and checks compatibility.
    pub fn from_components(
        category: Arc<EaCategory>,
        degree: usize,
        components: Vec<CohoElement>,
    ) -> Result<Self, StableError> {
        if components.len() != category.sites.len() {
            return Err(StableError::IncompatibleFamily(format!(
                "{} components for {} sites",
                components.len(),
                category.sites.len()
            )));
        }
        for (c, site) in components.iter().zip(&category.sites) {
            if c.p() != category.p || c.rank() != site.rank() {
                return Err(StableError::IncompatibleFamily(format!("component at {site} has the wrong ring")));
            }
            if !c.is_zero() && c.degree() != Some(degree) {
                return Err(StableError::IncompatibleFamily(format!("component at {site} is not of degree {degree}")));
            }
        }
        let family = StableFamily { category, degree, components };
        family.check()?;
        Ok(family)
    }

    /// Restricts a class on the largest site to all others; fails unless that
    /// site contains every other one.
    pub fn from_top(category: Arc<EaCategory>, top: CohoElement) -> Result<Self, StableError> {
        let t = (0..category.sites.len())
            .max_by_key(|&i| category.sites[i].subgroup().len())
            .ok_or_else(|| StableError::NotElementaryAbelian("empty category".into()))?;
        let tsite = &category.sites[t];
        let degree = top.degree().unwrap_or(0);
        let mut components = Vec::with_capacity(category.sites.len());
        for site in &category.sites {
            if !site.subgroup().is_subgroup_of(tsite.subgroup()) {
                return Err(StableError::NotElementaryAbelian(format!("no site contains {site}")));
            }
            let m = tsite.matrix_of(site, |x| x);
            components.push(top.pull_back(&m, site.rank()));
        }
        Self::from_components(category, degree, components)
    }

    pub fn category(&self) -> &Arc<EaCategory> {
        &self.category
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[CohoElement] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(CohoElement::is_zero)
    }

    pub fn is_compatible(&self) -> bool {
        self.check().is_ok()
    }

    fn check(&self) -> Result<(), StableError> {
        for m in &self.category.morphisms {
            let w = &self.category.sites[m.source];
            let pulled = self.components[m.target].pull_back(&m.matrix, w.rank());
            if pulled != self.components[m.source] {
                return Err(StableError::IncompatibleFamily(format!(
                    "restriction from {} to {} disagrees",
                    self.category.sites[m.target], w
                )));
            }
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, StableError> {
        if !Arc::ptr_eq(&self.category, &other.category) {
            return Err(StableError::IncompatibleFamily("families over different categories".into()));
        }
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a.mul(b)).collect();
        Ok(StableFamily { category: Arc::clone(&self.category), degree: self.degree + other.degree, components })
    }

    pub fn pow(&self, k: u32) -> Self {
        let components = self.components.iter().map(|c| c.pow(k)).collect();
        StableFamily { category: Arc::clone(&self.category), degree: self.degree * k as usize, components }
    }

    /// True iff every component dies in `F_p[V]`, i.e. lies in the nilradical.
    pub fn is_nilpotent(&self) -> Result<bool, StableError> {
        self.check()?;
        Ok(self.components.iter().all(|c| c.polynomial_part().is_zero()))
    }
}

impl fmt::Display for StableFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (site, c) in self.category.sites.iter().zip(&self.components) {
            writeln!(f, "V={site} ; {c}")?;
        }
        Ok(())
    }
}

/// Basis of the degree-`d` stable elements of `f`.
pub fn stable_basis(f: &FusionSystem, d: usize) -> Result<Vec<StableFamily>, StableError> {
    if d > MAX_STABLE_DEGREE {
        return Err(StableError::DegreeBoundExceeded { degree: d, bound: MAX_STABLE_DEGREE });
    }
    Arc::new(EaCategory::from_fusion(f, MorphismSet::Generating)?).limit(d)
}

/// Dimensions of the stable elements in degrees `0..=max_degree`.
pub fn poincare_series(f: &FusionSystem, max_degree: usize) -> Result<Vec<usize>, StableError> {
    if max_degree > MAX_STABLE_DEGREE {
        return Err(StableError::DegreeBoundExceeded { degree: max_degree, bound: MAX_STABLE_DEGREE });
    }
    let cat = EaCategory::from_fusion(f, MorphismSet::Generating)?;
    category_series(&cat, max_degree)
}

/// Dimensions of a category's limit in degrees `0..=max_degree`.
pub fn category_series(cat: &EaCategory, max_degree: usize) -> Result<Vec<usize>, StableError> {
    (0..=max_degree).map(|d| cat.dimension(d)).collect()
}

/// The degree-`d` limit over the Quillen category of `g`.
pub fn quillen_limit_finite_group(g: &Group, p: u32, d: usize) -> Result<(usize, Vec<StableFamily>), StableError> {
    let basis = Arc::new(EaCategory::quillen(g, p)?).limit(d)?;
    Ok((basis.len(), basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Perm;

    fn perm_group(name: &str, degree: usize, gens: &[&str]) -> Group {
        let gens = gens.iter().map(|g| Perm::parse_cycles(g, degree).unwrap()).collect();
        Group::from_permutations(name, degree, gens).unwrap()
    }

    fn sylow_fusion(g: &Group, p: u32) -> FusionSystem {
        FusionSystem::from_group(g, &g.sylow(p).unwrap(), p).unwrap()
    }

    #[test]
    fn cyclic_of_order_two_has_one_class_per_degree() {
        let c2 = perm_group("C2", 2, &["(1 2)"]);
        let f = sylow_fusion(&c2, 2);
        for d in 0..8 {
            assert_eq!(stable_basis(&f, d).unwrap().len(), 1);
        }
    }

    #[test]
    fn inner_fusion_on_v4_is_determined_by_top() {
        let v4 = perm_group("V4", 4, &["(1 2)(3 4)", "(1 3)(2 4)"]);
        let f = sylow_fusion(&v4, 2);
        let series = poincare_series(&f, 10).unwrap();
        assert_eq!(series, (1..=11).collect::<Vec<_>>());
        let (dim, _) = quillen_limit_finite_group(&v4, 2, 5).unwrap();
        assert_eq!(dim, 6);
    }

    #[test]
    fn generating_and_all_morphisms_agree() {
        for (g, p) in [
            (perm_group("A4", 4, &["(1 2 3)", "(1 2)(3 4)"]), 2),
            (perm_group("S4", 4, &["(1 2)", "(1 2 3 4)"]), 2),
            (perm_group("S3", 3, &["(1 2)", "(1 2 3)"]), 3),
        ] {
            let f = sylow_fusion(&g, p);
            let gen = EaCategory::from_fusion(&f, MorphismSet::Generating).unwrap();
            let all = EaCategory::from_fusion(&f, MorphismSet::All).unwrap();
            assert_eq!(category_series(&gen, 8).unwrap(), category_series(&all, 8).unwrap(), "{}", g.name());
        }
    }

    #[test]
    fn functoriality_on_s4() {
        let s4 = perm_group("S4", 4, &["(1 2)", "(1 2 3 4)"]);
        let cat = EaCategory::from_fusion(&sylow_fusion(&s4, 2), MorphismSet::All).unwrap();
        for d in 0..5 {
            assert!(cat.functoriality_holds(d));
        }
    }

    #[test]
    fn degree_bound() {
        let c2 = perm_group("C2", 2, &["(1 2)"]);
        let f = sylow_fusion(&c2, 2);
        assert_eq!(
            stable_basis(&f, 41).unwrap_err(),
            StableError::DegreeBoundExceeded { degree: 41, bound: 40 }
        );
        let cat = EaCategory::from_fusion(&f, MorphismSet::Generating).unwrap().with_degree_bound(3);
        assert!(cat.dimension(4).is_err());
    }

    #[test]
    fn nilpotence_on_c3() {
        let c3 = perm_group("C3", 3, &["(1 2 3)"]);
        let cat = Arc::new(EaCategory::from_fusion(&sylow_fusion(&c3, 3), MorphismSet::Generating).unwrap());
        let a = StableFamily::from_top(cat.clone(), CohoElement::parse("a1:1", 3, 1).unwrap()).unwrap();
        let x = StableFamily::from_top(cat.clone(), CohoElement::parse("x1:1", 3, 1).unwrap()).unwrap();
        assert!(a.is_nilpotent().unwrap());
        assert!(a.pow(2).is_zero());
        assert!(!x.is_nilpotent().unwrap());
        assert!(!x.pow(3).is_zero());
    }

    #[test]
    fn incompatible_family_is_rejected() {
        let a4 = perm_group("A4", 4, &["(1 2 3)", "(1 2)(3 4)"]);
        let cat = Arc::new(EaCategory::from_fusion(&sylow_fusion(&a4, 2), MorphismSet::Generating).unwrap());
        let err = StableFamily::from_top(cat, CohoElement::parse("x1:1", 2, 2).unwrap()).unwrap_err();
        assert!(matches!(err, StableError::IncompatibleFamily(_)));
    }

    #[test]
    fn products_of_basis_families_are_stable() {
        let a4 = perm_group("A4", 4, &["(1 2 3)", "(1 2)(3 4)"]);
        let f = sylow_fusion(&a4, 2);
        let cat = Arc::new(EaCategory::from_fusion(&f, MorphismSet::Generating).unwrap());
        let b2 = cat.limit(2).unwrap();
        let b3 = cat.limit(3).unwrap();
        for u in &b2 {
            for v in &b3 {
                assert!(u.mul(v).unwrap().is_compatible());
            }
        }
    }

    #[test]
    fn restriction_map_rejects_non_elementary_abelian() {
        let c9 = perm_group("C9", 9, &["(1 2 3 4 5 6 7 8 9)"]);
        let whole = c9.whole();
        let id = InjHom { source: whole.clone(), target: whole.clone(), images: whole.elements().to_vec() };
        assert!(matches!(restriction_map(&c9, &id, 3, 1), Err(StableError::NotElementaryAbelian(_))));
    }
}
