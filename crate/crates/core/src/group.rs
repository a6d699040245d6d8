//! Finite groups stored as explicit multiplication tables.
//!
//! Every group carries its full Cayley table with element `0` as the
//! identity. Orders are capped at [`MAX_ORDER`], which keeps subgroup
//! membership representable as a fixed-width [`ElemSet`].

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::error::GroupError;

/// Largest group order the table representation accepts.
pub const MAX_ORDER: usize = 512;
/// Largest order accepted by [`Group::is_isomorphic`].
pub const MAX_ISO_ORDER: usize = 256;
/// Largest permutation degree accepted in generator mode.
pub const MAX_DEGREE: usize = 16;
/// Enumeration limit for permutation generators.
pub const MAX_GENERATED: usize = 10_000;

/// Index of a group element in its table.
pub type Elem = u32;

/// Fixed-width membership bitset over element indices `< MAX_ORDER`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElemSet([u64; MAX_ORDER / 64]);

impl ElemSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: Elem) -> bool {
        let (w, b) = (x as usize / 64, x % 64);
        let fresh = self.0[w] & (1 << b) == 0;
        self.0[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, x: Elem) -> bool {
        let (w, b) = (x as usize / 64, x % 64);
        (x as usize) < MAX_ORDER && self.0[w] & (1 << b) != 0
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a &= b;
        }
        out
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64u32).filter(move |b| bits & (1 << b) != 0).map(move |b| w as u32 * 64 + b)
        })
    }
}

impl FromIterator<Elem> for ElemSet {
    fn from_iter<I: IntoIterator<Item = Elem>>(iter: I) -> Self {
        let mut s = ElemSet::new();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A permutation of `0..degree`, stored as the list of images.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u8).collect())
    }

    /// Builds a permutation from zero-based images.
    pub fn from_images(images: Vec<u8>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i as usize >= images.len() || std::mem::replace(&mut seen[i as usize], true) {
                return None;
            }
        }
        Some(Perm(images))
    }

    /// Parses cycle notation on points `1..=degree`, e.g. `(1 2)(3 4)` or `()`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, String> {
        let mut images: Vec<u8> = (0..degree as u8).collect();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest.strip_prefix('(').ok_or_else(|| format!("expected '(' in {text:?}"))?;
            let close = open.find(')').ok_or_else(|| format!("unclosed cycle in {text:?}"))?;
            let points: Vec<usize> = open[..close]
                .split([' ', ','])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|e| format!("bad point {t:?}: {e}")))
                .collect::<Result<_, _>>()?;
            for &pt in &points {
                if pt == 0 || pt > degree {
                    return Err(format!("point {pt} outside 1..={degree}"));
                }
            }
            let distinct: HashSet<_> = points.iter().collect();
            if distinct.len() != points.len() {
                return Err(format!("repeated point in cycle of {text:?}"));
            }
            // Cycles are composed left to right.
            let mut cycle_map: Vec<u8> = (0..degree as u8).collect();
            for (k, &pt) in points.iter().enumerate() {
                cycle_map[pt - 1] = (points[(k + 1) % points.len()] - 1) as u8;
            }
            images = images.iter().map(|&i| cycle_map[i as usize]).collect();
            rest = open[close + 1..].trim_start();
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    /// Left-to-right product: apply `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    /// Cycle notation with cycles led by their smallest point; `()` for the identity.
    pub fn to_cycles(&self) -> String {
        let mut seen = vec![false; self.0.len()];
        let mut out = String::new();
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cycle = vec![start + 1];
            seen[start] = true;
            let mut j = self.0[start] as usize;
            while j != start {
                seen[j] = true;
                cycle.push(j + 1);
                j = self.0[j] as usize;
            }
            out.push('(');
            out.push_str(&cycle.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// A subgroup, given by the sorted list of its element indices.
///
/// Subgroups do not own their parent; operations that need the table take
/// the parent [`Group`] explicitly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<Elem>,
    set: ElemSet,
}

impl Subgroup {
    /// Builds a subgroup of `group`, checking closure and Lagrange.
    pub fn new(group: &Group, elements: impl IntoIterator<Item = Elem>) -> Result<Self, GroupError> {
        let elements: Vec<Elem> = elements.into_iter().collect();
        if let Some(&x) = elements.iter().find(|&&x| x as usize >= group.order()) {
            return Err(GroupError::NotASubgroup(format!("element {x} outside the group")));
        }
        let sub = Subgroup::from_set(elements.into_iter().collect());
        if !sub.set.contains(0) {
            return Err(GroupError::NotASubgroup(sub.to_string()));
        }
        for &a in &sub.elements {
            if !sub.set.contains(group.inv(a)) {
                return Err(GroupError::NotASubgroup(sub.to_string()));
            }
            for &b in &sub.elements {
                if !sub.set.contains(group.mul(a, b)) {
                    return Err(GroupError::NotASubgroup(sub.to_string()));
                }
            }
        }
        if !group.order().is_multiple_of(sub.len()) {
            return Err(GroupError::NotASubgroup(sub.to_string()));
        }
        Ok(sub)
    }

    pub(crate) fn from_set(set: ElemSet) -> Self {
        Subgroup { elements: set.iter().collect(), set }
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn set(&self) -> &ElemSet {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.set.contains(x)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.set.is_subset(&other.set)
    }

    /// Position of `x` in the sorted element list.
    pub fn position(&self, x: Elem) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.len(), &self.elements).cmp(&(other.len(), &other.elements))
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_elements(f, &self.elements)
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{self}")
    }
}

pub(crate) fn write_elements(f: &mut impl fmt::Write, elems: &[Elem]) -> fmt::Result {
    f.write_char('[')?;
    for (k, x) in elems.iter().enumerate() {
        if k > 0 {
            f.write_char(',')?;
        }
        write!(f, "{x}")?;
    }
    f.write_char(']')
}

/// Formats an element list as `[0,3,5,6]`.
pub fn format_elements(elems: &[Elem]) -> String {
    let mut s = String::new();
    write_elements(&mut s, elems).expect("writing to a String");
    s
}

/// An elementary abelian subgroup together with its chosen ordered basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ElementaryAbelian {
    pub subgroup: Subgroup,
    pub basis: Vec<Elem>,
}

/// How a group was specified, kept for faithful serialization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GroupSource {
    Table,
    Permutations { degree: usize, generators: Vec<Perm> },
}

/// A finite group given by its multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct Group {
    name: String,
    order: usize,
    table: Vec<Elem>,
    inverses: Vec<Elem>,
    labels: Option<Vec<String>>,
    factorization: Vec<(u32, u32)>,
    source: GroupSource,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({} of order {})", self.name, self.order)
    }
}

impl Group {
    /// Validates a multiplication table given as rows.
    pub fn from_table(name: impl Into<String>, rows: Vec<Vec<Elem>>) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::NoIdentity(0));
        }
        if n > MAX_ORDER {
            return Err(GroupError::OrderBoundExceeded { order: n, bound: MAX_ORDER });
        }
        let mut table = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::Malformed(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                if v as usize >= n {
                    return Err(GroupError::NotClosed { row: r as Elem, col: c as Elem, value: v });
                }
            }
            table.extend_from_slice(row);
        }
        Self::from_flat_table(name.into(), n, table, GroupSource::Table)
    }

    fn from_flat_table(
        name: String,
        n: usize,
        table: Vec<Elem>,
        source: GroupSource,
    ) -> Result<Self, GroupError> {
        for i in 0..n {
            if table[i] as usize != i || table[i * n] as usize != i {
                return Err(GroupError::NoIdentity(i as Elem));
            }
        }
        let mut seen = vec![false; n];
        for r in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for c in 0..n {
                if std::mem::replace(&mut seen[table[r * n + c] as usize], true) {
                    return Err(GroupError::NotLatin { line: r as Elem, column: false });
                }
            }
        }
        for c in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for r in 0..n {
                if std::mem::replace(&mut seen[table[r * n + c] as usize], true) {
                    return Err(GroupError::NotLatin { line: c as Elem, column: true });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b] as usize;
                for c in 0..n {
                    let bc = table[b * n + c] as usize;
                    if table[ab * n + c] != table[a * n + bc] {
                        return Err(GroupError::NonAssociative(a as Elem, b as Elem, c as Elem));
                    }
                }
            }
        }
        let mut inverses = vec![0; n];
        for a in 0..n {
            inverses[a] = (0..n).find(|&b| table[a * n + b] == 0).expect("Latin row contains 0") as Elem;
        }
        Ok(Group {
            name,
            order: n,
            table,
            inverses,
            labels: None,
            factorization: factorize(n as u32),
            source,
        })
    }

    /// Enumerates the group generated by permutations of `degree` points.
    ///
    /// Elements are numbered breadth-first: element `0` is the identity and
    /// each dequeued element is multiplied on the right by the generators in
    /// the order given.
    pub fn from_permutations(
        name: impl Into<String>,
        degree: usize,
        generators: Vec<Perm>,
    ) -> Result<Self, GroupError> {
        if degree > MAX_DEGREE {
            return Err(GroupError::DegreeTooLarge { degree, bound: MAX_DEGREE });
        }
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(GroupError::Malformed("generator degree mismatch".into()));
        }
        let limit = MAX_ORDER.min(MAX_GENERATED);
        let elements = bfs_closure(Perm::identity(degree), &generators, |a, b| a.then(b), limit)
            .ok_or(GroupError::OrderBoundExceeded { order: limit + 1, bound: MAX_ORDER })?;
        let labels = elements.iter().map(Perm::to_cycles).collect();
        let mut g = Self::from_elements(name, &elements, |a, b| a.then(b))?;
        g.labels = Some(labels);
        g.source = GroupSource::Permutations { degree, generators };
        Ok(g)
    }

    /// Builds a group from a complete list of elements closed under `mul`,
    /// with the identity at position 0.
    pub fn from_elements<T: Clone + Eq + Hash>(
        name: impl Into<String>,
        elements: &[T],
        mul: impl Fn(&T, &T) -> T,
    ) -> Result<Self, GroupError> {
        let n = elements.len();
        if n > MAX_ORDER {
            return Err(GroupError::OrderBoundExceeded { order: n, bound: MAX_ORDER });
        }
        let index: HashMap<&T, Elem> = elements.iter().zip(0..).collect();
        let mut table = Vec::with_capacity(n * n);
        for (r, a) in elements.iter().enumerate() {
            for (c, b) in elements.iter().enumerate() {
                let prod = mul(a, b);
                let &k = index.get(&prod).ok_or(GroupError::NotClosed {
                    row: r as Elem,
                    col: c as Elem,
                    value: n as Elem,
                })?;
                table.push(k);
            }
        }
        Self::from_flat_table(name.into(), n, table, GroupSource::Table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Equality of multiplication tables, ignoring names and labels.
    pub fn same_table(&self, other: &Group) -> bool {
        self.order == other.order && self.table == other.table
    }

    pub fn source(&self) -> &GroupSource {
        &self.source
    }

    pub fn factorization(&self) -> &[(u32, u32)] {
        &self.factorization
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a as usize]
    }

    /// `g x g⁻¹`.
    #[inline]
    pub fn conj(&self, g: Elem, x: Elem) -> Elem {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    pub fn row(&self, a: Elem) -> &[Elem] {
        let n = self.order;
        &self.table[a as usize * n..(a as usize + 1) * n]
    }

    pub fn label(&self, x: Elem) -> String {
        match &self.labels {
            Some(l) => l[x as usize].clone(),
            None => x.to_string(),
        }
    }

    /// Permutation of element `x` when the group came from generators.
    pub fn permutation(&self, x: Elem) -> Option<Perm> {
        match &self.source {
            GroupSource::Permutations { degree, .. } => {
                Some(Perm::parse_cycles(&self.labels.as_ref()?[x as usize], *degree).ok()?)
            }
            GroupSource::Table => None,
        }
    }

    pub fn element_order(&self, x: Elem) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order as Elem).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_set(self.elements().collect())
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::from_set([0].into_iter().collect())
    }

    /// The largest power of `p` dividing the order.
    pub fn p_part(&self, p: u32) -> usize {
        p_part(self.order, p)
    }

    pub fn is_p_group(&self, p: u32) -> bool {
        self.p_part(p) == self.order
    }

    /// Subgroup generated by `gens`.
    pub fn generate(&self, gens: &[Elem]) -> Subgroup {
        Subgroup::from_set(self.closure_set(gens))
    }

    fn closure_set(&self, gens: &[Elem]) -> ElemSet {
        let mut set = ElemSet::new();
        set.insert(0);
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, g: Elem, h: &Subgroup) -> Subgroup {
        Subgroup::from_set(h.elements().iter().map(|&x| self.conj(g, x)).collect())
    }

    pub fn is_normal(&self, h: &Subgroup) -> bool {
        self.elements().all(|g| h.elements().iter().all(|&x| h.contains(self.conj(g, x))))
    }

    /// `C_G(P)`.
    pub fn centralizer(&self, p: &Subgroup) -> Subgroup {
        Subgroup::from_set(
            self.elements()
                .filter(|&g| p.elements().iter().all(|&x| self.mul(g, x) == self.mul(x, g)))
                .collect(),
        )
    }

    /// `N_G(P)`.
    pub fn normalizer(&self, p: &Subgroup) -> Subgroup {
        Subgroup::from_set(
            self.elements()
                .filter(|&g| p.elements().iter().all(|&x| p.contains(self.conj(g, x))))
                .collect(),
        )
    }

    /// `Z(P)` for a subgroup `P`.
    pub fn center_of(&self, p: &Subgroup) -> Subgroup {
        Subgroup::from_set(self.centralizer(p).set().intersection(p.set()))
    }

    /// Every subgroup exactly once, sorted by size and then element list.
    pub fn subgroups(&self) -> Result<Vec<Subgroup>, GroupError> {
        if self.order > MAX_ORDER {
            return Err(GroupError::OrderBoundExceeded { order: self.order, bound: MAX_ORDER });
        }
        // Every subgroup is a join of cyclic subgroups, so joining each known
        // subgroup with each cyclic subgroup reaches the whole lattice.
        let mut cyclic: Vec<(Elem, ElemSet)> = Vec::new();
        let mut seen_cyclic = HashSet::new();
        for x in self.elements() {
            let s = self.closure_set(&[x]);
            if seen_cyclic.insert(s) {
                cyclic.push((x, s));
            }
        }
        let mut known: HashSet<ElemSet> = HashSet::new();
        let mut work: Vec<(ElemSet, Vec<Elem>)> = Vec::new();
        for (x, s) in &cyclic {
            if known.insert(*s) {
                work.push((*s, if *x == 0 { vec![] } else { vec![*x] }));
            }
        }
        let mut i = 0;
        while i < work.len() {
            let (set, gens) = work[i].clone();
            for (x, c) in &cyclic {
                if c.is_subset(&set) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(*x);
                let joined = self.closure_set(&g2);
                if known.insert(joined) {
                    work.push((joined, g2));
                }
            }
            i += 1;
        }
        let mut subs: Vec<Subgroup> = work.into_iter().map(|(s, _)| Subgroup::from_set(s)).collect();
        subs.sort();
        Ok(subs)
    }

    /// The first subgroup, in subgroup order, whose order is the full `p`-part.
    pub fn sylow(&self, p: u32) -> Result<Subgroup, GroupError> {
        check_prime(p)?;
        let target = self.p_part(p);
        if target == 1 {
            return Ok(self.trivial());
        }
        if target == self.order {
            return Ok(self.whole());
        }
        Ok(self
            .subgroups()?
            .into_iter()
            .find(|s| s.len() == target)
            .expect("Sylow's theorem guarantees a subgroup of full p-power order"))
    }

    /// Largest normal `p`-subgroup: the intersection of all Sylow conjugates.
    pub fn o_p(&self, p: u32) -> Result<Subgroup, GroupError> {
        let syl = self.sylow(p)?;
        let mut acc = *syl.set();
        for g in self.elements() {
            acc = acc.intersection(self.conjugate(g, &syl).set());
        }
        Ok(Subgroup::from_set(acc))
    }

    pub fn is_elementary_abelian(&self, h: &Subgroup, p: u32) -> bool {
        h.elements().iter().all(|&x| x == 0 || self.element_order(x) == p as usize)
            && h.elements().iter().all(|&a| h.elements().iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Greedy basis: elements taken in index order when not yet in the span.
    pub fn elementary_abelian_basis(&self, h: &Subgroup) -> Vec<Elem> {
        let mut basis = Vec::new();
        let mut span = self.closure_set(&[]);
        for &x in h.elements() {
            if !span.contains(x) {
                basis.push(x);
                span = self.closure_set(&basis);
            }
        }
        basis
    }

    /// All elementary abelian `p`-subgroups (including the trivial one).
    pub fn elementary_abelians(&self, p: u32) -> Result<Vec<ElementaryAbelian>, GroupError> {
        check_prime(p)?;
        Ok(self
            .subgroups()?
            .into_iter()
            .filter(|h| h.len() == 1 || (p_part(h.len(), p) == h.len() && self.is_elementary_abelian(h, p)))
            .map(|h| {
                let basis = self.elementary_abelian_basis(&h);
                ElementaryAbelian { subgroup: h, basis }
            })
            .collect())
    }

    /// The subgroup as a standalone group; local index `i` is `h.elements()[i]`.
    pub fn induced(&self, h: &Subgroup, name: impl Into<String>) -> Group {
        let elems = h.elements();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for &a in elems {
            for &b in elems {
                table.push(h.position(self.mul(a, b)).expect("subgroup is closed") as Elem);
            }
        }
        let inverses = elems.iter().map(|&a| h.position(self.inv(a)).unwrap() as Elem).collect();
        let labels = Some(elems.iter().map(|&x| self.label(x)).collect());
        Group {
            name: name.into(),
            order: n,
            table,
            inverses,
            labels,
            factorization: factorize(n as u32),
            source: GroupSource::Table,
        }
    }

    /// `G / N` with cosets numbered by their least element.
    pub fn quotient(&self, n: &Subgroup) -> Result<Group, GroupError> {
        if !self.is_normal(n) {
            return Err(GroupError::NotNormal(n.to_string()));
        }
        let coset_min = |g: Elem| n.elements().iter().map(|&x| self.mul(g, x)).min().unwrap();
        let mut reps: Vec<Elem> = self.elements().filter(|&g| coset_min(g) == g).collect();
        reps.sort_unstable();
        let index: HashMap<Elem, Elem> = reps.iter().zip(0..).map(|(&r, k)| (r, k)).collect();
        let rows = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| index[&coset_min(self.mul(a, b))]).collect())
            .collect();
        Group::from_table(format!("{}/{}", self.name, n), rows)
    }

    /// Decides isomorphism by backtracking over images of a generating set.
    pub fn is_isomorphic(&self, other: &Group) -> Result<bool, GroupError> {
        for g in [self, other] {
            if g.order > MAX_ISO_ORDER {
                return Err(GroupError::OrderBoundExceeded { order: g.order, bound: MAX_ISO_ORDER });
            }
        }
        if self.order != other.order {
            return Ok(false);
        }
        let order_profile = |g: &Group| {
            let mut v: Vec<usize> = g.elements().map(|x| g.element_order(x)).collect();
            v.sort_unstable();
            v
        };
        if order_profile(self) != order_profile(other) || self.is_abelian() != other.is_abelian() {
            return Ok(false);
        }
        let gens = self.small_generating_set();
        let candidates: Vec<Vec<Elem>> = gens
            .iter()
            .map(|&g| {
                let k = self.element_order(g);
                other.elements().filter(|&y| other.element_order(y) == k).collect()
            })
            .collect();
        let mut images = Vec::with_capacity(gens.len());
        Ok(self.extend_isomorphism(other, &gens, &candidates, &mut images))
    }

    fn small_generating_set(&self) -> Vec<Elem> {
        let mut by_order: Vec<Elem> = self.elements().collect();
        by_order.sort_by_key(|&x| (std::cmp::Reverse(self.element_order(x)), x));
        let mut gens = Vec::new();
        let mut span = self.closure_set(&[]);
        for x in by_order {
            if span.len() == self.order {
                break;
            }
            if !span.contains(x) {
                gens.push(x);
                span = self.closure_set(&gens);
            }
        }
        gens
    }

    fn extend_isomorphism(
        &self,
        other: &Group,
        gens: &[Elem],
        candidates: &[Vec<Elem>],
        images: &mut Vec<Elem>,
    ) -> bool {
        let k = images.len();
        if k == gens.len() {
            return true;
        }
        for &y in &candidates[k] {
            images.push(y);
            if self.consistent_partial_map(other, &gens[..=k], images)
                && self.extend_isomorphism(other, gens, candidates, images) {
                    return true;
                }
            images.pop();
        }
        false
    }

    /// Checks that `gens[i] ↦ images[i]` extends to an injective homomorphism
    /// on the subgroup the generators span.
    fn consistent_partial_map(&self, other: &Group, gens: &[Elem], images: &[Elem]) -> bool {
        const NONE: Elem = Elem::MAX;
        let mut map = vec![NONE; self.order];
        let mut used = vec![false; other.order];
        map[0] = 0;
        used[0] = true;
        let mut queue = VecDeque::from([0 as Elem]);
        while let Some(x) = queue.pop_front() {
            for (&g, &y) in gens.iter().zip(images) {
                let z = self.mul(x, g);
                let w = other.mul(map[x as usize], y);
                if map[z as usize] == NONE {
                    if std::mem::replace(&mut used[w as usize], true) {
                        return false;
                    }
                    map[z as usize] = w;
                    queue.push_back(z);
                } else if map[z as usize] != w {
                    return false;
                }
            }
        }
        true
    }
}

/// Breadth-first closure of `gens` starting at `identity`; `None` past `limit`.
pub(crate) fn bfs_closure<T: Clone + Eq + Hash>(
    identity: T,
    gens: &[T],
    mul: impl Fn(&T, &T) -> T,
    limit: usize,
) -> Option<Vec<T>> {
    let mut elements = vec![identity.clone()];
    let mut seen: HashSet<T> = HashSet::from([identity]);
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let y = mul(&elements[i], g);
            if seen.insert(y.clone()) {
                elements.push(y);
                if elements.len() > limit {
                    return None;
                }
            }
        }
        i += 1;
    }
    Some(elements)
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub(crate) fn check_prime(p: u32) -> Result<(), GroupError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(GroupError::NotPrime(p))
    }
}

pub fn p_part(n: usize, p: u32) -> usize {
    let mut n = n;
    let mut out = 1;
    while n.is_multiple_of(p as usize) && n > 0 {
        n /= p as usize;
        out *= p as usize;
    }
    out
}

fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// An injective homomorphism between subgroups, possibly of different groups.
///
/// `images[k]` is the image of `source.elements()[k]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct InjHom {
    pub source: Subgroup,
    pub target: Subgroup,
    pub images: Vec<Elem>,
}

impl InjHom {
    /// Validates multiplicativity, injectivity and that the image lies in `target`.
    pub fn new(
        source_group: &Group,
        source: Subgroup,
        target_group: &Group,
        target: Subgroup,
        images: Vec<Elem>,
    ) -> Result<Self, GroupError> {
        let hom = InjHom { source, target, images };
        hom.check(source_group, target_group)?;
        Ok(hom)
    }

    fn check(&self, sg: &Group, tg: &Group) -> Result<(), GroupError> {
        let bad = |why: &str| GroupError::NotAHomomorphism(format!("{self}: {why}"));
        if self.images.len() != self.source.len() {
            return Err(bad("image count differs from source order"));
        }
        if self.images.iter().any(|&y| !self.target.contains(y) || y as usize >= tg.order()) {
            return Err(bad("image leaves the target"));
        }
        let distinct: HashSet<_> = self.images.iter().collect();
        if distinct.len() != self.images.len() {
            return Err(bad("not injective"));
        }
        for (i, &a) in self.source.elements().iter().enumerate() {
            for (j, &b) in self.source.elements().iter().enumerate() {
                let k = self.source.position(sg.mul(a, b)).ok_or_else(|| bad("source not closed"))?;
                if self.images[k] != tg.mul(self.images[i], self.images[j]) {
                    return Err(bad("not multiplicative"));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: Elem) -> Option<Elem> {
        self.source.position(x).map(|k| self.images[k])
    }

    pub fn image(&self) -> Subgroup {
        Subgroup::from_set(self.images.iter().copied().collect())
    }
}

impl fmt::Display for InjHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} ; images=", self.source, self.target)?;
        write_elements(f, &self.images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm_group(name: &str, degree: usize, gens: &[&str]) -> Group {
        let gens = gens.iter().map(|g| Perm::parse_cycles(g, degree).unwrap()).collect();
        Group::from_permutations(name, degree, gens).unwrap()
    }

    /// Subgroups by brute force: closure of every pair of elements, then
    /// close the resulting family under joins.
    fn brute_force_subgroups(g: &Group) -> usize {
        let mut found: HashSet<ElemSet> = HashSet::new();
        for a in g.elements() {
            for b in g.elements() {
                found.insert(g.closure_set(&[a, b]));
            }
        }
        loop {
            let current: Vec<ElemSet> = found.iter().copied().collect();
            let before = found.len();
            for x in &current {
                for y in &current {
                    let gens: Vec<Elem> = x.iter().chain(y.iter()).collect();
                    found.insert(g.closure_set(&gens));
                }
            }
            if found.len() == before {
                return found.len();
            }
        }
    }

    #[test]
    fn s3_from_permutations() {
        let s3 = perm_group("S3", 3, &["(1 2)", "(1 2 3)"]);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
    }

    #[test]
    fn non_associative_table_names_triple() {
        // Latin square with identity 0 that is not a group table (order 5 loop).
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        match Group::from_table("loop", rows) {
            Err(GroupError::NonAssociative(a, b, c)) => assert!(a > 0 && b > 0 && c > 0),
            other => panic!("expected NonAssociative, got {other:?}"),
        }
    }

    #[test]
    fn identity_and_closure_errors() {
        let rows = vec![vec![1, 0], vec![0, 1]];
        assert!(matches!(Group::from_table("x", rows), Err(GroupError::NoIdentity(_))));
        let rows = vec![vec![0, 1], vec![1, 5]];
        assert!(matches!(Group::from_table("x", rows), Err(GroupError::NotClosed { .. })));
    }

    #[test]
    fn generator_mode_bound() {
        let s7 = vec![
            Perm::parse_cycles("(1 2)", 7).unwrap(),
            Perm::parse_cycles("(1 2 3 4 5 6 7)", 7).unwrap(),
        ];
        assert!(matches!(
            Group::from_permutations("S7", 7, s7),
            Err(GroupError::OrderBoundExceeded { .. })
        ));
    }

    #[test]
    fn subgroup_counts_match_brute_force() {
        let d8 = perm_group("D8", 4, &["(1 2 3 4)", "(1 3)"]);
        let s3 = perm_group("S3", 3, &["(1 2)", "(1 2 3)"]);
        let c2 = perm_group("C2", 2, &["(1 2)"]);
        assert_eq!(brute_force_subgroups(&d8), 10);
        assert_eq!(brute_force_subgroups(&s3), 6);
        assert_eq!(d8.subgroups().unwrap().len(), 10);
        assert_eq!(s3.subgroups().unwrap().len(), 6);
        assert_eq!(c2.subgroups().unwrap().len(), 2);
    }

    #[test]
    fn centralizers_and_normalizers() {
        let d8 = perm_group("D8", 4, &["(1 2 3 4)", "(1 3)"]);
        let z = d8.center_of(&d8.whole());
        assert_eq!(z.len(), 2);
        assert_eq!(d8.centralizer(&z), d8.whole());

        let s3 = perm_group("S3", 3, &["(1 2)", "(1 2 3)"]);
        let r = s3.elements().find(|&x| s3.element_order(x) == 3).unwrap();
        let c3 = s3.generate(&[r]);
        let brute: Vec<Elem> = s3
            .elements()
            .filter(|&g| c3.elements().iter().all(|&x| s3.mul(g, x) == s3.mul(x, g)))
            .collect();
        assert_eq!(s3.centralizer(&c3).elements(), &brute[..]);
        assert_eq!(s3.centralizer(&c3), c3);

        let s4 = perm_group("S4", 4, &["(1 2)", "(1 2 3 4)"]);
        let v4 = s4.o_p(2).unwrap();
        assert_eq!(v4.len(), 4);
        let brute = s4
            .elements()
            .filter(|&g| v4.elements().iter().all(|&x| v4.contains(s4.conj(g, x))))
            .count();
        assert_eq!(brute, 24);
        assert_eq!(s4.normalizer(&v4), s4.whole());
    }

    #[test]
    fn sylow_subgroups() {
        let s4 = perm_group("S4", 4, &["(1 2)", "(1 2 3 4)"]);
        assert_eq!(s4.sylow(2).unwrap().len(), 8);
        let a4 = perm_group("A4", 4, &["(1 2 3)", "(1 2)(3 4)"]);
        let v = a4.sylow(2).unwrap();
        assert_eq!(v.len(), 4);
        assert!(a4.is_elementary_abelian(&v, 2));
        let c15 = perm_group("C15", 8, &["(1 2 3)(4 5 6 7 8)"]);
        assert_eq!(c15.order(), 15);
        assert_eq!(c15.sylow(2).unwrap().len(), 1);
        assert!(matches!(s4.sylow(4), Err(GroupError::NotPrime(4))));
    }

    #[test]
    fn elementary_abelian_counts() {
        let v4 = perm_group("V4", 4, &["(1 2)(3 4)", "(1 3)(2 4)"]);
        assert_eq!(v4.elementary_abelians(2).unwrap().len(), 5);
        let d8 = perm_group("D8", 4, &["(1 2 3 4)", "(1 3)"]);
        let brute = d8
            .subgroups()
            .unwrap()
            .into_iter()
            .filter(|h| {
                h.elements().iter().all(|&x| d8.mul(x, x) == 0)
                    && h.elements().iter().all(|&a| h.elements().iter().all(|&b| d8.mul(a, b) == d8.mul(b, a)))
            })
            .count();
        assert_eq!(brute, 8);
        assert_eq!(d8.elementary_abelians(2).unwrap().len(), 8);
        let c9 = perm_group("C9", 9, &["(1 2 3 4 5 6 7 8 9)"]);
        let eas = c9.elementary_abelians(3).unwrap();
        assert_eq!(eas.len(), 2);
        assert_eq!(eas[1].basis.len(), 1);
    }

    #[test]
    fn isomorphism_tests() {
        let c4 = perm_group("C4", 4, &["(1 2 3 4)"]);
        let v4 = perm_group("V4", 4, &["(1 2)(3 4)", "(1 3)(2 4)"]);
        assert!(!c4.is_isomorphic(&v4).unwrap());
        let d8a = perm_group("D8", 4, &["(1 2 3 4)", "(1 3)"]);
        let d8b = perm_group("D8'", 4, &["(1 3)", "(1 2)(3 4)"]);
        assert!(d8a.is_isomorphic(&d8b).unwrap());
        let s3 = perm_group("S3", 3, &["(1 2)", "(1 2 3)"]);
        let c6 = perm_group("C6", 5, &["(1 2)(3 4 5)"]);
        assert!(!s3.is_isomorphic(&c6).unwrap());
        let q8 = perm_group("Q8", 8, &["(1 2 5 6)(3 4 7 8)", "(1 3 5 7)(2 8 6 4)"]);
        assert!(!q8.is_isomorphic(&d8a).unwrap());
    }

    #[test]
    fn quotient_of_s4_by_v4_is_s3() {
        let s4 = perm_group("S4", 4, &["(1 2)", "(1 2 3 4)"]);
        let s3 = perm_group("S3", 3, &["(1 2)", "(1 2 3)"]);
        let q = s4.quotient(&s4.o_p(2).unwrap()).unwrap();
        assert!(q.is_isomorphic(&s3).unwrap());
        let t = s4.generate(&[1]);
        assert!(matches!(s4.quotient(&t), Err(GroupError::NotNormal(_))));
    }

    #[test]
    fn cycle_round_trip() {
        let p = Perm::parse_cycles("(3 1 2)(5 4)", 6).unwrap();
        assert_eq!(p.to_cycles(), "(1 2 3)(4 5)");
        assert_eq!(Perm::identity(3).to_cycles(), "()");
        assert!(Perm::parse_cycles("(1 1)", 3).is_err());
        assert!(Perm::parse_cycles("(1 9)", 3).is_err());
    }
}
