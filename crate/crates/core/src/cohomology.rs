//! Cohomology of elementary abelian p-groups as graded-commutative algebras.
//!
//! For `V` of rank `n` the ring is `F_2[x_1..x_n]` with `|x_i| = 1` at
//! `p = 2`, and `Λ(a_1..a_n) ⊗ F_p[x_1..x_n]` with `|a_i| = 1`,
//! `|x_i| = 2` at odd `p`. The exterior classes generate the nilradical.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::StableError;
use crate::fp::FpMatrix;

/// `a^ε x^α`; at `p = 2` the exterior mask is always zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exterior: u32,
    powers: Vec<u32>,
}

impl Monomial {
    pub fn new(exterior: u32, powers: Vec<u32>) -> Self {
        debug_assert!(powers.len() >= 32 || exterior >> powers.len() == 0);
        Monomial { exterior, powers }
    }

    pub fn constant(rank: usize) -> Self {
        Monomial { exterior: 0, powers: vec![0; rank] }
    }

    pub fn rank(&self) -> usize {
        self.powers.len()
    }

    pub fn exterior(&self) -> u32 {
        self.exterior
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    pub fn degree(&self, p: u32) -> usize {
        let weight = if p == 2 { 1 } else { 2 };
        self.exterior.count_ones() as usize + weight * self.powers.iter().sum::<u32>() as usize
    }

    fn has_exterior(&self, i: usize) -> bool {
        self.exterior & (1 << i) != 0
    }
}

/// `a_1` before `a_2`, then higher powers of earlier variables first:
/// `x_1² < x_1x_2 < x_2²`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| {
                (0..self.rank())
                    .map(|i| other.has_exterior(i).cmp(&self.has_exterior(i)))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| other.powers.cmp(&self.powers))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        for i in 0..self.rank() {
            if self.has_exterior(i) {
                factors.push(format!("a{}", i + 1));
            }
        }
        for (i, &e) in self.powers.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(format!("x{}", i + 1)),
                _ => factors.push(format!("x{}^{}", i + 1, e)),
            }
        }
        if factors.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&factors.join("*"))
        }
    }
}

/// Monomial basis of the degree-`d` part, in [`Monomial`] order.
pub fn cohomology_basis(p: u32, rank: usize, d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let masks: Vec<u32> = if p == 2 { vec![0] } else { (0..1u32 << rank).collect() };
    let weight = if p == 2 { 1 } else { 2 };
    for mask in masks {
        let ext = mask.count_ones() as usize;
        if ext > d || !(d - ext).is_multiple_of(weight) {
            continue;
        }
        let total = (d - ext) / weight;
        let mut powers = vec![0u32; rank];
        compositions(total as u32, 0, &mut powers, &mut |pw| out.push(Monomial::new(mask, pw.to_vec())));
    }
    out.sort();
    out
}

fn compositions(total: u32, i: usize, acc: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if i == acc.len() {
        if total == 0 {
            emit(acc);
        }
        return;
    }
    if i + 1 == acc.len() {
        acc[i] = total;
        emit(acc);
        acc[i] = 0;
        return;
    }
    for e in 0..=total {
        acc[i] = e;
        compositions(total - e, i + 1, acc, emit);
    }
    acc[i] = 0;
}

/// `(-1)^k` with `k = #{(i ∈ ε, j ∈ ε') : i > j}`, or `None` when `ε ∩ ε' ≠ ∅`.
fn exterior_sign(left: u32, right: u32) -> Option<bool> {
    if left & right != 0 {
        return None;
    }
    let mut swaps = 0;
    let mut r = right;
    while r != 0 {
        let j = r.trailing_zeros();
        swaps += (left >> (j + 1)).count_ones();
        r &= r - 1;
    }
    Some(swaps % 2 == 1)
}

/// A cohomology class of a rank-`n` elementary abelian group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CohoElement {
    p: u32,
    rank: usize,
    terms: BTreeMap<Monomial, u32>,
}

impl CohoElement {
    pub fn zero(p: u32, rank: usize) -> Self {
        CohoElement { p, rank, terms: BTreeMap::new() }
    }

    pub fn one(p: u32, rank: usize) -> Self {
        Self::from_terms(p, rank, [(Monomial::constant(rank), 1)])
    }

    pub fn from_terms(p: u32, rank: usize, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Self {
        let mut e = Self::zero(p, rank);
        for (m, c) in terms {
            assert_eq!(m.rank(), rank, "monomial rank mismatch");
            assert!(p != 2 || m.exterior == 0, "no exterior classes at p = 2");
            e.add_term(m, c);
        }
        e
    }

    /// The exterior generator `a_i` (zero-based `i`); odd `p` only.
    pub fn exterior_generator(p: u32, rank: usize, i: usize) -> Self {
        assert!(p != 2);
        Self::from_terms(p, rank, [(Monomial::new(1 << i, vec![0; rank]), 1)])
    }

    /// The polynomial generator `x_i` (zero-based `i`).
    pub fn polynomial_generator(p: u32, rank: usize, i: usize) -> Self {
        let mut powers = vec![0; rank];
        powers[i] = 1;
        Self::from_terms(p, rank, [(Monomial::new(0, powers), 1)])
    }

    fn add_term(&mut self, m: Monomial, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry = (*entry + c) % self.p;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree when homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|m| m.degree(self.p));
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: u32) -> Self {
        Self::from_terms(self.p, self.rank, self.terms.iter().map(|(m, &v)| (m.clone(), v * (c % self.p))))
    }

    pub fn neg(&self) -> Self {
        self.scale(self.p - 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Graded-commutative product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.rank), (other.p, other.rank), "mismatched cohomology rings");
        let p = self.p as u64;
        let mut out = Self::zero(self.p, self.rank);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                let Some(negative) = exterior_sign(m1.exterior, m2.exterior) else {
                    continue;
                };
                let powers = m1.powers.iter().zip(&m2.powers).map(|(a, b)| a + b).collect();
                let mut c = (c1 as u64 * c2 as u64 % p) as u32;
                if negative {
                    c = (self.p - c) % self.p;
                }
                out.add_term(Monomial::new(m1.exterior | m2.exterior, powers), c);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.p, self.rank), |acc, _| acc.mul(self))
    }

    /// Image in `F_p[V]`: drop every term carrying an exterior class.
    pub fn polynomial_part(&self) -> Self {
        Self::from_terms(
            self.p,
            self.rank,
            self.terms.iter().filter(|(m, _)| m.exterior == 0).map(|(m, &c)| (m.clone(), c)),
        )
    }

    /// Pull back along a group homomorphism `W → V` whose matrix has
    /// `matrix[i][j]` = coordinate `i` of the image of `w_j`.
    pub fn pull_back(&self, matrix: &[Vec<u32>], target_rank: usize) -> Self {
        let pulled = PullBack::new(self.p, matrix, target_rank);
        let mut out = Self::zero(self.p, target_rank);
        for (m, &c) in &self.terms {
            out = out.add(&pulled.monomial(m).scale(c));
        }
        out
    }

    pub fn to_dense(&self, index: &HashMap<Monomial, usize>, len: usize) -> Vec<u32> {
        let mut v = vec![0; len];
        for (m, &c) in &self.terms {
            v[index[m]] = c;
        }
        v
    }

    pub fn from_dense(p: u32, rank: usize, basis: &[Monomial], v: &[u32]) -> Self {
        Self::from_terms(p, rank, basis.iter().cloned().zip(v.iter().copied()))
    }

    /// Parses `a1*x2^3:1 a2*x1:2`; `0` or an empty string is the zero class.
    pub fn parse(text: &str, p: u32, rank: usize) -> Result<Self, StableError> {
        let bad = |m: String| StableError::Malformed(m);
        let mut out = Self::zero(p, rank);
        for token in text.split_whitespace() {
            if token == "0" {
                continue;
            }
            let (mono, coeff) = token.rsplit_once(':').ok_or_else(|| bad(format!("missing ':' in {token:?}")))?;
            let coeff: u32 = coeff.parse().map_err(|_| bad(format!("bad coefficient in {token:?}")))?;
            let mut exterior = 0u32;
            let mut negative = false;
            let mut powers = vec![0u32; rank];
            if mono != "1" {
                for factor in mono.split('*') {
                    let (kind, rest) = factor.split_at(1.min(factor.len()));
                    let (idx, exp) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad(format!("bad exponent in {factor:?}")))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad(format!("bad index in {factor:?}")))?;
                    if idx == 0 || idx > rank {
                        return Err(bad(format!("generator index {idx} outside 1..={rank}")));
                    }
                    match kind {
                        "a" if p != 2 && exp == 1 => {
                            if exterior & (1 << (idx - 1)) != 0 {
                                return Err(bad(format!("repeated exterior factor in {mono:?}")));
                            }
                            negative ^= (exterior >> idx).count_ones() % 2 == 1;
                            exterior |= 1 << (idx - 1);
                        }
                        "x" => powers[idx - 1] += exp,
                        _ => return Err(bad(format!("unknown factor {factor:?}"))),
                    }
                }
            }
            let coeff = coeff % p;
            out.add_term(Monomial::new(exterior, powers), if negative { p - coeff } else { coeff });
        }
        Ok(out)
    }
}

impl fmt::Display for CohoElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{m}:{c}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Images of the generators under a pull-back, with memoised powers.
struct PullBack {
    p: u32,
    rank: usize,
    exterior: Vec<CohoElement>,
    polynomial: Vec<CohoElement>,
}

impl PullBack {
    fn new(p: u32, matrix: &[Vec<u32>], target_rank: usize) -> Self {
        let linear = |i: usize, f: &dyn Fn(usize) -> CohoElement| {
            (0..target_rank).fold(CohoElement::zero(p, target_rank), |acc, j| acc.add(&f(j).scale(matrix[i][j])))
        };
        let exterior = if p == 2 {
            Vec::new()
        } else {
            (0..matrix.len()).map(|i| linear(i, &|j| CohoElement::exterior_generator(p, target_rank, j))).collect()
        };
        let polynomial =
            (0..matrix.len()).map(|i| linear(i, &|j| CohoElement::polynomial_generator(p, target_rank, j))).collect();
        PullBack { p, rank: target_rank, exterior, polynomial }
    }

    fn monomial(&self, m: &Monomial) -> CohoElement {
        let mut acc = CohoElement::one(self.p, self.rank);
        for i in 0..m.rank() {
            if m.has_exterior(i) {
                acc = acc.mul(&self.exterior[i]);
            }
        }
        for (i, &e) in m.powers().iter().enumerate() {
            if e > 0 {
                acc = acc.mul(&self.polynomial[i].pow(e));
            }
        }
        acc
    }
}

/// Matrix of the pull-back in degree `d`: rows index the source group's
/// basis `W`, columns the target group's basis `V`.
pub fn restriction_matrix(p: u32, matrix: &[Vec<u32>], target_rank: usize, d: usize) -> FpMatrix {
    let source_rank = matrix.len();
    let v_basis = cohomology_basis(p, source_rank, d);
    let w_basis = cohomology_basis(p, target_rank, d);
    let w_index: HashMap<Monomial, usize> = w_basis.iter().cloned().zip(0..).collect();
    let pulled = PullBack::new(p, matrix, target_rank);
    let mut out = FpMatrix::zeros(p, w_basis.len(), v_basis.len());
    for (c, m) in v_basis.iter().enumerate() {
        for (mono, coeff) in pulled.monomial(m).terms() {
            out.set(w_index[mono], c, coeff);
        }
    }
    out
}
