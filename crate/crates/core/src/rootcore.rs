//! Finite root systems over exact rationals.
//!
//! Three coordinate systems are used throughout, with one change-of-basis
//! matrix per system:
//!
//! * [`Weight`]: coordinates in the fundamental-weight basis, `χ = Σ cᵢ χᵢ`.
//! * [`RootVector`]: coordinates in the simple-root basis, `β = Σ dᵢ αᵢ`.
//! * [`TorusVector`]: evaluation coordinates of a torus Lie-algebra element,
//!   `xᵢ = αᵢ(t)`.
//!
//! The Cartan matrix is stored with entry `(i, j) = ⟨αᵢ, αⱼ⟩`, where the
//! pairing is normalized by its second argument:
//! `⟨χ₁, χ₂⟩ = 2(χ₁, χ₂)/(χ₂, χ₂)`. Under that normalization the fundamental
//! weights satisfy `⟨χᵢ, αⱼ⟩ = δᵢⱼ` and reflections read
//! `s_β(χ) = χ − ⟨χ, β⟩β`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};

macro_rules! coordinate_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(#[serde(with = "crate::rational::serde_rat::vec")] pub Vec<Rational>);

        impl $name {
            pub fn new(coords: Vec<Rational>) -> Self {
                Self(coords)
            }

            pub fn from_ints(coords: &[i64]) -> Self {
                Self(coords.iter().map(|&c| rational::int(c)).collect())
            }

            pub fn zero(rank: usize) -> Self {
                Self(vec![Rational::zero(); rank])
            }

            pub fn unit(rank: usize, i: usize) -> Self {
                let mut v = Self::zero(rank);
                v.0[i] = Rational::one();
                v
            }

            pub fn coords(&self) -> &[Rational] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(Zero::is_zero)
            }

            pub fn scaled(&self, c: &Rational) -> Self {
                Self(linalg::scale(&self.0, c))
            }

            pub fn to_f64(&self) -> Vec<f64> {
                self.0.iter().map(rational::to_f64).collect()
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                $name(linalg::add(&self.0, &rhs.0))
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                $name(linalg::sub(&self.0, &rhs.0))
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(self.0.iter().map(|x| -x).collect())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let parts: Vec<String> = self.0.iter().map(rational::format).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    };
}

coordinate_type!(
    /// A character in fundamental-weight coordinates.
    Weight
);

impl Weight {
    /// All coordinates non-negative.
    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }
}

coordinate_type!(
    /// A root-lattice vector in simple-root coordinates.
    RootVector
);

impl RootVector {
    pub fn height(&self) -> Rational {
        self.0.iter().sum()
    }

    /// `self ≥ other` in the coordinatewise partial order.
    pub fn dominates(&self, other: &RootVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    fn to_i64(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
    }
}

coordinate_type!(
    /// A torus Lie-algebra element in evaluation coordinates `xᵢ = αᵢ(t)`.
    TorusVector
);

/// Anything that can be expressed in simple-root coordinates.
pub trait Character {
    fn root_coords(&self, sys: &RootSystem) -> Vec<Rational>;
}

impl Character for Weight {
    fn root_coords(&self, sys: &RootSystem) -> Vec<Rational> {
        linalg::mul_vec(&sys.weight_to_root, &self.0)
    }
}

impl Character for RootVector {
    fn root_coords(&self, _sys: &RootSystem) -> Vec<Rational> {
        self.0.clone()
    }
}

/// A reduced finite root system with its Cartan data, positive roots, and
/// irreducible components.
#[derive(Clone, Debug)]
pub struct RootSystem {
    label: String,
    cartan: Vec<Vec<i64>>,
    cartan_q: Matrix,
    inner_form: Matrix,
    kappa: Matrix,
    weight_to_root: Matrix,
    positive_roots: Vec<RootVector>,
    positive_int: Vec<Vec<i64>>,
    root_set: HashSet<Vec<i64>>,
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    pub(crate) weyl_cache: OnceLock<crate::weyl::WeylGroup>,
}

/// Cartan matrix of a simple series in the `⟨αᵢ, αⱼ⟩` convention (Bourbaki
/// numbering).
pub fn series_cartan(letter: char, rank: usize) -> Result<Vec<Vec<i64>>> {
    let bad = || Error::domain(format!("no root system of type {letter}{rank}"));
    let valid = match letter {
        'A' => rank >= 1,
        'B' | 'C' => rank >= 2,
        'D' => rank >= 3,
        'E' => (6..=8).contains(&rank),
        'F' => rank == 4,
        'G' => rank == 2,
        _ => false,
    };
    if !valid {
        return Err(bad());
    }
    let mut a = vec![vec![0i64; rank]; rank];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    match letter {
        'A' => (0..rank - 1).for_each(|i| link(i, i + 1, -1, -1)),
        'B' => {
            (0..rank - 2).for_each(|i| link(i, i + 1, -1, -1));
            // αₙ short
            link(rank - 2, rank - 1, -2, -1);
        }
        'C' => {
            (0..rank - 2).for_each(|i| link(i, i + 1, -1, -1));
            // αₙ long
            link(rank - 2, rank - 1, -1, -2);
        }
        'D' => {
            (0..rank - 2).for_each(|i| link(i, i + 1, -1, -1));
            link(rank - 3, rank - 1, -1, -1);
        }
        'E' => {
            link(0, 2, -1, -1);
            link(1, 3, -1, -1);
            (2..rank - 1).for_each(|i| link(i, i + 1, -1, -1));
        }
        'F' => {
            link(0, 1, -1, -1);
            link(1, 2, -2, -1);
            link(2, 3, -1, -1);
        }
        'G' => link(0, 1, -1, -3),
        _ => unreachable!(),
    }
    Ok(a)
}

/// Block-diagonal sum of Cartan matrices.
pub fn direct_sum(blocks: &[Vec<Vec<i64>>]) -> Vec<Vec<i64>> {
    let n: usize = blocks.iter().map(Vec::len).sum();
    let mut a = vec![vec![0i64; n]; n];
    let mut offset = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                a[offset + i][offset + j] = x;
            }
        }
        offset += b.len();
    }
    a
}

fn parse_simple_kind(s: &str) -> Result<(char, usize)> {
    let mut chars = s.trim().chars();
    let letter = chars
        .next()
        .ok_or_else(|| Error::parse("empty root system kind"))?
        .to_ascii_uppercase();
    let rank: usize = chars
        .as_str()
        .parse()
        .map_err(|_| Error::parse(format!("bad root system kind {s:?}")))?;
    Ok((letter, rank))
}

impl RootSystem {
    /// Parses kinds like `"A2"`, `"G2"`, `"A1xA1"`, `"A2×A1"`, `"B2+A1"`.
    pub fn from_kind(kind: &str) -> Result<Self> {
        let parts: Vec<&str> = kind.split(['x', 'X', '×', '+']).filter(|p| !p.trim().is_empty()).collect();
        if parts.is_empty() {
            return Err(Error::parse(format!("bad root system kind {kind:?}")));
        }
        let mut blocks = Vec::new();
        let mut labels = Vec::new();
        for p in parts {
            let (letter, rank) = parse_simple_kind(p)?;
            blocks.push(series_cartan(letter, rank)?);
            labels.push(format!("{letter}{rank}"));
        }
        Self::build(labels.join("x"), direct_sum(&blocks))
    }

    pub fn from_series(letter: char, rank: usize) -> Result<Self> {
        Self::build(format!("{letter}{rank}"), series_cartan(letter, rank)?)
    }

    /// Builds from an explicit Cartan matrix in the `⟨αᵢ, αⱼ⟩` convention,
    /// rejecting anything that is not of finite type.
    pub fn from_cartan(cartan: Vec<Vec<i64>>) -> Result<Self> {
        Self::build("cartan".to_string(), cartan)
    }

    fn build(label: String, cartan: Vec<Vec<i64>>) -> Result<Self> {
        let n = cartan.len();
        let not_finite = |reason: String| Error::NotFiniteType { reason, minor_size: None, minor_value: None };
        if n == 0 || cartan.iter().any(|row| row.len() != n) {
            return Err(not_finite("Cartan matrix must be square and non-empty".into()));
        }
        for i in 0..n {
            if cartan[i][i] != 2 {
                return Err(not_finite(format!("diagonal entry ({i},{i}) is {} not 2", cartan[i][i])));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if cartan[i][j] > 0 {
                    return Err(not_finite(format!("off-diagonal entry ({i},{j}) is positive")));
                }
                if (cartan[i][j] == 0) != (cartan[j][i] == 0) {
                    return Err(not_finite(format!("entries ({i},{j}) and ({j},{i}) disagree on vanishing")));
                }
            }
        }

        let components = connected_components(&cartan);
        let mut component_of = vec![0; n];
        for (c, block) in components.iter().enumerate() {
            for &i in block {
                component_of[i] = c;
            }
        }

        let norms = symmetrizing_norms(&cartan, &components).map_err(not_finite)?;
        let cartan_q = linalg::from_i64(&cartan);
        let two = rational::int(2);
        let inner_form: Matrix = (0..n)
            .map(|i| (0..n).map(|j| &cartan_q[i][j] * &norms[j] / &two).collect())
            .collect();

        for k in 1..=n {
            let minor: Matrix = inner_form[..k].iter().map(|row| row[..k].to_vec()).collect();
            let det = linalg::determinant(&minor);
            if !det.is_positive() {
                return Err(Error::NotFiniteType {
                    reason: format!("leading principal minor of size {k} of the symmetrized form is {}", rational::format(&det)),
                    minor_size: Some(k),
                    minor_value: Some(rational::format(&det)),
                });
            }
        }

        let kappa = linalg::inverse(&inner_form).ok_or_else(|| Error::invariant("inner form singular"))?;
        let weight_to_root = linalg::inverse(&linalg::transpose(&cartan_q))
            .ok_or_else(|| Error::invariant("Cartan matrix singular"))?;

        let positive_int = enumerate_positive_roots(&cartan)?;
        let positive_roots = positive_int.iter().map(|d| RootVector::from_ints(d)).collect();
        let mut root_set = HashSet::new();
        for d in &positive_int {
            root_set.insert(d.clone());
            root_set.insert(d.iter().map(|x| -x).collect());
        }

        Ok(RootSystem {
            label,
            cartan,
            cartan_q,
            inner_form,
            kappa,
            weight_to_root,
            positive_roots,
            positive_int,
            root_set,
            components,
            component_of,
            weyl_cache: OnceLock::new(),
        })
    }

    /// The root subsystem spanned by the simple roots at `indices` (in that
    /// order).
    pub fn subsystem(&self, indices: &[usize]) -> Result<Self> {
        let cartan: Vec<Vec<i64>> =
            indices.iter().map(|&i| indices.iter().map(|&j| self.cartan[i][j]).collect()).collect();
        let label = format!("{}|{:?}", self.label, indices);
        Self::build(label, cartan)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn cartan_matrix(&self) -> &Matrix {
        &self.cartan_q
    }

    /// Gram matrix `(αᵢ, αⱼ)` of the simple roots, long roots of norm 2.
    pub fn inner_form(&self) -> &Matrix {
        &self.inner_form
    }

    /// The form on the torus in evaluation coordinates; `κ(t_χ, t) = χ(t)`.
    pub fn torus_form(&self) -> &Matrix {
        &self.kappa
    }

    pub fn positive_roots(&self) -> &[RootVector] {
        &self.positive_roots
    }

    /// Positive roots followed by their negatives.
    pub fn roots(&self) -> impl Iterator<Item = RootVector> + '_ {
        self.positive_roots.iter().cloned().chain(self.positive_roots.iter().map(|r| -r))
    }

    pub fn num_roots(&self) -> usize {
        2 * self.positive_roots.len()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, i: usize) -> usize {
        self.component_of[i]
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }

    pub fn is_root(&self, beta: &RootVector) -> bool {
        beta.len() == self.rank() && beta.to_i64().is_some_and(|d| self.root_set.contains(&d))
    }

    pub fn simple_root(&self, i: usize) -> RootVector {
        RootVector::unit(self.rank(), i)
    }

    pub fn fundamental_weight(&self, i: usize) -> Weight {
        Weight::unit(self.rank(), i)
    }

    /// Half the sum of positive roots, which is `Σ χᵢ`.
    pub fn rho(&self) -> Weight {
        Weight::from_ints(&vec![1; self.rank()])
    }

    pub fn root_to_weight(&self, beta: &RootVector) -> Weight {
        Weight(linalg::vec_mul(&beta.0, &self.cartan_q))
    }

    pub fn weight_to_root(&self, chi: &Weight) -> RootVector {
        RootVector(chi.root_coords(self))
    }

    /// The symmetric form `(a, b)`.
    pub fn inner<A: Character + ?Sized, B: Character + ?Sized>(&self, a: &A, b: &B) -> Rational {
        linalg::bilinear(&a.root_coords(self), &self.inner_form, &b.root_coords(self))
    }

    /// `⟨a, b⟩ = 2(a, b)/(b, b)`.
    pub fn pairing<A: Character + ?Sized, B: Character + ?Sized>(&self, a: &A, b: &B) -> Result<Rational> {
        let b_coords = b.root_coords(self);
        let norm = linalg::bilinear(&b_coords, &self.inner_form, &b_coords);
        if norm.is_zero() {
            return Err(Error::domain("pairing with a zero second argument"));
        }
        let num = linalg::bilinear(&a.root_coords(self), &self.inner_form, &b_coords);
        Ok(rational::int(2) * num / norm)
    }

    /// `s_β(χ) = χ − ⟨χ, β⟩β`.
    pub fn reflect(&self, chi: &Weight, beta: &RootVector) -> Result<Weight> {
        self.check_root(beta)?;
        let c = self.pairing(chi, beta)?;
        Ok(chi - &self.root_to_weight(beta).scaled(&c))
    }

    pub fn reflect_root(&self, gamma: &RootVector, beta: &RootVector) -> Result<RootVector> {
        self.check_root(beta)?;
        let c = self.pairing(gamma, beta)?;
        Ok(gamma - &beta.scaled(&c))
    }

    fn check_root(&self, beta: &RootVector) -> Result<()> {
        if self.is_root(beta) {
            Ok(())
        } else {
            Err(Error::domain(format!("{beta} is not a root of {}", self.label)))
        }
    }

    /// `χ(t) = Σ dᵢ xᵢ` with `d` the simple-root coordinates of `χ`.
    pub fn evaluate<C: Character + ?Sized>(&self, chi: &C, t: &TorusVector) -> Rational {
        linalg::dot(&chi.root_coords(self), &t.0)
    }

    /// Simple reflection `sᵢ` on weight coordinates: `c ↦ c − cᵢ·(weight coords of αᵢ)`.
    pub fn simple_reflect_weight(&self, i: usize, chi: &Weight) -> Weight {
        let ci = &chi.0[i];
        if ci.is_zero() {
            return chi.clone();
        }
        Weight(chi.0.iter().enumerate().map(|(k, c)| c - ci * &self.cartan_q[i][k]).collect())
    }

    /// Simple reflection on simple-root coordinates.
    pub fn simple_reflect_root(&self, i: usize, beta: &RootVector) -> RootVector {
        let mut out = beta.clone();
        let p: Rational = (0..self.rank()).map(|j| &beta.0[j] * &self.cartan_q[j][i]).sum();
        out.0[i] -= p;
        out
    }

    /// The contragredient action of `sᵢ` on a torus vector:
    /// `αⱼ(sᵢ·t) = (sᵢαⱼ)(t) = xⱼ − ⟨αⱼ, αᵢ⟩ xᵢ`.
    pub fn simple_reflect_torus(&self, i: usize, t: &TorusVector) -> TorusVector {
        let xi = &t.0[i];
        if xi.is_zero() {
            return t.clone();
        }
        TorusVector(t.0.iter().enumerate().map(|(j, x)| x - &self.cartan_q[j][i] * xi).collect())
    }

    /// The unique root of component `c` that dominates every root there.
    pub fn highest_root(&self, c: usize) -> Result<RootVector> {
        let block: HashSet<usize> = self
            .components
            .get(c)
            .ok_or_else(|| Error::domain(format!("no component {c}")))?
            .iter()
            .copied()
            .collect();
        let in_block: Vec<&RootVector> = self
            .positive_roots
            .iter()
            .filter(|r| r.0.iter().enumerate().any(|(i, x)| !x.is_zero() && block.contains(&i)))
            .collect();
        in_block
            .iter()
            .find(|cand| in_block.iter().all(|r| cand.dominates(r)))
            .map(|r| (*r).clone())
            .ok_or_else(|| Error::invariant(format!("component {c} has no highest root")))
    }

    /// Positive roots whose support lies in component `c`.
    pub fn component_roots(&self, c: usize) -> Vec<RootVector> {
        self.positive_roots
            .iter()
            .filter(|r| r.0.iter().enumerate().any(|(i, x)| !x.is_zero() && self.component_of[i] == c))
            .cloned()
            .collect()
    }

    /// Order of the Weyl group from the root-height partition: the number of
    /// exponents `≥ k` equals the number of positive roots of height `k`, and
    /// `|W| = Π (mᵢ + 1)` per component.
    pub fn weyl_order(&self) -> u128 {
        let mut order: u128 = 1;
        for (c, _) in self.components.iter().enumerate() {
            let mut by_height: HashMap<i64, usize> = HashMap::new();
            for d in &self.positive_int {
                if d.iter().enumerate().any(|(i, &x)| x != 0 && self.component_of[i] == c) {
                    *by_height.entry(d.iter().sum()).or_default() += 1;
                }
            }
            let max_h = by_height.keys().copied().max().unwrap_or(0);
            // exponents m with multiplicity h_k - h_{k+1} for m = k
            for k in 1..=max_h {
                let here = by_height.get(&k).copied().unwrap_or(0);
                let next = by_height.get(&(k + 1)).copied().unwrap_or(0);
                let mult = here.saturating_sub(next);
                for _ in 0..mult {
                    order = order.saturating_mul(k as u128 + 1);
                }
            }
        }
        order
    }

    /// Dimension guard used by every public entry point taking coordinates.
    pub fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len == self.rank() {
            Ok(())
        } else {
            Err(Error::domain(format!("{what} has {len} coordinates, rank is {}", self.rank())))
        }
    }
}

fn connected_components(cartan: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let n = cartan.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut block = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < block.len() {
            let i = block[k];
            for j in 0..n {
                if !seen[j] && cartan[i][j] != 0 {
                    seen[j] = true;
                    block.push(j);
                }
            }
            k += 1;
        }
        block.sort_unstable();
        out.push(block);
    }
    out
}

/// Squared lengths `(αᵢ, αᵢ)` making `Aᵢⱼ·nⱼ` symmetric, scaled so the longest
/// simple root in each component has norm 2.
fn symmetrizing_norms(cartan: &[Vec<i64>], components: &[Vec<usize>]) -> std::result::Result<Vec<Rational>, String> {
    let n = cartan.len();
    let mut norms: Vec<Option<Rational>> = vec![None; n];
    for block in components {
        norms[block[0]] = Some(Rational::one());
        let mut queue = vec![block[0]];
        while let Some(i) = queue.pop() {
            let ni = norms[i].clone().expect("visited");
            for j in 0..n {
                if i == j || cartan[i][j] == 0 {
                    continue;
                }
                // (αᵢ,αⱼ) = Aᵢⱼ nⱼ/2 = Aⱼᵢ nᵢ/2
                let nj = &ni * rational::int(cartan[j][i]) / rational::int(cartan[i][j]);
                match &norms[j] {
                    None => {
                        norms[j] = Some(nj);
                        queue.push(j);
                    }
                    Some(existing) if *existing != nj => {
                        return Err(format!("not symmetrizable (inconsistent lengths around nodes {i},{j})"));
                    }
                    Some(_) => {}
                }
            }
        }
        let max = block.iter().map(|&i| norms[i].clone().expect("visited")).max().expect("non-empty");
        let factor = rational::int(2) / max;
        for &i in block {
            norms[i] = norms[i].take().map(|x| x * &factor);
        }
    }
    Ok(norms.into_iter().map(|x| x.expect("every node is in a component")).collect())
}

/// Positive roots by height, via root strings: for a root β and simple αᵢ with
/// `β − pαᵢ` the bottom of the string, `β + αᵢ` is a root iff
/// `p − ⟨β, αᵢ⟩ > 0`.
fn enumerate_positive_roots(cartan: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    const MAX_ROOTS: usize = 10_000;
    let n = cartan.len();
    let mut roots: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    let mut known: HashSet<Vec<i64>> = roots.iter().cloned().collect();
    let mut layer_start = 0;
    while layer_start < roots.len() {
        let layer_end = roots.len();
        let mut next: Vec<Vec<i64>> = Vec::new();
        for idx in layer_start..layer_end {
            let beta = roots[idx].clone();
            for i in 0..n {
                let pair: i64 = (0..n).map(|j| beta[j] * cartan[j][i]).sum();
                let mut p = 0;
                let mut probe = beta.clone();
                loop {
                    probe[i] -= 1;
                    if known.contains(&probe) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - pair > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if known.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        next.sort_by(|a, b| b.cmp(a));
        roots.extend(next);
        layer_start = layer_end;
        if roots.len() > MAX_ROOTS {
            return Err(Error::invariant("root enumeration did not terminate; not finite type"));
        }
    }
    Ok(roots)
}
