//! The ambient torus `𝔱 = 𝔱₀ ⊕ 𝔰`: split/anisotropic decomposition of
//! subspaces, rational characters, the restricted root system on `𝔰`, and
//! the reflection loop that conjugates a subspace to an almost split one.
//!
//! Every vector here is a [`TorusVector`] of the ambient system, i.e. it is
//! written in ambient evaluation coordinates `xᵢ = αᵢ(t)`. `𝔱₀` is taken to
//! be the κ-orthogonal complement of `𝔰`, so the rational characters are
//! exactly the functionals κ-represented by elements of `𝔰`.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};
use crate::rootcore::{RootSystem, RootVector, TorusVector, Weight};
use crate::weyl::{self, OneStep, WeylElement};

/// A linear subspace of `𝔱` given by a basis. An empty basis is the trivial
/// subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtorusSubspace {
    pub basis: Vec<TorusVector>,
    /// Set when the basis was snapped from floating-point input.
    #[serde(default)]
    pub approximate: bool,
}

impl SubtorusSubspace {
    /// Checks that `basis` is linearly independent.
    pub fn new(basis: Vec<TorusVector>) -> Result<Self> {
        if let Some(first) = basis.first() {
            if basis.iter().any(|v| v.len() != first.len()) {
                return Err(Error::domain("basis vectors have different lengths"));
            }
        }
        let rows = rows_of(&basis);
        if linalg::rank_of(&rows) != basis.len() {
            return Err(Error::domain("subspace basis is linearly dependent"));
        }
        Ok(Self { basis, approximate: false })
    }

    pub fn trivial() -> Self {
        Self { basis: Vec::new(), approximate: false }
    }

    /// Rationalizes float rows by continued-fraction snapping at `tol`.
    pub fn from_f64(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let basis = rows
            .iter()
            .map(|row| row.iter().map(|&x| rational::snap(x, tol)).collect::<Result<Vec<_>>>().map(TorusVector::new))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::new(basis)?;
        out.approximate = true;
        Ok(out)
    }

    /// Spans the given vectors, dropping dependent ones.
    pub fn span(vectors: &[TorusVector]) -> Self {
        let kept = linalg::independent_subset(&rows_of(vectors));
        Self { basis: kept.into_iter().map(TorusVector::new).collect(), approximate: false }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, t: &TorusVector) -> bool {
        let mut rows = rows_of(&self.basis);
        rows.push(t.coords().to_vec());
        linalg::rank_of(&rows) == self.dim()
    }

    /// Same subspace, possibly with a different basis.
    pub fn same_span(&self, other: &SubtorusSubspace) -> bool {
        self.dim() == other.dim() && other.basis.iter().all(|v| self.contains(v))
    }

    /// Image under the contragredient action of `w`.
    pub fn act(&self, sys: &RootSystem, w: &WeylElement) -> SubtorusSubspace {
        SubtorusSubspace { basis: self.basis.iter().map(|t| w.act(sys, t)).collect(), approximate: self.approximate }
    }
}

fn rows_of(vectors: &[TorusVector]) -> Vec<Vec<Rational>> {
    vectors.iter().map(|v| v.coords().to_vec()).collect()
}

/// The restricted (relative) root system on `𝔰`.
#[derive(Clone, Debug)]
pub struct RelativeSystem {
    pub system: RootSystem,
    /// For each relative simple root, an ambient root restricting to it.
    pub simple_lifts: Vec<RootVector>,
    /// Whether some restricted root is twice another (type BC components).
    pub non_reduced: bool,
}

/// `𝔱` with its split part `𝔰` and derived data.
#[derive(Clone, Debug)]
pub struct SplitDatum {
    ambient: RootSystem,
    split_basis: Vec<TorusVector>,
    aniso_basis: Vec<TorusVector>,
    /// Inverse of the Gram matrix `κ(sₐ, s_b)` of the split basis.
    split_gram_inv: Matrix,
    relative: Option<RelativeSystem>,
    relative_error: Option<String>,
}

impl SplitDatum {
    pub fn new(ambient: RootSystem, split_basis: Vec<TorusVector>) -> Result<Self> {
        if split_basis.is_empty() {
            return Err(Error::domain("split part must have positive dimension"));
        }
        for s in &split_basis {
            ambient.check_len("split basis vector", s.len())?;
        }
        if linalg::rank_of(&rows_of(&split_basis)) != split_basis.len() {
            return Err(Error::domain("split basis is linearly dependent"));
        }
        let kappa = ambient.torus_form();
        let k_s: Vec<Vec<Rational>> = split_basis.iter().map(|s| linalg::vec_mul(s.coords(), kappa)).collect();
        let aniso_basis: Vec<TorusVector> =
            linalg::nullspace(&k_s, ambient.rank()).into_iter().map(TorusVector::new).collect();
        let split_gram: Matrix =
            k_s.iter().map(|row| split_basis.iter().map(|s| linalg::dot(row, s.coords())).collect()).collect();
        let split_gram_inv = linalg::inverse(&split_gram).ok_or_else(|| Error::invariant("κ is degenerate on 𝔰"))?;
        let mut datum = Self {
            ambient,
            split_basis,
            aniso_basis,
            split_gram_inv,
            relative: None,
            relative_error: None,
        };
        match datum.build_relative() {
            Ok(rel) => datum.relative = Some(rel),
            Err(e) => datum.relative_error = Some(e.to_string()),
        }
        Ok(datum)
    }

    /// The fully split datum `𝔰 = 𝔱`.
    pub fn split(ambient: RootSystem) -> Self {
        let n = ambient.rank();
        let basis = (0..n).map(|i| TorusVector::unit(n, i)).collect();
        Self::new(ambient, basis).expect("unit basis is independent")
    }

    pub fn ambient(&self) -> &RootSystem {
        &self.ambient
    }

    pub fn split_basis(&self) -> &[TorusVector] {
        &self.split_basis
    }

    pub fn aniso_basis(&self) -> &[TorusVector] {
        &self.aniso_basis
    }

    pub fn rank_q(&self) -> usize {
        self.split_basis.len()
    }

    pub fn is_fully_split(&self) -> bool {
        self.aniso_basis.is_empty()
    }

    pub fn relative(&self) -> Option<&RelativeSystem> {
        self.relative.as_ref()
    }

    pub fn require_relative(&self) -> Result<&RelativeSystem> {
        self.relative.as_ref().ok_or_else(|| {
            Error::domain(format!(
                "restrictions of the roots to the split part do not form a root system: {}",
                self.relative_error.as_deref().unwrap_or("unknown")
            ))
        })
    }

    pub fn split_space(&self) -> SubtorusSubspace {
        SubtorusSubspace { basis: self.split_basis.clone(), approximate: false }
    }

    pub fn aniso_space(&self) -> SubtorusSubspace {
        SubtorusSubspace { basis: self.aniso_basis.clone(), approximate: false }
    }

    /// `κ(sₐ, t)` for each split basis vector.
    fn split_pairings(&self, t: &TorusVector) -> Vec<Rational> {
        let kappa = self.ambient.torus_form();
        self.split_basis.iter().map(|s| linalg::bilinear(s.coords(), kappa, t.coords())).collect()
    }

    pub fn in_aniso(&self, t: &TorusVector) -> bool {
        linalg::is_zero_vec(&self.split_pairings(t))
    }

    pub fn in_split(&self, t: &TorusVector) -> bool {
        self.split_space().contains(t)
    }

    /// κ-orthogonal projection onto `𝔰`.
    pub fn project_to_split(&self, t: &TorusVector) -> TorusVector {
        let c = linalg::mul_vec(&self.split_gram_inv, &self.split_pairings(t));
        self.combine_split(&c)
    }

    fn combine_split(&self, c: &[Rational]) -> TorusVector {
        let n = self.ambient.rank();
        let mut out = vec![Rational::zero(); n];
        for (ca, s) in c.iter().zip(&self.split_basis) {
            for (o, x) in out.iter_mut().zip(s.coords()) {
                *o += ca * x;
            }
        }
        TorusVector::new(out)
    }

    /// The character `χ(t) = κ(s, t)` for `s ∈ 𝔰`; such characters are the
    /// rational characters.
    pub fn character_of(&self, s: &TorusVector) -> Weight {
        let d = linalg::mul_vec(self.ambient.torus_form(), s.coords());
        self.ambient.root_to_weight(&RootVector::new(d))
    }

    /// Whether `χ` vanishes on `𝔱₀`.
    pub fn is_q_character(&self, chi: &Weight) -> bool {
        self.aniso_basis.iter().all(|t| self.ambient.evaluate(chi, t).is_zero())
    }

    /// Extends a functional known on `𝔰` (given by ambient simple-root
    /// coordinates; only its restriction to `𝔰` matters) by zero on `𝔱₀`.
    pub fn extend_from_split(&self, functional: &RootVector) -> Weight {
        let values: Vec<Rational> = self.split_basis.iter().map(|s| linalg::dot(functional.coords(), s.coords())).collect();
        let c = linalg::mul_vec(&self.split_gram_inv, &values);
        self.character_of(&self.combine_split(&c))
    }

    /// The extension `χ̃` of a relative weight (relative fundamental
    /// coordinates): equal to `χ` on `𝔰` and zero on `𝔱₀`.
    pub fn lift_relative_weight(&self, chi: &Weight) -> Result<Weight> {
        let rel = self.require_relative()?;
        rel.system.check_len("relative weight", chi.len())?;
        let d = rel.system.weight_to_root(chi);
        let mut functional = vec![Rational::zero(); self.ambient.rank()];
        for (di, lift) in d.coords().iter().zip(&rel.simple_lifts) {
            for (f, x) in functional.iter_mut().zip(lift.coords()) {
                *f += di * x;
            }
        }
        Ok(self.extend_from_split(&RootVector::new(functional)))
    }

    /// Relative evaluation coordinates `α^Q_i(t)` of `t ∈ 𝔰`.
    pub fn to_relative(&self, t: &TorusVector) -> Result<TorusVector> {
        let rel = self.require_relative()?;
        self.ambient.check_len("torus vector", t.len())?;
        if !self.in_split(t) {
            return Err(Error::domain(format!("{t} does not lie in the split part")));
        }
        Ok(TorusVector::new(rel.simple_lifts.iter().map(|b| self.ambient.evaluate(b, t)).collect()))
    }

    /// Inverse of [`Self::to_relative`].
    pub fn from_relative(&self, x: &TorusVector) -> Result<TorusVector> {
        let rel = self.require_relative()?;
        rel.system.check_len("relative torus vector", x.len())?;
        let l: Matrix = rel
            .simple_lifts
            .iter()
            .map(|b| self.split_basis.iter().map(|s| linalg::dot(b.coords(), s.coords())).collect())
            .collect();
        let c = linalg::solve(&l, x.coords()).ok_or_else(|| Error::invariant("relative simple roots do not span 𝔰*"))?;
        Ok(self.combine_split(&c))
    }

    pub fn subspace_to_relative(&self, a: &SubtorusSubspace) -> Result<SubtorusSubspace> {
        let basis = a.basis.iter().map(|t| self.to_relative(t)).collect::<Result<Vec<_>>>()?;
        Ok(SubtorusSubspace { basis, approximate: a.approximate })
    }

    pub fn subspace_from_relative(&self, a: &SubtorusSubspace) -> Result<SubtorusSubspace> {
        let basis = a.basis.iter().map(|t| self.from_relative(t)).collect::<Result<Vec<_>>>()?;
        Ok(SubtorusSubspace { basis, approximate: a.approximate })
    }

    fn build_relative(&self) -> Result<RelativeSystem> {
        let k = self.rank_q();
        let inner = |a: &[Rational], b: &[Rational]| linalg::bilinear(a, &self.split_gram_inv, b);

        // restriction of each positive ambient root, in split-basis values
        let mut restricted: Vec<(Vec<Rational>, RootVector)> = Vec::new();
        let mut seen = BTreeSet::new();
        for beta in self.ambient.positive_roots() {
            let phi: Vec<Rational> = self.split_basis.iter().map(|s| linalg::dot(beta.coords(), s.coords())).collect();
            if linalg::is_zero_vec(&phi) {
                continue;
            }
            // lexicographic sign fixes a positive system
            let positive = phi.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive());
            let (phi, lift) = if positive { (phi, beta.clone()) } else { (phi.iter().map(|x| -x).collect(), -beta) };
            if seen.insert(phi.clone()) {
                restricted.push((phi, lift));
            }
        }
        let all: BTreeSet<Vec<Rational>> = seen;
        let half = rational::frac(1, 2);
        let indivisible: Vec<&(Vec<Rational>, RootVector)> =
            restricted.iter().filter(|(phi, _)| !all.contains(&linalg::scale(phi, &half))).collect();
        let non_reduced = indivisible.len() < restricted.len();
        let ind_set: BTreeSet<&Vec<Rational>> = indivisible.iter().map(|(p, _)| p).collect();

        let simple: Vec<&(Vec<Rational>, RootVector)> = indivisible
            .iter()
            .copied()
            .filter(|(phi, _)| {
                !indivisible.iter().any(|(a, _)| {
                    let rest = linalg::sub(phi, a);
                    ind_set.contains(&rest)
                })
            })
            .collect();
        if simple.len() != k {
            return Err(Error::domain(format!("found {} indecomposable restricted roots for a split part of dimension {k}", simple.len())));
        }
        if linalg::rank_of(&simple.iter().map(|(p, _)| p.clone()).collect::<Vec<_>>()) != k {
            return Err(Error::domain("indecomposable restricted roots are dependent"));
        }

        let mut cartan = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in 0..k {
                let v = rational::int(2) * inner(&simple[i].0, &simple[j].0) / inner(&simple[j].0, &simple[j].0);
                if !v.is_integer() {
                    return Err(Error::domain(format!("non-integral restricted Cartan entry {}", rational::format(&v))));
                }
                cartan[i][j] = v.to_integer().try_into().map_err(|_| Error::domain("Cartan entry out of range"))?;
            }
        }
        let system = RootSystem::from_cartan(cartan)?;

        // every indivisible restriction must be a root in simple coordinates
        let basis_t: Matrix = linalg::transpose(&simple.iter().map(|(p, _)| p.clone()).collect());
        let inv = linalg::inverse(&basis_t).ok_or_else(|| Error::invariant("simple restrictions not invertible"))?;
        for (phi, _) in &indivisible {
            let coords = RootVector::new(linalg::mul_vec(&inv, phi));
            if !system.is_root(&coords) {
                return Err(Error::domain(format!("restricted root {coords} is not a root of the candidate system")));
            }
        }
        if indivisible.len() != system.positive_roots().len() {
            return Err(Error::domain("restricted roots do not exhaust the candidate system"));
        }
        Ok(RelativeSystem { system, simple_lifts: simple.iter().map(|(_, l)| l.clone()).collect(), non_reduced })
    }
}

/// `a = ani ⊕ spl`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub ani: SubtorusSubspace,
    pub spl: SubtorusSubspace,
}

/// `ani = a ∩ 𝔱₀`, and `spl` its κ-orthogonal complement inside `a`.
pub fn decompose(a: &SubtorusSubspace, d: &SplitDatum) -> Result<Decomposition> {
    let sys = d.ambient();
    for t in &a.basis {
        sys.check_len("subspace vector", t.len())?;
    }
    let m = a.dim();
    if m == 0 {
        return Ok(Decomposition { ani: SubtorusSubspace::trivial(), spl: SubtorusSubspace::trivial() });
    }
    let combine = |y: &[Rational]| {
        let mut out = vec![Rational::zero(); sys.rank()];
        for (c, v) in y.iter().zip(&a.basis) {
            for (o, x) in out.iter_mut().zip(v.coords()) {
                *o += c * x;
            }
        }
        TorusVector::new(out)
    };
    // columns: split pairings of each basis vector
    let pair_cols: Vec<Vec<Rational>> = a.basis.iter().map(|t| d.split_pairings(t)).collect();
    let system: Matrix = linalg::transpose(&pair_cols);
    let ani: Vec<TorusVector> = linalg::nullspace(&system, m).iter().map(|y| combine(y)).collect();

    let kappa = sys.torus_form();
    let orth: Matrix = ani
        .iter()
        .map(|n| a.basis.iter().map(|v| linalg::bilinear(n.coords(), kappa, v.coords())).collect())
        .collect();
    let spl: Vec<TorusVector> = linalg::nullspace(&orth, m).iter().map(|y| combine(y)).collect();
    Ok(Decomposition {
        ani: SubtorusSubspace { basis: ani, approximate: a.approximate },
        spl: SubtorusSubspace { basis: spl, approximate: a.approximate },
    })
}

/// A nonzero rational character vanishing on `spl` (and on `𝔱₀`).
pub fn q_character_vanishing_on(spl: &SubtorusSubspace, d: &SplitDatum) -> Result<Weight> {
    if spl.dim() >= d.rank_q() {
        return Err(Error::precondition(format!(
            "no rational character is guaranteed to vanish on a subspace of dimension {} when the rational rank is {}",
            spl.dim(),
            d.rank_q()
        )));
    }
    // χ = Σ cₐ κ(sₐ, ·); require χ(u) = 0 for every u in spl
    let rows: Matrix = spl.basis.iter().map(|u| d.split_pairings(u)).collect();
    let c = linalg::nullspace(&rows, d.rank_q())
        .into_iter()
        .next()
        .ok_or_else(|| Error::invariant("no vanishing rational character despite the dimension count"))?;
    let s = d.combine_split(&rational::primitive(&c));
    let chi = d.character_of(&s);
    if chi.is_zero() {
        return Err(Error::invariant("rational character came out zero"));
    }
    Ok(chi)
}

/// Basis of all rational characters vanishing on `a` (as ambient weights).
pub fn q_characters_vanishing_on(a: &SubtorusSubspace, d: &SplitDatum) -> Vec<Weight> {
    let rows: Matrix = a.basis.iter().map(|u| d.split_pairings(u)).collect();
    linalg::nullspace(&rows, d.rank_q())
        .into_iter()
        .map(|c| d.character_of(&d.combine_split(&rational::primitive(&c))))
        .collect()
}

/// One pass of the conjugation loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStep {
    pub chi: Weight,
    pub beta: RootVector,
    pub new_split_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlmostSplit {
    /// Accumulated Weyl element; `image = w·a`.
    pub w: WeylElement,
    pub image: SubtorusSubspace,
    pub trace: Vec<SplitStep>,
}

/// Conjugates `a` by reflections until its anisotropic part is trivial.
pub fn make_almost_split(a: &SubtorusSubspace, d: &SplitDatum) -> Result<AlmostSplit> {
    let sys = d.ambient();
    if a.dim() > d.rank_q() {
        return Err(Error::precondition(format!(
            "subspace dimension {} exceeds the rational rank {}",
            a.dim(),
            d.rank_q()
        )));
    }
    let mut current = a.clone();
    let mut w = WeylElement::identity(sys.rank());
    let mut trace = Vec::new();
    let mut parts = decompose(&current, d)?;
    while !parts.ani.is_trivial() {
        if trace.len() >= a.dim() {
            return Err(Error::invariant(format!("conjugation loop exceeded {} steps", a.dim())));
        }
        let chi = q_character_vanishing_on(&parts.spl, d)?;
        let target = &parts.ani.basis[0];
        let (beta, reflection) = match weyl::one_step(sys, &chi, target)? {
            OneStep::Zero => {
                return Err(Error::invariant("rational character is nonzero on an anisotropic vector"));
            }
            OneStep::Reflect { beta, reflection, .. } => (beta, reflection),
        };
        let before = parts.spl.dim();
        current = current.act(sys, &reflection);
        w = reflection.compose(&w);
        parts = decompose(&current, d)?;
        if parts.spl.dim() <= before {
            return Err(Error::invariant(format!(
                "reflection in {beta} did not enlarge the split part (dimension stayed {before})"
            )));
        }
        trace.push(SplitStep { chi, beta, new_split_dim: parts.spl.dim() });
    }
    Ok(AlmostSplit { w, image: current, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> RootSystem {
        RootSystem::from_kind("A2").unwrap()
    }

    fn tv(v: &[i64]) -> TorusVector {
        TorusVector::from_ints(v)
    }

    fn theta_line() -> SplitDatum {
        SplitDatum::new(a2(), vec![tv(&[1, 1])]).unwrap()
    }

    #[test]
    fn theta_line_datum() {
        let d = theta_line();
        assert_eq!(d.rank_q(), 1);
        assert_eq!(d.aniso_basis().len(), 1);
        assert!(d.in_aniso(&tv(&[1, -1])));
        let rel = d.relative().unwrap();
        assert!(rel.non_reduced);
        assert_eq!(rel.system.rank(), 1);
        assert!(d.is_q_character(&a2().rho()));
        assert!(!d.is_q_character(&a2().fundamental_weight(0)));
    }

    #[test]
    fn generic_split_line_has_no_root_system() {
        let d = SplitDatum::new(a2(), vec![tv(&[2, 7])]).unwrap();
        // a line always carries at most a rank-one system; check a plane in A3
        let _ = d.relative();
        let a3 = RootSystem::from_kind("A3").unwrap();
        let d = SplitDatum::new(a3, vec![tv(&[1, 2, 5]), tv(&[0, 1, 3])]).unwrap();
        assert!(d.relative().is_none());
        assert!(d.require_relative().is_err());
    }

    #[test]
    fn fully_split_relative_is_ambient() {
        let sys = RootSystem::from_kind("B2").unwrap();
        let d = SplitDatum::split(sys.clone());
        let rel = d.relative().unwrap();
        assert_eq!(rel.system.cartan(), sys.cartan());
        let t = tv(&[3, -2]);
        assert_eq!(d.to_relative(&t).unwrap(), t);
        assert_eq!(d.from_relative(&t).unwrap(), t);
    }

    #[test]
    fn decompose_examples() {
        let d = theta_line();
        let full = SubtorusSubspace::new(vec![tv(&[1, 0]), tv(&[0, 1])]).unwrap();
        let parts = decompose(&full, &d).unwrap();
        assert_eq!((parts.ani.dim(), parts.spl.dim()), (1, 1));
        let s = d.split_space();
        let parts = decompose(&s, &d).unwrap();
        assert!(parts.ani.is_trivial());
        assert!(parts.spl.same_span(&s));
        let t0 = d.aniso_space();
        let parts = decompose(&t0, &d).unwrap();
        assert!(parts.spl.is_trivial());
        assert!(parts.ani.same_span(&t0));
    }

    #[test]
    fn q_character_examples() {
        let sys = a2();
        let d = SplitDatum::split(sys.clone());
        let spl = SubtorusSubspace::new(vec![tv(&[1, 1])]).unwrap();
        let chi = q_character_vanishing_on(&spl, &d).unwrap();
        // proportional to χ₁ − χ₂
        assert!(chi.coords()[0] == -chi.coords()[1].clone() && !chi.is_zero());
        assert!(sys.evaluate(&chi, &tv(&[1, 1])).is_zero());
        let full = SubtorusSubspace::new(vec![tv(&[1, 0]), tv(&[0, 1])]).unwrap();
        assert!(q_character_vanishing_on(&full, &d).is_err());
        let d = theta_line();
        let chi = q_character_vanishing_on(&SubtorusSubspace::trivial(), &d).unwrap();
        assert!(d.is_q_character(&chi));
    }

    #[test]
    fn lift_vanishes_on_aniso_and_restricts_correctly() {
        let d = theta_line();
        let rel = d.relative().unwrap();
        let chi_q = Weight::from_ints(&[1]);
        let lifted = d.lift_relative_weight(&chi_q).unwrap();
        assert!(d.is_q_character(&lifted));
        let s = &d.split_basis()[0];
        let x = d.to_relative(s).unwrap();
        assert_eq!(d.ambient().evaluate(&lifted, s), rel.system.evaluate(&chi_q, &x));
    }

    #[test]
    fn make_almost_split_examples() {
        let d = theta_line();
        let s = d.split_space();
        let out = make_almost_split(&s, &d).unwrap();
        assert!(out.trace.is_empty());
        assert!(out.w.is_identity());
        let out = make_almost_split(&d.aniso_space(), &d).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert!(decompose(&out.image, &d).unwrap().ani.is_trivial());
        assert!(out.image.same_span(&d.aniso_space().act(d.ambient(), &out.w)));
        let full = SubtorusSubspace::new(vec![tv(&[1, 0]), tv(&[0, 1])]).unwrap();
        assert!(matches!(make_almost_split(&full, &d), Err(Error::Precondition(_))));
    }

    #[test]
    fn float_snapping() {
        let a = SubtorusSubspace::from_f64(&[vec![0.5, 1.0 / 3.0]], 1e-9).unwrap();
        assert!(a.approximate);
        assert_eq!(a.basis[0], TorusVector::new(vec![rational::frac(1, 2), rational::frac(1, 3)]));
    }
}

#[cfg(test)]
mod random_tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> TorusVector {
        TorusVector::from_ints(&(0..n).map(|_| rng.gen_range(-3..=3)).collect::<Vec<_>>())
    }

    fn random_space(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<TorusVector> {
        loop {
            let v: Vec<TorusVector> = (0..dim).map(|_| random_vec(rng, n)).collect();
            if SubtorusSubspace::new(v.clone()).is_ok() {
                return v;
            }
        }
    }

    #[test]
    fn loop_is_monotone_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in ["A2", "B2", "A3", "G2", "B3"] {
            let sys = RootSystem::from_kind(kind).unwrap();
            let n = sys.rank();
            for _ in 0..150 {
                let k = rng.gen_range(1..=n);
                let d = SplitDatum::new(sys.clone(), random_space(&mut rng, n, k)).unwrap();
                let m = rng.gen_range(1..=k);
                let a = SubtorusSubspace::new(random_space(&mut rng, n, m)).unwrap();
                let out = make_almost_split(&a, &d).unwrap_or_else(|e| panic!("{kind}: {e}"));
                assert!(decompose(&out.image, &d).unwrap().ani.is_trivial());
                assert!(out.trace.len() <= m);
            }
        }
    }
}
