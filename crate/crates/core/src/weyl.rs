//! Weyl groups: enumeration, the actions on weights and torus vectors,
//! dominance conjugation, orbits, and the one-step reflection search.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::rootcore::{RootSystem, RootVector, TorusVector, Weight};

/// Environment variable capping the order of any enumerated Weyl group or
/// orbit.
pub const MAX_WEYL_ENV: &str = "ROOTCERT_MAX_WEYL";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeylLimits {
    pub max_rank: usize,
    pub max_order: u128,
}

impl Default for WeylLimits {
    fn default() -> Self {
        Self { max_rank: 6, max_order: 100_000 }
    }
}

impl WeylLimits {
    /// Defaults, with `max_order` overridden by `ROOTCERT_MAX_WEYL` when set.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(cap) = std::env::var(MAX_WEYL_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            limits.max_order = cap;
        }
        limits
    }
}

/// A Weyl group element as a word in simple reflections plus its matrix on
/// fundamental-weight coordinates (`c ↦ M c`). The word `[a, b, …]` denotes
/// `s_a s_b ⋯`, so the last letter acts first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    pub word: Vec<usize>,
    pub matrix: Vec<Vec<i64>>,
}

fn identity_i64(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn mul_i64(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b.len();
    let m = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..m).map(|j| (0..n).map(|k| row[k] * b[k][j]).sum()).collect()).collect()
}

/// Matrix of `sᵢ` on weight coordinates.
fn simple_matrix(sys: &RootSystem, i: usize) -> Vec<Vec<i64>> {
    let n = sys.rank();
    let mut m = identity_i64(n);
    for k in 0..n {
        m[k][i] -= sys.cartan()[i][k];
    }
    m
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        Self { word: Vec::new(), matrix: identity_i64(rank) }
    }

    pub fn from_word(sys: &RootSystem, word: &[usize]) -> Result<Self> {
        let n = sys.rank();
        if let Some(bad) = word.iter().find(|&&i| i >= n) {
            return Err(Error::domain(format!("simple reflection index {bad} out of range for rank {n}")));
        }
        let mut matrix = identity_i64(n);
        for &i in word {
            matrix = mul_i64(&matrix, &simple_matrix(sys, i));
        }
        Ok(Self { word: word.to_vec(), matrix })
    }

    pub fn simple(sys: &RootSystem, i: usize) -> Result<Self> {
        Self::from_word(sys, &[i])
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == identity_i64(self.matrix.len())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        WeylElement { word, matrix: mul_i64(&self.matrix, &other.matrix) }
    }

    pub fn inverse(&self, sys: &RootSystem) -> WeylElement {
        let word: Vec<usize> = self.word.iter().rev().copied().collect();
        Self::from_word(sys, &word).expect("letters already validated")
    }

    /// `w(χ)`.
    pub fn apply(&self, chi: &Weight) -> Weight {
        Weight::new(
            self.matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(chi.coords())
                        .filter(|(m, _)| **m != 0)
                        .map(|(m, c)| crate::rational::int(*m) * c)
                        .sum()
                })
                .collect(),
        )
    }

    /// `w(β)` for a root-lattice vector.
    pub fn apply_root(&self, sys: &RootSystem, beta: &RootVector) -> RootVector {
        self.word.iter().rev().fold(beta.clone(), |acc, &i| sys.simple_reflect_root(i, &acc))
    }

    /// The contragredient action on the torus, characterized by
    /// `w(χ)(t) = χ(w⁻¹·t)`.
    pub fn act(&self, sys: &RootSystem, t: &TorusVector) -> TorusVector {
        self.word.iter().rev().fold(t.clone(), |acc, &i| sys.simple_reflect_torus(i, &acc))
    }
}

/// `act(w, t)` as a free function.
pub fn act(sys: &RootSystem, w: &WeylElement, t: &TorusVector) -> TorusVector {
    w.act(sys, t)
}

/// The full group in breadth-first order; every element carries a word of
/// minimal length.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    elements: Vec<WeylElement>,
    index: HashMap<Vec<Vec<i64>>, usize>,
}

impl WeylGroup {
    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, w: &WeylElement) -> bool {
        self.index.contains_key(&w.matrix)
    }

    /// The enumerated element with the same matrix as `w` (carrying a minimal
    /// word).
    pub fn canonical(&self, w: &WeylElement) -> Option<&WeylElement> {
        self.index.get(&w.matrix).map(|&i| &self.elements[i])
    }
}

fn check_limits(sys: &RootSystem, limits: WeylLimits, what: &str) -> Result<u128> {
    let estimated = sys.weyl_order();
    if sys.rank() > limits.max_rank {
        return Err(Error::BoundExceeded {
            what: format!("{what}: rank {} exceeds rank bound {}", sys.rank(), limits.max_rank),
            estimated,
            cap: limits.max_order,
        });
    }
    if estimated > limits.max_order {
        return Err(Error::BoundExceeded { what: what.to_string(), estimated, cap: limits.max_order });
    }
    Ok(estimated)
}

/// Enumerates `W` by breadth-first closure over simple reflections, using the
/// limits from the environment. The result is cached on the system.
pub fn enumerate_weyl(sys: &RootSystem) -> Result<&WeylGroup> {
    enumerate_weyl_with(sys, WeylLimits::from_env())
}

pub fn enumerate_weyl_with(sys: &RootSystem, limits: WeylLimits) -> Result<&WeylGroup> {
    if let Some(g) = sys.weyl_cache.get() {
        return Ok(g);
    }
    check_limits(sys, limits, "Weyl group enumeration")?;
    Ok(sys.weyl_cache.get_or_init(|| bfs_group(sys)))
}

fn bfs_group(sys: &RootSystem) -> WeylGroup {
    let n = sys.rank();
    let generators: Vec<Vec<Vec<i64>>> = (0..n).map(|i| simple_matrix(sys, i)).collect();
    let id = WeylElement::identity(n);
    let mut index = HashMap::new();
    index.insert(id.matrix.clone(), 0);
    let mut elements = vec![id];
    let mut k = 0;
    while k < elements.len() {
        for (i, g) in generators.iter().enumerate() {
            let matrix = mul_i64(&elements[k].matrix, g);
            if !index.contains_key(&matrix) {
                let mut word = elements[k].word.clone();
                word.push(i);
                index.insert(matrix.clone(), elements.len());
                elements.push(WeylElement { word, matrix });
            }
        }
        k += 1;
    }
    WeylGroup { elements, index }
}

/// Conjugates `χ` to the dominant chamber by reflecting at the lowest-index
/// negative coordinate until none remain. Returns `(χ⁺, w)` with `χ⁺ = w(χ)`.
pub fn dominate(sys: &RootSystem, chi: &Weight) -> Result<(Weight, WeylElement)> {
    sys.check_len("weight", chi.len())?;
    const MAX_STEPS: usize = 1_000_000;
    let mut current = chi.clone();
    let mut applied = Vec::new();
    while let Some(i) = current.coords().iter().position(|c| c < &Rational::zero()) {
        current = sys.simple_reflect_weight(i, &current);
        applied.push(i);
        if applied.len() > MAX_STEPS {
            return Err(Error::invariant("dominance loop did not terminate"));
        }
    }
    applied.reverse();
    let w = WeylElement::from_word(sys, &applied)?;
    Ok((current, w))
}

/// Outcome of the one-step reflection search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OneStep {
    /// `χ(t) ≠ 0` already.
    Zero,
    /// A root `β` with `s_β(χ)(t) ≠ 0`. `word = [λ₁, …, λ_k]` is a
    /// minimal-length `w = s_{λ₁}⋯s_{λ_k}` with `w(χ)(t) ≠ 0`, and
    /// `β = s_{λ₁}⋯s_{λ_{k−1}}(α_{λ_k})`.
    Reflect { beta: RootVector, word: Vec<usize>, reflection: WeylElement },
}

/// Finds `β ∈ Φ ∪ {0}` with `s_β(χ)(t) ≠ 0`.
///
/// Breadth-first search over the orbit of `χ` (extending words on the left,
/// so each orbit point is reached by a minimal word) locates the shortest `w`
/// with `w(χ)(t) ≠ 0`; minimality forces `⟨χ, λᵢ⟩ = 0` for `i < k`, so
/// `s_β(χ) = w(χ)` for the `β` above.
pub fn one_step(sys: &RootSystem, chi: &Weight, t: &TorusVector) -> Result<OneStep> {
    sys.check_len("weight", chi.len())?;
    sys.check_len("torus vector", t.len())?;
    if chi.is_zero() {
        return Err(Error::domain("one_step requires a nonzero character"));
    }
    if t.is_zero() {
        return Err(Error::domain("one_step requires a nonzero torus vector"));
    }
    if !sys.evaluate(chi, t).is_zero() {
        return Ok(OneStep::Zero);
    }

    let cap = WeylLimits::from_env().max_order;
    let mut visited: HashSet<Weight> = HashSet::from([chi.clone()]);
    let mut queue: VecDeque<(Weight, Vec<usize>)> = VecDeque::from([(chi.clone(), Vec::new())]);
    let mut found: Option<Vec<usize>> = None;
    'search: while let Some((mu, word)) = queue.pop_front() {
        for i in 0..sys.rank() {
            let nu = sys.simple_reflect_weight(i, &mu);
            if visited.contains(&nu) {
                continue;
            }
            let mut next_word = Vec::with_capacity(word.len() + 1);
            next_word.push(i);
            next_word.extend_from_slice(&word);
            if !sys.evaluate(&nu, t).is_zero() {
                found = Some(next_word);
                break 'search;
            }
            visited.insert(nu.clone());
            if visited.len() as u128 > cap {
                return Err(Error::BoundExceeded {
                    what: "one_step orbit search".into(),
                    estimated: sys.weyl_order(),
                    cap,
                });
            }
            queue.push_back((nu, next_word));
        }
    }

    let Some(word) = found else {
        let supports: Vec<usize> = sys
            .components()
            .iter()
            .enumerate()
            .filter(|(_, block)| {
                block.iter().any(|&i| !chi.coords()[i].is_zero()) && block.iter().any(|&i| !t.coords()[i].is_zero())
            })
            .map(|(c, _)| c)
            .collect();
        return Err(if supports.is_empty() {
            Error::domain("no irreducible component carries nonzero projections of both the character and the torus vector")
        } else {
            Error::invariant(format!("orbit search failed although components {supports:?} support both inputs"))
        });
    };

    let k = word.len();
    let beta = word[..k - 1]
        .iter()
        .rev()
        .fold(sys.simple_root(word[k - 1]), |acc, &i| sys.simple_reflect_root(i, &acc));
    let mut palindrome: Vec<usize> = word.clone();
    palindrome.extend(word[..k - 1].iter().rev());
    let reflection = WeylElement::from_word(sys, &palindrome)?;

    let image = sys.reflect(chi, &beta)?;
    if sys.evaluate(&image, t).is_zero() {
        return Err(Error::invariant(format!("reflection in {beta} does not move {chi} off the kernel of t")));
    }
    if reflection.apply(chi) != image {
        return Err(Error::invariant("palindromic word disagrees with the reflection formula"));
    }
    Ok(OneStep::Reflect { beta, word, reflection })
}

/// The full `W`-orbit of `χ`, sorted.
pub fn orbit(sys: &RootSystem, chi: &Weight) -> Result<Vec<Weight>> {
    sys.check_len("weight", chi.len())?;
    let limits = WeylLimits::from_env();
    if sys.rank() > limits.max_rank {
        check_limits(sys, limits, "orbit enumeration")?;
    }
    let mut seen: BTreeSet<Weight> = BTreeSet::from([chi.clone()]);
    let mut frontier = vec![chi.clone()];
    while let Some(mu) = frontier.pop() {
        for i in 0..sys.rank() {
            let nu = sys.simple_reflect_weight(i, &mu);
            if seen.insert(nu.clone()) {
                if seen.len() as u128 > limits.max_order {
                    return Err(Error::BoundExceeded {
                        what: "orbit enumeration".into(),
                        estimated: sys.weyl_order(),
                        cap: limits.max_order,
                    });
                }
                frontier.push(nu);
            }
        }
    }
    Ok(seen.into_iter().collect())
}
