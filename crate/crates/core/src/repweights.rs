//! Weight combinatorics of highest-weight representations: the constants
//! `dᵢ` with `χᵢ = dᵢ·γᵢ`, saturated weight sets, and the non-weight
//! criterion `⟨w(χ), β⟩ ≥ 0 ⟹ w(χ) + β` is not a weight.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::rootcore::{RootSystem, RootVector, Weight};
use crate::weyl::{self, WeylElement};

/// `χᵢ = dᵢ·γᵢ` with `γᵢ = Σ_{β ≥ αᵢ} β`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionConstant {
    pub index: usize,
    pub gamma: RootVector,
    #[serde(with = "crate::rational::serde_rat")]
    pub d: Rational,
}

pub fn fundamental_expansion_constants(sys: &RootSystem) -> Result<Vec<ExpansionConstant>> {
    (0..sys.rank())
        .map(|i| {
            let mut gamma = RootVector::zero(sys.rank());
            for beta in sys.positive_roots() {
                if beta.coords()[i] >= Rational::from_integer(1.into()) {
                    gamma = &gamma + beta;
                }
            }
            let chi = sys.weight_to_root(&sys.fundamental_weight(i));
            let k = gamma
                .coords()
                .iter()
                .position(|x| !x.is_zero())
                .ok_or_else(|| Error::invariant(format!("γ_{} vanishes", i + 1)))?;
            let d = &chi.coords()[k] / &gamma.coords()[k];
            if gamma.scaled(&d) != chi {
                return Err(Error::invariant(format!("χ_{} is not proportional to γ_{}", i + 1, i + 1)));
            }
            if !d.is_positive() {
                return Err(Error::invariant(format!("d_{} = {d} is not positive", i + 1)));
            }
            for j in sys.components()[sys.component_of(i)].iter().filter(|&&j| j != i) {
                if !sys.pairing(&gamma, &sys.simple_root(*j))?.is_zero() {
                    return Err(Error::invariant(format!("γ_{} is not orthogonal to α_{}", i + 1, j + 1)));
                }
            }
            Ok(ExpansionConstant { index: i, gamma, d })
        })
        .collect()
}

/// The weight data of an irreducible representation: its highest weight and
/// the full set of weights. A lowest-weight module is modeled by negating
/// all weight data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRepSpec {
    pub highest_weight: Weight,
    pub weight_set: BTreeSet<Weight>,
    pub highest_multiplicity_one: bool,
    /// True when this is the negation of a highest-weight spec, so that
    /// `highest_weight` holds the lowest weight.
    #[serde(default)]
    pub negated: bool,
}

impl WeightRepSpec {
    pub fn contains(&self, mu: &Weight) -> bool {
        self.weight_set.contains(mu)
    }

    pub fn len(&self) -> usize {
        self.weight_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight_set.is_empty()
    }

    pub fn negate(&self) -> WeightRepSpec {
        WeightRepSpec {
            highest_weight: -&self.highest_weight,
            weight_set: self.weight_set.iter().map(|w| -w).collect(),
            highest_multiplicity_one: self.highest_multiplicity_one,
            negated: !self.negated,
        }
    }
}

type CacheKey = (Vec<Vec<i64>>, Weight);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<WeightRepSpec>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<WeightRepSpec>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Largest number of root-lattice points the dominant-weight box may hold.
pub const MAX_BOX: u128 = 5_000_000;

/// Weights of the irreducible module of highest weight `highest`: the union
/// of the orbits of dominant `μ ≤ highest` in the same root-lattice coset.
pub fn saturate(sys: &RootSystem, highest: &Weight) -> Result<Arc<WeightRepSpec>> {
    sys.check_len("highest weight", highest.len())?;
    if !highest.is_integral() || !highest.is_dominant() {
        return Err(Error::domain(format!("{highest} is not a dominant integral weight")));
    }
    let key = (sys.cartan().to_vec(), highest.clone());
    if let Some(hit) = cache().lock().expect("saturation cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    let spec = Arc::new(compute_saturation(sys, highest)?);
    cache().lock().expect("saturation cache poisoned").entry(key).or_insert_with(|| spec.clone());
    Ok(spec)
}

fn compute_saturation(sys: &RootSystem, highest: &Weight) -> Result<WeightRepSpec> {
    // dominant weights have non-negative root coordinates, so
    // highest − μ = Σ kᵢαᵢ has 0 ≤ kᵢ ≤ (root coordinate i of highest)
    let top = sys.weight_to_root(highest);
    let bounds: Vec<u64> = top
        .coords()
        .iter()
        .map(|c| c.floor().to_integer().to_u64().unwrap_or(0))
        .collect();
    let volume = bounds.iter().fold(1u128, |acc, b| acc.saturating_mul(*b as u128 + 1));
    if volume > MAX_BOX {
        return Err(Error::BoundExceeded { what: "dominant weight box".into(), estimated: volume, cap: MAX_BOX });
    }
    let mut dominant = Vec::new();
    let mut k = vec![0u64; sys.rank()];
    loop {
        let offset = RootVector::new(k.iter().map(|&x| Rational::from_integer((x as i64).into())).collect());
        let mu = highest - &sys.root_to_weight(&offset);
        if mu.is_dominant() {
            dominant.push(mu);
        }
        // odometer
        let mut pos = 0;
        while pos < k.len() && k[pos] == bounds[pos] {
            k[pos] = 0;
            pos += 1;
        }
        if pos == k.len() {
            break;
        }
        k[pos] += 1;
    }
    let mut weight_set = BTreeSet::new();
    for mu in &dominant {
        weight_set.extend(weyl::orbit(sys, mu)?);
    }
    Ok(WeightRepSpec { highest_weight: highest.clone(), weight_set, highest_multiplicity_one: true, negated: false })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NonweightVerdict {
    GuaranteedNotWeight,
    Unknown,
}

/// `GuaranteedNotWeight` when `⟨w(χ), β⟩ ≥ 0`, the contrapositive of: if
/// `w(χ) + β` is a weight of the module with highest weight `χ` then
/// `⟨w(χ), β⟩ < 0`.
pub fn nonweight_check(sys: &RootSystem, chi: &Weight, w: &WeylElement, beta: &RootVector) -> Result<NonweightVerdict> {
    sys.check_len("weight", chi.len())?;
    if !chi.is_dominant() {
        return Err(Error::domain(format!("{chi} is not dominant")));
    }
    if !sys.is_root(beta) {
        return Err(Error::domain(format!("{beta} is not a root")));
    }
    let moved = w.apply(chi);
    Ok(if sys.pairing(&moved, beta)?.is_negative() {
        NonweightVerdict::Unknown
    } else {
        NonweightVerdict::GuaranteedNotWeight
    })
}

/// `β + λ`, the weight reached from `λ` by the root space of `β` (`β` may be
/// zero).
pub fn qweight_action_shift(sys: &RootSystem, beta: &RootVector, lambda: &Weight) -> Result<Weight> {
    sys.check_len("weight", lambda.len())?;
    sys.check_len("root", beta.len())?;
    if !beta.is_zero() && !sys.is_root(beta) {
        return Err(Error::domain(format!("{beta} is neither zero nor a root")));
    }
    Ok(lambda + &sys.root_to_weight(beta))
}
