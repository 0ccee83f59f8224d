//! Divergence certificates: from a subtorus `A` with `dim A < rank_Q`, build
//! the character `χ′`, the pivots, the closed root set `Ψ`, and the
//! per-index weights `χ′ − αᵢ`, then verify the linear and combinatorial
//! hypotheses they are meant to satisfy. Also the factor-level decision of
//! which existence statement applies to a given `A`.
//!
//! Everything here works in the coordinates of the relative root system.
//! [`relative_subspace`] converts an ambient subspace of a [`SplitDatum`].

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diophantine;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{self, serde_bigint, serde_rat, Rational};
use crate::repweights::{self, NonweightVerdict};
use crate::rootcore::{RootSystem, RootVector, TorusVector, Weight};
use crate::torus::{self, SplitDatum, SubtorusSubspace};
use crate::weyl::{self, WeylElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// `A` projects to zero in this factor.
    ZeroProjection,
    /// The character vanishing on `A` is orthogonal to this factor.
    OrthogonalToCharacter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedComponent {
    pub indices: Vec<usize>,
    pub reason: DropReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pivot {
    pub component: usize,
    pub index: usize,
}

/// Weight data attached to simple root `αᵢ` of the reduced system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerIndex {
    pub index: usize,
    /// `χ′ − αᵢ`.
    pub weight: Weight,
    /// `wᵢ(χ′ − αᵢ)`, dominant; the highest weight of the `+` module.
    pub dominant: Weight,
    pub w: WeylElement,
    /// `−wᵢ(χ′ − αᵢ)`, the lowest weight of the `−` module.
    pub lowest_weight: Weight,
    /// Positive integer scaling both modules' extremal weights.
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceCertificate {
    /// Cartan matrix of the full relative system the certificate refers to.
    pub system_cartan: Vec<Vec<i64>>,
    /// Simple roots of the full system kept after dropping factors; all
    /// remaining fields use the reduced system on these indices.
    pub kept: Vec<usize>,
    pub dropped: Vec<DroppedComponent>,
    /// Real character vanishing on `A`, normalized to `max |bᵢ| = 1`.
    pub chi_real: Weight,
    /// `dominance_w(chi_real)`.
    pub chi_dominant: Weight,
    pub dominance_w: WeylElement,
    #[serde(with = "serde_rat")]
    pub big_r: Rational,
    pub rank: usize,
    /// `1/(2Rr)`.
    #[serde(with = "serde_rat")]
    pub tolerance_bound: Rational,
    /// The approximation tolerance actually enforced on `χ′`; at most
    /// `tolerance_bound`, and small enough for the decay inequality.
    #[serde(with = "serde_rat")]
    pub tolerance: Rational,
    /// `Σ dᵢ / min dᵢ` for the root coordinates of `chi_dominant`.
    #[serde(with = "serde_rat")]
    pub decay_ratio: Rational,
    pub dirichlet_scale: u64,
    /// The integer `m` making `⟨χ′, α_{i_j}⟩` exceed every `⟨α_l, β⟩`.
    pub multiplier: u64,
    #[serde(with = "serde_bigint::vec")]
    pub p: Vec<BigInt>,
    /// `multiplier · p`.
    pub chi_prime: Weight,
    /// `|multiplier·dirichlet_scale·chi_dominant − χ′|` per coordinate.
    #[serde(with = "serde_rat::vec")]
    pub approximation_errors: Vec<Rational>,
    /// Simple-root coordinates of `χ′`.
    #[serde(with = "serde_rat::vec")]
    pub alpha_coeffs: Vec<Rational>,
    /// `max ⟨α_l, β⟩` over simple `α_l` and roots `β`.
    #[serde(with = "serde_rat")]
    pub max_root_pairing: Rational,
    pub pivots: Vec<Pivot>,
    pub psi: Vec<RootVector>,
    pub per_index: Vec<PerIndex>,
    pub checks: BTreeMap<String, bool>,
}

impl DivergenceCertificate {
    pub fn full_system(&self) -> Result<RootSystem> {
        RootSystem::from_cartan(self.system_cartan.clone())
    }

    pub fn reduced_system(&self) -> Result<RootSystem> {
        let full = self.full_system()?;
        if self.kept.is_empty() || self.kept.iter().any(|&i| i >= full.rank()) {
            return Err(Error::domain("certificate keeps invalid simple-root indices"));
        }
        full.subsystem(&self.kept)
    }

    /// `A` in reduced coordinates after the dominance conjugation.
    pub fn transport(&self, a: &SubtorusSubspace) -> Result<SubtorusSubspace> {
        let reduced = self.reduced_system()?;
        let restricted = SubtorusSubspace::span(&restrict_all(&a.basis, &self.kept));
        Ok(restricted.act(&reduced, &self.dominance_w))
    }

    pub fn to_json(&self) -> Result<String> {
        crate::canonical::to_string(self)
    }
}

fn restrict(t: &TorusVector, idx: &[usize]) -> TorusVector {
    TorusVector::new(idx.iter().map(|&i| t.coords()[i].clone()).collect())
}

fn restrict_all(ts: &[TorusVector], idx: &[usize]) -> Vec<TorusVector> {
    ts.iter().map(|t| restrict(t, idx)).collect()
}

fn projection_dim(a: &SubtorusSubspace, block: &[usize]) -> usize {
    linalg::rank_of(&restrict_all(&a.basis, block).iter().map(|t| t.coords().to_vec()).collect::<Vec<_>>())
}

/// `R = max_i Σ_j ⟨χᵢ, χⱼ⟩`.
pub fn big_r(sys: &RootSystem) -> Result<Rational> {
    let n = sys.rank();
    let mut best: Option<Rational> = None;
    for i in 0..n {
        let mut s = Rational::zero();
        for j in 0..n {
            s += sys.pairing(&sys.fundamental_weight(i), &sys.fundamental_weight(j))?;
        }
        if best.as_ref().map_or(true, |b| &s > b) {
            best = Some(s);
        }
    }
    best.ok_or_else(|| Error::domain("empty system"))
}

/// `R` computed from the fundamental weights of the simple system `w(Δ)`.
pub fn big_r_conjugated(sys: &RootSystem, w: &WeylElement) -> Result<Rational> {
    let n = sys.rank();
    let moved: Vec<Weight> = (0..n).map(|i| w.apply(&sys.fundamental_weight(i))).collect();
    let mut best: Option<Rational> = None;
    for a in &moved {
        let mut s = Rational::zero();
        for b in &moved {
            s += sys.pairing(a, b)?;
        }
        if best.as_ref().map_or(true, |x| &s > x) {
            best = Some(s);
        }
    }
    best.ok_or_else(|| Error::domain("empty system"))
}

/// `max ⟨α_l, β⟩` over simple roots `α_l` and all roots `β`.
pub fn max_root_pairing(sys: &RootSystem) -> Result<Rational> {
    let mut best = Rational::zero();
    for l in 0..sys.rank() {
        let al = sys.simple_root(l);
        for beta in sys.roots() {
            let v = sys.pairing(&al, &beta)?;
            if v > best {
                best = v;
            }
        }
    }
    Ok(best)
}

/// Sum of all simple-root coordinates of all fundamental weights.
fn fundamental_mass(sys: &RootSystem) -> Rational {
    (0..sys.rank()).flat_map(|i| sys.weight_to_root(&sys.fundamental_weight(i)).coords().to_vec()).sum()
}

/// Approximation tolerance guaranteeing the decay inequality: with
/// `χ(t) = 0`, `max αᵢ(t) = 1` and positive root coordinates `d` of `χ`,
/// every `|αᵢ(t)| ≤ K = Σd / min d`, hence `|χᵢ(t)| ≤ K·Sᵢ`; an error below
/// `1/(2K·ΣSᵢ)` per coordinate keeps `|χ′(t)| < ½`.
fn decay_tolerance(sys: &RootSystem, chi: &Weight) -> Result<(Rational, Rational)> {
    let d = sys.weight_to_root(chi);
    let min = d.coords().iter().min().cloned().unwrap_or_else(Rational::zero);
    if !min.is_positive() {
        return Err(Error::invariant(format!("root coordinates of {chi} are not all positive")));
    }
    let k: Rational = d.coords().iter().sum::<Rational>() / min;
    let k_eff = if k < Rational::one() { Rational::one() } else { k.clone() };
    let eps = (rational::int(2) * k_eff * fundamental_mass(sys)).recip();
    Ok((eps, k))
}

fn psi_of(sys: &RootSystem, pivots: &[Pivot]) -> Vec<RootVector> {
    sys.positive_roots()
        .iter()
        .filter(|b| pivots.iter().any(|p| b.coords()[p.index] >= Rational::one()))
        .cloned()
        .collect()
}

/// A pair in `Ψ` whose sum is a root outside `Ψ`, if any.
fn psi_closure_witness(sys: &RootSystem, psi: &[RootVector]) -> Option<(RootVector, RootVector)> {
    let set: BTreeSet<&RootVector> = psi.iter().collect();
    for (i, a) in psi.iter().enumerate() {
        for b in &psi[i..] {
            let s = a + b;
            if sys.is_root(&s) && !set.contains(&s) {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

fn per_index_data(sys: &RootSystem, chi_prime: &Weight) -> Result<Vec<PerIndex>> {
    (0..sys.rank())
        .map(|i| {
            let weight = chi_prime - &sys.root_to_weight(&sys.simple_root(i));
            let (dominant, w) = weyl::dominate(sys, &weight)?;
            Ok(PerIndex { index: i, lowest_weight: -&dominant, weight, dominant, w, multiplicity: 1 })
        })
        .collect()
}

/// Converts an ambient subspace to relative coordinates. A subspace not
/// inside `𝔰` is accepted when it is almost split, through its projection
/// to `𝔰` (which carries the same rational characters).
pub fn relative_subspace(d: &SplitDatum, a: &SubtorusSubspace) -> Result<SubtorusSubspace> {
    d.require_relative()?;
    let inside = a.basis.iter().all(|t| d.in_split(t));
    if inside {
        return d.subspace_to_relative(a);
    }
    let parts = torus::decompose(a, d)?;
    if !parts.ani.is_trivial() {
        return Err(Error::precondition(
            "subspace has a nontrivial anisotropic part; conjugate it with make_almost_split first",
        ));
    }
    let projected = SubtorusSubspace {
        basis: a.basis.iter().map(|t| d.project_to_split(t)).collect(),
        approximate: a.approximate,
    };
    d.subspace_to_relative(&projected)
}

/// Builds a certificate for `A ⊆ 𝔰` given in ambient coordinates.
pub fn build_certificate(d: &SplitDatum, a: &SubtorusSubspace) -> Result<DivergenceCertificate> {
    let rel = d.require_relative()?;
    build_certificate_in(&rel.system, &relative_subspace(d, a)?)
}

/// Builds a certificate for `A` given in evaluation coordinates of `sys`.
pub fn build_certificate_in(sys: &RootSystem, a: &SubtorusSubspace) -> Result<DivergenceCertificate> {
    for t in &a.basis {
        sys.check_len("subspace vector", t.len())?;
    }
    let a = SubtorusSubspace::new(a.basis.clone())?;
    if a.is_trivial() {
        return Err(Error::precondition("A must have positive dimension"));
    }
    if a.dim() >= sys.rank() {
        return Err(Error::precondition(format!(
            "dim A = {} must be below the rational rank {}",
            a.dim(),
            sys.rank()
        )));
    }

    // factors on which A is trivial carry no information
    let mut dropped = Vec::new();
    let mut kept0 = Vec::new();
    for block in sys.components() {
        if projection_dim(&a, block) == 0 {
            dropped.push(DroppedComponent { indices: block.clone(), reason: DropReason::ZeroProjection });
        } else {
            kept0.extend(block.iter().copied());
        }
    }
    kept0.sort_unstable();
    if a.dim() >= kept0.len() {
        return Err(Error::precondition(format!(
            "dim A = {} is not below the rank {} of the factors A projects nontrivially to",
            a.dim(),
            kept0.len()
        )));
    }
    let sys0 = sys.subsystem(&kept0)?;
    let a0 = SubtorusSubspace::new(restrict_all(&a.basis, &kept0))?;
    let chi0 = torus::q_character_vanishing_on(&a0, &SplitDatum::split(sys0.clone()))?;

    // factors orthogonal to the character
    let mut kept = Vec::new();
    for block in sys0.components() {
        let full: Vec<usize> = block.iter().map(|&i| kept0[i]).collect();
        if block.iter().all(|&i| chi0.coords()[i].is_zero()) {
            dropped.push(DroppedComponent { indices: full, reason: DropReason::OrthogonalToCharacter });
        } else {
            kept.extend(full);
        }
    }
    kept.sort_unstable();
    dropped.sort_by(|x, y| x.indices.cmp(&y.indices));
    let positions: Vec<usize> = kept.iter().map(|k| kept0.iter().position(|x| x == k).expect("kept ⊆ kept0")).collect();
    let reduced = sys.subsystem(&kept)?;
    let a_red = SubtorusSubspace::span(&restrict_all(&a.basis, &kept));

    let raw: Vec<Rational> = positions.iter().map(|&i| chi0.coords()[i].clone()).collect();
    let scale = raw.iter().map(|x| x.abs()).max().ok_or_else(|| Error::invariant("empty character"))?;
    let chi_real = Weight::new(raw.iter().map(|x| x / &scale).collect());
    for t in &a_red.basis {
        if !reduced.evaluate(&chi_real, t).is_zero() {
            return Err(Error::invariant("character does not vanish on the reduced subspace"));
        }
    }

    let r = reduced.rank();
    let big_r = big_r(&reduced)?;
    let tolerance_bound = (rational::int(2) * &big_r * rational::int(r as i64)).recip();
    let (chi_dominant, dominance_w) = weyl::dominate(&reduced, &chi_real)?;
    let (eps_decay, decay_ratio) = decay_tolerance(&reduced, &chi_dominant)?;
    let tolerance = if eps_decay < tolerance_bound { eps_decay } else { tolerance_bound.clone() };
    let max_pair = max_root_pairing(&reduced)?;

    let max_m: u64 = rational::round(&max_pair.floor()).try_into().unwrap_or(u64::MAX - 1) + 1;
    let mut chosen = None;
    for m in 1..=max_m {
        let approx = diophantine::rationalize_with_tolerance(chi_dominant.coords(), &(&tolerance / rational::int(m as i64)))?;
        let mr = rational::int(m as i64);
        let pivots: Option<Vec<Pivot>> = reduced
            .components()
            .iter()
            .enumerate()
            .map(|(c, block)| {
                block
                    .iter()
                    .find(|&&i| &mr * Rational::from_integer(approx.p[i].clone()) > max_pair)
                    .map(|&i| Pivot { component: c, index: i })
            })
            .collect();
        if let Some(pivots) = pivots {
            chosen = Some((m, approx, pivots));
            break;
        }
    }
    let (multiplier, approx, pivots) =
        chosen.ok_or_else(|| Error::invariant("no multiplier makes every component's pivot large enough"))?;
    let m = rational::int(multiplier as i64);
    let chi_prime = Weight::new(approx.p_rational().iter().map(|x| x * &m).collect());
    let q = rational::int(approx.scale as i64);
    let approximation_errors: Vec<Rational> = chi_dominant
        .coords()
        .iter()
        .zip(chi_prime.coords())
        .map(|(b, c)| (b * &q * &m - c).abs())
        .collect();
    let alpha_coeffs = reduced.weight_to_root(&chi_prime).coords().to_vec();
    if alpha_coeffs.iter().any(|d| !d.is_positive()) {
        return Err(Error::invariant("χ′ has a non-positive simple-root coordinate after component dropping"));
    }
    let psi = psi_of(&reduced, &pivots);
    let per_index = per_index_data(&reduced, &chi_prime)?;

    let mut cert = DivergenceCertificate {
        system_cartan: sys.cartan().to_vec(),
        kept,
        dropped,
        chi_real,
        chi_dominant,
        dominance_w,
        big_r,
        rank: r,
        tolerance_bound,
        tolerance,
        decay_ratio,
        dirichlet_scale: approx.scale,
        multiplier,
        p: approx.p,
        chi_prime,
        approximation_errors,
        alpha_coeffs,
        max_root_pairing: max_pair,
        pivots,
        psi,
        per_index,
        checks: BTreeMap::new(),
    };
    let static_report = static_checks(&cert, &reduced);
    cert.checks = static_report.iter().map(|c| (c.name.clone(), c.status == CheckStatus::Pass)).collect();
    if let Some(bad) = static_report.iter().find(|c| c.status == CheckStatus::Fail) {
        return Err(Error::invariant(format!("freshly built certificate fails {}: {}", bad.name, bad.detail)));
    }
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Group-level hypothesis without a combinatorial shadow to test.
    Delegated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl CheckResult {
    fn pass(name: &str, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: CheckStatus::Pass, detail: detail.into(), witness: None }
    }

    fn fail(name: &str, detail: impl Into<String>, witness: serde_json::Value) -> Self {
        Self { name: name.into(), status: CheckStatus::Fail, detail: detail.into(), witness: Some(witness) }
    }

    fn delegated(name: &str, detail: impl Into<String>) -> Self {
        Self { name: name.into(), status: CheckStatus::Delegated, detail: detail.into(), witness: None }
    }

    fn from_bool(name: &str, ok: bool, detail: impl Into<String>, witness: impl FnOnce() -> serde_json::Value) -> Self {
        if ok {
            Self::pass(name, detail)
        } else {
            Self::fail(name, detail, witness())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
    pub failures: usize,
    pub passed: bool,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::canonical::to_string(self)
    }
}

fn json<T: Serialize>(v: T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

/// Checks that depend on the certificate alone.
fn static_checks(cert: &DivergenceCertificate, sys: &RootSystem) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let r = sys.rank();
    let shapes_ok = cert.rank == r
        && cert.chi_real.len() == r
        && cert.chi_dominant.len() == r
        && cert.chi_prime.len() == r
        && cert.p.len() == r
        && cert.approximation_errors.len() == r
        && cert.alpha_coeffs.len() == r
        && cert.per_index.len() == r
        && cert.dominance_w.matrix.len() == r
        && cert.pivots.iter().all(|p| p.index < r)
        && cert.psi.iter().all(|b| b.len() == r);
    out.push(CheckResult::from_bool("shape", shapes_ok, "field lengths match the reduced rank", || {
        json(serde_json::json!({ "rank": r }))
    }));
    if !shapes_ok {
        return out;
    }

    // dominance
    let w_ok = WeylElement::from_word(sys, &cert.dominance_w.word).map(|w| w == cert.dominance_w).unwrap_or(false);
    let moved = cert.dominance_w.apply(&cert.chi_real);
    out.push(CheckResult::from_bool(
        "dominance",
        w_ok && moved == cert.chi_dominant && cert.chi_dominant.is_dominant(),
        "dominance_w maps chi_real to the dominant chi_dominant",
        || json(&moved),
    ));
    let nonneg = cert.p.iter().all(|x| !x.is_negative());
    out.push(CheckResult::from_bool("p_nonnegative", nonneg, "all p_i ≥ 0 after dominance", || json(cert.p.iter().map(|x| x.to_string()).collect::<Vec<_>>())));

    // R and tolerances
    let r_ok = big_r(sys).map(|x| x == cert.big_r).unwrap_or(false);
    let bound = (rational::int(2) * &cert.big_r * rational::int(r as i64)).recip();
    let tol_ok = r_ok
        && bound == cert.tolerance_bound
        && cert.tolerance <= cert.tolerance_bound
        && cert.tolerance.is_positive()
        && decay_tolerance(sys, &cert.chi_dominant).map(|(e, _)| cert.tolerance <= e).unwrap_or(false);
    out.push(CheckResult::from_bool(
        "tolerance",
        tol_ok,
        "R recomputed; tolerance ≤ 1/(2Rr) and ≤ the decay tolerance",
        || json(serde_json::json!({ "R": rational::format(&cert.big_r), "tolerance": rational::format(&cert.tolerance) })),
    ));

    // approximation
    let m = rational::int(cert.multiplier as i64);
    let q = rational::int(cert.dirichlet_scale as i64);
    let mut approx_witness = None;
    for i in 0..r {
        let p = Rational::from_integer(cert.p[i].clone());
        let b = &cert.chi_dominant.coords()[i];
        let err_p = (b * &q - &p).abs();
        let err_c = (b * &q * &m - &cert.chi_prime.coords()[i]).abs();
        let ok = cert.multiplier >= 1
            && cert.dirichlet_scale >= 1
            && cert.chi_prime.coords()[i] == &p * &m
            && err_p < cert.tolerance_bound
            && err_c < cert.tolerance
            && err_c == cert.approximation_errors[i]
            && (b.is_zero() || !p.is_zero());
        if !ok && approx_witness.is_none() {
            approx_witness = Some(i);
        }
    }
    out.push(CheckResult::from_bool(
        "approximation",
        approx_witness.is_none(),
        "|q·b_i − p_i| < 1/(2Rr), |m·q·b_i − χ′_i| < tolerance, b_i ≠ 0 ⟹ p_i ≠ 0",
        || json(serde_json::json!({ "index": approx_witness })),
    ));

    // d_i > 0
    let d = sys.weight_to_root(&cert.chi_prime);
    let d_ok = d.coords() == cert.alpha_coeffs.as_slice() && d.coords().iter().all(|x| x.is_positive());
    out.push(CheckResult::from_bool("alpha_coeffs_positive", d_ok, "χ′ = Σ d_i α_i with every d_i > 0", || json(&d)));

    // pivots
    let mut pivot_witness = None;
    let max_pair = max_root_pairing(sys).unwrap_or_else(|_| Rational::zero());
    let comps_ok = cert.pivots.len() == sys.components().len()
        && cert.pivots.iter().enumerate().all(|(c, p)| p.component == c && sys.component_of(p.index) == c);
    for p in &cert.pivots {
        let val = sys.pairing(&cert.chi_prime, &sys.simple_root(p.index)).unwrap_or_else(|_| Rational::zero());
        if val <= max_pair {
            pivot_witness = Some(p.clone());
        }
    }
    out.push(CheckResult::from_bool(
        "pivots",
        comps_ok && pivot_witness.is_none() && max_pair == cert.max_root_pairing,
        "one pivot per component with ⟨χ′, α_pivot⟩ > ⟨α_l, β⟩ for all l, β",
        || json(serde_json::json!({ "pivot": pivot_witness, "max_root_pairing": rational::format(&max_pair) })),
    ));

    // Ψ
    let expected = psi_of(sys, &cert.pivots);
    let have: BTreeSet<&RootVector> = cert.psi.iter().collect();
    let want: BTreeSet<&RootVector> = expected.iter().collect();
    let missing: Vec<&RootVector> = want.difference(&have).copied().collect();
    let extra: Vec<&RootVector> = have.difference(&want).copied().collect();
    out.push(CheckResult::from_bool(
        "psi",
        missing.is_empty() && extra.is_empty() && have.len() == cert.psi.len(),
        "Ψ = {β > 0 : β ≥ α_pivot for some pivot}",
        || json(serde_json::json!({ "missing": missing, "unexpected": extra })),
    ));
    let closure = psi_closure_witness(sys, &cert.psi);
    out.push(CheckResult::from_bool("psi_closed", closure.is_none(), "Ψ is closed under root addition", || {
        json(&closure)
    }));

    // per-index weights
    let mut per_witness = None;
    for (i, e) in cert.per_index.iter().enumerate() {
        let weight = &cert.chi_prime - &sys.root_to_weight(&sys.simple_root(i));
        let w_ok = WeylElement::from_word(sys, &e.w.word).map(|w| w == e.w).unwrap_or(false);
        let ok = e.index == i
            && e.weight == weight
            && w_ok
            && e.w.apply(&weight) == e.dominant
            && e.dominant.is_dominant()
            && e.lowest_weight == -&e.dominant
            && e.multiplicity >= 1;
        if !ok && per_witness.is_none() {
            per_witness = Some(i);
        }
    }
    out.push(CheckResult::from_bool(
        "per_index",
        per_witness.is_none(),
        "w_i(χ′ − α_i) is dominant for every i",
        || json(serde_json::json!({ "index": per_witness })),
    ));

    // (ii): ⟨χ′ − α_l, β⟩ ≥ 0 on Ψ, so ±(χ′ − α_l) ± β is not a weight
    let mut inv_witness = None;
    'outer: for e in &cert.per_index {
        let inv = e.w.inverse(sys);
        for beta in &cert.psi {
            let pairing = sys.pairing(&e.weight, beta).unwrap_or_else(|_| -Rational::one());
            let verdict = repweights::nonweight_check(sys, &e.dominant, &inv, beta).unwrap_or(NonweightVerdict::Unknown);
            if pairing.is_negative() || verdict != NonweightVerdict::GuaranteedNotWeight {
                inv_witness = Some((e.index, beta.clone(), rational::format(&pairing)));
                break 'outer;
            }
        }
    }
    out.push(CheckResult::from_bool(
        "invariance",
        inv_witness.is_none(),
        "⟨χ′ − α_l, β⟩ ≥ 0 for every l and β ∈ Ψ",
        || {
            let (l, beta, pairing) = inv_witness.clone().expect("witness present on failure");
            json(serde_json::json!({ "l": l, "beta": beta, "pairing": pairing }))
        },
    ));

    // (vi) surrogate: Ψ meets every component
    let covered: BTreeSet<usize> = cert.pivots.iter().map(|p| sys.component_of(p.index)).collect();
    out.push(CheckResult::from_bool(
        "generation",
        covered.len() == sys.components().len(),
        "pivots meet every component, so ±Ψ lie in no proper factor",
        || json(&covered),
    ));
    out
}

/// Outcome of the decay check along one direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionCheck {
    pub normalized: TorusVector,
    pub ell: usize,
    pub j: usize,
    pub upper_ok: bool,
    pub lower_ok: bool,
}

/// Decay inequalities on a nonzero direction `t ∈ A` (reduced, dominance-
/// transported coordinates), normalized to `max αᵢ(t) = 1`:
/// `m_ℓ(χ′ − α_ℓ)(t) ≤ −½ m_ℓ α_ℓ(t)` and `−m_j(χ′ − α_j)(t) ≤ ½ m_j α_j(t)`.
pub fn check_direction(cert: &DivergenceCertificate, sys: &RootSystem, t: &TorusVector) -> Result<DirectionCheck> {
    sys.check_len("direction", t.len())?;
    if t.is_zero() {
        return Err(Error::domain("the zero vector is not an unbounded direction"));
    }
    let xs = t.coords();
    let (ell, max) = xs.iter().enumerate().fold((0, &xs[0]), |acc, (i, x)| if x > acc.1 { (i, x) } else { acc });
    let j = xs.iter().enumerate().fold(0, |acc, (i, x)| if x < &xs[acc] { i } else { acc });
    if !max.is_positive() {
        return Ok(DirectionCheck { normalized: t.clone(), ell, j, upper_ok: false, lower_ok: false });
    }
    let normalized = t.scaled(&max.recip());
    let half = rational::frac(1, 2);
    let e_l = &cert.per_index[ell];
    let m_l = rational::int(e_l.multiplicity as i64);
    let upper = &m_l * sys.evaluate(&e_l.weight, &normalized);
    let upper_ok = upper <= -(&half * &m_l * &normalized.coords()[ell]);
    let e_j = &cert.per_index[j];
    let m_j = rational::int(e_j.multiplicity as i64);
    let lower = -(&m_j * sys.evaluate(&e_j.weight, &normalized));
    let lower_ok = lower <= &half * &m_j * &normalized.coords()[j];
    Ok(DirectionCheck { normalized, ell, j, upper_ok, lower_ok })
}

fn random_direction(rng: &mut ChaCha8Rng, a: &SubtorusSubspace, n: usize) -> TorusVector {
    loop {
        let mut out = vec![Rational::zero(); n];
        for v in &a.basis {
            let c = rational::frac(rng.gen_range(-1000..=1000), 100);
            for (o, x) in out.iter_mut().zip(v.coords()) {
                *o += &c * x;
            }
        }
        let t = TorusVector::new(out);
        if !t.is_zero() {
            return t;
        }
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Verifies `cert` against `A` (relative coordinates of the full system):
/// every static check plus `trials` random directions for the decay
/// inequalities, run in parallel and merged in trial order.
pub fn verify_hypotheses(
    cert: &DivergenceCertificate,
    a: &SubtorusSubspace,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let full = cert.full_system()?;
    for t in &a.basis {
        full.check_len("subspace vector", t.len())?;
    }
    let sys = cert.reduced_system()?;
    let mut checks = static_checks(cert, &sys);
    let shape_ok = checks.first().is_some_and(|c| c.status == CheckStatus::Pass);

    if shape_ok {
        let reduced_a = SubtorusSubspace::span(&restrict_all(&a.basis, &cert.kept));
        let vanish_witness = reduced_a.basis.iter().find(|t| !sys.evaluate(&cert.chi_real, t).is_zero()).cloned();
        checks.push(CheckResult::from_bool(
            "chi_vanishes_on_A",
            vanish_witness.is_none() && !reduced_a.is_trivial(),
            "chi_real(v) = 0 on every basis vector of A, whose projection is nontrivial",
            || json(&vanish_witness),
        ));
        let dropped_ok = cert.dropped.iter().all(|dc| match dc.reason {
            DropReason::ZeroProjection => projection_dim(a, &dc.indices) == 0,
            DropReason::OrthogonalToCharacter => true,
        }) && {
            let mut all: Vec<usize> = cert.kept.clone();
            all.extend(cert.dropped.iter().flat_map(|dc| dc.indices.iter().copied()));
            all.sort_unstable();
            all == (0..full.rank()).collect::<Vec<_>>()
        };
        checks.push(CheckResult::from_bool(
            "dropped_components",
            dropped_ok,
            "dropped factors partition the complement of the kept ones and A is trivial where claimed",
            || json(&cert.dropped),
        ));

        let transported = reduced_a.act(&sys, &cert.dominance_w);
        let n = sys.rank();
        let results: Vec<Result<(usize, DirectionCheck)>> = (0..trials)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, k));
                let t = random_direction(&mut rng, &transported, n);
                check_direction(cert, &sys, &t).map(|c| (k, c))
            })
            .collect();
        let mut upper_fail = None;
        let mut lower_fail = None;
        for res in results {
            let (k, c) = res?;
            if !c.upper_ok && upper_fail.is_none() {
                upper_fail = Some((k, c.clone()));
            }
            if !c.lower_ok && lower_fail.is_none() {
                lower_fail = Some((k, c));
            }
        }
        let witness = |f: &Option<(usize, DirectionCheck)>| {
            let (k, c) = f.as_ref().expect("witness present on failure");
            json(serde_json::json!({ "trial": k, "t": c.normalized, "l": c.ell, "j": c.j }))
        };
        let upper_detail = format!("(χ′ − α_ℓ)(t) ≤ −½α_ℓ(t) on {trials} directions with max α_i(t) = 1");
        let lower_detail = format!("−(χ′ − α_j)(t) ≤ ½α_j(t) on {trials} directions");
        checks.push(CheckResult::from_bool("decay_upper", upper_fail.is_none(), upper_detail, || witness(&upper_fail)));
        checks.push(CheckResult::from_bool("decay_lower", lower_fail.is_none(), lower_detail, || witness(&lower_fail)));
    }

    checks.push(CheckResult::delegated(
        "structural",
        "rationality of the modules, the unipotent subgroups with root sets ±Ψ, and torus containment are group-level facts",
    ));
    let failures = checks.iter().filter(|c| c.status == CheckStatus::Fail).count();
    Ok(VerificationReport { seed, trials, checks, failures, passed: failures == 0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NonObviousExists,
    DivergentExists,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub indices: Vec<usize>,
    pub rank: usize,
    pub projection_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub components: Vec<ComponentInfo>,
    pub dim_a: usize,
    pub rank_q: usize,
    /// Total rank of the factors `A` projects nontrivially to.
    pub active_rank: usize,
    /// Per-factor condition read as "projection dimension ≤ factor rank".
    pub projection_reading: bool,
    /// The same condition read literally as "dim A ≤ factor rank" for every
    /// factor `A` projects nontrivially to.
    pub literal_reading: bool,
    pub readings_disagree: bool,
    pub verdict: Verdict,
    pub conditions: Vec<Condition>,
}

/// Decides which existence statement applies to `A ⊆ 𝔰` (ambient coordinates).
pub fn factor_decision(d: &SplitDatum, a: &SubtorusSubspace) -> Result<FactorReport> {
    let rel = d.require_relative()?;
    factor_decision_in(&rel.system, &relative_subspace(d, a)?)
}

pub fn factor_decision_in(sys: &RootSystem, a: &SubtorusSubspace) -> Result<FactorReport> {
    for t in &a.basis {
        sys.check_len("subspace vector", t.len())?;
    }
    let a = SubtorusSubspace::span(&a.basis);
    let components: Vec<ComponentInfo> = sys
        .components()
        .iter()
        .map(|block| ComponentInfo { indices: block.clone(), rank: block.len(), projection_dim: projection_dim(&a, block) })
        .collect();
    let dim_a = a.dim();
    let rank_q = sys.rank();
    let active: Vec<&ComponentInfo> = components.iter().filter(|c| c.projection_dim > 0).collect();
    let active_rank: usize = active.iter().map(|c| c.rank).sum();
    let projection_reading = components.iter().all(|c| c.projection_dim <= c.rank);
    let literal_reading = active.iter().all(|c| dim_a <= c.rank);

    let mut conditions = Vec::new();
    let mut push = |name: &str, holds: bool, detail: String| {
        conditions.push(Condition { name: name.into(), holds, detail });
        holds
    };
    let positive = push("positive_dimension", dim_a > 0, format!("dim A = {dim_a}"));
    let per_factor = push(
        "factor_projection_bound",
        projection_reading,
        components
            .iter()
            .map(|c| format!("{:?}: projection {} vs rank {}", c.indices, c.projection_dim, c.rank))
            .collect::<Vec<_>>()
            .join("; "),
    );
    let below = push(
        "below_active_rank",
        dim_a < active_rank,
        format!("dim A = {dim_a} vs rank {active_rank} of the factors A projects nontrivially to (total rank {rank_q})"),
    );
    push(
        "literal_factor_bound",
        literal_reading,
        "dim A ≤ rank of every factor A projects nontrivially to (literal reading, informational)".into(),
    );

    let verdict = if positive && per_factor && below {
        Verdict::NonObviousExists
    } else if positive && per_factor {
        Verdict::DivergentExists
    } else {
        Verdict::Inconclusive
    };
    Ok(FactorReport {
        components,
        dim_a,
        rank_q,
        active_rank,
        projection_reading,
        literal_reading,
        readings_disagree: projection_reading != literal_reading,
        verdict,
        conditions,
    })
}

impl FactorReport {
    /// The first violated condition among those deciding the verdict.
    pub fn first_violation(&self) -> Option<&Condition> {
        self.conditions.iter().filter(|c| c.name != "literal_factor_bound").find(|c| !c.holds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn sys(kind: &str) -> RootSystem {
        RootSystem::from_kind(kind).unwrap()
    }

    fn line(v: &[i64]) -> SubtorusSubspace {
        SubtorusSubspace::new(vec![TorusVector::from_ints(v)]).unwrap()
    }

    #[test]
    fn a2_certificate() {
        let s = sys("A2");
        // kernel line of ρ: α₁(t) = −α₂(t)
        let a = line(&[1, -1]);
        let cert = build_certificate_in(&s, &a).unwrap();
        assert_eq!(cert.chi_real, Weight::from_ints(&[1, 1]));
        assert_eq!(cert.p, vec![BigInt::from(1), BigInt::from(1)]);
        assert_eq!(cert.dirichlet_scale, 1);
        assert_eq!(cert.multiplier, 3);
        assert_eq!(cert.max_root_pairing, int(2));
        assert_eq!(cert.chi_prime, Weight::from_ints(&[3, 3]));
        assert_eq!(cert.alpha_coeffs, vec![int(3), int(3)]);
        assert_eq!(cert.pivots, vec![Pivot { component: 0, index: 0 }]);
        assert_eq!(cert.psi, vec![RootVector::from_ints(&[1, 0]), RootVector::from_ints(&[1, 1])]);
        assert!(cert.checks.values().all(|&ok| ok));

        let report = verify_hypotheses(&cert, &a, 200, 1).unwrap();
        assert!(report.passed, "{report:?}");

        // hand-checked direction t = (x, −x)
        let c = check_direction(&cert, &s, &TorusVector::from_ints(&[2, -2])).unwrap();
        assert_eq!(c.ell, 0);
        assert_eq!(s.evaluate(&cert.per_index[0].weight, &c.normalized), int(-1));
        assert!(c.upper_ok && c.lower_ok);
        assert!(check_direction(&cert, &s, &TorusVector::zero(2)).is_err());

        // ⟨3ρ − α₁, α₁⟩ = 1
        assert_eq!(s.pairing(&cert.per_index[0].weight, &s.simple_root(0)).unwrap(), int(1));
    }

    #[test]
    fn a1xa1_antidiagonal() {
        let s = sys("A1xA1");
        // χ₁ − χ₂ vanishes on the line α₁(t) = α₂(t)
        let a = line(&[1, 1]);
        let cert = build_certificate_in(&s, &a).unwrap();
        assert_eq!(cert.chi_real.coords()[0], -cert.chi_real.coords()[1].clone());
        assert!(!cert.dominance_w.is_identity());
        assert_eq!(cert.pivots.len(), 2);
        assert!(verify_hypotheses(&cert, &a, 100, 5).unwrap().passed);
    }

    #[test]
    fn irrational_line_needs_dirichlet() {
        let s = sys("A2");
        let sqrt2 = std::f64::consts::SQRT_2;
        // root coordinates of χ₁ + √2·χ₂
        let d = [(2.0 + sqrt2) / 3.0, (1.0 + 2.0 * sqrt2) / 3.0];
        let a = SubtorusSubspace::from_f64(&[vec![d[1], -d[0]]], 1e-9).unwrap();
        let cert = build_certificate_in(&s, &a).unwrap();
        assert!(cert.dirichlet_scale > 1, "scale {}", cert.dirichlet_scale);
        assert!(cert.approximation_errors.iter().any(|e| !e.is_zero()));
        let report = verify_hypotheses(&cert, &a, 300, 9).unwrap();
        assert!(report.passed, "{:?}", report.failed_checks().collect::<Vec<_>>());
    }

    #[test]
    fn zero_projection_factor_is_dropped() {
        let s = sys("A2xA1");
        let a = line(&[1, -1, 0]);
        let cert = build_certificate_in(&s, &a).unwrap();
        assert_eq!(cert.kept, vec![0, 1]);
        assert_eq!(cert.dropped, vec![DroppedComponent { indices: vec![2], reason: DropReason::ZeroProjection }]);
        assert!(verify_hypotheses(&cert, &a, 100, 2).unwrap().passed);
        // A filling one factor is not certifiable
        assert!(matches!(build_certificate_in(&sys("A1xA1"), &line(&[1, 0])), Err(Error::Precondition(_))));
    }

    #[test]
    fn tampering_is_detected() {
        let s = sys("A2");
        let a = line(&[1, -1]);
        let cert = build_certificate_in(&s, &a).unwrap();
        let mut bad = cert.clone();
        bad.psi.pop();
        let report = verify_hypotheses(&bad, &a, 10, 0).unwrap();
        assert!(!report.passed);
        let psi = report.check("psi").unwrap();
        assert_eq!(psi.status, CheckStatus::Fail);
        assert!(psi.witness.as_ref().unwrap()["missing"].as_array().unwrap().len() == 1);

        let mut bad = cert.clone();
        bad.chi_prime = Weight::from_ints(&[1, 1]);
        assert!(!verify_hypotheses(&bad, &a, 10, 0).unwrap().passed);

        // the wrong subspace breaks vanishing
        assert!(!verify_hypotheses(&cert, &line(&[1, 0]), 10, 0).unwrap().passed);
    }

    #[test]
    fn multiplicities_preserve_checks() {
        let s = sys("G2");
        let a = line(&[1, -2]);
        let mut cert = build_certificate_in(&s, &a).unwrap();
        for k in [2u64, 5, 17] {
            for e in cert.per_index.iter_mut() {
                e.multiplicity = k;
            }
            assert!(verify_hypotheses(&cert, &a, 50, k).unwrap().passed);
        }
    }

    #[test]
    fn r_is_independent_of_simple_system() {
        for kind in ["A2", "B2", "G2", "A3"] {
            let s = sys(kind);
            let r0 = big_r(&s).unwrap();
            for w in weyl::enumerate_weyl(&s).unwrap().elements() {
                assert_eq!(big_r_conjugated(&s, w).unwrap(), r0);
            }
        }
        assert_eq!(big_r(&sys("A1")).unwrap(), int(2));
        assert_eq!(big_r(&sys("A2")).unwrap(), int(3));
        assert_eq!(max_root_pairing(&sys("G2")).unwrap(), int(3));
        assert!(frac(1, 2) < int(1));
    }

    #[test]
    fn factor_decisions() {
        let d = factor_decision_in(&sys("A1xA1"), &line(&[1, 1])).unwrap();
        assert_eq!(d.verdict, Verdict::NonObviousExists);
        let full = SubtorusSubspace::new(vec![TorusVector::from_ints(&[1, 0]), TorusVector::from_ints(&[0, 1])]).unwrap();
        let d = factor_decision_in(&sys("A2"), &full).unwrap();
        assert_eq!(d.verdict, Verdict::DivergentExists);
        assert_eq!(d.first_violation().unwrap().name, "below_active_rank");
        let d = factor_decision_in(&sys("A2"), &SubtorusSubspace::trivial()).unwrap();
        assert_eq!(d.verdict, Verdict::Inconclusive);
        assert_eq!(d.first_violation().unwrap().name, "positive_dimension");
        // A inside a single factor: divergence only
        let d = factor_decision_in(&sys("A1xA1"), &line(&[1, 0])).unwrap();
        assert_eq!(d.verdict, Verdict::DivergentExists);
        // two dimensions projecting onto a rank-one factor
        let a = SubtorusSubspace::new(vec![TorusVector::from_ints(&[1, 0, 0]), TorusVector::from_ints(&[0, 0, 1])]).unwrap();
        let d = factor_decision_in(&sys("A1xA2"), &a).unwrap();
        assert!(d.readings_disagree);
    }
}
