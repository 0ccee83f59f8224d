//! SL_n realization for numerical evidence: the diagonal torus, weight
//! vectors in tensor products of exterior powers, and shortest vectors of
//! the exterior-power lattices `∧ᵏ(g)ℤ^C(n,k)`.
//!
//! The weight vector of weight `μ = Σ mₖχₖ` is the tensor product of `mₖ`
//! copies of `e₁∧…∧eₖ` (or `|mₖ|` copies of `eₖ₊₁∧…∧eₙ` when `mₖ < 0`).
//! This standard model is an implementation choice; the table records it.
//! Floats live only here; exact inputs are converted once, at entry.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::DivergenceCertificate;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{self, Rational};
use crate::rootcore::{TorusVector, Weight};

pub const MODEL: &str = "exterior-power tensor model of SL_n";

/// Search-tree nodes a single shortest-vector enumeration may visit.
pub const NODE_BUDGET: u64 = 20_000_000;

const DET_TOL: f64 = 1e-6;

type Matrix = Vec<Vec<f64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeState {
    pub n: usize,
    /// Columns generate the lattice `gℤⁿ`.
    pub basis: Matrix,
    /// Direction in `A_{n−1}` evaluation coordinates.
    pub ray: Vec<f64>,
    pub time: f64,
}

impl LatticeState {
    pub fn new(basis: Matrix, ray: Vec<f64>, time: f64) -> Result<Self> {
        let n = basis.len();
        check_n(n)?;
        if basis.iter().any(|r| r.len() != n) {
            return Err(Error::domain("basis must be square"));
        }
        if ray.len() != n - 1 {
            return Err(Error::domain(format!("ray needs {} coordinates, got {}", n - 1, ray.len())));
        }
        if basis.iter().flatten().chain(&ray).any(|x| !x.is_finite()) || !time.is_finite() {
            return Err(Error::domain("non-finite entry"));
        }
        let det = determinant(&basis);
        if (det.abs() - 1.0).abs() > DET_TOL {
            return Err(Error::domain(format!("basis determinant {det} is not ±1")));
        }
        Ok(Self { n, basis, ray, time })
    }

    /// `a_time · basis`.
    pub fn lattice(&self) -> Matrix {
        let d = exponents(&self.ray, self.time);
        self.basis.iter().zip(&d).map(|(row, s)| row.iter().map(|x| x * s.exp()).collect()).collect()
    }

    pub fn determinant(&self) -> f64 {
        determinant(&self.lattice())
    }
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=5).contains(&n) {
        return Err(Error::domain(format!("n must be in 2..=5, got {n}")));
    }
    Ok(())
}

/// Diagonal exponents `s` with `Σ s = 0` and `sᵢ − sᵢ₊₁ = time·rayᵢ`.
pub fn exponents(ray: &[f64], time: f64) -> Vec<f64> {
    let mut u = vec![0.0];
    for x in ray {
        let last = *u.last().expect("nonempty");
        u.push(last - time * x);
    }
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    u.iter().map(|x| x - mean).collect()
}

/// `diag(e^{s₁}, …, e^{sₙ})` realizing `exp(time·ray)`.
pub fn torus_element(ray: &TorusVector, time: f64, n: usize) -> Result<Matrix> {
    check_n(n)?;
    if ray.len() != n - 1 {
        return Err(Error::domain(format!("ray needs {} coordinates, got {}", n - 1, ray.len())));
    }
    let s = exponents(&ray.to_f64(), time);
    Ok((0..n).map(|i| (0..n).map(|j| if i == j { s[i].exp() } else { 0.0 }).collect()).collect())
}

pub fn determinant(m: &Matrix) -> f64 {
    let n = m.len();
    let mut a = m.clone();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).expect("nonempty");
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.iter().enumerate().map(|(i, r)| {
        let mut row = r.clone();
        row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
        row
    }).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).expect("nonempty");
        if a[p][c].abs() < 1e-12 {
            return Err(Error::domain("singular basis"));
        }
        a.swap(p, c);
        let piv = a[c][c];
        for x in a[c].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter().map(|r| (0..n).map(|j| r.iter().zip(b).map(|(x, row)| x * row[j]).sum()).collect()).collect()
}

/// k-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Matrix of `∧ᵏ m` in the basis `e_I`, `I` lexicographic.
pub fn exterior_power(m: &Matrix, k: usize) -> Matrix {
    let sets = subsets(m.len(), k);
    sets.iter()
        .map(|i| {
            sets.iter()
                .map(|j| determinant(&i.iter().map(|&r| j.iter().map(|&c| m[r][c]).collect()).collect()))
                .collect()
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn column(m: &Matrix, j: usize) -> Vec<f64> {
    m.iter().map(|r| r[j]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortestVector {
    pub norm: f64,
    /// Integer coordinates in `ℤ^C(n,k)`, first nonzero entry positive.
    pub vector: Vec<i64>,
    pub nodes: u64,
}

/// Shortest nonzero vector of `∧ᵏ(lattice)ℤ^C(n,k)` by Fincke–Pohst
/// enumeration after pairwise size reduction.
pub fn shortest_vector(state: &LatticeState, k: usize) -> Result<ShortestVector> {
    if k == 0 || k >= state.n {
        return Err(Error::domain(format!("exterior power must be in 1..{}, got {k}", state.n)));
    }
    let b = exterior_power(&state.lattice(), k);
    shortest_in_basis(&b).map_err(|e| match e {
        Error::Refused(msg) => Error::Refused(format!(
            "{msg}; the lattice at time {} is too distorted, retry with a time below {:.3}",
            state.time,
            state.time / 2.0
        )),
        other => other,
    })
}

/// Shortest nonzero vector of the lattice spanned by the columns of `b`.
pub fn shortest_in_basis(b: &Matrix) -> Result<ShortestVector> {
    let dim = b.len();
    let mut cols: Vec<Vec<f64>> = (0..dim).map(|j| column(b, j)).collect();
    // unimodular transform tracking: coords[j] expresses cols[j] in the input basis
    let mut coords: Vec<Vec<i64>> = (0..dim).map(|j| (0..dim).map(|i| i64::from(i == j)).collect()).collect();
    size_reduce(&mut cols, &mut coords)?;

    let gram: Matrix = cols.iter().map(|x| cols.iter().map(|y| x.iter().zip(y).map(|(a, c)| a * c).sum()).collect()).collect();
    let r = cholesky(&gram)?;
    let (mut best_idx, mut best) = (0, f64::INFINITY);
    for (j, c) in cols.iter().enumerate() {
        let l = norm(c);
        if l < best {
            best = l;
            best_idx = j;
        }
    }
    let mut best_z = vec![0i64; dim];
    best_z[best_idx] = 1;
    let mut radius2 = best * best * (1.0 + 1e-9);

    // Hadamard-style estimate of the ellipsoid's point count
    let covol: f64 = (0..dim).map(|i| r[i][i]).product();
    let ball = unit_ball_volume(dim) * radius2.sqrt().powi(dim as i32);
    let estimate = ball / covol;
    if !estimate.is_finite() || estimate > NODE_BUDGET as f64 {
        return Err(Error::Refused(format!("estimated {estimate:.3e} lattice points within the search radius")));
    }

    let mut z = vec![0i64; dim];
    let mut nodes = 0u64;
    let mut search = Search { r: &r, z: &mut z, best_z: &mut best_z, radius2: &mut radius2, nodes: &mut nodes };
    search.descend(dim, 0.0)?;

    let mut vector = vec![0i64; dim];
    for (zj, cj) in best_z.iter().zip(&coords) {
        for (v, c) in vector.iter_mut().zip(cj) {
            *v += zj * c;
        }
    }
    if vector.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        vector.iter_mut().for_each(|x| *x = -*x);
    }
    let image: Vec<f64> = (0..dim).map(|i| (0..dim).map(|j| b[i][j] * vector[j] as f64).sum()).collect();
    Ok(ShortestVector { norm: norm(&image), vector, nodes })
}

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

fn size_reduce(cols: &mut [Vec<f64>], coords: &mut [Vec<i64>]) -> Result<()> {
    let dim = cols.len();
    for _ in 0..1000 {
        let mut changed = false;
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let nj: f64 = cols[j].iter().map(|x| x * x).sum();
                let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                let mu = (dot / nj).round();
                if mu != 0.0 && mu.is_finite() {
                    let before: f64 = cols[i].iter().map(|x| x * x).sum();
                    let cand: Vec<f64> = cols[i].iter().zip(&cols[j]).map(|(a, b)| a - mu * b).collect();
                    if cand.iter().map(|x| x * x).sum::<f64>() < before * (1.0 - 1e-12) {
                        cols[i] = cand;
                        let m = mu as i64;
                        let cj = coords[j].clone();
                        for (a, b) in coords[i].iter_mut().zip(cj) {
                            *a = a.checked_sub(m.checked_mul(b).ok_or_else(|| Error::Refused("coordinate overflow".into()))?)
                                .ok_or_else(|| Error::Refused("coordinate overflow".into()))?;
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
    Ok(())
}

/// Upper-triangular `R` with `RᵀR = g`.
fn cholesky(g: &Matrix) -> Result<Matrix> {
    let n = g.len();
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut d = g[i][i];
        for k in 0..i {
            d -= r[k][i] * r[k][i];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::Refused("Gram matrix lost positive definiteness in floating point".into()));
        }
        r[i][i] = d.sqrt();
        for j in i + 1..n {
            let mut s = g[i][j];
            for k in 0..i {
                s -= r[k][i] * r[k][j];
            }
            r[i][j] = s / r[i][i];
        }
    }
    Ok(r)
}

struct Search<'a> {
    r: &'a Matrix,
    z: &'a mut Vec<i64>,
    best_z: &'a mut Vec<i64>,
    radius2: &'a mut f64,
    nodes: &'a mut u64,
}

impl Search<'_> {
    /// Fixes coordinates `level..` and enumerates `level − 1`.
    fn descend(&mut self, level: usize, partial: f64) -> Result<()> {
        *self.nodes += 1;
        if *self.nodes > NODE_BUDGET {
            return Err(Error::Refused(format!("node budget {NODE_BUDGET} exhausted")));
        }
        if level == 0 {
            if partial > 0.0 && partial < *self.radius2 && self.z.iter().any(|&x| x != 0) {
                *self.radius2 = partial;
                self.best_z.clone_from(self.z);
            }
            return Ok(());
        }
        let i = level - 1;
        let n = self.r.len();
        let rii = self.r[i][i];
        let shift: f64 = (i + 1..n).map(|j| self.r[i][j] * self.z[j] as f64).sum::<f64>() / rii;
        let center = -shift;
        let room = (*self.radius2 - partial).max(0.0);
        let half = room.sqrt() / rii;
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        for v in lo..=hi {
            let y = rii * (v as f64 - center);
            let next = partial + y * y;
            if next >= *self.radius2 && !(next == 0.0) {
                continue;
            }
            self.z[i] = v;
            self.descend(i, next)?;
        }
        self.z[i] = 0;
        Ok(())
    }
}

/// Factors `(k, I)` of the weight vector of `μ` (fundamental coordinates).
fn weight_factors(mu: &Weight) -> Result<Vec<(usize, Vec<usize>, u64)>> {
    let n = mu.len() + 1;
    let mut out = Vec::new();
    for (k0, m) in mu.coords().iter().enumerate() {
        if !m.is_integer() {
            return Err(Error::domain(format!("weight {mu} is not integral")));
        }
        let m = rational::round(m);
        let k = k0 + 1;
        let count: u64 = m.magnitude().try_into().map_err(|_| Error::domain("weight coordinate too large"))?;
        if count == 0 {
            continue;
        }
        if m.sign() == num_bigint::Sign::Minus {
            out.push((n - k, (k..n).collect(), count));
        } else {
            out.push((k, (0..k).collect(), count));
        }
    }
    Ok(out)
}

/// `‖ϱ(a·x)·ϱ(x)⁻¹v_μ‖` raised to `multiplicity`, in the tensor model.
fn weight_norm(factors: &[(usize, Vec<usize>, u64)], ax: &Matrix, x_inv: &Matrix, n: usize, multiplicity: u64) -> f64 {
    let mut total = 1.0;
    for (k, set, count) in factors {
        let sets = subsets(n, *k);
        let pos = sets.iter().position(|s| s == set).expect("subset present");
        let u = column(&exterior_power(x_inv, *k), pos);
        let big = exterior_power(ax, *k);
        let image: Vec<f64> = big.iter().map(|row| row.iter().zip(&u).map(|(a, b)| a * b).sum()).collect();
        total *= norm(&image).powf(*count as f64);
    }
    total.powf(multiplicity as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: f64,
    pub weight_norms: Vec<f64>,
    pub systoles: Vec<f64>,
    pub determinant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub model: String,
    pub n: usize,
    pub ray: Vec<f64>,
    /// Index with `α_ℓ(ray)` maximal; its weight vector is the tracked one.
    pub ell: usize,
    /// `multiplicity·(χ′ − αᵢ)(ray)`, exact value converted once.
    pub exponents: Vec<f64>,
    pub rows: Vec<DecayRow>,
    /// Tracked norm non-increasing after the burn-in `t ≥ 1`.
    pub tracked_monotone: bool,
    pub final_below_initial: bool,
    /// `min_k` systole non-increasing after the burn-in.
    pub systole_monotone: bool,
}

impl DecayTable {
    /// `ln(‖v_t‖/‖v_0‖)/t` for weight `i` at row `row`.
    pub fn numeric_exponent(&self, i: usize, row: usize) -> Option<f64> {
        let r = self.rows.get(row)?;
        let r0 = self.rows.first()?;
        if r.t == r0.t {
            return None;
        }
        Some((r.weight_norms[i] / r0.weight_norms[i]).ln() / (r.t - r0.t))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# model: {}\n", self.model);
        let mut head = vec!["t".to_string()];
        head.extend((1..=self.exponents.len()).map(|i| format!("weight_{i}")));
        head.extend((1..self.n).map(|k| format!("systole_{k}")));
        out.push_str(&head.join(","));
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![format!("{}", r.t)];
            cells.extend(r.weight_norms.iter().map(|x| format!("{x:.12e}")));
            cells.extend(r.systoles.iter().map(|x| format!("{x:.12e}")));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Default certified ray: a vector of `ker χ_dominant`, scaled so that
/// `max αᵢ = 1`.
pub fn certified_ray(cert: &DivergenceCertificate) -> Result<TorusVector> {
    let sys = cert.reduced_system()?;
    let d = sys.weight_to_root(&cert.chi_dominant);
    let ker = linalg::nullspace(&vec![d.coords().to_vec()], sys.rank());
    let v = ker.into_iter().next().ok_or_else(|| Error::domain("character has no kernel"))?;
    let max = v.iter().max().cloned().expect("nonempty");
    let min = v.iter().min().cloned().expect("nonempty");
    let scale = if max > -min.clone() { max } else { min };
    Ok(TorusVector::new(v.iter().map(|x| x / &scale).collect()))
}

fn a_type_cartan(r: usize) -> Vec<Vec<i64>> {
    (0..r).map(|i| (0..r).map(|j| if i == j { 2 } else if i.abs_diff(j) == 1 { -1 } else { 0 }).collect()).collect()
}

/// Samples `steps` times in `[0, t_max]` along `ray` (dominance-transported
/// coordinates of the certificate) from the base lattice `x`.
pub fn probe_divergence(
    cert: &DivergenceCertificate,
    x: &Matrix,
    ray: Option<&TorusVector>,
    t_max: f64,
    steps: usize,
) -> Result<DecayTable> {
    let sys = cert.reduced_system()?;
    let n = sys.rank() + 1;
    check_n(n)?;
    if sys.cartan() != a_type_cartan(n - 1).as_slice() || !cert.dropped.is_empty() {
        return Err(Error::precondition(format!("certificate must be for A{} with no dropped factors", n - 1)));
    }
    if steps < 2 || !(t_max > 0.0) {
        return Err(Error::domain("need steps ≥ 2 and t_max > 0"));
    }
    let ray = match ray {
        Some(r) => r.clone(),
        None => certified_ray(cert)?,
    };
    sys.check_len("ray", ray.len())?;
    let base = LatticeState::new(x.clone(), ray.to_f64(), 0.0)?;
    let x_inv = inverse(x)?;
    let ray_f = ray.to_f64();

    let max = ray.coords().iter().max().expect("nonempty");
    let ell = ray.coords().iter().position(|v| v == max).expect("nonempty");
    let factors: Vec<_> = cert.per_index.iter().map(|e| weight_factors(&e.weight)).collect::<Result<_>>()?;
    let exponents: Vec<f64> = cert
        .per_index
        .iter()
        .map(|e| rational::to_f64(&(sys.evaluate(&e.weight, &ray) * Rational::from_integer(e.multiplicity.into()))))
        .collect();

    let times: Vec<f64> = (0..steps).map(|j| t_max * j as f64 / (steps - 1) as f64).collect();
    let rows: Vec<DecayRow> = times
        .par_iter()
        .map(|&t| {
            let state = LatticeState { time: t, ..base.clone() };
            let ax = state.lattice();
            let det = determinant(&ax);
            if (det.abs() - 1.0).abs() > DET_TOL {
                return Err(Error::invariant(format!("determinant drifted to {det} at t = {t}")));
            }
            let weight_norms = cert
                .per_index
                .iter()
                .zip(&factors)
                .map(|(e, f)| weight_norm(f, &ax, &x_inv, n, e.multiplicity))
                .collect();
            let systoles = (1..n).map(|k| shortest_vector(&state, k).map(|s| s.norm)).collect::<Result<_>>()?;
            Ok(DecayRow { t, weight_norms, systoles, determinant: det })
        })
        .collect::<Result<_>>()?;

    let after: Vec<&DecayRow> = rows.iter().filter(|r| r.t >= 1.0).collect();
    let slack = 1e-9;
    let tracked_monotone = after.windows(2).all(|w| w[1].weight_norms[ell] <= w[0].weight_norms[ell] * (1.0 + slack));
    let min_sys = |r: &DecayRow| r.systoles.iter().cloned().fold(f64::INFINITY, f64::min);
    let systole_monotone = after.windows(2).all(|w| min_sys(w[1]) <= min_sys(w[0]) * (1.0 + slack));
    let final_below_initial = rows.last().expect("steps ≥ 2").weight_norms[ell] < rows[0].weight_norms[ell];
    Ok(DecayTable {
        model: MODEL.into(),
        n,
        ray: ray_f,
        ell,
        exponents,
        rows,
        tracked_monotone,
        final_below_initial,
        systole_monotone,
    })
}

/// Random integer matrix of determinant 1 with entries bounded by `bound`,
/// from products of elementary matrices.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Matrix {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..4 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
        let cand: Vec<i64> = m[i].iter().zip(&m[j]).map(|(a, b)| a + c * b).collect();
        if cand.iter().all(|x| x.abs() <= bound) {
            m[i] = cand;
        }
    }
    m.into_iter().map(|r| r.into_iter().map(|x| x as f64).collect()).collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}
