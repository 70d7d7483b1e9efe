//! Reflection factorizations of `f_*` and the reversor `rho_*`.
//!
//! Two groups appear: the Weyl group generated by the Cremona inversion `J`
//! and permutations of the exceptional classes, and the reflection group of
//! `T` generated by the roots `alpha_s = lambda_s - gamma_s`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::exact::{self, int, IntMat, RatMat};
use crate::lattice::{self, Lattice, LatticeAuto, TSpace};
use crate::params::MapParams;

/// A permutation of the levels `1..=2k+1`, stored as `p[j]` (index 0 unused).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPerm(pub Vec<usize>);

impl LevelPerm {
    pub fn identity(levels: usize) -> Self {
        LevelPerm((0..=levels).collect())
    }

    /// Builds from cycle notation: each cycle sends an entry to the next one.
    pub fn from_cycles(levels: usize, cycles: &[Vec<usize>]) -> Self {
        let mut p = Self::identity(levels);
        for c in cycles {
            for (t, &a) in c.iter().enumerate() {
                p.0[a] = c[(t + 1) % c.len()];
            }
        }
        p
    }

    pub fn compose(&self, inner: &LevelPerm) -> LevelPerm {
        LevelPerm(inner.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> LevelPerm {
        let mut out = self.0.clone();
        for (j, &img) in self.0.iter().enumerate() {
            out[img] = j;
        }
        LevelPerm(out)
    }

    /// Nontrivial cycles, each starting at its smallest entry, sorted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 1..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut c = vec![start];
            seen[start] = true;
            let mut j = self.0[start];
            while j != start {
                seen[j] = true;
                c.push(j);
                j = self.0[j];
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().fold(1, |acc, c| num_integer::lcm(acc, c.len()))
    }
}

/// `tau`: `(2k+1 2k ... k+2)(k+1 k ... 2)`.
pub fn tau_perm(k: usize) -> LevelPerm {
    let c1: Vec<usize> = (k + 2..=2 * k + 1).rev().collect();
    let c2: Vec<usize> = (2..=k + 1).rev().collect();
    LevelPerm::from_cycles(2 * k + 1, &[c1, c2])
}

/// `phi = phi_1 phi_2`, the transpositions `(i, k+4-i)` for `3 <= i <= k/2+1`
/// and `(i, 3k+4-i)` for `k+3 <= i <= 3k/2+1`. The second family reads
/// `(2k, k+4)` in the slot that is easily misread as a repeated `(2k, k+2)`.
pub fn phi_perm(k: usize) -> LevelPerm {
    let mut cycles = Vec::new();
    for i in 3..=k / 2 + 1 {
        cycles.push(vec![i, k + 4 - i]);
    }
    for i in k + 3..=3 * k / 2 + 1 {
        cycles.push(vec![i, 3 * k + 4 - i]);
    }
    LevelPerm::from_cycles(2 * k + 1, &cycles)
}

/// An exact isometry with a name.
#[derive(Clone, Debug)]
pub struct NamedIsometry {
    pub label: String,
    pub matrix: IntMat,
}

/// Matrix of the basis permutation `e_i -> e_(f(i))`.
fn perm_matrix(dim: usize, f: impl Fn(usize) -> usize) -> IntMat {
    let mut m = IntMat::zeros(dim, dim);
    for i in 0..dim {
        m[(f(i), i)] = BigInt::one();
    }
    m
}

fn vertical_map<'a>(lat: &'a Lattice, p: &LevelPerm, limb: usize) -> impl Fn(usize) -> usize + 'a {
    let p = p.clone();
    move |i| match lat.limb_level(i) {
        Some((s, j)) if s == limb => lat.idx(s, p.0[j]),
        _ => i,
    }
}

fn horizontal_map(lat: &Lattice) -> impl Fn(usize) -> usize + '_ {
    move |i| match lat.limb_level(i) {
        Some((s, j)) => lat.idx((s + 1) % lat.n, j),
        None => 0,
    }
}

/// Root of the Cremona inversion: `e_0 - e_0^1 - e_0^(k+1) - e_0^(2k+1)`.
pub fn cremona_root(lat: &Lattice) -> Vec<BigInt> {
    let k = lat.k;
    let mut a = lat.e0();
    for j in [1, k + 1, 2 * k + 1] {
        a[lat.idx(0, j)] -= 1;
    }
    a
}

/// Reflection `x -> x + (a.x) a` for a root with `a.a = -2`.
pub fn reflection_matrix(lat: &Lattice, a: &[BigInt]) -> IntMat {
    let qa = lat.q.mul_vec(a);
    IntMat::from_fn(lat.dim(), lat.dim(), |i, j| {
        let id = if i == j { BigInt::one() } else { BigInt::zero() };
        id + &a[i] * &qa[j]
    })
}

/// `J`, `sigma_h`, `tau_v`, `phi_v` with the vertical permutations in `limb`.
pub fn weyl_generators_at(n: usize, k: usize, limb: usize) -> Vec<NamedIsometry> {
    let lat = Lattice::new(n, k);
    let d = lat.dim();
    vec![
        NamedIsometry { label: "J".into(), matrix: reflection_matrix(&lat, &cremona_root(&lat)) },
        NamedIsometry { label: "sigma_h".into(), matrix: perm_matrix(d, horizontal_map(&lat)) },
        NamedIsometry { label: "tau_v".into(), matrix: perm_matrix(d, vertical_map(&lat, &tau_perm(k), limb)) },
        NamedIsometry { label: "phi_v".into(), matrix: perm_matrix(d, vertical_map(&lat, &phi_perm(k), limb)) },
    ]
}

/// The generators with `tau_v`, `phi_v` acting in the fiber over `[0:1:0]`.
pub fn weyl_generators(n: usize, k: usize) -> Vec<NamedIsometry> {
    weyl_generators_at(n, k, 0)
}

/// In-place products with `J` and with permutations, `O(dim^2)` each.
struct Ops<'a> {
    lat: &'a Lattice,
    a: Vec<BigInt>,
    /// `a^t Q`
    qa: Vec<BigInt>,
}

impl<'a> Ops<'a> {
    fn new(lat: &'a Lattice) -> Self {
        let a = cremona_root(lat);
        let qa = lat.q.mul_vec(&a);
        Ops { lat, a, qa }
    }

    /// `J X`
    fn j_left(&self, x: &mut IntMat) {
        let d = self.lat.dim();
        for c in 0..d {
            let s: BigInt = (0..d).map(|r| &self.qa[r] * &x[(r, c)]).sum();
            if !s.is_zero() {
                for r in 0..d {
                    if !self.a[r].is_zero() {
                        x[(r, c)] += &self.a[r] * &s;
                    }
                }
            }
        }
    }

    /// `X J`
    fn j_right(&self, x: &mut IntMat) {
        let d = self.lat.dim();
        let xa: Vec<BigInt> = (0..d).map(|r| (0..d).map(|c| &x[(r, c)] * &self.a[c]).sum()).collect();
        for c in 0..d {
            if !self.qa[c].is_zero() {
                for r in 0..d {
                    x[(r, c)] += &xa[r] * &self.qa[c];
                }
            }
        }
    }

    /// `P X` for `P e_i = e_(f(i))`: row `i` moves to row `f(i)`.
    fn perm_left(&self, x: &IntMat, f: &dyn Fn(usize) -> usize) -> IntMat {
        let mut out = x.clone();
        for i in 0..x.rows {
            for c in 0..x.cols {
                out[(f(i), c)] = x[(i, c)].clone();
            }
        }
        out
    }

    /// `X P`: column `i` of the result is column `f(i)` of `X`.
    fn perm_right(&self, x: &IntMat, f: &dyn Fn(usize) -> usize) -> IntMat {
        IntMat::from_fn(x.rows, x.cols, |r, c| x[(r, f(c))].clone())
    }
}

/// Which limb holds the vertical permutations of one literal attempt.
#[derive(Clone, Debug, Serialize)]
pub struct LiteralAttempt {
    pub tau_limb: usize,
    pub phi_limb: usize,
    pub identity: bool,
    pub equals_inverse: bool,
}

/// A repaired word `phi' W sigma_h` with `W` a power word in `J` and `tau_v`.
#[derive(Clone, Debug, Serialize)]
pub struct RepairedFactorization {
    /// `"J(tau J)^m"` or `"(J tau)^m J"`
    pub form: String,
    pub exponent: usize,
    /// `false` for the printed orientation of `tau`
    pub tau_reversed: bool,
    pub limb: usize,
    /// level cycles of the residual permutation, which plays the role of `phi`
    pub phi_cycles: Vec<Vec<usize>>,
    pub phi_matches_printed: bool,
}

/// Result of comparing the Weyl word with `f_*`.
#[derive(Clone, Debug, Serialize)]
pub struct WeylCheck {
    pub n: usize,
    pub k: usize,
    pub literal: Vec<LiteralAttempt>,
    pub literal_identity: bool,
    /// nonzero entries of `f_* - W` for the placement in limb 0, when it fails
    pub residual: Vec<(String, String, String)>,
    pub composed_is_isometry: bool,
    pub repaired: Option<RepairedFactorization>,
}

fn literal_word(lat: &Lattice, ops: &Ops, tau_limb: usize, phi_limb: usize) -> IntMat {
    let k = lat.k;
    let sigma = horizontal_map(lat);
    let tau = vertical_map(lat, &tau_perm(k), tau_limb);
    let phi = vertical_map(lat, &phi_perm(k), phi_limb);
    let mut w = perm_matrix(lat.dim(), sigma);
    for _ in 0..k / 2 {
        ops.j_left(&mut w);
        w = ops.perm_left(&w, &tau);
    }
    ops.j_left(&mut w);
    ops.perm_left(&w, &phi)
}

/// If `r` is a permutation of the levels of one limb, returns that limb and
/// the level permutation.
fn single_limb_level_perm(lat: &Lattice, r: &IntMat) -> Option<(usize, LevelPerm)> {
    if !exact::is_permutation(r) || !r[(0, 0)].is_one() {
        return None;
    }
    let image = |c: usize| (0..r.rows).find(|&i| r[(i, c)].is_one()).unwrap();
    let mut limb = None;
    let mut perm = LevelPerm::identity(lat.levels());
    for c in 1..lat.dim() {
        let i = image(c);
        if i == c {
            continue;
        }
        let (s, j) = lat.limb_level(c)?;
        let (t, l) = lat.limb_level(i)?;
        if s != t || limb.is_some_and(|x| x != s) {
            return None;
        }
        limb = Some(s);
        perm.0[j] = l;
    }
    Some((limb.unwrap_or(0), perm))
}

fn repaired_search(lat: &Lattice, ops: &Ops, m_target: &IntMat) -> Option<RepairedFactorization> {
    let (n, k) = (lat.n, lat.k);
    let sigma_inv = {
        let f = horizontal_map(lat);
        let p = perm_matrix(lat.dim(), f);
        p.transpose()
    };
    let x = m_target * &sigma_inv;
    let printed = phi_perm(k);
    let mut limbs = vec![0];
    if n > 1 {
        limbs.push(n - 1);
    }
    for tau_reversed in [false, true] {
        for &limb in &limbs {
            let tau = if tau_reversed { tau_perm(k).inverse() } else { tau_perm(k) };
            let t_inv = vertical_map(lat, &tau.inverse(), limb);
            // J(TJ)^m has inverse (J T^-1)^m J; (JT)^m J has inverse J (T^-1 J)^m
            let mut y = x.clone();
            let mut z = x.clone();
            ops.j_right(&mut z);
            for m in 0..=2 * k + 1 {
                let mut r_a = y.clone();
                ops.j_right(&mut r_a);
                for (form, r) in [("J(tau J)^m", &r_a), ("(J tau)^m J", &z)] {
                    if let Some((res_limb, phi)) = single_limb_level_perm(lat, r) {
                        return Some(RepairedFactorization {
                            form: form.into(),
                            exponent: m,
                            tau_reversed,
                            limb: res_limb,
                            phi_matches_printed: phi == printed,
                            phi_cycles: phi.cycles(),
                        });
                    }
                }
                ops.j_right(&mut y);
                y = ops.perm_right(&y, &t_inv);
                z = ops.perm_right(&z, &t_inv);
                ops.j_right(&mut z);
            }
        }
    }
    None
}

pub fn weyl_factorization_check_nk(n: usize, k: usize) -> WeylCheck {
    let auto = lattice::pushforward_nk(n, k);
    let lat = &auto.lattice;
    let ops = Ops::new(lat);
    let m_inv = auto.inverse().expect("f_* is invertible").matrix;
    let mut limbs = vec![0];
    if n > 1 {
        limbs.push(n - 1);
    }
    let mut literal = Vec::new();
    let mut residual = Vec::new();
    let mut composed_is_isometry = true;
    for &tl in &limbs {
        for &pl in &limbs {
            let w = literal_word(lat, &ops, tl, pl);
            composed_is_isometry &= exact::gram(&lat.q, &w) == lat.q;
            let identity = w == auto.matrix;
            if tl == 0 && pl == 0 && !identity {
                for r in 0..w.rows {
                    for c in 0..w.cols {
                        let diff = &auto.matrix[(r, c)] - &w[(r, c)];
                        if !diff.is_zero() {
                            residual.push((lat.label(r), lat.label(c), diff.to_string()));
                        }
                    }
                }
            }
            literal.push(LiteralAttempt { tau_limb: tl, phi_limb: pl, identity, equals_inverse: w == m_inv });
        }
    }
    let literal_identity = literal.iter().any(|a| a.identity);
    let repaired = repaired_search(lat, &ops, &auto.matrix);
    WeylCheck { n, k, literal, literal_identity, residual, composed_is_isometry, repaired }
}

pub fn weyl_factorization_check(p: &MapParams) -> WeylCheck {
    weyl_factorization_check_nk(p.n as usize, p.k as usize)
}

/// The reflection group of `T` in `gamma` coordinates.
#[derive(Clone, Debug)]
pub struct CoxeterData {
    /// `alpha_s` in `gamma` coordinates: `k` everywhere, `-2` at `s`
    pub roots: Vec<Vec<BigRational>>,
    pub cartan: RatMat,
    pub rho: Vec<RatMat>,
    pub tau: Vec<RatMat>,
}

/// Outcome of comparing Coxeter words with `f_*|_T`.
#[derive(Clone, Debug, Serialize)]
pub struct CoxeterCheck {
    pub n: usize,
    pub k: usize,
    /// `2` on the diagonal and `-k` elsewhere
    pub cartan_ok: bool,
    /// last column of `rho_(n-1)` is `(k, ..., k, -1)`
    pub rho_last_column_ok: bool,
    /// `rho_s` swaps `gamma_s` and `lambda_s`; `tau_s` is the reflection in `gamma_s - gamma_(s+1)`
    pub generators_ok: bool,
    pub involutions: bool,
    /// `rho_(n-1) tau_(n-2) ... tau_0` equals `f_*|_T`
    pub literal_order: bool,
    /// the same product equals `f_*|_T^-1`
    pub literal_order_inverse: bool,
    /// `tau_0 ... tau_(n-2) rho_(n-1)` equals `f_*|_T`
    pub reversed_order: bool,
    /// `f_*|_T` is a product of all simple reflections, each once
    pub coxeter_identity: bool,
    pub trace: String,
}

fn rat_id(n: usize) -> RatMat {
    RatMat::identity(n)
}

/// `x -> x - 2 (a.x)/(a.a) a` under the Gram matrix `g`.
fn rat_reflection(g: &RatMat, a: &[BigRational]) -> RatMat {
    let ga = g.mul_vec(a);
    let aa = exact::dot(a, &ga);
    let two = BigRational::from_integer(int(2));
    RatMat::from_fn(a.len(), a.len(), |i, j| {
        let id = if i == j { BigRational::one() } else { BigRational::zero() };
        id - &two * &a[i] * &ga[j] / &aa
    })
}

pub fn coxeter_data(ts: &TSpace) -> CoxeterData {
    let (n, k) = (ts.lattice.n, ts.lattice.k as i64);
    let g = &ts.gram_gamma;
    let roots: Vec<Vec<BigRational>> =
        (0..n).map(|s| (0..n).map(|t| exact::rat(if t == s { -2 } else { k }, 1)).collect()).collect();
    let gr: Vec<Vec<BigRational>> = roots.iter().map(|a| g.mul_vec(a)).collect();
    let two = BigRational::from_integer(int(2));
    let cartan = RatMat::from_fn(n, n, |i, j| &two * exact::dot(&roots[i], &gr[j]) / exact::dot(&roots[i], &gr[i]));
    let rho = roots.iter().map(|a| rat_reflection(g, a)).collect();
    let tau = (0..n.saturating_sub(1))
        .map(|s| {
            let v: Vec<BigRational> =
                (0..n).map(|t| exact::rat(i64::from(t == s) - i64::from(t == s + 1), 1)).collect();
            rat_reflection(g, &v)
        })
        .collect();
    CoxeterData { roots, cartan, rho, tau }
}

pub fn coxeter_factorization_check_nk(n: usize, k: usize) -> CoxeterCheck {
    let ts = TSpace::new(n, k);
    let data = coxeter_data(&ts);
    let target = exact::to_rat(&lattice::restricted_action_t(n, k).matrix);
    let ki = k as i64;
    let cartan_ok = (0..n).all(|i| (0..n).all(|j| data.cartan[(i, j)] == exact::rat(if i == j { 2 } else { -ki }, 1)));
    let last = data.rho[n - 1].col(n - 1);
    let rho_last_column_ok =
        last.iter().enumerate().all(|(i, v)| *v == exact::rat(if i == n - 1 { -1 } else { ki }, 1));
    let unit = |s: usize| -> Vec<BigRational> { (0..n).map(|t| exact::rat(i64::from(t == s), 1)).collect() };
    let lambda =
        |s: usize| -> Vec<BigRational> { (0..n).map(|t| exact::rat(if t == s { -1 } else { ki }, 1)).collect() };
    let swap = |s: usize| {
        RatMat::from_fn(n, n, |i, j| {
            let pi = if i == s {
                s + 1
            } else if i == s + 1 {
                s
            } else {
                i
            };
            exact::rat(i64::from(pi == j), 1)
        })
    };
    let generators_ok = (0..n).all(|s| data.rho[s].mul_vec(&unit(s)) == lambda(s))
        && (0..n.saturating_sub(1)).all(|s| data.tau[s] == swap(s));
    let involutions = data.rho.iter().chain(&data.tau).all(|m| (m * m).is_identity());

    let mut literal = data.rho[n - 1].clone();
    for s in (0..n - 1).rev() {
        literal = &literal * &data.tau[s];
    }
    let mut reversed = rat_id(n);
    for s in 0..n - 1 {
        reversed = &reversed * &data.tau[s];
    }
    reversed = &reversed * &data.rho[n - 1];
    let target_inv = exact::inverse(&target).expect("f_* restricted to T is invertible");
    let trace: BigRational = (0..n).map(|i| target[(i, i)].clone()).sum();
    let literal_order = literal == target;
    let reversed_order = reversed == target;
    CoxeterCheck {
        n,
        k,
        cartan_ok,
        rho_last_column_ok,
        generators_ok,
        involutions,
        literal_order,
        literal_order_inverse: literal == target_inv,
        reversed_order,
        coxeter_identity: literal_order || reversed_order,
        trace: trace.to_string(),
    }
}

pub fn coxeter_factorization_check(p: &MapParams) -> CoxeterCheck {
    coxeter_factorization_check_nk(p.n as usize, p.k as usize)
}

/// `rho_*` for `(x, y) -> (y, x)`: limb `s` goes to limb `n-1-s` level by
/// level and `Sigma_0` is fixed.
pub fn rho_pushforward_nk(n: usize, k: usize) -> LatticeAuto {
    let lat = Lattice::new(n, k);
    let basis = lat.strict_basis();
    let mut images = vec![lat.sigma0()];
    for s in 0..n {
        for j in 1..=lat.levels() {
            images.push(lat.fiber(n - 1 - s, j));
        }
    }
    let b_inv = exact::int_inverse(&IntMat::from_columns(&basis)).expect("unimodular basis");
    LatticeAuto { matrix: &IntMat::from_columns(&images) * &b_inv, lattice: lat }
}

pub fn rho_pushforward(p: &MapParams) -> LatticeAuto {
    rho_pushforward_nk(p.n as usize, p.k as usize)
}

/// Matrix identities of the dihedral structure.
#[derive(Clone, Debug, Serialize)]
pub struct DihedralCheck {
    pub rho_is_isometry: bool,
    pub rho_involution: bool,
    /// `rho_* f_* rho_* = f_*^-1`
    pub reverses: bool,
    /// `(rho_* f_*)^2 = Id`
    pub product_involution: bool,
    /// `Sigma_1` and `Sigma_2` are exchanged
    pub swaps_sigma12: bool,
}

impl DihedralCheck {
    pub fn holds(&self) -> bool {
        self.rho_is_isometry && self.rho_involution && self.reverses && self.product_involution && self.swaps_sigma12
    }
}

pub fn dihedral_check_nk(n: usize, k: usize) -> DihedralCheck {
    let f = lattice::pushforward_nk(n, k);
    let r = rho_pushforward_nk(n, k);
    let lat = &f.lattice;
    let rf = &r.matrix * &f.matrix;
    let f_inv = f.inverse().expect("invertible").matrix;
    DihedralCheck {
        rho_is_isometry: r.is_isometry() && r.preserves_canonical(),
        rho_involution: (&r.matrix * &r.matrix).is_identity(),
        reverses: &rf * &r.matrix == f_inv,
        product_involution: (&rf * &rf).is_identity(),
        swaps_sigma12: r.apply(&lat.l_class(0)) == lat.l_class(n - 1),
    }
}

/// JSON verdict of the `weyl` subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct WeylVerdict {
    pub n: usize,
    pub k: usize,
    pub literal_identity: bool,
    pub repaired_phi: Option<Vec<Vec<usize>>>,
    pub repaired: Option<RepairedFactorization>,
    pub coxeter_identity: bool,
    pub coxeter: CoxeterCheck,
    pub dihedral: bool,
}

pub fn weyl_verdict(n: usize, k: usize) -> WeylVerdict {
    let w = weyl_factorization_check_nk(n, k);
    let c = coxeter_factorization_check_nk(n, k);
    WeylVerdict {
        n,
        k,
        literal_identity: w.literal_identity,
        repaired_phi: w.repaired.as_ref().map(|r| r.phi_cycles.clone()),
        repaired: w.repaired,
        coxeter_identity: c.coxeter_identity,
        coxeter: c,
        dihedral: dihedral_check_nk(n, k).holds(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_isometries_of_declared_order() {
        for (n, k) in [(3, 2), (2, 4), (2, 6)] {
            let lat = Lattice::new(n, k);
            let kc = lat.anticanonical();
            for g in weyl_generators(n, k) {
                assert_eq!(exact::gram(&lat.q, &g.matrix), lat.q, "{}", g.label);
                assert_eq!(g.matrix.mul_vec(&kc), kc, "{}", g.label);
            }
            let gens = weyl_generators(n, k);
            assert!((&gens[0].matrix * &gens[0].matrix).is_identity());
            assert!(gens[1].matrix.pow(n as u32).is_identity());
            assert_eq!(tau_perm(k).order(), k);
            assert!(gens[2].matrix.pow(k as u32).is_identity());
        }
    }

    #[test]
    fn j_of_e0() {
        let lat = Lattice::new(2, 4);
        let j = &weyl_generators(2, 4)[0].matrix;
        let mut want = lat.e0();
        want[0] = int(2);
        for l in [1, 5, 9] {
            want[lat.idx(0, l)] = int(-1);
        }
        assert_eq!(j.mul_vec(&lat.e0()), want);
    }

    #[test]
    fn fast_ops_match_matrix_products() {
        let lat = Lattice::new(2, 4);
        let ops = Ops::new(&lat);
        let m = lattice::pushforward_nk(2, 4).matrix;
        let j = &weyl_generators(2, 4)[0].matrix;
        let t = &weyl_generators(2, 4)[2].matrix;
        let mut a = m.clone();
        ops.j_left(&mut a);
        assert_eq!(a, j * &m);
        let mut b = m.clone();
        ops.j_right(&mut b);
        assert_eq!(b, &m * j);
        let f = vertical_map(&lat, &tau_perm(4), 0);
        assert_eq!(ops.perm_left(&m, &f), t * &m);
        assert_eq!(ops.perm_right(&m, &f), &m * t);
    }

    #[test]
    fn printed_phi() {
        assert_eq!(phi_perm(4).cycles(), vec![vec![3, 5], vec![7, 9]]);
        assert_eq!(
            phi_perm(8).cycles(),
            vec![vec![3, 9], vec![4, 8], vec![5, 7], vec![11, 17], vec![12, 16], vec![13, 15]]
        );
        assert!(phi_perm(2).cycles().is_empty());
    }

    #[test]
    fn weyl_literal_and_repaired() {
        let w = weyl_factorization_check_nk(3, 2);
        assert!(w.literal_identity && w.composed_is_isometry);
        let w = weyl_factorization_check_nk(2, 4);
        assert!(!w.literal_identity && w.composed_is_isometry && !w.residual.is_empty());
        let r = w.repaired.unwrap();
        assert_eq!((r.exponent, r.limb, r.tau_reversed), (3, 0, false));
        assert!(r.phi_matches_printed);
        let r = weyl_factorization_check_nk(3, 6).repaired.unwrap();
        assert_eq!(r.exponent, 5);
        assert!(r.phi_matches_printed);
    }

    #[test]
    fn coxeter() {
        for (n, k) in [(2, 4), (3, 2), (3, 4), (4, 2)] {
            let c = coxeter_factorization_check_nk(n, k);
            assert!(c.cartan_ok && c.rho_last_column_ok && c.generators_ok && c.involutions, "({n},{k})");
            assert!(c.reversed_order && c.coxeter_identity);
            assert!(c.literal_order_inverse);
        }
        assert_eq!(coxeter_factorization_check_nk(2, 6).trace, "6");
    }

    #[test]
    fn dihedral() {
        for (n, k) in [(2, 4), (3, 2), (4, 2), (3, 4)] {
            assert!(dihedral_check_nk(n, k).holds(), "({n},{k})");
        }
    }
}
