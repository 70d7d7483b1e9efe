//! Exact model of the Picard lattice of the blown-up plane.
//!
//! Basis order: `e_0`, then limbs `s = 0..n-1`, inside a limb levels
//! `j = 1..2k+1`. Every matrix and vector in this module uses that order.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, int, IntMat, Mat, RatMat, ZPoly};
use crate::params::MapParams;
use crate::roots;

pub type Class = Vec<BigInt>;
pub type RatClass = Vec<BigRational>;

/// Geometric basis and intersection form for given `(n, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub n: usize,
    pub k: usize,
    pub q: IntMat,
}

impl Lattice {
    pub fn new(n: usize, k: usize) -> Self {
        let dim = 1 + n * (2 * k + 1);
        let q = IntMat::from_fn(dim, dim, |i, j| match (i == j, i) {
            (false, _) => BigInt::zero(),
            (true, 0) => BigInt::one(),
            (true, _) => -BigInt::one(),
        });
        Lattice { n, k, q }
    }

    /// Levels per limb, `2k + 1`.
    pub fn levels(&self) -> usize {
        2 * self.k + 1
    }

    pub fn dim(&self) -> usize {
        1 + self.n * self.levels()
    }

    /// Position of `e_s^j`.
    pub fn idx(&self, s: usize, j: usize) -> usize {
        debug_assert!(s < self.n && (1..=self.levels()).contains(&j));
        1 + s * self.levels() + (j - 1)
    }

    /// `(s, j)` of a basis position, `None` for `e_0`.
    pub fn limb_level(&self, i: usize) -> Option<(usize, usize)> {
        (i > 0).then(|| ((i - 1) / self.levels(), (i - 1) % self.levels() + 1))
    }

    pub fn label(&self, i: usize) -> String {
        match self.limb_level(i) {
            None => "e0".into(),
            Some((s, j)) => format!("e{s}^{j}"),
        }
    }

    pub fn zero(&self) -> Class {
        vec![BigInt::zero(); self.dim()]
    }

    fn class(&self, terms: &[(usize, i64)]) -> Class {
        let mut v = self.zero();
        for &(i, c) in terms {
            v[i] += c;
        }
        v
    }

    pub fn e0(&self) -> Class {
        self.class(&[(0, 1)])
    }

    pub fn e(&self, s: usize, j: usize) -> Class {
        self.class(&[(self.idx(s, j), 1)])
    }

    /// Strict transform of the line at infinity, `e_0 - sum_s e_s^1`.
    pub fn sigma0(&self) -> Class {
        let mut t = vec![(0, 1)];
        t.extend((0..self.n).map(|s| (self.idx(s, 1), -1)));
        self.class(&t)
    }

    /// `L_s = e_0 - e_s^1 - e_s^2`; `L_0` is the class of `Sigma_1`,
    /// `L_(n-1)` the class of `Sigma_2`.
    pub fn l_class(&self, s: usize) -> Class {
        self.class(&[(0, 1), (self.idx(s, 1), -1), (self.idx(s, 2), -1)])
    }

    /// Strict transform of the fiber `F_s^j`.
    pub fn fiber(&self, s: usize, j: usize) -> Class {
        let k = self.k;
        if j == 1 {
            let mut t = vec![(self.idx(s, 1), 1)];
            t.extend((2..=k + 1).map(|i| (self.idx(s, i), -1)));
            self.class(&t)
        } else if j <= 2 * k {
            self.class(&[(self.idx(s, j), 1), (self.idx(s, j + 1), -1)])
        } else {
            self.e(s, j)
        }
    }

    /// Generators of `S`: `Sigma_0` and `F_s^j` for `j <= 2k`.
    pub fn s_basis(&self) -> Vec<Class> {
        let mut out = vec![self.sigma0()];
        for s in 0..self.n {
            for j in 1..=2 * self.k {
                out.push(self.fiber(s, j));
            }
        }
        out
    }

    /// `Sigma_0` and every `F_s^j`: a unimodular basis of the lattice.
    pub fn strict_basis(&self) -> Vec<Class> {
        let mut out = vec![self.sigma0()];
        for s in 0..self.n {
            for j in 1..=self.levels() {
                out.push(self.fiber(s, j));
            }
        }
        out
    }

    pub fn ip(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        exact::form(&self.q, a, b)
    }

    pub fn q_rat(&self) -> RatMat {
        exact::to_rat(&self.q)
    }

    /// `3 e_0 - sum of all e_s^j`, i.e. `-K`.
    pub fn anticanonical(&self) -> Class {
        let mut v = vec![-BigInt::one(); self.dim()];
        v[0] = int(3);
        v
    }
}

/// Strict transforms of the curves appearing in the construction.
#[derive(Clone, Debug)]
pub struct StrictTransformTable {
    pub sigma0: Class,
    /// `L_s`, with `Sigma_1 = L_0` and `Sigma_2 = L_(n-1)`
    pub l: Vec<Class>,
    /// `f[s][j-1] = F_s^j`
    pub f: Vec<Vec<Class>>,
}

/// Output of [`build_lattice`] with the exact validation data.
#[derive(Clone, Debug)]
pub struct LatticeData {
    pub lattice: Lattice,
    pub table: StrictTransformTable,
    pub gram_s: IntMat,
    pub minors: Vec<BigInt>,
    pub negative_definite: bool,
    pub det_s: BigInt,
    /// `(1 - nk/(k+2)) ((k+2)k)^n`, written over the integers
    pub det_formula: BigInt,
    /// limb Gram matrices equal the block `A_k`
    pub limb_blocks_ok: bool,
    /// `Sigma_0^2 = 1-n` and `Sigma_0 . F_s^1 = 1`
    pub sigma0_ok: bool,
}

/// The `2k x 2k` limb block: `-k-1, -2, ..., -2` on the diagonal, the chain
/// `F^2 - ... - F^2k`, and `F^1` meeting `F^(k+1)`.
pub fn a_k(k: usize) -> IntMat {
    IntMat::from_fn(2 * k, 2 * k, |a, b| {
        let (i, j) = (a + 1, b + 1);
        let v = if i == j {
            if i == 1 {
                -(k as i64) - 1
            } else {
                -2
            }
        } else {
            let (lo, hi) = (i.min(j), i.max(j));
            let chain = lo >= 2 && hi == lo + 1;
            let hook = lo == 1 && hi == k + 1;
            i64::from(chain || hook)
        };
        int(v)
    })
}

pub fn build_lattice(n: usize, k: usize) -> LatticeData {
    let lat = Lattice::new(n, k);
    let table = StrictTransformTable {
        sigma0: lat.sigma0(),
        l: (0..n).map(|s| lat.l_class(s)).collect(),
        f: (0..n).map(|s| (1..=lat.levels()).map(|j| lat.fiber(s, j)).collect()).collect(),
    };
    let sb = IntMat::from_columns(&lat.s_basis());
    let gram_s = exact::gram(&lat.q, &sb);
    let minors = exact::leading_principal_minors(&gram_s);
    let negative_definite = minors.len() == gram_s.rows
        && minors.iter().enumerate().all(|(i, d)| if i % 2 == 0 { d.is_negative() } else { d.is_positive() });
    let det_s = exact::det(&gram_s);
    let (ni, ki) = (n as i64, k as i64);
    let det_formula = int(ki + 2 - ni * ki) * num_traits::pow(int(ki + 2), n - 1) * num_traits::pow(int(ki), n);
    let block = a_k(k);
    let limb_blocks_ok = (0..n).all(|s| {
        let fs = IntMat::from_columns(&table.f[s][..2 * k]);
        exact::gram(&lat.q, &fs) == block
    });
    let sigma0_ok = lat.ip(&table.sigma0, &table.sigma0) == int(1 - ni)
        && (0..n).all(|s| lat.ip(&table.sigma0, &table.f[s][0]).is_one());
    LatticeData {
        lattice: lat,
        table,
        gram_s,
        minors,
        negative_definite,
        det_s,
        det_formula,
        limb_blocks_ok,
        sigma0_ok,
    }
}

/// `-K` written in strict transforms and in the geometric basis.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalClass {
    /// coefficients of `F^1, ..., F^2k` in every limb: `2, 1, 2, ..., k, k-1, ..., 1`
    pub fiber_coeffs: Vec<i64>,
    pub sigma0_coeff: i64,
    #[serde(serialize_with = "ser_ints")]
    pub from_strict: Class,
    #[serde(serialize_with = "ser_ints")]
    pub geometric: Class,
    pub agree: bool,
    #[serde(serialize_with = "ser_int")]
    pub self_intersection: BigInt,
}

pub fn canonical_class(n: usize, k: usize) -> CanonicalClass {
    let lat = Lattice::new(n, k);
    let mut fiber_coeffs = vec![2];
    fiber_coeffs.extend((2..=k + 1).map(|j| j as i64 - 1));
    fiber_coeffs.extend((1..k).map(|i| (k - i) as i64));
    let mut v: Class = lat.sigma0().iter().map(|c| c * 3).collect();
    for s in 0..n {
        for (j, &c) in fiber_coeffs.iter().enumerate() {
            for (slot, f) in v.iter_mut().zip(lat.fiber(s, j + 1)) {
                *slot += f * c;
            }
        }
    }
    let geometric = lat.anticanonical();
    let self_intersection = lat.ip(&geometric, &geometric);
    CanonicalClass {
        agree: v == geometric,
        fiber_coeffs,
        sigma0_coeff: 3,
        from_strict: v,
        geometric,
        self_intersection,
    }
}

/// An isometry of the lattice with its matrix in the geometric basis
/// (columns are images of basis vectors).
#[derive(Clone, Debug)]
pub struct LatticeAuto {
    pub lattice: Lattice,
    pub matrix: IntMat,
}

impl LatticeAuto {
    pub fn apply(&self, v: &[BigInt]) -> Class {
        self.matrix.mul_vec(v)
    }

    pub fn is_isometry(&self) -> bool {
        exact::gram(&self.lattice.q, &self.matrix) == self.lattice.q
    }

    pub fn preserves_canonical(&self) -> bool {
        let k = self.lattice.anticanonical();
        self.apply(&k) == k
    }

    pub fn det(&self) -> BigInt {
        exact::det(&self.matrix)
    }

    pub fn char_poly(&self) -> ZPoly {
        exact::char_poly(&self.matrix)
    }

    pub fn inverse(&self) -> Option<LatticeAuto> {
        exact::int_inverse(&self.matrix).map(|m| LatticeAuto { lattice: self.lattice.clone(), matrix: m })
    }

    /// Rows as decimal strings (arbitrary-precision safe JSON).
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.matrix.rows).map(|i| self.matrix.row(i).iter().map(|x| x.to_string()).collect()).collect()
    }
}

/// Image of a strict-transform basis element under `f_*`.
fn strict_image(lat: &Lattice, s: usize, j: usize) -> Class {
    let (n, k) = (lat.n, lat.k);
    if s + 1 < n {
        lat.fiber(s + 1, j)
    } else if j == 1 {
        lat.fiber(0, 1)
    } else if j <= 2 * k {
        // F^(k+1+l)_(n-1) -> F^(k+1-l)_0
        lat.fiber(0, 2 * k + 2 - j)
    } else {
        // the last fiber of the last limb is blown down onto Sigma_1
        lat.l_class(0)
    }
}

/// `f_*` from the cycle scheme on the strict basis, converted to the
/// geometric basis.
pub fn pushforward_nk(n: usize, k: usize) -> LatticeAuto {
    let lat = Lattice::new(n, k);
    let basis = lat.strict_basis();
    let mut images = vec![lat.sigma0()];
    for s in 0..n {
        for j in 1..=lat.levels() {
            images.push(strict_image(&lat, s, j));
        }
    }
    let b = IntMat::from_columns(&basis);
    let p = IntMat::from_columns(&images);
    let b_inv = exact::int_inverse(&b).expect("strict transforms form a unimodular basis");
    LatticeAuto { matrix: &p * &b_inv, lattice: lat }
}

pub fn pushforward_matrix(p: &MapParams) -> LatticeAuto {
    pushforward_nk(p.n as usize, p.k as usize)
}

/// `chi_(n,k)(x) = 1 - k sum_(l=1)^(n-1) x^l + x^n`.
pub fn chi_poly(n: usize, k: usize) -> ZPoly {
    let mut c = vec![-(k as i64); n + 1];
    c[0] = 1;
    c[n] = 1;
    ZPoly::from_i64(&c)
}

pub fn char_poly(m: &LatticeAuto) -> ZPoly {
    m.char_poly()
}

/// Largest real root of `chi_(n,k)`, to `1e-13`.
pub fn spectral_radius(n: usize, k: usize) -> f64 {
    exact::largest_real_root(&chi_poly(n, k), 1e-13).expect("chi has a real root > 1")
}

/// Spectral data of `f_*`.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_poly")]
    pub chi: ZPoly,
    #[serde(serialize_with = "ser_poly")]
    pub char_poly: ZPoly,
    pub divisible: bool,
    #[serde(serialize_with = "ser_poly")]
    pub cofactor: ZPoly,
    /// `(m, multiplicity)` for each cyclotomic factor `Phi_m` of the cofactor
    pub cyclotomic_factors: Vec<(u32, usize)>,
    /// what is left after removing cyclotomic factors (`1` when none)
    #[serde(serialize_with = "ser_poly")]
    pub non_cyclotomic: ZPoly,
    /// `max | |r| - 1 |` over the distinct cofactor roots
    pub cofactor_unit_deviation: f64,
    #[serde(serialize_with = "ser_int")]
    pub det: BigInt,
    pub lambda: f64,
    pub entropy: f64,
}

pub fn spectrum(n: usize, k: usize) -> Spectrum {
    let auto = pushforward_nk(n, k);
    let cp = auto.char_poly();
    let chi = chi_poly(n, k);
    let quotient = cp.exact_div(&chi);
    let divisible = quotient.is_some();
    let cofactor = quotient.unwrap_or_else(ZPoly::zero);
    let (cyclotomic_factors, non_cyclotomic) =
        if divisible { exact::cyclotomic_factors(&cofactor) } else { (Vec::new(), cofactor.clone()) };
    let cofactor_unit_deviation = unit_deviation(&cofactor);
    let lambda = spectral_radius(n, k);
    Spectrum {
        n,
        k,
        chi,
        char_poly: cp,
        divisible,
        cofactor,
        cyclotomic_factors,
        non_cyclotomic,
        cofactor_unit_deviation,
        det: auto.det(),
        lambda,
        entropy: lambda.ln(),
    }
}

/// Largest distance of a root modulus from 1, over the square-free part.
fn unit_deviation(p: &ZPoly) -> f64 {
    if p.degree().unwrap_or(0) == 0 {
        return if p.is_zero() { f64::INFINITY } else { 0.0 };
    }
    let sf = exact::squarefree_part(&p.to_q()).primitive();
    let coeffs: Vec<Complex64> = sf.to_f64().into_iter().map(|c| Complex64::new(c, 0.0)).collect();
    roots::aberth(&coeffs).iter().map(|r| (r.norm() - 1.0).abs()).fold(0.0, f64::max)
}

/// `d_m = (f_*^m e_0) . e_0` for `m = 0..=m_max`.
pub fn degree_sequence(auto: &LatticeAuto, m_max: usize) -> Vec<BigInt> {
    let lat = &auto.lattice;
    let e0 = lat.e0();
    let mut v = e0.clone();
    let mut out = Vec::with_capacity(m_max + 1);
    for _ in 0..=m_max {
        out.push(lat.ip(&v, &e0));
        v = auto.apply(&v);
    }
    out
}

/// Checks `sum_i p_i d_(m+i) = 0` for every window that fits.
pub fn satisfies_recurrence(d: &[BigInt], p: &ZPoly) -> bool {
    let deg = p.degree().unwrap_or(0);
    d.windows(deg + 1).all(|w| exact::dot(w, &p.coeffs).is_zero())
}

/// Projection onto `T = S^perp` and the `gamma` basis.
#[derive(Clone, Debug)]
pub struct TSpace {
    pub lattice: Lattice,
    q: RatMat,
    sb: RatMat,
    gram_s: RatMat,
    /// `gamma_s` = projection of `F_s^(2k+1)`, in geometric coordinates
    pub gamma: Vec<RatClass>,
    pub gram_gamma: RatMat,
}

impl TSpace {
    pub fn new(n: usize, k: usize) -> Self {
        let lattice = Lattice::new(n, k);
        let q = lattice.q_rat();
        let sb = exact::to_rat(&IntMat::from_columns(&lattice.s_basis()));
        let gram_s = exact::gram(&q, &sb);
        let mut ts = TSpace { lattice, q, sb, gram_s, gamma: Vec::new(), gram_gamma: RatMat::zeros(0, 0) };
        ts.gamma = (0..n).map(|s| ts.project(&ts.lattice.fiber(s, 2 * k + 1))).collect();
        ts.gram_gamma = exact::gram(&ts.q, &RatMat::from_columns(&ts.gamma));
        ts
    }

    /// Orthogonal projection onto `T`, exact over the rationals.
    pub fn project(&self, v: &[BigInt]) -> RatClass {
        let v: RatClass = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let rhs = self.sb.transpose().mul_vec(&self.q.mul_vec(&v));
        let coef = exact::solve(&self.gram_s, &RatMat::from_columns(&[rhs])).expect("S is nondegenerate");
        let s_part = self.sb.mul_vec(&coef.col(0));
        v.iter().zip(s_part).map(|(a, b)| a - b).collect()
    }

    /// Coordinates of a vector of `T` in the `gamma` basis.
    pub fn gamma_coords(&self, t: &[BigRational]) -> RatClass {
        let gb = RatMat::from_columns(&self.gamma);
        let rhs = gb.transpose().mul_vec(&self.q.mul_vec(t));
        exact::solve(&self.gram_gamma, &RatMat::from_columns(&[rhs])).expect("gamma is a basis").col(0)
    }

    pub fn ip(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        exact::form(&self.q, a, b)
    }

    /// True when `v` is orthogonal to every generator of `S`.
    pub fn in_t(&self, v: &[BigRational]) -> bool {
        (0..self.sb.cols).all(|c| self.ip(&self.sb.col(c), v).is_zero())
    }

    /// True when `v` lies in the span of the generators of `S`.
    pub fn in_s(&self, v: &[BigRational]) -> bool {
        let lat = &self.lattice;
        let as_int: Option<Class> = v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect();
        match as_int {
            Some(c) => self.project(&c).iter().all(|x| x.is_zero()),
            None => {
                let rhs = self.sb.transpose().mul_vec(&self.q.mul_vec(v));
                let coef = exact::solve(&self.gram_s, &RatMat::from_columns(&[rhs])).unwrap();
                self.sb.mul_vec(&coef.col(0)) == v && lat.dim() == v.len()
            }
        }
    }
}

/// `project_to_T(v)` in `gamma` coordinates.
pub fn project_to_t(ts: &TSpace, v: &[BigInt]) -> RatClass {
    ts.gamma_coords(&ts.project(v))
}

/// Checks the formula `proj(L_s) = -gamma_s + k sum_(t != s) gamma_t` for every `s`.
pub fn l_projection_identity(ts: &TSpace) -> Vec<bool> {
    let (n, k) = (ts.lattice.n, ts.lattice.k);
    (0..n)
        .map(|s| {
            let got = project_to_t(ts, &ts.lattice.l_class(s));
            let want: RatClass = (0..n).map(|t| exact::rat(if t == s { -1 } else { k as i64 }, 1)).collect();
            got == want
        })
        .collect()
}

/// Compares the `gamma` Gram matrix with `delta` on the diagonal and `eps`
/// elsewhere, `delta = 2-(n-2)k`, `eps = k`. Returns the common ratio when
/// the matrices are proportional.
pub fn gamma_gram_ratio(ts: &TSpace) -> Option<BigRational> {
    let (n, k) = (ts.lattice.n as i64, ts.lattice.k as i64);
    let delta = exact::rat(2 - (n - 2) * k, 1);
    let eps = exact::rat(k, 1);
    let g = &ts.gram_gamma;
    let model = |i: usize, j: usize| if i == j { delta.clone() } else { eps.clone() };
    let mut ratio: Option<BigRational> = None;
    for i in 0..g.rows {
        for j in 0..g.cols {
            let m = model(i, j);
            if m.is_zero() {
                if !g[(i, j)].is_zero() {
                    return None;
                }
                continue;
            }
            let r = &g[(i, j)] / &m;
            match &ratio {
                None => ratio = Some(r),
                Some(r0) if *r0 != r => return None,
                _ => {}
            }
        }
    }
    ratio.filter(|r| !r.is_zero())
}

/// `f_*` restricted to `T`, in `gamma` coordinates.
#[derive(Clone, Debug)]
pub struct RestrictedAction {
    /// `gamma_s -> gamma_(s+1)`, `gamma_(n-1) -> -gamma_0 + k sum_(t>0) gamma_t`
    pub matrix: IntMat,
    /// agrees with projecting `f_*` applied to `F_s^(2k+1)`
    pub consistent: bool,
    pub char_poly: ZPoly,
    /// `+1` or `-1` when `char_poly = +-chi`, `0` otherwise
    pub chi_sign: i32,
    /// `det(f_*|_T - Id)`; nonzero means no invariant classes in `T`
    pub det_minus_identity: BigInt,
}

pub fn restricted_action_t(n: usize, k: usize) -> RestrictedAction {
    let matrix = IntMat::from_fn(n, n, |i, j| {
        if j + 1 < n {
            int(i64::from(i == j + 1))
        } else if i == 0 {
            int(-1)
        } else {
            int(k as i64)
        }
    });
    let ts = TSpace::new(n, k);
    let auto = pushforward_nk(n, k);
    let consistent = (0..n).all(|s| {
        let img = auto.apply(&ts.lattice.fiber(s, 2 * k + 1));
        let got = project_to_t(&ts, &img);
        let want: RatClass = matrix.col(s).into_iter().map(BigRational::from_integer).collect();
        got == want
    });
    let cp = exact::char_poly(&matrix);
    let chi = chi_poly(n, k);
    let chi_sign = if cp == chi {
        1
    } else if cp.neg() == chi {
        -1
    } else {
        0
    };
    let minus_id = IntMat::from_fn(n, n, |i, j| &matrix[(i, j)] - int(i64::from(i == j)));
    RestrictedAction { det_minus_identity: exact::det(&minus_id), matrix, consistent, char_poly: cp, chi_sign }
}

/// The four displayed leading coefficients of `gamma_s` against the exact ones.
#[derive(Clone, Debug, Serialize)]
pub struct GammaClosedForm {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    /// on `F_s^(2k+1)`, `F_t^(2k+1)` (t != s), `F_s^2k`, `F_t^2k` (t != s)
    #[serde(serialize_with = "ser_rats")]
    pub displayed: Vec<BigRational>,
    #[serde(serialize_with = "ser_rats")]
    pub exact: Vec<BigRational>,
    pub coefficient_matches: Vec<bool>,
    /// `F_s^2k . gamma_s` and `F_t^2k . gamma_s`: displayed vs exact
    #[serde(serialize_with = "ser_rats")]
    pub displayed_products: Vec<BigRational>,
    #[serde(serialize_with = "ser_rats")]
    pub exact_products: Vec<BigRational>,
    pub varpi_in_s: bool,
    pub varrho_in_t: bool,
    /// `k^2 (k/2+1)(k/2+1-n) F_s^(2k+1)` equals the displayed T-part minus S-part
    pub decomposition_identity: bool,
}

pub fn gamma_closed_form(n: usize, k: usize, s: usize) -> Result<GammaClosedForm> {
    let (ni, ki) = (n as i64, k as i64);
    if ki == 2 * ni - 2 {
        return Err(Error::Degenerate(format!("k = 2n - 2 = {k}: the displayed denominators vanish")));
    }
    if s >= n {
        return Err(Error::InvalidParams(format!("limb {s} out of range")));
    }
    let den = ki * (ki + 2) * (ki - 2 * ni + 2);
    let displayed = vec![
        exact::rat(-4 * (ki * (ni - 3) + 2 * (ni - 2)), den),
        exact::rat(-2 * (4 - ki * ki), den),
        exact::rat(2 * (ki - (ni - 2) * (ki * ki + 2 * ki - 1)), ki * den),
        exact::rat(2 * (4 * ki - 2 - ki * ki * ki), ki * den),
    ];
    let displayed_products = vec![
        exact::rat(2 * ((ni - 4) * ki * ki + (2 * ni - 3) * ki + ni - 2), ki * den),
        exact::rat(-4 * (ki * ki * ki - 4 * ki + 1), ki * den),
    ];

    let ts = TSpace::new(n, k);
    let lat = &ts.lattice;
    let t = (s + 1) % n;
    // coordinates of gamma_s in the strict basis
    let basis = exact::to_rat(&IntMat::from_columns(&lat.strict_basis()));
    let coords = exact::solve(&basis, &RatMat::from_columns(&[ts.gamma[s].clone()])).unwrap().col(0);
    let at = |limb: usize, j: usize| coords[1 + limb * lat.levels() + (j - 1)].clone();
    let exact_c = if n > 1 {
        vec![at(s, 2 * k + 1), at(t, 2 * k + 1), at(s, 2 * k), at(t, 2 * k)]
    } else {
        vec![at(s, 2 * k + 1), BigRational::zero(), at(s, 2 * k), BigRational::zero()]
    };
    let to_rat = |c: &Class| -> RatClass { c.iter().map(|x| BigRational::from_integer(x.clone())).collect() };
    let exact_products =
        vec![ts.ip(&to_rat(&lat.fiber(s, 2 * k)), &ts.gamma[s]), ts.ip(&to_rat(&lat.fiber(t, 2 * k)), &ts.gamma[s])];

    // the auxiliary classes v_i, u_i, varpi_i, varrho_i
    let add = |acc: &mut Class, v: &Class, c: i64| {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b * c;
        }
    };
    let v_class = |i: usize| {
        let mut v = lat.fiber(i, 1);
        for j in 2..=k {
            add(&mut v, &lat.fiber(i, j), j as i64 - 1);
        }
        for j in k + 1..=2 * k {
            add(&mut v, &lat.fiber(i, j), ki);
        }
        v
    };
    let u_class = |i: usize| {
        let mut u = lat.zero();
        for j in 2..=2 * k {
            add(&mut u, &lat.fiber(i, j), j as i64 - 1);
        }
        u
    };
    let varpi = |i: usize| {
        let mut w = lat.zero();
        add(&mut w, &lat.sigma0(), -ki);
        for o in (0..n).filter(|&o| o != i) {
            add(&mut w, &v_class(o), -ki);
        }
        add(&mut w, &u_class(i), 1);
        w
    };
    let varrho = |i: usize| {
        let mut r = varpi(i);
        for o in (0..n).filter(|&o| o != i) {
            add(&mut r, &lat.fiber(o, 2 * k + 1), -ki * ki);
        }
        add(&mut r, &lat.fiber(i, 2 * k + 1), 2 * ki);
        r
    };
    let varpi_in_s = (0..n).all(|i| ts.in_s(&to_rat(&varpi(i))));
    let varrho_in_t = (0..n).all(|i| ts.in_t(&to_rat(&varrho(i))));

    // k^2 (k/2+1)(k/2+1-n) F = [(k/2+2-n) rho_s + sum rho_j] - [(k/2+2-n) pi_s + sum pi_j]
    let h = ki / 2;
    let mut lhs = lat.zero();
    add(&mut lhs, &lat.fiber(s, 2 * k + 1), ki * ki * (h + 1) * (h + 1 - ni));
    let mut rhs = lat.zero();
    for i in 0..n {
        let c = if i == s { h + 2 - ni } else { 1 };
        add(&mut rhs, &varrho(i), c);
        add(&mut rhs, &varpi(i), -c);
    }
    let decomposition_identity = lhs == rhs;

    Ok(GammaClosedForm {
        n,
        k,
        s,
        coefficient_matches: displayed.iter().zip(&exact_c).map(|(a, b)| a == b).collect(),
        displayed,
        exact: exact_c,
        displayed_products,
        exact_products,
        varpi_in_s,
        varrho_in_t,
        decomposition_identity,
    })
}

/// Self-intersection data behind the minimality statement.
#[derive(Clone, Debug, Serialize)]
pub struct Minimality {
    /// `(label, self-intersection)` of `Sigma_0` and every `F_s^j`, `j <= 2k`
    pub curves: Vec<(String, i64)>,
    /// after contracting `Sigma_0` (only when `Sigma_0^2 = -1`)
    pub after_blowdown: Option<Vec<(String, i64)>>,
    pub holds: bool,
}

pub fn minimality(n: usize, k: usize) -> Minimality {
    let lat = Lattice::new(n, k);
    let sq = |v: &Class| lat.ip(v, v).to_i64().unwrap();
    let mut curves = vec![("Sigma0".to_string(), sq(&lat.sigma0()))];
    for s in 0..n {
        for j in 1..=2 * k {
            curves.push((format!("F{s}^{j}"), sq(&lat.fiber(s, j))));
        }
    }
    let sigma0_sq = curves[0].1;
    let after_blowdown = (sigma0_sq == -1).then(|| {
        // contracting a (-1)-curve C sends D^2 to D^2 + (D.C)^2
        let s0 = lat.sigma0();
        let mut out = Vec::new();
        for s in 0..n {
            for j in 1..=2 * k {
                let f = lat.fiber(s, j);
                let m = lat.ip(&f, &s0).to_i64().unwrap();
                out.push((format!("F{s}^{j}"), sq(&f) + m * m));
            }
        }
        out
    });
    let holds = match &after_blowdown {
        None => curves.iter().all(|(_, v)| *v <= -2),
        Some(rest) => rest.iter().all(|(_, v)| *v <= -2),
    };
    Minimality { curves, after_blowdown, holds }
}

pub(crate) fn ser_int<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn ser_ints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub(crate) fn ser_rats<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub(crate) fn ser_poly<S: serde::Serializer>(p: &ZPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.to_strings())
}

/// Serializes an integer matrix as rows of decimal strings.
pub fn mat_to_strings(m: &Mat<BigInt>) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DESK: [(usize, usize); 5] = [(2, 4), (2, 6), (3, 2), (3, 4), (4, 2)];

    #[test]
    fn dimensions() {
        let d = build_lattice(3, 2);
        assert_eq!(d.lattice.dim(), 16);
        assert_eq!(d.lattice.s_basis().len(), 13);
        assert_eq!(d.lattice.idx(1, 1), 6);
        assert_eq!(d.lattice.limb_level(6), Some((1, 1)));
    }

    #[test]
    fn lattice_suite_desk_scale() {
        for (n, k) in DESK {
            let d = build_lattice(n, k);
            assert!(d.negative_definite, "({n},{k})");
            assert_eq!(d.det_s, d.det_formula, "({n},{k})");
            assert!(d.limb_blocks_ok && d.sigma0_ok);
            let m = pushforward_nk(n, k);
            assert!(m.is_isometry() && m.preserves_canonical());
            assert_eq!(m.det().abs(), BigInt::one());
        }
    }

    #[test]
    fn canonical_expressions_agree() {
        for (n, k) in [(2, 2), (3, 2), (2, 4)] {
            let c = canonical_class(n, k);
            assert!(c.agree);
            assert_eq!(c.self_intersection, int(9 - (n * (2 * k + 1)) as i64));
            assert_eq!(c.fiber_coeffs[k], k as i64);
        }
    }

    #[test]
    fn pushforward_sends_sigma2_to_last_fiber() {
        let m = pushforward_nk(3, 2);
        let lat = &m.lattice;
        assert_eq!(m.apply(&lat.l_class(2)), lat.fiber(0, 5));
        assert_eq!(m.apply(&lat.sigma0()), lat.sigma0());
        // the pushforward of a line has degree k + 1
        assert_eq!(degree_sequence(&m, 1)[1], int(3));
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_poly(3, 2), ZPoly::from_i64(&[1, -2, -2, 1]));
        assert_eq!(chi_poly(3, 2), ZPoly::from_i64(&[1, 1]).mul(&ZPoly::from_i64(&[1, -3, 1])));
        assert_eq!(chi_poly(2, 6), ZPoly::from_i64(&[1, -6, 1]));
        for (n, k) in DESK {
            assert_ne!(chi_poly(n, k).eval(&BigInt::one()), BigInt::zero());
        }
    }

    #[test]
    fn spectra() {
        let s = spectrum(3, 2);
        assert!((s.lambda - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let s = spectrum(2, 4);
        assert!(s.divisible);
        assert_eq!(s.non_cyclotomic, ZPoly::one());
        assert_eq!(s.cyclotomic_factors, vec![(1, 6), (2, 5), (4, 3)]);
        assert!(s.cofactor_unit_deviation < 1e-9);
    }

    #[test]
    fn known_degrees() {
        let d = degree_sequence(&pushforward_nk(3, 2), 7);
        let want: Vec<BigInt> = [1, 3, 9, 27, 73, 195, 513, 1347].iter().map(|&v| int(v)).collect();
        assert_eq!(d, want);
        let d = degree_sequence(&pushforward_nk(2, 4), 4);
        let want: Vec<BigInt> = [1, 5, 25, 101, 385].iter().map(|&v| int(v)).collect();
        assert_eq!(d, want);
    }

    #[test]
    fn t_space_identities() {
        for (n, k) in DESK {
            let ts = TSpace::new(n, k);
            assert!(l_projection_identity(&ts).iter().all(|&b| b));
            assert!(project_to_t(&ts, &ts.lattice.sigma0()).iter().all(|x| x.is_zero()));
            assert!(project_to_t(&ts, &ts.lattice.fiber(n - 1, 2 * k)).iter().all(|x| x.is_zero()));
            assert!(gamma_gram_ratio(&ts).is_some(), "({n},{k})");
            let r = restricted_action_t(n, k);
            assert!(r.consistent && r.chi_sign != 0 && !r.det_minus_identity.is_zero());
        }
        assert_eq!(gamma_gram_ratio(&TSpace::new(2, 4)), Some(exact::rat(1, 48)));
        assert_eq!(gamma_gram_ratio(&TSpace::new(3, 2)), Some(exact::rat(1, 16)));
    }

    #[test]
    fn restricted_action_n2() {
        let r = restricted_action_t(2, 4);
        assert_eq!(r.matrix, IntMat::from_fn(2, 2, |i, j| int([[0, -1], [1, 4]][i][j])));
        assert_eq!(r.char_poly, ZPoly::from_i64(&[1, -4, 1]));
    }

    #[test]
    fn gamma_closed_form_membership() {
        let g = gamma_closed_form(2, 4, 0).unwrap();
        assert!(g.varpi_in_s && g.varrho_in_t);
        // exact projection has coefficient 1 on its own last fiber
        assert_eq!(g.exact[0], BigRational::one());
        assert!(g.exact_products.iter().all(|x| x.is_zero()));
        assert!(gamma_closed_form(3, 2, 1).unwrap().decomposition_identity);
        assert!(matches!(gamma_closed_form(2, 2, 0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn minimality_data() {
        assert!(minimality(3, 2).holds && minimality(3, 2).after_blowdown.is_none());
        let m = minimality(2, 4);
        assert!(m.holds);
        let after = m.after_blowdown.unwrap();
        assert!(after.iter().any(|(l, v)| l == "F0^1" && *v == -4));
    }
}
