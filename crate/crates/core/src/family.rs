//! The map family, its homogeneous form, and the combinatorial data at
//! infinity: the admissible values of `c`, the orbit `w_s` of the line at
//! infinity and the series coefficients `b_j` that locate the blowup centers.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::MapParams;
use crate::scalar::Scalar;

/// Affine inputs with `|y|` below this are treated as lying on the pole line.
pub const POLE_TOL: f64 = 1e-12;
/// Results larger than this are reported as overflow (orbits: escape).
pub const MAGNITUDE_CAP: f64 = 1e100;
/// Tolerance used for `w_(n-1) = 0` and `w_* = 1`.
pub const ORBIT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffinePoint {
    pub x: Complex64,
    pub y: Complex64,
}

impl AffinePoint {
    pub fn new(x: Complex64, y: Complex64) -> Self {
        AffinePoint { x, y }
    }

    pub fn real(x: f64, y: f64) -> Self {
        AffinePoint { x: Complex64::new(x, 0.0), y: Complex64::new(y, 0.0) }
    }

    /// The reversor `(x, y) -> (y, x)`.
    pub fn swap(self) -> Self {
        AffinePoint { x: self.y, y: self.x }
    }

    pub fn dist(&self, other: &AffinePoint) -> f64 {
        ((self.x - other.x).norm_sqr() + (self.y - other.y).norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A point `[x0 : x1 : x2]` of the projective plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjPoint(pub [Complex64; 3]);

impl ProjPoint {
    pub fn new(x0: Complex64, x1: Complex64, x2: Complex64) -> Self {
        ProjPoint([x0, x1, x2])
    }

    pub fn from_affine(p: AffinePoint) -> Self {
        ProjPoint([Complex64::new(1.0, 0.0), p.x, p.y])
    }

    /// Scale so the largest-modulus coordinate equals 1.
    pub fn normalized(&self) -> Result<Self> {
        let i = argmax_modulus(&self.0);
        let m = self.0[i];
        if m.norm() == 0.0 || !m.is_finite() {
            return Err(Error::Indeterminacy(format!("not a projective point: {:?}", self.0)));
        }
        Ok(ProjPoint([self.0[0] / m, self.0[1] / m, self.0[2] / m]))
    }

    /// Dehomogenize on `x0 = 1`.
    pub fn to_affine(&self) -> Result<AffinePoint> {
        let p = self.normalized()?;
        if p.0[0].norm() < POLE_TOL {
            return Err(Error::Pole("point lies on the line at infinity".into()));
        }
        Ok(AffinePoint { x: p.0[1] / p.0[0], y: p.0[2] / p.0[0] })
    }

    /// Projective equality: all 2x2 minors vanish after normalization.
    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        let (Ok(a), Ok(b)) = (self.normalized(), other.normalized()) else {
            return false;
        };
        let (a, b) = (a.0, b.0);
        (0..3).all(|i| (i + 1..3).all(|j| (a[i] * b[j] - a[j] * b[i]).norm() <= tol))
    }
}

pub(crate) fn argmax_modulus<S: Scalar>(v: &[S]) -> usize {
    let mut best = 0;
    let mut best_mod = f64::NEG_INFINITY;
    for (i, z) in v.iter().enumerate() {
        let m = z.log2_modulus();
        if m > best_mod {
            best = i;
            best_mod = m;
        }
    }
    best
}

/// The orbit of the line at infinity: `w_1 = c`, `w_(s+1) = c - delta/w_s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfinityOrbit {
    /// `[w_1, ..., w_(n-1)]`
    pub w: Vec<Complex64>,
    /// `w_((n-1)/2)` for odd `n`
    pub w_star: Option<Complex64>,
}

/// Series data `y^k / q(x, y) = sum_j (b_j + b_x[j] x) y^j + O(y^(2k+1))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BCoefficients {
    /// `[b_0, ..., b_2k]` (constant parts)
    pub b: Vec<Complex64>,
    /// x-linear parts; zero except at order `2k`
    pub b_x: Vec<Complex64>,
}

/// Numerical coefficients of one family member at some working precision.
#[derive(Clone, Debug)]
pub struct MapCoeffs<S> {
    pub n: usize,
    pub k: usize,
    pub c: S,
    pub delta: S,
    /// `(l, a_l)` for the nonzero even-index coefficients
    pub a: Vec<(usize, S)>,
}

impl<S: Scalar> MapCoeffs<S> {
    pub fn new(p: &MapParams, proto: &S) -> Self {
        MapCoeffs {
            n: p.n as usize,
            k: p.k as usize,
            c: p.c_like(proto),
            delta: proto.from_c64_like(p.delta),
            a: p.a.iter().map(|(&l, &v)| (l as usize, proto.from_c64_like(v))).collect(),
        }
    }

    pub fn lift<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MapCoeffs<T> {
        MapCoeffs {
            n: self.n,
            k: self.k,
            c: f(&self.c),
            delta: f(&self.delta),
            a: self.a.iter().map(|(l, v)| (*l, f(v))).collect(),
        }
    }

    /// Second component `-delta x + c y + sum a_l y^-l + y^-k` (no pole check).
    pub fn second(&self, x: &S, y: &S) -> S {
        let inv = y.one_like() / y.clone();
        let mut acc = -(self.delta.clone() * x.clone()) + self.c.clone() * y.clone();
        for (l, a) in &self.a {
            acc = acc + a.clone() * inv.powu(*l as u32);
        }
        acc + inv.powu(self.k as u32)
    }

    /// Algebraic inverse `((c X + sum a_l X^-l + X^-k - Y) / delta, X)`.
    pub fn inverse(&self, x: &S, y: &S) -> (S, S) {
        let inv = x.one_like() / x.clone();
        let mut acc = self.c.clone() * x.clone() - y.clone();
        for (l, a) in &self.a {
            acc = acc + a.clone() * inv.powu(*l as u32);
        }
        acc = acc + inv.powu(self.k as u32);
        (acc / self.delta.clone(), x.clone())
    }

    /// Degree `k+1` homogeneous form
    /// `[x0 x2^k : x2^(k+1) : x2^k(-delta x1 + c x2) + sum a_l x0^(l+1) x2^(k-l) + x0^(k+1)]`.
    pub fn proj(&self, p: &[S; 3]) -> [S; 3] {
        let [x0, x1, x2] = p;
        let k = self.k as u32;
        let x2k = x2.powu(k);
        let f0 = x0.clone() * x2k.clone();
        let f1 = x2k.clone() * x2.clone();
        let mut f2 = x2k * (-(self.delta.clone() * x1.clone()) + self.c.clone() * x2.clone());
        for (l, a) in &self.a {
            let l = *l as u32;
            f2 = f2 + a.clone() * x0.powu(l + 1) * x2.powu(k - l);
        }
        f2 = f2 + x0.powu(k + 1);
        [f0, f1, f2]
    }

    /// `[0, w_1, ..., w_(n-1)]` with `w_(n-1)` set to exactly zero once the
    /// residual is checked; index 0 is an unused placeholder.
    pub fn infinity_orbit(&self) -> Result<Vec<S>> {
        let zero = self.c.zero_like();
        let mut w = vec![zero.clone(), self.c.clone()];
        for s in 1..self.n.saturating_sub(1) {
            let prev = &w[s];
            if prev.is_negligible() || prev.value().norm() < ORBIT_TOL {
                return Err(Error::Periodicity { residual: 0.0 });
            }
            w.push(self.c.clone() - self.delta.clone() / prev.clone());
        }
        let last = w[self.n - 1].value().norm();
        if last >= ORBIT_TOL {
            return Err(Error::Periodicity { residual: last });
        }
        w[self.n - 1] = zero;
        Ok(w)
    }

    /// Constant and x-linear parts of the series `y^k / q` up to order `2k`.
    pub fn b_series(&self) -> (Vec<S>, Vec<S>) {
        let k = self.k;
        let zero = self.c.zero_like();
        // q = 1 + sum_l a_l y^(k-l) - delta x y^k + c y^(k+1), truncated at order k
        let mut qc = vec![zero.clone(); k + 1];
        let mut qx = vec![zero.clone(); k + 1];
        qc[0] = zero.one_like();
        for (l, a) in &self.a {
            qc[k - l] = qc[k - l].clone() + a.clone();
        }
        qx[k] = -self.delta.clone();
        // r = 1/q as (const, x-linear) pairs; x^2 terms cannot appear below order 2k
        let mut rc = vec![zero.clone(); k + 1];
        let mut rx = vec![zero.clone(); k + 1];
        rc[0] = zero.one_like();
        for m in 1..=k {
            let mut sc = zero.clone();
            let mut sx = zero.clone();
            for i in 1..=m {
                sc = sc + qc[i].clone() * rc[m - i].clone();
                sx = sx + qc[i].clone() * rx[m - i].clone() + qx[i].clone() * rc[m - i].clone();
            }
            rc[m] = -sc;
            rx[m] = -sx;
        }
        let mut b = vec![zero.clone(); k];
        let mut bx = vec![zero; k];
        b.extend(rc);
        bx.extend(rx);
        (b, bx)
    }
}

/// Double-precision evaluator with pole and overflow checks.
#[derive(Clone, Debug)]
pub struct Map {
    pub params: MapParams,
    pub coeffs: MapCoeffs<Complex64>,
}

impl Map {
    pub fn new(params: &MapParams) -> Self {
        Map { params: params.clone(), coeffs: MapCoeffs::new(params, &Complex64::new(0.0, 0.0)) }
    }

    pub fn f(&self, pt: AffinePoint) -> Result<AffinePoint> {
        if pt.y.norm() < POLE_TOL {
            return Err(Error::Pole(format!("|y| = {:e} at the pole line y = 0", pt.y.norm())));
        }
        let out = AffinePoint { x: pt.y, y: self.coeffs.second(&pt.x, &pt.y) };
        check_cap(out)
    }

    pub fn f_inverse(&self, pt: AffinePoint) -> Result<AffinePoint> {
        if pt.x.norm() < POLE_TOL {
            return Err(Error::Pole(format!("|x| = {:e} at the pole line x = 0", pt.x.norm())));
        }
        let (x, y) = self.coeffs.inverse(&pt.x, &pt.y);
        check_cap(AffinePoint { x, y })
    }

    pub fn f_proj(&self, pt: ProjPoint) -> Result<ProjPoint> {
        let p = pt.normalized()?;
        if p.approx_eq(&ProjPoint::new(0.0.into(), 1.0.into(), 0.0.into()), POLE_TOL) {
            return Err(Error::Indeterminacy("[0:1:0] is the point of indeterminacy".into()));
        }
        let img = self.coeffs.proj(&p.0);
        if img.iter().all(|z| z.norm() < POLE_TOL) {
            return Err(Error::Indeterminacy(format!("image of {:?} vanishes", p.0)));
        }
        ProjPoint(img).normalized()
    }
}

fn check_cap(p: AffinePoint) -> Result<AffinePoint> {
    if !p.is_finite() || p.x.norm() > MAGNITUDE_CAP || p.y.norm() > MAGNITUDE_CAP {
        return Err(Error::Overflow(format!("|f| exceeds {MAGNITUDE_CAP:e}")));
    }
    Ok(p)
}

pub fn eval_f(p: &MapParams, pt: AffinePoint) -> Result<AffinePoint> {
    Map::new(p).f(pt)
}

pub fn eval_f_inverse(p: &MapParams, pt: AffinePoint) -> Result<AffinePoint> {
    Map::new(p).f_inverse(pt)
}

pub fn eval_f_proj(p: &MapParams, pt: ProjPoint) -> Result<ProjPoint> {
    Map::new(p).f_proj(pt)
}

/// `{2 cos(j pi / n) : 0 < j < n, gcd(j, n) = 1}` in increasing `j`.
pub fn candidate_c(n: u32) -> Vec<f64> {
    candidate_indices(n).into_iter().map(|(_, c)| c).collect()
}

fn candidate_indices(n: u32) -> Vec<(u32, f64)> {
    let proto = Complex64::new(0.0, 0.0);
    (1..n)
        .filter(|&j| num_integer::gcd(j, n) == 1)
        .map(|j| (j, 2.0 * proto.cos_pi_ratio_like(j as i64, n as i64).re))
        .collect()
}

/// Admissible `(j, c)`: all candidates for even `n`, those with `w_* = 1` for odd `n`.
pub fn c_n_indices(n: u32) -> Vec<(u32, f64)> {
    let cands = candidate_indices(n);
    if n.is_multiple_of(2) {
        return cands;
    }
    cands
        .into_iter()
        .filter(|&(_, c)| {
            let w = raw_orbit(c, n);
            (w[((n - 1) / 2) as usize - 1] - 1.0).abs() < ORBIT_TOL
        })
        .collect()
}

pub fn compute_c_n(n: u32) -> Vec<f64> {
    c_n_indices(n).into_iter().map(|(_, c)| c).collect()
}

/// `[w_1, ..., w_(n-1)]` for `delta = 1` without any checks.
fn raw_orbit(c: f64, n: u32) -> Vec<f64> {
    let mut w = vec![c];
    for _ in 1..n.saturating_sub(1) {
        let last = *w.last().unwrap();
        w.push(c - 1.0 / last);
    }
    w
}

pub fn orbit_w(p: &MapParams) -> Result<InfinityOrbit> {
    let co = MapCoeffs::new(p, &Complex64::new(0.0, 0.0));
    let w = co.infinity_orbit()?;
    let w: Vec<Complex64> = w[1..].to_vec();
    let w_star = (p.n % 2 == 1).then(|| w[((p.n - 1) / 2) as usize - 1]);
    Ok(InfinityOrbit { w, w_star })
}

/// `q(x, y) = 1 + sum_j a_j y^(k-j) - delta x y^k + c y^(k+1)`.
pub fn q_poly(p: &MapParams, x: Complex64, y: Complex64) -> Complex64 {
    let co = MapCoeffs::new(p, &Complex64::new(0.0, 0.0));
    let k = co.k as i32;
    let mut q = Complex64::new(1.0, 0.0);
    for (l, a) in &co.a {
        q += a * y.powi(k - *l as i32);
    }
    q - co.delta * x * y.powi(k) + co.c * y.powi(k + 1)
}

pub fn b_coefficients(p: &MapParams) -> BCoefficients {
    let co = MapCoeffs::new(p, &Complex64::new(0.0, 0.0));
    let (b, b_x) = co.b_series();
    BCoefficients { b, b_x }
}
