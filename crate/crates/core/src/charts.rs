//! Local coordinates on the blowup tower over the two points at infinity.
//!
//! Limb `s` sits over `e_2 = [0:0:1]` for `s = 0` and over `[0:1:w_s]` for
//! `s >= 1`. On level `j` the chart has a fiber coordinate `u` and a
//! transverse coordinate `v`, and `v = 0` is the exceptional fiber `F_s^j`.
//!
//! * `j = 1`: `(u, v) = (eta_1, t_1)`, base point `(t, x) = (t_1, t_1 eta_1)`
//!   (or `y = w_s + t_1 eta_1`);
//! * `j >= 2`: `(u, v) = (xi_j, x_j)` with `x_j = eta_1`, `t_1 = xi_2 x_2`
//!   and `xi_i = xi_(i+1) x + beta(s, i)`.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::{argmax_modulus, MapCoeffs, POLE_TOL};
use crate::params::MapParams;
use crate::scalar::{chart_precision, BigComplex, Jet, Scalar};

pub const DEFAULT_EPS: [f64; 3] = [1e-3, 1e-4, 1e-5];
/// Transverse offset used when a parabolic probe starts on a fiber.
pub const EPS_PROBE: f64 = 1e-16;
pub const EXTRAPOLATION_TOL: f64 = 1e-8;

/// A coordinate chart of the blown-up surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChartId {
    /// `(x, y) -> [1 : x : y]`; `v = 0` is `Sigma_2 = {y = 0}`
    Sigma2,
    /// `(y, x) -> [1 : x : y]`; `v = 0` is `Sigma_1 = {x = 0}`
    Sigma1,
    /// pre-blowup chart: `s = 0` is `(x, t) -> [t : x : 1]`, `s >= 1` is `(y, t) -> [t : 1 : y]`
    Base {
        s: usize,
    },
    Fiber {
        s: usize,
        j: usize,
    },
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartId::Sigma2 => write!(f, "Sigma2"),
            ChartId::Sigma1 => write!(f, "Sigma1"),
            ChartId::Base { s } => write!(f, "base{s}"),
            ChartId::Fiber { s, j } => write!(f, "F{s}^{j}"),
        }
    }
}

/// Fibers serialize as `[s, j]`, the other charts by name.
impl Serialize for ChartId {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ChartId::Fiber { s, j } => [*s, *j].serialize(ser),
            other => ser.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChartPoint {
    pub u: Complex64,
    pub v: Complex64,
}

impl ChartPoint {
    pub fn new(u: Complex64, v: Complex64) -> Self {
        ChartPoint { u, v }
    }
}

/// Blowup centers `beta(s, j)`: the point of `F_s^j` blown up to create
/// `F_s^(j+1)`, for `2 <= j <= 2k`.
#[derive(Clone, Debug)]
pub struct CenterTable<S> {
    /// `[_, w_1, ..., w_(n-1)]`
    pub w: Vec<S>,
    /// `[b_0, ..., b_2k]`
    pub b: Vec<S>,
    beta: Vec<Vec<S>>,
}

impl<S: Scalar> CenterTable<S> {
    pub fn new(co: &MapCoeffs<S>) -> Result<Self> {
        let (n, k) = (co.n, co.k);
        let w = co.infinity_orbit()?;
        let (b, _) = co.b_series();
        let zero = co.c.zero_like();
        let mut beta = vec![vec![zero.clone(); 2 * k + 1]; n];
        for (s, row) in beta.iter_mut().enumerate() {
            let prod = (1..s).fold(zero.one_like(), |acc, i| acc * w[i].clone());
            for (j, slot) in row.iter_mut().enumerate().skip(2) {
                *slot = if s == 0 {
                    b[j - 1].clone()
                } else {
                    let sign = if (j - 1) % 2 == 0 { zero.one_like() } else { -zero.one_like() };
                    sign * prod.powu(j as u32 - 2) * b[j - 1].clone()
                };
            }
        }
        Ok(CenterTable { w, b, beta })
    }

    pub fn beta(&self, s: usize, j: usize) -> &S {
        &self.beta[s][j]
    }

    /// Overrides one center; only useful to show that the checks notice.
    pub fn set(&mut self, s: usize, j: usize, value: S) {
        self.beta[s][j] = value;
    }
}

pub fn center_table(p: &MapParams) -> Result<CenterTable<Complex64>> {
    CenterTable::new(&MapCoeffs::new(p, &Complex64::new(0.0, 0.0)))
}

/// Charts and the map at one working precision.
#[derive(Clone, Debug)]
pub struct Tower<S> {
    pub coeffs: MapCoeffs<S>,
    pub centers: CenterTable<S>,
}

fn checked_div<S: Scalar>(a: S, b: &S, what: &str) -> Result<S> {
    if b.is_negligible() {
        return Err(Error::ChartDomain(format!("{what} vanishes")));
    }
    Ok(a / b.clone())
}

impl<S: Scalar> Tower<S> {
    pub fn new(p: &MapParams, proto: &S) -> Result<Self> {
        let coeffs = MapCoeffs::new(p, proto);
        let centers = CenterTable::new(&coeffs)?;
        Ok(Tower { coeffs, centers })
    }

    pub fn from_coeffs(coeffs: MapCoeffs<S>) -> Result<Self> {
        let centers = CenterTable::new(&coeffs)?;
        Ok(Tower { coeffs, centers })
    }

    fn check_id(&self, id: ChartId) -> Result<()> {
        let (n, k) = (self.coeffs.n, self.coeffs.k);
        let ok = match id {
            ChartId::Base { s } => s < n,
            ChartId::Fiber { s, j } => s < n && (1..=2 * k + 1).contains(&j),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("chart {id} out of range for n={n}, k={k}")))
        }
    }

    /// Homogeneous coordinates of a chart point.
    pub fn chart_to_plane(&self, id: ChartId, u: &S, v: &S) -> [S; 3] {
        let one = u.one_like();
        match id {
            ChartId::Sigma2 => [one, u.clone(), v.clone()],
            ChartId::Sigma1 => [one, v.clone(), u.clone()],
            ChartId::Base { s: 0 } => [v.clone(), u.clone(), one],
            ChartId::Base { .. } => [v.clone(), one, u.clone()],
            ChartId::Fiber { s, j } => {
                let (t, eta) = if j == 1 {
                    (v.clone(), u.clone())
                } else {
                    let x = v.clone();
                    let mut xi = u.clone();
                    for i in (2..j).rev() {
                        xi = xi * x.clone() + self.centers.beta(s, i).clone();
                    }
                    (xi * x.clone(), x)
                };
                let te = t.clone() * eta;
                if s == 0 {
                    [t, te, one]
                } else {
                    [t, one, self.centers.w[s].clone() + te]
                }
            }
        }
    }

    /// Inverse of [`Tower::chart_to_plane`].
    pub fn plane_to_chart(&self, id: ChartId, p: &[S; 3]) -> Result<(S, S)> {
        let [x0, x1, x2] = p;
        match id {
            ChartId::Sigma2 => Ok((checked_div(x1.clone(), x0, "X0")?, checked_div(x2.clone(), x0, "X0")?)),
            ChartId::Sigma1 => Ok((checked_div(x2.clone(), x0, "X0")?, checked_div(x1.clone(), x0, "X0")?)),
            ChartId::Base { s: 0 } => Ok((checked_div(x1.clone(), x2, "X2")?, checked_div(x0.clone(), x2, "X2")?)),
            ChartId::Base { .. } => Ok((checked_div(x2.clone(), x1, "X1")?, checked_div(x0.clone(), x1, "X1")?)),
            ChartId::Fiber { s, j } => {
                let (t, eta) = if s == 0 {
                    let t = checked_div(x0.clone(), x2, "X2")?;
                    let x = checked_div(x1.clone(), x2, "X2")?;
                    let eta = checked_div(x, &t, "t")?;
                    (t, eta)
                } else {
                    let t = checked_div(x0.clone(), x1, "X1")?;
                    let y = checked_div(x2.clone(), x1, "X1")?;
                    let eta = checked_div(y - self.centers.w[s].clone(), &t, "t")?;
                    (t, eta)
                };
                if j == 1 {
                    return Ok((eta, t));
                }
                let mut xi = checked_div(t, &eta, "eta")?;
                for i in 2..j {
                    xi = checked_div(xi - self.centers.beta(s, i).clone(), &eta, "eta")?;
                }
                Ok((xi, eta))
            }
        }
    }

    /// Image of a plane point, rescaled by its largest coordinate.
    pub fn apply(&self, p: &[S; 3]) -> Result<[S; 3]> {
        let img = self.coeffs.proj(p);
        normalize(img)
    }

    /// One application of `f` followed by the chart the cycle scheme
    /// prescribes (or the largest-coordinate chart off the scheme).
    pub fn step(&self, id: ChartId, u: &S, v: &S) -> Result<(ChartId, S, S)> {
        let img = self.apply(&self.chart_to_plane(id, u, v))?;
        let target = scheme_target(self.coeffs.n, self.coeffs.k, id).unwrap_or_else(|| plane_chart(&img));
        let (u2, v2) = self.plane_to_chart(target, &img)?;
        Ok((target, u2, v2))
    }
}

fn normalize<S: Scalar>(p: [S; 3]) -> Result<[S; 3]> {
    let i = argmax_modulus(&p);
    if p[i].is_negligible() {
        return Err(Error::Indeterminacy("all homogeneous coordinates vanish".into()));
    }
    let d = p[i].clone();
    Ok(p.map(|x| x / d.clone()))
}

/// The standard affine chart in which the largest coordinate is 1.
fn plane_chart<S: Scalar>(p: &[S; 3]) -> ChartId {
    match argmax_modulus(p) {
        0 => ChartId::Sigma2,
        1 => ChartId::Base { s: 1 },
        _ => ChartId::Base { s: 0 },
    }
}

/// Target chart of a fiber under `f` in the cycle scheme.
pub fn scheme_target(n: usize, k: usize, id: ChartId) -> Option<ChartId> {
    match id {
        ChartId::Sigma2 => Some(ChartId::Fiber { s: 0, j: 2 * k + 1 }),
        ChartId::Fiber { s, j } if s + 1 < n => Some(ChartId::Fiber { s: s + 1, j }),
        ChartId::Fiber { j: 1, .. } => Some(ChartId::Fiber { s: 0, j: 1 }),
        ChartId::Fiber { j, .. } if j <= 2 * k => Some(ChartId::Fiber { s: 0, j: 2 * k + 2 - j }),
        ChartId::Fiber { .. } => Some(ChartId::Sigma1),
        _ => None,
    }
}

pub fn chart_to_plane(p: &MapParams, id: ChartId, pt: ChartPoint) -> Result<crate::ProjPoint> {
    let t = Tower::new(p, &Complex64::new(0.0, 0.0))?;
    t.check_id(id)?;
    Ok(crate::ProjPoint(t.chart_to_plane(id, &pt.u, &pt.v)))
}

pub fn plane_to_chart(p: &MapParams, id: ChartId, pt: &crate::ProjPoint) -> Result<ChartPoint> {
    let t = Tower::new(p, &Complex64::new(0.0, 0.0))?;
    t.check_id(id)?;
    let (u, v) = t.plane_to_chart(id, &pt.0)?;
    Ok(ChartPoint { u, v })
}

fn require_unit_jacobian(p: &MapParams, what: &str) -> Result<()> {
    if p.delta_is_one() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{what} is derived for delta = 1 only")))
    }
}

fn pole_guard(den: Complex64, what: &str) -> Result<Complex64> {
    if den.norm() < POLE_TOL {
        Err(Error::Pole(format!("{what} at a pole of the fiber transition")))
    } else {
        Ok(den)
    }
}

/// Closed-form fiber transitions of the cycle scheme (`delta = 1`).
///
/// Returns the target chart and the fiber coordinate there. For
/// `F_(n-1)^(2k+1)` the target is `Sigma_1` with coordinate `y`; for
/// `Sigma_2` the input is the `x` coordinate of the point.
pub fn fiber_transition_closed(p: &MapParams, id: ChartId, xi: Complex64) -> Result<(ChartId, Complex64)> {
    require_unit_jacobian(p, "the closed transition table")?;
    let ct = center_table(p)?;
    transition_closed_with(&ct, p.n as usize, p.k as usize, id, xi)
}

fn transition_closed_with(
    ct: &CenterTable<Complex64>,
    n: usize,
    k: usize,
    id: ChartId,
    xi: Complex64,
) -> Result<(ChartId, Complex64)> {
    let target = scheme_target(n, k, id)
        .ok_or_else(|| Error::ChartDomain(format!("{id} is not a fiber of the cycle scheme")))?;
    let b = &ct.b;
    let one = Complex64::new(1.0, 0.0);
    let out = match id {
        ChartId::Sigma2 => xi + b[2 * k],
        ChartId::Fiber { s, j } if s + 1 < n => {
            if s == 0 {
                // (-1)^(1-j) for j >= 2, and -1 on the first fiber
                if j == 1 || j % 2 == 0 {
                    -xi
                } else {
                    xi
                }
            } else {
                let w = ct.w[s];
                if j == 1 {
                    xi / pole_guard(w, "w_s = 0")?
                } else {
                    w.powu(j as u32 - 2) * xi
                }
            }
        }
        ChartId::Fiber { j, .. } => {
            if j == 1 {
                xi
            } else if j == k + 1 {
                xi / pole_guard(xi - one, "xi = 1")?
            } else if j < k + 1 {
                let l = k + 1 - j;
                b[k + l] + one / pole_guard(xi, "xi = 0")?
            } else if j <= 2 * k {
                let l = j - k - 1;
                one / pole_guard(xi - b[k + l], "xi = b_(k+l)")?
            } else {
                xi - b[2 * k]
            }
        }
        _ => unreachable!("scheme_target returned a chart"),
    };
    Ok((target, out))
}

/// Poles of the closed transition out of `id` (empty off the last limb).
pub fn transition_poles(p: &MapParams, id: ChartId) -> Vec<Complex64> {
    let (n, k) = (p.n as usize, p.k as usize);
    let Ok(ct) = center_table(p) else { return Vec::new() };
    match id {
        ChartId::Fiber { s, j } if s + 1 == n && j >= 2 && j <= 2 * k => {
            if j == k + 1 {
                vec![Complex64::new(1.0, 0.0)]
            } else if j < k + 1 {
                vec![Complex64::new(0.0, 0.0)]
            } else {
                vec![ct.b[j - 1]]
            }
        }
        _ => Vec::new(),
    }
}

/// Neville evaluation at 0 of the interpolant through `(x_i, y_i)`.
pub fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut p = ys.to_vec();
    let m = xs.len();
    for level in 1..m {
        for i in 0..m - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (p[i] * xj - p[i + 1] * xi) / (xj - xi);
        }
    }
    p[0]
}

/// Result of a numerical transition: the limit of the image fiber
/// coordinate as the transverse offset goes to 0.
#[derive(Clone, Debug, Serialize)]
pub struct NumericTransition {
    pub target: ChartId,
    pub xi: Complex64,
    /// image transverse coordinate at the smallest offset
    pub v_image: Complex64,
    /// extrapolants with and without the largest offset differ by this much
    pub gap: f64,
    /// offsets actually used (the input, possibly extended)
    pub eps: Vec<f64>,
    pub samples: Vec<Complex64>,
}

fn extrapolate(
    eps_seq: &[f64],
    samples: Vec<Complex64>,
    target: ChartId,
    v_image: Complex64,
) -> Result<NumericTransition> {
    let all = neville_at_zero(eps_seq, &samples);
    let gap = if eps_seq.len() > 1 {
        // drop the largest offset
        let imax = (0..eps_seq.len()).max_by(|&a, &b| eps_seq[a].total_cmp(&eps_seq[b])).unwrap();
        let xs: Vec<f64> = eps_seq.iter().enumerate().filter(|&(i, _)| i != imax).map(|(_, &x)| x).collect();
        let ys: Vec<Complex64> = samples.iter().enumerate().filter(|&(i, _)| i != imax).map(|(_, &y)| y).collect();
        (all - neville_at_zero(&xs, &ys)).norm()
    } else {
        0.0
    };
    if gap.is_nan() || gap >= EXTRAPOLATION_TOL * (1.0 + all.norm()) {
        return Err(Error::Extrapolation { gap });
    }
    Ok(NumericTransition { target, xi: all, v_image, gap, eps: eps_seq.to_vec(), samples })
}

/// Smallest offset the adaptive extension may reach.
pub const EPS_FLOOR: f64 = 1e-9;

fn big_tower(p: &MapParams, eps_seq: &[f64]) -> Result<(Tower<BigComplex>, BigComplex)> {
    let eps_min = eps_seq.iter().cloned().fold(f64::INFINITY, f64::min);
    if eps_seq.is_empty() || eps_min.is_nan() || eps_min <= 0.0 {
        return Err(Error::InvalidParams("epsilon sequence must be positive and nonempty".into()));
    }
    let proto = BigComplex::new(chart_precision(p.k, eps_min.min(EPS_FLOOR)), Complex64::new(0.0, 0.0));
    Ok((Tower::new(p, &proto)?, proto))
}

/// Samples `sample(eps)` on `eps_seq` and extrapolates to 0. When the two
/// highest-order extrapolants disagree, further offsets (each a tenth of the
/// last) are appended down to `EPS_FLOOR` before giving up.
fn sample_and_extrapolate(
    eps_seq: &[f64],
    target: ChartId,
    mut sample: impl FnMut(f64) -> Result<(Complex64, Complex64)>,
) -> Result<NumericTransition> {
    let mut eps: Vec<f64> = eps_seq.to_vec();
    let mut samples = Vec::new();
    let mut v_image = Complex64::new(0.0, 0.0);
    for &e in &eps {
        let (u, v) = sample(e)?;
        samples.push(u);
        v_image = v;
    }
    loop {
        match extrapolate(&eps, samples.clone(), target, v_image) {
            Ok(mut r) => {
                r.eps = eps;
                return Ok(r);
            }
            Err(err) => {
                let next = eps.iter().cloned().fold(f64::INFINITY, f64::min) / 10.0;
                if next < EPS_FLOOR * 0.999 {
                    return Err(err);
                }
                let (u, v) = sample(next)?;
                eps.push(next);
                samples.push(u);
                v_image = v;
            }
        }
    }
}

/// Lifts `(xi, eps)` to the plane, applies `f` and reads the image in the
/// target chart, then extrapolates `eps -> 0`.
pub fn fiber_transition_numeric(
    p: &MapParams,
    id: ChartId,
    xi: Complex64,
    eps_seq: &[f64],
) -> Result<NumericTransition> {
    let (tower, proto) = big_tower(p, eps_seq)?;
    tower.check_id(id)?;
    let target = scheme_target(tower.coeffs.n, tower.coeffs.k, id)
        .ok_or_else(|| Error::ChartDomain(format!("{id} is not a fiber of the cycle scheme")))?;
    let u = proto.from_c64_like(xi);
    sample_and_extrapolate(eps_seq, target, |e| {
        let v = proto.from_c64_like(Complex64::new(e, 0.0));
        let img = tower.apply(&tower.chart_to_plane(id, &u, &v))?;
        let (u2, v2) = tower.plane_to_chart(target, &img)?;
        Ok((u2.value(), v2.value()))
    })
}

/// `rho(x, y) = (y, x)` on fibers: limb `s` goes to limb `n-1-s`, level `j`
/// is kept, and the fiber coordinate is multiplied by this factor.
pub fn rho_multiplier(p: &MapParams, s: usize, j: usize) -> Result<Complex64> {
    require_unit_jacobian(p, "the reflection multiplier")?;
    let n = p.n as usize;
    if s == 0 || s + 1 == n {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let ct = center_table(p)?;
    let w = ct.w[n - 1 - s];
    Ok(if j == 1 { -w } else { -(-w).powi(2 - j as i32) })
}

/// Numerical image of a fiber point under `rho`.
pub fn rho_transition_numeric(
    p: &MapParams,
    s: usize,
    j: usize,
    xi: Complex64,
    eps_seq: &[f64],
) -> Result<NumericTransition> {
    let (tower, proto) = big_tower(p, eps_seq)?;
    let id = ChartId::Fiber { s, j };
    tower.check_id(id)?;
    let target = ChartId::Fiber { s: tower.coeffs.n - 1 - s, j };
    let u = proto.from_c64_like(xi);
    sample_and_extrapolate(eps_seq, target, |e| {
        let v = proto.from_c64_like(Complex64::new(e, 0.0));
        let [x0, x1, x2] = tower.chart_to_plane(id, &u, &v);
        let (u2, v2) = tower.plane_to_chart(target, &[x0, x2, x1])?;
        Ok((u2.value(), v2.value()))
    })
}

/// One closed-vs-numeric comparison.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionRecord {
    pub chart: ChartId,
    pub target: ChartId,
    pub xi: [f64; 2],
    pub closed: [f64; 2],
    pub numeric: [f64; 2],
    pub abs_err: f64,
}

pub fn compare_transition(p: &MapParams, id: ChartId, xi: Complex64, eps_seq: &[f64]) -> Result<TransitionRecord> {
    let (target, closed) = fiber_transition_closed(p, id, xi)?;
    let num = fiber_transition_numeric(p, id, xi, eps_seq)?;
    Ok(TransitionRecord {
        chart: id,
        target,
        xi: [xi.re, xi.im],
        closed: [closed.re, closed.im],
        numeric: [num.xi.re, num.xi.im],
        abs_err: (closed - num.xi).norm(),
    })
}

/// Every chart with a closed transition: all fibers and the `Sigma_2` entry.
pub fn scheme_charts(n: usize, k: usize) -> Vec<ChartId> {
    let mut out = vec![ChartId::Sigma2];
    for s in 0..n {
        for j in 1..=2 * k + 1 {
            out.push(ChartId::Fiber { s, j });
        }
    }
    out
}

/// A random point in the annulus `r0 <= |z| <= r1`.
fn annulus_point(rng: &mut ChaCha8Rng, r0: f64, r1: f64, real: bool) -> Complex64 {
    let r = rng.gen_range(r0..r1);
    if real {
        if rng.gen_bool(0.5) {
            Complex64::new(r, 0.0)
        } else {
            Complex64::new(-r, 0.0)
        }
    } else {
        Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    }
}

/// Closed vs numeric transitions on `samples` random points of every chart.
pub fn transition_suite(p: &MapParams, samples: usize, seed: u64) -> Result<Vec<TransitionRecord>> {
    require_unit_jacobian(p, "the transition suite")?;
    let (n, k) = (p.n as usize, p.k as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for id in scheme_charts(n, k) {
        let poles = transition_poles(p, id);
        let mut got = 0;
        let mut tries = 0;
        while got < samples && tries < 50 * samples {
            tries += 1;
            let xi = annulus_point(&mut rng, 0.5, 2.0, p.is_real());
            if poles.iter().any(|q| (xi - q).norm() < 0.05) {
                continue;
            }
            let (_, img) = fiber_transition_closed(p, id, xi)?;
            if img.norm() > 1e3 {
                continue;
            }
            out.push(compare_transition(p, id, xi, &DEFAULT_EPS)?);
            got += 1;
        }
    }
    Ok(out)
}

/// Checks that the blowup centers are carried to each other.
#[derive(Clone, Debug, Serialize)]
pub struct CenterOrbitCheck {
    /// value on `F_(n-1)^(k+1)` reached from `b_k = 1` on `F_0^(k+1)`
    pub end_value: [f64; 2],
    /// `beta(n-1, k+1)`
    pub expected: [f64; 2],
    pub residual: f64,
    /// largest `|T(beta(s, j)) - beta(s+1, j)|` for `s < n-1`, `2 <= j <= 2k`
    pub propagation_error: f64,
    pub holds: bool,
}

pub fn center_orbit_check(p: &MapParams) -> Result<CenterOrbitCheck> {
    require_unit_jacobian(p, "the center orbit")?;
    center_orbit_with(&center_table(p)?, p.n as usize, p.k as usize)
}

pub fn center_orbit_with(ct: &CenterTable<Complex64>, n: usize, k: usize) -> Result<CenterOrbitCheck> {
    let mut xi = *ct.beta(0, k + 1);
    for s in 0..n - 1 {
        xi = transition_closed_with(ct, n, k, ChartId::Fiber { s, j: k + 1 }, xi)?.1;
    }
    let expected = *ct.beta(n - 1, k + 1);
    let residual = (xi - expected).norm();
    let mut propagation_error: f64 = 0.0;
    for s in 0..n - 1 {
        for j in 2..=2 * k {
            let (_, img) = transition_closed_with(ct, n, k, ChartId::Fiber { s, j }, *ct.beta(s, j))?;
            propagation_error = propagation_error.max((img - ct.beta(s + 1, j)).norm());
        }
    }
    Ok(CenterOrbitCheck {
        end_value: [xi.re, xi.im],
        expected: [expected.re, expected.im],
        residual,
        propagation_error,
        holds: residual < 1e-8 && propagation_error < 1e-8 && (expected - 1.0).norm() < 1e-8,
    })
}

/// `Df^m` at a chart point, through the charts the orbit visits.
#[derive(Clone, Debug, Serialize)]
pub struct ParabolicResult {
    pub start: ChartId,
    pub path: Vec<ChartId>,
    pub iterations: usize,
    /// `|f^m(pt) - pt|` in the start chart (infinite when the orbit ends elsewhere)
    pub fixed_residual: f64,
    /// rows of `Df^m` in the start chart coordinates `(u, v)`
    pub df: [[Complex64; 2]; 2],
    /// `max |Df^m - Id|` entrywise
    pub deviation: f64,
}

/// True for the components of the parabolic set: `Sigma_0` (given in a base
/// chart), `F_s^1` and `F_s^j` with `3 <= j <= 2k-1`.
pub fn in_parabolic_set(k: usize, id: ChartId) -> bool {
    match id {
        ChartId::Base { .. } => true,
        ChartId::Fiber { j, .. } => j == 1 || (3..=2 * k - 1).contains(&j),
        _ => false,
    }
}

/// `Df^m` by forward-mode differentiation at high precision. Fiber points
/// with `v = 0` are probed at `v = EPS_PROBE`, since `v = 0` itself is
/// blown down by the chart map.
pub fn parabolic_iterate(p: &MapParams, id: ChartId, pt: ChartPoint, m: usize) -> Result<ParabolicResult> {
    let on_fiber = matches!(id, ChartId::Fiber { .. });
    let v0 = if on_fiber && pt.v.norm() == 0.0 { Complex64::new(EPS_PROBE, 0.0) } else { pt.v };
    let prec = if on_fiber { chart_precision(p.k, EPS_PROBE) } else { 256 };
    let proto = Jet::constant(BigComplex::new(prec, Complex64::new(0.0, 0.0)));
    let tower = Tower::new(p, &proto)?;
    tower.check_id(id)?;
    let u_start = proto.v.from_c64_like(pt.u);
    let v_start = proto.v.from_c64_like(v0);
    let mut u = Jet::variable(u_start.clone(), 0);
    let mut v = Jet::variable(v_start.clone(), 1);
    let mut chart = id;
    let mut path = vec![id];
    for _ in 0..m {
        let (c2, u2, v2) = tower.step(chart, &u, &v)?;
        chart = c2;
        u = u2;
        v = v2;
        path.push(chart);
    }
    if chart != id && !on_fiber {
        // the same plane point read in the start chart
        let plane = tower.chart_to_plane(chart, &u, &v);
        let (u2, v2) = tower.plane_to_chart(id, &plane)?;
        u = u2;
        v = v2;
        chart = id;
    }
    let fixed_residual = if chart == id {
        (u.v.clone() - u_start).value().norm() + (v.v.clone() - v_start).value().norm()
    } else {
        f64::INFINITY
    };
    let df = [[u.d[0].value(), u.d[1].value()], [v.d[0].value(), v.d[1].value()]];
    let deviation = if chart == id {
        let one = Complex64::new(1.0, 0.0);
        [(df[0][0] - one).norm(), df[0][1].norm(), df[1][0].norm(), (df[1][1] - one).norm()]
            .into_iter()
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(ParabolicResult { start: id, path, iterations: m, fixed_residual, df, deviation })
}

/// `Df^(2n)` at a point of the parabolic set (or any chart point, report only).
pub fn parabolic_check(p: &MapParams, id: ChartId, pt: ChartPoint) -> Result<ParabolicResult> {
    parabolic_iterate(p, id, pt, 2 * p.n as usize)
}

/// Components of the parabolic set, each named by a representative chart.
pub fn parabolic_components(n: usize, k: usize) -> Vec<ChartId> {
    let mut out = vec![ChartId::Base { s: 0 }];
    for s in 0..n {
        out.push(ChartId::Fiber { s, j: 1 });
        for j in 3..=2 * k - 1 {
            out.push(ChartId::Fiber { s, j });
        }
    }
    out
}

/// Samples on `Sigma_0` are `[0 : x : 1]`; the closed orbit of `w = 1/x`
/// under `w -> c - 1/w` must stay away from the limb base points.
fn sigma0_sample_ok(ct: &CenterTable<Complex64>, c: Complex64, x: Complex64, n: usize) -> bool {
    let mut w = 1.0 / x;
    for _ in 0..2 * n {
        if w.norm() < 0.05 || w.norm() > 20.0 || ct.w.iter().skip(1).any(|ws| (w - ws).norm() < 0.05) {
            return false;
        }
        w = c - 1.0 / w;
    }
    true
}

/// The closed-form orbit of a fiber sample must avoid poles, centers and
/// large values for `2n` steps.
fn fiber_sample_ok(ct: &CenterTable<Complex64>, n: usize, k: usize, id: ChartId, xi: Complex64) -> bool {
    let mut chart = id;
    let mut z = xi;
    for _ in 0..2 * n {
        let ChartId::Fiber { s, j } = chart else { return false };
        let center = if j == 1 { Complex64::new(0.0, 0.0) } else { *ct.beta(s, j) };
        if (z - center).norm() < 0.05 || z.norm() > 1e3 {
            return false;
        }
        if s + 1 == n && j >= 2 {
            let pole = if j == k + 1 {
                Complex64::new(1.0, 0.0)
            } else if j < k + 1 {
                Complex64::new(0.0, 0.0)
            } else {
                ct.b[j - 1]
            };
            if (z - pole).norm() < 0.05 {
                return false;
            }
        }
        match transition_closed_with(ct, n, k, chart, z) {
            Ok((c2, z2)) => {
                chart = c2;
                z = z2;
            }
            Err(_) => return false,
        }
    }
    true
}

/// Per-component summary of the parabolic suite.
#[derive(Clone, Debug, Serialize)]
pub struct ParabolicComponent {
    pub chart: ChartId,
    pub samples: usize,
    pub max_fixed_residual: f64,
    pub max_deviation: f64,
    pub pass: bool,
}

/// `samples` random points on each component of the parabolic set;
/// `f^(2n)` must fix each within `1e-8` with `max |Df^(2n) - Id| <= 1e-6`.
pub fn parabolic_suite(p: &MapParams, samples: usize, seed: u64) -> Result<Vec<ParabolicComponent>> {
    require_unit_jacobian(p, "the parabolic suite")?;
    let (n, k) = (p.n as usize, p.k as usize);
    let ct = center_table(p)?;
    let c = Complex64::new(p.c_value(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for id in parabolic_components(n, k) {
        let mut max_fixed_residual: f64 = 0.0;
        let mut max_deviation: f64 = 0.0;
        let mut got = 0;
        let mut tries = 0;
        while got < samples && tries < 200 * samples {
            tries += 1;
            let z = annulus_point(&mut rng, 0.3, 2.0, p.is_real());
            let ok = match id {
                ChartId::Base { .. } => sigma0_sample_ok(&ct, c, z, n),
                _ => fiber_sample_ok(&ct, n, k, id, z),
            };
            if !ok {
                continue;
            }
            let r = parabolic_check(p, id, ChartPoint::new(z, Complex64::new(0.0, 0.0)))?;
            max_fixed_residual = max_fixed_residual.max(r.fixed_residual);
            max_deviation = max_deviation.max(r.deviation);
            got += 1;
        }
        out.push(ParabolicComponent {
            chart: id,
            samples: got,
            max_fixed_residual,
            max_deviation,
            pass: got == samples && max_fixed_residual < 1e-8 && max_deviation <= 1e-6,
        });
    }
    Ok(out)
}

/// `Df^n` on `Sigma_0` at sample points.
#[derive(Clone, Debug, Serialize)]
pub struct Sigma0Diagonal {
    pub samples: usize,
    pub max_fixed_residual: f64,
    pub max_off_diagonal: f64,
    /// largest distance of a diagonal entry from `{1, -1}`
    pub max_unit_deviation: f64,
    /// some entry is `1` at every sample
    pub has_unit: bool,
    pub pass: bool,
}

/// `Df^n` on `Sigma_0` is `diag(+-1, 1)` within `1e-6`.
pub fn sigma0_diagonal_suite(p: &MapParams, samples: usize, seed: u64) -> Result<Sigma0Diagonal> {
    require_unit_jacobian(p, "the Sigma_0 check")?;
    let n = p.n as usize;
    let ct = center_table(p)?;
    let c = Complex64::new(p.c_value(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Sigma0Diagonal {
        samples: 0,
        max_fixed_residual: 0.0,
        max_off_diagonal: 0.0,
        max_unit_deviation: 0.0,
        has_unit: true,
        pass: false,
    };
    let mut tries = 0;
    while out.samples < samples && tries < 200 * samples {
        tries += 1;
        let z = annulus_point(&mut rng, 0.3, 2.0, p.is_real());
        if !sigma0_sample_ok(&ct, c, z, n) {
            continue;
        }
        let r = parabolic_iterate(p, ChartId::Base { s: 0 }, ChartPoint::new(z, Complex64::new(0.0, 0.0)), n)?;
        let (a, d) = (r.df[0][0], r.df[1][1]);
        let unit = |e: Complex64| (e - 1.0).norm().min((e + 1.0).norm());
        out.max_fixed_residual = out.max_fixed_residual.max(r.fixed_residual);
        out.max_off_diagonal = out.max_off_diagonal.max(r.df[0][1].norm().max(r.df[1][0].norm()));
        out.max_unit_deviation = out.max_unit_deviation.max(unit(a).max(unit(d)));
        out.has_unit &= (a - 1.0).norm() < 1e-6 || (d - 1.0).norm() < 1e-6;
        out.samples += 1;
    }
    out.pass = out.samples == samples
        && out.max_fixed_residual < 1e-8
        && out.max_off_diagonal <= 1e-6
        && out.max_unit_deviation <= 1e-6
        && out.has_unit;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CSpec;
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn n4() -> MapParams {
        MapParams::default_for(4, 2).unwrap()
    }

    #[test]
    fn centers() {
        let p = MapParams::figure1();
        let ct = center_table(&p).unwrap();
        // b_4 = 1, b_6 = -a_2
        assert!((ct.beta(0, 5) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((ct.beta(1, 7) - c(2.64, 0.0)).norm() < 1e-12);
        assert!(ct.beta(0, 3).norm() == 0.0);
    }

    #[test]
    fn base_point_of_fibers() {
        let p = MapParams::figure1();
        let t = Tower::new(&p, &c(0.0, 0.0)).unwrap();
        for j in 1..=9 {
            let img = t.chart_to_plane(ChartId::Fiber { s: 0, j }, &c(0.7, 0.2), &c(0.0, 0.0));
            assert!(img[0].norm() == 0.0 && img[1].norm() == 0.0, "j={j}");
        }
        let img = t.chart_to_plane(ChartId::Fiber { s: 0, j: 1 }, &c(0.0, 0.0), &c(0.3, 0.0));
        assert_eq!(img, [c(0.3, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn round_trip_big() {
        let p = n4();
        let proto = BigComplex::new(600, c(0.0, 0.0));
        let t = Tower::new(&p, &proto).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for id in
            scheme_charts(4, 2).into_iter().chain([ChartId::Sigma1, ChartId::Base { s: 0 }, ChartId::Base { s: 2 }])
        {
            for _ in 0..100 {
                let u = proto.from_c64_like(annulus_point(&mut rng, 0.1, 3.0, false));
                let v = proto.from_c64_like(annulus_point(&mut rng, 1e-4, 1e-2, false));
                let (u2, v2) = t.plane_to_chart(id, &t.chart_to_plane(id, &u, &v)).unwrap();
                assert!((u2 - u.clone()).value().norm() < 1e-20 && (v2 - v).value().norm() < 1e-20, "{id}");
            }
        }
    }

    #[test]
    fn chart_domain_error_on_fiber() {
        let p = n4();
        let e2 = crate::ProjPoint([c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(plane_to_chart(&p, ChartId::Fiber { s: 0, j: 2 }, &e2), Err(Error::ChartDomain(_))));
    }

    #[test]
    fn lemma_examples() {
        let p = MapParams::figure1();
        let r = fiber_transition_numeric(&p, ChartId::Fiber { s: 0, j: 2 }, c(1.7, 0.0), &DEFAULT_EPS).unwrap();
        assert_eq!(r.target, ChartId::Fiber { s: 1, j: 2 });
        assert!((r.xi - c(-1.7, 0.0)).norm() < 1e-6);
        let b8 = center_table(&p).unwrap().b[8];
        let r = fiber_transition_numeric(&p, ChartId::Sigma2, c(0.3, 0.0), &DEFAULT_EPS).unwrap();
        assert!((r.xi - (c(0.3, 0.0) + b8)).norm() < 1e-6);
        // middle limb multiplier w_2 = sqrt(2) - 1/sqrt(2)... for n = 4, w_2^(j-2) at j = 3
        let p = n4();
        let (tgt, closed) = fiber_transition_closed(&p, ChartId::Fiber { s: 2, j: 3 }, c(2.0, 0.0)).unwrap();
        let w2 = center_table(&p).unwrap().w[2];
        assert_eq!(tgt, ChartId::Fiber { s: 3, j: 3 });
        assert!((closed - w2 * 2.0).norm() < 1e-14);
        let r = fiber_transition_numeric(&p, ChartId::Fiber { s: 2, j: 3 }, c(2.0, 0.0), &DEFAULT_EPS).unwrap();
        assert!((r.xi - closed).norm() < 1e-6);
    }

    #[test]
    fn closed_matches_numeric_everywhere() {
        for p in [MapParams::figure1(), n4(), MapParams::default_for(3, 2).unwrap()] {
            for rec in transition_suite(&p, 3, 11).unwrap() {
                assert!(rec.abs_err < 1e-6, "{rec:?}");
            }
        }
    }

    #[test]
    fn pole_of_last_limb() {
        let p = MapParams::figure1();
        let r = fiber_transition_closed(&p, ChartId::Fiber { s: 1, j: 5 }, c(1.0, 0.0));
        assert!(matches!(r, Err(Error::Pole(_))));
    }

    #[test]
    fn center_orbit_closes_and_detects_tampering() {
        for p in [MapParams::figure1(), n4(), MapParams::default_for(5, 2).unwrap()] {
            let chk = center_orbit_check(&p).unwrap();
            assert!(chk.holds, "{chk:?}");
        }
        let p = n4();
        let mut ct = center_table(&p).unwrap();
        ct.set(2, 3, c(0.5, 0.0));
        assert!(!center_orbit_with(&ct, 4, 2).unwrap().holds);
    }

    #[test]
    fn sigma0_is_parabolic() {
        let p = n4();
        let r = parabolic_iterate(&p, ChartId::Base { s: 0 }, ChartPoint::new(c(0.37, 0.1), c(0.0, 0.0)), 4).unwrap();
        assert!(r.fixed_residual < 1e-12);
        assert!(r.df[0][1].norm() < 1e-12 && r.df[1][0].norm() < 1e-12);
        // diagonal with entries +-1, one of them 1
        let (a, d) = (r.df[0][0], r.df[1][1]);
        assert!((a.re.abs() - 1.0).abs() < 1e-10 && (d.re.abs() - 1.0).abs() < 1e-10);
        assert!((a - 1.0).norm() < 1e-10 || (d - 1.0).norm() < 1e-10);
        let r = parabolic_check(&p, ChartId::Base { s: 0 }, ChartPoint::new(c(0.37, 0.1), c(0.0, 0.0))).unwrap();
        assert!(r.deviation < 1e-10);
        assert!(sigma0_diagonal_suite(&p, 10, 3).unwrap().pass);
    }

    #[test]
    fn fibers_are_parabolic() {
        let p = MapParams::figure1();
        for id in [ChartId::Fiber { s: 0, j: 1 }, ChartId::Fiber { s: 1, j: 3 }, ChartId::Fiber { s: 0, j: 7 }] {
            let r = parabolic_check(&p, id, ChartPoint::new(c(0.37, 0.0), c(0.0, 0.0))).unwrap();
            assert!(r.fixed_residual < 1e-8 && r.deviation < 1e-6, "{id}: {r:?}");
        }
    }

    #[test]
    fn rho_multipliers() {
        let p = n4();
        for (s, j) in [(1, 1), (1, 3), (2, 4), (0, 2), (3, 5)] {
            let want = rho_multiplier(&p, s, j).unwrap() * 1.7;
            let got = rho_transition_numeric(&p, s, j, c(1.7, 0.0), &DEFAULT_EPS).unwrap();
            assert!((got.xi - want).norm() < 1e-6, "({s},{j}) {got:?} vs {want}");
        }
    }

    #[test]
    fn rejects_general_delta_in_closed_table() {
        // c = 2, delta = 4 gives w_2 = c - delta/c = 0 for n = 3
        let p = MapParams::with_delta(3, 2, CSpec::Explicit(2.0), BTreeMap::new(), c(4.0, 0.0)).unwrap();
        let r = fiber_transition_closed(&p, ChartId::Fiber { s: 0, j: 1 }, c(1.0, 0.0));
        assert!(matches!(r, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn neville_exact_on_quadratics() {
        let xs = [1e-3, 1e-4, 1e-5];
        let ys: Vec<Complex64> = xs.iter().map(|x| c(2.0 + 3.0 * x - x * x, 0.0)).collect();
        assert!((neville_at_zero(&xs, &ys) - c(2.0, 0.0)).norm() < 1e-12);
    }
}
