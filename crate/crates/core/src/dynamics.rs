//! Fixed points, multipliers, orbits and invariant manifolds in the plane.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{AffinePoint, Map, MapCoeffs};
use crate::params::MapParams;
use crate::roots;
use crate::scalar::Jet;

pub const FIXED_TOL: f64 = 1e-10;
pub const CLASSIFY_MARGIN: f64 = 1e-9;
pub const CLUSTER_SEP: f64 = 1e-7;
pub const FD_STEP: f64 = 1e-6;
pub const RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedPointType {
    Saddle,
    Elliptic,
    Parabolic,
    /// non-real `zeta`, or complex parameters
    Complex,
}

/// A fixed point `(zeta, zeta)` with its multipliers.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointRecord {
    pub zeta: Complex64,
    pub trace: Complex64,
    pub eigenvalues: [Complex64; 2],
    #[serde(rename = "type")]
    pub kind: FixedPointType,
    /// size of the root cluster this root belongs to
    pub multiplicity: usize,
    /// `|f(p) - p|`
    pub residual: f64,
}

impl FixedPointRecord {
    pub fn point(&self) -> AffinePoint {
        AffinePoint::new(self.zeta, self.zeta)
    }

    pub fn is_real(&self) -> bool {
        self.zeta.im == 0.0
    }
}

/// Coefficients (constant term first) of
/// `(1 + delta - c) z^(k+1) - sum_j a_j z^(k-j) - 1`.
pub fn fixed_point_polynomial(p: &MapParams) -> Result<Vec<Complex64>> {
    let co = MapCoeffs::new(p, &Complex64::new(0.0, 0.0));
    let k = co.k;
    let lead = 1.0 + co.delta - co.c;
    if lead.norm() < 1e-14 {
        return Err(Error::Degenerate("c = 1 + delta: the fixed point equation drops degree".into()));
    }
    let mut poly = vec![Complex64::new(0.0, 0.0); k + 2];
    poly[0] = Complex64::new(-1.0, 0.0);
    for (l, a) in &co.a {
        poly[k - l] -= a;
    }
    poly[k + 1] = lead;
    Ok(poly)
}

/// Trace of `Df` at `(x, y)`: `c - sum l a_l y^(-l-1) - k y^(-k-1)`.
pub fn trace_at(co: &MapCoeffs<Complex64>, y: Complex64) -> Complex64 {
    let mut t = co.c;
    for (l, a) in &co.a {
        t -= a * (*l as f64) * y.powi(-(*l as i32) - 1);
    }
    t - (co.k as f64) * y.powi(-(co.k as i32) - 1)
}

fn classify(trace: Complex64, zeta: Complex64, real_params: bool) -> FixedPointType {
    if !real_params || zeta.im != 0.0 {
        return FixedPointType::Complex;
    }
    let t = trace.re.abs();
    if t < 2.0 - CLASSIFY_MARGIN {
        FixedPointType::Elliptic
    } else if t > 2.0 + CLASSIFY_MARGIN {
        FixedPointType::Saddle
    } else {
        FixedPointType::Parabolic
    }
}

/// The `k+1` fixed points with multiplicity, sorted by `(Re, Im)`.
pub fn fixed_points(p: &MapParams) -> Result<Vec<FixedPointRecord>> {
    let poly = fixed_point_polynomial(p)?;
    let map = Map::new(p);
    let mut zs = roots::aberth(&poly);
    let real_params = p.is_real();
    // snap numerically real roots of real polynomials onto the real axis
    if real_params {
        for z in zs.iter_mut() {
            if z.im.abs() < 1e-12 * z.norm().max(1.0) {
                *z = Complex64::new(z.re, 0.0);
            }
        }
    }
    roots::sort_lex(&mut zs);
    let clusters = roots::cluster(&zs, CLUSTER_SEP);
    let mut out = Vec::with_capacity(zs.len());
    for z in zs {
        let pt = AffinePoint::new(z, z);
        let img = map.f(pt)?;
        let residual = img.dist(&pt);
        let trace = trace_at(&map.coeffs, z);
        let disc = (trace * trace - 4.0 * map.coeffs.delta).sqrt();
        let eigenvalues = [(trace + disc) / 2.0, (trace - disc) / 2.0];
        let multiplicity = clusters.iter().find(|(c, _)| (c - z).norm() < CLUSTER_SEP).map_or(1, |&(_, m)| m);
        out.push(FixedPointRecord {
            zeta: z,
            trace,
            eigenvalues,
            kind: classify(trace, z, real_params),
            multiplicity,
            residual,
        });
    }
    Ok(out)
}

/// `Df` at a point: `[[0, 1], [-delta, d f_2/dy]]`.
pub fn jacobian(p: &MapParams, pt: AffinePoint) -> Result<[[Complex64; 2]; 2]> {
    let map = Map::new(p);
    if pt.y.norm() < crate::family::POLE_TOL {
        return Err(Error::Pole("jacobian on the pole line y = 0".into()));
    }
    Ok([[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], [-map.coeffs.delta, trace_at(&map.coeffs, pt.y)]])
}

/// `Df` by forward-mode differentiation of the map itself.
pub fn jacobian_dual(p: &MapParams, pt: AffinePoint) -> [[Complex64; 2]; 2] {
    let co = MapCoeffs::new(p, &Complex64::new(0.0, 0.0)).lift(|v| Jet::constant(*v));
    let x = Jet::variable(pt.x, 0);
    let y = Jet::variable(pt.y, 1);
    let f2 = co.second(&x, &y);
    [[y.d[0], y.d[1]], [f2.d[0], f2.d[1]]]
}

/// Matrices of `d tau_s / d a_l` at `a = 0` and their numerical rank.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRank {
    pub rank: usize,
    pub expected: usize,
    pub singular_values: Vec<f64>,
    /// max entrywise difference between analytic and finite-difference matrices
    pub fd_agreement: f64,
    /// the indices `l` of the columns
    pub columns: Vec<u32>,
}

fn traces_matched(p: &MapParams, base: &[Complex64]) -> Result<Vec<Complex64>> {
    let fps = fixed_points(p)?;
    let zs: Vec<Complex64> = fps.iter().map(|r| r.zeta).collect();
    let cost: Vec<Vec<f64>> = base.iter().map(|b| zs.iter().map(|z| (b - z).norm()).collect()).collect();
    let assign = hungarian(&cost);
    Ok(assign.iter().map(|&j| fps[j].trace).collect())
}

/// Rank of the trace map at `a = 0`, analytic `(k-l)/zeta^(l+1)` against
/// central differences with step `FD_STEP`.
pub fn trace_map_rank(p0: &MapParams) -> Result<TraceRank> {
    if !p0.a.is_empty() {
        return Err(Error::InvalidParams("trace_map_rank is taken at a = 0".into()));
    }
    let k = p0.k;
    let columns: Vec<u32> = (2..k.saturating_sub(1)).step_by(2).collect();
    let expected = (k / 2).saturating_sub(1) as usize;
    let fps = fixed_points(p0)?;
    let zs: Vec<Complex64> = fps.iter().map(|r| r.zeta).collect();
    let rows = zs.len();
    if columns.is_empty() {
        return Ok(TraceRank { rank: 0, expected, singular_values: Vec::new(), fd_agreement: 0.0, columns });
    }
    let analytic = DMatrix::from_fn(rows, columns.len(), |s, c| {
        let l = columns[c];
        Complex64::new((k - l) as f64, 0.0) / zs[s].powi(l as i32 + 1)
    });
    let mut fd = DMatrix::from_element(rows, columns.len(), Complex64::new(0.0, 0.0));
    for (c, &l) in columns.iter().enumerate() {
        let mut plus = p0.clone();
        plus.a.insert(l, Complex64::new(FD_STEP, 0.0));
        let mut minus = p0.clone();
        minus.a.insert(l, Complex64::new(-FD_STEP, 0.0));
        let tp = traces_matched(&plus, &zs)?;
        let tm = traces_matched(&minus, &zs)?;
        for s in 0..rows {
            fd[(s, c)] = (tp[s] - tm[s]) / (2.0 * FD_STEP);
        }
    }
    let fd_agreement = (&analytic - &fd).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let singular_values: Vec<f64> = analytic.clone().svd(false, false).singular_values.iter().cloned().collect();
    let smax = singular_values.iter().cloned().fold(0.0, f64::max);
    let rank = singular_values.iter().filter(|&&v| v > RANK_TOL * smax).count();
    Ok(TraceRank { rank, expected, singular_values, fd_agreement, columns })
}

/// Minimum-cost perfect assignment on a square cost matrix; `out[i]` is the
/// column assigned to row `i`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // potentials formulation with 1-based bookkeeping
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        out[p[j] - 1] = j - 1;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Separation {
    /// minimal total `|tau_i - tau_hat_j|` over matchings
    pub distance: f64,
    pub separated: bool,
}

/// Compares the trace multisets of two members with the same `(n, k, c)`.
pub fn trace_set_separation(p: &MapParams, q: &MapParams) -> Result<Separation> {
    if (p.n, p.k) != (q.n, q.k) || (p.c_value() - q.c_value()).abs() > 1e-12 {
        return Err(Error::InvalidParams("trace sets are compared for equal (n, k, c)".into()));
    }
    let a: Vec<Complex64> = fixed_points(p)?.iter().map(|r| r.trace).collect();
    let b: Vec<Complex64> = fixed_points(q)?.iter().map(|r| r.trace).collect();
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let assign = hungarian(&cost);
    let distance: f64 = assign.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Ok(Separation { distance, separated: distance > 1e-8 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitStatus {
    Completed,
    Escaped,
    Pole,
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    /// starting point first
    pub points: Vec<AffinePoint>,
    pub status: OrbitStatus,
}

fn run_orbit(step: impl Fn(AffinePoint) -> Result<AffinePoint>, pt0: AffinePoint, m: usize) -> Orbit {
    let mut points = vec![pt0];
    let mut cur = pt0;
    for _ in 0..m {
        match step(cur) {
            Ok(next) => {
                points.push(next);
                cur = next;
            }
            Err(Error::Pole(_)) => return Orbit { points, status: OrbitStatus::Pole },
            Err(_) => return Orbit { points, status: OrbitStatus::Escaped },
        }
    }
    Orbit { points, status: OrbitStatus::Completed }
}

/// Forward orbit of length at most `m`.
pub fn iterate_orbit(p: &MapParams, pt0: AffinePoint, m: usize) -> Orbit {
    let map = Map::new(p);
    run_orbit(|q| map.f(q), pt0, m)
}

pub fn iterate_orbit_inverse(p: &MapParams, pt0: AffinePoint, m: usize) -> Orbit {
    let map = Map::new(p);
    run_orbit(|q| map.f_inverse(q), pt0, m)
}

/// Tracing parameters for invariant manifolds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ManifoldConfig {
    /// stop once the traced part of a branch is this long
    pub arclength: f64,
    /// maximal distance between consecutive output points
    pub spacing: f64,
    /// distance of the seed segment from the fixed point
    pub seed_offset: f64,
    /// plot window `max(|x|, |y|) <= window`; the curve is clipped outside
    pub window: f64,
    pub max_points: usize,
    pub max_generations: usize,
}

impl Default for ManifoldConfig {
    fn default() -> Self {
        ManifoldConfig {
            arclength: 20.0,
            spacing: 0.01,
            seed_offset: 1e-6,
            window: 10.0,
            max_points: 1_000_000,
            max_generations: 200,
        }
    }
}

/// One branch of an invariant manifold.
#[derive(Clone, Debug, Serialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    /// cumulative arclength at each point, not counting gaps
    pub arc: Vec<f64>,
    /// indices `i` where the curve leaves the window between points `i-1` and `i`
    pub breaks: Vec<usize>,
    /// generation of each point: its seed parameter was iterated this often
    pub generation: Vec<u32>,
    pub fixed_point: [f64; 2],
    pub eigenvalue: f64,
    /// `+1` or `-1`: side of the eigenvector the branch leaves on
    pub side: i8,
    pub stable: bool,
    /// why tracing stopped: `arclength`, `escaped`, `max_points`, `max_generations`
    pub stop: String,
}

impl Polyline {
    /// The reflected branch `(x, y) -> (y, x)`; for a fixed point on the
    /// diagonal this turns an unstable branch into a stable one.
    pub fn reflected(&self) -> Polyline {
        Polyline {
            points: self.points.iter().map(|[x, y]| [*y, *x]).collect(),
            stable: !self.stable,
            eigenvalue: 1.0 / self.eigenvalue,
            ..self.clone()
        }
    }

    pub fn length(&self) -> f64 {
        self.arc.last().cloned().unwrap_or(0.0)
    }

    /// Consecutive point pairs that are joined by the curve.
    pub fn segments(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        (1..self.points.len()).filter(|i| !self.breaks.contains(i)).map(|i| (self.points[i - 1], self.points[i]))
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

const T_FLOOR: f64 = 1e-13;
const INITIAL_GRID: usize = 64;

/// Both branches of the unstable manifold of a real saddle.
///
/// The seed segment runs along the unstable eigenvector from `seed_offset`
/// to `mu * seed_offset` (`mu = lambda`, or `lambda^2` with the map `f^2`
/// when `lambda < 0`), sampled in a logarithmic parameter `t in [0, 1]`.
/// Generation `m` is the image of the segment under the `m`-th iterate.
/// Parameters carry over between generations and new ones are inserted
/// wherever consecutive images are further apart than `spacing`, so the
/// image of an output point of generation `m` is an output point of
/// generation `m + 1`.
pub fn unstable_manifold(p: &MapParams, fp: &FixedPointRecord, cfg: &ManifoldConfig) -> Result<Vec<Polyline>> {
    if fp.kind != FixedPointType::Saddle {
        return Err(Error::NotSaddle { trace: format!("{:.12}", fp.trace) });
    }
    let map = Map::new(p);
    let lam = fp.eigenvalues.iter().map(|e| e.re).fold(0.0, |a: f64, b: f64| if b.abs() > a.abs() { b } else { a });
    // Df = [[0, 1], [-delta, tr]]: eigenvector (1, lambda)
    let norm = (1.0 + lam * lam).sqrt();
    let dir = [1.0 / norm, lam / norm];
    let (mu, per_gen) = if lam > 0.0 { (lam, 1) } else { (lam * lam, 2) };
    let z = fp.zeta.re;
    let inside = |q: [f64; 2]| q[0].abs() <= cfg.window && q[1].abs() <= cfg.window;
    let mut out = Vec::new();
    for side in [1i8, -1] {
        // None: the orbit of this parameter hit the pole or left every bound
        let trace = |t: f64, gen: usize| -> Option<[f64; 2]> {
            let s = cfg.seed_offset * mu.powf(t) * side as f64;
            let mut pt = AffinePoint::real(z + s * dir[0], z + s * dir[1]);
            for _ in 0..gen * per_gen {
                pt = map.f(pt).ok()?;
            }
            Some([pt.x.re, pt.y.re])
        };
        let mut line = Polyline {
            points: vec![[z, z]],
            arc: vec![0.0],
            breaks: Vec::new(),
            generation: vec![0],
            fixed_point: [z, z],
            eigenvalue: lam,
            side,
            stable: false,
            stop: "max_generations".into(),
        };
        let mut ts: Vec<f64> = (0..=INITIAL_GRID).map(|i| i as f64 / INITIAL_GRID as f64).collect();
        let mut gap = false;
        'outer: for gen in 0..cfg.max_generations {
            let mut pts: Vec<Option<[f64; 2]>> = ts.iter().map(|&t| trace(t, gen).filter(|q| inside(*q))).collect();
            let mut i = 0;
            while i + 1 < ts.len() {
                let split = ts[i + 1] - ts[i] > T_FLOOR
                    && match (pts[i], pts[i + 1]) {
                        (Some(a), Some(b)) => dist2(a, b) > cfg.spacing,
                        (None, None) => false,
                        _ => true,
                    };
                if split {
                    let tm = 0.5 * (ts[i] + ts[i + 1]);
                    ts.insert(i + 1, tm);
                    pts.insert(i + 1, trace(tm, gen).filter(|q| inside(*q)));
                    if ts.len() > cfg.max_points {
                        line.stop = "max_points".into();
                        break 'outer;
                    }
                } else {
                    i += 1;
                }
            }
            if pts.iter().all(Option::is_none) {
                line.stop = "escaped".into();
                break;
            }
            // the last point of a generation is the first of the next
            for q in &pts[..pts.len() - 1] {
                match q {
                    None => gap = true,
                    Some(q) => {
                        let last = *line.points.last().unwrap();
                        let d = if gap { 0.0 } else { dist2(last, *q) };
                        if gap {
                            line.breaks.push(line.points.len());
                            gap = false;
                        }
                        line.points.push(*q);
                        line.arc.push(line.arc.last().unwrap() + d);
                        line.generation.push(gen as u32);
                        if line.points.len() >= cfg.max_points {
                            line.stop = "max_points".into();
                            break 'outer;
                        }
                        if *line.arc.last().unwrap() >= cfg.arclength {
                            line.stop = "arclength".into();
                            break 'outer;
                        }
                    }
                }
            }
        }
        out.push(line);
    }
    Ok(out)
}

/// Stable manifold branches by reflecting the unstable ones across `x = y`.
pub fn stable_manifold(p: &MapParams, fp: &FixedPointRecord, cfg: &ManifoldConfig) -> Result<Vec<Polyline>> {
    Ok(unstable_manifold(p, fp, cfg)?.iter().map(Polyline::reflected).collect())
}

/// Largest distance from `f(q)` to the traced curves, over output points `q`
/// whose image falls in a fully traced generation inside the window.
pub fn invariance_defect(p: &MapParams, lines: &[Polyline], window: f64) -> f64 {
    let map = Map::new(p);
    let mut worst: f64 = 0.0;
    for line in lines {
        let last_gen = line.generation.last().cloned().unwrap_or(0);
        for (q, &g) in line.points.iter().zip(&line.generation) {
            if g + 2 > last_gen {
                continue;
            }
            let Ok(img) = map.f(AffinePoint::real(q[0], q[1])) else { continue };
            let img = [img.x.re, img.y.re];
            if img[0].abs() > window || img[1].abs() > window {
                continue;
            }
            let d = lines
                .iter()
                .flat_map(|l| l.segments())
                .map(|(a, b)| segment_distance(img, a, b))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    worst
}

fn segment_distance(q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 { 0.0 } else { (((q[0] - a[0]) * ab[0] + (q[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0) };
    dist2(q, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// `seed_id,step,x,y` rows.
pub fn write_orbits_csv<W: Write>(mut w: W, orbits: &[Orbit]) -> std::io::Result<()> {
    writeln!(w, "seed_id,step,x,y")?;
    for (id, orbit) in orbits.iter().enumerate() {
        for (step, q) in orbit.points.iter().enumerate() {
            writeln!(w, "{id},{step},{:.15e},{:.15e}", q.x.re, q.y.re)?;
        }
    }
    Ok(())
}

/// Polylines as CSV with `seed_id` numbering the branches.
pub fn write_polylines_csv<W: Write>(mut w: W, lines: &[Polyline]) -> std::io::Result<()> {
    writeln!(w, "seed_id,step,x,y")?;
    for (id, line) in lines.iter().enumerate() {
        for (step, q) in line.points.iter().enumerate() {
            writeln!(w, "{id},{step},{:.15e},{:.15e}", q[0], q[1])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CSpec;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn fig1() -> MapParams {
        MapParams::figure1()
    }

    #[test]
    fn preset_fixed_points() {
        let fps = fixed_points(&fig1()).unwrap();
        assert_eq!(fps.len(), 5);
        let real: Vec<_> = fps.iter().filter(|r| r.is_real()).collect();
        assert_eq!(real.len(), 3);
        assert_eq!(real.iter().filter(|r| r.kind == FixedPointType::Saddle).count(), 2);
        assert_eq!(real.iter().filter(|r| r.kind == FixedPointType::Elliptic).count(), 1);
        for r in &fps {
            assert!(r.residual <= FIXED_TOL, "{r:?}");
            assert!((r.eigenvalues[0] * r.eigenvalues[1] - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn unperturbed_roots() {
        let p = MapParams::default_for(3, 4).unwrap();
        let cval = p.c_value();
        for r in fixed_points(&p).unwrap() {
            assert!((r.zeta.powi(5) - 1.0 / (2.0 - cval)).norm() < 1e-12);
            // trace c - k(2 - c)
            assert!((r.trace - c(cval - 4.0 * (2.0 - cval))).norm() < 1e-10);
        }
    }

    #[test]
    fn jacobian_closed_vs_dual() {
        let p = fig1();
        let pt = AffinePoint::new(Complex64::new(0.3, 0.2), Complex64::new(-1.1, 0.4));
        let a = jacobian(&p, pt).unwrap();
        let b = jacobian_dual(&p, pt);
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).norm() < 1e-10);
            }
        }
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        assert!((det - 1.0).norm() < 1e-14);
        assert!(matches!(jacobian(&p, AffinePoint::real(1.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn trace_rank() {
        for (k, want) in [(4, 1), (6, 2), (2, 0)] {
            let p = MapParams::default_for(3, k).unwrap();
            let r = trace_map_rank(&p).unwrap();
            assert_eq!(r.rank, want, "k={k}");
            assert!(r.fd_agreement < 1e-5, "k={k}: {}", r.fd_agreement);
        }
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
    }

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + rec(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(cost, 0, &mut vec![false; cost.len()])
    }

    proptest! {
        #[test]
        fn hungarian_is_optimal(n in 1usize..6, seed in proptest::collection::vec(0.0f64..10.0, 36)) {
            let cost: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 6 + j]).collect()).collect();
            let a = hungarian(&cost);
            let mut seen = vec![false; n];
            for &j in &a { prop_assert!(!seen[j]); seen[j] = true; }
            let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            prop_assert!((total - brute_force(&cost)).abs() < 1e-9);
        }

        #[test]
        fn real_orbits_stay_real(x in -2.0f64..2.0, y in 0.2f64..2.0) {
            let o = iterate_orbit(&fig1(), AffinePoint::real(x, y), 50);
            prop_assert!(o.points.iter().all(|q| q.x.im == 0.0 && q.y.im == 0.0));
        }

        #[test]
        fn reversor_conjugates(x in -1.5f64..1.5, y in 0.3f64..1.5) {
            let p = fig1();
            let fwd = iterate_orbit(&p, AffinePoint::real(x, y), 5);
            let back = iterate_orbit_inverse(&p, AffinePoint::real(x, y).swap(), 5);
            for (a, b) in fwd.points.iter().zip(&back.points) {
                prop_assert!(a.swap().dist(b) < 1e-8 * (1.0 + a.x.norm() + a.y.norm()));
            }
        }
    }

    #[test]
    fn separation() {
        let mut a1 = BTreeMap::new();
        a1.insert(2, c(0.01));
        let mut a2 = BTreeMap::new();
        a2.insert(2, c(0.02));
        let p1 = MapParams::new(2, 4, CSpec::Root { j: 1, sign: 1 }, a1).unwrap();
        let p2 = MapParams::new(2, 4, CSpec::Root { j: 1, sign: 1 }, a2).unwrap();
        assert!(trace_set_separation(&p1, &p2).unwrap().separated);
        assert!(!trace_set_separation(&p1, &p1).unwrap().separated);
    }

    #[test]
    fn orbit_statuses() {
        let p = fig1();
        let fps = fixed_points(&p).unwrap();
        let fp = fps.iter().find(|r| r.is_real()).unwrap();
        let o = iterate_orbit(&p, fp.point(), 20);
        assert_eq!(o.status, OrbitStatus::Completed);
        assert!(o.points.iter().all(|q| q.dist(&fp.point()) < 1e-8));
        assert_eq!(iterate_orbit(&p, AffinePoint::real(1.0, 0.0), 3).status, OrbitStatus::Pole);
    }

    #[test]
    fn manifolds_of_preset_saddles() {
        let p = fig1();
        let cfg = ManifoldConfig { arclength: 5.0, spacing: 0.02, ..Default::default() };
        let fps = fixed_points(&p).unwrap();
        let elliptic = fps.iter().find(|r| r.kind == FixedPointType::Elliptic).unwrap();
        assert!(matches!(unstable_manifold(&p, elliptic, &cfg), Err(Error::NotSaddle { .. })));
        for fp in fps.iter().filter(|r| r.kind == FixedPointType::Saddle) {
            let lines = unstable_manifold(&p, fp, &cfg).unwrap();
            let defect = invariance_defect(&p, &lines, cfg.window);
            assert!(defect < 1e-4, "{defect}");
            for line in &lines {
                assert!(dist2(line.points[0], line.fixed_point) < 1e-5);
                assert!(line.segments().all(|(a, b)| dist2(a, b) <= cfg.spacing + 1e-12));
                let st = line.reflected();
                assert!(st.stable && st.points[5] == [line.points[5][1], line.points[5][0]]);
            }
        }
    }
}
