//! Simultaneous polynomial root finding (Aberth-Ehrlich) with Newton polish.

use num_complex::Complex64;

/// Horner evaluation of `p` and `p'`; coefficients from the constant term up.
fn eval_with_derivative(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// All complex roots of `p` with multiplicity, in the order the iteration
/// produced them. Leading zero coefficients are dropped.
pub fn aberth(p: &[Complex64]) -> Vec<Complex64> {
    let mut p = p.to_vec();
    while p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    if p.len() < 2 {
        return Vec::new();
    }
    let deg = p.len() - 1;
    let lead = p[deg];
    let p: Vec<Complex64> = p.iter().map(|c| c / lead).collect();

    // initial guesses on a circle just inside the Cauchy bound, rotated off
    // the real axis so conjugate pairs separate
    let radius = 1.0 + p[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    // geometric mean of the root moduli
    let r0 = p[0].norm().powf(1.0 / deg as f64).clamp(1e-3, radius);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / deg as f64 + 0.4))
        .collect();

    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let (v, d) = eval_with_derivative(&p, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let sum: Complex64 = (0..deg).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        newton_polish(&p, zi);
    }
    z
}

/// A few Newton steps, kept only while the residual decreases.
fn newton_polish(p: &[Complex64], z: &mut Complex64) {
    for _ in 0..5 {
        let (v, d) = eval_with_derivative(p, *z);
        if d.norm() == 0.0 || v.norm() == 0.0 {
            return;
        }
        let cand = *z - v / d;
        if eval_with_derivative(p, cand).0.norm() < v.norm() {
            *z = cand;
        } else {
            return;
        }
    }
}

/// Groups roots closer than `sep` and returns `(mean, multiplicity)`.
pub fn cluster(roots: &[Complex64], sep: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize, Vec<Complex64>)> = Vec::new();
    for &r in roots {
        if let Some(slot) = out.iter_mut().find(|(c, _, _)| (c - r).norm() < sep) {
            slot.2.push(r);
            slot.1 += 1;
            slot.0 = slot.2.iter().sum::<Complex64>() / slot.2.len() as f64;
        } else {
            out.push((r, 1, vec![r]));
        }
    }
    out.into_iter().map(|(c, m, _)| (c, m)).collect()
}

/// Sorts lexicographically by `(re, im)` for deterministic output.
pub fn sort_lex(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        let mut p = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); p.len() + 1];
            for (i, a) in p.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            p = next;
        }
        p
    }

    #[test]
    fn fifth_roots() {
        // z^5 - 2 = 0
        let p = [c(-2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let r = aberth(&p);
        assert_eq!(r.len(), 5);
        for z in r {
            assert!((z.powi(5) - 2.0).norm() < 1e-13);
        }
    }

    #[test]
    fn double_root_clusters() {
        let p = poly_from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.5)]);
        let cl = cluster(&aberth(&p), 1e-5);
        assert_eq!(cl.len(), 2);
        assert!(cl.iter().any(|&(z, m)| m == 2 && (z - c(1.0, 0.0)).norm() < 1e-7));
    }

    proptest! {
        #[test]
        fn recovers_well_separated_roots(re in proptest::collection::vec(-3.0f64..3.0, 1..7)) {
            // spread the roots so they are at least 0.6 apart
            let roots: Vec<Complex64> = re.iter().enumerate()
                .map(|(i, &x)| c(x, 0.6 * i as f64 - 1.5)).collect();
            let got = aberth(&poly_from_roots(&roots));
            for r in &roots {
                let best = got.iter().map(|g| (g - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-8, "missing root {r}: best {best}");
            }
        }
    }
}
