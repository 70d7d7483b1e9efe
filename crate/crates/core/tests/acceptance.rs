//! Acceptance criteria at desk scale. Prints one verdict line per criterion
//! and exits non-zero if any applicable criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use ratsurf::charts;
use ratsurf::dynamics::{self, FixedPointType};
use ratsurf::exact::{self, ZPoly};
use ratsurf::lattice::{self, TSpace};
use ratsurf::reflections;
use ratsurf::report::big_ratio;
use ratsurf::MapParams;

const DESK: [(usize, usize); 5] = [(2, 4), (2, 6), (3, 2), (3, 4), (4, 2)];

type CriterionFn = fn() -> Criterion;

/// Collects failure messages for one criterion.
struct Criterion {
    failures: Vec<String>,
    /// printed under the verdict line
    notes: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn params(n: usize, k: usize) -> MapParams {
    if (n, k) == (2, 4) {
        MapParams::figure1()
    } else {
        MapParams::default_for(n as u32, k as u32).unwrap()
    }
}

fn entropy_values() -> Criterion {
    let mut c = Criterion::new();
    let golden = (3.0 + 5f64.sqrt()) / 2.0;
    let l32 = lattice::spectral_radius(3, 2);
    c.check((l32 - golden).abs() < 1e-9, || format!("lambda_(3,2) = {l32}"));
    for k in [4usize, 6, 8] {
        let kf = k as f64;
        let want = (kf + (kf * kf - 4.0).sqrt()) / 2.0;
        let got = lattice::spectral_radius(2, k);
        c.check((got - want).abs() < 1e-9, || format!("lambda_(2,{k}) = {got}, want {want}"));
    }
    let factored = ZPoly::from_i64(&[1, 1]).mul(&ZPoly::from_i64(&[1, -3, 1]));
    let chi = lattice::chi_poly(3, 2);
    c.check(chi == factored, || format!("chi_(3,2) = {:?}", chi.to_strings()));
    c
}

/// `(k + 2 - nk) (k + 2)^(n-1) k^n`
fn det_oracle(n: usize, k: usize) -> BigInt {
    let (nb, kb) = (BigInt::from(n), BigInt::from(k));
    let two = BigInt::from(2);
    (&kb + &two - &nb * &kb) * num_traits::pow(&kb + &two, n - 1) * num_traits::pow(kb, n)
}

fn exact_lattice() -> Criterion {
    let mut c = Criterion::new();
    for (n, k) in DESK {
        let data = lattice::build_lattice(n, k);
        // negative definite: leading minors alternate in sign starting negative
        let alternating = data.minors.iter().enumerate().all(|(i, m)| {
            let want_neg = i % 2 == 0;
            !m.is_zero() && (m.is_negative() == want_neg)
        });
        c.check(alternating && data.negative_definite, || format!("({n},{k}) Gram(S) not negative definite"));
        let want = det_oracle(n, k);
        c.check(data.det_s == want, || format!("({n},{k}) det Gram(S) = {}, want {want}", data.det_s));
        let f = lattice::pushforward_nk(n, k);
        let q = &f.lattice.q;
        c.check(exact::gram(q, &f.matrix) == *q, || format!("({n},{k}) f_* is not an isometry"));
        c.check(f.preserves_canonical(), || format!("({n},{k}) f_* K != K"));
        let det = f.det();
        c.check(det.abs().is_one(), || format!("({n},{k}) det f_* = {det}"));
        let sp = lattice::spectrum(n, k);
        c.check(sp.divisible, || format!("({n},{k}) chi does not divide char_poly"));
        c.check(sp.cofactor_unit_deviation < 1e-9, || {
            format!("({n},{k}) cofactor root off the unit circle by {}", sp.cofactor_unit_deviation)
        });
    }
    c
}

fn t_space() -> Criterion {
    let mut c = Criterion::new();
    for (n, k) in DESK {
        let ts = TSpace::new(n, k);
        for s in 0..n {
            let got = lattice::project_to_t(&ts, &ts.lattice.l_class(s));
            let want: Vec<_> = (0..n).map(|t| exact::rat(if t == s { -1 } else { k as i64 }, 1)).collect();
            c.check(got == want, || format!("({n},{k}) projection of L_{s} = {got:?}"));
        }
        let ra = lattice::restricted_action_t(n, k);
        let chi = lattice::chi_poly(n, k);
        c.check(ra.char_poly == chi || ra.char_poly == chi.neg(), || {
            format!("({n},{k}) char poly on T = {:?}", ra.char_poly.to_strings())
        });
        // Gram(gamma) against delta on the diagonal and eps off it
        let delta = exact::rat(2 - (n as i64 - 2) * k as i64, 1);
        let eps = exact::rat(k as i64, 1);
        let g = |i: usize, j: usize| ts.ip(&ts.gamma[i], &ts.gamma[j]);
        let ratio = g(0, 1) / &eps;
        let proportional =
            (0..n).all(|i| (0..n).all(|j| g(i, j) == if i == j { &delta * &ratio } else { &eps * &ratio }));
        c.check(proportional && !ratio.is_zero(), || format!("({n},{k}) Gram(gamma) not proportional"));
    }
    c
}

fn degree_growth() -> Criterion {
    let mut c = Criterion::new();
    for (n, k) in DESK {
        let f = lattice::pushforward_nk(n, k);
        let d = lattice::degree_sequence(&f, 41);
        // oracle: the (0, 0) entry of matrix powers
        for m in [1u32, 2, 7, 40] {
            let pm = f.matrix.pow(m);
            c.check(pm[(0, 0)] == d[m as usize], || format!("({n},{k}) d_{m} disagrees with M^{m}"));
        }
        let cp = f.char_poly();
        let deg = cp.degree().unwrap();
        let ok = (0..=40usize.saturating_sub(deg)).all(|m| exact::dot(&d[m..=m + deg], &cp.coeffs).is_zero());
        c.check(ok, || format!("({n},{k}) degree recurrence fails"));
        c.check(d[1] == BigInt::from(k + 1), || format!("({n},{k}) d_1 = {}", d[1]));
        let lambda = lattice::spectral_radius(n, k);
        let ratio = big_ratio(&d[41], &d[40]);
        c.check((ratio - lambda).abs() < 1e-6, || format!("({n},{k}) d_41/d_40 = {ratio}, lambda = {lambda}"));
    }
    c
}

fn chart_suite() -> Criterion {
    let mut c = Criterion::new();
    for (n, k) in DESK {
        let p = params(n, k);
        match charts::transition_suite(&p, 10, 7) {
            Ok(recs) => {
                let worst = recs.iter().map(|r| r.abs_err).fold(0.0, f64::max);
                c.check(!recs.is_empty() && worst <= 1e-6, || format!("({n},{k}) transition error {worst:e}"));
            }
            Err(e) => c.failures.push(format!("({n},{k}) {e}")),
        }
        match charts::center_orbit_check(&p) {
            Ok(o) => c.check(o.holds && o.residual < 1e-8, || format!("({n},{k}) center orbit {o:?}")),
            Err(e) => c.failures.push(format!("({n},{k}) {e}")),
        }
    }
    c
}

fn parabolic_suite() -> Criterion {
    let mut c = Criterion::new();
    for (n, k) in DESK {
        let p = params(n, k);
        match charts::parabolic_suite(&p, 10, 11) {
            Ok(comps) => {
                let want = 1 + n * (2 * k - 2);
                c.check(comps.len() == want, || format!("({n},{k}) {} components, want {want}", comps.len()));
                for comp in comps {
                    c.check(
                        comp.samples == 10 && comp.max_fixed_residual <= 1e-8 && comp.max_deviation <= 1e-6,
                        || format!("({n},{k}) {comp:?}"),
                    );
                }
            }
            Err(e) => c.failures.push(format!("({n},{k}) {e}")),
        }
        match charts::sigma0_diagonal_suite(&p, 10, 13) {
            Ok(s) => c.check(s.pass, || format!("({n},{k}) Df^n on Sigma_0: {s:?}")),
            Err(e) => c.failures.push(format!("({n},{k}) {e}")),
        }
    }
    c
}

fn fixed_point_suite() -> Criterion {
    let mut c = Criterion::new();
    for (n, k) in DESK {
        let p = params(n, k);
        let fps = dynamics::fixed_points(&p).unwrap();
        c.check(fps.len() == k + 1, || format!("({n},{k}) {} fixed points", fps.len()));
        for r in &fps {
            // oracle: the residual recomputed from the map itself
            let img = ratsurf::family::eval_f(&p, r.point()).unwrap();
            let res = img.dist(&r.point());
            c.check(res <= 1e-10, || format!("({n},{k}) |f(p) - p| = {res:e} at {}", r.zeta));
        }
    }
    let fps = dynamics::fixed_points(&MapParams::figure1()).unwrap();
    let real: Vec<_> = fps.iter().filter(|r| r.is_real()).collect();
    let saddles = real.iter().filter(|r| r.trace.re.abs() > 2.0).count();
    let elliptic = real.iter().filter(|r| r.trace.re.abs() < 2.0).count();
    c.check(real.len() == 3 && saddles == 2 && elliptic == 1, || {
        format!("preset: {} real, {saddles} saddles, {elliptic} elliptic", real.len())
    });
    c.check(real.iter().filter(|r| r.kind == FixedPointType::Saddle).count() == 2, || "saddle labels".into());
    for (k, want) in [(4u32, 1usize), (6, 2)] {
        let p = MapParams::default_for(3, k).unwrap();
        let r = dynamics::trace_map_rank(&p).unwrap();
        c.check(r.rank == want && (k / 2 - 1) as usize == want, || format!("k = {k}: rank {}", r.rank));
        c.check(r.fd_agreement < 1e-5, || format!("k = {k}: finite differences off by {:e}", r.fd_agreement));
    }
    c
}

fn reflection_suite() -> Criterion {
    let mut c = Criterion::new();
    for (n, k) in DESK {
        let cox = reflections::coxeter_factorization_check_nk(n, k);
        c.check(cox.coxeter_identity, || format!("({n},{k}) Coxeter identity fails"));
        let f = lattice::pushforward_nk(n, k);
        let rho = reflections::rho_pushforward_nk(n, k);
        let rr = &rho.matrix * &rho.matrix;
        c.check(rr.is_identity(), || format!("({n},{k}) rho_*^2 != Id"));
        let f_inv = f.inverse().expect("unimodular").matrix;
        c.check(&(&rho.matrix * &f.matrix) * &rho.matrix == f_inv, || format!("({n},{k}) rho f rho != f^-1"));
        if n == 2 {
            c.check(reflections::dihedral_check_nk(n, k).holds(), || format!("({n},{k}) dihedral relations"));
        }
        let w = reflections::weyl_factorization_check_nk(n, k);
        let accounted = w.literal_identity || (w.repaired.is_some() && !w.residual.is_empty());
        c.check(accounted, || format!("({n},{k}) W_N factorization neither literal nor repaired"));
        if !w.literal_identity {
            if let Some(r) = &w.repaired {
                c.notes.push(format!(
                    "({n},{k}) W_N factorization: literal product differs in {} entries; repaired {} with m = {}, phi = {:?}",
                    w.residual.len(),
                    r.form,
                    r.exponent,
                    r.phi_cycles
                ));
            }
        }
    }
    c
}

fn main() -> ExitCode {
    let criteria: [(&str, CriterionFn); 8] = [
        ("entropy values", entropy_values),
        ("exact lattice suite", exact_lattice),
        ("T-space identities", t_space),
        ("degree growth", degree_growth),
        ("chart transitions and center orbit", chart_suite),
        ("parabolic suite", parabolic_suite),
        ("fixed-point suite", fixed_point_suite),
        ("reflection suite", reflection_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let c = run();
        let secs = t.elapsed().as_secs_f64();
        if c.failures.is_empty() {
            println!("criterion {}: PASS  {name} ({secs:.2}s)", i + 1);
        } else {
            failed += 1;
            println!("criterion {}: FAIL  {name} ({secs:.2}s)", i + 1);
            for f in &c.failures {
                println!("    {f}");
            }
        }
        for note in &c.notes {
            println!("    note: {note}");
        }
    }
    println!(
        "criterion 9: EXCLUDED  biholomorphic inequivalence and the Cremona classification for n > 2 \
         are not computable at desk scale; their ingredients are criteria 7 and 8"
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
