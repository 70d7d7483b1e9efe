//! Exact integer / rational linear algebra and polynomial arithmetic.
//!
//! Sizes here are tiny (matrices below 40x40, polynomials below degree 40),
//! so the routines favour transparency over asymptotics.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense row-major matrix over an exact ring.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
}

pub type IntMat = Mat<BigInt>;
pub type RatMat = Mat<BigRational>;

impl<T: Clone + Zero + One + PartialEq> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    let a = &self[(i, j)];
                    if !a.is_zero() {
                        acc = acc + a.clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Sub-block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r: std::ops::Range<usize>, c: std::ops::Range<usize>) -> Self {
        Self::from_fn(r.len(), c.len(), |i, j| self[(r.start + i, c.start + j)].clone())
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone + Zero + One + PartialEq> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Mat::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }
}

impl<T: fmt::Display> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.data[i * self.cols + j].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_rat(m: &IntMat) -> RatMat {
    m.map(|x| BigRational::from_integer(x.clone()))
}

/// Converts back to integers; `None` if some entry is not integral.
pub fn to_int(m: &RatMat) -> Option<IntMat> {
    if m.entries().iter().all(|x| x.is_integer()) {
        Some(m.map(|x| x.to_integer()))
    } else {
        None
    }
}

pub fn dot<T: Clone + Zero + One + PartialEq>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Bilinear form `a^T Q b`.
pub fn form<T: Clone + Zero + One + PartialEq>(q: &Mat<T>, a: &[T], b: &[T]) -> T {
    dot(a, &q.mul_vec(b))
}

/// Gram matrix `B^T Q B` of the columns of `b`.
pub fn gram<T: Clone + Zero + One + PartialEq>(q: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    &(&b.transpose() * q) * b
}

/// Leading principal minors `D_1, ..., D_m` by Bareiss elimination without
/// pivoting; stops early (shorter output) at the first vanishing minor.
pub fn leading_principal_minors(a: &IntMat) -> Vec<BigInt> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut prev = BigInt::one();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = m[(k, k)].clone();
        out.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&pivot * &m[(i, j)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                m[(i, j)] = v;
            }
        }
        prev = pivot;
    }
    out
}

/// Determinant by fraction-free elimination with row pivoting.
pub fn det(a: &IntMat) -> BigInt {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for k in 0..n {
        if m[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                let tmp = m[(k, j)].clone();
                m[(k, j)] = m[(p, j)].clone();
                m[(p, j)] = tmp;
            }
            sign = -sign;
        }
        let pivot = m[(k, k)].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                m[(i, j)] = (&pivot * &m[(i, j)] - &m[(i, k)] * &m[(k, j)]) / &prev;
            }
            m[(i, k)] = BigInt::zero();
        }
        prev = pivot;
    }
    let d = m[(n - 1, n - 1)].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Solves `A X = B` over the rationals; `None` if `A` is singular.
pub fn solve(a: &RatMat, b: &RatMat) -> Option<RatMat> {
    assert_eq!(a.rows, a.cols);
    assert_eq!(a.rows, b.rows);
    let n = a.rows;
    let w = n + b.cols;
    let mut m = RatMat::from_fn(n, w, |i, j| if j < n { a[(i, j)].clone() } else { b[(i, j - n)].clone() });
    for k in 0..n {
        let p = (k..n).find(|&i| !m[(i, k)].is_zero())?;
        if p != k {
            for j in 0..w {
                let tmp = m[(k, j)].clone();
                m[(k, j)] = m[(p, j)].clone();
                m[(p, j)] = tmp;
            }
        }
        let inv = m[(k, k)].recip();
        for j in k..w {
            m[(k, j)] = &m[(k, j)] * &inv;
        }
        for i in 0..n {
            if i == k || m[(i, k)].is_zero() {
                continue;
            }
            let f = m[(i, k)].clone();
            for j in k..w {
                let v = &m[(i, j)] - &f * &m[(k, j)];
                m[(i, j)] = v;
            }
        }
    }
    Some(m.block(0..n, n..w))
}

pub fn inverse(a: &RatMat) -> Option<RatMat> {
    solve(a, &RatMat::identity(a.rows))
}

/// Exact inverse of a unimodular integer matrix.
pub fn int_inverse(a: &IntMat) -> Option<IntMat> {
    inverse(&to_rat(a)).and_then(|m| to_int(&m))
}

/// True when every column has a single entry 1 and the rest 0.
pub fn is_permutation(a: &IntMat) -> bool {
    a.rows == a.cols
        && (0..a.cols).all(|j| {
            let col = a.col(j);
            col.iter().filter(|x| x.is_one()).count() == 1 && col.iter().filter(|x| !x.is_zero()).count() == 1
        })
        && (0..a.rows).all(|i| a.row(i).iter().filter(|x| !x.is_zero()).count() == 1)
}

/// Dense polynomial, coefficients from the constant term upwards, trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    pub coeffs: Vec<T>,
}

pub type ZPoly = Poly<BigInt>;
pub type QPoly = Poly<BigRational>;

impl<T: Clone + Zero + One + PartialEq> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }

    /// `x^d`
    pub fn monomial(d: usize) -> Self {
        let mut c = vec![T::zero(); d + 1];
        c[d] = T::one();
        Poly { coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(T::zero);
        Poly::new((0..n).map(|i| get(self, i) + get(o, i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }
}

impl<T: Clone + Zero + One + PartialEq + std::ops::Neg<Output = T>> Poly<T> {
    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl<T> Poly<T>
where
    T: Clone
        + Zero
        + One
        + PartialEq
        + std::ops::Neg<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Div<Output = T>,
{
    /// Long division. Exact when `T` is a field or the divisor's leading
    /// coefficient is a unit.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let lead = d.lead();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] = r[i + j].clone() - c.clone() * dc.clone();
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }
}

impl<T: Clone + Zero + One + PartialEq> Poly<T> {
    pub fn derivative(&self) -> Self {
        let mut factor = T::zero();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in self.coeffs.iter().skip(1) {
            factor = factor + T::one();
            out.push(c.clone() * factor.clone());
        }
        Poly::new(out)
    }
}

impl ZPoly {
    pub fn from_i64(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn to_q(&self) -> QPoly {
        Poly::new(self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Exact quotient `self / d` over the integers; `None` if not divisible.
    pub fn exact_div(&self, d: &ZPoly) -> Option<ZPoly> {
        let (q, r) = self.to_q().div_rem(&d.to_q());
        if !r.is_zero() {
            return None;
        }
        q.to_z()
    }

    /// Coefficients as decimal strings, highest degree first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().rev().map(|c| c.to_string()).collect()
    }
}

impl QPoly {
    pub fn to_z(&self) -> Option<ZPoly> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(Poly::new(self.coeffs.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }

    pub fn monic(&self) -> Self {
        let l = self.lead();
        if l.is_zero() {
            return self.clone();
        }
        self.scale(&l.recip())
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Primitive integer polynomial with the same roots and positive leading term.
    pub fn primitive(&self) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &den).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let mut out: Vec<BigInt> = ints.into_iter().map(|c| c / &g).collect();
        if out.last().is_some_and(|c| c.is_negative()) {
            out.iter_mut().for_each(|c| *c = -c.clone());
        }
        Poly::new(out)
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "Poly[{}]", c.join(", "))
    }
}

/// Characteristic polynomial `det(x I - A)` by Berkowitz's division-free
/// algorithm.
pub fn char_poly(a: &IntMat) -> ZPoly {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    // coefficients of the running polynomial, highest degree first
    let mut p = vec![BigInt::one()];
    for r in 0..n {
        let mut col = vec![BigInt::zero(); r + 2];
        col[0] = BigInt::one();
        col[1] = -a[(r, r)].clone();
        let row: Vec<BigInt> = (0..r).map(|j| a[(r, j)].clone()).collect();
        let mut v: Vec<BigInt> = (0..r).map(|i| a[(i, r)].clone()).collect();
        let sub = a.block(0..r, 0..r);
        for c in col.iter_mut().skip(2) {
            *c = -dot(&row, &v);
            v = sub.mul_vec(&v);
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, pj) in p.iter().enumerate().take(i + 1) {
                *slot += &col[i - j] * pj;
            }
        }
        p = next;
    }
    p.reverse();
    Poly::new(p)
}

/// Square-free factorization (Yun): `p = c * prod_i f_i^i` with monic `f_i`.
pub fn squarefree_decomposition(p: &QPoly) -> Vec<(QPoly, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let c = p.gcd(&dp);
    let mut w = p.div_rem(&c).0;
    let mut y = dp.div_rem(&c).0;
    let mut z = y.sub(&w.derivative());
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let g = w.gcd(&z);
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), i));
        }
        w = w.div_rem(&g).0;
        y = z.div_rem(&g).0;
        z = y.sub(&w.derivative());
        i += 1;
    }
    out
}

/// Product of the distinct irreducible-over-Q factors' roots: the square-free part.
pub fn squarefree_part(p: &QPoly) -> QPoly {
    squarefree_decomposition(p).into_iter().fold(QPoly::one(), |acc, (f, _)| acc.mul(&f))
}

/// Cyclotomic polynomial `Phi_m` over the integers.
pub fn cyclotomic(m: u32) -> ZPoly {
    let mut num = ZPoly::monomial(m as usize);
    num.coeffs[0] = -BigInt::one();
    let mut den = ZPoly::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            den = den.mul(&cyclotomic(d));
        }
    }
    num.exact_div(&den).expect("x^m - 1 is divisible by its cyclotomic factors")
}

fn euler_phi(m: u32) -> u32 {
    (1..=m).filter(|&j| num_integer::gcd(j, m) == 1).count() as u32
}

/// Strips cyclotomic factors off `p`, returning `(m, multiplicity)` pairs
/// and the remaining cofactor (constant `+-1` iff `p` is a product of
/// cyclotomic polynomials up to sign).
pub fn cyclotomic_factors(p: &ZPoly) -> (Vec<(u32, usize)>, ZPoly) {
    let mut rest = p.clone();
    let mut out = Vec::new();
    let mut m = 1;
    // phi(m) >= sqrt(m/2), so m <= 2 deg^2 covers every possible factor
    let bound = 2 * (p.degree().unwrap_or(0) as u32).pow(2) + 2;
    while m <= bound && rest.degree().unwrap_or(0) > 0 {
        if euler_phi(m) as usize <= rest.degree().unwrap_or(0) {
            let phi = cyclotomic(m);
            let mut mult = 0;
            while let Some(q) = rest.exact_div(&phi) {
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                out.push((m, mult));
            }
        }
        m += 1;
    }
    (out, rest)
}

/// Sturm sequence of a square-free polynomial.
fn sturm_sequence(p: &QPoly) -> Vec<QPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        seq.push(r.neg());
    }
    seq
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Cauchy bound: all roots satisfy `|x| < 1 + max |a_i / a_n|`.
fn root_bound(p: &QPoly) -> BigRational {
    let lead = p.lead().abs();
    let m = p
        .coeffs
        .iter()
        .rev()
        .skip(1)
        .map(|c| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    m + BigRational::one()
}

/// Number of distinct real roots in `(lo, hi]`.
pub fn count_real_roots(p: &QPoly, lo: &BigRational, hi: &BigRational) -> usize {
    let seq = sturm_sequence(&squarefree_part(p));
    sign_changes(&seq, lo) - sign_changes(&seq, hi)
}

/// Largest real root, isolated by Sturm bisection and refined by exact
/// bisection to width `tol`. `None` if there are no real roots.
pub fn largest_real_root(p: &ZPoly, tol: f64) -> Option<f64> {
    let sf = squarefree_part(&p.to_q());
    if sf.degree().unwrap_or(0) == 0 {
        return None;
    }
    let seq = sturm_sequence(&sf);
    let b = root_bound(&sf);
    let mut lo = -b.clone();
    let mut hi = b;
    let v_hi = sign_changes(&seq, &hi);
    if sign_changes(&seq, &lo) == v_hi {
        return None;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let width = BigRational::from_float(tol).unwrap_or_else(|| rat(1, 1_000_000_000_000));
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        if sign_changes(&seq, &mid) > v_hi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((&lo + &hi) / &two).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMat {
        IntMat::from_fn(rows.len(), rows[0].len(), |i, j| int(rows[i][j]))
    }

    #[test]
    fn berkowitz_matches_hand_expansion() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        // x^3 - 9x^2 + 24x - 18
        assert_eq!(char_poly(&a), ZPoly::from_i64(&[-18, 24, -9, 1]));
        assert_eq!(det(&a), int(18));
    }

    #[test]
    fn det_with_pivoting_and_minors() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(det(&a), int(-1));
        let g = m(&[&[-2, 1, 0], &[1, -2, 1], &[0, 1, -2]]);
        assert_eq!(leading_principal_minors(&g), vec![int(-2), int(3), int(-4)]);
    }

    #[test]
    fn rational_inverse() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = int_inverse(&a).unwrap();
        assert!((&a * &inv).is_identity());
        assert!(int_inverse(&m(&[&[2, 0], &[0, 1]])).is_none());
    }

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic(1), ZPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(4), ZPoly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), ZPoly::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), ZPoly::from_i64(&[1, 0, -1, 0, 1]));
        let p = cyclotomic(1).mul(&cyclotomic(1)).mul(&cyclotomic(3)).mul(&ZPoly::from_i64(&[1, -3, 1]));
        let (f, rest) = cyclotomic_factors(&p);
        assert_eq!(f, vec![(1, 2), (3, 1)]);
        assert_eq!(rest, ZPoly::from_i64(&[1, -3, 1]));
    }

    #[test]
    fn yun_multiplicities() {
        let p = ZPoly::from_i64(&[-1, 1]).mul(&ZPoly::from_i64(&[-1, 1])).mul(&ZPoly::from_i64(&[1, 1]));
        let d = squarefree_decomposition(&p.to_q());
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], (ZPoly::from_i64(&[1, 1]).to_q(), 1));
        assert_eq!(d[1], (ZPoly::from_i64(&[-1, 1]).to_q(), 2));
    }

    #[test]
    fn sturm_largest_root() {
        let p = ZPoly::from_i64(&[1, -3, 1]);
        let r = largest_real_root(&p, 1e-13).unwrap();
        assert!((r - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(count_real_roots(&p.to_q(), &rat(-10, 1), &rat(10, 1)), 2);
        assert!(largest_real_root(&ZPoly::from_i64(&[1, 0, 1]), 1e-12).is_none());
    }

    #[test]
    fn display() {
        assert_eq!(ZPoly::from_i64(&[1, -2, -2, 1]).to_string(), "x^3 - 2x^2 - 2x + 1");
    }
}
