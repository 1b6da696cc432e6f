//! Exact arithmetic in cyclotomic fields Q(ζ_N).
//!
//! Elements are stored in the power basis 1, ζ, …, ζ^{φ(N)-1}, reduced modulo
//! Φ_N, as an integer numerator vector over a common positive denominator.
//! Small values live in `i64` and are combined with checked `i128`
//! arithmetic; anything that does not fit falls back to big integers.

pub mod linalg;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use linalg::CycloMatrix;

/// Arbitrary precision rational number.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CycloError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("order {from} does not divide {to}")]
    BadEmbedding { from: u32, to: u32 },
    #[error("malformed cyclotomic literal: {0}")]
    Parse(String),
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Coefficients of Φ_N from the constant term upwards.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic_polynomial: order must be positive");
    let mut memo: HashMap<u32, Vec<BigInt>> = HashMap::new();
    cyclotomic_rec(n, &mut memo)
}

fn cyclotomic_rec(n: u32, memo: &mut HashMap<u32, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // x^n - 1
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let div = cyclotomic_rec(d, memo);
            num = div_monic(&num, &div);
        }
    }
    memo.insert(n, num.clone());
    num
}

/// Exact quotient of `num` by the monic polynomial `den`.
fn div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, di) in den.iter().enumerate() {
            rem[k + i] -= &c * di;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()), "inexact division");
    quot
}

/// Euler's totient.
pub fn totient(n: u32) -> u32 {
    let mut r = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if m > 1 {
        r -= r / m;
    }
    r
}

/// Precomputed data for Q(ζ_N): Φ_N and the reduced powers of ζ_N.
#[derive(Debug)]
pub struct CycloField {
    order: u32,
    degree: usize,
    phi: Vec<i64>,
    powers: Vec<Vec<i64>>,
}

static FIELDS: OnceLock<Mutex<HashMap<u32, &'static CycloField>>> = OnceLock::new();

impl CycloField {
    /// The interned field of order `n`. Tables are built once and never change.
    pub fn get(n: u32) -> &'static CycloField {
        assert!(n >= 1, "cyclotomic order must be positive");
        let reg = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = reg.lock().expect("field registry poisoned");
        if let Some(f) = guard.get(&n) {
            return f;
        }
        let f: &'static CycloField = Box::leak(Box::new(CycloField::build(n)));
        guard.insert(n, f);
        f
    }

    fn build(n: u32) -> CycloField {
        let phi: Vec<i64> = cyclotomic_polynomial(n)
            .iter()
            .map(|c| c.to_i64().expect("cyclotomic coefficient exceeds i64"))
            .collect();
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..n {
            let mut trimmed = cur.clone();
            trim(&mut trimmed);
            powers.push(trimmed);
            // multiply by x
            let top = cur[degree - 1];
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..degree {
                    cur[i] -= top * phi[i];
                }
            }
        }
        CycloField { order: n, degree, phi, powers }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// φ(N), the dimension over Q.
    pub fn degree(&self) -> usize {
        self.degree
    }
}

fn trim<T: Coef>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero_c()) {
        v.pop();
    }
}

const SMALL_BOUND: i64 = 1 << 40;

/// Integer coefficient type for the generic arithmetic kernels.
trait Coef: Clone + PartialEq {
    fn zero_c() -> Self;
    fn one_c() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero_c(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn cadd(&self, o: &Self) -> Option<Self>;
    fn csub(&self, o: &Self) -> Option<Self>;
    fn cmul(&self, o: &Self) -> Option<Self>;
    fn neg_c(&self) -> Option<Self>;
    fn gcd_c(&self, o: &Self) -> Self;
    fn div_c(&self, o: &Self) -> Self;
}

impl Coef for i128 {
    fn zero_c() -> Self {
        0
    }
    fn one_c() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero_c(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn cadd(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn csub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn cmul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg_c(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd_c(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_c(&self, o: &Self) -> Self {
        self / o
    }
}

impl Coef for i64 {
    fn zero_c() -> Self {
        0
    }
    fn one_c() -> Self {
        1
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_zero_c(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn cadd(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn csub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn cmul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg_c(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd_c(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_c(&self, o: &Self) -> Self {
        self / o
    }
}

impl Coef for BigInt {
    fn zero_c() -> Self {
        BigInt::zero()
    }
    fn one_c() -> Self {
        BigInt::one()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn cadd(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn csub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn cmul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg_c(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd_c(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_c(&self, o: &Self) -> Self {
        self / o
    }
}

/// Lossless widening into a kernel coefficient type.
trait Widen<T> {
    fn widen(&self) -> T;
}
impl Widen<i128> for i64 {
    fn widen(&self) -> i128 {
        *self as i128
    }
}
impl Widen<BigInt> for i64 {
    fn widen(&self) -> BigInt {
        BigInt::from(*self)
    }
}
impl Widen<BigInt> for BigInt {
    fn widen(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Small { num: Vec<i64>, den: i64 },
    Big { num: Vec<BigInt>, den: BigInt },
}

/// An element of Q(ζ_N) in canonical reduced form.
#[derive(Clone)]
pub struct CycloNum {
    field: &'static CycloField,
    repr: Repr,
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.order == other.field.order && self.repr == other.repr
    }
}
impl Eq for CycloNum {}

impl Hash for CycloNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.order.hash(state);
        self.repr.hash(state);
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Canonicalize a numerator/denominator pair: trim, clear the common
/// content, make the denominator positive.
fn canon<T: Coef>(mut num: Vec<T>, mut den: T) -> (Vec<T>, T) {
    trim(&mut num);
    if num.is_empty() {
        return (num, T::one_c());
    }
    if den != T::one_c() {
        let mut g = den.clone();
        for c in &num {
            if g == T::one_c() {
                break;
            }
            if !c.is_zero_c() {
                g = g.gcd_c(c);
            }
        }
        if g.is_neg() {
            g = g.neg_c().expect("gcd negation");
        }
        if g != T::one_c() {
            for c in num.iter_mut() {
                *c = c.div_c(&g);
            }
            den = den.div_c(&g);
        }
        if den.is_neg() {
            for c in num.iter_mut() {
                *c = c.neg_c().expect("negation of reduced value");
            }
            den = den.neg_c().expect("negation of reduced value");
        }
    }
    (num, den)
}

fn reduce_mod_phi<T: Coef>(field: &CycloField, v: &mut Vec<T>) -> Option<()> {
    let d = field.degree;
    let mut k = v.len();
    while k > d {
        k -= 1;
        let c = v[k].clone();
        if c.is_zero_c() {
            continue;
        }
        for (i, p) in field.phi[..d].iter().enumerate() {
            if *p != 0 {
                let t = c.cmul(&T::from_i64(*p))?;
                v[k - d + i] = v[k - d + i].csub(&t)?;
            }
        }
    }
    v.truncate(d);
    Some(())
}

fn add_kernel<T: Coef, A: Widen<T>, B: Widen<T>>(
    an: &[A],
    ad: &A,
    bn: &[B],
    bd: &B,
    negate_b: bool,
) -> Option<(Vec<T>, T)> {
    let ad: T = ad.widen();
    let bd: T = bd.widen();
    let len = an.len().max(bn.len());
    let mut out = Vec::with_capacity(len);
    let same = ad == bd;
    for i in 0..len {
        let a: T = an.get(i).map(|x| x.widen()).unwrap_or_else(T::zero_c);
        let b: T = bn.get(i).map(|x| x.widen()).unwrap_or_else(T::zero_c);
        let (a, b) = if same { (a, b) } else { (a.cmul(&bd)?, b.cmul(&ad)?) };
        out.push(if negate_b { a.csub(&b)? } else { a.cadd(&b)? });
    }
    let den = if same { ad } else { ad.cmul(&bd)? };
    Some(canon(out, den))
}

fn mul_kernel<T: Coef, A: Widen<T>, B: Widen<T>>(
    field: &CycloField,
    an: &[A],
    ad: &A,
    bn: &[B],
    bd: &B,
) -> Option<(Vec<T>, T)> {
    if an.is_empty() || bn.is_empty() {
        return Some((Vec::new(), T::one_c()));
    }
    let mut out = vec![T::zero_c(); an.len() + bn.len() - 1];
    let bw: Vec<T> = bn.iter().map(|x| x.widen()).collect();
    for (i, a) in an.iter().enumerate() {
        let a: T = a.widen();
        if a.is_zero_c() {
            continue;
        }
        for (j, b) in bw.iter().enumerate() {
            if b.is_zero_c() {
                continue;
            }
            out[i + j] = out[i + j].cadd(&a.cmul(b)?)?;
        }
    }
    reduce_mod_phi(field, &mut out)?;
    let ad: T = ad.widen();
    let bd: T = bd.widen();
    let den = ad.cmul(&bd)?;
    Some(canon(out, den))
}

fn small_from_i128(num: Vec<i128>, den: i128) -> Repr {
    let fits = |v: &i128| v.unsigned_abs() < SMALL_BOUND as u128;
    if fits(&den) && num.iter().all(fits) {
        Repr::Small { num: num.into_iter().map(|v| v as i64).collect(), den: den as i64 }
    } else {
        Repr::Big { num: num.into_iter().map(BigInt::from).collect(), den: BigInt::from(den) }
    }
}

fn repr_from_big(num: Vec<BigInt>, den: BigInt) -> Repr {
    let small = |v: &BigInt| v.to_i64().filter(|x| x.unsigned_abs() < SMALL_BOUND as u64);
    if let Some(d) = small(&den) {
        let mut out = Vec::with_capacity(num.len());
        for c in &num {
            match small(c) {
                Some(v) => out.push(v),
                None => return Repr::Big { num, den },
            }
        }
        return Repr::Small { num: out, den: d };
    }
    Repr::Big { num, den }
}

fn big_parts(r: &Repr) -> (Vec<BigInt>, BigInt) {
    match r {
        Repr::Small { num, den } => (num.iter().map(|v| BigInt::from(*v)).collect(), BigInt::from(*den)),
        Repr::Big { num, den } => (num.clone(), den.clone()),
    }
}

impl CycloNum {
    pub fn zero(order: u32) -> CycloNum {
        CycloNum { field: CycloField::get(order), repr: Repr::Small { num: Vec::new(), den: 1 } }
    }

    pub fn one(order: u32) -> CycloNum {
        CycloNum::from_int(order, 1)
    }

    pub fn from_int(order: u32, v: i64) -> CycloNum {
        let field = CycloField::get(order);
        CycloNum { field, repr: repr_from_big(canon(vec![BigInt::from(v)], BigInt::one()).0, BigInt::one()) }
    }

    pub fn from_rational(order: u32, r: &Rational) -> CycloNum {
        let field = CycloField::get(order);
        let (num, den) = canon(vec![r.numer().clone()], r.denom().clone());
        CycloNum { field, repr: repr_from_big(num, den) }
    }

    /// Build from power-basis coefficients of any length; reduces mod Φ_N.
    pub fn from_coeffs(order: u32, coeffs: &[Rational]) -> CycloNum {
        let field = CycloField::get(order);
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let mut num: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        reduce_mod_phi(field, &mut num).expect("big arithmetic is total");
        let (num, den) = canon(num, den);
        CycloNum { field, repr: repr_from_big(num, den) }
    }

    /// ζ_N^t, with t taken mod N.
    pub fn root(order: u32, t: i64) -> CycloNum {
        let field = CycloField::get(order);
        let t = t.rem_euclid(order as i64) as usize;
        CycloNum { field, repr: Repr::Small { num: field.powers[t].clone(), den: 1 } }
    }

    pub fn order(&self) -> u32 {
        self.field.order
    }

    pub fn field(&self) -> &'static CycloField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, Repr::Small { num, .. } if num.is_empty())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.repr, Repr::Small { num, den: 1 } if num.len() == 1 && num[0] == 1)
    }

    /// Power-basis coefficients, length φ(N).
    pub fn coeffs(&self) -> Vec<Rational> {
        let (num, den) = big_parts(&self.repr);
        let mut out: Vec<Rational> = num.into_iter().map(|c| Rational::new(c, den.clone())).collect();
        out.resize(self.field.degree, Rational::zero());
        out
    }

    /// The rational value if the element lies in Q.
    pub fn to_rational(&self) -> Option<Rational> {
        let (num, den) = big_parts(&self.repr);
        match num.len() {
            0 => Some(Rational::zero()),
            1 => Some(Rational::new(num[0].clone(), den)),
            _ => None,
        }
    }

    /// t with self = ζ_N^t, if self is an N-th root of unity.
    pub fn root_exponent(&self) -> Option<u32> {
        if let Repr::Small { num, den: 1 } = &self.repr {
            for (t, p) in self.field.powers.iter().enumerate() {
                if p == num {
                    return Some(t as u32);
                }
            }
        }
        None
    }

    fn check_order(&self, other: &CycloNum) {
        if self.field.order != other.field.order {
            panic!("{}", CycloError::OrderMismatch(self.field.order, other.field.order));
        }
    }

    fn add_impl(&self, other: &CycloNum, negate: bool) -> CycloNum {
        self.check_order(other);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) => {
                match add_kernel::<i128, i64, i64>(an, ad, bn, bd, negate) {
                    Some((n, d)) => small_from_i128(n, d),
                    None => {
                        let (n, d) = add_kernel::<BigInt, i64, i64>(an, ad, bn, bd, negate).expect("total");
                        repr_from_big(n, d)
                    }
                }
            }
            _ => {
                let (an, ad) = big_parts(&self.repr);
                let (bn, bd) = big_parts(&other.repr);
                let (n, d) = add_kernel::<BigInt, BigInt, BigInt>(&an, &ad, &bn, &bd, negate).expect("total");
                repr_from_big(n, d)
            }
        };
        CycloNum { field: self.field, repr }
    }

    fn mul_impl(&self, other: &CycloNum) -> CycloNum {
        self.check_order(other);
        if self.is_zero() || other.is_zero() {
            return CycloNum::zero(self.field.order);
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) => {
                match mul_kernel::<i128, i64, i64>(self.field, an, ad, bn, bd) {
                    Some((n, d)) => small_from_i128(n, d),
                    None => {
                        let (n, d) = mul_kernel::<BigInt, i64, i64>(self.field, an, ad, bn, bd).expect("total");
                        repr_from_big(n, d)
                    }
                }
            }
            _ => {
                let (an, ad) = big_parts(&self.repr);
                let (bn, bd) = big_parts(&other.repr);
                let (n, d) = mul_kernel::<BigInt, BigInt, BigInt>(self.field, &an, &ad, &bn, &bd).expect("total");
                repr_from_big(n, d)
            }
        };
        CycloNum { field: self.field, repr }
    }

    pub fn scale_int(&self, k: i64) -> CycloNum {
        self * &CycloNum::from_int(self.order(), k)
    }

    pub fn scale_rational(&self, r: &Rational) -> CycloNum {
        self * &CycloNum::from_rational(self.order(), r)
    }

    /// Multiplicative inverse. A single power-basis term c·ζ^k is inverted
    /// directly; otherwise the φ(N)×φ(N) system (mult-by-self)·y = 1 is solved.
    pub fn inverse(&self) -> Result<CycloNum, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        let (num, den) = big_parts(&self.repr);
        let nz: Vec<usize> = (0..num.len()).filter(|&i| !num[i].is_zero()).collect();
        if nz.len() == 1 {
            let k = nz[0] as i64;
            let c = Rational::new(den, num[nz[0]].clone());
            return Ok(CycloNum::root(self.order(), -k).scale_rational(&c));
        }
        let d = self.field.degree;
        // column j = self * x^j
        let mut m = vec![vec![Rational::zero(); d]; d];
        for j in 0..d {
            let col = self * &CycloNum::root(self.order(), j as i64);
            for (i, c) in col.coeffs().into_iter().enumerate() {
                m[i][j] = c;
            }
        }
        let mut rhs = vec![Rational::zero(); d];
        rhs[0] = Rational::one();
        let sol = linalg::solve_rational(m, rhs).ok_or(CycloError::DivisionByZero)?;
        Ok(CycloNum::from_coeffs(self.order(), &sol))
    }

    pub fn div(&self, other: &CycloNum) -> Result<CycloNum, CycloError> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<CycloNum, CycloError> {
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycloNum::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Image under Q(ζ_N) ⊂ Q(ζ_M), ζ_N ↦ ζ_M^{M/N}.
    pub fn embed(&self, target: u32) -> Result<CycloNum, CycloError> {
        let n = self.order();
        if target % n != 0 {
            return Err(CycloError::BadEmbedding { from: n, to: target });
        }
        let step = (target / n) as i64;
        let mut acc = CycloNum::zero(target);
        for (t, c) in self.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc += &CycloNum::root(target, t as i64 * step).scale_rational(c);
            }
        }
        Ok(acc)
    }

    /// Galois conjugate ζ ↦ ζ^k for k coprime to N.
    pub fn galois(&self, k: i64) -> CycloNum {
        let mut acc = CycloNum::zero(self.order());
        for (t, c) in self.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc += &CycloNum::root(self.order(), t as i64 * k).scale_rational(c);
            }
        }
        acc
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cyc({}){{", self.field.order)?;
        let mut first = true;
        for (t, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            if c.denom().is_one() {
                write!(f, "{}:{}", t, c.numer())?;
            } else {
                write!(f, "{}:{}/{}", t, c.numer(), c.denom())?;
            }
        }
        write!(f, "}}")
    }
}

impl FromStr for CycloNum {
    type Err = CycloError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CycloError::Parse(s.to_string());
        let s = s.trim();
        let rest = s.strip_prefix("cyc(").ok_or_else(err)?;
        let close = rest.find(')').ok_or_else(err)?;
        let order: u32 = rest[..close].trim().parse().map_err(|_| err())?;
        if order == 0 {
            return Err(err());
        }
        let body = rest[close + 1..].trim();
        let body = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')).ok_or_else(err)?;
        let degree = totient(order) as usize;
        let mut coeffs = vec![Rational::zero(); degree];
        for item in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (t, v) = item.split_once(':').ok_or_else(err)?;
            let t: usize = t.trim().parse().map_err(|_| err())?;
            if t >= degree {
                return Err(err());
            }
            let v = v.trim();
            let r = match v.split_once('/') {
                Some((p, q)) => {
                    let p: BigInt = p.trim().parse().map_err(|_| err())?;
                    let q: BigInt = q.trim().parse().map_err(|_| err())?;
                    if q.is_zero() {
                        return Err(err());
                    }
                    Rational::new(p, q)
                }
                None => Rational::from_integer(v.parse().map_err(|_| err())?),
            };
            coeffs[t] += r;
        }
        Ok(CycloNum::from_coeffs(order, &coeffs))
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        let repr = match &self.repr {
            Repr::Small { num, den } => Repr::Small { num: num.iter().map(|v| -v).collect(), den: *den },
            Repr::Big { num, den } => Repr::Big { num: num.iter().map(|v| -v).collect(), den: den.clone() },
        };
        CycloNum { field: self.field, repr }
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&CycloNum> for &CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: &CycloNum) -> CycloNum {
                $body(self, rhs)
            }
        }
        impl $tr<CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                $body(&self, &rhs)
            }
        }
        impl $tr<&CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: &CycloNum) -> CycloNum {
                $body(&self, rhs)
            }
        }
        impl $tr<CycloNum> for &CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                $body(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &CycloNum, b: &CycloNum| a.add_impl(b, false));
binop!(Sub, sub, |a: &CycloNum, b: &CycloNum| a.add_impl(b, true));
binop!(Mul, mul, |a: &CycloNum, b: &CycloNum| a.mul_impl(b));

impl AddAssign<&CycloNum> for CycloNum {
    fn add_assign(&mut self, rhs: &CycloNum) {
        *self = self.add_impl(rhs, false);
    }
}
impl SubAssign<&CycloNum> for CycloNum {
    fn sub_assign(&mut self, rhs: &CycloNum) {
        *self = self.add_impl(rhs, true);
    }
}
impl MulAssign<&CycloNum> for CycloNum {
    fn mul_assign(&mut self, rhs: &CycloNum) {
        *self = self.mul_impl(rhs);
    }
}

/// binom(l+m, l)_h by the q-Pascal recurrence.
pub fn q_binomial(l: usize, m: usize, h: &CycloNum) -> CycloNum {
    let n = l + m;
    let order = h.order();
    let mut hp = Vec::with_capacity(n + 1);
    let mut cur = CycloNum::one(order);
    for _ in 0..=n {
        hp.push(cur.clone());
        cur = &cur * h;
    }
    // row[b] = binom(a, b)_h
    let mut row = vec![CycloNum::one(order)];
    for a in 1..=n {
        let mut next = Vec::with_capacity(a + 1);
        next.push(CycloNum::one(order));
        for b in 1..=a.min(l) {
            let left = row[b - 1].clone();
            let right = row.get(b).map(|r| &hp[b] * r).unwrap_or_else(|| CycloNum::zero(order));
            next.push(left + right);
        }
        row = next;
    }
    row[l].clone()
}

/// binom(l+m, l)_h as Π_{k≤l+m}(1−h^k) / (Π_{k≤l}(1−h^k)·Π_{k≤m}(1−h^k)),
/// or None when a denominator factor vanishes.
pub fn q_binomial_product(l: usize, m: usize, h: &CycloNum) -> Option<CycloNum> {
    let order = h.order();
    let one = CycloNum::one(order);
    let fact = |k: usize| -> CycloNum {
        let mut acc = one.clone();
        let mut hp = one.clone();
        for _ in 0..k {
            hp = &hp * h;
            acc = &acc * &(&one - &hp);
        }
        acc
    };
    let den = fact(l) * fact(m);
    fact(l + m).div(&den).ok()
}

/// ⌊a/b⌋.
pub fn floor_frac(a: i64, b: i64) -> i64 {
    assert!(b > 0, "floor_frac: divisor must be positive");
    a.div_euclid(b)
}

/// a mod n in [0, n).
pub fn remainder(a: i64, n: i64) -> i64 {
    assert!(n > 0, "remainder: modulus must be positive");
    a.rem_euclid(n)
}

/// The field constants for parameters (n, s): M = 2n², q = ζ_M², ŏ = q^n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constants {
    pub n: u32,
    pub order: u32,
}

impl Constants {
    pub fn new(n: u32) -> Constants {
        Constants { n, order: 2 * n * n }
    }

    /// q^t.
    pub fn q(&self, t: i64) -> CycloNum {
        CycloNum::root(self.order, 2 * t)
    }

    /// ŏ^t with ŏ = q^n.
    pub fn o(&self, t: i64) -> CycloNum {
        CycloNum::root(self.order, 2 * self.n as i64 * t)
    }

    pub fn zero(&self) -> CycloNum {
        CycloNum::zero(self.order)
    }

    pub fn one(&self) -> CycloNum {
        CycloNum::one(self.order)
    }

    pub fn int(&self, v: i64) -> CycloNum {
        CycloNum::from_int(self.order, v)
    }

    pub fn ratio(&self, p: i64, q: i64) -> CycloNum {
        CycloNum::from_rational(self.order, &Rational::new(p.into(), q.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|x| BigInt::from(*x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), big(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), big(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), big(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(18), big(&[1, 0, 0, -1, 0, 0, 1]));
        for n in 1..60 {
            assert_eq!(cyclotomic_polynomial(n).len() - 1, totient(n) as usize);
        }
    }

    #[test]
    fn roots_and_primitivity() {
        assert_eq!(CycloNum::root(4, 2), CycloNum::from_int(4, -1));
        assert_eq!(CycloNum::root(8, 4), CycloNum::from_int(8, -1));
        for n in [1u32, 2, 3, 5, 8, 12, 18, 32, 72] {
            assert!(CycloNum::root(n, n as i64).is_one());
            for t in 1..n as i64 {
                assert!(!CycloNum::root(n, t).is_one());
            }
        }
    }

    #[test]
    fn geometric_sum_vanishes() {
        for n in 2..20u32 {
            let mut s = CycloNum::zero(n);
            for j in 0..n as i64 {
                s += &CycloNum::root(n, j);
            }
            assert!(s.is_zero(), "n = {n}");
        }
        let x = (CycloNum::one(3) + CycloNum::root(3, 1) + CycloNum::root(3, 2)).scale_int(7);
        assert!(x.is_zero());
    }

    #[test]
    fn inverse_of_roots_and_general() {
        for t in 0..18 {
            assert_eq!(CycloNum::root(18, t).inverse().unwrap(), CycloNum::root(18, 18 - t));
        }
        let a = CycloNum::one(18) + CycloNum::root(18, 1).scale_int(3) - CycloNum::root(18, 4);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
        assert_eq!(CycloNum::zero(5).inverse(), Err(CycloError::DivisionByZero));
    }

    #[test]
    fn literal_round_trip() {
        let a = CycloNum::root(8, 1).scale_rational(&Rational::new(3.into(), 2.into())) - CycloNum::one(8);
        let s = a.to_string();
        assert_eq!(s, "cyc(8){0:-1, 1:3/2}");
        assert_eq!(s.parse::<CycloNum>().unwrap(), a);
        assert_eq!("cyc(4){}".parse::<CycloNum>().unwrap(), CycloNum::zero(4));
        assert!("cyc(4){2:1}".parse::<CycloNum>().is_err());
        assert!("cy(4){}".parse::<CycloNum>().is_err());
    }

    #[test]
    fn big_fallback_is_exact() {
        let mut a = CycloNum::from_int(6, 1 << 30);
        for _ in 0..4 {
            a = &a * &a;
        }
        let expected = BigInt::from(2).pow(480u32);
        assert_eq!(a.to_rational().unwrap(), Rational::from_integer(expected));
        let back = &a * &a.inverse().unwrap();
        assert!(back.is_one());
        let small = &a - &a;
        assert!(small.is_zero());
    }

    #[test]
    fn embedding_preserves_roots() {
        for t in 0..6 {
            assert_eq!(CycloNum::root(6, t).embed(18).unwrap(), CycloNum::root(18, 3 * t));
        }
        assert!(CycloNum::one(4).embed(6).is_err());
    }

    #[test]
    fn q_binomial_basics() {
        let h = CycloNum::root(12, 1);
        assert_eq!(q_binomial(1, 1, &h), CycloNum::one(12) + &h);
        assert_eq!(q_binomial(3, 4, &CycloNum::one(12)), CycloNum::from_int(12, 35));
        assert!(q_binomial(1, 1, &CycloNum::from_int(2, -1)).is_zero());
        assert!(q_binomial(0, 5, &h).is_one());
        assert!(q_binomial(5, 0, &h).is_one());
    }

    #[test]
    fn q_binomial_product_agrees() {
        let h = CycloNum::root(7, 1);
        for l in 0..5 {
            for m in 0..5 {
                assert_eq!(q_binomial_product(l, m, &h), Some(q_binomial(l, m, &h)));
            }
        }
        assert_eq!(q_binomial_product(2, 1, &CycloNum::from_int(2, -1)), None);
    }

    #[test]
    fn lemma_floor_identity_small() {
        assert_eq!(floor_frac(2 + remainder(4, 3), 3), 1);
        assert_eq!(floor_frac(6, 3) - floor_frac(4, 3), 1);
        assert_eq!(remainder(-1, 4), 3);
    }

    fn arb_cyc(order: u32) -> impl Strategy<Value = CycloNum> {
        let d = totient(order) as usize;
        prop::collection::vec((-50i64..50, 1i64..6), d).prop_map(move |cs| {
            let coeffs: Vec<Rational> = cs.iter().map(|(p, q)| Rational::new((*p).into(), (*q).into())).collect();
            CycloNum::from_coeffs(order, &coeffs)
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_cyc(18), b in arb_cyc(18), c in arb_cyc(18)) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inverse().unwrap()).is_one());
            }
        }

        #[test]
        fn literal_parse_inverts_display(a in arb_cyc(32)) {
            prop_assert_eq!(a.to_string().parse::<CycloNum>().unwrap(), a);
        }
    }
}
