//! Arithmetic in a prime field `F_q` and its extensions `F_{q^n}`.
//!
//! Elements are stored as the base-`q` digit encoding of their coefficient
//! vector over the polynomial basis `{1, x, ..., x^(n-1)}`, so the element
//! `c_0 + c_1 x + ... + c_{n-1} x^(n-1)` is the integer `sum c_i q^i`. The
//! base field `F_q` embeds as the integers `0..q`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported field order.
const MAX_ORDER: u64 = 1 << 31;
/// Fields up to this order get log/antilog tables for multiplication.
const TABLE_ORDER: u64 = 1 << 16;

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over `F_q`, coefficients low-to-high.
pub(crate) mod poly {
    pub fn trim(p: &mut Vec<u64>) {
        while p.last() == Some(&0) {
            p.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % q;
            }
        }
        trim(&mut out);
        out
    }

    fn inv_mod(a: u64, q: u64) -> u64 {
        // q is prime: a^(q-2)
        let mut result = 1u64;
        let mut base = a % q;
        let mut e = q - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        result
    }

    /// Remainder of `a` modulo the nonzero polynomial `m`.
    pub fn rem(a: &[u64], m: &[u64], q: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], q);
        while r.len() > dm {
            let dr = r.len() - 1;
            let c = r[dr] * lead_inv % q;
            if c != 0 {
                for (k, &mk) in m.iter().enumerate() {
                    let idx = dr - dm + k;
                    r[idx] = (r[idx] + q - c * mk % q) % q;
                }
            }
            r.pop();
            trim(&mut r);
        }
        r
    }

    pub fn sub(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let len = a.len().max(b.len());
        let mut out: Vec<u64> = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + q - y) % q
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, q);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let li = inv_mod(lead, q);
            for c in a.iter_mut() {
                *c = *c * li % q;
            }
        }
        a
    }

    /// `base^(q^k) mod m`, by `k` successive `q`-th powers.
    pub fn frobenius_pow(base: &[u64], k: usize, m: &[u64], q: u64) -> Vec<u64> {
        let mut h = rem(base, m, q);
        for _ in 0..k {
            let mut acc = vec![1u64];
            let mut b = h.clone();
            let mut e = q;
            while e > 0 {
                if e & 1 == 1 {
                    acc = rem(&mul(&acc, &b, q), m, q);
                }
                b = rem(&mul(&b, &b, q), m, q);
                e >>= 1;
            }
            h = acc;
        }
        h
    }
}

/// Rabin irreducibility test for a monic `f` of degree `n >= 1` over `F_q`.
pub fn is_irreducible_poly(f: &[u64], q: u64) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    let x = [0u64, 1];
    if poly::frobenius_pow(&x, n, f, q) != poly::rem(&x, f, q) {
        return false;
    }
    prime_factors(n as u64).into_iter().all(|p| {
        let h = poly::frobenius_pow(&x, n / p as usize, f, q);
        let g = poly::sub(&h, &x, q);
        poly::gcd(&g, f, q) == vec![1]
    })
}

/// An element of some [`ExtFieldCtx`]. Carries no reference to its field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    /// The integer encoding `sum c_i q^i`.
    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    q: u64,
    n: usize,
    modulus: Vec<u64>,
    order: u64,
    tables: Option<Tables>,
}

/// Arithmetic context for `F_{q^n}` with a fixed irreducible modulus.
///
/// Cloning is cheap (shared, immutable).
#[derive(Clone)]
pub struct ExtFieldCtx {
    inner: Arc<Inner>,
}

impl PartialEq for ExtFieldCtx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.q == other.inner.q && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for ExtFieldCtx {}

impl fmt::Debug for ExtFieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.q(), self.degree(), self.modulus())
    }
}

/// Builds `F_{q^n}` using the monic irreducible modulus of degree `n` with
/// the smallest encoding `sum c_i q^i`.
pub fn make_ext_field(q: u64, n: usize) -> Result<ExtFieldCtx> {
    ExtFieldCtx::new(q, n)
}

impl ExtFieldCtx {
    pub fn new(q: u64, n: usize) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let order = checked_order(q, n).ok_or(Error::FieldTooLarge { q, n })?;
        let modulus = smallest_irreducible(q, n);
        Ok(Self::build(q, n, modulus, order))
    }

    /// Builds a context from an explicit modulus (monic, low-to-high).
    pub fn with_modulus(q: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if modulus.len() < 2 {
            return Err(Error::ZeroDegree);
        }
        let n = modulus.len() - 1;
        if modulus[n] != 1 || modulus.iter().any(|&c| c >= q) {
            return Err(Error::InvalidArgument(format!("modulus {modulus:?} is not a monic polynomial over F_{q}")));
        }
        if !is_irreducible_poly(&modulus, q) {
            return Err(Error::InvalidArgument(format!("modulus {modulus:?} is reducible over F_{q}")));
        }
        let order = checked_order(q, n).ok_or(Error::FieldTooLarge { q, n })?;
        Ok(Self::build(q, n, modulus, order))
    }

    /// The prime field `F_q` itself.
    pub fn base(q: u64) -> Result<Self> {
        Self::new(q, 1)
    }

    fn build(q: u64, n: usize, modulus: Vec<u64>, order: u64) -> Self {
        let mut ctx = ExtFieldCtx { inner: Arc::new(Inner { q, n, modulus, order, tables: None }) };
        if order <= TABLE_ORDER && order > 2 {
            let tables = ctx.build_tables();
            Arc::get_mut(&mut ctx.inner).expect("freshly built context is uniquely owned").tables = Some(tables);
        }
        ctx
    }

    fn build_tables(&self) -> Tables {
        let order = self.order();
        let group = order - 1;
        let factors = prime_factors(group);
        let generator = (2..order as u32)
            .map(FieldElem)
            .find(|&g| factors.iter().all(|&p| self.pow_slow(g, group / p) != self.one()))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; 2 * group as usize];
        let mut log = vec![0u32; order as usize];
        let mut cur = self.one();
        for i in 0..group as usize {
            exp[i] = cur.0;
            exp[i + group as usize] = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.mul_poly(cur, generator);
        }
        Tables { exp, log }
    }

    pub fn q(&self) -> u64 {
        self.inner.q
    }

    pub fn degree(&self) -> usize {
        self.inner.n
    }

    /// Monic modulus, low-to-high, length `degree + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    /// Number of field elements, `q^n`.
    pub fn order(&self) -> u64 {
        self.inner.order
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// The class of `x`; equals `0` when `n = 1` (modulus `x`).
    pub fn x(&self) -> FieldElem {
        if self.degree() == 1 {
            self.zero()
        } else {
            FieldElem(self.q() as u32)
        }
    }

    pub fn from_raw(&self, raw: u64) -> Result<FieldElem> {
        if raw >= self.order() {
            return Err(Error::OutOfRange { value: raw, q: self.order() });
        }
        Ok(FieldElem(raw as u32))
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.degree() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                self.degree()
            )));
        }
        let q = self.q();
        let mut raw = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= q {
                return Err(Error::OutOfRange { value: c, q });
            }
            raw = raw * q + c;
        }
        Ok(FieldElem(raw as u32))
    }

    /// Coefficients of `a` over `{1, x, ..., x^(n-1)}`, always length `n`.
    pub fn coeffs(&self, a: FieldElem) -> Vec<u64> {
        let q = self.q();
        let mut v = a.0 as u64;
        (0..self.degree())
            .map(|_| {
                let d = v % q;
                v /= q;
                d
            })
            .collect()
    }

    /// Constant-polynomial embedding of `F_q` into `F_{q^n}`.
    pub fn embed_base(&self, a: u64) -> Result<FieldElem> {
        if a >= self.q() {
            return Err(Error::OutOfRange { value: a, q: self.q() });
        }
        Ok(FieldElem(a as u32))
    }

    /// `Some(c)` if `a` lies in the prime subfield.
    pub fn as_base(&self, a: FieldElem) -> Option<u64> {
        ((a.0 as u64) < self.q()).then_some(a.0 as u64)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let q = self.q();
        if q == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        if self.degree() == 1 {
            return FieldElem(((a.0 as u64 + b.0 as u64) % q) as u32);
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        while x > 0 || y > 0 {
            out += ((x % q + y % q) % q) * place;
            x /= q;
            y /= q;
            place *= q;
        }
        FieldElem(out as u32)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let q = self.q();
        if q == 2 {
            return a;
        }
        let mut x = a.0 as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        while x > 0 {
            out += ((q - x % q) % q) * place;
            x /= q;
            place *= q;
        }
        FieldElem(out as u32)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        match &self.inner.tables {
            Some(t) => FieldElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None if self.degree() == 1 => FieldElem(((a.0 as u64 * b.0 as u64) % self.q()) as u32),
            None => self.mul_poly(a, b),
        }
    }

    fn mul_poly(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let q = self.q();
        if self.degree() == 1 {
            return FieldElem(((a.0 as u64 * b.0 as u64) % q) as u32);
        }
        let prod = poly::mul(&self.coeffs(a), &self.coeffs(b), q);
        let r = poly::rem(&prod, self.modulus(), q);
        self.from_coeffs(&r).expect("reduced polynomial fits the field")
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let group = self.order() - 1;
        Ok(match &self.inner.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as u64;
                FieldElem(t.exp[((group - l) % group) as usize])
            }
            None => self.pow(a, group - 1),
        })
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut result = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    fn pow_slow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut result = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_poly(result, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        result
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.order()) as u32)
    }

    /// All field elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order() as u32).map(FieldElem)
    }

    /// Renders an element as `c0:c1:...` (coefficients low-to-high).
    pub fn format_elem(&self, a: FieldElem) -> String {
        if self.degree() == 1 {
            return a.0.to_string();
        }
        self.coeffs(a).iter().map(u64::to_string).collect::<Vec<_>>().join(":")
    }

    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let coeffs = s
            .split(':')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::InvalidArgument(format!("bad field element `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        self.from_coeffs(&coeffs)
    }
}

fn checked_order(q: u64, n: usize) -> Option<u64> {
    let mut order = 1u64;
    for _ in 0..n {
        order = order.checked_mul(q)?;
        if order > MAX_ORDER {
            return None;
        }
    }
    Some(order)
}

fn smallest_irreducible(q: u64, n: usize) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1];
    }
    let count = q.pow(n as u32);
    (0..count)
        .map(|idx| {
            // scan by the integer encoding sum c_i q^i, so high-degree
            // coefficients decide first: (2, 3) gives x^3 + x + 1
            let mut f = vec![0u64; n + 1];
            let mut v = idx;
            for c in f.iter_mut().take(n) {
                *c = v % q;
                v /= q;
            }
            f[n] = 1;
            f
        })
        .find(|f| is_irreducible_poly(f, q))
        .expect("irreducible polynomials exist in every degree")
}
