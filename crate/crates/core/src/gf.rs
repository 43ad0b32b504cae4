//! Exact arithmetic over prime-power finite fields GF(p^r), q = p^r <= 2^16.
//!
//! Elements are stored in the polynomial basis and addressed by their
//! canonical integer code `sum_i c_i * p^i` where `(c_0, ..., c_{r-1})` are
//! the basis coefficients. Multiplication and inversion are table-driven for
//! q <= 256 and fall back to generic polynomial reduction above that, so the
//! exhaustive invariant checks stay cheap where they are exhaustive.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Canonical integer encoding of a field element (valid codes are `< q`).
pub type Symbol = u16;

/// A word over a field: a vector of element codes.
pub type Word = Vec<Symbol>;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

/// Fields up to this size carry full multiplication / inversion tables.
pub const TABLE_SIZE_CAP: u32 = 256;

/// Modulus selection for [`Field::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Modulus {
    /// Pick the smallest irreducible monic polynomial of the right degree
    /// (coefficient vectors compared as base-p integers, degree-major).
    Auto,
    /// Explicit coefficient list, low degree first, length r+1, monic.
    Coeffs(Vec<u32>),
}

/// Compact fingerprint tying a [`FieldElement`] to the field it came from.
/// Two fields with identical (p, r, modulus) interoperate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldId(u64);

/// An element together with its field fingerprint; the checked counterpart
/// of raw [`Symbol`] codes for API boundaries that must reject mixed fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    code: Symbol,
    field: FieldId,
}

impl FieldElement {
    pub fn code(&self) -> Symbol {
        self.code
    }
}

/// A validated finite field GF(p^r).
pub struct Field {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    id: FieldId,
    mul_table: Option<Vec<u16>>,
    inv_table: Option<Vec<u16>>,
    trace_table: Vec<u16>,
    /// p-th roots of unity, omega^j for j in [0, p). Exact for p = 2.
    roots: Vec<Complex64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.r)
        }
    }
}

impl Field {
    /// Construct GF(p^r). The modulus is verified irreducible by exhaustive
    /// trial division; a reducible modulus is rejected with a found factor.
    pub fn new(p: u32, r: u32, modulus: Modulus) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::CompositeCharacteristic(p));
        }
        if r < 1 {
            return Err(Error::InvalidDegree);
        }
        let q = checked_pow(p, r)?;

        let modulus = match modulus {
            Modulus::Auto => smallest_irreducible(p, r),
            Modulus::Coeffs(coeffs) => {
                let ok = coeffs.len() == r as usize + 1
                    && coeffs.last() == Some(&1)
                    && coeffs.iter().all(|&c| c < p);
                if !ok {
                    return Err(Error::BadModulus {
                        expected: r,
                        got: coeffs,
                    });
                }
                if let Some(factor) = find_factor(&coeffs, p) {
                    return Err(Error::ReducibleModulus { factor });
                }
                coeffs
            }
        };

        let id = FieldId(fingerprint(p, r, &modulus));
        let mut field = Field {
            p,
            r,
            q,
            modulus,
            id,
            mul_table: None,
            inv_table: None,
            trace_table: Vec::new(),
            roots: roots_of_unity(p),
        };
        if q <= TABLE_SIZE_CAP {
            field.build_tables();
        }
        field.build_trace_table();
        Ok(Arc::new(field))
    }

    /// Prime field shorthand.
    pub fn prime(p: u32) -> Result<Arc<Field>> {
        Field::new(p, 1, Modulus::Auto)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn id(&self) -> FieldId {
        self.id
    }

    /// Writeable form of q for file headers: "p" or "p^r".
    pub fn q_label(&self) -> String {
        if self.r == 1 {
            format!("{}", self.p)
        } else {
            format!("{}^{}", self.p, self.r)
        }
    }

    /// Polynomial-basis coefficients of an element code.
    pub fn coeffs(&self, x: Symbol) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.r as usize);
        let mut n = u32::from(x);
        for _ in 0..self.r {
            v.push(n % self.p);
            n /= self.p;
        }
        v
    }

    /// Element code from polynomial-basis coefficients (checked).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Symbol> {
        if coeffs.len() > self.r as usize {
            return Err(Error::NotAnElement(
                coeffs.len() as u32,
                format!("{} (too many coefficients)", self),
            ));
        }
        let mut code: u32 = 0;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.p {
                return Err(Error::NotAnElement(c, self.to_string()));
            }
            code += c * self.p.pow(i as u32);
        }
        Ok(code as Symbol)
    }

    pub fn contains(&self, x: Symbol) -> bool {
        u32::from(x) < self.q
    }

    fn check(&self, x: Symbol) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::NotAnElement(u32::from(x), self.to_string()))
        }
    }

    /// Checked element handle for the mixed-field-rejecting API.
    pub fn element(&self, code: Symbol) -> Result<FieldElement> {
        self.check(code)?;
        Ok(FieldElement {
            code,
            field: self.id,
        })
    }

    fn own(&self, e: FieldElement) -> Result<Symbol> {
        if e.field != self.id {
            return Err(Error::MixedFields);
        }
        Ok(e.code)
    }

    // ---- raw symbol arithmetic (codes must be < q) ----

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        debug_assert!(self.contains(a) && self.contains(b));
        if self.p == 2 {
            return a ^ b;
        }
        let (mut out, mut mult) = (0u32, 1u32);
        let (mut x, mut y) = (u32::from(a), u32::from(b));
        for _ in 0..self.r {
            out += ((x + y) % self.p) * mult;
            x /= self.p;
            y /= self.p;
            mult *= self.p;
        }
        out as Symbol
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        debug_assert!(self.contains(a));
        if self.p == 2 {
            return a;
        }
        let (mut out, mut mult) = (0u32, 1u32);
        let mut x = u32::from(a);
        for _ in 0..self.r {
            out += ((self.p - x % self.p) % self.p) * mult;
            x /= self.p;
            mult *= self.p;
        }
        out as Symbol
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        debug_assert!(self.contains(a) && self.contains(b));
        if let Some(t) = &self.mul_table {
            return t[usize::from(a) * self.q as usize + usize::from(b)];
        }
        self.mul_generic(a, b)
    }

    fn mul_generic(&self, a: Symbol, b: Symbol) -> Symbol {
        let pa = self.coeffs(a);
        let pb = self.coeffs(b);
        let mut prod = vec![0u32; 2 * self.r as usize];
        for (i, &ca) in pa.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in pb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ca * cb) % self.p;
            }
        }
        poly_rem_in_place(&mut prod, &self.modulus, self.p);
        let mut code = 0u32;
        for (i, &c) in prod.iter().take(self.r as usize).enumerate() {
            code += c * self.p.pow(i as u32);
        }
        code as Symbol
    }

    /// `a^e` by square and multiply.
    pub fn pow(&self, a: Symbol, mut e: u64) -> Symbol {
        let mut base = a;
        let mut acc: Symbol = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Symbol) -> Result<Symbol> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        if let Some(t) = &self.inv_table {
            return Ok(t[usize::from(a)]);
        }
        // a^(q-2) = a^{-1} in GF(q)*.
        Ok(self.pow(a, u64::from(self.q) - 2))
    }

    // ---- checked FieldElement arithmetic ----

    pub fn add_elem(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let (a, b) = (self.own(a)?, self.own(b)?);
        self.element(self.add(a, b))
    }

    pub fn mul_elem(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let (a, b) = (self.own(a)?, self.own(b)?);
        self.element(self.mul(a, b))
    }

    pub fn inv_elem(&self, a: FieldElement) -> Result<FieldElement> {
        let a = self.own(a)?;
        self.element(self.inv(a)?)
    }

    // ---- trace and character sums ----

    /// Trace to the prime subfield, tr(x) = sum of x^(p^i) for i < r,
    /// returned as a residue in [0, p).
    #[inline]
    pub fn trace(&self, x: Symbol) -> u32 {
        debug_assert!(self.contains(x));
        u32::from(self.trace_table[usize::from(x)])
    }

    /// Complex character sum over a word: sum_i omega^{tr(a * w_i)} with
    /// omega = exp(2 pi i / p). Requires a != 0 (the sum is trivially the
    /// word length otherwise).
    pub fn char_sum(&self, word: &[Symbol], a: Symbol) -> Result<Complex64> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroCharacterMultiplier);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &w in word {
            self.check(w)?;
            acc += self.roots[self.trace(self.mul(a, w)) as usize];
        }
        Ok(acc)
    }

    // ---- construction helpers ----

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            for b in a..q {
                let v = self.mul_generic(a as Symbol, b as Symbol);
                mul[a * q + b] = v;
                mul[b * q + a] = v;
            }
        }
        let mut inv = vec![0u16; q];
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u16;
                    break;
                }
            }
            assert_ne!(inv[a], 0, "every nonzero element must have an inverse");
        }
        self.mul_table = Some(mul);
        self.inv_table = Some(inv);
    }

    fn build_trace_table(&mut self) {
        let mut table = vec![0u16; self.q as usize];
        for x in 0..self.q {
            let x = x as Symbol;
            let mut acc = x;
            let mut frob = x;
            for _ in 1..self.r {
                frob = self.pow(frob, u64::from(self.p));
                acc = self.add(acc, frob);
            }
            // The trace lands in the prime subfield, so the code is the residue.
            assert!(
                u32::from(acc) < self.p,
                "trace of {} left the prime subfield",
                x
            );
            table[x as usize] = acc;
        }
        self.trace_table = table;
    }
}

fn roots_of_unity(p: u32) -> Vec<Complex64> {
    if p == 2 {
        // Exact, so binary character sums are exact integers in f64.
        return vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    }
    (0..p)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * f64::from(j) / f64::from(p);
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

fn fingerprint(p: u32, r: u32, modulus: &[u32]) -> u64 {
    // FNV-1a over the defining data.
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    let mut eat = |v: u64| {
        h ^= v;
        h = h.wrapping_mul(0x100_0000_01b3);
    };
    eat(u64::from(p));
    eat(u64::from(r));
    for &c in modulus {
        eat(u64::from(c));
    }
    h
}

fn checked_pow(p: u32, r: u32) -> Result<u32> {
    let mut q: u64 = 1;
    for _ in 0..r {
        q *= u64::from(p);
        if q > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge { q });
        }
    }
    Ok(q as u32)
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `poly` modulo the monic `modulus`, in place (coefficients
/// low to high, arithmetic mod p). The result occupies the low
/// `modulus.len() - 1` coefficients.
fn poly_rem_in_place(poly: &mut [u32], modulus: &[u32], p: u32) {
    let deg_m = modulus.len() - 1;
    for i in (deg_m..poly.len()).rev() {
        let c = poly[i];
        if c == 0 {
            continue;
        }
        poly[i] = 0;
        // Subtract c * x^(i - deg_m) * modulus.
        for (j, &mc) in modulus.iter().enumerate().take(deg_m) {
            let idx = i - deg_m + j;
            poly[idx] = (poly[idx] + p * p - (c * mc) % p) % p;
        }
    }
}

fn poly_is_zero(poly: &[u32]) -> bool {
    poly.iter().all(|&c| c == 0)
}

/// Search for a monic factor of degree 1..=deg/2 by trial division.
/// Returns the smallest factor found (base-p integer order).
fn find_factor(modulus: &[u32], p: u32) -> Option<Vec<u32>> {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for n in 0..count {
            let mut cand = digits(n, p, d);
            cand.push(1); // monic of degree d
            let mut rem = modulus.to_vec();
            poly_rem_in_place(&mut rem, &cand, p);
            if poly_is_zero(&rem) {
                return Some(cand);
            }
        }
    }
    None
}

fn digits(mut n: u64, p: u32, len: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push((n % u64::from(p)) as u32);
        n /= u64::from(p);
    }
    v
}

/// Smallest irreducible monic polynomial of degree r over GF(p), ordering
/// candidate coefficient vectors as base-p integers (degree-major).
fn smallest_irreducible(p: u32, r: u32) -> Vec<u32> {
    let count = (p as u64).pow(r);
    for n in 0..count {
        let mut cand = digits(n, p, r as usize);
        cand.push(1);
        // A degree-1 polynomial is always irreducible; for higher degrees a
        // constant term of zero means x divides it, skip early.
        if r > 1 && cand[0] == 0 {
            continue;
        }
        if find_factor(&cand, p).is_none() {
            return cand;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}
