//! Runtime extension fields GF(p^e), used only by the randomized rank path.
//!
//! Elements are little-endian coefficient vectors of length `e`, reduced
//! modulo a monic irreducible polynomial. The modulus is found by scanning
//! candidates in a fixed order and keeping the first that passes Rabin's
//! irreducibility test, so a given (p, e) always yields the same field.

use rand::Rng;

use crate::field::FieldSpec;

pub(crate) type ExtElem = Vec<u64>;

pub(crate) struct ExtField {
    base: FieldSpec,
    degree: usize,
    /// Monic modulus of degree `degree`, stored without the leading 1.
    modulus_tail: Vec<u64>,
}

impl ExtField {
    /// The smallest-degree extension of `base` with at least `min_order`
    /// elements.
    pub fn with_min_order(base: FieldSpec, min_order: u128) -> ExtField {
        let p = base.modulus() as u128;
        let mut degree = 1usize;
        let mut order = p;
        while order < min_order {
            order *= p;
            degree += 1;
        }
        let modulus_tail = find_irreducible(base, degree);
        ExtField {
            base,
            degree,
            modulus_tail,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn zero(&self) -> ExtElem {
        vec![0; self.degree]
    }

    pub fn is_zero(e: &ExtElem) -> bool {
        e.iter().all(|&c| c == 0)
    }

    pub fn from_base(&self, v: u64) -> ExtElem {
        let mut e = self.zero();
        e[0] = v % self.base.modulus();
        e
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> ExtElem {
        (0..self.degree)
            .map(|_| rng.gen_range(0..self.base.modulus()))
            .collect()
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| self.base.add_raw(x, y))
            .collect()
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| self.base.sub_raw(x, y))
            .collect()
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let f = self.base;
        let e = self.degree;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    prod[i + j] = f.add_raw(prod[i + j], f.mul_raw(ai, bj));
                }
            }
        }
        // Reduce x^(e+d) = -tail * x^d from the top down.
        for d in (e..prod.len()).rev() {
            let coeff = prod[d];
            if coeff == 0 {
                continue;
            }
            prod[d] = 0;
            for (t, &m) in self.modulus_tail.iter().enumerate() {
                if m != 0 {
                    let idx = d - e + t;
                    prod[idx] = f.sub_raw(prod[idx], f.mul_raw(coeff, m));
                }
            }
        }
        prod.truncate(e);
        prod
    }

    pub fn mul_base(&self, a: &ExtElem, s: u64) -> ExtElem {
        a.iter().map(|&x| self.base.mul_raw(x, s)).collect()
    }

    /// Inverse of a nonzero element, by the extended Euclidean algorithm in
    /// GF(p)[x] against the modulus.
    pub fn inv(&self, a: &ExtElem) -> ExtElem {
        debug_assert!(!Self::is_zero(a));
        let f = self.base;
        let mut modulus = self.modulus_tail.clone();
        modulus.push(1);
        let (mut r0, mut r1) = (modulus, trim(a.clone()));
        let (mut s0, mut s1) = (vec![], vec![1u64]);
        while !r1.is_empty() {
            let (q, rem) = poly_divmod(f, &r0, &r1);
            let s_next = poly_sub(f, &s0, &poly_mul(f, &q, &s1));
            (r0, r1) = (r1, rem);
            (s0, s1) = (s1, s_next);
        }
        // r0 is the gcd, a nonzero constant since the modulus is irreducible.
        debug_assert_eq!(r0.len(), 1);
        let scale = f.inv_raw(r0[0]);
        let mut out = self.zero();
        for (i, &c) in s0.iter().enumerate() {
            out[i] = f.mul_raw(c, scale);
        }
        out
    }
}

/// Exact rank of a row-major matrix of extension-field elements.
pub(crate) fn ext_rank(ef: &ExtField, mut m: Vec<Vec<ExtElem>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !ExtField::is_zero(&m[r][col])) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = ef.inv(&m[rank][col]);
        for r in rank + 1..rows {
            if ExtField::is_zero(&m[r][col]) {
                continue;
            }
            let factor = ef.mul(&m[r][col], &inv);
            for c in col..cols {
                let delta = ef.mul(&factor, &m[rank][c]);
                m[r][c] = ef.sub(&m[r][c], &delta);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

// --- dense polynomial helpers over GF(p), little-endian, no trailing zeros ---

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_mul(f: FieldSpec, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = f.add_raw(out[i + j], f.mul_raw(ai, bj));
        }
    }
    trim(out)
}

fn poly_sub(f: FieldSpec, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = f.sub_raw(x, y);
    }
    trim(out)
}

fn poly_divmod(f: FieldSpec, num: &[u64], den: &[u64]) -> (Vec<u64>, Vec<u64>) {
    debug_assert!(!den.is_empty());
    let mut rem = num.to_vec();
    if num.len() < den.len() {
        return (vec![], trim(rem));
    }
    let mut quot = vec![0u64; num.len() - den.len() + 1];
    let lead_inv = f.inv_raw(*den.last().unwrap());
    for shift in (0..quot.len()).rev() {
        let coeff = f.mul_raw(rem[shift + den.len() - 1], lead_inv);
        if coeff == 0 {
            continue;
        }
        quot[shift] = coeff;
        for (i, &d) in den.iter().enumerate() {
            rem[shift + i] = f.sub_raw(rem[shift + i], f.mul_raw(coeff, d));
        }
    }
    (trim(quot), trim(rem))
}

fn poly_gcd(f: FieldSpec, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    while !r1.is_empty() {
        let (_, rem) = poly_divmod(f, &r0, &r1);
        (r0, r1) = (r1, rem);
    }
    r0
}

/// x^exp mod m, by square and multiply.
fn poly_powmod_x(f: FieldSpec, exp: u128, m: &[u64]) -> Vec<u64> {
    let mut base = poly_divmod(f, &[0, 1], m).1;
    let mut acc = vec![1u64];
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_divmod(f, &poly_mul(f, &acc, &base), m).1;
        }
        base = poly_divmod(f, &poly_mul(f, &base, &base), m).1;
        e >>= 1;
    }
    acc
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

/// Rabin's test: f is irreducible over GF(p) iff x^(p^e) = x (mod f) and
/// gcd(x^(p^(e/q)) - x, f) = 1 for every prime q dividing e.
fn is_irreducible(f: FieldSpec, poly: &[u64]) -> bool {
    let e = poly.len() - 1;
    let p = f.modulus() as u128;
    let x_reduced = poly_divmod(f, &[0, 1], poly).1;
    let frob = poly_powmod_x(f, p.pow(e as u32), poly);
    if poly_sub(f, &frob, &x_reduced) != Vec::<u64>::new() {
        return false;
    }
    for q in prime_divisors(e) {
        let sub = poly_powmod_x(f, p.pow((e / q) as u32), poly);
        let diff = poly_sub(f, &sub, &x_reduced);
        let g = poly_gcd(f, &diff, poly);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// First irreducible monic polynomial of the given degree, scanning lower
/// coefficients as base-p digits of a counter. Returns the tail (all
/// coefficients below the leading 1).
fn find_irreducible(f: FieldSpec, degree: usize) -> Vec<u64> {
    let p = f.modulus();
    let mut counter: u128 = 0;
    loop {
        let mut tail = vec![0u64; degree];
        let mut c = counter;
        for t in tail.iter_mut() {
            *t = (c % p as u128) as u64;
            c /= p as u128;
        }
        counter += 1;
        if c > 0 {
            unreachable!("irreducible polynomial search exhausted the candidate space");
        }
        if degree > 1 && tail[0] == 0 {
            continue; // divisible by x
        }
        let mut candidate = tail.clone();
        candidate.push(1);
        if is_irreducible(f, &candidate) {
            return tail;
        }
    }
}
