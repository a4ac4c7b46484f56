//! Polynomial secret sharing baseline: Shamir splitting and Lagrange
//! recovery over a prime field, Herzberg-style proactive renewal, and
//! Feldman commitment verification.
//!
//! This is the independent comparison target for the hash scheme. Field
//! arithmetic is exact for moduli up to 63 bits (products go through
//! `u128`), and tiny primes are first-class so brute-force tests can count
//! every polynomial.

use rand::{CryptoRng, Rng, RngCore};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShamirError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("parameters must satisfy q > n >= t+1, got q={q}, n={n}, t+1={t_plus_1}")]
    ParameterOrder { q: u64, n: u16, t_plus_1: u32 },
    #[error("value {value} is not reduced modulo {q}")]
    ValueOutOfRange { value: u64, q: u64 },
    #[error("polynomial needs at least the constant coefficient")]
    EmptyCoefficients,
    #[error("no shares supplied")]
    EmptyShares,
    #[error("duplicate evaluation point x={0}")]
    DuplicateX(u64),
    #[error("evaluation point x={x} must lie in 1..q (q={q})")]
    XOutOfRange { x: u64, q: u64 },
    #[error("field mismatch: expected modulus {expected}, got {got}")]
    FieldMismatch { expected: u64, got: u64 },
    #[error("renewal mask must have zero constant term")]
    MaskConstantNonzero,
    #[error("q={q} does not divide p-1 (p={p})")]
    QNotDividingPMinus1 { p: u64, q: u64 },
    #[error("generator {g} does not have order {q} modulo {p}")]
    BadGenerator { g: u64, p: u64, q: u64 },
    #[error("commitment {0} is not a valid group element")]
    BadCommitment(u64),
    #[error("expected {expected} commitments, got {got}")]
    CommitmentCountMismatch { expected: usize, got: usize },
}

/// Deterministic Miller-Rabin for u64. The fixed witness set decides
/// primality exactly for every 64-bit integer.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The prime field Z_q. Construction checks primality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, ShamirError> {
        if !is_prime_u64(q) {
            return Err(ShamirError::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a % self.q + b % self.q;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (a % self.q, b % self.q);
        if a >= b {
            a - b
        } else {
            self.q - b + a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a % self.q, b % self.q, self.q)
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base % self.q, exp, self.q)
    }

    /// Multiplicative inverse by Fermat's little theorem; a must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.q));
        self.pow(a, self.q - 2)
    }

    fn check_reduced(&self, value: u64) -> Result<u64, ShamirError> {
        if value >= self.q {
            return Err(ShamirError::ValueOutOfRange { value, q: self.q });
        }
        Ok(value)
    }
}

/// A dealer polynomial `a_t x^t + ... + a_1 x + a_0` with the secret in the
/// constant term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShamirPolynomial {
    field: PrimeField,
    coefficients: Vec<u64>, // a_0 first
}

impl ShamirPolynomial {
    pub fn from_coefficients(
        field: PrimeField,
        coefficients: Vec<u64>,
    ) -> Result<Self, ShamirError> {
        if coefficients.is_empty() {
            return Err(ShamirError::EmptyCoefficients);
        }
        for c in &coefficients {
            field.check_reduced(*c)?;
        }
        Ok(ShamirPolynomial {
            field,
            coefficients,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Coefficients in ascending degree order, `a_0` first.
    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn secret(&self) -> u64 {
        self.coefficients[0]
    }

    /// The degree bound t (actual degree may be lower if top coefficients
    /// happen to be zero).
    pub fn degree_bound(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn evaluate(&self, x: u64) -> u64 {
        // Horner, highest coefficient first
        self.coefficients
            .iter()
            .rev()
            .fold(0u64, |acc, c| self.field.add(self.field.mul(acc, x), *c))
    }

    /// Shares at the fixed evaluation points `x = 1..=n`.
    pub fn shares(&self, n: u16) -> Result<Vec<ShamirShare>, ShamirError> {
        if u64::from(n) >= self.field.q {
            return Err(ShamirError::ParameterOrder {
                q: self.field.q,
                n,
                t_plus_1: self.coefficients.len() as u32,
            });
        }
        Ok((1..=u64::from(n))
            .map(|x| ShamirShare {
                x,
                y: self.evaluate(x),
            })
            .collect())
    }
}

/// One share: the point `(x, P(x))`. The point at zero is never handed out,
/// since `P(0)` is the secret itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShamirShare {
    pub x: u64,
    pub y: u64,
}

/// Splits `secret` into `n` shares, any `t+1` of which recover it.
/// Requires `q > n >= t+1`.
pub fn shamir_split<R: RngCore + CryptoRng>(
    secret: u64,
    t: u16,
    n: u16,
    field: &PrimeField,
    rng: &mut R,
) -> Result<(ShamirPolynomial, Vec<ShamirShare>), ShamirError> {
    let t_plus_1 = u32::from(t) + 1;
    if u64::from(n) >= field.q || u32::from(n) < t_plus_1 {
        return Err(ShamirError::ParameterOrder {
            q: field.q,
            n,
            t_plus_1,
        });
    }
    field.check_reduced(secret)?;
    let mut coefficients = Vec::with_capacity(t as usize + 1);
    coefficients.push(secret);
    for _ in 0..t {
        coefficients.push(rng.random_range(0..field.q));
    }
    let polynomial = ShamirPolynomial::from_coefficients(*field, coefficients)?;
    let shares = polynomial.shares(n)?;
    Ok((polynomial, shares))
}

/// Lagrange interpolation at zero. The caller supplies exactly `t+1` shares;
/// the share count is taken at face value as the reconstruction degree.
pub fn shamir_recover(shares: &[ShamirShare], field: &PrimeField) -> Result<u64, ShamirError> {
    if shares.is_empty() {
        return Err(ShamirError::EmptyShares);
    }
    for (i, s) in shares.iter().enumerate() {
        if s.x == 0 || s.x >= field.q {
            return Err(ShamirError::XOutOfRange { x: s.x, q: field.q });
        }
        field.check_reduced(s.y)?;
        if shares[..i].iter().any(|other| other.x == s.x) {
            return Err(ShamirError::DuplicateX(s.x));
        }
    }
    let mut secret = 0u64;
    for share in shares {
        let mut basis = 1u64; // L_i(0)
        for other in shares {
            if other.x != share.x {
                let num = other.x;
                let den = field.sub(other.x, share.x);
                basis = field.mul(basis, field.mul(num, field.inv(den)));
            }
        }
        secret = field.add(secret, field.mul(share.y, basis));
    }
    Ok(secret)
}

/// Renewal: add a random degree-<=t polynomial with zero constant term, so
/// shares change while the secret does not. Returns the new polynomial and
/// the replacement shares `R(1)..R(n)`.
pub fn proactive_renew<R: RngCore + CryptoRng>(
    polynomial: &ShamirPolynomial,
    n: u16,
    rng: &mut R,
) -> Result<(ShamirPolynomial, Vec<ShamirShare>), ShamirError> {
    let field = polynomial.field;
    let mut mask = Vec::with_capacity(polynomial.coefficients.len());
    mask.push(0);
    for _ in 1..polynomial.coefficients.len() {
        mask.push(rng.random_range(0..field.q));
    }
    let mask = ShamirPolynomial::from_coefficients(field, mask)?;
    let renewed = apply_renewal(polynomial, &mask)?;
    let shares = renewed.shares(n)?;
    Ok((renewed, shares))
}

/// Coefficient-wise sum of the dealer polynomial and a renewal mask. The
/// mask must share the field and have zero constant term.
pub fn apply_renewal(
    polynomial: &ShamirPolynomial,
    mask: &ShamirPolynomial,
) -> Result<ShamirPolynomial, ShamirError> {
    if mask.field.q != polynomial.field.q {
        return Err(ShamirError::FieldMismatch {
            expected: polynomial.field.q,
            got: mask.field.q,
        });
    }
    if mask.secret() != 0 {
        return Err(ShamirError::MaskConstantNonzero);
    }
    let field = polynomial.field;
    let len = polynomial.coefficients.len().max(mask.coefficients.len());
    let coefficients = (0..len)
        .map(|i| {
            let a = polynomial.coefficients.get(i).copied().unwrap_or(0);
            let b = mask.coefficients.get(i).copied().unwrap_or(0);
            field.add(a, b)
        })
        .collect();
    ShamirPolynomial::from_coefficients(field, coefficients)
}

/// Group parameters for Feldman verification: primes `p`, `q` with
/// `q | p-1` and `g` of order exactly `q` in `Z_p*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeldmanParams {
    p: u64,
    q: u64,
    g: u64,
}

impl FeldmanParams {
    pub fn new(p: u64, q: u64, g: u64) -> Result<Self, ShamirError> {
        if !is_prime_u64(p) {
            return Err(ShamirError::NotPrime(p));
        }
        if !is_prime_u64(q) {
            return Err(ShamirError::NotPrime(q));
        }
        if !(p - 1).is_multiple_of(q) {
            return Err(ShamirError::QNotDividingPMinus1 { p, q });
        }
        // q prime: any g != 1 with g^q = 1 has order exactly q
        if g <= 1 || g >= p || pow_mod(g, q, p) != 1 {
            return Err(ShamirError::BadGenerator { g, p, q });
        }
        Ok(FeldmanParams { p, q, g })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn g(&self) -> u64 {
        self.g
    }
}

/// Publishes `g^{a_j} mod p` for every coefficient of the polynomial.
pub fn feldman_commit(
    polynomial: &ShamirPolynomial,
    params: &FeldmanParams,
) -> Result<Vec<u64>, ShamirError> {
    if polynomial.field.q != params.q {
        return Err(ShamirError::FieldMismatch {
            expected: params.q,
            got: polynomial.field.q,
        });
    }
    Ok(polynomial
        .coefficients
        .iter()
        .map(|a| pow_mod(params.g, *a, params.p))
        .collect())
}

/// Checks `g^y = prod_j (g^{a_j})^{x^j} mod p`, with the exponents `x^j`
/// reduced modulo the group order `q`.
pub fn feldman_verify(
    share: &ShamirShare,
    commitments: &[u64],
    params: &FeldmanParams,
) -> Result<bool, ShamirError> {
    if commitments.is_empty() {
        return Err(ShamirError::CommitmentCountMismatch {
            expected: 1,
            got: 0,
        });
    }
    for c in commitments {
        if *c == 0 || *c >= params.p {
            return Err(ShamirError::BadCommitment(*c));
        }
    }
    if share.x == 0 || share.x >= params.q {
        return Err(ShamirError::XOutOfRange {
            x: share.x,
            q: params.q,
        });
    }
    if share.y >= params.q {
        return Err(ShamirError::ValueOutOfRange {
            value: share.y,
            q: params.q,
        });
    }
    let lhs = pow_mod(params.g, share.y, params.p);
    let mut rhs = 1u64;
    let mut exponent = 1u64; // x^j mod q
    for c in commitments {
        rhs = mul_mod(rhs, pow_mod(*c, exponent, params.p), params.p);
        exponent = mul_mod(exponent, share.x, params.q);
    }
    Ok(lhs == rhs)
}
