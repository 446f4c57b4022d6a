//! Complex arithmetic primitives shared by every other module.
//!
//! All values are `Complex64`. Public operations never hand back NaN or
//! infinite components: a non-finite result is reported as
//! [`Error::Overflow`].

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crate::pair::pair_eq_unordered;

pub type Cx = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Cx {
    Cx::new(x, 0.0)
}

#[inline]
pub fn is_finite(z: Cx) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn check_finite(z: Cx) -> Result<Cx> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(Error::Overflow { step: None })
    }
}

/// An arbitrarily assigned sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Product of two signs.
    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_char(ch: char) -> Option<Sign> {
        match ch {
            '+' => Some(Sign::Plus),
            '-' | '\u{2212}' => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Per-step sign choices `S(0), S(1), ...`. Serialised as a string such as `"+-+"`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SignSequence(pub Vec<Sign>);

impl From<SignSequence> for String {
    fn from(s: SignSequence) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SignSequence {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl SignSequence {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn all_plus(len: usize) -> Self {
        Self(vec![Sign::Plus; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, s: Sign) {
        self.0.push(s);
    }

    pub fn extended(&self, s: Sign) -> Self {
        let mut out = self.clone();
        out.push(s);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Sign> + '_ {
        self.0.iter().copied()
    }

    /// Decode the `index`-th sequence of length `len` (bit i set means `-` at step i).
    pub fn from_bits(index: u64, len: usize) -> Self {
        Self(
            (0..len)
                .map(|i| {
                    if (index >> i) & 1 == 1 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                })
                .collect(),
        )
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for SignSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|ch| !ch.is_whitespace())
            .map(|ch| {
                Sign::from_char(ch)
                    .ok_or_else(|| Error::InvalidParams(format!("bad sign character {ch:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(SignSequence)
    }
}

/// Mixed relative/absolute tolerance: `|a-b| <= abs + rel * max(|a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    /// Computation tolerance used by the verification harness.
    pub const DEFAULT: Tolerance = Tolerance {
        rel: 1e-9,
        abs: 1e-12,
    };
    /// Looser tolerance for merging enumerated states, so roundoff never
    /// splits one branch into two.
    pub const DEDUPE: Tolerance = Tolerance {
        rel: 1e-8,
        abs: 1e-12,
    };

    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel >= 0.0 && rel.is_finite() && abs >= 0.0 && abs.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "tolerance must be finite and non-negative (rel={rel}, abs={abs})"
            )));
        }
        Ok(Self { rel, abs })
    }

    pub fn rel(rel: f64) -> Self {
        Self { rel, abs: 0.0 }
    }

    pub fn usable_for_dedupe(&self) -> bool {
        self.rel > 0.0 || self.abs > 0.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// `z^n` for integer `n`, with `0^0 = 1`. Negative exponents invert the
/// base first, so `cpow(-z, n)` equals `±cpow(z, n)` bit for bit according to
/// the parity of `n`.
///
/// Fails with `ZeroToNegativePower` for `0^n`, `n < 0`, and with `Overflow`
/// when the result is not finite.
pub fn cpow(z: Cx, n: i64) -> Result<Cx> {
    monomial(&[(z, n)])
}

/// `m * 2^e`, kept apart so long products of powers never leave the f64
/// range before the final result is formed.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: Cx,
    e: i128,
}

fn ldexp(x: f64, mut e: i128) -> f64 {
    let mut x = x;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl Scaled {
    const ONE: Scaled = Scaled {
        m: Cx::new(1.0, 0.0),
        e: 0,
    };

    fn new(z: Cx) -> Self {
        Scaled { m: z, e: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let n = self.m.re.abs().max(self.m.im.abs());
        if n == 0.0 || !n.is_finite() {
            return self;
        }
        let shift = n.log2().floor() as i128 + 1;
        Scaled {
            m: Cx::new(ldexp(self.m.re, -shift), ldexp(self.m.im, -shift)),
            e: self.e + shift,
        }
    }

    fn mul(self, other: Scaled) -> Scaled {
        Scaled {
            m: self.m * other.m,
            e: self.e + other.e,
        }
        .normalized()
    }

    fn powi(self, n: u64) -> Scaled {
        let (mut acc, mut sq, mut n) = (Scaled::ONE, self, n);
        loop {
            if n & 1 == 1 {
                acc = acc.mul(sq);
            }
            n >>= 1;
            if n == 0 {
                return acc;
            }
            sq = sq.mul(sq);
        }
    }

    fn value(self) -> Cx {
        Cx::new(ldexp(self.m.re, self.e), ldexp(self.m.im, self.e))
    }
}

/// Product `prod z_i^n_i` of integer powers, rounded to f64 only once at the
/// end, so factors that would individually overflow or underflow still give
/// an accurate product when it is representable.
///
/// Zero bases follow [`cpow`]: `0^0 = 1` and a negative power of zero is an
/// error. A result beyond the f64 range is `Overflow`.
pub fn monomial(factors: &[(Cx, i64)]) -> Result<Cx> {
    let mut acc = Scaled::ONE;
    let mut zero = false;
    for &(z, n) in factors {
        if !is_finite(z) {
            return Err(Error::Overflow { step: None });
        }
        if n == 0 {
            continue;
        }
        if z.re == 0.0 && z.im == 0.0 {
            if n < 0 {
                return Err(Error::ZeroToNegativePower {
                    exponent: n,
                    step: None,
                });
            }
            zero = true;
            continue;
        }
        let mut base = Scaled::new(z);
        if n < 0 {
            base = Scaled {
                m: base.m.inv(),
                e: -base.e,
            }
            .normalized();
        }
        acc = acc.mul(base.powi(n.unsigned_abs()));
    }
    if zero {
        return Ok(Cx::new(0.0, 0.0));
    }
    check_finite(acc.value())
}

/// `s * w` with `w` the principal square root: non-negative real part, and
/// non-negative imaginary part when the real part is zero.
pub fn sqrt_branch(z: Cx, s: Sign) -> Cx {
    let mut w = z.sqrt();
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        w = -w;
    }
    // keep -0.0 out of the principal root
    if w.re == 0.0 {
        w.re = 0.0;
    }
    if w.im == 0.0 {
        w.im = 0.0;
    }
    match s {
        Sign::Plus => w,
        Sign::Minus => -w,
    }
}

pub fn approx_eq(a: Cx, b: Cx, tol: Tolerance) -> bool {
    (a - b).norm() <= tol.abs + tol.rel * a.norm().max(b.norm())
}

/// `|a-b| / max(|a|,|b|)`, zero when both vanish.
pub fn rel_error(a: Cx, b: Cx) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
