//! Explicit finite colourings of the positive integers.
//!
//! Colour values are structured ([`Colour`]) rather than packed into dense
//! integers; two numbers have the same colour exactly when their colour values
//! are equal, which is also byte equality of their canonical JSON.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::digits::{base_digits_big, neg_digits_big, GapDescriptor};
use crate::error::{Error, Result};
use crate::ratcore::{ImageSet, Rat};

/// One nonzero `ψ` value: the gap count mod `p` of `coeff·x` for `gap`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PsiEntry {
    pub coeff: i64,
    pub gap: [u32; 5],
    pub value: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Colour {
    /// A single residue or table entry.
    Residue(u64),
    /// A digit statistics tuple.
    Digits(Vec<u32>),
    /// Leading digits, least significant digit and the sparse `ψ` fingerprint.
    NotRapid { phi: [u32; 4], lsd: u32, psi: Vec<PsiEntry> },
    /// The colour class of the small numbers `1..=p^4`.
    Reserved,
}

impl Colour {
    /// Canonical JSON text; equal colours give equal text.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&serde_json::to_value(self).expect("colour serializes")).expect("json")
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_json())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "camelCase")]
pub enum ColouringKind {
    Mod { m: u64 },
    /// Exponent of `prime` modulo `q`; separates `b·s` from `c·s`.
    PrimeExponent { b: Rat, c: Rat, prime: u64, q: u64 },
    /// Parity of the `base`-adic depth; separates `x` from `alpha·x`.
    Alpha { alpha: Rat, base: u64 },
    ExtendingF { p: u32 },
    NotRapid { p: u32, coeffs: Vec<i64> },
    /// `x ↦ table[(x−1) mod len]`.
    Table { table: Vec<u64> },
}

/// A deterministic total colouring of the positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Colouring {
    kind: ColouringKind,
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn next_prime_above(n: u64) -> u64 {
    (n + 1..).find(|&q| is_prime(q)).expect("primes are unbounded")
}

/// Largest `k` with `d^k | n`, for `n ≠ 0` and `d ≥ 2`.
fn valuation(n: &BigInt, d: u64) -> u64 {
    let d = BigInt::from(d);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&d);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

fn rat_valuation(r: &Rat, p: u64) -> i64 {
    valuation(r.numer(), p) as i64 - valuation(r.denom(), p) as i64
}

/// Prime factors of a positive integer, by trial division.
fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let bd = BigInt::from(d);
        if (&n % &bd).is_zero() {
            out.push(d);
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d += 1;
    }
    if n > BigInt::from(1) {
        out.push(n.to_u64().expect("factor below the trial-division bound"));
    }
    out
}

impl Colouring {
    pub fn kind(&self) -> &ColouringKind {
        &self.kind
    }

    pub fn from_kind(kind: ColouringKind) -> Result<Self> {
        match &kind {
            ColouringKind::Mod { m } => Self::modulus(*m),
            ColouringKind::PrimeExponent { b, c, .. } => Self::prime_exponent(b, c),
            ColouringKind::Alpha { alpha, .. } => Self::alpha(alpha),
            ColouringKind::ExtendingF { p } => Self::extending_f(*p),
            ColouringKind::NotRapid { p, coeffs } => Self::notrapid(*p, coeffs),
            ColouringKind::Table { table } => Self::table(table.clone()),
        }
    }

    /// `x ↦ x mod m`.
    pub fn modulus(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("modulus must be at least 2, got {m}")));
        }
        Ok(Colouring { kind: ColouringKind::Mod { m } })
    }

    /// Picks the least prime whose exponents `i ≠ j` in `b` and `c` differ and the
    /// least prime `q > max(|i|, |j|, |i−j|)`, and colours by the exponent mod `q`.
    pub fn prime_exponent(b: &Rat, c: &Rat) -> Result<Self> {
        if !b.is_positive() || !c.is_positive() {
            return Err(Error::InvalidParameter("b and c must be positive".into()));
        }
        if b == c {
            return Err(Error::InvalidParameter("b and c must differ".into()));
        }
        let mut candidates: Vec<u64> = [b.numer(), b.denom(), c.numer(), c.denom()]
            .into_iter()
            .flat_map(prime_factors)
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        for prime in candidates {
            let (i, j) = (rat_valuation(b, prime), rat_valuation(c, prime));
            if i != j {
                let bound = i.abs().max(j.abs()).max((i - j).abs()) as u64;
                let q = next_prime_above(bound);
                return Ok(Colouring { kind: ColouringKind::PrimeExponent { b: b.clone(), c: c.clone(), prime, q } });
            }
        }
        unreachable!("distinct positive rationals differ at some prime")
    }

    /// Two colours with `colour(αx) ≠ colour(x)` whenever `αx` is a positive integer.
    pub fn alpha(alpha: &Rat) -> Result<Self> {
        if !alpha.is_positive() || *alpha == Rat::one() {
            return Err(Error::InvalidParameter(format!("alpha must be positive and not 1, got {alpha}")));
        }
        let (u, v) = (alpha.numer().to_u64(), alpha.denom().to_u64());
        let base = match (u, v) {
            (Some(1), Some(v)) => v,
            (Some(u), _) => u,
            _ => return Err(Error::InvalidParameter("alpha too large".into())),
        };
        Ok(Colouring { kind: ColouringKind::Alpha { alpha: alpha.clone(), base } })
    }

    /// `(e_m, e_M, e_{M−1}, M mod 3)` over base-`p` digits, `e_{−1} = 0`.
    pub fn extending_f(p: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("base must be at least 2, got {p}")));
        }
        Ok(Colouring { kind: ColouringKind::ExtendingF { p } })
    }

    /// Leading digits, least significant digit and `ψ` fingerprints of `a_i·x`
    /// in base `−p`; all of `1..=p^4` share one reserved colour.
    pub fn notrapid(p: u32, coeffs: &[i64]) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if coeffs.is_empty() || coeffs.contains(&0) {
            return Err(Error::InvalidParameter("coefficients must be nonempty and nonzero".into()));
        }
        if coeffs.len() as u64 >= p as u64 {
            return Err(Error::InvalidParameter(format!("need more than {} < p", coeffs.len())));
        }
        if coeffs.iter().any(|a| 2 * a.unsigned_abs() >= p as u64) {
            return Err(Error::InvalidParameter(format!("need 2|a_i| < p = {p}")));
        }
        Ok(Colouring { kind: ColouringKind::NotRapid { p, coeffs: coeffs.to_vec() } })
    }

    /// Periodic colouring from a nonempty table.
    pub fn table(table: Vec<u64>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::InvalidParameter("colour table must be nonempty".into()));
        }
        Ok(Colouring { kind: ColouringKind::Table { table } })
    }

    /// Upper bound on the number of colours, when it is small enough to state.
    pub fn palette_bound(&self) -> Option<u64> {
        match &self.kind {
            ColouringKind::Mod { m } => Some(*m),
            ColouringKind::PrimeExponent { q, .. } => Some(*q),
            ColouringKind::Alpha { .. } => Some(2),
            ColouringKind::ExtendingF { p } => (*p as u64).checked_pow(3).map(|n| 3 * n),
            ColouringKind::NotRapid { .. } => None,
            ColouringKind::Table { table } => {
                let mut t = table.clone();
                t.sort_unstable();
                t.dedup();
                Some(t.len() as u64)
            }
        }
    }

    pub fn colour_u64(&self, x: u64) -> Result<Colour> {
        self.colour(&BigInt::from(x))
    }

    /// Colour of a positive integer.
    pub fn colour(&self, x: &BigInt) -> Result<Colour> {
        if !x.is_positive() {
            return Err(Error::NotPositiveInteger(x.to_string()));
        }
        Ok(match &self.kind {
            ColouringKind::Mod { m } => Colour::Residue((x % m).to_u64().expect("residue")),
            ColouringKind::PrimeExponent { prime, q, .. } => Colour::Residue(valuation(x, *prime) % q),
            ColouringKind::Alpha { base, .. } => Colour::Residue(valuation(x, *base) % 2),
            ColouringKind::ExtendingF { p } => {
                let e = base_digits_big(x, *p)?;
                let big_m = e.max_supp().expect("positive");
                let below = if big_m == 0 { 0 } else { e.digit(big_m - 1) };
                Colour::Digits(vec![e.lsd()?, e.digit(big_m), below, (big_m % 3) as u32])
            }
            ColouringKind::NotRapid { p, coeffs } => {
                if *x <= BigInt::from(*p).pow(4) {
                    return Ok(Colour::Reserved);
                }
                let e = neg_digits_big(x, *p)?;
                let mut psi = Vec::new();
                for &a in coeffs {
                    let ae = neg_digits_big(&(x * a), *p)?;
                    psi.extend(ae.psi_fingerprint().into_iter().map(|(g, value)| PsiEntry {
                        coeff: a,
                        gap: g.as_array(),
                        value,
                    }));
                }
                psi.sort();
                psi.dedup();
                Colour::NotRapid { phi: e.phi()?, lsd: e.lsd()?, psi }
            }
            ColouringKind::Table { table } => {
                let idx = ((x - 1u32) % table.len()).to_usize().expect("index");
                Colour::Residue(table[idx])
            }
        })
    }

    /// The prime-exponent colour extended to positive rationals.
    pub fn colour_rat(&self, x: &Rat) -> Result<Colour> {
        match &self.kind {
            ColouringKind::PrimeExponent { prime, q, .. } => {
                if !x.is_positive() {
                    return Err(Error::NotPositiveInteger(x.to_string()));
                }
                Ok(Colour::Residue(rat_valuation(x, *prime).rem_euclid(*q as i64) as u64))
            }
            _ => match x.to_integer() {
                Some(n) => self.colour(&n),
                None => Err(Error::NotPositiveInteger(x.to_string())),
            },
        }
    }

    /// `ψ` of `a·x` for one descriptor, as used in the fingerprint.
    pub fn psi_of(&self, x: &BigInt, a: i64, g: &GapDescriptor) -> Result<u32> {
        match &self.kind {
            ColouringKind::NotRapid { p, .. } => Ok(neg_digits_big(&(x * a), *p)?.psi(g)),
            _ => Err(Error::InvalidParameter("not a gap colouring".into())),
        }
    }
}

/// The common colour of an image, or `None` if it is not monochromatic.
pub fn colour_image(col: &Colouring, values: &ImageSet) -> Result<Option<Colour>> {
    let mut common: Option<Colour> = None;
    let mut mono = true;
    for v in values.iter() {
        let n = v
            .to_integer()
            .filter(|n| n.is_positive())
            .ok_or_else(|| Error::NotPositiveInteger(v.to_string()))?;
        let c = col.colour(&n)?;
        match &common {
            None => common = Some(c),
            Some(prev) if *prev != c => mono = false,
            _ => {}
        }
    }
    Ok(common.filter(|_| mono))
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad list: {s}"))))
        .collect()
}

impl FromStr for Colouring {
    type Err = Error;

    /// `mod:2`, `prime-exp:2:3`, `alpha:3/2`, `extending-f:5`, `notrapid:7:1,2`, `table:0,1`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad number in {s}")));
        match parts[..] {
            ["mod", m] => Colouring::modulus(num(m)?),
            ["prime-exp", b, c] => Colouring::prime_exponent(&b.parse()?, &c.parse()?),
            ["alpha", a] => Colouring::alpha(&a.parse()?),
            ["extending-f", p] => Colouring::extending_f(num(p)? as u32),
            ["notrapid", p, a] => Colouring::notrapid(num(p)? as u32, &parse_list(a)?),
            ["table", t] => Colouring::table(parse_list(t)?),
            _ => Err(Error::Parse(format!("unknown colouring: {s}"))),
        }
    }
}

impl fmt::Display for Colouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.kind {
            ColouringKind::Mod { m } => write!(f, "mod:{m}"),
            ColouringKind::PrimeExponent { b, c, .. } => write!(f, "prime-exp:{b}:{c}"),
            ColouringKind::Alpha { alpha, .. } => write!(f, "alpha:{alpha}"),
            ColouringKind::ExtendingF { p } => write!(f, "extending-f:{p}"),
            ColouringKind::NotRapid { p, coeffs } => write!(f, "notrapid:{p}:{}", join(coeffs)),
            ColouringKind::Table { table } => {
                write!(f, "table:{}", table.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
        }
    }
}
