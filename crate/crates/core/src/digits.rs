//! Base `p` and base `−p` digit expansions and the digit statistics used by
//! the separating colourings: least significant digit `f`, the leading-digit
//! block `φ`, gap sets `G` and their counts `ψ` modulo `p`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Digits of an integer in base `p` or `−p`, least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitExpansion {
    base: i64,
    digits: Vec<u32>,
}

fn check_base(p: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("base must be at least 2, got {p}")));
    }
    Ok(())
}

impl DigitExpansion {
    pub fn base(&self) -> i64 {
        self.base
    }

    /// `|base|`.
    pub fn p(&self) -> u32 {
        self.base.unsigned_abs() as u32
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Digit at position `i`; zero beyond the expansion.
    pub fn digit(&self, i: usize) -> u32 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.digits.iter().enumerate().filter(|(_, &d)| d != 0).map(|(i, _)| i)
    }

    pub fn min_supp(&self) -> Option<usize> {
        self.support().next()
    }

    pub fn max_supp(&self) -> Option<usize> {
        (!self.digits.is_empty()).then(|| self.digits.len() - 1)
    }

    /// Re-sums the digits.
    pub fn value(&self) -> BigInt {
        let b = BigInt::from(self.base);
        self.digits.iter().rev().fold(BigInt::zero(), |acc, &d| acc * &b + d)
    }

    /// The least significant nonzero digit (`f`).
    pub fn lsd(&self) -> Result<u32> {
        self.min_supp().map(|i| self.digits[i]).ok_or(Error::ZeroValue)
    }

    /// The four most significant digits `(d_s, d_{s−1}, d_{s−2}, d_{s−3})`,
    /// `s` the top of the support.
    pub fn phi(&self) -> Result<[u32; 4]> {
        let s = self.max_supp().ok_or(Error::ZeroValue)?;
        if s < 3 {
            return Err(Error::SupportTooSmall { max_supp: s, needed: 3 });
        }
        Ok([self.digits[s], self.digits[s - 1], self.digits[s - 2], self.digits[s - 3]])
    }

    /// Every gap `(s, t)` of the expansion with the descriptor it matches:
    /// `s` even, `s ≥ 3`, `d_s ≠ 0`, `t` the next nonzero position and `t > s+3`.
    pub fn all_gaps(&self) -> Vec<((usize, usize), GapDescriptor)> {
        let supp: Vec<usize> = self.support().collect();
        supp.windows(2)
            .filter(|w| w[0] % 2 == 0 && w[0] >= 3 && w[1] > w[0] + 3)
            .map(|w| {
                let (s, t) = (w[0], w[1]);
                let g = GapDescriptor {
                    v: self.digits[t],
                    u0: self.digits[s],
                    u1: self.digits[s - 1],
                    u2: self.digits[s - 2],
                    u3: self.digits[s - 3],
                };
                ((s, t), g)
            })
            .collect()
    }

    /// Gaps matching `g`, in increasing order.
    pub fn gaps(&self, g: &GapDescriptor) -> Vec<(usize, usize)> {
        self.all_gaps().into_iter().filter(|(_, h)| h == g).map(|(st, _)| st).collect()
    }

    /// Number of gaps matching `g`, reduced mod `p`.
    pub fn psi(&self, g: &GapDescriptor) -> u32 {
        (self.gaps(g).len() % self.p() as usize) as u32
    }

    /// Nonzero `ψ` values over all descriptors.
    pub fn psi_fingerprint(&self) -> BTreeMap<GapDescriptor, u32> {
        let p = self.p() as usize;
        let mut counts: BTreeMap<GapDescriptor, usize> = BTreeMap::new();
        for (_, g) in self.all_gaps() {
            *counts.entry(g).or_default() += 1;
        }
        counts
            .into_iter()
            .filter(|(_, c)| c % p != 0)
            .map(|(g, c)| (g, (c % p) as u32))
            .collect()
    }
}

impl fmt::Display for DigitExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ds: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]_{}", ds.join(","), self.base)
    }
}

/// Parameters `(v, u0, u1, u2, u3)` of a gap pattern `v 0…0 u0 u1 u2 u3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GapDescriptor {
    pub v: u32,
    pub u0: u32,
    pub u1: u32,
    pub u2: u32,
    pub u3: u32,
}

impl GapDescriptor {
    /// Checks `v, u0 ∈ {1..p−1}` and `u1, u2, u3 ∈ {0..p−1}`.
    pub fn new(p: u32, v: u32, u: [u32; 4]) -> Result<Self> {
        check_base(p)?;
        if v == 0 || v >= p || u[0] == 0 || u.iter().any(|&d| d >= p) {
            return Err(Error::InvalidParameter(format!("gap descriptor ({v},{u:?}) out of range for p={p}")));
        }
        Ok(GapDescriptor { v, u0: u[0], u1: u[1], u2: u[2], u3: u[3] })
    }

    pub fn as_array(&self) -> [u32; 5] {
        [self.v, self.u0, self.u1, self.u2, self.u3]
    }
}

impl FromStr for GapDescriptor {
    type Err = Error;

    /// Parses `v,u0,u1,u2,u3` without range checks.
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<u32> = s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad gap descriptor: {s}"))))
            .collect::<Result<_>>()?;
        match v[..] {
            [v, u0, u1, u2, u3] => Ok(GapDescriptor { v, u0, u1, u2, u3 }),
            _ => Err(Error::Parse(format!("gap descriptor needs five digits: {s}"))),
        }
    }
}

impl fmt::Display for GapDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{}", self.v, self.u0, self.u1, self.u2, self.u3)
    }
}

/// Standard base-`p` digits of a positive integer.
pub fn base_digits(x: u128, p: u32) -> Result<DigitExpansion> {
    check_base(p)?;
    if x == 0 {
        return Err(Error::ZeroValue);
    }
    let mut digits = Vec::new();
    let mut x = x;
    while x > 0 {
        digits.push((x % p as u128) as u32);
        x /= p as u128;
    }
    Ok(DigitExpansion { base: p as i64, digits })
}

pub fn base_digits_big(x: &BigInt, p: u32) -> Result<DigitExpansion> {
    check_base(p)?;
    if !x.is_positive() {
        return Err(Error::NotPositiveInteger(x.to_string()));
    }
    if let Some(small) = x.to_u128() {
        return base_digits(small, p);
    }
    let bp = BigInt::from(p);
    let mut digits = Vec::new();
    let mut x = x.clone();
    while !x.is_zero() {
        let (q, r) = x.div_rem(&bp);
        digits.push(r.to_u32().expect("digit"));
        x = q;
    }
    Ok(DigitExpansion { base: p as i64, digits })
}

/// Base `−p` digits of a nonzero integer, each in `{0..p−1}`.
pub fn neg_digits(x: i128, p: u32) -> Result<DigitExpansion> {
    check_base(p)?;
    if x == 0 {
        return Err(Error::ZeroValue);
    }
    let b = -(p as i128);
    let mut digits = Vec::new();
    let mut x = x;
    while x != 0 {
        let r = x.rem_euclid(p as i128);
        digits.push(r as u32);
        x = (x - r) / b;
    }
    Ok(DigitExpansion { base: -(p as i64), digits })
}

pub fn neg_digits_big(x: &BigInt, p: u32) -> Result<DigitExpansion> {
    check_base(p)?;
    if x.is_zero() {
        return Err(Error::ZeroValue);
    }
    if let Some(small) = x.to_i128().filter(|v| v.unsigned_abs() < 1u128 << 120) {
        return neg_digits(small, p);
    }
    let bp = BigInt::from(p);
    let b = -bp.clone();
    let mut digits = Vec::new();
    let mut x = x.clone();
    while !x.is_zero() {
        let r = x.mod_floor(&bp);
        digits.push(r.to_u32().expect("digit"));
        x = (x - r) / &b;
    }
    Ok(DigitExpansion { base: -(p as i64), digits })
}

/// Whether `x` has a base-`−p` expansion whose top digit sits at position `s`,
/// decided from the closed-form interval for that position.
pub fn negbase_range_check(x: &BigInt, p: u32, s: u32) -> bool {
    if x.is_zero() || p < 2 {
        return false;
    }
    let bp = BigInt::from(p);
    let scaled = x * (&bp + 1u32);
    let ps = bp.pow(s);
    let ps2 = bp.pow(s + 2);
    if s % 2 == 0 {
        &ps + &bp <= scaled && scaled <= ps2 - 1u32
    } else {
        -ps2 + &bp <= scaled && scaled <= -ps - 1u32
    }
}

/// `f(x)`: least significant nonzero base-`−p` digit.
pub fn lsd(x: i128, p: u32) -> Result<u32> {
    neg_digits(x, p)?.lsd()
}

/// `φ(x)`: the four most significant base-`−p` digits.
pub fn phi(x: i128, p: u32) -> Result<[u32; 4]> {
    neg_digits(x, p)?.phi()
}

pub fn gaps(x: i128, p: u32, g: &GapDescriptor) -> Result<Vec<(usize, usize)>> {
    Ok(neg_digits(x, p)?.gaps(g))
}

pub fn psi(x: i128, p: u32, g: &GapDescriptor) -> Result<u32> {
    Ok(neg_digits(x, p)?.psi(g))
}

/// `⌊log_p x⌋` for positive `x`.
pub fn floor_log(x: &BigInt, p: u32) -> Result<u32> {
    Ok(base_digits_big(x, p)?.digits.len() as u32 - 1)
}

/// `p^e` as a big integer.
pub fn big_pow(p: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// `x` divisible by `p^e`.
pub fn divisible_by_power(x: &BigInt, p: u32, e: u32) -> bool {
    (x % big_pow(p, e)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn resum(d: &[u32], base: i128) -> i128 {
        d.iter().rev().fold(0, |acc, &x| acc * base + x as i128)
    }

    /// Every digit string of length at most `len` over `{0..p−1}` with a nonzero top digit.
    fn all_expansions(p: u32, len: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for l in 1..=len {
            for code in 0..(p as u64).pow(l) {
                let mut c = code;
                let d: Vec<u32> = (0..l)
                    .map(|_| {
                        let r = (c % p as u64) as u32;
                        c /= p as u64;
                        r
                    })
                    .collect();
                if *d.last().unwrap() != 0 {
                    out.push(d);
                }
            }
        }
        out
    }

    fn g(v: u32, u: [u32; 4]) -> GapDescriptor {
        GapDescriptor { v, u0: u[0], u1: u[1], u2: u[2], u3: u[3] }
    }

    #[test]
    fn base_examples() {
        let e = base_digits(7, 5).unwrap();
        assert_eq!(e.digits(), &[2, 1]);
        assert_eq!((e.min_supp(), e.max_supp()), (Some(0), Some(1)));
        for p in [2, 3, 7] {
            assert_eq!(base_digits((p as u128).pow(3), p).unwrap().support().collect::<Vec<_>>(), vec![3]);
            assert_eq!(base_digits(1, p).unwrap().digits(), &[1]);
        }
        assert!(base_digits(0, 3).is_err());
        assert!(base_digits(5, 1).is_err());
    }

    #[test]
    fn negbase_examples() {
        assert_eq!(neg_digits(6, 2).unwrap().digits(), &[0, 1, 0, 1, 1]);
        assert_eq!(neg_digits(-1, 2).unwrap().digits(), &[1, 1]);
        for p in 2..9 {
            assert_eq!(neg_digits(1, p).unwrap().digits(), &[1]);
            assert_eq!(lsd(1, p).unwrap(), 1);
        }
        assert_eq!(neg_digits(0, 2), Err(Error::ZeroValue));
        assert_eq!(lsd(6, 2).unwrap(), 1);
        // p = p^2 + (p-1)(-p): digits [0, p-1, 1]
        for p in 2..9u32 {
            let e = neg_digits(p as i128, p).unwrap();
            assert_eq!(e.digits(), &[0, p - 1, 1]);
            assert_eq!(lsd(p as i128, p).unwrap(), p - 1);
        }
    }

    #[test]
    fn big_and_small_paths_agree() {
        for x in [-1000i128, -7, 1, 2401, 123_456_789] {
            assert_eq!(neg_digits_big(&BigInt::from(x), 7).unwrap(), neg_digits(x, 7).unwrap());
        }
        let huge = BigInt::from(10).pow(50) + 17;
        let e = neg_digits_big(&huge, 7).unwrap();
        assert_eq!(e.value(), huge);
        let e = neg_digits_big(&-huge.clone(), 3).unwrap();
        assert_eq!(e.value(), -huge.clone());
        assert_eq!(base_digits_big(&huge, 10).unwrap().value(), huge);
    }

    #[test]
    fn range_check_examples() {
        let p3 = |x: i64| negbase_range_check(&BigInt::from(x), 3, 2);
        assert!((3..=20).all(p3));
        assert!(!p3(21) && !p3(2));
        let hits: Vec<i64> = (-50..=50).filter(|&x| negbase_range_check(&BigInt::from(x), 2, 0)).collect();
        assert_eq!(hits, vec![1]);
        let hits: Vec<i64> = (-50..=50).filter(|&x| negbase_range_check(&BigInt::from(x), 2, 1)).collect();
        assert_eq!(hits, vec![-2, -1]);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(2401, 7).unwrap(), [1, 0, 0, 0]);
        for p in [2u32, 3, 7] {
            let x = (p as i128).pow(4);
            let e = neg_digits(x, p).unwrap();
            let s = e.max_supp().unwrap();
            assert_eq!(phi(x, p).unwrap(), [e.digit(s), e.digit(s - 1), e.digit(s - 2), e.digit(s - 3)]);
        }
        // digits [u3,u2,u1,u0] least significant first
        let x = resum(&[4, 5, 6, 3], -7);
        assert_eq!(phi(x, 7).unwrap(), [3, 6, 5, 4]);
        assert!(matches!(phi(5, 7), Err(Error::SupportTooSmall { .. })));
    }

    #[test]
    fn gap_examples() {
        let x = 7i128.pow(10) + 7i128.pow(4);
        let d = g(1, [1, 0, 0, 0]);
        assert_eq!(gaps(x, 7, &d).unwrap(), vec![(4, 10)]);
        assert_eq!(psi(x, 7, &d).unwrap(), 1);
        assert!(gaps(2401, 7, &d).unwrap().is_empty());
        assert_eq!(psi(2401, 7, &d).unwrap(), 0);
        assert!(GapDescriptor::new(7, 0, [1, 0, 0, 0]).is_err());
        assert!(GapDescriptor::new(7, 1, [0, 0, 0, 0]).is_err());
        assert!(GapDescriptor::new(7, 1, [1, 7, 0, 0]).is_err());
        assert_eq!("1,1,0,0,0".parse::<GapDescriptor>().unwrap(), d);
    }

    /// Straight transcription of the gap definition, scanning every `(s, t)`.
    fn gaps_oracle(e: &DigitExpansion, g: &GapDescriptor) -> Vec<(usize, usize)> {
        let n = e.digits().len();
        let mut out = Vec::new();
        for s in (2..n).step_by(2) {
            for t in s + 4..n {
                let u = [g.u0, g.u1, g.u2, g.u3];
                let ok = e.digit(t) == g.v
                    && (0..4).all(|i| s >= i && e.digit(s - i) == u[i])
                    && (s + 1..t).all(|i| e.digit(i) == 0);
                if ok {
                    out.push((s, t));
                }
            }
        }
        out
    }

    #[test]
    fn gaps_match_definition_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let p = [2u32, 3, 5][rng.gen_range(0..3)];
            let len = rng.gen_range(1..30);
            let mut d: Vec<u32> = (0..len).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..p) }).collect();
            *d.last_mut().unwrap() = rng.gen_range(1..p);
            let e = DigitExpansion { base: -(p as i64), digits: d };
            for (_, gd) in e.all_gaps() {
                assert_eq!(e.gaps(&gd), gaps_oracle(&e, &gd));
            }
            let gd = g(1, [1, 0, 0, 0]);
            assert_eq!(e.gaps(&gd), gaps_oracle(&e, &gd));
            let fp = e.psi_fingerprint();
            for (k, v) in &fp {
                assert_eq!(*v as usize, gaps_oracle(&e, k).len() % p as usize);
            }
        }
    }

    #[test]
    fn expansion_is_unique() {
        for p in [2u32, 3] {
            let mut seen = std::collections::HashMap::new();
            for d in all_expansions(p, 12) {
                let v = resum(&d, -(p as i128));
                if v.abs() <= 200 {
                    assert!(seen.insert(v, d).is_none(), "two expansions of {v}");
                }
            }
            for x in -200i128..=200 {
                if x != 0 {
                    assert_eq!(neg_digits(x, p).unwrap().digits(), &seen[&x][..]);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_range_equivalence() {
        for p in [2u32, 3, 5, 7] {
            for x in -10_000i128..=10_000 {
                if x == 0 {
                    continue;
                }
                let e = neg_digits(x, p).unwrap();
                assert_eq!(resum(e.digits(), -(p as i128)), x);
                assert!(e.digits().iter().all(|&d| d < p));
                assert_ne!(*e.digits().last().unwrap(), 0);
                if p != 7 {
                    let s = e.max_supp().unwrap() as u32;
                    let bx = BigInt::from(x);
                    for t in s.saturating_sub(2)..=s + 2 {
                        assert_eq!(negbase_range_check(&bx, p, t), t == s, "x={x} p={p} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn support_bounds() {
        for p in [2u32, 3, 5, 7] {
            for x in 1..=10_000i128 {
                let s = neg_digits(x, p).unwrap().max_supp().unwrap() as i32;
                let fx = x as f64;
                // p^{s-2} < x < p^{s+1}, in exact arithmetic
                let lo = if s >= 2 { (p as i128).pow(s as u32 - 2) } else { 0 };
                assert!(lo < x && x < (p as i128).pow(s as u32 + 1), "x={fx} p={p}");
            }
            for x in 1..=1000i128 {
                let s = neg_digits(x, p).unwrap().max_supp().unwrap();
                for a in 1..p as i128 {
                    let r = neg_digits(a * x, p).unwrap().max_supp().unwrap();
                    assert!(s <= r && r <= s + 2);
                    let r = neg_digits(-a * x, p).unwrap().max_supp().unwrap();
                    assert!(s <= r + 1 && r <= s + 1);
                }
            }
        }
    }

    #[test]
    fn multiples_change_phi() {
        let p = 7u32;
        let p4 = 7i128.pow(4);
        for x in p4 + 1..=p4 + 5000 {
            let f = phi(x, p).unwrap();
            for a in [2i128, 3] {
                assert_ne!(phi(a * x, p).unwrap(), f, "x={x} a={a}");
            }
        }
    }

    #[test]
    fn psi_additivity() {
        let p = 7u32;
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let mut checked = 0;
        while checked < 200 {
            // x > p^4 from random digits with an even top position
            let top = 2 * rng.gen_range(2..5);
            let mut xd: Vec<u32> = (0..=top).map(|_| rng.gen_range(0..p)).collect();
            xd[top] = rng.gen_range(1..p);
            let x = resum(&xd, -(p as i128));
            if x <= (p as i128).pow(4) {
                continue;
            }
            let ai: i128 = [1, 1, 2, 3, -1, -2][rng.gen_range(0..6)];
            let ax = ai * x;
            let axe = neg_digits(ax, p).unwrap();
            let shift = axe.max_supp().unwrap().max(top) + 6 + rng.gen_range(0..3);
            let ylen = rng.gen_range(1..12);
            let mut yd: Vec<u32> = vec![0; shift];
            yd.push(rng.gen_range(1..p));
            yd.extend((1..ylen).map(|_| if rng.gen_bool(0.4) { rng.gen_range(0..p) } else { 0 }));
            if *yd.last().unwrap() == 0 {
                *yd.last_mut().unwrap() = 1;
            }
            let y = resum(&yd, -(p as i128));
            let ph = phi(x, p).unwrap();
            // v is either the lsd of y (so the bridging gap can form) or a random digit
            let v = if rng.gen_bool(0.6) { lsd(y, p).unwrap() } else { rng.gen_range(1..p) };
            let gd = g(v, ph);
            let lhs = psi(ax + y, p, &gd).unwrap();
            let bridge = (ai == 1 && lsd(y, p).unwrap() == v) as u32;
            let rhs = (psi(ax, p, &gd).unwrap() + psi(y, p, &gd).unwrap() + bridge) % p;
            assert_eq!(lhs, rhs, "x={x} a={ai} y={y}");
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn negbase_round_trip(x in any::<i64>().prop_filter("nonzero", |&x| x != 0), p in 2u32..20) {
            let e = neg_digits(x as i128, p).unwrap();
            prop_assert_eq!(e.value(), BigInt::from(x));
            let s = e.max_supp().unwrap() as u32;
            prop_assert!(negbase_range_check(&BigInt::from(x), p, s));
            prop_assert_eq!(x > 0, s % 2 == 0);
        }

        #[test]
        fn base_round_trip(x in 1u64.., p in 2u32..40) {
            let e = base_digits(x as u128, p).unwrap();
            prop_assert_eq!(e.value(), BigInt::from(x));
            prop_assert_eq!(floor_log(&BigInt::from(x), p).unwrap() as usize, e.max_supp().unwrap());
        }
    }
}
