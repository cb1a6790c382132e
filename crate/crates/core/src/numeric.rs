//! Exact phases (rational multiples of a full turn) and tracked global scalars.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

/// A phase `e^{2πi·r}` stored as `r` reduced into `[0, 1)`.
///
/// Phases coming from the supported gate set and from every rewrite rule are
/// rational, so the `Exact` variant is closed under the engine. `Approx` holds
/// user-supplied irrational values; any arithmetic touching it stays inexact.
#[derive(Clone, Copy, Debug)]
pub enum Phase {
    Exact(Rational64),
    Approx(f64),
}

fn reduce_ratio(r: Rational64) -> Rational64 {
    let n = r.numer().mod_floor(r.denom());
    Rational64::new(n, *r.denom())
}

fn wrap_f64(x: f64) -> f64 {
    let w = x - x.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

impl Phase {
    pub const ZERO: Phase = Phase::Exact(Rational64::new_raw(0, 1));

    /// The phase `num/den` of a turn, reduced mod 1.
    ///
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Phase::Exact(reduce_ratio(Rational64::new(num, den)))
    }

    pub fn from_ratio(r: Rational64) -> Self {
        Phase::Exact(reduce_ratio(r))
    }

    pub fn from_turns(x: f64) -> Self {
        Phase::Approx(wrap_f64(x))
    }

    /// Label −1, the conventional unlabelled H-box.
    pub fn half() -> Self {
        Phase::new(1, 2)
    }

    pub fn quarter() -> Self {
        Phase::new(1, 4)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Phase::Exact(r) => r.is_zero(),
            Phase::Approx(x) => *x == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Phase::Exact(_))
    }

    pub fn as_ratio(&self) -> Option<Rational64> {
        match self {
            Phase::Exact(r) => Some(*r),
            Phase::Approx(_) => None,
        }
    }

    /// Fraction of a turn as a float in `[0, 1)`.
    pub fn turns(&self) -> f64 {
        match self {
            Phase::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Phase::Approx(x) => *x,
        }
    }

    /// `e^{2πi·self}`.
    pub fn to_complex(&self) -> Complex64 {
        let t = self.turns();
        // Exact multiples of a quarter turn come out exact.
        if let Phase::Exact(r) = self {
            match (*r.numer(), *r.denom()) {
                (0, _) => return Complex64::new(1.0, 0.0),
                (1, 4) => return Complex64::new(0.0, 1.0),
                (1, 2) => return Complex64::new(-1.0, 0.0),
                (3, 4) => return Complex64::new(0.0, -1.0),
                _ => {}
            }
        }
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
    }

    pub fn mul_int(self, k: i64) -> Phase {
        match self {
            Phase::Exact(r) => {
                let d = *r.denom() as i128;
                let n = (*r.numer() as i128 * (k as i128 % d)).rem_euclid(d);
                Phase::Exact(Rational64::new(n as i64, d as i64))
            }
            Phase::Approx(x) => Phase::from_turns(x * k as f64),
        }
    }

    pub fn mul_bigint(self, k: &BigInt) -> Phase {
        match self {
            Phase::Exact(r) => {
                let d = BigInt::from(*r.denom());
                let k = k.mod_floor(&d);
                let n = (k * BigInt::from(*r.numer())).mod_floor(&d);
                Phase::Exact(Rational64::new(n.to_i64().unwrap(), *r.denom()))
            }
            Phase::Approx(x) => Phase::from_turns(x * k.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// `self · (−2)^e` reduced mod 1, without forming the power explicitly.
    pub fn mul_neg2_pow(self, e: u32) -> Phase {
        match self {
            Phase::Exact(r) => {
                let d = *r.denom() as i128;
                let mut acc: i128 = 1;
                let mut base: i128 = (-2i128).rem_euclid(d);
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = (acc * base).rem_euclid(d);
                    }
                    base = (base * base).rem_euclid(d);
                    e >>= 1;
                }
                let n = (*r.numer() as i128 * acc).rem_euclid(d);
                Phase::Exact(Rational64::new(n as i64, d as i64))
            }
            Phase::Approx(x) => Phase::from_turns(x * (-2f64).powi(e as i32)),
        }
    }

    /// Largest `r` such that `self · (−2)^{r−1}` can be nonzero mod 1, if bounded.
    ///
    /// Only dyadic exact phases `p/2^k` have a bound (`r ≤ k`).
    pub fn dyadic_support(&self) -> Option<u32> {
        match self {
            Phase::Exact(r) => {
                let d = *r.denom() as u64;
                d.is_power_of_two().then(|| d.trailing_zeros())
            }
            Phase::Approx(_) => None,
        }
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ZERO
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Phase::Exact(a), Phase::Exact(b)) => a == b,
            (Phase::Approx(a), Phase::Approx(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Phase {}

impl Hash for Phase {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Phase::Exact(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Phase::Approx(x) => {
                1u8.hash(state);
                x.to_bits().hash(state);
            }
        }
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        match (self, rhs) {
            (Phase::Exact(a), Phase::Exact(b)) => Phase::from_ratio(a + b),
            (a, b) => Phase::from_turns(a.turns() + b.turns()),
        }
    }
}

impl AddAssign for Phase {
    fn add_assign(&mut self, rhs: Phase) {
        *self = *self + rhs;
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        match self {
            Phase::Exact(a) => Phase::from_ratio(-a),
            Phase::Approx(x) => Phase::from_turns(-x),
        }
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Phase::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            // `{:?}` always keeps a decimal point, which marks the value inexact.
            Phase::Approx(x) => write!(f, "{x:?}"),
        }
    }
}

/// Parses `p/q` or `p` (exact), or a decimal number (inexact turns).
pub fn parse_rational(s: &str) -> Result<Rational64, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Fraction(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<i64>().map_err(|_| bad())?,
            d.trim().parse::<i64>().map_err(|_| bad())?,
        ),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d <= 0 {
        return Err(bad());
    }
    Ok(Rational64::new(n, d))
}

impl FromStr for Phase {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.contains('.') || t.contains('e') || t.contains('E') {
            let x: f64 = t.parse().map_err(|_| ParseError::Fraction(t.to_string()))?;
            if !x.is_finite() {
                return Err(ParseError::Fraction(t.to_string()));
            }
            return Ok(Phase::from_turns(x));
        }
        parse_rational(t).map(Phase::from_ratio)
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A global scalar `2^{pow2/2} · e^{2πi·phase} · Π extras`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalarFactor {
    /// Exponent of `√2`.
    pub pow2: i32,
    pub phase: Phase,
    /// Residual complex factors, e.g. from H-box labels that are not phases.
    pub extras: Vec<Complex64>,
}

impl ScalarFactor {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn sqrt2_pow(pow2: i32) -> Self {
        ScalarFactor {
            pow2,
            ..Self::default()
        }
    }

    pub fn from_phase(phase: Phase) -> Self {
        ScalarFactor {
            phase,
            ..Self::default()
        }
    }

    pub fn new(pow2: i32, phase: Phase) -> Self {
        ScalarFactor {
            pow2,
            phase,
            extras: Vec::new(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.pow2 == 0 && self.phase.is_zero() && self.extras.is_empty()
    }

    /// True when the scalar has unit modulus and no residual factors.
    pub fn is_pure_phase(&self) -> bool {
        self.pow2 == 0 && self.extras.is_empty()
    }

    pub fn combine(&self, other: &ScalarFactor) -> ScalarFactor {
        let mut extras = self.extras.clone();
        extras.extend_from_slice(&other.extras);
        ScalarFactor {
            pow2: self.pow2 + other.pow2,
            phase: self.phase + other.phase,
            extras,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut mag = 2f64.powi(self.pow2.div_euclid(2));
        if self.pow2.rem_euclid(2) == 1 {
            mag *= std::f64::consts::SQRT_2;
        }
        let mut z = self.phase.to_complex() * mag;
        for e in &self.extras {
            z *= e;
        }
        z
    }

    pub fn conj(&self) -> ScalarFactor {
        ScalarFactor {
            pow2: self.pow2,
            phase: -self.phase,
            extras: self.extras.iter().map(|z| z.conj()).collect(),
        }
    }

    /// The quotient `self / other`, used to record per-step scalar deltas.
    pub fn delta_from(&self, other: &ScalarFactor) -> ScalarFactor {
        let extras = if self.extras.len() >= other.extras.len() && self.extras[..other.extras.len()] == other.extras[..]
        {
            self.extras[other.extras.len()..].to_vec()
        } else {
            let num: Complex64 = self.extras.iter().product();
            let den: Complex64 = other.extras.iter().product();
            vec![num / den]
        };
        ScalarFactor {
            pow2: self.pow2 - other.pow2,
            phase: self.phase - other.phase,
            extras,
        }
    }
}

impl Mul for ScalarFactor {
    type Output = ScalarFactor;
    fn mul(self, rhs: ScalarFactor) -> ScalarFactor {
        self.combine(&rhs)
    }
}

impl MulAssign for ScalarFactor {
    fn mul_assign(&mut self, rhs: ScalarFactor) {
        self.pow2 += rhs.pow2;
        self.phase += rhs.phase;
        self.extras.extend(rhs.extras);
    }
}

impl fmt::Display for ScalarFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "√2^{} · e^(2πi·{})", self.pow2, self.phase)?;
        for e in &self.extras {
            write!(f, " · ({}{:+}i)", e.re, e.im)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    pow2: String,
    phase: Phase,
    #[serde(default)]
    extras: Vec<[f64; 2]>,
}

impl Serialize for ScalarFactor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // pow2 is written as the exponent of two, e.g. "1/2" for √2.
        let e = Rational64::new(self.pow2 as i64, 2);
        let pow2 = if *e.denom() == 1 {
            e.numer().to_string()
        } else {
            format!("{}/{}", e.numer(), e.denom())
        };
        ScalarRepr {
            pow2,
            phase: self.phase,
            extras: self.extras.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScalarFactor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(d)?;
        let e = parse_rational(&repr.pow2).map_err(serde::de::Error::custom)?;
        let twice = e * Rational64::from_integer(2);
        if !twice.is_integer() {
            return Err(serde::de::Error::custom(format!(
                "pow2 exponent {} is not a multiple of 1/2",
                repr.pow2
            )));
        }
        Ok(ScalarFactor {
            pow2: twice.to_integer() as i32,
            phase: repr.phase,
            extras: repr.extras.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phase_add_examples() {
        assert_eq!(Phase::new(1, 2) + Phase::new(1, 2), Phase::ZERO);
        assert_eq!(Phase::new(1, 4) + Phase::new(1, 8), Phase::new(3, 8));
        assert_eq!(Phase::new(7, 8) + Phase::new(1, 4), Phase::new(1, 8));
    }

    #[test]
    fn exact_plus_approx_is_approx() {
        let p = Phase::new(1, 4) + Phase::from_turns(0.1);
        assert!(!p.is_exact());
        assert!((p.turns() - 0.35).abs() < 1e-15);
    }

    #[test]
    fn scalar_combine_examples() {
        let a = ScalarFactor::new(1, Phase::new(1, 8));
        assert_eq!(a.combine(&a), ScalarFactor::new(2, Phase::new(1, 4)));
        let s = ScalarFactor::new(-3, Phase::new(5, 8));
        assert_eq!(ScalarFactor::one().combine(&s), s);
        // 2^{-1} · (2 · e^{iπ}) = −1
        let c = ScalarFactor::new(-2, Phase::ZERO).combine(&ScalarFactor::new(2, Phase::half()));
        assert_eq!(c, ScalarFactor::new(0, Phase::half()));
        assert!((c.to_complex() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn scalar_to_complex_examples() {
        assert_eq!(ScalarFactor::sqrt2_pow(2).to_complex(), Complex64::new(2.0, 0.0));
        let z = ScalarFactor::new(1, Phase::new(1, 8)).to_complex();
        assert!((z - Complex64::new(1.0, 1.0)).norm() < 1e-15);
        let m = ScalarFactor::from_phase(Phase::half()).to_complex();
        assert_eq!(m, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn text_forms() {
        assert_eq!("3/8".parse::<Phase>().unwrap(), Phase::new(3, 8));
        assert_eq!("-1/4".parse::<Phase>().unwrap(), Phase::new(3, 4));
        assert_eq!("5/4".parse::<Phase>().unwrap().to_string(), "1/4");
        assert!("1/0".parse::<Phase>().is_err());
        assert!("x/2".parse::<Phase>().is_err());
        let s = ScalarFactor::new(-3, Phase::new(1, 8));
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"pow2":"-3/2","phase":"1/8","extras":[]}"#);
        assert_eq!(serde_json::from_str::<ScalarFactor>(&j).unwrap(), s);
        assert!(serde_json::from_str::<ScalarFactor>(r#"{"pow2":"1/3","phase":"0"}"#).is_err());
    }

    #[test]
    fn neg2_powers() {
        let a = Phase::new(1, 8);
        assert_eq!(a.mul_neg2_pow(0), a);
        assert_eq!(a.mul_neg2_pow(1), Phase::new(-2, 8));
        assert_eq!(a.mul_neg2_pow(2), Phase::new(1, 2));
        assert_eq!(a.mul_neg2_pow(3), Phase::ZERO);
        assert_eq!(Phase::new(1, 3).mul_neg2_pow(5), Phase::new(-32, 3));
        assert_eq!(a.dyadic_support(), Some(3));
        assert_eq!(Phase::new(1, 6).dyadic_support(), None);
    }

    fn arb_phase() -> impl Strategy<Value = Phase> {
        (-50i64..50, 1i64..40).prop_map(|(n, d)| Phase::new(n, d))
    }

    fn arb_scalar() -> impl Strategy<Value = ScalarFactor> {
        (
            -6i32..6,
            arb_phase(),
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 0..2),
        )
            .prop_map(|(p, ph, ex)| ScalarFactor {
                pow2: p,
                phase: ph,
                extras: ex.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
            })
    }

    proptest! {
        #[test]
        fn phase_group_laws(a in arb_phase(), b in arb_phase(), c in arb_phase()) {
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a + (-a), Phase::ZERO);
            let r = a.as_ratio().unwrap();
            prop_assert!(*r.numer() >= 0 && r.numer() < r.denom());
        }

        #[test]
        fn scalar_combine_is_multiplicative(a in arb_scalar(), b in arb_scalar()) {
            let lhs = a.combine(&b).to_complex();
            let rhs = a.to_complex() * b.to_complex();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
