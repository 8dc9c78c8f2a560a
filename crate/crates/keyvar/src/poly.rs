//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Every polynomial lives over a fixed [`VariableUniverse`]. Terms are kept in
//! a canonical map from dense exponent vectors to nonzero coefficients, so two
//! equal polynomials always have identical term maps.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("operands live in different variable universes")]
    UniverseMismatch,
    #[error("point does not assign a value to `{0}`")]
    MissingCoordinate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Ordered list of variable names shared by a family of polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableUniverse {
    names: Vec<String>,
}

/// The 18 coordinates of the ambient affine space of the key variety family,
/// in the fixed canonical order.
pub const SIGMA_VARS: [&str; 18] = [
    "p1", "p2", "p3", "p4", "q1", "q2", "q3", "r", "u", "s11", "s12", "s13", "s22", "s23", "s33",
    "t1", "t2", "t3",
];

/// Coordinates of the 18-dimensional ambient space of the unprojected variety.
pub const UPSILON_VARS: [&str; 18] = [
    "x1", "x2", "y1", "y2", "z", "s1", "s2", "s3", "s4", "t1", "t2", "t3", "t4", "p1", "p2", "p3",
    "p4", "u",
];

impl VariableUniverse {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, a) in names.iter().enumerate() {
            for b in names.iter().skip(i + 1) {
                assert_ne!(a, b, "duplicate variable name `{a}` in universe");
            }
        }
        Arc::new(VariableUniverse { names })
    }

    /// The base universe of the key variety family.
    pub fn sigma() -> Arc<Self> {
        Self::new(SIGMA_VARS)
    }

    /// The base universe extended by parameter symbols (section coefficients
    /// and similar constants of weight zero).
    pub fn sigma_with_params<S: AsRef<str>>(params: &[S]) -> Arc<Self> {
        Self::new(
            SIGMA_VARS
                .iter()
                .map(|s| s.to_string())
                .chain(params.iter().map(|p| p.as_ref().to_string())),
        )
    }

    pub fn upsilon() -> Arc<Self> {
        Self::new(UPSILON_VARS)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize, PolyError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }
}

fn same_universe(a: &Polynomial, b: &Polynomial) -> bool {
    Arc::ptr_eq(&a.uni, &b.uni) || a.uni.names == b.uni.names
}

/// Exact multivariate polynomial in canonical form: no zero coefficients are
/// stored and the term map is ordered by the exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    uni: Arc<VariableUniverse>,
    terms: BTreeMap<Vec<u16>, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

impl Polynomial {
    pub fn zero(uni: &Arc<VariableUniverse>) -> Self {
        Polynomial {
            uni: uni.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(uni: &Arc<VariableUniverse>, c: BigRational) -> Self {
        let mut p = Self::zero(uni);
        if !c.is_zero() {
            p.terms.insert(vec![0; uni.len()], c);
        }
        p
    }

    pub fn one(uni: &Arc<VariableUniverse>) -> Self {
        Self::constant(uni, BigRational::one())
    }

    pub fn var(uni: &Arc<VariableUniverse>, name: &str) -> Result<Self, PolyError> {
        let idx = uni.index_of(name)?;
        let mut expo = vec![0u16; uni.len()];
        expo[idx] = 1;
        let mut p = Self::zero(uni);
        p.terms.insert(expo, BigRational::one());
        Ok(p)
    }

    /// Builds a polynomial from raw terms, merging like monomials and dropping
    /// cancellations; the empty list gives the zero polynomial.
    pub fn build(
        uni: &Arc<VariableUniverse>,
        terms: impl IntoIterator<Item = (BigRational, Vec<(String, u16)>)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(uni);
        for (coeff, monomial) in terms {
            let mut expo = vec![0u16; uni.len()];
            for (name, e) in monomial {
                let idx = uni.index_of(&name)?;
                expo[idx] += e;
            }
            add_term(&mut p.terms, expo, coeff);
        }
        Ok(p)
    }

    pub fn universe(&self) -> &Arc<VariableUniverse> {
        &self.uni
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Variables that actually occur with positive exponent.
    pub fn support(&self) -> Vec<String> {
        let mut used = vec![false; self.uni.len()];
        for expo in self.terms.keys() {
            for (i, &e) in expo.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        self.uni
            .names()
            .iter()
            .zip(used)
            .filter_map(|(n, u)| u.then(|| n.clone()))
            .collect()
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&vec![0u16; self.uni.len()])
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of the given variable's first power within the degree-one
    /// part, ignoring all other terms.
    pub fn linear_coefficient(&self, name: &str) -> Result<BigRational, PolyError> {
        let idx = self.uni.index_of(name)?;
        let mut expo = vec![0u16; self.uni.len()];
        expo[idx] = 1;
        Ok(self
            .terms
            .get(&expo)
            .cloned()
            .unwrap_or_else(BigRational::zero))
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(same_universe(self, other), "universe mismatch in add");
        let mut terms = self.terms.clone();
        for (expo, c) in &other.terms {
            add_term(&mut terms, expo.clone(), c.clone());
        }
        Polynomial {
            uni: self.uni.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(same_universe(self, other), "universe mismatch in mul");
        let mut terms: BTreeMap<Vec<u16>, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let expo: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                add_term(&mut terms, expo, ca * cb);
            }
        }
        Polynomial {
            uni: self.uni.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.uni);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(&self.uni);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Checked binary arithmetic, reporting universe mismatches as errors.
    pub fn arith(op: ArithOp, a: &Self, b: &Self) -> Result<Self, PolyError> {
        if !same_universe(a, b) {
            return Err(PolyError::UniverseMismatch);
        }
        Ok(match op {
            ArithOp::Add => a.add(b),
            ArithOp::Sub => a.sub(b),
            ArithOp::Mul => a.mul(b),
        })
    }

    /// Simultaneous substitution of polynomials for a subset of the variables.
    pub fn substitute(&self, map: &BTreeMap<String, Polynomial>) -> Result<Self, PolyError> {
        let mut replaced: Vec<Option<&Polynomial>> = vec![None; self.uni.len()];
        for (name, rhs) in map {
            let idx = self.uni.index_of(name)?;
            if !same_universe(self, rhs) {
                return Err(PolyError::UniverseMismatch);
            }
            replaced[idx] = Some(rhs);
        }
        let mut out = Self::zero(&self.uni);
        for (expo, coeff) in &self.terms {
            let mut term = Self::constant(&self.uni, coeff.clone());
            let mut plain = vec![0u16; self.uni.len()];
            for (i, &e) in expo.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match replaced[i] {
                    Some(rhs) => term = term.mul(&rhs.pow(e as u32)),
                    None => plain[i] = e,
                }
            }
            let mut shifted: BTreeMap<Vec<u16>, BigRational> = BTreeMap::new();
            for (e, c) in term.terms {
                let expo: Vec<u16> = e.iter().zip(&plain).map(|(a, b)| a + b).collect();
                add_term(&mut shifted, expo, c);
            }
            for (e, c) in shifted {
                add_term(&mut out.terms, e, c);
            }
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point covering every occurring variable.
    pub fn evaluate(&self, point: &BTreeMap<String, BigRational>) -> Result<BigRational, PolyError> {
        let mut values: Vec<Option<&BigRational>> = vec![None; self.uni.len()];
        for (name, v) in point {
            // Extraneous names are ignored so one point can serve several
            // universes; only occurring variables must be covered.
            if let Ok(idx) = self.uni.index_of(name) {
                values[idx] = Some(v);
            }
        }
        let mut acc = BigRational::zero();
        for (expo, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (i, &e) in expo.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values[i].ok_or_else(|| {
                    PolyError::MissingCoordinate(self.uni.names()[i].clone())
                })?;
                for _ in 0..e {
                    term *= v;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn partial_derivative(&self, name: &str) -> Result<Self, PolyError> {
        let idx = self.uni.index_of(name)?;
        let mut out = Self::zero(&self.uni);
        for (expo, coeff) in &self.terms {
            let e = expo[idx];
            if e == 0 {
                continue;
            }
            let mut dexpo = expo.clone();
            dexpo[idx] = e - 1;
            add_term(&mut out.terms, dexpo, coeff * int(e as i64));
        }
        Ok(out)
    }

    /// Weighted degree of every term under `weight_of`, or the inhomogeneity
    /// witness. The zero polynomial is homogeneous of every degree.
    pub fn weighted_degree(&self, weight_of: impl Fn(&str) -> i64) -> Degree {
        let names = self.uni.names();
        let mut degree: Option<i64> = None;
        for expo in self.terms.keys() {
            let d: i64 = expo
                .iter()
                .enumerate()
                .map(|(i, &e)| weight_of(&names[i]) * e as i64)
                .sum();
            match degree {
                None => degree = Some(d),
                Some(prev) if prev != d => return Degree::Inhomogeneous { seen: prev, and: d },
                Some(_) => {}
            }
        }
        match degree {
            None => Degree::Any,
            Some(d) => Degree::Homogeneous(d),
        }
    }

    /// Parses the textual polynomial format: terms joined by `+`/`-`, each a
    /// `*`-separated product of an optional `num` or `num/den` coefficient and
    /// `var` or `var^exp` factors, e.g. `p1*q1 + 2/3*t2^2 - r`.
    pub fn parse(uni: &Arc<VariableUniverse>, text: &str) -> Result<Self, PolyError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(PolyError::Parse("empty input".into()));
        }
        let mut out = Self::zero(uni);
        let mut rest = text;
        let mut sign = BigRational::one();
        // Leading sign.
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        }
        loop {
            let split = rest
                .char_indices()
                .find(|&(_, c)| c == '+' || c == '-')
                .map(|(i, c)| (i, c));
            let (term_text, next) = match split {
                Some((i, c)) => (&rest[..i], Some((c, &rest[i + 1..]))),
                None => (rest, None),
            };
            let term = parse_term(uni, term_text.trim())?;
            out = out.add(&term.scale(&sign));
            match next {
                Some((c, r)) => {
                    sign = if c == '-' {
                        -BigRational::one()
                    } else {
                        BigRational::one()
                    };
                    rest = r.trim_start();
                }
                None => break,
            }
        }
        Ok(out)
    }

    /// Iterates over `(exponent vector, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &BigRational)> {
        self.terms.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Result of a weighted homogeneity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Degree {
    /// The zero polynomial: homogeneous of every degree.
    Any,
    Homogeneous(i64),
    Inhomogeneous { seen: i64, and: i64 },
}

impl Degree {
    pub fn is_homogeneous_of(&self, d: i64) -> bool {
        matches!(self, Degree::Any) || matches!(self, Degree::Homogeneous(x) if *x == d)
    }
}

fn add_term(terms: &mut BTreeMap<Vec<u16>, BigRational>, expo: Vec<u16>, coeff: BigRational) {
    if coeff.is_zero() {
        return;
    }
    match terms.get_mut(&expo) {
        Some(c) => {
            *c += coeff;
            if c.is_zero() {
                terms.remove(&expo);
            }
        }
        None => {
            terms.insert(expo, coeff);
        }
    }
}

fn parse_term(uni: &Arc<VariableUniverse>, text: &str) -> Result<Polynomial, PolyError> {
    if text.is_empty() {
        return Err(PolyError::Parse("empty term".into()));
    }
    let mut coeff = BigRational::one();
    let mut expo = vec![0u16; uni.len()];
    for factor in text.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(PolyError::Parse(format!("empty factor in `{text}`")));
        }
        if factor.chars().next().unwrap().is_ascii_digit() {
            coeff *= parse_rational(factor)?;
        } else {
            let (name, e) = match factor.split_once('^') {
                Some((n, e)) => {
                    let e: u16 = e
                        .trim()
                        .parse()
                        .map_err(|_| PolyError::Parse(format!("bad exponent in `{factor}`")))?;
                    (n.trim(), e)
                }
                None => (factor, 1),
            };
            let idx = uni.index_of(name)?;
            expo[idx] += e;
        }
    }
    let mut p = Polynomial::zero(uni);
    add_term(&mut p.terms, expo, coeff);
    Ok(p)
}

fn parse_rational(text: &str) -> Result<BigRational, PolyError> {
    let parse_int = |s: &str| -> Result<BigInt, PolyError> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| PolyError::Parse(format!("bad number `{s}`")))
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(PolyError::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
        None => Ok(BigRational::from(parse_int(text)?)),
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.uni.names();
        for (i, (expo, coeff)) in self.terms.iter().rev().enumerate() {
            let mag = coeff.abs();
            if i == 0 {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
            } else if coeff.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || expo.iter().all(|&e| e == 0) {
                factors.push(mag.to_string());
            }
            for (j, &e) in expo.iter().enumerate() {
                if e == 1 {
                    factors.push(names[j].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", names[j], e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}
impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::sub(self, rhs)
    }
}
impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}
impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}
