//! Sparse multivariate polynomials over the edge variables, with exact
//! arbitrary-precision integer coefficients.
//!
//! Rational values never appear inside a polynomial: substituting a
//! rational expression for a variable goes through [`Polynomial::substitute_rational`],
//! which clears denominators against a caller-supplied degree bound.
//!
//! The canonical term order sorts variables by name and, at the first
//! name where two monomials differ, puts the higher power first; the
//! constant term comes last. The textual form produced by `Display`
//! round-trips through [`Polynomial::parse`].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::graph::EdgeId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyError {
    MissingAssignment(EdgeId),
    NonPositiveValue(EdgeId),
    DegreeBound {
        var: EdgeId,
        bound: u32,
        actual: u32,
    },
    ZeroDenominator,
    Parse(String),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::MissingAssignment(e) => write!(f, "no value assigned to variable y_{e}"),
            PolyError::NonPositiveValue(e) => write!(f, "value for y_{e} must be positive"),
            PolyError::DegreeBound { var, bound, actual } => write!(
                f,
                "degree bound {bound} for y_{var} is below the actual degree {actual}"
            ),
            PolyError::ZeroDenominator => write!(f, "denominator polynomial is zero"),
            PolyError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for PolyError {}

/// A product of edge variables with positive exponents, kept sorted by
/// variable name. The empty monomial is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<(EdgeId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(e: &EdgeId) -> Self {
        Monomial {
            exps: alloc::vec![(e.clone(), 1)],
        }
    }

    /// Builds a monomial from (variable, exponent) pairs; zero exponents
    /// are dropped, repeated variables accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (EdgeId, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<EdgeId, u32> = BTreeMap::new();
        for (e, k) in pairs {
            if k > 0 {
                *map.entry(e).or_insert(0) += k;
            }
        }
        Monomial {
            exps: map.into_iter().collect(),
        }
    }

    /// The squarefree monomial `y^X` of an edge set.
    pub fn from_set<'a, I: IntoIterator<Item = &'a EdgeId>>(set: I) -> Self {
        Monomial::from_pairs(set.into_iter().map(|e| (e.clone(), 1)))
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree_of(&self, e: &EdgeId) -> u32 {
        self.exps
            .iter()
            .find(|(x, _)| x == e)
            .map_or(0, |(_, k)| *k)
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|(_, k)| k).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EdgeId, u32)> {
        self.exps.iter().map(|(e, k)| (e, *k))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(EdgeId, u32)> = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            match self.exps[i].0.cmp(&other.exps[j].0) {
                Ordering::Less => {
                    out.push(self.exps[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.exps[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.exps[i].0.clone(), self.exps[i].1 + other.exps[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Monomial { exps: out }
    }

    /// Removes every power of `e`.
    pub fn without_var(&self, e: &EdgeId) -> Monomial {
        Monomial {
            exps: self.exps.iter().filter(|(x, _)| x != e).cloned().collect(),
        }
    }
}

impl Ord for Monomial {
    /// Canonical order: walk variable names ascending; at the first name
    /// where the exponents differ, the higher power sorts first. A
    /// monomial in no variables (the constant) therefore sorts last.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.exps.get(i), other.exps.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some((ea, ka)), Some((eb, kb))) => match ea.cmp(eb) {
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => {
                        if ka != kb {
                            return kb.cmp(ka);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (i, (e, k)) in self.exps.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *k == 1 {
                write!(f, "y_{e}")?;
            } else {
                write!(f, "y_{e}^{k}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial: a map from monomials to nonzero coefficients.
/// The representation is canonical, so `==` is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Polynomial::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Polynomial::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(e: &EdgeId) -> Self {
        Polynomial::from_monomial(Monomial::var(e), BigInt::one())
    }

    /// The squarefree monomial `y^X` as a polynomial.
    pub fn from_edge_set<'a, I: IntoIterator<Item = &'a EdgeId>>(set: I) -> Self {
        Polynomial::from_monomial(Monomial::from_set(set), BigInt::one())
    }

    pub fn from_monomial(m: Monomial, c: BigInt) -> Self {
        let mut p = Polynomial::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    /// All variables that occur with nonzero exponent.
    pub fn vars(&self) -> Vec<EdgeId> {
        let mut set: alloc::collections::BTreeSet<EdgeId> = Default::default();
        for m in self.terms.keys() {
            for (e, _) in m.iter() {
                set.insert(e.clone());
            }
        }
        set.into_iter().collect()
    }

    pub fn degree_in(&self, e: &EdgeId) -> u32 {
        self.terms.keys().map(|m| m.degree_of(e)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        // Sort-and-merge beats repeated map insertion on the large
        // products that forest polynomials produce.
        let mut products: Vec<(Monomial, BigInt)> =
            Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in other.terms.iter() {
                products.push((ma.mul(mb), ca * cb));
            }
        }
        products.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Monomial, BigInt)> = Vec::with_capacity(products.len());
        for (m, c) in products {
            match merged.last_mut() {
                Some((last_m, last_c)) if *last_m == m => *last_c += c,
                _ => merged.push((m, c)),
            }
        }
        Polynomial {
            terms: merged.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Product with a bit-packed fast path for multilinear operands
    /// with small coefficients (the shape forest polynomials and their
    /// extractions have). Falls back to the generic route otherwise;
    /// the result is identical either way.
    pub fn mul_fast(&self, other: &Polynomial) -> Polynomial {
        match fast_multilinear_product(self, other) {
            Some(p) => p,
            None => self.mul(other),
        }
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn square(&self) -> Polynomial {
        self.mul(self)
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// The polynomial coefficient of `y_g^k`; the variable `g` does not
    /// occur in the result. Returns zero when `k` exceeds the degree.
    pub fn coeff_extract(&self, g: &EdgeId, k: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms.iter() {
            if m.degree_of(g) == k {
                out.add_term(m.without_var(g), c.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to `y_e`.
    pub fn partial(&self, e: &EdgeId) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms.iter() {
            let k = m.degree_of(e);
            if k == 0 {
                continue;
            }
            let mut reduced: Vec<(EdgeId, u32)> = Vec::new();
            for (x, kx) in m.iter() {
                if x == e {
                    if kx > 1 {
                        reduced.push((x.clone(), kx - 1));
                    }
                } else {
                    reduced.push((x.clone(), kx));
                }
            }
            out.add_term(Monomial::from_pairs(reduced), c * BigInt::from(k));
        }
        out
    }

    /// Evaluation at `y_e = 0`.
    pub fn eval_at_zero(&self, e: &EdgeId) -> Polynomial {
        self.coeff_extract(e, 0)
    }

    /// Returns `den^d · p` evaluated at `y_g = num/den`, which is a
    /// polynomial once `d ≥ deg_g(p)`. Fails if the bound is too small
    /// or `den` is zero.
    pub fn substitute_rational(
        &self,
        g: &EdgeId,
        num: &Polynomial,
        den: &Polynomial,
        d: u32,
    ) -> Result<Polynomial, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        let actual = self.degree_in(g);
        if actual > d {
            return Err(PolyError::DegreeBound {
                var: g.clone(),
                bound: d,
                actual,
            });
        }
        let mut out = Polynomial::zero();
        for k in 0..=actual {
            let part = self.coeff_extract(g, k);
            if part.is_zero() {
                continue;
            }
            out = out.add(&part.mul(&num.pow(k)).mul(&den.pow(d - k)));
        }
        if self.is_zero() {
            return Ok(Polynomial::zero());
        }
        Ok(out)
    }

    /// Exact evaluation at a positive rational point. Every variable of
    /// the polynomial must be assigned.
    pub fn evaluate(&self, pt: &RationalPoint) -> Result<BigRational, PolyError> {
        let mut total = BigRational::zero();
        for (m, c) in self.terms.iter() {
            let mut val = BigRational::from_integer(c.clone());
            for (e, k) in m.iter() {
                let v = pt
                    .get(e)
                    .ok_or_else(|| PolyError::MissingAssignment(e.clone()))?;
                for _ in 0..k {
                    val *= v;
                }
            }
            total += val;
        }
        Ok(total)
    }

    /// Number of monomials with a negative coefficient.
    pub fn negative_term_count(&self) -> usize {
        self.terms.values().filter(|c| c.is_negative()).count()
    }

    /// Parses the canonical textual form produced by `Display`.
    /// Accepts arbitrary whitespace around `+`, `-` and `*`.
    pub fn parse(input: &str) -> Result<Polynomial, PolyError> {
        let mut out = Polynomial::zero();
        let s = input.trim();
        if s.is_empty() {
            return Err(PolyError::Parse("empty input".to_string()));
        }
        let mut rest = s;
        let mut sign = BigInt::one();
        // Leading sign.
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        }
        loop {
            let term_end = rest
                .char_indices()
                .find(|&(_, c)| c == '+' || c == '-')
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let term_str = rest[..term_end].trim();
            if term_str.is_empty() {
                return Err(PolyError::Parse("empty term".to_string()));
            }
            let (m, c) = parse_term(term_str)?;
            out.add_term(m, c * &sign);
            if term_end == rest.len() {
                break;
            }
            sign = if rest.as_bytes()[term_end] == b'-' {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            rest = rest[term_end + 1..].trim_start();
            if rest.is_empty() {
                return Err(PolyError::Parse("trailing operator".to_string()));
            }
        }
        Ok(out)
    }
}

/// Exact product of two multilinear polynomials over at most 64 shared
/// variables with `i64`-sized coefficients: monomials become bitmasks,
/// a product monomial is the pair (intersection = squared variables,
/// symmetric difference = single variables), and terms are merged by a
/// single sort. Returns `None` when the operands do not fit the shape.
fn fast_multilinear_product(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    if a.is_zero() || b.is_zero() {
        return Some(Polynomial::zero());
    }
    if a.n_terms() * b.n_terms() < 1 << 10 {
        return None; // not worth the encoding overhead
    }
    let mut vars: alloc::collections::BTreeSet<EdgeId> = Default::default();
    for p in [a, b] {
        for (m, _) in p.terms() {
            for (v, k) in m.iter() {
                if k > 1 {
                    return None;
                }
                vars.insert(v.clone());
            }
        }
    }
    if vars.len() > 64 {
        return None;
    }
    let vars: Vec<EdgeId> = vars.into_iter().collect();
    let bit_of = |m: &Monomial| -> u64 {
        let mut mask = 0u64;
        for (v, _) in m.iter() {
            let i = vars.binary_search(v).expect("collected above");
            mask |= 1 << i;
        }
        mask
    };
    let encode = |p: &Polynomial| -> Option<Vec<(u64, i64)>> {
        let mut out = Vec::with_capacity(p.n_terms());
        for (m, c) in p.terms() {
            out.push((bit_of(m), i64::try_from(c).ok()?));
        }
        Some(out)
    };
    let ea = encode(a)?;
    let eb = encode(b)?;

    let mut products: Vec<(u128, i128)> = Vec::with_capacity(ea.len() * eb.len());
    for &(ma, ca) in &ea {
        for &(mb, cb) in &eb {
            let key = (u128::from(ma & mb) << 64) | u128::from(ma ^ mb);
            products.push((key, i128::from(ca) * i128::from(cb)));
        }
    }
    products.sort_unstable_by_key(|&(k, _)| k);
    let mut merged: Vec<(Monomial, BigInt)> = Vec::new();
    let mut i = 0;
    while i < products.len() {
        let key = products[i].0;
        let mut sum: i128 = 0;
        while i < products.len() && products[i].0 == key {
            sum += products[i].1;
            i += 1;
        }
        if sum == 0 {
            continue;
        }
        let doubled = (key >> 64) as u64;
        let single = key as u64;
        let mono = Monomial::from_pairs(vars.iter().enumerate().filter_map(|(j, v)| {
            let exp = if doubled >> j & 1 == 1 {
                2
            } else if single >> j & 1 == 1 {
                1
            } else {
                0
            };
            (exp > 0).then(|| (v.clone(), exp))
        }));
        merged.push((mono, BigInt::from(sum)));
    }
    // Keys sort by bitmask, not by the canonical monomial order, so
    // rebuild the map rather than assuming sortedness.
    Some(Polynomial {
        terms: merged.into_iter().collect(),
    })
}

fn parse_term(s: &str) -> Result<(Monomial, BigInt), PolyError> {
    let mut coeff = BigInt::one();
    let mut pairs: Vec<(EdgeId, u32)> = Vec::new();
    for factor in s.split('*') {
        let f = factor.trim();
        if f.is_empty() {
            return Err(PolyError::Parse("empty factor".to_string()));
        }
        if let Some(var) = f.strip_prefix("y_") {
            let (name, exp) = match var.split_once('^') {
                Some((n, e)) => {
                    let k: u32 = e
                        .trim()
                        .parse()
                        .map_err(|_| PolyError::Parse(alloc::format!("bad exponent `{e}`")))?;
                    (n.trim(), k)
                }
                None => (var.trim(), 1),
            };
            if name.is_empty() {
                return Err(PolyError::Parse("empty variable name".to_string()));
            }
            pairs.push((EdgeId::new(name), exp));
        } else {
            let c: BigInt = f
                .parse()
                .map_err(|_| PolyError::Parse(alloc::format!("bad coefficient `{f}`")))?;
            coeff *= c;
        }
    }
    Ok((Monomial::from_pairs(pairs), coeff))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// An assignment of a strictly positive rational to each edge variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoint {
    values: BTreeMap<EdgeId, BigRational>,
}

impl RationalPoint {
    pub fn new() -> Self {
        RationalPoint {
            values: BTreeMap::new(),
        }
    }

    /// All-ones on the given variables.
    pub fn all_ones<'a, I: IntoIterator<Item = &'a EdgeId>>(vars: I) -> Self {
        let mut p = RationalPoint::new();
        for e in vars {
            p.values.insert(e.clone(), BigRational::one());
        }
        p
    }

    pub fn assign(&mut self, e: &EdgeId, v: BigRational) -> Result<(), PolyError> {
        if !v.is_positive() {
            return Err(PolyError::NonPositiveValue(e.clone()));
        }
        self.values.insert(e.clone(), v);
        Ok(())
    }

    pub fn get(&self, e: &EdgeId) -> Option<&BigRational> {
        self.values.get(e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EdgeId, &BigRational)> {
        self.values.iter()
    }
}

impl Default for RationalPoint {
    fn default() -> Self {
        RationalPoint::new()
    }
}
