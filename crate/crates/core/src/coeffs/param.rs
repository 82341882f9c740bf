use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Coeff, CoeffError, Cyclotomic, Fp, TermCoeff, ToPrimeField};

/// Orders `t2` before `t10`: alphabetic prefix, then numeric suffix.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let idx = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (head, tail) = s.split_at(idx);
        (head, tail.parse().ok())
    }
    let (ha, na) = split(a);
    let (hb, nb) = split(b);
    ha.cmp(hb).then(na.cmp(&nb)).then(a.cmp(b))
}

/// Monomial in the parameter symbols: sorted `(symbol, exponent)` pairs, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ParamMono(Vec<(String, u32)>);

impl ParamMono {
    pub fn one() -> Self {
        ParamMono(Vec::new())
    }

    pub fn symbol(name: &str) -> Self {
        ParamMono(vec![(name.to_string(), 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, rhs: &ParamMono) -> ParamMono {
        let mut out: Vec<(String, u32)> = Vec::with_capacity(self.0.len() + rhs.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < rhs.0.len() {
            let ord = match (self.0.get(i), rhs.0.get(j)) {
                (Some(a), Some(b)) => natural_cmp(&a.0, &b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(rhs.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + rhs.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        ParamMono(out)
    }
}

impl Ord for ParamMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(other.0.iter()) {
                // earlier symbols with larger exponents sort higher (lex)
                let c = natural_cmp(&b.0, &a.0).then(a.1.cmp(&b.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl PartialOrd for ParamMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ParamMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in named parameters with cyclotomic coefficients.
///
/// Only ring operations are available; division is limited to constants.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ParamCoeff {
    terms: BTreeMap<ParamMono, Cyclotomic>,
}

/// A value a parameter can be specialized to.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FieldValue {
    Cyc(Cyclotomic),
    Prime(Fp),
}

impl ParamCoeff {
    pub fn zero() -> Self {
        ParamCoeff::default()
    }

    pub fn constant(c: Cyclotomic) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ParamMono::one(), c);
        }
        ParamCoeff { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Cyclotomic::from_int(n))
    }

    pub fn symbol(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(ParamMono::symbol(name), Cyclotomic::one());
        ParamCoeff { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMono, &Cyclotomic)> {
        self.terms.iter()
    }

    /// The value when no parameter occurs.
    pub fn as_constant(&self) -> Option<Cyclotomic> {
        match self.terms.len() {
            0 => Some(Cyclotomic::zero()),
            1 => self.terms.get(&ParamMono::one()).cloned(),
            _ => None,
        }
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(s, _)| s.clone())).collect()
    }

    fn insert_add(terms: &mut BTreeMap<ParamMono, Cyclotomic>, m: ParamMono, c: Cyclotomic) {
        match terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().plus(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Evaluation homomorphism into `Q(zeta)` or `F_p`.
    pub fn specialize(&self, assignment: &BTreeMap<String, FieldValue>) -> Result<FieldValue, CoeffError> {
        let primes: BTreeSet<u64> = assignment
            .values()
            .filter_map(|v| match v {
                FieldValue::Prime(x) => Some(x.modulus()),
                FieldValue::Cyc(_) => None,
            })
            .collect();
        let has_cyc = assignment.values().any(|v| matches!(v, FieldValue::Cyc(_)));
        match (primes.len(), has_cyc) {
            (0, _) => {
                let map = assignment
                    .iter()
                    .filter_map(|(k, v)| match v {
                        FieldValue::Cyc(c) => Some((k.clone(), c.clone())),
                        FieldValue::Prime(_) => None,
                    })
                    .collect();
                self.specialize_cyclotomic(&map).map(FieldValue::Cyc)
            }
            (1, false) => {
                let p = *primes.iter().next().unwrap();
                let map = assignment
                    .iter()
                    .filter_map(|(k, v)| match v {
                        FieldValue::Prime(x) => Some((k.clone(), *x)),
                        FieldValue::Cyc(_) => None,
                    })
                    .collect();
                self.specialize_prime(&map, p).map(FieldValue::Prime)
            }
            _ => Err(CoeffError::MixedFields),
        }
    }

    pub fn specialize_cyclotomic(&self, assignment: &BTreeMap<String, Cyclotomic>) -> Result<Cyclotomic, CoeffError> {
        let mut acc = Cyclotomic::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (s, e) in &m.0 {
                let v = assignment.get(s).ok_or_else(|| CoeffError::MissingSymbol(s.clone()))?;
                term = term.checked_mul(&v.pow_u(*e as u64))?;
            }
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }

    pub fn specialize_prime(&self, assignment: &BTreeMap<String, Fp>, p: u64) -> Result<Fp, CoeffError> {
        let mut acc = Fp::new(0, p)?;
        for (m, c) in &self.terms {
            let mut term = c.to_prime(p)?;
            for (s, e) in &m.0 {
                let v = assignment.get(s).ok_or_else(|| CoeffError::MissingSymbol(s.clone()))?;
                term = term.checked_mul(&v.pow(*e as u64))?;
            }
            acc = acc.checked_add(&term)?;
        }
        Ok(acc)
    }

    /// Substitutes the assigned symbols and keeps the others symbolic.
    pub fn partial_specialize(&self, assignment: &BTreeMap<String, Cyclotomic>) -> Result<ParamCoeff, CoeffError> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for (s, e) in &m.0 {
                match assignment.get(s) {
                    Some(v) => coeff = coeff.checked_mul(&v.pow_u(*e as u64))?,
                    None => rest.push((s.clone(), *e)),
                }
            }
            Self::insert_add(&mut terms, ParamMono(rest), coeff);
        }
        Ok(ParamCoeff { terms })
    }
}

impl From<Cyclotomic> for ParamCoeff {
    fn from(c: Cyclotomic) -> Self {
        ParamCoeff::constant(c)
    }
}

impl From<i64> for ParamCoeff {
    fn from(n: i64) -> Self {
        ParamCoeff::from_int(n)
    }
}

fn term_body(m: &ParamMono, c: &Cyclotomic) -> (bool, String) {
    if m.is_one() {
        return match c.term_coeff() {
            TermCoeff::One => (false, "1".into()),
            TermCoeff::MinusOne => (true, "1".into()),
            TermCoeff::Simple { negative, body } => (negative, body),
            TermCoeff::Compound(s) => (false, format!("({s})")),
        };
    }
    match c.term_coeff() {
        TermCoeff::One => (false, m.to_string()),
        TermCoeff::MinusOne => (true, m.to_string()),
        TermCoeff::Simple { negative, body } => (negative, format!("{body}*{m}")),
        TermCoeff::Compound(s) => (false, format!("({s})*{m}")),
    }
}

impl fmt::Display for ParamCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, body) = term_body(m, c);
            match (i == 0, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl Coeff for ParamCoeff {
    const IS_FIELD: bool = false;

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }
    fn zero_like(&self) -> Self {
        ParamCoeff::zero()
    }
    fn one_like(&self) -> Self {
        ParamCoeff::from_int(1)
    }
    fn plus(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            Self::insert_add(&mut terms, m.clone(), c.clone());
        }
        ParamCoeff { terms }
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negated())
    }
    fn times(&self, rhs: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                Self::insert_add(&mut terms, ma.mul(mb), ca.times(cb));
            }
        }
        ParamCoeff { terms }
    }
    fn negated(&self) -> Self {
        ParamCoeff { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.negated())).collect() }
    }
    fn times_int(&self, n: i64) -> Self {
        if n == 0 {
            return ParamCoeff::zero();
        }
        ParamCoeff { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.times_int(n))).collect() }
    }
    fn inv(&self) -> Option<Self> {
        self.as_constant().and_then(|c| c.inv()).map(ParamCoeff::constant)
    }
    fn term_coeff(&self) -> TermCoeff {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return c.term_coeff();
            }
            let (negative, body) = term_body(m, c);
            if body.starts_with('(') {
                return TermCoeff::Compound(self.to_string());
            }
            return TermCoeff::Simple { negative, body };
        }
        TermCoeff::Compound(self.to_string())
    }
}

impl ToPrimeField for ParamCoeff {
    fn to_prime(&self, p: u64) -> Result<Fp, CoeffError> {
        match self.as_constant() {
            Some(c) => c.to_prime(p),
            None => Err(CoeffError::MissingSymbol(self.symbols().into_iter().next().unwrap_or_default())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(name: &str) -> ParamCoeff {
        ParamCoeff::symbol(name)
    }

    #[test]
    fn natural_order() {
        let mut v = vec!["t10", "t2", "t1", "s3"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, vec!["s3", "t1", "t2", "t10"]);
    }

    #[test]
    fn specialize_examples() {
        let one = FieldValue::Cyc(Cyclotomic::one());
        let expr = t("t1").times(&t("t2")).plus(&ParamCoeff::from_int(1));
        let a: BTreeMap<_, _> = [("t1".to_string(), one.clone()), ("t2".to_string(), one)].into();
        assert_eq!(expr.specialize(&a).unwrap(), FieldValue::Cyc(Cyclotomic::from_int(2)));

        let z = Cyclotomic::zeta(3);
        let a: BTreeMap<_, _> = [("t1".to_string(), FieldValue::Cyc(z.clone()))].into();
        assert_eq!(t("t1").specialize(&a).unwrap(), FieldValue::Cyc(z));

        let expr = t("t1").times(&t("t1")).minus(&t("t2"));
        let a: BTreeMap<_, _> = [
            ("t1".to_string(), FieldValue::Prime(Fp::new(2, 7).unwrap())),
            ("t2".to_string(), FieldValue::Prime(Fp::new(4, 7).unwrap())),
        ]
        .into();
        assert_eq!(expr.specialize(&a).unwrap(), FieldValue::Prime(Fp::new(0, 7).unwrap()));
    }

    #[test]
    fn specialize_errors() {
        let expr = t("t1").times(&t("t2"));
        let a: BTreeMap<_, _> = [("t1".to_string(), FieldValue::Cyc(Cyclotomic::one()))].into();
        assert_eq!(expr.specialize(&a), Err(CoeffError::MissingSymbol("t2".into())));
        let a: BTreeMap<_, _> = [
            ("t1".to_string(), FieldValue::Cyc(Cyclotomic::one())),
            ("t2".to_string(), FieldValue::Prime(Fp::new(1, 7).unwrap())),
        ]
        .into();
        assert_eq!(expr.specialize(&a), Err(CoeffError::MixedFields));
    }

    #[test]
    fn display() {
        let expr = t("t1").times(&t("t2")).plus(&ParamCoeff::from_int(-3)).plus(&t("t10"));
        assert_eq!(expr.to_string(), "t1*t2 + t10 - 3");
        let zt = ParamCoeff::constant(&Cyclotomic::one() + &Cyclotomic::zeta(3)).times(&t("t1"));
        assert_eq!(zt.to_string(), "(1 + zeta)*t1");
        assert!(matches!(zt.term_coeff(), TermCoeff::Compound(_)));
    }
}
