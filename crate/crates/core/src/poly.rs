//! Sparse multivariate polynomials over the Gaussian rationals. These carry
//! the symbolic coefficients of the non-existence arguments (a generic
//! holomorphic 1-form `Σ λ_i φ_i`, a generic closed (2,0)-form
//! `Σ λ_ij φ_i∧φ_j`), so only ring operations and affine substitution are
//! needed; there is no division.
//!
//! Terms are held in degree-lexicographic order over the polynomial's own
//! ordered variable list; no zero coefficient is ever stored.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{GaussRat, Scalar};

/// Exponent vector wrapper ordered degree-lexicographically.
#[derive(Clone, PartialEq, Eq, Debug)]
struct Exps(Vec<u32>);

impl Exps {
    fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exps {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exps {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in named variables with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly {
    vars: Vec<String>,
    terms: BTreeMap<Exps, GaussRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Exps(Vec::new()), c);
        }
        p
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Exps(vec![1]), GaussRat::one());
        Poly { vars: vec![name.to_string()], terms }
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.degree() == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Exps::degree).max().unwrap_or(0)
    }

    /// Rewrites both polynomials over the union of their variable lists.
    fn align(a: &Poly, b: &Poly) -> (Poly, Poly, Vec<String>) {
        let mut vars = a.vars.clone();
        for v in &b.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars.sort();
        (a.reindex(&vars), b.reindex(&vars), vars)
    }

    fn reindex(&self, vars: &[String]) -> Poly {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("variable present"))
            .collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut exps = vec![0u32; vars.len()];
            for (k, &pow) in e.0.iter().enumerate() {
                exps[map[k]] = pow;
            }
            terms.insert(Exps(exps), c.clone());
        }
        Poly { vars: vars.to_vec(), terms }
    }

    fn insert_term(&mut self, e: Exps, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (a, b, vars) = Poly::align(self, other);
        let mut out = Poly { vars, terms: a.terms };
        for (e, c) in b.terms {
            out.insert_term(e, c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let (a, b, vars) = Poly::align(self, other);
        let mut out = Poly { vars, terms: BTreeMap::new() };
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let exps: Vec<u32> = ea.0.iter().zip(&eb.0).map(|(x, y)| x + y).collect();
                out.insert_term(Exps(exps), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    /// Substitutes each listed variable by an affine expression
    /// `constant + Σ coeff·var` in the remaining variables.
    pub fn substitute(&self, subst: &BTreeMap<String, Poly>) -> Poly {
        for (_, rhs) in subst.iter() {
            assert!(rhs.total_degree() <= 1, "substitution must be affine");
        }
        let mut acc = Poly::zero();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (k, &pow) in e.0.iter().enumerate() {
                if pow == 0 {
                    continue;
                }
                let name = &self.vars[k];
                let factor = subst
                    .get(name)
                    .cloned()
                    .unwrap_or_else(|| Poly::var(name));
                for _ in 0..pow {
                    term = term.mul(&factor);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest degree first reads naturally.
        for (e, c) in self.terms.iter().rev() {
            let mut mono = String::new();
            for (k, &pow) in e.0.iter().enumerate() {
                if pow == 0 {
                    continue;
                }
                if !mono.is_empty() {
                    mono.push('*');
                }
                if pow == 1 {
                    mono.push_str(&self.vars[k]);
                } else {
                    mono.push_str(&format!("{}^{}", self.vars[k], pow));
                }
            }
            let coeff = c.to_literal();
            let body = if mono.is_empty() {
                coeff.clone()
            } else if c.is_one() {
                mono
            } else if coeff == "-1" {
                format!("-{mono}")
            } else if coeff.contains('+') || (coeff.contains('-') && !coeff.starts_with('-')) {
                format!("({coeff})*{mono}")
            } else {
                format!("{coeff}*{mono}")
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

impl Scalar for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::constant(GaussRat::one())
    }
    fn is_zero(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn from_rat(r: &GaussRat) -> Self {
        Poly::constant(r.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(k: usize) -> Poly {
        Poly::var(&format!("l{k}"))
    }

    #[test]
    fn sum_of_squares() {
        // (λ₅² + λ₆²) + λ₇² = λ₅² + λ₆² + λ₇²
        let p = lam(5).mul(&lam(5)).add(&lam(6).mul(&lam(6)));
        let q = lam(7).mul(&lam(7));
        let s = p.add(&q);
        assert_eq!(s.terms.len(), 3);
        assert_eq!(s.to_string(), "l5^2 + l6^2 + l7^2");
    }

    #[test]
    fn times_zero_is_zero() {
        assert!(lam(1).mul(&Poly::zero()).is_zero());
        assert!(lam(1).scale(&GaussRat::zero()).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let p = lam(1).add(&lam(2));
        let q = lam(1).sub(&lam(2));
        let expect = lam(1).mul(&lam(1)).sub(&lam(2).mul(&lam(2)));
        assert_eq!(p.mul(&q), expect);
    }

    #[test]
    fn variable_sets_union() {
        let p = lam(1).add(&lam(3));
        let q = lam(2);
        let s = p.add(&q);
        assert_eq!(s.variables(), ["l1", "l2", "l3"]);
    }

    #[test]
    fn affine_substitution() {
        // λ₁ ↦ 2λ₂ + 1 in λ₁² − λ₂ gives 4λ₂² + 4λ₂ + 1 − λ₂
        let p = lam(1).mul(&lam(1)).sub(&lam(2));
        let mut subst = BTreeMap::new();
        subst.insert(
            "l1".to_string(),
            lam(2).scale(&GaussRat::from_int(2)).add(&Poly::constant(GaussRat::one())),
        );
        let q = p.substitute(&subst);
        let expect = lam(2)
            .mul(&lam(2))
            .scale(&GaussRat::from_int(4))
            .add(&lam(2).scale(&GaussRat::from_int(3)))
            .add(&Poly::constant(GaussRat::one()));
        assert_eq!(q, expect);
    }

    #[test]
    fn ring_laws_sampled() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut p = Poly::constant(GaussRat::from_int(rng.gen_range(-3..4)));
            for k in 1..4 {
                let c = GaussRat::from_int(rng.gen_range(-3..4));
                p = p.add(&lam(k).scale(&c));
            }
            p
        };
        for _ in 0..200 {
            let (p, q, r) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
            assert_eq!(p.add(&q).mul(&r), p.mul(&r).add(&q.mul(&r)));
            assert_eq!(p.mul(&q), q.mul(&p));
            assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        }
    }
}
