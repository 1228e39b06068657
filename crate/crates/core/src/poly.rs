//! Sparse multivariate integer polynomials, serialized as a monomial list
//! `[{exponents: [e1..en], coeff: c}, ...]`.

use crate::error::Error;
use crate::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: i64,
}

/// An integer polynomial in `n_vars` ambient variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly {
    pub n_vars: usize,
    pub terms: Vec<Monomial>,
}

impl Poly {
    pub fn new(n_vars: usize, terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != n_vars {
                return Err(Error::InvalidInput(
                    "monomial exponent vector has wrong length".into(),
                ));
            }
        }
        let mut p = Poly { n_vars, terms };
        p.normalize();
        Ok(p)
    }

    /// The coordinate polynomial `x_i`.
    pub fn coordinate(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0u32; n_vars];
        e[i] = 1;
        Poly { n_vars, terms: vec![Monomial { exponents: e, coeff: 1 }] }
    }

    pub fn constant(n_vars: usize, c: i64) -> Self {
        if c == 0 {
            return Poly { n_vars, terms: vec![] };
        }
        Poly { n_vars, terms: vec![Monomial { exponents: vec![0; n_vars], coeff: c }] }
    }

    /// Parse a linear shorthand like `x1+x2+3` or `2*x3-5` (CLI convenience).
    pub fn parse_linear(s: &str, n_vars: usize) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms: Vec<Monomial> = Vec::new();
        let mut rest = cleaned.as_str();
        if rest.is_empty() {
            return Err(Error::InvalidInput("empty polynomial".into()));
        }
        while !rest.is_empty() {
            let sign = if let Some(r) = rest.strip_prefix('-') {
                rest = r;
                -1i64
            } else {
                if let Some(r) = rest.strip_prefix('+') {
                    rest = r;
                }
                1i64
            };
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (tok, tail) = rest.split_at(end);
            rest = tail;
            if tok.is_empty() {
                return Err(Error::InvalidInput(format!("bad polynomial {s:?}")));
            }
            let (coeff_str, var) = match tok.find('x') {
                Some(i) => (&tok[..i], Some(&tok[i + 1..])),
                None => (tok, None),
            };
            let coeff_str = coeff_str.trim_end_matches('*');
            let coeff: i64 = if coeff_str.is_empty() {
                1
            } else {
                coeff_str
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad coefficient in {tok:?}")))?
            };
            let mut exps = vec![0u32; n_vars];
            if let Some(v) = var {
                let idx: usize = v
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad variable in {tok:?}")))?;
                if idx == 0 || idx > n_vars {
                    return Err(Error::InvalidInput(format!("variable x{idx} out of range")));
                }
                exps[idx - 1] = 1;
            }
            terms.push(Monomial { exponents: exps, coeff: sign * coeff });
        }
        Poly::new(n_vars, terms)
    }

    fn normalize(&mut self) {
        self.terms.sort_by(|a, b| a.exponents.cmp(&b.exponents));
        let mut merged: Vec<Monomial> = Vec::new();
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.exponents == t.exponents => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0);
        self.terms = merged;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exponents.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval_i64(&self, x: &[i64]) -> i64 {
        self.eval_i128(&x.iter().map(|&v| v as i128).collect::<Vec<_>>()) as i64
    }

    pub fn eval_i128(&self, x: &[i128]) -> i128 {
        debug_assert_eq!(x.len(), self.n_vars);
        let mut acc: i128 = 0;
        for t in &self.terms {
            let mut m: i128 = t.coeff as i128;
            for (xi, &e) in x.iter().zip(&t.exponents) {
                for _ in 0..e {
                    m = m.checked_mul(*xi).expect("polynomial evaluation overflow");
                }
            }
            acc = acc.checked_add(m).expect("polynomial evaluation overflow");
        }
        acc
    }

    /// Evaluate mod `q` on residue coordinates.
    pub fn eval_mod(&self, x: &[u64], q: u64) -> u64 {
        let mut acc: u128 = 0;
        let qq = q as u128;
        for t in &self.terms {
            let mut m: u128 = (t.coeff.rem_euclid(q as i64)) as u128;
            for (&xi, &e) in x.iter().zip(&t.exponents) {
                let b = (xi % q) as u128;
                for _ in 0..e {
                    m = m * b % qq;
                }
            }
            acc = (acc + m) % qq;
        }
        acc as u64
    }

    /// The height-cleared companion: `f_h(x) = s^(deg f) * f(x / s)` with
    /// `s = p0^h`, an integer polynomial whose value at `y = s*x` clears the
    /// denominators of `f(x)`.
    pub fn cleared(&self, scale: i64) -> Poly {
        let d = self.degree();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let e: u32 = t.exponents.iter().sum();
                let mut c = t.coeff as i128;
                for _ in 0..(d - e) {
                    c = c.checked_mul(scale as i128).expect("cleared coefficient overflow");
                }
                Monomial {
                    exponents: t.exponents.clone(),
                    coeff: i64::try_from(c).expect("cleared coefficient exceeds i64"),
                }
            })
            .collect();
        Poly { n_vars: self.n_vars, terms }
    }

    /// Coefficients of the polynomial viewed in the variable `var`, each an
    /// integer polynomial in the remaining variables (constant term dropped).
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly> {
        let dmax = self.terms.iter().map(|t| t.exponents[var]).max().unwrap_or(0);
        (1..=dmax)
            .map(|d| {
                let terms: Vec<Monomial> = self
                    .terms
                    .iter()
                    .filter(|t| t.exponents[var] == d)
                    .map(|t| {
                        let mut e = t.exponents.clone();
                        e[var] = 0;
                        Monomial { exponents: e, coeff: t.coeff }
                    })
                    .collect();
                Poly::new(self.n_vars, terms).expect("same arity")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_eval() {
        let f = Poly::parse_linear("x1+x2+3", 4).unwrap();
        assert_eq!(f.eval_i64(&[1, 0, 9, 9]), 4);
        assert_eq!(f.degree(), 1);
        let g = Poly::parse_linear("2*x3-5", 3).unwrap();
        assert_eq!(g.eval_i64(&[0, 0, 4]), 3);
        assert!(Poly::parse_linear("x9", 3).is_err());
    }

    #[test]
    fn cleared_scales_lower_terms() {
        // f = x1 + 3 cleared with s=4: f_h = x1 + 12, so f_h(4x) = 4 f(x).
        let f = Poly::parse_linear("x1+3", 2).unwrap();
        let fh = f.cleared(4);
        assert_eq!(fh.eval_i64(&[4 * 5, 0]), 4 * f.eval_i64(&[5, 0]));
    }

    #[test]
    fn eval_mod_matches_integer_eval() {
        let f = Poly::new(
            2,
            vec![
                Monomial { exponents: vec![2, 0], coeff: 3 },
                Monomial { exponents: vec![1, 1], coeff: -1 },
                Monomial { exponents: vec![0, 0], coeff: 7 },
            ],
        )
        .unwrap();
        for x in 0..6i64 {
            for y in 0..6i64 {
                let v = f.eval_i64(&[x, y]).rem_euclid(11);
                assert_eq!(f.eval_mod(&[x as u64, y as u64], 11), v as u64);
            }
        }
    }

    #[test]
    fn normalization_merges_terms() {
        let f = Poly::new(
            1,
            vec![
                Monomial { exponents: vec![1], coeff: 2 },
                Monomial { exponents: vec![1], coeff: -2 },
            ],
        )
        .unwrap();
        assert!(f.is_zero());
    }
}
