//! Square polynomial systems in `x1..xm` with integer coefficients and a
//! parameter `t` substituted at evaluation time.

mod builtin;
mod eval;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub use builtin::{builtin_family, Family};
pub use eval::{divided_difference_matrix, EvalCounter};
pub use parse::parse_system;

/// `coeff * x^exps * t^t_exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: i64,
    pub exps: Vec<u32>,
    pub t_exp: u32,
}

/// Sparse polynomial; terms are kept combined, nonzero and sorted
/// descending by `(exps, t_exp)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<Term>,
}

type Key = (Vec<u32>, u32);

impl Poly {
    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        let mut acc: BTreeMap<Key, i64> = BTreeMap::new();
        for t in terms {
            if t.exps.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: t.exps.len() });
            }
            let slot = acc.entry((t.exps, t.t_exp)).or_default();
            *slot = slot.checked_add(t.coeff).ok_or_else(|| Error::InvalidArgument("coefficient overflow".into()))?;
        }
        Ok(Self::from_map(acc))
    }

    fn from_map(acc: BTreeMap<Key, i64>) -> Self {
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| *c != 0)
            .map(|((exps, t_exp), coeff)| Term { coeff, exps, t_exp })
            .collect();
        Poly { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Formal partial derivative in `x_{j+1}`.
    pub fn derivative(&self, j: usize) -> Poly {
        let mut acc: BTreeMap<Key, i64> = BTreeMap::new();
        for t in &self.terms {
            let e = t.exps[j];
            if e == 0 {
                continue;
            }
            let mut exps = t.exps.clone();
            exps[j] -= 1;
            *acc.entry((exps, t.t_exp)).or_default() += t.coeff * e as i64;
        }
        Self::from_map(acc)
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exps.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Value modulo `p` at residues `x` with `t = t_res`.
    pub fn eval_mod(&self, x: &[u64], t_res: u64, p: u64) -> u64 {
        let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
        let powm = |b: u64, e: u32| (0..e).fold(1 % p, |acc, _| mulm(acc, b));
        let mut s = 0u64;
        for t in &self.terms {
            let mut v = (t.coeff.rem_euclid(p as i64)) as u64;
            for (xi, &e) in x.iter().zip(&t.exps) {
                v = mulm(v, powm(*xi, e));
            }
            v = mulm(v, powm(t_res, t.t_exp));
            s = (s + v) % p;
        }
        s
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, first: bool) -> fmt::Result {
    let sign = if t.coeff < 0 { "-" } else { "+" };
    if first {
        if t.coeff < 0 {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {sign} ")?;
    }
    let mut factors: Vec<String> = Vec::new();
    for (i, &e) in t.exps.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(format!("x{}", i + 1)),
            _ => factors.push(format!("x{}^{e}", i + 1)),
        }
    }
    match t.t_exp {
        0 => {}
        1 => factors.push("t".into()),
        e => factors.push(format!("t^{e}")),
    }
    let c = t.coeff.unsigned_abs();
    if factors.is_empty() {
        write!(f, "{c}")
    } else if c == 1 {
        write!(f, "{}", factors.join("*"))
    } else {
        write!(f, "{c}*{}", factors.join("*"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            write_term(f, t, i == 0)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    m: usize,
    polys: Vec<Poly>,
    /// `jac[i][j] = d f_i / d x_j`
    jac: Vec<Vec<Poly>>,
}

impl PolySystem {
    pub fn new(polys: Vec<Poly>) -> Result<Self> {
        let m = polys.len();
        if m == 0 {
            return Err(Error::InvalidArgument("empty system".into()));
        }
        for p in &polys {
            if let Some(t) = p.terms.first() {
                if t.exps.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: t.exps.len() });
                }
            }
        }
        let jac = polys.iter().map(|p| (0..m).map(|j| p.derivative(j)).collect()).collect();
        Ok(PolySystem { m, polys, jac })
    }

    /// `A x - b` with integer entries.
    pub fn linear(a: &[Vec<i64>], b: &[i64]) -> Result<Self> {
        let m = b.len();
        let polys = a
            .iter()
            .zip(b)
            .map(|(row, &bi)| {
                let mut terms: Vec<Term> = row
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        let mut exps = vec![0; m];
                        exps[j] = 1;
                        Term { coeff: c, exps, t_exp: 0 }
                    })
                    .collect();
                terms.push(Term { coeff: -bi, exps: vec![0; m], t_exp: 0 });
                Poly::from_terms(m, terms)
            })
            .collect::<Result<_>>()?;
        Self::new(polys)
    }

    /// Random `A x - b` with small integer entries, `A` invertible modulo
    /// `p`, and a start `x0` with `A x0 - b` divisible by `p` but nonzero.
    pub fn random_linear<R: rand::Rng + ?Sized>(m: usize, p: u64, rng: &mut R) -> (PolySystem, Vec<i64>) {
        loop {
            let a: Vec<Vec<i64>> = (0..m).map(|_| (0..m).map(|_| rng.gen_range(-8..=8)).collect()).collect();
            let res: Vec<Vec<u64>> =
                a.iter().map(|r| r.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect()).collect();
            if crate::linalg::fp_mat_inverse(&res, p).is_none() {
                continue;
            }
            let x0: Vec<i64> = (0..m).map(|_| rng.gen_range(-8..=8)).collect();
            let r: Vec<i64> = (0..m).map(|_| rng.gen_range(-4..=4)).collect();
            if r.iter().all(|&c| c == 0) {
                continue;
            }
            let b: Vec<i64> = a
                .iter()
                .zip(&r)
                .map(|(row, ri)| row.iter().zip(&x0).map(|(c, x)| c * x).sum::<i64>() + p as i64 * ri)
                .collect();
            let sys = PolySystem::linear(&a, &b).expect("square integer system");
            return (sys, x0);
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn jacobian_polys(&self) -> &[Vec<Poly>] {
        &self.jac
    }

    pub fn total_terms(&self) -> usize {
        self.polys.iter().map(|p| p.terms.len()).sum()
    }

    /// Residue vectors `x` in F_p^m with `f(x) = 0` and an invertible
    /// Jacobian, at `t = t_res`, by exhaustive search.
    pub fn residue_roots(&self, p: u64, t_res: u64) -> Vec<Vec<u64>> {
        let total = (p as u128).pow(self.m as u32);
        let mut out = Vec::new();
        let mut x = vec![0u64; self.m];
        for idx in 0..total {
            let mut k = idx;
            for xi in x.iter_mut() {
                *xi = (k % p as u128) as u64;
                k /= p as u128;
            }
            if self.polys.iter().all(|f| f.eval_mod(&x, t_res, p) == 0) {
                let j: Vec<Vec<u64>> =
                    self.jac.iter().map(|row| row.iter().map(|d| d.eval_mod(&x, t_res, p)).collect()).collect();
                if crate::linalg::fp_mat_inverse(&j, p).is_some() {
                    out.push(x.clone());
                }
            }
        }
        out
    }
}

impl fmt::Display for PolySystem {
    /// Normalized text: an `m = ` line, then one `poly:` line per equation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m = {}", self.m)?;
        for p in &self.polys {
            writeln!(f, "poly: {p}")?;
        }
        Ok(())
    }
}
