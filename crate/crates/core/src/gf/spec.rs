use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::real::Fixed;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::tree::TreeClass;

/// `coeff * x_1^e_1 * ... * x_c^e_c`, where `x_j` stands for `F_{h-j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: BigUint,
    pub exps: Vec<u32>,
}

/// `F_h = f(F_{h-1}, ..., F_{h-c})` for `h >= c`, from the seeds
/// `F_0, ..., F_{c-1}`.
///
/// Text form: a `c=<arity>` line, then one line `coeff e_1 ... e_c` per
/// monomial, then `c` lines of degree-ascending seed coefficients. The last
/// `c` lines are always the seeds. Blank lines and `#` comments are ignored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RecursionSpec {
    arity: usize,
    monomials: Vec<Monomial>,
    initial: Vec<Poly>,
}

/// Whether every height eventually depends on every earlier residue class
/// of heights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dependence {
    Yes,
    No,
}

impl RecursionSpec {
    pub fn new(arity: usize, monomials: Vec<Monomial>, initial: Vec<Poly>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::format("arity must be positive"));
        }
        if initial.len() != arity {
            return Err(Error::format(format!("{arity} seed polynomials required, got {}", initial.len())));
        }
        if let Some(m) = monomials.iter().find(|m| m.exps.len() != arity) {
            return Err(Error::format(format!("monomial with {} exponents in a recursion of arity {arity}", m.exps.len())));
        }
        if let Some(j) = initial.iter().position(|p| p.is_constant()) {
            return Err(Error::format(format!("seed F_{j} is constant")));
        }
        let monomials: Vec<Monomial> = monomials.into_iter().filter(|m| !m.coeff.is_zero()).collect();
        if monomials.is_empty() {
            return Err(Error::format("recursion has no non-zero monomial"));
        }
        Ok(Self { arity, monomials, initial })
    }

    /// `F_h = F_{h-1}^2 + 2 F_{h-1} F_{h-2}` (or `F_{h-1}^2 + F_{h-1} F_{h-2}`
    /// for left-leaning trees), `F_0 = z`, `F_1 = z^2`.
    pub fn builtin(class: TreeClass) -> Self {
        let cross = match class {
            TreeClass::Avl => 2u32,
            TreeClass::Llavl => 1,
        };
        let monomials = vec![
            Monomial { coeff: BigUint::one(), exps: vec![2, 0] },
            Monomial { coeff: BigUint::from(cross), exps: vec![1, 1] },
        ];
        Self::new(2, monomials, vec![Poly::z(), Poly::from_u64s(&[0, 0, 1])]).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn initial(&self) -> &[Poly] {
        &self.initial
    }

    /// Lags `j` such that `f` depends on `x_j`.
    pub fn lags(&self) -> Vec<usize> {
        (1..=self.arity).filter(|&j| self.monomials.iter().any(|m| m.exps[j - 1] > 0)).collect()
    }

    /// Decided by the gcd of the lags: with non-negative coefficients,
    /// chains of substitutions reach every large enough lag combination
    /// exactly when the lags are coprime.
    pub fn dependence(&self) -> Dependence {
        match self.lags().into_iter().reduce(|a, b| a.gcd(&b)) {
            Some(1) => Dependence::Yes,
            _ => Dependence::No,
        }
    }

    pub fn is_recursive_dependent(&self) -> bool {
        self.dependence() == Dependence::Yes
    }

    /// `f(x_1, ..., x_c)` in fixed point; `xs[j - 1]` is `x_j`.
    pub fn eval_f(&self, xs: &[Fixed]) -> Fixed {
        debug_assert_eq!(xs.len(), self.arity);
        let mut sum = Fixed::zero();
        for m in &self.monomials {
            let mut term = Fixed::one().mul_int(&m.coeff);
            for (x, &e) in xs.iter().zip(&m.exps) {
                if e > 0 {
                    term = term.mul(&x.pow(e));
                }
            }
            sum = sum.add(&term);
        }
        sum
    }

    /// `f(t, ..., t)` in `f64`.
    pub fn eval_diagonal_f64(&self, t: f64) -> f64 {
        self.monomials
            .iter()
            .map(|m| num_traits::ToPrimitive::to_f64(&m.coeff).unwrap() * t.powi(m.exps.iter().sum::<u32>() as i32))
            .sum()
    }

    /// `F_0(z), ..., F_h(z)` by running the recursion on values.
    pub fn values_at(&self, z: &Fixed, h: usize) -> Vec<Fixed> {
        let mut v: Vec<Fixed> = self.initial.iter().take(h + 1).map(|p| p.eval(z)).collect();
        while v.len() <= h {
            let k = v.len();
            let xs: Vec<Fixed> = (1..=self.arity).map(|j| v[k - j].clone()).collect();
            v.push(self.eval_f(&xs));
        }
        v
    }

    /// The polynomial `F_h`, dropping terms above `trunc` when given.
    pub fn iterate(&self, h: usize, trunc: Option<usize>, exec: Execution) -> Result<Poly> {
        let mut window: Vec<Poly> = self.initial.iter().map(|p| p.clone().with_truncation(trunc)).collect();
        if h < self.arity {
            return Ok(window.swap_remove(h));
        }
        for _ in self.arity..=h {
            let mut next = Poly::new(Vec::new(), trunc);
            for m in &self.monomials {
                let mut term = Poly::one().with_truncation(trunc).scale(&m.coeff);
                for (j, &e) in m.exps.iter().enumerate() {
                    if e > 0 {
                        // x_{j+1} is F_{h-j-1}, the (j+1)-th most recent entry.
                        let x = &window[self.arity - 1 - j];
                        term = term.mul(&x.pow(e, exec)?, exec)?;
                    }
                }
                next = next.add(&term);
            }
            window.remove(0);
            window.push(next);
        }
        Ok(window.pop().unwrap())
    }
}

impl fmt::Display for RecursionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "c={}", self.arity)?;
        for m in &self.monomials {
            write!(f, "{}", m.coeff)?;
            for e in &m.exps {
                write!(f, " {e}")?;
            }
            writeln!(f)?;
        }
        for p in &self.initial {
            let cs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
            writeln!(f, "{}", cs.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for RecursionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty());
        let first = lines.next().ok_or_else(|| Error::format("empty recursion spec"))?;
        let arity: usize = first
            .strip_prefix("c=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::format(format!("expected `c=<arity>`, found {first:?}")))?;
        let rows: Vec<Vec<BigUint>> = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<BigUint>().map_err(|_| Error::format(format!("bad integer {t:?}"))))
                    .collect()
            })
            .collect::<Result<_>>()?;
        if rows.len() < arity {
            return Err(Error::format(format!("{arity} seed lines required, found {} lines", rows.len())));
        }
        let (mono_rows, seed_rows) = rows.split_at(rows.len() - arity);
        let monomials = mono_rows
            .iter()
            .map(|r| {
                if r.len() != arity + 1 {
                    return Err(Error::format(format!("monomial line needs {} integers, found {}", arity + 1, r.len())));
                }
                let exps = r[1..]
                    .iter()
                    .map(|e| u32::try_from(e).map_err(|_| Error::format("exponent too large")))
                    .collect::<Result<_>>()?;
                Ok(Monomial { coeff: r[0].clone(), exps })
            })
            .collect::<Result<_>>()?;
        let initial = seed_rows.iter().map(|r| Poly::new(r.clone(), None)).collect();
        Self::new(arity, monomials, initial)
    }
}
