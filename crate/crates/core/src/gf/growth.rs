use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serialize;

use super::real::{Fixed, Interval};
use super::spec::RecursionSpec;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::tree::{CountTable, TreeClass};

/// Default bracket width for individual roots.
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_H_MAX: usize = 45;

/// Bisection stops at this many fractional bits whatever the tolerance.
const FLOOR_BITS: u32 = 300;
/// Width of the `alpha_h` brackets used inside [`growth_bracket`]; fine
/// enough to resolve successive values well past `h = 30`.
const ROOT_BITS: u32 = 120;

fn bisect(mut lo: Fixed, mut hi: Fixed, tol: &Fixed, above: impl Fn(&Fixed) -> bool) -> Interval {
    let floor = Fixed::pow2_neg(FLOOR_BITS);
    let tol = tol.max(&floor).clone();
    while hi.sub_sat(&lo) > tol {
        let mid = lo.mid(&hi);
        if above(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Interval::new(lo, hi)
}

/// The positive solution of `f(C, ..., C) = C`.
pub fn fixed_point(spec: &RecursionSpec) -> Result<Interval> {
    let f = |t: &Fixed| spec.eval_f(&vec![t.clone(); spec.arity()]);
    let mut hi = Fixed::one();
    let mut tries = 0;
    while f(&hi) <= hi {
        hi = hi.double();
        tries += 1;
        if tries > 64 {
            return Err(Error::NoFixedPoint);
        }
    }
    let mut lo = hi.clone();
    loop {
        lo = lo.half();
        if lo.is_zero() {
            return Err(Error::NoFixedPoint);
        }
        if f(&lo) < lo {
            break;
        }
    }
    Ok(bisect(lo, hi, &Fixed::pow2_neg(FLOOR_BITS), |t| f(t) > *t))
}

/// Root of `F_h(z) = c` for `z > 0`, bracketed to width `tol`.
pub fn alpha_h(spec: &RecursionSpec, h: usize, c: &Fixed, tol: f64) -> Result<Interval> {
    let value = |z: &Fixed| spec.values_at(z, h).pop().unwrap();
    if value(&Fixed::zero()) >= *c {
        return Err(Error::format(format!("F_{h}(0) already reaches the fixed point")));
    }
    let mut hi = Fixed::one();
    let mut tries = 0;
    while value(&hi) <= *c {
        hi = hi.double();
        tries += 1;
        if tries > 64 {
            return Err(Error::format(format!("F_{h} never reaches the fixed point")));
        }
    }
    Ok(bisect(Fixed::zero(), hi, &Fixed::from_f64(tol), |z| value(z) > *c))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaRow {
    pub h: usize,
    pub alpha: Interval,
}

impl AlphaRow {
    pub fn parity(&self) -> &'static str {
        if self.h.is_multiple_of(2) {
            "even"
        } else {
            "odd"
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub fixed_point: Interval,
    /// `[alpha at the last window minimum, alpha at the last window maximum]`.
    pub alpha: Interval,
    pub h_reached: usize,
    pub converged: bool,
    /// Window maxima never increased and window minima never decreased.
    pub monotone: bool,
    pub bits_per_node_lower_bound: f64,
    pub upper_indices: Vec<usize>,
    pub lower_indices: Vec<usize>,
    pub rows: Vec<AlphaRow>,
}

impl GrowthReport {
    pub fn alpha_lower(&self) -> f64 {
        self.alpha.lo_f64()
    }

    pub fn alpha_upper(&self) -> f64 {
        self.alpha.hi_f64()
    }

    /// `h,alpha_h,parity` rows and a closing comment with the bracket.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h,alpha_h,parity\n");
        for r in &self.rows {
            writeln!(out, "{},{:.15},{}", r.h, r.alpha.mid(), r.parity()).unwrap();
        }
        writeln!(
            out,
            "# bracket=[{:.12},{:.12}] width={:.3e} fixed_point=[{:.15},{:.15}] bits_per_node_lower_bound={:.6} h_reached={} converged={}",
            self.alpha.lo,
            self.alpha.hi,
            self.alpha.width_f64(),
            self.fixed_point.lo,
            self.fixed_point.hi,
            self.bits_per_node_lower_bound,
            self.h_reached,
            self.converged
        )
        .unwrap();
        out
    }
}

/// Brackets the growth constant between window extremes of `alpha_h`.
/// The recursion must be recursive-dependent.
pub fn growth_bracket(spec: &RecursionSpec, tol: f64, h_max: usize) -> Result<GrowthReport> {
    if !spec.is_recursive_dependent() {
        return Err(Error::format("recursion is not recursive-dependent; use growth_bracket_unchecked"));
    }
    growth_bracket_unchecked(spec, tol, h_max)
}

/// [`growth_bracket`] without the dependence check.
pub fn growth_bracket_unchecked(spec: &RecursionSpec, tol: f64, h_max: usize) -> Result<GrowthReport> {
    let c = fixed_point(spec)?;
    let level = c.mid();
    let root_tol = Fixed::pow2_neg(ROOT_BITS).to_f64();
    let slack = Fixed::pow2_neg(ROOT_BITS - 2);
    let w = spec.arity();
    let mut rows: Vec<AlphaRow> = Vec::new();
    let mut upper: Vec<usize> = Vec::new();
    let mut lower: Vec<usize> = Vec::new();
    let mut monotone = true;
    let mut converged = false;

    // Index of the extreme value in `from..from + w`; ties go to the first.
    let extreme = |rows: &[AlphaRow], from: usize, max: bool| -> usize {
        (from..from + w)
            .reduce(|best, i| {
                let better = if max { rows[i].alpha.mid() > rows[best].alpha.mid() } else { rows[i].alpha.mid() < rows[best].alpha.mid() };
                if better {
                    i
                } else {
                    best
                }
            })
            .unwrap()
    };

    for h in 0..=h_max {
        rows.push(AlphaRow { h, alpha: alpha_h(spec, h, &level, root_tol)? });
        let len = rows.len();
        let mut moved = false;
        loop {
            let next_u = upper.last().map_or(0, |&u| u + 1);
            if next_u + w > len {
                break;
            }
            let u = extreme(&rows, next_u, true);
            if let Some(&prev) = upper.last() {
                monotone &= rows[u].alpha.mid() <= rows[prev].alpha.mid().add(&slack);
            }
            upper.push(u);
            moved = true;
        }
        loop {
            let next_l = lower.last().map_or(0, |&l| l + 1);
            if next_l + w > len {
                break;
            }
            let l = extreme(&rows, next_l, false);
            if let Some(&prev) = lower.last() {
                monotone &= rows[l].alpha.mid().add(&slack) >= rows[prev].alpha.mid();
            }
            lower.push(l);
            moved = true;
        }
        if moved && !upper.is_empty() && !lower.is_empty() {
            let hi = &rows[*upper.last().unwrap()].alpha.hi;
            let lo = &rows[*lower.last().unwrap()].alpha.lo;
            if hi.sub_sat(lo) < Fixed::from_f64(tol) {
                converged = true;
                break;
            }
        }
    }

    let (lo, hi) = match (lower.last(), upper.last()) {
        (Some(&l), Some(&u)) => (rows[l].alpha.lo.clone(), rows[u].alpha.hi.clone()),
        _ => {
            let lo = rows.iter().map(|r| r.alpha.lo.clone()).min().unwrap();
            let hi = rows.iter().map(|r| r.alpha.hi.clone()).max().unwrap();
            (lo, hi)
        }
    };
    let alpha = Interval::new(lo.clone().min(hi.clone()), hi.max(lo));
    Ok(GrowthReport {
        fixed_point: c,
        bits_per_node_lower_bound: (-alpha.hi_f64().log2()).max(0.0),
        alpha,
        h_reached: rows.len() - 1,
        converged,
        monotone,
        upper_indices: upper,
        lower_indices: lower,
        rows,
    })
}

/// `alpha_h` for `h = 0..=h_max`.
pub fn convergence_table(spec: &RecursionSpec, h_max: usize, tol: f64) -> Result<Vec<AlphaRow>> {
    let c = fixed_point(spec)?.mid();
    (0..=h_max).map(|h| Ok(AlphaRow { h, alpha: alpha_h(spec, h, &c, tol)? })).collect()
}

/// Exact counts `a_0, ..., a_{n_max}` with `a_0 = 0`.
pub fn count_exact(n_max: usize, class: TreeClass) -> Result<Vec<BigUint>> {
    count_exact_with(n_max, class, Execution::default())
}

pub fn count_exact_with(n_max: usize, class: TreeClass, exec: Execution) -> Result<Vec<BigUint>> {
    let table = CountTable::build(n_max, class, exec)?;
    Ok((0..=n_max).map(|n| if n == 0 { BigUint::default() } else { table.total(n) }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin(class: TreeClass) -> RecursionSpec {
        RecursionSpec::builtin(class)
    }

    #[test]
    fn fixed_points() {
        let c = fixed_point(&builtin(TreeClass::Avl)).unwrap();
        assert!(c.contains(1.0 / 3.0) || (c.mid_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert!(c.width_f64() < 1e-80);
        let c = fixed_point(&builtin(TreeClass::Llavl)).unwrap();
        assert!((c.mid_f64() - 0.5).abs() < 1e-15);
        let linear: RecursionSpec = "c=1\n1 1\n0 1".parse().unwrap();
        assert!(matches!(fixed_point(&linear), Err(Error::NoFixedPoint)));
    }

    #[test]
    fn first_avl_roots() {
        let spec = builtin(TreeClass::Avl);
        let c = fixed_point(&spec).unwrap().mid();
        let a0 = alpha_h(&spec, 0, &c, 1e-14).unwrap();
        assert!((a0.mid_f64() - 1.0 / 3.0).abs() < 1e-13);
        let a1 = alpha_h(&spec, 1, &c, 1e-14).unwrap();
        assert!((a1.mid_f64() - 3f64.powf(-0.5)).abs() < 1e-13);
        // z^4 + 2z^3 = 1/3, solved independently in f64.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m = (lo + hi) / 2.0;
            if m.powi(4) + 2.0 * m.powi(3) > 1.0 / 3.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        let a2 = alpha_h(&spec, 2, &c, 1e-14).unwrap();
        assert!((a2.mid_f64() - lo).abs() < 1e-13);
        assert!((a2.mid_f64() - 0.5105).abs() < 5e-4);
        assert!(a2.width_f64() < 1e-14);
    }

    #[test]
    fn roots_agree_with_exact_polynomials() {
        for class in [TreeClass::Avl, TreeClass::Llavl] {
            let spec = builtin(class);
            let c = fixed_point(&spec).unwrap();
            for row in convergence_table(&spec, 10, 1e-13).unwrap() {
                let p = spec.iterate(row.h, None, Execution::Sequential).unwrap();
                assert!((p.eval_f64(row.alpha.mid_f64()) - c.mid_f64()).abs() < 1e-11, "{class} h={}", row.h);
                // Horner rounds differently from the recursion; allow a few ulps.
                let ulps = Fixed::pow2_neg(290);
                assert!(p.eval(&row.alpha.lo) <= c.mid().add(&ulps) && p.eval(&row.alpha.hi).add(&ulps) >= c.mid());
            }
        }
    }

    #[test]
    fn avl_bracket() {
        let r = growth_bracket(&builtin(TreeClass::Avl), 1e-12, DEFAULT_H_MAX).unwrap();
        assert!(r.converged && r.monotone, "{r:?}");
        assert!(r.alpha.meets(0.5219, 0.5220));
        assert!((r.alpha.mid_f64() - 0.521_902_405_846_274_8).abs() < 1e-12, "{}", r.alpha);
        assert!((r.bits_per_node_lower_bound - 0.938).abs() < 1e-3);
        assert!(r.to_csv().starts_with("h,alpha_h,parity\n0,0.333333333333333,even\n"));
    }

    #[test]
    fn llavl_bracket() {
        let r = growth_bracket(&builtin(TreeClass::Llavl), 1e-12, DEFAULT_H_MAX).unwrap();
        assert!(r.converged && r.monotone);
        assert!(r.alpha.meets(0.67418, 0.67419), "{}", r.alpha);
        assert!((r.bits_per_node_lower_bound - 0.568).abs() < 1e-3);
    }

    #[test]
    fn avl_parities_are_monotone() {
        let rows = convergence_table(&builtin(TreeClass::Avl), 30, 1e-33).unwrap();
        for h in 2..=30 {
            let (prev, cur) = (&rows[h - 2].alpha, &rows[h].alpha);
            if h % 2 == 0 {
                assert!(cur.lo > prev.hi, "even h={h}");
            } else {
                assert!(cur.hi < prev.lo, "odd h={h}");
            }
        }
    }

    #[test]
    fn generic_path() {
        let fib: RecursionSpec = "c=2\n1 1 1\n0 1\n0 0 1".parse().unwrap();
        let r = growth_bracket(&fib, 1e-9, 40).unwrap();
        assert!(r.monotone);
        assert!(r.alpha.lo <= r.alpha.hi);
        let decoupled: RecursionSpec = "c=2\n1 0 2\n0 1\n0 0 1".parse().unwrap();
        assert!(growth_bracket(&decoupled, 1e-9, 10).is_err());
    }

    #[test]
    fn exact_counts() {
        let a = count_exact(30, TreeClass::Avl).unwrap();
        assert_eq!(a[1], BigUint::from(1u32));
        assert_eq!(a[5], BigUint::from(6u32));
        assert_eq!(a[0], BigUint::default());
    }
}
