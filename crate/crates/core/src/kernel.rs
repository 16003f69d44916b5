//! Rational building blocks of the GL(3) R-matrix and the product shorthands
//! built on top of them.
//!
//! With coupling `c` the four functions are
//!
//! ```text
//! g(x,y) = c/(x-y)          f(x,y) = 1 + g(x,y) = (x-y+c)/(x-y)
//! h(x,y) = f/g = (x-y+c)/c  t(x,y) = g/h = c^2/((x-y)(x-y+c))
//! ```
//!
//! A function applied to two sets means the product over all pairs. Sets are
//! plain ordered slices: the ordering matters for `delta`/`delta_prime` and
//! for determinant rows and columns, so nothing here ever reorders its input.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative scale of the collision tolerance; the absolute tolerance is
/// `COLLISION_SCALE * max(1, |c|)`.
pub const COLLISION_SCALE: f64 = 1e-10;

/// One of the four elementary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    G,
    F,
    H,
    T,
}

/// The kernel functions for a fixed coupling `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    c: Complex64,
}

impl Kernel {
    pub fn new(c: Complex64) -> Result<Self> {
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite(c));
        }
        if c.norm() == 0.0 {
            return Err(Error::Invalid("coupling c must be nonzero".into()));
        }
        Ok(Kernel { c })
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// Absolute tolerance below which two arguments are treated as colliding.
    pub fn t_coll(&self) -> f64 {
        COLLISION_SCALE * self.c.norm().max(1.0)
    }

    fn checked(&self, what: &'static str, x: Complex64, y: Complex64, den: Complex64) -> Result<Complex64> {
        finite(x)?;
        finite(y)?;
        if den.norm() <= self.t_coll() {
            return Err(Error::Pole { what, lhs: x, rhs: y });
        }
        Ok(den)
    }

    pub fn g(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let d = self.checked("g", x, y, x - y)?;
        Ok(self.c / d)
    }

    pub fn f(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let d = self.checked("f", x, y, x - y)?;
        Ok((d + self.c) / d)
    }

    pub fn h(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        finite(x)?;
        finite(y)?;
        Ok((x - y + self.c) / self.c)
    }

    pub fn t(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let d = self.checked("t", x, y, x - y)?;
        let e = self.checked("t", x, y, x - y + self.c)?;
        Ok(self.c * self.c / (d * e))
    }

    pub fn eval(&self, func: Func, x: Complex64, y: Complex64) -> Result<Complex64> {
        match func {
            Func::G => self.g(x, y),
            Func::F => self.f(x, y),
            Func::H => self.h(x, y),
            Func::T => self.t(x, y),
        }
    }

    /// Reciprocal `1/func(x,y)`. Finite where `func` has a pole, so products
    /// such as `1/f(v, x)` vanish cleanly when `x` hits an element of `v`.
    pub fn eval_inv(&self, func: Func, x: Complex64, y: Complex64) -> Result<Complex64> {
        finite(x)?;
        finite(y)?;
        let d = x - y;
        match func {
            Func::G => Ok(d / self.c),
            Func::F => {
                let e = self.checked("1/f", x, y, d + self.c)?;
                Ok(d / e)
            }
            Func::H => {
                let e = self.checked("1/h", x, y, d + self.c)?;
                Ok(self.c / e)
            }
            Func::T => Ok(d * (d + self.c) / (self.c * self.c)),
        }
    }

    /// `func(lhs, rhs)`: product over every pair `(x, y)` with `x` from `lhs`
    /// and `y` from `rhs`. Empty sets give 1.
    pub fn prod(&self, func: Func, lhs: &[Complex64], rhs: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &x in lhs {
            for &y in rhs {
                acc *= self.eval(func, x, y)?;
            }
        }
        Ok(acc)
    }

    /// `1/func(lhs, rhs)` evaluated factor by factor.
    pub fn prod_inv(&self, func: Func, lhs: &[Complex64], rhs: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &x in lhs {
            for &y in rhs {
                acc *= self.eval_inv(func, x, y)?;
            }
        }
        Ok(acc)
    }

    /// `func(x, xs_i)` with the i-th element of `xs` left out.
    pub fn prod_excluding(&self, func: Func, x: Complex64, xs: &[Complex64], skip: usize) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (k, &y) in xs.iter().enumerate() {
            if k != skip {
                acc *= self.eval(func, x, y)?;
            }
        }
        Ok(acc)
    }

    /// `func(xs_i, x)` with the i-th element of `xs` left out.
    pub fn prod_excluding_rev(&self, func: Func, xs: &[Complex64], skip: usize, x: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (k, &y) in xs.iter().enumerate() {
            if k != skip {
                acc *= self.eval(func, y, x)?;
            }
        }
        Ok(acc)
    }

    /// `Δ'(x) = ∏_{j<k} g(x_j, x_k)`.
    pub fn delta_prime(&self, xs: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for j in 0..xs.len() {
            for k in j + 1..xs.len() {
                acc *= self.g(xs[j], xs[k])?;
            }
        }
        Ok(acc)
    }

    /// `Δ(x) = ∏_{j>k} g(x_j, x_k)`.
    pub fn delta(&self, xs: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for j in 0..xs.len() {
            for k in 0..j {
                acc *= self.g(xs[j], xs[k])?;
            }
        }
        Ok(acc)
    }

    /// Whether any two entries of `xs` collide.
    pub fn check_distinct(&self, xs: &[Complex64]) -> Result<()> {
        for j in 0..xs.len() {
            for k in j + 1..xs.len() {
                if (xs[j] - xs[k]).norm() <= self.t_coll() {
                    return Err(Error::Pole { what: "coinciding set entries", lhs: xs[j], rhs: xs[k] });
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn finite(z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(z))
    }
}

/// `xs` with the i-th entry removed.
pub fn without(xs: &[Complex64], i: usize) -> Vec<Complex64> {
    xs.iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, &x)| x)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn k1() -> Kernel {
        Kernel::new(c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn direct_values() {
        let k = k1();
        assert_eq!(k.g(c(2.0, 0.0), c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        let k2 = Kernel::new(c(2.0, 0.0)).unwrap();
        assert_eq!(k2.g(c(0.0, 0.0), c(-2.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(k.f(c(1.0, 0.0), c(0.0, 0.0)).unwrap(), c(2.0, 0.0));
        assert_eq!(k.t(c(2.0, 0.0), c(1.0, 0.0)).unwrap(), c(0.5, 0.0));
        // zero of h at x - y = -c
        assert_eq!(k.h(c(0.3, 0.2), c(1.3, 0.2)).unwrap().norm(), 0.0);
    }

    #[test]
    fn poles_are_reported() {
        let k = k1();
        assert!(matches!(k.g(c(1.0, 0.0), c(1.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(k.f(c(1.0, 0.0), c(1.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(k.t(c(0.0, 0.0), c(1.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(k.eval_inv(Func::H, c(0.0, 0.0), c(1.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(k.g(c(f64::NAN, 0.0), c(1.0, 0.0)), Err(Error::NonFinite(_))));
        assert!(Kernel::new(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn products_and_deltas() {
        let k = k1();
        let z = c(0.7, 0.1);
        assert_eq!(k.prod(Func::F, &[z], &[]).unwrap(), c(1.0, 0.0));
        let u = [c(0.4, -0.3)];
        assert_eq!(k.prod_excluding(Func::G, u[0], &u, 0).unwrap(), c(1.0, 0.0));
        let p = k.prod(Func::F, &[c(1.0, 0.0), c(3.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!((p - c(8.0 / 3.0, 0.0)).norm() < 1e-15);

        assert_eq!(k.delta_prime(&[z]).unwrap(), c(1.0, 0.0));
        assert_eq!(k.delta_prime(&[c(2.0, 0.0), c(1.0, 0.0)]).unwrap(), c(1.0, 0.0));
        assert_eq!(k.delta(&[c(2.0, 0.0), c(1.0, 0.0)]).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn reciprocal_vanishes_at_coincidence() {
        let k = k1();
        let v = c(0.2, 0.5);
        assert_eq!(k.prod_inv(Func::F, &[v, c(1.0, 1.0)], &[v]).unwrap().norm(), 0.0);
        let x = c(0.3, -0.2);
        let y = c(-0.4, 0.9);
        for func in [Func::G, Func::F, Func::H, Func::T] {
            let prod = k.eval(func, x, y).unwrap() * k.eval_inv(func, x, y).unwrap();
            assert!((prod - 1.0).norm() < 1e-14);
        }
    }

    fn arb_c64() -> impl Strategy<Value = Complex64> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * a.norm().max(b.norm()).max(1e-300)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reflection_symmetry(x in arb_c64(), y in arb_c64(), cc in arb_c64()) {
            prop_assume!(cc.norm() > 0.1);
            prop_assume!((x - y).norm() > 1e-3 && (x - y + cc).norm() > 1e-3 && (y - x + cc).norm() > 1e-3);
            let k = Kernel::new(cc).unwrap();
            for func in [Func::G, Func::F, Func::H, Func::T] {
                let lhs = k.eval(func, -x, -y).unwrap();
                let rhs = k.eval(func, y, x).unwrap();
                prop_assert!(close(lhs, rhs, 1e-14), "{:?}: {} vs {}", func, lhs, rhs);
            }
        }

        #[test]
        fn algebraic_identities(x in arb_c64(), y in arb_c64(), cc in arb_c64()) {
            prop_assume!(cc.norm() > 0.1);
            prop_assume!((x - y).norm() > 1e-3 && (x - y + cc).norm() > 1e-3);
            let k = Kernel::new(cc).unwrap();
            let (g, f, h, t) = (k.g(x, y).unwrap(), k.f(x, y).unwrap(), k.h(x, y).unwrap(), k.t(x, y).unwrap());
            prop_assert!(close(f, 1.0 + g, 1e-14));
            prop_assert!(close(t * h, g, 1e-14));
            prop_assert!(close(g * h, f, 1e-14));
        }

        #[test]
        fn delta_product_is_symmetric(xs in proptest::collection::vec(arb_c64(), 1..6), seed in any::<u64>()) {
            let k = k1();
            prop_assume!(k.check_distinct(&xs).is_ok());
            prop_assume!(xs.iter().enumerate().all(|(j, a)| xs.iter().skip(j + 1).all(|b| (a - b).norm() > 1e-2)));
            let base = k.delta_prime(&xs).unwrap() * k.delta(&xs).unwrap();
            let mut perm = xs.clone();
            // deterministic shuffle from the seed
            let n = perm.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let other = k.delta_prime(&perm).unwrap() * k.delta(&perm).unwrap();
            prop_assert!(close(base, other, 1e-12));
        }
    }
}
