//! Mellin transform on the radial span and its inverse.
//!
//! `r^a (ln r)^b` maps to `(-1)^b b! / (z + a)^(b+1)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{Coeff, Rational};
use crate::radial::{RadialFunction, RadialKey};
use crate::ratfun::RationalFn;

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::from_integer(1.into()), |acc, k| acc * Rational::from_integer(k.into()))
}

/// Linear extension of `r^a (ln r)^b -> (-1)^b b! / (z+a)^(b+1)`.
pub fn mellin(p: &RadialFunction) -> RationalFn {
    let mut acc = RationalFn::zero();
    for (key, c) in p.terms() {
        let mut scale = factorial(key.log);
        if key.log % 2 == 1 {
            scale = -scale;
        }
        acc = &acc + &RationalFn::pole_term(c.scale_rational(&scale), key.exp.clone(), key.log + 1);
    }
    acc
}

/// Termwise inverse `c/(z+q)^j -> c (-1)^(j-1)/(j-1)! r^q (ln r)^(j-1)`.
pub fn inverse_mellin(a: &RationalFn) -> Result<RadialFunction> {
    let pf = a.partial_fractions();
    if pf.has_poly_part() {
        return Err(Error::NotMellinImage(format!("polynomial part in {a}")));
    }
    let mut terms: BTreeMap<RadialKey, Coeff> = BTreeMap::new();
    for ((q, j), c) in &pf.fractions {
        debug_assert!(*j > 0 && !c.is_zero());
        let log = j - 1;
        let mut scale = Rational::from_integer(1.into()) / factorial(log);
        if log % 2 == 1 {
            scale = -scale;
        }
        if scale.is_zero() {
            continue;
        }
        terms.insert(RadialKey::new(q.clone(), log), c.scale_rational(&scale));
    }
    Ok(RadialFunction::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, Indeterminate};
    use proptest::prelude::*;

    fn term(a: i64, b: u32, c: Coeff) -> RadialFunction {
        RadialFunction::term(RadialKey::new(int(a), b), c)
    }

    #[test]
    fn forward_examples() {
        assert_eq!(mellin(&term(2, 0, Coeff::one())).to_string(), "1/(z+2)");
        assert_eq!(mellin(&term(4, 1, Coeff::integer(2))).to_string(), "-2/(z+4)^2");
        assert_eq!(mellin(&term(0, 0, Coeff::one())).to_string(), "1/z");
        assert_eq!(mellin(&term(1, 2, Coeff::one())).to_string(), "2/(z+1)^3");
        assert_eq!(mellin(&term(4, 1, Coeff::one())).to_string(), "-1/(z+4)^2");
    }

    #[test]
    fn inverse_examples() {
        let r4 = inverse_mellin(&RationalFn::pole_term(Coeff::one(), int(4), 1)).unwrap();
        assert_eq!(r4, term(4, 0, Coeff::one()));
        let log = inverse_mellin(&RationalFn::pole_term(Coeff::integer(-2), int(4), 2)).unwrap();
        assert_eq!(log, term(4, 1, Coeff::integer(2)));
        let improper = &RationalFn::var() * &RationalFn::pole_term(Coeff::one(), int(2), 1);
        assert!(matches!(inverse_mellin(&improper), Err(Error::NotMellinImage(_))));
        assert!(inverse_mellin(&RationalFn::zero()).unwrap().is_zero());
    }

    fn arb_radial() -> impl Strategy<Value = RadialFunction> {
        let coeffs = [
            Coeff::one(),
            Coeff::var(Indeterminate::C(2)),
            &Coeff::var(Indeterminate::C(3)) * &Coeff::var(Indeterminate::Abar(1)),
        ];
        prop::collection::vec((-6i64..9, 0u32..4, -3i64..4, 0usize..3), 0..6).prop_map(move |v| {
            v.into_iter().fold(RadialFunction::zero(), |acc, (a, b, s, i)| {
                &acc + &term(a, b, coeffs[i].scale_rational(&int(s)))
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip(p in arb_radial()) {
            prop_assert_eq!(inverse_mellin(&mellin(&p)).unwrap(), p);
        }

        #[test]
        fn shift_law(p in arb_radial(), j in -4i64..5) {
            prop_assert_eq!(mellin(&p.shift(&int(j))), mellin(&p).shift(&int(j)));
        }

        #[test]
        fn linearity(p in arb_radial(), q in arb_radial(), s in -3i64..4) {
            let c = Coeff::var(Indeterminate::C(1)).scale_rational(&int(s));
            prop_assert_eq!(mellin(&(&p.scale(&c) + &q)), &mellin(&p).scale(&c) + &mellin(&q));
        }
    }
}
