use htoeplitz::exactalg::{rat, Coeff, GaussianRational, Indeterminate};
use htoeplitz::{RadialFunction, RadialKey, Symbol};
use htoeplitz_cli::parse_symbol;
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = Coeff> {
    let monomials = prop::sample::select(vec![
        Coeff::one(),
        Coeff::var(Indeterminate::C(1)),
        Coeff::var(Indeterminate::C(-3)),
        &Coeff::var(Indeterminate::C(3)) * &Coeff::var(Indeterminate::Abar(1)),
        &Coeff::var(Indeterminate::Abar(2)) * &Coeff::var(Indeterminate::Abar(2)),
    ]);
    (monomials, -5i64..6, 1i64..4, -2i64..3).prop_map(|(m, p, q, im)| {
        m.scale(&GaussianRational::new(rat(p, q), rat(im, 2)))
    })
}

fn symbol() -> impl Strategy<Value = Symbol> {
    let term = (-3i64..4, -4i64..7, 1i64..3, 0u32..3, coeff());
    prop::collection::vec(term, 0..6).prop_map(|terms| {
        let mut s = Symbol::zero();
        for (k, p, q, b, c) in terms {
            s.add_component(k, RadialFunction::term(RadialKey::new(rat(p, q), b), c));
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parse_render_round_trip(s in symbol()) {
        let text = s.to_string();
        let back = parse_symbol(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, s, "{}", text);
    }
}

#[test]
fn like_components_merge() {
    let s = parse_symbol("z^2 + e(2)*r^2 - 2*z*z").unwrap();
    assert!(s.is_zero());
    let s = parse_symbol("conj(z)*z").unwrap();
    assert_eq!(s, Symbol::component(0, RadialFunction::power(2, Coeff::one())));
}
