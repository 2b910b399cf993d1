use conorm::catalog::preset;
use conorm::classes::ConormContext;
use conorm::lattice::TorsionVector;
use proptest::prelude::*;

fn gl4_outer_so() -> ConormContext {
    ConormContext::new(preset("GL4").unwrap().action("outer-SO").unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent(den in 1i64..30, a in 0i64..30, b in 0i64..30) {
        let ctx = gl4_outer_so();
        let s = TorsionVector::from_i64(&[a % den, b % den], den);
        let c = ctx.small.canonicalize(&s).unwrap();
        prop_assert_eq!(ctx.small.canonicalize(&c.representative.value).unwrap(), c);
    }

    #[test]
    fn conorm_is_additive(den in 1i64..20, a in 0i64..20, b in 0i64..20, c in 0i64..20, d in 0i64..20) {
        let ctx = gl4_outer_so();
        let x = TorsionVector::from_i64(&[a, b], den);
        let y = TorsionVector::from_i64(&[c, d], den);
        let lhs = ctx.conorm_value(&x.add(&y)).unwrap();
        let rhs = ctx.conorm_value(&x).unwrap().add(&ctx.conorm_value(&y).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conorm_respects_classes(den in 1i64..16, a in 0i64..16, b in 0i64..16) {
        let ctx = gl4_outer_so();
        let s = TorsionVector::from_i64(&[a, b], den);
        prop_assert!(ctx.check_well_defined(&s).unwrap());
    }
}
