use num::{BigInt, BigRational, One, Zero};
use onerel::{BsElement, Gen, Letter, MAdic, Word};
use proptest::prelude::*;

/// Faithful affine model of BS(1,m): α ↦ (x ↦ m x), β ↦ (x ↦ x + 1),
/// so `α^i β^l` acts as `x ↦ m^i x + m^i l`.
#[derive(Debug, Clone, PartialEq)]
struct Affine {
    scale: BigRational,
    offset: BigRational,
}

impl Affine {
    fn identity() -> Self {
        Affine { scale: BigRational::one(), offset: BigRational::zero() }
    }

    /// `self ∘ other`.
    fn compose(&self, other: &Affine) -> Affine {
        Affine { scale: &self.scale * &other.scale, offset: &self.scale * &other.offset + &self.offset }
    }

    fn of_word(w: &Word, m: u32) -> Affine {
        let m = BigRational::from_integer(BigInt::from(m));
        w.letters().iter().fold(Affine::identity(), |acc, l| {
            let g = match (l.gen, l.inv) {
                (Gen::T, false) => Affine { scale: m.clone(), offset: BigRational::zero() },
                (Gen::T, true) => Affine { scale: m.recip(), offset: BigRational::zero() },
                (_, false) => Affine { scale: BigRational::one(), offset: BigRational::one() },
                (_, true) => Affine { scale: BigRational::one(), offset: -BigRational::one() },
            };
            acc.compose(&g)
        })
    }

    fn of_element(e: &BsElement) -> Affine {
        let scale = onerel::bsarith::rational_power(e.base(), e.alpha_exp);
        let offset = &scale * e.beta_exp.to_rational();
        Affine { scale, offset }
    }
}

fn plain(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((any::<bool>(), any::<bool>()), 0..max).prop_map(|v| {
        let letters = v.into_iter().map(|(t, inv)| Letter { gen: if t { Gen::T } else { Gen::A }, inv }).collect();
        Word::new(letters).unwrap()
    })
}

fn base() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(7)]
}

proptest! {
    #[test]
    fn normal_form_matches_affine_model(w in plain(30), m in base()) {
        let e = BsElement::normal_form(&w, m);
        prop_assert_eq!(Affine::of_element(&e), Affine::of_word(&w, m));
    }

    #[test]
    fn multiplication_is_associative(x in plain(16), y in plain(16), z in plain(16), m in base()) {
        let (a, b, c) = (BsElement::normal_form(&x, m), BsElement::normal_form(&y, m), BsElement::normal_form(&z, m));
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn inverse_is_two_sided(x in plain(20), m in base()) {
        let a = BsElement::normal_form(&x, m);
        prop_assert!(a.mul(&a.inverse()).unwrap().is_identity());
        prop_assert!(a.inverse().mul(&a).unwrap().is_identity());
        prop_assert_eq!(BsElement::normal_form(&x.inverse(), m), a.inverse());
    }

    #[test]
    fn normal_form_is_a_homomorphism(x in plain(16), y in plain(16), m in base()) {
        let lhs = BsElement::normal_form(&x.concat(&y), m);
        let rhs = BsElement::normal_form(&x, m).mul(&BsElement::normal_form(&y, m)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn madic_values_are_canonical(num in -1000i64..1000, k in 0u32..6, m in base()) {
        let x = MAdic::new(num, k, m).unwrap();
        let y = MAdic::new(BigInt::from(num) * BigInt::from(m), k + 1, m).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(x.to_rational(), BigRational::new(num.into(), BigInt::from(m).pow(k)));
    }

    #[test]
    fn lex_order_is_a_bi_order(x in plain(16), y in plain(16), h in plain(8), m in base()) {
        let (a, b, g) = (BsElement::normal_form(&x, m), BsElement::normal_form(&y, m), BsElement::normal_form(&h, m));
        if a.is_positive() && b.is_positive() {
            prop_assert!(a.mul(&b).unwrap().is_positive());
        }
        if a.is_positive() {
            prop_assert!(g.mul(&a).unwrap().mul(&g.inverse()).unwrap().is_positive());
        }
        prop_assert!(a.is_identity() || a.is_positive() != a.inverse().is_positive());
    }
}

#[test]
fn defining_relation_is_trivial() {
    for m in [2u32, 3, 5] {
        let r = Word::t().concat(&Word::a()).concat(&Word::t().inverse()).concat(&Word::a().pow(-(m as i64)));
        assert!(BsElement::normal_form(&r, m).is_identity());
        assert!(!BsElement::normal_form(&r, m + 1).is_identity());
    }
}
