use onerel::sampling::{closure_product, free_insertion, random_word, rng, soundness_word};
use onerel::tower::Membership;
use onerel::{Exec, Gen, Tower, TowerParams, Verdict, Word};
use proptest::prelude::*;
use rand::Rng;

type Perm = [u8; 5];

fn compose(p: &Perm, q: &Perm) -> Perm {
    // apply q first, then p
    std::array::from_fn(|i| p[q[i] as usize])
}

fn invert(p: &Perm) -> Perm {
    let mut r = [0u8; 5];
    for (i, &x) in p.iter().enumerate() {
        r[x as usize] = i as u8;
    }
    r
}

const ID: Perm = [0, 1, 2, 3, 4];

fn all_perms() -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p = ID;
    fn heap(k: usize, p: &mut Perm, out: &mut Vec<Perm>) {
        if k == 1 {
            out.push(*p);
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    heap(5, &mut p, &mut out);
    out
}

/// A homomorphism `Γ → S_5` given by the images of `t` and `a`.
#[derive(Debug, Clone, Copy)]
struct Rep {
    t: Perm,
    a: Perm,
}

impl Rep {
    fn eval_plain(&self, w: &Word) -> Perm {
        let (ti, ai) = (invert(&self.t), invert(&self.a));
        w.letters().iter().fold(ID, |acc, l| {
            let g = match (l.gen, l.inv) {
                (Gen::T, false) => &self.t,
                (Gen::T, true) => &ti,
                (_, false) => &self.a,
                (_, true) => &ai,
            };
            compose(&acc, g)
        })
    }

    fn eval(&self, h: &Word) -> Perm {
        self.eval_plain(&h.unrewrite().unwrap())
    }
}

/// Every nonabelian representation of `⟨t, a | r⟩` in `S_5`.
fn representations(params: &TowerParams) -> Vec<Rep> {
    let r = params.gamma_relator();
    let perms = all_perms();
    let mut reps = Vec::new();
    for t in &perms {
        for a in &perms {
            if compose(t, a) == compose(a, t) {
                continue;
            }
            let rep = Rep { t: *t, a: *a };
            if rep.eval_plain(&r) == ID {
                reps.push(rep);
            }
        }
    }
    reps
}

fn families() -> Vec<TowerParams> {
    ["1,2,a[0]", "2,3,a[0] a[1]", "1,3,a[0]", "2,2,a[0] a[0] a[1]"].iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn permutation_images_constrain_verdicts() {
    let mut forced = 0;
    for params in families() {
        let reps = representations(&params);
        assert!(!reps.is_empty(), "no nonabelian S_5 image for {params}");
        let tower = Tower::new(params.clone()).unwrap();
        let mut r = rng(41);
        for _ in 0..300 {
            let w = soundness_word(&mut r, &tower, 30, 5);
            let v = tower.decide(&w).unwrap();
            assert_ne!(v, Verdict::Inconclusive, "{params}: {w}");
            let detected = reps.iter().any(|rep| rep.eval(&w) != ID);
            if detected {
                forced += 1;
                assert_eq!(v, Verdict::NonTrivial, "{params}: {w} has a nontrivial image");
            }
            if v == Verdict::Trivial {
                assert!(tower.abelian_image(&w).is_zero());
            }
        }
    }
    assert!(forced > 100);
}

/// Words with zero abelian image that a permutation image still separates
/// from the identity exercise the pinch machinery rather than the prefilter.
#[test]
fn hidden_nontrivial_words_are_detected() {
    let params = TowerParams::gamma();
    let reps = representations(&params);
    let tower = Tower::new(params).unwrap();
    let mut r = rng(5);
    let mut hits = 0;
    for _ in 0..400 {
        let u = random_word(&mut r, 4, 0, 4);
        let v = random_word(&mut r, 4, 0, 4);
        let w = u.mul(&v).mul(&u.inverse()).mul(&v.inverse());
        if reps.iter().any(|rep| rep.eval(&w) != ID) {
            hits += 1;
            assert_eq!(tower.decide(&w).unwrap(), Verdict::NonTrivial, "{w}");
        }
    }
    assert!(hits > 50);
}

#[test]
fn closure_products_map_to_identity() {
    for params in families() {
        let reps = representations(&params);
        let tower = Tower::new(params.clone()).unwrap();
        let span = params.relator(0).index_range().unwrap().1;
        let mut r = rng(8);
        for _ in 0..40 {
            let w = closure_product(&mut r, &tower, 4, span + 3, 6);
            assert!(reps.iter().all(|rep| rep.eval(&w) == ID));
            assert_eq!(tower.decide(&w).unwrap(), Verdict::Trivial, "{params}: {w}");
        }
    }
}

#[test]
fn batch_strategies_agree() {
    let tower = Tower::gamma();
    let mut r = rng(3);
    let words: Vec<Word> = (0..200).map(|_| soundness_word(&mut r, &tower, 24, 5)).collect();
    let seq = tower.decide_batch(&words, Exec::Sequential);
    let par = tower.decide_batch(&words, Exec::Parallel);
    assert_eq!(seq, par);
    let single: Vec<Verdict> = words.iter().map(|w| tower.decide(w).unwrap()).collect();
    assert_eq!(seq, single);
}

#[test]
fn membership_answers_are_exact() {
    let tower = Tower::gamma();
    let mut r = rng(12);
    for n in 3..=5usize {
        let c = Word::idx_pow(n as i64 - 1, 1);
        for p in -4..=4 {
            assert_eq!(tower.membership_in_c(&c.pow(p), n).unwrap(), Membership::In(p));
        }
        for _ in 0..60 {
            let y = random_word(&mut r, 8, 0, n as i64 - 1);
            match tower.membership_in_c(&y, n).unwrap() {
                Membership::In(p) => {
                    let rest = y.mul(&c.pow(-p));
                    assert_eq!(tower.is_trivial(&rest, n).unwrap().verdict, Verdict::Trivial, "{y}");
                }
                Membership::NotIn => {
                    for p in -3..=3 {
                        let rest = y.mul(&c.pow(-p));
                        assert_eq!(tower.is_trivial(&rest, n).unwrap().verdict, Verdict::NonTrivial, "{y}");
                    }
                }
                Membership::Inconclusive => panic!("inconclusive membership for {y}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_are_invariant(seed in any::<u64>(), k in -3i64..=3) {
        let tower = Tower::gamma();
        let mut r = rng(seed);
        let w = soundness_word(&mut r, &tower, 24, 5);
        let u = random_word(&mut r, 5, 0, 5);
        let v = tower.decide(&w).unwrap();
        prop_assert_eq!(tower.decide(&w.conj(&u)).unwrap(), v);
        prop_assert_eq!(tower.decide(&w.shift(k)).unwrap(), v);
        prop_assert_eq!(tower.decide(&free_insertion(&mut r, &w, &u)).unwrap(), v);
        prop_assert_eq!(tower.decide(&w.inverse()).unwrap(), v);
    }

    #[test]
    fn higher_levels_agree(seed in any::<u64>(), extra in 0usize..3) {
        let tower = Tower::gamma();
        let mut r = rng(seed);
        let w = soundness_word(&mut r, &tower, 24, 4);
        if let Some((lo, hi)) = w.index_range() {
            let w = w.shift(-lo);
            let n = (hi - lo) as usize + extra;
            prop_assert_eq!(tower.is_trivial(&w, n).unwrap().verdict, tower.decide(&w).unwrap());
        }
    }

    #[test]
    fn plain_and_indexed_agree(seed in any::<u64>()) {
        let tower = Tower::gamma();
        let mut r = rng(seed);
        let w = soundness_word(&mut r, &tower, 20, 4);
        let plain = w.unrewrite().unwrap();
        let k = r.gen_range(-2i64..=2);
        let shifted = plain.conj(&Word::t().pow(k));
        prop_assert_eq!(tower.is_trivial_in_gamma(&shifted).unwrap().verdict, tower.decide(&w).unwrap());
    }
}
