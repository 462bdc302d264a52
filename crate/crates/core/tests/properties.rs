use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use digitdrift::bitcore::BitString;
use digitdrift::charfn::{eval_charfn, moments_via_jets};
use digitdrift::cylinder::CylinderSolver;
use digitdrift::exact::{rational_to_f64, Dyadic, Rational};
use digitdrift::measure::{build_measure, build_measure_u64};
use digitdrift::variance_formula::variance_closed_form;

#[test]
fn unit_mass_and_zero_mean_below_4096() {
    for a in 0..4096u64 {
        let rep = build_measure_u64(a);
        assert_eq!(rep.total_mass(), Dyadic::one(), "a={a}");
        assert_eq!(rep.mean(), Dyadic::zero(), "a={a}");
        if a > 0 {
            assert_eq!(rep.moment_q(2), variance_closed_form(&BitString::from_u64(a)).unwrap().total, "a={a}");
        }
    }
}

#[test]
fn nothing_above_digit_sum() {
    for a in 0..2048u64 {
        let rep = build_measure_u64(a);
        let s = a.count_ones() as i64;
        assert!(rep.evaluate_q(s) > Rational::zero(), "a={a}");
        for d in (s + 1)..(s + 6) {
            assert!(rep.evaluate_q(d).is_zero(), "a={a} d={d}");
        }
    }
}

#[test]
fn left_tail_is_geometric() {
    for a in 1..2048u64 {
        let rep = build_measure_u64(a);
        let p = rep.profile();
        for d in (p.tail_end - 10)..=p.tail_end {
            assert_eq!(rep.evaluate(d - 1), rep.evaluate(d).half(), "a={a} d={d}");
            assert!(!rep.evaluate(d).is_negative());
        }
    }
}

#[test]
fn cylinder_densities_sum_to_one() {
    // finitely many d carry all the mass above a cut; the exact CDF covers the rest
    let mut solver = CylinderSolver::new();
    for a in 0..256u64 {
        let rep = build_measure_u64(a);
        let cut = -8;
        let above: Rational = (cut..=a.count_ones() as i64 + 1).map(|d| solver.solve(a, d).density().unwrap()).sum();
        let below = rep.profile().mass_at_most(cut - 1).to_rational();
        assert_eq!(above + below, Rational::one(), "a={a}");
    }
}

#[test]
fn cusick_complement() {
    for a in 0..2048u64 {
        let p = build_measure_u64(a).profile();
        assert_eq!(&p.mass_at_least(0) + &p.mass_at_most(-1), Dyadic::one(), "a={a}");
    }
}

#[test]
fn charfn_is_one_at_zero() {
    for a in 0..512u64 {
        let z = eval_charfn(&BitString::from_u64(a), 0.0);
        assert!((z.re - 1.0).abs() < 1e-12 && z.im.abs() < 1e-12, "a={a}");
    }
}

fn random_a(rng: &mut ChaCha8Rng, n: usize) -> BitString {
    let mut bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    bits[n - 1] = 1;
    BitString::from_bits_lsb(&bits)
}

#[test]
fn moments_grow_like_powers_of_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let order = 6;
    let mut worst = vec![Vec::new(); order + 1];
    for n in [64usize, 128, 256, 512] {
        let mut corpus: Vec<BitString> = (0..4).map(|_| random_a(&mut rng, n)).collect();
        corpus.push(BitString::from_bits_lsb(&vec![1; n]));
        corpus.push(BitString::from_bits_lsb(&(0..n).map(|k| (k % 2 == 0 || k == n - 1) as u8).collect::<Vec<_>>()));
        let mut one_hot = vec![0u8; n];
        one_hot[n - 1] = 1;
        corpus.push(BitString::from_bits_lsb(&one_hot));
        for k in 1..=order {
            let scale = (n as f64).powi(k as i32 / 2);
            let ratio = corpus
                .iter()
                .map(|a| rational_to_f64(&moments_via_jets(a, order).unwrap()[k]).abs() / scale)
                .fold(0.0, f64::max);
            worst[k].push(ratio);
        }
    }
    for (k, ratios) in worst.iter().enumerate().skip(1) {
        let first = ratios[0].max(1.0);
        for &r in ratios {
            assert!(r <= 4.0 * first, "k={k}: ratios {ratios:?}");
        }
    }
}

proptest! {
    #[test]
    fn doubling_preserves_measure(a in any::<u64>().prop_map(|x| x >> 2)) {
        let a = BigUint::from(a);
        prop_assert_eq!(build_measure(&a), build_measure(&(&a << 1usize)));
    }

    #[test]
    fn odd_step_recurrence(a in 0u64..(1 << 40), d in -12i64..8) {
        let lhs = build_measure_u64(2 * a + 1).evaluate_q(d);
        let rhs = (build_measure_u64(a).evaluate_q(d - 1) + build_measure_u64(a + 1).evaluate_q(d + 1)) / BigInt::from(2);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn values_are_probabilities(a in any::<u64>(), d in -70i64..70) {
        let v = build_measure_u64(a).evaluate_q(d);
        prop_assert!(!v.is_negative() && v <= Rational::one());
    }

    #[test]
    fn charfn_symmetry_and_modulus(a in any::<u64>(), theta in 0.0f64..std::f64::consts::TAU) {
        let bits = BitString::from_u64(a);
        let z = eval_charfn(&bits, theta);
        let w = eval_charfn(&bits, std::f64::consts::TAU - theta);
        prop_assert!(z.norm() <= 1.0 + 1e-12);
        prop_assert!((z - w.conj()).norm() <= 1e-12);
    }
}
