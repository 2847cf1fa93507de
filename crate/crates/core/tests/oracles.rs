mod common;

use common::Naive;
use gauss_moments::charsum::{self, KernelTable};
use gauss_moments::field::{primes_in, Character, CharFilter, PrimeContext};
use gauss_moments::gauss::{generalized_gauss, GaussSpectrum, Roots};
use gauss_moments::lfunc::{self, diag_gen6, l1_closed, tau, LSpectrum, SeriesTable};
use gauss_moments::moments::{moment6_closed, moment_unweighted};
use proptest::prelude::*;

#[test]
fn legendre_table_matches_euler_criterion() {
    for p in common::primes(3, 400) {
        let ctx = PrimeContext::new(p).unwrap();
        assert_eq!(
            ctx.legendre_table().iter().map(|&v| v as i64).collect::<Vec<_>>(),
            common::rho_table(p),
            "p={p}"
        );
        assert_eq!(ctx.generator(), common::primitive_root(p));
    }
}

#[test]
fn factored_sums_match_naive_loops() {
    for p in common::primes(5, 31) {
        let ctx = PrimeContext::new(p).unwrap();
        let k = KernelTable::build(&ctx);
        let naive = Naive::new(p);
        for x in 1..p {
            assert_eq!(k.get(x), naive.kernel(x));
        }
        assert_eq!(charsum::sum_n(&ctx, &k), naive.n(), "N p={p}");
        assert_eq!(charsum::sum_t(&ctx, &k), naive.t(), "T p={p}");
        assert_eq!(charsum::triple_full(&ctx, &k), naive.triple_full());
        for a in 2..p - 1 {
            assert_eq!(charsum::triple_s(&ctx, &k, a).unwrap(), naive.s(a), "S p={p} a={a}");
        }
        for a in 1..p {
            assert_eq!(charsum::sum_r(&ctx, &k, a).unwrap(), naive.r(a), "R p={p} a={a}");
        }
        let phi = charsum::phi_table(&ctx);
        for t in 0..p {
            assert_eq!(phi[t as usize], naive.phi(t));
        }
    }
}

#[test]
fn small_prime_reference_values() {
    // The sign of K follows rho(b^2 - x^2); for p = 7, rho(-1) = -1.
    let n7 = Naive::new(7);
    assert_eq!(n7.kernel(2), -2);
    assert_eq!(n7.t(), 16);
    assert_eq!(n7.triple_full(), 48);
    assert_eq!(n7.s(2), -24);
    assert_eq!(n7.n(), 0);
    assert_eq!(n7.r(1), 0);
    let n5 = Naive::new(5);
    assert_eq!(n5.r(2), -4);
    assert_eq!(n5.triple_full(), 8);
    assert_eq!((n5.n(), n5.t(), n5.s(2)), (0, 0, 0));
}

#[test]
fn gauss_sums_match_direct_trigonometry() {
    for p in common::primes(3, 47) {
        let ctx = PrimeContext::new(p).unwrap();
        let roots = Roots::<f64>::new(&ctx);
        for k in 0..p - 1 {
            let chi = Character::new(p, k).unwrap();
            for n in [1i64, 2, -1] {
                let g = generalized_gauss(&roots, n, &chi).unwrap();
                let (re, im) = common::gauss_sum(p, n, k);
                assert!((g.value.re - re).abs() < 1e-9 && (g.value.im - im).abs() < 1e-9, "p={p} k={k}");
            }
        }
    }
}

#[test]
fn sixth_moment_examples_by_direct_summation() {
    let brute = |p: u64, n: i64| -> f64 {
        (0..p - 1)
            .map(|k| {
                let (re, im) = common::gauss_sum(p, n, k);
                (re * re + im * im).powi(3)
            })
            .sum()
    };
    assert!((brute(7, 1) - 13056.0).abs() < 1e-7);
    let s5 = 5f64.sqrt();
    assert!((brute(5, 1) - (2176.0 + 384.0 * s5)).abs() < 1e-8);
    assert!((brute(5, 2) - (2176.0 - 384.0 * s5)).abs() < 1e-8);
    let ctx = PrimeContext::new(5).unwrap();
    assert!((moment6_closed(&ctx, 2, 0).unwrap().eval::<f64>(5) - brute(5, 2)).abs() < 1e-8);
}

#[test]
fn second_moment_is_orthogonality_count() {
    for p in primes_in(3, 500) {
        let ctx = PrimeContext::new(p).unwrap();
        let roots = Roots::<f64>::new(&ctx);
        for n in [1i64, 2, 3] {
            if (n as u64).is_multiple_of(p) {
                continue;
            }
            let m1 = moment_unweighted(&roots, n, 1, true).unwrap();
            let want = ((p - 1) * (p - 1)) as f64;
            assert!((m1.value - want).abs() <= 1e-8 * want, "p={p} n={n}");
        }
    }
}

#[test]
fn tau_has_modulus_root_p() {
    for p in primes_in(3, 500) {
        let ctx = PrimeContext::new(p).unwrap();
        let roots = Roots::<f64>::new(&ctx);
        for chi in ctx.characters(CharFilter::All).into_iter().skip(1) {
            let (m, _) = tau(&roots, &chi).unwrap().abs();
            assert!((m - (p as f64).sqrt()).abs() < 1e-9, "p={p} k={}", chi.index());
        }
        let t7 = common::gauss_sum(7, 0, 0);
        assert!(t7.0.is_finite());
    }
    // tau(chi_1 mod 7) by a six-term sum.
    let chi = common::character_turns(7, 1);
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for a in 1..7u64 {
        let ang = std::f64::consts::TAU * (chi[a as usize].unwrap() + a as f64 / 7.0);
        re += ang.cos();
        im += ang.sin();
    }
    assert!((re.hypot(im) - 7f64.sqrt()).abs() < 1e-12);
}

#[test]
fn quadratic_l_values_are_real_and_positive() {
    for p in primes_in(3, 200) {
        let ctx = PrimeContext::new(p).unwrap();
        let roots = Roots::<f64>::new(&ctx);
        let l = l1_closed(&roots, &Character::quadratic(p).unwrap()).unwrap();
        assert!(l.value.im.abs() < 1e-10 && l.value.re > 0.0, "p={p}");
    }
}

#[test]
fn gen6_matches_series_recomputation() {
    let ctx = PrimeContext::new(5).unwrap();
    let roots = Roots::<f64>::new(&ctx);
    let spectrum = LSpectrum::compute(&roots);
    let table = SeriesTable::<f64>::new(5, 1_000_000).unwrap();
    let mut abs = [0.0f64; 4];
    let mut tail = 0.0f64;
    for k in 1..4u64 {
        let s = lfunc::l1_series_with(&roots, &table, &Character::new(5, k).unwrap()).unwrap();
        abs[k as usize] = s.abs_value;
        tail = tail.max(s.abs_err);
    }
    let mut brute = 0.0;
    for a in 1..5u64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (k, l) in abs.iter().enumerate().skip(1) {
            let turns = common::character_turns(5, k as u64)[a as usize].unwrap();
            let ang = std::f64::consts::TAU * turns;
            re += ang.cos() * l;
            im += ang.sin() * l;
        }
        brute += re.hypot(im);
    }
    let d = diag_gen6(&roots, &spectrum);
    assert!((d - brute).abs() <= 4.0 * 3.0 * tail + 1e-12, "{d} vs {brute}");
}

#[test]
fn constant_c_against_reference_product() {
    let reference = common::constant_c_reference(20_000, 30);
    let c = lfunc::constant_c(10_000, 20).unwrap();
    assert!(c.value <= reference);
    assert!(reference - c.value <= c.tail_bound);
    let mut last = 0.0;
    for pmax in [2u64, 3, 10, 100, 1000] {
        let v = lfunc::constant_c(pmax, 20).unwrap().value;
        assert!(v >= last && v >= 1.0);
        last = v;
    }
    assert!(lfunc::constant_c(1000, 2).unwrap().value <= lfunc::constant_c(1000, 3).unwrap().value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moments_depend_on_n_through_its_square_class(idx in 0usize..40, n in 1i64..1000, t in 1i64..1000) {
        let primes = primes_in(5, 200);
        let p = primes[idx % primes.len()];
        prop_assume!(n % p as i64 != 0 && t % p as i64 != 0);
        let ctx = PrimeContext::new(p).unwrap();
        let roots = Roots::<f64>::new(&ctx);
        let a = GaussSpectrum::compute(&roots, n).unwrap();
        let b = GaussSpectrum::compute(&roots, n * t * t).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!((x.abs2 - y.abs2).abs() < 1e-9 * (p as f64));
        }
    }

    #[test]
    fn kernel_is_even_and_weil_bounded(idx in 0usize..200, x in 1u64..10_000) {
        let primes = primes_in(5, 1200);
        let p = primes[idx % primes.len()];
        let x = x % p;
        prop_assume!(x != 0);
        let ctx = PrimeContext::new(p).unwrap();
        let k = charsum::kernel(&ctx, x).unwrap();
        prop_assert_eq!(k, charsum::kernel(&ctx, p - x).unwrap());
        if x != 1 && x != p - 1 {
            prop_assert!((k * k) as u64 <= 9 * p);
        }
    }
}
