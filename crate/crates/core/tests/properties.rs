use approx::assert_relative_eq;
use proptest::prelude::*;

use cm_entropy::calculus::{shannon_derivative_exact, shannon_prime, DerivativeMethod, DerivativeRequest};
use cm_entropy::{
    basis, bessel_i0_oracle, entropy_set, expectation, shannon, sum_squares, Envelope, FamilyParams, Support,
    TruncationPolicy,
};

/// A valid family member together with a point inside its domain.
#[derive(Debug, Clone, Copy)]
struct Case {
    c: f64,
    n: f64,
    x: f64,
}

impl Case {
    fn params(&self) -> FamilyParams {
        FamilyParams::new(self.c, self.n).unwrap()
    }
}

fn binomial() -> impl Strategy<Value = Case> {
    (
        prop_oneof![Just(-1.0), Just(-2.0), Just(-0.5)],
        1u32..=15,
        0.01f64..0.99,
    )
        .prop_map(|(c, l, u)| Case {
            c,
            n: -c * l as f64,
            x: -u / c,
        })
}

fn poisson() -> impl Strategy<Value = Case> {
    (0.1f64..10.0, 0.01f64..15.0).prop_map(|(n, x)| Case { c: 0.0, n, x })
}

fn negative_binomial() -> impl Strategy<Value = Case> {
    (0.1f64..3.0, 0.1f64..10.0, 0.01f64..15.0).prop_map(|(c, extra, x)| Case { c, n: c + extra, x })
}

fn any_case() -> impl Strategy<Value = Case> {
    prop_oneof![binomial(), poisson(), negative_binomial()]
}

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn mass_is_one_and_mean_is_nx(case in any_case()) {
        let p = case.params();
        let mass = expectation(&p, case.x, |_| 1.0, Envelope::polynomial(1.0, 0), &pol()).unwrap();
        let mean = expectation(&p, case.x, |k| k as f64, Envelope::polynomial(1.0, 1), &pol()).unwrap();
        prop_assert!((mass.value - 1.0).abs() <= 1e-12 + mass.tail_bound);
        let nx = case.n * case.x;
        prop_assert!((mean.value - nx).abs() <= 1e-10 * (1.0 + nx) + mean.tail_bound);
    }

    #[test]
    fn binomial_is_symmetric_about_the_midpoint(case in binomial()) {
        let p = case.params();
        let Support::Finite(l) = p.support() else { unreachable!() };
        let mirror = -1.0 / case.c - case.x;
        for k in 0..=l {
            let a = basis(&p, k, case.x).unwrap();
            let b = basis(&p, l - k, mirror).unwrap();
            prop_assert!((a - b).abs() <= 1e-13 * a.max(b).max(1e-300) + 1e-300, "k={k}: {a} vs {b}");
        }
        let (h, hm) = (shannon(&p, case.x, &pol()).unwrap(), shannon(&p, mirror, &pol()).unwrap());
        prop_assert!((h.value - hm.value).abs() <= 1e-12);
        let (s, sm) = (sum_squares(&p, case.x, &pol()).unwrap(), sum_squares(&p, mirror, &pol()).unwrap());
        prop_assert!((s.value - sm.value).abs() <= 1e-13);
        let (d, dm) = (shannon_prime(&p, case.x, &pol()).unwrap(), shannon_prime(&p, mirror, &pol()).unwrap());
        prop_assert!((d + dm).abs() <= 1e-9 * (1.0 + d.abs()));
    }

    #[test]
    fn rescaling_leaves_the_distribution_unchanged(case in any_case(), lambda in 0.25f64..4.0) {
        // p depends on (n/c, cx), or on nx when c = 0
        let p = case.params();
        let q = FamilyParams::new(case.c * lambda, case.n * lambda).unwrap();
        let y = case.x / lambda;
        for k in 0..6 {
            let a = basis(&p, k, case.x).unwrap();
            let b = basis(&q, k, y).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-200), "k={k}: {a} vs {b}");
        }
        let (h, hq) = (shannon(&p, case.x, &pol()).unwrap(), shannon(&q, y, &pol()).unwrap());
        prop_assert!((h.value - hq.value).abs() <= 1e-11 + h.error_bound + hq.error_bound);
    }

    #[test]
    fn small_c_approaches_poisson(n in 0.5f64..5.0, x in 0.05f64..5.0) {
        let p0 = FamilyParams::new(0.0, n).unwrap();
        let c = 1e-6;
        let pc = FamilyParams::new(c, n).unwrap();
        let h0 = shannon(&p0, x, &pol()).unwrap().value;
        let hc = shannon(&pc, x, &pol()).unwrap().value;
        let s0 = sum_squares(&p0, x, &pol()).unwrap().value;
        let sc = sum_squares(&pc, x, &pol()).unwrap().value;
        // first order in c: the variance is n x (1 + c x)
        let slack = 10.0 * c * (1.0 + x) * (1.0 + n * x);
        prop_assert!((h0 - hc).abs() <= slack, "H {h0} vs {hc}");
        prop_assert!((s0 - sc).abs() <= slack, "S {s0} vs {sc}");
    }

    #[test]
    fn entropy_relations_and_ranges(case in any_case()) {
        let p = case.params();
        let set = entropy_set(&p, case.x, &pol()).unwrap();
        let s = set.sum_squares.value;
        prop_assert!(s > 0.0 && s <= 1.0 + 1e-15);
        prop_assert_eq!(set.renyi2.value, -s.ln());
        prop_assert_eq!(set.tsallis2.value, 1.0 - s);
        prop_assert!(set.tsallis2.value >= -1e-15 && set.tsallis2.value < 1.0);
        // Shannon dominates order-2 Rényi; Rényi-2 dominates Tsallis-2
        prop_assert!(set.shannon.value + set.shannon.error_bound >= set.renyi2.value - 1e-12);
        prop_assert!(set.renyi2.value >= set.tsallis2.value - 1e-15);
        if let Support::Finite(l) = p.support() {
            prop_assert!(set.shannon.value <= ((l + 1) as f64).ln() + 1e-12);
            prop_assert!(s >= 1.0 / (l + 1) as f64 - 1e-15);
        }
    }

    #[test]
    fn poisson_collision_sum_matches_bessel(n in 0.1f64..5.0, x in 0.0f64..4.0) {
        let p = FamilyParams::new(0.0, n).unwrap();
        let s = sum_squares(&p, x, &pol()).unwrap();
        let z = 2.0 * n * x;
        let oracle = (-z).exp() * bessel_i0_oracle(z);
        prop_assert!((s.value - oracle).abs() <= s.error_bound + 1e-14 * (1.0 + oracle));
    }

    #[test]
    fn exact_derivatives_match_finite_differences(case in any_case(), order in 1usize..=4) {
        let p = case.params();
        let x = if case.c < 0.0 { case.x.clamp(0.1 / -case.c, 0.9 / -case.c) } else { case.x.max(0.1) };
        let req = |method| DerivativeRequest { params: p, x, order, method };
        let exact = req(DerivativeMethod::Exact).evaluate(&pol()).unwrap();
        let fd = req(DerivativeMethod::FiniteDifference).evaluate(&pol()).unwrap();
        prop_assert!((exact - fd).abs() <= 1e-6f64.max(1e-4 * exact.abs()), "order {order}: {exact} vs {fd}");
    }

    #[test]
    fn shannon_entropy_is_concave(case in any_case()) {
        let p = case.params();
        let h2 = shannon_derivative_exact(&p, case.x, 2, &pol()).unwrap();
        prop_assert!(h2 <= 1e-12, "H'' = {h2}");
    }

    #[test]
    fn collision_sum_is_smallest_at_the_midpoint(case in binomial()) {
        let p = case.params();
        let mid = -0.5 / case.c;
        let at_mid = sum_squares(&p, mid, &pol()).unwrap().value;
        let here = sum_squares(&p, case.x, &pol()).unwrap().value;
        prop_assert!(here >= at_mid - 1e-15);
        let h_mid = shannon(&p, mid, &pol()).unwrap().value;
        prop_assert!(shannon(&p, case.x, &pol()).unwrap().value <= h_mid + 1e-12);
    }
}

#[test]
fn poisson_limit_from_the_binomial_side() {
    // l = 10^4 trials with success probability x/l
    let l = 10_000.0;
    let pb = FamilyParams::new(-1.0 / l, 1.0).unwrap();
    let p0 = FamilyParams::new(0.0, 1.0).unwrap();
    for x in [0.5, 1.0, 3.0] {
        let hb = shannon(&pb, x, &pol()).unwrap().value;
        let h0 = shannon(&p0, x, &pol()).unwrap().value;
        assert!((hb - h0).abs() < 1e-3, "{hb} vs {h0}");
        assert!(hb < h0);
        assert_relative_eq!(
            sum_squares(&pb, x, &pol()).unwrap().value,
            sum_squares(&p0, x, &pol()).unwrap().value,
            max_relative = 1e-3
        );
    }
}
