use proptest::prelude::*;
use tsrm_core::airy::NormalizedAiry;
use tsrm_core::exec::{stream_seed, Execution};
use tsrm_core::marginals::{nu2, nu2_hat, MarginalKind, Marginals};
use tsrm_core::stochastic::{ks_statistic, Histogram};
use std::sync::OnceLock;

fn marginals() -> &'static Marginals {
    static M: OnceLock<Marginals> = OnceLock::new();
    M.get_or_init(|| Marginals::new(50).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_is_positive_and_decreasing(h in 0.0..10.0_f64, dh in 1e-3..1.0_f64) {
        let (a, b) = (NormalizedAiry::u(h).unwrap(), NormalizedAiry::u(h + dh).unwrap());
        prop_assert!(a > 0.0 && b > 0.0 && b < a);
        prop_assert!(NormalizedAiry::u_prime(h).unwrap() < 0.0);
    }

    #[test]
    fn airy_ode_holds(h in -8.0..8.0_f64) {
        let u = NormalizedAiry::u(h).unwrap();
        let u2 = NormalizedAiry::u_second(h).unwrap();
        prop_assert!((u2 - 2.0 * h * u).abs() <= 1e-10 * (1.0 + u.abs()));
    }

    #[test]
    fn densities_nonnegative(a in 0.0..6.0_f64) {
        prop_assert!(nu2(a).unwrap() >= 0.0);
        prop_assert!(nu2_hat(a).unwrap() >= 0.0);
        prop_assert!(marginals().nu1(a).unwrap() >= 0.0);
        prop_assert!(marginals().nu1_hat(a).unwrap() >= 0.0);
    }

    #[test]
    fn position_marginals_are_even(x in 0.01..5.0_f64) {
        let m = marginals();
        prop_assert_eq!(m.nu1(x).unwrap(), m.nu1(-x).unwrap());
        let c = m.cdf(MarginalKind::PositionExpTime, x).unwrap() + m.cdf(MarginalKind::PositionExpTime, -x).unwrap();
        prop_assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_monotone(a in 0.0..4.0_f64, d in 1e-3..1.0_f64) {
        for kind in [MarginalKind::HeightFixedTime, MarginalKind::HeightExpTime, MarginalKind::PositionExpTime] {
            let (lo, hi) = (marginals().cdf(kind, a).unwrap(), marginals().cdf(kind, a + d).unwrap());
            prop_assert!(lo <= hi + 1e-14 && (0.0..=1.0 + 1e-12).contains(&hi), "{kind}: {lo} {hi}");
        }
    }

    #[test]
    fn quantile_inverts_cdf(p in 0.01..0.99_f64) {
        let kind = MarginalKind::HeightExpTime;
        let q = marginals().quantile(kind, p).unwrap();
        prop_assert!((marginals().cdf(kind, q).unwrap() - p).abs() < 1e-10);
    }

    #[test]
    fn ks_statistic_bounded(xs in prop::collection::vec(-3.0..3.0_f64, 1..200)) {
        let d = ks_statistic(&xs, |x| 0.5 * (1.0 + (x / 3.0).clamp(-1.0, 1.0))).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn histogram_keeps_every_sample(xs in prop::collection::vec(-10.0..10.0_f64, 0..300), bins in 1usize..50) {
        let h = Histogram::new(&xs, -2.0, 2.0, bins).unwrap();
        prop_assert_eq!(h.total(), xs.len() as u64);
    }

    #[test]
    fn streams_depend_on_every_input(master: u64, domain: u64, i in 0u64..1_000_000) {
        let s = stream_seed(master, domain, i);
        prop_assert_eq!(s, stream_seed(master, domain, i));
        prop_assert_ne!(s, stream_seed(master, domain, i + 1));
        prop_assert_ne!(s, stream_seed(master.wrapping_add(1), domain, i));
    }

    #[test]
    fn execution_policies_agree(n in 0usize..500) {
        let f = |i: usize| (i as f64).sqrt().sin();
        prop_assert_eq!(Execution::Sequential.map_indexed(n, f), Execution::Parallel.map_indexed(n, f));
    }
}
