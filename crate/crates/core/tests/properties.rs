use discordium::channels::{dephasing_channel, random_channel};
use discordium::discord::{discord, mutual_information_loss, DiscordConfig};
use discordium::linalg::{kron, partial_trace, trace_distance, Keep};
use discordium::measures::{entropy_of_spectrum, mutual_information, relative_entropy, von_neumann_entropy};
use discordium::petz::build_petz;
use discordium::random::{haar_unitary, random_hermitian, rng_from_seed};
use discordium::states::{random_cq_state, random_state, BipartiteState, DensityMatrix};
use discordium::zeroing::zero_conjugate_pair;
use discordium::CMatrix;
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 1usize..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_of_product((d_a, d_b) in dims(), seed in any::<u64>()) {
        let a = random_state::<f64>(d_a, d_a, seed).unwrap();
        let b = random_state::<f64>(d_b, d_b, seed ^ 1).unwrap();
        let ab = kron(a.matrix(), b.matrix());
        let ta = partial_trace(&ab, d_a, d_b, Keep::A).unwrap();
        let tb = partial_trace(&ab, d_a, d_b, Keep::B).unwrap();
        prop_assert!((&ta - a.matrix()).max_abs() < 1e-14);
        prop_assert!((&tb - b.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn entropy_bounds_and_invariance(d in 1usize..=6, rank_frac in 0.0f64..1.0, seed in any::<u64>()) {
        let rank = 1 + ((d - 1) as f64 * rank_frac) as usize;
        let r = random_state::<f64>(d, rank, seed).unwrap();
        let s = von_neumann_entropy(&r);
        prop_assert!(s >= -1e-12);
        prop_assert!(s <= (rank as f64).log2() + 1e-12);
        let u: CMatrix = haar_unitary(&mut rng_from_seed(seed ^ 7), d);
        let rotated = DensityMatrix::project(&u.conjugate(r.matrix()));
        prop_assert!((von_neumann_entropy(&rotated) - s).abs() < 1e-9);
    }

    #[test]
    fn single_and_double_precision_agree(d in 1usize..=5, seed in any::<u64>()) {
        let r = random_state::<f64>(d, d, seed).unwrap();
        let r32 = DensityMatrix::project(&r.matrix().cast::<f32>());
        let diff = (von_neumann_entropy(&r32) as f64 - von_neumann_entropy(&r)).abs();
        prop_assert!(diff < 1e-4, "{}", diff);
    }

    #[test]
    fn relative_entropy_is_nonnegative(d in 1usize..=4, seed in any::<u64>()) {
        let rho = random_state::<f64>(d, d, seed).unwrap();
        let sigma = random_state::<f64>(d, d, seed ^ 3).unwrap();
        let v = relative_entropy(&rho, &sigma).unwrap().finite().unwrap();
        prop_assert!(v >= -1e-10);
    }

    #[test]
    fn dephasing_never_increases_information((d_a, d_b) in dims(), seed in any::<u64>()) {
        let s = BipartiteState::new(random_state::<f64>(d_a * d_b, d_a * d_b, seed).unwrap(), d_a, d_b).unwrap();
        let u: CMatrix = haar_unitary(&mut rng_from_seed(seed ^ 5), d_a);
        let loss = mutual_information_loss(&s, &u).unwrap();
        prop_assert!(loss >= -1e-9);
        let d = dephasing_channel(&u, d_a, d_b).unwrap();
        let twice = d.apply(&d.apply(s.state()).unwrap()).unwrap();
        let once = d.apply(s.state()).unwrap();
        prop_assert!((twice.matrix() - once.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn petz_map_fixes_reference(d_in in 1usize..=3, d_out in 1usize..=3, extra in 0usize..3, seed in any::<u64>()) {
        let n = d_in.div_ceil(d_out) + extra;
        let e = random_channel::<f64>(d_in, d_out, n, seed).unwrap();
        let sigma = random_state::<f64>(d_in, d_in, seed ^ 9).unwrap();
        let p = build_petz(&e, &sigma).unwrap();
        let back = p.apply(&e.apply_operator(sigma.matrix()).unwrap()).unwrap();
        prop_assert!(trace_distance(&back, sigma.matrix()).unwrap() < 1e-9);
    }

    #[test]
    fn zeroing_keeps_trace_and_hermiticity(d in 2usize..=5, i in 0usize..5, j in 0usize..5, seed in any::<u64>()) {
        prop_assume!(i < d && j < d && i != j);
        let h: CMatrix = random_hermitian(&mut rng_from_seed(seed), d);
        let z = zero_conjugate_pair(&h, i, j).unwrap();
        prop_assert_eq!(z.hermiticity_defect(), 0.0);
        prop_assert!((z.trace() - h.trace()).norm() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn discord_is_bounded_by_information((d_a, d_b) in (2usize..=3, 2usize..=3), seed in any::<u64>()) {
        let s = BipartiteState::new(random_state::<f64>(d_a * d_b, d_a * d_b, seed).unwrap(), d_a, d_b).unwrap();
        let cfg = DiscordConfig { restarts: 2, enlarge: false, seed, ..Default::default() };
        let r = discord(&s, &cfg).unwrap();
        prop_assert!(r.value >= -1e-9);
        prop_assert!(r.value <= mutual_information(&s) + 1e-9);
        prop_assert!((r.recompute(&s).unwrap() - r.value).abs() < 1e-9);
    }

    #[test]
    fn cq_states_have_vanishing_discord((d_a, d_b) in (2usize..=3, 1usize..=3), seed in any::<u64>()) {
        let s = random_cq_state::<f64>(d_a, d_b, seed).unwrap();
        let cfg = DiscordConfig { restarts: 2, enlarge: false, seed, ..Default::default() };
        prop_assert!(discord(&s, &cfg).unwrap().value <= 1e-6);
    }
}

#[test]
fn entropy_of_spectrum_ignores_numerical_zeros() {
    assert_eq!(entropy_of_spectrum(&[1.0, 1e-18, -1e-17]), 0.0);
}
