use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use finstoch::dynamics::{enumerate_ergodic, is_left_invariant};
use finstoch::io;
use finstoch::kernel::{as_equal, compose, is_deterministic, tensor, Kernel};
use finstoch::rational::{self, Rational};
use finstoch::space::{indistinguishability_quotient, product, FinSpace};
use finstoch::{positivity_instance, random};

fn normalize(weights: Vec<u8>) -> Vec<Rational> {
    let mut weights: Vec<i64> = weights.into_iter().map(i64::from).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| rational::ratio(w, total)).collect()
}

fn space_strategy() -> impl Strategy<Value = Arc<FinSpace>> {
    (1usize..=5, any::<u64>()).prop_map(|(n, seed)| random::space(&mut ChaCha8Rng::seed_from_u64(seed), n))
}

fn kernel_strategy(dom: Arc<FinSpace>, cod: Arc<FinSpace>, zero_one: bool) -> impl Strategy<Value = Kernel> {
    let cols = cod.num_atoms();
    let rows = dom.num_atoms();
    let weights = if zero_one { 0u8..=0 } else { 0u8..=4 };
    prop::collection::vec((prop::collection::vec(weights, cols), 0..cols), rows).prop_map(move |rows| {
        let rows = rows
            .into_iter()
            .map(|(mut w, hot)| {
                w[hot] += 1;
                normalize(w)
            })
            .collect();
        Kernel::new(dom.clone(), cod.clone(), rows).unwrap()
    })
}

fn composable_pair(zero_one: bool) -> impl Strategy<Value = (Kernel, Kernel)> {
    (space_strategy(), space_strategy(), space_strategy()).prop_flat_map(move |(a, b, c)| {
        (kernel_strategy(a, b.clone(), zero_one), kernel_strategy(b, c, zero_one))
    })
}

fn state_and_pair() -> impl Strategy<Value = (Kernel, Kernel, Kernel)> {
    (space_strategy(), space_strategy()).prop_flat_map(|(x, y)| {
        let unit = Arc::new(FinSpace::unit());
        (
            kernel_strategy(unit, x.clone(), false),
            kernel_strategy(x.clone(), y.clone(), false),
            kernel_strategy(x, y, false),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn operations_keep_rows_stochastic((f, g) in composable_pair(false)) {
        let gf = compose(&g, &f).unwrap();
        prop_assert!(Kernel::new(gf.dom().clone(), gf.cod().clone(), gf.rows().to_vec()).is_ok());
        let t = tensor(&f, &g);
        prop_assert!(Kernel::new(t.dom().clone(), t.cod().clone(), t.rows().to_vec()).is_ok());
    }

    #[test]
    fn determinism_is_closed((f, g) in composable_pair(true)) {
        prop_assert!(is_deterministic(&f) && is_deterministic(&g));
        prop_assert!(is_deterministic(&compose(&g, &f).unwrap()));
        prop_assert!(is_deterministic(&tensor(&f, &g)));
    }

    #[test]
    fn associator_is_natural((f, g) in composable_pair(false), h_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(h_seed);
        let z = random::space(&mut rng, 2);
        let h = random::kernel(&mut rng, &z, &z);
        let before = Kernel::associator(f.dom(), g.dom(), h.dom());
        let after = Kernel::associator(f.cod(), g.cod(), h.cod());
        let lhs = compose(&after, &tensor(&tensor(&f, &g), &h)).unwrap();
        let rhs = compose(&tensor(&f, &tensor(&g, &h)), &before).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn almost_sure_equality_is_an_equivalence((p, f, g) in state_and_pair()) {
        prop_assert!(as_equal(&p, &f, &f).unwrap());
        let fg = as_equal(&p, &f, &g).unwrap();
        prop_assert_eq!(fg, as_equal(&p, &g, &f).unwrap());
        // Transitivity through a kernel glued from f on the support and g elsewhere.
        let support = p.support();
        let rows = (0..f.rows().len())
            .map(|x| if support.contains(&x) { f.row(x).to_vec() } else { g.row(x).to_vec() })
            .collect();
        let h = Kernel::new(f.dom().clone(), f.cod().clone(), rows).unwrap();
        prop_assert!(as_equal(&p, &f, &h).unwrap());
        prop_assert_eq!(as_equal(&p, &h, &g).unwrap(), fg);
        if fg {
            prop_assert_eq!(compose(&f, &p).unwrap(), compose(&g, &p).unwrap());
        }
    }

    #[test]
    fn positivity_holds((p, f, _g) in state_and_pair()) {
        prop_assert!(positivity_instance(&f, &p).unwrap());
    }

    #[test]
    fn indistinguishability_quotient_is_an_iso(x in space_strategy()) {
        let (q, to, back) = indistinguishability_quotient(&x);
        prop_assert!(is_deterministic(&to) && is_deterministic(&back));
        prop_assert_eq!(compose(&back, &to).unwrap(), Kernel::identity(&x));
        prop_assert_eq!(compose(&to, &back).unwrap(), Kernel::identity(&q));
    }

    #[test]
    fn kernel_json_round_trip((f, _g) in composable_pair(false)) {
        let text = io::to_canonical_string(&io::kernel_to_json(&f));
        let parsed = io::kernel_from_json(&io::parse_json(&text, "k").unwrap(), None, None, "k").unwrap();
        prop_assert_eq!(&parsed, &f);
        prop_assert_eq!(io::to_canonical_string(&io::kernel_to_json(&parsed)), text);
    }

    #[test]
    fn system_json_round_trip(seed in any::<u64>(), n in 1usize..8) {
        let sys = random::stochastic_system(&mut ChaCha8Rng::seed_from_u64(seed), n, 2);
        let text = io::to_canonical_string(&io::system_to_json(&sys));
        let parsed = io::system_from_json(&io::parse_json(&text, "s").unwrap()).unwrap();
        prop_assert_eq!(io::to_canonical_string(&io::system_to_json(&parsed)), text);
    }

    #[test]
    fn generators_suffice_for_invariance(
        seed in any::<u64>(),
        n in 1usize..10,
        weights in prop::collection::vec(0u8..4, 10),
        word in prop::collection::vec(0usize..3, 1..8),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random::permutation_system(&mut rng, n, 3);
        let ergodic = enumerate_ergodic(&sys).unwrap();
        let weights = normalize(weights[..ergodic.len()].to_vec());
        let mut probs = vec![rational::zero(); sys.space().num_atoms()];
        for (w, s) in weights.iter().zip(&ergodic) {
            for (acc, v) in probs.iter_mut().zip(s.probs()) {
                *acc += w * v;
            }
        }
        let p = Kernel::state(sys.space().clone(), probs).unwrap();
        prop_assert!(is_left_invariant(&p, &sys).unwrap());
        let mut composite = Kernel::identity(sys.space());
        for &g in &word {
            composite = compose(&sys.generators()[g].1, &composite).unwrap();
        }
        prop_assert_eq!(compose(&composite, &p).unwrap(), p);
    }
}

#[test]
fn product_is_unital_and_associative_up_to_reindexing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let x = random::space(&mut rng, 3);
        let y = random::space(&mut rng, 3);
        let z = random::space(&mut rng, 2);
        let alpha = Kernel::associator(&x, &y, &z);
        assert!(is_deterministic(&alpha));
        let xy_z = Arc::new(product(&Arc::new(product(&x, &y)), &z));
        let x_yz = Arc::new(product(&x, &Arc::new(product(&y, &z))));
        assert_eq!(alpha.dom(), &xy_z);
        assert_eq!(alpha.cod(), &x_yz);
        assert_eq!(xy_z.num_atoms(), x_yz.num_atoms());
        let lu = Kernel::left_unitor(&x);
        let ru = Kernel::right_unitor(&x);
        assert!(is_deterministic(&lu) && is_deterministic(&ru));
        assert_eq!(lu.rows(), Kernel::identity(&x).rows());
        assert_eq!(ru.rows(), Kernel::identity(&x).rows());
    }
}
