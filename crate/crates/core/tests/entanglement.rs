use approx::assert_abs_diff_eq;
use phipsim::analysis::{
    concurrence, effective_conditions, eof, eof_from_concurrence, min_pt_eigenvalue, partial_transpose,
    singlet_mixture_state, spin_polarization, werner_state, EntanglementReport,
};
use phipsim::linalg::hermitian_eigen;
use phipsim::random::{random_pure_state, random_state, seeded};
use phipsim::state::{make_singlet, NamedState};
use phipsim::{BellPopulations, SpinSystemParams};
use proptest::prelude::*;

#[test]
fn ppt_and_concurrence_agree_on_random_states() {
    let mut rng = seeded(1000);
    let mut entangled = 0;
    for k in 0..1000 {
        let rho = if k % 4 == 0 { random_pure_state(&mut rng) } else { random_state(&mut rng) };
        let c = concurrence(&rho);
        let m = min_pt_eigenvalue(&rho);
        assert_eq!(c > 1e-8, m < -1e-8, "state {k}: C = {c}, min PT eigenvalue = {m}");
        entangled += usize::from(c > 1e-8);
    }
    // both verdicts must actually occur for the check to mean anything
    assert!(entangled > 100 && entangled < 900, "{entangled}");
}

#[test]
fn werner_family_closed_forms() {
    for k in 0..=100 {
        let eps = k as f64 / 100.0;
        let rho = werner_state(eps).unwrap();
        assert_abs_diff_eq!(concurrence(&rho), ((3.0 * eps - 1.0) / 2.0).max(0.0), epsilon = 1e-10);
        let (vals, _) = hermitian_eigen(&partial_transpose(rho.matrix()));
        let mut got: Vec<f64> = vals.iter().copied().collect();
        got.sort_by(f64::total_cmp);
        let mut want = vec![(1.0 - 3.0 * eps) / 4.0, (1.0 + eps) / 4.0, (1.0 + eps) / 4.0, (1.0 + eps) / 4.0];
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-12);
        }
    }
}

#[test]
fn eof_is_monotone_in_concurrence() {
    let mut prev = -1.0;
    for k in 0..1000 {
        let e = eof_from_concurrence(k as f64 / 999.0);
        assert!(e >= prev, "E_F decreased at step {k}");
        prev = e;
    }
    assert_eq!(eof_from_concurrence(0.0), 0.0);
    assert_abs_diff_eq!(eof_from_concurrence(1.0), 1.0, epsilon = 1e-15);
}

#[test]
fn singlet_triplet_diagonal_concurrence_matches_x_state_formula() {
    // in the Zeeman basis these are X states: |00⟩, |11⟩ carry pT−1, pT+1 and
    // the |01⟩,|10⟩ block has coherence (pT0 − pS)/2
    let mut rng = seeded(8);
    for _ in 0..500 {
        let w: [f64; 4] = std::array::from_fn(|_| rand::Rng::random_range(&mut rng, 0.0..1.0));
        let s: f64 = w.iter().sum();
        let p = w.map(|x| x / s);
        let rho = BellPopulations::new(p[0], p[1], p[2], p[3]).to_state().unwrap();
        let want = 2.0 * ((p[1] - p[0]).abs() / 2.0 - (p[2] * p[3]).sqrt()).max(0.0);
        assert_abs_diff_eq!(concurrence(&rho), want, epsilon = 1e-9);
    }
}

#[test]
fn report_for_named_states() {
    let r = EntanglementReport::from_state(&make_singlet());
    assert!(r.entangled);
    assert_abs_diff_eq!(r.eof, 1.0, epsilon = 1e-9);
    for (got, want) in r.bell.as_array().iter().zip([1.0, 0.0, 0.0, 0.0]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
    }
    for s in [NamedState::TPlus, NamedState::TMinus, NamedState::ZeemanGround, NamedState::MaximallyMixed] {
        let r = EntanglementReport::from_state(&s.state());
        assert!(!r.entangled, "{s}");
        assert!(r.concurrence < 1e-6, "{s}");
    }
}

#[test]
fn report_json_keys() {
    let r = EntanglementReport::from_state(&make_singlet());
    let v: serde_json::Value = serde_json::to_value(r).unwrap();
    for key in ["min_pt_eigenvalue", "entangled", "concurrence", "eof", "bell"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["bell"].as_array().unwrap().len(), 4);
}

#[test]
fn singlet_mixture_verdict_depends_on_largest_bell_weight() {
    // Bell-diagonal: the partial transpose has eigenvalues ½ − p_i, so PPT
    // fails exactly when a, (1 − a)x or (1 − a)(1 − x)/2 exceeds ½
    let n = 51;
    for i in 0..n {
        for k in 0..n {
            let a = i as f64 / 50.0;
            let x = k as f64 / 50.0;
            let largest = a.max((1.0 - a) * x).max((1.0 - a) * (1.0 - x) / 2.0);
            let m = min_pt_eigenvalue(&singlet_mixture_state(a, x).unwrap());
            assert_abs_diff_eq!(m, 0.5 - largest, epsilon = 1e-10);
        }
    }
}

#[test]
fn effective_conditions_invert_the_forward_map() {
    let base = SpinSystemParams::default();
    for nu in [1e8, 4e8, 9e8] {
        for temp in [0.01, 1.0, 77.0, 295.0] {
            let p = SpinSystemParams { nu_hz: nu, temp_k: temp, ..base };
            let eps = spin_polarization(nu, temp);
            if !(eps > 0.0 && eps < 1.0) {
                continue;
            }
            let c = effective_conditions(eps, &p).unwrap();
            assert_abs_diff_eq!(c.temp_k_at_field / temp, 1.0, epsilon = 1e-9);
            let nu_back = c.field_t_at_temp * c.gamma_hz_per_t;
            assert_abs_diff_eq!(nu_back / nu, 1.0, epsilon = 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn concurrence_and_eof_stay_in_unit_interval(seed in any::<u64>()) {
        let rho = random_state(&mut seeded(seed));
        let c = concurrence(&rho);
        let e = eof(&rho);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
    }

    #[test]
    fn polarization_round_trip(eps in 1e-6f64..0.999_999) {
        let p = SpinSystemParams::default();
        let c = effective_conditions(eps, &p).unwrap();
        let back = spin_polarization(p.nu_hz, c.temp_k_at_field);
        prop_assert!(((back - eps) / eps).abs() < 1e-9);
        let back = spin_polarization(c.field_t_at_temp * c.gamma_hz_per_t, p.temp_k);
        prop_assert!(((back - eps) / eps).abs() < 1e-9);
    }
}
