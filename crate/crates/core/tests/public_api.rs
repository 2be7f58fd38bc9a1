use ebm_core::numerics::expm;
use ebm_core::{
    assemble, build_prony, char_poly_ell, cluster_roots, compute_spectrum, invert_known_c, solve_mode, ClusterData,
    ClusterSpectrum, EbmModel, Element, ModeKind,
};
use proptest::prelude::*;

fn element() -> impl Strategy<Value = Element> {
    (0.1f64..10.0, 0.1f64..10.0, 0.1f64..10.0).prop_map(|(l, m, e)| Element::new(l, m, e))
}

fn model(max_units: usize) -> impl Strategy<Value = EbmModel> {
    (prop::collection::vec(element(), 1..=max_units + 1), 0.5f64..2.0).prop_map(|(els, r)| EbmModel::new(r, els))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kernel_equals_matrix_exponential(m in model(4), t in 0.0f64..5.0) {
        let s = compute_spectrum(&m).unwrap();
        let shear = assemble(&m, ModeKind::Shear).unwrap().matrix;
        let bulk = assemble(&m, ModeKind::Bulk).unwrap().matrix;
        prop_assert!((s.g00(t) - expm(&shear, t)[(0, 0)]).abs() < 1e-10);
        prop_assert!((s.g00_bulk(t) - expm(&bulk, t)[(0, 0)]).abs() < 1e-10);
    }

    #[test]
    fn model_json_round_trips(m in model(5)) {
        let text = m.to_json();
        prop_assert_eq!(EbmModel::from_json(&text).unwrap(), m);
    }

    #[test]
    fn scaling_moduli_scales_rates(m in model(3), s in 0.2f64..5.0) {
        let a = compute_spectrum(&m).unwrap();
        let b = compute_spectrum(&m.scale_moduli(s)).unwrap();
        for (x, y) in a.shear.iter().zip(&b.shear).chain(a.bulk.iter().zip(&b.bulk)) {
            prop_assert!((y.rate - s * x.rate).abs() <= 1e-11 * y.rate);
            prop_assert!((y.weight - x.weight).abs() <= 1e-10);
        }
    }

    #[test]
    fn clusters_vanish_on_their_roots_and_round_trip(m in model(3), ell in 1usize..6) {
        let s = compute_spectrum(&m).unwrap();
        let Ok(p) = build_prony(&m, &s) else { return Ok(()) };
        let mode = solve_mode(s.lambda0, s.mu0, m.radius, ell).unwrap();
        let Ok(cl) = cluster_roots(&p, &mode) else { return Ok(()) };
        prop_assert_eq!(cl.all_roots().len(), 2 * m.n + 4);
        let poly = char_poly_ell(&p, mode.c());
        for z in cl.all_roots() {
            let scale = poly.abs_eval(z.norm().max(p.beta[0]));
            prop_assert!(poly.eval_complex(z).norm() < 1e-12 * scale);
        }
        let text = cl.to_json();
        prop_assert_eq!(ClusterSpectrum::from_json(&text).unwrap(), cl);
    }
}

#[test]
fn inversion_of_a_hand_built_pair() {
    let m = EbmModel::new(1.0, vec![Element::new(5.0, 0.5, 1.0), Element::new(4.0, 0.3, 2.0)]);
    let s = compute_spectrum(&m).unwrap();
    let p = build_prony(&m, &s).unwrap();
    let clusters: Vec<ClusterData> = [1, 2]
        .iter()
        .map(|&ell| ClusterData::from(&cluster_roots(&p, &solve_mode(s.lambda0, s.mu0, 1.0, ell).unwrap()).unwrap()))
        .collect();
    let r = invert_known_c(&clusters[0], &clusters[1]).unwrap();
    assert_eq!(r.n, 1);
    assert!((r.mu0 - 0.5).abs() < 1e-8 && (r.lambda0 - 5.0).abs() < 1e-7);
    for (a, b) in r.beta.iter().zip(&p.beta) {
        assert!((a - b).abs() < 1e-8 * b);
    }
}
