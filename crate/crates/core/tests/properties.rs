use proptest::prelude::*;

use casimir_lab::cli::sweep::{compute_rows, Observable, Row, SweepSpec};
use casimir_lab::minkowski::{validate_cutoff, Boost, CutoffConfig, MinkVec3};
use casimir_lab::plates::closed::stress_closed;
use casimir_lab::plates::printed::{stress_printed_full, stress_printed_subtracted};
use casimir_lab::plates::PlateGeometry;
use casimir_lab::report::rel_diff;
use casimir_lab::sphere::{delta_e_closed_derived, delta_e_closed_printed, SphereConfig};

fn config() -> impl Strategy<Value = (f64, CutoffConfig)> {
    (0.3f64..3.0, 0.005f64..1.0, 0.0f64..0.95, 0.0f64..1.5, 0.0f64..std::f64::consts::TAU).prop_map(
        |(a, sb, r, eta, th)| {
            let c = CutoffConfig::rest(sb * a, r).unwrap().boosted(&Boost::new(eta, [th.cos(), th.sin()]).unwrap()).unwrap();
            (a, c)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_and_printed_are_traceless_and_symmetric((a, c) in config()) {
        let g = PlateGeometry::new(a).unwrap();
        for t in [
            stress_closed(&g, &c, false).unwrap(),
            stress_closed(&g, &c, true).unwrap(),
            stress_printed_full(&g, &c).unwrap(),
            stress_printed_subtracted(&g, &c).unwrap(),
        ] {
            prop_assert!(t.is_symmetric());
            prop_assert!(t.trace().abs() <= 1e-10 * t.max_abs());
        }
    }

    #[test]
    fn closed_tensor_is_boost_covariant((a, c) in config(), eta in -1.0f64..1.0, th in 0.0f64..std::f64::consts::TAU) {
        let g = PlateGeometry::new(a).unwrap();
        let b = Boost::new(eta, [th.cos(), th.sin()]).unwrap();
        let lhs = stress_closed(&g, &c, true).unwrap().transformed(&b);
        let rhs = stress_closed(&g, &c.boosted(&b).unwrap(), true).unwrap();
        prop_assert!(lhs.max_rel_deviation(&rhs) <= 1e-8);
    }

    #[test]
    fn validation_accepts_exactly_the_domain(t in -2.0f64..2.0, x in -2.0f64..2.0, y in -2.0f64..2.0, s in -0.5f64..2.0) {
        let inner = -t * t + x * x + y * y;
        let ok = inner < 0.0 && t > 0.0 && s >= 0.0 && s < (-inner).sqrt();
        let res = validate_cutoff(MinkVec3::new(t, x, y), s);
        // the boundary itself is measure zero; skip points within rounding of it
        let sb = (-inner).max(0.0).sqrt();
        prop_assume!((s - sb).abs() > 1e-12 && inner.abs() > 1e-12);
        prop_assert_eq!(res.is_ok(), ok);
        if let Ok(c) = res {
            prop_assert!((c.sigma_bar() - sb).abs() <= 1e-12 * sb.max(1.0));
            prop_assert!(c.ratio() >= 0.0 && c.ratio() < 1.0);
        }
    }

    #[test]
    fn sphere_closed_forms_differ_by_one_over_sigma(a in 0.1f64..10.0, sigma in 1e-3f64..1.0, r in 1e-3f64..100.0) {
        let c = SphereConfig::new(a, sigma, r * sigma).unwrap();
        let ratio = delta_e_closed_printed(&c) / delta_e_closed_derived(&c);
        prop_assert!(rel_diff(ratio, 1.0 / sigma) <= 1e-12);
    }

    #[test]
    fn rel_diff_is_symmetric_and_bounded(x in -1e6f64..1e6, y in -1e6f64..1e6) {
        prop_assert_eq!(rel_diff(x, y), rel_diff(y, x));
        prop_assert!(rel_diff(x, y) <= 2.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn csv_floats_round_trip(sb in 0.001f64..1.0, r in 0.0f64..0.9, eta in 0.0f64..1.0) {
        let mut spec = SweepSpec::new(Observable::Pressure);
        spec.plates.sigma_bar = vec![sb];
        spec.plates.ratio = vec![r];
        spec.plates.rapidity = vec![eta];
        let (rows, _) = compute_rows(&spec).unwrap();
        let mut buf = Vec::new();
        casimir_lab::cli::sweep::write_rows(&rows, false, &mut buf, casimir_lab::cli::sweep::Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for (line, row) in text.lines().skip(1).zip(&rows) {
            let Row::Plate(p) = row else { unreachable!() };
            let f: Vec<&str> = line.split(',').collect();
            prop_assert_eq!(f[6].parse::<f64>().unwrap(), p.sigma_bar);
            prop_assert_eq!(f[8].parse::<f64>().unwrap(), r);
            prop_assert_eq!(f[10].parse::<f64>().unwrap(), p.value);
        }
    }
}
