use std::sync::OnceLock;

use nalgebra::{SVector, Vector3};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use pentapod_core::distance::*;
use pentapod_core::polyalg::{parse_rational, rational_from_decimal_f64, uni_resultant, UniPoly};
use pentapod_core::ratparam::{param_point, stereographic, stereographic_inverse};
use pentapod_core::reference::published_architecture;
use pentapod_core::{extract_f, Architecture, Configuration, SingularityModel};
use proptest::prelude::*;

fn model() -> &'static SingularityModel {
    static MODEL: OnceLock<SingularityModel> = OnceLock::new();
    MODEL.get_or_init(|| extract_f(&published_architecture()).unwrap())
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

prop_compose! {
    fn architecture()(base in prop::array::uniform5(prop::array::uniform3(-40i64..40)),
                      offsets in prop::array::uniform5(-40i64..40)) -> Architecture {
        Architecture::new_unchecked(base.map(|b| b.map(|x| q(x) / q(4))), offsets.map(|x| q(x) / q(4)))
    }
}

prop_compose! {
    fn pose(scale: f64)(i in prop::array::uniform3(-1.0..1.0f64), p in prop::array::uniform3(-scale..scale))
        -> Configuration {
        Configuration::new(i, p)
    }
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let v = Vector3::from(v);
    (v.norm() > 1e-3).then(|| v.normalize().into())
}

fn gradient_error(lag: &dyn Lagrangian, z: &[f64]) -> f64 {
    const STEP: f64 = 1e-6;
    let analytic = lag.gradient(z);
    let scale = analytic.amax().max(1.0);
    (0..z.len())
        .map(|k| {
            let (mut zp, mut zm) = (z.to_vec(), z.to_vec());
            zp[k] += STEP;
            zm[k] -= STEP;
            let fd = (lag.value(&zp) - lag.value(&zm)) / (2.0 * STEP);
            (fd - analytic[k]).abs() / scale
        })
        .fold(0.0, f64::max)
}

fn hessian_error(lag: &dyn Lagrangian, z: &[f64]) -> f64 {
    const STEP: f64 = 1e-5;
    let h = lag.hessian(z);
    let scale = h.amax().max(1.0);
    let mut worst = 0.0f64;
    for k in 0..z.len() {
        let (mut zp, mut zm) = (z.to_vec(), z.to_vec());
        zp[k] += STEP;
        zm[k] -= STEP;
        let column = (lag.gradient(&zp) - lag.gradient(&zm)) / (2.0 * STEP);
        for r in 0..z.len() {
            worst = worst.max((column[r] - h[(r, k)]).abs() / scale);
            worst = worst.max((h[(r, k)] - h[(k, r)]).abs() / scale);
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_closed_form_matches_anchor_sum(arch in architecture(), a in pose(8.0), b in pose(8.0)) {
        let closed = metric_d(&arch, &a, &b);
        let direct = metric_d_direct(&arch, &a, &b);
        prop_assert!((closed - direct).abs() <= 1e-12 * direct.max(1.0), "{closed} vs {direct}");
    }

    #[test]
    fn metric_is_the_gram_form(arch in architecture(), a in pose(8.0), b in pose(8.0)) {
        let m = MetricContext::new(&arch);
        let d = SVector::<f64, 6>::from(a.coordinates()) - SVector::<f64, 6>::from(b.coordinates());
        let form = (d.transpose() * m.gram() * d)[(0, 0)];
        prop_assert!((form.max(0.0) - m.distance_squared(&a.coordinates(), &b.coordinates())).abs() <= 1e-10 * form.abs().max(1.0));
        prop_assert_eq!(metric_d(&arch, &a, &b), metric_d(&arch, &b, &a));
    }

    #[test]
    fn gram_is_positive_definite_unless_offsets_agree(arch in architecture()) {
        let m = MetricContext::new(&arch);
        let r = arch.offsets();
        let spread = r.iter().any(|x| (x - r[0]).abs() > 0.0);
        prop_assert_eq!(m.is_positive_definite(), spread);
        let [lo, hi] = m.gram_eigenvalues();
        let eig = m.gram().symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|e| (e - lo).abs() < 1e-9 * hi || (e - hi).abs() < 1e-9 * hi));
        if spread {
            prop_assert!(lo > 0.0);
        }
    }

    #[test]
    fn metric_triangle_inequality(a in pose(5.0), b in pose(5.0), c in pose(5.0)) {
        let arch = published_architecture();
        let (ab, bc, ac) = (metric_d(&arch, &a, &b), metric_d(&arch, &b, &c), metric_d(&arch, &a, &c));
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn lagrangian_gradients_match_central_differences(
        i in prop::array::uniform3(-1.0..1.0f64),
        p in prop::array::uniform3(-5.0..5.0f64),
        gi in prop::array::uniform3(-1.0..1.0f64),
        gp in prop::array::uniform3(-5.0..5.0f64),
        l in prop::array::uniform2(-2.0..2.0f64),
    ) {
        let (Some(i), Some(gi)) = (unit(i), unit(gi)) else { return Ok(()) };
        let m = model();
        let metric = MetricContext::new(&published_architecture());
        let target = [gi[0], gi[1], gi[2], gp[0], gp[1], gp[2]];
        let cases: [(Box<dyn Lagrangian>, Vec<f64>); 4] = [
            (Box::new(FixedOrientationLagrangian { model: m, orientation: i, target: gp }), vec![p[0], p[1], p[2], l[0]]),
            (Box::new(FixedPositionLagrangian { model: m, position: p, target: gi }), vec![i[0], i[1], i[2], l[0], l[1]]),
            (Box::new(MetricLagrangian { model: m, metric, target, equiform: false }), vec![i[0], i[1], i[2], p[0], p[1], p[2], l[0], l[1]]),
            (Box::new(MetricLagrangian { model: m, metric, target, equiform: true }), vec![i[0], i[1], i[2], p[0], p[1], p[2], l[1]]),
        ];
        for (lag, z) in &cases {
            prop_assert_eq!(lag.dim(), z.len());
            let g = gradient_error(lag.as_ref(), z);
            prop_assert!(g < 1e-6, "gradient error {g:e}");
            let h = hessian_error(lag.as_ref(), z);
            prop_assert!(h < 1e-6, "hessian error {h:e}");
        }
    }

    #[test]
    fn parametrized_poses_lie_on_the_variety(t in prop::array::uniform4(-3.0..3.0f64)) {
        if let Ok(pt) = param_point(model(), &t) {
            prop_assert!((pt.xi.orientation_norm() - 1.0).abs() < 1e-12);
            prop_assert!(model().normalized_value(&pt.xi.coordinates()) < 1e-9);
        }
    }

    #[test]
    fn stereographic_chart_is_exact(n3 in -50i64..50, n4 in -50i64..50, d in 1i64..20) {
        let (t3, t4) = (q(n3) / q(d), q(n4) / q(d));
        let x = stereographic(&t3, &t4);
        let norm2 = x.iter().fold(BigRational::zero(), |acc, v| acc + v * v);
        prop_assert!(norm2.is_one());
        prop_assert_eq!(stereographic_inverse(&x).unwrap(), (t3, t4));
    }

    #[test]
    fn exact_division_recovers_factors(a in prop::collection::vec(-9i64..9, 1..6), b in prop::collection::vec(-9i64..9, 1..5)) {
        let pa = UniPoly::new("x", a.iter().map(|c| q(*c)).collect());
        let pb = UniPoly::new("x", b.iter().map(|c| q(*c)).collect());
        prop_assume!(!pb.is_zero());
        let (quot, rem) = (&pa * &pb).div_rem(&pb).unwrap();
        prop_assert!(rem.is_zero());
        prop_assert_eq!(quot, pa);
    }

    #[test]
    fn common_root_annihilates_resultant(root in -9i64..9, a in prop::collection::vec(-9i64..9, 1..4), b in prop::collection::vec(-9i64..9, 1..4)) {
        let factor = UniPoly::linear_factor("x", q(root));
        let pa = UniPoly::new("x", a.iter().map(|c| q(*c)).collect());
        let pb = UniPoly::new("x", b.iter().map(|c| q(*c)).collect());
        prop_assume!(!pa.is_zero() && !pb.is_zero());
        prop_assert!(uni_resultant(&(&factor * &pa), &(&factor * &pb)).unwrap().is_zero());
    }

    #[test]
    fn rational_text_round_trips(n in -100_000i64..100_000, d in 1i64..10_000) {
        let v = q(n) / q(d);
        prop_assert_eq!(parse_rational(&format!("{}/{}", v.numer(), v.denom())).unwrap(), v);
        let x = n as f64 / 1000.0;
        prop_assert_eq!(rational_from_decimal_f64(x), q(n) / q(1000));
    }
}
