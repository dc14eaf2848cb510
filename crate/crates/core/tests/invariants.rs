use proptest::prelude::*;

use weakwave::fronts2d::{ray_trace, FrontCurve, FrontSystem2D, RhoForm, Window};
use weakwave::kernels::{KernelPair, Mollifier, Orientation};
use weakwave::reference::{godunov_solve, PiecewiseInitialData, ReferenceSolution};
use weakwave::weak_calculus::fit_order;

const STEPS: [&str; 3] = ["erf", "tanh", "smoothstep"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transfer_functions_sum_to_one(
        l in 0usize..3,
        r in 0usize..3,
        width in 0.5f64..2.0,
        rho in -30.0f64..30.0,
        section1 in any::<bool>(),
    ) {
        let orientation = if section1 { Orientation::Section1 } else { Orientation::Section2a };
        let p = KernelPair::new(
            Mollifier::from_name(STEPS[l], 0.0, width).unwrap(),
            Mollifier::from_name(STEPS[r], 0.0, 1.0).unwrap(),
            orientation,
        );
        let (b1, b2) = p.transfer_functions(rho).unwrap();
        prop_assert!((b1 + b2 - 1.0).abs() < 1e-10);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&b1));
    }

    #[test]
    fn godunov_conserves_mass(
        u0 in 0.0f64..1.0,
        u1 in 0.0f64..1.0,
        u2 in 0.0f64..1.0,
        gap in 0.2f64..2.0,
    ) {
        let data = PiecewiseInitialData::two_steps(u0, u1, u2, 0.0, -gap).unwrap();
        let g = godunov_solve(&data, (-3.0, 3.0), 0.5, 200, 0.8).unwrap();
        prop_assert!(g.max_conservation_defect < 1e-12);
    }

    #[test]
    fn exact_solution_obeys_the_maximum_principle(
        ul in -1.0f64..1.0,
        ur in -1.0f64..1.0,
        t in 0.0f64..2.0,
        x in -3.0f64..3.0,
    ) {
        let data = PiecewiseInitialData::riemann(ul, ur, 0.0).unwrap();
        let u = ReferenceSolution::new(&data).unwrap().eval(x, t);
        prop_assert!(u >= ul.min(ur) - 1e-14 && u <= ul.max(ur) + 1e-14);
    }

    #[test]
    fn planar_rays_merge_at_the_1d_time(
        offset in 0.3f64..2.0,
        u0 in 0.0f64..1.0,
        u1 in 0.1f64..1.0,
        u2 in 0.0f64..1.0,
    ) {
        let sys = FrontSystem2D {
            a: [2.0, 1.0],
            gamma1: FrontCurve::planar([offset, 0.0], [1.0, 0.0]).unwrap(),
            gamma2: FrontCurve::planar([0.0, 0.0], [1.0, 0.0]).unwrap(),
            u0,
            u1,
            u2,
            epsilon: 0.05,
            kernel: KernelPair::symmetric(Mollifier::erf_step()),
            window: Window::new((-3.0, 20.0), (-5.0, 20.0)).unwrap(),
            s_range: (-1.0, 1.0),
            rho_form: RhoForm::Derived,
        };
        let trace = ray_trace(&sys, 4).unwrap();
        prop_assert_eq!(trace.rays.len(), 4);
        // separation along the ray projected onto x₁, travelled at (u1 + u2)|A|
        let along_x1 = offset / sys.direction()[0];
        let expect = along_x1 / (sys.speed() * (u1 + u2));
        for r in &trace.rays {
            prop_assert!((r.merge_time() - expect).abs() < 1e-12 * (1.0 + expect));
        }
    }

    #[test]
    fn fitted_order_recovers_power_laws(c in 0.1f64..10.0, p in 0.5f64..4.0) {
        let eps: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
        let res: Vec<f64> = eps.iter().map(|e| c * e.powf(p)).collect();
        prop_assert!((fit_order(&eps, &res) - p).abs() < 1e-10);
    }
}
