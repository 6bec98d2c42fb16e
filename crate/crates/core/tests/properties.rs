use num_complex::Complex64;
use proptest::prelude::*;
use twophoton::analytic::{longpulse_g2, rect_two_photon_out};
use twophoton::correlations::{correlation_slice, g2_slice, second_order_correlation};
use twophoton::kernels::{eval_abs_kernel, eval_nonlin_kernel};
use twophoton::oracle::{evolve_one_photon, evolve_two_photon, OracleSetup};
use twophoton::propagate::{apply_one_photon, apply_two_photon, decompose_processes};
use twophoton::{norm1, norm2, Grid, LabState1, LabState2, Params, Psi1, Psi2};

fn unit() -> Params {
    Params::default()
}

fn max_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_ignore_global_phase(phase in 0.0..std::f64::consts::TAU, c in -2.0..2.0f64, w in 0.3..2.0f64) {
        let g = Grid::uniform(-10.0, 10.0, 401).unwrap();
        let psi = Psi1::gaussian(c, w, g).unwrap();
        let rot = Complex64::from_polar(1.0, phase);
        let n = norm1(&psi);
        prop_assert!((norm1(&psi.scaled(rot)) - n).abs() <= 1e-15 * n);
        let two = Psi2::product(&psi);
        let n2 = norm2(&two);
        let scaled = Psi2::symmetrized(two.grid().clone(), two.scaled(rot).amp().to_vec()).unwrap();
        let plain = Psi2::symmetrized(two.grid().clone(), two.amp().to_vec()).unwrap();
        prop_assert!((norm2(&scaled) - norm2(&plain)).abs() <= 1e-14 * n2);
    }

    #[test]
    fn aligned_breakpoints_are_exact_nodes(l in 0.5..50.0f64, num in 1u32..40, den in 1u32..8, n in 16usize..400) {
        // Breakpoints can only be aligned when they are commensurate with the range.
        let lo = -l * num as f64 / den as f64;
        let g = Grid::aligned(lo, l, n, &[0.0, l]).unwrap();
        let i0 = g.node_index(0.0).unwrap();
        prop_assert_eq!(g.x(i0), 0.0);
        prop_assert_eq!(g.x(g.len() - 1), l);
    }

    #[test]
    fn kernel_invariances(x1 in -40.0..40.0f64, x2 in -40.0..40.0f64, y1 in -40.0..40.0f64,
                          y2 in -40.0..40.0f64, s in -40.0..40.0f64) {
        let p = unit();
        let k = eval_nonlin_kernel(x1, x2, y1, y2, &p).unwrap();
        prop_assert_eq!(k, eval_nonlin_kernel(x2, x1, y1, y2, &p).unwrap());
        prop_assert_eq!(k, eval_nonlin_kernel(x1, x2, y2, y1, &p).unwrap());
        prop_assert!(k <= 0.0);
        let a = eval_abs_kernel(x1, y1, &p).unwrap();
        prop_assert!(a <= 0.0);
        prop_assume!((x1.max(x2) - y1.min(y2)).abs() > 1e-9 && (x1 - y1).abs() > 1e-9);
        let kt = eval_nonlin_kernel(x1 + s, x2 + s, y1 + s, y2 + s, &p).unwrap();
        let at = eval_abs_kernel(x1 + s, y1 + s, &p).unwrap();
        prop_assert!((k - kt).abs() <= 1e-13 * k.abs());
        prop_assert!((a - at).abs() <= 1e-13 * a.abs());
    }

    #[test]
    fn propagation_is_linear(re in -3.0..3.0f64, im in -3.0..3.0f64, c in -2.0..2.0f64) {
        let p = unit();
        let g = Grid::uniform(-12.0, 6.0, 181).unwrap();
        let psi = Psi1::gaussian(c, 0.8, g.clone()).unwrap();
        let alpha = Complex64::new(re, im);
        prop_assume!(alpha.norm() > 1e-3);
        let base = apply_one_photon(&psi, &g, &p).unwrap().psi;
        let scaled = apply_one_photon(&psi.scaled(alpha), &g, &p).unwrap().psi;
        let want: Vec<_> = base.amp().iter().map(|v| v * alpha).collect();
        prop_assert!(max_rel(scaled.amp(), &want) <= 1e-14);

        let two = Psi2::symmetrized(g.clone(), Psi2::product(&psi).amp().to_vec()).unwrap();
        let out = apply_two_photon(&two, &g, &p).unwrap().total;
        let out_s = apply_two_photon(&two.scaled(alpha), &g, &p).unwrap().total;
        let want2: Vec<_> = out.amp().iter().map(|v| v * alpha).collect();
        prop_assert!(max_rel(out_s.amp(), &want2) <= 1e-14);
    }

    #[test]
    fn outputs_symmetric_and_causal(quarters in 2u32..32, c in -3.0..0.0f64, w in 0.3..1.0f64) {
        let p = unit();
        let l = quarters as f64 * 0.25;
        let g = Grid::aligned(-8.0, l + 1.0, 121, &[0.0, l]).unwrap();
        let rect = Psi1::rectangular(l, g.clone()).unwrap();
        let out = apply_two_photon(&Psi2::product(&rect), &g, &p).unwrap();
        let pr = decompose_processes(&Psi2::product(&rect), &g, &p).unwrap();
        for w2 in [&out.total, &out.linear, &out.nonlinear, &pr.p_i, &pr.p_ii, &pr.p_iii] {
            prop_assert_eq!(w2.max_asymmetry(), 0.0);
        }
        let one = apply_one_photon(&rect, &g, &p).unwrap().psi;
        let n = g.len();
        for i in (0..n).filter(|&i| g.x(i) > l) {
            prop_assert_eq!(one.amp()[i].norm(), 0.0);
            for j in 0..n {
                prop_assert_eq!(out.total.get(i, j).norm(), 0.0);
            }
        }
        let gauss = Psi1::gaussian(c, w, Grid::uniform(-8.0, 2.0, 101).unwrap()).unwrap();
        let general = Psi2::symmetrized(gauss.grid().clone(), Psi2::product(&gauss).amp().to_vec()).unwrap();
        let out_g = apply_two_photon(&general, gauss.grid(), &p).unwrap();
        prop_assert_eq!(out_g.total.max_asymmetry(), 0.0);
    }

    #[test]
    fn correlation_is_nonnegative(x in 1.0..19.0f64, tau in -1.0..1.0f64) {
        let p = unit();
        let g = Grid::aligned(-2.0, 20.0, 221, &[0.0, 20.0]).unwrap();
        let psi = Psi2::from_fn(g, |a, b| rect_two_photon_out(a, b, 20.0, &p).unwrap()).unwrap();
        prop_assert!(second_order_correlation(&psi, x, tau, &p).unwrap() >= 0.0);
        let c = correlation_slice(&psi, x, (-0.5, 0.5), 11, None, &p).unwrap();
        prop_assert!(c.values.iter().all(|&v| v >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn oracle_is_causal_and_symmetric(l in 0.5..2.0f64, stop in 0.1..4.0f64) {
        let p = unit();
        let dx = 0.05;
        let s = OracleSetup::for_support(0.0, l, dx, &p).unwrap();
        let amp = 1.0 / l.sqrt();
        let st = LabState1::from_moving_frame(s.grid.clone(), s.t_initial, &p, |x| {
            Complex64::new(if (0.0..=l).contains(&x) { amp } else { 0.0 }, 0.0)
        });
        let t_final = s.t_initial + stop * (s.t_final - s.t_initial) / 4.0;
        let out = evolve_one_photon(&st, dx, t_final, &p).unwrap();
        // Leading edge of the input at t_initial sits at r = -5 (one cell of slack for rounding).
        let front = -5.0 + p.c() * (out.t - s.t_initial) + dx;
        for (i, &r) in out.grid().points().iter().enumerate() {
            if r > front {
                prop_assert_eq!(out.field()[i].norm(), 0.0);
            }
        }
        let st2 = LabState2::from_moving_frame(s.grid, s.t_initial, &p, |a, b| {
            let inside = |x: f64| (0.0..=l).contains(&x);
            Complex64::new(if inside(a) && inside(b) { amp * amp } else { 0.0 }, 0.0)
        });
        let out2 = evolve_two_photon(&st2, dx, t_final, &p).unwrap();
        prop_assert_eq!(out2.max_asymmetry(), 0.0);
    }
}

#[test]
fn propagated_g2_tracks_long_pulse_form() {
    let p = unit();
    let l = 40.0;
    let psi = Psi1::rectangular(l, Grid::aligned(-10.0, 40.0, 51, &[0.0, l]).unwrap()).unwrap();
    let g = Grid::uniform(10.0, 30.0, 2001).unwrap();
    let out = apply_two_photon(&Psi2::product(&psi), &g, &p).unwrap().total;
    let curve = g2_slice(&out, 20.0, (-8.0, 8.0), 1601, l, &p).unwrap();
    let worst = curve
        .tau
        .iter()
        .zip(&curve.values)
        .map(|(&t, &v)| (v - longpulse_g2(t, &p)).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 2e-3, "{worst}");
}

#[test]
fn output_norm_matches_input_norm() {
    let p = unit();
    let g = Grid::aligned(-20.0, 5.0, 2501, &[0.0, 5.0]).unwrap();
    let psi = Psi1::rectangular(5.0, g.clone()).unwrap();
    let out = apply_one_photon(&psi, &g, &p).unwrap().psi;
    assert!((norm1(&out) - 1.0).abs() <= 1e-8, "{}", norm1(&out));
    let two = apply_two_photon(&Psi2::product(&psi), &g, &p).unwrap().total;
    assert!((norm2(&two) - 1.0).abs() <= 1e-4);
}
