//! Broadcast and multiple-access region evaluators: degradedness checks,
//! reductions to classical regions, the binary broadcast example against its
//! closed forms, the double-usage fixture, and the trade-off functions against
//! grid oracles.

use approx::assert_abs_diff_eq;
use ndarray::{ArrayD, IxDyn};
use rand::Rng;

use cdtrade_core::bc::{
    bc_outer, bc_region_sequential, bc_region_simultaneous, bc_sampled_region, binary_bc_example,
    binary_bc_scenario, binary_bc_vars, c_md, check_degraded, BCScenario, BCVars, Degradedness,
};
use cdtrade_core::mac::{
    c_mu, cooperative_p2p, double_usage_example, mac_build_joint, mac_inner_bounds,
    mac_outer_sum, mac_sampled_region, MACVars,
};
use cdtrade_core::opt::SolverOptions;
use cdtrade_core::prob::{
    binary_entropy, build_joint_mac, Axis, DetMap, DistortionFn, FiniteDist, JointTable, Kernel,
};
use cdtrade_core::sampling::{
    random_bc_scenario, random_bc_vars, random_dist, random_joint, random_kernel,
    random_mac_scenario, random_mac_vars, rng_from_seed, BcSizes, MacSizes,
};

// ---------------------------------------------------------------------------
// Degradedness.

fn simple_bc_scenario(chan: Kernel) -> BCScenario {
    let s = Axis::binary("S");
    let st = Axis::binary("S_T");
    let y1 = chan.outputs()[0].clone();
    let y2 = chan.outputs()[1].clone();
    let pss_t = JointTable::new(
        vec![s.clone(), st],
        ArrayD::from_shape_vec(IxDyn(&[2, 2]), vec![0.3, 0.2, 0.1, 0.4]).unwrap(),
    )
    .unwrap();
    let feedback = DetMap::constant(vec![y1, y2], "Z");
    let d = DistortionFn::hamming(s.labels());
    BCScenario::new(pss_t, chan, feedback, d.clone(), d).unwrap()
}

#[test]
fn deterministic_degraded_channel_is_physical() {
    // Y2 = Y1, both noisy functions of (X, S).
    let mut rng = rng_from_seed(3);
    let inner = random_kernel(
        &mut rng,
        vec![Axis::binary("X"), Axis::binary("S")],
        vec![Axis::binary("Y1")],
    );
    let chan = Kernel::from_fn(
        vec![Axis::binary("X"), Axis::binary("S")],
        vec![Axis::binary("Y1"), Axis::binary("Y2")],
        |i, o| {
            if o[1] == o[0] {
                inner.prob(i[0] * 2 + i[1], o[0])
            } else {
                0.0
            }
        },
    )
    .unwrap();
    let res = check_degraded(&simple_bc_scenario(chan)).unwrap();
    assert!(res.is_physical(), "{res:?}");
}

#[test]
fn bsc_cascade_is_physical_with_crossover_witness() {
    let mut rng = rng_from_seed(5);
    let inner = random_kernel(
        &mut rng,
        vec![Axis::binary("X"), Axis::binary("S")],
        vec![Axis::binary("Y1")],
    );
    let q = 0.17;
    let chan = Kernel::from_fn(
        vec![Axis::binary("X"), Axis::binary("S")],
        vec![Axis::binary("Y1"), Axis::binary("Y2")],
        |i, o| {
            let p1 = inner.prob(i[0] * 2 + i[1], o[0]);
            let flip = if o[1] == o[0] { 1.0 - q } else { q };
            p1 * flip
        },
    )
    .unwrap();
    let res = check_degraded(&simple_bc_scenario(chan)).unwrap();
    match res {
        Degradedness::Physical { witness } => {
            for y1 in 0..2 {
                for y2 in 0..2 {
                    let expected = if y1 == y2 { 1.0 - q } else { q };
                    assert_abs_diff_eq!(witness.prob(y1, y2), expected, epsilon = 1e-9);
                }
            }
        }
        other => panic!("expected physical, got {other:?}"),
    }
}

#[test]
fn statistically_degraded_but_not_physical_detected() {
    // Y1 and Y2 are conditionally independent given (X, S), with Y2 noisier
    // than Y1 by construction: statistically degraded, not physically.
    let p1 = 0.1;
    let p2 = 0.3; // = p1 * q for q ~ 0.2857
    let chan = Kernel::from_fn(
        vec![Axis::binary("X"), Axis::binary("S")],
        vec![Axis::binary("Y1"), Axis::binary("Y2")],
        |i, o| {
            let x = i[0];
            let a = if o[0] == x { 1.0 - p1 } else { p1 };
            let b = if o[1] == x { 1.0 - p2 } else { p2 };
            a * b
        },
    )
    .unwrap();
    let res = check_degraded(&simple_bc_scenario(chan)).unwrap();
    assert!(!res.is_physical(), "independent noise is not physically degraded");
    match res {
        Degradedness::Statistical { witness, residual } => {
            assert!(residual <= 1e-8);
            // The witness must be the BSC with the residual crossover
            // q = (p2 - p1) / (1 - 2 p1).
            let q = (p2 - p1) / (1.0 - 2.0 * p1);
            for y1 in 0..2 {
                for y2 in 0..2 {
                    let expected = if y1 == y2 { 1.0 - q } else { q };
                    assert_abs_diff_eq!(witness.prob(y1, y2), expected, epsilon = 1e-6);
                }
            }
        }
        other => panic!("expected statistical, got {other:?}"),
    }
}

#[test]
fn reversely_degraded_channel_is_rejected() {
    // Y1 is the noisier output: no stochastic matrix can degrade it into Y2.
    let chan = Kernel::from_fn(
        vec![Axis::binary("X"), Axis::binary("S")],
        vec![Axis::binary("Y1"), Axis::binary("Y2")],
        |i, o| {
            let x = i[0];
            let a = if o[0] == x { 0.6 } else { 0.4 };
            let b = if o[1] == x { 0.95 } else { 0.05 };
            a * b
        },
    )
    .unwrap();
    let res = check_degraded(&simple_bc_scenario(chan)).unwrap();
    assert!(matches!(res, Degradedness::NotDegraded { residual } if residual > 1e-6));
}

#[test]
fn discretized_gaussian_bc_is_at_least_statistical() {
    // Midpoint discretization of Y1 = X + S + W1, Y2 = Y1 + W2 loses physical
    // degradedness (bin values hide the fine location) but keeps the
    // statistical property.
    let xs = [-1.0, 1.0];
    let ss = [-0.8, 0.8];
    let n_bins = 7;
    let centers: Vec<f64> = (0..n_bins).map(|i| -3.0 + i as f64 * 1.0).collect();
    let gauss = |y: f64, mean: f64, var: f64| (-(y - mean) * (y - mean) / (2.0 * var)).exp();
    let chan = Kernel::from_fn_normalized(
        vec![Axis::binary("X"), Axis::binary("S")],
        vec![Axis::indexed("Y1", n_bins), Axis::indexed("Y2", n_bins)],
        |i, o| {
            let mean = xs[i[0]] + ss[i[1]];
            // Joint density of (Y1, Y2) = (m + W1, m + W1 + W2).
            let y1 = centers[o[0]];
            let y2 = centers[o[1]];
            gauss(y1, mean, 0.5) * gauss(y2, y1, 0.5)
        },
    )
    .unwrap();
    let res = check_degraded(&simple_bc_scenario(chan)).unwrap();
    assert!(res.is_statistical_or_better(), "{res:?}");
}

#[test]
fn physical_implies_statistical_on_random_cascades() {
    let mut rng = rng_from_seed(11);
    for _ in 0..25 {
        let inner = random_kernel(
            &mut rng,
            vec![Axis::binary("X"), Axis::binary("S")],
            vec![Axis::indexed("Y1", 3)],
        );
        let degrade = random_kernel(&mut rng, vec![Axis::indexed("A", 3)], vec![Axis::binary("Y2")]);
        let chan = Kernel::from_fn(
            vec![Axis::binary("X"), Axis::binary("S")],
            vec![Axis::indexed("Y1", 3), Axis::binary("Y2")],
            |i, o| inner.prob(i[0] * 2 + i[1], o[0]) * degrade.prob(o[0], o[1]),
        )
        .unwrap();
        let res = check_degraded(&simple_bc_scenario(chan)).unwrap();
        assert!(res.is_physical());
        assert!(res.is_statistical_or_better());
    }
}

// ---------------------------------------------------------------------------
// Region reductions and orderings.

fn trivial_bc_vars(scen: &BCScenario, nu: usize, rng: &mut impl Rng) -> BCVars {
    let u = Axis::indexed("U", nu);
    let p_ux = random_joint(rng, vec![u.clone(), scen.input_axis().clone()]);
    let comp = Kernel::from_fn(
        vec![u, scen.input_axis().clone(), scen.sit_axis().clone(), scen.feedback.output().clone()],
        vec![Axis::indexed("V1", 1), Axis::indexed("V2", 1)],
        |_, _| 1.0,
    )
    .unwrap();
    BCVars { p_ux, comp }
}

#[test]
fn trivial_descriptions_reduce_to_classical_degraded_bounds() {
    let mut rng = rng_from_seed(13);
    for _ in 0..20 {
        let scen = random_bc_scenario(&mut rng, BcSizes::default());
        let vars = trivial_bc_vars(&scen, 2, &mut rng);
        let joint = cdtrade_core::bc::bc_build_joint(&scen, &vars).unwrap();
        let sim = bc_region_simultaneous(&scen, &vars).unwrap();
        let i_x_y1_u = joint.cond_mutual_information(&["X"], &["Y1"], &["U"]).unwrap();
        let i_u_y2 = joint.cond_mutual_information(&["U"], &["Y2"], &[]).unwrap();
        assert_abs_diff_eq!(sim.r1_raw, i_x_y1_u, epsilon = 1e-9);
        assert_abs_diff_eq!(sim.r2_raw, i_u_y2, epsilon = 1e-9);
        // Sequential decoding coincides without descriptions.
        let seq = bc_region_sequential(&scen, &vars).unwrap();
        assert_abs_diff_eq!(seq.r1_raw, sim.r1_raw, epsilon = 1e-12);
        assert_abs_diff_eq!(seq.r2_raw, sim.r2_raw, epsilon = 1e-12);
        // Outer bounds without descriptions.
        let out = bc_outer(&scen, &vars).unwrap();
        assert_abs_diff_eq!(out.r1_raw, i_x_y1_u, epsilon = 1e-9);
        assert_abs_diff_eq!(out.r2_raw, i_u_y2, epsilon = 1e-9);
        let i_x_y1 = joint.cond_mutual_information(&["X"], &["Y1"], &[]).unwrap();
        assert_abs_diff_eq!(out.sum_raw, i_x_y1, epsilon = 1e-9);
    }
}

#[test]
fn sequential_never_exceeds_simultaneous_and_r2_never_exceeds_outer() {
    let mut rng = rng_from_seed(17);
    for trial in 0..300 {
        let sizes = BcSizes { nz: if trial % 2 == 0 { 1 } else { 2 }, ..BcSizes::default() };
        let scen = random_bc_scenario(&mut rng, sizes);
        let vars = random_bc_vars(&mut rng, &scen, sizes);
        let sim = bc_region_simultaneous(&scen, &vars).unwrap();
        let seq = bc_region_sequential(&scen, &vars).unwrap();
        let out = bc_outer(&scen, &vars).unwrap();
        assert!(seq.r1_raw <= sim.r1_raw + 1e-9);
        assert!(seq.r2_raw <= sim.r2_raw + 1e-9);
        assert!(sim.r2_raw <= out.r2_raw + 1e-9);
        // Distortions agree between evaluators (same estimators).
        assert_abs_diff_eq!(sim.d1, seq.d1, epsilon = 1e-12);
        assert_abs_diff_eq!(sim.d2, out.d2, epsilon = 1e-12);
    }
}

#[test]
fn region_family_monotone_in_distortion_and_closed_under_mixing() {
    let mut rng = rng_from_seed(19);
    let sizes = BcSizes::default();
    let scen = random_bc_scenario(&mut rng, sizes);
    let bounds: Vec<_> = (0..25)
        .map(|_| {
            let vars = random_bc_vars(&mut rng, &scen, sizes);
            bc_region_simultaneous(&scen, &vars).unwrap()
        })
        .collect();

    let inside = |hull: &[[f64; 2]], p: [f64; 2]| -> bool {
        if hull.len() == 1 {
            return (hull[0][0] - p[0]).abs() < 1e-9 && (hull[0][1] - p[1]).abs() < 1e-9;
        }
        if hull.len() == 2 {
            let cross = (hull[1][0] - hull[0][0]) * (p[1] - hull[0][1])
                - (hull[1][1] - hull[0][1]) * (p[0] - hull[0][0]);
            return cross.abs() < 1e-7;
        }
        (0..hull.len()).all(|i| {
            let j = (i + 1) % hull.len();
            (hull[j][0] - hull[i][0]) * (p[1] - hull[i][1])
                - (hull[j][1] - hull[i][1]) * (p[0] - hull[i][0])
                >= -1e-9
        })
    };

    // Monotonicity: growing budgets never shrink the sampled region.
    let budgets: Vec<f64> = (0..5).map(|i| 0.2 + 0.15 * i as f64).collect();
    let mut prev: Option<Vec<[f64; 2]>> = None;
    for &b in &budgets {
        let hull = bc_sampled_region(&bounds, b, b);
        if let Some(p) = &prev {
            for v in p {
                assert!(inside(&hull, *v), "region shrank at budget {b}: {v:?}");
            }
        }
        prev = Some(hull);
    }

    // Time-sharing closure: pairwise mixtures at mixed budgets are dominated.
    for k in 0..100 {
        let i = rng.gen_range(0..bounds.len());
        let j = rng.gen_range(0..bounds.len());
        let lam: f64 = rng.gen();
        let (p, q) = (&bounds[i], &bounds[j]);
        let m_r1 = lam * p.r1 + (1.0 - lam) * q.r1;
        let m_r2 = lam * p.r2 + (1.0 - lam) * q.r2;
        let m_d1 = lam * p.d1 + (1.0 - lam) * q.d1;
        let m_d2 = lam * p.d2 + (1.0 - lam) * q.d2;
        let hull = bc_sampled_region(&bounds, m_d1 + 1e-9, m_d2 + 1e-9);
        assert!(
            inside(&hull, [m_r1, m_r2]),
            "mixture {k} not dominated: ({m_r1}, {m_r2}) at budget ({m_d1}, {m_d2})"
        );
    }
}

// ---------------------------------------------------------------------------
// Binary broadcast example.

#[test]
fn binary_bc_closed_forms_match_generic_evaluator_on_grid() {
    // (p1, p2) grid with 0 < p1 < p2 < 1/2, a few alphas each.
    let alphas = [0.0, 0.1, 0.25, 0.4, 0.5];
    for i in 0..20 {
        for j in (i + 1)..20 {
            let p1 = 0.02 + 0.023 * i as f64;
            let p2 = 0.02 + 0.023 * j as f64;
            let pts = binary_bc_example(p1, p2, &alphas).unwrap();
            for pt in &pts {
                for (scheme, name) in [(&pt.scheme_a, "A"), (&pt.scheme_b, "B")] {
                    assert_abs_diff_eq!(scheme.r1_closed, scheme.r1_eval, epsilon = 1e-9);
                    assert_abs_diff_eq!(scheme.r2_closed, scheme.r2_eval, epsilon = 1e-9);
                    assert_abs_diff_eq!(scheme.d1_closed, scheme.d1_eval, epsilon = 1e-9);
                    assert!(
                        (scheme.d2_closed - scheme.d2_eval).abs() <= 1e-9,
                        "scheme {name} d2 mismatch at p1={p1}, p2={p2}, alpha={}",
                        pt.alpha
                    );
                }
            }
        }
    }
}

#[test]
fn binary_bc_example_alpha_endpoints() {
    let pts = binary_bc_example(0.05, 0.1, &[0.0, 0.5]).unwrap();
    let p_tilde2 = 0.05 * 0.9 + 0.95 * 0.1;
    // alpha = 0: no private rate; scheme A already reaches D2 = p1.
    let at0 = &pts[0];
    assert_abs_diff_eq!(at0.scheme_a.r1_closed, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(at0.scheme_b.r1_closed, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(at0.scheme_a.d2_closed, 0.05, epsilon = 1e-12);
    assert_abs_diff_eq!(
        at0.scheme_b.r2_closed,
        1.0 - binary_entropy(p_tilde2).unwrap(),
        epsilon = 1e-12
    );
    // alpha = 1/2: the common-layer rate of scheme B clamps at zero.
    let at_half = &pts[1];
    assert!(at_half.scheme_b.r2_closed < 0.0);
    assert_abs_diff_eq!(
        at_half.scheme_b.r2_closed,
        -binary_entropy(p_tilde2).unwrap(),
        epsilon = 1e-12
    );
}

#[test]
fn binary_bc_scheme_b_keeps_distortion_at_any_alpha() {
    let alphas: Vec<f64> = (0..11).map(|i| 0.05 * i as f64).collect();
    let pts = binary_bc_example(0.05, 0.1, &alphas).unwrap();
    for pt in &pts {
        assert_abs_diff_eq!(pt.scheme_b.d2_eval, 0.05, epsilon = 1e-12);
        // Scheme A only reaches it at alpha = 0.
        if pt.alpha > 1e-9 {
            assert!(pt.scheme_a.d2_eval > 0.05 + 1e-12);
        }
    }
}

#[test]
fn binary_bc_system_is_physically_degraded() {
    let scen = binary_bc_scenario(0.05, 0.1).unwrap();
    let res = check_degraded(&scen).unwrap();
    assert!(res.is_physical(), "{res:?}");
    // And the generic vars builder round-trips through the evaluator.
    let vars = binary_bc_vars(&scen, 0.2, true).unwrap();
    let b = bc_region_simultaneous(&scen, &vars).unwrap();
    assert!(b.d1 <= 1e-12);
}

// ---------------------------------------------------------------------------
// Monostatic downlink.

#[test]
fn c_md_matches_fine_grid_oracle_on_binary_inputs() {
    let mut rng = rng_from_seed(23);
    for trial in 0..10 {
        let s = Axis::binary("S");
        let x = Axis::binary("X");
        let prior = random_dist(&mut rng, s.clone());
        let echo = random_kernel(&mut rng, vec![x.clone(), s.clone()], vec![Axis::indexed("Y1p", 2)]);
        let downlink = random_kernel(&mut rng, vec![x, s.clone()], vec![Axis::indexed("Y2p", 2)]);
        let d1 = DistortionFn::hamming(s.labels());

        // Per-letter sensing distortions for target selection and the oracle.
        let e = |xi: usize| -> f64 {
            (0..2)
                .map(|y| {
                    (0..2)
                        .map(|r| {
                            (0..2)
                                .map(|si| prior.pmf()[si] * echo.prob(xi * 2 + si, y) * d1.value(si, r))
                                .sum::<f64>()
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .sum()
        };
        let (e0, e1) = (e(0), e(1));
        let target = e0.min(e1) + 0.35 * (e0.max(e1) - e0.min(e1)) + 1e-9;

        // Oracle: scan the input simplex at step 1/256 with direct MI sums,
        // including the exact point where the sensing constraint turns active.
        let mut ts: Vec<f64> = (0..=256).map(|i| i as f64 / 256.0).collect();
        if (e1 - e0).abs() > 1e-15 {
            let t_boundary = (target - e0) / (e1 - e0);
            if (0.0..=1.0).contains(&t_boundary) {
                ts.push(t_boundary);
            }
        }
        let mut best = f64::NEG_INFINITY;
        for t in ts {
            let px = [1.0 - t, t];
            if px[0] * e0 + px[1] * e1 > target + 1e-9 {
                continue;
            }
            let mut mi = 0.0;
            for si in 0..2 {
                let ps = prior.pmf()[si];
                let mut qy = [0.0; 2];
                for xi in 0..2 {
                    for y in 0..2 {
                        qy[y] += px[xi] * downlink.prob(xi * 2 + si, y);
                    }
                }
                for xi in 0..2 {
                    for y in 0..2 {
                        let c = downlink.prob(xi * 2 + si, y);
                        if px[xi] > 0.0 && c > 0.0 && qy[y] > 0.0 {
                            mi += ps * px[xi] * c * (c / qy[y]).log2();
                        }
                    }
                }
            }
            best = best.max(mi);
        }
        let solved = c_md(&prior, &echo, &downlink, &d1, target).unwrap();
        assert!(
            (solved - best).abs() <= 1e-4,
            "trial {trial}: c_md {solved} vs oracle {best}"
        );
    }
}

#[test]
fn c_md_unconstrained_cases() {
    let mut rng = rng_from_seed(29);
    let s = Axis::binary("S");
    let x = Axis::binary("X");
    let prior = random_dist(&mut rng, s.clone());
    // Echo carries nothing about S: the constraint is inactive above the
    // prior-only distortion and the value is the conditional capacity.
    let echo = Kernel::from_fn(vec![x.clone(), s.clone()], vec![Axis::indexed("Y1p", 2)], |_, _| 0.5)
        .unwrap();
    let downlink = random_kernel(&mut rng, vec![x, s.clone()], vec![Axis::indexed("Y2p", 3)]);
    let d1 = DistortionFn::hamming(s.labels());
    let prior_only = prior.pmf().iter().cloned().fold(f64::INFINITY, f64::min);
    let at_floor = c_md(&prior, &echo, &downlink, &d1, prior_only + 1e-9).unwrap();
    let at_infinity = c_md(&prior, &echo, &downlink, &d1, 1e9).unwrap();
    assert_abs_diff_eq!(at_floor, at_infinity, epsilon = 1e-9);
    assert!(c_md(&prior, &echo, &downlink, &d1, prior_only - 1e-3).is_err());
}

// ---------------------------------------------------------------------------
// Multiple access: reductions, double usage, uplink.

fn trivial_mac_vars(scen: &cdtrade_core::mac::MACScenario, rng: &mut impl Rng) -> MACVars {
    let u = Axis::indexed("U", 1);
    let w1 = Axis::indexed("W1", 1);
    let w2 = Axis::indexed("W2", 1);
    let p1 = random_dist(rng, scen.x1_axis().clone());
    let p2 = random_dist(rng, scen.x2_axis().clone());
    let enc1 = Kernel::from_fn(
        vec![u.clone()],
        vec![w1.clone(), scen.x1_axis().clone()],
        |_, o| p1.pmf()[o[1]],
    )
    .unwrap();
    let enc2 = Kernel::from_fn(
        vec![u.clone()],
        vec![w2.clone(), scen.x2_axis().clone()],
        |_, o| p2.pmf()[o[1]],
    )
    .unwrap();
    let comp1 = Kernel::from_fn(
        vec![
            u.clone(),
            w1.clone(),
            w2.clone(),
            scen.x1_axis().clone(),
            scen.psss.axes()[1].clone(),
            scen.phi1.output().clone(),
        ],
        vec![Axis::indexed("V1", 1)],
        |_, _| 1.0,
    )
    .unwrap();
    let comp2 = Kernel::from_fn(
        vec![u.clone(), w1, w2, scen.x2_axis().clone(), scen.psss.axes()[2].clone(), scen.phi2.output().clone()],
        vec![Axis::indexed("V2", 1)],
        |_, _| 1.0,
    )
    .unwrap();
    MACVars { p_u: FiniteDist::uniform(u), enc1, enc2, comp1, comp2 }
}

#[test]
fn trivial_layers_reduce_to_classical_mac_pentagon() {
    let mut rng = rng_from_seed(31);
    for _ in 0..100 {
        let sizes = MacSizes { ns: 1, ns1: 1, ns2: 1, ny: 3, ..MacSizes::default() };
        let scen = random_mac_scenario(&mut rng, sizes);
        let vars = trivial_mac_vars(&scen, &mut rng);
        let b = mac_inner_bounds(&scen, &vars).unwrap();
        let joint = mac_build_joint(&scen, &vars).unwrap();
        let i1 = joint.cond_mutual_information(&["X1"], &["Y"], &["X2"]).unwrap();
        let i2 = joint.cond_mutual_information(&["X2"], &["Y"], &["X1"]).unwrap();
        let isum = joint.cond_mutual_information(&["X1", "X2"], &["Y"], &[]).unwrap();
        assert_abs_diff_eq!(b.r1_raw, i1, epsilon = 1e-9);
        assert_abs_diff_eq!(b.r2_raw, i2, epsilon = 1e-9);
        assert_abs_diff_eq!(b.sum_a_raw, isum, epsilon = 1e-9);
        assert_abs_diff_eq!(b.sum_b_raw, isum, epsilon = 1e-9);
    }
}

#[test]
fn no_feedback_reduction_matches_term_by_term() {
    let mut rng = rng_from_seed(37);
    for _ in 0..40 {
        let sizes = MacSizes { nu: 1, nw1: 1, nw2: 1, nz1: 1, nz2: 1, ..MacSizes::default() };
        let scen = random_mac_scenario(&mut rng, sizes);
        let vars = random_mac_vars(&mut rng, &scen, sizes);
        let b = mac_inner_bounds(&scen, &vars).unwrap();
        let joint = mac_build_joint(&scen, &vars).unwrap();
        // With constant feedback and trivial cooperative layers the bounds
        // collapse to the no-feedback region, term by term.
        let r1 = joint.cond_mutual_information(&["X1", "V1"], &["Y"], &["X2", "V2"]).unwrap()
            - joint.cond_mutual_information(&["V1"], &["S1"], &["X1"]).unwrap();
        let r2 = joint.cond_mutual_information(&["X2", "V2"], &["Y"], &["X1", "V1"]).unwrap()
            - joint.cond_mutual_information(&["V2"], &["S2"], &["X2"]).unwrap();
        let sum = joint.cond_mutual_information(&["X1", "X2", "V1", "V2"], &["Y"], &[]).unwrap()
            - joint.cond_mutual_information(&["V1"], &["S1"], &["X1"]).unwrap()
            - joint.cond_mutual_information(&["V2"], &["S2"], &["X2"]).unwrap();
        assert_abs_diff_eq!(b.r1_raw, r1, epsilon = 1e-9);
        assert_abs_diff_eq!(b.r2_raw, r2, epsilon = 1e-9);
        assert_abs_diff_eq!(b.sum_a_raw, sum, epsilon = 1e-9);
        assert_abs_diff_eq!(b.sum_b_raw, sum, epsilon = 1e-9);
    }
}

#[test]
fn willems_region_contains_no_cooperation_pentagon() {
    // With the trivial-layer variables included in the sampled family, the
    // assembled region always contains the no-cooperation pentagon built from
    // the same input marginals.
    let mut rng = rng_from_seed(41);
    let sizes = MacSizes { ns: 1, ns1: 1, ns2: 1, nz1: 2, nz2: 2, ny: 2, ..MacSizes::default() };
    let scen = random_mac_scenario(&mut rng, sizes);
    let base = trivial_mac_vars(&scen, &mut rng);
    let base_bounds = mac_inner_bounds(&scen, &base).unwrap();
    let mut family = vec![base_bounds];
    for _ in 0..10 {
        let vars = random_mac_vars(&mut rng, &scen, sizes);
        family.push(mac_inner_bounds(&scen, &vars).unwrap());
    }
    let hull = mac_sampled_region(&family, 2.0);
    let inside = |p: [f64; 2]| -> bool {
        (0..hull.len()).all(|i| {
            let j = (i + 1) % hull.len();
            (hull[j][0] - hull[i][0]) * (p[1] - hull[i][1])
                - (hull[j][1] - hull[i][1]) * (p[0] - hull[i][0])
                >= -1e-9
        })
    };
    let cap = base_bounds.sum_a.min(base_bounds.sum_b);
    for p in [
        [base_bounds.r1.min(cap), 0.0],
        [0.0, base_bounds.r2.min(cap)],
        [base_bounds.r1.min(cap), (cap - base_bounds.r1).clamp(0.0, base_bounds.r2)],
    ] {
        assert!(inside(p), "pentagon corner {p:?} escaped the assembled region");
    }
}

#[test]
fn inner_sum_rates_within_matched_outer_bounds() {
    // Paired sweep: every sampled inner point's sum rate stays below the best
    // full-cooperation outer sum at its own distortion.
    let mut rng = rng_from_seed(43);
    let opts = SolverOptions { starts: 8, seed: 7, v_size: Some(4), ..SolverOptions::default() };
    for trial in 0..20 {
        let sizes = MacSizes { nz1: if trial % 2 == 0 { 1 } else { 2 }, ..MacSizes::default() };
        let scen = random_mac_scenario(&mut rng, sizes);
        let vars = random_mac_vars(&mut rng, &scen, sizes);
        let inner = mac_inner_bounds(&scen, &vars).unwrap();
        let outer = cdtrade_core::mac::mac_outer_max_sum(&scen, inner.distortion, &opts).unwrap();
        // The induced cooperative evaluation is itself a valid outer witness.
        let induced = induced_outer(&scen, &vars);
        let best_outer = outer.max(induced);
        assert!(
            inner.sum_rate() <= best_outer + 1e-6,
            "trial {trial}: inner {} vs outer {}",
            inner.sum_rate(),
            best_outer
        );
    }
}

/// Evaluates the full-cooperation sum bound at the joint law induced by the
/// cooperative variables themselves.
fn induced_outer(scen: &cdtrade_core::mac::MACScenario, vars: &MACVars) -> f64 {
    let joint = mac_build_joint(scen, vars).unwrap();
    let marg = joint.marginalize(&["X1", "X2"]).unwrap();
    let (cond, _) = joint
        .conditional(&["V1", "V2"], &["X1", "X2", "S1", "S2", "Z1", "Z2"])
        .unwrap();
    let outer = mac_outer_sum(scen, &marg, &cond).unwrap();
    outer.sum_raw
}

#[test]
fn mac_guardrail_refuses_oversized_joints() {
    let mut rng = rng_from_seed(47);
    let sizes = MacSizes {
        ns: 4,
        ns1: 4,
        ns2: 4,
        nx1: 4,
        nx2: 4,
        ny: 4,
        nz1: 4,
        nz2: 4,
        nu: 8,
        nw1: 8,
        nw2: 8,
        nv1: 8,
        nv2: 8,
    };
    let scen = random_mac_scenario(&mut rng, sizes);
    let vars = random_mac_vars(&mut rng, &scen, sizes);
    match mac_build_joint(&scen, &vars) {
        Err(cdtrade_core::CdError::TooLarge { .. }) => {}
        other => panic!("expected guardrail, got {other:?}"),
    }
}

#[test]
fn double_usage_configurations() {
    let report = double_usage_example(256).unwrap();
    // H2(p) = 1/2.
    assert_abs_diff_eq!(
        binary_entropy(report.t_prior).unwrap(),
        0.5,
        epsilon = 1e-12
    );
    // (c): region {R1 <= 1, R2 <= 1/2, R1 + R2 <= 1} with zero distortion.
    assert_abs_diff_eq!(report.config_c.r1_raw, 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(report.config_c.r2_raw, 0.5, epsilon = 1e-9);
    assert_abs_diff_eq!(report.config_c.sum_a_raw.min(report.config_c.sum_b_raw), 1.0, epsilon = 1e-9);
    assert!(report.config_c.distortion <= 1e-12);
    // (a): echo component as description reaches (1, 1/2) but pays distortion.
    assert!(report.config_a.r1_raw >= 1.0 - 1e-9);
    assert!(report.config_a.sum_rate() >= 1.5 - 1e-9);
    assert!(report.config_a.distortion > 0.1);
    assert_abs_diff_eq!(report.config_a.distortion, report.t_prior, epsilon = 1e-9);
    // (b): without descriptions the first rate is capped by 1/2 on the grid.
    assert!(report.config_b_max_r1 <= 0.5 + 1e-9);
    for (p2, r1) in &report.config_b_bounds {
        assert!(*r1 <= 0.5 + 1e-9, "R1 bound {r1} at p2={p2}");
    }
}

#[test]
fn c_mu_matches_product_grid_oracle() {
    let mut rng = rng_from_seed(53);
    let rho_grid: Vec<f64> = {
        let mut g = vec![0.0];
        let mut r = 0.015625;
        while r <= 1024.0 {
            g.push(r);
            r *= 2.0;
        }
        g
    };
    for trial in 0..8 {
        let s = Axis::binary("S");
        let prior = random_dist(&mut rng, s.clone());
        let chan = random_kernel(
            &mut rng,
            vec![Axis::binary("X1"), Axis::binary("X2"), s.clone()],
            vec![Axis::indexed("Y", 2)],
        );
        let d = DistortionFn::hamming(s.labels());

        // Per-(x1, x2) sensing distortion.
        let e = |x1: usize, x2: usize| -> f64 {
            (0..2)
                .map(|y| {
                    (0..2)
                        .map(|r| {
                            (0..2)
                                .map(|si| {
                                    prior.pmf()[si] * chan.prob((x1 * 2 + x2) * 2 + si, y) * d.value(si, r)
                                })
                                .sum::<f64>()
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .sum()
        };
        let evals = [e(0, 0), e(0, 1), e(1, 0), e(1, 1)];
        let lo = evals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = evals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let target = lo + 0.5 * (hi - lo) + 1e-9;

        // Oracle: product grid at step 1/64 with an independent envelope.
        let mut cloud: Vec<(f64, f64)> = Vec::new();
        for i in 0..=64 {
            for j in 0..=64 {
                let p1 = [1.0 - i as f64 / 64.0, i as f64 / 64.0];
                let p2 = [1.0 - j as f64 / 64.0, j as f64 / 64.0];
                let mut rate = 0.0;
                for (x2, &w2) in p2.iter().enumerate() {
                    if w2 == 0.0 {
                        continue;
                    }
                    let mut qy = [0.0; 2];
                    for (x1, &w1) in p1.iter().enumerate() {
                        for y in 0..2 {
                            for si in 0..2 {
                                qy[y] += w1 * prior.pmf()[si] * chan.prob((x1 * 2 + x2) * 2 + si, y);
                            }
                        }
                    }
                    for (x1, &w1) in p1.iter().enumerate() {
                        if w1 == 0.0 {
                            continue;
                        }
                        for y in 0..2 {
                            let c: f64 = (0..2)
                                .map(|si| prior.pmf()[si] * chan.prob((x1 * 2 + x2) * 2 + si, y))
                                .sum();
                            if c > 0.0 && qy[y] > 0.0 {
                                rate += w2 * w1 * c * (c / qy[y]).log2();
                            }
                        }
                    }
                }
                let dist: f64 = p1
                    .iter()
                    .enumerate()
                    .flat_map(|(x1, &w1)| {
                        p2.iter().enumerate().map(move |(x2, &w2)| w1 * w2 * evals[x1 * 2 + x2])
                    })
                    .sum();
                cloud.push((dist, rate));
            }
        }
        let oracle = envelope_value(&cloud, target);
        let solved = c_mu(&prior, &chan, &d, target, &rho_grid).unwrap();
        assert!(
            (solved - oracle).abs() <= 5e-3,
            "trial {trial}: c_mu {solved} vs oracle {oracle}"
        );
    }
}

/// Independent non-decreasing concave envelope evaluation: upper hull of the
/// (distortion, rate) cloud, flattened past its maximum.
fn envelope_value(cloud: &[(f64, f64)], target: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = cloud.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let peak = hull.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut best = f64::NEG_INFINITY;
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        if target >= a.0 && target <= b.0 {
            best = best.max(a.1 + (b.1 - a.1) * (target - a.0) / (b.0 - a.0));
        }
    }
    if target >= hull.last().unwrap().0 {
        best = best.max(peak);
    }
    // Only the non-decreasing part below the peak matters.
    for w in hull.windows(2) {
        if w[1].0 <= target {
            best = best.max(w[1].1);
        }
    }
    best
}

#[test]
fn c_mu_single_user_and_unconstrained_cases() {
    let mut rng = rng_from_seed(59);
    let s = Axis::binary("S");
    let prior = random_dist(&mut rng, s.clone());
    // Channel ignoring X2 and S entirely.
    let base = random_kernel(&mut rng, vec![Axis::binary("X1")], vec![Axis::indexed("Y", 2)]);
    let chan = Kernel::from_fn(
        vec![Axis::binary("X1"), Axis::binary("X2"), s.clone()],
        vec![Axis::indexed("Y", 2)],
        |i, o| base.prob(i[0], o[0]),
    )
    .unwrap();
    let d = DistortionFn::hamming(s.labels());
    let rho_grid = vec![0.0, 0.5, 2.0, 32.0];
    let prior_only = prior.pmf().iter().cloned().fold(f64::INFINITY, f64::min);
    let solved = c_mu(&prior, &chan, &d, prior_only + 1e-6, &rho_grid).unwrap();
    let p_y_x: Vec<Vec<f64>> = (0..2).map(|x1| (0..2).map(|y| base.prob(x1, y)).collect()).collect();
    let (pcap, _) = cdtrade_core::opt::ba_with_cost(&p_y_x, &[0.0, 0.0], 1e-13, 5000);
    let capacity = cdtrade_core::opt::mi_bits(&pcap, &p_y_x);
    assert_abs_diff_eq!(solved, capacity, epsilon = 1e-6);
    // Unconstrained budget gives the same value.
    let unconstrained = c_mu(&prior, &chan, &d, 1e9, &rho_grid).unwrap();
    assert_abs_diff_eq!(unconstrained, capacity, epsilon = 1e-6);
    // Impossible budget errors.
    assert!(c_mu(&prior, &chan, &d, -1.0, &rho_grid).is_err());
}

#[test]
fn cooperative_p2p_composite_axes_are_consistent() {
    let mut rng = rng_from_seed(61);
    let sizes = MacSizes::default();
    let scen = random_mac_scenario(&mut rng, sizes);
    let p2p = cooperative_p2p(&scen).unwrap();
    assert_eq!(p2p.input_axis().len(), 4);
    assert_eq!(p2p.sit_axis().len(), 4);
    assert_eq!(p2p.state_axis().len(), 2);
}
