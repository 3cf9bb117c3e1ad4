use dcs_core::comparison::{monotone_envelope, PiecewiseFn};
use dcs_core::constructions::{orbit_max_space, star_space, verify_inheritance};
use dcs_core::corpus::{depth_space, funnel_map, random_a1_space, random_general_space, random_map, rng, small_size};
use dcs_core::maps::{check_nonlinear_contraction, SelfMap};
use dcs_core::real::{int, ratio, Real};
use dcs_core::spaces::{DistanceSpace, FiniteSpace, SamplerConfig};
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

fn general(seed: u64) -> (FiniteSpace, Vec<usize>) {
    let mut r = rng(seed);
    let n = small_size(&mut r, 6);
    (random_general_space(&mut r, n), random_map(&mut r, n))
}

fn max3<'a>(a: &'a Real, b: &'a Real, c: &'a Real) -> Real {
    a.max(b).max(c).clone()
}

/// A few comparison functions in Φ, including one with a plateau.
fn phis() -> Vec<PiecewiseFn> {
    let plateau = dcs_core::comparison::piecewise(&[("0", "0", "1/2", "0"), ("1/2", "1/4", "0", "1/4")]).unwrap();
    vec![
        PiecewiseFn::linear(ratio(1, 2)),
        PiecewiseFn::linear(ratio(3, 4)),
        PiecewiseFn::linear(ratio(9, 10)),
        plateau,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Both constructions dominate `d` off the diagonal and vanish on it.
    #[test]
    fn derived_distances_dominate(seed in any::<u64>(), n in 1usize..4) {
        let (s, img) = general(seed);
        let star = star_space(&s, &img).unwrap();
        let om = orbit_max_space(&s, &img, None, n).unwrap();
        for x in 0..s.len() {
            prop_assert!(star.space.d(x, x).is_zero() && om.space.d(x, x).is_zero());
            for y in 0..s.len() {
                if x == y {
                    continue;
                }
                prop_assert_eq!(star.space.d(x, y), &max3(s.d(x, y), s.d(x, img[x]), s.d(y, img[y])));
                prop_assert!(star.space.d(x, y) >= s.d(x, y));
                prop_assert!(om.space.d(x, y) >= s.d(x, y));
            }
        }
        prop_assert!(verify_inheritance(&star).domination.holds);
        prop_assert!(verify_inheritance(&om).domination.holds);
    }

    /// Over an A1 base every inheritance clause holds.
    #[test]
    fn a1_bases_pass_on_everything(seed in any::<u64>(), n in 1usize..3) {
        let mut r = rng(seed);
        let k = small_size(&mut r, 6);
        let s = random_a1_space(&mut r, k);
        let img = random_map(&mut r, k);
        prop_assert!(verify_inheritance(&star_space(&s, &img).unwrap()).all_hold);
        prop_assert!(verify_inheritance(&orbit_max_space(&s, &img, None, n).unwrap()).all_hold);
    }

    /// On `d(x,y) = max(w_x, w_y)` with `f` constant at a weight-zero point,
    /// `d(x,y)` already dominates every displacement, so one orbit step and
    /// the star construction both give back `d`.
    #[test]
    fn orbit_max_reduces_to_star(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = small_size(&mut r, 7);
        let c = r.gen_range(0..n);
        let w: Vec<Real> = (0..n).map(|i| if i == c { Real::zero() } else { int(r.gen_range(1..6)) }).collect();
        let s = FiniteSpace::from_fn((0..n).map(|i| i.to_string()).collect(), |x, y| {
            if x == y { Real::zero() } else { w[x].clone().max(w[y].clone()) }
        }).unwrap();
        let img = vec![c; n];
        let star = star_space(&s, &img).unwrap();
        let om = orbit_max_space(&s, &img, None, 1).unwrap();
        prop_assert_eq!(&star.space, &om.space);
        prop_assert_eq!(&star.space, &s);
    }

    /// If `f` is a φ-contraction for `d` and its displacements shrink under
    /// `φ̂`, then it is a `φ̂`-contraction for `d*`.
    #[test]
    fn contraction_transfers_to_star(seed in any::<u64>(), k in 0usize..4) {
        let mut r = rng(seed);
        let n = small_size(&mut r, 7);
        let (s, img) = if r.gen_bool(0.6) {
            let (img, depth) = funnel_map(&mut r, n);
            (depth_space(&mut r, &depth), img)
        } else {
            (random_a1_space(&mut r, n), random_map(&mut r, n))
        };
        let phi = &phis()[k];
        let env = monotone_envelope(phi);
        let sampler = SamplerConfig::new(0);
        let f = SelfMap::finite(img.clone(), n).unwrap();
        let base = check_nonlinear_contraction(&DistanceSpace::Finite(s.clone()), &f, phi, false, &sampler).unwrap();
        let gaps = (0..n).all(|x| s.d(img[x], img[img[x]]) <= &env.eval(s.d(x, img[x])).unwrap());
        if base.holds && gaps {
            let star = star_space(&s, &img).unwrap();
            let derived = check_nonlinear_contraction(&DistanceSpace::Finite(star.space), &f, &env, true, &sampler).unwrap();
            prop_assert!(derived.holds, "{:?}", derived);
        }
    }
}

#[test]
fn transfer_premises_are_met_often() {
    let mut hits = 0;
    for seed in 0..200u64 {
        let mut r = rng(seed);
        let n = small_size(&mut r, 7);
        let (img, depth) = funnel_map(&mut r, n);
        let s = depth_space(&mut r, &depth);
        let f = SelfMap::finite(img.clone(), n).unwrap();
        let phi = PiecewiseFn::linear(ratio(9, 10));
        let ok = check_nonlinear_contraction(&DistanceSpace::Finite(s.clone()), &f, &phi, false, &SamplerConfig::new(0))
            .unwrap()
            .holds;
        if ok && (0..n).all(|x| s.d(img[x], img[img[x]]) <= &(ratio(9, 10) * s.d(x, img[x]))) {
            hits += 1;
        }
    }
    assert!(hits >= 50, "{hits}");
}
