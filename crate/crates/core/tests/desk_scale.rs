//! Desk-scale integration checks across chain sizes: the commuting-family
//! invariant on random draws, full closure (roots -> states -> eigenvalues
//! -> scalar products) at six sites, and the mixed scalar products against
//! their contraction oracles.

use num_complex::Complex64 as C64;

use gaudin_core::bethe::{eigen_check, solve_bethe, Kind, SolverConfig};
use gaudin_core::gaudin::{hamiltonian_direct, GaudinSet};
use gaudin_core::params::ModelParams;
use gaudin_core::sampling::{draw_params, draw_spectral, rng_for, to_c64};
use gaudin_core::scalar::{
    partition_bruteforce, relative_error, s11_bruteforce, s11_det, s12, s21, s22_bruteforce,
    s22_det,
};

fn six_site() -> ModelParams {
    ModelParams::from_real(
        0.3,
        0.7,
        0.5,
        0.2,
        0.1,
        &[0.11, 0.23, 0.41, 0.59, 0.73, 0.91],
    )
    .unwrap()
}

#[test]
fn gaudin_family_commutes_across_sizes_and_draws() {
    let mut worst: f64 = 0.0;
    for n in [2usize, 4, 6] {
        for draw in 0..5u64 {
            let params = draw_params(&mut rng_for(1313, n as u64 * 8 + draw), n);
            let set = GaudinSet::build(&params).expect("gaudin family");
            worst = worst.max(set.max_pairwise_commutator_rel());
        }
    }
    assert!(worst < 1e-9, "worst relative commutator {worst}");
}

#[test]
fn hamiltonian_depends_on_delta() {
    // the fourth boundary parameter must actually enter the operators
    let p = six_site();
    let h = hamiltonian_direct(1, &p).unwrap();
    let mut p2 = p.clone();
    p2.delta += C64::new(1e-3, 0.0);
    let h2 = hamiltonian_direct(1, &p2).unwrap();
    let directional = h2.sub(&h).frobenius_norm() / 1e-3;
    assert!(
        directional > 1e-3,
        "H_1 insensitive to delta: {directional}"
    );
}

#[test]
fn six_site_closure_roots_eigen_scalar() {
    let p = six_site();
    let cfg = SolverConfig {
        starts: 2048,
        ..SolverConfig::default()
    };
    for kind in [Kind::One, Kind::Two] {
        let out = solve_bethe(kind, &p, &cfg);
        assert!(
            !out.sets.is_empty(),
            "no converged M = 3 root sets for kind {kind:?}"
        );
        let set = &out.sets[0];
        assert!(set.residual_norm < 1e-11);

        let ec = eigen_check(kind, &set.roots, &p).unwrap();
        assert!(
            ec.max_residual < 1e-8,
            "kind {kind:?}: eigen residual {}",
            ec.max_residual
        );

        // scalar-product determinant against the contraction oracle at M = 3
        let mut rng = rng_for(6161, kind.index() as u64);
        let avoid: Vec<f64> =
            p.z.iter()
                .map(|z| z.re)
                .chain(set.roots.iter().map(|v| v.re))
                .collect();
        let u_list = to_c64(&draw_spectral(&mut rng, 3, &avoid));
        let (det, pair) = match kind {
            Kind::One => (
                s11_det(&u_list, set, &p).unwrap(),
                s11_bruteforce(&u_list, &set.roots, &p).unwrap(),
            ),
            Kind::Two => (
                s22_det(&u_list, set, &p).unwrap(),
                s22_bruteforce(&u_list, &set.roots, &p).unwrap(),
            ),
        };
        assert!(pair.route_disagreement() < 1e-10);
        let err = relative_error(det.value, pair.tilde.value);
        assert!(err < 1e-8, "kind {kind:?}: det vs oracle {err}");
    }
}

#[test]
fn mixed_scalar_products_match_oracle_at_six_sites() {
    let p = six_site();
    let mut rng = rng_for(7272, 0);
    let zs: Vec<f64> = p.z.iter().map(|z| z.re).collect();
    let u_list = to_c64(&draw_spectral(&mut rng, 3, &zs));
    let more: Vec<f64> = zs
        .iter()
        .copied()
        .chain(u_list.iter().map(|u| u.re))
        .collect();
    let v_list = to_c64(&draw_spectral(&mut rng, 3, &more));
    let ubar: Vec<C64> = u_list.iter().chain(v_list.iter()).copied().collect();
    for (kind, det) in [
        (Kind::One, s12(&u_list, &v_list, &p).unwrap()),
        (Kind::Two, s21(&u_list, &v_list, &p).unwrap()),
    ] {
        let oracle = partition_bruteforce(kind, &ubar, &p.z, &p).unwrap();
        let err = relative_error(det.value, oracle.value);
        assert!(
            err < 1e-8,
            "kind {kind:?}: mixed scalar product error {err}"
        );
    }
}

#[test]
fn partition_triangle_up_to_the_bruteforce_cap() {
    // the dense contraction stays tractable across the whole supported
    // range; spaced grids with an imaginary offset on the spectral side
    // keep every argument off the poles without rejection sampling
    let boundary = ModelParams::from_real(0.3, 0.7, 0.5, 0.2, 0.1, &[0.11, 0.23]).unwrap();
    for n in [8usize, 10, 12] {
        let zs: Vec<C64> = (0..n)
            .map(|j| C64::new(0.11 + 0.1 * j as f64, 0.0))
            .collect();
        let ubar: Vec<C64> = (0..n)
            .map(|j| C64::new(0.16 + 0.095 * j as f64, 0.1))
            .collect();
        for kind in [Kind::One, Kind::Two] {
            let det = gaudin_core::scalar::partition_det(kind, &ubar, &zs, &boundary).unwrap();
            let bf =
                gaudin_core::scalar::partition_bruteforce(kind, &ubar, &zs, &boundary).unwrap();
            let err = relative_error(det.value, bf.value);
            assert!(err < 1e-10, "N = {n} kind {kind:?}: rel err {err}");
        }
    }
}
