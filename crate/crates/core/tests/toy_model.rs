use std::f64::consts::{FRAC_PI_2, PI};

use quasichain::dense::C64;
use quasichain::eig::eig;
use quasichain::ham::{build_from_potentials, Hopping};
use quasichain::lattice::Boundary;
use quasichain::obs::phase_rigidity;
use quasichain::toy::*;

fn params(t: f64, theta: f64) -> ToyParams {
    ToyParams::new(-1.0, 1.0, Hopping::new(t, theta)).unwrap()
}

#[test]
fn numeric_energies_match_closed_form_on_grid() {
    for theta in [0.0, 0.7, FRAC_PI_2] {
        for &t in &linspace(0.0, 2.0, 100) {
            let p = params(t, theta);
            for &k in &linspace(0.0, PI, 100) {
                let num = numeric_energies(&p, k).unwrap();
                let closed = sorted_closed_energies(&p, k);
                for (a, b) in num.iter().zip(&closed) {
                    assert!((a - b).norm() < 1e-10, "theta={theta} t={t} k={k}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn two_site_open_chain_matches_zero_momentum_block() {
    // H(k=0) has off-diagonal 2t; a two-site chain with hopping 2T is the same matrix
    let p = params(0.25, FRAC_PI_2);
    let h = build_from_potentials(&[-1.0, 1.0], &Hopping::new(0.5, FRAC_PI_2), Boundary::Open);
    let m = bloch_matrix(&p, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            assert!((h.entries[(i, j)] - m[(i, j)]).norm() < 1e-15);
        }
    }
    assert!((h.entries[(0, 1)] - C64::new(0.0, 0.5)).norm() < 1e-15);
}

#[test]
fn exceptional_point_coalesces() {
    let p = params(0.5, FRAC_PI_2);
    let s = eig(&bloch_matrix(&p, 0.0)).unwrap();
    assert!(s.eigenvalues.iter().all(|e| e.norm() < 1e-7));
    for k in 0..2 {
        assert!(phase_rigidity(&s.left_vectors[k], &s.right_vectors[k]).unwrap() < 1e-6);
    }
    assert!(s.ep_flags.iter().all(|&f| f));
}

#[test]
fn rigidity_follows_square_root_law_near_critical_hopping() {
    // at k = 0 the branch rigidity is S/2 with S = sqrt(4 - 16 T^2) ~ 4 sqrt(delta)
    let t_c = 0.5;
    for delta in [1e-4, 1e-6, 1e-8] {
        for sign in [-1.0, 1.0] {
            let p = params(t_c + sign * delta, FRAC_PI_2);
            let s = eig(&bloch_matrix(&p, 0.0)).unwrap();
            for k in 0..2 {
                let r = phase_rigidity(&s.left_vectors[k], &s.right_vectors[k]).unwrap();
                let expected = 2.0 * delta.sqrt();
                assert!((r / expected - 1.0).abs() < 1e-2, "delta={delta} r={r}");
            }
        }
    }
    let p = params(t_c + 1e-9, FRAC_PI_2);
    let s = eig(&bloch_matrix(&p, 0.0)).unwrap();
    for k in 0..2 {
        assert!(phase_rigidity(&s.left_vectors[k], &s.right_vectors[k]).unwrap() < 1e-4);
    }
}

#[test]
fn energies_complex_exactly_above_critical_hopping() {
    for &t in &linspace(0.01, 1.0, 37) {
        let p = params(t, FRAC_PI_2);
        for &k in &linspace(0.0, 0.99 * PI, 41) {
            let t_c = critical_hopping(&p, k);
            if (t - t_c).abs() < 1e-6 {
                continue;
            }
            let (lo, hi) = closed_energies(&p, k);
            let complex = lo.im.abs() > 1e-12 || hi.im.abs() > 1e-12;
            assert_eq!(complex, t > t_c, "t={t} k={k}");
            if complex {
                assert!(lo.re.abs() < 1e-12 && hi.re.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn grid_rows_are_ordered_and_complete() {
    let p = params(1.0, FRAC_PI_2);
    let ks = linspace(0.0, PI, 5);
    let ts = linspace(0.0, 2.0, 3);
    let rows = order_parameter_grid(&p, &ks, &ts).unwrap();
    assert_eq!(rows.len(), 2 * 5 * 3);
    assert_eq!(rows[0].branch, Branch::Minus);
    assert_eq!(rows[1].branch, Branch::Plus);
    assert_eq!(rows[2].k, ks[1]);
    assert_eq!(rows[10].t, ts[1]);
}

#[test]
fn blue_region_states_share_uniform_weight() {
    let p = params(1.0, FRAC_PI_2);
    let ks = linspace(0.0, PI, 41);
    let ts = linspace(0.0, 2.0, 41);
    let rows = order_parameter_grid(&p, &ks, &ts).unwrap();
    for pair in rows.chunks(2) {
        if pair[0].region == Region::Blue {
            assert!(pair[0].sigma_z_abs < 1e-8 && pair[1].sigma_z_abs < 1e-8);
            assert!((pair[0].sigma_z_abs - pair[1].sigma_z_abs).abs() < 1e-8);
        }
    }
}
