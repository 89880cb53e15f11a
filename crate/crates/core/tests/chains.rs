use proptest::prelude::*;
use quasichain::dense::C64;
use quasichain::ham::{build, build_from_potentials, Hopping};
use quasichain::lattice::*;

proptest! {
    #[test]
    fn words_grow_by_concatenation(order in 2usize..20) {
        // S_{n+1} = S_n S_{n-1}
        let a = fibonacci_word(order - 1).unwrap();
        let b = fibonacci_word(order).unwrap();
        let c = fibonacci_word(order + 1).unwrap();
        prop_assert_eq!(&c[..b.len()], &b[..]);
        prop_assert_eq!(&c[b.len()..], &a[..]);
        prop_assert_eq!(Some(c.len()), fibonacci_length(order + 1));
    }

    #[test]
    fn aaf_potential_is_bounded(lambda in 0.1f64..5.0, beta in 0.0f64..20.0, phi in -3.0f64..3.0, n in 2usize..300) {
        let p = AafParams { phi, ..AafParams::new(lambda, Beta::Finite(beta)) };
        for v in aaf_potentials(&p, n).unwrap() {
            prop_assert!(v.abs() <= 2.0 * lambda + 1e-12);
        }
    }

    #[test]
    fn hamiltonian_is_complex_symmetric(seed in any::<u64>(), n in 3usize..80, t in 0.01f64..5.0, theta in -3.2f64..3.2, periodic in any::<bool>()) {
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
        let chain = ChainSpec::new(Model::Random(RandomDisorderParams { center: -1.0, halfwidth: 0.5, seed }), n)
            .with_boundary(boundary);
        let h = build(&chain, &Hopping::new(t, theta)).unwrap();
        prop_assert!(h.entries.is_complex_symmetric());
        let hermitian = theta.sin().abs() < 1e-15;
        prop_assert_eq!(h.entries.is_hermitian(), hermitian);
        let v = chain.potentials().unwrap();
        prop_assert_eq!(h.diagonal(), v);
    }
}

#[test]
fn infinite_beta_is_two_valued() {
    let v = aaf_potentials(&AafParams::new(1.5, Beta::Infinite), 233).unwrap();
    assert!(v.iter().all(|&x| x == 1.5 || x == -1.5 || x == 0.0));
}

#[test]
fn fibonacci_potential_follows_the_word() {
    let chain = ChainSpec::new(Model::Fibonacci(FibonacciWordParams::for_size(13, 2.0).unwrap()), 13);
    let word = word_to_string(&fibonacci_word(6).unwrap());
    let v = chain.potentials().unwrap();
    for (c, x) in word.chars().zip(&v) {
        assert_eq!(*x, if c == 'A' { 2.0 } else { -2.0 });
    }
}

#[test]
fn hopping_sits_on_both_off_diagonals() {
    let h = build_from_potentials(&[0.0, 0.0, 0.0, 0.0], &Hopping::new(2.0, 0.3), Boundary::Periodic);
    let t = C64::from_polar(2.0, 0.3);
    for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
        assert_eq!(h.entries[(i, j)], t);
        assert_eq!(h.entries[(j, i)], t);
    }
    assert_eq!(h.entries[(0, 2)], C64::new(0.0, 0.0));
}
