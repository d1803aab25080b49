use frobdet::detrep::{det_bareiss, det_exact, pfaffian, transform, PolyMatrix};
use frobdet::field::Fp;
use frobdet::invariants::HypersurfaceSpec;
use frobdet::linalg::Matrix;
use frobdet::module::{b1_cokernel_module, pushforward_module};
use frobdet::pipeline::{analyze_spec, PipelineOptions};
use frobdet::poly::HomogPoly;
use frobdet::quotient::QuotientRing;
use frobdet::search::random_form;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 4] = [2, 3, 5, 7];

fn linear_matrix(fp: Fp, s: usize, rng: &mut ChaCha8Rng) -> PolyMatrix {
    (0..s).map(|_| (0..s).map(|_| random_form(fp, 2, 1, rng)).collect()).collect()
}

fn skew_matrix(fp: Fp, s: usize, rng: &mut ChaCha8Rng) -> PolyMatrix {
    let mut m = vec![vec![HomogPoly::zero(fp, 3, 1); s]; s];
    for i in 0..s {
        for j in i + 1..s {
            let e = random_form(fp, 2, 1, rng);
            m[j][i] = e.neg();
            m[i][j] = e;
        }
    }
    m
}

fn scalar_matrix(fp: Fp, s: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let rows: Vec<Vec<u32>> = (0..s).map(|_| (0..s).map(|_| rng.gen_range(0..fp.p())).collect()).collect();
    Matrix::from_rows(fp, &rows, s)
}

fn equal_or_both_zero(a: &HomogPoly, b: &HomogPoly) -> bool {
    a == b || (a.is_zero() && b.is_zero())
}

fn nonzero_form(fp: Fp, d: u32, rng: &mut ChaCha8Rng) -> HomogPoly {
    loop {
        let g = random_form(fp, 2, d, rng);
        if !g.is_zero() {
            return g;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_is_multiplicative_under_scalar_transforms(seed in any::<u64>(), pi in 0..4usize, s in 1..5usize) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = linear_matrix(fp, s, &mut rng);
        let (p, q) = (scalar_matrix(fp, s, &mut rng), scalar_matrix(fp, s, &mut rng));
        let lhs = det_exact(&transform(&m, &p, &q).unwrap()).unwrap();
        let c = fp.mul(p.det().unwrap(), q.det().unwrap());
        let rhs = det_exact(&m).unwrap().scale(c);
        prop_assert!(equal_or_both_zero(&lhs, &rhs));
    }

    #[test]
    fn det_alternates_under_row_swaps(seed in any::<u64>(), pi in 0..4usize, s in 2..5usize) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = linear_matrix(fp, s, &mut rng);
        let before = det_exact(&m).unwrap();
        m.swap(0, s - 1);
        prop_assert!(equal_or_both_zero(&det_exact(&m).unwrap(), &before.neg()));
        // a repeated row kills the determinant
        m[1] = m[0].clone();
        prop_assert!(det_exact(&m).unwrap().is_zero());
    }

    #[test]
    fn exact_and_fraction_free_determinants_agree(seed in any::<u64>(), pi in 0..4usize, s in 1..6usize) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = linear_matrix(fp, s, &mut rng);
        prop_assert!(equal_or_both_zero(&det_exact(&m).unwrap(), &det_bareiss(&m).unwrap()));
    }

    #[test]
    fn pfaffian_squares_to_det(seed in any::<u64>(), pi in 1..4usize, half in 1..4usize) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = skew_matrix(fp, 2 * half, &mut rng);
        let pf = pfaffian(&m).unwrap();
        let sq = if pf.is_zero() { pf.clone() } else { pf.mul(&pf).unwrap() };
        prop_assert!(equal_or_both_zero(&sq, &det_exact(&m).unwrap()));
    }

    #[test]
    fn frobenius_is_additive(seed in any::<u64>(), pi in 0..4usize, d in 1..4u32) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let p = fp.p() as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (random_form(fp, 2, d, &mut rng), random_form(fp, 2, d, &mut rng));
        prop_assert_eq!(f.add(&g).unwrap().pow(p), f.pow(p).add(&g.pow(p)).unwrap());
    }

    #[test]
    fn normal_forms_are_idempotent_and_linear(seed in any::<u64>(), pi in 0..4usize, d in 1..5u32, e in 0..4u32, c in 0..7u32) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = nonzero_form(fp, d, &mut rng);
        let (f1, f2) = (random_form(fp, 2, d + e, &mut rng), random_form(fp, 2, d + e, &mut rng));
        let nf = f1.reduce_mod(&g).unwrap();
        prop_assert_eq!(nf.reduce_mod(&g).unwrap(), nf.clone());
        let combo = f1.add(&f2.scale(c)).unwrap().reduce_mod(&g).unwrap();
        prop_assert_eq!(combo, nf.add(&f2.reduce_mod(&g).unwrap().scale(c)).unwrap());
        // f - NF(f) lies in the ideal
        let diff = f1.sub(&nf).unwrap();
        prop_assert!(diff.is_zero() || diff.div_exact(&g).unwrap().is_some());
    }

    #[test]
    fn tabulated_reduction_round_trips(seed in any::<u64>(), pi in 0..4usize, d in 1..4u32, j in 0..6u32) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = nonzero_form(fp, d, &mut rng);
        let ring = QuotientRing::new(&g, 6).unwrap();
        let f = random_form(fp, 2, j, &mut rng);
        let v = ring.reduce(&f).unwrap();
        prop_assert_eq!(ring.reduce(&ring.lift(j, &v).unwrap()).unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn variable_actions_commute(seed in any::<u64>(), pi in 0..3usize, d in 2..5u32) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = HypersurfaceSpec::new(nonzero_form(fp, d, &mut rng)).unwrap();
        prop_assert!(pushforward_module(&h, 3).unwrap().check_commutativity());
        if let Ok(c) = b1_cokernel_module(&h, 3) {
            prop_assert!(c.check_commutativity());
        }
    }

    #[test]
    fn reports_are_deterministic(seed in any::<u64>(), pi in 0..2usize) {
        let fp = Fp::new(PRIMES[pi]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = HypersurfaceSpec::new(nonzero_form(fp, 3, &mut rng)).unwrap();
        let opts = PipelineOptions { seed, ..PipelineOptions::default() };
        prop_assert_eq!(analyze_spec(&h, &opts).canonical_json().unwrap(), analyze_spec(&h, &opts).canonical_json().unwrap());
    }
}
