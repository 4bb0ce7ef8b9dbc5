use proptest::prelude::*;

use symmetroid::density::{
    b_of_p, b_of_p_counting, census_bp, classify_frame, gaussian_count, sample_frame, sp_member, sp_member_fast,
    Frame,
};
use symmetroid::exact::{is_prime, Int};
use symmetroid::nullstellensatz::empty_all_primes;
use symmetroid::pencil::{v3_ideal, Pencil};
use symmetroid::quadform::QuadricForm;

fn reduce(f: &Frame, p: u64) -> Vec<[u64; 15]> {
    f.iter().map(|r| r.map(|x| x.rem_euclid(p as i64) as u64)).collect()
}

fn prime() -> impl Strategy<Value = u64> {
    (2u64..5000).prop_filter("prime", |&p| is_prime(p))
}

fn frame() -> impl Strategy<Value = Frame> {
    prop::array::uniform5(prop::array::uniform15(-3i64..=3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_is_counting_route(p in prime()) {
        prop_assert_eq!(b_of_p(p).unwrap(), b_of_p_counting(p).unwrap());
    }

    #[test]
    fn grassmannian_duality(k in 0u32..6, extra in 1u32..5, p in prop::sample::select(vec![2u64, 3, 5, 7, 11])) {
        // k-planes in Pⁿ correspond to (n − 1 − k)-planes in the dual space
        let n = k + extra;
        prop_assert_eq!(gaussian_count(k, n, p).unwrap(), gaussian_count(n - 1 - k, n, p).unwrap());
    }

    /// S_p membership depends only on the span of the five quadrics.
    #[test]
    fn scan_depends_only_on_the_plane(f in frame(), i in 0usize..5, j in 0usize..5, c in -3i64..=3, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assume!(i != j);
        let mut g = f;
        g.swap(0, 4);
        g.swap(1, 3);
        let src = g[j];
        for k in 0..15 {
            g[i][k] += c * src[k];
        }
        let a = sp_member_fast(&reduce(&f, p), p).unwrap();
        let b = sp_member_fast(&reduce(&g, p), p).unwrap();
        prop_assert_eq!(a.is_member(), b.is_member());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// A pencil avoiding the rank ≤ 2 locus over every prime is in no S_p.
    #[test]
    fn v3_certificate_implies_no_sp(f in frame()) {
        let qs: Vec<QuadricForm> = f.iter().map(|r| QuadricForm::from_i64(*r)).collect();
        let Ok(pencil) = Pencil::new(qs) else { return Ok(()) };
        let e = empty_all_primes(&v3_ideal(&pencil).unwrap(), false, 4).unwrap();
        if e.is_empty() {
            for p in [2u64, 3, 5, 7, 11, 13] {
                prop_assert!(!sp_member(&pencil, p).unwrap().is_member());
            }
        }
    }

    /// Reversing the rows of every sample leaves the verdicts unchanged.
    #[test]
    fn sample_verdicts_invariant_under_row_order(seed in 0u64..1000, index in 0u64..1000) {
        let f = sample_frame(seed, index, 10);
        let mut g = f;
        g.reverse();
        let a: Vec<bool> = classify_frame(&f, 13).unwrap().iter().map(|v| v.1).collect();
        let b: Vec<bool> = classify_frame(&g, 13).unwrap().iter().map(|v| v.1).collect();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn census_contains_the_double_planes() {
    let r = census_bp(2).unwrap();
    assert!(Int::from(r.without_smooth_point) >= gaussian_count(3, 4, 2).unwrap());
    assert_eq!(r.quadrics, 32767);
}
