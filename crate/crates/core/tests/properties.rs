use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use proptest::prelude::*;

use psu3_core::cache::{decode_block, decode_sets, encode_block, encode_sets};
use psu3_core::euler::{brown_check, gaussian_binomial, prime_case, CaseTag};
use psu3_core::field::BinaryField;
use psu3_core::moebius::{dual_check, mobius_from_top, PosetTable};
use psu3_core::perm::Perm;

fn field(degree: u32) -> BinaryField {
    BinaryField::conway(degree).unwrap()
}

fn perm_strategy(max_degree: usize) -> impl Strategy<Value = Vec<u32>> {
    (1..=max_degree).prop_flat_map(|n| Just((0..n as u32).collect::<Vec<u32>>()).prop_shuffle())
}

/// A random bounded poset on `n` nodes: node 0 is the top, node `n-1` the
/// bottom, and `x < z` only when `z < x` as integers.
fn poset_strategy() -> impl Strategy<Value = (usize, Vec<bool>)> {
    (3usize..14).prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), n * n)))
}

fn build_poset(n: usize, bits: &[bool]) -> PosetTable {
    let mut leq = vec![vec![false; n]; n];
    for x in 0..n {
        leq[x][x] = true;
        leq[x][0] = true;
        leq[n - 1][x] = true;
        for z in 0..x {
            if bits[x * n + z] {
                leq[x][z] = true;
            }
        }
    }
    for k in (0..n).rev() {
        for x in 0..n {
            for z in 0..n {
                if leq[x][k] && leq[k][z] {
                    leq[x][z] = true;
                }
            }
        }
    }
    PosetTable::from_leq(n, |x, z| leq[x as usize][z as usize]).unwrap()
}

proptest! {
    #[test]
    fn field_axioms(deg in prop::sample::select(vec![2u32, 4, 8, 16]), a: u32, b: u32, c: u32) {
        let f = field(deg);
        let mask = (f.size() - 1) as u32;
        let (a, b, c) = (a & mask, b & mask, c & mask);
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
        prop_assert_eq!(f.mul(a, 1), a);
        match f.inv(a) {
            Some(i) => prop_assert_eq!(f.mul(a, i), 1),
            None => prop_assert_eq!(a, 0),
        }
        // Frobenius is additive.
        prop_assert_eq!(f.pow(a ^ b, 2), f.pow(a, 2) ^ f.pow(b, 2));
        prop_assert_eq!(f.pow(a, f.size()), a);
    }

    #[test]
    fn perm_group_laws(p in perm_strategy(24), seed in any::<u64>()) {
        let n = p.len();
        let mut q_images: Vec<u32> = (0..n as u32).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            q_images.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = Perm::from_images(p).unwrap();
        let q = Perm::from_images(q_images).unwrap();
        prop_assert!(p.compose(&p.inverse()).is_identity());
        prop_assert_eq!(p.compose(&q).inverse(), q.inverse().compose(&p.inverse()));
        let c = p.conjugate_by(&q);
        prop_assert_eq!(c.order(), p.order());
        prop_assert_eq!(c.fixed_count(), p.fixed_count());
        let mut power = Perm::identity(n);
        for _ in 0..p.order() {
            power = power.compose(&p);
        }
        prop_assert!(power.is_identity());
    }

    #[test]
    fn gaussian_pascal(m in 1u32..9, r in 0u32..9, b in prop::sample::select(vec![2u64, 3, 4, 5])) {
        prop_assume!(r <= m);
        let lhs = gaussian_binomial(m, r, b).unwrap();
        let rhs = if r == 0 {
            BigInt::one()
        } else {
            let left = gaussian_binomial(m - 1, r - 1, b).unwrap();
            let right = if r < m { gaussian_binomial(m - 1, r, b).unwrap() } else { BigInt::zero() };
            left + Pow::pow(BigInt::from(b), r) * right
        };
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(lhs, gaussian_binomial(m, m - r, b).unwrap());
    }

    #[test]
    fn mobius_relabel_invariant((n, bits) in poset_strategy(), seed in any::<u64>()) {
        let p = build_poset(n, &bits);
        let mu = mobius_from_top(&p).unwrap();
        prop_assert!(dual_check(&p, &mu, None).unwrap());
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let r = p.relabelled(&perm).unwrap();
        let mu_r = mobius_from_top(&r).unwrap();
        for x in 0..n {
            prop_assert_eq!(&mu_r[perm[x] as usize], &mu[x]);
        }
        // Defining recursion: sum over [x, top] vanishes for x below the top.
        for x in 1..n as u32 {
            let s: BigInt = p.up(x).iter().map(|&z| &mu[z as usize]).sum::<BigInt>() + &mu[x as usize];
            prop_assert!(s.is_zero());
        }
    }

    #[test]
    fn cache_encoding_round_trip(sets in proptest::collection::vec(proptest::collection::vec(any::<u32>(), 0..20), 0..20)) {
        let words = encode_sets(&sets);
        prop_assert_eq!(decode_sets(&words).unwrap(), sets);
        let bytes = encode_block(&words).unwrap();
        prop_assert_eq!(decode_block(&bytes).unwrap(), words);
    }

    #[test]
    fn brown_is_a_congruence(chi in -100_000i64..100_000, k in 0u32..6) {
        let m = 5u64.pow(k);
        let holds = brown_check(&BigInt::from(chi), m);
        prop_assert_eq!(holds, (chi - 1).rem_euclid(m as i64) == 0);
    }
}

#[test]
fn every_prime_has_one_case_at_q4() {
    for p in (2u64..200).filter(|&p| (2..p).all(|d| p % d != 0)) {
        let c = prime_case(4, p).unwrap();
        let divides = 62400 % p == 0;
        assert_eq!(c.case_tag == CaseTag::NotDividing, !divides, "p = {p}");
        assert_eq!(62400 % c.sylow_order, 0);
    }
}
