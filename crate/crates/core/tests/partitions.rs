use partlab_core::partition::{
    conjugate_parts, dominates, durfee, enumerate_partitions, erdos_gallai_graphical,
    gale_ryser_bipartite, havel_hakimi_realizable, nash_williams_graphical, DegreePairCheck,
};
use partlab_core::Partition;
use proptest::prelude::*;

fn partition_strategy(max_part: u32, max_len: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(1..=max_part, 0..=max_len)
        .prop_map(|v| Partition::from_unsorted(v).unwrap())
}

/// Exhaustive search for a simple graph with the given degree sequence.
fn brute_graphical(degrees: &[u32]) -> bool {
    let n = degrees.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let target: u32 = degrees.iter().sum();
    if target % 2 == 1 {
        return false;
    }
    fn go(edges: &[(usize, usize)], left: &mut [u32], idx: usize) -> bool {
        if left.iter().all(|&d| d == 0) {
            return true;
        }
        if idx == edges.len() {
            return false;
        }
        let (i, j) = edges[idx];
        if left[i] > 0 && left[j] > 0 {
            left[i] -= 1;
            left[j] -= 1;
            if go(edges, left, idx + 1) {
                return true;
            }
            left[i] += 1;
            left[j] += 1;
        }
        go(edges, left, idx + 1)
    }
    go(&edges, &mut degrees.to_vec(), 0)
}

/// Exhaustive search over 0/1 matrices with the given row sums.
fn brute_bipartite(alpha: &[u32], beta: &[u32]) -> bool {
    fn go(alpha: &[u32], col: &mut [u32], row: usize) -> bool {
        if row == alpha.len() {
            return col.iter().all(|&c| c == 0);
        }
        let m = col.len();
        (0u32..1 << m).any(|mask| {
            if mask.count_ones() != alpha[row] {
                return false;
            }
            if (0..m).any(|j| mask >> j & 1 == 1 && col[j] == 0) {
                return false;
            }
            for j in 0..m {
                col[j] -= mask >> j & 1;
            }
            let ok = go(alpha, col, row + 1);
            for j in 0..m {
                col[j] += mask >> j & 1;
            }
            ok
        })
    }
    go(alpha, &mut beta.to_vec(), 0)
}

#[test]
fn graphical_tests_match_exhaustive_search() {
    for n in (0..=14u32).step_by(2) {
        enumerate_partitions(n, |parts| {
            let p = Partition::new(parts.to_vec()).unwrap();
            let expect = brute_graphical(parts);
            assert_eq!(nash_williams_graphical(&p), expect, "{p}");
            assert_eq!(erdos_gallai_graphical(&p), expect, "{p}");
            assert_eq!(havel_hakimi_realizable(&p), expect, "{p}");
        });
    }
}

#[test]
fn bipartite_test_matches_exhaustive_search() {
    for n in 0..=7u32 {
        let mut all = Vec::new();
        enumerate_partitions(n, |p| all.push(p.to_vec()));
        for a in &all {
            for b in &all {
                if b.len() > 5 {
                    continue;
                }
                let c = DegreePairCheck::new(a.clone(), b.clone()).unwrap();
                assert_eq!(gale_ryser_bipartite(&c), brute_bipartite(a, b), "{a:?} {b:?}");
            }
        }
    }
}

proptest! {
    #[test]
    fn conjugation_is_an_involution(p in partition_strategy(40, 40)) {
        let c = p.conjugate();
        prop_assert_eq!(c.weight(), p.weight());
        prop_assert_eq!(c.conjugate(), p.clone());
        prop_assert_eq!(durfee(c.parts()), durfee(p.parts()));
        prop_assert_eq!(c.len() as u32, p.largest());
    }

    #[test]
    fn conjugation_reverses_dominance(a in partition_strategy(6, 12), b in partition_strategy(6, 12)) {
        // pad the lighter one with ones so the weights agree
        let (mut x, mut y) = (a.parts().to_vec(), b.parts().to_vec());
        let (wx, wy) = (a.weight(), b.weight());
        if wx < wy { x.extend(std::iter::repeat_n(1, (wy - wx) as usize)); }
        else { y.extend(std::iter::repeat_n(1, (wx - wy) as usize)); }
        let (x, y) = (Partition::new(x).unwrap(), Partition::new(y).unwrap());
        let forward = dominates(&x, &y).unwrap();
        let back = dominates(&y.conjugate(), &x.conjugate()).unwrap();
        prop_assert_eq!(forward, back);
    }

    #[test]
    fn graphical_tests_agree(p in partition_strategy(30, 40)) {
        let a = nash_williams_graphical(&p);
        prop_assert_eq!(a, erdos_gallai_graphical(&p));
        prop_assert_eq!(a, havel_hakimi_realizable(&p));
    }

    #[test]
    fn conjugate_counts_parts_at_least_i(p in partition_strategy(25, 25)) {
        let c = conjugate_parts(p.parts());
        for (i, &ci) in c.iter().enumerate() {
            let direct = p.parts().iter().filter(|&&x| x as usize > i).count() as u32;
            prop_assert_eq!(ci, direct);
        }
    }

    #[test]
    fn json_round_trip(p in partition_strategy(50, 30)) {
        let s = serde_json::to_string(&p).unwrap();
        let back: Partition = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn json_rejects_increasing_parts() {
    assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    assert!(serde_json::from_str::<Partition>("[2,0]").is_err());
}
