use pbc::eval::{accuracy, confusion, hungarian};
use pbc_oracles as common;
use proptest::prelude::*;

fn labelings(max_n: usize, max_k: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1..=max_n, 1..=max_k, 1..=max_k).prop_flat_map(|(n, kp, kt)| {
        (
            prop::collection::vec(0..kp, n),
            prop::collection::vec(0..kt, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn equals_permutation_search((pred, truth) in labelings(60, 6)) {
        let got = accuracy(&pred, &truth).unwrap();
        prop_assert!((got - common::brute_force_accuracy(&pred, &truth)).abs() < 1e-12);
    }

    #[test]
    fn relabeling_changes_nothing((pred, truth) in labelings(80, 6), sp in Just(()).prop_perturb(|_, mut rng| {
        let mut p: Vec<usize> = (0..6).collect();
        for i in (1..6).rev() { p.swap(i, rng.random_range(0..=i)); }
        p
    }), st in Just(()).prop_perturb(|_, mut rng| {
        let mut p: Vec<usize> = (0..6).collect();
        for i in (1..6).rev() { p.swap(i, rng.random_range(0..=i)); }
        p
    })) {
        let a = accuracy(&pred, &truth).unwrap();
        let pred2: Vec<usize> = pred.iter().map(|&l| sp[l]).collect();
        let truth2: Vec<usize> = truth.iter().map(|&l| st[l]).collect();
        prop_assert_eq!(a, accuracy(&pred2, &truth2).unwrap());
    }

    #[test]
    fn single_class_scores_the_majority_share((pred, truth) in labelings(80, 6)) {
        let mut sizes = [0usize; 6];
        for &t in &truth {
            sizes[t] += 1;
        }
        let majority = *sizes.iter().max().unwrap() as f64 / truth.len() as f64;
        // a single predicted class is matched against the majority class
        let ones = vec![0; pred.len()];
        prop_assert!((accuracy(&ones, &truth).unwrap() - majority).abs() < 1e-12);
    }

    #[test]
    fn confusion_rows_sum_to_prediction_counts((pred, truth) in labelings(60, 5)) {
        let cm = confusion(&pred, &truth).unwrap();
        let total: usize = cm.counts.iter().flatten().sum();
        prop_assert_eq!(total, pred.len());
        for (a, row) in cm.counts.iter().enumerate() {
            prop_assert_eq!(row.iter().sum::<usize>(), pred.iter().filter(|&&p| p == a).count());
        }
    }

    #[test]
    fn hungarian_is_optimal(cost in (1usize..=6).prop_flat_map(|k| prop::collection::vec(prop::collection::vec(-50i64..50, k), k))) {
        let k = cost.len();
        let assign = hungarian(&cost);
        let total: i64 = (0..k).map(|i| cost[i][assign[i]]).sum();
        let mut best = i64::MAX;
        let mut perm: Vec<usize> = (0..k).collect();
        permutations(&mut perm, 0, &mut |p| {
            best = best.min((0..k).map(|i| cost[i][p[i]]).sum());
        });
        prop_assert_eq!(total, best);
    }
}

fn permutations(v: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permutations(v, i + 1, f);
        v.swap(i, j);
    }
}
