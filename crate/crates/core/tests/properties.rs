use proptest::prelude::*;

use xsort_core::harness::verify;
use xsort_core::localcore::{merge_two, multiway_merge, partition_even, split_sorted, SegmentTable};
use xsort_core::{run_variant, spawn_spmd, Comm, SortConfig, Variant};

fn sorted(mut v: Vec<i64>) -> Vec<i64> {
    v.sort();
    v
}

fn small_keys() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-20i64..20, 0..80)
}

proptest! {
    #[test]
    fn partition_even_contract(a in small_keys(), pivot in -22i64..22) {
        let mut b = a.clone();
        let n0 = partition_even(&mut b, pivot);
        let less = a.iter().filter(|&&x| x < pivot).count();
        let equal = a.iter().filter(|&&x| x == pivot).count();
        prop_assert_eq!(n0, less + equal.div_ceil(2));
        prop_assert!(b[..n0].iter().all(|&x| x <= pivot));
        prop_assert!(b[n0..].iter().all(|&x| x >= pivot));
        prop_assert_eq!(sorted(b), sorted(a));
    }

    #[test]
    fn split_sorted_matches_linear_scan(a in small_keys(), pivot in -22i64..22) {
        let a = sorted(a);
        let lb = a.iter().take_while(|&&x| x < pivot).count();
        let ub = a.iter().take_while(|&&x| x <= pivot).count();
        let n0 = split_sorted(&a, &pivot);
        prop_assert_eq!(n0, lb + (ub - lb) / 2);
        // the two kernels differ only in how an odd run of equal keys rounds
        let mut b = a.clone();
        let even = partition_even(&mut b, pivot);
        prop_assert_eq!(even - n0, (ub - lb) % 2);
    }

    #[test]
    fn merges_match_sort_of_concat(runs in prop::collection::vec(small_keys(), 0..10)) {
        let runs: Vec<Vec<i64>> = runs.into_iter().map(sorted).collect();
        let expected = sorted(runs.concat());
        prop_assert_eq!(multiway_merge(&runs), expected.clone());
        if runs.len() >= 2 {
            prop_assert_eq!(merge_two(&runs[0], &runs[1]), sorted([runs[0].clone(), runs[1].clone()].concat()));
        }
    }

    #[test]
    fn refine_keeps_segments_contiguous(lengths in prop::collection::vec(0usize..20, 1..9), seed in any::<u64>()) {
        let mut table = SegmentTable::from_lengths(&lengths);
        let cuts: Vec<usize> = lengths.iter().enumerate().map(|(i, &l)| (seed as usize >> i) % (l + 1)).collect();
        table.refine(&cuts).unwrap();
        prop_assert_eq!(table.active_count(), 2 * lengths.len());
        prop_assert_eq!(table.total_len(), lengths.iter().sum::<usize>());
        prop_assert!(table.validate(table.total_len()).is_ok());
        for j in 0..lengths.len() {
            prop_assert_eq!(table.lengths()[2 * j], cuts[j]);
            prop_assert_eq!(table.lengths()[2 * j + 1], lengths[j] - cuts[j]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alltoall_is_a_transpose(k in 0u32..4, entries in prop::collection::vec(0usize..50, 64)) {
        let p = 1usize << k;
        let matrix: Vec<Vec<usize>> = (0..p).map(|r| entries[r * p..(r + 1) * p].to_vec()).collect();
        let rows = matrix.clone();
        let run = spawn_spmd(p, vec![Vec::<i64>::new(); p], move |c: Comm<i64>, _| {
            let row = rows[c.rank()].clone();
            async move { c.alltoall_counts(row).await }
        }).unwrap();
        for (r, got) in run.outputs.iter().enumerate() {
            let column: Vec<usize> = (0..p).map(|s| matrix[s][r]).collect();
            prop_assert_eq!(got, &column);
        }
    }

    #[test]
    fn alltoallv_conserves_elements(k in 0u32..4, bufs in prop::collection::vec(small_keys(), 8)) {
        let p = 1usize << k;
        let inputs: Vec<Vec<i64>> = bufs[..p].to_vec();
        let run = spawn_spmd(p, inputs.clone(), |c: Comm<i64>, a| async move {
            // even-ish cut of each buffer into p segments
            let n = a.len();
            let lengths: Vec<usize> = (0..c.size()).map(|j| (j + 1) * n / c.size() - j * n / c.size()).collect();
            c.alltoallv(&a, &SegmentTable::from_lengths(&lengths)).await
        }).unwrap();
        let received: Vec<i64> = run.outputs.iter().flat_map(|(d, _)| d.clone()).collect();
        prop_assert_eq!(sorted(received), sorted(inputs.concat()));
        let t = run.total_trace();
        prop_assert_eq!(t.element_units_alltoallv, t.element_units_alltoallv_received);
        prop_assert!(t.element_units_alltoallv as usize <= inputs.iter().map(Vec::len).sum::<usize>());
    }

    #[test]
    fn collectives_agree_on_every_rank(k in 0u32..5, vals in prop::collection::vec(any::<i64>(), 16)) {
        let p = 1usize << k;
        let inputs: Vec<Vec<i64>> = (0..p).map(|r| vec![vals[r]]).collect();
        let run = spawn_spmd(p, inputs, |c: Comm<i64>, a| async move {
            let mm = c.allreduce_minmax(vec![Some((a[0], a[0]))]).await?;
            let mean = c.allreduce_mean(vec![Some(a[0])]).await?;
            let b = c.bcast(c.size() - 1, a).await?;
            Ok((mm, mean, b))
        }).unwrap();
        let lo = *vals[..p].iter().min().unwrap();
        let hi = *vals[..p].iter().max().unwrap();
        for out in &run.outputs {
            prop_assert_eq!(out, &run.outputs[0]);
        }
        prop_assert_eq!(&run.outputs[0].0, &vec![Some((lo, hi))]);
        let mean = run.outputs[0].1[0].unwrap();
        prop_assert!(lo <= mean && mean <= hi);
        prop_assert_eq!(&run.outputs[0].2, &vec![vals[p - 1]]);
    }

    #[test]
    fn every_variant_sorts(
        variant in prop::sample::select(Variant::ALL.to_vec()),
        k in 0u32..5,
        keys in prop::collection::vec(-50i64..50, 0..600),
        seed in any::<u64>(),
    ) {
        let p = 1usize << k;
        let inputs: Vec<Vec<i64>> = (0..p).map(|r| keys.iter().skip(r).step_by(p).copied().collect()).collect();
        let cfg = SortConfig { seed, debug_asserts: true, ..SortConfig::default() };
        let run = run_variant(variant, inputs.clone(), &cfg).unwrap();
        let report = verify(&inputs, &run.outputs());
        prop_assert!(report.all_ok(), "{:?}", report);
        if variant.is_exchange_free() {
            prop_assert_eq!(run.total_trace().element_units_sent, 0);
        }
        // same seed, same run
        let again = run_variant(variant, inputs, &cfg).unwrap();
        prop_assert_eq!(again.outputs(), run.outputs());
        prop_assert_eq!(again.traces, run.traces);
    }
}
