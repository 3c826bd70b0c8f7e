//! Stratified dataset splitting, atomic over augmentation groups.

use std::collections::HashMap;

use rand::seq::SliceRandom;

use crate::classify::LabeledSet;
use crate::error::{Error, Result};
use crate::rng::{rng_for, Stream};

/// Per class, the sample indices bundled by group key. Samples without a
/// group table each form their own group. Layout follows first appearance
/// so shuffles are the only source of order variation.
fn groups_by_class(data: &LabeledSet) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut per_class: Vec<Vec<Vec<usize>>> = vec![Vec::new(); data.n_classes()];
    let mut seen: HashMap<&str, (usize, usize)> = HashMap::new();
    for i in 0..data.len() {
        let class = data.labels[i];
        match data.groups.as_ref().map(|g| g[i].as_str()) {
            None => per_class[class].push(vec![i]),
            Some(key) => match seen.get(key) {
                None => {
                    per_class[class].push(vec![i]);
                    seen.insert(key, (class, per_class[class].len() - 1));
                }
                Some(&(c, slot)) => {
                    if c != class {
                        return Err(Error::data(format!(
                            "group '{key}' spans classes '{}' and '{}'",
                            data.class_names[c], data.class_names[class]
                        )));
                    }
                    per_class[c][slot].push(i);
                }
            },
        }
    }
    Ok(per_class)
}

/// Stratified k-fold split; returns k sorted test-index lists that
/// partition the dataset. Groups never straddle folds. Per class, group
/// order is shuffled from the seed and dealt round-robin with a
/// class-dependent starting fold so remainders spread across folds instead
/// of piling onto fold 0. With singleton groups the per-class fold sizes
/// differ by at most one.
pub fn split_kfold(data: &LabeledSet, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid(format!("k-fold needs k >= 2, got {k}")));
    }
    data.validate()?;
    if k > data.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the {} samples available",
            data.len()
        )));
    }
    for (c, &count) in data.class_counts().iter().enumerate() {
        if count < k {
            return Err(Error::data(format!(
                "class '{}' has {count} samples, fewer than k = {k}",
                data.class_names[c]
            )));
        }
    }
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (class, mut groups) in groups_by_class(data)?.into_iter().enumerate() {
        let mut rng = rng_for(seed, Stream::SplitKfold, class as u64);
        groups.shuffle(&mut rng);
        for (p, group) in groups.into_iter().enumerate() {
            folds[(p + class) % k].extend(group);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Stratified holdout; returns sorted (train, test) index lists. Per class
/// the train side receives floor(fraction × class size) samples when groups
/// are singletons; larger groups go wholly to one side, filling train in
/// shuffled order while room under the target remains.
pub fn split_holdout(
    data: &LabeledSet,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!(
            "holdout fraction must be in (0, 1), got {fraction}"
        )));
    }
    data.validate()?;
    let counts = data.class_counts();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut groups) in groups_by_class(data)?.into_iter().enumerate() {
        let mut rng = rng_for(seed, Stream::SplitHoldout, class as u64);
        groups.shuffle(&mut rng);
        // nudge against representation error so e.g. 0.7 of 10 targets 7
        let target = (fraction * counts[class] as f64 + 1e-9).floor() as usize;
        let mut taken = 0;
        for group in groups {
            if taken + group.len() <= target {
                taken += group.len();
                train.extend(group);
            } else {
                test.extend(group);
            }
        }
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Set with the given per-class sample counts, 1-D vectors, no groups.
    fn set(counts: &[usize]) -> LabeledSet {
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for (c, &n) in counts.iter().enumerate() {
            for i in 0..n {
                vectors.push(vec![c as f64 * 100.0 + i as f64]);
                labels.push(c);
            }
        }
        let class_names = (0..counts.len()).map(|c| format!("c{c}")).collect();
        LabeledSet { vectors, labels, class_names, groups: None }
    }

    fn assert_partition(parts: &[&[usize]], n: usize) {
        let mut all: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn holdout_floor_rule_66_of_100() {
        let data = set(&[100]);
        let (train, test) = split_holdout(&data, 0.66, 1).unwrap();
        assert_eq!(train.len(), 66);
        assert_eq!(test.len(), 34);
        assert_partition(&[&train, &test], 100);
    }

    #[test]
    fn holdout_floor_rule_avoids_float_droop() {
        let (train, test) = split_holdout(&set(&[10]), 0.7, 1).unwrap();
        assert_eq!((train.len(), test.len()), (7, 3));
    }

    #[test]
    fn holdout_is_stratified_per_class() {
        let data = set(&[50, 30, 20]);
        let (train, test) = split_holdout(&data, 0.8, 7).unwrap();
        assert_partition(&[&train, &test], 100);
        for (c, want) in [(0, 40), (1, 24), (2, 16)] {
            let got = train.iter().filter(|&&i| data.labels[i] == c).count();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn holdout_fraction_bounds_are_usage_errors() {
        for bad in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            let err = split_holdout(&set(&[10]), bad, 1).unwrap_err();
            assert!(err.is_usage(), "{bad} should be a usage error");
        }
    }

    #[test]
    fn kfold_2100_entries_give_folds_of_420() {
        let data = set(&[350; 6]);
        let folds = split_kfold(&data, 5, 42).unwrap();
        assert_eq!(folds.len(), 5);
        for fold in &folds {
            assert_eq!(fold.len(), 420);
            for c in 0..6 {
                assert_eq!(fold.iter().filter(|&&i| data.labels[i] == c).count(), 70);
            }
        }
        let refs: Vec<&[usize]> = folds.iter().map(|f| f.as_slice()).collect();
        assert_partition(&refs, 2100);
    }

    #[test]
    fn kfold_balances_ragged_classes_within_one() {
        let data = set(&[37, 11, 52, 20]);
        let folds = split_kfold(&data, 4, 13).unwrap();
        let refs: Vec<&[usize]> = folds.iter().map(|f| f.as_slice()).collect();
        assert_partition(&refs, 120);
        for fold in &folds {
            assert_eq!(fold.len(), 30);
        }
        for c in 0..4 {
            let sizes: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| data.labels[i] == c).count())
                .collect();
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            assert!(hi - lo <= 1, "class {c} fold sizes {sizes:?}");
            // proportion in each fold within one sample of the global share
            for (f, &s) in sizes.iter().enumerate() {
                let expected = folds[f].len() as f64 * data.class_counts()[c] as f64 / 120.0;
                assert!((s as f64 - expected).abs() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn kfold_keeps_groups_whole() {
        let mut data = set(&[12, 9]);
        // three samples per source image
        let groups: Vec<String> = (0..21).map(|i| format!("img{}", i / 3)).collect();
        data.groups = Some(groups.clone());
        let folds = split_kfold(&data, 3, 5).unwrap();
        let refs: Vec<&[usize]> = folds.iter().map(|f| f.as_slice()).collect();
        assert_partition(&refs, 21);
        for key in groups.iter().collect::<std::collections::HashSet<_>>() {
            let members: Vec<usize> = (0..21).filter(|&i| &groups[i] == key).collect();
            let homes: Vec<usize> = members
                .iter()
                .map(|&m| folds.iter().position(|f| f.contains(&m)).unwrap())
                .collect();
            assert!(homes.windows(2).all(|w| w[0] == w[1]), "group {key} straddles folds");
        }
    }

    #[test]
    fn holdout_keeps_groups_whole() {
        let mut data = set(&[12, 9]);
        let groups: Vec<String> = (0..21).map(|i| format!("img{}", i / 3)).collect();
        data.groups = Some(groups.clone());
        let (train, test) = split_holdout(&data, 0.66, 5).unwrap();
        assert_partition(&[&train, &test], 21);
        for key in groups.iter().collect::<std::collections::HashSet<_>>() {
            let members: Vec<usize> = (0..21).filter(|&i| &groups[i] == key).collect();
            let in_train = members.iter().filter(|&&m| train.contains(&m)).count();
            assert!(in_train == 0 || in_train == members.len(), "group {key} split");
        }
    }

    #[test]
    fn group_spanning_two_classes_is_rejected() {
        let mut data = set(&[2, 2]);
        data.groups = Some(vec!["a".into(), "b".into(), "b".into(), "c".into()]);
        let err = split_kfold(&data, 2, 1).unwrap_err();
        assert!(err.to_string().contains("spans classes"), "{err}");
    }

    #[test]
    fn kfold_names_the_undersized_class() {
        let data = set(&[10, 3]);
        let err = split_kfold(&data, 5, 1).unwrap_err();
        assert!(err.to_string().contains("'c1'"), "{err}");
        assert!(err.to_string().contains("3 samples"), "{err}");
    }

    #[test]
    fn kfold_k_bounds_are_usage_errors() {
        assert!(split_kfold(&set(&[10]), 1, 1).unwrap_err().is_usage());
        assert!(split_kfold(&set(&[4, 4]), 9, 1).unwrap_err().is_usage());
    }

    #[test]
    fn splits_are_seed_deterministic() {
        let data = set(&[23, 17, 31]);
        assert_eq!(split_kfold(&data, 4, 9).unwrap(), split_kfold(&data, 4, 9).unwrap());
        assert_ne!(split_kfold(&data, 4, 9).unwrap(), split_kfold(&data, 4, 10).unwrap());
        assert_eq!(
            split_holdout(&data, 0.66, 9).unwrap(),
            split_holdout(&data, 0.66, 9).unwrap()
        );
        assert_ne!(
            split_holdout(&data, 0.66, 9).unwrap(),
            split_holdout(&data, 0.66, 10).unwrap()
        );
    }
}
