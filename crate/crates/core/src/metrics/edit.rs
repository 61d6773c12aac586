//! Levenshtein edit distance over symbol sequences.

/// Standard edit distance with unit insert/delete/substitute costs,
/// two-row dynamic program.
pub fn levenshtein(a: &[u16], b: &[u16]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_is_zero() {
        assert_eq!(levenshtein(&[1, 2, 3], &[1, 2, 3]), 0);
        assert_eq!(levenshtein(&[], &[]), 0);
    }

    #[test]
    fn against_empty_is_length() {
        assert_eq!(levenshtein(&[5, 5, 5, 5], &[]), 4);
        assert_eq!(levenshtein(&[], &[9, 9]), 2);
    }

    #[test]
    fn kitten_sitting_is_three() {
        // "kitten" vs "sitting" symbol-coded: k=0 i=1 t=2 e=3 n=4 s=5 g=6.
        let kitten = [0u16, 1, 2, 2, 3, 4];
        let sitting = [5u16, 1, 2, 2, 1, 4, 6];
        assert_eq!(levenshtein(&kitten, &sitting), 3);
    }

    /// Independent full-matrix oracle for the property test.
    fn dp_oracle(a: &[u16], b: &[u16]) -> usize {
        let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in d.iter_mut().enumerate() {
            row[0] = i;
        }
        for j in 0..=b.len() {
            d[0][j] = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
                d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
            }
        }
        d[a.len()][b.len()]
    }

    proptest! {
        #[test]
        fn matches_full_matrix_oracle(
            a in proptest::collection::vec(0u16..6, 0..12),
            b in proptest::collection::vec(0u16..6, 0..12),
        ) {
            prop_assert_eq!(levenshtein(&a, &b), dp_oracle(&a, &b));
        }

        #[test]
        fn symmetric_and_bounded(
            a in proptest::collection::vec(0u16..6, 0..10),
            b in proptest::collection::vec(0u16..6, 0..10),
        ) {
            let d = levenshtein(&a, &b);
            prop_assert_eq!(d, levenshtein(&b, &a));
            prop_assert!(d <= a.len().max(b.len()));
            let diff = a.len().abs_diff(b.len());
            prop_assert!(d >= diff);
        }
    }
}
