//! Canonical enumeration orders shared by the solvers and the cause search.

/// Lexicographic `k`-subsets of `items`.
pub fn combinations<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let n = items.len();
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if idx[j] < n - k + j {
                idx[j] += 1;
                for t in j + 1..k {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All subsets of `items` by size, then lexicographically.
pub fn subsets<T: Copy>(items: &[T]) -> Vec<Vec<T>> {
    (0..=items.len()).flat_map(|k| combinations(items, k)).collect()
}

/// Every value vector over domains of the given sizes, last entry fastest.
pub fn odometer(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; sizes.len()];
    loop {
        out.push(cur.clone());
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < sizes[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}
