/// Weighted least-squares projection of `y` onto non-increasing sequences
/// (pool adjacent violators).
pub(crate) fn project_nonincreasing(y: &[f64], w: &[f64], out: &mut Vec<f64>) {
    // blocks of (weighted sum, weight, length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        blocks.push((yi * wi, wi, 1));
        while blocks.len() > 1 {
            let (s1, w1, _) = blocks[blocks.len() - 2];
            let (s2, w2, _) = blocks[blocks.len() - 1];
            if s1 / w1 >= s2 / w2 {
                break;
            }
            let last = blocks.pop().unwrap();
            let prev = blocks.last_mut().unwrap();
            prev.0 += last.0;
            prev.1 += last.1;
            prev.2 += last.2;
        }
    }
    out.clear();
    for (s, w, len) in blocks {
        out.extend(std::iter::repeat_n(s / w, len));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_sorted_input() {
        let y = [5.0, 3.0, 3.0, 1.0];
        let mut out = Vec::new();
        project_nonincreasing(&y, &[1.0; 4], &mut out);
        assert_eq!(out, y);
    }

    #[test]
    fn pools_violations() {
        let mut out = Vec::new();
        project_nonincreasing(&[1.0, 3.0], &[1.0, 1.0], &mut out);
        assert_eq!(out, vec![2.0, 2.0]);
        project_nonincreasing(&[1.0, 3.0], &[3.0, 1.0], &mut out);
        assert_eq!(out, vec![1.5, 1.5]);
        project_nonincreasing(&[4.0, 1.0, 2.0, 3.0, 0.0], &[1.0; 5], &mut out);
        assert_eq!(out, vec![4.0, 2.0, 2.0, 2.0, 0.0]);
    }
}
