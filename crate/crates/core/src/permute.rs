//! Perfect-shuffle permutation between time-slot-major and
//! subcarrier-major orderings of an MN-length block.
//!
//! `forward` is the action of P: `out[i] = v[(i mod M)·N + ⌊i/M⌋]`, which
//! gathers the M samples sharing an in-slot index into one contiguous run.
//! `inverse` is Pᵀ: `out[i] = v[(i mod N)·M + ⌊i/N⌋]`.

use crate::error::{check_len, Result};
use crate::params::GfdmParams;

/// Applies P. Fails on a length mismatch.
pub fn permute_forward<T: Copy>(v: &[T], params: &GfdmParams) -> Result<Vec<T>> {
    check_len("permute_forward input", v.len(), params.mn())?;
    let mut out = v.to_vec();
    shuffle_into(v, &mut out, params.m, params.n);
    Ok(out)
}

/// Applies Pᵀ, the inverse of [`permute_forward`].
pub fn permute_inverse<T: Copy>(v: &[T], params: &GfdmParams) -> Result<Vec<T>> {
    check_len("permute_inverse input", v.len(), params.mn())?;
    let mut out = v.to_vec();
    shuffle_into(v, &mut out, params.n, params.m);
    Ok(out)
}

/// Writes `out[i] = src[(i mod stride)·run + ⌊i/stride⌋]`.
///
/// With `(stride, run) = (M, N)` this is P; with `(N, M)` it is Pᵀ.
pub(crate) fn shuffle_into<T: Copy>(src: &[T], out: &mut [T], stride: usize, run: usize) {
    debug_assert_eq!(src.len(), stride * run);
    debug_assert_eq!(out.len(), src.len());
    // out index i = j·stride + s  <->  src index s·run + j
    for (j, chunk) in out.chunks_exact_mut(stride).enumerate() {
        for (s, o) in chunk.iter_mut().enumerate() {
            *o = src[s * run + j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(m: usize, n: usize) -> GfdmParams {
        GfdmParams::new(m, n).unwrap()
    }

    #[test]
    fn two_by_two() {
        let v = ['a', 'b', 'c', 'd'];
        assert_eq!(permute_forward(&v, &p(2, 2)).unwrap(), vec!['a', 'c', 'b', 'd']);
        let w = ['a', 'c', 'b', 'd'];
        assert_eq!(permute_inverse(&w, &p(2, 2)).unwrap(), vec!['a', 'b', 'c', 'd']);
    }

    #[test]
    fn three_by_two() {
        let v: Vec<usize> = (0..6).collect();
        assert_eq!(permute_forward(&v, &p(3, 2)).unwrap(), vec![0, 2, 4, 1, 3, 5]);
    }

    #[test]
    fn identity_cases() {
        let v: Vec<usize> = (0..7).collect();
        assert_eq!(permute_forward(&v, &p(1, 7)).unwrap(), v);
        assert_eq!(permute_inverse(&v, &p(7, 1)).unwrap(), v);
    }

    #[test]
    fn length_mismatch() {
        assert!(permute_forward(&[1, 2, 3], &p(2, 2)).is_err());
        assert!(permute_inverse(&[1, 2, 3], &p(2, 2)).is_err());
    }

    /// Row l of P has its single one at column (l mod M)·N + ⌊l/M⌋.
    #[test]
    fn matches_matrix_definition() {
        for (m, n) in [(2, 2), (4, 8), (8, 4), (3, 5), (1, 16), (16, 4)] {
            let prm = p(m, n);
            let mn = m * n;
            for q in 0..mn {
                let mut e = vec![0u8; mn];
                e[q] = 1;
                let out = permute_forward(&e, &prm).unwrap();
                // P e_q is column q of P: the single row l with p[l][q] = 1
                let rows: Vec<usize> = (0..mn).filter(|&l| out[l] == 1).collect();
                assert_eq!(rows.len(), 1);
                let l = rows[0];
                assert_eq!((l % m) * n + l / m, q);
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_undoes_forward(m in 1usize..12, n in 1usize..12, seed in any::<u64>()) {
            let prm = p(m, n);
            let v: Vec<u64> = (0..(m * n) as u64).map(|i| i.wrapping_mul(seed | 1)).collect();
            let f = permute_forward(&v, &prm).unwrap();
            prop_assert_eq!(permute_inverse(&f, &prm).unwrap(), v.clone());
            let b = permute_inverse(&v, &prm).unwrap();
            prop_assert_eq!(permute_forward(&b, &prm).unwrap(), v);
        }
    }
}
