//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] dispatches to
//! rayon; without it every mode runs on the calling thread. Reductions are
//! always split into fixed-size chunks and summed in chunk order, so both
//! modes produce bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length of the memory-sum reductions.
pub const CHUNK: usize = 4096;

/// Below this length a reduction is not worth handing to the thread pool.
pub const PAR_MIN_LEN: usize = 4 * CHUNK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Applies `f` to every item, preserving order.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Runs two closures, concurrently when parallel.
    pub fn join<A, B, RA, RB>(self, a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return rayon::join(a, b);
        }
        (a(), b())
    }

    /// `Σ_i weights[len-1-i] * values[i]`: a discrete convolution term with
    /// the kernel weights stored in increasing lag order.
    pub fn reversed_dot(self, weights: &[f64], values: &[f64]) -> f64 {
        debug_assert_eq!(weights.len(), values.len());
        let n = values.len();
        let chunk_sum = |start: usize| -> f64 {
            let end = (start + CHUNK).min(n);
            let vals = &values[start..end];
            // weights for values[start..end] are weights[n-end..n-start], reversed
            let ws = &weights[n - end..n - start];
            vals.iter().zip(ws.iter().rev()).map(|(v, w)| v * w).sum()
        };
        let starts: Vec<usize> = (0..n).step_by(CHUNK).collect();
        #[cfg(feature = "parallel")]
        if self.is_parallel() && n >= PAR_MIN_LEN {
            let parts: Vec<f64> = starts.par_iter().map(|&s| chunk_sum(s)).collect();
            return parts.iter().sum();
        }
        starts.iter().map(|&s| chunk_sum(s)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversed_dot_matches_naive_and_both_modes_agree() {
        let n = 3 * CHUNK + 17;
        let w: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.01).sin()).collect();
        let naive: f64 = (0..n).map(|i| w[n - 1 - i] * v[i]).sum();
        let seq = Execution::Sequential.reversed_dot(&w, &v);
        let par = Execution::Parallel.reversed_dot(&w, &v);
        assert!((seq - naive).abs() < 1e-10);
        assert_eq!(seq.to_bits(), par.to_bits());
        let big = 5 * CHUNK;
        let w2 = vec![0.5; big];
        let v2: Vec<f64> = (0..big).map(|i| i as f64).collect();
        assert_eq!(
            Execution::Sequential.reversed_dot(&w2, &v2).to_bits(),
            Execution::Parallel.reversed_dot(&w2, &v2).to_bits()
        );
    }

    #[test]
    fn map_and_join_preserve_order() {
        let xs: Vec<u32> = (0..100).collect();
        assert_eq!(Execution::Parallel.map(&xs, |x| x * 2), Execution::Sequential.map(&xs, |x| x * 2));
        assert_eq!(Execution::Parallel.join(|| 1, || 2), (1, 2));
    }
}
