//! Deterministic parallel replicate loops.
//!
//! Replicates are grouped in fixed chunks of [`CHUNK`]; chunk `c` draws from
//! `stream.child(c)`. Chunks are spread over worker threads but results are
//! written back in chunk order, so the output depends only on the stream and
//! the replicate count.

use std::num::NonZeroUsize;
use std::thread;

use super::rng::{RngStream, StreamRng};

pub const CHUNK: usize = 1024;

fn workers() -> usize {
    thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

/// Runs `f` once per replicate and returns the outputs in replicate order.
pub fn replicate<T, F>(stream: &RngStream, reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    replicate_with_workers(stream, reps, workers(), f)
}

pub fn replicate_with_workers<T, F>(stream: &RngStream, reps: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let chunks = reps.div_ceil(CHUNK);
    let run_chunk = |c: usize| -> Vec<T> {
        let mut rng = stream.child(c as u64).rng();
        let len = CHUNK.min(reps - c * CHUNK);
        (0..len).map(|_| f(&mut rng)).collect()
    };
    let workers = workers.clamp(1, chunks.max(1));
    if workers == 1 {
        return (0..chunks).flat_map(run_chunk).collect();
    }
    let mut slots: Vec<Option<Vec<T>>> = (0..chunks).map(|_| None).collect();
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run_chunk = &run_chunk;
                s.spawn(move || (w..chunks).step_by(workers).map(|c| (c, run_chunk(c))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (c, out) in h.join().expect("replicate worker panicked") {
                slots[c] = Some(out);
            }
        }
    });
    slots.into_iter().flat_map(|s| s.expect("every chunk ran")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn output_is_independent_of_worker_count() {
        let stream = RngStream::derive(11, 4);
        let one = replicate_with_workers(&stream, 5000, 1, |r| r.random::<u64>());
        let many = replicate_with_workers(&stream, 5000, 7, |r| r.random::<u64>());
        assert_eq!(one, many);
        assert_eq!(one.len(), 5000);
        assert!(replicate(&stream, 0, |r| r.random::<u64>()).is_empty());
    }
}
