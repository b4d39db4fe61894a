//! Worker pool shared by the enumeration engines. `POSIGRAPH_THREADS` caps
//! the number of workers; unset or invalid means one per available core.

use std::sync::OnceLock;

use rayon::{ThreadPool, ThreadPoolBuilder};

pub const THREADS_ENV: &str = "POSIGRAPH_THREADS";

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
            .unwrap_or(0);
        ThreadPoolBuilder::new()
            .num_threads(threads)
            .thread_name(|i| format!("posigraph-{i}"))
            .build()
            .expect("thread pool")
    })
}

pub(crate) fn install<R: Send>(op: impl FnOnce() -> R + Send) -> R {
    pool().install(op)
}
