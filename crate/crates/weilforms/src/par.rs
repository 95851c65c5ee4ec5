use rayon::prelude::*;
use weilforms_core::exec::ParMap;

/// Order-preserving parallel map on a private rayon pool.
pub struct RayonPar {
    pool: rayon::ThreadPool,
}

impl RayonPar {
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl ParMap for RayonPar {
    fn par_map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        self.pool.install(|| items.into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_input_order() {
        let p = RayonPar::new(4).unwrap();
        let out = p.par_map((0..1000u64).collect(), |x| x * x);
        assert_eq!(out, (0..1000u64).map(|x| x * x).collect::<Vec<_>>());
        assert_eq!(p.threads(), 4);
    }
}
