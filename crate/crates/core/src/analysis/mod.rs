//! Comb metrics, decay fits and the analytic efficiency reference.

mod comb;
mod efficiency;
mod fit;
pub(crate) mod peaks;
mod storage;

pub use comb::{analyze_comb, CombAnalysis, Tooth};
pub use efficiency::afc_efficiency_analytic;
pub use fit::{fit_exponential, FitResult};
pub use peaks::{find_minima, find_peaks, median, Peak};
pub use storage::{efficiency_table, efficiency_vs_storage, StoragePoint, StorageSweep};
