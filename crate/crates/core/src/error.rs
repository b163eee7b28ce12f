use thiserror::Error;

use crate::{calib::CalibError, metrics::MetricsError, replay::ReplayError, sync::SyncError, traj::TrajError};

/// Any error raised by the toolkit, tagged with the pipeline stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory: {0}")]
    Traj(#[from] TrajError),
    #[error("sync: {0}")]
    Sync(#[from] SyncError),
    #[error("calibrate: {0}")]
    Calib(#[from] CalibError),
    #[error("replay: {0}")]
    Replay(#[from] ReplayError),
    #[error("eval: {0}")]
    Metrics(#[from] MetricsError),
    #[error("config: {0}")]
    KeyVal(#[from] crate::keyval::KeyValError),
}
