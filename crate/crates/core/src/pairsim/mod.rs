mod analysis;
mod modes;
mod potential;

pub use analysis::{
    amplitude_vs_field, detect_satellites, detect_satellites_with, predicted_amplitude,
    satellite_speed, satellite_speed_with, speed_from_span, AmplitudeRow, AmplitudeTable,
    FieldScan, SatelliteOptions, SatelliteReport, VACUUM_FLOOR,
};
pub use modes::{
    pair_mode_sum, pair_mode_sum_series, JointDensity, ModeSumConfig, PairDensities,
    MAX_JOINT_POINTS,
};
pub use potential::{tanh_potential, PotentialSpec, EDGE_TAPER_OFFSET, EDGE_TAPER_WIDTH};
