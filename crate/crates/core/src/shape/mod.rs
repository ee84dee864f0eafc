//! Analytic limit-shape machinery for the uniform model.

pub mod amoeba;
pub mod band;
pub mod curve;
pub mod saddle;

pub use amoeba::{amoeba_gas_boundary, branch_points, dual_check, DualEntry, DualReport};
pub use band::{
	leak_to_zero_band, radial_band, radial_band_log, small_t_saddle_expansions, BandEntry, CurveScale,
	ExpansionReport, LeakBand, LeakEntry, RadialBand,
};
pub use curve::{
	best_scale_sup_distance, limit_curve, ne_curve, sup_distance_to_circle, sup_distance_to_l1_ball,
	sup_distance_to_triangle, CurvePoint, LimitCurve,
};
pub use saddle::{pd_asymptotic, saddle, w_plus, SaddleData};

/// Directions `a = k/(n−1)`, `k = 0..n`.
pub fn a_grid(n: usize) -> Vec<f64> {
	if n <= 1 {
		return vec![0.0];
	}
	(0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}
