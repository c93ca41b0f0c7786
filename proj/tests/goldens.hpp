#pragma once

// Golden values for the default refrigerator model (alpha = 1/7200 1/s,
// band 2..7 C, asymptotes -44 C / 20 C, 70 W), computed from the closed
// forms with 30-digit arithmetic, independently of the library.
namespace goldens {

inline constexpr double k = 149.3210662748021;
inline constexpr double t_bar0 = 4.5924198226042694;
inline constexpr double duty = 0.24074344027180829;
inline constexpr double p_0 = 16.85204081902658;
inline constexpr double zeta_min = 0.16825613060301165;
inline constexpr double zeta_max = -0.15625946123115825;

// On-branch run time from t_max down to t_min, s.
inline constexpr double tau_on = 742.92650089366155;
// Standard deviation of the unconditional steady-state temperature, C.
inline constexpr double f0_std = 1.4443936639428994;
// Inverse-CDF sample for the on-state distribution at u = 0.5, C.
inline constexpr double sample_on_median = 4.435524153249338;

// Energy limits at w = 0.9: 1 + w * zeta(t_max) and 1 + w * zeta(t_min).
inline constexpr double energy_floor_w09 = 0.85936648489195757;
inline constexpr double energy_ceiling_w09 = 1.1514305175427105;

// Instantaneous power limits per mode.
inline constexpr double provision_lo = 0.43746593956783029;
inline constexpr double provision_hi = 2.4375870433266559;
inline constexpr double absorption_lo = 0.56253406043216971;
inline constexpr double absorption_hi = 2.7162125321507188;

// Control gain right after a reference step 1 -> 0.5 at z = 0, pivot t_max.
inline constexpr double beta_plus_half_step = -3.1998062457180649;
// Switching rate at T = 5 C, beta = -3.2, s = 1, pivot t_max, 1/s.
inline constexpr double rate_on_off_example = 0.0020187241821793317;
// Switching rate evaluated exactly at the pivot (T = 7 = r, beta = -3.2, s = 0.9).
inline constexpr double rate_pivot_example = 0.0013442545109211776;
// Instantaneous on->off switch probability at T = 5 C for the 1 -> 0.5 step.
inline constexpr double inst_prob_example = 0.42664083276240865;

}  // namespace goldens
