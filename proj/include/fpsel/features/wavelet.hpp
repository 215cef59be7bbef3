#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

namespace fpsel {

/// Daubechies-4 (8-tap) analysis filters, unnormalised (sum of lowpass taps
/// is sqrt(2)).
inline constexpr std::array<double, 8> kDb4Lowpass{
    -0.010597401784997278, 0.032883011666982945, 0.030841381835986965, -0.18703481171888114,
    -0.02798376941698385,  0.6308807679295904,   0.7148465705525415,   0.23037781330885523};
inline constexpr std::array<double, 8> kDb4Highpass{
    -0.23037781330885523, 0.7148465705525415,   -0.6308807679295904,  -0.02798376941698385,
    0.18703481171888114,  0.030841381835986965, -0.032883011666982945, -0.010597401784997278};

/// Undecimated (a trous) wavelet transform with periodic boundaries on the
/// native series length. Level j filters with taps spaced 2^(j-1) apart:
///   d_j[n] = sum_k g[k] a_{j-1}[(n + k 2^(j-1)) mod N], likewise a_j with h.
/// Returns d_1..d_levels followed by a_levels, each of length N.
/// Satisfies sum_j |d_j|^2 / 2^j + |a_J|^2 / 2^J = |x|^2, and commutes with
/// circular shifts of the input.
std::vector<Eigen::VectorXd> swt(const Eigen::Ref<const Eigen::VectorXd>& x, int levels);

}  // namespace fpsel
