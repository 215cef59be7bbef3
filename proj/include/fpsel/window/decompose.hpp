#pragma once

#include <Eigen/Core>

#include "fpsel/signal/waveform.hpp"

namespace fpsel {

/// Additive split X = T + S + e of one channel.
struct Decomposition {
  Series trend;
  Series seasonal;
  Series residual;
};

/// Classical moving-average decomposition with a seasonal period of
/// `period` samples (one fundamental cycle):
///  - trend: centred moving average spanning one period (the 2xP form with
///    half-weight end taps when P is even); the first/last half-period is
///    filled with the nearest valid value;
///  - seasonal: per-phase mean of X - T over the valid span, shifted to zero
///    mean;
///  - residual: the remainder.
/// Requires at least two periods of data.
Decomposition decompose_additive(const Eigen::Ref<const Eigen::VectorXd>& x, int period);

}  // namespace fpsel
