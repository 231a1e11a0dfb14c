#pragma once

#include <span>
#include <stdexcept>

namespace lensopt::analysis {

/// Shapiro-Wilk W test, Royston's AS R94 approximation, valid for 3 <= n <= 5000.
///
/// Coefficients a_i for i >= 3 come from normal scores m_i = Phi^-1((i - 3/8)/(n + 1/4));
/// a_1, a_2 are polynomial corrections in u = 1/sqrt(n). The p-value maps
/// W to a normal deviate: for 4 <= n <= 11 through -log(gamma - log(1 - W)),
/// otherwise through log(1 - W), with mean and log-sd polynomial in n (small)
/// or log n (large). n = 3 is exact.
///
///   | table | use                  | coefficients (ascending powers)                       |
///   |-------|----------------------|-------------------------------------------------------|
///   | C1    | a_n correction, u    | 0, .221157, -.147981, -2.071190, 4.434685, -2.706056  |
///   | C2    | a_n-1 correction, u  | 0, .042981, -.293762, -1.752461, 5.682633, -3.582633  |
///   | C3    | mean, n <= 11        | .5440, -.39978, .025054, -6.714e-4                    |
///   | C4    | log sd, n <= 11      | 1.3822, -.77857, .062767, -.0020322                   |
///   | C5    | mean, n >= 12 (ln n) | -1.5861, -.31082, -.083751, .0038915                  |
///   | C6    | log sd, n >= 12      | -.4803, -.082676, .0030302                            |
///   | G     | gamma, n <= 11       | -2.273, .459                                          |
struct ShapiroWilkResult {
    double w;
    double p_value;
};

class ShapiroWilkError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws ShapiroWilkError for n < 3 (sample_too_small), n > 5000
/// (sample_too_large) or a zero-range sample.
ShapiroWilkResult shapiro_wilk(std::span<const double> sample);

}  // namespace lensopt::analysis
