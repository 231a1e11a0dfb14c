#pragma once

#include <algorithm>
#include <cmath>

namespace lensopt::niching {

/// Strategy constants of the (1,lambda)-CMA-ES kernel.
///
/// Standard cumulative step-size adaptation plus rank-one covariance update
/// with the default settings for a single parent (mu = 1, mu_eff = 1). For the
/// six-curvature problem they evaluate to:
///
///   | constant      | formula                                  | n = 6     |
///   |---------------|------------------------------------------|-----------|
///   | mu_eff        | 1                                        | 1         |
///   | c_sigma       | (mu_eff + 2) / (n + mu_eff + 5)          | 0.25      |
///   | d_sigma       | 1 + 2 max(0, sqrt((mu_eff-1)/(n+1)) - 1) + c_sigma | 1.25 |
///   | c_c           | (4 + mu_eff/n) / (n + 4 + 2 mu_eff/n)    | 0.4032258 |
///   | c_1           | 2 / ((n + 1.3)^2 + mu_eff)               | 0.0368392 |
///   | chi_n         | sqrt(n) (1 - 1/(4n) + 1/(21 n^2))        | 2.3506677 |
///   | h_sigma bound | (1.4 + 2/(n+1)) chi_n                    | 3.9625542 |
struct CmaConstants {
    int dimension;
    double mu_eff;
    double c_sigma;
    double d_sigma;
    double c_c;
    double c_1;
    double chi_n;
    double h_sigma_threshold;

    static CmaConstants for_dimension(int n) {
        const double dn = n;
        const double mu_eff = 1.0;
        const double c_sigma = (mu_eff + 2.0) / (dn + mu_eff + 5.0);
        const double d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (dn + 1.0)) - 1.0) + c_sigma;
        const double c_c = (4.0 + mu_eff / dn) / (dn + 4.0 + 2.0 * mu_eff / dn);
        const double c_1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mu_eff);
        const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));
        return {n, mu_eff, c_sigma, d_sigma, c_c, c_1, chi_n, (1.4 + 2.0 / (dn + 1.0)) * chi_n};
    }
};

}  // namespace lensopt::niching
