/*
 * Copyright 2026 The fpmimo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Single- and multi-user massive-MIMO transceivers evaluated under a
// PrecisionPolicy. The functions here model the arithmetic only: inputs are
// used exactly as passed in. Callers that want to model storage of the inputs
// in the working format round them first with Precision::round (the harness
// does this).

#ifndef FPMIMO_TRANSCEIVER_HPP_
#define FPMIMO_TRANSCEIVER_HPP_

#include <optional>

#include "fpmimo/linalg.hpp"

namespace fpmimo {

struct ChannelRealization {
  ComplexMatrix H;  // M x K, column k is user k's channel

  Eigen::Index M() const { return H.rows(); }
  Eigen::Index K() const { return H.cols(); }
};

struct UplinkSignal {
  ComplexVector x_u;  // K transmitted symbols
  ComplexVector z;    // M received samples, sqrt(rho) H x_u + n
  double rho = 1.0;
};

struct DownlinkSignal {
  ComplexVector x_d;  // K symbols
  ComplexVector s;    // M precoded samples
  double beta = 1.0;
};

/// r = h^H z. Identical to inner_product_fp(h, z).
Complex mrc_combine(const ComplexVector& h, const ComplexVector& z, Precision& prec);
Complex mrc_combine(const ComplexVector& h, const ComplexVector& z, const PrecisionPolicy& policy);

/// s = (h / ||h||) x. The norm and the division are computed in fp64; only the
/// M complex scalar products are rounded. Throws std::invalid_argument for a
/// zero channel.
ComplexVector mrt_precode(const ComplexVector& h, Complex x, Precision& prec);
ComplexVector mrt_precode(const ComplexVector& h, Complex x, const PrecisionPolicy& policy);

/// Solves (C) y = rhs for Hermitian positive definite C through a Cholesky
/// factor R (C = R^H R): R^H q = rhs, then R y = q. Shared by both ZF paths.
ComplexVector ne_solve(const ComplexMatrix& c, const ComplexVector& rhs, Precision& prec);

/// Zero-forcing detection through the normal equations:
///   c = H^H z, C = H^H H, C = R^H R, R^H q = c, R r = q.
/// Throws PrecisionBreakdown if the Cholesky factorization fails.
ComplexVector zf_detect_ne(const ComplexMatrix& H, const ComplexVector& z, Precision& prec);
ComplexVector zf_detect_ne(const ComplexMatrix& H, const ComplexVector& z,
                           const PrecisionPolicy& policy);

/// Zero-forcing precoding through the normal equations:
///   C = H^H H, C = R^H R, R^H q = x, R e = q, s = sqrt(beta) H e.
/// sqrt(beta) is applied in fp64; beta defaults to M - K. Pass beta = 1 for
/// the unnormalized output.
ComplexVector zf_precode_ne(const ComplexMatrix& H, const ComplexVector& x, Precision& prec,
                            std::optional<double> beta = std::nullopt);
ComplexVector zf_precode_ne(const ComplexMatrix& H, const ComplexVector& x,
                            const PrecisionPolicy& policy,
                            std::optional<double> beta = std::nullopt);

/// The analytic ZF precoding normalization, M - K. Requires M > K.
double zf_beta(Eigen::Index M, Eigen::Index K);

}  // namespace fpmimo

#endif  // FPMIMO_TRANSCEIVER_HPP_
