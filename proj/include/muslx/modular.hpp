#pragma once

#include <muslx/grid.hpp>
#include <muslx/young.hpp>

namespace muslx {

/// Quadrature of M(t, x, |f|) over the sample points of f. Throws
/// modular_overflow when the sum is not finite.
double modular(const NFunction& M, const SampledField& f);

/// inf { lambda > 0 : modular(M, f / lambda) <= 1 }, bisected in log(lambda)
/// to relative tolerance 1e-10 inside [1e-12, 1e12] (each end widened once).
double luxemburg_norm(const NFunction& M, const SampledField& f);

/// 2 ||f||_M ||g||_{M*} - int f g for scalar fields sampled on the same points.
double holder_defect(const NFunction& M, const NFunction& Mstar, const SampledField& f,
                     const SampledField& g);

}  // namespace muslx
