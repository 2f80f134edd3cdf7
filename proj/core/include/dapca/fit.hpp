#pragma once

#include "dapca/config.hpp"
#include "dapca/dataset.hpp"
#include "dapca/gram.hpp"
#include "dapca/model.hpp"

namespace dapca {

/// Single eigenproblem for pca/spca/sspca/stca; alternating kNN matching and
/// eigen-solves for dapca. A target is required for sspca, stca and dapca
/// (sspca also accepts an empty one).
ProjectionModel fit(const Dataset& source, const Dataset& target, const FitConfig& config);
ProjectionModel fit(const Dataset& source, const FitConfig& config);

/// The kNN-independent quadratic form a method starts from.
GramMatrix constant_gram(const Dataset& source, const Dataset* target, const FitConfig& config);

}  // namespace dapca
