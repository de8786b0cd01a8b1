#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace rhp {

struct InvariantResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool upper = true;  // measured <= threshold (else measured >= threshold)
  bool pass = false;
};

struct VerifyOptions {
  int n = 100;  // nodes per piece
  std::uint64_t seed = 1;
  int random_densities = 10;
};

/// The invariant suite run by `verify`: Plemelj and projection identities,
/// delta identities, duality, factorization independence, orientation
/// reversal, the energy identity, resolvent bounds and the deformation
/// identities. Each entry carries its measured value.
std::vector<InvariantResult> verify_suite(const VerifyOptions& opt = {});

nlohmann::json verify_summary(const std::vector<InvariantResult>& results);

}  // namespace rhp
