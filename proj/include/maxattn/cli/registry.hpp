#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maxattn/construction.hpp"
#include "maxattn/maxaffine.hpp"

namespace maxattn::cli {

enum class Arity { single, pair, any };

/// What a registry factory is asked to build.
struct TargetRequest {
  std::optional<std::string> arg;  // text after ':' in NAME:ARG
  std::size_t d = 1;
  std::size_t n = 1;
  double D = 1.0;
  std::uint64_t seed = 0;
};

/// A concrete target. Exactly one of `single` and `pair` is set for
/// single/pair entries; const fills both.
struct ResolvedTarget {
  std::string name;
  SequenceMap single;
  PairMap pair;
  std::optional<double> lipschitz;  // 2-norm constant per output entry; empty if not Lipschitz
};

struct FunctionRegistryEntry {
  std::string name;
  Arity arity = Arity::single;
  std::string description;
  std::string lipschitz_note;
  std::function<ResolvedTarget(const TargetRequest&)> make;
};

const std::vector<FunctionRegistryEntry>& registry_functions();

/// Looks up NAME[:ARG]. Throws ArgumentError for unknown names, bad
/// arguments or unsupported (d, n).
ResolvedTarget resolve_target(const std::string& spec, const TargetRequest& request);

/// The 1-D max-affine partition behind step1d (nearest of four cell centers)
/// and its per-cell levels.
MaxAffine step1d_partition();
std::vector<double> step1d_levels();

}  // namespace maxattn::cli
