#pragma once

#include <string>
#include <vector>

#include "parnorm/cli.hpp"
#include "parnorm/random.hpp"

namespace parnorm::cli {

// Streams for deriving per-purpose seeds from the config seed.
enum SeedStream : std::uint64_t {
  kSearchSeed = 1,
  kProbeSeed = 2,
  kSequenceSeed = 3,
  kErgodicitySeed = 4,
};

[[noreturn]] void invalid(const std::string& pointer, const std::string& what);

template <class S>
Mat<S> build_matrix(const json& j, const std::string& ptr);

// `a` resolves the "range" / "fixed" kinds; may be null.
template <class S>
Subspace<S> build_subspace(const json& j, Eigen::Index n, const std::string& ptr, const Mat<S>* a);

template <class S>
NormSpec<S> build_norm(const json& j, Eigen::Index n, const std::string& ptr, const Mat<S>* a);

template <class S>
MatrixSequence<S> build_sequence(const json& j, const std::string& ptr, std::uint64_t seed);

std::vector<ProductSchedule> build_schedules(const json& cfg);

SearchOptions build_search(const json& cfg);
ProbeOptions build_probe(const json& cfg);

}  // namespace parnorm::cli
