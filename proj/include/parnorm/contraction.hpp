#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "parnorm/norms.hpp"

namespace parnorm {

enum class VerdictKind { Certified, Falsified, Inconclusive };
enum class Property { Nonexpansive, Paracontracting, LParacontracting, HContractor };

std::string to_string(VerdictKind v);
std::string to_string(Property p);

struct Certificate {
  std::optional<double> k;           // nu^0_H(A)
  std::optional<double> gamma;       // (1 - k) / (1 + k) when derived
  std::optional<double> op_norm;     // nu^0(A)
  std::optional<double> invariance_residual;
  std::string route;
};

// Outcome of testing one contraction property. A Falsified verdict always
// carries a witness x (normalized to nu(x) = 1) and the amount by which it
// violates the defining inequality.
template <class S>
struct ContractionVerdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  Property property = Property::Nonexpansive;
  std::optional<double> gamma;  // for LParacontracting
  std::optional<Vec<S>> witness;
  double violation = 0.0;
  Certificate certificate;
  std::size_t budget_used = 0;
  std::string note;
};

struct ProbeOptions {
  std::size_t budget = 10000;  // random probe vectors
  std::uint64_t seed = 0x5eedULL;
  double tol = 1e-8;              // norm comparisons
  double fixed_residual = 1e-9;   // Ax != x iff nu(Ax - x) > fixed_residual * nu(x)
  double para_tol = 1e-12;        // nu(x) - nu(Ax) <= para_tol * nu(x) counts as no decrease
  double lp_tol = 1e-10;          // relative slack for nu(Ax) <= nu(x) - gamma nu(Ax - x)
  SearchOptions search;
};

// How the pair (H, K) = (R(I - A), N(I - A)) interacts with a norm.
enum class SplitRoute {
  Additive,           // nu(y + z) = nu(y) + nu(z) exactly
  StrictlyMonotone,   // nu(y) < nu(y') implies nu(y + z) < nu(y' + z) exactly (L2, H orthogonal to K)
  None
};

std::string to_string(SplitRoute r);

template <class S>
SplitRoute split_route(const NormSpec<S>& norm, const Subspace<S>& h, const Subspace<S>& k);

template <class S>
ContractionVerdict<S> is_nonexpansive(const Mat<S>& a, const NormSpec<S>& norm,
                                      const ProbeOptions& opts = {});

template <class S>
ContractionVerdict<S> check_paracontracting(const Mat<S>& a, const NormSpec<S>& norm,
                                            const ProbeOptions& opts = {});

template <class S>
ContractionVerdict<S> check_H_contractor(const Mat<S>& a, const Subspace<S>& h,
                                         const NormSpec<S>& norm, const ProbeOptions& opts = {});

// (1 - k) / (1 + k); throws ValidationError unless 0 <= k < 1.
double lp_gamma(double k);

template <class S>
ContractionVerdict<S> check_l_paracontracting(const Mat<S>& a, const NormSpec<S>& norm,
                                              double gamma, const ProbeOptions& opts = {});

// nu(y + z) = base(y) + base(z) for y in H, z in K.
template <class S>
NormSpec<S> make_additive_norm(const NormSpec<S>& base, const Subspace<S>& h,
                               const Subspace<S>& k, double cond_limit = 1e8);

struct ProofChainReport {
  std::size_t samples = 0;
  // max over samples of nu(x - Ax) - (1 + k) nu(y)
  double max_excess_range = 0.0;
  // max over samples of (1 - k) nu(y) - (nu(x) - nu(Ax))
  double max_excess_decrease = 0.0;
  bool holds(double tol) const { return max_excess_range <= tol && max_excess_decrease <= tol; }
};

// Samples x = y + z against the two inequalities used to derive gamma from k.
template <class S>
ProofChainReport proof_chain_check(const Mat<S>& a, const NormSpec<S>& additive, double k,
                                   std::size_t samples, std::uint64_t seed);

template <class S>
struct MonotonicityReport {
  std::size_t samples = 0;
  bool violated = false;
  std::optional<Vec<S>> y, y_prime, z;
};

// Sampled check of: nu(y) < nu(y') implies nu(y + z) < nu(y' + z) for y, y' in
// H and z in K. Never certifies; only reports a violation if one is found.
template <class S>
MonotonicityReport<S> sample_monotonicity(const NormSpec<S>& norm, const Subspace<S>& h,
                                          const Subspace<S>& k, std::size_t samples,
                                          std::uint64_t seed);

template <class S>
struct EquivAudit {
  FixedPointSplit<S> split;
  NormSpec<S> norm;  // additive norm over (H, K)
  double k = 0.0;
  std::optional<double> gamma;
  bool boundary = false;         // H = R(I - A) = {0}: k reported as 1
  bool hypotheses_met = false;   // nonexpansive certified and H nontrivial
  ContractionVerdict<S> nonexpansive;
  ContractionVerdict<S> l_paracontracting;  // (i)
  ContractionVerdict<S> paracontracting;    // (ii)
  ContractionVerdict<S> h_contractor;       // (iii)
  ProofChainReport chain;
  // Some verdict Certified while another is Falsified.
  bool conflict = false;
};

// Builds the additive norm from `base` over H = R(I - A), K = N(I - A) and
// evaluates the three equivalent properties against it.
template <class S>
EquivAudit<S> equiv_theorem_audit(const Mat<S>& a, const NormSpec<S>& base,
                                  const ProbeOptions& opts = {});

}  // namespace parnorm
