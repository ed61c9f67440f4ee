#pragma once

#include <json.hpp>

#include <string>

#include "parnorm/contraction.hpp"
#include "parnorm/products.hpp"
#include "parnorm/series.hpp"
#include "parnorm/spectral.hpp"
#include "parnorm/stochastic.hpp"

namespace parnorm::io {

using json = nlohmann::json;

// Shortest round-tripping decimal form of a double.
std::string format_double(double v);

// Arrays of rows; complex entries as [re, im].
template <class S>
json matrix_to_json(const Mat<S>& a);
// `where` is a JSON pointer used in error messages.
template <class S>
Mat<S> matrix_from_json(const json& j, const std::string& where = "");

template <class S>
json vector_to_json(const Vec<S>& v);
template <class S>
Vec<S> vector_from_json(const json& j, const std::string& where = "");

json complex_to_json(Complex z);
Complex complex_from_json(const json& j, const std::string& where = "");

// First line n, then n rows of n comma separated entries. Real only.
std::string matrix_to_csv(const Matrix& a);
Matrix matrix_from_csv(const std::string& text, const std::string& where = "");

// Chooses CSV or JSON by extension.
template <class S>
Mat<S> read_matrix_file(const std::string& path);

std::string read_file(const std::string& path);
// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

json tail_model_to_json(const TailModel& t);
TailModel tail_model_from_json(const json& j, const std::string& where = "");

json subfamily_to_json(const Subfamily& s);
Subfamily subfamily_from_json(const json& j, const std::string& where = "");

json schedule_to_json(const ProductSchedule& s);
ProductSchedule schedule_from_json(const json& j, const std::string& where = "");

template <class S>
json verdict_to_json(const ContractionVerdict<S>& v);

template <class S>
json estimate_to_json(const NormEstimate<S>& e);

json trace_to_json(const ConvergenceTrace& t);
// Header r,mu,envelope.
std::string trace_to_csv(const ConvergenceTrace& t);

std::string partial_sums_to_csv(const PartialSumReport& r);

json multiplicity_to_json(const MultiplicityReport& m);

}  // namespace parnorm::io
