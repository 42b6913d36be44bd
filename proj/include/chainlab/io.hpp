#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chainlab/covariance.hpp"
#include "chainlab/empirical.hpp"
#include "chainlab/format.hpp"
#include "chainlab/function_class.hpp"
#include "chainlab/metric.hpp"

namespace chainlab {

std::string read_text_file(const std::filesystem::path& path);
// Write-to-temp plus rename: partial outputs are never left behind.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

// Minimal insertion-ordered JSON emitter for outputs (parsing uses
// nlohmann); numbers go through format_g17.
class JsonObjectWriter {
public:
    void add_number(const std::string& key, double value);
    void add_integer(const std::string& key, std::uint64_t value);
    void add_string(const std::string& key, const std::string& value);
    void add_raw(const std::string& key, const std::string& rendered);
    static std::string render_string_array(const std::vector<std::string>& items);
    std::string dump() const;

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

// {"labels": [...], "dist": [[...], ...]}
FiniteMetricSpace load_space_json(const std::string& text, double tol = 1e-9);
FiniteMetricSpace load_space_file(const std::filesystem::path& path, double tol = 1e-9);

// Newline-delimited decimal numbers.
std::vector<double> load_samples_file(const std::filesystem::path& path);

struct MatrixClassFile {
    MatrixClass cls;
    bool symmetrize = false;
    NormKind norm_kind = NormKind::euclidean;
    double p_norm_exponent = 2.0;
};
// {"p": int, "k": int, "matrices": [[row-major]...], "symmetrize": bool,
//  "norm": "euclidean"|"max"|{"p_norm": q}}  (norm optional)
MatrixClassFile parse_matrix_class_json(const std::string& text, const std::string& field_path);

TailConfig parse_tail_config(const std::string& text);
CovarianceConfig parse_covariance_config(const std::string& text);

}  // namespace chainlab
