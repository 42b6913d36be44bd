#include "chainlab/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace chainlab {

std::string format_g17(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string content_digest(std::string_view bytes) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buffer;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                      ec.message());
    }
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += "\"";
    return out;
}

}  // namespace

void JsonObjectWriter::add_number(const std::string& key, double value) {
    fields_.emplace_back(key, format_g17(value));
}

void JsonObjectWriter::add_integer(const std::string& key, std::uint64_t value) {
    fields_.emplace_back(key, std::to_string(value));
}

void JsonObjectWriter::add_string(const std::string& key, const std::string& value) {
    fields_.emplace_back(key, json_escape(value));
}

void JsonObjectWriter::add_raw(const std::string& key, const std::string& rendered) {
    fields_.emplace_back(key, rendered);
}

std::string JsonObjectWriter::render_string_array(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        out += json_escape(items[i]);
    }
    out += "]";
    return out;
}

std::string JsonObjectWriter::dump() const {
    std::string out = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i > 0) out += ", ";
        out += json_escape(fields_[i].first) + ": " + fields_[i].second;
    }
    out += "}";
    return out;
}

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
        throw ConfigInvalid(what + ": not valid JSON");
    }
    return parsed;
}

const json& require_field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigInvalid(path + "." + key + ": missing");
    }
    return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigInvalid(path + ": expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigInvalid(path + ": expected an integer");
    return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ConfigInvalid(path + ": expected an unsigned integer");
    }
    if (v.is_number_integer() && v.get<long long>() < 0) {
        throw ConfigInvalid(path + ": expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

Eigen::MatrixXd as_matrix(const json& rows, const std::string& path) {
    if (!rows.is_array() || rows.empty()) {
        throw ConfigInvalid(path + ": expected a nonempty array of rows");
    }
    const auto n_rows = rows.size();
    const auto first = rows.at(0);
    if (!first.is_array() || first.empty()) {
        throw ConfigInvalid(path + "[0]: expected a nonempty row");
    }
    const auto n_cols = first.size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    for (std::size_t i = 0; i < n_rows; ++i) {
        const auto& row = rows.at(i);
        if (!row.is_array() || row.size() != n_cols) {
            throw ConfigInvalid(path + "[" + std::to_string(i) + "]: ragged row");
        }
        for (std::size_t j = 0; j < n_cols; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                as_number(row.at(j), path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        }
    }
    return out;
}

EnsembleSpec parse_ensemble(const json& obj, const std::string& path, int class_p) {
    EnsembleSpec spec;
    const std::string kind = require_field(obj, "kind", path).get<std::string>();
    if (kind == "gaussian") {
        spec.kind = EnsembleSpec::Kind::gaussian;
        spec.cholesky_factor = as_matrix(require_field(obj, "cholesky_factor", path),
                                         path + ".cholesky_factor");
    } else if (kind == "rademacher") {
        spec.kind = EnsembleSpec::Kind::rademacher;
        spec.scale = obj.contains("scale") ? as_number(obj.at("scale"), path + ".scale") : 1.0;
        spec.p = class_p;
    } else if (kind == "sphere") {
        spec.kind = EnsembleSpec::Kind::sphere;
        spec.radius = obj.contains("radius") ? as_number(obj.at("radius"), path + ".radius") : 1.0;
        spec.p = class_p;
    } else {
        throw ConfigInvalid(path + ".kind: unknown ensemble '" + kind + "'");
    }
    spec.validate();
    return spec;
}

MatrixClassFile parse_matrix_class(const json& obj, const std::string& path) {
    MatrixClassFile out;
    out.cls.p = as_int(require_field(obj, "p", path), path + ".p");
    out.cls.k = as_int(require_field(obj, "k", path), path + ".k");
    if (out.cls.p < 1 || out.cls.k < 1) {
        throw ConfigInvalid(path + ": p and k must be >= 1");
    }
    const auto& matrices = require_field(obj, "matrices", path);
    if (!matrices.is_array() || matrices.empty()) {
        throw ConfigInvalid(path + ".matrices: expected a nonempty array");
    }
    const auto expected = static_cast<std::size_t>(out.cls.p) * static_cast<std::size_t>(out.cls.k);
    for (std::size_t m = 0; m < matrices.size(); ++m) {
        const auto& flat = matrices.at(m);
        const std::string mpath = path + ".matrices[" + std::to_string(m) + "]";
        if (!flat.is_array() || flat.size() != expected) {
            throw ConfigInvalid(mpath + ": expected " + std::to_string(expected) +
                                " row-major entries");
        }
        Eigen::MatrixXd a(out.cls.p, out.cls.k);
        for (int i = 0; i < out.cls.p; ++i) {
            for (int j = 0; j < out.cls.k; ++j) {
                a(i, j) = as_number(flat.at(static_cast<std::size_t>(i * out.cls.k + j)),
                                    mpath + "[" + std::to_string(i * out.cls.k + j) + "]");
            }
        }
        out.cls.matrices.push_back(std::move(a));
    }
    if (obj.contains("symmetrize")) {
        if (!obj.at("symmetrize").is_boolean()) {
            throw ConfigInvalid(path + ".symmetrize: expected a boolean");
        }
        out.symmetrize = obj.at("symmetrize").get<bool>();
    }
    if (obj.contains("norm")) {
        const auto& norm = obj.at("norm");
        if (norm.is_string()) {
            const std::string name = norm.get<std::string>();
            if (name == "euclidean") {
                out.norm_kind = NormKind::euclidean;
            } else if (name == "max") {
                out.norm_kind = NormKind::max;
            } else {
                throw ConfigInvalid(path + ".norm: unknown norm '" + name + "'");
            }
        } else if (norm.is_object() && norm.contains("p_norm")) {
            out.norm_kind = NormKind::p_norm;
            out.p_norm_exponent = as_number(norm.at("p_norm"), path + ".norm.p_norm");
            if (!(out.p_norm_exponent >= 1.0)) {
                throw ConfigInvalid(path + ".norm.p_norm: exponent must be >= 1");
            }
        } else {
            throw ConfigInvalid(path + ".norm: expected a string or {\"p_norm\": q}");
        }
    }
    return out;
}

// Fields shared by the tail and covariance experiment configs; returns the
// parsed class file so callers can read the norm choice.
template <typename Config>
MatrixClassFile parse_common_config(const json& obj, Config& config) {
    config.seed_set = obj.contains("seed");
    config.seed = config.seed_set ? as_u64(obj.at("seed"), "config.seed") : 0;

    const auto& grid = require_field(obj, "n_grid", "config");
    if (!grid.is_array() || grid.empty()) throw ConfigInvalid("config.n_grid: expected a nonempty array");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        config.n_grid.push_back(as_int(grid.at(i), "config.n_grid[" + std::to_string(i) + "]"));
    }
    config.replications = as_int(require_field(obj, "replications", "config"), "config.replications");

    MatrixClassFile cls = parse_matrix_class(require_field(obj, "class", "config"), "config.class");
    config.class_matrices = cls.cls;
    config.symmetrize_class = cls.symmetrize;

    config.distribution = parse_ensemble(require_field(obj, "distribution", "config"),
                                         "config.distribution", config.class_matrices.p);

    if (obj.contains("quantiles")) {
        config.quantiles.clear();
        const auto& levels = obj.at("quantiles");
        if (!levels.is_array()) throw ConfigInvalid("config.quantiles: expected an array");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            config.quantiles.push_back(
                as_number(levels.at(i), "config.quantiles[" + std::to_string(i) + "]"));
        }
    }
    if (obj.contains("metric_samples")) {
        config.metric_samples = as_int(obj.at("metric_samples"), "config.metric_samples");
    }
    if (obj.contains("chaining_method")) {
        const std::string method = obj.at("chaining_method").get<std::string>();
        if (method == "exact") {
            config.chaining_method = GammaMethod::exact;
        } else if (method == "greedy") {
            config.chaining_method = GammaMethod::greedy;
        } else {
            throw ConfigInvalid("config.chaining_method: expected \"exact\" or \"greedy\"");
        }
    }
    if (obj.contains("exact_cap")) {
        config.exact_cap = as_int(obj.at("exact_cap"), "config.exact_cap");
    }
    return cls;
}

}  // namespace

FiniteMetricSpace load_space_json(const std::string& text, double tol) {
    const json obj = parse_json(text, "space");
    const auto& labels_json = require_field(obj, "labels", "space");
    if (!labels_json.is_array()) throw ConfigInvalid("space.labels: expected an array");
    std::vector<std::string> labels;
    for (const auto& l : labels_json) {
        if (!l.is_string()) throw ConfigInvalid("space.labels: entries must be strings");
        labels.push_back(l.get<std::string>());
    }
    const Eigen::MatrixXd dist = as_matrix(require_field(obj, "dist", "space"), "space.dist");
    return FiniteMetricSpace::validate(std::move(labels), dist, tol);
}

FiniteMetricSpace load_space_file(const std::filesystem::path& path, double tol) {
    return load_space_json(read_text_file(path), tol);
}

std::vector<double> load_samples_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::vector<double> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            while (used < line.size() && std::isspace(static_cast<unsigned char>(line[used]))) ++used;
            if (used != line.size()) throw std::invalid_argument("trailing characters");
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigInvalid("samples line " + std::to_string(line_no) +
                                ": not a decimal number: '" + line + "'");
        }
    }
    if (out.empty()) throw ConfigInvalid("samples file contains no numbers");
    return out;
}

MatrixClassFile parse_matrix_class_json(const std::string& text, const std::string& field_path) {
    return parse_matrix_class(parse_json(text, field_path), field_path);
}

TailConfig parse_tail_config(const std::string& text) {
    const json obj = parse_json(text, "config");
    TailConfig config;
    const MatrixClassFile cls = parse_common_config(obj, config);
    config.norm_kind = cls.norm_kind;
    config.p_norm_exponent = cls.p_norm_exponent;
    config.config_digest = content_digest(text);
    return config;
}

CovarianceConfig parse_covariance_config(const std::string& text) {
    const json obj = parse_json(text, "config");
    CovarianceConfig config;
    parse_common_config(obj, config);
    if (obj.contains("width_reps")) {
        config.width_reps = as_int(obj.at("width_reps"), "config.width_reps");
    }
    config.config_digest = content_digest(text);
    return config;
}

}  // namespace chainlab
