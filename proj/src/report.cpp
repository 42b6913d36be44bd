#include "chainlab/report.hpp"

#include <algorithm>
#include <cmath>

#include "chainlab/errors.hpp"
#include "chainlab/format.hpp"

namespace chainlab {

double tail_t_for_level(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw ValidationError("tail level must lie in (0,1)");
    }
    // 1 - 2 exp(-t^(2/5)) = level  =>  t = (-ln((1-level)/2))^(5/2)
    return std::pow(-std::log((1.0 - level) / 2.0), 2.5);
}

double quantile_linear(const std::vector<double>& sorted_values, double level) {
    if (sorted_values.empty()) {
        throw ValidationError("quantile of an empty sample");
    }
    const auto m = sorted_values.size();
    const double h = static_cast<double>(m - 1) * level;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= m) return sorted_values.back();
    const double frac = h - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

std::string tail_report_csv(const TailReport& report) {
    std::string out =
        "n,level,quantile,bound_skeleton,ratio,c3_fit,gamma2_hat,d_psi1_hat,method,seed";
    if (report.cov) {
        out += ",width,width_se,sigma,sup_frob,gamma2_over_sigma_width";
    }
    out += "\n";
    for (const auto& cell : report.cells) {
        out += std::to_string(cell.n);
        out += ",";
        out += format_g17(cell.level);
        out += ",";
        out += format_g17(cell.quantile);
        out += ",";
        out += format_g17(cell.bound_skeleton);
        out += ",";
        out += format_g17(cell.ratio);
        out += ",";
        out += format_g17(cell.c3_fit);
        out += ",";
        out += format_g17(report.gamma2_hat);
        out += ",";
        out += format_g17(report.d_psi1_hat);
        out += ",";
        out += report.method;
        out += ",";
        out += std::to_string(report.seed);
        if (report.cov) {
            out += ",";
            out += format_g17(report.cov->width);
            out += ",";
            out += format_g17(report.cov->width_se);
            out += ",";
            out += format_g17(report.cov->sigma);
            out += ",";
            out += format_g17(report.cov->sup_frob);
            out += ",";
            out += format_g17(report.cov->gamma2_over_sigma_width);
        }
        out += "\n";
    }
    return out;
}

}  // namespace chainlab
