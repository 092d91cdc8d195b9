#pragma once

#include <string>

#include <json.hpp>

#include "matinar/icls.hpp"
#include "matinar/projection.hpp"
#include "matinar/replicate.hpp"

namespace matinar {

/// Long-format series CSV with header "t,row,col,value"; t, row, col are
/// 1-based, cells emitted row-major within each t.
void write_series_csv(const CountSeries& series, const std::string& path);
std::string series_to_csv(const CountSeries& series);

/// Parses and validates a long-format series file: every (t,row,col) cell
/// present exactly once, uniform shape, nonnegative integer values. Errors
/// carry the offending line or cell.
CountSeries read_series_csv(const std::string& path);
CountSeries series_from_csv(const std::string& text);

/// Parameter document: fields m, n, p, A, B (lists of matrices as nested
/// row arrays), Lambda.
nlohmann::json params_to_json(const ModelParams& params);
ModelParams params_from_json(const nlohmann::json& j);

nlohmann::json proj_fit_to_json(const ProjFit& fit,
                                const BootstrapSe* bootstrap = nullptr);
nlohmann::json icls_fit_to_json(const IclsFit& fit, const IclsSe& se);

nlohmann::json estimation_report_to_json(const EstimationReport& report);
nlohmann::json order_report_to_json(const OrderStudyReport& report);

std::string format_estimation_table(const EstimationReport& report);
std::string format_order_table(const OrderStudyReport& report);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const nlohmann::json& j, const std::string& path);
void write_text_file(const std::string& text, const std::string& path);

}  // namespace matinar
