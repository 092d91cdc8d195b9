#include "matinar/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "matinar/version.hpp"

namespace matinar {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                        Eigen::Index cols, const std::string& name) {
  require(j.is_array() && static_cast<Eigen::Index>(j.size()) == rows,
          name + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            name + ": expected " + std::to_string(cols) + " columns");
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

nlohmann::json matrix_list_to_json(const std::vector<Matrix>& list) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : list) out.push_back(matrix_to_json(m));
  return out;
}

}  // namespace

std::string series_to_csv(const CountSeries& series) {
  std::ostringstream out;
  out << "t,row,col,value\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    const CountMatrix& y = series[t];
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        out << (t + 1) << ',' << (i + 1) << ',' << (j + 1) << ',' << y(i, j)
            << '\n';
      }
    }
  }
  return out.str();
}

void write_series_csv(const CountSeries& series, const std::string& path) {
  write_text_file(series_to_csv(series), path);
}

CountSeries series_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  require(static_cast<bool>(std::getline(in, line)), "series csv: empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "t,row,col,value",
          "series csv: line 1: expected header 't,row,col,value'");

  struct Cell {
    Eigen::Index row;
    Eigen::Index col;
    std::int64_t value;
  };
  std::map<std::int64_t, std::vector<Cell>> by_time;
  Eigen::Index max_row = 0;
  Eigen::Index max_col = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "series csv: line " + std::to_string(line_no);
    std::istringstream fields(line);
    std::string field;
    std::int64_t values[4];
    for (int f = 0; f < 4; ++f) {
      require(static_cast<bool>(std::getline(fields, field, ',')),
              where + ": expected 4 comma-separated fields");
      try {
        std::size_t used = 0;
        values[f] = std::stoll(field, &used);
        require(used == field.size(), where + ": non-integer field '" + field + "'");
      } catch (const std::invalid_argument&) {
        throw std::invalid_argument(where + ": non-integer field '" + field + "'");
      } catch (const std::out_of_range&) {
        throw std::invalid_argument(where + ": field out of range '" + field + "'");
      }
    }
    require(!std::getline(fields, field, ','), where + ": too many fields");
    require(values[0] >= 1 && values[0] <= 100000000,
            where + ": t out of range");
    require(values[1] >= 1 && values[2] >= 1, where + ": row/col must be >= 1");
    require(values[1] <= 4096 && values[2] <= 4096,
            where + ": row/col out of range");
    require(values[3] >= 0, where + ": value must be nonnegative");
    by_time[values[0]].push_back(
        {values[1], values[2], values[3]});
    max_row = std::max<Eigen::Index>(max_row, values[1]);
    max_col = std::max<Eigen::Index>(max_col, values[2]);
  }
  require(!by_time.empty(), "series csv: no data rows");

  const auto T = static_cast<std::int64_t>(by_time.size());
  require(by_time.begin()->first == 1 && by_time.rbegin()->first == T,
          "series csv: time indices must form 1..T without gaps");

  CountSeries series;
  series.reserve(static_cast<std::size_t>(T));
  for (std::int64_t t = 1; t <= T; ++t) {
    CountMatrix y = CountMatrix::Constant(max_row, max_col, -1);
    for (const auto& cell : by_time[t]) {
      require(y(cell.row - 1, cell.col - 1) == -1,
              "series csv: duplicate cell at t=" + std::to_string(t) +
                  " row=" + std::to_string(cell.row) +
                  " col=" + std::to_string(cell.col));
      y(cell.row - 1, cell.col - 1) = cell.value;
    }
    for (Eigen::Index i = 0; i < max_row; ++i) {
      for (Eigen::Index j = 0; j < max_col; ++j) {
        require(y(i, j) >= 0, "series csv: missing cell at t=" +
                                  std::to_string(t) + " row=" +
                                  std::to_string(i + 1) + " col=" +
                                  std::to_string(j + 1));
      }
    }
    series.push_back(std::move(y));
  }
  return series;
}

CountSeries read_series_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open series file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return series_from_csv(buffer.str());
}

nlohmann::json params_to_json(const ModelParams& params) {
  nlohmann::json j;
  j["m"] = params.m;
  j["n"] = params.n;
  j["p"] = params.p;
  j["A"] = matrix_list_to_json(params.A);
  j["B"] = matrix_list_to_json(params.B);
  j["Lambda"] = matrix_to_json(params.Lambda);
  return j;
}

ModelParams params_from_json(const nlohmann::json& j) {
  for (const char* key : {"m", "n", "p", "A", "B", "Lambda"}) {
    require(j.contains(key), std::string("params json: missing field '") + key + "'");
  }
  ModelParams params;
  params.m = j.at("m").get<Eigen::Index>();
  params.n = j.at("n").get<Eigen::Index>();
  params.p = j.at("p").get<int>();
  require(params.m >= 1 && params.n >= 1 && params.p >= 1,
          "params json: m, n, p must be positive");
  const auto& a_list = j.at("A");
  const auto& b_list = j.at("B");
  require(a_list.is_array() &&
              static_cast<int>(a_list.size()) == params.p,
          "params json: A must hold p matrices");
  require(b_list.is_array() &&
              static_cast<int>(b_list.size()) == params.p,
          "params json: B must hold p matrices");
  for (int l = 0; l < params.p; ++l) {
    params.A.push_back(matrix_from_json(a_list[static_cast<std::size_t>(l)],
                                        params.m, params.m, "params json: A"));
    params.B.push_back(matrix_from_json(b_list[static_cast<std::size_t>(l)],
                                        params.n, params.n, "params json: B"));
  }
  params.Lambda =
      matrix_from_json(j.at("Lambda"), params.m, params.n, "params json: Lambda");
  return params;
}

namespace {

nlohmann::json residual_summary(const Matrix& residuals) {
  nlohmann::json j;
  j["count"] = residuals.rows();
  double norm_acc = 0.0;
  for (Eigen::Index r = 0; r < residuals.rows(); ++r) {
    norm_acc += residuals.row(r).norm();
  }
  j["mean_norm"] =
      residuals.rows() > 0 ? norm_acc / static_cast<double>(residuals.rows()) : 0.0;
  j["sum_squares"] = residuals.squaredNorm();
  return j;
}

}  // namespace

nlohmann::json proj_fit_to_json(const ProjFit& fit,
                                const BootstrapSe* bootstrap) {
  nlohmann::json j;
  j["method"] = "proj";
  j["m"] = fit.m;
  j["n"] = fit.n;
  j["p"] = fit.p;
  j["A"] = matrix_list_to_json(fit.A);
  j["B"] = matrix_list_to_json(fit.B);
  j["Lambda"] = matrix_to_json(fit.Lambda);
  j["Phi"] = matrix_list_to_json(fit.Phi);
  j["se_Phi"] = matrix_list_to_json(fit.se_Phi);
  j["se_Lambda"] = matrix_to_json(fit.se_Lambda);
  j["condition_number"] = fit.condition_number;
  j["residuals"] = residual_summary(fit.residuals);
  if (bootstrap != nullptr) {
    j["bootstrap_se"] = {{"replicates", bootstrap->replicates},
                         {"se_A", matrix_list_to_json(bootstrap->se_A)},
                         {"se_B", matrix_list_to_json(bootstrap->se_B)},
                         {"se_Lambda", matrix_to_json(bootstrap->se_Lambda)}};
  }
  return j;
}

nlohmann::json icls_fit_to_json(const IclsFit& fit, const IclsSe& se) {
  nlohmann::json j;
  j["method"] = "icls";
  j["m"] = fit.m;
  j["n"] = fit.n;
  j["p"] = fit.p;
  j["A"] = matrix_list_to_json(fit.A);
  j["B"] = matrix_list_to_json(fit.B);
  j["Lambda"] = matrix_to_json(fit.Lambda);
  j["se_A"] = matrix_list_to_json(se.se_A);
  j["se_B"] = matrix_list_to_json(se.se_B);
  j["se_Lambda"] = matrix_to_json(se.se_Lambda);
  j["sweeps"] = fit.sweeps;
  j["converged"] = fit.converged;
  j["gram_warning"] = fit.gram_warning;
  j["objective_trace"] = fit.objective_trace;
  j["condition_number"] = fit.condition_number;
  const double rss = fit.objective_trace.empty() ? 0.0 : fit.objective_trace.back();
  j["residuals"] = {{"count", fit.residual_count},
                    {"sum_squares", rss},
                    {"rms_norm", fit.residual_count > 0
                                     ? std::sqrt(rss / static_cast<double>(
                                                           fit.residual_count))
                                     : 0.0}};
  return j;
}

nlohmann::json estimation_report_to_json(const EstimationReport& report) {
  nlohmann::json j;
  j["method"] = to_string(report.method);
  j["replications"] = report.replications;
  j["labels"] = report.labels;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r;
    r["T"] = row.T;
    r["bias"] = std::vector<double>(row.bias.data(),
                                    row.bias.data() + row.bias.size());
    r["sd"] = std::vector<double>(row.sd.data(), row.sd.data() + row.sd.size());
    r["mean_se"] = std::vector<double>(row.mean_se.data(),
                                       row.mean_se.data() + row.mean_se.size());
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

nlohmann::json order_report_to_json(const OrderStudyReport& report) {
  nlohmann::json j;
  j["true_p"] = report.true_p;
  j["p_bar"] = report.p_bar;
  j["replications"] = report.replications;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"T", row.T},
                    {"freq_correct", row.freq_correct},
                    {"freq_over", row.freq_over},
                    {"freq_under", row.freq_under}});
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string format_estimation_table(const EstimationReport& report) {
  std::ostringstream out;
  out << "method: " << to_string(report.method)
      << "   replications: " << report.replications << "\n";
  out << std::setw(6) << "T" << std::setw(9) << "";
  for (const auto& label : report.labels) {
    out << std::setw(11) << label;
  }
  out << "\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& row : report.rows) {
    const struct {
      const char* name;
      const Vector& values;
    } lines[] = {{"Bias", row.bias}, {"SD", row.sd}, {"SE", row.mean_se}};
    for (const auto& line : lines) {
      out << std::setw(6) << row.T << std::setw(9) << line.name;
      for (Eigen::Index c = 0; c < line.values.size(); ++c) {
        out << std::setw(11) << line.values[c];
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string format_order_table(const OrderStudyReport& report) {
  std::ostringstream out;
  out << "true p: " << report.true_p << "   p_bar: " << report.p_bar
      << "   replications: " << report.replications << "\n";
  out << std::setw(6) << "T" << std::setw(12) << "{p^=p}" << std::setw(12)
      << "{p^>p}" << std::setw(12) << "{p^<p}" << "\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& row : report.rows) {
    out << std::setw(6) << row.T << std::setw(12) << row.freq_correct
        << std::setw(12) << row.freq_over << std::setw(12) << row.freq_under
        << "\n";
  }
  return out.str();
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open json file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument("json parse error in " + path + ": " +
                                err.what());
  }
  return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  write_text_file(j.dump(2) + "\n", path);
}

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) {
    throw std::invalid_argument("cannot open output file: " + path);
  }
  out << text;
  if (!out.good()) {
    throw std::invalid_argument("failed writing output file: " + path);
  }
}

}  // namespace matinar
