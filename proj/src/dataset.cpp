#include "resdens/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "resdens/error.hpp"

namespace resdens {

namespace {

bool all_finite(std::span<const double> v) {
  for (double a : v) {
    if (!std::isfinite(a)) return false;
  }
  return true;
}

}  // namespace

Dataset::Dataset(std::size_t dim, std::vector<double> x, std::vector<double> y,
                 std::optional<std::vector<double>> true_m,
                 std::optional<std::vector<double>> true_eps)
    : dim_(dim),
      x_(std::move(x)),
      y_(std::move(y)),
      true_m_(std::move(true_m)),
      true_eps_(std::move(true_eps)) {
  if (dim_ == 0) throw DataError("covariate dimension must be at least 1");
  if (y_.size() < 2) throw DataError("a dataset needs at least two observations");
  if (x_.size() != y_.size() * dim_) {
    throw DataError("covariate matrix does not have n x d entries");
  }
  if (!all_finite(x_) || !all_finite(y_)) {
    throw DataError("dataset contains non-finite values");
  }
  if (true_m_ && (true_m_->size() != y_.size() || !all_finite(*true_m_))) {
    throw DataError("m_true must be a finite n-vector");
  }
  if (true_eps_ && (true_eps_->size() != y_.size() || !all_finite(*true_eps_))) {
    throw DataError("eps_true must be a finite n-vector");
  }
  if (true_m_ && true_eps_) {
    // Simulated samples satisfy this exactly; values read back from text may
    // be off by a rounding of the last printed digit.
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const double scale = std::max({std::abs(y_[i]), std::abs((*true_m_)[i]),
                                     std::abs((*true_eps_)[i]), 1.0});
      if (std::abs(y_[i] - (*true_m_)[i] - (*true_eps_)[i]) > 1e-12 * scale) {
        throw DataError("row " + std::to_string(i + 1) + ": y != m_true + eps_true");
      }
    }
  }
}

std::span<const double> Dataset::true_m() const {
  if (!true_m_) throw DataError("dataset has no m_true column");
  return *true_m_;
}

std::span<const double> Dataset::true_eps() const {
  if (!true_eps_) throw DataError("dataset has no eps_true column");
  return *true_eps_;
}

Dataset Dataset::with_errors(std::vector<double> eps) const {
  const auto m = true_m();
  if (eps.size() != m.size()) throw DataError("error vector has the wrong length");
  std::vector<double> y(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    y[i] = m[i] + eps[i];
    // Store the error that y - m actually reproduces.
    eps[i] = y[i] - m[i];
  }
  return Dataset(dim_, x_, std::move(y), *true_m_, std::move(eps));
}

Dataset Dataset::with_responses(std::vector<double> y) const {
  return Dataset(dim_, x_, std::move(y));
}

TrimRegion::TrimRegion(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw DimensionError("trim bounds must be non-empty vectors of equal length");
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] < upper_[j])) {
      throw ConfigError("trim box needs lower < upper in every coordinate");
    }
  }
}

bool TrimRegion::contains(std::span<const double> x) const {
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (x[j] < lower_[j] || x[j] > upper_[j]) return false;
  }
  return true;
}

bool TrimRegion::strictly_inside(std::span<const double> support_lo,
                                 std::span<const double> support_hi) const {
  if (support_lo.size() != lower_.size() || support_hi.size() != upper_.size()) {
    return false;
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!(lower_[j] > support_lo[j] && upper_[j] < support_hi[j])) return false;
  }
  return true;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw DataError("line " + std::to_string(line) + ": cannot parse '" + field +
                        "' as a number",
                    line);
  }
  if (!std::isfinite(v)) {
    throw DataError("line " + std::to_string(line) + ": non-finite value '" +
                        field + "'",
                    line);
  }
  return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }
  if (line.empty()) throw DataError("empty CSV input", lineno);
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
    line.erase(0, 3);  // UTF-8 byte order mark
  }

  const auto header = split_fields(line);
  std::size_t dim = 0;
  int y_col = -1, m_col = -1, eps_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h == "x" + std::to_string(dim + 1)) {
      if (c != dim) throw DataError("x columns must come first and in order", lineno);
      ++dim;
    } else if (h == "y") {
      y_col = static_cast<int>(c);
    } else if (h == "m_true") {
      m_col = static_cast<int>(c);
    } else if (h == "eps_true") {
      eps_col = static_cast<int>(c);
    } else {
      throw DataError("unexpected column '" + h + "' in header", lineno);
    }
  }
  if (dim == 0 || y_col < 0) {
    throw DataError("header must contain x1..xd and y", lineno);
  }

  std::vector<double> x, y, m, eps;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(lineno) + ": expected " +
                          std::to_string(header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      lineno);
    }
    for (std::size_t j = 0; j < dim; ++j) x.push_back(parse_number(fields[j], lineno));
    y.push_back(parse_number(fields[y_col], lineno));
    if (m_col >= 0) m.push_back(parse_number(fields[m_col], lineno));
    if (eps_col >= 0) eps.push_back(parse_number(fields[eps_col], lineno));
  }
  std::optional<std::vector<double>> om, oe;
  if (m_col >= 0) om = std::move(m);
  if (eps_col >= 0) oe = std::move(eps);
  return Dataset(dim, std::move(x), std::move(y), std::move(om), std::move(oe));
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const auto d = data.dim();
  for (std::size_t j = 0; j < d; ++j) out << 'x' << (j + 1) << ',';
  out << 'y';
  if (data.has_truth()) out << ",m_true,eps_true";
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double xj : data.x(i)) out << xj << ',';
    out << data.y(i);
    if (data.has_truth()) out << ',' << data.true_m()[i] << ',' << data.true_eps()[i];
    out << '\n';
  }
}

}  // namespace resdens
