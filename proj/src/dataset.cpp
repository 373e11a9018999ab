#include "nsmooth/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "nsmooth/errors.hpp"
#include "nsmooth/rng.hpp"

namespace nsmooth {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view field, double& value) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(value);
}

}  // namespace

Dataset parse_dataset_csv(std::istream& in) {
  std::vector<double> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool saw_zero_one = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i)
      numeric = parse_number(fields[i], values[i]);
    if (!numeric) {
      if (rows.empty() && labels.empty() && line_no == 1) continue;  // header
      throw InvalidInput("non-numeric field on line " + std::to_string(line_no));
    }
    if (values.size() < 2)
      throw InvalidInput("line " + std::to_string(line_no) + " needs a label and at least one feature");
    if (width == 0) width = values.size();
    if (values.size() != width)
      throw InvalidInput("line " + std::to_string(line_no) + " has " + std::to_string(values.size()) +
                         " fields, expected " + std::to_string(width));
    const double label = values.front();
    if (label != -1.0 && label != 1.0 && label != 0.0)
      throw InvalidInput("label on line " + std::to_string(line_no) + " must be -1, +1, 0 or 1");
    saw_zero_one = saw_zero_one || label == 0.0;
    labels.push_back(label);
    rows.emplace_back(values.begin() + 1, values.end());
  }
  if (rows.empty()) throw InvalidInput("dataset is empty");

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  data.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < width; ++j)
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    double label = labels[i];
    // {0, 1} coding: 0 -> -1
    if (saw_zero_one && label == 0.0) label = -1.0;
    data.labels[static_cast<Eigen::Index>(i)] = label;
  }
  standardize(data);
  return data;
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open dataset " + path.string());
  return parse_dataset_csv(in);
}

void standardize(Dataset& data) {
  const Eigen::Index n = data.features.rows();
  const Eigen::Index p = data.features.cols();
  data.transform.mean = data.features.colwise().mean().transpose();
  data.transform.scale.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto centered = data.features.col(j).array() - data.transform.mean[j];
    const double var = n > 1 ? centered.square().sum() / static_cast<double>(n - 1) : 0.0;
    const double sd = std::sqrt(var);
    data.transform.scale[j] = sd > 0.0 ? sd : 1.0;
    data.features.col(j) = centered / data.transform.scale[j];
  }
}

Dataset synthetic_separable_dataset(std::size_t points, std::size_t features, std::uint64_t seed) {
  if (points < 2 || features == 0) throw InvalidInput("synthetic dataset needs >= 2 points and >= 1 feature");
  RandomStream rng(seed, 0xda7a);
  Vec direction(static_cast<Eigen::Index>(features));
  rng.seek(0);
  rng.fill_normal(direction);
  direction.normalize();

  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(points), static_cast<Eigen::Index>(features));
  data.labels.resize(static_cast<Eigen::Index>(points));
  Vec z(static_cast<Eigen::Index>(features));
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    rng.seek(static_cast<std::uint64_t>(i) + 1);
    rng.fill_normal(z);
    data.features.row(i) = z.transpose();
    data.labels[i] = direction.dot(z) >= 0.0 ? 1.0 : -1.0;
  }
  standardize(data);
  return data;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidInput("train fraction must lie in (0, 1)");
  const auto n = static_cast<std::size_t>(data.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates with counter-based uniforms
  RandomStream rng(seed, 0x5711);
  rng.seek(0);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n))), 1, n - 1);

  auto take = [&](std::size_t begin, std::size_t end) {
    Dataset part;
    part.transform = data.transform;
    part.features.resize(static_cast<Eigen::Index>(end - begin), data.feature_dim());
    part.labels.resize(static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      const auto dst = static_cast<Eigen::Index>(i - begin);
      part.features.row(dst) = data.features.row(static_cast<Eigen::Index>(order[i]));
      part.labels[dst] = data.labels[static_cast<Eigen::Index>(order[i])];
    }
    return part;
  };
  return {take(0, n_train), take(n_train, n)};
}

}  // namespace nsmooth
