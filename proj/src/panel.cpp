#include "hdgc/panel.hpp"

#include <stdexcept>
#include <unordered_set>

namespace hdgc {

long TimeSeriesPanel::series_index(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return long(i);
  return -1;
}

void TimeSeriesPanel::validate() const {
  if (long(names.size()) != data.cols())
    throw std::invalid_argument("panel: name count does not match columns");
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw std::invalid_argument("panel: empty series name");
    if (!seen.insert(n).second)
      throw std::invalid_argument("panel: duplicate series name '" + n + "'");
  }
  if (!data.allFinite())
    throw std::invalid_argument("panel: non-finite value in data");
}

std::vector<std::string> default_series_names(int k) {
  std::vector<std::string> names;
  names.reserve(size_t(k));
  for (int i = 1; i <= k; ++i) names.push_back("s" + std::to_string(i));
  return names;
}

}  // namespace hdgc
