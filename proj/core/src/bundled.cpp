#include <string>
#include <utility>

#include "tfsm/format.hpp"

namespace tfsm {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kBundledModels[];
extern const std::size_t kBundledModelCount;
}  // namespace detail

std::vector<std::string> bundled_model_names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < detail::kBundledModelCount; ++i)
    out.emplace_back(detail::kBundledModels[i].first);
  return out;
}

std::string_view bundled_model_text(std::string_view name) {
  for (std::size_t i = 0; i < detail::kBundledModelCount; ++i)
    if (detail::kBundledModels[i].first == name) return detail::kBundledModels[i].second;
  std::string known;
  for (const auto& n : bundled_model_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::UnknownModel,
              "no bundled model named '" + std::string(name) + "' (known: " + known + ")");
}

Machine load_bundled(std::string_view name) { return parse_model(bundled_model_text(name)); }

}  // namespace tfsm
