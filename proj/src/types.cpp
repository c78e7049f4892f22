#include "plidar/types.hpp"

#include <algorithm>
#include <cmath>

#include "plidar/error.hpp"

namespace plidar {

void DepthMap::set(int u, int v, double d) {
  const std::size_t i = index(u, v);
  if (d > 0.0 && std::isfinite(d)) {
    depth[i] = d;
    valid[i] = 1;
  } else {
    depth[i] = 0.0;
    valid[i] = 0;
  }
}

std::size_t DepthMap::valid_count() const {
  return static_cast<std::size_t>(std::count_if(valid.begin(), valid.end(), [](std::uint8_t f) { return f != 0; }));
}

void DepthMap::validate() const {
  const std::size_t n = std::size_t(width) * std::size_t(height);
  if (width < 0 || height < 0 || depth.size() != n || valid.size() != n) {
    throw InvalidInputError("depth map storage does not match its dimensions");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (valid[i] && !(depth[i] > 0.0 && std::isfinite(depth[i]))) {
      throw InvalidInputError("depth map has a valid pixel with non-positive depth");
    }
  }
}

std::size_t InstanceMap::count(std::uint32_t id) const {
  return static_cast<std::size_t>(std::count(ids.begin(), ids.end(), id));
}

std::vector<std::uint32_t> instance_ids(const InstanceMap& map) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t id : map.ids) {
    if (id != 0) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace plidar
