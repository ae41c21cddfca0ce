#include "ritz/ad/param_vector.hpp"

#include <algorithm>

#include "ritz/error.hpp"

namespace ritz::ad {

std::size_t ParamVector::add_segment(std::string name, std::size_t rows, std::size_t cols) {
  Segment seg{std::move(name), values_.size(), rows, cols};
  values_.resize(values_.size() + seg.size(), 0.0);
  layout_.push_back(std::move(seg));
  return layout_.size() - 1;
}

const ParamVector::Segment& ParamVector::segment(const std::string& name) const {
  auto it = std::find_if(layout_.begin(), layout_.end(), [&](const Segment& s) { return s.name == name; });
  if (it == layout_.end()) throw ConfigError("no parameter segment named '" + name + "'");
  return *it;
}

std::span<double> ParamVector::block(std::size_t i) {
  const Segment& s = layout_.at(i);
  return std::span<double>(values_).subspan(s.offset, s.size());
}

std::span<const double> ParamVector::block(std::size_t i) const {
  const Segment& s = layout_.at(i);
  return std::span<const double>(values_).subspan(s.offset, s.size());
}

void ParamVector::assign(std::span<const double> flat) {
  if (flat.size() != values_.size()) {
    throw ConfigError("parameter vector length " + std::to_string(flat.size()) + " does not match layout length " +
                      std::to_string(values_.size()));
  }
  std::copy(flat.begin(), flat.end(), values_.begin());
}

std::vector<std::vector<double>> ParamVector::unflatten() const {
  std::vector<std::vector<double>> out;
  out.reserve(layout_.size());
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    auto b = block(i);
    out.emplace_back(b.begin(), b.end());
  }
  return out;
}

void ParamVector::set_blocks(const std::vector<std::vector<double>>& blocks) {
  if (blocks.size() != layout_.size()) throw ConfigError("block count does not match layout");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto b = block(i);
    if (blocks[i].size() != b.size()) throw ConfigError("block '" + layout_[i].name + "' has the wrong size");
    std::copy(blocks[i].begin(), blocks[i].end(), b.begin());
  }
}

}  // namespace ritz::ad
