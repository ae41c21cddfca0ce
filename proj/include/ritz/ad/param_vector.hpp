#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ritz::ad {

// Flat parameter storage with named index ranges (one per weight matrix or
// bias vector of a network).
class ParamVector {
 public:
  struct Segment {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t size() const { return rows * cols; }
    bool operator==(const Segment&) const = default;
  };

  ParamVector() = default;

  // Appends a rows×cols block initialised to zero and returns its index.
  std::size_t add_segment(std::string name, std::size_t rows, std::size_t cols);

  std::size_t size() const { return values_.size(); }
  const std::vector<Segment>& layout() const { return layout_; }
  const Segment& segment(std::size_t i) const { return layout_.at(i); }
  const Segment& segment(const std::string& name) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> block(std::size_t i);
  std::span<const double> block(std::size_t i) const;

  // Copies `flat` into the storage; the length must match the layout exactly.
  void assign(std::span<const double> flat);
  std::vector<double> flatten() const { return values_; }

  // Exact split into per-segment arrays and back.
  std::vector<std::vector<double>> unflatten() const;
  void set_blocks(const std::vector<std::vector<double>>& blocks);

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> values_;
  std::vector<Segment> layout_;
};

}  // namespace ritz::ad
