#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "costreg/numeric/adam.hpp"
#include "costreg/numeric/dense_network.hpp"

namespace costreg {

/// Flat, self-describing container of named entries.
///
/// Layout (little-endian):
///   8-byte magic "CSTREGCK", u32 format version,
///   u32 entry count, then per entry:
///     u32 name length, name bytes, u8 kind, payload.
/// Payloads:
///   network: u32 layer count + i32 widths, hidden and output activation names
///            (u32 length + bytes), then per layer the weights row-major and the biases.
///   adam:    u64 step, f64 beta1, beta2, epsilon, u32 layer count, per layer
///            u32 rows, u32 cols, then first and second moments in the network order.
///   text:    u32 length + bytes.
///   values:  u32 count + f64 values.
/// Entries are written in name order, so the byte stream is a pure function of the contents.
class Checkpoint {
 public:
  static constexpr std::array<char, 8> kMagic{'C', 'S', 'T', 'R', 'E', 'G', 'C', 'K'};
  static constexpr std::uint32_t kFormatVersion = 1;

  using Entry = std::variant<DenseNetwork, AdamState, std::string, std::vector<double>>;

  void put(const std::string& name, Entry entry);
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  std::vector<std::string> names() const;

  const DenseNetwork& network(const std::string& name) const;
  const AdamState& adam(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  const std::vector<double>& values(const std::string& name) const;

  std::string serialize() const;
  /// Throws ArtifactError on bad magic, unsupported version, or truncated data.
  static Checkpoint deserialize(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

 private:
  template <typename T>
  const T& get(const std::string& name) const;

  std::map<std::string, Entry> entries_;
};

}  // namespace costreg
