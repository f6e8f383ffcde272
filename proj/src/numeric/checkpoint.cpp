#include "costreg/numeric/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "costreg/errors.hpp"

namespace costreg {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

enum class Kind : std::uint8_t { network = 1, adam = 2, text = 3, values = 4 };

class Writer {
 public:
  template <typename T>
  void raw(const T& value) {
    const char* p = reinterpret_cast<const char*>(&value);
    out_.append(p, sizeof(T));
  }
  void u32(std::uint32_t v) { raw(v); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s.data(), s.size());
  }
  // Row-major regardless of Eigen's storage order.
  void matrix(const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) raw(m(r, c));
  }
  void vector(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) raw(v[i]);
  }
  void params(const ParameterSet& p) {
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      matrix(p.weights[i]);
      vector(p.biases[i]);
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T raw() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ArtifactError("checkpoint truncated");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::uint32_t u32() { return raw<std::uint32_t>(); }
  std::string str() {
    const std::uint32_t n = u32();
    if (pos_ + n > bytes_.size()) throw ArtifactError("checkpoint truncated");
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void matrix(Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = raw<double>();
  }
  void vector(Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = raw<double>();
  }
  void params(ParameterSet& p) {
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      matrix(p.weights[i]);
      vector(p.biases[i]);
    }
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void write_network(Writer& w, const DenseNetwork& net) {
  w.u32(static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int width : net.layer_sizes()) w.raw(static_cast<std::int32_t>(width));
  w.str(to_string(net.hidden_activation()));
  w.str(to_string(net.output_activation()));
  w.params(net.parameters());
}

DenseNetwork read_network(Reader& r) {
  const std::uint32_t depth = r.u32();
  if (depth < 2 || depth > 64) throw ArtifactError("checkpoint: implausible network depth");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < depth; ++i) sizes.push_back(r.raw<std::int32_t>());
  const std::string hidden = r.str();
  const std::string output = r.str();
  try {
    DenseNetwork net(sizes, activation_from_string(hidden), activation_from_string(output));
    r.params(net.parameters());
    return net;
  } catch (const ConfigurationError& e) {
    throw ArtifactError(std::string("checkpoint: ") + e.what());
  }
}

void write_adam(Writer& w, const AdamState& s) {
  w.raw(static_cast<std::uint64_t>(s.step));
  w.raw(s.beta1);
  w.raw(s.beta2);
  w.raw(s.epsilon);
  w.u32(static_cast<std::uint32_t>(s.first_moment.weights.size()));
  for (const auto& m : s.first_moment.weights) {
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
  }
  w.params(s.first_moment);
  w.params(s.second_moment);
}

AdamState read_adam(Reader& r) {
  AdamState s;
  s.step = r.raw<std::uint64_t>();
  s.beta1 = r.raw<double>();
  s.beta2 = r.raw<double>();
  s.epsilon = r.raw<double>();
  const std::uint32_t layers = r.u32();
  if (layers > 64) throw ArtifactError("checkpoint: implausible optimizer depth");
  ParameterSet shape;
  for (std::uint32_t i = 0; i < layers; ++i) {
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    shape.weights.push_back(Matrix::Zero(rows, cols));
    shape.biases.push_back(Vector::Zero(rows));
  }
  s.first_moment = shape;
  s.second_moment = shape;
  r.params(s.first_moment);
  r.params(s.second_moment);
  return s;
}

}  // namespace

void Checkpoint::put(const std::string& name, Entry entry) { entries_[name] = std::move(entry); }

std::vector<std::string> Checkpoint::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

template <typename T>
const T& Checkpoint::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ArtifactError("checkpoint has no entry '" + name + "'");
  const T* value = std::get_if<T>(&it->second);
  if (value == nullptr) throw ArtifactError("checkpoint entry '" + name + "' has an unexpected kind");
  return *value;
}

const DenseNetwork& Checkpoint::network(const std::string& name) const { return get<DenseNetwork>(name); }
const AdamState& Checkpoint::adam(const std::string& name) const { return get<AdamState>(name); }
const std::string& Checkpoint::text(const std::string& name) const { return get<std::string>(name); }
const std::vector<double>& Checkpoint::values(const std::string& name) const {
  return get<std::vector<double>>(name);
}

std::string Checkpoint::serialize() const {
  Writer w;
  for (char c : kMagic) w.raw(c);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(entries_.size()));
  for (const auto& [name, entry] : entries_) {
    w.str(name);
    std::visit(
        [&](const auto& value) {
          using T = std::decay_t<decltype(value)>;
          if constexpr (std::is_same_v<T, DenseNetwork>) {
            w.raw(Kind::network);
            write_network(w, value);
          } else if constexpr (std::is_same_v<T, AdamState>) {
            w.raw(Kind::adam);
            write_adam(w, value);
          } else if constexpr (std::is_same_v<T, std::string>) {
            w.raw(Kind::text);
            w.str(value);
          } else {
            w.raw(Kind::values);
            w.u32(static_cast<std::uint32_t>(value.size()));
            for (double v : value) w.raw(v);
          }
        },
        entry);
  }
  return w.take();
}

Checkpoint Checkpoint::deserialize(std::string_view bytes) {
  Reader r(bytes);
  for (char expected : kMagic) {
    if (r.raw<char>() != expected) throw ArtifactError("not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw ArtifactError("unsupported checkpoint format version " + std::to_string(version) + " (expected " +
                        std::to_string(kFormatVersion) + ")");
  }
  Checkpoint ckpt;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    const auto kind = static_cast<Kind>(r.raw<std::uint8_t>());
    switch (kind) {
      case Kind::network: ckpt.put(name, read_network(r)); break;
      case Kind::adam: ckpt.put(name, read_adam(r)); break;
      case Kind::text: ckpt.put(name, r.str()); break;
      case Kind::values: {
        const std::uint32_t n = r.u32();
        std::vector<double> values;
        values.reserve(n);
        for (std::uint32_t k = 0; k < n; ++k) values.push_back(r.raw<double>());
        ckpt.put(name, std::move(values));
        break;
      }
      default: throw ArtifactError("checkpoint entry '" + name + "' has unknown kind");
    }
  }
  if (!r.done()) throw ArtifactError("checkpoint has trailing bytes");
  return ckpt;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot write checkpoint " + path.string());
  const std::string bytes = serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ArtifactError("failed writing checkpoint " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

}  // namespace costreg
