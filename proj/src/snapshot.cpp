#include "tann/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "tann/errors.hpp"
#include "tann/report.hpp"

namespace tann {

namespace {

constexpr std::array<char, 8> kMagic = {'T', 'A', 'N', 'N', 'T', 'R', 'I', 'E'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kByteOrderMark = 0x01020304;
constexpr std::uint64_t kAbsent = std::numeric_limits<std::uint64_t>::max();
// Guards against allocating absurd buffers from a corrupt file.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void reals(std::span<const double> values) {
    for (double v : values) f64(v);
  }

 private:
  void le(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint64_t count() {
    const std::uint64_t n = u64();
    if (n > kMaxElements) throw FormatError("snapshot: implausible element count");
    return n;
  }
  void reals(std::span<double> values) {
    for (double& v : values) v = f64();
  }
  void bytes(char* dst, std::size_t n) {
    if (!in_.read(dst, static_cast<std::streamsize>(n))) throw FormatError("snapshot: truncated file");
  }

 private:
  std::uint64_t le(int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      const int c = in_.get();
      if (c == std::char_traits<char>::eof()) throw FormatError("snapshot: truncated file");
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
  }
  std::istream& in_;
};

std::uint8_t loss_tag(nn::LossKind k) {
  switch (k) {
    case nn::LossKind::BCE:
      return 0;
    case nn::LossKind::MSE:
      return 1;
    case nn::LossKind::CrossEntropy:
      return 2;
  }
  return 0;
}

std::uint8_t activation_tag(nn::ActivationKind k) {
  switch (k) {
    case nn::ActivationKind::ReLU:
      return 0;
    case nn::ActivationKind::Sigmoid:
      return 1;
    case nn::ActivationKind::Identity:
      return 2;
  }
  return 2;
}

void write_node_ref(Writer& w, std::optional<NodeId> id) { w.u64(id ? id->value : kAbsent); }

}  // namespace

void write_network(std::ostream& out, const nn::Network& net) {
  Writer w(out);
  w.u8(loss_tag(net.loss));
  w.u64(net.layers.size());
  for (const nn::Layer& layer : net.layers) {
    std::visit(overloaded{
                   [&](const nn::Dense& d) {
                     w.u8(0);
                     w.u64(d.weight.rows);
                     w.u64(d.weight.cols);
                     w.reals(d.weight.data);
                     w.reals(d.bias);
                   },
                   [&](const nn::Activation& a) {
                     w.u8(1);
                     w.u8(activation_tag(a.kind));
                   },
                   [&](const nn::Dropout& d) {
                     w.u8(2);
                     w.f64(d.p);
                   },
                   [&](const nn::Recurrent& r) {
                     w.u8(3);
                     w.u64(r.hidden_size());
                     w.u64(r.step_width());
                     w.u64(r.seq_len);
                     w.u64(r.input_width);
                     w.reals(r.w_ih.data);
                     w.reals(r.w_hh.data);
                     w.reals(r.bias);
                   },
                   [&](const nn::Conv1D& c) {
                     w.u8(4);
                     w.u64(c.out_channels());
                     w.u64(c.kernel_width());
                     w.reals(c.kernels.data);
                     w.reals(c.bias);
                   },
                   [&](const nn::ComplexDense& c) {
                     w.u8(5);
                     w.u64(c.weight.rows);
                     w.u64(c.weight.cols);
                     w.u8(c.real_input ? 1 : 0);
                     w.reals(as_reals(std::span<const Complex>(c.weight.data)));
                     w.reals(as_reals(std::span<const Complex>(c.bias)));
                   },
                   [&](const nn::Magnitude&) { w.u8(6); },
               },
               layer);
  }
}

nn::Network read_network(std::istream& in) {
  Reader r(in);
  nn::Network net;
  switch (r.u8()) {
    case 0:
      net.loss = nn::LossKind::BCE;
      break;
    case 1:
      net.loss = nn::LossKind::MSE;
      break;
    case 2:
      net.loss = nn::LossKind::CrossEntropy;
      break;
    default:
      throw FormatError("snapshot: unknown loss tag");
  }
  const std::uint64_t layers = r.count();
  for (std::uint64_t i = 0; i < layers; ++i) {
    switch (r.u8()) {
      case 0: {
        const auto rows = r.count(), cols = r.count();
        nn::Dense d = nn::make_dense(cols, rows);
        r.reals(d.weight.data);
        r.reals(d.bias);
        net.layers.emplace_back(std::move(d));
        break;
      }
      case 1: {
        const auto tag = r.u8();
        if (tag > 2) throw FormatError("snapshot: unknown activation tag");
        const nn::ActivationKind kinds[] = {nn::ActivationKind::ReLU, nn::ActivationKind::Sigmoid,
                                            nn::ActivationKind::Identity};
        net.layers.emplace_back(nn::Activation{kinds[tag]});
        break;
      }
      case 2:
        net.layers.emplace_back(nn::Dropout{r.f64()});
        break;
      case 3: {
        const auto hidden = r.count(), step = r.count(), seq = r.count(), width = r.count();
        if (hidden == 0 || step == 0 || seq == 0 || width > step * seq) {
          throw FormatError("snapshot: inconsistent recurrent layer shape");
        }
        nn::Recurrent rec = nn::make_recurrent(step, seq, hidden, width);
        r.reals(rec.w_ih.data);
        r.reals(rec.w_hh.data);
        r.reals(rec.bias);
        net.layers.emplace_back(std::move(rec));
        break;
      }
      case 4: {
        const auto channels = r.count(), width = r.count();
        nn::Conv1D c = nn::make_conv1d(width, channels);
        r.reals(c.kernels.data);
        r.reals(c.bias);
        net.layers.emplace_back(std::move(c));
        break;
      }
      case 5: {
        const auto rows = r.count(), cols = r.count();
        const bool real_input = r.u8() != 0;
        nn::ComplexDense c = nn::make_complex_dense(cols, rows, real_input);
        r.reals(as_reals(std::span<Complex>(c.weight.data)));
        r.reals(as_reals(std::span<Complex>(c.bias)));
        net.layers.emplace_back(std::move(c));
        break;
      }
      case 6:
        net.layers.emplace_back(nn::Magnitude{});
        break;
      default:
        throw FormatError("snapshot: unknown layer tag");
    }
  }
  return net;
}

void write_snapshot(std::ostream& out, const Trie& t) {
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.u32(kVersion);
  w.u32(kByteOrderMark);
  w.u64(t.declared_depth);
  write_node_ref(w, t.root);
  w.u64(t.arena.size());
  for (const TrieNode& n : t.arena) {
    write_node_ref(w, n.left);
    write_node_ref(w, n.right);
    w.u64(n.feature_index);
    write_network(out, n.net);
  }
}

Trie read_snapshot(std::istream& in) {
  Reader r(in);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw FormatError("snapshot: bad magic header");
  if (const auto v = r.u32(); v != kVersion) throw FormatError("snapshot: unsupported version " + std::to_string(v));
  if (r.u32() != kByteOrderMark) throw FormatError("snapshot: byte-order mark mismatch");

  Trie t;
  t.declared_depth = r.u64();
  const std::uint64_t root = r.u64();
  const std::uint64_t count = r.count();
  auto ref = [&](std::uint64_t v) -> std::optional<NodeId> {
    if (v == kAbsent) return std::nullopt;
    if (v >= count) throw FormatError("snapshot: node reference out of range");
    return NodeId{v};
  };
  t.root = ref(root);
  t.arena.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    TrieNode n;
    n.left = ref(r.u64());
    n.right = ref(r.u64());
    n.feature_index = r.u64();
    n.net = read_network(in);
    t.arena.push_back(std::move(n));
  }
  return t;
}

void save_snapshot(const std::filesystem::path& path, const Trie& t) {
  write_file_atomically(path, [&](std::ostream& out) { write_snapshot(out, t); });
}

Trie load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot " + path.string());
  return read_snapshot(in);
}

}  // namespace tann
