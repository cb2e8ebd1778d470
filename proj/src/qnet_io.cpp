#include <cstring>
#include <fstream>
#include <stdexcept>

#include "evcs/qnet.hpp"

namespace evcs {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'Q', 'N', 'E', 'T', '0', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated network file");
  return v;
}

void write_one(std::ostream& out, const QNet& net) {
  const auto& sizes = net.layer_sizes();
  put<uint32_t>(out, static_cast<uint32_t>(sizes.size()));
  for (int s : sizes) put<uint32_t>(out, static_cast<uint32_t>(s));
  for (int l = 0; l < net.n_layers(); ++l) {
    const auto& W = net.weights()[l];
    for (Eigen::Index i = 0; i < W.rows(); ++i)
      for (Eigen::Index j = 0; j < W.cols(); ++j) put<double>(out, W(i, j));
    const auto& b = net.biases()[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) put<double>(out, b(i));
  }
}

QNet read_one(std::istream& in) {
  uint32_t n = get<uint32_t>(in);
  if (n < 2 || n > 64) throw std::runtime_error("implausible layer count in network file");
  std::vector<int> sizes(n);
  for (auto& s : sizes) s = static_cast<int>(get<uint32_t>(in));
  QNet net(sizes);
  for (int l = 0; l < net.n_layers(); ++l) {
    auto& W = net.weights()[l];
    for (Eigen::Index i = 0; i < W.rows(); ++i)
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = get<double>(in);
    auto& b = net.biases()[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = get<double>(in);
  }
  return net;
}

void write_file(const std::string& path, const NetMeta& meta, const QNet* a, const QNet* b) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  put<uint64_t>(out, meta.fingerprint);
  put<int64_t>(out, meta.episode);
  put<uint32_t>(out, b ? 2u : 1u);
  write_one(out, *a);
  if (b) write_one(out, *b);
  if (!out) throw std::runtime_error("failed writing " + path);
}

uint32_t read_header(std::istream& in, const std::string& path, NetMeta* meta) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path + " is not a network file");
  NetMeta m;
  m.fingerprint = get<uint64_t>(in);
  m.episode = get<int64_t>(in);
  if (meta) *meta = m;
  return get<uint32_t>(in);
}

}  // namespace

void save_net(const QNet& net, const std::string& path, const NetMeta& meta) {
  write_file(path, meta, &net, nullptr);
}

QNet load_net(const std::string& path, NetMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  uint32_t n = read_header(in, path, meta);
  if (n < 1) throw std::runtime_error("network file holds no parameters");
  return read_one(in);
}

void save_checkpoint(const QNet& net, const QNet& target, const std::string& path,
                     const NetMeta& meta) {
  write_file(path, meta, &net, &target);
}

std::pair<QNet, QNet> load_checkpoint(const std::string& path, NetMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  uint32_t n = read_header(in, path, meta);
  if (n != 2) throw std::runtime_error(path + " is not a training checkpoint");
  QNet a = read_one(in);
  QNet b = read_one(in);
  return {std::move(a), std::move(b)};
}

}  // namespace evcs
