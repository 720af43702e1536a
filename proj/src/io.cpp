#include "lrmm/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lrmm {

namespace {

constexpr char kMagic[4] = {'T', '3', 'D', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(os, bits);
}

double get_f64(std::istream& is) {
  const std::uint64_t bits = get_u64(is);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_t3d1(const std::string& path, const Tensor3& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kMagic, 4);
  put_u64(os, static_cast<std::uint64_t>(t.d1()));
  put_u64(os, static_cast<std::uint64_t>(t.d2()));
  put_u64(os, static_cast<std::uint64_t>(t.n()));
  for (double v : t.data()) put_f64(os, v);
  if (!os) throw std::runtime_error("write failed: " + path);
}

Tensor3 read_t3d1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a T3D1 file: " + path);
  }
  const auto d1 = static_cast<Eigen::Index>(get_u64(is));
  const auto d2 = static_cast<Eigen::Index>(get_u64(is));
  const auto n = static_cast<Eigen::Index>(get_u64(is));
  if (!is || d1 < 1 || d2 < 1 || n < 1) {
    throw std::runtime_error("corrupt T3D1 header: " + path);
  }
  std::vector<double> data(static_cast<std::size_t>(d1 * d2 * n));
  for (double& v : data) v = get_f64(is);
  if (!is) throw std::runtime_error("truncated T3D1 payload: " + path);
  return Tensor3(d1, d2, n, std::move(data));
}

void write_slices_csv(const std::string& manifest_path, const Tensor3& t) {
  namespace fs = std::filesystem;
  const fs::path manifest(manifest_path);
  const fs::path dir = manifest.parent_path();
  const std::string stem = manifest.stem().string();
  nlohmann::json meta;
  meta["format"] = "t3d1-csv";
  meta["d1"] = t.d1();
  meta["d2"] = t.d2();
  meta["n"] = t.n();
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < t.n(); ++i) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_slice_%06lld.csv",
                  static_cast<long long>(i));
    const std::string name = stem + suffix;
    names.push_back(name);
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot open for writing: " + (dir / name).string());
    for (Eigen::Index a = 0; a < t.d1(); ++a) {
      for (Eigen::Index b = 0; b < t.d2(); ++b) {
        if (b > 0) os << ',';
        os << format_double(t(a, b, i));
      }
      os << '\n';
    }
  }
  meta["slices"] = names;
  std::ofstream os(manifest_path);
  if (!os) throw std::runtime_error("cannot open for writing: " + manifest_path);
  os << meta.dump(2) << '\n';
}

Tensor3 read_slices_csv(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  std::ifstream is(manifest_path);
  if (!is) throw std::runtime_error("cannot open: " + manifest_path);
  nlohmann::json meta = nlohmann::json::parse(is);
  if (meta.value("format", "") != "t3d1-csv") {
    throw std::runtime_error("not a tensor CSV manifest: " + manifest_path);
  }
  const auto d1 = meta.at("d1").get<Eigen::Index>();
  const auto d2 = meta.at("d2").get<Eigen::Index>();
  const auto n = meta.at("n").get<Eigen::Index>();
  const auto names = meta.at("slices").get<std::vector<std::string>>();
  if (static_cast<Eigen::Index>(names.size()) != n) {
    throw std::runtime_error("manifest slice count mismatch: " + manifest_path);
  }
  const fs::path dir = fs::path(manifest_path).parent_path();
  Tensor3 t(d1, d2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::ifstream slice_is(dir / names[i]);
    if (!slice_is) throw std::runtime_error("cannot open slice: " + names[i]);
    std::string line;
    for (Eigen::Index a = 0; a < d1; ++a) {
      if (!std::getline(slice_is, line)) {
        throw std::runtime_error("truncated slice file: " + names[i]);
      }
      std::stringstream ss(line);
      std::string cell;
      for (Eigen::Index b = 0; b < d2; ++b) {
        if (!std::getline(ss, cell, ',')) {
          throw std::runtime_error("short row in slice file: " + names[i]);
        }
        t(a, b, i) = std::stod(cell);
      }
    }
  }
  t.check_finite();
  return t;
}

Tensor3 read_tensor_auto(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4] = {0, 0, 0, 0};
  is.read(magic, 4);
  is.close();
  if (std::memcmp(magic, kMagic, 4) == 0) return read_t3d1(path);
  return read_slices_csv(path);
}

void write_labels_csv(const std::string& path, const Labeling& labels) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "label\n";
  for (int s : labels) os << (s + 1) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

Labeling read_labels_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("label", 0) != 0) {
    throw std::runtime_error("labels file missing header: " + path);
  }
  Labeling labels;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const int v = std::stoi(line);
    if (v < 1) throw std::runtime_error("labels must be 1-based positive ids: " + path);
    labels.push_back(v - 1);
  }
  if (labels.empty()) throw std::runtime_error("labels file is empty: " + path);
  return labels;
}

}  // namespace lrmm
