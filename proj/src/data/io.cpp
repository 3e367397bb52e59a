#include "wsnf/data/io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace wsnf::data {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].find_first_of(",\n") != std::string::npos) {
      throw DataError(DataErrorKind::Format, "name '" + items[i] + "' contains a comma or newline");
    }
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

Index parse_index(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size() || x < 0) throw std::invalid_argument(v);
    return static_cast<Index>(x);
  } catch (const std::exception&) {
    throw DataError(DataErrorKind::Format, "manifest: bad integer for '" + key + "': '" + v + "'");
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + p.string() + "' failed");
}

void put_le(std::string& out, std::uint64_t bits, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

std::uint64_t get_le(const std::string& in, std::size_t offset, int bytes) {
  std::uint64_t bits = 0;
  for (int b = 0; b < bytes; ++b) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + static_cast<std::size_t>(b)])) << (8 * b);
  }
  return bits;
}

}  // namespace

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(DataErrorKind::Format, "manifest: empty file");
  {
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    if (!(header >> magic >> version) || magic != "wsnf-manifest") {
      throw DataError(DataErrorKind::Format, "manifest: bad header '" + line + "'");
    }
    if (version != kManifestVersion) {
      throw DataError(DataErrorKind::Format, "manifest: unsupported version " + std::to_string(version));
    }
  }
  Manifest m;
  bool have_n = false, have_d = false, have_t = false;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw DataError(DataErrorKind::Format, "manifest: expected key = value, got '" + line + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "split") {
      m.split = value;
    } else if (key == "n") {
      m.n = parse_index(key, value);
      have_n = true;
    } else if (key == "d") {
      m.d = parse_index(key, value);
      have_d = true;
    } else if (key == "t") {
      m.t = parse_index(key, value);
      have_t = true;
    } else if (key == "classes") {
      m.classes = split_list(value);
    } else if (key == "lf_names") {
      m.lf_names = split_list(value);
    } else if (key == "lf_to_class") {
      for (const auto& s : split_list(value)) m.lf_to_class.push_back(parse_index(key, s));
    } else if (key == "features") {
      m.features_path = value;
    } else if (key == "matches") {
      m.matches_path = value;
    } else if (key == "labels") {
      m.labels_path = value;
    } else if (key == "encoder") {
      m.encoder = value;
    } else if (key == "preprocessing") {
      m.preprocessing = value;
    } else {
      m.extra[key] = value;
    }
  }
  if (!have_n || !have_d || !have_t) throw DataError(DataErrorKind::Format, "manifest: n, d and t are required");
  if (m.features_path.empty() || m.matches_path.empty()) {
    throw DataError(DataErrorKind::Format, "manifest: features and matches paths are required");
  }
  return m;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  std::ostringstream out;
  out << "wsnf-manifest " << kManifestVersion << '\n';
  out << "split = " << m.split << '\n';
  out << "n = " << m.n << '\n' << "d = " << m.d << '\n' << "t = " << m.t << '\n';
  out << "classes = " << join(m.classes) << '\n';
  out << "lf_names = " << join(m.lf_names) << '\n';
  std::vector<std::string> ids;
  for (Index y : m.lf_to_class) ids.push_back(std::to_string(y));
  out << "lf_to_class = " << join(ids) << '\n';
  out << "features = " << m.features_path << '\n';
  out << "matches = " << m.matches_path << '\n';
  if (!m.labels_path.empty()) out << "labels = " << m.labels_path << '\n';
  if (!m.encoder.empty()) out << "encoder = " << m.encoder << '\n';
  if (!m.preprocessing.empty()) out << "preprocessing = " << m.preprocessing << '\n';
  for (const auto& [k, v] : m.extra) out << k << " = " << v << '\n';
  write_file(path, out.str());
}

WeakDataset load(const fs::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();

  if (static_cast<Index>(m.lf_to_class.size()) != m.t) {
    throw DataError(DataErrorKind::DimensionMismatch, "manifest: lf_to_class has " + std::to_string(m.lf_to_class.size()) +
                                                          " entries but t = " + std::to_string(m.t));
  }
  if (!m.lf_names.empty() && static_cast<Index>(m.lf_names.size()) != m.t) {
    throw DataError(DataErrorKind::DimensionMismatch, "manifest: lf_names length differs from t");
  }

  WeakDataset ds;
  ds.split = m.split;
  ds.class_names = m.classes;
  ds.lf_names = m.lf_names;
  ds.lf_to_class = m.lf_to_class;

  const std::string fbytes = read_file(dir / m.features_path);
  if (static_cast<Index>(fbytes.size()) != m.n * m.d * 8) {
    throw DataError(DataErrorKind::DimensionMismatch, "features payload has " + std::to_string(fbytes.size()) +
                                                          " bytes, expected n*d*8 = " + std::to_string(m.n * m.d * 8));
  }
  ds.features.resize(m.n, m.d);
  for (Index i = 0; i < ds.features.size(); ++i) {
    ds.features.data()[i] = std::bit_cast<double>(get_le(fbytes, static_cast<std::size_t>(i) * 8, 8));
  }

  const std::string mbytes = read_file(dir / m.matches_path);
  if (static_cast<Index>(mbytes.size()) != m.n * m.t) {
    throw DataError(DataErrorKind::DimensionMismatch, "matches payload has " + std::to_string(mbytes.size()) +
                                                          " bytes, expected n*t = " + std::to_string(m.n * m.t));
  }
  ds.matches.resize(m.n, m.t);
  for (Index i = 0; i < ds.matches.size(); ++i) {
    const auto b = static_cast<unsigned char>(mbytes[static_cast<std::size_t>(i)]);
    if (b > 1) throw DataError(DataErrorKind::NonBinaryMatch, "non-binary match byte " + std::to_string(b));
    ds.matches.data()[i] = b;
  }

  if (!m.labels_path.empty()) {
    const std::string lbytes = read_file(dir / m.labels_path);
    if (static_cast<Index>(lbytes.size()) != m.n * 4) {
      throw DataError(DataErrorKind::DimensionMismatch, "labels payload has " + std::to_string(lbytes.size()) +
                                                            " bytes, expected n*4 = " + std::to_string(m.n * 4));
    }
    std::vector<Index> gold(static_cast<std::size_t>(m.n));
    for (Index i = 0; i < m.n; ++i) {
      const auto bits = static_cast<std::uint32_t>(get_le(lbytes, static_cast<std::size_t>(i) * 4, 4));
      gold[static_cast<std::size_t>(i)] = static_cast<Index>(std::bit_cast<std::int32_t>(bits));
    }
    ds.gold = std::move(gold);
  }
  fill_default_names(ds);
  validate(ds);
  return ds;
}

fs::path save(const WeakDataset& ds, const fs::path& dir, const std::string& stem, const Provenance& provenance) {
  validate(ds);
  fs::create_directories(dir);
  Manifest m;
  m.split = ds.split;
  m.n = ds.size();
  m.d = ds.feature_dim();
  m.t = ds.num_lfs();
  m.classes = ds.class_names;
  m.lf_names = ds.lf_names;
  m.lf_to_class = ds.lf_to_class;
  m.features_path = stem + ".features.f64";
  m.matches_path = stem + ".matches.u8";
  m.encoder = provenance.encoder;
  m.preprocessing = provenance.preprocessing;

  std::string fbytes;
  fbytes.reserve(static_cast<std::size_t>(ds.features.size()) * 8);
  for (Index i = 0; i < ds.features.size(); ++i) put_le(fbytes, std::bit_cast<std::uint64_t>(ds.features.data()[i]), 8);
  write_file(dir / m.features_path, fbytes);

  std::string mbytes(reinterpret_cast<const char*>(ds.matches.data()), static_cast<std::size_t>(ds.matches.size()));
  write_file(dir / m.matches_path, mbytes);

  if (ds.gold) {
    m.labels_path = stem + ".labels.i32";
    std::string lbytes;
    for (Index y : *ds.gold) put_le(lbytes, std::bit_cast<std::uint32_t>(static_cast<std::int32_t>(y)), 4);
    write_file(dir / m.labels_path, lbytes);
  }
  const fs::path manifest = dir / (stem + ".manifest");
  write_manifest(manifest, m);
  return manifest;
}

}  // namespace wsnf::data
