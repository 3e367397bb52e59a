#include "wsnf/autodiff/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace wsnf::ad {

namespace {

std::string to_hex(double v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

double from_hex(const std::string& word) {
  if (word.size() != 16) throw IoError("checkpoint: malformed value '" + word + "'");
  std::uint64_t bits = 0;
  for (char c : word) {
    bits <<= 4;
    if (c >= '0' && c <= '9') {
      bits |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      bits |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw IoError("checkpoint: malformed value '" + word + "'");
    }
  }
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out << "wsnf-checkpoint " << kCheckpointVersion << '\n';
  for (const auto& [key, value] : ckpt.meta) {
    if (key.empty() || key.find_first_of(" \t\n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw IoError("checkpoint: invalid metadata entry '" + key + "'");
    }
    out << "meta " << key << ' ' << value << '\n';
  }
  for (const auto& [name, m] : ckpt.params.values()) {
    out << "param " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Index i = 0; i < m.size(); ++i) {
      if (i > 0) out << ((i % 8 == 0) ? '\n' : ' ');
      out << to_hex(m.data()[i]);
    }
    out << '\n';
  }
  out << "end\n";
  if (!out) throw IoError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "wsnf-checkpoint") throw IoError("checkpoint: bad header");
  if (version != kCheckpointVersion) {
    throw IoError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  std::string tag;
  while (in >> tag) {
    if (tag == "end") return ckpt;
    if (tag == "meta") {
      std::string key, value;
      in >> key;
      std::getline(in, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ckpt.meta[key] = value;
    } else if (tag == "param") {
      std::string name;
      Index rows = -1, cols = -1;
      if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) {
        throw IoError("checkpoint: bad parameter header");
      }
      MatrixXd m(rows, cols);
      std::string word;
      for (Index i = 0; i < m.size(); ++i) {
        if (!(in >> word)) throw IoError("checkpoint: truncated values for '" + name + "'");
        m.data()[i] = from_hex(word);
      }
      ckpt.params.add(name, std::move(m));
    } else {
      throw IoError("checkpoint: unexpected token '" + tag + "'");
    }
  }
  throw IoError("checkpoint: missing end marker");
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace wsnf::ad
