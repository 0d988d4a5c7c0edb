#include "cgei/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace cgei {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  char ch = 0;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(ch);
  }
  if (token.empty()) throw Error("truncated PGM header");
  return token;
}

int parse_positive(const std::string& token) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    throw Error("malformed PGM header value: " + token);
  }
  if (used != token.size() || value <= 0) throw Error("malformed PGM header value: " + token);
  return value;
}

}  // namespace

Image read_pgm(std::istream& in) {
  if (next_token(in) != "P5") throw Error("not a binary PGM (P5) file");
  const int width = parse_positive(next_token(in));
  const int height = parse_positive(next_token(in));
  const int maxval = parse_positive(next_token(in));
  if (maxval > 255) throw Error("only 8-bit PGM is supported");

  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw Error("truncated PGM data");

  std::vector<double> values(raw.size());
  std::transform(raw.begin(), raw.end(), values.begin(), [maxval](unsigned char v) {
    return std::min(1.0, static_cast<double>(v) / maxval);
  });
  return Image(Grid(height, width, std::move(values)));
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const Grid& img) {
  out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  std::string raw(img.size(), '\0');
  auto v = img.values();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double c = std::clamp(v[i], 0.0, 1.0);
    raw[i] = static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0)));
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error("failed to write PGM data");
}

void write_pgm(const std::filesystem::path& path, const Grid& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_pgm(out, img);
}

}  // namespace cgei
