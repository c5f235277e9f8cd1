#include "splitdr/pgm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace splitdr {

namespace {

// next whitespace-delimited token, skipping '#' comment lines
std::string next_token(std::istream& in) {
  std::string tok;
  for (;;) {
    int c = in.get();
    if (c == EOF) throw std::runtime_error("pgm: unexpected end of file");
    if (std::isspace(c)) continue;
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    tok.push_back(static_cast<char>(c));
    while (in.good()) {
      c = in.peek();
      if (c == EOF || std::isspace(c)) break;
      tok.push_back(static_cast<char>(in.get()));
    }
    return tok;
  }
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5")
    throw std::runtime_error("pgm: unsupported format " + magic);
  const int n2 = std::stoi(next_token(in));
  const int n1 = std::stoi(next_token(in));
  const int maxval = std::stoi(next_token(in));
  if (n1 <= 0 || n2 <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("pgm: bad header in " + path);
  PgmImage img;
  img.n1 = n1;
  img.n2 = n2;
  img.pixels.resize(static_cast<std::size_t>(n1) * n2);
  if (magic == "P2") {
    for (auto& p : img.pixels) p = std::stod(next_token(in));
  } else {
    in.get();  // single whitespace after maxval
    std::string buf(img.pixels.size(), '\0');
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw std::runtime_error("pgm: truncated pixel data in " + path);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      img.pixels[i] = static_cast<unsigned char>(buf[i]);
  }
  return img;
}

void write_pgm(const std::string& path, const PgmImage& img) {
  if (img.pixels.size() != static_cast<std::size_t>(img.n1) * img.n2)
    throw std::invalid_argument("pgm: pixel count does not match dims");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write " + path);
  out << "P5\n" << img.n2 << " " << img.n1 << "\n255\n";
  std::string buf(img.pixels.size(), '\0');
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    double v = std::round(img.pixels[i]);
    v = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
    buf[i] = static_cast<char>(static_cast<unsigned char>(v));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

}  // namespace splitdr
