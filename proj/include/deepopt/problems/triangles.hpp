#ifndef DEEPOPT_PROBLEMS_TRIANGLES_HPP
#define DEEPOPT_PROBLEMS_TRIANGLES_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "deepopt/problem.hpp"
#include "deepopt/problems/graph.hpp"

namespace deepopt {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::size_t row, std::size_t col) const {
    return pixels[row * width + col];
  }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

namespace pgm {

namespace detail {

inline void skip_space_and_comments(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline long read_header_int(std::istream& in) {
  skip_space_and_comments(in);
  long v = -1;
  if (!(in >> v) || v < 0) throw IoError("pgm: malformed header");
  return v;
}

}  // namespace detail

/// Reads P2 (ASCII) or P5 (binary) graymaps with maxval <= 255. Values are
/// rescaled to 0..255 when maxval is smaller.
inline GrayImage read(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) {
    throw IoError("pgm: expected magic P2 or P5");
  }
  GrayImage img;
  img.width = static_cast<std::size_t>(detail::read_header_int(in));
  img.height = static_cast<std::size_t>(detail::read_header_int(in));
  const long maxval = detail::read_header_int(in);
  if (maxval < 1 || maxval > 255) throw IoError("pgm: only 8-bit maxval supported");
  if (img.width == 0 || img.height == 0) throw IoError("pgm: empty image");
  const std::size_t n = img.width * img.height;
  img.pixels.resize(n);
  auto rescale = [maxval](long v) {
    if (v < 0 || v > maxval) throw IoError("pgm: sample out of range");
    return static_cast<std::uint8_t>(std::lround(255.0 * v / maxval));
  };
  if (magic[1] == '2') {
    for (std::size_t i = 0; i < n; ++i) {
      detail::skip_space_and_comments(in);
      long v = -1;
      if (!(in >> v)) throw IoError("pgm: truncated data");
      img.pixels[i] = rescale(v);
    }
  } else {
    in.get();  // single whitespace after maxval
    std::vector<char> raw(n);
    in.read(raw.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw IoError("pgm: truncated data");
    }
    for (std::size_t i = 0; i < n; ++i) {
      img.pixels[i] = rescale(static_cast<unsigned char>(raw[i]));
    }
  }
  return img;
}

inline GrayImage read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path);
  return read(in);
}

inline void write(std::ostream& out, const GrayImage& img, bool binary = true) {
  out << (binary ? "P5" : "P2") << '\n'
      << img.width << ' ' << img.height << "\n255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
  } else {
    for (std::size_t r = 0; r < img.height; ++r) {
      for (std::size_t c = 0; c < img.width; ++c) {
        out << static_cast<int>(img.at(r, c)) << (c + 1 == img.width ? '\n' : ' ');
      }
    }
  }
}

inline void write(const std::string& path, const GrayImage& img,
                  bool binary = true) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image: " + path);
  write(out, img, binary);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace pgm

/// Deterministic stand-in target: a soft gradient with a few bright disks.
inline GrayImage synthetic_target(Rng& rng, std::size_t n = 32) {
  GrayImage img{n, n, std::vector<std::uint8_t>(n * n)};
  const double gx = rng.uniform(-1.0, 1.0);
  const double gy = rng.uniform(-1.0, 1.0);
  struct Disk {
    double cx, cy, r, level;
  };
  std::vector<Disk> disks(4);
  for (auto& d : disks) {
    d = {rng.uniform(), rng.uniform(), rng.uniform(0.1, 0.3), rng.uniform(0.3, 1.0)};
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double x = (c + 0.5) / n;
      const double y = (r + 0.5) / n;
      double v = 0.3 + 0.2 * (gx * (x - 0.5) + gy * (y - 0.5));
      for (const auto& d : disks) {
        if ((x - d.cx) * (x - d.cx) + (y - d.cy) * (y - d.cy) < d.r * d.r) {
          v = std::max(v, d.level);
        }
      }
      img.pixels[r * n + c] =
          static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
    }
  }
  return img;
}

/// Additive accumulation of triangle intensities over pixel centers, clamped
/// to [0, 1] and scaled to 0..255.
inline std::vector<double> rasterize_triangles(std::span<const double> x,
                                               std::size_t n) {
  constexpr std::size_t kGenes = 7;
  std::vector<double> canvas(n * n, 0.0);
  const double N = static_cast<double>(n);
  for (std::size_t t = 0; t + kGenes <= x.size(); t += kGenes) {
    const double ax = x[t] * N, ay = x[t + 1] * N;
    const double bx = x[t + 2] * N, by = x[t + 3] * N;
    const double cx = x[t + 4] * N, cy = x[t + 5] * N;
    const double intensity = x[t + 6];
    const double area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if (area == 0.0 || intensity == 0.0) continue;
    auto lo = [&](double a, double b, double c) {
      return static_cast<long>(std::floor(std::min({a, b, c}) - 0.5));
    };
    auto hi = [&](double a, double b, double c) {
      return static_cast<long>(std::ceil(std::max({a, b, c}) - 0.5));
    };
    const long c0 = std::max(0L, lo(ax, bx, cx));
    const long c1 = std::min(static_cast<long>(n) - 1, hi(ax, bx, cx));
    const long r0 = std::max(0L, lo(ay, by, cy));
    const long r1 = std::min(static_cast<long>(n) - 1, hi(ay, by, cy));
    for (long r = r0; r <= r1; ++r) {
      const double py = r + 0.5;
      for (long c = c0; c <= c1; ++c) {
        const double px = c + 0.5;
        const double w0 = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        const double w1 = (cx - bx) * (py - by) - (cy - by) * (px - bx);
        const double w2 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx);
        const bool inside = area > 0 ? (w0 >= 0 && w1 >= 0 && w2 >= 0)
                                     : (w0 <= 0 && w1 <= 0 && w2 <= 0);
        if (inside) canvas[static_cast<std::size_t>(r) * n + c] += intensity;
      }
    }
  }
  for (auto& v : canvas) v = 255.0 * std::clamp(v, 0.0, 1.0);
  return canvas;
}

class TrianglesProblem : public Problem {
 public:
  static constexpr std::size_t kGenesPerTriangle = 7;
  static constexpr double kEpsilon = 1e-9;

  TrianglesProblem(GrayImage target, std::size_t triangles = 50)
      : target_(std::move(target)), triangles_(triangles) {
    if (target_.width != target_.height || target_.width == 0) {
      throw Error("triangles: target image must be square and non-empty");
    }
    if (triangles_ == 0) throw Error("triangles: need at least one triangle");
  }

  std::string_view name() const override { return "triangles"; }
  std::size_t dimension() const override { return kGenesPerTriangle * triangles_; }
  const GrayImage& target() const { return target_; }

  std::vector<double> render(std::span<const double> x) const {
    check_dimension(x);
    return rasterize_triangles(x, target_.width);
  }

  double squared_distance(std::span<const double> x) const {
    const auto canvas = render(x);
    double total = 0.0;
    for (std::size_t i = 0; i < canvas.size(); ++i) {
      const double d = canvas[i] - static_cast<double>(target_.pixels[i]);
      total += d * d;
    }
    return total;
  }

  double true_score(std::span<const double> x) const override {
    return 1.0 / (kEpsilon + squared_distance(x));
  }

 private:
  GrayImage target_;
  std::size_t triangles_;
};

}  // namespace deepopt

#endif  // DEEPOPT_PROBLEMS_TRIANGLES_HPP
