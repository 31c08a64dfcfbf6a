// Seeded synthetic stand-in corpora, written in the exact on-disk formats
// the loaders consume. Used by the demo tools and the test suites when the
// real datasets are not on disk: a 10-class 28x28 stroke-glyph corpus in
// IDX format and a 5-class beat-morphology corpus as a 188-column CSV.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "heunflow/errors.hpp"
#include "heunflow/rng.hpp"

namespace heunflow::synth {

namespace detail {

struct Pt {
  double x, y;
};
using Stroke = std::vector<Pt>;

inline Stroke ellipse(double cx, double cy, double rx, double ry, int n = 14) {
  Stroke s;
  for (int i = 0; i <= n; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * i / n;
    s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return s;
}

// Glyph skeletons on the unit square, y growing downward.
inline const std::vector<std::vector<Stroke>>& glyphs() {
  static const std::vector<std::vector<Stroke>> g = [] {
    std::vector<std::vector<Stroke>> v(10);
    v[0] = {ellipse(0.5, 0.5, 0.27, 0.38)};
    v[1] = {{{0.35, 0.28}, {0.55, 0.10}, {0.55, 0.90}}, {{0.38, 0.90}, {0.72, 0.90}}};
    v[2] = {{{0.26, 0.30}, {0.32, 0.14}, {0.52, 0.08}, {0.70, 0.16}, {0.74, 0.32},
             {0.55, 0.55}, {0.26, 0.88}},
            {{0.26, 0.88}, {0.76, 0.88}}};
    v[3] = {{{0.28, 0.16}, {0.52, 0.09}, {0.70, 0.20}, {0.66, 0.40}, {0.48, 0.48}},
            {{0.48, 0.48}, {0.70, 0.58}, {0.74, 0.76}, {0.55, 0.90}, {0.28, 0.82}}};
    v[4] = {{{0.62, 0.10}, {0.62, 0.90}}, {{0.62, 0.10}, {0.24, 0.62}}, {{0.24, 0.62}, {0.80, 0.62}}};
    v[5] = {{{0.70, 0.10}, {0.30, 0.10}, {0.30, 0.46}},
            {{0.30, 0.46}, {0.60, 0.44}, {0.72, 0.60}, {0.64, 0.82}, {0.40, 0.90}, {0.26, 0.80}}};
    v[6] = {{{0.66, 0.08}, {0.44, 0.22}, {0.32, 0.48}, {0.31, 0.72}, {0.44, 0.90},
             {0.64, 0.84}, {0.68, 0.64}, {0.52, 0.52}, {0.34, 0.60}}};
    v[7] = {{{0.24, 0.12}, {0.76, 0.12}, {0.42, 0.90}}};
    v[8] = {ellipse(0.5, 0.30, 0.20, 0.20), ellipse(0.5, 0.68, 0.24, 0.22)};
    v[9] = {ellipse(0.44, 0.30, 0.20, 0.21), {{0.64, 0.32}, {0.63, 0.66}, {0.50, 0.90}}};
    return v;
  }();
  return g;
}

inline double seg_dist(double px, double py, Pt a, Pt b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = px - a.x, wy = py - a.y;
  const double vv = vx * vx + vy * vy;
  double t = vv > 0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::max(0.0, std::min(1.0, t));
  const double dx = px - (a.x + t * vx), dy = py - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

inline void write_be32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::array<unsigned char, 784> render_glyph(int digit, Rng& rng) {
  // Random affine placement of the skeleton inside the 28x28 raster.
  const double theta = rng.uniform(-0.26, 0.26);
  const double sx = rng.uniform(0.68, 1.06), sy = rng.uniform(0.68, 1.06);
  const double shear = rng.uniform(-0.20, 0.20);
  const double tx = 14.0 + rng.uniform(-2.2, 2.2), ty = 14.0 + rng.uniform(-2.2, 2.2);
  const double size = 22.0;
  const double ct = std::cos(theta), st = std::sin(theta);

  std::vector<std::pair<Pt, Pt>> segs;
  for (const Stroke& s : glyphs()[digit]) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      auto map = [&](Pt p) {
        const double ux = (p.x - 0.5) * sx + shear * (p.y - 0.5);
        const double uy = (p.y - 0.5) * sy;
        return Pt{tx + size * (ct * ux - st * uy), ty + size * (st * ux + ct * uy)};
      };
      segs.emplace_back(map(s[i]), map(s[i + 1]));
    }
  }

  const double thick = rng.uniform(0.75, 1.55);
  const double contrast = rng.uniform(0.70, 1.0);
  std::array<unsigned char, 784> img{};
  for (int y = 0; y < 28; ++y) {
    for (int x = 0; x < 28; ++x) {
      double d = 1e9;
      for (const auto& [a, b] : segs) d = std::min(d, seg_dist(x, y, a, b));
      double v = std::max(0.0, std::min(1.0, (thick - d) / 0.9 + 0.5));
      v = v * contrast * 255.0 + rng.normal() * 13.0;
      img[y * 28 + x] = static_cast<unsigned char>(std::max(0.0, std::min(255.0, v)));
    }
  }
  return img;
}

}  // namespace detail

// IDX image/label pair of n stroke glyphs, labels drawn round-robin so the
// classes are balanced.
inline void write_digits_idx(const std::string& images_path, const std::string& labels_path,
                             std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw IoError("cannot write digit corpus files");
  detail::write_be32(img, 0x00000803u);
  detail::write_be32(img, static_cast<std::uint32_t>(n));
  detail::write_be32(img, 28);
  detail::write_be32(img, 28);
  detail::write_be32(lab, 0x00000801u);
  detail::write_be32(lab, static_cast<std::uint32_t>(n));

  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i % 10);
  rng.shuffle(order);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pix = detail::render_glyph(order[i], rng);
    img.write(reinterpret_cast<const char*>(pix.data()), 784);
    const unsigned char l = static_cast<unsigned char>(order[i]);
    lab.write(reinterpret_cast<const char*>(&l), 1);
  }
}

namespace detail {

inline double bump(double i, double pos, double width, double amp) {
  const double d = (i - pos) / width;
  return amp * std::exp(-0.5 * d * d);
}

inline std::vector<double> render_beat(int cls, Rng& rng) {
  std::vector<double> beat(187, 0.0);
  const double amp = rng.uniform(0.70, 1.30);
  const double w = rng.uniform(0.70, 1.40);
  const double shift = rng.uniform(-9.0, 9.0);
  const double base = 0.10 + rng.uniform(-0.04, 0.04);
  const double wander_f = rng.uniform(0.5, 1.5), wander_p = rng.uniform(0.0, 6.28);
  const std::size_t cut = 115 + rng.index(70);  // zero padding tail, as published

  for (std::size_t i = 0; i < std::min<std::size_t>(cut, 187); ++i) {
    const double t = static_cast<double>(i);
    double v = base + 0.06 * std::sin(6.28318 * wander_f * t / 187.0 + wander_p);
    switch (cls) {
      case 0:  // dominant narrow complex with P and T companions
        v += bump(t, 12 + shift, 5 * w, 0.16 * amp);
        v += bump(t, 30 + shift, 2.6 * w, 0.85 * amp);
        v += bump(t, 72 + shift, 9 * w, 0.28 * amp);
        break;
      case 1:  // premature narrow complex, close to the dominant class
        v += bump(t, 27 + shift, 2.5 * w, 0.78 * amp);
        v += bump(t, 68 + shift, 8.5 * w, 0.23 * amp);
        break;
      case 2:  // wide complex with a late negative deflection
        v = 0.18 + (v - base);
        v += bump(t, 33 + shift, 8.5 * w, 0.80 * amp);
        v -= bump(t, 80 + shift, 10 * w, 0.12 * amp);
        break;
      case 3:  // fused double hump
        v += bump(t, 28 + shift, 4 * w, 0.60 * amp);
        v += bump(t, 37 + shift, 6 * w, 0.62 * amp);
        v += bump(t, 78 + shift, 9 * w, 0.20 * amp);
        break;
      default:  // paced/unknown: twin spikes, no repolarization wave
        v += bump(t, 28 + shift, 2.0 * w, 0.75 * amp);
        v += bump(t, 55 + shift, 2.0 * w, 0.45 * amp);
        break;
    }
    v += rng.normal() * 0.040;
    beat[i] = std::max(0.0, std::min(1.0, v));
  }
  return beat;
}

}  // namespace detail

// 188-column beat CSV with an imbalanced class mix resembling the published
// distribution.
inline void write_beats_csv(const std::string& path, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  const double mix[5] = {0.70, 0.08, 0.10, 0.05, 0.07};
  char buf[32];
  for (std::size_t r = 0; r < n; ++r) {
    double u = rng.uniform();
    int cls = 4;
    double acc = 0.0;
    for (int c = 0; c < 5; ++c) {
      acc += mix[c];
      if (u < acc) {
        cls = c;
        break;
      }
    }
    // A small fraction of mislabeled beats keeps the attainable accuracy
    // below saturation, as in the published annotations.
    const std::vector<double> beat = detail::render_beat(cls, rng);
    if (rng.uniform() < 0.02) cls = static_cast<int>(rng.index(5));
    for (double v : beat) {
      std::snprintf(buf, sizeof buf, "%.6g", v);
      os << buf << ',';
    }
    os << cls << '\n';
  }
}

}  // namespace heunflow::synth
