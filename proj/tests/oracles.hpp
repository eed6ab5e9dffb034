// Independent reference implementations used by the unit and acceptance tests.
// Written against the definitions, not the library code: long double
// arithmetic, plain nested loops, no shared helpers with src/.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "geodiff/featurefield/extractor.hpp"
#include "geodiff/featurefield/latent_field.hpp"

namespace oracle {

using geodiff::ff::ConvLayer;
using geodiff::ff::LatentField;

struct Grid {
  int h = 0, w = 0, c = 0;
  std::vector<long double> v;
  Grid() = default;
  Grid(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(static_cast<std::size_t>(h_) * w_ * c_, 0.0L) {}
  long double& at(int y, int x, int k) { return v[(static_cast<std::size_t>(y) * w + x) * c + k]; }
  long double at(int y, int x, int k) const { return v[(static_cast<std::size_t>(y) * w + x) * c + k]; }
};

inline Grid from_field(const LatentField& f) {
  Grid g(f.height(), f.width(), f.channels());
  for (int y = 0; y < g.h; ++y)
    for (int x = 0; x < g.w; ++x)
      for (int k = 0; k < g.c; ++k) g.at(y, x, k) = f.at(y, x, k);
  return g;
}

inline LatentField random_field(int h, int w, int c, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  LatentField f(h, w, c);
  for (double& v : f.values()) v = n(rng);
  return f;
}

// Zero-padded "same" correlation; box layers average over size^2 (padding counts as zero).
inline Grid conv(const Grid& in, const ConvLayer& layer) {
  const int k = layer.size, half = k / 2;
  const bool box = layer.kind == ConvLayer::Kind::box;
  const int cout = box ? in.c : layer.out_channels;
  Grid out(in.h, in.w, cout);
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x)
      for (int o = 0; o < cout; ++o) {
        long double acc = 0.0L;
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const int sy = y + ky - half, sx = x + kx - half;
            if (sy < 0 || sy >= in.h || sx < 0 || sx >= in.w) continue;
            if (box) {
              acc += in.at(sy, sx, o) / static_cast<long double>(k * k);
            } else {
              for (int i = 0; i < in.c; ++i) {
                const long double wgt = layer.weights[((static_cast<std::size_t>(o) * layer.in_channels + i) * k + ky) * k + kx];
                acc += wgt * in.at(sy, sx, i);
              }
            }
          }
        out.at(y, x, o) = acc;
      }
  return out;
}

inline Grid features(const Grid& z, const std::vector<ConvLayer>& layers) {
  Grid f = z;
  for (const auto& l : layers) f = conv(f, l);
  return f;
}

// Bilinear interpolation from the textbook formula: weights (1-a)(1-b), a(1-b),
// (1-a)b, ab over the cell corners; corners beyond the last row/column carry
// zero weight when the position sits exactly on that edge.
inline long double bilinear(const Grid& g, long double x, long double y, int k) {
  const long double fx = std::floor(x), fy = std::floor(y);
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const long double a = x - fx, b = y - fy;
  long double acc = 0.0L;
  const int xs[2] = {x0, x0 + 1}, ys[2] = {y0, y0 + 1};
  const long double wx[2] = {1.0L - a, a}, wy[2] = {1.0L - b, b};
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      const long double wgt = wx[i] * wy[j];
      if (wgt == 0.0L) continue;
      acc += wgt * g.at(ys[j], xs[i], k);
    }
  return acc;
}

struct Handle {
  long double px, py;  // current position
  long double ox, oy;  // original position p0
  long double gx, gy;  // target
  bool fixated = false;
};

// Motion-supervision loss with the identity denoiser:
//   sum_{i not fixated} sum_{patch offsets} |F(z)(p_i + beta d_i + o) - F(z0)(p0_i + o)|_1
//   + lambda * sum_cells (1 - M) |z - z0_prev|_1
// f0 = features(z0, layers), precomputed by the caller.
inline long double motion_loss_f0(const Grid& z, const Grid& f0, const Grid& z0_prev,
                                  const std::vector<Handle>& handles, const std::vector<ConvLayer>& layers, int r1,
                                  long double beta, long double lambda, const std::vector<std::uint8_t>& editable) {
  const Grid fz = features(z, layers);
  long double loss = 0.0L;
  for (const auto& hd : handles) {
    if (hd.fixated) continue;
    const long double dx = hd.gx - hd.px, dy = hd.gy - hd.py;
    const long double e = std::sqrt(dx * dx + dy * dy);
    const long double sx = e > 0 ? hd.px + beta * dx / e : hd.px;
    const long double sy = e > 0 ? hd.py + beta * dy / e : hd.py;
    for (int oy = -r1; oy <= r1; ++oy)
      for (int ox = -r1; ox <= r1; ++ox)
        for (int k = 0; k < fz.c; ++k)
          loss += std::fabs(bilinear(fz, sx + ox, sy + oy, k) - bilinear(f0, hd.ox + ox, hd.oy + oy, k));
  }
  for (int y = 0; y < z.h; ++y)
    for (int x = 0; x < z.w; ++x) {
      if (editable[static_cast<std::size_t>(y) * z.w + x]) continue;
      for (int k = 0; k < z.c; ++k) loss += lambda * std::fabs(z.at(y, x, k) - z0_prev.at(y, x, k));
    }
  return loss;
}

inline long double motion_loss(const Grid& z, const Grid& z0, const Grid& z0_prev, const std::vector<Handle>& handles,
                               const std::vector<ConvLayer>& layers, int r1, long double beta, long double lambda,
                               const std::vector<std::uint8_t>& editable) {
  return motion_loss_f0(z, features(z0, layers), z0_prev, handles, layers, r1, beta, lambda, editable);
}

// Camera oracle: homogeneous 4x4 chain  K4 * P * R4 * T(-C)  with the camera
// basis written in closed form from the spherical angles:
//   right = (-sin phi, cos phi, 0), up = (-sin th cos phi, -sin th sin phi, cos th),
//   forward = -(cos th cos phi, cos th sin phi, sin th); image y runs along -up.
struct Mat4 {
  long double m[4][4] = {};
};

inline Mat4 mul(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r.m[i][j] += a.m[i][k] * b.m[k][j];
  return r;
}

inline Mat4 camera_chain(long double r, long double theta_deg, long double phi_deg, long double f, long double cx,
                         long double cy) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double th = theta_deg * pi / 180.0L, ph = phi_deg * pi / 180.0L;
  const long double C[3] = {r * std::cos(th) * std::cos(ph), r * std::cos(th) * std::sin(ph), r * std::sin(th)};
  const long double right[3] = {-std::sin(ph), std::cos(ph), 0.0L};
  const long double up[3] = {-std::sin(th) * std::cos(ph), -std::sin(th) * std::sin(ph), std::cos(th)};
  const long double fwd[3] = {-std::cos(th) * std::cos(ph), -std::cos(th) * std::sin(ph), -std::sin(th)};
  Mat4 t;
  for (int i = 0; i < 4; ++i) t.m[i][i] = 1.0L;
  for (int i = 0; i < 3; ++i) t.m[i][3] = -C[i];
  Mat4 rot;
  for (int j = 0; j < 3; ++j) {
    rot.m[0][j] = right[j];
    rot.m[1][j] = -up[j];
    rot.m[2][j] = fwd[j];
  }
  rot.m[3][3] = 1.0L;
  Mat4 persp;  // (x, y, z, 1) -> (x, y, z, z)
  persp.m[0][0] = persp.m[1][1] = persp.m[2][2] = 1.0L;
  persp.m[3][2] = 1.0L;
  Mat4 k;  // row 0: f x + cx z, row 1: f y + cy z, row 3 keeps z for the divide
  k.m[0][0] = f;
  k.m[0][2] = cx;
  k.m[1][1] = f;
  k.m[1][2] = cy;
  k.m[2][2] = 1.0L;
  k.m[3][3] = 1.0L;
  return mul(k, mul(persp, mul(rot, t)));
}

inline std::array<long double, 2> project(const Mat4& chain, long double x, long double y, long double z) {
  long double h[4] = {};
  const long double p[4] = {x, y, z, 1.0L};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h[i] += chain.m[i][j] * p[j];
  return {h[0] / h[3], h[1] / h[3]};
}

}  // namespace oracle
