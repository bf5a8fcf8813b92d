#pragma once

// Integer-only arithmetic on y^2 = x^3 + 2x + 2 over GF(17), written
// independently of the library for use as a test oracle.

#include <optional>
#include <utility>
#include <vector>

namespace toy {

constexpr int kP = 17, kA = 2, kB = 2;

using Pt = std::optional<std::pair<int, int>>;  // nullopt = identity

inline int md(int v) { return ((v % kP) + kP) % kP; }

inline int inv(int v) {
  for (int i = 1; i < kP; ++i) {
    if (md(v * i) == 1) return i;
  }
  return 0;
}

inline Pt add(const Pt& a, const Pt& b) {
  if (!a) return b;
  if (!b) return a;
  auto [x1, y1] = *a;
  auto [x2, y2] = *b;
  int lambda;
  if (x1 == x2) {
    if (md(y1 + y2) == 0) return std::nullopt;
    lambda = md((3 * x1 * x1 + kA) * inv(2 * y1));
  } else {
    lambda = md((y2 - y1) * inv(x2 - x1));
  }
  const int x3 = md(lambda * lambda - x1 - x2);
  return std::make_pair(x3, md(lambda * (x1 - x3) - y1));
}

inline Pt times(int k, const Pt& p) {
  Pt acc;
  for (int i = 0; i < k; ++i) acc = add(acc, p);
  return acc;
}

inline std::vector<Pt> all_points() {
  std::vector<Pt> out{std::nullopt};
  for (int x = 0; x < kP; ++x) {
    for (int y = 0; y < kP; ++y) {
      if (md(y * y) == md(x * x * x + kA * x + kB)) out.push_back(std::make_pair(x, y));
    }
  }
  return out;
}

inline const Pt kBase = std::make_pair(5, 1);

}  // namespace toy
