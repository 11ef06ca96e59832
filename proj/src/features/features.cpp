#include "stereoscan/features/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace stereoscan::features {

namespace {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr int kCircleU[16] = {0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3, -3, -3, -2, -1};
constexpr int kCircleV[16] = {-3, -3, -2, -1, 0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3};
constexpr int kMinArc = 9;

// Largest margin over contiguous arcs of length >= kMinArc where diff >=
// threshold throughout; 0 when no arc qualifies. diff holds (pixel - center)
// for the bright test and (center - pixel) for the dark test.
int arc_score(const int diff[16], int threshold) {
  int best = 0;
  for (int start = 0; start < 16; ++start) {
    int run_min = diff[start];
    if (run_min < threshold) continue;
    for (int len = 1; len < 16; ++len) {
      const int d = diff[(start + len) % 16];
      if (d < threshold) break;
      run_min = std::min(run_min, d);
      if (len + 1 >= kMinArc) best = std::max(best, run_min);
    }
  }
  return best;
}

int corner_score(const GrayImage& img, int u, int v, int threshold) {
  const int c = img.at(u, v);
  int bright[16];
  int dark[16];
  for (int i = 0; i < 16; ++i) {
    const int p = img.at(u + kCircleU[i], v + kCircleV[i]);
    bright[i] = p - c;
    dark[i] = c - p;
  }
  return std::max(arc_score(bright, threshold), arc_score(dark, threshold));
}

// Deterministic sampling pattern; mt19937 output is fixed by the standard,
// and the modulo-based draw avoids implementation-defined distributions.
struct SamplePattern {
  std::array<std::array<int8_t, 4>, 256> pairs;  // ax, ay, bx, by in [-13, 13]
};

const SamplePattern& pattern() {
  static const SamplePattern p = [] {
    SamplePattern out;
    std::mt19937 rng(0x51f0a3c9u);
    auto draw = [&rng]() {
      return static_cast<int8_t>(static_cast<int>(rng() % 27u) - 13);
    };
    for (auto& pair : out.pairs) {
      pair = {draw(), draw(), draw(), draw()};
    }
    return out;
  }();
  return p;
}

constexpr int kPatchBorder = 16;  // |offset| <= 13 plus 5x5 box radius

}  // namespace

int Descriptor256::hamming(const Descriptor256& other) const {
  int d = 0;
  for (int i = 0; i < 4; ++i) {
    d += std::popcount(bits[i] ^ other.bits[i]);
  }
  return d;
}

std::vector<Corner> detect_corners(const GrayImage& img, int max_count, int threshold) {
  if (threshold < 1) throw std::invalid_argument("detect_corners: threshold must be >= 1");
  std::vector<int> score(static_cast<size_t>(img.width) * img.height, 0);

#pragma omp parallel for schedule(static)
  for (int v = 3; v < img.height - 3; ++v) {
    for (int u = 3; u < img.width - 3; ++u) {
      score[static_cast<size_t>(v) * img.width + u] = corner_score(img, u, v, threshold);
    }
  }

  std::vector<Corner> corners;
  for (int v = 3; v < img.height - 3; ++v) {
    for (int u = 3; u < img.width - 3; ++u) {
      const int s = score[static_cast<size_t>(v) * img.width + u];
      if (s <= 0) continue;
      bool suppressed = false;
      for (int dv = -1; dv <= 1 && !suppressed; ++dv) {
        for (int du = -1; du <= 1; ++du) {
          if (du == 0 && dv == 0) continue;
          const int ns = score[static_cast<size_t>(v + dv) * img.width + (u + du)];
          // Ties resolved toward the raster-earlier pixel.
          if (ns > s || (ns == s && (dv < 0 || (dv == 0 && du < 0)))) {
            suppressed = true;
            break;
          }
        }
      }
      if (!suppressed) corners.push_back({u, v, s});
    }
  }

  std::sort(corners.begin(), corners.end(), [](const Corner& a, const Corner& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.v != b.v) return a.v < b.v;
    return a.u < b.u;
  });
  if (static_cast<int>(corners.size()) > max_count) corners.resize(max_count);
  return corners;
}

std::vector<Feature> describe(const GrayImage& img, const std::vector<Corner>& corners) {
  // Integral image for 5x5 box sums; comparisons stay in integers.
  const int w = img.width;
  const int h = img.height;
  std::vector<int32_t> integral(static_cast<size_t>(w + 1) * (h + 1), 0);
  for (int v = 0; v < h; ++v) {
    int32_t row = 0;
    for (int u = 0; u < w; ++u) {
      row += img.at(u, v);
      integral[static_cast<size_t>(v + 1) * (w + 1) + u + 1] =
          integral[static_cast<size_t>(v) * (w + 1) + u + 1] + row;
    }
  }
  auto box5 = [&](int u, int v) {
    const int u0 = u - 2, v0 = v - 2, u1 = u + 3, v1 = v + 3;
    return integral[static_cast<size_t>(v1) * (w + 1) + u1] -
           integral[static_cast<size_t>(v0) * (w + 1) + u1] -
           integral[static_cast<size_t>(v1) * (w + 1) + u0] +
           integral[static_cast<size_t>(v0) * (w + 1) + u0];
  };

  std::vector<Feature> feats;
  feats.reserve(corners.size());
  const SamplePattern& pat = pattern();
  for (const Corner& c : corners) {
    if (c.u < kPatchBorder || c.u >= w - kPatchBorder || c.v < kPatchBorder ||
        c.v >= h - kPatchBorder) {
      continue;
    }
    Feature f;
    f.position = Vec2(c.u, c.v);
    for (int i = 0; i < 256; ++i) {
      const auto& p = pat.pairs[i];
      const int32_t a = box5(c.u + p[0], c.v + p[1]);
      const int32_t b = box5(c.u + p[2], c.v + p[3]);
      if (a < b) f.descriptor.bits[i / 64] |= (uint64_t{1} << (i % 64));
    }
    feats.push_back(std::move(f));
  }
  return feats;
}

MatchSet match_features(const std::vector<Feature>& a, const std::vector<Feature>& b,
                        int max_hamming) {
  MatchSet out;
  if (a.empty() || b.empty()) return out;

  std::vector<int> best_b(a.size(), -1);
  std::vector<int> best_b_dist(a.size(), 257);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    for (int j = 0; j < static_cast<int>(b.size()); ++j) {
      const int d = a[i].descriptor.hamming(b[j].descriptor);
      if (d < best_b_dist[i]) {
        best_b_dist[i] = d;
        best_b[i] = j;
      }
    }
  }
  std::vector<int> best_a(b.size(), -1);
  std::vector<int> best_a_dist(b.size(), 257);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < static_cast<int>(b.size()); ++j) {
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
      const int d = b[j].descriptor.hamming(a[i].descriptor);
      if (d < best_a_dist[j]) {
        best_a_dist[j] = d;
        best_a[j] = i;
      }
    }
  }

  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    const int j = best_b[i];
    if (j < 0 || best_a[j] != i || best_b_dist[i] > max_hamming) continue;
    Match m;
    m.index_a = i;
    m.index_b = j;
    m.hamming = best_b_dist[i];
    m.weight = 1.0;
    m.displacement = b[j].position - a[i].position;
    out.push_back(m);
  }
  return out;
}

MatchSet histogram_vote(const MatchSet& matches, double bin_size) {
  if (!(bin_size > 0.0)) throw std::invalid_argument("histogram_vote: bin_size must be > 0");
  if (matches.empty()) return {};

  auto bin_of = [bin_size](double x) {
    return static_cast<int64_t>(std::floor(x / bin_size));
  };
  auto key_of = [](int64_t bu, int64_t bv) {
    return (bu << 32) ^ (bv & 0xffffffffll);
  };

  std::unordered_map<int64_t, int> histogram;
  std::vector<std::pair<int64_t, int64_t>> bins(matches.size());
  for (size_t i = 0; i < matches.size(); ++i) {
    bins[i] = {bin_of(matches[i].displacement.x()), bin_of(matches[i].displacement.y())};
    histogram[key_of(bins[i].first, bins[i].second)] += 1;
  }

  std::vector<int> priority(matches.size(), 0);
  for (size_t i = 0; i < matches.size(); ++i) {
    int votes = 0;
    for (int dv = -1; dv <= 1; ++dv) {
      for (int du = -1; du <= 1; ++du) {
        const auto it = histogram.find(key_of(bins[i].first + du, bins[i].second + dv));
        if (it != histogram.end()) votes += it->second;
      }
    }
    priority[i] = votes;
  }

  std::vector<int> order(matches.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    if (priority[lhs] != priority[rhs]) return priority[lhs] > priority[rhs];
    if (matches[lhs].hamming != matches[rhs].hamming)
      return matches[lhs].hamming < matches[rhs].hamming;
    return lhs < rhs;
  });

  MatchSet out;
  out.reserve(matches.size());
  for (size_t rank = 0; rank < order.size(); ++rank) {
    Match m = matches[order[rank]];
    m.rank = static_cast<int>(rank);
    out.push_back(m);
  }
  return out;
}

std::vector<std::pair<Vec2, Vec2>> read_match_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open match file: " + path);
  std::vector<std::pair<Vec2, Vec2>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double u1, v1, u2, v2;
    if (!(ss >> u1 >> v1 >> u2 >> v2)) {
      throw Error(path + ":" + std::to_string(line_no) + ": expected 'u1 v1 u2 v2'");
    }
    out.emplace_back(Vec2(u1, v1), Vec2(u2, v2));
  }
  return out;
}

}  // namespace stereoscan::features
