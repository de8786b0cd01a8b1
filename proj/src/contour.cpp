#include "rhp/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rhp {

ContourPiece ContourPiece::segment(cplx a, cplx b) {
  if (a == b) throw DomainError("segment endpoints coincide");
  return {PieceKind::segment, a, b, 1};
}

ContourPiece ContourPiece::ray(cplx vertex, cplx direction, int orientation) {
  if (std::abs(direction) == 0.0) throw DomainError("ray direction is zero");
  if (orientation != 1 && orientation != -1) throw DomainError("orientation must be +1 or -1");
  return {PieceKind::ray, vertex, direction / std::abs(direction), orientation};
}

cplx ContourPiece::axis() const {
  if (kind == PieceKind::ray) return end_or_dir;
  cplx d = end_or_dir - start;
  return d / std::abs(d);
}

double ContourPiece::length() const {
  if (kind == PieceKind::ray) return std::numeric_limits<double>::infinity();
  return std::abs(end_or_dir - start);
}

cplx ContourPiece::nearest(cplx z) const {
  double s = std::real((z - start) * std::conj(axis()));
  s = std::clamp(s, 0.0, length());
  return at(s);
}

cplx ContourPiece::midpoint() const {
  if (kind == PieceKind::ray) return start + end_or_dir;
  return 0.5 * (start + end_or_dir);
}

std::string to_string(ContourTag tag) {
  switch (tag) {
    case ContourTag::real_line: return "real_line";
    case ContourTag::cross: return "cross";
    case ContourTag::augmented_cross: return "augmented_cross";
    case ContourTag::extended: return "extended";
    case ContourTag::custom: return "custom";
  }
  return "custom";
}

double Contour::distance(cplx z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : pieces) d = std::min(d, p.distance(z));
  return d;
}

std::size_t Contour::nearest_piece(cplx z) const {
  // Prefer a piece whose nearest point is interior; ties at shared vertices
  // are otherwise resolved arbitrarily and the side test becomes meaningless.
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  bool best_interior = false;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& p = pieces[k];
    double s = std::real((z - p.start) * std::conj(p.axis()));
    bool interior = s > 0.0 && s < p.length();
    double d = p.distance(z);
    bool better = d < best_d - 1e-14 || (std::abs(d - best_d) <= 1e-14 && interior && !best_interior);
    if (better) {
      best = k;
      best_d = d;
      best_interior = interior;
    }
  }
  return best;
}

int Contour::side(cplx z) const {
  const auto& p = pieces.at(nearest_piece(z));
  double cross = std::imag(std::conj(p.tangent()) * (z - p.nearest(z)));
  return cross > 0.0 ? 1 : -1;
}

std::string Contour::face_name(cplx z) const {
  if (!sectors.empty()) {
    double a = std::arg(z);
    for (const auto& s : sectors)
      if (a > s.arg_lo && a < s.arg_hi) return s.name;
  }
  return side(z) > 0 ? "Omega+" : "Omega-";
}

namespace {

double orient(cplx a, cplx b, cplx c) { return std::imag(std::conj(b - a) * (c - a)); }

bool segments_meet(cplx p, cplx q, cplx a, cplx b) {
  double d1 = orient(a, b, p), d2 = orient(a, b, q);
  double d3 = orient(p, q, a), d4 = orient(p, q, b);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

bool Contour::crosses(cplx p, cplx q) const {
  double reach = std::max(std::abs(p), std::abs(q)) + 1.0;
  for (const auto& piece : pieces) {
    cplx a = piece.start;
    cplx b = piece.kind == PieceKind::ray ? piece.start + piece.end_or_dir * (reach + std::abs(a))
                                          : piece.end_or_dir;
    if (segments_meet(p, q, a, b)) return true;
    if (piece.distance(p) < 1e-12 || piece.distance(q) < 1e-12) return true;
  }
  return false;
}

bool Contour::is_complete() const {
  if (pieces.empty()) return false;
  // Lattice over a box that covers every vertex. Neighbouring lattice points
  // that are not separated by the contour must carry the same label.
  double box = 2.0;
  for (const auto& p : pieces) {
    box = std::max(box, 2.0 * std::abs(p.start) + 1.0);
    if (p.kind == PieceKind::segment) box = std::max(box, 2.0 * std::abs(p.end_or_dir) + 1.0);
  }
  const int m = 97;  // odd and coprime to typical symmetric layouts
  const double h = 2.0 * box / m;
  const double shift = 0.37 * h;
  auto pt = [&](int i, int j) { return cplx(-box + i * h + shift, -box + j * h + 0.61 * shift); };
  std::vector<int> lab((m + 1) * (m + 1));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) lab[i * (m + 1) + j] = side(pt(i, j));
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      cplx z = pt(i, j);
      if (i < m && lab[i * (m + 1) + j] != lab[(i + 1) * (m + 1) + j] && !crosses(z, pt(i + 1, j)))
        return false;
      if (j < m && lab[i * (m + 1) + j] != lab[i * (m + 1) + j + 1] && !crosses(z, pt(i, j + 1)))
        return false;
    }
  }
  return true;
}

Contour ExtendedContour::united() const {
  Contour u;
  u.pieces = gamma.pieces;
  u.pieces.insert(u.pieces.end(), gamma_prime.pieces.begin(), gamma_prime.pieces.end());
  u.tag = ContourTag::extended;
  u.param = separation;
  return u;
}

double ExtendedContour::sampled_separation(int samples_per_piece) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : gamma_prime.pieces) {
    double len = p.kind == PieceKind::ray ? 10.0 + std::abs(p.start) : p.length();
    for (int k = 0; k <= samples_per_piece; ++k) {
      cplx z = p.at(len * k / samples_per_piece);
      best = std::min(best, gamma.distance(z));
    }
  }
  return best;
}

Contour build_real_line() {
  Contour c;
  c.pieces = {ContourPiece::ray(0.0, -1.0, -1), ContourPiece::ray(0.0, 1.0, 1)};
  c.tag = ContourTag::real_line;
  c.sectors = {{"upper", 0.0, kPi}, {"lower", -kPi, 0.0}};
  return c;
}

Contour build_cross() {
  // Real rays run outward, imaginary rays run inward: each quadrant boundary
  // is then traversed from the imaginary axis through 0 onto the real axis.
  Contour c;
  c.pieces = {ContourPiece::ray(0.0, 1.0, 1), ContourPiece::ray(0.0, kI, -1),
              ContourPiece::ray(0.0, -1.0, 1), ContourPiece::ray(0.0, -kI, -1)};
  c.tag = ContourTag::cross;
  c.sectors = {{"Omega1", 0.0, kPi / 2},
               {"Omega2", kPi / 2, kPi},
               {"Omega3", -kPi, -kPi / 2},
               {"Omega4", -kPi / 2, 0.0}};
  return c;
}

Contour build_augmented_cross(double beta) {
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("beta must lie in (0, 1/2)");
  const double a = beta * kPi;
  Contour c;
  // Orientations make the contour complete: the thin sectors above the real
  // axis are plus faces, the sector containing i is a minus face.
  c.pieces = {ContourPiece::ray(0.0, -1.0, -1),
              ContourPiece::ray(0.0, 1.0, 1),
              ContourPiece::ray(0.0, std::polar(1.0, a), -1),
              ContourPiece::ray(0.0, std::polar(1.0, kPi - a), 1),
              ContourPiece::ray(0.0, std::polar(1.0, -kPi + a), 1),
              ContourPiece::ray(0.0, std::polar(1.0, -a), -1)};
  c.tag = ContourTag::augmented_cross;
  c.param = beta;
  c.sectors = {{"Omega+", 0.0, a},         {"Omega0", a, kPi - a},    {"Omega+", kPi - a, kPi},
               {"Omega-", -kPi, -kPi + a}, {"Omega0", -kPi + a, -a}, {"Omega-", -a, 0.0}};
  return c;
}

namespace {

// Orient a new piece of the offset contour so that its left side is a plus
// face of the union. Points within the band of width s around gamma keep the
// label they had for gamma; points beyond the offset flip it.
ContourPiece orient_offset(const Contour& gamma, ContourPiece p, double s) {
  cplx q = p.midpoint();
  cplx left = q + 1e-3 * s * kI * p.tangent();
  int label = gamma.side(left);
  if (gamma.distance(left) > s) label = -label;
  if (label < 0) p.orientation = -p.orientation;
  return p;
}

}  // namespace

ExtendedContour extend(const Contour& gamma, double separation) {
  if (!(separation > 0.0 && separation <= 1.0)) throw DomainError("separation must lie in (0, 1]");
  const double s = separation;
  ExtendedContour e;
  e.gamma = gamma;
  e.separation = s;
  e.gamma_prime.tag = ContourTag::custom;
  std::vector<ContourPiece> raw;
  if (gamma.tag == ContourTag::real_line) {
    for (double y : {s, -s}) {
      raw.push_back(ContourPiece::ray(cplx(0, y), 1.0));
      raw.push_back(ContourPiece::ray(cplx(0, y), -1.0));
    }
  } else if (gamma.tag == ContourTag::cross) {
    for (double sx : {1.0, -1.0}) {
      for (double sy : {1.0, -1.0}) {
        cplx corner(sx * s, sy * s);
        raw.push_back(ContourPiece::ray(corner, sx));
        raw.push_back(ContourPiece::ray(corner, cplx(0, sy)));
      }
    }
  } else {
    throw DomainError("extend supports only real_line and cross contours");
  }
  for (auto& p : raw) e.gamma_prime.pieces.push_back(orient_offset(gamma, p, s));
  return e;
}

Contour reverse_subset(const Contour& gamma, const std::vector<std::size_t>& idx) {
  Contour c = gamma;
  for (auto k : idx) c.pieces.at(k).orientation = -c.pieces.at(k).orientation;
  return c;
}

nlohmann::json to_json(const Contour& c) {
  nlohmann::json j;
  j["tag"] = to_string(c.tag);
  j["param"] = c.param;
  j["pieces"] = nlohmann::json::array();
  for (const auto& p : c.pieces) {
    j["pieces"].push_back({{"kind", p.kind == PieceKind::ray ? "ray" : "segment"},
                           {"start", {p.start.real(), p.start.imag()}},
                           {"dir_or_end", {p.end_or_dir.real(), p.end_or_dir.imag()}},
                           {"orientation", p.orientation}});
  }
  return j;
}

}  // namespace rhp
