#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rhp/types.hpp"

namespace rhp {

enum class PieceKind { segment, ray };

/// A straight oriented piece. Geometry is fixed by (start, end_or_dir); the
/// orientation flag says whether traversal runs away from `start` (+1) or
/// toward it (-1). Rays always hang off their finite vertex `start`.
struct ContourPiece {
  PieceKind kind = PieceKind::segment;
  cplx start;
  cplx end_or_dir;
  int orientation = 1;

  static ContourPiece segment(cplx a, cplx b);
  static ContourPiece ray(cplx vertex, cplx direction, int orientation = 1);

  /// Unit vector along the geometric direction (start toward end / infinity).
  cplx axis() const;
  /// Unit tangent in the direction of traversal.
  cplx tangent() const { return axis() * double(orientation); }
  double length() const;
  /// Point at geometric arclength s from `start`.
  cplx at(double s) const { return start + axis() * s; }
  cplx nearest(cplx z) const;
  double distance(cplx z) const { return std::abs(z - nearest(z)); }
  /// Interior reference point (midpoint of a segment, unit distance out on a ray).
  cplx midpoint() const;
  bool operator==(const ContourPiece&) const = default;
};

enum class ContourTag { real_line, cross, augmented_cross, extended, custom };

std::string to_string(ContourTag tag);

/// Open angular sector (arg_lo, arg_hi) about the origin carrying a face name.
struct Sector {
  std::string name;
  double arg_lo;
  double arg_hi;
};

class Contour {
 public:
  std::vector<ContourPiece> pieces;
  ContourTag tag = ContourTag::custom;
  double param = 0.0;
  /// Named faces; only populated for contours that are star-shaped about 0.
  std::vector<Sector> sectors;

  std::size_t size() const { return pieces.size(); }
  double distance(cplx z) const;
  /// Index of the piece realizing the distance to z.
  std::size_t nearest_piece(cplx z) const;
  /// +1 if z lies to the left of its nearest piece (the plus side), -1 otherwise.
  int side(cplx z) const;
  /// Face name of z: sector name when sectors are declared, else "Omega+"/"Omega-".
  std::string face_name(cplx z) const;
  /// Sampled check that the plus/minus labelling is consistent across faces.
  bool is_complete() const;
  /// True if the closed segment [p, q] meets the contour.
  bool crosses(cplx p, cplx q) const;
};

struct ExtendedContour {
  Contour gamma;
  Contour gamma_prime;
  double separation = 0.0;
  Contour united() const;
  /// Minimum distance between sample points of gamma_prime and gamma.
  double sampled_separation(int samples_per_piece = 400) const;
};

Contour build_real_line();
Contour build_cross();
Contour build_augmented_cross(double beta);
ExtendedContour extend(const Contour& gamma, double separation);
Contour reverse_subset(const Contour& gamma, const std::vector<std::size_t>& pieces);

nlohmann::json to_json(const Contour& c);

}  // namespace rhp
