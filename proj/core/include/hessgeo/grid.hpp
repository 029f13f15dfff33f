#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgeo/field.hpp"
#include "hessgeo/sym_matrix.hpp"

namespace hessgeo {

enum class DomainKind { kBall, kCube, kStadium };

/// Bounded domain given by a level function (negative inside, zero on the
/// boundary, roughly the signed distance).
///   ball:    |x| < radius
///   cube:    max |x_i| < radius
///   stadium: distance to the segment [-half_length, half_length] x {0} < radius (n = 2)
struct Domain {
  DomainKind kind = DomainKind::kBall;
  int n = 2;
  double radius = 1.0;
  double half_length = 1.0;

  double level(const Eigen::VectorXd& x) const;
  /// Nearest boundary point.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  /// Half-widths of the bounding box.
  Eigen::VectorXd extent() const;
  void validate() const;
};

std::string to_string(DomainKind kind);
DomainKind parse_domain_kind(const std::string& s);

enum class NodeKind : std::uint8_t { kOutside, kDirichlet, kInterior, kRing };

/// How inside nodes with an outside stencil neighbour get their equation.
enum class BoundaryTreatment { kInterpolate, kProjection };

/// Equation of a ring node: linear interpolation along the stencil direction
/// with the nearest boundary crossing. With an available partner Q = P - o h:
///   u_P = (phi(B) + t u_Q) / (1 + t);
/// otherwise between the two crossings B+ and B-:
///   u_P = (t- phi(B+) + t+ phi(B-)) / (t+ + t-).
/// `projection` is the nearest boundary point, used by the first-order rule.
struct RingRule {
  int node = -1;
  int partner = -1;
  double t_plus = 1.0;
  double t_minus = 1.0;
  Eigen::VectorXd b_plus;
  Eigen::VectorXd b_minus;
  Eigen::VectorXd projection;
};

/// Uniform grid of spacing h with origin at -K h per axis, so the origin and
/// every multiple of h are nodes. Stencil: axis neighbours plus the
/// +-e_k +- e_l diagonals (9 points in 2-D, 19 in 3-D).
class DiscreteDomain {
 public:
  DiscreteDomain(Domain domain, double h);

  const Domain& domain() const { return domain_; }
  double h() const { return h_; }
  int n() const { return domain_.n; }
  std::size_t size() const { return kinds_.size(); }
  const std::vector<int>& dims() const { return dims_; }

  Eigen::VectorXd coords(int node) const;
  NodeKind kind(int node) const { return kinds_[node]; }
  /// Neighbour at integer offset, -1 when off the grid.
  int neighbor(int node, const std::vector<int>& offset) const;
  int node_at(const std::vector<int>& multi) const;

  const std::vector<std::vector<int>>& stencil() const { return stencil_; }
  const std::vector<int>& interior() const { return interior_; }
  const std::vector<int>& ring() const { return ring_; }
  const std::vector<int>& dirichlet() const { return dirichlet_; }
  /// Interior followed by ring nodes; the unknowns of the discrete problems.
  const std::vector<int>& active() const { return active_; }
  /// Position of a node among the unknowns, -1 if not active.
  int unknown(int node) const { return unknown_[node]; }
  const std::vector<RingRule>& ring_rules() const { return rules_; }
  /// Interior nodes whose whole stencil is interior.
  bool deep_interior(int node) const;

  /// Central-difference Hessian at an interior node (exact on quadratics).
  SymMatrix hessian(const Eigen::VectorXd& u, int node) const;
  /// Central-difference gradient at an interior node.
  Eigen::VectorXd gradient(const Eigen::VectorXd& u, int node) const;

  /// Multilinear interpolation over the enclosing cell, renormalized over
  /// corners that carry a value (non-outside nodes).
  double interpolate(const Eigen::VectorXd& u, const Eigen::VectorXd& x) const;

  /// Field values at every non-outside node (0 outside).
  Eigen::VectorXd sample(const ScalarField& f) const;

 private:
  double crossing(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;
  void build_rules();

  Domain domain_;
  double h_;
  std::vector<int> dims_;
  std::vector<int> strides_;
  Eigen::VectorXd origin_;
  std::vector<NodeKind> kinds_;
  std::vector<std::vector<int>> stencil_;
  std::vector<int> interior_, ring_, dirichlet_, active_, unknown_;
  std::vector<RingRule> rules_;
};

}  // namespace hessgeo
