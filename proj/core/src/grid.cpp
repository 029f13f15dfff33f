#include "hessgeo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hessgeo/errors.hpp"

namespace hessgeo {

namespace {

double boundary_tol(const Domain& d) { return 1e-12 * std::max(1.0, d.radius); }

}  // namespace

double Domain::level(const Eigen::VectorXd& x) const {
  switch (kind) {
    case DomainKind::kBall:
      return x.norm() - radius;
    case DomainKind::kCube:
      return x.cwiseAbs().maxCoeff() - radius;
    case DomainKind::kStadium: {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      c(0) = std::clamp(x(0), -half_length, half_length);
      return (x - c).norm() - radius;
    }
  }
  return 0.0;
}

Eigen::VectorXd Domain::project(const Eigen::VectorXd& x) const {
  switch (kind) {
    case DomainKind::kBall: {
      const double r = x.norm();
      if (r == 0.0) return radius * Eigen::VectorXd::Unit(n, 0);
      return radius * x / r;
    }
    case DomainKind::kCube: {
      Eigen::VectorXd p = x.cwiseMax(-radius).cwiseMin(radius);
      int k = 0;
      p.cwiseAbs().maxCoeff(&k);
      p(k) = p(k) < 0.0 ? -radius : radius;
      return p;
    }
    case DomainKind::kStadium: {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      c(0) = std::clamp(x(0), -half_length, half_length);
      Eigen::VectorXd d = x - c;
      const double r = d.norm();
      if (r == 0.0) d = Eigen::VectorXd::Unit(n, 1);
      else d /= r;
      return c + radius * d;
    }
  }
  return x;
}

Eigen::VectorXd Domain::extent() const {
  Eigen::VectorXd e = Eigen::VectorXd::Constant(n, radius);
  if (kind == DomainKind::kStadium) e(0) += half_length;
  return e;
}

void Domain::validate() const {
  if (n < 2 || n > 3) throw DomainError("domain dimension must be 2 or 3");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("domain radius must be positive");
  if (kind == DomainKind::kStadium) {
    if (n != 2) throw DomainError("stadium domains are two-dimensional");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
      throw DomainError("stadium half length must be positive");
  }
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::kBall: return "ball";
    case DomainKind::kCube: return "cube";
    case DomainKind::kStadium: return "stadium";
  }
  return "?";
}

DomainKind parse_domain_kind(const std::string& s) {
  if (s == "ball" || s == "disk") return DomainKind::kBall;
  if (s == "cube" || s == "square") return DomainKind::kCube;
  if (s == "stadium") return DomainKind::kStadium;
  throw ParseError("unknown domain kind '" + s + "'");
}

DiscreteDomain::DiscreteDomain(Domain domain, double h) : domain_(std::move(domain)), h_(h) {
  domain_.validate();
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid spacing must be positive");
  const int n = domain_.n;
  const Eigen::VectorXd ext = domain_.extent();
  dims_.resize(n);
  strides_.resize(n);
  origin_.resize(n);
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    const int half = static_cast<int>(std::ceil(ext(k) / h - 1e-9)) + 2;
    dims_[k] = 2 * half + 1;
    origin_(k) = -half * h;
    total *= static_cast<std::size_t>(dims_[k]);
  }
  if (total > 50'000'000) throw DomainError("grid too fine");
  int stride = 1;
  for (int k = n - 1; k >= 0; --k) {
    strides_[k] = stride;
    stride *= dims_[k];
  }

  for (int k = 0; k < n; ++k) {
    for (int s : {1, -1}) {
      std::vector<int> o(n, 0);
      o[k] = s;
      stencil_.push_back(o);
    }
  }
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          std::vector<int> o(n, 0);
          o[k] = a;
          o[l] = b;
          stencil_.push_back(o);
        }

  const double tol = boundary_tol(domain_);
  kinds_.assign(total, NodeKind::kOutside);
  std::vector<bool> inside(total, false);
  for (std::size_t i = 0; i < total; ++i) {
    const double lv = domain_.level(coords(static_cast<int>(i)));
    if (lv < -tol) inside[i] = true;
    else if (lv <= tol) kinds_[i] = NodeKind::kDirichlet;
  }
  for (std::size_t i = 0; i < total; ++i) {
    if (!inside[i]) continue;
    bool ring = false;
    for (const auto& o : stencil_) {
      const int j = neighbor(static_cast<int>(i), o);
      if (j < 0 || (!inside[j] && kinds_[j] != NodeKind::kDirichlet)) {
        ring = true;
        break;
      }
    }
    kinds_[i] = ring ? NodeKind::kRing : NodeKind::kInterior;
  }
  unknown_.assign(total, -1);
  for (std::size_t i = 0; i < total; ++i) {
    switch (kinds_[i]) {
      case NodeKind::kInterior: interior_.push_back(static_cast<int>(i)); break;
      case NodeKind::kRing: ring_.push_back(static_cast<int>(i)); break;
      case NodeKind::kDirichlet: dirichlet_.push_back(static_cast<int>(i)); break;
      case NodeKind::kOutside: break;
    }
  }
  if (interior_.empty()) throw DomainError("grid has no interior nodes; refine h");
  active_ = interior_;
  active_.insert(active_.end(), ring_.begin(), ring_.end());
  for (std::size_t a = 0; a < active_.size(); ++a) unknown_[active_[a]] = static_cast<int>(a);
  build_rules();
}

Eigen::VectorXd DiscreteDomain::coords(int node) const {
  Eigen::VectorXd x(domain_.n);
  int rest = node;
  for (int k = 0; k < domain_.n; ++k) {
    const int idx = rest / strides_[k];
    rest -= idx * strides_[k];
    x(k) = origin_(k) + idx * h_;
  }
  return x;
}

int DiscreteDomain::node_at(const std::vector<int>& multi) const {
  int node = 0;
  for (int k = 0; k < domain_.n; ++k) {
    if (multi[k] < 0 || multi[k] >= dims_[k]) return -1;
    node += multi[k] * strides_[k];
  }
  return node;
}

int DiscreteDomain::neighbor(int node, const std::vector<int>& offset) const {
  int rest = node;
  int out = 0;
  for (int k = 0; k < domain_.n; ++k) {
    const int idx = rest / strides_[k];
    rest -= idx * strides_[k];
    const int j = idx + offset[k];
    if (j < 0 || j >= dims_[k]) return -1;
    out += j * strides_[k];
  }
  return out;
}

bool DiscreteDomain::deep_interior(int node) const {
  if (kinds_[node] != NodeKind::kInterior) return false;
  for (const auto& o : stencil_) {
    const int j = neighbor(node, o);
    if (j < 0 || kinds_[j] != NodeKind::kInterior) return false;
  }
  return true;
}

double DiscreteDomain::crossing(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (domain_.level(p + mid * (q - p)) < 0.0) lo = mid;
    else hi = mid;
  }
  return std::max(0.5 * (lo + hi), std::numeric_limits<double>::min());
}

void DiscreteDomain::build_rules() {
  rules_.reserve(ring_.size());
  for (int node : ring_) {
    const Eigen::VectorXd p = coords(node);
    RingRule rule;
    rule.node = node;
    double best = std::numeric_limits<double>::infinity();
    const std::vector<int>* best_o = nullptr;
    for (const auto& o : stencil_) {
      const int j = neighbor(node, o);
      if (j >= 0 && kinds_[j] != NodeKind::kOutside) continue;
      Eigen::VectorXd dir(domain_.n);
      for (int k = 0; k < domain_.n; ++k) dir(k) = o[k] * h_;
      const double t = crossing(p, p + dir);
      if (t * dir.norm() < best) {
        best = t * dir.norm();
        best_o = &o;
        rule.t_plus = t;
        rule.b_plus = p + t * dir;
      }
    }
    std::vector<int> back(domain_.n);
    Eigen::VectorXd dir(domain_.n);
    for (int k = 0; k < domain_.n; ++k) {
      back[k] = -(*best_o)[k];
      dir(k) = back[k] * h_;
    }
    const int q = neighbor(node, back);
    if (q >= 0 && kinds_[q] != NodeKind::kOutside) {
      rule.partner = q;
    } else {
      rule.t_minus = crossing(p, p + dir);
      rule.b_minus = p + rule.t_minus * dir;
    }
    rule.projection = domain_.project(p);
    rules_.push_back(std::move(rule));
  }
}

SymMatrix DiscreteDomain::hessian(const Eigen::VectorXd& u, int node) const {
  const int n = domain_.n;
  const double h2 = h_ * h_;
  SymMatrix s(n);
  const double c = u(node);
  for (int k = 0; k < n; ++k) {
    const int st = strides_[k];
    s.set(k, k, (u(node + st) - 2.0 * c + u(node - st)) / h2);
    for (int l = k + 1; l < n; ++l) {
      const int sl = strides_[l];
      s.set(k, l,
            (u(node + st + sl) - u(node + st - sl) - u(node - st + sl) + u(node - st - sl)) /
                (4.0 * h2));
    }
  }
  return s;
}

Eigen::VectorXd DiscreteDomain::gradient(const Eigen::VectorXd& u, int node) const {
  Eigen::VectorXd g(domain_.n);
  for (int k = 0; k < domain_.n; ++k)
    g(k) = (u(node + strides_[k]) - u(node - strides_[k])) / (2.0 * h_);
  return g;
}

double DiscreteDomain::interpolate(const Eigen::VectorXd& u, const Eigen::VectorXd& x) const {
  const int n = domain_.n;
  std::vector<int> base(n);
  std::vector<double> frac(n);
  for (int k = 0; k < n; ++k) {
    const double s = (x(k) - origin_(k)) / h_;
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, dims_[k] - 2);
    base[k] = i;
    frac[k] = std::clamp(s - i, 0.0, 1.0);
  }
  double sum = 0.0, weight = 0.0;
  std::vector<int> idx(n);
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      const int bit = (corner >> k) & 1;
      idx[k] = base[k] + bit;
      w *= bit ? frac[k] : 1.0 - frac[k];
    }
    const int node = node_at(idx);
    if (node < 0 || kinds_[node] == NodeKind::kOutside || w == 0.0) continue;
    sum += w * u(node);
    weight += w;
  }
  if (weight == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sum / weight;
}

Eigen::VectorXd DiscreteDomain::sample(const ScalarField& f) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i)
    if (kinds_[i] != NodeKind::kOutside) v(static_cast<Eigen::Index>(i)) = f.value(coords(static_cast<int>(i)));
  return v;
}

}  // namespace hessgeo
