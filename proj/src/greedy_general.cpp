#include "pa/greedy_general.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pa/lp.hpp"

namespace pa {

namespace {

std::vector<double> clamp_unit(std::vector<double> x) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  return x;
}

bool same_row(const Halfspace& a, const Halfspace& b) {
  if (std::abs(a.offset - b.offset) > 1e-12) return false;
  for (std::size_t i = 0; i < a.normal.size(); ++i)
    if (std::abs(a.normal[i] - b.normal[i]) > 1e-12) return false;
  return true;
}

double row_value(const Halfspace& h, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += h.normal[i] * x[i];
  return s;
}

// Visits every size-k subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

ResponsePolytope make_polytope(const GreedyInstance& instance, const ResponseProfile& profile) {
  const std::size_t n = instance.num_arms();
  if (profile.size() != instance.num_agents())
    throw std::invalid_argument("profile length must equal the number of agent types");
  for (std::size_t a : profile)
    if (a >= n) throw std::invalid_argument("profile entry out of range");

  ResponsePolytope poly{profile, n, {}};
  for (std::size_t i = 0; i < n; ++i) {
    Halfspace lo{std::vector<double>(n, 0.0), 0.0};
    lo.normal[i] = -1.0;
    Halfspace hi{std::vector<double>(n, 0.0), 1.0};
    hi.normal[i] = 1.0;
    poly.halfspaces.push_back(std::move(lo));
    poly.halfspaces.push_back(std::move(hi));
  }
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const auto& mu = instance.preference(j);
    const std::size_t s = profile[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (i == s) continue;
      Halfspace h{std::vector<double>(n, 0.0), mu[s] - mu[i]};
      h.normal[i] = 1.0;
      h.normal[s] = -1.0;
      poly.halfspaces.push_back(std::move(h));
    }
  }
  return poly;
}

double preference_slack(const ResponsePolytope& polytope, const std::vector<double>& x) {
  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t r = polytope.num_box(); r < polytope.halfspaces.size(); ++r) {
    const auto& h = polytope.halfspaces[r];
    slack = std::min(slack, h.offset - row_value(h, x));
  }
  return std::isinf(slack) ? 1.0 : slack;
}

SlackPoint max_slack_point(const ResponsePolytope& polytope) {
  // Variables (x, u) with s = u - 1 so the origin is feasible:
  //   x_i <= 1;  n.x + u <= offset + 1;  u <= 2;  maximize u.
  const std::size_t n = polytope.num_arms;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n + 1, 0.0);
    row[i] = 1.0;
    a.push_back(std::move(row));
    b.push_back(1.0);
  }
  for (std::size_t r = polytope.num_box(); r < polytope.halfspaces.size(); ++r) {
    const auto& h = polytope.halfspaces[r];
    std::vector<double> row(h.normal);
    row.push_back(1.0);
    a.push_back(std::move(row));
    b.push_back(std::max(0.0, h.offset + 1.0));
  }
  std::vector<double> cap(n + 1, 0.0);
  cap[n] = 1.0;
  a.push_back(std::move(cap));
  b.push_back(2.0);

  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  const auto res = lp::maximize(c, a, b);
  if (res.status != lp::Status::Optimal) throw std::runtime_error("max-slack LP did not converge");
  std::vector<double> x = clamp_unit({res.x.begin(), res.x.begin() + static_cast<long>(n)});
  return SlackPoint{x, preference_slack(polytope, x)};
}

std::vector<ResponseProfile> enumerate_profiles(const GreedyInstance& instance,
                                                const GeneralCaps& caps) {
  const std::size_t n = instance.num_arms();
  const std::size_t k = instance.num_agents();
  std::size_t total = 1;
  for (std::size_t j = 0; j < k; ++j) {
    if (total > caps.max_profiles / n) throw std::length_error("N^K exceeds the profile cap");
    total *= n;
  }
  if (total > caps.max_profiles) throw std::length_error("N^K exceeds the profile cap");

  std::vector<ResponseProfile> feasible;
  ResponseProfile sigma(k, 0);
  for (std::size_t count = 0; count < total; ++count) {
    if (max_slack_point(make_polytope(instance, sigma)).slack > kStrictSlack)
      feasible.push_back(sigma);
    for (std::size_t j = k; j-- > 0;) {  // odometer, last agent fastest
      if (++sigma[j] < n) break;
      sigma[j] = 0;
    }
  }
  return feasible;
}

VertexSet polytope_vertices(const ResponsePolytope& polytope, const GeneralCaps& caps) {
  const std::size_t n = polytope.num_arms;
  if (n > caps.max_arms) throw std::length_error("too many arms for vertex enumeration");

  std::vector<Halfspace> rows;
  for (const auto& h : polytope.halfspaces)
    if (std::none_of(rows.begin(), rows.end(), [&](const Halfspace& r) { return same_row(r, h); }))
      rows.push_back(h);

  VertexSet out;
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b(n);
  for_each_subset(rows.size(), n, [&](const std::vector<std::size_t>& active) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) a(r, c) = rows[active[r]].normal[c];
      b(r) = rows[active[r]].offset;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0 || sv(0) / smin > kMaxCondition) {
      ++out.skipped_degenerate;
      return;
    }
    const Eigen::VectorXd sol = svd.solve(b);
    std::vector<double> x(sol.data(), sol.data() + n);
    // Round-off on the box faces would otherwise leave -1e-17 and the like.
    for (double& xi : x) {
      if (std::abs(xi) <= kVertexFeasibility) xi = 0.0;
      if (std::abs(xi - 1.0) <= kVertexFeasibility) xi = 1.0;
    }
    for (const auto& h : polytope.halfspaces)
      if (row_value(h, x) > h.offset + kVertexFeasibility) return;
    for (const auto& p : out.points)
      if (linf_distance(p, x) <= kVertexDedup) return;
    out.points.push_back(std::move(x));
  });
  std::sort(out.points.begin(), out.points.end());
  return out;
}

std::vector<double> interior_shift(const ResponsePolytope& polytope,
                                   const std::vector<double>& vertex, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("interior_shift needs eps > 0");
  if (vertex.size() != polytope.num_arms) throw std::invalid_argument("vertex has wrong dimension");
  const std::vector<double> v = clamp_unit(vertex);
  if (preference_slack(polytope, v) >= kInteriorSlack) return v;

  const SlackPoint center = max_slack_point(polytope);
  if (center.slack <= kStrictSlack) throw std::domain_error("open response region is empty");
  const double dist = linf_distance(center.point, v);
  const double t = dist > 0.0 ? std::min(1.0, eps / dist) : 1.0;
  std::vector<double> q(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = v[i] + t * (center.point[i] - v[i]);
  q = clamp_unit(std::move(q));
  if (preference_slack(polytope, q) < kInteriorSlack)
    throw std::domain_error("could not move the vertex strictly inside its region");
  return q;
}

Menu build_general_menu(const GreedyInstance& instance, std::size_t horizon,
                        const GeneralCaps& caps) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  if (instance.num_arms() > caps.max_arms)
    throw std::length_error("too many arms for vertex enumeration");
  const double eps = 1.0 / static_cast<double>(horizon);
  Menu menu(instance.num_arms(), IncentiveMode::General);
  for (const auto& sigma : enumerate_profiles(instance, caps)) {
    const ResponsePolytope poly = make_polytope(instance, sigma);
    for (const auto& vertex : polytope_vertices(poly, caps).points) {
      IncentiveVector pi(interior_shift(poly, vertex, eps), IncentiveMode::General);
      for (std::size_t j = 0; j < sigma.size(); ++j)
        if (greedy_best_response(instance, j, pi).index != sigma[j])
          throw std::logic_error("shifted vertex left its response region");
      menu.add(std::move(pi), MenuProvenance{std::nullopt, std::nullopt, true, sigma});
    }
  }
  return menu;
}

}  // namespace pa
