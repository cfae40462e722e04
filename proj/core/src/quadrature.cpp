#include "finsler/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "finsler/structure.hpp"

namespace finsler {

namespace {

SphereRule make_rule(int n) {
  SphereRule rule;
  rule.dim = n;
  if (n == 2) {
    constexpr int kNodes = 512;
    for (int j = 0; j < kNodes; ++j) {
      const double th = 2.0 * std::numbers::pi * j / kNodes;
      rule.nodes.push_back(Vec{std::cos(th), std::sin(th)});
      rule.weights.push_back(2.0 * std::numbers::pi / kNodes);
    }
  } else if (n == 3) {
    using Gauss = boost::math::quadrature::gauss<double, 24>;
    constexpr int kAzimuth = 48;
    // Gauss stores the non-negative half of the symmetric abscissae.
    std::vector<std::pair<double, double>> zw;
    const auto& a = Gauss::abscissa();
    const auto& w = Gauss::weights();
    for (size_t i = 0; i < a.size(); ++i) {
      zw.emplace_back(a[i], w[i]);
      if (a[i] != 0.0) zw.emplace_back(-a[i], w[i]);
    }
    for (const auto& [z, wz] : zw) {
      const double rho = std::sqrt(1.0 - z * z);
      for (int j = 0; j < kAzimuth; ++j) {
        const double ph = 2.0 * std::numbers::pi * j / kAzimuth;
        rule.nodes.push_back(Vec{rho * std::cos(ph), rho * std::sin(ph), z});
        rule.weights.push_back(wz * 2.0 * std::numbers::pi / kAzimuth);
      }
    }
  } else if (n == 4) {
    constexpr int kNodes = 4096;
    rule.nodes = sample_directions(4, kNodes, 0x5eedULL);
    rule.weights.assign(kNodes, unit_sphere_area(4) / kNodes);
    rule.randomized = true;
  } else {
    throw std::invalid_argument("sphere_rule: unsupported dimension");
  }
  return rule;
}

}  // namespace

const SphereRule& sphere_rule(int n) {
  static const SphereRule r2 = make_rule(2);
  static const SphereRule r3 = make_rule(3);
  static const SphereRule r4 = make_rule(4);
  switch (n) {
    case 2:
      return r2;
    case 3:
      return r3;
    case 4:
      return r4;
    default:
      throw std::invalid_argument("sphere_rule: unsupported dimension");
  }
}

double unit_ball_volume(int n) { return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

}  // namespace finsler
