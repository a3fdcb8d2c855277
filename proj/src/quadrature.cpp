#include "osbm/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace osbm::detail {

const Kronrod21& kronrod21() {
  static const Kronrod21 rule = [] {
    Kronrod21 r{};
    const auto& x = boost::math::quadrature::gauss_kronrod<double, 21>::abscissa();
    const auto& wk = boost::math::quadrature::gauss_kronrod<double, 21>::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
    for (std::size_t i = 0; i < 11; ++i) {
      r.nodes[i] = x[i];
      r.kronrod_weights[i] = wk[i];
    }
    for (std::size_t i = 0; i < 5; ++i) r.gauss_weights[i] = wg[i];
    return r;
  }();
  return rule;
}

}  // namespace osbm::detail
