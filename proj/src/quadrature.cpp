#include "mutdist/quadrature.hpp"

namespace mutdist::quad {

const Gk15& gk15() noexcept {
  static const Gk15 rule = [] {
    // Abscissae and weights from QUADPACK's qk15.
    constexpr std::array<double, 8> xgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.0};
    constexpr std::array<double, 8> wgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    constexpr std::array<double, 4> wg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    Gk15 r{};
    for (std::size_t i = 0; i < 7; ++i) {
      r.nodes[i] = -xgk[i];
      r.nodes[14 - i] = xgk[i];
      r.kronrod_weights[i] = wgk[i];
      r.kronrod_weights[14 - i] = wgk[i];
    }
    r.nodes[7] = 0.0;
    r.kronrod_weights[7] = wgk[7];
    // Gauss nodes are xgk[1], xgk[3], xgk[5] and 0.
    for (std::size_t i = 0; i < 3; ++i) {
      r.gauss_nodes[i] = -xgk[2 * i + 1];
      r.gauss_nodes[6 - i] = xgk[2 * i + 1];
      r.gauss_weights[i] = wg[i];
      r.gauss_weights[6 - i] = wg[i];
    }
    r.gauss_nodes[3] = 0.0;
    r.gauss_weights[3] = wg[3];
    return r;
  }();
  return rule;
}

Result<double> integrate(const std::function<double(double)>& f, double a, double b, const Tolerance& tol) {
  auto sum = [&](const double* x, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * f(x[i]);
    return s;
  };
  return adaptive_gk15<double>(sum, a, b, tol);
}

}  // namespace mutdist::quad
