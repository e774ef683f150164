#include "washboard/kernels/kernels.hpp"

#include "scalar_impl.hpp"

namespace washboard::kernels {

namespace {

void euler_maruyama_scalar(std::span<double> q, std::span<double> p, std::span<const double> xi,
                           const LangevinStep& step) {
  detail::euler_maruyama_range(q.data(), p.data(), xi.data(), 0, q.size(), step);
}

void hermite_table_scalar(std::span<const double> nodes, std::span<const double> seeds, int n_max,
                          std::span<double> out) {
  detail::hermite_table_range(nodes.data(), seeds.data(), nodes.size(), 0, nodes.size(), n_max,
                              out.data());
}

void sincos_scalar(std::span<const double> x, std::span<double> s, std::span<double> c) {
  for (std::size_t i = 0; i < x.size(); ++i) detail::sincos_one(x[i], s[i], c[i]);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &euler_maruyama_scalar, &hermite_table_scalar,
                                 &sincos_scalar};
  return table;
}

}  // namespace washboard::kernels
