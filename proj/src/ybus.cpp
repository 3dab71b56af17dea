#include "ppf/ybus.hpp"

#include <complex>

namespace ppf {

AdmittanceMatrix build_ybus(const NetworkCase& c) {
    using C = std::complex<double>;
    const int n = c.n_buses();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);

    for (std::size_t k = 0; k < c.branches().size(); ++k) {
        const Branch& br = c.branches()[k];
        if (!br.in_service) continue;
        if (br.r == 0.0 && br.x == 0.0)
            throw ValidationError("branch " + std::to_string(br.from_bus) + "-" +
                                  std::to_string(br.to_bus) +
                                  ": zero series impedance is singular");
        int f = c.branch_from_index(static_cast<int>(k));
        int t = c.branch_to_index(static_cast<int>(k));
        C ys = 1.0 / C(br.r, br.x);
        C ysh(0.0, br.b_charge / 2.0);
        C tap = std::polar(br.tap, br.shift);
        y(f, f) += (ys + ysh) / (br.tap * br.tap);
        y(f, t) += -ys / std::conj(tap);
        y(t, f) += -ys / tap;
        y(t, t) += ys + ysh;
    }
    for (int i = 0; i < n; ++i) y(i, i) += C(c.buses()[i].gs_shunt, c.buses()[i].bs_shunt);

    return AdmittanceMatrix{y.real(), y.imag()};
}

}  // namespace ppf
