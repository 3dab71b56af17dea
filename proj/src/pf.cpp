#include "ppf/pf.hpp"

#include <cmath>
#include <complex>

namespace ppf {

namespace {

using C = std::complex<double>;

Eigen::VectorXcd complex_voltage(const PfState& s) {
    const auto n = s.v_mag.size();
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(s.v_mag(i), s.v_ang(i));
    return v;
}

// Calculated complex injections S = V .* conj(Y V).
Eigen::VectorXcd calc_injections(const AdmittanceMatrix& y, const PfState& s) {
    Eigen::VectorXcd v = complex_voltage(s);
    Eigen::MatrixXcd ymat(y.g.rows(), y.g.cols());
    ymat.real() = y.g;
    ymat.imag() = y.b;
    return v.cwiseProduct((ymat * v).conjugate());
}

void spec_from_x(const NetworkCase& c, const Vec& x, Vec& p_spec, Vec& q_spec) {
    const auto& pv = c.pv_buses();
    const auto& pq = c.pq_buses();
    const int ng = static_cast<int>(pv.size());
    const int nl = static_cast<int>(pq.size());
    if (x.size() != ng + 2 * nl)
        throw ContractError("injection vector has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(ng + 2 * nl));
    p_spec.setZero(c.n_buses());
    q_spec.setZero(c.n_buses());
    for (int k = 0; k < ng; ++k) p_spec(pv[k]) = x(k);
    for (int k = 0; k < nl; ++k) p_spec(pq[k]) = x(ng + k);
    for (int k = 0; k < nl; ++k) q_spec(pq[k]) = x(ng + nl + k);
}

}  // namespace

Vec DenseLuSolver::solve(const Mat& a, const Vec& rhs) const {
    Eigen::PartialPivLU<Mat> lu(a);
    const Vec diag = lu.matrixLU().diagonal().cwiseAbs();
    const double scale = a.cwiseAbs().maxCoeff();
    if (diag.minCoeff() <= 1e-12 * std::max(scale, 1.0))
        throw SolverError("singular linear system");
    return lu.solve(rhs);
}

PfState flat_start(const NetworkCase& c) {
    const int n = c.n_buses();
    PfState s;
    s.v_mag.resize(n);
    s.v_ang.setConstant(n, c.buses()[c.slack()].v_ang_init);
    for (int i = 0; i < n; ++i)
        s.v_mag(i) = c.buses()[i].kind == BusKind::Load ? 1.0 : c.held_voltage(i);
    return s;
}

Vec case_injections(const NetworkCase& c) {
    const auto& pv = c.pv_buses();
    const auto& pq = c.pq_buses();
    Vec x(pv.size() + 2 * pq.size());
    Eigen::Index k = 0;
    for (int i : pv) x(k++) = c.gen_p(i) - c.buses()[i].p_demand;
    for (int i : pq) x(k++) = -c.buses()[i].p_demand;
    for (int i : pq) x(k++) = -c.buses()[i].q_demand;
    return x;
}

Vec mismatch(const NetworkCase& c, const AdmittanceMatrix& y, const PfState& state,
             const Vec& x) {
    const int n = c.n_buses();
    if (state.v_mag.size() != n || state.v_ang.size() != n)
        throw ContractError("state dimension does not match the case");
    Vec p_spec, q_spec;
    spec_from_x(c, x, p_spec, q_spec);

    Eigen::VectorXcd s = calc_injections(y, state);
    const auto& pq = c.pq_buses();
    Vec out(n - 1 + static_cast<int>(pq.size()));
    Eigen::Index k = 0;
    for (int i = 0; i < n; ++i) {
        if (i == c.slack()) continue;
        out(k++) = p_spec(i) - s(i).real();
    }
    for (int i : pq) out(k++) = q_spec(i) - s(i).imag();
    return out;
}

Mat pf_jacobian(const NetworkCase& c, const AdmittanceMatrix& y, const PfState& state) {
    const int n = c.n_buses();
    const auto& pq = c.pq_buses();
    const int npq = static_cast<int>(pq.size());
    const int nvar = (n - 1) + npq;

    // variable columns: theta at non-slack buses, then V at PQ buses
    std::vector<int> ang_col(n, -1), mag_col(n, -1);
    int col = 0;
    for (int i = 0; i < n; ++i)
        if (i != c.slack()) ang_col[i] = col++;
    for (int i : pq) mag_col[i] = col++;

    Eigen::VectorXcd s = calc_injections(y, state);
    const Vec& vm = state.v_mag;
    const Vec& va = state.v_ang;

    Mat jac = Mat::Zero(nvar, nvar);
    int row = 0;
    auto fill_p_row = [&](int i) {
        const double vi = vm(i);
        for (int j = 0; j < n; ++j) {
            const double gij = y.g(i, j), bij = y.b(i, j);
            if (gij == 0.0 && bij == 0.0 && i != j) continue;
            if (i == j) {
                if (ang_col[i] >= 0) jac(row, ang_col[i]) = -s(i).imag() - bij * vi * vi;
                if (mag_col[i] >= 0) jac(row, mag_col[i]) = s(i).real() / vi + gij * vi;
            } else {
                const double th = va(i) - va(j);
                const double cs = std::cos(th), sn = std::sin(th);
                if (ang_col[j] >= 0)
                    jac(row, ang_col[j]) = vi * vm(j) * (gij * sn - bij * cs);
                if (mag_col[j] >= 0) jac(row, mag_col[j]) = vi * (gij * cs + bij * sn);
            }
        }
        ++row;
    };
    auto fill_q_row = [&](int i) {
        const double vi = vm(i);
        for (int j = 0; j < n; ++j) {
            const double gij = y.g(i, j), bij = y.b(i, j);
            if (gij == 0.0 && bij == 0.0 && i != j) continue;
            if (i == j) {
                if (ang_col[i] >= 0) jac(row, ang_col[i]) = s(i).real() - gij * vi * vi;
                if (mag_col[i] >= 0) jac(row, mag_col[i]) = s(i).imag() / vi - bij * vi;
            } else {
                const double th = va(i) - va(j);
                const double cs = std::cos(th), sn = std::sin(th);
                if (ang_col[j] >= 0)
                    jac(row, ang_col[j]) = -vi * vm(j) * (gij * cs + bij * sn);
                if (mag_col[j] >= 0) jac(row, mag_col[j]) = vi * (gij * sn - bij * cs);
            }
        }
        ++row;
    };

    for (int i = 0; i < n; ++i)
        if (i != c.slack()) fill_p_row(i);
    for (int i : pq) fill_q_row(i);
    return jac;
}

PfSolution solve_pf(const NetworkCase& c, const AdmittanceMatrix& y, const Vec& x,
                    const PfOptions& opts, const PfState* warm_start,
                    const LinearSolver* solver) {
    if (opts.tol <= 0.0) throw ContractError("solver tolerance must be positive");
    if (opts.max_iter < 1) throw ContractError("max_iter must be at least 1");

    const DenseLuSolver default_solver;
    const LinearSolver& lin = solver ? *solver : default_solver;

    const int n = c.n_buses();
    const auto& pq = c.pq_buses();
    PfSolution sol;
    sol.state = warm_start ? *warm_start : flat_start(c);

    for (int iter = 0;; ++iter) {
        Vec m = mismatch(c, y, sol.state, x);
        sol.max_mismatch = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
        sol.iterations = iter;
        if (!std::isfinite(sol.max_mismatch))
            throw SolverError("non-finite state at iteration " + std::to_string(iter));
        if (sol.max_mismatch <= opts.tol) {
            sol.converged = true;
            return sol;
        }
        if (iter >= opts.max_iter) {
            sol.converged = false;
            return sol;
        }

        Mat jac = pf_jacobian(c, y, sol.state);
        Vec step;
        try {
            step = lin.solve(jac, m);
        } catch (const SolverError&) {
            throw SolverError("singular Jacobian at iteration " + std::to_string(iter));
        }

        Eigen::Index k = 0;
        for (int i = 0; i < n; ++i)
            if (i != c.slack()) sol.state.v_ang(i) += step(k++);
        for (int i : pq) sol.state.v_mag(i) += step(k++);
    }
}

BranchFlows branch_flows(const NetworkCase& c, const PfState& state) {
    if (!state.v_mag.allFinite() || !state.v_ang.allFinite())
        throw ContractError("branch_flows requires a finite state");
    const int m = c.n_lines();
    BranchFlows out;
    out.p_from.resize(m);
    out.q_from.resize(m);
    out.p_to.resize(m);
    out.q_to.resize(m);

    int row = 0;
    for (std::size_t k = 0; k < c.branches().size(); ++k) {
        const Branch& br = c.branches()[k];
        if (!br.in_service) continue;
        const int f = c.branch_from_index(static_cast<int>(k));
        const int t = c.branch_to_index(static_cast<int>(k));
        const C vf = std::polar(state.v_mag(f), state.v_ang(f));
        const C vt = std::polar(state.v_mag(t), state.v_ang(t));
        const C ys = 1.0 / C(br.r, br.x);
        const C ysh(0.0, br.b_charge / 2.0);
        const C tap = std::polar(br.tap, br.shift);

        const C i_from = (ys + ysh) / (br.tap * br.tap) * vf - ys / std::conj(tap) * vt;
        const C i_to = -ys / tap * vf + (ys + ysh) * vt;
        const C s_from = vf * std::conj(i_from);
        const C s_to = vt * std::conj(i_to);
        out.p_from(row) = s_from.real();
        out.q_from(row) = s_from.imag();
        out.p_to(row) = s_to.real();
        out.q_to(row) = s_to.imag();
        ++row;
    }
    return out;
}

Vec injections_from_state(const NetworkCase& c, const AdmittanceMatrix& y,
                          const PfState& state) {
    Eigen::VectorXcd s = calc_injections(y, state);
    const auto& pv = c.pv_buses();
    const auto& pq = c.pq_buses();
    Vec x(pv.size() + 2 * pq.size());
    Eigen::Index k = 0;
    for (int i : pv) x(k++) = s(i).real();
    for (int i : pq) x(k++) = s(i).real();
    for (int i : pq) x(k++) = s(i).imag();
    return x;
}

}  // namespace ppf
