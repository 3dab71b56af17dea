#include <cmath>

#include "doctest.h"
#include "ppf/linear_model.hpp"
#include "ppf/loss.hpp"
#include "ppf/mlp.hpp"
#include "ppf/rng.hpp"

using namespace ppf;

TEST_CASE("single-feature regression recovers slope 2, intercept 1") {
    Mat x(3, 1), y(3, 1);
    x << 0, 1, 2;
    y << 1, 3, 5;
    LinearModel m = fit_ols(x, y);
    CHECK(m.h(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(m.h(0, 1) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("exact linear data is recovered to 1e-8 relative") {
    rng::Engine eng(3);
    const int n = 200, d_in = 7, d_out = 4;
    Mat x(n, d_in);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d_in; ++j) x(i, j) = eng.normal();
    Mat h(d_out, d_in);
    Vec c(d_out);
    for (int i = 0; i < d_out; ++i) {
        c(i) = eng.normal();
        for (int j = 0; j < d_in; ++j) h(i, j) = eng.normal();
    }
    Mat y = x * h.transpose();
    y.rowwise() += c.transpose();

    LinearModel m = fit_ols(x, y);
    CHECK((m.h.leftCols(d_in) - h).cwiseAbs().maxCoeff() /
              h.cwiseAbs().maxCoeff() < 1e-8);
    CHECK((m.h.col(d_in) - c).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((m.predict(x) - y).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("constant targets give zero slopes and the constant intercept") {
    rng::Engine eng(5);
    Mat x(50, 3);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 3; ++j) x(i, j) = eng.normal();
    Mat y = Mat::Constant(50, 1, 4.25);
    LinearModel m = fit_ols(x, y);
    CHECK(m.h.leftCols(3).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(m.h(0, 3) == doctest::Approx(4.25).epsilon(1e-12));
}

TEST_CASE("underdetermined designs are rejected") {
    Mat x(3, 5), y(3, 1);
    x.setRandom();
    y.setRandom();
    CHECK_THROWS_AS(fit_ols(x, y), ValidationError);
}

TEST_CASE("rank-deficient designs still produce finite minimum-norm fits") {
    rng::Engine eng(9);
    Mat x(40, 4);
    for (int i = 0; i < 40; ++i) {
        x(i, 0) = eng.normal();
        x(i, 1) = x(i, 0);  // duplicated column
        x(i, 2) = eng.normal();
        x(i, 3) = 0.0;      // dead column
    }
    Mat y = x.col(0) + 2.0 * x.col(2);
    LinearModel m = fit_ols(x, y);
    CHECK((m.predict(x) - y).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("standardizer round-trips and floors tiny stds") {
    rng::Engine eng(4);
    Mat x(30, 3);
    for (int i = 0; i < 30; ++i) {
        x(i, 0) = 5.0 + 2.0 * eng.normal();
        x(i, 1) = -3.0 + 1e-3 * eng.normal();
        x(i, 2) = 7.5;  // constant
    }
    Standardizer s = Standardizer::fit(x);
    CHECK(s.std(2) == doctest::Approx(1e-12));
    Mat z = s.apply(x);
    CHECK(std::abs(z.col(0).mean()) < 1e-12);
    CHECK((s.invert(z) - x).cwiseAbs().maxCoeff() < 1e-12 * x.cwiseAbs().maxCoeff());
    CHECK(z.col(2).cwiseAbs().maxCoeff() == 0.0);  // constant maps to zero
}

TEST_CASE("argmin invariance: standardizing targets does not move the fit") {
    rng::Engine eng(12);
    const int n = 120, d_in = 5, d_out = 3;
    Mat x(n, d_in), y(n, d_out);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d_in; ++j) x(i, j) = eng.normal();
        for (int j = 0; j < d_out; ++j)
            y(i, j) = 3.0 * x(i, 0) - x(i, std::min(j + 1, d_in - 1)) + 0.1 * eng.normal();
    }
    LinearModel direct = fit_ols(x, y);
    Standardizer s = Standardizer::fit(y);
    LinearModel scaled = fit_ols(x, s.apply(y));
    Mat back = s.invert(scaled.predict(x));
    CHECK((back - direct.predict(x)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("all-zero network outputs zero") {
    rng::Engine eng(1);
    MlpModel m = make_mlp({4, 8, 3}, eng);
    for (auto& w : m.weights) w.setZero();
    Mat x = Mat::Random(5, 4);
    CHECK(mlp_forward(m, x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identity single layer passes inputs through") {
    rng::Engine eng(1);
    MlpModel m = make_mlp({3, 3}, eng);
    m.weights[0] = Mat::Identity(3, 3);
    m.biases[0].setZero();
    Mat x = Mat::Random(6, 3);
    CHECK((mlp_forward(m, x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward pass agrees with a straight-line scalar recompute") {
    rng::Engine eng(77);
    MlpModel m = make_mlp({5, 9, 7, 2}, eng);
    for (auto& b : m.biases)
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.1 * eng.normal();
    Mat x(4, 5);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) x(i, j) = eng.normal();

    Mat got = mlp_forward(m, x);

    // naive per-element recompute, no linear algebra library involved
    for (int row = 0; row < 4; ++row) {
        std::vector<double> a(5);
        for (int j = 0; j < 5; ++j) a[j] = x(row, j);
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            std::vector<double> z(static_cast<std::size_t>(m.weights[l].rows()));
            for (Eigen::Index u = 0; u < m.weights[l].rows(); ++u) {
                double acc = m.biases[l](u);
                for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j)
                    acc += m.weights[l](u, j) * a[static_cast<std::size_t>(j)];
                z[static_cast<std::size_t>(u)] =
                    (l + 1 < m.weights.size() && acc < 0.0) ? 0.0 : acc;
            }
            a = std::move(z);
        }
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(got(row, j) - a[static_cast<std::size_t>(j)]) < 1e-12);
    }
}

TEST_CASE("forward rejects mismatched widths") {
    rng::Engine eng(1);
    MlpModel m = make_mlp({4, 8, 3}, eng);
    CHECK_THROWS_AS(mlp_forward(m, Mat::Random(5, 7)), ContractError);
}

TEST_CASE("mlp serialization round-trips exactly") {
    rng::Engine eng(1234);
    MlpModel m = make_mlp({6, 11, 4}, eng);
    for (auto& b : m.biases)
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = eng.normal();
    Mat probe = Mat::Random(9, 6);
    MlpModel back = deserialize_mlp(serialize_mlp(m, "fp"));
    CHECK((mlp_forward(back, probe).array() == mlp_forward(m, probe).array()).all());
}

TEST_CASE("multitask loss with alpha 0 equals plain mse exactly") {
    Mat pred = Mat::Random(8, 5), truth = Mat::Random(8, 5);
    Mat a = Mat::Random(7, 5);
    LossGrad plain = mse_loss(pred, truth);
    LossGrad multi = multitask_loss(pred, truth, a, 0.0);
    CHECK(multi.value == plain.value);
    CHECK((multi.grad.array() == plain.grad.array()).all());
}

TEST_CASE("perfect predictions give zero loss and gradient") {
    Mat truth = Mat::Random(6, 4);
    Mat a = Mat::Random(5, 4);
    LossGrad lg = multitask_loss(truth, truth, a, 2.5);
    CHECK(lg.value == 0.0);
    CHECK(lg.grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("triangle fixture reproduces the hand-computed loss") {
    // slack bus 1, branches (1,2), (2,3), (1,3); columns are buses 2 and 3
    Mat a(3, 2);
    a << -1, 0,
          1, -1,
          0, -1;
    Mat truth(1, 2), pred(1, 2);
    truth << 0.0, 0.0;
    pred << 0.1, 0.0;
    LossGrad lg = multitask_loss(pred, truth, a, 1.0);
    // angle mse: 0.01 / 2; difference residuals [-0.1, 0.1, 0] -> 0.02 / 3
    CHECK(lg.value == doctest::Approx(0.005 + 0.02 / 3.0).epsilon(1e-14));

    // analytic gradient: 2 e / (b na) + alpha 2 (e A^T) A / (b m)
    Mat e = pred - truth;
    Mat expected = e / 1.0;
    expected *= 2.0 / 2.0;
    expected += (2.0 / 3.0) * ((e * a.transpose()) * a);
    CHECK((lg.grad - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("negative alpha is a configuration error") {
    Mat p = Mat::Random(2, 2), t = Mat::Random(2, 2), a = Mat::Random(1, 2);
    CHECK_THROWS_AS(multitask_loss(p, t, a, -1.0), ConfigError);
}

TEST_CASE("multitask loss is positive unless predictions match") {
    Mat truth = Mat::Random(5, 3);
    Mat a(2, 3);
    a << 1, -1, 0, 0, 1, -1;
    Mat pred = truth;
    pred(2, 1) += 1e-3;
    CHECK(multitask_loss(pred, truth, a, 0.7).value > 0.0);
}
