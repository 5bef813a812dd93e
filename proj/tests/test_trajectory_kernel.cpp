#include <doctest.h>

#include <random>

#include "ddfc/trajectory_kernel.hpp"
#include "support/oracles.hpp"

using namespace ddfc;

namespace {

Signal scalar(std::initializer_list<double> v) {
    Matrix s(1, static_cast<Index>(v.size()));
    Index k = 0;
    for (double x : v) s(0, k++) = x;
    return Signal(s, 0.1);
}

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
    Matrix m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
    Index i = 0;
    for (const auto& row : r) {
        Index j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

}  // namespace

TEST_SUITE("hankel") {
    TEST_CASE("scalar ramp at depth 2") {
        const HankelBlock h = build_hankel(scalar({1, 2, 3, 4}), 2);
        CHECK(h.matrix == rows({{1, 2, 3}, {2, 3, 4}}));
        CHECK(h.depth == 2);
        CHECK(h.source_channels == 1);
        CHECK(h.columns() == 3);
    }

    TEST_CASE("scalar impulse at depth 2") {
        CHECK(build_hankel(scalar({1, 0, 0, 0}), 2).matrix == rows({{1, 0, 0}, {0, 0, 0}}));
    }

    TEST_CASE("two channels stack per sample") {
        Matrix s(2, 3);
        s << 1, 2, 3, 5, 6, 7;
        const HankelBlock h = build_hankel(Signal(s, 0.1), 2);
        CHECK(h.matrix == rows({{1, 2}, {5, 6}, {2, 3}, {6, 7}}));
        CHECK(h.blocks(1, 1) == rows({{2, 3}, {6, 7}}));
    }

    TEST_CASE("depth beyond length names both values") {
        const Signal z = scalar({1, 2, 3});
        try {
            build_hankel(z, 4);
            FAIL("expected invalid_argument");
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            CHECK(msg.find('4') != std::string::npos);
            CHECK(msg.find('3') != std::string::npos);
        }
        CHECK_THROWS_AS(build_hankel(z, 0), std::invalid_argument);
    }

    TEST_CASE("entries equal the source samples for random signals") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            const Index c = 1 + trial % 3, T = 15 + trial, L = 1 + trial % 6;
            const Matrix z = oracle::gaussian(rng, c, T);
            const HankelBlock h = build_hankel(Signal(z, 0.1), L);
            REQUIRE(h.matrix.rows() == c * L);
            REQUIRE(h.matrix.cols() == T - L + 1);
            CHECK(h.matrix == oracle::hankel(z, L));
            for (Index j = 0; j < h.columns(); ++j) {
                const Matrix window = Eigen::Map<const Matrix>(h.matrix.col(j).data(), c, L);
                CHECK(window == z.middleCols(j, L));
            }
        }
    }
}

TEST_SUITE("partition") {
    TEST_CASE("past rows then future rows") {
        const PastFuturePartition part(7, 1, 3);
        CHECK(part.past_first() == 0);
        CHECK(part.past_count() == 21);
        CHECK(part.future_first() == 21);
        CHECK(part.future_count() == 3);
        CHECK_THROWS_AS(PastFuturePartition(0, 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(PastFuturePartition(1, 0, 1), std::invalid_argument);
    }
}

TEST_SUITE("persistency of excitation") {
    TEST_CASE("zero signal") {
        const PeReport r = is_persistently_exciting(scalar({0, 0, 0, 0, 0}), 1);
        CHECK_FALSE(r.exciting);
        CHECK(r.rank == 0);
    }

    TEST_CASE("alternating signal is exciting of order 2 only") {
        const Signal z = scalar({1, 0, 1, 0, 1, 0, 1});
        const PeReport two = is_persistently_exciting(z, 2);
        CHECK(two.exciting);
        CHECK(two.rank == 2);
        const PeReport three = is_persistently_exciting(z, 3);
        CHECK_FALSE(three.exciting);
        CHECK(three.rank == 2);
        CHECK(three.required_rank == 3);
    }

    TEST_CASE("short signal reports insufficient length") {
        const PeReport r = is_persistently_exciting(scalar({1, 2, 3}), 3);
        CHECK_FALSE(r.exciting);
        CHECK(r.reason == "insufficient length");
    }

    TEST_CASE("order zero is rejected") {
        CHECK_THROWS_AS(is_persistently_exciting(scalar({1, 2}), 0), std::invalid_argument);
    }

    TEST_CASE("exciting of order L implies every lower order") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 10; ++trial) {
            const Index c = 1 + trial % 2;
            const Signal z(oracle::gaussian(rng, c, 60), 0.1);
            Index top = 0;
            for (Index L = 1; L <= 30; ++L)
                if (is_persistently_exciting(z, L).exciting) top = L;
            REQUIRE(top > 0);
            for (Index L = 1; L <= top; ++L) CHECK(is_persistently_exciting(z, L).exciting);
        }
    }

    TEST_CASE("data span matches the fundamental lemma rank") {
        std::mt19937_64 rng(13);
        for (Index n = 1; n <= 6; ++n) {
            oracle::PlantShape s;
            s.n = n;
            s.m = 1 + n % 2;
            s.q = 1;
            s.p = 1 + n % 3;
            const oracle::Plant pl = oracle::random_plant(rng, s);
            for (Index L = n; L <= n + 3; ++L) {
                const auto data = oracle::experiment(rng, pl, (s.m + s.q + 1) * (L + n) + 30, true);
                Matrix h(s.m * L + s.q * L + s.p * L, data.length() - L + 1);
                h << oracle::hankel(data.u.samples(), L), oracle::hankel(data.d.samples(), L),
                    oracle::hankel(data.y.samples(), L);
                CHECK(numerical_rank(h) == (s.m + s.q) * L + n);
            }
        }
    }
}

TEST_SUITE("pseudoinverse") {
    TEST_CASE("diagonal with a zero") {
        const PinvResult r = truncated_pinv(rows({{2, 0}, {0, 0}}), ToleranceMode{1e-9});
        CHECK(r.pinv.isApprox(rows({{0.5, 0}, {0, 0}})));
        CHECK(r.retained_rank == 1);
    }

    TEST_CASE("identity at full rank") {
        const PinvResult r = truncated_pinv(Matrix::Identity(3, 3), RankMode{3});
        CHECK((r.pinv - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(r.warnings.empty());
    }

    TEST_CASE("rank truncation below and at the true rank") {
        std::mt19937_64 rng(17);
        const Matrix M = oracle::gaussian(rng, 6, 4) * oracle::gaussian(rng, 4, 10);
        const Matrix p3 = truncated_pinv(M, RankMode{3}).pinv;
        const Matrix p4 = truncated_pinv(M, RankMode{4}).pinv;
        CHECK((M * p3 * M - M).cwiseAbs().maxCoeff() > 1e-3);
        CHECK((M * p4 * M - M).cwiseAbs().maxCoeff() <= 1e-8);
    }

    TEST_CASE("requested rank above min dimension is clamped with a warning") {
        std::mt19937_64 rng(19);
        const Matrix M = oracle::gaussian(rng, 3, 5);
        const PinvResult r = truncated_pinv(M, RankMode{9});
        CHECK(r.retained_rank == 3);
        CHECK_FALSE(r.warnings.empty());
    }

    TEST_CASE("empty matrix rejected") {
        CHECK_THROWS_AS(truncated_pinv(Matrix(0, 0)), std::invalid_argument);
    }

    TEST_CASE("Moore-Penrose identities at full retained rank") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 25; ++trial) {
            const Index r = 1 + trial % 5, a = r + trial % 4, b = r + (trial / 4) % 5;
            const Matrix M = oracle::gaussian(rng, a, r) * oracle::gaussian(rng, r, b);
            const Matrix P = truncated_pinv(M).pinv;
            CHECK((M * P * M - M).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK((P * M * P - P).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK(((M * P).transpose() - M * P).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK(((P * M).transpose() - P * M).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_SUITE("data-driven response") {
    TEST_CASE("one-step memory plant") {
        // x+ = u + d, y = x.
        oracle::Plant pl{rows({{0}}), rows({{1}}), rows({{1}}), rows({{1}}), rows({{0}})};
        std::mt19937_64 rng(29);
        const auto data = oracle::experiment(rng, pl, 40, true);

        const Matrix u = rows({{0.3, -1.2, 0, 0, 0}});
        const Matrix d = rows({{0.5, 0.7, 0, 0, 0}});
        const Matrix y = oracle::simulate(pl, Vector::Constant(1, 0.4), u, d);
        PredictionOptions opt;
        opt.t_ini = 2;
        opt.horizon = 3;
        const ResponseResult r =
            data_driven_response(data, {u.leftCols(2), d.leftCols(2), y.leftCols(2)}, u.rightCols(3), d.rightCols(3), opt);
        CHECK(r.y(0, 0) == doctest::Approx(u(0, 1) + d(0, 1)).epsilon(1e-10));
        CHECK(std::abs(r.y(0, 1)) < 1e-10);
        CHECK(std::abs(r.y(0, 2)) < 1e-10);
        CHECK((r.y - y.rightCols(3)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(r.check == PeCheck::stacked_inputs);
    }

    TEST_CASE("zero prefix and zero inputs give zero output") {
        std::mt19937_64 rng(31);
        oracle::PlantShape s;
        s.n = 4;
        s.m = 2;
        s.q = 1;
        s.p = 2;
        const oracle::Plant pl = oracle::random_plant(rng, s);
        const auto data = oracle::experiment(rng, pl, 120, true);
        PredictionOptions opt;
        opt.t_ini = 4;
        opt.horizon = 5;
        const ResponseResult r = data_driven_response(data, {Matrix::Zero(2, 4), Matrix::Zero(1, 4), Matrix::Zero(2, 4)},
                                                      Matrix::Zero(2, 5), Matrix::Zero(1, 5), opt);
        CHECK(r.y.cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("random 3-state SISO plant over 10 steps") {
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 10; ++trial) {
            oracle::PlantShape s;
            s.n = 3;
            const oracle::Plant pl = oracle::random_plant(rng, s);
            const auto data = oracle::experiment(rng, pl, 120, true);
            const Matrix u = oracle::gaussian(rng, 1, 13), d = oracle::gaussian(rng, 1, 13);
            const Matrix y = oracle::simulate(pl, oracle::gaussian(rng, 3, 1), u, d);
            PredictionOptions opt;
            opt.t_ini = 3;
            opt.horizon = 10;
            opt.order_bound = 3;
            const ResponseResult r = data_driven_response(data, {u.leftCols(3), d.leftCols(3), y.leftCols(3)},
                                                          u.rightCols(10), d.rightCols(10), opt);
            CHECK(r.check == PeCheck::order_bound);
            CHECK((r.y - y.rightCols(10)).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }

    TEST_CASE("lumped channel on B = B_d data") {
        std::mt19937_64 rng(41);
        oracle::PlantShape s;
        s.n = 3;
        s.lumped = true;
        const oracle::Plant pl = oracle::random_plant(rng, s);
        const auto data = oracle::experiment(rng, pl, 80, false);
        const Matrix u = oracle::gaussian(rng, 1, 9), d = oracle::gaussian(rng, 1, 9);
        const Matrix y = oracle::simulate(pl, oracle::gaussian(rng, 3, 1), u, d);
        PredictionOptions opt;
        opt.t_ini = 3;
        opt.horizon = 6;
        opt.drop_d_channel = true;
        const ResponseResult r = data_driven_response(data, {u.leftCols(3), d.leftCols(3), y.leftCols(3)},
                                                      u.rightCols(6), d.rightCols(6), opt);
        CHECK((r.y - y.rightCols(6)).cwiseAbs().maxCoeff() <= 1e-6);
    }

    TEST_CASE("unexciting data is infeasible and reports the rank") {
        const Index T = 50;
        Matrix u = Matrix::Zero(1, T), d = Matrix::Zero(1, T);
        u(0, 0) = 1.0;
        const TrajectoryDataset data(Signal(u, 0.1), Signal(d, 0.1), Signal(Matrix::Zero(1, T), 0.1));
        PredictionOptions opt;
        opt.t_ini = 2;
        opt.horizon = 2;
        try {
            data_driven_response(data, {Matrix::Zero(1, 2), Matrix::Zero(1, 2), Matrix::Zero(1, 2)}, Matrix::Zero(1, 2),
                                 Matrix::Zero(1, 2), opt);
            FAIL("expected InfeasibleError");
        } catch (const InfeasibleError& e) {
            CHECK(e.achieved_rank() >= 0);
            CHECK(e.achieved_rank() < e.required_rank());
        }
    }

    TEST_CASE("prefix of the wrong length is rejected") {
        std::mt19937_64 rng(43);
        oracle::PlantShape s;
        const oracle::Plant pl = oracle::random_plant(rng, s);
        const auto data = oracle::experiment(rng, pl, 80, true);
        PredictionOptions opt;
        opt.t_ini = 3;
        opt.horizon = 2;
        CHECK_THROWS_AS(data_driven_response(data, {Matrix::Zero(1, 2), Matrix::Zero(1, 2), Matrix::Zero(1, 2)},
                                             Matrix::Zero(1, 2), Matrix::Zero(1, 2), opt),
                        std::invalid_argument);
    }
}

TEST_SUITE("predictor matrix") {
    TEST_CASE("shape for the full and lumped layouts") {
        std::mt19937_64 rng(47);
        oracle::PlantShape s;
        s.n = 2;
        s.lumped = true;
        const oracle::Plant pl = oracle::random_plant(rng, s);
        const auto full = predictor_matrix(oracle::experiment(rng, pl, 101, true), 7, false);
        CHECK(full.matrix.rows() == 1);
        CHECK(full.matrix.cols() == 7 * 3 + 2);
        const auto lumped = predictor_matrix(oracle::experiment(rng, pl, 101, false), 7, true);
        CHECK(lumped.matrix.cols() == 7 * 2 + 1);
        CHECK(lumped.layout.current_disturbance_offset() == 14);
    }

    TEST_CASE("causal columns vanish on strictly causal data") {
        std::mt19937_64 rng(53);
        for (int trial = 0; trial < 20; ++trial) {
            oracle::PlantShape s;
            s.n = 1 + trial % 6;
            s.m = 1 + trial % 2;
            s.q = std::min<Index>(1 + (trial / 2) % 2, s.n);
            s.p = std::max<Index>(s.q, 1 + trial % 3);
            const oracle::Plant pl = oracle::random_plant(rng, s);
            const Predictor pr = predictor_matrix(oracle::experiment(rng, pl, 40 * (s.n + 1), true), s.n, false);
            CHECK(pr.causal_column_max <= 1e-10);
            CHECK(pr.warnings.empty());
        }
    }

    TEST_CASE("direct feedthrough on the disturbance raises a warning") {
        // y = x + d: the current disturbance enters the output immediately.
        std::mt19937_64 rng(59);
        const Index T = 80;
        const Matrix u = oracle::gaussian(rng, 1, T), d = oracle::gaussian(rng, 1, T);
        Matrix y(1, T);
        double x = 0.0;
        for (Index k = 0; k < T; ++k) {
            y(0, k) = x + d(0, k);
            x = 0.5 * x + u(0, k);
        }
        const Predictor pr =
            predictor_matrix(TrajectoryDataset(Signal(u, 0.1), Signal(d, 0.1), Signal(y, 0.1)), 2, false);
        CHECK(pr.causal_column_max > 0.5);
        CHECK_FALSE(pr.warnings.empty());
    }

    TEST_CASE("training windows reproduce the recorded next output") {
        std::mt19937_64 rng(61);
        oracle::PlantShape s;
        s.n = 4;
        s.m = 2;
        s.q = 1;
        s.p = 2;
        const oracle::Plant pl = oracle::random_plant(rng, s);
        const auto data = oracle::experiment(rng, pl, 150, true);
        const Index t_ini = 4;
        const Predictor pr = predictor_matrix(data, t_ini, false);
        const auto flat = [](const Matrix& x) { return Eigen::Map<const Vector>(x.data(), x.size()); };
        double worst = 0.0;
        for (Index k = t_ini; k < data.length(); ++k) {
            Vector z(pr.layout.columns());
            z << flat(data.u.samples().middleCols(k - t_ini, t_ini)), flat(data.d.samples().middleCols(k - t_ini, t_ini)),
                flat(data.y.samples().middleCols(k - t_ini, t_ini)), data.u.samples().col(k), data.d.samples().col(k);
            worst = std::max(worst, (pr.matrix * z - data.y.samples().col(k)).cwiseAbs().maxCoeff());
        }
        CHECK(worst <= 1e-8);
    }

    TEST_CASE("rank-truncated predictor keeps the requested rank") {
        std::mt19937_64 rng(67);
        oracle::PlantShape s;
        s.n = 3;
        s.lumped = true;
        const oracle::Plant pl = oracle::random_plant(rng, s);
        const Predictor pr = predictor_matrix(oracle::experiment(rng, pl, 101, false), 7, true, RankMode{3});
        CHECK(pr.retained_rank == 3);
        CHECK(pr.stacked_rank > 3);
    }
}
