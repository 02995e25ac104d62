#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "fmatch/acvf.hpp"
#include "fmatch/estimator.hpp"
#include "fmatch/rng.hpp"
#include "fmatch/selection.hpp"
#include "fmatch/simulation.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fmatch;

namespace {

BootstrapOptions boot(std::size_t b, std::uint64_t seed, bool cv = true, int jobs = 1) {
    BootstrapOptions o;
    o.replicates = b;
    o.seed = seed;
    o.control_variate = cv;
    o.jobs = jobs;
    return o;
}

SeriesSample ar2_data(std::size_t n, std::uint64_t seed) {
    return SeriesSample(simulate_arma(ArmaSpec{{0.75, -0.5}, {}, 1.0}, n, seed));
}

}  // namespace

TEST(LogLoss, Examples) {
    const SeriesSample four(std::vector<double>{1.0, 0.0, 2.0, 1.0});
    EXPECT_NEAR(log_loss(four, 1, 1).value, std::log(1.4), 1e-9);
    EXPECT_NEAR(log_loss(four, 0, 1).value, std::log(1.5), 1e-15);
    EXPECT_EQ(kind_of([] { (void)log_loss(SeriesSample(std::vector<double>(10, 0.0)), 0, 1); }),
              ErrorKind::DegenerateFit);
}

TEST(IdealLogLoss, Examples) {
    const auto ar1 = ar_acvf(ArParams{{0.5}, 1.0}, 10);
    EXPECT_NEAR(ideal_log_loss(ar1, 1, 1), 0.0, 1e-10);
    EXPECT_NEAR(ideal_log_loss(ar1, 0, 1), std::log(4.0 / 3.0), 1e-14);
    const auto ma1 = arma_acvf(ArmaSpec{{}, {0.5}, 1.0}, 12);
    for (std::size_t m = 1; m <= 3; ++m) {
        double prev = ideal_log_loss(ma1, 0, m);
        for (std::size_t p = 1; p <= 5; ++p) {
            const double cur = ideal_log_loss(ma1, p, m);
            EXPECT_LE(cur, prev + 1e-9);
            prev = cur;
        }
    }
}

TEST(ApproxDecrease, RelativeDecreaseTracksLogDecrease) {
    const std::vector<AcvfSeq> truths{arma_acvf(ArmaSpec{{}, {0.5}, 1.0}, 12),
                                      arma_acvf(ArmaSpec{{0.8}, {-0.5}, 1.0}, 12)};
    int small = 0;
    for (const auto& truth : truths) {
        for (std::size_t m = 1; m <= 3; ++m) {
            for (std::size_t p = 0; p < 5; ++p) {
                const auto d = approx_decrease(truth, p, m);
                EXPECT_GE(d.lhs, -1e-9);
                // log(1 + x) = x - x^2/2 + ...
                EXPECT_NEAR(d.lhs, std::log1p(d.rhs), 1e-12);
                if (d.rhs > 1e-12 && d.lhs < 0.05) {
                    ++small;
                    EXPECT_LT(std::abs(d.lhs - d.rhs), 0.1 * d.lhs);
                }
            }
        }
    }
    EXPECT_GT(small, 5);
}

TEST(BootstrapWorld, PoolIsCentered) {
    const auto s = ar2_data(300, 1);
    const auto fit = fit_match(s, 2, 1);
    const auto w = make_bootstrap_world(s, fit);
    EXPECT_EQ(w.residuals.size(), 298u);
    double mean = 0.0;
    double var = 0.0;
    for (double e : w.residuals) mean += e;
    for (double e : w.residuals) var += e * e;
    EXPECT_NEAR(mean / 298.0, 0.0, 1e-14);
    EXPECT_NEAR(w.pool_variance, var / 298.0, 1e-14);
    EXPECT_NEAR(w.truth[0], ar_acvf(ArParams{fit.model.phi, w.pool_variance}, 3)[0], 1e-14);
    EXPECT_EQ(w.truth.max_lag(), 3u);
}

TEST(BootstrapWorld, DegeneratePool) {
    const SeriesSample zero(std::vector<double>(10, 0.0));
    FitResult fit;
    fit.order = 0;
    fit.m = 1;
    EXPECT_EQ(kind_of([&] { (void)make_bootstrap_world(zero, fit); }), ErrorKind::DegenerateFit);
}

TEST(BootstrapSeries, DeterministicAndResampledFromPool) {
    const auto s = ar2_data(200, 2);
    const auto w = make_bootstrap_world(s, fit_match(s, 0, 1));
    const auto a = bootstrap_series(w, 17);
    const auto b = bootstrap_series(w, 17);
    EXPECT_EQ(a.series, b.series);
    EXPECT_EQ(a.innovation_ratio, b.innovation_ratio);
    EXPECT_NE(a.series, bootstrap_series(w, 18).series);
    ASSERT_EQ(a.series.size(), 200u);
    // order 0: every value is a pool member
    for (double v : a.series) {
        EXPECT_NE(std::find(w.residuals.begin(), w.residuals.end(), v), w.residuals.end());
    }
    double ss = 0.0;
    for (double v : a.series) ss += v * v;
    EXPECT_NEAR(a.innovation_ratio, ss / 200.0 / w.pool_variance - 1.0, 1e-12);
}

TEST(BootstrapSeries, ControlVariateHasZeroMean) {
    const auto s = ar2_data(300, 3);
    const auto w = make_bootstrap_world(s, fit_match(s, 2, 1));
    std::vector<double> ratios;
    for (std::uint64_t b = 0; b < 4000; ++b) ratios.push_back(bootstrap_series(w, mix_seed(5, b)).innovation_ratio);
    double mean = 0.0;
    double var = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    for (double r : ratios) var += (r - mean) * (r - mean);
    const double se = std::sqrt(var / static_cast<double>(ratios.size() - 1) / static_cast<double>(ratios.size()));
    EXPECT_LT(std::abs(mean), 4.0 * se);
}

TEST(BootstrapBias, Deterministic) {
    const auto s = ar2_data(300, 4);
    for (bool cv : {true, false}) {
        const auto a = bootstrap_bias(s, 2, 1, boot(1, 9, cv));
        const auto b = bootstrap_bias(s, 2, 1, boot(1, 9, cv));
        EXPECT_EQ(a.bias, b.bias);
        EXPECT_EQ(a.used, 1u);
        const auto c = bootstrap_bias(s, 2, 2, boot(30, 9, cv, 1));
        const auto d = bootstrap_bias(s, 2, 2, boot(30, 9, cv, 4));
        EXPECT_EQ(c.bias, d.bias);
    }
    EXPECT_EQ(kind_of([&] { (void)bootstrap_bias(s, 1, 1, boot(0, 1)); }), ErrorKind::InvalidArgument);
}

TEST(BootstrapBias, EstimatorsAgreeOnAverage) {
    double plain = 0.0;
    double cv = 0.0;
    for (std::uint64_t d = 0; d < 10; ++d) {
        const auto s = SeriesSample(simulate_arma(ArmaSpec{{0.5}, {}, 1.0}, 300, mix_seed(61, d)));
        plain += bootstrap_bias(s, 1, 1, boot(200, d, false)).bias;
        cv += bootstrap_bias(s, 1, 1, boot(200, d, true)).bias;
    }
    EXPECT_NEAR(plain / 10.0, cv / 10.0, 0.004);
}

TEST(BootstrapBias, CalibratedAgainstMonteCarloOptimism) {
    // Oracle: E{L* - L} for AR(1) phi = 0.5, n = 500, m = 1, p = 1, simulated
    // with std::mt19937_64. The true innovations give the same zero-mean
    // control variate as the bootstrap uses.
    const double phi = 0.5;
    const std::size_t n = 500;
    const auto truth = ar_acvf(ArParams{{phi}, 1.0}, 2);
    std::mt19937_64 gen(20240);
    std::normal_distribution<double> z;
    double sum = 0.0;
    const int outer = 1000;
    for (int r = 0; r < outer; ++r) {
        std::vector<double> y(n);
        double prev = 0.0;
        double w = 0.0;
        for (std::size_t t = 0; t < 300 + n; ++t) {
            const double e = z(gen);
            prev = phi * prev + e;
            if (t >= 300) {
                y[t - 300] = prev;
                if (t >= 301) w += e * e;
            }
        }
        const SeriesSample s(y);
        const auto fit = fit_match(s, 1, 1);
        sum += std::log(population_q(truth, fit.model, 1)) - std::log(fit.q_value) + w / (n - 1.0) - 1.0;
    }
    const double c = sum / outer;
    EXPECT_GT(c, 0.0);
    double mean_est = 0.0;
    for (std::uint64_t d = 0; d < 8; ++d) {
        const SeriesSample s(simulate_arma(ArmaSpec{{phi}, {}, 1.0}, n, mix_seed(401, d)));
        const double est = bootstrap_bias(s, 1, 1, boot(200, mix_seed(402, d))).bias;
        EXPECT_GT(est, 0.3 * c) << "dataset " << d;
        EXPECT_LT(est, 3.0 * c) << "dataset " << d;
        mean_est += est / 8.0;
    }
    EXPECT_GT(mean_est, 0.5 * c);
    EXPECT_LT(mean_est, 2.0 * c);
}

TEST(SummarizeBootstrap, SkipLimit) {
    std::vector<ReplicateOutcome> out(10);
    for (std::size_t b = 0; b < 10; ++b) {
        out[b].log_loss = 0.1 * static_cast<double>(b);
        out[b].ideal_log_loss = out[b].log_loss + 0.01;
        out[b].innovation_ratio = b % 2 == 0 ? 0.02 : -0.02;
    }
    out[3].skipped = true;
    out[7].skipped = true;
    const auto est = summarize_bootstrap(out.data(), 10, false);
    EXPECT_EQ(est.used, 8u);
    EXPECT_EQ(est.skipped, 2u);
    EXPECT_NEAR(est.bias, 0.01, 1e-15);
    // skipped 3 and 7 are both odd, so the remaining ratios sum to 5 * 0.02 - 3 * 0.02
    EXPECT_NEAR(summarize_bootstrap(out.data(), 10, true).bias, 0.01 + 0.04 / 8.0, 1e-15);
    out[1].skipped = true;
    EXPECT_EQ(kind_of([&] { (void)summarize_bootstrap(out.data(), 10, true); }), ErrorKind::DegenerateFit);
}

TEST(BootstrapReplicates, ParallelMatchesSerial) {
    const auto s = ar2_data(250, 5);
    std::vector<BootstrapWorld> worlds;
    for (std::size_t p = 0; p <= 3; ++p) worlds.push_back(make_bootstrap_world(s, fit_match(s, p, 2)));
    const auto serial = bootstrap_replicates_serial(worlds, 15, 77, {});
    for (int jobs : {1, 3, 8}) {
        const auto par = bootstrap_replicates(worlds, 15, 77, {}, jobs);
        ASSERT_EQ(par.size(), serial.size());
        for (std::size_t i = 0; i < par.size(); ++i) {
            EXPECT_EQ(par[i].log_loss, serial[i].log_loss);
            EXPECT_EQ(par[i].ideal_log_loss, serial[i].ideal_log_loss);
            EXPECT_EQ(par[i].innovation_ratio, serial[i].innovation_ratio);
            EXPECT_EQ(par[i].skipped, serial[i].skipped);
        }
    }
}

TEST(SelectOrder, TableInvariants) {
    const auto s = ar2_data(400, 6);
    const auto res = select_order(s, 4, 2, boot(40, 3));
    ASSERT_EQ(res.rows.size(), 5u);
    EXPECT_EQ(res.m, 2u);
    EXPECT_EQ(res.replicates, 40u);
    std::size_t argmin = 0;
    for (std::size_t p = 0; p <= 4; ++p) {
        const auto& row = res.rows[p];
        EXPECT_EQ(row.order, p);
        EXPECT_EQ(row.criterion, row.log_loss + row.bias);
        EXPECT_EQ(row.replicates_used + row.replicates_skipped, 40u);
        EXPECT_EQ(row.fit.model.phi.size(), p);
        EXPECT_NEAR(row.log_loss, std::log(row.fit.q_value), 1e-15);
        if (row.criterion < res.rows[argmin].criterion) argmin = p;
    }
    EXPECT_EQ(res.chosen_p, argmin);
    EXPECT_EQ(res.tie_break, "none");
}

TEST(SelectOrder, JobsDoNotChangeResult) {
    const auto s = ar2_data(300, 7);
    const auto a = select_order(s, 3, 1, boot(25, 11, true, 1));
    const auto b = select_order(s, 3, 1, boot(25, 11, true, 4));
    for (std::size_t p = 0; p <= 3; ++p) {
        EXPECT_EQ(a.rows[p].criterion, b.rows[p].criterion);
        EXPECT_EQ(a.rows[p].fit.model.phi, b.rows[p].fit.model.phi);
    }
    EXPECT_EQ(a.chosen_p, b.chosen_p);
}

TEST(SelectOrder, Errors) {
    const SeriesSample ten(simulate_arma(ArmaSpec{{0.5}, {}, 1.0}, 10, 1));
    try {
        (void)select_order(ten, 8, 3, boot(10, 1));
        FAIL() << "expected TooShort";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooShort);
        ASSERT_TRUE(e.required().has_value());
        EXPECT_EQ(*e.required(), 7u);
    }
    EXPECT_EQ(kind_of([&] { (void)select_order(ten, 2, 1, boot(0, 1)); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([&] { (void)select_order(ten, 2, 0, boot(5, 1)); }), ErrorKind::InvalidArgument);
}

TEST(SelectOrder, PenaltyGrowsWithOrder) {
    std::vector<double> mean_bias(5, 0.0);
    for (std::uint64_t d = 0; d < 20; ++d) {
        const SeriesSample s(simulate_arma(ArmaSpec{{}, {}, 1.0}, 300, mix_seed(88, d)));
        const auto res = select_order(s, 4, 1, boot(50, mix_seed(89, d)));
        for (std::size_t p = 0; p <= 4; ++p) mean_bias[p] += res.rows[p].bias / 20.0;
    }
    for (std::size_t p = 1; p <= 4; ++p) EXPECT_GT(mean_bias[p], mean_bias[p - 1]) << "order " << p;
    EXPECT_GT(mean_bias[0], 0.0);
}

TEST(SelectOrder, ModalOrderAgreesWithAic) {
    std::map<std::size_t, int> chosen;
    std::map<std::size_t, int> aic_chosen;
    for (std::uint64_t d = 0; d < 20; ++d) {
        const auto s = ar2_data(500, mix_seed(123, d));
        ++chosen[select_order(s, 4, 1, boot(40, mix_seed(124, d))).chosen_p];
        ++aic_chosen[aic_baseline(s, 4).chosen_p];
    }
    auto mode = [](const std::map<std::size_t, int>& counts) {
        return std::max_element(counts.begin(), counts.end(),
                                [](const auto& a, const auto& b) { return a.second < b.second; })
            ->first;
    };
    EXPECT_EQ(mode(chosen), 2u);
    EXPECT_EQ(mode(aic_chosen), 2u);
}

TEST(AicBaseline, FormulaAndErrors) {
    const auto s = ar2_data(200, 8);
    const auto res = aic_baseline(s, 3);
    ASSERT_EQ(res.aic.size(), 4u);
    std::size_t best = 0;
    for (std::size_t p = 0; p <= 3; ++p) {
        const double want = std::log(fit_ols(s, p).model.sigma2) + 2.0 * static_cast<double>(p) / 200.0;
        EXPECT_DOUBLE_EQ(res.aic[p], want);
        if (res.aic[p] < res.aic[best]) best = p;
    }
    EXPECT_EQ(res.chosen_p, best);
    const SeriesSample five(std::vector<double>{1.0, -1.0, 0.5, 0.2, -0.3});
    EXPECT_EQ(kind_of([&] { (void)aic_baseline(five, 4); }), ErrorKind::TooShort);
}
