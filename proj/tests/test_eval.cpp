#include "nss/eval.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <random>

using namespace nss;

namespace {

std::vector<double> random_train(std::mt19937_64& g, int n, double duration_s) {
    std::uniform_real_distribution<double> u(0.0, duration_s);
    std::vector<double> t(static_cast<std::size_t>(n));
    for (double& v : t) v = u(g);
    std::sort(t.begin(), t.end());
    return t;
}

/// b = a jittered within `jitter_s`, some events dropped, some extras added.
std::vector<double> perturbed(std::mt19937_64& g, const std::vector<double>& a, double jitter_s, double keep,
                              int extra, double duration_s) {
    std::uniform_real_distribution<double> j(-jitter_s, jitter_s), u(0.0, 1.0);
    std::vector<double> b;
    for (double t : a) {
        if (u(g) < keep) b.push_back(t + j(g));
    }
    for (double t : random_train(g, extra, duration_s)) b.push_back(t);
    std::sort(b.begin(), b.end());
    return b;
}

}  // namespace

TEST(AgreementScore, Examples) {
    const SpikeTrain a{0, {1.0, 2.0, 3.0}};
    EXPECT_DOUBLE_EQ(agreement_score(a, a), 1.0);
    EXPECT_DOUBLE_EQ(agreement_score(a, SpikeTrain{1, {1.5, 2.5, 3.5}}), 0.0);
    EXPECT_DOUBLE_EQ(agreement_score(SpikeTrain{0, {1.000, 2.000}}, SpikeTrain{1, {1.0005, 5.000}}), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(agreement_score(SpikeTrain{}, SpikeTrain{}), 0.0);
    // Each event is used at most once.
    EXPECT_DOUBLE_EQ(agreement_score(SpikeTrain{0, {1.0}}, SpikeTrain{1, {0.9996, 1.0003}}), 0.5);
}

TEST(AgreementScore, MatchesOracleAndIsSymmetric) {
    std::mt19937_64 g(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_train(g, 40, 2.0);
        const auto b = perturbed(g, a, 0.0015, 0.8, 10, 2.0);
        const SpikeTrain ta{0, a}, tb{1, b};
        const double s = agreement_score(ta, tb);
        EXPECT_NEAR(s, oracle::agreement(a, b, 1e-3), 1e-12);
        EXPECT_DOUBLE_EQ(s, agreement_score(tb, ta));
    }
}

TEST(MatchEvents, NeverPairsBeyondToleranceAndShiftInvariant) {
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = random_train(g, 30, 1.0);
        const auto b = perturbed(g, a, 0.002, 0.9, 5, 1.0);
        const auto pairs = match_events(a, b, 1e-3);
        std::vector<char> ua(a.size(), 0), ub(b.size(), 0);
        for (const auto& [i, j] : pairs) {
            EXPECT_LE(std::abs(a[i] - b[j]), 1e-3);
            EXPECT_FALSE(ua[i]);
            EXPECT_FALSE(ub[j]);
            ua[i] = ub[j] = 1;
        }
        // Uniform shift of both trains.
        std::vector<double> as = a, bs = b;
        for (double& t : as) t += 64.0;
        for (double& t : bs) t += 64.0;
        EXPECT_EQ(count_coincidences(as, bs, 1e-3), pairs.size());
    }
}

TEST(F1Score, EqualsHarmonicMeanOfPrecisionAndRecall) {
    std::mt19937_64 g(2);
    std::uniform_int_distribution<long> d(0, 500);
    for (int i = 0; i < 1000; ++i) {
        const long tp = d(g) + 1, fn = d(g), fp = d(g);
        const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
        const double f = f1_score(tp, fn, fp);
        EXPECT_NEAR(f, 2.0 * p * r / (p + r), 1e-12);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
    }
    EXPECT_DOUBLE_EQ(f1_score(0, 0, 0), 0.0);
}

TEST(MatchUnits, PerfectSortingAndEmptyInferred) {
    const std::vector<SpikeTrain> gt{{0, {0.1, 0.2, 0.3}}, {1, {0.15, 0.25}}};
    auto r = match_units(gt, gt);
    for (const auto& p : r.pairs) EXPECT_DOUBLE_EQ(p.f1, 1.0);
    EXPECT_DOUBLE_EQ(r.mean_f1(), 1.0);

    r = match_units(gt, {});
    for (const auto& p : r.pairs) {
        EXPECT_EQ(p.inferred_unit, kUnassigned);
        EXPECT_DOUBLE_EQ(p.f1, 0.0);
        EXPECT_DOUBLE_EQ(p.agreement, 0.0);
    }

    r = match_units(gt, {SpikeTrain{4, {}}});
    for (const auto& p : r.pairs) {
        EXPECT_DOUBLE_EQ(p.agreement, 0.0);
        EXPECT_DOUBLE_EQ(p.f1, 0.0);
    }
}

TEST(MatchUnits, AgreesWithExhaustiveAllPairsTable) {
    std::mt19937_64 g(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<SpikeTrain> gt{{0, random_train(g, 20, 1.0)}, {1, random_train(g, 15, 1.0)}};
        std::vector<SpikeTrain> inferred{{0, perturbed(g, gt[0].times, 0.0008, 0.7, 3, 1.0)},
                                         {1, perturbed(g, gt[1].times, 0.0008, 0.6, 4, 1.0)},
                                         {2, random_train(g, 10, 1.0)}};
        if (trial % 2) std::swap(inferred[0], inferred[2]);
        const auto report = match_units(gt, inferred);
        ASSERT_EQ(report.pairs.size(), 2u);
        for (std::size_t i = 0; i < gt.size(); ++i) {
            std::size_t best = 0;
            double best_score = -1.0;
            for (std::size_t j = 0; j < inferred.size(); ++j) {
                const double s = oracle::agreement(gt[i].times, inferred[j].times, 1e-3);
                if (s > best_score) {
                    best_score = s;
                    best = j;
                }
            }
            const auto& p = report.pairs[i];
            EXPECT_EQ(p.inferred_unit, inferred[best].unit_id);
            EXPECT_NEAR(p.agreement, best_score, 1e-12);
            const auto tp = static_cast<long>(oracle::count_matches(gt[i].times, inferred[best].times, 1e-3));
            EXPECT_EQ(p.tp, tp);
            EXPECT_EQ(p.tp + p.fn, static_cast<long>(gt[i].times.size()));
            EXPECT_EQ(p.tp + p.fp, static_cast<long>(inferred[best].times.size()));
            EXPECT_NEAR(p.f1, 2.0 * tp / (2.0 * tp + p.fn + p.fp), 1e-12);
        }
    }
}

TEST(MatchUnits, BestPerUnitAllowsSharingExclusiveDoesNot) {
    const std::vector<SpikeTrain> gt{{0, {0.1, 0.2, 0.3, 0.4}}, {1, {0.1, 0.2, 0.3}}};
    const std::vector<SpikeTrain> inferred{{7, {0.1, 0.2, 0.3, 0.4}}, {8, {0.3}}};
    const auto best = match_units(gt, inferred);
    EXPECT_EQ(best.pairs[0].inferred_unit, 7);
    EXPECT_EQ(best.pairs[1].inferred_unit, 7);
    const auto excl = match_units(gt, inferred, {1.0, MatchMode::Exclusive});
    EXPECT_EQ(excl.pairs[0].inferred_unit, 7);
    EXPECT_EQ(excl.pairs[1].inferred_unit, 8);
    // More GT units than inferred: the leftover row gets no partner.
    const auto short_inf = match_units(gt, {inferred[0]}, {1.0, MatchMode::Exclusive});
    EXPECT_EQ(short_inf.pairs[1].inferred_unit, kUnassigned);
    EXPECT_DOUBLE_EQ(short_inf.pairs[1].f1, 0.0);
}

TEST(MatchUnits, TiesGoToLowerIndex) {
    const std::vector<SpikeTrain> gt{{0, {0.1, 0.2}}};
    const auto r = match_units(gt, {{3, {0.1}}, {4, {0.2}}});
    EXPECT_EQ(r.pairs[0].inferred_unit, 3);
}

TEST(DetectionMetrics, Examples) {
    const std::vector<double> gt{0.1, 0.2, 0.3};
    auto m = detection_metrics(gt, gt);
    EXPECT_DOUBLE_EQ(m.precision, 1.0);
    EXPECT_DOUBLE_EQ(m.fp_rate, 0.0);

    const std::vector<double> det{0.1, 0.5};
    m = detection_metrics({}, det);
    EXPECT_DOUBLE_EQ(m.precision, 0.0);
    EXPECT_TRUE(std::isnan(m.fp_rate));

    m = detection_metrics(gt, {});
    EXPECT_TRUE(std::isnan(m.precision));
    EXPECT_DOUBLE_EQ(m.fp_rate, 0.0);

    m = detection_metrics(gt, det);
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_DOUBLE_EQ(m.fp_rate, 1.0 / 3.0);
}

TEST(ConfusionMatrix, CountsRowsAndColumns) {
    const std::vector<SpikeTrain> gt{{0, {0.1, 0.2}}, {1, {0.3}}};
    const std::vector<LabeledEvent> ev{{0.1, 5}, {0.2, 5}, {0.3, kUnassigned}, {0.9, 6}};
    const auto cm = confusion_matrix(gt, ev);
    ASSERT_EQ(cm.labels, (std::vector<int>{5, 6}));
    ASSERT_EQ(cm.counts.size(), 3u);
    EXPECT_EQ(cm.counts[0], (std::vector<long>{2, 0, 0}));
    EXPECT_EQ(cm.counts[1], (std::vector<long>{0, 0, 1}));
    EXPECT_EQ(cm.counts[2], (std::vector<long>{0, 1, 0}));
    const std::string csv = confusion_to_csv(cm);
    EXPECT_EQ(csv, "gt_unit,label_5,label_6,unassigned\n0,2,0,0\n1,0,0,1\nnoise,0,1,0\n");
}

TEST(EvaluateSorting, ReportJsonHasStableKeysAndNullForNaN) {
    const std::vector<SpikeTrain> gt{{0, {}}};
    const auto r = evaluate_sorting(gt, std::vector<LabeledEvent>{});
    const auto j = nlohmann::ordered_json::parse(report_to_json(r));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"mean_f1", "detection_precision", "detection_fp_rate", "pairs",
                                              "confusion"}));
    EXPECT_TRUE(j["detection_precision"].is_null());
    EXPECT_TRUE(j["detection_fp_rate"].is_null());
    EXPECT_EQ(pairs_to_csv(r).substr(0, 9), "gt_unit,i");
}

TEST(TrainsFromLabels, GroupsAndDropsUnassigned) {
    const std::vector<LabeledEvent> ev{{0.3, 2}, {0.1, 1}, {0.2, kUnassigned}, {0.05, 2}};
    const auto t = trains_from_labels(ev);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0].unit_id, 1);
    EXPECT_EQ(t[1].times, (std::vector<double>{0.05, 0.3}));
    EXPECT_EQ(trains_from_labels(ev, true).size(), 3u);
    EXPECT_EQ(restrict_events(ev, 0.1, 0.3).size(), 2u);
    EXPECT_EQ(restrict_trains(t, 0.2, 1.0)[1].times, (std::vector<double>{0.3}));
}

TEST(SparsityMetrics, Examples) {
    EXPECT_DOUBLE_EQ(sparsity_metrics({}).temporal, 1.0);
    const std::vector<PresentationStats> silent{{10, 32, 0, 0}, {10, 32, 0, 0}};
    EXPECT_DOUBLE_EQ(sparsity_metrics(silent).temporal, 1.0);
    EXPECT_DOUBLE_EQ(sparsity_metrics(silent).spatial, 0.0);
    const std::vector<PresentationStats> full{{10, 32, 320, 10}};
    EXPECT_DOUBLE_EQ(sparsity_metrics(full).temporal, 0.0);
    EXPECT_DOUBLE_EQ(sparsity_metrics(full).spatial, 10.0);
    const std::vector<PresentationStats> mixed{{4, 10, 10, 2}, {4, 10, 0, 0}};
    EXPECT_DOUBLE_EQ(sparsity_metrics(mixed).temporal, 0.5 * (0.75 + 1.0));
    EXPECT_DOUBLE_EQ(sparsity_metrics(mixed).spatial, 1.0);
}

TEST(TemplateCosine, Examples) {
    const std::vector<double> a{1.0, 2.0, -1.0}, b{2.0, -1.0, 0.0}, neg{-1.0, -2.0, 1.0}, zero{0, 0, 0};
    EXPECT_NEAR(template_cosine_similarity(a, a), 1.0, 1e-15);
    EXPECT_NEAR(template_cosine_similarity(a, b), 0.0, 1e-15);
    EXPECT_NEAR(template_cosine_similarity(a, neg), -1.0, 1e-15);
    EXPECT_THROW(template_cosine_similarity(a, zero), PreconditionError);
    EXPECT_THROW(template_cosine_similarity(a, std::vector<double>{1.0}), DimensionError);
}
