#include "nss/dictionary_learning.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nss;

TEST(Schedule, StepAtStrongPhaseBoundary) {
    const LearnConfig cfg;
    auto s = schedule(30.0, cfg);
    EXPECT_DOUBLE_EQ(s.eta, 0.07);
    EXPECT_EQ(s.n_steps, 200);
    s = schedule(60.0, cfg);
    EXPECT_DOUBLE_EQ(s.eta, 0.01);
    EXPECT_EQ(s.n_steps, 32);
    s = schedule(0.0, cfg);
    EXPECT_DOUBLE_EQ(s.eta, 0.07);
    EXPECT_EQ(s.n_steps, 200);
    EXPECT_THROW(schedule(-1.0, cfg), PreconditionError);
    EXPECT_EQ(TrainPhase::at(59.999, cfg).phase, Phase::Strong);
    EXPECT_EQ(TrainPhase::at(60.0, cfg).phase, Phase::Slow);
}

TEST(LearnConfig, Validation) {
    LearnConfig c;
    EXPECT_NO_THROW(c.validate());
    c.eta_slow = 0.1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = LearnConfig{};
    c.batch_size = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = LearnConfig{};
    c.noise_variance = -1;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_EQ(parse_batch_reduction("mean"), BatchReduction::Mean);
    EXPECT_EQ(parse_batch_reduction("sum"), BatchReduction::Sum);
    EXPECT_THROW(parse_batch_reduction("max"), ConfigError);
}

TEST(InitDictionary, UnitColumnsAndDeterministic) {
    const auto a = init_dictionary(120, 120, 7);
    const auto b = init_dictionary(120, 120, 7);
    EXPECT_EQ(a.atoms(), b.atoms());
    for (Eigen::Index j = 0; j < a.atom_count(); ++j) EXPECT_NEAR(a.atoms().col(j).norm(), 1.0, 1e-12);
    EXPECT_NE(init_dictionary(120, 120, 8).atoms(), a.atoms());
}

TEST(DictionaryUpdate, ZeroCodesLeaveDictionaryUnchanged) {
    const auto d = init_dictionary(6, 8, 1);
    Rng rng(1);
    const std::vector<LearningPair> batch{{Vector::Ones(6), Vector::Zero(8)}};
    const auto out = dictionary_update(d, batch, 0.5, 0.0, rng);
    EXPECT_LT((out.atoms() - d.atoms()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DictionaryUpdate, SinglePairMatchesBruteForce) {
    std::mt19937_64 g(4);
    const Matrix d = oracle::random_dictionary(6, 8, g);
    const Vector x = oracle::random_unit(6, g);
    Vector a = Vector::Zero(8);
    a[1] = 0.4;
    a[5] = 0.2;
    Rng rng(1);
    const std::vector<LearningPair> batch{{x, a}};
    const auto out = dictionary_update(Dictionary(d), batch, 0.1, 0.0, rng);
    const Matrix want = oracle::dictionary_step(d, {{x, a}}, 0.1, true);
    EXPECT_LT((out.atoms() - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DictionaryUpdate, BatchReductionModes) {
    std::mt19937_64 g(5);
    const Matrix d = oracle::random_dictionary(5, 7, g);
    std::vector<LearningPair> batch;
    std::vector<std::pair<Vector, Vector>> plain;
    for (int i = 0; i < 4; ++i) {
        Vector a = Vector::Zero(7);
        a[i] = 0.3 + 0.1 * i;
        a[6 - i] += 0.2;
        const Vector x = oracle::random_unit(5, g);
        batch.push_back({x, a});
        plain.emplace_back(x, a);
    }
    Rng rng(1);
    const auto mean = dictionary_update(Dictionary(d), batch, 0.05, 0.0, rng, BatchReduction::Mean);
    const auto sum = dictionary_update(Dictionary(d), batch, 0.05, 0.0, rng, BatchReduction::Sum);
    EXPECT_LT((mean.atoms() - oracle::dictionary_step(d, plain, 0.05, true)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((sum.atoms() - oracle::dictionary_step(d, plain, 0.05, false)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DictionaryUpdate, NoiseIsSeededAndKeepsUnitNorm) {
    const auto d = init_dictionary(10, 12, 3);
    const std::vector<LearningPair> batch{{Vector::Ones(10).normalized(), Vector::Constant(12, 0.1)}};
    Rng r1(42), r2(42);
    const auto a = dictionary_update(d, batch, 0.07, 0.03, r1);
    const auto b = dictionary_update(d, batch, 0.07, 0.03, r2);
    EXPECT_EQ(a.atoms(), b.atoms());
    for (Eigen::Index j = 0; j < a.atom_count(); ++j) EXPECT_NEAR(a.atoms().col(j).norm(), 1.0, 1e-6);

    // With zero codes only the noise moves the atoms; its empirical variance
    // matches the configured value up to the renormalization.
    Matrix big = Matrix::Zero(400, 50);
    for (Eigen::Index j = 0; j < 50; ++j) big(j % 400, j) = 1.0;
    Rng r3(9);
    const auto noisy = dictionary_update(Dictionary(big), std::vector<LearningPair>{{Vector::Zero(400), Vector::Zero(50)}},
                                         0.07, 1e-4, r3);
    // Off-support entries are noise scaled by the column renormalization (~1).
    double ss = 0.0;
    long count = 0;
    for (Eigen::Index j = 0; j < 50; ++j) {
        for (Eigen::Index i = 0; i < 400; ++i) {
            if (i == j) continue;
            ss += noisy.atoms()(i, j) * noisy.atoms()(i, j);
            ++count;
        }
    }
    EXPECT_NEAR(ss / count, 1e-4, 1e-5);
}

TEST(DictionaryUpdate, DimensionMismatchRaises) {
    const auto d = init_dictionary(4, 3, 1);
    Rng rng(1);
    EXPECT_THROW(dictionary_update(d, std::vector<LearningPair>{{Vector::Zero(5), Vector::Zero(3)}}, 0.1, 0, rng),
                 DimensionError);
}

TEST(DictionaryUpdate, CollapsedAtomIsRedrawn) {
    // One step exactly cancels atom 0: D = e0, x = 0, a = [1/eta].
    Matrix m = Matrix::Zero(3, 1);
    m(0, 0) = 1.0;
    Rng rng(2);
    const auto out =
        dictionary_update(Dictionary(m), std::vector<LearningPair>{{Vector::Zero(3), Vector::Constant(1, 1.0)}}, 1.0, 0, rng);
    EXPECT_NEAR(out.atoms().col(0).norm(), 1.0, 1e-12);
}

TEST(DictionaryUpdate, PropertyObjectiveNonIncreasingForSmallEta) {
    std::mt19937_64 g(10);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix truth = oracle::random_dictionary(8, 6, g);
        std::vector<Vector> xs;
        for (int i = 0; i < 8; ++i) {
            Vector c = Vector::Zero(6);
            c[i % 6] = 1.0;
            c[(i + 2) % 6] = 0.5;
            xs.push_back((truth * c).normalized());
        }
        Dictionary d = Dictionary(oracle::random_dictionary(8, 6, g));
        LcaConfig lca;
        lca.neuron = NeuronModel::Continuous;
        lca.n_steps = 400;
        Rng rng(1);
        double previous = std::numeric_limits<double>::infinity();
        for (int epoch = 0; epoch < 15; ++epoch) {
            // Objective at the codes the fixed batch produces.
            std::vector<LearningPair> batch;
            double obj = 0.0;
            for (const auto& x : xs) {
                const auto code = sparse_code(x, d, lca);
                obj += lasso_objective(x, d, code.decoded, lca.lambda);
                batch.push_back({x, code.decoded});
            }
            EXPECT_LE(obj, previous + 1e-6) << "trial " << trial << " epoch " << epoch;
            previous = obj;
            d = dictionary_update(d, batch, 0.01, 0.0, rng);
        }
    }
}
