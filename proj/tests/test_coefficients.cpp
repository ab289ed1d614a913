#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "elc/coefficients.hpp"
#include "elc/errors.hpp"
#include "elc/linstab.hpp"

using namespace elc;

namespace {

const LeslieCoefficients sphere = LeslieCoefficients::from_array({0.0, -0.5, 0.5, 1.0, 0.2, 0.2});
const LeslieCoefficients unstable1 = LeslieCoefficients::from_array({0.0, 0.5, 1.35, 0.05, 0.0, 1.0});
const LeslieCoefficients case2 = LeslieCoefficients::from_array({0.0, -0.6, 0.4, 1.0, 0.3, 0.5});

double eigen_margin(const LeslieCoefficients& mu) {
    const double cross = -(mu.lambda2() - mu.mu2 - mu.mu3) / 2.0;
    Eigen::Matrix2d m;
    m << -mu.lambda1(), cross, cross, mu.mu5 + mu.mu6;
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues()(0);
}

}  // namespace

TEST(DeriveConstants, UnstableFixture) {
    const DerivedConstants c = derive_constants(unstable1);
    EXPECT_DOUBLE_EQ(c.lambda1, -0.85);
    EXPECT_DOUBLE_EQ(c.lambda2, -1.0);
    EXPECT_DOUBLE_EQ(c.parodi_defect, 0.85);
    ASSERT_TRUE(c.alpha);
    EXPECT_NEAR(*c.alpha, 0.5 * (1.0 - 1.0 / 0.85), 1e-15);
}

TEST(DeriveConstants, RodLike) {
    const auto mu = LeslieCoefficients::from_array({0.0, -1.0, 0.0, 0.0, 1.0, 0.0});
    const DerivedConstants c = derive_constants(mu);
    EXPECT_EQ(c.lambda1, -1.0);
    EXPECT_EQ(c.lambda2, 1.0);
}

TEST(DeriveConstants, ZeroCoefficientsHaveNoShapeParameter) {
    const DerivedConstants c = derive_constants(LeslieCoefficients{});
    EXPECT_EQ(c.lambda1, 0.0);
    EXPECT_EQ(c.lambda2, 0.0);
    EXPECT_EQ(c.parodi_defect, 0.0);
    EXPECT_FALSE(c.alpha);
}

TEST(ClassifyRegime, Fixtures) {
    EXPECT_EQ(classify_regime(sphere).tag, RegimeTag::CaseI);
    EXPECT_EQ(classify_regime(unstable1).tag, RegimeTag::Neither);
    EXPECT_EQ(classify_regime(case2).tag, RegimeTag::CaseII);
    EXPECT_NEAR(case2.parodi_defect(), -0.4, 1e-15);
}

TEST(ClassifyRegime, ScaleInvariant) {
    for (double c : {1e-3, 0.5, 2.0, 1e3}) {
        EXPECT_EQ(classify_regime(sphere.scaled(c)).tag, RegimeTag::CaseI);
        EXPECT_EQ(classify_regime(case2.scaled(c)).tag, RegimeTag::CaseII);
        EXPECT_EQ(classify_regime(unstable1.scaled(c)).tag, RegimeTag::Neither);
    }
}

TEST(ClassifyRegime, ToleranceOverride) {
    LeslieCoefficients mu = sphere;
    mu.mu6 += 1e-9;
    EXPECT_NE(classify_regime(mu).tag, RegimeTag::CaseI);
    EXPECT_EQ(classify_regime(mu, 1e-6).tag, RegimeTag::CaseI);
}

TEST(ClassifyRegime, ParodiMatchesQEqualsTwoP) {
    // q(theta) - 2 p(theta) is proportional to the Parodi defect.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(0.0, M_PI / 2);
    for (const auto& mu : {sphere, unstable1, case2}) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Gpq c = gpq(th(rng), mu);
            worst = std::max(worst, std::abs(c.q - 2.0 * c.p));
        }
        EXPECT_EQ(worst <= 1e-12, satisfies_parodi(mu));
    }
}

TEST(DissipationMargin, Examples) {
    auto mu = LeslieCoefficients::from_array({0.0, -0.5, 0.5, 1.0, 0.5, 0.5});
    EXPECT_NEAR(dissipation_margin(mu), 1.0, 1e-15);
    EXPECT_NEAR(dissipation_margin(sphere), 0.4, 1e-15);
    // Boundary: |l2 - mu2 - mu3| = 2 sqrt(-l1) sqrt(mu5 + mu6).
    mu = LeslieCoefficients::from_array({0.0, -0.5, 0.5, 1.0, 0.5, 0.5});
    mu.mu2 = -0.5 + 1.0;
    mu.mu3 = 0.5 + 1.0;  // l1 = -1, mu2 + mu3 = 2, l2 = 0, so cross term = 2 = 2 * 1 * 1
    EXPECT_NEAR(dissipation_margin(mu), 0.0, 1e-15);
}

TEST(DissipationMargin, MatchesEigenvalueOracle) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        LeslieCoefficients mu = LeslieCoefficients::from_array({0.1, u(rng), u(rng), 1.0, u(rng), u(rng)});
        if (!(mu.lambda1() < 0.0) || mu.mu5 + mu.mu6 < 0.0) {
            EXPECT_THROW(dissipation_margin(mu), DomainError);
            continue;
        }
        EXPECT_NEAR(dissipation_margin(mu), eigen_margin(mu), 1e-12);
        if (dissipation_margin(mu) > 0.0) EXPECT_NE(classify_regime(mu).tag, RegimeTag::Neither);
    }
}

TEST(DissipationMargin, NamesViolatedCondition) {
    try {
        dissipation_margin(LeslieCoefficients::from_array({0.0, 1.0, 0.0, 1.0, 0.0, 0.0}));
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("lama1a"), std::string::npos);
    }
}

TEST(SimulationAdmissible, RejectsBadSigns) {
    EXPECT_NO_THROW(require_simulation_admissible(sphere));
    auto mu = sphere;
    mu.mu3 = mu.mu2;
    EXPECT_THROW(require_simulation_admissible(mu), DomainError);
    mu = sphere;
    mu.mu4 = 0.0;
    EXPECT_THROW(require_simulation_admissible(mu), DomainError);
    mu = sphere;
    mu.mu1 = -0.1;
    EXPECT_THROW(require_simulation_admissible(mu), DomainError);
    mu = sphere;
    mu.eps_penalty = 0.0;
    EXPECT_THROW(require_simulation_admissible(mu), DomainError);
}

TEST(SimplifiedModel, NamedShapes) {
    LeslieCoefficients base;
    base.mu4 = 0.7;
    const auto rod = simplified_model(MoleculeShape::RodLike, -1.0, base);
    EXPECT_DOUBLE_EQ(rod.mu2, -1.0);
    EXPECT_DOUBLE_EQ(rod.mu3, 0.0);
    EXPECT_DOUBLE_EQ(rod.lambda2(), 1.0);
    EXPECT_DOUBLE_EQ(rod.mu5, 1.0);
    EXPECT_DOUBLE_EQ(rod.mu6, 0.0);
    EXPECT_DOUBLE_EQ(rod.mu4, 0.7);

    const auto sph = simplified_model(MoleculeShape::SphereLike, -1.0, base);
    EXPECT_DOUBLE_EQ(sph.mu2, -0.5);
    EXPECT_DOUBLE_EQ(sph.mu3, 0.5);
    EXPECT_DOUBLE_EQ(sph.mu5, 0.0);
    EXPECT_DOUBLE_EQ(sph.mu6, 0.0);

    const auto disc = simplified_model(MoleculeShape::DiscLike, -1.0, base);
    EXPECT_DOUBLE_EQ(disc.mu2, 0.0);
    EXPECT_DOUBLE_EQ(disc.mu3, 1.0);
    EXPECT_DOUBLE_EQ(disc.lambda2(), -1.0);
}

TEST(SimplifiedModel, CriticalLambda2AndParodi) {
    for (auto kind : {MoleculeShape::RodLike, MoleculeShape::DiscLike, MoleculeShape::SphereLike})
        for (double l1 : {-0.3, -1.0, -2.5}) {
            const auto mu = simplified_model(kind, l1, LeslieCoefficients{});
            EXPECT_NEAR(mu.lambda2() * mu.lambda2(), -mu.lambda1() * (mu.mu5 + mu.mu6), 1e-14);
            EXPECT_TRUE(satisfies_parodi(mu));
            EXPECT_EQ(mu.mu1, 0.0);
        }
    EXPECT_THROW(simplified_model(MoleculeShape::RodLike, 0.0, LeslieCoefficients{}), DomainError);
}

TEST(SimplifiedModel, ShapeNamesRoundTrip) {
    for (auto kind : {MoleculeShape::RodLike, MoleculeShape::DiscLike, MoleculeShape::SphereLike})
        EXPECT_EQ(molecule_shape_from_string(to_string(kind)), kind);
    EXPECT_THROW(molecule_shape_from_string("banana"), UsageError);
}
