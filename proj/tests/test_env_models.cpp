#include <gtest/gtest.h>

#include <cmath>

#include "purtel/env_models.hpp"
#include "purtel/errors.hpp"
#include "purtel/rng.hpp"

using namespace purtel;

TEST(DephasingModel, RejectsWrongShapes) {
    std::vector<ComplexMatrix> v(3, ComplexMatrix::Zero(2, 2));
    EXPECT_THROW(DephasingModel(2, 2, v), ShapeError);
    v.push_back(ComplexMatrix::Zero(3, 3));
    EXPECT_THROW(DephasingModel(2, 2, v), ShapeError);
}

TEST(DephasingModel, RejectsNonHermitianCouplings) {
    std::vector<ComplexMatrix> v(4, ComplexMatrix::Zero(2, 2));
    v[1](0, 1) = 1.0;
    EXPECT_THROW(DephasingModel(2, 2, v), ValidationError);
}

TEST(ConditionalEvolutions, AreUnitaryAndIdentityAtZeroTime) {
    const DephasingModel model = random_model(3, 4, 17);
    const auto w = conditional_evolutions(model, 1.3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_LT(max_abs(w.w(i, j).adjoint() * w.w(i, j) - ComplexMatrix::Identity(4, 4)), 1e-12);
    const auto w0 = conditional_evolutions(model, 0.0);
    EXPECT_LT(max_abs(w0.w(2, 1) - ComplexMatrix::Identity(4, 4)), 1e-15);
}

TEST(ConditionalEvolutions, RejectsNonUnitaryInput) {
    std::vector<ComplexMatrix> w(4, ComplexMatrix::Identity(2, 2));
    w[3] *= 2.0;
    EXPECT_THROW(ConditionalEvolutions(2, 2, 0.1, w), ValidationError);
}

TEST(Models, CommutingModelHasNoDiagonalDefect) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto w = conditional_evolutions(commuting_model(2, 4, seed), 0.9);
        EXPECT_LT(commutation_defect(w).diagonal, 1e-12);
    }
}

TEST(Models, RandomModelIsGenericallyNonCommuting) {
    const auto w = conditional_evolutions(random_model(2, 4, 3), 0.9);
    EXPECT_GT(commutation_defect(w).diagonal, 1e-3);
    EXPECT_GT(commutation_defect(w).swap_pair, 1e-3);
}

TEST(Models, SwapCommutingModelCommutesOnlyOnTheSwapPair) {
    const auto w = conditional_evolutions(swap_commuting_model(4, 8), 0.9);
    const CommutationDefect defect = commutation_defect(w);
    EXPECT_LT(defect.swap_pair, 1e-12);
    EXPECT_GT(defect.diagonal, 1e-3);
}

TEST(Models, SeedsAreReproducible) {
    const DephasingModel a = random_model(2, 3, 5);
    const DephasingModel b = random_model(2, 3, 5);
    EXPECT_EQ(max_abs(a.v(1, 0) - b.v(1, 0)), 0.0);
}

TEST(EnvironmentState, EveryFamilyIsAValidState) {
    for (auto family : {EnvStateFamily::thermal, EnvStateFamily::mixed, EnvStateFamily::pure}) {
        const DensityMatrix r = environment_state(family, 4, 21);
        EXPECT_EQ(r.dim(), 4u);
        EXPECT_NEAR(r.matrix().trace().real(), 1.0, 1e-12);
    }
    const DensityMatrix pure = environment_state(EnvStateFamily::pure, 4, 21);
    EXPECT_NEAR((pure.matrix() * pure.matrix()).trace().real(), 1.0, 1e-12);
}

TEST(ThermalState, MatchesBoltzmannWeightsOfADiagonalHamiltonian) {
    ComplexMatrix h = ComplexMatrix::Zero(3, 3);
    h(1, 1) = 1.0;
    h(2, 2) = 2.0;
    const DensityMatrix r = thermal_state(h, 0.5);
    const double z = 1.0 + std::exp(-0.5) + std::exp(-1.0);
    EXPECT_NEAR(r(0, 0).real(), 1.0 / z, 1e-14);
    EXPECT_NEAR(r(2, 2).real(), std::exp(-1.0) / z, 1e-14);
}

TEST(Bosons, AnnihilationOperatorLowersFockStates) {
    const ComplexMatrix a = annihilation(4);
    ASSERT_EQ(a.rows(), 5);
    EXPECT_NEAR(a(2, 3).real(), std::sqrt(3.0), 1e-15);
    const ComplexMatrix n = a.adjoint() * a;
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(n(k, k).real(), k, 1e-14);
}

TEST(Bosons, SpecValidation) {
    BosonRegisterSpec spec = BosonRegisterSpec::single_mode(1.0, {0.5, 0.0}, 0.0, 10, 5.0);
    EXPECT_NO_THROW(spec.validate());
    spec.modes[0].omega = -1.0;
    EXPECT_THROW(spec.validate(), ValidationError);
    spec = BosonRegisterSpec::single_mode(1.0, {0.5, 0.0}, 0.0, 100, 5.0);
    spec.modes.push_back(spec.modes[0]);
    EXPECT_THROW(spec.validate(), SizingError);
}

TEST(Bosons, InteractionPictureEvolutionsCommute) {
    const auto spec = BosonRegisterSpec::single_mode(1.0, {0.4, 0.0}, 2.0, 30, 10.0);
    const auto w = boson_interaction_evolutions(spec, 1.7);
    // Displacements along the same ray commute; truncation leaves a small residue at the top levels.
    const BosonRegister reg = boson_register_model(spec);
    const ComplexMatrix c = commutator(w.w(0, 0), w.w(1, 1));
    EXPECT_LT(std::abs((c * reg.thermal.matrix()).trace()), 1e-12);
}

TEST(Bosons, LabFrameEvolutionsDoNotCommute) {
    // The free mode Hamiltonian inside each V_ij spoils commutation of the
    // diagonal conditional evolutions; this is why the register analysis uses
    // the interaction picture.
    const auto spec = BosonRegisterSpec::single_mode(1.0, {0.4, 0.0}, 2.0, 20, 10.0);
    const BosonRegister reg = boson_register_model(spec);
    const auto w = conditional_evolutions(reg.model, 1.7);
    EXPECT_GT(commutation_defect(w).diagonal, 1e-3);
}
