#include "oracles.hpp"

#include "qrc/state_vector.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace qrc;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<Complex> amps(const StateVector& s)
{
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

StateVector basis(int n, std::size_t index)
{
    std::vector<Complex> v(std::size_t{1} << n, 0.0);
    v[index] = 1.0;
    return StateVector(std::move(v));
}

} // namespace

TEST_CASE("zero state has a single unit amplitude", "[qsim-state]")
{
    for (int n : {1, 2, 4}) {
        const StateVector s = new_zero_state(n);
        REQUIRE(s.size() == (std::size_t{1} << n));
        CHECK(s[0] == Complex(1.0, 0.0));
        for (std::size_t i = 1; i < s.size(); ++i)
            CHECK(s[i] == Complex(0.0, 0.0));
    }
    CHECK_THROWS_AS(new_zero_state(0), std::invalid_argument);
    CHECK_THROWS_AS(new_zero_state(13), std::invalid_argument);
}

TEST_CASE("state constructor validates length and norm", "[qsim-state]")
{
    CHECK_THROWS_AS(StateVector(std::vector<Complex>(3, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(std::vector<Complex>{1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("single-qubit gate examples", "[qsim-state]")
{
    const double r = 1.0 / std::sqrt(2.0);
    const StateVector plus = apply_1q(new_zero_state(1), gates::hadamard(), 0);
    CHECK_THAT(std::abs(plus[0] - r), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(plus[1] - r), WithinAbs(0.0, 1e-15));

    const StateVector one = apply_1q(new_zero_state(1), gates::rot_y(std::numbers::pi), 0);
    CHECK_THAT(std::abs(one[0]), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(one[1] - Complex(1.0, 0.0)), WithinAbs(0.0, 1e-15));

    const double theta = 0.7;
    const StateVector phase = apply_1q(new_zero_state(1), gates::rot_z(theta), 0);
    CHECK_THAT(std::abs(phase[0] - std::polar(1.0, -theta / 2)), WithinAbs(0.0, 1e-15));
    CHECK(phase[1] == Complex(0.0, 0.0));
}

TEST_CASE("apply_1q rejects bad targets and non-unitary gates", "[qsim-state]")
{
    CHECK_THROWS_AS(apply_1q(new_zero_state(2), gates::hadamard(), 2), std::invalid_argument);
    CHECK_THROWS_AS(apply_1q(new_zero_state(2), gates::hadamard(), -1), std::invalid_argument);
    const std::array<Complex, 4> bad{1.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(apply_1q(new_zero_state(1), GateMatrix(2, bad), 0), std::invalid_argument);
    CHECK_THROWS_AS(apply_1q(new_zero_state(2), gates::cnot(), 0), std::invalid_argument);
}

TEST_CASE("CNOT truth table and Bell state", "[qsim-state]")
{
    // |10> is index 2 because qubit 0 is the most significant bit.
    const StateVector s = apply_cnot(basis(2, 2), 0, 1);
    CHECK(s[3] == Complex(1.0, 0.0));
    const StateVector z = apply_cnot(new_zero_state(2), 0, 1);
    CHECK(z[0] == Complex(1.0, 0.0));

    const StateVector bell = apply_cnot(apply_1q(new_zero_state(2), gates::hadamard(), 0), 0, 1);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK_THAT(bell[0].real(), WithinAbs(r, 1e-15));
    CHECK_THAT(bell[3].real(), WithinAbs(r, 1e-15));
    CHECK_THAT(std::abs(bell[1]) + std::abs(bell[2]), WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(apply_cnot(new_zero_state(2), 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(apply_cnot(new_zero_state(2), 0, 2), std::invalid_argument);
}

TEST_CASE("rot_zyz composition", "[qsim-state]")
{
    CHECK(gates::rot_zyz(0, 0, 0).distance(GateMatrix::identity(2)) < 1e-15);
    CHECK(gates::rot_zyz(0, std::numbers::pi, 0).distance(gates::rot_y(std::numbers::pi)) < 1e-15);

    const double a = std::numbers::pi / 2, b = std::numbers::pi / 3, c = std::numbers::pi / 4;
    // Explicit 2x2 product of the closed-form factors, rightmost applied first.
    const oracle::Dense expected
      = oracle::matmul(oracle::from_gate(oracle::rz(c)), oracle::matmul(oracle::from_gate(oracle::ry(b)), oracle::from_gate(oracle::rz(a))));
    const GateMatrix got = gates::rot_zyz(a, b, c);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::abs(got(i, j) - expected(i, j)) < 1e-15);
    CHECK(got.is_unitary(1e-12));
}

TEST_CASE("Pauli-Z expectation examples", "[qsim-state]")
{
    CHECK(pauli_z_expectation(new_zero_state(1), 0) == 1.0);
    CHECK(pauli_z_expectation(basis(1, 1), 0) == -1.0);
    CHECK_THAT(pauli_z_expectation(apply_1q(new_zero_state(1), gates::hadamard(), 0), 0), WithinAbs(0.0, 1e-15));
    CHECK_THROWS_AS(pauli_z_expectation(new_zero_state(2), 2), std::invalid_argument);
}

TEST_CASE("statevector gates agree with the Kronecker-product oracle", "[qsim-state][oracle]")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const std::vector<Complex> v = oracle::random_state(n, rng);
            const std::vector<GateMatrix> singles{
              gates::hadamard(), gates::rot_y(angle(rng)), gates::rot_z(angle(rng)), gates::x90(),
              gates::rot_zyz(angle(rng), angle(rng), angle(rng))};
            for (const auto& g : singles) {
                for (int q = 0; q < n; ++q) {
                    const auto got = amps(apply_1q(StateVector(v), g, q));
                    const auto want = oracle::matvec(oracle::embed_1q(g, q, n), v);
                    worst = std::max(worst, oracle::max_diff(got, want));
                }
            }
            for (int c = 0; c < n; ++c)
                for (int t = 0; t < n; ++t) {
                    if (c == t)
                        continue;
                    const auto got = amps(apply_cnot(StateVector(v), c, t));
                    const auto want = oracle::matvec(oracle::cnot_matrix(c, t, n), v);
                    worst = std::max(worst, oracle::max_diff(got, want));
                }
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("gate factories match closed forms", "[qsim-state]")
{
    for (double t : {-2.5, -0.3, 0.0, 1.1, 3.0}) {
        CHECK(gates::rot_y(t).distance(oracle::ry(t)) < 1e-15);
        CHECK(gates::rot_z(t).distance(oracle::rz(t)) < 1e-15);
    }
    CHECK(gates::hadamard().distance(oracle::hadamard()) < 1e-15);
}

TEST_CASE("norm preservation, unitarity round-trip and commutation", "[qsim-state][property]")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_int_distribution<int> qubit(0, 3);
    for (int trial = 0; trial < 50; ++trial) {
        StateVector s(oracle::random_state(4, rng));
        std::vector<std::pair<GateMatrix, int>> applied;
        for (int step = 0; step < 30; ++step) {
            const int q = qubit(rng);
            if (step % 3 == 2) {
                const int t = (q + 1 + qubit(rng) % 3) % 4;
                s = apply_cnot(std::move(s), q, t);
            } else {
                const GateMatrix g = gates::rot_zyz(angle(rng), angle(rng), angle(rng));
                s = apply_1q(std::move(s), g, q);
                s = apply_1q(std::move(s), g.adjoint(), q);
            }
            REQUIRE(std::abs(s.norm_squared() - 1.0) < 1e-12);
            for (int z = 0; z < 4; ++z) {
                const double e = pauli_z_expectation(s, z);
                REQUIRE(e >= -1.0);
                REQUIRE(e <= 1.0);
            }
        }

        const GateMatrix g0 = gates::rot_zyz(angle(rng), angle(rng), angle(rng));
        const GateMatrix g1 = gates::rot_zyz(angle(rng), angle(rng), angle(rng));
        const auto ab = amps(apply_1q(apply_1q(s, g0, 0), g1, 2));
        const auto ba = amps(apply_1q(apply_1q(s, g1, 2), g0, 0));
        CHECK(oracle::max_diff(ab, ba) < 1e-12);
    }
}

TEST_CASE("gate then adjoint restores the state", "[qsim-state][property]")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (int trial = 0; trial < 100; ++trial) {
        const StateVector s(oracle::random_state(3, rng));
        const GateMatrix g = gates::rot_zyz(angle(rng), angle(rng), angle(rng));
        const int q = trial % 3;
        const auto back = amps(apply_1q(apply_1q(s, g, q), g.adjoint(), q));
        CHECK(oracle::max_diff(back, amps(s)) < 1e-12);
    }
}

TEST_CASE("run_circuit applies gates in list order", "[qsim-state]")
{
    const Circuit c{Gate::h(0), Gate::cx(0, 1), Gate::ry(1, 0.4), Gate::rz(0, -0.9), Gate::rot(1, 0.1, 0.2, 0.3)};
    StateVector manual = new_zero_state(2);
    manual = apply_1q(std::move(manual), gates::hadamard(), 0);
    manual = apply_cnot(std::move(manual), 0, 1);
    manual = apply_1q(std::move(manual), gates::rot_y(0.4), 1);
    manual = apply_1q(std::move(manual), gates::rot_z(-0.9), 0);
    manual = apply_1q(std::move(manual), gates::rot_zyz(0.1, 0.2, 0.3), 1);
    CHECK(oracle::max_diff(amps(run_circuit(c, new_zero_state(2))), amps(manual)) < 1e-15);
}
