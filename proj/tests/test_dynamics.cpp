#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gsdscope/dynamics.hpp"

using namespace gsdscope;

namespace {

constexpr double kPi = 3.141592653589793;

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("coherent excitation endpoints") {
    const double tau = 19e-6;
    CHECK(coherent_excitation(0.0, tau) == 0.0);
    CHECK(coherent_excitation(kPi / tau, tau) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(coherent_excitation(1.0 / tau, tau) ==
          doctest::Approx(0.22984884706593015).epsilon(1e-12));
    CHECK_THROWS_AS(coherent_excitation(-1.0, tau), DomainError);
}

TEST_CASE("lamb-dicke parameter of the axial mode") {
    const auto trap = TrapSpec::defaults();
    const double k = TransitionSpec::defaults().wavenumber();

    const double eta = lamb_dicke(k, trap.mass, trap.omega_z);
    CHECK(eta == doctest::Approx(0.11112816621856236).epsilon(1e-12));
    CHECK(lamb_dicke(k / std::sqrt(2.0), trap.mass, trap.omega_z) ==
          doctest::Approx(0.07857947991397125).epsilon(1e-12));
    // Stiffer confinement: quadrupling the mode frequency halves eta.
    CHECK(lamb_dicke(k, trap.mass, 4.0 * trap.omega_z) ==
          doctest::Approx(0.5 * eta).epsilon(1e-14));
    CHECK_THROWS_AS(lamb_dicke(-k, trap.mass, trap.omega_z), DomainError);
}

TEST_CASE("dephasing parameter from the mode occupations") {
    const auto trap = TrapSpec::defaults();
    const double k = TransitionSpec::defaults().wavenumber();
    const std::array<double, 3> axial{0.0, 0.0, k};

    CHECK(dephasing_beta(trap, ThermalState(0, 0, 0), axial).beta == 0.0);

    const ThermalState hot(0, 0, 10);
    const auto sq = dephasing_beta(trap, hot, axial, BetaVariant::EtaSquared);
    CHECK(sq.beta == doctest::Approx(0.12349469327100425).epsilon(1e-12));
    CHECK(sq.beta == doctest::Approx(0.1232).epsilon(5e-3));
    CHECK(sq.per_mode[0] + sq.per_mode[1] + sq.per_mode[2] ==
          doctest::Approx(sq.beta).epsilon(1e-14));

    const auto lin = dephasing_beta(trap, hot, axial, BetaVariant::EtaLinear);
    CHECK(lin.beta == doctest::Approx(1.1112816621856236).epsilon(1e-12));
    CHECK(lin.beta == doctest::Approx(1.11).epsilon(5e-3));
}

TEST_CASE("thermal response reduces to the coherent one without dephasing") {
    const double tau = 19e-6;
    const DephasingBeta none{};
    for (int i = 0; i <= 40; ++i) {
        const double omega = i * 0.25 * kPi / tau;
        CHECK(std::abs(thermal_excitation(omega, tau, none) -
                       coherent_excitation(omega, tau)) < 1e-14);
    }
}

TEST_CASE("thermal response saturates to one half under strong dephasing") {
    DephasingBeta strong;
    strong.beta = 1e8;
    CHECK(thermal_excitation(kPi / 19e-6, 19e-6, strong) ==
          doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("thermal response at pi phase with weak dephasing") {
    DephasingBeta weak;
    weak.beta = 0.1232;
    const double tau = 19e-6;
    CHECK(thermal_excitation(kPi / tau, tau, weak) ==
          doctest::Approx(0.934857016775472).epsilon(1e-12));
}

TEST_CASE("thermal response stays a probability inside the contrast envelope") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double omega = u(rng) * 4e6;
        const double tau = u(rng) * 40e-6;
        DephasingBeta beta;
        beta.beta = u(rng) * 3.0;
        const double p = thermal_excitation(omega, tau, beta);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        const double pb = omega * tau * beta.beta;
        CHECK(std::abs(p - 0.5) <= 0.5 / std::sqrt(1.0 + pb * pb) + 1e-12);
    }
}

TEST_CASE("contrast at integer pi phases decays with the dephasing") {
    const double tau = 19e-6;
    for (double phi : {kPi, 2.0 * kPi}) {
        double prev = 1.0;
        for (double b : {0.0, 0.1, 0.3, 0.7, 1.5, 4.0}) {
            DephasingBeta beta;
            beta.beta = b;
            const double contrast = std::abs(thermal_excitation(phi / tau, tau, beta) - 0.5);
            if (b > 0.0) CHECK(contrast < prev);
            prev = contrast;
        }
    }
}

TEST_CASE("fock-basis average matches the coherent response in the ground state") {
    const auto trap = TrapSpec::defaults();
    const double k = TransitionSpec::defaults().wavenumber();
    const std::array<double, 3> proj{0.5 * k, 0.5 * k, k / std::sqrt(2.0)};
    const ThermalState cold(0, 0, 0);
    const double tau = 19e-6;
    const double omega = 1.3 / tau;

    const double zero = thermal_excitation_fock_oracle(omega, tau, trap, cold, proj, 0);
    const double big = thermal_excitation_fock_oracle(omega, tau, trap, cold, proj, 100);
    CHECK(zero == big);
    CHECK(zero == doctest::Approx(coherent_excitation(omega, tau)).epsilon(1e-12));
}

TEST_CASE("fock-basis average agrees with the closed form at moderate dephasing") {
    // Single hot mode with eta = 0.1, nbar = 5, pi pulse at the carrier.
    const auto trap = TrapSpec::defaults();
    const double k_unit = lamb_dicke(1.0, trap.mass, trap.omega_z);
    const std::array<double, 3> proj{0.0, 0.0, 0.1 / k_unit};
    const ThermalState state(0, 0, 5);
    const double tau = 19e-6;
    const double omega = kPi / tau;

    const auto beta = dephasing_beta(trap, state, proj, BetaVariant::EtaSquared);
    const double closed = thermal_excitation(omega, tau, beta);
    CHECK(closed == doctest::Approx(0.9879600679153666).epsilon(1e-12));

    const double fock = thermal_excitation_fock_oracle(omega, tau, trap, state, proj, 400);
    CHECK(std::abs(fock - closed) < 2e-2);
}

TEST_CASE("fock-basis average needs enough thermal weight") {
    const auto trap = TrapSpec::defaults();
    const double k = TransitionSpec::defaults().wavenumber();
    const std::array<double, 3> proj{0.0, 0.0, k};
    CHECK_THROWS_AS(thermal_excitation_fock_oracle(1e5, 19e-6, trap, ThermalState(0, 0, 50),
                                                   proj, 10),
                    AccuracyError);
}

TEST_CASE("sideband ratio of a thermal state") {
    CHECK(sideband_excitation_ratio(0.0) == 0.0);
    CHECK(sideband_excitation_ratio(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sideband_excitation_ratio(1.1) ==
          doctest::Approx(0.5238095238095238).epsilon(1e-14));
    CHECK_THROWS_AS(sideband_excitation_ratio(-0.5), DomainError);
}

TEST_CASE("occupation recovery inverts the sideband ratio") {
    CHECK(nbar_from_sideband_ratio(0.0, 0.4).nbar == 0.0);
    CHECK(nbar_from_sideband_ratio(0.5238, 1.0).nbar ==
          doctest::Approx(1.0999580008399834).epsilon(1e-12));

    for (double nbar : {0.0, 0.3, 1.1, 10.0, 100.0}) {
        for (double q : {0.2, 0.65, 1.0}) {
            const double r = q * sideband_excitation_ratio(nbar);
            const double back = nbar_from_sideband_ratio(r, q).nbar;
            CHECK(back == doctest::Approx(nbar).epsilon(1e-12).scale(1.0));
        }
    }

    CHECK_THROWS_AS(nbar_from_sideband_ratio(0.5, 0.5), DomainError);
    CHECK_THROWS_AS(nbar_from_sideband_ratio(0.6, 0.5), DomainError);
}

TEST_CASE("occupation estimate propagates measurement noise") {
    const Measurement red{0.3, 0.01};
    const Measurement blue{0.6, 0.01};
    const auto est = nbar_from_sideband_ratio(red, blue);
    CHECK(est.nbar == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.sigma > 0.0);
    // Noise-free inputs carry no uncertainty.
    CHECK(nbar_from_sideband_ratio(0.3, 0.6).sigma == 0.0);
}

TEST_CASE("binomial measurement uncertainty") {
    const auto m = binomial_measurement(0.5, 100);
    CHECK(m.value == 0.5);
    CHECK(m.sigma == doctest::Approx(0.05).epsilon(1e-14));
    // Degenerate outcomes keep a resolution floor of half a count.
    CHECK(binomial_measurement(0.0, 100).sigma == doctest::Approx(0.005).epsilon(1e-14));
    CHECK_THROWS_AS(binomial_measurement(1.5, 100), DomainError);
    CHECK_THROWS_AS(binomial_measurement(0.5, 0), DomainError);
}

} // TEST_SUITE
