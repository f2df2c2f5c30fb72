#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "halfline/errors.hpp"
#include "halfline/estimates.hpp"

using namespace halfline;

namespace {
WaveField gaussian(double step, double c = 10.0) {
  return make_profile("gaussian", {c, 1.0}, uniform_grid(0.0, 2.0 * c, step));
}
const DiscreteHamiltonian& well_box() {
  static const DiscreteHamiltonian H = build_hamiltonian(Potential::square_well(10.0, 1.0), 20.0, 0.02);
  return H;
}
WaveField bump_on(const DiscreteHamiltonian& H) {
  WaveField phi = make_profile("gaussian", {5.0, 1.0}, H.x);
  phi.values(phi.size() - 1) = 0.0;
  return phi;
}
}  // namespace

TEST_CASE("Lp norms of a gaussian") {
  const WaveField g = gaussian(1.0 / 32.0);
  for (double p : {1.0, 4.0 / 3.0, 2.0, 4.0})
    CHECK(lp_norm(g, p) == doctest::Approx(std::pow(std::sqrt(2.0 * M_PI / p), 1.0 / p)).epsilon(1e-10));
  CHECK(lp_norm(g, infinity) == doctest::Approx(1.0));
  WaveField zero = g;
  zero.values.setZero();
  CHECK(lp_norm(zero, 1.0) == 0.0);
  CHECK(lp_norm(zero, infinity) == 0.0);
  CHECK_THROWS_AS(lp_norm(g, 0.5), DomainError);

  // the indicator of [5, 6] converges to 1 under refinement
  double previous = 1e9;
  for (double step : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
    WaveField ind = gaussian(step);
    for (Eigen::Index i = 0; i < ind.size(); ++i) ind.values(i) = (ind.x(i) >= 5.0 - 1e-12 && ind.x(i) <= 6.0 + 1e-12) ? 1.0 : 0.0;
    const double err = std::abs(lp_norm(ind, 1.0) - 1.0);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous <= 1.0 / 32.0 + 1e-12);
}

TEST_CASE("Sobolev norm and trace") {
  const WaveField g = gaussian(1.0 / 64.0);
  const SobolevNorm s = sobolev_norm(g, 2.0);
  CHECK(s.value == doctest::Approx(std::pow(M_PI, 0.25) + std::sqrt(std::sqrt(M_PI) / 2.0)).epsilon(1e-4));
  CHECK(s.trace < 1e-20);
  const WaveField at_origin = make_profile("gaussian", {0.0, 1.0}, uniform_grid(0.0, 10.0, 1.0 / 64.0));
  CHECK(sobolev_norm(at_origin, 1.0).trace == doctest::Approx(1.0));
  // int |d/dx e^{-x^2/2}| over the half-line is 1
  CHECK(sobolev_norm(at_origin, 1.0).value == doctest::Approx(std::sqrt(M_PI / 2.0) + 1.0).epsilon(1e-3));
}

TEST_CASE("exponents and the admissible segment") {
  CHECK(dual_exponent(1.0) == infinity);
  CHECK(dual_exponent(infinity) == 1.0);
  CHECK(dual_exponent(2.0) == doctest::Approx(2.0));
  CHECK(dual_exponent(4.0 / 3.0) == doctest::Approx(4.0));

  const AdmissiblePoint B = AdmissiblePoint::on_segment(0.0), C = AdmissiblePoint::on_segment(1.0);
  CHECK(B.inv_p == 0.5);
  CHECK(B.inv_r == 0.0);
  CHECK(C.inv_p == 0.0);
  CHECK(C.inv_r == 0.25);
  CHECK(B.p() == 2.0);
  CHECK(B.r() == infinity);
  CHECK(C.p() == infinity);
  CHECK(C.r() == 4.0);
  CHECK(B.dual().inv_p == 0.5);
  CHECK(B.dual().inv_r == 1.0);
  CHECK(C.dual().inv_p == 1.0);
  CHECK(C.dual().inv_r == 0.75);
  for (double s = 0.0; s <= 1.0; s += 0.125) {
    CHECK(AdmissiblePoint::on_segment(s).admissible());
    CHECK(AdmissiblePoint::on_segment(s).dual().dual_admissible());
    CHECK_FALSE(AdmissiblePoint::on_segment(s).dual_admissible());
  }
  CHECK_FALSE(AdmissiblePoint{0.3, 0.3}.admissible());
  CHECK_THROWS_AS(AdmissiblePoint::on_segment(1.5), DomainError);
}

TEST_CASE("power-law fit") {
  std::vector<double> t{0.25, 0.5}, y{1.0, 1.0};  // samples below t = 1 are ignored
  for (double tt : default_decay_times()) {
    t.push_back(tt);
    y.push_back(3.0 * std::pow(tt, -0.5));
  }
  const PowerFit f = fit_power_law(t, y);
  CHECK(f.alpha == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.constant == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.residual_rms < 1e-12);
  CHECK(f.samples == 7);
  CHECK_THROWS_AS(fit_power_law({1, 2, 4, 8, 16}, {1, 1, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(fit_power_law({1, 2, 4, 8, 16, 32}, {1, 1, 0, 1, 1, 1}), NumericalError);
  CHECK(default_decay_times() == std::vector<double>{1, 2, 4, 8, 16, 32, 64});
}

TEST_CASE("Strichartz norms") {
  const std::vector<double> times = strichartz_times(64.0);
  CHECK(times.front() == 0.0);
  CHECK(times.back() == doctest::Approx(64.0));
  CHECK(times[1] == 1.0 / 32.0);
  CHECK(times[128] == doctest::Approx(4.0));
  CHECK(times.size() == 220);

  const DiscreteHamiltonian& H = well_box();
  const WaveField phi = bump_on(H);
  const Evolution ev = oracle_evolution(H, Subspace::continuous);
  const std::vector<double> ts = strichartz_times(8.0);
  const std::vector<WaveField> traj = ev(phi, ts);
  const double pc = l2_norm(ev(phi, {0.0}).front());
  const StrichartzValue b = strichartz_norm(traj, AdmissiblePoint::on_segment(0.0), 8.0);
  CHECK(b.value == doctest::Approx(pc).epsilon(1e-10));
  CHECK_FALSE(b.resolution_warning);

  std::vector<WaveField> zero = traj;
  for (auto& u : zero) u.values.setZero();
  CHECK(strichartz_norm(zero, AdmissiblePoint::on_segment(1.0), 8.0).value == 0.0);

  // a trajectory of constant sup norm 2 has L^4_t L^inf_x norm 2 T^{1/4}
  std::vector<WaveField> flat = traj;
  for (auto& u : flat) {
    u.values.setZero();
    u.values(10) = 2.0;
  }
  CHECK(strichartz_norm(flat, AdmissiblePoint::on_segment(1.0), 8.0).value == doctest::Approx(2.0 * std::pow(8.0, 0.25)));
  for (auto& u : flat) u.time = 0.0;
  CHECK_THROWS_AS(strichartz_norm(flat, AdmissiblePoint::on_segment(1.0), 8.0), DomainError);
}

TEST_CASE("Duhamel operator") {
  const DiscreteHamiltonian& H = well_box();
  const WaveField phi = bump_on(H);
  const Evolution ev = oracle_evolution(H, Subspace::continuous);
  const Evolution all = oracle_evolution(H, Subspace::all);
  std::vector<double> taus;
  for (int m = 0; m <= 32; ++m) taus.push_back(m / 32.0);
  const std::vector<WaveField> forcing = all(phi, taus);
  std::vector<WaveField> zero = forcing;
  for (auto& f : zero) f.values.setZero();

  CHECK(l2_norm(duhamel_apply(ev, zero, taus, 1.0)) == 0.0);
  WaveField expected = ev(phi, {1.0}).front();
  expected.values *= 1.0;
  CHECK(relative_l2_error(duhamel_apply(ev, forcing, taus, 1.0), expected) < 1e-10);
  CHECK_THROWS_AS(duhamel_apply(ev, forcing, taus, 0.5), DomainError);
}

TEST_CASE("form bound") {
  const Eigen::VectorXd x = uniform_grid(0.0, 4.0, 1.0 / 128.0);
  std::vector<double> centers;
  for (double c = 0.25; c <= 3.0; c += 0.25) centers.push_back(c);
  const std::vector<double> widths{0.05, 0.1, 0.25, 0.5, 1.0};
  const std::vector<WaveField> family = tent_family(x, centers, widths);
  CHECK(family.size() == centers.size() * widths.size());
  CHECK(l2_norm(family.front()) == doctest::Approx(1.0).epsilon(1e-10));

  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    const FormBoundReport free = form_bound_check(Potential::zero(), family, eps);
    CHECK(free.measured == 0.0);
    CHECK(free.ok());
    const FormBoundReport well = form_bound_check(Potential::square_well(1.0, 1.0), family, eps);
    CHECK(well.local_l1 == doctest::Approx(1.0));
    CHECK(well.bound == doctest::Approx(1.0 + 1.0 / eps));
    CHECK(well.ok());
    if (eps < 0.3) CHECK(well.measured > 0.0);  // tents have |phi'|^2 >= 3 |phi|^2 / w^2 with w <= 1
    for (double lambda : {0.5, 2.0, 8.0}) {
      const FormBoundReport scaled = form_bound_check(Potential::square_well(lambda, 1.0), family, eps);
      CHECK(scaled.local_l1 == doctest::Approx(lambda));
      CHECK(scaled.ok());
    }
  }
  CHECK_THROWS_AS(form_bound_check(Potential::zero(), family, 0.0), DomainError);
}

TEST_CASE("free decay at p = 2 is flat") {
  const WaveField phi = make_profile("xgauss", {1.0}, uniform_grid(0.0, 40.0, 1.0 / 32.0));
  const DecayReport r = decay_fit(Potential::zero(), phi, 2.0, default_decay_times(), DecayOptions{200.0, 4096, true});
  CHECK(std::abs(r.fit.alpha) < 0.02);
  CHECK(r.target == 0.0);
  CHECK(r.norms.size() == 7);
  CHECK(r.worst_trace < 1e-12);
}
