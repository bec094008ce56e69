#include <doctest.h>

#include "vecctl/gradients.hpp"

using namespace vecctl;

namespace {

const SimTolerance kVar{1e-10, 1e-10};

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 1; i <= n; ++i) out.push_back(a + (b - a) * i / (n + 1.0));
  return out;
}

// Central difference of p(t) in t_k or c_k at a fixed time, by re-simulation.
double fd_p(const EpiParams& q, ReleaseSchedule s, std::size_t k, Perturbation which, double t, double h) {
  const SimTolerance tight{1e-12, 1e-12};
  auto p_at = [&](const ReleaseSchedule& x) {
    return simulate_wb(q, x, default_wb_init(q), tight).state_at(t)[wb::P];
  };
  ReleaseSchedule up = s;
  ReleaseSchedule dn = s;
  if (which == Perturbation::time) {
    up.times[k] += h;
    dn.times[k] -= h;
  } else {
    up.weights[k] += h;
    dn.weights[k] -= h;
  }
  return (p_at(up) - p_at(dn)) / (2.0 * h);
}

}  // namespace

TEST_SUITE("gradients") {
  TEST_CASE("variational and finite-difference gradients agree (small sample)") {
    const auto q = EpiParams::dengue();
    for (auto m : {ModelKind::sit, ModelKind::wb}) {
      for (std::size_t n : {1u, 3u}) {
        const auto s = random_schedule(n, m == ModelKind::sit ? 3e7 : 1e4, 450, 100 + n);
        const auto var = grad_J(m, q, s, kVar);
        const auto fd = grad_J_fd(m, q, s);
        CHECK(gradient_mismatch(var, fd) <= 1.0);
        CHECK(var.method == GradientMethod::variational);
        CHECK(fd.method == GradientMethod::finite_difference);
      }
    }
  }

  TEST_CASE("a release at the horizon has no effect") {
    const auto q = EpiParams::dengue();
    for (auto m : {ModelKind::sit, ModelKind::wb}) {
      const auto s = ReleaseSchedule::from({450.0}, {m == ModelKind::sit ? 1e7 : 5e3}, 450);
      const auto g = grad_J(m, q, s);
      CHECK(g.dJ_dt[0] == 0.0);
      CHECK(g.dJ_dc[0] == 0.0);
    }
  }

  TEST_CASE("causality: variations vanish before the perturbed release") {
    const auto q = EpiParams::dengue();
    const auto s = ReleaseSchedule::from({50.0, 150.0, 250.0}, {1e7, 1e7, 1e7}, 450);
    const auto before = grid(0.0, 150.0, 10);
    for (auto which : {Perturbation::time, Perturbation::weight}) {
      const auto out = sensitivity(ModelKind::sit, q, s, 1, which, before);
      for (const auto& v : out.samples) {
        for (double x : v) CHECK(x == 0.0);
      }
    }
    // Truncating the horizon to the release itself leaves nothing to integrate.
    auto cut = ReleaseSchedule::from({50.0, 150.0}, {1e7, 1e7}, 150.0);
    const auto g = grad_J(ModelKind::sit, q, cut);
    CHECK(g.dJ_dt[1] == 0.0);
    CHECK(g.dJ_dc[1] == 0.0);
  }

  TEST_CASE("variational system is linear in the initial jump") {
    const auto q = EpiParams::dengue();
    const auto s = ReleaseSchedule::from({80.0, 160.0}, {2e7, 1e7}, 450);
    const auto times = grid(80.0, 450.0, 8);
    for (auto m : {ModelKind::sit, ModelKind::wb}) {
      const auto& sched = m == ModelKind::sit ? s : ReleaseSchedule::from({80.0, 160.0}, {5e3, 4e3}, 450);
      for (auto which : {Perturbation::time, Perturbation::weight}) {
        const auto one = sensitivity(m, q, sched, 0, which, times, kVar, 1.0);
        const auto two = sensitivity(m, q, sched, 0, which, times, kVar, 2.0);
        CHECK(two.dJ == doctest::Approx(2.0 * one.dJ).epsilon(1e-9));
        for (std::size_t i = 0; i < times.size(); ++i) {
          for (std::size_t c = 0; c < one.samples[i].size(); ++c) {
            CHECK(two.samples[i][c] == doctest::Approx(2.0 * one.samples[i][c]).epsilon(1e-9).scale(1e-6));
          }
        }
      }
    }
  }

  TEST_CASE("sterile-male variations decay at d_S and match the integrated variation") {
    const auto q = EpiParams::dengue();
    const auto s = ReleaseSchedule::from({40.0, 90.0, 200.0}, {1e7, 2e7, 3e7}, 450);
    const auto times = grid(90.0, 450.0, 12);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        if (times[i] <= s.times[k]) continue;
        const double dt = times[i + 1] - times[i];
        for (auto f : {delta_ms_time, delta_ms_cost}) {
          const double a = f(s, q.d_S, k, times[i]);
          const double b = f(s, q.d_S, k, times[i + 1]);
          CHECK(std::abs(b - a * std::exp(-q.d_S * dt)) <= 1e-10 * std::abs(a));
        }
      }
    }
    CHECK(delta_ms_time(s, q.d_S, 1, 95.0) == doctest::Approx(q.d_S * 2e7 * std::exp(-q.d_S * 5.0)));
    CHECK(delta_ms_cost(s, q.d_S, 1, 95.0) == doctest::Approx(std::exp(-q.d_S * 5.0)));
    CHECK(delta_ms_cost(s, q.d_S, 1, 90.0) == 0.0);

    const auto t = sensitivity(ModelKind::sit, q, s, 1, Perturbation::time, times, kVar);
    const auto c = sensitivity(ModelKind::sit, q, s, 1, Perturbation::weight, times, kVar);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(t.samples[i][sit::M_S] == doctest::Approx(delta_ms_time(s, q.d_S, 1, times[i])).epsilon(1e-6));
      CHECK(c.samples[i][sit::M_S] == doctest::Approx(delta_ms_cost(s, q.d_S, 1, times[i])).epsilon(1e-6));
    }
  }

  TEST_CASE("proportion variations: product formula, integration and finite differences") {
    const auto q = EpiParams::dengue();
    const auto s = ReleaseSchedule::from({30.0, 120.0, 220.0}, {3000.0, 4000.0, 2500.0}, 450);
    const auto traj = simulate_wb(q, s, default_wb_init(q), {1e-12, 1e-12});
    const auto times = grid(120.0, 450.0, 20);
    for (std::size_t k : {0u, 1u}) {
      const auto vt = sensitivity(ModelKind::wb, q, s, k, Perturbation::time, times, kVar);
      const auto vc = sensitivity(ModelKind::wb, q, s, k, Perturbation::weight, times, kVar);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const double pt = delta_p_time(traj, s, q, k, t);
        const double pc = delta_p_cost(traj, s, q, k, t);
        if (t <= s.times[k]) {
          CHECK(pt == 0.0);
          continue;
        }
        CHECK(vt.samples[i][wb::P] == doctest::Approx(pt).epsilon(1e-6));
        CHECK(vc.samples[i][wb::P] == doctest::Approx(pc).epsilon(1e-6));
        CHECK(fd_p(q, s, k, Perturbation::time, t, 1e-4) == doctest::Approx(pt).epsilon(1e-5));
        CHECK(fd_p(q, s, k, Perturbation::weight, t, 1e-1) == doctest::Approx(pc).epsilon(1e-5));
      }
    }
  }

  TEST_CASE("immediate proportion variation in c_k is g(p+) f(p(t)) / f(p+)") {
    const auto q = EpiParams::dengue();
    const auto s = ReleaseSchedule::from({30.0, 120.0}, {3000.0, 4000.0}, 450);
    const auto traj = simulate_wb(q, s, default_wb_init(q), {1e-12, 1e-12});
    const double pk = traj.releases[1].right[wb::P];
    const double t = 200.0;
    const double expect = g_release(pk, q) * f_invasion(traj.state_at(t)[wb::P], q) / f_invasion(pk, q);
    CHECK(delta_p_cost(traj, s, q, 1, t) == doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("a release of size zero still has a size derivative") {
    const auto q = EpiParams::dengue();
    const auto s = ReleaseSchedule::from({30.0, 120.0}, {3000.0, 0.0}, 450);
    const auto traj = simulate_wb(q, s, default_wb_init(q), {1e-12, 1e-12});
    const double pk = traj.releases[1].left[wb::P];
    CHECK(traj.releases[1].right[wb::P] == pk);
    const double t = 300.0;
    const double expect = g_release(pk, q) * f_invasion(traj.state_at(t)[wb::P], q) / f_invasion(pk, q);
    CHECK(delta_p_cost(traj, s, q, 1, t) == doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("product formula refuses a jump onto the threshold; grad_J still works") {
    const auto q = EpiParams::dengue();
    const auto s = ReleaseSchedule::from({0.0}, {big_G(theta(q), q)}, 450);
    const auto traj = simulate_wb(q, s, default_wb_init(q));
    CHECK_THROWS_AS(delta_p_cost(traj, s, q, 0, 100.0), ValidationError);
    const auto g = grad_J(ModelKind::wb, q, s);
    CHECK(std::isfinite(g.dJ_dc[0]));
    CHECK(std::isfinite(g.dJ_dt[0]));
  }

  TEST_CASE("serial and OpenMP gradients are identical") {
    const auto q = EpiParams::dengue();
    const auto s = random_schedule(8, 3e7, 450, 9);
    const auto a = grad_J(ModelKind::sit, q, s, {}, Parallelism::serial);
    const auto b = grad_J(ModelKind::sit, q, s, {}, Parallelism::openmp);
    CHECK(a.dJ_dt == b.dJ_dt);
    CHECK(a.dJ_dc == b.dJ_dc);
  }

  TEST_CASE("requesting only one half leaves the other at zero") {
    const auto q = EpiParams::dengue();
    const auto s = random_schedule(4, 3e7, 450, 4);
    const auto both = grad_J(ModelKind::sit, q, s);
    const auto t = grad_J(ModelKind::sit, q, s, {}, Parallelism::serial, GradientParts::times);
    const auto c = grad_J(ModelKind::sit, q, s, {}, Parallelism::serial, GradientParts::weights);
    CHECK(t.dJ_dt == both.dJ_dt);
    CHECK(c.dJ_dc == both.dJ_dc);
    for (double x : t.dJ_dc) CHECK(x == 0.0);
    for (double x : c.dJ_dt) CHECK(x == 0.0);
  }

  TEST_CASE("finite differences reject a step that cannot fit") {
    const auto q = EpiParams::dengue();
    const auto s = ReleaseSchedule::from({100.0, 100.001, 100.002}, {1e6, 1e6, 1e6}, 450);
    CHECK_THROWS_AS(grad_J_fd(ModelKind::sit, q, s), ValidationError);
  }
}
