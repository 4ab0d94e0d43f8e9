#include <doctest.h>

#include "fplinq/errors.hpp"
#include "fplinq/schedulers.hpp"
#include "support.hpp"

using namespace fplinq;
using namespace fplinq::sched;
using net::kUnscheduled;

namespace {

Eigen::MatrixXd db_gains(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd g(rows.size(), rows.begin()->size());
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double x : row) g(r, c++) = std::pow(10.0, x / 10.0);
    ++r;
  }
  return g;
}

std::vector<int> scheduled_links(const Schedule& s) {
  std::vector<int> out;
  for (int j = 0; j < s.size(); ++j) {
    if (s[j] != kUnscheduled) out.push_back(j);
  }
  return out;
}

}  // namespace

TEST_CASE("tin_check in dB exponents") {
  // SNR 30 dB, INRs 10 dB each way: 30 >= 10 + 10.
  const Eigen::MatrixXd ok = db_gains({{30, 10}, {10, 30}});
  CHECK(tin_check(0, {0, 1}, ok));
  CHECK(tin_check(1, {0, 1}, ok));
  // INRs 16 dB each way: 30 < 32.
  const Eigen::MatrixXd bad = db_gains({{30, 16}, {16, 30}});
  CHECK_FALSE(tin_check(0, {0, 1}, bad));
  // A lone link always passes; gains below 0 dB clip to 0.
  CHECK(tin_check(0, {0}, bad));
  const Eigen::MatrixXd weak = db_gains({{3, -10}, {-10, 3}});
  CHECK(tin_check(0, {0, 1}, weak));
  // Only the strongest interferer in each direction counts.
  const Eigen::MatrixXd three = db_gains({{30, 10, 14}, {12, 30, 0}, {10, 0, 30}});
  CHECK(tin_check(0, {0, 1, 2}, three));  // 30 >= max(12, 10) + max(10, 14) = 26
}

TEST_CASE("normalized gains and beams from power") {
  Eigen::MatrixXd g(2, 2);
  g << 4.0, 1.0, 2.0, 8.0;
  const auto net = testing::scalar_instance(g, 1.0, 0.5);
  Eigen::VectorXd p(2);
  p << 0.5, 0.25;
  const Eigen::MatrixXd n = normalized_gains(net, p);
  CHECK(n(0, 0) == doctest::Approx(4.0));
  CHECK(n(0, 1) == doctest::Approx(0.5));
  CHECK(n(1, 0) == doctest::Approx(2.0));
  const BeamformerSet v = beams_from_power(net, p, 1);
  CHECK(v[0].squaredNorm() == doctest::Approx(0.5));
  CHECK(v[1].squaredNorm() == doctest::Approx(0.25));
}

TEST_CASE("admission order is by weight, ties by index") {
  const auto net = testing::scalar_instance(Eigen::MatrixXd::Identity(4, 4));
  LinkWeights w = net.unit_weights();
  w(2, 2) = 3.0;
  w(0, 0) = 2.0;
  CHECK(admission_order(net, w) == std::vector<int>{2, 0, 1, 3});
  CHECK(single_association(net) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("FlashLinQ admits while every member keeps SINR >= theta") {
  // theta = 9 dB ~ 7.94. Link 0 strong, link 1 interferes with it moderately.
  Eigen::MatrixXd g(3, 3);
  g << 1000, 50, 1,
       5, 100, 1,
       1, 1, 5;  // link 2 alone reaches SNR 5 < theta
  const auto net = testing::scalar_instance(g);
  const PoweredSchedule ps = flashlinq_schedule(net, net.unit_weights(), {});
  // Link 0: 1000 / (1 + 50) = 19.6 ok; link 1: 100 / (1 + 5) = 16.7 ok.
  CHECK(scheduled_links(ps.schedule) == std::vector<int>{0, 1});
  CHECK(ps.power(0) == 1.0);
  CHECK(ps.power(2) == 0.0);

  SchedulerConfig strict;
  strict.flash_theta_db = 13.0;  // 19.95: link 1 now fails
  CHECK(scheduled_links(flashlinq_schedule(net, net.unit_weights(), strict).schedule) == std::vector<int>{0});
}

TEST_CASE("ITLinQ relaxation rule") {
  SchedulerConfig cfg;
  cfg.itlinq.m_db = 10.0;
  cfg.itlinq.eta = 0.5;
  // SNRs 40 dB: admitted while the strongest INR is at most 0.5 * 40 + 10 = 30 dB.
  const auto net = testing::scalar_instance(db_gains({{40, 25, 35}, {28, 40, 0}, {0, 0, 40}}));
  const PoweredSchedule ps = itlinq_schedule(net, net.unit_weights(), cfg);
  // Link 1 sees INRs 25 and 28 with link 0; link 2 would face 35 dB at link 0.
  CHECK(scheduled_links(ps.schedule) == std::vector<int>{0, 1});

  // Backing link 2 off by b dB needs 35 - b <= 30 at link 0 and
  // 35 - b <= 0.5 (40 - b) + 10 at link 2 itself, so b = 10 is the first level.
  cfg.itlinq.backoff_db = {0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
  const PoweredSchedule plus = itlinq_plus_schedule(net, net.unit_weights(), cfg);
  CHECK(scheduled_links(plus.schedule) == std::vector<int>{0, 1, 2});
  CHECK(plus.power(2) == doctest::Approx(0.1));
  CHECK(plus.power(0) == 1.0);
}

TEST_CASE("greedy TIN admits only TIN-feasible sets") {
  std::mt19937_64 gen(61);
  const auto net = testing::random_single(gen, 12, 1, 1e4, 30.0);
  const PoweredSchedule ps = baseline_greedy_tin(net, net.unit_weights());
  const auto on = scheduled_links(ps.schedule);
  CHECK_FALSE(on.empty());
  const Eigen::MatrixXd g = normalized_gains(net, Eigen::VectorXd::Constant(12, net.p_max()));
  for (int l : on) CHECK(tin_check(l, on, g));
  CHECK(baseline_all_on(net).num_scheduled() == 12);
}

TEST_CASE("composite power control never loses to its base") {
  std::mt19937_64 gen(62);
  for (int k = 0; k < 5; ++k) {
    const auto net = testing::random_single(gen, 10, 1, 1e3, 20.0);
    for (auto [base, id] : {std::pair{BaseScheduler::FlashLinQ, "flashlinq"},
                            std::pair{BaseScheduler::ItlinqPlus, "itlinq-plus"}}) {
      const SlotSolution b = run_scheduler(id, net, net.unit_weights(), {});
      const SlotSolution pc = composite_pc(base, net, net.unit_weights(), {});
      CHECK(pc.objective >= b.objective - 1e-9);
      CHECK(pc.objective_trace.front() == doctest::Approx(b.objective));
      for (std::size_t t = 1; t < pc.objective_trace.size(); ++t) {
        CHECK(pc.objective_trace[t] >= pc.objective_trace[t - 1]);
      }
    }
  }
}

TEST_CASE("scalar benchmarks reject MIMO and flexible instances") {
  std::mt19937_64 gen(63);
  const auto mimo = testing::random_single(gen, 3, 2);
  CHECK_THROWS_AS(flashlinq_schedule(mimo, mimo.unit_weights(), {}), Error);
  const auto flex = testing::random_instance(gen, 3, 2, 1, {{0, 2}, {1}});
  try {
    itlinq_schedule(flex, flex.unit_weights(), {});
    FAIL("expected Unsupported");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Unsupported);
  }
}
