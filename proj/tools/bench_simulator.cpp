// Times the Monte Carlo engine serial vs. threaded on the hitting-Laplace
// benchmark and checks that the two estimates agree bit for bit.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "spider/simulator.hpp"

int main(int argc, char** argv) {
  long long paths = 50000;
  double step = 0.01;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--paths") == 0) paths = std::atoll(argv[i + 1]);
    if (std::strcmp(argv[i], "--step") == 0) step = std::atof(argv[i + 1]);
  }

  spider::SpiderModel model = spider::brownian_spider(2, {0.5, 0.5}, 0.5);
  spider::SimConfig cfg;
  cfg.step = step;
  cfg.paths = paths;
  cfg.horizon = 50.0;
  cfg.seed = 42;

  auto time_run = [&](bool parallel) {
    cfg.parallel = parallel;
    auto t0 = std::chrono::steady_clock::now();
    spider::EstimateWithError est = spider::simulate_hitting_laplace(
        model, spider::vertex(), {1.0, 1}, cfg);
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    std::printf("%-8s  paths=%lld  mean=%.10f  se=%.2e  %.3f s\n",
                parallel ? "parallel" : "serial", paths, est.mean,
                est.std_error, secs);
    return std::pair<double, double>(est.mean, secs);
  };

  auto [mean_s, secs_s] = time_run(false);
  auto [mean_p, secs_p] = time_run(true);
  std::printf("speedup: %.2fx, estimates %s\n", secs_s / secs_p,
              mean_s == mean_p ? "identical" : "DIFFER");
  return mean_s == mean_p ? 0 : 1;
}
