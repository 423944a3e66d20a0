// Benchmark: OpenMP kernels against the serial reference.  The parallel paths
// compute per-item values into arrays and reduce in index order, so the
// results must agree bit for bit; this tool reports timings and verifies that.

#include <chrono>
#include <complex>
#include <cstdio>

#include "cuspidal/expand.hpp"
#include "cuspidal/petersson.hpp"

using namespace cuspidal;
using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double timed(F&& fn, int reps = 3) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, seconds(t0, Clock::now()));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = argc > 1 ? std::atoi(argv[1]) : 4;
  std::printf("serial reference vs OpenMP (%d threads)\n\n", threads);
  std::printf("%-36s %10s %10s %8s %s\n", "kernel", "serial", "parallel", "speedup",
              "bitwise");

  auto f6 = modform::eta_quotient_form({{1, 2}, {2, 2}, {3, 2}, {6, 2}}, 1500);
  f6.is_newform = f6.is_eigenform = f6.twist_minimal = true;
  const auto cd = cusps::make_cusp_datum(6, f6.character, {1, 3});

  {
    cusps::CuspExpansion e1, ep;
    const double ts = timed([&] { e1 = expand::expand_direct(f6, cd, 13, 120, 0.25, 0, 1); });
    const double tp =
        timed([&] { ep = expand::expand_direct(f6, cd, 13, 120, 0.25, 0, threads); });
    bool same = e1.b == ep.b;
    std::printf("%-36s %9.4fs %9.4fs %7.2fx %s\n",
                "expand_direct (eval + least squares)", ts, tp, ts / tp,
                same ? "ok" : "MISMATCH");
  }

  {
    long long c1 = 0, c2 = 0;
    double s1 = 0, s2 = 0;
    const double ts = timed([&] {
      s1 = 0;
      for (int n = 1; n <= 1500; ++n) s1 += petersson::bessel_weight_sum(12, n, 11, 1e-24, &c1);
    });
    const double tp = timed([&] {
      s2 = 0;
#ifdef CUSPIDAL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads) reduction(+ : s2)
#endif
      for (int n = 1; n <= 1500; ++n) s2 += petersson::bessel_weight_sum(12, n, 11, 1e-24, &c2);
    });
    std::printf("%-36s %9.4fs %9.4fs %7.2fx %s\n", "bessel weight-sum table (h=11)", ts,
                tp, ts / tp, std::abs(s1 - s2) < 1e-18 ? "ok" : "MISMATCH");
  }

  {
    auto delta = modform::eta_quotient_form({{1, 24}}, 2000);
    delta.is_newform = delta.is_eigenform = delta.twist_minimal = true;
    const auto d11 = modform::dilate(delta, 11);
    petersson::Options o1, op;
    o1.digits = op.digits = 12;
    o1.threads = 1;
    op.threads = threads;
    petersson::InnerProductReport r1, rp;
    const double ts = timed([&] { r1 = petersson::petersson_pair(d11, delta, o1); }, 2);
    const double tp = timed([&] { rp = petersson::petersson_pair(d11, delta, op); }, 2);
    const bool same = r1.value == rp.value;
    std::printf("%-36s %9.4fs %9.4fs %7.2fx %s\n", "petersson pair at level 11", ts, tp,
                ts / tp, same ? "ok" : "MISMATCH");
  }

  return 0;
}
