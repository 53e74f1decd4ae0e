#include <doctest.h>

#include <cmath>
#include <vector>

#include "gradprop/kernels.hpp"
#include "gradprop/mathcore.hpp"

using namespace gradprop;
namespace k = gradprop::kernels;

namespace {

std::vector<double> randn(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0, 1);
  return v;
}

// Odd sizes exercise the SIMD tails.
const std::size_t kSizes[] = {0, 1, 3, 4, 7, 8, 9, 15, 16, 17, 31, 100, 257, 784};

double rel_close(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar kernels on hand inputs") {
  const auto& s = k::scalar_table();
  const double a[] = {1, 2, 3}, b[] = {4, 5, 6};
  CHECK(s.dot(a, b, 3) == 32.0);

  double y[] = {1, 1, 1};
  s.axpy(2.0, a, y, 3);
  CHECK(y[0] == 3.0);
  CHECK(y[2] == 7.0);

  const double m[] = {1, 2, 3, 4, 5, 6};  // 2x3
  double out2[2], out3[3];
  s.gemv(m, 2, 3, a, out2);
  CHECK(out2[0] == 14.0);
  CHECK(out2[1] == 32.0);
  const double x2[] = {1, -1};
  s.gemv_t(m, 2, 3, x2, out3);
  CHECK(out3[0] == -3.0);
  CHECK(out3[1] == -3.0);
  CHECK(out3[2] == -3.0);

  double g[] = {0, 0, 0, 0, 0, 0};
  const double u[] = {1, 2}, v[] = {1, 0, -1};
  s.ger(g, 2, 3, 0.5, u, v);
  CHECK(g[0] == 0.5);
  CHECK(g[2] == -0.5);
  CHECK(g[3] == 1.0);
  CHECK(g[5] == -1.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const k::KernelTable* simd = k::avx2_table();
  if (!simd || !k::cpu_has_avx2()) {
    MESSAGE("AVX2 variant not available; skipping equivalence");
    return;
  }
  const auto& ref = k::scalar_table();
  Rng rng(3);
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto a = randn(rng, n), b = randn(rng, n);
    CHECK(rel_close(simd->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)) < 1e-13);

    auto y1 = randn(rng, n);
    auto y2 = y1;
    ref.axpy(0.75, a.data(), y1.data(), n);
    simd->axpy(0.75, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_close(y2[i], y1[i]) < 1e-15);
  }
  for (std::size_t rows : {1, 3, 10, 17}) {
    for (std::size_t cols : kSizes) {
      if (cols == 0) continue;
      CAPTURE(rows);
      CAPTURE(cols);
      const auto m = randn(rng, rows * cols);
      const auto x = randn(rng, cols), xt = randn(rng, rows);
      std::vector<double> r1(rows), r2(rows), t1(cols), t2(cols);
      ref.gemv(m.data(), rows, cols, x.data(), r1.data());
      simd->gemv(m.data(), rows, cols, x.data(), r2.data());
      for (std::size_t i = 0; i < rows; ++i) CHECK(rel_close(r2[i], r1[i]) < 1e-13);
      ref.gemv_t(m.data(), rows, cols, xt.data(), t1.data());
      simd->gemv_t(m.data(), rows, cols, xt.data(), t2.data());
      for (std::size_t j = 0; j < cols; ++j) CHECK(rel_close(t2[j], t1[j]) < 1e-13);

      auto g1 = m, g2 = m;
      auto u = randn(rng, rows);
      u[0] = 0.0;
      ref.ger(g1.data(), rows, cols, -0.3, u.data(), x.data());
      simd->ger(g2.data(), rows, cols, -0.3, u.data(), x.data());
      for (std::size_t i = 0; i < rows * cols; ++i) CHECK(rel_close(g2[i], g1[i]) < 1e-15);
    }
  }
}

TEST_CASE("select switches the active table") {
  k::select(k::Isa::Scalar);
  CHECK(k::active().isa == k::Isa::Scalar);
  if (k::avx2_table() && k::cpu_has_avx2()) {
    k::select(k::Isa::Avx2);
    CHECK(k::active().isa == k::Isa::Avx2);
  }
  CHECK(k::name(k::Isa::Scalar) == "scalar");
  CHECK(k::name(k::Isa::Avx2) == "avx2");
}

TEST_CASE("matvec results agree across kernel variants") {
  if (!k::avx2_table() || !k::cpu_has_avx2()) return;
  Rng rng(9);
  Matrix m(100, 784);
  for (auto& v : m.span()) v = rng.normal(0, 0.05);
  Vector x(784);
  for (auto& v : x) v = rng.uniform(0, 1);
  k::select(k::Isa::Scalar);
  const Vector a = matvec(m, x);
  k::select(k::Isa::Avx2);
  const Vector b = matvec(m, x);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(rel_close(b[i], a[i]) < 1e-13);
}
