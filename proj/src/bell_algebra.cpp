#include "locc/bell_algebra.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace locc {

namespace {

constexpr double kSumTol = 1e-12;
constexpr double kNegativeTol = 1e-15;
constexpr double kNoMass = 1e-14;

// (control digit, target digit) -> joint index 4c + t reading the input.
constexpr std::array<int, 16> kCnotSource = {0, 1, 10, 11, 5, 4, 15, 14, 8, 9, 2, 3, 13, 12, 7, 6};

std::size_t pow4(int k) { return std::size_t{1} << (2 * k); }

void check_pair(const BellDiagonal& s, int pair) {
  if (pair < 0 || pair >= s.num_pairs()) {
    throw std::out_of_range("pair index " + std::to_string(pair) + " out of range for " +
                            std::to_string(s.num_pairs()) + " pairs");
  }
}

int digit(std::size_t index, int pair, int k) {
  return static_cast<int>((index >> (2 * (k - 1 - pair))) & 3U);
}

std::size_t with_digit(std::size_t index, int pair, int k, int value) {
  const int shift = 2 * (k - 1 - pair);
  return (index & ~(std::size_t{3} << shift)) | (static_cast<std::size_t>(value) << shift);
}

}  // namespace

ComplexVector bell_vector(BellIndex which) {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector v = ComplexVector::Zero(4);
  switch (which) {
    case BellIndex::PhiPlus: v(0) = r; v(3) = r; break;
    case BellIndex::PsiPlus: v(1) = r; v(2) = r; break;
    case BellIndex::PhiMinus: v(0) = r; v(3) = -r; break;
    case BellIndex::PsiMinus: v(1) = r; v(2) = -r; break;
  }
  return v;
}

BellDiagonal::BellDiagonal(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  std::size_t size = 1;
  while (size < coeffs_.size()) {
    size *= 4;
    ++num_pairs_;
  }
  if (size != coeffs_.size()) throw std::invalid_argument("Bell-diagonal coefficient count must be a power of 4");
  double sum = 0.0;
  for (double& c : coeffs_) {
    if (!(c >= -kNegativeTol)) throw std::invalid_argument("negative Bell-diagonal coefficient");
    c = std::max(c, 0.0);
    sum += c;
  }
  if (std::abs(sum - 1.0) > kSumTol) {
    throw std::invalid_argument("Bell-diagonal coefficients sum to " + std::to_string(sum));
  }
}

BellDiagonal BellDiagonal::single(const std::array<double, 4>& tuple) {
  return BellDiagonal(std::vector<double>(tuple.begin(), tuple.end()));
}

BellDiagonal tensor(const BellDiagonal& a, const BellDiagonal& b) {
  std::vector<double> out;
  out.reserve(a.coeffs_.size() * b.coeffs_.size());
  for (double x : a.coeffs_) {
    for (double y : b.coeffs_) out.push_back(x * y);
  }
  return BellDiagonal(std::move(out));
}

BellDiagonal BellDiagonal::product(const std::vector<BellDiagonal>& parts) {
  BellDiagonal acc(std::vector<double>{1.0});
  for (const auto& p : parts) acc = tensor(acc, p);
  return acc;
}

std::array<double, 4> bell_coefficients(const DensityState& two_qubit) {
  if (two_qubit.num_qubits() != 2) throw std::invalid_argument("bell_coefficients: expected a two-qubit state");
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    const ComplexVector v = bell_vector(static_cast<BellIndex>(i));
    out[static_cast<std::size_t>(i)] = (v.adjoint() * two_qubit.matrix() * v)(0, 0).real();
  }
  return out;
}

BellDiagonal rx_pair_map(const BellDiagonal& s, int pair) {
  check_pair(s, pair);
  const int k = s.num_pairs();
  std::vector<double> out(s.coeffs().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int d = digit(i, pair, k);
    const int src = d == 2 ? 3 : d == 3 ? 2 : d;
    out[i] = s[with_digit(i, pair, k, src)];
  }
  return BellDiagonal(std::move(out));
}

BellDiagonal bilateral_cnot(const BellDiagonal& s, int control_pair, int target_pair) {
  check_pair(s, control_pair);
  check_pair(s, target_pair);
  if (control_pair == target_pair) throw std::invalid_argument("bilateral_cnot: control and target pair coincide");
  const int k = s.num_pairs();
  std::vector<double> out(s.coeffs().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int joint = 4 * digit(i, control_pair, k) + digit(i, target_pair, k);
    const int src = kCnotSource[static_cast<std::size_t>(joint)];
    std::size_t j = with_digit(i, control_pair, k, src / 4);
    j = with_digit(j, target_pair, k, src % 4);
    out[i] = s[j];
  }
  return BellDiagonal(std::move(out));
}

std::optional<CoincidenceResult> coincidence_measure(const BellDiagonal& s, int pair) {
  check_pair(s, pair);
  const int k = s.num_pairs();
  std::vector<double> kept(pow4(k - 1), 0.0);
  for (std::size_t i = 0; i < s.coeffs().size(); ++i) {
    const int d = digit(i, pair, k);
    if (d != 0 && d != 2) continue;
    // Drop the measured digit from the index.
    const int low_digits = k - 1 - pair;
    const std::size_t low = i & ((std::size_t{1} << (2 * low_digits)) - 1);
    const std::size_t high = i >> (2 * (low_digits + 1));
    kept[(high << (2 * low_digits)) | low] += s[i];
  }
  const double mass = std::accumulate(kept.begin(), kept.end(), 0.0);
  if (mass < kNoMass) return std::nullopt;
  for (double& c : kept) c /= mass;
  return CoincidenceResult{BellDiagonal(std::move(kept)), mass};
}

DensityState to_density(const BellDiagonal& s) {
  const int k = s.num_pairs();
  const Eigen::Index dim = Eigen::Index{1} << (2 * k);
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < s.coeffs().size(); ++i) {
    if (s[i] == 0.0) continue;
    ComplexVector v = ComplexVector::Ones(1);
    for (int pair = 0; pair < k; ++pair) {
      const ComplexVector b = bell_vector(static_cast<BellIndex>(digit(i, pair, k)));
      ComplexVector next(v.size() * 4);
      for (Eigen::Index x = 0; x < v.size(); ++x) next.segment(4 * x, 4) = v(x) * b;
      v = std::move(next);
    }
    rho += s[i] * (v * v.adjoint());
  }
  return DensityState::trusted(std::move(rho));
}

DistillationResult dejmps_exact(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  BellDiagonal s = tensor(BellDiagonal::single(a), BellDiagonal::single(b));
  s = rx_pair_map(rx_pair_map(s, 0), 1);
  s = bilateral_cnot(s, 0, 1);
  const auto kept = coincidence_measure(s, 1);
  if (!kept) throw std::domain_error("dejmps_exact: no success probability");
  return {kept->state[0], kept->success_probability};
}

}  // namespace locc
