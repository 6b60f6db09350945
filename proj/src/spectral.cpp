#include "fch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fch {

namespace {

constexpr double kOrthoTol = 1e-10;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// lambda^r with the 0^r := 0 convention for kernel modes.
inline double power_or_zero(double lambda, double r) {
  return lambda == 0.0 ? 0.0 : std::pow(lambda, r);
}

int count_kernel(const std::vector<double>& ev) {
  int m = 0;
  while (m < static_cast<int>(ev.size()) && ev[m] == 0.0) ++m;
  return m;
}

bool first_mode_constant(const std::vector<std::vector<double>>& basis) {
  if (basis.empty() || basis[0].empty()) return false;
  const double v0 = basis[0][0];
  for (double v : basis[0])
    if (std::abs(v - v0) > 1e-12 * (1.0 + std::abs(v0))) return false;
  return true;
}

}  // namespace

std::shared_ptr<const SpectralOperator>
SpectralOperator::cosine_neumann(int n_modes, double domain_length) {
  require(n_modes >= 1, "cosine_neumann: n_modes must be positive");
  require(domain_length > 0.0, "cosine_neumann: domain_length must be positive");

  auto op = std::shared_ptr<SpectralOperator>(new SpectralOperator());
  const int n = n_modes;
  const double L = domain_length;
  op->kind_ = BasisKind::cosine_neumann_1d;
  op->length_ = L;
  op->weights_.assign(n, L / n);
  op->nodes_.resize(n);
  for (int k = 0; k < n; ++k) op->nodes_[k] = (k + 0.5) * L / n;

  op->eigenvalues_.resize(n);
  op->basis_.assign(n, std::vector<double>(n));
  const double pi = std::acos(-1.0);
  for (int j = 0; j < n; ++j) {
    const double freq = j * pi / L;
    op->eigenvalues_[j] = freq * freq;
    const double amp = (j == 0) ? 1.0 / std::sqrt(L) : std::sqrt(2.0 / L);
    for (int k = 0; k < n; ++k)
      op->basis_[j][k] = amp * std::cos(freq * op->nodes_[k]);
  }
  op->kernel_dim_ = 1;  // lambda_1 = 0 exactly
  op->measure_ = L;
  op->constant_first_ = true;
  return op;
}

std::shared_ptr<const SpectralOperator>
SpectralOperator::custom(std::vector<double> eigenvalues,
                         std::vector<std::vector<double>> eigenvectors,
                         std::vector<double> weights) {
  require(!eigenvalues.empty(), "custom operator: no eigenvalues");
  require(eigenvectors.size() == eigenvalues.size(),
          "custom operator: one eigenvector per eigenvalue required");
  const size_t n_nodes = weights.size();
  require(n_nodes >= eigenvalues.size(),
          "custom operator: fewer nodes than modes");
  for (double w : weights)
    require(w > 0.0, "custom operator: quadrature weights must be positive");
  for (size_t j = 0; j < eigenvalues.size(); ++j) {
    require(eigenvalues[j] >= 0.0, "custom operator: negative eigenvalue");
    if (j > 0)
      require(eigenvalues[j] >= eigenvalues[j - 1],
              "custom operator: eigenvalues must be nondecreasing");
    require(eigenvectors[j].size() == n_nodes,
            "custom operator: eigenvector/node size mismatch");
  }

  auto op = std::shared_ptr<SpectralOperator>(new SpectralOperator());
  op->kind_ = BasisKind::custom;
  op->eigenvalues_ = std::move(eigenvalues);
  op->basis_ = std::move(eigenvectors);
  op->weights_ = std::move(weights);
  op->nodes_.clear();
  op->kernel_dim_ = count_kernel(op->eigenvalues_);
  op->measure_ = std::accumulate(op->weights_.begin(), op->weights_.end(), 0.0);
  op->constant_first_ = first_mode_constant(op->basis_);

  require(op->orthonormality_residual() <= kOrthoTol,
          "custom operator: eigenvectors not orthonormal in the discrete "
          "inner product (residual above 1e-10)");
  return op;
}

double SpectralOperator::orthonormality_residual() const {
  const int m = n_modes();
  const int n = n_nodes();
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      double g = 0.0;
      for (int k = 0; k < n; ++k) g += weights_[k] * basis_[i][k] * basis_[j][k];
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

bool same_basis(const SpectralOperator& a, const SpectralOperator& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind() || a.n_modes() != b.n_modes() ||
      a.n_nodes() != b.n_nodes())
    return false;
  if (a.kind() == BasisKind::cosine_neumann_1d)
    return a.domain_length() == b.domain_length();
  for (int j = 0; j < a.n_modes(); ++j)
    for (int k = 0; k < a.n_nodes(); ++k)
      if (a.basis_value(j, k) != b.basis_value(j, k)) return false;
  return true;
}

bool same_grid(const SpectralOperator& a, const SpectralOperator& b) {
  if (&a == &b) return true;
  if (a.n_nodes() != b.n_nodes()) return false;
  for (int k = 0; k < a.n_nodes(); ++k)
    if (a.weights()[k] != b.weights()[k]) return false;
  return true;
}

Field make_field(OperatorPtr op, std::vector<double> coeffs) {
  require(op != nullptr, "make_field: null operator");
  require(static_cast<int>(coeffs.size()) == op->n_modes(),
          "make_field: coefficient count must equal n_modes");
  return Field{std::move(op), std::move(coeffs)};
}

Field zero_field(OperatorPtr op) {
  require(op != nullptr, "zero_field: null operator");
  return Field{op, std::vector<double>(op->n_modes(), 0.0)};
}

namespace {
void require_same_basis(const Field& a, const Field& b, const char* what) {
  require(a.op && b.op && same_basis(*a.op, *b.op),
          std::string(what) + ": fields live in different eigenbases");
}
}  // namespace

Field operator+(const Field& a, const Field& b) {
  require_same_basis(a, b, "field addition");
  Field out = a;
  for (size_t j = 0; j < out.coeffs.size(); ++j) out.coeffs[j] += b.coeffs[j];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  require_same_basis(a, b, "field subtraction");
  Field out = a;
  for (size_t j = 0; j < out.coeffs.size(); ++j) out.coeffs[j] -= b.coeffs[j];
  return out;
}

Field operator*(double s, const Field& a) {
  Field out = a;
  for (double& c : out.coeffs) c *= s;
  return out;
}

std::vector<double> to_nodal(const Field& f) {
  const auto& op = *f.op;
  std::vector<double> v(op.n_nodes(), 0.0);
  for (int j = 0; j < op.n_modes(); ++j) {
    const double c = f.coeffs[j];
    if (c == 0.0) continue;
    for (int k = 0; k < op.n_nodes(); ++k) v[k] += c * op.basis_value(j, k);
  }
  return v;
}

Field to_modal(const OperatorPtr& op, const std::vector<double>& nodal) {
  require(op != nullptr, "to_modal: null operator");
  require(static_cast<int>(nodal.size()) == op->n_nodes(),
          "to_modal: nodal size must equal n_nodes");
  Field f = zero_field(op);
  for (int j = 0; j < op->n_modes(); ++j) {
    double c = 0.0;
    for (int k = 0; k < op->n_nodes(); ++k)
      c += op->weights()[k] * nodal[k] * op->basis_value(j, k);
    f.coeffs[j] = c;
  }
  return f;
}

Field apply_power(const Field& f, double r) {
  require(r > 0.0, "apply_power: exponent must be positive");
  Field out = f;
  for (int j = 0; j < f.op->n_modes(); ++j)
    out.coeffs[j] = power_or_zero(f.op->eigenvalue(j), r) * f.coeffs[j];
  return out;
}

double inner(const Field& a, const Field& b) {
  require_same_basis(a, b, "inner product");
  double s = 0.0;
  for (size_t j = 0; j < a.coeffs.size(); ++j) s += a.coeffs[j] * b.coeffs[j];
  return s;
}

double norm_h(const Field& f) { return std::sqrt(inner(f, f)); }

double frac_norm(const Field& f, double r) {
  require(r > 0.0, "frac_norm: exponent must be positive");
  const auto& op = *f.op;
  double s = 0.0;
  if (op.kernel_dim() == 0) {
    for (int j = 0; j < op.n_modes(); ++j) {
      const double t = std::pow(op.eigenvalue(j), r) * f.coeffs[j];
      s += t * t;
    }
  } else {
    // 0 = lambda_1: the first coefficient enters unweighted, kernel modes
    // beyond it carry no weight.
    s = f.coeffs[0] * f.coeffs[0];
    for (int j = 1; j < op.n_modes(); ++j) {
      const double t = power_or_zero(op.eigenvalue(j), r) * f.coeffs[j];
      s += t * t;
    }
  }
  return std::sqrt(s);
}

double dual_norm(const Field& f, double r, bool strict) {
  require(r > 0.0, "dual_norm: exponent must be positive");
  const auto& op = *f.op;
  double s = 0.0;
  if (strict) {
    for (int j = 0; j < op.kernel_dim(); ++j)
      require(std::abs(f.coeffs[j]) <= 1e-13,
              "dual_norm: kernel component must vanish in strict mode");
  }
  if (op.kernel_dim() > 0) s += f.coeffs[0] * f.coeffs[0];
  for (int j = 0; j < op.n_modes(); ++j) {
    const double lam = op.eigenvalue(j);
    if (lam == 0.0) continue;
    const double t = std::pow(lam, -r) * f.coeffs[j];
    s += t * t;
  }
  return std::sqrt(s);
}

Field project_kernel(const Field& f) {
  Field out = zero_field(f.op);
  for (int j = 0; j < f.op->kernel_dim(); ++j) out.coeffs[j] = f.coeffs[j];
  return out;
}

double mean_value(const Field& f) {
  require(f.op->constant_first_mode(),
          "mean_value: first eigenfunction is not constant");
  return f.coeffs[0] / std::sqrt(f.op->domain_measure());
}

}  // namespace fch
