// Spectral representation of self-adjoint nonnegative operators with compact
// resolvent, and fields expanded in their eigenbases.
//
// An operator is defined by its eigenvalues 0 <= lambda_1 <= lambda_2 <= ...
// and an orthonormal family of nodal eigenvectors on a quadrature grid.
// Fractional powers act diagonally,
//
//     A^r v = sum_j lambda_j^r (v, e_j) e_j,     with 0^r := 0,
//
// so kernel modes are annihilated, never turned into NaNs.  The built-in
// basis is the Neumann cosine family on (0, L) sampled at midpoints
// x_k = (k + 1/2) L / N, where the discrete transform is exactly orthogonal.

#pragma once

#include <memory>
#include <string>
#include <vector>

namespace fch {

enum class BasisKind { cosine_neumann_1d, custom };

class SpectralOperator {
public:
  // Neumann cosine basis on (0, L): lambda_j = ((j-1) pi / L)^2, e_1 = 1/sqrt(L),
  // e_j = sqrt(2/L) cos((j-1) pi x / L), midpoint grid with n_nodes = n_modes.
  static std::shared_ptr<const SpectralOperator>
  cosine_neumann(int n_modes, double domain_length);

  // Arbitrary eigenpairs: eigenvalues nondecreasing and nonnegative,
  // eigenvectors[j][k] = e_j(x_k), orthonormal in the weighted discrete
  // inner product (tolerance 1e-10).  Throws std::invalid_argument otherwise.
  static std::shared_ptr<const SpectralOperator>
  custom(std::vector<double> eigenvalues,
         std::vector<std::vector<double>> eigenvectors,
         std::vector<double> weights);

  BasisKind kind() const { return kind_; }
  int n_modes() const { return static_cast<int>(eigenvalues_.size()); }
  int n_nodes() const { return static_cast<int>(weights_.size()); }
  int kernel_dim() const { return kernel_dim_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int j) const { return eigenvalues_[j]; }  // 0-based
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double domain_measure() const { return measure_; }  // sum of weights = |Omega|
  double domain_length() const { return length_; }    // cosine basis only
  double basis_value(int mode, int node) const { return basis_[mode][node]; }
  // true when e_1 is constant on the grid (mean/energy bookkeeping uses this)
  bool constant_first_mode() const { return constant_first_; }
  // largest off-diagonal Gram residual in the discrete inner product
  double orthonormality_residual() const;

private:
  SpectralOperator() = default;
  BasisKind kind_ = BasisKind::custom;
  std::vector<double> eigenvalues_;
  std::vector<std::vector<double>> basis_;  // [mode][node]
  std::vector<double> weights_;
  std::vector<double> nodes_;
  int kernel_dim_ = 0;
  double measure_ = 0.0;
  double length_ = 0.0;
  bool constant_first_ = false;
};

using OperatorPtr = std::shared_ptr<const SpectralOperator>;

// Same eigenbasis (and hence commuting fractional calculus): either the same
// object or structurally identical basis data.
bool same_basis(const SpectralOperator& a, const SpectralOperator& b);
// Same quadrature grid (fields of either operator live on common nodes).
bool same_grid(const SpectralOperator& a, const SpectralOperator& b);

// A field is a coefficient vector against one operator's eigenbasis.
struct Field {
  OperatorPtr op;
  std::vector<double> coeffs;
};

Field make_field(OperatorPtr op, std::vector<double> coeffs);
Field zero_field(OperatorPtr op);

// Basic coefficient arithmetic (both fields must share the basis).
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

// Synthesis v(x_k) = sum_j c_j e_j(x_k) and analysis c_j = sum_k w_k v_k e_j(x_k).
std::vector<double> to_nodal(const Field& f);
Field to_modal(const OperatorPtr& op, const std::vector<double>& nodal);

// A^r f for r > 0 (throws for r <= 0); kernel modes map to zero exactly.
Field apply_power(const Field& f, double r);

// H = L^2 inner product and norm via Parseval on coefficients.
double inner(const Field& a, const Field& b);
double norm_h(const Field& f);

// Equivalent V_A^r norm: ||A^r v||_H when lambda_1 > 0, otherwise
// (|c_1|^2 + sum_{j>=2} |lambda_j^r c_j|^2)^{1/2}.
double frac_norm(const Field& f, double r);

// Dual-scale norm (sum_{lambda_j>0} |lambda_j^{-r} c_j|^2 [+ |c_1|^2 when
// lambda_1 = 0])^{1/2}.  In strict mode, kernel coefficients must vanish.
double dual_norm(const Field& f, double r, bool strict = false);

// Orthogonal projection onto the kernel: keeps the first kernel_dim coefficients.
Field project_kernel(const Field& f);

// (1/|Omega|) integral of v; requires a constant first eigenfunction, in which
// case it equals c_1 / sqrt(|Omega|).
double mean_value(const Field& f);

}  // namespace fch
