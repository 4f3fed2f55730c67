#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtask/rng.hpp"

namespace qtask {

using Cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kConstructTol = 1e-10;
inline constexpr double kCheckTol = 1e-9;
inline constexpr long kDefaultDimCap = 1 << 14;

// ---------------------------------------------------------------------------
// Register systems: an ordered list of named qudit registers.
// ---------------------------------------------------------------------------

class RegisterSystem {
 public:
  RegisterSystem() = default;

  static RegisterSystem make(std::vector<std::pair<std::string, int>> regs, long dim_cap = kDefaultDimCap) {
    RegisterSystem sys;
    long total = 1;
    for (auto& [label, dim] : regs) {
      if (dim < 2) throw std::invalid_argument("register '" + label + "' must have dimension >= 2");
      if (sys.index_.count(label)) throw std::invalid_argument("duplicate register label '" + label + "'");
      sys.index_[label] = static_cast<int>(sys.labels_.size());
      sys.labels_.push_back(label);
      sys.dims_.push_back(dim);
      total *= dim;
      if (total > dim_cap)
        throw std::invalid_argument("total dimension exceeds the configured cap of " + std::to_string(dim_cap));
    }
    sys.total_ = total;
    return sys;
  }

  int count() const { return static_cast<int>(dims_.size()); }
  long total_dim() const { return total_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& dims() const { return dims_; }

  bool has(const std::string& label) const { return index_.count(label) != 0; }
  int position(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw std::invalid_argument("unknown register '" + label + "'");
    return it->second;
  }
  int dim_of(const std::string& label) const { return dims_[position(label)]; }

  // digits of a full basis index, register 0 most significant
  std::vector<int> digits(long idx) const {
    std::vector<int> d(dims_.size());
    for (int k = count() - 1; k >= 0; --k) {
      d[k] = static_cast<int>(idx % dims_[k]);
      idx /= dims_[k];
    }
    return d;
  }
  long index_of_digits(const std::vector<int>& d) const {
    long idx = 0;
    for (int k = 0; k < count(); ++k) idx = idx * dims_[k] + d[k];
    return idx;
  }

  bool operator==(const RegisterSystem& o) const { return labels_ == o.labels_ && dims_ == o.dims_; }

 private:
  std::vector<std::string> labels_;
  std::vector<int> dims_;
  std::map<std::string, int> index_;
  long total_ = 1;
};

// Precomputed decomposition of full indices into (subsystem, rest) indices
// for a register subset, in the subset's given order.
struct SubsystemView {
  std::vector<int> positions;
  long sub_dim = 1;
  std::vector<long> sub_index;   // full index -> subset index
  std::vector<long> rest_index;  // full index -> index over remaining registers

  SubsystemView(const RegisterSystem& sys, const std::vector<std::string>& labels) {
    std::vector<char> in_sub(sys.count(), 0);
    for (const auto& l : labels) {
      int p = sys.position(l);
      if (in_sub[p]) throw std::invalid_argument("register '" + l + "' listed twice");
      in_sub[p] = 1;
      positions.push_back(p);
      sub_dim *= sys.dims()[p];
    }
    long total = sys.total_dim();
    sub_index.resize(total);
    rest_index.resize(total);
    for (long i = 0; i < total; ++i) {
      auto dg = sys.digits(i);
      long s = 0;
      for (int p : positions) s = s * sys.dims()[p] + dg[p];
      long r = 0;
      for (int k = 0; k < sys.count(); ++k)
        if (!in_sub[k]) r = r * sys.dims()[k] + dg[k];
      sub_index[i] = s;
      rest_index[i] = r;
    }
  }
};

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

struct QuantumState {
  RegisterSystem system;
  Matrix rho;

  long dim() const { return system.total_dim(); }

  // Hermiticity / unit trace / positivity within tolerances.
  void check_invariants(double tol = kConstructTol) const {
    if (rho.rows() != dim() || rho.cols() != dim()) throw std::runtime_error("density matrix has wrong shape");
    double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) throw std::runtime_error("density matrix is not Hermitian within tolerance");
    double tr = std::abs(rho.trace() - Cx(1.0, 0.0));
    if (tr > tol) throw std::runtime_error("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw std::runtime_error("density matrix has a negative eigenvalue");
  }
};

inline QuantumState state_from_density(const RegisterSystem& sys, Matrix m) {
  QuantumState st{sys, std::move(m)};
  st.check_invariants();
  return st;
}

inline QuantumState state_from_pure(const RegisterSystem& sys, const Vector& amps) {
  if (amps.size() != sys.total_dim()) throw std::invalid_argument("amplitude vector has wrong dimension");
  double n = amps.norm();
  if (n < 1e-12) throw std::invalid_argument("state vector is not normalizable");
  Vector v = amps / n;
  return QuantumState{sys, v * v.adjoint()};
}

inline QuantumState basis_state(const RegisterSystem& sys, const std::vector<int>& digits) {
  if (static_cast<int>(digits.size()) != sys.count()) throw std::invalid_argument("one digit per register required");
  for (int k = 0; k < sys.count(); ++k)
    if (digits[k] < 0 || digits[k] >= sys.dims()[k]) throw std::invalid_argument("basis digit out of range");
  Vector v = Vector::Zero(sys.total_dim());
  v(sys.index_of_digits(digits)) = 1.0;
  return state_from_pure(sys, v);
}

inline Vector haar_random_vector(int dim, Rng& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Cx(rng.gaussian(), rng.gaussian());
  v.normalize();
  return v;
}

// Maximally entangled pair sum_j |jj> / sqrt(d) as a 2-register amplitude
// vector (d*d entries).
inline Vector max_entangled_vector(int d) {
  Vector v = Vector::Zero(static_cast<long>(d) * d);
  for (int j = 0; j < d; ++j) v(static_cast<long>(j) * d + j) = 1.0 / std::sqrt(double(d));
  return v;
}

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline Vector bell_vector(BellKind kind) {
  Vector v = Vector::Zero(4);
  double s = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case BellKind::PhiPlus: v(0) = s; v(3) = s; break;
    case BellKind::PhiMinus: v(0) = s; v(3) = -s; break;
    case BellKind::PsiPlus: v(1) = s; v(2) = s; break;
    case BellKind::PsiMinus: v(1) = s; v(2) = -s; break;
  }
  return v;
}

// Compose a full-system pure vector from joint amplitude vectors on disjoint
// register groups covering the whole system.
inline Vector compose_pure(const RegisterSystem& sys, const std::vector<std::pair<std::vector<std::string>, Vector>>& groups) {
  std::vector<char> covered(sys.count(), 0);
  std::vector<SubsystemView> views;
  for (const auto& [labels, amps] : groups) {
    long d = 1;
    for (const auto& l : labels) {
      int p = sys.position(l);
      if (covered[p]) throw std::invalid_argument("register '" + l + "' prepared twice");
      covered[p] = 1;
      d *= sys.dims()[p];
    }
    if (amps.size() != d) throw std::invalid_argument("joint preparation has wrong dimension");
    views.emplace_back(sys, labels);
  }
  for (int k = 0; k < sys.count(); ++k)
    if (!covered[k]) throw std::invalid_argument("register '" + sys.labels()[k] + "' left unprepared");
  Vector out(sys.total_dim());
  for (long i = 0; i < sys.total_dim(); ++i) {
    Cx amp = 1.0;
    for (std::size_t g = 0; g < groups.size(); ++g) amp *= groups[g].second(views[g].sub_index[i]);
    out(i) = amp;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

inline bool is_unitary(const Matrix& u, double tol = kConstructTol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

// Lift an operator on the given registers (in the given order) to the full
// system.
inline Matrix embed_operator(const RegisterSystem& sys, const std::vector<std::string>& labels, const Matrix& op) {
  SubsystemView view(sys, labels);
  if (op.rows() != view.sub_dim || op.cols() != view.sub_dim)
    throw std::invalid_argument("operator dimension does not match the selected registers");
  long total = sys.total_dim();
  Matrix full = Matrix::Zero(total, total);
  for (long i = 0; i < total; ++i)
    for (long j = 0; j < total; ++j)
      if (view.rest_index[i] == view.rest_index[j]) full(i, j) = op(view.sub_index[i], view.sub_index[j]);
  return full;
}

inline QuantumState apply_unitary(const QuantumState& state, const std::vector<std::string>& labels, const Matrix& u) {
  if (!is_unitary(u)) throw std::invalid_argument("operator is not unitary within tolerance");
  Matrix full = embed_operator(state.system, labels, u);
  return QuantumState{state.system, full * state.rho * full.adjoint()};
}

struct MeasurementOutcome {
  int label = 0;
  double probability = 0.0;
  QuantumState post;        // renormalized; the pre-measurement state when negligible
  bool negligible = false;  // probability below tolerance; retained for completeness
};

// Projective measurement given by a complete projector list on a register
// subset. Default: computational basis on that subset.
inline std::vector<MeasurementOutcome> measure(const QuantumState& state, const std::vector<std::string>& labels,
                                               const std::vector<Matrix>& projectors = {}) {
  SubsystemView view(state.system, labels);
  std::vector<Matrix> projs = projectors;
  if (projs.empty()) {
    for (long s = 0; s < view.sub_dim; ++s) {
      Matrix p = Matrix::Zero(view.sub_dim, view.sub_dim);
      p(s, s) = 1.0;
      projs.push_back(p);
    }
  }
  Matrix sum = Matrix::Zero(view.sub_dim, view.sub_dim);
  for (const auto& p : projs) {
    if (p.rows() != view.sub_dim || p.cols() != view.sub_dim)
      throw std::invalid_argument("projector dimension does not match the selected registers");
    sum += p;
  }
  if ((sum - Matrix::Identity(view.sub_dim, view.sub_dim)).cwiseAbs().maxCoeff() > kCheckTol)
    throw std::invalid_argument("projector set is incomplete");

  std::vector<MeasurementOutcome> outcomes;
  for (std::size_t k = 0; k < projs.size(); ++k) {
    Matrix full = embed_operator(state.system, labels, projs[k]);
    Matrix collapsed = full * state.rho * full.adjoint();
    double p = collapsed.real().trace();
    MeasurementOutcome out;
    out.label = static_cast<int>(k);
    out.probability = std::clamp(p, 0.0, 1.0);
    if (p > 1e-14) {
      out.post = QuantumState{state.system, collapsed / p};
    } else {
      out.post = state;
      out.negligible = true;
    }
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

inline QuantumState partial_trace(const QuantumState& state, const std::vector<std::string>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial trace must keep at least one register");
  SubsystemView view(state.system, keep);
  std::vector<std::pair<std::string, int>> regs;
  for (const auto& l : keep) regs.emplace_back(l, state.system.dim_of(l));
  RegisterSystem reduced_sys = RegisterSystem::make(regs);
  Matrix reduced = Matrix::Zero(view.sub_dim, view.sub_dim);
  long total = state.dim();
  // group full indices by rest index
  std::map<long, std::vector<long>> by_rest;
  for (long i = 0; i < total; ++i) by_rest[view.rest_index[i]].push_back(i);
  for (const auto& [r, idxs] : by_rest)
    for (long i : idxs)
      for (long j : idxs) reduced(view.sub_index[i], view.sub_index[j]) += state.rho(i, j);
  return QuantumState{reduced_sys, std::move(reduced)};
}

inline Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Uhlmann fidelity; for pure sigma = |b><b| this equals <b|rho|b>.
inline double fidelity(const QuantumState& a, const QuantumState& b) {
  if (!(a.system == b.system)) throw std::invalid_argument("fidelity requires matching register systems");
  Matrix ra = sqrt_psd(a.rho);
  Matrix inner = ra * b.rho * ra;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  double s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(s * s, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Generalized Paulis, Bell bases and teleportation
// ---------------------------------------------------------------------------

// shift: X|j> = |j+1 mod d>
inline Matrix pauli_shift(int d, int power = 1) {
  Matrix m = Matrix::Zero(d, d);
  int p = ((power % d) + d) % d;
  for (int j = 0; j < d; ++j) m((j + p) % d, j) = 1.0;
  return m;
}

// clock: Z|j> = w^j |j>, w = exp(2 pi i / d)
inline Matrix pauli_clock(int d, int power = 1) {
  Matrix m = Matrix::Zero(d, d);
  int p = ((power % d) + d) % d;
  for (int j = 0; j < d; ++j) m(j, j) = std::polar(1.0, 2.0 * M_PI * p * j / d);
  return m;
}

// |Phi_ab> = (1/sqrt d) sum_j w^{aj} |j, j+b>, a generalized Bell basis on a
// pair of d-dimensional registers.
inline Vector generalized_bell_vector(int d, int a, int b) {
  Vector v = Vector::Zero(static_cast<long>(d) * d);
  for (int j = 0; j < d; ++j)
    v(static_cast<long>(j) * d + (j + b) % d) = std::polar(1.0 / std::sqrt(double(d)), 2.0 * M_PI * a * j / d);
  return v;
}

struct TeleportBranch {
  int a = 0;
  int b = 0;
  double probability = 0.0;
  QuantumState post;  // global state after the Bell measurement, before correction
};

// Bell-basis measurement of (source, entangled_local). Every branch leaves
// the distant partner holding X^b Z^-a |psi>; teleport_receive applies the
// inverse correction.
inline std::vector<TeleportBranch> teleport_send_branches(const QuantumState& state, const std::string& source,
                                                          const std::string& entangled_local) {
  int d = state.system.dim_of(source);
  if (state.system.dim_of(entangled_local) != d)
    throw std::invalid_argument("teleport source and entangled register dimensions differ");
  std::vector<Matrix> projs;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Vector v = generalized_bell_vector(d, a, b);
      projs.push_back(v * v.adjoint());
    }
  auto outcomes = measure(state, {source, entangled_local}, projs);
  std::vector<TeleportBranch> branches;
  for (const auto& out : outcomes) {
    TeleportBranch br;
    br.a = out.label / d;
    br.b = out.label % d;
    br.probability = out.probability;
    br.post = out.post;
    branches.push_back(std::move(br));
  }
  return branches;
}

struct TeleportResult {
  int a = 0;
  int b = 0;
  QuantumState post;
};

inline TeleportResult teleport_send(const QuantumState& state, const std::string& source,
                                    const std::string& entangled_local, Rng& rng) {
  auto branches = teleport_send_branches(state, source, entangled_local);
  double u = rng.uniform01();
  double acc = 0.0;
  for (const auto& br : branches) {
    acc += br.probability;
    if (u <= acc || &br == &branches.back()) return TeleportResult{br.a, br.b, br.post};
  }
  return TeleportResult{branches.back().a, branches.back().b, branches.back().post};
}

inline QuantumState teleport_receive(const QuantumState& state, const std::string& target, int a, int b) {
  int d = state.system.dim_of(target);
  if (a < 0 || a >= d || b < 0 || b >= d) throw std::invalid_argument("teleport message out of range");
  Matrix correction = pauli_clock(d, a) * pauli_shift(d, (d - b) % d);
  return apply_unitary(state, {target}, correction);
}

// ---------------------------------------------------------------------------
// Qubit gates and fixed circuits
// ---------------------------------------------------------------------------

namespace gates {
inline Matrix x() { return pauli_shift(2); }
inline Matrix z() { return pauli_clock(2); }
inline Matrix y() {
  Matrix m(2, 2);
  m << 0, Cx(0, -1), Cx(0, 1), 0;
  return m;
}
inline Matrix h() {
  Matrix m(2, 2);
  double s = 1 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}
inline Matrix cnot() {
  Matrix m = Matrix::Identity(4, 4);
  m(2, 2) = m(3, 3) = 0;
  m(2, 3) = m(3, 2) = 1;
  return m;
}
inline Matrix swap2() {
  Matrix m = Matrix::Identity(4, 4);
  m(1, 1) = m(2, 2) = 0;
  m(1, 2) = m(2, 1) = 1;
  return m;
}
}  // namespace gates

// Extend a D x k isometry to a D x D unitary by Gram-Schmidt over the
// standard basis (deterministic completion).
inline Matrix complete_isometry(const Matrix& cols) {
  long dim = cols.rows();
  long k = cols.cols();
  Matrix u(dim, dim);
  u.leftCols(k) = cols;
  long filled = k;
  for (long cand = 0; cand < dim && filled < dim; ++cand) {
    Vector v = Vector::Zero(dim);
    v(cand) = 1.0;
    for (long c = 0; c < filled; ++c) v -= u.col(c).dot(v) * u.col(c);
    double n = v.norm();
    if (n > 1e-9) u.col(filled++) = v / n;
  }
  if (filled != dim) throw std::runtime_error("isometry completion failed");
  return u;
}

// Symmetric 1 -> 2 qubit cloning circuit on (input, copy, ancilla): both
// copies end with fidelity 5/6 to any pure input.
inline Matrix symmetric_cloner_unitary() {
  Matrix cols = Matrix::Zero(8, 2);
  double a = std::sqrt(2.0 / 3.0), b = std::sqrt(1.0 / 6.0);
  // |000> -> a|000> + b(|011> + |101>)
  cols(0, 0) = a;
  cols(3, 0) = b;
  cols(5, 0) = b;
  // |100> -> a|111> + b(|010> + |100>)
  cols(7, 1) = a;
  cols(2, 1) = b;
  cols(4, 1) = b;
  Matrix completed = complete_isometry(cols);
  // defined columns belong at input indices |000> = 0 and |100> = 4
  Matrix out = Matrix::Zero(8, 8);
  out.col(0) = completed.col(0);
  out.col(4) = completed.col(1);
  int next = 2;
  for (int c = 0; c < 8; ++c) {
    if (c == 0 || c == 4) continue;
    out.col(c) = completed.col(next++);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Two-outcome qubit measurements and the CHSH game value
// ---------------------------------------------------------------------------

struct QubitBasis {
  Vector v0{2};
  Vector v1{2};

  std::vector<Matrix> projectors() const { return {v0 * v0.adjoint(), v1 * v1.adjoint()}; }
};

// Basis on the Bloch equator at azimuth phi: outcomes project onto
// (|0> +- e^{i phi} |1>)/sqrt(2).
inline QubitBasis equatorial_basis(double phi) {
  QubitBasis b;
  double s = 1 / std::sqrt(2.0);
  b.v0 << s, std::polar(s, phi);
  b.v1 << s, -std::polar(s, phi);
  return b;
}

inline QubitBasis computational_basis(bool swapped = false) {
  QubitBasis b;
  b.v0 << 1, 0;
  b.v1 << 0, 1;
  if (swapped) std::swap(b.v0, b.v1);
  return b;
}

// Exact success probability of the correlation game: inputs are uniform
// independent bits, win iff J1 xor J2 = I1 and I2. `a` and `b` hold one
// measurement per input bit for the first/second register of `shared`.
inline double chsh_value(const QuantumState& shared, const std::array<QubitBasis, 2>& a,
                         const std::array<QubitBasis, 2>& b) {
  if (shared.system.count() != 2 || shared.system.dims() != std::vector<int>{2, 2})
    throw std::invalid_argument("the correlation game needs a two-qubit shared state");
  const auto& labels = shared.system.labels();
  double success = 0.0;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2) {
      auto pa = a[i1].projectors();
      auto pb = b[i2].projectors();
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2) {
          if ((j1 ^ j2) != (i1 & i2)) continue;
          Matrix joint = embed_operator(shared.system, {labels[0]}, pa[j1]) *
                         embed_operator(shared.system, {labels[1]}, pb[j2]);
          success += 0.25 * (joint * shared.rho).real().trace();
        }
    }
  return success;
}

}  // namespace qtask
