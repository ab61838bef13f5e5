#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace pbf {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

// Tensor-product layout of p truncated boson slots (dimension M+1 each)
// followed by p fermion slots (dimension 2 each). Slot 0 is the most
// significant digit of the ambient basis index, i.e. operators are laid out
// in Kronecker order slot_0 (x) slot_1 (x) ... (x) slot_{2p-1}.
class ModeLayout {
 public:
  ModeLayout(int order, int cutoff);

  int order() const { return order_; }
  int cutoff() const { return cutoff_; }
  int slot_count() const { return 2 * order_; }

  int boson_slot(int component) const;
  int fermion_slot(int component) const;
  bool is_boson_slot(int slot) const { return slot < order_; }

  std::size_t slot_dim(int slot) const;
  std::size_t stride(int slot) const;
  std::size_t ambient_dim() const { return ambient_dim_; }

  int occupation(std::size_t index, int slot) const;
  std::vector<int> occupations(std::size_t index) const;
  std::size_t index_of(std::span<const int> occupations) const;

  // Sum of boson occupations over all components.
  int total_boson(std::size_t index) const;
  int total_fermion(std::size_t index) const;

  // Ambient dimension (M+1)^p 2^p without constructing a layout; saturates
  // at SIZE_MAX on overflow.
  static std::size_t ambient_dim_for(int order, int cutoff);

 private:
  void check_slot(int slot) const;

  int order_;
  int cutoff_;
  std::vector<std::size_t> strides_;
  std::size_t ambient_dim_;
};

struct Entry {
  std::size_t row;
  std::size_t col;
  Complex value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Square sparse complex matrix in canonical form: entries sorted by
// (row, col), no duplicates, no stored exact zeros.
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(std::size_t dim);

  // Duplicates are summed; entries that are exactly 0.0 afterwards are dropped.
  static SparseOperator from_triplets(std::size_t dim, std::vector<Entry> triplets);
  static SparseOperator identity(std::size_t dim);
  static SparseOperator diagonal(std::span<const Complex> values);

  std::size_t dimension() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }
  std::span<const Entry> row(std::size_t r) const;

  Complex at(std::size_t r, std::size_t c) const;

  friend bool operator==(const SparseOperator&, const SparseOperator&) = default;

 private:
  void build_row_index();

  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> row_ptr_;
};

struct LadderPair {
  SparseOperator raise;
  SparseOperator lower;
};

// Truncated boson ladder on occupations 0..cutoff; lower(n-1, n) = sqrt(n).
LadderPair make_boson_mode(int cutoff);
// Two-level fermion: raise maps occupation 0 to 1.
LadderPair make_fermion_mode();

// op acting on `slot`, identity on every other slot.
SparseOperator embed(const SparseOperator& op, int slot, const ModeLayout& layout);

// Diagonal (-1)^(total occupation of `slots`) per ambient basis state.
SparseOperator parity_string(std::span<const int> slots, const ModeLayout& layout);

SparseOperator add(const SparseOperator& a, const SparseOperator& b);
SparseOperator subtract(const SparseOperator& a, const SparseOperator& b);
SparseOperator scale(const SparseOperator& a, Complex factor);
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);
SparseOperator adjoint(const SparseOperator& a);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);
SparseOperator anticommutator(const SparseOperator& a, const SparseOperator& b);

// op |v>. Not named `apply`: ADL on std::vector arguments would find std::apply.
Vector apply_operator(const SparseOperator& op, std::span<const Complex> v);

double frobenius_norm(const SparseOperator& a);
double max_abs_entry(const SparseOperator& a);

inline SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) { return add(a, b); }
inline SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  return subtract(a, b);
}
inline SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  return multiply(a, b);
}
inline SparseOperator operator*(Complex factor, const SparseOperator& a) { return scale(a, factor); }

// Dense helpers shared by the carrier and model layers.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);  // <a|b>
double norm(std::span<const Complex> v);

}  // namespace pbf
