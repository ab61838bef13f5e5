#include "pbf/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pbf/error.hpp"

namespace pbf {

ModeLayout::ModeLayout(int order, int cutoff) : order_(order), cutoff_(cutoff) {
  if (order < 1) throw InvalidArgument("mode layout: order p must be >= 1, got " + std::to_string(order));
  if (cutoff < 0) throw InvalidArgument("mode layout: cutoff M must be >= 0, got " + std::to_string(cutoff));
  ambient_dim_ = ambient_dim_for(order, cutoff);
  if (ambient_dim_ == std::numeric_limits<std::size_t>::max())
    throw ResourceLimitError("mode layout: ambient dimension overflows size_t");

  strides_.assign(slot_count(), 1);
  for (int s = slot_count() - 2; s >= 0; --s) strides_[s] = strides_[s + 1] * slot_dim(s + 1);
}

std::size_t ModeLayout::ambient_dim_for(int order, int cutoff) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t dim = 1;
  auto mul = [&](std::size_t f) {
    if (dim > kMax / f) dim = kMax;
    else dim *= f;
  };
  for (int i = 0; i < order && dim != kMax; ++i) mul(static_cast<std::size_t>(cutoff) + 1);
  for (int i = 0; i < order && dim != kMax; ++i) mul(2);
  return dim;
}

void ModeLayout::check_slot(int slot) const {
  if (slot < 0 || slot >= slot_count())
    throw InvalidArgument("slot " + std::to_string(slot) + " out of range [0, " +
                          std::to_string(slot_count()) + ")");
}

int ModeLayout::boson_slot(int component) const {
  if (component < 0 || component >= order_) throw InvalidArgument("boson component out of range");
  return component;
}

int ModeLayout::fermion_slot(int component) const {
  if (component < 0 || component >= order_) throw InvalidArgument("fermion component out of range");
  return order_ + component;
}

std::size_t ModeLayout::slot_dim(int slot) const {
  check_slot(slot);
  return is_boson_slot(slot) ? static_cast<std::size_t>(cutoff_) + 1 : 2;
}

std::size_t ModeLayout::stride(int slot) const {
  check_slot(slot);
  return strides_[slot];
}

int ModeLayout::occupation(std::size_t index, int slot) const {
  check_slot(slot);
  return static_cast<int>((index / strides_[slot]) % slot_dim(slot));
}

std::vector<int> ModeLayout::occupations(std::size_t index) const {
  std::vector<int> occ(slot_count());
  for (int s = 0; s < slot_count(); ++s) occ[s] = occupation(index, s);
  return occ;
}

std::size_t ModeLayout::index_of(std::span<const int> occupations) const {
  if (occupations.size() != static_cast<std::size_t>(slot_count()))
    throw InvalidArgument("occupation tuple has wrong length");
  std::size_t index = 0;
  for (int s = 0; s < slot_count(); ++s) {
    if (occupations[s] < 0 || static_cast<std::size_t>(occupations[s]) >= slot_dim(s))
      throw InvalidArgument("occupation out of range for slot " + std::to_string(s));
    index += static_cast<std::size_t>(occupations[s]) * strides_[s];
  }
  return index;
}

int ModeLayout::total_boson(std::size_t index) const {
  int total = 0;
  for (int a = 0; a < order_; ++a) total += occupation(index, boson_slot(a));
  return total;
}

int ModeLayout::total_fermion(std::size_t index) const {
  int total = 0;
  for (int a = 0; a < order_; ++a) total += occupation(index, fermion_slot(a));
  return total;
}

// ---------------------------------------------------------------------------

SparseOperator::SparseOperator(std::size_t dim) : dim_(dim), row_ptr_(dim + 1, 0) {}

SparseOperator SparseOperator::from_triplets(std::size_t dim, std::vector<Entry> triplets) {
  for (const auto& e : triplets) {
    if (e.row >= dim || e.col >= dim)
      throw InvalidArgument("sparse entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                            ") outside dimension " + std::to_string(dim));
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseOperator out(dim);
  out.entries_.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size();) {
    Entry acc = triplets[i];
    std::size_t j = i + 1;
    for (; j < triplets.size() && triplets[j].row == acc.row && triplets[j].col == acc.col; ++j)
      acc.value += triplets[j].value;
    if (acc.value != Complex{0.0, 0.0}) out.entries_.push_back(acc);
    i = j;
  }
  out.build_row_index();
  return out;
}

SparseOperator SparseOperator::identity(std::size_t dim) {
  SparseOperator out(dim);
  out.entries_.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) out.entries_.push_back({i, i, 1.0});
  out.build_row_index();
  return out;
}

SparseOperator SparseOperator::diagonal(std::span<const Complex> values) {
  SparseOperator out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != Complex{0.0, 0.0}) out.entries_.push_back({i, i, values[i]});
  out.build_row_index();
  return out;
}

void SparseOperator::build_row_index() {
  row_ptr_.assign(dim_ + 1, 0);
  for (const auto& e : entries_) ++row_ptr_[e.row + 1];
  for (std::size_t r = 0; r < dim_; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

std::span<const Entry> SparseOperator::row(std::size_t r) const {
  if (r >= dim_) throw InvalidArgument("row index out of range");
  return std::span<const Entry>(entries_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

Complex SparseOperator::at(std::size_t r, std::size_t c) const {
  auto entries = row(r);
  auto it = std::lower_bound(entries.begin(), entries.end(), c,
                             [](const Entry& e, std::size_t col) { return e.col < col; });
  return (it != entries.end() && it->col == c) ? it->value : Complex{};
}

// ---------------------------------------------------------------------------

LadderPair make_boson_mode(int cutoff) {
  if (cutoff < 1) throw InvalidArgument("boson mode needs cutoff M >= 1, got " + std::to_string(cutoff));
  const std::size_t dim = static_cast<std::size_t>(cutoff) + 1;
  std::vector<Entry> lower;
  for (std::size_t n = 1; n < dim; ++n) lower.push_back({n - 1, n, std::sqrt(static_cast<double>(n))});
  auto lo = SparseOperator::from_triplets(dim, std::move(lower));
  return {adjoint(lo), lo};
}

LadderPair make_fermion_mode() {
  auto raise = SparseOperator::from_triplets(2, {{1, 0, 1.0}});
  return {raise, adjoint(raise)};
}

SparseOperator embed(const SparseOperator& op, int slot, const ModeLayout& layout) {
  const std::size_t d = layout.slot_dim(slot);
  if (op.dimension() != d)
    throw InvalidArgument("embed: operator dimension " + std::to_string(op.dimension()) +
                          " does not match slot dimension " + std::to_string(d));
  const std::size_t stride = layout.stride(slot);
  const std::size_t outer = layout.ambient_dim() / (stride * d);

  std::vector<Entry> triplets;
  triplets.reserve(op.nnz() * outer * stride);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < stride; ++i) {
      const std::size_t base = o * stride * d + i;
      for (const auto& e : op.entries()) triplets.push_back({base + e.row * stride, base + e.col * stride, e.value});
    }
  }
  return SparseOperator::from_triplets(layout.ambient_dim(), std::move(triplets));
}

SparseOperator parity_string(std::span<const int> slots, const ModeLayout& layout) {
  for (int s : slots) layout.slot_dim(s);  // range check
  Vector diag(layout.ambient_dim());
  for (std::size_t idx = 0; idx < diag.size(); ++idx) {
    int total = 0;
    for (int s : slots) total += layout.occupation(idx, s);
    diag[idx] = (total % 2 == 0) ? 1.0 : -1.0;
  }
  return SparseOperator::diagonal(diag);
}

namespace {

void require_same_dim(const SparseOperator& a, const SparseOperator& b, const char* what) {
  if (a.dimension() != b.dimension())
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a.dimension()) + " vs " +
                          std::to_string(b.dimension()) + ")");
}

SparseOperator combine(const SparseOperator& a, const SparseOperator& b, double sign) {
  std::vector<Entry> triplets(a.entries().begin(), a.entries().end());
  triplets.reserve(a.nnz() + b.nnz());
  for (const auto& e : b.entries()) triplets.push_back({e.row, e.col, sign * e.value});
  return SparseOperator::from_triplets(a.dimension(), std::move(triplets));
}

}  // namespace

SparseOperator add(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "add");
  return combine(a, b, 1.0);
}

SparseOperator subtract(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "subtract");
  return combine(a, b, -1.0);
}

SparseOperator scale(const SparseOperator& a, Complex factor) {
  std::vector<Entry> triplets(a.entries().begin(), a.entries().end());
  for (auto& e : triplets) e.value *= factor;
  return SparseOperator::from_triplets(a.dimension(), std::move(triplets));
}

// Row-by-row Gustavson product with a dense accumulator.
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "multiply");
  const std::size_t dim = a.dimension();
  std::vector<Complex> acc(dim);
  std::vector<char> touched(dim, 0);
  std::vector<std::size_t> cols;
  std::vector<Entry> out;

  for (std::size_t r = 0; r < dim; ++r) {
    cols.clear();
    for (const auto& ea : a.row(r)) {
      for (const auto& eb : b.row(ea.col)) {
        if (!touched[eb.col]) {
          touched[eb.col] = 1;
          cols.push_back(eb.col);
          acc[eb.col] = ea.value * eb.value;
        } else {
          acc[eb.col] += ea.value * eb.value;
        }
      }
    }
    std::sort(cols.begin(), cols.end());
    for (auto c : cols) {
      out.push_back({r, c, acc[c]});
      touched[c] = 0;
    }
  }
  return SparseOperator::from_triplets(dim, std::move(out));
}

SparseOperator adjoint(const SparseOperator& a) {
  std::vector<Entry> triplets;
  triplets.reserve(a.nnz());
  for (const auto& e : a.entries()) triplets.push_back({e.col, e.row, std::conj(e.value)});
  return SparseOperator::from_triplets(a.dimension(), std::move(triplets));
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
  return subtract(multiply(a, b), multiply(b, a));
}

SparseOperator anticommutator(const SparseOperator& a, const SparseOperator& b) {
  return add(multiply(a, b), multiply(b, a));
}

Vector apply_operator(const SparseOperator& op, std::span<const Complex> v) {
  if (v.size() != op.dimension())
    throw InvalidArgument("apply: vector length " + std::to_string(v.size()) + " does not match dimension " +
                          std::to_string(op.dimension()));
  Vector out(op.dimension());
  for (const auto& e : op.entries()) out[e.row] += e.value * v[e.col];
  return out;
}

double frobenius_norm(const SparseOperator& a) {
  double sum = 0.0;
  for (const auto& e : a.entries()) sum += std::norm(e.value);
  return std::sqrt(sum);
}

double max_abs_entry(const SparseOperator& a) {
  double m = 0.0;
  for (const auto& e : a.entries()) m = std::max(m, std::abs(e.value));
  return m;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw InvalidArgument("inner: length mismatch");
  Complex sum{};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

double norm(std::span<const Complex> v) {
  double sum = 0.0;
  for (const auto& x : v) sum += std::norm(x);
  return std::sqrt(sum);
}

}  // namespace pbf
