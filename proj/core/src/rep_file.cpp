#include "pbf/rep_file.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include "pbf/error.hpp"

namespace pbf {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw Error("sha256: OpenSSL digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_num(std::string_view tok, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw FormatError("rep file line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
  return value;
}

int parse_keyed(std::string_view tok, std::string_view key, std::size_t line_no) {
  if (tok.size() <= key.size() + 1 || tok.substr(0, key.size()) != key || tok[key.size()] != '=')
    throw FormatError("rep file line " + std::to_string(line_no) + ": expected " + std::string(key) + "=<int>");
  return parse_num<int>(tok.substr(key.size() + 1), line_no);
}

}  // namespace

std::string serialize_rep(const CarrierBasis& basis, const ProjectedOps& projected) {
  std::ostringstream out;
  out << kRepMagic << '\n';
  out << "p=" << basis.order() << " M=" << basis.cutoff() << " Mkeep=" << basis.m_keep()
      << " ambient=" << basis.ambient_dim() << '\n';
  out << "DIMS\n";
  for (const auto& [g, d] : basis.dims()) out << g.m << ' ' << g.n << ' ' << d << '\n';
  out << "BASIS\n";
  for (const auto& v : basis.vectors())
    for (std::size_t idx = 0; idx < v.coeffs.size(); ++idx) {
      const Complex c = v.coeffs[idx];
      if (c == Complex{}) continue;
      out << v.label.m << ' ' << v.label.n << ' ' << v.label.i << ' ' << idx << ' ' << fmt_double(c.real()) << ' '
          << fmt_double(c.imag()) << '\n';
    }
  for (const auto& b : projected.blocks()) {
    out << "OP " << generator_name(b.generator) << ' ' << b.source.m << ' ' << b.source.n << " -> " << b.target.m
        << ' ' << b.target.n << '\n';
    for (Eigen::Index r = 0; r < b.matrix.rows(); ++r)
      for (Eigen::Index c = 0; c < b.matrix.cols(); ++c)
        out << r << ' ' << c << ' ' << fmt_double(b.matrix(r, c).real()) << ' ' << fmt_double(b.matrix(r, c).imag())
            << '\n';
  }
  std::string body = out.str();
  return body + "END " + sha256_hex(body) + "\n";
}

Representation parse_rep(std::string_view text) {
  std::vector<std::string_view> lines;
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < text.size();) {
    std::size_t j = text.find('\n', i);
    if (j == std::string_view::npos) j = text.size();
    starts.push_back(i);
    lines.push_back(text.substr(i, j - i));
    i = j + 1;
  }

  if (lines.empty() || lines[0] != kRepMagic)
    throw VersionError("rep file: expected header '" + std::string(kRepMagic) + "', got '" +
                       (lines.empty() ? std::string() : std::string(lines[0])) + "'");

  // Trailer and checksum.
  std::size_t end_line = lines.size();
  while (end_line > 0 && lines[end_line - 1].empty()) --end_line;
  if (end_line == 0 || lines[end_line - 1].substr(0, 4) != "END ")
    throw ChecksumError("rep file: missing END trailer (truncated?)");
  --end_line;
  const std::string_view digest = lines[end_line].substr(4);
  const std::string actual = sha256_hex(text.substr(0, starts[end_line]));
  if (digest != actual) throw ChecksumError("rep file: checksum mismatch (file " + std::string(digest) + ", computed " + actual + ")");

  if (end_line < 2) throw FormatError("rep file: truncated header");
  const auto hdr = split_ws(lines[1]);
  if (hdr.size() != 4) throw FormatError("rep file line 2: expected 'p=<int> M=<int> Mkeep=<int> ambient=<int>'");
  const int p = parse_keyed(hdr[0], "p", 2);
  const int M = parse_keyed(hdr[1], "M", 2);
  const int m_keep = parse_keyed(hdr[2], "Mkeep", 2);
  if (hdr[3].substr(0, 8) != "ambient=") throw FormatError("rep file line 2: expected ambient=<int>");
  const auto ambient = parse_num<std::size_t>(hdr[3].substr(8), 2);
  if (p < 1 || M < 2 || m_keep < 0 || m_keep > M - 1)
    throw ValidationError("rep file: header values out of range (p=" + std::to_string(p) + " M=" + std::to_string(M) +
                          " Mkeep=" + std::to_string(m_keep) + ")");
  const ModeLayout layout(p, M);
  if (layout.ambient_dim() != ambient) throw ValidationError("rep file: ambient dimension inconsistent with p and M");

  enum class Section { None, Dims, Basis, Op };
  Section section = Section::None;
  std::map<Grade, int> dims;
  std::map<Label, Vector> coeffs;
  std::vector<OpBlock> blocks;
  std::vector<std::set<std::pair<Eigen::Index, Eigen::Index>>> seen_entries;

  for (std::size_t ln = 2; ln < end_line; ++ln) {
    const std::size_t line_no = ln + 1;
    const std::string_view line = lines[ln];
    const auto tok = split_ws(line);
    auto bad = [&](const std::string& why) {
      return FormatError("rep file line " + std::to_string(line_no) + ": " + why);
    };
    if (tok.empty()) throw bad("empty line");

    if (line == "DIMS") {
      if (section != Section::None) throw bad("DIMS section out of order");
      section = Section::Dims;
      continue;
    }
    if (line == "BASIS") {
      if (section != Section::Dims) throw bad("BASIS section out of order");
      section = Section::Basis;
      continue;
    }
    if (tok[0] == "OP") {
      if (section != Section::Basis && section != Section::Op) throw bad("OP section out of order");
      if (tok.size() != 7 || tok[4] != "->") throw bad("expected 'OP <name> <m> <n> -> <m'> <n'>'");
      const auto gen = parse_generator(tok[1]);
      if (!gen) throw bad("unknown generator '" + std::string(tok[1]) + "'");
      const Grade src{parse_num<int>(tok[2], line_no), parse_num<int>(tok[3], line_no)};
      const Grade tgt{parse_num<int>(tok[5], line_no), parse_num<int>(tok[6], line_no)};
      if (tgt != shifted(src, *gen))
        throw GradingError("rep file line " + std::to_string(line_no) + ": block " + std::string(tok[1]) + " maps " +
                           to_string(src) + " to " + to_string(tgt) + ", expected " +
                           to_string(shifted(src, *gen)));
      auto dim_of = [&](Grade g) {
        auto it = dims.find(g);
        if (it == dims.end() || it->second == 0)
          throw ValidationError("rep file line " + std::to_string(line_no) + ": block references empty grade " +
                                to_string(g));
        return it->second;
      };
      blocks.push_back({*gen, src, tgt, Eigen::MatrixXcd::Zero(dim_of(tgt), dim_of(src)),
                        src.m == m_keep || tgt.m == m_keep});
      seen_entries.emplace_back();
      section = Section::Op;
      continue;
    }

    switch (section) {
      case Section::None:
        throw bad("unknown section '" + std::string(line) + "'");
      case Section::Dims: {
        if (tok.size() != 3) throw bad("expected '<m> <n> <d>'");
        const Grade g{parse_num<int>(tok[0], line_no), parse_num<int>(tok[1], line_no)};
        const int d = parse_num<int>(tok[2], line_no);
        if (d < 0) throw bad("negative dimension");
        if (!dims.empty() && !(dims.rbegin()->first < g)) throw bad("DIMS not in lexicographic order");
        dims[g] = d;
        break;
      }
      case Section::Basis: {
        if (tok.size() != 6) throw bad("expected '<m> <n> <i> <index> <re> <im>'");
        const Label lab{parse_num<int>(tok[0], line_no), parse_num<int>(tok[1], line_no),
                        parse_num<int>(tok[2], line_no)};
        const auto idx = parse_num<std::size_t>(tok[3], line_no);
        if (idx >= ambient) throw bad("ambient index out of range");
        auto& v = coeffs[lab];
        if (v.empty()) v.assign(ambient, Complex{});
        if (v[idx] != Complex{}) throw bad("duplicate coefficient");
        v[idx] = {parse_num<double>(tok[4], line_no), parse_num<double>(tok[5], line_no)};
        break;
      }
      case Section::Op: {
        if (tok.size() != 4) throw bad("expected '<r> <c> <re> <im>'");
        auto& blk = blocks.back();
        const auto r = parse_num<Eigen::Index>(tok[0], line_no);
        const auto c = parse_num<Eigen::Index>(tok[1], line_no);
        if (r < 0 || c < 0 || r >= blk.matrix.rows() || c >= blk.matrix.cols()) throw bad("block entry out of range");
        if (!seen_entries.back().insert({r, c}).second) throw bad("duplicate block entry");
        blk.matrix(r, c) = {parse_num<double>(tok[2], line_no), parse_num<double>(tok[3], line_no)};
        break;
      }
    }
  }

  // Structural validation.
  std::map<Grade, int> expected_grades;
  for (int m = 0; m <= m_keep; ++m)
    for (int n = 0; n <= p; ++n) expected_grades[{m, n}] = 0;
  if (dims.size() != expected_grades.size())
    throw ValidationError("rep file: DIMS must list every grade 0<=m<=Mkeep, 0<=n<=p exactly once");
  for (const auto& [g, d] : dims)
    if (!expected_grades.contains(g)) throw ValidationError("rep file: DIMS lists grade outside range " + to_string(g));

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    if (seen_entries[k].size() != static_cast<std::size_t>(b.matrix.size()))
      throw ValidationError("rep file: block " + std::string(generator_name(b.generator)) + " from " +
                            to_string(b.source) + " is incomplete");
  }

  std::vector<BasisVector> vectors;
  for (auto& [lab, v] : coeffs) {
    if (!dims.contains(lab.grade()) || lab.i < 0 || lab.i >= dims[lab.grade()])
      throw ValidationError("rep file: basis label (" + std::to_string(lab.m) + "," + std::to_string(lab.n) + "," +
                            std::to_string(lab.i) + ") inconsistent with DIMS");
    vectors.push_back({lab, std::move(v)});
  }
  std::size_t total = 0;
  for (const auto& [g, d] : dims) total += static_cast<std::size_t>(d);
  if (vectors.size() != total) throw ValidationError("rep file: BASIS vector count does not match DIMS");

  CarrierBasis basis(p, M, m_keep, ambient, std::move(vectors));
  if (const double dev = gram_deviation(basis); dev > 1e-12)
    throw ValidationError("rep file: basis not orthonormal (max |Gram - I| = " + fmt_double(dev) + ")");
  if (const double leak = grading_leak(layout, basis); leak != 0.0)
    throw GradingError("rep file: basis vector has support outside its (N_b, N_f) grade");

  ProjectedOps projected(p, m_keep, basis.dims(), std::move(blocks));
  if (const double dev = interior_adjoint_deviation(projected); dev > 1e-12)
    throw ValidationError("rep file: raising and lowering blocks are not adjoint (deviation " + fmt_double(dev) + ")");
  return {std::move(basis), std::move(projected)};
}

void save_rep(const CarrierBasis& basis, const ProjectedOps& projected, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("save_rep: cannot open " + path.string() + " for writing");
  out << serialize_rep(basis, projected);
  if (!out) throw Error("save_rep: write to " + path.string() + " failed");
}

Representation load_rep(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_rep: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rep(buf.str());
}

}  // namespace pbf
