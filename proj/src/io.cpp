#include "pcp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "pcp/error.hpp"

namespace pcp {

namespace {

constexpr std::string_view kDimsTag = "dims:";
constexpr std::string_view kModelMagic = "pcp-kruskal";
constexpr int kModelVersion = 1;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim_left(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

// Splits on runs of whitespace into `out` (cleared first).
void split_fields(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
}

template <typename T>
bool parse_integer(std::string_view tok, T& value) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool parse_real(std::string_view tok, double& value) {
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

void append_uint(std::string& out, std::uint64_t v) {
  char buf[24];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::string slurp(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIoError, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

SparseCountTensor parse_frostt(std::string_view text) {
  Shape header_dims;
  std::size_t arity = 0;  // fields per data line
  std::vector<std::size_t> subs;
  std::vector<Count> values;
  std::vector<std::size_t> max_index;
  std::vector<std::string_view> fields;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim_left(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    if (line.front() == '#') {
      const std::string_view body = trim_left(line.substr(1));
      if (body.substr(0, kDimsTag.size()) != kDimsTag) continue;
      split_fields(body.substr(kDimsTag.size()), fields);
      if (fields.empty()) throw ParseError(line_no, "empty dims header");
      header_dims.clear();
      for (auto tok : fields) {
        std::size_t v = 0;
        if (!parse_integer(tok, v) || v == 0) {
          throw ParseError(line_no, "bad dimension '" + std::string(tok) + "'");
        }
        header_dims.push_back(v);
      }
      continue;
    }

    split_fields(line, fields);
    if (fields.size() < 2) {
      throw ParseError(line_no, "expected indices followed by a value");
    }
    if (arity == 0) {
      arity = fields.size();
      max_index.assign(arity - 1, 0);
    } else if (fields.size() != arity) {
      throw ParseError(line_no, "expected " + std::to_string(arity) +
                                    " fields, found " +
                                    std::to_string(fields.size()));
    }

    Count count = 0;
    const std::string_view vtok = fields.back();
    if (!parse_integer(vtok, count)) {
      double real = 0.0;
      if (!parse_real(vtok, real)) {
        throw ParseError(line_no, "bad value '" + std::string(vtok) + "'");
      }
      if (!std::isfinite(real) || real != std::floor(real)) {
        throw ParseError(line_no, "value '" + std::string(vtok) + "' is not an integer",
                         ErrorKind::kNonIntegerValue);
      }
      count = static_cast<Count>(real);
    }
    if (count < 0) {
      throw ParseError(line_no, "negative count", ErrorKind::kNonPositiveValue);
    }
    for (std::size_t k = 0; k + 1 < arity; ++k) {
      std::size_t idx = 0;
      if (!parse_integer(fields[k], idx)) {
        throw ParseError(line_no, "bad index '" + std::string(fields[k]) + "'");
      }
      if (idx == 0) {
        throw ParseError(line_no, "indices are 1-based", ErrorKind::kIndexOutOfBounds);
      }
      subs.push_back(idx - 1);
      max_index[k] = std::max(max_index[k], idx);
    }
    // Explicit zeros still count toward the inferred shape.
    if (count == 0) {
      subs.resize(subs.size() - (arity - 1));
      continue;
    }
    values.push_back(count);
  }

  Shape shape = header_dims;
  if (shape.empty()) {
    if (arity == 0) throw ParseError(0, "no nonzeros and no dims header");
    shape = max_index;
  } else if (arity != 0 && shape.size() != arity - 1) {
    throw ParseError(0, "dims header has " + std::to_string(shape.size()) +
                            " modes but data lines have " +
                            std::to_string(arity - 1));
  }
  return make_sparse(std::move(shape), std::move(subs), std::move(values));
}

SparseCountTensor parse_frostt(std::istream& in) { return parse_frostt(slurp(in)); }

SparseCountTensor read_frostt(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_frostt(in);
}

void write_frostt(std::ostream& out, const SparseCountTensor& x) {
  std::string buf = "# dims:";
  for (std::size_t s : x.shape()) {
    buf += ' ';
    append_uint(buf, s);
  }
  buf += '\n';
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    for (std::size_t i : x.subscripts(n)) {
      append_uint(buf, i + 1);
      buf += ' ';
    }
    append_uint(buf, static_cast<std::uint64_t>(x.value(n)));
    buf += '\n';
  }
  out << buf;
}

void write_frostt(const std::filesystem::path& path, const SparseCountTensor& x) {
  auto out = open_out(path);
  write_frostt(out, x);
}

void write_model(std::ostream& out, const KruskalModel& m) {
  std::string buf;
  buf += std::string(kModelMagic) + " " + std::to_string(kModelVersion) + "\n";
  buf += "ndims " + std::to_string(m.ndims()) + "\n";
  buf += "rank " + std::to_string(m.rank()) + "\n";
  buf += "dims";
  for (std::size_t k = 0; k < m.ndims(); ++k) {
    buf += " " + std::to_string(m.factor(k).rows());
  }
  buf += "\nweights";
  for (double w : m.weights()) buf += " " + format_double(w);
  buf += "\n";
  for (std::size_t k = 0; k < m.ndims(); ++k) {
    buf += "factor " + std::to_string(k + 1) + "\n";
    const Matrix& a = m.factor(k);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t r = 0; r < a.cols(); ++r) {
        if (r > 0) buf += ' ';
        buf += format_double(a(i, r));
      }
      buf += '\n';
    }
  }
  out << buf;
}

void write_model(const std::filesystem::path& path, const KruskalModel& m) {
  auto out = open_out(path);
  write_model(out, m);
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split into fields; throws on end of input.
  const std::vector<std::string_view>& next(const char* what) {
    if (!std::getline(in_, line_)) {
      throw ParseError(line_no_ + 1, std::string("truncated input, expected ") + what);
    }
    ++line_no_;
    split_fields(line_, fields_);
    return fields_;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::vector<std::string_view> fields_;
  std::size_t line_no_ = 0;
};

std::size_t keyed_count(LineReader& r, std::string_view key) {
  const auto& f = r.next(std::string(key).c_str());
  std::size_t v = 0;
  if (f.size() != 2 || f[0] != key || !parse_integer(f[1], v)) {
    throw ParseError(r.line(), "expected '" + std::string(key) + " <n>'");
  }
  return v;
}

double real_field(const LineReader& r, std::string_view tok) {
  double v = 0.0;
  if (!parse_real(tok, v)) {
    throw ParseError(r.line(), "bad number '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

KruskalModel read_model(std::istream& in) {
  LineReader r(in);
  {
    const auto& f = r.next("header");
    int version = 0;
    if (f.size() != 2 || f[0] != kModelMagic || !parse_integer(f[1], version)) {
      throw ParseError(r.line(), "not a pcp-kruskal model file");
    }
    if (version != kModelVersion) {
      throw ParseError(r.line(), "unsupported model version " + std::to_string(version));
    }
  }
  const std::size_t d = keyed_count(r, "ndims");
  const std::size_t rank = keyed_count(r, "rank");
  Shape dims;
  {
    const auto& f = r.next("dims");
    if (f.size() != d + 1 || f[0] != "dims") {
      throw ParseError(r.line(), "expected 'dims' with " + std::to_string(d) + " sizes");
    }
    for (std::size_t k = 1; k <= d; ++k) {
      std::size_t v = 0;
      if (!parse_integer(f[k], v)) throw ParseError(r.line(), "bad dimension");
      dims.push_back(v);
    }
  }
  std::vector<double> weights;
  {
    const auto& f = r.next("weights");
    if (f.size() != rank + 1 || f[0] != "weights") {
      throw ParseError(r.line(), "expected 'weights' with " + std::to_string(rank) + " values");
    }
    for (std::size_t i = 1; i <= rank; ++i) weights.push_back(real_field(r, f[i]));
  }
  std::vector<Matrix> factors;
  for (std::size_t k = 0; k < d; ++k) {
    const auto& head = r.next("factor header");
    std::size_t which = 0;
    if (head.size() != 2 || head[0] != "factor" || !parse_integer(head[1], which) ||
        which != k + 1) {
      throw ParseError(r.line(), "expected 'factor " + std::to_string(k + 1) + "'");
    }
    Matrix a(dims[k], rank);
    for (std::size_t i = 0; i < dims[k]; ++i) {
      const auto& f = r.next("factor row");
      if (f.size() != rank) {
        throw ParseError(r.line(), "expected " + std::to_string(rank) + " values");
      }
      for (std::size_t c = 0; c < rank; ++c) a(i, c) = real_field(r, f[c]);
    }
    factors.push_back(std::move(a));
  }
  try {
    return KruskalModel(std::move(weights), std::move(factors));
  } catch (const Error& e) {
    throw ParseError(r.line(), e.what());
  }
}

KruskalModel read_model(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_model(in);
}

}  // namespace pcp
