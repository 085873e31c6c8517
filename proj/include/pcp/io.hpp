#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "pcp/kruskal.hpp"
#include "pcp/sparse_tensor.hpp"

namespace pcp {

/// FROSTT .tns text: one nonzero per line, d 1-based indices then the
/// value, separated by whitespace. Lines starting with '#' are comments and
/// blank lines are skipped. A comment of the form "# dims: I1 I2 ... Id"
/// fixes the shape; otherwise each mode's size is the largest index seen.
/// Values must be integers (a real with zero fractional part is accepted);
/// explicit zeros are dropped.
///
/// Throws ParseError (with line number), NonIntegerValue,
/// DuplicateCoordinate, NonPositiveValue, IndexOutOfBounds.
SparseCountTensor parse_frostt(std::istream& in);
SparseCountTensor parse_frostt(std::string_view text);
SparseCountTensor read_frostt(const std::filesystem::path& path);

/// Writes the "# dims:" header followed by the nonzeros in storage order.
void write_frostt(std::ostream& out, const SparseCountTensor& x);
void write_frostt(const std::filesystem::path& path, const SparseCountTensor& x);

/// Plain-text Kruskal model, version 1:
///
///   pcp-kruskal 1
///   ndims <d>
///   rank <R>
///   dims <I1> ... <Id>
///   weights <lambda_1> ... <lambda_R>
///   factor <k>            (k = 1..d, followed by I_k rows of R values)
///   <a_11> ... <a_1R>
///   ...
///
/// Reals are written in shortest round-trip form, so write/read reproduces
/// every double bit for bit. Throws ParseError on malformed or truncated
/// input.
void write_model(std::ostream& out, const KruskalModel& m);
void write_model(const std::filesystem::path& path, const KruskalModel& m);
KruskalModel read_model(std::istream& in);
KruskalModel read_model(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace pcp
