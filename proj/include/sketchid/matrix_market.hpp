#pragma once

#include <filesystem>
#include <iosfwd>

#include "sketchid/any_matrix.hpp"

namespace sketchid::mm {

// Matrix Market I/O. Sparse matrices use `coordinate real general`, dense ones
// `array real general` (column-major). Values are written with 17 significant
// digits so a write/read cycle is exact. The reader also accepts `integer` and
// `pattern` fields and `symmetric`/`skew-symmetric` storage.

AnyMatrix read(std::istream& in);
AnyMatrix read_file(const std::filesystem::path& path);

SparseMatrix read_sparse_file(const std::filesystem::path& path);  // array files are converted
DenseMatrix read_dense_file(const std::filesystem::path& path);    // coordinate files are densified

void write(std::ostream& out, const SparseMatrix& a);
void write(std::ostream& out, const DenseMatrix& a);
void write_file(const std::filesystem::path& path, const SparseMatrix& a);
void write_file(const std::filesystem::path& path, const DenseMatrix& a);

}  // namespace sketchid::mm
