#ifndef HIPPA_IO_HPP
#define HIPPA_IO_HPP

#include "hippa/analysis.hpp"

#include <filesystem>

namespace hippa {

/// Shortest round-trip decimal representation; locale-independent, so
/// repeated runs produce byte-identical files.
std::string format_double(double v);

/// One row per iteration: k, gamma, f(x^{k+1}), envelope, step norm and,
/// when the minimizer is known, the error of x^{k+1}.
std::string trajectory_csv(const Trajectory& traj, const std::optional<Vector>& minimizer);

/// Plot-ready "k error" lines, one per iterate (including x^0).
std::string series_text(const Trajectory& traj, const Vector& xbar);

Vector read_vector_csv(const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Write via a temporary file and rename, so readers never observe a
/// partially written run artifact.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hippa

#endif  // HIPPA_IO_HPP
