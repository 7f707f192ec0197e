#include "hippa/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hippa {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string trajectory_csv(const Trajectory& traj, const std::optional<Vector>& minimizer) {
  std::string out = "k,gamma,f,env,step_norm";
  if (minimizer) out += ",err_to_min";
  out += "\n";
  for (std::size_t k = 0; k < traj.steps(); ++k) {
    out += std::to_string(k);
    out += ",";
    out += format_double(traj.gammas[k]);
    out += ",";
    out += format_double(traj.f_values[k + 1]);
    out += ",";
    out += format_double(traj.env_values[k]);
    out += ",";
    out += format_double(traj.step_norms[k]);
    if (minimizer) {
      out += ",";
      out += format_double((traj.iterates[k + 1] - *minimizer).norm());
    }
    out += "\n";
  }
  return out;
}

std::string series_text(const Trajectory& traj, const Vector& xbar) {
  std::string out;
  for (std::size_t k = 0; k < traj.iterates.size(); ++k) {
    out += std::to_string(k);
    out += " ";
    out += format_double((traj.iterates[k] - xbar).norm());
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      const char* b = cell.data();
      const char* e = b + cell.size();
      while (b < e && (*b == ' ' || *b == '\t')) ++b;
      while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
      if (b == e) continue;
      double v = 0.0;
      const auto res = std::from_chars(b, e, v);
      if (res.ec != std::errc() || res.ptr != e)
        throw std::runtime_error("bad number '" + std::string(b, e) + "' in " + path.string());
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data in " + path.string());
  return rows;
}

}  // namespace

Vector read_vector_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  Vector v(static_cast<Eigen::Index>(flat.size()));
  for (std::size_t i = 0; i < flat.size(); ++i) v[static_cast<Eigen::Index>(i)] = flat[i];
  return v;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw std::runtime_error("ragged matrix in " + path.string());
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hippa
